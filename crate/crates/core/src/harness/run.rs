//! Scenario execution and deterministic artifact writing.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::scenario::Scenario;
use super::HarnessError;
use crate::folds::root_tolerance;
use crate::quantum::{classical_comparison, sample_potential, schrodinger_evolve, wkb_from_measure, Grid};
use crate::transport::{Atom, PushSettings, Transport, TransportError};

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Overrides the scenario's output directory.
    pub out: Option<PathBuf>,
    pub depth: Option<u32>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ManifestFile {
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeSummary {
    pub t: f64,
    pub total_mass: f64,
    pub ac_mass: f64,
    pub singular_mass: f64,
    pub leaked_mass: f64,
    pub atoms: usize,
    pub atom_mass: f64,
    pub lump_mass: f64,
    pub caustic_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub name: String,
    pub version: &'static str,
    /// The scenario after command-line overrides.
    pub scenario: Scenario,
    pub summary: Vec<TimeSummary>,
    pub warnings: Vec<String>,
    pub files: Vec<ManifestFile>,
}

#[derive(Serialize)]
struct AtomEntry {
    x: f64,
    mass: f64,
    interval: [f64; 2],
    low_confidence: bool,
}

impl From<&Atom> for AtomEntry {
    fn from(a: &Atom) -> Self {
        AtomEntry {
            x: a.x,
            mass: a.mass,
            interval: [a.interval.0, a.interval.1],
            low_confidence: a.low_confidence,
        }
    }
}

#[derive(Serialize)]
struct AtomsAtTime {
    t: f64,
    atoms: Vec<AtomEntry>,
    truncation_lumps: Vec<AtomEntry>,
    histogram_spikes: Vec<AtomEntry>,
}

/// Plain decimal in [1e-4, 1e6), shortest exponent form otherwise; both round-trip.
pub(crate) fn num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e6).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

struct Writer {
    dir: PathBuf,
    files: Vec<ManifestFile>,
}

impl Writer {
    fn new(dir: &Path) -> Result<Self, HarnessError> {
        let out_err = |e: std::io::Error| HarnessError::Output {
            path: dir.display().to_string(),
            message: e.to_string(),
        };
        fs::create_dir_all(dir).map_err(out_err)?;
        let probe = dir.join(".write_probe");
        fs::write(&probe, b"").map_err(out_err)?;
        fs::remove_file(&probe).map_err(out_err)?;
        Ok(Writer {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn put(&mut self, name: &str, body: &str) -> Result<(), HarnessError> {
        let path = self.dir.join(name);
        fs::write(&path, body).map_err(|e| HarnessError::Output {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        self.files.push(ManifestFile {
            path: name.to_string(),
            bytes: body.len(),
            sha256: sha256_hex(body.as_bytes()),
        });
        Ok(())
    }
}

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Runs every stage of a scenario and writes its artifacts plus `manifest.json`.
pub fn run_scenario(scenario: &Scenario, options: &RunOptions) -> Result<Manifest, HarnessError> {
    let mut sc = scenario.clone();
    if let Some(d) = options.depth {
        sc = sc.with_depth(d);
    }
    if let Some(s) = options.seed {
        sc.seed = s;
    }
    sc.validate()?;
    let dir = match (&options.out, &sc.output_dir) {
        (Some(p), _) => p.clone(),
        (None, Some(p)) => PathBuf::from(p),
        (None, None) => PathBuf::from("out").join(&sc.name),
    };
    let built = sc.build()?;
    let tr = Transport::with_options(&built.sys, &built.mu, built.opts)?.with_grid(sc.grid_points);
    let (ylo, yhi) = match sc.y_window {
        Some(w) => (w[0], w[1]),
        None => built.mu.support,
    };
    let xs = linspace(sc.x_window[0], sc.x_window[1], sc.x_points);
    let mut out = Writer::new(&dir)?;
    let mut warnings = Vec::new();
    let mut summary = Vec::new();
    let mut counts_csv = String::from("t,x,count,caustic,resolution_warning\n");
    let mut caustics_csv = String::from("t,y,x\n");
    let mut disint_csv = String::from("t,x,weight,momentum\n");
    let mut quantum_csv = String::from("eps,t,observable,quantum,classical,gap,caustic_warning,window_warning\n");
    let mut atoms_json = Vec::new();
    let mut density_files = Vec::new();

    for (ti, &t) in sc.times.iter().enumerate() {
        let grid = tr.fold.grid_on(t, ylo, yhi, sc.grid_points)?;
        let counts = tr.fold.count_on(&grid, &xs)?;
        for c in &counts {
            let _ = writeln!(
                counts_csv,
                "{},{},{},{},{}",
                num(t),
                num(c.x),
                c.count,
                c.is_caustic as u8,
                c.resolution_warning as u8
            );
        }
        let warned = counts.iter().filter(|c| c.resolution_warning).count();
        if warned > 0 {
            warnings.push(format!(
                "t = {}: {warned} fold counts carry a resolution warning",
                num(t)
            ));
        }
        let mut flat_runs = Vec::new();
        let mut run_start: Option<usize> = None;
        for (i, s) in grid.samples.iter().enumerate() {
            let fold = tr.fold.is_fold(s);
            if fold {
                let _ = writeln!(caustics_csv, "{},{},{}", num(t), num(s.y), num(s.image));
            }
            match (fold, run_start) {
                (true, None) => run_start = Some(i),
                (true, Some(j)) if (s.image - grid.samples[j].image).abs() > root_tolerance(s.image) => {
                    if i - j >= 2 {
                        flat_runs.push(grid.samples[(i - 1 + j) / 2].image);
                    }
                    run_start = Some(i);
                }
                (false, Some(j)) => {
                    if i - j >= 2 {
                        flat_runs.push(grid.samples[(i - 1 + j) / 2].image);
                    }
                    run_start = None;
                }
                _ => {}
            }
        }
        if let Some(j) = run_start {
            let n = grid.samples.len();
            if n - j >= 2 {
                flat_runs.push(grid.samples[(n - 1 + j) / 2].image);
            }
        }

        let settings = PushSettings {
            bins: sc.bins,
            window: sc.density_window.map(|w| (w[0], w[1])),
            panels: sc.panels,
            order: sc.order,
            ..PushSettings::default()
        };
        let td = tr.push_forward(t, &settings)?;
        if td.window_warning {
            warnings.push(format!(
                "t = {}: mass {} falls outside the density window",
                num(t),
                num(td.leaked_mass)
            ));
        }
        let mut dens = String::from("bin_center,total,ac,sing\n");
        for (i, x) in td.bin_centers().iter().enumerate() {
            let _ = writeln!(
                dens,
                "{},{},{},{}",
                num(*x),
                num(td.total[i]),
                num(td.ac[i]),
                num(td.sing[i])
            );
        }
        density_files.push((format!("density_t{ti}.csv"), dens));

        let mut candidates = sc.atom_candidates.clone();
        candidates.extend(flat_runs);
        candidates.extend(td.atoms.iter().map(|a| a.x));
        let mids: Vec<f64> = built.pieces.iter().map(|p| 0.5 * (p.0 + p.1)).collect();
        for m in mids {
            candidates.push(tr.fold.at(t, m)?.image);
        }
        let report = tr.detect_atoms(t, &candidates)?;
        let (ac_mass, singular_mass) = td.lebesgue_split();
        summary.push(TimeSummary {
            t,
            total_mass: td.total_mass(),
            ac_mass,
            singular_mass,
            leaked_mass: td.leaked_mass,
            atoms: report.atoms.len(),
            atom_mass: report.atoms.iter().fold(0.0, |s, a| s + a.mass),
            lump_mass: report.lumps.iter().fold(0.0, |s, a| s + a.mass),
            caustic_points: counts.iter().filter(|c| c.is_caustic).count(),
        });
        atoms_json.push(AtomsAtTime {
            t,
            atoms: report.atoms.iter().map(AtomEntry::from).collect(),
            truncation_lumps: report.lumps.iter().map(AtomEntry::from).collect(),
            histogram_spikes: td.atoms.iter().map(AtomEntry::from).collect(),
        });

        for &x in &sc.disintegration {
            match tr.disintegrate(t, x) {
                Ok(d) => {
                    for (w, p) in d.atoms {
                        let _ = writeln!(disint_csv, "{},{},{},{}", num(t), num(x), num(w), num(p));
                    }
                }
                Err(TransportError::Caustic { .. }) => warnings.push(format!(
                    "t = {}: x = {} lies on the caustic; disintegration skipped",
                    num(t),
                    num(x)
                )),
                Err(e) => return Err(e.into()),
            }
        }

        if let Some(q) = &sc.quantum {
            let (lo, hi) = (built.mu.support.0.min(td.window.0), built.mu.support.1.max(td.window.1));
            let qgrid = Grid::around(lo, hi, q.window_factor, q.grid_points)?;
            let potential = sample_potential(&built.sys, qgrid)?;
            let steps = if potential.is_some() {
                ((t.abs() * q.steps_per_unit_time as f64).ceil() as usize).max(1)
            } else {
                1
            };
            let observables = q.observables.iter().map(|o| o.build()).collect::<Result<Vec<_>, _>>()?;
            for &eps in &q.eps {
                let field = wkb_from_measure(&built.mu, eps, qgrid)?;
                let ev = schrodinger_evolve(&field, potential.as_deref(), t, steps);
                if ev.window_warning {
                    warnings.push(format!(
                        "t = {}, eps = {}: wave mass {} reached the guard bands",
                        num(t),
                        num(eps),
                        num(ev.max_boundary_mass)
                    ));
                }
                for (spec, chi) in q.observables.iter().zip(&observables) {
                    let c = classical_comparison(&ev.field, &tr, &td, &**chi)?;
                    let _ = writeln!(
                        quantum_csv,
                        "{},{},{},{},{},{},{},{}",
                        num(eps),
                        num(t),
                        spec.label(),
                        num(c.quantum),
                        num(c.classical),
                        num(c.gap),
                        c.caustic_warning as u8,
                        ev.window_warning as u8
                    );
                }
            }
        }
    }

    out.put("fold_counts.csv", &counts_csv)?;
    out.put("caustics.csv", &caustics_csv)?;
    for (name, body) in &density_files {
        out.put(name, body)?;
    }
    let atoms_body = serde_json::to_string_pretty(&atoms_json).expect("atoms serialize") + "\n";
    out.put("atoms.json", &atoms_body)?;
    if !sc.disintegration.is_empty() {
        out.put("disintegration.csv", &disint_csv)?;
    }
    if sc.quantum.is_some() {
        out.put("quantum.csv", &quantum_csv)?;
    }
    let manifest = Manifest {
        name: sc.name.clone(),
        version: env!("CARGO_PKG_VERSION"),
        scenario: sc,
        summary,
        warnings,
        files: out.files.clone(),
    };
    let body = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    let path = out.dir.join("manifest.json");
    fs::write(&path, body).map_err(|e| HarnessError::Output {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    Ok(manifest)
}
