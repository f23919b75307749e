//! The acceptance suite: one pass/fail verdict per criterion with its measured numbers.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::{rngs::StdRng, Rng, SeedableRng};
use serde::Serialize;

use super::builtin::builtin;
use super::scenario::BuiltScenario;
use super::HarnessError;
use crate::flow::{evolve, HamiltonianSystem, IntegratorOptions, PhasePoint};
use crate::folds::{FoldMap, FoldQuery, JACOBIAN_THRESHOLD};
use crate::profiles::{profile_log_oscillation, profile_neg_sin, ThetaCantor};
use crate::quantum::{
    classical_comparison, coherent_state, husimi, schrodinger_evolve, smoothed_density, smoothed_momentum_density,
    wkb_from_measure, wkb_initial, Grid,
};
use crate::smooth;
use crate::transport::{PushSettings, Transport};

/// Criterion identifiers and names, in report order.
pub const CRITERIA: [(u32, &str); 12] = [
    (1, "flow_fidelity"),
    (2, "oddness"),
    (3, "counting_bound"),
    (4, "area_formula"),
    (5, "log_oscillation_roots"),
    (6, "bump_focusing_atom"),
    (7, "theta_tree_atoms"),
    (8, "fat_cantor_diffuse_singular"),
    (9, "cantor_caustic_blowup"),
    (10, "quantum_marginals"),
    (11, "semiclassical_trend"),
    (12, "multiphase_consistency"),
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcceptanceConfig {
    /// Jacobian-zero threshold used by every fold map in the suite.
    pub jacobian_threshold: f64,
    pub seed: u64,
    /// Truncation depth of the Cantor-function profile.
    pub cantor_depth: u32,
}

impl Default for AcceptanceConfig {
    fn default() -> Self {
        AcceptanceConfig {
            jacobian_threshold: JACOBIAN_THRESHOLD,
            seed: 0,
            cantor_depth: 12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "{} {:>2} {:<28} {} ({:.1}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.seconds
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AcceptanceReport {
    pub criteria: Vec<CriterionResult>,
}

impl AcceptanceReport {
    pub fn all_passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    pub fn get(&self, id: u32) -> Option<&CriterionResult> {
        self.criteria.iter().find(|c| c.id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

type Verdict = Result<(bool, String), HarnessError>;

/// Runs the selected criteria (all when `only` is empty), calling `progress`
/// after each one.
pub fn run_acceptance(
    config: &AcceptanceConfig,
    only: &[u32],
    mut progress: impl FnMut(&CriterionResult),
) -> AcceptanceReport {
    let mut criteria = Vec::new();
    for &(id, name) in CRITERIA.iter().filter(|c| only.is_empty() || only.contains(&c.0)) {
        let start = Instant::now();
        let verdict = match id {
            1 => flow_fidelity(config),
            2 => oddness(config),
            3 => counting_bound(config),
            4 => area_formula(config),
            5 => log_oscillation_roots(config),
            6 => bump_focusing_atom(config),
            7 => theta_tree_atoms(config),
            8 => fat_cantor(config),
            9 => cantor_caustic(config),
            10 => quantum_marginals(),
            11 => semiclassical_trend(config),
            _ => multiphase(config),
        };
        let (passed, detail) = verdict.unwrap_or_else(|e| (false, format!("error: {e}")));
        let r = CriterionResult {
            id,
            name,
            passed,
            detail,
            seconds: start.elapsed().as_secs_f64(),
        };
        progress(&r);
        criteria.push(r);
    }
    AcceptanceReport { criteria }
}

fn scenario(name: &str) -> Result<BuiltScenario, HarnessError> {
    builtin(name)
        .ok_or_else(|| HarnessError::UnknownScenario(name.into()))?
        .build()
}

fn transport<'a>(b: &'a BuiltScenario, config: &AcceptanceConfig) -> Result<Transport<'a>, HarnessError> {
    let mut tr = Transport::with_options(&b.sys, &b.mu, b.opts)?;
    tr.fold = tr.fold.with_jacobian_threshold(config.jacobian_threshold);
    Ok(tr)
}

fn flow_fidelity(config: &AcceptanceConfig) -> Verdict {
    let sys = HamiltonianSystem::harmonic(1);
    let opts = IntegratorOptions::default();
    let mut rng = StdRng::seed_from_u64(config.seed);
    let (mut pos, mut jac, mut symp, mut bound_violations) = (0.0f64, 0.0f64, 0.0f64, 0usize);
    for _ in 0..1000 {
        let (x, xi) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let t: f64 = rng.random_range(-2.0 * PI..2.0 * PI);
        let jet = evolve(&sys, &PhasePoint::one(x, xi), t, &opts)?;
        let (c, s) = (t.cos(), t.sin());
        pos = pos
            .max((jet.point.x[0] - (x * c + xi * s)).abs())
            .max((jet.point.xi[0] - (xi * c - x * s)).abs());
        let exact = [[c, s], [-s, c]];
        for (i, row) in exact.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                jac = jac.max((jet.jacobian[(i, j)] - v).abs());
            }
        }
        symp = symp.max(jet.symplectic_defect());
        if jet.jacobian_deviation() > (sys.kappa * t.abs()).exp() - 1.0 + 1e-12 {
            bound_violations += 1;
        }
    }
    Ok((
        pos <= 1e-8 && jac <= 1e-8 && symp <= 1e-8 && bound_violations == 0,
        format!("max state error {pos:.2e}, tangent error {jac:.2e}, symplectic defect {symp:.2e}, bound violations {bound_violations}"),
    ))
}

/// Caustic values of y ↦ y − t sin y inside [−r, r].
fn neg_sin_caustic_values(t: f64, r: f64) -> Vec<f64> {
    if t < 1.0 {
        return Vec::new();
    }
    let base = (1.0 / t).acos();
    let mut out = Vec::new();
    let kmax = (r / (2.0 * PI)).ceil() as i64 + 2;
    for k in -kmax..=kmax {
        for y in [base + 2.0 * PI * k as f64, -base + 2.0 * PI * k as f64] {
            let x = y - t * y.sin();
            if x.abs() <= r + 1.0 {
                out.push(x);
            }
        }
    }
    out
}

fn oddness(config: &AcceptanceConfig) -> Verdict {
    let sys = HamiltonianSystem::free(1);
    let p = profile_neg_sin();
    let fm = FoldMap::new(&sys, &*p)?.with_jacobian_threshold(config.jacobian_threshold);
    let xs: Vec<f64> = (0..2048).map(|i| -6.0 + 12.0 * i as f64 / 2047.0).collect();
    let (mut even, mut misflagged, mut flagged) = (0usize, 0usize, 0usize);
    for t in [0.5, 2.0, 5.0] {
        let caustics = neg_sin_caustic_values(t, 6.0);
        for c in fm.count_folds(t, &xs, 12.0, 8192)? {
            if c.is_caustic {
                flagged += 1;
                // A flagged point must sit on a caustic value up to the root tolerance scale.
                if !caustics.iter().any(|&v| (v - c.x).abs() <= 1e-6) {
                    misflagged += 1;
                }
            } else if c.count % 2 == 0 {
                even += 1;
            }
        }
    }
    Ok((
        even == 0 && misflagged == 0,
        format!("even counts {even}, caustic-flagged {flagged} of which {misflagged} away from caustic values"),
    ))
}

fn counting_bound(config: &AcceptanceConfig) -> Verdict {
    let sys = HamiltonianSystem::free(1);
    let p = profile_neg_sin();
    let fm = FoldMap::new(&sys, &*p)?.with_jacobian_threshold(config.jacobian_threshold);
    let mut ok = true;
    let mut detail = Vec::new();
    for t in [0.5, 2.0] {
        for b in fm.counting_bound_check(t, 10.0, &[1, 3, 5], 8192, 4096)? {
            ok &= b.holds;
            detail.push(format!("t={t} n={}: {:.3} <= {:.3}", b.n, b.lhs, b.rhs));
        }
    }
    Ok((ok, detail.join("; ")))
}

fn area_formula(config: &AcceptanceConfig) -> Verdict {
    let sys = HamiltonianSystem::free(1);
    let p = profile_neg_sin();
    let fm = FoldMap::new(&sys, &*p)?.with_jacobian_threshold(config.jacobian_threshold);
    let mut worst = 0.0f64;
    for t in [0.5, 2.0] {
        worst = worst.max(fm.area_formula(t, 10.0, 8192, 4096)?.relative_gap());
    }
    Ok((worst <= 1e-2, format!("largest relative gap {worst:.2e}")))
}

fn log_oscillation_roots(config: &AcceptanceConfig) -> Verdict {
    let sys = HamiltonianSystem::free(1);
    let p = profile_log_oscillation();
    let fm = FoldMap::new(&sys, &*p)?.with_jacobian_threshold(config.jacobian_threshold);
    let set = fm.preimages_1d(&FoldQuery {
        t: -2.0,
        x: 0.0,
        radius: PI,
        grid_points: 4000,
    })?;
    let (mut found, mut image, mut slope) = (0usize, 0.0f64, 0.0f64);
    for n in 0..3 {
        let y = (PI / 6.0 - 2.0 * PI * n as f64).exp();
        if let Some(r) = set.preimages.iter().find(|r| (r.y - y).abs() < 1e-9 * y) {
            found += 1;
            image = image.max(r.image.abs());
            slope = slope.max((r.jacobian().unwrap_or(f64::INFINITY) - 3f64.sqrt()).abs());
        }
    }
    Ok((
        found == 3 && image <= 1e-8 && slope <= 1e-6,
        format!("found {found}/3, max |F| {image:.2e}, max ||F'| - sqrt 3| {slope:.2e}"),
    ))
}

fn bump_focusing_atom(config: &AcceptanceConfig) -> Verdict {
    let b = scenario("example_3_2")?;
    let tr = transport(&b, config)?;
    let td = tr.push_forward(
        1.0,
        &PushSettings {
            window: Some((-1.0, 1.0)),
            ..Default::default()
        },
    )?;
    let central = td.mass_in(-1e-3, 1e-3);
    let report = tr.detect_atoms(1.0, &[0.0])?;
    let single = report.atoms.len() == 1
        && report.atoms[0].x.abs() <= 1e-3
        && (report.atoms[0].mass - 1.0).abs() <= 1e-3
        && report.lumps.is_empty();
    let atom = report
        .atoms
        .first()
        .map_or("none".to_string(), |a| format!("({:.2e}, {:.6})", a.x, a.mass));
    Ok((
        (central - 1.0).abs() <= 1e-3 && single,
        format!(
            "mass in [-1e-3, 1e-3] {central:.6}, atoms {} first {atom}",
            report.atoms.len()
        ),
    ))
}

fn theta_tree_atoms(config: &AcceptanceConfig) -> Verdict {
    let (theta, depth) = (0.25, 10);
    let b = scenario("example_3_4_theta_0.25")?;
    let tr = transport(&b, config)?;
    let p = ThetaCantor::new(theta, depth).map_err(|e| HarnessError::invalid("profile", e.to_string()))?;
    let tree = p.tree(depth);
    let predicted = tree.predicted_atoms();
    let mut candidates: Vec<f64> = predicted.iter().map(|a| a.1).collect();
    candidates.extend(tree.leaves().iter().map(|l| p.time_one(0.5 * (l.0 + l.1))));
    let report = tr.detect_atoms(1.0, &candidates)?;
    let (mut missing, mut worst) = (0usize, 0.0f64);
    for &(_, x, mass) in predicted.iter().filter(|a| a.0 <= 5) {
        let nearest = report
            .atoms
            .iter()
            .min_by(|a, b| (a.x - x).abs().total_cmp(&(b.x - x).abs()));
        match nearest.filter(|a| (a.x - x).abs() <= 1e-4 * x.abs()) {
            Some(a) => worst = worst.max((a.mass - mass).abs() / mass),
            None => missing += 1,
        }
    }
    let total = report.total_mass();
    let floor = 1.0 - theta.powi(depth as i32);
    let fixed = tree
        .levels
        .iter()
        .flatten()
        .map(|&a| (p.time_one(a) - a).abs())
        .fold(0.0, f64::max);
    Ok((
        missing == 0 && worst <= 1e-4 && total >= floor && fixed <= 1e-10,
        format!(
            "missing {missing}, worst relative mass error {worst:.2e}, total {total:.9} (floor {floor:.9}), fixed-point error {fixed:.2e}"
        ),
    ))
}

fn fat_cantor(config: &AcceptanceConfig) -> Verdict {
    let b = scenario("example_3_3")?;
    let tr = transport(&b, config)?;
    let td = tr.push_forward(
        1.0,
        &PushSettings {
            panels: 1,
            order: 2,
            ..Default::default()
        },
    )?;
    let (_, sing) = td.lebesgue_split();
    let mut maxima = vec![td.rebin(2048).into_iter().fold(0.0, f64::max)];
    for bins in [8192, 32768, 131072] {
        maxima.push(td.rebin(bins).into_iter().fold(0.0, f64::max));
    }
    let ratios: Vec<f64> = maxima.windows(2).map(|w| w[1] / w[0]).collect();
    let diffuse = ratios.iter().all(|&r| r <= 0.5);
    Ok((
        (sing - 1.0).abs() <= 1e-3 && diffuse,
        format!(
            "singular mass {sing:.6}, max-bin ratios {}",
            ratios.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>().join(", ")
        ),
    ))
}

fn cantor_caustic(config: &AcceptanceConfig) -> Verdict {
    let depth = config.cantor_depth;
    let b = builtin("example_3_1").expect("built-in").with_depth(depth).build()?;
    let tr = transport(&b, config)?;
    let grid = tr.grid(1.0)?;
    let bins = 2048;
    let mut uncovered = 0usize;
    for i in 0..bins {
        let x = (i as f64 + 0.5) / bins as f64;
        if !tr.fold.preimages_on(&grid, x)?.is_caustic_point {
            uncovered += 1;
        }
    }
    let gap = uncovered as f64 / bins as f64;
    let allowed = 2.0 * (2.0f64 / 3.0).powi(depth as i32);
    Ok((
        gap <= allowed,
        format!("uncovered length {gap:.4} of [0, 1], allowed {allowed:.4} at depth {depth}"),
    ))
}

fn free_gaussian(x: f64, t: f64, x0: f64, xi0: f64, eps: f64) -> Complex64 {
    let s = Complex64::new(1.0, t);
    let d = x - x0 - xi0 * t;
    let expo =
        -Complex64::new(d * d, 0.0) / (2.0 * eps * s) + Complex64::new(0.0, (xi0 * x - 0.5 * xi0 * xi0 * t) / eps);
    (PI * eps).powf(-0.25) / s.sqrt() * expo.exp()
}

fn quantum_marginals() -> Verdict {
    let eps = 0.1;
    let grid = Grid::new(-8.0, 8.0, 1024)?;
    let field = wkb_initial(&|x| smooth::bump(x / 3.0), &|x: f64| x.cos() - 1.0, eps, grid)?;
    let h = husimi(&field, 1);
    let max_diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
    let total = (h.total() - 1.0).abs();
    let ex = max_diff(&smoothed_density(&field), &h.x_marginal());
    let exi = max_diff(&smoothed_momentum_density(&field), &h.xi_marginal());

    let eps = 0.05;
    let grid = Grid::new(-12.0, 12.0, 2048)?;
    let (x0, xi0) = (-1.0, 0.8);
    let ev = schrodinger_evolve(&coherent_state(x0, xi0, eps, grid)?, None, 3.0, 1);
    let free = (0..grid.n)
        .map(|j| (ev.field.values[j] - free_gaussian(grid.x(j), 3.0, x0, xi0, eps)).norm())
        .fold(0.0, f64::max);
    Ok((
        total <= 1e-6 && ex <= 1e-6 && exi <= 1e-6 && free <= 1e-6,
        format!("Husimi total {total:.2e}, x-marginal {ex:.2e}, xi-marginal {exi:.2e}; free gaussian {free:.2e}"),
    ))
}

const EPS_SWEEP: [f64; 4] = [0.1, 0.05, 0.025, 0.0125];

fn semiclassical_trend(config: &AcceptanceConfig) -> Verdict {
    let b = scenario("free_neg_sin")?;
    let tr = transport(&b, config)?;
    let t = 0.5;
    let pushed = tr.push_forward(t, &PushSettings::default())?;
    let grid = Grid::new(-12.0, 12.0, 1 << 14)?;
    let chis: [&dyn Fn(f64) -> f64; 3] = [
        &|x| smooth::plateau(x, 0.5, 1.5),
        &|x| (-(x - 1.0) * (x - 1.0)).exp(),
        &|x| 1.0 / (1.0 + x * x),
    ];
    let mut gaps = vec![Vec::new(); chis.len()];
    for eps in EPS_SWEEP {
        let ev = schrodinger_evolve(&wkb_from_measure(&b.mu, eps, grid)?, None, t, 1);
        for (k, chi) in chis.iter().enumerate() {
            gaps[k].push(classical_comparison(&ev.field, &tr, &pushed, *chi)?.gap);
        }
    }
    let monotone = gaps.iter().all(|g| g.windows(2).all(|w| w[1] < w[0]));

    let focus = scenario("example_3_2")?;
    let grid = Grid::new(-8.0, 8.0, 1 << 14)?;
    let mut central = Vec::new();
    for eps in EPS_SWEEP {
        let ev = schrodinger_evolve(&wkb_from_measure(&focus.mu, eps, grid)?, None, 1.0, 1);
        central.push(ev.field.integrate(&|x: f64| if x.abs() < 0.1 { 1.0 } else { 0.0 }));
    }
    let rising = central.windows(2).all(|w| w[1] > w[0]) && central.last().is_some_and(|&v| v >= 0.9);
    let fmt = |v: &[f64]| v.iter().map(|g| format!("{g:.1e}")).collect::<Vec<_>>().join(" > ");
    Ok((
        monotone && rising,
        format!(
            "gaps [{}], [{}], [{}]; focused mass {}",
            fmt(&gaps[0]),
            fmt(&gaps[1]),
            fmt(&gaps[2]),
            central
                .iter()
                .map(|g| format!("{g:.3}"))
                .collect::<Vec<_>>()
                .join(" < ")
        ),
    ))
}

fn multiphase(config: &AcceptanceConfig) -> Verdict {
    let b = scenario("free_neg_sin")?;
    let tr = transport(&b, config)?;
    let grid = tr.grid(2.0)?;
    let mut worst = 0.0f64;
    let mut branches_ok = true;
    for x in [-0.5, -0.25, 0.05, 0.3, 0.55] {
        let w = tr.wkb_on(&grid, x, 256)?;
        branches_ok &= w.branches.len() == 3 && !w.maslov_warning;
        let d = tr.density_on(&grid, x)?.value;
        worst = worst.max((w.eps_average(0.0125, 512) - d).abs() / d);
    }
    Ok((
        branches_ok && worst <= 0.05,
        format!("worst relative deviation {worst:.4} over five three-branch points"),
    ))
}
