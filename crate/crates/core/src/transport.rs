//! Push-forward of monokinetic measures, fold-sum densities, Lebesgue split,
//! atom detection, disintegration and multiphase WKB amplitudes.

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::flow::{HamiltonianSystem, IntegratorOptions};
use crate::folds::{root_tolerance, FoldError, FoldGrid, FoldMap, MaslovIndex};
use crate::profiles::MomentumProfile;
use crate::quad::{GaussLegendre, ScalarFn};

/// min_j J_t(y_j) below this marks a fold-sum density as near-caustic.
pub const NEAR_CAUSTIC: f64 = 1e-6;
/// Sign of the Maslov phase e^{±iπν/2}.
pub const MASLOV_SIGN: f64 = -1.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransportError {
    #[error(transparent)]
    Fold(#[from] FoldError),
    #[error("x = {x} lies on the caustic fiber; the density is undefined there")]
    Caustic { x: f64 },
    #[error("invalid initial density: {0}")]
    BadDensity(String),
}

/// ρ^in(y) δ(ξ − U(y)) with ρ^in normalized on its support by quadrature.
#[derive(Clone)]
pub struct MonokineticMeasure {
    pub profile: MomentumProfile,
    density: ScalarFn,
    scale: f64,
    pub support: (f64, f64),
    /// Sorted points splitting the support into pieces on which ρ^in is smooth.
    breakpoints: Vec<f64>,
    rule: GaussLegendre,
}

impl std::fmt::Debug for MonokineticMeasure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MonokineticMeasure")
            .field("profile", &self.profile.name())
            .field("support", &self.support)
            .field("pieces", &(self.breakpoints.len() - 1))
            .finish()
    }
}

impl MonokineticMeasure {
    /// `breakpoints` inside the support mark discontinuities of ρ^in; the ends are added.
    pub fn new(
        profile: MomentumProfile,
        density: ScalarFn,
        support: (f64, f64),
        breakpoints: &[f64],
    ) -> Result<Self, TransportError> {
        let (a, b) = support;
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(TransportError::BadDensity(format!("empty support [{a}, {b}]")));
        }
        let mut bp: Vec<f64> = breakpoints.iter().copied().filter(|&p| p > a && p < b).collect();
        bp.push(a);
        bp.push(b);
        bp.sort_by(f64::total_cmp);
        bp.dedup();
        let mut mu = MonokineticMeasure {
            profile,
            density,
            scale: 1.0,
            support,
            breakpoints: bp,
            rule: GaussLegendre::new(8),
        };
        let probe = (0..=1000).map(|i| a + (b - a) * i as f64 / 1000.0);
        for y in probe {
            let v = (mu.density)(y);
            if !(v >= 0.0) || !v.is_finite() {
                return Err(TransportError::BadDensity(format!("ρ^in({y}) = {v}")));
            }
        }
        let mass = mu.mass_between(a, b);
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(TransportError::BadDensity(format!("total mass {mass}")));
        }
        mu.scale = 1.0 / mass;
        Ok(mu)
    }

    pub fn density(&self, y: f64) -> f64 {
        if y < self.support.0 || y > self.support.1 {
            0.0
        } else {
            self.scale * (self.density)(y)
        }
    }

    /// a^in = √ρ^in.
    pub fn amplitude(&self, y: f64) -> f64 {
        self.density(y).sqrt()
    }

    /// Quadrature panels covering [a, b], split at breakpoints and no longer
    /// than 1/`min_panels` of the support.
    fn panels(&self, a: f64, b: f64, min_panels: usize) -> Vec<(f64, f64)> {
        let (s0, s1) = self.support;
        let (a, b) = (a.max(s0), b.min(s1));
        if !(a < b) {
            return Vec::new();
        }
        let max_len = (s1 - s0) / min_panels.max(1) as f64;
        let start = self.breakpoints.partition_point(|&p| p <= a);
        let end = self.breakpoints.partition_point(|&p| p < b);
        let mut cuts = Vec::with_capacity(end - start + 2);
        cuts.push(a);
        cuts.extend_from_slice(&self.breakpoints[start..end]);
        cuts.push(b);
        let mut out = Vec::new();
        for w in cuts.windows(2) {
            let k = ((w[1] - w[0]) / max_len).ceil().max(1.0) as usize;
            let h = (w[1] - w[0]) / k as f64;
            for i in 0..k {
                out.push((w[0] + i as f64 * h, w[0] + (i + 1) as f64 * h));
            }
        }
        out
    }

    /// ∫_a^b ρ^in.
    pub fn mass_between(&self, a: f64, b: f64) -> f64 {
        self.panels(a, b, 256)
            .iter()
            .map(|&(lo, hi)| self.rule.integrate(|y| self.density(y), lo, hi))
            .sum()
    }

    /// Weighted quadrature nodes (y, w·ρ^in(y)) with ρ^in(y) > 0.
    fn nodes(&self, min_panels: usize, order: usize) -> Vec<(f64, f64)> {
        let rule = GaussLegendre::new(order);
        let (a, b) = self.support;
        let mut out = Vec::new();
        for (lo, hi) in self.panels(a, b, min_panels) {
            let half = 0.5 * (hi - lo);
            for (z, w) in rule.nodes().iter().zip(rule.weights()) {
                let y = lo + half * (z + 1.0);
                let m = half * w * self.density(y);
                if m > 0.0 {
                    out.push((y, m));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PushSettings {
    pub bins: usize,
    /// Histogram window; `None` fits the image of the support.
    pub window: Option<(f64, f64)>,
    /// Minimum number of quadrature panels across the support.
    pub panels: usize,
    pub order: usize,
    /// Largest mass allowed outside the window before a warning is raised.
    pub mass_tolerance: f64,
}

impl Default for PushSettings {
    fn default() -> Self {
        PushSettings {
            bins: 2048,
            window: None,
            panels: 4096,
            order: 4,
            mass_tolerance: 1e-6,
        }
    }
}

/// One transported quadrature node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportSample {
    pub y: f64,
    pub image: f64,
    pub mass: f64,
    /// J_t(y) ≤ threshold or y ∈ E.
    pub singular: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub x: f64,
    pub mass: f64,
    /// Flat preimage interval (first one when several contribute).
    pub interval: (f64, f64),
    /// The flat interval is narrower than one grid cell.
    pub low_confidence: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransportedDensity {
    pub t: f64,
    pub window: (f64, f64),
    pub bin_width: f64,
    pub total: Vec<f64>,
    pub ac: Vec<f64>,
    pub sing: Vec<f64>,
    /// Spikes of the histogram that keep concentrating under refinement.
    pub atoms: Vec<Atom>,
    pub leaked_mass: f64,
    pub window_warning: bool,
    samples: Vec<TransportSample>,
}

impl TransportedDensity {
    pub fn samples(&self) -> &[TransportSample] {
        &self.samples
    }

    pub fn bin_centers(&self) -> Vec<f64> {
        (0..self.total.len())
            .map(|i| self.window.0 + (i as f64 + 0.5) * self.bin_width)
            .collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.samples.iter().map(|s| s.mass).sum()
    }

    /// Transported mass landing in [a, b].
    pub fn mass_in(&self, a: f64, b: f64) -> f64 {
        self.samples
            .iter()
            .filter(|s| s.image >= a && s.image <= b)
            .map(|s| s.mass)
            .sum()
    }

    /// Total histogram of the same samples with `bins` equal bins over the window.
    pub fn rebin(&self, bins: usize) -> Vec<f64> {
        bin_samples(&self.samples, self.window, bins).0
    }

    /// (ρ_a mass, ρ_s mass).
    pub fn lebesgue_split(&self) -> (f64, f64) {
        self.samples.iter().fold(
            (0.0, 0.0),
            |(a, s), p| {
                if p.singular {
                    (a, s + p.mass)
                } else {
                    (a + p.mass, s)
                }
            },
        )
    }
}

fn bin_samples(samples: &[TransportSample], window: (f64, f64), bins: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>, f64) {
    let (lo, hi) = window;
    let w = (hi - lo) / bins as f64;
    let mut total = vec![0.0; bins];
    let mut ac = vec![0.0; bins];
    let mut sing = vec![0.0; bins];
    let mut leaked = 0.0;
    for s in samples {
        if s.image < lo || s.image > hi || !s.image.is_finite() {
            leaked += s.mass;
            continue;
        }
        let i = (((s.image - lo) / w) as usize).min(bins - 1);
        total[i] += s.mass;
        if s.singular {
            sing[i] += s.mass;
        } else {
            ac[i] += s.mass;
        }
    }
    (total, ac, sing, leaked)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityAt {
    pub x: f64,
    /// Σ_j ρ^in(y_j) / J_t(y_j).
    pub value: f64,
    pub min_jacobian: f64,
    /// Some J_t(y_j) < 1e-6; the raw sum is attached but unreliable.
    pub near_caustic: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Disintegration {
    pub x: f64,
    /// (ρ^in(y_j) / J_t(y_j), Ξ_t(y_j, U(y_j))).
    pub atoms: Vec<(f64, f64)>,
}

impl Disintegration {
    pub fn total_weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.0).sum()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AtomReport {
    /// Atoms carried by resolved flat preimage intervals.
    pub atoms: Vec<Atom>,
    /// Mass lumped onto single points by unresolved leaves of a truncated profile.
    pub lumps: Vec<Atom>,
}

impl AtomReport {
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().chain(&self.lumps).map(|a| a.mass).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WkbBranch {
    pub y: f64,
    /// a^in(y) / √J_t(y).
    pub amplitude: f64,
    /// S^in(y) + ∫_0^t (ξ·∇_ξH − H) ds.
    pub phase: f64,
    pub maslov: MaslovIndex,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WkbAmplitude {
    pub x: f64,
    pub branches: Vec<WkbBranch>,
    /// Some branch has an undefined Maslov index and was summed with ν = 0.
    pub maslov_warning: bool,
}

impl WkbAmplitude {
    pub fn at_eps(&self, eps: f64) -> Complex64 {
        self.branches
            .iter()
            .map(|b| {
                let nu = match b.maslov {
                    MaslovIndex::Index(k) => k as f64,
                    MaslovIndex::Undefined => 0.0,
                };
                let phase = b.phase / eps + MASLOV_SIGN * std::f64::consts::FRAC_PI_2 * nu;
                Complex64::from_polar(b.amplitude, phase)
            })
            .sum()
    }

    /// Σ_j a_j², the classical fold-sum density.
    pub fn incoherent(&self) -> f64 {
        self.branches.iter().map(|b| b.amplitude * b.amplitude).sum()
    }

    /// Mean of |Ψ_ε|² over 1/ε ∈ [1/ε₀, 1/ε₀ + P] with P one period of the
    /// slowest branch interference, sampled at `samples` points.
    pub fn eps_average(&self, eps: f64, samples: usize) -> f64 {
        let mut slowest = f64::INFINITY;
        for (i, a) in self.branches.iter().enumerate() {
            for b in &self.branches[i + 1..] {
                let d = (a.phase - b.phase).abs();
                if d > 1e-12 {
                    slowest = slowest.min(d);
                }
            }
        }
        if !slowest.is_finite() {
            return self.at_eps(eps).norm_sqr();
        }
        let period = 2.0 * std::f64::consts::PI / slowest;
        let k0 = 1.0 / eps;
        (0..samples)
            .map(|i| self.at_eps(1.0 / (k0 + period * i as f64 / samples as f64)).norm_sqr())
            .sum::<f64>()
            / samples as f64
    }

    /// Interference envelope [Σa² − 2Σ_{i<j}a_i a_j, (Σa)²].
    pub fn envelope(&self) -> (f64, f64) {
        let s: f64 = self.branches.iter().map(|b| b.amplitude).sum();
        let q = self.incoherent();
        (q - (s * s - q), s * s)
    }
}

/// Transport of one monokinetic measure under one system.
#[derive(Clone, Copy)]
pub struct Transport<'a> {
    pub fold: FoldMap<'a>,
    pub mu: &'a MonokineticMeasure,
    /// y-grid cells over the support for fold-sum queries.
    pub grid_points: usize,
}

impl<'a> Transport<'a> {
    pub fn new(sys: &'a HamiltonianSystem, mu: &'a MonokineticMeasure) -> Result<Self, TransportError> {
        Self::with_options(sys, mu, IntegratorOptions::default())
    }

    pub fn with_options(
        sys: &'a HamiltonianSystem,
        mu: &'a MonokineticMeasure,
        opts: IntegratorOptions,
    ) -> Result<Self, TransportError> {
        Ok(Transport {
            fold: FoldMap::with_options(sys, &*mu.profile.0, opts)?,
            mu,
            grid_points: 4096,
        })
    }

    pub fn with_grid(mut self, grid_points: usize) -> Self {
        self.grid_points = grid_points;
        self
    }

    /// Shared y-grid over the support of ρ^in.
    pub fn grid(&self, t: f64) -> Result<FoldGrid, TransportError> {
        let (a, b) = self.mu.support;
        Ok(self.fold.grid_on(t, a, b, self.grid_points)?)
    }

    /// F_t#(ρ^in L¹) by transporting weighted quadrature nodes.
    pub fn push_forward(&self, t: f64, settings: &PushSettings) -> Result<TransportedDensity, TransportError> {
        let nodes = self.mu.nodes(settings.panels, settings.order);
        let samples: Vec<TransportSample> = nodes
            .par_iter()
            .map(|&(y, mass)| {
                self.fold.at(t, y).map(|s| TransportSample {
                    y,
                    image: s.image,
                    mass,
                    singular: self.fold.is_fold(&s),
                })
            })
            .collect::<Result<_, _>>()
            .map_err(FoldError::from)?;
        let window = settings.window.unwrap_or_else(|| {
            let (lo, hi) = samples.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), s| {
                (l.min(s.image), h.max(s.image))
            });
            let pad = (0.01 * (hi - lo)).max(64.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(1.0));
            (lo - pad, hi + pad)
        });
        let bins = settings.bins.max(1);
        let (total, ac, sing, leaked) = bin_samples(&samples, window, bins);
        let bin_width = (window.1 - window.0) / bins as f64;
        let atoms = spike_atoms(&samples, window, &total);
        Ok(TransportedDensity {
            t,
            window,
            bin_width,
            total,
            ac,
            sing,
            atoms,
            leaked_mass: leaked,
            window_warning: leaked > settings.mass_tolerance,
            samples,
        })
    }

    /// Σ_j ρ^in(y_j) / J_t(y_j), refused on the caustic fiber.
    pub fn density_at(&self, t: f64, x: f64) -> Result<DensityAt, TransportError> {
        let grid = self.grid(t)?;
        self.density_on(&grid, x)
    }

    pub fn density_on(&self, grid: &FoldGrid, x: f64) -> Result<DensityAt, TransportError> {
        let set = self.fold.preimages_on(grid, x)?;
        if set.is_caustic_point {
            return Err(TransportError::Caustic { x });
        }
        let mut value = 0.0;
        let mut min_jacobian = f64::INFINITY;
        for r in &set.preimages {
            let j = r.jacobian().expect("non-caustic roots are differentiable");
            min_jacobian = min_jacobian.min(j);
            value += self.mu.density(r.y) / j;
        }
        Ok(DensityAt {
            x,
            value,
            min_jacobian,
            near_caustic: min_jacobian < NEAR_CAUSTIC,
        })
    }

    pub fn disintegrate(&self, t: f64, x: f64) -> Result<Disintegration, TransportError> {
        let grid = self.grid(t)?;
        let set = self.fold.preimages_on(&grid, x)?;
        if set.is_caustic_point {
            return Err(TransportError::Caustic { x });
        }
        Ok(Disintegration {
            x,
            atoms: set
                .preimages
                .iter()
                .map(|r| (self.mu.density(r.y) / r.jacobian().unwrap_or(f64::NAN), r.momentum))
                .collect(),
        })
    }

    /// Masses ∫_{F_t⁻¹(x) ∩ Z_t} ρ^in at candidate points, by bisection for the
    /// maximal flat preimage intervals followed by quadrature.
    pub fn detect_atoms(&self, t: f64, candidates: &[f64]) -> Result<AtomReport, TransportError> {
        let grid = self.grid(t)?;
        let mut xs = candidates.to_vec();
        xs.sort_by(f64::total_cmp);
        xs.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * a.abs().max(1.0));
        let found: Vec<(Option<Atom>, Option<Atom>)> = xs
            .par_iter()
            .map(|&x| self.atom_at(&grid, x))
            .collect::<Result<_, _>>()?;
        let mut report = AtomReport::default();
        for (a, l) in found {
            report.atoms.extend(a);
            report.lumps.extend(l);
        }
        Ok(report)
    }

    fn atom_at(&self, grid: &FoldGrid, x: f64) -> Result<(Option<Atom>, Option<Atom>), TransportError> {
        let set = self.fold.preimages_on(grid, x)?;
        let tol = root_tolerance(x);
        let hit = |y: f64| -> Result<bool, TransportError> {
            Ok((self.fold.at(grid.t, y).map_err(FoldError::from)?.image - x).abs() <= tol)
        };
        let s = &grid.samples;
        let cell = (grid.samples.last().map_or(0.0, |l| l.y) - s[0].y) / self.grid_points as f64;
        let (mut resolved, mut lumped) = (0.0, 0.0);
        let mut interval = None;
        let mut low_confidence = false;
        let threshold = self.fold.jacobian_threshold;
        for r in set
            .preimages
            .iter()
            .filter(|r| r.jacobian().is_none_or(|j| j < threshold))
        {
            let k = s.partition_point(|p| p.y < r.y);
            let lo = self.flat_edge(grid, x, r.y, k, -1, &hit)?;
            let hi = self.flat_edge(grid, x, r.y, k, 1, &hit)?;
            if interval.is_some_and(|(a, b): (f64, f64)| lo <= b && hi >= a) {
                continue;
            }
            let total = self.mu.mass_between(lo, hi);
            let mut unresolved = 0.0;
            for leaf in self.mu.profile.unresolved_leaves_in(lo, hi) {
                let (a, b) = (leaf.0.max(lo), leaf.1.min(hi));
                if a <= lo && b >= hi {
                    unresolved = total;
                    break;
                }
                unresolved += self.mu.mass_between(a, b);
            }
            resolved += (total - unresolved).max(0.0);
            lumped += unresolved;
            low_confidence |= hi - lo < cell;
            interval.get_or_insert((lo, hi));
        }
        let make = |mass: f64| {
            (mass > 1e-14).then(|| Atom {
                x,
                mass,
                interval: interval.unwrap_or((f64::NAN, f64::NAN)),
                low_confidence,
            })
        };
        Ok((make(resolved), make(lumped)))
    }

    /// Edge of the maximal interval around y0 on which |F_t − x| ≤ tol, located by
    /// bisection against the nearest grid point (in direction `dir`) that misses.
    fn flat_edge(
        &self,
        grid: &FoldGrid,
        x: f64,
        y0: f64,
        k: usize,
        dir: i64,
        hit: &dyn Fn(f64) -> Result<bool, TransportError>,
    ) -> Result<f64, TransportError> {
        let s = &grid.samples;
        let tol = root_tolerance(x);
        let mut idx = if dir < 0 { k as i64 - 1 } else { k as i64 };
        while idx >= 0 && (idx as usize) < s.len() && (s[idx as usize].image - x).abs() <= tol {
            idx += dir;
        }
        if idx < 0 || idx as usize >= s.len() {
            return Ok(if dir < 0 { s[0].y } else { s[s.len() - 1].y });
        }
        let (mut inside, mut outside) = (y0, s[idx as usize].y);
        if (outside - inside) * dir as f64 <= 0.0 {
            return Ok(y0);
        }
        for _ in 0..64 {
            let mid = 0.5 * (inside + outside);
            if mid == inside || mid == outside {
                break;
            }
            if hit(mid)? {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        Ok(inside)
    }

    /// Multiphase WKB amplitude Σ_j a^in(y_j)/√J_t(y_j) e^{iS_j/ε} e^{±iπν_j/2}.
    pub fn wkb_multiphase(&self, t: f64, x: f64, maslov_samples: usize) -> Result<WkbAmplitude, TransportError> {
        let grid = self.grid(t)?;
        self.wkb_on(&grid, x, maslov_samples)
    }

    pub fn wkb_on(&self, grid: &FoldGrid, x: f64, maslov_samples: usize) -> Result<WkbAmplitude, TransportError> {
        let mut set = self.fold.preimages_on(grid, x)?;
        if set.is_caustic_point {
            return Err(TransportError::Caustic { x });
        }
        self.fold.annotate_maslov(&mut set, maslov_samples)?;
        let mut warning = false;
        let branches = set
            .preimages
            .iter()
            .map(|r| {
                let maslov = r.maslov.unwrap_or(MaslovIndex::Undefined);
                warning |= maslov == MaslovIndex::Undefined;
                WkbBranch {
                    y: r.y,
                    amplitude: self.mu.amplitude(r.y) / r.jacobian().unwrap_or(f64::NAN).sqrt(),
                    phase: self.mu.profile.phase(r.y) + r.action,
                    maslov,
                }
            })
            .collect();
        Ok(WkbAmplitude {
            x,
            branches,
            maslov_warning: warning,
        })
    }
}

/// Bins above 50× the median bin whose mass keeps concentrating under two
/// successive 4× refinements: at least ¾ of the mass in a window of width w around
/// the bin centroid must sit in the central quarter, twice. Centering keeps an atom
/// that straddles a bin edge; uniform mass keeps ¼ and a 1/√ fold singularity ½.
fn spike_atoms(samples: &[TransportSample], window: (f64, f64), total: &[f64]) -> Vec<Atom> {
    let mut sorted = total.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let w = (window.1 - window.0) / total.len() as f64;
    let mut order: Vec<&TransportSample> = samples.iter().collect();
    order.sort_by(|a, b| a.image.total_cmp(&b.image));
    let images: Vec<f64> = order.iter().map(|s| s.image).collect();
    let mass_in = |a: f64, b: f64| -> (f64, f64) {
        let lo = images.partition_point(|&x| x < a);
        let hi = images.partition_point(|&x| x <= b);
        order[lo..hi]
            .iter()
            .fold((0.0, 0.0), |(m, q), s| (m + s.mass, q + s.mass * s.image))
    };
    let mut atoms: Vec<Atom> = Vec::new();
    for (i, &m) in total.iter().enumerate() {
        if m <= 0.0 || m <= 50.0 * median {
            continue;
        }
        let lo = window.0 + i as f64 * w;
        let (bm, bq) = mass_in(lo, lo + w);
        let c = bq / bm;
        let (mass, q) = mass_in(c - 0.5 * w, c + 0.5 * w);
        let mut width = w;
        let mut prev = mass;
        let mut concentrated = true;
        for _ in 0..2 {
            width /= 4.0;
            let (inner, _) = mass_in(c - 0.5 * width, c + 0.5 * width);
            if inner < 0.75 * prev {
                concentrated = false;
                break;
            }
            prev = inner;
        }
        let x = q / mass;
        if concentrated && !atoms.iter().any(|a| (a.x - x).abs() < w) {
            atoms.push(Atom {
                x,
                mass,
                interval: (c - 0.5 * w, c + 0.5 * w),
                low_confidence: true,
            });
        }
    }
    atoms
}
