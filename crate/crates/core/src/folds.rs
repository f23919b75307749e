//! Fold maps F_t(y) = X_t(y, U(y)), preimage enumeration, fold counting,
//! caustic fibers and one-dimensional Maslov indices.

use nalgebra::{DMatrix, DVector};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use thiserror::Error;

use crate::flow::{evolve, FlowError, HamiltonianSystem, IntegratorOptions, PhasePoint};
use crate::profiles::{ProductProfile, ScalarProfile};
use crate::quad::GaussLegendre;

/// |det DF_t| below this marks a fold point.
pub const JACOBIAN_THRESHOLD: f64 = 1e-8;
/// Roots closer than this are merged, keeping the larger Jacobian.
pub const DEDUP_TOLERANCE: f64 = 1e-10;
/// |F_t(y) − x| at or below this (relative once |x| > 1) counts as a hit.
pub const ROOT_TOLERANCE: f64 = 1e-10;
const GRADED_FLOOR: f64 = 1e-12;
const GRADED_PER_DECADE: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FoldError {
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error("exact fold machinery needs a one-dimensional system, got dimension {0}")]
    NotOneDimensional(usize),
    #[error("profile derivative undefined on {fraction:.3} of the probe set; bound not computable")]
    BoundNotComputable { fraction: f64 },
    #[error("invalid fold query: {0}")]
    BadQuery(String),
}

/// One evaluation of the fold map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoldSample {
    pub y: f64,
    pub image: f64,
    /// Signed DF_t(y); `None` on the nondifferentiability set of the profile.
    pub det: Option<f64>,
    pub momentum: f64,
    /// ∫_0^t (ξ·∇_ξH − H) ds along the trajectory.
    pub action: f64,
}

impl FoldSample {
    pub fn jacobian(&self) -> Option<f64> {
        self.det.map(f64::abs)
    }

    /// Fold test against the default threshold.
    pub fn is_fold(&self) -> bool {
        self.det.is_none_or(|d| d.abs() < JACOBIAN_THRESHOLD)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaslovIndex {
    Index(u32),
    /// A tangential zero of DF_s was met; the index is not defined.
    Undefined,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldRoot {
    pub y: f64,
    pub image: f64,
    pub det: Option<f64>,
    pub momentum: f64,
    pub action: f64,
    pub maslov: Option<MaslovIndex>,
}

impl FoldRoot {
    fn from_sample(s: FoldSample) -> Self {
        FoldRoot {
            y: s.y,
            image: s.image,
            det: s.det,
            momentum: s.momentum,
            action: s.action,
            maslov: None,
        }
    }

    pub fn jacobian(&self) -> Option<f64> {
        self.det.map(f64::abs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoldQuery {
    pub t: f64,
    pub x: f64,
    pub radius: f64,
    pub grid_points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldSet {
    pub t: f64,
    pub x: f64,
    pub preimages: Vec<FoldRoot>,
    /// Points of E where F_t jumps across x at the working resolution; not counted.
    pub singular_crossings: Vec<f64>,
    pub is_caustic_point: bool,
    pub count: usize,
    /// Roots accumulate at an isolated singularity, so `count` is a lower bound.
    pub resolution_limited: bool,
    /// Suggested grid size when a cell was found to hide extra sign changes.
    pub resolution_warning: Option<usize>,
}

/// Shared evaluation of F_t and DF_t on a y-grid over [−R, R].
#[derive(Debug, Clone)]
pub struct FoldGrid {
    pub t: f64,
    pub radius: f64,
    pub samples: Vec<FoldSample>,
    resolution_limited: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoldCount {
    pub x: f64,
    pub count: usize,
    pub is_caustic: bool,
    pub resolution_warning: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountingBound {
    pub n: usize,
    /// Measured L¹{x : N_R(t, x) ≥ n}.
    pub lhs: f64,
    /// e^{κ|t|} ∫_{−R}^{R} (1 + |U'|) / n.
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaFormula {
    /// ∫ N_R(t, x) dx by x-grid counting.
    pub counted: f64,
    /// ∫_{−R}^{R} J_t(y) dy by quadrature.
    pub jacobian_integral: f64,
}

impl AreaFormula {
    pub fn relative_gap(&self) -> f64 {
        (self.counted - self.jacobian_integral).abs() / self.jacobian_integral.abs().max(1e-300)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropernessProbe {
    pub radius: f64,
    /// min over y = ±radius and sampled |t| ≤ T of |F_t(y)|.
    pub min_image: f64,
    /// sup over the same samples of |F_t(y) − y| / |y|.
    pub sup_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledCount {
    /// Distinct refined preimages; a heuristic lower bound on N_R(t, x).
    pub clusters: Vec<Vec<f64>>,
}

impl SampledCount {
    pub fn bound(&self) -> usize {
        self.clusters.len()
    }
}

/// Fold map of a one-dimensional system over a scalar profile.
#[derive(Clone, Copy)]
pub struct FoldMap<'a> {
    pub sys: &'a HamiltonianSystem,
    pub profile: &'a dyn ScalarProfile,
    pub opts: IntegratorOptions,
    /// |DF_t| below this marks a fold point; defaults to [`JACOBIAN_THRESHOLD`].
    pub jacobian_threshold: f64,
}

impl<'a> FoldMap<'a> {
    pub fn new(sys: &'a HamiltonianSystem, profile: &'a dyn ScalarProfile) -> Result<Self, FoldError> {
        Self::with_options(sys, profile, IntegratorOptions::default())
    }

    pub fn with_options(
        sys: &'a HamiltonianSystem,
        profile: &'a dyn ScalarProfile,
        opts: IntegratorOptions,
    ) -> Result<Self, FoldError> {
        if sys.dim() != 1 {
            return Err(FoldError::NotOneDimensional(sys.dim()));
        }
        Ok(FoldMap {
            sys,
            profile,
            opts,
            jacobian_threshold: JACOBIAN_THRESHOLD,
        })
    }

    pub fn with_jacobian_threshold(mut self, threshold: f64) -> Self {
        self.jacobian_threshold = threshold;
        self
    }

    /// Fold test against this map's threshold.
    pub fn is_fold(&self, s: &FoldSample) -> bool {
        s.det.is_none_or(|d| d.abs() < self.jacobian_threshold)
    }

    /// (F_t(y), DF_t(y), Ξ_t(y, U(y))) with DF_t = ∂_xX + ∂_ξX · U'(y).
    pub fn at(&self, t: f64, y: f64) -> Result<FoldSample, FlowError> {
        let jet = evolve(self.sys, &PhasePoint::one(y, self.profile.eval(y)), t, &self.opts)?;
        let det = self
            .profile
            .deriv(y)
            .map(|du| jet.jacobian[(0, 0)] + jet.jacobian[(0, 1)] * du);
        Ok(FoldSample {
            y,
            image: jet.point.x[0],
            det,
            momentum: jet.point.xi[0],
            action: jet.action,
        })
    }

    fn at_many(&self, t: f64, ys: &[f64]) -> Result<Vec<FoldSample>, FlowError> {
        ys.par_iter().map(|&y| self.at(t, y)).collect()
    }

    /// Uniform grid of `points` cells on [−R, R] merged with log-graded points
    /// around every isolated singularity of the profile.
    pub fn grid(&self, t: f64, radius: f64, points: usize) -> Result<FoldGrid, FoldError> {
        if !(radius > 0.0) {
            return Err(FoldError::BadQuery(format!("need R > 0, got {radius}")));
        }
        self.grid_on(t, -radius, radius, points)
    }

    /// As [`FoldMap::grid`] on an arbitrary window [lo, hi].
    pub fn grid_on(&self, t: f64, lo: f64, hi: f64, points: usize) -> Result<FoldGrid, FoldError> {
        if !(hi > lo) || points < 2 {
            return Err(FoldError::BadQuery(format!(
                "need a nonempty window and at least 2 grid cells, got [{lo}, {hi}], {points}"
            )));
        }
        let radius = lo.abs().max(hi.abs());
        let mut ys: Vec<f64> = (0..=points)
            .map(|i| lo + (hi - lo) * i as f64 / points as f64)
            .collect();
        let singular = self.profile.isolated_singularities();
        for &s in &singular {
            let decades = ((hi - lo) / GRADED_FLOOR).log10();
            let count = (decades * GRADED_PER_DECADE as f64).ceil() as usize;
            for i in 0..=count {
                let d = GRADED_FLOOR * 10f64.powf(i as f64 / GRADED_PER_DECADE as f64);
                for y in [s - d, s + d] {
                    if (lo..=hi).contains(&y) {
                        ys.push(y);
                    }
                }
            }
        }
        ys.sort_by(f64::total_cmp);
        ys.dedup();
        Ok(FoldGrid {
            t,
            radius,
            samples: self.at_many(t, &ys)?,
            resolution_limited: singular.iter().any(|s| (lo..=hi).contains(s)),
        })
    }

    /// All roots of F_t(y) = x in [−R, R].
    pub fn preimages_1d(&self, q: &FoldQuery) -> Result<FoldSet, FoldError> {
        let grid = self.grid(q.t, q.radius, q.grid_points)?;
        self.preimages_on(&grid, q.x)
    }

    /// Root enumeration against a precomputed grid.
    ///
    /// Grid values are classified as below, within, or above the root tolerance.
    /// Opposite-sign neighbours are bracketed and refined; a run of hits yields a
    /// single root. A bracket that refines onto a jump of F_t instead of a root
    /// is recorded as a singular crossing.
    pub fn preimages_on(&self, grid: &FoldGrid, x: f64) -> Result<FoldSet, FoldError> {
        let s = &grid.samples;
        let n = s.len();
        let tol = root_tolerance(x);
        let class = |v: &FoldSample| -> i8 {
            let g = v.image - x;
            if g > tol {
                1
            } else if g < -tol {
                -1
            } else {
                0
            }
        };
        let cls: Vec<i8> = s.iter().map(class).collect();
        let mut roots = Vec::new();
        let mut crossings = Vec::new();
        let mut warning = false;
        let mut accept = |root: FoldSample, roots: &mut Vec<FoldSample>, warning: &mut bool| {
            if (root.image - x).abs() <= tol {
                roots.push(root);
            } else {
                *warning |= !self.profile.nondiff(root.y);
                crossings.push(root.y);
            }
        };
        let mut i = 0;
        while i < n {
            if cls[i] == 0 {
                let start = i;
                while i < n && cls[i] == 0 {
                    i += 1;
                }
                let left = start.checked_sub(1);
                let right = (i < n).then_some(i);
                match (left, right) {
                    (Some(l), Some(r)) if cls[l] == -cls[r] => {
                        let root = self.refine(grid.t, x, &s[l], &s[r])?;
                        accept(root, &mut roots, &mut warning);
                    }
                    _ => {
                        let best = s[start..i]
                            .iter()
                            .min_by(|a, b| (a.image - x).abs().total_cmp(&(b.image - x).abs()))
                            .copied()
                            .expect("nonempty run");
                        roots.push(best);
                    }
                }
                continue;
            }
            if i + 1 < n && cls[i + 1] == -cls[i] {
                let root = self.refine(grid.t, x, &s[i], &s[i + 1])?;
                // A monotone crossing in this cell must have the bracket's slope sign.
                if let Some(d) = root.det {
                    if d.abs() >= self.jacobian_threshold && d.signum() != f64::from(cls[i + 1]) {
                        warning = true;
                    }
                }
                accept(root, &mut roots, &mut warning);
            }
            i += 1;
        }
        let roots = dedup(roots);
        let is_caustic_point = roots.iter().any(|r| self.is_fold(r)) || !crossings.is_empty();
        Ok(FoldSet {
            t: grid.t,
            x,
            count: roots.len(),
            preimages: roots.into_iter().map(FoldRoot::from_sample).collect(),
            singular_crossings: crossings,
            is_caustic_point,
            resolution_limited: grid.resolution_limited,
            resolution_warning: warning.then_some(4 * (n - 1)),
        })
    }

    /// Illinois false position on a bracket with opposite signs of F_t − x.
    fn refine(&self, t: f64, x: f64, lo: &FoldSample, hi: &FoldSample) -> Result<FoldSample, FlowError> {
        let (mut a, mut ga) = (lo.y, lo.image - x);
        let (mut b, mut gb) = (hi.y, hi.image - x);
        let mut best = if ga.abs() < gb.abs() { *lo } else { *hi };
        for _ in 0..200 {
            if best.image == x || (b - a).abs() <= 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(1e-300) {
                break;
            }
            let mut c = b - gb * (b - a) / (gb - ga);
            let (lo_y, hi_y) = (a.min(b), a.max(b));
            if !(c > lo_y && c < hi_y) {
                c = 0.5 * (a + b);
            }
            let sc = self.at(t, c)?;
            let gc = sc.image - x;
            if gc.abs() <= (best.image - x).abs() {
                best = sc;
            }
            // On a flat stretch the hit cannot be sharpened further.
            if gc.abs() <= 1e-6 * ROOT_TOLERANCE && self.is_fold(&sc) {
                break;
            }
            if gc * gb < 0.0 {
                a = b;
                ga = gb;
            } else {
                ga *= 0.5;
            }
            b = c;
            gb = gc;
        }
        Ok(best)
    }

    /// N_R(t, x) on an x-grid, sharing one y-grid.
    pub fn count_folds(
        &self,
        t: f64,
        xs: &[f64],
        radius: f64,
        grid_points: usize,
    ) -> Result<Vec<FoldCount>, FoldError> {
        let grid = self.grid(t, radius, grid_points)?;
        self.count_on(&grid, xs)
    }

    pub fn count_on(&self, grid: &FoldGrid, xs: &[f64]) -> Result<Vec<FoldCount>, FoldError> {
        xs.par_iter()
            .map(|&x| {
                let set = self.preimages_on(grid, x)?;
                Ok(FoldCount {
                    x,
                    count: set.count,
                    is_caustic: set.is_caustic_point,
                    resolution_warning: set.resolution_warning.is_some(),
                })
            })
            .collect()
    }

    /// Midpoints of `cells` equal cells spanning F_t([−R, R]), with the cell width.
    pub fn image_cells(grid: &FoldGrid, cells: usize) -> (Vec<f64>, f64) {
        let (lo, hi) = grid
            .samples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), s| {
                (l.min(s.image), h.max(s.image))
            });
        let w = (hi - lo) / cells as f64;
        ((0..cells).map(|i| lo + (i as f64 + 0.5) * w).collect(), w)
    }

    /// ∫_{−R}^{R} (1 + |U'|), refusing when U' is undefined on more than 0.1% of the probe.
    fn stretch_integral(&self, radius: f64) -> Result<f64, FoldError> {
        let cells = 200_000;
        let h = 2.0 * radius / cells as f64;
        let mut undefined = 0usize;
        let mut acc = 0.0;
        for i in 0..cells {
            match self.profile.deriv(-radius + (i as f64 + 0.5) * h) {
                Some(d) => acc += 1.0 + d.abs(),
                None => undefined += 1,
            }
        }
        let fraction = undefined as f64 / cells as f64;
        if fraction > 1e-3 {
            return Err(FoldError::BoundNotComputable { fraction });
        }
        Ok(acc * h)
    }

    /// Measured L¹{N_R ≥ n} against e^{κ|t|}‖1 + |U'|‖_{L¹(−R, R)} / n.
    pub fn counting_bound_check(
        &self,
        t: f64,
        radius: f64,
        ns: &[usize],
        grid_points: usize,
        x_cells: usize,
    ) -> Result<Vec<CountingBound>, FoldError> {
        let grid = self.grid(t, radius, grid_points)?;
        let (xs, w) = Self::image_cells(&grid, x_cells);
        let counts = self.count_on(&grid, &xs)?;
        let stretch = self.stretch_integral(radius)? * (self.sys.kappa * t.abs()).exp();
        Ok(ns
            .iter()
            .map(|&n| {
                let lhs = counts.iter().filter(|c| c.count >= n).count() as f64 * w;
                let rhs = stretch / n.max(1) as f64;
                CountingBound {
                    n,
                    lhs,
                    rhs,
                    holds: lhs <= rhs + 1e-2,
                }
            })
            .collect())
    }

    /// ∫ N_R dx by x-grid counting against ∫ J_t dy by Gauss–Legendre quadrature.
    pub fn area_formula(
        &self,
        t: f64,
        radius: f64,
        grid_points: usize,
        x_cells: usize,
    ) -> Result<AreaFormula, FoldError> {
        let grid = self.grid(t, radius, grid_points)?;
        let (xs, w) = Self::image_cells(&grid, x_cells);
        let counted = self.count_on(&grid, &xs)?.iter().map(|c| c.count).sum::<usize>() as f64 * w;
        let rule = GaussLegendre::new(8);
        let panels = grid_points.max(64);
        let h = 2.0 * radius / panels as f64;
        let nodes: Vec<f64> = (0..panels)
            .flat_map(|p| {
                let a = -radius + p as f64 * h;
                rule.nodes()
                    .iter()
                    .map(move |&z| a + 0.5 * h * (z + 1.0))
                    .collect::<Vec<_>>()
            })
            .collect();
        let samples = self.at_many(t, &nodes)?;
        let weights: Vec<f64> = rule.weights().iter().map(|&wt| 0.5 * h * wt).collect();
        let jacobian_integral = samples
            .iter()
            .enumerate()
            .map(|(i, s)| weights[i % rule.len()] * s.jacobian().unwrap_or(0.0))
            .sum();
        Ok(AreaFormula {
            counted,
            jacobian_integral,
        })
    }

    /// Images F_t(y) of grid points lying in Z_t ∪ E.
    pub fn caustic_sample(&self, t: f64, ys: &[f64]) -> Result<Vec<f64>, FoldError> {
        Ok(self
            .at_many(t, ys)?
            .into_iter()
            .filter(|s| self.is_fold(s))
            .map(|s| s.image)
            .collect())
    }

    /// Sign changes of DF_s(y) for s ∈ (0, t] on `samples` equal time steps.
    pub fn maslov_index_1d(&self, y: f64, t: f64, samples: usize) -> Result<MaslovIndex, FoldError> {
        let Some(du) = self.profile.deriv(y) else {
            return Ok(MaslovIndex::Undefined);
        };
        if t == 0.0 || samples == 0 {
            return Ok(MaslovIndex::Index(0));
        }
        let dt = t / samples as f64;
        let mut point = PhasePoint::one(y, self.profile.eval(y));
        let mut total = DMatrix::<f64>::identity(2, 2);
        let mut last_sign = 1.0f64;
        let mut tiny_since_last = false;
        let mut changes = 0u32;
        for _ in 0..samples {
            let jet = evolve(self.sys, &point, dt, &self.opts)?;
            total = &jet.jacobian * total;
            point = jet.point;
            let d = total[(0, 0)] + total[(0, 1)] * du;
            if d.abs() < self.jacobian_threshold {
                tiny_since_last = true;
                continue;
            }
            if d.signum() != last_sign {
                changes += 1;
                last_sign = d.signum();
            } else if tiny_since_last {
                return Ok(MaslovIndex::Undefined);
            }
            tiny_since_last = false;
        }
        Ok(MaslovIndex::Index(changes))
    }

    /// Fills in the Maslov index of every root of `set`.
    pub fn annotate_maslov(&self, set: &mut FoldSet, samples: usize) -> Result<(), FoldError> {
        for root in &mut set.preimages {
            root.maslov = Some(self.maslov_index_1d(root.y, set.t, samples)?);
        }
        Ok(())
    }

    /// |F_t(±r)| and |F_t(±r) − (±r)|/r over |t| ≤ T at each probe radius.
    pub fn properness_probe(
        &self,
        horizon: f64,
        radii: &[f64],
        time_samples: usize,
    ) -> Result<Vec<PropernessProbe>, FoldError> {
        let times: Vec<f64> = (0..=time_samples)
            .map(|i| -horizon + 2.0 * horizon * i as f64 / time_samples.max(1) as f64)
            .collect();
        radii
            .iter()
            .map(|&r| {
                let mut min_image = f64::INFINITY;
                let mut sup_ratio = 0.0f64;
                for &t in &times {
                    for y in [-r, r] {
                        let s = self.at(t, y)?;
                        min_image = min_image.min(s.image.abs());
                        sup_ratio = sup_ratio.max((s.image - y).abs() / r);
                    }
                }
                Ok(PropernessProbe {
                    radius: r,
                    min_image,
                    sup_ratio,
                })
            })
            .collect()
    }
}

pub fn root_tolerance(x: f64) -> f64 {
    ROOT_TOLERANCE * x.abs().max(1.0)
}

fn dedup(mut roots: Vec<FoldSample>) -> Vec<FoldSample> {
    roots.sort_by(|a, b| a.y.total_cmp(&b.y));
    let mut out: Vec<FoldSample> = Vec::with_capacity(roots.len());
    for r in roots {
        match out.last_mut() {
            Some(prev) if (r.y - prev.y).abs() < DEDUP_TOLERANCE => {
                if r.jacobian().unwrap_or(0.0) > prev.jacobian().unwrap_or(0.0) {
                    *prev = r;
                }
            }
            _ => out.push(r),
        }
    }
    out
}

/// Fold map of an N-dimensional system over a componentwise profile.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldSampleNd {
    pub y: Vec<f64>,
    pub image: Vec<f64>,
    /// DF_t(y); `None` when any factor of the profile is nondifferentiable.
    pub differential: Option<DMatrix<f64>>,
    pub momentum: Vec<f64>,
}

pub fn fold_map_nd(
    sys: &HamiltonianSystem,
    profile: &ProductProfile,
    t: f64,
    y: &[f64],
    opts: &IntegratorOptions,
) -> Result<FoldSampleNd, FoldError> {
    let n = sys.dim();
    if profile.dim() != n || y.len() != n {
        return Err(FoldError::BadQuery(format!(
            "system dimension {n}, profile dimension {}, point dimension {}",
            profile.dim(),
            y.len()
        )));
    }
    let jet = evolve(sys, &PhasePoint::new(y.to_vec(), profile.eval(y)), t, opts)?;
    let differential = profile.deriv(y).map(|du| {
        let dxx = jet.jacobian.view((0, 0), (n, n));
        let dxxi = jet.jacobian.view((0, n), (n, n));
        dxx + dxxi * DMatrix::from_diagonal(&DVector::from_vec(du))
    });
    Ok(FoldSampleNd {
        y: y.to_vec(),
        image: jet.point.x,
        differential,
        momentum: jet.point.xi,
    })
}

/// Heuristic lower bound on N_R(t, x) for N ≥ 1.
///
/// Uniform samples in [−R, R]^N closest to x seed damped Newton iterations; the
/// converged preimages are clustered at distance 1e-6.
#[allow(clippy::too_many_arguments)]
pub fn count_folds_sampled(
    sys: &HamiltonianSystem,
    profile: &ProductProfile,
    t: f64,
    x: &[f64],
    radius: f64,
    samples: usize,
    seed: u64,
    opts: &IntegratorOptions,
) -> Result<SampledCount, FoldError> {
    if samples == 0 {
        return Ok(SampledCount { clusters: Vec::new() });
    }
    let n = sys.dim();
    if x.len() != n {
        return Err(FoldError::BadQuery(format!("target dimension {} ≠ {n}", x.len())));
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let ys: Vec<Vec<f64>> = (0..samples)
        .map(|_| (0..n).map(|_| rng.random_range(-radius..=radius)).collect())
        .collect();
    let residual = |img: &[f64]| img.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let mut scored: Vec<(f64, Vec<f64>)> = ys
        .par_iter()
        .map(|y| fold_map_nd(sys, profile, t, y, opts).map(|s| (residual(&s.image), s.y)))
        .collect::<Result<_, _>>()?;
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    let keep = samples.min(64.max(samples / 8));
    let refined: Vec<Option<Vec<f64>>> = scored[..keep]
        .par_iter()
        .map(|(_, y)| newton_nd(sys, profile, t, x, y, radius, opts))
        .collect();
    let mut clusters: Vec<Vec<f64>> = Vec::new();
    for y in refined.into_iter().flatten() {
        let near = clusters
            .iter()
            .any(|c| c.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) < 1e-6);
        if !near {
            clusters.push(y);
        }
    }
    clusters.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(SampledCount { clusters })
}

fn newton_nd(
    sys: &HamiltonianSystem,
    profile: &ProductProfile,
    t: f64,
    x: &[f64],
    start: &[f64],
    radius: f64,
    opts: &IntegratorOptions,
) -> Option<Vec<f64>> {
    let mut y = start.to_vec();
    for _ in 0..40 {
        let s = fold_map_nd(sys, profile, t, &y, opts).ok()?;
        let g = DVector::from_iterator(x.len(), s.image.iter().zip(x).map(|(a, b)| a - b));
        if g.amax() <= ROOT_TOLERANCE {
            return Some(y);
        }
        let step = s.differential?.lu().solve(&g)?;
        let scale = (0.25 * radius / step.amax().max(1e-300)).min(1.0);
        for (yi, di) in y.iter_mut().zip(step.iter()) {
            *yi -= scale * di;
        }
        if y.iter().any(|v| v.abs() > radius) {
            return None;
        }
    }
    None
}
