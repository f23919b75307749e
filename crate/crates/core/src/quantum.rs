//! Scaled Schrödinger evolution of WKB data on a periodic grid, the ε-Fourier,
//! Wigner and Husimi transforms, and comparison against classical transport.
//!
//! Conventions: iε∂_tψ = −½ε²ψ'' + Vψ, F_εψ(ξ) = (2πε)^{-1/2} ∫ψ(x)e^{−ixξ/ε}dx,
//! so that a^in e^{iS/ε} concentrates at ξ = S'(x) on both the Fourier and the
//! Wigner side.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use thiserror::Error;

use crate::flow::HamiltonianSystem;
use crate::transport::{MonokineticMeasure, Transport, TransportError, TransportedDensity};

/// Largest admissible phase increment per cell, Δx·max|S'|/ε.
pub const MAX_PHASE_STEP: f64 = 0.2;
/// Mass allowed in the guard bands before a window warning is raised.
pub const BOUNDARY_MASS: f64 = 1e-6;
/// Width of each guard band as a fraction of the window.
pub const GUARD_FRACTION: f64 = 1.0 / 16.0;
/// Gaussian kernels are cut where e^{−d²/ε} underflows any relevant scale.
const KERNEL_CUTOFF: f64 = 12.0;
/// Largest grid for the Wigner-route Husimi, which stores the full n×n Wigner table.
pub const MAX_WIGNER_GRID: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantumError {
    #[error("grid underresolves the phase: Δx·max|S'|/ε = {ratio:.3} > {MAX_PHASE_STEP}")]
    Underresolved { ratio: f64 },
    #[error("invalid grid: {0}")]
    BadGrid(String),
    #[error("ε must be positive and finite, got {0}")]
    BadEpsilon(f64),
    #[error("initial amplitude vanishes on the grid")]
    NotNormalizable,
    #[error("the Hamiltonian is not of the form ½ξ² + V(x) in one dimension")]
    NoPotential,
    #[error(transparent)]
    Transport(#[from] TransportError),
}

/// Uniform periodic grid x_j = lo + j·L/n, j = 0..n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub len: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self, QuantumError> {
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() || n < 8 || !n.is_multiple_of(2) {
            return Err(QuantumError::BadGrid(format!("[{lo}, {hi}) with n = {n}")));
        }
        Ok(Grid { lo, len: hi - lo, n })
    }

    /// Window of `factor` times the span of [a, b], centred on it.
    pub fn around(a: f64, b: f64, factor: f64, n: usize) -> Result<Self, QuantumError> {
        let c = 0.5 * (a + b);
        let half = 0.5 * factor * (b - a);
        Grid::new(c - half, c + half, n)
    }

    pub fn dx(&self) -> f64 {
        self.len / self.n as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        self.lo + j as f64 * self.dx()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    /// Signed DFT index of slot m.
    fn signed(&self, m: usize) -> i64 {
        if m < self.n / 2 {
            m as i64
        } else {
            m as i64 - self.n as i64
        }
    }

    /// Angular wavenumber of DFT slot m.
    fn wavenumber(&self, m: usize) -> f64 {
        2.0 * PI * self.signed(m) as f64 / self.len
    }

    /// Periodic distance from x_j to x_i, in (−L/2, L/2].
    fn offset(&self, j: usize, i: usize) -> f64 {
        let mut d = (j as i64 - i as i64).rem_euclid(self.n as i64);
        if d > self.n as i64 / 2 {
            d -= self.n as i64;
        }
        d as f64 * self.dx()
    }
}

struct Spectral {
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Spectral {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Spectral {
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }
}

/// g_ε(d) = (πε)^{-1/2} e^{−d²/ε}.
fn heat_kernel(d: f64, eps: f64) -> f64 {
    (-d * d / eps).exp() / (PI * eps).sqrt()
}

/// Samples of ψ_ε(t, ·) on a periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    pub eps: f64,
    pub grid: Grid,
    pub values: Vec<Complex64>,
    pub t: f64,
}

impl WaveField {
    /// ‖ψ‖² by the periodic trapezoid rule.
    pub fn mass(&self) -> f64 {
        self.grid.dx() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// Mass in the two guard bands at the ends of the window.
    pub fn boundary_mass(&self) -> f64 {
        let n = self.grid.n;
        let g = ((n as f64 * GUARD_FRACTION) as usize).max(1);
        let tail: f64 = self.values[..g]
            .iter()
            .chain(&self.values[n - g..])
            .map(|v| v.norm_sqr())
            .sum();
        self.grid.dx() * tail
    }

    /// ∫χ|ψ|² by the periodic trapezoid rule.
    pub fn integrate(&self, chi: &dyn Fn(f64) -> f64) -> f64 {
        self.grid.dx()
            * self
                .values
                .iter()
                .enumerate()
                .map(|(j, v)| chi(self.grid.x(j)) * v.norm_sqr())
                .sum::<f64>()
    }

    fn normalize(&mut self) -> Result<(), QuantumError> {
        let m = self.mass();
        if !(m > 0.0) || !m.is_finite() {
            return Err(QuantumError::NotNormalizable);
        }
        let s = 1.0 / m.sqrt();
        self.values.iter_mut().for_each(|v| *v *= s);
        Ok(())
    }
}

fn check_eps(eps: f64) -> Result<(), QuantumError> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(QuantumError::BadEpsilon(eps))
    }
}

/// a(x)e^{iS(x)/ε} sampled on the grid and renormalized to unit mass. The phase
/// increment between neighbouring cells where a does not vanish must stay below
/// `MAX_PHASE_STEP`.
pub fn wkb_initial(
    amplitude: &dyn Fn(f64) -> f64,
    phase: &dyn Fn(f64) -> f64,
    eps: f64,
    grid: Grid,
) -> Result<WaveField, QuantumError> {
    check_eps(eps)?;
    let xs = grid.points();
    let a: Vec<f64> = xs.iter().map(|&x| amplitude(x)).collect();
    let s: Vec<f64> = xs.iter().map(|&x| phase(x)).collect();
    let mut ratio: f64 = 0.0;
    for j in 0..grid.n - 1 {
        if a[j] != 0.0 || a[j + 1] != 0.0 {
            ratio = ratio.max((s[j + 1] - s[j]).abs() / eps);
        }
    }
    if ratio > MAX_PHASE_STEP {
        return Err(QuantumError::Underresolved { ratio });
    }
    let mut field = WaveField {
        eps,
        grid,
        values: a
            .iter()
            .zip(&s)
            .map(|(&a, &s)| Complex64::from_polar(a, s / eps))
            .collect(),
        t: 0.0,
    };
    field.normalize()?;
    Ok(field)
}

/// WKB data a^in = √ρ^in, S^in = phase of the momentum profile.
pub fn wkb_from_measure(mu: &MonokineticMeasure, eps: f64, grid: Grid) -> Result<WaveField, QuantumError> {
    wkb_initial(&|x| mu.amplitude(x), &|x| mu.profile.phase(x), eps, grid)
}

/// Ψ^{x₀,ξ₀}(x) = (πε)^{-1/4} e^{−(x−x₀)²/2ε} e^{iξ₀x/ε}, with x − x₀ taken periodically.
pub fn coherent_state(x0: f64, xi0: f64, eps: f64, grid: Grid) -> Result<WaveField, QuantumError> {
    check_eps(eps)?;
    let norm = (PI * eps).powf(-0.25);
    let values = (0..grid.n)
        .map(|j| {
            let x = grid.x(j);
            let d = (x - x0 + 0.5 * grid.len).rem_euclid(grid.len) - 0.5 * grid.len;
            Complex64::from_polar(norm * (-d * d / (2.0 * eps)).exp(), xi0 * x / eps)
        })
        .collect();
    Ok(WaveField {
        eps,
        grid,
        values,
        t: 0.0,
    })
}

/// V sampled on the grid, or `None` for the free Hamiltonian.
pub fn sample_potential(sys: &HamiltonianSystem, grid: Grid) -> Result<Option<Vec<f64>>, QuantumError> {
    if sys.dim() != 1 {
        return Err(QuantumError::NoPotential);
    }
    let v: Vec<f64> = grid
        .points()
        .iter()
        .map(|&x| sys.ham.potential(&[x]).ok_or(QuantumError::NoPotential))
        .collect::<Result<_, _>>()?;
    Ok(v.iter().any(|&p| p != 0.0).then_some(v))
}

#[derive(Debug, Clone)]
pub struct Evolution {
    pub field: WaveField,
    /// Largest guard-band mass seen at the step boundaries.
    pub max_boundary_mass: f64,
    pub window_warning: bool,
    /// |‖ψ(t)‖² − ‖ψ(0)‖²|.
    pub mass_drift: f64,
}

/// Strang-split spectral propagation over time t. Without a potential a single
/// exact kinetic step is taken and the guard bands are checked at the end only.
pub fn schrodinger_evolve(field: &WaveField, potential: Option<&[f64]>, t: f64, steps: usize) -> Evolution {
    let grid = field.grid;
    let eps = field.eps;
    let spec = Spectral::new(grid.n);
    let scale = 1.0 / grid.n as f64;
    let mut psi = field.values.clone();
    let kinetic = |psi: &mut Vec<Complex64>, tau: f64| {
        spec.fwd.process(psi);
        for (m, v) in psi.iter_mut().enumerate() {
            let k = grid.wavenumber(m);
            *v *= Complex64::from_polar(scale, -0.5 * eps * k * k * tau);
        }
        spec.inv.process(psi);
    };
    let mut out = WaveField {
        values: Vec::new(),
        t: field.t + t,
        ..*field
    };
    let mut max_boundary: f64 = 0.0;
    match potential {
        None => {
            kinetic(&mut psi, t);
        }
        Some(v) => {
            assert_eq!(v.len(), grid.n, "potential must be sampled on the field grid");
            let steps = steps.max(1);
            let tau = t / steps as f64;
            let half: Vec<Complex64> = v
                .iter()
                .map(|&p| Complex64::from_polar(1.0, -0.5 * p * tau / eps))
                .collect();
            let full: Vec<Complex64> = half.iter().map(|h| h * h).collect();
            psi.iter_mut().zip(&half).for_each(|(p, h)| *p *= h);
            for s in 0..steps {
                kinetic(&mut psi, tau);
                let phase = if s + 1 == steps { &half } else { &full };
                psi.iter_mut().zip(phase).for_each(|(p, h)| *p *= h);
                out.values.clone_from(&psi);
                max_boundary = max_boundary.max(out.boundary_mass());
            }
        }
    }
    out.values = psi;
    max_boundary = max_boundary.max(out.boundary_mass());
    let drift = (out.mass() - field.mass()).abs();
    Evolution {
        field: out,
        max_boundary_mass: max_boundary,
        window_warning: max_boundary > BOUNDARY_MASS,
        mass_drift: drift,
    }
}

/// Samples of F_εψ at ξ_m = 2πεm/L in increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumField {
    pub eps: f64,
    pub xi: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl MomentumField {
    pub fn dxi(&self) -> f64 {
        self.xi[1] - self.xi[0]
    }

    pub fn mass(&self) -> f64 {
        self.dxi() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    pub fn integrate(&self, chi: &dyn Fn(f64) -> f64) -> f64 {
        self.dxi()
            * self
                .xi
                .iter()
                .zip(&self.values)
                .map(|(&k, v)| chi(k) * v.norm_sqr())
                .sum::<f64>()
    }
}

/// Maps DFT slot order to increasing signed index.
fn shifted<T: Copy>(v: &[T]) -> Vec<T> {
    let h = v.len() / 2;
    v[h..].iter().chain(&v[..h]).copied().collect()
}

pub fn fourier_eps(field: &WaveField) -> MomentumField {
    let grid = field.grid;
    let eps = field.eps;
    let mut buf = field.values.clone();
    Spectral::new(grid.n).fwd.process(&mut buf);
    let pre = grid.dx() / (2.0 * PI * eps).sqrt();
    let vals: Vec<Complex64> = buf
        .iter()
        .enumerate()
        .map(|(m, v)| v * Complex64::from_polar(pre, -grid.wavenumber(m) * grid.lo))
        .collect();
    let xi: Vec<f64> = (0..grid.n).map(|m| eps * grid.wavenumber(m)).collect();
    MomentumField {
        eps,
        xi: shifted(&xi),
        values: shifted(&vals),
    }
}

/// Real function on a uniform (x, ξ) grid, stored row-major with one row per x.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceFunction {
    pub xs: Vec<f64>,
    pub xis: Vec<f64>,
    pub values: Vec<f64>,
}

impl PhaseSpaceFunction {
    pub fn at(&self, i: usize, k: usize) -> f64 {
        self.values[i * self.xis.len() + k]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let w = self.xis.len();
        &self.values[i * w..(i + 1) * w]
    }

    pub fn dx(&self) -> f64 {
        self.xs[1] - self.xs[0]
    }

    pub fn dxi(&self) -> f64 {
        self.xis[1] - self.xis[0]
    }

    /// ∫ · dξ for every row.
    pub fn x_marginal(&self) -> Vec<f64> {
        let d = self.dxi();
        (0..self.xs.len())
            .map(|i| d * self.row(i).iter().sum::<f64>())
            .collect()
    }

    /// ∫ · dx for every column.
    pub fn xi_marginal(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.xis.len()];
        for i in 0..self.xs.len() {
            out.iter_mut().zip(self.row(i)).for_each(|(o, v)| *o += v);
        }
        let d = self.dx();
        out.iter_mut().for_each(|o| *o *= d);
        out
    }

    pub fn total(&self) -> f64 {
        self.dx() * self.dxi() * self.values.iter().sum::<f64>()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Weighted second moment of ξ − center(x) over rows with x in `window`.
    pub fn momentum_spread(&self, window: (f64, f64), center: &dyn Fn(f64) -> f64) -> f64 {
        let (mut m0, mut m2) = (0.0, 0.0);
        for (i, &x) in self.xs.iter().enumerate() {
            if x < window.0 || x > window.1 {
                continue;
            }
            let c = center(x);
            for (&k, &h) in self.xis.iter().zip(self.row(i)) {
                m0 += h;
                m2 += h * (k - c) * (k - c);
            }
        }
        m2 / m0
    }
}

/// W_ε[ψ](x_j, ξ_k) = (πε)^{-1} Σ_m ψ_{j+m} conj(ψ_{j−m}) e^{−2iξ_k m Δx/ε} Δx with
/// ξ_k = πεk/L; rows every `x_stride` grid points. ψ is extended by zero outside
/// the window: the periodic extension would add a ghost midway between the field
/// and its periodic image.
pub fn wigner(field: &WaveField, x_stride: usize) -> PhaseSpaceFunction {
    let grid = field.grid;
    let n = grid.n;
    let stride = x_stride.max(1);
    let rows: Vec<usize> = (0..n).step_by(stride).collect();
    let spec = Spectral::new(n);
    let pre = grid.dx() / (PI * field.eps);
    let psi = &field.values;
    let table: Vec<Vec<f64>> = rows
        .par_iter()
        .map(|&j| {
            let mut c: Vec<Complex64> = (0..n)
                .map(|m| {
                    let s = grid.signed(m);
                    let (a, b) = (j as i64 + s, j as i64 - s);
                    if a < 0 || b < 0 || a >= n as i64 || b >= n as i64 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        psi[a as usize] * psi[b as usize].conj()
                    }
                })
                .collect();
            spec.fwd.process(&mut c);
            shifted(&c.iter().map(|v| pre * v.re).collect::<Vec<_>>())
        })
        .collect();
    let xis: Vec<f64> = (0..n)
        .map(|k| PI * field.eps * (k as i64 - n as i64 / 2) as f64 / grid.len)
        .collect();
    PhaseSpaceFunction {
        xs: rows.iter().map(|&j| grid.x(j)).collect(),
        xis,
        values: table.concat(),
    }
}

/// Husimi transform |⟨Ψ^{x₀,ξ₀}|ψ⟩|²/(2πε) at x₀ on every `x_stride`-th grid point
/// and ξ₀ on the ε-Fourier grid.
pub fn husimi(field: &WaveField, x_stride: usize) -> PhaseSpaceFunction {
    let grid = field.grid;
    let n = grid.n;
    let eps = field.eps;
    let rows: Vec<usize> = (0..n).step_by(x_stride.max(1)).collect();
    let spec = Spectral::new(n);
    let reach = (KERNEL_CUTOFF * eps.sqrt() / grid.dx()).ceil() as usize;
    let pre = (PI * eps).powf(-0.25) * grid.dx();
    let table: Vec<Vec<f64>> = rows
        .par_iter()
        .map(|&i| {
            let mut h = vec![Complex64::new(0.0, 0.0); n];
            if 2 * reach + 1 >= n {
                for (j, hj) in h.iter_mut().enumerate() {
                    let d = grid.offset(j, i);
                    *hj = field.values[j] * (pre * (-d * d / (2.0 * eps)).exp());
                }
            } else {
                for o in 0..=2 * reach {
                    let j = (i + n + o - reach) % n;
                    let d = grid.offset(j, i);
                    h[j] = field.values[j] * (pre * (-d * d / (2.0 * eps)).exp());
                }
            }
            spec.fwd.process(&mut h);
            shifted(&h.iter().map(|v| v.norm_sqr() / (2.0 * PI * eps)).collect::<Vec<_>>())
        })
        .collect();
    PhaseSpaceFunction {
        xs: rows.iter().map(|&i| grid.x(i)).collect(),
        xis: shifted(&(0..n).map(|m| eps * grid.wavenumber(m)).collect::<Vec<_>>()),
        values: table.concat(),
    }
}

/// Husimi transform as W_ε[ψ] ⋆ G_ε, sampled on the same grid as [`husimi`].
/// Both convolutions are periodic, over the x-window and over the Wigner ξ-period,
/// which is half the ε-Fourier range.
pub fn husimi_via_wigner(field: &WaveField, x_stride: usize) -> Result<PhaseSpaceFunction, QuantumError> {
    let grid = field.grid;
    let n = grid.n;
    if n > MAX_WIGNER_GRID {
        return Err(QuantumError::BadGrid(format!(
            "Wigner-route Husimi stores n² values; n = {n} exceeds {MAX_WIGNER_GRID}"
        )));
    }
    let eps = field.eps;
    let w = wigner(field, 1);
    let dxi = w.dxi();
    let spec = Spectral::new(n);
    // Periodic kernel samples in DFT slot order, already weighted by the cell size.
    let kernel_hat = |step: f64| -> Vec<Complex64> {
        let mut k: Vec<Complex64> = (0..n)
            .map(|m| {
                let s = if m < n / 2 { m as f64 } else { m as f64 - n as f64 };
                Complex64::new(heat_kernel(s * step, eps) * step, 0.0)
            })
            .collect();
        spec.fwd.process(&mut k);
        k
    };
    let kx = kernel_hat(grid.dx());
    let kxi = kernel_hat(dxi);
    let inv = 1.0 / n as f64;
    // Rows are in increasing x and columns in increasing ξ; both are periodic sequences.
    let mut smooth_xi: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut r: Vec<Complex64> = w.row(i).iter().map(|&v| Complex64::new(v, 0.0)).collect();
            spec.fwd.process(&mut r);
            r.iter_mut().zip(&kxi).for_each(|(a, b)| *a *= b * inv);
            spec.inv.process(&mut r);
            r.iter().map(|v| v.re).collect()
        })
        .collect();
    let columns: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|k| {
            let mut c: Vec<Complex64> = smooth_xi.iter().map(|row| Complex64::new(row[k], 0.0)).collect();
            spec.fwd.process(&mut c);
            c.iter_mut().zip(&kx).for_each(|(a, b)| *a *= b * inv);
            spec.inv.process(&mut c);
            c.iter().map(|v| v.re).collect()
        })
        .collect();
    for (k, col) in columns.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            smooth_xi[i][k] = v;
        }
    }
    // Wigner column k has ξ = πε(k − n/2)/L, so the ε-Fourier grid is every other
    // column and its outer half lies beyond the Wigner range; those columns are zero.
    let rows: Vec<usize> = (0..n).step_by(x_stride.max(1)).collect();
    let half = n as i64 / 2;
    let mut values = Vec::with_capacity(rows.len() * n);
    for &i in &rows {
        for m in 0..n {
            let s = 2 * (m as i64 - half);
            values.push(if s.abs() < half {
                smooth_xi[i][(s + half) as usize]
            } else {
                0.0
            });
        }
    }
    Ok(PhaseSpaceFunction {
        xs: rows.iter().map(|&i| grid.x(i)).collect(),
        xis: shifted(&(0..n).map(|m| eps * grid.wavenumber(m)).collect::<Vec<_>>()),
        values,
    })
}

/// (g_ε ⋆ |ψ|²)(x_j) on every grid point, periodic.
pub fn smoothed_density(field: &WaveField) -> Vec<f64> {
    let grid = field.grid;
    let n = grid.n;
    let rho = field.density();
    let reach = ((KERNEL_CUTOFF * field.eps.sqrt() / grid.dx()).ceil() as usize).min(n / 2);
    let weights: Vec<f64> = (0..=reach)
        .map(|o| heat_kernel(o as f64 * grid.dx(), field.eps) * grid.dx())
        .collect();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut s = weights[0] * rho[i];
            for (o, w) in weights.iter().enumerate().skip(1) {
                let (a, b) = ((i + o) % n, (i + n - o) % n);
                s += w * rho[a];
                if a != b {
                    s += w * rho[b];
                }
            }
            s
        })
        .collect()
}

/// (g_ε ⋆ |F_εψ|²)(ξ_m) on the ε-Fourier grid, non-periodic.
pub fn smoothed_momentum_density(field: &WaveField) -> Vec<f64> {
    let f = fourier_eps(field);
    let d = f.density();
    let dxi = f.dxi();
    let n = d.len();
    let reach = ((KERNEL_CUTOFF * field.eps.sqrt() / dxi).ceil() as usize).min(n);
    let weights: Vec<f64> = (0..=reach)
        .map(|o| heat_kernel(o as f64 * dxi, field.eps) * dxi)
        .collect();
    (0..n)
        .into_par_iter()
        .map(|m| {
            let mut s = weights[0] * d[m];
            for (o, w) in weights.iter().enumerate().skip(1) {
                if m + o < n {
                    s += w * d[m + o];
                }
                if m >= o {
                    s += w * d[m - o];
                }
            }
            s
        })
        .collect()
}

/// Quantum against classical position statistics for one test function.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub eps: f64,
    pub t: f64,
    /// ∫χ|ψ_ε|².
    pub quantum: f64,
    /// ∫χρ_a(t, ·).
    pub classical: f64,
    pub gap: f64,
    /// χ does not vanish on the image of singular initial mass.
    pub caustic_warning: bool,
    /// Grid points skipped because they lie on the caustic fiber.
    pub caustic_points: usize,
}

/// Compares ∫χ|ψ_ε(t)|² with ∫χρ_a(t) where ρ_a is the fold-sum density on the
/// field grid. `pushed` supplies the transported samples for the caustic check.
pub fn classical_comparison(
    field: &WaveField,
    tr: &Transport,
    pushed: &TransportedDensity,
    chi: &dyn Fn(f64) -> f64,
) -> Result<Comparison, QuantumError> {
    let t = field.t;
    let quantum = field.integrate(chi);
    let grid = tr.grid(t)?;
    let xs = field.grid.points();
    let values: Vec<Option<f64>> = xs
        .par_iter()
        .map(|&x| match tr.density_on(&grid, x) {
            Ok(d) => Ok(Some(d.value)),
            Err(TransportError::Caustic { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_, _>>()?;
    let classical = field.grid.dx()
        * xs.iter()
            .zip(&values)
            .map(|(&x, v)| v.map_or(0.0, |d| chi(x) * d))
            .sum::<f64>();
    let caustic_points = values.iter().filter(|v| v.is_none()).count();
    let caustic_warning = pushed
        .samples()
        .iter()
        .any(|s| s.singular && s.mass > 0.0 && chi(s.image).abs() > 1e-12);
    Ok(Comparison {
        eps: field.eps,
        t,
        quantum,
        classical,
        gap: (quantum - classical).abs(),
        caustic_warning,
        caustic_points,
    })
}
