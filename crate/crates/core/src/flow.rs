//! Hamiltonian flow with its tangent map and the classical action.
//!
//! The state, the 2N×2N Jacobian and the action are integrated together by a
//! single adaptive Dormand–Prince 5(4) scheme. Phase-space ordering is (x, ξ).

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;
use thiserror::Error;

use crate::expr::Expr;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("non-finite derivative encountered at t = {time}")]
    NonFinite { time: f64 },
    #[error("step size underflow at t = {time}")]
    StepUnderflow { time: f64 },
    #[error("step budget exhausted at t = {time}")]
    MaxSteps { time: f64 },
    #[error("non-finite seed or time")]
    BadInput,
}

/// A C² Hamiltonian on R^N × R^N.
pub trait Hamiltonian: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;
    fn energy(&self, x: &[f64], xi: &[f64]) -> f64;
    fn grad_x(&self, x: &[f64], xi: &[f64], out: &mut [f64]);
    fn grad_xi(&self, x: &[f64], xi: &[f64], out: &mut [f64]);
    /// Row-major 2N×2N Hessian in (x, ξ) ordering.
    fn hessian(&self, x: &[f64], xi: &[f64], out: &mut [f64]);
    /// Potential part V(x) when H = ½|ξ|² + V(x).
    fn potential(&self, _x: &[f64]) -> Option<f64> {
        None
    }
}

/// H = ½|ξ|².
#[derive(Debug, Clone)]
pub struct Free {
    pub dim: usize,
}

impl Hamiltonian for Free {
    fn dim(&self) -> usize {
        self.dim
    }
    fn energy(&self, _x: &[f64], xi: &[f64]) -> f64 {
        0.5 * xi.iter().map(|v| v * v).sum::<f64>()
    }
    fn grad_x(&self, _x: &[f64], _xi: &[f64], out: &mut [f64]) {
        out.fill(0.0);
    }
    fn grad_xi(&self, _x: &[f64], xi: &[f64], out: &mut [f64]) {
        out.copy_from_slice(xi);
    }
    fn hessian(&self, _x: &[f64], _xi: &[f64], out: &mut [f64]) {
        let n = self.dim;
        out.fill(0.0);
        for i in 0..n {
            out[(n + i) * 2 * n + n + i] = 1.0;
        }
    }
    fn potential(&self, _x: &[f64]) -> Option<f64> {
        Some(0.0)
    }
}

/// H = ½(|ξ|² + |x|²).
#[derive(Debug, Clone)]
pub struct Harmonic {
    pub dim: usize,
}

impl Hamiltonian for Harmonic {
    fn dim(&self) -> usize {
        self.dim
    }
    fn energy(&self, x: &[f64], xi: &[f64]) -> f64 {
        0.5 * (xi.iter().map(|v| v * v).sum::<f64>() + x.iter().map(|v| v * v).sum::<f64>())
    }
    fn grad_x(&self, x: &[f64], _xi: &[f64], out: &mut [f64]) {
        out.copy_from_slice(x);
    }
    fn grad_xi(&self, _x: &[f64], xi: &[f64], out: &mut [f64]) {
        out.copy_from_slice(xi);
    }
    fn hessian(&self, _x: &[f64], _xi: &[f64], out: &mut [f64]) {
        let m = 2 * self.dim;
        out.fill(0.0);
        for i in 0..m {
            out[i * m + i] = 1.0;
        }
    }
    fn potential(&self, x: &[f64]) -> Option<f64> {
        Some(0.5 * x.iter().map(|v| v * v).sum::<f64>())
    }
}

/// H = ½ξ² + V(x) in one dimension with V given by an expression.
#[derive(Debug, Clone)]
pub struct Potential1d {
    v: Expr,
    dv: Expr,
    d2v: Expr,
}

impl Potential1d {
    pub fn new(v: Expr) -> Self {
        let dv = v.derivative();
        let d2v = dv.derivative();
        Potential1d { v, dv, d2v }
    }

    pub fn expr(&self) -> &Expr {
        &self.v
    }
}

impl Hamiltonian for Potential1d {
    fn dim(&self) -> usize {
        1
    }
    fn energy(&self, x: &[f64], xi: &[f64]) -> f64 {
        0.5 * xi[0] * xi[0] + self.v.eval(x[0])
    }
    fn grad_x(&self, x: &[f64], _xi: &[f64], out: &mut [f64]) {
        out[0] = self.dv.eval(x[0]);
    }
    fn grad_xi(&self, _x: &[f64], xi: &[f64], out: &mut [f64]) {
        out[0] = xi[0];
    }
    fn hessian(&self, x: &[f64], _xi: &[f64], out: &mut [f64]) {
        out[0] = self.d2v.eval(x[0]);
        out[1] = 0.0;
        out[2] = 0.0;
        out[3] = 1.0;
    }
    fn potential(&self, x: &[f64]) -> Option<f64> {
        Some(self.v.eval(x[0]))
    }
}

/// H = ½ξ² + V(x) with V the natural cubic spline through tabulated samples,
/// continued linearly outside the table so that V stays C².
#[derive(Debug, Clone)]
pub struct SampledPotential {
    xs: Vec<f64>,
    vs: Vec<f64>,
    /// Spline second derivatives at the knots; zero at both ends.
    m: Vec<f64>,
}

impl SampledPotential {
    /// `xs` must be strictly increasing with at least two knots.
    pub fn new(xs: Vec<f64>, vs: Vec<f64>) -> Result<Self, String> {
        let n = xs.len();
        if n < 2 || vs.len() != n {
            return Err(format!(
                "need at least two (x, V) samples of equal length, got {} and {}",
                n,
                vs.len()
            ));
        }
        if xs.iter().chain(&vs).any(|v| !v.is_finite()) {
            return Err("potential samples must be finite".into());
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err("potential knots must be strictly increasing".into());
        }
        let mut m = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm on the interior equations.
            let k = n - 2;
            let mut diag = vec![0.0; k];
            let mut rhs = vec![0.0; k];
            for i in 1..n - 1 {
                let (h0, h1) = (xs[i] - xs[i - 1], xs[i + 1] - xs[i]);
                diag[i - 1] = 2.0 * (h0 + h1);
                rhs[i - 1] = 6.0 * ((vs[i + 1] - vs[i]) / h1 - (vs[i] - vs[i - 1]) / h0);
            }
            for j in 1..k {
                let lower = xs[j + 1] - xs[j];
                let w = lower / diag[j - 1];
                diag[j] -= w * lower;
                rhs[j] -= w * rhs[j - 1];
            }
            m[k] = rhs[k - 1] / diag[k - 1];
            for j in (0..k - 1).rev() {
                let upper = xs[j + 2] - xs[j + 1];
                m[j + 1] = (rhs[j] - upper * m[j + 2]) / diag[j];
            }
        }
        Ok(SampledPotential { xs, vs, m })
    }

    /// (V, V', V'') at x.
    pub fn eval(&self, x: f64) -> (f64, f64, f64) {
        let n = self.xs.len();
        if x < self.xs[0] {
            let (v, d, _) = self.eval(self.xs[0]);
            return (v + d * (x - self.xs[0]), d, 0.0);
        }
        if x > self.xs[n - 1] {
            let (v, d, _) = self.eval(self.xs[n - 1]);
            return (v + d * (x - self.xs[n - 1]), d, 0.0);
        }
        let i = self.xs.partition_point(|&k| k <= x).clamp(1, n - 1) - 1;
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = 1.0 - a;
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let v = a * self.vs[i] + b * self.vs[i + 1] + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let d =
            (self.vs[i + 1] - self.vs[i]) / h - (3.0 * a * a - 1.0) / 6.0 * h * m0 + (3.0 * b * b - 1.0) / 6.0 * h * m1;
        (v, d, a * m0 + b * m1)
    }
}

impl Hamiltonian for SampledPotential {
    fn dim(&self) -> usize {
        1
    }
    fn energy(&self, x: &[f64], xi: &[f64]) -> f64 {
        0.5 * xi[0] * xi[0] + self.eval(x[0]).0
    }
    fn grad_x(&self, x: &[f64], _xi: &[f64], out: &mut [f64]) {
        out[0] = self.eval(x[0]).1;
    }
    fn grad_xi(&self, _x: &[f64], xi: &[f64], out: &mut [f64]) {
        out[0] = xi[0];
    }
    fn hessian(&self, x: &[f64], _xi: &[f64], out: &mut [f64]) {
        out[0] = self.eval(x[0]).2;
        out[1] = 0.0;
        out[2] = 0.0;
        out[3] = 1.0;
    }
    fn potential(&self, x: &[f64]) -> Option<f64> {
        Some(self.eval(x[0]).0)
    }
}

pub type RadialFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Dynamics definition: the Hamiltonian, its Hessian bound κ and the declared
/// gradient growth function h with |∇_x H(x, ξ)| ≤ h(|x|) + κ|ξ|.
#[derive(Clone)]
pub struct HamiltonianSystem {
    pub ham: Arc<dyn Hamiltonian>,
    pub kappa: f64,
    pub sublinear_h: Option<RadialFn>,
}

impl fmt::Debug for HamiltonianSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HamiltonianSystem")
            .field("ham", &self.ham)
            .field("kappa", &self.kappa)
            .field("sublinear_h", &self.sublinear_h.is_some())
            .finish()
    }
}

impl HamiltonianSystem {
    pub fn free(dim: usize) -> Self {
        HamiltonianSystem {
            ham: Arc::new(Free { dim }),
            kappa: 1.0,
            sublinear_h: Some(Arc::new(|_| 0.0)),
        }
    }

    /// h(r) = r is not sublinear, so the displacement bound is only available for large η.
    pub fn harmonic(dim: usize) -> Self {
        HamiltonianSystem {
            ham: Arc::new(Harmonic { dim }),
            kappa: 1.0,
            sublinear_h: Some(Arc::new(|r| r)),
        }
    }

    pub fn potential(v: Expr, kappa: f64, h: Option<Expr>) -> Self {
        HamiltonianSystem {
            ham: Arc::new(Potential1d::new(v)),
            kappa,
            sublinear_h: h.map(|e| Arc::new(move |r: f64| e.eval(r)) as RadialFn),
        }
    }

    pub fn sampled(p: SampledPotential, kappa: f64, h: Option<Expr>) -> Self {
        HamiltonianSystem {
            ham: Arc::new(p),
            kappa,
            sublinear_h: h.map(|e| Arc::new(move |r: f64| e.eval(r)) as RadialFn),
        }
    }

    pub fn dim(&self) -> usize {
        self.ham.dim()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    pub x: Vec<f64>,
    pub xi: Vec<f64>,
}

impl PhasePoint {
    pub fn new(x: Vec<f64>, xi: Vec<f64>) -> Self {
        assert_eq!(x.len(), xi.len());
        PhasePoint { x, xi }
    }

    pub fn one(x: f64, xi: f64) -> Self {
        PhasePoint {
            x: vec![x],
            xi: vec![xi],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().chain(&self.xi).all(|v| v.is_finite())
    }
}

/// One trajectory endpoint with its tangent map.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowJet {
    pub t: f64,
    pub point: PhasePoint,
    pub jacobian: DMatrix<f64>,
    pub action: f64,
}

impl FlowJet {
    /// Operator norm of DΦ_t − Id.
    pub fn jacobian_deviation(&self) -> f64 {
        let n = self.jacobian.nrows();
        let d = &self.jacobian - DMatrix::<f64>::identity(n, n);
        operator_norm(&d)
    }

    /// Largest entry of |DΦ_tᵀ Ω DΦ_t − Ω|.
    pub fn symplectic_defect(&self) -> f64 {
        let n = self.jacobian.nrows() / 2;
        let omega = symplectic_form(n);
        let m = self.jacobian.transpose() * &omega * &self.jacobian - omega;
        m.amax()
    }

    pub fn det(&self) -> f64 {
        self.jacobian.determinant()
    }
}

pub fn operator_norm(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// Ω = [[0, I], [−I, 0]].
pub fn symplectic_form(n: usize) -> DMatrix<f64> {
    let mut o = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        o[(i, n + i)] = 1.0;
        o[(n + i, i)] = -1.0;
    }
    o
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            rtol: 1e-10,
            atol: 1e-12,
            max_steps: 1_000_000,
        }
    }
}

// Dormand–Prince 5(4) tableau; the system is autonomous so the nodes are unused.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct Augmented<'a> {
    ham: &'a dyn Hamiltonian,
    n: usize,
    gx: Vec<f64>,
    gxi: Vec<f64>,
    hess: Vec<f64>,
}

impl<'a> Augmented<'a> {
    fn new(ham: &'a dyn Hamiltonian) -> Self {
        let n = ham.dim();
        Augmented {
            ham,
            n,
            gx: vec![0.0; n],
            gxi: vec![0.0; n],
            hess: vec![0.0; 4 * n * n],
        }
    }

    fn len(&self) -> usize {
        2 * self.n + 4 * self.n * self.n + 1
    }

    /// Layout: x (N), ξ (N), DΦ row-major (2N×2N), action.
    fn rhs(&mut self, y: &[f64], dy: &mut [f64]) {
        let n = self.n;
        let m = 2 * n;
        let (x, rest) = y.split_at(n);
        let (xi, rest) = rest.split_at(n);
        let (jac, _) = rest.split_at(m * m);
        self.ham.grad_x(x, xi, &mut self.gx);
        self.ham.grad_xi(x, xi, &mut self.gxi);
        self.ham.hessian(x, xi, &mut self.hess);
        for i in 0..n {
            dy[i] = self.gxi[i];
            dy[n + i] = -self.gx[i];
        }
        // d/dt DΦ = Ω ∇²H DΦ.
        let djac = &mut dy[m..m + m * m];
        for i in 0..m {
            let (hrow, sign) = if i < n { (n + i, 1.0) } else { (i - n, -1.0) };
            for j in 0..m {
                let mut acc = 0.0;
                for k in 0..m {
                    acc += self.hess[hrow * m + k] * jac[k * m + j];
                }
                djac[i * m + j] = sign * acc;
            }
        }
        let mut lag = -self.ham.energy(x, xi);
        for (p, g) in xi.iter().zip(&self.gxi[..n]) {
            lag += p * g;
        }
        dy[m + m * m] = lag;
    }
}

fn error_norm(y: &[f64], ynew: &[f64], err: &[f64], opts: &IntegratorOptions) -> f64 {
    let mut acc = 0.0;
    for i in 0..y.len() {
        let sc = opts.atol + opts.rtol * y[i].abs().max(ynew[i].abs());
        let r = err[i] / sc;
        acc += r * r;
    }
    (acc / y.len() as f64).sqrt()
}

/// Φ_t(seed) together with DΦ_t and the action ∫(ξ·∇_ξH − H) ds.
pub fn evolve(
    sys: &HamiltonianSystem,
    seed: &PhasePoint,
    t: f64,
    opts: &IntegratorOptions,
) -> Result<FlowJet, FlowError> {
    let n = sys.dim();
    if !seed.is_finite() || !t.is_finite() || seed.x.len() != n {
        return Err(FlowError::BadInput);
    }
    let m = 2 * n;
    let mut aug = Augmented::new(&*sys.ham);
    let len = aug.len();
    let mut y = vec![0.0; len];
    y[..n].copy_from_slice(&seed.x);
    y[n..m].copy_from_slice(&seed.xi);
    for i in 0..m {
        y[m + i * m + i] = 1.0;
    }
    if t != 0.0 {
        integrate(&mut aug, &mut y, t, opts)?;
    }
    let jacobian = DMatrix::from_row_slice(m, m, &y[m..m + m * m]);
    Ok(FlowJet {
        t,
        point: PhasePoint::new(y[..n].to_vec(), y[n..m].to_vec()),
        jacobian,
        action: y[m + m * m],
    })
}

fn integrate(aug: &mut Augmented<'_>, y: &mut [f64], t_end: f64, opts: &IntegratorOptions) -> Result<(), FlowError> {
    let len = y.len();
    let dir = t_end.signum();
    let mut k: Vec<Vec<f64>> = (0..7).map(|_| vec![0.0; len]).collect();
    let mut stage = vec![0.0; len];
    let mut ynew = vec![0.0; len];
    let mut err = vec![0.0; len];

    aug.rhs(y, &mut k[0]);
    if k[0].iter().any(|v| !v.is_finite()) {
        return Err(FlowError::NonFinite { time: 0.0 });
    }
    let mut t = 0.0;
    let mut h = dir * initial_step(y, &k[0], t_end.abs(), opts);
    let mut steps = 0;
    loop {
        let remaining = t_end - t;
        if remaining * dir <= 0.0 {
            return Ok(());
        }
        if h.abs() >= remaining.abs() {
            h = remaining;
        }
        if h.abs() <= 1e-14 * t.abs().max(1.0) && h.abs() < remaining.abs() {
            return Err(FlowError::StepUnderflow { time: t });
        }
        steps += 1;
        if steps > opts.max_steps {
            return Err(FlowError::MaxSteps { time: t });
        }
        for s in 1..7 {
            for i in 0..len {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = A[s][j];
                    if a != 0.0 {
                        acc += a * kj[i];
                    }
                }
                stage[i] = y[i] + h * acc;
            }
            aug.rhs(&stage, &mut k[s]);
        }
        // Stage 7 was evaluated at the 5th-order solution.
        ynew.copy_from_slice(&stage);
        for i in 0..len {
            let mut acc = 0.0;
            for (j, kj) in k.iter().enumerate() {
                acc += E[j] * kj[i];
            }
            err[i] = h * acc;
        }
        if ynew.iter().any(|v| !v.is_finite()) || k[6].iter().any(|v| !v.is_finite()) {
            h *= 0.25;
            if h.abs() < 1e-14 * t.abs().max(1.0) {
                return Err(FlowError::NonFinite { time: t });
            }
            continue;
        }
        let e = error_norm(y, &ynew, &err, opts);
        if e <= 1.0 {
            t = if (t_end - (t + h)) * dir <= 0.0 { t_end } else { t + h };
            y.copy_from_slice(&ynew);
            let (first, last) = k.split_at_mut(6);
            first[0].copy_from_slice(&last[0]);
            let fac = if e == 0.0 {
                10.0
            } else {
                (0.9 * e.powf(-0.2)).clamp(0.2, 10.0)
            };
            h *= fac;
        } else {
            h *= (0.9 * e.powf(-0.2)).clamp(0.2, 1.0);
        }
    }
}

fn initial_step(y: &[f64], f0: &[f64], span: f64, opts: &IntegratorOptions) -> f64 {
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for i in 0..y.len() {
        let sc = opts.atol + opts.rtol * y[i].abs();
        d0 += (y[i] / sc).powi(2);
        d1 += (f0[i] / sc).powi(2);
    }
    let d0 = (d0 / y.len() as f64).sqrt();
    let d1 = (d1 / y.len() as f64).sqrt();
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.min(span).max(1e-10_f64.min(span))
}

/// Elementwise [`evolve`]; failures are reported per seed.
pub fn evolve_batch(
    sys: &HamiltonianSystem,
    seeds: &[PhasePoint],
    t: f64,
    opts: &IntegratorOptions,
) -> Vec<Result<FlowJet, FlowError>> {
    seeds.par_iter().map(|s| evolve(sys, s, t, opts)).collect()
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("no growth function h declared for this system")]
    MissingGrowth,
    #[error("requested eta = {requested} is below the smallest attainable {best} on the probed radii")]
    Unattainable { requested: f64, best: f64 },
    #[error("eta and T must be positive and finite")]
    BadInput,
}

/// Constants of the displacement estimate sup_{|t|≤T} |X_t − x| ≤ C(1 + |ξ|) + η|x|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacementBound {
    pub c_eta: f64,
    /// η actually achieved by the chosen radius; never exceeds the request.
    pub eta: f64,
    pub radius: f64,
    pub sup_inner: f64,
    pub sup_ratio_outer: f64,
}

/// Smallest probed radius R whose tail ratio m_R = sup_{r>R} h(r)/r makes
/// m_R e^{T(κ + m_R e^{κT})} ≤ eta, with C = (1 + κT + M_R T) e^{T(κ + m_R e^{κT})}
/// and M_R = sup_{r≤R} h(r). Suprema are taken over radii in [0, 1e8].
pub fn position_displacement_bound(
    sys: &HamiltonianSystem,
    horizon: f64,
    eta: f64,
) -> Result<DisplacementBound, BoundError> {
    if !(eta > 0.0 && eta.is_finite() && horizon >= 0.0 && horizon.is_finite()) {
        return Err(BoundError::BadInput);
    }
    let h = sys.sublinear_h.as_ref().ok_or(BoundError::MissingGrowth)?;
    let kappa = sys.kappa;
    let mut radii = vec![0.0];
    let probes = 4000;
    for i in 0..=probes {
        radii.push(10f64.powf(-6.0 + 14.0 * i as f64 / probes as f64));
    }
    let hv: Vec<f64> = radii.iter().map(|&r| h(r)).collect();
    let mut prefix = vec![0.0; radii.len()];
    let mut run = f64::NEG_INFINITY;
    for i in 0..radii.len() {
        run = run.max(hv[i]);
        prefix[i] = run;
    }
    let mut suffix = vec![0.0; radii.len()];
    let mut run = 0.0f64;
    for i in (0..radii.len()).rev() {
        suffix[i] = run;
        if radii[i] > 0.0 {
            run = run.max(hv[i] / radii[i]);
        }
    }
    let t = horizon;
    let mut best = f64::INFINITY;
    for i in 0..radii.len() - 1 {
        let m_r = suffix[i];
        let grow = (t * (kappa + m_r * (kappa * t).exp())).exp();
        let eta_r = m_r * grow;
        best = best.min(eta_r);
        if eta_r <= eta {
            return Ok(DisplacementBound {
                c_eta: (1.0 + kappa * t + prefix[i] * t) * grow,
                eta: eta_r,
                radius: radii[i],
                sup_inner: prefix[i],
                sup_ratio_outer: m_r,
            });
        }
    }
    Err(BoundError::Unattainable { requested: eta, best })
}

/// Worst sampled operator norm of ∇²H, and whether it respects κ.
pub fn hessian_check(sys: &HamiltonianSystem, samples: &[PhasePoint]) -> (f64, bool) {
    let n = sys.dim();
    let m = 2 * n;
    let mut buf = vec![0.0; m * m];
    let mut worst = 0.0f64;
    for p in samples {
        sys.ham.hessian(&p.x, &p.xi, &mut buf);
        worst = worst.max(operator_norm(&DMatrix::from_row_slice(m, m, &buf)));
    }
    (worst, worst <= sys.kappa * (1.0 + 1e-12))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn free_flow_is_shear() {
        let sys = HamiltonianSystem::free(1);
        let j = evolve(&sys, &PhasePoint::one(1.0, 2.0), 3.0, &Default::default()).unwrap();
        assert!((j.point.x[0] - 7.0).abs() < 1e-12);
        assert!((j.point.xi[0] - 2.0).abs() < 1e-12);
        let want = DMatrix::from_row_slice(2, 2, &[1.0, 3.0, 0.0, 1.0]);
        assert!((&j.jacobian - want).amax() < 1e-12);
        // ½ξ²t
        assert!((j.action - 6.0).abs() < 1e-11);
    }

    #[test]
    fn harmonic_quarter_turn() {
        let sys = HamiltonianSystem::harmonic(1);
        let j = evolve(&sys, &PhasePoint::one(1.0, 0.0), PI / 2.0, &Default::default()).unwrap();
        assert!(j.point.x[0].abs() < 1e-9);
        assert!((j.point.xi[0] + 1.0).abs() < 1e-9);
        let want = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        assert!((&j.jacobian - want).amax() < 1e-9);
    }

    #[test]
    fn zero_time_is_identity() {
        let sys = HamiltonianSystem::harmonic(2);
        let seed = PhasePoint::new(vec![0.3, -1.0], vec![2.0, 0.5]);
        let j = evolve(&sys, &seed, 0.0, &Default::default()).unwrap();
        assert_eq!(j.point, seed);
        assert_eq!(j.jacobian, DMatrix::identity(4, 4));
    }

    #[test]
    fn nonfinite_seed_rejected() {
        let sys = HamiltonianSystem::free(1);
        let e = evolve(&sys, &PhasePoint::one(f64::NAN, 0.0), 1.0, &Default::default());
        assert_eq!(e.unwrap_err(), FlowError::BadInput);
    }

    #[test]
    fn blowup_reports_time() {
        // V = -x^4 escapes to infinity in finite time from (1, 1).
        let sys = HamiltonianSystem::potential(Expr::parse("-x^4").unwrap(), 1.0, None);
        let e = evolve(&sys, &PhasePoint::one(1.0, 1.0), 10.0, &Default::default()).unwrap_err();
        match e {
            FlowError::NonFinite { time } | FlowError::StepUnderflow { time } => {
                assert!(time > 0.0 && time < 10.0)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn free_displacement_constant() {
        let sys = HamiltonianSystem::free(1);
        let b = position_displacement_bound(&sys, 2.0, 0.1).unwrap();
        // κ = 1 and h = 0 give C = (1 + T) e^T.
        assert!((b.c_eta - 3.0 * 2f64.exp()).abs() < 1e-12);
        assert_eq!(b.eta, 0.0);
    }

    #[test]
    fn harmonic_small_eta_unattainable() {
        let sys = HamiltonianSystem::harmonic(1);
        let e = position_displacement_bound(&sys, 1.0, 0.5).unwrap_err();
        assert!(matches!(e, BoundError::Unattainable { .. }));
    }
}
