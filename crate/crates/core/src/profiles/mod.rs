//! Initial momentum profiles with derivative data, singular sets and phases.

mod basic;
mod cantor;
mod fat;
mod theta;

use std::fmt;
use std::sync::Arc;

pub use basic::{BumpFocusing, ExprProfile, LogOscillation};
pub use cantor::{cantor_function, CantorBv};
pub use fat::{FatCantor, FatCantorLayout};
pub use theta::{ThetaCantor, ThetaTree};

use thiserror::Error;

use crate::expr::Expr;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProfileError {
    #[error("invalid profile parameter: {0}")]
    BadParameter(String),
    #[error("construction depth exhausted before the compact reached measure {needed}")]
    DepthExhausted { needed: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regularity {
    /// C^k with the given k; `u32::MAX` stands for C^∞.
    Ck(u32),
    Lipschitz,
    BvOnly,
}

impl fmt::Display for Regularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regularity::Ck(u32::MAX) => write!(f, "C_inf"),
            Regularity::Ck(k) => write!(f, "C_{k}"),
            Regularity::Lipschitz => write!(f, "Lipschitz"),
            Regularity::BvOnly => write!(f, "BV_only"),
        }
    }
}

/// A one-dimensional momentum profile y ↦ U(y).
pub trait ScalarProfile: Send + Sync + fmt::Debug {
    fn name(&self) -> String;
    fn eval(&self, y: f64) -> f64;
    /// U'(y), or `None` on the nondifferentiability set at working resolution.
    fn deriv(&self, y: f64) -> Option<f64>;
    fn nondiff(&self, y: f64) -> bool {
        self.deriv(y).is_none()
    }
    /// S(y) = ∫_0^y U.
    fn phase(&self, y: f64) -> f64;
    fn regularity(&self) -> Regularity;
    /// Declared Lorentz-space membership of the derivative; never computed.
    fn satisfies_l_n1(&self) -> bool;
    /// The unresolved leaf of a depth-truncated construction containing y, if any.
    /// The profile is flat there and stands in for structure below resolution.
    fn unresolved_leaf(&self, _y: f64) -> Option<(f64, f64)> {
        None
    }

    /// Unresolved leaves meeting [lo, hi], in increasing order. The default probes
    /// the ends and the midpoint, which suffices when leaves only ever sit at the
    /// ends of a flat stretch.
    fn unresolved_leaves_in(&self, lo: f64, hi: f64) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = [lo, 0.5 * (lo + hi), hi]
            .into_iter()
            .filter_map(|y| self.unresolved_leaf(y))
            .collect();
        out.sort_by(|p, q| p.0.total_cmp(&q.0));
        out.dedup();
        out
    }
    /// Isolated singular points near which root enumeration needs a graded grid.
    fn isolated_singularities(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// Shared handle to a scalar profile.
#[derive(Clone, Debug)]
pub struct MomentumProfile(pub Arc<dyn ScalarProfile>);

impl MomentumProfile {
    pub fn new<P: ScalarProfile + 'static>(p: P) -> Self {
        MomentumProfile(Arc::new(p))
    }
}

impl std::ops::Deref for MomentumProfile {
    type Target = dyn ScalarProfile;
    fn deref(&self) -> &Self::Target {
        &*self.0
    }
}

/// Componentwise product profile U(y) = (U_1(y_1), …, U_N(y_N)).
#[derive(Clone, Debug)]
pub struct ProductProfile {
    pub factors: Vec<MomentumProfile>,
}

impl ProductProfile {
    pub fn dim(&self) -> usize {
        self.factors.len()
    }

    pub fn eval(&self, y: &[f64]) -> Vec<f64> {
        self.factors.iter().zip(y).map(|(p, &v)| p.eval(v)).collect()
    }

    /// Diagonal of DU, `None` when any factor is nondifferentiable.
    pub fn deriv(&self, y: &[f64]) -> Option<Vec<f64>> {
        self.factors.iter().zip(y).map(|(p, &v)| p.deriv(v)).collect()
    }

    pub fn nondiff(&self, y: &[f64]) -> bool {
        self.factors.iter().zip(y).any(|(p, &v)| p.nondiff(v))
    }
}

/// U = −sin, the smooth folding baseline.
pub fn profile_neg_sin() -> MomentumProfile {
    MomentumProfile::new(ExprProfile::new("neg_sin", Expr::parse("-sin(x)").unwrap()))
}

/// U = 0.
pub fn profile_zero() -> MomentumProfile {
    MomentumProfile::new(ExprProfile::new("zero", Expr::Num(0.0)))
}

/// U(z) = z sin(ln|z|), with U(0) = 0.
pub fn profile_log_oscillation() -> MomentumProfile {
    MomentumProfile::new(LogOscillation)
}

/// Cantor function minus the identity on [0, 1], zero elsewhere.
pub fn profile_cantor_bv(depth: u32) -> MomentumProfile {
    MomentumProfile::new(CantorBv::new(depth))
}

/// Minus the antiderivative of a smooth plateau equal to 1 on [−½, ½].
pub fn profile_bump_focusing() -> MomentumProfile {
    MomentumProfile::new(BumpFocusing::new())
}

pub fn profile_fat_cantor_ck(k: u32) -> Result<MomentumProfile, ProfileError> {
    Ok(MomentumProfile::new(FatCantor::new(k, FatCantorLayout::default())?))
}

pub fn profile_theta_cantor(theta: f64, depth: u32) -> Result<MomentumProfile, ProfileError> {
    Ok(MomentumProfile::new(ThetaCantor::new(theta, depth)?))
}

/// Largest |U(y)|/|y| over |y| ∈ [r, 4r] for each probe radius r.
pub fn sublinearity_ratios(profile: &dyn ScalarProfile, radii: &[f64]) -> Vec<f64> {
    radii
        .iter()
        .map(|&r| {
            let mut worst = 0.0f64;
            for i in 0..=64 {
                let y = r * (1.0 + 3.0 * i as f64 / 64.0);
                worst = worst.max(profile.eval(y).abs() / y).max(profile.eval(-y).abs() / y);
            }
            worst
        })
        .collect()
}
