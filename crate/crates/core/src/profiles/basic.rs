use std::sync::Arc;

use super::{Regularity, ScalarProfile};
use crate::expr::Expr;
use crate::quad::{CumulativeIntegral, GaussLegendre};
use crate::smooth;

/// Smooth profile given by an expression in `x`.
#[derive(Debug, Clone)]
pub struct ExprProfile {
    name: String,
    u: Expr,
    du: Expr,
    rule: GaussLegendre,
}

impl ExprProfile {
    pub fn new(name: &str, u: Expr) -> Self {
        let du = u.derivative();
        ExprProfile {
            name: name.to_string(),
            u,
            du,
            rule: GaussLegendre::new(12),
        }
    }
}

impl ScalarProfile for ExprProfile {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn eval(&self, y: f64) -> f64 {
        self.u.eval(y)
    }
    fn deriv(&self, y: f64) -> Option<f64> {
        let d = self.du.eval(y);
        d.is_finite().then_some(d)
    }
    fn phase(&self, y: f64) -> f64 {
        let panels = ((y.abs() / 0.25).ceil() as usize).max(1);
        self.rule.composite(|z| self.u.eval(z), 0.0, y, panels)
    }
    fn regularity(&self) -> Regularity {
        Regularity::Ck(u32::MAX)
    }
    fn satisfies_l_n1(&self) -> bool {
        true
    }
}

/// U(z) = z sin(ln|z|).
#[derive(Debug, Clone, Copy)]
pub struct LogOscillation;

impl ScalarProfile for LogOscillation {
    fn name(&self) -> String {
        "log_oscillation".into()
    }
    fn eval(&self, y: f64) -> f64 {
        if y == 0.0 {
            0.0
        } else {
            y * y.abs().ln().sin()
        }
    }
    fn deriv(&self, y: f64) -> Option<f64> {
        if y.abs() <= 1e-12 {
            None
        } else {
            let l = y.abs().ln();
            Some(l.sin() + l.cos())
        }
    }
    fn phase(&self, y: f64) -> f64 {
        if y == 0.0 {
            return 0.0;
        }
        let l = y.abs().ln();
        y * y * (2.0 * l.sin() - l.cos()) / 5.0
    }
    fn regularity(&self) -> Regularity {
        Regularity::Lipschitz
    }
    fn satisfies_l_n1(&self) -> bool {
        true
    }
    fn isolated_singularities(&self) -> Vec<f64> {
        vec![0.0]
    }
}

/// U(z) = −∫_0^z v with v = 1 on |z| ≤ ½, 0 < v < 1 on ½ < |z| < 1, v = 0 on |z| ≥ 1.
#[derive(Debug, Clone)]
pub struct BumpFocusing {
    // ∫_½^y v and ∫_½^y s v(s) ds on [½, 1].
    mass: CumulativeIntegral,
    moment: CumulativeIntegral,
}

impl Default for BumpFocusing {
    fn default() -> Self {
        Self::new()
    }
}

impl BumpFocusing {
    pub fn new() -> Self {
        let v = |s: f64| smooth::plateau(s, 0.5, 1.0);
        BumpFocusing {
            mass: CumulativeIntegral::new(Arc::new(v), 0.5, 1.0, 256, 10),
            moment: CumulativeIntegral::new(Arc::new(move |s| s * v(s)), 0.5, 1.0, 256, 10),
        }
    }

    pub fn plateau(&self, z: f64) -> f64 {
        smooth::plateau(z, 0.5, 1.0)
    }
}

impl ScalarProfile for BumpFocusing {
    fn name(&self) -> String {
        "bump_focusing".into()
    }
    fn eval(&self, y: f64) -> f64 {
        let a = y.abs();
        if a <= 0.5 {
            -y
        } else {
            -y.signum() * (0.5 + self.mass.at(a))
        }
    }
    fn deriv(&self, y: f64) -> Option<f64> {
        Some(-self.plateau(y))
    }
    fn phase(&self, y: f64) -> f64 {
        let a = y.abs();
        if a <= 0.5 {
            return -0.5 * y * y;
        }
        // S(a) = −1/8 − ½(a − ½) − a W(a) + ∫_½^a s v(s) ds with W(a) = ∫_½^a v.
        -0.125 - 0.5 * (a - 0.5) - a * self.mass.at(a) + self.moment.at(a)
    }
    fn regularity(&self) -> Regularity {
        Regularity::Ck(u32::MAX)
    }
    fn satisfies_l_n1(&self) -> bool {
        true
    }
}
