//! Fixed-order Gauss–Legendre quadrature and cumulative integral tables.

use std::f64::consts::PI;
use std::sync::Arc;

/// Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the n-point rule by Newton iteration on the Legendre polynomial.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = x;
            nodes[n - 1 - i] = -x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes on [−1, 1].
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integral of `f` over [a, b].
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }

    /// Composite rule over `panels` equal panels of [a, b].
    pub fn composite<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64, panels: usize) -> f64 {
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|p| {
                let lo = a + h * p as f64;
                self.integrate(&f, lo, lo + h)
            })
            .sum()
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Table of y ↦ ∫_a^y f for y in [a, b], exact to the rule's order on each panel.
///
/// Outside [a, b] the value is clamped to the endpoint integrals.
#[derive(Clone)]
pub struct CumulativeIntegral {
    f: ScalarFn,
    a: f64,
    b: f64,
    width: f64,
    cum: Vec<f64>,
    rule: GaussLegendre,
}

impl std::fmt::Debug for CumulativeIntegral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CumulativeIntegral")
            .field("a", &self.a)
            .field("b", &self.b)
            .field("panels", &(self.cum.len() - 1))
            .finish()
    }
}

impl CumulativeIntegral {
    pub fn new(f: ScalarFn, a: f64, b: f64, panels: usize, order: usize) -> Self {
        assert!(b > a && panels > 0);
        let rule = GaussLegendre::new(order);
        let width = (b - a) / panels as f64;
        let mut cum = Vec::with_capacity(panels + 1);
        cum.push(0.0);
        let mut acc = 0.0;
        for p in 0..panels {
            let lo = a + width * p as f64;
            acc += rule.integrate(&*f, lo, lo + width);
            cum.push(acc);
        }
        CumulativeIntegral {
            f,
            a,
            b,
            width,
            cum,
            rule,
        }
    }

    pub fn total(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    pub fn at(&self, y: f64) -> f64 {
        if y <= self.a {
            return 0.0;
        }
        if y >= self.b {
            return self.total();
        }
        let panels = self.cum.len() - 1;
        let p = (((y - self.a) / self.width) as usize).min(panels - 1);
        let lo = self.a + self.width * p as f64;
        if y == lo {
            return self.cum[p];
        }
        self.cum[p] + self.rule.integrate(&*self.f, lo, y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let gl = GaussLegendre::new(8);
        // Degree 15 is the exactness limit of an 8-point rule.
        let v = gl.integrate(|x| x.powi(14) + 3.0 * x.powi(3), -1.0, 1.0);
        assert!((v - 2.0 / 15.0).abs() < 1e-14);
        let w: f64 = gl.weights.iter().sum();
        assert!((w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn cumulative_matches_closed_form() {
        let c = CumulativeIntegral::new(Arc::new(|x: f64| x.cos()), 0.0, 3.0, 64, 8);
        for &y in &[0.0f64, 0.1, 1.234, 2.999, 3.0, 5.0] {
            let want = y.min(3.0).sin();
            assert!((c.at(y) - want).abs() < 1e-14, "y={y}");
        }
        assert_eq!(c.at(-1.0), 0.0);
    }
}
