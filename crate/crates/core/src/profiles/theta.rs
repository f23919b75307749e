use super::{ProfileError, Regularity, ScalarProfile};

const RESOLUTION: f64 = 1e-12;

/// Centers a_{m,k} and radii r_m of the θ-Cantor gap tree.
///
/// Level m has 2^{m−1} gaps I_{m,k} = (a − r_m, a + r_m) with r_m = ½(1 − 2θ)θ^{m−1};
/// the open core J_{m,k} = (a − θr_m, a + θr_m) carries slope 1/θ of the time-one map.
#[derive(Debug, Clone)]
pub struct ThetaTree {
    pub theta: f64,
    pub depth: u32,
    /// `levels[m - 1][k - 1]` = a_{m,k}, sorted increasingly within each level.
    pub levels: Vec<Vec<f64>>,
}

impl ThetaTree {
    /// Panics if `depth` exceeds 24; the tree holds 2^depth centers.
    pub fn new(theta: f64, depth: u32) -> Self {
        assert!(depth <= 24, "theta tree depth {depth} exceeds 24");
        let mut levels: Vec<Vec<f64>> = vec![vec![0.5]];
        for m in 1..depth as usize {
            let prev = &levels[m - 1];
            let half = prev.len();
            let mut next = vec![0.0; 2 * half];
            for k in 0..half {
                next[k] = theta * prev[k];
            }
            for k in half..2 * half {
                next[k] = 1.0 - next[2 * half - 1 - k];
            }
            levels.push(next);
        }
        ThetaTree { theta, depth, levels }
    }

    pub fn radius(&self, m: u32) -> f64 {
        0.5 * (1.0 - 2.0 * self.theta) * self.theta.powi(m as i32 - 1)
    }

    /// Predicted atoms (a_{m,k} ± r_m, r_m) of the time-one density, level by level.
    pub fn predicted_atoms(&self) -> Vec<(u32, f64, f64)> {
        let mut out = Vec::new();
        for (i, centers) in self.levels.iter().enumerate() {
            let m = i as u32 + 1;
            let r = self.radius(m);
            for &a in centers {
                out.push((m, a - r, r));
                out.push((m, a + r, r));
            }
        }
        out
    }

    /// Unresolved leaf intervals [lo, lo + θ^depth] of the depth-truncated construction.
    pub fn leaves(&self) -> Vec<(f64, f64)> {
        let mut cur = vec![(0.0f64, 1.0f64)];
        for _ in 0..self.depth {
            let mut next = Vec::with_capacity(cur.len() * 2);
            for &(lo, len) in &cur {
                next.push((lo, len * self.theta));
                next.push((lo + (1.0 - self.theta) * len, len * self.theta));
            }
            cur = next;
        }
        cur.into_iter().map(|(lo, len)| (lo, lo + len)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Place {
    Core,
    Annulus,
    Boundary,
    Leaf(f64, f64),
}

/// U(y) = (1/θ) L¹(Ω(θ) ∩ (0, y)) − y on [0, 1], 0 elsewhere.
///
/// The time-one map is exact down to `depth` levels and constant on the leaves,
/// so its truncation error is at most θ^depth.
#[derive(Debug, Clone)]
pub struct ThetaCantor {
    pub theta: f64,
    pub depth: u32,
    core_lo: f64,
    core_w: f64,
}

impl ThetaCantor {
    pub fn new(theta: f64, depth: u32) -> Result<Self, ProfileError> {
        if !(theta > 0.0 && theta < 0.5) {
            return Err(ProfileError::BadParameter(format!(
                "theta must lie in (0, 1/2), got {theta}"
            )));
        }
        if depth == 0 || depth > 40 {
            return Err(ProfileError::BadParameter(format!(
                "theta-tree depth must lie in 1..=40, got {depth}"
            )));
        }
        let r1 = 0.5 * (1.0 - 2.0 * theta);
        Ok(ThetaCantor {
            theta,
            depth,
            core_lo: 0.5 - theta * r1,
            core_w: 2.0 * theta * r1,
        })
    }

    /// Gap tree down to `levels` (at most 24).
    pub fn tree(&self, levels: u32) -> ThetaTree {
        ThetaTree::new(self.theta, levels)
    }

    /// (L¹(Ω ∩ (0, y)), ∫_0^y L¹(Ω ∩ (0, z)) dz, placement) for y ∈ [0, 1].
    fn walk(&self, y: f64) -> (f64, f64, Place) {
        let th = self.theta;
        let (jl, w) = (self.core_lo, self.core_w);
        let qu_one = 0.5 * th;
        let mid = |f: f64| {
            let u = f - jl;
            if u <= 0.0 {
                0.0
            } else if u <= w {
                0.5 * u * u
            } else {
                0.5 * w * w + w * (u - w)
            }
        };
        let qu_right = th * th * qu_one + th * th * (1.0 - 2.0 * th) + mid(1.0 - th);
        let (mut lo, mut len, mut base, mut q) = (0.0f64, 1.0f64, 0.0f64, 0.0f64);
        for _ in 0..self.depth {
            let f = (y - lo) / len;
            if f <= th {
                len *= th;
                continue;
            }
            if f >= 1.0 - th {
                q += base * (1.0 - th) * len + len * len * qu_right;
                base += len * (th - th * th);
                lo += (1.0 - th) * len;
                len *= th;
                continue;
            }
            let l_unit = th * th + (f - jl).clamp(0.0, w);
            let q_unit = th * th * qu_one + th * th * (f - th) + mid(f);
            let measure = base + len * l_unit;
            let integral = q + base * f * len + len * len * q_unit;
            let edges = [th, jl, jl + w, 1.0 - th];
            let dist = edges
                .iter()
                .map(|e| ((f - e) * len).abs())
                .fold(f64::INFINITY, f64::min);
            let place = if dist <= RESOLUTION {
                Place::Boundary
            } else if f > jl && f < jl + w {
                Place::Core
            } else {
                Place::Annulus
            };
            return (measure, integral, place);
        }
        (base, q + base * (y - lo), Place::Leaf(lo, lo + len))
    }

    /// Time-one map F_1 = y + U(y).
    pub fn time_one(&self, y: f64) -> f64 {
        y + self.eval(y)
    }

    /// Indicator of [0, 1] \ Ω(θ); unresolved leaves carry their average 1 − θ.
    pub fn complement_indicator(&self, y: f64) -> f64 {
        if !(0.0..=1.0).contains(&y) {
            return 0.0;
        }
        match self.walk(y).2 {
            Place::Core => 0.0,
            Place::Annulus | Place::Boundary => 1.0,
            Place::Leaf(..) => 1.0 - self.theta,
        }
    }

    /// True when y lies in the open cores Ω(θ) resolved at the working depth.
    pub fn in_core(&self, y: f64) -> bool {
        (0.0..=1.0).contains(&y) && self.walk(y).2 == Place::Core
    }
}

impl ScalarProfile for ThetaCantor {
    fn name(&self) -> String {
        format!("theta_cantor_{}", self.theta)
    }
    fn eval(&self, y: f64) -> f64 {
        if !(0.0..=1.0).contains(&y) {
            return 0.0;
        }
        self.walk(y).0 / self.theta - y
    }
    fn deriv(&self, y: f64) -> Option<f64> {
        if y.abs() <= RESOLUTION || (y - 1.0).abs() <= RESOLUTION {
            return None;
        }
        if !(0.0..=1.0).contains(&y) {
            return Some(0.0);
        }
        match self.walk(y).2 {
            Place::Core => Some(1.0 / self.theta - 1.0),
            Place::Annulus => Some(-1.0),
            Place::Boundary | Place::Leaf(..) => None,
        }
    }
    fn phase(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        let z = y.min(1.0);
        self.walk(z).1 / self.theta - 0.5 * z * z
    }
    fn regularity(&self) -> Regularity {
        Regularity::Lipschitz
    }
    fn unresolved_leaf(&self, y: f64) -> Option<(f64, f64)> {
        if !(0.0..=1.0).contains(&y) {
            return None;
        }
        match self.walk(y).2 {
            Place::Leaf(lo, hi) => Some((lo, hi)),
            _ => None,
        }
    }
    fn satisfies_l_n1(&self) -> bool {
        true
    }
}
