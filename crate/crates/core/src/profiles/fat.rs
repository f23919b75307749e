use std::sync::Arc;

use super::{ProfileError, Regularity, ScalarProfile};
use crate::quad::CumulativeIntegral;
use crate::smooth;

/// Shape of the finite-depth fat Cantor compact K ⊂ (0, 1).
///
/// K is [margin, 1 − margin] with `branching − 1` equal gaps removed from every
/// remaining interval at each of `levels` levels. Gap lengths shrink so that the
/// images of the level-j gaps under the time-one map occupy the fraction
/// `gap_image_fraction` of their parent cluster image; the total removed length
/// (margins excluded) is `removed`. A common amplitude on the interior gaps makes
/// F_1(K) span unit length, and each margin maps onto an interval of its own length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FatCantorLayout {
    pub margin: f64,
    pub branching: usize,
    pub gap_image_fraction: f64,
    pub levels: u32,
    pub removed: f64,
}

impl Default for FatCantorLayout {
    fn default() -> Self {
        FatCantorLayout {
            margin: 1.0 / 64.0,
            branching: 8,
            gap_image_fraction: 0.2,
            levels: 6,
            removed: 0.3,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Gap {
    a: f64,
    b: f64,
    amp: f64,
}

/// U(y) = ∫_0^y (g + h) − y where g is a sum of scaled bumps amp·w^k·φ on the gaps of K and
/// h vanishes exactly on [0, 1] and equals 1 outside [−1, 2].
#[derive(Debug, Clone)]
pub struct FatCantor {
    pub k: u32,
    gaps: Vec<Gap>,
    leaves: Vec<(f64, f64)>,
    prefix_mass: Vec<f64>,
    prefix_moment: Vec<f64>,
    bump_mass: CumulativeIntegral,
    bump_moment: CumulativeIntegral,
    step_mass: CumulativeIntegral,
    step_moment: CumulativeIntegral,
    measure_k: f64,
}

impl FatCantor {
    pub fn new(k: u32, layout: FatCantorLayout) -> Result<Self, ProfileError> {
        if k == 0 || k > 8 {
            return Err(ProfileError::BadParameter(format!(
                "smoothness index k must lie in 1..=8, got {k}"
            )));
        }
        let m = layout.branching;
        if m < 2 || layout.levels == 0 || !(0.0 < layout.gap_image_fraction && layout.gap_image_fraction < 1.0) {
            return Err(ProfileError::BadParameter("degenerate fat Cantor layout".into()));
        }
        let ratio = ((1.0 - layout.gap_image_fraction) / m as f64).powf(1.0 / (k as f64 + 1.0));
        let weight: f64 = (0..layout.levels)
            .map(|j| (m - 1) as f64 * (m as f64).powi(j as i32) * ratio.powi(j as i32))
            .sum();
        let first = layout.removed / weight;

        let mut intervals = vec![(layout.margin, 1.0 - layout.margin)];
        let mut gaps = vec![
            Gap {
                a: 0.0,
                b: layout.margin,
                amp: 1.0,
            },
            Gap {
                a: 1.0 - layout.margin,
                b: 1.0,
                amp: 1.0,
            },
        ];
        for j in 0..layout.levels {
            let gamma = first * ratio.powi(j as i32);
            let mut next = Vec::with_capacity(intervals.len() * m);
            for &(lo, hi) in &intervals {
                let piece = (hi - lo - (m - 1) as f64 * gamma) / m as f64;
                if piece <= 0.0 {
                    return Err(ProfileError::DepthExhausted { needed: 0.5 });
                }
                let mut x = lo;
                for i in 0..m {
                    next.push((x, x + piece));
                    x += piece;
                    if i + 1 < m {
                        gaps.push(Gap {
                            a: x,
                            b: x + gamma,
                            amp: 1.0,
                        });
                        x += gamma;
                    }
                }
            }
            intervals = next;
        }
        gaps.sort_by(|p, q| p.a.total_cmp(&q.a));
        let measure_k: f64 = intervals.iter().map(|(a, b)| b - a).sum();
        if measure_k <= 0.5 {
            return Err(ProfileError::DepthExhausted { needed: 0.5 });
        }

        let bump_mass = CumulativeIntegral::new(Arc::new(smooth::bump), -1.0, 1.0, 512, 10);
        let bump_moment = CumulativeIntegral::new(Arc::new(|v: f64| v * smooth::bump(v)), -1.0, 1.0, 512, 10);
        let step_mass = CumulativeIntegral::new(Arc::new(smooth::step), 0.0, 1.0, 256, 10);
        let step_moment = CumulativeIntegral::new(Arc::new(|s: f64| s * smooth::step(s)), 0.0, 1.0, 256, 10);
        let total_bump = bump_mass.total();
        let raw = |g: &Gap| (g.b - g.a).powi(k as i32 + 1) * 0.5 * total_bump;
        let is_margin = |g: &Gap| g.a == 0.0 || g.b == 1.0;
        let interior: f64 = gaps.iter().filter(|g| !is_margin(g)).map(raw).sum();
        for g in gaps.iter_mut() {
            g.amp = if is_margin(g) {
                (g.b - g.a) / raw(g)
            } else {
                1.0 / interior
            };
        }
        let mut prefix_mass = Vec::with_capacity(gaps.len() + 1);
        let mut prefix_moment = Vec::with_capacity(gaps.len() + 1);
        let (mut pm, mut pq) = (0.0, 0.0);
        prefix_mass.push(0.0);
        prefix_moment.push(0.0);
        for g in &gaps {
            let w = g.b - g.a;
            let mass = g.amp * w.powi(k as i32 + 1) * 0.5 * total_bump;
            pm += mass;
            // The bump is even, so the first moment sits at the gap midpoint.
            pq += mass * 0.5 * (g.a + g.b);
            prefix_mass.push(pm);
            prefix_moment.push(pq);
        }
        Ok(FatCantor {
            k,
            gaps,
            leaves: intervals,
            prefix_mass,
            prefix_moment,
            bump_mass,
            bump_moment,
            step_mass,
            step_moment,
            measure_k,
        })
    }

    /// L¹(K) at the working depth.
    pub fn measure_k(&self) -> f64 {
        self.measure_k
    }

    /// Remaining closed intervals whose union is K.
    pub fn leaves(&self) -> &[(f64, f64)] {
        &self.leaves
    }

    pub fn gap_count(&self) -> usize {
        self.gaps.len()
    }

    pub fn in_k(&self, y: f64) -> bool {
        if !(0.0..=1.0).contains(&y) {
            return false;
        }
        self.containing_gap(y).is_none()
    }

    fn containing_gap(&self, y: f64) -> Option<usize> {
        let i = self.gaps.partition_point(|g| g.a < y);
        if i == 0 {
            return None;
        }
        let g = self.gaps[i - 1];
        (y < g.b).then_some(i - 1)
    }

    fn g(&self, y: f64) -> f64 {
        match self.containing_gap(y) {
            Some(i) => {
                let Gap { a, b, amp } = self.gaps[i];
                let w = b - a;
                amp * w.powi(self.k as i32) * smooth::bump((2.0 * y - a - b) / w)
            }
            None => 0.0,
        }
    }

    fn h(&self, y: f64) -> f64 {
        if y < 0.0 {
            smooth::step(-y)
        } else if y > 1.0 {
            smooth::step(y - 1.0)
        } else {
            0.0
        }
    }

    /// (∫_0^y g, ∫_0^y s g(s) ds) for y ∈ [0, 1].
    fn g_integrals(&self, y: f64) -> (f64, f64) {
        let i = self.gaps.partition_point(|g| g.a < y);
        if i == 0 {
            return (0.0, 0.0);
        }
        let g = self.gaps[i - 1];
        if y >= g.b {
            return (self.prefix_mass[i], self.prefix_moment[i]);
        }
        let w = g.b - g.a;
        let u = (2.0 * y - g.a - g.b) / w;
        let scale = g.amp * w.powi(self.k as i32 + 1) * 0.5;
        let mass = scale * self.bump_mass.at(u);
        let moment = scale * (0.5 * (g.a + g.b) * self.bump_mass.at(u) + 0.5 * w * self.bump_moment.at(u));
        (self.prefix_mass[i - 1] + mass, self.prefix_moment[i - 1] + moment)
    }

    fn step_integrals(&self, u: f64) -> (f64, f64) {
        if u <= 1.0 {
            (self.step_mass.at(u), self.step_moment.at(u))
        } else {
            (
                self.step_mass.total() + (u - 1.0),
                self.step_moment.total() + 0.5 * (u * u - 1.0),
            )
        }
    }

    /// (F_1(y), ∫_0^y s f(s) ds) with F_1 = ∫_0^y f.
    fn integrals(&self, y: f64) -> (f64, f64) {
        if y < 0.0 {
            let (m, q) = self.step_integrals(-y);
            (-m, q)
        } else if y <= 1.0 {
            self.g_integrals(y)
        } else {
            let total = self.g_integrals(1.0);
            let (m, q) = self.step_integrals(y - 1.0);
            (total.0 + m, total.1 + q + m)
        }
    }

    /// Time-one map F_1(y) = ∫_0^y f.
    pub fn time_one(&self, y: f64) -> f64 {
        self.integrals(y).0
    }
}

impl ScalarProfile for FatCantor {
    fn name(&self) -> String {
        format!("fat_cantor_c{}", self.k)
    }
    fn eval(&self, y: f64) -> f64 {
        self.time_one(y) - y
    }
    fn deriv(&self, y: f64) -> Option<f64> {
        Some(self.g(y) + self.h(y) - 1.0)
    }
    fn nondiff(&self, _y: f64) -> bool {
        false
    }
    fn phase(&self, y: f64) -> f64 {
        let (f1, moment) = self.integrals(y);
        y * f1 - moment - 0.5 * y * y
    }
    fn regularity(&self) -> Regularity {
        Regularity::Ck(self.k)
    }
    fn satisfies_l_n1(&self) -> bool {
        true
    }
    fn unresolved_leaf(&self, y: f64) -> Option<(f64, f64)> {
        let i = self.leaves.partition_point(|l| l.0 <= y);
        let leaf = *self.leaves.get(i.checked_sub(1)?)?;
        (y <= leaf.1).then_some(leaf)
    }
    fn unresolved_leaves_in(&self, lo: f64, hi: f64) -> Vec<(f64, f64)> {
        let start = self.leaves.partition_point(|l| l.1 < lo);
        let end = self.leaves.partition_point(|l| l.0 <= hi);
        self.leaves[start..end.max(start)].to_vec()
    }
}
