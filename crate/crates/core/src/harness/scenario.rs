//! JSON scenario schema, validation and construction of the model objects.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::expr::Expr;
use crate::flow::{HamiltonianSystem, IntegratorOptions, SampledPotential};
use crate::profiles::{
    profile_bump_focusing, profile_cantor_bv, profile_log_oscillation, profile_neg_sin, profile_zero, ExprProfile,
    FatCantor, FatCantorLayout, MomentumProfile, ThetaCantor,
};
use crate::quad::ScalarFn;
use crate::smooth;
use crate::transport::MonokineticMeasure;

pub const PROFILE_IDS: &[&str] = &[
    "neg_sin",
    "zero",
    "log_oscillation",
    "cantor_bv",
    "bump_focusing",
    "fat_cantor",
    "theta_cantor",
    "expr",
];

/// Structural intervals enumerated per profile are capped at this count.
const MAX_PIECES: usize = 8192;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum HamiltonianSpec {
    Free,
    Harmonic,
    /// H = ½ξ² + V(x) with V an expression in `x`.
    Potential {
        v: String,
        kappa: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        h: Option<String>,
    },
    /// H = ½ξ² + V(x) with V splined through the samples.
    Samples {
        x: Vec<f64>,
        v: Vec<f64>,
        kappa: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    NegSin,
    Zero,
    LogOscillation,
    CantorBv { depth: u32 },
    BumpFocusing,
    FatCantor { k: u32 },
    ThetaCantor { theta: f64, depth: u32 },
    Expr { u: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DensitySpec {
    Uniform {
        support: [f64; 2],
    },
    /// bump((y − center)/half_width) on (center − half_width, center + half_width).
    Bump {
        center: f64,
        half_width: f64,
    },
    Expr {
        expr: String,
        support: [f64; 2],
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        breakpoints: Vec<f64>,
    },
    /// Indicator of the compact carried by a fat or theta Cantor profile.
    ProfileSet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObservableSpec {
    /// e^{−((x − center)/width)²}.
    Gaussian {
        center: f64,
        width: f64,
    },
    /// Smooth plateau: 1 on |x − center| ≤ inner, 0 beyond outer.
    Plateau {
        center: f64,
        inner: f64,
        outer: f64,
    },
    /// 1 on [lo, hi].
    Indicator {
        lo: f64,
        hi: f64,
    },
    Expr {
        expr: String,
    },
}

impl ObservableSpec {
    pub fn label(&self) -> String {
        match self {
            ObservableSpec::Gaussian { center, width } => format!("gaussian({center};{width})"),
            ObservableSpec::Plateau { center, inner, outer } => format!("plateau({center};{inner};{outer})"),
            ObservableSpec::Indicator { lo, hi } => format!("indicator({lo};{hi})"),
            ObservableSpec::Expr { expr } => format!("expr({expr})"),
        }
    }

    pub fn build(&self) -> Result<ScalarFn, HarnessError> {
        Ok(match *self {
            ObservableSpec::Gaussian { center, width } => {
                Arc::new(move |x: f64| (-((x - center) / width).powi(2)).exp())
            }
            ObservableSpec::Plateau { center, inner, outer } => {
                Arc::new(move |x: f64| smooth::plateau(x - center, inner, outer))
            }
            ObservableSpec::Indicator { lo, hi } => Arc::new(move |x: f64| if x >= lo && x <= hi { 1.0 } else { 0.0 }),
            ObservableSpec::Expr { ref expr } => {
                let e = parse_expr("quantum.observables.expr", expr)?;
                Arc::new(move |x: f64| e.eval(x))
            }
        })
    }
}

fn default_quantum_grid() -> usize {
    16384
}

fn default_window_factor() -> f64 {
    4.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumSpec {
    /// Positive and strictly decreasing.
    pub eps: Vec<f64>,
    pub observables: Vec<ObservableSpec>,
    #[serde(default = "default_quantum_grid")]
    pub grid_points: usize,
    /// The periodic window is this multiple of the classical span.
    #[serde(default = "default_window_factor")]
    pub window_factor: f64,
    /// Strang steps per unit time when a potential is present.
    #[serde(default = "default_steps")]
    pub steps_per_unit_time: usize,
}

fn default_steps() -> usize {
    1000
}

fn default_x_points() -> usize {
    1024
}

fn default_grid_points() -> usize {
    4096
}

fn default_bins() -> usize {
    2048
}

fn default_panels() -> usize {
    4096
}

fn default_order() -> usize {
    4
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSpec {
    pub rtol: f64,
    pub atol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub hamiltonian: HamiltonianSpec,
    pub profile: ProfileSpec,
    pub density: DensitySpec,
    pub times: Vec<f64>,
    /// x-range of the fold-count table.
    pub x_window: [f64; 2],
    #[serde(default = "default_x_points")]
    pub x_points: usize,
    /// y-range searched for preimages; defaults to the support of ρ^in.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_window: Option<[f64; 2]>,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    #[serde(default = "default_bins")]
    pub bins: usize,
    /// Histogram window; defaults to the padded image of the support.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density_window: Option<[f64; 2]>,
    #[serde(default = "default_panels")]
    pub panels: usize,
    #[serde(default = "default_order")]
    pub order: usize,
    /// Extra atom candidates on top of the automatically generated ones.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub atom_candidates: Vec<f64>,
    /// x-points at which the momentum disintegration is tabulated.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub disintegration: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integrator: Option<IntegratorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantum: Option<QuantumSpec>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
}

fn parse_expr(field: &str, src: &str) -> Result<Expr, HarnessError> {
    Expr::parse(src).map_err(|e| HarnessError::invalid(field, e.to_string()))
}

fn check(cond: bool, field: &str, message: &str) -> Result<(), HarnessError> {
    if cond {
        Ok(())
    } else {
        Err(HarnessError::invalid(field, message))
    }
}

fn check_interval(field: &str, w: [f64; 2]) -> Result<(), HarnessError> {
    check(
        w[0].is_finite() && w[1].is_finite() && w[0] < w[1],
        field,
        "must be a finite interval [lo, hi] with lo < hi",
    )
}

impl Scenario {
    /// Parses and validates scenario JSON. Syntax and schema errors carry line
    /// and column; unknown profile identifiers are reported by name.
    pub fn from_json(text: &str) -> Result<Scenario, HarnessError> {
        let parse = |e: serde_json::Error| HarnessError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        };
        let raw: serde_json::Value = serde_json::from_str(text).map_err(parse)?;
        if let Some(id) = raw.get("profile").and_then(|p| p.get("id")).and_then(|v| v.as_str()) {
            if !PROFILE_IDS.contains(&id) {
                return Err(HarnessError::UnknownProfile(id.to_string()));
            }
        }
        let sc: Scenario = serde_json::from_str(text).map_err(parse)?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// Replaces the truncation depth of Cantor-type profiles.
    pub fn with_depth(mut self, depth: u32) -> Scenario {
        match &mut self.profile {
            ProfileSpec::CantorBv { depth: d } | ProfileSpec::ThetaCantor { depth: d, .. } => *d = depth,
            _ => {}
        }
        self
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        check(!self.name.trim().is_empty(), "name", "must not be empty")?;
        check(!self.times.is_empty(), "times", "must list at least one time")?;
        check(self.times.iter().all(|t| t.is_finite()), "times", "must be finite")?;
        check_interval("x_window", self.x_window)?;
        if let Some(w) = self.y_window {
            check_interval("y_window", w)?;
        }
        if let Some(w) = self.density_window {
            check_interval("density_window", w)?;
        }
        check(self.x_points >= 2, "x_points", "must be at least 2")?;
        check(self.grid_points >= 16, "grid_points", "must be at least 16")?;
        check(self.bins >= 1, "bins", "must be positive")?;
        check(self.panels >= 1, "panels", "must be positive")?;
        check((1..=32).contains(&self.order), "order", "must lie in 1..=32")?;
        check(
            self.atom_candidates
                .iter()
                .chain(&self.disintegration)
                .all(|v| v.is_finite()),
            "atom_candidates",
            "must be finite",
        )?;
        if let Some(i) = self.integrator {
            check(
                i.rtol > 0.0 && i.atol > 0.0,
                "integrator",
                "tolerances must be positive",
            )?;
        }
        match &self.hamiltonian {
            HamiltonianSpec::Potential { v, kappa, h } => {
                parse_expr("hamiltonian.v", v)?;
                if let Some(h) = h {
                    parse_expr("hamiltonian.h", h)?;
                }
                check(
                    kappa.is_finite() && *kappa > 0.0,
                    "hamiltonian.kappa",
                    "must be positive",
                )?;
            }
            HamiltonianSpec::Samples { x, v, kappa } => {
                SampledPotential::new(x.clone(), v.clone()).map_err(|m| HarnessError::invalid("hamiltonian", m))?;
                check(
                    kappa.is_finite() && *kappa > 0.0,
                    "hamiltonian.kappa",
                    "must be positive",
                )?;
            }
            HamiltonianSpec::Free | HamiltonianSpec::Harmonic => {}
        }
        match &self.profile {
            ProfileSpec::CantorBv { depth } => check((1..=30).contains(depth), "profile.depth", "must lie in 1..=30")?,
            ProfileSpec::FatCantor { k } => check(*k >= 1, "profile.k", "must be at least 1")?,
            ProfileSpec::ThetaCantor { theta, depth } => {
                check(*theta > 0.0 && *theta < 0.5, "profile.theta", "must lie in (0, 1/2)")?;
                check((1..=24).contains(depth), "profile.depth", "must lie in 1..=24")?;
            }
            ProfileSpec::Expr { u } => {
                parse_expr("profile.u", u)?;
            }
            _ => {}
        }
        match &self.density {
            DensitySpec::Uniform { support } => check_interval("density.support", *support)?,
            DensitySpec::Bump { center, half_width } => check(
                center.is_finite() && half_width.is_finite() && *half_width > 0.0,
                "density",
                "bump needs a finite center and positive half_width",
            )?,
            DensitySpec::Expr { expr, support, .. } => {
                parse_expr("density.expr", expr)?;
                check_interval("density.support", *support)?;
            }
            DensitySpec::ProfileSet => check(
                matches!(
                    self.profile,
                    ProfileSpec::FatCantor { .. } | ProfileSpec::ThetaCantor { .. }
                ),
                "density",
                "profile_set needs a fat_cantor or theta_cantor profile",
            )?,
        }
        if let Some(q) = &self.quantum {
            check(!q.eps.is_empty(), "quantum.eps", "must list at least one value")?;
            check(
                q.eps.iter().all(|e| e.is_finite() && *e > 0.0),
                "quantum.eps",
                "must be positive",
            )?;
            check(
                q.eps.windows(2).all(|w| w[1] < w[0]),
                "quantum.eps",
                "must be strictly decreasing",
            )?;
            check(!q.observables.is_empty(), "quantum.observables", "must not be empty")?;
            for o in &q.observables {
                o.build()?;
            }
            check(
                q.grid_points >= 8 && q.grid_points % 2 == 0,
                "quantum.grid_points",
                "must be even and at least 8",
            )?;
            check(q.window_factor >= 1.0, "quantum.window_factor", "must be at least 1")?;
            check(
                q.steps_per_unit_time >= 1,
                "quantum.steps_per_unit_time",
                "must be positive",
            )?;
        }
        Ok(())
    }

    /// Builds the system, profile and initial measure.
    pub fn build(&self) -> Result<BuiltScenario, HarnessError> {
        self.validate()?;
        let sys = match &self.hamiltonian {
            HamiltonianSpec::Free => HamiltonianSystem::free(1),
            HamiltonianSpec::Harmonic => HamiltonianSystem::harmonic(1),
            HamiltonianSpec::Potential { v, kappa, h } => HamiltonianSystem::potential(
                parse_expr("hamiltonian.v", v)?,
                *kappa,
                h.as_deref().map(|h| parse_expr("hamiltonian.h", h)).transpose()?,
            ),
            HamiltonianSpec::Samples { x, v, kappa } => HamiltonianSystem::sampled(
                SampledPotential::new(x.clone(), v.clone()).map_err(|m| HarnessError::invalid("hamiltonian", m))?,
                *kappa,
                None,
            ),
        };
        let bad = |e: crate::profiles::ProfileError| HarnessError::invalid("profile", e.to_string());
        let mut pieces = Vec::new();
        let mut set: Option<(ScalarFn, Vec<f64>)> = None;
        let profile = match &self.profile {
            ProfileSpec::NegSin => profile_neg_sin(),
            ProfileSpec::Zero => profile_zero(),
            ProfileSpec::LogOscillation => profile_log_oscillation(),
            ProfileSpec::BumpFocusing => {
                pieces.push((-0.5, 0.5));
                profile_bump_focusing()
            }
            ProfileSpec::CantorBv { depth } => {
                pieces = cantor_pieces(*depth);
                profile_cantor_bv(*depth)
            }
            ProfileSpec::FatCantor { k } => {
                let fat = FatCantor::new(*k, FatCantorLayout::default()).map_err(bad)?;
                let leaves = fat.leaves();
                let stride = leaves.len().div_ceil(MAX_PIECES).max(1);
                pieces = leaves.iter().copied().step_by(stride).collect();
                let bps: Vec<f64> = leaves.iter().flat_map(|&(a, b)| [a, b]).collect();
                let q = fat.clone();
                set = Some((Arc::new(move |y| if q.in_k(y) { 1.0 } else { 0.0 }), bps));
                MomentumProfile::new(fat)
            }
            ProfileSpec::ThetaCantor { theta, depth } => {
                let p = ThetaCantor::new(*theta, *depth).map_err(bad)?;
                let tree = p.tree(*depth);
                let mut bps = Vec::new();
                for (m, centers) in tree.levels.iter().enumerate() {
                    let r = tree.radius(m as u32 + 1);
                    for &a in centers {
                        bps.extend([a - r, a - theta * r, a + theta * r, a + r]);
                        pieces.push((a - r, a - theta * r));
                        pieces.push((a + theta * r, a + r));
                    }
                }
                for (lo, hi) in tree.leaves() {
                    bps.extend([lo, hi]);
                    pieces.push((lo, hi));
                }
                let q = p.clone();
                set = Some((Arc::new(move |y| q.complement_indicator(y)), bps));
                MomentumProfile::new(p)
            }
            ProfileSpec::Expr { u } => MomentumProfile::new(ExprProfile::new("expr", parse_expr("profile.u", u)?)),
        };
        let measure_err = |e: crate::transport::TransportError| HarnessError::invalid("density", e.to_string());
        let mu = match &self.density {
            DensitySpec::Uniform { support } => {
                MonokineticMeasure::new(profile.clone(), Arc::new(|_| 1.0), (support[0], support[1]), &[])
            }
            DensitySpec::Bump { center, half_width } => {
                let (c, h) = (*center, *half_width);
                MonokineticMeasure::new(
                    profile.clone(),
                    Arc::new(move |y| smooth::bump((y - c) / h)),
                    (c - h, c + h),
                    &[],
                )
            }
            DensitySpec::Expr {
                expr,
                support,
                breakpoints,
            } => {
                let e = parse_expr("density.expr", expr)?;
                MonokineticMeasure::new(
                    profile.clone(),
                    Arc::new(move |y| e.eval(y)),
                    (support[0], support[1]),
                    breakpoints,
                )
            }
            DensitySpec::ProfileSet => {
                let (f, bps) = set.expect("validated");
                MonokineticMeasure::new(profile.clone(), f, (0.0, 1.0), &bps)
            }
        }
        .map_err(measure_err)?;
        let opts = match self.integrator {
            Some(i) => IntegratorOptions {
                rtol: i.rtol,
                atol: i.atol,
                ..IntegratorOptions::default()
            },
            None => IntegratorOptions::default(),
        };
        Ok(BuiltScenario { sys, mu, opts, pieces })
    }
}

/// Gaps of levels 1..=depth and the leaves of the ternary construction, capped at
/// [`MAX_PIECES`] by lowering the enumerated depth.
fn cantor_pieces(depth: u32) -> Vec<(f64, f64)> {
    let mut levels = depth;
    while levels > 1 && (1usize << levels) * 2 > MAX_PIECES {
        levels -= 1;
    }
    let mut cur = vec![0.0f64];
    let mut out = Vec::new();
    let mut len = 1.0;
    for _ in 0..levels {
        let third = len / 3.0;
        let mut next = Vec::with_capacity(2 * cur.len());
        for &a in &cur {
            out.push((a + third, a + 2.0 * third));
            next.extend([a, a + 2.0 * third]);
        }
        cur = next;
        len = third;
    }
    if levels == depth {
        out.extend(cur.iter().map(|&a| (a, a + len)));
    }
    out.sort_by(|p, q| p.0.total_cmp(&q.0));
    out
}

/// Model objects of a validated scenario.
pub struct BuiltScenario {
    pub sys: HamiltonianSystem,
    pub mu: MonokineticMeasure,
    pub opts: IntegratorOptions,
    /// Intervals on which the profile has constant slope; their images are atom candidates.
    pub pieces: Vec<(f64, f64)>,
}
