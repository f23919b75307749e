//! Built-in scenarios: the four singular examples and two smooth baselines.

use std::f64::consts::FRAC_PI_4;

use super::scenario::{DensitySpec, HamiltonianSpec, ObservableSpec, ProfileSpec, QuantumSpec, Scenario};

const NAMES: &[&str] = &[
    "example_3_1",
    "example_3_2",
    "example_3_3",
    "example_3_4_theta_0.25",
    "harmonic_focusing",
    "free_neg_sin",
];

pub fn builtin_names() -> &'static [&'static str] {
    NAMES
}

fn base(
    name: &str,
    description: &str,
    hamiltonian: HamiltonianSpec,
    profile: ProfileSpec,
    density: DensitySpec,
    times: Vec<f64>,
    x_window: [f64; 2],
) -> Scenario {
    Scenario {
        name: name.to_string(),
        description: description.to_string(),
        hamiltonian,
        profile,
        density,
        times,
        x_window,
        x_points: 1024,
        y_window: None,
        grid_points: 4096,
        bins: 2048,
        density_window: None,
        panels: 4096,
        order: 4,
        atom_candidates: Vec::new(),
        disintegration: Vec::new(),
        integrator: None,
        quantum: None,
        seed: 0,
        output_dir: None,
    }
}

const EPS_SWEEP: [f64; 4] = [0.1, 0.05, 0.025, 0.0125];

pub fn builtin(name: &str) -> Option<Scenario> {
    let sc = match name {
        "example_3_1" => base(
            name,
            "Cantor-function profile under free flow: the caustic at t = 1 fills [0, 1]",
            HamiltonianSpec::Free,
            ProfileSpec::CantorBv { depth: 12 },
            DensitySpec::Uniform { support: [0.0, 1.0] },
            vec![0.5, 1.0],
            [-0.1, 1.1],
        ),
        "example_3_2" => {
            let mut sc = base(
                name,
                "Smooth focusing profile: the whole mass collapses onto x = 0 at t = 1",
                HamiltonianSpec::Free,
                ProfileSpec::BumpFocusing,
                DensitySpec::Bump {
                    center: 0.0,
                    half_width: 0.5,
                },
                vec![0.5, 1.0],
                [-1.0, 1.0],
            );
            sc.density_window = Some([-1.0, 1.0]);
            sc.quantum = Some(QuantumSpec {
                eps: EPS_SWEEP.to_vec(),
                observables: vec![ObservableSpec::Indicator { lo: -0.1, hi: 0.1 }],
                grid_points: 16384,
                window_factor: 16.0,
                steps_per_unit_time: 1000,
            });
            sc
        }
        "example_3_3" => {
            let mut sc = base(
                name,
                "Fat Cantor profile with density on the compact: diffuse singular image at t = 1",
                HamiltonianSpec::Free,
                ProfileSpec::FatCantor { k: 2 },
                DensitySpec::ProfileSet,
                vec![1.0],
                [0.0, 1.05],
            );
            sc.panels = 1;
            sc.order = 2;
            sc
        }
        "example_3_4_theta_0.25" => {
            let mut sc = base(
                name,
                "Theta-tree profile with theta = 1/4: countably many atoms at t = 1",
                HamiltonianSpec::Free,
                ProfileSpec::ThetaCantor { theta: 0.25, depth: 10 },
                DensitySpec::ProfileSet,
                vec![1.0],
                [0.0, 1.0],
            );
            sc.bins = 4096;
            sc
        }
        "harmonic_focusing" => {
            let mut sc = base(
                name,
                "Harmonic oscillator with U = -y: all rays meet at x = 0 when t = pi/4",
                HamiltonianSpec::Harmonic,
                ProfileSpec::Expr { u: "-x".into() },
                DensitySpec::Bump {
                    center: 0.0,
                    half_width: 1.0,
                },
                vec![0.5, FRAC_PI_4, 1.5],
                [-2.0, 2.0],
            );
            sc.quantum = Some(QuantumSpec {
                eps: EPS_SWEEP.to_vec(),
                observables: vec![
                    ObservableSpec::Indicator { lo: -0.1, hi: 0.1 },
                    ObservableSpec::Gaussian {
                        center: 0.5,
                        width: 0.5,
                    },
                ],
                grid_points: 8192,
                window_factor: 8.0,
                steps_per_unit_time: 1000,
            });
            sc
        }
        "free_neg_sin" => {
            let mut sc = base(
                name,
                "Free flow of U = -sin: single-valued before t = 1, three branches at t = 2",
                HamiltonianSpec::Free,
                ProfileSpec::NegSin,
                DensitySpec::Bump {
                    center: 0.0,
                    half_width: 3.0,
                },
                vec![0.5, 2.0],
                [-6.0, 6.0],
            );
            sc.x_points = 2048;
            sc.disintegration = vec![-0.5, 0.3, 1.0];
            sc.quantum = Some(QuantumSpec {
                eps: EPS_SWEEP.to_vec(),
                observables: vec![
                    ObservableSpec::Plateau {
                        center: 0.0,
                        inner: 0.5,
                        outer: 1.5,
                    },
                    ObservableSpec::Gaussian {
                        center: 1.0,
                        width: 1.0,
                    },
                    ObservableSpec::Expr {
                        expr: "1/(1+x^2)".into(),
                    },
                ],
                grid_points: 16384,
                window_factor: 4.0,
                steps_per_unit_time: 1000,
            });
            sc
        }
        _ => return None,
    };
    Some(sc)
}
