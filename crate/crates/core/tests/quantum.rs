use std::f64::consts::PI;
use std::sync::Arc;

use monokinetic::flow::HamiltonianSystem;
use monokinetic::folds::MaslovIndex;
use monokinetic::profiles::*;
use monokinetic::quantum::*;
use monokinetic::smooth;
use monokinetic::transport::*;
use num_complex::Complex64;
use rand::{rngs::StdRng, Rng, SeedableRng};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Free evolution of (πε)^{-1/4} e^{−(x−x₀)²/2ε + iξ₀x/ε} in closed form.
fn free_gaussian(x: f64, t: f64, x0: f64, xi0: f64, eps: f64) -> Complex64 {
    let s = c(1.0, t);
    let d = x - x0 - xi0 * t;
    let expo = -c(d * d, 0.0) / (2.0 * eps * s) + c(0.0, (xi0 * x - 0.5 * xi0 * xi0 * t) / eps);
    (PI * eps).powf(-0.25) / s.sqrt() * expo.exp()
}

fn test_field(eps: f64, n: usize) -> WaveField {
    let grid = Grid::new(-8.0, 8.0, n).unwrap();
    wkb_initial(&|x| smooth::bump(x / 3.0), &|x: f64| x.cos() - 1.0, eps, grid).unwrap()
}

#[test]
fn wkb_data_are_normalized_and_resolved() {
    let grid = Grid::new(-4.0, 4.0, 512).unwrap();
    let f = wkb_initial(&|x| smooth::bump(x), &|_| 0.0, 0.1, grid).unwrap();
    assert!((f.mass() - 1.0).abs() < 1e-12);
    assert!(f.values.iter().all(|v| v.im == 0.0 && v.re >= 0.0));
    // Δx = 1/64 and |S'| = 2 give a phase step of 0.3125/ε·ε.
    let steep = wkb_initial(&|x| smooth::bump(x), &|x| 2.0 * x, 0.1, grid);
    assert!(matches!(steep, Err(QuantumError::Underresolved { ratio }) if (ratio - 0.3125).abs() < 1e-9));
    assert!(wkb_initial(&|_| 0.0, &|_| 0.0, 0.1, grid).is_err());
    assert!(wkb_initial(&|x| smooth::bump(x), &|_| 0.0, 0.0, grid).is_err());
    assert!(Grid::new(1.0, 0.0, 64).is_err());
}

#[test]
fn fourier_parseval_and_gaussian() {
    let grid = Grid::new(-10.0, 10.0, 1024).unwrap();
    let mut rng = StdRng::seed_from_u64(7);
    let field = WaveField {
        eps: 0.05,
        grid,
        values: (0..1024)
            .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect(),
        t: 0.0,
    };
    let f = fourier_eps(&field);
    assert!((f.mass() - field.mass()).abs() < 1e-8 * field.mass());

    let (x0, xi0, eps) = (0.7, -1.3, 0.05);
    let g = coherent_state(x0, xi0, eps, grid).unwrap();
    let fg = fourier_eps(&g);
    for (k, (&xi, v)) in fg.xi.iter().zip(&fg.values).enumerate().step_by(37) {
        // Direct quadrature of the defining integral.
        let direct: Complex64 = (0..grid.n)
            .map(|j| {
                let x = grid.x(j);
                g.values[j] * Complex64::from_polar(grid.dx(), -x * xi / eps)
            })
            .sum::<Complex64>()
            / (2.0 * PI * eps).sqrt();
        assert!((direct - v).norm() < 1e-10, "slot {k}");
        let closed = (PI * eps).powf(-0.5) * (-(xi - xi0) * (xi - xi0) / eps).exp();
        assert!((v.norm_sqr() - closed).abs() < 1e-10, "ξ = {xi}");
    }
    let peak = fg
        .density()
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap()
        .0;
    assert!((fg.xi[peak] - xi0).abs() <= fg.dxi());
}

#[test]
fn free_evolution_matches_closed_form() {
    let eps = 0.05;
    let grid = Grid::new(-12.0, 12.0, 2048).unwrap();
    let (x0, xi0) = (-1.0, 0.8);
    let g = coherent_state(x0, xi0, eps, grid).unwrap();
    let ev = schrodinger_evolve(&g, None, 3.0, 1);
    assert!(!ev.window_warning);
    assert!(ev.mass_drift < 1e-12);
    let err = (0..grid.n)
        .map(|j| (ev.field.values[j] - free_gaussian(grid.x(j), 3.0, x0, xi0, eps)).norm())
        .fold(0.0, f64::max);
    assert!(err < 1e-6, "{err}");
    assert!((ev.field.t - 3.0).abs() < 1e-15);
}

#[test]
fn harmonic_period_and_norm() {
    let eps = 0.1;
    let grid = Grid::new(-10.0, 10.0, 1024).unwrap();
    let g = coherent_state(1.5, 0.5, eps, grid).unwrap();
    let sys = HamiltonianSystem::harmonic(1);
    let v = sample_potential(&sys, grid).unwrap().unwrap();
    assert!(sample_potential(&HamiltonianSystem::free(1), grid).unwrap().is_none());
    let ev = schrodinger_evolve(&g, Some(&v), 2.0 * PI, 4000);
    assert!(ev.mass_drift < 1e-10);
    // Energies ε(n + ½) make the period map −1.
    let overlap: Complex64 = g
        .values
        .iter()
        .zip(&ev.field.values)
        .map(|(a, b)| a.conj() * b * grid.dx())
        .sum();
    assert!((overlap + 1.0).norm() < 1e-4, "{overlap}");
    let tight = Grid::new(-3.0, 3.0, 512).unwrap();
    let g = coherent_state(1.5, 0.5, eps, tight).unwrap();
    let v = sample_potential(&sys, tight).unwrap().unwrap();
    assert!(schrodinger_evolve(&g, Some(&v), 1.0, 100).window_warning);
}

#[test]
fn wigner_of_coherent_state_is_gaussian() {
    let eps = 0.1;
    let grid = Grid::new(-8.0, 8.0, 512).unwrap();
    let (x0, xi0) = (0.5, -0.75);
    let w = wigner(&coherent_state(x0, xi0, eps, grid).unwrap(), 8);
    let g = |d: f64| (-d * d / eps).exp() / (PI * eps).sqrt();
    let mut worst: f64 = 0.0;
    for (i, &x) in w.xs.iter().enumerate() {
        for (k, &xi) in w.xis.iter().enumerate() {
            worst = worst.max((w.at(i, k) - g(x - x0) * g(xi - xi0)).abs());
        }
    }
    assert!(worst < 1e-10, "{worst}");
    let marginal = w.x_marginal();
    let field = coherent_state(x0, xi0, eps, grid).unwrap();
    for (i, m) in marginal.iter().enumerate() {
        assert!((m - field.values[i * 8].norm_sqr()).abs() < 1e-12);
    }
}

#[test]
fn husimi_routes_and_marginals() {
    let eps = 0.1;
    let field = test_field(eps, 1024);
    let h = husimi(&field, 1);
    let hw = husimi_via_wigner(&field, 1).unwrap();
    let diff = h
        .values
        .iter()
        .zip(&hw.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(diff < 1e-8, "{diff}");
    assert!(h.min() >= -1e-12);
    assert!((h.total() - 1.0).abs() < 1e-6);
    let sx = smoothed_density(&field);
    let mx = h.x_marginal();
    let ex = sx.iter().zip(&mx).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(ex < 1e-6, "{ex}");
    let sxi = smoothed_momentum_density(&field);
    let mxi = h.xi_marginal();
    let exi = sxi.iter().zip(&mxi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(exi < 1e-6, "{exi}");
    assert!(husimi_via_wigner(&test_field(eps, 8192), 1).is_err());
}

#[test]
fn coherent_husimi_peaks_at_its_center() {
    let eps = 0.05;
    let grid = Grid::new(-6.0, 6.0, 1024).unwrap();
    let (x1, xi1) = (1.0, 0.5);
    let h = husimi(&coherent_state(x1, xi1, eps, grid).unwrap(), 16);
    let mut worst: f64 = 0.0;
    let mut best = (0.0, 0, 0);
    for (i, &x) in h.xs.iter().enumerate() {
        for (k, &xi) in h.xis.iter().enumerate() {
            let exact = (-((x - x1).powi(2) + (xi - xi1).powi(2)) / (2.0 * eps)).exp() / (2.0 * PI * eps);
            worst = worst.max((h.at(i, k) - exact).abs());
            if h.at(i, k) > best.0 {
                best = (h.at(i, k), i, k);
            }
        }
    }
    assert!(worst < 1e-10, "{worst}");
    assert!((h.xs[best.1] - x1).abs() <= h.dx() && (h.xis[best.2] - xi1).abs() <= h.dxi());
}

#[test]
fn husimi_momentum_spread_shrinks_with_eps() {
    let profile = |x: f64| -x.sin();
    let mut spreads = Vec::new();
    for eps in [0.1, 0.05, 0.025, 0.0125] {
        let grid = Grid::new(-8.0, 8.0, 8192).unwrap();
        let field = wkb_initial(&|x| smooth::bump(x / 3.0), &|x: f64| x.cos() - 1.0, eps, grid).unwrap();
        spreads.push(husimi(&field, 16).momentum_spread((-1.0, 1.0), &profile));
    }
    for w in spreads.windows(2) {
        let r = w[1] / w[0];
        assert!((0.3..=0.8).contains(&r), "{spreads:?}");
    }
}

fn bump_measure(profile: MomentumProfile, half: f64) -> MonokineticMeasure {
    MonokineticMeasure::new(
        profile,
        Arc::new(move |y: f64| smooth::bump(y / half)),
        (-half, half),
        &[],
    )
    .unwrap()
}

#[test]
fn comparison_at_time_zero_vanishes() {
    let sys = HamiltonianSystem::free(1);
    let mu = bump_measure(profile_neg_sin(), 3.0);
    let tr = Transport::new(&sys, &mu).unwrap();
    let pushed = tr.push_forward(0.0, &PushSettings::default()).unwrap();
    let field = wkb_from_measure(&mu, 0.1, Grid::new(-8.0, 8.0, 2048).unwrap()).unwrap();
    let chi = |x: f64| smooth::plateau(x - 0.5, 1.0, 2.0);
    let cmp = classical_comparison(&field, &tr, &pushed, &chi).unwrap();
    assert!(cmp.gap < 1e-10, "{cmp:?}");
    assert!(!cmp.caustic_warning && cmp.caustic_points == 0);
}

/// Solver against the assembled multiphase WKB sum with either Maslov sign.
#[test]
fn maslov_sign_matches_the_solver() {
    let sys = HamiltonianSystem::free(1);
    let mu = bump_measure(profile_neg_sin(), 4.0);
    let tr = Transport::new(&sys, &mu).unwrap();
    let eps = 0.0125;
    let grid = Grid::new(-16.0, 16.0, 1 << 14).unwrap();
    let field = wkb_from_measure(&mu, eps, grid).unwrap();
    let ev = schrodinger_evolve(&field, None, 2.0, 1);
    let fgrid = tr.grid(2.0).unwrap();
    let (mut err_minus, mut err_plus) = (0.0f64, 0.0f64);
    for j in (0..grid.n).filter(|&j| grid.x(j).abs() < 0.6).step_by(20) {
        let x = grid.x(j);
        let w = tr.wkb_on(&fgrid, x, 256).unwrap();
        assert_eq!(w.branches.len(), 3);
        let sum = |sign: f64| -> Complex64 {
            w.branches
                .iter()
                .map(|b| {
                    let MaslovIndex::Index(nu) = b.maslov else {
                        panic!("undefined index")
                    };
                    Complex64::from_polar(b.amplitude, b.phase / eps + sign * PI * nu as f64 / 2.0)
                })
                .sum()
        };
        let q = ev.field.values[j].norm_sqr();
        err_minus = err_minus.max((sum(-1.0).norm_sqr() - q).abs());
        err_plus = err_plus.max((sum(1.0).norm_sqr() - q).abs());
        assert!((w.at_eps(eps).norm_sqr() - sum(MASLOV_SIGN).norm_sqr()).abs() < 1e-12);
    }
    let (right, wrong) = if MASLOV_SIGN < 0.0 {
        (err_minus, err_plus)
    } else {
        (err_plus, err_minus)
    };
    assert!(right < 0.2 * wrong, "chosen sign {right} vs other {wrong}");
}
