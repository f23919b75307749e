use std::f64::consts::PI;
use std::sync::Arc;

use monokinetic::flow::{evolve, HamiltonianSystem, IntegratorOptions, PhasePoint};
use monokinetic::profiles::*;
use monokinetic::smooth;
use monokinetic::transport::*;

fn uniform(profile: MomentumProfile, a: f64, b: f64) -> MonokineticMeasure {
    MonokineticMeasure::new(profile, Arc::new(|_| 1.0), (a, b), &[]).unwrap()
}

fn bump_density(profile: MomentumProfile, half: f64) -> MonokineticMeasure {
    MonokineticMeasure::new(
        profile,
        Arc::new(move |y: f64| smooth::bump(y / half)),
        (-half, half),
        &[],
    )
    .unwrap()
}

#[test]
fn normalization_and_time_zero() {
    let mu = MonokineticMeasure::new(profile_neg_sin(), Arc::new(|y: f64| 1.0 + y), (0.0, 2.0), &[]).unwrap();
    assert!((mu.density(1.0) - 0.5).abs() < 1e-14);
    assert!((mu.mass_between(0.0, 2.0) - 1.0).abs() < 1e-14);
    let sys = HamiltonianSystem::free(1);
    let tr = Transport::new(&sys, &mu).unwrap();
    let td = tr
        .push_forward(
            0.0,
            &PushSettings {
                bins: 64,
                window: Some((0.0, 2.0)),
                ..Default::default()
            },
        )
        .unwrap();
    assert!((td.total_mass() - 1.0).abs() < 1e-12);
    for (i, m) in td.total.iter().enumerate() {
        let (a, b) = (i as f64 / 32.0, (i + 1) as f64 / 32.0);
        let exact = 0.25 * ((b + 0.5 * b * b) - (a + 0.5 * a * a));
        assert!((m - exact).abs() < 1e-6, "bin {i}");
    }
    let d = tr.density_at(0.0, 0.7).unwrap();
    assert!((d.value - mu.density(0.7)).abs() < 1e-12);
    assert!(MonokineticMeasure::new(profile_zero(), Arc::new(|_| -1.0), (0.0, 1.0), &[]).is_err());
    assert!(MonokineticMeasure::new(profile_zero(), Arc::new(|_| 0.0), (0.0, 1.0), &[]).is_err());
}

#[test]
fn harmonic_compression() {
    let sys = HamiltonianSystem::harmonic(1);
    let mu = uniform(profile_zero(), -1.0, 1.0);
    let tr = Transport::new(&sys, &mu).unwrap();
    let t = PI / 3.0;
    let td = tr
        .push_forward(
            t,
            &PushSettings {
                bins: 100,
                window: Some((-1.0, 1.0)),
                ..Default::default()
            },
        )
        .unwrap();
    // Bin edges cut quadrature panels, so each bin is exact up to one panel mass per edge.
    let panel_mass = 0.5 * 2.0 / 4096.0;
    for (c, m) in td.bin_centers().iter().zip(&td.total) {
        let expect = if c.abs() < 0.5 { td.bin_width } else { 0.0 };
        assert!((m - expect).abs() <= 2.0 * panel_mass, "bin at {c}: {m}");
    }
    assert!((td.mass_in(-0.5 - 1e-9, 0.5 + 1e-9) - 1.0).abs() < 1e-12);
    assert!((td.mass_in(-0.25, 0.25) - 0.5).abs() <= 2.0 * panel_mass);
    let d = tr.density_at(t, 0.0).unwrap();
    assert!((d.value - 1.0).abs() < 1e-9);
    let dis = tr.disintegrate(t, 0.3).unwrap();
    assert_eq!(dis.atoms.len(), 1);
    let y = 0.3 / t.cos();
    assert!((dis.atoms[0].1 + y * t.sin()).abs() < 1e-9);
    assert!((dis.total_weight() - 1.0).abs() < 1e-9);
}

#[test]
fn bump_focusing_makes_one_atom() {
    let sys = HamiltonianSystem::free(1);
    let mu = bump_density(profile_bump_focusing(), 0.5);
    let tr = Transport::new(&sys, &mu).unwrap();
    let td = tr
        .push_forward(
            1.0,
            &PushSettings {
                window: Some((-1.0, 1.0)),
                ..Default::default()
            },
        )
        .unwrap();
    assert!((td.mass_in(-1e-3, 1e-3) - 1.0).abs() < 1e-3);
    let (ac, sing) = td.lebesgue_split();
    assert!(ac < 1e-12 && (sing - 1.0).abs() < 1e-12);
    assert_eq!(td.atoms.len(), 1);
    assert!(td.atoms[0].x.abs() < 1e-3 && (td.atoms[0].mass - 1.0).abs() < 1e-3);
    let report = tr.detect_atoms(1.0, &[0.0, 0.25]).unwrap();
    assert_eq!(report.atoms.len(), 1);
    assert!((report.atoms[0].mass - 1.0).abs() < 1e-9);
    assert!(report.lumps.is_empty());
    assert!(matches!(tr.density_at(1.0, 0.0), Err(TransportError::Caustic { .. })));
}

#[test]
fn fold_sum_matches_histogram() {
    let sys = HamiltonianSystem::free(1);
    let mu = bump_density(profile_neg_sin(), 4.0);
    let tr = Transport::new(&sys, &mu).unwrap();
    let td = tr
        .push_forward(
            2.0,
            &PushSettings {
                bins: 4096,
                window: Some((-4.0, 4.0)),
                panels: 16384,
                ..Default::default()
            },
        )
        .unwrap();
    assert!((td.total_mass() - 1.0).abs() < 1e-6);
    for &x in &[0.0, 0.31, -0.77, 1.5] {
        let d = tr.density_at(2.0, x).unwrap();
        assert!(!d.near_caustic);
        let h = 0.01;
        let hist = td.mass_in(x - h, x + h) / (2.0 * h);
        let simpson =
            (tr.density_at(2.0, x - h).unwrap().value + 4.0 * d.value + tr.density_at(2.0, x + h).unwrap().value) / 6.0;
        assert!((hist - simpson).abs() < 1e-2 * simpson, "x = {x}: {hist} vs {simpson}");
    }
    let dis = tr.disintegrate(2.0, 0.0).unwrap();
    assert_eq!(dis.atoms.len(), 3);
    assert!((dis.atoms[0].1 + dis.atoms[2].1).abs() < 1e-9 && dis.atoms[1].1.abs() < 1e-12);
    assert!((dis.total_weight() - tr.density_at(2.0, 0.0).unwrap().value).abs() < 1e-12);
}

#[test]
fn smooth_transport_is_absolutely_continuous() {
    let sys = HamiltonianSystem::free(1);
    let mu = bump_density(profile_neg_sin(), 4.0);
    let tr = Transport::new(&sys, &mu).unwrap();
    let td = tr.push_forward(0.5, &PushSettings::default()).unwrap();
    let (ac, sing) = td.lebesgue_split();
    assert!(sing == 0.0 && (ac - 1.0).abs() < 1e-9);
    assert!(td.atoms.is_empty());
    assert!(!td.window_warning);
}

#[test]
fn transported_samples_stay_on_the_lagrangian_graph() {
    let sys = HamiltonianSystem::harmonic(1);
    let p = profile_neg_sin();
    let mu = bump_density(p.clone(), 2.0);
    let tr = Transport::new(&sys, &mu).unwrap();
    let t = 1.3;
    let td = tr
        .push_forward(
            t,
            &PushSettings {
                panels: 64,
                ..Default::default()
            },
        )
        .unwrap();
    let opts = IntegratorOptions::default();
    for s in td.samples().iter().step_by(17) {
        let fwd = evolve(&sys, &PhasePoint::one(s.y, p.eval(s.y)), t, &opts).unwrap();
        let back = evolve(&sys, &fwd.point, -t, &opts).unwrap();
        assert!((back.point.x[0] - s.y).abs() < 1e-8);
        assert!((back.point.xi[0] - p.eval(back.point.x[0])).abs() < 1e-8);
    }
}

fn theta_measure(theta: f64, depth: u32) -> (ThetaCantor, MonokineticMeasure) {
    let p = ThetaCantor::new(theta, depth).unwrap();
    let tree = p.tree(depth);
    let mut bps = Vec::new();
    for (m, centers) in tree.levels.iter().enumerate() {
        let r = tree.radius(m as u32 + 1);
        for &a in centers {
            bps.extend([a - r, a - theta * r, a + theta * r, a + r]);
        }
    }
    for (lo, hi) in tree.leaves() {
        bps.extend([lo, hi]);
    }
    let q = p.clone();
    let mu = MonokineticMeasure::new(
        MomentumProfile::new(p.clone()),
        Arc::new(move |y| q.complement_indicator(y)),
        (0.0, 1.0),
        &bps,
    )
    .unwrap();
    (p, mu)
}

#[test]
fn theta_cantor_atoms() {
    let theta = 0.25;
    let depth = 10;
    let (p, mu) = theta_measure(theta, depth);
    let sys = HamiltonianSystem::free(1);
    let tr = Transport::new(&sys, &mu).unwrap();
    let tree = p.tree(depth);
    let predicted = tree.predicted_atoms();
    let mut candidates: Vec<f64> = predicted.iter().map(|a| a.1).collect();
    candidates.extend(tree.leaves().iter().map(|l| p.time_one(0.5 * (l.0 + l.1))));
    let report = tr.detect_atoms(1.0, &candidates).unwrap();
    for &(m, x, mass) in predicted.iter().filter(|a| a.0 <= 5) {
        let atom = report
            .atoms
            .iter()
            .find(|a| (a.x - x).abs() < 1e-12)
            .unwrap_or_else(|| panic!("missing atom at {x} (level {m})"));
        assert!(
            (atom.mass - mass).abs() < 1e-4 * mass,
            "level {m}: {} vs {mass}",
            atom.mass
        );
    }
    assert_eq!(report.atoms.len(), predicted.len());
    let resolved: f64 = report.atoms.iter().map(|a| a.mass).sum();
    let exact: f64 = predicted.iter().map(|a| a.2).sum();
    // Flat edges are located to |F − x| ≤ 10⁻¹⁰, which widens each interval slightly.
    assert!((resolved - exact).abs() < 1e-8, "{resolved} vs {exact}");
    assert!(report.total_mass() >= 1.0 - theta.powi(depth as i32));
    assert!((report.total_mass() - 1.0).abs() < 1e-8);
    for centers in &tree.levels {
        for &a in centers {
            assert!((p.time_one(a) - a).abs() < 1e-10);
        }
    }
}

#[test]
fn fat_cantor_is_diffuse_and_singular() {
    let fat = FatCantor::new(2, FatCantorLayout::default()).unwrap();
    let mut bps = Vec::new();
    for &(a, b) in fat.leaves() {
        bps.extend([a, b]);
    }
    let q = fat.clone();
    let mu = MonokineticMeasure::new(
        MomentumProfile::new(fat.clone()),
        Arc::new(move |y| if q.in_k(y) { 1.0 } else { 0.0 }),
        (0.0, 1.0),
        &bps,
    )
    .unwrap();
    let sys = HamiltonianSystem::free(1);
    let tr = Transport::new(&sys, &mu).unwrap();
    let td = tr
        .push_forward(
            1.0,
            &PushSettings {
                panels: 1,
                order: 2,
                ..Default::default()
            },
        )
        .unwrap();
    let (_, sing) = td.lebesgue_split();
    assert!((sing - 1.0).abs() < 1e-3);
    assert!(td.atoms.is_empty());
    let mut prev = td.rebin(2048).into_iter().fold(0.0, f64::max);
    for bins in [8192, 32768, 131072] {
        let cur = td.rebin(bins).into_iter().fold(0.0, f64::max);
        assert!(cur <= 0.5 * prev, "{bins}: {cur} vs {prev}");
        prev = cur;
    }
    let cands: Vec<f64> = fat.leaves().iter().step_by(4099).map(|l| fat.time_one(l.0)).collect();
    let report = tr.detect_atoms(1.0, &cands).unwrap();
    assert!(report.atoms.is_empty());
    assert!(!report.lumps.is_empty());
}

#[test]
fn wkb_reduces_to_initial_data_and_classical_density() {
    let sys = HamiltonianSystem::free(1);
    let mu = bump_density(profile_neg_sin(), 4.0);
    let tr = Transport::new(&sys, &mu).unwrap();
    let eps = 0.05;
    let w0 = tr.wkb_multiphase(0.0, 0.6, 64).unwrap();
    let expect = num_complex::Complex64::from_polar(mu.amplitude(0.6), mu.profile.phase(0.6) / eps);
    assert!((w0.at_eps(eps) - expect).norm() < 1e-12);
    let w1 = tr.wkb_multiphase(0.5, 0.6, 64).unwrap();
    assert_eq!(w1.branches.len(), 1);
    let d = tr.density_at(0.5, 0.6).unwrap().value;
    for e in [0.1, 0.01] {
        assert!((w1.at_eps(e).norm_sqr() - d).abs() < 1e-10);
    }
    let w3 = tr.wkb_multiphase(2.0, 0.3, 256).unwrap();
    assert_eq!(w3.branches.len(), 3);
    let (lo, hi) = w3.envelope();
    for e in [0.1, 0.05, 0.025] {
        let v = w3.at_eps(e).norm_sqr();
        assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
    }
    let d3 = tr.density_at(2.0, 0.3).unwrap().value;
    assert!((w3.incoherent() - d3).abs() < 1e-12);
    assert!(!w3.maslov_warning);
    for x in [-0.5, -0.25, 0.05, 0.3, 0.55] {
        let w = tr.wkb_multiphase(2.0, x, 256).unwrap();
        assert_eq!(w.branches.len(), 3);
        let d = tr.density_at(2.0, x).unwrap().value;
        let avg = w.eps_average(0.0125, 512);
        assert!((avg - d).abs() < 0.05 * d, "x = {x}: {avg} vs {d}");
    }
}

#[test]
fn disintegration_at_time_zero() {
    let sys = HamiltonianSystem::free(1);
    let mu = bump_density(profile_neg_sin(), 4.0);
    let tr = Transport::new(&sys, &mu).unwrap();
    let d = tr.disintegrate(0.0, 1.1).unwrap();
    assert_eq!(d.atoms.len(), 1);
    assert!((d.atoms[0].0 - mu.density(1.1)).abs() < 1e-12);
    assert!((d.atoms[0].1 + 1.1f64.sin()).abs() < 1e-12);
}
