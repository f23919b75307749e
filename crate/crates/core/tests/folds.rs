use std::f64::consts::PI;

use monokinetic::flow::{HamiltonianSystem, IntegratorOptions};
use monokinetic::folds::*;
use monokinetic::profiles::*;
use proptest::prelude::*;

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (f(m) > 0.0) == (fa > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

#[test]
fn identity_at_time_zero() {
    let sys = HamiltonianSystem::free(1);
    let p = profile_neg_sin();
    let fm = FoldMap::new(&sys, &*p).unwrap();
    for &y in &[-3.0, 0.0, 1.7] {
        let s = fm.at(0.0, y).unwrap();
        assert_eq!(s.image, y);
        assert_eq!(s.det, Some(1.0));
    }
    let set = fm
        .preimages_1d(&FoldQuery {
            t: 0.0,
            x: 0.4,
            radius: 5.0,
            grid_points: 200,
        })
        .unwrap();
    assert_eq!(set.count, 1);
    assert!((set.preimages[0].y - 0.4).abs() < 1e-12);
}

#[test]
fn free_flow_closed_form() {
    let sys = HamiltonianSystem::free(1);
    let p = profile_neg_sin();
    let fm = FoldMap::new(&sys, &*p).unwrap();
    for &y in &[-2.0, 0.3, 4.0] {
        let s = fm.at(2.0, y).unwrap();
        assert!((s.image - (y - 2.0 * y.sin())).abs() < 1e-9);
        assert!((s.det.unwrap() - (1.0 - 2.0 * y.cos())).abs() < 1e-9);
        assert!((s.momentum + y.sin()).abs() < 1e-9);
    }
}

#[test]
fn harmonic_rotation() {
    let sys = HamiltonianSystem::harmonic(1);
    let p = profile_zero();
    let fm = FoldMap::new(&sys, &*p).unwrap();
    let t = 1.1;
    let s = fm.at(t, 0.8).unwrap();
    assert!((s.image - 0.8 * t.cos()).abs() < 1e-9);
    assert!((s.jacobian().unwrap() - t.cos().abs()).abs() < 1e-9);
    assert!((s.momentum + 0.8 * t.sin()).abs() < 1e-9);
    let ys: Vec<f64> = (0..41).map(|i| -2.0 + 0.1 * i as f64).collect();
    let c = fm.caustic_sample(PI / 2.0, &ys).unwrap();
    assert_eq!(c.len(), ys.len());
    assert!(c.iter().all(|x| x.abs() < 1e-8));
}

#[test]
fn three_roots_of_neg_sin() {
    let sys = HamiltonianSystem::free(1);
    let p = profile_neg_sin();
    let fm = FoldMap::new(&sys, &*p).unwrap();
    let ystar = bisect(|y| y - 2.0 * y.sin(), 1.0, 3.0);
    let set = fm
        .preimages_1d(&FoldQuery {
            t: 2.0,
            x: 0.0,
            radius: 10.0,
            grid_points: 2000,
        })
        .unwrap();
    assert_eq!(set.count, 3);
    assert!(!set.is_caustic_point);
    let ys: Vec<f64> = set.preimages.iter().map(|r| r.y).collect();
    for (got, want) in ys.iter().zip([-ystar, 0.0, ystar]) {
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }
    for r in &set.preimages {
        assert!(r.image.abs() <= ROOT_TOLERANCE);
    }
}

#[test]
fn log_oscillation_roots_accumulate() {
    let sys = HamiltonianSystem::free(1);
    let p = profile_log_oscillation();
    let fm = FoldMap::new(&sys, &*p).unwrap();
    let set = fm
        .preimages_1d(&FoldQuery {
            t: -2.0,
            x: 0.0,
            radius: PI,
            grid_points: 4000,
        })
        .unwrap();
    assert!(set.resolution_limited);
    let expected: Vec<f64> = (0..4)
        .flat_map(|n| {
            let k = 2.0 * PI * n as f64;
            [(PI / 6.0 - k).exp(), (5.0 * PI / 6.0 - k).exp()]
        })
        .filter(|&y| y <= PI)
        .collect();
    for y in expected {
        for s in [y, -y] {
            let r = set
                .preimages
                .iter()
                .find(|r| (r.y - s).abs() < 1e-9 * s.abs().max(1e-3))
                .unwrap_or_else(|| panic!("missing root {s}"));
            assert!(r.image.abs() <= 1e-8);
            assert!((r.jacobian().unwrap() - 3f64.sqrt()).abs() < 1e-6, "{s}: {:?}", r);
        }
    }
    assert!(set.preimages.iter().any(|r| r.y == 0.0 || r.det.is_none()));
}

#[test]
fn counts_are_odd_and_bounded() {
    let sys = HamiltonianSystem::free(1);
    let p = profile_neg_sin();
    let fm = FoldMap::new(&sys, &*p).unwrap();
    let xs: Vec<f64> = (0..301).map(|i| -3.0 + 0.02 * i as f64).collect();
    let counts = fm.count_folds(2.0, &xs, 10.0, 2000).unwrap();
    for c in counts.iter().filter(|c| !c.is_caustic) {
        assert!(c.count == 1 || c.count == 3, "x = {} count {}", c.x, c.count);
    }
    assert!(counts.iter().any(|c| c.count == 3));
    let small = fm.count_folds(0.5, &xs, 10.0, 2000).unwrap();
    assert!(small.iter().all(|c| c.count == 1 && !c.is_caustic));
}

#[test]
fn localization_in_large_balls() {
    let sys = HamiltonianSystem::free(1);
    let p = profile_neg_sin();
    let fm = FoldMap::new(&sys, &*p).unwrap();
    let xs: Vec<f64> = (0..41).map(|i| -5.0 + 0.25 * i as f64).collect();
    let a = fm.count_folds(2.0, &xs, 10.0, 2000).unwrap();
    let b = fm.count_folds(2.0, &xs, 20.0, 4000).unwrap();
    for (u, v) in a.iter().zip(&b) {
        assert_eq!(u.count, v.count, "x = {}", u.x);
    }
}

#[test]
fn counting_bound_and_area_formula() {
    let sys = HamiltonianSystem::free(1);
    let p = profile_neg_sin();
    let fm = FoldMap::new(&sys, &*p).unwrap();
    let bounds = fm.counting_bound_check(2.0, 10.0, &[1, 3], 2000, 2048).unwrap();
    assert!(bounds.iter().all(|b| b.holds));
    let area = fm.area_formula(2.0, 10.0, 2000, 4096).unwrap();
    // Oracle: ∫|1 − 2cos y| over [−10, 10] by fine midpoint sums.
    let n = 2_000_000;
    let h = 20.0 / n as f64;
    let oracle: f64 = (0..n)
        .map(|i| (1.0 - 2.0 * (-10.0 + (i as f64 + 0.5) * h).cos()).abs() * h)
        .sum();
    assert!((area.jacobian_integral - oracle).abs() < 1e-4 * oracle);
    assert!(area.relative_gap() < 1e-2);
    let zero = fm.counting_bound_check(0.0, 10.0, &[1], 200, 500).unwrap();
    assert!((zero[0].lhs - 20.0).abs() < 1e-9 && zero[0].holds);
    let cantor = profile_cantor_bv(30);
    let fc = FoldMap::new(&sys, &*cantor).unwrap();
    assert!(matches!(
        fc.counting_bound_check(1.0, 1.0, &[1], 200, 100),
        Ok(_) | Err(FoldError::BoundNotComputable { .. })
    ));
}

#[test]
fn maslov_indices() {
    let harmonic = HamiltonianSystem::harmonic(1);
    let zero = profile_zero();
    let fm = FoldMap::new(&harmonic, &*zero).unwrap();
    assert_eq!(fm.maslov_index_1d(0.7, 0.75 * PI, 400).unwrap(), MaslovIndex::Index(1));
    assert_eq!(fm.maslov_index_1d(0.7, 0.4, 400).unwrap(), MaslovIndex::Index(0));

    let free = HamiltonianSystem::free(1);
    let p = profile_neg_sin();
    let fm = FoldMap::new(&free, &*p).unwrap();
    for &y in &[PI / 2.0, 0.0, 0.4, PI, 2.5] {
        // Oracle: sign changes of 1 − s cos y over a dense time sweep.
        let mut changes = 0;
        let mut last = 1.0f64;
        for i in 1..=100_000 {
            let d = 1.0 - 2.0 * i as f64 / 100_000.0 * y.cos();
            if d != 0.0 && d.signum() != last {
                changes += 1;
                last = d.signum();
            }
        }
        assert_eq!(
            fm.maslov_index_1d(y, 2.0, 500).unwrap(),
            MaslovIndex::Index(changes),
            "y = {y}"
        );
    }
    let ex = profile_log_oscillation();
    let fe = FoldMap::new(&free, &*ex).unwrap();
    assert_eq!(fe.maslov_index_1d(0.0, 1.0, 10).unwrap(), MaslovIndex::Undefined);
}

#[test]
fn bump_focusing_caustic_collapses() {
    let sys = HamiltonianSystem::free(1);
    let p = profile_bump_focusing();
    let fm = FoldMap::new(&sys, &*p).unwrap();
    let ys: Vec<f64> = (0..101).map(|i| -0.5 + 0.01 * i as f64).collect();
    let c = fm.caustic_sample(1.0, &ys).unwrap();
    assert_eq!(c.len(), ys.len());
    assert!(c.iter().all(|x| x.abs() < 1e-9));
}

#[test]
fn theta_caustic_lies_on_the_compact() {
    let theta = 0.25;
    let sys = HamiltonianSystem::free(1);
    let p = ThetaCantor::new(theta, 30).unwrap();
    let fm = FoldMap::new(&sys, &p).unwrap();
    let ys: Vec<f64> = (0..2000).map(|i| (i as f64 + 0.5) / 2000.0).collect();
    let c = fm.caustic_sample(1.0, &ys).unwrap();
    assert!(c.len() > 1000);
    // K(θ) is the complement of the open gaps (a − r, a + r) of the tree.
    let tree = ThetaTree::new(theta, 14);
    for &x in &c {
        for (m, centers) in tree.levels.iter().enumerate() {
            let r = tree.radius(m as u32 + 1);
            for &a in centers {
                assert!((x - a).abs() >= r - 1e-9, "{x} inside gap at {a}");
            }
        }
    }
}

#[test]
fn sampled_counts_in_two_dimensions() {
    let sys = HamiltonianSystem::free(2);
    let prof = ProductProfile {
        factors: vec![profile_neg_sin(), profile_neg_sin()],
    };
    let opts = IntegratorOptions::default();
    let s = count_folds_sampled(&sys, &prof, 2.0, &[0.0, 0.0], 4.0, 4000, 7, &opts).unwrap();
    assert!(s.bound() >= 9, "{}", s.bound());
    let id = count_folds_sampled(&sys, &prof, 0.0, &[0.3, -0.2], 4.0, 500, 1, &opts).unwrap();
    assert_eq!(id.bound(), 1);
    assert!((id.clusters[0][0] - 0.3).abs() < 1e-9);
    let none = count_folds_sampled(&sys, &prof, 2.0, &[0.0, 0.0], 4.0, 0, 1, &opts).unwrap();
    assert_eq!(none.bound(), 0);
}

#[test]
fn properness_probe_grows() {
    let sys = HamiltonianSystem::free(1);
    let p = profile_neg_sin();
    let fm = FoldMap::new(&sys, &*p).unwrap();
    let probe = fm.properness_probe(2.0, &[10.0, 100.0, 1000.0], 8).unwrap();
    for w in probe.windows(2) {
        assert!(w[1].min_image > w[0].min_image);
        assert!(w[1].sup_ratio < w[0].sup_ratio);
    }
}

#[test]
fn rejects_higher_dimensions() {
    let sys = HamiltonianSystem::free(2);
    let p = profile_zero();
    assert!(matches!(FoldMap::new(&sys, &*p), Err(FoldError::NotOneDimensional(2))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn non_caustic_counts_are_odd(x in -6.0f64..6.0, t in 0.2f64..5.0) {
        let sys = HamiltonianSystem::free(1);
        let p = profile_neg_sin();
        let fm = FoldMap::new(&sys, &*p).unwrap();
        let set = fm.preimages_1d(&FoldQuery { t, x, radius: 12.0 + t, grid_points: 1500 }).unwrap();
        if !set.is_caustic_point {
            prop_assert_eq!(set.count % 2, 1);
        }
        for r in &set.preimages {
            prop_assert!((r.image - x).abs() <= ROOT_TOLERANCE);
        }
        for w in set.preimages.windows(2) {
            prop_assert!(w[1].y - w[0].y >= DEDUP_TOLERANCE);
        }
    }
}
