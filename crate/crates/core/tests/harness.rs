use std::fs;

use monokinetic::harness::*;
use monokinetic::profiles::ThetaCantor;
use serde_json::Value;
use sha2::{Digest, Sha256};

fn hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn edited(name: &str, edit: impl FnOnce(&mut Value)) -> String {
    let mut v: Value = serde_json::from_str(&builtin(name).unwrap().to_json()).unwrap();
    edit(&mut v);
    v.to_string()
}

#[test]
fn builtins_round_trip_through_json() {
    assert_eq!(builtin_names().len(), 6);
    for name in builtin_names() {
        let sc = builtin(name).unwrap();
        sc.validate().unwrap();
        assert_eq!(Scenario::from_json(&sc.to_json()).unwrap(), sc);
        assert_eq!(&sc.name, name);
    }
    assert!(builtin("example_9_9").is_none());
}

#[test]
fn validation_errors_name_the_field() {
    let err = Scenario::from_json(&edited("example_3_2", |v| v["times"] = Value::Array(vec![]))).unwrap_err();
    assert!(
        matches!(&err, HarnessError::Invalid { field, .. } if field == "times"),
        "{err}"
    );
    assert_eq!(err.exit_code(), 1);

    let err = Scenario::from_json(&edited("example_3_2", |v| v["profile"]["id"] = "devil".into())).unwrap_err();
    assert!(matches!(&err, HarnessError::UnknownProfile(id) if id == "devil"));

    let err = Scenario::from_json("{\n  \"name\": \"x\",\n  \"times\": [1,\n}").unwrap_err();
    assert!(matches!(err, HarnessError::Parse { line: 4, .. }), "{err}");

    let err = Scenario::from_json(&edited("example_3_2", |v| {
        v["quantum"]["eps"] = serde_json::json!([0.05, 0.1])
    }))
    .unwrap_err();
    assert!(matches!(&err, HarnessError::Invalid { field, .. } if field == "quantum.eps"));

    let err = Scenario::from_json(&edited("free_neg_sin", |v| {
        v["density"] = serde_json::json!({"kind": "expr", "expr": "1 + * x", "support": [0, 1]})
    }))
    .unwrap_err();
    assert!(matches!(&err, HarnessError::Invalid { field, .. } if field == "density.expr"));

    let err = Scenario::from_json(&edited("example_3_2", |v| v["bins"] = 0.into())).unwrap_err();
    assert!(matches!(&err, HarnessError::Invalid { field, .. } if field == "bins"));

    let err = Scenario::from_json(&edited("example_3_2", |v| v["surprise"] = 1.into())).unwrap_err();
    assert!(matches!(err, HarnessError::Parse { .. }));

    let err = Scenario::from_json(&edited("example_3_2", |v| {
        v["density"] = serde_json::json!({"kind": "profile_set"})
    }))
    .unwrap_err();
    assert!(matches!(&err, HarnessError::Invalid { field, .. } if field == "density"));
}

#[test]
fn expression_and_sampled_hamiltonians_build() {
    let sc = Scenario::from_json(&edited("free_neg_sin", |v| {
        v["hamiltonian"] = serde_json::json!({"kind": "potential", "v": "x^2/2", "kappa": 1.0, "h": "x"});
    }))
    .unwrap();
    sc.build().unwrap();
    let xs: Vec<f64> = (0..=400).map(|i| -10.0 + 0.05 * i as f64).collect();
    let vs: Vec<f64> = xs.iter().map(|x| 0.5 * x * x).collect();
    let sc = Scenario::from_json(&edited("free_neg_sin", |v| {
        v["hamiltonian"] = serde_json::json!({"kind": "samples", "x": xs, "v": vs, "kappa": 1.0});
    }))
    .unwrap();
    sc.build().unwrap();
    let err = Scenario::from_json(&edited("free_neg_sin", |v| {
        v["hamiltonian"] = serde_json::json!({"kind": "samples", "x": [0.0, 0.0], "v": [1.0, 2.0], "kappa": 1.0});
    }))
    .unwrap_err();
    assert!(matches!(&err, HarnessError::Invalid { field, .. } if field == "hamiltonian"));
}

#[test]
fn depth_override_reaches_truncated_profiles() {
    let sc = builtin("example_3_1").unwrap().with_depth(7);
    assert_eq!(sc.profile, ProfileSpec::CantorBv { depth: 7 });
    let sc = builtin("free_neg_sin").unwrap();
    assert_eq!(sc.clone().with_depth(7), sc);
}

#[test]
fn focusing_run_is_deterministic_and_checksummed() {
    let dir = tempfile::tempdir().unwrap();
    let sc = builtin("example_3_2").unwrap();
    let opts = |sub: &str| RunOptions {
        out: Some(dir.path().join(sub)),
        ..Default::default()
    };
    let m1 = run_scenario(&sc, &opts("a")).unwrap();
    let m2 = run_scenario(&sc, &opts("b")).unwrap();
    assert_eq!(m1.files, m2.files);
    for f in &m1.files {
        let a = fs::read(dir.path().join("a").join(&f.path)).unwrap();
        let b = fs::read(dir.path().join("b").join(&f.path)).unwrap();
        assert_eq!(a, b, "{}", f.path);
        assert_eq!(hex(&a), f.sha256);
        assert_eq!(a.len(), f.bytes);
    }
    let names: Vec<&str> = m1.files.iter().map(|f| f.path.as_str()).collect();
    for expected in [
        "fold_counts.csv",
        "caustics.csv",
        "density_t0.csv",
        "density_t1.csv",
        "atoms.json",
        "quantum.csv",
    ] {
        assert!(names.contains(&expected), "{expected} missing from {names:?}");
    }
    let manifest: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("a/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["name"], "example_3_2");
    assert_eq!(manifest["files"].as_array().unwrap().len(), m1.files.len());

    let atoms: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("a/atoms.json")).unwrap()).unwrap();
    let at_one = atoms.as_array().unwrap().iter().find(|e| e["t"] == 1.0).unwrap();
    let list = at_one["atoms"].as_array().unwrap();
    assert_eq!(list.len(), 1);
    assert!(list[0]["x"].as_f64().unwrap().abs() < 1e-3);
    assert!((list[0]["mass"].as_f64().unwrap() - 1.0).abs() < 1e-3);
    let at_half = atoms.as_array().unwrap().iter().find(|e| e["t"] == 0.5).unwrap();
    assert!(at_half["atoms"].as_array().unwrap().is_empty());

    let header = fs::read_to_string(dir.path().join("a/fold_counts.csv")).unwrap();
    assert!(header.starts_with("t,x,count,caustic,resolution_warning\n"));
    let q = fs::read_to_string(dir.path().join("a/quantum.csv")).unwrap();
    assert_eq!(q.lines().count(), 1 + 2 * 4);
}

#[test]
fn theta_run_lists_the_tree_atoms() {
    let dir = tempfile::tempdir().unwrap();
    let sc = builtin("example_3_4_theta_0.25").unwrap();
    run_scenario(
        &sc,
        &RunOptions {
            out: Some(dir.path().to_path_buf()),
            ..Default::default()
        },
    )
    .unwrap();
    let atoms: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("atoms.json")).unwrap()).unwrap();
    let list = atoms[0]["atoms"].as_array().unwrap();
    let tree = ThetaCantor::new(0.25, 10).unwrap().tree(10);
    let predicted = tree.predicted_atoms();
    assert_eq!(list.len(), predicted.len());
    for &(_, x, mass) in &predicted {
        let a = list
            .iter()
            .min_by(|p, q| {
                let d = |v: &Value| (v["x"].as_f64().unwrap() - x).abs();
                d(p).total_cmp(&d(q))
            })
            .unwrap();
        assert!((a["x"].as_f64().unwrap() - x).abs() < 1e-10);
        assert!((a["mass"].as_f64().unwrap() - mass).abs() < 1e-4 * mass);
    }
    assert_eq!(atoms[0]["truncation_lumps"].as_array().unwrap().len(), 1 << 10);
}

#[test]
fn unwritable_output_is_a_configuration_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, b"x").unwrap();
    let err = run_scenario(
        &builtin("example_3_2").unwrap(),
        &RunOptions {
            out: Some(blocker.join("sub")),
            ..Default::default()
        },
    )
    .unwrap_err();
    assert!(matches!(err, HarnessError::Output { .. }));
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn report_lists_criteria_once_and_flags_a_bad_threshold() {
    let mut ids: Vec<u32> = CRITERIA.iter().map(|c| c.0).collect();
    ids.dedup();
    assert_eq!(ids, (1..=12).collect::<Vec<_>>());

    let report = run_acceptance(&AcceptanceConfig::default(), &[2, 5], |_| {});
    assert_eq!(report.criteria.iter().map(|c| c.id).collect::<Vec<_>>(), vec![2, 5]);
    assert!(report.all_passed(), "{:?}", report);

    let bad = AcceptanceConfig {
        jacobian_threshold: 1e-1,
        ..Default::default()
    };
    let report = run_acceptance(&bad, &[2], |_| {});
    assert!(!report.get(2).unwrap().passed);
    let json: Value = serde_json::from_str(&report.to_json()).unwrap();
    assert_eq!(json["criteria"][0]["passed"], false);
}
