use warpsimons::runner::{resolve_checks, run, sample_points, RunConfig};
use warpsimons::GeomError;

#[test]
fn samples_fill_the_region_deterministically() {
    let region = [[-1.0, 2.0], [0.5, 0.75], [3.0, 4.0]];
    let a = sample_points(&region, 64, 9);
    assert_eq!(a, sample_points(&region, 64, 9));
    assert_ne!(a, sample_points(&region, 64, 10));
    for u in &a {
        for (x, [lo, hi]) in u.iter().zip(&region) {
            assert!(x >= lo && x < hi);
        }
    }
    // low discrepancy: every half of every axis is hit
    for (i, [lo, hi]) in region.iter().enumerate() {
        let below = a.iter().filter(|u| u[i] < 0.5 * (lo + hi)).count();
        assert!((24..=40).contains(&below), "axis {i}: {below}");
    }
}

#[test]
fn reports_do_not_depend_on_the_thread_count() {
    let mut config = RunConfig::for_entry("adS_product");
    config.checks = vec!["fundamental".into(), "simons".into(), "threshold".into()];
    config.points = 6;
    config.seed = 3;
    let with = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run(&config).unwrap().to_json())
    };
    assert_eq!(with(1), with(4));
}

#[test]
fn config_errors() {
    let bad_check = resolve_checks(&["gauss".into(), "nonsense".into()]);
    assert!(matches!(bad_check, Err(GeomError::Config(_))));
    let mut config = RunConfig::for_entry("slice");
    config.points = 0;
    assert!(run(&config).is_err());
    let mut config = RunConfig::for_entry("slice");
    config.tolerances.insert("gaus".into(), 1e-3);
    assert!(run(&config).is_err());
    assert!(matches!(run(&RunConfig::for_entry("nope")), Err(GeomError::UnknownEntry(_))));
    assert!(RunConfig::from_json("{\"catalog\": \"slice\", \"pionts\": 3}").is_err());
}

#[test]
fn groups_expand_without_duplicates() {
    let checks = resolve_checks(&["fundamental".into(), "gauss".into(), "structure".into()]).unwrap();
    assert_eq!(checks.len(), 8);
    assert_eq!(resolve_checks(&["all".into()]).unwrap().len(), 21);
}

#[test]
fn custom_config_runs_and_fails_on_violated_preconditions() {
    let src = r#"{
        "ambient": {"epsilon": 1, "warp": "2 + sin(t)", "interval": {"lo": null, "hi": null},
                    "fiber_dim": 3, "fiber_curvature": 1.0, "fiber_index": 0},
        "immersion": {"params": ["u", "v"], "components": ["0.7 + 0.2*u", "u", "v", "0.1*u*v"],
                      "domain": [[-0.5, 0.5], [-0.5, 0.5]]},
        "checks": ["structure", "fundamental", "simons", "simons_hypersurface"],
        "points": 4,
        "seed": 1
    }"#;
    let report = run(&RunConfig::from_json(src).unwrap()).unwrap();
    assert_eq!(report.subject, "config");
    for check in &report.checks {
        // codimension two, so only the hypersurface variant fails
        assert_eq!(check.pass, check.name != "simons_hypersurface", "{}", check.name);
    }
    assert!(!report.pass);
}

#[test]
fn catalog_check_needs_an_unmodified_entry() {
    let mut config = RunConfig::for_entry("slice");
    config.checks = vec!["catalog".into()];
    assert!(run(&config).unwrap().pass);
    let mut moved = warpsimons::catalog::get_entry("slice").unwrap().imm.spec().clone();
    moved.components[0] = "0.9".into();
    config.immersion = Some(moved);
    let err = run(&config).unwrap_err().to_string();
    assert!(err.contains("unmodified catalog entry"), "{err}");
}
