mod common;

use common::interior_points;
use warpsimons::catalog::{self, hyperquadric_defect, measure, NAMES};
use warpsimons::extrinsic::evaluate_point;

#[test]
fn entries_are_sorted_and_resolvable() {
    let mut sorted = NAMES.to_vec();
    sorted.sort_by_key(|s| s.to_lowercase());
    assert_eq!(sorted, NAMES);
    for entry in catalog::list() {
        entry.imm.check_against(&entry.cfg).unwrap();
    }
    assert!(catalog::get_entry("nope").is_err());
}

#[test]
fn every_expectation_holds_on_the_sample_region() {
    for entry in catalog::list() {
        for u in interior_points(entry.sample_region()) {
            let eval =
                evaluate_point(&entry.imm, &entry.cfg, &u).unwrap_or_else(|e| panic!("{} at {u:?}: {e}", entry.name));
            for exp in &entry.expected {
                let v = measure(exp.quantity, &entry.cfg, &entry.imm, &eval.data, &eval.derived)
                    .unwrap_or_else(|e| panic!("{} {}: {e}", entry.name, exp.quantity.name()));
                let dev = exp.deviation(v, &eval.data);
                assert!(dev <= 1.0, "{} {} = {v} at {u:?} ({:?})", entry.name, exp.quantity.name(), exp.target);
            }
        }
    }
}

#[test]
fn hyperquadric_images_stay_on_the_quadric() {
    for name in ["adS_product", "hyperbolic_veronese_cylinder", "veronese_RxS4"] {
        let entry = catalog::get_entry(name).unwrap();
        for u in interior_points(entry.sample_region()) {
            assert!(hyperquadric_defect(&entry.cfg, &entry.imm, &u).unwrap() < 1e-10, "{name}");
        }
    }
}

#[test]
fn ads_product_sits_on_anti_de_sitter_space() {
    // Rebuild the flat point from the chart and compare with the
    // hyperbola product.
    let entry = catalog::get_entry("adS_product").unwrap();
    let (p, q) = (0.2_f64, -0.1_f64);
    let cp = entry.imm.chart_point(&entry.cfg, &[p, q]).unwrap();
    assert!((cp.t.sin() - p.cosh() / 2f64.sqrt()).abs() < 1e-14);
}
