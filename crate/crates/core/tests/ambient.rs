use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use warpsimons::ambient::ChartPoint;
use warpsimons::catalog;
use warpsimons::runner::sample_points;

/// Chart points near the image of each catalog entry.
fn ambient_points(name: &str, count: usize, seed: u64) -> Vec<ChartPoint> {
    let entry = catalog::get_entry(name).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_points(entry.sample_region(), count, seed)
        .into_iter()
        .map(|u| {
            let p = entry.imm.chart_point(&entry.cfg, &u).unwrap();
            let mut t = p.t + rng.random_range(-0.05..0.05);
            if !entry.cfg.interval().contains(t) {
                t = p.t;
            }
            let x = p.x.iter().map(|x| x + rng.random_range(-0.05..0.05)).collect();
            ChartPoint::new(t, x)
        })
        .collect()
}

#[test]
fn chart_curvature_has_the_riemann_symmetries() {
    for name in catalog::NAMES {
        let cfg = catalog::get_entry(name).unwrap().cfg;
        let d = cfg.dim();
        for p in ambient_points(name, 5, 11) {
            let r = cfg.riemann_from_chart(&p).unwrap();
            let scale =
                (0..d.pow(4)).fold(1.0_f64, |m, k| m.max(r.get(k / d.pow(3), k / d / d % d, k / d % d, k % d).abs()));
            let tol = 1e-10 * scale;
            for i in 0..d {
                for j in 0..d {
                    for k in 0..d {
                        for l in 0..d {
                            let v = r.get(i, j, k, l);
                            assert!((v + r.get(j, i, k, l)).abs() <= tol, "{name}");
                            assert!((v + r.get(i, j, l, k)).abs() <= tol, "{name}");
                            assert!((v - r.get(k, l, i, j)).abs() <= tol, "{name}");
                            let bianchi = v + r.get(j, k, i, l) + r.get(k, i, j, l);
                            assert!(bianchi.abs() <= tol, "{name}: Bianchi {bianchi:e}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn closed_form_curvature_matches_the_chart() {
    for name in catalog::NAMES {
        let cfg = catalog::get_entry(name).unwrap().cfg;
        let d = cfg.dim();
        let e = |i: usize| (0..d).map(|k| if k == i { 1.0 } else { 0.0 }).collect::<Vec<f64>>();
        for p in ambient_points(name, 20, 3) {
            let r = cfg.riemann_from_chart(&p).unwrap();
            let mut worst: f64 = 0.0;
            let mut scale: f64 = 1.0;
            for i in 0..d {
                for j in 0..d {
                    for k in 0..d {
                        for l in 0..d {
                            let closed = cfg.riemann_closed_form(&p, &e(i), &e(j), &e(k), &e(l)).unwrap();
                            worst = worst.max((closed - r.get(i, j, k, l)).abs());
                            scale = scale.max(closed.abs());
                        }
                    }
                }
            }
            assert!(worst / scale <= 1e-8, "{name}: {worst:e}");
        }
    }
}

#[test]
fn constant_curvature_means_equal_sectional_curvatures() {
    let mut seen = 0;
    for name in catalog::NAMES {
        let cfg = catalog::get_entry(name).unwrap().cfg;
        let Some(kappa) = cfg.constant_curvature().unwrap() else { continue };
        seen += 1;
        let d = cfg.dim();
        for p in ambient_points(name, 5, 5) {
            let g = cfg.metric_matrix(&p).unwrap();
            let r = cfg.riemann_from_chart(&p).unwrap();
            for i in 0..d {
                for j in 0..i {
                    let k = r.get(i, j, j, i) / (g[(i, i)] * g[(j, j)]);
                    assert!(
                        (k - kappa).abs() <= 1e-8 * kappa.abs().max(1.0),
                        "{name}: K({i},{j}) = {k}, kappa {kappa}"
                    );
                }
            }
        }
    }
    // anti-de Sitter, de Sitter and the space-form model
    assert!(seen >= 3);
}

#[test]
fn products_with_curved_fibers_are_not_constant_curvature() {
    for name in ["veronese_RxS4", "hyperbolic_veronese_cylinder", "graph", "einstein_de_sitter_slice"] {
        let cfg = catalog::get_entry(name).unwrap().cfg;
        assert_eq!(cfg.constant_curvature().unwrap(), None, "{name}");
    }
    let ads = catalog::get_entry("adS_product").unwrap().cfg;
    assert!((ads.constant_curvature().unwrap().unwrap() + 1.0).abs() < 1e-10);
    let ds = catalog::de_sitter_slice(3.5, 2).unwrap().cfg;
    assert!((ds.constant_curvature().unwrap().unwrap() - 3.5).abs() < 1e-10);
}
