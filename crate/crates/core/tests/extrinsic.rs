#![allow(clippy::needless_range_loop)]

mod common;

use common::{ambient, immersion};
use warpsimons::ambient::Interval;
use warpsimons::extrinsic::{evaluate_point, extrinsic_at};

#[test]
fn einstein_de_sitter_slice_is_umbilic() {
    let cfg = ambient(-1, "t^(1/3)", Interval::new(Some(0.0), None), 3, 0.0, 0);
    let imm = immersion(&["p", "q", "r"], &["3/2", "p", "q", "r"], &[[-1.0, 1.0]; 3]);
    let t0: f64 = 1.5;
    let ev = evaluate_point(&imm, &cfg, &[0.1, -0.2, 0.3]).unwrap();
    let d = &ev.data;
    assert_eq!(d.normal_signs, vec![-1.0]);
    let lambda = -1.0 / (3.0 * t0);
    for i in 0..3 {
        for j in 0..3 {
            let expected = if i == j { lambda } else { 0.0 };
            assert!((d.h[0][(i, j)] - expected).abs() < 1e-13, "{}", d.h[0]);
        }
    }
    let norms = ev.derived.norms.clone().unwrap();
    assert!((norms.alpha - 3.0 / (9.0 * t0 * t0)).abs() < 1e-13);
    assert!(norms.nabla_alpha < 1e-24);
    assert!(norms.laplacian_alpha.abs() < 1e-12);
    assert!(d.t_norm_sq() < 1e-28);
    assert!((d.xi_normal[0] + 1.0).abs() < 1e-14);
}

#[test]
fn round_sphere_in_flat_space() {
    let cfg = ambient(1, "1", Interval::REAL_LINE, 3, 0.0, 0);
    let imm =
        immersion(&["u", "v"], &["0", "2*sin(u)*cos(v)", "2*sin(u)*sin(v)", "2*cos(u)"], &[[0.1, 3.0], [-3.0, 3.0]]);
    let ev = evaluate_point(&imm, &cfg, &[0.9, 0.4]).unwrap();
    let norms = ev.derived.norms.clone().unwrap();
    assert!((norms.alpha - 0.5).abs() < 1e-13, "{norms:?}");
    assert!(norms.laplacian_alpha.abs() < 1e-11);
    let k = ev.derived.intrinsic_riemann.get(0, 1, 1, 0);
    assert!((k - 0.25).abs() < 1e-12, "{k}");
    let s = &ev.data.structure;
    for r in [&s.ambient_dt, &s.tangent_t, &s.normal_xi, &s.weingarten, &s.frame] {
        assert!(r.rel() < 1e-12, "{s:?}");
    }
}

#[test]
fn jet_normal_curvature_matches_ricci_equation() {
    let cfg = ambient(1, "cosh(t) + t/3", Interval::REAL_LINE, 3, 1.0, 0);
    let imm = immersion(&["u", "v"], &["0.4 + 0.3*sin(u)*cos(v)", "u", "v", "0.2*u*v + 0.1*u^2"], &[[-0.5, 0.5]; 2]);
    for u in [[0.1, 0.2], [-0.3, 0.25], [0.2, -0.1]] {
        let ev = evaluate_point(&imm, &cfg, &u).unwrap();
        let d = &ev.data;
        let m = d.codim;
        assert_eq!(m, 2);
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                for b in 0..m {
                    let coeffs: Vec<f64> = (0..m).map(|g| if g == b { 1.0 } else { 0.0 }).collect();
                    let ricci = d.normal_curvature_of(i, j, &coeffs);
                    for g in 0..m {
                        let from_ricci = d.normal_signs[g] * ricci[g];
                        worst = worst.max((from_ricci - ev.derived.normal_curvature(i, j, b, g)).abs());
                    }
                }
            }
        }
        assert!(worst < 1e-10, "{worst}");
        let s = &d.structure;
        for r in [&s.ambient_dt, &s.tangent_t, &s.normal_xi, &s.weingarten, &s.frame] {
            assert!(r.rel() < 1e-12, "{s:?}");
        }
        let low = extrinsic_at(&imm, &cfg, &u).unwrap();
        for (a, b) in low.h.iter().zip(&d.h) {
            assert!((a - b).abs().max() < 1e-13);
        }
    }
}

fn graph_surface(u: &str, v: &str) -> Vec<String> {
    vec![format!("0.6 + 0.1*sin({u}) + 0.05*({v})^2"), u.to_string(), v.to_string()]
}

#[test]
fn squared_norm_ignores_parameter_rotations() {
    let cfg = warpsimons::catalog::space_form_model(4.0, 2);
    let cfg = warpsimons::AmbientConfig::from_spec(cfg).unwrap();
    let plain = graph_surface("u", "v");
    let plain = immersion(&["u", "v"], &plain.iter().map(String::as_str).collect::<Vec<_>>(), &[[-1.0, 1.0]; 2]);
    let (c, s) = (0.3_f64.cos(), 0.3_f64.sin());
    let ru = format!("({c}*p - {s}*q)");
    let rv = format!("({s}*p + {c}*q)");
    let rotated = graph_surface(&ru, &rv);
    let rotated = immersion(&["p", "q"], &rotated.iter().map(String::as_str).collect::<Vec<_>>(), &[[-1.0, 1.0]; 2]);
    for (p, q) in [(0.2, -0.1), (-0.4, 0.3), (0.5, 0.5)] {
        let u = [c * p - s * q, s * p + c * q];
        let a = extrinsic_at(&plain, &cfg, &u).unwrap().alpha_frame_sq();
        let b = extrinsic_at(&rotated, &cfg, &[p, q]).unwrap().alpha_frame_sq();
        assert!((a - b).abs() <= 1e-10, "{a} vs {b}");
    }
}

/// `Δf = g^{ij}(∂_i∂_j f − Γ^k_ij ∂_k f)` with every derivative taken by
/// central differences of step `h`.
fn laplacian_by_differences(
    f: &dyn Fn(&[f64]) -> f64,
    g: &dyn Fn(&[f64]) -> nalgebra::DMatrix<f64>,
    u: &[f64],
    h: f64,
) -> f64 {
    let n = u.len();
    let shift = |i: usize, s: f64| {
        let mut v = u.to_vec();
        v[i] += s;
        v
    };
    let g0 = g(u);
    let gi = g0.clone().try_inverse().unwrap();
    let dg: Vec<nalgebra::DMatrix<f64>> = (0..n).map(|k| (g(&shift(k, h)) - g(&shift(k, -h))) / (2.0 * h)).collect();
    let df: Vec<f64> = (0..n).map(|k| (f(&shift(k, h)) - f(&shift(k, -h))) / (2.0 * h)).collect();
    let mut lap = 0.0;
    for i in 0..n {
        for j in 0..n {
            let dij = if i == j {
                (f(&shift(i, h)) - 2.0 * f(u) + f(&shift(i, -h))) / (h * h)
            } else {
                let mut pp = u.to_vec();
                pp[i] += h;
                pp[j] += h;
                let mut pm = u.to_vec();
                pm[i] += h;
                pm[j] -= h;
                let mut mp = u.to_vec();
                mp[i] -= h;
                mp[j] += h;
                let mut mm = u.to_vec();
                mm[i] -= h;
                mm[j] -= h;
                (f(&pp) - f(&pm) - f(&mp) + f(&mm)) / (4.0 * h * h)
            };
            let mut gamma_df = 0.0;
            for k in 0..n {
                let gamma: f64 =
                    (0..n).map(|l| 0.5 * gi[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)])).sum();
                gamma_df += gamma * df[k];
            }
            lap += gi[(i, j)] * (dij - gamma_df);
        }
    }
    lap
}

#[test]
fn jet_laplacian_matches_finite_differences() {
    let space_form = warpsimons::catalog::get_entry("space_form_models").unwrap();
    let codim_two = (
        ambient(1, "2 + sin(t)", Interval::REAL_LINE, 3, 1.0, 0),
        immersion(&["u", "v"], &["0.7 + 0.2*u + 0.1*v^2", "u", "v", "0.1*u*v"], &[[-0.5, 0.5]; 2]),
    );
    for (imm, cfg) in [(&space_form.imm, &space_form.cfg), (&codim_two.1, &codim_two.0)] {
        for u in [[0.1, -0.2], [-0.3, 0.25]] {
            let jet = evaluate_point(imm, cfg, &u).unwrap().derived.norms.unwrap().laplacian_alpha;
            let f = |x: &[f64]| extrinsic_at(imm, cfg, x).unwrap().alpha_frame_sq();
            let g = |x: &[f64]| extrinsic_at(imm, cfg, x).unwrap().induced_metric;
            let fd = laplacian_by_differences(&f, &g, &u, 1e-4);
            assert!(jet.abs() > 1e-3, "degenerate test surface: {jet}");
            assert!((jet - fd).abs() <= 1e-4 * jet.abs().max(1e-3), "{jet} vs {fd}");
        }
    }
}

#[test]
fn weingarten_and_structure_equations_on_the_catalog() {
    for entry in warpsimons::catalog::list() {
        for u in common::interior_points(entry.sample_region()) {
            let d = extrinsic_at(&entry.imm, &entry.cfg, &u).unwrap();
            let s = &d.structure;
            assert!(s.weingarten.abs <= 1e-10, "{}: {:e}", entry.name, s.weingarten.abs);
            for r in [&s.ambient_dt, &s.tangent_t, &s.normal_xi, &s.frame] {
                assert!(r.rel() <= 1e-8, "{}: {:e}", entry.name, r.rel());
            }
        }
    }
}
