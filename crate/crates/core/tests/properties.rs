use std::collections::HashMap;

use proptest::prelude::*;
use warpsimons::catalog;
use warpsimons::exprlang::{parse, BinOp, Expr, Func, JetEnv, Rational};
use warpsimons::extrinsic::extrinsic_at;
use warpsimons::identities::{fit_psi, pseudo_parallel_blocks};
use warpsimons::jets::{Jet, JetShape};

const SHAPES: [(usize, usize); 4] = [(1, 4), (2, 4), (3, 3), (6, 2)];

fn jet_triple() -> impl Strategy<Value = (Jet, Jet, Jet)> {
    (0..SHAPES.len()).prop_flat_map(|k| {
        let (v, d) = SHAPES[k];
        let shape = JetShape::new(v, d).unwrap();
        let coeffs = prop::collection::vec(-2.0..2.0f64, shape.len());
        (coeffs.clone(), coeffs.clone(), coeffs).prop_map(move |(a, b, c)| {
            (
                Jet::from_coeffs(shape, a).unwrap(),
                Jet::from_coeffs(shape, b).unwrap(),
                Jet::from_coeffs(shape, c).unwrap(),
            )
        })
    })
}

fn close(a: &Jet, b: &Jet, tol: f64) -> bool {
    let scale = a.coeffs().iter().chain(b.coeffs()).fold(1.0_f64, |m, v| m.max(v.abs()));
    a.coeffs().iter().zip(b.coeffs()).all(|(x, y)| (x - y).abs() <= tol * scale)
}

/// `Σ c_k x^k` on jets by Horner's rule.
fn poly_jet(c: &[f64], x: &Jet) -> Jet {
    let shape = x.shape();
    c.iter().rev().fold(shape.zero(), |acc, ck| acc.try_mul(x).unwrap().try_add(&shape.constant(*ck)).unwrap())
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Coefficients of `p(q(x))` as a polynomial.
fn compose(p: &[f64], q: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0];
    let mut power = vec![1.0];
    for ck in p {
        if out.len() < power.len() {
            out.resize(power.len(), 0.0);
        }
        for (o, v) in out.iter_mut().zip(&power) {
            *o += ck * v;
        }
        power = poly_mul(&power, q);
    }
    out
}

/// Taylor coefficients at `x0` of the polynomial `c`, up to `degree`.
fn shifted(c: &[f64], x0: f64, degree: usize) -> Vec<f64> {
    let mut out = vec![0.0; degree + 1];
    for (k, o) in out.iter_mut().enumerate() {
        // Σ_j c_j binom(j, k) x0^(j−k)
        for (j, cj) in c.iter().enumerate().skip(k) {
            let binom = (0..k).fold(1.0, |b, i| b * (j - i) as f64 / (i + 1) as f64);
            *o += cj * binom * x0.powi((j - k) as i32);
        }
    }
    out
}

fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
    Expr::Binary(op, Box::new(a), Box::new(b))
}

fn call(f: Func, a: Expr) -> Expr {
    Expr::Call(f, Box::new(a))
}

fn one_plus_sq(a: Expr) -> Expr {
    bin(BinOp::Add, Expr::Num(1.0), Expr::Pow(Box::new(a), Rational::integer(2)))
}

/// Expression trees in `u`, `v` built so every subexpression stays inside
/// the domains of the functions applied to it.
fn safe_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        Just(Expr::var("u")),
        Just(Expr::var("v")),
        (1..8i32).prop_map(|k| Expr::Num(f64::from(k) / 4.0)),
        Just(Expr::Pi),
    ];
    leaf.prop_recursive(5, 48, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(move |(a, b)| bin(BinOp::Add, a, b)),
            (inner.clone(), inner.clone()).prop_map(move |(a, b)| bin(BinOp::Sub, a, b)),
            (inner.clone(), inner.clone()).prop_map(move |(a, b)| bin(BinOp::Mul, a, b)),
            (inner.clone(), inner.clone()).prop_map(move |(a, b)| bin(BinOp::Div, a, one_plus_sq(b))),
            inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
            (inner.clone(), prop::sample::select(vec![Func::Sin, Func::Cos, Func::Tanh, Func::Arctan]))
                .prop_map(move |(a, f)| call(f, a)),
            (inner.clone(), prop::sample::select(vec![Func::Exp, Func::Sinh, Func::Cosh]))
                .prop_map(move |(a, f)| call(f, call(Func::Sin, a))),
            inner.clone().prop_map(move |a| call(Func::Log, bin(BinOp::Add, Expr::Num(2.0), call(Func::Cos, a)))),
            inner.clone().prop_map(move |a| call(Func::Sqrt, one_plus_sq(a))),
            inner.clone().prop_map(move |a| call(Func::Arcsin, bin(BinOp::Div, call(Func::Tanh, a), Expr::Num(2.0)))),
            (inner.clone(), prop::sample::select(vec![(2, 1), (3, 1), (1, 3), (-1, 2), (-2, 3)])).prop_map(
                move |(a, (p, q))| {
                    let base = if q == 1 { a } else { one_plus_sq(a) };
                    Expr::Pow(Box::new(base), Rational::new(p, q).unwrap())
                }
            ),
        ]
    })
}

fn scalar(e: &Expr, u: f64, v: f64) -> f64 {
    let env = HashMap::from([("u".to_string(), u), ("v".to_string(), v)]);
    e.eval_f64(&env).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn ring_axioms((a, b, c) in jet_triple()) {
        let ab_c = a.try_mul(&b).unwrap().try_mul(&c).unwrap();
        let a_bc = a.try_mul(&b.try_mul(&c).unwrap()).unwrap();
        prop_assert!(close(&ab_c, &a_bc, 1e-12));
        let lhs = a.try_mul(&b.try_add(&c).unwrap()).unwrap();
        let rhs = a.try_mul(&b).unwrap().try_add(&a.try_mul(&c).unwrap()).unwrap();
        prop_assert!(close(&lhs, &rhs, 1e-12));
        prop_assert!(close(&a.try_mul(&b).unwrap(), &b.try_mul(&a).unwrap(), 1e-15));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn chain_rule_for_polynomials(
        p in prop::collection::vec(-2.0..2.0f64, 1..=5),
        q in prop::collection::vec(-2.0..2.0f64, 1..=5),
        x0 in -1.5..1.5f64,
    ) {
        let x = JetShape::new(1, 4).unwrap().seed(0, x0).unwrap();
        let jet = poly_jet(&p, &poly_jet(&q, &x));
        let expected = shifted(&compose(&p, &q), x0, 4);
        let scale = expected.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        for (k, e) in expected.iter().enumerate() {
            prop_assert!((jet.coeffs()[k] - e).abs() <= 1e-12 * scale, "order {k}: {} vs {e}", jet.coeffs()[k]);
        }
    }

    #[test]
    fn truncating_degree_four_gives_degree_three(e in safe_expr(), u in -1.0..1.0f64, v in -1.0..1.0f64) {
        let at = |degree| {
            let env = JetEnv::new(JetShape::new(2, degree).unwrap())
                .with_seed("u", 0, u).unwrap()
                .with_seed("v", 1, v).unwrap();
            e.eval_jet(&env).unwrap()
        };
        prop_assert_eq!(at(4).truncate(3).unwrap(), at(3));
    }

    #[test]
    fn print_then_parse_is_a_fixed_point(e in safe_expr()) {
        let first = parse(&e.to_string(), &["u", "v"]).unwrap();
        let second = parse(&first.to_string(), &["u", "v"]).unwrap();
        prop_assert_eq!(first, second);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn first_order_jets_match_central_differences(e in safe_expr(), u in -1.0..1.0f64, v in -1.0..1.0f64) {
        let env = JetEnv::new(JetShape::new(2, 1).unwrap())
            .with_seed("u", 0, u).unwrap()
            .with_seed("v", 1, v).unwrap();
        let jet = e.eval_jet(&env).unwrap();
        let h = 1e-5;
        let du = (scalar(&e, u + h, v) - scalar(&e, u - h, v)) / (2.0 * h);
        let dv = (scalar(&e, u, v + h) - scalar(&e, u, v - h)) / (2.0 * h);
        for (got, fd) in [(jet.partial_value(0), du), (jet.partial_value(1), dv)] {
            prop_assert!((got - fd).abs() <= 1e-6 * got.abs().max(1.0), "{e}: jet {got}, differences {fd}");
        }
        prop_assert!((jet.value() - scalar(&e, u, v)).abs() <= 1e-12 * jet.value().abs().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn pseudo_residual_is_affine_in_psi(
        th in 0.7..2.4f64,
        ph in -2.0..2.0f64,
        psi1 in -3.0..3.0f64,
        psi2 in -3.0..3.0f64,
    ) {
        let entry = catalog::get_entry("veronese_RxS4").unwrap();
        let data = extrinsic_at(&entry.imm, &entry.cfg, &[th, ph]).unwrap();
        let (r0, r1) = pseudo_parallel_blocks(&data);
        for (a, b) in r0.iter().zip(&r1) {
            let at1 = a + psi1 * b;
            let at2 = a + psi2 * b;
            prop_assert!((at1 + (psi2 - psi1) * b - at2).abs() <= 1e-12);
        }
        // the fitted ψ leaves a residual orthogonal to the ψ block
        let fit = fit_psi(&data);
        let dot: f64 = r0.iter().zip(&r1).map(|(a, b)| (a + fit.psi_hat * b) * b).sum();
        prop_assert!(dot.abs() <= 1e-12);
    }
}

#[test]
fn fitted_psi_recovers_gauss_curvature_of_tilted_surfaces() {
    // Every surface in a three-dimensional ambient is pseudo-parallel with
    // ψ equal to its Gauss curvature.
    let entry = catalog::get_entry("space_form_models").unwrap();
    for u in [[0.1, -0.2], [-0.4, 0.3], [0.5, 0.5]] {
        let data = extrinsic_at(&entry.imm, &entry.cfg, &u).unwrap();
        let fit = fit_psi(&data);
        let k = warpsimons::identities::gauss_curvature(&data).get(0, 1, 1, 0);
        assert!((fit.psi_hat - k).abs() < 1e-10, "{} vs {k}", fit.psi_hat);
        assert!(fit.residual_norm < 1e-12);
    }
}
