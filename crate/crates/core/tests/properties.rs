use std::sync::Arc;

use proptest::prelude::*;

use wstar::expr::{differentiate, evaluate, parse, simplify, BinaryOp, Constant, Expr, Node, Point, UnaryFn};
use wstar::geometry::{Geometry, MetricSpec};
use wstar::wstar::{self as ws, Evaluator};

const COORDS: [&str; 2] = ["x", "y"];
const PARAMS: [&str; 1] = ["a"];

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (-6i64..=6).prop_map(Expr::int),
        (-5i64..=5, 1i64..=4).prop_map(|(n, d)| Expr::rational(n, d)),
        (0usize..2).prop_map(Expr::coord),
        Just(Expr::param("a")),
    ]
}

/// Trees built without the simplifying constructors.
fn raw_expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 24, 2, |inner| {
        let bin = |op| move |(a, b)| Expr::new(Node::Binary(op, a, b));
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(bin(BinaryOp::Add)),
            (inner.clone(), inner.clone()).prop_map(bin(BinaryOp::Sub)),
            (inner.clone(), inner.clone()).prop_map(bin(BinaryOp::Mul)),
            (inner.clone(), inner.clone()).prop_map(bin(BinaryOp::Div)),
            inner.clone().prop_map(|a| Expr::new(Node::Unary(UnaryFn::Neg, a))),
            inner.clone().prop_map(|a| Expr::new(Node::Unary(UnaryFn::Sin, a))),
            inner.clone().prop_map(|a| Expr::new(Node::Unary(UnaryFn::Cos, a))),
            (inner.clone(), -3i64..=3).prop_map(|(a, k)| Expr::new(Node::Pow(a, Constant::int(k)))),
            inner.prop_map(|a| Expr::new(Node::Pow(a, Constant::rational(1, 2)))),
        ]
    })
}

fn point() -> impl Strategy<Value = Point> {
    (0.1f64..2.0, -2.0f64..2.0, 0.5f64..1.5).prop_map(|(x, y, a)| Point::new(vec![x, y]).with_param("a", a))
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn simplify_preserves_value(e in raw_expr(), p in point()) {
        if let Ok(v) = evaluate(&e, &p) {
            prop_assume!(v.is_finite() && v.abs() < 1e8);
            let s = evaluate(&simplify(&e), &p);
            prop_assert!(s.as_ref().is_ok_and(|s| close(v, *s, 1e-9)), "{e} -> {} : {v} vs {s:?}", simplify(&e));
        }
    }

    #[test]
    fn simplify_never_grows_and_is_idempotent(e in raw_expr()) {
        let s = simplify(&e);
        prop_assert!(s.node_count() <= e.node_count(), "{e} -> {s}");
        prop_assert_eq!(simplify(&s), s);
    }

    #[test]
    fn printed_expressions_parse_back(e in raw_expr(), p in point()) {
        let s = simplify(&e);
        let text = s.display_with(&COORDS.map(String::from)).to_string();
        let back = parse(&text, &COORDS, &PARAMS).unwrap_or_else(|err| panic!("{text}: {err}"));
        // decimals read back as exact rationals, so only their value survives
        if !text.contains('.') {
            prop_assert_eq!(simplify(&back), s.clone(), "{}", text);
        }
        if let Ok(v) = evaluate(&s, &p) {
            prop_assume!(v.is_finite());
            let w = evaluate(&back, &p).unwrap();
            prop_assert!(close(v, w, 1e-12));
        }
    }

    #[test]
    fn derivative_matches_central_differences(e in raw_expr(), p in point(), axis in 0usize..2) {
        let f = |q: &Point| evaluate(&e, q).ok().filter(|v| v.is_finite());
        let fd = |h: f64| Some((f(&p.shifted(axis, h))? - f(&p.shifted(axis, -h))?) / (2.0 * h));
        let (Some(d1), Some(d2)) = (fd(1e-4), fd(5e-5)) else { return Ok(()) };
        prop_assume!(f(&p).is_some_and(|v| v.abs() < 1e4));
        // only where the difference quotient has converged
        prop_assume!(close(d1, d2, 1e-6));
        let d = evaluate(&differentiate(&e, axis), &p);
        prop_assert!(d.as_ref().is_ok_and(|d| close(*d, d2, 1e-5)), "d/d{} {e} = {d:?}, fd {d2}", COORDS[axis]);
    }
}

/// `η + h` with `h` linear in the coordinates.
fn metric(c: &[f64]) -> MetricSpec {
    let mut b = MetricSpec::builder("random", &["t", "x", "y", "z"]).dim(4);
    for v in ["t", "x", "y", "z"] {
        b = b.domain(v, -0.5, 0.5);
    }
    let base = [-1.0, 1.0, 1.0, 1.0];
    let mut k = 0;
    for i in 0..4 {
        for j in i..4 {
            let eta = if i == j { base[i] } else { 0.0 };
            let text = format!(
                "{eta} + ({})*t*x + ({})*y^2 + ({})*z",
                c[k] * 0.1,
                c[k + 1] * 0.1,
                c[k + 2] * 0.1
            );
            b = b.set_str(i, j, &text).unwrap();
            k += 3;
        }
    }
    b.build().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn wstar_identities_hold_on_random_metrics(c in prop::collection::vec(-1.0f64..1.0, 30), p in prop::collection::vec(-0.5f64..0.5, 4)) {
        let geo = Arc::new(Geometry::new(metric(&c)).unwrap());
        let ev = Evaluator::new(geo.clone()).unwrap();
        let s = ev.at(&geo.metric().point(p)).unwrap();
        let within = |r: ws::Residual, rel: f64| r.value <= rel * r.scale;
        prop_assert!(within(ws::wstar_contraction_residual(&s), 1e-9));
        prop_assert!(within(ws::divergence_corrected_residual(&s), 1e-9));
        prop_assert!(within(ws::wstar_bianchi_residual(&s).identity, 1e-9));
        prop_assert!(within(ws::wstar_semisymmetry_residual(&s).contraction, 1e-9));
        prop_assert!(within(ws::riemann_symmetry_residual(&s), 1e-12));
        prop_assert!(within(ws::second_bianchi_residual(&s), 1e-9));
        prop_assert!(within(ws::inverse_residual(&s), 1e-12));
        let k = ws::krupka_oracle(&s.wstar_mixed).unwrap();
        prop_assert!(k.reconstruction_residual(&s.wstar_mixed) < 1e-12 && k.trace_residual() < 1e-12);
    }
}
