use std::collections::HashMap;

use super::{BinaryOp, Constant, Expr, Node, UnaryFn};

/// Symbolic partial differentiation with a persistent memo table.
///
/// The cache is keyed by node identity and coordinate, so differentiating many
/// expressions that share subtrees (the components of a tensor field, say)
/// produces derivatives that share subtrees too.
#[derive(Default)]
pub struct Differentiator {
    cache: HashMap<(usize, usize), (Expr, Expr)>,
}

impl Differentiator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cached(&self) -> usize {
        self.cache.len()
    }

    /// Records a known derivative of `e`, used in place of the rule-based one.
    pub fn seed(&mut self, e: &Expr, coord: usize, d: Expr) {
        self.cache.insert((e.ptr_key(), coord), (e.clone(), d));
    }

    /// Returns `∂e/∂x^coord`.
    pub fn diff(&mut self, e: &Expr, coord: usize) -> Expr {
        let key = (e.ptr_key(), coord);
        if let Some((_, d)) = self.cache.get(&key) {
            return d.clone();
        }
        let d = match e.node() {
            Node::Const(_) | Node::Param(_) => Expr::zero(),
            Node::Coord(i) => {
                if *i == coord {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Node::Unary(f, a) => {
                let da = self.diff(a, coord);
                if da.is_zero() {
                    Expr::zero()
                } else {
                    chain(*f, e, a, da)
                }
            }
            Node::Pow(a, q) => {
                let da = self.diff(a, coord);
                if da.is_zero() {
                    Expr::zero()
                } else {
                    let lowered = Expr::pow(a.clone(), q.sub(Constant::int(1)));
                    Expr::mul(Expr::mul(Expr::constant(*q), lowered), da)
                }
            }
            Node::Binary(op, a, b) => {
                let da = self.diff(a, coord);
                let db = self.diff(b, coord);
                match op {
                    BinaryOp::Add => Expr::add(da, db),
                    BinaryOp::Sub => Expr::sub(da, db),
                    BinaryOp::Mul => Expr::add(Expr::mul(da, b.clone()), Expr::mul(a.clone(), db)),
                    BinaryOp::Div => {
                        // (a/b)' = a'/b - (a/b) * b'/b
                        let first = Expr::div(da, b.clone());
                        let second = if db.is_zero() {
                            Expr::zero()
                        } else {
                            Expr::div(Expr::mul(e.clone(), db), b.clone())
                        };
                        Expr::sub(first, second)
                    }
                }
            }
        };
        self.cache.insert(key, (e.clone(), d.clone()));
        d
    }
}

fn chain(f: UnaryFn, e: &Expr, a: &Expr, da: Expr) -> Expr {
    let outer = match f {
        UnaryFn::Neg => return Expr::neg(da),
        UnaryFn::Sin => Expr::cos(a.clone()),
        UnaryFn::Cos => Expr::neg(Expr::sin(a.clone())),
        UnaryFn::Tan => Expr::div(
            Expr::one(),
            Expr::pow(Expr::cos(a.clone()), Constant::int(2)),
        ),
        UnaryFn::Exp => e.clone(),
        UnaryFn::Ln => return Expr::div(da, a.clone()),
        UnaryFn::Sqrt => return Expr::div(da, Expr::mul(Expr::int(2), e.clone())),
        UnaryFn::Sinh => Expr::unary(UnaryFn::Cosh, a.clone()),
        UnaryFn::Cosh => Expr::unary(UnaryFn::Sinh, a.clone()),
    };
    Expr::mul(outer, da)
}

/// One-shot `∂e/∂x^coord`.
pub fn differentiate(e: &Expr, coord: usize) -> Expr {
    Differentiator::new().diff(e, coord)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{evaluate, parse, Point};

    const SCHW: [&str; 4] = ["t", "r", "theta", "phi"];

    #[test]
    fn power_rule() {
        let e = parse("r^2", &SCHW, &[]).unwrap();
        let d = differentiate(&e, 1);
        assert_eq!(d, Expr::mul(Expr::int(2), Expr::coord(1)));
    }

    #[test]
    fn no_dependence_is_structural_zero() {
        let e = parse("sin(theta)", &SCHW, &[]).unwrap();
        assert!(differentiate(&e, 0).is_zero());
    }

    #[test]
    fn lapse_derivative_matches_value_and_finite_difference() {
        let e = parse("-(1-2*M/r)", &SCHW, &["M"]).unwrap();
        let d = differentiate(&e, 1);
        let at = |r: f64| Point::new(vec![0.0, r, 1.0, 0.0]).with_param("M", 1.0);
        let exact = evaluate(&d, &at(4.0)).unwrap();
        assert!((exact + 0.125).abs() < 1e-15);
        let h = 1e-5;
        let fd = (evaluate(&e, &at(4.0 + h)).unwrap() - evaluate(&e, &at(4.0 - h)).unwrap()) / (2.0 * h);
        assert!((fd - exact).abs() < 1e-7, "fd {fd} vs {exact}");
    }

    #[test]
    fn shared_subtrees_differentiate_once() {
        let x = Expr::coord(0);
        let s = Expr::sin(x.clone());
        let a = Expr::mul(s.clone(), s.clone());
        let b = Expr::add(s.clone(), x);
        let mut d = Differentiator::new();
        let da = d.diff(&a, 0);
        let db = d.diff(&b, 0);
        let cos_in_a = match da.node() {
            Node::Binary(BinaryOp::Add, l, _) => match l.node() {
                Node::Binary(BinaryOp::Mul, c, _) => c.clone(),
                other => panic!("{other:?}"),
            },
            other => panic!("{other:?}"),
        };
        let cos_in_b = match db.node() {
            Node::Binary(BinaryOp::Add, l, _) => l.clone(),
            other => panic!("{other:?}"),
        };
        assert!(cos_in_a.ptr_eq(&cos_in_b));
    }
}
