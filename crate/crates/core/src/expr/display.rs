use std::fmt;

use super::{BinaryOp, Constant, Expr, Node, UnaryFn};

const ADD: u8 = 1;
const MUL: u8 = 2;
const NEG: u8 = 3;
const POW: u8 = 4;
const ATOM: u8 = 5;

/// Renders an expression with the coordinate names of its metric.
pub struct Named<'a> {
    expr: &'a Expr,
    coords: &'a [String],
}

impl Expr {
    pub fn display_with<'a>(&'a self, coords: &'a [String]) -> Named<'a> {
        Named { expr: self, coords }
    }
}

fn const_prec(c: Constant) -> u8 {
    match c {
        Constant::Rational(r) if !r.is_integer() => MUL,
        _ if c.is_negative() => NEG,
        _ => ATOM,
    }
}

fn prec(e: &Expr) -> u8 {
    match e.node() {
        Node::Const(c) => const_prec(*c),
        Node::Coord(_) | Node::Param(_) => ATOM,
        Node::Unary(UnaryFn::Neg, _) => NEG,
        Node::Unary(..) => ATOM,
        Node::Pow(..) => POW,
        Node::Binary(BinaryOp::Add | BinaryOp::Sub, ..) => ADD,
        Node::Binary(BinaryOp::Mul | BinaryOp::Div, ..) => MUL,
    }
}

/// Whether `e`, printed at `min_prec`, ends in a bare `^q` that a following
/// `/n` would extend into a rational exponent.
fn ends_in_bare_power(e: &Expr, min_prec: u8) -> bool {
    if prec(e) < min_prec {
        return false;
    }
    match e.node() {
        Node::Pow(_, Constant::Rational(r)) => r.is_integer(),
        Node::Pow(_, Constant::Float(_)) => true,
        Node::Binary(BinaryOp::Mul | BinaryOp::Div, _, b) | Node::Unary(UnaryFn::Neg, b) => ends_in_bare_power(b, NEG),
        Node::Binary(BinaryOp::Add | BinaryOp::Sub, _, b) => ends_in_bare_power(b, MUL),
        _ => false,
    }
}

fn write_expr(
    f: &mut fmt::Formatter<'_>,
    e: &Expr,
    coords: Option<&[String]>,
    min_prec: u8,
) -> fmt::Result {
    let wrap = prec(e) < min_prec;
    if wrap {
        f.write_str("(")?;
    }
    match e.node() {
        Node::Const(c) => write!(f, "{c}")?,
        Node::Coord(i) => match coords.and_then(|names| names.get(*i)) {
            Some(name) => f.write_str(name)?,
            None => write!(f, "x{i}")?,
        },
        Node::Param(p) => f.write_str(p)?,
        Node::Unary(UnaryFn::Neg, a) => {
            f.write_str("-")?;
            write_expr(f, a, coords, NEG)?;
        }
        Node::Unary(func, a) => {
            write!(f, "{}(", func.name())?;
            write_expr(f, a, coords, 0)?;
            f.write_str(")")?;
        }
        Node::Pow(base, q) => {
            write_expr(f, base, coords, ATOM)?;
            match q {
                Constant::Rational(r) if !r.is_integer() => write!(f, "^({q})")?,
                _ => write!(f, "^{q}")?,
            }
        }
        Node::Binary(op, a, b) => {
            let (left, right) = match op {
                BinaryOp::Add | BinaryOp::Sub => (ADD, MUL),
                BinaryOp::Mul | BinaryOp::Div => (MUL, NEG),
            };
            if *op == BinaryOp::Div && ends_in_bare_power(a, left) {
                f.write_str("(")?;
                write_expr(f, a, coords, 0)?;
                f.write_str(")")?;
            } else {
                write_expr(f, a, coords, left)?;
            }
            match op {
                BinaryOp::Add | BinaryOp::Sub => write!(f, " {} ", op.symbol())?,
                _ => write!(f, "{}", op.symbol())?,
            }
            write_expr(f, b, coords, right)?;
        }
    }
    if wrap {
        f.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self, None, 0)
    }
}

impl fmt::Display for Named<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self.expr, Some(self.coords), 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn show(e: &Expr) -> String {
        e.display_with(&["x".to_string(), "y".to_string()]).to_string()
    }

    #[test]
    fn power_before_division_is_bracketed() {
        let x = Expr::coord(0);
        let e = Expr::new(Node::Binary(BinaryOp::Div, Expr::pow(x.clone(), Constant::int(-1)), Expr::int(2)));
        assert_eq!(show(&e), "(x^-1)/2");
        let e = Expr::new(Node::Binary(
            BinaryOp::Div,
            Expr::mul(Expr::coord(1), Expr::pow(x.clone(), Constant::int(2))),
            Expr::int(3),
        ));
        assert_eq!(show(&e), "(y*x^2)/3");
        assert_eq!(show(&Expr::pow(x, Constant::rational(2, 3))), "x^(2/3)");
    }

    #[test]
    fn printed_text_parses_to_the_same_tree() {
        for text in ["x^2 - 3*y", "-(x + y)*sin(x)", "x/(y*2)", "exp(-x^2)/y^(1/2)"] {
            let e = parse(text, &["x", "y"], &[] as &[&str]).unwrap();
            let again = parse(&show(&e), &["x", "y"], &[] as &[&str]).unwrap();
            assert_eq!(again, e, "{text} -> {}", show(&e));
        }
    }
}
