use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use super::{BinaryOp, Expr, Node, UnaryFn};

/// A coordinate point together with parameter bindings.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub coords: Vec<f64>,
    pub params: BTreeMap<String, f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point {
            coords,
            params: BTreeMap::new(),
        }
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Copy of the point with coordinate `axis` shifted by `delta`.
    pub fn shifted(&self, axis: usize, delta: f64) -> Point {
        let mut p = self.clone();
        p.coords[axis] += delta;
        p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    DivisionByZero,
    LogOfNonPositive,
    SqrtOfNegative,
    NegativeBaseFractionalPower,
    NonFinite,
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DomainKind::DivisionByZero => "division by zero",
            DomainKind::LogOfNonPositive => "logarithm of a non-positive value",
            DomainKind::SqrtOfNegative => "square root of a negative value",
            DomainKind::NegativeBaseFractionalPower => "fractional power of a negative value",
            DomainKind::NonFinite => "non-finite result",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("{kind} in `{expr}`")]
    Domain { kind: DomainKind, expr: String },
    #[error("parameter `{0}` is not bound at the evaluation point")]
    UnboundParameter(String),
    #[error("coordinate x{index} is outside a point of dimension {dim}")]
    CoordinateOutOfRange { index: usize, dim: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Op {
    Const(u64),
    Coord(usize),
    Param(usize),
    Unary(UnaryFn, u32),
    Binary(BinaryOp, u32, u32),
    PowInt(u32, i32),
    PowReal(u32, u64),
}

/// Flattened, common-subexpression-deduplicated evaluation program for a set
/// of root expressions.
///
/// Every distinct node is evaluated exactly once per point, which is what
/// keeps the DAGs produced by repeated differentiation tractable.
#[derive(Clone)]
pub struct Tape {
    ops: Vec<Op>,
    sources: Vec<Expr>,
    roots: Vec<u32>,
    params: Vec<Arc<str>>,
}

impl Tape {
    pub fn new<'a, I: IntoIterator<Item = &'a Expr>>(roots: I) -> Tape {
        let mut builder = Builder::default();
        let roots = roots.into_iter().map(|e| builder.intern(e)).collect();
        Tape {
            ops: builder.ops,
            sources: builder.sources,
            roots,
            params: builder.params,
        }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn outputs(&self) -> usize {
        self.roots.len()
    }

    /// Evaluates every root at `p`, in the order they were given.
    pub fn eval(&self, p: &Point) -> Result<Vec<f64>, EvalError> {
        let params = self
            .params
            .iter()
            .map(|name| {
                p.params
                    .get(name.as_ref())
                    .copied()
                    .ok_or_else(|| EvalError::UnboundParameter(name.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut vals = vec![0.0f64; self.ops.len()];
        for (i, op) in self.ops.iter().enumerate() {
            let v = match *op {
                Op::Const(bits) => f64::from_bits(bits),
                Op::Coord(c) => *p.coords.get(c).ok_or(EvalError::CoordinateOutOfRange {
                    index: c,
                    dim: p.dim(),
                })?,
                Op::Param(k) => params[k],
                Op::Unary(f, a) => {
                    let x = vals[a as usize];
                    match f {
                        UnaryFn::Ln if x <= 0.0 => return Err(self.domain(i, DomainKind::LogOfNonPositive)),
                        UnaryFn::Sqrt if x < 0.0 => return Err(self.domain(i, DomainKind::SqrtOfNegative)),
                        _ => f.apply(x),
                    }
                }
                Op::Binary(op, a, b) => {
                    let (x, y) = (vals[a as usize], vals[b as usize]);
                    match op {
                        BinaryOp::Add => x + y,
                        BinaryOp::Sub => x - y,
                        BinaryOp::Mul => x * y,
                        BinaryOp::Div => {
                            if y == 0.0 {
                                return Err(self.domain(i, DomainKind::DivisionByZero));
                            }
                            x / y
                        }
                    }
                }
                Op::PowInt(a, n) => {
                    let x = vals[a as usize];
                    if x == 0.0 && n < 0 {
                        return Err(self.domain(i, DomainKind::DivisionByZero));
                    }
                    x.powi(n)
                }
                Op::PowReal(a, bits) => {
                    let x = vals[a as usize];
                    let q = f64::from_bits(bits);
                    if x < 0.0 {
                        return Err(self.domain(i, DomainKind::NegativeBaseFractionalPower));
                    }
                    if x == 0.0 && q < 0.0 {
                        return Err(self.domain(i, DomainKind::DivisionByZero));
                    }
                    x.powf(q)
                }
            };
            if !v.is_finite() {
                return Err(self.domain(i, DomainKind::NonFinite));
            }
            vals[i] = v;
        }
        Ok(self.roots.iter().map(|&r| vals[r as usize]).collect())
    }

    fn domain(&self, i: usize, kind: DomainKind) -> EvalError {
        let mut expr = self.sources[i].to_string();
        if expr.len() > 240 {
            let mut cut = 240;
            while !expr.is_char_boundary(cut) {
                cut -= 1;
            }
            expr.truncate(cut);
            expr.push_str("...");
        }
        EvalError::Domain { kind, expr }
    }
}

#[derive(Default)]
struct Builder {
    ops: Vec<Op>,
    sources: Vec<Expr>,
    params: Vec<Arc<str>>,
    by_ptr: HashMap<usize, (Expr, u32)>,
    by_op: HashMap<Op, u32>,
}

impl Builder {
    fn intern(&mut self, root: &Expr) -> u32 {
        // Iterative post-order walk; expression depth can reach thousands.
        let mut stack: Vec<(Expr, bool)> = vec![(root.clone(), false)];
        while let Some((e, expanded)) = stack.pop() {
            if self.by_ptr.contains_key(&e.ptr_key()) {
                continue;
            }
            if !expanded {
                stack.push((e.clone(), true));
                match e.node() {
                    Node::Unary(_, a) | Node::Pow(a, _) => stack.push((a.clone(), false)),
                    Node::Binary(_, a, b) => {
                        stack.push((b.clone(), false));
                        stack.push((a.clone(), false));
                    }
                    _ => {}
                }
                continue;
            }
            let id = |b: &Builder, x: &Expr| b.by_ptr[&x.ptr_key()].1;
            let op = match e.node() {
                Node::Const(c) => Op::Const(c.to_f64().to_bits()),
                Node::Coord(i) => Op::Coord(*i),
                Node::Param(name) => {
                    let k = match self.params.iter().position(|p| p == name) {
                        Some(k) => k,
                        None => {
                            self.params.push(name.clone());
                            self.params.len() - 1
                        }
                    };
                    Op::Param(k)
                }
                Node::Unary(f, a) => Op::Unary(*f, id(self, a)),
                Node::Binary(op, a, b) => Op::Binary(*op, id(self, a), id(self, b)),
                Node::Pow(a, q) => match q.as_integer().and_then(|n| i32::try_from(n).ok()) {
                    Some(n) => Op::PowInt(id(self, a), n),
                    None => Op::PowReal(id(self, a), q.to_f64().to_bits()),
                },
            };
            let slot = match self.by_op.get(&op) {
                Some(&slot) => slot,
                None => {
                    let slot = u32::try_from(self.ops.len()).expect("tape exceeds u32 nodes");
                    self.ops.push(op);
                    self.sources.push(e.clone());
                    self.by_op.insert(op, slot);
                    slot
                }
            };
            self.by_ptr.insert(e.ptr_key(), (e.clone(), slot));
        }
        self.by_ptr[&root.ptr_key()].1
    }
}

/// Evaluates a single expression at `p`.
pub fn evaluate(e: &Expr, p: &Point) -> Result<f64, EvalError> {
    Ok(Tape::new([e]).eval(p)?[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, Constant};

    const SCHW: [&str; 4] = ["t", "r", "theta", "phi"];

    #[test]
    fn exact_rational_constant() {
        let e = Expr::constant(Constant::rational(3, 2));
        assert_eq!(evaluate(&e, &Point::new(vec![])).unwrap(), 1.5);
    }

    #[test]
    fn hand_expanded_angular_component() {
        let e = parse("r^2 * sin(theta)^2", &SCHW, &[]).unwrap();
        let p = Point::new(vec![0.0, 2.0, std::f64::consts::FRAC_PI_2, 0.0]);
        let oracle = 2.0 * 2.0 * (std::f64::consts::FRAC_PI_2.sin() * std::f64::consts::FRAC_PI_2.sin());
        assert_eq!(evaluate(&e, &p).unwrap(), oracle);
        assert_eq!(oracle, 4.0);
    }

    #[test]
    fn reciprocal_at_origin_is_domain_error() {
        let e = Expr::new(Node::Binary(BinaryOp::Div, Expr::one(), Expr::coord(1)));
        let err = evaluate(&e, &Point::new(vec![0.0, 0.0])).unwrap_err();
        assert!(matches!(
            err,
            EvalError::Domain { kind: DomainKind::DivisionByZero, ref expr } if expr == "1/x1"
        ));
    }

    #[test]
    fn exponential_growth() {
        let e = parse("exp(2*H*t)", &["t"], &["H"]).unwrap();
        let v = evaluate(&e, &Point::new(vec![1.0]).with_param("H", 0.5)).unwrap();
        assert_eq!(v, 1.0f64.exp());
        assert!((v - std::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        let p = Point::new(vec![-1.0]);
        let ln = parse("ln(x)", &["x"], &[] as &[&str]).unwrap();
        assert!(matches!(evaluate(&ln, &p), Err(EvalError::Domain { kind: DomainKind::LogOfNonPositive, .. })));
        let sq = parse("sqrt(x)", &["x"], &[] as &[&str]).unwrap();
        assert!(matches!(evaluate(&sq, &p), Err(EvalError::Domain { kind: DomainKind::SqrtOfNegative, .. })));
        let m = parse("M*x", &["x"], &["M"]).unwrap();
        assert_eq!(evaluate(&m, &p), Err(EvalError::UnboundParameter("M".into())));
    }

    #[test]
    fn structurally_equal_nodes_share_a_slot() {
        let a = parse("sin(x) + sin(x)", &["x"], &[] as &[&str]).unwrap();
        let tape = Tape::new([&a]);
        // x, sin(x), add
        assert_eq!(tape.len(), 3);
    }
}
