//! Closed-form real expressions over coordinates and named parameters.
//!
//! An [`Expr`] is an immutable, reference-counted tree. Subtrees are shared
//! freely, so the structures produced by repeated differentiation are DAGs
//! rather than trees; evaluation goes through a [`Tape`] that visits every
//! distinct node once.
//!
//! Two families of constructors exist. [`Expr::new`] builds a node verbatim
//! (this is what the parser uses), while [`Expr::add`], [`Expr::mul`] and
//! friends apply local simplification rules: constant folding, `0`/`1`
//! identities and double-negation removal. [`simplify`] rebuilds an arbitrary
//! expression through the simplifying constructors.

mod constant;
mod diff;
mod display;
mod eval;
mod parse;

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

pub use constant::Constant;
pub use diff::{differentiate, Differentiator};
pub use eval::{evaluate, DomainKind, EvalError, Point, Tape};
pub use parse::{parse, ParseError};

/// Elementary functions known to the expression language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UnaryFn {
    Neg,
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
    Sinh,
    Cosh,
}

impl UnaryFn {
    pub fn name(self) -> &'static str {
        match self {
            UnaryFn::Neg => "-",
            UnaryFn::Sin => "sin",
            UnaryFn::Cos => "cos",
            UnaryFn::Tan => "tan",
            UnaryFn::Exp => "exp",
            UnaryFn::Ln => "ln",
            UnaryFn::Sqrt => "sqrt",
            UnaryFn::Sinh => "sinh",
            UnaryFn::Cosh => "cosh",
        }
    }

    /// Looks up a named function (`neg` is not callable by name).
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => UnaryFn::Sin,
            "cos" => UnaryFn::Cos,
            "tan" => UnaryFn::Tan,
            "exp" => UnaryFn::Exp,
            "ln" => UnaryFn::Ln,
            "sqrt" => UnaryFn::Sqrt,
            "sinh" => UnaryFn::Sinh,
            "cosh" => UnaryFn::Cosh,
            _ => return None,
        })
    }

    pub fn apply(self, x: f64) -> f64 {
        match self {
            UnaryFn::Neg => -x,
            UnaryFn::Sin => x.sin(),
            UnaryFn::Cos => x.cos(),
            UnaryFn::Tan => x.tan(),
            UnaryFn::Exp => x.exp(),
            UnaryFn::Ln => x.ln(),
            UnaryFn::Sqrt => x.sqrt(),
            UnaryFn::Sinh => x.sinh(),
            UnaryFn::Cosh => x.cosh(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinaryOp {
    pub fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
        }
    }
}

/// One node of an expression tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node {
    Const(Constant),
    /// Coordinate `x^i`, by position in the owning metric's coordinate list.
    Coord(usize),
    Param(Arc<str>),
    Unary(UnaryFn, Expr),
    Binary(BinaryOp, Expr, Expr),
    /// Power with a constant exponent.
    Pow(Expr, Constant),
}

/// Immutable shared expression.
#[derive(Clone)]
pub struct Expr(Arc<Node>);

impl Expr {
    /// Wraps a node without any simplification.
    pub fn new(node: Node) -> Self {
        Expr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn constant(c: Constant) -> Self {
        Expr::new(Node::Const(c))
    }

    pub fn int(n: i64) -> Self {
        Expr::constant(Constant::int(n))
    }

    pub fn rational(num: i64, den: i64) -> Self {
        Expr::constant(Constant::rational(num, den))
    }

    pub fn float(x: f64) -> Self {
        Expr::constant(Constant::Float(x))
    }

    pub fn zero() -> Self {
        Expr::int(0)
    }

    pub fn one() -> Self {
        Expr::int(1)
    }

    pub fn coord(index: usize) -> Self {
        Expr::new(Node::Coord(index))
    }

    pub fn param(name: &str) -> Self {
        Expr::new(Node::Param(Arc::from(name)))
    }

    pub fn as_const(&self) -> Option<Constant> {
        match self.node() {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const().is_some_and(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.as_const().is_some_and(|c| c.is_one())
    }

    pub fn ptr_eq(&self, other: &Expr) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub(crate) fn ptr_key(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    // ---- simplifying constructors ----

    pub fn add(a: Expr, b: Expr) -> Expr {
        if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
            return Expr::constant(x.add(y));
        }
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        if let Node::Unary(UnaryFn::Neg, inner) = b.node() {
            return Expr::sub(a, inner.clone());
        }
        if let Node::Unary(UnaryFn::Neg, inner) = a.node() {
            return Expr::sub(b, inner.clone());
        }
        Expr::new(Node::Binary(BinaryOp::Add, a, b))
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
            return Expr::constant(x.sub(y));
        }
        if b.is_zero() {
            return a;
        }
        if a.is_zero() {
            return Expr::neg(b);
        }
        if a.ptr_eq(&b) {
            return Expr::zero();
        }
        if let Node::Unary(UnaryFn::Neg, inner) = b.node() {
            return Expr::add(a, inner.clone());
        }
        Expr::new(Node::Binary(BinaryOp::Sub, a, b))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => return Expr::constant(x.mul(y)),
            (None, Some(_)) => return Expr::mul(b, a),
            (Some(c), None) => {
                if c.is_zero() {
                    return Expr::zero();
                }
                if c.is_one() {
                    return b;
                }
                if c.is_minus_one() {
                    return Expr::neg(b);
                }
                if let Node::Binary(BinaryOp::Mul, l, r) = b.node() {
                    if let Some(d) = l.as_const() {
                        return Expr::mul(Expr::constant(c.mul(d)), r.clone());
                    }
                }
                if let Node::Unary(UnaryFn::Neg, inner) = b.node() {
                    return Expr::mul(Expr::constant(c.neg()), inner.clone());
                }
            }
            (None, None) => {}
        }
        Expr::new(Node::Binary(BinaryOp::Mul, a, b))
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        if let Some(y) = b.as_const() {
            if let Some(x) = a.as_const() {
                if !y.is_zero() {
                    return Expr::constant(x.div(y));
                }
            }
            if y.is_one() {
                return a;
            }
            if y.is_minus_one() {
                return Expr::neg(a);
            }
        }
        if a.is_zero() && !b.is_zero() {
            return Expr::zero();
        }
        if a.ptr_eq(&b) {
            return Expr::one();
        }
        Expr::new(Node::Binary(BinaryOp::Div, a, b))
    }

    pub fn neg(a: Expr) -> Expr {
        if let Some(c) = a.as_const() {
            return Expr::constant(c.neg());
        }
        match a.node() {
            Node::Unary(UnaryFn::Neg, inner) => inner.clone(),
            Node::Binary(BinaryOp::Sub, l, r) => Expr::sub(r.clone(), l.clone()),
            _ => Expr::new(Node::Unary(UnaryFn::Neg, a)),
        }
    }

    pub fn pow(base: Expr, exponent: Constant) -> Expr {
        if exponent.is_zero() {
            return Expr::one();
        }
        if exponent.is_one() {
            return base;
        }
        if let Some(b) = base.as_const() {
            if let Some(folded) = b.pow(exponent) {
                return Expr::constant(folded);
            }
        }
        Expr::new(Node::Pow(base, exponent))
    }

    pub fn unary(f: UnaryFn, a: Expr) -> Expr {
        if f == UnaryFn::Neg {
            return Expr::neg(a);
        }
        if let Some(c) = a.as_const() {
            if let Some(folded) = c.apply(f) {
                return Expr::constant(folded);
            }
        }
        Expr::new(Node::Unary(f, a))
    }

    pub fn sin(a: Expr) -> Expr {
        Expr::unary(UnaryFn::Sin, a)
    }

    pub fn cos(a: Expr) -> Expr {
        Expr::unary(UnaryFn::Cos, a)
    }

    pub fn exp(a: Expr) -> Expr {
        Expr::unary(UnaryFn::Exp, a)
    }

    /// Sum of many terms, skipping structural zeros.
    pub fn sum<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
        terms.into_iter().fold(Expr::zero(), Expr::add)
    }

    /// Size of the expression as a tree (shared subtrees counted each time).
    pub fn node_count(&self) -> usize {
        fn walk(e: &Expr, memo: &mut HashMap<usize, usize>) -> usize {
            if let Some(&n) = memo.get(&e.ptr_key()) {
                return n;
            }
            let n = match e.node() {
                Node::Const(_) | Node::Coord(_) | Node::Param(_) => 1,
                Node::Unary(_, a) | Node::Pow(a, _) => 1usize.saturating_add(walk(a, memo)),
                Node::Binary(_, a, b) => 1usize
                    .saturating_add(walk(a, memo))
                    .saturating_add(walk(b, memo)),
            };
            memo.insert(e.ptr_key(), n);
            n
        }
        walk(self, &mut HashMap::new())
    }

    /// Number of distinct nodes reachable from this expression.
    pub fn dag_size(&self) -> usize {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(e) = stack.pop() {
            if !seen.insert(e.ptr_key()) {
                continue;
            }
            match e.node() {
                Node::Unary(_, a) | Node::Pow(a, _) => stack.push(a.clone()),
                Node::Binary(_, a, b) => {
                    stack.push(a.clone());
                    stack.push(b.clone());
                }
                _ => {}
            }
        }
        seen.len()
    }

    /// Largest coordinate index referenced, if any.
    pub fn max_coord(&self) -> Option<usize> {
        let mut best = None;
        self.visit(&mut |n| {
            if let Node::Coord(i) = n {
                best = best.max(Some(*i));
            }
        });
        best
    }

    /// Names of all parameters referenced.
    pub fn params(&self) -> Vec<String> {
        let mut out = std::collections::BTreeSet::new();
        self.visit(&mut |n| {
            if let Node::Param(p) = n {
                out.insert(p.to_string());
            }
        });
        out.into_iter().collect()
    }

    fn visit(&self, f: &mut dyn FnMut(&Node)) {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(e) = stack.pop() {
            if !seen.insert(e.ptr_key()) {
                continue;
            }
            f(e.node());
            match e.node() {
                Node::Unary(_, a) | Node::Pow(a, _) => stack.push(a.clone()),
                Node::Binary(_, a, b) => {
                    stack.push(a.clone());
                    stack.push(b.clone());
                }
                _ => {}
            }
        }
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.ptr_eq(other) || self.0 == other.0
    }
}

impl Eq for Expr {}

impl Hash for Expr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.hash(state)
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident, $ctor:ident) => {
        impl std::ops::$trait for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$ctor(self, rhs)
            }
        }
        impl std::ops::$trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::$ctor(self.clone(), rhs.clone())
            }
        }
    };
}

impl_binop!(Add, add, add);
impl_binop!(Sub, sub, sub);
impl_binop!(Mul, mul, mul);
impl_binop!(Div, div, div);

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

impl std::ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self.clone())
    }
}

/// Rebuilds `e` through the simplifying constructors.
///
/// The result is pointwise equal to `e` wherever `e` is defined, never has
/// more tree nodes, and `simplify(simplify(e)) == simplify(e)`.
pub fn simplify(e: &Expr) -> Expr {
    let mut memo = HashMap::new();
    simplify_memo(e, &mut memo)
}

fn simplify_memo(e: &Expr, memo: &mut HashMap<usize, (Expr, Expr)>) -> Expr {
    if let Some((_, out)) = memo.get(&e.ptr_key()) {
        return out.clone();
    }
    let out = match e.node() {
        Node::Const(_) | Node::Coord(_) | Node::Param(_) => e.clone(),
        Node::Unary(f, a) => Expr::unary(*f, simplify_memo(a, memo)),
        Node::Pow(a, q) => Expr::pow(simplify_memo(a, memo), *q),
        Node::Binary(op, a, b) => {
            let a = simplify_memo(a, memo);
            let b = simplify_memo(b, memo);
            match op {
                BinaryOp::Add => Expr::add(a, b),
                BinaryOp::Sub => Expr::sub(a, b),
                BinaryOp::Mul => Expr::mul(a, b),
                BinaryOp::Div => Expr::div(a, b),
            }
        }
    };
    memo.insert(e.ptr_key(), (e.clone(), out.clone()));
    out
}
