use std::fmt;
use std::hash::{Hash, Hasher};

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, Zero};

use super::UnaryFn;

/// Numeric literal: exact rational when possible, double otherwise.
///
/// Arithmetic on two rationals stays exact until an `i64` overflow, at which
/// point the result degrades to a float.
#[derive(Debug, Clone, Copy)]
pub enum Constant {
    Rational(Ratio<i64>),
    Float(f64),
}

impl Constant {
    pub fn int(n: i64) -> Self {
        Constant::Rational(Ratio::from_integer(n))
    }

    /// # Panics
    /// If `den` is zero.
    pub fn rational(num: i64, den: i64) -> Self {
        Constant::Rational(Ratio::new(num, den))
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Constant::Rational(r) => *r.numer() as f64 / *r.denom() as f64,
            Constant::Float(x) => x,
        }
    }

    pub fn is_zero(self) -> bool {
        match self {
            Constant::Rational(r) => r.is_zero(),
            Constant::Float(x) => x == 0.0,
        }
    }

    pub fn is_one(self) -> bool {
        match self {
            Constant::Rational(r) => r.is_one(),
            Constant::Float(x) => x == 1.0,
        }
    }

    pub fn is_minus_one(self) -> bool {
        match self {
            Constant::Rational(r) => r == Ratio::from_integer(-1),
            Constant::Float(x) => x == -1.0,
        }
    }

    pub fn is_negative(self) -> bool {
        match self {
            Constant::Rational(r) => r.is_negative(),
            Constant::Float(x) => x < 0.0,
        }
    }

    /// Integer value, if this is an exact integer.
    pub fn as_integer(self) -> Option<i64> {
        match self {
            Constant::Rational(r) if r.is_integer() => Some(*r.numer()),
            _ => None,
        }
    }

    fn combine(
        self,
        other: Constant,
        exact: impl Fn(&Ratio<i64>, &Ratio<i64>) -> Option<Ratio<i64>>,
        float: impl Fn(f64, f64) -> f64,
    ) -> Constant {
        if let (Constant::Rational(a), Constant::Rational(b)) = (self, other) {
            if let Some(r) = exact(&a, &b) {
                return Constant::Rational(r);
            }
        }
        Constant::Float(float(self.to_f64(), other.to_f64()))
    }

    pub fn add(self, other: Constant) -> Constant {
        self.combine(other, |a, b| a.checked_add(b), |a, b| a + b)
    }

    pub fn sub(self, other: Constant) -> Constant {
        self.combine(other, |a, b| a.checked_sub(b), |a, b| a - b)
    }

    pub fn mul(self, other: Constant) -> Constant {
        self.combine(other, |a, b| a.checked_mul(b), |a, b| a * b)
    }

    /// Division; callers must not divide by an exact zero.
    pub fn div(self, other: Constant) -> Constant {
        self.combine(
            other,
            |a, b| if b.is_zero() { None } else { a.checked_div(b) },
            |a, b| a / b,
        )
    }

    pub fn neg(self) -> Constant {
        match self {
            Constant::Rational(r) => match r.numer().checked_neg() {
                Some(n) => Constant::Rational(Ratio::new_raw(n, *r.denom())),
                None => Constant::Float(-self.to_f64()),
            },
            Constant::Float(x) => Constant::Float(-x),
        }
    }

    /// Folds `self^exponent`, or `None` when the value is undefined or would
    /// require a complex result.
    pub fn pow(self, exponent: Constant) -> Option<Constant> {
        if let (Constant::Rational(base), Some(n)) = (self, exponent.as_integer()) {
            if base.is_zero() && n < 0 {
                return None;
            }
            if let Ok(n32) = i32::try_from(n) {
                if let Some(r) = checked_ratio_pow(base, n32) {
                    return Some(Constant::Rational(r));
                }
            }
        }
        let b = self.to_f64();
        let q = exponent.to_f64();
        if b < 0.0 && exponent.as_integer().is_none() {
            return None;
        }
        if b == 0.0 && q < 0.0 {
            return None;
        }
        let v = b.powf(q);
        v.is_finite().then_some(Constant::Float(v))
    }

    /// Folds an elementary function; exact special values stay rational.
    pub fn apply(self, f: UnaryFn) -> Option<Constant> {
        if f == UnaryFn::Neg {
            return Some(self.neg());
        }
        if self.is_zero() {
            match f {
                UnaryFn::Sin | UnaryFn::Tan | UnaryFn::Sqrt | UnaryFn::Sinh => {
                    return Some(Constant::int(0))
                }
                UnaryFn::Cos | UnaryFn::Exp | UnaryFn::Cosh => return Some(Constant::int(1)),
                _ => {}
            }
        }
        if self.is_one() && matches!(f, UnaryFn::Ln | UnaryFn::Sqrt) {
            return Some(Constant::int(if f == UnaryFn::Ln { 0 } else { 1 }));
        }
        let x = self.to_f64();
        match f {
            UnaryFn::Ln if x <= 0.0 => return None,
            UnaryFn::Sqrt if x < 0.0 => return None,
            _ => {}
        }
        let v = f.apply(x);
        v.is_finite().then_some(Constant::Float(v))
    }
}

fn checked_ratio_pow(base: Ratio<i64>, n: i32) -> Option<Ratio<i64>> {
    let (base, n) = if n < 0 {
        (Ratio::<i64>::one().checked_div(&base)?, n.checked_neg()?)
    } else {
        (base, n)
    };
    let mut acc = Ratio::<i64>::one();
    for _ in 0..n {
        acc = acc.checked_mul(&base)?;
    }
    Some(acc)
}

impl PartialEq for Constant {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Constant::Rational(a), Constant::Rational(b)) => a == b,
            (Constant::Float(a), Constant::Float(b)) => a.to_bits() == b.to_bits(),
            _ => false,
        }
    }
}

impl Eq for Constant {}

impl Hash for Constant {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Constant::Rational(r) => {
                0u8.hash(state);
                r.hash(state);
            }
            Constant::Float(x) => {
                1u8.hash(state);
                x.to_bits().hash(state);
            }
        }
    }
}

impl From<f64> for Constant {
    fn from(x: f64) -> Self {
        Constant::Float(x)
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constant::Rational(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Constant::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Constant::Float(x) => {
                if x.fract() == 0.0 && x.abs() < 1e15 {
                    write!(f, "{x:.1}")
                } else {
                    write!(f, "{x}")
                }
            }
        }
    }
}

impl Constant {
    /// Parses an unsigned decimal literal (`3`, `0.05`, `1.5e-3`), exact when
    /// the value fits a reduced `i64` ratio.
    pub fn parse_decimal(text: &str) -> Option<Constant> {
        let value: f64 = text.parse().ok()?;
        if !value.is_finite() {
            return None;
        }
        Some(exact_decimal(text).map(Constant::Rational).unwrap_or(Constant::Float(value)))
    }
}

fn exact_decimal(text: &str) -> Option<Ratio<i64>> {
    let (mantissa, exp) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(pos) => (&mantissa[..pos], &mantissa[pos + 1..]),
        None => (mantissa, ""),
    };
    let digits = format!("{int_part}{frac_part}");
    let digits = digits.trim_start_matches('0');
    let numer: i64 = if digits.is_empty() { 0 } else { digits.parse().ok()? };
    let scale = exp.checked_sub(i32::try_from(frac_part.len()).ok()?)?;
    let ten = Ratio::from_integer(10i64);
    let factor = checked_ratio_pow(ten, scale)?;
    Ratio::from_integer(numer).checked_mul(&factor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_literals_are_exact() {
        assert_eq!(Constant::parse_decimal("0.05"), Some(Constant::rational(1, 20)));
        assert_eq!(Constant::parse_decimal("3"), Some(Constant::int(3)));
        assert_eq!(Constant::parse_decimal("1.5e-3"), Some(Constant::rational(3, 2000)));
        assert_eq!(Constant::parse_decimal("6.28"), Some(Constant::rational(157, 25)));
    }

    #[test]
    fn overflow_degrades_to_float() {
        let big = Constant::int(i64::MAX);
        match big.add(Constant::int(1)) {
            Constant::Float(x) => assert!((x - 9.223372036854776e18).abs() < 1e4),
            other => panic!("expected float, got {other:?}"),
        }
    }

    #[test]
    fn pow_folding() {
        assert_eq!(Constant::rational(2, 3).pow(Constant::int(2)), Some(Constant::rational(4, 9)));
        assert_eq!(Constant::int(2).pow(Constant::int(-1)), Some(Constant::rational(1, 2)));
        assert_eq!(Constant::int(0).pow(Constant::int(-1)), None);
        assert_eq!(Constant::int(-8).pow(Constant::rational(1, 3)), None);
    }
}
