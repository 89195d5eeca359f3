use std::cmp::Ordering;
use std::fmt;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::ExactError;

/// Arbitrary precision rational, always stored in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

/// Shorthand for the rational `n/d`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"`, `"p"` or a decimal-free integer string.
pub fn parse_rational(s: &str) -> Result<Rational, ExactError> {
    let s = s.trim();
    let bad = || ExactError::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(ExactError::DivisionByZero);
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Canonical `p/q` (or `p`) rendering.
pub fn rat_str(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// A rational number or one of the two infinities.
///
/// The derived order puts `NegInf` below every finite value and `PosInf`
/// above.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtRational {
    NegInf,
    Finite(Rational),
    PosInf,
}

impl ExtRational {
    pub fn finite(n: i64, d: i64) -> Self {
        ExtRational::Finite(rat(n, d))
    }

    pub fn zero() -> Self {
        ExtRational::Finite(Rational::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtRational::Finite(_))
    }

    pub fn as_finite(&self) -> Option<&Rational> {
        match self {
            ExtRational::Finite(q) => Some(q),
            _ => None,
        }
    }

    /// Sign as -1, 0 or 1.
    pub fn signum(&self) -> i8 {
        match self {
            ExtRational::NegInf => -1,
            ExtRational::PosInf => 1,
            ExtRational::Finite(q) => match q.cmp(&Rational::zero()) {
                Ordering::Less => -1,
                Ordering::Equal => 0,
                Ordering::Greater => 1,
            },
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ExactError> {
        use ExtRational::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Ok(Finite(a + b)),
            (PosInf, NegInf) | (NegInf, PosInf) => Err(ExactError::Indeterminate("(+inf) + (-inf)")),
            (PosInf, _) | (_, PosInf) => Ok(PosInf),
            (NegInf, _) | (_, NegInf) => Ok(NegInf),
        }
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, ExactError> {
        self.checked_add(&other.clone().neg())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, ExactError> {
        use ExtRational::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Ok(Finite(a * b)),
            _ => {
                let s = self.signum() * other.signum();
                match s {
                    0 => Err(ExactError::Indeterminate("0 * inf")),
                    1 => Ok(PosInf),
                    _ => Ok(NegInf),
                }
            }
        }
    }

    /// Multiplication by a finite rational.
    pub fn scale(&self, c: &Rational) -> Result<Self, ExactError> {
        self.checked_mul(&ExtRational::Finite(c.clone()))
    }

    pub fn min(a: Self, b: Self) -> Self {
        std::cmp::min(a, b)
    }
}

impl From<Rational> for ExtRational {
    fn from(q: Rational) -> Self {
        ExtRational::Finite(q)
    }
}

impl From<i64> for ExtRational {
    fn from(n: i64) -> Self {
        ExtRational::Finite(Rational::from_integer(BigInt::from(n)))
    }
}

impl Neg for ExtRational {
    type Output = ExtRational;
    fn neg(self) -> Self {
        match self {
            ExtRational::NegInf => ExtRational::PosInf,
            ExtRational::PosInf => ExtRational::NegInf,
            ExtRational::Finite(q) => ExtRational::Finite(-q),
        }
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::NegInf => write!(f, "-inf"),
            ExtRational::PosInf => write!(f, "+inf"),
            ExtRational::Finite(q) => write!(f, "{}", rat_str(q)),
        }
    }
}

impl std::str::FromStr for ExtRational {
    type Err = ExactError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "+inf" | "inf" => Ok(ExtRational::PosInf),
            "-inf" => Ok(ExtRational::NegInf),
            other => parse_rational(other).map(ExtRational::Finite),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_puts_infinities_at_the_ends() {
        let a = ExtRational::finite(-1000, 1);
        assert!(ExtRational::NegInf < a);
        assert!(a < ExtRational::PosInf);
        assert!(ExtRational::finite(1, 3) < ExtRational::finite(1, 2));
    }

    #[test]
    fn indeterminate_forms_are_errors() {
        assert!(ExtRational::PosInf.checked_add(&ExtRational::NegInf).is_err());
        assert!(ExtRational::zero().checked_mul(&ExtRational::NegInf).is_err());
        assert_eq!(
            ExtRational::finite(-2, 1).checked_mul(&ExtRational::NegInf).unwrap(),
            ExtRational::PosInf
        );
        assert_eq!(
            ExtRational::finite(5, 1).checked_add(&ExtRational::NegInf).unwrap(),
            ExtRational::NegInf
        );
    }

    #[test]
    fn parse_and_print_round_trip() {
        for s in ["3/4", "-7", "0", "+inf", "-inf", "-12/5"] {
            let v: ExtRational = s.parse().unwrap();
            assert_eq!(v.to_string(), s);
        }
        assert_eq!(parse_rational("6/8").unwrap(), rat(3, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
