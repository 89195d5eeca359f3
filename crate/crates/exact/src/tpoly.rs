//! Polynomials in a formal parameter `u`, read in the limit `u -> -inf`.

use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::{ExtRational, Rational};

/// Whether a limit is a finite number or one of the infinities.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Magnitude {
    Finite,
    Infinite,
}

/// Polynomial with rational coefficients in ascending order.
/// Trailing zeros are always stripped, so the zero polynomial is empty.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TPoly {
    coeffs: Vec<Rational>,
}

impl TPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        TPoly { coeffs }
    }

    pub fn constant(c: Rational) -> Self {
        TPoly::new(vec![c])
    }

    /// The parameter itself.
    pub fn u() -> Self {
        TPoly::new(vec![Rational::zero(), Rational::one()])
    }

    /// Lifts a matrix entry: finite values become constants and `-inf`
    /// becomes the shared parameter `u`.
    ///
    /// Returns `None` for `+inf`.
    pub fn from_entry(e: &ExtRational) -> Option<Self> {
        match e {
            ExtRational::Finite(q) => Some(TPoly::constant(q.clone())),
            ExtRational::NegInf => Some(TPoly::u()),
            ExtRational::PosInf => None,
        }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, u: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * u + c)
    }

    /// Limit as `u -> -inf`.
    pub fn limit_at_neg_infinity(&self) -> ExtRational {
        match self.degree() {
            None => ExtRational::zero(),
            Some(0) => ExtRational::Finite(self.coeffs[0].clone()),
            Some(_) => {
                if sign_at_neg_infinity(self).0 > 0 {
                    ExtRational::PosInf
                } else {
                    ExtRational::NegInf
                }
            }
        }
    }

    /// Lagrange interpolation through `(x_i, y_i)` with distinct nodes.
    pub fn interpolate(points: &[(Rational, Rational)]) -> Self {
        let mut acc = TPoly::default();
        for (i, (xi, yi)) in points.iter().enumerate() {
            let mut basis = TPoly::constant(Rational::one());
            let mut denom = Rational::one();
            for (j, (xj, _)) in points.iter().enumerate() {
                if i != j {
                    basis = &basis * &TPoly::new(vec![-xj.clone(), Rational::one()]);
                    denom *= xi - xj;
                }
            }
            acc = &acc + &basis.scale(&(yi / denom));
        }
        acc
    }

    pub fn scale(&self, c: &Rational) -> Self {
        TPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }
}

/// Sign of `lim_{u -> -inf} p(u)` together with whether that limit is
/// finite.
///
/// For positive degree `d` the sign is `sign(lead) * (-1)^d`.
pub fn sign_at_neg_infinity(p: &TPoly) -> (i8, Magnitude) {
    let sign_of = |q: &Rational| -> i8 {
        if q.is_zero() {
            0
        } else if *q > Rational::zero() {
            1
        } else {
            -1
        }
    };
    match p.degree() {
        None => (0, Magnitude::Finite),
        Some(0) => (sign_of(&p.coeffs[0]), Magnitude::Finite),
        Some(d) => {
            let s = sign_of(p.coeffs.last().unwrap());
            let s = if d % 2 == 1 { -s } else { s };
            (s, Magnitude::Infinite)
        }
    }
}

impl Add for &TPoly {
    type Output = TPoly;
    fn add(self, rhs: &TPoly) -> TPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = Rational::zero();
        TPoly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) + rhs.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }
}

impl Sub for &TPoly {
    type Output = TPoly;
    fn sub(self, rhs: &TPoly) -> TPoly {
        self + &(-rhs)
    }
}

impl Neg for &TPoly {
    type Output = TPoly;
    fn neg(self) -> TPoly {
        TPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &TPoly {
    type Output = TPoly;
    fn mul(self, rhs: &TPoly) -> TPoly {
        if self.is_zero() || rhs.is_zero() {
            return TPoly::default();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        TPoly::new(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn p(cs: &[i64]) -> TPoly {
        TPoly::new(cs.iter().map(|&c| rat(c, 1)).collect())
    }

    #[test]
    fn signs_at_minus_infinity() {
        assert_eq!(sign_at_neg_infinity(&p(&[-1, 0, 1])), (1, Magnitude::Infinite));
        assert_eq!(
            sign_at_neg_infinity(&TPoly::constant(rat(7, 2))),
            (1, Magnitude::Finite)
        );
        assert_eq!(sign_at_neg_infinity(&p(&[0, 1])), (-1, Magnitude::Infinite));
        assert_eq!(sign_at_neg_infinity(&p(&[])), (0, Magnitude::Finite));
        assert_eq!(sign_at_neg_infinity(&p(&[5, 0, 0, -2])), (1, Magnitude::Infinite));
    }

    #[test]
    fn trailing_zeros_are_stripped() {
        assert_eq!(p(&[1, 2, 0, 0]).degree(), Some(1));
        assert!(p(&[0, 0]).is_zero());
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        let q = p(&[3, -1, 0, 2]);
        let pts: Vec<_> = (0..5).map(|i| (rat(i, 1), q.eval(&rat(i, 1)))).collect();
        assert_eq!(TPoly::interpolate(&pts), q);
    }
}
