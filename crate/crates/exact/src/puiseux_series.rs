//! Puiseux series `sum_{j>=1} a_j x^{j/m}` with rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::{rat_str, ExactError, Rational, Series1};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PuiseuxSeries {
    m: u32,
    coeffs: BTreeMap<u32, Rational>,
    /// Coefficients are known for exponents `j <= truncation`.
    truncation: u32,
    /// The series has no terms beyond those stored.
    exact: bool,
}

impl PuiseuxSeries {
    pub fn new(
        m: u32,
        coeffs: impl IntoIterator<Item = (u32, Rational)>,
        truncation: u32,
        exact: bool,
    ) -> Result<Self, ExactError> {
        if m == 0 {
            return Err(ExactError::InvalidSeries("ramification index must be positive".into()));
        }
        let mut map = BTreeMap::new();
        for (j, c) in coeffs {
            if j == 0 {
                return Err(ExactError::InvalidSeries("exponents must be positive".into()));
            }
            if j > truncation && !exact {
                return Err(ExactError::InvalidSeries(format!(
                    "exponent {j} exceeds the truncation order {truncation}"
                )));
            }
            if !c.is_zero() {
                map.insert(j, c);
            }
        }
        let truncation = if exact {
            truncation.max(map.keys().last().copied().unwrap_or(0))
        } else {
            truncation
        };
        Ok(PuiseuxSeries { m, coeffs: map, truncation, exact })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn coeffs(&self) -> &BTreeMap<u32, Rational> {
        &self.coeffs
    }

    pub fn coeff(&self, j: u32) -> Rational {
        self.coeffs.get(&j).cloned().unwrap_or_else(Rational::zero)
    }

    /// Rewrites with the smallest possible ramification index.
    pub fn reduced(&self) -> PuiseuxSeries {
        let mut g = self.m;
        for &j in self.coeffs.keys() {
            g = g.gcd(&j);
        }
        if g == 1 {
            return self.clone();
        }
        PuiseuxSeries {
            m: self.m / g,
            coeffs: self.coeffs.iter().map(|(&j, c)| (j / g, c.clone())).collect(),
            truncation: self.truncation / g,
            exact: self.exact,
        }
    }

    /// Same series with ramification index `m * k`.
    pub fn refined(&self, k: u32) -> PuiseuxSeries {
        PuiseuxSeries {
            m: self.m * k,
            coeffs: self.coeffs.iter().map(|(&j, c)| (j * k, c.clone())).collect(),
            truncation: self.truncation * k,
            exact: self.exact,
        }
    }

    /// The series in the uniformizer `t = x^{1/m}`. Known to precision
    /// `t^{truncation+1}` unless exact.
    pub fn to_series(&self) -> Series1 {
        let prec = if self.exact { None } else { Some(self.truncation + 1) };
        Series1::with_prec(self.coeffs.iter().map(|(&j, c)| (j, c.clone())), prec)
    }
}

impl fmt::Display for PuiseuxSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (&j, c) in &self.coeffs {
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let a = c.abs();
            if !a.is_one() {
                write!(f, "{}*", rat_str(&a))?;
            }
            if j % self.m == 0 {
                let e = j / self.m;
                if e == 1 {
                    write!(f, "x")?;
                } else {
                    write!(f, "x^{e}")?;
                }
            } else {
                let g = j.gcd(&self.m);
                write!(f, "x^({}/{})", j / g, self.m / g)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        if !self.exact {
            let g = (self.truncation + 1).gcd(&self.m);
            write!(f, " + O(x^({}/{}))", (self.truncation + 1) / g, self.m / g)?;
        }
        Ok(())
    }
}
