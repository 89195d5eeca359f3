//! Places of the rationals and membership of rational points in branches.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use vinf_core::cluster::PointAtInfinity;
use vinf_core::puiseux::PuiseuxBranch;
use vinf_exact::{rat_str, rational_nth_root, Rational};

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Infinity,
    Prime(u64),
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

impl Place {
    pub fn parse(s: &str) -> Result<Place> {
        let t = s.trim();
        if t == "inf" || t == "∞" {
            return Ok(Place::Infinity);
        }
        match t.parse::<u64>() {
            Ok(p) if is_prime(p) => Ok(Place::Prime(p)),
            _ => Err(CliError::Input(format!("{s:?} is neither \"inf\" nor a prime"))),
        }
    }

    pub fn is_archimedean(self) -> bool {
        self == Place::Infinity
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinity => write!(f, "inf"),
            Place::Prime(p) => write!(f, "{p}"),
        }
    }
}

fn int_ord(n: &BigInt, p: &BigInt) -> i64 {
    let mut n = n.clone();
    let mut k = 0;
    while (&n % p).is_zero() {
        n /= p;
        k += 1;
    }
    k
}

/// `ord_p(q)`, or `None` for `q = 0`.
pub fn ord_p(q: &Rational, p: u64) -> Option<i64> {
    if q.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    Some(int_ord(q.numer(), &p) - int_ord(q.denom(), &p))
}

/// `|q|_v`, exactly: `p^(-ord_p q)` at a prime and `|q|` at infinity.
pub fn abs_value(q: &Rational, place: Place) -> Rational {
    match place {
        Place::Infinity => q.abs(),
        Place::Prime(p) => match ord_p(q, p) {
            None => Rational::zero(),
            Some(k) => {
                let base = Rational::from_integer(BigInt::from(p));
                let pow = (0..k.unsigned_abs()).fold(Rational::one(), |acc, _| acc * &base);
                if k >= 0 {
                    pow.recip()
                } else {
                    pow
                }
            }
        },
    }
}

/// Primes dividing a denominator of `coords`, in increasing order.
pub fn denominator_primes(coords: &[&Rational]) -> Vec<u64> {
    let mut out = Vec::new();
    for q in coords {
        let mut d = q.denom().clone();
        let mut f = BigInt::from(2u32);
        while &f * &f <= d {
            if (&d % &f).is_zero() {
                let p: u64 = f.clone().try_into().unwrap_or(u64::MAX);
                out.push(p);
                while (&d % &f).is_zero() {
                    d /= &f;
                }
            }
            f += 1u32;
        }
        if d > BigInt::one() {
            out.push(d.try_into().unwrap_or(u64::MAX));
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Local coordinates `(x_q, y_q)` of the affine point `(x, y)` in the chart
/// of `base`, when the point is not on the chart's polar line.
pub fn chart_coordinates(base: &PointAtInfinity, x: &Rational, y: &Rational) -> Option<(Rational, Rational)> {
    match base {
        PointAtInfinity::XChart(c) => (!x.is_zero()).then(|| (x.recip(), y / x + c)),
        PointAtInfinity::YChart => (!y.is_zero()).then(|| (y.recip(), x / y)),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    Member(String),
    NotMember(String),
    /// Not decidable from the data; counted as a non-member.
    Undecidable(String),
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Membership::Member(_) => "member",
            Membership::NotMember(_) => "not a member",
            Membership::Undecidable(_) => "undecidable",
        }
    }

    pub fn reason(&self) -> &str {
        match self {
            Membership::Member(r) | Membership::NotMember(r) | Membership::Undecidable(r) => r,
        }
    }
}

fn pow(q: &Rational, e: u32) -> Rational {
    (0..e).fold(Rational::one(), |acc, _| acc * q)
}

/// Whether `(x, y)` lies on the `v`-adic piece of `branch` of radius `r`.
///
/// The point must satisfy `|x_q|_v < min(r, 1)`. Then `y_q` is compared with
/// the truncated series at every rational `m`-th root `t` of `x_q`. At a
/// prime, coefficients bounded by `min(r, 1)^(-j/m)` make the tail after
/// exponent `K` at most `(|x_q|_v / min(r, 1))^((K+1)/m)`, and the point is a
/// member when the difference is within that bound. At infinity only exact
/// series are decidable.
pub fn branch_membership(point: (&Rational, &Rational), branch: &PuiseuxBranch, place: Place, r: &Rational) -> Membership {
    let Some((u, v)) = chart_coordinates(&branch.base, point.0, point.1) else {
        return Membership::NotMember("the point is on the polar line of the chart".into());
    };
    let r_eff = if *r < Rational::one() { r.clone() } else { Rational::one() };
    let au = abs_value(&u, place);
    if au >= r_eff {
        return Membership::NotMember(format!("|x_q|_{place} = {} is not below {}", rat_str(&au), rat_str(&r_eff)));
    }
    let series = branch.series.reduced();
    let m = series.m();
    let k = series.truncation();
    let Some(t0) = rational_nth_root(&u, m) else {
        return Membership::Undecidable(format!("x_q = {} has no rational {m}-th root", rat_str(&u)));
    };
    let mut roots = vec![t0.clone()];
    if m % 2 == 0 && !t0.is_zero() {
        roots.push(-t0);
    }
    let mut inconclusive = false;
    for t in roots {
        let approx: Rational = series.coeffs().iter().map(|(&j, a)| a * pow(&t, j)).sum();
        let diff = &v - &approx;
        if series.is_exact() {
            if diff.is_zero() {
                return Membership::Member("exact series".into());
            }
            continue;
        }
        if place.is_archimedean() {
            inconclusive = true;
            continue;
        }
        // |diff|^m <= (|u| / r)^(K+1), compared without roots.
        let lhs = pow(&abs_value(&diff, place), m);
        let rhs = pow(&(&au / &r_eff), k + 1);
        if lhs <= rhs {
            return Membership::Member(format!("within the tail bound at truncation {k}"));
        }
    }
    if inconclusive {
        Membership::Undecidable(format!("archimedean tail bound not conclusive at truncation {k}"))
    } else {
        Membership::NotMember("differs from the series beyond the tail bound".into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use vinf_exact::{rat, PuiseuxSeries};

    fn q(n: i64, d: i64) -> Rational {
        rat(n, d)
    }

    #[test]
    fn absolute_values() {
        assert_eq!(abs_value(&q(8, 1), Place::Prime(2)), q(1, 8));
        assert_eq!(abs_value(&q(3, 4), Place::Prime(2)), q(4, 1));
        assert_eq!(abs_value(&q(-5, 1), Place::Infinity), q(5, 1));
        assert_eq!(abs_value(&q(0, 1), Place::Prime(3)), q(0, 1));
        assert_eq!(abs_value(&q(7, 9), Place::Prime(5)), q(1, 1));
    }

    #[test]
    fn product_formula() {
        for x in [q(12, 35), q(-1024, 81), q(7, 1), q(1, 6)] {
            let mut prod = abs_value(&x, Place::Infinity);
            for p in [2, 3, 5, 7, 11, 13] {
                prod *= abs_value(&x, Place::Prime(p));
            }
            assert_eq!(prod, q(1, 1), "{x}");
        }
    }

    #[test]
    fn places_parse() {
        assert_eq!(Place::parse("inf").unwrap(), Place::Infinity);
        assert_eq!(Place::parse("7").unwrap(), Place::Prime(7));
        assert!(Place::parse("9").is_err());
        assert!(Place::parse("1").is_err());
        assert_eq!(denominator_primes(&[&q(1, 12), &q(5, 7)]), vec![2, 3, 7]);
    }

    fn cusp() -> PuiseuxBranch {
        PuiseuxBranch::new(PointAtInfinity::YChart, PuiseuxSeries::new(3, [(1, q(1, 1))], 1, true).unwrap())
    }

    #[test]
    fn cusp_points_are_members() {
        let b = cusp();
        for n in 2..8 {
            let (x, y) = (q(n * n, 1), q(n * n * n, 1));
            for place in [Place::Infinity, Place::Prime(2), Place::Prime(3)] {
                let m = branch_membership((&x, &y), &b, place, &q(1, 1));
                if abs_value(&(&y).recip(), place) < q(1, 1) {
                    assert!(m.is_member(), "n = {n} at {place}: {m:?}");
                } else {
                    assert!(matches!(m, Membership::NotMember(_)));
                }
            }
        }
    }

    #[test]
    fn radius_gate() {
        let b = cusp();
        let m = branch_membership((&q(1, 1), &q(1, 1)), &b, Place::Infinity, &q(1, 1));
        assert!(matches!(m, Membership::NotMember(_)));
        let m = branch_membership((&q(4, 1), &q(8, 1)), &b, Place::Infinity, &q(1, 10));
        assert!(matches!(m, Membership::NotMember(_)));
    }

    #[test]
    fn tail_bound_decides_at_a_prime() {
        // Branch v = u^3 + O(u^5) at x-chart(0), so u = 1/x, v = y/x.
        let b = PuiseuxBranch::new(
            PointAtInfinity::XChart(q(0, 1)),
            PuiseuxSeries::new(1, [(3, q(1, 1))], 4, false).unwrap(),
        );
        let u = q(4, 1); // |u|_2 = 1/4
        let x = u.recip();
        let on = |v: Rational| (x.clone(), &v * &x);
        let (x1, y1) = on(&pow(&u, 3) + &pow(&u, 5));
        assert!(branch_membership((&x1, &y1), &b, Place::Prime(2), &q(1, 1)).is_member());
        let (x2, y2) = on(&pow(&u, 3) + &pow(&u, 4));
        assert!(matches!(branch_membership((&x2, &y2), &b, Place::Prime(2), &q(1, 1)), Membership::NotMember(_)));
        // The same data at infinity cannot be decided.
        let v = pow(&q(1, 4), 3);
        let (x3, y3) = (q(4, 1), &v * &q(4, 1));
        assert!(matches!(branch_membership((&x3, &y3), &b, Place::Infinity, &q(1, 1)), Membership::Undecidable(_)));
    }

    #[test]
    fn irrational_roots_are_undecidable() {
        let b = cusp();
        let m = branch_membership((&q(2, 1), &q(2, 1)), &b, Place::Infinity, &q(1, 1));
        assert!(matches!(m, Membership::Undecidable(_)));
    }
}
