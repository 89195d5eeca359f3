//! Rational roots of univariate polynomials and rational radicals.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::Rational;

/// Rational roots with multiplicities together with the cofactor that has
/// no rational roots. Coefficients are listed from the constant term up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootReport {
    pub roots: Vec<(Rational, u32)>,
    pub cofactor: Vec<Rational>,
}

fn eval(p: &[Rational], x: &Rational) -> Rational {
    let mut acc = Rational::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn deflate(p: &[Rational], r: &Rational) -> Vec<Rational> {
    let n = p.len() - 1;
    let mut q = vec![Rational::zero(); n];
    let mut carry = Rational::zero();
    for k in (1..=n).rev() {
        carry = &p[k] + carry * r;
        q[k - 1] = carry.clone();
    }
    q
}

fn trim(p: &mut Vec<Rational>) {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            let q = &n / &d;
            if q != d {
                large.push(q);
            }
            small.push(d.clone());
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Finds all rational roots by the rational root theorem.
pub fn rational_roots(coeffs: &[Rational]) -> RootReport {
    let mut p: Vec<Rational> = coeffs.to_vec();
    trim(&mut p);
    let mut roots: Vec<(Rational, u32)> = Vec::new();
    if p.len() <= 1 {
        return RootReport { roots, cofactor: p };
    }
    let mut zero_mult = 0;
    while p.len() > 1 && p[0].is_zero() {
        p.remove(0);
        zero_mult += 1;
    }
    if zero_mult > 0 {
        roots.push((Rational::zero(), zero_mult));
    }
    if p.len() > 1 {
        let lcm = p.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = p.iter().map(|c| (c * Rational::from(lcm.clone())).to_integer()).collect();
        let a0 = ints.first().unwrap().clone();
        let an = ints.last().unwrap().clone();
        let num_divs = divisors(&a0);
        let den_divs = divisors(&an);
        let mut candidates: Vec<Rational> = Vec::new();
        for a in &num_divs {
            for b in &den_divs {
                let r = Rational::new(a.clone(), b.clone());
                if !candidates.contains(&r) {
                    candidates.push(r.clone());
                    candidates.push(-r);
                }
            }
        }
        candidates.sort();
        for r in candidates {
            let mut mult = 0;
            while p.len() > 1 && eval(&p, &r).is_zero() {
                p = deflate(&p, &r);
                mult += 1;
            }
            if mult > 0 {
                roots.push((r, mult));
            }
        }
    }
    roots.sort();
    RootReport { roots, cofactor: p }
}

fn int_nth_root(n: &BigInt, k: u32) -> Option<BigInt> {
    let neg = n.sign() == Sign::Minus;
    if neg && k % 2 == 0 {
        return None;
    }
    let a = n.abs();
    let r = a.nth_root(k);
    if num_traits::pow(r.clone(), k as usize) == a {
        Some(if neg { -r } else { r })
    } else {
        None
    }
}

/// The rational `k`-th root of `q` if one exists. For even `k` the positive
/// root is returned.
pub fn rational_nth_root(q: &Rational, k: u32) -> Option<Rational> {
    if k == 0 {
        return None;
    }
    let n = int_nth_root(q.numer(), k)?;
    let d = int_nth_root(q.denom(), k)?;
    Some(Rational::new(n, d))
}
