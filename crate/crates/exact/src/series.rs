//! Truncated power series in one and two variables.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::{ExactError, Poly2, Rational};

/// Bivariate power series known exactly in total degree `< order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncSeries2 {
    coeffs: BTreeMap<(u32, u32), Rational>,
    order: u32,
}

impl TruncSeries2 {
    pub fn zero(order: u32) -> Self {
        TruncSeries2 { coeffs: BTreeMap::new(), order }
    }

    /// Truncates a polynomial to total degree `< order`.
    pub fn from_poly(p: &Poly2, order: u32) -> Self {
        let mut coeffs = BTreeMap::new();
        for (&(i, j), c) in p.terms() {
            if i + j < order {
                coeffs.insert((i, j), c.clone());
            }
        }
        TruncSeries2 { coeffs, order }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeff(&self, i: u32, j: u32) -> Rational {
        self.coeffs.get(&(i, j)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &BTreeMap<(u32, u32), Rational> {
        &self.coeffs
    }

    /// Lowest total degree of a known nonzero term.
    pub fn valuation(&self) -> Option<u32> {
        self.coeffs.keys().map(|&(i, j)| i + j).min()
    }

    pub fn to_poly(&self) -> Poly2 {
        Poly2::from_terms(self.coeffs.iter().map(|(&k, c)| (k, c.clone())))
    }

    pub fn truncate(&self, order: u32) -> Self {
        let order = order.min(self.order);
        TruncSeries2 {
            coeffs: self
                .coeffs
                .iter()
                .filter(|(&(i, j), _)| i + j < order)
                .map(|(&k, c)| (k, c.clone()))
                .collect(),
            order,
        }
    }

    fn insert(&mut self, i: u32, j: u32, c: Rational) {
        if i + j >= self.order || c.is_zero() {
            return;
        }
        let e = self.coeffs.entry((i, j)).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&(i, j));
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = TruncSeries2::zero(self.order);
        for (&(i, j), a) in &self.coeffs {
            out.insert(i, j, a * c);
        }
        out
    }
}

impl Add for &TruncSeries2 {
    type Output = TruncSeries2;
    fn add(self, rhs: &TruncSeries2) -> TruncSeries2 {
        let mut out = self.truncate(rhs.order);
        for (&(i, j), c) in &rhs.coeffs {
            out.insert(i, j, c.clone());
        }
        out
    }
}

impl Sub for &TruncSeries2 {
    type Output = TruncSeries2;
    fn sub(self, rhs: &TruncSeries2) -> TruncSeries2 {
        self + &(-rhs)
    }
}

impl Neg for &TruncSeries2 {
    type Output = TruncSeries2;
    fn neg(self) -> TruncSeries2 {
        self.scale(&-Rational::one())
    }
}

impl Mul for &TruncSeries2 {
    type Output = TruncSeries2;
    fn mul(self, rhs: &TruncSeries2) -> TruncSeries2 {
        // Unknown terms of one factor are multiplied by the lowest known
        // term of the other, so the product is exact a bit further out.
        let va = self.valuation().unwrap_or(self.order);
        let vb = rhs.valuation().unwrap_or(rhs.order);
        let order = (self.order + vb).min(rhs.order + va);
        let mut out = TruncSeries2::zero(order);
        for (&(i, j), a) in &self.coeffs {
            for (&(k, l), b) in &rhs.coeffs {
                out.insert(i + k, j + l, a * b);
            }
        }
        out
    }
}

/// Substitutes `u -> sub_u`, `v -> sub_v` into `f`. Both substitutions must
/// vanish at the origin.
pub fn compose_series(
    f: &TruncSeries2,
    sub_u: &TruncSeries2,
    sub_v: &TruncSeries2,
) -> Result<TruncSeries2, ExactError> {
    if !sub_u.coeff(0, 0).is_zero() || !sub_v.coeff(0, 0).is_zero() {
        return Err(ExactError::NonLocalSubstitution);
    }
    let order = f.order.min(sub_u.order).min(sub_v.order);
    if order < 1 {
        return Err(ExactError::TruncationUnderflow(order as i64));
    }
    let su = sub_u.truncate(order);
    let sv = sub_v.truncate(order);
    let max_i = f.coeffs.keys().map(|k| k.0).max().unwrap_or(0);
    let max_j = f.coeffs.keys().map(|k| k.1).max().unwrap_or(0);
    let mut pu = vec![unit2(order)];
    for k in 1..=max_i as usize {
        let next = (&pu[k - 1] * &su).truncate(order);
        pu.push(next);
    }
    let mut pv = vec![unit2(order)];
    for k in 1..=max_j as usize {
        let next = (&pv[k - 1] * &sv).truncate(order);
        pv.push(next);
    }
    let mut out = TruncSeries2::zero(order);
    for (&(i, j), c) in &f.coeffs {
        let term = (&pu[i as usize] * &pv[j as usize]).truncate(order).scale(c);
        out = &out + &term;
    }
    Ok(out)
}

fn unit2(order: u32) -> TruncSeries2 {
    let mut s = TruncSeries2::zero(order);
    s.insert(0, 0, Rational::one());
    s
}

/// Power series in one variable `t`. `prec = Some(n)` means only the
/// coefficients of `t^k` with `k < n` are known; `None` means exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series1 {
    coeffs: BTreeMap<u32, Rational>,
    prec: Option<u32>,
}

impl Series1 {
    pub fn exact(coeffs: impl IntoIterator<Item = (u32, Rational)>) -> Self {
        Series1::with_prec(coeffs, None)
    }

    pub fn with_prec(coeffs: impl IntoIterator<Item = (u32, Rational)>, prec: Option<u32>) -> Self {
        let mut s = Series1 { coeffs: BTreeMap::new(), prec };
        for (k, c) in coeffs {
            s.insert(k, c);
        }
        s
    }

    pub fn zero() -> Self {
        Series1::exact([])
    }

    pub fn one() -> Self {
        Series1::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Series1::exact([(0, c)])
    }

    pub fn monomial(k: u32, c: Rational) -> Self {
        Series1::exact([(k, c)])
    }

    fn insert(&mut self, k: u32, c: Rational) {
        if c.is_zero() || self.prec.is_some_and(|p| k >= p) {
            return;
        }
        let e = self.coeffs.entry(k).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&k);
        }
    }

    pub fn prec(&self) -> Option<u32> {
        self.prec
    }

    pub fn coeff(&self, k: u32) -> Rational {
        self.coeffs.get(&k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &BTreeMap<u32, Rational> {
        &self.coeffs
    }

    /// Certified order: the lowest known nonzero exponent.
    pub fn valuation(&self) -> Option<u32> {
        self.coeffs.keys().next().copied()
    }

    /// `Some(k)` with the leading coefficient when certified.
    pub fn leading(&self) -> Option<(u32, Rational)> {
        self.coeffs.iter().next().map(|(&k, c)| (k, c.clone()))
    }

    /// True when the series is known to be identically zero.
    pub fn is_exact_zero(&self) -> bool {
        self.prec.is_none() && self.coeffs.is_empty()
    }

    /// Lower bound for the order of the series.
    pub fn order_lower_bound(&self) -> Option<u32> {
        self.valuation().or(self.prec)
    }

    pub fn truncate(&self, n: u32) -> Self {
        let prec = Some(self.prec.map_or(n, |p| p.min(n)));
        Series1::with_prec(self.coeffs.iter().map(|(&k, c)| (k, c.clone())), prec)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Series1::with_prec(self.coeffs.iter().map(|(&k, a)| (k, a * c)), self.prec)
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, k: u32) -> Self {
        Series1::with_prec(
            self.coeffs.iter().map(|(&e, c)| (e + k, c.clone())),
            self.prec.map(|p| p + k),
        )
    }

    /// Divides by `t^k`; the caller guarantees divisibility of the known
    /// part (lower exponents must vanish).
    pub fn unshift(&self, k: u32) -> Self {
        assert!(self.coeffs.keys().all(|&e| e >= k), "t^{k} does not divide the series");
        Series1::with_prec(
            self.coeffs.iter().map(|(&e, c)| (e - k, c.clone())),
            self.prec.map(|p| p.saturating_sub(k)),
        )
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Series1::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// `self / rhs`, provided `rhs` has a certified leading term `t^k` and
    /// the known part of `self` is divisible by `t^k`. Exact inverses are
    /// expanded to `cap` terms when `rhs` is not a monomial.
    pub fn checked_div(&self, rhs: &Series1, cap: u32) -> Option<Series1> {
        let (k, _) = rhs.leading()?;
        if self.valuation().map_or(self.prec.is_some_and(|p| p < k), |v| v < k) {
            return None;
        }
        let num = self.unshift(k);
        let den = rhs.unshift(k);
        let b0 = den.coeff(0);
        if den.coeffs.len() == 1 && den.prec.is_none() {
            return Some(num.scale(&(Rational::one() / b0)));
        }
        let n = den.prec.map_or(cap, |p| p.min(cap));
        let inv_b0 = Rational::one() / &b0;
        let mut inv: Vec<Rational> = Vec::with_capacity(n as usize);
        for i in 0..n {
            if i == 0 {
                inv.push(inv_b0.clone());
                continue;
            }
            let mut acc = Rational::zero();
            for (&j, bj) in den.coeffs.range(1..=i) {
                acc += bj * &inv[(i - j) as usize];
            }
            inv.push(-acc * &inv_b0);
        }
        let inverse = Series1::with_prec(
            inv.into_iter().enumerate().map(|(i, c)| (i as u32, c)),
            Some(n),
        );
        Some(&num * &inverse)
    }

    /// `P(u, v)` for series `u`, `v`.
    pub fn eval_poly2(p: &Poly2, u: &Series1, v: &Series1) -> Series1 {
        let max_i = p.terms().map(|(k, _)| k.0).max().unwrap_or(0);
        let max_j = p.terms().map(|(k, _)| k.1).max().unwrap_or(0);
        let mut pu = vec![Series1::one()];
        for k in 1..=max_i as usize {
            let next = &pu[k - 1] * u;
            pu.push(next);
        }
        let mut pv = vec![Series1::one()];
        for k in 1..=max_j as usize {
            let next = &pv[k - 1] * v;
            pv.push(next);
        }
        let mut acc = Series1::zero();
        for (&(i, j), c) in p.terms() {
            acc = &acc + &(&pu[i as usize] * &pv[j as usize]).scale(c);
        }
        acc
    }
}

fn min_prec(a: Option<u32>, b: Option<u32>) -> Option<u32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl Add for &Series1 {
    type Output = Series1;
    fn add(self, rhs: &Series1) -> Series1 {
        let prec = min_prec(self.prec, rhs.prec);
        let mut out = Series1::with_prec(self.coeffs.iter().map(|(&k, c)| (k, c.clone())), prec);
        for (&k, c) in &rhs.coeffs {
            out.insert(k, c.clone());
        }
        out
    }
}

impl Sub for &Series1 {
    type Output = Series1;
    fn sub(self, rhs: &Series1) -> Series1 {
        self + &rhs.scale(&-Rational::one())
    }
}

impl Mul for &Series1 {
    type Output = Series1;
    fn mul(self, rhs: &Series1) -> Series1 {
        let err_a = self.prec.map(|p| p + rhs.order_lower_bound().unwrap_or(0));
        let err_b = rhs.prec.map(|p| p + self.order_lower_bound().unwrap_or(0));
        let mut out = Series1 { coeffs: BTreeMap::new(), prec: min_prec(err_a, err_b) };
        for (&i, a) in &self.coeffs {
            if out.prec.is_some_and(|p| i >= p) {
                break;
            }
            for (&j, b) in &rhs.coeffs {
                if out.prec.is_some_and(|p| i + j >= p) {
                    break;
                }
                out.insert(i + j, a * b);
            }
        }
        out
    }
}
