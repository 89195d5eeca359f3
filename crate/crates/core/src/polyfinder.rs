//! Witness polynomials with prescribed signs of valuations, found by exact
//! linear algebra on the coefficients of a generic polynomial.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use vinf_exact::{inverse, kernel, solve_linear, ExtRational, LinearSolution, Poly2, Rational, Series1};

use crate::cluster::{Cluster, DEFAULT_DEGREE_CAP};
use crate::error::{CoreError, Result};
use crate::puiseux::PuiseuxBranch;
use crate::valuations::Valuation;

/// Homogeneous linear conditions on the coefficients of a polynomial of
/// degree at most `degree`, one unknown per monomial in
/// [`Poly2::monomials_up_to`] order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintSystem {
    pub degree: u32,
    pub monomials: Vec<(u32, u32)>,
    pub rows: Vec<Vec<Rational>>,
}

impl ConstraintSystem {
    fn empty(degree: u32) -> Self {
        ConstraintSystem { degree, monomials: Poly2::monomials_up_to(degree), rows: Vec::new() }
    }

    fn unit_row(&self, k: usize) -> Vec<Rational> {
        let mut row = vec![Rational::zero(); self.monomials.len()];
        row[k] = Rational::one();
        row
    }

    pub fn rank(&self) -> usize {
        vinf_exact::rank(&self.rows, self.monomials.len())
    }

    /// Dimension of the solution space.
    pub fn solution_dim(&self) -> usize {
        self.monomials.len() - self.rank()
    }

    pub fn extend(&mut self, other: &ConstraintSystem) {
        debug_assert_eq!(self.monomials, other.monomials);
        self.rows.extend(other.rows.iter().cloned());
    }

    pub fn polynomial(&self, coeffs: &[Rational]) -> Poly2 {
        Poly2::from_terms(self.monomials.iter().copied().zip(coeffs.iter().cloned()))
    }

    /// Whether the polynomial satisfies every condition.
    pub fn satisfied_by(&self, p: &Poly2) -> bool {
        let coeffs: Vec<Rational> = self.monomials.iter().map(|&(i, j)| p.coeff(i, j)).collect();
        vinf_exact::mat_vec(&self.rows, &coeffs).iter().all(Zero::is_zero)
    }
}

/// Conditions expressing `v(P) > 0` (strict) or `v(P) >= 0` for `P` of
/// degree at most `d`.
pub fn valuation_conditions(v: &Valuation, d: u32, strict: bool) -> Result<ConstraintSystem> {
    let mut sys = ConstraintSystem::empty(d);
    match v {
        Valuation::Root => {
            for k in 0..sys.monomials.len() {
                if strict || sys.monomials[k] != (0, 0) {
                    let row = sys.unit_row(k);
                    sys.rows.push(row);
                }
            }
        }
        Valuation::Monomial { s, t } => {
            for k in 0..sys.monomials.len() {
                let (i, j) = sys.monomials[k];
                let w = s * Rational::from_integer(i.into()) + t * Rational::from_integer(j.into());
                let bad = if strict { w <= Rational::zero() } else { w < Rational::zero() };
                if bad {
                    let row = sys.unit_row(k);
                    sys.rows.push(row);
                }
            }
        }
        Valuation::Divisorial { cluster, node } => {
            divisorial_conditions(&mut sys, cluster, *node, if strict { 1 } else { 0 })?;
        }
        Valuation::Curve(b) => curve_conditions(&mut sys, b, strict)?,
    }
    Ok(sys)
}

/// Builds a basis of the polynomials of degree `<= d` whose divisorial
/// orders do not cancel in linear combinations, then asks the coordinates
/// along basis elements of small order to vanish.
fn divisorial_conditions(sys: &mut ConstraintSystem, cl: &Cluster, node: usize, threshold: i64) -> Result<()> {
    let n = sys.monomials.len();
    // basis[k] as a coefficient vector over the monomials, with its order
    // and initial form.
    let mut basis: Vec<(Vec<Rational>, i64, std::collections::BTreeMap<i64, Rational>)> = Vec::with_capacity(n);
    for k in 0..n {
        let mut g = sys.unit_row(k);
        loop {
            let tr = cl.transform(node, &sys.polynomial(&g), DEFAULT_DEGREE_CAP)?;
            let same: Vec<usize> = (0..basis.len()).filter(|&i| basis[i].1 == tr.ord).collect();
            let exps: BTreeSet<i64> = same
                .iter()
                .flat_map(|&i| basis[i].2.keys().copied())
                .chain(tr.initial.keys().copied())
                .collect();
            let mat: Vec<Vec<Rational>> = exps
                .iter()
                .map(|e| same.iter().map(|&i| basis[i].2.get(e).cloned().unwrap_or_else(Rational::zero)).collect())
                .collect();
            let rhs: Vec<Rational> =
                exps.iter().map(|e| tr.initial.get(e).cloned().unwrap_or_else(Rational::zero)).collect();
            let combo = if same.is_empty() {
                None
            } else {
                match solve_linear(&mat, &rhs)? {
                    LinearSolution::Solved { particular, .. } => Some(particular),
                    LinearSolution::NoSolution => None,
                }
            };
            match combo {
                None => {
                    basis.push((g, tr.ord, tr.initial));
                    break;
                }
                Some(cs) => {
                    for (c, &i) in cs.iter().zip(&same) {
                        if !c.is_zero() {
                            for (x, y) in g.iter_mut().zip(&basis[i].0) {
                                *x -= c * y;
                            }
                        }
                    }
                    let next = cl.transform(node, &sys.polynomial(&g), DEFAULT_DEGREE_CAP)?.ord;
                    if next <= tr.ord {
                        return Err(CoreError::InternalMismatch(
                            "cancelling an initial form did not raise the order".into(),
                        ));
                    }
                }
            }
        }
    }
    // Coefficients a = B^T λ; the conditions are rows of (B^T)^{-1}.
    let bt: Vec<Vec<Rational>> = (0..n).map(|c| (0..n).map(|r| basis[r].0[c].clone()).collect()).collect();
    let inv = inverse(&bt).ok_or_else(|| CoreError::InternalMismatch("adapted basis is singular".into()))?;
    for (i, (_, ord, _)) in basis.iter().enumerate() {
        if *ord < threshold {
            sys.rows.push(inv[i].clone());
        }
    }
    Ok(())
}

fn curve_conditions(sys: &mut ConstraintSystem, b: &PuiseuxBranch, strict: bool) -> Result<()> {
    let d = sys.degree;
    let series = b.series.reduced();
    let m = series.m();
    let u = Series1::monomial(m, Rational::one());
    let v = series.to_series();
    // P(branch) = t^{-d m} Σ a_k S_k(t); v(P) > 0 iff the sum has order > d m.
    let top = d * m + if strict { 1 } else { 0 };
    let mut subs = Vec::with_capacity(sys.monomials.len());
    for &(i, j) in &sys.monomials {
        let mono = Poly2::monomial(i, j, Rational::one());
        let (q, e) = b.base.local_equation(&mono)?;
        let q = &q * &Poly2::monomial(d - e, 0, Rational::one());
        let s = Series1::eval_poly2(&q, &u, &v);
        if s.prec().is_some_and(|p| p < top) {
            return Err(CoreError::InsufficientTruncation(format!(
                "branch {} certifies orders below {} but degree {d} needs {top}",
                b.series,
                s.prec().unwrap()
            )));
        }
        subs.push(s);
    }
    for j in 0..top {
        let row: Vec<Rational> = subs.iter().map(|s| s.coeff(j)).collect();
        if row.iter().any(|c| !c.is_zero()) {
            sys.rows.push(row);
        }
    }
    Ok(())
}

/// Kernel element used as witness: the basis vector attached to the last
/// free monomial, scaled so its first nonzero coefficient is 1.
fn pick_witness(sys: &ConstraintSystem) -> Option<Poly2> {
    let ker = kernel(&sys.rows, sys.monomials.len());
    let mut v = ker.into_iter().last()?;
    let lead = v.iter().find(|c| !c.is_zero())?.clone();
    for c in v.iter_mut() {
        *c /= &lead;
    }
    Some(sys.polynomial(&v))
}

fn combined(s: &[Valuation], d: u32, strict: bool) -> Result<ConstraintSystem> {
    let mut sys = ConstraintSystem::empty(d);
    for v in s {
        sys.extend(&valuation_conditions(v, d, strict)?);
    }
    Ok(sys)
}

/// Searches degrees `1..=max_degree` for `P != 0` with `v(P) > 0` for all
/// `v` in `s`.
pub fn find_positive(s: &[Valuation], max_degree: u32) -> Result<Option<Poly2>> {
    for d in 1..=max_degree {
        let sys = combined(s, d, true)?;
        if let Some(p) = pick_witness(&sys) {
            for v in s {
                if v.evaluate(&p)? <= ExtRational::zero() {
                    return Err(CoreError::InternalMismatch(format!("witness {p} fails at {v}")));
                }
            }
            return Ok(Some(p));
        }
    }
    Ok(None)
}

/// Searches for a nonconstant `P` with `v(P) >= 0` for all `v` in `s`.
pub fn find_nonnegative_nonconstant(s: &[Valuation], max_degree: u32) -> Result<Option<Poly2>> {
    for d in 1..=max_degree {
        let mut sys = combined(s, d, false)?;
        let row = sys.unit_row(0);
        sys.rows.push(row);
        if let Some(p) = pick_witness(&sys) {
            for v in s {
                if v.evaluate(&p)? < ExtRational::zero() {
                    return Err(CoreError::InternalMismatch(format!("witness {p} fails at {v}")));
                }
            }
            return Ok(Some(p));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::PointAtInfinity;
    use vinf_exact::{rat, PuiseuxSeries};

    fn mono(s: i64, t: i64) -> Valuation {
        Valuation::monomial(rat(s, 1), rat(t, 1)).unwrap()
    }

    fn cusp() -> Valuation {
        let s = PuiseuxSeries::new(3, [(1, rat(1, 1))], 1, true).unwrap();
        Valuation::curve(PuiseuxBranch::new(PointAtInfinity::YChart, s))
    }

    #[test]
    fn monomial_table() {
        let sys = valuation_conditions(&mono(-1, 1), 1, true).unwrap();
        assert_eq!(sys.rank(), 2);
        assert_eq!(find_positive(&[mono(-1, 1)], 1).unwrap(), Some(Poly2::y()));
        assert_eq!(find_nonnegative_nonconstant(&[mono(-1, 0)], 1).unwrap(), Some(Poly2::y()));
    }

    #[test]
    fn root_has_no_witness() {
        assert_eq!(valuation_conditions(&Valuation::Root, 1, true).unwrap().rank(), 3);
        assert_eq!(find_positive(&[Valuation::Root], 4).unwrap(), None);
        assert_eq!(find_nonnegative_nonconstant(&[Valuation::Root], 4).unwrap(), None);
    }

    #[test]
    fn cusp_witness() {
        let cubic = Poly2::parse("y^2 - x^3").unwrap();
        let sys = valuation_conditions(&cusp(), 3, true).unwrap();
        assert!(sys.satisfied_by(&cubic));
        assert_eq!(find_positive(&[cusp()], 3).unwrap(), Some(cubic));
    }

    #[test]
    fn divisorial_matches_monomial() {
        // The same point given as a cluster node and as monomial weights.
        let v = mono(-1, 2);
        let path = v.node_path().unwrap().unwrap();
        let div = Valuation::from_path(&path).unwrap();
        for d in 1..=3 {
            for strict in [true, false] {
                let a = valuation_conditions(&v, d, strict).unwrap();
                let b = valuation_conditions(&div, d, strict).unwrap();
                assert_eq!(a.solution_dim(), b.solution_dim());
                let mut both = a.clone();
                both.extend(&b);
                assert_eq!(both.rank(), a.rank());
            }
        }
    }

    #[test]
    fn monotone_in_degree() {
        let s = [cusp(), mono(-1, 1)];
        let mut last = 0;
        for d in 1..=4 {
            let dim = combined(&s, d, false).unwrap().solution_dim();
            assert!(dim >= last);
            last = dim;
        }
    }
}
