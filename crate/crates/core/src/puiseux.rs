//! Newton–Puiseux expansion of plane curves at infinity.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use vinf_exact::{rational_nth_root, rational_roots, Poly2, PuiseuxSeries, Rational, Series1};

use crate::cluster::PointAtInfinity;
use crate::error::{CoreError, Result};
use crate::potential::DiscreteMeasure;
use crate::valuations::{meet, point_on_segment, Valuation};

/// A formal branch `y_q = sum a_j x_q^{j/m}` at a point of the line at
/// infinity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PuiseuxBranch {
    pub base: PointAtInfinity,
    pub series: PuiseuxSeries,
    /// Local intersection number with the line at infinity, repetitions of a
    /// multiple component included.
    pub multiplicity: u32,
    /// A polynomial vanishing on the branch, when known.
    pub equation: Option<Poly2>,
}

impl PuiseuxBranch {
    pub fn new(base: PointAtInfinity, series: PuiseuxSeries) -> Self {
        let series = series.reduced();
        PuiseuxBranch { base, multiplicity: series.m(), series, equation: None }
    }

    pub fn with_equation(mut self, f: Poly2) -> Self {
        self.equation = Some(f);
        self
    }
}

impl fmt::Display for PuiseuxBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}", self.series, self.base.projective())
    }
}

/// Default expansion order for a polynomial of degree `d`.
pub fn default_order(d: u32) -> u32 {
    (4 * d * d).max(1)
}

fn render_univariate(coeffs: &[Rational], var: &str) -> String {
    let p = Poly2::from_terms(coeffs.iter().enumerate().map(|(k, c)| ((k as u32, 0), c.clone())));
    p.render(var, "_")
}

/// Base points of `{Q = 0}` on the line at infinity with their
/// intersection multiplicities.
pub fn points_at_infinity(q: &Poly2) -> Result<Vec<(PointAtInfinity, u32)>> {
    let d = q.degree().ok_or(CoreError::ZeroOrConstant)?;
    if d == 0 {
        return Err(CoreError::ZeroOrConstant);
    }
    // Top form evaluated at (1, lambda), lambda = y/x.
    let top: Vec<Rational> = (0..=d).map(|j| q.coeff(d - j, j)).collect();
    let report = rational_roots(&top);
    let mut out = Vec::new();
    if report.cofactor.len() > 1 {
        return Err(CoreError::NeedsFieldExtension(render_univariate(&report.cofactor, "z")));
    }
    let mut total = 0;
    for (lambda, mult) in &report.roots {
        out.push((PointAtInfinity::XChart(-lambda.clone()), *mult));
        total += mult;
    }
    if total < d {
        out.push((PointAtInfinity::YChart, d - total));
    }
    Ok(out)
}

/// All branches of `{Q = 0}` at infinity, expanded to order `k` (in units
/// of the ramification index) unless they terminate.
pub fn branches_at_infinity(q: &Poly2, k: Option<u32>) -> Result<Vec<PuiseuxBranch>> {
    let d = q.degree().ok_or(CoreError::ZeroOrConstant)?;
    let k = k.unwrap_or_else(|| default_order(d));
    let mut out = Vec::new();
    for (base, _) in points_at_infinity(q)? {
        let (local, _) = base.local_equation(q)?;
        let mut found = Vec::new();
        expand(local, 1, BTreeMap::new(), 0, k, &mut found)?;
        for (series, mult) in found {
            let series = series.reduced();
            out.push(PuiseuxBranch {
                base: base.clone(),
                multiplicity: mult,
                series,
                equation: Some(q.clone()),
            });
        }
    }
    Ok(out)
}

/// Newton–Puiseux recursion on `F(t, w)` where `u = t^m` and
/// `v = prefix(t) + t^e w`.
fn expand(
    f: Poly2,
    m: u32,
    prefix: BTreeMap<u32, Rational>,
    e: u32,
    k: u32,
    out: &mut Vec<(PuiseuxSeries, u32)>,
) -> Result<()> {
    let mut f = f;
    let w_order = f.y_order().unwrap_or(0);
    if w_order > 0 {
        let trunc = prefix.keys().last().copied().unwrap_or(0).max(e);
        out.push((PuiseuxSeries::new(m, prefix.clone(), trunc, true)?, w_order * m));
        f = f.div_y_pow(w_order);
    }
    let j_axis = f
        .terms()
        .filter(|(&(i, _), _)| i == 0)
        .map(|(&(_, j), _)| j)
        .min();
    let Some(big_j) = j_axis else {
        return Err(CoreError::InternalMismatch("expansion lost its leading terms".into()));
    };
    if big_j == 0 {
        return Ok(());
    }
    if big_j == 1 {
        // A simple root: the rest of the expansion is a power series.
        let n = k.saturating_sub(e).max(1);
        let w = implicit_root(&f, n);
        let t = Series1::monomial(1, Rational::one());
        let exact = Series1::eval_poly2(&f, &t, &Series1::exact(w.coeffs().clone())).is_exact_zero();
        let mut coeffs = prefix;
        for (&j, c) in w.coeffs() {
            coeffs.insert(e + j, c.clone());
        }
        let trunc = if exact { coeffs.keys().last().copied().unwrap_or(e) } else { e + n };
        out.push((PuiseuxSeries::new(m, coeffs, trunc, exact)?, m));
        return Ok(());
    }
    if e >= k && e > 0 {
        out.push((PuiseuxSeries::new(m, prefix, e, false)?, big_j * m));
        return Ok(());
    }
    for edge in lower_edges(&f, big_j) {
        let Edge { p, q, n, low_j, high_j } = edge;
        let psi: Vec<Rational> = (0..=(high_j - low_j) / q)
            .map(|s| {
                let j = low_j + q * s;
                if (n - p * j) % q != 0 {
                    return Rational::zero();
                }
                f.coeff((n - p * j) / q, j)
            })
            .collect();
        let report = rational_roots(&psi);
        if report.cofactor.len() > 1 {
            return Err(CoreError::NeedsFieldExtension(render_univariate(&report.cofactor, "z")));
        }
        for (rho, _mult) in report.roots {
            let c = rational_nth_root(&rho, q).ok_or_else(|| {
                CoreError::NeedsFieldExtension(format!("z^{q} - {}", vinf_exact::rat_str(&rho)))
            })?;
            let su = Poly2::monomial(q, 0, Rational::one());
            let sv = &Poly2::monomial(p, 0, Rational::one())
                * &(&Poly2::constant(c.clone()) + &Poly2::y());
            let g = f.compose(&su, &sv).div_x_pow(n);
            let mut next: BTreeMap<u32, Rational> =
                prefix.iter().map(|(&j, a)| (j * q, a.clone())).collect();
            let e_next = q * e + p;
            next.insert(e_next, c);
            expand(g, m * q, next, e_next, k, out)?;
        }
    }
    Ok(())
}

fn derivative_w(f: &Poly2) -> Poly2 {
    Poly2::from_terms(
        f.terms()
            .filter(|(&(_, j), _)| j > 0)
            .map(|(&(i, j), c)| ((i, j - 1), c * Rational::from_integer(j.into()))),
    )
}

/// The root `w(t)` with `w(0) = 0` of `F(t, w) = 0` modulo `t^{n+1}`,
/// assuming `∂F/∂w(0, 0) != 0`.
fn implicit_root(f: &Poly2, n: u32) -> Series1 {
    let fw = derivative_w(f);
    let t = Series1::monomial(1, Rational::one());
    let mut w = Series1::with_prec([], Some(1));
    let mut p = 1;
    while p < n + 1 {
        p = (2 * p).min(n + 1);
        let wp = Series1::with_prec(w.coeffs().clone(), Some(p));
        let num = Series1::eval_poly2(f, &t, &wp);
        let den = Series1::eval_poly2(&fw, &t, &wp);
        let corr = num.checked_div(&den, p).expect("the derivative is a unit");
        w = (&wp - &corr).truncate(p);
    }
    w
}

struct Edge {
    p: u32,
    q: u32,
    n: u32,
    low_j: u32,
    high_j: u32,
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Edges of the Newton polygon between `(0, big_j)` and the `j = 0` axis.
fn lower_edges(f: &Poly2, big_j: u32) -> Vec<Edge> {
    let pts: Vec<(u32, u32)> = f.terms().map(|(&k, _)| k).collect();
    let mut edges = Vec::new();
    let (mut ci, mut cj) = (0u32, big_j);
    while cj > 0 {
        // Minimal slope (i - ci) / (cj - j) over points below the current one.
        let mut best: Option<(u32, u32)> = None;
        for &(i, j) in &pts {
            if j >= cj || i < ci {
                continue;
            }
            match best {
                None => best = Some((i, j)),
                Some((bi, bj)) => {
                    let lhs = (i - ci) as u64 * (cj - bj) as u64;
                    let rhs = (bi - ci) as u64 * (cj - j) as u64;
                    if lhs < rhs || (lhs == rhs && j < bj) {
                        best = Some((i, j));
                    }
                }
            }
        }
        let (ni, nj) = best.expect("a term on the axis closes the polygon");
        let num = ni - ci;
        let den = cj - nj;
        let g = gcd(num, den);
        let (p, q) = (num / g, den / g);
        edges.push(Edge { p, q, n: q * ci + p * cj, low_j: nj, high_j: cj });
        ci = ni;
        cj = nj;
    }
    edges
}

/// `Δ log|Q| = sum m_i δ_{v_{s_i}}`.
pub fn log_laplacian(q: &Poly2, k: Option<u32>) -> Result<DiscreteMeasure<Valuation>> {
    let mut mu = DiscreteMeasure::new();
    for b in branches_at_infinity(q, k)? {
        let mass = Rational::from_integer(b.multiplicity.into());
        mu.add_valuation(Valuation::curve(b), mass)?;
    }
    Ok(mu)
}

/// Skewness where `Q` first reaches valuation zero on the segment towards
/// branch `i`, given the skewness `betas[j]` of the meets with the other
/// branches (`None` for the branch itself).
fn crossing_skewness(masses: &[Rational], betas: &[Option<Rational>]) -> Rational {
    let total: Rational = masses.iter().cloned().sum();
    let mut finite: Vec<(Rational, Rational)> = betas
        .iter()
        .zip(masses)
        .filter_map(|(b, m)| b.clone().map(|b| (b, m.clone())))
        .collect();
    finite.sort_by(|a, b| b.0.cmp(&a.0));
    let mut above_mass = Rational::zero();
    let mut above_sum = Rational::zero();
    for r in 0..=finite.len() {
        let a = -&above_sum / (&total - &above_mass);
        let upper_ok = r == 0 || a < finite[r - 1].0;
        let lower_ok = r == finite.len() || a >= finite[r].0;
        if upper_ok && lower_ok {
            return a;
        }
        if r < finite.len() {
            above_mass += &finite[r].1;
            above_sum += &finite[r].1 * &finite[r].0;
        }
    }
    unreachable!("the crossing equation has a solution")
}

/// `Δ log⁺|Q|`: one atom per branch where the valuation of `Q` first
/// vanishes, atoms merged with their masses added.
pub fn logplus_laplacian(q: &Poly2, k: Option<u32>) -> Result<DiscreteMeasure<Valuation>> {
    let branches: Vec<Valuation> =
        branches_at_infinity(q, k)?.into_iter().map(Valuation::curve).collect();
    let masses: Vec<Rational> = branches
        .iter()
        .map(|v| match v {
            Valuation::Curve(b) => Rational::from_integer(b.multiplicity.into()),
            _ => unreachable!(),
        })
        .collect();
    let mut mu = DiscreteMeasure::new();
    for (i, vi) in branches.iter().enumerate() {
        let mut betas = Vec::with_capacity(branches.len());
        for (j, vj) in branches.iter().enumerate() {
            if i == j {
                betas.push(None);
            } else {
                let m = meet(vi, vj)?;
                betas.push(m.skewness()?.as_finite().cloned());
            }
        }
        let a = crossing_skewness(&masses, &betas);
        let atom = point_on_segment(vi, &a)?;
        mu.add_valuation(atom, masses[i].clone())?;
    }
    Ok(mu)
}
