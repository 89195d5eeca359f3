//! Richness of finite sets of valuations: the skewness matrix, its signed
//! determinant χ, and the classification pipeline built on it.

use std::fmt;

use num_traits::{One, Zero};
use vinf_exact::{chi_det, kernel, solve_linear, ExtRational, LinearSolution, Poly2, Rational, SymMatrixExt};

use crate::error::{CoreError, Result};
use crate::polyfinder::{find_nonnegative_nonconstant, find_positive};
use crate::potential::{dirichlet, value, DiscreteMeasure, ValuationTree};
use crate::valuations::{compare, meet, Comparison, Valuation};

/// Which inputs survived the reduction `S -> S^min -> S^min_+`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Reduction {
    /// Indices of the kept elements, in input order.
    pub kept: Vec<usize>,
    /// `(i, j)`: element `i` equals the earlier element `j`.
    pub duplicates: Vec<(usize, usize)>,
    /// `(i, j)`: element `i` lies strictly above element `j`.
    pub non_minimal: Vec<(usize, usize)>,
    /// Minimal elements of skewness `-inf`.
    pub infinite: Vec<usize>,
}

impl Reduction {
    pub fn select(&self, s: &[Valuation]) -> Vec<Valuation> {
        self.kept.iter().map(|&i| s[i].clone()).collect()
    }
}

pub fn reduce(s: &[Valuation]) -> Result<Reduction> {
    let mut red = Reduction::default();
    let mut distinct: Vec<usize> = Vec::new();
    'dedupe: for i in 0..s.len() {
        for &j in &distinct {
            if compare(&s[i], &s[j])? == Comparison::Eq {
                red.duplicates.push((i, j));
                continue 'dedupe;
            }
        }
        distinct.push(i);
    }
    for &i in &distinct {
        let mut below = None;
        for &j in &distinct {
            if j != i && compare(&s[j], &s[i])? == Comparison::Lt {
                below = Some(j);
                break;
            }
        }
        match below {
            Some(j) => red.non_minimal.push((i, j)),
            None if !s[i].skewness()?.is_finite() => red.infinite.push(i),
            None => red.kept.push(i),
        }
    }
    Ok(red)
}

fn dedupe(s: &[Valuation]) -> Result<Vec<Valuation>> {
    let mut out: Vec<Valuation> = Vec::new();
    'outer: for v in s {
        for w in &out {
            if compare(v, w)? == Comparison::Eq {
                continue 'outer;
            }
        }
        out.push(v.clone());
    }
    Ok(out)
}

/// `[α(v_i ∧ v_j)]`, with the skewness of `v_i` on the diagonal.
pub fn matrix_alpha(s: &[Valuation]) -> Result<SymMatrixExt> {
    let n = s.len();
    let mut rows = vec![vec![ExtRational::zero(); n]; n];
    for i in 0..n {
        rows[i][i] = s[i].skewness()?;
        for j in (i + 1)..n {
            let a = meet(&s[i], &s[j])?.skewness()?;
            rows[i][j] = a.clone();
            rows[j][i] = a;
        }
    }
    Ok(SymMatrixExt::new(rows)?)
}

/// `χ(S) = (-1)^l det M(S)` after removing repeated points; `χ(∅) = 1`.
pub fn chi_of(s: &[Valuation]) -> Result<ExtRational> {
    let s = dedupe(s)?;
    if s.is_empty() {
        return Ok(ExtRational::from(1));
    }
    Ok(chi_det(&matrix_alpha(&s)?))
}

fn finite_matrix(s: &[Valuation]) -> Result<Vec<Vec<Rational>>> {
    let m = matrix_alpha(s)?;
    let mut out = Vec::with_capacity(s.len());
    for i in 0..s.len() {
        let mut row = Vec::with_capacity(s.len());
        for j in 0..s.len() {
            row.push(m.get(i, j).as_finite().cloned().ok_or_else(|| {
                CoreError::PreconditionViolated("every valuation must have finite skewness".into())
            })?);
        }
        out.push(row);
    }
    Ok(out)
}

/// The solution `a` of `a_0 + Σ_j a_j α(v_i ∧ v_j) = 0` for all `i` and
/// `Σ_j a_j = 1` (with `a_0` the mass at the root), and the measure it
/// describes.
pub fn star_system(s: &[Valuation]) -> Result<(Vec<Rational>, DiscreteMeasure<Valuation>)> {
    let m = finite_matrix(s)?;
    let n = s.len() + 1;
    let mut bordered = vec![vec![Rational::one(); n]; n];
    for i in 0..s.len() {
        for j in 0..s.len() {
            bordered[i + 1][j + 1] = m[i][j].clone();
        }
    }
    let mut rhs = vec![Rational::zero(); n];
    rhs[0] = Rational::one();
    let a = match solve_linear(&bordered, &rhs)? {
        LinearSolution::Solved { particular, kernel } if kernel.is_empty() => particular,
        _ => return Err(CoreError::SingularSystem),
    };
    let mut phi = DiscreteMeasure::new();
    phi.add_valuation(Valuation::Root, a[0].clone())?;
    for (v, c) in s.iter().zip(&a[1..]) {
        phi.add_valuation(v.clone(), c.clone())?;
    }
    let ctx = ValuationTree;
    let check = |ok: bool, what: &str| {
        if ok {
            Ok(())
        } else {
            Err(CoreError::InternalMismatch(format!("bordered system solution fails: {what}")))
        }
    };
    check(value(&ctx, &phi, &Valuation::Root)? == ExtRational::from(1), "value at the root")?;
    for v in s {
        check(value(&ctx, &phi, v)? == ExtRational::zero(), "vanishing on S")?;
    }
    check(dirichlet(&ctx, &phi, &phi)? == ExtRational::from(a[0].clone()), "energy")?;
    Ok((a, phi))
}

/// The positive measure on `S` with `M(S) a = 0`, scaled to total mass 1.
pub fn kernel_function(s: &[Valuation]) -> Result<DiscreteMeasure<Valuation>> {
    for i in 0..s.len() {
        for j in (i + 1)..s.len() {
            if compare(&s[i], &s[j])? != Comparison::Incomparable {
                return Err(CoreError::PreconditionViolated(format!(
                    "{} and {} are comparable",
                    s[i], s[j]
                )));
            }
        }
    }
    let m = finite_matrix(s)?;
    let ker = kernel(&m, s.len());
    if ker.len() != 1 {
        return Err(CoreError::KernelDimensionNotOne(ker.len()));
    }
    let a = &ker[0];
    let total: Rational = a.iter().cloned().sum();
    if total.is_zero() {
        return Err(CoreError::NonPositiveKernel);
    }
    let a: Vec<Rational> = a.iter().map(|x| x / &total).collect();
    if a.iter().any(|x| *x <= Rational::zero()) {
        return Err(CoreError::NonPositiveKernel);
    }
    let mut phi = DiscreteMeasure::new();
    for (v, c) in s.iter().zip(a) {
        phi.add_valuation(v.clone(), c)?;
    }
    Ok(phi)
}

/// `Σ m_i A(v_i)`.
pub fn thinness_integral(phi: &DiscreteMeasure<Valuation>) -> Result<ExtRational> {
    let mut acc = ExtRational::zero();
    for (v, m) in phi.atoms() {
        let term = v.thinness()?.scale(m)?;
        acc = acc
            .checked_add(&term)
            .map_err(|_| CoreError::Indeterminate("thinness integral of a signed measure".into()))?;
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Delta {
    Zero,
    One,
    Two,
    Unknown,
}

impl fmt::Display for Delta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Delta::Zero => "0",
            Delta::One => "1",
            Delta::Two => "2",
            Delta::Unknown => "unknown",
        })
    }
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub delta: Delta,
    pub chi: ExtRational,
    pub witness_positive: Option<Poly2>,
    pub witness_nonneg: Option<Poly2>,
    pub kernel_function: Option<DiscreteMeasure<Valuation>>,
    pub thinness_integral: Option<ExtRational>,
    pub reduction: Reduction,
    pub notes: Vec<String>,
}

pub fn classify(s: &[Valuation], max_degree: u32) -> Result<Classification> {
    if max_degree == 0 {
        return Err(CoreError::PreconditionViolated("the degree bound must be at least 1".into()));
    }
    let reduction = reduce(s)?;
    let reduced = reduction.select(s);
    let chi = chi_of(&reduced)?;
    let mut out = Classification {
        delta: Delta::Unknown,
        chi: chi.clone(),
        witness_positive: None,
        witness_nonneg: None,
        kernel_function: None,
        thinness_integral: None,
        reduction,
        notes: Vec::new(),
    };
    match chi.signum() {
        1 => {
            out.delta = Delta::Two;
            match find_positive(s, max_degree) {
                Ok(Some(p)) => out.witness_positive = Some(p),
                Ok(None) => out.notes.push(format!("no positive witness up to degree {max_degree}")),
                Err(CoreError::InsufficientTruncation(msg)) => {
                    out.notes.push(format!("positive witness search stopped: {msg}"))
                }
                Err(e) => return Err(e),
            }
        }
        -1 => out.delta = Delta::Zero,
        _ => {
            let minimal_curve = !out.reduction.infinite.is_empty();
            let root_only = reduced.iter().any(Valuation::is_root);
            if minimal_curve || root_only {
                out.delta = Delta::Zero;
                out.notes.push("a minimal element is not divisorial".into());
                return Ok(out);
            }
            let phi = kernel_function(&reduced)?;
            let a = thinness_integral(&phi)?;
            out.kernel_function = Some(phi);
            out.thinness_integral = Some(a.clone());
            let witness = find_nonnegative_nonconstant(s, max_degree);
            let witness = match witness {
                Ok(w) => w,
                Err(CoreError::InsufficientTruncation(msg)) => {
                    out.notes.push(format!("nonnegative witness search stopped: {msg}"));
                    None
                }
                Err(e) => return Err(e),
            };
            if a <= ExtRational::zero() {
                out.delta = Delta::One;
                out.witness_nonneg = witness;
            } else if let Some(p) = witness {
                out.delta = Delta::One;
                out.witness_nonneg = Some(p);
            } else {
                out.delta = Delta::Unknown;
                out.notes.push(format!(
                    "positive thinness integral and no nonconstant witness up to degree {max_degree}"
                ));
            }
        }
    }
    Ok(out)
}
