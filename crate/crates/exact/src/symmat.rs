//! Symmetric matrices whose entries may be `-inf`, with determinants and
//! definiteness read off in the limit of a shared large negative parameter.

use crate::linalg::det;
use crate::tpoly::sign_at_neg_infinity;
use crate::{ExactError, ExtRational, Rational, TPoly};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymMatrixExt {
    n: usize,
    entries: Vec<ExtRational>,
}

impl SymMatrixExt {
    /// Builds the matrix from its rows, checking symmetry and rejecting
    /// `+inf` entries.
    pub fn new(rows: Vec<Vec<ExtRational>>) -> Result<Self, ExactError> {
        let n = rows.len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(ExactError::DimensionMismatch(format!("row {i} has length {}", r.len())));
            }
        }
        for i in 0..n {
            for j in 0..n {
                if rows[i][j] == ExtRational::PosInf {
                    return Err(ExactError::PositiveInfinityEntry);
                }
                if rows[i][j] != rows[j][i] {
                    return Err(ExactError::NotSymmetric(i, j));
                }
            }
        }
        Ok(SymMatrixExt {
            n,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &ExtRational {
        &self.entries[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<ExtRational>> {
        self.entries.chunks(self.n.max(1)).map(<[_]>::to_vec).take(self.n).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(ExtRational::is_finite)
    }

    /// Determinant of the leading `k x k` block as a polynomial in the
    /// parameter that replaces every `-inf` entry.
    ///
    /// The determinant has degree at most `k`, so it is recovered exactly
    /// from `k + 1` rational evaluations.
    pub fn leading_minor(&self, k: usize) -> TPoly {
        let eval_at = |u: &Rational| -> Rational {
            let block: Vec<Vec<Rational>> = (0..k)
                .map(|i| {
                    (0..k)
                        .map(|j| match self.get(i, j) {
                            ExtRational::Finite(q) => q.clone(),
                            _ => u.clone(),
                        })
                        .collect()
                })
                .collect();
            det(&block)
        };
        let pts: Vec<(Rational, Rational)> = (0..=k as i64)
            .map(|t| {
                let u = Rational::from_integer(t.into());
                let d = eval_at(&u);
                (u, d)
            })
            .collect();
        TPoly::interpolate(&pts)
    }
}

/// `(-1)^l det M` in the limit `u -> -inf`, where every `-inf` entry is
/// replaced by the same `u`.
pub fn chi_det(m: &SymMatrixExt) -> ExtRational {
    let d = m.leading_minor(m.size());
    let d = if m.size() % 2 == 1 { -&d } else { d };
    d.limit_at_neg_infinity()
}

/// Sylvester's criterion evaluated in the limit: the k-th leading minor
/// must have sign `(-1)^k` as `u -> -inf`. A minor that vanishes
/// identically makes the matrix not negative definite.
pub fn is_negative_definite(m: &SymMatrixExt) -> bool {
    (1..=m.size()).all(|k| {
        let minor = m.leading_minor(k);
        let want = if k % 2 == 1 { -1 } else { 1 };
        !minor.is_zero() && sign_at_neg_infinity(&minor).0 == want
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ExtRational::NegInf;

    fn f(n: i64) -> ExtRational {
        ExtRational::from(n)
    }

    #[test]
    fn chi_of_small_matrices() {
        let m1 = SymMatrixExt::new(vec![vec![f(-1)]]).unwrap();
        assert_eq!(chi_det(&m1), f(1));
        let m2 = SymMatrixExt::new(vec![vec![NegInf, f(1)], vec![f(1), NegInf]]).unwrap();
        assert_eq!(chi_det(&m2), ExtRational::PosInf);
        let m3 = SymMatrixExt::new(vec![vec![f(0)]]).unwrap();
        assert_eq!(chi_det(&m3), f(0));
    }

    #[test]
    fn definiteness_examples() {
        assert!(is_negative_definite(&SymMatrixExt::new(vec![vec![f(-1)]]).unwrap()));
        assert!(!is_negative_definite(&SymMatrixExt::new(vec![vec![f(1)]]).unwrap()));
        let m = SymMatrixExt::new(vec![vec![NegInf, f(1)], vec![f(1), NegInf]]).unwrap();
        assert!(is_negative_definite(&m));
        assert!(!is_negative_definite(&SymMatrixExt::new(vec![vec![f(0)]]).unwrap()));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(SymMatrixExt::new(vec![vec![ExtRational::PosInf]]).is_err());
        assert!(SymMatrixExt::new(vec![vec![f(0), f(1)], vec![f(2), f(0)]]).is_err());
    }

    #[test]
    fn minor_with_mixed_entries() {
        // [[u, 1], [1, -2]] has determinant -2u - 1.
        let m = SymMatrixExt::new(vec![vec![NegInf, f(1)], vec![f(1), f(-2)]]).unwrap();
        let d = m.leading_minor(2);
        assert_eq!(d.coeffs(), &[crate::rat(-1, 1), crate::rat(-2, 1)]);
        assert_eq!(chi_det(&m), ExtRational::PosInf);
    }
}
