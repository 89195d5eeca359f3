//! Dense exact linear algebra over the rationals.

use num_traits::{One, Zero};

use crate::{ExactError, Rational};

/// Result of [`solve_linear`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinearSolution {
    /// A particular solution together with a basis of the kernel of `A`.
    Solved {
        particular: Vec<Rational>,
        kernel: Vec<Vec<Rational>>,
    },
    NoSolution,
}

/// Reduced row echelon form. Returns the reduced matrix and its pivot
/// columns.
pub fn rref(rows: &[Vec<Rational>], ncols: usize) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Rational::one() / &m[r][c];
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(rows: &[Vec<Rational>], ncols: usize) -> usize {
    rref(rows, ncols).1.len()
}

/// Basis of `{x : A x = 0}`, one vector per free column, each with a 1 in
/// its free column.
pub fn kernel(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let (m, pivots) = rref(rows, ncols);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Rational::zero(); ncols];
        v[free] = Rational::one();
        for (row, &pc) in m.iter().zip(&pivots) {
            v[pc] = -row[free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Inverse of a square matrix, or `None` when singular.
pub fn inverse(a: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = a.len();
    let aug: Vec<Vec<Rational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    let (m, pivots) = rref(&aug, 2 * n);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Solves `A x = b` exactly by Gaussian elimination.
pub fn solve_linear(a: &[Vec<Rational>], b: &[Rational]) -> Result<LinearSolution, ExactError> {
    if a.len() != b.len() {
        return Err(ExactError::DimensionMismatch(format!(
            "{} rows but right-hand side of length {}",
            a.len(),
            b.len()
        )));
    }
    let ncols = a.first().map_or(0, Vec::len);
    if let Some(bad) = a.iter().position(|r| r.len() != ncols) {
        return Err(ExactError::DimensionMismatch(format!("row {bad} has the wrong length")));
    }
    let aug: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (m, pivots) = rref(&aug, ncols + 1);
    if pivots.last() == Some(&ncols) {
        return Ok(LinearSolution::NoSolution);
    }
    let mut x = vec![Rational::zero(); ncols];
    for (row, &pc) in m.iter().zip(&pivots) {
        x[pc] = row[ncols].clone();
    }
    Ok(LinearSolution::Solved {
        particular: x,
        kernel: kernel(a, ncols),
    })
}

/// `A x` for a dense matrix.
pub fn mat_vec(a: &[Vec<Rational>], x: &[Rational]) -> Vec<Rational> {
    a.iter()
        .map(|row| row.iter().zip(x).fold(Rational::zero(), |acc, (p, q)| acc + p * q))
        .collect()
}

/// Determinant of a square rational matrix by elimination.
pub fn det(a: &[Vec<Rational>]) -> Rational {
    let n = a.len();
    let mut m = a.to_vec();
    let mut d = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= &m[c][c];
        let pivot_row = m[c].clone();
        for row in m.iter_mut().skip(c + 1) {
            if !row[c].is_zero() {
                let f = &row[c] / &pivot_row[c];
                for (x, y) in row.iter_mut().zip(&pivot_row).skip(c) {
                    *x -= &f * y;
                }
            }
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&x| rat(x, 1)).collect()).collect()
    }

    #[test]
    fn two_by_two_system() {
        let sol = solve_linear(&m(&[&[1, 1], &[1, -1]]), &[rat(1, 1), rat(0, 1)]).unwrap();
        assert_eq!(
            sol,
            LinearSolution::Solved {
                particular: vec![rat(1, 2), rat(1, 2)],
                kernel: vec![]
            }
        );
    }

    #[test]
    fn trivial_systems() {
        let sol = solve_linear(&m(&[&[1]]), &[rat(0, 1)]).unwrap();
        assert_eq!(
            sol,
            LinearSolution::Solved {
                particular: vec![rat(0, 1)],
                kernel: vec![]
            }
        );
        assert_eq!(
            solve_linear(&m(&[&[0]]), &[rat(1, 1)]).unwrap(),
            LinearSolution::NoSolution
        );
        assert!(solve_linear(&m(&[&[1, 2]]), &[rat(1, 1), rat(2, 1)]).is_err());
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let a = m(&[&[1, 2, 3, 4], &[2, 4, 6, 8], &[0, 1, 1, 0]]);
        let k = kernel(&a, 4);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(mat_vec(&a, v).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn inverse_round_trip() {
        let a = m(&[&[0, 1], &[1, -1]]);
        let inv = inverse(&a).unwrap();
        assert_eq!(inv, m(&[&[1, 1], &[1, 0]]));
        assert!(inverse(&m(&[&[1, 2], &[2, 4]])).is_none());
    }
}
