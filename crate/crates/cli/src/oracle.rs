//! Randomized consistency check of cluster geometry.
//!
//! Every cluster is checked against an intersection matrix rebuilt from the
//! centers alone, so the comparison does not share code with the edge
//! recursion used for skewness.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vinf_core::cluster::{Center, Cluster};
use vinf_core::generators::random_cluster;
use vinf_core::valuations::{meet, Valuation};
use vinf_exact::{inverse, ExtRational, Rational};

use crate::error::{CliError, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OracleReport {
    pub clusters: usize,
    pub nodes: usize,
    pub pairs: usize,
    /// Clusters where every node has `α = b^-2 (Ě·Ě)`.
    pub alpha_consistent: usize,
    /// Clusters where every pair has `(Ěi·Ěj) = bi bj α(vi ∧ vj)`.
    pub pair_consistent: usize,
    /// Clusters where thinness increases strictly along dual graph paths.
    pub thinness_monotone: usize,
    pub failures: Vec<String>,
}

impl OracleReport {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Intersection matrix of `L∞, E_0, E_1, ...` from the blowup centers.
pub fn intersection_oracle(cl: &Cluster) -> Vec<Vec<Rational>> {
    let n = cl.len() + 1;
    let mut m = vec![vec![0i64; n]; n];
    m[0][0] = 1;
    for (k, c) in cl.centers().iter().enumerate() {
        let comps: Vec<usize> = match c {
            Center::Base(_) => vec![0],
            Center::Free { parent, .. } => vec![parent + 1],
            Center::Satellite { parent, other } => vec![parent + 1, other.index()],
        };
        let e = k + 1;
        m[e][e] = -1;
        for &a in &comps {
            m[a][a] -= 1;
            m[a][e] = 1;
            m[e][a] = 1;
        }
        if let [a, b] = comps[..] {
            m[a][b] = 0;
            m[b][a] = 0;
        }
    }
    m.iter().map(|r| r.iter().map(|&v| Rational::from_integer(v.into())).collect()).collect()
}

fn check_one(cl: &Cluster, idx: usize, report: &mut OracleReport) -> Result<()> {
    let g = cl.geometry()?;
    let duals = inverse(&intersection_oracle(cl))
        .ok_or_else(|| CliError::Internal(format!("cluster {idx}: intersection matrix is singular")))?;
    let n = cl.len();
    let vals: Vec<Valuation> = (0..n).map(|k| Valuation::divisorial(cl.clone(), k)).collect::<std::result::Result<_, _>>()?;
    let bs: Vec<Rational> = (0..n).map(|k| Rational::from_integer(g.b[k + 1].into())).collect();
    let (mut alpha_ok, mut pair_ok, mut thin_ok) = (true, true, true);
    for k in 0..n {
        let e = k + 1;
        let alpha = cl.node_data(k)?.alpha;
        if &duals[e][e] / (&bs[k] * &bs[k]) != alpha {
            alpha_ok = false;
            report.failures.push(format!("cluster {idx}, node {k}: skewness {alpha} disagrees with the dual divisor"));
        }
        for j in k..n {
            report.pairs += 1;
            let a = meet(&vals[k], &vals[j])?.skewness()?;
            let want = a.scale(&(&bs[k] * &bs[j]))?;
            if ExtRational::from(duals[e][j + 1].clone()) != want {
                pair_ok = false;
                report.failures.push(format!("cluster {idx}, nodes {k} and {j}: pairing {} but meet gives {want}", duals[e][j + 1]));
            }
        }
        for w in g.dual_path(e).windows(2) {
            if w[0] != 0 && g.thinness[w[1]] <= g.thinness[w[0]] {
                thin_ok = false;
                report.failures.push(format!("cluster {idx}: thinness does not increase from {} to {}", w[0], w[1]));
            }
        }
    }
    report.nodes += n;
    report.alpha_consistent += alpha_ok as usize;
    report.pair_consistent += pair_ok as usize;
    report.thinness_monotone += thin_ok as usize;
    Ok(())
}

/// Checks `count` random clusters of depth at most `max_depth` drawn from
/// `seed`.
pub fn oracle_check(seed: u64, count: usize, max_depth: usize) -> Result<OracleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = OracleReport::default();
    for idx in 0..count {
        let cl = random_cluster(&mut rng, max_depth, 3)?;
        check_one(&cl, idx, &mut report)?;
        report.clusters += 1;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_batch_is_consistent() {
        let r = oracle_check(3, 10, 6).unwrap();
        assert_eq!(r.clusters, 10);
        assert!(r.all_passed(), "{:?}", r.failures);
        assert_eq!(r.alpha_consistent, 10);
    }

    #[test]
    fn seeds_are_reproducible() {
        assert_eq!(oracle_check(5, 4, 5).unwrap(), oracle_check(5, 4, 5).unwrap());
    }
}
