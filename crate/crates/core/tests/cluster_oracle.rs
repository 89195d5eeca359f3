use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vinf_core::cluster::{Center, Cluster};
use vinf_core::generators::random_cluster;
use vinf_core::valuations::{compare, meet, Comparison, Valuation};
use vinf_exact::{inverse, ExtRational, Poly2, Rational};

/// Intersection matrix of `L∞, E_0, ...` rebuilt from the centers alone:
/// each blowup lowers the self-intersection of the components through its
/// center and separates them if there are two.
fn intersection_oracle(cl: &Cluster) -> Vec<Vec<Rational>> {
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

fn ordinate(v: &Valuation, p: &str) -> ExtRational {
    v.evaluate(&Poly2::parse(p).unwrap()).unwrap()
}

fn check_cluster(cl: &Cluster) {
    let g = cl.geometry().unwrap();
    let inter = intersection_oracle(cl);
    let duals = inverse(&inter).expect("intersection matrix is unimodular");
    let n = cl.len();
    let vals: Vec<Valuation> = (0..n).map(|k| Valuation::divisorial(cl.clone(), k).unwrap()).collect();
    for k in 0..n {
        let e = k + 1;
        let b = Rational::from_integer(g.b[e].into());
        assert_eq!(Rational::from_integer(g.intersection[e][e].into()), inter[e][e]);
        assert_eq!(&duals[e][e] / (&b * &b), g.alpha[e], "node {k}");
        assert_eq!(vals[k].skewness().unwrap(), ExtRational::from(g.alpha[e].clone()));
        // Denominators divide b^2 and b.
        assert!((g.alpha[e].clone() * &b * &b).is_integer());
        assert!((g.thinness[e].clone() * &b).is_integer());
        // Normalization min(v(x), v(y)) = -1.
        assert_eq!(ordinate(&vals[k], "x").min(ordinate(&vals[k], "y")), ExtRational::from(-1));
        for j in 0..n {
            let bj = Rational::from_integer(g.b[j + 1].into());
            let a = meet(&vals[k], &vals[j]).unwrap().skewness().unwrap();
            assert_eq!(ExtRational::from(duals[e][j + 1].clone()), a.scale(&(&b * &bj)).unwrap());
        }
        // Monotone along the dual graph path from the line at infinity.
        let path = g.dual_path(e);
        for w in path.windows(2) {
            assert!(g.alpha[w[1]] < g.alpha[w[0]]);
            if w[0] != 0 {
                assert!(g.thinness[w[1]] > g.thinness[w[0]]);
            }
        }
    }
}

#[test]
fn fixed_seed_batch() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..40 {
        check_cluster(&random_cluster(&mut rng, 8, 3).unwrap());
    }
}

#[test]
fn evaluation_is_monotone_in_the_tree_order() {
    let corpus: Vec<Poly2> =
        ["x", "y", "x*y - 1", "y^2 - x^3", "y - x^2 + 3", "x^2 + y^2 - 1", "x^3*y - 2y^2 + x"]
            .iter()
            .map(|s| Poly2::parse(s).unwrap())
            .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let cl = random_cluster(&mut rng, 6, 2).unwrap();
        let vals: Vec<Valuation> = (0..cl.len()).map(|k| Valuation::divisorial(cl.clone(), k).unwrap()).collect();
        for v in &vals {
            for w in &vals {
                if compare(v, w).unwrap() == Comparison::Lt {
                    for p in &corpus {
                        assert!(v.evaluate(p).unwrap() <= w.evaluate(p).unwrap(), "{v} < {w} at {p}");
                    }
                }
            }
        }
    }
}

#[test]
fn root_component_is_the_degree() {
    let cl = Cluster::default();
    let g = cl.geometry().unwrap();
    assert_eq!((g.alpha[0].clone(), g.thinness[0].clone()), (Rational::one(), Rational::from_integer((-2).into())));
    assert!(g.b[0] == 1 && !g.alpha[0].is_zero());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dual_divisors_match_skewness(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        check_cluster(&random_cluster(&mut rng, 8, 3).unwrap());
    }
}
