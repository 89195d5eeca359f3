use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vinf_core::cluster::Cluster;
use vinf_core::generators::{chi_zero_instance, random_incomparable_set, random_mixed_set, random_path};
use vinf_core::polyfinder::{find_nonnegative_nonconstant, find_positive, valuation_conditions};
use vinf_core::potential::{dirichlet, value, ValuationTree};
use vinf_core::puiseux::branches_at_infinity;
use vinf_core::richness::{chi_of, classify, kernel_function, matrix_alpha, reduce, star_system, Delta};
use vinf_core::valuations::{meet, Valuation};
use vinf_exact::{is_negative_definite, rat, ExtRational, Rational};

fn dedupe_keys(s: &[Valuation]) -> Vec<Valuation> {
    let mut out: Vec<Valuation> = Vec::new();
    for v in s {
        if !out.iter().any(|w| w.key().unwrap() == v.key().unwrap()) {
            out.push(v.clone());
        }
    }
    out
}

fn check_mixed(rng: &mut ChaCha8Rng) {
    let size = rng.gen_range(1..=4);
    let s = random_mixed_set(rng, size, 4).unwrap();
    let chi = chi_of(&s).unwrap();
    let distinct = dedupe_keys(&s);
    assert_eq!(chi.signum() > 0, is_negative_definite(&matrix_alpha(&distinct).unwrap()));
    let red = reduce(&s).unwrap();
    let reduced = red.select(&s);
    assert_eq!(chi.signum() > 0, chi_of(&reduced).unwrap().signum() > 0);
}

fn check_star(rng: &mut ChaCha8Rng) {
    let size = rng.gen_range(1..=4);
    let s = random_incomparable_set(rng, size, 4).unwrap();
    let chi = chi_of(&s).unwrap();
    match star_system(&s) {
        Ok((a, phi)) => {
            let ctx = ValuationTree;
            assert_eq!(dirichlet(&ctx, &phi, &phi).unwrap(), ExtRational::from(a[0].clone()));
            assert_eq!(ExtRational::from(a[0].clone()).signum(), chi.signum());
            for v in &s {
                assert_eq!(value(&ctx, &phi, v).unwrap(), ExtRational::zero());
            }
        }
        Err(e) => panic!("bordered system failed on {} valuations with chi {chi}: {e}", s.len()),
    }
}

#[test]
fn chi_and_reduction_on_random_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..60 {
        check_mixed(&mut rng);
    }
}

#[test]
fn bordered_systems_on_random_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(78);
    for _ in 0..60 {
        check_star(&mut rng);
    }
}

#[test]
fn divisorial_congruence_in_one_cluster() {
    let mut rng = ChaCha8Rng::seed_from_u64(79);
    for _ in 0..30 {
        let paths: Vec<_> = (0..3).map(|_| random_path(&mut rng, 5)).collect();
        let refs: Vec<_> = paths.iter().collect();
        let (cl, nodes) = Cluster::from_paths(&refs).unwrap();
        let mut picked: Vec<usize> = nodes.clone();
        picked.sort();
        picked.dedup();
        let s: Vec<Valuation> = picked.iter().map(|&k| Valuation::divisorial(cl.clone(), k).unwrap()).collect();
        let g = cl.geometry().unwrap();
        let m = matrix_alpha(&s).unwrap();
        let mut scaled = Vec::new();
        for (i, &a) in picked.iter().enumerate() {
            let mut row = Vec::new();
            for (j, &b) in picked.iter().enumerate() {
                let ba = rat(g.b[a + 1], 1);
                let bb = rat(g.b[b + 1], 1);
                assert_eq!(ExtRational::from(g.check_dual(a + 1, b + 1)), m.get(i, j).scale(&(&ba * &bb)).unwrap());
                row.push(ExtRational::from(g.check_dual(a + 1, b + 1)));
            }
            scaled.push(row);
        }
        let duals = vinf_exact::SymMatrixExt::new(scaled).unwrap();
        assert_eq!(is_negative_definite(&duals), is_negative_definite(&m));
    }
}

#[test]
fn zero_determinant_kernels_are_positive() {
    let ctx = ValuationTree;
    for k in 1..=4 {
        let s = chi_zero_instance(k).unwrap();
        let phi = kernel_function(&s).unwrap();
        assert!(phi.is_positive());
        assert_eq!(phi.total_mass(), rat(1, 1));
        assert_eq!(dirichlet(&ctx, &phi, &phi).unwrap(), ExtRational::zero());
    }
}

#[test]
fn single_valuation_grid() {
    for t in [rat(-1, 1), rat(-1, 2), rat(0, 1), rat(1, 3), rat(1, 2), rat(1, 1), rat(2, 1), rat(3, 1)] {
        let v = Valuation::monomial(rat(-1, 1), t.clone()).unwrap_or(Valuation::Root);
        let alpha = v.skewness().unwrap();
        let rich = chi_of(&[v.clone()]).unwrap().signum() > 0;
        let witness = find_positive(&[v.clone()], 6).unwrap();
        assert_eq!(rich, alpha < ExtRational::zero(), "t = {t}");
        assert_eq!(rich, witness.is_some(), "t = {t}");
        if t <= rat(1, 1) {
            assert_eq!(alpha, ExtRational::from(-t.clone()));
        }
    }
}

#[test]
fn witnesses_are_sound_and_match_branch_meets() {
    let mut rng = ChaCha8Rng::seed_from_u64(80);
    for _ in 0..25 {
        let size = rng.gen_range(1..=2);
        let s = random_incomparable_set(&mut rng, size, 3).unwrap();
        let c = classify(&s, 4).unwrap();
        let w = c.witness_positive.clone().or(c.witness_nonneg.clone());
        if c.delta == Delta::Two {
            assert!(c.chi.signum() > 0);
        }
        let Some(p) = w else { continue };
        let strict = c.witness_positive.is_some();
        let Ok(branches) = branches_at_infinity(&p, None) else { continue };
        for v in &s {
            let val = v.evaluate(&p).unwrap();
            assert!(if strict { val > ExtRational::zero() } else { val >= ExtRational::zero() });
            let mut acc = Rational::from_integer(0.into());
            for b in &branches {
                let a = meet(v, &Valuation::curve(b.clone())).unwrap().skewness().unwrap();
                acc += a.as_finite().unwrap() * rat(b.multiplicity as i64, 1);
            }
            assert_eq!(val, ExtRational::from(-acc));
        }
    }
}

#[test]
fn solution_spaces_grow_with_degree() {
    let mut rng = ChaCha8Rng::seed_from_u64(81);
    for _ in 0..10 {
        let s = random_incomparable_set(&mut rng, 2, 3).unwrap();
        for strict in [true, false] {
            let mut last = 0;
            for d in 1..=4 {
                let mut sys = valuation_conditions(&s[0], d, strict).unwrap();
                for v in &s[1..] {
                    sys.extend(&valuation_conditions(v, d, strict).unwrap());
                }
                assert!(sys.solution_dim() >= last);
                last = sys.solution_dim();
            }
        }
    }
}

#[test]
fn classification_examples() {
    assert_eq!(classify(&[Valuation::Root], 4).unwrap().delta, Delta::Zero);
    assert!(find_nonnegative_nonconstant(&[Valuation::Root], 4).unwrap().is_none());
    let c = classify(&chi_zero_instance(2).unwrap(), 3).unwrap();
    assert_eq!(c.chi, ExtRational::zero());
    assert!(c.kernel_function.is_some());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chi_laws(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        check_mixed(&mut rng);
        check_star(&mut rng);
    }
}
