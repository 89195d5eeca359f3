use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vinf_core::generators::{above, random_curve, random_divisorial};
use vinf_core::valuations::{compare, distance, is_le, meet, Comparison, Valuation};
use vinf_exact::{rat, ExtRational, Poly2};

fn corpus() -> Vec<Poly2> {
    ["x", "y", "x - y", "x*y - 1", "y^2 - x^3", "y - x^2", "x^2 - 2y + 5", "x^3 + y^3 - x*y"]
        .iter()
        .map(|s| Poly2::parse(s).unwrap())
        .collect()
}

fn sample(rng: &mut ChaCha8Rng) -> Valuation {
    match rng.gen_range(0..6) {
        0 => random_curve(rng).unwrap(),
        1 => Valuation::Root,
        2 => {
            let t = rat(rng.gen_range(-1..=6), rng.gen_range(1..=3));
            Valuation::monomial(rat(-1, 1), t).unwrap_or(Valuation::Root)
        }
        _ => random_divisorial(rng, 5).unwrap(),
    }
}

fn eq(a: &Valuation, b: &Valuation) -> bool {
    compare(a, b).unwrap() == Comparison::Eq
}

fn check_triple(a: &Valuation, b: &Valuation, c: &Valuation) {
    let ab = meet(a, b).unwrap();
    assert!(eq(&ab, &meet(b, a).unwrap()));
    assert!(eq(&meet(a, a).unwrap(), a));
    assert!(is_le(&ab, a).unwrap() && is_le(&ab, b).unwrap());
    assert_eq!(ab.skewness().unwrap(), meet(b, a).unwrap().skewness().unwrap());
    // A common lower bound lies below the meet.
    let u = meet(&ab, c).unwrap();
    assert!(is_le(&u, &ab).unwrap());
    // Associativity.
    let left = meet(&ab, c).unwrap();
    let right = meet(a, &meet(b, c).unwrap()).unwrap();
    assert!(eq(&left, &right), "{left} vs {right}");
    // The order is reversed by skewness.
    match compare(a, b).unwrap() {
        Comparison::Lt => assert!(a.skewness().unwrap() >= b.skewness().unwrap()),
        Comparison::Gt => assert!(a.skewness().unwrap() <= b.skewness().unwrap()),
        _ => {}
    }
}

fn check_evaluations(a: &Valuation, b: &Valuation) {
    if compare(a, b).unwrap() == Comparison::Lt {
        for p in corpus() {
            assert!(a.evaluate(&p).unwrap() <= b.evaluate(&p).unwrap(), "{a} < {b} at {p}");
        }
    }
    if !a.is_curve() {
        let x = a.evaluate(&Poly2::x()).unwrap();
        let y = a.evaluate(&Poly2::y()).unwrap();
        assert_eq!(x.min(y), ExtRational::from(-1));
    }
}

fn check_distance(a: &Valuation, b: &Valuation) {
    if a.is_curve() || b.is_curve() {
        return;
    }
    let d = distance(a, b).unwrap();
    assert!(d >= ExtRational::zero());
    assert_eq!(d == ExtRational::zero(), eq(a, b));
}

#[test]
fn laws_on_a_fixed_corpus() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..60 {
        let a = sample(&mut rng);
        let b = if rng.gen_bool(0.3) { above(&mut rng, &a, 3).unwrap() } else { sample(&mut rng) };
        let c = sample(&mut rng);
        check_triple(&a, &b, &c);
        check_evaluations(&a, &b);
        check_evaluations(&b, &a);
        check_distance(&a, &b);
    }
}

#[test]
fn deeper_free_nodes_lie_above() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..40 {
        let v = random_divisorial(&mut rng, 4).unwrap();
        let w = above(&mut rng, &v, 4).unwrap();
        assert!(is_le(&v, &w).unwrap());
        check_evaluations(&v, &w);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn meet_and_order_laws(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = sample(&mut rng);
        let b = if rng.gen_bool(0.3) { above(&mut rng, &a, 3).unwrap() } else { sample(&mut rng) };
        let c = sample(&mut rng);
        check_triple(&a, &b, &c);
        check_evaluations(&a, &b);
        check_distance(&a, &b);
    }
}
