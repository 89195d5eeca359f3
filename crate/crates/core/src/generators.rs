//! Seedable random instances for property tests and the `oracle-check`
//! command. Everything here draws from a caller-supplied [`Rng`], so a fixed
//! seed reproduces a run exactly.

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use vinf_exact::{rat, ExtRational, PuiseuxSeries, Rational};

use crate::cluster::{Cluster, NodePath, PointAtInfinity, Step};
use crate::error::Result;
use crate::potential::{DiscreteMeasure, FiniteTree};
use crate::puiseux::PuiseuxBranch;
use crate::valuations::{compare, Comparison, Valuation};

/// A rational `n/d` with `|n| <= num` and `1 <= d <= den`.
pub fn small_rational<R: Rng + ?Sized>(rng: &mut R, num: i64, den: i64) -> Rational {
    rat(rng.gen_range(-num..=num), rng.gen_range(1..=den))
}

pub fn random_base<R: Rng + ?Sized>(rng: &mut R) -> PointAtInfinity {
    if rng.gen_ratio(1, 4) {
        PointAtInfinity::YChart
    } else {
        PointAtInfinity::XChart(rat(rng.gen_range(-2..=2), 1))
    }
}

/// A random path with at most `max_steps` steps after the base point,
/// mixing free and satellite steps.
pub fn random_path<R: Rng + ?Sized>(rng: &mut R, max_steps: usize) -> NodePath {
    let base = random_base(rng);
    let len = rng.gen_range(0..=max_steps);
    let mut steps = Vec::with_capacity(len);
    let mut on_two = false;
    for _ in 0..len {
        let step = match rng.gen_range(0..4) {
            0 => Step::SatPrev,
            1 if on_two => Step::SatOther,
            _ => {
                let c = rat(rng.gen_range(-2..=2), 1);
                if on_two && c.is_zero() {
                    Step::Free(Rational::one())
                } else {
                    Step::Free(c)
                }
            }
        };
        on_two = !matches!(step, Step::Free(_));
        steps.push(step);
    }
    NodePath { base, steps }
}

/// A cluster assembled from up to `paths` random paths of depth at most
/// `max_depth` (counting the base point).
pub fn random_cluster<R: Rng + ?Sized>(rng: &mut R, max_depth: usize, paths: usize) -> Result<Cluster> {
    let count = rng.gen_range(1..=paths.max(1));
    let ps: Vec<NodePath> = (0..count).map(|_| random_path(rng, max_depth.saturating_sub(1))).collect();
    let refs: Vec<&NodePath> = ps.iter().collect();
    Ok(Cluster::from_paths(&refs)?.0)
}

pub fn random_divisorial<R: Rng + ?Sized>(rng: &mut R, max_steps: usize) -> Result<Valuation> {
    Valuation::from_path(&random_path(rng, max_steps))
}

/// A random exact branch with small ramification and coefficients.
pub fn random_curve<R: Rng + ?Sized>(rng: &mut R) -> Result<Valuation> {
    let m = rng.gen_range(1..=3u32);
    random_curve_with(rng, m)
}

/// A random exact branch with ramification `m`.
pub fn random_curve_with<R: Rng + ?Sized>(rng: &mut R, m: u32) -> Result<Valuation> {
    let top = rng.gen_range(1..=6u32);
    let mut coeffs = Vec::new();
    for j in 1..=top {
        if rng.gen_ratio(1, 2) {
            coeffs.push((j, rat(rng.gen_range(-2..=2), 1)));
        }
    }
    let series = PuiseuxSeries::new(m, coeffs, top, true)?;
    Ok(Valuation::curve(PuiseuxBranch::new(random_base(rng), series)))
}

/// Pairwise incomparable divisorial valuations, built by rejection.
pub fn random_incomparable_set<R: Rng + ?Sized>(
    rng: &mut R,
    size: usize,
    max_steps: usize,
) -> Result<Vec<Valuation>> {
    let mut out: Vec<Valuation> = Vec::with_capacity(size);
    let mut attempts = 0;
    while out.len() < size && attempts < 50 * size.max(1) {
        attempts += 1;
        let v = random_divisorial(rng, max_steps)?;
        let mut ok = true;
        for w in &out {
            if compare(&v, w)? != Comparison::Incomparable {
                ok = false;
                break;
            }
        }
        if ok {
            out.push(v);
        }
    }
    Ok(out)
}

/// Random divisorial and curve valuations, with some elements repeated or
/// lying above others.
pub fn random_mixed_set<R: Rng + ?Sized>(rng: &mut R, size: usize, max_steps: usize) -> Result<Vec<Valuation>> {
    let mut out: Vec<Valuation> = Vec::with_capacity(size);
    for _ in 0..size {
        let v = match rng.gen_range(0..5) {
            0 => random_curve(rng)?,
            1 if !out.is_empty() => {
                let w = out.choose(rng).unwrap().clone();
                if w.is_curve() {
                    let a = rat(-rng.gen_range(0..20), rng.gen_range(1..=3));
                    crate::valuations::point_on_segment(&w, &a)?
                } else {
                    above(rng, &w, 3)?
                }
            }
            2 if !out.is_empty() => out.choose(rng).unwrap().clone(),
            _ => random_divisorial(rng, max_steps)?,
        };
        out.push(v);
    }
    Ok(out)
}

/// For divisorial or monomial `v` and `max_steps > 0`, a valuation strictly
/// above `v`: a node over a free point of its divisor. Otherwise `v` itself.
pub fn above<R: Rng + ?Sized>(rng: &mut R, v: &Valuation, max_steps: usize) -> Result<Valuation> {
    if v.is_curve() {
        return Ok(v.clone());
    }
    let Some(mut path) = v.node_path()? else {
        return Ok(v.clone());
    };
    if max_steps == 0 {
        return Ok(v.clone());
    }
    let mut extra = random_path(rng, max_steps);
    if extra.steps.is_empty() {
        extra.steps.push(Step::Free(Rational::one()));
    }
    let mut on_two = matches!(path.steps.last(), Some(Step::SatPrev | Step::SatOther));
    for (i, s) in extra.steps.into_iter().enumerate() {
        let s = match s {
            Step::Free(c) if on_two && c.is_zero() => Step::Free(Rational::one()),
            _ if i == 0 => Step::Free(rat(rng.gen_range(1..=2), 1)),
            Step::SatOther if !on_two => Step::SatPrev,
            s => s,
        };
        on_two = !matches!(s, Step::Free(_));
        path.steps.push(s);
    }
    Valuation::from_path(&path)
}

/// A random finite tree with at most `max_vertices` vertices and skewness
/// in `[-10, 1]`, decreasing away from the root.
pub fn random_finite_tree<R: Rng + ?Sized>(rng: &mut R, max_vertices: usize) -> Result<FiniteTree> {
    let mut tree = FiniteTree::new();
    let n = rng.gen_range(1..=max_vertices.max(1));
    let lowest = rat(-10, 1);
    while tree.len() < n {
        let candidates: Vec<usize> =
            (0..tree.len()).filter(|&v| tree.alpha_of(v).as_finite().is_some_and(|a| *a > lowest)).collect();
        let parent = *candidates.choose(rng).expect("the root always qualifies");
        let pa = tree.alpha_of(parent).as_finite().unwrap().clone();
        let den = rng.gen_range(1..=6);
        let u = rat(rng.gen_range(0..den), den);
        let alpha = &lowest + (&pa - &lowest) * u;
        tree.add_vertex(parent, ExtRational::Finite(alpha))?;
    }
    Ok(tree)
}

/// A random measure on the vertices of `tree`; positive masses if
/// `positive`, otherwise signed.
pub fn random_tree_measure<R: Rng + ?Sized>(rng: &mut R, tree: &FiniteTree, positive: bool) -> DiscreteMeasure<usize> {
    let mut rho = DiscreteMeasure::new();
    let atoms = rng.gen_range(1..=tree.len().min(4));
    for _ in 0..atoms {
        let v = rng.gen_range(0..tree.len());
        let m = if positive {
            rat(rng.gen_range(1..=5), rng.gen_range(1..=4))
        } else {
            let m = small_rational(rng, 5, 4);
            if m.is_zero() {
                Rational::one()
            } else {
                m
            }
        };
        rho.add(v, m);
    }
    rho
}

/// `k` chains of `k` free blowups at distinct points of the line at
/// infinity; their matrix is singular with a positive kernel.
pub fn chi_zero_instance(k: usize) -> Result<Vec<Valuation>> {
    (0..k)
        .map(|i| {
            Valuation::from_path(&NodePath {
                base: PointAtInfinity::XChart(rat(i as i64, 1)),
                steps: vec![Step::Free(Rational::zero()); k.saturating_sub(1)],
            })
        })
        .collect()
}

/// An input for certificate extension: a set `S` with positive `χ`, the
/// measure solving its bordered system (vanishing above `S`, positive
/// energy), and extra valuations low enough for the extension to apply.
pub struct CertificateInstance {
    pub s: Vec<Valuation>,
    pub phi: DiscreteMeasure<Valuation>,
    pub extra: Vec<Valuation>,
}

pub fn certificate_instance<R: Rng + ?Sized>(rng: &mut R) -> Result<CertificateInstance> {
    let ctx = crate::potential::ValuationTree;
    loop {
        let size = rng.gen_range(1..=3);
        let s = random_incomparable_set(rng, size, 4)?;
        if crate::richness::chi_of(&s)?.signum() <= 0 {
            continue;
        }
        let (_, phi) = crate::richness::star_system(&s)?;
        let r = crate::potential::dirichlet(&ctx, &phi, &phi)?;
        let Some(r) = r.as_finite().cloned() else { continue };
        let mut m0 = Rational::one();
        for v in &s {
            if let Some(a) = v.skewness()?.as_finite() {
                m0 = m0.min(a.clone());
            }
        }
        let wanted = rng.gen_range(1..=3);
        let floor = crate::potential::extension_thresholds(&m0, &r, wanted).pop().unwrap();
        let mut extra = Vec::with_capacity(wanted);
        let mut attempts = 0;
        while extra.len() < wanted && attempts < 40 {
            attempts += 1;
            let v = match rng.gen_range(0..4) {
                // Segments of ramified branches get expensive to descend far.
                0 if floor < rat(-4, 1) => random_curve_with(rng, 1)?,
                0 => random_curve(rng)?,
                1 => {
                    let base = s.choose(rng).unwrap().clone();
                    above(rng, &base, 3)?
                }
                _ => random_divisorial(rng, 8)?,
            };
            let low = match v.skewness()? {
                ExtRational::Finite(a) => a <= floor,
                _ => true,
            };
            let in_b = {
                let mut hit = false;
                for w in &s {
                    hit |= crate::valuations::is_le(w, &v)?;
                }
                hit
            };
            if low || in_b {
                extra.push(v);
            }
        }
        return Ok(CertificateInstance { s, phi, extra });
    }
}
