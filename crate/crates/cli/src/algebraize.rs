//! From branches at infinity and rational points to an algebraic curve.
//!
//! Given branches with data at finitely many places and a list of rational
//! points, the pipeline finds `P` positive on every branch valuation, keeps
//! the points that pass the hypothesis check, collects the values
//! `T = {P(p)}` and reports the curve `prod_{t in T} (P - t) = 0`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use vinf_core::puiseux::{branches_at_infinity, PuiseuxBranch};
use vinf_core::valuations::Valuation;
use vinf_core::polyfinder::find_positive;
use vinf_exact::{rat_str, Poly2, Rational};

use crate::error::{CliError, Result};
use crate::places::{abs_value, branch_membership, denominator_primes, Membership, Place};

#[derive(Clone, Debug)]
pub struct AdelicBranch {
    pub name: String,
    pub branch: PuiseuxBranch,
    /// Convergence radius at the listed places; 1 elsewhere.
    pub radii: BTreeMap<Place, Rational>,
}

#[derive(Clone, Debug)]
pub struct AlgebraizeInput {
    pub branches: Vec<AdelicBranch>,
    /// Bound `B_v` at the listed places; 1 elsewhere.
    pub bounds: BTreeMap<Place, Rational>,
    pub points: Vec<(Rational, Rational)>,
    pub max_degree: u32,
    /// Expansion order for the branches of the candidate curve.
    pub order: Option<u32>,
}

#[derive(Clone, Debug)]
pub struct PlaceCheck {
    pub place: Place,
    pub abs_x: Rational,
    pub abs_y: Rational,
    pub bound: Rational,
    pub within_bound: bool,
    pub memberships: Vec<(String, Membership)>,
}

impl PlaceCheck {
    pub fn passes(&self) -> bool {
        self.within_bound || self.memberships.iter().any(|(_, m)| m.is_member())
    }
}

#[derive(Clone, Debug)]
pub struct PointReport {
    pub point: (Rational, Rational),
    pub checks: Vec<PlaceCheck>,
    pub accepted: bool,
    /// `P(p)` for accepted points.
    pub value: Option<Rational>,
}

#[derive(Clone, Debug)]
pub struct BranchMatch {
    pub branch: PuiseuxBranch,
    /// Name of the matching input branch and the order of agreement.
    pub matched: Option<(String, String)>,
}

#[derive(Clone, Debug)]
pub struct AlgebraizeReport {
    pub witness: Poly2,
    pub values: Vec<Rational>,
    pub curve: Poly2,
    pub points: Vec<PointReport>,
    pub branch_matches: Vec<BranchMatch>,
    pub notes: Vec<String>,
}

impl AlgebraizeReport {
    pub fn all_branches_match(&self) -> bool {
        !self.branch_matches.is_empty() && self.branch_matches.iter().all(|b| b.matched.is_some())
    }
}

/// Scales `p` to coprime integer coefficients with the first term, in the
/// rendering order, positive.
pub fn normalize(p: &Poly2) -> Poly2 {
    let mut keys: Vec<(u32, u32)> = p.terms().map(|(&k, _)| k).collect();
    if keys.is_empty() {
        return p.clone();
    }
    keys.sort_by_key(|&(i, j)| (i + j, std::cmp::Reverse(i)));
    let mut den = BigInt::one();
    let mut num = BigInt::zero();
    for (_, c) in p.terms() {
        den = den.lcm(c.denom());
    }
    for (_, c) in p.terms() {
        let n = (c * Rational::from_integer(den.clone())).to_integer();
        num = num.gcd(&n);
    }
    let mut scale = Rational::new(den, num);
    if p.coeff(keys[0].0, keys[0].1).is_negative() {
        scale = -scale;
    }
    p.scale(&scale)
}

fn conjugate_coeffs(s: &vinf_exact::PuiseuxSeries, sign: bool) -> BTreeMap<u32, Rational> {
    s.coeffs()
        .iter()
        .map(|(&j, a)| (j, if sign && j % 2 == 1 { -a.clone() } else { a.clone() }))
        .collect()
}

/// Agreement of two branches: `Some("exact")`, `Some("to order K")` or
/// `None`.
fn branches_agree(a: &PuiseuxBranch, b: &PuiseuxBranch) -> Option<String> {
    if a.base != b.base {
        return None;
    }
    let (sa, sb) = (a.series.reduced(), b.series.reduced());
    if sa.m() != sb.m() {
        return None;
    }
    let k = match (sa.is_exact(), sb.is_exact()) {
        (true, true) => None,
        (true, false) => Some(sb.truncation()),
        (false, true) => Some(sa.truncation()),
        (false, false) => Some(sa.truncation().min(sb.truncation())),
    };
    let cut = |m: BTreeMap<u32, Rational>| -> BTreeMap<u32, Rational> {
        m.into_iter().filter(|(j, _)| k.map_or(true, |k| *j <= k)).collect()
    };
    let target = cut(conjugate_coeffs(&sb, false));
    let signs: &[bool] = if sa.m() % 2 == 0 { &[false, true] } else { &[false] };
    signs
        .iter()
        .any(|&s| cut(conjugate_coeffs(&sa, s)) == target)
        .then(|| k.map_or("exact".to_string(), |k| format!("to order {k}")))
}

/// Places where the hypothesis has content for `(x, y)`: the declared ones,
/// infinity, and the primes in the denominators. Everywhere else both
/// coordinates are integral and the bound 1 holds.
fn places_for(input: &AlgebraizeInput, x: &Rational, y: &Rational) -> BTreeSet<Place> {
    let mut out: BTreeSet<Place> = input.bounds.keys().copied().collect();
    for b in &input.branches {
        out.extend(b.radii.keys().copied());
    }
    out.insert(Place::Infinity);
    out.extend(denominator_primes(&[x, y]).into_iter().map(Place::Prime));
    out
}

fn check_point(input: &AlgebraizeInput, x: &Rational, y: &Rational) -> Vec<PlaceCheck> {
    let one = Rational::one();
    places_for(input, x, y)
        .into_iter()
        .map(|place| {
            let bound = input.bounds.get(&place).cloned().unwrap_or_else(|| one.clone());
            let abs_x = abs_value(x, place);
            let abs_y = abs_value(y, place);
            let within_bound = abs_x <= bound && abs_y <= bound;
            let memberships = input
                .branches
                .iter()
                .map(|b| {
                    let r = b.radii.get(&place).unwrap_or(&one);
                    (b.name.clone(), branch_membership((x, y), &b.branch, place, r))
                })
                .collect();
            PlaceCheck { place, abs_x, abs_y, bound, within_bound, memberships }
        })
        .collect()
}

pub fn algebraize(input: &AlgebraizeInput) -> Result<AlgebraizeReport> {
    if input.branches.is_empty() {
        return Err(CliError::Input("algebraize needs at least one branch".into()));
    }
    if input.points.is_empty() {
        return Err(CliError::Input("algebraize needs at least one point".into()));
    }
    let vals: Vec<Valuation> = input.branches.iter().map(|b| Valuation::curve(b.branch.clone())).collect();
    let witness = find_positive(&vals, input.max_degree)?.ok_or(CliError::WitnessNotFound(input.max_degree))?;
    let witness = normalize(&witness);

    let mut notes = Vec::new();
    let mut points = Vec::new();
    let mut values = BTreeSet::new();
    for (x, y) in &input.points {
        let checks = check_point(input, x, y);
        let accepted = checks.iter().all(PlaceCheck::passes);
        for c in &checks {
            for (name, m) in &c.memberships {
                if let Membership::Undecidable(why) = m {
                    if !c.within_bound {
                        notes.push(format!(
                            "({}, {}) at {}: membership in {name} undecidable ({why}); counted as outside",
                            rat_str(x),
                            rat_str(y),
                            c.place
                        ));
                    }
                }
            }
        }
        let value = accepted.then(|| witness.eval(x, y));
        if let Some(v) = &value {
            values.insert(v.clone());
        }
        points.push(PointReport { point: (x.clone(), y.clone()), checks, accepted, value });
    }
    let values: Vec<Rational> = values.into_iter().collect();
    let mut curve = Poly2::one();
    for t in &values {
        curve = &curve * &(&witness - &Poly2::constant(t.clone()));
    }
    if values.is_empty() {
        notes.push("no point passed the hypothesis check; T is empty and the curve is the empty product 1".into());
    }
    for p in points.iter().filter(|p| p.accepted) {
        if !curve.eval(&p.point.0, &p.point.1).is_zero() {
            return Err(CliError::Internal(format!(
                "accepted point ({}, {}) is not on the curve",
                rat_str(&p.point.0),
                rat_str(&p.point.1)
            )));
        }
    }

    let mut branch_matches = Vec::new();
    if !curve.is_constant() {
        for b in branches_at_infinity(&curve, input.order)? {
            let matched = input
                .branches
                .iter()
                .find_map(|inp| branches_agree(&b, &inp.branch).map(|how| (inp.name.clone(), how)));
            branch_matches.push(BranchMatch { branch: b, matched });
        }
    }
    Ok(AlgebraizeReport { witness, values, curve, points, branch_matches, notes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use vinf_core::cluster::PointAtInfinity;
    use vinf_exact::{rat, PuiseuxSeries};

    fn cusp_input(points: Vec<(Rational, Rational)>) -> AlgebraizeInput {
        let branch = PuiseuxBranch::new(PointAtInfinity::YChart, PuiseuxSeries::new(3, [(1, rat(1, 1))], 1, true).unwrap());
        AlgebraizeInput {
            branches: vec![AdelicBranch { name: "cusp".into(), branch, radii: BTreeMap::new() }],
            bounds: BTreeMap::new(),
            points,
            max_degree: 3,
            order: None,
        }
    }

    fn cusp_points(range: std::ops::RangeInclusive<i64>) -> Vec<(Rational, Rational)> {
        range.map(|n| (rat(n * n, 1), rat(n * n * n, 1))).collect()
    }

    #[test]
    fn normalization() {
        let p = Poly2::parse("-2/3*y^2 + 2/3*x^3").unwrap();
        assert_eq!(normalize(&p), Poly2::parse("y^2 - x^3").unwrap());
    }

    #[test]
    fn single_level_set() {
        let rep = algebraize(&cusp_input(cusp_points(2..=6))).unwrap();
        assert_eq!(rep.witness, Poly2::parse("y^2 - x^3").unwrap());
        assert_eq!(rep.values, vec![rat(0, 1)]);
        assert!(rep.all_branches_match());
    }

    #[test]
    fn two_level_sets() {
        // (2, 3) is on y^2 = x^3 + 1 and passes at infinity through the bound.
        let mut pts = cusp_points(2..=3);
        pts.push((rat(2, 1), rat(3, 1)));
        let mut input = cusp_input(pts);
        input.bounds.insert(Place::Infinity, rat(3, 1));
        let rep = algebraize(&input).unwrap();
        assert_eq!(rep.values, vec![rat(0, 1), rat(1, 1)]);
        let expected = &Poly2::parse("y^2 - x^3").unwrap() * &Poly2::parse("y^2 - x^3 - 1").unwrap();
        assert_eq!(rep.curve, expected);
    }

    #[test]
    fn no_qualifying_points() {
        // (1/2, 5) fails the bound at 2 and is on no branch there.
        let rep = algebraize(&cusp_input(vec![(rat(1, 2), rat(5, 1))])).unwrap();
        assert!(rep.values.is_empty());
        assert_eq!(rep.curve, Poly2::one());
        assert!(rep.notes.iter().any(|n| n.contains("empty product")));
    }
}
