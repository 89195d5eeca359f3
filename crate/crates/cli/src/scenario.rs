//! Scenario files.
//!
//! A scenario is a JSON document with `"format": 1`. Every rational is a
//! string `"p/q"` or `"p"`; there are no JSON numbers except for the format
//! version, ramification indices, exponents and truncation orders.
//!
//! ```json
//! {
//!   "format": 1,
//!   "valuations": {
//!     "root": { "kind": "root" },
//!     "w":    { "kind": "monomial", "s": "-1", "t": "1/2" },
//!     "e":    { "kind": "divisorial", "base": { "chart": "x", "c": "0" },
//!               "steps": ["free(1)", "sat(prev)", "sat(other)"] },
//!     "cusp": { "kind": "curve", "base": { "chart": "y" }, "m": 3,
//!               "coeffs": [[1, "1"]], "truncation": 1, "exact": true }
//!   },
//!   "polynomials": { "P": "y^2 - x^3" },
//!   "measures": { "mu": [["e", "1"], ["w", "-1/2"]] },
//!   "options": { "max_degree": 6, "precision_cap": 64 },
//!   "algebraize": {
//!     "branches": [ { "valuation": "cusp", "radii": [ { "place": "inf", "radius": "1" } ] } ],
//!     "bounds": [ { "place": "inf", "bound": "3" } ],
//!     "points": [["4", "8"], ["9", "27"]],
//!     "max_degree": 3
//!   }
//! }
//! ```
//!
//! A divisorial base `{"chart": "x", "c": c}` is the point `[1 : -c : 0]`
//! with local coordinates `u = 1/x`, `v = y/x + c`; `{"chart": "y"}` is
//! `[0 : 1 : 0]` with `u = 1/y`, `v = x/y`. Steps are `free(c)`, `sat(prev)`
//! and `sat(other)`. A curve is the branch `v = sum a_j u^{j/m}` at its
//! base, known up to exponent `truncation`, or exactly when `exact` is set.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use vinf_core::cluster::{NodePath, PointAtInfinity, Step};
use vinf_core::potential::DiscreteMeasure;
use vinf_core::puiseux::PuiseuxBranch;
use vinf_core::valuations::Valuation;
use vinf_exact::{parse_rational, rat_str, Poly2, PuiseuxSeries, Rational};

use crate::error::{CliError, Result};
use crate::places::Place;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub format: u32,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub valuations: BTreeMap<String, ValuationSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub polynomials: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub measures: BTreeMap<String, Vec<(String, String)>>,
    #[serde(default)]
    pub options: Options,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebraize: Option<AlgebraizeSpec>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_degree: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision_cap: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ValuationSpec {
    Root,
    Monomial { s: String, t: String },
    Divisorial { base: BaseSpec, steps: Vec<String> },
    Curve {
        base: BaseSpec,
        m: u32,
        coeffs: Vec<(u32, String)>,
        truncation: u32,
        #[serde(default)]
        exact: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "chart")]
pub enum BaseSpec {
    #[serde(rename = "x")]
    X { c: String },
    #[serde(rename = "y")]
    Y,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraizeSpec {
    pub branches: Vec<BranchSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bounds: Vec<BoundSpec>,
    pub points: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_degree: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchSpec {
    /// Name of a curve valuation.
    pub valuation: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub radii: Vec<RadiusSpec>,
}

/// Convergence radius of a branch at a place; unlisted places use 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadiusSpec {
    /// `"inf"` or a prime.
    pub place: String,
    pub radius: String,
}

/// Bound on `|x|_v` and `|y|_v`; unlisted places use 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundSpec {
    pub place: String,
    pub bound: String,
}

/// A parsed scenario with every object built.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub file: ScenarioFile,
    pub valuations: BTreeMap<String, Valuation>,
    pub polynomials: BTreeMap<String, Poly2>,
    pub measures: BTreeMap<String, DiscreteMeasure<Valuation>>,
}

/// 1-based line and column of byte offset `pos` in `text`.
fn line_col(text: &str, pos: usize) -> (usize, usize) {
    let before = &text[..pos.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Error located at the first occurrence of the JSON string `needle`.
fn located(raw: &str, needle: &str, message: String) -> CliError {
    let quoted = serde_json::to_string(needle).unwrap_or_default();
    let (line, column) = raw.find(&quoted).map_or((1, 1), |p| line_col(raw, p));
    CliError::Parse { line, column, message }
}

fn parse_q(raw: &str, s: &str, what: &str) -> Result<Rational> {
    parse_rational(s).map_err(|e| located(raw, s, format!("{what}: {e}")))
}

pub fn parse_step(s: &str) -> Option<Step> {
    let t = s.trim();
    match t {
        "sat(prev)" => return Some(Step::SatPrev),
        "sat(other)" => return Some(Step::SatOther),
        _ => {}
    }
    let inner = t.strip_prefix("free(")?.strip_suffix(')')?;
    parse_rational(inner).ok().map(Step::Free)
}

pub fn render_step(s: &Step) -> String {
    match s {
        Step::Free(c) => format!("free({})", rat_str(c)),
        Step::SatPrev => "sat(prev)".into(),
        Step::SatOther => "sat(other)".into(),
    }
}

fn parse_place(raw: &str, s: &str) -> Result<Place> {
    Place::parse(s).map_err(|e| located(raw, s, e.to_string()))
}

fn base_point(raw: &str, b: &BaseSpec) -> Result<PointAtInfinity> {
    Ok(match b {
        BaseSpec::X { c } => PointAtInfinity::XChart(parse_q(raw, c, "base point")?),
        BaseSpec::Y => PointAtInfinity::YChart,
    })
}

pub fn base_spec(p: &PointAtInfinity) -> BaseSpec {
    match p {
        PointAtInfinity::XChart(c) => BaseSpec::X { c: rat_str(c) },
        PointAtInfinity::YChart => BaseSpec::Y,
    }
}

fn build_valuation(raw: &str, name: &str, spec: &ValuationSpec) -> Result<Valuation> {
    let ctx = |e: vinf_core::CoreError| located(raw, name, format!("valuation {name:?}: {e}"));
    match spec {
        ValuationSpec::Root => Ok(Valuation::Root),
        ValuationSpec::Monomial { s, t } => {
            let s = parse_q(raw, s, "monomial weight")?;
            let t = parse_q(raw, t, "monomial weight")?;
            Valuation::monomial(s, t).map_err(ctx)
        }
        ValuationSpec::Divisorial { base, steps } => {
            let base = base_point(raw, base)?;
            let steps = steps
                .iter()
                .map(|s| parse_step(s).ok_or_else(|| located(raw, s, format!("not a step: {s:?}"))))
                .collect::<Result<Vec<_>>>()?;
            Valuation::from_path(&NodePath { base, steps }).map_err(ctx)
        }
        ValuationSpec::Curve { base, m, coeffs, truncation, exact } => {
            let base = base_point(raw, base)?;
            let cs = coeffs
                .iter()
                .map(|(j, a)| Ok((*j, parse_q(raw, a, "series coefficient")?)))
                .collect::<Result<Vec<_>>>()?;
            let series = PuiseuxSeries::new(*m, cs, *truncation, *exact)
                .map_err(|e| located(raw, name, format!("valuation {name:?}: {e}")))?;
            Ok(Valuation::curve(PuiseuxBranch::new(base, series)))
        }
    }
}

impl Scenario {
    pub fn parse(raw: &str) -> Result<Scenario> {
        let file: ScenarioFile = serde_json::from_str(raw).map_err(|e| CliError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        if file.format != FORMAT_VERSION {
            return Err(located(raw, "format", format!("unsupported format {}", file.format)));
        }
        let mut valuations = BTreeMap::new();
        for (name, spec) in &file.valuations {
            valuations.insert(name.clone(), build_valuation(raw, name, spec)?);
        }
        let mut polynomials = BTreeMap::new();
        for (name, text) in &file.polynomials {
            let p = Poly2::parse(text).map_err(|e| located(raw, text, format!("polynomial {name:?}: {e}")))?;
            polynomials.insert(name.clone(), p);
        }
        let mut measures = BTreeMap::new();
        for (name, atoms) in &file.measures {
            let mut mu = DiscreteMeasure::new();
            for (v, mass) in atoms {
                let val = valuations
                    .get(v)
                    .ok_or_else(|| located(raw, v, format!("measure {name:?} uses unknown valuation {v:?}")))?;
                mu.add_valuation(val.clone(), parse_q(raw, mass, "mass")?)
                    .map_err(|e| located(raw, name, format!("measure {name:?}: {e}")))?;
            }
            measures.insert(name.clone(), mu);
        }
        if let Some(alg) = &file.algebraize {
            for b in &alg.branches {
                match valuations.get(&b.valuation) {
                    Some(Valuation::Curve(_)) => {}
                    Some(_) => {
                        return Err(located(raw, &b.valuation, format!("{:?} is not a curve valuation", b.valuation)))
                    }
                    None => {
                        return Err(located(raw, &b.valuation, format!("unknown valuation {:?}", b.valuation)))
                    }
                }
                for r in &b.radii {
                    parse_place(raw, &r.place)?;
                    parse_q(raw, &r.radius, "radius")?;
                }
            }
            for b in &alg.bounds {
                parse_place(raw, &b.place)?;
                parse_q(raw, &b.bound, "bound")?;
            }
            for (x, y) in &alg.points {
                parse_q(raw, x, "point coordinate")?;
                parse_q(raw, y, "point coordinate")?;
            }
        }
        Ok(Scenario { file, valuations, polynomials, measures })
    }

    pub fn load(path: &str) -> Result<Scenario> {
        let raw = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
        Scenario::parse(&raw)
    }

    pub fn valuation(&self, name: &str) -> Result<&Valuation> {
        self.valuations.get(name).ok_or_else(|| CliError::Unknown { kind: "valuation", name: name.into() })
    }

    /// The named valuations, or all of them in name order when `names` is
    /// empty.
    pub fn valuation_set(&self, names: &[String]) -> Result<Vec<(String, Valuation)>> {
        if names.is_empty() {
            return Ok(self.valuations.iter().map(|(n, v)| (n.clone(), v.clone())).collect());
        }
        names.iter().map(|n| Ok((n.clone(), self.valuation(n)?.clone()))).collect()
    }

    /// A named polynomial, or the argument itself parsed as a polynomial.
    pub fn polynomial(&self, arg: &str) -> Result<Poly2> {
        if let Some(p) = self.polynomials.get(arg) {
            return Ok(p.clone());
        }
        Poly2::parse(arg).map_err(|e| CliError::Input(format!("{arg:?} is neither a named polynomial nor parseable: {e}")))
    }

    pub fn measure(&self, name: &str) -> Result<&DiscreteMeasure<Valuation>> {
        self.measures.get(name).ok_or_else(|| CliError::Unknown { kind: "measure", name: name.into() })
    }
}

fn canonical_q(s: &str) -> Result<String> {
    Ok(rat_str(&parse_rational(s)?))
}

/// Rewrites every rational, step and polynomial in canonical spelling and
/// drops zero series coefficients.
pub fn canonicalize(file: &ScenarioFile) -> Result<ScenarioFile> {
    let mut out = file.clone();
    for spec in out.valuations.values_mut() {
        match spec {
            ValuationSpec::Root => {}
            ValuationSpec::Monomial { s, t } => {
                *s = canonical_q(s)?;
                *t = canonical_q(t)?;
            }
            ValuationSpec::Divisorial { base, steps } => {
                canonical_base(base)?;
                for st in steps.iter_mut() {
                    let parsed = parse_step(st).ok_or_else(|| CliError::Input(format!("not a step: {st:?}")))?;
                    *st = render_step(&parsed);
                }
            }
            ValuationSpec::Curve { base, coeffs, .. } => {
                canonical_base(base)?;
                let mut map = BTreeMap::new();
                for (j, a) in coeffs.iter() {
                    let q = parse_rational(a)?;
                    if q != Rational::from_integer(0.into()) {
                        map.insert(*j, rat_str(&q));
                    }
                }
                *coeffs = map.into_iter().collect();
            }
        }
    }
    for text in out.polynomials.values_mut() {
        *text = Poly2::parse(text)?.to_string();
    }
    for atoms in out.measures.values_mut() {
        for (_, m) in atoms.iter_mut() {
            *m = canonical_q(m)?;
        }
    }
    if let Some(alg) = &mut out.algebraize {
        for b in &mut alg.branches {
            for r in &mut b.radii {
                r.place = Place::parse(&r.place)?.to_string();
                r.radius = canonical_q(&r.radius)?;
            }
        }
        for b in &mut alg.bounds {
            b.place = Place::parse(&b.place)?.to_string();
            b.bound = canonical_q(&b.bound)?;
        }
        for (x, y) in &mut alg.points {
            *x = canonical_q(x)?;
            *y = canonical_q(y)?;
        }
    }
    Ok(out)
}

fn canonical_base(b: &mut BaseSpec) -> Result<()> {
    if let BaseSpec::X { c } = b {
        *c = canonical_q(c)?;
    }
    Ok(())
}

/// Pretty JSON of the canonical form.
pub fn to_canonical_json(file: &ScenarioFile) -> Result<String> {
    let canon = canonicalize(file)?;
    serde_json::to_string_pretty(&canon).map_err(|e| CliError::Internal(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{
  "format": 1,
  "valuations": {
    "w": { "kind": "monomial", "s": "-2/2", "t": "1/2" },
    "e": { "kind": "divisorial", "base": { "chart": "x", "c": "0" }, "steps": ["free(2/4)", "sat(prev)"] },
    "cusp": { "kind": "curve", "base": { "chart": "y" }, "m": 3, "coeffs": [[2, "0"], [1, "1"]], "truncation": 1, "exact": true }
  },
  "polynomials": { "P": "y^2-x^3" }
}"#;

    #[test]
    fn sample_builds() {
        let sc = Scenario::parse(SAMPLE).unwrap();
        assert_eq!(sc.valuations.len(), 3);
        assert!(sc.valuation("cusp").unwrap().is_curve());
        assert_eq!(sc.polynomial("P").unwrap(), Poly2::parse("y^2 - x^3").unwrap());
        assert_eq!(sc.polynomial("x + 1").unwrap(), Poly2::parse("1 + x").unwrap());
    }

    #[test]
    fn canonical_form_is_a_fixed_point() {
        let sc = Scenario::parse(SAMPLE).unwrap();
        let once = to_canonical_json(&sc.file).unwrap();
        assert!(once.contains("\"free(1/2)\""));
        assert!(once.contains("\"-1\""));
        let again = Scenario::parse(&once).unwrap();
        assert_eq!(to_canonical_json(&again.file).unwrap(), once);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = Scenario::parse("{\n  \"format\": 1,\n  oops\n}").unwrap_err();
        match err {
            CliError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn semantic_errors_point_at_the_value() {
        let raw = "{\n \"format\": 1,\n \"polynomials\": {\n  \"Q\": \"x^^2\"\n }\n}";
        match Scenario::parse(raw).unwrap_err() {
            CliError::Parse { line, column, .. } => assert_eq!((line, column), (4, 8)),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn steps_round_trip() {
        for s in ["free(0)", "free(-3/2)", "sat(prev)", "sat(other)"] {
            assert_eq!(render_step(&parse_step(s).unwrap()), s);
        }
        assert!(parse_step("free(x)").is_none());
        assert!(parse_step("sat(left)").is_none());
    }
}
