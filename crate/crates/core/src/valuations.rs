//! Points of the valuative tree at infinity and their tree structure.
//!
//! Order relations are decided structurally: both valuations are embedded
//! into one cluster, and the dual graph of its boundary divisor is read as
//! a rooted tree with the line at infinity as root.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use vinf_exact::{ExtRational, Poly2, Rational, Series1};

use crate::cluster::{
    branch_steps_available, monomial_to_node, node_data, Boundary, Center, Cluster, NodePath,
    PointAtInfinity, Step, DEFAULT_DEGREE_CAP,
};
use crate::error::{CoreError, Result};
use crate::puiseux::PuiseuxBranch;

#[derive(Clone, Debug)]
pub enum Valuation {
    /// `P -> -deg P`.
    Root,
    /// Monomial valuation with `min(s, t) = -1`.
    Monomial { s: Rational, t: Rational },
    Divisorial { cluster: Arc<Cluster>, node: usize },
    Curve(Arc<PuiseuxBranch>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Comparison {
    Lt,
    Gt,
    Eq,
    Incomparable,
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Comparison::Lt => "LT",
            Comparison::Gt => "GT",
            Comparison::Eq => "EQ",
            Comparison::Incomparable => "INCOMPARABLE",
        })
    }
}

/// Canonical identity of a point of the tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ValKey {
    Root,
    Node(NodePath),
    Curve(PointAtInfinity, u32, Vec<(u32, Rational)>),
}

impl Valuation {
    /// Scales `(s, t)` so that the smaller weight is `-1`.
    pub fn monomial(s: Rational, t: Rational) -> Result<Valuation> {
        let m = if s < t { s.clone() } else { t.clone() };
        if m >= Rational::zero() {
            return Err(CoreError::InvalidValuation(format!(
                "monomial weights ({s}, {t}) are not centered at infinity"
            )));
        }
        let scale = -m.recip();
        let (s, t) = (&s * &scale, &t * &scale);
        if s == t {
            return Ok(Valuation::Root);
        }
        Ok(Valuation::Monomial { s, t })
    }

    pub fn divisorial(cluster: Cluster, node: usize) -> Result<Valuation> {
        if node >= cluster.len() {
            return Err(CoreError::InvalidCluster(format!(
                "node {node} out of range for a cluster with {} nodes",
                cluster.len()
            )));
        }
        Ok(Valuation::Divisorial { cluster: Arc::new(cluster), node })
    }

    pub fn from_path(path: &NodePath) -> Result<Valuation> {
        let (cl, nodes) = Cluster::from_paths(&[path])?;
        Valuation::divisorial(cl, nodes[0])
    }

    pub fn curve(branch: PuiseuxBranch) -> Valuation {
        Valuation::Curve(Arc::new(branch))
    }

    pub fn is_root(&self) -> bool {
        matches!(self, Valuation::Root)
    }

    pub fn is_curve(&self) -> bool {
        matches!(self, Valuation::Curve(_))
    }

    /// Path of the divisor realizing a monomial or divisorial valuation.
    pub fn node_path(&self) -> Result<Option<NodePath>> {
        Ok(match self {
            Valuation::Monomial { s, t } => {
                let (cl, k) = monomial_to_node(s, t)?;
                Some(cl.path(k))
            }
            Valuation::Divisorial { cluster, node } => Some(cluster.path(*node)),
            _ => None,
        })
    }

    pub fn key(&self) -> Result<ValKey> {
        Ok(match self {
            Valuation::Root => ValKey::Root,
            Valuation::Curve(b) => curve_key(b),
            _ => ValKey::Node(self.node_path()?.unwrap()),
        })
    }

    pub fn evaluate(&self, p: &Poly2) -> Result<ExtRational> {
        self.evaluate_with_cap(p, DEFAULT_DEGREE_CAP)
    }

    pub fn evaluate_with_cap(&self, p: &Poly2, cap: u32) -> Result<ExtRational> {
        let d = p.degree().ok_or(CoreError::ZeroPolynomial)?;
        match self {
            Valuation::Root => Ok(ExtRational::from(-(d as i64))),
            Valuation::Monomial { s, t } => {
                let v = p
                    .terms()
                    .map(|(&(i, j), _)| {
                        s * Rational::from_integer(i.into()) + t * Rational::from_integer(j.into())
                    })
                    .min()
                    .unwrap();
                Ok(v.into())
            }
            Valuation::Divisorial { cluster, node } => {
                Ok(cluster.eval_divisorial(*node, p, cap)?.into())
            }
            Valuation::Curve(b) => eval_curve(b, p),
        }
    }

    pub fn skewness(&self) -> Result<ExtRational> {
        Ok(match self {
            Valuation::Root => ExtRational::from(1),
            Valuation::Curve(_) => ExtRational::NegInf,
            Valuation::Monomial { s, t } => {
                let (cl, k) = monomial_to_node(s, t)?;
                cl.node_data(k)?.alpha.into()
            }
            Valuation::Divisorial { cluster, node } => cluster.node_data(*node)?.alpha.into(),
        })
    }

    pub fn thinness(&self) -> Result<ExtRational> {
        Ok(match self {
            Valuation::Root => ExtRational::from(-2),
            Valuation::Curve(_) => ExtRational::PosInf,
            Valuation::Monomial { s, t } => {
                let (cl, k) = monomial_to_node(s, t)?;
                cl.node_data(k)?.thinness.into()
            }
            Valuation::Divisorial { cluster, node } => cluster.node_data(*node)?.thinness.into(),
        })
    }

    /// Generic multiplicity `b` of the divisor; 1 for the root.
    pub fn b(&self) -> Result<Option<i64>> {
        Ok(match self {
            Valuation::Root => Some(1),
            Valuation::Curve(_) => None,
            Valuation::Divisorial { cluster, node } => Some(cluster.node_data(*node)?.b),
            Valuation::Monomial { .. } => Some(node_data(&self.node_path()?.unwrap())?.b),
        })
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Root => write!(f, "-deg"),
            Valuation::Monomial { s, t } => {
                write!(f, "v({}, {})", vinf_exact::rat_str(s), vinf_exact::rat_str(t))
            }
            Valuation::Divisorial { cluster, node } => {
                let path = cluster.path(*node);
                write!(f, "E[{}", path.base.projective())?;
                for s in &path.steps {
                    match s {
                        Step::Free(c) => write!(f, " free({})", vinf_exact::rat_str(c))?,
                        Step::SatPrev => write!(f, " sat(prev)")?,
                        Step::SatOther => write!(f, " sat(other)")?,
                    }
                }
                write!(f, "]")
            }
            Valuation::Curve(b) => write!(f, "curve {b}"),
        }
    }
}

fn curve_key(b: &PuiseuxBranch) -> ValKey {
    let s = b.series.reduced();
    let m = s.m();
    let plain: Vec<(u32, Rational)> = s.coeffs().iter().map(|(&j, a)| (j, a.clone())).collect();
    let coeffs = if m % 2 == 0 {
        let conj: Vec<(u32, Rational)> = plain
            .iter()
            .map(|(j, a)| (*j, if j % 2 == 1 { -a.clone() } else { a.clone() }))
            .collect();
        plain.min(conj)
    } else {
        plain
    };
    ValKey::Curve(b.base.clone(), m, coeffs)
}

/// `v(P) = (ord_t Q(t^m, s(t)) - d m) / m` where `P = u^{-d} Q(u, v)`.
fn eval_curve(b: &PuiseuxBranch, p: &Poly2) -> Result<ExtRational> {
    let (q, d) = b.base.local_equation(p)?;
    let series = b.series.reduced();
    let m = series.m();
    let u = Series1::monomial(m, Rational::one());
    let v = series.to_series();
    let val = Series1::eval_poly2(&q, &u, &v);
    if let Some(ord) = val.valuation() {
        let num = ord as i64 - (d as i64) * (m as i64);
        return Ok(Rational::new(num.into(), (m as i64).into()).into());
    }
    match val.prec() {
        None => Ok(ExtRational::PosInf),
        Some(prec) => {
            // A curve F not containing the branch meets it with multiplicity
            // at most deg P * deg F.
            if let Some(f) = &b.equation {
                let fd = f.degree().unwrap_or(0);
                if prec as u64 > d as u64 * fd as u64 {
                    return Ok(ExtRational::PosInf);
                }
            }
            Err(CoreError::InsufficientTruncation(format!(
                "substitution into {} vanishes to the certified order {prec}",
                b.series
            )))
        }
    }
}

/// How a valuation enters a merged cluster.
enum Pos<'a> {
    Root,
    Node(NodePath),
    Curve(&'a PuiseuxBranch),
}

fn pos(v: &Valuation) -> Result<Pos<'_>> {
    Ok(match v {
        Valuation::Root => Pos::Root,
        Valuation::Curve(b) => Pos::Curve(b),
        _ => Pos::Node(v.node_path()?.unwrap()),
    })
}

const MAX_CURVE_STEPS: usize = 1 << 12;

/// Steps of a branch path, grown on demand.
struct CurvePath<'a> {
    branch: &'a PuiseuxBranch,
    steps: Vec<Step>,
    exhausted: bool,
}

impl<'a> CurvePath<'a> {
    fn new(branch: &'a PuiseuxBranch) -> Self {
        CurvePath { branch, steps: Vec::new(), exhausted: false }
    }

    /// Ensures at least `n` steps are known, if the series determines them.
    fn ensure(&mut self, n: usize) -> Result<bool> {
        if self.steps.len() >= n {
            return Ok(true);
        }
        if self.exhausted {
            return Ok(false);
        }
        if n > MAX_CURVE_STEPS {
            return Err(CoreError::PrecisionExceeded(format!(
                "branch {} followed through {MAX_CURVE_STEPS} blowups",
                self.branch.series
            )));
        }
        let want = n.max(2 * self.steps.len()).max(8).min(MAX_CURVE_STEPS);
        self.steps = branch_steps_available(&self.branch.series, want)?;
        if self.steps.len() < want {
            self.exhausted = true;
        }
        Ok(self.steps.len() >= n)
    }

    fn step(&mut self, k: usize) -> Result<Option<Step>> {
        Ok(if self.ensure(k + 1)? { Some(self.steps[k].clone()) } else { None })
    }

    /// Smallest `k >= from` whose next step is free: the node `n_k` whose
    /// free direction contains the branch.
    fn attachment(&mut self, from: usize) -> Result<usize> {
        let mut k = from;
        loop {
            match self.step(k)? {
                Some(Step::Free(_)) => return Ok(k),
                Some(_) => k += 1,
                None => {
                    return Err(CoreError::InsufficientTruncation(format!(
                        "branch {} is not separated at its truncation order",
                        self.branch.series
                    )))
                }
            }
        }
    }

    fn path(&self, nodes: usize) -> NodePath {
        NodePath { base: self.branch.base.clone(), steps: self.steps[..nodes - 1].to_vec() }
    }
}

/// Comparison together with the meet and its skewness.
struct Relation {
    cmp: Comparison,
    meet: Valuation,
}

fn component_valuation(cl: &Cluster, comp: usize) -> Valuation {
    if comp == 0 {
        Valuation::Root
    } else {
        let (c, k) = cl.path_cluster(comp - 1);
        Valuation::Divisorial { cluster: Arc::new(c), node: k }
    }
}

fn relate(a: &Valuation, b: &Valuation) -> Result<Relation> {
    let (pa, pb) = (pos(a)?, pos(b)?);
    match (pa, pb) {
        (Pos::Root, Pos::Root) => Ok(Relation { cmp: Comparison::Eq, meet: Valuation::Root }),
        (Pos::Root, _) => Ok(Relation { cmp: Comparison::Lt, meet: Valuation::Root }),
        (_, Pos::Root) => Ok(Relation { cmp: Comparison::Gt, meet: Valuation::Root }),
        (Pos::Node(p), Pos::Node(q)) => {
            if p.base != q.base {
                return Ok(incomparable_at_root());
            }
            let (cl, n) = Cluster::from_paths(&[&p, &q])?;
            let g = cl.dual_graph()?;
            let (i, j) = (n[0] + 1, n[1] + 1);
            let cmp = if i == j {
                Comparison::Eq
            } else if g.is_below(i, j) {
                Comparison::Lt
            } else if g.is_below(j, i) {
                Comparison::Gt
            } else {
                Comparison::Incomparable
            };
            let meet = match cmp {
                Comparison::Eq | Comparison::Lt => a.clone(),
                Comparison::Gt => b.clone(),
                Comparison::Incomparable => component_valuation(&cl, g.lca(i, j)),
            };
            Ok(Relation { cmp, meet })
        }
        (Pos::Node(p), Pos::Curve(c)) => node_vs_curve(a, &p, c),
        (Pos::Curve(c), Pos::Node(p)) => {
            let r = node_vs_curve(b, &p, c)?;
            Ok(Relation { cmp: flip(r.cmp), meet: r.meet })
        }
        (Pos::Curve(c1), Pos::Curve(c2)) => curve_vs_curve(a, c1, c2),
    }
}

fn incomparable_at_root() -> Relation {
    Relation { cmp: Comparison::Incomparable, meet: Valuation::Root }
}

fn flip(c: Comparison) -> Comparison {
    match c {
        Comparison::Lt => Comparison::Gt,
        Comparison::Gt => Comparison::Lt,
        other => other,
    }
}

fn node_vs_curve(node_val: &Valuation, p: &NodePath, c: &PuiseuxBranch) -> Result<Relation> {
    if p.base != c.base {
        return Ok(incomparable_at_root());
    }
    let mut cp = CurvePath::new(c);
    // Shared nodes n_0 .. n_{j-1}.
    let mut j = 1;
    while j < p.len() {
        match cp.step(j - 1)? {
            Some(s) if s == p.steps[j - 1] => j += 1,
            Some(_) => break,
            None => {
                return Err(CoreError::InsufficientTruncation(format!(
                    "branch {} is not separated from {node_val} at its truncation order",
                    c.series
                )))
            }
        }
    }
    let k = cp.attachment(j - 1)?;
    let cpath = cp.path(k + 1);
    let (cl, n) = Cluster::from_paths(&[p, &cpath])?;
    let g = cl.dual_graph()?;
    let (i, ic) = (n[0] + 1, n[1] + 1);
    if g.is_below(i, ic) {
        Ok(Relation { cmp: Comparison::Lt, meet: node_val.clone() })
    } else {
        Ok(Relation { cmp: Comparison::Incomparable, meet: component_valuation(&cl, g.lca(i, ic)) })
    }
}

fn curve_vs_curve(a: &Valuation, c1: &PuiseuxBranch, c2: &PuiseuxBranch) -> Result<Relation> {
    if curve_key(c1) == curve_key(c2) {
        return Ok(Relation { cmp: Comparison::Eq, meet: a.clone() });
    }
    if c1.base != c2.base {
        return Ok(incomparable_at_root());
    }
    let mut p1 = CurvePath::new(c1);
    let mut p2 = CurvePath::new(c2);
    let mut d = 0;
    loop {
        match (p1.step(d)?, p2.step(d)?) {
            (Some(s1), Some(s2)) if s1 == s2 => d += 1,
            (Some(_), Some(_)) => break,
            _ => {
                return Err(CoreError::InsufficientTruncation(format!(
                    "branches {} and {} agree to their truncation order",
                    c1.series, c2.series
                )))
            }
        }
    }
    // Nodes n_0 .. n_d are shared.
    let k1 = p1.attachment(d)?;
    let k2 = p2.attachment(d)?;
    let (q1, q2) = (p1.path(k1 + 1), p2.path(k2 + 1));
    let (cl, n) = Cluster::from_paths(&[&q1, &q2])?;
    let g = cl.dual_graph()?;
    let meet = component_valuation(&cl, g.lca(n[0] + 1, n[1] + 1));
    Ok(Relation { cmp: Comparison::Incomparable, meet })
}

pub fn compare(a: &Valuation, b: &Valuation) -> Result<Comparison> {
    Ok(relate(a, b)?.cmp)
}

pub fn meet(a: &Valuation, b: &Valuation) -> Result<Valuation> {
    Ok(relate(a, b)?.meet)
}

/// `v <= w` in the tree order.
pub fn is_le(v: &Valuation, w: &Valuation) -> Result<bool> {
    Ok(matches!(compare(v, w)?, Comparison::Lt | Comparison::Eq))
}

/// `α(a ∧ b)`.
pub fn meet_skewness(a: &Valuation, b: &Valuation) -> Result<ExtRational> {
    meet(a, b)?.skewness()
}

/// `2 α(a ∧ b) - α(a) - α(b)`.
pub fn distance(a: &Valuation, b: &Valuation) -> Result<ExtRational> {
    let m = meet_skewness(a, b)?;
    let two_m = m.checked_add(&m)?;
    Ok(two_m.checked_sub(&a.skewness()?)?.checked_sub(&b.skewness()?)?)
}

/// The largest element among the meets of `v` with the points of `tree`
/// (and the root).
pub fn retract(v: &Valuation, tree: &[Valuation]) -> Result<Valuation> {
    let mut best = Valuation::Root;
    let mut best_alpha = ExtRational::from(1);
    for t in tree {
        let m = meet(t, v)?;
        let a = m.skewness()?;
        if a < best_alpha {
            best = m;
            best_alpha = a;
        }
    }
    Ok(best)
}

/// The point of skewness `a` on the segment from the root to `top`.
pub fn point_on_segment(top: &Valuation, a: &Rational) -> Result<Valuation> {
    let one = Rational::one();
    let top_alpha = top.skewness()?;
    if *a > one || ExtRational::from(a.clone()) < top_alpha {
        return Err(CoreError::InvalidValuation(format!(
            "skewness {a} lies outside [{top_alpha}, 1] on the segment to {top}"
        )));
    }
    if *a == one {
        return Ok(Valuation::Root);
    }
    if top_alpha == ExtRational::from(a.clone()) {
        return Ok(top.clone());
    }
    // A cluster containing a divisor below `top` of skewness at most `a`.
    let (mut cl, comp) = match pos(top)? {
        Pos::Root => unreachable!("root handled above"),
        Pos::Node(p) => {
            let (cl, n) = Cluster::from_paths(&[&p])?;
            (cl, n[0] + 1)
        }
        Pos::Curve(c) => {
            // Gallop along the attachment nodes of the branch, then scan the
            // cached prefixes for the first one of skewness at most `a`.
            let mut cp = CurvePath::new(c);
            let (mut from, mut stride) = (0, 1);
            loop {
                let mut k = cp.attachment(from)?;
                for _ in 1..stride {
                    k = cp.attachment(k + 1)?;
                }
                if node_data(&cp.path(k + 1))?.alpha <= *a {
                    break;
                }
                from = k + 1;
                stride *= 2;
            }
            let mut from = 0;
            loop {
                let k = cp.attachment(from)?;
                let path = cp.path(k + 1);
                if node_data(&path)?.alpha <= *a {
                    let (cl, n) = Cluster::from_paths(&[&path])?;
                    break (cl, n[0] + 1);
                }
                from = k + 1;
            }
        }
    };
    let g = cl.geometry()?.clone();
    let path = g.dual_path(comp);
    let idx = path
        .windows(2)
        .position(|w| g.alpha[w[0]] >= *a && *a >= g.alpha[w[1]])
        .ok_or_else(|| CoreError::InternalMismatch("skewness not monotone on a dual path".into()))?;
    let (mut hi, mut lo) = (path[idx], path[idx + 1]);
    if g.alpha[hi] == *a {
        return Ok(component_valuation(&cl, hi));
    }
    if g.alpha[lo] == *a {
        return Ok(component_valuation(&cl, lo));
    }
    // Stern–Brocot descent through satellite points between `hi` and `lo`.
    let mut ords: Vec<(i64, i64)> = (0..g.size()).map(|i| (g.ord_x[i], g.ord_y[i])).collect();
    let mut alpha: Vec<Rational> = g.alpha.clone();
    loop {
        let (later, earlier) = (hi.max(lo), hi.min(lo));
        let node = cl.push(Center::Satellite {
            parent: later - 1,
            other: Boundary::from_index(earlier),
        })?;
        let comp = node + 1;
        let (ox, oy) = (ords[hi].0 + ords[lo].0, ords[hi].1 + ords[lo].1);
        ords.push((ox, oy));
        let b_new = -ox.min(oy);
        let b_hi = -ords[hi].0.min(ords[hi].1);
        let a_new = &alpha[hi] - Rational::new(1.into(), (b_hi * b_new).into());
        alpha.push(a_new.clone());
        if a_new == *a {
            let check = &cl.geometry()?.alpha[comp];
            if check != a {
                return Err(CoreError::InternalMismatch(format!(
                    "segment point has skewness {check}, expected {a}"
                )));
            }
            return Ok(component_valuation(&cl, comp));
        }
        if a_new > *a {
            hi = comp;
        } else {
            lo = comp;
        }
    }
}
