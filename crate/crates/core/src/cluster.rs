//! Infinitely near points above the line at infinity.
//!
//! A [`Cluster`] is a finite sequence of point blowups. Node `k` is the
//! blowup of its center, creating the exceptional divisor `E_k`. Every center
//! carries local coordinates `(u, v)` in which the boundary component the
//! point lies on is `{u = 0}` and the second boundary component through the
//! point, when there is one, is `{v = 0}`. Children are addressed in the
//! chart `(u, v) = (u', u' v')` of the blowup, so `E_k = {u' = 0}`.
//!
//! Boundary components are indexed `0` for the line at infinity and `k + 1`
//! for `E_k` in every table of this module.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_traits::{One, ToPrimitive, Zero};
use vinf_exact::{inverse, Poly2, PuiseuxSeries, Rational, Series1};

use crate::error::{CoreError, Result};

/// A point of the line at infinity. `XChart(c)` is `[1 : -c : 0]` with
/// local coordinates `u = 1/x`, `v = y/x + c`; `YChart` is `[0 : 1 : 0]`
/// with `u = 1/y`, `v = x/y`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PointAtInfinity {
    XChart(Rational),
    YChart,
}

impl PointAtInfinity {
    /// Writes `P = u^{-d} Q(u, v)` in the local coordinates and returns
    /// `(Q, d)` with `d = deg P`. `Q` is not divisible by `u`.
    pub fn local_equation(&self, p: &Poly2) -> Result<(Poly2, u32)> {
        let d = p.degree().ok_or(CoreError::ZeroPolynomial)?;
        let mut q = Poly2::zero();
        for (&(i, j), a) in p.terms() {
            let shift = Poly2::monomial(d - i - j, 0, Rational::one());
            let term = match self {
                PointAtInfinity::XChart(c) => {
                    let vc = &Poly2::y() - &Poly2::constant(c.clone());
                    &shift * &vc.pow(j)
                }
                PointAtInfinity::YChart => &shift * &Poly2::monomial(0, i, Rational::one()),
            };
            q = &q + &term.scale(a);
        }
        Ok((q, d))
    }

    /// Homogeneous coordinates as a string.
    pub fn projective(&self) -> String {
        match self {
            PointAtInfinity::XChart(c) => format!("[1:{}:0]", vinf_exact::rat_str(&-c.clone())),
            PointAtInfinity::YChart => "[0:1:0]".to_string(),
        }
    }
}

impl fmt::Display for PointAtInfinity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointAtInfinity::XChart(c) => write!(f, "x-chart(c={})", vinf_exact::rat_str(c)),
            PointAtInfinity::YChart => write!(f, "y-chart"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Boundary {
    LInf,
    E(usize),
}

impl Boundary {
    pub fn index(self) -> usize {
        match self {
            Boundary::LInf => 0,
            Boundary::E(k) => k + 1,
        }
    }

    pub fn from_index(i: usize) -> Boundary {
        if i == 0 {
            Boundary::LInf
        } else {
            Boundary::E(i - 1)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Center {
    /// The point of the line at infinity itself.
    Base(PointAtInfinity),
    /// The point `v' = c` of `E_parent`, away from other boundary components.
    Free { parent: usize, c: Rational },
    /// The intersection of `E_parent` with `other`.
    Satellite { parent: usize, other: Boundary },
}

/// Position of a node relative to its parent's center.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Step {
    Free(Rational),
    /// Where `E_parent` meets the component the parent's center lay on.
    SatPrev,
    /// Where `E_parent` meets the second component through the parent's
    /// center.
    SatOther,
}

/// A node described by its base point and the steps leading to it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodePath {
    pub base: PointAtInfinity,
    pub steps: Vec<Step>,
}

impl NodePath {
    pub fn base_only(base: PointAtInfinity) -> Self {
        NodePath { base, steps: Vec::new() }
    }

    /// Number of nodes on the path, the base blowup included.
    pub fn len(&self) -> usize {
        self.steps.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of leading nodes shared with `other`.
    pub fn common_prefix(&self, other: &NodePath) -> usize {
        if self.base != other.base {
            return 0;
        }
        1 + self.steps.iter().zip(&other.steps).take_while(|(a, b)| a == b).count()
    }

    pub fn truncated(&self, nodes: usize) -> NodePath {
        NodePath { base: self.base.clone(), steps: self.steps[..nodes - 1].to_vec() }
    }
}

#[derive(Debug, Default)]
pub struct Cluster {
    centers: Vec<Center>,
    through: Vec<(Boundary, Option<Boundary>)>,
    dual: OnceLock<DualGraph>,
    geometry: OnceLock<GeometryTable>,
}

impl Clone for Cluster {
    fn clone(&self) -> Self {
        Cluster {
            centers: self.centers.clone(),
            through: self.through.clone(),
            dual: self.dual.clone(),
            geometry: self.geometry.clone(),
        }
    }
}

impl PartialEq for Cluster {
    fn eq(&self, other: &Self) -> bool {
        self.centers == other.centers
    }
}

impl Eq for Cluster {}

/// Default bound on the degree of strict transforms during evaluation.
pub const DEFAULT_DEGREE_CAP: u32 = 20_000;

impl Cluster {
    pub fn new(centers: Vec<Center>) -> Result<Self> {
        let mut cl = Cluster::default();
        for c in centers {
            cl.push(c)?;
        }
        Ok(cl)
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn centers(&self) -> &[Center] {
        &self.centers
    }

    pub fn center(&self, k: usize) -> &Center {
        &self.centers[k]
    }

    /// Boundary components through the center of node `k`.
    pub fn through(&self, k: usize) -> (Boundary, Option<Boundary>) {
        self.through[k]
    }

    pub fn parent(&self, k: usize) -> Option<usize> {
        match self.centers[k] {
            Center::Base(_) => None,
            Center::Free { parent, .. } | Center::Satellite { parent, .. } => Some(parent),
        }
    }

    pub fn base_of(&self, k: usize) -> &PointAtInfinity {
        let mut k = k;
        loop {
            match &self.centers[k] {
                Center::Base(p) => return p,
                Center::Free { parent, .. } | Center::Satellite { parent, .. } => k = *parent,
            }
        }
    }

    /// Step of node `k` relative to its parent, `None` for base blowups.
    pub fn step(&self, k: usize) -> Option<Step> {
        match &self.centers[k] {
            Center::Base(_) => None,
            Center::Free { c, .. } => Some(Step::Free(c.clone())),
            Center::Satellite { parent, other } => {
                if self.through[*parent].0 == *other {
                    Some(Step::SatPrev)
                } else {
                    Some(Step::SatOther)
                }
            }
        }
    }

    /// Nodes from the base blowup down to `k`.
    pub fn ancestors(&self, k: usize) -> Vec<usize> {
        let mut out = vec![k];
        let mut cur = k;
        while let Some(p) = self.parent(cur) {
            out.push(p);
            cur = p;
        }
        out.reverse();
        out
    }

    pub fn path(&self, k: usize) -> NodePath {
        let anc = self.ancestors(k);
        NodePath {
            base: self.base_of(k).clone(),
            steps: anc[1..].iter().map(|&a| self.step(a).unwrap()).collect(),
        }
    }

    fn center_for(&self, parent: usize, step: &Step) -> Result<Center> {
        let (cur, other) = self.through[parent];
        Ok(match step {
            Step::Free(c) => Center::Free { parent, c: c.clone() },
            Step::SatPrev => Center::Satellite { parent, other: cur },
            Step::SatOther => Center::Satellite {
                parent,
                other: other.ok_or_else(|| {
                    CoreError::InvalidCluster(format!(
                        "node {parent} has a single boundary component through its center"
                    ))
                })?,
            },
        })
    }

    /// Adds a center and returns the index of its node.
    pub fn push(&mut self, center: Center) -> Result<usize> {
        let k = self.centers.len();
        let through = match &center {
            Center::Base(_) => (Boundary::LInf, None),
            Center::Free { parent, c } => {
                self.check_parent(*parent, k)?;
                if self.through[*parent].1.is_some() && c.is_zero() {
                    return Err(CoreError::InvalidCluster(format!(
                        "free point c=0 of E_{parent} lies on a second boundary component; use a satellite"
                    )));
                }
                (Boundary::E(*parent), None)
            }
            Center::Satellite { parent, other } => {
                self.check_parent(*parent, k)?;
                let (cur, oth) = self.through[*parent];
                if *other != cur && Some(*other) != oth {
                    return Err(CoreError::InvalidCluster(format!(
                        "{other:?} does not pass through the satellite point on E_{parent}"
                    )));
                }
                (Boundary::E(*parent), Some(*other))
            }
        };
        if self.centers.iter().enumerate().any(|(i, c)| self.same_point(i, c, &center)) {
            return Err(CoreError::InvalidCluster(format!("node {k} repeats an existing center")));
        }
        self.centers.push(center);
        self.through.push(through);
        self.dual = OnceLock::new();
        self.geometry = OnceLock::new();
        Ok(k)
    }

    fn same_point(&self, _i: usize, a: &Center, b: &Center) -> bool {
        match (a, b) {
            (Center::Base(p), Center::Base(q)) => p == q,
            (Center::Free { parent: p1, c: c1 }, Center::Free { parent: p2, c: c2 }) => {
                p1 == p2 && c1 == c2
            }
            (
                Center::Satellite { parent: p1, other: o1 },
                Center::Satellite { parent: p2, other: o2 },
            ) => p1 == p2 && o1 == o2,
            _ => false,
        }
    }

    fn check_parent(&self, parent: usize, k: usize) -> Result<()> {
        if parent >= k {
            return Err(CoreError::InvalidCluster(format!(
                "node {k} refers to parent {parent}, which is not an earlier node"
            )));
        }
        Ok(())
    }

    fn find(&self, center: &Center) -> Option<usize> {
        self.centers.iter().position(|c| c == center)
    }

    /// Returns the node at the end of `path`, creating missing nodes.
    pub fn insert_path(&mut self, path: &NodePath) -> Result<usize> {
        let base = Center::Base(path.base.clone());
        let mut k = match self.find(&base) {
            Some(k) => k,
            None => self.push(base)?,
        };
        for step in &path.steps {
            let c = self.center_for(k, step)?;
            k = match self.find(&c) {
                Some(i) => i,
                None => self.push(c)?,
            };
        }
        Ok(k)
    }

    /// The node at the end of `path` if present.
    pub fn lookup_path(&self, path: &NodePath) -> Option<usize> {
        let mut k = self.find(&Center::Base(path.base.clone()))?;
        for step in &path.steps {
            let c = self.center_for(k, step).ok()?;
            k = self.find(&c)?;
        }
        Some(k)
    }

    /// Merges paths into one cluster, returning the node of each path.
    pub fn from_paths(paths: &[&NodePath]) -> Result<(Cluster, Vec<usize>)> {
        let mut cl = Cluster::default();
        let mut nodes = Vec::with_capacity(paths.len());
        for p in paths {
            nodes.push(cl.insert_path(p)?);
        }
        Ok((cl, nodes))
    }

    /// Cluster holding exactly the ancestors of `k`; returns the new index.
    pub fn path_cluster(&self, k: usize) -> (Cluster, usize) {
        let (cl, nodes) = Cluster::from_paths(&[&self.path(k)]).expect("path of a valid node");
        (cl, nodes[0])
    }

    /// Intersection matrix and dual graph, computed once. Cheaper than
    /// [`Cluster::geometry`], which also pulls back `x` and `y`.
    pub fn dual_graph(&self) -> Result<&DualGraph> {
        if let Some(d) = self.dual.get() {
            return Ok(d);
        }
        let d = build_dual_graph(self)?;
        let _ = self.dual.set(d);
        Ok(self.dual.get().unwrap())
    }

    /// Skewness, thinness and `b` of node `k`, from the geometry if it is
    /// already known and from a cache keyed by node path otherwise.
    pub fn node_data(&self, k: usize) -> Result<NodeData> {
        if let Some(g) = self.geometry.get() {
            return Ok(g.node_data(k + 1));
        }
        node_data(&self.path(k))
    }

    /// Geometry of the configuration, computed once.
    pub fn geometry(&self) -> Result<&GeometryTable> {
        if let Some(g) = self.geometry.get() {
            return Ok(g);
        }
        let g = build_geometry(self)?;
        let _ = self.geometry.set(g);
        Ok(self.geometry.get().unwrap())
    }

    /// `ord_{E_k}(P)`.
    pub fn ord(&self, k: usize, p: &Poly2, cap: u32) -> Result<i64> {
        Ok(self.transform(k, p, cap)?.ord)
    }

    /// `ord_{E_k}(P) / b_{E_k}`.
    pub fn eval_divisorial(&self, k: usize, p: &Poly2, cap: u32) -> Result<Rational> {
        let ord = self.ord(k, p, cap)?;
        let b = self.geometry()?.b[k + 1];
        Ok(Rational::new(ord.into(), b.into()))
    }

    /// Pulls `P` back along the ancestors of `k` and records its order and
    /// initial form along `E_k`.
    pub fn transform(&self, k: usize, p: &Poly2, cap: u32) -> Result<Transform> {
        let base = self.base_of(k);
        let (q, d) = base.local_equation(p)?;
        let mut ords: BTreeMap<Boundary, i64> = BTreeMap::new();
        ords.insert(Boundary::LInf, -(d as i64));
        let mut h = q;
        let mut unit = Rational::one();
        let anc = self.ancestors(k);
        for (pos, &a) in anc.iter().enumerate() {
            let (cur, other) = self.through[a];
            let ord_cur = ords[&cur];
            let ord_other = other.map_or(0, |o| ords[&o]);
            let m = h.order().ok_or(CoreError::ZeroPolynomial)?;
            let ord_e = ord_cur + ord_other + m as i64;
            ords.insert(Boundary::E(a), ord_e);
            if pos + 1 == anc.len() {
                let lowest = h.homogeneous_part(m);
                let mut initial: BTreeMap<i64, Rational> = BTreeMap::new();
                for (&(i, j), c) in lowest.terms() {
                    let _ = i;
                    initial.insert(j as i64 + ord_other, c * &unit);
                }
                return Ok(Transform { ord: ord_e, initial });
            }
            let child = anc[pos + 1];
            if m == 0 {
                h = Poly2::constant(h.coeff(0, 0));
            } else {
                let (su, sv) = match self.step(child).unwrap() {
                    Step::Free(c) => (
                        Poly2::x(),
                        &Poly2::x() * &(&Poly2::y() + &Poly2::constant(c.clone())),
                    ),
                    Step::SatOther => (Poly2::x(), Poly2::parse("x*y").unwrap()),
                    Step::SatPrev => (Poly2::parse("x*y").unwrap(), Poly2::x()),
                };
                h = h.compose(&su, &sv).div_x_pow(m);
                if h.degree().unwrap_or(0) > cap {
                    return Err(CoreError::PrecisionExceeded(format!(
                        "strict transform degree exceeds {cap}"
                    )));
                }
            }
            if let Step::Free(c) = self.step(child).unwrap() {
                if other.is_some() && ord_other != 0 {
                    unit *= pow_i(&c, ord_other);
                }
            }
        }
        unreachable!("ancestor list ends at the node itself")
    }
}

fn pow_i(c: &Rational, e: i64) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..e.unsigned_abs() {
        acc *= c;
    }
    if e < 0 {
        acc.recip()
    } else {
        acc
    }
}

/// Order of a polynomial along `E_k` with its initial form, a Laurent
/// polynomial in the chart coordinate of `E_k` (exponent to coefficient).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transform {
    pub ord: i64,
    pub initial: BTreeMap<i64, Rational>,
}

/// Numerical data of all boundary components; index 0 is the line at
/// infinity and `k + 1` is `E_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeometryTable {
    pub b: Vec<i64>,
    pub ord_x: Vec<i64>,
    pub ord_y: Vec<i64>,
    pub ord_omega: Vec<i64>,
    pub alpha: Vec<Rational>,
    pub thinness: Vec<Rational>,
    pub intersection: Vec<Vec<i64>>,
    pub dual_parent: Vec<Option<usize>>,
    pub dual_depth: Vec<usize>,
    dual_products: OnceLock<Vec<Vec<Rational>>>,
}

impl GeometryTable {
    /// Data of the component with table index `i`.
    pub fn node_data(&self, i: usize) -> NodeData {
        NodeData { alpha: self.alpha[i].clone(), thinness: self.thinness[i].clone(), b: self.b[i] }
    }

    pub fn size(&self) -> usize {
        self.b.len()
    }

    /// `(Ě_i · Ě_j)` where `(Ě_i · E_j) = δ_ij`.
    pub fn check_dual(&self, i: usize, j: usize) -> Rational {
        self.dual_matrix()[i][j].clone()
    }

    /// Inverse of the intersection matrix, computed on first use.
    pub fn dual_matrix(&self) -> &[Vec<Rational>] {
        self.dual_products.get_or_init(|| {
            let im: Vec<Vec<Rational>> = self
                .intersection
                .iter()
                .map(|r| r.iter().map(|&v| Rational::from_integer(v.into())).collect())
                .collect();
            inverse(&im).expect("the intersection matrix of a blowup is unimodular")
        })
    }

    /// Components from the line at infinity to `i` in the dual graph.
    pub fn dual_path(&self, i: usize) -> Vec<usize> {
        let mut out = vec![i];
        let mut cur = i;
        while let Some(p) = self.dual_parent[cur] {
            out.push(p);
            cur = p;
        }
        out.reverse();
        out
    }

    /// `a <= b` in the tree order.
    pub fn is_below(&self, a: usize, b: usize) -> bool {
        let mut cur = b;
        loop {
            if cur == a {
                return true;
            }
            match self.dual_parent[cur] {
                Some(p) if self.dual_depth[cur] > self.dual_depth[a] => cur = p,
                _ => return false,
            }
        }
    }

    pub fn lca(&self, a: usize, b: usize) -> usize {
        let (mut x, mut y) = (a, b);
        while self.dual_depth[x] > self.dual_depth[y] {
            x = self.dual_parent[x].unwrap();
        }
        while self.dual_depth[y] > self.dual_depth[x] {
            y = self.dual_parent[y].unwrap();
        }
        while x != y {
            x = self.dual_parent[x].unwrap();
            y = self.dual_parent[y].unwrap();
        }
        x
    }

    pub fn neighbours(&self, i: usize) -> Vec<usize> {
        (0..self.size()).filter(|&j| j != i && self.intersection[i][j] != 0).collect()
    }
}

/// The intersection matrix of the boundary components and the dual graph
/// rooted at the line at infinity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualGraph {
    pub intersection: Vec<Vec<i64>>,
    pub ord_omega: Vec<i64>,
    pub parent: Vec<Option<usize>>,
    pub depth: Vec<usize>,
}

impl DualGraph {
    /// `a <= b` in the tree order.
    pub fn is_below(&self, a: usize, b: usize) -> bool {
        let mut cur = b;
        loop {
            if cur == a {
                return true;
            }
            match self.parent[cur] {
                Some(p) if self.depth[cur] > self.depth[a] => cur = p,
                _ => return false,
            }
        }
    }

    pub fn lca(&self, a: usize, b: usize) -> usize {
        let (mut x, mut y) = (a, b);
        while self.depth[x] > self.depth[y] {
            x = self.parent[x].unwrap();
        }
        while self.depth[y] > self.depth[x] {
            y = self.parent[y].unwrap();
        }
        while x != y {
            x = self.parent[x].unwrap();
            y = self.parent[y].unwrap();
        }
        x
    }
}

fn build_dual_graph(cl: &Cluster) -> Result<DualGraph> {
    let n = cl.len() + 1;
    let mut inter = vec![vec![0i64; n]; n];
    inter[0][0] = 1;
    let mut ord_omega = vec![-3i64; n];
    for k in 0..cl.len() {
        let e = k + 1;
        let (cur, other) = cl.through(k);
        let comps: Vec<usize> = std::iter::once(cur.index()).chain(other.map(|o| o.index())).collect();
        inter[e][e] = -1;
        for &c in &comps {
            inter[c][c] -= 1;
            inter[c][e] = 1;
            inter[e][c] = 1;
        }
        if comps.len() == 2 {
            let (a, b) = (comps[0], comps[1]);
            if inter[a][b] != 1 {
                return Err(CoreError::InvalidCluster(format!(
                    "components {a} and {b} do not meet at the center of node {k}"
                )));
            }
            inter[a][b] = 0;
            inter[b][a] = 0;
        }
        ord_omega[e] = comps.iter().map(|&c| ord_omega[c]).sum::<i64>() + 1;
    }

    let mut parent = vec![None; n];
    let mut depth = vec![0usize; n];
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for j in 0..n {
            if j != i && inter[i][j] != 0 && !seen[j] {
                seen[j] = true;
                parent[j] = Some(i);
                depth[j] = depth[i] + 1;
                queue.push_back(j);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(CoreError::InternalMismatch("dual graph is disconnected".into()));
    }
    Ok(DualGraph { intersection: inter, ord_omega, parent, depth })
}

fn build_geometry(cl: &Cluster) -> Result<GeometryTable> {
    let dual = cl.dual_graph()?.clone();
    let n = cl.len() + 1;
    let x = Poly2::x();
    let y = Poly2::y();
    let mut ord_x = vec![-1i64; n];
    let mut ord_y = vec![-1i64; n];
    let mut b = vec![1i64; n];
    for k in 0..cl.len() {
        ord_x[k + 1] = cl.transform(k, &x, DEFAULT_DEGREE_CAP)?.ord;
        ord_y[k + 1] = cl.transform(k, &y, DEFAULT_DEGREE_CAP)?.ord;
        b[k + 1] = -ord_x[k + 1].min(ord_y[k + 1]);
        if b[k + 1] <= 0 {
            return Err(CoreError::InternalMismatch(format!("b of E_{k} is not positive")));
        }
    }

    // Skewness by the edge rule along the dual graph.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| dual.depth[i]);
    let mut alpha = vec![Rational::zero(); n];
    alpha[0] = Rational::one();
    for &j in &order[1..] {
        let i = dual.parent[j].expect("non-root component");
        alpha[j] = &alpha[i] - Rational::new(1.into(), (b[i] * b[j]).into());
    }

    let thinness = (0..n)
        .map(|i| Rational::new((1 + dual.ord_omega[i]).into(), b[i].into()))
        .collect();
    Ok(GeometryTable {
        b,
        ord_x,
        ord_y,
        ord_omega: dual.ord_omega,
        alpha,
        thinness,
        intersection: dual.intersection,
        dual_parent: dual.parent,
        dual_depth: dual.depth,
        dual_products: OnceLock::new(),
    })
}

/// Numerical data of one divisorial node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeData {
    pub alpha: Rational,
    pub thinness: Rational,
    pub b: i64,
}

const NODE_CACHE_LIMIT: usize = 200_000;

/// Data of the node at the end of `path`. Results are cached for every
/// prefix of the path, so repeated queries along one branch stay cheap.
pub fn node_data(path: &NodePath) -> Result<NodeData> {
    static CACHE: OnceLock<Mutex<HashMap<NodePath, NodeData>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(d) = cache.lock().expect("node cache").get(path) {
        return Ok(d.clone());
    }
    let (cl, nodes) = Cluster::from_paths(&[path])?;
    let g = cl.geometry()?;
    let mut map = cache.lock().expect("node cache");
    if map.len() > NODE_CACHE_LIMIT {
        map.clear();
    }
    for k in 0..cl.len() {
        map.insert(cl.path(k), g.node_data(k + 1));
    }
    Ok(g.node_data(nodes[0] + 1))
}

/// The divisorial node realizing the monomial valuation `v_{s,t}`.
pub fn monomial_to_node(s: &Rational, t: &Rational) -> Result<(Cluster, usize)> {
    let minus_one = -Rational::one();
    if *s == minus_one && *t == minus_one {
        return Err(CoreError::RootValuation);
    }
    let (base, w) = if *s == minus_one && *t > minus_one {
        (PointAtInfinity::XChart(Rational::zero()), t + Rational::one())
    } else if *t == minus_one && *s > minus_one {
        (PointAtInfinity::YChart, s + Rational::one())
    } else {
        return Err(CoreError::InvalidValuation(format!(
            "monomial weights ({s}, {t}) are not normalized to min = -1"
        )));
    };
    // Weights (1, w) on (u, v) scaled to a primitive integer pair.
    let mut a = w.denom().to_i64().ok_or(CoreError::NotDivisorial)?;
    let mut bw = w.numer().to_i64().ok_or(CoreError::NotDivisorial)?;
    let mut path = NodePath::base_only(base);
    let mut has_other = false;
    while a != bw {
        if bw > a {
            path.steps.push(if has_other { Step::SatOther } else { Step::Free(Rational::zero()) });
            bw -= a;
        } else {
            path.steps.push(Step::SatPrev);
            let (na, nb) = (bw, a - bw);
            a = na;
            bw = nb;
            has_other = true;
        }
    }
    let (cl, nodes) = Cluster::from_paths(&[&path])?;
    Ok((cl, nodes[0]))
}

/// Follows a parametrized branch `(u, v) = (t^m, s(t))` through successive
/// blowups.
#[derive(Clone, Debug)]
struct BranchWalker {
    u: Series1,
    v: Series1,
    has_other: bool,
    cap: u32,
}

enum WalkOutcome {
    Step(Step),
    NeedsPrecision,
}

impl BranchWalker {
    fn new(series: &PuiseuxSeries, cap: u32) -> Self {
        BranchWalker {
            u: Series1::monomial(series.m(), Rational::one()),
            v: series.to_series(),
            has_other: false,
            cap,
        }
    }

    fn next(&mut self) -> WalkOutcome {
        let (ou, lu) = match self.u.leading() {
            Some(x) => x,
            None => return WalkOutcome::NeedsPrecision,
        };
        let v_lead = self.v.leading();
        let v_beyond = self.v.is_exact_zero() || self.v.prec().is_some_and(|p| p > ou);
        let below = match &v_lead {
            Some((ov, _)) if *ov <= ou => false,
            Some(_) => true,
            None if v_beyond => true,
            None => return WalkOutcome::NeedsPrecision,
        };
        if below {
            let Some(q) = self.v.checked_div(&self.u, self.cap) else {
                return WalkOutcome::NeedsPrecision;
            };
            self.v = q;
            let step = if self.has_other { Step::SatOther } else { Step::Free(Rational::zero()) };
            return WalkOutcome::Step(step);
        }
        let (ov, lv) = v_lead.unwrap();
        if ov == ou {
            let c = &lv / &lu;
            let Some(q) = self.v.checked_div(&self.u, self.cap) else {
                return WalkOutcome::NeedsPrecision;
            };
            self.v = &q - &Series1::constant(c.clone());
            self.has_other = false;
            WalkOutcome::Step(Step::Free(c))
        } else {
            let Some(q) = self.u.checked_div(&self.v, self.cap) else {
                return WalkOutcome::NeedsPrecision;
            };
            self.u = std::mem::replace(&mut self.v, q);
            self.has_other = true;
            WalkOutcome::Step(Step::SatPrev)
        }
    }
}

/// The first `count` steps of the path of a branch after the base blowup.
pub fn branch_steps(series: &PuiseuxSeries, count: usize) -> Result<Vec<Step>> {
    let steps = branch_steps_available(series, count)?;
    if steps.len() < count {
        return Err(CoreError::InsufficientTruncation(format!(
            "branch {series} determines only {} infinitely near points",
            steps.len() + 1
        )));
    }
    Ok(steps)
}

/// Up to `count` steps of a branch path. A truncated series may determine
/// fewer; exact series are always followed to `count` steps.
pub fn branch_steps_available(series: &PuiseuxSeries, count: usize) -> Result<Vec<Step>> {
    let mut cap = (series.truncation() + 1).max(32);
    loop {
        let mut w = BranchWalker::new(series, cap);
        let mut steps = Vec::with_capacity(count);
        let mut stuck = false;
        while steps.len() < count {
            match w.next() {
                WalkOutcome::Step(s) => steps.push(s),
                WalkOutcome::NeedsPrecision => {
                    stuck = true;
                    break;
                }
            }
        }
        if !stuck || !series.is_exact() {
            return Ok(steps);
        }
        if cap >= 1 << 14 {
            return Err(CoreError::PrecisionExceeded(format!(
                "branch {series} needs more than {cap} terms"
            )));
        }
        cap *= 2;
    }
}

/// The cluster of the first `depth` infinitely near points of a branch at
/// `base`, together with its node path.
pub fn branch_to_nodes(
    base: &PointAtInfinity,
    series: &PuiseuxSeries,
    depth: usize,
) -> Result<(Cluster, Vec<usize>)> {
    if depth == 0 {
        return Ok((Cluster::default(), Vec::new()));
    }
    let steps = branch_steps(series, depth - 1)?;
    let path = NodePath { base: base.clone(), steps };
    let (cl, nodes) = Cluster::from_paths(&[&path])?;
    let anc = cl.ancestors(nodes[0]);
    Ok((cl, anc))
}
