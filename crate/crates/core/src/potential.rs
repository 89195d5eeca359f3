//! Potential theory on trees: Green functions of finitely supported
//! measures, piecewise affine Laplacians and the Dirichlet pairing.
//!
//! Functions are represented by their Laplacian: the measure `ρ` stands
//! for `w -> Σ c_i α(v_i ∧ w)`. Two tree models are provided, an abstract
//! [`FiniteTree`] with prescribed skewness and the tree of valuations
//! itself through [`ValuationTree`].

use std::fmt;

use num_traits::{One, Zero};
use vinf_exact::{ExtRational, Rational};

use crate::error::{CoreError, Result};
use crate::valuations::{compare, is_le, meet, point_on_segment, Comparison, Valuation};

/// A rooted tree parameterized by skewness.
pub trait TreeContext {
    type Point: Clone + fmt::Debug;

    fn root(&self) -> Self::Point;
    fn alpha(&self, p: &Self::Point) -> Result<ExtRational>;
    fn meet_alpha(&self, a: &Self::Point, b: &Self::Point) -> Result<ExtRational>;
    fn same(&self, a: &Self::Point, b: &Self::Point) -> Result<bool>;
}

/// Finitely many atoms with nonzero rational masses at distinct points.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasure<P> {
    atoms: Vec<(P, Rational)>,
}

impl<P> Default for DiscreteMeasure<P> {
    fn default() -> Self {
        DiscreteMeasure { atoms: Vec::new() }
    }
}

impl<P: Clone> DiscreteMeasure<P> {
    pub fn new() -> Self {
        DiscreteMeasure { atoms: Vec::new() }
    }

    pub fn atoms(&self) -> &[(P, Rational)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> Rational {
        self.atoms.iter().map(|(_, m)| m.clone()).sum()
    }

    pub fn is_positive(&self) -> bool {
        self.atoms.iter().all(|(_, m)| *m > Rational::zero())
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return DiscreteMeasure::new();
        }
        DiscreteMeasure { atoms: self.atoms.iter().map(|(p, m)| (p.clone(), m * c)).collect() }
    }

    /// Adds mass at `p`, merging with an atom at the same point.
    pub fn add_with(
        &mut self,
        p: P,
        mass: Rational,
        same: impl Fn(&P, &P) -> Result<bool>,
    ) -> Result<()> {
        if mass.is_zero() {
            return Ok(());
        }
        for i in 0..self.atoms.len() {
            if same(&self.atoms[i].0, &p)? {
                self.atoms[i].1 += mass;
                if self.atoms[i].1.is_zero() {
                    self.atoms.remove(i);
                }
                return Ok(());
            }
        }
        self.atoms.push((p, mass));
        Ok(())
    }

    pub fn add_in<C: TreeContext<Point = P>>(&mut self, ctx: &C, p: P, mass: Rational) -> Result<()> {
        self.add_with(p, mass, |a, b| ctx.same(a, b))
    }

    /// Sum of two measures.
    pub fn plus<C: TreeContext<Point = P>>(&self, ctx: &C, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for (p, m) in &other.atoms {
            out.add_in(ctx, p.clone(), m.clone())?;
        }
        Ok(out)
    }
}

impl DiscreteMeasure<Valuation> {
    pub fn add_valuation(&mut self, v: Valuation, mass: Rational) -> Result<()> {
        self.add_with(v, mass, |a, b| Ok(a.key()? == b.key()?))
    }
}

impl DiscreteMeasure<usize> {
    pub fn add(&mut self, v: usize, mass: Rational) {
        self.add_with(v, mass, |a, b| Ok(a == b)).expect("index comparison is infallible");
    }

    pub fn mass_at(&self, v: usize) -> Rational {
        self.atoms.iter().find(|(p, _)| *p == v).map_or_else(Rational::zero, |(_, m)| m.clone())
    }
}

/// `Σ c_i α(v_i ∧ w)`.
pub fn value<C: TreeContext>(ctx: &C, rho: &DiscreteMeasure<C::Point>, w: &C::Point) -> Result<ExtRational> {
    let mut acc = ExtRational::zero();
    for (v, c) in rho.atoms() {
        let term = ctx.meet_alpha(v, w)?.scale(c)?;
        acc = acc.checked_add(&term).map_err(|_| {
            CoreError::Indeterminate(format!("infinite contributions of both signs at {w:?}"))
        })?;
    }
    Ok(acc)
}

/// `⟨ρ, σ⟩ = Σ_i Σ_j c_i d_j α(v_i ∧ w_j)`.
pub fn dirichlet<C: TreeContext>(
    ctx: &C,
    rho: &DiscreteMeasure<C::Point>,
    sigma: &DiscreteMeasure<C::Point>,
) -> Result<ExtRational> {
    let mut acc = ExtRational::zero();
    for (v, c) in rho.atoms() {
        for (w, d) in sigma.atoms() {
            let term = ctx.meet_alpha(v, w)?.scale(&(c * d))?;
            acc = acc.checked_add(&term).map_err(|_| {
                CoreError::Indeterminate("pairing of signed measures diverges".into())
            })?;
        }
    }
    Ok(acc)
}

/// `(φ(r)ψ(r) - ⟨φ,ψ⟩)² ≤ (φ(r)² - ⟨φ,φ⟩)(ψ(r)² - ⟨ψ,ψ⟩)`, checked exactly.
pub fn hodge_holds<C: TreeContext>(
    ctx: &C,
    phi: &DiscreteMeasure<C::Point>,
    psi: &DiscreteMeasure<C::Point>,
) -> Result<bool> {
    let fin = |x: ExtRational| {
        x.as_finite()
            .cloned()
            .ok_or_else(|| CoreError::PreconditionViolated("pairing is not finite".into()))
    };
    let (fr, gr) = (phi.total_mass(), psi.total_mass());
    let fg = fin(dirichlet(ctx, phi, psi)?)?;
    let ff = fin(dirichlet(ctx, phi, phi)?)?;
    let gg = fin(dirichlet(ctx, psi, psi)?)?;
    let lhs = (&fr * &gr - fg).pow(2);
    Ok(lhs <= (&fr * &fr - ff) * (&gr * &gr - gg))
}

/// Pushforward of `ρ` through a retraction map.
pub fn retract_measure<P: Clone, C: TreeContext<Point = P>>(
    ctx: &C,
    rho: &DiscreteMeasure<P>,
    retraction: impl Fn(&P) -> Result<P>,
) -> Result<DiscreteMeasure<P>> {
    let mut out = DiscreteMeasure::new();
    for (v, c) in rho.atoms() {
        out.add_in(ctx, retraction(v)?, c.clone())?;
    }
    Ok(out)
}

/// An abstract finite rooted tree with skewness on its vertices. Vertex 0
/// is the root with skewness 1; leaves may have skewness `-inf`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteTree {
    parent: Vec<Option<usize>>,
    alpha: Vec<ExtRational>,
    depth: Vec<usize>,
}

impl Default for FiniteTree {
    fn default() -> Self {
        FiniteTree { parent: vec![None], alpha: vec![ExtRational::from(1)], depth: vec![0] }
    }
}

impl FiniteTree {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn alpha_of(&self, v: usize) -> &ExtRational {
        &self.alpha[v]
    }

    pub fn children(&self, v: usize) -> Vec<usize> {
        (0..self.len()).filter(|&c| self.parent[c] == Some(v)).collect()
    }

    /// Adds a vertex below `parent`. Skewness must drop strictly; only
    /// leaves of a parent with finite skewness may sit at `-inf`.
    pub fn add_vertex(&mut self, parent: usize, alpha: ExtRational) -> Result<usize> {
        if parent >= self.len() {
            return Err(CoreError::PreconditionViolated(format!("no vertex {parent}")));
        }
        if !self.alpha[parent].is_finite() {
            return Err(CoreError::PreconditionViolated("vertex at -inf cannot have children".into()));
        }
        if alpha >= self.alpha[parent] || alpha == ExtRational::PosInf {
            return Err(CoreError::PreconditionViolated(format!(
                "skewness {alpha} does not drop below {}",
                self.alpha[parent]
            )));
        }
        self.parent.push(Some(parent));
        self.alpha.push(alpha);
        self.depth.push(self.depth[parent] + 1);
        Ok(self.len() - 1)
    }

    /// Inserts a vertex of skewness `alpha` on the edge above `child`.
    pub fn subdivide(&mut self, child: usize, alpha: Rational) -> Result<usize> {
        let p = self.parent[child].ok_or_else(|| CoreError::PreconditionViolated("root has no edge".into()))?;
        let a = ExtRational::from(alpha);
        if !(a < self.alpha[p] && a > self.alpha[child]) {
            return Err(CoreError::PreconditionViolated(format!(
                "skewness {a} is not inside the edge above vertex {child}"
            )));
        }
        let v = self.add_vertex(p, a)?;
        self.parent[child] = Some(v);
        self.fix_depths();
        Ok(v)
    }

    fn fix_depths(&mut self) {
        for v in 0..self.len() {
            let mut d = 0;
            let mut cur = v;
            while let Some(p) = self.parent[cur] {
                d += 1;
                cur = p;
            }
            self.depth[v] = d;
        }
    }

    pub fn is_ancestor(&self, a: usize, b: usize) -> bool {
        let mut cur = b;
        loop {
            if cur == a {
                return true;
            }
            match self.parent[cur] {
                Some(p) => cur = p,
                None => return false,
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

    /// Deepest ancestor of `v` inside the ancestor-closed set `subtree`.
    pub fn retract(&self, v: usize, subtree: &[bool]) -> usize {
        let mut cur = v;
        while !subtree[cur] {
            cur = self.parent[cur].expect("subtree contains the root");
        }
        cur
    }

    /// Ancestor closure of a set of vertices, the root included.
    pub fn hull(&self, vertices: &[usize]) -> Vec<bool> {
        let mut inside = vec![false; self.len()];
        inside[0] = true;
        for &v in vertices {
            let mut cur = Some(v);
            while let Some(c) = cur {
                if inside[c] && c != v {
                    break;
                }
                inside[c] = true;
                cur = self.parent[c];
            }
        }
        inside
    }

    /// Values of the function represented by `rho` at every vertex.
    pub fn values_of(&self, rho: &DiscreteMeasure<usize>) -> Result<Vec<ExtRational>> {
        (0..self.len()).map(|w| value(self, rho, &w)).collect()
    }

    fn edge_length(&self, v: usize) -> Result<Rational> {
        let p = self.parent[v].expect("non-root vertex");
        match (&self.alpha[p], &self.alpha[v]) {
            (ExtRational::Finite(a), ExtRational::Finite(b)) => Ok(a - b),
            _ => Err(CoreError::PreconditionViolated("edge of infinite length".into())),
        }
    }

    fn finite_values(&self, f: &[ExtRational]) -> Result<Vec<Rational>> {
        if f.len() != self.len() {
            return Err(CoreError::PreconditionViolated("one value per vertex is required".into()));
        }
        f.iter()
            .map(|x| {
                x.as_finite()
                    .cloned()
                    .ok_or_else(|| CoreError::PreconditionViolated("infinite vertex value".into()))
            })
            .collect()
    }

    /// Laplacian of the function affine in skewness on every edge with the
    /// given vertex values: outgoing slopes at each vertex, plus the value
    /// at the root.
    pub fn laplacian_pl(&self, f: &[ExtRational]) -> Result<DiscreteMeasure<usize>> {
        let f = self.finite_values(f)?;
        let mut mass = vec![Rational::zero(); self.len()];
        mass[0] = f[0].clone();
        for v in 1..self.len() {
            let p = self.parent[v].unwrap();
            let slope = (&f[v] - &f[p]) / self.edge_length(v)?;
            mass[p] += &slope;
            mass[v] -= &slope;
        }
        let mut out = DiscreteMeasure::new();
        for (v, m) in mass.into_iter().enumerate() {
            out.add(v, m);
        }
        Ok(out)
    }

    pub fn is_subharmonic(&self, f: &[ExtRational]) -> Result<bool> {
        Ok(self.laplacian_pl(f)?.is_positive())
    }

    /// `f(r) g(r) - Σ_edges f' g' length` for affine interpolations.
    pub fn dirichlet_by_parts(&self, f: &[ExtRational], g: &[ExtRational]) -> Result<Rational> {
        let f = self.finite_values(f)?;
        let g = self.finite_values(g)?;
        let mut acc = &f[0] * &g[0];
        for v in 1..self.len() {
            let p = self.parent[v].unwrap();
            let len = self.edge_length(v)?;
            let sf = (&f[v] - &f[p]) / &len;
            let sg = (&g[v] - &g[p]) / &len;
            acc -= sf * sg * len;
        }
        Ok(acc)
    }

    /// Vertices where a function takes its maximum.
    pub fn argmax(&self, f: &[ExtRational]) -> Vec<usize> {
        let best = f.iter().max().cloned();
        (0..self.len()).filter(|&v| Some(&f[v]) == best.as_ref()).collect()
    }
}

impl TreeContext for FiniteTree {
    type Point = usize;

    fn root(&self) -> usize {
        0
    }

    fn alpha(&self, p: &usize) -> Result<ExtRational> {
        Ok(self.alpha[*p].clone())
    }

    fn meet_alpha(&self, a: &usize, b: &usize) -> Result<ExtRational> {
        Ok(self.alpha[self.lca(*a, *b)].clone())
    }

    fn same(&self, a: &usize, b: &usize) -> Result<bool> {
        Ok(a == b)
    }
}

/// The valuative tree itself.
#[derive(Clone, Copy, Debug, Default)]
pub struct ValuationTree;

impl TreeContext for ValuationTree {
    type Point = Valuation;

    fn root(&self) -> Valuation {
        Valuation::Root
    }

    fn alpha(&self, p: &Valuation) -> Result<ExtRational> {
        p.skewness()
    }

    fn meet_alpha(&self, a: &Valuation, b: &Valuation) -> Result<ExtRational> {
        meet(a, b)?.skewness()
    }

    fn same(&self, a: &Valuation, b: &Valuation) -> Result<bool> {
        Ok(a.key()? == b.key()?)
    }
}

fn finite(x: ExtRational, what: &str) -> Result<Rational> {
    x.as_finite().cloned().ok_or_else(|| CoreError::PreconditionViolated(format!("{what} is not finite")))
}

fn in_upper_closure(v: &Valuation, s: &[Valuation]) -> Result<bool> {
    for w in s {
        if is_le(w, v)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Perturbs a positive measure of zero energy vanishing at its atoms into
/// one of positive energy still vanishing on the upper closure of `s`.
pub fn perturb_certificate(
    phi: &DiscreteMeasure<Valuation>,
    s: &[Valuation],
) -> Result<DiscreteMeasure<Valuation>> {
    let ctx = ValuationTree;
    if phi.is_empty() || !phi.is_positive() {
        return Err(CoreError::PreconditionViolated("a nonzero positive measure is required".into()));
    }
    if !dirichlet(&ctx, phi, phi)?.is_finite() || dirichlet(&ctx, phi, phi)? != ExtRational::zero() {
        return Err(CoreError::PreconditionViolated("the measure must have zero energy".into()));
    }
    for (v, _) in phi.atoms() {
        if value(&ctx, phi, v)? != ExtRational::zero() {
            return Err(CoreError::PreconditionViolated(format!("the potential does not vanish at {v}")));
        }
    }
    let atoms: Vec<Valuation> = phi.atoms().iter().map(|(v, _)| v.clone()).collect();
    // Atoms with no element of S above them.
    for (i, v) in atoms.iter().enumerate() {
        let mut covered = false;
        for w in s {
            if is_le(v, w)? {
                covered = true;
                break;
            }
        }
        if !covered {
            let others: Vec<Valuation> =
                atoms.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, a)| a.clone()).collect();
            return retract_measure(&ctx, phi, |x| crate::valuations::retract(x, &others));
        }
    }
    let mut chosen = None;
    'outer: for (i, v) in atoms.iter().enumerate() {
        let mut above = None;
        for w in s {
            match compare(v, w)? {
                Comparison::Eq => continue 'outer,
                Comparison::Lt if above.is_none() => above = Some(w.clone()),
                _ => {}
            }
        }
        if let Some(w) = above {
            chosen = Some((i, w));
            break;
        }
    }
    let Some((i1, w1)) = chosen else {
        return Err(CoreError::PreconditionViolated("the support lies inside S".into()));
    };
    let v1 = &atoms[i1];
    let a1 = finite(v1.skewness()?, "skewness of the perturbed atom")?;
    let gap1 = if atoms.len() == 1 {
        Rational::one() - &a1
    } else {
        let mut g: Option<Rational> = None;
        for (j, vj) in atoms.iter().enumerate() {
            if j != i1 {
                let m = finite(meet(v1, vj)?.skewness()?, "meet skewness")? - &a1;
                g = Some(g.map_or(m.clone(), |g| g.min(m)));
            }
        }
        g.unwrap()
    };
    let eps = match w1.skewness()?.as_finite() {
        Some(aw) => gap1.min(&a1 - aw),
        None => gap1,
    } / Rational::from_integer(2.into());
    if eps <= Rational::zero() {
        return Err(CoreError::PreconditionViolated(format!("no room to split the atom at {v1}")));
    }
    let lower = point_on_segment(v1, &(&a1 + &eps))?;
    let upper = point_on_segment(&w1, &(&a1 - &eps))?;
    let half = &phi.atoms()[i1].1 / Rational::from_integer(2.into());
    let mut psi = DiscreteMeasure::new();
    for (j, (v, r)) in phi.atoms().iter().enumerate() {
        if j != i1 {
            psi.add_valuation(v.clone(), r.clone())?;
        }
    }
    psi.add_valuation(lower, half.clone())?;
    psi.add_valuation(upper, half)?;
    Ok(psi)
}

/// The thresholds `M_0 > M_1 > ... > M_l` with `M_k = M_{k-1} - 2k / r`.
pub fn extension_thresholds(m0: &Rational, r: &Rational, l: usize) -> Vec<Rational> {
    let mut out = vec![m0.clone()];
    for k in 1..=l {
        let next = &out[k - 1] - Rational::from_integer((2 * k as i64).into()) / r;
        out.push(next);
    }
    out
}

/// Modifies a certificate `φ` vanishing on the upper closure of `s` so that
/// it also vanishes above the `extra` valuations, keeping at least half of
/// its energy.
pub fn extend_certificate(
    phi: &DiscreteMeasure<Valuation>,
    s: &[Valuation],
    extra: &[Valuation],
) -> Result<DiscreteMeasure<Valuation>> {
    let ctx = ValuationTree;
    let mass = phi.total_mass();
    if mass <= Rational::zero() {
        return Err(CoreError::PreconditionViolated("the potential must be positive at the root".into()));
    }
    let phi = phi.scaled(&mass.recip());
    let r = finite(dirichlet(&ctx, &phi, &phi)?, "energy")?;
    if r <= Rational::zero() {
        return Err(CoreError::PreconditionViolated("the energy must be positive".into()));
    }
    let mut m0 = Rational::one();
    for w in s {
        let a = finite(w.skewness()?, "skewness of an element of S")?;
        if a < m0 {
            m0 = a;
        }
    }
    let mut pending: Vec<Valuation> = Vec::new();
    for v in extra {
        if in_upper_closure(v, s)? {
            continue;
        }
        let key = v.key()?;
        let mut dup = false;
        for p in &pending {
            if p.key()? == key {
                dup = true;
            }
        }
        if !dup {
            pending.push(v.clone());
        }
    }
    let ms = extension_thresholds(&m0, &r, pending.len());
    let bound = ms.last().unwrap().clone();
    let mut finite_extra = Vec::with_capacity(pending.len());
    for v in pending {
        match v.skewness()? {
            ExtRational::Finite(a) if a > bound => {
                return Err(CoreError::SkewnessTooHigh { alpha: a.to_string(), bound: bound.to_string() })
            }
            ExtRational::Finite(_) => finite_extra.push(v),
            _ => finite_extra.push(point_on_segment(&v, &bound)?),
        }
    }
    extend_rec(&phi, finite_extra, &ms)
}

fn extend_rec(
    phi: &DiscreteMeasure<Valuation>,
    extra: Vec<Valuation>,
    ms: &[Rational],
) -> Result<DiscreteMeasure<Valuation>> {
    let ctx = ValuationTree;
    let k = extra.len();
    if k == 0 {
        return Ok(phi.clone());
    }
    let m_prev = &ms[k - 1];
    for i in 0..k {
        for j in (i + 1)..k {
            let w = meet(&extra[i], &extra[j])?;
            if finite(w.skewness()?, "meet skewness")? <= *m_prev {
                let mut next: Vec<Valuation> = extra
                    .iter()
                    .enumerate()
                    .filter(|&(t, _)| t != i && t != j)
                    .map(|(_, v)| v.clone())
                    .collect();
                let wk = w.key()?;
                let mut dup = false;
                for v in &next {
                    if v.key()? == wk {
                        dup = true;
                    }
                }
                if !dup {
                    next.push(w);
                }
                return extend_rec(phi, next, ms);
            }
        }
    }
    let mut out = phi.clone();
    for v in &extra {
        let a = finite(v.skewness()?, "skewness")?;
        let phi_v = finite(value(&ctx, phi, v)?, "potential")?;
        let x = phi_v / (m_prev - &a);
        let v0 = point_on_segment(v, m_prev)?;
        out.add_valuation(v.clone(), x.clone())?;
        out.add_valuation(v0, -x)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use vinf_exact::rat;

    fn e(n: i64, d: i64) -> ExtRational {
        ExtRational::finite(n, d)
    }

    fn path_tree() -> FiniteTree {
        let mut t = FiniteTree::new();
        t.add_vertex(0, e(-1, 1)).unwrap();
        t
    }

    #[test]
    fn green_functions() {
        let t = path_tree();
        let mut rho = DiscreteMeasure::new();
        rho.add(1, rat(1, 1));
        assert_eq!(value(&t, &rho, &0).unwrap(), e(1, 1));
        assert_eq!(value(&t, &rho, &1).unwrap(), e(-1, 1));
        let mut half = DiscreteMeasure::new();
        half.add(0, rat(1, 2));
        half.add(1, rat(1, 2));
        assert_eq!(value(&t, &half, &1).unwrap(), e(0, 1));
        assert_eq!(dirichlet(&t, &half, &half).unwrap(), e(1, 2));
    }

    #[test]
    fn laplacian_examples() {
        let t = path_tree();
        let lap = t.laplacian_pl(&[e(1, 1), e(-1, 1)]).unwrap();
        assert_eq!(lap.atoms(), &[(1, rat(1, 1))]);
        let lap = t.laplacian_pl(&[e(1, 1), e(1, 1)]).unwrap();
        assert_eq!(lap.atoms(), &[(0, rat(1, 1))]);
        let lap = t.laplacian_pl(&[e(1, 1), e(0, 1)]).unwrap();
        assert_eq!(lap.mass_at(0), rat(1, 2));
        assert_eq!(lap.mass_at(1), rat(1, 2));
        assert!(t.is_subharmonic(&[e(1, 1), e(-1, 1)]).unwrap());
        assert!(!t.is_subharmonic(&[e(-1, 1), e(1, 1)]).unwrap());
    }

    #[test]
    fn by_parts_examples() {
        let t = path_tree();
        let g_root = [e(1, 1), e(1, 1)];
        let g_v = [e(1, 1), e(-1, 1)];
        assert_eq!(t.dirichlet_by_parts(&g_root, &g_root).unwrap(), rat(1, 1));
        assert_eq!(t.dirichlet_by_parts(&g_v, &g_v).unwrap(), rat(-1, 1));
        assert_eq!(t.dirichlet_by_parts(&g_root, &g_v).unwrap(), rat(1, 1));
    }

    #[test]
    fn subdivision_and_retraction() {
        let mut t = path_tree();
        let mid = t.subdivide(1, rat(0, 1)).unwrap();
        assert_eq!(t.parent(1), Some(mid));
        let hull = t.hull(&[mid]);
        assert_eq!(t.retract(1, &hull), mid);
        let mut rho = DiscreteMeasure::new();
        rho.add(1, rat(1, 1));
        let pushed = retract_measure(&t, &rho, |&v| Ok(t.retract(v, &hull))).unwrap();
        assert_eq!(pushed.atoms(), &[(mid, rat(1, 1))]);
        assert!(t.subdivide(1, rat(3, 1)).is_err());
    }

    #[test]
    fn perturbation_of_a_line_certificate() {
        let v = Valuation::monomial(rat(-1, 1), rat(0, 1)).unwrap();
        let mut phi = DiscreteMeasure::new();
        phi.add_valuation(v.clone(), rat(1, 1)).unwrap();
        let branch = crate::puiseux::branches_at_infinity(&vinf_exact::Poly2::y(), None).unwrap();
        let s = vec![Valuation::curve(branch[0].clone())];
        let psi = perturb_certificate(&phi, &s).unwrap();
        let alphas: Vec<ExtRational> = psi.atoms().iter().map(|(w, _)| w.skewness().unwrap()).collect();
        assert_eq!(alphas, vec![e(1, 2), e(-1, 2)]);
        assert!(dirichlet(&ValuationTree, &psi, &psi).unwrap() > ExtRational::zero());
        assert_eq!(value(&ValuationTree, &psi, &s[0]).unwrap(), ExtRational::zero());
        assert!(matches!(
            perturb_certificate(&phi, &[v]),
            Err(CoreError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn extension_basics() {
        let v = Valuation::monomial(rat(-1, 1), rat(1, 1)).unwrap();
        let mut phi = DiscreteMeasure::new();
        phi.add_valuation(Valuation::Root, rat(1, 2)).unwrap();
        phi.add_valuation(v.clone(), rat(1, 2)).unwrap();
        let s = vec![v];
        let same = extend_certificate(&phi, &s, &[]).unwrap();
        assert_eq!(same.total_mass(), rat(1, 1));
        // r = 1/2, M_0 = -1, M_1 = -5.
        let too_high = Valuation::monomial(rat(0, 1), rat(-1, 1)).unwrap();
        assert!(matches!(
            extend_certificate(&phi, &s, &[too_high]),
            Err(CoreError::SkewnessTooHigh { .. })
        ));
        let deep = Valuation::monomial(rat(5, 1), rat(-1, 1)).unwrap();
        let out = extend_certificate(&phi, &s, &[deep.clone()]).unwrap();
        assert_eq!(value(&ValuationTree, &out, &deep).unwrap(), ExtRational::zero());
        let r2 = dirichlet(&ValuationTree, &out, &out).unwrap();
        assert!(r2 >= e(1, 4));
    }
}
