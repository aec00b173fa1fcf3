//! Normalized generalized cluster algebras over a tropical semifield, the
//! generalized seeds attached to maximal compatible arc sets of tubes, and
//! the comparison map into theta functions.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::affine::{self, ExchangeShape, Segment, Tube, TubeRoot};
use crate::error::{Error, Result};
use crate::lattice::RootVec;
use crate::poly::{LaurentPoly, PolyJson, VarContext};
use crate::seeds::mutate_rows;
use crate::theta::ThetaEngine;

/// A Laurent monomial in the tropical variables; multiplication adds
/// exponents and ⊕ takes the componentwise minimum.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TropMonomial(pub Vec<i64>);

impl TropMonomial {
    pub fn one(m: usize) -> Self {
        TropMonomial(vec![0; m])
    }

    pub fn var(m: usize, i: usize) -> Self {
        let mut v = vec![0; m];
        v[i] = 1;
        TropMonomial(v)
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, o: &Self) -> Self {
        TropMonomial(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn div(&self, o: &Self) -> Self {
        TropMonomial(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    pub fn pow(&self, k: i64) -> Self {
        TropMonomial(self.0.iter().map(|a| a * k).collect())
    }
}

pub fn trop_add(a: &TropMonomial, b: &TropMonomial) -> TropMonomial {
    TropMonomial(a.0.iter().zip(&b.0).map(|(x, y)| *x.min(y)).collect())
}

/// Which tubes take part in a seed and where their tropical variables live.
/// The variables are `z_β` for every orbit element of every listed tube,
/// followed by `z_*`.
#[derive(Clone, Debug)]
pub struct GcaLayout {
    pub tubes: Vec<Tube>,
    pub members: Vec<usize>,
    offsets: BTreeMap<usize, usize>,
    m: usize,
}

impl GcaLayout {
    pub fn new(tubes: &[Tube], members: &[usize]) -> Result<Arc<Self>> {
        let mut offsets = BTreeMap::new();
        let mut m = 0;
        for &o in members {
            let t = tubes.get(o).ok_or(Error::IndexOutOfRange { index: o, n: tubes.len() })?;
            if offsets.insert(o, m).is_some() {
                return Err(Error::Invalid(format!("tube {o} listed twice")));
            }
            m += t.size();
        }
        Ok(Arc::new(GcaLayout { tubes: tubes.to_vec(), members: members.to_vec(), offsets, m: m + 1 }))
    }

    /// Number of tropical variables including `z_*`.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn z(&self, tube: usize, pos: usize) -> usize {
        self.offsets[&tube] + pos
    }

    pub fn z_star(&self) -> usize {
        self.m - 1
    }

    pub fn z_names(&self) -> Vec<String> {
        let mut out = Vec::new();
        for &o in &self.members {
            for i in 0..self.tubes[o].size() {
                out.push(format!("z{o}_{i}"));
            }
        }
        out.push("zs".into());
        out
    }

    /// Orbit element and tube of a non-star tropical variable.
    pub fn z_owner(&self, idx: usize) -> Option<(usize, usize)> {
        self.offsets
            .iter()
            .find(|(o, off)| idx >= **off && idx < **off + self.tubes[**o].size())
            .map(|(o, off)| (*o, idx - off))
    }

    /// `z^φ` for an arc or a segment: the product over its support.
    fn z_segment(&self, tube: usize, s: &Segment) -> TropMonomial {
        let k = self.tubes[tube].size();
        let mut v = TropMonomial::one(self.m);
        for t in 0..s.len {
            v.0[self.z(tube, (s.start + t) % k)] += 1;
        }
        v
    }

    fn z_pos(&self, tube: usize, pos: usize) -> TropMonomial {
        TropMonomial::var(self.m, self.z(tube, pos))
    }

    fn total_arcs(&self) -> usize {
        self.members.iter().map(|&o| self.tubes[o].size() - 1).sum()
    }

    pub fn tube_of(&self, o: usize) -> &Tube {
        &self.tubes[o]
    }
}

/// A normalized generalized seed whose cluster is indexed by arcs.
#[derive(Clone, Debug)]
pub struct GcaSeed {
    pub layout: Arc<GcaLayout>,
    pub labels: Vec<TubeRoot>,
    pub x: Vec<LaurentPoly>,
    pub p: Vec<Vec<TropMonomial>>,
    pub b: Vec<Vec<i64>>,
    pub d: Vec<i64>,
}

fn context_for(layout: &GcaLayout, n: usize) -> Result<Arc<VarContext>> {
    let names = (1..=n).map(|i| format!("x{i}")).chain(layout.z_names()).collect();
    VarContext::new(n, layout.m(), names)
}

/// Builds the seed of a maximal compatible set `labels` spread over the
/// tubes of `layout`: one column of `B` and one coefficient tuple per arc.
pub fn build_seed(layout: &Arc<GcaLayout>, labels: Vec<TubeRoot>) -> Result<GcaSeed> {
    for &o in &layout.members {
        let t = layout.tube_of(o);
        let jo: Vec<TubeRoot> = labels.iter().filter(|r| r.tube == o).copied().collect();
        if !affine::is_maximal_compatible(&layout.tubes, t, &jo) {
            return Err(Error::NotMaximal);
        }
    }
    if labels.len() != layout.total_arcs() {
        return Err(Error::NotMaximal);
    }
    let n = labels.len();
    let index: HashMap<TubeRoot, usize> = labels.iter().enumerate().map(|(i, r)| (*r, i)).collect();
    let mut b = vec![vec![0i64; n]; n];
    let mut p = Vec::with_capacity(n);
    let mut d = Vec::with_capacity(n);
    for (col, gamma) in labels.iter().enumerate() {
        let o = gamma.tube;
        let t = layout.tube_of(o);
        let jo: Vec<TubeRoot> = labels.iter().filter(|r| r.tube == o).copied().collect();
        let mut set = |s: &Segment, v: i64| {
            if let Some(r) = s.root(o) {
                b[index[&r]][col] = v;
            }
        };
        match affine::exchange_shape(t, &jo, gamma)? {
            ExchangeShape::Maximal { beta, beta_p, phi, phi_p } => {
                set(&phi, 2);
                set(&phi_p, -2);
                d.push(2);
                p.push(vec![
                    layout.z_segment(o, &phi_p).mul(&layout.z_pos(o, beta)),
                    TropMonomial::var(layout.m(), layout.z_star()),
                    layout.z_segment(o, &phi).mul(&layout.z_pos(o, beta_p)),
                ]);
            }
            ExchangeShape::Nested { phi, beta_p, pieces, gamma_left, .. } => {
                let sign = if gamma_left { 1 } else { -1 };
                set(&Segment { start: phi.start, len: phi.len }, -sign);
                set(&pieces[0], sign);
                set(&pieces[1], -sign);
                set(&pieces[2], sign);
                d.push(1);
                let z = layout.z_segment(o, &pieces[1]).mul(&layout.z_pos(o, beta_p));
                let one = TropMonomial::one(layout.m());
                p.push(if gamma_left { vec![z, one] } else { vec![one, z] });
            }
        }
    }
    let ctx = context_for(layout, n)?;
    let x = (0..n).map(|i| LaurentPoly::x(&ctx, i)).collect();
    Ok(GcaSeed { layout: layout.clone(), labels, x, p, b, d })
}

/// The seed of one tube for a maximal compatible set `j` of its arcs.
pub fn build_tube_seed(tubes: &[Tube], tube: usize, j: &[TubeRoot]) -> Result<GcaSeed> {
    let layout = GcaLayout::new(tubes, &[tube])?;
    build_seed(&layout, j.to_vec())
}

/// The block-diagonal seed over all tubes, one maximal set per tube.
pub fn build_product_seed(tubes: &[Tube], js: &[Vec<TubeRoot>]) -> Result<GcaSeed> {
    if js.len() != tubes.len() {
        return Err(Error::Invalid(format!("{} arc sets for {} tubes", js.len(), tubes.len())));
    }
    let members: Vec<usize> = (0..tubes.len()).collect();
    let layout = GcaLayout::new(tubes, &members)?;
    build_seed(&layout, js.concat())
}

/// A fixed maximal compatible set of a tube: the arcs β_[0, j] for j < k−1.
pub fn fan_set(t: &Tube) -> Vec<TubeRoot> {
    (1..t.size()).map(|len| TubeRoot { tube: t.id, start: 0, len }).collect()
}

fn pos(v: i64) -> i64 {
    v.max(0)
}

fn exact_quot(a: i64, b: i64) -> i64 {
    assert_eq!(a % b, 0, "exponent {a}/{b} is not integral");
    a / b
}

impl GcaSeed {
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn ctx(&self) -> &Arc<VarContext> {
        self.x[0].ctx()
    }

    /// `z^v` as an element of the coefficient slots of the cluster context.
    pub fn z_monomial(&self, t: &TropMonomial) -> LaurentPoly {
        LaurentPoly::xu_monomial(self.ctx(), &vec![0; self.n()], &t.0, 1)
    }

    /// Exponent of `x_ψ` in the ℓ-th summand of the exchange polynomial at `k`.
    fn summand_exponents(&self, k: usize, l: i64) -> Vec<i64> {
        let dk = self.d[k];
        (0..self.n()).map(|psi| pos(self.b[psi][k]) - exact_quot(l * self.b[psi][k], dk)).collect()
    }

    /// Σ_ℓ p_{k;ℓ} Π x_ψ^{[b_ψk]_+ − ℓ b_ψk/d_k}, over the current cluster.
    pub fn exchange_polynomial(&self, k: usize) -> Result<LaurentPoly> {
        let mut out = LaurentPoly::zero(self.ctx());
        for l in 0..=self.d[k] {
            let mut term = self.z_monomial(&self.p[k][l as usize]);
            for (psi, e) in self.summand_exponents(k, l).into_iter().enumerate() {
                if e != 0 {
                    term = &term * &self.x[psi].pow(e)?;
                }
            }
            out = &out + &term;
        }
        Ok(out)
    }

    pub fn is_normalized(&self) -> bool {
        self.p.iter().all(|pk| trop_add(&pk[0], &pk[pk.len() - 1]).is_one())
    }

    /// Column γ divisible by d_γ and the halved matrix skew-symmetric.
    pub fn halved_skew_symmetric(&self) -> bool {
        let n = self.n();
        (0..n).all(|j| (0..n).all(|i| self.b[i][j] % self.d[j] == 0))
            && (0..n).all(|i| (0..n).all(|j| self.b[i][j] / self.d[j] == -(self.b[j][i] / self.d[i])))
    }

    /// Canonical form ignoring the indexing: the cluster sorted by printed
    /// form, with `B`, `d` and `p` permuted alongside.
    pub fn key(&self) -> SeedKey {
        let mut order: Vec<usize> = (0..self.n()).collect();
        let names: Vec<String> = self.x.iter().map(|p| p.to_string()).collect();
        order.sort_by(|a, b| names[*a].cmp(&names[*b]));
        SeedKey {
            cluster: order.iter().map(|&i| names[i].clone()).collect(),
            b: order.iter().map(|&i| order.iter().map(|&j| self.b[i][j]).collect()).collect(),
            p: order.iter().map(|&i| self.p[i].clone()).collect(),
        }
    }

    /// Labels, `B` and `p` after reordering by label; used to compare seeds
    /// that should coincide under the arc indexing.
    pub fn by_label(&self) -> BTreeMap<TubeRoot, (Vec<(TubeRoot, i64)>, Vec<TropMonomial>)> {
        (0..self.n())
            .map(|j| {
                let col = (0..self.n()).map(|i| (self.labels[i], self.b[i][j])).filter(|e| e.1 != 0).collect();
                (self.labels[j], (col, self.p[j].clone()))
            })
            .collect()
    }

    pub fn to_json(&self) -> SeedJson {
        SeedJson {
            labels: self.labels.iter().map(|r| r.to_string()).collect(),
            b: self.b.clone(),
            d: self.d.clone(),
            p: self.p.clone(),
            x: self.x.iter().map(|p| p.to_json()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SeedKey {
    pub cluster: Vec<String>,
    pub b: Vec<Vec<i64>>,
    pub p: Vec<Vec<TropMonomial>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedJson {
    pub labels: Vec<String>,
    pub b: Vec<Vec<i64>>,
    pub d: Vec<i64>,
    pub p: Vec<Vec<TropMonomial>>,
    pub x: Vec<PolyJson>,
}

/// Mutation in direction `k`. The arc label of `k` moves to its exchange
/// partner.
pub fn gca_mutate(s: &GcaSeed, k: usize) -> Result<GcaSeed> {
    let n = s.n();
    if k >= n {
        return Err(Error::IndexOutOfRange { index: k, n });
    }
    let xk = s.exchange_polynomial(k)?.exact_div(&s.x[k])?;
    let mut x = s.x.clone();
    x[k] = xk;

    let dk = s.d[k];
    let (pk0, pkd) = (&s.p[k][0], &s.p[k][dk as usize]);
    let mut p = Vec::with_capacity(n);
    for j in 0..n {
        if j == k {
            p.push(s.p[k].iter().rev().cloned().collect());
            continue;
        }
        let dj = s.d[j];
        let bkj = s.b[k][j];
        let den = trop_add(
            &s.p[j][0].mul(&pk0.pow(pos(bkj))),
            &s.p[j][dj as usize].mul(&pkd.pow(pos(-bkj))),
        );
        let row = (0..=dj)
            .map(|l| {
                s.p[j][l as usize]
                    .mul(&pk0.pow(exact_quot((dj - l) * pos(bkj), dj)))
                    .mul(&pkd.pow(exact_quot(l * pos(-bkj), dj)))
                    .div(&den)
            })
            .collect();
        p.push(row);
    }

    let gamma = s.labels[k];
    let t = s.layout.tube_of(gamma.tube);
    let jo: Vec<TubeRoot> = s.labels.iter().filter(|r| r.tube == gamma.tube).copied().collect();
    let mut labels = s.labels.clone();
    labels[k] = affine::exchange_partner(&s.layout.tubes, t, &jo, &gamma)?;

    Ok(GcaSeed { layout: s.layout.clone(), labels, x, p, b: mutate_rows(&s.b, k), d: s.d.clone() })
}

/// p'_{j;ℓ}/p'_{j;0} = p_{j;ℓ} p_{k;d_k}^{(ℓ/d)[−b_kj]_+} / (p_{j;0} p_{k;0}^{(ℓ/d)[b_kj]_+})
/// for j ≠ k, where `d` is `d_j` or `d_k` according to `use_dk`. Fractional
/// exponents are compared after clearing the common denominator.
pub fn ratio_identity_holds(old: &GcaSeed, new: &GcaSeed, k: usize, use_dk: bool) -> bool {
    let dk = old.d[k];
    let (pk0, pkd) = (&old.p[k][0], &old.p[k][dk as usize]);
    (0..old.n()).filter(|&j| j != k).all(|j| {
        let dj = old.d[j];
        let den = if use_dk { dk } else { dj };
        let bkj = old.b[k][j];
        (0..=dj).all(|l| {
            let lhs = new.p[j][l as usize].div(&new.p[j][0]).pow(den);
            let rhs = old.p[j][l as usize]
                .div(&old.p[j][0])
                .pow(den)
                .mul(&pkd.pow(l * pos(-bkj)))
                .div(&pk0.pow(l * pos(bkj)));
            lhs == rhs
        })
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub from: usize,
    pub to: usize,
    pub direction: usize,
    pub removed: TubeRoot,
    pub added: TubeRoot,
}

#[derive(Clone, Debug)]
pub struct ExchangeGraph {
    pub vertices: Vec<GcaSeed>,
    pub edges: Vec<GraphEdge>,
}

impl ExchangeGraph {
    /// Every vertex has exactly one edge per cluster index.
    pub fn is_regular(&self) -> bool {
        let n = self.vertices.first().map_or(0, |s| s.n());
        let mut deg = vec![0usize; self.vertices.len()];
        for e in &self.edges {
            deg[e.from] += 1;
        }
        deg.iter().all(|&v| v == n)
    }

    /// Sorted arc sets of all vertices.
    pub fn label_sets(&self) -> Vec<Vec<TubeRoot>> {
        self.vertices
            .iter()
            .map(|s| {
                let mut l = s.labels.clone();
                l.sort();
                l
            })
            .collect()
    }
}

/// Breadth-first search over mutations. Stops with `BudgetExceeded` once more
/// than `budget` distinct seeds have been found.
pub fn enumerate_exchange_graph(s0: &GcaSeed, budget: usize) -> Result<ExchangeGraph> {
    let mut seen: HashMap<SeedKey, usize> = HashMap::new();
    let mut vertices = vec![s0.clone()];
    let mut edges = Vec::new();
    seen.insert(s0.key(), 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        for k in 0..s0.n() {
            let next = gca_mutate(&vertices[v], k)?;
            let key = next.key();
            let to = match seen.get(&key) {
                Some(&i) => i,
                None => {
                    if vertices.len() >= budget {
                        return Err(Error::BudgetExceeded(budget));
                    }
                    let i = vertices.len();
                    log::debug!("gca seed {i}: {:?}", next.labels);
                    seen.insert(key, i);
                    vertices.push(next.clone());
                    queue.push_back(i);
                    i
                }
            };
            edges.push(GraphEdge {
                from: v,
                to,
                direction: k,
                removed: vertices[v].labels[k],
                added: next.labels[k],
            });
        }
    }
    Ok(ExchangeGraph { vertices, edges })
}

/// All maximal compatible arc sets of one tube by brute force over subsets.
pub fn maximal_compatible_sets(tubes: &[Tube], t: &Tube) -> Vec<Vec<TubeRoot>> {
    let arcs = t.arcs();
    let want = t.size() - 1;
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(
        tubes: &[Tube],
        arcs: &[TubeRoot],
        from: usize,
        want: usize,
        cur: &mut Vec<TubeRoot>,
        out: &mut Vec<Vec<TubeRoot>>,
    ) {
        if cur.len() == want {
            out.push(cur.clone());
            return;
        }
        for i in from..arcs.len() {
            if cur.iter().all(|r| affine::compatible(tubes, r, &arcs[i])) {
                cur.push(arcs[i]);
                rec(tubes, arcs, i + 1, want, cur, out);
                cur.pop();
            }
        }
    }
    rec(tubes, &arcs, 0, want, &mut cur, &mut out);
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GcaReport {
    pub vertices: usize,
    pub edges: usize,
    pub expected_vertices: usize,
    pub regular: bool,
    pub j_mut_checked: usize,
    pub relations_checked: usize,
    pub specialized_checked: usize,
    pub laurent_checked: usize,
}

/// Every mutation edge lands on the seed built from the exchanged arc set.
pub fn j_mut_check(g: &ExchangeGraph) -> Result<usize> {
    let mut count = 0;
    for e in &g.edges {
        let s = &g.vertices[e.from];
        let mutated = gca_mutate(s, e.direction)?;
        let built = build_seed(&s.layout, mutated.labels.clone())?;
        if mutated.by_label() != built.by_label() {
            return Err(Error::IdentityViolated(format!(
                "mutating {:?} at {} does not give the seed of {:?}",
                s.labels, e.removed, mutated.labels
            )));
        }
        if !mutated.is_normalized() || !mutated.halved_skew_symmetric() {
            return Err(Error::IdentityViolated(format!("seed {:?} lost normalization", mutated.labels)));
        }
        count += 1;
    }
    Ok(count)
}

/// Images of the tropical variables: `z_β ↦ y^β` (or 1 when `specialize`)
/// and `z_* ↦ ϑ_{ν_c(δ)}`.
fn z_images(engine: &ThetaEngine, layout: &GcaLayout, specialize: bool) -> Result<Vec<LaurentPoly>> {
    let mut out = Vec::with_capacity(layout.m());
    for idx in 0..layout.m() {
        if idx == layout.z_star() {
            out.push(engine.theta_delta()?.poly);
        } else if specialize {
            out.push(engine.one());
        } else {
            let (o, i) = layout.z_owner(idx).expect("owned tropical variable");
            out.push(engine.y_monomial(&engine.tubes[o].orbit[i]));
        }
    }
    Ok(out)
}

fn t_o_monomial(images: &[LaurentPoly], z: &TropMonomial, one: &LaurentPoly) -> Result<LaurentPoly> {
    let mut out = one.clone();
    for (i, &e) in z.0.iter().enumerate() {
        if e != 0 {
            out = &out * &images[i].pow(e)?;
        }
    }
    Ok(out)
}

fn set_y_to_one(engine: &ThetaEngine, p: &LaurentPoly) -> Result<LaurentPoly> {
    let n = engine.n();
    let ctx = engine.ctx();
    let images: Vec<LaurentPoly> =
        (0..2 * n).map(|i| if i < n { LaurentPoly::x(ctx, i) } else { LaurentPoly::one(ctx) }).collect();
    p.substitute(&images)
}

/// Pushes every exchange relation of the graph through `t_o` and checks the
/// results as Laurent identities among theta functions. With `specialize`,
/// `z_β ↦ 1` and every theta function is taken with `y = 1`.
pub fn t_o_check(engine: &ThetaEngine, g: &ExchangeGraph, specialize: bool) -> Result<usize> {
    let Some(s0) = g.vertices.first() else { return Ok(0) };
    let images = z_images(engine, &s0.layout, specialize)?;
    let mut thetas: HashMap<TubeRoot, LaurentPoly> = HashMap::new();
    let mut theta = |r: &TubeRoot| -> Result<LaurentPoly> {
        if let Some(p) = thetas.get(r) {
            return Ok(p.clone());
        }
        let mut p = engine.theta_tube_root(r)?.poly;
        if specialize {
            p = set_y_to_one(engine, &p)?;
        }
        thetas.insert(*r, p.clone());
        Ok(p)
    };
    let images: Vec<LaurentPoly> = if specialize {
        images.iter().map(|p| set_y_to_one(engine, p)).collect::<Result<_>>()?
    } else {
        images
    };
    let one = engine.one();
    let mut count = 0;
    for e in &g.edges {
        let s = &g.vertices[e.from];
        let k = e.direction;
        let lhs = &theta(&e.removed)? * &theta(&e.added)?;
        let mut rhs = LaurentPoly::zero(engine.ctx());
        for l in 0..=s.d[k] {
            let mut term = t_o_monomial(&images, &s.p[k][l as usize], &one)?;
            for (psi, ex) in s.summand_exponents(k, l).into_iter().enumerate() {
                if ex != 0 {
                    term = &term * &theta(&s.labels[psi])?.pow(ex)?;
                }
            }
            rhs = &rhs + &term;
        }
        if lhs != rhs {
            return Err(Error::IdentityViolated(format!(
                "t_o of the relation for {} ↔ {} in {:?}: lhs − rhs = {}",
                e.removed,
                e.added,
                s.labels,
                &lhs - &rhs
            )));
        }
        count += 1;
    }
    Ok(count)
}

/// The same arc must carry the same cluster variable in every seed.
pub fn labels_consistent(g: &ExchangeGraph) -> Result<usize> {
    let mut by_label: HashMap<TubeRoot, &LaurentPoly> = HashMap::new();
    for s in &g.vertices {
        for (r, x) in s.labels.iter().zip(&s.x) {
            match by_label.get(r) {
                Some(prev) if *prev != x => {
                    return Err(Error::IdentityViolated(format!("arc {r} carries two cluster variables")))
                }
                _ => {
                    by_label.insert(*r, x);
                }
            }
        }
    }
    let distinct: BTreeSet<String> = by_label.values().map(|p| p.to_string()).collect();
    if distinct.len() != by_label.len() {
        return Err(Error::IdentityViolated("two arcs share a cluster variable".into()));
    }
    Ok(by_label.len())
}

/// Exchange graph of one tube seeded at [`fan_set`], with every check run.
pub fn verify_tube(engine: &ThetaEngine, tube: usize, budget: usize) -> Result<GcaReport> {
    let t = engine.tubes.get(tube).ok_or(Error::IndexOutOfRange { index: tube, n: engine.tubes.len() })?;
    let s0 = build_tube_seed(&engine.tubes, tube, &fan_set(t))?;
    let g = enumerate_exchange_graph(&s0, budget)?;
    let expected = maximal_compatible_sets(&engine.tubes, t).len();
    verify_graph(engine, &g, expected)
}

pub fn verify_graph(engine: &ThetaEngine, g: &ExchangeGraph, expected: usize) -> Result<GcaReport> {
    let report = GcaReport {
        vertices: g.vertices.len(),
        edges: g.edges.len(),
        expected_vertices: expected,
        regular: g.is_regular(),
        j_mut_checked: j_mut_check(g)?,
        relations_checked: t_o_check(engine, g, false)?,
        specialized_checked: t_o_check(engine, g, true)?,
        laurent_checked: labels_consistent(g)?,
    };
    if report.vertices != expected || !report.regular {
        return Err(Error::IdentityViolated(format!(
            "exchange graph has {} vertices (expected {expected}), regular = {}",
            report.vertices, report.regular
        )));
    }
    Ok(report)
}

impl fmt::Display for TropMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|e| e.to_string()).collect();
        write!(f, "z^({})", parts.join(","))
    }
}

/// `Σ_β z_β` exponent of an arc, for reports.
pub fn arc_weight(layout: &GcaLayout, r: &TubeRoot) -> RootVec {
    let t = layout.tube_of(r.tube);
    (0..r.len).fold(RootVec::zero(t.orbit[0].len()), |acc, i| &acc + &t.orbit[(r.start + i) % t.size()])
}
