//! Affine root-system data attached to an acyclic exchange matrix: Cartan
//! matrix, δ, the forms ω_c and E_c, the Coxeter element, tubes and their
//! arcs, ν_c, and c-cluster expansions inside the imaginary wall.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{CorootVec, RootVec, WeightVec};
use crate::linalg;
use crate::seeds::symmetrizers;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineData {
    pub n: usize,
    pub b: Vec<Vec<i64>>,
    /// Cartan matrix: `a_ii = 2`, `a_ij = -|b_ij|`; also the form K(α_i∨, α_j).
    pub a: Vec<Vec<i64>>,
    /// `d[i]` is the integer `d_i⁻¹`, so α_i∨ = d[i]·α_i.
    pub d: Vec<i64>,
    /// c = s_{order[0]} s_{order[1]} ⋯ s_{order[n-1]}, sources first.
    pub order: Vec<usize>,
    pub delta: RootVec,
    pub e_c: Vec<Vec<i64>>,
    pub e_c_inv: Vec<Vec<i64>>,
    /// lcm of the `d[i]`; scales pairings of weights with roots to integers.
    pub d_lcm: i64,
}

fn acyclic_order(b: &[Vec<i64>]) -> Result<Vec<usize>> {
    let n = b.len();
    let mut indeg = vec![0usize; n];
    for i in 0..n {
        for j in 0..n {
            if b[i][j] > 0 {
                indeg[j] += 1;
            }
        }
    }
    // smallest available index first keeps the order deterministic
    let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(&i) = ready.iter().next() {
        ready.remove(&i);
        order.push(i);
        for j in 0..n {
            if b[i][j] > 0 {
                indeg[j] -= 1;
                if indeg[j] == 0 {
                    ready.insert(j);
                }
            }
        }
    }
    if order.len() < n {
        return Err(Error::NotAcyclic);
    }
    Ok(order)
}

fn is_affine_cartan(a: &[Vec<i64>]) -> bool {
    let n = a.len();
    if !linalg::det(a).is_zero() || linalg::rank(a) != n - 1 {
        return false;
    }
    for mask in 1u64..(1u64 << n) - 1 {
        let idx: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let sub: Vec<Vec<i64>> = idx.iter().map(|&i| idx.iter().map(|&j| a[i][j]).collect()).collect();
        if !linalg::det(&sub).is_positive() {
            return false;
        }
    }
    true
}

impl AffineData {
    pub fn new(b: &[Vec<i64>]) -> Result<Self> {
        let n = b.len();
        if n < 2 {
            return Err(Error::NotAffineType);
        }
        let d = symmetrizers(b)?;
        let order = acyclic_order(b)?;
        let a: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 2 } else { -b[i][j].abs() }).collect())
            .collect();
        if !is_affine_cartan(&a) {
            return Err(Error::NotAffineType);
        }
        let ker = linalg::kernel(&a, n);
        let mut delta: Vec<BigInt> = linalg::primitive_integer(&ker[0]);
        if delta.iter().any(|v| v.is_negative()) {
            delta = delta.into_iter().map(|v| -v).collect();
        }
        let delta = RootVec(delta.iter().map(|v| v.to_i64().unwrap()).collect());
        let e_c = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1 } else { b[i][j].min(0) }).collect())
            .collect();
        let e_c_inv = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1 } else { (-b[i][j]).min(0) }).collect())
            .collect();
        let d_lcm = d.iter().fold(1i64, |l, &x| num_integer::lcm(l, x));
        Ok(AffineData { n, b: b.to_vec(), a, d, order, delta, e_c, e_c_inv, d_lcm })
    }

    /// Simple reflection on root coordinates: v − K(α_i∨, v) α_i.
    pub fn reflect_root(&self, i: usize, v: &RootVec) -> RootVec {
        let k: i64 = (0..self.n).map(|j| self.a[i][j] * v[j]).sum();
        let mut out = v.clone();
        out.0[i] -= k;
        out
    }

    /// Dual action of s_i on weight coordinates: ℓ_k − a_ki ℓ_i.
    pub fn reflect_weight(&self, i: usize, l: &WeightVec) -> WeightVec {
        WeightVec((0..self.n).map(|k| l[k] - self.a[k][i] * l[i]).collect())
    }

    /// c^power applied to a root.
    pub fn coxeter_root(&self, v: &RootVec, power: i64) -> RootVec {
        let mut v = v.clone();
        for _ in 0..power.abs() {
            if power > 0 {
                for &i in self.order.iter().rev() {
                    v = self.reflect_root(i, &v);
                }
            } else {
                for &i in &self.order {
                    v = self.reflect_root(i, &v);
                }
            }
        }
        v
    }

    /// c^power applied to a weight through the dual action.
    pub fn coxeter_weight(&self, l: &WeightVec, power: i64) -> WeightVec {
        let mut l = l.clone();
        for _ in 0..power.abs() {
            if power > 0 {
                for &i in self.order.iter().rev() {
                    l = self.reflect_weight(i, &l);
                }
            } else {
                for &i in &self.order {
                    l = self.reflect_weight(i, &l);
                }
            }
        }
        l
    }

    /// Coordinates of ω_c(·, v) as a weight: `B v`.
    pub fn omega_weight(&self, v: &RootVec) -> WeightVec {
        WeightVec(linalg::mat_vec(&self.b, &v.0))
    }

    /// `d_lcm · ⟨λ, φ⟩` for a weight λ and a root φ.
    pub fn pair_weight_root_scaled(&self, l: &WeightVec, r: &RootVec) -> i64 {
        (0..self.n).map(|j| l[j] * r[j] * (self.d_lcm / self.d[j])).sum()
    }

    /// `d_lcm · ω_c(u, v)` for roots u, v.
    pub fn omega_scaled(&self, u: &RootVec, v: &RootVec) -> i64 {
        self.pair_weight_root_scaled(&self.omega_weight(v), u)
    }

    /// Primitive element of Q∨ on the ray of φ.
    pub fn coroot(&self, r: &RootVec) -> CorootVec {
        let v: Vec<BigRational> = (0..self.n)
            .map(|j| BigRational::new(BigInt::from(r[j]), BigInt::from(self.d[j])))
            .collect();
        CorootVec(linalg::primitive_integer(&v).iter().map(|x| x.to_i64().unwrap()).collect())
    }

    /// ν_c(φ) = −E_c(·, φ) for φ with nonnegative coordinates.
    pub fn nu_c(&self, r: &RootVec) -> Result<WeightVec> {
        if !r.is_nonnegative() {
            return Err(Error::NegativeInput);
        }
        Ok(WeightVec(linalg::mat_vec(&self.e_c, &r.0).iter().map(|v| -v).collect()))
    }

    /// Inverse of the linear map φ ↦ −E_c φ. `E_c` is unitriangular in the
    /// Coxeter order, so the inverse is integral.
    pub fn nu_c_inverse(&self, l: &WeightVec) -> RootVec {
        let mut phi = vec![0i64; self.n];
        for &i in &self.order {
            // row i of E_c has nonzero off-diagonal entries only at earlier indices
            let s: i64 = (0..self.n).filter(|&j| j != i).map(|j| self.e_c[i][j] * phi[j]).sum();
            phi[i] = -l[i] - s;
        }
        RootVec(phi)
    }

    /// Positive real roots of height at most `bound`, by closing the simple
    /// roots under simple reflections.
    pub fn positive_real_roots(&self, bound: i64) -> Vec<RootVec> {
        let mut seen: BTreeSet<RootVec> = BTreeSet::new();
        let mut queue: VecDeque<RootVec> = (0..self.n).map(|i| RootVec::unit(self.n, i)).collect();
        for r in &queue {
            seen.insert(r.clone());
        }
        while let Some(r) = queue.pop_front() {
            for i in 0..self.n {
                let s = self.reflect_root(i, &r);
                if s.is_nonnegative() && !s.is_zero() && s.height() <= bound && seen.insert(s.clone()) {
                    queue.push_back(s);
                }
            }
        }
        seen.into_iter().collect()
    }

    pub fn delta_height(&self) -> i64 {
        self.delta.height()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tube {
    pub id: usize,
    /// β_[0], …, β_[k−1] with β_[i+1] = c β_[i].
    pub orbit: Vec<RootVec>,
}

impl Tube {
    pub fn size(&self) -> usize {
        self.orbit.len()
    }

    /// All arcs β_[i,j] with 1 ≤ length < k.
    pub fn arcs(&self) -> Vec<TubeRoot> {
        let k = self.size();
        let mut out = Vec::new();
        for len in 1..k {
            for start in 0..k {
                out.push(TubeRoot { tube: self.id, start, len });
            }
        }
        out
    }
}

/// The arc β_[start, start+len−1] of a tube (indices mod k).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TubeRoot {
    pub tube: usize,
    pub start: usize,
    pub len: usize,
}

impl TubeRoot {
    pub fn support(&self, k: usize) -> Vec<usize> {
        (0..self.len).map(|t| (self.start + t) % k).collect()
    }

    /// The arc shifted by c^s.
    pub fn shifted(&self, s: i64, k: usize) -> TubeRoot {
        let start = ((self.start as i64 + s).rem_euclid(k as i64)) as usize;
        TubeRoot { start, ..*self }
    }
}

impl std::fmt::Display for TubeRoot {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.len == 1 {
            write!(f, "T{}[{}]", self.tube, self.start)
        } else {
            write!(f, "T{}[{},+{}]", self.tube, self.start, self.len)
        }
    }
}

/// Finds the c-orbits of positive real roots with ω_c(δ, β) = 0 whose sum
/// is δ.
pub fn detect_tubes(data: &AffineData, height_bound: i64) -> Result<Vec<Tube>> {
    if height_bound < data.delta_height() {
        return Err(Error::HeightBoundTooSmall(height_bound));
    }
    let roots = data.positive_real_roots(height_bound);
    let mut done: HashSet<RootVec> = HashSet::new();
    let mut orbits: Vec<Vec<RootVec>> = Vec::new();
    let mut truncated = false;
    let max_steps = 2 * data.n + 2;
    for r in roots {
        if done.contains(&r) || data.omega_scaled(&data.delta, &r) != 0 {
            continue;
        }
        let mut orbit = vec![r.clone()];
        let mut cur = data.coxeter_root(&r, 1);
        let mut closed = false;
        for _ in 0..max_steps {
            if cur == r {
                closed = true;
                break;
            }
            if !cur.is_nonnegative() {
                break;
            }
            if cur.height() > height_bound {
                truncated = true;
                break;
            }
            orbit.push(cur.clone());
            cur = data.coxeter_root(&cur, 1);
        }
        for o in &orbit {
            done.insert(o.clone());
        }
        if !closed {
            continue;
        }
        let sum = orbit.iter().fold(RootVec::zero(data.n), |acc, v| &acc + v);
        if sum == data.delta {
            let start = orbit.iter().enumerate().min_by(|a, b| a.1.cmp(b.1)).unwrap().0;
            orbit.rotate_left(start);
            orbits.push(orbit);
        }
    }
    if orbits.is_empty() && data.n >= 3 && truncated {
        return Err(Error::HeightBoundTooSmall(height_bound));
    }
    orbits.sort();
    Ok(orbits.into_iter().enumerate().map(|(id, orbit)| Tube { id, orbit }).collect())
}

pub fn tube_root_vector(t: &Tube, r: &TubeRoot) -> Result<RootVec> {
    let k = t.size();
    if r.len == 0 || r.len >= k {
        return Err(Error::LengthOutOfRange { len: r.len, k });
    }
    if r.tube != t.id {
        return Err(Error::NotMember);
    }
    Ok(r.support(k).iter().fold(RootVec::zero(t.orbit[0].len()), |acc, &i| &acc + &t.orbit[i]))
}

fn support_set(r: &TubeRoot, k: usize) -> BTreeSet<usize> {
    r.support(k).into_iter().collect()
}

/// Nested or spaced (or in different tubes).
pub fn compatible(tubes: &[Tube], r1: &TubeRoot, r2: &TubeRoot) -> bool {
    if r1.tube != r2.tube {
        return true;
    }
    let k = tubes[r1.tube].size();
    let s1 = support_set(r1, k);
    let s2 = support_set(r2, k);
    if s1.is_subset(&s2) || s2.is_subset(&s1) {
        return true;
    }
    let mut grown = s1.clone();
    grown.extend(support_set(&r1.shifted(1, k), k));
    grown.extend(support_set(&r1.shifted(-1, k), k));
    grown.is_disjoint(&s2)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expansion {
    pub m_delta: i64,
    pub arcs: BTreeMap<TubeRoot, i64>,
    /// Reduced per-tube profiles (coefficients on the orbit elements).
    pub profiles: Vec<Vec<i64>>,
}

/// Horizontal slab decomposition of a cyclic profile with a zero entry.
fn slab_arcs(tube: usize, profile: &[i64]) -> BTreeMap<TubeRoot, i64> {
    let k = profile.len();
    let mut out = BTreeMap::new();
    let Some(z) = profile.iter().position(|&v| v == 0) else { return out };
    let seq: Vec<usize> = (1..=k).map(|t| (z + t) % k).collect();
    let top = profile.iter().copied().max().unwrap_or(0);
    for h in 1..=top {
        let mut t = 0;
        while t < k {
            if profile[seq[t]] >= h {
                let s = t;
                while t < k && profile[seq[t]] >= h {
                    t += 1;
                }
                *out.entry(TubeRoot { tube, start: seq[s], len: t - s }).or_insert(0) += 1;
            } else {
                t += 1;
            }
        }
    }
    out
}

/// c-cluster expansion of φ inside the star of δ.
pub fn cluster_expansion_imaginary(data: &AffineData, tubes: &[Tube], phi: &RootVec) -> Result<Expansion> {
    let n = data.n;
    let not_in = || Error::NotInImaginaryWall(phi.to_string());
    if tubes.is_empty() {
        let m = phi[0] / data.delta[0];
        if m < 0 || data.delta.scale(m) != *phi {
            return Err(not_in());
        }
        return Ok(Expansion { m_delta: m, arcs: BTreeMap::new(), profiles: vec![] });
    }
    let cols: Vec<&RootVec> = tubes.iter().flat_map(|t| t.orbit.iter()).collect();
    let a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| cols.iter().map(|c| BigRational::from_integer(BigInt::from(c[i]))).collect())
        .collect();
    let rhs: Vec<BigRational> = phi.0.iter().map(|&v| BigRational::from_integer(BigInt::from(v))).collect();
    let sol = linalg::solve(&a, &rhs).ok_or_else(not_in)?;
    let a_int: Vec<Vec<i64>> = (0..n).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
    if linalg::rank(&a_int) != cols.len() - (tubes.len() - 1) {
        return Err(Error::IdentityViolated(
            "orbit elements have dependencies beyond equal orbit sums".into(),
        ));
    }
    let mut offset = 0;
    let mut m_delta = BigRational::zero();
    let mut profiles = Vec::new();
    let mut arcs = BTreeMap::new();
    for t in tubes {
        let p = &sol[offset..offset + t.size()];
        offset += t.size();
        let min = p.iter().min().unwrap().clone();
        m_delta += &min;
        let mut prof = Vec::with_capacity(t.size());
        for v in p {
            let r = v - &min;
            if !r.is_integer() {
                return Err(not_in());
            }
            prof.push(r.to_integer().to_i64().unwrap());
        }
        arcs.extend(slab_arcs(t.id, &prof));
        profiles.push(prof);
    }
    if !m_delta.is_integer() || m_delta.is_negative() {
        return Err(not_in());
    }
    Ok(Expansion { m_delta: m_delta.to_integer().to_i64().unwrap(), arcs, profiles })
}

/// Reassemble φ from an expansion.
pub fn expansion_vector(data: &AffineData, tubes: &[Tube], e: &Expansion) -> RootVec {
    let mut v = data.delta.scale(e.m_delta);
    for (r, &m) in &e.arcs {
        v = &v + &tube_root_vector(&tubes[r.tube], r).unwrap().scale(m);
    }
    v
}

/// Whether φ lies in the real cone spanned by the orbit elements of all
/// tubes (the ray of δ when there are none). Lattice points of this cone
/// are exactly the ν_c-preimages of lattice points of the imaginary wall.
pub fn in_imaginary_cone(data: &AffineData, tubes: &[Tube], phi: &RootVec) -> bool {
    let n = data.n;
    if tubes.is_empty() {
        let m = BigRational::new(phi[0].into(), data.delta[0].into());
        return !m.is_negative()
            && (0..n).all(|i| BigRational::from_integer(phi[i].into()) == &m * BigInt::from(data.delta[i]));
    }
    let cols: Vec<&RootVec> = tubes.iter().flat_map(|t| t.orbit.iter()).collect();
    let a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| cols.iter().map(|c| BigRational::from_integer(BigInt::from(c[i]))).collect())
        .collect();
    let rhs: Vec<BigRational> = phi.0.iter().map(|&v| BigRational::from_integer(BigInt::from(v))).collect();
    let Some(sol) = linalg::solve(&a, &rhs) else { return false };
    let mut offset = 0;
    let mut m = BigRational::zero();
    for t in tubes {
        let p = &sol[offset..offset + t.size()];
        offset += t.size();
        m += p.iter().min().unwrap();
    }
    !m.is_negative()
}

/// The word of η_{12⋯n}: mutations in reverse source-to-sink order, so that
/// its restriction to the imaginary wall is the action of c.
pub fn symmetry_word(data: &AffineData) -> Vec<usize> {
    data.order.iter().rev().copied().collect()
}

/// lcm of the tube sizes (1 without tubes).
pub fn orbit_lcm(tubes: &[Tube]) -> usize {
    tubes.iter().fold(1usize, |l, t| num_integer::lcm(l, t.size()))
}

pub fn is_maximal_compatible(tubes: &[Tube], t: &Tube, j: &[TubeRoot]) -> bool {
    let uniq: BTreeSet<&TubeRoot> = j.iter().collect();
    uniq.len() == t.size() - 1
        && j.iter().all(|r| r.tube == t.id && r.len >= 1 && r.len < t.size())
        && j.iter().all(|a| j.iter().all(|b| compatible(tubes, a, b)))
}

/// The unique arc γ' ≠ γ completing J \ {γ} to a maximal compatible set.
pub fn exchange_partner(tubes: &[Tube], t: &Tube, j: &[TubeRoot], gamma: &TubeRoot) -> Result<TubeRoot> {
    if !is_maximal_compatible(tubes, t, j) {
        return Err(Error::NotMaximal);
    }
    if !j.contains(gamma) {
        return Err(Error::NotMember);
    }
    let rest: Vec<&TubeRoot> = j.iter().filter(|r| *r != gamma).collect();
    let hits: Vec<TubeRoot> = t
        .arcs()
        .into_iter()
        .filter(|a| a != gamma && !rest.contains(&a) && rest.iter().all(|r| compatible(tubes, a, r)))
        .collect();
    match hits.as_slice() {
        [one] => Ok(*one),
        _ => Err(Error::IdentityViolated(format!("{} exchange candidates for {gamma}", hits.len()))),
    }
}

/// A possibly empty run of consecutive orbit positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Segment {
    pub start: usize,
    pub len: usize,
}

impl Segment {
    pub fn root(&self, tube: usize) -> Option<TubeRoot> {
        (self.len > 0).then_some(TubeRoot { tube, start: self.start, len: self.len })
    }
}

/// Local configuration around γ ∈ J used by the generalized seed and the
/// exchange identities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExchangeShape {
    /// γ = δ − β with β' the element of Supp γ covered by no smaller arc;
    /// φ runs strictly from β to β', φ' strictly from β' back to β.
    Maximal { beta: usize, beta_p: usize, phi: Segment, phi_p: Segment },
    /// φ is the next larger arc; Supp φ minus {β, β'} is φ' | φ'' | φ''' in
    /// increasing order; `gamma_left` says whether γ = φ' + β + φ''.
    Nested {
        phi: TubeRoot,
        beta: usize,
        beta_p: usize,
        pieces: [Segment; 3],
        gamma_left: bool,
    },
}

fn uncovered(k: usize, j: &[TubeRoot], a: &TubeRoot) -> Result<usize> {
    let sa = support_set(a, k);
    let mut covered = BTreeSet::new();
    for r in j {
        if r == a {
            continue;
        }
        let s = support_set(r, k);
        if s.is_subset(&sa) {
            covered.extend(s);
        }
    }
    let free: Vec<usize> = sa.difference(&covered).copied().collect();
    match free.as_slice() {
        [one] => Ok(*one),
        _ => Err(Error::NotMaximal),
    }
}

/// Offset of position `p` inside an arc starting at `start`.
fn offset_in(start: usize, p: usize, k: usize) -> usize {
    (p + k - start) % k
}

pub fn exchange_shape(t: &Tube, j: &[TubeRoot], gamma: &TubeRoot) -> Result<ExchangeShape> {
    let k = t.size();
    if !j.contains(gamma) {
        return Err(Error::NotMember);
    }
    if gamma.len == k - 1 {
        let beta = (gamma.start + k - 1) % k;
        let beta_p = uncovered(k, j, gamma)?;
        let l = offset_in(beta, beta_p, k);
        let phi = Segment { start: (beta + 1) % k, len: l - 1 };
        let phi_p = Segment { start: (beta_p + 1) % k, len: k - l - 1 };
        return Ok(ExchangeShape::Maximal { beta, beta_p, phi, phi_p });
    }
    let sg = support_set(gamma, k);
    let parent = j
        .iter()
        .filter(|r| *r != gamma && sg.is_subset(&support_set(r, k)))
        .min_by_key(|r| r.len)
        .ok_or(Error::NotMaximal)?;
    let u_phi = uncovered(k, j, parent)?;
    let u_gamma = uncovered(k, j, gamma)?;
    let (o1, o2) = (offset_in(parent.start, u_phi, k), offset_in(parent.start, u_gamma, k));
    let (ob, obp) = if o1 < o2 { (o1, o2) } else { (o2, o1) };
    let at = |o: usize| (parent.start + o) % k;
    let pieces = [
        Segment { start: parent.start, len: ob },
        Segment { start: at(ob + 1), len: obp - ob - 1 },
        Segment { start: at(obp + 1), len: parent.len - obp - 1 },
    ];
    let gamma_left = sg.contains(&at(ob));
    Ok(ExchangeShape::Nested { phi: *parent, beta: at(ob), beta_p: at(obp), pieces, gamma_left })
}
