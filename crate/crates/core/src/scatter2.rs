//! Rank-2 cluster scattering diagrams with principal coefficients, completed
//! order by order, and theta functions from broken lines.
//!
//! Points of the ambient plane are weights written in the fundamental-weight
//! basis; wall normals are positive roots, paired with weights through their
//! primitive coroots. A wall-crossing sends `x^λ ↦ x^λ f^{⟨λ,n⟩}` and fixes
//! `y`, where `n = ±m∨` is chosen with `⟨v,n⟩ < 0` for the crossing velocity
//! `v`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{RootVec, WeightVec};
use crate::linalg::gcd_i64;
use crate::poly::{LaurentPoly, VarContext};
use crate::seeds::symmetrizers;

type Q = BigRational;

fn q(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// Power series in `ŷ1, ŷ2` truncated above total degree `order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series2 {
    order: usize,
    c: BTreeMap<(usize, usize), Q>,
}

impl Series2 {
    pub fn one(order: usize) -> Self {
        Self::monomial(order, (0, 0), Q::one())
    }

    pub fn zero(order: usize) -> Self {
        Series2 { order, c: BTreeMap::new() }
    }

    pub fn monomial(order: usize, e: (usize, usize), coef: Q) -> Self {
        let mut s = Self::zero(order);
        if e.0 + e.1 <= order && !coef.is_zero() {
            s.c.insert(e, coef);
        }
        s
    }

    pub fn coeff(&self, e: (usize, usize)) -> Q {
        self.c.get(&e).cloned().unwrap_or_else(Q::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(usize, usize), &Q)> {
        self.c.iter()
    }

    pub fn is_one(&self) -> bool {
        *self == Self::one(self.order)
    }

    fn add_term(&mut self, e: (usize, usize), v: Q) {
        if e.0 + e.1 > self.order || v.is_zero() {
            return;
        }
        let slot = self.c.entry(e).or_insert_with(Q::zero);
        *slot += v;
        if slot.is_zero() {
            self.c.remove(&e);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (e, v) in &o.c {
            out.add_term(*e, v.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (e, v) in &o.c {
            out.add_term(*e, -v.clone());
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero(self.order);
        for (a, u) in &self.c {
            for (b, v) in &o.c {
                out.add_term((a.0 + b.0, a.1 + b.1), u * v);
            }
        }
        out
    }

    /// Integer power; negative powers need constant term 1.
    pub fn pow(&self, k: i64) -> Self {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Self::one(self.order);
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    pub fn inverse(&self) -> Self {
        assert!(self.coeff((0, 0)).is_one(), "series inverse needs constant term 1");
        let h = self.sub(&Self::one(self.order));
        let mut out = Self::one(self.order);
        let mut p = Self::one(self.order);
        for _ in 0..self.order {
            p = p.mul(&h);
            p = Self::zero(self.order).sub(&p);
            out = out.add(&p);
        }
        out
    }

    /// Terms of total degree exactly `k`.
    pub fn homogeneous(&self, k: usize) -> Vec<((usize, usize), Q)> {
        self.c.iter().filter(|(e, _)| e.0 + e.1 == k).map(|(e, v)| (*e, v.clone())).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WallRegion {
    /// The full line `m⊥`.
    Line,
    /// The ray spanned by the given weight.
    Ray(Vec<i64>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Wall2 {
    /// Primitive positive root normal to the wall.
    pub normal: RootVec,
    pub region: WallRegion,
    /// Coefficients of `f(t)` with `t = ŷ^normal`, through the truncation
    /// order.
    pub series: Vec<BigInt>,
}

#[derive(Clone, Debug)]
pub struct Scattering2 {
    pub b: [[i64; 2]; 2],
    /// Symmetrizers, so that `α_i∨ = d_i α_i`.
    pub d: [i64; 2],
    pub order: usize,
    pub walls: Vec<Wall2>,
}

fn primitive(v: [i64; 2]) -> [i64; 2] {
    let g = gcd_i64(v[0], v[1]).abs();
    if g == 0 {
        v
    } else {
        [v[0] / g, v[1] / g]
    }
}

fn b_times(b: &[[i64; 2]; 2], m: [i64; 2]) -> [i64; 2] {
    [b[0][0] * m[0] + b[0][1] * m[1], b[1][0] * m[0] + b[1][1] * m[1]]
}

/// Primitive coroot on the ray of the root `m`, in simple-coroot
/// coordinates.
fn coroot(d: &[i64; 2], m: [i64; 2]) -> [i64; 2] {
    let l = d[0] * d[1] / gcd_i64(d[0], d[1]);
    primitive([m[0] * (l / d[0]), m[1] * (l / d[1])])
}

fn dot(a: [i64; 2], b: [i64; 2]) -> i64 {
    a[0] * b[0] + a[1] * b[1]
}

fn cross(a: [i64; 2], b: [i64; 2]) -> i64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Which side of the initial walls a direction lies in, for directions off
/// the axes: 1..=4 counterclockwise from the positive quadrant.
fn quadrant(p: [i64; 2]) -> Option<u8> {
    match (p[0].signum(), p[1].signum()) {
        (1, 1) => Some(1),
        (-1, 1) => Some(2),
        (-1, -1) => Some(3),
        (1, -1) => Some(4),
        _ => None,
    }
}

fn as_2x2(b: &[Vec<i64>]) -> Result<[[i64; 2]; 2]> {
    if b.len() != 2 || b.iter().any(|r| r.len() != 2) {
        return Err(Error::Invalid("rank-2 scattering needs a 2×2 exchange matrix".into()));
    }
    Ok([[b[0][0], b[0][1]], [b[1][0], b[1][1]]])
}

/// Wall function in progress: coefficients of `f(t)`.
#[derive(Clone, Debug)]
struct RawWall {
    normal: [i64; 2],
    ray: Option<[i64; 2]>,
    f: Vec<Q>,
}

impl RawWall {
    fn as_series(&self, order: usize) -> Series2 {
        let mut s = Series2::zero(order);
        for (j, c) in self.f.iter().enumerate() {
            let e = (j * self.normal[0] as usize, j * self.normal[1] as usize);
            s.add_term(e, c.clone());
        }
        s
    }
}

/// An automorphism `x_i ↦ x_i G_i(ŷ)`.
type Auto = [Series2; 2];

struct Composer<'a> {
    b: &'a [[i64; 2]; 2],
    order: usize,
}

impl Composer<'_> {
    fn identity(&self) -> Auto {
        [Series2::one(self.order), Series2::one(self.order)]
    }

    /// `θ ∘ g` for the crossing θ of a wall with function `f` and normal
    /// coroot `n` (already signed by the crossing direction).
    fn cross(&self, g: &Auto, f: &Series2, n: [i64; 2]) -> Auto {
        let mut powers: HashMap<i64, Series2> = HashMap::new();
        let mut fp = |e: i64| powers.entry(e).or_insert_with(|| f.pow(e)).clone();
        let mut out = self.identity();
        for i in 0..2 {
            let mut sub = Series2::zero(self.order);
            for (e, c) in g[i].terms() {
                let m = [e.0 as i64, e.1 as i64];
                let k = dot(b_times(self.b, m), n);
                let term = Series2::monomial(self.order, *e, c.clone()).mul(&fp(k));
                sub = sub.add(&term);
            }
            out[i] = fp(n[i]).mul(&sub);
        }
        out
    }
}

impl Scattering2 {
    fn raw_walls(&self) -> Vec<RawWall> {
        self.walls
            .iter()
            .map(|w| RawWall {
                normal: [w.normal[0], w.normal[1]],
                ray: match &w.region {
                    WallRegion::Line => None,
                    WallRegion::Ray(p) => Some([p[0], p[1]]),
                },
                f: w.series.iter().map(|c| Q::from_integer(c.clone())).collect(),
            })
            .collect()
    }
}

/// Path-ordered products along the two half-loops from the positive quadrant
/// to the negative one: counterclockwise (through the second quadrant) and
/// clockwise (through the fourth).
fn half_loops(b: &[[i64; 2]; 2], d: &[i64; 2], walls: &[RawWall], order: usize) -> (Auto, Auto) {
    let comp = Composer { b, order };
    let line = |i: usize| walls.iter().find(|w| w.ray.is_none() && w.normal == if i == 0 { [1, 0] } else { [0, 1] });
    let apply = |g: &Auto, w: &RawWall, v: [i64; 2]| {
        let n0 = coroot(d, w.normal);
        let n = if dot(v, n0) < 0 { n0 } else { [-n0[0], -n0[1]] };
        comp.cross(g, &w.as_series(order), n)
    };
    let mut rays: Vec<&RawWall> = walls.iter().filter(|w| w.ray.is_some()).collect();
    rays.sort_by(|a, b| {
        let (pa, pb) = (a.ray.unwrap(), b.ray.unwrap());
        0.cmp(&cross(pa, pb)).then_with(|| a.normal.cmp(&b.normal))
    });

    let mut ga = comp.identity();
    if let Some(w) = line(0) {
        ga = apply(&ga, w, [-1, 0]);
    }
    for w in rays.iter().filter(|w| quadrant(w.ray.unwrap()) == Some(2)) {
        let p = w.ray.unwrap();
        ga = apply(&ga, w, [-p[1], p[0]]);
    }
    if let Some(w) = line(1) {
        ga = apply(&ga, w, [0, -1]);
    }

    let mut gb = comp.identity();
    if let Some(w) = line(1) {
        gb = apply(&gb, w, [0, -1]);
    }
    for w in rays.iter().rev().filter(|w| quadrant(w.ray.unwrap()) == Some(4)) {
        let p = w.ray.unwrap();
        gb = apply(&gb, w, [p[1], -p[0]]);
    }
    if let Some(w) = line(0) {
        gb = apply(&gb, w, [-1, 0]);
    }
    (ga, gb)
}

/// Completes the two initial walls `(α_i⊥, 1 + ŷ_i)` to a diagram that is
/// consistent modulo ŷ-degree `order + 1`, adding outgoing rays one degree at
/// a time.
pub fn complete_scattering_rank2(b: &[Vec<i64>], order: usize) -> Result<Scattering2> {
    let b = as_2x2(b)?;
    let dv = symmetrizers(&[b[0].to_vec(), b[1].to_vec()])?;
    let d = [dv[0], dv[1]];
    let fmax = |m: [i64; 2]| order / (m[0] + m[1]) as usize;
    let initial = |m: [i64; 2]| {
        let mut f = vec![Q::zero(); fmax(m) + 1];
        f[0] = Q::one();
        if f.len() > 1 {
            f[1] = Q::one();
        }
        RawWall { normal: m, ray: None, f }
    };
    let mut walls = vec![initial([1, 0]), initial([0, 1])];
    for k in 2..=order {
        let (ga, gb) = half_loops(&b, &d, &walls, k);
        for i in 0..2 {
            let diff = ga[i].sub(&gb[i]);
            let low = diff.terms().map(|(e, _)| *e).find(|e| e.0 + e.1 < k);
            if let Some(e) = low {
                return Err(Error::Invalid(format!("inconsistent below degree {k} at ŷ^{e:?}")));
            }
        }
        let diffs = [ga[0].sub(&gb[0]), ga[1].sub(&gb[1])];
        let mut ms: Vec<(usize, usize)> = diffs.iter().flat_map(|s| s.homogeneous(k)).map(|(e, _)| e).collect();
        ms.sort();
        ms.dedup();
        for e in ms {
            let m = [e.0 as i64, e.1 as i64];
            let m0 = primitive(m);
            let j = (m[0] + m[1]) / (m0[0] + m0[1]);
            let p = primitive(b_times(&b, m0).map(|v| -v));
            let quad = quadrant(p).ok_or_else(|| Error::Invalid(format!("correction at ŷ^{m:?} on an axis")))?;
            let (v, sign) = match quad {
                2 => ([-p[1], p[0]], -1),
                4 => ([p[1], -p[0]], 1),
                _ => return Err(Error::Invalid(format!("correction at ŷ^{m:?} is not outgoing"))),
            };
            let n0 = coroot(&d, m0);
            let n = if dot(v, n0) < 0 { n0 } else { [-n0[0], -n0[1]] };
            let (e1, e2) = (diffs[0].coeff(e), diffs[1].coeff(e));
            if &e1 * q(n[1]) != &e2 * q(n[0]) {
                return Err(Error::Invalid(format!("discrepancy at ŷ^{m:?} is not along the wall normal")));
            }
            let c = if n[0] != 0 { &e1 / q(n[0]) } else { &e2 / q(n[1]) } * q(sign);
            log::debug!("order {k}: wall {m0:?} gains {c} t^{j}");
            let idx = match walls.iter().position(|w| w.normal == m0 && w.ray.is_some()) {
                Some(i) => i,
                None => {
                    let mut f = vec![Q::zero(); fmax(m0) + 1];
                    f[0] = Q::one();
                    walls.push(RawWall { normal: m0, ray: Some(p), f });
                    walls.len() - 1
                }
            };
            let w = &mut walls[idx];
            let old = w.f.clone();
            for (t, a) in old.iter().enumerate() {
                if t + (j as usize) < w.f.len() {
                    w.f[t + j as usize] += a * &c;
                }
            }
        }
    }
    let (ga, gb) = half_loops(&b, &d, &walls, order);
    if ga != gb {
        return Err(Error::Invalid("completion left the diagram inconsistent".into()));
    }
    walls.sort_by(|a, b| {
        (a.ray.is_some(), a.normal[0] + a.normal[1], a.normal).cmp(&(b.ray.is_some(), b.normal[0] + b.normal[1], b.normal))
    });
    let walls = walls
        .into_iter()
        .map(|w| {
            let series = w
                .f
                .iter()
                .map(|c| {
                    if c.is_integer() {
                        Ok(c.to_integer())
                    } else {
                        Err(Error::Invalid(format!("non-integral wall coefficient {c}")))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Wall2 {
                normal: RootVec(w.normal.to_vec()),
                region: match w.ray {
                    None => WallRegion::Line,
                    Some(p) => WallRegion::Ray(p.to_vec()),
                },
                series,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Scattering2 { b, d, order, walls })
}

/// Whether the diagram's two half-loop products agree through its order.
pub fn is_consistent(sc: &Scattering2) -> bool {
    let (ga, gb) = half_loops(&sc.b, &sc.d, &sc.raw_walls(), sc.order);
    ga == gb
}

/// A point of the plane with rational coordinates.
pub type Point = [Q; 2];

/// `χ = (1 + 1/997, 2 + 1/991)`, a generic point of the positive chamber.
pub fn default_endpoint() -> Point {
    [q(1) + Q::new(1.into(), 997.into()), q(2) + Q::new(1.into(), 991.into())]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineSegment {
    pub lambda: Vec<i64>,
    pub beta: Vec<i64>,
    pub coeff: BigInt,
}

/// Segments in time order, the first unbounded; `bends[i]` joins segments
/// `i` and `i + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BrokenLine2 {
    pub endpoint: Point,
    pub segments: Vec<LineSegment>,
    pub bends: Vec<Point>,
}

impl BrokenLine2 {
    pub fn last(&self) -> &LineSegment {
        self.segments.last().expect("nonempty broken line")
    }
}

fn dot_q(p: &Point, n: [i64; 2]) -> Q {
    &p[0] * q(n[0]) + &p[1] * q(n[1])
}

struct LineSearch<'a> {
    sc: &'a Scattering2,
    walls: Vec<([i64; 2], Option<[i64; 2]>, Series2)>,
    powers: HashMap<(usize, i64), Vec<Q>>,
    chi: Point,
    out: Vec<BrokenLine2>,
}

impl LineSearch<'_> {
    /// `[t^j] f^e` for wall `w`.
    fn coefficient(&mut self, w: usize, e: i64, j: usize) -> Q {
        let f = &self.walls[w].2;
        let m0 = self.walls[w].0;
        let order = self.sc.order;
        let list = self.powers.entry((w, e)).or_insert_with(|| {
            let p = f.pow(e);
            let top = order / (m0[0] + m0[1]) as usize;
            (0..=top).map(|t| p.coeff((t * m0[0] as usize, t * m0[1] as usize))).collect()
        });
        list.get(j).cloned().unwrap_or_else(Q::zero)
    }

    /// Walks backward from `pos` along `+λ` and undoes bends, recording every
    /// way to reach an unbent initial segment. `segs` holds, latest first,
    /// each segment's start point and the term picked up at its start.
    fn back(&mut self, pos: Point, lambda: [i64; 2], beta: [i64; 2], segs: Vec<(Point, [i64; 2], [i64; 2], Q)>) -> Result<()> {
        if beta == [0, 0] {
            let mut segments = Vec::with_capacity(segs.len() + 1);
            let mut c = Q::one();
            segments.push(LineSegment { lambda: lambda.to_vec(), beta: vec![0, 0], coeff: BigInt::one() });
            for (_, l, b, a) in segs.iter().rev() {
                c *= a;
                if !c.is_integer() {
                    return Err(Error::Invalid(format!("non-integral broken-line coefficient {c}")));
                }
                segments.push(LineSegment { lambda: l.to_vec(), beta: b.to_vec(), coeff: c.to_integer() });
            }
            let bends = segs.iter().rev().map(|s| s.0.clone()).collect();
            self.out.push(BrokenLine2 { endpoint: self.chi.clone(), segments, bends });
            return Ok(());
        }
        if lambda == [0, 0] {
            return Ok(());
        }
        let mut hits: Vec<(Q, usize, Point)> = Vec::new();
        for (w, (m0, ray, _)) in self.walls.iter().enumerate() {
            let n0 = coroot(&self.sc.d, *m0);
            let dl = dot(lambda, n0);
            if dl == 0 {
                continue;
            }
            let s = -dot_q(&pos, n0) / q(dl);
            if !s.is_positive() {
                continue;
            }
            let hit = [&pos[0] + &s * q(lambda[0]), &pos[1] + &s * q(lambda[1])];
            if hit[0].is_zero() && hit[1].is_zero() {
                return Err(Error::Invalid("broken line through the origin; perturb the endpoint".into()));
            }
            if let Some(p) = ray {
                if !dot_q(&hit, *p).is_positive() {
                    continue;
                }
            }
            hits.push((s, w, hit));
        }
        hits.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
        for (_, w, hit) in hits {
            let m0 = self.walls[w].0;
            let e = dot(lambda, coroot(&self.sc.d, m0)).abs();
            let b = self.sc.b;
            for j in 1.. {
                let prev_beta = [beta[0] - j * m0[0], beta[1] - j * m0[1]];
                if prev_beta[0] < 0 || prev_beta[1] < 0 {
                    break;
                }
                let a = self.coefficient(w, e, j as usize);
                if a.is_zero() {
                    continue;
                }
                let bm = b_times(&b, m0);
                let prev_lambda = [lambda[0] - j * bm[0], lambda[1] - j * bm[1]];
                let mut segs = segs.clone();
                segs.push((hit.clone(), lambda, beta, a));
                self.back(hit.clone(), prev_lambda, prev_beta, segs)?;
            }
        }
        Ok(())
    }
}

/// All broken lines for `λ` ending at `χ` whose final monomial has
/// ŷ-degree at most `order`.
pub fn enumerate_broken_lines_rank2(
    sc: &Scattering2,
    lambda: &WeightVec,
    chi: &Point,
    order: usize,
) -> Result<Vec<BrokenLine2>> {
    if lambda.len() != 2 {
        return Err(Error::Invalid("rank-2 weight expected".into()));
    }
    if order > sc.order {
        return Err(Error::Invalid(format!("diagram only complete through order {}", sc.order)));
    }
    let walls = sc
        .raw_walls()
        .into_iter()
        .map(|w| {
            let s = w.as_series(sc.order);
            (w.normal, w.ray, s)
        })
        .collect();
    let mut search = LineSearch { sc, walls, powers: HashMap::new(), chi: chi.clone(), out: Vec::new() };
    let l = [lambda[0], lambda[1]];
    for total in 0..=order as i64 {
        for b1 in 0..=total {
            let beta = [b1, total - b1];
            let bb = b_times(&sc.b, beta);
            let fin = [l[0] + bb[0], l[1] + bb[1]];
            search.back(chi.clone(), fin, beta, Vec::new())?;
        }
    }
    Ok(search.out)
}

/// The principal-coefficient context `x1, x2, y1, y2`.
pub fn rank2_ctx() -> Arc<VarContext> {
    VarContext::principal(2)
}

/// Σ c x^λ y^β over the final segments of broken lines for `λ` ending at the
/// default endpoint, truncated at y-degree `order`.
pub fn theta_via_broken_lines(sc: &Scattering2, lambda: &WeightVec, order: usize) -> Result<LaurentPoly> {
    theta_at(sc, lambda, &default_endpoint(), order)
}

pub fn theta_at(sc: &Scattering2, lambda: &WeightVec, chi: &Point, order: usize) -> Result<LaurentPoly> {
    let ctx = rank2_ctx();
    if lambda.is_zero() {
        return Ok(LaurentPoly::one(&ctx));
    }
    let mut out = LaurentPoly::zero(&ctx);
    for line in enumerate_broken_lines_rank2(sc, lambda, chi, order)? {
        let s = line.last();
        out = &out + &LaurentPoly::xu_monomial(&ctx, &s.lambda, &s.beta, s.coeff.clone());
    }
    Ok(out)
}

/// `a_χ(λ1, λ2, target)` with `χ` a generic point near `target`: the sum of
/// `c1 c2 y^{β1+β2}` over pairs of broken lines whose final exponents add to
/// `target`.
pub fn structure_constant(
    sc: &Scattering2,
    l1: &WeightVec,
    l2: &WeightVec,
    target: &WeightVec,
    order: usize,
) -> Result<LaurentPoly> {
    let ctx = rank2_ctx();
    let eps = [Q::new(1.into(), 99_733.into()), Q::new(1.into(), 99_119.into())];
    let chi = [q(target[0]) + &eps[0], q(target[1]) + &eps[1]];
    let a = enumerate_broken_lines_rank2(sc, l1, &chi, order)?;
    let b = enumerate_broken_lines_rank2(sc, l2, &chi, order)?;
    let mut out = LaurentPoly::zero(&ctx);
    for s1 in &a {
        for s2 in &b {
            let (p, r) = (s1.last(), s2.last());
            if p.lambda[0] + r.lambda[0] != target[0] || p.lambda[1] + r.lambda[1] != target[1] {
                continue;
            }
            let beta = [p.beta[0] + r.beta[0], p.beta[1] + r.beta[1]];
            if (beta[0] + beta[1]) as usize > order {
                continue;
            }
            out = &out + &LaurentPoly::xu_monomial(&ctx, &[0, 0], &beta, &p.coeff * &r.coeff);
        }
    }
    Ok(out)
}

/// Drop terms of y-degree above `order`.
pub fn truncate_y(p: &LaurentPoly, order: usize) -> LaurentPoly {
    let n = p.ctx().n();
    p.filter(|e| e[n..].iter().map(|&v| v as i64).sum::<i64>() <= order as i64)
}
