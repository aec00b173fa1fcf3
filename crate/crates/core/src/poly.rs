//! Exact multivariate Laurent polynomials with integer coefficients.
//!
//! Every polynomial carries an [`Arc<VarContext>`] naming its variables:
//! the first `n` are cluster variables, the remaining `m` are coefficient
//! (tropical) variables. Terms are kept in a `BTreeMap` keyed by exponent
//! vectors under graded-lex order, so equal polynomials are structurally
//! equal and printing is deterministic.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarContext {
    n: usize,
    m: usize,
    names: Vec<String>,
}

impl VarContext {
    pub fn new(n: usize, m: usize, names: Vec<String>) -> Result<Arc<Self>> {
        if n < 1 {
            return Err(Error::Invalid("need at least one cluster variable".into()));
        }
        if names.len() != n + m {
            return Err(Error::Invalid(format!(
                "expected {} variable names, got {}",
                n + m,
                names.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(Error::Invalid(format!("duplicate variable name {name}")));
            }
        }
        Ok(Arc::new(VarContext { n, m, names }))
    }

    /// `x1..xn` followed by `y1..yn`: the principal-coefficient convention.
    pub fn principal(n: usize) -> Arc<Self> {
        let names = (1..=n)
            .map(|i| format!("x{i}"))
            .chain((1..=n).map(|i| format!("y{i}")))
            .collect();
        Arc::new(VarContext { n, m: n, names })
    }

    /// `x1..xn` followed by `u1..um`.
    pub fn with_coefficients(n: usize, m: usize) -> Arc<Self> {
        let names = (1..=n)
            .map(|i| format!("x{i}"))
            .chain((1..=m).map(|i| format!("u{i}")))
            .collect();
        Arc::new(VarContext { n, m, names })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.n + self.m
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|s| s == name)
    }
}

/// Exponent vector ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Exponent(pub Vec<i32>);

impl Exponent {
    pub fn degree(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug)]
pub struct LaurentPoly {
    ctx: Arc<VarContext>,
    terms: BTreeMap<Exponent, BigInt>,
}

impl PartialEq for LaurentPoly {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.ctx, &other.ctx) || self.ctx == other.ctx) && self.terms == other.terms
    }
}

impl Eq for LaurentPoly {}

impl std::hash::Hash for LaurentPoly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        for (e, c) in &self.terms {
            e.hash(state);
            c.hash(state);
        }
    }
}

fn same_ctx(a: &Arc<VarContext>, b: &Arc<VarContext>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl LaurentPoly {
    pub fn zero(ctx: &Arc<VarContext>) -> Self {
        LaurentPoly { ctx: ctx.clone(), terms: BTreeMap::new() }
    }

    pub fn one(ctx: &Arc<VarContext>) -> Self {
        Self::constant(ctx, BigInt::one())
    }

    pub fn constant(ctx: &Arc<VarContext>, c: impl Into<BigInt>) -> Self {
        Self::monomial(ctx, vec![0; ctx.len()], c)
    }

    pub fn monomial(ctx: &Arc<VarContext>, exps: Vec<i32>, c: impl Into<BigInt>) -> Self {
        assert_eq!(exps.len(), ctx.len(), "exponent length mismatch");
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Exponent(exps), c);
        }
        LaurentPoly { ctx: ctx.clone(), terms }
    }

    /// The variable at position `i` (0-based over all n+m variables).
    pub fn var(ctx: &Arc<VarContext>, i: usize) -> Self {
        let mut e = vec![0; ctx.len()];
        e[i] = 1;
        Self::monomial(ctx, e, 1)
    }

    /// Cluster variable `x_{i+1}`.
    pub fn x(ctx: &Arc<VarContext>, i: usize) -> Self {
        assert!(i < ctx.n);
        Self::var(ctx, i)
    }

    /// Coefficient variable `u_{i+1}` (or `y_{i+1}` in a principal context).
    pub fn u(ctx: &Arc<VarContext>, i: usize) -> Self {
        assert!(i < ctx.m);
        Self::var(ctx, ctx.n + i)
    }

    /// Monomial `x^a u^b` given separately.
    pub fn xu_monomial(ctx: &Arc<VarContext>, a: &[i64], b: &[i64], c: impl Into<BigInt>) -> Self {
        assert_eq!(a.len(), ctx.n);
        assert_eq!(b.len(), ctx.m);
        let e = a.iter().chain(b.iter()).map(|&v| v as i32).collect();
        Self::monomial(ctx, e, c)
    }

    pub fn from_terms(
        ctx: &Arc<VarContext>,
        terms: impl IntoIterator<Item = (Vec<i32>, BigInt)>,
    ) -> Self {
        let mut p = Self::zero(ctx);
        for (e, c) in terms {
            assert_eq!(e.len(), ctx.len(), "exponent length mismatch");
            p.add_term(Exponent(e), c);
        }
        p
    }

    pub fn ctx(&self) -> &Arc<VarContext> {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .all(|(e, c)| c.is_one() && e.0.iter().all(|&v| v == 0))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in increasing graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&[i32], &BigInt)> {
        self.terms.iter().map(|(e, c)| (e.0.as_slice(), c))
    }

    pub fn coefficient(&self, exps: &[i32]) -> BigInt {
        self.terms
            .get(&Exponent(exps.to_vec()))
            .cloned()
            .unwrap_or_else(BigInt::zero)
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn leading_term(&self) -> Option<(&[i32], &BigInt)> {
        self.terms.iter().next_back().map(|(e, c)| (e.0.as_slice(), c))
    }

    fn add_term(&mut self, e: Exponent, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if same_ctx(&self.ctx, &other.ctx) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut acc: HashMap<Vec<i32>, BigInt> = HashMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<i32> = ea.0.iter().zip(&eb.0).map(|(a, b)| a + b).collect();
                *acc.entry(e).or_insert_with(BigInt::zero) += ca * cb;
            }
        }
        let terms = acc
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| (Exponent(e), c))
            .collect();
        Ok(LaurentPoly { ctx: self.ctx.clone(), terms })
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(&self.ctx);
        }
        LaurentPoly {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// Multiply by the monomial with exponent vector `shift`.
    pub fn shift(&self, shift: &[i32]) -> Self {
        assert_eq!(shift.len(), self.ctx.len());
        LaurentPoly {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (Exponent(e.0.iter().zip(shift).map(|(a, b)| a + b).collect()), c.clone()))
                .collect(),
        }
    }

    /// Non-negative power; negative powers are allowed only for monomials
    /// with unit coefficient.
    pub fn pow(&self, k: i64) -> Result<Self> {
        if k < 0 {
            let inv = self.invert_monomial().ok_or(Error::NotDivisible)?;
            return inv.pow(-k);
        }
        if self.is_monomial() {
            let (e, c) = self.terms.iter().next().unwrap();
            let e2 = e.0.iter().map(|&v| v * k as i32).collect();
            return Ok(Self::monomial(&self.ctx, e2, num_traits::pow(c.clone(), k as usize)));
        }
        let mut result = Self::one(&self.ctx);
        let mut base = self.clone();
        let mut k = k as u64;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        Ok(result)
    }

    /// Inverse of a monomial with coefficient ±1.
    pub fn invert_monomial(&self) -> Option<Self> {
        if !self.is_monomial() {
            return None;
        }
        let (e, c) = self.terms.iter().next().unwrap();
        if !(c.is_one() || (-c).is_one()) {
            return None;
        }
        Some(Self::monomial(&self.ctx, e.0.iter().map(|v| -v).collect(), c.clone()))
    }

    fn min_exponents(&self) -> Vec<i32> {
        let mut mins = vec![i32::MAX; self.ctx.len()];
        for e in self.terms.keys() {
            for (m, &v) in mins.iter_mut().zip(&e.0) {
                *m = (*m).min(v);
            }
        }
        mins
    }

    /// Exact quotient `a / b`. Both sides are first shifted by monomials so
    /// that they become polynomials and the divisor has no monomial factor;
    /// then leading terms are eliminated in graded-lex order.
    pub fn exact_div(&self, b: &Self) -> Result<Self> {
        self.check(b)?;
        if b.is_zero() {
            return Err(Error::Invalid("division by zero".into()));
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        if b.is_monomial() {
            let (eb, cb) = b.terms.iter().next().unwrap();
            let mut terms = BTreeMap::new();
            for (e, c) in &self.terms {
                let (q, r) = c.div_rem(cb);
                if !r.is_zero() {
                    return Err(Error::NotDivisible);
                }
                terms.insert(Exponent(e.0.iter().zip(&eb.0).map(|(x, y)| x - y).collect()), q);
            }
            return Ok(LaurentPoly { ctx: self.ctx.clone(), terms });
        }
        let ta: Vec<i32> = self.min_exponents().iter().map(|v| -v).collect();
        let tb: Vec<i32> = b.min_exponents().iter().map(|v| -v).collect();
        let a1 = self.shift(&ta);
        let b1 = b.shift(&tb);
        let (lb, lc) = b1.terms.iter().next_back().map(|(e, c)| (e.clone(), c.clone())).unwrap();
        let mut r = a1.terms;
        let mut q = BTreeMap::new();
        while let Some((le, rc)) = r.iter().next_back().map(|(e, c)| (e.clone(), c.clone())) {
            let diff: Vec<i32> = le.0.iter().zip(&lb.0).map(|(x, y)| x - y).collect();
            if diff.iter().any(|&d| d < 0) {
                return Err(Error::NotDivisible);
            }
            let (qc, rem) = rc.div_rem(&lc);
            if !rem.is_zero() {
                return Err(Error::NotDivisible);
            }
            for (e, c) in &b1.terms {
                let key = Exponent(e.0.iter().zip(&diff).map(|(x, y)| x + y).collect());
                let v = r.entry(key.clone()).or_insert_with(BigInt::zero);
                *v -= c * &qc;
                if v.is_zero() {
                    r.remove(&key);
                }
            }
            q.insert(Exponent(diff), qc);
        }
        let back: Vec<i32> = tb.iter().zip(&ta).map(|(x, y)| x - y).collect();
        Ok(LaurentPoly { ctx: self.ctx.clone(), terms: q }.shift(&back))
    }

    /// Ring homomorphism sending variable `i` to `images[i]`. Variables that
    /// occur with negative exponents must map to monomials with unit
    /// coefficient.
    pub fn substitute(&self, images: &[LaurentPoly]) -> Result<Self> {
        assert_eq!(images.len(), self.ctx.len(), "one image per variable");
        let target = images
            .first()
            .map(|p| p.ctx.clone())
            .ok_or_else(|| Error::Invalid("empty substitution".into()))?;
        if images.iter().any(|p| !same_ctx(&p.ctx, &target)) {
            return Err(Error::ContextMismatch);
        }
        let mut cache: HashMap<(usize, i32), LaurentPoly> = HashMap::new();
        let mut out = Self::zero(&target);
        for (e, c) in &self.terms {
            let mut t = Self::constant(&target, c.clone());
            for (i, &k) in e.0.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let img = match cache.get(&(i, k)) {
                    Some(p) => p.clone(),
                    None => {
                        let p = images[i].pow(k as i64).map_err(|_| {
                            Error::NonInvertibleImage(self.ctx.names[i].clone())
                        })?;
                        cache.insert((i, k), p.clone());
                        p
                    }
                };
                t = &t * &img;
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Like [`substitute`](Self::substitute), but variables with negative
    /// exponents may map to arbitrary polynomials: the denominator is cleared,
    /// the numerator substituted, and the image of the denominator divided
    /// out exactly.
    pub fn substitute_exact(&self, images: &[LaurentPoly]) -> Result<Self> {
        assert_eq!(images.len(), self.ctx.len(), "one image per variable");
        let mins = self.min_exponents();
        let mut clear = vec![0i32; self.ctx.len()];
        for i in 0..self.ctx.len() {
            if mins[i] < 0 && images[i].invert_monomial().is_none() {
                clear[i] = -mins[i];
            }
        }
        if clear.iter().all(|&v| v == 0) {
            return self.substitute(images);
        }
        let num = self.shift(&clear).substitute(images)?;
        let mut den = LaurentPoly::one(images[0].ctx());
        for (i, &k) in clear.iter().enumerate() {
            if k > 0 {
                den = &den * &images[i].pow(k as i64)?;
            }
        }
        num.exact_div(&den)
    }

    /// Keep only the terms accepted by `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&[i32]) -> bool) -> Self {
        LaurentPoly {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| keep(&e.0))
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Re-home the polynomial into another context of the same size.
    pub fn with_ctx(&self, ctx: &Arc<VarContext>) -> Self {
        assert_eq!(ctx.len(), self.ctx.len());
        LaurentPoly { ctx: ctx.clone(), terms: self.terms.clone() }
    }

    /// Split `p = x^g · F(ŷ)` where `ŷ_j = y^{c_j} x^{b_j}` and `B̃` is the
    /// extended matrix whose coefficient block is square and invertible over
    /// the integers. The returned tail stores `ŷ^β` as the exponent vector
    /// `(0, β)`, i.e. in the coefficient slots.
    pub fn pointed_form(&self, btilde: &[Vec<i64>]) -> Result<(Vec<i64>, LaurentPoly)> {
        let n = self.ctx.n;
        let m = self.ctx.m;
        if btilde.len() != n + m || m != n {
            return Err(Error::NotPointed("pointedness needs a square coefficient block".into()));
        }
        if self.is_zero() {
            return Err(Error::NotPointed("zero polynomial".into()));
        }
        let c: Vec<Vec<i64>> = btilde[n..].to_vec();
        let cinv = linalg::integer_inverse(&c)
            .ok_or_else(|| Error::NotPointed("coefficient block not unimodular".into()))?;
        let mut g: Option<Vec<i64>> = None;
        let mut tail = Self::zero(&self.ctx);
        for (e, coeff) in &self.terms {
            let a: Vec<i64> = e.0[..n].iter().map(|&v| v as i64).collect();
            let u: Vec<i64> = e.0[n..].iter().map(|&v| v as i64).collect();
            let beta = linalg::mat_vec(&cinv, &u);
            if beta.iter().any(|&v| v < 0) {
                return Err(Error::NotPointed(format!("negative ŷ exponent {beta:?}")));
            }
            let bb = linalg::mat_vec(&btilde[..n], &beta);
            let gi: Vec<i64> = a.iter().zip(&bb).map(|(x, y)| x - y).collect();
            match &g {
                None => g = Some(gi),
                Some(g0) if *g0 == gi => {}
                Some(g0) => {
                    return Err(Error::NotPointed(format!("terms point at {g0:?} and {gi:?}")))
                }
            }
            let mut te = vec![0i32; n];
            te.extend(beta.iter().map(|&v| v as i32));
            tail.add_term(Exponent(te), coeff.clone());
        }
        if !tail.coefficient(&vec![0; n + m]).is_one() {
            return Err(Error::NotPointed("constant term of the tail is not 1".into()));
        }
        Ok((g.unwrap(), tail))
    }

    pub fn to_json(&self) -> PolyJson {
        PolyJson {
            vars: self.ctx.names.clone(),
            terms: self
                .terms
                .iter()
                .rev()
                .map(|(e, c)| TermJson { c: c.to_string(), e: e.0.clone() })
                .collect(),
        }
    }

    pub fn from_json(ctx: &Arc<VarContext>, j: &PolyJson) -> Result<Self> {
        if j.vars != ctx.names {
            return Err(Error::ContextMismatch);
        }
        let mut p = Self::zero(ctx);
        for t in &j.terms {
            if t.e.len() != ctx.len() {
                return Err(Error::Invalid("exponent vector length".into()));
            }
            let c: BigInt = t
                .c
                .parse()
                .map_err(|_| Error::Invalid(format!("bad coefficient {}", t.c)))?;
            p.add_term(Exponent(t.e.clone()), c);
        }
        Ok(p)
    }

    /// Reads a polynomial together with a fresh context built from its
    /// variable list, assuming `n` cluster variables come first.
    pub fn from_json_standalone(n: usize, j: &PolyJson) -> Result<Self> {
        let ctx = VarContext::new(n, j.vars.len().saturating_sub(n), j.vars.clone())?;
        Self::from_json(&ctx, j)
    }

    pub fn all_coefficients_nonnegative(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub c: String,
    pub e: Vec<i32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyJson {
    pub vars: Vec<String>,
    pub terms: Vec<TermJson>,
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let mut factors = Vec::new();
            for (i, &k) in e.0.iter().enumerate() {
                match k {
                    0 => {}
                    1 => factors.push(self.ctx.names[i].clone()),
                    _ => factors.push(format!("{}^{}", self.ctx.names[i], k)),
                }
            }
            if factors.is_empty() {
                write!(f, "{mag}")?;
            } else {
                if !mag.is_one() {
                    write!(f, "{mag}*")?;
                }
                write!(f, "{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_add(rhs).expect("context mismatch in add")
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_sub(rhs).expect("context mismatch in sub")
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_mul(rhs).expect("context mismatch in mul")
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
