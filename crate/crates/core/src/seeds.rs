//! Exchange matrices, seed mutation with coefficients, mutation maps,
//! g-vectors and a breadth-first cluster-variable search.

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{RootVec, WeightVec};
use crate::poly::{LaurentPoly, VarContext};

fn pos(v: i64) -> i64 {
    v.max(0)
}

/// Matrix mutation in direction `k` (0-based) applied to every row.
pub fn mutate_rows(rows: &[Vec<i64>], k: usize) -> Vec<Vec<i64>> {
    let n = rows[0].len();
    assert!(k < n);
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            (0..n)
                .map(|j| {
                    if i == k || j == k {
                        -row[j]
                    } else {
                        let bik = row[k];
                        let bkj = rows[k][j];
                        row[j] + pos(-bik) * bkj + bik * pos(bkj)
                    }
                })
                .collect()
        })
        .collect()
}

/// Skew-symmetrizers as the integers `D_i = d_i⁻¹` with `gcd = 1`, so that
/// `b_ij / D_i = -b_ji / D_j`.
pub fn symmetrizers(b: &[Vec<i64>]) -> Result<Vec<i64>> {
    let n = b.len();
    if b.iter().any(|r| r.len() != n) {
        return Err(Error::Invalid("exchange matrix must be square".into()));
    }
    let mut d: Vec<Option<BigRational>> = vec![None; n];
    for start in 0..n {
        if d[start].is_some() {
            continue;
        }
        d[start] = Some(BigRational::one());
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            let di = d[i].clone().unwrap();
            for j in 0..n {
                if b[i][j] == 0 && b[j][i] == 0 {
                    continue;
                }
                if b[i][j] == 0 || b[j][i] == 0 || b[i][j].signum() == b[j][i].signum() {
                    return Err(Error::NonSkewSymmetrizable);
                }
                // D_j = -D_i b_ji / b_ij
                let dj = &di * BigRational::new(BigInt::from(-b[j][i]), BigInt::from(b[i][j]));
                match &d[j] {
                    None => {
                        d[j] = Some(dj);
                        queue.push_back(j);
                    }
                    Some(old) if *old == dj => {}
                    Some(_) => return Err(Error::NonSkewSymmetrizable),
                }
            }
        }
        if (0..n).any(|i| b[i][i] != 0) {
            return Err(Error::NonSkewSymmetrizable);
        }
    }
    let d: Vec<BigRational> = d.into_iter().map(|v| v.unwrap()).collect();
    let ints = crate::linalg::primitive_integer(&d);
    Ok(ints.iter().map(|v| v.to_i64().expect("symmetrizer overflow")).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExtendedExchangeMatrix {
    n: usize,
    m: usize,
    rows: Vec<Vec<i64>>,
}

impl ExtendedExchangeMatrix {
    /// `rows` holds `n + m` rows of length `n`; the top block must be
    /// skew-symmetrizable.
    pub fn new(rows: Vec<Vec<i64>>, n: usize) -> Result<Self> {
        if rows.len() < n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Invalid(format!("expected at least {n} rows of length {n}")));
        }
        symmetrizers(&rows[..n])?;
        let m = rows.len() - n;
        Ok(ExtendedExchangeMatrix { n, m, rows })
    }

    pub fn principal(b: &[Vec<i64>]) -> Result<Self> {
        let n = b.len();
        let mut rows = b.to_vec();
        for i in 0..n {
            let mut r = vec![0; n];
            r[i] = 1;
            rows.push(r);
        }
        Self::new(rows, n)
    }

    pub fn coefficient_free(b: &[Vec<i64>]) -> Result<Self> {
        Self::new(b.to_vec(), b.len())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn b(&self) -> Vec<Vec<i64>> {
        self.rows[..self.n].to_vec()
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.rows[i][j]
    }

    /// True when the coefficient block is the identity.
    pub fn is_principal(&self) -> bool {
        self.m == self.n
            && (0..self.n).all(|i| (0..self.n).all(|j| self.rows[self.n + i][j] == (i == j) as i64))
    }

    pub fn mutate(&self, k: usize) -> Result<Self> {
        if k >= self.n {
            return Err(Error::IndexOutOfRange { index: k + 1, n: self.n });
        }
        Ok(ExtendedExchangeMatrix { n: self.n, m: self.m, rows: mutate_rows(&self.rows, k) })
    }

    pub fn mutate_word(&self, word: &[usize]) -> Result<Self> {
        word.iter().try_fold(self.clone(), |m, &k| m.mutate(k))
    }

    /// Sign of the coefficient column `k`; `+1` for an all-zero column.
    pub fn column_sign(&self, k: usize) -> Result<i64> {
        let col: Vec<i64> = (self.n..self.n + self.m).map(|i| self.rows[i][k]).collect();
        let has_pos = col.iter().any(|&v| v > 0);
        let has_neg = col.iter().any(|&v| v < 0);
        match (has_pos, has_neg) {
            (true, true) => Err(Error::UnsignedColumn(k + 1)),
            (false, true) => Ok(-1),
            _ => Ok(1),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Seed {
    pub initial: Arc<ExtendedExchangeMatrix>,
    pub matrix: ExtendedExchangeMatrix,
    pub cluster: Vec<LaurentPoly>,
    /// Mutations applied so far, in order of application (0-based).
    pub history: Vec<usize>,
}

impl Seed {
    pub fn initial(matrix: ExtendedExchangeMatrix) -> Self {
        let ctx = if matrix.is_principal() {
            VarContext::principal(matrix.n)
        } else {
            VarContext::with_coefficients(matrix.n, matrix.m)
        };
        Self::initial_in(matrix, &ctx)
    }

    pub fn initial_in(matrix: ExtendedExchangeMatrix, ctx: &Arc<VarContext>) -> Self {
        assert_eq!(ctx.n(), matrix.n);
        assert_eq!(ctx.m(), matrix.m);
        let cluster = (0..matrix.n).map(|i| LaurentPoly::x(ctx, i)).collect();
        Seed { initial: Arc::new(matrix.clone()), matrix, cluster, history: vec![] }
    }

    pub fn ctx(&self) -> &Arc<VarContext> {
        self.cluster[0].ctx()
    }

    /// The two monomials of the exchange relation at `k`, as polynomials in
    /// the current cluster.
    pub fn exchange_binomial(&self, k: usize) -> Result<LaurentPoly> {
        let n = self.matrix.n;
        if k >= n {
            return Err(Error::IndexOutOfRange { index: k + 1, n });
        }
        self.matrix.column_sign(k)?;
        let ctx = self.ctx().clone();
        let mut up: Vec<i64> = vec![0; self.matrix.m];
        let mut down: Vec<i64> = vec![0; self.matrix.m];
        for i in 0..self.matrix.m {
            let v = self.matrix.rows[n + i][k];
            up[i] = pos(v);
            down[i] = pos(-v);
        }
        let zero_x = vec![0; n];
        let mut t1 = LaurentPoly::xu_monomial(&ctx, &zero_x, &up, 1);
        let mut t2 = LaurentPoly::xu_monomial(&ctx, &zero_x, &down, 1);
        for i in 0..n {
            let b = self.matrix.rows[i][k];
            if b > 0 {
                t1 = &t1 * &self.cluster[i].pow(b)?;
            } else if b < 0 {
                t2 = &t2 * &self.cluster[i].pow(-b)?;
            }
        }
        Ok(&t1 + &t2)
    }

    /// Seed mutation in direction `k` (0-based).
    pub fn mutate(&self, k: usize) -> Result<Seed> {
        let rhs = self.exchange_binomial(k)?;
        let new_var = rhs.exact_div(&self.cluster[k])?;
        let mut cluster = self.cluster.clone();
        cluster[k] = new_var;
        let mut history = self.history.clone();
        history.push(k);
        Ok(Seed { initial: self.initial.clone(), matrix: self.matrix.mutate(k)?, cluster, history })
    }

    pub fn mutate_word(&self, word: &[usize]) -> Result<Seed> {
        word.iter().try_fold(self.clone(), |s, &k| s.mutate(k))
    }

    /// g-vector of cluster variable `i` relative to the initial seed.
    pub fn g_vector(&self, i: usize) -> Result<WeightVec> {
        if !self.initial.is_principal() {
            return Err(Error::NotPointed("g-vectors need principal coefficients".into()));
        }
        let (g, _) = self.cluster[i].pointed_form(self.initial.rows())?;
        Ok(WeightVec(g))
    }
}

/// η_word^{B^T}(v): append `v` below `B^T`, mutate along `word` (applied left
/// to right, 0-based) and read off the appended row.
pub fn mutation_map_eta(b: &[Vec<i64>], word: &[usize], v: &WeightVec) -> WeightVec {
    let mut rows = crate::linalg::transpose(b);
    rows.push(v.0.clone());
    for &k in word {
        rows = mutate_rows(&rows, k);
    }
    WeightVec(rows.pop().unwrap())
}

/// Componentwise maximum of the negated x-exponents.
pub fn denominator_vector(p: &LaurentPoly) -> RootVec {
    let n = p.ctx().n();
    let mut d = vec![i64::MIN; n];
    for (e, _) in p.terms() {
        for i in 0..n {
            d[i] = d[i].max(-(e[i] as i64));
        }
    }
    if p.is_zero() {
        d = vec![0; n];
    }
    RootVec(d)
}

/// Multiply by the smallest monomial in the coefficient variables that
/// removes all their negative exponents.
pub fn clear(p: &LaurentPoly) -> LaurentPoly {
    let ctx = p.ctx();
    let mut shift = vec![0i32; ctx.len()];
    for (e, _) in p.terms() {
        for i in ctx.n()..ctx.len() {
            shift[i] = shift[i].max(-e[i]);
        }
    }
    p.shift(&shift)
}

/// g-vector bookkeeping without polynomials: the extended matrix with
/// principal coefficients (its bottom block holds the c-vectors) and the
/// g-vectors of the cluster.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LightSeed {
    pub rows: Vec<Vec<i64>>,
    pub g: Vec<Vec<i64>>,
}

impl LightSeed {
    pub fn initial(b: &[Vec<i64>]) -> Self {
        let n = b.len();
        let ext = ExtendedExchangeMatrix::principal(b).expect("valid exchange matrix");
        LightSeed { rows: ext.rows, g: (0..n).map(|i| WeightVec::unit(n, i).0).collect() }
    }

    /// Mutation using homogeneity of the exchange relation: the term
    /// `y^{[c_k]_+} Π x_i^{[b_ik]_+}` has degree `g'_k + g_k`.
    pub fn mutate(&self, k: usize, b0: &[Vec<i64>]) -> Self {
        let n = self.g.len();
        let mut gk = vec![0i64; n];
        for (i, gi) in self.g.iter().enumerate() {
            let b = pos(self.rows[i][k]);
            for t in 0..n {
                gk[t] += b * gi[t];
            }
        }
        let cpos: Vec<i64> = (0..n).map(|j| pos(self.rows[n + j][k])).collect();
        let shift = crate::linalg::mat_vec(b0, &cpos);
        for t in 0..n {
            gk[t] -= self.g[k][t] + shift[t];
        }
        let mut g = self.g.clone();
        g[k] = gk;
        LightSeed { rows: mutate_rows(&self.rows, k), g }
    }

    /// Relabeling-invariant key: indices sorted by g-vector, matrix permuted
    /// accordingly.
    pub fn key(&self) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
        let n = self.g.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| self.g[a].cmp(&self.g[b]));
        let g = order.iter().map(|&i| self.g[i].clone()).collect();
        let rows = (0..self.rows.len())
            .map(|r| {
                let src = if r < n { order[r] } else { r };
                order.iter().map(|&j| self.rows[src][j]).collect()
            })
            .collect();
        (g, rows)
    }
}

/// Breadth-first search over seeds for cluster variables with a given
/// g-vector. The search runs on [`LightSeed`]s and only replays the winning
/// mutation path with polynomials.
#[derive(Debug)]
pub struct ClusterVariableFinder {
    b0: Vec<Vec<i64>>,
    ctx: Arc<VarContext>,
    depth_done: usize,
    frontier: Vec<(LightSeed, Vec<usize>)>,
    seen: HashSet<(Vec<Vec<i64>>, Vec<Vec<i64>>)>,
    found: HashMap<Vec<i64>, (Vec<usize>, usize)>,
    cache: HashMap<Vec<i64>, LaurentPoly>,
}

impl ClusterVariableFinder {
    pub fn new(b: &[Vec<i64>], ctx: &Arc<VarContext>) -> Self {
        let s0 = LightSeed::initial(b);
        let mut seen = HashSet::new();
        seen.insert(s0.key());
        let mut found = HashMap::new();
        for (i, g) in s0.g.iter().enumerate() {
            found.insert(g.clone(), (vec![], i));
        }
        ClusterVariableFinder {
            b0: b.to_vec(),
            ctx: ctx.clone(),
            depth_done: 0,
            frontier: vec![(s0, vec![])],
            seen,
            found,
            cache: HashMap::new(),
        }
    }

    fn deepen(&mut self) {
        let n = self.b0.len();
        let mut next = Vec::new();
        for (s, path) in &self.frontier {
            for k in 0..n {
                if path.last() == Some(&k) {
                    continue;
                }
                let t = s.mutate(k, &self.b0);
                if !self.seen.insert(t.key()) {
                    continue;
                }
                let mut p = path.clone();
                p.push(k);
                self.found.entry(t.g[k].clone()).or_insert_with(|| (p.clone(), k));
                next.push((t, p));
            }
        }
        self.frontier = next;
        self.depth_done += 1;
    }

    /// Mutation path and index of a cluster variable with g-vector `target`.
    pub fn locate(&mut self, target: &WeightVec, depth: usize) -> Result<(Vec<usize>, usize)> {
        loop {
            if let Some(hit) = self.found.get(&target.0) {
                return Ok(hit.clone());
            }
            if self.depth_done >= depth || self.frontier.is_empty() {
                return Err(Error::NotFound { target: target.0.clone(), depth });
            }
            self.deepen();
        }
    }

    pub fn find(&mut self, target: &WeightVec, depth: usize) -> Result<LaurentPoly> {
        if let Some(p) = self.cache.get(&target.0) {
            return Ok(p.clone());
        }
        let (path, idx) = self.locate(target, depth)?;
        let m = ExtendedExchangeMatrix::principal(&self.b0)?;
        let seed = Seed::initial_in(m, &self.ctx).mutate_word(&path)?;
        let v = seed.cluster[idx].clone();
        let g = seed.g_vector(idx)?;
        if g != *target {
            return Err(Error::IdentityViolated(format!(
                "g-vector bookkeeping gave {target} but the polynomial points at {g}"
            )));
        }
        self.cache.insert(target.0.clone(), v.clone());
        Ok(v)
    }
}

/// One-shot convenience wrapper around [`ClusterVariableFinder`].
pub fn find_cluster_variable_by_gvector(
    b: &[Vec<i64>],
    target: &WeightVec,
    depth: usize,
) -> Result<LaurentPoly> {
    let ctx = VarContext::principal(b.len());
    ClusterVariableFinder::new(b, &ctx).find(target, depth)
}

/// Number of terms with a negative coefficient; zero for every cluster variable.
pub fn negative_terms(p: &LaurentPoly) -> usize {
    p.terms().filter(|(_, c)| c.is_negative()).count()
}

pub fn is_zero_vec(v: &[i64]) -> bool {
    v.iter().all(|x| x.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kron() -> Vec<Vec<i64>> {
        vec![vec![0, 2], vec![-2, 0]]
    }

    #[test]
    fn matrix_mutation_examples() {
        assert_eq!(mutate_rows(&kron(), 0), vec![vec![0, -2], vec![2, 0]]);
        let a2 = vec![vec![0, 1, 1], vec![-1, 0, 1], vec![-1, -1, 0]];
        assert_eq!(mutate_rows(&a2, 1), vec![vec![0, -1, 2], vec![1, 0, -1], vec![-2, 1, 0]]);
    }

    #[test]
    fn symmetrizer_values() {
        assert_eq!(symmetrizers(&kron()).unwrap(), vec![1, 1]);
        assert_eq!(symmetrizers(&[vec![0, 4], vec![-1, 0]]).unwrap(), vec![4, 1]);
        assert_eq!(symmetrizers(&[vec![0, 1], vec![-4, 0]]).unwrap(), vec![1, 4]);
        assert_eq!(symmetrizers(&[vec![0, 1], vec![1, 0]]), Err(Error::NonSkewSymmetrizable));
    }

    #[test]
    fn seed_mutation_principal_and_free() {
        let s = Seed::initial(ExtendedExchangeMatrix::principal(&kron()).unwrap());
        let t = s.mutate(0).unwrap();
        assert_eq!(t.cluster[0].to_string(), "x1^-1*x2^2 + x1^-1*y1");
        assert_eq!(t.g_vector(0).unwrap(), WeightVec(vec![-1, 2]));
        assert_eq!(t.mutate(0).unwrap().cluster, s.cluster);
        let f = Seed::initial(ExtendedExchangeMatrix::coefficient_free(&kron()).unwrap());
        assert_eq!(f.mutate(0).unwrap().cluster[0].to_string(), "x1^-1*x2^2 + x1^-1");
    }

    #[test]
    fn unsigned_column_rejected() {
        let m = ExtendedExchangeMatrix::new(vec![vec![0, 2], vec![-2, 0], vec![1, 0], vec![-1, 1]], 2)
            .unwrap();
        assert_eq!(Seed::initial(m).mutate(0).unwrap_err(), Error::UnsignedColumn(1));
    }

    #[test]
    fn eta_examples() {
        let b = kron();
        assert_eq!(mutation_map_eta(&b, &[0], &WeightVec(vec![0, 1])), WeightVec(vec![0, 1]));
        assert_eq!(mutation_map_eta(&b, &[0], &WeightVec(vec![1, 1])), WeightVec(vec![-1, 1]));
    }

    #[test]
    fn denominators_and_clear() {
        let ctx = VarContext::with_coefficients(2, 1);
        let x1 = LaurentPoly::x(&ctx, 0);
        assert_eq!(denominator_vector(&x1), RootVec(vec![-1, 0]));
        let p = LaurentPoly::monomial(&ctx, vec![1, 0, -1], 1);
        assert_eq!(clear(&p), x1);
        let mixed = &LaurentPoly::monomial(&ctx, vec![1, 0, -2], 1) + &LaurentPoly::monomial(&ctx, vec![0, 1, 3], 1);
        let c = clear(&mixed);
        assert_eq!(c.to_string(), "x2*u1^5 + x1");
    }

    #[test]
    fn finder_examples() {
        let b = kron();
        let p = find_cluster_variable_by_gvector(&b, &WeightVec(vec![-1, 2]), 3).unwrap();
        assert_eq!(p.to_string(), "x1^-1*x2^2 + x1^-1*y1");
        let x2 = find_cluster_variable_by_gvector(&b, &WeightVec(vec![0, 1]), 0).unwrap();
        assert_eq!(x2.to_string(), "x2");
        let err = find_cluster_variable_by_gvector(&b, &WeightVec(vec![-1, 1]), 6).unwrap_err();
        assert!(matches!(err, Error::NotFound { .. }));
    }

    #[test]
    fn light_gvectors_match_polynomial_gvectors() {
        let b = vec![vec![0, 1, 1], vec![-1, 0, 1], vec![-1, -1, 0]];
        let words: Vec<Vec<usize>> = vec![vec![0, 1, 2, 0], vec![2, 1, 0, 2, 1], vec![1, 0, 1, 2]];
        for w in words {
            let mut light = LightSeed::initial(&b);
            let mut seed = Seed::initial(ExtendedExchangeMatrix::principal(&b).unwrap());
            for &k in &w {
                light = light.mutate(k, &b);
                seed = seed.mutate(k).unwrap();
                for i in 0..3 {
                    assert_eq!(seed.g_vector(i).unwrap().0, light.g[i]);
                }
                assert_eq!(seed.matrix.rows(), light.rows.as_slice());
            }
        }
    }
}
