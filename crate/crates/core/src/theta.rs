//! Theta functions on the imaginary wall, assembled from tube cluster
//! variables, the δ-identities and c-cluster expansions, plus theta-basis
//! expansion of products.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::affine::{self, AffineData, ExchangeShape, Segment, Tube, TubeRoot};
use crate::error::{Error, Result};
use crate::lattice::{RootVec, WeightVec};
use crate::poly::{LaurentPoly, VarContext};
use crate::seeds::{ClusterVariableFinder, ExtendedExchangeMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaConfig {
    pub bfs_depth: usize,
    /// Root enumeration bound as a multiple of height(δ).
    pub height_factor: i64,
    pub peel_budget: usize,
}

impl Default for ThetaConfig {
    fn default() -> Self {
        ThetaConfig { bfs_depth: 8, height_factor: 4, peel_budget: 64 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaFunction {
    pub label: WeightVec,
    pub poly: LaurentPoly,
}

/// Finite y-linear combination of theta functions, keyed by label.
pub type ThetaCombo = BTreeMap<WeightVec, LaurentPoly>;

#[derive(Clone, Debug)]
pub struct ExchangeCheck {
    pub lhs: LaurentPoly,
    pub rhs_terms: Vec<LaurentPoly>,
}

impl ExchangeCheck {
    fn verify(self, what: String) -> Result<Self> {
        let rhs = self.rhs_terms.iter().fold(LaurentPoly::zero(self.lhs.ctx()), |a, t| &a + t);
        if rhs != self.lhs {
            return Err(Error::IdentityViolated(format!("{what}: lhs − rhs = {}", &self.lhs - &rhs)));
        }
        Ok(self)
    }
}

pub struct ThetaEngine {
    pub data: AffineData,
    pub tubes: Vec<Tube>,
    pub config: ThetaConfig,
    ctx: Arc<VarContext>,
    finder: Mutex<ClusterVariableFinder>,
    cache: Mutex<HashMap<WeightVec, LaurentPoly>>,
}

impl ThetaEngine {
    pub fn new(b: &[Vec<i64>]) -> Result<Self> {
        Self::with_config(b, ThetaConfig::default())
    }

    pub fn with_config(b: &[Vec<i64>], config: ThetaConfig) -> Result<Self> {
        let data = AffineData::new(b)?;
        let tubes = affine::detect_tubes(&data, config.height_factor * data.delta_height())?;
        let ctx = VarContext::principal(data.n);
        let finder = Mutex::new(ClusterVariableFinder::new(b, &ctx));
        Ok(ThetaEngine { data, tubes, config, ctx, finder, cache: Mutex::new(HashMap::new()) })
    }

    pub fn ctx(&self) -> &Arc<VarContext> {
        &self.ctx
    }

    pub fn n(&self) -> usize {
        self.data.n
    }

    pub fn principal_matrix(&self) -> Vec<Vec<i64>> {
        ExtendedExchangeMatrix::principal(&self.data.b).unwrap().rows().to_vec()
    }

    /// `y^β`.
    pub fn y_monomial(&self, beta: &RootVec) -> LaurentPoly {
        LaurentPoly::xu_monomial(&self.ctx, &vec![0; self.n()], &beta.0, 1)
    }

    pub fn one(&self) -> LaurentPoly {
        LaurentPoly::one(&self.ctx)
    }

    pub fn label_of(&self, p: &LaurentPoly) -> Result<WeightVec> {
        Ok(WeightVec(p.pointed_form(&self.principal_matrix())?.0))
    }

    fn cached(&self, label: &WeightVec) -> Option<LaurentPoly> {
        self.cache.lock().unwrap().get(label).cloned()
    }

    fn store(&self, label: WeightVec, p: &LaurentPoly) {
        self.cache.lock().unwrap().insert(label, p.clone());
    }

    pub fn segment_vector(&self, tube: usize, s: &Segment) -> RootVec {
        let t = &self.tubes[tube];
        (0..s.len).fold(RootVec::zero(self.n()), |acc, i| &acc + &t.orbit[(s.start + i) % t.size()])
    }

    pub fn root_vector(&self, r: &TubeRoot) -> RootVec {
        affine::tube_root_vector(&self.tubes[r.tube], r).expect("arc of a detected tube")
    }

    /// The cluster variable with g-vector ν_c(φ) for a real root φ whose
    /// ν_c-image is a g-vector.
    pub fn theta_real(&self, phi: &RootVec) -> Result<LaurentPoly> {
        if phi.is_zero() {
            return Ok(self.one());
        }
        let label = self.data.nu_c(phi)?;
        if let Some(p) = self.cached(&label) {
            return Ok(p);
        }
        let p = self.finder.lock().unwrap().find(&label, self.config.bfs_depth)?;
        self.store(label, &p);
        Ok(p)
    }

    pub fn theta_tube_root(&self, r: &TubeRoot) -> Result<ThetaFunction> {
        let v = self.root_vector(r);
        Ok(ThetaFunction { label: self.data.nu_c(&v)?, poly: self.theta_real(&v)? })
    }

    /// ϑ of an arc given as a possibly empty segment; ϑ_0 = 1.
    pub fn theta_segment(&self, tube: usize, s: &Segment) -> Result<LaurentPoly> {
        self.theta_real(&self.segment_vector(tube, s))
    }

    fn rank2_delta(&self) -> LaurentPoly {
        let b = &self.data.b;
        let c = &self.ctx;
        let t = |x1: i32, x2: i32, y1: i32, y2: i32, k: i64| LaurentPoly::monomial(c, vec![x1, x2, y1, y2], k);
        let sum = |v: Vec<LaurentPoly>| v.iter().fold(LaurentPoly::zero(c), |a, p| &a + p);
        let (b12, b21) = (b[0][1], b[1][0]);
        let (p, q) = if b12 > 0 { (b12, b21) } else { (b21, b12) };
        // (x2² + y1 + y1y2x1²)/(x1x2), (x2² + 2x2y1 + y1² + x1⁴y1²y2)/(x1²x2),
        // (x2⁴ + y1 + 2y1y2x1 + y1y2²x1²)/(x1x2²)
        let poly = match (p, q) {
            (2, -2) => sum(vec![t(-1, 1, 0, 0, 1), t(-1, -1, 1, 0, 1), t(1, -1, 1, 1, 1)]),
            (4, -1) => sum(vec![
                t(-2, 1, 0, 0, 1),
                t(-2, 0, 1, 0, 2),
                t(-2, -1, 2, 0, 1),
                t(2, -1, 2, 1, 1),
            ]),
            (1, -4) => sum(vec![
                t(-1, 2, 0, 0, 1),
                t(-1, -2, 1, 0, 1),
                t(0, -2, 1, 1, 2),
                t(1, -2, 1, 2, 1),
            ]),
            _ => unreachable!("rank-2 affine matrices have b12·b21 = −4"),
        };
        if b12 > 0 {
            poly
        } else {
            let swap = vec![
                LaurentPoly::var(c, 1),
                LaurentPoly::var(c, 0),
                LaurentPoly::var(c, 3),
                LaurentPoly::var(c, 2),
            ];
            poly.substitute(&swap).unwrap()
        }
    }

    /// ϑ_{ν_c(δ)} computed from the orbit element β_[i] of the given tube.
    pub fn theta_delta_from(&self, tube: usize, i: usize) -> Result<LaurentPoly> {
        let t = &self.tubes[tube];
        let k = t.size();
        let beta = &t.orbit[i];
        let seg = |start: usize, len: usize| Segment { start: start % k, len };
        let first = &self.theta_real(beta)? * &self.theta_segment(tube, &seg(i + 1, k - 1))?;
        let a = &self.y_monomial(beta) * &self.theta_segment(tube, &seg(i + 1, k - 2))?;
        let cb = &t.orbit[(i + 1) % k];
        let b = &self.y_monomial(cb) * &self.theta_segment(tube, &seg(i + 2, k - 2))?;
        Ok(&(&first - &a) - &b)
    }

    pub fn theta_delta(&self) -> Result<ThetaFunction> {
        let label = self.data.nu_c(&self.data.delta)?;
        if let Some(p) = self.cached(&label) {
            return Ok(ThetaFunction { label, poly: p });
        }
        let poly = if self.n() == 2 {
            self.rank2_delta()
        } else {
            let t = self.tubes.first().ok_or(Error::NotAffineType)?;
            self.theta_delta_from(t.id, 0)?
        };
        self.store(label.clone(), &poly);
        Ok(ThetaFunction { label, poly })
    }

    pub fn theta_k_delta(&self, k: i64) -> Result<ThetaFunction> {
        if k < 0 {
            return Err(Error::Invalid(format!("multiple of δ must be nonnegative, got {k}")));
        }
        let label = self.data.nu_c(&self.data.delta.scale(k))?;
        if k == 0 {
            return Ok(ThetaFunction { label, poly: self.one() });
        }
        if let Some(p) = self.cached(&label) {
            return Ok(ThetaFunction { label, poly: p });
        }
        let t1 = self.theta_delta()?.poly;
        let yd = self.y_monomial(&self.data.delta);
        let poly = if k == 1 {
            t1
        } else if k == 2 {
            &(&t1 * &t1) - &(&yd + &yd)
        } else {
            let a = self.theta_k_delta(k - 1)?.poly;
            let b = self.theta_k_delta(k - 2)?.poly;
            &(&a * &t1) - &(&yd * &b)
        };
        self.store(label.clone(), &poly);
        Ok(ThetaFunction { label, poly })
    }

    pub fn expansion(&self, phi: &RootVec) -> Result<affine::Expansion> {
        affine::cluster_expansion_imaginary(&self.data, &self.tubes, phi)
    }

    /// ϑ_{ν_c(φ)} for φ in the star of δ.
    pub fn theta_imaginary(&self, phi: &RootVec) -> Result<ThetaFunction> {
        let label = self.data.nu_c(phi).map_err(|_| Error::NotInImaginaryWall(phi.to_string()))?;
        if let Some(p) = self.cached(&label) {
            return Ok(ThetaFunction { label, poly: p });
        }
        let e = self.expansion(phi)?;
        let mut poly = self.theta_k_delta(e.m_delta)?.poly;
        for (r, &m) in &e.arcs {
            poly = &poly * &self.theta_tube_root(r)?.poly.pow(m)?;
        }
        self.store(label.clone(), &poly);
        Ok(ThetaFunction { label, poly })
    }

    /// ϑ_κ for a label κ in the imaginary wall.
    pub fn theta_label(&self, kappa: &WeightVec) -> Result<ThetaFunction> {
        let phi = self.data.nu_c_inverse(kappa);
        if !phi.is_nonnegative() {
            return Err(Error::NotInImaginaryWall(kappa.to_string()));
        }
        self.theta_imaginary(&phi)
    }

    /// Expands `a·b` in the theta basis. Every product of pointed elements is
    /// homogeneous: a term `x^e y^β` has `e = λ + Bβ`. Terms are peeled from
    /// the smallest y-exponent upward; the smallest one is the pointed
    /// leading term of exactly one summand `y^β ϑ_{λ+Bβ}`.
    pub fn expand_product(&self, a: &ThetaFunction, b: &ThetaFunction) -> Result<ThetaCombo> {
        let n = self.n();
        let lambda = &a.label + &b.label;
        let mut rem = &a.poly * &b.poly;
        for (e, _) in rem.terms() {
            let beta: Vec<i64> = e[n..].iter().map(|&v| v as i64).collect();
            let expect = &lambda + &self.data.omega_weight(&RootVec(beta));
            if e[..n].iter().zip(&expect.0).any(|(&x, &y)| x as i64 != y) {
                return Err(Error::IdentityViolated("product is not homogeneous".into()));
            }
        }
        let mut combo = ThetaCombo::new();
        let mut steps = 0;
        loop {
            let next = rem
                .terms()
                .min_by_key(|(e, _)| {
                    let y: Vec<i32> = e[n..].to_vec();
                    (y.iter().sum::<i32>(), y)
                })
                .map(|(e, c)| (e.to_vec(), c.clone()));
            let Some((e, c)) = next else { break };
            steps += 1;
            if steps > self.config.peel_budget {
                return Err(Error::NonTerminating(self.config.peel_budget));
            }
            let beta = RootVec(e[n..].iter().map(|&v| v as i64).collect());
            let kappa = &lambda + &self.data.omega_weight(&beta);
            let th = self.theta_label(&kappa)?;
            let coeff = self.y_monomial(&beta).scale(&c);
            rem = &rem - &(&coeff * &th.poly);
            let slot = combo.entry(kappa).or_insert_with(|| LaurentPoly::zero(&self.ctx));
            *slot = &*slot + &coeff;
        }
        combo.retain(|_, v| !v.is_zero());
        Ok(combo)
    }

    /// Σ c_κ ϑ_κ.
    pub fn combo_value(&self, combo: &ThetaCombo) -> Result<LaurentPoly> {
        let mut out = LaurentPoly::zero(&self.ctx);
        for (k, c) in combo {
            out = &out + &(c * &self.theta_label(k)?.poly);
        }
        Ok(out)
    }

    /// ϑ_{ν_c(δ−β)}ϑ_{ν_c(δ−β')} against the three-term right-hand side, for
    /// β = β_[i], β' = β_[j] of one tube.
    pub fn imaginary_exchange(&self, tube: usize, i: usize, j: usize) -> Result<ExchangeCheck> {
        let t = &self.tubes[tube];
        let k = t.size();
        if i == j || i >= k || j >= k {
            return Err(Error::Invalid("need two distinct orbit elements".into()));
        }
        let l = (j + k - i) % k;
        let m = (i + k - j) % k;
        let phi = Segment { start: (i + 1) % k, len: l - 1 };
        let phi_p = Segment { start: (j + 1) % k, len: m - 1 };
        let th = |s: Segment| self.theta_segment(tube, &s);
        let lhs = &th(Segment { start: (i + 1) % k, len: k - 1 })? * &th(Segment { start: (j + 1) % k, len: k - 1 })?;
        let (tp, tq) = (th(phi)?, th(phi_p)?);
        let beta = &t.orbit[i];
        let beta_p = &t.orbit[j];
        let rhs_terms = vec![
            &(&self.theta_delta()?.poly * &tp) * &tq,
            &self.y_monomial(&(&self.segment_vector(tube, &phi_p) + beta)) * &(&tp * &tp),
            &self.y_monomial(&(&self.segment_vector(tube, &phi) + beta_p)) * &(&tq * &tq),
        ];
        ExchangeCheck { lhs, rhs_terms }.verify(format!("imaginary exchange in tube {tube} at ({i},{j})"))
    }

    /// ϑ_{ν_c(γ)}ϑ_{ν_c(γ')} = ϑ_{ν_c(φ)}ϑ_{ν_c(φ'')} + y^{φ''+β'}ϑ_{ν_c(φ')}ϑ_{ν_c(φ''')} for a
    /// non-maximal γ of the maximal compatible set `j`.
    pub fn real_exchange(&self, j: &[TubeRoot], gamma: &TubeRoot) -> Result<ExchangeCheck> {
        let t = &self.tubes[gamma.tube];
        let shape = affine::exchange_shape(t, j, gamma)?;
        let ExchangeShape::Nested { phi, beta_p, pieces, .. } = shape else {
            return Err(Error::Invalid(format!("{gamma} is the maximal arc")));
        };
        let partner = affine::exchange_partner(&self.tubes, t, j, gamma)?;
        let lhs = &self.theta_tube_root(gamma)?.poly * &self.theta_tube_root(&partner)?.poly;
        let th = |s: &Segment| self.theta_segment(t.id, s);
        let yv = &self.segment_vector(t.id, &pieces[1]) + &t.orbit[beta_p];
        let rhs_terms = vec![
            &self.theta_tube_root(&phi)?.poly * &th(&pieces[1])?,
            &self.y_monomial(&yv) * &(&th(&pieces[0])? * &th(&pieces[2])?),
        ];
        ExchangeCheck { lhs, rhs_terms }.verify(format!("real exchange of {gamma} with {partner}"))
    }

    /// Drops every term whose total y-degree exceeds `order`.
    pub fn truncate(&self, p: &LaurentPoly, order: i64) -> LaurentPoly {
        let n = self.n();
        p.filter(|e| e[n..].iter().map(|&v| v as i64).sum::<i64>() <= order)
    }
}

/// Chebyshev polynomials normalized as T_0 = 2, T_1 = x,
/// T_k = x T_{k−1} − T_{k−2}, evaluated on an integer-coefficient polynomial.
pub fn chebyshev(x: &LaurentPoly, k: i64) -> LaurentPoly {
    let two = LaurentPoly::constant(x.ctx(), BigInt::from(2));
    if k == 0 {
        return two;
    }
    let (mut a, mut b) = (two, x.clone());
    for _ in 1..k {
        let c = &(x * &b) - &a;
        a = b;
        b = c;
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn kronecker_delta_pointed() {
        let e = ThetaEngine::new(&fixtures::matrix("kronecker")).unwrap();
        let t = e.theta_delta().unwrap();
        assert_eq!(t.label, WeightVec(vec![-1, 1]));
        let (g, tail) = t.poly.pointed_form(&e.principal_matrix()).unwrap();
        assert_eq!(g, vec![-1, 1]);
        assert_eq!(tail.to_string(), "y1*y2 + y1 + 1");
    }

    #[test]
    fn k_delta_square() {
        let e = ThetaEngine::new(&fixtures::matrix("kronecker")).unwrap();
        let t2 = e.theta_k_delta(2).unwrap();
        assert_eq!(e.label_of(&t2.poly).unwrap(), WeightVec(vec![-2, 2]));
    }

    #[test]
    fn a2_tube_root_thetas() {
        let e = ThetaEngine::new(&fixtures::matrix("A2tilde")).unwrap();
        for r in e.tubes[0].arcs() {
            let t = e.theta_tube_root(&r).unwrap();
            assert_eq!(crate::seeds::denominator_vector(&t.poly), e.root_vector(&r));
            assert_eq!(e.data.pair_weight_root_scaled(&t.label, &e.data.delta), 0);
        }
    }
}
