//! Configuration, matrix loading, the verification harness and reports used
//! by the `affine-cluster` binary.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::affine::{self, AffineData, ExchangeShape, Tube, TubeRoot};
use crate::error::{Error, Result};
use crate::fixtures::{self, MatrixFile};
use crate::gca;
use crate::scatter2;
use crate::lattice::{RootVec, WeightVec};
use crate::linalg;
use crate::poly::{LaurentPoly, PolyJson};
use crate::seeds::{self, ExtendedExchangeMatrix};
use crate::theta::{self, ThetaConfig, ThetaEngine, ThetaFunction};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

/// An error together with the exit code it maps to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError { code: EXIT_CONFIG, message: message.into() }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

/// Library errors that describe bad input rather than a failed identity.
pub fn is_config_error(e: &Error) -> bool {
    matches!(
        e,
        Error::IndexOutOfRange { .. }
            | Error::UnsignedColumn(_)
            | Error::NonSkewSymmetrizable
            | Error::NotAcyclic
            | Error::NotAffineType
            | Error::HeightBoundTooSmall(_)
            | Error::LengthOutOfRange { .. }
            | Error::NegativeInput
            | Error::NotInImaginaryWall(_)
            | Error::NotMaximal
            | Error::NotMember
            | Error::Invalid(_)
    )
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = if is_config_error(&e) { EXIT_CONFIG } else { EXIT_VIOLATION };
        CliError { code, message: e.to_string() }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoefficientMode {
    #[default]
    Principal,
    Free,
    /// Coefficient rows below B; `None` takes them from the matrix file.
    Custom(Option<Vec<Vec<i64>>>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub bfs_depth: usize,
    /// Root enumeration bound as a multiple of height(δ).
    pub height_factor: i64,
    pub series_order: usize,
    pub peel_budget: usize,
    /// Largest exchange graph explored before giving up.
    pub graph_budget: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        let t = ThetaConfig::default();
        Bounds {
            bfs_depth: t.bfs_depth,
            height_factor: t.height_factor,
            series_order: 8,
            peel_budget: t.peel_budget,
            graph_budget: 10_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub matrix: String,
    pub coefficients: CoefficientMode,
    pub bounds: Bounds,
    pub format: Format,
    /// Seed for the sampled checks.
    pub seed: u64,
    pub samples: usize,
}

impl RunConfig {
    pub fn new(matrix: impl Into<String>) -> Self {
        RunConfig {
            matrix: matrix.into(),
            coefficients: CoefficientMode::Principal,
            bounds: Bounds::default(),
            format: Format::Text,
            seed: 0,
            samples: 50,
        }
    }

    pub fn theta_config(&self) -> ThetaConfig {
        ThetaConfig {
            bfs_depth: self.bounds.bfs_depth,
            height_factor: self.bounds.height_factor,
            peel_budget: self.bounds.peel_budget,
        }
    }

    /// The extended matrix for the chosen coefficient mode.
    pub fn extended_matrix(&self, m: &LoadedMatrix) -> std::result::Result<ExtendedExchangeMatrix, CliError> {
        let b = m.file.exchange_matrix();
        let n = m.file.n;
        let r = match &self.coefficients {
            CoefficientMode::Principal => ExtendedExchangeMatrix::principal(&b),
            CoefficientMode::Free => ExtendedExchangeMatrix::coefficient_free(&b),
            CoefficientMode::Custom(rows) => {
                let rows = rows.clone().unwrap_or_else(|| m.file.matrix[n..].to_vec());
                if rows.iter().any(|r| r.len() != n) {
                    return Err(CliError::config(format!("coefficient rows must have {n} entries")));
                }
                let mut all = b;
                all.extend(rows);
                ExtendedExchangeMatrix::new(all, n)
            }
        };
        r.map_err(CliError::from)
    }

    pub fn engine(&self, m: &LoadedMatrix) -> std::result::Result<ThetaEngine, CliError> {
        ThetaEngine::with_config(&m.file.exchange_matrix(), self.theta_config()).map_err(config_error)
    }
}

fn config_error(e: Error) -> CliError {
    CliError::config(e.to_string())
}

/// Parses `"1,0;0,1"` as rows of integers.
pub fn parse_rows(s: &str) -> std::result::Result<Vec<Vec<i64>>, CliError> {
    s.split(';')
        .filter(|r| !r.trim().is_empty())
        .map(parse_vector)
        .collect()
}

pub fn parse_vector(s: &str) -> std::result::Result<Vec<i64>, CliError> {
    s.split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|_| CliError::config(format!("not an integer: {t:?}"))))
        .collect()
}

#[derive(Clone, Debug)]
pub struct LoadedMatrix {
    pub name: String,
    pub file: MatrixFile,
}

impl LoadedMatrix {
    pub fn b(&self) -> Vec<Vec<i64>> {
        self.file.exchange_matrix()
    }
}

fn bundled_alias(name: &str) -> Option<MatrixFile> {
    match name {
        "A1tilde" => fixtures::bundled("kronecker"),
        _ => fixtures::bundled(name),
    }
}

/// Resolves a bundled fixture name (with or without `.json`) or a path to a
/// matrix file.
pub fn load_matrix(spec: &str) -> std::result::Result<LoadedMatrix, CliError> {
    let path = Path::new(spec);
    let file = if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("{spec}: {e}")))?;
        MatrixFile::parse(&text).map_err(|e| CliError::config(format!("{spec}: {e}")))?
    } else {
        let stem = path.file_name().and_then(|s| s.to_str()).unwrap_or(spec);
        let stem = stem.strip_suffix(".json").unwrap_or(stem);
        bundled_alias(stem).ok_or_else(|| {
            CliError::config(format!("{spec}: no such file or bundled matrix (known: {})", fixtures::names().join(", ")))
        })?
    };
    seeds::symmetrizers(&file.exchange_matrix()).map_err(|e| CliError::config(format!("{spec}: {e}")))?;
    let name = file.name.clone().unwrap_or_else(|| spec.to_string());
    Ok(LoadedMatrix { name, file })
}

/// A theta label: `delta`, `k*delta`, `root:a,b,…` (ν_c of a root) or a
/// weight `a,b,…`.
pub fn parse_label(data: &AffineData, s: &str) -> std::result::Result<WeightVec, CliError> {
    let s = s.trim();
    let k = if s == "delta" {
        Some(1)
    } else if let Some(k) = s.strip_suffix("*delta") {
        Some(k.trim().parse::<i64>().map_err(|_| CliError::config(format!("bad multiple in {s:?}")))?)
    } else {
        None
    };
    let check_len = |v: Vec<i64>| {
        if v.len() != data.n {
            Err(CliError::config(format!("expected {} coordinates in {s:?}", data.n)))
        } else {
            Ok(v)
        }
    };
    if let Some(k) = k {
        return data.nu_c(&data.delta.scale(k)).map_err(config_error);
    }
    if let Some(r) = s.strip_prefix("root:") {
        let r = RootVec(check_len(parse_vector(r)?)?);
        return data.nu_c(&r).map_err(config_error);
    }
    Ok(WeightVec(check_len(parse_vector(s)?)?))
}

/// ϑ_λ for λ in the imaginary wall or a g-vector of a cluster variable.
pub fn theta_for_label(engine: &ThetaEngine, label: &WeightVec) -> std::result::Result<ThetaFunction, CliError> {
    let phi = engine.data.nu_c_inverse(label);
    if affine::in_imaginary_cone(&engine.data, &engine.tubes, &phi) {
        return Ok(engine.theta_label(label)?);
    }
    if phi.is_nonnegative() {
        if let Ok(p) = engine.theta_real(&phi) {
            return Ok(ThetaFunction { label: label.clone(), poly: p });
        }
    }
    let mut finder = seeds::ClusterVariableFinder::new(&engine.data.b, engine.ctx());
    match finder.find(label, engine.config.bfs_depth) {
        Ok(p) => Ok(ThetaFunction { label: label.clone(), poly: p }),
        Err(e) => Err(CliError::config(format!(
            "{label} is neither in the imaginary wall nor a cluster-variable g-vector ({e})"
        ))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Identity {
    Thetaxi,
    Cheby,
    Imexch,
    Expansion,
    TubeClosure,
    Csym,
    Gca,
}

impl Identity {
    pub const ALL: [Identity; 7] = [
        Identity::Thetaxi,
        Identity::Cheby,
        Identity::Imexch,
        Identity::Expansion,
        Identity::TubeClosure,
        Identity::Csym,
        Identity::Gca,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::Thetaxi => "thetaxi",
            Identity::Cheby => "cheby",
            Identity::Imexch => "imexch",
            Identity::Expansion => "expansion",
            Identity::TubeClosure => "tube-closure",
            Identity::Csym => "csym",
            Identity::Gca => "gca",
        }
    }

    /// Parses comma-separated names; `all` yields every identity.
    pub fn parse_list(s: &str) -> std::result::Result<Vec<Identity>, CliError> {
        let mut out = Vec::new();
        for name in s.split(',').map(str::trim) {
            if name == "all" {
                out.extend_from_slice(&Self::ALL);
                continue;
            }
            let id = Self::ALL
                .iter()
                .find(|i| i.name() == name)
                .ok_or_else(|| CliError::config(format!("unknown identity {name:?}")))?;
            out.push(*id);
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub identity: String,
    pub matrix: String,
    pub passed: bool,
    /// Number of individual instances checked.
    pub checked: usize,
    /// Failure description with the witness polynomial, if any.
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub matrix: String,
    pub records: Vec<CheckRecord>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            EXIT_OK
        } else {
            EXIT_VIOLATION
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).unwrap() + "\n",
            Format::Text => {
                let mut s = String::new();
                for r in &self.records {
                    let status = if r.passed { "PASS" } else { "FAIL" };
                    let _ = writeln!(s, "{status} {} on {} ({} checked)", r.identity, r.matrix, r.checked);
                    if let Some(w) = &r.witness {
                        let _ = writeln!(s, "  {w}");
                    }
                }
                s
            }
        }
    }
}

/// Runs the requested identities on the configured matrix. Only a bad
/// configuration is an `Err`; violated identities are reported as failed
/// records.
pub fn run_verify(config: &RunConfig, identities: &[Identity]) -> std::result::Result<VerifyReport, CliError> {
    let m = load_matrix(&config.matrix)?;
    let engine = config.engine(&m)?;
    let mut ids = identities.to_vec();
    ids.sort_by_key(|i| i.name());
    ids.dedup();
    let mut records = Vec::new();
    for id in ids {
        log::info!("checking {} on {}", id.name(), m.name);
        let r = run_identity(&engine, id, config);
        let (passed, checked, witness) = match r {
            Ok(c) => (true, c, None),
            Err(e) => (false, 0, Some(e.to_string())),
        };
        records.push(CheckRecord { identity: id.name().into(), matrix: m.name.clone(), passed, checked, witness });
    }
    Ok(VerifyReport { matrix: m.name, records })
}

/// One identity on a prepared engine; the count of instances checked.
pub fn run_identity(engine: &ThetaEngine, id: Identity, config: &RunConfig) -> Result<usize> {
    match id {
        Identity::Thetaxi => check_thetaxi(engine),
        Identity::Cheby => check_cheby(engine, 4),
        Identity::Imexch => check_imexch(engine),
        Identity::Expansion => check_expansion(engine, 2),
        Identity::TubeClosure => check_tube_closure(engine, 2),
        Identity::Csym => check_csym(engine, config.samples, config.seed),
        Identity::Gca => check_gca(engine, config.bounds.graph_budget),
    }
}

fn violated(msg: String) -> Error {
    Error::IdentityViolated(msg)
}

/// ϑ_{ν_c(δ)} is the same from every β ∈ Simples, is pointed at ν_c(δ) and
/// has denominator vector δ.
pub fn check_thetaxi(engine: &ThetaEngine) -> Result<usize> {
    let td = engine.theta_delta()?;
    let mut count = 0;
    for t in &engine.tubes {
        for i in 0..t.size() {
            let p = engine.theta_delta_from(t.id, i)?;
            if p != td.poly {
                return Err(violated(format!(
                    "ϑ_δ from tube {} position {i} differs: {}",
                    t.id,
                    &p - &td.poly
                )));
            }
            count += 1;
        }
    }
    let nu = engine.data.nu_c(&engine.data.delta)?;
    let label = engine.label_of(&td.poly)?;
    if label != nu {
        return Err(violated(format!("ϑ_δ is pointed at {label}, expected {nu}")));
    }
    let den = seeds::denominator_vector(&td.poly);
    if den != engine.data.delta {
        return Err(violated(format!("ϑ_δ has denominator vector {den}, expected δ = {}", engine.data.delta)));
    }
    Ok(count + 2)
}

fn specialize_y(engine: &ThetaEngine, p: &LaurentPoly) -> Result<LaurentPoly> {
    let ctx = engine.ctx();
    let n = engine.n();
    let images: Vec<LaurentPoly> = (0..ctx.len())
        .map(|i| if i < n { LaurentPoly::var(ctx, i) } else { LaurentPoly::one(ctx) })
        .collect();
    p.substitute(&images)
}

/// Products of multiples of ϑ_{ν_c(δ)} up to `kmax`, both as polynomial
/// identities and through the theta-basis expansion, and the Chebyshev form
/// after y ↦ 1.
pub fn check_cheby(engine: &ThetaEngine, kmax: i64) -> Result<usize> {
    let yd = |k: i64| engine.y_monomial(&engine.data.delta.scale(k));
    let nu = engine.data.nu_c(&engine.data.delta)?;
    let mut count = 0;
    for k in 1..=kmax {
        let tk = engine.theta_k_delta(k)?;
        for l in 1..=k {
            let tl = engine.theta_k_delta(l)?;
            let lhs = &tk.poly * &tl.poly;
            let mut expect = BTreeMap::new();
            expect.insert(nu.scale(k + l), engine.one());
            let rhs = if k == l {
                expect.insert(nu.scale(0), &yd(k) + &yd(k));
                &engine.theta_k_delta(2 * k)?.poly + &(&yd(k) + &yd(k))
            } else {
                expect.insert(nu.scale(k - l), yd(l));
                &engine.theta_k_delta(k + l)?.poly + &(&yd(l) * &engine.theta_k_delta(k - l)?.poly)
            };
            if lhs != rhs {
                return Err(violated(format!("ϑ_{k}δ·ϑ_{l}δ: lhs − rhs = {}", &lhs - &rhs)));
            }
            let combo = engine.expand_product(&tk, &tl)?;
            if combo != expect {
                return Err(violated(format!("ϑ_{k}δ·ϑ_{l}δ expands to {}", combo_string(&combo))));
            }
            count += 2;
        }
        let x = specialize_y(engine, &engine.theta_delta()?.poly)?;
        let sk = specialize_y(engine, &tk.poly)?;
        let ch = theta::chebyshev(&x, k);
        if sk != ch {
            return Err(violated(format!("ϑ_{k}δ at y = 1 minus T_{k}: {}", &sk - &ch)));
        }
        count += 1;
    }
    Ok(count)
}

/// Three-term exchanges for every ordered pair of distinct orbit elements and
/// two-term exchanges for every non-maximal arc of every maximal compatible
/// set of every tube.
pub fn check_imexch(engine: &ThetaEngine) -> Result<usize> {
    let mut count = 0;
    for t in &engine.tubes {
        let k = t.size();
        for i in 0..k {
            for j in 0..k {
                if i != j {
                    engine.imaginary_exchange(t.id, i, j)?;
                    count += 1;
                }
            }
        }
        for set in gca::maximal_compatible_sets(&engine.tubes, t) {
            for gamma in &set {
                if let ExchangeShape::Nested { .. } = affine::exchange_shape(t, &set, gamma)? {
                    engine.real_exchange(&set, gamma)?;
                    count += 1;
                }
            }
        }
    }
    Ok(count)
}

/// Reduced tube profiles (some entry zero) with entries at most `bound`.
fn reduced_profiles(k: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|p: Vec<i64>| {
                (0..=bound).map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out.retain(|p| p.contains(&0));
    out
}

/// All φ = mδ + Σ (tube profile) with m ≤ `bound` and every profile entry at
/// most `bound`.
pub fn wall_points(data: &AffineData, tubes: &[Tube], bound: i64) -> Vec<RootVec> {
    let mut pts: Vec<RootVec> = vec![RootVec::zero(data.n)];
    for t in tubes {
        let profs = reduced_profiles(t.size(), bound);
        pts = pts
            .iter()
            .flat_map(|p| {
                profs.iter().map(move |prof| {
                    prof.iter().zip(&t.orbit).fold(p.clone(), |acc, (&a, b)| &acc + &b.scale(a))
                })
            })
            .collect();
    }
    let mut out = Vec::new();
    for m in 0..=bound {
        for p in &pts {
            let v = &data.delta.scale(m) + p;
            if !v.is_zero() {
                out.push(v);
            }
        }
    }
    out
}

/// For φ in the imaginary wall with small coordinates: the expansion
/// reassembles φ, its arcs are pairwise compatible, and ϑ_{ν_c(φ)} is
/// pointed at ν_c(φ) with denominator vector φ.
pub fn check_expansion(engine: &ThetaEngine, bound: i64) -> Result<usize> {
    let mut count = 0;
    for phi in wall_points(&engine.data, &engine.tubes, bound) {
        let e = engine.expansion(&phi)?;
        let back = affine::expansion_vector(&engine.data, &engine.tubes, &e);
        if back != phi {
            return Err(violated(format!("expansion of {phi} reassembles to {back}")));
        }
        for a in e.arcs.keys() {
            for b in e.arcs.keys() {
                if !affine::compatible(&engine.tubes, a, b) {
                    return Err(violated(format!("expansion of {phi} uses incompatible arcs {a} and {b}")));
                }
            }
        }
        let th = engine.theta_imaginary(&phi)?;
        let label = engine.label_of(&th.poly)?;
        let nu = engine.data.nu_c(&phi)?;
        if label != nu || th.label != nu {
            return Err(violated(format!("ϑ for {phi} is pointed at {label}, expected {nu}")));
        }
        let den = seeds::denominator_vector(&th.poly);
        if den != phi {
            return Err(violated(format!("ϑ_ν(φ) for φ = {phi} has denominator vector {den}")));
        }
        count += 1;
    }
    Ok(count)
}

#[derive(Clone, Debug)]
enum Generator {
    Delta,
    Arc(TubeRoot),
}

impl Generator {
    fn describe(&self) -> String {
        match self {
            Generator::Delta => "δ".into(),
            Generator::Arc(r) => r.to_string(),
        }
    }
}

fn combo_string(c: &theta::ThetaCombo) -> String {
    let parts: Vec<String> = c.iter().map(|(k, v)| format!("({v})·ϑ[{k}]")).collect();
    parts.join(" + ")
}

/// Is `v` an integer combination of the orbit elements of `t`?
fn in_tube_lattice(t: &Tube, v: &RootVec) -> bool {
    let q = |x: i64| BigRational::from_integer(BigInt::from(x));
    let a: Vec<Vec<BigRational>> = (0..v.len()).map(|i| t.orbit.iter().map(|b| q(b[i])).collect()).collect();
    let rhs: Vec<BigRational> = v.0.iter().map(|&x| q(x)).collect();
    linalg::solve(&a, &rhs).is_some_and(|sol| sol.iter().all(|c| c.is_integer()))
}

fn relabel(t: &Tube) -> Tube {
    Tube { id: 0, orbit: t.orbit.clone() }
}

/// Products of pairs of generators ϑ_{ν_c(α)} (arcs of length ≤ `max_len`)
/// and ϑ_{ν_c(δ)}: the expansion has zero remainder, labels stay in the
/// imaginary wall, products within one imaginary cone stay on the dominance
/// chain, and products within one tube stay in the tube's span.
pub fn check_tube_closure(engine: &ThetaEngine, max_len: usize) -> Result<usize> {
    let data = &engine.data;
    let nu_delta = data.nu_c(&data.delta)?;
    let mut gens = vec![Generator::Delta];
    for t in &engine.tubes {
        for r in t.arcs() {
            if r.len <= max_len {
                gens.push(Generator::Arc(r));
            }
        }
    }
    let theta_of = |g: &Generator| match g {
        Generator::Delta => engine.theta_delta(),
        Generator::Arc(r) => engine.theta_tube_root(r),
    };
    let mut count = 0;
    for (i, g1) in gens.iter().enumerate() {
        for g2 in &gens[i..] {
            let (a, b) = (theta_of(g1)?, theta_of(g2)?);
            let what = || format!("ϑ[{}]·ϑ[{}]", g1.describe(), g2.describe());
            let combo = engine.expand_product(&a, &b)?;
            let rem = &(&a.poly * &b.poly) - &engine.combo_value(&combo)?;
            if !rem.is_zero() {
                return Err(violated(format!("{}: nonzero remainder {rem}", what())));
            }
            let lambda = &a.label + &b.label;
            let same_cone = match (g1, g2) {
                (Generator::Arc(r1), Generator::Arc(r2)) => affine::compatible(&engine.tubes, r1, r2),
                _ => true,
            };
            let tube = match (g1, g2) {
                (Generator::Arc(r1), Generator::Arc(r2)) if r1.tube == r2.tube => Some(r1.tube),
                (Generator::Arc(r), Generator::Delta) | (Generator::Delta, Generator::Arc(r)) => Some(r.tube),
                _ => None,
            };
            for (kappa, coeff) in &combo {
                let phi = data.nu_c_inverse(kappa);
                if !affine::in_imaginary_cone(data, &engine.tubes, &phi) {
                    return Err(violated(format!("{}: label {kappa} leaves the imaginary wall", what())));
                }
                if same_cone {
                    let diff = &lambda - kappa;
                    let on_chain = (0..=lambda.0.iter().map(|v| v.abs()).sum::<i64>())
                        .any(|a| nu_delta.scale(2 * a) == diff);
                    if !on_chain {
                        return Err(violated(format!("{}: label {kappa} is off the dominance chain", what())));
                    }
                }
                if let Some(o) = tube {
                    let t = &engine.tubes[o];
                    if !affine::in_imaginary_cone(data, std::slice::from_ref(&relabel(t)), &phi) {
                        return Err(violated(format!("{}: label {kappa} leaves the span of tube {o}", what())));
                    }
                    let n = engine.n();
                    for (e, _) in coeff.terms() {
                        let y = RootVec(e[n..].iter().map(|&v| v as i64).collect());
                        if !in_tube_lattice(t, &y) {
                            return Err(violated(format!("{}: coefficient y^{y} is outside tube {o}", what())));
                        }
                    }
                }
            }
            count += 1;
        }
    }
    Ok(count)
}

/// Mutation symmetry of B along the source-to-sink order, and the
/// finite/infinite orbit dichotomy of η_{12⋯n} on sampled lattice points.
pub fn check_csym(engine: &ThetaEngine, samples: usize, seed: u64) -> Result<usize> {
    let data = &engine.data;
    let b = &data.b;
    let fwd = seeds::mutate_rows(b, data.order[0]);
    let fwd = data.order[1..].iter().fold(fwd, |m, &k| seeds::mutate_rows(&m, k));
    if &fwd != b {
        return Err(violated(format!("μ along {:?} maps B to {fwd:?}", data.order)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for s in 0..samples {
        let lambda = sample_point(engine, &mut rng, s % 2 == 0);
        eta_dichotomy(engine, &lambda)?;
    }
    Ok(samples + 1)
}

/// Alternately a random lattice point of the imaginary wall or a random
/// small lattice point.
pub fn sample_point(engine: &ThetaEngine, rng: &mut impl Rng, on_wall: bool) -> WeightVec {
    let data = &engine.data;
    let n = data.n;
    if on_wall {
        let mut phi = data.delta.scale(rng.gen_range(0..=3));
        for t in &engine.tubes {
            let zero = rng.gen_range(0..t.size());
            for (i, b) in t.orbit.iter().enumerate() {
                if i != zero {
                    phi = &phi + &b.scale(rng.gen_range(0..=3));
                }
            }
        }
        data.nu_c(&phi).unwrap()
    } else {
        WeightVec((0..n).map(|_| rng.gen_range(-5..=5)).collect())
    }
}

pub fn in_wall(engine: &ThetaEngine, lambda: &WeightVec) -> bool {
    affine::in_imaginary_cone(&engine.data, &engine.tubes, &engine.data.nu_c_inverse(lambda))
}

fn norm(v: &WeightVec) -> i64 {
    v.0.iter().map(|x| x.abs()).sum()
}

/// Points of the imaginary wall return to themselves after lcm(tube sizes)
/// steps of η_{12⋯n} without leaving the wall. Other points never repeat
/// within ‖λ‖₁ + 8 blocks of that many steps, and by then the norm grows
/// strictly from block to block and exceeds ‖λ‖₁. The norm may dip first
/// while the orbit passes close to the origin.
pub fn eta_dichotomy(engine: &ThetaEngine, lambda: &WeightVec) -> Result<()> {
    let data = &engine.data;
    let word = affine::symmetry_word(data);
    let period = affine::orbit_lcm(&engine.tubes);
    let step = |v: &WeightVec| seeds::mutation_map_eta(&data.b, &word, v);
    if in_wall(engine, lambda) {
        let mut v = lambda.clone();
        for _ in 0..period {
            v = step(&v);
            if !in_wall(engine, &v) {
                return Err(violated(format!("η orbit of {lambda} leaves the imaginary wall at {v}")));
            }
        }
        if &v != lambda {
            return Err(violated(format!("η^{period} moves {lambda} on the wall to {v}")));
        }
        return Ok(());
    }
    let blocks = norm(lambda) as usize + 8;
    let mut seen = HashSet::new();
    let mut v = lambda.clone();
    let mut norms = vec![norm(&v)];
    for _ in 0..blocks {
        for _ in 0..period {
            if !seen.insert(v.clone()) {
                return Err(violated(format!("η orbit of {lambda} (off the wall) is periodic")));
            }
            v = step(&v);
        }
        norms.push(norm(&v));
    }
    let tail = &norms[norms.len() - 5..];
    if tail.windows(2).any(|w| w[1] <= w[0]) || tail[4] <= norms[0] {
        return Err(violated(format!("η orbit of {lambda} off the wall has block norms {norms:?}")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GcaStats {
    /// Tube ids; several for the product seed.
    pub tubes: Vec<usize>,
    pub report: gca::GcaReport,
}

/// Exchange graph checks for every tube and, with several tubes, for the
/// product seed.
pub fn gca_stats(engine: &ThetaEngine, budget: usize) -> Result<Vec<GcaStats>> {
    let mut out = Vec::new();
    for t in &engine.tubes {
        let g = gca::enumerate_exchange_graph(&gca::build_tube_seed(&engine.tubes, t.id, &gca::fan_set(t))?, budget)?;
        let report = gca::verify_graph(engine, &g, gca::maximal_compatible_sets(&engine.tubes, t).len())?;
        ratio_identity(&g)?;
        out.push(GcaStats { tubes: vec![t.id], report });
    }
    if engine.tubes.len() > 1 {
        let js: Vec<Vec<TubeRoot>> = engine.tubes.iter().map(gca::fan_set).collect();
        let s0 = gca::build_product_seed(&engine.tubes, &js)?;
        let g = gca::enumerate_exchange_graph(&s0, budget)?;
        let expected = engine
            .tubes
            .iter()
            .map(|t| gca::maximal_compatible_sets(&engine.tubes, t).len())
            .product();
        let report = gca::verify_graph(engine, &g, expected)?;
        ratio_identity(&g)?;
        out.push(GcaStats { tubes: engine.tubes.iter().map(|t| t.id).collect(), report });
    }
    Ok(out)
}

fn ratio_identity(g: &gca::ExchangeGraph) -> Result<()> {
    for e in &g.edges {
        // the stored target may be indexed differently, so mutate again
        let from = &g.vertices[e.from];
        if !gca::ratio_identity_holds(from, &gca::gca_mutate(from, e.direction)?, e.direction, false) {
            return Err(violated(format!("coefficient ratio identity fails on edge {} → {}", e.from, e.to)));
        }
    }
    Ok(())
}

pub fn check_gca(engine: &ThetaEngine, budget: usize) -> Result<usize> {
    Ok(gca_stats(engine, budget)?.iter().map(|s| s.report.edges).sum())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcRow {
    pub arc: String,
    pub root: RootVec,
    pub nu_c: WeightVec,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TubeRow {
    pub id: usize,
    pub size: usize,
    /// The Simples orbit β_[0], …, β_[k−1].
    pub orbit: Vec<RootVec>,
    pub orbit_nu_c: Vec<WeightVec>,
    pub arcs: Vec<ArcRow>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaRow {
    pub name: String,
    pub label: WeightVec,
    pub text: String,
    pub poly: PolyJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub matrix: String,
    pub b: Vec<Vec<i64>>,
    pub symmetrizers: Vec<i64>,
    pub cartan: Vec<Vec<i64>>,
    pub delta: RootVec,
    /// 1-based source-to-sink order defining c.
    pub coxeter_order: Vec<usize>,
    pub nu_c_delta: WeightVec,
    pub tubes: Vec<TubeRow>,
    pub thetas: Vec<ThetaRow>,
    pub gca: Vec<GcaStats>,
}

pub fn tube_rows(engine: &ThetaEngine) -> Result<Vec<TubeRow>> {
    let data = &engine.data;
    engine
        .tubes
        .iter()
        .map(|t| {
            let arcs = t
                .arcs()
                .iter()
                .map(|r| {
                    let v = engine.root_vector(r);
                    Ok(ArcRow { arc: r.to_string(), nu_c: data.nu_c(&v)?, root: v })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(TubeRow {
                id: t.id,
                size: t.size(),
                orbit_nu_c: t.orbit.iter().map(|b| data.nu_c(b)).collect::<Result<_>>()?,
                orbit: t.orbit.clone(),
                arcs,
            })
        })
        .collect()
}

fn theta_row(name: String, th: &ThetaFunction) -> ThetaRow {
    ThetaRow { name, label: th.label.clone(), text: th.poly.to_string(), poly: th.poly.to_json() }
}

pub fn build_report(config: &RunConfig) -> std::result::Result<Report, CliError> {
    let m = load_matrix(&config.matrix)?;
    let engine = config.engine(&m)?;
    let data = &engine.data;
    let mut thetas = Vec::new();
    for k in 1..=2 {
        thetas.push(theta_row(format!("{k}*delta"), &engine.theta_k_delta(k)?));
    }
    for t in &engine.tubes {
        for r in t.arcs() {
            thetas.push(theta_row(format!("arc {r}"), &engine.theta_tube_root(&r)?));
        }
    }
    Ok(Report {
        matrix: m.name.clone(),
        b: data.b.clone(),
        symmetrizers: data.d.clone(),
        cartan: data.a.clone(),
        delta: data.delta.clone(),
        coxeter_order: data.order.iter().map(|i| i + 1).collect(),
        nu_c_delta: data.nu_c(&data.delta)?,
        tubes: tube_rows(&engine)?,
        thetas,
        gca: gca_stats(&engine, config.bounds.graph_budget)?,
    })
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).unwrap() + "\n",
            Format::Text => {
                let mut s = String::new();
                let _ = writeln!(s, "matrix {}", self.matrix);
                let _ = writeln!(s, "B = {:?}", self.b);
                let _ = writeln!(s, "symmetrizers = {:?}", self.symmetrizers);
                let _ = writeln!(s, "Cartan = {:?}", self.cartan);
                let _ = writeln!(s, "delta = {}", self.delta);
                let _ = writeln!(s, "Coxeter order = {:?}", self.coxeter_order);
                let _ = writeln!(s, "nu_c(delta) = {}", self.nu_c_delta);
                if self.tubes.is_empty() {
                    let _ = writeln!(s, "Simples: none");
                }
                for t in &self.tubes {
                    let orbit: Vec<String> = t.orbit.iter().map(|b| b.to_string()).collect();
                    let _ = writeln!(s, "tube {} (size {}): Simples orbit {}", t.id, t.size, orbit.join(" "));
                    for a in &t.arcs {
                        let _ = writeln!(s, "  {}  root {}  nu_c {}", a.arc, a.root, a.nu_c);
                    }
                }
                for th in &self.thetas {
                    let _ = writeln!(s, "theta[{}] label {} = {}", th.name, th.label, th.text);
                }
                for g in &self.gca {
                    let r = &g.report;
                    let _ = writeln!(
                        s,
                        "gca tubes {:?}: {} seeds (expected {}), {} edges, regular {}",
                        g.tubes, r.vertices, r.expected_vertices, r.edges, r.regular
                    );
                }
                s
            }
        }
    }
}

/// Converts 1-based CLI indices to 0-based ones.
pub fn parse_word(s: &str, n: usize) -> std::result::Result<Vec<usize>, CliError> {
    if s.trim().is_empty() {
        return Ok(vec![]);
    }
    parse_vector(s)?
        .into_iter()
        .map(|k| {
            if k < 1 || k as usize > n {
                Err(CliError::config(format!("mutation index {k} out of range 1..={n}")))
            } else {
                Ok(k as usize - 1)
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedOutput {
    /// The mutated extended matrix, readable again as a matrix file.
    pub matrix: MatrixFile,
    /// Mutations applied, 1-based, in order of application.
    pub word: Vec<usize>,
    pub cluster: Vec<PolyJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_vectors: Option<Vec<WeightVec>>,
}

pub fn seed_output(
    config: &RunConfig,
    word: &str,
    with_g: bool,
) -> std::result::Result<SeedOutput, CliError> {
    let m = load_matrix(&config.matrix)?;
    let ext = config.extended_matrix(&m)?;
    let word = parse_word(word, ext.n())?;
    let seed = seeds::Seed::initial(ext).mutate_word(&word)?;
    let g_vectors = if with_g {
        Some((0..seed.matrix.n()).map(|i| seed.g_vector(i)).collect::<Result<Vec<_>>>()?)
    } else {
        None
    };
    Ok(SeedOutput {
        matrix: MatrixFile {
            name: None,
            n: seed.matrix.n(),
            m: seed.matrix.m(),
            matrix: seed.matrix.rows().to_vec(),
        },
        word: word.iter().map(|k| k + 1).collect(),
        cluster: seed.cluster.iter().map(|p| p.to_json()).collect(),
        g_vectors,
    })
}

impl SeedOutput {
    pub fn render(&self, format: Format) -> String {
        if format == Format::Json {
            return serde_json::to_string_pretty(self).unwrap() + "\n";
        }
        let mut s = String::new();
        let _ = writeln!(s, "word {:?}", self.word);
        for row in &self.matrix.matrix {
            let _ = writeln!(s, "  {row:?}");
        }
        for (i, p) in self.cluster.iter().enumerate() {
            let poly = LaurentPoly::from_json_standalone(self.matrix.n, p).unwrap();
            let _ = write!(s, "x{}' = {poly}", i + 1);
            if let Some(g) = &self.g_vectors {
                let _ = write!(s, "   g = {}", g[i]);
            }
            s.push('\n');
        }
        s
    }
}

fn render_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).unwrap() + "\n"
}

pub fn tube_info(config: &RunConfig) -> std::result::Result<String, CliError> {
    let m = load_matrix(&config.matrix)?;
    let engine = config.engine(&m)?;
    render_tubes(config.format, &engine)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TubeInfo {
    pub delta: RootVec,
    pub nu_c_delta: WeightVec,
    pub tubes: Vec<TubeRow>,
}

fn render_tubes(format: Format, engine: &ThetaEngine) -> std::result::Result<String, CliError> {
    let data = &engine.data;
    let info = TubeInfo { delta: data.delta.clone(), nu_c_delta: data.nu_c(&data.delta)?, tubes: tube_rows(engine)? };
    if format == Format::Json {
        return Ok(render_json(&info));
    }
    let mut s = String::new();
    let _ = writeln!(s, "delta = {}  nu_c(delta) = {}", info.delta, info.nu_c_delta);
    if info.tubes.is_empty() {
        let _ = writeln!(s, "no tubes");
    }
    for t in &info.tubes {
        let _ = writeln!(s, "tube {} (size {})", t.id, t.size);
        for (b, nu) in t.orbit.iter().zip(&t.orbit_nu_c) {
            let _ = writeln!(s, "  simple {b}  nu_c {nu}");
        }
        for a in &t.arcs {
            let _ = writeln!(s, "  {}  root {}  nu_c {}", a.arc, a.root, a.nu_c);
        }
    }
    Ok(s)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaOutput {
    pub label: WeightVec,
    pub text: String,
    pub poly: PolyJson,
}

pub fn theta_command(config: &RunConfig, target: &str) -> std::result::Result<String, CliError> {
    let m = load_matrix(&config.matrix)?;
    let engine = config.engine(&m)?;
    let label = parse_label(&engine.data, target)?;
    let th = theta_for_label(&engine, &label)?;
    let out = ThetaOutput { label: th.label.clone(), text: th.poly.to_string(), poly: th.poly.to_json() };
    Ok(match config.format {
        Format::Json => render_json(&out),
        Format::Text => format!("theta[{}] = {}\n", out.label, out.text),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpandTerm {
    pub label: WeightVec,
    pub coefficient: PolyJson,
    pub text: String,
}

pub fn expand_command(config: &RunConfig, left: &str, right: &str) -> std::result::Result<String, CliError> {
    let m = load_matrix(&config.matrix)?;
    let engine = config.engine(&m)?;
    let a = theta_for_label(&engine, &parse_label(&engine.data, left)?)?;
    let b = theta_for_label(&engine, &parse_label(&engine.data, right)?)?;
    let combo = engine.expand_product(&a, &b)?;
    let rem = &(&a.poly * &b.poly) - &engine.combo_value(&combo)?;
    if !rem.is_zero() {
        return Err(Error::IdentityViolated(format!("nonzero remainder {rem}")).into());
    }
    let terms: Vec<ExpandTerm> = combo
        .iter()
        .map(|(k, c)| ExpandTerm { label: k.clone(), coefficient: c.to_json(), text: c.to_string() })
        .collect();
    Ok(match config.format {
        Format::Json => render_json(&terms),
        Format::Text => {
            let mut s = String::new();
            for t in &terms {
                let _ = writeln!(s, "({}) * theta[{}]", t.text, t.label);
            }
            s
        }
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionOutput {
    pub root: RootVec,
    pub m_delta: i64,
    /// (arc, multiplicity, root vector)
    pub arcs: Vec<(String, i64, RootVec)>,
    pub label: WeightVec,
}

/// The c-cluster expansion of a root in the imaginary wall.
pub fn expansion_command(config: &RunConfig, root: &str) -> std::result::Result<String, CliError> {
    let m = load_matrix(&config.matrix)?;
    let engine = config.engine(&m)?;
    let phi = RootVec(parse_vector(root)?);
    if phi.len() != engine.n() {
        return Err(CliError::config(format!("expected {} coordinates", engine.n())));
    }
    let e = engine.expansion(&phi)?;
    let out = ExpansionOutput {
        label: engine.data.nu_c(&phi)?,
        root: phi,
        m_delta: e.m_delta,
        arcs: e.arcs.iter().map(|(r, &k)| (r.to_string(), k, engine.root_vector(r))).collect(),
    };
    Ok(match config.format {
        Format::Json => render_json(&out),
        Format::Text => {
            let mut s = format!("{} = {}*delta", out.root, out.m_delta);
            for (a, k, v) in &out.arcs {
                let _ = write!(s, " + {k}*{a}{v}");
            }
            let _ = writeln!(s, "\nnu_c = {}", out.label);
            s
        }
    })
}

fn rank2_matrix(m: &LoadedMatrix) -> std::result::Result<Vec<Vec<i64>>, CliError> {
    if m.file.n != 2 {
        return Err(CliError::config(format!("{} is not a rank-2 matrix", m.name)));
    }
    Ok(m.b())
}

pub fn parse_point(s: &str) -> std::result::Result<scatter2::Point, CliError> {
    let parts: Vec<BigRational> = s
        .split(',')
        .map(|t| t.trim().parse::<BigRational>().map_err(|_| CliError::config(format!("not a rational: {t:?}"))))
        .collect::<std::result::Result<_, _>>()?;
    match <[BigRational; 2]>::try_from(parts) {
        Ok(p) => Ok(p),
        Err(_) => Err(CliError::config("an endpoint has two coordinates")),
    }
}

pub fn theta2_command(
    config: &RunConfig,
    weight: &str,
    endpoint: Option<&str>,
) -> std::result::Result<String, CliError> {
    let m = load_matrix(&config.matrix)?;
    let b = rank2_matrix(&m)?;
    let order = config.bounds.series_order;
    let sc = scatter2::complete_scattering_rank2(&b, order)?;
    let lambda = WeightVec(parse_vector(weight)?);
    if lambda.len() != 2 {
        return Err(CliError::config("rank-2 weight expected"));
    }
    let chi = match endpoint {
        Some(e) => parse_point(e)?,
        None => scatter2::default_endpoint(),
    };
    let p = scatter2::theta_at(&sc, &lambda, &chi, order)?;
    let out = ThetaOutput { label: lambda, text: p.to_string(), poly: p.to_json() };
    Ok(match config.format {
        Format::Json => render_json(&out),
        Format::Text => format!("theta[{}] through y-degree {order} = {}\n", out.label, out.text),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallJson {
    pub normal: RootVec,
    pub region: scatter2::WallRegion,
    /// Coefficients of f(t) as decimal strings.
    pub series: Vec<String>,
}

impl WallJson {
    pub fn new(w: &scatter2::Wall2) -> Self {
        WallJson {
            normal: w.normal.clone(),
            region: w.region.clone(),
            series: w.series.iter().map(|c| c.to_string()).collect(),
        }
    }

    pub fn to_wall(&self) -> std::result::Result<scatter2::Wall2, CliError> {
        let series = self
            .series
            .iter()
            .map(|c| c.parse::<BigInt>().map_err(|_| CliError::config(format!("bad coefficient {c:?}"))))
            .collect::<std::result::Result<_, _>>()?;
        Ok(scatter2::Wall2 { normal: self.normal.clone(), region: self.region.clone(), series })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScatterOutput {
    pub b: Vec<Vec<i64>>,
    pub order: usize,
    pub consistent: bool,
    pub walls: Vec<WallJson>,
}

pub fn scatter2_command(config: &RunConfig, dump: bool) -> std::result::Result<String, CliError> {
    let m = load_matrix(&config.matrix)?;
    let b = rank2_matrix(&m)?;
    let sc = scatter2::complete_scattering_rank2(&b, config.bounds.series_order)?;
    let consistent = scatter2::is_consistent(&sc);
    let out = ScatterOutput {
        b,
        order: sc.order,
        consistent,
        walls: if dump { sc.walls.iter().map(WallJson::new).collect() } else { vec![] },
    };
    Ok(render_scatter(&out, sc.walls.len(), config.format))
}

/// Re-reads a wall dump and checks the diagram it describes.
pub fn scatter2_check_command(path: &str, format: Format) -> std::result::Result<String, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("{path}: {e}")))?;
    let mut out: ScatterOutput =
        serde_json::from_str(&text).map_err(|e| CliError::config(format!("{path}: {e}")))?;
    let b = out.b.clone();
    if b.len() != 2 || b.iter().any(|r| r.len() != 2) {
        return Err(CliError::config(format!("{path}: expected a 2x2 matrix")));
    }
    let d = seeds::symmetrizers(&b).map_err(|e| CliError::config(format!("{path}: {e}")))?;
    let walls = out.walls.iter().map(WallJson::to_wall).collect::<std::result::Result<Vec<_>, _>>()?;
    let bad = |w: &scatter2::Wall2| {
        let ray_ok = match &w.region {
            scatter2::WallRegion::Line => true,
            scatter2::WallRegion::Ray(r) => r.len() == 2 && r.iter().any(|&c| c != 0),
        };
        w.normal.len() != 2 || !w.normal.is_nonnegative() || w.normal.is_zero() || !ray_ok || w.series.is_empty()
    };
    if walls.iter().any(bad) {
        return Err(CliError::config(format!("{path}: malformed wall")));
    }
    let count = walls.len();
    let sc = scatter2::Scattering2 {
        b: [[b[0][0], b[0][1]], [b[1][0], b[1][1]]],
        d: [d[0], d[1]],
        order: out.order,
        walls,
    };
    out.consistent = scatter2::is_consistent(&sc);
    Ok(render_scatter(&out, count, format))
}

fn render_scatter(out: &ScatterOutput, count: usize, format: Format) -> String {
    let mut s = match format {
        Format::Json => render_json(out),
        Format::Text => {
            let mut s = format!(
                "{} walls through order {}, consistent: {}\n",
                count, out.order, out.consistent
            );
            for w in &out.walls {
                let region = match &w.region {
                    scatter2::WallRegion::Line => "line".to_string(),
                    scatter2::WallRegion::Ray(r) => format!("ray ({},{})", r[0], r[1]),
                };
                let f: Vec<String> = w.series.iter().map(|c| c.to_string()).collect();
                let _ = writeln!(s, "normal {}  {region}  f = [{}]", w.normal, f.join(", "));
            }
            s
        }
    };
    if !out.consistent {
        s.push_str("inconsistent diagram\n");
    }
    s
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphOutput {
    pub tube: usize,
    pub vertices: Vec<gca::SeedJson>,
    pub edges: Vec<gca::GraphEdge>,
}

pub fn gca_graph_command(config: &RunConfig, tube: usize) -> std::result::Result<String, CliError> {
    let m = load_matrix(&config.matrix)?;
    let engine = config.engine(&m)?;
    let t = engine
        .tubes
        .get(tube)
        .ok_or_else(|| CliError::config(format!("tube {tube} does not exist ({} tubes)", engine.tubes.len())))?;
    let s0 = gca::build_tube_seed(&engine.tubes, tube, &gca::fan_set(t))?;
    let g = gca::enumerate_exchange_graph(&s0, config.bounds.graph_budget)?;
    let out = GraphOutput {
        tube,
        vertices: g.vertices.iter().map(|v| v.to_json()).collect(),
        edges: g.edges.clone(),
    };
    Ok(match config.format {
        Format::Json => render_json(&out),
        Format::Text => {
            let mut s = format!("tube {tube}: {} seeds, {} edges\n", g.vertices.len(), g.edges.len());
            for (i, v) in out.vertices.iter().enumerate() {
                let _ = writeln!(s, "seed {i}: {}", v.labels.join(" "));
            }
            for e in &out.edges {
                let _ = writeln!(
                    s,
                    "{} -> {} in direction {}: {} becomes {}",
                    e.from,
                    e.to,
                    e.direction + 1,
                    e.removed,
                    e.added
                );
            }
            s
        }
    })
}

pub fn gca_verify_command(config: &RunConfig) -> std::result::Result<String, CliError> {
    let m = load_matrix(&config.matrix)?;
    let engine = config.engine(&m)?;
    let stats = gca_stats(&engine, config.bounds.graph_budget)?;
    Ok(match config.format {
        Format::Json => render_json(&stats),
        Format::Text => {
            let mut s = String::new();
            if stats.is_empty() {
                let _ = writeln!(s, "no tubes");
            }
            for g in &stats {
                let r = &g.report;
                let _ = writeln!(
                    s,
                    "tubes {:?}: {} seeds (expected {}), {} edges, regular {}, {} J-mut checks, {} relations, {} specialized",
                    g.tubes,
                    r.vertices,
                    r.expected_vertices,
                    r.edges,
                    r.regular,
                    r.j_mut_checked,
                    r.relations_checked,
                    r.specialized_checked
                );
            }
            s
        }
    })
}
