//! Acceptance criteria, one PASS/FAIL line each. Run with
//! `cargo test --test acceptance`.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use affine_cluster::affine::{self, ExchangeShape, Tube};
use affine_cluster::cli;
use affine_cluster::fixtures;
use affine_cluster::gca;
use affine_cluster::scatter2;
use affine_cluster::seeds::{self, ExtendedExchangeMatrix, Seed};
use affine_cluster::theta::ThetaEngine;
use affine_cluster::{LaurentPoly, VarContext, WeightVec};

type Outcome = Result<String, String>;

fn engine(name: &str) -> Result<ThetaEngine, String> {
    ThetaEngine::new(&fixtures::matrix(name)).map_err(|e| format!("{name}: {e}"))
}

fn err<E: std::fmt::Display>(ctx: &str) -> impl Fn(E) -> String + '_ {
    move |e| format!("{ctx}: {e}")
}

/// Laurent polynomial in x1, x2, y1, y2 from (x exponents, y exponents,
/// coefficient) triples.
fn literal(ctx: &std::sync::Arc<VarContext>, terms: &[([i64; 2], [i64; 2], i64)]) -> LaurentPoly {
    terms.iter().fold(LaurentPoly::zero(ctx), |acc, (a, b, c)| {
        &acc + &LaurentPoly::xu_monomial(ctx, a, b, *c)
    })
}

/// x1 ↔ x2, y1 ↔ y2.
fn swap_indices(p: &LaurentPoly) -> LaurentPoly {
    let ctx = p.ctx();
    let images: Vec<LaurentPoly> = [1, 0, 3, 2].iter().map(|&i| LaurentPoly::var(ctx, i)).collect();
    p.substitute(&images).expect("monomial images")
}

fn rank2_delta_values(ctx: &std::sync::Arc<VarContext>) -> Vec<(&'static str, LaurentPoly)> {
    vec![
        (
            "kronecker",
            literal(ctx, &[([-1, 1], [0, 0], 1), ([-1, -1], [1, 0], 1), ([1, -1], [1, 1], 1)]),
        ),
        (
            "rank2-4-1",
            literal(
                ctx,
                &[([-2, 1], [0, 0], 1), ([-2, 0], [1, 0], 2), ([-2, -1], [2, 0], 1), ([2, -1], [2, 1], 1)],
            ),
        ),
        (
            "rank2-1-4",
            literal(
                ctx,
                &[([-1, 2], [0, 0], 1), ([-1, -2], [1, 0], 1), ([0, -2], [1, 1], 2), ([1, -2], [1, 2], 1)],
            ),
        ),
    ]
}

/// The same values in the factored form x^g (1 + Σ ŷ-monomials), with
/// ŷ_j = y_j Π x_i^{b_ij}.
fn rank2_factored(ctx: &std::sync::Arc<VarContext>, b: &[Vec<i64>], g: [i64; 2], f: &[([i64; 2], i64)]) -> LaurentPoly {
    let yhat = |j: usize| LaurentPoly::xu_monomial(ctx, &[b[0][j], b[1][j]], &[(j == 0) as i64, (j == 1) as i64], 1);
    let mut sum = LaurentPoly::zero(ctx);
    for (e, c) in f {
        let m = &yhat(0).pow(e[0]).unwrap() * &yhat(1).pow(e[1]).unwrap();
        sum = &sum + &m.scale(&(*c).into());
    }
    &LaurentPoly::xu_monomial(ctx, &g, &[0, 0], 1) * &sum
}

fn criterion1() -> Outcome {
    let ctx = VarContext::principal(2);
    let factored = [
        ([-1, 1], vec![([0, 0], 1), ([1, 0], 1), ([1, 1], 1)]),
        ([-2, 1], vec![([0, 0], 1), ([1, 0], 2), ([2, 0], 1), ([2, 1], 1)]),
        ([-1, 2], vec![([0, 0], 1), ([1, 0], 1), ([1, 1], 2), ([1, 2], 1)]),
    ];
    let mut checked = 0;
    for ((name, want), (g, f)) in rank2_delta_values(&ctx).into_iter().zip(factored) {
        let b = fixtures::matrix(name);
        if rank2_factored(&ctx, &b, g, &f) != want {
            return Err(format!("{name}: the two displayed forms disagree"));
        }
        for (fixture, expected) in [(name.to_string(), want.clone()), (format!("{name}-t"), swap_indices(&want))] {
            let e = engine(&fixture)?;
            let got = e.theta_delta().map_err(err(&fixture))?.poly.with_ctx(&ctx);
            if got != expected {
                return Err(format!("{fixture}: theta_delta = {got}, expected {expected}"));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} matrices"))
}

fn criterion2() -> Outcome {
    let order = 8;
    let mut checked = 0;
    for name in fixtures::RANK2 {
        let b = fixtures::matrix(name);
        let e = engine(name)?;
        let sc = scatter2::complete_scattering_rank2(&b, order).map_err(err(name))?;
        let nu = e.data.nu_c(&e.data.delta).map_err(err(name))?;
        for k in 1..=4 {
            let symbolic = e.theta_k_delta(k).map_err(err(name))?.poly;
            let symbolic = scatter2::truncate_y(&symbolic.with_ctx(&scatter2::rank2_ctx()), order);
            let lines = scatter2::theta_via_broken_lines(&sc, &nu.scale(k), order).map_err(err(name))?;
            if lines != symbolic {
                return Err(format!("{name}, k = {k}: broken lines give {lines}, symbolic {symbolic}"));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} theta functions at order {order}"))
}

fn criterion3() -> Outcome {
    let mut checked = 0;
    for name in ["kronecker", "rank2-4-1", "rank2-1-4", "A2tilde"] {
        let e = engine(name)?;
        let th = |k: i64| e.theta_k_delta(k).map(|t| t.poly).map_err(err(name));
        let yd = |k: i64| e.y_monomial(&e.data.delta.scale(k));
        for k in 1..=4 {
            let tk = th(k)?;
            let square = &tk * &tk;
            let rhs = &th(2 * k)? + &(&yd(k) + &yd(k));
            if square != rhs {
                return Err(format!("{name}: square of theta_{k}δ is off by {}", &square - &rhs));
            }
            checked += 1;
            for l in 1..k {
                let lhs = &tk * &th(l)?;
                let rhs = &th(k + l)? + &(&yd(l) * &th(k - l)?);
                if lhs != rhs {
                    return Err(format!("{name}: k = {k}, l = {l} is off by {}", &lhs - &rhs));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} identities"))
}

fn criterion4() -> Outcome {
    let mut checked = 0;
    for name in ["A2tilde", "A3tilde"] {
        let e = engine(name)?;
        let reference = e.theta_delta().map_err(err(name))?;
        for t in &e.tubes {
            for i in 0..t.size() {
                let p = e.theta_delta_from(t.id, i).map_err(err(name))?;
                if p != reference.poly {
                    return Err(format!("{name}: tube {} position {i} gives a different polynomial", t.id));
                }
                checked += 1;
            }
        }
        let nu = e.data.nu_c(&e.data.delta).map_err(err(name))?;
        let (g, _) = reference.poly.pointed_form(&e.principal_matrix()).map_err(err(name))?;
        if g != nu.0 {
            return Err(format!("{name}: pointed at {g:?}, expected {nu}"));
        }
    }
    Ok(format!("{checked} choices of β"))
}

fn criterion5() -> Outcome {
    // tubes of size 2 have no real exchangeable pairs; the last two fixtures
    // cover sizes 3 and 4
    let (mut imag, mut real) = (0, 0);
    for name in ["A2tilde", "A3tilde", "C2tilde", "A3tilde-31", "A4tilde-41"] {
        let e = engine(name)?;
        for t in &e.tubes {
            for i in 0..t.size() {
                for j in 0..t.size() {
                    if i != j {
                        e.imaginary_exchange(t.id, i, j).map_err(err(name))?;
                        imag += 1;
                    }
                }
            }
            let mut pairs = BTreeSet::new();
            for set in gca::maximal_compatible_sets(&e.tubes, t) {
                for gamma in &set {
                    let shape = affine::exchange_shape(t, &set, gamma).map_err(err(name))?;
                    if let ExchangeShape::Nested { .. } = shape {
                        let partner = affine::exchange_partner(&e.tubes, t, &set, gamma).map_err(err(name))?;
                        e.real_exchange(&set, gamma).map_err(err(name))?;
                        pairs.insert((*gamma.min(&partner), *gamma.max(&partner)));
                    }
                }
            }
            real += pairs.len();
        }
    }
    Ok(format!("{imag} imaginary and {real} real exchangeable pairs"))
}

fn criterion6() -> Outcome {
    let mut checked = 0;
    for name in ["A2tilde", "A3tilde"] {
        let e = engine(name)?;
        for phi in cli::wall_points(&e.data, &e.tubes, 2) {
            let th = e.theta_imaginary(&phi).map_err(err(name))?;
            let den = seeds::denominator_vector(&th.poly);
            if den != phi {
                return Err(format!("{name}: φ = {phi} has denominator vector {den}"));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} points of the imaginary wall"))
}

fn criterion7() -> Outcome {
    let mut checked = 0;
    for name in ["A2tilde", "A3tilde", "C2tilde"] {
        let e = engine(name)?;
        checked += cli::check_tube_closure(&e, 2).map_err(err(name))?;
    }
    Ok(format!("{checked} products"))
}

/// Arcs of a k-cycle as (start, len); compatible when one contains the other
/// or when they are disjoint with a gap on both sides.
fn brute_force_clusters(k: usize) -> usize {
    let arcs: Vec<(usize, usize)> = (1..k).flat_map(|len| (0..k).map(move |s| (s, len))).collect();
    let cover = |(s, l): (usize, usize)| -> u32 { (0..l).fold(0, |m, t| m | 1 << ((s + t) % k)) };
    let compat = |a: (usize, usize), b: (usize, usize)| {
        let (x, y) = (cover(a), cover(b));
        if x & y == x || x & y == y {
            return true;
        }
        let gap = (a.0 + a.1) % k != b.0 && (b.0 + b.1) % k != a.0;
        x & y == 0 && gap
    };
    let mut count = 0;
    for mask in 0u32..(1 << arcs.len()) {
        let chosen: Vec<_> = (0..arcs.len()).filter(|i| mask >> i & 1 == 1).map(|i| arcs[i]).collect();
        let ok = chosen.iter().enumerate().all(|(i, &a)| chosen[i + 1..].iter().all(|&b| compat(a, b)));
        if !ok {
            continue;
        }
        let maximal = arcs.iter().all(|a| chosen.contains(a) || chosen.iter().any(|&b| !compat(*a, b)));
        if maximal {
            count += 1;
        }
    }
    count
}

fn criterion8() -> Outcome {
    let mut summary = Vec::new();
    for (name, k) in [("A2tilde", 2), ("A3tilde-31", 3), ("A4tilde-41", 4)] {
        let e = engine(name)?;
        let t: &Tube = e.tubes.iter().find(|t| t.size() == k).ok_or(format!("{name}: no tube of size {k}"))?;
        let s0 = gca::build_tube_seed(&e.tubes, t.id, &gca::fan_set(t)).map_err(err(name))?;
        let g = gca::enumerate_exchange_graph(&s0, 10_000).map_err(err(name))?;
        let expected = brute_force_clusters(k);
        if g.vertices.len() != expected {
            return Err(format!("{name}: {} seeds, brute force gives {expected}", g.vertices.len()));
        }
        let jm = gca::j_mut_check(&g).map_err(err(name))?;
        let rel = gca::t_o_check(&e, &g, false).map_err(err(name))?;
        let spec = gca::t_o_check(&e, &g, true).map_err(err(name))?;
        summary.push(format!("k={k}: {expected} seeds, {jm} edges, {rel}+{spec} relations"));
    }
    Ok(summary.join("; "))
}

fn random_word(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let len = rng.gen_range(0..=10);
    let mut w: Vec<usize> = Vec::with_capacity(len);
    while w.len() < len {
        let k = rng.gen_range(0..n);
        if w.last() != Some(&k) {
            w.push(k);
        }
    }
    w
}

fn criterion9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let names = fixtures::names();
    for name in &names {
        let b = fixtures::matrix(name);
        for k in 0..b.len() {
            if seeds::mutate_rows(&seeds::mutate_rows(&b, k), k) != b {
                return Err(format!("{name}: μ_{} is not an involution on B", k + 1));
            }
        }
        let data = affine::AffineData::new(&b).map_err(err(name))?;
        let sym = data.order.iter().fold(b.clone(), |m, &k| seeds::mutate_rows(&m, k));
        if sym != b {
            return Err(format!("{name}: μ along {:?} does not fix B", data.order));
        }
    }
    let mut words = 0;
    while words < 500 {
        let name = names[words % names.len()];
        let b = fixtures::matrix(name);
        let s0 = Seed::initial(ExtendedExchangeMatrix::principal(&b).map_err(err(name))?);
        let w = random_word(&mut rng, b.len());
        let s = s0.mutate_word(&w).map_err(|e| format!("{name} {w:?}: {e}"))?;
        if let Some(&k) = w.last() {
            let back = s.mutate(k).map_err(err(name))?;
            let before = s0.mutate_word(&w[..w.len() - 1]).map_err(err(name))?;
            if back.cluster != before.cluster || back.matrix != before.matrix {
                return Err(format!("{name} {w:?}: mutating twice at {} is not the identity", k + 1));
            }
            let lhs = &s.cluster[k] * &before.cluster[k];
            if lhs != before.exchange_binomial(k).map_err(err(name))? {
                return Err(format!("{name} {w:?}: exchange relation fails"));
            }
        }
        if let Some(p) = s.cluster.iter().find(|p| !p.all_coefficients_nonnegative()) {
            return Err(format!("{name} {w:?}: cluster variable {p} has a negative coefficient"));
        }
        words += 1;
    }
    let mut samples = 0;
    for name in &names {
        let e = engine(name)?;
        let mut rng = ChaCha8Rng::seed_from_u64(90);
        for s in 0..50 {
            let lambda: WeightVec = cli::sample_point(&e, &mut rng, s % 2 == 0);
            cli::eta_dichotomy(&e, &lambda).map_err(err(name))?;
            samples += 1;
        }
    }
    Ok(format!("{} fixtures, {words} words, {samples} η orbits", names.len()))
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Outcome, Option<Duration>); 9] = [
        (1, "rank-2 theta_delta values", criterion1, Some(Duration::from_secs(1))),
        (2, "broken-line oracle", criterion2, Some(Duration::from_secs(60))),
        (3, "products of theta_kδ", criterion3, None),
        (4, "theta_δ independent of β", criterion4, None),
        (5, "imaginary and real exchanges", criterion5, None),
        (6, "denominator vectors on the imaginary wall", criterion6, None),
        (7, "theta-basis products of generators", criterion7, None),
        (8, "generalized cluster algebras of tubes", criterion8, Some(Duration::from_secs(120))),
        (9, "mutation properties and η orbits", criterion9, None),
    ];
    let mut failed = 0;
    for (id, what, run, limit) in criteria {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(l)) if took > l => Err(format!("took {took:.2?}, limit {l:?}")),
            (o, _) => o,
        };
        match outcome {
            Ok(msg) => println!("criterion {id} PASS  {what}: {msg} ({took:.2?})"),
            Err(msg) => {
                failed += 1;
                println!("criterion {id} FAIL  {what}: {msg} ({took:.2?})");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
