use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use affine_cluster::affine::{self, AffineData};
use affine_cluster::cli;
use affine_cluster::error::Error;
use affine_cluster::fixtures;
use affine_cluster::seeds::{
    self, clear, denominator_vector, find_cluster_variable_by_gvector, mutate_rows, mutation_map_eta, symmetrizers,
    ExtendedExchangeMatrix, Seed,
};
use affine_cluster::theta::ThetaEngine;
use affine_cluster::{LaurentPoly, RootVec, VarContext, WeightVec};

fn pos(v: i64) -> i64 {
    v.max(0)
}

/// diag(d) · S with S skew-symmetric is skew-symmetrizable.
fn skew_symmetrizable(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (prop::collection::vec(-2i64..=2, n * n), prop::collection::vec(1i64..=3, n)).prop_map(move |(s, d)| {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| match i.cmp(&j) {
                        std::cmp::Ordering::Less => d[i] * s[i * n + j],
                        std::cmp::Ordering::Greater => -d[i] * s[j * n + i],
                        std::cmp::Ordering::Equal => 0,
                    })
                    .collect()
            })
            .collect()
    })
}

fn is_skew_symmetrized_by(b: &[Vec<i64>], big_d: &[i64]) -> bool {
    let n = b.len();
    (0..n).all(|i| (0..n).all(|j| b[i][j] * big_d[j] == -b[j][i] * big_d[i]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matrix_mutation_is_an_involution(
        b in skew_symmetrizable(4),
        extra in prop::collection::vec(prop::collection::vec(-3i64..=3, 4), 0..3),
        k in 0usize..4,
    ) {
        let mut rows = b.clone();
        rows.extend(extra);
        prop_assert_eq!(mutate_rows(&mutate_rows(&rows, k), k), rows);
    }

    #[test]
    fn mutation_keeps_the_symmetrizer(b in skew_symmetrizable(4), word in prop::collection::vec(0usize..4, 0..6)) {
        let d = symmetrizers(&b).unwrap();
        let mutated = word.iter().fold(b.clone(), |m, &k| mutate_rows(&m, k));
        prop_assert!(is_skew_symmetrized_by(&mutated, &d));
    }

    #[test]
    fn eta_is_an_involution(b in skew_symmetrizable(3), v in prop::collection::vec(-6i64..=6, 3), k in 0usize..3) {
        let v = WeightVec(v);
        let once = mutation_map_eta(&b, &[k], &v);
        // the inverse map is taken with respect to the mutated matrix
        prop_assert_eq!(mutation_map_eta(&mutate_rows(&b, k), &[k], &once), v.clone());
        prop_assert_eq!(mutation_map_eta(&b, &[k, k], &v), v);
    }

    #[test]
    fn eta_is_piecewise_linear(b in skew_symmetrizable(3), v in prop::collection::vec(-6i64..=6, 3), k in 0usize..3, t in 1i64..4) {
        let v = WeightVec(v);
        let scaled = WeightVec(v.0.iter().map(|x| x * t).collect());
        let image = mutation_map_eta(&b, &[k], &v);
        prop_assert_eq!(mutation_map_eta(&b, &[k], &scaled), WeightVec(image.0.iter().map(|x| x * t).collect()));
    }
}

#[test]
fn three_by_three_mutation() {
    let b = vec![vec![0, 1, 1], vec![-1, 0, 1], vec![-1, -1, 0]];
    assert_eq!(mutate_rows(&b, 1), vec![vec![0, -1, 2], vec![1, 0, -1], vec![-2, 1, 0]]);
}

#[test]
fn symmetry_along_the_coxeter_order() {
    for name in fixtures::names() {
        let b = fixtures::matrix(name);
        let data = AffineData::new(&b).unwrap();
        let m = data.order.iter().fold(b.clone(), |m, &k| mutate_rows(&m, k));
        assert_eq!(m, b, "{name}");
        // every single step negates one row and column and nothing else
        let mut cur = b.clone();
        for &k in &data.order {
            let next = mutate_rows(&cur, k);
            for i in 0..b.len() {
                for j in 0..b.len() {
                    let flipped = i == k || j == k;
                    assert_eq!(next[i][j], if flipped { -cur[i][j] } else { cur[i][j] }, "{name}");
                }
            }
            cur = next;
        }
    }
}

#[test]
fn two_step_g_vector() {
    let b = fixtures::matrix("kronecker");
    let s = Seed::initial(ExtendedExchangeMatrix::principal(&b).unwrap()).mutate_word(&[0, 1]).unwrap();
    // (x1² y1² y2 + x2⁴ + 2 x2² y1 + y1²) / (x1² x2)
    assert_eq!(s.cluster[1].to_string(), "x2^-1*y1^2*y2 + x1^-2*x2^3 + 2*x1^-2*x2*y1 + x1^-2*x2^-1*y1^2");
    assert_eq!(s.g_vector(1).unwrap(), WeightVec(vec![-2, 3]));
    assert_eq!(s.g_vector(0).unwrap(), WeightVec(vec![-1, 2]));
    let (_, tail) = s.cluster[1].pointed_form(s.initial.rows()).unwrap();
    assert_eq!(tail.to_string(), "y1^2*y2 + y1^2 + 2*y1 + 1");
}

#[test]
fn g_vectors_need_principal_coefficients() {
    let b = fixtures::matrix("kronecker");
    let s = Seed::initial(ExtendedExchangeMatrix::coefficient_free(&b).unwrap());
    assert!(matches!(s.g_vector(0), Err(Error::NotPointed(_))));
}

#[test]
fn index_out_of_range() {
    let b = fixtures::matrix("kronecker");
    let s = Seed::initial(ExtendedExchangeMatrix::principal(&b).unwrap());
    assert!(matches!(s.mutate(2), Err(Error::IndexOutOfRange { .. })));
}

#[test]
fn denominator_vectors() {
    let ctx = VarContext::principal(2);
    assert_eq!(denominator_vector(&LaurentPoly::x(&ctx, 0)), RootVec(vec![-1, 0]));
    let b = fixtures::matrix("kronecker");
    let s = Seed::initial(ExtendedExchangeMatrix::principal(&b).unwrap()).mutate(0).unwrap();
    assert_eq!(denominator_vector(&s.cluster[0]), RootVec(vec![1, 0]));
    let e = ThetaEngine::new(&b).unwrap();
    assert_eq!(denominator_vector(&e.theta_delta().unwrap().poly), RootVec(vec![1, 1]));
}

#[test]
fn clear_with_principal_coefficients_is_identity() {
    let b = fixtures::matrix("A2tilde");
    let s = Seed::initial(ExtendedExchangeMatrix::principal(&b).unwrap()).mutate_word(&[0, 1, 2, 0]).unwrap();
    for p in &s.cluster {
        assert_eq!(&clear(p), p);
    }
}

#[test]
fn clear_mixed_signs() {
    let ctx = VarContext::with_coefficients(2, 2);
    let p = LaurentPoly::from_terms(
        &ctx,
        vec![(vec![1, 0, -2, 1], 1.into()), (vec![0, 1, 1, -3], 2.into()), (vec![0, 0, 0, 0], 1.into())],
    );
    let c = clear(&p);
    // u1² u2³ is the smallest monomial clearing both negative exponents
    assert_eq!(c, p.shift(&[0, 0, 2, 3]));
    assert!(c.terms().all(|(e, _)| e[2] >= 0 && e[3] >= 0));
    assert!(c.terms().any(|(e, _)| e[2] == 0) && c.terms().any(|(e, _)| e[3] == 0));
}

#[test]
fn imaginary_ray_is_not_a_g_vector() {
    for (name, depth) in [("kronecker", 8), ("rank2-4-1", 8), ("A2tilde", 5)] {
        let b = fixtures::matrix(name);
        let data = AffineData::new(&b).unwrap();
        let nu = data.nu_c(&data.delta).unwrap();
        let err = find_cluster_variable_by_gvector(&b, &nu, depth).unwrap_err();
        assert!(matches!(err, Error::NotFound { .. }), "{name}");
    }
}

#[test]
fn finder_agrees_with_mutation() {
    let b = fixtures::matrix("A2tilde");
    let s0 = Seed::initial(ExtendedExchangeMatrix::principal(&b).unwrap());
    for w in [vec![0], vec![1, 2], vec![2, 0, 1], vec![0, 1, 0]] {
        let s = s0.mutate_word(&w).unwrap();
        for i in 0..3 {
            let g = s.g_vector(i).unwrap();
            let found = find_cluster_variable_by_gvector(&b, &g, 6).unwrap();
            assert_eq!(found, s.cluster[i], "{w:?} {i}");
        }
    }
}

fn words(n: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for k in 0..n {
                if w.last() != Some(&k) {
                    let mut v: Vec<usize> = w.clone();
                    v.push(k);
                    next.push(v);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// A cluster variable with g-vector λ, rewritten in the variables of the seed
/// mutated at k and multiplied by y_k^{−[λ_k]_+}, is pointed at η_k(λ) for
/// μ_k(B̃); the rewritten variable is the same cluster variable reached from
/// the mutated seed.
#[test]
fn theta_mutation_on_a2tilde() {
    let b = fixtures::matrix("A2tilde");
    let n = b.len();
    let principal = ExtendedExchangeMatrix::principal(&b).unwrap();
    let s0 = Seed::initial(principal.clone());
    let ctx = s0.ctx().clone();
    let mut seen = BTreeSet::new();
    let mut checked = 0;
    for w in words(n, 3) {
        let s = s0.mutate_word(&w).unwrap();
        for (i, v) in s.cluster.iter().enumerate() {
            if !seen.insert(v.to_string()) {
                continue;
            }
            let lambda = s.g_vector(i).unwrap();
            for k in 0..n {
                let yhat_k = (0..n).fold(LaurentPoly::u(&ctx, k), |acc, r| {
                    &acc * &LaurentPoly::x(&ctx, r).pow(b[r][k]).unwrap()
                });
                let mono = (0..n).fold(LaurentPoly::x(&ctx, k).pow(-1).unwrap(), |acc, r| {
                    &acc * &LaurentPoly::x(&ctx, r).pow(pos(-b[r][k])).unwrap()
                });
                let mut images: Vec<LaurentPoly> = (0..2 * n).map(|j| LaurentPoly::var(&ctx, j)).collect();
                images[k] = &mono * &(&LaurentPoly::one(&ctx) + &yhat_k);
                let rewritten = v.substitute_exact(&images).unwrap();
                let theta = &rewritten * &LaurentPoly::u(&ctx, k).pow(-pos(lambda[k])).unwrap();

                let mutated = principal.mutate(k).unwrap();
                let (g, _) = theta.pointed_form(mutated.rows()).unwrap();
                assert_eq!(WeightVec(g), mutation_map_eta(&b, &[k], &lambda), "{w:?} x{} at {k}", i + 1);

                let mut path = vec![k];
                path.extend(&w);
                let direct = Seed::initial_in(mutated, &ctx).mutate_word(&path).unwrap();
                assert_eq!(direct.cluster[i], rewritten);
                assert_eq!(clear(&theta), rewritten);
                checked += 1;
            }
        }
    }
    assert!(checked >= 3 * 9, "only {checked} cases");
}

#[test]
fn laurent_phenomenon_and_positivity() {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for name in ["A2tilde", "A3tilde", "C2tilde", "rank2-1-4"] {
        let b = fixtures::matrix(name);
        let s0 = Seed::initial(ExtendedExchangeMatrix::principal(&b).unwrap());
        for _ in 0..40 {
            let len = rng.gen_range(1..=10);
            let w: Vec<usize> = (0..len).map(|_| rng.gen_range(0..b.len())).collect();
            let s = s0.mutate_word(&w).unwrap();
            assert!(s.cluster.iter().all(|p| p.all_coefficients_nonnegative()), "{name} {w:?}");
            for i in 0..b.len() {
                s.g_vector(i).unwrap();
            }
        }
    }
}

#[test]
fn free_coefficients_specialize_principal_ones() {
    let b = fixtures::matrix("C2tilde");
    let p = Seed::initial(ExtendedExchangeMatrix::principal(&b).unwrap());
    let f = Seed::initial(ExtendedExchangeMatrix::coefficient_free(&b).unwrap());
    let w = [0, 2, 1, 0, 2];
    let (ps, fs) = (p.mutate_word(&w).unwrap(), f.mutate_word(&w).unwrap());
    let ctx = ps.ctx().clone();
    let images: Vec<LaurentPoly> =
        (0..6).map(|j| if j < 3 { LaurentPoly::x(&ctx, j) } else { LaurentPoly::one(&ctx) }).collect();
    for i in 0..3 {
        let spec = ps.cluster[i].substitute(&images).unwrap();
        assert_eq!(spec.to_string(), fs.cluster[i].to_string());
    }
}

#[test]
fn unsigned_coefficient_column() {
    let m = ExtendedExchangeMatrix::new(vec![vec![0, 2], vec![-2, 0], vec![1, -1], vec![-1, 1]], 2).unwrap();
    // reported 1-based
    assert_eq!(Seed::initial(m).mutate(1).unwrap_err(), Error::UnsignedColumn(2));
}

#[test]
fn eta_orbits_by_fixture() {
    for name in fixtures::names() {
        let e = ThetaEngine::new(&fixtures::matrix(name)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for s in 0..50 {
            let lambda = cli::sample_point(&e, &mut rng, s % 2 == 1);
            cli::eta_dichotomy(&e, &lambda).unwrap_or_else(|err| panic!("{name}: {err}"));
        }
    }
}

#[test]
fn eta_word_acts_as_coxeter_on_the_wall() {
    for name in ["A2tilde", "A3tilde", "C2tilde", "A4tilde-41"] {
        let e = ThetaEngine::new(&fixtures::matrix(name)).unwrap();
        let word = affine::symmetry_word(&e.data);
        for t in &e.tubes {
            for beta in &t.orbit {
                let l = e.data.nu_c(beta).unwrap();
                assert_eq!(
                    seeds::mutation_map_eta(&e.data.b, &word, &l),
                    e.data.coxeter_weight(&l, 1),
                    "{name}"
                );
            }
        }
    }
}
