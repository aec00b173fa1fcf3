use std::collections::BTreeSet;

use affine_cluster::affine::{Tube, TubeRoot};
use affine_cluster::fixtures;
use affine_cluster::gca::{
    self, build_product_seed, build_tube_seed, enumerate_exchange_graph, fan_set, gca_mutate, ratio_identity_holds,
    trop_add, GcaSeed, SeedJson, TropMonomial,
};
use affine_cluster::theta::ThetaEngine;
use affine_cluster::{Error, LaurentPoly};

fn engine(name: &str) -> ThetaEngine {
    ThetaEngine::new(&fixtures::matrix(name)).unwrap()
}

fn arc(start: usize, len: usize) -> TubeRoot {
    TubeRoot { tube: 0, start, len }
}

fn initial(tubes: &[Tube], tube: usize) -> GcaSeed {
    build_tube_seed(tubes, tube, &fan_set(&tubes[tube])).unwrap()
}

/// Tropical monomial from (variable index, exponent) pairs.
fn z(m: usize, parts: &[(usize, i64)]) -> TropMonomial {
    let mut t = TropMonomial::one(m);
    for &(i, e) in parts {
        t.0[i] += e;
    }
    t
}

#[test]
fn size_three_initial_seed() {
    // J = {β_[0], β_[0,1]}: the maximal arc has β = β_[2], β' = β_[1],
    // φ = β_[0], φ' = 0; the small arc sits under it with φ' = φ'' = φ''' = 0.
    let e = engine("A3tilde-31");
    let s = initial(&e.tubes, 0);
    let l = &s.layout;
    let m = l.m();
    let (z0, z1, z2, zs) = (l.z(0, 0), l.z(0, 1), l.z(0, 2), l.z_star());
    assert_eq!(s.labels, vec![arc(0, 1), arc(0, 2)]);
    assert_eq!(s.b, vec![vec![0, 2], vec![-1, 0]]);
    assert_eq!(s.d, vec![1, 2]);
    assert_eq!(s.p[0], vec![z(m, &[(z1, 1)]), TropMonomial::one(m)]);
    assert_eq!(s.p[1], vec![z(m, &[(z2, 1)]), z(m, &[(zs, 1)]), z(m, &[(z0, 1), (z1, 1)])]);
    assert_eq!(s.exchange_polynomial(1).unwrap().to_string(), "x1^2*z0_2 + x1*zs + z0_0*z0_1");
}

#[test]
fn size_two_seed_matches_the_exchange_relation() {
    let e = engine("A2tilde");
    let s = initial(&e.tubes, 0);
    assert_eq!(s.n(), 1);
    assert_eq!(s.d, vec![2]);
    let next = gca_mutate(&s, 0).unwrap();
    assert_eq!(next.labels, vec![arc(1, 1)]);
    assert_eq!(next.x[0].to_string(), "x1^-1*z0_0 + x1^-1*z0_1 + x1^-1*zs");
    assert_eq!(next.p[0], s.p[0].iter().rev().cloned().collect::<Vec<_>>());
}

#[test]
fn tropical_semifield() {
    let a = TropMonomial(vec![2, -1, 0]);
    let b = TropMonomial(vec![1, 0, 3]);
    assert_eq!(trop_add(&a, &b), TropMonomial(vec![1, -1, 0]));
    assert_eq!(trop_add(&a, &b), trop_add(&b, &a));
    assert_eq!(a.mul(&b).div(&b), a);
    assert_eq!(a.pow(3), a.mul(&a).mul(&a));
    // multiplication distributes over ⊕
    let c = TropMonomial(vec![0, 5, -2]);
    assert_eq!(trop_add(&a, &b).mul(&c), trop_add(&a.mul(&c), &b.mul(&c)));
    assert!(TropMonomial::one(3).is_one());
}

#[test]
fn exchange_graphs_are_cyclohedra() {
    for (name, k, vertices) in [("A2tilde", 2, 2), ("A3tilde-31", 3, 6), ("A4tilde-41", 4, 20)] {
        let e = engine(name);
        let t = &e.tubes[0];
        assert_eq!(t.size(), k);
        let g = enumerate_exchange_graph(&initial(&e.tubes, 0), 1000).unwrap();
        assert_eq!(g.vertices.len(), vertices, "{name}");
        assert!(g.is_regular());
        assert_eq!(g.edges.len(), vertices * (k - 1));
        let sets: BTreeSet<Vec<TubeRoot>> = g.label_sets().into_iter().collect();
        let expected: BTreeSet<Vec<TubeRoot>> = gca::maximal_compatible_sets(&e.tubes, t)
            .into_iter()
            .map(|mut s| {
                s.sort();
                s
            })
            .collect();
        assert_eq!(sets, expected, "{name}");
        // one cluster variable per arc
        assert_eq!(gca::labels_consistent(&g).unwrap(), k * (k - 1), "{name}");
        for s in &g.vertices {
            assert!(s.is_normalized() && s.halved_skew_symmetric(), "{name}");
            assert!(s.x.iter().all(|x| x.all_coefficients_nonnegative()), "{name}");
        }
    }
}

#[test]
fn mutation_is_an_involution() {
    for name in ["A3tilde-31", "A4tilde-41", "C2tilde"] {
        let e = engine(name);
        let g = enumerate_exchange_graph(&initial(&e.tubes, 0), 1000).unwrap();
        for s in &g.vertices {
            for k in 0..s.n() {
                let back = gca_mutate(&gca_mutate(s, k).unwrap(), k).unwrap();
                assert_eq!((&back.x, &back.p, &back.b, &back.labels), (&s.x, &s.p, &s.b, &s.labels), "{name}");
            }
        }
        assert_eq!(gca_mutate(&g.vertices[0], 9).err(), Some(Error::IndexOutOfRange { index: 9, n: g.vertices[0].n() }));
    }
}

/// The coefficient ratio p'_{j;ℓ}/p'_{j;0} follows from the mutation rule
/// with exponent ℓ/d_j on every edge. The variant with ℓ/d_k fails exactly
/// on edges where d_j ≠ d_k matters.
#[test]
fn coefficient_ratio_identity() {
    for (name, failures, edges) in [("A2tilde", 0, 2), ("A3tilde-31", 12, 12), ("A4tilde-41", 44, 60)] {
        let e = engine(name);
        let g = enumerate_exchange_graph(&initial(&e.tubes, 0), 1000).unwrap();
        assert_eq!(g.edges.len(), edges);
        let mut dk_failures = 0;
        for edge in &g.edges {
            let old = &g.vertices[edge.from];
            let new = gca_mutate(old, edge.direction).unwrap();
            assert!(ratio_identity_holds(old, &new, edge.direction, false), "{name}");
            if !ratio_identity_holds(old, &new, edge.direction, true) {
                dk_failures += 1;
            }
        }
        assert_eq!(dk_failures, failures, "{name}");
    }
}

#[test]
fn theta_functions_satisfy_the_exchange_relations() {
    for name in ["A2tilde", "A3tilde", "C2tilde", "A3tilde-31", "A4tilde-41"] {
        let e = engine(name);
        for t in &e.tubes {
            let g = enumerate_exchange_graph(&initial(&e.tubes, t.id), 1000).unwrap();
            assert_eq!(gca::j_mut_check(&g).unwrap(), g.edges.len());
            assert_eq!(gca::t_o_check(&e, &g, false).unwrap(), g.edges.len(), "{name}");
            assert_eq!(gca::t_o_check(&e, &g, true).unwrap(), g.edges.len(), "{name}");
        }
    }
}

/// t_o does not depend on the starting set: every maximal set gives a seed
/// whose cluster variables map to the same theta functions.
#[test]
fn t_o_is_independent_of_the_initial_set() {
    let e = engine("A3tilde-31");
    let t = &e.tubes[0];
    for j in gca::maximal_compatible_sets(&e.tubes, t) {
        let s = build_tube_seed(&e.tubes, 0, &j).unwrap();
        let g = enumerate_exchange_graph(&s, 1000).unwrap();
        assert_eq!(g.vertices.len(), 6);
        assert_eq!(gca::t_o_check(&e, &g, false).unwrap(), 12);
    }
}

#[test]
fn product_seed_over_two_tubes() {
    let e = engine("A3tilde");
    let js: Vec<Vec<TubeRoot>> = e.tubes.iter().map(fan_set).collect();
    let s = build_product_seed(&e.tubes, &js).unwrap();
    assert_eq!(s.n(), 2);
    assert_eq!(s.b, vec![vec![0, 0], vec![0, 0]]);
    // both tubes share z_*
    assert_eq!(s.layout.m(), 5);
    assert_eq!(s.p[0][1], s.p[1][1]);
    let g = enumerate_exchange_graph(&s, 100).unwrap();
    assert_eq!(g.vertices.len(), 4);
    assert_eq!(gca::t_o_check(&e, &g, false).unwrap(), 8);
    assert!(matches!(build_product_seed(&e.tubes, &js[..1]), Err(Error::Invalid(_))));
}

#[test]
fn invalid_sets_are_rejected() {
    let e = engine("A3tilde-31");
    assert_eq!(build_tube_seed(&e.tubes, 0, &[arc(0, 1), arc(1, 1)]).err(), Some(Error::NotMaximal));
    assert_eq!(build_tube_seed(&e.tubes, 0, &[arc(0, 1)]).err(), Some(Error::NotMaximal));
    assert!(matches!(build_tube_seed(&e.tubes, 3, &[arc(0, 1)]), Err(Error::IndexOutOfRange { .. })));
}

#[test]
fn exchange_graph_budget() {
    let e = engine("A4tilde-41");
    assert_eq!(enumerate_exchange_graph(&initial(&e.tubes, 0), 5).err(), Some(Error::BudgetExceeded(5)));
}

#[test]
fn seed_json_round_trip() {
    let e = engine("A4tilde-41");
    let s = initial(&e.tubes, 0);
    let text = serde_json::to_string(&s.to_json()).unwrap();
    let back: SeedJson = serde_json::from_str(&text).unwrap();
    assert_eq!(back, s.to_json());
    assert_eq!(back.labels, vec!["T0[0]", "T0[0,+2]", "T0[0,+3]"]);
    let x: Vec<LaurentPoly> = back.x.iter().map(|p| LaurentPoly::from_json(s.ctx(), p).unwrap()).collect();
    assert_eq!(x, s.x);
}

#[test]
fn verify_reports() {
    for name in ["A3tilde", "C2tilde", "A4tilde-41"] {
        let e = engine(name);
        for t in &e.tubes {
            let r = gca::verify_tube(&e, t.id, 1000).unwrap();
            assert_eq!(r.vertices, r.expected_vertices);
            assert!(r.regular);
            assert_eq!(r.relations_checked, r.edges);
            assert_eq!(r.specialized_checked, r.edges);
        }
    }
}
