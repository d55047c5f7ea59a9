mod common;

use common::{laman_brute_force, pebble_game_23_tight};
use holofeyn::corpus::{connected_multigraphs, random_connected_multigraph};
use holofeyn::graph::permutation_parity;
use holofeyn::polys::*;
use holofeyn::quadrature::QuadConfig;
use holofeyn::schwinger::*;
use holofeyn::symbolic::{schwinger_generators, q, Q};
use holofeyn::{DecoratedGraph, EdgeSubset, ExteriorElement, Polynomial};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn graph_from_seed(seed: u64, d: usize, max_v: usize, max_e: usize) -> DecoratedGraph {
    random_connected_multigraph(&mut ChaCha8Rng::seed_from_u64(seed), d, max_v, max_e)
}

fn poly_strategy() -> impl Strategy<Value = Polynomial> {
    proptest::collection::vec((proptest::collection::vec(-2i32..3, 3), -5i64..6, 1i64..4), 0..5).prop_map(|terms| {
        let v = t_vars(3);
        let mut p = Polynomial::zero(&v);
        for (e, n, d) in terms {
            p = p.add(&Polynomial::monomial(&v, e, Q::new(n.into(), d.into()))).unwrap();
        }
        p
    })
}

/// Wedge of the listed generators (by index) with a polynomial coefficient.
fn blade(gens: &holofeyn::symbolic::Generators, idx: &[usize], c: &Polynomial) -> ExteriorElement {
    let mut e = ExteriorElement::scalar(gens, c.clone());
    for &i in idx {
        e = e.mul(&ExteriorElement::generator(gens, i, Polynomial::one(c.vars()))).unwrap();
    }
    e
}

fn blade_strategy() -> impl Strategy<Value = (Vec<usize>, Polynomial)> {
    (proptest::sample::subsequence((0..5).collect::<Vec<_>>(), 0..4), poly_strategy())
}

#[test]
fn small_corpus_cut_sizes() {
    for g in connected_multigraphs(1, 4, 6) {
        let h1 = g.first_betti();
        let last = g.num_vertices() - 1;
        for v in 0..last {
            for c in g.cuts(&[v], &[last]).unwrap() {
                assert_eq!(c.count(), h1 + 1);
            }
        }
    }
}

#[test]
fn sphere_quadrature_reproduces_orthant_areas() {
    let cfg = QuadConfig::new(1e-8, 1e-14, 2_000_000);
    for (k, area) in [(2usize, PI / 2.0), (3, PI / 2.0), (4, PI * PI / 8.0)] {
        let sub = EdgeSubset::full(k);
        let r = boundary_sphere_quadrature(&sub, |_| 1.0, &cfg).unwrap();
        assert!((r.value[0] - area).abs() < 1e-8 * area, "k={k}: {}", r.value[0]);
        let m = boundary_sphere_quadrature(&sub, |x| x[0] * x[0], &cfg).unwrap();
        assert!((m.value[0] - area / k as f64).abs() < 1e-8 * area, "second moment k={k}");
    }
}

/// Chart forms of `M⁻¹` and `d⁻¹` extend smoothly to the corner: the numerator vanishes at
/// least to the order of the denominator, whose lowest `ρ` coefficient is nonzero.
#[test]
fn inverses_extend_smoothly_to_corners() {
    for g in connected_multigraphs(1, 4, 5) {
        let inv = m_inverse(&g).unwrap();
        let dinv = d_inverse(&g).unwrap();
        for sub in EdgeSubset::all_nonempty(g.num_edges()) {
            let chain = [sub];
            for r in inv.iter().flatten().chain(dinv.entries.iter().flatten()) {
                let c = rational_to_chart(r, &chain).unwrap();
                let dmin = min_rho_degree(c.denominator()).unwrap();
                assert!(c.denominator().collect_by(0).get(&dmin).is_some_and(|p| !p.is_zero()));
                if let Some(nmin) = min_rho_degree(c.numerator()) {
                    assert!(nmin >= dmin, "{} on {}", r, sub);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cut_sizes_are_betti_plus_one(seed in any::<u64>()) {
        let g = graph_from_seed(seed, 1, 6, 8);
        let last = g.num_vertices() - 1;
        for v in 0..last {
            for c in g.cuts(&[v], &[last]).unwrap() {
                prop_assert_eq!(c.count(), g.first_betti() + 1);
            }
        }
    }

    #[test]
    fn laman_matches_brute_force(seed in any::<u64>(), d in 1usize..=3) {
        let g = graph_from_seed(seed, d, 7, 10);
        prop_assert_eq!(g.is_laman(d).unwrap().is_laman, laman_brute_force(&g, d));
        if d == 2 {
            prop_assert_eq!(laman_brute_force(&g, 2), pebble_game_23_tight(&g));
        }
    }

    #[test]
    fn permutation_signs_compose(seed in any::<u64>(), bits in any::<u64>()) {
        let g = graph_from_seed(seed, 1, 6, 9);
        let ne = g.num_edges();
        let sub = EdgeSubset::from_bits(ne, bits & ((1u64 << ne) - 1));
        prop_assume!(!sub.is_empty());
        let s = g.permutation_sign(&sub).unwrap().sign;
        prop_assert_eq!(s * s, 1);
        let (a, b) = (sub.indices(), sub.complement().indices());
        let forward = permutation_parity(&[b.clone(), a.clone()].concat());
        let reverse = permutation_parity(&[a.clone(), b.clone()].concat());
        prop_assert_eq!(s, forward);
        prop_assert_eq!(forward * reverse, if (a.len() * b.len()) % 2 == 0 { 1 } else { -1 });
    }

    #[test]
    fn betti_numbers_add_under_contraction(seed in any::<u64>(), bits in any::<u64>()) {
        let g = graph_from_seed(seed, 1, 6, 9);
        let ne = g.num_edges();
        let sub = EdgeSubset::from_bits(ne, bits & ((1u64 << ne) - 1));
        prop_assume!(!sub.is_empty() && g.subset_is_connected(&sub));
        let q = g.quotient(&sub).unwrap();
        prop_assert_eq!(g.first_betti(), g.subset_betti(&sub).unwrap() + q.first_betti());
    }

    #[test]
    fn polynomial_ring_axioms(a in poly_strategy(), b in poly_strategy(), c in poly_strategy()) {
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(a.mul(&b.add(&c).unwrap()).unwrap(), a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert!(a.sub(&a).unwrap().is_zero());
    }

    #[test]
    fn exterior_product_is_associative_and_graded(x in blade_strategy(), y in blade_strategy(), z in blade_strategy()) {
        let gens = schwinger_generators(3, 1, 2);
        let (a, b, c) = (blade(&gens, &x.0, &x.1), blade(&gens, &y.0, &y.1), blade(&gens, &z.0, &z.1));
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        let sign = if (x.0.len() * y.0.len()) % 2 == 0 { q(1) } else { q(-1) };
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap().scale_q(&sign));
    }

    #[test]
    fn corner_substitution_is_a_ring_homomorphism(a in poly_strategy(), b in poly_strategy(), bits in 1u64..8) {
        let chain = [EdgeSubset::from_bits(3, bits)];
        let (ca, cb) = (to_chart(&a, &chain).unwrap(), to_chart(&b, &chain).unwrap());
        prop_assert_eq!(to_chart(&a.mul(&b).unwrap(), &chain).unwrap(), ca.mul(&cb).unwrap());
        prop_assert_eq!(to_chart(&a.add(&b).unwrap(), &chain).unwrap(), ca.add(&cb).unwrap());
    }

    #[test]
    fn chart_round_trip(t in proptest::collection::vec(1e-4f64..10.0, 4), bits in 1u64..16, inner in 1u64..16) {
        let s1 = EdgeSubset::from_bits(4, bits);
        let s2 = s1.intersection(&EdgeSubset::from_bits(4, inner));
        let chain = if s2.is_empty() || s2 == s1 { vec![s1] } else { vec![s1, s2] };
        let chart = CornerChart::new(chain).unwrap();
        let p = chart.lift_interior(&t).unwrap();
        prop_assert!(chart.residuals(&p).iter().all(|r| r.abs() <= 1e-12));
        let back = chart.blow_down(&p).unwrap();
        for (x, y) in back.iter().zip(&t) {
            prop_assert!((x - y).abs() <= 1e-12 * y.max(1.0));
        }
    }
}
