mod common;

use common::c;
use holofeyn::amplitude::*;
use holofeyn::corpus::connected_multigraphs;
use holofeyn::quadrature::QuadConfig;
use holofeyn::testform::TestForm;
use holofeyn::{DecoratedGraph, Error};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

/// Composite Simpson on `[0, b]` with `n` (even) intervals.
fn simpson(f: impl Fn(f64) -> f64, b: f64, n: usize) -> f64 {
    let h = b / n as f64;
    let mut s = f(0.0) + f(b);
    for i in 1..n {
        s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn heat_kernel_has_unit_mass() {
    for (d, t) in [(1usize, 0.3f64), (2, 0.3), (2, 1.7), (3, 0.05)] {
        let sphere = 2.0 * PI.powi(d as i32) / (1..d).map(|k| k as f64).product::<f64>();
        let rmax = 14.0 * t.sqrt();
        let mass = simpson(
            |r| {
                let mut z = vec![c(0.0, 0.0); d];
                z[0] = c(r, 0.0);
                heat_kernel(t, &z).unwrap() * sphere * r.powi(2 * d as i32 - 1)
            },
            rmax,
            4000,
        );
        assert!((mass - 1.0).abs() < 1e-6, "d={d} t={t} mass {mass}");
    }
}

#[test]
fn heat_kernel_rejects_non_positive_time() {
    assert_eq!(heat_kernel(-1.0, &[c(1.0, 0.0)]), Err(Error::NonPositiveT));
    assert_eq!(dbar_star_heat(0.0, &[c(1.0, 0.0)]).unwrap_err(), Error::NonPositiveT);
}

/// `∂_t H + Σ_i ∂_{z̄_i}(z̄_i g) = 0`, the `dt` part of `(d_t + ∂̄) P_t = 0`, by central differences.
#[test]
fn schwinger_propagator_is_closed() {
    let h = 2e-5;
    let pts: [(f64, [Complex64; 2]); 4] = [
        (0.4, [c(0.3, -0.2), c(0.5, 0.1)]),
        (1.3, [c(-0.9, 0.4), c(0.2, 0.7)]),
        (0.15, [c(0.1, 0.05), c(-0.2, 0.1)]),
        (2.2, [c(1.5, -1.0), c(0.0, 0.3)]),
    ];
    for d in [1usize, 2] {
        for (t, zz) in pts {
            let z = &zz[..d];
            let dt = (heat_kernel(t + h, z).unwrap() - heat_kernel(t - h, z).unwrap()) / (2.0 * h);
            let mut div = c(0.0, 0.0);
            for i in 0..d {
                let coeff = |w: &[Complex64]| {
                    let v = dbar_star_heat(t, w).unwrap()[i];
                    if i % 2 == 0 { v } else { -v }
                };
                let shift = |s: Complex64| {
                    let mut w = z.to_vec();
                    w[i] += s;
                    coeff(&w)
                };
                let dx = (shift(c(h, 0.0)) - shift(c(-h, 0.0))) / (2.0 * h);
                let dy = (shift(c(0.0, h)) - shift(c(0.0, -h))) / (2.0 * h);
                div += 0.5 * (dx + c(0.0, 1.0) * dy);
            }
            let scale = heat_kernel(t, z).unwrap() / t;
            assert!((div + dt).norm() < 1e-6 * scale.max(1.0), "d={d} t={t} residual {}", (div + dt).norm());
        }
    }
}

#[test]
fn heat_kernel_solves_the_heat_equation() {
    let h = 1e-3;
    for (t, z) in [(0.5, c(0.3, 0.4)), (1.1, c(-1.2, 0.2))] {
        let f = |s: f64, w: Complex64| heat_kernel(s, &[w]).unwrap();
        let dt = (f(t + 1e-5, z) - f(t - 1e-5, z)) / 2e-5;
        let lap = (f(t, z + h) + f(t, z - h) + f(t, z + c(0.0, h)) + f(t, z - c(0.0, h)) - 4.0 * f(t, z)) / (h * h);
        assert!((dt - 0.5 * lap).abs() < 1e-6, "{dt} vs {}", 0.5 * lap);
    }
}

#[test]
fn time_integrated_propagator_converges_to_bochner_martinelli() {
    let cfg = QuadConfig::new(1e-12, 1e-15, 200_000);
    for z in [vec![c(0.7, -0.3)], vec![c(0.4, 0.2), c(-0.3, 0.5)], vec![c(1.0, 0.0), c(0.0, 0.5), c(0.2, -0.2)]] {
        let zero = vec![c(0.0, 0.0); z.len()];
        let bm = bm_kernel(&z, &zero).unwrap();
        let mut last = f64::INFINITY;
        for k in 0..5 {
            let (eps, l) = (10f64.powi(-(k + 1)), 10f64.powi(k + 1));
            let p = regularized_propagator(eps, l, &z, &cfg).unwrap();
            let err = p.iter().zip(&bm).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / bm[0].norm();
            assert!(err < last, "no improvement at step {k}");
            last = err;
        }
        let p = regularized_propagator(1e-12, 1e12, &z, &cfg).unwrap();
        for (a, b) in p.iter().zip(&bm) {
            assert!((a - b).norm() < 1e-6 * b.norm(), "{a} vs {b}");
        }
    }
    assert!(regularized_propagator(0.0, 1.0, &[c(1.0, 0.0)], &cfg).is_err());
}

/// `∫ ψ(w) w̄ e^{−|w|²/2t} dλ(w)` times `−2i/(2π t²)` in polar coordinates, for `ψ = w̄^n`-decorated plane-wave packets.
fn single_edge_at_fixed_t(k: Complex64, a: f64, t: f64, decoration: u32) -> Complex64 {
    let nt = 256;
    let nr = 4000;
    let rmax = 12.0 / (a + 0.5 / t).sqrt();
    let mut acc = c(0.0, 0.0);
    for it in 0..nt {
        let e = Complex64::from_polar(1.0, 2.0 * PI * it as f64 / nt as f64);
        let mut s = c(0.0, 0.0);
        for ir in 0..=nr {
            let r = rmax * ir as f64 / nr as f64;
            let w = e * r;
            let f = (0.5 * (k * w - k.conj() * w.conj()) - a * r * r - r * r / (2.0 * t)).exp();
            let y = -w.conj() / (2.0 * t);
            let wt = if ir == 0 || ir == nr { 1.0 } else if ir % 2 == 1 { 4.0 } else { 2.0 };
            s += f * w.conj() * y.powu(decoration) * r * wt;
        }
        acc += s * (rmax / nr as f64 / 3.0);
    }
    acc * (2.0 * PI / nt as f64) * c(0.0, -2.0) / (2.0 * PI * t * t)
}

#[test]
fn closed_form_reduction_matches_position_quadrature() {
    for (k, a, t, n) in [(c(0.0, 0.0), 0.5, 0.7, 0u32), (c(1.1, -0.6), 0.5, 0.7, 0), (c(-0.4, 0.9), 0.3, 2.5, 0), (c(0.8, 0.3), 0.6, 0.4, 1), (c(0.5, -0.5), 0.4, 1.2, 2)] {
        let g = DecoratedGraph::single_edge(1).with_decorations(vec![vec![n]]).unwrap();
        let phi = TestForm::gaussian(1, 1, vec![k], a, 1);
        let closed = wick_reduce(&g, &phi).unwrap().eval(&[t]);
        let brute = single_edge_at_fixed_t(k, a, t, n);
        assert!((closed - brute).norm() < 1e-8 * brute.norm().max(1e-3), "k={k} n={n}: {closed} vs {brute}");
    }
}

#[test]
fn bigon_exponent_is_the_series_resistance() {
    let g = DecoratedGraph::bigon(1);
    let k = c(0.7, -1.2);
    let phi = TestForm::gaussian(1, 1, vec![k], 1e-12, 1);
    let s = wick_reduce(&g, &phi).unwrap();
    for t in [[0.3, 0.9], [2.0, 0.1], [1.0, 1.0]] {
        let expect = -0.5 * k.norm_sqr() * t[0] * t[1] / (t[0] + t[1]);
        assert!((s.exponent(&t) - expect).norm() < 1e-9, "{:?}", t);
    }
    let phi0 = TestForm::gaussian(1, 1, vec![c(0.0, 0.0)], 0.4, 1);
    assert_eq!(wick_reduce(&g, &phi0).unwrap().exponent(&[0.5, 0.8]), c(0.0, 0.0));
}

#[test]
fn wrong_form_degree_is_rejected() {
    let g = DecoratedGraph::triangle(1);
    let phi = TestForm::gaussian(1, 2, vec![c(0.1, 0.0), c(0.2, 0.0)], 0.5, 1);
    assert!(matches!(wick_reduce(&g, &phi), Err(Error::DegreeMismatch { .. })));
}

#[test]
fn zero_form_gives_exact_zero_everywhere() {
    let g = DecoratedGraph::triangle(1);
    let z = TestForm::zero(1, 2, 0.5);
    let m = mc_oracle_w(&g, &z, 0.1, 1.0, 10_000, 3).unwrap();
    assert_eq!((m.value, m.error), (c(0.0, 0.0), 0.0));
    let q = evaluate_w(&g, &z, 0.1, 1.0, &QuadConfig::default()).unwrap();
    assert_eq!((q.value, q.error), (c(0.0, 0.0), 0.0));
    assert!(matches!(mc_oracle_w(&g, &z, 0.0, 1.0, 10, 3), Err(Error::NonPositiveEpsilon)));
}

#[test]
fn monte_carlo_is_reproducible_across_thread_counts() {
    let g = DecoratedGraph::bigon(1);
    let phi = TestForm::gaussian(1, 1, vec![c(0.8, -0.3)], 0.5, 1);
    let a = mc_oracle_w(&g, &phi, 0.1, 1.0, 20_000, 42).unwrap();
    let b = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| mc_oracle_w(&g, &phi, 0.1, 1.0, 20_000, 42).unwrap());
    assert_eq!(a.value, b.value);
    assert_eq!(a.error, b.error);
    let other = mc_oracle_w(&g, &phi, 0.1, 1.0, 20_000, 43).unwrap();
    assert_ne!(a.value, other.value);
}

/// Regularized values approach the unregularized one monotonically as `ε ↓ 0`, `L ↑ ∞`.
#[test]
fn triangle_regularization_approaches_the_limit_monotonically() {
    let g = DecoratedGraph::triangle(1);
    let phi = TestForm::gaussian(1, 2, vec![c(0.6, 0.2), c(-0.4, 0.9)], 0.5, 2);
    let cfg = QuadConfig::new(1e-7, 1e-12, 4_000_000);
    let limit = evaluate_w(&g, &phi, 0.0, f64::INFINITY, &cfg).unwrap();
    let mut last = f64::INFINITY;
    for k in 0..8 {
        let (eps, l) = (0.1 / 2f64.powi(k), 2f64.powi(k));
        let w = evaluate_w(&g, &phi, eps, l, &cfg).unwrap();
        let gap = (w.value - limit.value).norm();
        assert!(gap < last, "step {k}: gap {gap} after {last}");
        last = gap;
    }
    assert!(last < 0.05 * limit.value.norm());
}

#[test]
fn quadrature_matches_monte_carlo_on_small_corpus() {
    let cfg = QuadConfig::new(1e-8, 1e-13, 4_000_000);
    let mut checked = 0;
    for g in connected_multigraphs(1, 3, 4) {
        let r = required_test_form_degree(&g, 1);
        let n = layout_of(&g).dim();
        let k: Vec<Complex64> = (0..n).map(|v| Complex64::from_polar(0.8, 0.4 + 1.9 * v as f64)).collect();
        let phi = TestForm::gaussian(1, n, k, 0.5, r as usize);
        let q = evaluate_w_with(&g, &phi, 0.1, 1.0, &cfg, EvalOptions { short_circuit: false }).unwrap();
        let m = mc_oracle_w(&g, &phi, 0.1, 1.0, 200_000, 17).unwrap();
        assert!((q.value - m.value).norm() <= 3.0 * m.error + 1e-12, "{}: {} vs {} ± {}", g.to_text(), q.value, m.value, m.error);
        checked += 1;
    }
    assert!(checked >= 5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn bochner_martinelli_is_homogeneous(re in -2.0f64..2.0, im in -2.0f64..2.0, re2 in -2.0f64..2.0, lam in 0.1f64..5.0, d in 1usize..=2) {
        let x: Vec<Complex64> = [c(re, im), c(re2, 0.3)][..d].to_vec();
        prop_assume!(x.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-3);
        let zero = vec![c(0.0, 0.0); d];
        let a = bm_kernel(&x, &zero).unwrap();
        let xs: Vec<Complex64> = x.iter().map(|z| z * lam).collect();
        let b = bm_kernel(&xs, &zero).unwrap();
        for (u, v) in a.iter().zip(&b) {
            prop_assert!((v - u * lam.powi(1 - 2 * d as i32)).norm() <= 1e-12 * u.norm().max(1e-300) + 1e-300);
        }
    }

    /// Weight 1 for `t`, ½ for `w̄`: every coefficient of `dt_S ∧ dw̄_K` has weight `−(dE + |n|)/2 − |S| − |K|/2`.
    #[test]
    fn reduced_polynomials_have_fixed_scaling_weight(which in 0usize..3, d in 1usize..=2, n in proptest::collection::vec(0u32..3, 3)) {
        let g = [DecoratedGraph::single_edge(d), DecoratedGraph::bigon(d), DecoratedGraph::triangle(d)][which].clone();
        let ne = g.num_edges();
        let decorations: Vec<Vec<u32>> = (0..ne).map(|e| { let mut v = vec![0; d]; v[0] = n[e]; v }).collect();
        let g = g.with_decorations(decorations).unwrap();
        let product = propagator_product(&g).unwrap();
        let total_n = g.total_decoration() as i32;
        for (mask, p) in product.terms() {
            let s = (mask & ((1u64 << ne) - 1)).count_ones() as i32;
            let kdeg = (mask >> ne).count_ones() as i32;
            for (e, _) in p.terms() {
                let weight: i32 = 2 * e[..ne].iter().sum::<i32>() + e[ne..].iter().sum::<i32>();
                prop_assert_eq!(weight, -(d as i32) * ne as i32 - total_n - 2 * s - kdeg);
            }
        }
    }
}
