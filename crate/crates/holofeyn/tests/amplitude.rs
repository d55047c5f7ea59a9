use holofeyn::amplitude::*;
use holofeyn::quadrature::QuadConfig;
use holofeyn::testform::TestForm;
use holofeyn::DecoratedGraph;
use num_complex::Complex64;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `−2i ∫ f(w)/(π w) dλ` in polar coordinates: trapezoid in angle, composite Simpson in radius.
fn bm_pairing_single_edge(k: Complex64, a: f64) -> Complex64 {
    let nt = 128;
    let nr = 4000;
    let rmax = 12.0 / a.sqrt();
    let mut acc = c(0.0, 0.0);
    for it in 0..nt {
        let th = 2.0 * PI * it as f64 / nt as f64;
        let e = Complex64::from_polar(1.0, th);
        let mut s = c(0.0, 0.0);
        for ir in 0..=nr {
            let r = rmax * ir as f64 / nr as f64;
            let w = e * r;
            let f = (0.5 * (k * w - k.conj() * w.conj()) - a * r * r).exp();
            let wt = if ir == 0 || ir == nr { 1.0 } else if ir % 2 == 1 { 4.0 } else { 2.0 };
            s += f * e.conj() * wt;
        }
        acc += s * (rmax / nr as f64 / 3.0);
    }
    acc * (2.0 * PI / nt as f64) / PI * c(0.0, -2.0)
}

#[test]
fn single_edge_matches_bm_pairing() {
    let g = DecoratedGraph::single_edge(1);
    let k = c(1.3, -0.4);
    let phi = TestForm::gaussian(1, 1, vec![k], 0.7, 1);
    let w = evaluate_w(&g, &phi, 0.0, f64::INFINITY, &QuadConfig::new(1e-10, 1e-14, 2_000_000)).unwrap();
    let o = bm_pairing_single_edge(k, 0.7);
    eprintln!("{:?} {:?}", w, o);
    assert!((w.value - o).norm() < 1e-7 * o.norm().max(1.0));
}

#[test]
fn quadrature_matches_monte_carlo() {
    let cases = vec![
        (DecoratedGraph::single_edge(1), vec![c(1.0, 0.5)]),
        (DecoratedGraph::bigon(1), vec![c(0.8, -0.3)]),
        (DecoratedGraph::triangle(1), vec![c(0.6, 0.2), c(-0.4, 0.9)]),
        (DecoratedGraph::triangle(2), vec![c(0.6, 0.2), c(-0.4, 0.9), c(0.3, 0.1), c(0.2, -0.5)]),
    ];
    for (g, k) in cases {
        let r = required_test_form_degree(&g, g.dim()) as usize;
        let phi = TestForm::gaussian(g.dim(), g.num_vertices() - 1, k, 0.5, r);
        let q = evaluate_w_with(&g, &phi, 0.1, 1.0, &QuadConfig::new(1e-8, 1e-12, 2_000_000), EvalOptions { short_circuit: false }).unwrap();
        let m = mc_oracle_w(&g, &phi, 0.1, 1.0, 200_000, 7).unwrap();
        eprintln!("{} {:?} {:?}", g.to_text().replace('\n', ";"), q, m);
        assert!((q.value - m.value).norm() < 4.0 * m.error + 1e-9);
    }
}
