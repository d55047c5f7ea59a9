//! Adaptive quadrature for vector-valued integrands: Gauss–Kronrod (7, 15) in one
//! dimension, the Genz–Malik degree-7 rule with an embedded degree-5 rule on boxes,
//! and the positive orthant of the unit sphere through a simplex parameterization.

use crate::error::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    pub rtol: f64,
    pub atol: f64,
    pub max_evals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { rtol: 1e-6, atol: 1e-12, max_evals: 2_000_000 }
    }
}

impl QuadConfig {
    pub fn new(rtol: f64, atol: f64, max_evals: usize) -> Self {
        QuadConfig { rtol, atol, max_evals }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CubatureResult {
    pub value: Vec<f64>,
    /// Per-component error estimates.
    pub error: Vec<f64>,
    pub evaluations: usize,
    pub converged: bool,
}

impl CubatureResult {
    pub fn total_error(&self) -> f64 {
        self.error.iter().sum()
    }
    pub fn norm(&self) -> f64 {
        self.value.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Fails with `NonConvergence` unless the tolerance was met.
    pub fn require(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NonConvergence { value: self.norm(), error: self.total_error(), evaluations: self.evaluations })
        }
    }
}

const GK_X: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const GK_WK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const GK_WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

struct Region {
    lo: Vec<f64>,
    hi: Vec<f64>,
    value: Vec<f64>,
    error: Vec<f64>,
    split: usize,
}

impl Region {
    fn err(&self) -> f64 {
        self.error.iter().sum()
    }
}

impl PartialEq for Region {
    fn eq(&self, o: &Self) -> bool {
        self.err().total_cmp(&o.err()) == Ordering::Equal
    }
}
impl Eq for Region {}
impl PartialOrd for Region {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Region {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err().total_cmp(&o.err())
    }
}

fn add_into(acc: &mut [f64], x: &[f64], w: f64) {
    for (a, b) in acc.iter_mut().zip(x) {
        *a += w * b;
    }
}

fn gk15<F: Fn(&[f64]) -> Vec<f64>>(f: &F, a: f64, b: f64, nout: usize) -> Region {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(&[c]);
    let mut k = vec![0.0; nout];
    let mut g = vec![0.0; nout];
    add_into(&mut k, &fc, GK_WK[7]);
    add_into(&mut g, &fc, GK_WG[3]);
    for j in 0..7 {
        let x = h * GK_X[j];
        let f1 = f(&[c - x]);
        let f2 = f(&[c + x]);
        add_into(&mut k, &f1, GK_WK[j]);
        add_into(&mut k, &f2, GK_WK[j]);
        if j % 2 == 1 {
            add_into(&mut g, &f1, GK_WG[j / 2]);
            add_into(&mut g, &f2, GK_WG[j / 2]);
        }
    }
    let value: Vec<f64> = k.iter().map(|v| v * h).collect();
    let error = k.iter().zip(&g).map(|(a, b)| ((a - b) * h).abs()).collect();
    Region { lo: vec![a], hi: vec![b], value, error, split: 0 }
}

struct GenzMalik {
    n: usize,
    l2: f64,
    l4: f64,
    l5: f64,
    w: [f64; 5],
    we: [f64; 4],
    ratio: f64,
}

impl GenzMalik {
    fn new(n: usize) -> Self {
        let nf = n as f64;
        let l2 = (9.0f64 / 70.0).sqrt();
        let l4 = (9.0f64 / 10.0).sqrt();
        let l5 = (9.0f64 / 19.0).sqrt();
        let w = [
            (12824.0 - 9120.0 * nf + 400.0 * nf * nf) / 19683.0,
            980.0 / 6561.0,
            (1820.0 - 400.0 * nf) / 19683.0,
            200.0 / 19683.0,
            6859.0 / 19683.0 / 2f64.powi(n as i32),
        ];
        let we = [(729.0 - 950.0 * nf + 50.0 * nf * nf) / 729.0, 245.0 / 486.0, (265.0 - 100.0 * nf) / 1458.0, 25.0 / 729.0];
        GenzMalik { n, l2, l4, l5, w, we, ratio: (l2 * l2) / (l4 * l4) }
    }

    fn evaluate<F: Fn(&[f64]) -> Vec<f64>>(&self, f: &F, lo: &[f64], hi: &[f64], nout: usize) -> Region {
        let n = self.n;
        let c: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
        let h: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (b - a)).collect();
        let vol: f64 = h.iter().map(|x| 2.0 * x).product();
        let f0 = f(&c);
        let mut s2 = vec![0.0; nout];
        let mut s3 = vec![0.0; nout];
        let mut s4 = vec![0.0; nout];
        let mut s5 = vec![0.0; nout];
        let mut diff = vec![0.0; n];
        let mut p = c.clone();
        for i in 0..n {
            p[i] = c[i] - self.l2 * h[i];
            let a1 = f(&p);
            p[i] = c[i] + self.l2 * h[i];
            let a2 = f(&p);
            p[i] = c[i] - self.l4 * h[i];
            let b1 = f(&p);
            p[i] = c[i] + self.l4 * h[i];
            let b2 = f(&p);
            p[i] = c[i];
            add_into(&mut s2, &a1, 1.0);
            add_into(&mut s2, &a2, 1.0);
            add_into(&mut s3, &b1, 1.0);
            add_into(&mut s3, &b2, 1.0);
            diff[i] = (0..nout).map(|k| (a1[k] + a2[k] - 2.0 * f0[k] - self.ratio * (b1[k] + b2[k] - 2.0 * f0[k])).abs()).sum();
        }
        for i in 0..n {
            for j in i + 1..n {
                for (si, sj) in [(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)] {
                    p[i] = c[i] + si * self.l4 * h[i];
                    p[j] = c[j] + sj * self.l4 * h[j];
                    add_into(&mut s4, &f(&p), 1.0);
                }
                p[i] = c[i];
                p[j] = c[j];
            }
        }
        for mask in 0u64..(1u64 << n) {
            for i in 0..n {
                let s = if mask >> i & 1 == 1 { 1.0 } else { -1.0 };
                p[i] = c[i] + s * self.l5 * h[i];
            }
            add_into(&mut s5, &f(&p), 1.0);
        }
        let mut value = vec![0.0; nout];
        let mut error = vec![0.0; nout];
        for k in 0..nout {
            let i7 = self.w[0] * f0[k] + self.w[1] * s2[k] + self.w[2] * s3[k] + self.w[3] * s4[k] + self.w[4] * s5[k];
            let i5 = self.we[0] * f0[k] + self.we[1] * s2[k] + self.we[2] * s3[k] + self.we[3] * s4[k];
            value[k] = vol * i7;
            error[k] = (vol * (i7 - i5)).abs();
        }
        let mut split = 0;
        for i in 1..n {
            if diff[i] > diff[split] * (1.0 + 1e-12) {
                split = i;
            }
        }
        if diff.iter().all(|&x| x == diff[0]) {
            split = (0..n).max_by(|&a, &b| h[a].total_cmp(&h[b]).then(b.cmp(&a))).unwrap();
        }
        Region { lo: lo.to_vec(), hi: hi.to_vec(), value, error, split }
    }

    fn points(&self) -> usize {
        let n = self.n;
        1 + 4 * n + 2 * n * (n.saturating_sub(1)) + (1 << n)
    }
}

/// Regions refined per round; fixed so results do not depend on the thread count.
const BATCH: usize = 16;

/// Adaptive integration over the box `[lo, hi]` of an `nout`-component integrand.
pub fn integrate_box<F>(f: F, lo: &[f64], hi: &[f64], nout: usize, cfg: &QuadConfig) -> CubatureResult
where
    F: Fn(&[f64]) -> Vec<f64> + Sync,
{
    let n = lo.len();
    if n == 0 {
        return CubatureResult { value: f(&[]), error: vec![0.0; nout], evaluations: 1, converged: true };
    }
    if lo.iter().zip(hi).any(|(a, b)| a == b) {
        return CubatureResult { value: vec![0.0; nout], error: vec![0.0; nout], evaluations: 0, converged: true };
    }
    let gm = GenzMalik::new(n.max(2));
    let per = if n == 1 { 15 } else { gm.points() };
    let eval = |lo: &[f64], hi: &[f64]| -> Region {
        if n == 1 {
            gk15(&f, lo[0], hi[0], nout)
        } else {
            gm.evaluate(&f, lo, hi, nout)
        }
    };
    let first = eval(lo, hi);
    let mut evals = per;
    let mut total = first.value.clone();
    let mut total_err = first.err();
    let mut heap = BinaryHeap::new();
    heap.push(first);
    loop {
        let norm = total.iter().map(|v| v * v).sum::<f64>().sqrt();
        if total_err <= cfg.atol.max(cfg.rtol * norm) {
            break;
        }
        if evals + 2 * per > cfg.max_evals {
            break;
        }
        let budget = ((cfg.max_evals - evals) / (2 * per)).max(1);
        let take = BATCH.min(heap.len()).min(budget);
        let parents: Vec<Region> = (0..take).map(|_| heap.pop().unwrap()).collect();
        let halves: Vec<(Vec<f64>, Vec<f64>)> = parents
            .iter()
            .flat_map(|r| {
                let s = r.split;
                let mid = 0.5 * (r.lo[s] + r.hi[s]);
                let mut h1 = r.hi.clone();
                h1[s] = mid;
                let mut l2 = r.lo.clone();
                l2[s] = mid;
                vec![(r.lo.clone(), h1), (l2, r.hi.clone())]
            })
            .collect();
        let children: Vec<Region> = halves.par_iter().map(|(a, b)| eval(a, b)).collect();
        evals += children.len() * per;
        for p in &parents {
            add_into(&mut total, &p.value, -1.0);
        }
        for c in children {
            add_into(&mut total, &c.value, 1.0);
            heap.push(c);
        }
        total_err = heap.iter().map(|r| r.err()).sum();
    }
    let mut regions: Vec<Region> = heap.into_vec();
    regions.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap_or(Ordering::Equal));
    let value = pairwise_sum(&regions.iter().map(|r| r.value.clone()).collect::<Vec<_>>(), nout);
    let error = pairwise_sum(&regions.iter().map(|r| r.error.clone()).collect::<Vec<_>>(), nout);
    let norm = value.iter().map(|v| v * v).sum::<f64>().sqrt();
    let converged = error.iter().sum::<f64>() <= cfg.atol.max(cfg.rtol * norm);
    CubatureResult { value, error, evaluations: evals, converged }
}

fn pairwise_sum(xs: &[Vec<f64>], nout: usize) -> Vec<f64> {
    match xs.len() {
        0 => vec![0.0; nout],
        1 => xs[0].clone(),
        k => {
            let (a, b) = xs.split_at(k / 2);
            let mut l = pairwise_sum(a, nout);
            add_into(&mut l, &pairwise_sum(b, nout), 1.0);
            l
        }
    }
}

/// Adaptive integration over the unit cube `[0,1]^dim`.
pub fn integrate_cube<F>(f: F, dim: usize, nout: usize, cfg: &QuadConfig) -> CubatureResult
where
    F: Fn(&[f64]) -> Vec<f64> + Sync,
{
    integrate_box(f, &vec![0.0; dim], &vec![1.0; dim], nout, cfg)
}

/// Stick-breaking map from `[0,1]^{k-1}` onto the standard simplex in `ℝ^k`, with its Jacobian.
pub fn cube_to_simplex(u: &[f64]) -> (Vec<f64>, f64) {
    let k = u.len() + 1;
    let mut s = Vec::with_capacity(k);
    let mut rest = 1.0;
    let mut jac = 1.0;
    for &ui in u {
        s.push(rest * ui);
        jac *= rest;
        rest *= 1.0 - ui;
    }
    s.push(rest);
    (s, jac)
}

/// Integrates over `{ξ ∈ ℝ^k : Σ ξ² = 1, ξ > 0}` with respect to the sphere's area measure,
/// via `ξ = s/‖s‖` for `s` on the standard simplex (`dσ = ds / ‖s‖^k`).
pub fn sphere_orthant_integrate<F>(k: usize, f: F, nout: usize, cfg: &QuadConfig) -> CubatureResult
where
    F: Fn(&[f64]) -> Vec<f64> + Sync,
{
    if k == 0 {
        return CubatureResult { value: vec![0.0; nout], error: vec![0.0; nout], evaluations: 0, converged: true };
    }
    if k == 1 {
        return CubatureResult { value: f(&[1.0]), error: vec![0.0; nout], evaluations: 1, converged: true };
    }
    integrate_cube(
        |u: &[f64]| {
            let (s, jac) = cube_to_simplex(u);
            let norm = s.iter().map(|x| x * x).sum::<f64>().sqrt();
            let xi: Vec<f64> = s.iter().map(|x| x / norm).collect();
            let w = jac / norm.powi(k as i32);
            let mut v = f(&xi);
            v.iter_mut().for_each(|x| *x *= w);
            v
        },
        k - 1,
        nout,
        cfg,
    )
}

/// Scalar sphere-orthant integral over the edges of `sub`, failing on non-convergence.
pub fn boundary_sphere_quadrature<F>(sub: &crate::graph::EdgeSubset, f: F, cfg: &QuadConfig) -> Result<CubatureResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if sub.is_empty() {
        return Err(Error::EmptySubset);
    }
    sphere_orthant_integrate(sub.count(), |x| vec![f(x)], 1, cfg).require()
}
