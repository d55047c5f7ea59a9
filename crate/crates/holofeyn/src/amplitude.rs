//! Kernels, the propagator product, Gaussian reduction over positions, and numerical
//! evaluation of the regularized graph integral `W_ε^L`.
//!
//! Convention: `W = ∫_{[ε,L]^E × (ℂ^d)^n} Π_e P_e ∧ Φ` with the `dt` block first and
//! `∫ g Π_v (dw_v ∧ dw̄_v) = (−2i)^{dN} ∫ g dλ` on the relative coordinates.

use crate::error::{Error, Result};
use crate::graph::{DecoratedGraph, EdgeSubset};
use crate::polys::t_vars;
use crate::quadrature::{integrate_box, integrate_cube, QuadConfig};
use crate::symbolic::{q_frac, schwinger_generators, ExteriorElement, Polynomial, Vars};
use crate::testform::TestForm;
use crate::wick::{gaussian_expectation, ComplexPoly, Layout};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralResult {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

impl IntegralResult {
    pub fn zero() -> Self {
        IntegralResult { value: Complex64::new(0.0, 0.0), error: 0.0, evaluations: 0 }
    }
}

fn norm_sq(z: &[Complex64]) -> f64 {
    z.iter().map(|x| x.norm_sqr()).sum()
}

/// `(2πt)^{−d} exp(−Σ|z|²/2t)`, the coefficient of `d^d z̄`.
pub fn heat_kernel(t: f64, z: &[Complex64]) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveT);
    }
    let d = z.len() as i32;
    Ok((2.0 * PI * t).powi(-d) * (-norm_sq(z) / (2.0 * t)).exp())
}

/// Coefficients `c_i` of `∂̄*H = Σ_i c_i Π_{j≠i} dz̄^j`, sign `(−1)^{i−1}` included.
pub fn dbar_star_heat(t: f64, z: &[Complex64]) -> Result<Vec<Complex64>> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveT);
    }
    let d = z.len() as i32;
    let g = (-norm_sq(z) / (2.0 * t)).exp() / (PI.powi(d) * 2f64.powi(d) * t.powi(d + 1));
    Ok(z.iter().enumerate().map(|(i, zi)| if i % 2 == 0 { zi.conj() * g } else { -zi.conj() * g }).collect())
}

/// `P_t = H d^d z̄ − dt ∧ ∂̄*H`: returns `(H, coefficients of ∂̄*H)`.
pub fn schwinger_propagator(t: f64, z: &[Complex64]) -> Result<(f64, Vec<Complex64>)> {
    Ok((heat_kernel(t, z)?, dbar_star_heat(t, z)?))
}

/// Bochner–Martinelli kernel coefficients `(d−1)!/π^d |x|^{−2d} (−1)^{i−1} x̄^i`, `x = z − w`.
pub fn bm_kernel(z: &[Complex64], w: &[Complex64]) -> Result<Vec<Complex64>> {
    let x: Vec<Complex64> = z.iter().zip(w).map(|(a, b)| a - b).collect();
    let r2 = norm_sq(&x);
    if r2 == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    let d = x.len() as i32;
    let fact: f64 = (1..d).map(|k| k as f64).product();
    let g = fact / PI.powi(d) / r2.powi(d);
    Ok(x.iter().enumerate().map(|(i, xi)| if i % 2 == 0 { xi.conj() * g } else { -xi.conj() * g }).collect())
}

/// `∫_ε^L ∂̄*H dt` by adaptive quadrature in `s = log t`.
pub fn regularized_propagator(eps: f64, l: f64, z: &[Complex64], cfg: &QuadConfig) -> Result<Vec<Complex64>> {
    if !(eps > 0.0) {
        return Err(Error::NonPositiveEpsilon);
    }
    let d = z.len();
    let (a, b) = (eps.ln(), l.ln());
    let r = integrate_box(
        |s: &[f64]| {
            let t = s[0].exp();
            let c = dbar_star_heat(t, z).unwrap();
            c.iter().flat_map(|x| [x.re * t, x.im * t]).collect()
        },
        &[a],
        &[b],
        2 * d,
        cfg,
    )
    .require()?;
    Ok((0..d).map(|i| Complex64::new(r.value[2 * i], r.value[2 * i + 1])).collect())
}

/// Coefficient variables `t1..tE, wb1_1..wbN_d` of the propagator product.
pub fn coefficient_vars(num_edges: usize, layout: Layout) -> Vars {
    let mut v: Vec<String> = t_vars(num_edges).iter().cloned().collect();
    for i in 1..=layout.n_rel {
        for j in 1..=layout.d {
            v.push(format!("wb{}_{}", i, j));
        }
    }
    Arc::new(v)
}

pub fn layout_of(g: &DecoratedGraph) -> Layout {
    Layout { d: g.dim(), n_rel: g.num_vertices() - 1 }
}

/// `y_e^j = Σ_i ρ^e_i w̄_i^j / (2 t_e)` as Laurent polynomials.
fn y_components(g: &DecoratedGraph, rho: &[Vec<i32>], vars: &Vars) -> Vec<Vec<Polynomial>> {
    let l = layout_of(g);
    let ne = g.num_edges();
    rho.iter()
        .enumerate()
        .map(|(e, row)| {
            (0..l.d)
                .map(|j| {
                    let mut p = Polynomial::zero(vars);
                    for (i, &r) in row.iter().enumerate() {
                        if r != 0 {
                            let mut ex = vec![0; vars.len()];
                            ex[e] = -1;
                            ex[ne + l.w(i, j)] = 1;
                            p = p.add(&Polynomial::monomial(vars, ex, q_frac(r as i64, 2))).unwrap();
                        }
                    }
                    p
                })
                .collect()
        })
        .collect()
}

/// `Π_e [Π_j (y_e^j)^{n_{j,e}}] dy_e^1 ∧ … ∧ dy_e^d` over generators `dt_e, dw̄_i^j`.
pub fn propagator_product(g: &DecoratedGraph) -> Result<ExteriorElement> {
    let rho = g.incidence_matrix()?;
    let l = layout_of(g);
    let ne = g.num_edges();
    let vars = coefficient_vars(ne, l);
    let gens = schwinger_generators(ne, l.n_rel, l.d);
    let y = y_components(g, &rho, &vars);
    let mut acc = ExteriorElement::scalar(&gens, Polynomial::one(&vars));
    for e in 0..ne {
        let mut dec = Polynomial::one(&vars);
        for j in 0..l.d {
            dec = dec.mul(&y[e][j].pow(g.decorations()[e][j]))?;
        }
        let mut factor = ExteriorElement::scalar(&gens, dec);
        for j in 0..l.d {
            // dy_e^j = Σ_i ρ^e_i dw̄_i^j/(2t_e) + ∂_{t_e} y_e^j dt_e
            let mut one_form = ExteriorElement::generator(&gens, e, y[e][j].partial_derivative(e));
            for (i, &r) in rho[e].iter().enumerate() {
                if r != 0 {
                    let mut ex = vec![0; vars.len()];
                    ex[e] = -1;
                    one_form = one_form.add(&ExteriorElement::generator(&gens, ne + l.w(i, j), Polynomial::monomial(&vars, ex, q_frac(r as i64, 2))))?;
                }
            }
            factor = factor.mul(&one_form)?;
        }
        acc = acc.mul(&factor)?;
    }
    Ok(acc)
}

/// `d(n−1) − (d−1)|E|`: the relative `dw̄` degree `Φ` must carry for the top `dt` component.
pub fn required_test_form_degree(g: &DecoratedGraph, d: usize) -> i64 {
    let d = d as i64;
    d * (g.num_vertices() as i64 - 1) - (d - 1) * g.num_edges() as i64
}

/// A connected edge-generated subgraph with `d|V′| < (d−1)|E′| + d + 1`, if any.
pub fn violating_subgraph(g: &DecoratedGraph, d: usize) -> Option<EdgeSubset> {
    let di = d as i64;
    EdgeSubset::all_nonempty(g.num_edges()).into_iter().find(|s| {
        g.subset_is_connected(s) && di * (g.support(s).len() as i64) < (di - 1) * s.count() as i64 + di + 1
    })
}

/// Sign of reordering `[dw̄_K, dw_rel, dw̄_J]` into `Π_v (dw_v ∧ dw̄_v)`.
pub fn pairing_sign(k: &[usize], j: &[usize], dn: usize) -> f64 {
    let mut seq: Vec<usize> = k.iter().map(|v| 2 * v + 1).collect();
    seq.extend((0..dn).map(|v| 2 * v));
    seq.extend(j.iter().map(|v| 2 * v + 1));
    crate::graph::permutation_parity(&seq) as f64
}

#[derive(Clone, Debug)]
struct CompiledTerm {
    t: Vec<(usize, i32)>,
    wb: Vec<(usize, u16)>,
    c: f64,
}

#[derive(Clone, Debug)]
pub struct ReducedComponent {
    /// Relative `dw̄` indices supplied by the propagators.
    pub k: Vec<usize>,
    /// Index of the test-form component paired with this one.
    pub form_component: usize,
    pub sign: f64,
    /// Coefficient of `dt_S ∧ dw̄_K`, a Laurent polynomial in `t` and `w̄`.
    pub polynomial: Polynomial,
    terms: Vec<CompiledTerm>,
    w_free: bool,
}

/// Position-integrated integrand of the `dt_S` component, in closed Gaussian form.
#[derive(Clone, Debug)]
pub struct SchwingerIntegrand {
    pub layout: Layout,
    pub num_edges: usize,
    pub dt_set: EdgeSubset,
    incidence: Vec<Vec<i32>>,
    pub form: TestForm,
    /// `(−2i)^{dN} c0 π^{−dE}`.
    pub constant: Complex64,
    pub components: Vec<ReducedComponent>,
}

fn compile_terms(p: &Polynomial, ne: usize) -> Vec<CompiledTerm> {
    p.terms()
        .map(|(e, c)| CompiledTerm {
            t: (0..ne).filter(|&i| e[i] != 0).map(|i| (i, e[i])).collect(),
            wb: (ne..e.len()).filter(|&i| e[i] != 0).map(|i| (i - ne, e[i] as u16)).collect(),
            c: crate::symbolic::q_to_f64(c),
        })
        .collect()
}

impl SchwingerIntegrand {
    /// Reduces the `dt_S` component against `form`; `form` must carry degree
    /// `required_test_form_degree − (|E| − |S|)`.
    pub fn new(g: &DecoratedGraph, form: &TestForm, dt_set: &EdgeSubset) -> Result<Self> {
        let product = propagator_product(g)?;
        Self::from_product(g, &product, form, dt_set)
    }

    pub fn from_product(g: &DecoratedGraph, product: &ExteriorElement, form: &TestForm, dt_set: &EdgeSubset) -> Result<Self> {
        let l = layout_of(g);
        let ne = g.num_edges();
        let dn = l.dim();
        if form.layout != l {
            return Err(Error::DegreeMismatch { expected: dn as i64, found: form.layout.dim() as i64 });
        }
        let need = required_test_form_degree(g, l.d) - (ne as i64 - dt_set.count() as i64);
        let constant = (Complex64::new(0.0, -2.0)).powu(dn as u32) * form.profile * PI.powi(-((l.d * ne) as i32));
        let mut comps = Vec::new();
        if need >= 0 {
            form.check_degree(need as usize)?;
            let dt_mask = dt_set.bits();
            for (m, p) in product.terms() {
                if m & ((1u64 << ne) - 1) != dt_mask {
                    continue;
                }
                let k: Vec<usize> = (0..dn).filter(|v| m >> (ne + v) & 1 == 1).collect();
                for (ci, c) in form.components.iter().enumerate() {
                    let complete = k.len() + c.generators.len() == dn && c.generators.iter().all(|v| !k.contains(v));
                    if !complete {
                        continue;
                    }
                    let w_free = c.polynomial.terms().all(|(e, _)| e[..dn].iter().all(|&x| x == 0));
                    comps.push(ReducedComponent {
                        sign: pairing_sign(&k, &c.generators, dn),
                        k: k.clone(),
                        form_component: ci,
                        polynomial: p.clone(),
                        terms: compile_terms(p, ne),
                        w_free,
                    });
                }
            }
        }
        Ok(SchwingerIntegrand { layout: l, num_edges: ne, dt_set: *dt_set, incidence: g.incidence_matrix()?, form: form.clone(), constant, components: comps })
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty() || self.form.is_zero()
    }

    pub fn laplacian(&self, t: &[f64]) -> DMatrix<f64> {
        laplacian_numeric(&self.incidence, t)
    }

    fn r_at(&self, comp: &ReducedComponent, t: &[f64], wb: &[Complex64]) -> Complex64 {
        comp.terms
            .iter()
            .map(|term| {
                let mut v = Complex64::new(term.c * term.t.iter().map(|&(i, k)| t[i].powi(k)).product::<f64>(), 0.0);
                for &(i, k) in &term.wb {
                    v *= wb[i].powu(k as u32);
                }
                v
            })
            .sum()
    }

    fn r_poly(&self, comp: &ReducedComponent, t: &[f64]) -> ComplexPoly {
        let l = self.layout;
        let mut p = ComplexPoly::zero(l.nvars());
        for term in &comp.terms {
            let mut e = vec![0u16; l.nvars()];
            for &(i, k) in &term.wb {
                e[l.dim() + i] = k;
            }
            p.add_term(e, Complex64::new(term.c * term.t.iter().map(|&(i, k)| t[i].powi(k)).product::<f64>(), 0.0));
        }
        p
    }

    /// Gaussian data at `t`: `B = (M/2 + a)^{-1}`, `det(M/2 + a)`, means of `w` and `w̄`, and `Σ_j J_j·B K_j`.
    fn gaussian(&self, t: &[f64]) -> Option<(DMatrix<f64>, f64, Vec<Complex64>, Vec<Complex64>, Complex64)> {
        let l = self.layout;
        let n = l.n_rel;
        let m = self.laplacian(t);
        let a = m * 0.5 + DMatrix::identity(n, n) * self.form.width;
        let chol = a.clone().cholesky()?;
        let det: f64 = chol.l().diagonal().iter().map(|x| x * x).product();
        let b = chol.inverse();
        let mut mu = vec![Complex64::new(0.0, 0.0); l.dim()];
        let mut nu = vec![Complex64::new(0.0, 0.0); l.dim()];
        let mut expo = Complex64::new(0.0, 0.0);
        for j in 0..l.d {
            let jv: Vec<Complex64> = (0..n).map(|i| 0.5 * self.form.momenta[l.w(i, j)]).collect();
            let kv: Vec<Complex64> = (0..n).map(|i| -0.5 * self.form.momenta[l.w(i, j)].conj()).collect();
            for i in 0..n {
                let mut bk = Complex64::new(0.0, 0.0);
                let mut bj = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    bk += b[(i, k)] * kv[k];
                    bj += b[(i, k)] * jv[k];
                }
                mu[l.w(i, j)] = bk;
                nu[l.w(i, j)] = bj;
                expo += jv[i] * bk;
            }
        }
        Some((b, det, mu, nu, expo))
    }

    /// Value of the reduced integrand at interior `t`.
    pub fn eval(&self, t: &[f64]) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        let l = self.layout;
        let (b, det, mu, nu, expo) = match self.gaussian(t) {
            Some(x) => x,
            None => return Complex64::new(f64::NAN, f64::NAN),
        };
        let norm = (PI.powi(l.n_rel as i32) / det).powi(l.d as i32);
        let mut s = Complex64::new(0.0, 0.0);
        for comp in &self.components {
            let q = &self.form.components[comp.form_component].polynomial;
            let e = if comp.w_free {
                let at: Vec<Complex64> = mu.iter().chain(nu.iter()).cloned().collect();
                self.r_at(comp, t, &nu) * q.eval(&at)
            } else {
                gaussian_expectation(&self.r_poly(comp, t).mul(q), l, &b, &mu, &nu)
            };
            s += comp.sign * e;
        }
        self.constant * norm * expo.exp() * s
    }

    /// `−½ Σ k_i (M⁻¹)^{ij} k̄_j`-type exponent including the packet width, at `t`.
    pub fn exponent(&self, t: &[f64]) -> Complex64 {
        self.gaussian(t).map(|g| g.4).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    }
}

pub fn laplacian_numeric(rho: &[Vec<i32>], t: &[f64]) -> DMatrix<f64> {
    let n = rho.first().map(|r| r.len()).unwrap_or(0);
    let mut m = DMatrix::zeros(n, n);
    for (e, row) in rho.iter().enumerate() {
        for i in 0..n {
            if row[i] == 0 {
                continue;
            }
            for k in 0..n {
                if row[k] != 0 {
                    m[(i, k)] += (row[i] * row[k]) as f64 / t[e];
                }
            }
        }
    }
    m
}

/// Closed-form reduction of the top `dt` component (see [`SchwingerIntegrand`]).
pub fn wick_reduce(g: &DecoratedGraph, form: &TestForm) -> Result<SchwingerIntegrand> {
    let r = required_test_form_degree(g, g.dim());
    if r < 0 {
        let empty = TestForm { components: vec![], ..form.clone() };
        return SchwingerIntegrand::new(g, &empty, &g.full_subset());
    }
    SchwingerIntegrand::new(g, form, &g.full_subset())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalOptions {
    /// Return exactly 0 when a connected subgraph violates the dimension count.
    pub short_circuit: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { short_circuit: true }
    }
}

fn to_result(r: crate::quadrature::CubatureResult) -> Result<IntegralResult> {
    let r = r.require()?;
    Ok(IntegralResult { value: Complex64::new(r.value[0], r.value[1]), error: r.total_error(), evaluations: r.evaluations })
}

/// Integrates a function of `t ∈ [ε, L]^E` (`L` may be infinite).
/// For `ε = 0` the origin is resolved in the full corner chart: `t = ρ·y` with
/// `max_e y_e = 1`, one sector per edge attaining the maximum.
pub fn integrate_schwinger<F>(ne: usize, eps: f64, l: f64, f: F, cfg: &QuadConfig) -> crate::quadrature::CubatureResult
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    if ne == 0 {
        let v = f(&[]);
        return crate::quadrature::CubatureResult { value: vec![v.re, v.im], error: vec![0.0; 2], evaluations: 1, converged: true };
    }
    if eps > 0.0 {
        if l.is_finite() {
            let lr = (l / eps).ln();
            integrate_cube(
                |u: &[f64]| {
                    let t: Vec<f64> = u.iter().map(|x| eps * (lr * x).exp()).collect();
                    let jac: f64 = t.iter().map(|x| x * lr).product();
                    let v = f(&t) * jac;
                    vec![v.re, v.im]
                },
                ne,
                2,
                cfg,
            )
        } else {
            integrate_cube(
                |u: &[f64]| {
                    let t: Vec<f64> = u.iter().map(|x| eps + x / (1.0 - x)).collect();
                    let jac: f64 = u.iter().map(|x| 1.0 / ((1.0 - x) * (1.0 - x))).product();
                    let v = f(&t) * jac;
                    vec![v.re, v.im]
                },
                ne,
                2,
                cfg,
            )
        }
    } else {
        integrate_cube(
            |u: &[f64]| {
                let (rho, drho) = if l.is_finite() { (l * u[0], l) } else { (u[0] / (1.0 - u[0]), 1.0 / ((1.0 - u[0]) * (1.0 - u[0]))) };
                let mut acc = Complex64::new(0.0, 0.0);
                for e in 0..ne {
                    let mut t = Vec::with_capacity(ne);
                    let mut k = 1;
                    for f2 in 0..ne {
                        if f2 == e {
                            t.push(rho);
                        } else {
                            t.push(rho * u[k]);
                            k += 1;
                        }
                    }
                    acc += f(&t);
                }
                let v = acc * rho.powi(ne as i32 - 1) * drho;
                if v.re.is_finite() && v.im.is_finite() {
                    vec![v.re, v.im]
                } else {
                    vec![0.0, 0.0]
                }
            },
            ne,
            2,
            cfg,
        )
    }
}

/// `W_ε^L((Γ, n), Φ)`.
pub fn evaluate_w(g: &DecoratedGraph, form: &TestForm, eps: f64, l: f64, cfg: &QuadConfig) -> Result<IntegralResult> {
    evaluate_w_with(g, form, eps, l, cfg, EvalOptions::default())
}

pub fn evaluate_w_with(g: &DecoratedGraph, form: &TestForm, eps: f64, l: f64, cfg: &QuadConfig, opts: EvalOptions) -> Result<IntegralResult> {
    g.check_admissible()?;
    if eps < 0.0 || !(l > eps) {
        return Err(Error::NonPositiveEpsilon);
    }
    let d = g.dim();
    let r = required_test_form_degree(g, d);
    if r < 0 || form.is_zero() {
        return Ok(IntegralResult::zero());
    }
    form.check_degree(r as usize)?;
    if opts.short_circuit && violating_subgraph(g, d).is_some() {
        return Ok(IntegralResult::zero());
    }
    let integrand = wick_reduce(g, form)?;
    if integrand.is_zero() {
        return Ok(IntegralResult::zero());
    }
    to_result(integrate_schwinger(g.num_edges(), eps, l, |t| integrand.eval(t), cfg))
}

/// Numeric coefficient of `dt_S ∧ dw̄_K` in `Π_e d^d y_e` as a minor of the one-form matrix,
/// times the decoration monomials.
pub fn numeric_propagator_coefficient(g: &DecoratedGraph, rho: &[Vec<i32>], t: &[f64], wb: &[Complex64], columns: &[usize]) -> Complex64 {
    let l = layout_of(g);
    let ne = g.num_edges();
    let rows = l.d * ne;
    if columns.len() != rows {
        return Complex64::new(0.0, 0.0);
    }
    let mut a = DMatrix::<Complex64>::zeros(rows, rows);
    let mut dec = Complex64::new(1.0, 0.0);
    for e in 0..ne {
        for j in 0..l.d {
            let mut y = Complex64::new(0.0, 0.0);
            for i in 0..l.n_rel {
                y += rho[e][i] as f64 * wb[l.w(i, j)];
            }
            y /= 2.0 * t[e];
            dec *= y.powu(g.decorations()[e][j]);
            for (c, &col) in columns.iter().enumerate() {
                a[(e * l.d + j, c)] = if col < ne {
                    if col == e {
                        -y / t[e]
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                } else {
                    let v = col - ne;
                    let (i, jj) = (v / l.d, v % l.d);
                    if jj == j {
                        Complex64::new(rho[e][i] as f64 / (2.0 * t[e]), 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                };
            }
        }
    }
    a.determinant() * dec
}

/// Position-space Monte-Carlo estimate of `W_ε^L`: `t` uniform on `[ε, L]^E`, relative
/// positions Gaussian with covariance `M(t)⁻¹` per real coordinate.
pub fn mc_oracle_w(g: &DecoratedGraph, form: &TestForm, eps: f64, l: f64, samples: usize, seed: u64) -> Result<IntegralResult> {
    g.check_admissible()?;
    if !(eps > 0.0) {
        return Err(Error::NonPositiveEpsilon);
    }
    if !(l > eps) || !l.is_finite() {
        return Err(Error::NonPositiveEpsilon);
    }
    let lay = layout_of(g);
    let d = lay.d;
    let ne = g.num_edges();
    let dn = lay.dim();
    let r = required_test_form_degree(g, d);
    if r < 0 || form.is_zero() || samples == 0 {
        return Ok(IntegralResult { value: Complex64::new(0.0, 0.0), error: 0.0, evaluations: samples });
    }
    form.check_degree(r as usize)?;
    let rho = g.incidence_matrix()?;
    let n = lay.n_rel;
    let pairs: Vec<(usize, Vec<usize>, f64)> = form
        .components
        .iter()
        .enumerate()
        .map(|(ci, c)| {
            let k: Vec<usize> = (0..dn).filter(|v| !c.generators.contains(v)).collect();
            (ci, k.clone(), pairing_sign(&k, &c.generators, dn))
        })
        .collect();
    let constant = Complex64::new(0.0, -2.0).powu(dn as u32) * form.profile * PI.powi(-((d * ne) as i32)) * (l - eps).powi(ne as i32);
    let sample = |idx: u64| -> Complex64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(idx);
        let t: Vec<f64> = (0..ne).map(|_| rng.random_range(eps..l)).collect();
        let m = laplacian_numeric(&rho, &t);
        let chol = match m.clone().cholesky() {
            Some(c) => c,
            None => return Complex64::new(0.0, 0.0),
        };
        let det_m: f64 = chol.l().diagonal().iter().map(|x| x * x).product();
        let lt = chol.l().transpose();
        let mut w = vec![Complex64::new(0.0, 0.0); dn];
        for j in 0..d {
            let zx = nalgebra::DVector::from_iterator(n, (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)));
            let zy = nalgebra::DVector::from_iterator(n, (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)));
            let x = lt.clone().solve_upper_triangular(&zx).unwrap();
            let y = lt.clone().solve_upper_triangular(&zy).unwrap();
            for i in 0..n {
                w[lay.w(i, j)] = Complex64::new(x[i], y[i]);
            }
        }
        let wb: Vec<Complex64> = w.iter().map(|z| z.conj()).collect();
        let gauss_norm = ((2.0 * PI).powi(n as i32) / det_m).powi(d as i32);
        let mut s = Complex64::new(0.0, 0.0);
        for (ci, k, sign) in &pairs {
            let mut cols: Vec<usize> = (0..ne).collect();
            cols.extend(k.iter().map(|v| ne + v));
            let coeff = numeric_propagator_coefficient(g, &rho, &t, &wb, &cols);
            s += *sign * coeff * form.eval_component(*ci, &w, &wb);
        }
        constant * gauss_norm * s
    };
    const CHUNK: usize = 4096;
    let nchunks = samples.div_ceil(CHUNK);
    let partial: Vec<(Complex64, f64, f64)> = (0..nchunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = ((c + 1) * CHUNK).min(samples);
            let mut s = Complex64::new(0.0, 0.0);
            let mut s2r = 0.0;
            let mut s2i = 0.0;
            for i in lo..hi {
                let v = sample(i as u64);
                s += v;
                s2r += v.re * v.re;
                s2i += v.im * v.im;
            }
            (s, s2r, s2i)
        })
        .collect();
    let mut s = Complex64::new(0.0, 0.0);
    let (mut s2r, mut s2i) = (0.0, 0.0);
    for (a, b, c) in partial {
        s += a;
        s2r += b;
        s2i += c;
    }
    let nf = samples as f64;
    let mean = s / nf;
    let var_r = (s2r / nf - mean.re * mean.re).max(0.0);
    let var_i = (s2i / nf - mean.im * mean.im).max(0.0);
    let se = ((var_r + var_i) / nf).sqrt();
    Ok(IntegralResult { value: mean, error: se, evaluations: samples })
}

/// Conjugates a complex constant; handy for sign bookkeeping in callers.
pub fn minus_two_i_power(k: usize) -> Complex64 {
    (-2.0 * I).powu(k as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::q;

    #[test]
    fn heat_kernel_examples() {
        let v = heat_kernel(1.0 / (2.0 * PI), &[Complex64::new(0.0, 0.0)]).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
        assert!(heat_kernel(0.3, &[Complex64::new(50.0, 0.0)]).unwrap() < 1e-300);
        assert_eq!(heat_kernel(0.0, &[Complex64::new(0.0, 0.0)]), Err(Error::NonPositiveT));
    }

    #[test]
    fn bm_kernel_d1() {
        let z = [Complex64::new(0.3, -0.8)];
        let w = [Complex64::new(-0.1, 0.2)];
        let k = bm_kernel(&z, &w).unwrap();
        let expect = 1.0 / (PI * (z[0] - w[0]));
        assert!((k[0] - expect).norm() < 1e-14);
        assert_eq!(bm_kernel(&z, &z), Err(Error::CoincidentPoints));
    }

    #[test]
    fn single_edge_product() {
        let g = DecoratedGraph::single_edge(1);
        let p = propagator_product(&g).unwrap();
        let v = p.coeff_vars().clone();
        let c = p.extract_component(&[0]);
        let expect = Polynomial::monomial(&v, vec![-2, 1], q_frac(1, 2));
        assert_eq!(c, expect);
        let c2 = p.extract_component(&[1]);
        assert_eq!(c2, Polynomial::monomial(&v, vec![-1, 0], q_frac(-1, 2)));
        assert_eq!(p.degree(), Some(1));
        let gd = g.with_decorations(vec![vec![1]]).unwrap();
        let pd = propagator_product(&gd).unwrap();
        let y = Polynomial::monomial(&v, vec![-1, 1], q_frac(-1, 2));
        assert_eq!(pd.extract_component(&[0]), expect.mul(&y).unwrap());
        let _ = q(0);
    }

    #[test]
    fn required_degree_examples() {
        assert_eq!(required_test_form_degree(&DecoratedGraph::single_edge(1), 1), 1);
        assert_eq!(required_test_form_degree(&DecoratedGraph::triangle(2), 2), 1);
    }
}
