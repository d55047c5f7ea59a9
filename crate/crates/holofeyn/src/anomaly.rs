//! Origin-boundary integrals: the anomaly operator, its vanishing certificate, the
//! face sum behind the quadratic relations, and outer-boundary decay.
//!
//! The origin face `∂C_{Γ₁}` is the positive unit-sphere orthant with the orientation it
//! inherits as the boundary of a ball, `dσ = Σ_e (−1)^{e−1} ξ_e dξ_{Γ₁∖e}`.

use crate::amplitude::{
    integrate_schwinger, layout_of, pairing_sign, propagator_product, required_test_form_degree, violating_subgraph, IntegralResult,
    SchwingerIntegrand,
};
use crate::error::{Error, Result};
use crate::graph::{permutation_parity, DecoratedGraph, EdgeSubset};
use crate::polys::{rational_to_chart, t_vars, weighted_laplacian};
use crate::quadrature::{cube_to_simplex, integrate_box, sphere_orthant_integrate, QuadConfig};
use crate::symbolic::{q, CompiledPoly, ExteriorElement, Polynomial, RationalFunction, Vars};
use crate::testform::TestForm;
use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VanishingCertificate {
    pub vanishes: bool,
    /// `d|Γ₀| − (d−1)|Γ₁| − m(d+1)`, `m` the number of connected components.
    pub power: i64,
    /// Connected subgraph violating `d|V′| ≥ (d−1)|E′| + d + 1`, if any.
    pub violating_subgraph: Option<EdgeSubset>,
}

/// Exact vanishing test for the origin-boundary integral.
pub fn anomaly_vanishes_exactly(g: &DecoratedGraph, d: usize) -> Result<VanishingCertificate> {
    g.check_no_self_loops()?;
    let di = d as i64;
    let power = di * g.num_vertices() as i64 - (di - 1) * g.num_edges() as i64 - g.num_components() as i64 * (di + 1);
    let violating = violating_subgraph(g, d);
    Ok(VanishingCertificate { vanishes: power > 0 || violating.is_some(), power, violating_subgraph: violating })
}

/// `(−2i)^{dN} (2π)^{dN} π^{−d|Γ₁|}`.
pub fn anomaly_prefactor(g: &DecoratedGraph) -> Complex64 {
    let l = layout_of(g);
    let dn = l.dim() as u32;
    Complex64::new(0.0, -2.0).powu(dn) * (2.0 * PI).powi(dn as i32) * PI.powi(-((l.d * g.num_edges()) as i32))
}

fn factorial(k: u32) -> u64 {
    (1..=k as u64).product()
}

pub fn multi_factorial(alpha: &[u16]) -> u64 {
    alpha.iter().map(|&a| factorial(a as u32)).product()
}

/// One exact leading coefficient `λ_{S,α,J}(t)` of the small-`t` expansion of the `dt_S` component:
/// the `w^α` part of `Σ_K s_K det(M)^{−d} E_{2M⁻¹}[R_{S,K}(w̄) w^α]` for form component `J`.
#[derive(Clone, Debug)]
pub struct LeadingTerm {
    pub component: usize,
    pub alpha: Vec<u16>,
    pub lambda: RationalFunction,
}

/// Exact leading coefficients of the `dt_S` component against form components whose
/// generator sets are `gens`.
pub fn leading_coefficients(g: &DecoratedGraph, product: &ExteriorElement, dt_set: &EdgeSubset, gens: &[Vec<usize>]) -> Result<Vec<LeadingTerm>> {
    let l = layout_of(g);
    let ne = g.num_edges();
    let dn = l.dim();
    let lap = weighted_laplacian(g)?;
    let tv = t_vars(ne);
    let mut names: Vec<String> = tv.iter().cloned().collect();
    for i in 1..=l.n_rel {
        for j in 1..=l.d {
            names.push(format!("w{}_{}", i, j));
        }
    }
    let target: Vars = Arc::new(names);
    let mut images: Vec<(String, Polynomial)> = Vec::new();
    for k in 0..l.n_rel {
        for j in 0..l.d {
            let mut img = Polynomial::zero(&target);
            for i in 0..l.n_rel {
                let c = lap.cut_polynomials[i][k].embed(&target)?;
                img = img.add(&c.mul(&Polynomial::var(&target, ne + l.w(i, j)))?)?;
            }
            images.push((format!("wb{}_{}", k + 1, j + 1), img));
        }
    }
    let subs: Vec<(&str, Polynomial)> = images.iter().map(|(n, p)| (n.as_str(), p.clone())).collect();
    let pt = crate::polys::edge_monomial(&tv, &EdgeSubset::full(ne));
    let kirchhoff = lap.tree_polynomial.clone();
    let mut acc: BTreeMap<(usize, Vec<u16>), RationalFunction> = BTreeMap::new();
    let dt_mask = dt_set.bits();
    for (mask, r) in product.terms() {
        if mask & ((1u64 << ne) - 1) != dt_mask {
            continue;
        }
        let k: Vec<usize> = (0..dn).filter(|v| mask >> (ne + v) & 1 == 1).collect();
        let m: i32 = match r.terms().next() {
            Some((e, _)) => e[ne..].iter().sum(),
            None => continue,
        };
        if r.terms().any(|(e, _)| e[ne..].iter().sum::<i32>() != m) {
            return Err(Error::AssertionFailed("propagator coefficient is not homogeneous in w̄".into()));
        }
        let sub = r.substitute(&subs)?;
        let mut by_alpha: BTreeMap<Vec<u16>, Polynomial> = BTreeMap::new();
        for (e, c) in sub.terms() {
            let alpha: Vec<u16> = e[ne..].iter().map(|&x| x as u16).collect();
            let entry = by_alpha.entry(alpha).or_insert_with(|| Polynomial::zero(&tv));
            *entry = entry.add(&Polynomial::monomial(&tv, e[..ne].to_vec(), c.clone()))?;
        }
        let den = kirchhoff.pow((l.d as i32 + m) as u32);
        for (ci, jg) in gens.iter().enumerate() {
            let complete = k.len() + jg.len() == dn && jg.iter().all(|v| !k.contains(v));
            if !complete {
                continue;
            }
            let s = pairing_sign(&k, jg, dn) as i64;
            for (alpha, nalpha) in &by_alpha {
                let scale = q(s) * crate::symbolic::Q::from_integer(BigInt::from(multi_factorial(alpha)) * BigInt::from(2).pow(m as u32));
                let num = nalpha.mul(&pt.pow(l.d as u32))?.scale(&scale);
                let term = RationalFunction::new(num, den.clone())?;
                let key = (ci, alpha.clone());
                let v = match acc.remove(&key) {
                    Some(prev) => prev.add(&term)?,
                    None => term,
                };
                acc.insert(key, v);
            }
        }
    }
    Ok(acc.into_iter().filter(|(_, v)| !v.is_zero()).map(|((component, alpha), lambda)| LeadingTerm { component, alpha, lambda }).collect())
}

#[derive(Clone, Debug)]
struct CompiledRational {
    num: CompiledPoly,
    den: CompiledPoly,
}

impl CompiledRational {
    fn new(r: &RationalFunction) -> Self {
        CompiledRational { num: r.numerator().compile(), den: r.denominator().compile() }
    }
    fn eval(&self, x: &[f64]) -> f64 {
        self.num.eval(x) / self.den.eval(x)
    }
}

/// Constant-coefficient holomorphic operator, stored as `α ↦ c_α` for `Σ c_α ∂^α`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnomalySymbol {
    pub d: usize,
    pub n_rel: usize,
    pub order: u32,
    pub coefficients: BTreeMap<Vec<u16>, Complex64>,
    pub errors: BTreeMap<Vec<u16>, f64>,
}

impl AnomalySymbol {
    /// Every multi-index has total degree equal to `order`.
    pub fn check_order(&self) -> bool {
        self.coefficients.keys().all(|a| a.iter().map(|&x| x as u32).sum::<u32>() == self.order)
    }

    /// Action on the plane wave `e^{½ k·w}`, i.e. `Σ c_α (k/2)^α`.
    pub fn at_momenta(&self, k: &[Complex64]) -> Complex64 {
        self.coefficients.iter().map(|(a, c)| c * a.iter().zip(k).map(|(&e, kv)| (0.5 * kv).powu(e as u32)).product::<Complex64>()).sum()
    }

    pub fn max_error(&self) -> f64 {
        self.errors.values().cloned().fold(0.0, f64::max)
    }
}

fn degree_zero_gens() -> Vec<Vec<usize>> {
    vec![vec![]]
}

/// Coefficients of the anomaly operator of a connected Laman graph, by quadrature over the
/// origin face.
pub fn anomaly_symbol(g: &DecoratedGraph, cfg: &QuadConfig) -> Result<AnomalySymbol> {
    g.check_admissible()?;
    let d = g.dim();
    if !g.is_laman(d)?.is_laman {
        return Err(Error::NotLaman(d));
    }
    let ne = g.num_edges();
    let l = layout_of(g);
    let order = (ne - 1) as u32 + g.total_decoration();
    let product = propagator_product(g)?;
    let full = EdgeSubset::full(ne);
    let mut alphas: Vec<Vec<u16>> = Vec::new();
    let mut per_edge: Vec<Vec<(usize, CompiledRational)>> = Vec::new();
    for e in 0..ne {
        let s = full.intersection(&EdgeSubset::from_indices(ne, &[e])?.complement());
        let terms = leading_coefficients(g, &product, &s, &degree_zero_gens())?;
        let mut v = Vec::new();
        for t in terms {
            let idx = match alphas.iter().position(|a| *a == t.alpha) {
                Some(i) => i,
                None => {
                    alphas.push(t.alpha.clone());
                    alphas.len() - 1
                }
            };
            v.push((idx, CompiledRational::new(&t.lambda)));
        }
        per_edge.push(v);
    }
    let na = alphas.len();
    let r = sphere_orthant_integrate(
        ne,
        |xi: &[f64]| {
            let mut out = vec![0.0; na];
            for (e, terms) in per_edge.iter().enumerate() {
                let w = if e % 2 == 0 { xi[e] } else { -xi[e] };
                for (idx, lam) in terms {
                    out[*idx] += w * lam.eval(xi);
                }
            }
            out
        },
        na,
        cfg,
    )
    .require()?;
    let kappa = anomaly_prefactor(g);
    let mut coefficients = BTreeMap::new();
    let mut errors = BTreeMap::new();
    for (i, a) in alphas.into_iter().enumerate() {
        let f = multi_factorial(&a) as f64;
        coefficients.insert(a.clone(), kappa * r.value[i] / f);
        errors.insert(a, kappa.norm() * r.error[i] / f);
    }
    Ok(AnomalySymbol { d, n_rel: l.n_rel, order, coefficients, errors })
}

/// `∫ (DΦ)|_{w=0}`: the symbol applied to a degree-0 test form.
pub fn o_apply(sym: &AnomalySymbol, form: &TestForm) -> Result<Complex64> {
    if form.layout.d != sym.d || form.layout.n_rel != sym.n_rel {
        return Err(Error::DegreeMismatch { expected: (sym.d * sym.n_rel) as i64, found: form.layout.dim() as i64 });
    }
    form.check_degree(0)?;
    let dn = form.layout.dim();
    let mut s = Complex64::new(0.0, 0.0);
    for ci in 0..form.components.len() {
        let taylor = form.holomorphic_taylor(ci, sym.order);
        for (e, c) in taylor.terms() {
            let a = &e[..dn];
            if let Some(coef) = sym.coefficients.get(a) {
                s += coef * c * multi_factorial(a) as f64;
            }
        }
    }
    Ok(s * form.profile)
}

/// Polynomial extrapolation to `x = 0` (Neville); returns the value and the change from
/// the previous order.
pub fn neville_at_zero(xs: &[f64], ys: &[Complex64]) -> (Complex64, f64) {
    let n = xs.len();
    let mut p = ys.to_vec();
    let mut prev = p[n - 1];
    let mut last = p[n - 1];
    for k in 1..n {
        for i in 0..n - k {
            p[i] = (xs[i + k] * p[i] - xs[i] * p[i + 1]) / (xs[i + k] - xs[i]);
        }
        prev = last;
        last = p[0];
    }
    (last, (last - prev).norm())
}

/// Ray samples used for the `ρ → 0` extrapolation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RayExtrapolation {
    pub rho0: f64,
    pub points: usize,
}

impl Default for RayExtrapolation {
    fn default() -> Self {
        RayExtrapolation { rho0: 0.02, points: 7 }
    }
}

/// Finite-`t` boundary integrand of the origin face: `ρ^{E−1} Σ_e (−1)^{e−1} ξ_e G_{Γ₁∖e}(ρξ)`.
pub struct BoundaryIntegrand {
    parts: Vec<SchwingerIntegrand>,
    num_edges: usize,
}

impl BoundaryIntegrand {
    pub fn new(g: &DecoratedGraph, form: &TestForm) -> Result<Self> {
        let ne = g.num_edges();
        let product = propagator_product(g)?;
        let full = EdgeSubset::full(ne);
        let parts = (0..ne)
            .map(|e| {
                let s = full.intersection(&EdgeSubset::from_indices(ne, &[e])?.complement());
                SchwingerIntegrand::from_product(g, &product, form, &s)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BoundaryIntegrand { parts, num_edges: ne })
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(|p| p.is_zero())
    }

    pub fn at(&self, rho: f64, xi: &[f64]) -> Complex64 {
        let t: Vec<f64> = xi.iter().map(|x| rho * x).collect();
        let mut s = Complex64::new(0.0, 0.0);
        for (e, p) in self.parts.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let v = p.eval(&t) * xi[e];
            s += if e % 2 == 0 { v } else { -v };
        }
        s * rho.powi(self.num_edges as i32 - 1)
    }

    pub fn limit(&self, xi: &[f64], ex: RayExtrapolation) -> (Complex64, f64) {
        let xs: Vec<f64> = (0..ex.points).map(|j| ex.rho0 * 0.5f64.powi(j as i32)).collect();
        let ys: Vec<Complex64> = xs.iter().map(|&r| self.at(r, xi)).collect();
        neville_at_zero(&xs, &ys)
    }
}

/// Origin-face integral `O_Γ(Φ)` computed from the exact finite-`t` Gaussian reduction,
/// extrapolated to the face along rays. `Φ` carries degree `required_test_form_degree − 1`.
pub fn boundary_value(g: &DecoratedGraph, form: &TestForm, cfg: &QuadConfig, ex: RayExtrapolation) -> Result<IntegralResult> {
    g.check_admissible()?;
    let r = required_test_form_degree(g, g.dim()) - 1;
    if r < 0 || form.is_zero() {
        return Ok(IntegralResult::zero());
    }
    form.check_degree(r as usize)?;
    let b = BoundaryIntegrand::new(g, form)?;
    if b.is_zero() {
        return Ok(IntegralResult::zero());
    }
    let res = sphere_orthant_integrate(
        g.num_edges(),
        |xi: &[f64]| {
            let v = b.limit(xi, ex).0;
            vec![v.re, v.im]
        },
        2,
        cfg,
    )
    .require()?;
    Ok(IntegralResult { value: Complex64::new(res.value[0], res.value[1]), error: res.total_error(), evaluations: res.evaluations })
}

/// Integral over the origin face `∂C_{Γ′}` of the box `[0, L]^{|Γ₁|}`, in the coordinates
/// `(ξ_{Γ′}, t_{Γ∖Γ′})` with orientation `dσ ∧ dt_{Γ∖Γ′}`. For `Γ′ = Γ` this is `O_Γ(Φ)`.
/// `Φ` carries degree `required_test_form_degree − 1`.
pub fn origin_face_value(g: &DecoratedGraph, form: &TestForm, sub: &EdgeSubset, l: f64, cfg: &QuadConfig, ex: RayExtrapolation) -> Result<IntegralResult> {
    g.check_admissible()?;
    if sub.is_empty() {
        return Err(Error::EmptySubset);
    }
    let r = required_test_form_degree(g, g.dim()) - 1;
    if r < 0 || form.is_zero() {
        return Ok(IntegralResult::zero());
    }
    form.check_degree(r as usize)?;
    let ne = g.num_edges();
    let inside = sub.indices();
    let outside = sub.complement().indices();
    let a = inside.len();
    let product = propagator_product(g)?;
    let full = EdgeSubset::full(ne);
    let mut parts = Vec::new();
    for (i, &f) in inside.iter().enumerate() {
        let s = full.intersection(&EdgeSubset::from_indices(ne, &[f])?.complement());
        let mut seq: Vec<usize> = inside.iter().cloned().filter(|&e| e != f).collect();
        seq.extend(&outside);
        let sign = permutation_parity(&seq) as f64 * if i % 2 == 0 { 1.0 } else { -1.0 };
        let part = SchwingerIntegrand::from_product(g, &product, form, &s)?;
        if !part.is_zero() {
            parts.push((f, sign, part));
        }
    }
    if parts.is_empty() {
        return Ok(IntegralResult::zero());
    }
    let h = |rho: f64, xi: &[f64], rest: &[f64]| -> Complex64 {
        let mut t = vec![0.0; ne];
        for (i, &e) in inside.iter().enumerate() {
            t[e] = rho * xi[i];
        }
        for (i, &e) in outside.iter().enumerate() {
            t[e] = rest[i];
        }
        let mut s = Complex64::new(0.0, 0.0);
        for (f, sign, part) in &parts {
            let i = inside.iter().position(|e| e == f).unwrap();
            s += part.eval(&t) * (sign * xi[i]);
        }
        s * rho.powi(a as i32 - 1)
    };
    let sphere = |rest: &[f64]| -> Complex64 {
        let scale = rest.iter().cloned().fold(1.0, f64::min);
        let xs: Vec<f64> = (0..ex.points).map(|j| ex.rho0 * scale * 0.5f64.powi(j as i32)).collect();
        let res = sphere_orthant_integrate(
            a,
            |xi: &[f64]| {
                let ys: Vec<Complex64> = xs.iter().map(|&rho| h(rho, xi, rest)).collect();
                let v = neville_at_zero(&xs, &ys).0;
                vec![v.re, v.im]
            },
            2,
            cfg,
        );
        Complex64::new(res.value[0], res.value[1])
    };
    let res = integrate_schwinger(outside.len(), 0.0, l, sphere, cfg).require()?;
    Ok(IntegralResult { value: Complex64::new(res.value[0], res.value[1]), error: res.total_error(), evaluations: res.evaluations })
}

/// `(−1)` to the parity of listing `Γ′` before `Γ∖Γ′`.
pub fn face_block_sign(sub: &EdgeSubset) -> f64 {
    let mut seq = sub.indices();
    seq.extend(sub.complement().indices());
    permutation_parity(&seq) as f64
}

/// One face `Γ′ ⊊ Γ` of the origin face `∂C_{Γ₁}`.
#[derive(Clone, Debug, Serialize)]
pub struct FaceTerm {
    pub subset: EdgeSubset,
    pub laman: bool,
    /// `(−1)^{σ(Γ′, Γ/Γ′)}`.
    pub permutation_sign: i8,
    /// Integral of the boundary form over the face with its induced orientation.
    pub face_integral: Complex64,
    /// `O_{Γ′} ∘ O_{Γ/Γ′}(Φ)` in the sign convention of the relation.
    pub composed: Complex64,
    pub error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuadraticReport {
    /// `Σ_{Γ′ Laman} (−1)^{(d+1)σ} O∘O(Φ)`.
    pub residual: Complex64,
    pub error: f64,
    pub max_term: f64,
    /// Sum of all face integrals (Laman or not).
    pub total_faces: Complex64,
    pub terms: Vec<FaceTerm>,
}

impl QuadraticReport {
    pub fn relative_residual(&self) -> f64 {
        if self.max_term == 0.0 {
            self.residual.norm()
        } else {
            self.residual.norm() / self.max_term
        }
    }
}

/// Exact `ρ → 0` limit of a chart rational function whose first variable is `ρ`.
fn rho_limit(r: &RationalFunction) -> Result<Option<RationalFunction>> {
    if r.is_zero() {
        return Ok(None);
    }
    let num = r.numerator().collect_by(0);
    let den = r.denominator().collect_by(0);
    let (pn, cn) = num.into_iter().next().unwrap();
    let (pd, cd) = den.into_iter().next().unwrap();
    if pn < pd {
        return Err(Error::AssertionFailed(format!("face limit diverges like rho^{}", pn - pd)));
    }
    if pn > pd {
        return Ok(None);
    }
    Ok(Some(RationalFunction::new(cn, cd)?))
}

/// Taylor coefficients of the holomorphic part of each form component at total degree `m`.
fn taylor_blocks(form: &TestForm, m: u32) -> Vec<BTreeMap<Vec<u16>, Complex64>> {
    let dn = form.layout.dim();
    (0..form.components.len())
        .map(|ci| {
            form.holomorphic_taylor(ci, m)
                .terms()
                .filter(|(e, _)| e[..dn].iter().map(|&x| x as u32).sum::<u32>() == m)
                .map(|(e, c)| (e[..dn].to_vec(), *c))
                .collect()
        })
        .collect()
}

fn sign_of(seq: &[usize]) -> f64 {
    permutation_parity(seq) as f64
}

/// Face sum behind the quadratic relations. `Φ` carries degree `required_test_form_degree − 2`.
/// Each face `Γ′` is parametrized by `t = (ρ s′, s″)` with `s′, s″` on standard simplices.
pub fn quadratic_residual(g: &DecoratedGraph, form: &TestForm, cfg: &QuadConfig) -> Result<QuadraticReport> {
    g.check_admissible()?;
    let d = g.dim();
    let ne = g.num_edges();
    let laman: Vec<EdgeSubset> = g.laman_subgraphs(d)?;
    let full = EdgeSubset::full(ne);
    let proper: Vec<EdgeSubset> = EdgeSubset::all_nonempty(ne).into_iter().filter(|s| *s != full).collect();
    let r = required_test_form_degree(g, d) - 2;
    let zero_report = |proper: &[EdgeSubset]| -> Result<QuadraticReport> {
        let terms = proper
            .iter()
            .map(|s| {
                Ok(FaceTerm {
                    subset: *s,
                    laman: laman.contains(s),
                    permutation_sign: g.permutation_sign(s)?.sign,
                    face_integral: Complex64::new(0.0, 0.0),
                    composed: Complex64::new(0.0, 0.0),
                    error: 0.0,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(QuadraticReport { residual: Complex64::new(0.0, 0.0), error: 0.0, max_term: 0.0, total_faces: Complex64::new(0.0, 0.0), terms })
    };
    if r < 0 || form.is_zero() || ne < 2 {
        return zero_report(&proper);
    }
    form.check_degree(r as usize)?;
    let product = propagator_product(g)?;
    let gens: Vec<Vec<usize>> = form.components.iter().map(|c| c.generators.clone()).collect();
    let m = (ne - 2) as u32 + g.total_decoration();
    let taylor = taylor_blocks(form, m);
    let kappa = anomaly_prefactor(g) * form.profile;
    let mut lead_cache: BTreeMap<u64, Vec<LeadingTerm>> = BTreeMap::new();
    let mut terms = Vec::new();
    for sub in &proper {
        let a = sub.count();
        let b = ne - a;
        let inside = sub.indices();
        let outside = sub.complement().indices();
        let chain = [*sub];
        let mut face: BTreeMap<(usize, Vec<u16>), RationalFunction> = BTreeMap::new();
        for (fi, &f) in inside.iter().enumerate() {
            for (gi, &gg) in outside.iter().enumerate() {
                let s = full.intersection(&EdgeSubset::from_indices(ne, &[f, gg])?.complement());
                if !lead_cache.contains_key(&s.bits()) {
                    lead_cache.insert(s.bits(), leading_coefficients(g, &product, &s, &gens)?);
                }
                let mut seq: Vec<usize> = s.indices().into_iter().filter(|e| sub.contains(*e)).collect();
                seq.extend(s.indices().into_iter().filter(|e| !sub.contains(*e)));
                let sign = sign_of(&seq) * if (a - 1 - fi) % 2 == 0 { 1.0 } else { -1.0 } * if (b - 1 - gi) % 2 == 0 { 1.0 } else { -1.0 };
                for lt in &lead_cache[&s.bits()] {
                    let mut c = rational_to_chart(&lt.lambda, &chain)?;
                    let mut shift = vec![0; c.vars().len()];
                    shift[0] = a as i32 - 1;
                    c = RationalFunction::new(c.numerator().shift(&shift), c.denominator().clone())?;
                    c = c.scale(&q(sign as i64));
                    let key = (lt.component, lt.alpha.clone());
                    let v = match face.remove(&key) {
                        Some(p) => p.add(&c)?,
                        None => c,
                    };
                    face.insert(key, v);
                }
            }
        }
        let mut limits: Vec<(Complex64, CompiledRational)> = Vec::new();
        for ((ci, alpha), rf) in &face {
            if let Some(lim) = rho_limit(rf)? {
                if let Some(tc) = taylor[*ci].get(alpha) {
                    limits.push((*tc * kappa, CompiledRational::new(&lim)));
                }
            }
        }
        let orient = face_orientation(sub, &inside, &outside);
        let (value, error) = if limits.is_empty() {
            (Complex64::new(0.0, 0.0), 0.0)
        } else {
            let dim = (a - 1) + (b - 1);
            let res = integrate_box(
                |x: &[f64]| {
                    let (s1, j1) = cube_to_simplex(&x[..a - 1]);
                    let (s2, j2) = cube_to_simplex(&x[a - 1..]);
                    let mut pt = vec![0.0; 1 + ne];
                    for (i, &e) in inside.iter().enumerate() {
                        pt[1 + e] = s1[i];
                    }
                    for (i, &e) in outside.iter().enumerate() {
                        pt[1 + e] = s2[i];
                    }
                    let mut v = Complex64::new(0.0, 0.0);
                    for (c, lim) in &limits {
                        v += c * lim.eval(&pt);
                    }
                    v *= j1 * j2;
                    vec![v.re, v.im]
                },
                &vec![0.0; dim],
                &vec![1.0; dim],
                2,
                cfg,
            )
            .require()?;
            (Complex64::new(res.value[0], res.value[1]) * (-orient), res.total_error())
        };
        let ps = g.permutation_sign(sub)?.sign;
        let sigma_factor = if ps < 0 && (d + 1) % 2 == 1 { -1.0 } else { 1.0 };
        let e_factor = if ne % 2 == 0 { 1.0 } else { -1.0 };
        terms.push(FaceTerm { subset: *sub, laman: laman.contains(sub), permutation_sign: ps, face_integral: value, composed: value * sigma_factor * e_factor, error });
    }
    let mut residual = Complex64::new(0.0, 0.0);
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut max_term: f64 = 0.0;
    for t in &terms {
        total += t.face_integral;
        if t.laman {
            let sf = if t.permutation_sign < 0 && (d + 1) % 2 == 1 { -1.0 } else { 1.0 };
            residual += t.composed * sf;
            err += t.error;
            max_term = max_term.max(t.composed.norm());
        }
    }
    Ok(QuadraticReport { residual, error: err, max_term, total_faces: total, terms })
}

/// Sign of `det[ψ, ∂_ρψ, ∂_uψ, ∂_vψ]` for the face chart `ψ = (ρ s′(u), s″(v))`.
fn face_orientation(sub: &EdgeSubset, inside: &[usize], outside: &[usize]) -> f64 {
    let ne = sub.parent_len();
    let rho = 0.5;
    let a = inside.len();
    let b = outside.len();
    let mut psi = vec![0.0; ne];
    for &e in inside {
        psi[e] = rho / a as f64;
    }
    for &e in outside {
        psi[e] = 1.0 / b as f64;
    }
    let mut cols: Vec<Vec<f64>> = vec![psi.clone()];
    let mut drho = vec![0.0; ne];
    for &e in inside {
        drho[e] = 1.0 / a as f64;
    }
    cols.push(drho);
    for i in 0..a.saturating_sub(1) {
        let mut c = vec![0.0; ne];
        c[inside[i]] = rho;
        c[inside[a - 1]] = -rho;
        cols.push(c);
    }
    for i in 0..b.saturating_sub(1) {
        let mut c = vec![0.0; ne];
        c[outside[i]] = 1.0;
        c[outside[b - 1]] = -1.0;
        cols.push(c);
    }
    let m = DMatrix::from_fn(ne, ne, |r, c| cols[c][r]);
    m.determinant().signum()
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayPoint {
    pub l: f64,
    pub value: Complex64,
    pub magnitude: f64,
    pub error: f64,
}

/// Outer-face contributions `Σ_e (−1)^{|e|} ∫_{[0,L]^{E−1}} G_{Γ₁∖e}|_{t_e = L}` for each `L`.
/// `Φ` carries degree `required_test_form_degree − 1`.
pub fn outer_boundary_decay(g: &DecoratedGraph, form: &TestForm, ls: &[f64], cfg: &QuadConfig) -> Result<Vec<DecayPoint>> {
    g.check_admissible()?;
    let r = required_test_form_degree(g, g.dim()) - 1;
    if ls.windows(2).any(|w| !(w[1] > w[0])) || ls.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::ConstraintViolated("L values must be positive and increasing".into()));
    }
    if r < 0 || form.is_zero() {
        return Ok(ls.iter().map(|&l| DecayPoint { l, value: Complex64::new(0.0, 0.0), magnitude: 0.0, error: 0.0 }).collect());
    }
    form.check_degree(r as usize)?;
    let b = BoundaryIntegrand::new(g, form)?;
    let ne = g.num_edges();
    let mut out = Vec::new();
    for &l in ls {
        let mut total = Complex64::new(0.0, 0.0);
        let mut err = 0.0;
        for (e, part) in b.parts.iter().enumerate() {
            if part.is_zero() {
                continue;
            }
            let insert = |rest: &[f64]| -> Vec<f64> {
                let mut t = Vec::with_capacity(ne);
                t.extend_from_slice(&rest[..e]);
                t.push(l);
                t.extend_from_slice(&rest[e..]);
                t
            };
            let res = integrate_schwinger(ne - 1, 0.0, l, |rest| part.eval(&insert(rest)), cfg).require()?;
            let v = Complex64::new(res.value[0], res.value[1]);
            total += if (e + 1) % 2 == 0 { v } else { -v };
            err += res.total_error();
        }
        out.push(DecayPoint { l, value: total, magnitude: total.norm(), error: err });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certificate_examples() {
        let c4 = DecoratedGraph::cycle(2, 4);
        let c = anomaly_vanishes_exactly(&c4, 2).unwrap();
        assert!(c.vanishes);
        assert_eq!(c.power, 1);
        let t = anomaly_vanishes_exactly(&DecoratedGraph::triangle(2), 2).unwrap();
        assert!(!t.vanishes);
        assert_eq!(t.power, 0);
        let s = anomaly_vanishes_exactly(&DecoratedGraph::single_edge(1), 1).unwrap();
        assert!(!s.vanishes);
        assert_eq!(s.power, 0);
        let b = anomaly_vanishes_exactly(&DecoratedGraph::bigon(2), 2).unwrap();
        assert!(b.vanishes && b.violating_subgraph.is_some());
    }

    #[test]
    fn neville_recovers_polynomial() {
        let xs = [0.4, 0.2, 0.1, 0.05];
        let ys: Vec<Complex64> = xs.iter().map(|x| Complex64::new(1.0 + 2.0 * x - x * x * x, -x)).collect();
        let (v, _) = neville_at_zero(&xs, &ys);
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn single_edge_symbol_is_order_zero() {
        let g = DecoratedGraph::single_edge(1);
        let s = anomaly_symbol(&g, &QuadConfig::default()).unwrap();
        assert_eq!(s.order, 0);
        assert!(s.check_order());
        assert_eq!(s.coefficients.len(), 1);
        let gd = g.with_decorations(vec![vec![1]]).unwrap();
        let sd = anomaly_symbol(&gd, &QuadConfig::default()).unwrap();
        assert_eq!(sd.order, 1);
        assert!(sd.check_order());
        assert!(matches!(anomaly_symbol(&DecoratedGraph::triangle(1), &QuadConfig::default()), Err(Error::NotLaman(1))));
    }
}
