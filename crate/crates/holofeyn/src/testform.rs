//! Schwartz test forms on `(ℂ^d)^n`: a grounded-vertex profile times a Gaussian wave packet
//! on the relative coordinates, carrying `dw_rel` and a chosen set of `dw̄` generators.
//!
//! `Φ = c0 · Σ_J f_J(w, w̄) dw_rel ∧ dw̄_J ∧ vol_ground` with
//! `f_J = exp(½(k·w − k̄·w̄) − a Σ|w|²) · Q_J(w, w̄)`.

use crate::error::{Error, Result};
use crate::wick::{ComplexPoly, Layout};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq)]
pub struct FormComponent {
    /// Sorted relative `dw̄` indices `v = i·d + j`.
    pub generators: Vec<usize>,
    pub polynomial: ComplexPoly,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TestForm {
    pub layout: Layout,
    /// `k_v`, indexed like the relative coordinates.
    pub momenta: Vec<Complex64>,
    pub width: f64,
    /// Integral of the grounded-vertex profile against its top form.
    pub profile: Complex64,
    pub components: Vec<FormComponent>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum ComplexSpec {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexSpec {
    pub fn value(&self) -> Complex64 {
        match self {
            ComplexSpec::Real(x) => Complex64::new(*x, 0.0),
            ComplexSpec::Pair([a, b]) => Complex64::new(*a, *b),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum GeneratorSpec {
    /// `"auto"`: the lexicographically first generators of the degree the context requires.
    Auto(String),
    /// 1-based `(vertex, coordinate)` pairs.
    Explicit(Vec<[usize; 2]>),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TermSpec {
    pub coeff: ComplexSpec,
    #[serde(default)]
    pub w: Vec<u16>,
    #[serde(default)]
    pub wbar: Vec<u16>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ComponentSpec {
    #[serde(default = "auto_generators")]
    pub generators: GeneratorSpec,
    #[serde(default)]
    pub polynomial: Option<Vec<TermSpec>>,
}

fn auto_generators() -> GeneratorSpec {
    GeneratorSpec::Auto("auto".into())
}

/// JSON description of a test form.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TestFormSpec {
    /// One complex number per relative coordinate, in `(vertex, coordinate)` order.
    pub momenta: Vec<ComplexSpec>,
    pub width: f64,
    #[serde(default)]
    pub profile: Option<ComplexSpec>,
    #[serde(default)]
    pub generators: Option<GeneratorSpec>,
    #[serde(default)]
    pub polynomial: Option<Vec<TermSpec>>,
    #[serde(default)]
    pub components: Option<Vec<ComponentSpec>>,
}

fn perr(msg: impl Into<String>) -> Error {
    Error::ParseError { line: 0, msg: msg.into() }
}

fn build_poly(layout: Layout, terms: &Option<Vec<TermSpec>>) -> Result<ComplexPoly> {
    let n = layout.nvars();
    let dn = layout.dim();
    match terms {
        None => Ok(ComplexPoly::one(n)),
        Some(ts) => {
            let mut p = ComplexPoly::zero(n);
            for t in ts {
                let mut e = vec![0u16; n];
                for (src, off) in [(&t.w, 0), (&t.wbar, dn)] {
                    if !src.is_empty() && src.len() != dn {
                        return Err(perr(format!("polynomial exponent vectors need {} entries", dn)));
                    }
                    for (i, &x) in src.iter().enumerate() {
                        e[off + i] = x;
                    }
                }
                p.add_term(e, t.coeff.value());
            }
            Ok(p)
        }
    }
}

fn build_generators(layout: Layout, g: &GeneratorSpec, degree: usize) -> Result<Vec<usize>> {
    match g {
        GeneratorSpec::Auto(s) if s == "auto" => {
            if degree > layout.dim() {
                return Err(Error::DegreeMismatch { expected: degree as i64, found: layout.dim() as i64 });
            }
            Ok((0..degree).collect())
        }
        GeneratorSpec::Auto(s) => Err(perr(format!("unknown generator selection `{}`", s))),
        GeneratorSpec::Explicit(list) => {
            let mut v = Vec::new();
            for [i, j] in list {
                if *i == 0 || *j == 0 || *i > layout.n_rel || *j > layout.d {
                    return Err(perr(format!("generator ({}, {}) out of range", i, j)));
                }
                v.push((i - 1) * layout.d + (j - 1));
            }
            v.sort_unstable();
            v.dedup();
            if v.len() != list.len() {
                return Err(perr("repeated generator"));
            }
            Ok(v)
        }
    }
}

impl TestFormSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::ParseError { line: e.line(), msg: e.to_string() })
    }

    /// Resolves the description for a graph with `n_rel` relative vertices; `"auto"` generators
    /// take the first `degree` relative `dw̄`.
    pub fn build(&self, d: usize, n_rel: usize, degree: usize) -> Result<TestForm> {
        let layout = Layout { d, n_rel };
        if self.momenta.len() != layout.dim() {
            return Err(perr(format!("expected {} momenta, found {}", layout.dim(), self.momenta.len())));
        }
        if !(self.width > 0.0) {
            return Err(perr("width must be positive"));
        }
        let mut components = Vec::new();
        match &self.components {
            Some(cs) => {
                for c in cs {
                    components.push(FormComponent { generators: build_generators(layout, &c.generators, degree)?, polynomial: build_poly(layout, &c.polynomial)? });
                }
            }
            None => {
                let g = self.generators.clone().unwrap_or_else(auto_generators);
                components.push(FormComponent { generators: build_generators(layout, &g, degree)?, polynomial: build_poly(layout, &self.polynomial)? });
            }
        }
        Ok(TestForm {
            layout,
            momenta: self.momenta.iter().map(|c| c.value()).collect(),
            width: self.width,
            profile: self.profile.as_ref().map(|p| p.value()).unwrap_or(Complex64::new(1.0, 0.0)),
            components,
        })
    }
}

impl TestForm {
    /// Gaussian packet with polynomial factor 1 on the first `degree` relative `dw̄`.
    pub fn gaussian(d: usize, n_rel: usize, momenta: Vec<Complex64>, width: f64, degree: usize) -> Self {
        let layout = Layout { d, n_rel };
        assert_eq!(momenta.len(), layout.dim());
        TestForm {
            layout,
            momenta,
            width,
            profile: Complex64::new(1.0, 0.0),
            components: vec![FormComponent { generators: (0..degree).collect(), polynomial: ComplexPoly::one(layout.nvars()) }],
        }
    }

    /// Width-0.5 packet with momenta of modulus 0.8 at pairwise unrelated angles.
    pub fn generic_packet(d: usize, n_rel: usize, degree: usize) -> Self {
        let k = (0..d * n_rel).map(|v| Complex64::from_polar(0.8, 0.3 + 1.7 * v as f64 + 0.4 * (v * v) as f64)).collect();
        Self::gaussian(d, n_rel, k, 0.5, degree)
    }

    pub fn zero(d: usize, n_rel: usize, width: f64) -> Self {
        let layout = Layout { d, n_rel };
        TestForm { layout, momenta: vec![Complex64::new(0.0, 0.0); layout.dim()], width, profile: Complex64::new(1.0, 0.0), components: vec![] }
    }

    pub fn is_zero(&self) -> bool {
        self.profile == Complex64::new(0.0, 0.0) || self.components.iter().all(|c| c.polynomial.is_zero())
    }

    /// Relative `dw̄` degree, if every component shares it.
    pub fn relative_degree(&self) -> Option<usize> {
        let mut it = self.components.iter().map(|c| c.generators.len());
        let first = it.next()?;
        it.all(|x| x == first).then_some(first)
    }

    pub fn check_degree(&self, expected: usize) -> Result<()> {
        for c in &self.components {
            if c.generators.len() != expected {
                return Err(Error::DegreeMismatch { expected: expected as i64, found: c.generators.len() as i64 });
            }
        }
        Ok(())
    }

    /// Exponent `½(k·w − k̄·w̄) − a Σ w w̄` at a point.
    pub fn exponent(&self, w: &[Complex64], wb: &[Complex64]) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for v in 0..self.layout.dim() {
            s += 0.5 * (self.momenta[v] * w[v] - self.momenta[v].conj() * wb[v]) - self.width * w[v] * wb[v];
        }
        s
    }

    /// `f_J(w, w̄)` for component `c`.
    pub fn eval_component(&self, c: usize, w: &[Complex64], wb: &[Complex64]) -> Complex64 {
        let x: Vec<Complex64> = w.iter().chain(wb.iter()).cloned().collect();
        self.exponent(w, wb).exp() * self.components[c].polynomial.eval(&x)
    }

    /// `∂̄Φ`, kept in the same class: the packet's `w̄`-derivative is polynomial times the packet.
    pub fn dbar(&self) -> TestForm {
        let l = self.layout;
        let dn = l.dim();
        let mut out: Vec<FormComponent> = Vec::new();
        let sign_rel = if dn % 2 == 0 { 1.0 } else { -1.0 };
        for c in &self.components {
            for v in 0..dn {
                if c.generators.contains(&v) {
                    continue;
                }
                // ∂_{w̄_v} f = (−½ k̄_v − a w_v) f + e^{…} ∂_{w̄_v} Q
                let lin = ComplexPoly::constant(l.nvars(), -0.5 * self.momenta[v].conj()).add(&ComplexPoly::var(l.nvars(), l.w(v / l.d, v % l.d)).scale(Complex64::new(-self.width, 0.0)));
                let q = c.polynomial.mul(&lin).add(&c.polynomial.derivative(dn + v));
                if q.is_zero() {
                    continue;
                }
                let before = c.generators.iter().filter(|&&g| g < v).count();
                let s = sign_rel * if before % 2 == 0 { 1.0 } else { -1.0 };
                let mut gens = c.generators.clone();
                gens.push(v);
                gens.sort_unstable();
                let q = q.scale(Complex64::new(s, 0.0));
                match out.iter_mut().find(|o| o.generators == gens) {
                    Some(o) => o.polynomial = o.polynomial.add(&q),
                    None => out.push(FormComponent { generators: gens, polynomial: q }),
                }
            }
        }
        TestForm { layout: l, momenta: self.momenta.clone(), width: self.width, profile: self.profile, components: out }
    }

    /// Taylor coefficients of `f_J(w, 0)` at `w = 0` up to total degree `order`, for component `c`.
    pub fn holomorphic_taylor(&self, c: usize, order: u32) -> ComplexPoly {
        let l = self.layout;
        let n = l.nvars();
        let mut lin = ComplexPoly::zero(n);
        for v in 0..l.dim() {
            lin.add_term(
                {
                    let mut e = vec![0; n];
                    e[v] = 1;
                    e
                },
                0.5 * self.momenta[v],
            );
        }
        let mut series = ComplexPoly::one(n);
        let mut term = ComplexPoly::one(n);
        for k in 1..=order {
            term = term.mul_truncated(&lin, order).scale(Complex64::new(1.0 / k as f64, 0.0));
            series = series.add(&term);
        }
        let q0 = self.components[c].polynomial.restrict_zero(|i| i >= l.dim());
        series.mul_truncated(&q0, order)
    }
}
