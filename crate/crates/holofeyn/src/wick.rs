//! Floating-point complex polynomials in `(w, w̄)` and their Gaussian moments.
//!
//! Variables are laid out as `w_v` at index `v` and `w̄_v` at index `D + v`, where
//! `v = i·d + j` enumerates relative vertex `i` and coordinate `j` and `D = d·N`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u16>, Complex64>,
}

impl ComplexPoly {
    pub fn zero(nvars: usize) -> Self {
        ComplexPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Complex64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Complex64::new(1.0, 0.0))
    }

    pub fn monomial(exps: Vec<u16>, c: Complex64) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    pub fn var(nvars: usize, v: usize) -> Self {
        let mut e = vec![0; nvars];
        e[v] = 1;
        Self::monomial(e, Complex64::new(1.0, 0.0))
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u16>, &Complex64)> {
        self.terms.iter()
    }
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, e: Vec<u16>, c: Complex64) {
        if c == Complex64::new(0.0, 0.0) {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == Complex64::new(0.0, 0.0) {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(e.clone(), *c);
        }
        r
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut r = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            r.add_term(e.clone(), c * s);
        }
        r
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u16> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                r.add_term(e, c1 * c2);
            }
        }
        r
    }

    /// Product truncated to total degree at most `max_deg`.
    pub fn mul_truncated(&self, o: &Self, max_deg: u32) -> Self {
        let mut r = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            let d1: u32 = e1.iter().map(|&x| x as u32).sum();
            for (e2, c2) in &o.terms {
                let d2: u32 = e2.iter().map(|&x| x as u32).sum();
                if d1 + d2 <= max_deg {
                    r.add_term(e1.iter().zip(e2).map(|(a, b)| a + b).collect(), c1 * c2);
                }
            }
        }
        r
    }

    pub fn derivative(&self, v: usize) -> Self {
        let mut r = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[v] > 0 {
                let mut e2 = e.clone();
                e2[v] -= 1;
                r.add_term(e2, c * e[v] as f64);
            }
        }
        r
    }

    pub fn eval(&self, x: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut m = *c;
                for (i, &k) in e.iter().enumerate() {
                    if k > 0 {
                        m *= x[i].powu(k as u32);
                    }
                }
                m
            })
            .sum()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().map(|&x| x as u32).sum()).max().unwrap_or(0)
    }

    /// Sets the variables in `vars` to zero.
    pub fn restrict_zero(&self, vars: impl Fn(usize) -> bool) -> Self {
        let mut r = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e.iter().enumerate().all(|(i, &k)| k == 0 || !vars(i)) {
                r.add_term(e.clone(), *c);
            }
        }
        r
    }

    /// Replaces each variable `v` by the linear form `Σ_u lin[v][u] x_u` in a new variable set.
    pub fn linear_substitute(&self, lin: &[Vec<Complex64>], new_nvars: usize) -> Self {
        let mut r = Self::zero(new_nvars);
        let images: Vec<ComplexPoly> = lin
            .iter()
            .map(|row| {
                let mut p = ComplexPoly::zero(new_nvars);
                for (u, c) in row.iter().enumerate() {
                    if *c != Complex64::new(0.0, 0.0) {
                        p.add_term({
                            let mut e = vec![0; new_nvars];
                            e[u] = 1;
                            e
                        }, *c);
                    }
                }
                p
            })
            .collect();
        for (e, c) in &self.terms {
            let mut acc = ComplexPoly::constant(new_nvars, *c);
            for (v, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    acc = acc.mul(&images[v]);
                }
            }
            r = r.add(&acc);
        }
        r
    }
}

/// Layout helper for `d` coordinates on `n_rel` relative vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layout {
    pub d: usize,
    pub n_rel: usize,
}

impl Layout {
    pub fn dim(&self) -> usize {
        self.d * self.n_rel
    }
    pub fn nvars(&self) -> usize {
        2 * self.dim()
    }
    pub fn w(&self, i: usize, j: usize) -> usize {
        i * self.d + j
    }
    pub fn wbar(&self, i: usize, j: usize) -> usize {
        self.dim() + i * self.d + j
    }
}

/// `E[P]` for complex Gaussian `(w, w̄)` with `E[w] = mu`, `E[w̄] = nu`,
/// `Cov(w_i^j, w̄_k^l) = δ_{jl} b[i,k]` and vanishing `(w, w)` and `(w̄, w̄)` covariances.
pub fn gaussian_expectation(p: &ComplexPoly, layout: Layout, b: &DMatrix<f64>, mu: &[Complex64], nu: &[Complex64]) -> Complex64 {
    let at: Vec<Complex64> = mu.iter().chain(nu.iter()).cloned().collect();
    let has_w = p.terms().any(|(e, _)| e[..layout.dim()].iter().any(|&x| x > 0));
    if !has_w {
        return p.eval(&at);
    }
    let mut total = p.eval(&at);
    let mut cur = p.clone();
    let mut k = 1.0;
    loop {
        let mut next = ComplexPoly::zero(p.nvars());
        for j in 0..layout.d {
            for i in 0..layout.n_rel {
                let di = cur.derivative(layout.w(i, j));
                if di.is_zero() {
                    continue;
                }
                for kk in 0..layout.n_rel {
                    let c = b[(i, kk)];
                    if c != 0.0 {
                        next = next.add(&di.derivative(layout.wbar(kk, j)).scale(Complex64::new(c, 0.0)));
                    }
                }
            }
        }
        if next.is_zero() {
            break;
        }
        cur = next.scale(Complex64::new(1.0 / k, 0.0));
        total += cur.eval(&at);
        k += 1.0;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_moments() {
        let l = Layout { d: 1, n_rel: 1 };
        let b = DMatrix::from_element(1, 1, 0.7);
        let mu = [Complex64::new(0.3, 0.1)];
        let nu = [Complex64::new(-0.2, 0.4)];
        let w = ComplexPoly::var(2, 0);
        let wb = ComplexPoly::var(2, 1);
        let e = gaussian_expectation(&w.mul(&wb), l, &b, &mu, &nu);
        assert!((e - (mu[0] * nu[0] + 0.7)).norm() < 1e-14);
        let e2 = gaussian_expectation(&w.mul(&w).mul(&wb).mul(&wb), l, &b, &[Complex64::new(0.0, 0.0)], &[Complex64::new(0.0, 0.0)]);
        assert!((e2 - 2.0 * 0.49).norm() < 1e-14);
    }
}
