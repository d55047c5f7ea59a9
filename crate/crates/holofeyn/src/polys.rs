//! Graph polynomials in the Schwinger parameters: weighted Laplacian, tree polynomial,
//! cut-formula inverse, discrete Green's function entries and corner expansions.

use crate::error::{Error, Result};
use crate::graph::{DecoratedGraph, EdgeSubset};
use crate::symbolic::{q, Polynomial, RationalFunction, Vars};
use num_traits::{One, Signed};
use std::collections::BTreeMap;
use std::sync::Arc;

/// `["t1", .., "tE"]`.
pub fn t_vars(num_edges: usize) -> Vars {
    Arc::new((1..=num_edges).map(|e| format!("t{}", e)).collect())
}

/// Product of edge monomials `t_e` over a subset, in the given variable list.
pub fn edge_monomial(vars: &Vars, sub: &EdgeSubset) -> Polynomial {
    let mut e = vec![0; vars.len()];
    for i in sub.indices() {
        e[i] = 1;
    }
    Polynomial::monomial(vars, e, q(1))
}

#[derive(Clone, Debug)]
pub struct LaplacianData {
    pub matrix: Vec<Vec<RationalFunction>>,
    pub tree_polynomial: Polynomial,
    /// `cut_polynomials[i][j]` sums `Π_{e∈C} t_e` over cuts separating `{i, j}` from the grounded vertex.
    pub cut_polynomials: Vec<Vec<Polynomial>>,
}

/// `Σ_T Π_{e∉T} t_e` over spanning trees.
pub fn kirchhoff_polynomial(g: &DecoratedGraph) -> Result<Polynomial> {
    let v = t_vars(g.num_edges());
    let mut k = Polynomial::zero(&v);
    for tree in g.spanning_trees()? {
        k = k.add(&edge_monomial(&v, &tree.complement()))?;
    }
    Ok(k)
}

/// Fraction-free elimination; entries must be ordinary polynomials.
pub fn bareiss_determinant(m: &[Vec<Polynomial>]) -> Result<Polynomial> {
    let n = m.len();
    let vars = m[0][0].vars().clone();
    let mut a: Vec<Vec<Polynomial>> = m.to_vec();
    let mut prev = Polynomial::one(&vars);
    let mut sign = 1;
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return Ok(Polynomial::zero(&vars)),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[k][k].mul(&a[i][j])?.sub(&a[i][k].mul(&a[k][j])?)?;
                a[i][j] = num
                    .div_exact(&prev)?
                    .ok_or_else(|| Error::AssertionFailed("inexact division in fraction-free elimination".into()))?;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    Ok(if sign < 0 { d.neg() } else { d })
}

/// `det(M)·Π t_e` via fraction-free elimination on `Π t_e · M`.
pub fn laplacian_determinant_times_t(g: &DecoratedGraph) -> Result<Polynomial> {
    let rho = g.incidence_matrix()?;
    let v = t_vars(g.num_edges());
    let n1 = g.num_vertices() - 1;
    let full = g.full_subset();
    if n1 == 0 {
        return Ok(edge_monomial(&v, &full));
    }
    let mut m = vec![vec![Polynomial::zero(&v); n1]; n1];
    for (e, row) in rho.iter().enumerate() {
        let others = edge_monomial(&v, &full.intersection(&EdgeSubset::from_indices(full.parent_len(), &[e])?.complement()));
        for i in 0..n1 {
            for j in 0..n1 {
                let c = row[i] * row[j];
                if c != 0 {
                    m[i][j] = m[i][j].add(&others.scale(&q(c as i64)))?;
                }
            }
        }
    }
    let det = bareiss_determinant(&m)?;
    let pt = edge_monomial(&v, &full);
    det.div_exact(&pt.pow(n1 as u32 - 1))?
        .ok_or_else(|| Error::AssertionFailed("det(Πt·M) not divisible by (Πt)^(n-2)".into()))
}

pub fn weighted_laplacian(g: &DecoratedGraph) -> Result<LaplacianData> {
    let rho = g.incidence_matrix()?;
    let v = t_vars(g.num_edges());
    let n1 = g.num_vertices() - 1;
    let mut lap = vec![vec![Polynomial::zero(&v); n1]; n1];
    for (e, row) in rho.iter().enumerate() {
        let mut ex = vec![0; v.len()];
        ex[e] = -1;
        let inv_t = Polynomial::monomial(&v, ex, q(1));
        for i in 0..n1 {
            for j in 0..n1 {
                let c = row[i] * row[j];
                if c != 0 {
                    lap[i][j] = lap[i][j].add(&inv_t.scale(&q(c as i64)))?;
                }
            }
        }
    }
    let matrix = lap.into_iter().map(|r| r.into_iter().map(RationalFunction::from_poly).collect()).collect();
    let tree_polynomial = kirchhoff_polynomial(g)?;
    if !tree_polynomial.all_coefficients_one() {
        return Err(Error::AssertionFailed("tree polynomial has a coefficient other than 1".into()));
    }
    let det = laplacian_determinant_times_t(g)?;
    if det != tree_polynomial {
        return Err(Error::AssertionFailed(format!("det(M)·Πt = {} but tree polynomial = {}", det, tree_polynomial)));
    }
    let grounded = g.num_vertices() - 1;
    let mut cut_polynomials = vec![vec![Polynomial::zero(&v); n1]; n1];
    for i in 0..n1 {
        for j in i..n1 {
            let v1: Vec<usize> = if i == j { vec![i] } else { vec![i, j] };
            let mut p = Polynomial::zero(&v);
            for c in g.cuts(&v1, &[grounded])? {
                p = p.add(&edge_monomial(&v, &c))?;
            }
            cut_polynomials[i][j] = p.clone();
            cut_polynomials[j][i] = p;
        }
    }
    Ok(LaplacianData { matrix, tree_polynomial, cut_polynomials })
}

/// Cut-formula inverse, with the exact check `M·M⁻¹ = Id`.
pub fn m_inverse(g: &DecoratedGraph) -> Result<Vec<Vec<RationalFunction>>> {
    let lap = weighted_laplacian(g)?;
    let inv = m_inverse_from(&lap)?;
    check_inverse(&lap.matrix, &inv)?;
    Ok(inv)
}

pub fn m_inverse_from(lap: &LaplacianData) -> Result<Vec<Vec<RationalFunction>>> {
    lap.cut_polynomials
        .iter()
        .map(|row| row.iter().map(|c| RationalFunction::new(c.clone(), lap.tree_polynomial.clone())).collect())
        .collect()
}

pub fn check_inverse(m: &[Vec<RationalFunction>], inv: &[Vec<RationalFunction>]) -> Result<()> {
    let n = m.len();
    let vars = m[0][0].vars().clone();
    for i in 0..n {
        for j in 0..n {
            let mut s = RationalFunction::zero(&vars);
            for k in 0..n {
                s = s.add(&m[i][k].mul(&inv[k][j])?)?;
            }
            let expect = if i == j { RationalFunction::one(&vars) } else { RationalFunction::zero(&vars) };
            if s != expect {
                return Err(Error::AssertionFailed(format!("(M·M⁻¹)[{},{}] = {}", i + 1, j + 1, s)));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct DInverseData {
    /// `entries[e][j]`, edges by vertices `j < n`.
    pub entries: Vec<Vec<RationalFunction>>,
    /// `Σ_i ρ^e_i cut_{ij} / t_e`, whose monomials all occur in the tree polynomial.
    pub reduced_numerators: Vec<Vec<Polynomial>>,
    pub kirchhoff: Polynomial,
}

/// `(d⁻¹)^{ej} = (1/t_e) Σ_i ρ^e_i (M⁻¹)^{ij}`, asserting numerator inclusion.
pub fn d_inverse(g: &DecoratedGraph) -> Result<DInverseData> {
    let lap = weighted_laplacian(g)?;
    d_inverse_from(g, &lap)
}

pub fn d_inverse_from(g: &DecoratedGraph, lap: &LaplacianData) -> Result<DInverseData> {
    let rho = g.incidence_matrix()?;
    let v = t_vars(g.num_edges());
    let n1 = g.num_vertices() - 1;
    let k = &lap.tree_polynomial;
    let mut entries = Vec::new();
    let mut reduced = Vec::new();
    for (e, row) in rho.iter().enumerate() {
        let mut er = Vec::new();
        let mut rr = Vec::new();
        let mut ex = vec![0; v.len()];
        ex[e] = 1;
        let te = Polynomial::monomial(&v, ex, q(1));
        for j in 0..n1 {
            let mut num = Polynomial::zero(&v);
            for i in 0..n1 {
                if row[i] != 0 {
                    num = num.add(&lap.cut_polynomials[i][j].scale(&q(row[i] as i64)))?;
                }
            }
            let red = num
                .div_exact(&te)?
                .filter(|p| p.terms().all(|(x, _)| x.iter().all(|&a| a >= 0)))
                .ok_or_else(|| Error::AssertionFailed(format!("numerator of d⁻¹[e{},{}] is not divisible by t{}", e + 1, j + 1, e + 1)))?;
            for (mono, c) in red.terms() {
                let kc = k.coefficient(mono);
                if !(c.abs().is_one() && kc.is_one()) {
                    return Err(Error::AssertionFailed(format!("d⁻¹[e{},{}] numerator term not in tree polynomial", e + 1, j + 1)));
                }
            }
            er.push(RationalFunction::new(red.clone(), k.clone())?);
            rr.push(red);
        }
        entries.push(er);
        reduced.push(rr);
    }
    Ok(DInverseData { entries, reduced_numerators: reduced, kirchhoff: k.clone() })
}

/// Variable list of a corner chart for a nested chain: `rho1..rhom`, then per edge
/// `xi_e` for edges of `S₁` and `t_e` otherwise.
pub fn chart_vars(num_edges: usize, chain: &[EdgeSubset]) -> Vars {
    let mut names: Vec<String> = if chain.len() == 1 { vec!["rho".to_string()] } else { (1..=chain.len()).map(|i| format!("rho{}", i)).collect() };
    for e in 0..num_edges {
        if chain.first().map(|s| s.contains(e)).unwrap_or(false) {
            names.push(format!("xi{}", e + 1));
        } else {
            names.push(format!("t{}", e + 1));
        }
    }
    Arc::new(names)
}

/// Substitutes `t_e ↦ (Π_{i: e∈S_i} ρ_i) ξ_e` into a polynomial in `t1..tE`.
pub fn to_chart(p: &Polynomial, chain: &[EdgeSubset]) -> Result<Polynomial> {
    let ne = p.nvars();
    if p.vars() != &t_vars(ne) {
        return Err(Error::VariableMismatch);
    }
    if chain.is_empty() || chain.iter().any(|s| s.is_empty()) {
        return Err(Error::EmptySubset);
    }
    let m = chain.len();
    let cv = chart_vars(ne, chain);
    let mut r = Polynomial::zero(&cv);
    for (e, c) in p.terms() {
        let mut x = vec![0; m + ne];
        for (i, s) in chain.iter().enumerate() {
            x[i] = s.indices().iter().map(|&f| e[f]).sum();
        }
        x[m..].copy_from_slice(e);
        r = r.add(&Polynomial::monomial(&cv, x, c.clone()))?;
    }
    Ok(r)
}

/// Corner substitution `t_e ↦ ρ ξ_e` on `sub`, collected by the power of `ρ`.
pub fn corner_expand(p: &Polynomial, sub: &EdgeSubset) -> Result<Vec<(i32, Polynomial)>> {
    if sub.is_empty() {
        return Err(Error::EmptySubset);
    }
    let c = to_chart(p, std::slice::from_ref(sub))?;
    let by: BTreeMap<i32, Polynomial> = c.collect_by(0);
    Ok(by.into_iter().collect())
}

/// `d|Γ₀| − (d−1)|Γ₁| − m·d − 1`.
pub fn min_rho_power_of_boundary(g: &DecoratedGraph, d: usize, m: usize) -> i64 {
    let d = d as i64;
    d * g.num_vertices() as i64 - (d - 1) * g.num_edges() as i64 - m as i64 * d - 1
}

/// Chart-coordinate form of a rational function (numerator and denominator substituted).
pub fn rational_to_chart(r: &RationalFunction, chain: &[EdgeSubset]) -> Result<RationalFunction> {
    RationalFunction::new(to_chart(r.numerator(), chain)?, to_chart(r.denominator(), chain)?)
}

/// Lowest power of `ρ` (the first chart variable) present in a chart polynomial.
pub fn min_rho_degree(p: &Polynomial) -> Option<i32> {
    p.terms().map(|(e, _)| e[0]).min()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laplacian_examples() {
        let l = weighted_laplacian(&DecoratedGraph::single_edge(1)).unwrap();
        assert_eq!(l.matrix[0][0].to_string(), "1/t1");
        let l = weighted_laplacian(&DecoratedGraph::bigon(1)).unwrap();
        assert_eq!(l.matrix[0][0].to_string(), "(t1 + t2)/(t1*t2)");
        let l = weighted_laplacian(&DecoratedGraph::triangle(1)).unwrap();
        assert_eq!(l.matrix[0][0].to_string(), "(t1 + t3)/(t1*t3)");
        assert_eq!(l.matrix[0][1].to_string(), "-1/t1");
        assert_eq!(l.matrix[1][1].to_string(), "(t1 + t2)/(t1*t2)");
    }

    #[test]
    fn kirchhoff_examples() {
        assert_eq!(kirchhoff_polynomial(&DecoratedGraph::single_edge(1)).unwrap().to_string(), "1");
        assert_eq!(kirchhoff_polynomial(&DecoratedGraph::triangle(1)).unwrap().to_string(), "t1 + t2 + t3");
        assert_eq!(kirchhoff_polynomial(&DecoratedGraph::bigon(1)).unwrap().to_string(), "t1 + t2");
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(m_inverse(&DecoratedGraph::single_edge(1)).unwrap()[0][0].to_string(), "t1");
        assert_eq!(m_inverse(&DecoratedGraph::bigon(1)).unwrap()[0][0].to_string(), "t1*t2/(t1 + t2)");
        let t = m_inverse(&DecoratedGraph::triangle(1)).unwrap();
        assert_eq!(t[0][1].to_string(), "t2*t3/(t1 + t2 + t3)");
    }

    #[test]
    fn d_inverse_examples() {
        let s = d_inverse(&DecoratedGraph::single_edge(1)).unwrap();
        assert_eq!(s.entries[0][0].to_string(), "-1");
        let b = d_inverse(&DecoratedGraph::bigon(1)).unwrap();
        assert_eq!(b.entries[0][0].to_string(), "-t2/(t1 + t2)");
    }

    #[test]
    fn corner_examples() {
        let k = kirchhoff_polynomial(&DecoratedGraph::triangle(1)).unwrap();
        let c = corner_expand(&k, &EdgeSubset::from_indices(3, &[0]).unwrap()).unwrap();
        let s: Vec<(i32, String)> = c.iter().map(|(d, p)| (*d, p.to_string())).collect();
        assert_eq!(s, vec![(0, "t2 + t3".to_string()), (1, "xi1".to_string())]);
        let c = corner_expand(&k, &EdgeSubset::full(3)).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!((c[0].0, c[0].1.to_string()), (1, "xi1 + xi2 + xi3".to_string()));
        let kb = kirchhoff_polynomial(&DecoratedGraph::bigon(1)).unwrap();
        let c = corner_expand(&kb, &EdgeSubset::full(2)).unwrap();
        assert_eq!((c[0].0, c[0].1.to_string()), (1, "xi1 + xi2".to_string()));
    }

    #[test]
    fn boundary_power_examples() {
        assert_eq!(min_rho_power_of_boundary(&DecoratedGraph::triangle(2), 2, 1), 0);
        assert_eq!(min_rho_power_of_boundary(&DecoratedGraph::cycle(2, 4), 2, 1), 1);
        assert_eq!(min_rho_power_of_boundary(&DecoratedGraph::single_edge(1), 1, 1), 0);
    }
}
