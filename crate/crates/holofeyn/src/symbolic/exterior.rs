use super::poly::{Polynomial, Vars, Q};
use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

pub type Generators = Arc<Vec<String>>;

/// Generator list `dt_1..dt_E` followed by `dwb_i^j` in lexicographic `(i, j)` order.
pub fn schwinger_generators(num_edges: usize, num_relative: usize, d: usize) -> Generators {
    let mut g: Vec<String> = (1..=num_edges).map(|e| format!("dt{}", e)).collect();
    for i in 1..=num_relative {
        for j in 1..=d {
            g.push(format!("dwb{}_{}", i, j));
        }
    }
    Arc::new(g)
}

/// Sign of concatenating the canonically ordered monomials `a` then `b`; zero if they share a generator.
pub fn merge_sign(a: u64, b: u64) -> i32 {
    if a & b != 0 {
        return 0;
    }
    let mut inv = 0u32;
    let mut bb = b;
    while bb != 0 {
        let i = bb.trailing_zeros();
        inv += (a >> i >> 1).count_ones();
        bb &= bb - 1;
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Sign of sorting a sequence of distinct generator indices into increasing order.
pub fn sort_sign(seq: &[usize]) -> i32 {
    crate::graph::permutation_parity(seq) as i32
}

/// Element of the exterior algebra on a finite ordered generator list, with polynomial coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct ExteriorElement {
    gens: Generators,
    coeff_vars: Vars,
    terms: BTreeMap<u64, Polynomial>,
}

impl ExteriorElement {
    pub fn zero(gens: &Generators, coeff_vars: &Vars) -> Self {
        assert!(gens.len() <= 64);
        ExteriorElement { gens: gens.clone(), coeff_vars: coeff_vars.clone(), terms: BTreeMap::new() }
    }

    pub fn scalar(gens: &Generators, p: Polynomial) -> Self {
        let mut r = Self::zero(gens, p.vars());
        if !p.is_zero() {
            r.terms.insert(0, p);
        }
        r
    }

    /// `p` times the generator at position `i`.
    pub fn generator(gens: &Generators, i: usize, p: Polynomial) -> Self {
        let mut r = Self::zero(gens, p.vars());
        if !p.is_zero() {
            r.terms.insert(1 << i, p);
        }
        r
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|g| g == name)
    }

    pub fn generators(&self) -> &Generators {
        &self.gens
    }
    pub fn coeff_vars(&self) -> &Vars {
        &self.coeff_vars
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn terms(&self) -> impl Iterator<Item = (&u64, &Polynomial)> {
        self.terms.iter()
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.gens != o.gens {
            return Err(Error::GeneratorMismatch);
        }
        if self.coeff_vars != o.coeff_vars {
            return Err(Error::VariableMismatch);
        }
        Ok(())
    }

    fn accumulate(&mut self, mask: u64, p: Polynomial) -> Result<()> {
        if p.is_zero() {
            return Ok(());
        }
        let next = match self.terms.remove(&mask) {
            Some(old) => old.add(&p)?,
            None => p,
        };
        if !next.is_zero() {
            self.terms.insert(mask, next);
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let mut r = self.clone();
        for (m, p) in &o.terms {
            r.accumulate(*m, p.clone())?;
        }
        Ok(r)
    }

    pub fn scale(&self, p: &Polynomial) -> Result<Self> {
        let mut r = Self::zero(&self.gens, &self.coeff_vars);
        for (m, c) in &self.terms {
            r.accumulate(*m, c.mul(p)?)?;
        }
        Ok(r)
    }

    pub fn scale_q(&self, c: &Q) -> Self {
        let mut r = Self::zero(&self.gens, &self.coeff_vars);
        for (m, p) in &self.terms {
            let s = p.scale(c);
            if !s.is_zero() {
                r.terms.insert(*m, s);
            }
        }
        r
    }

    /// Wedge product with Koszul signs from the canonical generator order.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let mut r = Self::zero(&self.gens, &self.coeff_vars);
        for (ma, pa) in &self.terms {
            for (mb, pb) in &o.terms {
                let s = merge_sign(*ma, *mb);
                if s == 0 {
                    continue;
                }
                let c = pa.mul(pb)?;
                r.accumulate(ma | mb, if s < 0 { c.neg() } else { c })?;
            }
        }
        Ok(r)
    }

    /// Coefficient of the canonically ordered monomial on exactly these generators.
    pub fn extract_component(&self, generators: &[usize]) -> Polynomial {
        let mask = generators.iter().fold(0u64, |m, &i| m | 1 << i);
        self.extract_mask(mask)
    }

    pub fn extract_mask(&self, mask: u64) -> Polynomial {
        self.terms.get(&mask).cloned().unwrap_or_else(|| Polynomial::zero(&self.coeff_vars))
    }

    /// Form degree, if homogeneous.
    pub fn degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|m| m.count_ones());
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }
}

impl fmt::Display for ExteriorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, p)| {
                let gs: Vec<&str> = (0..self.gens.len()).filter(|i| m >> i & 1 == 1).map(|i| self.gens[i].as_str()).collect();
                if gs.is_empty() {
                    format!("({})", p)
                } else {
                    format!("({}) {}", p, gs.join("^"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
