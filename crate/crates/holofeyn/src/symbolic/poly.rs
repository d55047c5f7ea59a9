use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        let n = x.numer().to_f64().unwrap_or(f64::NAN);
        let d = x.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub type Vars = Arc<Vec<String>>;

pub fn vars<S: AsRef<str>>(names: &[S]) -> Vars {
    Arc::new(names.iter().map(|s| s.as_ref().to_string()).collect())
}

/// Sparse Laurent polynomial with exact rational coefficients over a fixed variable list.
/// Exponents may be negative; most operations only ever see non-negative ones.
#[derive(Clone, Debug)]
pub struct Polynomial {
    vars: Vars,
    terms: BTreeMap<Vec<i32>, Q>,
}

fn same_vars(a: &Vars, b: &Vars) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        same_vars(&self.vars, &other.vars) && self.terms == other.terms
    }
}

impl Eq for Polynomial {}

impl Polynomial {
    pub fn zero(vars: &Vars) -> Self {
        Polynomial { vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(vars: &Vars, c: Q) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(vec![0; vars.len()], c);
        }
        p
    }

    pub fn one(vars: &Vars) -> Self {
        Self::constant(vars, Q::one())
    }

    pub fn monomial(vars: &Vars, exps: Vec<i32>, c: Q) -> Self {
        assert_eq!(exps.len(), vars.len());
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// The variable at position `i`.
    pub fn var(vars: &Vars, i: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        Self::monomial(vars, e, Q::one())
    }

    pub fn var_named(vars: &Vars, name: &str) -> Result<Self> {
        let i = vars.iter().position(|v| v == name).ok_or(Error::VariableMismatch)?;
        Ok(Self::var(vars, i))
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }
    pub fn nvars(&self) -> usize {
        self.vars.len()
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i32>, &Q)> {
        self.terms.iter()
    }
    pub fn coefficient(&self, exps: &[i32]) -> Q {
        self.terms.get(exps).cloned().unwrap_or_else(Q::zero)
    }
    pub fn constant_term(&self) -> Q {
        self.coefficient(&vec![0; self.nvars()])
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    fn check(&self, o: &Self) -> Result<()> {
        if same_vars(&self.vars, &o.vars) {
            Ok(())
        } else {
            Err(Error::VariableMismatch)
        }
    }

    fn add_term(&mut self, e: Vec<i32>, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(e.clone(), c.clone());
        }
        Ok(r)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        Polynomial { vars: self.vars.clone(), terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }

    pub fn scale(&self, s: &Q) -> Self {
        if s.is_zero() {
            return Self::zero(&self.vars);
        }
        Polynomial { vars: self.vars.clone(), terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect() }
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let mut r = Self::zero(&self.vars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<i32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                r.add_term(e, c1 * c2);
            }
        }
        Ok(r)
    }

    /// Multiplies by the monomial with exponent vector `shift`.
    pub fn shift(&self, shift: &[i32]) -> Self {
        Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.iter().zip(shift).map(|(a, b)| a + b).collect(), c.clone())).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut r = Self::one(&self.vars);
        let mut b = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                r = r.mul(&b).unwrap();
            }
            k >>= 1;
            if k > 0 {
                b = b.mul(&b).unwrap();
            }
        }
        r
    }

    pub fn partial_derivative(&self, i: usize) -> Self {
        let mut r = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            if e[i] != 0 {
                let mut e2 = e.clone();
                e2[i] -= 1;
                r.add_term(e2, c * q(e[i] as i64));
            }
        }
        r
    }

    pub fn partial_derivative_named(&self, name: &str) -> Result<Self> {
        let i = self.var_index(name).ok_or(Error::VariableMismatch)?;
        Ok(self.partial_derivative(i))
    }

    /// Replaces the named variables by polynomials over a common target variable list.
    /// Variables that are not substituted must exist in the target list.
    pub fn substitute(&self, subs: &[(&str, Polynomial)]) -> Result<Polynomial> {
        let target = match subs.first() {
            Some((_, p)) => p.vars.clone(),
            None => return Ok(self.clone()),
        };
        let mut images: Vec<Option<Polynomial>> = vec![None; self.nvars()];
        for (name, p) in subs {
            if !same_vars(&p.vars, &target) {
                return Err(Error::VariableMismatch);
            }
            let i = self.var_index(name).ok_or(Error::VariableMismatch)?;
            images[i] = Some(p.clone());
        }
        let mut pass: Vec<Option<usize>> = vec![None; self.nvars()];
        for i in 0..self.nvars() {
            if images[i].is_none() {
                let j = target.iter().position(|v| *v == self.vars[i]).ok_or(Error::VariableMismatch)?;
                pass[i] = Some(j);
            }
        }
        let mut cache: BTreeMap<(usize, i32), Polynomial> = BTreeMap::new();
        let mut r = Polynomial::zero(&target);
        for (e, c) in &self.terms {
            let mut base = vec![0i32; target.len()];
            let mut acc = Polynomial::constant(&target, c.clone());
            for i in 0..self.nvars() {
                if e[i] == 0 {
                    continue;
                }
                match pass[i] {
                    Some(j) => base[j] += e[i],
                    None => {
                        let key = (i, e[i]);
                        if !cache.contains_key(&key) {
                            let img = images[i].as_ref().unwrap();
                            let pw = if e[i] > 0 { img.pow(e[i] as u32) } else { img.inverse_monomial()?.pow((-e[i]) as u32) };
                            cache.insert(key, pw);
                        }
                        acc = acc.mul(&cache[&key])?;
                    }
                }
            }
            r = r.add(&acc.shift(&base))?;
        }
        Ok(r)
    }

    pub fn inverse_monomial(&self) -> Result<Polynomial> {
        if self.terms.len() != 1 {
            return Err(Error::NonMonomialInverse);
        }
        let (e, c) = self.terms.iter().next().unwrap();
        Ok(Polynomial::monomial(&self.vars, e.iter().map(|x| -x).collect(), c.recip()))
    }

    /// Re-expresses the polynomial over a larger (or reordered) variable list.
    pub fn embed(&self, target: &Vars) -> Result<Polynomial> {
        let map: Option<Vec<usize>> = self.vars.iter().map(|v| target.iter().position(|w| w == v)).collect();
        let map = map.ok_or(Error::VariableMismatch)?;
        let mut r = Polynomial::zero(target);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; target.len()];
            for (i, &x) in e.iter().enumerate() {
                if x != 0 {
                    e2[map[i]] = x;
                }
            }
            r.add_term(e2, c.clone());
        }
        Ok(r)
    }

    /// Leading term in lexicographic exponent order.
    pub fn leading(&self) -> Option<(&Vec<i32>, &Q)> {
        self.terms.iter().next_back()
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Polynomial) -> Result<Option<Polynomial>> {
        self.check(d)?;
        if d.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if d.is_monomial() {
            return Ok(Some(self.mul(&d.inverse_monomial()?)?));
        }
        let (de, dc) = d.leading().map(|(e, c)| (e.clone(), c.clone())).unwrap();
        let mut rem = self.clone();
        let mut quo = Polynomial::zero(&self.vars);
        let budget = 4 * (self.terms.len() + 1) * (d.terms.len() + 1) + 64;
        let mut steps = 0;
        while let Some((re, rc)) = rem.leading().map(|(e, c)| (e.clone(), c.clone())) {
            steps += 1;
            if steps > budget {
                return Ok(None);
            }
            let e: Vec<i32> = re.iter().zip(&de).map(|(a, b)| a - b).collect();
            if e.iter().any(|&x| x < 0) && self.terms.keys().all(|k| k.iter().all(|&x| x >= 0)) && d.terms.keys().all(|k| k.iter().all(|&x| x >= 0)) {
                return Ok(None);
            }
            let t = Polynomial::monomial(&self.vars, e, rc / &dc);
            rem = rem.sub(&t.mul(d)?)?;
            quo = quo.add(&t)?;
        }
        Ok(Some(quo))
    }

    /// Componentwise minimum exponent over all terms.
    pub fn min_exponents(&self) -> Vec<i32> {
        let mut m = vec![i32::MAX; self.nvars()];
        for e in self.terms.keys() {
            for (a, b) in m.iter_mut().zip(e) {
                *a = (*a).min(*b);
            }
        }
        if self.terms.is_empty() {
            m.iter_mut().for_each(|x| *x = 0);
        }
        m
    }

    pub fn max_degree_in(&self, i: usize) -> i32 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }
    pub fn min_degree_in(&self, i: usize) -> i32 {
        self.terms.keys().map(|e| e[i]).min().unwrap_or(0)
    }

    pub fn total_degree(&self) -> i32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Total degree if all terms share it.
    pub fn homogeneous_degree(&self) -> Option<i32> {
        let mut it = self.terms.keys().map(|e| e.iter().sum::<i32>());
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    /// Groups terms by the exponent of variable `i`, removing that variable's power.
    pub fn collect_by(&self, i: usize) -> BTreeMap<i32, Polynomial> {
        let mut out: BTreeMap<i32, Polynomial> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            e2[i] = 0;
            out.entry(e[i]).or_insert_with(|| Polynomial::zero(&self.vars)).add_term(e2, c.clone());
        }
        out
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| q_to_f64(c) * e.iter().zip(x).map(|(&k, &v)| v.powi(k)).product::<f64>())
            .sum()
    }

    pub fn eval_complex(&self, x: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| q_to_f64(c) * e.iter().zip(x).map(|(&k, v)| v.powi(k)).product::<Complex64>())
            .sum()
    }

    pub fn eval_q(&self, x: &[Q]) -> Q {
        let mut s = Q::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (&k, v) in e.iter().zip(x) {
                if k > 0 {
                    t *= num_traits::pow(v.clone(), k as usize);
                } else if k < 0 {
                    t /= num_traits::pow(v.clone(), (-k) as usize);
                }
            }
            s += t;
        }
        s
    }

    /// Precompiled form for repeated floating-point evaluation.
    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly { terms: self.terms.iter().map(|(e, c)| (e.iter().enumerate().filter(|(_, &k)| k != 0).map(|(i, &k)| (i, k)).collect(), q_to_f64(c))).collect() }
    }

    pub fn all_coefficients_one(&self) -> bool {
        self.terms.values().all(|c| c.is_one())
    }

    pub fn leading_coefficient(&self) -> Q {
        self.leading().map(|(_, c)| c.clone()).unwrap_or_else(Q::zero)
    }
}

#[derive(Clone, Debug)]
pub struct CompiledPoly {
    terms: Vec<(Vec<(usize, i32)>, f64)>,
}

impl CompiledPoly {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(m, c)| c * m.iter().map(|&(i, k)| x[i].powi(k)).product::<f64>()).sum()
    }
    pub fn eval_complex(&self, x: &[Complex64]) -> Complex64 {
        self.terms.iter().map(|(m, c)| *c * m.iter().map(|&(i, k)| x[i].powi(k)).product::<Complex64>()).sum()
    }
}

fn fmt_coeff_mono(c: &Q, e: &[i32], vars: &[String], first: bool) -> String {
    let neg = c.is_negative();
    let a = c.abs();
    let mut factors: Vec<String> = Vec::new();
    for (i, &k) in e.iter().enumerate() {
        match k {
            0 => {}
            1 => factors.push(vars[i].clone()),
            _ => factors.push(format!("{}^{}", vars[i], k)),
        }
    }
    let body = if factors.is_empty() {
        a.to_string()
    } else if a.is_one() {
        factors.join("*")
    } else {
        format!("{}*{}", a, factors.join("*"))
    };
    match (first, neg) {
        (true, false) => body,
        (true, true) => format!("-{}", body),
        (false, false) => format!(" + {}", body),
        (false, true) => format!(" - {}", body),
    }
}

impl fmt::Display for Polynomial {
    /// Canonical text: terms by descending total degree, then descending lexicographic exponent.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut ts: Vec<(&Vec<i32>, &Q)> = self.terms.iter().collect();
        ts.sort_by(|a, b| {
            let da: i32 = a.0.iter().sum();
            let db: i32 = b.0.iter().sum();
            db.cmp(&da).then_with(|| b.0.cmp(a.0))
        });
        let mut s = String::new();
        for (k, (e, c)) in ts.iter().enumerate() {
            s.push_str(&fmt_coeff_mono(c, e, &self.vars, k == 0));
        }
        write!(f, "{}", s)
    }
}
