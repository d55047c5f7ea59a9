use super::poly::{Polynomial, Vars, Q};
use crate::error::{Error, Result};
use num_complex::Complex64;
use num_traits::{One, Zero};
use std::fmt;

/// Exact quotient of two polynomials. Equality is decided by cross-multiplication.
#[derive(Clone, Debug)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl PartialEq for RationalFunction {
    fn eq(&self, other: &Self) -> bool {
        match (self.num.mul(&other.den), other.num.mul(&self.den)) {
            (Ok(a), Ok(b)) => a == b,
            _ => false,
        }
    }
}

fn split_monomial(p: &Polynomial) -> (Vec<i32>, Polynomial) {
    let m = p.min_exponents();
    let neg: Vec<i32> = m.iter().map(|x| -x).collect();
    (m, p.shift(&neg))
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if num.vars() != den.vars() {
            return Err(Error::VariableMismatch);
        }
        let mut r = RationalFunction { num, den };
        r.normalize();
        Ok(r)
    }

    pub fn from_poly(p: Polynomial) -> Self {
        let den = Polynomial::one(p.vars());
        let mut r = RationalFunction { num: p, den };
        r.normalize();
        r
    }

    pub fn zero(vars: &Vars) -> Self {
        Self::from_poly(Polynomial::zero(vars))
    }
    pub fn one(vars: &Vars) -> Self {
        Self::from_poly(Polynomial::one(vars))
    }
    pub fn constant(vars: &Vars, c: Q) -> Self {
        Self::from_poly(Polynomial::constant(vars, c))
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }
    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }
    pub fn vars(&self) -> &Vars {
        self.num.vars()
    }
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Clears negative exponents and common monomial factors, cancels an exactly dividing
    /// denominator, and makes the denominator's leading coefficient 1.
    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den = Polynomial::one(self.num.vars());
            return;
        }
        let mn = self.num.min_exponents();
        let md = self.den.min_exponents();
        let common: Vec<i32> = mn.iter().zip(&md).map(|(a, b)| -(*a.min(b))).collect();
        self.num = self.num.shift(&common);
        self.den = self.den.shift(&common);
        if !self.den.is_monomial() {
            if let Ok(Some(qt)) = self.num.div_exact(&self.den) {
                self.num = qt;
                self.den = Polynomial::one(self.num.vars());
            }
        }
        let lc = self.den.leading_coefficient();
        if !lc.is_one() {
            let inv = lc.recip();
            self.num = self.num.scale(&inv);
            self.den = self.den.scale(&inv);
        }
    }

    pub fn neg(&self) -> Self {
        RationalFunction { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        if self.num.vars() != o.num.vars() {
            return Err(Error::VariableMismatch);
        }
        if self.is_zero() {
            return Ok(o.clone());
        }
        if o.is_zero() {
            return Ok(self.clone());
        }
        if self.den == o.den {
            return RationalFunction::new(self.num.add(&o.num)?, self.den.clone());
        }
        let (ma, pa) = split_monomial(&self.den);
        let (mb, pb) = split_monomial(&o.den);
        let ca = pa.leading_coefficient();
        let cb = pb.leading_coefficient();
        if pa.scale(&cb) == pb.scale(&ca) {
            let l: Vec<i32> = ma.iter().zip(&mb).map(|(a, b)| *a.max(b)).collect();
            let fa: Vec<i32> = l.iter().zip(&ma).map(|(x, y)| x - y).collect();
            let fb: Vec<i32> = l.iter().zip(&mb).map(|(x, y)| x - y).collect();
            let na = self.num.shift(&fa).scale(&ca.recip());
            let nb = o.num.shift(&fb).scale(&cb.recip());
            return RationalFunction::new(na.add(&nb)?, pa.scale(&ca.recip()).shift(&l));
        }
        RationalFunction::new(self.num.mul(&o.den)?.add(&o.num.mul(&self.den)?)?, self.den.mul(&o.den)?)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.is_zero() || o.is_zero() {
            return Ok(RationalFunction::zero(self.vars()));
        }
        RationalFunction::new(self.num.mul(&o.num)?, self.den.mul(&o.den)?)
    }

    pub fn mul_poly(&self, p: &Polynomial) -> Result<Self> {
        RationalFunction::new(self.num.mul(p)?, self.den.clone())
    }

    pub fn scale(&self, c: &Q) -> Self {
        RationalFunction { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn inv(&self) -> Result<Self> {
        RationalFunction::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        self.mul(&o.inv()?)
    }

    pub fn substitute(&self, subs: &[(&str, Polynomial)]) -> Result<Self> {
        RationalFunction::new(self.num.substitute(subs)?, self.den.substitute(subs)?)
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.num.eval_f64(x) / self.den.eval_f64(x)
    }

    pub fn eval_complex(&self, x: &[Complex64]) -> Complex64 {
        self.num.eval_complex(x) / self.den.eval_complex(x)
    }

    pub fn eval_q(&self, x: &[Q]) -> Result<Q> {
        let d = self.den.eval_q(x);
        if d.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(self.num.eval_q(x) / d)
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() && self.den.constant_term().is_one() {
            write!(f, "{}", self.num)
        } else {
            let n = if self.num.num_terms() > 1 { format!("({})", self.num) } else { self.num.to_string() };
            let d = if self.den.num_terms() > 1 || self.den.to_string().contains('*') { format!("({})", self.den) } else { self.den.to_string() };
            write!(f, "{}/{}", n, d)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::poly::{q, vars};
    use super::*;

    #[test]
    fn sum_of_reciprocals() {
        let v = vars(&["t1", "t2"]);
        let t1 = Polynomial::var(&v, 0);
        let t2 = Polynomial::var(&v, 1);
        let one = Polynomial::one(&v);
        let a = RationalFunction::new(one.clone(), t1.clone()).unwrap();
        let b = RationalFunction::new(one, t2.clone()).unwrap();
        let s = a.add(&b).unwrap();
        assert_eq!(s.to_string(), "(t1 + t2)/(t1*t2)");
        let back = RationalFunction::new(t1.add(&t2).unwrap(), t1.mul(&t2).unwrap()).unwrap();
        assert_eq!(s, back);
        assert_eq!(s.mul(&s.inv().unwrap()).unwrap(), RationalFunction::one(&v));
    }

    #[test]
    fn shared_primitive_denominator() {
        let v = vars(&["t1", "t2"]);
        let t1 = Polynomial::var(&v, 0);
        let t2 = Polynomial::var(&v, 1);
        let k = t1.add(&t2).unwrap();
        let a = RationalFunction::new(t2.clone(), k.mul(&t1).unwrap()).unwrap();
        let b = RationalFunction::new(t1.clone(), k.scale(&q(2))).unwrap();
        let s = a.add(&b).unwrap();
        let expect = RationalFunction::new(t2.scale(&q(2)).add(&t1.pow(2)).unwrap(), k.mul(&t1).unwrap().scale(&q(2))).unwrap();
        assert_eq!(s, expect);
    }

    #[test]
    fn zero_denominator() {
        let v = vars(&["t1"]);
        assert_eq!(RationalFunction::new(Polynomial::one(&v), Polynomial::zero(&v)), Err(Error::ZeroDenominator));
    }
}
