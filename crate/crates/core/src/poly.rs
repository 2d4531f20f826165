//! Univariate polynomials over F_q.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::field::{Field, Fq};

/// Degree of a polynomial; the zero polynomial has degree `NegInf`, which
/// compares below every finite degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Degree {
    NegInf,
    Fin(usize),
}

impl Degree {
    pub fn finite(self) -> Option<usize> {
        match self {
            Degree::NegInf => None,
            Degree::Fin(d) => Some(d),
        }
    }
}

impl PartialOrd for Degree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Degree {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Degree::NegInf, Degree::NegInf) => Ordering::Equal,
            (Degree::NegInf, _) => Ordering::Less,
            (_, Degree::NegInf) => Ordering::Greater,
            (Degree::Fin(a), Degree::Fin(b)) => a.cmp(b),
        }
    }
}

/// A polynomial with ascending coefficients, normalized so that the last
/// stored coefficient is nonzero.
#[derive(Clone)]
pub struct Poly {
    field: Field,
    coeffs: Vec<Fq>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && self.field == other.field
    }
}
impl Eq for Poly {}

impl Hash for Poly {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl Poly {
    pub fn new(field: &Field, mut coeffs: Vec<Fq>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { field: field.clone(), coeffs }
    }

    pub fn zero(field: &Field) -> Poly {
        Poly { field: field.clone(), coeffs: Vec::new() }
    }

    pub fn one(field: &Field) -> Poly {
        Poly::constant(field, Fq::ONE)
    }

    pub fn constant(field: &Field, c: Fq) -> Poly {
        Poly::new(field, vec![c])
    }

    /// The indeterminate z.
    pub fn z(field: &Field) -> Poly {
        Poly::monomial(field, Fq::ONE, 1)
    }

    pub fn monomial(field: &Field, c: Fq, k: usize) -> Poly {
        let mut v = vec![Fq::ZERO; k + 1];
        v[k] = c;
        Poly::new(field, v)
    }

    /// Builds a polynomial from small integer coefficients (reduced mod p).
    pub fn from_ints(field: &Field, ints: &[i64]) -> Poly {
        Poly::new(field, ints.iter().map(|&n| field.from_int(n)).collect())
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[Fq] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Fq> {
        self.coeffs
    }

    /// Coefficient of z^i (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> Fq {
        self.coeffs.get(i).copied().unwrap_or(Fq::ZERO)
    }

    pub fn deg(&self) -> Degree {
        if self.coeffs.is_empty() {
            Degree::NegInf
        } else {
            Degree::Fin(self.coeffs.len() - 1)
        }
    }

    /// Degree as a signed integer with -1 for zero; only for loop bounds.
    pub fn degree_or_neg(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == Fq::ONE
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn lead(&self) -> Fq {
        self.coeffs.last().copied().unwrap_or(Fq::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.lead() == Fq::ONE
    }

    /// Order of vanishing at z = 0; `None` for the zero polynomial.
    pub fn low_degree(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn scale(&self, c: Fq) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.field);
        }
        Poly::new(&self.field, self.coeffs.iter().map(|&a| self.field.mul(a, c)).collect())
    }

    pub fn monic(&self) -> Poly {
        match self.field.inv(self.lead()) {
            Some(li) => self.scale(li),
            None => self.clone(),
        }
    }

    /// Multiplies by z^k.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut v = vec![Fq::ZERO; k];
        v.extend_from_slice(&self.coeffs);
        Poly { field: self.field.clone(), coeffs: v }
    }

    /// Remainder modulo z^k.
    pub fn truncate(&self, k: usize) -> Poly {
        Poly::new(&self.field, self.coeffs.iter().take(k).copied().collect())
    }

    /// Exact division by z^k; the low coefficients are discarded.
    pub fn unshift(&self, k: usize) -> Poly {
        Poly::new(&self.field, self.coeffs.iter().skip(k).copied().collect())
    }

    /// z^n · p(1/z) for n = deg p (coefficient reversal).
    pub fn reverse(&self) -> Poly {
        let mut v = self.coeffs.clone();
        v.reverse();
        Poly::new(&self.field, v)
    }

    pub fn eval(&self, x: Fq) -> Fq {
        let f = &self.field;
        self.coeffs.iter().rev().fold(Fq::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
    }

    pub fn derivative(&self) -> Poly {
        let f = &self.field;
        Poly::new(f, self.coeffs.iter().enumerate().skip(1).map(|(i, &c)| f.mul(c, f.from_int(i as i64))).collect())
    }

    pub fn add_ref(&self, other: &Poly) -> Poly {
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new(f, (0..n).map(|i| f.add(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn sub_ref(&self, other: &Poly) -> Poly {
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new(f, (0..n).map(|i| f.sub(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn neg_ref(&self) -> Poly {
        let f = &self.field;
        Poly::new(f, self.coeffs.iter().map(|&c| f.neg(c)).collect())
    }

    pub fn mul_ref(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(&self.field);
        }
        let f = &self.field;
        let mut out = vec![Fq::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Poly::new(f, out)
    }

    /// Product truncated modulo z^k.
    pub fn mul_trunc(&self, other: &Poly, k: usize) -> Poly {
        let f = &self.field;
        let mut out = vec![Fq::ZERO; k.min(self.coeffs.len() + other.coeffs.len())];
        for (i, &a) in self.coeffs.iter().enumerate().take(k) {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate().take(k - i) {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Poly::new(f, out)
    }

    /// Euclidean division: `self = quo * g + rem` with `deg rem < deg g`.
    pub fn divmod(&self, g: &Poly) -> Result<(Poly, Poly)> {
        if g.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let f = &self.field;
        let dg = g.coeffs.len() - 1;
        if self.coeffs.len() <= dg {
            return Ok((Poly::zero(f), self.clone()));
        }
        let lead_inv = f.inv(g.lead()).expect("nonzero leading coefficient");
        let mut r = self.coeffs.clone();
        let mut quo = vec![Fq::ZERO; r.len() - dg];
        for k in (0..quo.len()).rev() {
            let c = f.mul(r[k + dg], lead_inv);
            quo[k] = c;
            if c.is_zero() {
                continue;
            }
            for (j, &b) in g.coeffs.iter().enumerate() {
                r[k + j] = f.sub(r[k + j], f.mul(c, b));
            }
        }
        r.truncate(dg);
        Ok((Poly::new(f, quo), Poly::new(f, r)))
    }

    pub fn rem(&self, g: &Poly) -> Result<Poly> {
        Ok(self.divmod(g)?.1)
    }

    /// Exact quotient; errors if `g` does not divide `self`.
    pub fn div_exact(&self, g: &Poly) -> Result<Poly> {
        let (q, r) = self.divmod(g)?;
        if !r.is_zero() {
            return Err(Error::Precondition(format!("{g} does not divide {self}")));
        }
        Ok(q)
    }

    /// Monic gcd (zero if both are zero).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b).expect("b nonzero");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Extended gcd: returns (g, s, t) with s·self + t·other = g, g monic.
    pub fn xgcd(&self, other: &Poly) -> (Poly, Poly, Poly) {
        let f = &self.field;
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::one(f), Poly::zero(f));
        let (mut t0, mut t1) = (Poly::zero(f), Poly::one(f));
        while !r1.is_zero() {
            let (q, r) = r0.divmod(&r1).expect("nonzero");
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub_ref(&q.mul_ref(&s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub_ref(&q.mul_ref(&t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        match f.inv(r0.lead()) {
            Some(li) => (r0.scale(li), s0.scale(li), t0.scale(li)),
            None => (r0, s0, t0),
        }
    }

    /// Inverse of `self` modulo `m`, if it exists.
    pub fn inv_mod(&self, m: &Poly) -> Option<Poly> {
        let (g, s, _) = self.rem(m).ok()?.xgcd(m);
        if g.is_one() {
            Some(s.rem(m).ok()?)
        } else {
            None
        }
    }

    pub fn pow(&self, mut e: u64) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(&self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_ref(&base);
            }
        }
        acc
    }

    pub fn pow_mod(&self, mut e: u64, m: &Poly) -> Result<Poly> {
        let mut base = self.rem(m)?;
        let mut acc = Poly::one(&self.field).rem(m)?;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&base).rem(m)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_ref(&base).rem(m)?;
            }
        }
        Ok(acc)
    }

    /// p(z)^q with coefficients raised to the q-th power, i.e. the q-power
    /// Frobenius of the polynomial (for q = |F|, coefficients are fixed).
    pub fn frobenius_q(&self, q: usize) -> Poly {
        let f = &self.field;
        if self.is_zero() {
            return self.clone();
        }
        let mut v = vec![Fq::ZERO; (self.coeffs.len() - 1) * q + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            v[i * q] = f.pow(c, q as u64);
        }
        Poly::new(f, v)
    }

    /// Composition self(other(z)).
    pub fn compose(&self, other: &Poly) -> Poly {
        let f = &self.field;
        self.coeffs.iter().rev().fold(Poly::zero(f), |acc, &c| acc.mul_ref(other).add_ref(&Poly::constant(f, c)))
    }

    /// Irreducibility over F_q (Ben-Or): no factor of degree ≤ n/2.
    pub fn is_irreducible(&self) -> bool {
        let n = match self.deg() {
            Degree::Fin(n) if n >= 1 => n,
            _ => return false,
        };
        if n == 1 {
            return true;
        }
        let f = &self.field;
        let q = f.q() as u64;
        let z = Poly::z(f);
        let mut zq = z.clone();
        for _ in 1..=n / 2 {
            zq = zq.pow_mod(q, self).expect("nonzero modulus");
            let g = zq.sub_ref(&z).gcd(self);
            if !g.is_one() {
                return false;
            }
        }
        true
    }

    /// Renders in ascending order using the variable name `var`.
    pub fn format_var(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let f = &self.field;
        let mut terms = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            let term = if mono.is_empty() {
                if f.elem_is_compound(c) {
                    format!("({})", f.format_elem(c))
                } else {
                    f.format_elem(c)
                }
            } else if c == Fq::ONE {
                mono
            } else if f.elem_is_compound(c) {
                format!("({})*{mono}", f.format_elem(c))
            } else {
                format!("{}*{mono}", f.format_elem(c))
            };
            terms.push(term);
        }
        terms.join("+")
    }

    /// Number of nonzero terms.
    pub fn weight(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_var("z"))
    }
}

macro_rules! poly_binop {
    ($tr:ident, $m:ident, $imp:ident) => {
        impl $tr<&Poly> for &Poly {
            type Output = Poly;
            fn $m(self, rhs: &Poly) -> Poly {
                self.$imp(rhs)
            }
        }
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                self.$imp(&rhs)
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: &Poly) -> Poly {
                self.$imp(rhs)
            }
        }
    };
}
poly_binop!(Add, add, add_ref);
poly_binop!(Sub, sub, sub_ref);
poly_binop!(Mul, mul, mul_ref);

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.neg_ref()
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.neg_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Field {
        Field::prime(2).unwrap()
    }

    #[test]
    fn divmod_examples() {
        let f = f2();
        let z2 = Poly::from_ints(&f, &[0, 0, 1]);
        let g = Poly::from_ints(&f, &[1, 1, 1]);
        let (q, r) = z2.divmod(&g).unwrap();
        assert_eq!(q, Poly::one(&f));
        assert_eq!(r, Poly::from_ints(&f, &[1, 1]));
        let (q, r) = z2.divmod(&Poly::one(&f)).unwrap();
        assert_eq!((q, r), (z2.clone(), Poly::zero(&f)));
        let (q, r) = Poly::zero(&f).divmod(&g).unwrap();
        assert!(q.is_zero() && r.is_zero());
        assert_eq!(z2.divmod(&Poly::zero(&f)).unwrap_err(), Error::DivisionByZero);
    }

    #[test]
    fn degree_sentinel_orders_below() {
        assert!(Degree::NegInf < Degree::Fin(0));
        assert_eq!(Poly::zero(&f2()).deg(), Degree::NegInf);
    }

    #[test]
    fn irreducibility() {
        let f = f2();
        assert!(Poly::from_ints(&f, &[1, 1, 1]).is_irreducible());
        assert!(!Poly::from_ints(&f, &[1, 0, 1]).is_irreducible());
        assert!(Poly::from_ints(&f, &[1, 1, 0, 1]).is_irreducible());
        assert!(!Poly::from_ints(&f, &[0, 1, 1]).is_irreducible());
    }

    #[test]
    fn xgcd_identity() {
        let f = f2();
        let a = Poly::from_ints(&f, &[1, 0, 1, 1, 0, 1]);
        let b = Poly::from_ints(&f, &[1, 1, 0, 1]);
        let (g, s, t) = a.xgcd(&b);
        assert_eq!(&(&s * &a) + &(&t * &b), g);
    }

    #[test]
    fn formatting() {
        let f = f2();
        assert_eq!(Poly::from_ints(&f, &[1, 1]).to_string(), "1+z");
        assert_eq!(Poly::from_ints(&f, &[1, 0, 0, 1]).to_string(), "1+z^3");
        let f4 = Field::new(2, 2, None).unwrap();
        let p = Poly::new(&f4, vec![Fq(3), Fq(0), Fq(2)]);
        assert_eq!(p.to_string(), "(g+1)+g*z^2");
    }
}
