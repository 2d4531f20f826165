//! Finite fields F_{p^m} given by a monic irreducible modulus over F_p.
//!
//! Elements are small `Copy` handles ([`Fq`]) whose code is the base-p
//! integer of the coordinate vector w.r.t. the basis 1, g, g^2, ... where g
//! is a root of the modulus. All arithmetic goes through the shared
//! [`FieldCtx`], which keeps exp/log tables for a fixed primitive element.

use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MAX_ORDER: u64 = 1 << 16;

/// An element of some F_q. Meaningless without its [`FieldCtx`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fq(pub u32);

impl Fq {
    pub const ZERO: Fq = Fq(0);
    pub const ONE: Fq = Fq(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn code(self) -> u32 {
        self.0
    }
}

#[derive(Debug)]
pub struct FieldCtx {
    p: u32,
    m: u32,
    q: u32,
    /// Monic modulus over F_p, ascending coefficients, length m + 1.
    modulus: Vec<u32>,
    /// exp[i] = w^i for a primitive element w, doubled in length.
    exp: Vec<u32>,
    log: Vec<u32>,
    add_table: Option<Vec<u32>>,
}

/// Shared handle to a field context.
#[derive(Clone, Debug)]
pub struct Field(Arc<FieldCtx>);

impl Deref for Field {
    type Target = FieldCtx;
    fn deref(&self) -> &FieldCtx {
        &self.0
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.p == other.p && self.modulus == other.modulus)
    }
}
impl Eq for Field {}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Remainder of `a` modulo monic `b` over F_p; both ascending.
fn fp_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        if lead != 0 {
            for (i, &bc) in b.iter().enumerate() {
                let idx = i + shift;
                r[idx] = (r[idx] + p - (lead * bc) % p) % p;
            }
        }
        r.pop();
    }
    r
}

fn fp_is_zero(a: &[u32]) -> bool {
    a.iter().all(|&c| c == 0)
}

/// Exhaustive irreducibility test: no monic factor of degree 1..=m/2.
fn fp_irreducible(f: &[u32], p: u32) -> bool {
    let m = f.len() - 1;
    if m == 0 {
        return false;
    }
    for d in 1..=m / 2 {
        let count = (p as u64).pow(d as u32);
        for k in 0..count {
            let mut g = vec![0u32; d + 1];
            let mut kk = k;
            for c in g.iter_mut().take(d) {
                *c = (kk % p as u64) as u32;
                kk /= p as u64;
            }
            g[d] = 1;
            if fp_is_zero(&fp_rem(f, &g, p)) {
                return false;
            }
        }
    }
    true
}

impl Field {
    /// Builds F_{p^m}. When `modulus` is `None` the lexicographically least
    /// monic irreducible of degree m is used (coefficient of x^{m-1} most
    /// significant).
    pub fn new(p: u32, m: u32, modulus: Option<Vec<u32>>) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if m == 0 {
            return Err(Error::BadModulus(m));
        }
        let q64 = (p as u64).checked_pow(m).unwrap_or(u64::MAX);
        if q64 > MAX_ORDER {
            return Err(Error::FieldTooLarge { p, m });
        }
        let modulus = match modulus {
            Some(md) => {
                if md.len() != m as usize + 1 || md[m as usize] != 1 || md.iter().any(|&c| c >= p) {
                    return Err(Error::BadModulus(m));
                }
                if !fp_irreducible(&md, p) {
                    return Err(Error::ReducibleModulus(p));
                }
                md
            }
            None => default_modulus(p, m),
        };
        Ok(Field(Arc::new(FieldCtx::build(p, m, q64 as u32, modulus))))
    }

    /// The prime field F_p.
    pub fn prime(p: u32) -> Result<Field> {
        Field::new(p, 1, None)
    }

    pub fn ptr_eq(&self, other: &Field) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

fn default_modulus(p: u32, m: u32) -> Vec<u32> {
    if m == 1 {
        return vec![0, 1];
    }
    let count = (p as u64).pow(m);
    for k in 0..count {
        let mut f = vec![0u32; m as usize + 1];
        let mut kk = k;
        for c in f.iter_mut().take(m as usize) {
            *c = (kk % p as u64) as u32;
            kk /= p as u64;
        }
        f[m as usize] = 1;
        if fp_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl FieldCtx {
    fn build(p: u32, m: u32, q: u32, modulus: Vec<u32>) -> FieldCtx {
        let encode = |v: &[u32]| -> u32 {
            let mut c = 0u32;
            for &x in v.iter().rev() {
                c = c * p + x;
            }
            c
        };
        let decode = |mut c: u32| -> Vec<u32> {
            let mut v = vec![0u32; m as usize];
            for x in v.iter_mut() {
                *x = c % p;
                c /= p;
            }
            v
        };
        let slow_mul = |a: u32, b: u32| -> u32 {
            let av = decode(a);
            let bv = decode(b);
            let mut prod = vec![0u32; 2 * m as usize - 1];
            for (i, &x) in av.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                for (j, &y) in bv.iter().enumerate() {
                    prod[i + j] = (prod[i + j] + x * y) % p;
                }
            }
            let r = if prod.len() > m as usize { fp_rem(&prod, &modulus, p) } else { prod };
            encode(&r)
        };
        // primitive element search
        let order = q - 1;
        let mut prime_factors = Vec::new();
        let mut n = order;
        let mut d = 2;
        while d * d <= n {
            if n.is_multiple_of(d) {
                prime_factors.push(d);
                while n.is_multiple_of(d) {
                    n /= d;
                }
            }
            d += 1;
        }
        if n > 1 {
            prime_factors.push(n);
        }
        let slow_pow = |a: u32, mut e: u32| -> u32 {
            let mut base = a;
            let mut acc = 1u32;
            while e > 0 {
                if e & 1 == 1 {
                    acc = slow_mul(acc, base);
                }
                base = slow_mul(base, base);
                e >>= 1;
            }
            acc
        };
        let mut gen = 1u32;
        if q > 2 {
            for cand in 2..q {
                if prime_factors.iter().all(|&f| slow_pow(cand, order / f) != 1) {
                    gen = cand;
                    break;
                }
            }
        }
        let mut exp = vec![0u32; 2 * order as usize];
        let mut log = vec![0u32; q as usize];
        let mut x = 1u32;
        for i in 0..order as usize {
            exp[i] = x;
            exp[i + order as usize] = x;
            log[x as usize] = i as u32;
            x = slow_mul(x, gen);
        }
        let add_table = if p != 2 && q <= 256 {
            let mut t = vec![0u32; (q * q) as usize];
            for a in 0..q {
                let av = decode(a);
                for b in 0..q {
                    let bv = decode(b);
                    let s: Vec<u32> = av.iter().zip(&bv).map(|(x, y)| (x + y) % p).collect();
                    t[(a * q + b) as usize] = encode(&s);
                }
            }
            Some(t)
        } else {
            None
        };
        FieldCtx { p, m, q, modulus, exp, log, add_table }
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn m(&self) -> u32 {
        self.m
    }
    pub fn q(&self) -> u32 {
        self.q
    }
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }
    pub fn is_prime_field(&self) -> bool {
        self.m == 1
    }

    pub fn zero(&self) -> Fq {
        Fq::ZERO
    }
    pub fn one(&self) -> Fq {
        Fq::ONE
    }

    /// The class of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> Fq {
        Fq(n.rem_euclid(self.p as i64) as u32)
    }

    /// The root g of the modulus; `None` in a prime field.
    pub fn generator(&self) -> Option<Fq> {
        (self.m > 1).then_some(Fq(self.p))
    }

    pub fn elements(&self) -> impl Iterator<Item = Fq> {
        (0..self.q).map(Fq)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = Fq> {
        (1..self.q).map(Fq)
    }

    #[inline]
    pub fn add(&self, a: Fq, b: Fq) -> Fq {
        if self.p == 2 {
            return Fq(a.0 ^ b.0);
        }
        if self.m == 1 {
            let s = a.0 + b.0;
            return Fq(if s >= self.p { s - self.p } else { s });
        }
        if let Some(t) = &self.add_table {
            return Fq(t[(a.0 * self.q + b.0) as usize]);
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0u32;
        let mut w = 1u32;
        for _ in 0..self.m {
            out += ((x % self.p + y % self.p) % self.p) * w;
            x /= self.p;
            y /= self.p;
            w *= self.p;
        }
        Fq(out)
    }

    #[inline]
    pub fn neg(&self, a: Fq) -> Fq {
        if self.p == 2 || a.0 == 0 {
            return a;
        }
        if self.m == 1 {
            return Fq(self.p - a.0);
        }
        let mut x = a.0;
        let mut out = 0u32;
        let mut w = 1u32;
        for _ in 0..self.m {
            out += ((self.p - x % self.p) % self.p) * w;
            x /= self.p;
            w *= self.p;
        }
        Fq(out)
    }

    #[inline]
    pub fn sub(&self, a: Fq, b: Fq) -> Fq {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fq, b: Fq) -> Fq {
        if a.0 == 0 || b.0 == 0 {
            return Fq::ZERO;
        }
        if self.q == 2 {
            return Fq::ONE;
        }
        Fq(self.exp[(self.log[a.0 as usize] + self.log[b.0 as usize]) as usize])
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: Fq) -> Option<Fq> {
        if a.0 == 0 {
            return None;
        }
        if self.q == 2 {
            return Some(Fq::ONE);
        }
        let order = self.q - 1;
        let l = self.log[a.0 as usize];
        Some(Fq(self.exp[((order - l) % order) as usize]))
    }

    pub fn div(&self, a: Fq, b: Fq) -> Result<Fq> {
        let bi = self.inv(b).ok_or(Error::DivisionByZero)?;
        Ok(self.mul(a, bi))
    }

    pub fn pow(&self, a: Fq, e: u64) -> Fq {
        if e == 0 {
            return Fq::ONE;
        }
        if a.0 == 0 {
            return Fq::ZERO;
        }
        let order = (self.q - 1) as u64;
        let l = self.log[a.0 as usize] as u64;
        Fq(self.exp[((l * (e % order)) % order) as usize])
    }

    /// x ↦ x^p.
    pub fn frobenius(&self, a: Fq) -> Fq {
        self.pow(a, self.p as u64)
    }

    /// Inverse Frobenius x ↦ x^{1/p}.
    pub fn frobenius_inv(&self, a: Fq) -> Fq {
        // x^{p^{m-1}} is the inverse of Frobenius on F_{p^m}
        self.pow(a, (self.p as u64).pow(self.m - 1))
    }

    /// Coordinates of `a` over F_p in the basis 1, g, ..., g^{m-1}.
    pub fn coords(&self, a: Fq) -> Vec<u32> {
        let mut c = a.0;
        (0..self.m)
            .map(|_| {
                let d = c % self.p;
                c /= self.p;
                d
            })
            .collect()
    }

    pub fn from_coords(&self, coords: &[u32]) -> Fq {
        let mut c = 0u32;
        for &x in coords.iter().rev() {
            c = c * self.p + x % self.p;
        }
        Fq(c)
    }

    /// Renders `a` as a polynomial in g (or an integer in a prime field).
    pub fn format_elem(&self, a: Fq) -> String {
        if self.m == 1 {
            return a.0.to_string();
        }
        let coords = self.coords(a);
        let mut terms = Vec::new();
        for (i, &c) in coords.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "g".to_string(),
                _ => format!("g^{i}"),
            };
            terms.push(match (c, mono.is_empty()) {
                (_, true) => c.to_string(),
                (1, false) => mono,
                (_, false) => format!("{c}*{mono}"),
            });
        }
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join("+")
        }
    }

    /// True if the formatted element needs parentheses as a coefficient.
    pub fn elem_is_compound(&self, a: Fq) -> bool {
        self.coords(a).iter().filter(|&&c| c != 0).count() > 1
    }
}

/// Serializable description of a field, used in JSON files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDesc {
    pub p: u32,
    #[serde(default = "one_u32")]
    pub m: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u32>>,
}

fn one_u32() -> u32 {
    1
}

impl FieldDesc {
    pub fn of(f: &Field) -> FieldDesc {
        FieldDesc { p: f.p(), m: f.m(), modulus: if f.m() > 1 { Some(f.modulus().to_vec()) } else { None } }
    }

    pub fn build(&self) -> Result<Field> {
        Field::new(self.p, self.m, self.modulus.clone())
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.m == 1 {
            write!(f, "F_{}", self.p)
        } else {
            write!(f, "F_{}^{}", self.p, self.m)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_fields() -> Vec<Field> {
        vec![
            Field::prime(2).unwrap(),
            Field::new(2, 2, None).unwrap(),
            Field::new(2, 3, None).unwrap(),
            Field::new(3, 2, None).unwrap(),
        ]
    }

    #[test]
    fn default_moduli() {
        assert_eq!(Field::new(2, 2, None).unwrap().modulus(), &[1, 1, 1]);
        assert_eq!(Field::new(2, 3, None).unwrap().modulus(), &[1, 1, 0, 1]);
        assert_eq!(Field::new(3, 2, None).unwrap().modulus(), &[1, 0, 1]);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(Field::new(4, 1, None).unwrap_err(), Error::NotPrime(4));
        // x^2 + 1 = (x + 1)^2 over F_2
        assert_eq!(Field::new(2, 2, Some(vec![1, 0, 1])).unwrap_err(), Error::ReducibleModulus(2));
        assert!(Field::new(2, 2, Some(vec![1, 1, 1])).is_ok());
    }

    #[test]
    fn f4_modulus_has_no_roots() {
        // exhaustive root check over F_2 for x^2 + x + 1
        for x in 0..2u32 {
            assert_ne!((x * x + x + 1) % 2, 0);
        }
        // and x^2 + 1 has the root 1
        assert_eq!((1 + 1) % 2, 0);
    }

    #[test]
    fn field_laws_exhaustive() {
        for f in all_fields() {
            let els: Vec<Fq> = f.elements().collect();
            for &a in &els {
                assert_eq!(f.add(a, f.neg(a)), Fq::ZERO);
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), Fq::ONE);
                }
                for &b in &els {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    let pa = f.frobenius(a);
                    let pb = f.frobenius(b);
                    assert_eq!(f.frobenius(f.add(a, b)), f.add(pa, pb));
                    for &c in &els {
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                    }
                }
                assert_eq!(f.frobenius_inv(f.frobenius(a)), a);
            }
        }
    }

    #[test]
    fn format_elements() {
        let f4 = Field::new(2, 2, None).unwrap();
        assert_eq!(f4.format_elem(Fq(2)), "g");
        assert_eq!(f4.format_elem(Fq(3)), "g+1");
        let f9 = Field::new(3, 2, None).unwrap();
        assert_eq!(f9.format_elem(Fq(6)), "2*g");
    }
}
