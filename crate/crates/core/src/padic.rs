//! Base-P digit streams for the P-adic completion of F_q(z), P irreducible.

use std::cell::RefCell;
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::ratfunc::{RatFunc, Val};

type DigitGen = Box<dyn FnMut(usize) -> Poly>;

struct Inner {
    base: Poly,
    start: i64,
    cache: RefCell<Vec<Poly>>,
    gen: RefCell<DigitGen>,
}

/// x = Σ_{n ≥ start} d_n P^n with deg d_n < deg P.
#[derive(Clone)]
pub struct PiAdicStream(Rc<Inner>);

impl std::fmt::Debug for PiAdicStream {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PiAdicStream(base {}, start {})", self.0.base, self.0.start)
    }
}

impl PiAdicStream {
    fn with_gen(base: &Poly, start: i64, gen: impl FnMut(usize) -> Poly + 'static) -> PiAdicStream {
        PiAdicStream(Rc::new(Inner {
            base: base.clone(),
            start,
            cache: RefCell::new(Vec::new()),
            gen: RefCell::new(Box::new(gen)),
        }))
    }

    /// The P-adic digits of a rational function.
    pub fn from_ratfunc(x: &RatFunc, p: &Poly) -> Result<PiAdicStream> {
        let v = match x.val_p(p)? {
            Val::Inf => {
                return Ok(PiAdicStream::with_gen(p, 0, {
                    let f = p.field().clone();
                    move |_| Poly::zero(&f)
                }))
            }
            Val::Fin(v) => v,
        };
        let pr = RatFunc::from_poly(p.clone());
        let mut r = x.div_ref(&pr.pow(v)?)?;
        let base = p.clone();
        Ok(PiAdicStream::with_gen(p, v, move |_| {
            let d = residue_mod(&r, &base).expect("unit at P");
            r = r
                .sub_ref(&RatFunc::from_poly(d.clone()))
                .div_ref(&RatFunc::from_poly(base.clone()))
                .expect("P nonzero");
            d
        }))
    }

    pub fn base(&self) -> &Poly {
        &self.0.base
    }

    pub fn start(&self) -> i64 {
        self.0.start
    }

    /// Digit at position n (zero below the start).
    pub fn digit(&self, n: i64) -> Poly {
        if n < self.0.start {
            return Poly::zero(self.0.base.field());
        }
        let k = (n - self.0.start) as usize;
        while self.0.cache.borrow().len() <= k {
            let i = self.0.cache.borrow().len();
            let d = (self.0.gen.borrow_mut())(i);
            self.0.cache.borrow_mut().push(d);
        }
        self.0.cache.borrow()[k].clone()
    }

    /// Digits at positions start .. start + count.
    pub fn digits(&self, count: usize) -> Vec<Poly> {
        (0..count as i64).map(|i| self.digit(self.0.start + i)).collect()
    }

    /// Σ_{n < prec} d_n P^n as a rational function.
    pub fn partial_sum(&self, prec: i64) -> RatFunc {
        let f = self.0.base.field();
        let pr = RatFunc::from_poly(self.0.base.clone());
        let mut acc = RatFunc::zero(f);
        for n in self.0.start..prec {
            let term = RatFunc::from_poly(self.digit(n)).mul_ref(&pr.pow(n).expect("P nonzero"));
            acc = acc.add_ref(&term);
        }
        acc
    }
}

/// The polynomial of degree < deg P congruent to x mod P (x a P-unit or integral).
pub fn residue_mod(x: &RatFunc, p: &Poly) -> Result<Poly> {
    let inv = x.den().inv_mod(p).ok_or(Error::NegativeValuation(-1))?;
    (x.num() * &inv).rem(p)
}

/// Carry normalization: reduces every raw digit mod P and pushes quotients
/// into the next position, until the carry dies out.
pub fn padic_normalize(raw: &[Poly], p: &Poly, start: i64) -> Result<PiAdicStream> {
    if p.is_constant() {
        return Err(Error::Precondition("base must be nonconstant".into()));
    }
    let f = p.field().clone();
    let mut out = Vec::new();
    let mut carry = Poly::zero(&f);
    let mut i = 0;
    while i < raw.len() || !carry.is_zero() {
        let c = raw.get(i).map_or(carry.clone(), |r| r + &carry);
        let (q, r) = c.divmod(p)?;
        out.push(r);
        carry = q;
        i += 1;
    }
    Ok(PiAdicStream::with_gen(p, start, move |k| out.get(k).cloned().unwrap_or_else(|| Poly::zero(&f))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    fn setup() -> (Field, Poly) {
        let f = Field::prime(2).unwrap();
        let p = Poly::from_ints(&f, &[1, 1, 1]);
        (f, p)
    }

    #[test]
    fn carry_example() {
        let (f, p) = setup();
        let s = padic_normalize(&[Poly::from_ints(&f, &[0, 0, 1])], &p, 0).unwrap();
        assert_eq!(s.digit(0), Poly::from_ints(&f, &[1, 1]));
        assert_eq!(s.digit(1), Poly::one(&f));
        assert!(s.digit(2).is_zero());
        let s = padic_normalize(std::slice::from_ref(&p), &p, 0).unwrap();
        assert!(s.digit(0).is_zero());
        assert_eq!(s.digit(1), Poly::one(&f));
    }

    #[test]
    fn normalization_is_idempotent() {
        let (f, p) = setup();
        let raw = vec![Poly::from_ints(&f, &[1, 0, 1, 1, 0, 1]), Poly::from_ints(&f, &[0, 1, 1, 1])];
        let once = padic_normalize(&raw, &p, 0).unwrap().digits(6);
        let twice = padic_normalize(&once, &p, 0).unwrap().digits(6);
        assert_eq!(once, twice);
    }

    #[test]
    fn value_preserved() {
        let (f, p) = setup();
        let raw = vec![Poly::from_ints(&f, &[1, 0, 1, 1, 0, 1]), Poly::from_ints(&f, &[0, 1, 1, 1])];
        let s = padic_normalize(&raw, &p, 0).unwrap();
        let value = &RatFunc::from_poly(raw[0].clone()) + &RatFunc::from_poly(&raw[1] * &p);
        let direct = PiAdicStream::from_ratfunc(&value, &p).unwrap();
        for n in 0..6 {
            assert_eq!(s.digit(n), direct.digit(n));
        }
        assert_eq!(s.partial_sum(6), value);
    }

    #[test]
    fn geometric_in_p() {
        let (f, p) = setup();
        let x = RatFunc::new(Poly::one(&f), &Poly::one(&f) + &p).unwrap();
        let s = PiAdicStream::from_ratfunc(&x, &p).unwrap();
        assert!(s.digits(20).iter().all(|d| d.is_one()));
        let y = RatFunc::new(Poly::one(&f), p.clone()).unwrap();
        assert_eq!(PiAdicStream::from_ratfunc(&y, &p).unwrap().start(), -1);
    }
}
