//! Lazy, memoized Laurent series over F_q in z (ascending) or in 1/z
//! (descending).
//!
//! Internally both orientations are series in a local parameter t (t = z or
//! t = 1/z); index n of a descending stream is the coefficient of z^{-n}.
//! A stream is single-threaded: concurrent queries must go through
//! independent clones of the underlying definition.

use std::cell::RefCell;
use std::fmt;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, Fq};
use crate::poly::Poly;
use crate::ratfunc::RatFunc;
use crate::series::{mul_trunc, poly_series_div, Series};

/// Default number of coefficients scanned before a stream is declared
/// "possibly zero".
pub const DEFAULT_ZERO_SCAN: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// F_q((z)), t = z.
    Ascending,
    /// F_q((1/z)), t = 1/z.
    Descending,
}

type Generator = Box<dyn FnMut(&mut Vec<Fq>, usize)>;

struct Inner {
    field: Field,
    orient: Orientation,
    start: i64,
    cache: RefCell<Vec<Fq>>,
    gen: RefCell<Generator>,
}

/// A lazily generated series Σ_{n ≥ start} c_n t^n.
#[derive(Clone)]
pub struct LaurentStream(Rc<Inner>);

impl fmt::Debug for LaurentStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shown: Vec<u32> = (0..8).map(|i| self.coeff(self.start() + i).0).collect();
        write!(f, "LaurentStream({:?}, start {}, {:?}...)", self.0.orient, self.0.start, shown)
    }
}

impl LaurentStream {
    /// A stream whose generator extends the cache to at least the requested
    /// length each time it is called.
    pub fn from_block(
        field: &Field,
        orient: Orientation,
        start: i64,
        gen: impl FnMut(&mut Vec<Fq>, usize) + 'static,
    ) -> LaurentStream {
        LaurentStream(Rc::new(Inner {
            field: field.clone(),
            orient,
            start,
            cache: RefCell::new(Vec::new()),
            gen: RefCell::new(Box::new(gen)),
        }))
    }

    /// A stream defined coefficient by coefficient; the closure receives the
    /// offset k (coefficient of t^{start+k}) and the already computed prefix.
    pub fn from_fn(
        field: &Field,
        orient: Orientation,
        start: i64,
        mut f: impl FnMut(usize, &[Fq]) -> Fq + 'static,
    ) -> LaurentStream {
        LaurentStream::from_block(field, orient, start, move |cache, n| {
            while cache.len() < n {
                let k = cache.len();
                let c = f(k, cache);
                cache.push(c);
            }
        })
    }

    /// Finitely many coefficients starting at t^start, then zeros.
    pub fn from_coeffs(field: &Field, orient: Orientation, start: i64, coeffs: Vec<Fq>) -> LaurentStream {
        LaurentStream::from_fn(field, orient, start, move |k, _| coeffs.get(k).copied().unwrap_or(Fq::ZERO))
    }

    pub fn zero(field: &Field, orient: Orientation) -> LaurentStream {
        LaurentStream::from_coeffs(field, orient, 0, Vec::new())
    }

    pub fn constant(field: &Field, orient: Orientation, c: Fq) -> LaurentStream {
        LaurentStream::from_coeffs(field, orient, 0, vec![c])
    }

    /// The image of a rational function of z in F_q((z)) or F_q((1/z)).
    pub fn from_ratfunc(x: &RatFunc, orient: Orientation) -> LaurentStream {
        let f = x.field().clone();
        if x.is_zero() {
            return LaurentStream::zero(&f, orient);
        }
        let in_t = match orient {
            Orientation::Ascending => x.clone(),
            Orientation::Descending => x.invert_variable(),
        };
        let nv = in_t.num().low_degree().unwrap();
        let dv = in_t.den().low_degree().unwrap();
        let num = in_t.num().unshift(nv);
        let den = in_t.den().unshift(dv);
        let start = nv as i64 - dv as i64;
        LaurentStream::from_block(&f, orient, start, move |cache, n| {
            if cache.len() < n {
                let target = n.max(2 * cache.len());
                *cache = poly_series_div(&num, &den, target);
            }
        })
    }

    /// A polynomial in z viewed in the given orientation.
    pub fn from_poly(p: &Poly, orient: Orientation) -> LaurentStream {
        LaurentStream::from_ratfunc(&RatFunc::from_poly(p.clone()), orient)
    }

    /// Wraps a truncated series; coefficients beyond its precision are zero.
    pub fn from_series(s: &Series, orient: Orientation) -> LaurentStream {
        LaurentStream::from_coeffs(s.field(), orient, s.start(), s.coeffs().to_vec())
    }

    pub fn field(&self) -> &Field {
        &self.0.field
    }

    pub fn orientation(&self) -> Orientation {
        self.0.orient
    }

    /// Declared lower bound: coefficients below it are zero.
    pub fn start(&self) -> i64 {
        self.0.start
    }

    fn ensure(&self, len: usize) {
        if self.0.cache.borrow().len() >= len {
            return;
        }
        let mut gen = self.0.gen.borrow_mut();
        let mut cache = self.0.cache.borrow_mut();
        gen(&mut cache, len);
    }

    /// Coefficient of t^n.
    pub fn coeff(&self, n: i64) -> Fq {
        if n < self.0.start {
            return Fq::ZERO;
        }
        let k = (n - self.0.start) as usize;
        self.ensure(k + 1);
        self.0.cache.borrow()[k]
    }

    /// Coefficients of t^start .. t^{prec-1}.
    pub fn prefix(&self, prec: i64) -> Vec<Fq> {
        if prec <= self.0.start {
            return Vec::new();
        }
        let len = (prec - self.0.start) as usize;
        self.ensure(len);
        self.0.cache.borrow()[..len].to_vec()
    }

    /// Truncation to absolute precision `prec`.
    pub fn truncate(&self, prec: i64) -> Series {
        if prec <= self.0.start {
            return Series::zero(self.field(), prec);
        }
        Series::new(self.field(), self.0.start, self.prefix(prec))
    }

    /// First nonzero index within `depth` coefficients of the start.
    pub fn valuation_within(&self, depth: usize) -> Option<i64> {
        let s = self.0.start;
        (0..depth as i64).map(|k| s + k).find(|&n| !self.coeff(n).is_zero())
    }

    pub fn valuation(&self) -> Option<i64> {
        self.valuation_within(DEFAULT_ZERO_SCAN)
    }

    fn check(&self, o: &LaurentStream) -> Result<()> {
        if self.0.orient != o.0.orient {
            return Err(Error::OrientationMismatch);
        }
        if self.field() != o.field() {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    pub fn add(&self, o: &LaurentStream) -> Result<LaurentStream> {
        self.check(o)?;
        let (a, b) = (self.clone(), o.clone());
        let start = a.start().min(b.start());
        let f = self.field().clone();
        Ok(LaurentStream::from_fn(&f.clone(), self.0.orient, start, move |k, _| {
            let n = start + k as i64;
            f.add(a.coeff(n), b.coeff(n))
        }))
    }

    pub fn neg(&self) -> LaurentStream {
        let a = self.clone();
        let f = self.field().clone();
        LaurentStream::from_fn(&f.clone(), self.0.orient, self.start(), move |k, _| {
            f.neg(a.coeff(a.start() + k as i64))
        })
    }

    pub fn sub(&self, o: &LaurentStream) -> Result<LaurentStream> {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: Fq) -> LaurentStream {
        let a = self.clone();
        let f = self.field().clone();
        LaurentStream::from_fn(&f.clone(), self.0.orient, self.start(), move |k, _| {
            f.mul(c, a.coeff(a.start() + k as i64))
        })
    }

    /// Multiplication by t^k.
    pub fn shift(&self, k: i64) -> LaurentStream {
        let a = self.clone();
        LaurentStream::from_fn(self.field(), self.0.orient, self.start() + k, move |i, _| a.coeff(a.start() + i as i64))
    }

    /// Cauchy product; computed in doubling blocks.
    pub fn mul(&self, o: &LaurentStream) -> Result<LaurentStream> {
        self.check(o)?;
        let (a, b) = (self.clone(), o.clone());
        let f = self.field().clone();
        let start = a.start() + b.start();
        Ok(LaurentStream::from_block(&f.clone(), self.0.orient, start, move |cache, n| {
            if cache.len() < n {
                let len = n.max(2 * cache.len()).max(16);
                let pa = a.prefix(a.start() + len as i64);
                let pb = b.prefix(b.start() + len as i64);
                *cache = mul_trunc(&f, &pa, &pb, len);
            }
        }))
    }

    /// Multiplicative inverse, scanning at most `depth` coefficients for the
    /// leading term.
    pub fn inv_with_depth(&self, depth: usize) -> Result<LaurentStream> {
        let v = self.valuation_within(depth).ok_or(Error::PossiblyZero(depth))?;
        let a = self.clone();
        let f = self.field().clone();
        let a0inv = f.inv(a.coeff(v)).expect("nonzero leading coefficient");
        Ok(LaurentStream::from_fn(&f.clone(), self.0.orient, -v, move |k, prefix| {
            let mut s = if k == 0 { Fq::ONE } else { Fq::ZERO };
            for i in 1..=k {
                let ai = a.coeff(v + i as i64);
                if !ai.is_zero() {
                    s = f.sub(s, f.mul(ai, prefix[k - i]));
                }
            }
            f.mul(s, a0inv)
        }))
    }

    pub fn inv(&self) -> Result<LaurentStream> {
        self.inv_with_depth(DEFAULT_ZERO_SCAN)
    }

    pub fn div(&self, o: &LaurentStream) -> Result<LaurentStream> {
        self.mul(&o.inv()?)
    }

    /// x ↦ x^{p^k}.
    pub fn frobenius(&self, k: u32) -> LaurentStream {
        let a = self.clone();
        let f = self.field().clone();
        let pk = (f.p() as i64).pow(k);
        let start = a.start() * pk;
        LaurentStream::from_fn(&f.clone(), self.0.orient, start, move |i, _| {
            let n = start + i as i64;
            if n.rem_euclid(pk) == 0 {
                f.pow(a.coeff(n / pk), pk as u64)
            } else {
                Fq::ZERO
            }
        })
    }

    /// Multiplication by a rational function of z (in this orientation).
    pub fn mul_ratfunc(&self, x: &RatFunc) -> Result<LaurentStream> {
        self.mul(&LaurentStream::from_ratfunc(x, self.0.orient))
    }

    /// Integer and fractional parts of a descending stream:
    /// [x] = Σ_{n ≤ 0} c_n z^{-n} as a polynomial in z, {x} = Σ_{n > 0}.
    pub fn int_frac_split(&self) -> Result<(Poly, LaurentStream)> {
        if self.0.orient != Orientation::Descending {
            return Err(Error::Precondition("integer part needs a descending stream".into()));
        }
        let f = self.field();
        let s = self.start();
        let mut ip = Vec::new();
        if s <= 0 {
            ip = vec![Fq::ZERO; (-s + 1) as usize];
            for n in s..=0 {
                ip[(-n) as usize] = self.coeff(n);
            }
        }
        let a = self.clone();
        let frac_start = s.max(1);
        let frac =
            LaurentStream::from_fn(f, Orientation::Descending, frac_start, move |i, _| a.coeff(frac_start + i as i64));
        Ok((Poly::new(f, ip), frac))
    }

    /// Forces the first `n` coefficients into a standalone stream that no
    /// longer references its definition beyond them (zeros after).
    pub fn freeze(&self, prec: i64) -> LaurentStream {
        LaurentStream::from_series(&self.truncate(prec), self.0.orient)
    }
}

/// Agreement of all coefficients of t^n for n ≤ `prec` (the only equality
/// offered on lazy streams).
pub fn stream_eq(a: &LaurentStream, b: &LaurentStream, prec: i64) -> Result<bool> {
    a.check(b)?;
    let lo = a.start().min(b.start());
    Ok((lo..=prec).all(|n| a.coeff(n) == b.coeff(n)))
}
