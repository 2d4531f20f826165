//! Truncated Laurent series in a local parameter t with explicit absolute
//! precision. This is the eager workhorse behind the lazy streams and the
//! digit engines.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Field, Fq};
use crate::poly::Poly;
use crate::ratfunc::RatFunc;

/// Σ_{val ≤ n < prec} c_n t^n + O(t^prec), with `coeffs[i]` the coefficient
/// of t^{val+i}. Leading zeros are allowed; [`Series::normalize`] strips them.
#[derive(Clone, PartialEq, Eq)]
pub struct Series {
    field: Field,
    val: i64,
    coeffs: Vec<Fq>,
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Series(t^{}: {:?} + O(t^{}))",
            self.val,
            self.coeffs.iter().map(|c| c.0).collect::<Vec<_>>(),
            self.prec()
        )
    }
}

impl Series {
    pub fn new(field: &Field, val: i64, coeffs: Vec<Fq>) -> Series {
        Series { field: field.clone(), val, coeffs }
    }

    /// The zero series known to absolute precision `prec`.
    pub fn zero(field: &Field, prec: i64) -> Series {
        Series { field: field.clone(), val: prec, coeffs: Vec::new() }
    }

    /// A polynomial in t, known to absolute precision `prec`.
    pub fn from_poly(p: &Poly, prec: i64) -> Series {
        let f = p.field();
        if prec <= 0 {
            return Series::zero(f, prec);
        }
        let coeffs = (0..prec as usize).map(|i| p.coeff(i)).collect();
        Series::new(f, 0, coeffs)
    }

    /// Expansion of a rational function of t at t = 0 to absolute precision `prec`.
    pub fn from_ratfunc(x: &RatFunc, prec: i64) -> Series {
        let f = x.field();
        if x.is_zero() {
            return Series::zero(f, prec);
        }
        let dv = x.den().low_degree().expect("nonzero") as i64;
        let nv = x.num().low_degree().expect("nonzero") as i64;
        let num = x.num().unshift(nv as usize);
        let den = x.den().unshift(dv as usize);
        let val = nv - dv;
        let len = (prec - val).max(0) as usize;
        let coeffs = poly_series_div(&num, &den, len);
        Series::new(f, val, coeffs)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Start index of the stored coefficients (not necessarily nonzero).
    pub fn start(&self) -> i64 {
        self.val
    }

    pub fn coeffs(&self) -> &[Fq] {
        &self.coeffs
    }

    /// Absolute precision: coefficients are known for exponents below this.
    pub fn prec(&self) -> i64 {
        self.val + self.coeffs.len() as i64
    }

    pub fn coeff(&self, n: i64) -> Fq {
        assert!(n < self.prec(), "coefficient t^{n} beyond precision {}", self.prec());
        if n < self.val {
            Fq::ZERO
        } else {
            self.coeffs[(n - self.val) as usize]
        }
    }

    /// Valuation, or `None` if zero to the known precision.
    pub fn valuation(&self) -> Option<i64> {
        self.coeffs.iter().position(|c| !c.is_zero()).map(|i| self.val + i as i64)
    }

    pub fn is_zero(&self) -> bool {
        self.valuation().is_none()
    }

    /// Strips leading zero coefficients.
    pub fn normalize(mut self) -> Series {
        match self.coeffs.iter().position(|c| !c.is_zero()) {
            Some(0) => self,
            Some(i) => {
                self.coeffs.drain(..i);
                self.val += i as i64;
                self
            }
            None => {
                self.val = self.prec();
                self.coeffs.clear();
                self
            }
        }
    }

    /// Reduces the absolute precision to `prec` (no-op if already lower).
    pub fn truncate(mut self, prec: i64) -> Series {
        if prec < self.prec() {
            if prec <= self.val {
                self.coeffs.clear();
                self.val = prec;
            } else {
                self.coeffs.truncate((prec - self.val) as usize);
            }
        }
        self
    }

    pub fn add(&self, o: &Series) -> Series {
        let f = &self.field;
        let prec = self.prec().min(o.prec());
        let val = self.val.min(o.val).min(prec);
        let len = (prec - val) as usize;
        let coeffs = (0..len)
            .map(|i| {
                let n = val + i as i64;
                let a = if n >= self.val { self.coeffs[(n - self.val) as usize] } else { Fq::ZERO };
                let b = if n >= o.val { o.coeffs[(n - o.val) as usize] } else { Fq::ZERO };
                f.add(a, b)
            })
            .collect();
        Series::new(f, val, coeffs)
    }

    pub fn neg(&self) -> Series {
        let f = &self.field;
        Series::new(f, self.val, self.coeffs.iter().map(|&c| f.neg(c)).collect())
    }

    pub fn sub(&self, o: &Series) -> Series {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: Fq) -> Series {
        let f = &self.field;
        Series::new(f, self.val, self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    /// Multiplies by t^k.
    pub fn shift(&self, k: i64) -> Series {
        Series::new(&self.field, self.val + k, self.coeffs.clone())
    }

    pub fn mul(&self, o: &Series) -> Series {
        let a = self.clone().normalize();
        let b = o.clone().normalize();
        let f = &self.field;
        let val = a.val + b.val;
        // zero factors keep their absolute precision
        if a.coeffs.is_empty() || b.coeffs.is_empty() {
            let prec = match (a.coeffs.is_empty(), b.coeffs.is_empty()) {
                (true, true) => a.prec() + b.prec(),
                (true, false) => a.prec() + b.val,
                _ => a.val + b.prec(),
            };
            return Series::zero(f, prec);
        }
        let len = a.coeffs.len().min(b.coeffs.len());
        Series::new(f, val, mul_trunc(f, &a.coeffs, &b.coeffs, len))
    }

    /// Product of the stored coefficients, treated as exact Laurent
    /// polynomials, to absolute precision `prec`.
    pub fn mul_to(&self, o: &Series, prec: i64) -> Series {
        let f = &self.field;
        let val = self.val + o.val;
        let len = (prec - val).max(0) as usize;
        Series::new(f, val, mul_trunc(f, &self.coeffs, &o.coeffs, len)).truncate(prec)
    }

    /// Pads with zero coefficients (i.e. treats the series as exact) up to
    /// absolute precision `prec`.
    pub fn extend_exact(mut self, prec: i64) -> Series {
        while self.prec() < prec {
            self.coeffs.push(Fq::ZERO);
        }
        self
    }

    /// Multiplication by a polynomial in t (exact, keeps relative precision).
    pub fn mul_poly(&self, p: &Poly) -> Series {
        let f = &self.field;
        if p.is_zero() {
            return Series::zero(f, i64::MAX / 4);
        }
        let low = p.low_degree().unwrap();
        let pc = &p.coeffs()[low..];
        let len = self.coeffs.len();
        Series::new(f, self.val + low as i64, mul_trunc(f, &self.coeffs, pc, len))
    }

    /// Division by a polynomial in t (relative precision is preserved).
    pub fn div_poly(&self, p: &Poly) -> Result<Series> {
        if p.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let low = p.low_degree().unwrap();
        let d = p.unshift(low);
        let len = self.coeffs.len();
        let coeffs = series_div_poly(&self.field, &self.coeffs, &d, len);
        Ok(Series::new(&self.field, self.val - low as i64, coeffs))
    }

    pub fn inv(&self) -> Result<Series> {
        let a = self.clone().normalize();
        if a.coeffs.is_empty() {
            return Err(Error::PossiblyZero(a.prec().max(0) as usize));
        }
        let f = &self.field;
        let len = a.coeffs.len();
        let coeffs = series_inverse(f, &a.coeffs, len);
        Ok(Series::new(f, -a.val, coeffs))
    }

    pub fn div(&self, o: &Series) -> Result<Series> {
        Ok(self.mul(&o.inv()?))
    }

    /// x ↦ x^{p^k} computed coefficientwise (Frobenius).
    pub fn frobenius(&self, k: u32) -> Series {
        let f = &self.field;
        let pk = (f.p() as i64).pow(k);
        if self.coeffs.is_empty() {
            return Series::zero(f, self.prec() * pk);
        }
        let mut coeffs = vec![Fq::ZERO; (self.coeffs.len() - 1) * pk as usize + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[i * pk as usize] = f.pow(c, pk as u64);
        }
        // the known precision is prec * p^k; pad the tail with zeros
        let mut s = Series::new(f, self.val * pk, coeffs);
        let target = self.prec() * pk;
        while s.prec() < target {
            s.coeffs.push(Fq::ZERO);
        }
        s
    }

    pub fn pow(&self, e: u64) -> Series {
        let f = &self.field;
        let mut acc = Series::new(f, 0, vec![Fq::ONE; 1]);
        acc.coeffs.resize(self.coeffs.len().max(1), Fq::ZERO);
        let mut base = self.clone();
        let mut e = e;
        let mut first = true;
        while e > 0 {
            if e & 1 == 1 {
                acc = if first { base.clone() } else { acc.mul(&base) };
                first = false;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// The polynomial in t formed by the coefficients of t^0..t^{k-1}
    /// (requires no negative-exponent terms).
    pub fn to_poly_below(&self, k: i64) -> Poly {
        let f = &self.field;
        Poly::new(f, (0..k.max(0)).map(|n| self.coeff(n)).collect())
    }

    /// Coefficients of t^from .. t^{to-1} as a vector.
    pub fn window(&self, from: i64, to: i64) -> Vec<Fq> {
        (from..to).map(|n| self.coeff(n)).collect()
    }
}

/// First `len` coefficients of a·b for dense coefficient vectors.
pub fn mul_trunc(f: &Field, a: &[Fq], b: &[Fq], len: usize) -> Vec<Fq> {
    let mut out = vec![Fq::ZERO; len];
    if f.q() == 2 {
        // bit-sliced product over F_2
        let pb = pack(b, len);
        let words = len.div_ceil(64);
        let mut acc = vec![0u64; words];
        for (i, &x) in a.iter().enumerate().take(len) {
            if x.is_zero() {
                continue;
            }
            xor_shifted(&mut acc, &pb, i);
        }
        for (i, o) in out.iter_mut().enumerate() {
            *o = Fq(((acc[i / 64] >> (i % 64)) & 1) as u32);
        }
        return out;
    }
    for (i, &x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(len - i) {
            if !y.is_zero() {
                out[i + j] = f.add(out[i + j], f.mul(x, y));
            }
        }
    }
    out
}

fn pack(a: &[Fq], len: usize) -> Vec<u64> {
    let mut w = vec![0u64; len.div_ceil(64)];
    for (i, &c) in a.iter().enumerate().take(len) {
        if !c.is_zero() {
            w[i / 64] |= 1 << (i % 64);
        }
    }
    w
}

/// acc ^= (b << shift), truncated to acc's length.
fn xor_shifted(acc: &mut [u64], b: &[u64], shift: usize) {
    let ws = shift / 64;
    let bs = shift % 64;
    let n = acc.len();
    for (k, &word) in b.iter().enumerate() {
        let idx = k + ws;
        if idx >= n {
            break;
        }
        acc[idx] ^= word << bs;
        if bs != 0 && idx + 1 < n {
            acc[idx + 1] ^= word >> (64 - bs);
        }
    }
    // clear bits beyond the logical length happen implicitly when unpacking
}

/// First `len` coefficients of 1/a, a[0] ≠ 0.
pub fn series_inverse(f: &Field, a: &[Fq], len: usize) -> Vec<Fq> {
    let a0inv = f.inv(a[0]).expect("unit constant term");
    let mut b = Vec::with_capacity(len);
    for k in 0..len {
        let mut s = if k == 0 { Fq::ONE } else { Fq::ZERO };
        for i in 1..=k.min(a.len().saturating_sub(1)) {
            s = f.sub(s, f.mul(a[i], b[k - i]));
        }
        b.push(f.mul(s, a0inv));
    }
    b
}

/// First `len` coefficients of a / d for a polynomial d with d(0) ≠ 0.
pub fn series_div_poly(f: &Field, a: &[Fq], d: &Poly, len: usize) -> Vec<Fq> {
    let dc = d.coeffs();
    let d0inv = f.inv(dc[0]).expect("unit constant term");
    let mut b: Vec<Fq> = Vec::with_capacity(len);
    for k in 0..len {
        let mut s = a.get(k).copied().unwrap_or(Fq::ZERO);
        for i in 1..dc.len().min(k + 1) {
            if !dc[i].is_zero() {
                s = f.sub(s, f.mul(dc[i], b[k - i]));
            }
        }
        b.push(f.mul(s, d0inv));
    }
    b
}

/// First `len` coefficients of num/den (den(0) ≠ 0).
pub fn poly_series_div(num: &Poly, den: &Poly, len: usize) -> Vec<Fq> {
    let f = num.field();
    let a: Vec<Fq> = (0..len).map(|i| num.coeff(i)).collect();
    series_div_poly(f, &a, den, len)
}
