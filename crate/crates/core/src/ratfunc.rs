//! Rational functions over F_q in lowest terms with monic denominator, and
//! the valuations of F_q(z) used by the expansion models.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::field::{Field, Fq};
use crate::poly::{Degree, Poly};

/// Valuation value: an integer or +∞ (for zero).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Val {
    Fin(i64),
    Inf,
}

impl Val {
    pub fn finite(self) -> Option<i64> {
        match self {
            Val::Fin(v) => Some(v),
            Val::Inf => None,
        }
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Fin(v) => write!(f, "{v}"),
            Val::Inf => f.write_str("inf"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFunc({self})")
    }
}

impl RatFunc {
    /// num/den reduced to lowest terms with monic denominator.
    pub fn new(num: Poly, den: Poly) -> Result<RatFunc> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let field = num.field().clone();
        if num.is_zero() {
            return Ok(RatFunc { num, den: Poly::one(&field) });
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = if g.is_one() { (num, den) } else { (num.div_exact(&g)?, den.div_exact(&g)?) };
        let li = field.inv(d.lead()).expect("nonzero");
        if li != Fq::ONE {
            n = n.scale(li);
            d = d.scale(li);
        }
        Ok(RatFunc { num: n, den: d })
    }

    pub fn from_poly(p: Poly) -> RatFunc {
        let f = p.field().clone();
        RatFunc { num: p, den: Poly::one(&f) }
    }

    pub fn zero(field: &Field) -> RatFunc {
        RatFunc::from_poly(Poly::zero(field))
    }

    pub fn one(field: &Field) -> RatFunc {
        RatFunc::from_poly(Poly::one(field))
    }

    pub fn constant(field: &Field, c: Fq) -> RatFunc {
        RatFunc::from_poly(Poly::constant(field, c))
    }

    pub fn z(field: &Field) -> RatFunc {
        RatFunc::from_poly(Poly::z(field))
    }

    pub fn field(&self) -> &Field {
        self.num.field()
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        self.is_poly().then_some(&self.num)
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn add_ref(&self, o: &RatFunc) -> RatFunc {
        if self.den == o.den {
            return RatFunc::new(&self.num + &o.num, self.den.clone()).expect("nonzero den");
        }
        RatFunc::new(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den).expect("nonzero den")
    }

    pub fn sub_ref(&self, o: &RatFunc) -> RatFunc {
        self.add_ref(&o.neg_ref())
    }

    pub fn neg_ref(&self) -> RatFunc {
        RatFunc { num: self.num.neg_ref(), den: self.den.clone() }
    }

    pub fn mul_ref(&self, o: &RatFunc) -> RatFunc {
        RatFunc::new(&self.num * &o.num, &self.den * &o.den).expect("nonzero den")
    }

    pub fn inv(&self) -> Result<RatFunc> {
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    pub fn div_ref(&self, o: &RatFunc) -> Result<RatFunc> {
        if o.is_zero() {
            return Err(Error::DivisionByZero);
        }
        RatFunc::new(&self.num * &o.den, &self.den * &o.num)
    }

    pub fn scale(&self, c: Fq) -> RatFunc {
        RatFunc::new(self.num.scale(c), self.den.clone()).expect("nonzero den")
    }

    pub fn mul_poly(&self, p: &Poly) -> RatFunc {
        RatFunc::new(&self.num * p, self.den.clone()).expect("nonzero den")
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, e: i64) -> Result<RatFunc> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let k = e.unsigned_abs();
        Ok(RatFunc { num: base.num.pow(k), den: base.den.pow(k) })
    }

    /// P-adic valuation for an irreducible P.
    pub fn val_p(&self, p: &Poly) -> Result<Val> {
        if !p.is_irreducible() {
            return Err(Error::Reducible(p.to_string()));
        }
        Ok(self.val_p_unchecked(p))
    }

    /// P-adic valuation without re-checking irreducibility of P.
    pub fn val_p_unchecked(&self, p: &Poly) -> Val {
        if self.is_zero() {
            return Val::Inf;
        }
        Val::Fin(poly_val(&self.num, p) as i64 - poly_val(&self.den, p) as i64)
    }

    /// Order of vanishing at z = 0.
    pub fn val_z(&self) -> Val {
        match (self.num.low_degree(), self.den.low_degree()) {
            (None, _) => Val::Inf,
            (Some(a), Some(b)) => Val::Fin(a as i64 - b as i64),
            (Some(_), None) => unreachable!("denominator nonzero"),
        }
    }

    /// The valuation at infinity, -deg = deg den - deg num.
    pub fn val_deg(&self) -> Val {
        if self.is_zero() {
            return Val::Inf;
        }
        Val::Fin(self.den.degree_or_neg() - self.num.degree_or_neg())
    }

    /// Degree of the map z ↦ x(z), which is [F_q(z) : F_q(x)].
    pub fn rat_degree(&self) -> Result<usize> {
        if self.is_constant() {
            return Err(Error::ConstantMap);
        }
        Ok(self.num.deg().max(self.den.deg()).finite().expect("nonzero"))
    }

    /// Composition self(y(z)).
    pub fn compose(&self, y: &RatFunc) -> RatFunc {
        let k = self.num.deg().max(self.den.deg()).finite().unwrap_or(0);
        let f = self.field();
        let (a, b) = (&y.num, &y.den);
        let mut apow = vec![Poly::one(f)];
        let mut bpow = vec![Poly::one(f)];
        for i in 1..=k {
            apow.push(&apow[i - 1] * a);
            bpow.push(&bpow[i - 1] * b);
        }
        let hom = |p: &Poly| -> Poly {
            let mut acc = Poly::zero(f);
            for (i, &c) in p.coeffs().iter().enumerate() {
                if !c.is_zero() {
                    acc = &acc + &(&apow[i] * &bpow[k - i]).scale(c);
                }
            }
            acc
        };
        RatFunc::new(hom(&self.num), hom(&self.den)).expect("composition with nonconstant map has nonzero denominator")
    }

    /// x(1/z) as a rational function.
    pub fn invert_variable(&self) -> RatFunc {
        let z_inv = RatFunc::z(self.field()).inv().expect("z nonzero");
        self.compose(&z_inv)
    }

    pub fn format_var(&self, var: &str) -> String {
        if self.den.is_one() {
            return self.num.format_var(var);
        }
        let wrap = |p: &Poly| {
            let s = p.format_var(var);
            if p.weight() > 1 || (p.weight() == 1 && p.lead() != Fq::ONE && p.deg() != Degree::Fin(0)) {
                format!("({s})")
            } else {
                s
            }
        };
        format!("{}/{}", wrap(&self.num), wrap(&self.den))
    }
}

/// Multiplicity of irreducible `p` in nonzero `a`.
fn poly_val(a: &Poly, p: &Poly) -> usize {
    let mut k = 0;
    let mut cur = a.clone();
    loop {
        let (q, r) = cur.divmod(p).expect("p nonzero");
        if !r.is_zero() || cur.is_zero() {
            return k;
        }
        k += 1;
        cur = q;
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_var("z"))
    }
}

impl Add<&RatFunc> for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        self.add_ref(rhs)
    }
}
impl Sub<&RatFunc> for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self.sub_ref(rhs)
    }
}
impl Mul<&RatFunc> for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        self.mul_ref(rhs)
    }
}
impl Div<&RatFunc> for &RatFunc {
    type Output = RatFunc;
    /// Panics on division by zero; use [`RatFunc::div_ref`] for a checked version.
    fn div(self, rhs: &RatFunc) -> RatFunc {
        self.div_ref(rhs).expect("division by zero rational function")
    }
}
impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        self.neg_ref()
    }
}
