//! β-expansions of formal Laurent series in F_q((1/z)).
//!
//! For β of degree d > 0 and x ∈ F_q[[1/z]], T(x) = βx − [βx] and
//! a_n = [β·T^{n−1}x], so that x = a_1/β + a_2/β² + ⋯. The bridge to the
//! (Γ_d, π = 1/β) setting expands y = βx/z^{d−1} − c·z, where c is the z^d
//! coefficient of a_1; its digit at π^{n−1} is a_n/z^{d−1} for n ≥ 2 and
//! (a_1 − c·z^d)/z^{d−1} for n = 1.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebraic::{hensel_root, AlgebraicSpec};
use crate::automata::Dfao;
use crate::christol::{span_christol_from, SpanChristol};
use crate::error::{Error, Result};
use crate::expand::{expand_from, DigitExpansion};
use crate::field::{Field, Fq};
use crate::poly::Poly;
use crate::ratfunc::RatFunc;
use crate::residue::{check_complete, span_system_prime, BaseContext, Element, Model, ResidueSystem};
use crate::series::Series;
use crate::stream::{LaurentStream, Orientation, DEFAULT_ZERO_SCAN};

/// β, its degree d, and the digit system Γ_d = {c_0 + c_1/z + ⋯ + c_{d−1}/z^{d−1}}
/// for π = 1/β in F_q((1/z)).
#[derive(Clone, Debug)]
pub struct BetaContext {
    beta: LaurentStream,
    d: usize,
    spec: Option<AlgebraicSpec>,
    system: ResidueSystem,
}

impl BetaContext {
    /// β given as a descending stream; `spec` enables automata.
    pub fn new(beta: LaurentStream, spec: Option<AlgebraicSpec>) -> Result<BetaContext> {
        if beta.orientation() != Orientation::Descending {
            return Err(Error::OrientationMismatch);
        }
        let v = beta.valuation_within(DEFAULT_ZERO_SCAN).ok_or(Error::PossiblyZero(DEFAULT_ZERO_SCAN))?;
        if v >= 0 {
            return Err(Error::Precondition(format!("deg beta = {} must be positive", -v)));
        }
        let d = (-v) as usize;
        let field = beta.field().clone();
        let pi = Element::stream(beta.inv()?, "1/beta");
        let ctx = BaseContext::new(Model::Vdeg, pi)?;
        let zinv = RatFunc::z(&field).inv()?;
        let (p, m) = (field.p(), field.m());
        let gens: Vec<Element> = (0..d as i64)
            .flat_map(|i| {
                let zi = zinv.pow(i).expect("nonzero");
                (0..m).map(move |j| zi.scale(Fq(p.pow(j))))
            })
            .map(Element::Rat)
            .collect();
        let system = span_system_prime(&gens, ctx)?;
        if !check_complete(system.reps(), system.ctx())? {
            return Err(Error::Verification(format!("Γ_{d} is not complete modulo 1/beta")));
        }
        Ok(BetaContext { beta, d, spec, system })
    }

    pub fn from_spec(spec: &AlgebraicSpec) -> Result<BetaContext> {
        if spec.orientation != Orientation::Descending {
            return Err(Error::Precondition("beta must be given in the 1/z orientation".into()));
        }
        BetaContext::new(hensel_root(spec)?, Some(spec.clone()))
    }

    pub fn field(&self) -> &Field {
        self.beta.field()
    }

    pub fn beta(&self) -> &LaurentStream {
        &self.beta
    }

    /// deg β.
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn spec(&self) -> Option<&AlgebraicSpec> {
        self.spec.as_ref()
    }

    /// Γ_d with π = 1/β.
    pub fn system(&self) -> &ResidueSystem {
        &self.system
    }

    /// Operations available for this β.
    pub fn capabilities(&self) -> Vec<&'static str> {
        let mut c = vec!["t_map", "d_beta", "bridge"];
        if self.spec.is_some() {
            c.push("beta_automaton");
        }
        c
    }
}

fn check_x(x: &LaurentStream) -> Result<()> {
    if x.orientation() != Orientation::Descending {
        return Err(Error::OrientationMismatch);
    }
    if let Some(n) = (x.start()..0).find(|&n| !x.coeff(n).is_zero()) {
        return Err(Error::Precondition(format!("x has degree {} > 0", -n)));
    }
    Ok(())
}

/// T(x) = βx − [βx].
pub fn t_map(x: &LaurentStream, ctx: &BetaContext) -> Result<LaurentStream> {
    check_x(x)?;
    Ok(ctx.beta.mul(x)?.int_frac_split()?.1)
}

/// The first N digits a_1, …, a_N of d_β(x).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BetaExpansion {
    pub d: usize,
    pub digits: Vec<Poly>,
}

impl BetaExpansion {
    /// a_n for 1 ≤ n ≤ N.
    pub fn digit(&self, n: usize) -> &Poly {
        &self.digits[n - 1]
    }

    /// Output codes n ↦ a_n (a_0 = 0), see [`digit_code`].
    pub fn codes(&self) -> Vec<usize> {
        std::iter::once(0).chain(self.digits.iter().map(|a| digit_code(a, self.d))).collect()
    }

    /// deg a_1 ≤ d and deg a_n < d for n ≥ 2.
    pub fn degree_bound_holds(&self) -> bool {
        self.digits.iter().enumerate().all(|(i, a)| {
            let bound = if i == 0 { self.d as i64 } else { self.d as i64 - 1 };
            a.degree_or_neg() <= bound
        })
    }
}

impl fmt::Display for BetaExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.digits {
            writeln!(f, "{a}")?;
        }
        Ok(())
    }
}

/// a = Σ c_i z^i (i ≤ d) ↦ Σ code(c_i)·q^i.
pub fn digit_code(a: &Poly, d: usize) -> usize {
    let q = a.field().q() as usize;
    (0..=d).rev().fold(0, |acc, i| acc * q + a.coeff(i).0 as usize)
}

/// Inverse of [`digit_code`].
pub fn code_digit(f: &Field, code: usize) -> Poly {
    let q = f.q() as usize;
    let mut c = Vec::new();
    let mut k = code;
    while k > 0 {
        c.push(Fq((k % q) as u32));
        k /= q;
    }
    Poly::new(f, c)
}

fn descending_series(p: &Poly, prec: i64) -> Series {
    let f = p.field();
    if p.is_zero() {
        return Series::zero(f, prec);
    }
    let deg = p.degree_or_neg();
    let coeffs =
        (0..(prec + deg).max(0)).map(|k| if k <= deg { p.coeff((deg - k) as usize) } else { Fq::ZERO }).collect();
    Series::new(f, -deg, coeffs)
}

fn digits_at(x: &LaurentStream, beta: &LaurentStream, d: usize, n: usize, prec: i64) -> Option<Vec<Poly>> {
    let f = x.field();
    let b = beta.truncate(prec);
    let mut t = x.truncate(prec);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let y = b.mul(&t);
        if y.prec() <= 1 {
            return None;
        }
        let ip: Vec<Fq> = (0..=d as i64).map(|k| y.coeff(-k)).collect();
        out.push(Poly::new(f, ip));
        let frac: Vec<Fq> = (1..y.prec()).map(|k| y.coeff(k)).collect();
        t = Series::new(f, 1, frac);
    }
    Some(out)
}

/// d_β(x) to N digits.
pub fn d_beta(x: &LaurentStream, ctx: &BetaContext, n: usize) -> Result<BetaExpansion> {
    check_x(x)?;
    let d = ctx.d;
    let mut prec = ((n + 2) * d + 16) as i64;
    loop {
        if let Some(digits) = digits_at(x, &ctx.beta, d, n, prec) {
            return Ok(BetaExpansion { d, digits });
        }
        prec *= 2;
    }
}

fn degree(x: &RatFunc) -> i64 {
    x.num().degree_or_neg() - x.den().degree_or_neg()
}

/// Exact T-orbit of a rational x for algebraic β: iterates are kept as
/// Σ c_j β^j with c_j ∈ F_q(z), j < deg_w R.
struct ExactOrbit {
    monic: Vec<RatFunc>,
    beta: LaurentStream,
    d: usize,
}

impl ExactOrbit {
    fn new(ctx: &BetaContext) -> Result<ExactOrbit> {
        let spec = ctx
            .spec
            .as_ref()
            .ok_or_else(|| Error::Unsupported("exact orbits need beta as an algebraic specification".into()))?;
        let r = &spec.r;
        let lead = RatFunc::from_poly(r.coeffs()[r.degree_w()].clone()).inv()?;
        let monic = r.coeffs().iter().map(|c| RatFunc::from_poly(c.clone()).mul_ref(&lead)).collect();
        Ok(ExactOrbit { monic, beta: ctx.beta.clone(), d: ctx.d })
    }

    fn h(&self) -> usize {
        self.monic.len() - 1
    }

    fn times_beta(&self, c: &[RatFunc]) -> Vec<RatFunc> {
        let h = self.h();
        let f = self.monic[0].field();
        let mut out = vec![RatFunc::zero(f); h];
        let top = &c[h - 1];
        for j in 0..h {
            let lower = if j > 0 { c[j - 1].clone() } else { RatFunc::zero(f) };
            out[j] = lower.sub_ref(&top.mul_ref(&self.monic[j]));
        }
        out
    }

    /// [Σ c_j β^j] as a polynomial in z.
    fn int_part(&self, c: &[RatFunc]) -> Poly {
        let f = self.monic[0].field().clone();
        let mut y = Series::zero(&f, 1);
        for (j, cj) in c.iter().enumerate() {
            if cj.is_zero() {
                continue;
            }
            let vc = -degree(cj);
            let v = vc - (j * self.d) as i64;
            let rel = 1 - v;
            if rel <= 0 {
                continue;
            }
            let cs = crate::algebraic::ratfunc_series(cj, Orientation::Descending, vc + rel);
            let mut bj = Series::from_poly(&Poly::one(&f), rel);
            let bs = self.beta.truncate(-(self.d as i64) + rel);
            for _ in 0..j {
                bj = bj.mul(&bs);
            }
            y = y.add(&cs.mul(&bj).truncate(1));
        }
        let ip: Vec<Fq> = (0..=-y.start().min(0)).map(|k| y.coeff(-k)).collect();
        Poly::new(&f, ip)
    }
}

/// Eventually periodic β-expansion: a_{n+L} = a_n for n ≥ `preperiod`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BetaCertificate {
    pub preperiod: usize,
    pub period: usize,
    /// a_1, …, a_{preperiod + period − 1}.
    pub digits: Vec<Poly>,
}

impl BetaCertificate {
    /// a_n for n ≥ 1.
    pub fn digit(&self, n: usize) -> &Poly {
        let k = if n < self.preperiod { n } else { self.preperiod + (n - self.preperiod) % self.period };
        &self.digits[k - 1]
    }

    pub fn expansion(&self, d: usize, n: usize) -> BetaExpansion {
        BetaExpansion { d, digits: (1..=n).map(|k| self.digit(k).clone()).collect() }
    }
}

type Orbit = (Vec<Poly>, Option<(usize, usize)>);

fn exact_orbit(x: &RatFunc, ctx: &BetaContext, limit: usize) -> Result<Orbit> {
    if degree(x) > 0 {
        return Err(Error::Precondition(format!("x has degree {} > 0", degree(x))));
    }
    let orbit = ExactOrbit::new(ctx)?;
    let f = x.field().clone();
    let mut t = vec![RatFunc::zero(&f); orbit.h()];
    t[0] = x.clone();
    let mut seen = std::collections::HashMap::new();
    seen.insert(t.clone(), 0usize);
    let mut digits = Vec::new();
    for k in 1..=limit {
        let y = orbit.times_beta(&t);
        let a = orbit.int_part(&y);
        t = y;
        t[0] = t[0].sub_ref(&RatFunc::from_poly(a.clone()));
        digits.push(a);
        if let Some(&j) = seen.get(&t) {
            return Ok((digits, Some((j + 1, k - j))));
        }
        seen.insert(t.clone(), k);
    }
    Ok((digits, None))
}

/// Iterates T exactly on a rational x ∈ F_q[[1/z]] until an iterate
/// repeats (at most `cap` steps).
pub fn beta_period_exact(x: &RatFunc, ctx: &BetaContext, cap: usize) -> Result<BetaCertificate> {
    match exact_orbit(x, ctx, cap)? {
        (digits, Some((preperiod, period))) => Ok(BetaCertificate { preperiod, period, digits }),
        (_, None) => Err(Error::StateCap(cap)),
    }
}

/// d_β(x) for rational x: exact orbit arithmetic when β is algebraic,
/// truncated series otherwise.
pub fn d_beta_rational(x: &RatFunc, ctx: &BetaContext, n: usize) -> Result<BetaExpansion> {
    if ctx.spec.is_none() {
        return d_beta(&LaurentStream::from_ratfunc(x, Orientation::Descending), ctx, n);
    }
    match exact_orbit(x, ctx, n)? {
        (digits, Some((preperiod, period))) => Ok(BetaCertificate { preperiod, period, digits }.expansion(ctx.d, n)),
        (digits, None) => Ok(BetaExpansion { d: ctx.d, digits }),
    }
}

/// Valuation (−deg) of x − Σ_{n ≤ N} a_n β^{−n}, computed to precision
/// `prec`; `None` if it vanishes there.
pub fn reconstruction_valuation(
    x: &LaurentStream,
    ctx: &BetaContext,
    e: &BetaExpansion,
    prec: i64,
) -> Result<Option<i64>> {
    let f = ctx.field();
    let d = ctx.d as i64;
    let pi = ctx.beta.truncate(prec + 2 * d).inv()?;
    let mut acc = Series::zero(f, prec + d);
    for a in e.digits.iter().rev() {
        acc = acc.add(&descending_series(a, prec + d)).mul(&pi);
    }
    let r = x.truncate(prec).sub(&acc).truncate(prec);
    Ok(r.valuation())
}

/// y = βx/z^{d−1} − c·z, the element expanded by the bridge.
pub fn bridge_element(x: &LaurentStream, ctx: &BetaContext) -> Result<(LaurentStream, Fq)> {
    check_x(x)?;
    let d = ctx.d as i64;
    let bx = ctx.beta.mul(x)?;
    let c = bx.coeff(-d);
    let y =
        bx.shift(d - 1).sub(&LaurentStream::from_poly(&Poly::monomial(ctx.field(), c, 1), Orientation::Descending))?;
    Ok((y, c))
}

/// The (Γ_d, 1/β)-expansion of the bridge element, checked digit-for-digit
/// against d_β(x) for N digits.
#[derive(Clone, Debug)]
pub struct Bridge {
    pub expansion: DigitExpansion,
    /// The z^d coefficient of a_1.
    pub correction: Fq,
    pub checked: usize,
}

/// a_n/z^{d−1} (a_1 corrected by c·z^d) as an element of Γ_d.
pub fn bridge_digit(a: &Poly, n: usize, c: Fq, d: usize) -> Result<RatFunc> {
    let f = a.field();
    let a = if n == 1 { a.sub_ref(&Poly::monomial(f, c, d)) } else { a.clone() };
    RatFunc::from_poly(a).div_ref(&RatFunc::z(f).pow(d as i64 - 1)?)
}

pub fn bridge(x: &LaurentStream, ctx: &BetaContext, n: usize) -> Result<Bridge> {
    let (y, c) = bridge_element(x, ctx)?;
    let exp = expand_from(&Element::stream(y, "beta*x/z^(d-1) - c*z"), &ctx.system, 0)?;
    let db = d_beta(x, ctx, n)?;
    if !db.degree_bound_holds() {
        return Err(Error::Verification("digit degree bound violated".into()));
    }
    let got = exp.digit_elements(n)?;
    for (k, g) in got.iter().enumerate() {
        let want = bridge_digit(db.digit(k + 1), k + 1, c, ctx.d)?;
        if g.as_rat() != Some(&want) {
            return Err(Error::Verification(format!("bridge digit at pi^{k} is {g}, expected {want}")));
        }
    }
    Ok(Bridge { expansion: exp, correction: c, checked: n })
}

/// Automaton for n ↦ code(a_n) (a_0 = 0) with its construction data.
#[derive(Clone, Debug)]
pub struct BetaAutomaton {
    pub dfao: Dfao,
    pub d: usize,
    pub construction: SpanChristol,
}

impl BetaAutomaton {
    /// One automaton per coefficient of z^i in a_n, i = 0..=d.
    pub fn coordinates(&self) -> Vec<Dfao> {
        let fq = self.construction.expansion.system().field().q() as usize;
        (0..=self.d).map(|i| self.dfao.map_outputs(|c| (c / fq.pow(i as u32)) % fq).minimize()).collect()
    }
}

/// A p-automaton for d_β(x), via the bridge and
/// the span construction on Γ_d, checked against d_β(x) for N digits.
pub fn beta_automaton(x: &AlgebraicSpec, ctx: &BetaContext, n: usize) -> Result<BetaAutomaton> {
    if ctx.spec.is_none() {
        return Err(Error::Unsupported("beta_automaton needs beta as an algebraic specification".into()));
    }
    if x.orientation != Orientation::Descending {
        return Err(Error::Precondition("x must be given in the 1/z orientation".into()));
    }
    let xs = hensel_root(x)?;
    let (y, _) = bridge_element(&xs, ctx)?;
    let construction = span_christol_from(&Element::stream(y, "beta*x/z^(d-1) - c*z"), &ctx.system, 0, n)?;
    let db = d_beta(&xs, ctx, n.max(1))?;
    let d = ctx.d;
    let field = ctx.field().clone();
    let zd1 = RatFunc::z(&field).pow(d as i64 - 1)?;
    let reps = ctx.system.reps().to_vec();
    let codes: Vec<usize> = reps
        .iter()
        .map(|r| {
            let a = r.as_rat().expect("rational digits").mul_ref(&zd1);
            a.as_poly()
                .map(|p| digit_code(p, d))
                .ok_or_else(|| Error::Verification(format!("digit {r} times z^(d-1) is not a polynomial")))
        })
        .collect::<Result<_>>()?;
    let m = construction
        .dfao
        .map_outputs(|i| codes[i])
        .override_zero(digit_code(db.digit(1), d))
        .shift_by_one(0)
        .minimize();
    let want = db.codes();
    if let Some(k) = (0..want.len()).find(|&k| m.eval(k as u64) != want[k]) {
        return Err(Error::Verification(format!("automaton disagrees with a_{k}")));
    }
    Ok(BetaAutomaton { dfao: m, d, construction })
}

/// JSON form of a digit run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BetaDigitsFile {
    pub d: usize,
    pub digits: Vec<String>,
}

impl From<&BetaExpansion> for BetaDigitsFile {
    fn from(e: &BetaExpansion) -> Self {
        BetaDigitsFile { d: e.d, digits: e.digits.iter().map(|a| a.to_string()).collect() }
    }
}
