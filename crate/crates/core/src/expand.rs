//! Greedy (Γ, π)-digit extraction, eventual periodicity, property A and the
//! aperiodicity witness.
//!
//! Digits of x are produced by the remainder recursion r_m = x·π^{−m},
//! a_n = the element of Γ congruent to r_n, r_{n+1} = (r_n − a_n)/π. For
//! rational data the remainders are kept exactly; otherwise they are series
//! truncations in the local parameter t.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Fq;
use crate::pialgebra::PiAlgebra;
use crate::poly::Poly;
use crate::ratfunc::{RatFunc, Val};
use crate::residue::{twist_system, BaseContext, Element, Model, ResidueSystem};
use crate::series::Series;
use crate::stream::{LaurentStream, Orientation, DEFAULT_ZERO_SCAN};

/// Default cap on distinct remainders for exact period detection.
pub const DEFAULT_STATE_CAP: usize = 1_000_000;

const SLACK: i64 = 8;

type DigitGen = Box<dyn FnMut(&mut Vec<usize>, usize) -> Result<()>>;

struct Lazy {
    cache: RefCell<Vec<usize>>,
    gen: RefCell<DigitGen>,
}

/// x = Σ_{n ≥ m} a_n π^n with a_n ∈ Γ; digits are indices into Γ.
#[derive(Clone)]
pub struct DigitExpansion {
    system: ResidueSystem,
    m: i64,
    source: Option<Element>,
    lazy: Rc<Lazy>,
}

impl fmt::Debug for DigitExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DigitExpansion(m = {}", self.m)?;
        if let Some(x) = &self.source {
            write!(f, ", x = {x}")?;
        }
        write!(f, ", {} digits cached)", self.lazy.cache.borrow().len())
    }
}

impl DigitExpansion {
    fn with_gen(
        system: ResidueSystem,
        m: i64,
        source: Option<Element>,
        gen: impl FnMut(&mut Vec<usize>, usize) -> Result<()> + 'static,
    ) -> DigitExpansion {
        DigitExpansion {
            system,
            m,
            source,
            lazy: Rc::new(Lazy { cache: RefCell::new(Vec::new()), gen: RefCell::new(Box::new(gen)) }),
        }
    }

    /// Digits given by a function of the absolute index n ≥ m.
    pub fn from_fn(system: ResidueSystem, m: i64, mut f: impl FnMut(i64) -> usize + 'static) -> DigitExpansion {
        DigitExpansion::with_gen(system, m, None, move |cache, n| {
            while cache.len() < n {
                let d = f(m + cache.len() as i64);
                cache.push(d);
            }
            Ok(())
        })
    }

    /// An ultimately periodic expansion: `digits` lists a_m, …, a_{N+L−1}.
    pub fn periodic(
        system: ResidueSystem,
        m: i64,
        digits: Vec<usize>,
        preperiod: i64,
        period: usize,
    ) -> Result<DigitExpansion> {
        let pre = (preperiod - m) as usize;
        if preperiod < m || period == 0 || digits.len() != pre + period {
            return Err(Error::Precondition("periodic digits must cover exactly the preperiod and one period".into()));
        }
        Ok(DigitExpansion::from_fn(system, m, move |n| {
            let k = (n - m) as usize;
            if k < pre {
                digits[k]
            } else {
                digits[pre + (k - pre) % period]
            }
        }))
    }

    /// A known finite prefix; digits beyond it are unavailable.
    pub fn from_prefix(system: ResidueSystem, m: i64, digits: Vec<usize>) -> DigitExpansion {
        DigitExpansion::with_gen(system, m, None, move |cache, n| {
            if n > digits.len() {
                return Err(Error::Precondition(format!(
                    "digit {} beyond the known prefix of {}",
                    m + n as i64 - 1,
                    digits.len()
                )));
            }
            *cache = digits[..n.max(cache.len())].to_vec();
            Ok(())
        })
    }

    pub fn system(&self) -> &ResidueSystem {
        &self.system
    }

    pub fn ctx(&self) -> &BaseContext {
        self.system.ctx()
    }

    /// The starting index m.
    pub fn start(&self) -> i64 {
        self.m
    }

    /// The expanded value, when known.
    pub fn source(&self) -> Option<&Element> {
        self.source.as_ref()
    }

    /// Records the element these digits expand.
    pub fn with_source(mut self, x: Element) -> DigitExpansion {
        self.source = Some(x);
        self
    }

    fn force(&self, count: usize) -> Result<()> {
        if self.lazy.cache.borrow().len() >= count {
            return Ok(());
        }
        let mut cache = std::mem::take(&mut *self.lazy.cache.borrow_mut());
        let res = (self.lazy.gen.borrow_mut())(&mut cache, count);
        *self.lazy.cache.borrow_mut() = cache;
        res
    }

    /// Index (into Γ) of a_n.
    pub fn digit(&self, n: i64) -> Result<usize> {
        if n < self.m {
            return self
                .system
                .zero_index()
                .ok_or_else(|| Error::Precondition(format!("digit {n} lies below the start {}", self.m)));
        }
        let k = (n - self.m) as usize;
        self.force(k + 1)?;
        Ok(self.lazy.cache.borrow()[k])
    }

    /// Indices of a_m, …, a_{m+count−1}.
    pub fn digits(&self, count: usize) -> Result<Vec<usize>> {
        self.force(count)?;
        Ok(self.lazy.cache.borrow()[..count].to_vec())
    }

    /// a_m, …, a_{m+count−1} as elements.
    pub fn digit_elements(&self, count: usize) -> Result<Vec<Element>> {
        Ok(self.digits(count)?.into_iter().map(|i| self.system.rep(i).clone()).collect())
    }

    /// Σ_{m ≤ n ≤ upto} a_n π^n exactly (rational π and digits only).
    pub fn partial_sum(&self, upto: i64) -> Result<RatFunc> {
        let pi = rational_pi(self.ctx())?;
        let f = self.system.field();
        let mut acc = RatFunc::zero(f);
        for n in (self.m..=upto).rev() {
            let a =
                self.system.rep(self.digit(n)?).as_rat().ok_or_else(|| Error::Unsupported("stream digits".into()))?;
            acc = acc.mul_ref(&pi).add_ref(a);
        }
        if upto >= self.m {
            acc = acc.mul_ref(&pi.pow(self.m)?);
        }
        Ok(acc)
    }

    /// Σ_{m ≤ n ≤ upto} a_n π^n truncated to absolute precision `prec` in t.
    pub fn partial_sum_series(&self, upto: i64, prec: i64) -> Result<Series> {
        let ctx = self.ctx();
        let o = series_orientation(ctx)?;
        let e = ctx.e();
        let f = self.system.field();
        let q = prec - self.m * e + e + SLACK;
        let pi_s = ctx.pi().to_series(o, q)?;
        let mut acc = Series::zero(f, q);
        for n in (self.m..=upto).rev() {
            let a = self.system.rep(self.digit(n)?).to_series(o, q)?;
            acc = acc.mul_to(&pi_s, q).add(&a);
        }
        let pm = power_series(&pi_s, self.m)?;
        Ok(acc.mul(&pm).truncate(prec))
    }

    /// The value Σ a_n π^n as a lazy stream (series models).
    pub fn to_stream(&self) -> Result<LaurentStream> {
        let ctx = self.ctx();
        let o = series_orientation(ctx)?;
        let start = self.m * ctx.e();
        let me = self.clone();
        let f = self.system.field().clone();
        let e = ctx.e();
        Ok(LaurentStream::from_block(&f, o, start, move |cache, n| {
            let target = n.max(2 * cache.len()).max(16);
            let prec = start + target as i64;
            let upto = (prec - 1).div_euclid(e);
            let s = me.partial_sum_series(upto, prec).expect("digits of a stream-valued expansion");
            *cache = (0..target as i64).map(|k| s.coeff(start + k)).collect();
        }))
    }

    /// Digit literals and indices for the first `count` digits.
    pub fn to_file(&self, count: usize) -> Result<ExpansionFile> {
        let idx = self.digits(count)?;
        Ok(ExpansionFile {
            m: self.m,
            digits: idx.iter().map(|&i| self.system.rep(i).to_string()).collect(),
            indices: idx,
        })
    }
}

/// JSON form of an expansion prefix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionFile {
    pub m: i64,
    pub digits: Vec<String>,
    pub indices: Vec<usize>,
}

fn rational_pi(ctx: &BaseContext) -> Result<RatFunc> {
    ctx.pi().as_rat().cloned().ok_or_else(|| Error::Unsupported("operation needs a rational pi".into()))
}

fn series_orientation(ctx: &BaseContext) -> Result<Orientation> {
    ctx.orientation().ok_or_else(|| Error::Unsupported("series view of the P-adic model".into()))
}

fn power_series(pi: &Series, m: i64) -> Result<Series> {
    if m >= 0 {
        Ok(pi.pow(m as u64))
    } else {
        Ok(pi.inv()?.pow(m.unsigned_abs()))
    }
}

/// Valuation of an element in the model (streams scanned to the default depth).
pub fn valuation_of(x: &Element, ctx: &BaseContext) -> Result<Val> {
    match x {
        Element::Rat(r) => Ok(ctx.model().valuation(r)),
        Element::Stream { s, .. } => {
            if Some(s.orientation()) != ctx.orientation() {
                return Err(Error::OrientationMismatch);
            }
            Ok(s.valuation_within(DEFAULT_ZERO_SCAN).map_or(Val::Inf, Val::Fin))
        }
    }
}

/// m = min(0, ⌊v(x)/e⌋).
pub fn start_index(x: &Element, ctx: &BaseContext) -> Result<i64> {
    Ok(match valuation_of(x, ctx)? {
        Val::Inf => 0,
        Val::Fin(v) => v.div_euclid(ctx.e()).min(0),
    })
}

/// The (Γ, π)-expansion of x from its natural start index.
pub fn expand(x: &Element, sys: &ResidueSystem) -> Result<DigitExpansion> {
    let m = start_index(x, sys.ctx())?;
    expand_from(x, sys, m)
}

/// The (Γ, π)-expansion of x = Σ_{n ≥ m} a_n π^n from an explicit start m;
/// requires v(x) ≥ m·e.
pub fn expand_from(x: &Element, sys: &ResidueSystem, m: i64) -> Result<DigitExpansion> {
    let ctx = sys.ctx();
    if let Val::Fin(v) = valuation_of(x, ctx)? {
        if v < m * ctx.e() {
            return Err(Error::Precondition(format!("v(x) = {v} is below m·e = {}", m * ctx.e())));
        }
    }
    let all_rational = x.is_rational() && ctx.pi().is_rational() && sys.all_rational();
    let exact = match ctx.model() {
        Model::Vp(_) => {
            if !all_rational {
                return Err(Error::Unsupported("stream data in the P-adic model".into()));
            }
            true
        }
        _ => all_rational && property_a_check(ctx, sys.reps()).holds(),
    };
    if exact {
        let x = x.as_rat().expect("rational").clone();
        let gen = exact_generator(&x, sys, m)?;
        Ok(DigitExpansion::with_gen(sys.clone(), m, Some(Element::Rat(x)), gen))
    } else {
        let engine = SeriesEngine::new(x, sys, m)?;
        Ok(DigitExpansion::with_gen(sys.clone(), m, Some(x.clone()), move |cache, n| {
            let count = n.max(2 * cache.len()).max(32);
            *cache = engine.run(count)?;
            Ok(())
        }))
    }
}

fn exact_generator(
    x: &RatFunc,
    sys: &ResidueSystem,
    m: i64,
) -> Result<impl FnMut(&mut Vec<usize>, usize) -> Result<()>> {
    let pi = rational_pi(sys.ctx())?;
    let mut state = CarryState::new(x, &pi, m)?;
    let sys = sys.clone();
    Ok(move |cache: &mut Vec<usize>, n: usize| {
        while cache.len() < n {
            cache.push(state.step(&sys, &pi)?);
        }
        Ok(())
    })
}

/// The exact remainder r_n of the digit recursion.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CarryState(pub RatFunc);

impl CarryState {
    /// r_m = x·π^{−m}.
    pub fn new(x: &RatFunc, pi: &RatFunc, m: i64) -> Result<CarryState> {
        Ok(CarryState(x.mul_ref(&pi.pow(-m)?)))
    }

    /// Emits the digit of the current remainder and advances to r_{n+1}.
    pub fn step(&mut self, sys: &ResidueSystem, pi: &RatFunc) -> Result<usize> {
        let key = sys.ctx().residue_key(&Element::Rat(self.0.clone()))?;
        let idx = sys.lookup(&key).expect("complete system");
        let a = sys.rep(idx).as_rat().expect("rational digits");
        self.0 = self.0.sub_ref(a).div_ref(pi)?;
        Ok(idx)
    }
}

enum PiDivision {
    /// π = t^e·A/B.
    Units(Poly, Poly),
    /// π = t^e·u; holds u to the requested relative length.
    Unit(LaurentStream),
}

/// Digit extraction on truncated series, for the z and 1/z models.
struct SeriesEngine {
    x: Element,
    sys: ResidueSystem,
    m: i64,
    orient: Orientation,
    division: PiDivision,
}

impl SeriesEngine {
    fn new(x: &Element, sys: &ResidueSystem, m: i64) -> Result<SeriesEngine> {
        let ctx = sys.ctx();
        let orient = series_orientation(ctx)?;
        let division = match ctx.pi_units() {
            Some((a, b)) => PiDivision::Units(a.clone(), b.clone()),
            None => {
                let s = ctx.pi().to_stream(orient)?;
                PiDivision::Unit(s.shift(-ctx.e()))
            }
        };
        Ok(SeriesEngine { x: x.clone(), sys: sys.clone(), m, orient, division })
    }

    fn unit(&self, len: i64) -> Option<(Series, Series)> {
        match &self.division {
            PiDivision::Unit(u) => {
                let us = u.truncate(len);
                let inv = us.inv().expect("pi has valuation e");
                Some((us, inv))
            }
            PiDivision::Units(..) => None,
        }
    }

    fn div_pi(&self, r: &Series, unit: &Option<(Series, Series)>, e: i64) -> Result<Series> {
        let q = match (&self.division, unit) {
            (PiDivision::Units(a, b), _) => r.mul_poly(b).div_poly(a)?,
            (PiDivision::Unit(_), Some((_, inv))) => r.mul(inv),
            _ => unreachable!(),
        };
        Ok(q.shift(-e))
    }

    fn mul_pi(&self, r: &Series, unit: &Option<(Series, Series)>, e: i64) -> Result<Series> {
        let q = match (&self.division, unit) {
            (PiDivision::Units(a, b), _) => r.mul_poly(a).div_poly(b)?,
            (PiDivision::Unit(_), Some((u, _))) => r.mul(u),
            _ => unreachable!(),
        };
        Ok(q.shift(e))
    }

    fn run(&self, count: usize) -> Result<Vec<usize>> {
        let ctx = self.sys.ctx();
        let e = ctx.e();
        let need = count as i64 * e + SLACK;
        let unit = self.unit(need + e * self.m.abs() + SLACK);
        let mut r = self.x.to_series(self.orient, need + self.m * e)?;
        for _ in 0..self.m.max(0) {
            r = self.div_pi(&r, &unit, e)?;
        }
        for _ in 0..(-self.m).max(0) {
            r = self.mul_pi(&r, &unit, e)?;
        }
        let reps = self.sys.reps().iter().map(|g| g.to_series(self.orient, need)).collect::<Result<Vec<_>>>()?;
        let mut out = Vec::with_capacity(count);
        for k in 0..count {
            if r.prec() < e {
                return Err(Error::Verification("series precision exhausted during digit extraction".into()));
            }
            if let Some(n) = (r.start()..0).find(|&n| !r.coeff(n).is_zero()) {
                return Err(Error::NegativeValuation(n));
            }
            let key: Vec<Fq> = (0..e).map(|i| r.coeff(i)).collect();
            let idx = self.sys.lookup(&key).expect("complete system");
            out.push(idx);
            r = r.sub(&reps[idx]);
            r = self.div_pi(&r, &unit, e)?;
            r = r.truncate((count - k) as i64 * e + SLACK);
        }
        Ok(out)
    }
}

/// Outcome of the property-A test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum PropertyA {
    Holds {
        h: usize,
        ef: usize,
    },
    /// Condition (i): π or some digit is not rational.
    FailsRationality {
        reason: String,
    },
    /// Condition (ii): [K : F_q(π)] ≠ ef.
    FailsDegree {
        h: usize,
        ef: usize,
    },
}

impl PropertyA {
    pub fn holds(&self) -> bool {
        matches!(self, PropertyA::Holds { .. })
    }
}

impl fmt::Display for PropertyA {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropertyA::Holds { h, ef } => write!(f, "holds: [K:F_q(pi)]={h} = e*f={ef}"),
            PropertyA::FailsRationality { reason } => write!(f, "fails (i): {reason}"),
            PropertyA::FailsDegree { h, ef } => {
                let rel = if h > ef { ">" } else { "<" };
                write!(f, "fails (ii): [K:F_q(pi)]={h} {rel} e*f={ef}")
            }
        }
    }
}

/// Checks (i) rationality of π and Γ and (ii) rat_degree(π) = e·f.
pub fn property_a_check(ctx: &BaseContext, gamma: &[Element]) -> PropertyA {
    let Some(pi) = ctx.pi().as_rat() else {
        return PropertyA::FailsRationality { reason: format!("pi = {} is not rational", ctx.pi()) };
    };
    if let Some(g) = gamma.iter().find(|g| !g.is_rational()) {
        return PropertyA::FailsRationality { reason: format!("digit {g} is not rational") };
    }
    let h = pi.rat_degree().expect("pi has positive valuation, hence is nonconstant");
    let ef = ctx.ef();
    if h == ef {
        PropertyA::Holds { h, ef }
    } else {
        PropertyA::FailsDegree { h, ef }
    }
}

/// Status of a period certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PeriodStatus {
    Exact,
    Candidate { nmax: usize, lmax: usize },
    NoneWithinBounds { nmax: usize, lmax: usize },
}

/// a_n = a_{n+L} for all n ≥ N (exact), or bounded evidence of it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodCertificate {
    pub m: i64,
    pub preperiod: i64,
    pub period: usize,
    pub status: PeriodStatus,
    /// a_m, …, a_{N+L−1}; empty for none-within-bounds.
    pub digits: Vec<usize>,
}

impl PeriodCertificate {
    pub fn is_exact(&self) -> bool {
        self.status == PeriodStatus::Exact
    }

    pub fn found(&self) -> bool {
        !matches!(self.status, PeriodStatus::NoneWithinBounds { .. })
    }

    /// The digit index at position n ≥ m implied by the certificate.
    pub fn digit(&self, n: i64) -> Option<usize> {
        if !self.found() || n < self.m {
            return None;
        }
        let pre = (self.preperiod - self.m) as usize;
        let k = (n - self.m) as usize;
        Some(if k < pre { self.digits[k] } else { self.digits[pre + (k - pre) % self.period] })
    }

    /// The ultimately periodic expansion described by the certificate.
    pub fn to_expansion(&self, sys: &ResidueSystem) -> Result<DigitExpansion> {
        if !self.found() {
            return Err(Error::Precondition("no period was found".into()));
        }
        DigitExpansion::periodic(sys.clone(), self.m, self.digits.clone(), self.preperiod, self.period)
    }
}

impl fmt::Display for PeriodCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.status {
            PeriodStatus::Exact => write!(f, "exact: N={}, L={}", self.preperiod, self.period),
            PeriodStatus::Candidate { nmax, lmax } => {
                write!(f, "candidate: N={}, L={} (bounds Nmax={nmax}, Lmax={lmax})", self.preperiod, self.period)
            }
            PeriodStatus::NoneWithinBounds { nmax, lmax } => write!(f, "none within bounds (Nmax={nmax}, Lmax={lmax})"),
        }
    }
}

/// Exact period detection for rational x under rational (Γ, π) with
/// property A, by finding a repeated remainder.
pub fn detect_period_exact(x: &RatFunc, sys: &ResidueSystem, cap: usize) -> Result<PeriodCertificate> {
    let ctx = sys.ctx();
    let pa = property_a_check(ctx, sys.reps());
    if !pa.holds() {
        return Err(Error::Precondition(format!("exact detection needs property A; {pa}")));
    }
    let pi = rational_pi(ctx)?;
    let m = start_index(&Element::Rat(x.clone()), ctx)?;
    let mut state = CarryState::new(x, &pi, m)?;
    let mut seen: HashMap<CarryState, usize> = HashMap::new();
    let mut digits = Vec::new();
    for k in 0..=cap {
        if let Some(&i) = seen.get(&state) {
            return Ok(PeriodCertificate {
                m,
                preperiod: m + i as i64,
                period: k - i,
                status: PeriodStatus::Exact,
                digits,
            });
        }
        if k == cap {
            break;
        }
        seen.insert(state.clone(), k);
        digits.push(state.step(sys, &pi)?);
    }
    Err(Error::StateCap(cap))
}

/// Bounded evidence: the smallest period L ≤ Lmax whose least consistent
/// preperiod within the first Nmax digits is at most Nmax − 2·Lmax.
pub fn detect_period_bounded(d: &DigitExpansion, nmax: usize, lmax: usize) -> Result<PeriodCertificate> {
    let a = d.digits(nmax)?;
    let limit = nmax.saturating_sub(2 * lmax);
    for l in 1..=lmax.min(nmax) {
        let n = (0..nmax - l).rev().find(|&i| a[i] != a[i + l]).map_or(0, |i| i + 1);
        if n <= limit {
            return Ok(PeriodCertificate {
                m: d.start(),
                preperiod: d.start() + n as i64,
                period: l,
                status: PeriodStatus::Candidate { nmax, lmax },
                digits: a[..n + l].to_vec(),
            });
        }
    }
    Ok(PeriodCertificate {
        m: d.start(),
        preperiod: 0,
        period: 0,
        status: PeriodStatus::NoneWithinBounds { nmax, lmax },
        digits: Vec::new(),
    })
}

/// Σ_{n<N} a_nπ^n + π^N·(Σ_{j<L} a_{N+j}π^j)/(1 − π^L).
pub fn resum(cert: &PeriodCertificate, sys: &ResidueSystem) -> Result<RatFunc> {
    if !cert.found() {
        return Err(Error::Precondition("no period was found".into()));
    }
    let pi = rational_pi(sys.ctx())?;
    let f = sys.field();
    let rep = |i: usize| sys.rep(i).as_rat().cloned().ok_or_else(|| Error::Unsupported("stream digits".into()));
    let mut head = RatFunc::zero(f);
    for n in cert.m..cert.preperiod {
        head = head.add_ref(&rep(cert.digit(n).unwrap())?.mul_ref(&pi.pow(n)?));
    }
    let mut block = RatFunc::zero(f);
    for j in 0..cert.period as i64 {
        block = block.add_ref(&rep(cert.digit(cert.preperiod + j).unwrap())?.mul_ref(&pi.pow(j)?));
    }
    let denom = RatFunc::one(f).sub_ref(&pi.pow(cert.period as i64)?);
    Ok(head.add_ref(&pi.pow(cert.preperiod)?.mul_ref(&block.div_ref(&denom)?)))
}

/// For rational (Γ, π) with [K : F_q(π)] = h > ef, a rational x
/// whose (Γ, π)-expansion is not ultimately periodic.
pub fn lemma21_witness(sys: &ResidueSystem) -> Result<RatFunc> {
    let ctx = sys.ctx();
    let (h, ef) = match property_a_check(ctx, sys.reps()) {
        PropertyA::FailsDegree { h, ef } if h > ef => (h, ef),
        other => return Err(Error::Precondition(format!("the witness needs failure of (ii) with h > ef; {other}"))),
    };
    let pi = rational_pi(ctx)?;
    let alg = PiAlgebra::new(&pi, *ctx.model() == Model::Vdeg)?;
    let basis = alg.power_basis();
    let keys = basis[..ef].iter().map(|b| ctx.residue_key(&Element::Rat(b.clone()))).collect::<Result<Vec<_>>>()?;
    if crate::linalg::rank(ctx.field(), &keys) != ef {
        return Err(Error::Verification("power basis does not extend a basis of A/πA".into()));
    }
    let mut best: Option<(i64, Vec<RatFunc>, RatFunc)> = None;
    for g in sys.reps() {
        let g = g.as_rat().expect("rational digits");
        if g.is_zero() {
            continue;
        }
        let c = alg.coords(g, &basis)?;
        let mg = c.iter().filter_map(|ci| ci.val_z().finite()).min().expect("nonzero element");
        if best.as_ref().is_none_or(|(b, _, _)| mg < *b) {
            best = Some((mg, c, g.clone()));
        }
    }
    let (mg, coords, gamma) = best.ok_or_else(|| Error::Precondition("Γ has no nonzero element".into()))?;
    let b: Vec<Fq> = coords.iter().map(|c| Series::from_ratfunc(c, mg + 1).coeff(mg)).collect();
    let f = ctx.field();
    let q = f.q() as usize;
    let free = h - ef;
    let total = q.checked_pow(free as u32).ok_or_else(|| Error::Unsupported("too many free coordinates".into()))?;
    for k in 0..total {
        let mut lam_free = vec![Fq::ZERO; free];
        let mut t = k;
        for slot in lam_free.iter_mut().rev() {
            *slot = Fq((t % q) as u32);
            t /= q;
        }
        let mut y = gamma.clone();
        for (i, &l) in lam_free.iter().enumerate() {
            y = y.sub_ref(&basis[ef + i].scale(l));
        }
        let mut lam = ctx.residue_key(&Element::Rat(y))?;
        lam.extend(lam_free);
        if lam != b {
            return Ok(lam.iter().zip(&basis).fold(RatFunc::zero(f), |acc, (&l, a)| acc.add_ref(&a.scale(l))));
        }
    }
    Err(Error::Verification("every element of Λ equals the leading coefficient vector".into()))
}

fn same_context(a: &BaseContext, b: &BaseContext) -> Result<()> {
    let same_pi = match (a.pi(), b.pi()) {
        (Element::Rat(x), Element::Rat(y)) => x == y,
        _ => true,
    };
    if a.model() != b.model() || !same_pi {
        return Err(Error::Precondition("expansions must share the model and pi".into()));
    }
    Ok(())
}

/// Re-expands the value of d with respect to another system Γ′.
pub fn convert_expansion(d: &DigitExpansion, target: &ResidueSystem) -> Result<DigitExpansion> {
    same_context(d.ctx(), target.ctx())?;
    match d.source() {
        Some(x) => expand_from(x, target, d.start()),
        None => {
            let value = Element::stream(d.to_stream()?, "expansion value");
            expand_from(&value, target, d.start())
        }
    }
}

/// The recombination b_n^{(i)} = Σ_k a_{n−k,k}^{(i)} for a target span system
/// over F_q whose coordinates of every source digit are polynomials in π.
pub fn recombine_span(d: &DigitExpansion, target: &ResidueSystem, count: usize) -> Result<Vec<usize>> {
    let ctx = d.ctx();
    same_context(ctx, target.ctx())?;
    let span = target
        .span()
        .filter(|s| !s.over_prime)
        .ok_or_else(|| Error::Precondition("target must be an F_q-span system".into()))?;
    let gens = span.gens.iter().map(|g| g.as_rat().cloned()).collect::<Option<Vec<_>>>();
    let gens = gens.ok_or_else(|| Error::Unsupported("stream generators".into()))?;
    let pi = rational_pi(ctx)?;
    if !property_a_check(ctx, d.system().reps()).holds() {
        return Err(Error::Precondition("recombination needs [K:F_q(pi)] = ef".into()));
    }
    let alg = PiAlgebra::new(&pi, *ctx.model() == Model::Vdeg)?;
    let f = ctx.field().clone();
    // a_{γ,k}^{(i)}: coefficient of π^k in the i-th coordinate of γ
    let mut comps: Vec<Vec<Poly>> = Vec::new();
    for g in d.system().reps() {
        let g = g.as_rat().ok_or_else(|| Error::Unsupported("stream digits".into()))?;
        let c = alg.coords(g, &gens)?;
        let polys = c
            .into_iter()
            .map(|ci| {
                ci.as_poly()
                    .cloned()
                    .ok_or_else(|| Error::Precondition(format!("digit {g} has a non-polynomial component")))
            })
            .collect::<Result<Vec<_>>>()?;
        comps.push(polys);
    }
    let depth = comps.iter().flatten().map(|p| p.degree_or_neg().max(0) as usize).max().unwrap_or(0);
    let a = d.digits(count)?;
    let u = gens.len();
    let mut out = Vec::with_capacity(count);
    for n in 0..count {
        let mut b = vec![Fq::ZERO; u];
        for k in 0..=depth.min(n) {
            let src = &comps[a[n - k]];
            for (i, bi) in b.iter_mut().enumerate() {
                *bi = f.add(*bi, src[i].coeff(k));
            }
        }
        out.push(span.index(&f, &b));
    }
    Ok(out)
}

/// The expansion of (1 − π^L)x with respect to (1 − π^L)Γ, whose digits are
/// b_n = (1 − π^L)a_n (same indices as d).
pub fn twist_expansion(d: &DigitExpansion, l: u32) -> Result<DigitExpansion> {
    let sys = twist_system(d.system(), l)?;
    let source = match d.source() {
        Some(x) => {
            let one = Element::Rat(RatFunc::one(x.field()));
            Some(one.sub(&d.ctx().pi().pow(l)?)?.mul(x)?)
        }
        None => None,
    };
    let inner = d.clone();
    let mut out =
        DigitExpansion::from_fn(sys, d.start(), move |n| inner.digit(n).expect("digits of the untwisted expansion"));
    out.source = source;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_ratfunc;
    use crate::field::Field;
    use crate::residue::span_system;

    fn f2() -> Field {
        Field::prime(2).unwrap()
    }

    fn rat(s: &str) -> RatFunc {
        parse_ratfunc(s, &f2()).unwrap()
    }

    fn sys(model: Model, pi: &str, reps: &[&str]) -> ResidueSystem {
        let ctx = BaseContext::rational(model, rat(pi)).unwrap();
        ResidueSystem::from_rats(ctx, reps.iter().map(|s| rat(s)).collect()).unwrap()
    }

    fn labels(d: &DigitExpansion, n: usize) -> Vec<String> {
        d.digit_elements(n).unwrap().iter().map(|g| g.to_string()).collect()
    }

    #[test]
    fn geometric_over_span() {
        let g = sys(Model::Vz, "z^2", &["0", "1", "z", "1+z"]);
        let d = expand(&Element::Rat(rat("1/(1+z)")), &g).unwrap();
        assert_eq!(d.start(), 0);
        assert!(labels(&d, 40).iter().all(|s| s == "1+z"));
    }

    #[test]
    fn witness_prefix_both_engines() {
        let g = sys(Model::Vz, "z+z^2", &["0", "1"]);
        let d = expand(&Element::Rat(rat("1+z")), &g).unwrap();
        let idx = d.digits(9).unwrap();
        assert_eq!(idx, vec![1, 1, 1, 0, 1, 0, 0, 0, 1]);
        // the exact remainder recursion agrees
        let mut st = CarryState::new(&rat("1+z"), &rat("z+z^2"), 0).unwrap();
        let exact: Vec<usize> = (0..64).map(|_| st.step(&g, &rat("z+z^2")).unwrap()).collect();
        assert_eq!(d.digits(64).unwrap(), exact);
        let big = d.digits(600).unwrap();
        for (n, &a) in big.iter().enumerate() {
            assert_eq!(a == 1, n == 0 || n.is_power_of_two(), "n = {n}");
        }
    }

    #[test]
    fn exact_periods() {
        let g = sys(Model::Vz, "z", &["0", "1"]);
        let c = detect_period_exact(&rat("1/(1+z+z^3)"), &g, DEFAULT_STATE_CAP).unwrap();
        assert!(c.is_exact());
        assert_eq!((c.preperiod, c.period), (0, 7));
        assert_eq!(resum(&c, &g).unwrap(), rat("1/(1+z+z^3)"));
        let c = detect_period_exact(&rat("1"), &g, 10).unwrap();
        assert_eq!((c.preperiod, c.period, c.digit(5)), (1, 1, Some(0)));
        let p = Poly::from_ints(&f2(), &[1, 1, 1]);
        let gp = sys(Model::Vp(p), "1+z+z^2", &["0", "1", "z", "1+z"]);
        let c = detect_period_exact(&rat("1/(z+z^2)"), &gp, 100).unwrap();
        assert_eq!((c.preperiod, c.period), (0, 1));
        assert_eq!(gp.rep(c.digits[0]).to_string(), "1");
        assert!(matches!(detect_period_exact(&rat("1/(1+z+z^3)"), &g, 3), Err(Error::StateCap(3))));
    }

    #[test]
    fn negative_start_and_reconstruction() {
        let g = sys(Model::Vz, "z^2/(1+z)", &["0", "1", "z", "1+z"]);
        let x = rat("(1+z^5)/(z^3*(1+z+z^2))");
        let d = expand(&Element::Rat(x.clone()), &g).unwrap();
        assert_eq!(d.start(), -2);
        for upto in [-2, 0, 5, 40] {
            let s = d.partial_sum(upto).unwrap();
            let v = x.sub_ref(&s).val_z().finite().unwrap_or(i64::MAX);
            assert!(v > 2 * upto, "upto {upto}: v = {v}");
        }
        let series = d.partial_sum_series(20, 30).unwrap();
        assert_eq!(series, Series::from_ratfunc(&d.partial_sum(20).unwrap(), 30));
    }

    #[test]
    fn series_engine_matches_exact() {
        // property A fails, so the series engine runs; compare with remainders
        let g = sys(Model::Vz, "z+z^2", &["0", "1"]);
        let x = rat("1/(1+z^3)");
        let d = expand(&Element::Rat(x.clone()), &g).unwrap();
        let mut st = CarryState::new(&x, &rat("z+z^2"), 0).unwrap();
        let exact: Vec<usize> = (0..80).map(|_| st.step(&g, &rat("z+z^2")).unwrap()).collect();
        assert_eq!(d.digits(80).unwrap(), exact);
    }

    #[test]
    fn bounded_detector() {
        let g = sys(Model::Vz, "z^2", &["0", "1", "z", "1+z"]);
        let d = expand(&Element::Rat(rat("1/(1+z)")), &g).unwrap();
        let c = detect_period_bounded(&d, 64, 8).unwrap();
        assert_eq!((c.preperiod, c.period), (0, 1));
        assert!(!c.is_exact());
        let z = expand(&Element::Rat(rat("0")), &g).unwrap();
        let c = detect_period_bounded(&z, 64, 8).unwrap();
        assert_eq!((c.preperiod, c.period), (0, 1));
        let thue_morse = DigitExpansion::from_fn(g.clone(), 0, |n| (n.count_ones() % 2) as usize);
        let c = detect_period_bounded(&thue_morse, 256, 8).unwrap();
        assert!(!c.found());
    }

    #[test]
    fn property_a_messages() {
        let ctx = |pi: &str| BaseContext::rational(Model::Vz, rat(pi)).unwrap();
        assert!(property_a_check(&ctx("z^2"), &[]).holds());
        assert!(property_a_check(&ctx("z^2/(1+z)"), &[]).holds());
        let r = property_a_check(&ctx("z*(1+z)"), &[]);
        assert_eq!(r.to_string(), "fails (ii): [K:F_q(pi)]=2 > e*f=1");
    }

    #[test]
    fn witnesses() {
        let g = sys(Model::Vz, "z*(1+z)", &["0", "1"]);
        assert_eq!(lemma21_witness(&g).unwrap(), rat("1+z"));
        let g2 = sys(Model::Vz, "z*(1+z)", &["0", "1+z"]);
        let x = lemma21_witness(&g2).unwrap();
        let d = expand(&Element::Rat(x), &g2).unwrap();
        assert!(!detect_period_bounded(&d, 1024, 16).unwrap().found());
        let good = sys(Model::Vz, "z^2", &["0", "1", "z", "1+z"]);
        assert!(matches!(lemma21_witness(&good), Err(Error::Precondition(_))));
    }

    #[test]
    fn conversions() {
        let ctx = BaseContext::rational(Model::Vz, rat("z^2")).unwrap();
        let poly_digits =
            ResidueSystem::from_rats(ctx.clone(), ["0", "1", "z", "1+z"].iter().map(|s| rat(s)).collect()).unwrap();
        let span = span_system(&[Element::Rat(rat("1")), Element::Rat(rat("1+z"))], ctx.clone()).unwrap();
        let x = Element::Rat(rat("1/(1+z)"));
        let d = expand(&x, &poly_digits).unwrap();
        let naive = convert_expansion(&d, &span).unwrap();
        let direct = expand(&x, &span).unwrap();
        assert_eq!(naive.digits(64).unwrap(), direct.digits(64).unwrap());
        assert_eq!(recombine_span(&d, &span, 64).unwrap(), direct.digits(64).unwrap());
        // without a known source the value stream is re-expanded
        let anon = DigitExpansion::from_prefix(poly_digits.clone(), 0, d.digits(40).unwrap());
        let re = convert_expansion(&anon, &span).unwrap();
        assert_eq!(re.digits(30).unwrap(), direct.digits(30).unwrap());
        // digits whose components are polynomials in π carry into later positions
        let carried = ResidueSystem::from_rats(
            ctx.clone(),
            ["0", "1+z^2", "z+z^4", "1+z+z^2+z^4"].iter().map(|s| rat(s)).collect(),
        )
        .unwrap();
        let plain = span_system(&[Element::Rat(rat("1")), Element::Rat(rat("z"))], ctx.clone()).unwrap();
        let e = expand(&x, &carried).unwrap();
        assert_eq!(recombine_span(&e, &plain, 64).unwrap(), expand(&x, &plain).unwrap().digits(64).unwrap());
        let odd =
            ResidueSystem::from_rats(ctx, ["0", "1/(1+z^2)", "z", "1/(1+z^2)+z"].iter().map(|s| rat(s)).collect())
                .unwrap();
        let e = expand(&x, &odd).unwrap();
        assert!(matches!(recombine_span(&e, &plain, 8), Err(Error::Precondition(_))));
    }

    #[test]
    fn twist_relation() {
        let g = span_system(
            &[Element::Rat(rat("1")), Element::Rat(rat("z"))],
            BaseContext::rational(Model::Vz, rat("z^2")).unwrap(),
        )
        .unwrap();
        let x = Element::Rat(rat("(1+z^3)/(1+z+z^4)"));
        let d = expand(&x, &g).unwrap();
        for l in [1, 3] {
            let t = twist_expansion(&d, l).unwrap();
            let direct = convert_expansion(&t, t.system()).unwrap();
            assert_eq!(direct.digits(128).unwrap(), d.digits(128).unwrap());
        }
    }

    #[test]
    fn descending_and_stream_pi() {
        let f = f2();
        let beta = crate::algebraic::hensel_root(
            &crate::algebraic::AlgebraicSpec::parse("w^2+z*w+1", Some("z"), &f, Orientation::Descending).unwrap(),
        )
        .unwrap();
        let pi = Element::stream(beta.inv().unwrap(), "1/beta");
        let ctx = BaseContext::new(Model::Vdeg, pi).unwrap();
        assert_eq!(ctx.e(), 1);
        let g = ResidueSystem::from_rats(ctx, vec![rat("0"), rat("1")]).unwrap();
        let d = expand(&Element::Rat(rat("1")), &g).unwrap();
        assert_eq!(d.start(), 0);
        assert_eq!(d.digits(1).unwrap(), vec![1]);
        let d2 = expand(&Element::Rat(rat("z")), &g).unwrap();
        // z = 1/π + π (from β = z + 1/β): digits start at −1
        assert_eq!(d2.start(), -1);
        assert_eq!(&d2.digits(6).unwrap(), &[1, 0, 1, 0, 0, 0]);
    }
}
