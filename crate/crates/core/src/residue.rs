//! Valuation models, residue reduction mod π, and complete residue systems Γ.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebraic::ratfunc_series;
use crate::error::{Error, Result};
use crate::expr::parse_ratfunc;
use crate::field::{Field, FieldDesc, Fq};
use crate::poly::Poly;
use crate::ratfunc::{RatFunc, Val};
use crate::series::Series;
use crate::stream::{LaurentStream, Orientation, DEFAULT_ZERO_SCAN};

/// The completion in which expansions live.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Model {
    /// F_q((z)), v = order at z = 0.
    Vz,
    /// F_q((1/z)), v = −deg.
    Vdeg,
    /// The P-adic completion for an irreducible P.
    Vp(Poly),
}

impl Model {
    /// `vz`, `vdeg`, or `vp:<P>`.
    pub fn parse(s: &str, field: &Field) -> Result<Model> {
        let s = s.trim();
        match s {
            "vz" => Ok(Model::Vz),
            "vdeg" => Ok(Model::Vdeg),
            _ => {
                let Some(p) = s.strip_prefix("vp:") else {
                    return Err(Error::Parse {
                        pos: 0,
                        msg: format!("unknown model `{s}` (expected vz, vdeg or vp:<P>)"),
                    });
                };
                let p = crate::expr::parse_poly(p, field)?;
                if !p.is_irreducible() {
                    return Err(Error::Reducible(p.to_string()));
                }
                Ok(Model::Vp(p.monic()))
            }
        }
    }

    pub fn orientation(&self) -> Option<Orientation> {
        match self {
            Model::Vz => Some(Orientation::Ascending),
            Model::Vdeg => Some(Orientation::Descending),
            Model::Vp(_) => None,
        }
    }

    /// Residue degree f = [A/M : F_q].
    pub fn residue_degree(&self) -> usize {
        match self {
            Model::Vp(p) => p.degree_or_neg() as usize,
            _ => 1,
        }
    }

    pub fn valuation(&self, x: &RatFunc) -> Val {
        match self {
            Model::Vz => x.val_z(),
            Model::Vdeg => x.val_deg(),
            Model::Vp(p) => x.val_p_unchecked(p),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::Vz => f.write_str("vz"),
            Model::Vdeg => f.write_str("vdeg"),
            Model::Vp(p) => write!(f, "vp:{p}"),
        }
    }
}

/// An element of the completion: an exact rational function or a lazy
/// stream (with a display label).
#[derive(Clone)]
pub enum Element {
    Rat(RatFunc),
    Stream { s: LaurentStream, label: String },
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Rat(x) => write!(f, "{x}"),
            Element::Stream { label, .. } => f.write_str(label),
        }
    }
}

impl From<RatFunc> for Element {
    fn from(x: RatFunc) -> Self {
        Element::Rat(x)
    }
}

fn wrap(s: &str) -> String {
    if s.contains('+') || s.contains('-') {
        format!("({s})")
    } else {
        s.to_string()
    }
}

impl Element {
    pub fn stream(s: LaurentStream, label: impl Into<String>) -> Element {
        Element::Stream { s, label: label.into() }
    }

    pub fn field(&self) -> &Field {
        match self {
            Element::Rat(x) => x.field(),
            Element::Stream { s, .. } => s.field(),
        }
    }

    pub fn as_rat(&self) -> Option<&RatFunc> {
        match self {
            Element::Rat(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Element::Rat(_))
    }

    pub fn is_zero_rat(&self) -> bool {
        matches!(self, Element::Rat(x) if x.is_zero())
    }

    /// The image in F_q((t)) for the given orientation.
    pub fn to_stream(&self, orient: Orientation) -> Result<LaurentStream> {
        match self {
            Element::Rat(x) => Ok(LaurentStream::from_ratfunc(x, orient)),
            Element::Stream { s, .. } => {
                if s.orientation() != orient {
                    return Err(Error::OrientationMismatch);
                }
                Ok(s.clone())
            }
        }
    }

    /// Truncation to absolute precision `prec` in t.
    pub fn to_series(&self, orient: Orientation, prec: i64) -> Result<Series> {
        match self {
            Element::Rat(x) => Ok(ratfunc_series(x, orient, prec)),
            Element::Stream { s, .. } => {
                if s.orientation() != orient {
                    return Err(Error::OrientationMismatch);
                }
                Ok(s.truncate(prec))
            }
        }
    }

    fn orient_of(&self, o: &Element) -> Option<Orientation> {
        match (self, o) {
            (Element::Stream { s, .. }, _) | (_, Element::Stream { s, .. }) => Some(s.orientation()),
            _ => None,
        }
    }

    fn combine(
        &self,
        o: &Element,
        op: char,
        rat: impl Fn(&RatFunc, &RatFunc) -> Result<RatFunc>,
        st: impl Fn(&LaurentStream, &LaurentStream) -> Result<LaurentStream>,
    ) -> Result<Element> {
        if let (Element::Rat(a), Element::Rat(b)) = (self, o) {
            return Ok(Element::Rat(rat(a, b)?));
        }
        let orient = self.orient_of(o).expect("one operand is a stream");
        let s = st(&self.to_stream(orient)?, &o.to_stream(orient)?)?;
        Ok(Element::stream(s, format!("{}{op}{}", wrap(&self.to_string()), wrap(&o.to_string()))))
    }

    pub fn add(&self, o: &Element) -> Result<Element> {
        self.combine(o, '+', |a, b| Ok(a.add_ref(b)), |a, b| a.add(b))
    }

    pub fn sub(&self, o: &Element) -> Result<Element> {
        self.combine(o, '-', |a, b| Ok(a.sub_ref(b)), |a, b| a.sub(b))
    }

    pub fn mul(&self, o: &Element) -> Result<Element> {
        self.combine(o, '*', |a, b| Ok(a.mul_ref(b)), |a, b| a.mul(b))
    }

    pub fn div(&self, o: &Element) -> Result<Element> {
        self.combine(o, '/', |a, b| a.div_ref(b), |a, b| a.div(b))
    }

    pub fn scale(&self, c: Fq) -> Element {
        match self {
            Element::Rat(x) => Element::Rat(x.scale(c)),
            Element::Stream { s, label } => {
                Element::stream(s.scale(c), format!("{}*{}", s.field().format_elem(c), wrap(label)))
            }
        }
    }

    /// x^k for k ≥ 0.
    pub fn pow(&self, k: u32) -> Result<Element> {
        let mut acc = Element::Rat(RatFunc::one(self.field()));
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }
}

/// The data (K_v, v, π) with derived e, f and r = q^{ef}.
#[derive(Clone, Debug)]
pub struct BaseContext {
    field: Field,
    model: Model,
    pi: Element,
    e: i64,
    /// π = t^e·A(t)/B(t) with A(0)B(0) ≠ 0, for rational π in the series models.
    pi_units: Option<(Poly, Poly)>,
}

impl BaseContext {
    pub fn new(model: Model, pi: Element) -> Result<BaseContext> {
        let field = pi.field().clone();
        let e = match (&model, &pi) {
            (_, Element::Rat(x)) => match model.valuation(x) {
                Val::Fin(v) => v,
                Val::Inf => 0,
            },
            (Model::Vp(_), Element::Stream { .. }) => {
                return Err(Error::Unsupported("stream-valued pi in the P-adic model".into()))
            }
            (m, Element::Stream { s, .. }) => {
                if Some(s.orientation()) != m.orientation() {
                    return Err(Error::OrientationMismatch);
                }
                s.valuation_within(DEFAULT_ZERO_SCAN).ok_or(Error::PossiblyZero(DEFAULT_ZERO_SCAN))?
            }
        };
        if e <= 0 {
            return Err(Error::Precondition(format!("v(pi) = {e} must be positive")));
        }
        let pi_units = match (&pi, model.orientation()) {
            (Element::Rat(x), Some(o)) => {
                let xt = match o {
                    Orientation::Ascending => x.clone(),
                    Orientation::Descending => x.invert_variable(),
                };
                let a = xt.num().unshift(xt.num().low_degree().unwrap());
                let b = xt.den().unshift(xt.den().low_degree().unwrap());
                Some((a, b))
            }
            _ => None,
        };
        Ok(BaseContext { field, model, pi, e, pi_units })
    }

    pub fn rational(model: Model, pi: RatFunc) -> Result<BaseContext> {
        BaseContext::new(model, Element::Rat(pi))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn pi(&self) -> &Element {
        &self.pi
    }

    pub fn e(&self) -> i64 {
        self.e
    }

    pub fn f(&self) -> usize {
        self.model.residue_degree()
    }

    pub fn ef(&self) -> usize {
        self.e as usize * self.f()
    }

    /// r = q^{ef}, if it fits in 64 bits.
    pub fn r(&self) -> Option<u64> {
        (self.field.q() as u64).checked_pow(self.ef() as u32)
    }

    /// (A, B) with π = t^e·A/B, for rational π in the z and 1/z models.
    pub fn pi_units(&self) -> Option<&(Poly, Poly)> {
        self.pi_units.as_ref()
    }

    pub fn orientation(&self) -> Option<Orientation> {
        self.model.orientation()
    }

    /// Canonical residue key of x mod πA_v: ef coordinates over F_q.
    pub fn residue_key(&self, x: &Element) -> Result<Vec<Fq>> {
        let ef = self.ef();
        match &self.model {
            Model::Vz | Model::Vdeg => {
                let o = self.model.orientation().unwrap();
                let s = match x {
                    Element::Rat(r) => {
                        if let Val::Fin(v) = self.model.valuation(r) {
                            if v < 0 {
                                return Err(Error::NegativeValuation(v));
                            }
                        }
                        ratfunc_series(r, o, self.e)
                    }
                    Element::Stream { s, .. } => {
                        if s.orientation() != o {
                            return Err(Error::OrientationMismatch);
                        }
                        if let Some(n) = (s.start()..0).find(|&n| !s.coeff(n).is_zero()) {
                            return Err(Error::NegativeValuation(n));
                        }
                        s.truncate(self.e)
                    }
                };
                Ok((0..self.e).map(|n| s.coeff(n)).collect())
            }
            Model::Vp(p) => {
                let Element::Rat(r) = x else {
                    return Err(Error::Unsupported("stream elements in the P-adic model".into()));
                };
                if let Val::Fin(v) = self.model.valuation(r) {
                    if v < 0 {
                        return Err(Error::NegativeValuation(v));
                    }
                }
                let pe = p.pow(self.e as u64);
                let inv = r.den().inv_mod(&pe).expect("denominator is a unit at P");
                let res = (r.num() * &inv).rem(&pe)?;
                Ok((0..ef).map(|i| res.coeff(i)).collect())
            }
        }
    }

    /// The canonical representative of a residue key.
    pub fn key_element(&self, key: &[Fq]) -> RatFunc {
        let p = Poly::new(&self.field, key.to_vec());
        match self.model {
            Model::Vdeg => RatFunc::from_poly(p).invert_variable(),
            _ => RatFunc::from_poly(p),
        }
    }

    /// x mod πA_v in canonical form.
    pub fn reduce_mod_pi(&self, x: &Element) -> Result<RatFunc> {
        Ok(self.key_element(&self.residue_key(x)?))
    }
}

/// Linear structure of a span system: Γ = {Σ c_i α_i} with c_i in F_p
/// (`over_prime`) or F_q, enumerated with index Σ code(c_i)·s^i.
#[derive(Clone, Debug)]
pub struct Span {
    pub gens: Vec<Element>,
    pub over_prime: bool,
}

impl Span {
    fn radix(&self, f: &Field) -> u32 {
        if self.over_prime {
            f.p()
        } else {
            f.q()
        }
    }

    /// Coefficients of the index-th element.
    pub fn coords(&self, f: &Field, index: usize) -> Vec<Fq> {
        let s = self.radix(f) as usize;
        let mut k = index;
        (0..self.gens.len())
            .map(|_| {
                let c = Fq((k % s) as u32);
                k /= s;
                c
            })
            .collect()
    }

    pub fn index(&self, f: &Field, coords: &[Fq]) -> usize {
        let s = self.radix(f) as usize;
        coords.iter().rev().fold(0, |acc, c| acc * s + c.0 as usize)
    }
}

/// A complete set of representatives of A_v/πA_v.
#[derive(Clone, Debug)]
pub struct ResidueSystem {
    ctx: BaseContext,
    reps: Vec<Element>,
    keys: Vec<Vec<Fq>>,
    index: HashMap<Vec<Fq>, usize>,
    span: Option<Span>,
}

impl ResidueSystem {
    /// Validates completeness (|Γ| = r, residues pairwise distinct).
    pub fn new(ctx: BaseContext, reps: Vec<Element>) -> Result<ResidueSystem> {
        let keys = reps.iter().map(|x| ctx.residue_key(x)).collect::<Result<Vec<_>>>()?;
        let mut index = HashMap::new();
        for (i, k) in keys.iter().enumerate() {
            if index.insert(k.clone(), i).is_some() {
                return Err(Error::Precondition(format!(
                    "representatives {} and {} are congruent mod pi",
                    reps[index[k]], reps[i]
                )));
            }
        }
        if Some(reps.len() as u64) != ctx.r() {
            let missing = (0..ctx.r().unwrap_or(u64::MAX))
                .take(1 << 20)
                .map(|i| key_from_index(ctx.field(), ctx.ef(), i))
                .find(|k| !index.contains_key(k))
                .map(|k| ctx.key_element(&k).to_string())
                .unwrap_or_default();
            return Err(Error::MissingResidue(missing));
        }
        Ok(ResidueSystem { ctx, reps, keys, index, span: None })
    }

    pub fn from_rats(ctx: BaseContext, reps: Vec<RatFunc>) -> Result<ResidueSystem> {
        ResidueSystem::new(ctx, reps.into_iter().map(Element::Rat).collect())
    }

    pub fn ctx(&self) -> &BaseContext {
        &self.ctx
    }

    pub fn field(&self) -> &Field {
        self.ctx.field()
    }

    pub fn reps(&self) -> &[Element] {
        &self.reps
    }

    pub fn rep(&self, i: usize) -> &Element {
        &self.reps[i]
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn key(&self, i: usize) -> &[Fq] {
        &self.keys[i]
    }

    pub fn span(&self) -> Option<&Span> {
        self.span.as_ref()
    }

    /// Index of the representative with the given residue key.
    pub fn lookup(&self, key: &[Fq]) -> Option<usize> {
        self.index.get(key).copied()
    }

    /// Index of the representative congruent to x.
    pub fn digit_of(&self, x: &Element) -> Result<usize> {
        let k = self.ctx.residue_key(x)?;
        Ok(self.index[&k])
    }

    /// Index of a representative equal to 0, if any.
    pub fn zero_index(&self) -> Option<usize> {
        self.reps.iter().position(|x| x.is_zero_rat())
    }

    pub fn all_rational(&self) -> bool {
        self.reps.iter().all(Element::is_rational)
    }

    pub fn rational_reps(&self) -> Option<Vec<RatFunc>> {
        self.reps.iter().map(|x| x.as_rat().cloned()).collect()
    }

    pub fn to_file(&self) -> Result<SystemFile> {
        let reps = self
            .reps
            .iter()
            .map(|x| {
                x.as_rat().map(|r| r.to_string()).ok_or_else(|| Error::Unsupported("serializing stream digits".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let pi = self.ctx.pi.as_rat().ok_or_else(|| Error::Unsupported("serializing a stream pi".into()))?;
        let span = self.span.as_ref().map(|s| SpanFile {
            gens: s.gens.iter().map(|g| g.to_string()).collect(),
            over: if s.over_prime { "fp".into() } else { "fq".into() },
        });
        Ok(SystemFile {
            field: Some(FieldDesc::of(self.field())),
            model: self.ctx.model.to_string(),
            pi: pi.to_string(),
            reps,
            span,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file()?)?)
    }

    /// Reads a system file; a `span` entry takes precedence over `reps`.
    pub fn from_json(s: &str, default_field: Option<&Field>) -> Result<ResidueSystem> {
        let file: SystemFile = serde_json::from_str(s)?;
        let field = match (&file.field, default_field) {
            (Some(d), _) => d.build()?,
            (None, Some(f)) => f.clone(),
            (None, None) => Field::prime(2)?,
        };
        let model = Model::parse(&file.model, &field)?;
        let pi = parse_ratfunc(&file.pi, &field)?;
        let ctx = BaseContext::rational(model, pi)?;
        if let Some(sp) = &file.span {
            let gens =
                sp.gens.iter().map(|g| parse_ratfunc(g, &field).map(Element::Rat)).collect::<Result<Vec<_>>>()?;
            return span_system_with(&gens, ctx, sp.over == "fp");
        }
        let reps = file.reps.iter().map(|g| parse_ratfunc(g, &field)).collect::<Result<Vec<_>>>()?;
        ResidueSystem::from_rats(ctx, reps)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SpanFile {
    pub gens: Vec<String>,
    #[serde(default = "default_over")]
    pub over: String,
}

fn default_over() -> String {
    "fq".into()
}

/// JSON form of a residue system.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SystemFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldDesc>,
    pub model: String,
    pub pi: String,
    #[serde(default)]
    pub reps: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub span: Option<SpanFile>,
}

fn key_from_index(f: &Field, len: usize, mut i: u64) -> Vec<Fq> {
    let q = f.q() as u64;
    (0..len)
        .map(|_| {
            let c = Fq((i % q) as u32);
            i /= q;
            c
        })
        .collect()
}

/// x mod πA_v in canonical form.
pub fn reduce_mod_pi(x: &Element, ctx: &BaseContext) -> Result<RatFunc> {
    ctx.reduce_mod_pi(x)
}

/// Whether `reps` is a complete set of representatives mod π.
pub fn check_complete(reps: &[Element], ctx: &BaseContext) -> Result<bool> {
    let mut seen = HashSet::new();
    for x in reps {
        if !seen.insert(ctx.residue_key(x)?) {
            return Ok(false);
        }
    }
    Ok(Some(reps.len() as u64) == ctx.r())
}

/// Closure under pairwise addition (including x + x).
pub fn is_additively_closed(reps: &[RatFunc]) -> bool {
    let set: HashSet<&RatFunc> = reps.iter().collect();
    reps.iter().all(|a| reps.iter().all(|b| set.contains(&a.add_ref(b))))
}

/// Expands each residue key into F_p coordinates.
fn fp_vector(f: &Field, key: &[Fq]) -> Vec<Fq> {
    key.iter().flat_map(|&c| f.coords(c).into_iter().map(Fq)).collect()
}

/// Γ = F_q α_1 + ⋯ + F_q α_{ef}.
pub fn span_system(alphas: &[Element], ctx: BaseContext) -> Result<ResidueSystem> {
    span_system_with(alphas, ctx, false)
}

/// Γ = F_p α_1 + ⋯ + F_p α_u with u = log_p r.
pub fn span_system_prime(alphas: &[Element], ctx: BaseContext) -> Result<ResidueSystem> {
    span_system_with(alphas, ctx, true)
}

fn span_system_with(alphas: &[Element], ctx: BaseContext, over_prime: bool) -> Result<ResidueSystem> {
    let f = ctx.field().clone();
    let need = if over_prime { ctx.ef() * f.m() as usize } else { ctx.ef() };
    if alphas.len() != need {
        return Err(Error::Precondition(format!("a span system needs {need} generators, got {}", alphas.len())));
    }
    let keys = alphas.iter().map(|a| ctx.residue_key(a)).collect::<Result<Vec<_>>>()?;
    let independent = if over_prime {
        let pf = Field::prime(f.p())?;
        let rows: Vec<Vec<Fq>> = keys.iter().map(|k| fp_vector(&f, k)).collect();
        crate::linalg::rank(&pf, &rows) == rows.len()
    } else {
        crate::linalg::rank(&f, &keys) == keys.len()
    };
    if !independent {
        return Err(Error::DependentGenerators);
    }
    let span = Span { gens: alphas.to_vec(), over_prime };
    let radix = if over_prime { f.p() } else { f.q() } as usize;
    let count = radix.checked_pow(alphas.len() as u32).ok_or(Error::Unsupported("span too large".into()))?;
    if count > 1 << 20 {
        return Err(Error::Unsupported(format!("span of {count} elements")));
    }
    let mut reps = Vec::with_capacity(count);
    for i in 0..count {
        let c = span.coords(&f, i);
        let mut acc = Element::Rat(RatFunc::zero(&f));
        for (ci, a) in c.iter().zip(alphas) {
            if !ci.is_zero() {
                acc = acc.add(&a.scale(*ci))?;
            }
        }
        reps.push(acc);
    }
    let mut sys = ResidueSystem::new(ctx, reps)?;
    sys.span = Some(span);
    Ok(sys)
}

/// (1 − π^L)Γ, again complete since (1 − π^L)γ ≡ γ mod π.
pub fn twist_system(g: &ResidueSystem, l: u32) -> Result<ResidueSystem> {
    if l == 0 {
        return Err(Error::Precondition("twist exponent must be positive".into()));
    }
    let f = g.field();
    let one = Element::Rat(RatFunc::one(f));
    let factor = one.sub(&g.ctx.pi.pow(l)?)?;
    let reps = g.reps.iter().map(|x| factor.mul(x)).collect::<Result<Vec<_>>>()?;
    let mut sys = ResidueSystem::new(g.ctx.clone(), reps)?;
    if let Some(sp) = &g.span {
        let gens = sp.gens.iter().map(|x| factor.mul(x)).collect::<Result<Vec<_>>>()?;
        sys.span = Some(Span { gens, over_prime: sp.over_prime });
    }
    Ok(sys)
}

/// Γ + ξ for v(ξ) ≥ 0, preserving the order of representatives.
pub fn shift_system(g: &ResidueSystem, xi: &Element) -> Result<ResidueSystem> {
    g.ctx.residue_key(xi)?;
    let reps = g.reps.iter().map(|x| x.add(xi)).collect::<Result<Vec<_>>>()?;
    ResidueSystem::new(g.ctx.clone(), reps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Field {
        Field::prime(2).unwrap()
    }

    fn rat(s: &str) -> RatFunc {
        parse_ratfunc(s, &f2()).unwrap()
    }

    fn el(s: &str) -> Element {
        Element::Rat(rat(s))
    }

    fn vz(pi: &str) -> BaseContext {
        BaseContext::rational(Model::Vz, rat(pi)).unwrap()
    }

    #[test]
    fn reductions() {
        let ctx = vz("z^2");
        assert_eq!(ctx.reduce_mod_pi(&el("1/(1+z)")).unwrap(), rat("1+z"));
        assert!(ctx.reduce_mod_pi(&el("z^3")).unwrap().is_zero());
        let vp = BaseContext::rational(Model::Vp(Poly::from_ints(&f2(), &[1, 1, 1])), rat("1+z+z^2")).unwrap();
        assert_eq!(vp.reduce_mod_pi(&el("z+1")).unwrap(), rat("1+z"));
        assert_eq!(vp.f(), 2);
        assert_eq!(vp.r(), Some(4));
        assert!(matches!(ctx.reduce_mod_pi(&el("1/z")), Err(Error::NegativeValuation(-1))));
    }

    #[test]
    fn completeness() {
        let ctx = vz("z^2");
        let g: Vec<Element> = ["0", "1", "z", "1+z"].iter().map(|s| el(s)).collect();
        assert!(check_complete(&g, &ctx).unwrap());
        assert!(!check_complete(&g[..2], &ctx).unwrap());
        let vp = BaseContext::rational(Model::Vp(Poly::from_ints(&f2(), &[1, 1, 1])), rat("1+z+z^2")).unwrap();
        assert!(check_complete(&g, &vp).unwrap());
        for i in 0..4 {
            let mut h = g.clone();
            h.remove(i);
            assert!(!check_complete(&h, &ctx).unwrap());
        }
    }

    #[test]
    fn additive_closure() {
        let g: Vec<RatFunc> = ["0", "1", "z", "1+z"].iter().map(|s| rat(s)).collect();
        assert!(is_additively_closed(&g));
        let h: Vec<RatFunc> = ["0", "1", "z", "z^2"].iter().map(|s| rat(s)).collect();
        assert!(!is_additively_closed(&h));
        let shifted: Vec<RatFunc> = g.iter().map(|x| x.add_ref(&rat("z^2"))).collect();
        assert!(!is_additively_closed(&shifted));
        let shifted_z: Vec<RatFunc> = g.iter().map(|x| x.add_ref(&rat("z"))).collect();
        assert!(is_additively_closed(&shifted_z));
    }

    #[test]
    fn spans() {
        let s = span_system(&[el("1"), el("z")], vz("z^2")).unwrap();
        let names: Vec<String> = s.reps().iter().map(|x| x.to_string()).collect();
        assert_eq!(names, ["0", "1", "z", "1+z"]);
        let s = span_system(&[el("1"), el("1+z")], vz("z^2")).unwrap();
        let names: Vec<String> = s.reps().iter().map(|x| x.to_string()).collect();
        assert_eq!(names, ["0", "1", "1+z", "z"]);
        assert_eq!(span_system(&[el("1"), el("1+z^2")], vz("z^2")).unwrap_err(), Error::DependentGenerators);
    }

    #[test]
    fn twist_and_shift() {
        let g = ResidueSystem::from_rats(vz("z"), vec![rat("0"), rat("1")]).unwrap();
        let t = twist_system(&g, 1).unwrap();
        assert_eq!(t.rep(1).to_string(), "1+z");
        let s = span_system(&[el("1"), el("z")], vz("z^2")).unwrap();
        let t = twist_system(&s, 1).unwrap();
        let names: Vec<String> = t.reps().iter().map(|x| x.to_string()).collect();
        assert_eq!(names, ["0", "1+z^2", "z+z^3", "1+z+z^2+z^3"]);
        let sh = shift_system(&s, &el("z^2")).unwrap();
        assert_eq!(sh.rep(0).to_string(), "z^2");
        assert_eq!(sh.len(), 4);
    }

    #[test]
    fn json_roundtrip() {
        let s = span_system(&[el("1"), el("z")], vz("z^2")).unwrap();
        let j = s.to_json().unwrap();
        let back = ResidueSystem::from_json(&j, None).unwrap();
        assert_eq!(back.len(), 4);
        assert!(back.span().is_some());
        let g = ResidueSystem::from_rats(vz("z"), vec![rat("0"), rat("1+z")]).unwrap();
        let back = ResidueSystem::from_json(&g.to_json().unwrap(), None).unwrap();
        assert_eq!(back.rep(1).to_string(), "1+z");
    }

    #[test]
    fn descending_model() {
        let ctx = BaseContext::rational(Model::Vdeg, rat("1/z^2")).unwrap();
        assert_eq!(ctx.e(), 2);
        let s = span_system(&[el("1"), el("1/z")], ctx).unwrap();
        assert_eq!(s.digit_of(&el("z/(1+z^2)")).unwrap(), 2);
    }
}
