//! Algebraic series: bivariate relations R(z, w) and their roots in
//! F_q((z)) or F_q((1/z)) computed by Newton lifting.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{format_bivariate, format_series_literal, parse_bivariate, parse_ratfunc, parse_series_literal};
use crate::field::{Field, FieldDesc, Fq};
use crate::poly::Poly;
use crate::ratfunc::RatFunc;
use crate::series::Series;
use crate::stream::{LaurentStream, Orientation};

/// A polynomial in w with coefficients in F_q[z]; `coeffs[i]` multiplies w^i.
#[derive(Clone, PartialEq, Eq)]
pub struct BiPoly {
    field: Field,
    coeffs: Vec<Poly>,
}

impl fmt::Debug for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BiPoly({self})")
    }
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_bivariate(&self.coeffs))
    }
}

/// Expansion of a polynomial in z in the local parameter t of `orient`,
/// to absolute precision `prec`.
pub fn poly_series(p: &Poly, orient: Orientation, prec: i64) -> Series {
    let f = p.field();
    match orient {
        Orientation::Ascending => Series::from_poly(p, prec),
        Orientation::Descending => {
            if p.is_zero() {
                return Series::zero(f, prec);
            }
            let d = p.degree_or_neg();
            let mut c: Vec<Fq> = p.coeffs().to_vec();
            c.reverse();
            Series::new(f, -d, c).extend_exact(prec).truncate(prec)
        }
    }
}

/// Expansion of a rational function of z in the local parameter t.
pub fn ratfunc_series(x: &RatFunc, orient: Orientation, prec: i64) -> Series {
    match orient {
        Orientation::Ascending => Series::from_ratfunc(x, prec),
        Orientation::Descending => Series::from_ratfunc(&x.invert_variable(), prec),
    }
}

impl BiPoly {
    pub fn new(field: &Field, mut coeffs: Vec<Poly>) -> BiPoly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        BiPoly { field: field.clone(), coeffs }
    }

    pub fn parse(s: &str, field: &Field) -> Result<BiPoly> {
        Ok(BiPoly::new(field, parse_bivariate(s, field)?))
    }

    /// w − x for x = a/b, cleared: b·w − a.
    pub fn linear(x: &RatFunc) -> BiPoly {
        BiPoly::new(x.field(), vec![x.num().neg_ref(), x.den().clone()])
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree in w (0 for the zero polynomial).
    pub fn degree_w(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Maximal z-degree of a coefficient.
    pub fn degree_z(&self) -> usize {
        self.coeffs.iter().filter_map(|c| c.deg().finite()).max().unwrap_or(0)
    }

    pub fn derivative_w(&self) -> BiPoly {
        let f = &self.field;
        let c = self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c.scale(f.from_int(i as i64))).collect();
        BiPoly::new(f, c)
    }

    /// R(z, s) to absolute precision `prec`, treating `s` as exact.
    pub fn eval_series(&self, s: &Series, orient: Orientation, prec: i64) -> Series {
        let f = &self.field;
        let mut acc = Series::zero(f, prec);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul_to(s, prec).add(&poly_series(c, orient, prec).extend_exact(prec));
            acc = acc.extend_exact(prec).truncate(prec);
        }
        acc
    }

    /// R(z, f) as a lazy stream.
    pub fn eval_stream(&self, s: &LaurentStream) -> Result<LaurentStream> {
        let o = s.orientation();
        let mut acc = LaurentStream::zero(&self.field, o);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(s)?.add(&LaurentStream::from_poly(c, o))?;
        }
        Ok(acc)
    }
}

/// An algebraic series given by a relation R(z, f) = 0 and a seed prefix
/// picking out one root.
#[derive(Clone, Debug)]
pub struct AlgebraicSpec {
    pub r: BiPoly,
    /// The seed as an exact Laurent polynomial in t.
    pub seed: Series,
    /// Absolute precision to which the seed is asserted.
    pub seed_prec: i64,
    pub orientation: Orientation,
}

#[derive(Serialize, Deserialize)]
struct SpecFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    field: Option<FieldDesc>,
    #[serde(rename = "R")]
    r: String,
    #[serde(default)]
    seed: Option<String>,
    #[serde(default = "default_orientation")]
    orientation: Orientation,
}

fn default_orientation() -> Orientation {
    Orientation::Ascending
}

impl AlgebraicSpec {
    pub fn new(r: BiPoly, seed: Series, seed_prec: i64, orientation: Orientation) -> AlgebraicSpec {
        AlgebraicSpec { r, seed, seed_prec, orientation }
    }

    /// Parses a seed given either as a literal `[m; c, ...]` (indices in t)
    /// or as a Laurent polynomial expression in z.
    pub fn parse_seed(s: &str, field: &Field, orient: Orientation) -> Result<(Series, i64)> {
        let s = s.trim();
        if s.starts_with('[') {
            let (m, c) = parse_series_literal(s, field)?;
            let prec = m + c.len() as i64;
            return Ok((Series::new(field, m, c), prec));
        }
        let x = parse_ratfunc(s, field)?;
        if x.is_zero() {
            return Ok((Series::new(field, 0, Vec::new()), 0));
        }
        if x.den().weight() != 1 {
            return Err(Error::Parse { pos: 0, msg: "seed must be a Laurent polynomial".into() });
        }
        let k = x.den().degree_or_neg();
        let prec = match orient {
            Orientation::Ascending => x.num().degree_or_neg() - k + 1,
            Orientation::Descending => k - x.num().low_degree().unwrap_or(0) as i64 + 1,
        };
        Ok((ratfunc_series(&x, orient, prec), prec))
    }

    pub fn parse(r: &str, seed: Option<&str>, field: &Field, orient: Orientation) -> Result<AlgebraicSpec> {
        let r = BiPoly::parse(r, field)?;
        let (seed, prec) = match seed {
            Some(s) => AlgebraicSpec::parse_seed(s, field, orient)?,
            None => (Series::new(field, 0, Vec::new()), 0),
        };
        Ok(AlgebraicSpec::new(r, seed, prec, orient))
    }

    /// The spec of a rational function (linear relation, no seed needed).
    pub fn rational(x: &RatFunc, orient: Orientation) -> AlgebraicSpec {
        let f = x.field();
        AlgebraicSpec::new(BiPoly::linear(x), Series::new(f, 0, Vec::new()), 0, orient)
    }

    /// Reads `{"R": ..., "seed": ..., "orientation": ..., "field": ...}`.
    /// The field in the file takes precedence over `default_field`.
    pub fn from_json(s: &str, default_field: Option<&Field>) -> Result<AlgebraicSpec> {
        let file: SpecFile = serde_json::from_str(s)?;
        let field = match (&file.field, default_field) {
            (Some(d), _) => d.build()?,
            (None, Some(f)) => f.clone(),
            (None, None) => Field::prime(2)?,
        };
        AlgebraicSpec::parse(&file.r, file.seed.as_deref(), &field, file.orientation)
    }

    pub fn to_json(&self) -> String {
        let f = self.field();
        let seed = Some(format_series_literal(self.seed.start(), self.seed.coeffs(), f));
        let file =
            SpecFile { field: Some(FieldDesc::of(f)), r: self.r.to_string(), seed, orientation: self.orientation };
        serde_json::to_string(&file).expect("serializable")
    }

    pub fn field(&self) -> &Field {
        self.r.field()
    }

    /// The root as a rational function when R is linear in w.
    pub fn as_rational(&self) -> Option<RatFunc> {
        if self.r.degree_w() != 1 {
            return None;
        }
        let c = self.r.coeffs();
        RatFunc::new(c[0].neg_ref(), c[1].clone()).ok()
    }

    /// R(z, f) to absolute precision `prec` for a truncation `f`.
    pub fn residual(&self, f: &Series, prec: i64) -> Series {
        self.r.eval_series(f, self.orientation, prec)
    }
}

/// The branch of R(z, w) = 0 selected by the seed, as a lazy stream; each
/// refinement doubles the precision (Newton iteration).
pub fn hensel_root(spec: &AlgebraicSpec) -> Result<LaurentStream> {
    let f = spec.field().clone();
    let orient = spec.orientation;
    if spec.r.is_zero() || spec.r.degree_w() == 0 {
        return Err(Error::Precondition("relation must have positive degree in w".into()));
    }
    if let Some(x) = spec.as_rational() {
        let s = LaurentStream::from_ratfunc(&x, orient);
        check_seed_prefix(spec, &s)?;
        return Ok(s);
    }
    let dr = spec.r.derivative_w();
    if dr.is_zero() {
        return Err(Error::MultipleRoot);
    }
    let seed = spec.seed.clone().normalize();
    // exact evaluation window: everything involved is a finite Laurent polynomial
    let reach = seed.prec().abs() + seed.start().abs() + spec.seed_prec.abs() + 1;
    let wide = (spec.r.degree_w() as i64 + 1) * reach + 2 * spec.r.degree_z() as i64 + 16;
    let rs = spec.residual(&seed.clone().extend_exact(wide), wide);
    let ds = dr.eval_series(&seed.clone().extend_exact(wide), orient, wide);
    let delta = match ds.valuation() {
        Some(v) if v < spec.seed_prec.max(seed.prec()) => v,
        _ => return Err(Error::MultipleRoot),
    };
    // lower bound for the valuations of the Taylor coefficients of order ≥ 2
    let vx = seed.valuation().unwrap_or(0).min(0);
    let taylor = spec
        .r
        .coeffs()
        .iter()
        .enumerate()
        .skip(2)
        .filter(|(_, c)| !c.is_zero())
        .map(|(j, c)| {
            let vc = match orient {
                Orientation::Ascending => c.low_degree().expect("nonzero") as i64,
                Orientation::Descending => -c.degree_or_neg(),
            };
            vc + (j as i64 - 2) * vx
        })
        .min()
        .unwrap_or(0)
        .min(0);
    let p0 = match rs.valuation() {
        None => {
            let s = LaurentStream::from_series(&seed, orient);
            check_seed_prefix(spec, &s)?;
            return Ok(s);
        }
        Some(v) if v > 2 * delta - taylor => v - delta,
        Some(v) => {
            return Err(Error::AmbiguousSeed(format!(
                "v(R(seed)) = {v} is not above 2·v(R'(seed)) = {}",
                2 * delta - taylor
            )))
        }
    };
    let start = seed.start().min(p0).min(seed.valuation().unwrap_or(p0));
    let r = spec.r.clone();
    let mut cur = seed.clone().extend_exact(p0).truncate(p0);
    let mut cur_prec = p0;
    let stream = LaurentStream::from_block(&f, orient, start, move |cache, n| {
        let need = start + n as i64;
        while cur_prec < need {
            let target = 2 * cur_prec - delta + taylor;
            let w = target + delta.abs() + 2;
            let fx = cur.clone().extend_exact(w);
            let num = r.eval_series(&fx, orient, w);
            let den = dr.eval_series(&fx, orient, w);
            let corr = if num.is_zero() {
                Series::zero(fx.field(), target)
            } else {
                num.div(&den).expect("derivative is a unit on the branch")
            };
            cur = fx.sub(&corr).truncate(target);
            cur_prec = target;
        }
        let len = (cur_prec - start) as usize;
        cache.clear();
        cache.extend((0..len as i64).map(|i| {
            let k = start + i;
            if k < cur.prec() {
                cur.coeff(k)
            } else {
                Fq::ZERO
            }
        }));
    });
    check_seed_prefix(spec, &stream)?;
    Ok(stream)
}

fn check_seed_prefix(spec: &AlgebraicSpec, s: &LaurentStream) -> Result<()> {
    let seed = &spec.seed;
    for n in seed.start()..spec.seed_prec.min(seed.prec()) {
        if s.coeff(n) != seed.coeff(n) {
            return Err(Error::AmbiguousSeed(format!("the root differs from the seed at t^{n}")));
        }
    }
    Ok(())
}
