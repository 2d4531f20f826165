//! The reproducible test corpus and its acceptance report.

use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebraic::{hensel_root, AlgebraicSpec};
use crate::automata::{kernel_profile, Dfao};
use crate::beta::{beta_automaton, beta_period_exact, bridge, bridge_digit, d_beta_rational, BetaContext};
use crate::christol::{decode, encode, q2_powerseries_digits, shifted_christol, span_christol};
use crate::error::Result;
use crate::expand::{
    convert_expansion, detect_period_bounded, detect_period_exact, expand, expand_from, lemma21_witness, resum,
    twist_expansion, PeriodStatus,
};
use crate::expr::parse_ratfunc;
use crate::field::{Field, Fq};
use crate::poly::Poly;
use crate::ratfunc::RatFunc;
use crate::residue::{shift_system, span_system_prime, twist_system, BaseContext, Element, Model, ResidueSystem};
use crate::stream::{LaurentStream, Orientation};

/// Knobs of a corpus run; echoed into the report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    /// Random rational inputs per setting (criterion 1).
    pub samples: usize,
    /// Digits compared between independent computations.
    pub digits: usize,
    /// Verification precision for relations.
    pub verify: usize,
    /// Remainder cap for exact period detection.
    pub cap: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { seed: 0x5eed, samples: 200, digits: 512, verify: 1024, cap: 100_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: usize,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    #[serde(skip)]
    pub millis: u128,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "criterion {:>2} {verdict} {} ({} ms): {}", self.id, self.name, self.millis, self.detail)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CorpusReport {
    pub config: RunConfig,
    pub checks: Vec<CheckResult>,
}

impl CorpusReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for CorpusReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "corpus run: seed={} samples={} digits={} verify={} cap={}",
            self.config.seed, self.config.samples, self.config.digits, self.config.verify, self.config.cap
        )?;
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        write!(f, "{passed}/{} criteria passed", self.checks.len())
    }
}

pub const CRITERIA: [&str; 10] = [
    "periodic round-trip for rational inputs",
    "non-periodic witness when property A fails",
    "Christol encoder",
    "Christol decoder round-trip",
    "span construction agrees with greedy digits",
    "twist and shift coherence",
    "power-series digits over F_2",
    "beta-expansion suite",
    "negative control (perfect squares)",
    "algebra substrate",
];

/// Runs the criteria listed in `only` (all if empty), in order.
pub fn run(config: &RunConfig, only: &[usize]) -> CorpusReport {
    let ids: Vec<usize> = if only.is_empty() { (1..=CRITERIA.len()).collect() } else { only.to_vec() };
    let checks =
        ids.into_iter().filter(|id| (1..=CRITERIA.len()).contains(id)).map(|id| criterion(id, config)).collect();
    CorpusReport { config: config.clone(), checks }
}

pub fn criterion(id: usize, config: &RunConfig) -> CheckResult {
    let t = Instant::now();
    let outcome = match id {
        1 => periodic_round_trip(config),
        2 => witness_check(),
        3 => encoder_check(),
        4 => decoder_check(config),
        5 => span_check(config),
        6 => twist_shift_check(config),
        7 => q2_check(),
        8 => beta_check(config),
        9 => squares_check(),
        _ => algebra_check(config),
    };
    let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    CheckResult { id, name: CRITERIA[id - 1].to_string(), passed, detail, millis: t.elapsed().as_millis() }
}

type Outcome = Result<(bool, String)>;

fn f2() -> Field {
    Field::prime(2).expect("2 is prime")
}

fn rat(s: &str) -> RatFunc {
    parse_ratfunc(s, &f2()).expect("corpus literal")
}

fn rats(xs: &[&str]) -> Vec<RatFunc> {
    xs.iter().map(|s| rat(s)).collect()
}

/// The four (π, Γ) settings with property A.
pub fn periodic_settings() -> Result<Vec<(String, ResidueSystem)>> {
    let gens = [Element::Rat(rat("1")), Element::Rat(rat("z"))];
    let s1 = span_system_prime(&gens, BaseContext::rational(Model::Vz, rat("z^2"))?)?;
    let s2 = span_system_prime(&gens, BaseContext::rational(Model::Vz, rat("z^2/(1+z)"))?)?;
    let s3 = ResidueSystem::from_rats(BaseContext::rational(Model::Vz, rat("z"))?, rats(&["0", "1"]))?;
    let p = rat("z^2+z+1");
    let s4 =
        ResidueSystem::from_rats(BaseContext::rational(Model::Vp(p.num().clone()), p)?, rats(&["0", "1", "z", "1+z"]))?;
    Ok(vec![
        ("pi=z^2, span{1,z}".into(), s1),
        ("pi=z^2/(1+z), span{1,z}".into(), s2),
        ("pi=z, F_2".into(), s3),
        ("P=z^2+z+1, deg<2".into(), s4),
    ])
}

/// A random element of F_q(z) with numerator and denominator of degree ≤ `deg`.
pub fn random_ratfunc(rng: &mut impl Rng, f: &Field, deg: usize) -> RatFunc {
    let q = f.q();
    let mut poly = |nonzero: bool| loop {
        let c: Vec<Fq> = (0..=deg).map(|_| Fq(rng.gen_range(0..q))).collect();
        let p = Poly::new(f, c);
        if !nonzero || !p.is_zero() {
            return p;
        }
    };
    let num = poly(false);
    let den = poly(true);
    RatFunc::new(num, den).expect("nonzero denominator")
}

fn periodic_round_trip(c: &RunConfig) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let f = f2();
    let mut total = 0;
    let mut max_period = 0;
    for (name, sys) in periodic_settings()? {
        for _ in 0..c.samples {
            let x = random_ratfunc(&mut rng, &f, 5);
            let cert = detect_period_exact(&x, &sys, c.cap)?;
            let greedy = expand(&Element::Rat(x.clone()), &sys)?.digits(c.digits)?;
            if cert.to_expansion(&sys)?.digits(c.digits)? != greedy {
                return Ok((false, format!("{name}: periodic digits of {x} differ from the greedy digits")));
            }
            if resum(&cert, &sys)? != x {
                return Ok((false, format!("{name}: resummation of {x} differs")));
            }
            max_period = max_period.max(cert.period);
            total += 1;
        }
    }
    Ok((
        true,
        format!(
            "{total} inputs certified, resummed exactly, {} digits compared; longest period {max_period}",
            c.digits
        ),
    ))
}

fn witness_check() -> Outcome {
    let sys = ResidueSystem::from_rats(BaseContext::rational(Model::Vz, rat("z+z^2"))?, rats(&["0", "1"]))?;
    let w = lemma21_witness(&sys)?;
    if w != rat("1+z") {
        return Ok((false, format!("witness {w}, expected 1+z")));
    }
    let d = expand(&Element::Rat(w), &sys)?;
    let digits = d.digits(4096)?;
    let support_ok = digits.iter().enumerate().all(|(n, &a)| (a == 1) == (n == 0 || n.is_power_of_two()));
    let cert = detect_period_bounded(&d, 4096, 64)?;
    let prefix = digits[..9].iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",");
    let bounded_ok = matches!(cert.status, PeriodStatus::NoneWithinBounds { .. });
    Ok((
        support_ok && bounded_ok,
        format!(
            "witness 1+z; prefix {prefix}; support {{0}}∪{{2^k}} through 4096: {support_ok}; bounded detector (4096, 64): {}",
            cert
        ),
    ))
}

fn artin() -> Result<AlgebraicSpec> {
    AlgebraicSpec::parse("w^2+w+z", Some("z"), &f2(), Orientation::Ascending)
}

fn encoder_check() -> Outcome {
    let m = encode(&artin()?, 4096)?;
    let ok = m.len() <= 4 && (0..4096u64).all(|n| (m.eval(n) == 1) == n.is_power_of_two());
    Ok((ok, format!("{} states; outputs equal the root's coefficients for n < 4096", m.len())))
}

/// Specs used by the round-trip checks.
pub fn corpus_specs() -> Result<Vec<AlgebraicSpec>> {
    let f4 = Field::new(2, 2, None)?;
    let f3 = Field::prime(3)?;
    Ok(vec![
        artin()?,
        AlgebraicSpec::rational(&rat("1/(1+z)"), Orientation::Ascending),
        AlgebraicSpec::rational(&rat("(1+z^3)/(1+z+z^4)"), Orientation::Ascending),
        AlgebraicSpec::parse("w^3+w+z", Some("z"), &f2(), Orientation::Ascending)?,
        AlgebraicSpec::parse("w^4+w+z", Some("z"), &f4, Orientation::Ascending)?,
        AlgebraicSpec::parse("w^2-(1+z)", Some("1"), &f3, Orientation::Ascending)?,
    ])
}

fn decoder_check(c: &RunConfig) -> Outcome {
    let mut lines = Vec::new();
    for spec in corpus_specs()? {
        let f = spec.field().clone();
        let m = encode(&spec, c.verify)?;
        let rep = decode(&m, &f, 16, c.verify)?;
        let root = hensel_root(&spec)?;
        let a: Vec<Fq> = (0..c.verify as i64).map(|n| root.coeff(n)).collect();
        if rep.relation.residual(&a, rep.power_base, c.verify).iter().any(|x| !x.is_zero()) {
            return Ok((false, format!("relation {} fails on the root of {}", rep.bipoly, spec.r)));
        }
        lines.push(format!("{} -> {}", spec.r, rep.bipoly));
    }
    Ok((true, format!("verified to {}: {}", c.verify, lines.join("; "))))
}

fn span_zz() -> Result<ResidueSystem> {
    span_system_prime(&[Element::Rat(rat("1")), Element::Rat(rat("z"))], BaseContext::rational(Model::Vz, rat("z^2"))?)
}

fn span_check(c: &RunConfig) -> Outcome {
    let sys = span_zz()?;
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed ^ 5);
    let mut xs = vec![Element::stream(hensel_root(&artin()?)?, "sum z^(2^n)")];
    xs.extend((0..4).map(|_| Element::Rat(random_ratfunc(&mut rng, &f2(), 4))));
    for x in &xs {
        let sc = span_christol(x, &sys, c.digits)?;
        let greedy = expand(x, &sys)?;
        let long = greedy.digits(4096)?;
        if sc.expansion.digits(c.digits)? != long[..c.digits] {
            return Ok((false, format!("digits of {x} differ")));
        }
        if let Some(n) = (0..4096).find(|&n| sc.dfao.eval(n as u64) != long[n]) {
            return Ok((false, format!("automaton for {x} is wrong at n = {n}")));
        }
    }
    Ok((true, format!("{} inputs: {} digits and automaton values for n < 4096 agree", xs.len(), c.digits)))
}

fn twist_shift_check(c: &RunConfig) -> Outcome {
    let sys = span_zz()?;
    let l = 2;
    let tw = twist_system(&sys, l)?;
    let factor = RatFunc::one(&f2()).sub_ref(&rat("z^2").pow(l as i64)?);
    let xs = [
        Element::Rat(rat("1/(1+z)")),
        Element::Rat(rat("(1+z^3)/(1+z+z^4)")),
        Element::stream(hensel_root(&artin()?)?, "f"),
    ];
    let _ = c;
    for x in &xs {
        let a = expand(x, &sys)?;
        // greedy digits of (1 − π^L)x over (1 − π^L)Γ
        let b = convert_expansion(&twist_expansion(&a, l)?, &tw)?;
        let (ae, be) = (a.digit_elements(128)?, b.digit_elements(128)?);
        for (n, (ai, bi)) in ae.iter().zip(&be).enumerate() {
            let want = factor.mul_ref(ai.as_rat().expect("rational digits"));
            if bi.as_rat() != Some(&want) {
                return Ok((false, format!("twist of {x}: b_{n} = {bi}, expected {want}")));
            }
        }
        let xi = Element::Rat(rat("z^2"));
        let (sh, _) = shifted_christol(x, &sys, &xi, 128)?;
        let direct = expand(x, &shift_system(&sys, &xi)?)?;
        if sh.digits(128)? != direct.digits(128)? {
            return Ok((false, format!("shifted construction for {x} differs from the greedy digits")));
        }
    }
    Ok((true, format!("{} inputs: b_n = (1-pi^{l})a_n and Γ+z^2 digits agree for 128 digits", xs.len())))
}

fn q2_check() -> Outcome {
    let f1 = Element::Rat(rat("1/(1+z)"));
    let f2e = Element::Rat(rat("z/(1+z)"));
    let zero = Element::Rat(rat("0"));
    let d = q2_powerseries_digits(&zero, &f1, &f2e)?;
    let digits = d.digits(256)?;
    let alternating = digits.iter().enumerate().all(|(n, &a)| a == if n % 2 == 0 { 1 } else { 0 });
    let greedy = expand(&zero, d.system())?.digits(256)? == digits;
    let cert = detect_period_exact(&RatFunc::zero(&f2()), d.system(), 64)?;
    let exact = cert.is_exact() && cert.period == 2 && cert.preperiod == 0;
    Ok((
        alternating && greedy && exact,
        format!("alternating f_2, f_1: {alternating}; exact period {}; matches greedy for 256: {greedy}", cert.period),
    ))
}

fn beta_check(c: &RunConfig) -> Outcome {
    let f = f2();
    let spec = AlgebraicSpec::parse("w^2+z*w+1", Some("z"), &f, Orientation::Descending)?;
    let ctx = BetaContext::from_spec(&spec)?;
    let one = RatFunc::one(&f);
    let cert = beta_period_exact(&one, &ctx, 64)?;
    let digits_ok = cert.expansion(1, 3).digits == vec![rat("z").num().clone(), Poly::one(&f), Poly::zero(&f)]
        && cert.preperiod == 3
        && cert.period == 1;
    let x = LaurentStream::constant(&f, Orientation::Descending, Fq::ONE);
    let n = c.digits;
    let db = d_beta_rational(&one, &ctx, n)?;
    let br = bridge(&x, &ctx, n)?;
    let got = br.expansion.digit_elements(n)?;
    // literal form: the greedy digits of βx/z^d are a_n/z^d
    let zd = RatFunc::z(&f).pow(ctx.d() as i64)?;
    let literal_x = Element::stream(ctx.beta().mul(&x)?.mul_ratfunc(&zd.inv()?)?, "beta*x/z^d");
    let literal = expand_from(&literal_x, ctx.system(), 0)?.digit_elements(n)?;
    let literal_fail = (1..=n).find(|&k| {
        literal[k - 1].as_rat() != Some(&RatFunc::from_poly(db.digit(k).clone()).div_ref(&zd).expect("nonzero"))
    });
    let corrected =
        (1..=n).all(|k| bridge_digit(db.digit(k), k, br.correction, ctx.d()).ok().as_ref() == got[k - 1].as_rat());
    let one_spec = AlgebraicSpec::parse("w+1", None, &f, Orientation::Descending)?;
    let ba = beta_automaton(&one_spec, &ctx, n)?;
    let auto_ok = ba.dfao.sequence(n + 1) == db.codes();
    let long = d_beta_rational(&one, &ctx, 1 << 16)?.codes();
    let prof = kernel_profile(&long[..1 << 16], 2, 8, 256)?;
    let bounded = prof.is_bounded_by(ba.dfao.len());
    let literal = match literal_fail {
        None => "holds".to_string(),
        Some(k) => format!(
            "fails at n = {k} (digit {}, a_n/z^d = {} is not in Γ_d); corrected identity digit_(n-1) = a_n/z^(d-1), with a_1 - c*z^d at n = 1: {corrected}",
            literal[k - 1],
            RatFunc::from_poly(db.digit(k).clone()).div_ref(&zd)?
        ),
    };
    Ok((
        digits_ok && literal_fail.is_none() && corrected && auto_ok && bounded,
        format!(
            "d_beta(1) = (z, 1, 0, ...): {digits_ok}; bridge identity: {literal}; automaton ({} states) agrees for {n}: {auto_ok}; kernel profile {:?} bounded: {bounded}",
            ba.dfao.len(),
            prof.counts
        ),
    ))
}

/// Automatic sequences of the corpus, as automata.
pub fn corpus_automata() -> Result<Vec<(String, Dfao)>> {
    let mut out = vec![("powers of two".to_string(), encode(&artin()?, 1024)?)];
    let f = f2();
    let spec = AlgebraicSpec::parse("w^2+z*w+1", Some("z"), &f, Orientation::Descending)?;
    let ctx = BetaContext::from_spec(&spec)?;
    let one_spec = AlgebraicSpec::parse("w+1", None, &f, Orientation::Descending)?;
    out.push(("d_beta(1)".into(), beta_automaton(&one_spec, &ctx, 256)?.dfao));
    out.push((
        "span digits of sum z^(2^n)".into(),
        span_christol(&Element::stream(hensel_root(&artin()?)?, "f"), &span_zz()?, 256)?.dfao,
    ));
    Ok(out)
}

fn squares_check() -> Outcome {
    let n = 1usize << 16;
    let squares: Vec<usize> = (0..n).map(|k| usize::from(k.isqrt().pow(2) == k)).collect();
    let p = kernel_profile(&squares, 2, 8, 256)?;
    let increasing = p.strictly_increasing(4, 8);
    let mut others = Vec::new();
    for (name, m) in corpus_automata()? {
        let q = kernel_profile(&m.sequence(n), 2, 8, 256)?;
        if q.strictly_increasing(4, 8) {
            return Ok((false, format!("automatic sequence {name} also grows: {:?}", q.counts)));
        }
        others.push(format!("{name} {:?}", &q.counts[4..]));
    }
    Ok((increasing, format!("squares {:?} at depths 4..8; automatic: {}", &p.counts[4..], others.join(", "))))
}

fn field_laws(f: &Field) -> bool {
    let els: Vec<Fq> = f.elements().collect();
    for &a in &els {
        if f.add(a, f.neg(a)) != Fq::ZERO || (a != Fq::ZERO && f.mul(a, f.inv(a).expect("unit")) != Fq::ONE) {
            return false;
        }
        for &b in &els {
            if f.add(a, b) != f.add(b, a) || f.mul(a, b) != f.mul(b, a) {
                return false;
            }
            for &c in &els {
                if f.add(f.add(a, b), c) != f.add(a, f.add(b, c))
                    || f.mul(f.mul(a, b), c) != f.mul(a, f.mul(b, c))
                    || f.mul(a, f.add(b, c)) != f.add(f.mul(a, b), f.mul(a, c))
                {
                    return false;
                }
            }
        }
    }
    true
}

fn algebra_check(c: &RunConfig) -> Outcome {
    let fields = [Field::prime(2)?, Field::new(2, 2, None)?, Field::new(2, 3, None)?, Field::new(3, 2, None)?];
    let laws = fields.iter().all(field_laws);
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed ^ 10);
    let mut ok = true;
    for k in 0..1000 {
        let f = &fields[k % fields.len()];
        let a = random_ratfunc(&mut rng, f, 6);
        let b = random_ratfunc(&mut rng, f, 4);
        let (pa, pb) = (a.num().clone(), b.den().clone());
        let (qq, r) = pa.divmod(&pb)?;
        ok &= qq.mul_ref(&pb).add_ref(&r) == pa && r.degree_or_neg() < pb.degree_or_neg();
        if !a.is_zero() && !b.is_zero() {
            let ab = a.mul_ref(&b);
            let sum = |u: crate::ratfunc::Val, v: crate::ratfunc::Val| u.finite().zip(v.finite()).map(|(u, v)| u + v);
            ok &= ab.val_z().finite() == sum(a.val_z(), b.val_z());
            ok &= ab.val_deg().finite() == sum(a.val_deg(), b.val_deg());
        }
    }
    Ok((laws && ok, format!("field laws on F_2, F_4, F_8, F_9: {laws}; 1000 divmod/valuation cases: {ok}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_criteria() {
        let c = RunConfig { samples: 3, ..RunConfig::default() };
        let r = run(&c, &[1, 3, 7, 10]);
        assert!(r.all_passed(), "{r}");
        let json = serde_json::to_string(&r).unwrap();
        let back: CorpusReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.checks.len(), 4);
    }
}
