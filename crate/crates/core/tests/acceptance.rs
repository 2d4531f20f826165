//! Acceptance criteria, each checked against an oracle written here.

use std::collections::{BTreeSet, HashMap};
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fexpand::automata::{kernel_profile, Dfao};
use fexpand::beta::{beta_automaton, bridge, bridge_digit, d_beta_rational, BetaContext};
use fexpand::christol::{decode, encode, q2_powerseries_digits, shifted_christol, span_christol};
use fexpand::corpus::{corpus_automata, corpus_specs, periodic_settings};
use fexpand::expand::{
    convert_expansion, detect_period_bounded, detect_period_exact, expand, expand_from, lemma21_witness, resum,
    twist_expansion, PeriodStatus,
};
use fexpand::expr::parse_ratfunc;
use fexpand::residue::{shift_system, span_system_prime, twist_system, BaseContext, Element, Model, ResidueSystem};
use fexpand::{hensel_root, AlgebraicSpec, BiPoly, Field, Fq, LaurentStream, Orientation, Poly, RatFunc};

type Check = Result<(bool, String), Box<dyn std::error::Error>>;

const SEED: u64 = 0xacce;

fn f2() -> Field {
    Field::prime(2).unwrap()
}

fn rat(s: &str) -> RatFunc {
    parse_ratfunc(s, &f2()).unwrap()
}

// ---------------------------------------------------------------- oracles

/// Valuations computed from scratch; None is +∞.
#[derive(Clone)]
enum V {
    Z,
    Deg,
    P(Poly),
}

fn low(p: &Poly) -> i64 {
    p.coeffs().iter().position(|c| !c.is_zero()).unwrap() as i64
}

fn deg(p: &Poly) -> i64 {
    p.coeffs().len() as i64 - 1
}

fn mult(p: &Poly, g: &Poly) -> i64 {
    let mut k = 0;
    let mut p = p.clone();
    loop {
        let (q, r) = p.divmod(g).unwrap();
        if !r.is_zero() {
            return k;
        }
        p = q;
        k += 1;
    }
}

fn val(v: &V, x: &RatFunc) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    Some(match v {
        V::Z => low(x.num()) - low(x.den()),
        V::Deg => deg(x.den()) - deg(x.num()),
        V::P(g) => mult(x.num(), g) - mult(x.den(), g),
    })
}

fn start(v: &V, x: &RatFunc, pi: &RatFunc) -> i64 {
    let e = val(v, pi).unwrap();
    val(v, x).map_or(0, |w| w.div_euclid(e).min(0))
}

/// Exact greedy expansion over F_q(z): y ← (y − r)/π with v(y − r) ≥ v(π).
struct Greedy<'a> {
    v: V,
    pi: RatFunc,
    reps: &'a [RatFunc],
    y: RatFunc,
}

impl<'a> Greedy<'a> {
    fn new(x: &RatFunc, pi: &RatFunc, reps: &'a [RatFunc], v: V, m: i64) -> Greedy<'a> {
        let y = x.div_ref(&pi.pow(m).unwrap()).unwrap();
        Greedy { v, pi: pi.clone(), reps, y }
    }

    fn step(&mut self) -> usize {
        let e = val(&self.v, &self.pi).unwrap();
        let hits: Vec<usize> = (0..self.reps.len())
            .filter(|&i| val(&self.v, &self.y.sub_ref(&self.reps[i])).is_none_or(|w| w >= e))
            .collect();
        assert_eq!(hits.len(), 1, "digit set is not a complete residue system at {}", self.y);
        let i = hits[0];
        self.y = self.y.sub_ref(&self.reps[i]).div_ref(&self.pi).unwrap();
        i
    }

    fn take(&mut self, n: usize) -> Vec<usize> {
        (0..n).map(|_| self.step()).collect()
    }

    /// First repeated remainder: (N, L, digits a_m..a_{m+N+L−1}).
    fn period(&mut self, cap: usize) -> Option<(usize, usize, Vec<usize>)> {
        let mut seen = HashMap::new();
        let mut digits = Vec::new();
        for k in 0..cap {
            if let Some(&i) = seen.get(&self.y) {
                return Some((i, k - i, digits));
            }
            seen.insert(self.y.clone(), k);
            digits.push(self.step());
        }
        None
    }
}

fn reps_of(sys: &ResidueSystem) -> Vec<RatFunc> {
    sys.rational_reps().expect("rational digits")
}

/// Ascending coefficients c_0..c_{n−1} of x with v_z(x) ≥ 0, by long division.
fn coeffs(x: &RatFunc, n: usize) -> Vec<Fq> {
    let f = x.field();
    let (a, b) = (x.num().coeffs(), x.den().coeffs());
    assert!(!b[0].is_zero());
    let inv = f.inv(b[0]).unwrap();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut s = a.get(k).copied().unwrap_or(Fq::ZERO);
        for j in 1..b.len().min(k + 1) {
            s = f.sub(s, f.mul(b[j], out[k - j]));
        }
        out.push(f.mul(s, inv));
    }
    out
}

/// Greedy digits of a truncated power series for π = z^2 and polynomial digits.
fn greedy_z2(f: &Field, mut y: Vec<Fq>, reps: &[Poly], n: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        assert!(y.len() >= 2, "oracle precision exhausted");
        let i = reps.iter().position(|r| r.coeff(0) == y[0] && r.coeff(1) == y[1]).expect("complete residue system");
        for (k, &c) in reps[i].coeffs().iter().enumerate() {
            if k < y.len() {
                y[k] = f.sub(y[k], c);
            }
        }
        y.drain(..2);
        out.push(i);
    }
    out
}

fn poly_reps(sys: &ResidueSystem) -> Vec<Poly> {
    reps_of(sys).iter().map(|r| r.as_poly().expect("polynomial digit").clone()).collect()
}

/// Distinct length-`len` prefixes of the 2-kernel, cumulatively by depth.
fn kernel_counts(a: &[usize], depth: usize, len: usize) -> Vec<usize> {
    let mut seen = BTreeSet::new();
    (0..=depth)
        .map(|i| {
            let k = 1usize << i;
            for j in 0..k {
                seen.insert((0..len).map(|n| a[j + k * n]).collect::<Vec<_>>());
            }
            seen.len()
        })
        .collect()
}

/// R(z, F) mod z^n with F given by its coefficients.
fn eval_bipoly(r: &BiPoly, fc: &[Fq], n: usize) -> Poly {
    let field = r.field();
    let fpoly = Poly::new(field, fc[..n].to_vec());
    let mut acc = Poly::zero(field);
    let mut pw = Poly::one(field);
    for c in r.coeffs() {
        acc = acc.add_ref(&c.mul_trunc(&pw, n));
        pw = pw.mul_trunc(&fpoly, n);
    }
    acc.truncate(n)
}

// ---------------------------------------------------------------- criteria

fn c1() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let f = f2();
    let models = [V::Z, V::Z, V::Z, V::P(rat("z^2+z+1").num().clone())];
    let mut total = 0;
    for ((name, sys), v) in periodic_settings()?.into_iter().zip(models) {
        let pi = sys.ctx().pi().as_rat().unwrap().clone();
        let reps = reps_of(&sys);
        for _ in 0..200 {
            let x = random_ratfunc(&mut rng, &f, 5);
            let m = start(&v, &x, &pi);
            let (n0, l, od) = Greedy::new(&x, &pi, &reps, v.clone(), m).period(100_000).ok_or("oracle cap")?;
            let cert = detect_period_exact(&x, &sys, 100_000)?;
            if !cert.is_exact() || cert.m != m || cert.preperiod - m != n0 as i64 || cert.period != l {
                return Ok((false, format!("{name}: x = {x}: certificate {cert}, oracle N={}, L={l}", m + n0 as i64)));
            }
            let regenerated = cert.to_expansion(&sys)?.digits(512)?;
            let greedy = expand(&Element::Rat(x.clone()), &sys)?.digits(512)?;
            let oracle: Vec<usize> = (0..512).map(|k| if k < n0 { od[k] } else { od[n0 + (k - n0) % l] }).collect();
            if regenerated != oracle || greedy != oracle {
                return Ok((false, format!("{name}: digits of {x} disagree with the oracle")));
            }
            // closed-form resummation from the oracle digits
            let term = |k: usize, e: i64| reps[od[k]].mul_ref(&pi.pow(e).unwrap());
            let head = (0..n0).fold(RatFunc::zero(&f), |s, k| s.add_ref(&term(k, m + k as i64)));
            let block = (0..l).fold(RatFunc::zero(&f), |s, j| s.add_ref(&term(n0 + j, j as i64)));
            let tail = pi.pow(m + n0 as i64)?.mul_ref(&block.div_ref(&RatFunc::one(&f).sub_ref(&pi.pow(l as i64)?))?);
            if head.add_ref(&tail) != x || resum(&cert, &sys)? != x {
                return Ok((false, format!("{name}: resummation of {x} is not exact")));
            }
            total += 1;
        }
    }
    Ok((
        true,
        format!(
            "{total} rational inputs over 4 settings: certificates, 512 digits and resummation match the exact oracle"
        ),
    ))
}

fn random_ratfunc(rng: &mut impl Rng, f: &Field, deg: usize) -> RatFunc {
    loop {
        let num = Poly::new(f, (0..=deg).map(|_| Fq(rng.gen_range(0..f.q()))).collect());
        let den = Poly::new(f, (0..=deg).map(|_| Fq(rng.gen_range(0..f.q()))).collect());
        if !den.is_zero() {
            return RatFunc::new(num, den).unwrap();
        }
    }
}

fn c2() -> Check {
    let pi = rat("z+z^2");
    let sys = ResidueSystem::from_rats(BaseContext::rational(Model::Vz, pi.clone())?, vec![rat("0"), rat("1")])?;
    let w = lemma21_witness(&sys)?;
    let reps = reps_of(&sys);
    let oracle = Greedy::new(&w, &pi, &reps, V::Z, 0).take(128);
    let d = expand(&Element::Rat(w.clone()), &sys)?;
    let digits = d.digits(4096)?;
    let prefix_ok = digits[..9] == [1, 1, 1, 0, 1, 0, 0, 0, 1] && digits[..128] == oracle[..];
    let support_ok = digits.iter().enumerate().all(|(n, &a)| (a == 1) == (n == 0 || n.is_power_of_two()));
    let cert = detect_period_bounded(&d, 4096, 64)?;
    let none = matches!(cert.status, PeriodStatus::NoneWithinBounds { .. });
    let last_one = digits.iter().rposition(|&a| a == 1).unwrap();
    Ok((
        w == rat("1+z") && prefix_ok && support_ok && none,
        format!(
            "witness {w}; prefix and 128 oracle digits agree: {prefix_ok}; support {{0}}∪{{2^k}} to 4096: {support_ok}; \
             bounded detector: {cert} (last nonzero digit at {last_one}, so the remaining {} zeros form a period-1 tail)",
            4095 - last_one
        ),
    ))
}

fn c3() -> Check {
    let spec = AlgebraicSpec::parse("w^2+w+z", Some("z"), &f2(), Orientation::Ascending)?;
    let m = encode(&spec, 4096)?;
    // f = z + f^2: f_1 = 1, f_{2n} = f_n
    let mut oracle = vec![0usize; 4096];
    oracle[1] = 1;
    for n in 2..4096 {
        oracle[n] = if n % 2 == 0 { oracle[n / 2] } else { 0 };
    }
    let root = hensel_root(&spec)?;
    let ok_root = (0..4096).all(|n| root.coeff(n as i64).code() as usize == oracle[n]);
    let ok = (0..4096u64).all(|n| m.eval(n) == oracle[n as usize] && (oracle[n as usize] == 1) == n.is_power_of_two());
    Ok((
        m.len() <= 4 && ok && ok_root,
        format!(
            "{} states; outputs equal the recursion f = z + f^2 and the Hensel root for n < 4096: {}",
            m.len(),
            ok && ok_root
        ),
    ))
}

fn c4() -> Check {
    let mut lines = Vec::new();
    let v = 1024;
    for spec in corpus_specs()? {
        let f = spec.field().clone();
        let m = encode(&spec, v)?;
        let fc: Vec<Fq> = (0..v as u64).map(|n| Fq(m.eval(n) as u32)).collect();
        // the automaton's series is a root of the defining relation
        if !eval_bipoly(&spec.r, &fc, v).is_zero() {
            return Ok((false, format!("automaton series is not a root of {} mod z^{v}", spec.r)));
        }
        let rep = decode(&m, &f, 16, v)?;
        let ok = rep.verified_to >= v && !rep.bipoly.is_zero() && eval_bipoly(&rep.bipoly, &fc, v).is_zero();
        if !ok {
            return Ok((false, format!("decoded relation {} has a nonzero residual mod z^{v}", rep.bipoly)));
        }
        lines.push(format!("{} -> {}", spec.r, rep.bipoly));
    }
    Ok((true, format!("{} specs; residuals zero mod z^{v}: {}", lines.len(), lines.join("; "))))
}

fn span_zz() -> Result<ResidueSystem, fexpand::Error> {
    span_system_prime(&[Element::Rat(rat("1")), Element::Rat(rat("z"))], BaseContext::rational(Model::Vz, rat("z^2"))?)
}

fn artin_coeffs(n: usize) -> Vec<Fq> {
    (0..n).map(|k| Fq(u32::from(k.is_power_of_two()))).collect()
}

fn c5() -> Check {
    let f = f2();
    let sys = span_zz()?;
    let preps = poly_reps(&sys);
    let spec = AlgebraicSpec::parse("w^2+w+z", Some("z"), &f, Orientation::Ascending)?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 5);
    let mut xs: Vec<(Element, Vec<Fq>)> =
        vec![(Element::stream(hensel_root(&spec)?, "sum z^(2^n)"), artin_coeffs(8200))];
    while xs.len() < 5 {
        let x = random_ratfunc(&mut rng, &f, 4);
        if val(&V::Z, &x).is_none_or(|w| w >= 0) {
            xs.push((Element::Rat(x.clone()), coeffs(&x, 8200)));
        }
    }
    for (x, c) in &xs {
        let oracle = greedy_z2(&f, c.clone(), &preps, 4096);
        let sc = span_christol(x, &sys, 512)?;
        if sc.expansion.start() != 0
            || sc.expansion.digits(512)? != oracle[..512]
            || expand(x, &sys)?.digits(512)? != oracle[..512]
        {
            return Ok((false, format!("digits of {x} differ from the coefficient oracle")));
        }
        if let Some(n) = (0..4096).find(|&n| sc.dfao.eval(n as u64) != oracle[n]) {
            return Ok((false, format!("automaton for {x} is wrong at n = {n}")));
        }
    }
    Ok((
        true,
        format!("{} inputs: 512 digits and automaton values for n < 4096 equal the coefficient oracle", xs.len()),
    ))
}

fn c6() -> Check {
    let f = f2();
    let sys = span_zz()?;
    let l = 2u32;
    let factor = Poly::one(&f).sub_ref(&Poly::monomial(&f, Fq::ONE, 4));
    let preps = poly_reps(&sys);
    let twisted: Vec<Poly> = preps.iter().map(|r| r.mul_ref(&factor)).collect();
    let xi = Poly::monomial(&f, Fq::ONE, 2);
    let shifted: Vec<Poly> = preps.iter().map(|r| r.add_ref(&xi)).collect();
    let spec = AlgebraicSpec::parse("w^2+w+z", Some("z"), &f, Orientation::Ascending)?;
    let xs: Vec<(Element, Vec<Fq>)> = vec![
        (Element::Rat(rat("1/(1+z)")), coeffs(&rat("1/(1+z)"), 600)),
        (Element::Rat(rat("(1+z^3)/(1+z+z^4)")), coeffs(&rat("(1+z^3)/(1+z+z^4)"), 600)),
        (Element::stream(hensel_root(&spec)?, "sum z^(2^n)"), artin_coeffs(600)),
    ];
    let tw = twist_system(&sys, l)?;
    let sh = shift_system(&sys, &Element::Rat(rat("z^2")))?;
    for (x, c) in &xs {
        let a = greedy_z2(&f, c.clone(), &preps, 128);
        let fx = Poly::new(&f, c.clone()).mul_trunc(&factor, c.len());
        let mut fc = fx.coeffs().to_vec();
        fc.resize(c.len(), Fq::ZERO);
        let b = greedy_z2(&f, fc, &twisted, 128);
        if a != b {
            return Ok((false, format!("oracle: twisted digits of {x} are not (1-pi^{l})a_n")));
        }
        let lib = convert_expansion(&twist_expansion(&expand(x, &sys)?, l)?, &tw)?.digit_elements(128)?;
        for (n, e) in lib.iter().enumerate() {
            if e.as_rat().and_then(|r| r.as_poly()) != Some(&twisted[a[n]]) {
                return Ok((false, format!("twist of {x}: b_{n} = {e}, expected {}", twisted[a[n]])));
            }
        }
        let oracle = greedy_z2(&f, c.clone(), &shifted, 128);
        let (d, _) = shifted_christol(x, &sys, &Element::Rat(rat("z^2")), 128)?;
        let got: Vec<Option<Poly>> =
            d.digit_elements(128)?.iter().map(|e| e.as_rat().and_then(|r| r.as_poly()).cloned()).collect();
        let want: Vec<Option<Poly>> = oracle.iter().map(|&i| Some(shifted[i].clone())).collect();
        if got != want || expand(x, &sh)?.digit_elements(128)?.len() != 128 {
            return Ok((false, format!("shifted digits of {x} differ from the oracle")));
        }
    }
    Ok((
        true,
        format!("{} inputs: b_n = (1-z^4)a_n and Γ+z^2 digits equal the coefficient oracle for 128 digits", xs.len()),
    ))
}

fn c7() -> Check {
    let f = f2();
    let (f1, f2r) = (rat("1/(1+z)"), rat("z/(1+z)"));
    let zero = RatFunc::zero(&f);
    let reps = vec![f1.clone(), f2r.clone()];
    let (n0, l, od) = Greedy::new(&zero, &rat("z"), &reps, V::Z, 0).period(16).ok_or("oracle cap")?;
    let oracle: Vec<usize> = (0..256).map(|k| od[n0 + (k - n0) % l]).collect();
    let d = q2_powerseries_digits(&Element::Rat(zero.clone()), &Element::Rat(f1.clone()), &Element::Rat(f2r.clone()))?;
    let lib: Vec<RatFunc> = d.digit_elements(256)?.iter().map(|e| e.as_rat().unwrap().clone()).collect();
    let want: Vec<RatFunc> = oracle.iter().map(|&i| reps[i].clone()).collect();
    let alternating = want.iter().enumerate().all(|(n, r)| *r == if n % 2 == 0 { f2r.clone() } else { f1.clone() });
    let cert = detect_period_exact(&zero, d.system(), 64)?;
    let ok =
        n0 == 0 && l == 2 && alternating && lib == want && cert.is_exact() && cert.period == 2 && cert.preperiod == 0;
    Ok((
        ok,
        format!(
            "oracle N={n0}, L={l}, alternating f_2, f_1: {alternating}; 256 digits match: {}; certificate {cert}",
            lib == want
        ),
    ))
}

fn c8() -> Check {
    let f = f2();
    let spec = AlgebraicSpec::parse("w^2+z*w+1", Some("z"), &f, Orientation::Descending)?;
    let ctx = BetaContext::from_spec(&spec)?;
    let d = ctx.d();
    // β(β + z) = 1: a_1 = z, T(1) = 1/β, a_2 = 1, T^2(1) = 0
    let n = 512;
    let oracle: Vec<Poly> = (1..=n)
        .map(|k| match k {
            1 => Poly::z(&f),
            2 => Poly::one(&f),
            _ => Poly::zero(&f),
        })
        .collect();
    let one = RatFunc::one(&f);
    let db = d_beta_rational(&one, &ctx, n)?;
    let digits_ok = db.digits == oracle;
    // the relation behind the oracle, checked on the β stream
    let beta = ctx.beta();
    let rel = beta.mul(&beta.add(&LaurentStream::from_poly(&Poly::z(&f), Orientation::Descending))?)?;
    let rel_ok = (-64..=0).all(|k| rel.coeff(k) == if k == 0 { Fq::ONE } else { Fq::ZERO });

    let x = LaurentStream::constant(&f, Orientation::Descending, Fq::ONE);
    let zd = RatFunc::z(&f).pow(d as i64)?;
    let literal_x = Element::stream(beta.mul(&x)?.mul_ratfunc(&zd.inv()?)?, "beta/z^d");
    let literal = expand_from(&literal_x, ctx.system(), 0)?.digit_elements(n)?;
    let literal_fail = (1..=n)
        .find(|&k| literal[k - 1].as_rat() != Some(&RatFunc::from_poly(oracle[k - 1].clone()).div_ref(&zd).unwrap()));
    let br = bridge(&x, &ctx, n)?;
    let got = br.expansion.digit_elements(n)?;
    let corrected =
        (1..=n).all(|k| bridge_digit(&oracle[k - 1], k, br.correction, d).ok().as_ref() == got[k - 1].as_rat());

    let one_spec = AlgebraicSpec::parse("w+1", None, &f, Orientation::Descending)?;
    let ba = beta_automaton(&one_spec, &ctx, n)?;
    let code = |p: &Poly| p.coeffs().iter().rev().fold(0usize, |s, c| s * f.q() as usize + c.code() as usize);
    let codes: Vec<usize> = std::iter::once(0).chain(oracle.iter().map(code)).collect();
    let auto_ok = ba.dfao.sequence(n + 1) == codes;
    let long: Vec<usize> = (0..1usize << 16).map(|k| if k < codes.len() { codes[k] } else { 0 }).collect();
    let counts = kernel_counts(&long, 8, 256);
    let lib_counts = kernel_profile(&long, 2, 8, 256)?.counts;
    let bounded = counts == lib_counts && counts.iter().all(|&c| c <= ba.dfao.len());
    let literal = match literal_fail {
        None => "holds".to_string(),
        Some(k) => format!(
            "fails at n = {k}: the greedy digit is {}, while a_n/z^d = {} is not in Γ_d; \
             digit_(n-1) = a_n/z^(d-1) (with a_1 - c*z^d at n = 1) holds: {corrected}",
            literal[k - 1],
            RatFunc::from_poly(oracle[k - 1].clone()).div_ref(&zd)?
        ),
    };
    Ok((
        digits_ok && rel_ok && literal_fail.is_none() && corrected && auto_ok && bounded,
        format!(
            "d_beta(1) = (z, 1, 0, ...): {}; bridge identity {literal}; automaton ({} states) agrees for {n}: {auto_ok}; \
             kernel counts {counts:?} bounded: {bounded}",
            digits_ok && rel_ok,
            ba.dfao.len()
        ),
    ))
}

fn c9() -> Check {
    let n = 1usize << 16;
    let squares: Vec<usize> = (0..n).map(|k| usize::from(k.isqrt().pow(2) == k)).collect();
    let counts = kernel_counts(&squares, 8, 256);
    let lib = kernel_profile(&squares, 2, 8, 256)?;
    let increasing = counts.windows(2).skip(4).all(|w| w[0] < w[1]) && lib.counts == counts;
    let mut others = Vec::new();
    let automata: Vec<(String, Dfao)> = corpus_automata()?;
    for (name, m) in &automata {
        let c = kernel_counts(&m.sequence(n), 8, 256);
        if c.windows(2).skip(4).all(|w| w[0] < w[1]) {
            return Ok((false, format!("automatic sequence {name} also grows: {c:?}")));
        }
        others.push(format!("{name} {:?}", &c[4..]));
    }
    Ok((increasing, format!("squares {:?} at depths 4..8; automatic: {}", &counts[4..], others.join(", "))))
}

/// a·b in F_{p^m} from coordinates and the modulus, independent of the field tables.
fn slow_mul(f: &Field, a: Fq, b: Fq) -> Fq {
    let (p, m) = (f.p() as u64, f.m() as usize);
    let (x, y) = (f.coords(a), f.coords(b));
    let mut prod = vec![0u64; 2 * m];
    for i in 0..m {
        for j in 0..m {
            prod[i + j] = (prod[i + j] + x[i] as u64 * y[j] as u64) % p;
        }
    }
    let md = f.modulus();
    for k in (m..2 * m).rev() {
        let c = prod[k];
        if c != 0 {
            for (i, &mi) in md.iter().enumerate().take(m) {
                prod[k - m + i] = (prod[k - m + i] + (p - c) * mi as u64 % p) % p;
            }
            prod[k] = 0;
        }
    }
    f.from_coords(&prod[..m].iter().map(|&c| c as u32).collect::<Vec<_>>())
}

fn field_laws(f: &Field) -> bool {
    let els: Vec<Fq> = f.elements().collect();
    if els.len() != f.q() as usize {
        return false;
    }
    for &a in &els {
        if f.add(a, f.neg(a)) != Fq::ZERO || (a != Fq::ZERO && f.mul(a, f.inv(a).unwrap()) != Fq::ONE) {
            return false;
        }
        for &b in &els {
            if f.mul(a, b) != slow_mul(f, a, b) || f.add(a, b) != f.add(b, a) {
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

fn c10() -> Check {
    let fields = [Field::prime(2)?, Field::new(2, 2, None)?, Field::new(2, 3, None)?, Field::new(3, 2, None)?];
    let laws =
        fields.iter().all(|f| f.m() == 1 || f.modulus().len() == f.m() as usize + 1) && fields.iter().all(field_laws);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 10);
    let mut ok = true;
    for k in 0..1000 {
        let f = &fields[k % fields.len()];
        let a = random_ratfunc(&mut rng, f, 6);
        let b = random_ratfunc(&mut rng, f, 4);
        let (pa, pb) = (a.num().clone(), b.den().clone());
        let (q, r) = pa.divmod(&pb)?;
        ok &= q.mul_ref(&pb).add_ref(&r) == pa && (r.is_zero() || deg(&r) < deg(&pb));
        let g = Poly::new(f, vec![Fq::ONE, Fq::ONE, Fq::ONE]);
        let models = if g.is_irreducible() { vec![V::Z, V::Deg, V::P(g)] } else { vec![V::Z, V::Deg] };
        for v in models {
            let ab = a.mul_ref(&b);
            ok &= match (val(&v, &a), val(&v, &b)) {
                (Some(x), Some(y)) => val(&v, &ab) == Some(x + y),
                _ => val(&v, &ab).is_none(),
            };
        }
        ok &= a.val_z().finite() == val(&V::Z, &a) && a.val_deg().finite() == val(&V::Deg, &a);
    }
    Ok((
        laws && ok,
        format!(
            "field laws and multiplication tables for F_2, F_4, F_8, F_9: {laws}; 1000 divmod/valuation cases: {ok}"
        ),
    ))
}

const NAMES: [&str; 10] = [
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

fn main() -> ExitCode {
    let checks: [fn() -> Check; 10] = [c1, c2, c3, c4, c5, c6, c7, c8, c9, c10];
    let mut passed = 0;
    for (i, check) in checks.iter().enumerate() {
        let t = Instant::now();
        let (ok, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
        passed += usize::from(ok);
        let verdict = if ok { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {verdict} {} ({} ms): {detail}", i + 1, NAMES[i], t.elapsed().as_millis());
    }
    println!("{passed}/10 criteria passed");
    if passed == 10 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
