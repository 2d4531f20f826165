use proptest::prelude::*;

use fexpand::automata::{kernel_profile, Dfao, State};
use fexpand::beta::{code_digit, d_beta_rational, digit_code, BetaContext};
use fexpand::expand::{detect_period_exact, expand, resum};
use fexpand::expr::parse_ratfunc;
use fexpand::residue::{span_system_prime, BaseContext, Element, Model, ResidueSystem};
use fexpand::{AlgebraicSpec, Field, Fq, Orientation, Poly, RatFunc, Val};

fn field(which: usize) -> Field {
    match which {
        0 => Field::prime(2).unwrap(),
        1 => Field::prime(3).unwrap(),
        2 => Field::new(2, 2, None).unwrap(),
        _ => Field::new(3, 2, None).unwrap(),
    }
}

fn poly(f: &Field, codes: &[u32]) -> Poly {
    Poly::new(f, codes.iter().map(|&c| Fq(c % f.q())).collect())
}

fn ratfunc(f: &Field, num: &[u32], den: &[u32]) -> Option<RatFunc> {
    RatFunc::new(poly(f, num), poly(f, den)).ok()
}

fn f2() -> Field {
    Field::prime(2).unwrap()
}

fn rat(s: &str) -> RatFunc {
    parse_ratfunc(s, &f2()).unwrap()
}

fn span_zz() -> ResidueSystem {
    span_system_prime(
        &[Element::Rat(rat("1")), Element::Rat(rat("z"))],
        BaseContext::rational(Model::Vz, rat("z^2")).unwrap(),
    )
    .unwrap()
}

fn coeffs() -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0u32..9, 0..7)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(which in 0usize..4, a in 0u32..9, b in 0u32..9, c in 0u32..9) {
        let f = field(which);
        let (a, b, c) = (Fq(a % f.q()), Fq(b % f.q()), Fq(c % f.q()));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.frobenius(f.mul(a, b)), f.mul(f.frobenius(a), f.frobenius(b)));
        prop_assert_eq!(f.frobenius_inv(f.frobenius(a)), a);
        if !b.is_zero() {
            prop_assert_eq!(f.mul(f.div(a, b).unwrap(), b), a);
        }
    }

    #[test]
    fn divmod_reconstructs(which in 0usize..4, a in coeffs(), b in coeffs()) {
        let f = field(which);
        let (a, b) = (poly(&f, &a), poly(&f, &b));
        prop_assume!(!b.is_zero());
        let (q, r) = a.divmod(&b).unwrap();
        prop_assert_eq!(q.mul_ref(&b).add_ref(&r), a);
        prop_assert!(r.degree_or_neg() < b.degree_or_neg());
    }

    #[test]
    fn gcd_divides_both(which in 0usize..4, a in coeffs(), b in coeffs()) {
        let f = field(which);
        let (a, b) = (poly(&f, &a), poly(&f, &b));
        let (g, s, t) = a.xgcd(&b);
        prop_assert_eq!(s.mul_ref(&a).add_ref(&t.mul_ref(&b)), g.clone());
        if !g.is_zero() {
            prop_assert!(a.rem(&g).unwrap().is_zero() && b.rem(&g).unwrap().is_zero());
        }
    }

    #[test]
    fn valuations_are_additive(which in 0usize..4, a in coeffs(), b in coeffs(), c in coeffs(), d in coeffs()) {
        let f = field(which);
        let (Some(x), Some(y)) = (ratfunc(&f, &a, &b), ratfunc(&f, &c, &d)) else { return Ok(()) };
        let xy = x.mul_ref(&y);
        for (vx, vy, vxy) in [(x.val_z(), y.val_z(), xy.val_z()), (x.val_deg(), y.val_deg(), xy.val_deg())] {
            match (vx, vy) {
                (Val::Fin(u), Val::Fin(v)) => prop_assert_eq!(vxy, Val::Fin(u + v)),
                _ => prop_assert_eq!(vxy, Val::Inf),
            }
        }
        if !y.is_zero() {
            prop_assert_eq!(xy.div_ref(&y).unwrap(), x);
        }
    }

    #[test]
    fn partial_sums_converge(a in coeffs(), b in coeffs()) {
        let f = f2();
        let Some(x) = ratfunc(&f, &a, &b) else { return Ok(()) };
        let sys = span_zz();
        let d = expand(&Element::Rat(x.clone()), &sys).unwrap();
        let n = 12;
        let err = x.sub_ref(&d.partial_sum(d.start() + n - 1).unwrap());
        // x − Σ_{k < m+n} a_k π^k ∈ π^{m+n} A
        match err.val_z() {
            Val::Inf => {}
            Val::Fin(v) => prop_assert!(v >= 2 * (d.start() + n)),
        }
    }

    #[test]
    fn periodic_certificates_resum(a in coeffs(), b in coeffs()) {
        let f = f2();
        let Some(x) = ratfunc(&f, &a, &b) else { return Ok(()) };
        let sys = ResidueSystem::from_rats(BaseContext::rational(Model::Vz, rat("z")).unwrap(), vec![rat("0"), rat("1")]).unwrap();
        let cert = detect_period_exact(&x, &sys, 10_000).unwrap();
        prop_assert!(cert.is_exact());
        prop_assert_eq!(resum(&cert, &sys).unwrap(), x.clone());
        let greedy = expand(&Element::Rat(x), &sys).unwrap().digits(64).unwrap();
        prop_assert_eq!(cert.to_expansion(&sys).unwrap().digits(64).unwrap(), greedy);
    }

    #[test]
    fn minimization_preserves_outputs(trans in prop::collection::vec((0usize..5, 0usize..5, 0usize..3), 5)) {
        let states: Vec<State> = trans.iter().map(|&(a, b, o)| State { transitions: vec![a, b], output: o }).collect();
        let m = Dfao::new(2, states, 0).unwrap();
        let min = m.minimize();
        prop_assert!(min.len() <= m.len());
        prop_assert_eq!(min.sequence(256), m.sequence(256));
        let back = Dfao::from_json(&min.to_json()).unwrap();
        prop_assert_eq!(back.sequence(256), m.sequence(256));
        let prof = kernel_profile(&m.sequence(1 << 12), 2, 6, 64).unwrap();
        prop_assert!(prof.counts.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn digit_codes_round_trip(which in 0usize..4, c in prop::collection::vec(0u32..9, 0..4)) {
        let f = field(which);
        let a = poly(&f, &c);
        prop_assert_eq!(code_digit(&f, digit_code(&a, 3)), a);
    }

    #[test]
    fn beta_digits_have_bounded_degree(a in coeffs(), b in coeffs()) {
        let f = f2();
        let Some(x) = ratfunc(&f, &a, &b) else { return Ok(()) };
        // T is defined on F_q[[1/z]]: keep the fractional part
        let xs = x.sub_ref(&RatFunc::from_poly(x.num().divmod(x.den()).unwrap().0));
        let spec = AlgebraicSpec::parse("w^2+z*w+1", Some("z"), &f, Orientation::Descending).unwrap();
        let ctx = BetaContext::from_spec(&spec).unwrap();
        let e = d_beta_rational(&xs, &ctx, 32).unwrap();
        prop_assert!(e.degree_bound_holds());
    }
}
