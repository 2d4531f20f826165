//! Text syntax for field elements, polynomials, rational functions and
//! bivariate polynomials.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' '-'? integer)?
//! atom    := integer | 'z' | 'w' | 'g' | '(' expr ')'
//! series  := '[' integer ';' expr (',' expr)* ']'
//! ```
//!
//! Integers are read modulo p. `g` is the root of the field modulus and is
//! only available in non-prime fields. `w` is only accepted by
//! [`parse_bivariate`].

use crate::error::{Error, Result};
use crate::field::{Field, Fq};
use crate::poly::Poly;
use crate::ratfunc::RatFunc;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Int(i64),
    Var(char),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, i64),
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(s: &'a str) -> Self {
        Parser { src: s.as_bytes(), pos: 0 }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn integer(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected integer");
        }
        std::str::from_utf8(&self.src[start..self.pos]).unwrap().parse().or_else(|_| self.err("integer out of range"))
    }

    fn signed_integer(&mut self) -> Result<i64> {
        let neg = self.eat(b'-');
        let v = self.integer()?;
        Ok(if neg { -v } else { v })
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let e = if self.eat(b'(') {
                let e = self.signed_integer()?;
                self.expect(b')')?;
                e
            } else {
                self.signed_integer()?
            };
            return Ok(Expr::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => Ok(Expr::Int(self.integer()?)),
            Some(c @ (b'z' | b'w' | b'g')) => {
                self.pos += 1;
                Ok(Expr::Var(c as char))
            }
            Some(c) => self.err(format!("unexpected '{}'", c as char)),
            None => self.err("unexpected end of input"),
        }
    }

    fn finish(&mut self) -> Result<()> {
        if self.peek().is_some() {
            return self.err("trailing input");
        }
        Ok(())
    }
}

pub fn parse_expr(s: &str) -> Result<Expr> {
    let mut p = Parser::new(s);
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

fn eval_rat(e: &Expr, field: &Field) -> Result<RatFunc> {
    Ok(match e {
        Expr::Int(n) => RatFunc::constant(field, field.from_int(*n)),
        Expr::Var('z') => RatFunc::z(field),
        Expr::Var('g') => match field.generator() {
            Some(g) => RatFunc::constant(field, g),
            None => return Err(Error::Parse { pos: 0, msg: "'g' is undefined in a prime field".into() }),
        },
        Expr::Var(c) => return Err(Error::Parse { pos: 0, msg: format!("variable '{c}' not allowed here") }),
        Expr::Add(a, b) => eval_rat(a, field)?.add_ref(&eval_rat(b, field)?),
        Expr::Sub(a, b) => eval_rat(a, field)?.sub_ref(&eval_rat(b, field)?),
        Expr::Mul(a, b) => eval_rat(a, field)?.mul_ref(&eval_rat(b, field)?),
        Expr::Div(a, b) => eval_rat(a, field)?.div_ref(&eval_rat(b, field)?)?,
        Expr::Neg(a) => eval_rat(a, field)?.neg_ref(),
        Expr::Pow(a, k) => eval_rat(a, field)?.pow(*k)?,
    })
}

/// Parses a rational function in z.
pub fn parse_ratfunc(s: &str, field: &Field) -> Result<RatFunc> {
    eval_rat(&parse_expr(s)?, field)
}

/// Parses a polynomial in z; rejects proper fractions.
pub fn parse_poly(s: &str, field: &Field) -> Result<Poly> {
    let r = parse_ratfunc(s, field)?;
    match r.as_poly() {
        Some(p) => Ok(p.clone()),
        None => Err(Error::Parse { pos: 0, msg: format!("'{s}' is not a polynomial") }),
    }
}

/// Parses a constant field element.
pub fn parse_elem(s: &str, field: &Field) -> Result<Fq> {
    let r = parse_ratfunc(s, field)?;
    if r.is_poly() && r.num().is_constant() {
        Ok(r.num().coeff(0))
    } else {
        Err(Error::Parse { pos: 0, msg: format!("'{s}' is not a field element") })
    }
}

/// Coefficients (in w) of a bivariate expression, each a rational function of z.
fn eval_bi(e: &Expr, field: &Field) -> Result<Vec<RatFunc>> {
    fn norm(mut v: Vec<RatFunc>) -> Vec<RatFunc> {
        while v.last().is_some_and(|c| c.is_zero()) {
            v.pop();
        }
        v
    }
    fn add(a: &[RatFunc], b: &[RatFunc], field: &Field) -> Vec<RatFunc> {
        let n = a.len().max(b.len());
        let zero = RatFunc::zero(field);
        norm((0..n).map(|i| a.get(i).unwrap_or(&zero).add_ref(b.get(i).unwrap_or(&zero))).collect())
    }
    fn mul(a: &[RatFunc], b: &[RatFunc], field: &Field) -> Vec<RatFunc> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![RatFunc::zero(field); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] = out[i + j].add_ref(&x.mul_ref(y));
            }
        }
        norm(out)
    }
    Ok(match e {
        Expr::Var('w') => vec![RatFunc::zero(field), RatFunc::one(field)],
        Expr::Add(a, b) => add(&eval_bi(a, field)?, &eval_bi(b, field)?, field),
        Expr::Sub(a, b) => {
            let nb: Vec<RatFunc> = eval_bi(b, field)?.iter().map(|c| c.neg_ref()).collect();
            add(&eval_bi(a, field)?, &nb, field)
        }
        Expr::Mul(a, b) => mul(&eval_bi(a, field)?, &eval_bi(b, field)?, field),
        Expr::Neg(a) => eval_bi(a, field)?.iter().map(|c| c.neg_ref()).collect(),
        Expr::Div(a, b) => {
            let d = eval_bi(b, field)?;
            if d.len() != 1 {
                return Err(Error::Parse { pos: 0, msg: "division by an expression in w".into() });
            }
            let di = d[0].inv()?;
            eval_bi(a, field)?.iter().map(|c| c.mul_ref(&di)).collect()
        }
        Expr::Pow(a, k) => {
            if *k < 0 {
                return Err(Error::Parse { pos: 0, msg: "negative power in bivariate expression".into() });
            }
            let base = eval_bi(a, field)?;
            let mut acc = vec![RatFunc::one(field)];
            for _ in 0..*k {
                acc = mul(&acc, &base, field);
            }
            acc
        }
        other => {
            let r = eval_rat(other, field)?;
            norm(vec![r])
        }
    })
}

/// Parses R(z, w) and clears denominators: returns the w-coefficients as
/// polynomials in z (index = power of w).
pub fn parse_bivariate(s: &str, field: &Field) -> Result<Vec<Poly>> {
    let coeffs = eval_bi(&parse_expr(s)?, field)?;
    let mut l = Poly::one(field);
    for c in &coeffs {
        let g = l.gcd(c.den());
        l = (&l * c.den()).div_exact(&g)?;
    }
    coeffs
        .iter()
        .map(|c| {
            let scale = l.div_exact(c.den())?;
            Ok(c.num() * &scale)
        })
        .collect()
}

/// Renders R(z, w) given by w-coefficients, highest power of w first.
pub fn format_bivariate(coeffs: &[Poly]) -> String {
    let mut terms = Vec::new();
    for (j, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let mono = match j {
            0 => String::new(),
            1 => "w".to_string(),
            _ => format!("w^{j}"),
        };
        let cs = c.to_string();
        terms.push(if mono.is_empty() {
            cs
        } else if c.is_one() {
            mono
        } else if c.weight() > 1 || (c.weight() == 1 && c.field().elem_is_compound(c.lead())) {
            format!("({cs})*{mono}")
        } else {
            format!("{cs}*{mono}")
        });
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join("+")
    }
}

/// Parses a finite series prefix `[m; c_m, c_{m+1}, ...]`.
pub fn parse_series_literal(s: &str, field: &Field) -> Result<(i64, Vec<Fq>)> {
    let mut p = Parser::new(s);
    p.expect(b'[')?;
    let m = p.signed_integer()?;
    p.expect(b';')?;
    let mut coeffs = Vec::new();
    loop {
        let e = p.expr()?;
        let r = eval_rat(&e, field)?;
        if !(r.is_poly() && r.num().is_constant()) {
            return p.err("series coefficient must be a field element");
        }
        coeffs.push(r.num().coeff(0));
        if p.eat(b',') {
            continue;
        }
        p.expect(b']')?;
        break;
    }
    p.finish()?;
    Ok((m, coeffs))
}

pub fn format_series_literal(m: i64, coeffs: &[Fq], field: &Field) -> String {
    let body: Vec<String> = coeffs.iter().map(|&c| field.format_elem(c)).collect();
    format!("[{m}; {}]", body.join(", "))
}
