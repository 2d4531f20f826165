//! K = F_q(z) as a vector space over F_q(π) for a rational π.
//!
//! Elements of F_q(π) are stored as [`RatFunc`]s whose variable stands for
//! π. With π = N(z)/D(z) in lowest terms, z is a root of
//! M(Z) = N(Z) − π·D(Z), of degree h = [K : F_q(π)]. In the 1/z model the
//! whole computation runs on x(1/z), so that the power basis is 1, 1/z, ….

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::solve_rat;
use crate::poly::Poly;
use crate::ratfunc::RatFunc;

#[derive(Clone, Debug)]
pub struct PiAlgebra {
    field: Field,
    invert: bool,
    /// Monic minimal polynomial of the generator, ascending, length h + 1.
    minpoly: Vec<RatFunc>,
}

impl PiAlgebra {
    /// `invert` selects the 1/z model.
    pub fn new(pi: &RatFunc, invert: bool) -> Result<PiAlgebra> {
        let field = pi.field().clone();
        let p = if invert { pi.invert_variable() } else { pi.clone() };
        let h = p.rat_degree()?;
        let var = RatFunc::z(&field);
        let mut minpoly: Vec<RatFunc> = (0..=h)
            .map(|j| {
                let n = RatFunc::constant(&field, p.num().coeff(j));
                let d = RatFunc::constant(&field, p.den().coeff(j));
                n.sub_ref(&var.mul_ref(&d))
            })
            .collect();
        let lead = minpoly[h].inv()?;
        for c in minpoly.iter_mut() {
            *c = c.mul_ref(&lead);
        }
        Ok(PiAlgebra { field, invert, minpoly })
    }

    /// [K : F_q(π)].
    pub fn h(&self) -> usize {
        self.minpoly.len() - 1
    }

    fn reduce(&self, mut c: Vec<RatFunc>) -> Vec<RatFunc> {
        let h = self.h();
        while c.len() > h {
            let top = c.pop().expect("nonempty");
            if top.is_zero() {
                continue;
            }
            let k = c.len() - h;
            for (j, mj) in self.minpoly.iter().enumerate().take(h) {
                c[k + j] = c[k + j].sub_ref(&top.mul_ref(mj));
            }
        }
        c.resize(h, RatFunc::zero(&self.field));
        c
    }

    fn poly_vector(&self, p: &Poly, shift: usize) -> Vec<RatFunc> {
        let mut c = vec![RatFunc::zero(&self.field); shift];
        c.extend(p.coeffs().iter().map(|&a| RatFunc::constant(&self.field, a)));
        self.reduce(c)
    }

    /// Coordinates of x in the power basis 1, t, …, t^{h−1}.
    pub fn vector(&self, x: &RatFunc) -> Result<Vec<RatFunc>> {
        let x = if self.invert { x.invert_variable() } else { x.clone() };
        let a = self.poly_vector(x.num(), 0);
        if x.den().is_one() {
            return Ok(a);
        }
        let h = self.h();
        let cols: Vec<Vec<RatFunc>> = (0..h).map(|j| self.poly_vector(x.den(), j)).collect();
        let mat: Vec<Vec<RatFunc>> = (0..h).map(|i| (0..h).map(|j| cols[j][i].clone()).collect()).collect();
        solve_rat(&mat, &a).ok_or_else(|| Error::Verification("denominator is not invertible in K".into()))
    }

    /// Coordinates of x with respect to an F_q(π)-basis of K.
    pub fn coords(&self, x: &RatFunc, basis: &[RatFunc]) -> Result<Vec<RatFunc>> {
        let h = self.h();
        if basis.len() != h {
            return Err(Error::Precondition(format!("basis must have {h} elements, got {}", basis.len())));
        }
        let cols = basis.iter().map(|b| self.vector(b)).collect::<Result<Vec<_>>>()?;
        let mat: Vec<Vec<RatFunc>> = (0..h).map(|i| (0..h).map(|j| cols[j][i].clone()).collect()).collect();
        let v = self.vector(x)?;
        solve_rat(&mat, &v).ok_or(Error::DependentGenerators)
    }

    /// 1, t, …, t^{h−1} as elements of K (t = z, or 1/z in the inverted model).
    pub fn power_basis(&self) -> Vec<RatFunc> {
        let z = RatFunc::z(&self.field);
        let t = if self.invert { z.inv().expect("z nonzero") } else { z };
        (0..self.h() as i64).map(|i| t.pow(i).expect("nonzero")).collect()
    }

    /// Σ c_i b_i evaluated back in K.
    pub fn combine(&self, coords: &[RatFunc], basis: &[RatFunc], pi: &RatFunc) -> RatFunc {
        coords.iter().zip(basis).fold(RatFunc::zero(&self.field), |acc, (c, b)| acc.add_ref(&c.compose(pi).mul_ref(b)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_ratfunc;

    #[test]
    fn coordinates_roundtrip() {
        let f = Field::prime(2).unwrap();
        let pi = parse_ratfunc("z+z^2", &f).unwrap();
        let alg = PiAlgebra::new(&pi, false).unwrap();
        assert_eq!(alg.h(), 2);
        let basis = alg.power_basis();
        for s in ["1", "z", "1/(1+z)", "(1+z^3)/(1+z+z^2)", "z^5"] {
            let x = parse_ratfunc(s, &f).unwrap();
            let c = alg.coords(&x, &basis).unwrap();
            assert_eq!(alg.combine(&c, &basis, &pi), x, "{s}");
        }
    }

    #[test]
    fn inverted_model() {
        let f = Field::prime(2).unwrap();
        let pi = parse_ratfunc("1/(z+z^2)", &f).unwrap();
        let alg = PiAlgebra::new(&pi, true).unwrap();
        let basis = alg.power_basis();
        assert_eq!(basis[1], parse_ratfunc("1/z", &f).unwrap());
        let x = parse_ratfunc("z/(1+z^3)", &f).unwrap();
        let c = alg.coords(&x, &basis).unwrap();
        assert_eq!(alg.combine(&c, &basis, &pi), x);
    }
}
