//! Dense Gaussian elimination over F_q and over F_q(z).

use crate::field::{Field, Fq};
use crate::ratfunc::RatFunc;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(f: &Field, m: &mut [Vec<Fq>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = f.inv(m[r][c]).expect("nonzero pivot");
        for x in m[r].iter_mut() {
            *x = f.mul(*x, inv);
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let factor = m[i][c];
                #[allow(clippy::needless_range_loop)]
                for j in c..cols {
                    let t = f.mul(factor, m[r][j]);
                    m[i][j] = f.sub(m[i][j], t);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// A basis of {x : M x = 0}, each vector normalized so that its last free
/// coordinate is 1.
pub fn nullspace(f: &Field, m: &[Vec<Fq>], cols: usize) -> Vec<Vec<Fq>> {
    let mut a: Vec<Vec<Fq>> = m.to_vec();
    let pivots = rref(f, &mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![Fq::ZERO; cols];
            v[fc] = Fq::ONE;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(a[r][fc]);
            }
            v
        })
        .collect()
}

pub fn rank(f: &Field, m: &[Vec<Fq>]) -> usize {
    let mut a = m.to_vec();
    rref(f, &mut a).len()
}

/// Solves M x = b; `None` if inconsistent. Free variables are set to zero.
pub fn solve(f: &Field, m: &[Vec<Fq>], b: &[Fq]) -> Option<Vec<Fq>> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut a: Vec<Vec<Fq>> = m
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    let pivots = rref(f, &mut a);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![Fq::ZERO; cols];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = a[r][cols];
    }
    Some(x)
}

/// Reduced row echelon form over F_q(z); returns the pivot columns.
pub fn rref_rat(m: &mut [Vec<RatFunc>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        // prefer the simplest pivot to keep degrees small
        let Some(p) = (r..rows)
            .filter(|&i| !m[i][c].is_zero())
            .min_by_key(|&i| m[i][c].num().degree_or_neg() + m[i][c].den().degree_or_neg())
        else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv().expect("nonzero pivot");
        for x in m[r].iter_mut() {
            *x = x.mul_ref(&inv);
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let factor = m[i][c].clone();
                #[allow(clippy::needless_range_loop)]
                for j in c..cols {
                    let t = factor.mul_ref(&m[r][j]);
                    m[i][j] = m[i][j].sub_ref(&t);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Nullspace basis over F_q(z).
pub fn nullspace_rat(m: &[Vec<RatFunc>], cols: usize, field: &Field) -> Vec<Vec<RatFunc>> {
    let mut a = m.to_vec();
    let pivots = rref_rat(&mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![RatFunc::zero(field); cols];
            v[fc] = RatFunc::one(field);
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = a[r][fc].neg_ref();
            }
            v
        })
        .collect()
}

/// Solves a square or overdetermined system over F_q(z) with a unique
/// solution; `None` if singular or inconsistent.
pub fn solve_rat(m: &[Vec<RatFunc>], b: &[RatFunc]) -> Option<Vec<RatFunc>> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut a: Vec<Vec<RatFunc>> = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref_rat(&mut a);
    if pivots.len() != cols {
        return None;
    }
    if a.iter().skip(cols).any(|row| !row[cols].is_zero()) {
        return None;
    }
    Some((0..cols).map(|r| a[r][cols].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;

    #[test]
    fn nullspace_over_f2() {
        let f = Field::prime(2).unwrap();
        let m = vec![vec![Fq(1), Fq(1), Fq(0)], vec![Fq(0), Fq(1), Fq(1)]];
        let ns = nullspace(&f, &m, 3);
        assert_eq!(ns, vec![vec![Fq(1), Fq(1), Fq(1)]]);
        assert_eq!(rank(&f, &m), 2);
    }

    #[test]
    fn solve_over_f3() {
        let f = Field::prime(3).unwrap();
        let m = vec![vec![Fq(1), Fq(2)], vec![Fq(2), Fq(2)]];
        let x = solve(&f, &m, &[Fq(1), Fq(0)]).unwrap();
        for (row, b) in m.iter().zip([Fq(1), Fq(0)]) {
            let lhs = f.add(f.mul(row[0], x[0]), f.mul(row[1], x[1]));
            assert_eq!(lhs, b);
        }
    }

    #[test]
    fn rational_solve() {
        let f = Field::prime(2).unwrap();
        let z = RatFunc::z(&f);
        let one = RatFunc::one(&f);
        // [[1, z], [z, 1]] x = [1, 0]
        let m = vec![vec![one.clone(), z.clone()], vec![z.clone(), one.clone()]];
        let x = solve_rat(&m, &[one.clone(), RatFunc::zero(&f)]).unwrap();
        let d = RatFunc::from_poly(Poly::from_ints(&f, &[1, 0, 1]));
        assert_eq!(x[0], one.div_ref(&d).unwrap());
        assert_eq!(x[1], z.div_ref(&d).unwrap());
        let ns = nullspace_rat(&[vec![one.clone(), z.clone()]], 2, &f);
        assert_eq!(ns, vec![vec![z.clone(), one.clone()]]);
    }
}
