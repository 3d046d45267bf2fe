//! Berkowitz's division-free characteristic polynomial over a commutative ring.

use crate::gf::{Fe, Field};
use crate::linalg::Polynomial;

pub(crate) trait Ring {
    type E: Clone;
    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn neg(&self, a: &Self::E) -> Self::E;
}

impl Ring for Field {
    type E = Fe;
    fn zero(&self) -> Fe {
        Fe(0)
    }
    fn one(&self) -> Fe {
        Fe(1)
    }
    fn add(&self, a: &Fe, b: &Fe) -> Fe {
        Field::add(self, *a, *b)
    }
    fn mul(&self, a: &Fe, b: &Fe) -> Fe {
        Field::mul(self, *a, *b)
    }
    fn neg(&self, a: &Fe) -> Fe {
        Field::neg(self, *a)
    }
}

pub(crate) struct PolyRing(pub Field);

impl Ring for PolyRing {
    type E = Polynomial;
    fn zero(&self) -> Polynomial {
        Polynomial::zero(&self.0)
    }
    fn one(&self) -> Polynomial {
        Polynomial::one(&self.0)
    }
    fn add(&self, a: &Polynomial, b: &Polynomial) -> Polynomial {
        a.add(b)
    }
    fn mul(&self, a: &Polynomial, b: &Polynomial) -> Polynomial {
        a.mul(b)
    }
    fn neg(&self, a: &Polynomial) -> Polynomial {
        a.neg()
    }
}

/// Coefficients of det(yI - M), highest degree first: [1, c_{n-1}, ..., c_0].
/// `m` is n x n row-major.
pub(crate) fn berkowitz<R: Ring>(ring: &R, n: usize, m: &[R::E]) -> Vec<R::E> {
    let at = |i: usize, j: usize| &m[i * n + j];
    let mut p = vec![ring.one()];
    for r in 1..=n {
        let k = r - 1;
        // Toeplitz column: 1, -a_kk, -R C, -R A C, ..., -R A^{k-1} C
        let mut t = vec![ring.one(), ring.neg(at(k, k))];
        let mut w: Vec<R::E> = (0..k).map(|i| at(i, k).clone()).collect();
        for _ in 0..k {
            let rc = (0..k).fold(ring.zero(), |acc, j| ring.add(&acc, &ring.mul(at(k, j), &w[j])));
            t.push(ring.neg(&rc));
            w = (0..k)
                .map(|i| (0..k).fold(ring.zero(), |acc, j| ring.add(&acc, &ring.mul(at(i, j), &w[j]))))
                .collect();
        }
        let next: Vec<R::E> = (0..=r)
            .map(|i| {
                (0..r.min(i + 1)).fold(ring.zero(), |acc, j| ring.add(&acc, &ring.mul(&t[i - j], &p[j])))
            })
            .collect();
        p = next;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    /// Leibniz expansion of det(xI - M) with polynomial entries.
    fn leibniz_charpoly(m: &Matrix) -> Polynomial {
        let f = m.field();
        let n = m.rows();
        let entry = |i: usize, j: usize| {
            let c = f.neg(m.get(i, j));
            if i == j {
                Polynomial::new(f, vec![c, Fe(1)])
            } else {
                Polynomial::constant(f, c)
            }
        };
        let mut perm: Vec<usize> = (0..n).collect();
        let mut total = Polynomial::zero(f);
        permute(&mut perm, 0, &mut |p| {
            let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
            let mut term = Polynomial::one(f);
            for (i, &pi) in p.iter().enumerate() {
                term = term.mul(&entry(i, pi));
            }
            total = if inversions % 2 == 0 { total.add(&term) } else { total.sub(&term) };
        });
        total
    }

    fn permute(p: &mut Vec<usize>, k: usize, visit: &mut dyn FnMut(&[usize])) {
        if k == p.len() {
            visit(p);
            return;
        }
        for i in k..p.len() {
            p.swap(k, i);
            permute(p, k + 1, visit);
            p.swap(k, i);
        }
    }

    #[test]
    fn matches_leibniz_on_small_matrices() {
        let f = Field::prime(5).unwrap();
        let mut seed = 17u64;
        for n in 1..=5 {
            for _ in 0..6 {
                let rows: Vec<Vec<i64>> = (0..n)
                    .map(|_| {
                        (0..n)
                            .map(|_| {
                                seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                                (seed >> 33) as i64 % 5
                            })
                            .collect()
                    })
                    .collect();
                let m = Matrix::from_ints(&f, &rows).unwrap();
                assert_eq!(m.charpoly().unwrap(), leibniz_charpoly(&m));
            }
        }
    }
}
