use std::fmt;

use crate::error::{Error, Result};
use crate::gf::{Fe, Field};

/// Dense univariate polynomial, coefficients low-to-high without trailing zeros.
#[derive(Clone)]
pub struct Polynomial {
    field: Field,
    coeffs: Vec<Fe>,
}

impl PartialEq for Polynomial {
    fn eq(&self, o: &Polynomial) -> bool {
        self.coeffs == o.coeffs && self.field == o.field
    }
}
impl Eq for Polynomial {}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut terms = vec![];
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c.0 == 0 {
                continue;
            }
            let cs = self.field.fmt_elem(c);
            terms.push(match i {
                0 => cs,
                1 if c.0 == 1 => "x".into(),
                1 => format!("{cs}x"),
                _ if c.0 == 1 => format!("x^{i}"),
                _ => format!("{cs}x^{i}"),
            });
        }
        write!(f, "{}", terms.join(" + "))
    }
}

impl Polynomial {
    pub fn new(field: &Field, mut coeffs: Vec<Fe>) -> Polynomial {
        while coeffs.last() == Some(&Fe(0)) {
            coeffs.pop();
        }
        Polynomial { field: field.clone(), coeffs }
    }

    pub fn from_ints(field: &Field, cs: &[i64]) -> Polynomial {
        Polynomial::new(field, cs.iter().map(|&c| field.from_int(c)).collect())
    }

    pub fn zero(field: &Field) -> Polynomial {
        Polynomial::new(field, vec![])
    }
    pub fn one(field: &Field) -> Polynomial {
        Polynomial::new(field, vec![Fe(1)])
    }
    pub fn x(field: &Field) -> Polynomial {
        Polynomial::new(field, vec![Fe(0), Fe(1)])
    }
    pub fn constant(field: &Field, c: Fe) -> Polynomial {
        Polynomial::new(field, vec![c])
    }

    /// x - a
    pub fn linear(field: &Field, a: Fe) -> Polynomial {
        Polynomial::new(field, vec![field.neg(a), Fe(1)])
    }

    /// prod (x - a_i)^{m_i}
    pub fn from_roots(field: &Field, roots: &[(Fe, usize)]) -> Polynomial {
        let mut f = Polynomial::one(field);
        for &(a, m) in roots {
            for _ in 0..m {
                f = f.mul(&Polynomial::linear(field, a));
            }
        }
        f
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }
    pub fn coeff(&self, i: usize) -> Fe {
        self.coeffs.get(i).copied().unwrap_or(Fe(0))
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }
    pub fn lead(&self) -> Fe {
        self.coeffs.last().copied().unwrap_or(Fe(0))
    }
    pub fn is_monic(&self) -> bool {
        self.lead() == Fe(1)
    }

    pub fn add(&self, o: &Polynomial) -> Polynomial {
        let f = &self.field;
        let n = self.coeffs.len().max(o.coeffs.len());
        Polynomial::new(f, (0..n).map(|i| f.add(self.coeff(i), o.coeff(i))).collect())
    }

    pub fn sub(&self, o: &Polynomial) -> Polynomial {
        let f = &self.field;
        let n = self.coeffs.len().max(o.coeffs.len());
        Polynomial::new(f, (0..n).map(|i| f.sub(self.coeff(i), o.coeff(i))).collect())
    }

    pub fn neg(&self) -> Polynomial {
        self.scale(self.field.neg(Fe(1)))
    }

    pub fn scale(&self, c: Fe) -> Polynomial {
        let f = &self.field;
        Polynomial::new(f, self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    pub fn mul(&self, o: &Polynomial) -> Polynomial {
        let f = &self.field;
        if self.is_zero() || o.is_zero() {
            return Polynomial::zero(f);
        }
        let mut r = vec![Fe(0); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.0 == 0 {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                r[i + j] = f.add(r[i + j], f.mul(a, b));
            }
        }
        Polynomial::new(f, r)
    }

    pub fn pow(&self, e: usize) -> Polynomial {
        (0..e).fold(Polynomial::one(&self.field), |acc, _| acc.mul(self))
    }

    pub fn divrem(&self, d: &Polynomial) -> Result<(Polynomial, Polynomial)> {
        let f = &self.field;
        let dd = d.degree().ok_or(Error::DivisionByZero)?;
        let inv = f.inv(d.lead())?;
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((Polynomial::zero(f), self.clone()));
        }
        let mut qc = vec![Fe(0); r.len() - dd];
        for i in (0..qc.len()).rev() {
            let c = f.mul(r[i + dd], inv);
            qc[i] = c;
            if c.0 != 0 {
                for (j, &b) in d.coeffs.iter().enumerate() {
                    r[i + j] = f.sub(r[i + j], f.mul(c, b));
                }
            }
        }
        r.truncate(dd);
        Ok((Polynomial::new(f, qc), Polynomial::new(f, r)))
    }

    pub fn rem(&self, d: &Polynomial) -> Result<Polynomial> {
        Ok(self.divrem(d)?.1)
    }

    /// Exact quotient; errors when d does not divide self.
    pub fn div_exact(&self, d: &Polynomial) -> Result<Polynomial> {
        let (q, r) = self.divrem(d)?;
        if !r.is_zero() {
            return Err(Error::InvalidInput(format!("{d} does not divide {self}")));
        }
        Ok(q)
    }

    pub fn monic(&self) -> Polynomial {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(self.field.inv(self.lead()).expect("nonzero lead"))
    }

    /// Monic gcd; gcd(0, 0) = 0.
    pub fn gcd(&self, o: &Polynomial) -> Polynomial {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn lcm(&self, o: &Polynomial) -> Polynomial {
        if self.is_zero() || o.is_zero() {
            return Polynomial::zero(&self.field);
        }
        self.mul(o).div_exact(&self.gcd(o)).expect("gcd divides product").monic()
    }

    pub fn derivative(&self) -> Polynomial {
        let f = &self.field;
        Polynomial::new(
            f,
            self.coeffs.iter().enumerate().skip(1).map(|(i, &c)| f.mul(f.from_int(i as i64), c)).collect(),
        )
    }

    pub fn eval(&self, x: Fe) -> Fe {
        let f = &self.field;
        self.coeffs.iter().rev().fold(Fe(0), |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// Roots in the field with multiplicities, ascending by code.
    pub fn roots(&self) -> Vec<(Fe, usize)> {
        let f = &self.field;
        if self.is_zero() {
            return vec![];
        }
        let mut out = vec![];
        let mut g = self.clone();
        for a in f.elements() {
            if g.degree() == Some(0) {
                break;
            }
            let lin = Polynomial::linear(f, a);
            let mut m = 0;
            loop {
                let (q, r) = g.divrem(&lin).expect("linear divisor");
                if !r.is_zero() {
                    break;
                }
                g = q;
                m += 1;
            }
            if m > 0 {
                out.push((a, m));
            }
        }
        out
    }

    pub fn splits(&self) -> bool {
        self.roots().iter().map(|r| r.1).sum::<usize>() == self.degree().unwrap_or(0)
    }

    pub fn is_squarefree(&self) -> bool {
        !self.is_zero() && self.gcd(&self.derivative()).degree() == Some(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f7() -> Field {
        Field::prime(7).unwrap()
    }

    #[test]
    fn roots_with_multiplicity() {
        let f = f7();
        let g = Polynomial::from_roots(&f, &[(Fe(1), 2), (Fe(3), 1)]);
        assert_eq!(g.roots(), vec![(Fe(1), 2), (Fe(3), 1)]);
        assert!(!g.is_squarefree());
        assert!(Polynomial::from_roots(&f, &[(Fe(1), 1), (Fe(2), 1)]).is_squarefree());
    }

    #[test]
    fn division_identity() {
        let f = f7();
        let a = Polynomial::from_ints(&f, &[3, 1, 4, 1, 5]);
        let b = Polynomial::from_ints(&f, &[2, 6, 1]);
        let (q, r) = a.divrem(&b).unwrap();
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.degree().unwrap_or(0) < 2);
    }

    #[test]
    fn inseparable_is_not_squarefree() {
        let f3 = Field::prime(3).unwrap();
        // x^3 - 1 = (x - 1)^3 over F_3
        let g = Polynomial::from_ints(&f3, &[-1, 0, 0, 1]);
        assert!(!g.is_squarefree());
        assert_eq!(g.roots(), vec![(Fe(1), 3)]);
    }
}
