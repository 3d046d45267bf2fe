//! Named pencils used by the CLI and the test suites.

use crate::error::{Error, Result};
use crate::gf::{Fe, Field};
use crate::linalg::{Matrix, Polynomial, Vector};
use crate::quadrics::{trace_form_fixture, Pencil};

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: String,
    pub description: String,
    pub pencil: Pencil,
    /// Root multiplicities of the pencil polynomial, in root order, when known.
    pub shape: Vec<usize>,
}

/// Field of order q (an odd prime power).
pub fn field_of_order(q: u32) -> Result<Field> {
    let p = (2..=q).find(|d| q % d == 0).ok_or_else(|| Error::InvalidField(format!("bad order {q}")))?;
    let mut k = 0;
    let mut r = q;
    while r % p == 0 {
        r /= p;
        k += 1;
    }
    if r != 1 {
        return Err(Error::InvalidField(format!("{q} is not a prime power")));
    }
    Field::with_degree(p, k)
}

/// Trace-form pencil for prod (x - root_i)^{m_i} with roots 1, 2, 3, ...
pub fn shape_pencil(field: &Field, shape: &[usize]) -> Result<Pencil> {
    if shape.len() >= field.q() as usize {
        return Err(Error::InvalidInput("not enough field elements for distinct roots".into()));
    }
    let roots: Vec<(Fe, usize)> = shape.iter().enumerate().map(|(i, &m)| (field.from_int(i as i64 + 1), m)).collect();
    let f = Polynomial::from_roots(field, &roots);
    let (q, t, _) = trace_form_fixture(&f, field.one())?;
    Pencil::from_operator(&q, &t)
}

/// Adds a cone point: (Q1 + 0, Q2 + 1) on U + k v_inf.
pub fn with_cone_at_infinity(p: &Pencil) -> Result<Pencil> {
    let f = p.field();
    let n = p.n();
    let grow = |m: &Matrix, corner: Fe| {
        let rows: Vec<Vector> = (0..=n)
            .map(|i| (0..=n).map(|j| if i < n && j < n { m.get(i, j) } else if i == n && j == n { corner } else { Fe(0) }).collect())
            .collect();
        Matrix::from_rows(f, &rows)
    };
    Pencil::new(grow(p.a1(), Fe(0))?, grow(p.a2(), f.one())?)
}

/// Diagonal pencil (sum x_i^2, sum c_i x_i^2) with distinct c_i for which the
/// Elkies kernel has square entries, so every X is rational. Falls back to
/// c = 0, 1, ..., N-1 when no such choice exists.
pub fn elkies_diagonal(field: &Field, n_total: usize) -> Result<Vec<Fe>> {
    let q = field.q() as usize;
    if n_total > q {
        return Err(Error::InvalidInput("field too small for distinct diagonal entries".into()));
    }
    let half = (n_total - 1) / 2;
    let mut idx: Vec<usize> = (0..n_total).collect();
    loop {
        let c: Vec<Fe> = idx.iter().map(|&i| Fe(i as u32)).collect();
        let rows: Vec<Vector> = (0..2 * half).map(|k| c.iter().map(|&ci| field.pow(ci, k as u64)).collect()).collect();
        let ker = Matrix::from_rows(field, &rows)?.kernel();
        if ker.dim() == 1 && ker.basis()[0].iter().all(|&d| d.0 != 0 && field.is_square(d)) {
            return Ok(c);
        }
        // next combination in lexicographic order
        let mut i = n_total;
        loop {
            if i == 0 {
                return Ok((0..n_total).map(|i| Fe(i as u32)).collect());
            }
            i -= 1;
            if idx[i] < q - n_total + i {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..n_total {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

pub fn diagonal_pencil(field: &Field, c: &[Fe]) -> Result<Pencil> {
    Pencil::new(Matrix::identity(field, c.len()), Matrix::diag(field, c))
}

pub const FIXTURE_NAMES: &[&str] = &[
    "generic-odd-3",
    "generic-odd-5",
    "generic-even-4",
    "generic-even-6",
    "regular-odd-5-shape-2111",
    "regular-odd-5-shape-221",
    "regular-odd-5-shape-311",
    "regular-odd-5-shape-32",
    "regular-odd-5-shape-41",
    "even-terminal-1111",
    "even-terminal-112",
    "even-terminal-31",
    "even-terminal-22",
    "even-terminal-400",
    "nodal-even-6",
    "nodal-nonsplit-even-6",
    "cusp-even-6",
    "weierstrass-even-6",
    "weierstrass-nodal-6",
];

fn default_q(name: &str) -> u32 {
    match name {
        "generic-odd-5" => 11,
        _ => 7,
    }
}

fn parse_shape(s: &str) -> Option<Vec<usize>> {
    s.chars().map(|c| c.to_digit(10).filter(|&d| d > 0).map(|d| d as usize)).collect()
}

/// Looks up a fixture by name. Besides the fixed list, `shape-<digits>` builds
/// the trace-form pencil of that multiplicity shape (e.g. `shape-2211`).
pub fn fixture(name: &str, q: Option<u32>) -> Result<Fixture> {
    let field = field_of_order(q.unwrap_or_else(|| default_q(name)))?;
    let mk = |desc: &str, pencil: Pencil, shape: Vec<usize>| Fixture { name: name.to_string(), description: desc.to_string(), pencil, shape };
    let shape_fx = |desc: &str, shape: &[usize]| -> Result<Fixture> { Ok(mk(desc, shape_pencil(&field, shape)?, shape.to_vec())) };
    match name {
        "generic-odd-3" | "generic-odd-5" => {
            let n = if name.ends_with('3') { 3 } else { 5 };
            let c = elkies_diagonal(&field, n)?;
            Ok(mk("diagonal generic odd pencil with rational Elkies kernel", diagonal_pencil(&field, &c)?, vec![1; n]))
        }
        "generic-even-4" => shape_fx("generic trace-form pencil, N=4", &[1, 1, 1, 1]),
        "generic-even-6" => shape_fx("generic trace-form pencil, N=6", &[1; 6]),
        "nodal-even-6" => shape_fx("one node: (x-1)(x-2)^2 (x-3)(x-4)(x-5), split over F_7", &[1, 2, 1, 1, 1]),
        "nodal-nonsplit-even-6" => shape_fx("one node: (x-1)^2 (x-2)(x-3)(x-4)(x-5), non-split over F_7", &[2, 1, 1, 1, 1]),
        "cusp-even-6" => shape_fx("one cusp: (x-1)^3 (x-2)(x-3)(x-4)", &[3, 1, 1, 1]),
        "weierstrass-even-6" => {
            let base = shape_pencil(&field, &[1; 5])?;
            Ok(mk("generic N=5 trace form plus a cone point at infinity", with_cone_at_infinity(&base)?, vec![1; 6]))
        }
        "weierstrass-nodal-6" => {
            let base = shape_pencil(&field, &[2, 1, 1, 1])?;
            Ok(mk("N=5 shape (2,1,1,1) plus a cone point at infinity", with_cone_at_infinity(&base)?, vec![2, 1, 1, 1, 1]))
        }
        _ => {
            let shape = if let Some(s) = name.strip_prefix("regular-odd-5-shape-") {
                parse_shape(s).filter(|v| v.iter().sum::<usize>() == 5)
            } else if let Some(s) = name.strip_prefix("even-terminal-") {
                let s = if s == "400" { "4" } else { s };
                parse_shape(s).filter(|v| v.iter().sum::<usize>() == 4)
            } else if let Some(s) = name.strip_prefix("shape-") {
                parse_shape(s)
            } else {
                None
            };
            let shape = shape.ok_or_else(|| Error::InvalidInput(format!("unknown fixture '{name}'")))?;
            if shape.iter().sum::<usize>() < 3 {
                return Err(Error::InvalidInput("pencils need N >= 3".into()));
            }
            shape_fx("trace-form pencil of the given multiplicity shape", &shape)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_named_fixtures_build() {
        for name in FIXTURE_NAMES {
            let fx = fixture(name, None).unwrap();
            assert_eq!(fx.pencil.n(), fx.shape.iter().sum::<usize>(), "{name}");
        }
        assert!(fixture("nope", None).is_err());
        assert_eq!(fixture("shape-2211", None).unwrap().pencil.n(), 6);
    }

    #[test]
    fn elkies_choices() {
        let f7 = Field::prime(7).unwrap();
        assert_eq!(elkies_diagonal(&f7, 3).unwrap(), vec![Fe(0), Fe(1), Fe(3)]);
        let f11 = Field::prime(11).unwrap();
        assert_eq!(elkies_diagonal(&f11, 5).unwrap(), vec![Fe(0), Fe(1), Fe(2), Fe(4), Fe(7)]);
    }

    #[test]
    fn orders() {
        assert_eq!(field_of_order(49).unwrap().k(), 2);
        assert!(field_of_order(15).is_err());
    }
}
