use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::gf::{Fe, Field};
use crate::linalg::matrix::{dot, is_zero_vec, rref_rows, Vector};
use crate::linalg::Matrix;

/// Linear subspace of F_q^n held as a strict RREF basis. Equality, ordering
/// and hashing use the basis entries only.
#[derive(Clone)]
pub struct Subspace {
    field: Field,
    n: usize,
    basis: Vec<Vector>,
    pivots: Vec<usize>,
}

impl PartialEq for Subspace {
    fn eq(&self, o: &Subspace) -> bool {
        self.n == o.n && self.basis == o.basis
    }
}
impl Eq for Subspace {}

impl Hash for Subspace {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.n.hash(h);
        self.basis.hash(h);
    }
}

impl PartialOrd for Subspace {
    fn partial_cmp(&self, o: &Subspace) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Subspace {
    fn cmp(&self, o: &Subspace) -> Ordering {
        (self.n, self.basis.len(), &self.basis).cmp(&(o.n, o.basis.len(), &o.basis))
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .basis
            .iter()
            .map(|r| format!("({})", r.iter().map(|&a| self.field.fmt_elem(a)).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "span{{{}}}", rows.join(", "))
    }
}

impl Subspace {
    pub fn from_spanning(field: &Field, n: usize, vecs: &[Vector]) -> Subspace {
        let mut rows: Vec<Vector> = vecs.to_vec();
        debug_assert!(rows.iter().all(|r| r.len() == n));
        let pivots = rref_rows(field, &mut rows);
        Subspace { field: field.clone(), n, basis: rows, pivots }
    }

    /// Basis rows already in strict RREF; used by enumerators.
    pub(crate) fn from_rref_unchecked(field: &Field, n: usize, basis: Vec<Vector>, pivots: Vec<usize>) -> Subspace {
        Subspace { field: field.clone(), n, basis, pivots }
    }

    pub fn zero(field: &Field, n: usize) -> Subspace {
        Subspace { field: field.clone(), n, basis: vec![], pivots: vec![] }
    }

    pub fn full(field: &Field, n: usize) -> Subspace {
        let basis = (0..n)
            .map(|i| (0..n).map(|j| if i == j { Fe(1) } else { Fe(0) }).collect())
            .collect();
        Subspace { field: field.clone(), n, basis, pivots: (0..n).collect() }
    }

    pub fn line(field: &Field, v: &[Fe]) -> Subspace {
        Subspace::from_spanning(field, v.len(), &[v.to_vec()])
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn ambient_dim(&self) -> usize {
        self.n
    }
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }
    pub fn basis_matrix(&self) -> Matrix {
        if self.basis.is_empty() {
            return Matrix::zeros(&self.field, 0, self.n);
        }
        Matrix::from_rows(&self.field, &self.basis).expect("uniform rows")
    }

    pub fn contains(&self, v: &[Fe]) -> bool {
        let f = &self.field;
        let mut r = v.to_vec();
        for (row, &pc) in self.basis.iter().zip(&self.pivots) {
            let c = r[pc];
            if c.0 != 0 {
                for (x, &y) in r.iter_mut().zip(row) {
                    *x = f.sub(*x, f.mul(c, y));
                }
            }
        }
        is_zero_vec(&r)
    }

    /// Coordinates of v in the RREF basis, if v lies in the span.
    pub fn coordinates(&self, v: &[Fe]) -> Option<Vector> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&pc| v[pc]).collect())
    }

    pub fn contains_space(&self, o: &Subspace) -> bool {
        o.basis.iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, o: &Subspace) -> Subspace {
        let mut vs = self.basis.clone();
        vs.extend(o.basis.iter().cloned());
        Subspace::from_spanning(&self.field, self.n, &vs)
    }

    pub fn with_vector(&self, v: &[Fe]) -> Subspace {
        let mut vs = self.basis.clone();
        vs.push(v.to_vec());
        Subspace::from_spanning(&self.field, self.n, &vs)
    }

    /// Rows a with a . x = 0 for all x in self.
    pub fn annihilator(&self) -> Matrix {
        if self.basis.is_empty() {
            return Matrix::identity(&self.field, self.n);
        }
        let k = self.basis_matrix().kernel();
        if k.dim() == 0 {
            return Matrix::zeros(&self.field, 0, self.n);
        }
        k.basis_matrix()
    }

    pub fn intersect(&self, o: &Subspace) -> Subspace {
        let a = self.annihilator();
        let b = o.annihilator();
        let mut rows = a.row_vecs();
        rows.extend(b.row_vecs());
        if rows.is_empty() {
            return Subspace::full(&self.field, self.n);
        }
        Matrix::from_rows(&self.field, &rows).expect("uniform rows").kernel()
    }

    /// {m x : x in self}
    pub fn image(&self, m: &Matrix) -> Subspace {
        let vs: Vec<Vector> = self.basis.iter().map(|v| m.apply(v)).collect();
        Subspace::from_spanning(&self.field, m.rows(), &vs)
    }

    /// {x : m x in self}
    pub fn preimage(&self, m: &Matrix) -> Subspace {
        let a = self.annihilator();
        if a.rows() == 0 {
            return Subspace::full(&self.field, m.cols());
        }
        a.mul(m).expect("shapes agree").kernel()
    }

    /// Orthogonal complement for the bilinear form with Gram matrix g.
    pub fn perp(&self, g: &Matrix) -> Subspace {
        if self.basis.is_empty() {
            return Subspace::full(&self.field, self.n);
        }
        self.basis_matrix().mul(g).expect("shapes agree").kernel()
    }

    /// Every pair of basis vectors pairs to zero under g.
    pub fn is_isotropic(&self, g: &Matrix) -> bool {
        let f = &self.field;
        self.basis.iter().enumerate().all(|(i, v)| {
            let gv = g.apply(v);
            self.basis[i..].iter().all(|w| dot(f, w, &gv).0 == 0)
        })
    }

    /// Standard basis vectors extending self to the whole space.
    pub fn complement_basis(&self) -> Vec<Vector> {
        (0..self.n)
            .filter(|c| !self.pivots.contains(c))
            .map(|c| {
                let mut e = vec![Fe(0); self.n];
                e[c] = Fe(1);
                e
            })
            .collect()
    }

    /// Vectors of `outer` completing self to a basis of outer (self must lie in outer).
    pub fn complement_in(&self, outer: &Subspace) -> Vec<Vector> {
        let mut cur = self.clone();
        let mut out = vec![];
        for v in outer.basis() {
            if !cur.contains(v) {
                cur = cur.with_vector(v);
                out.push(v.clone());
            }
        }
        out
    }

    /// Re-expresses the subspace over a larger field.
    pub fn embed(&self, e: &crate::gf::Embedding) -> Subspace {
        let basis = self.basis.iter().map(|r| r.iter().map(|&a| e.map(a)).collect()).collect();
        Subspace { field: e.to.clone(), n: self.n, basis, pivots: self.pivots.clone() }
    }

    /// Entries as integer codes, row by row.
    pub fn to_codes(&self) -> Vec<Vec<u32>> {
        self.basis.iter().map(|r| r.iter().map(|a| a.0).collect()).collect()
    }
}
