use std::fmt;

use crate::error::{Error, Result};
use crate::gf::{Fe, Field};
use crate::linalg::berkowitz::{berkowitz, PolyRing};
use crate::linalg::{Polynomial, Subspace};

pub type Vector = Vec<Fe>;

/// Dense row-major matrix. Vectors are columns: `m.apply(v)` is `m * v`.
#[derive(Clone)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Fe>,
}

impl PartialEq for Matrix {
    fn eq(&self, o: &Matrix) -> bool {
        self.rows == o.rows && self.cols == o.cols && self.data == o.data && self.field == o.field
    }
}
impl Eq for Matrix {}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            let r: Vec<String> = self.row(i).iter().map(|&a| self.field.fmt_elem(a)).collect();
            writeln!(f, "  [{}]", r.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Matrix {
        Matrix { field: field.clone(), rows, cols, data: vec![Fe(0); rows * cols] }
    }

    pub fn identity(field: &Field, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, Fe(1));
        }
        m
    }

    pub fn diag(field: &Field, d: &[Fe]) -> Matrix {
        let mut m = Matrix::zeros(field, d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m.set(i, i, x);
        }
        m
    }

    pub fn from_rows(field: &Field, rows: &[Vector]) -> Result<Matrix> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::ShapeError("ragged rows".into()));
        }
        Ok(Matrix { field: field.clone(), rows: rows.len(), cols, data: rows.concat() })
    }

    /// Integers reduced into the prime field.
    pub fn from_ints(field: &Field, rows: &[Vec<i64>]) -> Result<Matrix> {
        let rows: Vec<Vector> = rows.iter().map(|r| r.iter().map(|&x| field.from_int(x)).collect()).collect();
        Matrix::from_rows(field, &rows)
    }

    pub fn from_cols(field: &Field, cols: &[Vector]) -> Result<Matrix> {
        Ok(Matrix::from_rows(field, cols)?.transpose())
    }

    /// Companion matrix of a monic polynomial: multiplication by x on 1, x, ..., x^{n-1}.
    pub fn companion(f: &Polynomial) -> Matrix {
        let field = f.field();
        let n = f.degree().expect("nonzero polynomial");
        let mut m = Matrix::zeros(field, n, n);
        for j in 0..n {
            if j + 1 < n {
                m.set(j + 1, j, Fe(1));
            }
        }
        let inv = field.inv(f.lead()).expect("nonzero lead");
        for i in 0..n {
            m.set(i, n - 1, field.neg(field.mul(f.coeff(i), inv)));
        }
        m
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Fe {
        self.data[i * self.cols + j]
    }
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Fe) {
        self.data[i * self.cols + j] = v;
    }
    pub fn row(&self, i: usize) -> &[Fe] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
    pub fn row_vecs(&self) -> Vec<Vector> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
    pub fn col(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }
    pub fn data(&self) -> &[Fe] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && *self == self.transpose()
    }

    pub fn mul(&self, o: &Matrix) -> Result<Matrix> {
        if self.cols != o.rows {
            return Err(Error::ShapeError(format!("{}x{} * {}x{}", self.rows, self.cols, o.rows, o.cols)));
        }
        let f = &self.field;
        let mut r = Matrix::zeros(f, self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.0 == 0 {
                    continue;
                }
                for j in 0..o.cols {
                    let idx = i * o.cols + j;
                    r.data[idx] = f.add(r.data[idx], f.mul(a, o.get(k, j)));
                }
            }
        }
        Ok(r)
    }

    fn zip(&self, o: &Matrix, op: impl Fn(Fe, Fe) -> Fe) -> Result<Matrix> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(Error::ShapeError("dimension mismatch".into()));
        }
        let data = self.data.iter().zip(&o.data).map(|(&a, &b)| op(a, b)).collect();
        Ok(Matrix { field: self.field.clone(), rows: self.rows, cols: self.cols, data })
    }

    pub fn add(&self, o: &Matrix) -> Result<Matrix> {
        self.zip(o, |a, b| self.field.add(a, b))
    }
    pub fn sub(&self, o: &Matrix) -> Result<Matrix> {
        self.zip(o, |a, b| self.field.sub(a, b))
    }

    pub fn scale(&self, c: Fe) -> Matrix {
        let data = self.data.iter().map(|&a| self.field.mul(a, c)).collect();
        Matrix { field: self.field.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn neg(&self) -> Matrix {
        self.scale(self.field.neg(Fe(1)))
    }

    /// self - c * I
    pub fn shift(&self, c: Fe) -> Matrix {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            m.set(i, i, self.field.sub(m.get(i, i), c));
        }
        m
    }

    pub fn apply(&self, v: &[Fe]) -> Vector {
        let f = &self.field;
        (0..self.rows)
            .map(|i| dot(f, self.row(i), v))
            .collect()
    }

    /// v^T M w
    pub fn bilinear(&self, v: &[Fe], w: &[Fe]) -> Fe {
        dot(&self.field, v, &self.apply(w))
    }

    pub fn pow(&self, e: usize) -> Matrix {
        let mut r = Matrix::identity(&self.field, self.rows);
        for _ in 0..e {
            r = r.mul(self).expect("square");
        }
        r
    }

    /// p(M) by Horner.
    pub fn eval_poly(&self, p: &Polynomial) -> Matrix {
        let n = self.rows;
        let mut r = Matrix::zeros(&self.field, n, n);
        for &c in p.coeffs().iter().rev() {
            r = r.mul(self).expect("square");
            for i in 0..n {
                r.set(i, i, self.field.add(r.get(i, i), c));
            }
        }
        r
    }

    /// Reduced row echelon form with zero rows dropped, plus pivot columns.
    pub fn rref_with_pivots(&self) -> (Matrix, Vec<usize>) {
        let mut rows = self.row_vecs();
        let pivots = rref_rows(&self.field, &mut rows);
        let m = Matrix { field: self.field.clone(), rows: rows.len(), cols: self.cols, data: rows.concat() };
        (m, pivots)
    }

    pub fn rref(&self) -> Matrix {
        self.rref_with_pivots().0
    }

    pub fn rank(&self) -> usize {
        self.rref_with_pivots().1.len()
    }

    /// Right null space {v : M v = 0}.
    pub fn kernel(&self) -> Subspace {
        let (r, pivots) = self.rref_with_pivots();
        let f = &self.field;
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let basis: Vec<Vector> = free
            .iter()
            .map(|&fc| {
                let mut v = vec![Fe(0); self.cols];
                v[fc] = Fe(1);
                for (i, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(r.get(i, fc));
                }
                v
            })
            .collect();
        Subspace::from_spanning(f, self.cols, &basis)
    }

    pub fn det(&self) -> Result<Fe> {
        if !self.is_square() {
            return Err(Error::ShapeError("det of non-square matrix".into()));
        }
        let f = &self.field;
        let n = self.rows;
        let mut a = self.row_vecs();
        let mut det = Fe(1);
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| a[r][c].0 != 0) else {
                return Ok(Fe(0));
            };
            if p != c {
                a.swap(p, c);
                det = f.neg(det);
            }
            let piv = a[c][c];
            det = f.mul(det, piv);
            let inv = f.inv(piv)?;
            for r in c + 1..n {
                let factor = f.mul(a[r][c], inv);
                if factor.0 == 0 {
                    continue;
                }
                for j in c..n {
                    let t = f.mul(factor, a[c][j]);
                    a[r][j] = f.sub(a[r][j], t);
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::ShapeError("inverse of non-square matrix".into()));
        }
        let n = self.rows;
        let f = &self.field;
        let mut rows: Vec<Vector> = (0..n)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.extend((0..n).map(|j| if i == j { Fe(1) } else { Fe(0) }));
                r
            })
            .collect();
        let pivots = rref_rows(f, &mut rows);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::DivisionByZero);
        }
        let inv: Vec<Vector> = rows.iter().map(|r| r[n..].to_vec()).collect();
        Matrix::from_rows(f, &inv)
    }

    /// det(xI - M) by Berkowitz; no divisions.
    pub fn charpoly(&self) -> Result<Polynomial> {
        if !self.is_square() {
            return Err(Error::ShapeError("charpoly of non-square matrix".into()));
        }
        let c = berkowitz(&self.field, self.rows, &self.data);
        Ok(Polynomial::new(&self.field, c.into_iter().rev().collect()))
    }

    /// Minimal polynomial as the lcm of the Krylov minimal polynomials of e_1..e_n.
    pub fn minpoly(&self) -> Result<Polynomial> {
        if !self.is_square() {
            return Err(Error::ShapeError("minpoly of non-square matrix".into()));
        }
        let f = &self.field;
        let n = self.rows;
        let mut acc = Polynomial::one(f);
        for j in 0..n {
            let mut e = vec![Fe(0); n];
            e[j] = Fe(1);
            if acc.degree() != Some(0) && self.eval_poly(&acc).apply(&e).iter().all(|x| x.0 == 0) {
                continue;
            }
            let mut krylov = vec![e];
            loop {
                let next = self.apply(krylov.last().unwrap());
                let mut cols = krylov.clone();
                cols.push(next.clone());
                let k = Matrix::from_cols(f, &cols)?.kernel();
                if k.dim() > 0 {
                    // a relation with nonzero last coefficient, since earlier vectors are independent
                    let rel = &k.basis()[0];
                    let d = krylov.len();
                    let inv = f.inv(rel[d])?;
                    let g = Polynomial::new(f, rel.iter().map(|&c| f.mul(c, inv)).collect());
                    acc = acc.lcm(&g);
                    break;
                }
                krylov.push(next);
            }
        }
        Ok(acc)
    }

    /// ker (M - alpha)^mult
    pub fn generalized_eigenspace(&self, alpha: Fe, mult: usize) -> Result<Subspace> {
        if self.charpoly()?.eval(alpha).0 != 0 {
            return Err(Error::NotAnEigenvalue);
        }
        Ok(self.shift(alpha).pow(mult).kernel())
    }

    /// Submatrix by row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(&self.field, rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                m.set(i, j, self.get(r, c));
            }
        }
        m
    }

    /// Matrices over the field of `e.to`.
    pub fn embed(&self, e: &crate::gf::Embedding) -> Matrix {
        Matrix {
            field: e.to.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| e.map(a)).collect(),
        }
    }

    /// Entries as integer codes, row by row.
    pub fn to_codes(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).iter().map(|a| a.0).collect()).collect()
    }
}

pub fn dot(f: &Field, a: &[Fe], b: &[Fe]) -> Fe {
    a.iter().zip(b).fold(Fe(0), |acc, (&x, &y)| if x.0 == 0 || y.0 == 0 { acc } else { f.add(acc, f.mul(x, y)) })
}

pub fn vec_add(f: &Field, a: &[Fe], b: &[Fe]) -> Vector {
    a.iter().zip(b).map(|(&x, &y)| f.add(x, y)).collect()
}

pub fn vec_sub(f: &Field, a: &[Fe], b: &[Fe]) -> Vector {
    a.iter().zip(b).map(|(&x, &y)| f.sub(x, y)).collect()
}

pub fn vec_scale(f: &Field, a: &[Fe], c: Fe) -> Vector {
    a.iter().map(|&x| f.mul(x, c)).collect()
}

/// a + c b
pub fn vec_axpy(f: &Field, a: &[Fe], c: Fe, b: &[Fe]) -> Vector {
    a.iter().zip(b).map(|(&x, &y)| f.add(x, f.mul(c, y))).collect()
}

pub fn is_zero_vec(v: &[Fe]) -> bool {
    v.iter().all(|x| x.0 == 0)
}

/// In-place RREF; drops zero rows and returns pivot columns.
pub(crate) fn rref_rows(f: &Field, rows: &mut Vec<Vector>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = vec![];
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][c].0 != 0) else {
            continue;
        };
        rows.swap(r, p);
        let inv = f.inv(rows[r][c]).expect("nonzero pivot");
        if inv != Fe(1) {
            for x in rows[r].iter_mut() {
                *x = f.mul(*x, inv);
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].0 == 0 {
                continue;
            }
            let factor = row[c];
            for (x, &y) in row.iter_mut().zip(&pivot_row).skip(c) {
                if y.0 != 0 {
                    *x = f.sub(*x, f.mul(factor, y));
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

/// det(x A - B) as a polynomial in x, by Berkowitz over F[x].
pub fn pencil_det(a: &Matrix, b: &Matrix) -> Result<Polynomial> {
    if !a.is_square() || a.rows != b.rows || a.cols != b.cols {
        return Err(Error::ShapeError("pencil matrices must be square and equal size".into()));
    }
    let f = a.field();
    let ring = PolyRing(f.clone());
    let n = a.rows;
    let entries: Vec<Polynomial> = a
        .data
        .iter()
        .zip(&b.data)
        .map(|(&x, &y)| Polynomial::new(f, vec![f.neg(y), x]))
        .collect();
    let c = berkowitz(&ring, n, &entries);
    let constant = c[n].clone();
    Ok(if n % 2 == 1 { constant.neg() } else { constant })
}
