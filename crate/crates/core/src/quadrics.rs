//! Quadratic forms, pencils, the self-adjoint operator T and the trace-form fixtures.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Fe, Field, FieldSpec};
use crate::linalg::{dot, pencil_det, Matrix, Polynomial, Subspace, Vector};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticForm {
    gram: Matrix,
}

impl QuadraticForm {
    pub fn new(gram: Matrix) -> Result<QuadraticForm> {
        if !gram.is_symmetric() {
            return Err(Error::InvalidInput("Gram matrix must be symmetric".into()));
        }
        Ok(QuadraticForm { gram })
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }
    pub fn field(&self) -> &Field {
        self.gram.field()
    }
    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn b(&self, v: &[Fe], w: &[Fe]) -> Fe {
        self.gram.bilinear(v, w)
    }

    pub fn q(&self, v: &[Fe]) -> Fe {
        self.gram.bilinear(v, v)
    }

    /// (-1)^{N(N-1)/2} det(gram)
    pub fn disc(&self) -> Fe {
        let n = self.dim();
        let d = self.gram.det().expect("square");
        if (n * n.saturating_sub(1) / 2) % 2 == 1 { self.field().neg(d) } else { d }
    }

    pub fn disc_square(&self) -> bool {
        self.field().is_square(self.disc())
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.gram.det().map(|d| d.0 != 0).unwrap_or(false)
    }

    /// Isotropic subspace of maximal dimension, found by splitting off
    /// hyperbolic planes. For a nondegenerate form of even dimension this is
    /// half the dimension exactly when the form is split.
    pub fn maximal_isotropic(&self) -> Subspace {
        let f = self.field().clone();
        let n = self.dim();
        let mut found: Vec<Vector> = vec![];
        let mut rest = Subspace::full(&f, n);
        loop {
            // isotropic vector in `rest` outside the radical of the restriction
            let basis = rest.basis().to_vec();
            if basis.is_empty() {
                break;
            }
            let Some(v) = first_isotropic(self, &basis) else { break };
            let Some(w) = basis.iter().find(|w| self.b(&v, w).0 != 0).cloned() else { break };
            found.push(v.clone());
            let plane = Subspace::from_spanning(&f, n, &[v, w]);
            rest = rest.intersect(&plane.perp(&self.gram));
        }
        let radical = Subspace::full(&f, n).perp(&self.gram);
        Subspace::from_spanning(&f, n, &found).sum(&radical)
    }
}

/// First nonzero isotropic vector in the span of `basis`, scanning coefficient vectors.
fn first_isotropic(q: &QuadraticForm, basis: &[Vector]) -> Option<Vector> {
    let f = q.field();
    let d = basis.len();
    let g = Matrix::from_rows(f, basis).ok()?;
    let restricted = g.mul(q.gram()).ok()?.mul(&g.transpose()).ok()?;
    for c in crate::linalg::projective_points(f, d) {
        if restricted.bilinear(&c, &c).0 == 0 {
            let v = (0..q.dim())
                .map(|j| (0..d).fold(Fe(0), |acc, i| f.add(acc, f.mul(c[i], basis[i][j]))))
                .collect::<Vector>();
            // skip vectors in the radical of the restriction
            let rv = restricted.apply(&c);
            if rv.iter().any(|x| x.0 != 0) {
                return Some(v);
            }
        }
    }
    None
}

/// A point of the parameter line: Q_lambda = lambda A1 - A2, Q_inf = A1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Lambda {
    Affine(Fe),
    Infinity,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pencil {
    a1: Matrix,
    a2: Matrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassTag {
    Generic,
    RegularNonGeneric,
    NonRegular,
}

#[derive(Clone, Debug)]
pub struct PencilClass {
    pub tag: ClassTag,
    pub f: Polynomial,
    pub disc_square: bool,
}

impl Pencil {
    pub fn new(a1: Matrix, a2: Matrix) -> Result<Pencil> {
        if !a1.is_square() || a1.rows() != a2.rows() || a1.cols() != a2.cols() {
            return Err(Error::ShapeError("pencil matrices must be square of equal size".into()));
        }
        if a1.field() != a2.field() {
            return Err(Error::FieldMismatch);
        }
        if !a1.is_symmetric() || !a2.is_symmetric() {
            return Err(Error::InvalidInput("pencil Gram matrices must be symmetric".into()));
        }
        Ok(Pencil { a1, a2 })
    }

    /// Pencil (Q, Q(., T .)).
    pub fn from_operator(q: &QuadraticForm, t: &Matrix) -> Result<Pencil> {
        Pencil::new(q.gram().clone(), q.gram().mul(t)?)
    }

    pub fn a1(&self) -> &Matrix {
        &self.a1
    }
    pub fn a2(&self) -> &Matrix {
        &self.a2
    }
    pub fn field(&self) -> &Field {
        self.a1.field()
    }
    pub fn n(&self) -> usize {
        self.a1.rows()
    }
    pub fn q1(&self) -> QuadraticForm {
        QuadraticForm { gram: self.a1.clone() }
    }
    pub fn q2(&self) -> QuadraticForm {
        QuadraticForm { gram: self.a2.clone() }
    }

    pub fn member(&self, l: Lambda) -> Matrix {
        match l {
            Lambda::Infinity => self.a1.clone(),
            Lambda::Affine(x) => self.a1.scale(x).sub(&self.a2).expect("same shape"),
        }
    }

    pub fn member_form(&self, l: Lambda) -> QuadraticForm {
        QuadraticForm { gram: self.member(l) }
    }

    /// f(x) = (-1)^{N(N-1)/2} det(x A1 - A2)
    pub fn pencil_poly(&self) -> Polynomial {
        let d = pencil_det(&self.a1, &self.a2).expect("validated shapes");
        let n = self.n();
        if (n * (n - 1) / 2) % 2 == 1 { d.neg() } else { d }
    }

    pub fn self_adjoint_t(&self) -> Result<Matrix> {
        let inv = self.a1.inverse().map_err(|_| Error::NeedNondegenerateQ1)?;
        inv.mul(&self.a2)
    }

    pub fn classify(&self) -> Result<PencilClass> {
        let t = self.self_adjoint_t()?;
        let f = self.pencil_poly();
        let tag = if f.is_squarefree() && f.degree().unwrap_or(0) + 1 >= self.n() {
            ClassTag::Generic
        } else if t.minpoly()? == t.charpoly()? {
            ClassTag::RegularNonGeneric
        } else {
            ClassTag::NonRegular
        };
        Ok(PencilClass { tag, f, disc_square: self.q1().disc_square() })
    }

    pub fn eigendata(&self) -> Result<EigenData> {
        let t = self.self_adjoint_t()?;
        let ed = eigendata(&t, &t.charpoly()?)?;
        ed.verify_orthogonal(&self.q1())?;
        Ok(ed)
    }

    /// Rational points of the parameter line in canonical order: affine by code, then infinity.
    pub fn parameters(&self) -> Vec<Lambda> {
        let mut v: Vec<Lambda> = self.field().elements().map(Lambda::Affine).collect();
        v.push(Lambda::Infinity);
        v
    }

    /// Same pencil over a larger field.
    pub fn embed(&self, e: &crate::gf::Embedding) -> Pencil {
        Pencil { a1: self.a1.embed(e), a2: self.a2.embed(e) }
    }
}

#[derive(Clone, Debug)]
pub struct EigenData {
    pub roots: Vec<(Fe, usize)>,
    /// Generalized eigenspaces U_i.
    pub spaces: Vec<Subspace>,
    /// Eigenspaces ker(T - alpha_i).
    pub eigenspaces: Vec<Subspace>,
}

impl EigenData {
    pub fn r_plus_1(&self) -> usize {
        self.roots.len()
    }

    pub fn r(&self) -> usize {
        self.roots.len().saturating_sub(1)
    }

    pub fn mults(&self) -> Vec<usize> {
        self.roots.iter().map(|r| r.1).collect()
    }

    /// First basis vector of ker(T - alpha_i).
    pub fn eigenvector(&self, i: usize) -> &Vector {
        &self.eigenspaces[i].basis()[0]
    }

    pub fn verify_orthogonal(&self, q: &QuadraticForm) -> Result<()> {
        let f = q.field();
        for (i, u) in self.spaces.iter().enumerate() {
            for w in &self.spaces[i + 1..] {
                for a in u.basis() {
                    let ga = q.gram().apply(a);
                    if w.basis().iter().any(|b| dot(f, b, &ga).0 != 0) {
                        return Err(Error::InvalidInput("generalized eigenspaces not orthogonal".into()));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_regular(&self) -> bool {
        self.eigenspaces.iter().all(|e| e.dim() == 1)
    }
}

/// Roots of f with multiplicities and the generalized eigenspaces of T.
pub fn eigendata(t: &Matrix, f: &Polynomial) -> Result<EigenData> {
    if !f.splits() {
        return Err(Error::NeedsExtension);
    }
    let roots = f.roots();
    let mut spaces = vec![];
    let mut eigenspaces = vec![];
    for &(a, m) in &roots {
        spaces.push(t.generalized_eigenspace(a, m)?);
        eigenspaces.push(t.shift(a).kernel());
    }
    Ok(EigenData { roots, spaces, eigenspaces })
}

/// The form <l, m> = coeff of beta^{N-1} in l m mod f, divided by `disc_target`,
/// on L = k[x]/f in the basis 1, beta, ..., beta^{N-1}; the multiplication-by-beta
/// matrix; and X0 = span{1, ..., beta^{n-1}} with n = floor((N-1)/2).
pub fn trace_form_fixture(f: &Polynomial, disc_target: Fe) -> Result<(QuadraticForm, Matrix, Subspace)> {
    let field = f.field();
    if !f.is_monic() {
        return Err(Error::InvalidInput("trace-form fixture needs a monic polynomial".into()));
    }
    let n = f.degree().unwrap_or(0);
    let scale = field.inv(disc_target)?;
    let mut powers = vec![Polynomial::one(field)];
    for _ in 1..(2 * n).max(1) {
        let next = powers.last().unwrap().mul(&Polynomial::x(field)).rem(f)?;
        powers.push(next);
    }
    let mut gram = Matrix::zeros(field, n, n);
    for i in 0..n {
        for j in 0..n {
            gram.set(i, j, field.mul(powers[i + j].coeff(n - 1), scale));
        }
    }
    let t0 = Matrix::companion(f);
    let half = (n.saturating_sub(1)) / 2;
    let x0 = Subspace::from_spanning(field, n, &unit_vectors(field, n, half));
    Ok((QuadraticForm::new(gram)?, t0, x0))
}

/// span{1, ..., beta^{k-1}} in the trace-form basis.
pub fn trace_form_span(field: &Field, n: usize, k: usize) -> Subspace {
    Subspace::from_spanning(field, n, &unit_vectors(field, n, k))
}

fn unit_vectors(field: &Field, n: usize, k: usize) -> Vec<Vector> {
    (0..k)
        .map(|i| {
            let mut e = vec![field.zero(); n];
            e[i] = field.one();
            e
        })
        .collect()
}

/// Restriction of (Q, T) to v^perp and descent to v^perp / v, modelled on a
/// complement S of v inside v^perp.
#[derive(Clone, Debug)]
pub struct Descent {
    pub q: QuadraticForm,
    pub t: Matrix,
    pub v: Vector,
    pub alpha: Fe,
    /// Basis s_1..s_{N-2} of the complement, as vectors of the ambient space.
    pub complement: Vec<Vector>,
    pub vperp: Subspace,
    /// Inverse of the basis matrix [v, s_1, ..., s_{N-2}, u].
    coords: Matrix,
}

impl Descent {
    pub fn dim(&self) -> usize {
        self.complement.len()
    }

    /// Coordinates in S of the class of w in v^perp / v.
    pub fn project(&self, w: &[Fe]) -> Vector {
        let c = self.coords.apply(w);
        c[1..=self.dim()].to_vec()
    }

    /// The representative sum c_j s_j of a class.
    pub fn lift(&self, c: &[Fe]) -> Vector {
        let f = self.q.field();
        let n = self.v.len();
        (0..n)
            .map(|k| c.iter().zip(&self.complement).fold(Fe(0), |acc, (&ci, s)| f.add(acc, f.mul(ci, s[k]))))
            .collect()
    }

    /// Image of X intersected with v^perp.
    pub fn project_subspace(&self, x: &Subspace) -> Subspace {
        let xi = x.intersect(&self.vperp);
        let vs: Vec<Vector> = xi.basis().iter().map(|w| self.project(w)).collect();
        Subspace::from_spanning(self.q.field(), self.dim(), &vs)
    }

    /// Full preimage of a subspace of v^perp / v: its lift plus v.
    pub fn lift_subspace(&self, xb: &Subspace) -> Subspace {
        let mut vs: Vec<Vector> = xb.basis().iter().map(|c| self.lift(c)).collect();
        vs.push(self.v.clone());
        Subspace::from_spanning(self.q.field(), self.v.len(), &vs)
    }

    /// Lift of a subspace without adding v.
    pub fn lift_plain(&self, xb: &Subspace) -> Subspace {
        let vs: Vec<Vector> = xb.basis().iter().map(|c| self.lift(c)).collect();
        Subspace::from_spanning(self.q.field(), self.v.len(), &vs)
    }

    pub fn pencil(&self) -> Result<Pencil> {
        Pencil::from_operator(&self.q, &self.t)
    }
}

pub fn restrict_and_descend(q: &QuadraticForm, t: &Matrix, v: &[Fe]) -> Result<Descent> {
    let f = q.field().clone();
    if v.iter().all(|x| x.0 == 0) || q.q(v).0 != 0 {
        return Err(Error::BadReductionVector);
    }
    let tv = t.apply(v);
    let k = v.iter().position(|x| x.0 != 0).unwrap();
    let alpha = f.div(tv[k], v[k])?;
    if tv.iter().zip(v).any(|(&a, &b)| a != f.mul(alpha, b)) {
        return Err(Error::BadReductionVector);
    }
    let vline = Subspace::line(&f, v);
    let vperp = vline.perp(q.gram());
    let complement = vline.complement_in(&vperp);
    let u = vperp.complement_basis().into_iter().next().ok_or(Error::BadReductionVector)?;
    let mut cols = vec![v.to_vec()];
    cols.extend(complement.iter().cloned());
    cols.push(u);
    let coords = Matrix::from_cols(&f, &cols)?.inverse()?;
    let m = complement.len();
    let mut gram = Matrix::zeros(&f, m, m);
    for i in 0..m {
        for j in 0..m {
            gram.set(i, j, q.b(&complement[i], &complement[j]));
        }
    }
    let mut d = Descent {
        q: QuadraticForm::new(gram)?,
        t: Matrix::zeros(&f, m, m),
        v: v.to_vec(),
        alpha,
        complement,
        vperp,
        coords,
    };
    let mut tb = Matrix::zeros(&f, m, m);
    for j in 0..m {
        let img = d.project(&t.apply(&d.complement[j]));
        for i in 0..m {
            tb.set(i, j, img[i]);
        }
    }
    d.t = tb;
    Ok(d)
}

/// JSON form of a pencil. Entries are element codes (residues when k = 1;
/// negative integers are reduced mod p in that case).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PencilJson {
    pub field: FieldSpec,
    #[serde(rename = "A1")]
    pub a1: Vec<Vec<i64>>,
    #[serde(rename = "A2")]
    pub a2: Vec<Vec<i64>>,
}

impl PencilJson {
    pub fn to_pencil(&self) -> Result<Pencil> {
        let field = Field::new(self.field.clone())?;
        let conv = |m: &Vec<Vec<i64>>| -> Result<Matrix> {
            let rows: Result<Vec<Vector>> = m
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|&x| if field.k() == 1 { Ok(field.from_int(x)) } else { field.from_code(x as u32) })
                        .collect()
                })
                .collect();
            Matrix::from_rows(&field, &rows?)
        };
        let p = Pencil::new(conv(&self.a1)?, conv(&self.a2)?)?;
        if p.n() < 3 {
            return Err(Error::InvalidInput("pencils need N >= 3".into()));
        }
        Ok(p)
    }

    pub fn from_pencil(p: &Pencil) -> PencilJson {
        let conv = |m: &Matrix| m.to_codes().into_iter().map(|r| r.into_iter().map(|x| x as i64).collect()).collect();
        PencilJson { field: p.field().spec().clone(), a1: conv(p.a1()), a2: conv(p.a2()) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f7() -> Field {
        Field::prime(7).unwrap()
    }

    fn diag_pencil(f: &Field, c: &[i64]) -> Pencil {
        let a2 = Matrix::diag(f, &c.iter().map(|&x| f.from_int(x)).collect::<Vec<_>>());
        Pencil::new(Matrix::identity(f, c.len()), a2).unwrap()
    }

    #[test]
    fn pencil_poly_sign_convention() {
        let f = f7();
        let p = diag_pencil(&f, &[1, 2, 4]);
        // det(xI - D) = (x-1)(x-2)(x-4); N = 3 gives sign (-1)^3
        let expect = Polynomial::from_roots(&f, &[(Fe(1), 1), (Fe(2), 1), (Fe(4), 1)]).neg();
        assert_eq!(p.pencil_poly(), expect);
        let same = Pencil::new(Matrix::identity(&f, 3), Matrix::identity(&f, 3)).unwrap();
        assert_eq!(same.pencil_poly().roots(), vec![(Fe(1), 3)]);
        let sing = Pencil::new(Matrix::diag(&f, &[Fe(1), Fe(1), Fe(0)]), Matrix::identity(&f, 3)).unwrap();
        assert!(sing.pencil_poly().degree().unwrap() < 3);
    }

    #[test]
    fn pencil_poly_by_substitution() {
        let f = f7();
        let a1 = Matrix::from_ints(&f, &[vec![1, 2, 0], vec![2, 3, 1], vec![0, 1, 5]]).unwrap();
        let a2 = Matrix::from_ints(&f, &[vec![4, 0, 1], vec![0, 2, 6], vec![1, 6, 0]]).unwrap();
        let p = Pencil::new(a1.clone(), a2.clone()).unwrap();
        let poly = p.pencil_poly();
        for x in f.elements() {
            let d = a1.scale(x).sub(&a2).unwrap().det().unwrap();
            assert_eq!(poly.eval(x), f.neg(d));
        }
    }

    #[test]
    fn classify_examples() {
        let f = f7();
        assert_eq!(diag_pencil(&f, &[1, 2, 4]).classify().unwrap().tag, ClassTag::Generic);
        let g = Polynomial::from_roots(&f, &[(Fe(1), 2), (Fe(2), 1)]);
        let (q, t, _) = trace_form_fixture(&g, Fe(1)).unwrap();
        let p = Pencil::from_operator(&q, &t).unwrap();
        assert_eq!(p.classify().unwrap().tag, ClassTag::RegularNonGeneric);
        assert_eq!(diag_pencil(&f, &[1, 1, 1]).classify().unwrap().tag, ClassTag::NonRegular);
        let sing = Pencil::new(Matrix::diag(&f, &[Fe(1), Fe(1), Fe(0)]), Matrix::identity(&f, 3)).unwrap();
        assert_eq!(sing.classify().unwrap_err(), Error::NeedNondegenerateQ1);
    }

    #[test]
    fn trace_form_examples() {
        let f = f7();
        let g = Polynomial::from_roots(&f, &[(Fe(0), 1), (Fe(1), 1), (Fe(2), 1)]);
        let (q, t, x0) = trace_form_fixture(&g, Fe(1)).unwrap();
        assert_eq!(x0.dim(), 1);
        assert!(x0.is_isotropic(q.gram()));
        let qt = q.gram().mul(&t).unwrap();
        assert!(qt.is_symmetric());
        // <1, beta^{N-1}> = 1 / disc_target
        let (q3, _, _) = trace_form_fixture(&g, Fe(3)).unwrap();
        assert_eq!(q3.gram().get(0, 2), f.inv(Fe(3)).unwrap());

        let quartic = Polynomial::from_roots(&f, &[(Fe(1), 4)]);
        let (q, t, _) = trace_form_fixture(&quartic, Fe(1)).unwrap();
        assert_eq!(t.minpoly().unwrap(), quartic);
        let p = Pencil::from_operator(&q, &t).unwrap();
        assert_eq!(p.classify().unwrap().tag, ClassTag::RegularNonGeneric);
    }

    #[test]
    fn self_adjoint_examples() {
        let f = f7();
        let p = diag_pencil(&f, &[1, 2, 4]);
        assert_eq!(p.self_adjoint_t().unwrap(), p.a2().clone());
        let g = Polynomial::from_roots(&f, &[(Fe(1), 2), (Fe(3), 1), (Fe(5), 1)]);
        let (q, t, _) = trace_form_fixture(&g, Fe(1)).unwrap();
        let p = Pencil::from_operator(&q, &t).unwrap();
        assert_eq!(p.self_adjoint_t().unwrap(), t);
    }

    #[test]
    fn eigendata_examples() {
        let f = f7();
        let p = diag_pencil(&f, &[1, 2, 4]);
        let ed = p.eigendata().unwrap();
        assert_eq!(ed.spaces.iter().map(|s| s.dim()).collect::<Vec<_>>(), vec![1, 1, 1]);
        let g = Polynomial::from_roots(&f, &[(Fe(1), 2), (Fe(2), 1)]);
        let (q, t, _) = trace_form_fixture(&g, Fe(1)).unwrap();
        let ed = eigendata(&t, &g).unwrap();
        assert_eq!(ed.spaces.iter().map(|s| s.dim()).collect::<Vec<_>>(), vec![2, 1]);
        ed.verify_orthogonal(&q).unwrap();
        assert!(ed.is_regular());
        let irreducible = Polynomial::from_ints(&f, &[1, 0, 1]);
        assert_eq!(eigendata(&Matrix::companion(&irreducible), &irreducible).unwrap_err(), Error::NeedsExtension);
    }

    #[test]
    fn descent_examples() {
        let f = f7();
        let g = Polynomial::from_roots(&f, &[(Fe(1), 2), (Fe(2), 1)]);
        let (q, t, _) = trace_form_fixture(&g, Fe(1)).unwrap();
        let ed = eigendata(&t, &g).unwrap();
        let d = restrict_and_descend(&q, &t, ed.eigenvector(0)).unwrap();
        assert_eq!(d.t.charpoly().unwrap(), Polynomial::from_ints(&f, &[-2, 1]));
        assert!(d.q.is_nondegenerate());

        let quartic = Polynomial::from_roots(&f, &[(Fe(1), 4)]);
        let (q, t, _) = trace_form_fixture(&quartic, Fe(1)).unwrap();
        let ed = eigendata(&t, &quartic).unwrap();
        let d = restrict_and_descend(&q, &t, ed.eigenvector(0)).unwrap();
        assert_eq!(d.t.charpoly().unwrap(), Polynomial::from_roots(&f, &[(Fe(1), 2)]));
        assert!(d.q.gram().mul(&d.t).unwrap().is_symmetric());

        let not_eig = vec![Fe(1), Fe(0), Fe(0), Fe(0)];
        assert_eq!(restrict_and_descend(&q, &t, &not_eig).unwrap_err(), Error::BadReductionVector);
    }

    #[test]
    fn maximal_isotropic_of_split_form() {
        let f = f7();
        let g = Polynomial::from_roots(&f, &[(Fe(1), 1), (Fe(2), 1), (Fe(3), 1), (Fe(4), 1)]);
        let (q, _, _) = trace_form_fixture(&g, Fe(1)).unwrap();
        let y = q.maximal_isotropic();
        assert_eq!(y.dim(), 2);
        assert!(y.is_isotropic(q.gram()));
    }
}
