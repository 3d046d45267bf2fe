//! Maximal common isotropic subspaces of a pencil: pruned enumeration, the
//! Elkies construction, and classification by T-stable dimension profiles.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{extend_for_sqrts, Fe, Field};
use crate::linalg::{dot, Matrix, Subspace, Vector};
use crate::quadrics::{ClassTag, EigenData, Pencil};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ProfileKey {
    pub dims: Vec<usize>,
    pub a: usize,
}

impl ProfileKey {
    pub fn new(dims: Vec<usize>, mults: &[usize]) -> ProfileKey {
        let a = dims.iter().zip(mults).filter(|(&d, &m)| 2 * d == m).count();
        ProfileKey { dims, a }
    }

    pub fn total(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn label(&self) -> String {
        format!("({})", self.dims.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(","))
    }
}

#[derive(Clone, Debug)]
pub struct FanoPoint {
    pub x: Subspace,
    pub profile: ProfileKey,
    /// Span{X, TX}, even case only.
    pub span_xtx: Option<Subspace>,
}

/// Projective solutions c (first nonzero entry 1) of c^T A c = c^T B c = 0.
pub fn common_zeros(field: &Field, a: &Matrix, b: &Matrix) -> Vec<Vector> {
    let d = a.rows();
    let mut out = vec![];
    if d == 0 {
        return out;
    }
    let two = field.from_int(2);
    let four = field.from_int(4);
    let q = field.q() as u64;
    for lead in 0..d {
        let mut c = vec![Fe(0); d];
        c[lead] = Fe(1);
        if lead == d - 1 {
            if a.get(lead, lead).0 == 0 && b.get(lead, lead).0 == 0 {
                out.push(c);
            }
            continue;
        }
        let last = d - 1;
        let middle = last - lead - 1;
        let total = q.pow(middle as u32);
        let aa = a.get(last, last);
        for mut code in 0..total {
            for j in lead + 1..last {
                c[j] = Fe((code % q) as u32);
                code /= q;
            }
            c[last] = Fe(0);
            let c0 = a.bilinear(&c, &c);
            let lin = (0..last).fold(Fe(0), |acc, j| field.add(acc, field.mul(a.get(last, j), c[j])));
            let bb = field.mul(two, lin);
            let mut cands: Vec<Fe> = vec![];
            if aa.0 != 0 {
                let disc = field.sub(field.mul(bb, bb), field.mul(four, field.mul(aa, c0)));
                if let Some(s) = field.sqrt(disc) {
                    let inv = field.inv(field.mul(two, aa)).expect("nonzero");
                    let nb = field.neg(bb);
                    cands.push(field.mul(field.add(nb, s), inv));
                    if s.0 != 0 {
                        cands.push(field.mul(field.sub(nb, s), inv));
                    }
                }
            } else if bb.0 != 0 {
                cands.push(field.neg(field.div(c0, bb).expect("nonzero")));
            } else if c0.0 == 0 {
                cands.extend(field.elements());
            }
            for t in cands {
                c[last] = t;
                if b.bilinear(&c, &c).0 == 0 {
                    out.push(c.clone());
                }
            }
        }
    }
    out
}

/// Gram matrix of the restriction of `g` to the span of `basis`.
pub fn restrict_gram(g: &Matrix, basis: &[Vector]) -> Matrix {
    let f = g.field();
    let m = basis.len();
    let mut r = Matrix::zeros(f, m, m);
    for i in 0..m {
        let gi = g.apply(&basis[i]);
        for j in 0..m {
            r.set(j, i, dot(f, &basis[j], &gi));
        }
    }
    r
}

fn combine(field: &Field, coeffs: &[Fe], basis: &[Vector]) -> Vector {
    let n = basis.first().map_or(0, |b| b.len());
    (0..n)
        .map(|k| coeffs.iter().zip(basis).fold(Fe(0), |acc, (&c, b)| field.add(acc, field.mul(c, b[k]))))
        .collect()
}

/// Common isotropic subspaces one dimension larger than X containing X.
pub fn isotropic_extensions(p: &Pencil, x: &Subspace) -> Vec<Subspace> {
    let f = p.field();
    let k = if x.dim() == 0 {
        Subspace::full(f, p.n())
    } else {
        x.perp(p.a1()).intersect(&x.perp(p.a2()))
    };
    let comp = x.complement_in(&k);
    let ga = restrict_gram(p.a1(), &comp);
    let gb = restrict_gram(p.a2(), &comp);
    common_zeros(f, &ga, &gb)
        .into_iter()
        .map(|c| x.with_vector(&combine(f, &c, &comp)))
        .collect()
}

/// All dim-dimensional subspaces isotropic for both forms, by extending
/// isotropic flags one vector at a time.
pub fn enumerate_common_isotropic(p: &Pencil, dim: usize) -> BTreeSet<Subspace> {
    let mut level: BTreeSet<Subspace> = BTreeSet::new();
    level.insert(Subspace::zero(p.field(), p.n()));
    for _ in 0..dim {
        let cur: Vec<Subspace> = level.into_iter().collect();
        let parts: Vec<Vec<Subspace>> = cur.par_iter().map(|x| isotropic_extensions(p, x)).collect();
        level = parts.into_iter().flatten().collect();
    }
    level
}

/// Elkies' construction for Q1 = sum x_i^2, Q2 = sum c_i x_i^2 with N = 2n+1.
/// Returns the working field (extended for square roots if needed) and the set.
pub fn elkies_enumerate(c: &[Fe], field: &Field) -> Result<(Field, BTreeSet<Subspace>)> {
    let n_total = c.len();
    if n_total % 2 == 0 || n_total < 3 {
        return Err(Error::InvalidInput("Elkies construction needs N = 2n+1 >= 3".into()));
    }
    let distinct: BTreeSet<Fe> = c.iter().copied().collect();
    if distinct.len() != n_total {
        return Err(Error::NotGeneric("repeated diagonal entries".into()));
    }
    let n = (n_total - 1) / 2;
    let rows: Vec<Vector> = (0..2 * n).map(|k| c.iter().map(|&ci| field.pow(ci, k as u64)).collect()).collect();
    let ker = Matrix::from_rows(field, &rows)?.kernel();
    if ker.dim() != 1 {
        return Err(Error::NotGeneric("Vandermonde system kernel is not a line".into()));
    }
    let dvec = ker.basis()[0].clone();
    if dvec.iter().any(|d| d.0 == 0) {
        return Err(Error::NotGeneric("zero entry in Elkies kernel".into()));
    }
    let (big, emb) = extend_for_sqrts(field, &dvec)?;
    let roots: Vec<Fe> = dvec.iter().map(|&d| big.sqrt(emb.map(d)).expect("square after extension")).collect();
    let cb: Vec<Fe> = c.iter().map(|&x| emb.map(x)).collect();
    let mut out = BTreeSet::new();
    for signs in 0u32..(1 << n_total) {
        let d: Vec<Fe> = roots
            .iter()
            .enumerate()
            .map(|(i, &r)| if signs >> i & 1 == 1 { big.neg(r) } else { r })
            .collect();
        let basis: Vec<Vector> = (0..n)
            .map(|k| (0..n_total).map(|i| big.mul(d[i], big.pow(cb[i], k as u64))).collect())
            .collect();
        out.insert(Subspace::from_spanning(&big, n_total, &basis));
    }
    Ok((big, out))
}

/// Largest T-stable subspace of W.
pub fn max_t_stable(t: &Matrix, w: &Subspace) -> Subspace {
    let mut cur = w.clone();
    loop {
        let next = cur.intersect(&cur.preimage(t));
        if next.dim() == cur.dim() {
            return next;
        }
        cur = next;
    }
}

pub fn t_stable_dim(t: &Matrix, w: &Subspace) -> usize {
    max_t_stable(t, w).dim()
}

pub fn profile(t: &Matrix, ed: &EigenData, x: &Subspace) -> ProfileKey {
    let dims = ed.spaces.iter().map(|u| t_stable_dim(t, &x.intersect(u))).collect();
    ProfileKey::new(dims, &ed.mults())
}

/// Span{X, TX}
pub fn span_xtx(t: &Matrix, x: &Subspace) -> Subspace {
    x.sum(&x.image(t))
}

/// Expected class size 2^r / 2^a.
pub fn expected_class_size(r: usize, key: &ProfileKey) -> u64 {
    1u64 << (r - key.a.min(r))
}

pub type ProfileClasses = BTreeMap<ProfileKey, Vec<FanoPoint>>;

/// Odd case: the n-dimensional common isotropic subspaces grouped by profile.
pub fn partition_by_profile(p: &Pencil) -> Result<ProfileClasses> {
    if p.n() % 2 == 0 {
        return Err(Error::InvalidInput("profile partition is for odd N".into()));
    }
    let class = p.classify()?;
    if class.tag == ClassTag::NonRegular {
        return Err(Error::NotRegular);
    }
    let t = p.self_adjoint_t()?;
    let ed = p.eigendata()?;
    let n = (p.n() - 1) / 2;
    let all: Vec<Subspace> = enumerate_common_isotropic(p, n).into_iter().collect();
    let points: Vec<FanoPoint> = all
        .into_par_iter()
        .map(|x| {
            let profile = profile(&t, &ed, &x);
            FanoPoint { x, profile, span_xtx: None }
        })
        .collect();
    let mut out = ProfileClasses::new();
    for pt in points {
        out.entry(pt.profile.clone()).or_default().push(pt);
    }
    Ok(out)
}

/// Isotropic eigenvectors of T: the singular points of the base locus.
pub fn singular_points(p: &Pencil, ed: &EigenData) -> Vec<Vector> {
    let q = p.q1();
    ed.eigenspaces
        .iter()
        .flat_map(|e| e.basis().to_vec())
        .filter(|v| q.q(v).0 == 0)
        .collect()
}

/// Singular points of B for any pencil: common isotropic vectors in the kernel
/// of a singular rational member.
pub fn base_singular_points(p: &Pencil) -> Vec<Vector> {
    let f = p.field();
    let mut out = vec![];
    for l in p.parameters() {
        let m = p.member(l);
        if m.det().map_or(true, |d| d.0 != 0) {
            continue;
        }
        let k = m.kernel();
        let basis = k.basis().to_vec();
        let ga = restrict_gram(p.a1(), &basis);
        let gb = restrict_gram(p.a2(), &basis);
        out.extend(common_zeros(f, &ga, &gb).into_iter().map(|c| combine(f, &c, &basis)));
    }
    out
}

/// F for any pencil with N = 2n+2: the n-dimensional common isotropic subspaces
/// containing no singular point of B.
pub fn fano_set(p: &Pencil) -> BTreeSet<Subspace> {
    let n = p.n() / 2 - 1;
    let sing = base_singular_points(p);
    enumerate_common_isotropic(p, n).into_iter().filter(|x| sing.iter().all(|v| !x.contains(v))).collect()
}

/// p_g = (number of odd-multiplicity roots)/2 - 1.
pub fn geometric_genus(ed: &EigenData) -> i64 {
    ed.roots.iter().filter(|r| r.1 % 2 == 1).count() as i64 / 2 - 1
}

#[derive(Clone, Debug)]
pub struct EvenFanoSets {
    pub f0: BTreeSet<Subspace>,
    pub f: BTreeSet<Subspace>,
    /// F' as a set: inversion is the identity on underlying subspaces.
    pub fprime_model: BTreeSet<Subspace>,
    /// F computed through "X not inside v^perp for every singular v".
    pub f_by_perp: BTreeSet<Subspace>,
    /// F computed through "no singular v in X".
    pub f_by_points: BTreeSet<Subspace>,
}

/// F0 and F for an even regular pencil, with both characterizations of F by singular points.
pub fn even_fano_sets(p: &Pencil) -> Result<EvenFanoSets> {
    if p.n() % 2 == 1 || p.n() < 4 {
        return Err(Error::InvalidInput("even Fano sets need N = 2n+2 >= 4".into()));
    }
    let ed = p.eigendata()?;
    if !ed.is_regular() {
        return Err(Error::NotRegular);
    }
    if geometric_genus(&ed) < 0 {
        return Err(Error::ReducibleCurve);
    }
    even_fano_sets_any_genus(p)
}

/// Like [`even_fano_sets`] but returns the sets also when p_g = -1.
pub fn even_fano_sets_any_genus(p: &Pencil) -> Result<EvenFanoSets> {
    let t = p.self_adjoint_t()?;
    let ed = p.eigendata()?;
    let n = p.n() / 2 - 1;
    let f0 = enumerate_common_isotropic(p, n);
    let f: BTreeSet<Subspace> = f0.iter().filter(|x| t_stable_dim(&t, &span_xtx(&t, x)) == 0).cloned().collect();
    let sing = singular_points(p, &ed);
    let f_by_perp = f0
        .iter()
        .filter(|x| sing.iter().all(|v| !Subspace::line(p.field(), v).perp(p.a1()).contains_space(x)))
        .cloned()
        .collect();
    let f_by_points = f0.iter().filter(|x| sing.iter().all(|v| !x.contains(v))).cloned().collect();
    Ok(EvenFanoSets { f0, fprime_model: f.clone(), f, f_by_perp, f_by_points })
}

/// The (n+1)-dimensional common isotropic subspace of an even pencil, found
/// by descending along isotropic eigenvectors. Present exactly when every
/// root multiplicity is even.
pub fn contains_pn(p: &Pencil) -> Result<Option<Subspace>> {
    let t = p.self_adjoint_t()?;
    let q = p.q1();
    pn_rec(&q, &t)
}

fn pn_rec(q: &crate::quadrics::QuadraticForm, t: &Matrix) -> Result<Option<Subspace>> {
    let f = q.field();
    let n = q.dim();
    if n == 0 {
        return Ok(Some(Subspace::zero(f, 0)));
    }
    let cp = t.charpoly()?;
    let ed = crate::quadrics::eigendata(t, &cp)?;
    // W is T-stable, so it contains an eigenvector with repeated eigenvalue
    let Some(i) = ed.roots.iter().position(|r| r.1 >= 2) else {
        return Ok(None);
    };
    let v = ed.eigenvector(i).clone();
    if q.q(&v).0 != 0 {
        return Ok(None);
    }
    let d = crate::quadrics::restrict_and_descend(q, t, &v)?;
    Ok(pn_rec(&d.q, &d.t)?.map(|wb| d.lift_subspace(&wb)))
}

#[derive(Clone, Debug, Default)]
pub struct EvenProfileSets {
    /// Span{X,TX} in the ruling of the reference Y0, sum of d_i < n+1.
    pub classes: ProfileClasses,
    /// Both rulings.
    pub starred: ProfileClasses,
    /// Counts with sum of d_i = n+1 (Span{X,TX} T-stable), kept out of the classes.
    pub excluded: BTreeMap<ProfileKey, usize>,
}

/// Parity of codim(Y1 cap Y2) in Y1.
pub fn ruling_parity(y1: &Subspace, y2: &Subspace) -> u8 {
    ((y1.dim() - y1.intersect(y2).dim()) % 2) as u8
}

/// The L' sets: X with Span{X,TX} isotropic of dimension n+1, grouped by the
/// profile of Span{X,TX}.
pub fn even_profile_sets(p: &Pencil, y0: &Subspace) -> Result<EvenProfileSets> {
    let n_total = p.n();
    if n_total % 2 == 1 {
        return Err(Error::InvalidInput("even profile sets need even N".into()));
    }
    let t = p.self_adjoint_t()?;
    let ed = p.eigendata()?;
    if !ed.is_regular() {
        return Err(Error::NotRegular);
    }
    let n = n_total / 2 - 1;
    let mut out = EvenProfileSets::default();
    for x in enumerate_common_isotropic(p, n) {
        let s = span_xtx(&t, &x);
        if s.dim() != n + 1 || !s.is_isotropic(p.a1()) {
            continue;
        }
        let key = profile(&t, &ed, &s);
        if key.total() == n + 1 {
            *out.excluded.entry(key).or_default() += 1;
            continue;
        }
        let pt = FanoPoint { x, profile: key.clone(), span_xtx: Some(s.clone()) };
        if ruling_parity(&s, y0) == 0 {
            out.classes.entry(key.clone()).or_default().push(pt.clone());
        }
        out.starred.entry(key).or_default().push(pt);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{grassmannian_iter, Polynomial};
    use crate::quadrics::trace_form_fixture;

    fn diag(f: &Field, c: &[i64]) -> Pencil {
        let d: Vec<Fe> = c.iter().map(|&x| f.from_int(x)).collect();
        Pencil::new(Matrix::identity(f, c.len()), Matrix::diag(f, &d)).unwrap()
    }

    /// Brute-force oracle: filter the whole Grassmannian.
    fn grassmannian_filter(p: &Pencil, d: usize) -> BTreeSet<Subspace> {
        grassmannian_iter(p.field(), p.n(), d)
            .filter(|x| x.is_isotropic(p.a1()) && x.is_isotropic(p.a2()))
            .collect()
    }

    #[test]
    fn odd_n3_example() {
        let f = Field::prime(7).unwrap();
        let p = diag(&f, &[1, 2, 4]);
        let set = enumerate_common_isotropic(&p, 1);
        assert_eq!(set.len(), 4);
        assert!(set.contains(&Subspace::line(&f, &[Fe(3), Fe(2), Fe(1)])));
        assert_eq!(set, grassmannian_filter(&p, 1));
        assert_eq!(enumerate_common_isotropic(&p, 0).len(), 1);
    }

    #[test]
    fn elkies_example() {
        let f = Field::prime(7).unwrap();
        let c = [Fe(1), Fe(2), Fe(4)];
        let (big, set) = elkies_enumerate(&c, &f).unwrap();
        assert_eq!(big, f);
        assert_eq!(set, enumerate_common_isotropic(&diag(&f, &[1, 2, 4]), 1));
        assert_eq!(elkies_enumerate(&[Fe(1), Fe(1), Fe(2)], &f).unwrap_err(), Error::NotGeneric("repeated diagonal entries".into()));
    }

    #[test]
    fn flag_extension_matches_grassmannian_n4() {
        let f = Field::prime(5).unwrap();
        let g = Polynomial::from_roots(&f, &[(Fe(1), 1), (Fe(2), 1), (Fe(3), 1), (Fe(4), 1)]);
        let (q, t, _) = trace_form_fixture(&g, Fe(1)).unwrap();
        let p = Pencil::from_operator(&q, &t).unwrap();
        assert_eq!(enumerate_common_isotropic(&p, 1), grassmannian_filter(&p, 1));
        assert_eq!(enumerate_common_isotropic(&p, 2), grassmannian_filter(&p, 2));
    }

    #[test]
    fn t_stable_examples() {
        let f = Field::prime(7).unwrap();
        let g = Polynomial::from_roots(&f, &[(Fe(1), 2), (Fe(2), 1)]);
        let t = Matrix::companion(&g);
        let ed = crate::quadrics::eigendata(&t, &g).unwrap();
        let v = Subspace::line(&f, ed.eigenvector(0));
        assert_eq!(t_stable_dim(&t, &v), 1);
        let d = Matrix::diag(&f, &[Fe(1), Fe(2), Fe(4)]);
        assert_eq!(t_stable_dim(&d, &Subspace::line(&f, &[Fe(1), Fe(1), Fe(0)])), 0);
    }

    #[test]
    fn contains_pn_small() {
        let f = Field::prime(7).unwrap();
        let g = Polynomial::from_roots(&f, &[(Fe(1), 2), (Fe(2), 2)]);
        let (q, t, _) = trace_form_fixture(&g, Fe(1)).unwrap();
        let p = Pencil::from_operator(&q, &t).unwrap();
        let w = contains_pn(&p).unwrap().expect("all multiplicities even");
        assert_eq!(enumerate_common_isotropic(&p, 2).into_iter().collect::<Vec<_>>(), vec![w.clone()]);
        assert_eq!(t_stable_dim(&t, &w), 2);

        let g = Polynomial::from_roots(&f, &[(Fe(1), 2), (Fe(2), 1), (Fe(3), 1)]);
        let (q, t, _) = trace_form_fixture(&g, Fe(1)).unwrap();
        let p = Pencil::from_operator(&q, &t).unwrap();
        assert!(contains_pn(&p).unwrap().is_none());
        assert!(enumerate_common_isotropic(&p, 2).is_empty());
    }
}
