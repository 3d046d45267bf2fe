//! The finite stabilizer group Stab(T) inside PO or PSO, realized as
//! ±1-combinations of the spectral idempotents of T.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{Fe, Field};
use crate::linalg::{Matrix, Polynomial, Subspace};
use crate::quadrics::{EigenData, QuadraticForm};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Flavor {
    PO,
    PSO,
}

#[derive(Clone, Debug)]
pub struct StabElement {
    /// Root indices, the representative of {I, complement} avoiding the last root.
    pub index_set: BTreeSet<usize>,
    /// 1 - 2 e_I with the projective sign normalized.
    pub mat: Matrix,
    /// det(1 - 2 e_I) = 1 on the lifted matrix.
    pub parity_ok: bool,
}

#[derive(Clone, Debug)]
pub struct StabGroup {
    pub elements: Vec<StabElement>,
    pub flavor: Flavor,
    /// Whether 1 - 2 sum h_i(T)/h_i(alpha_i), taken literally, reproduces every element.
    pub literal_formula_ok: bool,
}

/// Picks M or -M so that the first nonzero entry is its own canonical sign.
pub fn projective_canonical(m: &Matrix) -> Matrix {
    let f = m.field();
    match m.data().iter().find(|x| x.0 != 0) {
        Some(&x) if f.canonical_sign(x) != x => m.neg(),
        _ => m.clone(),
    }
}

/// Projector onto U_i along the other generalized eigenspaces.
pub fn spectral_idempotents(ed: &EigenData) -> Result<Vec<Matrix>> {
    let f = ed.spaces[0].field().clone();
    let n = ed.spaces[0].ambient_dim();
    let cols: Vec<_> = ed.spaces.iter().flat_map(|u| u.basis().to_vec()).collect();
    if cols.len() != n {
        return Err(Error::NeedsExtension);
    }
    let p = Matrix::from_cols(&f, &cols)?;
    let pinv = p.inverse()?;
    let mut out = vec![];
    let mut start = 0;
    for u in &ed.spaces {
        let d: Vec<Fe> = (0..n).map(|k| if k >= start && k < start + u.dim() { Fe(1) } else { Fe(0) }).collect();
        out.push(p.mul(&Matrix::diag(&f, &d))?.mul(&pinv)?);
        start += u.dim();
    }
    Ok(out)
}

/// h_i(T)/h_i(alpha_i) with h_i = f/(x - alpha_i)^{m_i}, as printed in the stabilizer remarks.
pub fn literal_h_term(t: &Matrix, ed: &EigenData, i: usize) -> Result<Matrix> {
    let f = t.field();
    let mut h = Polynomial::one(f);
    for (j, &(a, m)) in ed.roots.iter().enumerate() {
        if j != i {
            h = h.mul(&Polynomial::linear(f, a).pow(m));
        }
    }
    let c = f.inv(h.eval(ed.roots[i].0))?;
    Ok(t.eval_poly(&h).scale(c))
}

fn element_matrix(f: &Field, parts: &[Matrix], set: &BTreeSet<usize>, n: usize) -> Matrix {
    let mut m = Matrix::identity(f, n);
    let two = f.from_int(2);
    for &i in set {
        m = m.sub(&parts[i].scale(two)).expect("square");
    }
    m
}

pub fn build_stab(t: &Matrix, ed: &EigenData, q: &QuadraticForm, flavor: Flavor) -> Result<StabGroup> {
    let f = t.field().clone();
    let n = t.rows();
    let k = ed.r_plus_1();
    if k == 0 || k > 20 {
        return Err(Error::InvalidInput("unsupported number of roots".into()));
    }
    let idem = spectral_idempotents(ed)?;
    let literal: Vec<Matrix> = (0..k).map(|i| literal_h_term(t, ed, i)).collect::<Result<_>>()?;
    let g = q.gram();
    let mut elements = vec![];
    let mut literal_ok = true;
    for bits in 0u32..(1 << (k - 1)) {
        let set: BTreeSet<usize> = (0..k - 1).filter(|i| bits >> i & 1 == 1).collect();
        let lifted = element_matrix(&f, &idem, &set, n);
        if element_matrix(&f, &literal, &set, n) != lifted {
            literal_ok = false;
        }
        if lifted.transpose().mul(g)?.mul(&lifted)? != *g {
            return Err(Error::InvalidInput("stabilizer element is not orthogonal".into()));
        }
        if lifted.mul(t)? != t.mul(&lifted)? {
            return Err(Error::InvalidInput("stabilizer element does not commute with T".into()));
        }
        let parity_ok = lifted.det()? == f.one();
        if flavor == Flavor::PSO && !parity_ok {
            continue;
        }
        elements.push(StabElement { index_set: set, mat: projective_canonical(&lifted), parity_ok });
    }
    Ok(StabGroup { elements, flavor, literal_formula_ok: literal_ok })
}

impl StabGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> &StabElement {
        &self.elements[0]
    }

    /// Index of the element whose matrix equals m up to sign.
    pub fn find(&self, m: &Matrix) -> Option<usize> {
        let c = projective_canonical(m);
        self.elements.iter().position(|e| e.mat == c)
    }

    /// elem(I) elem(J) = elem(I xor J) projectively, and every element squares to 1.
    pub fn check_product_rule(&self) -> Result<bool> {
        let by_set: BTreeMap<&BTreeSet<usize>, &Matrix> = self.elements.iter().map(|e| (&e.index_set, &e.mat)).collect();
        let id = projective_canonical(&Matrix::identity(self.elements[0].mat.field(), self.elements[0].mat.rows()));
        for a in &self.elements {
            if projective_canonical(&a.mat.mul(&a.mat)?) != id {
                return Ok(false);
            }
            for b in &self.elements {
                let sd: BTreeSet<usize> = a.index_set.symmetric_difference(&b.index_set).copied().collect();
                let Some(m) = by_set.get(&sd) else { return Ok(false) };
                if projective_canonical(&a.mat.mul(&b.mat)?) != **m {
                    return Ok(false);
                }
                if a.mat.mul(&b.mat)? != b.mat.mul(&a.mat)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

pub fn act(g: &StabElement, x: &Subspace) -> Subspace {
    x.image(&g.mat)
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitInfo {
    pub size: usize,
    pub stabilizer_order: usize,
    pub expected_stabilizer: Option<usize>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitReport {
    pub orbits: Vec<OrbitInfo>,
    /// Stabilizer order keyed by position of X in the sorted input.
    pub stabilizer_orders: BTreeMap<usize, usize>,
    pub pass: bool,
}

impl OrbitReport {
    pub fn simply_transitive(&self) -> bool {
        self.orbits.len() == 1 && self.orbits[0].stabilizer_order == 1
    }
}

/// Orbits of G on S with stabilizer orders, compared against `expected(X)`.
pub fn orbit_report<F>(g: &StabGroup, s: &BTreeSet<Subspace>, expected: F) -> Result<OrbitReport>
where
    F: Fn(&Subspace) -> Option<usize>,
{
    let items: Vec<&Subspace> = s.iter().collect();
    let index: BTreeMap<&Subspace, usize> = items.iter().enumerate().map(|(i, x)| (*x, i)).collect();
    let mut table: Vec<Vec<usize>> = vec![];
    for x in &items {
        let mut row = vec![];
        for e in &g.elements {
            let y = act(e, x);
            row.push(*index.get(&y).ok_or(Error::ActionNotClosed)?);
        }
        table.push(row);
    }
    let mut seen = vec![false; items.len()];
    let mut orbits = vec![];
    let stabilizer_orders: BTreeMap<usize, usize> =
        table.iter().enumerate().map(|(j, row)| (j, row.iter().filter(|&&y| y == j).count())).collect();
    for i in 0..items.len() {
        if seen[i] {
            continue;
        }
        let orbit: BTreeSet<usize> = table[i].iter().copied().collect();
        let mut stab = None;
        let mut pass = true;
        let mut exp_first = None;
        for &j in &orbit {
            seen[j] = true;
            let so = stabilizer_orders[&j];
            if *stab.get_or_insert(so) != so {
                pass = false;
            }
            let e = expected(items[j]);
            if exp_first.is_none() {
                exp_first = e;
            }
            if let Some(e) = e {
                if e != so {
                    pass = false;
                }
            }
        }
        orbits.push(OrbitInfo { size: orbit.len(), stabilizer_order: stab.unwrap_or(0), expected_stabilizer: exp_first, pass });
    }
    let pass = orbits.iter().all(|o| o.pass);
    Ok(OrbitReport { orbits, stabilizer_orders, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fano::{enumerate_common_isotropic, partition_by_profile};
    use crate::quadrics::{trace_form_fixture, Pencil};

    fn diag_pencil(f: &Field, c: &[i64]) -> Pencil {
        let d: Vec<Fe> = c.iter().map(|&x| f.from_int(x)).collect();
        Pencil::new(Matrix::identity(f, c.len()), Matrix::diag(f, &d)).unwrap()
    }

    #[test]
    fn n3_diag_elements() {
        let f = Field::prime(7).unwrap();
        let p = diag_pencil(&f, &[1, 2, 4]);
        let t = p.self_adjoint_t().unwrap();
        let ed = p.eigendata().unwrap();
        let g = build_stab(&t, &ed, &p.q1(), Flavor::PO).unwrap();
        assert_eq!(g.order(), 4);
        assert!(g.literal_formula_ok);
        assert!(g.check_product_rule().unwrap());
        let id = projective_canonical(&Matrix::identity(&f, 3));
        assert_eq!(g.identity().mat, id);
        // roots are sorted by code: 1, 2, 4
        let e1 = g.elements.iter().find(|e| e.index_set == BTreeSet::from([0])).unwrap();
        let d = Matrix::diag(&f, &[f.from_int(-1), Fe(1), Fe(1)]);
        assert_eq!(e1.mat, projective_canonical(&d));
        let x = Subspace::line(&f, &[Fe(3), Fe(2), Fe(1)]);
        assert_eq!(act(e1, &x), Subspace::line(&f, &[Fe(4), Fe(2), Fe(1)]));
        let full = element_matrix(&f, &spectral_idempotents(&ed).unwrap(), &BTreeSet::from([0, 1, 2]), 3);
        assert_eq!(full, Matrix::identity(&f, 3).neg());

        let s = enumerate_common_isotropic(&p, 1);
        let rep = orbit_report(&g, &s, |_| Some(1)).unwrap();
        assert!(rep.simply_transitive() && rep.pass);
        assert!(orbit_report(&g, &BTreeSet::new(), |_| None).unwrap().orbits.is_empty());
    }

    #[test]
    fn regular_2111_stabilizers() {
        let f = Field::prime(7).unwrap();
        let g0 = Polynomial::from_roots(&f, &[(Fe(1), 2), (Fe(2), 1), (Fe(3), 1), (Fe(4), 1)]);
        let (q, t, _) = trace_form_fixture(&g0, Fe(1)).unwrap();
        let p = Pencil::from_operator(&q, &t).unwrap();
        let ed = p.eigendata().unwrap();
        let g = build_stab(&t, &ed, &q, Flavor::PO).unwrap();
        assert_eq!(g.order(), 8);
        assert!(!g.literal_formula_ok);
        assert!(g.check_product_rule().unwrap());
        let classes = partition_by_profile(&p).unwrap();
        for (key, pts) in &classes {
            assert_eq!(pts.len() as u64, crate::fano::expected_class_size(ed.r(), key));
            let s: BTreeSet<Subspace> = pts.iter().map(|x| x.x.clone()).collect();
            let rep = orbit_report(&g, &s, |_| Some(1 << key.a)).unwrap();
            assert!(rep.pass && rep.orbits.len() == 1, "{key:?}");
        }
        // trivial on U_j for j outside I
        let idem = spectral_idempotents(&ed).unwrap();
        for e in &g.elements {
            let m = element_matrix(&f, &idem, &e.index_set, 5);
            for (j, u) in ed.spaces.iter().enumerate() {
                if !e.index_set.contains(&j) {
                    assert!(u.basis().iter().all(|v| m.apply(v) == *v));
                }
            }
        }
    }
}
