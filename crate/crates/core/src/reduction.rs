//! Reduction along isotropic eigenvectors: d- and f-reduction for odd pencils,
//! delta_v with its G_a / G_m fibers for even ones, and the N=4 terminal solvers.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fano::{enumerate_common_isotropic, fano_set, geometric_genus, profile, restrict_gram, span_xtx, t_stable_dim, ProfileKey};
use crate::gf::{extend_for_sqrts, Fe, Field};
use crate::linalg::{projective_points, vec_axpy, vec_scale, Matrix, Subspace, Vector};
use crate::quadrics::{restrict_and_descend, Descent, EigenData, Pencil, QuadraticForm};
use crate::stab::{build_stab, orbit_report, Flavor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StepKind {
    DReduction,
    FReduction,
}

#[derive(Clone, Debug)]
pub struct ReductionStep {
    pub v: Vector,
    pub alpha: Fe,
    pub kind: StepKind,
    pub descent: Descent,
}

impl ReductionStep {
    /// charpoly(after) * (x - alpha)^2 = charpoly(before)
    pub fn check_charpoly(&self, t_before: &Matrix) -> Result<bool> {
        let f = t_before.field();
        let lin = crate::linalg::Polynomial::linear(f, self.alpha);
        Ok(self.descent.t.charpoly()?.mul(&lin.pow(2)) == t_before.charpoly()?)
    }
}

/// Root index of the eigenvalue of v.
fn root_index(ed: &EigenData, alpha: Fe) -> Option<usize> {
    ed.roots.iter().position(|r| r.0 == alpha)
}

/// d-reduction at root i: requires the eigenvector v_i to lie in X.
pub fn d_reduce(t: &Matrix, q: &QuadraticForm, ed: &EigenData, x: &Subspace, i: usize) -> Result<(ReductionStep, Subspace)> {
    let v = ed.eigenvector(i).clone();
    if !x.contains(&v) {
        return Err(Error::NotReducibleHere(format!("eigenvector of root {i} is not in X")));
    }
    let d = restrict_and_descend(q, t, &v)?;
    let xb = d.project_subspace(x);
    Ok((ReductionStep { v, alpha: ed.roots[i].0, kind: StepKind::DReduction, descent: d }, xb))
}

/// Inverse of d-reduction: the preimage of the projection.
pub fn d_lift(step: &ReductionStep, xb: &Subspace) -> Subspace {
    step.descent.lift_subspace(xb)
}

/// f-reduction: X maps to the image of X cap v^perp.
pub fn f_reduce(d: &Descent, x: &Subspace) -> Subspace {
    d.project_subspace(x)
}

/// All X in the fiber over X-bar built from the w-lift: points w of the conic
/// b_alpha(w,w) = 0 in P(W / (X~ + v)), W the b_alpha-orthogonal of the lifted
/// X~, off the line b(w,v) = 0.
pub fn w_lifts(q: &QuadraticForm, t: &Matrix, d: &Descent, xb: &Subspace) -> Result<Vec<Subspace>> {
    Ok(w_lift_parts(q, t, d, xb)?.0)
}

/// The w-lifts together with the number of conic points on the excluded line.
pub fn w_lift_parts(q: &QuadraticForm, t: &Matrix, d: &Descent, xb: &Subspace) -> Result<(Vec<Subspace>, usize)> {
    let f = q.field().clone();
    let n = q.dim();
    let g = q.gram();
    let galpha = g.mul(&t.shift(d.alpha))?;
    let xt = d.lift_plain(xb);
    let w_space = if xt.dim() == 0 { Subspace::full(&f, n) } else { xt.perp(&galpha) };
    let base = xt.with_vector(&d.v);
    let comp = base.complement_in(&w_space);
    let ga = restrict_gram(&galpha, &comp);
    let half = f.inv(f.from_int(2))?;
    let mut out = vec![];
    let mut on_line = 0;
    for c in projective_points(&f, comp.len()) {
        if ga.bilinear(&c, &c).0 != 0 {
            continue;
        }
        let mut w: Vector = vec![Fe(0); n];
        for (ci, b) in c.iter().zip(&comp) {
            w = vec_axpy(&f, &w, *ci, b);
        }
        let bwv = q.b(&w, &d.v);
        if bwv.0 == 0 {
            on_line += 1;
            continue;
        }
        w = vec_scale(&f, &w, f.inv(bwv)?);
        let bww = q.b(&w, &w);
        w = vec_axpy(&f, &w, f.neg(f.mul(half, bww)), &d.v);
        let mut gens = vec![w.clone()];
        for u in xt.basis() {
            gens.push(vec_axpy(&f, u, f.neg(q.b(&w, u)), &d.v));
        }
        out.push(Subspace::from_spanning(&f, n, &gens));
    }
    Ok((out, on_line))
}

/// The eigenvector of a root of multiplicity >= 2, or None.
pub fn node_vector(ed: &EigenData) -> Option<(usize, Vector)> {
    ed.roots.iter().position(|r| r.1 >= 2).map(|i| (i, ed.eigenvector(i).clone()))
}

#[derive(Clone, Debug, Serialize)]
pub struct DReductionCheck {
    pub root: usize,
    pub from: String,
    pub to: String,
    pub size: usize,
    pub bijective: bool,
    pub inverse_ok: bool,
    /// Stabilizer orders before and after (constant on each class).
    pub stab_before: usize,
    pub stab_after: usize,
    pub stab_rule_ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FReductionCheck {
    pub root: usize,
    pub multiplicity: usize,
    pub class_size: usize,
    pub image_size: usize,
    pub fiber_sizes: BTreeSet<usize>,
    pub surjective: bool,
    pub w_lift_matches: bool,
    pub stab_preserved: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OddReductionReport {
    pub d_checks: Vec<DReductionCheck>,
    pub f_checks: Vec<FReductionCheck>,
    pub pass: bool,
}

type Classes = BTreeMap<ProfileKey, BTreeSet<Subspace>>;

/// Profile classes of all n-dim common isotropic subspaces with stabilizer orders.
fn odd_classes(q: &QuadraticForm, t: &Matrix) -> Result<(EigenData, Classes, BTreeMap<Subspace, usize>)> {
    let p = Pencil::from_operator(q, t)?;
    let ed = p.eigendata()?;
    let n = (p.n() - 1) / 2;
    let all = enumerate_common_isotropic(&p, n);
    let mut classes: BTreeMap<ProfileKey, BTreeSet<Subspace>> = BTreeMap::new();
    for x in all {
        classes.entry(profile(t, &ed, &x)).or_default().insert(x);
    }
    let g = build_stab(t, &ed, q, Flavor::PO)?;
    let mut stabs = BTreeMap::new();
    for s in classes.values() {
        let rep = orbit_report(&g, s, |_| None)?;
        for (j, x) in s.iter().enumerate() {
            stabs.insert(x.clone(), rep.stabilizer_orders[&j]);
        }
    }
    Ok((ed, classes, stabs))
}

fn const_value(m: &BTreeMap<Subspace, usize>, s: &BTreeSet<Subspace>) -> Option<usize> {
    let vals: BTreeSet<usize> = s.iter().filter_map(|x| m.get(x).copied()).collect();
    (vals.len() == 1).then(|| *vals.iter().next().unwrap())
}

/// Exhaustive check of d- and f-reduction on an odd regular pencil.
pub fn odd_reduction_report(p: &Pencil) -> Result<OddReductionReport> {
    if p.n() % 2 == 0 {
        return Err(Error::InvalidInput("odd reduction needs odd N".into()));
    }
    let q = p.q1();
    let t = p.self_adjoint_t()?;
    let (ed, classes, stabs) = odd_classes(&q, &t)?;
    let mults = ed.mults();
    let mut d_checks = vec![];
    let mut f_checks = vec![];
    for (i, &(_, m)) in ed.roots.iter().enumerate() {
        if m < 2 {
            continue;
        }
        let v = ed.eigenvector(i).clone();
        let d = restrict_and_descend(&q, &t, &v)?;
        let (_, bclasses, bstabs) = odd_classes(&d.q, &d.t)?;
        // profiles of the reduced operator: root i loses 2 from its multiplicity
        let reduce_key = |k: &ProfileKey, drop: usize| -> ProfileKey {
            let mut dims = k.dims.clone();
            let mut ms = mults.clone();
            dims[i] -= drop;
            ms[i] -= 2;
            if ms[i] == 0 {
                dims.remove(i);
                ms.remove(i);
            }
            ProfileKey::new(dims, &ms)
        };
        for (key, s) in &classes {
            if key.dims[i] == 0 {
                continue;
            }
            let target_key = reduce_key(key, 1);
            let target = bclasses.get(&target_key).cloned().unwrap_or_default();
            let mut image = BTreeSet::new();
            let mut inverse_ok = true;
            for x in s {
                let (step, xb) = d_reduce(&t, &q, &ed, x, i)?;
                inverse_ok &= d_lift(&step, &xb) == *x;
                image.insert(xb);
            }
            let sb = const_value(&stabs, s).unwrap_or(0);
            let sa = const_value(&bstabs, &target).unwrap_or(0);
            let halves = m == 2 && key.dims[i] == 1;
            d_checks.push(DReductionCheck {
                root: i,
                from: key.label(),
                to: target_key.label(),
                size: s.len(),
                bijective: image.len() == s.len() && image == target,
                inverse_ok,
                stab_before: sb,
                stab_after: sa,
                stab_rule_ok: if halves { sb == 2 * sa } else { sb == sa },
            });
        }
        let zero = ProfileKey::new(vec![0; mults.len()], &mults);
        let Some(s) = classes.get(&zero) else { continue };
        let bzero_key = reduce_key(&zero, 0);
        let target = bclasses.get(&bzero_key).cloned().unwrap_or_default();
        let mut fibers: BTreeMap<Subspace, BTreeSet<Subspace>> = BTreeMap::new();
        for x in s {
            fibers.entry(f_reduce(&d, x)).or_default().insert(x.clone());
        }
        let mut w_ok = true;
        let mut stab_ok = true;
        for xb in &target {
            let lifts: BTreeSet<Subspace> = w_lifts(&q, &t, &d, xb)?.into_iter().collect();
            w_ok &= fibers.get(xb).map_or(lifts.is_empty(), |fib| *fib == lifts);
            for x in fibers.get(xb).into_iter().flatten() {
                stab_ok &= stabs.get(x) == bstabs.get(xb);
            }
        }
        let sizes: BTreeSet<usize> = fibers.values().map(|f| f.len()).collect();
        let surjective = fibers.keys().cloned().collect::<BTreeSet<_>>() == target;
        let expected = if m == 2 { 2 } else { 1 };
        f_checks.push(FReductionCheck {
            root: i,
            multiplicity: m,
            class_size: s.len(),
            image_size: target.len(),
            pass: surjective && w_ok && stab_ok && sizes == BTreeSet::from([expected]),
            fiber_sizes: sizes,
            surjective,
            w_lift_matches: w_ok,
            stab_preserved: stab_ok,
        });
    }
    let pass = d_checks.iter().all(|c| c.bijective && c.inverse_ok && c.stab_rule_ok) && f_checks.iter().all(|c| c.pass);
    Ok(OddReductionReport { d_checks, f_checks, pass })
}

#[derive(Clone, Debug, Serialize)]
pub struct DeltaReport {
    pub alpha: Fe,
    pub multiplicity: usize,
    pub f_size: usize,
    pub fbar_size: usize,
    pub fiber_sizes: BTreeSet<usize>,
    pub surjective: bool,
    pub w_lift_matches: bool,
    /// For m = 2: whether the conic meets the excluded line rationally.
    pub split_node: Option<bool>,
    /// q for m >= 3, q - 1 for a split node, q + 1 for a non-split one.
    pub expected_fiber: usize,
    pub pass: bool,
}

/// delta_v: F -> F-bar for the eigenvector of a root of multiplicity >= 2, with
/// every fiber materialized both by projection and by the w-lift.
pub fn delta_v_even(p: &Pencil, v: &[Fe]) -> Result<(DeltaReport, Descent)> {
    let q = p.q1();
    let t = p.self_adjoint_t()?;
    let ed = p.eigendata()?;
    if geometric_genus(&ed) < 0 {
        return Err(Error::ReducibleCurve);
    }
    let d = restrict_and_descend(&q, &t, v)?;
    let i = root_index(&ed, d.alpha).ok_or(Error::NotAnEigenvalue)?;
    let m = ed.roots[i].1;
    let f_set = fano_set(p);
    let pb = d.pencil()?;
    let fbar = fano_set(&pb);
    let mut fibers: BTreeMap<Subspace, BTreeSet<Subspace>> = BTreeMap::new();
    for x in &f_set {
        fibers.entry(f_reduce(&d, x)).or_default().insert(x.clone());
    }
    let mut w_ok = true;
    let mut line_hits = BTreeSet::new();
    for xb in &fbar {
        let (lifts, hits) = w_lift_parts(&q, &t, &d, xb)?;
        let lifts: BTreeSet<Subspace> = lifts.into_iter().collect();
        line_hits.insert(hits);
        w_ok &= fibers.get(xb).map_or(lifts.is_empty(), |fib| *fib == lifts);
    }
    let sizes: BTreeSet<usize> = fibers.values().map(|f| f.len()).collect();
    let surjective = fibers.keys().cloned().collect::<BTreeSet<_>>() == fbar;
    let qn = p.field().q() as usize;
    let split_node = (m == 2).then(|| line_hits == BTreeSet::from([2]));
    let expected = match split_node {
        Some(true) => qn - 1,
        Some(false) => qn + 1,
        None => qn,
    };
    let rep = DeltaReport {
        alpha: d.alpha,
        multiplicity: m,
        f_size: f_set.len(),
        fbar_size: fbar.len(),
        pass: surjective && w_ok && sizes == BTreeSet::from([expected]),
        fiber_sizes: sizes,
        surjective,
        w_lift_matches: w_ok,
        split_node,
        expected_fiber: expected,
    };
    Ok((rep, d))
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceStep {
    pub alpha: String,
    pub multiplicity: usize,
    pub fiber: String,
    pub fiber_sizes: BTreeSet<usize>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FullDeltaReport {
    pub steps: Vec<TraceStep>,
    pub core_dim: usize,
    pub expected_core_dim: usize,
    pub f_size: usize,
    pub core_f_size: usize,
    pub product_ok: bool,
    pub pass: bool,
}

/// Iterates delta_v down to the regular semisimple core and checks
/// |F| = |F~| * product of fiber sizes.
pub fn full_delta(p: &Pencil) -> Result<(FullDeltaReport, Pencil)> {
    let ed = p.eigendata()?;
    let pg = geometric_genus(&ed);
    if pg < 0 {
        return Err(Error::ReducibleCurve);
    }
    let f_size = fano_set(p).len();
    let mut cur = p.clone();
    let mut steps = vec![];
    let mut product: usize = 1;
    let mut uniform = true;
    loop {
        let ed = cur.eigendata()?;
        let Some((_, v)) = node_vector(&ed) else { break };
        let (rep, d) = delta_v_even(&cur, &v)?;
        let field = cur.field().clone();
        if rep.fiber_sizes.len() == 1 {
            product *= *rep.fiber_sizes.iter().next().unwrap();
        } else {
            uniform = false;
        }
        steps.push(TraceStep {
            alpha: field.fmt_elem(rep.alpha),
            multiplicity: rep.multiplicity,
            fiber: match rep.split_node {
                Some(true) => "G_m (split)".into(),
                Some(false) => "G_m (non-split)".into(),
                None => "G_a".into(),
            },
            fiber_sizes: rep.fiber_sizes.clone(),
            pass: rep.pass,
        });
        cur = d.pencil()?;
    }
    let core_f_size = fano_set(&cur).len();
    let product_ok = uniform && f_size == core_f_size * product;
    let expected_core_dim = (2 * pg + 2) as usize;
    let report = FullDeltaReport {
        pass: product_ok && cur.n() == expected_core_dim && steps.iter().all(|s| s.pass),
        steps,
        core_dim: cur.n(),
        expected_core_dim,
        f_size,
        core_f_size,
        product_ok,
    };
    Ok((report, cur))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TerminalShape {
    Generic,
    S112,
    S31,
    S22,
    S4,
}

impl TerminalShape {
    /// Number of sign choices the examples count.
    pub fn expected_sign_vectors(&self) -> usize {
        match self {
            TerminalShape::Generic => 16,
            TerminalShape::S112 => 8,
            TerminalShape::S31 | TerminalShape::S22 => 4,
            TerminalShape::S4 => 2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TerminalSolution {
    pub shape: TerminalShape,
    pub field: Field,
    /// Coefficient vectors c, one per sign choice.
    pub sign_vectors: Vec<Vector>,
    pub lines: BTreeSet<Subspace>,
    /// Solutions of the monomial system outside the sign-choice family.
    pub excluded_family: Vec<Subspace>,
    /// Every excluded solution fails "Span{X,TX} is (n+1)-dim isotropic with no T-stable part".
    pub excluded_fail_filter: bool,
    /// Whether the printed matrix has the same kernel as the one derived from the pairings.
    pub printed_matrix_ok: bool,
    pub pencil: Pencil,
}

/// Jordan chain u_1, ..., u_m with (T - alpha) u_{k+1} = u_k.
pub fn jordan_chain(t: &Matrix, u: &Subspace, alpha: Fe, m: usize) -> Result<Vec<Vector>> {
    let s = t.shift(alpha);
    let low = s.pow(m - 1).kernel();
    let top = u.basis().iter().find(|b| !low.contains(b)).cloned().ok_or(Error::NotRegular)?;
    let mut chain = vec![top];
    for _ in 1..m {
        let next = s.apply(chain.last().unwrap());
        chain.push(next);
    }
    chain.reverse();
    Ok(chain)
}

fn in_l_star_zero(t: &Matrix, q: &QuadraticForm, x: &Subspace) -> bool {
    let s = span_xtx(t, x);
    s.dim() == x.dim() + 1 && s.is_isotropic(q.gram()) && t_stable_dim(t, &s) == 0
}

/// Solves the triangular monomial systems of the N=4 terminal cases.
pub fn terminal_even_solver(p: &Pencil) -> Result<TerminalSolution> {
    if p.n() != 4 {
        return Err(Error::InvalidInput("terminal solvers are for N = 4".into()));
    }
    let f = p.field().clone();
    let q = p.q1();
    let t = p.self_adjoint_t()?;
    let ed = p.eigendata()?;
    let b = |x: &[Fe], y: &[Fe]| q.b(x, y);
    let sub = |a: Fe, c: Fe| f.sub(a, c);
    let mut ms = ed.mults();
    ms.sort_unstable();
    let chains: Vec<Vec<Vector>> = ed
        .roots
        .iter()
        .zip(&ed.spaces)
        .map(|(&(a, m), u)| jordan_chain(&t, u, a, m))
        .collect::<Result<_>>()?;
    // order roots by multiplicity ascending, stable in root order
    let mut order: Vec<usize> = (0..ed.roots.len()).collect();
    order.sort_by_key(|&i| ed.roots[i].1);
    let alpha = |k: usize| ed.roots[order[k]].0;
    let ch = |k: usize| &chains[order[k]];
    let need_nonzero = |vals: &[Fe]| -> Result<()> {
        if vals.iter().any(|v| v.0 == 0) {
            Err(Error::FixtureDegenerate("a pairing the examples require nonzero vanished".into()))
        } else {
            Ok(())
        }
    };
    let two = f.from_int(2);
    // monomials(c) -> 4-vector, basis vectors, correct matrix rows and printed rows
    let (shape, basis, rows, printed): (TerminalShape, Vec<Vector>, Vec<Vector>, Vec<Vector>) = match ms.as_slice() {
        [1, 1, 1, 1] => {
            let basis: Vec<Vector> = (0..4).map(|k| ch(k)[0].clone()).collect();
            let om: Vec<Fe> = basis.iter().map(|u| b(u, u)).collect();
            need_nonzero(&om)?;
            let rows: Vec<Vector> = (0..3).map(|e| (0..4).map(|k| f.mul(om[k], f.pow(alpha(k), e))).collect()).collect();
            (TerminalShape::Generic, basis, rows.clone(), rows)
        }
        [1, 1, 2] => {
            let (a, bt, g) = (alpha(0), alpha(1), alpha(2));
            let (u, v, w1, w2) = (&ch(0)[0], &ch(1)[0], &ch(2)[0], &ch(2)[1]);
            let (o1, o2, g3, g4) = (b(u, u), b(v, v), b(w1, w2), b(w2, w2));
            need_nonzero(&[o1, o2, g3])?;
            let sq = |x: Fe| f.mul(x, x);
            let r0 = vec![o1, o2, g3, g4];
            let r2 = vec![f.mul(sq(sub(g, a)), o1), f.mul(sq(sub(g, bt)), o2), Fe(0), Fe(0)];
            let r1 = vec![f.mul(sub(a, g), o1), f.mul(sub(bt, g), o2), Fe(0), g3];
            let p1 = vec![f.mul(sub(g, a), o1), f.mul(sub(g, bt), o2), Fe(0), g3];
            (TerminalShape::S112, vec![u.clone(), v.clone(), w1.clone(), w2.clone()], vec![r0.clone(), r1, r2.clone()], vec![r0, p1, r2])
        }
        [1, 3] => {
            let (bt, a) = (alpha(0), alpha(1));
            let v = &ch(0)[0];
            let (u1, u2, u3) = (&ch(1)[0], &ch(1)[1], &ch(1)[2]);
            let (om, g4, g5, g6) = (b(v, v), b(u1, u3), b(u2, u3), b(u3, u3));
            need_nonzero(&[om, g4])?;
            let d = sub(bt, a);
            let rows = vec![
                vec![g4, g5, g6, om],
                vec![Fe(0), g4, g5, f.mul(d, om)],
                vec![Fe(0), Fe(0), g4, f.mul(f.mul(d, d), om)],
            ];
            (TerminalShape::S31, vec![u1.clone(), u2.clone(), u3.clone(), v.clone()], rows.clone(), rows)
        }
        [2, 2] => {
            let (a, bt) = (alpha(0), alpha(1));
            let (u1, u2, v1, v2) = (&ch(0)[0], &ch(0)[1], &ch(1)[0], &ch(1)[1]);
            let (g3, g4, o3, o4) = (b(u1, u2), b(u2, u2), b(v1, v2), b(v2, v2));
            need_nonzero(&[g3, o3])?;
            let d = sub(bt, a);
            let rows = vec![
                vec![g3, g4, o3, o4],
                vec![Fe(0), g3, f.mul(d, o3), f.add(o3, f.mul(d, o4))],
                vec![Fe(0), Fe(0), f.mul(f.mul(d, d), o3), f.add(f.mul(f.mul(two, d), o3), f.mul(f.mul(d, d), o4))],
            ];
            (TerminalShape::S22, vec![u1.clone(), u2.clone(), v1.clone(), v2.clone()], rows.clone(), rows)
        }
        [4] => {
            let u = ch(0);
            let (g5, g6, g7, g8) = (b(&u[0], &u[3]), b(&u[1], &u[3]), b(&u[2], &u[3]), b(&u[3], &u[3]));
            need_nonzero(&[g5])?;
            let rows = vec![vec![g5, g6, g7, g8], vec![Fe(0), g5, g6, g7], vec![Fe(0), Fe(0), g5, g6]];
            (TerminalShape::S4, u.clone(), rows.clone(), rows)
        }
        _ => return Err(Error::InvalidInput("not a terminal N=4 shape".into())),
    };
    let m = Matrix::from_rows(&f, &rows)?;
    let ker = m.kernel();
    if ker.dim() != 1 {
        return Err(Error::FixtureDegenerate("monomial system kernel is not a line".into()));
    }
    let printed_ok = Matrix::from_rows(&f, &printed)?.kernel() == ker;
    let k = ker.basis()[0].clone();
    let lead = match shape {
        TerminalShape::S31 => 2,
        _ => 3,
    };
    if k[lead].0 == 0 {
        return Err(Error::FixtureDegenerate("leading monomial vanishes in the kernel".into()));
    }
    let lam = f.inv(k[lead])?;
    let r = |j: usize| f.mul(lam, k[j]);
    // square roots the recipe needs
    let radicands: Vec<Fe> = match shape {
        TerminalShape::Generic => (0..3).map(r).collect(),
        TerminalShape::S112 => vec![r(0), r(1)],
        TerminalShape::S31 => vec![r(3)],
        TerminalShape::S22 => vec![r(1)],
        TerminalShape::S4 => vec![],
    };
    if radicands.iter().any(|&x| x.0 != 0 && !f.is_square(x)) {
        let (big, emb) = extend_for_sqrts(&f, &radicands)?;
        if big != f {
            return terminal_even_solver(&p.embed(&emb));
        }
    }
    let sqrt = |x: Fe| f.sqrt(x).expect("checked square");
    let half = |x: Fe, c: Fe| f.div(x, f.mul(two, c)).expect("nonzero");
    let pm = |x: Fe| if x.0 == 0 { vec![x] } else { vec![x, f.neg(x)] };
    let mut sign_vectors: Vec<Vector> = vec![];
    match shape {
        TerminalShape::Generic => {
            for c4 in pm(f.one()) {
                for c1 in pm(sqrt(r(0))) {
                    for c2 in pm(sqrt(r(1))) {
                        for c3 in pm(sqrt(r(2))) {
                            sign_vectors.push(vec![c1, c2, c3, c4]);
                        }
                    }
                }
            }
        }
        TerminalShape::S112 => {
            for c4 in pm(f.one()) {
                for c1 in pm(sqrt(r(0))) {
                    for c2 in pm(sqrt(r(1))) {
                        sign_vectors.push(vec![c1, c2, half(r(2), c4), c4]);
                    }
                }
            }
        }
        TerminalShape::S31 => {
            for c3 in pm(f.one()) {
                for c4 in pm(sqrt(r(3))) {
                    let c2 = half(r(1), c3);
                    let c1 = half(f.sub(r(0), f.mul(c2, c2)), c3);
                    sign_vectors.push(vec![c1, c2, c3, c4]);
                }
            }
        }
        TerminalShape::S22 => {
            for c4 in pm(f.one()) {
                for c2 in pm(sqrt(r(1))) {
                    sign_vectors.push(vec![half(r(0), c2), c2, half(r(2), c4), c4]);
                }
            }
        }
        TerminalShape::S4 => {
            for c4 in pm(f.one()) {
                let c3 = half(r(2), c4);
                let c2 = half(f.sub(r(1), f.mul(c3, c3)), c4);
                let c1 = half(f.sub(r(0), f.mul(f.mul(two, c2), c3)), c4);
                sign_vectors.push(vec![c1, c2, c3, c4]);
            }
        }
    }
    let to_x = |c: &[Fe]| {
        let mut x = vec![Fe(0); 4];
        for (ci, bv) in c.iter().zip(&basis) {
            x = vec_axpy(&f, &x, *ci, bv);
        }
        Subspace::line(&f, &x)
    };
    let lines: BTreeSet<Subspace> = sign_vectors.iter().map(|c| to_x(c)).collect();
    let mono = |c: &[Fe]| -> Vector {
        let m2 = |a: Fe, b2: Fe| f.mul(two, f.mul(a, b2));
        let sq = |a: Fe| f.mul(a, a);
        match shape {
            TerminalShape::Generic => c.iter().map(|&x| sq(x)).collect(),
            TerminalShape::S112 => vec![sq(c[0]), sq(c[1]), m2(c[2], c[3]), sq(c[3])],
            TerminalShape::S31 => vec![f.add(sq(c[1]), m2(c[0], c[2])), m2(c[1], c[2]), sq(c[2]), sq(c[3])],
            TerminalShape::S22 => vec![m2(c[0], c[1]), sq(c[1]), m2(c[2], c[3]), sq(c[3])],
            TerminalShape::S4 => vec![f.add(m2(c[0], c[3]), m2(c[1], c[2])), f.add(m2(c[1], c[3]), sq(c[2])), m2(c[2], c[3]), sq(c[3])],
        }
    };
    let mut excluded = vec![];
    for c in projective_points(&f, 4) {
        if m.apply(&mono(&c)).iter().all(|x| x.0 == 0) {
            let x = to_x(&c);
            if !lines.contains(&x) {
                excluded.push(x);
            }
        }
    }
    let excluded_fail_filter = excluded.iter().all(|x| !in_l_star_zero(&t, &q, x));
    Ok(TerminalSolution {
        shape,
        field: f.clone(),
        sign_vectors,
        lines,
        excluded_family: excluded,
        excluded_fail_filter,
        printed_matrix_ok: printed_ok,
        pencil: p.clone(),
    })
}

/// Brute-force L'* with zero profile: lines X with Span{X,TX} a 2-dim isotropic
/// plane free of T-stable subspaces.
pub fn l_star_zero_bruteforce(p: &Pencil) -> Result<BTreeSet<Subspace>> {
    let t = p.self_adjoint_t()?;
    let q = p.q1();
    let n = p.n() / 2 - 1;
    Ok(enumerate_common_isotropic(p, n).into_iter().filter(|x| in_l_star_zero(&t, &q, x)).collect())
}
