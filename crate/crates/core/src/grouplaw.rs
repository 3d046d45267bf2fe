//! Curve points as (pencil member, ruling), the involution tau, the divisor
//! action on F and F', and finite checks of the group law.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fano::{common_zeros, restrict_gram, span_xtx};
use crate::gf::{Fe, Field};
use crate::linalg::{dot, Matrix, Subspace, Vector};
use crate::quadrics::{Lambda, Pencil};
use crate::stab::{build_stab, spectral_idempotents, Flavor};

/// Sets at most this large are checked exhaustively.
pub const EXHAUSTIVE_LIMIT: usize = 64;
pub const DEFAULT_SAMPLES: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum PointKind {
    Smooth { ruling: u8 },
    Weierstrass,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CurvePoint {
    pub lambda: Lambda,
    pub kind: PointKind,
}

impl CurvePoint {
    pub fn smooth(lambda: Lambda, ruling: u8) -> CurvePoint {
        CurvePoint { lambda, kind: PointKind::Smooth { ruling } }
    }

    /// Hyperelliptic involution.
    pub fn bar(&self) -> CurvePoint {
        match self.kind {
            PointKind::Smooth { ruling } => CurvePoint::smooth(self.lambda, 1 - ruling),
            PointKind::Weierstrass => *self,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Divisor {
    pub terms: Vec<(CurvePoint, i64)>,
}

impl Divisor {
    pub fn point(c: CurvePoint) -> Divisor {
        Divisor { terms: vec![(c, 1)] }
    }

    pub fn from_terms(terms: &[(CurvePoint, i64)]) -> Divisor {
        Divisor { terms: terms.to_vec() }
    }

    pub fn degree(&self) -> i64 {
        self.terms.iter().map(|t| t.1).sum()
    }

    /// (c) + (c-bar)
    pub fn hyperelliptic(c: CurvePoint) -> Divisor {
        Divisor { terms: vec![(c, 1), (c.bar(), 1)] }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SignedFano {
    pub x: Subspace,
    /// +1 for F, -1 for F'.
    pub sign: i8,
}

impl SignedFano {
    pub fn plus(x: Subspace) -> SignedFano {
        SignedFano { x, sign: 1 }
    }
    pub fn minus(x: Subspace) -> SignedFano {
        SignedFano { x, sign: -1 }
    }
    pub fn neg(&self) -> SignedFano {
        SignedFano { x: self.x.clone(), sign: -self.sign }
    }
}

/// Parity of the codimension of Y1 cap Y2 in Y1.
pub fn codim_parity(y1: &Subspace, y2: &Subspace) -> u8 {
    ((y1.dim() - y1.intersect(y2).dim()) % 2) as u8
}

#[derive(Clone, Debug)]
pub struct RulingLabeler {
    pub refs: BTreeMap<Lambda, Subspace>,
}

impl RulingLabeler {
    /// References for every smooth split member of the pencil.
    pub fn new(p: &Pencil) -> RulingLabeler {
        let half = p.n() / 2;
        let mut refs = BTreeMap::new();
        for l in p.parameters() {
            let q = p.member_form(l);
            if !q.is_nondegenerate() {
                continue;
            }
            let y = q.maximal_isotropic();
            if y.dim() == half {
                refs.insert(l, y);
            }
        }
        RulingLabeler { refs }
    }

    pub fn label(&self, y: &Subspace, l: Lambda) -> Option<u8> {
        self.refs.get(&l).map(|r| codim_parity(y, r))
    }
}

/// Reflection v -> v - 2 b(v,p)/b(p,p) p for the form with Gram matrix g.
pub fn reflection(g: &Matrix, p: &[Fe]) -> Result<Matrix> {
    let f = g.field();
    let n = g.rows();
    let gp = g.apply(p);
    let bpp = dot(f, p, &gp);
    let c = f.div(f.from_int(-2), bpp)?;
    let mut m = Matrix::identity(f, n);
    for i in 0..n {
        for j in 0..n {
            let v = f.add(m.get(i, j), f.mul(c, f.mul(p[i], gp[j])));
            m.set(i, j, v);
        }
    }
    Ok(m)
}

/// All isotropic subspaces of Q_lambda of dimension dim X + 1 containing X.
pub fn maximal_isotropics_containing(p: &Pencil, x: &Subspace, l: Lambda) -> Vec<Subspace> {
    let f = p.field();
    let g = p.member(l);
    let k = x.perp(&g);
    let comp = x.complement_in(&k);
    let rg = restrict_gram(&g, &comp);
    common_zeros(f, &rg, &rg)
        .into_iter()
        .map(|c| {
            let v: Vector = (0..p.n())
                .map(|j| c.iter().zip(&comp).fold(Fe(0), |acc, (&ci, b)| f.add(acc, f.mul(ci, b[j]))))
                .collect();
            x.with_vector(&v)
        })
        .collect()
}

/// The pencil together with its ruling references, the auxiliary member used
/// for residual intersections, and the rational points of the curve.
#[derive(Clone, Debug)]
pub struct GroupLaw {
    pub pencil: Pencil,
    pub labeler: RulingLabeler,
    /// Smooth members in canonical order; the first one not equal to lambda is used.
    pub aux: Vec<Lambda>,
    pub points: Vec<CurvePoint>,
    /// Cone points of the singular members that are smooth points of C.
    pub cones: BTreeMap<Lambda, Vector>,
}

impl GroupLaw {
    pub fn new(p: &Pencil) -> Result<GroupLaw> {
        if p.n() % 2 == 1 {
            return Err(Error::InvalidInput("the group law lives on even-dimensional pencils".into()));
        }
        let labeler = RulingLabeler::new(p);
        let mut aux = vec![];
        let mut cones = BTreeMap::new();
        let mut singular = vec![];
        for l in p.parameters() {
            let m = p.member(l);
            if m.det()?.0 != 0 {
                aux.push(l);
            } else {
                singular.push(l);
            }
        }
        if aux.len() < 2 {
            return Err(Error::FixtureDegenerate("fewer than two smooth rational members".into()));
        }
        let mu = aux[0];
        let gmu = p.member(mu);
        for &l in &singular {
            let k = p.member(l).kernel();
            if k.dim() == 1 {
                let v = k.basis()[0].clone();
                if gmu.bilinear(&v, &v).0 != 0 {
                    cones.insert(l, v);
                }
            }
        }
        let mut points = vec![];
        for l in p.parameters() {
            if labeler.refs.contains_key(&l) {
                points.push(CurvePoint::smooth(l, 0));
                points.push(CurvePoint::smooth(l, 1));
            } else if cones.contains_key(&l) {
                points.push(CurvePoint { lambda: l, kind: PointKind::Weierstrass });
            }
        }
        Ok(GroupLaw { pencil: p.clone(), labeler, aux, points, cones })
    }

    pub fn field(&self) -> &Field {
        self.pencil.field()
    }

    pub fn aux_for(&self, l: Lambda) -> Lambda {
        *self.aux.iter().find(|&&m| m != l).expect("two smooth members")
    }

    pub fn weierstrass_points(&self) -> Vec<CurvePoint> {
        self.points.iter().copied().filter(|c| c.kind == PointKind::Weierstrass).collect()
    }

    pub fn smooth_points(&self) -> Vec<CurvePoint> {
        self.points.iter().copied().filter(|c| c.kind != PointKind::Weierstrass).collect()
    }

    /// The isotropic (n+1)-space of Q_c through X in the ruling of c.
    pub fn ruling_space(&self, c: CurvePoint, x: &Subspace) -> Result<Subspace> {
        let PointKind::Smooth { ruling } = c.kind else {
            return Err(Error::NotApplicable("Weierstrass points have no ruling".into()));
        };
        maximal_isotropics_containing(&self.pencil, x, c.lambda)
            .into_iter()
            .find(|y| self.labeler.label(y, c.lambda) == Some(ruling))
            .ok_or(Error::DegenerateSpan)
    }

    /// tau(c) X: residual intersection of the ruling space through X with B.
    pub fn tau(&self, c: CurvePoint, x: &Subspace) -> Result<Subspace> {
        if c.kind == PointKind::Weierstrass {
            return self.tau_weierstrass(c.lambda, x);
        }
        let y = self.ruling_space(c, x)?;
        self.tau_via(&y, x, self.aux_for(c.lambda))
    }

    /// Reflection of X in a vector p of Y outside X, for the member Q_mu.
    pub fn tau_via(&self, y: &Subspace, x: &Subspace, mu: Lambda) -> Result<Subspace> {
        let f = self.field();
        let g = self.pencil.member(mu);
        let u = x.complement_in(y).pop().ok_or(Error::DegenerateSpan)?;
        let b = |v: &[Fe], w: &[Fe]| g.bilinear(v, w);
        let mut p = None;
        if b(&u, &u).0 != 0 {
            p = Some(u.clone());
        } else if let Some(xv) = x.basis().iter().find(|xv| b(&u, xv).0 != 0) {
            // b(u + t x, u + t x) = 2 t b(u, x) since x is isotropic
            p = Some(crate::linalg::vec_add(f, &u, xv));
        }
        let p = p.ok_or(Error::DegenerateSpan)?;
        Ok(x.image(&reflection(&g, &p)?))
    }

    /// Reflection in the cone point of a singular member.
    pub fn tau_weierstrass(&self, l: Lambda, x: &Subspace) -> Result<Subspace> {
        let v = self
            .cones
            .get(&l)
            .ok_or_else(|| Error::NotApplicable("no smooth Weierstrass point at this parameter".into()))?;
        if x.contains(v) {
            return Err(Error::ConeOnX);
        }
        let g = self.pencil.member(self.aux_for(l));
        Ok(x.image(&reflection(&g, v)?))
    }

    /// One step of the action: x + (c) for k = 1 and x - (c) for k = -1.
    fn step(&self, x: &SignedFano, c: CurvePoint, k: i64) -> Result<SignedFano> {
        let target = match (x.sign > 0, k > 0) {
            (true, true) | (false, false) => c.bar(),
            _ => c,
        };
        let y = self.tau(target, &x.x)?;
        Ok(SignedFano { x: y, sign: -x.sign })
    }

    pub fn divisor_act(&self, x: &SignedFano, d: &Divisor) -> Result<SignedFano> {
        let mut cur = x.clone();
        for &(c, m) in &d.terms {
            for _ in 0..m.unsigned_abs() {
                cur = self.step(&cur, c, m.signum())?;
            }
        }
        Ok(cur)
    }

    /// The unique member containing the subspace W, if there is exactly one.
    pub fn member_containing(&self, w: &Subspace) -> Option<Lambda> {
        let mut hits = self.pencil.parameters().into_iter().filter(|&l| w.is_isotropic(&self.pencil.member(l)));
        let first = hits.next()?;
        if hits.next().is_some() {
            return None;
        }
        Some(first)
    }

    /// Curve point given by a maximal isotropic W of a member: (lambda, ruling of W).
    pub fn point_of_span(&self, w: &Subspace) -> Option<CurvePoint> {
        let l = self.member_containing(w)?;
        if let Some(r) = self.labeler.label(w, l) {
            return Some(CurvePoint::smooth(l, r));
        }
        self.cones.contains_key(&l).then_some(CurvePoint { lambda: l, kind: PointKind::Weierstrass })
    }
}

#[derive(Clone, Debug, Serialize)]
pub enum BasePointKind {
    Weierstrass,
    NonWeierstrass,
}

#[derive(Clone, Debug)]
pub struct F2Report {
    pub kind: BasePointKind,
    pub by_fixed_point: BTreeSet<Subspace>,
    pub by_structure: BTreeSet<Subspace>,
    pub agree: bool,
}

/// The fixed set of tau(infinity) on F, from the definition and from the
/// structural description, for the distinguished point at lambda = infinity.
pub fn f2_infty(gl: &GroupLaw, f_set: &BTreeSet<Subspace>) -> Result<F2Report> {
    let p = &gl.pencil;
    if let Some(v) = gl.cones.get(&Lambda::Infinity) {
        let h = Subspace::line(p.field(), v).perp(p.a2());
        let mut fixed = BTreeSet::new();
        for x in f_set {
            if gl.tau_weierstrass(Lambda::Infinity, x)? == *x {
                fixed.insert(x.clone());
            }
        }
        let structural: BTreeSet<Subspace> = f_set.iter().filter(|x| h.contains_space(x)).cloned().collect();
        return Ok(F2Report { kind: BasePointKind::Weierstrass, agree: fixed == structural, by_fixed_point: fixed, by_structure: structural });
    }
    let Some(y0) = gl.labeler.refs.get(&Lambda::Infinity) else {
        return Err(Error::NoBasePoint);
    };
    let t = p.self_adjoint_t()?;
    let inf = CurvePoint::smooth(Lambda::Infinity, 0);
    let mut fixed = BTreeSet::new();
    for x in f_set {
        if gl.tau(inf, x)? == *x {
            fixed.insert(x.clone());
        }
    }
    let structural = f_set
        .iter()
        .filter(|x| {
            let s = span_xtx(&t, x);
            s.dim() == x.dim() + 1 && s.is_isotropic(p.a1()) && codim_parity(&s, y0) == 0
        })
        .cloned()
        .collect::<BTreeSet<_>>();
    Ok(F2Report { kind: BasePointKind::NonWeierstrass, agree: fixed == structural, by_fixed_point: fixed, by_structure: structural })
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorCheck {
    pub generator: String,
    pub pass: bool,
    /// First X where the two actions differ, as basis codes.
    pub witness: Option<Vec<Vec<u32>>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TwoActionsReport {
    pub flavor: Flavor,
    pub f2_size: usize,
    pub group_order: usize,
    pub generators: Vec<GeneratorCheck>,
    pub pass: bool,
}

fn lambda_name(f: &Field, l: Lambda) -> String {
    match l {
        Lambda::Affine(a) => f.fmt_elem(a),
        Lambda::Infinity => "inf".into(),
    }
}

/// Pencil restricted to the span of `basis`, in those coordinates.
pub fn restrict_pencil(p: &Pencil, basis: &[Vector]) -> Result<Pencil> {
    Pencil::new(restrict_gram(p.a1(), basis), restrict_gram(p.a2(), basis))
}

/// Compares the divisor action of the generators of J[2] with the matrix
/// action of Stab(T) on F[2]_infinity, permutation by permutation.
pub fn verify_two_actions(gl: &GroupLaw, f_set: &BTreeSet<Subspace>) -> Result<TwoActionsReport> {
    let p = &gl.pencil;
    let f = p.field().clone();
    let f2 = f2_infty(gl, f_set)?;
    if !f2.agree {
        return Err(Error::InvalidInput("fixed-point and structural F[2] disagree".into()));
    }
    let set = f2.by_fixed_point;
    let mut generators = vec![];
    let flavor;
    let group_order;
    if let Some(vinf) = gl.cones.get(&Lambda::Infinity) {
        flavor = Flavor::PO;
        let h = Subspace::line(&f, vinf).perp(p.a2());
        let hb = h.basis().to_vec();
        let ph = restrict_pencil(p, &hb)?;
        let t = ph.self_adjoint_t()?;
        let ed = ph.eigendata()?;
        let g = build_stab(&t, &ed, &ph.q1(), Flavor::PO)?;
        group_order = g.order();
        let idem = spectral_idempotents(&ed)?;
        let to_h = |x: &Subspace| {
            let cs: Vec<Vector> = x.basis().iter().map(|v| h.coordinates(v).expect("inside H")).collect();
            Subspace::from_spanning(&f, hb.len(), &cs)
        };
        let from_h = |xh: &Subspace| {
            let vs: Vec<Vector> = xh
                .basis()
                .iter()
                .map(|c| (0..p.n()).map(|j| c.iter().zip(&hb).fold(Fe(0), |acc, (&ci, b)| f.add(acc, f.mul(ci, b[j])))).collect())
                .collect();
            Subspace::from_spanning(&f, p.n(), &vs)
        };
        for (i, &(alpha, m)) in ed.roots.iter().enumerate() {
            if m != 1 {
                continue;
            }
            let pi = CurvePoint { lambda: Lambda::Affine(alpha), kind: PointKind::Weierstrass };
            let d = Divisor::from_terms(&[(pi, 1), (CurvePoint { lambda: Lambda::Infinity, kind: PointKind::Weierstrass }, -1)]);
            let mat = Matrix::identity(&f, hb.len()).sub(&idem[i].scale(f.from_int(2)))?;
            if g.find(&mat).is_none() {
                return Err(Error::InvalidInput("generator matrix missing from Stab(T)".into()));
            }
            let mut witness = None;
            for x in &set {
                let lhs = gl.divisor_act(&SignedFano::plus(x.clone()), &d)?;
                let rhs = from_h(&to_h(x).image(&mat));
                if lhs.sign != 1 || lhs.x != rhs {
                    witness = Some(x.to_codes());
                    break;
                }
            }
            generators.push(GeneratorCheck {
                generator: format!("(P_{}) - (inf)", lambda_name(&f, Lambda::Affine(alpha))),
                pass: witness.is_none(),
                witness,
            });
        }
    } else {
        flavor = Flavor::PSO;
        let t = p.self_adjoint_t()?;
        let ed = p.eigendata()?;
        let g = build_stab(&t, &ed, &p.q1(), Flavor::PSO)?;
        group_order = g.order();
        let idem = spectral_idempotents(&ed)?;
        let simple: Vec<usize> = (0..ed.roots.len()).filter(|&i| ed.roots[i].1 == 1).collect();
        for (a, &i) in simple.iter().enumerate() {
            for &j in &simple[a + 1..] {
                let (ai, aj) = (ed.roots[i].0, ed.roots[j].0);
                let pi = CurvePoint { lambda: Lambda::Affine(ai), kind: PointKind::Weierstrass };
                let pj = CurvePoint { lambda: Lambda::Affine(aj), kind: PointKind::Weierstrass };
                let d = Divisor::from_terms(&[(pi, 1), (pj, -1)]);
                let two = f.from_int(2);
                let mat = Matrix::identity(&f, p.n()).sub(&idem[i].scale(two))?.sub(&idem[j].scale(two))?;
                if g.find(&mat).is_none() {
                    return Err(Error::InvalidInput("generator matrix missing from Stab(T)".into()));
                }
                let mut witness = None;
                for x in &set {
                    let lhs = gl.divisor_act(&SignedFano::plus(x.clone()), &d)?;
                    if lhs.sign != 1 || lhs.x != x.image(&mat) {
                        witness = Some(x.to_codes());
                        break;
                    }
                }
                generators.push(GeneratorCheck {
                    generator: format!("(P_{}) - (P_{})", lambda_name(&f, Lambda::Affine(ai)), lambda_name(&f, Lambda::Affine(aj))),
                    pass: witness.is_none(),
                    witness,
                });
            }
        }
    }
    let pass = !generators.is_empty() && generators.iter().all(|g| g.pass);
    Ok(TwoActionsReport { flavor, f2_size: set.len(), group_order, generators, pass })
}

#[derive(Clone, Debug, Serialize)]
pub struct ShadowCheck {
    pub name: String,
    pub tested: usize,
    pub failures: usize,
    pub pass: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ShadowReport {
    pub checks: Vec<ShadowCheck>,
    pub pass: bool,
}

/// Indices to test: all of them when the set is small, otherwise `samples` seeded draws.
pub fn sample_indices(total: usize, samples: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    if total <= EXHAUSTIVE_LIMIT {
        (0..total).collect()
    } else {
        (0..samples).map(|_| rng.gen_range(0..total)).collect()
    }
}

struct Tally {
    name: String,
    tested: usize,
    failures: usize,
    witness: Option<String>,
}

impl Tally {
    fn new(name: &str) -> Tally {
        Tally { name: name.into(), tested: 0, failures: 0, witness: None }
    }
    fn record(&mut self, ok: bool, w: impl FnOnce() -> String) {
        self.tested += 1;
        if !ok {
            self.failures += 1;
            if self.witness.is_none() {
                self.witness = Some(w());
            }
        }
    }
    fn done(self) -> ShadowCheck {
        ShadowCheck { pass: self.failures == 0, name: self.name, tested: self.tested, failures: self.failures, witness: self.witness }
    }
}

/// All multisets of size r from `pts`.
fn multisets(pts: &[CurvePoint], r: usize) -> Vec<Vec<CurvePoint>> {
    if r == 0 {
        return vec![vec![]];
    }
    let mut out = vec![];
    for i in 0..pts.len() {
        for mut rest in multisets(&pts[i..], r - 1) {
            rest.insert(0, pts[i]);
            out.push(rest);
        }
    }
    out
}

/// Randomized finite checks of the group law on F and F'.
pub fn verify_group_shadow(gl: &GroupLaw, f_set: &BTreeSet<Subspace>, samples: usize, seed: u64) -> Result<ShadowReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = &gl.pencil;
    let fl: Vec<&Subspace> = f_set.iter().collect();
    let pts = gl.points.clone();
    let smooth = gl.smooth_points();
    let n = p.n() / 2 - 1;
    let mut checks = vec![];
    if fl.is_empty() || pts.is_empty() {
        return Err(Error::FixtureDegenerate("no rational points on F or C".into()));
    }
    let fmt = |x: &Subspace| format!("{:?}", x.to_codes());

    // (i) tau(c) is an involution and lands in F
    let mut t = Tally::new("tau_involution");
    for k in sample_indices(fl.len() * pts.len(), samples, &mut rng) {
        let (x, c) = (fl[k % fl.len()], pts[k / fl.len()]);
        let y = gl.tau(c, x)?;
        let ok = f_set.contains(&y) && gl.tau(c, &y)? == *x;
        t.record(ok, || format!("c={c:?} X={}", fmt(x)));
    }
    checks.push(t.done());

    // ruling consistency: the two spaces through X get opposite labels, and labels add mod 2
    let mut t = Tally::new("ruling_labels");
    let lams: Vec<Lambda> = gl.labeler.refs.keys().copied().collect();
    for k in sample_indices(fl.len() * lams.len(), samples, &mut rng) {
        let (x, l) = (fl[k % fl.len()], lams[k / fl.len()]);
        let ys = maximal_isotropics_containing(p, x, l);
        let labels: Vec<u8> = ys.iter().map(|y| gl.labeler.label(y, l).unwrap()).collect();
        let mut ok = ys.len() == 2 && labels[0] != labels[1];
        let x2 = fl[rng.gen_range(0..fl.len())];
        for y2 in maximal_isotropics_containing(p, x2, l) {
            let l2 = gl.labeler.label(&y2, l).unwrap();
            ok &= ys.iter().zip(&labels).all(|(y, &l1)| codim_parity(y, &y2) == l1 ^ l2);
        }
        t.record(ok, || format!("lambda={l:?} X={}", fmt(x)));
    }
    checks.push(t.done());

    // (ii) (x + (c1)) + (c2) = (x + (c2)) + (c1), on F and F'
    let mut t = Tally::new("commutation_c1_c2");
    for k in sample_indices(fl.len() * pts.len() * pts.len() * 2, samples, &mut rng) {
        let x = fl[k % fl.len()];
        let rest = k / fl.len();
        let (c1, c2) = (pts[rest % pts.len()], pts[(rest / pts.len()) % pts.len()]);
        let sx = if rest / (pts.len() * pts.len()) == 0 { SignedFano::plus(x.clone()) } else { SignedFano::minus(x.clone()) };
        let a = gl.divisor_act(&gl.divisor_act(&sx, &Divisor::point(c1))?, &Divisor::point(c2))?;
        let b = gl.divisor_act(&gl.divisor_act(&sx, &Divisor::point(c2))?, &Divisor::point(c1))?;
        t.record(a == b, || format!("c1={c1:?} c2={c2:?} X={}", fmt(x)));
    }
    checks.push(t.done());

    // (iii) the hyperelliptic class acts trivially
    let mut t = Tally::new("hyperelliptic_class_trivial");
    for k in sample_indices(fl.len() * pts.len() * 2, samples, &mut rng) {
        let x = fl[k % fl.len()];
        let c = pts[(k / fl.len()) % pts.len()];
        let sx = if k / (fl.len() * pts.len()) == 0 { SignedFano::plus(x.clone()) } else { SignedFano::minus(x.clone()) };
        let y = gl.divisor_act(&sx, &Divisor::hyperelliptic(c))?;
        t.record(y == sx, || format!("c={c:?} X={}", fmt(x)));
    }
    checks.push(t.done());

    // (iv) the sign component moves by the degree
    let mut t = Tally::new("degree_parity");
    for _ in 0..samples.min(fl.len() * pts.len()).max(usize::from(fl.len() * pts.len() <= EXHAUSTIVE_LIMIT)) {
        let x = fl[rng.gen_range(0..fl.len())];
        let len = rng.gen_range(1..=3);
        let terms: Vec<(CurvePoint, i64)> =
            (0..len).map(|_| (*pts.choose(&mut rng).unwrap(), if rng.gen_bool(0.5) { 1 } else { -1 })).collect();
        let d = Divisor::from_terms(&terms);
        let y = gl.divisor_act(&SignedFano::plus(x.clone()), &d)?;
        let expect = if d.degree().rem_euclid(2) == 0 { 1 } else { -1 };
        t.record(y.sign == expect && f_set.contains(&y.x), || format!("D={terms:?} X={}", fmt(x)));
    }
    checks.push(t.done());

    // dim T_X B <= n (projective), and X + X = (c) when the tangent space is an n-plane
    let mut t = Tally::new("tangent_space");
    for x in &fl {
        let tx = x.perp(p.a1()).intersect(&x.perp(p.a2()));
        let mut ok = tx.dim() <= n + 1;
        if ok && tx.dim() == n + 1 {
            ok = match gl.point_of_span(&tx) {
                Some(c) if c.kind != PointKind::Weierstrass => gl.divisor_act(&SignedFano::minus((*x).clone()), &Divisor::point(c))? == SignedFano::plus((*x).clone()),
                Some(_) => gl.tau_weierstrass(gl.member_containing(&tx).unwrap(), x)? == **x,
                None => false,
            };
        }
        t.record(ok, || fmt(x));
    }
    checks.push(t.done());

    // (v) x + D = (-1)^r x' for a unique effective D of degree r = codim(x, x');
    // for r = 1 it is the point of Span{X, X'}
    let mut t = Tally::new("effective_divisor_of_codim");
    let divisors: Vec<Vec<Vec<CurvePoint>>> = (0..=n).map(|r| multisets(&smooth_and_weier(&pts, &smooth), r)).collect();
    for k in sample_indices(fl.len() * fl.len(), samples, &mut rng) {
        let (x, x2) = (fl[k % fl.len()], fl[k / fl.len()]);
        let r = n - x.intersect(x2).dim();
        if r == 0 {
            continue;
        }
        let target = if r % 2 == 0 { SignedFano::plus(x2.clone()) } else { SignedFano::minus(x2.clone()) };
        let mut hits = vec![];
        for d in &divisors[r] {
            let terms: Vec<(CurvePoint, i64)> = d.iter().map(|&c| (c, 1)).collect();
            if gl.divisor_act(&SignedFano::plus(x.clone()), &Divisor::from_terms(&terms))? == target {
                hits.push(d.clone());
            }
        }
        let mut ok = hits.len() <= 1;
        if r == 1 {
            let span = x.sum(x2);
            ok &= match gl.point_of_span(&span) {
                Some(c) => hits == vec![vec![c.bar()]],
                None => hits.is_empty(),
            };
        }
        t.record(ok, || format!("X={} X'={} hits={hits:?}", fmt(x), fmt(x2)));
    }
    checks.push(t.done());

    let pass = checks.iter().all(|c| c.pass);
    Ok(ShadowReport { checks, pass })
}

fn smooth_and_weier(pts: &[CurvePoint], _smooth: &[CurvePoint]) -> Vec<CurvePoint> {
    pts.to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fano::{enumerate_common_isotropic, fano_set};
    use crate::linalg::Polynomial;
    use crate::quadrics::trace_form_fixture;

    fn generic4() -> Pencil {
        let f = Field::prime(7).unwrap();
        let g = Polynomial::from_roots(&f, &[(Fe(1), 1), (Fe(2), 1), (Fe(3), 1), (Fe(4), 1)]);
        let (q, t, _) = trace_form_fixture(&g, Fe(1)).unwrap();
        Pencil::from_operator(&q, &t).unwrap()
    }

    /// Residual intersection oracle: the points of Y on B other than X (n = 1).
    fn residual(p: &Pencil, y: &Subspace, x: &Subspace) -> Vec<Subspace> {
        let f = p.field();
        crate::linalg::projective_points(f, 2)
            .map(|c| {
                let v: Vector = (0..p.n()).map(|j| f.add(f.mul(c[0], y.basis()[0][j]), f.mul(c[1], y.basis()[1][j]))).collect();
                Subspace::line(f, &v)
            })
            .filter(|l| l.is_isotropic(p.a1()) && l.is_isotropic(p.a2()) && l != x)
            .collect()
    }

    #[test]
    fn tau_matches_residual_intersection() {
        let p = generic4();
        let gl = GroupLaw::new(&p).unwrap();
        let fs = enumerate_common_isotropic(&p, 1);
        assert_eq!(fs, fano_set(&p));
        for x in &fs {
            for &c in &gl.smooth_points() {
                let y = gl.ruling_space(c, x).unwrap();
                let x2 = gl.tau(c, x).unwrap();
                let res = residual(&p, &y, x);
                if res.is_empty() {
                    assert_eq!(&x2, x);
                } else {
                    assert_eq!(res, vec![x2.clone()]);
                }
                for mu in gl.aux.iter().filter(|&&m| m != c.lambda) {
                    assert_eq!(gl.tau_via(&y, x, *mu).unwrap(), x2);
                }
            }
        }
    }

    #[test]
    fn shadow_and_two_actions_generic4() {
        let p = generic4();
        let gl = GroupLaw::new(&p).unwrap();
        let fs = fano_set(&p);
        let rep = verify_group_shadow(&gl, &fs, 50, 0).unwrap();
        assert!(rep.pass, "{:?}", rep.checks);
        let two = verify_two_actions(&gl, &fs).unwrap();
        assert!(two.pass, "{two:?}");
        assert_eq!(two.f2_size, 4);
        assert_eq!(two.group_order, 4);
    }
}
