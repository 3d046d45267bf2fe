//! Property tests for the algebraic invariants of each module.

use proptest::prelude::*;

use pencil_lab::fano::{contains_pn, enumerate_common_isotropic, even_fano_sets_any_genus, expected_class_size, geometric_genus, partition_by_profile};
use pencil_lab::fixtures::shape_pencil;
use pencil_lab::gf::{extend_to_split, Fe, Field};
use pencil_lab::linalg::{Matrix, Polynomial, Subspace, Vector};
use pencil_lab::quadrics::{restrict_and_descend, trace_form_fixture, ClassTag, Pencil};
use pencil_lab::reduction::terminal_even_solver;
use pencil_lab::stab::{build_stab, Flavor};

const ORDERS: &[(u32, u32)] = &[(7, 1), (11, 1), (3, 2), (3, 3), (7, 2)];

fn field_strategy() -> impl Strategy<Value = Field> {
    prop::sample::select(ORDERS.to_vec()).prop_map(|(p, k)| Field::with_degree(p, k).unwrap())
}

fn elem(f: &Field, seed: u64) -> Fe {
    Fe((seed % f.q() as u64) as u32)
}

fn matrix(f: &Field, n: usize, m: usize, seeds: &[u64]) -> Matrix {
    let rows: Vec<Vector> = (0..n).map(|i| (0..m).map(|j| elem(f, seeds[(i * m + j) % seeds.len()].wrapping_mul(i as u64 * 31 + j as u64 + 1))).collect()).collect();
    Matrix::from_rows(f, &rows).unwrap()
}

fn symmetric(f: &Field, n: usize, seeds: &[u64]) -> Matrix {
    let m = matrix(f, n, n, seeds);
    m.add(&m.transpose()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(f in field_strategy(), a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (a, b, c) = (elem(&f, a), elem(&f, b), elem(&f, c));
        prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), f.zero());
        if a.0 != 0 {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
        }
    }

    #[test]
    fn sqrt_squares_back(f in field_strategy(), a in any::<u64>()) {
        let a = elem(&f, a);
        match f.sqrt(a) {
            Some(s) => prop_assert_eq!(f.mul(s, s), a),
            None => prop_assert!(a.0 != 0 && f.pow(a, (f.q() as u64 - 1) / 2) != f.one()),
        }
    }

    #[test]
    fn frobenius_is_a_ring_map(f in field_strategy(), a in any::<u64>(), b in any::<u64>()) {
        let (a, b) = (elem(&f, a), elem(&f, b));
        prop_assert_eq!(f.frobenius(f.add(a, b)), f.add(f.frobenius(a), f.frobenius(b)));
        prop_assert_eq!(f.frobenius(f.mul(a, b)), f.mul(f.frobenius(a), f.frobenius(b)));
    }

    #[test]
    fn splitting_field_factors_completely(cs in prop::collection::vec(0i64..7, 2..5)) {
        let f = Field::prime(7).unwrap();
        let mut cs = cs;
        cs.push(1);
        let poly = Polynomial::from_ints(&f, &cs);
        let (big, emb) = extend_to_split(&f, &poly).unwrap();
        let lifted = emb.map_poly(&poly);
        let total: usize = lifted.roots().iter().map(|r| r.1).sum();
        prop_assert_eq!(total, poly.degree().unwrap());
        prop_assert!(big.q() <= 7u32.pow(4));
    }

    #[test]
    fn rref_idempotent_and_row_space(f in field_strategy(), n in 1usize..6, m in 1usize..7, seeds in prop::collection::vec(any::<u64>(), 1..40)) {
        let a = matrix(&f, n, m, &seeds);
        let r = a.rref();
        prop_assert_eq!(r.rref(), r.clone());
        prop_assert_eq!(Subspace::from_spanning(&f, m, &a.row_vecs()), Subspace::from_spanning(&f, m, &r.row_vecs()));
        prop_assert_eq!(a.rank() + a.kernel().dim(), m);
    }

    #[test]
    fn cayley_hamilton(f in field_strategy(), n in 1usize..9, seeds in prop::collection::vec(any::<u64>(), 1..70)) {
        let a = matrix(&f, n, n, &seeds);
        let cp = a.charpoly().unwrap();
        prop_assert_eq!(a.eval_poly(&cp), Matrix::zeros(&f, n, n));
        let mp = a.minpoly().unwrap();
        prop_assert!(cp.rem(&mp).unwrap().is_zero());
        // same roots over the algebraic closure: charpoly divides minpoly^n
        prop_assert!(mp.pow(n).rem(&cp).unwrap().is_zero());
    }

    #[test]
    fn self_adjoint_operator(n in 3usize..6, seeds in prop::collection::vec(any::<u64>(), 1..40)) {
        let f = Field::prime(7).unwrap();
        let a1 = symmetric(&f, n, &seeds);
        prop_assume!(a1.det().unwrap().0 != 0);
        let a2 = symmetric(&f, n, &seeds.iter().map(|s| s.rotate_left(17)).collect::<Vec<_>>());
        let p = Pencil::new(a1.clone(), a2.clone()).unwrap();
        let t = p.self_adjoint_t().unwrap();
        prop_assert_eq!(a1.mul(&t).unwrap(), a2.clone());
        prop_assert!(a1.mul(&t).unwrap().is_symmetric());
    }

    #[test]
    fn pencil_poly_congruence(n in 3usize..5, seeds in prop::collection::vec(any::<u64>(), 1..40), mseeds in prop::collection::vec(any::<u64>(), 1..30)) {
        let f = Field::prime(7).unwrap();
        let a1 = symmetric(&f, n, &seeds);
        let a2 = symmetric(&f, n, &seeds.iter().map(|s| s.rotate_left(9)).collect::<Vec<_>>());
        let m = matrix(&f, n, n, &mseeds);
        let d = m.det().unwrap();
        prop_assume!(d.0 != 0);
        let p = Pencil::new(a1.clone(), a2.clone()).unwrap();
        let cong = |x: &Matrix| m.transpose().mul(x).unwrap().mul(&m).unwrap();
        let p2 = Pencil::new(cong(&a1), cong(&a2)).unwrap();
        prop_assert_eq!(p2.pencil_poly(), p.pencil_poly().scale(f.mul(d, d)));
    }

    #[test]
    fn trace_form_classification(shape in prop::collection::vec(1usize..4, 1..4)) {
        let f = Field::prime(11).unwrap();
        let n: usize = shape.iter().sum();
        prop_assume!((3..=7).contains(&n));
        let roots: Vec<(Fe, usize)> = shape.iter().enumerate().map(|(i, &m)| (f.from_int(i as i64 + 1), m)).collect();
        let poly = Polynomial::from_roots(&f, &roots);
        let (q, t, _) = trace_form_fixture(&poly, f.one()).unwrap();
        let p = Pencil::from_operator(&q, &t).unwrap();
        let tag = p.classify().unwrap().tag;
        let expect = if shape.iter().all(|&m| m == 1) { ClassTag::Generic } else { ClassTag::RegularNonGeneric };
        prop_assert_eq!(tag, expect);
    }

    #[test]
    fn descent_drops_a_square(shape in prop::sample::select(vec![vec![2usize, 1, 1], vec![2, 2, 1], vec![3, 1, 1], vec![2, 1, 1, 1], vec![3, 2], vec![4, 1]])) {
        let f = Field::prime(7).unwrap();
        let p = shape_pencil(&f, &shape).unwrap();
        let t = p.self_adjoint_t().unwrap();
        let q = p.q1();
        let ed = p.eigendata().unwrap();
        let d = restrict_and_descend(&q, &t, ed.eigenvector(0)).unwrap();
        let lin = Polynomial::linear(&f, ed.roots[0].0);
        prop_assert_eq!(d.t.charpoly().unwrap().mul(&lin.pow(2)), t.charpoly().unwrap());
        prop_assert!(d.q.is_nondegenerate());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn stab_elements_are_orthogonal_involutions(shape in prop::sample::select(vec![vec![1usize, 1, 1], vec![1, 1, 1, 1, 1], vec![2, 1, 1, 1], vec![2, 2, 1], vec![3, 1, 1], vec![2, 2], vec![1, 1, 2]])) {
        let f = Field::prime(7).unwrap();
        let p = shape_pencil(&f, &shape).unwrap();
        let t = p.self_adjoint_t().unwrap();
        let ed = p.eigendata().unwrap();
        let g = build_stab(&t, &ed, &p.q1(), Flavor::PO).unwrap();
        prop_assert_eq!(g.order(), 1 << ed.r());
        prop_assert!(g.check_product_rule().unwrap());
        let gram = p.a1();
        for e in &g.elements {
            prop_assert_eq!(e.mat.transpose().mul(gram).unwrap().mul(&e.mat).unwrap(), gram.clone());
            prop_assert_eq!(e.mat.mul(&t).unwrap(), t.mul(&e.mat).unwrap());
            let sq = e.mat.mul(&e.mat).unwrap();
            prop_assert!(sq == Matrix::identity(&f, p.n()) || sq == Matrix::identity(&f, p.n()).neg());
            // a scalar on each U_j: one sign outside I, the other on I
            let mut signs = vec![];
            for u in &ed.spaces {
                let b0 = &u.basis()[0];
                let img = e.mat.apply(b0);
                let k = b0.iter().position(|x| x.0 != 0).unwrap();
                let s = f.div(img[k], b0[k]).unwrap();
                prop_assert!(s == f.one() || s == f.neg(f.one()));
                for b in u.basis() {
                    prop_assert_eq!(e.mat.apply(b), b.iter().map(|&x| f.mul(s, x)).collect::<Vec<_>>());
                }
                signs.push(s);
            }
            let outside: Vec<usize> = (0..signs.len()).filter(|j| !e.index_set.contains(j)).collect();
            prop_assert!(!outside.is_empty());
            let s_out = signs[outside[0]];
            for (j, s) in signs.iter().enumerate() {
                prop_assert_eq!(*s == s_out, !e.index_set.contains(&j));
            }
        }
    }

    #[test]
    fn odd_regular_counts(shape in prop::sample::select(vec![vec![1usize, 1, 1], vec![2, 1], vec![3], vec![2, 1, 1, 1], vec![2, 2, 1], vec![3, 1, 1], vec![3, 2], vec![4, 1], vec![1, 1, 1, 1, 1]])) {
        let f = Field::prime(7).unwrap();
        let p = shape_pencil(&f, &shape).unwrap();
        let ed = p.eigendata().unwrap();
        let classes = partition_by_profile(&p).unwrap();
        let total: usize = classes.values().map(|c| c.len()).sum();
        prop_assert_eq!(total, enumerate_common_isotropic(&p, (p.n() - 1) / 2).len());
        for (key, pts) in &classes {
            prop_assert_eq!(pts.len() as u64, expected_class_size(ed.r(), key), "{}", key.label());
        }
    }

    #[test]
    fn pn_dichotomy(shape in prop::sample::select(vec![vec![1usize, 1, 1, 1], vec![1, 1, 2], vec![1, 3], vec![2, 2], vec![4], vec![2, 2, 2], vec![4, 2], vec![2, 1, 1, 1, 1], vec![3, 3]])) {
        let f = Field::prime(7).unwrap();
        let p = shape_pencil(&f, &shape).unwrap();
        let ed = p.eigendata().unwrap();
        let all_even = shape.iter().all(|m| m % 2 == 0);
        let pn = contains_pn(&p).unwrap();
        prop_assert_eq!(pn.is_some(), all_even);
        prop_assert_eq!(geometric_genus(&ed) == -1, all_even);
        if let Some(w) = pn {
            prop_assert!(w.is_isotropic(p.a1()) && w.is_isotropic(p.a2()));
            prop_assert_eq!(w.dim(), p.n() / 2);
        }
        let sets = even_fano_sets_any_genus(&p).unwrap();
        prop_assert_eq!(&sets.f, &sets.f_by_perp);
        // "v not in X" is weaker once the curve is reducible
        if !all_even {
            prop_assert_eq!(&sets.f_by_perp, &sets.f_by_points);
        }
    }

    #[test]
    fn terminal_lines_are_half_the_sign_vectors(shape in prop::sample::select(vec![vec![1usize, 1, 1, 1], vec![1, 1, 2], vec![3, 1], vec![2, 2], vec![4]]), q in prop::sample::select(vec![7u32, 11, 13])) {
        let f = Field::prime(q).unwrap();
        let p = shape_pencil(&f, &shape).unwrap();
        match terminal_even_solver(&p) {
            Ok(sol) => {
                prop_assert_eq!(sol.sign_vectors.len(), 2 * sol.lines.len());
                prop_assert!(sol.excluded_fail_filter);
            }
            Err(pencil_lab::Error::FixtureDegenerate(_)) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }
}
