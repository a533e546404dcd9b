use daff_core::atlas::{cocycle_check, random_atlas, Side, TransitionData};
use daff_core::double::{
    adjoint_duality_check, aff1, aff2, hvh_iso, interchange_holds, special_dual_horizontal, special_dual_vertical,
    DecomposedDouble, DoubleAffine, DoubleMorphism, DoublePoint,
};
use daff_core::exact::{frac, int, BaseMap, Matrix, Poly, Ring, Scalar, Vector};
use daff_core::naffine::{compose_maps, filtration_violation, random_filtered_map, GradedSpace, NAffine};
use daff_core::random::{self, trial_rng};
use proptest::prelude::*;

fn scalar() -> impl Strategy<Value = Scalar> {
    (-9i64..=9, 1i64..=5).prop_map(|(n, d)| frac(n, d))
}

fn poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec((prop::collection::vec(0u32..3, 0..3), scalar()), 0..5).prop_map(Poly::from_terms)
}

fn dims() -> impl Strategy<Value = DecomposedDouble> {
    (1usize..=3, 1usize..=3, 1usize..=3).prop_map(|(a, b, c)| DecomposedDouble::new(a, b, c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn polys_form_a_commutative_ring(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in poly(), b in poly(), x in scalar(), y in scalar()) {
        let pt = [x, y];
        let (va, vb) = (a.eval(&pt).unwrap(), b.eval(&pt).unwrap());
        prop_assert_eq!(a.add(&b).eval(&pt).unwrap(), &va + &vb);
        prop_assert_eq!(a.mul(&b).eval(&pt).unwrap(), va * vb);
    }

    #[test]
    fn composition_commutes_with_evaluation(a in poly(), s in poly(), t in poly(), x in scalar(), y in scalar()) {
        let pt = [x, y];
        let inner = [s.eval(&pt).unwrap(), t.eval(&pt).unwrap()];
        prop_assert_eq!(a.compose(&[s, t]).unwrap().eval(&pt).unwrap(), a.eval(&inner).unwrap());
    }

    #[test]
    fn matrix_inverse_and_kernel(seed in any::<u64>(), n in 1usize..=4) {
        let mut rng = trial_rng(seed, 0);
        let m = random::invertible(&mut rng, n);
        prop_assert_eq!(m.mul(&m.inverse().unwrap()).unwrap(), Matrix::identity(n));
        let r = random::matrix(&mut rng, n, n + 1);
        let k = r.kernel();
        prop_assert_eq!(k.cols() + r.rank(), n + 1);
        prop_assert!(r.mul(&k).unwrap().is_zero());
    }

    #[test]
    fn base_maps_compose_and_invert(seed in any::<u64>(), m in 1usize..=3) {
        let mut rng = trial_rng(seed, 0);
        let f = BaseMap::new(random::invertible(&mut rng, m), random::vector(&mut rng, m)).unwrap();
        let g = BaseMap::new(random::invertible(&mut rng, m), random::vector(&mut rng, m)).unwrap();
        let x = random::vector(&mut rng, m);
        prop_assert_eq!(f.then(&g).unwrap().apply(&x).unwrap(), g.apply(&f.apply(&x).unwrap()).unwrap());
        prop_assert_eq!(f.inverse().unwrap().apply(&f.apply(&x).unwrap()).unwrap(), x);
    }

    #[test]
    fn aff_endpoints(d in dims(), seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 0);
        let p = d.random_point(&mut rng);
        let q = DoublePoint::new(p.y.clone(), d.random_point(&mut rng).z, d.random_point(&mut rng).c);
        prop_assert_eq!(aff1(&p, &q, &int(1)).unwrap(), p.clone());
        prop_assert_eq!(aff1(&p, &q, &int(0)).unwrap(), q);
        let r = DoublePoint::new(d.random_point(&mut rng).y, p.z.clone(), p.c.clone());
        prop_assert_eq!(aff2(&p, &r, &int(0)).unwrap(), r);
    }

    #[test]
    fn interchange_on_random_squares(seed in any::<u64>(), special in any::<bool>()) {
        let mut rng = trial_rng(seed, 0);
        let a = DoubleAffine::random(&mut rng, (3, 3, 3), special);
        let pts: Vec<DoublePoint> = (0..4).map(|_| a.random_point(&mut rng)).collect();
        let (l, m) = (random::rational(&mut rng), random::rational(&mut rng));
        prop_assert!(interchange_holds(&pts[0], &pts[1], &pts[2], &pts[3], &l, &m).unwrap());
        prop_assert_eq!(a.structure_check(&mut rng).unwrap(), None);
    }

    #[test]
    fn flip_and_adjoint_are_involutions(seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 0);
        let a = DoubleAffine::random(&mut rng, (3, 3, 3), true);
        prop_assert_eq!(a.flip().flip(), a.clone());
        prop_assert_eq!(a.adjoint().unwrap().adjoint().unwrap(), a.clone());
        prop_assert_eq!(a.flip().space().dims(), (a.space().n2, a.space().n1, a.space().n3));
    }

    #[test]
    fn special_duals(seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 0);
        let a = DoubleAffine::random(&mut rng, (3, 3, 3), true);
        let v = special_dual_vertical(&a).unwrap();
        let h = special_dual_horizontal(&a).unwrap();
        let (n1, n2, n3) = a.space().dims();
        prop_assert_eq!(v.space().dims(), (n1, n3, n2));
        prop_assert_eq!(h.space().dims(), (n3, n2, n1));
        prop_assert!(hvh_iso(&a).unwrap().ok());
        prop_assert_eq!(adjoint_duality_check(&a, &mut rng, 3).unwrap(), None);
    }

    #[test]
    fn morphisms_compose_and_invert(d in dims(), seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 0);
        let f = DoubleMorphism::random(&mut rng, d, true);
        let g = DoubleMorphism::random(&mut rng, d, true);
        let p = d.random_point(&mut rng);
        prop_assert_eq!(f.then(&g).unwrap().apply(&p).unwrap(), g.apply(&f.apply(&p).unwrap()).unwrap());
        prop_assert_eq!(f.inverse().unwrap().apply(&f.apply(&p).unwrap()).unwrap(), p);
    }

    #[test]
    fn transition_inverse_is_two_sided(seed in any::<u64>(), m in 1usize..=2) {
        let mut rng = trial_rng(seed, 0);
        let d = DecomposedDouble::new(2, 1, 2);
        let atlas = random_atlas(&mut rng, 2, m, d).unwrap();
        let (_, e) = atlas.edges().next().unwrap();
        let t: &TransitionData = &e.data;
        let id = t.compose(&t.inverse().unwrap()).unwrap();
        prop_assert_eq!(id.first_difference(&TransitionData::identity(m, d)), None);
        let v12 = t.linearize_along(Side::One).linearize_along(Side::Two);
        let v21 = t.linearize_along(Side::Two).linearize_along(Side::One);
        prop_assert_eq!(v12.first_difference(&v21), None);
    }

    #[test]
    fn random_atlases_satisfy_cocycle(seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 0);
        let atlas = random_atlas(&mut rng, 3, 1, DecomposedDouble::new(1, 2, 1)).unwrap();
        prop_assert!(cocycle_check(&atlas).passed());
        prop_assert!(cocycle_check(&atlas.induce_model()).passed());
        prop_assert!(cocycle_check(&atlas.induce_hull()).passed());
    }

    #[test]
    fn filtered_maps_are_closed_under_composition(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = trial_rng(seed, 0);
        let s = GradedSpace::random(&mut rng, n, 2);
        let f = random_filtered_map(&mut rng, &s);
        let g = random_filtered_map(&mut rng, &s);
        prop_assert_eq!(filtration_violation(&s, &s, &f).unwrap(), None);
        prop_assert_eq!(filtration_violation(&s, &s, &compose_maps(&f, &g).unwrap()).unwrap(), None);
    }

    #[test]
    fn naffine_points_lie_on_level_sets(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = trial_rng(seed, 0);
        let space = GradedSpace::random(&mut rng, n, 2);
        let a = NAffine::random(&mut rng, space, n > 1);
        let p = a.random_point(&mut rng);
        prop_assert!(a.contains(&p).unwrap());
        prop_assert!(a.values(&p).unwrap().iter().all(|v| *v == Scalar::one()));
    }
}

#[test]
fn only_degree_raising_maps_are_rejected() {
    // On n = 1 with one coordinate of degree 1, x ↦ x² raises the degree.
    let mut rng = trial_rng(0, 0);
    let s = GradedSpace::random(&mut rng, 1, 1);
    let square = vec![Poly::var(0).mul(&Poly::var(0))];
    assert!(filtration_violation(&s, &s, &square).unwrap().is_some());
    let shifted = vec![Poly::var(0).add(&Poly::constant(int(1)))];
    assert!(filtration_violation(&s, &s, &shifted).unwrap().is_none());
    let linear = vec![Poly::var(0).scale(&int(3))];
    assert!(filtration_violation(&s, &s, &linear).unwrap().is_none());
}

#[test]
fn exact_rationals_do_not_round() {
    let third = frac(1, 3);
    let v = Vector::new(vec![third.clone(), third.clone(), third]);
    assert_eq!(v.dot(&Vector::from_ints(&[1, 1, 1])).unwrap(), int(1));
}
