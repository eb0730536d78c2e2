mod common;

use common::{random_line, random_loxodromic, random_sl2, rc};
use orthocalc_core::gram::{congruence_with_sign, realize, realize_with, GramMatrix, LineConfig, Orientation, Pivoting};
use orthocalc_core::mat2::{axis, conj_by, form, LineMatrix, SL2};
use orthocalc_core::orthinv::{cosh_d_axis, cosh_d_trace, orth_invariant, EdgeHolonomyData};
use orthocalc_core::Tolerances;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn form_is_bilinear_and_symmetric(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (l, m, n) = (random_line(&mut r), random_line(&mut r), random_line(&mut r));
        let a = rc(&mut r);
        let lhs = form(&(l + n.scale(a)), &m);
        let rhs = form(&l, &m) + form(&n, &m) * a;
        prop_assert!((lhs - rhs).norm() < 1e-12);
        prop_assert!((form(&l, &m) - form(&m, &l)).norm() < 1e-14);
        prop_assert!((form(&(-l), &m) + form(&l, &m)).norm() < 1e-15);
    }

    #[test]
    fn form_of_a_line_with_itself_is_its_determinant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let l = LineMatrix::from_coords([rc(&mut r), rc(&mut r), rc(&mut r)]);
        prop_assert!((form(&l, &l) - l.det()).norm() < 1e-12);
    }

    #[test]
    fn form_is_isometry_invariant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (l, m, g) = (random_line(&mut r), random_line(&mut r), random_sl2(&mut r));
        let moved = form(&conj_by(&g, &l), &conj_by(&g, &m));
        prop_assert!((moved - form(&l, &m)).norm() < 1e-12 * (1.0 + form(&l, &m).norm()) * 10.0);
    }

    #[test]
    fn axis_is_fixed_and_equivariant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let tol = Tolerances::default();
        let h = random_loxodromic(&mut r);
        let s = axis(&h, &tol).unwrap();
        prop_assert!(conj_by(&h, &s).dist(&s) < 1e-10);
        prop_assert!((s.det() - 1.0).norm() < 1e-10);
        let g = random_sl2(&mut r);
        let moved = axis(&(g * h * g.inv()), &tol).unwrap();
        let want = conj_by(&g, &s);
        prop_assert!(moved.dist(&want).min(moved.dist(&(-want))) < 1e-8);
        let inv = axis(&h.inv(), &tol).unwrap();
        prop_assert!(inv.dist(&s).min(inv.dist(&(-s))) < 1e-10);
    }

    #[test]
    fn four_lines_satisfy_the_hextet_identity(seed in any::<u64>()) {
        let mut r = rng(seed);
        let lines: Vec<LineMatrix> = (0..4).map(|_| random_line(&mut r)).collect();
        prop_assert!(GramMatrix::of_lines(&lines).det().norm() < 1e-9);
    }

    #[test]
    fn realize_round_trips_and_is_rigid(seed in any::<u64>(), n in 3usize..7) {
        let mut r = rng(seed);
        let lines: Vec<LineMatrix> = (0..n).map(|_| random_line(&mut r)).collect();
        let x = GramMatrix::of_lines(&lines);
        let a = realize(&x, 1e-9).unwrap();
        prop_assert!(a.gram().dist(&x) < 1e-8);
        let order: Vec<usize> = (0..n).rev().collect();
        let b = realize_with(&x, &Pivoting::Ordered(order), 1e-9).unwrap();
        prop_assert!(b.gram().dist(&x) < 1e-8);
        let scale = 1e-8 * a.lines().iter().chain(b.lines()).map(|l| l.mat().norm_max()).fold(1.0, f64::max);
        let same = congruence_with_sign(&a, &b, Orientation::Same, scale);
        let flipped = congruence_with_sign(&a, &b, Orientation::Reversed, scale);
        prop_assert!(same.is_ok() || flipped.is_ok());
    }

    #[test]
    fn congruence_recovers_the_isometry(seed in any::<u64>()) {
        let mut r = rng(seed);
        let src = LineConfig::new((0..4).map(|_| random_line(&mut r)).collect(), 1e-9).unwrap();
        let g = random_sl2(&mut r);
        let dst = src.conj_by(&g);
        let got = congruence_with_sign(&src, &dst, Orientation::Same, 1e-8).unwrap();
        prop_assert!(got.dist_projective(&g) < 1e-9 * (1.0 + g.mat().norm_max()));
    }

    #[test]
    fn trace_and_axis_methods_agree(seed in any::<u64>()) {
        let mut r = rng(seed);
        let tol = Tolerances::default();
        let (h, g) = (random_loxodromic(&mut r), random_sl2(&mut r));
        let a = cosh_d_axis(&h, &g, &tol).unwrap();
        let t = cosh_d_trace(&h, &g, &tol).unwrap();
        prop_assert!((a - t).norm() < 1e-9 * (1.0 + t.norm()));
    }

    #[test]
    fn invariant_ignores_conjugation_and_lift_signs(seed in any::<u64>(), flips in prop::collection::vec(any::<bool>(), 4)) {
        let mut r = rng(seed);
        let tol = Tolerances::default();
        let h = random_loxodromic(&mut r);
        let edges: Vec<SL2> = (0..3).map(|_| random_sl2(&mut r)).collect();
        let base = orth_invariant(&EdgeHolonomyData::new(h, edges.clone(), None).unwrap(), &tol).unwrap();
        let k = random_sl2(&mut r);
        let data = EdgeHolonomyData::new(h, edges.clone(), None).unwrap().conj_by(&k);
        let conj = orth_invariant(&data, &tol).unwrap();
        let bound = 1e-10 * base.coshd.iter().map(|z| 1.0 + z.norm()).fold(1.0, f64::max);
        prop_assert!(base.max_dist(&conj.coshd) < bound * 10.0);
        let h2 = if flips[0] { -h } else { h };
        let e2: Vec<SL2> = edges.iter().zip(&flips[1..]).map(|(g, f)| if *f { -*g } else { *g }).collect();
        let signed = orth_invariant(&EdgeHolonomyData::new(h2, e2, None).unwrap(), &tol).unwrap();
        prop_assert!(base.max_dist(&signed.coshd) < bound);
    }
}

#[test]
fn inverse_of_triangular_matrix() {
    use orthocalc_core::mat2::{c, Mat2};
    let s = c(1.3, -0.4);
    let t = SL2::new(Mat2::new(s, c(1.0, 0.0), c(0.0, 0.0), s.inv())).unwrap();
    let want = Mat2::new(s.inv(), c(-1.0, 0.0), c(0.0, 0.0), s);
    assert!(t.inv().mat().dist(&want) < 1e-15);
    let mut r = rng(5);
    for _ in 0..100 {
        let g = random_sl2(&mut r);
        assert!((g * g.inv()).mat().dist(&Mat2::identity()) < 1e-12);
    }
}

#[test]
fn conjugation_preserves_forms_under_many_isometries() {
    let mut r = rng(6);
    let (l, m) = (random_line(&mut r), random_line(&mut r));
    let x = form(&l, &m);
    let worst = (0..100)
        .map(|_| {
            let g = random_sl2(&mut r);
            (form(&conj_by(&g, &l), &conj_by(&g, &m)) - x).norm()
        })
        .fold(0.0, f64::max);
    assert!(worst < 1e-12, "{worst}");
}
