use super::*;
use crate::calculus::apply_diff;
use crate::poincare::random_element;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn hcurl(v: &PolyFn) -> f64 {
    (v.l2_norm().powi(2) + apply_diff(DiffOp::Curl3d, v).l2_norm().powi(2)).sqrt()
}

#[test]
fn lowest_order_2d_case_matches_hand_computation() {
    // Q_0 ∩ (∇P_1)^⊥ is spanned by (y − 1/3, 1/3 − x): curl = −2 on area 1/2,
    // and ∫(x − 1/3)² = 1/36, so ‖curl u‖² / ‖u‖² = 2 / (1/18) = 36.
    let r = friedrichs_constant(FriedrichsCase::Curl2dFull, 0).unwrap();
    assert_eq!(r.dim, 1);
    assert!((r.min_ratio - 6.0).abs() < 1e-12, "{}", r.min_ratio);
    assert!((r.constant - 1.0 / 6.0).abs() < 1e-12);
}

#[test]
fn gradient_violates_the_constraint() {
    let sub = FriedrichsCase::Curl2dFull.subspace(2).unwrap();
    let w = build_space(&tri(), SpaceKind::W, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g = apply_diff(DiffOp::Grad, &random_element(&w, &mut rng));
    assert!(sub.constraint_residual(&g) > 0.5);
    assert!(!sub.contains(&g, 1e-10));
    let member = PolyFn::new(tri(), sub.parent.degree, 2, sub.basis.row(0).transpose());
    assert!(sub.contains(&member, 1e-10));
}

#[test]
fn rayleigh_quotients_bound_the_minimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in [FriedrichsCase::Curl3dFull, FriedrichsCase::DivBubble] {
        let r = friedrichs_constant(case, 3).unwrap();
        let sub = case.subspace(3).unwrap();
        let d = crate::calculus::ambient_diff(&sub.parent.cell, case.op(), sub.parent.degree);
        for _ in 0..20 {
            let c = DVector::from_fn(sub.dim(), |_, _| rand::Rng::gen_range(&mut rng, -1.0..1.0));
            let u = sub.basis.transpose() * c;
            assert!((&d * &u).norm() / u.norm() >= r.min_ratio * (1.0 - 1e-12));
        }
    }
}

#[test]
fn empty_subspace_is_flagged() {
    let r = friedrichs_constant(FriedrichsCase::Curl3dBubble, 1).unwrap();
    assert!(r.empty);
    assert_eq!(r.constant, 0.0);
    assert!(r.min_ratio.is_infinite());
}

#[test]
fn two_dimensional_constants_are_p_stable() {
    let recs = friedrichs_sweep(&[FriedrichsCase::Curl2dFull, FriedrichsCase::Curl2dBubble], 1, 6).unwrap();
    for case in [FriedrichsCase::Curl2dFull, FriedrichsCase::Curl2dBubble] {
        let c: Vec<f64> = recs.iter().filter(|r| r.case == case && !r.empty).map(|r| r.constant).collect();
        let (lo, hi) = c.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
        assert!(lo > 0.0 && hi / lo <= 2.0, "{case}: {c:?}");
    }
}

#[test]
fn csv_has_the_documented_columns() {
    let recs = friedrichs_sweep(&[FriedrichsCase::Curl2dFull], 0, 1).unwrap();
    let mut buf = Vec::new();
    write_friedrichs_csv(&recs, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("case,p,constant,min_singular_value"));
    assert!(lines.next().unwrap().starts_with("curl2d_i,0,"));
}

#[test]
fn curl_lifting_of_a_gradient_trace_is_curl_free() {
    let p = 2;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let v = random_element(&build_space(&tet(), SpaceKind::W, p as i64).unwrap(), &mut rng);
    let w = apply_diff(DiffOp::Grad, &v);
    let l = discrete_lifting_curl(p, &w).unwrap();
    assert!(apply_diff(DiffOp::Curl3d, &l.element).l2_norm() < 1e-10 * w.l2_norm());
    assert!(l.trace_residual < 1e-10);
    assert!(l.orthogonality_residual < 1e-10);
}

#[test]
fn curl_lifting_properties_on_random_traces() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for p in 1..=3 {
        let q = build_space(&tet(), SpaceKind::Q, p as i64).unwrap();
        let w = random_element(&q, &mut rng);
        let l = discrete_lifting_curl(p, &w).unwrap();
        assert!(l.trace_residual < 1e-10, "p={p} trace {}", l.trace_residual);
        assert!(l.orthogonality_residual < 1e-10, "p={p} orth {}", l.orthogonality_residual);
        assert!(l.multiplier_norm < 1e-10, "p={p} multiplier {}", l.multiplier_norm);
        assert!(l.kkt_min_sigma > 0.0);
        // Minimality among admissible fields: w itself corrected to satisfy the constraint
        // has the same curl as w, so the lifting cannot have more curl energy.
        let cl = apply_diff(DiffOp::Curl3d, &l.element).l2_norm();
        assert!(cl <= apply_diff(DiffOp::Curl3d, &w).l2_norm() * (1.0 + 1e-10));
    }
}

#[test]
fn zero_trace_lifts_to_zero() {
    let q = build_space(&tet(), SpaceKind::Q, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    // A bubble has zero tangential trace.
    let b = random_element(&build_space(&tet(), SpaceKind::QRing, 2).unwrap(), &mut rng);
    let l = discrete_lifting_curl(2, &b).unwrap();
    assert!(l.element.l2_norm() < 1e-12);
    let z = PolyFn::zero(tet(), q.degree, 3);
    assert_eq!(discrete_lifting_curl(2, &z).unwrap().element.l2_norm(), 0.0);
    let zv = PolyFn::zero(tet(), q.degree, 3);
    assert_eq!(discrete_lifting_div(2, &zv).unwrap().element.l2_norm(), 0.0);
}

#[test]
fn div_lifting_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for p in 1..=3 {
        let v = build_space(&tet(), SpaceKind::V, p as i64).unwrap();
        let w = random_element(&v, &mut rng);
        let l = discrete_lifting_div(p, &w).unwrap();
        assert!(l.trace_residual < 1e-10, "p={p} trace {}", l.trace_residual);
        assert!(l.orthogonality_residual < 1e-10, "p={p} orth {}", l.orthogonality_residual);
        assert!(l.multiplier_norm < 1e-10);
        let dl = apply_diff(DiffOp::Div, &l.element);
        let dw = apply_diff(DiffOp::Div, &w);
        assert!(dl.l2_norm() <= dw.l2_norm() * (1.0 + 1e-10));
        // Divergence theorem: the means agree because the normal traces do.
        assert!((dl.coeffs[0] - dw.coeffs[0]).abs() < 1e-10 * dw.l2_norm().max(1.0));
    }
}

#[test]
fn div_lifting_of_a_solenoidal_trace_is_solenoidal() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let q = random_element(&build_space(&tet(), SpaceKind::Q, 2).unwrap(), &mut rng);
    let w = apply_diff(DiffOp::Curl3d, &q);
    let l = discrete_lifting_div(2, &w).unwrap();
    assert!(apply_diff(DiffOp::Div, &l.element).l2_norm() < 1e-10 * w.l2_norm());
}

#[test]
fn x_minus_half_norm_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let q = build_space(&tet(), SpaceKind::Q, 1).unwrap();
    let w = random_element(&q, &mut rng);
    let n1 = x_minus_half_norm(1, &w).unwrap();
    let n3 = x_minus_half_norm(3, &w).unwrap();
    assert!(n1 <= hcurl(&w) * (1.0 + 1e-12));
    assert!(n3 <= n1 * (1.0 + 1e-12), "{n3} > {n1}");
    assert!(n3 > 0.0);
    let z = PolyFn::zero(tet(), q.degree, 3);
    assert_eq!(x_minus_half_norm(2, &z).unwrap(), 0.0);
}

#[test]
fn inf_sup_constants_are_positive() {
    for p in 1..=3 {
        let c = inf_sup_curl(p).unwrap();
        let d = inf_sup_div(p).unwrap();
        assert!(c.beta > 0.1 && c.kkt_min_sigma > 0.0, "{c:?}");
        assert!(d.beta > 0.0 && d.kkt_min_sigma > 0.0, "{d:?}");
    }
}
