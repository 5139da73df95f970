use exseq::calculus::{apply_diff, DiffOp};
use exseq::poincare::{helmholtz_curl, helmholtz_div, random_element, PoincareKind, RegularizedInverse};
use exseq::polyspace::{build_space, SpaceKind};
use exseq::refsimplex::{quadrature, tet, tri};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn bump_has_unit_mass() {
    for (cell, kind) in [(tet(), PoincareKind::Grad), (tri(), PoincareKind::Grad2d)] {
        let r = RegularizedInverse::new(cell.clone(), kind);
        // θ is only C⁵ across the sphere, so a cell rule converges slowly.
        let q = quadrature(&cell, 40).unwrap();
        let mass: f64 = q.points.iter().zip(&q.weights).map(|(x, w)| w * r.theta(x)).sum();
        assert!((mass - 1.0).abs() < 1e-3, "{mass}");
        // The ball rule carries θ in its weights and is exact for constants.
        let ball: f64 = r.ball_rule(4).iter().map(|(_, w)| w).sum();
        assert!((ball - 1.0).abs() < 1e-12);
    }
}

#[test]
fn inverse_of_gradient_recovers_the_gradient() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for p in 1..=5 {
        let phi = random_element(&build_space(&tet(), SpaceKind::W, p).unwrap(), &mut rng);
        let g = apply_diff(DiffOp::Grad, &phi);
        let back = RegularizedInverse::new(tet(), PoincareKind::Grad).apply(&g).unwrap();
        let err = apply_diff(DiffOp::Grad, &back).sub(&g).l2_norm();
        assert!(err <= 1e-10 * g.l2_norm(), "p={p}: {err}");
    }
}

#[test]
fn curl_inverse_preserves_nedelec_degree() {
    // R^curl maps div-free V_p into Q_p.
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let p = 3;
    let q = build_space(&tet(), SpaceKind::Q, p).unwrap();
    let w = apply_diff(DiffOp::Curl3d, &random_element(&q, &mut rng));
    let z = RegularizedInverse::new(tet(), PoincareKind::Curl3d).apply(&w).unwrap();
    assert!(apply_diff(DiffOp::Curl3d, &z).sub(&w).l2_norm() <= 1e-10 * w.l2_norm());
    let (_, residual) = q.coords_of(&z);
    assert!(residual < 1e-10);
}

#[test]
fn helmholtz_splits_reconstruct() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for p in 0..=4 {
        let u = random_element(&build_space(&tet(), SpaceKind::Q, p).unwrap(), &mut rng);
        let s = helmholtz_curl(&u).unwrap();
        assert!(s.residual < 1e-9);
        // curl z carries all of curl u.
        let dc = apply_diff(DiffOp::Curl3d, &s.z).sub(&apply_diff(DiffOp::Curl3d, &u));
        assert!(dc.l2_norm() <= 1e-9 * u.l2_norm().max(1.0));
        let v = random_element(&build_space(&tet(), SpaceKind::V, p).unwrap(), &mut rng);
        assert!(helmholtz_div(&v).unwrap().residual < 1e-9);
        let u2 = random_element(&build_space(&tri(), SpaceKind::Q, p).unwrap(), &mut rng);
        assert!(helmholtz_curl(&u2).unwrap().residual < 1e-9);
    }
}
