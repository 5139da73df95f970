use exseq::calculus::{apply_diff, diff_op, DiffOp};
use exseq::linalg::rank;
use exseq::poincare::random_element;
use exseq::polyspace::{build_space, MonoPoly, PolyFn, Ring, SpaceKind};
use exseq::refsimplex::{tet, tri};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn gradient_of_a_monomial() {
    // ∇(x²y + z³) = (2xy, x², 3z²)
    let (x, y, z) = (MonoPoly::var(0), MonoPoly::var(1), MonoPoly::var(2));
    let u = PolyFn::from_monomials(tet(), 3, &[x.clone() * x.clone() * y.clone() + z.clone() * z.clone() * z.clone()]);
    let g = apply_diff(DiffOp::Grad, &u);
    let pt = [0.3, 0.2, 0.1];
    let exact = [2.0 * 0.3 * 0.2, 0.09, 3.0 * 0.01];
    for (a, b) in g.eval(&pt).iter().zip(exact) {
        assert!((a - b).abs() < 1e-13);
    }
}

#[test]
fn curl_and_divergence_of_a_linear_field() {
    // u = (−y, x, 0): curl u = (0, 0, 2), div u = 0.
    let (x, y) = (MonoPoly::var(0), MonoPoly::var(1));
    let u = PolyFn::from_monomials(tet(), 1, &[y.scale(-1.0), x, MonoPoly::constant(0.0)]);
    let c = apply_diff(DiffOp::Curl3d, &u).eval(&[0.2, 0.2, 0.2]);
    assert!(c[0].abs() < 1e-13 && c[1].abs() < 1e-13 && (c[2] - 2.0).abs() < 1e-13);
    assert!(apply_diff(DiffOp::Div, &u).eval(&[0.1, 0.5, 0.2])[0].abs() < 1e-13);
}

#[test]
fn complex_property_on_random_elements() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    // Two derivatives amplify roundoff by up to (n + 1)⁴ on degree n.
    let tol = |u: &PolyFn| 1e-14 * u.l2_norm() * ((u.degree + 1) as f64).powi(4);
    for p in 0..=5 {
        let w = random_element(&build_space(&tet(), SpaceKind::W, p).unwrap(), &mut rng);
        let cg = apply_diff(DiffOp::Curl3d, &apply_diff(DiffOp::Grad, &w));
        assert!(cg.l2_norm() <= tol(&w), "p={p}");
        let q = random_element(&build_space(&tet(), SpaceKind::Q, p).unwrap(), &mut rng);
        let dc = apply_diff(DiffOp::Div, &apply_diff(DiffOp::Curl3d, &q));
        assert!(dc.l2_norm() <= tol(&q));
        let w2 = random_element(&build_space(&tri(), SpaceKind::W, p).unwrap(), &mut rng);
        let cg2 = apply_diff(DiffOp::Curl2dVector, &apply_diff(DiffOp::Grad, &w2));
        assert!(cg2.l2_norm() <= tol(&w2));
        let dc2 = apply_diff(DiffOp::Div, &apply_diff(DiffOp::Curl2dScalar, &w2));
        assert!(dc2.l2_norm() <= tol(&w2));
    }
}

#[test]
fn rank_nullity_along_the_sequence() {
    // Kernels: grad → constants, curl → gradients, div → curls; so on the
    // contractible tetrahedron rank(grad) = dim W − 1 and
    // rank(curl) = dim Q − rank(grad), rank(div) = dim V − rank(curl).
    let t = tet();
    for p in 0..=4 {
        let w = build_space(&t, SpaceKind::W, p).unwrap();
        let q = build_space(&t, SpaceKind::Q, p).unwrap();
        let v = build_space(&t, SpaceKind::V, p).unwrap();
        let l = build_space(&t, SpaceKind::L2, p).unwrap();
        let rg = rank(&diff_op(DiffOp::Grad, &w).unwrap().matrix);
        let rc = rank(&diff_op(DiffOp::Curl3d, &q).unwrap().matrix);
        let rd = rank(&diff_op(DiffOp::Div, &v).unwrap().matrix);
        assert_eq!(rg, w.dim() - 1);
        assert_eq!(rc, q.dim() - rg);
        assert_eq!(rd, v.dim() - rc);
        // div is onto the discontinuous space.
        assert_eq!(rd, l.dim());
    }
}
