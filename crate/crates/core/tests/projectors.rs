use exseq::calculus::{apply_diff, DiffOp};
use exseq::poincare::random_element;
use exseq::polyspace::{eval_table, PolyFn};
use exseq::projectors::{apply_1d, build_plan, interpolate, Operator};
use exseq::refsimplex::{edge, quadrature};
use exseq::sobolev::{l2_projection, AnalyticField, Smoothness};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn scalar() -> AnalyticField {
    AnalyticField::new("s", 1, Smoothness::Entire, |v| vec![(v[0] * 1.5 - v[1]).exp() * (v[2] * 2.0 + 0.3).cos()])
}

fn vector() -> AnalyticField {
    AnalyticField::new("v", 3, Smoothness::Entire, |v| vec![(v[1] * 2.0).sin(), (v[0] - v[2]).exp(), (v[0] * v[1]).cos() + v[2] * v[2]])
}

fn rel(a: &PolyFn, b: &PolyFn) -> f64 {
    let n = a.degree.max(b.degree);
    a.at_degree(n).sub(&b.at_degree(n)).l2_norm() / b.l2_norm().max(1e-300)
}

#[test]
fn gradient_commutes() {
    for p in 1..=4 {
        let lhs = apply_diff(DiffOp::Grad, &interpolate(Operator::Grad3d, p, &scalar()).unwrap().element);
        let rhs = interpolate(Operator::Curl3d, p, &scalar().grad(3)).unwrap().element;
        assert!(rel(&lhs, &rhs) < 1e-9, "p={p}");
    }
}

#[test]
fn curl_and_div_commute() {
    for p in 0..=3 {
        let lhs = apply_diff(DiffOp::Curl3d, &interpolate(Operator::Curl3d, p, &vector()).unwrap().element);
        let rhs = interpolate(Operator::Div3d, p, &vector().curl()).unwrap().element;
        assert!(rel(&lhs, &rhs) < 1e-9, "curl p={p}");
        let lhs = apply_diff(DiffOp::Div, &interpolate(Operator::Div3d, p, &vector()).unwrap().element);
        let rhs = interpolate(Operator::L2_3d, p, &vector().div(3)).unwrap().element;
        assert!(rel(&lhs, &rhs) < 1e-9, "div p={p}: {:e}", rel(&lhs, &rhs));
    }
}

#[test]
fn l2_operator_is_the_l2_projection() {
    let p = 3;
    let pi = interpolate(Operator::L2_3d, p, &scalar()).unwrap().element;
    let target = Operator::L2_3d.target(p).unwrap();
    let proj = l2_projection(&target, &scalar()).unwrap();
    assert!(rel(&pi, &proj) < 1e-12);
}

#[test]
fn projections_fix_their_targets() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for op in Operator::ALL {
        let p = 3;
        let u = random_element(&op.target(p).unwrap(), &mut rng);
        let pi = build_plan(op, p).unwrap().apply(&u).unwrap();
        assert!(rel(&pi.element, &u) < 1e-10, "{op}");
        let again = build_plan(op, p).unwrap().apply(&pi.element).unwrap();
        assert!(rel(&again.element, &pi.element) < 1e-10, "{op} idempotence");
    }
}

/// L² projection onto P_n(−1, 1) by a rule well beyond the field's needs.
fn l2_projection_1d(f: &AnalyticField, n: usize) -> PolyFn {
    let q = quadrature(&edge(), 30).unwrap();
    let t = eval_table(&edge(), n, &q.points);
    let c = nalgebra::DVector::from_fn(t.ncols(), |j, _| (0..q.len()).map(|i| q.weights[i] * t[(i, j)] * f.eval_vec(&q.points[i])[0]).sum());
    PolyFn::new(edge(), n, 1, c)
}

#[test]
fn one_dimensional_operator() {
    let u = AnalyticField::new("u", 1, Smoothness::Entire, |v| vec![(v[0] * 3.0).sin() + v[0] * v[0]]);
    let at = |f: &dyn Fn(&[f64; 3]) -> Vec<f64>, x: f64| f(&[x, 0.0, 0.0])[0];
    // p = 1 is linear interpolation through the endpoints.
    let pi = apply_1d(1, &u).unwrap().element;
    let (a, b) = (at(&|x| u.eval_vec(x), -1.0), at(&|x| u.eval_vec(x), 1.0));
    for x in [-0.7, 0.0, 0.4] {
        assert!((at(&|y| pi.eval(y), x) - (a * (1.0 - x) + b * (1.0 + x)) / 2.0).abs() < 1e-13);
    }
    // In general (Π u)' is the L² projection of u' onto P_{p-1}.
    for p in 2..=8 {
        let pi = apply_1d(p, &u).unwrap().element;
        let d = apply_diff(DiffOp::Grad, &pi);
        let proj = l2_projection_1d(&u.grad(1), p - 1);
        assert!(rel(&d, &proj) < 1e-11, "p={p}: {:e}", rel(&d, &proj));
        for x in [-1.0, 1.0] {
            assert!((at(&|y| pi.eval(y), x) - at(&|y| u.eval_vec(y), x)).abs() < 1e-13);
        }
    }
}

#[test]
fn degree_zero_1d_is_rejected() {
    assert!(build_plan(Operator::Grad1d, 0).is_err());
}

#[test]
fn entire_suite_commutes_to_the_quadrature_floor() {
    let suite = exseq::studies::suites::field_suite(exseq::studies::SuiteKind::Entire);
    for p in 0..=3 {
        let rep = exseq::projectors::check_commuting(p, &suite, 1e-7).unwrap();
        for l in rep.failures() {
            panic!("{} = {:e}", l.name, l.measured);
        }
    }
}
