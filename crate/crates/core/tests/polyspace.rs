use exseq::polyspace::{build_space, eval_table, n_poly, MonoPoly, PolyFn, Ring, SpaceKind};
use exseq::refsimplex::{edge, quadrature, tet, tri};

/// Textbook dimensions with k = p + 1 the element order.
fn textbook(dim: usize, kind: SpaceKind, p: usize) -> usize {
    let k = p + 1;
    match (dim, kind) {
        (3, SpaceKind::W) => (k + 1) * (k + 2) * (k + 3) / 6,
        (3, SpaceKind::Q) => k * (k + 2) * (k + 3) / 2,
        (3, SpaceKind::V) => k * (k + 1) * (k + 3) / 2,
        (3, SpaceKind::L2) => (p + 1) * (p + 2) * (p + 3) / 6,
        (2, SpaceKind::W) => (k + 1) * (k + 2) / 2,
        (2, SpaceKind::Q) => k * (k + 2),
        // Top of the planar complex W → Q → V: discontinuous P_p.
        (2, SpaceKind::V) => (p + 1) * (p + 2) / 2,
        (1, SpaceKind::W) => k + 1,
        _ => unreachable!(),
    }
}

#[test]
fn nedelec_and_raviart_thomas_dimensions() {
    let cases = [
        (3, SpaceKind::W),
        (3, SpaceKind::Q),
        (3, SpaceKind::V),
        (3, SpaceKind::L2),
        (2, SpaceKind::W),
        (2, SpaceKind::Q),
        (2, SpaceKind::V),
        (1, SpaceKind::W),
    ];
    for p in 0..=5 {
        for (d, kind) in cases {
            let cell = match d {
                3 => tet(),
                2 => tri(),
                _ => edge(),
            };
            assert_eq!(build_space(&cell, kind, p as i64).unwrap().dim(), textbook(d, kind, p), "{d}d {kind} p={p}");
        }
    }
    // Lowest order: 6 Nédélec edges, 4 Raviart-Thomas faces.
    assert_eq!(build_space(&tet(), SpaceKind::Q, 0).unwrap().dim(), 6);
    assert_eq!(build_space(&tet(), SpaceKind::V, 0).unwrap().dim(), 4);
}

#[test]
fn bubbles_vanish_for_low_degree() {
    // Interior H¹ bubbles need the cubic λ0λ1λ2λ3 times P_{p-3}.
    for p in 0..=5usize {
        let d = build_space(&tet(), SpaceKind::WRing, p as i64).unwrap().dim();
        let expect = if p + 1 >= 4 { (p - 2) * (p - 1) * p / 6 } else { 0 };
        assert_eq!(d, expect, "p={p}");
    }
}

#[test]
fn ambient_basis_is_l2_orthonormal() {
    for cell in [tet(), tri(), edge()] {
        let n = 6;
        let q = quadrature(&cell, 2 * n).unwrap();
        let t = eval_table(&cell, n, &q.points);
        let w = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(q.weights.clone()));
        let g = t.transpose() * w * &t;
        let m = n_poly(cell.dim, n);
        assert!((g - nalgebra::DMatrix::identity(m, m)).amax() < 1e-12);
    }
}

#[test]
fn monomials_round_trip() {
    let (x, y, z) = (MonoPoly::var(0), MonoPoly::var(1), MonoPoly::var(2));
    let m = x.clone() * x.clone() * y.clone() + z.scale(3.0) - y.clone();
    let f = PolyFn::from_monomials(tet(), 3, &[m.clone()]);
    for pt in [[0.1, 0.2, 0.3], [0.5, 0.25, 0.0], [0.0, 0.0, 1.0]] {
        assert!((f.eval(&pt)[0] - m.eval(&pt)).abs() < 1e-13);
    }
}

#[test]
fn hierarchy_contains_lower_degrees() {
    let cell = tet();
    let lo = build_space(&cell, SpaceKind::Q, 2).unwrap();
    let hi = build_space(&cell, SpaceKind::Q, 3).unwrap();
    for i in 0..lo.dim() {
        let mut c = nalgebra::DVector::zeros(lo.dim());
        c[i] = 1.0;
        let f = lo.element(&c).at_degree(hi.degree);
        let (_, residual) = hi.coords_of(&f);
        assert!(residual < 1e-12);
    }
}
