use exseq::polyspace::{build_space, SpaceKind};
use exseq::refsimplex::{tet, tri};
use exseq::spectra::{friedrichs_constant, friedrichs_sweep, write_friedrichs_csv, FriedrichsCase};

#[test]
fn lowest_order_constants_by_hand() {
    // p = 0 leaves one or three modes, all computable by hand:
    //   div:    u = x − c,       ‖u‖² = 3/160, div u = 3 → √80
    //   curl2d: u = (x − c)^⊥,   ‖u‖² = 1/18, curl u = 2 → 6
    //   curl3d: u = b × (x − c), worst b gives √40
    let cases = [(FriedrichsCase::DivFull, 80f64.sqrt()), (FriedrichsCase::Curl2dFull, 6.0), (FriedrichsCase::Curl3dFull, 40f64.sqrt())];
    for (case, ratio) in cases {
        let r = friedrichs_constant(case, 0).unwrap();
        assert!((r.min_ratio - ratio).abs() < 1e-10 * ratio, "{case}: {}", r.min_ratio);
        assert!((r.constant * ratio - 1.0).abs() < 1e-10);
    }
}

#[test]
fn constrained_dimensions_follow_the_sequence() {
    // Q ⊥ ∇W has dim Q − (dim W − 1); V ⊥ curl Q has dim V − rank curl = dim W_p.
    for p in 0..=3usize {
        let (w, q) = (build_space(&tet(), SpaceKind::W, p as i64).unwrap(), build_space(&tet(), SpaceKind::Q, p as i64).unwrap());
        let l2 = build_space(&tet(), SpaceKind::L2, p as i64).unwrap();
        assert_eq!(FriedrichsCase::Curl3dFull.subspace(p).unwrap().dim(), q.dim() - (w.dim() - 1));
        assert_eq!(FriedrichsCase::DivFull.subspace(p).unwrap().dim(), l2.dim());
        let (w2, q2) = (build_space(&tri(), SpaceKind::W, p as i64).unwrap(), build_space(&tri(), SpaceKind::Q, p as i64).unwrap());
        assert_eq!(FriedrichsCase::Curl2dFull.subspace(p).unwrap().dim(), q2.dim() - (w2.dim() - 1));
    }
}

#[test]
fn constraints_hold_and_saddles_are_regular() {
    for case in FriedrichsCase::ALL {
        for p in 0..=3 {
            let sub = case.subspace(p).unwrap();
            assert!(sub.residual < 1e-11, "{case} p={p}");
            let r = friedrichs_constant(case, p).unwrap();
            assert!(r.kkt_min_sigma > 0.0, "{case} p={p}: {:e}", r.kkt_min_sigma);
            assert_eq!(r.empty, r.dim == 0);
        }
    }
}

#[test]
fn sweep_constants_are_positive_and_small() {
    let recs = friedrichs_sweep(&FriedrichsCase::ALL, 1, 4).unwrap();
    assert_eq!(recs.len(), 6 * 4);
    for r in recs.iter().filter(|r| !r.empty) {
        assert!(r.constant > 0.0 && r.constant < 1.0, "{} p={}: {}", r.case, r.p, r.constant);
    }
    let mut buf = Vec::new();
    write_friedrichs_csv(&recs, &mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 1 + recs.len());
}
