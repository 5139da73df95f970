use exseq::projectors::Operator;
use exseq::studies::output::write_study_csv;
use exseq::studies::suites::{fields_for, scalar_fields};
use exseq::studies::{dims_table, fit_slope, parse_config_text, run_convergence, StudyConfig, StudyOutput, SuiteKind};

fn sweep(ops: &[Operator], suite: SuiteKind, p_max: usize, s: &[f64]) -> StudyOutput {
    let cfg = StudyConfig { operators: ops.to_vec(), p_min: 1, p_max, suite, s_values: s.to_vec(), ..StudyConfig::default() };
    run_convergence(&cfg).unwrap()
}

fn local_slope(a: (usize, f64), b: (usize, f64)) -> f64 {
    (b.1 / a.1).ln() / (b.0 as f64 / a.0 as f64).ln()
}

#[test]
fn slope_fit_recovers_power_laws() {
    let ps = [2, 3, 4, 6, 8];
    let vals: Vec<f64> = ps.iter().map(|&p| 3.0 * (p as f64).powf(-2.5)).collect();
    assert!((fit_slope(&ps, &vals) + 2.5).abs() < 1e-12);
}

#[test]
fn entire_fields_decay_superalgebraically() {
    let out = sweep(&[Operator::Grad2d], SuiteKind::Entire, 10, &[0.0]);
    let e: Vec<(usize, f64)> = out.records.iter().map(|r| (r.p, r.error)).collect();
    let early = local_slope(e[1], e[3]);
    let late = local_slope(e[7], e[9]);
    // No fixed algebraic rate: the log-log slope keeps steepening.
    assert!(late < early - 4.0, "early {early}, late {late}");
    assert!(out.records.iter().all(|r| r.ratio <= 10.0 && !r.flagged));
}

#[test]
fn singular_fields_decay_algebraically() {
    let out = sweep(&[Operator::Grad2d, Operator::Grad1d], SuiteKind::Singular(1.5), 10, &[0.0]);
    for op in ["grad2d", "grad1d"] {
        let sl = out.slopes.iter().find(|s| s.operator == op && s.quantity == "error").unwrap();
        assert!((-4.0..-1.5).contains(&sl.slope), "{op}: {}", sl.slope);
    }
    assert!(out.records.iter().all(|r| r.ratio <= 10.0));
}

#[test]
fn polynomials_are_reproduced() {
    // Suite degrees ≤ 4, so from p = 3 on every target contains the field.
    let out = sweep(&[Operator::Grad3d, Operator::Curl3d, Operator::Div3d, Operator::Grad2d], SuiteKind::Polynomial, 4, &[0.0]);
    for r in out.records.iter().filter(|r| r.p >= 3) {
        assert!(r.error < 1e-9, "{} p={}: {}", r.operator, r.p, r.error);
    }
}

#[test]
fn records_carry_their_denominators() {
    let out = sweep(&[Operator::Curl2d, Operator::L2_2d], SuiteKind::Entire, 4, &[0.0, 0.5]);
    for r in &out.records {
        assert!(r.error >= 0.0 && r.best > 0.0);
        assert!((r.ratio - r.error / r.best).abs() <= 1e-14 * r.ratio);
    }
    // Sorted by (operator, field, s, p).
    let keys: Vec<_> = out.records.iter().map(|r| (r.operator.clone(), r.field.clone(), r.s, r.p)).collect();
    let mut sorted = keys.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(keys, sorted);
}

#[test]
fn runs_are_deterministic() {
    let render = || {
        let mut buf = Vec::new();
        write_study_csv(&sweep(&[Operator::Grad2d, Operator::Curl2d], SuiteKind::Entire, 4, &[0.0, 1.0]), &mut buf).unwrap();
        buf
    };
    assert_eq!(render(), render());
}

#[test]
fn config_validation() {
    let bad = StudyConfig { p_min: 5, p_max: 3, ..StudyConfig::default() };
    assert!(run_convergence(&bad).is_err());
    let bad = StudyConfig { operators: vec![Operator::Grad3d], s_values: vec![1.5], ..StudyConfig::default() };
    assert!(run_convergence(&bad).is_err());
    let bad = StudyConfig { operators: vec![Operator::Grad3d], p_max: 40, ..StudyConfig::default() };
    assert!(run_convergence(&bad).is_err());
    let pairs = parse_config_text("# study\n--p-max = 4\noperator=curl3d\n\n").unwrap();
    assert_eq!(pairs, [("p-max".to_string(), "4".to_string()), ("operator".to_string(), "curl3d".to_string())]);
    assert!(parse_config_text("p-max 4").is_err());
}

#[test]
fn suites_declare_smoothness() {
    let names: Vec<String> = scalar_fields(SuiteKind::Singular(0.75), 3).into_iter().map(|f| f.name).collect();
    assert_eq!(names, ["r_pow_0.75"]);
    for op in Operator::ALL {
        for kind in [SuiteKind::Polynomial, SuiteKind::Entire, SuiteKind::Singular(1.5)] {
            let fs = fields_for(op, kind);
            assert!(!fs.is_empty());
            assert!(fs.iter().all(|f| f.value_dim == op.target(1).unwrap().value_dim));
        }
    }
}

#[test]
fn dims_table_is_complete() {
    let rows = dims_table(0, 2).unwrap();
    assert_eq!(rows.len(), 3 * 16);
    assert!(rows.iter().all(|r| r.matches));
}
