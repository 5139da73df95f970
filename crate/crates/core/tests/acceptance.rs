//! One pass/fail line per acceptance criterion. Runs without the libtest
//! harness so the lines always reach the terminal; exits nonzero on failure.

use exseq::calculus::check_exact_sequence;
use exseq::poincare::{check_helmholtz, check_poincare};
use exseq::polyspace::{closed_form_dim, SpaceKind};
use exseq::projectors::{apply_1d, check_commuting, check_projection, Operator};
use exseq::report::Report;
use exseq::studies::output::{write_study_csv, write_verification_csv};
use exseq::studies::suites::{field_suite, mixed_1d, DEFAULT_ALPHA};
use exseq::studies::verify::{count_identities, friedrichs_window, PROJECTION_SAMPLES};
use exseq::studies::{dims_table, run_convergence, run_verification, StudyConfig, StudyOutput, SuiteKind};
use exseq::Result;
use std::time::Instant;

const P_MAX: usize = 8;
const SEED: u64 = 7;

struct Outcome {
    pass: bool,
    detail: String,
}

fn from_report(rep: &Report) -> Outcome {
    let worst = rep.failures().first().map(|l| format!("; first failure {} = {:e} (limit {:e})", l.name, l.measured, l.threshold));
    Outcome { pass: rep.passed(), detail: format!("{} checks{}", rep.lines.len(), worst.unwrap_or_default()) }
}

fn over_p(f: impl Fn(usize) -> Result<Report>) -> Result<Report> {
    let mut rep = Report::default();
    for p in 0..=P_MAX {
        rep.extend(f(p)?);
    }
    Ok(rep)
}

fn dimension_counts() -> Result<Outcome> {
    let mut rep = over_p(count_identities)?;
    for p in 0..=P_MAX {
        let w = closed_form_dim(3, SpaceKind::W, p).unwrap();
        rep.push(exseq::report::CheckLine::equal(format!("W.closed.p{p}"), w, (p + 4) * (p + 3) * (p + 2) / 6));
    }
    for r in dims_table(0, P_MAX)? {
        rep.push(exseq::report::CheckLine::equal(format!("dims.{}.p{}", r.space, r.p), r.dim, r.closed_form));
    }
    Ok(from_report(&rep))
}

fn exact_sequences() -> Result<Outcome> {
    Ok(from_report(&over_p(check_exact_sequence)?))
}

fn projections() -> Result<Outcome> {
    let rep = over_p(|p| {
        let mut rep = Report::default();
        for op in Operator::ALL {
            if op == Operator::Grad1d && p == 0 {
                continue;
            }
            rep.push(check_projection(op, p, PROJECTION_SAMPLES, SEED, 1e-9)?);
        }
        Ok(rep)
    })?;
    Ok(from_report(&rep))
}

fn commuting() -> Result<Outcome> {
    let poly = field_suite(SuiteKind::Polynomial);
    let entire = field_suite(SuiteKind::Entire);
    let rep = over_p(|p| {
        let mut rep = check_commuting(p, &poly, 1e-9)?;
        rep.extend(check_commuting(p, &entire, 1e-7)?);
        Ok(rep)
    })?;
    Ok(from_report(&rep))
}

fn poincare() -> Result<Outcome> {
    Ok(from_report(&over_p(|p| check_poincare(p, SEED))?))
}

fn helmholtz() -> Result<Outcome> {
    Ok(from_report(&over_p(|p| check_helmholtz(p, SEED))?))
}

fn friedrichs() -> Result<Outcome> {
    Ok(from_report(&friedrichs_window(0, P_MAX)?))
}

fn slope_of(out: &StudyOutput, op: &str, s: f64, quantity: &str) -> Option<f64> {
    out.slopes.iter().find(|l| l.operator == op && l.s == s && l.quantity == quantity).map(|l| l.slope)
}

fn rates() -> Result<Outcome> {
    let base = StudyConfig { p_min: 2, p_max: 10, suite: SuiteKind::Entire, s_values: vec![0.0], ..StudyConfig::default() };
    let all = run_convergence(&base)?;
    let worst = all.records.iter().map(|r| r.ratio).fold(0.0f64, |a, b| if b.is_nan() { f64::NAN } else { a.max(b) });
    let curl = slope_of(&all, "curl3d", 0.0, "ratio").unwrap_or(f64::NAN);

    let grad = run_convergence(&StudyConfig { operators: vec![Operator::Grad3d], s_values: vec![0.0, 0.5, 1.0], ..base })?;
    let gap = slope_of(&grad, "grad3d", 1.0, "gap").unwrap_or(f64::NAN);
    let stability = grad.records.iter().map(|r| r.stability).fold(0.0f64, f64::max);

    let pass = worst <= 10.0 && curl <= -0.5 && gap <= -0.5 && stability <= 0.05;
    let detail =
        format!("max ratio {worst:.3} (limit 10); curl3d ratio slope {curl:.3} (limit -0.5); grad3d gap slope {gap:.3} (limit -0.5); P-stability {stability:.2e} (limit 5e-2)");
    Ok(Outcome { pass, detail })
}

fn one_d() -> Result<Outcome> {
    let mut endpoint: f64 = 0.0;
    for p in 1..=exseq::studies::convergence::MAX_P_1D {
        for u in mixed_1d(DEFAULT_ALPHA) {
            let pi = apply_1d(p, &u)?;
            for x in [-1.0, 1.0] {
                let pt = [x, 0.0, 0.0];
                endpoint = endpoint.max((pi.element.eval(&pt)[0] - u.eval_vec(&pt)[0]).abs());
            }
        }
    }
    let mut ratio: f64 = 0.0;
    for suite in [SuiteKind::Entire, SuiteKind::Singular(DEFAULT_ALPHA)] {
        let cfg = StudyConfig {
            operators: vec![Operator::Grad1d],
            p_min: 1,
            p_max: exseq::studies::convergence::MAX_P_1D,
            suite,
            ..StudyConfig::default()
        };
        for r in run_convergence(&cfg)?.records {
            ratio = if r.ratio.is_nan() { f64::NAN } else { ratio.max(r.ratio) };
        }
    }
    let pass = endpoint <= 1e-12 && ratio <= 5.0;
    Ok(Outcome { pass, detail: format!("endpoint error {endpoint:.2e} (limit 1e-12); max H1 ratio {ratio:.3} (limit 5)") })
}

fn determinism() -> Result<Outcome> {
    let verify = || -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        write_verification_csv(&run_verification(0, 3, SEED)?, &mut buf)?;
        Ok(buf)
    };
    let study = || -> Result<Vec<u8>> {
        let cfg = StudyConfig { p_min: 1, p_max: 4, s_values: vec![0.0, 1.0], seed: SEED, ..StudyConfig::default() };
        let mut buf = Vec::new();
        write_study_csv(&run_convergence(&cfg)?, &mut buf)?;
        Ok(buf)
    };
    let (v1, v2) = (verify()?, verify()?);
    let (s1, s2) = (study()?, study()?);
    let pass = v1 == v2 && s1 == s2;
    Ok(Outcome { pass, detail: format!("verify {} bytes, convergence {} bytes, identical: {}", v1.len(), s1.len(), pass) })
}

fn main() {
    let criteria: [(&str, fn() -> Result<Outcome>); 10] = [
        ("dimension and condition counts", dimension_counts),
        ("exact sequences", exact_sequences),
        ("projection property", projections),
        ("commuting diagrams", commuting),
        ("Poincaré identities", poincare),
        ("Helmholtz reconstructions", helmholtz),
        ("discrete Friedrichs stability", friedrichs),
        ("rate ratios", rates),
        ("1D operator", one_d),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let out = run().unwrap_or_else(|e| Outcome { pass: false, detail: format!("error: {e}") });
        failed += usize::from(!out.pass);
        println!("criterion {:>2} {} {name}: {} [{:.1}s]", i + 1, if out.pass { "PASS" } else { "FAIL" }, out.detail, t.elapsed().as_secs_f64());
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
