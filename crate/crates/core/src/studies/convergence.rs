//! p-convergence sweeps in theorem form: each interpolation error is divided
//! by the best-approximation infimum that bounds it, and log-log slopes of
//! the ratio are fitted over the upper half of the p range.

use super::suites::{fields_for, SuiteKind};
use crate::error::{Error, Result};
use crate::projectors::{build_plan, Operator};
use crate::sobolev::{
    best_approx, best_approx_fractional, dual_norm, field_rule, fractional_norm, moments, norm_with_rule, test_gram,
    AnalyticField, DiffField, Difference, NormKind, Quantity, QuantityField, DUAL_TEST_MARGIN,
};
use serde::Serialize;
use std::time::Instant;

/// Largest p accepted for cell operators, and for the 1D operator.
pub const MAX_P: usize = 12;
pub const MAX_P_1D: usize = 16;

#[derive(Clone, Debug)]
pub struct StudyConfig {
    pub operators: Vec<Operator>,
    pub p_min: usize,
    pub p_max: usize,
    pub suite: SuiteKind,
    /// Restrict the suite to one field by name.
    pub field: Option<String>,
    pub s_values: Vec<f64>,
    pub dual_offset: usize,
    pub seed: u64,
    /// Record wall time per row (makes output nondeterministic).
    pub timings: bool,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            operators: Operator::ALL.to_vec(),
            p_min: 1,
            p_max: 6,
            suite: SuiteKind::Entire,
            field: None,
            s_values: vec![0.0],
            dual_offset: DUAL_TEST_MARGIN,
            seed: 0,
            timings: false,
        }
    }
}

impl StudyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.operators.is_empty() {
            return Err(Error::Config("no operators selected".into()));
        }
        if self.p_min > self.p_max {
            return Err(Error::Config(format!("p-min {} exceeds p-max {}", self.p_min, self.p_max)));
        }
        if self.s_values.is_empty() {
            return Err(Error::Config("no s values".into()));
        }
        if let SuiteKind::Singular(a) = self.suite {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::Config(format!("alpha must be positive, got {a}")));
            }
        }
        for &op in &self.operators {
            let cap = if op == Operator::Grad1d { MAX_P_1D } else { MAX_P };
            if self.p_max > cap {
                return Err(Error::Config(format!("{op}: p-max {} above the cap {cap}", self.p_max)));
            }
            if op == Operator::Grad1d && self.p_min == 0 {
                return Err(Error::Config("grad1d needs p >= 1".into()));
            }
            let top = match op.cell_dim() {
                2 => op.cell().s_hat(),
                _ => 1.0,
            };
            for &s in &self.s_values {
                let ok = if op.cell_dim() == 2 { (0.0..top).contains(&s) } else { (0.0..=top).contains(&s) };
                if !ok {
                    return Err(Error::Config(format!("{op}: s = {s} outside the admissible range (upper end {top})")));
                }
            }
        }
        Ok(())
    }

    fn fields(&self, op: Operator) -> Vec<AnalyticField> {
        fields_for(op, self.suite)
            .into_iter()
            .filter(|f| self.field.as_ref().is_none_or(|n| &f.name == n))
            .collect()
    }
}

/// One (operator, field, s, p) row.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct StudyRecord {
    pub operator: String,
    pub p: usize,
    pub field: String,
    pub norm: String,
    pub s: f64,
    /// Interpolation error in the operator's norm.
    pub error: f64,
    /// Best-approximation infimum on the right-hand side of the estimate.
    pub best: f64,
    pub ratio: f64,
    /// Relative change of the error when the dual test degree grows by two.
    pub stability: f64,
    pub flagged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

/// A fitted log-log slope. `quantity` is `ratio`, `error`, or `gap`
/// (error at s = 1 over error at s = 0).
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Slope {
    pub operator: String,
    pub field: String,
    pub norm: String,
    pub s: f64,
    pub quantity: String,
    pub p_from: usize,
    pub p_to: usize,
    pub slope: f64,
}

#[derive(Clone, Debug, Serialize, Default)]
pub struct StudyOutput {
    pub records: Vec<StudyRecord>,
    pub slopes: Vec<Slope>,
}

/// Name of the error norm family of an operator.
pub fn norm_id(op: Operator) -> &'static str {
    match op {
        Operator::Grad3d | Operator::Grad2d | Operator::Grad1d => "H1-s",
        Operator::Curl3d | Operator::Curl2d => "H-s(curl)",
        Operator::Div3d => "H-s(div)",
        Operator::L2_3d | Operator::L2_2d => "H-s",
    }
}

/// The infimum bounding the interpolation error of each operator.
pub fn best_error(op: Operator, p: usize, u: &AnalyticField) -> Result<f64> {
    let space = op.target(p)?;
    Ok(match op {
        Operator::Grad3d => best_approx(&space, u, NormKind::H2)?.error,
        Operator::Grad2d => best_approx_fractional(&space, u, 1.5, None)?.error,
        Operator::Grad1d => best_approx(&space, u, NormKind::H1)?.error,
        Operator::Curl3d => best_approx(&space, u, NormKind::H1curl)?.error,
        Operator::Curl2d => best_approx(&space, u, NormKind::HhalfCurl)?.error,
        Operator::Div3d => best_approx(&space, u, NormKind::HhalfDiv)?.error,
        Operator::L2_3d | Operator::L2_2d => best_approx(&space, u, NormKind::L2)?.error,
    })
}

/// Whether the norm at this s is computed exactly by quadrature.
fn exact_norm(op: Operator, s: f64) -> bool {
    s == 0.0 || (norm_id(op) == "H1-s" && s == 1.0)
}

/// ‖e‖ in the operator's norm at smoothness shift s, with discrete
/// fractional and dual norms on the scalar test space of degree `test`.
pub fn error_in_norm(op: Operator, e: &dyn DiffField, degree: usize, s: f64, test: usize) -> Result<f64> {
    let cell = op.cell();
    let dim = cell.dim;
    let exact = |k: NormKind| -> Result<f64> { norm_with_rule(e, k, &field_rule(&cell, degree)?, dim) };
    let dual = |f: &dyn crate::polyspace::Field, s: f64| -> Result<f64> { dual_norm(&*test_gram(&cell, test, s > 1.0)?, f, s) };
    let with_derivative = |q: Quantity, k: NormKind| -> Result<f64> {
        if s == 0.0 {
            return exact(k);
        }
        let a = dual(e, s)?;
        let b = dual(&QuantityField { u: e, q, dim }, s)?;
        Ok((a * a + b * b).sqrt())
    };
    match norm_id(op) {
        "H1-s" => {
            let t = 1.0 - s;
            if s == 0.0 {
                exact(NormKind::H1)
            } else if s == 1.0 {
                exact(NormKind::L2)
            } else if t > 0.0 {
                let g = test_gram(&cell, test, false)?;
                let c = moments(&cell, test, 1, &g.space.basis, e)?;
                fractional_norm(&g, &c, t)
            } else {
                dual(e, -t)
            }
        }
        "H-s(curl)" => with_derivative(Quantity::Curl, NormKind::Hcurl),
        "H-s(div)" => with_derivative(Quantity::Div, NormKind::Hdiv),
        _ if s == 0.0 => exact(NormKind::L2),
        _ => dual(e, s),
    }
}

struct Task {
    op: Operator,
    p: usize,
    field: AnalyticField,
}

fn nan_record(op: Operator, p: usize, field: &str, s: f64) -> StudyRecord {
    StudyRecord {
        operator: op.name().into(),
        p,
        field: field.into(),
        norm: norm_id(op).into(),
        s,
        error: f64::NAN,
        best: f64::NAN,
        ratio: f64::NAN,
        stability: f64::NAN,
        flagged: true,
        wall_time: None,
    }
}

fn run_task(t: &Task, cfg: &StudyConfig) -> Vec<StudyRecord> {
    let start = Instant::now();
    let rows = (|| -> Result<Vec<StudyRecord>> {
        let plan = build_plan(t.op, t.p)?;
        let pi = plan.apply(&t.field)?.element;
        let best = best_error(t.op, t.p, &t.field)?;
        let e = Difference { a: &t.field, b: &pi };
        let test = pi.degree + cfg.dual_offset;
        let mut out = Vec::new();
        for &s in &cfg.s_values {
            let error = error_in_norm(t.op, &e, pi.degree, s, test)?;
            let stability = if exact_norm(t.op, s) {
                0.0
            } else {
                let wider = error_in_norm(t.op, &e, pi.degree, s, test + 2)?;
                if wider > 0.0 { (error - wider).abs() / wider } else { 0.0 }
            };
            let ratio = if best > 0.0 { error / best } else { f64::NAN };
            let flagged = !(error.is_finite() && best.is_finite());
            out.push(StudyRecord { error, best, ratio, stability, flagged, ..nan_record(t.op, t.p, &t.field.name, s) });
        }
        Ok(out)
    })();
    let mut rows = rows.unwrap_or_else(|_| cfg.s_values.iter().map(|&s| nan_record(t.op, t.p, &t.field.name, s)).collect());
    if cfg.timings {
        let w = start.elapsed().as_secs_f64();
        rows.iter_mut().for_each(|r| r.wall_time = Some(w));
    }
    rows
}

/// Least-squares slope of log(v) against log(p); NaN with fewer than two
/// positive finite values.
pub fn fit_slope(ps: &[usize], vals: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = ps
        .iter()
        .zip(vals)
        .filter(|(&p, &v)| p > 0 && v > 0.0 && v.is_finite())
        .map(|(&p, &v)| ((p as f64).ln(), v.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// The upper half of an increasing p list (at least two points when available).
pub fn upper_half(ps: &[usize]) -> &[usize] {
    let start = (ps.len() / 2).min(ps.len().saturating_sub(2));
    &ps[start..]
}

fn same_series(a: &StudyRecord, b: &StudyRecord) -> bool {
    a.operator == b.operator && a.field == b.field && a.s == b.s
}

fn slopes(records: &[StudyRecord], s_values: &[f64]) -> Vec<Slope> {
    let mut out = Vec::new();
    for group in records.chunk_by(same_series) {
        let ps: Vec<usize> = group.iter().map(|r| r.p).collect();
        let up = upper_half(&ps);
        let tail = &group[group.len() - up.len()..];
        let r0 = &group[0];
        for (q, vals) in [("ratio", tail.iter().map(|r| r.ratio).collect::<Vec<_>>()), ("error", tail.iter().map(|r| r.error).collect())] {
            out.push(Slope {
                operator: r0.operator.clone(),
                field: r0.field.clone(),
                norm: r0.norm.clone(),
                s: r0.s,
                quantity: q.into(),
                p_from: up[0],
                p_to: *up.last().unwrap(),
                slope: fit_slope(up, &vals),
            });
        }
    }
    // Duality gap of the H^{1−s} family: the error at s = 1 over the error at s = 0.
    if s_values.contains(&0.0) && s_values.contains(&1.0) {
        let pick = |op: &str, field: &str, s: f64| -> Vec<&StudyRecord> {
            records.iter().filter(|r| r.operator == op && r.field == field && r.s == s).collect()
        };
        let gaps: Vec<Slope> = out
            .iter()
            .filter(|sl| sl.norm == "H1-s" && sl.s == 0.0 && sl.quantity == "ratio")
            .map(|sl| {
                let (h1, l2) = (pick(&sl.operator, &sl.field, 0.0), pick(&sl.operator, &sl.field, 1.0));
                let ps: Vec<usize> = h1.iter().map(|r| r.p).collect();
                let up = upper_half(&ps);
                let k = ps.len() - up.len();
                let vals: Vec<f64> = h1[k..].iter().zip(&l2[k..]).map(|(a, b)| b.error / a.error).collect();
                Slope { quantity: "gap".into(), s: 1.0, slope: fit_slope(up, &vals), ..sl.clone() }
            })
            .collect();
        out.extend(gaps);
    }
    out
}

/// Run a sweep. Rows are computed in parallel and sorted by
/// (operator, field, s, p), so the output does not depend on scheduling.
pub fn run_convergence(cfg: &StudyConfig) -> Result<StudyOutput> {
    cfg.validate()?;
    let mut tasks = Vec::new();
    for &op in &cfg.operators {
        let fields = cfg.fields(op);
        if fields.is_empty() {
            return Err(Error::Config(format!("no field of suite {} matches for {op}", cfg.suite)));
        }
        for field in fields {
            for p in cfg.p_min..=cfg.p_max {
                tasks.push(Task { op, p, field: field.clone() });
            }
        }
    }
    let mut records: Vec<StudyRecord> = crate::par::map_collect(tasks, |t| run_task(&t, cfg)).into_iter().flatten().collect();
    records.sort_by(|a, b| {
        (&a.operator, &a.field)
            .cmp(&(&b.operator, &b.field))
            .then(a.s.total_cmp(&b.s))
            .then(a.p.cmp(&b.p))
    });
    let slopes = slopes(&records, &cfg.s_values);
    Ok(StudyOutput { records, slopes })
}
