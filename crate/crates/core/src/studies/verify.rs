//! Consolidated verification: dimension table, exact sequences, projection
//! and commuting checks, Poincaré and Helmholtz identities, Friedrichs window.

use super::suites::{field_suite, SuiteKind};
use crate::calculus::check_exact_sequence;
use crate::error::Result;
use crate::poincare::{check_helmholtz, check_poincare};
use crate::polyspace::{build_space, closed_form_dim, SpaceKind, SubSimplex};
use crate::projectors::{build_plan, check_commuting, check_projection, Entity, Operator};
use crate::refsimplex::{edge, tet, tri};
use crate::report::{CheckLine, Report};
use crate::spectra::{friedrichs_sweep, FriedrichsCase};
use serde::Serialize;

/// Tolerance of the projection and commuting checks.
pub const VERIFY_TOL: f64 = 1e-9;

/// Largest allowed max/min ratio of a Friedrichs constant over the p window.
pub const FRIEDRICHS_SPREAD: f64 = 2.0;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct DimRow {
    pub p: usize,
    pub space: String,
    pub dim: usize,
    pub closed_form: usize,
    #[serde(rename = "match")]
    pub matches: bool,
}

#[derive(Clone, Debug, Serialize, Default)]
pub struct Verification {
    pub dims: Vec<DimRow>,
    pub report: Report,
}

const DIM_SPACES: [(usize, SpaceKind); 16] = [
    (3, SpaceKind::W),
    (3, SpaceKind::Q),
    (3, SpaceKind::V),
    (3, SpaceKind::L2),
    (3, SpaceKind::WRing),
    (3, SpaceKind::QRing),
    (3, SpaceKind::VRing),
    (2, SpaceKind::W),
    (2, SpaceKind::Q),
    (2, SpaceKind::V),
    (2, SpaceKind::WRing),
    (2, SpaceKind::QRing),
    (2, SpaceKind::VRing),
    (1, SpaceKind::W),
    (1, SpaceKind::Q),
    (1, SpaceKind::WRing),
];

/// Computed and closed-form dimensions for p in the range.
pub fn dims_table(p_min: usize, p_max: usize) -> Result<Vec<DimRow>> {
    let mut rows = Vec::new();
    for p in p_min..=p_max {
        for (d, kind) in DIM_SPACES {
            let cell = match d {
                3 => tet(),
                2 => tri(),
                _ => edge(),
            };
            let dim = build_space(&cell, kind, p as i64)?.dim();
            let closed_form = closed_form_dim(d, kind, p).expect("listed spaces have closed forms");
            rows.push(DimRow { p, space: format!("{d}d:{kind}"), dim, closed_form, matches: dim == closed_form });
        }
    }
    Ok(rows)
}

/// Stage sizes of a plan summed by the kind of entity they live on
/// (vertices, edges, faces, interior).
fn stage_counts(op: Operator, p: usize) -> Result<[usize; 4]> {
    let mut c = [0; 4];
    for s in &build_plan(op, p)?.stages {
        let k = match s.entity {
            Entity::Sub(SubSimplex::Vertex(_)) => 0,
            Entity::Sub(SubSimplex::Edge(_)) => 1,
            Entity::Sub(SubSimplex::Face(_)) => 2,
            Entity::Interior => 3,
        };
        c[k] += s.size();
    }
    Ok(c)
}

/// The condition counts of Π^grad and Π^div: closed forms against the
/// target dimensions and against the stage sizes of the assembled plans.
pub fn count_identities(p: usize) -> Result<Report> {
    let mut rep = Report::default();
    let w = closed_form_dim(3, SpaceKind::W, p).unwrap();
    let grad_terms = [4, 6 * p, 4 * p * p.saturating_sub(1) / 2, p * p.saturating_sub(1) * p.saturating_sub(2) / 6];
    rep.push(CheckLine::equal(format!("counts.grad.closed_form.p{p}"), grad_terms.iter().sum(), w));
    let g = stage_counts(Operator::Grad3d, p)?;
    for (i, name) in ["vertices", "edges", "faces", "interior"].iter().enumerate() {
        rep.push(CheckLine::equal(format!("counts.grad.{name}.p{p}"), g[i], grad_terms[i]));
    }
    let v = build_space(&tet(), SpaceKind::V, p as i64)?.dim();
    let div_terms = [0, 0, 4 * (p + 1) * (p + 2) / 2, (p + 2) * (p + 1) * p / 2];
    rep.push(CheckLine::equal(format!("counts.div.closed_form.p{p}"), div_terms.iter().sum(), v));
    let d = stage_counts(Operator::Div3d, p)?;
    rep.push(CheckLine::equal(format!("counts.div.faces.p{p}"), d[2], div_terms[2]));
    rep.push(CheckLine::equal(format!("counts.div.interior.p{p}"), d[3], div_terms[3]));
    Ok(rep)
}

/// Friedrichs constants over a p window: positive and within a fixed spread.
pub fn friedrichs_window(p_min: usize, p_max: usize) -> Result<Report> {
    let mut rep = Report::default();
    let recs = friedrichs_sweep(&FriedrichsCase::ALL, p_min, p_max)?;
    for case in FriedrichsCase::ALL {
        let c: Vec<f64> = recs.iter().filter(|r| r.case == case && !r.empty).map(|r| r.constant).collect();
        if c.is_empty() {
            continue;
        }
        let (lo, hi) = c.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
        rep.push(CheckLine { name: format!("friedrichs.{case}.positive"), measured: lo, threshold: 0.0, pass: lo > 0.0 });
        rep.push(CheckLine::at_most(format!("friedrichs.{case}.spread"), hi / lo, FRIEDRICHS_SPREAD));
    }
    Ok(rep)
}

/// Samples per operator in the projection checks.
pub const PROJECTION_SAMPLES: usize = 200;

/// Every executable check for p in the range.
pub fn run_verification(p_min: usize, p_max: usize, seed: u64) -> Result<Verification> {
    let dims = dims_table(p_min, p_max)?;
    let mut report = Report::default();
    for r in &dims {
        report.push(CheckLine::equal(format!("dims.{}.p{}", r.space, r.p), r.dim, r.closed_form));
    }
    let ps: Vec<usize> = (p_min..=p_max).collect();
    let per_p: Vec<Result<Report>> = crate::par::map_collect(ps, |p| {
        let mut rep = Report::default();
        rep.extend(count_identities(p)?);
        rep.extend(check_exact_sequence(p)?);
        for op in Operator::ALL {
            if op == Operator::Grad1d && p == 0 {
                continue;
            }
            rep.push(check_projection(op, p, PROJECTION_SAMPLES, seed, VERIFY_TOL)?);
        }
        rep.extend(check_commuting(p, &field_suite(SuiteKind::Polynomial), VERIFY_TOL)?);
        rep.extend(check_poincare(p, seed)?);
        rep.extend(check_helmholtz(p, seed)?);
        Ok(rep)
    });
    for r in per_p {
        report.extend(r?);
    }
    report.extend(friedrichs_window(p_min, p_max)?);
    Ok(Verification { dims, report })
}
