//! Executable versions of the commuting diagrams and the projection property.

use super::{build_plan, Operator};
use crate::calculus::{apply_diff, DiffOp};
use crate::error::Result;
use crate::poincare::random_element;
use crate::report::{CheckLine, Report};
use crate::polyspace::PolyFn;
use crate::sobolev::{field_rule, norm_with_rule, AnalyticField, NormKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Named fields for the commuting checks, split by cell and rank.
#[derive(Clone, Debug, Default)]
pub struct FieldSuite {
    pub name: String,
    pub scalar3d: Vec<AnalyticField>,
    pub vector3d: Vec<AnalyticField>,
    pub scalar2d: Vec<AnalyticField>,
    pub vector2d: Vec<AnalyticField>,
}

/// ‖a − b‖ relative to the largest of ‖a‖, ‖b‖ and the L² sizes of the field
/// and its derivative, so that vanishing interpolants still compare on scale.
fn discrepancy(a: &PolyFn, b: &PolyFn, u: &AnalyticField, du: &AnalyticField) -> Result<f64> {
    let rule = field_rule(&a.cell, a.degree + 4)?;
    let dim = a.cell.dim;
    let reference = norm_with_rule(u, NormKind::L2, &rule, dim)?.max(norm_with_rule(du, NormKind::L2, &rule, dim)?);
    let scale = a.l2_norm().max(b.l2_norm()).max(reference);
    Ok(if scale == 0.0 { 0.0 } else { a.sub(b).l2_norm() / scale })
}

/// All five identities D Π = Π D for every field of the suite at one p.
pub fn check_commuting(p: usize, suite: &FieldSuite, tol: f64) -> Result<Report> {
    let mut rep = Report::default();
    let line = |id: &str, field: &str, v: f64| CheckLine::at_most(format!("commuting.{}.{field}.{id}.p{p}", suite.name), v, tol);
    let plan = |op| build_plan(op, p);
    for phi in &suite.scalar3d {
        let a = apply_diff(DiffOp::Grad, &plan(Operator::Grad3d)?.apply(phi)?.element);
        let d = phi.grad(3);
        let b = plan(Operator::Curl3d)?.apply(&d)?.element;
        rep.push(line("grad_curl", &phi.name, discrepancy(&a, &b, phi, &d)?));
    }
    for u in &suite.vector3d {
        let pc = plan(Operator::Curl3d)?.apply(u)?.element;
        let a = apply_diff(DiffOp::Curl3d, &pc);
        let d = u.curl();
        let b = plan(Operator::Div3d)?.apply(&d)?.element;
        rep.push(line("curl_div", &u.name, discrepancy(&a, &b, u, &d)?));
        let pd = plan(Operator::Div3d)?.apply(u)?.element;
        let a = apply_diff(DiffOp::Div, &pd);
        let d = u.div(3);
        let b = plan(Operator::L2_3d)?.apply(&d)?.element;
        rep.push(line("div_l2", &u.name, discrepancy(&a, &b, u, &d)?));
    }
    for phi in &suite.scalar2d {
        let a = apply_diff(DiffOp::Grad, &plan(Operator::Grad2d)?.apply(phi)?.element);
        let d = phi.grad(2);
        let b = plan(Operator::Curl2d)?.apply(&d)?.element;
        rep.push(line("grad_curl_2d", &phi.name, discrepancy(&a, &b, phi, &d)?));
    }
    for u in &suite.vector2d {
        let a = apply_diff(DiffOp::Curl2dVector, &plan(Operator::Curl2d)?.apply(u)?.element);
        let d = u.curl2d();
        let b = plan(Operator::L2_2d)?.apply(&d)?.element;
        rep.push(line("curl_l2_2d", &u.name, discrepancy(&a, &b, u, &d)?));
    }
    Ok(rep)
}

/// Largest relative error ‖Πu − u‖/‖u‖ over `count` random members of the target.
pub fn check_projection(op: Operator, p: usize, count: usize, seed: u64, tol: f64) -> Result<CheckLine> {
    let plan = build_plan(op, p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((p as u64) << 20) ^ op as u64);
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let u = random_element(&plan.target, &mut rng);
        let (c, _) = plan.target.coords_of(&u);
        let pu = plan.apply_coeffs(&c)?;
        worst = worst.max((&pu.coords - &c).norm() / c.norm());
    }
    Ok(CheckLine::at_most(format!("projection.{op}.p{p}"), worst, tol))
}
