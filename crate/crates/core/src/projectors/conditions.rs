//! Condition functionals of every stage as weighted point evaluations.

use super::Operator;
use crate::calculus::{ambient_diff, DiffOp};
use crate::error::Result;
use crate::linalg;
use crate::polyspace::{build_space, bubble_space, chart_of, n_poly, sample_rows, PolySpace, SpaceKind, SubSimplex};
use crate::refsimplex::{cross, quadrature, Point, ReferenceCell, SubChart, MAX_QUADRATURE_DEGREE};
use nalgebra::DMatrix;
use std::sync::Arc;

/// Test values at a point set, combined with constant direction vectors:
/// the functional is Σ_q w_q Σ_j vals[q·k + j] frame[j] · u(x_q).
struct Part {
    pts: Vec<Point>,
    w: Vec<f64>,
    vals: DMatrix<f64>,
    frame: Vec<Point>,
}

/// Conditions sharing one set of test functions, possibly spread over several point sets.
struct Group {
    count: usize,
    parts: Vec<Part>,
}

fn assemble(groups: Vec<Group>, vd: usize) -> (Vec<Point>, DMatrix<f64>) {
    let rows: usize = groups.iter().map(|g| g.count).sum();
    let mut pts = Vec::new();
    for g in &groups {
        for p in &g.parts {
            pts.extend_from_slice(&p.pts);
        }
    }
    let mut out = DMatrix::zeros(rows, pts.len() * vd);
    let (mut r0, mut off) = (0, 0);
    for g in &groups {
        for part in &g.parts {
            let k = part.frame.len();
            for q in 0..part.pts.len() {
                for i in 0..g.count {
                    for c in 0..vd {
                        let mut acc = 0.0;
                        for j in 0..k {
                            acc += part.vals[(q * k + j, i)] * part.frame[j][c];
                        }
                        out[(r0 + i, (off + q) * vd + c)] += part.w[q] * acc;
                    }
                }
            }
            off += part.pts.len();
        }
        r0 += g.count;
    }
    (pts, out)
}

fn identity_frame(k: usize) -> Vec<Point> {
    (0..k)
        .map(|j| {
            let mut e = [0.0; 3];
            e[j] = 1.0;
            e
        })
        .collect()
}

fn diff(cell: &ReferenceCell, op: DiffOp, n: usize, rows: &DMatrix<f64>) -> DMatrix<f64> {
    rows * ambient_diff(cell, op, n).transpose()
}

/// Rows of the negative Laplacian of scalar rows.
fn neg_laplacian(cell: &ReferenceCell, n: usize, rows: &DMatrix<f64>) -> DMatrix<f64> {
    let m = n_poly(cell.dim, n);
    let g = ambient_diff(cell, DiffOp::Grad, n);
    let mut lap = DMatrix::zeros(m, m);
    for k in 0..cell.dim {
        let gk = g.rows(k * m, m);
        lap += &gk * &gk;
    }
    -(rows * lap.transpose())
}

pub(super) struct Context {
    op: Operator,
    target: Arc<PolySpace>,
    cell: Arc<ReferenceCell>,
    n: usize,
    vd: usize,
    qdeg: usize,
}

struct Rule {
    local: Vec<Point>,
    global: Vec<Point>,
    w: Vec<f64>,
}

/// Floor on the stage quadrature degree. Moments of non-polynomial fields at
/// low p would otherwise be integrated by rules sized for the target alone.
const MIN_STAGE_QUAD: usize = 20;

impl Context {
    pub(super) fn new(op: Operator, target: &Arc<PolySpace>) -> Result<Self> {
        let n = target.degree;
        Ok(Context {
            op,
            target: target.clone(),
            cell: target.cell.clone(),
            n,
            vd: target.value_dim,
            qdeg: (2 * n + crate::sobolev::FIELD_QUAD_MARGIN).max(MIN_STAGE_QUAD).min(MAX_QUADRATURE_DEGREE),
        })
    }

    fn rule_on(&self, chart: Option<&SubChart>, cell: &ReferenceCell) -> Result<Rule> {
        let q = quadrature(cell, self.qdeg)?;
        let global = match chart {
            Some(c) => q.points.iter().map(|x| c.map(x)).collect(),
            None => q.points.clone(),
        };
        Ok(Rule { local: q.points, global, w: q.weights })
    }

    fn part(&self, rule: &Rule, cell: &ReferenceCell, k: usize, rows: &DMatrix<f64>, frame: Vec<Point>) -> Part {
        Part { pts: rule.global.clone(), w: rule.w.clone(), vals: sample_rows(cell, self.n, k, rows, &rule.local), frame }
    }

    /// Boundary parts Σ_facets ∫ (test value) frame(facet) · u for tests given
    /// as `k`-component rows on the main cell.
    fn facet_parts(&self, rows: &DMatrix<f64>, k: usize, frame: impl Fn(&Point) -> Vec<Point>) -> Result<Vec<Part>> {
        let mut parts = Vec::new();
        for (chart, normal) in self.cell.facets() {
            let r = self.rule_on(Some(&chart), &chart.cell)?;
            let vals = sample_rows(&self.cell, self.n, k, rows, &r.global);
            parts.push(Part { pts: r.global, w: r.w, vals, frame: frame(&normal) });
        }
        Ok(parts)
    }

    /// Conditions of a vertex, edge or face stage with trace block `r`
    /// (rows on the sub-simplex chart).
    pub(super) fn sub_conditions(
        &self,
        sub: SubSimplex,
        r: &DMatrix<f64>,
    ) -> Result<(Vec<Point>, DMatrix<f64>)> {
        let vd = self.vd;
        if let SubSimplex::Vertex(v) = sub {
            // Point evaluation u(V).
            let part = Part { pts: vec![self.cell.vertices[v]], w: vec![1.0], vals: DMatrix::from_element(1, 1, 1.0), frame: identity_frame(1) };
            return Ok(assemble(vec![Group { count: 1, parts: vec![part] }], vd));
        }
        let chart = chart_of(&self.cell, sub)?;
        let sc = chart.cell.clone();
        let rule = self.rule_on(Some(&chart), &sc)?;
        let count = r.nrows();
        let groups = match self.op {
            // (∇_E u, ∇_E v)_E = −(u, Δ_E v)_E + ∫_∂E u ∂_n v. The boundary term
            // is kept on faces; on edges it is u(V)·v' at vertices already fixed.
            Operator::Grad3d | Operator::Grad2d | Operator::Grad1d => {
                let t = neg_laplacian(&sc, self.n, r);
                let mut parts = vec![self.part(&rule, &sc, 1, &t, identity_frame(1))];
                if sc.dim == 2 {
                    let g = diff(&sc, DiffOp::Grad, self.n, r);
                    parts.extend(self.chart_edge_parts(&chart, &g, 2, |nrm| vec![[nrm[0], 0.0, 0.0], [nrm[1], 0.0, 0.0]])?);
                }
                vec![Group { count, parts }]
            }
            Operator::Curl3d | Operator::Curl2d if matches!(sub, SubSimplex::Edge(_)) => {
                // (t_e·u, v)_e over the full edge trace space: the span of 1 and ∂_e of the edge bubbles.
                vec![Group { count, parts: vec![self.part(&rule, &sc, 1, r, chart.axes.clone())] }]
            }
            Operator::Curl3d => self.curl_face_groups(&chart, &rule, r)?,
            Operator::Div3d => {
                // (n_f·u, v)_f over P_p(f): constants and the mean-free V̊_p(f).
                let f = match sub {
                    SubSimplex::Face(f) => f,
                    _ => unreachable!("div stages live on faces"),
                };
                vec![Group { count, parts: vec![self.part(&rule, &sc, 1, r, vec![self.cell.normals[f]])] }]
            }
            _ => unreachable!("operator without boundary stages"),
        };
        Ok(assemble(groups, vd))
    }

    /// Face conditions of Π^curl: surface gradients of face bubbles, then
    /// curl_f–curl_f tests on the rest of the face Nédélec bubbles.
    fn curl_face_groups(&self, chart: &SubChart, rule: &Rule, r: &DMatrix<f64>) -> Result<Vec<Group>> {
        let sc = &chart.cell;
        let n = self.n;
        let wb = bubble_space(&build_space(sc, SpaceKind::W, self.target.p as i64)?)?;
        let grads = linalg::orth_rows(&diff(sc, DiffOp::Grad, n, &wb.basis));
        let phi = linalg::complement_rows(r, &grads);
        let psi = diff(sc, DiffOp::Curl2dVector, n, &phi);
        let rot = diff(sc, DiffOp::Curl2dScalar, n, &psi);
        let g1 = Group { count: grads.nrows(), parts: vec![self.part(rule, sc, 2, &grads, chart.axes.clone())] };
        // (curl_f w, ψ)_f = (w, 𝐜𝐮𝐫𝐥_f ψ)_f + ∫_∂f ψ w·t.
        let mut parts = vec![self.part(rule, sc, 2, &rot, chart.axes.clone())];
        parts.extend(self.chart_edge_parts(chart, &psi, 1, |nrm| vec![chart.push(&[-nrm[1], nrm[0]])])?);
        Ok(vec![g1, Group { count: phi.nrows(), parts }])
    }

    /// Parts ∫_e (test rows)·frame(n_e) u over the edges of a face chart, with
    /// `k`-component rows on the chart cell and n_e the outward normal of edge e
    /// in chart coordinates.
    fn chart_edge_parts(&self, chart: &SubChart, rows: &DMatrix<f64>, k: usize, frame: impl Fn(&[f64]) -> Vec<Point>) -> Result<Vec<Part>> {
        let sc = &chart.cell;
        let mut parts = Vec::new();
        for j in 0..sc.edges.len() {
            let ec = sc.edge_chart(j)?;
            let q = quadrature(&ec.cell, self.qdeg)?;
            let local2: Vec<Point> = q.points.iter().map(|x| ec.map(x)).collect();
            let global: Vec<Point> = local2.iter().map(|x| chart.map(x)).collect();
            let nrm = sc.normals[j];
            let vals = sample_rows(sc, self.n, k, rows, &local2);
            parts.push(Part { pts: global, w: q.weights, vals, frame: frame(&nrm) });
        }
        Ok(parts)
    }

    /// Interior conditions; `z` holds the interior bubbles in target coordinates.
    pub(super) fn interior_conditions(&self, z: &DMatrix<f64>) -> Result<(Vec<Point>, DMatrix<f64>)> {
        let cell = self.cell.clone();
        let n = self.n;
        let vd = self.vd;
        let rule = self.rule_on(None, &cell)?;
        let bubbles = linalg::orth_rows(&(z * &self.target.basis));
        let p = self.target.p as i64;
        let groups = match self.op {
            Operator::L2_3d | Operator::L2_2d => {
                vec![Group { count: bubbles.nrows(), parts: vec![self.part(&rule, &cell, vd, &bubbles, identity_frame(vd))] }]
            }
            Operator::Grad3d | Operator::Grad2d | Operator::Grad1d => {
                // (∇u, ∇v) = −(u, Δv) + ∫_∂K u ∂_n v.
                let t = neg_laplacian(&cell, n, &bubbles);
                let mut parts = vec![self.part(&rule, &cell, 1, &t, identity_frame(1))];
                let g = diff(&cell, DiffOp::Grad, n, &bubbles);
                let d = cell.dim;
                parts.extend(self.facet_parts(&g, d, |nrm| (0..d).map(|j| [nrm[j], 0.0, 0.0]).collect())?);
                vec![Group { count: t.nrows(), parts }]
            }
            Operator::Curl3d | Operator::Curl2d => {
                let wb = bubble_space(&build_space(&cell, SpaceKind::W, p)?)?;
                let grads = linalg::orth_rows(&diff(&cell, DiffOp::Grad, n, &wb.basis));
                let phi = linalg::complement_rows(&bubbles, &grads);
                let g1 = Group { count: grads.nrows(), parts: vec![self.part(&rule, &cell, vd, &grads, identity_frame(vd))] };
                let mut parts;
                if cell.dim == 3 {
                    // (curl u, ψ) = (u, curl ψ) + ∫_∂K u·(ψ × n).
                    let psi = diff(&cell, DiffOp::Curl3d, n, &phi);
                    let rot = diff(&cell, DiffOp::Curl3d, n, &psi);
                    parts = vec![self.part(&rule, &cell, 3, &rot, identity_frame(3))];
                    parts.extend(self.facet_parts(&psi, 3, |nrm| identity_frame(3).iter().map(|e| cross(e, nrm)).collect())?);
                } else {
                    // (curl u, ψ) = (u, 𝐜𝐮𝐫𝐥 ψ) + ∫_∂f ψ u·t.
                    let psi = diff(&cell, DiffOp::Curl2dVector, n, &phi);
                    let rot = diff(&cell, DiffOp::Curl2dScalar, n, &psi);
                    parts = vec![self.part(&rule, &cell, 2, &rot, identity_frame(2))];
                    parts.extend(self.facet_parts(&psi, 1, |nrm| vec![[-nrm[1], nrm[0], 0.0]])?);
                }
                vec![g1, Group { count: phi.nrows(), parts }]
            }
            Operator::Div3d => {
                let qb = bubble_space(&build_space(&cell, SpaceKind::Q, p)?)?;
                let curls = linalg::orth_rows(&diff(&cell, DiffOp::Curl3d, n, &qb.basis));
                let phi = linalg::complement_rows(&bubbles, &curls);
                let g1 = Group { count: curls.nrows(), parts: vec![self.part(&rule, &cell, 3, &curls, identity_frame(3))] };
                // (div u, ψ) = −(u, ∇ψ) + ∫_∂K (u·n) ψ.
                let psi = diff(&cell, DiffOp::Div, n, &phi);
                let grad = -diff(&cell, DiffOp::Grad, n, &psi);
                let mut parts = vec![self.part(&rule, &cell, 3, &grad, identity_frame(3))];
                parts.extend(self.facet_parts(&psi, 1, |nrm| vec![*nrm])?);
                vec![g1, Group { count: phi.nrows(), parts }]
            }
        };
        Ok(assemble(groups, vd))
    }
}
