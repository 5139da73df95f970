//! Polynomial spaces of the discrete de Rham complex on a simplex:
//! volume spaces, bubbles, mean-zero variants and traces.
//!
//! Every space is a subspace of `P_N(cell)^value_dim` in the cell's
//! orthonormal basis, stored as orthonormal coefficient rows. Because the
//! ambient basis is L²-orthonormal, coefficient inner products are L² inner
//! products. Spaces with index `p` in the sequence `W_{p+1} → Q_p → V_p`
//! use ambient degree `N = p + 1`; `P_p` (the `L2` kind) uses `N = p`.

pub mod algebra;
pub mod basis;
mod export;

pub use algebra::{algebra, change_degree, degree_embedding, eval_basis, eval_table, restriction};
pub use basis::{n_poly, Dual, Jet, MonoPoly, Ring};
pub use export::{basis_json, polyfn_json};

use crate::error::{Error, Result};
use crate::linalg;
use crate::refsimplex::{Point, ReferenceCell, SubChart};
use nalgebra::{DMatrix, DVector};
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpaceKind {
    /// `W_{p+1} = P_{p+1}`.
    W,
    /// Nédélec type I `Q_p`; on an edge `P_p`.
    Q,
    /// Raviart–Thomas `V_p`; on a triangle the scalar `P_p`.
    V,
    /// `W_p = P_p`, the target of the divergence.
    L2,
    WRing,
    /// Zero tangential trace; on a triangle zero tangential edge traces, on an edge mean zero.
    QRing,
    /// Zero normal trace in 3D; mean zero on a triangle.
    VRing,
    WAver,
    /// Bubbles L²-orthogonal to gradients of `W̊_{p+1}`.
    QPerpRing,
    TraceW,
    TraceQ,
    TraceV,
}

impl SpaceKind {
    pub fn name(&self) -> &'static str {
        match self {
            SpaceKind::W => "W",
            SpaceKind::Q => "Q",
            SpaceKind::V => "V",
            SpaceKind::L2 => "L2",
            SpaceKind::WRing => "W_ring",
            SpaceKind::QRing => "Q_ring",
            SpaceKind::VRing => "V_ring",
            SpaceKind::WAver => "W_aver",
            SpaceKind::QPerpRing => "Q_perp_ring",
            SpaceKind::TraceW => "trace_W",
            SpaceKind::TraceQ => "trace_Q",
            SpaceKind::TraceV => "trace_V",
        }
    }

    pub fn parse(s: &str) -> Option<SpaceKind> {
        Some(match s {
            "W" => SpaceKind::W,
            "Q" => SpaceKind::Q,
            "V" => SpaceKind::V,
            "L2" => SpaceKind::L2,
            "W_ring" => SpaceKind::WRing,
            "Q_ring" | "Q_ring_edgezero_2d" => SpaceKind::QRing,
            "V_ring" => SpaceKind::VRing,
            "W_aver" => SpaceKind::WAver,
            "Q_perp_ring" => SpaceKind::QPerpRing,
            "trace_W" => SpaceKind::TraceW,
            "trace_Q" => SpaceKind::TraceQ,
            "trace_V" => SpaceKind::TraceV,
            _ => return None,
        })
    }
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A sub-simplex of a cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubSimplex {
    Vertex(usize),
    Edge(usize),
    Face(usize),
}

#[derive(Clone, Debug)]
pub struct PolySpace {
    pub cell: Arc<ReferenceCell>,
    pub kind: SpaceKind,
    pub p: usize,
    pub value_dim: usize,
    /// Ambient polynomial degree N.
    pub degree: usize,
    /// Orthonormal rows in `P_N^value_dim` coordinates, component-blocked.
    pub basis: DMatrix<f64>,
}

impl PolySpace {
    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn n_scalar(&self) -> usize {
        n_poly(self.cell.dim, self.degree)
    }

    pub fn ambient_len(&self) -> usize {
        self.n_scalar() * self.value_dim
    }

    /// The field with the given coordinates in this space's basis.
    pub fn element(&self, coords: &DVector<f64>) -> PolyFn {
        PolyFn::new(self.cell.clone(), self.degree, self.value_dim, self.basis.transpose() * coords)
    }

    /// Coordinates of the orthogonal projection of ambient coefficients, and the
    /// L² norm of what is left over.
    pub fn project_ambient(&self, amb: &DVector<f64>) -> (DVector<f64>, f64) {
        let c = &self.basis * amb;
        let r = amb - self.basis.transpose() * &c;
        (c, r.norm())
    }

    /// Coordinates of a polynomial field, with the relative residual of the embedding.
    pub fn coords_of(&self, f: &PolyFn) -> (DVector<f64>, f64) {
        let amb = DVector::from_vec(change_degree(f.coeffs.as_slice(), self.cell.dim, self.value_dim, f.degree, self.degree));
        let back = change_degree(amb.as_slice(), self.cell.dim, self.value_dim, self.degree, f.degree);
        let lost = (&f.coeffs - DVector::from_vec(back)).norm();
        let (c, r) = self.project_ambient(&amb);
        let r = r.hypot(lost);
        (c, r / f.coeffs.norm().max(1e-300))
    }

    /// Largest relative residual of ambient rows projected onto the space.
    pub fn embedding_residual(&self, rows: &DMatrix<f64>) -> f64 {
        if rows.nrows() == 0 {
            return 0.0;
        }
        let proj = rows * self.basis.transpose() * &self.basis;
        let mut worst: f64 = 0.0;
        for i in 0..rows.nrows() {
            let n = rows.row(i).norm();
            if n > 0.0 {
                worst = worst.max((rows.row(i) - proj.row(i)).norm() / n);
            }
        }
        worst
    }

    /// Values of all basis functions at `pts`; row `q * value_dim + c` holds component c at point q.
    pub fn sample_basis(&self, pts: &[Point]) -> DMatrix<f64> {
        sample_rows(&self.cell, self.degree, self.value_dim, &self.basis, pts)
    }

    fn with_basis(&self, kind: SpaceKind, basis: DMatrix<f64>) -> PolySpace {
        PolySpace { cell: self.cell.clone(), kind, p: self.p, value_dim: self.value_dim, degree: self.degree, basis }
    }
}

/// Values of coefficient rows at points (point-major, component-minor rows).
pub fn sample_rows(cell: &ReferenceCell, degree: usize, value_dim: usize, rows: &DMatrix<f64>, pts: &[Point]) -> DMatrix<f64> {
    let n = n_poly(cell.dim, degree);
    let t = eval_table(cell, degree, pts);
    let mut out = DMatrix::zeros(pts.len() * value_dim, rows.nrows());
    for c in 0..value_dim {
        let block = rows.columns(c * n, n);
        let vals = &t * block.transpose();
        for q in 0..pts.len() {
            out.row_mut(q * value_dim + c).copy_from(&vals.row(q));
        }
    }
    out
}

/// A polynomial field in ambient coordinates.
#[derive(Clone, Debug)]
pub struct PolyFn {
    pub cell: Arc<ReferenceCell>,
    pub degree: usize,
    pub value_dim: usize,
    pub coeffs: DVector<f64>,
}

impl PolyFn {
    pub fn new(cell: Arc<ReferenceCell>, degree: usize, value_dim: usize, coeffs: DVector<f64>) -> Self {
        assert_eq!(coeffs.len(), n_poly(cell.dim, degree) * value_dim);
        PolyFn { cell, degree, value_dim, coeffs }
    }

    pub fn zero(cell: Arc<ReferenceCell>, degree: usize, value_dim: usize) -> Self {
        let n = n_poly(cell.dim, degree) * value_dim;
        PolyFn::new(cell, degree, value_dim, DVector::zeros(n))
    }

    /// Interpolate a monomial expression given per component.
    pub fn from_monomials(cell: Arc<ReferenceCell>, degree: usize, comps: &[MonoPoly]) -> Self {
        let q = crate::refsimplex::quadrature(&cell, 2 * degree).expect("degree within range");
        let t = eval_table(&cell, degree, &q.points);
        let n = n_poly(cell.dim, degree);
        let mut c = DVector::zeros(n * comps.len());
        for (k, m) in comps.iter().enumerate() {
            for (i, (p, w)) in q.points.iter().zip(&q.weights).enumerate() {
                let v = m.eval(p) * w;
                for j in 0..n {
                    c[k * n + j] += v * t[(i, j)];
                }
            }
        }
        PolyFn::new(cell, degree, comps.len(), c)
    }

    pub fn component(&self, c: usize) -> DVector<f64> {
        let n = n_poly(self.cell.dim, self.degree);
        self.coeffs.rows(c * n, n).into_owned()
    }

    pub fn at_degree(&self, degree: usize) -> PolyFn {
        let c = change_degree(self.coeffs.as_slice(), self.cell.dim, self.value_dim, self.degree, degree);
        PolyFn::new(self.cell.clone(), degree, self.value_dim, DVector::from_vec(c))
    }

    /// L² norm (the ambient basis is orthonormal).
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.norm()
    }

    pub fn sub(&self, other: &PolyFn) -> PolyFn {
        let d = self.degree.max(other.degree);
        let a = self.at_degree(d);
        let b = other.at_degree(d);
        PolyFn::new(self.cell.clone(), d, self.value_dim, a.coeffs - b.coeffs)
    }

    pub fn add(&self, other: &PolyFn) -> PolyFn {
        let d = self.degree.max(other.degree);
        let a = self.at_degree(d);
        let b = other.at_degree(d);
        PolyFn::new(self.cell.clone(), d, self.value_dim, a.coeffs + b.coeffs)
    }

    pub fn scale(&self, s: f64) -> PolyFn {
        PolyFn::new(self.cell.clone(), self.degree, self.value_dim, &self.coeffs * s)
    }

    pub fn eval(&self, x: &Point) -> Vec<f64> {
        let v = eval_basis::<f64>(&self.cell, self.degree, &x[..]);
        let n = v.len();
        (0..self.value_dim).map(|c| (0..n).map(|j| v[j] * self.coeffs[c * n + j]).sum()).collect()
    }
}

/// Anything that can be sampled pointwise: polynomial or analytic fields.
pub trait Field: Sync {
    fn value_dim(&self) -> usize;
    fn eval_into(&self, x: &Point, out: &mut [f64]);

    /// Values at many points, point-major.
    fn sample(&self, pts: &[Point]) -> Vec<f64> {
        let vd = self.value_dim();
        let chunks = crate::par::map_collect(pts.to_vec(), |p| {
            let mut v = vec![0.0; vd];
            self.eval_into(&p, &mut v);
            v
        });
        chunks.concat()
    }
}

impl Field for PolyFn {
    fn value_dim(&self) -> usize {
        self.value_dim
    }
    fn eval_into(&self, x: &Point, out: &mut [f64]) {
        out.copy_from_slice(&self.eval(x));
    }
    fn sample(&self, pts: &[Point]) -> Vec<f64> {
        let rows = DMatrix::from_row_slice(1, self.coeffs.len(), self.coeffs.as_slice());
        let s = sample_rows(&self.cell, self.degree, self.value_dim, &rows, pts);
        s.column(0).iter().cloned().collect()
    }
}

/// How a family of fields is traced onto a sub-simplex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceFamily {
    /// Restriction of a scalar.
    Scalar,
    /// Tangential components in chart coordinates (Π_τ on faces, t_e· on edges).
    Tangential,
    /// Normal component n·u on facets.
    Normal,
}

pub fn family_of(kind: SpaceKind, value_dim: usize) -> TraceFamily {
    if value_dim == 1 {
        return TraceFamily::Scalar;
    }
    match kind {
        SpaceKind::V | SpaceKind::VRing | SpaceKind::TraceV => TraceFamily::Normal,
        _ => TraceFamily::Tangential,
    }
}

/// Chart of a sub-simplex of dimension ≥ 1.
pub fn chart_of(cell: &ReferenceCell, sub: SubSimplex) -> Result<SubChart> {
    match sub {
        SubSimplex::Edge(e) => cell.edge_chart(e),
        SubSimplex::Face(f) => cell.face_chart(f),
        SubSimplex::Vertex(v) => Err(Error::InvalidSubSimplex(format!("vertex {v} has no chart"))),
    }
}

/// Ambient trace operator: maps `P_N(cell)^value_dim` coefficients to
/// `P_N(sub)^k` coefficients (or to point values for a vertex). Returns the
/// matrix, the sub-cell (None for vertices) and k.
pub fn trace_operator(
    cell: &ReferenceCell,
    family: TraceFamily,
    value_dim: usize,
    degree: usize,
    sub: SubSimplex,
) -> Result<(DMatrix<f64>, Option<Arc<ReferenceCell>>, usize)> {
    let n = n_poly(cell.dim, degree);
    if let SubSimplex::Vertex(v) = sub {
        let x = *cell
            .vertices
            .get(v)
            .ok_or_else(|| Error::InvalidSubSimplex(format!("vertex {v}")))?;
        if family != TraceFamily::Scalar {
            return Err(Error::InvalidSubSimplex("only scalar fields have vertex traces".into()));
        }
        return Ok((eval_table(cell, degree, &[x]), None, 1));
    }
    if let SubSimplex::Face(_) = sub {
        if cell.dim != 3 {
            return Err(Error::InvalidSubSimplex(format!("faces of a {}-simplex", cell.dim)));
        }
    }
    let chart = chart_of(cell, sub)?;
    let r = restriction(cell, &chart, degree);
    let ns = r.nrows();
    let dirs: Vec<Point> = match family {
        TraceFamily::Scalar => {
            return Ok(((*r).clone(), Some(chart.cell.clone()), 1));
        }
        TraceFamily::Tangential => chart.axes.clone(),
        TraceFamily::Normal => {
            let idx = match sub {
                SubSimplex::Face(f) if cell.dim == 3 => f,
                SubSimplex::Edge(e) if cell.dim == 2 => e,
                _ => return Err(Error::InvalidSubSimplex("normal trace needs a facet".into())),
            };
            vec![cell.normals[idx]]
        }
    };
    let mut m = DMatrix::zeros(ns * dirs.len(), n * value_dim);
    for (k, d) in dirs.iter().enumerate() {
        for c in 0..value_dim {
            if d[c] != 0.0 {
                m.view_mut((k * ns, c * n), (ns, n)).copy_from(&(&*r * d[c]));
            }
        }
    }
    Ok((m, Some(chart.cell.clone()), dirs.len()))
}

fn unit_rows(value_dim: usize, n: usize, upto: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(value_dim * upto, value_dim * n);
    for c in 0..value_dim {
        for i in 0..upto {
            m[(c * upto + i, c * n + i)] = 1.0;
        }
    }
    m
}

/// P_p^vd plus the given generator rows, whose P_p part is removed before
/// orthonormalization (it is already spanned).
fn extend_with_generators(value_dim: usize, n: usize, lower: usize, gens: DMatrix<f64>) -> DMatrix<f64> {
    let mut g = gens;
    for c in 0..value_dim {
        for i in 0..lower {
            g.column_mut(c * n + i).fill(0.0);
        }
    }
    let mut top = linalg::orth_rows(&g);
    // Singular vectors leak into the zeroed block at roundoff level; clean and re-orthonormalize.
    for c in 0..value_dim {
        for i in 0..lower {
            top.column_mut(c * n + i).fill(0.0);
        }
    }
    let top = if top.nrows() > 0 { top.transpose().qr().q().transpose() } else { top };
    linalg::vstack(&[&unit_rows(value_dim, n, lower), &top], value_dim * n)
}

fn full_space(cell: &Arc<ReferenceCell>, kind: SpaceKind, p: usize) -> Result<PolySpace> {
    let d = cell.dim;
    let (vd, degree) = match (kind, d) {
        (SpaceKind::W, _) => (1, p + 1),
        (SpaceKind::L2, _) => (1, p),
        (SpaceKind::Q, 1) => (1, p + 1),
        (SpaceKind::Q, _) => (d, p + 1),
        (SpaceKind::V, 2) => (1, p + 1),
        (SpaceKind::V, 3) => (3, p + 1),
        _ => return Err(Error::UnsupportedSpace(format!("{kind} on a {d}-simplex"))),
    };
    let n = n_poly(d, degree);
    let lower = n_poly(d, p);
    let basis = match (kind, d) {
        (SpaceKind::W, _) | (SpaceKind::L2, _) => DMatrix::identity(n, n),
        (SpaceKind::Q, 1) | (SpaceKind::V, 2) => unit_rows(1, n, lower),
        (SpaceKind::Q, _) | (SpaceKind::V, _) => {
            let alg = algebra(cell, degree);
            let x: Vec<DMatrix<f64>> = (0..d).map(|k| alg.x(k, p)).collect();
            let first = if p == 0 { 0 } else { n_poly(d, p - 1) };
            let mut gens = Vec::new();
            for j in first..lower {
                let col = |k: usize| x[k].column(j).into_owned();
                match (kind, d) {
                    (SpaceKind::Q, 3) => {
                        // x × (ψ_j e_k) for k = 0, 1, 2.
                        for k in 0..3 {
                            let (a, b) = ((k + 1) % 3, (k + 2) % 3);
                            let mut row = DVector::zeros(3 * n);
                            row.rows_mut(a * n, n).copy_from(&col(b));
                            row.rows_mut(b * n, n).copy_from(&(-col(a)));
                            gens.push(row);
                        }
                    }
                    (SpaceKind::Q, 2) => {
                        // ψ_j (x_2, −x_1).
                        let mut row = DVector::zeros(2 * n);
                        row.rows_mut(0, n).copy_from(&col(1));
                        row.rows_mut(n, n).copy_from(&(-col(0)));
                        gens.push(row);
                    }
                    _ => {
                        // ψ_j x.
                        let mut row = DVector::zeros(3 * n);
                        for k in 0..3 {
                            row.rows_mut(k * n, n).copy_from(&col(k));
                        }
                        gens.push(row);
                    }
                }
            }
            let mut g = DMatrix::zeros(gens.len(), vd * n);
            for (i, r) in gens.iter().enumerate() {
                g.row_mut(i).copy_from(&r.transpose());
            }
            extend_with_generators(vd, n, lower, g)
        }
        _ => unreachable!(),
    };
    Ok(PolySpace { cell: cell.clone(), kind, p, value_dim: vd, degree, basis })
}

/// Stacked boundary trace operator of the whole cell for a family.
fn boundary_trace(space: &PolySpace, family: TraceFamily) -> Result<DMatrix<f64>> {
    let cell = &space.cell;
    let subs: Vec<SubSimplex> = match cell.dim {
        3 => (0..4).map(SubSimplex::Face).collect(),
        2 => (0..3).map(SubSimplex::Edge).collect(),
        _ => (0..2).map(SubSimplex::Vertex).collect(),
    };
    let mut blocks = Vec::new();
    for s in subs {
        blocks.push(trace_operator(cell, family, space.value_dim, space.degree, s)?.0);
    }
    let refs: Vec<&DMatrix<f64>> = blocks.iter().collect();
    Ok(linalg::vstack(&refs, space.ambient_len()))
}

fn null_within(space: &PolySpace, op: &DMatrix<f64>, kind: SpaceKind) -> PolySpace {
    let coords = linalg::null_space_rows(&(op * space.basis.transpose()));
    let basis = if coords.nrows() == 0 { DMatrix::zeros(0, space.ambient_len()) } else { coords * &space.basis };
    space.with_basis(kind, basis)
}

fn mean_zero(space: &PolySpace, kind: SpaceKind) -> PolySpace {
    let mut op = DMatrix::zeros(1, space.ambient_len());
    op[(0, 0)] = 1.0;
    null_within(space, &op, kind)
}

/// Build one of the spaces of the discrete sequence on `cell`.
pub fn build_space(cell: &Arc<ReferenceCell>, kind: SpaceKind, p: i64) -> Result<PolySpace> {
    if p < 0 {
        return Err(Error::NegativeDegree(p));
    }
    let p = p as usize;
    let d = cell.dim;
    match kind {
        SpaceKind::W | SpaceKind::Q | SpaceKind::V | SpaceKind::L2 => full_space(cell, kind, p),
        SpaceKind::WRing => {
            let w = full_space(cell, SpaceKind::W, p)?;
            let t = boundary_trace(&w, TraceFamily::Scalar)?;
            Ok(null_within(&w, &t, kind))
        }
        SpaceKind::WAver => Ok(mean_zero(&full_space(cell, SpaceKind::W, p)?, kind)),
        SpaceKind::QRing => {
            let q = full_space(cell, SpaceKind::Q, p)?;
            if d == 1 {
                return Ok(mean_zero(&q, kind));
            }
            let t = boundary_trace(&q, TraceFamily::Tangential)?;
            Ok(null_within(&q, &t, kind))
        }
        SpaceKind::VRing => {
            let v = full_space(cell, SpaceKind::V, p)?;
            match d {
                3 => {
                    let t = boundary_trace(&v, TraceFamily::Normal)?;
                    Ok(null_within(&v, &t, kind))
                }
                2 => Ok(mean_zero(&v, kind)),
                _ => Err(Error::UnsupportedSpace("V_ring on an edge".into())),
            }
        }
        SpaceKind::QPerpRing => {
            if d == 1 {
                return Err(Error::UnsupportedSpace("Q_perp_ring on an edge".into()));
            }
            let qr = build_space(cell, SpaceKind::QRing, p as i64)?;
            let wr = build_space(cell, SpaceKind::WRing, p as i64)?;
            let g = crate::calculus::grad_rows(&wr);
            let basis = linalg::complement_rows(&qr.basis, &g);
            Ok(qr.with_basis(kind, basis))
        }
        SpaceKind::TraceW | SpaceKind::TraceQ | SpaceKind::TraceV => {
            Err(Error::UnsupportedSpace(format!("{kind} is produced by trace_space")))
        }
    }
}

/// Image of `space` under its natural trace onto `sub`.
pub fn trace_space(space: &PolySpace, sub: SubSimplex) -> Result<PolySpace> {
    let family = family_of(space.kind, space.value_dim);
    let (op, subcell, k) = trace_operator(&space.cell, family, space.value_dim, space.degree, sub)?;
    let subcell = subcell.ok_or_else(|| Error::InvalidSubSimplex("trace space of a vertex".into()))?;
    let img = &op * space.basis.transpose();
    let basis = linalg::orth_rows(&img.transpose());
    let kind = match family {
        TraceFamily::Scalar if matches!(space.kind, SpaceKind::V | SpaceKind::VRing) => SpaceKind::TraceV,
        TraceFamily::Scalar => SpaceKind::TraceW,
        TraceFamily::Tangential => SpaceKind::TraceQ,
        TraceFamily::Normal => SpaceKind::TraceV,
    };
    Ok(PolySpace { cell: subcell, kind, p: space.p, value_dim: k, degree: space.degree, basis })
}

/// The bubble subspace associated with a space.
pub fn bubble_space(space: &PolySpace) -> Result<PolySpace> {
    let kind = match space.kind {
        SpaceKind::W | SpaceKind::WAver | SpaceKind::WRing => SpaceKind::WRing,
        SpaceKind::Q | SpaceKind::QRing => SpaceKind::QRing,
        SpaceKind::V | SpaceKind::VRing => SpaceKind::VRing,
        SpaceKind::QPerpRing => SpaceKind::QPerpRing,
        k => return Err(Error::UnsupportedSpace(format!("bubbles of {k}"))),
    };
    build_space(&space.cell, kind, space.p as i64)
}

/// Closed-form dimensions where known.
pub fn closed_form_dim(cell_dim: usize, kind: SpaceKind, p: usize) -> Option<usize> {
    Some(match (cell_dim, kind) {
        (3, SpaceKind::W) => (p + 4) * (p + 3) * (p + 2) / 6,
        (3, SpaceKind::Q) => (p + 1) * (p + 3) * (p + 4) / 2,
        (3, SpaceKind::V) => (p + 2) * (p + 1) * p / 2 + 4 * (p + 1) * (p + 2) / 2,
        (3, SpaceKind::L2) => (p + 1) * (p + 2) * (p + 3) / 6,
        (3, SpaceKind::WRing) => p * p.saturating_sub(1) * p.saturating_sub(2) / 6,
        (3, SpaceKind::QRing) => (p + 1) * p * p.saturating_sub(1) / 2,
        (3, SpaceKind::WAver) => (p + 4) * (p + 3) * (p + 2) / 6 - 1,
        (3, SpaceKind::VRing) => (p + 2) * (p + 1) * p / 2,
        (2, SpaceKind::W) => (p + 2) * (p + 3) / 2,
        (2, SpaceKind::Q) => (p + 1) * (p + 3),
        (2, SpaceKind::V) | (2, SpaceKind::L2) => (p + 1) * (p + 2) / 2,
        (2, SpaceKind::WRing) => p * p.saturating_sub(1) / 2,
        (2, SpaceKind::QRing) => p * (p + 1),
        (2, SpaceKind::VRing) => (p + 1) * (p + 2) / 2 - 1,
        (1, SpaceKind::W) => p + 2,
        (1, SpaceKind::Q) | (1, SpaceKind::L2) => p + 1,
        (1, SpaceKind::WRing) => p,
        (1, SpaceKind::QRing) => p,
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::refsimplex::{tet, tri};

    #[test]
    fn small_dimensions() {
        assert_eq!(build_space(&tet(), SpaceKind::W, 2).unwrap().dim(), 20);
        assert_eq!(build_space(&tet(), SpaceKind::V, 1).unwrap().dim(), 15);
        assert_eq!(build_space(&tet(), SpaceKind::Q, 0).unwrap().dim(), 6);
        assert_eq!(build_space(&tri(), SpaceKind::Q, 0).unwrap().dim(), 3);
        assert!(matches!(build_space(&tet(), SpaceKind::W, -1), Err(Error::NegativeDegree(-1))));
    }

    #[test]
    fn basis_rows_orthonormal() {
        let q = build_space(&tet(), SpaceKind::Q, 3).unwrap();
        let g = &q.basis * q.basis.transpose();
        assert!((g - DMatrix::identity(q.dim(), q.dim())).abs().max() < 1e-12);
    }
}
