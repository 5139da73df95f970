//! Exact differential and trace operators acting on orthonormal-basis
//! coefficients, and the exact-sequence checks built from them.

use crate::error::{Error, Result};
use crate::linalg;
use crate::polyspace::{
    algebra, build_space, change_degree, degree_embedding, n_poly, trace_operator, PolyFn, PolySpace, SpaceKind,
    SubSimplex, TraceFamily,
};
use crate::refsimplex::ReferenceCell;
use crate::report::{CheckLine, Report};
use nalgebra::{DMatrix, DVector};
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiffOp {
    Grad,
    Curl3d,
    /// Scalar rotated gradient 𝐜𝐮𝐫𝐥 u = (∂₂u, −∂₁u).
    Curl2dScalar,
    /// curl u = ∂₁u₂ − ∂₂u₁.
    Curl2dVector,
    Div,
}

/// Ambient matrix of a differential operator at degree `n` on `cell`;
/// input and output are both degree `n`, component-blocked.
pub fn ambient_diff(cell: &ReferenceCell, op: DiffOp, n: usize) -> DMatrix<f64> {
    let d = cell.dim;
    let alg = algebra(cell, n);
    let m = n_poly(d, n);
    let dk = |k: usize| alg.d(k, n);
    let (rows, cols) = match op {
        DiffOp::Grad => (d, 1),
        DiffOp::Curl3d => (3, 3),
        DiffOp::Curl2dScalar => (2, 1),
        DiffOp::Curl2dVector => (1, 2),
        DiffOp::Div => (1, d),
    };
    let mut out = DMatrix::zeros(rows * m, cols * m);
    let mut put = |r: usize, c: usize, mat: DMatrix<f64>| {
        let mut v = out.view_mut((r * m, c * m), (m, m));
        v += mat;
    };
    match op {
        DiffOp::Grad => (0..d).for_each(|k| put(k, 0, dk(k))),
        DiffOp::Curl3d => {
            for i in 0..3 {
                let (a, b) = ((i + 1) % 3, (i + 2) % 3);
                put(i, b, dk(a));
                put(i, a, -dk(b));
            }
        }
        DiffOp::Curl2dScalar => {
            put(0, 0, dk(1));
            put(1, 0, -dk(0));
        }
        DiffOp::Curl2dVector => {
            put(0, 1, dk(0));
            put(0, 0, -dk(1));
        }
        DiffOp::Div => (0..d).for_each(|k| put(0, k, dk(k))),
    }
    out
}

/// Apply a differential operator to a polynomial field.
pub fn apply_diff(op: DiffOp, f: &PolyFn) -> PolyFn {
    let m = ambient_diff(&f.cell, op, f.degree);
    let vd = match op {
        DiffOp::Grad => f.cell.dim,
        DiffOp::Curl3d => 3,
        DiffOp::Curl2dScalar => 2,
        DiffOp::Curl2dVector | DiffOp::Div => 1,
    };
    PolyFn::new(f.cell.clone(), f.degree, vd, m * &f.coeffs)
}

/// Gradients of the basis rows of a scalar space, as ambient vector rows.
pub fn grad_rows(space: &PolySpace) -> DMatrix<f64> {
    image_rows(space, DiffOp::Grad)
}

/// Images of the basis rows of `space` under `op`, as ambient rows at the same degree.
pub fn image_rows(space: &PolySpace, op: DiffOp) -> DMatrix<f64> {
    let m = ambient_diff(&space.cell, op, space.degree);
    &space.basis * m.transpose()
}

/// An operator between two spaces in their bases.
#[derive(Clone, Debug)]
pub struct LinearOpMatrix {
    pub source: PolySpace,
    pub target: PolySpace,
    /// `matrix[(i, j)]`: coordinate i of the image of source basis function j.
    pub matrix: DMatrix<f64>,
    /// Relative residual of re-expanding the images in the target.
    pub residual: f64,
}

const EMBED_TOL: f64 = 1e-11;

fn expand(source: &PolySpace, target: PolySpace, images: DMatrix<f64>, img_degree: usize, img_vd: usize) -> Result<LinearOpMatrix> {
    // images: rows in P_{img_degree}^{img_vd}; move to the target's degree.
    let e = degree_embedding(target.cell.dim, img_vd, img_degree, target.degree);
    let lost: f64 = {
        let back = degree_embedding(target.cell.dim, img_vd, target.degree, img_degree);
        let round = &images * e.transpose() * back.transpose();
        linalg::max_abs(&(&images - round))
    };
    let rows = &images * e.transpose();
    let matrix = (&rows * target.basis.transpose()).transpose();
    let scale = linalg::max_abs(&images).max(1.0);
    let residual = target.embedding_residual(&rows).max(lost / scale);
    if residual > EMBED_TOL {
        return Err(Error::NotInTarget { residual });
    }
    Ok(LinearOpMatrix { source: source.clone(), target, matrix, residual })
}

/// Differential operator from a space into the next space of its sequence.
pub fn diff_op(op: DiffOp, source: &PolySpace) -> Result<LinearOpMatrix> {
    let cell = &source.cell;
    let p = source.p as i64;
    let target_kind = match (op, cell.dim) {
        (DiffOp::Grad, 2 | 3) => SpaceKind::Q,
        (DiffOp::Curl3d, 3) => SpaceKind::V,
        (DiffOp::Div, 3) => SpaceKind::L2,
        (DiffOp::Curl2dScalar, 2) => SpaceKind::Q,
        (DiffOp::Curl2dVector, 2) => SpaceKind::L2,
        (DiffOp::Grad, 1) => SpaceKind::Q,
        _ => return Err(Error::UnsupportedSpace(format!("{op:?} on a {}-simplex", cell.dim))),
    };
    let target = build_space(cell, target_kind, p)?;
    let images = image_rows(source, op);
    let vd = images.ncols() / source.n_scalar();
    expand(source, target, images, source.degree, vd)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceOp {
    PiTau,
    GammaTau,
    Normal,
    EdgeTangential,
    SurfGrad,
    SurfCurl,
}

/// Ambient matrix of a trace operator and the resulting sub-cell layout.
pub fn ambient_trace(
    cell: &ReferenceCell,
    op: TraceOp,
    value_dim: usize,
    degree: usize,
    sub: SubSimplex,
) -> Result<(DMatrix<f64>, Arc<ReferenceCell>, usize)> {
    let need_face = |s: SubSimplex| match s {
        SubSimplex::Face(_) => Ok(()),
        _ => Err(Error::InvalidSubSimplex(format!("{op:?} needs a face"))),
    };
    let (fam, out) = match op {
        TraceOp::PiTau | TraceOp::GammaTau => {
            need_face(sub)?;
            (TraceFamily::Tangential, 2)
        }
        TraceOp::Normal => (TraceFamily::Normal, 1),
        TraceOp::EdgeTangential => match sub {
            SubSimplex::Edge(_) => (TraceFamily::Tangential, 1),
            _ => return Err(Error::InvalidSubSimplex("edge tangential trace needs an edge".into())),
        },
        TraceOp::SurfGrad => {
            need_face(sub)?;
            (TraceFamily::Scalar, 1)
        }
        TraceOp::SurfCurl => {
            need_face(sub)?;
            (TraceFamily::Tangential, 2)
        }
    };
    let (t, subcell, _) = trace_operator(cell, fam, value_dim, degree, sub)?;
    let subcell = subcell.expect("face or edge");
    let ns = n_poly(subcell.dim, degree);
    let m = match op {
        TraceOp::GammaTau => {
            // n × (a e1 + b e2) = a e2 − b e1 with n = e1 × e2.
            let mut g = DMatrix::zeros(t.nrows(), t.ncols());
            g.view_mut((0, 0), (ns, t.ncols())).copy_from(&(-t.rows(ns, ns)));
            g.view_mut((ns, 0), (ns, t.ncols())).copy_from(&t.rows(0, ns));
            g
        }
        TraceOp::SurfGrad => ambient_diff(&subcell, DiffOp::Grad, degree) * t,
        TraceOp::SurfCurl => ambient_diff(&subcell, DiffOp::Curl2dVector, degree) * t,
        _ => t,
    };
    let vd = match op {
        TraceOp::SurfGrad => 2,
        TraceOp::SurfCurl => 1,
        _ => out,
    };
    Ok((m, subcell, vd))
}

/// Trace operator from a space onto the range it spans on `sub`.
pub fn trace_op(op: TraceOp, source: &PolySpace, sub: SubSimplex) -> Result<LinearOpMatrix> {
    let (m, subcell, vd) = ambient_trace(&source.cell, op, source.value_dim, source.degree, sub)?;
    let images = &source.basis * m.transpose();
    let basis = linalg::orth_rows(&images);
    let kind = match op {
        TraceOp::Normal | TraceOp::SurfCurl => SpaceKind::TraceV,
        TraceOp::SurfGrad => SpaceKind::TraceQ,
        _ if vd == 1 && source.value_dim == 1 => SpaceKind::TraceW,
        _ => SpaceKind::TraceQ,
    };
    let target = PolySpace { cell: subcell, kind, p: source.p, value_dim: vd, degree: source.degree, basis };
    expand(source, target, images, source.degree, vd)
}

/// Ranks and dimension identities of the full and bubble sequences.
pub fn check_exact_sequence(p: usize) -> Result<Report> {
    let mut rep = Report::default();
    let pi = p as i64;
    let tet = crate::refsimplex::tet();
    let tri = crate::refsimplex::tri();
    let scale_tol = 1e-12;

    // 3D full sequence.
    let w = build_space(&tet, SpaceKind::W, pi)?;
    let q = build_space(&tet, SpaceKind::Q, pi)?;
    let v = build_space(&tet, SpaceKind::V, pi)?;
    let l2 = build_space(&tet, SpaceKind::L2, pi)?;
    let g = diff_op(DiffOp::Grad, &w)?;
    let c = diff_op(DiffOp::Curl3d, &q)?;
    let d = diff_op(DiffOp::Div, &v)?;
    let cg = &c.matrix * &g.matrix;
    let dc = &d.matrix * &c.matrix;
    let sc = linalg::max_abs(&c.matrix).max(1.0) * linalg::max_abs(&g.matrix).max(1.0);
    rep.push(CheckLine::at_most(format!("3d p={p} curl grad = 0"), linalg::max_abs(&cg) / sc, scale_tol));
    let sd = linalg::max_abs(&d.matrix).max(1.0) * linalg::max_abs(&c.matrix).max(1.0);
    rep.push(CheckLine::at_most(format!("3d p={p} div curl = 0"), linalg::max_abs(&dc) / sd, scale_tol));
    let (rg, rc, rd) = (linalg::rank(&g.matrix), linalg::rank(&c.matrix), linalg::rank(&d.matrix));
    rep.push(CheckLine::equal(format!("3d p={p} ker grad = constants"), w.dim() - rg, 1));
    rep.push(CheckLine::equal(format!("3d p={p} ker curl = range grad"), q.dim() - rc, rg));
    rep.push(CheckLine::equal(format!("3d p={p} ker div = range curl"), v.dim() - rd, rc));
    rep.push(CheckLine::equal(format!("3d p={p} div onto W_p"), rd, l2.dim()));

    // 3D bubbles.
    let wr = build_space(&tet, SpaceKind::WRing, pi)?;
    let qr = build_space(&tet, SpaceKind::QRing, pi)?;
    let vr = build_space(&tet, SpaceKind::VRing, pi)?;
    let grad_wr = linalg::rank(&grad_rows(&wr));
    let curl_qr = linalg::rank(&image_rows(&qr, DiffOp::Curl3d));
    let div_vr = linalg::rank(&image_rows(&vr, DiffOp::Div));
    rep.push(CheckLine::equal(format!("3d p={p} dim Q_ring = dim grad W_ring + dim curl Q_ring"), qr.dim(), grad_wr + curl_qr));
    rep.push(CheckLine::equal(format!("3d p={p} dim V_ring = dim curl Q_ring + dim div V_ring"), vr.dim(), curl_qr + div_vr));
    rep.push(CheckLine::equal(format!("3d p={p} div V_ring = mean-zero W_p"), div_vr, l2.dim() - 1));

    // 2D full and bubble sequences on the reference triangle.
    let w2 = build_space(&tri, SpaceKind::W, pi)?;
    let q2 = build_space(&tri, SpaceKind::Q, pi)?;
    let g2 = diff_op(DiffOp::Grad, &w2)?;
    let c2 = diff_op(DiffOp::Curl2dVector, &q2)?;
    let cg2 = &c2.matrix * &g2.matrix;
    let s2 = linalg::max_abs(&c2.matrix).max(1.0) * linalg::max_abs(&g2.matrix).max(1.0);
    rep.push(CheckLine::at_most(format!("2d p={p} curl grad = 0"), linalg::max_abs(&cg2) / s2, scale_tol));
    let (rg2, rc2) = (linalg::rank(&g2.matrix), linalg::rank(&c2.matrix));
    rep.push(CheckLine::equal(format!("2d p={p} ker grad = constants"), w2.dim() - rg2, 1));
    rep.push(CheckLine::equal(format!("2d p={p} ker curl = range grad"), q2.dim() - rc2, rg2));
    rep.push(CheckLine::equal(format!("2d p={p} curl onto P_p"), rc2, c2.target.dim()));
    let wr2 = build_space(&tri, SpaceKind::WRing, pi)?;
    let qr2 = build_space(&tri, SpaceKind::QRing, pi)?;
    let vr2 = build_space(&tri, SpaceKind::VRing, pi)?;
    let curl_rows = image_rows(&qr2, DiffOp::Curl2dVector);
    let curl_qr2 = linalg::rank(&curl_rows);
    rep.push(CheckLine::equal(
        format!("2d p={p} dim Q_ring = dim grad W_ring + dim curl Q_ring"),
        qr2.dim(),
        linalg::rank(&grad_rows(&wr2)) + curl_qr2,
    ));
    rep.push(CheckLine::equal(format!("2d p={p} dim curl Q_ring = dim V_ring"), curl_qr2, vr2.dim()));
    rep.push(CheckLine::at_most(format!("2d p={p} curl Q_ring inside V_ring"), vr2.embedding_residual(&curl_rows), 1e-10));
    Ok(rep)
}

/// Convenience: coefficients of a polynomial field at another degree.
pub fn reblock(f: &PolyFn, degree: usize) -> DVector<f64> {
    DVector::from_vec(change_degree(f.coeffs.as_slice(), f.cell.dim, f.value_dim, f.degree, degree))
}
