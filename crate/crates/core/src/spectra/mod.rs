//! Discrete Friedrichs constants, inf-sup constants of the lifting saddle
//! problems, minimum-energy liftings with orthogonality constraints, and the
//! discrete trace norm `X^{-1/2}`.
//!
//! All spaces live in the orthonormal ambient basis, so L² Gram matrices of
//! basis rows are identities and every energy is a plain coefficient norm of
//! the differentiated rows.

use crate::calculus::{image_rows, DiffOp};
use crate::error::{Error, Result};
use crate::linalg;
use crate::polyspace::{build_space, trace_operator, PolyFn, PolySpace, SpaceKind, SubSimplex, TraceFamily};
use crate::refsimplex::{tet, tri};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use std::fmt;
use std::io::Write;

#[cfg(test)]
mod tests;

/// Largest constraint residual tolerated in a constrained basis.
pub const CONSTRAINT_TOL: f64 = 1e-11;

/// Which orthogonality defines a constrained subspace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    /// `(u, ∇ψ) = 0` for all `ψ ∈ W_{p+1}`.
    GradOrthogonalFull,
    /// `(u, ∇ψ) = 0` for all `ψ ∈ W̊_{p+1}`.
    GradOrthogonalBubble,
    /// `(u, curl v) = 0` for all `v ∈ Q_p`.
    CurlOrthogonalFull,
    /// `(u, curl v) = 0` for all `v ∈ Q̊_{p,⊥}`.
    CurlOrthogonalBubblePerp,
}

/// A subspace of `parent` cut out by a constraint, with an orthonormal basis.
#[derive(Clone, Debug)]
pub struct ConstrainedSubspace {
    pub parent: PolySpace,
    pub constraint: Constraint,
    /// Orthonormal ambient rows of the multiplier images (∇ψ or curl v).
    pub constraint_rows: DMatrix<f64>,
    /// Orthonormal ambient rows spanning the constrained subspace.
    pub basis: DMatrix<f64>,
    /// Largest |(b, g)| over basis rows b and constraint rows g.
    pub residual: f64,
}

impl ConstrainedSubspace {
    pub fn new(parent: PolySpace, constraint: Constraint) -> Result<Self> {
        let cell = &parent.cell;
        let p = parent.p as i64;
        let images = match constraint {
            Constraint::GradOrthogonalFull => image_rows(&build_space(cell, SpaceKind::W, p)?, DiffOp::Grad),
            Constraint::GradOrthogonalBubble => image_rows(&build_space(cell, SpaceKind::WRing, p)?, DiffOp::Grad),
            Constraint::CurlOrthogonalFull => image_rows(&build_space(cell, SpaceKind::Q, p)?, DiffOp::Curl3d),
            Constraint::CurlOrthogonalBubblePerp => {
                image_rows(&build_space(cell, SpaceKind::QPerpRing, p)?, DiffOp::Curl3d)
            }
        };
        if images.ncols() != parent.ambient_len() {
            return Err(Error::UnsupportedSpace(format!("{constraint:?} on {}", parent.kind)));
        }
        let constraint_rows = linalg::orth_rows(&images);
        let basis = linalg::complement_rows(&parent.basis, &constraint_rows);
        let residual = linalg::max_abs(&(&basis * constraint_rows.transpose()));
        if residual > CONSTRAINT_TOL {
            return Err(Error::Residual { context: format!("{constraint:?} basis"), residual, tol: CONSTRAINT_TOL });
        }
        Ok(ConstrainedSubspace { parent, constraint, constraint_rows, basis, residual })
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    /// Relative size of the constraint functionals on a field of the parent.
    pub fn constraint_residual(&self, u: &PolyFn) -> f64 {
        let (c, _) = self.parent.coords_of(u);
        let amb = self.parent.basis.transpose() * c;
        let n = amb.norm();
        if n == 0.0 {
            return 0.0;
        }
        (&self.constraint_rows * amb).norm() / n
    }

    /// Whether `u` lies in the parent and satisfies the constraint.
    pub fn contains(&self, u: &PolyFn, tol: f64) -> bool {
        self.parent.coords_of(u).1 <= tol && self.constraint_residual(u) <= tol
    }
}

/// The six constrained cases of the three discrete Friedrichs lemmas.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum FriedrichsCase {
    /// `u ∈ Q_p(f̂)`, `(u, ∇v) = 0` for `v ∈ W_{p+1}(f̂)`.
    Curl2dFull,
    /// `u ∈ Q̊_p(f̂)`, `(u, ∇v) = 0` for `v ∈ W̊_{p+1}(f̂)`.
    Curl2dBubble,
    /// `u ∈ Q_{p,⊥}(K̂)`.
    Curl3dFull,
    /// `u ∈ Q̊_{p,⊥}(K̂)`.
    Curl3dBubble,
    /// `u ∈ V_p(K̂)`, `(u, curl v) = 0` for `v ∈ Q_p(K̂)`.
    DivFull,
    /// `u ∈ V̊_p(K̂)`, `(u, curl v) = 0` for `v ∈ Q̊_{p,⊥}(K̂)`.
    DivBubble,
}

impl FriedrichsCase {
    pub const ALL: [FriedrichsCase; 6] = [
        FriedrichsCase::Curl2dFull,
        FriedrichsCase::Curl2dBubble,
        FriedrichsCase::Curl3dFull,
        FriedrichsCase::Curl3dBubble,
        FriedrichsCase::DivFull,
        FriedrichsCase::DivBubble,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            FriedrichsCase::Curl2dFull => "curl2d_i",
            FriedrichsCase::Curl2dBubble => "curl2d_ii",
            FriedrichsCase::Curl3dFull => "curl3d_i",
            FriedrichsCase::Curl3dBubble => "curl3d_ii",
            FriedrichsCase::DivFull => "div3d_i",
            FriedrichsCase::DivBubble => "div3d_ii",
        }
    }

    pub fn parse(s: &str) -> Option<FriedrichsCase> {
        FriedrichsCase::ALL.into_iter().find(|c| c.id() == s)
    }

    fn op(&self) -> DiffOp {
        match self {
            FriedrichsCase::Curl2dFull | FriedrichsCase::Curl2dBubble => DiffOp::Curl2dVector,
            FriedrichsCase::Curl3dFull | FriedrichsCase::Curl3dBubble => DiffOp::Curl3d,
            FriedrichsCase::DivFull | FriedrichsCase::DivBubble => DiffOp::Div,
        }
    }

    /// The constrained subspace of this case at order `p`.
    pub fn subspace(&self, p: usize) -> Result<ConstrainedSubspace> {
        let p = p as i64;
        let (cell, kind, constraint) = match self {
            FriedrichsCase::Curl2dFull => (tri(), SpaceKind::Q, Constraint::GradOrthogonalFull),
            FriedrichsCase::Curl2dBubble => (tri(), SpaceKind::QRing, Constraint::GradOrthogonalBubble),
            FriedrichsCase::Curl3dFull => (tet(), SpaceKind::Q, Constraint::GradOrthogonalFull),
            FriedrichsCase::Curl3dBubble => (tet(), SpaceKind::QRing, Constraint::GradOrthogonalBubble),
            FriedrichsCase::DivFull => (tet(), SpaceKind::V, Constraint::CurlOrthogonalFull),
            FriedrichsCase::DivBubble => (tet(), SpaceKind::VRing, Constraint::CurlOrthogonalBubblePerp),
        };
        ConstrainedSubspace::new(build_space(&cell, kind, p)?, constraint)
    }
}

impl fmt::Display for FriedrichsCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// One Friedrichs measurement.
#[derive(Clone, Debug, Serialize)]
pub struct FriedrichsRecord {
    pub case: FriedrichsCase,
    pub p: usize,
    pub dim: usize,
    /// `min ‖Du‖/‖u‖` over the constrained subspace; `+∞` when it is empty.
    pub min_ratio: f64,
    /// Reciprocal of `min_ratio`; zero when the subspace is empty.
    pub constant: f64,
    /// Smallest singular value of the Lagrange system `[[I + DᵀD, Bᵀ], [B, 0]]`
    /// that imposes the constraint on the parent space; `+∞` when it is empty.
    pub kkt_min_sigma: f64,
    pub empty: bool,
}

fn smallest_eigenvalue(g: DMatrix<f64>) -> f64 {
    g.symmetric_eigen().eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Saddle matrix `[[A, Bᵀ], [B, 0]]`.
fn saddle(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, m) = (a.nrows(), b.nrows());
    let mut k = DMatrix::zeros(n + m, n + m);
    k.view_mut((0, 0), (n, n)).copy_from(a);
    k.view_mut((n, 0), (m, n)).copy_from(b);
    k.view_mut((0, n), (n, m)).copy_from(&b.transpose());
    k
}

/// Discrete Friedrichs constant of one case: the reciprocal of the smallest
/// `‖Du‖/‖u‖` over the constrained subspace, from the projected eigenproblem.
pub fn friedrichs_constant(case: FriedrichsCase, p: usize) -> Result<FriedrichsRecord> {
    let sub = case.subspace(p)?;
    let op = case.op();
    let cell = &sub.parent.cell;
    let d = crate::calculus::ambient_diff(cell, op, sub.parent.degree);

    let parent_img = &sub.parent.basis * d.transpose();
    let a = DMatrix::identity(sub.parent.dim(), sub.parent.dim()) + &parent_img * parent_img.transpose();
    let b = &sub.constraint_rows * sub.parent.basis.transpose();
    let k = saddle(&a, &b);
    let kkt_min_sigma = if k.nrows() == 0 { f64::INFINITY } else { linalg::sigma_range(&k).0 };

    let dim = sub.dim();
    if dim == 0 {
        return Ok(FriedrichsRecord { case, p, dim, min_ratio: f64::INFINITY, constant: 0.0, kkt_min_sigma, empty: true });
    }
    let img = &sub.basis * d.transpose();
    let lambda = smallest_eigenvalue(&img * img.transpose()).max(0.0);
    let min_ratio = lambda.sqrt();
    let constant = if min_ratio > 0.0 { 1.0 / min_ratio } else { f64::INFINITY };
    Ok(FriedrichsRecord { case, p, dim, min_ratio, constant, kkt_min_sigma, empty: false })
}

/// Friedrichs records for every case and every `p` in the range, in (case, p) order.
pub fn friedrichs_sweep(cases: &[FriedrichsCase], p_min: usize, p_max: usize) -> Result<Vec<FriedrichsRecord>> {
    let jobs: Vec<(FriedrichsCase, usize)> =
        cases.iter().flat_map(|&c| (p_min..=p_max).map(move |p| (c, p))).collect();
    crate::par::map_collect(jobs, |(c, p)| friedrichs_constant(c, p)).into_iter().collect()
}

/// CSV with columns `case, p, constant, min_singular_value`.
pub fn write_friedrichs_csv<W: Write>(records: &[FriedrichsRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["case", "p", "constant", "min_singular_value"])?;
    for r in records {
        w.write_record([r.case.id().to_string(), r.p.to_string(), format!("{:e}", r.constant), format!("{:e}", r.kkt_min_sigma)])?;
    }
    w.flush()?;
    Ok(())
}

/// Inf-sup constant of a saddle coupling `b(w, φ)` with the given norms.
#[derive(Clone, Debug, Serialize)]
pub struct InfSup {
    pub p: usize,
    /// `inf_φ sup_w b(w, φ) / (‖w‖ ‖φ‖)`.
    pub beta: f64,
    /// Smallest singular value of the assembled lifting saddle system.
    pub kkt_min_sigma: f64,
}

/// `σ_min(L_φ⁻¹ B L_w⁻ᵀ)` with Cholesky factors of the two norm Gram matrices.
fn whitened_sigma_min(b: &DMatrix<f64>, gram_w: &DMatrix<f64>, gram_phi: &DMatrix<f64>) -> Result<f64> {
    if b.nrows() == 0 {
        return Ok(f64::INFINITY);
    }
    let chol = |g: &DMatrix<f64>, what: &str| {
        g.clone().cholesky().ok_or_else(|| Error::Singular { context: format!("{what} norm Gram"), sigma: 0.0 })
    };
    let lw = chol(gram_w, "primal")?.l();
    let lp = chol(gram_phi, "multiplier")?.l();
    let left = lp.solve_lower_triangular(b).expect("Cholesky factor is invertible");
    let whitened = lw.solve_lower_triangular(&left.transpose()).expect("Cholesky factor is invertible").transpose();
    Ok(linalg::sigma_range(&whitened).0)
}

struct SaddleBlocks {
    /// Primal bubble basis (Q̊ or V̊).
    primal: PolySpace,
    /// Multiplier basis (W̊ or Q̊_⊥).
    multiplier: PolySpace,
    /// Energy images of the primal basis rows (curl or div).
    primal_energy: DMatrix<f64>,
    /// Images of the multiplier rows entering `b` (∇ψ or curl φ).
    multiplier_images: DMatrix<f64>,
    /// Norm images of the multiplier (∇ψ for H¹, curl φ for H(curl)).
    multiplier_norm: DMatrix<f64>,
}

impl SaddleBlocks {
    fn curl(p: usize) -> Result<Self> {
        let cell = tet();
        let primal = build_space(&cell, SpaceKind::QRing, p as i64)?;
        let multiplier = build_space(&cell, SpaceKind::WRing, p as i64)?;
        let grads = image_rows(&multiplier, DiffOp::Grad);
        Ok(SaddleBlocks {
            primal_energy: image_rows(&primal, DiffOp::Curl3d),
            multiplier_norm: grads.clone(),
            multiplier_images: grads,
            primal,
            multiplier,
        })
    }

    fn div(p: usize) -> Result<Self> {
        let cell = tet();
        let primal = build_space(&cell, SpaceKind::VRing, p as i64)?;
        let multiplier = build_space(&cell, SpaceKind::QPerpRing, p as i64)?;
        let curls = image_rows(&multiplier, DiffOp::Curl3d);
        Ok(SaddleBlocks {
            primal_energy: image_rows(&primal, DiffOp::Div),
            multiplier_norm: curls.clone(),
            multiplier_images: curls,
            primal,
            multiplier,
        })
    }

    fn energy(&self) -> DMatrix<f64> {
        &self.primal_energy * self.primal_energy.transpose()
    }

    fn coupling(&self) -> DMatrix<f64> {
        &self.multiplier_images * self.primal.basis.transpose()
    }

    fn system(&self) -> DMatrix<f64> {
        saddle(&self.energy(), &self.coupling())
    }

    fn inf_sup(&self, p: usize) -> Result<InfSup> {
        let nw = self.primal.dim();
        let nm = self.multiplier.dim();
        let gw = DMatrix::identity(nw, nw) + self.energy();
        let gm = DMatrix::identity(nm, nm) + &self.multiplier_norm * self.multiplier_norm.transpose();
        let beta = whitened_sigma_min(&self.coupling(), &gw, &gm)?;
        let kkt_min_sigma = if nw + nm == 0 { f64::INFINITY } else { linalg::sigma_range(&self.system()).0 };
        Ok(InfSup { p, beta, kkt_min_sigma })
    }
}

/// Inf-sup constant of the curl lifting saddle problem (H(curl) × H¹ norms).
pub fn inf_sup_curl(p: usize) -> Result<InfSup> {
    SaddleBlocks::curl(p)?.inf_sup(p)
}

/// Inf-sup constant of the div lifting saddle problem (H(div) × H(curl) norms).
pub fn inf_sup_div(p: usize) -> Result<InfSup> {
    SaddleBlocks::div(p)?.inf_sup(p)
}

/// A discrete lifting with its diagnostics.
#[derive(Clone, Debug)]
pub struct Lifting {
    pub element: PolyFn,
    /// The minimum-L²-coefficient lifting the saddle correction starts from.
    pub initial: PolyFn,
    /// Coefficient norm of the Lagrange multiplier.
    pub multiplier_norm: f64,
    /// Largest |(L, g)| over the orthonormalized constraint images, relative to the energy scale.
    pub orthogonality_residual: f64,
    /// L² norm of the boundary trace of `L − w` relative to the trace of `w`.
    pub trace_residual: f64,
    /// ‖L‖ / ‖initial‖ in the energy norm, the measured counterpart of the lifting bound.
    pub norm_ratio: f64,
    pub kkt_min_sigma: f64,
}

/// Stacked boundary trace of ambient coefficients.
fn boundary_trace(space: &PolySpace, family: TraceFamily, amb: &DVector<f64>) -> Result<DVector<f64>> {
    let mut parts = Vec::new();
    for f in 0..4 {
        let (t, _, _) = trace_operator(&space.cell, family, space.value_dim, space.degree, SubSimplex::Face(f))?;
        parts.extend((t * amb).iter().cloned());
    }
    Ok(DVector::from_vec(parts))
}

fn lift(
    blocks: &SaddleBlocks,
    full: &PolySpace,
    w: &PolyFn,
    energy_op: DiffOp,
    family: TraceFamily,
    orth_rows: &DMatrix<f64>,
) -> Result<Lifting> {
    let (cw, res) = full.coords_of(w);
    if res > 1e-10 * w.l2_norm().max(1.0) {
        return Err(Error::NotInTarget { residual: res });
    }
    let w_amb = full.basis.transpose() * cw;
    // Minimum-coefficient lifting: remove the bubble component, which carries no trace.
    let b = &blocks.primal.basis;
    let e_amb = &w_amb - b.transpose() * (b * &w_amb);

    let d = crate::calculus::ambient_diff(&full.cell, energy_op, full.degree);
    let de = &d * &e_amb;
    let rhs_a = &blocks.primal_energy * &de;
    let rhs_b = &blocks.multiplier_images * &e_amb;
    let k = blocks.system();
    let nw = blocks.primal.dim();
    let mut rhs = DVector::zeros(k.nrows());
    rhs.rows_mut(0, nw).copy_from(&rhs_a);
    rhs.rows_mut(nw, rhs_b.len()).copy_from(&rhs_b);
    let kkt_min_sigma = if k.nrows() == 0 { f64::INFINITY } else { linalg::sigma_range(&k).0 };
    let sol = if k.nrows() == 0 {
        DVector::zeros(0)
    } else {
        k.clone().lu().solve(&rhs).ok_or_else(|| Error::Singular { context: "lifting saddle system".into(), sigma: kkt_min_sigma })?
    };
    let w0 = b.transpose() * sol.rows(0, nw);
    let l_amb = &e_amb - w0;
    let multiplier_norm = sol.rows(nw, sol.len() - nw).norm();

    let energy = |v: &DVector<f64>| (v.norm_squared() + (&d * v).norm_squared()).sqrt();
    let scale = energy(&e_amb).max(f64::MIN_POSITIVE);
    let orthogonality_residual = if orth_rows.nrows() == 0 { 0.0 } else { (orth_rows * &l_amb).amax() / scale };
    let tw = boundary_trace(full, family, &w_amb)?;
    let tl = boundary_trace(full, family, &l_amb)?;
    let trace_residual = (&tl - &tw).norm() / tw.norm().max(f64::MIN_POSITIVE);
    let norm_ratio = if energy(&e_amb) == 0.0 { 0.0 } else { energy(&l_amb) / energy(&e_amb) };
    let mk = |c: DVector<f64>| PolyFn::new(full.cell.clone(), full.degree, full.value_dim, c);
    Ok(Lifting {
        element: mk(l_amb),
        initial: mk(e_amb),
        multiplier_norm: multiplier_norm / scale,
        orthogonality_residual,
        trace_residual,
        norm_ratio,
        kkt_min_sigma,
    })
}

/// Minimum curl-energy lifting of `Π_τ w` into `Q_p(K̂)` that is L²-orthogonal
/// to `∇W̊_{p+1}`. Only the tangential trace of `w ∈ Q_p` is used.
pub fn discrete_lifting_curl(p: usize, w: &PolyFn) -> Result<Lifting> {
    let blocks = SaddleBlocks::curl(p)?;
    let full = build_space(&tet(), SpaceKind::Q, p as i64)?;
    let orth = linalg::orth_rows(&blocks.multiplier_images);
    lift(&blocks, &full, w, DiffOp::Curl3d, TraceFamily::Tangential, &orth)
}

/// Minimum div-energy lifting of `n·w` into `V_p(K̂)` that is L²-orthogonal to
/// `curl Q̊_p`. Only the normal trace of `w ∈ V_p` is used.
pub fn discrete_lifting_div(p: usize, w: &PolyFn) -> Result<Lifting> {
    let blocks = SaddleBlocks::div(p)?;
    let full = build_space(&tet(), SpaceKind::V, p as i64)?;
    let all_curls = image_rows(&build_space(&tet(), SpaceKind::QRing, p as i64)?, DiffOp::Curl3d);
    let orth = linalg::orth_rows(&all_curls);
    lift(&blocks, &full, w, DiffOp::Div, TraceFamily::Normal, &orth)
}

/// Discrete `X^{-1/2}` norm of `Π_τ w`: the smallest `H(curl)` norm over all
/// liftings in `Q_{p_lift}(K̂)`. Requires `w ∈ Q_p` with `p ≤ p_lift`.
pub fn x_minus_half_norm(p_lift: usize, w: &PolyFn) -> Result<f64> {
    let cell = tet();
    let q = build_space(&cell, SpaceKind::Q, p_lift as i64)?;
    let (cw, res) = q.coords_of(w);
    if res > 1e-10 * w.l2_norm().max(1.0) {
        return Err(Error::NotInTarget { residual: res });
    }
    let w_amb = q.basis.transpose() * cw;
    let bubbles = build_space(&cell, SpaceKind::QRing, p_lift as i64)?;
    let d = crate::calculus::ambient_diff(&cell, DiffOp::Curl3d, q.degree);
    let bc = &bubbles.basis * d.transpose();
    let n = bubbles.dim();
    if n == 0 {
        return Ok((w_amb.norm_squared() + (&d * &w_amb).norm_squared()).sqrt());
    }
    // Normal equations of min ‖w + Bᵀx‖²_{H(curl)}; the Gram is I + curl Gram, SPD.
    let gram = DMatrix::identity(n, n) + &bc * bc.transpose();
    let rhs = -(&bubbles.basis * &w_amb + &bc * (&d * &w_amb));
    let x = gram.cholesky().ok_or_else(|| Error::Singular { context: "X^{-1/2} normal equations".into(), sigma: 0.0 })?.solve(&rhs);
    let v = &w_amb + bubbles.basis.transpose() * x;
    Ok((v.norm_squared() + (&d * &v).norm_squared()).sqrt())
}
