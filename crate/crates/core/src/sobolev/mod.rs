//! Sobolev inner products and norms on the reference cell: exact norms by
//! quadrature, discrete fractional and dual norms, L² projection, best
//! approximation in a chosen norm, and the unconstrained projectors
//! P^grad, P^curl, P^div.

mod field;
mod gram;

pub use field::{
    quantity_from_jets, quantity_rows, sample_quantities, sample_quantity_rows, AnalyticField, DiffField, Quantity,
    Smoothness,
};
pub use gram::{dual_norm_moments, fractional_norm, test_gram, SobolevGram};

use crate::calculus::{image_rows, DiffOp};
use crate::error::{Error, Result};
use crate::linalg;
use crate::polyspace::{build_space, n_poly, Field, Jet, PolyFn, PolySpace, SpaceKind};
use crate::refsimplex::{quadrature, Point, QuadratureRule, ReferenceCell, MAX_QUADRATURE_DEGREE};
use nalgebra::{DMatrix, DVector};

/// Extra quadrature degree spent on non-polynomial integrands.
pub const FIELD_QUAD_MARGIN: usize = 8;

/// Default gap between the approximation degree and the dual-norm test degree.
pub const DUAL_TEST_MARGIN: usize = 6;

/// Quadrature rule for integrands involving degree-`n` polynomials and a field.
pub fn field_rule(cell: &ReferenceCell, n: usize) -> Result<QuadratureRule> {
    quadrature(cell, (2 * n + FIELD_QUAD_MARGIN).min(MAX_QUADRATURE_DEGREE))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NormKind {
    L2,
    H1,
    H2,
    Hcurl,
    Hdiv,
    /// ‖v‖²_{H¹} + ‖curl v‖²_{H¹}.
    H1curl,
    /// ‖v‖²_{H^{1/2}} + ‖div v‖²_{H^{1/2}} through the spectral surrogate.
    HhalfDiv,
    /// ‖v‖²_{H^{1/2}} + ‖curl v‖²_{H^{1/2}} through the spectral surrogate.
    HhalfCurl,
}

impl NormKind {
    pub fn name(&self) -> &'static str {
        match self {
            NormKind::L2 => "L2",
            NormKind::H1 => "H1",
            NormKind::H2 => "H2",
            NormKind::Hcurl => "Hcurl",
            NormKind::Hdiv => "Hdiv",
            NormKind::H1curl => "H1curl",
            NormKind::HhalfDiv => "Hhalf_div",
            NormKind::HhalfCurl => "Hhalf_curl",
        }
    }

    pub fn parse(s: &str) -> Option<NormKind> {
        [NormKind::L2, NormKind::H1, NormKind::H2, NormKind::Hcurl, NormKind::Hdiv, NormKind::H1curl, NormKind::HhalfDiv, NormKind::HhalfCurl]
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
    }

    /// Quantities whose squared L² norms add up to the squared norm.
    pub fn quantities(&self) -> &'static [Quantity] {
        use Quantity::*;
        match self {
            NormKind::L2 => &[Value],
            NormKind::H1 => &[Value, Grad],
            NormKind::H2 => &[Value, Grad, Hess],
            NormKind::Hcurl => &[Value, Curl],
            NormKind::Hdiv => &[Value, Div],
            NormKind::H1curl => &[Value, Grad, Curl, GradCurl],
            NormKind::HhalfDiv => &[Value, Div],
            NormKind::HhalfCurl => &[Value, Curl],
        }
    }
}

/// Pointwise difference of a differentiable field and a polynomial.
pub struct Difference<'a> {
    pub a: &'a dyn DiffField,
    pub b: &'a PolyFn,
}

impl Field for Difference<'_> {
    fn value_dim(&self) -> usize {
        self.b.value_dim
    }
    fn eval_into(&self, x: &Point, out: &mut [f64]) {
        self.a.eval_into(x, out);
        for (o, v) in out.iter_mut().zip(self.b.eval(x)) {
            *o -= v;
        }
    }
}

impl DiffField for Difference<'_> {
    fn jets(&self, x: &Point) -> Vec<Jet> {
        let a = self.a.jets(x);
        let b = DiffField::jets(self.b, x);
        a.into_iter().zip(b).map(|(a, b)| a - b).collect()
    }
    fn order(&self) -> usize {
        self.a.order()
    }
}

fn require_order(u: &dyn DiffField, qs: &[Quantity]) -> Result<()> {
    let need = qs.iter().map(|q| q.order()).max().unwrap_or(0);
    if u.order() < need {
        return Err(Error::Config(format!("field provides {} derivative orders, norm needs {need}", u.order())));
    }
    Ok(())
}

fn check_finite(pts: &[Point], vals: &[Vec<f64>]) -> Result<()> {
    for (p, v) in pts.iter().zip(vals) {
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { x: p[0], y: p[1], z: p[2] });
        }
    }
    Ok(())
}

/// Norm of a differentiable field by quadrature of the given degree.
pub fn norm_with_rule(u: &dyn DiffField, norm: NormKind, rule: &QuadratureRule, dim: usize) -> Result<f64> {
    let qs = norm.quantities();
    require_order(u, qs)?;
    let vals = sample_quantities(u, qs, dim, &rule.points);
    check_finite(&rule.points, &vals)?;
    let s: f64 = vals.iter().zip(&rule.weights).map(|(v, w)| w * v.iter().map(|x| x * x).sum::<f64>()).sum();
    Ok(s.max(0.0).sqrt())
}

/// ‖u − v‖ in a quadrature-computable norm, evaluated directly on the difference.
pub fn error_norm(u: &dyn DiffField, v: &PolyFn, norm: NormKind) -> Result<f64> {
    let rule = field_rule(&v.cell, v.degree)?;
    norm_with_rule(&Difference { a: u, b: v }, norm, &rule, v.cell.dim)
}

/// L² moments (f, φ_j) of a field against coefficient rows.
pub fn moments(cell: &ReferenceCell, degree: usize, vd: usize, rows: &DMatrix<f64>, f: &dyn Field) -> Result<DVector<f64>> {
    let rule = field_rule(cell, degree)?;
    let vals = f.sample(&rule.points);
    if let Some(i) = vals.iter().position(|x| !x.is_finite()) {
        let p = rule.points[i / vd];
        return Err(Error::NonFinite { x: p[0], y: p[1], z: p[2] });
    }
    let weighted = DVector::from_fn(vals.len(), |i, _| vals[i] * rule.weights[i / vd]);
    let s = crate::polyspace::sample_rows(cell, degree, vd, rows, &rule.points);
    Ok(s.transpose() * weighted)
}

/// L² orthogonal projection onto a space (its basis is orthonormal).
pub fn l2_projection(space: &PolySpace, f: &dyn Field) -> Result<PolyFn> {
    let b = moments(&space.cell, space.degree, space.value_dim, &space.basis, f)?;
    Ok(space.element(&b))
}

/// Moments of the quantity `q` of `u` against ambient rows whose values are that quantity's.
fn quantity_moments(
    cell: &ReferenceCell,
    degree: usize,
    rows: &DMatrix<f64>,
    rows_vd: usize,
    u: &dyn DiffField,
    q: Quantity,
    rule: &QuadratureRule,
) -> Result<DVector<f64>> {
    let vals = sample_quantities(u, &[q], cell.dim, &rule.points);
    check_finite(&rule.points, &vals)?;
    let flat: Vec<f64> = vals
        .iter()
        .zip(&rule.weights)
        .flat_map(|(v, w)| v.iter().map(move |x| x * w))
        .collect();
    let s = crate::polyspace::sample_rows(cell, degree, rows_vd, rows, &rule.points);
    Ok(s.transpose() * DVector::from_vec(flat))
}

/// A best approximation and its error.
#[derive(Clone, Debug)]
pub struct BestApprox {
    pub coeffs: DVector<f64>,
    pub element: PolyFn,
    pub error: f64,
}

fn spd_solve(g: DMatrix<f64>, b: &DVector<f64>, what: &str) -> Result<DVector<f64>> {
    let chol = g.cholesky().ok_or_else(|| Error::Singular { context: what.to_string(), sigma: 0.0 })?;
    Ok(chol.solve(b))
}

fn lu_solve(a: DMatrix<f64>, b: &DVector<f64>, what: &str) -> Result<DVector<f64>> {
    let (lo, hi) = linalg::sigma_range(&a);
    if !(lo > 1e-13 * hi) {
        return Err(Error::Singular { context: what.to_string(), sigma: lo });
    }
    a.lu().solve(b).ok_or_else(|| Error::Singular { context: what.to_string(), sigma: lo })
}

/// Minimizer of ‖u − v‖ over v in `space`.
pub fn best_approx(space: &PolySpace, u: &dyn DiffField, norm: NormKind) -> Result<BestApprox> {
    match norm {
        NormKind::HhalfDiv => return best_approx_fractional(space, u, 0.5, Some(Quantity::Div)),
        NormKind::HhalfCurl => return best_approx_fractional(space, u, 0.5, Some(Quantity::Curl)),
        _ => {}
    }
    let qs = norm.quantities();
    require_order(u, qs)?;
    let cell = &space.cell;
    let (n, vd) = (space.degree, space.value_dim);
    let rule = field_rule(cell, n)?;
    let mut g = DMatrix::zeros(space.dim(), space.dim());
    let mut b = DVector::zeros(space.dim());
    for &q in qs {
        let (rows, k) = quantity_rows(cell, n, vd, &space.basis, q);
        g += &rows * rows.transpose();
        b += quantity_moments(cell, n, &rows, k, u, q, &rule)?;
    }
    let g = (&g + g.transpose()) * 0.5;
    let coeffs = spd_solve(g, &b, &format!("{} Gram of {}", norm.name(), space.kind))?;
    let element = space.element(&coeffs);
    let error = error_norm(u, &element, norm)?;
    Ok(BestApprox { coeffs, element, error })
}

/// Best approximation in ‖v‖²_{H^s} (+ ‖Dv‖²_{H^s} for `extra = Some(D)`, D one
/// of div or curl) measured with the spectral norm of the full polynomial space
/// `DUAL_TEST_MARGIN` degrees above, after L² projecting the target there.
/// Vector quantities are handled one component at a time.
pub fn best_approx_fractional(space: &PolySpace, u: &dyn DiffField, s: f64, extra: Option<Quantity>) -> Result<BestApprox> {
    if let Some(q) = extra {
        if !matches!(q, Quantity::Div | Quantity::Curl) {
            return Err(Error::Config(format!("fractional norm of {q:?}")));
        }
    }
    let cell = &space.cell;
    let (n, vd, d) = (space.degree, space.value_dim, cell.dim);
    let big = n + DUAL_TEST_MARGIN;
    let nb = n_poly(d, big);
    let g = test_gram(cell, big, s > 1.0)?;
    let scalar = &g.space.basis;
    let h = scalar.transpose() * g.fractional_gram(s)? * scalar;
    let rule = field_rule(cell, big)?;
    let t = crate::polyspace::eval_table(cell, big, &rule.points);
    // Componentwise L² projection onto degree `big`, in ambient coordinates.
    let project = |f: &dyn Field| -> Result<Vec<DVector<f64>>> {
        let k = f.value_dim();
        let vals = f.sample(&rule.points);
        if let Some(i) = vals.iter().position(|x| !x.is_finite()) {
            let p = rule.points[i / k];
            return Err(Error::NonFinite { x: p[0], y: p[1], z: p[2] });
        }
        Ok((0..k)
            .map(|c| t.transpose() * DVector::from_fn(rule.len(), |q, _| vals[q * k + c] * rule.weights[q]))
            .collect())
    };
    // Component blocks of degree-n rows, padded to degree `big`.
    let split = |rows: &DMatrix<f64>, k: usize| -> Vec<DMatrix<f64>> {
        let nf = n_poly(d, n);
        (0..k)
            .map(|c| {
                let mut m = DMatrix::zeros(rows.nrows(), nb);
                m.columns_mut(0, nf).copy_from(&rows.columns(c * nf, nf));
                m
            })
            .collect()
    };
    let mut parts = vec![(split(&space.basis, vd), project(&QuantityField { u, q: Quantity::Value, dim: d })?)];
    if let Some(q) = extra {
        let (qrows, k) = quantity_rows(cell, n, vd, &space.basis, q);
        parts.push((split(&qrows, k), project(&QuantityField { u, q, dim: d })?));
    }
    let mut gm = DMatrix::zeros(space.dim(), space.dim());
    let mut rhs = DVector::zeros(space.dim());
    for (rows, target) in &parts {
        for (r, tc) in rows.iter().zip(target) {
            let rh = r * &h;
            gm += &rh * r.transpose();
            rhs += &rh * tc;
        }
    }
    let gm = (&gm + gm.transpose()) * 0.5;
    let coeffs = spd_solve(gm, &rhs, "fractional best approximation")?;
    let mut e2 = 0.0;
    for (rows, target) in &parts {
        for (r, tc) in rows.iter().zip(target) {
            let diff = tc - r.transpose() * &coeffs;
            e2 += (diff.transpose() * &h * &diff)[0];
        }
    }
    let element = space.element(&coeffs);
    Ok(BestApprox { coeffs, element, error: e2.max(0.0).sqrt() })
}

/// One component of a vector field.
pub struct Component<'a> {
    pub u: &'a dyn DiffField,
    pub c: usize,
}

impl Field for Component<'_> {
    fn value_dim(&self) -> usize {
        1
    }
    fn eval_into(&self, x: &Point, out: &mut [f64]) {
        out[0] = self.u.jets(x)[self.c].v;
    }
}

/// A scalar or vector quantity of a field, sampled as a plain field.
pub struct QuantityField<'a> {
    pub u: &'a dyn DiffField,
    pub q: Quantity,
    pub dim: usize,
}

impl Field for QuantityField<'_> {
    fn value_dim(&self) -> usize {
        let (vd, d) = (self.u.value_dim(), self.dim);
        match self.q {
            Quantity::Value => vd,
            Quantity::Grad => vd * d,
            Quantity::Hess => vd * d * d,
            Quantity::Curl => if d == 3 { 3 } else { 1 },
            Quantity::GradCurl => if d == 3 { 3 * d } else { d },
            Quantity::Div => 1,
            Quantity::GradDiv => d,
        }
    }
    fn eval_into(&self, x: &Point, out: &mut [f64]) {
        out.copy_from_slice(&quantity_from_jets(&self.u.jets(x), self.q, self.dim));
    }
}

/// P^grad: (∇(u − Pu), ∇v) = 0 for all v, with (u − Pu, 1) = 0.
pub fn p_grad(space: &PolySpace, u: &dyn DiffField) -> Result<PolyFn> {
    let cell = &space.cell;
    let (n, dim) = (space.degree, space.dim());
    require_order(u, &[Quantity::Grad])?;
    let rule = field_rule(cell, n)?;
    let (rows, k) = quantity_rows(cell, n, 1, &space.basis, Quantity::Grad);
    let g = &rows * rows.transpose();
    let b = quantity_moments(cell, n, &rows, k, u, Quantity::Grad, &rule)?;
    // Integrals of the basis functions: the first ambient mode is the constant 1/sqrt|K|.
    let root = cell.measure.sqrt();
    let mean = space.basis.column(0) * root;
    let vals = Component { u, c: 0 }.sample(&rule.points);
    let u_mean: f64 = vals.iter().zip(&rule.weights).map(|(v, w)| v * w).sum();
    let mut a = DMatrix::zeros(dim + 1, dim + 1);
    a.view_mut((0, 0), (dim, dim)).copy_from(&g);
    a.view_mut((0, dim), (dim, 1)).copy_from(&mean);
    a.view_mut((dim, 0), (1, dim)).copy_from(&mean.transpose());
    let mut rhs = DVector::zeros(dim + 1);
    rhs.rows_mut(0, dim).copy_from(&b);
    rhs[dim] = u_mean;
    let sol = lu_solve(a, &rhs, "P^grad saddle point")?;
    Ok(space.element(&sol.rows(0, dim).into_owned()))
}

/// Shared two-block solve: L² conditions against `sub` (an image subspace),
/// energy conditions (op(u − Pu), op v) = 0 against the complement.
fn two_block(space: &PolySpace, sub_ambient: &DMatrix<f64>, op: DiffOp, q: Quantity, u: &dyn DiffField) -> Result<PolyFn> {
    let cell = &space.cell;
    let (n, dim) = (space.degree, space.dim());
    require_order(u, &[q])?;
    let t1 = linalg::orth_rows(&(sub_ambient * space.basis.transpose()));
    let c = linalg::complement_rows(&DMatrix::identity(dim, dim), &t1);
    let k_rows = image_rows(space, op);
    let k_vd = k_rows.ncols() / n_poly(cell.dim, n);
    let rule = field_rule(cell, n)?;
    let b0 = moments(cell, n, space.value_dim, &space.basis, u as &dyn Field)?;
    let bc = quantity_moments(cell, n, &k_rows, k_vd, u, q, &rule)?;
    let kk = &k_rows * k_rows.transpose();
    let top = &t1 * DMatrix::identity(dim, dim);
    let bottom = &c * kk;
    let a = linalg::vstack(&[&top, &bottom], dim);
    let mut rhs = DVector::zeros(dim);
    let r1 = t1.nrows();
    rhs.rows_mut(0, r1).copy_from(&(&t1 * b0));
    rhs.rows_mut(r1, dim - r1).copy_from(&(&c * bc));
    let sol = lu_solve(a, &rhs, &format!("two-block system on {}", space.kind))?;
    Ok(space.element(&sol))
}

/// P^curl on Q_p (3D or 2D): curl-curl orthogonality and L² orthogonality to gradients.
pub fn p_curl(space: &PolySpace, u: &dyn DiffField) -> Result<PolyFn> {
    let d = space.cell.dim;
    let w = build_space(&space.cell, SpaceKind::W, space.p as i64)?;
    let grads = image_rows(&w, DiffOp::Grad);
    let op = if d == 3 { DiffOp::Curl3d } else { DiffOp::Curl2dVector };
    two_block(space, &grads, op, Quantity::Curl, u)
}

/// P^div on V_p: div-div orthogonality and L² orthogonality to curls.
pub fn p_div(space: &PolySpace, u: &dyn DiffField) -> Result<PolyFn> {
    let q = build_space(&space.cell, SpaceKind::Q, space.p as i64)?;
    let curls = image_rows(&q, DiffOp::Curl3d);
    two_block(space, &curls, DiffOp::Div, Quantity::Div, u)
}

/// Discrete dual norm sup_v (e, v)/‖v‖_{H^s} over the scalar P_P test space,
/// summed in quadrature over components.
pub fn dual_norm(g: &SobolevGram, e: &dyn Field, s: f64) -> Result<f64> {
    let cell = &g.space.cell;
    let vd = e.value_dim();
    let rule = field_rule(cell, g.space.degree)?;
    let vals = e.sample(&rule.points);
    let t = crate::polyspace::sample_rows(cell, g.space.degree, 1, &g.space.basis, &rule.points);
    let mut blocks = Vec::with_capacity(vd);
    for c in 0..vd {
        let w = DVector::from_fn(rule.len(), |q, _| vals[q * vd + c] * rule.weights[q]);
        blocks.push(t.transpose() * w);
    }
    if blocks.iter().any(|b| b.iter().any(|x| !x.is_finite())) {
        return Err(Error::NonFinite { x: f64::NAN, y: f64::NAN, z: f64::NAN });
    }
    dual_norm_moments(g, &blocks, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyspace::MonoPoly;
    use crate::refsimplex::{tet, tri};
    use rand::{Rng, SeedableRng};
    use std::sync::Arc;

    fn exp_x() -> AnalyticField {
        AnalyticField::new("exp(x)", 1, Smoothness::Entire, |x| vec![x[0].exp()])
    }

    fn rel(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn fractional_endpoints() {
        let w = Arc::new(build_space(&tet(), SpaceKind::W, 2).unwrap());
        let g = SobolevGram::new(w, true).unwrap();
        assert!(rel(&g.fractional_gram(0.0).unwrap(), &g.m) < 1e-10);
        assert!(rel(&g.fractional_gram(1.0).unwrap(), &g.a1) < 1e-10);
        assert!(rel(&g.fractional_gram(2.0).unwrap(), g.a2.as_ref().unwrap()) < 1e-10);
        assert!(matches!(g.fractional_gram(2.5), Err(Error::InvalidOrder(_))));
    }

    #[test]
    fn fractional_monotone() {
        let w = Arc::new(build_space(&tri(), SpaceKind::W, 4).unwrap());
        let g = SobolevGram::new(w, true).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let c = DVector::from_fn(g.dim(), |_, _| rng.gen_range(-1.0..1.0));
            let mut last = 0.0;
            for k in 0..=8 {
                let v = fractional_norm(&g, &c, k as f64 * 0.25).unwrap();
                assert!(v >= last * (1.0 - 1e-12));
                last = v;
            }
            assert!((fractional_norm(&g, &c, 0.0).unwrap() - c.norm()).abs() < 1e-12 * c.norm());
        }
    }

    #[test]
    fn dual_norm_at_zero_is_projected_l2() {
        let cell = tet();
        let g = test_gram(&cell, 4, false).unwrap();
        let u = exp_x();
        let proj = l2_projection(&g.space, &u).unwrap();
        let d0 = dual_norm(&g, &u, 0.0).unwrap();
        assert!((d0 - proj.l2_norm()).abs() < 1e-12 * d0);
        assert!(dual_norm(&g, &u, 0.5).unwrap() <= d0);
        assert!(dual_norm(&g, &u, 1.0).unwrap() <= dual_norm(&g, &u, 0.5).unwrap());
    }

    #[test]
    fn best_approx_reproduces_members() {
        let cell = tet();
        let q = build_space(&cell, SpaceKind::Q, 2).unwrap();
        let f = PolyFn::from_monomials(cell.clone(), 3, &[
            MonoPoly::var(1) * MonoPoly::var(2),
            MonoPoly::var(0),
            MonoPoly::var(0) * MonoPoly::var(0),
        ]);
        for norm in [NormKind::L2, NormKind::H1, NormKind::Hcurl, NormKind::H1curl] {
            let b = best_approx(&q, &f, norm).unwrap();
            assert!(b.error < 1e-10, "{norm:?}: {}", b.error);
        }
    }

    #[test]
    fn l2_error_decreases_with_p() {
        let cell = tet();
        let mut last = f64::INFINITY;
        for p in 1..=6 {
            let s = build_space(&cell, SpaceKind::L2, p).unwrap();
            let e = best_approx(&s, &exp_x(), NormKind::L2).unwrap().error;
            assert!(e < last, "p={p}: {e} vs {last}");
            last = e;
        }
    }

    #[test]
    fn p_curl_of_gradient_is_curl_free() {
        let cell = tet();
        let phi = AnalyticField::new("sin", 1, Smoothness::Entire, |x| vec![(x[0] + x[1] * x[2]).sin()]);
        let u = phi.grad(3);
        let q = build_space(&cell, SpaceKind::Q, 3).unwrap();
        let pu = p_curl(&q, &u).unwrap();
        let c = crate::calculus::apply_diff(DiffOp::Curl3d, &pu);
        assert!(c.l2_norm() < 1e-10 * pu.l2_norm());
    }

    #[test]
    fn p_operators_reproduce_members() {
        let cell = tet();
        let w = build_space(&cell, SpaceKind::W, 2).unwrap();
        let f = PolyFn::from_monomials(cell.clone(), 3, &[MonoPoly::var(0) * MonoPoly::var(1) * MonoPoly::var(2)]);
        assert!(p_grad(&w, &f).unwrap().sub(&f).l2_norm() < 1e-11);
        let v = build_space(&cell, SpaceKind::V, 1).unwrap();
        let g = PolyFn::from_monomials(cell.clone(), 2, &[
            MonoPoly::var(0) * MonoPoly::var(0),
            MonoPoly::var(0) * MonoPoly::var(1),
            MonoPoly::var(0) * MonoPoly::var(2),
        ]);
        assert!(p_div(&v, &g).unwrap().sub(&g).l2_norm() < 1e-11);
        let q2 = build_space(&tri(), SpaceKind::Q, 1).unwrap();
        let y = MonoPoly::var(1);
        let h = PolyFn::from_monomials(tri(), 2, &[y.clone() * y.clone(), MonoPoly::var(0) * y * <MonoPoly as crate::polyspace::Ring>::constant(-1.0)]);
        assert!(q2.coords_of(&h).1 < 1e-12);
        assert!(p_curl(&q2, &h).unwrap().sub(&h).l2_norm() < 1e-11);
    }
}
