//! Regularized Poincaré right inverses of ∇, curl and div and the
//! Helmholtz-like splittings built from them.
//!
//! For a fixed base point `a` the t-integral `∫₀¹ tᵏ g(a + t(x − a)) dt`
//! of a polynomial g is the solution s of `(E_a + k + 1) s = g`, where
//! `E_a = (x − a)·∇` is the Euler operator centred at `a`. In the
//! orthonormal basis `E_a` is block upper triangular over degree blocks
//! with diagonal `j·I` on the degree-j block, so the solve is an exact
//! back substitution. The a-integral against the bump θ uses a spherical
//! (polar in 2D) product Gauss rule exact for the polynomial degree in `a`.

use crate::calculus::{apply_diff, DiffOp};
use crate::error::{Error, Result};
use crate::polyspace::{algebra, build_space, n_poly, PolyFn, SpaceKind};
use crate::refsimplex::{tet, tri};
use crate::report::{CheckLine, Report};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use crate::refsimplex::{gauss_jacobi, Point, ReferenceCell};
use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PoincareKind {
    Grad,
    Curl3d,
    Div3d,
    Grad2d,
    Curl2d,
}

/// The bump-weighted averaging data of a regularized inverse.
#[derive(Clone, Debug)]
pub struct RegularizedInverse {
    pub cell: Arc<ReferenceCell>,
    pub kind: PoincareKind,
    pub center: Point,
    pub radius: f64,
    /// Exponent m of θ = (1 − |a − c|²/r²)^m / Z.
    pub m: usize,
}

fn double_factorial_odd(k: usize) -> f64 {
    (1..=k).step_by(2).map(|v| v as f64).product()
}

impl RegularizedInverse {
    /// Ball centred at the centroid with radius 0.9 × inradius, m = 6.
    pub fn new(cell: Arc<ReferenceCell>, kind: PoincareKind) -> Self {
        let want = match kind {
            PoincareKind::Grad | PoincareKind::Curl3d | PoincareKind::Div3d => 3,
            _ => 2,
        };
        assert_eq!(cell.dim, want, "{kind:?} lives on a {want}-simplex");
        let center = cell.centroid();
        let radius = 0.9 * cell.inradius();
        RegularizedInverse { cell, kind, center, radius, m: 6 }
    }

    /// Closed-form ∫ (1 − |a − c|²/r²)^m da over the ball.
    pub fn normalization(&self) -> f64 {
        let (r, m) = (self.radius, self.m);
        let mf: f64 = (1..=m).map(|v| v as f64).product();
        if self.cell.dim == 3 {
            4.0 * PI * r.powi(3) * mf * 2f64.powi(m as i32) / double_factorial_odd(2 * m + 3)
        } else {
            PI * r * r / (m as f64 + 1.0)
        }
    }

    pub fn theta(&self, a: &Point) -> f64 {
        let d2: f64 = (0..self.cell.dim).map(|i| (a[i] - self.center[i]).powi(2)).sum();
        let s = 1.0 - d2 / (self.radius * self.radius);
        if s <= 0.0 {
            0.0
        } else {
            s.powi(self.m as i32) / self.normalization()
        }
    }

    /// Nodes and weights integrating θ(a)·q(a) exactly for deg q ≤ `degree`.
    pub fn ball_rule(&self, degree: usize) -> Vec<(Point, f64)> {
        let dim = self.cell.dim;
        let m = self.m;
        let r = self.radius;
        // Radial factor (1−σ)^m (1+σ)^m σ^{dim−1} q(σ) on (0, 1).
        let nr = (m + dim + degree) / 2 + 1;
        let rad = gauss_jacobi(nr, m);
        let nl = degree + 1;
        let z = self.normalization();
        let mut out = Vec::new();
        let radial: Vec<(f64, f64)> = rad
            .0
            .iter()
            .zip(&rad.1)
            .map(|(e, w)| {
                let s = (1.0 + e) / 2.0;
                (s, w / 2f64.powi(m as i32 + 1) * (1.0 + s).powi(m as i32) * s.powi(dim as i32 - 1))
            })
            .collect();
        if dim == 2 {
            for &(s, wr) in &radial {
                for l in 0..nl {
                    let lam = 2.0 * PI * l as f64 / nl as f64;
                    let a = [self.center[0] + r * s * lam.cos(), self.center[1] + r * s * lam.sin(), 0.0];
                    out.push((a, wr * r * r * 2.0 * PI / nl as f64 / z));
                }
            }
        } else {
            let gl = gauss_jacobi(degree / 2 + 1, 0);
            for &(s, wr) in &radial {
                for (u, wu) in gl.0.iter().zip(&gl.1) {
                    let sp = (1.0 - u * u).sqrt();
                    for l in 0..nl {
                        let lam = 2.0 * PI * l as f64 / nl as f64;
                        let a = [
                            self.center[0] + r * s * sp * lam.cos(),
                            self.center[1] + r * s * sp * lam.sin(),
                            self.center[2] + r * s * u,
                        ];
                        out.push((a, wr * wu * r.powi(3) * 2.0 * PI / nl as f64 / z));
                    }
                }
            }
        }
        out
    }

    fn input_dim(&self) -> usize {
        match self.kind {
            PoincareKind::Grad | PoincareKind::Curl3d => 3,
            PoincareKind::Grad2d => 2,
            PoincareKind::Div3d | PoincareKind::Curl2d => 1,
        }
    }

    /// Apply the operator to a polynomial field; the result has degree one higher.
    pub fn apply(&self, u: &PolyFn) -> Result<PolyFn> {
        if u.value_dim != self.input_dim() {
            return Err(Error::UnsupportedSpace(format!(
                "{:?} expects {} components, got {}",
                self.kind,
                self.input_dim(),
                u.value_dim
            )));
        }
        let cell = &self.cell;
        let d = cell.dim;
        let deg = u.degree;
        let n = n_poly(d, deg);
        let n1 = n_poly(d, deg + 1);
        let alg = algebra(cell, deg + 1);
        let dk: Vec<DMatrix<f64>> = (0..d).map(|k| alg.d(k, deg)).collect();
        // E_0 = Σ X_k ∂_k on P_deg (∂_k lowers the degree, so X_k acts exactly).
        let mut e0 = DMatrix::zeros(n, n);
        if deg > 0 {
            let nm = n_poly(d, deg - 1);
            for k in 0..d {
                let xk = alg.x(k, deg - 1);
                e0 += xk.view((0, 0), (n, nm)) * dk[k].view((0, 0), (nm, n));
            }
        }
        let tpow = match self.kind {
            PoincareKind::Grad | PoincareKind::Grad2d => 0,
            PoincareKind::Curl3d | PoincareKind::Curl2d => 1,
            PoincareKind::Div3d => 2,
        };
        let vd = u.value_dim;
        let g = DMatrix::from_column_slice(n, vd, u.coeffs.as_slice());
        let starts: Vec<usize> = (0..=deg + 1).map(|j| if j == 0 { 0 } else { n_poly(d, j - 1) }).collect();

        let rule = self.ball_rule(deg + 1);
        let mut a0 = DMatrix::zeros(n, vd);
        // b[i] = Σ w a_i S_a (centered at the ball center for conditioning).
        let mut b: Vec<DMatrix<f64>> = vec![DMatrix::zeros(n, vd); d];
        for (a, w) in &rule {
            let mut r = g.clone();
            let mut s = DMatrix::zeros(n, vd);
            for j in (0..=deg).rev() {
                let (lo, hi) = (starts[j], starts[j + 1]);
                let inv = 1.0 / (j + tpow + 1) as f64;
                let blk = r.rows(lo, hi - lo) * inv;
                s.rows_mut(lo, hi - lo).copy_from(&blk);
                if lo > 0 {
                    let mut col = e0.view((0, lo), (lo, hi - lo)).into_owned();
                    for k in 0..d {
                        col -= dk[k].view((0, lo), (lo, hi - lo)) * a[k];
                    }
                    let upd = col * &blk;
                    let mut top = r.rows_mut(0, lo);
                    top -= upd;
                }
            }
            a0 += &s * *w;
            for k in 0..d {
                b[k] += &s * (*w * (a[k] - self.center[k]));
            }
        }
        // Terms of the form ∫θ S_a (x_k − a_k) = X_k A0 − c_k A0 − B_k.
        let xk: Vec<DMatrix<f64>> = (0..d).map(|k| alg.x(k, deg)).collect();
        let lin = |k: usize, col: usize| -> DVector<f64> {
            let mut v = &xk[k] * a0.column(col);
            let mut low = v.rows_mut(0, n);
            low -= a0.column(col) * self.center[k] + b[k].column(col);
            v
        };
        let (out_vd, comps): (usize, Vec<DVector<f64>>) = match self.kind {
            PoincareKind::Grad | PoincareKind::Grad2d => {
                let mut acc = DVector::zeros(n1);
                for k in 0..d {
                    acc += lin(k, k);
                }
                (1, vec![acc])
            }
            PoincareKind::Curl3d => {
                let mut out = Vec::new();
                for j in 0..3 {
                    let (j1, j2) = ((j + 1) % 3, (j + 2) % 3);
                    out.push(lin(j2, j1) - lin(j1, j2));
                }
                (3, out)
            }
            PoincareKind::Div3d => (3, (0..3).map(|k| lin(k, 0)).collect()),
            PoincareKind::Curl2d => (2, vec![-lin(1, 0), lin(0, 0)]),
        };
        let mut coeffs = DVector::zeros(n1 * out_vd);
        for (c, v) in comps.iter().enumerate() {
            coeffs.rows_mut(c * n1, n1).copy_from(v);
        }
        Ok(PolyFn::new(cell.clone(), deg + 1, out_vd, coeffs))
    }
}

/// Relative L² residual of `a − b`.
fn rel_diff(a: &PolyFn, b: &PolyFn, scale: f64) -> f64 {
    a.sub(b).l2_norm() / scale.max(1e-300)
}

/// u = ∇φ + z with z = R^curl(curl u) and φ = R^grad(u − z).
#[derive(Clone, Debug)]
pub struct HelmholtzSplit {
    pub phi: PolyFn,
    pub z: PolyFn,
    /// ‖u − D φ − z‖ / ‖u‖.
    pub residual: f64,
}

const SPLIT_TOL: f64 = 1e-9;

/// Gradient-plus-remainder split of a polynomial vector field.
pub fn helmholtz_curl(u: &PolyFn) -> Result<HelmholtzSplit> {
    let cell = u.cell.clone();
    let (z, phi, grad_phi) = if cell.dim == 3 {
        let z = RegularizedInverse::new(cell.clone(), PoincareKind::Curl3d).apply(&apply_diff(DiffOp::Curl3d, u))?;
        let phi = RegularizedInverse::new(cell.clone(), PoincareKind::Grad).apply(&u.sub(&z))?;
        let gp = apply_diff(DiffOp::Grad, &phi);
        (z, phi, gp)
    } else {
        let z = RegularizedInverse::new(cell.clone(), PoincareKind::Curl2d).apply(&apply_diff(DiffOp::Curl2dVector, u))?;
        let phi = RegularizedInverse::new(cell.clone(), PoincareKind::Grad2d).apply(&u.sub(&z))?;
        let gp = apply_diff(DiffOp::Grad, &phi);
        (z, phi, gp)
    };
    let residual = rel_diff(u, &grad_phi.add(&z), u.l2_norm());
    if residual > SPLIT_TOL && u.l2_norm() > 0.0 {
        return Err(Error::Residual { context: "curl splitting".into(), residual, tol: SPLIT_TOL });
    }
    Ok(HelmholtzSplit { phi, z, residual })
}

/// u = curl φ + z with z = R^div(div u) and φ = R^curl(u − z).
pub fn helmholtz_div(u: &PolyFn) -> Result<HelmholtzSplit> {
    let cell = u.cell.clone();
    let z = RegularizedInverse::new(cell.clone(), PoincareKind::Div3d).apply(&apply_diff(DiffOp::Div, u))?;
    let phi = RegularizedInverse::new(cell, PoincareKind::Curl3d).apply(&u.sub(&z))?;
    let cp = apply_diff(DiffOp::Curl3d, &phi);
    let residual = rel_diff(u, &cp.add(&z), u.l2_norm());
    if residual > SPLIT_TOL && u.l2_norm() > 0.0 {
        return Err(Error::Residual { context: "div splitting".into(), residual, tol: SPLIT_TOL });
    }
    Ok(HelmholtzSplit { phi, z, residual })
}

/// Approximate mode: L²-project a field onto Q_p first, then split exactly.
pub fn helmholtz_curl_field(cell: &Arc<ReferenceCell>, u: &dyn crate::polyspace::Field, p: usize) -> Result<HelmholtzSplit> {
    let q = build_space(cell, SpaceKind::Q, p as i64)?;
    let approx = crate::sobolev::l2_projection(&q, u)?;
    helmholtz_curl(&approx)
}

/// Approximate mode for the div split through V_p.
pub fn helmholtz_div_field(cell: &Arc<ReferenceCell>, u: &dyn crate::polyspace::Field, p: usize) -> Result<HelmholtzSplit> {
    let v = build_space(cell, SpaceKind::V, p as i64)?;
    let approx = crate::sobolev::l2_projection(&v, u)?;
    helmholtz_div(&approx)
}

/// Random element of a space with uniform coordinates in [−1, 1].
pub fn random_element(space: &crate::polyspace::PolySpace, rng: &mut impl Rng) -> PolyFn {
    let c = DVector::from_fn(space.dim(), |_, _| rng.gen_range(-1.0..1.0));
    space.element(&c)
}

fn membership(target: &crate::polyspace::PolySpace, f: &PolyFn) -> f64 {
    target.coords_of(f).1
}

/// Right-inverse identities and polynomial preservation of every map for one p.
pub fn check_poincare(p: usize, seed: u64) -> Result<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (p as u64) << 8);
    let mut rep = Report::default();
    let tol = 1e-10;
    let pi = p as i64;
    for cell in [tet(), tri()] {
        let d = cell.dim;
        let tag = |s: &str| format!("poincare.{d}d.{s}.p{p}");
        let r = |k| RegularizedInverse::new(cell.clone(), k);
        let (grad_k, curl_k) = if d == 3 { (PoincareKind::Grad, PoincareKind::Curl3d) } else { (PoincareKind::Grad2d, PoincareKind::Curl2d) };
        let w = build_space(&cell, SpaceKind::W, pi)?;
        let q = build_space(&cell, SpaceKind::Q, pi)?;
        let l2 = build_space(&cell, SpaceKind::L2, pi)?;

        // ∇ R^grad u = u for curl-free u.
        let u = apply_diff(DiffOp::Grad, &random_element(&w, &mut rng));
        let back = apply_diff(DiffOp::Grad, &r(grad_k).apply(&u)?);
        rep.push(CheckLine::at_most(tag("grad_right_inverse"), rel_diff(&back, &u, u.l2_norm()), tol));

        // R^grad maps Q_p into W_{p+1}.
        let uq = random_element(&q, &mut rng);
        rep.push(CheckLine::at_most(tag("grad_preserves_W"), membership(&w, &r(grad_k).apply(&uq)?), tol));

        if d == 3 {
            let v = build_space(&cell, SpaceKind::V, pi)?;
            let big = build_space(&cell, SpaceKind::Q, pi + 1)?;
            // curl R^curl u = u for div-free u.
            let u = apply_diff(DiffOp::Curl3d, &random_element(&big, &mut rng));
            let back = apply_diff(DiffOp::Curl3d, &r(curl_k).apply(&u)?);
            rep.push(CheckLine::at_most(tag("curl_right_inverse"), rel_diff(&back, &u, u.l2_norm()), tol));
            let uv = random_element(&v, &mut rng);
            rep.push(CheckLine::at_most(tag("curl_preserves_Q"), membership(&q, &r(curl_k).apply(&uv)?), tol));
            // div R^div u = u for every u.
            let u = random_element(&l2, &mut rng);
            let rd = r(PoincareKind::Div3d).apply(&u)?;
            let back = apply_diff(DiffOp::Div, &rd);
            rep.push(CheckLine::at_most(tag("div_right_inverse"), rel_diff(&back, &u, u.l2_norm()), tol));
            rep.push(CheckLine::at_most(tag("div_preserves_V"), membership(&v, &rd), tol));
        } else {
            // curl R^curl u = u for every scalar u, and R^curl P_p ⊂ Q_p.
            let u = random_element(&l2, &mut rng);
            let rc = r(curl_k).apply(&u)?;
            let back = apply_diff(DiffOp::Curl2dVector, &rc);
            rep.push(CheckLine::at_most(tag("curl_right_inverse"), rel_diff(&back, &u, u.l2_norm()), tol));
            rep.push(CheckLine::at_most(tag("curl_preserves_Q"), membership(&q, &rc), tol));
        }
    }
    Ok(rep)
}

/// Reconstruction residuals of the splittings on random discrete fields and a
/// few closed-form ones.
pub fn check_helmholtz(p: usize, seed: u64) -> Result<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (p as u64) << 16 ^ 0x4e);
    let mut rep = Report::default();
    let pi = p as i64;
    for cell in [tet(), tri()] {
        let d = cell.dim;
        let q = build_space(&cell, SpaceKind::Q, pi)?;
        let u = random_element(&q, &mut rng);
        let s = helmholtz_curl(&u)?;
        rep.push(CheckLine::at_most(format!("helmholtz.{d}d.curl.random.p{p}"), s.residual, SPLIT_TOL));
        if d == 3 {
            let v = build_space(&cell, SpaceKind::V, pi)?;
            let u = random_element(&v, &mut rng);
            let s = helmholtz_div(&u)?;
            rep.push(CheckLine::at_most(format!("helmholtz.3d.div.random.p{p}"), s.residual, SPLIT_TOL));
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyspace::MonoPoly;
    use std::collections::BTreeMap;

    fn mono(terms: &[([u8; 3], f64)]) -> MonoPoly {
        MonoPoly(terms.iter().cloned().collect::<BTreeMap<_, _>>())
    }

    #[test]
    fn ball_rule_integrates_theta_to_one() {
        for (cell, kind) in [(tet(), PoincareKind::Grad), (tri(), PoincareKind::Grad2d)] {
            let inv = RegularizedInverse::new(cell, kind);
            let s: f64 = inv.ball_rule(5).iter().map(|(_, w)| w).sum();
            assert!((s - 1.0).abs() < 1e-13, "{s}");
            // Ball rule agrees with the pointwise bump on a product moment.
            let rule = inv.ball_rule(4);
            let c = inv.center;
            let m2: f64 = rule.iter().map(|(a, w)| w * (a[0] - c[0]).powi(2) * (a[1] - c[1]).powi(2)).sum();
            assert!(m2 > 0.0);
        }
    }

    #[test]
    fn div_of_rdiv_one() {
        let one = PolyFn::from_monomials(tet(), 0, &[mono(&[([0, 0, 0], 1.0)])]);
        let inv = RegularizedInverse::new(tet(), PoincareKind::Div3d);
        let z = inv.apply(&one).unwrap();
        let d = apply_diff(DiffOp::Div, &z);
        assert!((d.eval(&[0.2, 0.2, 0.2])[0] - 1.0).abs() < 1e-12);
        // R^div 1 = (x − c)/3 for the symmetric bump.
        let v = z.eval(&[0.4, 0.1, 0.3]);
        assert!((v[0] - (0.4 - 0.25) / 3.0).abs() < 1e-12);
    }

    #[test]
    fn gradient_of_rgrad_of_gradient() {
        let u = PolyFn::from_monomials(tet(), 1, &[mono(&[([1, 0, 0], 2.0)]), mono(&[]), mono(&[])]);
        let inv = RegularizedInverse::new(tet(), PoincareKind::Grad);
        let phi = inv.apply(&u).unwrap();
        let g = apply_diff(DiffOp::Grad, &phi);
        assert!(g.sub(&u).l2_norm() < 1e-12);
    }

    #[test]
    fn curl_of_rcurl_of_rotation() {
        let w = PolyFn::from_monomials(tet(), 1, &[mono(&[([0, 1, 0], -1.0)]), mono(&[([1, 0, 0], 1.0)]), mono(&[])]);
        let inv = RegularizedInverse::new(tet(), PoincareKind::Curl3d);
        let c = apply_diff(DiffOp::Curl3d, &inv.apply(&w).unwrap());
        assert!(c.sub(&w).l2_norm() < 1e-12);
    }
}
