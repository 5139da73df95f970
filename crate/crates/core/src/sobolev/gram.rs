//! Gram matrices of a polynomial space in L², H¹, H², and the spectral
//! data behind discrete fractional and dual norms.

use super::field::{quantity_rows, Quantity};
use crate::error::{Error, Result};
use crate::polyspace::{build_space, PolySpace, SpaceKind};
use crate::refsimplex::ReferenceCell;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Spectral interpolation between L², H¹ and (optionally) H² on one space.
#[derive(Clone, Debug)]
pub struct SobolevGram {
    pub space: Arc<PolySpace>,
    pub m: DMatrix<f64>,
    pub a1: DMatrix<f64>,
    pub a2: Option<DMatrix<f64>>,
    /// Cholesky factor of M; everything below lives in whitened coordinates z = Lᵀc.
    l: DMatrix<f64>,
    /// Eigenpairs of L⁻¹A1L⁻ᵀ (all ≥ 1).
    lambda: DVector<f64>,
    u: DMatrix<f64>,
    /// Eigenpairs of S⁻¹(L⁻¹A2L⁻ᵀ)S⁻¹ with S the whitened A1^{1/2}.
    upper: Option<(DVector<f64>, DMatrix<f64>)>,
}

fn gram_of(rows: &DMatrix<f64>) -> DMatrix<f64> {
    let g = rows * rows.transpose();
    (&g + g.transpose()) * 0.5
}

fn sym_eigen(a: DMatrix<f64>, what: &str) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let e = SymmetricEigen::new(a);
    let max = e.eigenvalues.max();
    let min = e.eigenvalues.min();
    if !(min > 1e-13 * max) {
        return Err(Error::Singular { context: what.to_string(), sigma: min });
    }
    Ok((e.eigenvalues, e.eigenvectors))
}

impl SobolevGram {
    pub fn new(space: Arc<PolySpace>, with_h2: bool) -> Result<Self> {
        let cell = &space.cell;
        let (n, vd) = (space.degree, space.value_dim);
        let b = &space.basis;
        let m = gram_of(b);
        let grad = quantity_rows(cell, n, vd, b, Quantity::Grad).0;
        let a1 = &m + gram_of(&grad);
        let a2 = with_h2.then(|| &a1 + gram_of(&quantity_rows(cell, n, vd, b, Quantity::Hess).0));

        let l = m.clone().cholesky().ok_or_else(|| Error::Singular { context: "L2 Gram".into(), sigma: 0.0 })?.l();
        let li = l.clone().try_inverse().ok_or_else(|| Error::Singular { context: "L2 Gram factor".into(), sigma: 0.0 })?;
        let whiten = |a: &DMatrix<f64>| {
            let w = &li * a * li.transpose();
            (&w + w.transpose()) * 0.5
        };
        let (lambda, u) = sym_eigen(whiten(&a1), "H1 Gram")?;
        let upper = match &a2 {
            Some(a2) => {
                let s_inv = &u * DMatrix::from_diagonal(&lambda.map(|x| x.powf(-0.5))) * u.transpose();
                let k = &s_inv * whiten(a2) * &s_inv;
                Some(sym_eigen((&k + k.transpose()) * 0.5, "H2 Gram")?)
            }
            None => None,
        };
        Ok(SobolevGram { space, m, a1, a2, l, lambda, u, upper })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    fn check_s(&self, s: f64) -> Result<()> {
        let top = if self.upper.is_some() { 2.0 } else { 1.0 };
        if !(0.0..=top).contains(&s) {
            return Err(Error::InvalidOrder(s));
        }
        Ok(())
    }

    /// Whitened fractional operator H̃_s (H_s = L H̃_s Lᵀ).
    fn whitened(&self, s: f64, inverse: bool) -> DMatrix<f64> {
        let sign = if inverse { -1.0 } else { 1.0 };
        if s <= 1.0 {
            let d = self.lambda.map(|x| x.powf(sign * s));
            return &self.u * DMatrix::from_diagonal(&d) * self.u.transpose();
        }
        let (mu, v) = self.upper.as_ref().expect("checked by check_s");
        let half = self.lambda.map(|x| x.powf(sign * 0.5));
        let sh = &self.u * DMatrix::from_diagonal(&half) * self.u.transpose();
        let d = mu.map(|x| x.powf(sign * (s - 1.0)));
        &sh * v * DMatrix::from_diagonal(&d) * v.transpose() * &sh
    }

    /// The fractional Gram H_s in coefficient coordinates.
    pub fn fractional_gram(&self, s: f64) -> Result<DMatrix<f64>> {
        self.check_s(s)?;
        Ok(&self.l * self.whitened(s, false) * self.l.transpose())
    }

    /// Inverse of H_s.
    pub fn fractional_gram_inverse(&self, s: f64) -> Result<DMatrix<f64>> {
        self.check_s(s)?;
        let li = self.l.clone().try_inverse().expect("factor is invertible");
        Ok(li.transpose() * self.whitened(s, true) * li)
    }
}

/// Discrete H^s norm of a member of the gram's space.
pub fn fractional_norm(g: &SobolevGram, coeffs: &DVector<f64>, s: f64) -> Result<f64> {
    g.check_s(s)?;
    let z = g.l.transpose() * coeffs;
    if s <= 1.0 {
        let y = g.u.transpose() * z;
        return Ok(y.iter().zip(g.lambda.iter()).map(|(y, l)| l.powf(s) * y * y).sum::<f64>().sqrt());
    }
    let (mu, v) = g.upper.as_ref().expect("checked");
    let y = g.u.transpose() * z;
    let y = &g.u * y.component_mul(&g.lambda.map(f64::sqrt));
    let w = v.transpose() * y;
    Ok(w.iter().zip(mu.iter()).map(|(w, m)| m.powf(s - 1.0) * w * w).sum::<f64>().sqrt())
}

/// sqrt(Σ bᵀ H_s⁻¹ b) over moment vectors (one per field component).
pub fn dual_norm_moments(g: &SobolevGram, moments: &[DVector<f64>], s: f64) -> Result<f64> {
    g.check_s(s)?;
    let li = g.l.clone().try_inverse().expect("factor is invertible");
    let mut total = 0.0;
    for b in moments {
        let y = &li * b;
        if s <= 1.0 {
            let w = g.u.transpose() * y;
            total += w.iter().zip(g.lambda.iter()).map(|(w, l)| w * w / l.powf(s)).sum::<f64>();
        } else {
            let (mu, v) = g.upper.as_ref().expect("checked");
            let y = &g.u * (g.u.transpose() * y).component_mul(&g.lambda.map(|x| x.powf(-0.5)));
            let w = v.transpose() * y;
            total += w.iter().zip(mu.iter()).map(|(w, m)| w * w / m.powf(s - 1.0)).sum::<f64>();
        }
    }
    Ok(total.max(0.0).sqrt())
}

/// Cached Gram of the full scalar P_P on a cell, the default dual-norm test space.
pub fn test_gram(cell: &Arc<ReferenceCell>, degree: usize, with_h2: bool) -> Result<Arc<SobolevGram>> {
    static CACHE: OnceLock<Mutex<HashMap<(String, usize, bool), Arc<SobolevGram>>>> = OnceLock::new();
    let key = (cell.key().to_string(), degree, with_h2);
    let cache = CACHE.get_or_init(Default::default);
    if let Some(g) = cache.lock().unwrap().get(&key) {
        return Ok(g.clone());
    }
    let space = Arc::new(build_space(cell, SpaceKind::L2, degree as i64)?);
    let g = Arc::new(SobolevGram::new(space, with_h2)?);
    cache.lock().unwrap().insert(key, g.clone());
    Ok(g)
}
