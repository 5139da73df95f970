//! Per-cell coefficient algebra of the orthonormal basis: evaluation
//! tables, exact derivative and coordinate-multiplication matrices, and
//! restriction matrices onto sub-simplex charts. Everything is cached.

use super::basis::{n_poly, pkd_unit, Dual, Ring};
use crate::par;
use crate::refsimplex::{quadrature, Point, ReferenceCell, SubChart};
use nalgebra::DMatrix;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Orthonormal basis of P_n on `cell` at a ring-valued point.
pub fn eval_basis<R: Ring>(cell: &ReferenceCell, n: usize, x: &[R]) -> Vec<R> {
    let d = cell.dim;
    let ji = cell.jac_inv();
    let v0 = cell.vertices[0];
    let mut xi = Vec::with_capacity(d);
    for r in 0..d {
        let mut acc = R::constant(0.0);
        for c in 0..d {
            acc = acc + (x[c].clone() - R::constant(v0[c])).scale(ji[r][c]);
        }
        xi.push(acc);
    }
    let s = 1.0 / cell.det().abs().sqrt();
    pkd_unit(d, n, &xi).into_iter().map(|v| v.scale(s)).collect()
}

/// Values of the basis at many points, one row per point.
pub fn eval_table(cell: &ReferenceCell, n: usize, pts: &[Point]) -> DMatrix<f64> {
    let m = n_poly(cell.dim, n);
    let rows = par::map_collect(pts.to_vec(), |p| eval_basis::<f64>(cell, n, &p[..]));
    let mut t = DMatrix::zeros(pts.len(), m);
    for (i, r) in rows.iter().enumerate() {
        for j in 0..m {
            t[(i, j)] = r[j];
        }
    }
    t
}

/// Values and first derivatives: (values, [∂_0, ∂_1, ∂_2]) tables.
pub fn eval_grad_tables(cell: &ReferenceCell, n: usize, pts: &[Point]) -> (DMatrix<f64>, Vec<DMatrix<f64>>) {
    let m = n_poly(cell.dim, n);
    let d = cell.dim;
    let rows = par::map_collect(pts.to_vec(), |p| {
        let x: Vec<Dual> = (0..d).map(|k| Dual::var(p[k], k)).collect();
        eval_basis::<Dual>(cell, n, &x)
    });
    let mut v = DMatrix::zeros(pts.len(), m);
    let mut g = vec![DMatrix::zeros(pts.len(), m); d];
    for (i, r) in rows.iter().enumerate() {
        for j in 0..m {
            v[(i, j)] = r[j].v;
            for k in 0..d {
                g[k][(i, j)] = r[j].g[k];
            }
        }
    }
    (v, g)
}

/// Exact matrices of ∂_k and of multiplication by x_k in the orthonormal basis.
#[derive(Debug)]
pub struct Algebra {
    pub dim: usize,
    pub degree: usize,
    /// `deriv[k][(i, j)] = (ψ_i, ∂_k ψ_j)`.
    pub deriv: Vec<DMatrix<f64>>,
    /// `mult[k][(i, j)] = (ψ_i, x_k ψ_j)`; exact for columns of degree < `degree`.
    pub mult: Vec<DMatrix<f64>>,
}

impl Algebra {
    fn build(cell: &ReferenceCell, degree: usize) -> Self {
        let q = quadrature(cell, 2 * degree + 1).expect("algebra degree within quadrature range");
        let (v, g) = eval_grad_tables(cell, degree, &q.points);
        let mut wv = v.clone();
        for (i, w) in q.weights.iter().enumerate() {
            wv.row_mut(i).scale_mut(*w);
        }
        let wvt = wv.transpose();
        let deriv = g.iter().map(|gk| &wvt * gk).collect();
        let mult = (0..cell.dim)
            .map(|k| {
                let mut xv = v.clone();
                for (i, p) in q.points.iter().enumerate() {
                    xv.row_mut(i).scale_mut(p[k]);
                }
                &wvt * xv
            })
            .collect();
        Algebra { dim: cell.dim, degree, deriv, mult }
    }

    /// ∂_k restricted to P_n (n ≤ degree).
    pub fn d(&self, k: usize, n: usize) -> DMatrix<f64> {
        let m = n_poly(self.dim, n);
        self.deriv[k].view((0, 0), (m, m)).into_owned()
    }

    /// Multiplication by x_k from P_{n} into P_{n+1} (n + 1 ≤ degree).
    pub fn x(&self, k: usize, n: usize) -> DMatrix<f64> {
        let (r, c) = (n_poly(self.dim, n + 1), n_poly(self.dim, n));
        self.mult[k].view((0, 0), (r, c)).into_owned()
    }
}

const MIN_ALGEBRA_DEGREE: usize = 12;

/// Cached algebra of `cell` valid at least up to degree `n`.
pub fn algebra(cell: &ReferenceCell, n: usize) -> Arc<Algebra> {
    static CACHE: OnceLock<Mutex<HashMap<String, Arc<Algebra>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(a) = cache.lock().unwrap().get(cell.key()) {
        if a.degree >= n {
            return a.clone();
        }
    }
    let deg = n.max(MIN_ALGEBRA_DEGREE.min(19));
    let built = match crate::studies::cache::load_algebra(cell, deg) {
        Some(a) => Arc::new(a),
        None => {
            let a = Algebra::build(cell, deg);
            crate::studies::cache::store_algebra(cell, &a);
            Arc::new(a)
        }
    };
    let mut guard = cache.lock().unwrap();
    let entry = guard.entry(cell.key().to_string()).or_insert_with(|| built.clone());
    if entry.degree < built.degree {
        *entry = built;
    }
    entry.clone()
}

pub(crate) fn algebra_from_parts(dim: usize, degree: usize, deriv: Vec<DMatrix<f64>>, mult: Vec<DMatrix<f64>>) -> Algebra {
    Algebra { dim, degree, deriv, mult }
}

/// `R[(i, j)] = ∫_S ψ^S_i (ψ_j ∘ chart)`: coefficients of the restriction of P_n.
pub fn restriction(cell: &ReferenceCell, chart: &SubChart, n: usize) -> Arc<DMatrix<f64>> {
    static CACHE: OnceLock<Mutex<HashMap<String, Arc<DMatrix<f64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = format!(
        "{}|{}|{:?}|{:?}|{n}",
        cell.key(),
        chart.cell.key(),
        chart.origin.map(f64::to_bits),
        chart.axes.iter().map(|a| a.map(f64::to_bits)).collect::<Vec<_>>()
    );
    if let Some(r) = cache.lock().unwrap().get(&key) {
        return r.clone();
    }
    let q = quadrature(&chart.cell, 2 * n).expect("restriction degree within range");
    let sub = eval_table(&chart.cell, n, &q.points);
    let pts: Vec<Point> = q.points.iter().map(|p| chart.map(p)).collect();
    let par = eval_table(cell, n, &pts);
    let mut ws = sub;
    for (i, w) in q.weights.iter().enumerate() {
        ws.row_mut(i).scale_mut(*w);
    }
    let r = Arc::new(ws.transpose() * par);
    cache.lock().unwrap().insert(key, r.clone());
    r
}

/// Re-block component-blocked coefficients from degree `from` to degree `to`,
/// truncating higher-degree coefficients when `to < from`.
pub fn change_degree(coeffs: &[f64], dim: usize, value_dim: usize, from: usize, to: usize) -> Vec<f64> {
    let (nf, nt) = (n_poly(dim, from), n_poly(dim, to));
    let mut out = vec![0.0; nt * value_dim];
    let m = nf.min(nt);
    for c in 0..value_dim {
        out[c * nt..c * nt + m].copy_from_slice(&coeffs[c * nf..c * nf + m]);
    }
    out
}

/// Matrix form of `change_degree` acting on columns.
pub fn degree_embedding(dim: usize, value_dim: usize, from: usize, to: usize) -> DMatrix<f64> {
    let (nf, nt) = (n_poly(dim, from), n_poly(dim, to));
    let mut e = DMatrix::zeros(nt * value_dim, nf * value_dim);
    for c in 0..value_dim {
        for i in 0..nf.min(nt) {
            e[(c * nt + i, c * nf + i)] = 1.0;
        }
    }
    e
}
