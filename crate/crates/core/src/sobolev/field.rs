//! Black-box fields evaluated with second-order automatic differentiation,
//! and the derived quantities (gradients, curls, divergences, Hessians)
//! that Sobolev norms are built from.

use crate::calculus::{ambient_diff, DiffOp};
use crate::polyspace::{eval_basis, n_poly, sample_rows, Field, Jet, PolyFn};
use crate::refsimplex::{Point, ReferenceCell};
use nalgebra::DMatrix;
use std::fmt;
use std::sync::Arc;

type JetFn = dyn Fn(&[Jet; 3]) -> Vec<Jet> + Send + Sync;

/// Declared regularity of a field, used for study bookkeeping only.
#[derive(Clone, Debug, PartialEq)]
pub enum Smoothness {
    Polynomial(usize),
    Entire,
    /// Sobolev index bound k (the field is in H^k for every smaller k).
    Finite(f64),
}

impl fmt::Display for Smoothness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Smoothness::Polynomial(d) => write!(f, "polynomial({d})"),
            Smoothness::Entire => f.write_str("entire"),
            Smoothness::Finite(k) => write!(f, "finite({k})"),
        }
    }
}

/// A scalar or vector function given as a jet closure.
#[derive(Clone)]
pub struct AnalyticField {
    pub name: String,
    pub value_dim: usize,
    pub smoothness: Smoothness,
    /// Number of trustworthy derivative orders in the jets (2 for closures,
    /// one less for each derived operator applied).
    pub order: usize,
    f: Arc<JetFn>,
}

impl fmt::Debug for AnalyticField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AnalyticField({}, dim {}, {})", self.name, self.value_dim, self.smoothness)
    }
}

impl AnalyticField {
    pub fn new<F>(name: impl Into<String>, value_dim: usize, smoothness: Smoothness, f: F) -> Self
    where
        F: Fn(&[Jet; 3]) -> Vec<Jet> + Send + Sync + 'static,
    {
        AnalyticField { name: name.into(), value_dim, smoothness, order: 2, f: Arc::new(f) }
    }

    pub fn jets(&self, x: &Point) -> Vec<Jet> {
        (self.f)(&Jet::point(x))
    }

    pub fn eval_vec(&self, x: &Point) -> Vec<f64> {
        self.jets(x).iter().map(|j| j.v).collect()
    }

    fn derived<F>(&self, name: String, value_dim: usize, map: F) -> AnalyticField
    where
        F: Fn(&[Jet]) -> Vec<Jet> + Send + Sync + 'static,
    {
        let parent = self.f.clone();
        AnalyticField {
            name,
            value_dim,
            smoothness: self.smoothness.clone(),
            order: self.order.saturating_sub(1),
            f: Arc::new(move |x| map(&parent(x))),
        }
    }

    /// Gradient of a scalar field (the cell dimension picks the component count).
    pub fn grad(&self, dim: usize) -> AnalyticField {
        assert_eq!(self.value_dim, 1);
        self.derived(format!("grad({})", self.name), dim, move |j| (0..dim).map(|k| d1(&j[0], k)).collect())
    }

    /// 3D curl of a vector field.
    pub fn curl(&self) -> AnalyticField {
        assert_eq!(self.value_dim, 3);
        self.derived(format!("curl({})", self.name), 3, |j| {
            (0..3)
                .map(|i| {
                    let (a, b) = ((i + 1) % 3, (i + 2) % 3);
                    d1(&j[b], a) - d1(&j[a], b)
                })
                .collect()
        })
    }

    /// Scalar curl ∂₁u₂ − ∂₂u₁ of a planar vector field.
    pub fn curl2d(&self) -> AnalyticField {
        assert_eq!(self.value_dim, 2);
        self.derived(format!("curl({})", self.name), 1, |j| vec![d1(&j[1], 0) - d1(&j[0], 1)])
    }

    pub fn div(&self, dim: usize) -> AnalyticField {
        self.derived(format!("div({})", self.name), 1, move |j| {
            let mut acc = Jet::cst(0.0);
            for k in 0..dim {
                acc = acc + d1(&j[k], k);
            }
            vec![acc]
        })
    }
}

/// First derivative of a jet as a jet (value ∂_k f, gradient from the Hessian).
fn d1(f: &Jet, k: usize) -> Jet {
    Jet { v: f.g[k], g: f.h[k], h: [[0.0; 3]; 3] }
}

impl Field for AnalyticField {
    fn value_dim(&self) -> usize {
        self.value_dim
    }
    fn eval_into(&self, x: &Point, out: &mut [f64]) {
        for (o, j) in out.iter_mut().zip(self.jets(x)) {
            *o = j.v;
        }
    }
}

/// Fields whose derivatives can be sampled.
pub trait DiffField: Field {
    fn jets(&self, x: &Point) -> Vec<Jet>;
    /// Highest derivative order available from `jets`.
    fn order(&self) -> usize;
}

impl DiffField for AnalyticField {
    fn jets(&self, x: &Point) -> Vec<Jet> {
        AnalyticField::jets(self, x)
    }
    fn order(&self) -> usize {
        self.order
    }
}

impl DiffField for PolyFn {
    fn jets(&self, x: &Point) -> Vec<Jet> {
        let xs = Jet::point(x);
        let v = eval_basis::<Jet>(&self.cell, self.degree, &xs[..self.cell.dim]);
        let n = v.len();
        (0..self.value_dim)
            .map(|c| {
                let mut acc = Jet::cst(0.0);
                for j in 0..n {
                    acc = acc + v[j] * self.coeffs[c * n + j];
                }
                acc
            })
            .collect()
    }
    fn order(&self) -> usize {
        usize::MAX
    }
}

/// Pointwise quantities that norms integrate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    Value,
    Grad,
    Hess,
    /// 3D curl, or the scalar curl of a planar field.
    Curl,
    GradCurl,
    Div,
    GradDiv,
}

impl Quantity {
    pub fn order(&self) -> usize {
        match self {
            Quantity::Value => 0,
            Quantity::Grad | Quantity::Curl | Quantity::Div => 1,
            Quantity::Hess | Quantity::GradCurl | Quantity::GradDiv => 2,
        }
    }
}

fn curl_of(j: &[Jet], dim: usize) -> Vec<Jet> {
    if dim == 3 {
        (0..3)
            .map(|i| {
                let (a, b) = ((i + 1) % 3, (i + 2) % 3);
                d1(&j[b], a) - d1(&j[a], b)
            })
            .collect()
    } else {
        vec![d1(&j[1], 0) - d1(&j[0], 1)]
    }
}

fn div_of(j: &[Jet], dim: usize) -> Jet {
    let mut acc = Jet::cst(0.0);
    for k in 0..dim {
        acc = acc + d1(&j[k], k);
    }
    acc
}

/// Quantity values from jets, in the same component order as `quantity_rows`.
pub fn quantity_from_jets(j: &[Jet], q: Quantity, dim: usize) -> Vec<f64> {
    let grads = |js: &[Jet]| -> Vec<f64> { js.iter().flat_map(|f| f.g[..dim].to_vec()).collect() };
    match q {
        Quantity::Value => j.iter().map(|f| f.v).collect(),
        Quantity::Grad => grads(j),
        Quantity::Hess => j.iter().flat_map(|f| (0..dim).flat_map(move |k| f.h[k][..dim].to_vec())).collect(),
        Quantity::Curl => curl_of(j, dim).iter().map(|f| f.v).collect(),
        Quantity::GradCurl => grads(&curl_of(j, dim)),
        Quantity::Div => vec![div_of(j, dim).v],
        Quantity::GradDiv => div_of(j, dim).g[..dim].to_vec(),
    }
}

/// Componentwise gradient of ambient rows: output component c·dim + k.
fn grad_components(cell: &ReferenceCell, degree: usize, vd: usize, rows: &DMatrix<f64>) -> DMatrix<f64> {
    let n = n_poly(cell.dim, degree);
    let g = ambient_diff(cell, DiffOp::Grad, degree);
    let d = cell.dim;
    let mut out = DMatrix::zeros(rows.nrows(), vd * d * n);
    for c in 0..vd {
        let block = rows.columns(c * n, n) * g.transpose();
        out.columns_mut(c * d * n, d * n).copy_from(&block);
    }
    out
}

/// Ambient rows of a quantity applied to ambient rows; returns (rows, components).
pub fn quantity_rows(cell: &ReferenceCell, degree: usize, vd: usize, rows: &DMatrix<f64>, q: Quantity) -> (DMatrix<f64>, usize) {
    let d = cell.dim;
    let op = |o: DiffOp, r: &DMatrix<f64>| r * ambient_diff(cell, o, degree).transpose();
    let curl_op = if d == 3 { DiffOp::Curl3d } else { DiffOp::Curl2dVector };
    let curl_vd = if d == 3 { 3 } else { 1 };
    match q {
        Quantity::Value => (rows.clone(), vd),
        Quantity::Grad => (grad_components(cell, degree, vd, rows), vd * d),
        Quantity::Hess => {
            let g = grad_components(cell, degree, vd, rows);
            (grad_components(cell, degree, vd * d, &g), vd * d * d)
        }
        Quantity::Curl => (op(curl_op, rows), curl_vd),
        Quantity::GradCurl => (grad_components(cell, degree, curl_vd, &op(curl_op, rows)), curl_vd * d),
        Quantity::Div => (op(DiffOp::Div, rows), 1),
        Quantity::GradDiv => (grad_components(cell, degree, 1, &op(DiffOp::Div, rows)), d),
    }
}

/// Samples of a quantity of ambient rows at points (point-major rows).
pub fn sample_quantity_rows(
    cell: &ReferenceCell,
    degree: usize,
    vd: usize,
    rows: &DMatrix<f64>,
    q: Quantity,
    pts: &[Point],
) -> DMatrix<f64> {
    let (r, k) = quantity_rows(cell, degree, vd, rows, q);
    sample_rows(cell, degree, k, &r, pts)
}

/// Samples of several quantities of a differentiable field at points,
/// concatenated per point in the order given.
pub fn sample_quantities(f: &dyn DiffField, qs: &[Quantity], dim: usize, pts: &[Point]) -> Vec<Vec<f64>> {
    crate::par::map_collect(pts.to_vec(), |p| {
        let j = f.jets(&p);
        qs.iter().flat_map(|q| quantity_from_jets(&j, *q, dim)).collect()
    })
}
