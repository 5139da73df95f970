//! Reference simplices with fixed orientation, sub-simplex charts and
//! collapsed-coordinate Gauss–Jacobi quadrature.

mod gauss;

pub use gauss::{gauss_jacobi, jacobi_with_derivative};

use crate::error::{Error, Result};
use std::f64::consts::PI;
use std::sync::Arc;

/// Highest polynomial degree a quadrature rule can be requested for.
pub const MAX_QUADRATURE_DEGREE: usize = 40;

pub type Point = [f64; 3];

pub(crate) fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}
pub(crate) fn dot(a: &Point, b: &Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}
pub(crate) fn cross(a: &Point, b: &Point) -> Point {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}
pub(crate) fn norm(a: &Point) -> f64 {
    dot(a, a).sqrt()
}
pub(crate) fn scaled(a: &Point, s: f64) -> Point {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// Which interval the one-dimensional reference cell uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellVariant {
    /// Unit simplex; for dim 1 the interval (0, 1).
    Unit,
    /// For dim 1 the interval (−1, 1); higher dimensions use the unit simplex.
    BiunitEdge,
}

/// A simplex in ℝ^dim (points padded with zeros to three coordinates).
#[derive(Clone, Debug)]
pub struct ReferenceCell {
    pub dim: usize,
    pub vertices: Vec<Point>,
    /// Edges as vertex pairs, lower index first.
    pub edges: Vec<[usize; 2]>,
    /// Unit tangent of each edge, pointing from the lower to the higher vertex.
    pub tangents: Vec<Point>,
    /// Faces of a tetrahedron as increasing vertex triples.
    pub faces: Vec<[usize; 3]>,
    /// Outward unit normals of the codimension-one facets (faces in 3D, edges in 2D).
    pub normals: Vec<Point>,
    pub measure: f64,
    jac: [[f64; 3]; 3],
    jac_inv: [[f64; 3]; 3],
    det: f64,
    key: String,
}

/// Affine isometry from a lower-dimensional cell onto a sub-simplex.
#[derive(Clone, Debug)]
pub struct SubChart {
    /// The cell in its own coordinates (congruent to the sub-simplex).
    pub cell: Arc<ReferenceCell>,
    pub origin: Point,
    /// Orthonormal columns spanning the sub-simplex, one per local axis.
    pub axes: Vec<Point>,
    /// Parent vertex index of each local vertex.
    pub vertex_map: Vec<usize>,
}

impl SubChart {
    pub fn map(&self, local: &Point) -> Point {
        let mut x = self.origin;
        for (k, a) in self.axes.iter().enumerate() {
            for i in 0..3 {
                x[i] += local[k] * a[i];
            }
        }
        x
    }

    pub fn inverse(&self, x: &Point) -> Point {
        let d = sub(x, &self.origin);
        let mut out = [0.0; 3];
        for (k, a) in self.axes.iter().enumerate() {
            out[k] = dot(&d, a);
        }
        out
    }

    /// Push a local vector into the parent coordinates.
    pub fn push(&self, v: &[f64]) -> Point {
        let mut x = [0.0; 3];
        for (k, a) in self.axes.iter().enumerate() {
            for i in 0..3 {
                x[i] += v[k] * a[i];
            }
        }
        x
    }
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn inv3(m: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let d = det3(m);
    let mut r = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (a, b) = ((j + 1) % 3, (j + 2) % 3);
            let (c, e) = ((i + 1) % 3, (i + 2) % 3);
            r[i][j] = (m[a][c] * m[b][e] - m[a][e] * m[b][c]) / d;
        }
    }
    r
}

impl ReferenceCell {
    /// Build a simplex of dimension `dim` from its `dim + 1` vertices.
    pub fn from_vertices(dim: usize, vertices: Vec<Point>) -> Self {
        assert!((1..=3).contains(&dim) && vertices.len() == dim + 1);
        let mut jac = [[0.0; 3]; 3];
        for k in 0..3 {
            jac[k][k] = 1.0;
        }
        for c in 0..dim {
            let d = sub(&vertices[c + 1], &vertices[0]);
            for r in 0..dim {
                jac[r][c] = d[r];
            }
        }
        let det = det3(&jac);
        let jac_inv = inv3(&jac);
        let fact = [1.0, 1.0, 2.0, 6.0][dim];
        let measure = det.abs() / fact;

        let mut edges = Vec::new();
        for a in 0..=dim {
            for b in a + 1..=dim {
                edges.push([a, b]);
            }
        }
        let tangents = edges
            .iter()
            .map(|&[a, b]| {
                let d = sub(&vertices[b], &vertices[a]);
                scaled(&d, 1.0 / norm(&d))
            })
            .collect();
        let centroid = centroid_of(&vertices);
        let mut faces = Vec::new();
        let mut normals = Vec::new();
        if dim == 3 {
            faces = vec![[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
            for f in &faces {
                let n = cross(&sub(&vertices[f[1]], &vertices[f[0]]), &sub(&vertices[f[2]], &vertices[f[0]]));
                let mut n = scaled(&n, 1.0 / norm(&n));
                if dot(&n, &sub(&vertices[f[0]], &centroid)) < 0.0 {
                    n = scaled(&n, -1.0);
                }
                normals.push(n);
            }
        } else if dim == 2 {
            for &[a, b] in &edges {
                let t = sub(&vertices[b], &vertices[a]);
                let mut n = [t[1], -t[0], 0.0];
                n = scaled(&n, 1.0 / norm(&n));
                if dot(&n, &sub(&vertices[a], &centroid)) < 0.0 {
                    n = scaled(&n, -1.0);
                }
                normals.push(n);
            }
        }
        let key = format!(
            "{dim}:{}",
            vertices
                .iter()
                .flat_map(|v| v.iter().map(|c| format!("{:x}", c.to_bits())))
                .collect::<Vec<_>>()
                .join(",")
        );
        ReferenceCell { dim, vertices, edges, tangents, faces, normals, measure, jac, jac_inv, det, key }
    }

    /// Stable identifier used by caches.
    pub fn key(&self) -> &str {
        &self.key
    }

    /// Map unit-simplex coordinates into the cell.
    pub fn from_unit(&self, xi: &Point) -> Point {
        let mut x = self.vertices[0];
        for r in 0..self.dim {
            for c in 0..self.dim {
                x[r] += self.jac[r][c] * xi[c];
            }
        }
        x
    }

    /// Unit-simplex coordinates of a cell point.
    pub fn to_unit(&self, x: &Point) -> Point {
        let d = sub(x, &self.vertices[0]);
        let mut xi = [0.0; 3];
        for r in 0..self.dim {
            for c in 0..self.dim {
                xi[r] += self.jac_inv[r][c] * d[c];
            }
        }
        xi
    }

    /// Inverse Jacobian of the unit-simplex map (row r = gradient of ξ_r).
    pub fn jac_inv(&self) -> &[[f64; 3]; 3] {
        &self.jac_inv
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    pub fn centroid(&self) -> Point {
        centroid_of(&self.vertices)
    }

    /// Radius of the inscribed ball.
    pub fn inradius(&self) -> f64 {
        match self.dim {
            1 => self.measure / 2.0,
            2 => {
                let per: f64 = self.edges.iter().map(|&[a, b]| norm(&sub(&self.vertices[b], &self.vertices[a]))).sum();
                2.0 * self.measure / per
            }
            _ => {
                let area: f64 = (0..4).map(|f| self.face_area(f)).sum();
                3.0 * self.measure / area
            }
        }
    }

    fn face_area(&self, f: usize) -> f64 {
        let v = self.faces[f].map(|i| self.vertices[i]);
        norm(&cross(&sub(&v[1], &v[0]), &sub(&v[2], &v[0]))) / 2.0
    }

    fn triangle_angles(v: [Point; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for i in 0..3 {
            let a = sub(&v[(i + 1) % 3], &v[i]);
            let b = sub(&v[(i + 2) % 3], &v[i]);
            out[i] = (dot(&a, &b) / (norm(&a) * norm(&b))).clamp(-1.0, 1.0).acos();
        }
        out
    }

    /// Largest interior angle of the cell (2D) or of any of its faces (3D).
    pub fn max_interior_angle(&self) -> f64 {
        let tris: Vec<[Point; 3]> = match self.dim {
            2 => vec![[self.vertices[0], self.vertices[1], self.vertices[2]]],
            3 => self.faces.iter().map(|f| f.map(|i| self.vertices[i])).collect(),
            _ => return 0.0,
        };
        tris.into_iter()
            .flat_map(Self::triangle_angles)
            .fold(0.0, f64::max)
    }

    /// Regularity limit ŝ = π / ω_max.
    pub fn s_hat(&self) -> f64 {
        PI / self.max_interior_angle()
    }

    /// Chart of edge `e` as the interval (0, length) with arc-length parameter.
    pub fn edge_chart(&self, e: usize) -> Result<SubChart> {
        let &[a, b] = self
            .edges
            .get(e)
            .ok_or_else(|| Error::InvalidSubSimplex(format!("edge {e} of a {}-simplex", self.dim)))?;
        let len = norm(&sub(&self.vertices[b], &self.vertices[a]));
        let cell = ReferenceCell::from_vertices(1, vec![[0.0; 3], [len, 0.0, 0.0]]);
        Ok(SubChart { cell: Arc::new(cell), origin: self.vertices[a], axes: vec![self.tangents[e]], vertex_map: vec![a, b] })
    }

    /// Congruent planar chart of face `f` whose orientation matches the
    /// outward normal. The right-angle vertex, if any, becomes the origin so
    /// that right isosceles unit faces map exactly onto the reference triangle.
    pub fn face_chart(&self, f: usize) -> Result<SubChart> {
        if self.dim != 3 {
            return Err(Error::InvalidSubSimplex(format!("face chart requested on a {}-simplex", self.dim)));
        }
        let face = *self.faces.get(f).ok_or_else(|| Error::InvalidSubSimplex(format!("face {f}")))?;
        let v = face.map(|i| self.vertices[i]);
        let ang = Self::triangle_angles(v);
        let start = (0..3)
            .find(|&i| (ang[i] - PI / 2.0).abs() < 1e-12)
            .unwrap_or(0);
        let mut order = [start, (start + 1) % 3, (start + 2) % 3];
        let n = self.normals[f];
        let c = cross(&sub(&v[order[1]], &v[order[0]]), &sub(&v[order[2]], &v[order[0]]));
        if dot(&c, &n) < 0.0 {
            order.swap(1, 2);
        }
        let o = v[order[0]];
        let d1 = sub(&v[order[1]], &o);
        let e1 = scaled(&d1, 1.0 / norm(&d1));
        let e2 = cross(&n, &e1);
        let local: Vec<Point> = order
            .iter()
            .map(|&i| {
                let d = sub(&v[i], &o);
                [clean(dot(&d, &e1)), clean(dot(&d, &e2)), 0.0]
            })
            .collect();
        Ok(SubChart {
            cell: Arc::new(ReferenceCell::from_vertices(2, local)),
            origin: o,
            axes: vec![e1, e2],
            vertex_map: order.iter().map(|&i| face[i]).collect(),
        })
    }

    /// Codimension-one facets with their charts and outward normals.
    pub fn facets(&self) -> Vec<(SubChart, Point)> {
        match self.dim {
            3 => (0..4).map(|f| (self.face_chart(f).unwrap(), self.normals[f])).collect(),
            2 => (0..3).map(|e| (self.edge_chart(e).unwrap(), self.normals[e])).collect(),
            _ => Vec::new(),
        }
    }

    /// Parent edge index and relative sign of each local edge of a chart.
    pub fn chart_edge_map(&self, chart: &SubChart) -> Vec<(usize, f64)> {
        chart
            .cell
            .edges
            .iter()
            .map(|&[a, b]| {
                let (ga, gb) = (chart.vertex_map[a], chart.vertex_map[b]);
                let key = [ga.min(gb), ga.max(gb)];
                let e = self.edges.iter().position(|x| *x == key).expect("chart edge is a parent edge");
                (e, if ga < gb { 1.0 } else { -1.0 })
            })
            .collect()
    }
}

fn clean(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() < 1e-14 {
        r
    } else {
        x
    }
}

fn centroid_of(v: &[Point]) -> Point {
    let n = v.len() as f64;
    let mut c = [0.0; 3];
    for p in v {
        for i in 0..3 {
            c[i] += p[i] / n;
        }
    }
    c
}

/// The fixed reference cells: unit tetrahedron, unit right triangle and an interval.
pub fn make_reference_cell(dim: usize, variant: CellVariant) -> Arc<ReferenceCell> {
    let v = match (dim, variant) {
        (1, CellVariant::BiunitEdge) => vec![[-1.0, 0.0, 0.0], [1.0, 0.0, 0.0]],
        (1, CellVariant::Unit) => vec![[0.0; 3], [1.0, 0.0, 0.0]],
        (2, _) => vec![[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
        (3, _) => vec![[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        _ => panic!("reference cells exist for dim 1, 2, 3"),
    };
    Arc::new(ReferenceCell::from_vertices(dim, v))
}

/// Unit tetrahedron K̂.
pub fn tet() -> Arc<ReferenceCell> {
    make_reference_cell(3, CellVariant::Unit)
}

/// Unit right triangle f̂.
pub fn tri() -> Arc<ReferenceCell> {
    make_reference_cell(2, CellVariant::Unit)
}

/// The interval ê = (−1, 1).
pub fn edge() -> Arc<ReferenceCell> {
    make_reference_cell(1, CellVariant::BiunitEdge)
}

#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub dim: usize,
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    pub exactness_degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Collapsed-coordinate conical product rule exact to `degree`.
pub fn quadrature(cell: &ReferenceCell, degree: usize) -> Result<QuadratureRule> {
    if degree > MAX_QUADRATURE_DEGREE {
        return Err(Error::UnsupportedDegree(degree));
    }
    let n = degree / 2 + 1;
    let g0 = gauss_jacobi(n, 0);
    let mut unit = Vec::new();
    match cell.dim {
        1 => {
            for (x, w) in g0.0.iter().zip(&g0.1) {
                unit.push(([(1.0 + x) / 2.0, 0.0, 0.0], w / 2.0));
            }
        }
        2 => {
            let g1 = gauss_jacobi(n, 1);
            for (x2, w2) in g1.0.iter().zip(&g1.1) {
                let y = (1.0 + x2) / 2.0;
                for (x1, w1) in g0.0.iter().zip(&g0.1) {
                    unit.push(([(1.0 + x1) / 2.0 * (1.0 - y), y, 0.0], w1 * w2 / 8.0));
                }
            }
        }
        _ => {
            let g1 = gauss_jacobi(n, 1);
            let g2 = gauss_jacobi(n, 2);
            for (x3, w3) in g2.0.iter().zip(&g2.1) {
                let z = (1.0 + x3) / 2.0;
                for (x2, w2) in g1.0.iter().zip(&g1.1) {
                    let y = (1.0 + x2) / 2.0 * (1.0 - z);
                    for (x1, w1) in g0.0.iter().zip(&g0.1) {
                        let x = (1.0 + x1) / 2.0 * (1.0 - y - z);
                        unit.push(([x, y, z], w1 * w2 * w3 / 64.0));
                    }
                }
            }
        }
    }
    let scale = cell.det.abs();
    Ok(QuadratureRule {
        dim: cell.dim,
        points: unit.iter().map(|(p, _)| cell.from_unit(p)).collect(),
        weights: unit.iter().map(|(_, w)| w * scale).collect(),
        exactness_degree: degree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fact(n: u32) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    #[test]
    fn unit_tet_moments_exact() {
        let cell = tet();
        for deg in [0usize, 5, 12, 40] {
            let q = quadrature(&cell, deg).unwrap();
            for a in 0..=deg as u32 {
                for b in 0..=(deg as u32 - a) {
                    let c = deg as u32 - a - b;
                    let exact = fact(a) * fact(b) * fact(c) / fact(a + b + c + 3);
                    let got: f64 = q
                        .points
                        .iter()
                        .zip(&q.weights)
                        .map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32) * p[2].powi(c as i32))
                        .sum();
                    assert!(((got - exact) / exact).abs() < 1e-12, "deg {deg} ({a},{b},{c})");
                }
            }
        }
    }

    #[test]
    fn triangle_moments_exact() {
        let cell = tri();
        for deg in [1usize, 8, 40] {
            let q = quadrature(&cell, deg).unwrap();
            for a in 0..=deg as u32 {
                let b = deg as u32 - a;
                let exact = fact(a) * fact(b) / fact(a + b + 2);
                let got: f64 =
                    q.points.iter().zip(&q.weights).map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32)).sum();
                assert!(((got - exact) / exact).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn degree_cap() {
        assert!(matches!(quadrature(&tet(), 41), Err(Error::UnsupportedDegree(41))));
    }
}
