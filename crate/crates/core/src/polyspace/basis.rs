//! Orthonormal Proriol–Koornwinder–Dubiner polynomials on simplices,
//! evaluated over any commutative ring: plain values, dual numbers,
//! second-order jets, or exact monomial expansions.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

/// Arithmetic needed by the recurrences.
pub trait Ring: Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> {
    fn constant(c: f64) -> Self;
    fn scale(&self, c: f64) -> Self;
}

impl Ring for f64 {
    fn constant(c: f64) -> Self {
        c
    }
    fn scale(&self, c: f64) -> Self {
        self * c
    }
}

/// Number of polynomials of total degree ≤ n in `dim` variables.
pub fn n_poly(dim: usize, n: usize) -> usize {
    match dim {
        0 => 1,
        1 => n + 1,
        2 => (n + 1) * (n + 2) / 2,
        _ => (n + 1) * (n + 2) * (n + 3) / 6,
    }
}

/// Multi-indices in basis order: by total degree, then lexicographic.
pub fn multi_indices(dim: usize, n: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::with_capacity(n_poly(dim, n));
    for t in 0..=n {
        match dim {
            1 => out.push([t, 0, 0]),
            2 => (0..=t).for_each(|a| out.push([a, t - a, 0])),
            _ => {
                for a in 0..=t {
                    for b in 0..=t - a {
                        out.push([a, b, t - a - b]);
                    }
                }
            }
        }
    }
    out
}

/// Total degree of basis function `i`.
pub fn degree_of(dim: usize, i: usize) -> usize {
    let mut n = 0;
    while n_poly(dim, n) <= i {
        n += 1;
    }
    n
}

/// Homogeneous scaled Jacobi values s^k P_k^{(α,0)}(t/s) for k = 0..=n.
fn scaled_jacobi<R: Ring>(n: usize, alpha: f64, t: &R, s: &R) -> Vec<R> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(R::constant(1.0));
    if n == 0 {
        return out;
    }
    out.push((t.scale(alpha + 2.0) + s.scale(alpha)).scale(0.5));
    let s2 = s.clone() * s.clone();
    for k in 1..n {
        let kf = k as f64;
        let c = 2.0 * kf + alpha;
        let d = 2.0 * (kf + 1.0) * (kf + alpha + 1.0) * c;
        let a = (c + 1.0) * (c + 2.0) * c / d;
        let b = (c + 1.0) * alpha * alpha / d;
        let g = 2.0 * (kf + alpha) * kf * (c + 2.0) / d;
        let next = (t.scale(a) + s.scale(b)) * out[k].clone() - (s2.clone() * out[k - 1].clone()).scale(g);
        out.push(next);
    }
    out
}

/// Orthonormal basis on the unit simplex evaluated at unit coordinates `xi`.
pub fn pkd_unit<R: Ring>(dim: usize, n: usize, xi: &[R]) -> Vec<R> {
    let one = R::constant(1.0);
    let idx = multi_indices(dim, n);
    let mut out = vec![R::constant(0.0); idx.len()];
    match dim {
        1 => {
            let t = xi[0].scale(2.0) - one.clone();
            let p = scaled_jacobi(n, 0.0, &t, &one);
            for (i, m) in idx.iter().enumerate() {
                out[i] = p[m[0]].scale((2.0 * m[0] as f64 + 1.0).sqrt());
            }
        }
        2 => {
            let t1 = xi[0].scale(2.0) + xi[1].clone() - one.clone();
            let s1 = one.clone() - xi[1].clone();
            let q = scaled_jacobi(n, 0.0, &t1, &s1);
            let t2 = xi[1].scale(2.0) - one.clone();
            let mut table = vec![Vec::new(); n + 1];
            for a in 0..=n {
                table[a] = scaled_jacobi(n - a, 2.0 * a as f64 + 1.0, &t2, &one);
            }
            for (i, m) in idx.iter().enumerate() {
                let (a, b) = (m[0], m[1]);
                let nrm = ((2 * a + 1) as f64 * (2 * a + 2 * b + 2) as f64).sqrt();
                out[i] = (q[a].clone() * table[a][b].clone()).scale(nrm);
            }
        }
        _ => {
            let t1 = xi[0].scale(2.0) + xi[1].clone() + xi[2].clone() - one.clone();
            let s1 = one.clone() - xi[1].clone() - xi[2].clone();
            let q = scaled_jacobi(n, 0.0, &t1, &s1);
            let t2 = xi[1].scale(2.0) + xi[2].clone() - one.clone();
            let s2 = one.clone() - xi[2].clone();
            let t3 = xi[2].scale(2.0) - one.clone();
            let mut rb = Vec::with_capacity(n + 1);
            for a in 0..=n {
                rb.push(scaled_jacobi(n - a, 2.0 * a as f64 + 1.0, &t2, &s2));
            }
            let mut pc: Vec<Vec<Vec<R>>> = Vec::with_capacity(n + 1);
            for a in 0..=n {
                let mut row = Vec::with_capacity(n + 1 - a);
                for b in 0..=n - a {
                    row.push(scaled_jacobi(n - a - b, 2.0 * (a + b) as f64 + 2.0, &t3, &one));
                }
                pc.push(row);
            }
            for (i, m) in idx.iter().enumerate() {
                let (a, b, c) = (m[0], m[1], m[2]);
                let nrm = ((2 * a + 1) as f64 * (2 * a + 2 * b + 2) as f64 * (2 * a + 2 * b + 2 * c + 3) as f64).sqrt();
                out[i] = (q[a].clone() * rb[a][b].clone() * pc[a][b][c].clone()).scale(nrm);
            }
        }
    }
    out
}

/// Value plus gradient.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual {
    pub v: f64,
    pub g: [f64; 3],
}

impl Dual {
    pub fn var(v: f64, k: usize) -> Self {
        let mut g = [0.0; 3];
        g[k] = 1.0;
        Dual { v, g }
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual { v: self.v + o.v, g: [self.g[0] + o.g[0], self.g[1] + o.g[1], self.g[2] + o.g[2]] }
    }
}
impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual { v: self.v - o.v, g: [self.g[0] - o.g[0], self.g[1] - o.g[1], self.g[2] - o.g[2]] }
    }
}
impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        let mut g = [0.0; 3];
        for k in 0..3 {
            g[k] = self.g[k] * o.v + self.v * o.g[k];
        }
        Dual { v: self.v * o.v, g }
    }
}
impl Ring for Dual {
    fn constant(c: f64) -> Self {
        Dual { v: c, g: [0.0; 3] }
    }
    fn scale(&self, c: f64) -> Self {
        Dual { v: self.v * c, g: [self.g[0] * c, self.g[1] * c, self.g[2] * c] }
    }
}

/// Value, gradient and Hessian; the scalar type of analytic fields.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub g: [f64; 3],
    pub h: [[f64; 3]; 3],
}

impl Jet {
    pub fn cst(v: f64) -> Self {
        Jet { v, g: [0.0; 3], h: [[0.0; 3]; 3] }
    }

    pub fn var(v: f64, k: usize) -> Self {
        let mut j = Jet::cst(v);
        j.g[k] = 1.0;
        j
    }

    /// Coordinates of a point as independent variables.
    pub fn point(x: &[f64; 3]) -> [Jet; 3] {
        [Jet::var(x[0], 0), Jet::var(x[1], 1), Jet::var(x[2], 2)]
    }

    /// Compose with a scalar function given f, f', f''.
    pub fn chain(&self, f: f64, df: f64, ddf: f64) -> Jet {
        let mut out = Jet::cst(f);
        for i in 0..3 {
            out.g[i] = df * self.g[i];
            for j in 0..3 {
                out.h[i][j] = df * self.h[i][j] + ddf * self.g[i] * self.g[j];
            }
        }
        out
    }

    pub fn exp(&self) -> Jet {
        let e = self.v.exp();
        self.chain(e, e, e)
    }
    pub fn sin(&self) -> Jet {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }
    pub fn cos(&self) -> Jet {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }
    /// x^a for x > 0 (or integer-valued a).
    pub fn powf(&self, a: f64) -> Jet {
        let x = self.v;
        if x == 0.0 {
            return self.chain(0.0, 0.0, 0.0);
        }
        self.chain(x.powf(a), a * x.powf(a - 1.0), a * (a - 1.0) * x.powf(a - 2.0))
    }
    pub fn sqrt(&self) -> Jet {
        self.powf(0.5)
    }
    pub fn recip(&self) -> Jet {
        let x = self.v;
        self.chain(1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x))
    }
    pub fn powi(&self, k: i32) -> Jet {
        let mut r = Jet::cst(1.0);
        for _ in 0..k {
            r = r * *self;
        }
        r
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let mut r = self;
        r.v += o.v;
        for i in 0..3 {
            r.g[i] += o.g[i];
            for j in 0..3 {
                r.h[i][j] += o.h[i][j];
            }
        }
        r
    }
}
impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + o.scale(-1.0)
    }
}
impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}
impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut r = Jet::cst(self.v * o.v);
        for i in 0..3 {
            r.g[i] = self.g[i] * o.v + self.v * o.g[i];
            for j in 0..3 {
                r.h[i][j] = self.h[i][j] * o.v + self.v * o.h[i][j] + self.g[i] * o.g[j] + self.g[j] * o.g[i];
            }
        }
        r
    }
}
impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, c: f64) -> Jet {
        let mut r = self;
        r.v += c;
        r
    }
}
impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, c: f64) -> Jet {
        self.scale(c)
    }
}
impl Ring for Jet {
    fn constant(c: f64) -> Self {
        Jet::cst(c)
    }
    fn scale(&self, c: f64) -> Self {
        let mut r = *self;
        r.v *= c;
        for i in 0..3 {
            r.g[i] *= c;
            for j in 0..3 {
                r.h[i][j] *= c;
            }
        }
        r
    }
}

/// Polynomial in up to three variables stored as exponent → coefficient.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MonoPoly(pub BTreeMap<[u8; 3], f64>);

impl MonoPoly {
    pub fn var(k: usize) -> Self {
        let mut e = [0u8; 3];
        e[k] = 1;
        MonoPoly(BTreeMap::from([(e, 1.0)]))
    }

    pub fn eval(&self, x: &[f64; 3]) -> f64 {
        self.0
            .iter()
            .map(|(e, c)| c * x[0].powi(e[0] as i32) * x[1].powi(e[1] as i32) * x[2].powi(e[2] as i32))
            .sum()
    }
}

impl Add for MonoPoly {
    type Output = MonoPoly;
    fn add(mut self, o: MonoPoly) -> MonoPoly {
        for (e, c) in o.0 {
            *self.0.entry(e).or_insert(0.0) += c;
        }
        self
    }
}
impl Sub for MonoPoly {
    type Output = MonoPoly;
    fn sub(self, o: MonoPoly) -> MonoPoly {
        self + o.scale(-1.0)
    }
}
impl Mul for MonoPoly {
    type Output = MonoPoly;
    fn mul(self, o: MonoPoly) -> MonoPoly {
        let mut out = BTreeMap::new();
        for (e1, c1) in &self.0 {
            for (e2, c2) in &o.0 {
                let e = [e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2]];
                *out.entry(e).or_insert(0.0) += c1 * c2;
            }
        }
        MonoPoly(out)
    }
}
impl Ring for MonoPoly {
    fn constant(c: f64) -> Self {
        MonoPoly(BTreeMap::from([([0u8; 3], c)]))
    }
    fn scale(&self, c: f64) -> Self {
        MonoPoly(self.0.iter().map(|(e, v)| (*e, v * c)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::refsimplex::{make_reference_cell, quadrature, CellVariant};

    #[test]
    fn orthonormal_on_unit_simplices() {
        for dim in 1..=3 {
            let n = 6;
            let cell = make_reference_cell(dim, CellVariant::Unit);
            let q = quadrature(&cell, 2 * n).unwrap();
            let m = n_poly(dim, n);
            let mut g = vec![0.0; m * m];
            for (p, w) in q.points.iter().zip(&q.weights) {
                let v = pkd_unit(dim, n, &p[..dim]);
                for i in 0..m {
                    for j in 0..m {
                        g[i * m + j] += w * v[i] * v[j];
                    }
                }
            }
            for i in 0..m {
                for j in 0..m {
                    let e = if i == j { 1.0 } else { 0.0 };
                    assert!((g[i * m + j] - e).abs() < 1e-12, "dim {dim} ({i},{j}) {}", g[i * m + j]);
                }
            }
        }
    }

    #[test]
    fn degrees_are_graded() {
        // ψ_i has degree exactly degree_of(i): checked through the monomial expansion.
        let x = [MonoPoly::var(0), MonoPoly::var(1), MonoPoly::var(2)];
        let v = pkd_unit(3, 4, &x);
        for (i, p) in v.iter().enumerate() {
            let deg = p.0.iter().filter(|(_, c)| c.abs() > 1e-12).map(|(e, _)| (e[0] + e[1] + e[2]) as usize).max().unwrap();
            assert_eq!(deg, degree_of(3, i));
        }
    }

    #[test]
    fn jet_product_rule() {
        let x = Jet::point(&[0.3, 0.2, 0.1]);
        let f = (x[0] * x[1]).exp();
        let e = (0.06f64).exp();
        assert!((f.g[0] - 0.2 * e).abs() < 1e-15);
        assert!((f.h[0][1] - (e + 0.06 * e)).abs() < 1e-14);
    }
}
