//! Gauss–Jacobi rules for the weight (1−x)^α on (−1, 1).

use nalgebra::DMatrix;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Jacobi polynomial P_n^{(α,0)}(x) and its derivative.
pub fn jacobi_with_derivative(n: usize, alpha: f64, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut d0) = (1.0, 0.0);
    let (mut p1, mut d1) = (((alpha + 2.0) * x + alpha) / 2.0, (alpha + 2.0) / 2.0);
    for k in 2..=n {
        let k = k as f64;
        let c = 2.0 * k + alpha;
        let a1 = 2.0 * k * (k + alpha) * (c - 2.0);
        let b = (c - 1.0) * (c * (c - 2.0) * x + alpha * alpha);
        let bd = (c - 1.0) * c * (c - 2.0);
        let g = 2.0 * (k + alpha - 1.0) * (k - 1.0) * c;
        let p2 = (b * p1 - g * p0) / a1;
        let d2 = (bd * p1 + b * d1 - g * d0) / a1;
        p0 = p1;
        d0 = d1;
        p1 = p2;
        d1 = d2;
    }
    (p1, d1)
}

fn compute(n: usize, alpha: usize) -> (Vec<f64>, Vec<f64>) {
    let a = alpha as f64;
    // Golub–Welsch on the symmetric Jacobi matrix of the monic recurrence.
    let mut t = DMatrix::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let c = 2.0 * kf + a;
        t[(k, k)] = if k == 0 { -a / (a + 2.0) } else { -a * a / (c * (c + 2.0)) };
        if k + 1 < n {
            let m = kf + 1.0;
            let c = 2.0 * m + a;
            let b2 = 4.0 * m * (m + a) * m * (m + a) / (c * c * (c + 1.0) * (c - 1.0));
            t[(k, k + 1)] = b2.sqrt();
            t[(k + 1, k)] = b2.sqrt();
        }
    }
    let eig = t.symmetric_eigen();
    let mut x: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    x.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let scale = 2f64.powi(alpha as i32 + 1);
    let mut w = Vec::with_capacity(n);
    for xi in x.iter_mut() {
        for _ in 0..4 {
            let (p, d) = jacobi_with_derivative(n, a, *xi);
            *xi -= p / d;
        }
        let (_, d) = jacobi_with_derivative(n, a, *xi);
        w.push(scale / ((1.0 - *xi * *xi) * d * d));
    }
    (x, w)
}

type Rule = Arc<(Vec<f64>, Vec<f64>)>;

/// Nodes and weights of the n-point rule for ∫ (1−x)^α f(x) dx, α integer.
pub fn gauss_jacobi(n: usize, alpha: usize) -> Rule {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().unwrap().get(&(n, alpha)) {
        return r.clone();
    }
    let r = Arc::new(compute(n, alpha));
    cache.lock().unwrap().insert((n, alpha), r.clone());
    r
}
