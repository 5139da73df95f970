//! Dense helpers shared by every module: rank decisions, null spaces,
//! orthonormal row bases and pseudoinverses, all with one relative cutoff.

use nalgebra::DMatrix;

/// Singular values at or below `RANK_CUTOFF * sigma_max` count as zero.
pub const RANK_CUTOFF: f64 = 1e-10;

/// Thin singular value decomposition keeping the pairs above the cutoff.
///
/// Rectangular inputs are first reduced to a square triangular factor by
/// Householder QR, which preserves the singular values. The square factor is
/// decomposed through the symmetric eigenproblem of `[[0, R], [R^T, 0]]`, whose
/// eigenpairs are `(+-sigma, (u, +-v) / sqrt 2)`. nalgebra's bidiagonal SVD
/// returns inconsistent factors on some rank-deficient inputs, while the
/// symmetric eigensolver stays backward stable and keeps the conditioning.
struct Thin {
    sigma: Vec<f64>,
    u: DMatrix<f64>,
    v: DMatrix<f64>,
}

fn thin_svd(m: &DMatrix<f64>) -> Thin {
    let (r, c) = m.shape();
    if r > c {
        let qr = m.clone().qr();
        let t = square_svd(&qr.r());
        return Thin { u: qr.q() * t.u, ..t };
    }
    if c > r {
        let qr = m.transpose().qr();
        let t = square_svd(&qr.r());
        return Thin { sigma: t.sigma, u: t.v, v: qr.q() * t.u };
    }
    square_svd(m)
}

fn square_svd(m: &DMatrix<f64>) -> Thin {
    let n = m.nrows();
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    j.view_mut((0, n), (n, n)).copy_from(m);
    j.view_mut((n, 0), (n, n)).copy_from(&m.transpose());
    let eig = j.symmetric_eigen();
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let sigma: Vec<f64> = order[..n].iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();
    let smax = sigma.first().cloned().unwrap_or(0.0);
    let keep: Vec<usize> = order[..n]
        .iter()
        .cloned()
        .filter(|&i| smax > 0.0 && eig.eigenvalues[i] > RANK_CUTOFF * smax)
        .collect();
    let mut u = DMatrix::zeros(n, keep.len());
    let mut v = DMatrix::zeros(n, keep.len());
    for (k, &i) in keep.iter().enumerate() {
        let col = eig.eigenvectors.column(i);
        u.column_mut(k).copy_from(&col.rows(0, n).normalize());
        v.column_mut(k).copy_from(&col.rows(n, n).normalize());
    }
    Thin { sigma, u, v }
}

fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    thin_svd(m).sigma
}

/// Numerical rank with the shared cutoff.
pub fn rank(m: &DMatrix<f64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    thin_svd(m).u.ncols()
}

/// Orthonormal basis of the null space of `m`, one basis vector per row.
pub fn null_space_rows(m: &DMatrix<f64>) -> DMatrix<f64> {
    let c = m.ncols();
    if c == 0 {
        return DMatrix::zeros(0, 0);
    }
    if m.nrows() == 0 {
        return DMatrix::identity(c, c);
    }
    let range = orth_rows(m);
    let k = c - range.nrows();
    if k == 0 {
        return DMatrix::zeros(0, c);
    }
    // The complementary projector has eigenvalues one (null space) and zero
    // (range), so column-pivoted QR separates them without an eigensolve.
    let proj = DMatrix::identity(c, c) - range.transpose() * &range;
    let q = proj.col_piv_qr().q();
    reorthonormalize(q.columns(0, k).transpose())
}

/// Householder pass restoring orthonormality to nearly orthonormal rows.
fn reorthonormalize(rows: DMatrix<f64>) -> DMatrix<f64> {
    if rows.nrows() == 0 {
        return rows;
    }
    rows.transpose().qr().q().transpose()
}

/// Orthonormal basis of the row space of `m`, one basis vector per row.
pub fn orth_rows(m: &DMatrix<f64>) -> DMatrix<f64> {
    let c = m.ncols();
    if m.nrows() == 0 || c == 0 {
        return DMatrix::zeros(0, c);
    }
    reorthonormalize(thin_svd(m).v.transpose())
}

/// Rows of `within` (orthonormal) orthogonal to the row span of `sub`.
pub fn complement_rows(within: &DMatrix<f64>, sub: &DMatrix<f64>) -> DMatrix<f64> {
    if sub.nrows() == 0 {
        return within.clone();
    }
    let coords = sub * within.transpose();
    let n = null_space_rows(&coords);
    n * within
}

/// Pseudoinverse with the shared relative cutoff.
pub fn pinv(m: &DMatrix<f64>) -> DMatrix<f64> {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return DMatrix::zeros(c, r);
    }
    let t = thin_svd(m);
    let mut out = DMatrix::zeros(c, r);
    for k in 0..t.u.ncols() {
        out += (t.v.column(k) / t.sigma[k]) * t.u.column(k).transpose();
    }
    out
}

/// Smallest and largest singular values.
pub fn sigma_range(m: &DMatrix<f64>) -> (f64, f64) {
    if m.nrows() == 0 || m.ncols() == 0 {
        return (0.0, 0.0);
    }
    let s = singular_values(m);
    let lo = s.iter().cloned().fold(f64::INFINITY, f64::min);
    (lo, s.first().cloned().unwrap_or(0.0))
}

/// Largest absolute entry, zero for empty matrices.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, &b| a.max(b.abs()))
}

/// Stack matrices with equal column counts on top of each other.
pub fn vstack(blocks: &[&DMatrix<f64>], ncols: usize) -> DMatrix<f64> {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = DMatrix::zeros(rows, ncols);
    let mut r0 = 0;
    for b in blocks {
        if b.nrows() > 0 {
            out.view_mut((r0, 0), (b.nrows(), ncols)).copy_from(*b);
        }
        r0 += b.nrows();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_space_of_rank_one() {
        let m = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 0.0]);
        let n = null_space_rows(&m);
        assert_eq!(n.nrows(), 2);
        assert!(max_abs(&(&m * n.transpose())) < 1e-14);
        assert!(max_abs(&(&n * n.transpose() - DMatrix::identity(2, 2))) < 1e-14);
    }

    #[test]
    fn complement_inside_subspace() {
        let within = DMatrix::identity(3, 3);
        let sub = DMatrix::from_row_slice(1, 3, &[0.0, 0.0, 2.0]);
        let c = complement_rows(&within, &sub);
        assert_eq!(c.nrows(), 2);
        assert!(c.column(2).norm() < 1e-14);
    }

    #[test]
    fn rank_deficient_tall_matrix() {
        let a = DMatrix::from_fn(10, 1, |i, _| (i as f64 + 1.0).sin());
        let b = DMatrix::from_row_slice(1, 4, &[1.0, -2.0, 0.5, 3.0]);
        let m = &a * &b;
        assert_eq!(rank(&m), 1);
        let p = pinv(&m);
        assert!(max_abs(&(&m * &p * &m - &m)) < 1e-13);
        let n = null_space_rows(&m);
        assert_eq!(n.nrows(), 3);
        assert!(max_abs(&(&m * n.transpose())) < 1e-13);
        let o = orth_rows(&m);
        assert!(max_abs(&(&o * n.transpose())) < 1e-13);
    }

    #[test]
    fn pinv_recovers_inverse() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 3.0]);
        let p = pinv(&m);
        assert!(max_abs(&(&p * &m - DMatrix::identity(2, 2))) < 1e-14);
    }
}
