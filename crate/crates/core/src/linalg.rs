//! Small dense matrix helpers.
//!
//! Everything here targets the tiny systems this crate solves (state
//! dimensions of a handful, regression designs with a few columns). The
//! algorithms are the plain textbook ones with partial pivoting or
//! symmetric tolerance guards; no external linear-algebra backend.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Pivot-ratio threshold beyond which a factorization is treated as singular.
const COND_MAX: f64 = 1e12;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds from a row-major nested slice; rows must have equal length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidInput("matrix needs at least one row".to_string()));
        }
        let cols = rows[0].len();
        if cols == 0 || rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidInput("ragged or empty matrix rows".to_string()));
        }
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            data.extend_from_slice(r);
        }
        Ok(Mat {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch("matrix data length".to_string()));
        }
        Ok(Mat { rows, cols, data })
    }

    /// 1x1 matrix, handy for scalar state-space models.
    pub fn scalar(x: f64) -> Self {
        Mat {
            rows: 1,
            cols: 1,
            data: vec![x],
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "mul_vec shape mismatch");
        let mut out = vec![0.0; self.rows];
        for i in 0..self.rows {
            let mut s = 0.0;
            for j in 0..self.cols {
                s += self[(i, j)] * v[j];
            }
            out[i] = s;
        }
        out
    }

    pub fn add(&self, rhs: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(rhs.data.iter()) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, rhs: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(rhs.data.iter()) {
            *a -= b;
        }
        out
    }

    pub fn scale(&self, c: f64) -> Mat {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= c;
        }
        out
    }

    /// (A + A')/2, used to keep covariance recursions symmetric.
    pub fn symmetrize(&self) -> Mat {
        assert!(self.is_square());
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..i {
                let s = 0.5 * (self[(i, j)] + self[(j, i)]);
                out[(i, j)] = s;
                out[(j, i)] = s;
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Largest singular value, via Jacobi eigenvalues of A'A.
    pub fn op_norm2(&self) -> f64 {
        let gram = self.transpose().matmul(self);
        let eigs = sym_eigenvalues(&gram);
        eigs.iter().fold(0.0f64, |m, &e| m.max(e.max(0.0))).sqrt()
    }
}

impl core::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Solves A x = b by LU with partial pivoting.
///
/// Fails with [`Error::Singular`] when a pivot vanishes or the pivot ratio
/// indicates effective rank deficiency.
pub fn lu_solve(a: &Mat, b: &[f64]) -> Result<Vec<f64>> {
    assert!(a.is_square());
    assert_eq!(a.nrows(), b.len());
    let n = a.nrows();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();

    let mut max_pivot = 0.0f64;
    let mut min_pivot = f64::MAX;
    for col in 0..n {
        let mut max_val = lu[(perm[col], col)].abs();
        let mut max_row = col;
        for row in (col + 1)..n {
            let val = lu[(perm[row], col)].abs();
            if val > max_val {
                max_val = val;
                max_row = row;
            }
        }
        if max_val < 1e-300 {
            return Err(Error::Singular("zero pivot in LU".to_string()));
        }
        max_pivot = max_pivot.max(max_val);
        min_pivot = min_pivot.min(max_val);
        perm.swap(col, max_row);

        let pivot = lu[(perm[col], col)];
        for row in (col + 1)..n {
            let factor = lu[(perm[row], col)] / pivot;
            lu[(perm[row], col)] = factor;
            for k in (col + 1)..n {
                let v = lu[(perm[col], k)];
                lu[(perm[row], k)] -= factor * v;
            }
        }
    }
    if min_pivot <= 0.0 || max_pivot / min_pivot > COND_MAX {
        return Err(Error::Singular("rank deficient system".to_string()));
    }

    // Forward then back substitution.
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut s = b[perm[i]];
        for j in 0..i {
            s -= lu[(perm[i], j)] * y[j];
        }
        y[i] = s;
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for j in (i + 1)..n {
            s -= lu[(perm[i], j)] * x[j];
        }
        x[i] = s / lu[(perm[i], i)];
    }
    Ok(x)
}

/// Strict Cholesky A = L L' for symmetric positive definite matrices.
///
/// Returns the lower factor. Fails when a pivot is not safely positive or
/// the diagonal spread exceeds the conditioning guard.
pub fn cholesky_spd(a: &Mat) -> Result<Mat> {
    assert!(a.is_square());
    let n = a.nrows();
    let scale = (0..n).fold(0.0f64, |m, i| m.max(a[(i, i)].abs())).max(1e-300);
    let mut l = Mat::zeros(n, n);
    let mut min_d = f64::MAX;
    let mut max_d = 0.0f64;
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            if i == j {
                if s <= scale * 1e-14 {
                    return Err(Error::Singular("innovation covariance not positive definite".to_string()));
                }
                min_d = min_d.min(s);
                max_d = max_d.max(s);
                l[(i, i)] = s.sqrt();
            } else {
                l[(i, j)] = s / l[(j, j)];
            }
        }
    }
    if max_d / min_d > COND_MAX {
        return Err(Error::Singular("ill-conditioned covariance".to_string()));
    }
    Ok(l)
}

/// Cholesky-like square root for positive *semi*definite matrices.
///
/// Zero (within tolerance) pivots produce zero columns, so a singular
/// covariance still yields a usable sampling factor. Indefinite input fails.
pub fn cholesky_psd(a: &Mat) -> Result<Mat> {
    assert!(a.is_square());
    let n = a.nrows();
    let scale = (0..n).fold(0.0f64, |m, i| m.max(a[(i, i)].abs())).max(1.0);
    let tol = scale * 1e-12;
    let mut l = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            if i == j {
                if s < -tol {
                    return Err(Error::Singular("matrix is not positive semidefinite".to_string()));
                }
                l[(i, i)] = if s > tol { s.sqrt() } else { 0.0 };
            } else {
                l[(i, j)] = if l[(j, j)] > 0.0 { s / l[(j, j)] } else { 0.0 };
            }
        }
    }
    Ok(l)
}

/// Solves L x = b for lower-triangular L (from a strict Cholesky).
pub fn forward_substitute(l: &Mat, b: &[f64]) -> Vec<f64> {
    let n = l.nrows();
    let mut x = vec![0.0; n];
    for i in 0..n {
        let mut s = b[i];
        for j in 0..i {
            s -= l[(i, j)] * x[j];
        }
        x[i] = s / l[(i, i)];
    }
    x
}

/// Solves L' x = b for lower-triangular L.
pub fn back_substitute_t(l: &Mat, b: &[f64]) -> Vec<f64> {
    let n = l.nrows();
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for j in (i + 1)..n {
            s -= l[(j, i)] * x[j];
        }
        x[i] = s / l[(i, i)];
    }
    x
}

/// Inverse of an SPD matrix through its Cholesky factor.
pub fn spd_inverse(a: &Mat) -> Result<Mat> {
    let l = cholesky_spd(a)?;
    let n = a.nrows();
    let mut inv = Mat::zeros(n, n);
    for col in 0..n {
        let mut e = vec![0.0; n];
        e[col] = 1.0;
        let y = forward_substitute(&l, &e);
        let x = back_substitute_t(&l, &y);
        for row in 0..n {
            inv[(row, col)] = x[row];
        }
    }
    Ok(inv.symmetrize())
}

/// log det of an SPD matrix via Cholesky.
pub fn spd_log_det(a: &Mat) -> Result<f64> {
    let l = cholesky_spd(a)?;
    let mut s = 0.0;
    for i in 0..a.nrows() {
        s += l[(i, i)].ln();
    }
    Ok(2.0 * s)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn sym_eigenvalues(a: &Mat) -> Vec<f64> {
    assert!(a.is_square());
    let n = a.nrows();
    if n == 1 {
        return vec![a[(0, 0)]];
    }
    let mut m = a.symmetrize();
    for _sweep in 0..64 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[(i, j)] * m[(i, j)];
            }
        }
        let scale = m.frobenius_norm().max(1e-300);
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq.abs() <= 1e-18 * scale {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[(k, p)];
                    let akq = m[(k, q)];
                    m[(k, p)] = c * akp - s * akq;
                    m[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[(p, k)];
                    let aqk = m[(q, k)];
                    m[(p, k)] = c * apk - s * aqk;
                    m[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| m[(i, i)]).collect()
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn sym_min_eigenvalue(a: &Mat) -> f64 {
    sym_eigenvalues(a).into_iter().fold(f64::MAX, f64::min)
}

/// Spectral radius estimate by Gelfand's formula with repeated squaring.
///
/// Tracks log norms so powers neither overflow nor underflow; after k
/// squarings the estimate is ||T^(2^k)||^(1/2^k), an upper bound on the true
/// radius that is tight to relative accuracy ~log(cond)/2^k.
pub fn spectral_radius(t: &Mat) -> f64 {
    assert!(t.is_square());
    let norm0 = t.frobenius_norm();
    if norm0 == 0.0 {
        return 0.0;
    }
    let mut b = t.scale(1.0 / norm0);
    let mut log_norm = norm0.ln(); // log ||T^(2^0)||
    let mut pow = 1.0f64; // 2^k
    for _ in 0..48 {
        let sq = b.matmul(&b);
        let nm = sq.frobenius_norm();
        if nm == 0.0 {
            return 0.0; // nilpotent
        }
        log_norm = 2.0 * log_norm + nm.ln();
        pow *= 2.0;
        b = sq.scale(1.0 / nm);
    }
    (log_norm / pow).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn lu_solves_known_system() {
        let a = Mat::from_rows(&[
            vec![4.0, 1.0, 0.0],
            vec![1.0, 3.0, -1.0],
            vec![0.0, -1.0, 2.0],
        ])
        .unwrap();
        let x_true = vec![1.0, -2.0, 0.5];
        let b = a.mul_vec(&x_true);
        let x = lu_solve(&a, &b).unwrap();
        for (xi, ti) in x.iter().zip(&x_true) {
            assert_abs_diff_eq!(xi, ti, epsilon = 1e-12);
        }
    }

    #[test]
    fn lu_rejects_singular() {
        let a = Mat::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(lu_solve(&a, &[1.0, 2.0]), Err(Error::Singular(_))));
    }

    #[test]
    fn cholesky_roundtrip() {
        let a = Mat::from_rows(&[vec![4.0, 2.0], vec![2.0, 3.0]]).unwrap();
        let l = cholesky_spd(&a).unwrap();
        let back = l.matmul(&l.transpose());
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(back[(i, j)], a[(i, j)], epsilon = 1e-12);
            }
        }
        assert_abs_diff_eq!(spd_log_det(&a).unwrap(), (4.0f64 * 3.0 - 4.0).ln(), epsilon = 1e-12);
    }

    #[test]
    fn psd_cholesky_accepts_singular() {
        let zero = Mat::zeros(2, 2);
        let l = cholesky_psd(&zero).unwrap();
        assert_eq!(l, Mat::zeros(2, 2));

        // rank-1 PSD
        let a = Mat::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let l = cholesky_psd(&a).unwrap();
        let back = l.matmul(&l.transpose());
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(back[(i, j)], a[(i, j)], epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn psd_cholesky_rejects_indefinite() {
        let a = Mat::from_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]]).unwrap();
        assert!(cholesky_psd(&a).is_err());
    }

    #[test]
    fn jacobi_eigenvalues_match_trace_and_known() {
        let a = Mat::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let mut e = sym_eigenvalues(&a);
        e.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert_abs_diff_eq!(e[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e[1], 3.0, epsilon = 1e-12);
    }

    #[test]
    fn op_norm_of_diagonal() {
        let a = Mat::from_rows(&[vec![3.0, 0.0], vec![0.0, -5.0]]).unwrap();
        assert_abs_diff_eq!(a.op_norm2(), 5.0, epsilon = 1e-10);
    }

    #[test]
    fn spectral_radius_rotation_scaled() {
        // 0.9 * rotation: complex eigenvalues of modulus 0.9, where naive
        // power iteration on a real vector oscillates.
        let c = 0.9 * (0.7f64).cos();
        let s = 0.9 * (0.7f64).sin();
        let t = Mat::from_rows(&[vec![c, -s], vec![s, c]]).unwrap();
        assert_abs_diff_eq!(spectral_radius(&t), 0.9, epsilon = 1e-9);
    }

    #[test]
    fn spectral_radius_jordan_block() {
        let t = Mat::from_rows(&[vec![0.95, 1.0], vec![0.0, 0.95]]).unwrap();
        assert_abs_diff_eq!(spectral_radius(&t), 0.95, epsilon = 1e-9);
    }

    #[test]
    fn spectral_radius_zero_and_nilpotent() {
        assert_eq!(spectral_radius(&Mat::zeros(3, 3)), 0.0);
        let n = Mat::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(spectral_radius(&n), 0.0);
    }

    #[test]
    fn spd_inverse_multiplies_to_identity() {
        let a = Mat::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let inv = spd_inverse(&a).unwrap();
        let prod = a.matmul(&inv);
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(prod[(i, j)], want, epsilon = 1e-12);
            }
        }
    }
}
