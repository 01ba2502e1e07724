//! Dense linear algebra for the small matrices used throughout the crate.
//!
//! Everything here works on row-major `f64` storage. Dimensions stay small
//! (at most a few hundred), so the algorithms favour accuracy and simplicity:
//! partial-pivot LU for determinants and solves, cyclic Jacobi for symmetric
//! eigenproblems and one-sided Jacobi for singular values.

use std::ops::{Index, IndexMut, Mul};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative threshold below which a pivot counts as zero.
const PIVOT_EPS: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 80;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Matrix::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from row-major data.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for r in rows {
            if r.len() != n_cols {
                return Err(Error::DimensionMismatch {
                    expected: n_cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix {
            rows: n_rows,
            cols: n_cols,
            data,
        })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<f64>]) -> Result<Self> {
        let n_cols = cols.len();
        let n_rows = cols.first().map_or(0, Vec::len);
        let mut m = Matrix::zeros(n_rows, n_cols);
        for (j, c) in cols.iter().enumerate() {
            if c.len() != n_rows {
                return Err(Error::DimensionMismatch {
                    expected: n_rows,
                    found: c.len(),
                });
            }
            for (i, &v) in c.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn scaled(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.add(&other.scaled(-1.0))
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len(), "mul_vec dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `selfᵀ x` without materialising the transpose.
    pub fn tr_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.rows, x.len(), "tr_mul_vec dimension mismatch");
        let mut out = vec![0.0; self.cols];
        for (i, &xi) in x.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += a * xi;
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm2(&self.data)
    }

    pub fn trace(&self) -> f64 {
        self.diag().iter().sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn lu(&self) -> Lu {
        Lu::new(self)
    }

    pub fn inverse(&self) -> Result<Matrix> {
        let lu = self.lu();
        if lu.is_singular() {
            return Err(Error::Singular);
        }
        let n = self.rows;
        let mut inv = Matrix::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            let col = lu.solve(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        Ok(inv)
    }

    /// Symmetrises in place: `(M + Mᵀ)/2`.
    pub fn symmetrize(&mut self) {
        let n = self.rows;
        for i in 0..n {
            for j in (i + 1)..n {
                let v = 0.5 * (self[(i, j)] + self[(j, i)]);
                self[(i, j)] = v;
                self[(j, i)] = v;
            }
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.matmul(rhs)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `a + t·b`
pub fn axpy(a: &[f64], t: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + t * y).collect()
}

/// LU factorisation with partial pivoting, `P A = L U`.
#[derive(Clone, Debug)]
pub struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
    parity: f64,
    singular: bool,
}

impl Lu {
    pub fn new(m: &Matrix) -> Lu {
        assert!(m.is_square(), "LU requires a square matrix");
        let n = m.rows;
        let mut lu = m.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut parity = 1.0;
        let scale = m.max_abs().max(f64::MIN_POSITIVE);
        let mut singular = false;
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[i * n + k].abs()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax <= PIVOT_EPS * scale {
                singular = true;
                continue;
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                parity = -parity;
            }
            let pivot = lu[k * n + k];
            for i in (k + 1)..n {
                let f = lu[i * n + k] / pivot;
                lu[i * n + k] = f;
                if f != 0.0 {
                    for j in (k + 1)..n {
                        lu[i * n + j] -= f * lu[k * n + j];
                    }
                }
            }
        }
        Lu {
            n,
            lu,
            perm,
            parity,
            singular,
        }
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    /// `(log|det|, sign)`; sign is 0 for a numerically singular matrix.
    pub fn log_abs_det(&self) -> (f64, i8) {
        if self.singular {
            return (f64::NEG_INFINITY, 0);
        }
        let mut log = 0.0;
        let mut sign = self.parity;
        for i in 0..self.n {
            let d = self.lu[i * self.n + i];
            log += d.abs().ln();
            if d < 0.0 {
                sign = -sign;
            }
        }
        (log, if sign > 0.0 { 1 } else { -1 })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                x[i] -= self.lu[i * n + j] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                x[i] -= self.lu[i * n + j] * x[j];
            }
            x[i] /= self.lu[i * n + i];
        }
        x
    }

    /// Solves `Aᵀ x = b`.
    pub fn solve_transpose(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        // Aᵀ = Uᵀ Lᵀ P, so solve Uᵀ z = b, Lᵀ w = z, x = Pᵀ w.
        let mut z = b.to_vec();
        for i in 0..n {
            for j in 0..i {
                z[i] -= self.lu[j * n + i] * z[j];
            }
            z[i] /= self.lu[i * n + i];
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                z[i] -= self.lu[j * n + i] * z[j];
            }
        }
        let mut x = vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = z[i];
        }
        x
    }
}

/// `(log|det M|, sign)` via pivoted LU. Sign 0 means singular to working precision.
pub fn log_abs_det(m: &Matrix) -> (f64, i8) {
    m.lu().log_abs_det()
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order and the matrix whose columns are
/// the corresponding orthonormal eigenvectors.
pub fn symmetric_eigen(m: &Matrix) -> (Vec<f64>, Matrix) {
    assert!(m.is_square());
    let n = m.rows;
    let mut a = m.clone();
    a.symmetrize();
    let mut v = Matrix::identity(n);
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        let total = a.frobenius_norm().powi(2);
        if off <= 1e-30 * total.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (new_j, &old_j) in order.iter().enumerate() {
        for k in 0..n {
            vectors[(k, new_j)] = v[(k, old_j)];
        }
    }
    (values, vectors)
}

/// Thin singular value decomposition `M = U diag(s) Vᵀ` of a square matrix.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: Matrix,
    pub s: Vec<f64>,
    pub v: Matrix,
}

/// One-sided (Hestenes) Jacobi SVD. Singular values are returned descending.
///
/// Columns of `u` that belong to zero singular values are left as zero.
pub fn svd(m: &Matrix) -> Svd {
    assert!(m.is_square(), "svd is implemented for square matrices");
    let n = m.rows;
    let mut w = m.clone();
    let mut v = Matrix::identity(n);
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for k in 0..n {
                    let wi = w[(k, i)];
                    let wj = w[(k, j)];
                    alpha += wi * wi;
                    beta += wj * wj;
                    gamma += wi * wj;
                }
                if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..n {
                    let wi = w[(k, i)];
                    let wj = w[(k, j)];
                    w[(k, i)] = c * wi - s * wj;
                    w[(k, j)] = s * wi + c * wj;
                    let vi = v[(k, i)];
                    let vj = v[(k, j)];
                    v[(k, i)] = c * vi - s * vj;
                    v[(k, j)] = s * vi + c * vj;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..n).map(|j| norm2(&w.column(j))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));
    let mut u = Matrix::zeros(n, n);
    let mut vs = Matrix::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    let tiny = norms.iter().cloned().fold(0.0, f64::max) * 1e-300;
    for (new_j, &old_j) in order.iter().enumerate() {
        let sigma = norms[old_j];
        s.push(sigma);
        for k in 0..n {
            if sigma > tiny && sigma > 0.0 {
                u[(k, new_j)] = w[(k, old_j)] / sigma;
            }
            vs[(k, new_j)] = v[(k, old_j)];
        }
    }
    Svd { u, s, v: vs }
}

/// Singular values of a square matrix, descending.
pub fn singular_values(m: &Matrix) -> Vec<f64> {
    svd(m).s
}

/// Returns the symmetric positive definite `S` with `S C S = I`.
pub fn inv_sqrt_psd(c: &Matrix) -> Result<Matrix> {
    if !c.is_square() {
        return Err(Error::DimensionMismatch {
            expected: c.rows,
            found: c.cols,
        });
    }
    let (vals, vecs) = symmetric_eigen(c);
    let max = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(max > 0.0) || min <= 1e-12 * max {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: min });
    }
    let n = c.rows;
    let mut s = Matrix::zeros(n, n);
    for (k, &lam) in vals.iter().enumerate() {
        let f = 1.0 / lam.sqrt();
        for i in 0..n {
            let vik = vecs[(i, k)] * f;
            for j in 0..n {
                s[(i, j)] += vik * vecs[(j, k)];
            }
        }
    }
    s.symmetrize();
    Ok(s)
}

/// Rotation in the plane of coordinates `(i, j)` by angle `theta`.
pub fn givens(n: usize, i: usize, j: usize, theta: f64) -> Matrix {
    let mut g = Matrix::identity(n);
    let (s, c) = theta.sin_cos();
    g[(i, i)] = c;
    g[(j, j)] = c;
    g[(i, j)] = -s;
    g[(j, i)] = s;
    g
}

/// Orthonormalises the columns of a square matrix (modified Gram-Schmidt),
/// flipping signs so that the diagonal of the `R` factor is positive.
pub fn orthonormalize(m: &Matrix) -> Result<Matrix> {
    let n = m.rows;
    let mut q = m.clone();
    for j in 0..n {
        for k in 0..j {
            let proj: f64 = (0..n).map(|i| q[(i, j)] * q[(i, k)]).sum();
            for i in 0..n {
                q[(i, j)] -= proj * q[(i, k)];
            }
        }
        let nrm: f64 = (0..n).map(|i| q[(i, j)].powi(2)).sum::<f64>().sqrt();
        if nrm < 1e-12 {
            return Err(Error::Singular);
        }
        for i in 0..n {
            q[(i, j)] /= nrm;
        }
    }
    Ok(q)
}
