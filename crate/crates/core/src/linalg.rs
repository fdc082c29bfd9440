//! Dense symmetric matrices and a packed Cholesky factor.
//!
//! Only what exact GPR needs: factorisation with jitter escalation, triangular
//! solves, log-determinants, the explicit inverse used by marginal-likelihood
//! gradients, and appending a row for incremental fits.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // float math is inherent once std is linked (tests)
use num_traits::Float;

use crate::{Error, Result};

/// Square row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn from_row_major(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n, "row-major data must have n*n entries");
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn add_diagonal(&mut self, v: f64) {
        for i in 0..self.n {
            self.data[i * self.n + i] += v;
        }
    }

    pub fn mean_diagonal(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        (0..self.n).map(|i| self.get(i, i)).sum::<f64>() / self.n as f64
    }
}

/// Escalation schedule applied when a plain factorisation fails. Jitter values
/// are relative to the mean diagonal of the matrix.
pub const JITTER_START: f64 = 1e-10;
pub const JITTER_MAX: f64 = 1e-4;
pub const JITTER_FACTOR: f64 = 10.0;

/// Lower-triangular Cholesky factor `L` with `L Lᵀ = A`, stored row-packed.
#[derive(Debug, Clone, PartialEq)]
pub struct Cholesky {
    n: usize,
    data: Vec<f64>,
}

#[inline]
fn row_offset(i: usize) -> usize {
    i * (i + 1) / 2
}

impl Cholesky {
    /// Plain factorisation; `None` if a pivot is non-positive or non-finite.
    pub fn factor(a: &Matrix) -> Option<Self> {
        Self::factor_shifted(a, 0.0)
    }

    fn factor_shifted(a: &Matrix, shift: f64) -> Option<Self> {
        let n = a.dim();
        let mut chol = Self {
            n: 0,
            data: Vec::with_capacity(row_offset(n)),
        };
        let mut row = vec![0.0; n];
        for i in 0..n {
            row[..=i].copy_from_slice(&a.row(i)[..=i]);
            row[i] += shift;
            if !chol.push_row(&row[..=i]) {
                return None;
            }
        }
        Some(chol)
    }

    /// Factorises `a`, escalating a diagonal jitter on failure. Returns the factor
    /// and the absolute jitter that was added (0 if none was needed).
    pub fn factor_with_jitter(a: &Matrix) -> Result<(Self, f64)> {
        if let Some(c) = Self::factor(a) {
            return Ok((c, 0.0));
        }
        let scale = a.mean_diagonal().abs().max(f64::MIN_POSITIVE);
        let mut rel = JITTER_START;
        let mut last = 0.0;
        while rel <= JITTER_MAX * (1.0 + 1e-9) {
            last = rel * scale;
            if let Some(c) = Self::factor_shifted(a, last) {
                return Ok((c, last));
            }
            rel *= JITTER_FACTOR;
        }
        Err(Error::Conditioning { jitter: last })
    }

    /// Appends one row `[a_{n,0}, …, a_{n,n}]` of the (already shifted) matrix,
    /// extending the factor by one dimension. Returns `false` and leaves the
    /// factor untouched if the new pivot is not positive.
    pub fn push_row(&mut self, a_row: &[f64]) -> bool {
        let i = self.n;
        debug_assert_eq!(a_row.len(), i + 1);
        let mut new_row = Vec::with_capacity(i + 1);
        for j in 0..i {
            let lj = self.row(j);
            let dot: f64 = new_row.iter().zip(&lj[..j]).map(|(a, b)| a * b).sum();
            new_row.push((a_row[j] - dot) / lj[j]);
        }
        let sq: f64 = new_row.iter().map(|v| v * v).sum();
        let pivot = a_row[i] - sq;
        if !(pivot > 0.0) || !pivot.is_finite() {
            return false;
        }
        new_row.push(pivot.sqrt());
        self.data.extend_from_slice(&new_row);
        self.n += 1;
        true
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Row `i` of `L`, entries `0..=i`.
    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        let off = row_offset(i);
        &self.data[off..off + i + 1]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j > i {
            0.0
        } else {
            self.data[row_offset(i) + j]
        }
    }

    /// Solves `L z = b`.
    pub fn solve_lower(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let mut z = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let r = self.row(i);
            let dot: f64 = r[..i].iter().zip(&z).map(|(a, b)| a * b).sum();
            z.push((b[i] - dot) / r[i]);
        }
        z
    }

    /// Solves `Lᵀ x = z` in place.
    pub fn solve_upper_in_place(&self, z: &mut [f64]) {
        assert_eq!(z.len(), self.n);
        for i in (0..self.n).rev() {
            let r = self.row(i);
            let xi = z[i] / r[i];
            z[i] = xi;
            for (zk, lik) in z[..i].iter_mut().zip(&r[..i]) {
                *zk -= lik * xi;
            }
        }
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut z = self.solve_lower(b);
        self.solve_upper_in_place(&mut z);
        z
    }

    /// `Σ log L_ii`, i.e. half the log-determinant of `A`.
    pub fn half_log_det(&self) -> f64 {
        (0..self.n).map(|i| self.row(i)[i].ln()).sum()
    }

    /// Explicit `A⁻¹ = L⁻ᵀ L⁻¹`.
    pub fn inverse(&self) -> Matrix {
        let n = self.n;
        // Columns of L⁻¹, stored as rows of (L⁻¹)ᵀ; column j has zeros above j.
        let mut linv_t = Matrix::zeros(n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            for i in j..n {
                let r = self.row(i);
                let dot: f64 = (j..i).map(|k| r[k] * e[k]).sum();
                e[i] = (e[i] - dot) / r[i];
            }
            for i in j..n {
                linv_t.set(j, i, e[i]);
            }
        }
        let mut inv = Matrix::zeros(n);
        for a in 0..n {
            for b in a..n {
                let start = a.max(b);
                let ra = &linv_t.row(a)[start..];
                let rb = &linv_t.row(b)[start..];
                let v: f64 = ra.iter().zip(rb).map(|(x, y)| x * y).sum();
                inv.set(a, b, v);
                inv.set(b, a, v);
            }
        }
        inv
    }

    /// `L Lᵀ`, for verification.
    pub fn reconstruct(&self) -> Matrix {
        Matrix::from_fn(self.n, |i, j| {
            let m = i.min(j);
            (0..=m).map(|k| self.get(i, k) * self.get(j, k)).sum()
        })
    }
}

/// Symmetric eigen-decomposition by cyclic Jacobi rotations. Returns the
/// eigenvalues and the eigenvectors as columns of a row-major matrix. Meant
/// for the tiny overlap matrices of the SOAP radial basis.
pub fn symmetric_eigen(a: &Matrix) -> (Vec<f64>, Matrix) {
    let n = a.dim();
    let mut m = a.clone();
    let mut v = Matrix::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 });
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m.get(i, j) * m.get(i, j))
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (m.get(q, q) - m.get(p, p)) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m.set(k, p, c * mkp - s * mkq);
                    m.set(k, q, s * mkp + c * mkq);
                }
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m.set(p, k, c * mpk - s * mqk);
                    m.set(q, k, s * mpk + c * mqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    let vals = (0..n).map(|i| m.get(i, i)).collect();
    (vals, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spd(n: usize) -> Matrix {
        // Hilbert-like plus diagonal dominance.
        Matrix::from_fn(n, |i, j| 1.0 / (1.0 + i as f64 + j as f64) + if i == j { 1.0 } else { 0.0 })
    }

    #[test]
    fn factor_reconstructs() {
        let a = spd(6);
        let c = Cholesky::factor(&a).unwrap();
        let r = c.reconstruct();
        for (x, y) in a.as_slice().iter().zip(r.as_slice()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn solve_and_inverse_agree() {
        let a = spd(5);
        let c = Cholesky::factor(&a).unwrap();
        let b = [1.0, -2.0, 0.5, 3.0, 0.0];
        let x = c.solve(&b);
        let inv = c.inverse();
        for i in 0..5 {
            let via_inv: f64 = (0..5).map(|j| inv.get(i, j) * b[j]).sum();
            assert!((via_inv - x[i]).abs() < 1e-10);
            let ax: f64 = (0..5).map(|j| a.get(i, j) * x[j]).sum();
            assert!((ax - b[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn singular_matrix_gets_jitter() {
        let a = Matrix::from_fn(3, |_, _| 1.0);
        assert!(Cholesky::factor(&a).is_none());
        let (c, jitter) = Cholesky::factor_with_jitter(&a).unwrap();
        assert!(jitter > 0.0 && jitter <= JITTER_MAX);
        assert_eq!(c.dim(), 3);
    }

    #[test]
    fn indefinite_matrix_fails_with_final_jitter() {
        let a = Matrix::from_fn(2, |i, j| if i == j { -1.0 } else { 0.0 });
        match Cholesky::factor_with_jitter(&a) {
            Err(Error::Conditioning { jitter }) => assert!((jitter - 1e-4).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn jacobi_diagonalises() {
        let a = Matrix::from_row_major(3, vec![4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0]);
        let (vals, vecs) = symmetric_eigen(&a);
        for k in 0..3 {
            for i in 0..3 {
                let av: f64 = (0..3).map(|j| a.get(i, j) * vecs.get(j, k)).sum();
                assert!((av - vals[k] * vecs.get(i, k)).abs() < 1e-10);
            }
        }
    }
}
