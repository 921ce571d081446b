//! Dense matrix kernels used by the Fourier-domain tensor algebra.
//!
//! Two SVD routes are provided. [`thin_svd`] and [`singular_values`] are the
//! fast path used everywhere in the library and are backed by `faer`.
//! [`jacobi_svd`] is a self-contained one-sided Jacobi kernel; the test
//! suites run it against dense block-circulant matrices so that the oracle
//! never shares code with the fast path.

mod jacobi;

use std::ops::{Index, IndexMut};

use faer::{c64, Mat};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub use jacobi::jacobi_svd;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense real matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn matmul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::shape(
                "matmul",
                format!("{}x{} times {}x{}", self.rows, self.cols, rhs.rows, rhs.cols),
            ));
        }
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                let rrow = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, &b) in row.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn to_complex(&self) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    pub fn fro_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Complex64,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub(crate) fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn conj(&self) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.data[r * self.cols + c].conj();
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "CMatrix::matmul inner dimension");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let rrow = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, &b) in row.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `selfᴴ · rhs` without materializing the adjoint.
    pub fn adjoint_matmul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.rows, rhs.rows, "CMatrix::adjoint_matmul row count");
        let mut out = CMatrix::zeros(self.cols, rhs.cols);
        for k in 0..self.rows {
            let lrow = &self.data[k * self.cols..(k + 1) * self.cols];
            let rrow = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
            for (i, a) in lrow.iter().enumerate() {
                if *a == ZERO {
                    continue;
                }
                let a = a.conj();
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, &b) in orow.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `self · rhsᴴ` without materializing the adjoint.
    pub fn matmul_adjoint(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.cols, "CMatrix::matmul_adjoint column count");
        let mut out = CMatrix::zeros(self.rows, rhs.rows);
        for i in 0..self.rows {
            let lrow = &self.data[i * self.cols..(i + 1) * self.cols];
            for j in 0..rhs.rows {
                let rrow = &rhs.data[j * rhs.cols..(j + 1) * rhs.cols];
                let mut acc = ZERO;
                for (a, b) in lrow.iter().zip(rrow) {
                    acc += a * b.conj();
                }
                out.data[i * rhs.rows + j] = acc;
            }
        }
        out
    }

    pub fn add_assign(&mut self, rhs: &CMatrix) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }

    pub fn sub_assign(&mut self, rhs: &CMatrix) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
    }

    pub fn scale(&mut self, s: f64) {
        for a in &mut self.data {
            *a *= s;
        }
    }

    pub fn fro_norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn max_imag(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.im.abs()))
    }

    /// Columns `0..k` as a new matrix.
    pub fn leading_columns(&self, k: usize) -> CMatrix {
        CMatrix::from_fn(self.rows, k, |r, c| self[(r, c)])
    }

    fn to_faer(&self) -> Mat<c64> {
        Mat::from_fn(self.rows, self.cols, |r, c| self.data[r * self.cols + c])
    }

    fn to_faer_real(&self) -> Mat<f64> {
        Mat::from_fn(self.rows, self.cols, |r, c| self.data[r * self.cols + c].re)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Thin singular value decomposition `A = U · diag(s) · Vᴴ` with
/// `U: m×k`, `V: n×k`, `k = min(m, n)` and `s` nonincreasing.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub v: CMatrix,
}

impl Svd {
    /// `U[:, ..r] · diag(w) · V[:, ..r]ᴴ` for the given weights.
    pub fn reconstruct_with(&self, weights: &[f64]) -> CMatrix {
        let (m, n) = (self.u.rows(), self.v.rows());
        let r = weights.len();
        let mut out = CMatrix::zeros(m, n);
        for i in 0..m {
            let orow = &mut out.data[i * n..(i + 1) * n];
            for (l, &w) in weights.iter().enumerate().take(r) {
                if w == 0.0 {
                    continue;
                }
                let a = self.u[(i, l)] * w;
                for (j, o) in orow.iter_mut().enumerate() {
                    *o += a * self.v[(j, l)].conj();
                }
            }
        }
        out
    }
}

/// Thin SVD through `faer`. `real` requests the real-arithmetic kernel, which
/// keeps singular vectors of real slices real.
pub fn thin_svd(a: &CMatrix, real: bool) -> Result<Svd> {
    let (m, n) = (a.rows(), a.cols());
    let k = m.min(n);
    if k == 0 {
        return Ok(Svd {
            u: CMatrix::zeros(m, 0),
            s: Vec::new(),
            v: CMatrix::zeros(n, 0),
        });
    }
    let fail = |_| Error::ConvergenceFailure { op: "thin_svd" };
    if real {
        let svd = a.to_faer_real().thin_svd().map_err(fail)?;
        let (u, v, s) = (svd.U(), svd.V(), svd.S().column_vector());
        Ok(Svd {
            u: CMatrix::from_fn(m, k, |r, c| Complex64::new(u[(r, c)], 0.0)),
            s: (0..k).map(|i| s[i]).collect(),
            v: CMatrix::from_fn(n, k, |r, c| Complex64::new(v[(r, c)], 0.0)),
        })
    } else {
        let svd = a.to_faer().thin_svd().map_err(fail)?;
        let (u, v, s) = (svd.U(), svd.V(), svd.S().column_vector());
        Ok(Svd {
            u: CMatrix::from_fn(m, k, |r, c| u[(r, c)]),
            s: (0..k).map(|i| s[i].re).collect(),
            v: CMatrix::from_fn(n, k, |r, c| v[(r, c)]),
        })
    }
}

/// Singular values only, nonincreasing.
pub fn singular_values(a: &CMatrix, real: bool) -> Result<Vec<f64>> {
    if a.rows().min(a.cols()) == 0 {
        return Ok(Vec::new());
    }
    let fail = |_| Error::ConvergenceFailure {
        op: "singular_values",
    };
    let mut s = if real {
        a.to_faer_real().singular_values().map_err(fail)?
    } else {
        a.to_faer().singular_values().map_err(fail)?
    };
    s.sort_by(|x, y| y.total_cmp(x));
    Ok(s)
}
