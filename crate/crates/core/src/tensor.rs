//! Dense third-order tensors and their elementwise algebra.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Shape `N1 × N2 × N3` of a third-order tensor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dims {
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
}

impl Dims {
    pub const fn new(n1: usize, n2: usize, n3: usize) -> Self {
        Self { n1, n2, n3 }
    }

    pub const fn len(&self) -> usize {
        self.n1 * self.n2 * self.n3
    }

    pub const fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub const fn offset(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n2 + j) * self.n3 + k
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.n1, self.n2, self.n3)
    }
}

/// Elementwise norms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormKind {
    Fro,
    L1,
    Linf,
}

/// Dense real `N1 × N2 × N3` array.
///
/// Entries are stored row-major in `(n1, n2, n3)` order, so every tube
/// `A(i, j, :)` is contiguous. All entries are finite. Factor tensors of a
/// rank-zero t-SVD have a zero-sized second mode; every other constructor
/// path produces positive dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor3 {
    dims: Dims,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(dims: Dims) -> Self {
        assert!(dims.n3 >= 1, "tube length must be positive");
        Self {
            dims,
            data: vec![0.0; dims.len()],
        }
    }

    pub fn from_vec(dims: Dims, data: Vec<f64>) -> Result<Self> {
        if dims.n3 == 0 {
            return Err(Error::shape("Tensor3::from_vec", "tube length N3 must be positive"));
        }
        if data.len() != dims.len() {
            return Err(Error::shape(
                "Tensor3::from_vec",
                format!("{} values for dims {dims}", data.len()),
            ));
        }
        if let Some(index) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                op: "Tensor3::from_vec",
                index,
            });
        }
        Ok(Self { dims, data })
    }

    /// Builds a tensor entrywise. Panics if `f` returns a non-finite value.
    pub fn from_fn(dims: Dims, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut t = Self::zeros(dims);
        for i in 0..dims.n1 {
            for j in 0..dims.n2 {
                for k in 0..dims.n3 {
                    let v = f(i, j, k);
                    assert!(v.is_finite(), "Tensor3::from_fn produced {v}");
                    t.data[dims.offset(i, j, k)] = v;
                }
            }
        }
        t
    }

    /// Internal constructor for buffers already known to be finite.
    pub(crate) fn from_raw(dims: Dims, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), dims.len());
        Self { dims, data }
    }

    /// `N × N × N3` tensor whose first frontal slice is the identity matrix.
    pub fn identity(n: usize, n3: usize) -> Self {
        let mut t = Self::zeros(Dims::new(n, n, n3));
        for i in 0..n {
            t.set(i, i, 0, 1.0);
        }
        t
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[self.dims.offset(i, j, k)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, value: f64) {
        assert!(value.is_finite());
        let o = self.dims.offset(i, j, k);
        self.data[o] = value;
    }

    pub fn tube(&self, i: usize, j: usize) -> &[f64] {
        let o = self.dims.offset(i, j, 0);
        &self.data[o..o + self.dims.n3]
    }

    pub(crate) fn tube_mut(&mut self, i: usize, j: usize) -> &mut [f64] {
        let o = self.dims.offset(i, j, 0);
        let n3 = self.dims.n3;
        &mut self.data[o..o + n3]
    }

    /// Frontal slice `A(:, :, k)` as an `N1 × N2` matrix.
    pub fn frontal_slice(&self, k: usize) -> Matrix {
        Matrix::from_fn(self.dims.n1, self.dims.n2, |i, j| self.get(i, j, k))
    }

    pub fn from_frontal_slices(slices: &[Matrix]) -> Result<Self> {
        let first = slices
            .first()
            .ok_or_else(|| Error::shape("Tensor3::from_frontal_slices", "no slices"))?;
        let dims = Dims::new(first.rows(), first.cols(), slices.len());
        if slices
            .iter()
            .any(|s| (s.rows(), s.cols()) != (dims.n1, dims.n2))
        {
            return Err(Error::shape(
                "Tensor3::from_frontal_slices",
                "slices differ in shape",
            ));
        }
        let data: Vec<f64> = (0..dims.len())
            .map(|o| {
                let k = o % dims.n3;
                let ij = o / dims.n3;
                slices[k][(ij / dims.n2, ij % dims.n2)]
            })
            .collect();
        Tensor3::from_vec(dims, data)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_raw(self.dims, self.data.iter().map(|&x| f(x)).collect())
    }

    /// `self += alpha · other`.
    pub fn axpy(&mut self, alpha: f64, other: &Tensor3) {
        assert_eq!(self.dims, other.dims, "Tensor3::axpy dims");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map(|x| x * s)
    }

    pub fn norm(&self, kind: NormKind) -> f64 {
        match kind {
            NormKind::Fro => self.fro_norm(),
            NormKind::L1 => self.data.iter().map(|x| x.abs()).sum(),
            NormKind::Linf => self.data.iter().fold(0.0, |m, x| m.max(x.abs())),
        }
    }

    pub fn fro_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn linf_norm(&self) -> f64 {
        self.norm(NormKind::Linf)
    }

    pub fn l1_norm(&self) -> f64 {
        self.norm(NormKind::L1)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0.0)
    }

    pub fn count_nonzero(&self) -> usize {
        self.data.iter().filter(|&&x| x != 0.0).count()
    }

    /// `‖self − other‖_F`.
    pub fn distance(&self, other: &Tensor3) -> f64 {
        assert_eq!(self.dims, other.dims, "Tensor3::distance dims");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Tensor transpose: every frontal slice transposed, slices `2..N3`
    /// taken in reverse order.
    pub fn ttranspose(&self) -> Tensor3 {
        let Dims { n1, n2, n3 } = self.dims;
        let out_dims = Dims::new(n2, n1, n3);
        let mut out = Tensor3::zeros(out_dims);
        for i in 0..n1 {
            for j in 0..n2 {
                let src = self.tube(i, j);
                let dst = out.tube_mut(j, i);
                dst[0] = src[0];
                for k in 1..n3 {
                    dst[k] = src[n3 - k];
                }
            }
        }
        out
    }
}

/// `⟨A, B⟩ = Σ_k ⟨A^(k), B^(k)⟩`.
pub fn inner(a: &Tensor3, b: &Tensor3) -> Result<f64> {
    if a.dims != b.dims {
        return Err(Error::shape("inner", format!("{} vs {}", a.dims, b.dims)));
    }
    Ok(a.data.iter().zip(&b.data).map(|(x, y)| x * y).sum())
}

impl Add for &Tensor3 {
    type Output = Tensor3;
    fn add(self, rhs: &Tensor3) -> Tensor3 {
        assert_eq!(self.dims, rhs.dims, "Tensor3 + Tensor3 dims");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        Tensor3::from_raw(self.dims, data)
    }
}

impl Sub for &Tensor3 {
    type Output = Tensor3;
    fn sub(self, rhs: &Tensor3) -> Tensor3 {
        assert_eq!(self.dims, rhs.dims, "Tensor3 - Tensor3 dims");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        Tensor3::from_raw(self.dims, data)
    }
}

impl Mul<f64> for &Tensor3 {
    type Output = Tensor3;
    fn mul(self, s: f64) -> Tensor3 {
        self.scaled(s)
    }
}

impl Neg for &Tensor3 {
    type Output = Tensor3;
    fn neg(self) -> Tensor3 {
        self.scaled(-1.0)
    }
}

/// Which standard basis element a [`TensorBasis`] denotes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisKind {
    /// `e̊_n ∈ ℝ^{N×1×N3}` with entry `(n, 0, 0)` equal to one.
    Column,
    /// `ė_k ∈ ℝ^{1×1×N3}` with entry `(0, 0, k)` equal to one.
    Tube,
}

/// Standard tensor basis element (indices are zero-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TensorBasis {
    kind: BasisKind,
    index: usize,
    dims: Dims,
}

impl TensorBasis {
    pub fn column(n: usize, n3: usize, index: usize) -> Result<Self> {
        if index >= n {
            return Err(Error::IndexOutOfRange {
                op: "TensorBasis::column",
                index,
                bound: n,
            });
        }
        Ok(Self {
            kind: BasisKind::Column,
            index,
            dims: Dims::new(n, 1, n3),
        })
    }

    pub fn tube(n3: usize, index: usize) -> Result<Self> {
        if index >= n3 {
            return Err(Error::IndexOutOfRange {
                op: "TensorBasis::tube",
                index,
                bound: n3,
            });
        }
        Ok(Self {
            kind: BasisKind::Tube,
            index,
            dims: Dims::new(1, 1, n3),
        })
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn to_tensor(&self) -> Tensor3 {
        let mut t = Tensor3::zeros(self.dims);
        match self.kind {
            BasisKind::Column => t.set(self.index, 0, 0, 1.0),
            BasisKind::Tube => t.set(0, 0, self.index, 1.0),
        }
        t
    }
}

/// Basis tensor of the given kind. For columns `size` is `N`; tubes ignore it.
pub fn basis(kind: BasisKind, index: usize, size: usize, n3: usize) -> Result<Tensor3> {
    let b = match kind {
        BasisKind::Column => TensorBasis::column(size, n3, index)?,
        BasisKind::Tube => TensorBasis::tube(n3, index)?,
    };
    Ok(b.to_tensor())
}
