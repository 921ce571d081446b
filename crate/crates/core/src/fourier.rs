//! Discrete Fourier transform along the third mode.
//!
//! The forward transform is unnormalized and the inverse carries `1/N3`,
//! matching `fft(A, [], 3)` / `ifft(A, [], 3)`. Arbitrary tube lengths are
//! supported (rustfft picks mixed-radix or Bluestein plans).

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::tensor::{Dims, Tensor3};

/// Relative imaginary residue tolerated by [`idft_mode3`].
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

/// Complex frontal slices `Ā^(k)` of a tensor after the mode-3 DFT.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierSlices {
    dims: Dims,
    slices: Vec<CMatrix>,
}

/// Number of slices that determine a real tensor's spectrum, `⌈(N3+1)/2⌉`.
pub const fn half_len(n3: usize) -> usize {
    n3 / 2 + 1
}

/// Slice `k` of a real tensor's spectrum is its own conjugate.
pub const fn is_self_conjugate(k: usize, n3: usize) -> bool {
    k == 0 || 2 * k == n3
}

impl FourierSlices {
    pub fn from_slices(dims: Dims, slices: Vec<CMatrix>) -> Result<Self> {
        if slices.len() != dims.n3 {
            return Err(Error::shape(
                "FourierSlices::from_slices",
                format!("{} slices for N3 = {}", slices.len(), dims.n3),
            ));
        }
        if slices
            .iter()
            .any(|s| (s.rows(), s.cols()) != (dims.n1, dims.n2))
        {
            return Err(Error::shape(
                "FourierSlices::from_slices",
                format!("slice shape differs from {}x{}", dims.n1, dims.n2),
            ));
        }
        Ok(Self { dims, slices })
    }

    /// Completes a spectrum from its first [`half_len`] slices by conjugate
    /// mirroring, so the result is exactly symmetric.
    pub(crate) fn from_half(dims: Dims, mut half: Vec<CMatrix>) -> Self {
        let n3 = dims.n3;
        debug_assert_eq!(half.len(), half_len(n3));
        half.truncate(half_len(n3).min(n3));
        for k in half.len()..n3 {
            let mirrored = half[n3 - k].conj();
            half.push(mirrored);
        }
        Self { dims, slices: half }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn slices(&self) -> &[CMatrix] {
        &self.slices
    }

    pub fn slice(&self, k: usize) -> &CMatrix {
        &self.slices[k]
    }

    pub fn slice_mut(&mut self, k: usize) -> &mut CMatrix {
        &mut self.slices[k]
    }

    /// Applies `f` to the independent slices and mirrors the rest.
    /// `f` receives the slice index and whether that slice is real.
    pub(crate) fn map_half<F>(&self, out_rows: usize, out_cols: usize, mut f: F) -> Self
    where
        F: FnMut(usize, bool, &CMatrix) -> CMatrix,
    {
        let n3 = self.dims.n3;
        let half = (0..half_len(n3).min(n3))
            .map(|k| f(k, is_self_conjugate(k, n3), &self.slices[k]))
            .collect();
        Self::from_half(Dims::new(out_rows, out_cols, n3), half)
    }

    /// Largest elementwise distance between slice `k` and the conjugate of
    /// slice `N3 − k`.
    pub fn symmetry_defect(&self) -> f64 {
        let n3 = self.dims.n3;
        let mut defect: f64 = 0.0;
        for k in 0..n3 {
            let mirror = (n3 - k) % n3;
            for (a, b) in self.slices[k]
                .as_slice()
                .iter()
                .zip(self.slices[mirror].as_slice())
            {
                defect = defect.max((a - b.conj()).norm());
            }
        }
        defect
    }

    /// `Σ_k ‖Ā^(k)‖_F²`.
    pub fn fro_norm_sqr(&self) -> f64 {
        self.slices.iter().map(|s| s.fro_norm_sqr()).sum()
    }
}

/// Unnormalized forward DFT of every tube.
pub fn dft_mode3(a: &Tensor3) -> FourierSlices {
    let dims = a.dims();
    let Dims { n1, n2, n3 } = dims;
    let mut buf: Vec<Complex64> = a.as_slice().iter().map(|&x| Complex64::new(x, 0.0)).collect();
    if !buf.is_empty() && n3 > 1 {
        let fft = FftPlanner::new().plan_fft_forward(n3);
        fft.process(&mut buf);
    }
    let half = (0..half_len(n3).min(n3))
        .map(|k| {
            let mut data = Vec::with_capacity(n1 * n2);
            for t in 0..n1 * n2 {
                let z = buf[t * n3 + k];
                data.push(if is_self_conjugate(k, n3) {
                    Complex64::new(z.re, 0.0)
                } else {
                    z
                });
            }
            CMatrix::from_vec(n1, n2, data)
        })
        .collect();
    FourierSlices::from_half(dims, half)
}

/// Inverse DFT of every tube, scaled by `1/N3`.
///
/// Fails with [`Error::SymmetryViolation`] when the result has an imaginary
/// part larger than [`SYMMETRY_TOLERANCE`] times its real magnitude.
pub fn idft_mode3(f: &FourierSlices) -> Result<Tensor3> {
    let (buf, max_re, max_im) = inverse_buffer(f);
    if max_im > SYMMETRY_TOLERANCE * max_re.max(f64::MIN_POSITIVE) {
        return Err(Error::SymmetryViolation {
            op: "idft_mode3",
            residue: max_im,
        });
    }
    Ok(Tensor3::from_raw(
        f.dims(),
        buf.into_iter().map(|z| z.re).collect(),
    ))
}

/// Inverse DFT of a spectrum produced by this crate's slice-wise operations,
/// which is conjugate symmetric by construction; the imaginary residue is
/// discarded without a check.
pub(crate) fn idft_real(f: &FourierSlices) -> Tensor3 {
    let (buf, _, _) = inverse_buffer(f);
    Tensor3::from_raw(f.dims(), buf.into_iter().map(|z| z.re).collect())
}

fn inverse_buffer(f: &FourierSlices) -> (Vec<Complex64>, f64, f64) {
    let Dims { n1, n2, n3 } = f.dims();
    let mut buf = vec![Complex64::new(0.0, 0.0); n1 * n2 * n3];
    for (k, slice) in f.slices().iter().enumerate() {
        for (t, z) in slice.as_slice().iter().enumerate() {
            buf[t * n3 + k] = *z;
        }
    }
    if !buf.is_empty() && n3 > 1 {
        let fft = FftPlanner::new().plan_fft_inverse(n3);
        fft.process(&mut buf);
    }
    let scale = 1.0 / n3 as f64;
    let (mut max_re, mut max_im) = (0.0f64, 0.0f64);
    for z in &mut buf {
        *z *= scale;
        max_re = max_re.max(z.re.abs());
        max_im = max_im.max(z.im.abs());
    }
    (buf, max_re, max_im)
}
