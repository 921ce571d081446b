//! Block-circulant view of a tensor and the t-product.

use crate::error::{Error, Result};
use crate::fourier::{dft_mode3, idft_real, FourierSlices};
use crate::linalg::Matrix;
use crate::tensor::{Dims, Tensor3};

/// Largest number of entries [`bcirc`] will materialize (4096 × 4096).
pub const BCIRC_MAX_ENTRIES: usize = 4096 * 4096;

/// Dense block-circulant matrix of `A`, `(N1·N3) × (N2·N3)`.
///
/// Block `(i, j)` is the frontal slice `(i − j) mod N3`. This is the
/// reference representation used by oracle checks; the library itself works
/// in the Fourier domain.
pub fn bcirc(a: &Tensor3) -> Result<Matrix> {
    bcirc_with_cap(a, BCIRC_MAX_ENTRIES)
}

pub fn bcirc_with_cap(a: &Tensor3, cap: usize) -> Result<Matrix> {
    let Dims { n1, n2, n3 } = a.dims();
    let (rows, cols) = (n1 * n3, n2 * n3);
    if rows.saturating_mul(cols) > cap {
        return Err(Error::SizeOverflow {
            op: "bcirc",
            rows,
            cols,
            cap,
        });
    }
    Ok(Matrix::from_fn(rows, cols, |r, c| {
        let (bi, i) = (r / n1, r % n1);
        let (bj, j) = (c / n2, c % n2);
        a.get(i, j, (bi + n3 - bj) % n3)
    }))
}

/// Frontal slices stacked top to bottom, `(N1·N3) × N2`.
pub fn unfold(a: &Tensor3) -> Matrix {
    let Dims { n1, n2, n3 } = a.dims();
    Matrix::from_fn(n1 * n3, n2, |r, j| a.get(r % n1, j, r / n1))
}

/// Inverse of [`unfold`] for tube length `n3`.
pub fn fold(m: &Matrix, n3: usize) -> Result<Tensor3> {
    if n3 == 0 || !m.rows().is_multiple_of(n3) {
        return Err(Error::shape(
            "fold",
            format!("{} rows are not divisible by N3 = {n3}", m.rows()),
        ));
    }
    let n1 = m.rows() / n3;
    let dims = Dims::new(n1, m.cols(), n3);
    Ok(Tensor3::from_fn(dims, |i, j, k| m[(k * n1 + i, j)]))
}

/// t-product `A * B` for `A: N1×N2×N3`, `B: N2×L×N3`, computed as
/// slice-wise products of the Fourier spectra.
pub fn tprod(a: &Tensor3, b: &Tensor3) -> Result<Tensor3> {
    let (da, db) = (a.dims(), b.dims());
    if da.n2 != db.n1 || da.n3 != db.n3 {
        return Err(Error::shape("tprod", format!("{da} * {db}")));
    }
    let fa = dft_mode3(a);
    let fb = dft_mode3(b);
    Ok(idft_real(&tprod_fourier(&fa, &fb)))
}

/// Slice-wise product of two spectra of real tensors.
pub(crate) fn tprod_fourier(fa: &FourierSlices, fb: &FourierSlices) -> FourierSlices {
    let (da, db) = (fa.dims(), fb.dims());
    debug_assert_eq!(da.n2, db.n1);
    fa.map_half(da.n1, db.n2, |k, _, sa| sa.matmul(fb.slice(k)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bcirc_of_tube_is_circulant() {
        let a = Tensor3::from_vec(Dims::new(1, 1, 3), vec![1.0, 2.0, 3.0]).unwrap();
        let m = bcirc(&a).unwrap();
        let expected = [[1.0, 3.0, 2.0], [2.0, 1.0, 3.0], [3.0, 2.0, 1.0]];
        for (r, row) in expected.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                assert_eq!(m[(r, c)], v);
            }
        }
    }

    #[test]
    fn bcirc_of_identity_is_identity() {
        let m = bcirc(&Tensor3::identity(2, 3)).unwrap();
        for r in 0..6 {
            for c in 0..6 {
                assert_eq!(m[(r, c)], if r == c { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn bcirc_respects_cap() {
        let a = Tensor3::zeros(Dims::new(3, 3, 3));
        assert!(matches!(
            bcirc_with_cap(&a, 80),
            Err(Error::SizeOverflow { .. })
        ));
    }

    #[test]
    fn unfold_stacks_slices_in_order() {
        let a = Tensor3::from_fn(Dims::new(2, 2, 3), |i, j, k| (100 * k + 10 * i + j) as f64);
        let m = unfold(&a);
        assert_eq!((m.rows(), m.cols()), (6, 2));
        for k in 0..3 {
            for i in 0..2 {
                for j in 0..2 {
                    assert_eq!(m[(2 * k + i, j)], a.get(i, j, k));
                }
            }
        }
        assert_eq!(fold(&m, 3).unwrap(), a);
    }

    #[test]
    fn fold_rejects_indivisible_rows() {
        assert!(matches!(
            fold(&Matrix::zeros(5, 2), 2),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn tube_convolution() {
        let a = Tensor3::from_vec(Dims::new(1, 1, 2), vec![1.0, 2.0]).unwrap();
        let b = Tensor3::from_vec(Dims::new(1, 1, 2), vec![3.0, 4.0]).unwrap();
        let c = tprod(&a, &b).unwrap();
        assert!((c.get(0, 0, 0) - 11.0).abs() < 1e-12);
        assert!((c.get(0, 0, 1) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn tprod_shape_mismatch() {
        let a = Tensor3::zeros(Dims::new(2, 3, 2));
        let b = Tensor3::zeros(Dims::new(2, 3, 2));
        assert!(matches!(tprod(&a, &b), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn identity_is_neutral() {
        let a = Tensor3::from_fn(Dims::new(3, 2, 4), |i, j, k| ((i * 7 + j * 3 + k) % 5) as f64 - 2.0);
        let left = tprod(&Tensor3::identity(3, 4), &a).unwrap();
        let right = tprod(&a, &Tensor3::identity(2, 4)).unwrap();
        assert!(left.distance(&a) < 1e-12);
        assert!(right.distance(&a) < 1e-12);
    }
}
