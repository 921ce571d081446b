//! t-SVD and the spectral quantities defined through it.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::{dft_mode3, half_len, idft_real, is_self_conjugate, FourierSlices};
use crate::linalg::{singular_values, thin_svd, CMatrix, Svd};
use crate::tensor::{Dims, Tensor3};
use crate::tproduct::tprod;

/// Default rank tolerance, relative to the largest first-slice singular value.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Skinny t-SVD `A = U * S * Vᵀ`.
///
/// `u` is `N1×R×N3`, `s` is the f-diagonal `R×R×N3` core and `v` is
/// `N2×R×N3`, where `R` is the tubal rank. Factor signs and phases are not
/// canonical; compare projectors or reconstructions, never raw factors.
#[derive(Clone, Debug)]
pub struct TSvdFactors {
    pub u: Tensor3,
    pub s: Tensor3,
    pub v: Tensor3,
    pub rank: usize,
}

impl TSvdFactors {
    /// Diagonal of the first frontal slice of `S`, nonincreasing.
    pub fn first_slice_diagonal(&self) -> Vec<f64> {
        (0..self.rank).map(|i| self.s.get(i, i, 0)).collect()
    }

    pub fn reconstruct(&self) -> Result<Tensor3> {
        let us = tprod(&self.u, &self.s)?;
        tprod(&us, &self.v.ttranspose())
    }
}

/// Per-slice SVDs of the independent Fourier slices of `A`.
pub(crate) struct SpectralSvd {
    pub(crate) dims: Dims,
    pub(crate) svds: Vec<Svd>,
}

impl SpectralSvd {
    pub(crate) fn of_spectrum(f: &FourierSlices, op: &'static str) -> Result<Self> {
        let dims = f.dims();
        let svds = (0..half_len(dims.n3))
            .map(|k| {
                thin_svd(f.slice(k), is_self_conjugate(k, dims.n3))
                    .map_err(|_| Error::ConvergenceFailure { op })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { dims, svds })
    }

    /// Multiplicity of half-spectrum slice `k` in the full spectrum.
    pub(crate) fn weight(&self, k: usize) -> f64 {
        if is_self_conjugate(k, self.dims.n3) {
            1.0
        } else {
            2.0
        }
    }

    /// `S(i, i, 1)` for every `i < min(N1, N2)`: the mean of the `i`-th
    /// singular value over all Fourier slices.
    pub(crate) fn first_slice_diagonal(&self) -> Vec<f64> {
        let kmin = self.dims.n1.min(self.dims.n2);
        let n3 = self.dims.n3 as f64;
        (0..kmin)
            .map(|i| {
                self.svds
                    .iter()
                    .enumerate()
                    .map(|(k, svd)| self.weight(k) * svd.s[i])
                    .sum::<f64>()
                    / n3
            })
            .collect()
    }
}

fn check_tol(op: &'static str, tol: f64) -> Result<()> {
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Error::domain(op, format!("tolerance must be finite and >= 0, got {tol}")));
    }
    Ok(())
}

/// Number of entries of `diag` above `rel_tol · diag[0]`.
fn rank_from_diagonal(diag: &[f64], rel_tol: f64) -> usize {
    match diag.first() {
        Some(&top) if top > 0.0 => diag.iter().take_while(|&&d| d > rel_tol * top).count(),
        _ => 0,
    }
}

/// Skinny t-SVD with tubal rank decided at `rank_tol` relative to the largest
/// first-slice singular value.
pub fn tsvd_skinny(a: &Tensor3, rank_tol: f64) -> Result<TSvdFactors> {
    check_tol("tsvd_skinny", rank_tol)?;
    let f = dft_mode3(a);
    let spec = SpectralSvd::of_spectrum(&f, "tsvd_skinny")?;
    let rank = rank_from_diagonal(&spec.first_slice_diagonal(), rank_tol);
    Ok(factors_from_spectrum(&spec, rank))
}

pub(crate) fn factors_from_spectrum(spec: &SpectralSvd, rank: usize) -> TSvdFactors {
    let Dims { n1, n2, n3 } = spec.dims;
    let u_half = spec.svds.iter().map(|s| s.u.leading_columns(rank)).collect();
    let v_half = spec.svds.iter().map(|s| s.v.leading_columns(rank)).collect();
    let s_half = spec
        .svds
        .iter()
        .map(|svd| {
            let mut m = CMatrix::zeros(rank, rank);
            for i in 0..rank {
                m[(i, i)] = Complex64::new(svd.s[i], 0.0);
            }
            m
        })
        .collect();
    let mut s = idft_real(&FourierSlices::from_half(Dims::new(rank, rank, n3), s_half));
    // The core is f-diagonal by construction; clear rounding off the diagonal.
    for i in 0..rank {
        for j in 0..rank {
            if i != j {
                s.tube_mut(i, j).fill(0.0);
            }
        }
    }
    TSvdFactors {
        u: idft_real(&FourierSlices::from_half(Dims::new(n1, rank, n3), u_half)),
        s,
        v: idft_real(&FourierSlices::from_half(Dims::new(n2, rank, n3), v_half)),
        rank,
    }
}

/// Singular values of every Fourier slice `Ā^(k)`, `k = 0..N3`.
pub fn fourier_singular_values(a: &Tensor3) -> Result<Vec<Vec<f64>>> {
    let f = dft_mode3(a);
    let n3 = a.dims().n3;
    let half = (0..half_len(n3))
        .map(|k| singular_values(f.slice(k), is_self_conjugate(k, n3)))
        .collect::<Result<Vec<_>>>()?;
    Ok((0..n3)
        .map(|k| half[if k < half.len() { k } else { n3 - k }].clone())
        .collect())
}

/// Tubal rank: number of first-slice singular values of `S` above
/// `tol · S(1,1,1)`.
pub fn tubal_rank(a: &Tensor3, tol: f64) -> Result<usize> {
    check_tol("tubal_rank", tol)?;
    let sv = fourier_singular_values(a)?;
    let kmin = a.dims().n1.min(a.dims().n2);
    let n3 = a.dims().n3 as f64;
    let diag: Vec<f64> = (0..kmin)
        .map(|i| sv.iter().map(|s| s[i]).sum::<f64>() / n3)
        .collect();
    Ok(rank_from_diagonal(&diag, tol))
}

/// Tubal rank counted as the number of singular tubes `S(i, i, :)` with a
/// Fourier coefficient above `tol · S(1,1,1)`.
pub fn tubal_rank_by_tubes(a: &Tensor3, tol: f64) -> Result<usize> {
    check_tol("tubal_rank_by_tubes", tol)?;
    let sv = fourier_singular_values(a)?;
    let kmin = a.dims().n1.min(a.dims().n2);
    let n3 = a.dims().n3 as f64;
    let top = if kmin == 0 {
        0.0
    } else {
        sv.iter().map(|s| s[0]).sum::<f64>() / n3
    };
    if top == 0.0 {
        return Ok(0);
    }
    Ok((0..kmin)
        .filter(|&i| sv.iter().any(|s| s[i] > tol * top))
        .count())
}

/// Tensor spectral norm `‖bcirc(A)‖`: the largest singular value over all
/// Fourier slices.
pub fn spectral_norm(a: &Tensor3) -> Result<f64> {
    let f = dft_mode3(a);
    spectral_norm_of_spectrum(&f)
}

pub(crate) fn spectral_norm_of_spectrum(f: &FourierSlices) -> Result<f64> {
    let n3 = f.dims().n3;
    let mut best: f64 = 0.0;
    for k in 0..half_len(n3) {
        let s = singular_values(f.slice(k), is_self_conjugate(k, n3))
            .map_err(|_| Error::ConvergenceFailure { op: "spectral_norm" })?;
        best = best.max(s.first().copied().unwrap_or(0.0));
    }
    Ok(best)
}

/// Tensor nuclear norm `Σ_i S(i,i,1) = (1/N3)·‖bcirc(A)‖_*`.
pub fn nuclear_norm(a: &Tensor3) -> Result<f64> {
    let f = dft_mode3(a);
    nuclear_norm_of_spectrum(&f)
}

pub(crate) fn nuclear_norm_of_spectrum(f: &FourierSlices) -> Result<f64> {
    let n3 = f.dims().n3;
    let mut total = 0.0;
    for k in 0..half_len(n3) {
        let s = singular_values(f.slice(k), is_self_conjugate(k, n3))
            .map_err(|_| Error::ConvergenceFailure { op: "nuclear_norm" })?;
        let w = if is_self_conjugate(k, n3) { 1.0 } else { 2.0 };
        total += w * s.iter().sum::<f64>();
    }
    Ok(total / n3 as f64)
}

/// `Σ_{n3} Σ_i S(i, i, n3)` evaluated on the spatial-domain core of the
/// skinny t-SVD, exactly as written for the tube-penalized models. The sum
/// over all frontal slices of a tube equals its zero-frequency coefficient,
/// so this is the matrix nuclear norm of `Σ_k A^(k)`.
pub fn tnn_zhang(a: &Tensor3) -> Result<f64> {
    let factors = tsvd_skinny(a, DEFAULT_RANK_TOL)?;
    let n3 = a.dims().n3;
    Ok((0..factors.rank)
        .map(|i| (0..n3).map(|k| factors.s.get(i, i, k)).sum::<f64>())
        .sum())
}

/// Proximal operator of `tau·‖·‖_*`.
///
/// Because `‖Z‖_* = (1/N3)·Σ_k ‖Z̄^(k)‖_*` and `‖Z‖_F² = (1/N3)·Σ_k ‖Z̄^(k)‖_F²`,
/// the objective separates over Fourier slices with the same weight, so each
/// slice gets ordinary singular value thresholding at `tau`.
pub fn tsvt_prox(a: &Tensor3, tau: f64) -> Result<Tensor3> {
    check_tol("tsvt_prox", tau)?;
    if tau == 0.0 {
        return Ok(a.clone());
    }
    let shrunk = svt_spectrum(&dft_mode3(a), tau)?;
    Ok(idft_real(&shrunk.spectrum))
}

pub(crate) struct Shrunk {
    pub(crate) spectrum: FourierSlices,
    /// `‖Z‖_*` of the thresholded tensor.
    pub(crate) nuclear: f64,
    /// Nuclear norm of the zero-frequency slice.
    pub(crate) zero_frequency_nuclear: f64,
}

pub(crate) fn svt_spectrum(f: &FourierSlices, tau: f64) -> Result<Shrunk> {
    let Dims { n1, n2, n3 } = f.dims();
    let spec = SpectralSvd::of_spectrum(f, "tsvt_prox")?;
    let mut nuclear = 0.0;
    let mut zero_frequency_nuclear = 0.0;
    let half = spec
        .svds
        .iter()
        .enumerate()
        .map(|(k, svd)| {
            let kept: Vec<f64> = svd
                .s
                .iter()
                .map(|&s| s - tau)
                .take_while(|&s| s > 0.0)
                .collect();
            let sum: f64 = kept.iter().sum();
            nuclear += spec.weight(k) * sum;
            if k == 0 {
                zero_frequency_nuclear = sum;
            }
            svd.reconstruct_with(&kept)
        })
        .collect();
    Ok(Shrunk {
        spectrum: FourierSlices::from_half(Dims::new(n1, n2, n3), half),
        nuclear: nuclear / n3 as f64,
        zero_frequency_nuclear,
    })
}

/// Whether `G ∈ ∂‖A‖_*`, checked slice by slice in the Fourier domain:
/// `Ḡ_k = U_k V_kᴴ + W_k` with `U_kᴴ W_k ≈ 0`, `W_k V_k ≈ 0` and
/// `‖W_k‖ ≤ 1 + tol`, where `U_k, V_k` span the numerically nonzero part of
/// `Ā_k`. Orthogonality residuals are relative to `1 + ‖Ḡ_k‖_F`.
pub fn subgradient_member(a: &Tensor3, g: &Tensor3, tol: f64) -> Result<bool> {
    if a.dims() != g.dims() {
        return Err(Error::shape(
            "subgradient_member",
            format!("{} vs {}", a.dims(), g.dims()),
        ));
    }
    check_tol("subgradient_member", tol)?;
    let spec = SpectralSvd::of_spectrum(&dft_mode3(a), "subgradient_member")?;
    let fg = dft_mode3(g);
    let top = spec
        .svds
        .iter()
        .filter_map(|svd| svd.s.first().copied())
        .fold(0.0, f64::max);
    for (k, svd) in spec.svds.iter().enumerate() {
        // Slice ranks may differ from the tubal rank, so each slice uses its own.
        let r = svd.s.iter().take_while(|&&s| top > 0.0 && s > DEFAULT_RANK_TOL * top).count();
        let (u, v) = (svd.u.leading_columns(r), svd.v.leading_columns(r));
        let gk = fg.slice(k);
        let mut w = gk.clone();
        w.sub_assign(&u.matmul_adjoint(&v));
        let scale = 1.0 + gk.fro_norm_sqr().sqrt();
        if r > 0 {
            let left = u.adjoint_matmul(&w).fro_norm_sqr().sqrt();
            let right = w.matmul(&v).fro_norm_sqr().sqrt();
            if left > tol * scale || right > tol * scale {
                return Ok(false);
            }
        }
        let top_w = singular_values(&w, is_self_conjugate(k, spec.dims.n3))?
            .first()
            .copied()
            .unwrap_or(0.0);
        if top_w > 1.0 + tol {
            return Ok(false);
        }
    }
    Ok(true)
}
