//! Dense reference computations shared by the integration suites.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use trpca::linalg::{jacobi_svd, CMatrix, Matrix};
use trpca::tensor::{Dims, Tensor3};
use trpca::tproduct::{bcirc, fold, unfold};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(dims: Dims, rng: &mut ChaCha8Rng) -> Tensor3 {
    Tensor3::from_fn(dims, |_, _, _| StandardNormal.sample(rng))
}

pub fn random_dims(rng: &mut ChaCha8Rng, max: (usize, usize, usize)) -> Dims {
    Dims::new(
        rng.random_range(1..=max.0),
        rng.random_range(1..=max.1),
        rng.random_range(1..=max.2),
    )
}

/// Singular values of a real matrix by the Jacobi kernel.
pub fn dense_singular_values(m: &Matrix) -> Vec<f64> {
    jacobi_svd(&m.to_complex()).expect("jacobi converges").s
}

pub fn dense_spectral_norm(a: &Tensor3) -> f64 {
    dense_singular_values(&bcirc(a).unwrap()).first().copied().unwrap_or(0.0)
}

pub fn dense_nuclear_norm(a: &Tensor3) -> f64 {
    dense_singular_values(&bcirc(a).unwrap()).iter().sum::<f64>() / a.dims().n3 as f64
}

/// `fold(bcirc(A)·unfold(B))`.
pub fn dense_tprod(a: &Tensor3, b: &Tensor3) -> Tensor3 {
    let m = bcirc(a).unwrap().matmul(&unfold(b)).unwrap();
    fold(&m, a.dims().n3).unwrap()
}

/// DFT of every tube evaluated from the summation formula.
pub fn direct_dft(a: &Tensor3) -> Vec<CMatrix> {
    let Dims { n1, n2, n3 } = a.dims();
    (0..n3)
        .map(|k| {
            CMatrix::from_fn(n1, n2, |i, j| {
                (0..n3)
                    .map(|t| {
                        let angle = -2.0 * std::f64::consts::PI * (k * t) as f64 / n3 as f64;
                        Complex64::from_polar(a.get(i, j, t), angle)
                    })
                    .sum()
            })
        })
        .collect()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// Random 0/1 mask with each entry kept with probability `density`.
pub fn random_mask_tensor(dims: Dims, density: f64, rng: &mut ChaCha8Rng) -> Tensor3 {
    Tensor3::from_fn(dims, |_, _, _| if rng.random::<f64>() < density { 1.0 } else { 0.0 })
}

/// Matrix RPCA by the same scaled-dual ADMM, with `nalgebra` SVD as the
/// shrinkage kernel. Returns `(L, E, iterations)`.
pub fn matrix_admm(
    x: &nalgebra::DMatrix<f64>,
    gamma: f64,
    cfg: &trpca::SolverConfig,
) -> (nalgebra::DMatrix<f64>, nalgebra::DMatrix<f64>, usize) {
    use nalgebra::DMatrix;
    let (m, n) = x.shape();
    let (mut l, mut e, mut y) = (DMatrix::zeros(m, n), DMatrix::zeros(m, n), DMatrix::zeros(m, n));
    let xnorm = x.norm();
    let mut rho = cfg.rho0;
    for iter in 1..=cfg.max_iters {
        let mut svd = (x - &e + &y / rho).svd(true, true);
        svd.singular_values.apply(|s| *s = (*s - 1.0 / rho).max(0.0));
        l = svd.recompose().expect("factors requested");
        let t = x - &l + &y / rho;
        e = t.map(|v| v.signum() * (v.abs() - gamma / rho).max(0.0));
        let r = x - &l - &e;
        y += &r * rho;
        if r.norm() / xnorm <= cfg.tol {
            return (l, e, iter);
        }
        rho = (rho * cfg.rho_scale).min(cfg.rho_max);
    }
    (l, e, cfg.max_iters)
}

pub fn to_nalgebra(a: &Tensor3) -> nalgebra::DMatrix<f64> {
    let d = a.dims();
    assert_eq!(d.n3, 1);
    nalgebra::DMatrix::from_fn(d.n1, d.n2, |i, j| a.get(i, j, 0))
}
