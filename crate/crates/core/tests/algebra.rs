mod common;

use approx::assert_relative_eq;
use common::*;
use proptest::prelude::*;
use trpca::fourier::{dft_mode3, idft_mode3};
use trpca::linalg::Matrix;
use trpca::tensor::{basis, inner, BasisKind, Dims, NormKind, Tensor3};
use trpca::tproduct::{bcirc, tprod};
use trpca::tsvd::{
    nuclear_norm, spectral_norm, subgradient_member, tnn_zhang, tsvd_skinny, tsvt_prox,
    tubal_rank, tubal_rank_by_tubes, DEFAULT_RANK_TOL,
};

#[test]
fn dft_matches_summation_formula() {
    let a = gaussian(Dims::new(3, 4, 5), &mut rng(1));
    let f = dft_mode3(&a);
    for (k, reference) in direct_dft(&a).iter().enumerate() {
        for (x, y) in f.slice(k).as_slice().iter().zip(reference.as_slice()) {
            assert!((x - y).norm() < 1e-12);
        }
    }
    let back = idft_mode3(&f).unwrap();
    assert!(back.distance(&a) <= 1e-12 * a.fro_norm());
}

#[test]
fn fft_product_matches_block_circulant() {
    let mut r = rng(2);
    let a = gaussian(Dims::new(3, 2, 4), &mut r);
    let b = gaussian(Dims::new(2, 5, 4), &mut r);
    let fast = tprod(&a, &b).unwrap();
    assert!(fast.distance(&dense_tprod(&a, &b)) <= 1e-10 * fast.fro_norm());

    let tube_a = Tensor3::from_vec(Dims::new(1, 1, 2), vec![1.0, 2.0]).unwrap();
    let tube_b = Tensor3::from_vec(Dims::new(1, 1, 2), vec![3.0, 4.0]).unwrap();
    assert_eq!(dense_tprod(&tube_a, &tube_b).as_slice(), &[11.0, 10.0]);
}

#[test]
fn transpose_slice_order() {
    let a = Tensor3::from_fn(Dims::new(2, 3, 4), |i, j, k| (100 * k + 10 * i + j) as f64);
    let t = a.ttranspose();
    assert_eq!(t.dims(), Dims::new(3, 2, 4));
    for (out, src) in [(0, 0), (1, 3), (2, 2), (3, 1)] {
        for i in 0..2 {
            for j in 0..3 {
                assert_eq!(t.get(j, i, out), a.get(i, j, src));
            }
        }
    }
    assert_eq!(t.ttranspose(), a);
}

#[test]
fn transpose_reverses_products() {
    let mut r = rng(3);
    let a = gaussian(Dims::new(3, 4, 3), &mut r);
    let b = gaussian(Dims::new(4, 2, 3), &mut r);
    let lhs = tprod(&a, &b).unwrap().ttranspose();
    let rhs = dense_tprod(&b.ttranspose(), &a.ttranspose());
    assert!(lhs.distance(&rhs) < 1e-10);
}

#[test]
fn bcirc_is_multiplicative() {
    let mut r = rng(4);
    let a = gaussian(Dims::new(2, 3, 3), &mut r);
    let b = gaussian(Dims::new(3, 2, 3), &mut r);
    let lhs = bcirc(&tprod(&a, &b).unwrap()).unwrap();
    let rhs = bcirc(&a).unwrap().matmul(&bcirc(&b).unwrap()).unwrap();
    let diff = Matrix::from_fn(lhs.rows(), lhs.cols(), |i, j| lhs[(i, j)] - rhs[(i, j)]);
    assert!(diff.fro_norm() < 1e-10);
}

#[test]
fn basis_tensors() {
    let e = basis(BasisKind::Column, 1, 4, 3).unwrap();
    assert_eq!(e.dims(), Dims::new(4, 1, 3));
    assert_eq!(e.get(1, 0, 0), 1.0);
    assert_eq!(e.count_nonzero(), 1);
    let t = basis(BasisKind::Tube, 1, 1, 3).unwrap();
    assert_eq!(t.get(0, 0, 1), 1.0);
    assert_eq!(t.count_nonzero(), 1);
    assert!(basis(BasisKind::Column, 4, 4, 3).is_err());
    let id = Tensor3::identity(2, 3);
    assert_eq!(id.count_nonzero(), 2);
    assert_eq!((id.get(0, 0, 0), id.get(1, 1, 0)), (1.0, 1.0));
}

#[test]
fn closed_form_norms() {
    let ones = Tensor3::from_fn(Dims::new(2, 3, 2), |_, _, _| 1.0);
    assert_relative_eq!(ones.norm(NormKind::Fro), 12f64.sqrt());
    assert_eq!(ones.norm(NormKind::L1), 12.0);
    assert_eq!(ones.norm(NormKind::Linf), 1.0);
    assert_relative_eq!(inner(&ones, &ones).unwrap(), 12.0);
    assert!(inner(&ones, &Tensor3::zeros(Dims::new(3, 2, 2))).is_err());
}

#[test]
fn tube_spectral_norm_is_max_circulant_eigenvalue() {
    let (a, b, c) = (1.0, -2.0, 0.5);
    let tube = Tensor3::from_vec(Dims::new(1, 1, 3), vec![a, b, c]).unwrap();
    let expected = (0..3)
        .map(|k| {
            let w = num_complex::Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 3.0);
            (a + b * w + c * w * w).norm()
        })
        .fold(0.0, f64::max);
    assert_relative_eq!(spectral_norm(&tube).unwrap(), expected, max_relative = 1e-12);
    assert_relative_eq!(dense_spectral_norm(&tube), expected, max_relative = 1e-12);
}

#[test]
fn forced_rank_matches_dense_oracle() {
    let mut r = rng(5);
    let g1 = gaussian(Dims::new(6, 2, 3), &mut r);
    let g2 = gaussian(Dims::new(5, 2, 3), &mut r);
    let a = tprod(&g1, &g2.ttranspose()).unwrap();
    let f = tsvd_skinny(&a, DEFAULT_RANK_TOL).unwrap();
    assert_eq!(f.rank, 2);
    assert!(f.reconstruct().unwrap().distance(&a) <= 1e-9 * a.fro_norm());
    // bcirc(A) has rank R·N3.
    let sv = dense_singular_values(&bcirc(&a).unwrap());
    let numerical = sv.iter().filter(|&&s| s > 1e-10 * sv[0]).count();
    assert_eq!(numerical, 2 * 3);
    assert_eq!(tubal_rank(&a, DEFAULT_RANK_TOL).unwrap(), 2);

    let g3 = gaussian(Dims::new(6, 3, 3), &mut r);
    let g4 = gaussian(Dims::new(6, 3, 3), &mut r);
    let b = tprod(&g3, &g4.ttranspose()).unwrap();
    assert_eq!(tubal_rank(&b, DEFAULT_RANK_TOL).unwrap(), 3);
}

#[test]
fn nuclear_norm_variants_on_random_tensor() {
    let a = gaussian(Dims::new(4, 4, 3), &mut rng(6));
    assert_relative_eq!(nuclear_norm(&a).unwrap(), dense_nuclear_norm(&a), max_relative = 1e-9);
    let f = tsvd_skinny(&a, DEFAULT_RANK_TOL).unwrap();
    let first_slice: f64 = f.first_slice_diagonal().iter().sum();
    assert_relative_eq!(nuclear_norm(&a).unwrap(), first_slice, max_relative = 1e-12);

    let b = gaussian(Dims::new(3, 3, 2), &mut rng(7));
    let fb = tsvd_skinny(&b, DEFAULT_RANK_TOL).unwrap();
    let literal: f64 = (0..2).flat_map(|k| (0..fb.rank).map(move |i| (i, k))).map(|(i, k)| fb.s.get(i, i, k)).sum();
    assert_relative_eq!(tnn_zhang(&b).unwrap(), literal, max_relative = 1e-12);
}

#[test]
fn subgradient_rejections() {
    let mut r = rng(8);
    let g1 = gaussian(Dims::new(5, 1, 3), &mut r);
    let g2 = gaussian(Dims::new(4, 1, 3), &mut r);
    let a = tprod(&g1, &g2.ttranspose()).unwrap();
    let f = tsvd_skinny(&a, DEFAULT_RANK_TOL).unwrap();
    let uv = tprod(&f.u, &f.v.ttranspose()).unwrap();
    assert!(subgradient_member(&a, &uv, 1e-9).unwrap());

    // A unit-spectral-norm element of T⊥: a rank-1 tensor from the
    // orthogonal complements of U and V.
    let t = trpca::tangent::tangent_of(&a, DEFAULT_RANK_TOL).unwrap();
    let x = gaussian(Dims::new(5, 1, 3), &mut r);
    let y = gaussian(Dims::new(4, 1, 3), &mut r);
    let w = trpca::tangent::project_t_perp(&t, &tprod(&x, &y.ttranspose()).unwrap()).unwrap();
    let w = w.scaled(2.0 / spectral_norm(&w).unwrap());
    assert!(!subgradient_member(&a, &(&uv + &w), 1e-6).unwrap());
    let w1 = w.scaled(0.5);
    assert!(subgradient_member(&a, &(&uv + &w1), 1e-6).unwrap());

    let big = a.scaled(10.0 / spectral_norm(&a).unwrap());
    assert!(dense_spectral_norm(&big) > 1.0);
    assert!(!subgradient_member(&big, &big, 1e-6).unwrap());
}

#[test]
fn prox_on_f_diagonal_input_shrinks_each_fourier_value() {
    // A 2×2×2 f-diagonal tensor: Fourier slice k is diag(a0 ± a1, b0 ± b1).
    let mut a = Tensor3::zeros(Dims::new(2, 2, 2));
    a.set(0, 0, 0, 3.0);
    a.set(0, 0, 1, 1.0);
    a.set(1, 1, 0, 0.5);
    a.set(1, 1, 1, 0.25);
    let tau = 1.0;
    // Scalar problems: min τ|z| + ½|z − s|² over each Fourier value s.
    let shrink = |s: f64| s.signum() * (s.abs() - tau).max(0.0);
    let (d00, d01) = (shrink(4.0), shrink(2.0));
    let (d10, d11) = (shrink(0.75), shrink(0.25));
    let z = tsvt_prox(&a, tau).unwrap();
    assert_relative_eq!(z.get(0, 0, 0), (d00 + d01) / 2.0, epsilon = 1e-12);
    assert_relative_eq!(z.get(0, 0, 1), (d00 - d01) / 2.0, epsilon = 1e-12);
    assert_relative_eq!(z.get(1, 1, 0), (d10 + d11) / 2.0, epsilon = 1e-12);
    assert_eq!(z.get(0, 1, 0), 0.0);
}

#[test]
fn prox_of_identity_vanishes_above_unit_threshold() {
    assert!(tsvt_prox(&Tensor3::identity(2, 2), 1.0 + 1e-12).unwrap().fro_norm() < 1e-12);
    let z = tsvt_prox(&Tensor3::identity(2, 2), 0.25).unwrap();
    assert!(z.distance(&Tensor3::identity(2, 2).scaled(0.75)) < 1e-12);
}

#[test]
fn matrix_case_reduction() {
    let a = gaussian(Dims::new(5, 4, 1), &mut rng(9));
    let m = a.frontal_slice(0);
    let sv = dense_singular_values(&m);
    assert_relative_eq!(spectral_norm(&a).unwrap(), sv[0], max_relative = 1e-12);
    assert_relative_eq!(nuclear_norm(&a).unwrap(), sv.iter().sum::<f64>(), max_relative = 1e-12);
    assert_relative_eq!(tnn_zhang(&a).unwrap(), sv.iter().sum::<f64>(), max_relative = 1e-12);
    let b = gaussian(Dims::new(4, 3, 1), &mut rng(10));
    let prod = tprod(&a, &b).unwrap();
    let direct = m.matmul(&b.frontal_slice(0)).unwrap();
    for i in 0..5 {
        for j in 0..3 {
            assert_relative_eq!(prod.get(i, j, 0), direct[(i, j)], epsilon = 1e-12);
        }
    }
}

fn tensor_strategy(max: usize, max3: usize) -> impl Strategy<Value = Tensor3> {
    (1..=max, 1..=max, 1..=max3).prop_flat_map(|(n1, n2, n3)| {
        proptest::collection::vec(-3.0f64..3.0, n1 * n2 * n3)
            .prop_map(move |v| Tensor3::from_vec(Dims::new(n1, n2, n3), v).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn prop_dft_roundtrip(a in tensor_strategy(5, 7)) {
        let back = idft_mode3(&dft_mode3(&a)).unwrap();
        prop_assert!(back.distance(&a) <= 1e-12 * a.fro_norm().max(1.0));
    }

    #[test]
    fn prop_parseval(a in tensor_strategy(5, 7)) {
        let lhs = a.fro_norm().powi(2);
        let rhs = dft_mode3(&a).fro_norm_sqr() / a.dims().n3 as f64;
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.max(1.0));
    }

    #[test]
    fn prop_tprod_matches_oracle(a in tensor_strategy(5, 5), l in 1usize..4, seed in 0u64..1000) {
        let d = a.dims();
        let b = gaussian(Dims::new(d.n2, l, d.n3), &mut rng(seed));
        let fast = tprod(&a, &b).unwrap();
        let dense = dense_tprod(&a, &b);
        prop_assert!(fast.distance(&dense) <= 1e-10 * dense.fro_norm().max(1.0));
    }

    #[test]
    fn prop_bcirc_is_linear(a in tensor_strategy(4, 4), c in -2.0f64..2.0) {
        let b = a.map(|x| x * x - 1.0);
        let lhs = bcirc(&(&a.scaled(c) + &b)).unwrap();
        let (ba, bb) = (bcirc(&a).unwrap(), bcirc(&b).unwrap());
        for i in 0..lhs.rows() {
            for j in 0..lhs.cols() {
                prop_assert!((lhs[(i, j)] - (c * ba[(i, j)] + bb[(i, j)])).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn prop_tsvd_contract(a in tensor_strategy(8, 5)) {
        let f = tsvd_skinny(&a, DEFAULT_RANK_TOL).unwrap();
        let recon = f.reconstruct().unwrap();
        prop_assert!(recon.distance(&a) <= 1e-9 * a.fro_norm().max(1e-300));
        let id = Tensor3::identity(f.rank, a.dims().n3);
        prop_assert!(tprod(&f.u.ttranspose(), &f.u).unwrap().distance(&id) <= 1e-9);
        prop_assert!(tprod(&f.v.ttranspose(), &f.v).unwrap().distance(&id) <= 1e-9);
        let diag = f.first_slice_diagonal();
        prop_assert!(diag.windows(2).all(|w| w[0] >= w[1]) && diag.iter().all(|&d| d >= 0.0));
        for k in 0..a.dims().n3 {
            for i in 0..f.rank {
                for j in 0..f.rank {
                    if i != j {
                        prop_assert_eq!(f.s.get(i, j, k), 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn prop_norm_duality(a in tensor_strategy(5, 4), seed in 0u64..1000) {
        let b = gaussian(a.dims(), &mut rng(seed));
        let lhs = inner(&a, &b).unwrap().abs();
        let rhs = spectral_norm(&a).unwrap() * nuclear_norm(&b).unwrap();
        prop_assert!(lhs <= rhs + 1e-9 * rhs.max(1.0));
    }

    #[test]
    fn prop_prox_optimality(a in tensor_strategy(5, 4), tau_idx in 0usize..3) {
        let tau = [0.1, 1.0, 10.0][tau_idx];
        let z = tsvt_prox(&a, tau).unwrap();
        if !z.is_zero() {
            let g = (&a - &z).scaled(1.0 / tau);
            prop_assert!(subgradient_member(&z, &g, 1e-6).unwrap());
        } else {
            // Z = 0 is optimal iff ‖A‖ ≤ τ.
            prop_assert!(spectral_norm(&a).unwrap() <= tau * (1.0 + 1e-9));
        }
    }

    #[test]
    fn prop_rank_characterizations_agree(seed in 0u64..500, r in 0usize..4) {
        let mut g = rng(seed);
        let d = Dims::new(6, 5, 3);
        let a = if r == 0 {
            Tensor3::zeros(d)
        } else {
            let p = gaussian(Dims::new(6, r, 3), &mut g);
            let q = gaussian(Dims::new(5, r, 3), &mut g);
            tprod(&p, &q.ttranspose()).unwrap()
        };
        prop_assert_eq!(tubal_rank(&a, DEFAULT_RANK_TOL).unwrap(), r);
        prop_assert_eq!(tubal_rank_by_tubes(&a, DEFAULT_RANK_TOL).unwrap(), r);
    }
}
