//! Tangent space `T(L)` of the bounded-tubal-rank set and the support
//! subspace `Ω(E)`, with their orthogonal projectors.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::fourier::{dft_mode3, idft_real, FourierSlices};
use crate::tensor::{inner, Dims, Tensor3};
use crate::tproduct::tprod;
use crate::tsvd::tsvd_skinny;

/// Seed of the start vector used by [`transversality_gauge`].
pub const GAUGE_SEED: u64 = 0x7472_7063_615f_6761;
pub const GAUGE_DEFAULT_ITERS: usize = 500;
pub const GAUGE_DEFAULT_TOL: f64 = 1e-8;

/// Column and row spaces of a low-tubal-rank tensor.
#[derive(Clone, Debug)]
pub struct TangentBasis {
    u: Tensor3,
    v: Tensor3,
    pu: Tensor3,
    pv: Tensor3,
    u_hat: FourierSlices,
    v_hat: FourierSlices,
}

impl TangentBasis {
    /// Builds the basis from factors with orthonormal columns under the
    /// t-product (`Uᵀ*U = I`, `Vᵀ*V = I`).
    pub fn from_factors(u: Tensor3, v: Tensor3) -> Result<Self> {
        let (du, dv) = (u.dims(), v.dims());
        if du.n2 != dv.n2 || du.n3 != dv.n3 {
            return Err(Error::shape("TangentBasis::from_factors", format!("U {du}, V {dv}")));
        }
        let pu = tprod(&u, &u.ttranspose())?;
        let pv = tprod(&v, &v.ttranspose())?;
        Ok(Self {
            u_hat: dft_mode3(&u),
            v_hat: dft_mode3(&v),
            u,
            v,
            pu,
            pv,
        })
    }

    pub fn u(&self) -> &Tensor3 {
        &self.u
    }

    pub fn v(&self) -> &Tensor3 {
        &self.v
    }

    /// `U * Uᵀ`.
    pub fn pu(&self) -> &Tensor3 {
        &self.pu
    }

    /// `V * Vᵀ`.
    pub fn pv(&self) -> &Tensor3 {
        &self.pv
    }

    pub fn rank(&self) -> usize {
        self.u.dims().n2
    }

    /// Shape of the tensors the projectors act on.
    pub fn ambient(&self) -> Dims {
        Dims::new(self.u.dims().n1, self.v.dims().n1, self.u.dims().n3)
    }

    /// `U * Vᵀ`.
    pub fn uv_transpose(&self) -> Result<Tensor3> {
        tprod(&self.u, &self.v.ttranspose())
    }

    fn check(&self, op: &'static str, a: &Tensor3) -> Result<()> {
        if a.dims() != self.ambient() {
            return Err(Error::shape(op, format!("{} vs tangent space of {}", a.dims(), self.ambient())));
        }
        Ok(())
    }

    /// `(I − PU)·A·(I − PV)` slice by slice in the Fourier domain.
    fn perp_spectrum(&self, a_hat: &FourierSlices) -> FourierSlices {
        let d = self.ambient();
        a_hat.map_half(d.n1, d.n2, |k, _, a| {
            let (u, v) = (self.u_hat.slice(k), self.v_hat.slice(k));
            let mut b = a.clone();
            b.sub_assign(&u.matmul(&u.adjoint_matmul(a)));
            let bv = b.matmul(v);
            b.sub_assign(&bv.matmul_adjoint(v));
            b
        })
    }
}

/// Tangent basis at `L` from its skinny t-SVD.
pub fn tangent_of(l: &Tensor3, rank_tol: f64) -> Result<TangentBasis> {
    let f = tsvd_skinny(l, rank_tol)?;
    TangentBasis::from_factors(f.u, f.v)
}

/// `P_T(A) = PU*A + A*PV − PU*A*PV`.
pub fn project_t(t: &TangentBasis, a: &Tensor3) -> Result<Tensor3> {
    t.check("project_t", a)?;
    if t.rank() == 0 {
        return Ok(Tensor3::zeros(a.dims()));
    }
    let perp = idft_real(&t.perp_spectrum(&dft_mode3(a)));
    Ok(a - &perp)
}

/// `P_T⊥(A) = (I − PU)*A*(I − PV)`.
pub fn project_t_perp(t: &TangentBasis, a: &Tensor3) -> Result<Tensor3> {
    t.check("project_t_perp", a)?;
    if t.rank() == 0 {
        return Ok(a.clone());
    }
    Ok(idft_real(&t.perp_spectrum(&dft_mode3(a))))
}

/// Entry support of a tensor with per-slice counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportMask {
    dims: Dims,
    mask: Vec<bool>,
    horizontal: Vec<usize>,
    lateral: Vec<usize>,
}

impl SupportMask {
    pub fn new(dims: Dims, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != dims.len() {
            return Err(Error::shape(
                "SupportMask::new",
                format!("{} flags for {dims}", mask.len()),
            ));
        }
        let mut horizontal = vec![0; dims.n1];
        let mut lateral = vec![0; dims.n2];
        for i in 0..dims.n1 {
            for j in 0..dims.n2 {
                for k in 0..dims.n3 {
                    if mask[dims.offset(i, j, k)] {
                        horizontal[i] += 1;
                        lateral[j] += 1;
                    }
                }
            }
        }
        Ok(Self {
            dims,
            mask,
            horizontal,
            lateral,
        })
    }

    pub fn empty(dims: Dims) -> Self {
        Self::new(dims, vec![false; dims.len()]).expect("length matches")
    }

    pub fn full(dims: Dims) -> Self {
        Self::new(dims, vec![true; dims.len()]).expect("length matches")
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.mask
    }

    pub fn contains(&self, i: usize, j: usize, k: usize) -> bool {
        self.mask[self.dims.offset(i, j, k)]
    }

    pub fn count(&self) -> usize {
        self.horizontal.iter().sum()
    }

    /// Nonzero count of each horizontal slice `E(i, :, :)`.
    pub fn horizontal_counts(&self) -> &[usize] {
        &self.horizontal
    }

    /// Nonzero count of each lateral slice `E(:, j, :)`.
    pub fn lateral_counts(&self) -> &[usize] {
        &self.lateral
    }

    /// The 0/1 tensor with ones on the support.
    pub fn indicator(&self) -> Tensor3 {
        Tensor3::from_raw(
            self.dims,
            self.mask.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect(),
        )
    }

    fn check(&self, op: &'static str, a: &Tensor3) -> Result<()> {
        if a.dims() != self.dims {
            return Err(Error::shape(op, format!("{} vs mask {}", a.dims(), self.dims)));
        }
        Ok(())
    }
}

/// Entries with `|E| > tol`.
pub fn support_of(e: &Tensor3, tol: f64) -> SupportMask {
    SupportMask::new(e.dims(), e.as_slice().iter().map(|x| x.abs() > tol).collect())
        .expect("length matches")
}

/// Entrywise sign in `{−1, 0, +1}`.
pub fn sign_of(e: &Tensor3) -> Tensor3 {
    e.map(|x| {
        if x > 0.0 {
            1.0
        } else if x < 0.0 {
            -1.0
        } else {
            0.0
        }
    })
}

fn mask_with(m: &SupportMask, a: &Tensor3, keep: bool) -> Tensor3 {
    Tensor3::from_raw(
        a.dims(),
        a.as_slice()
            .iter()
            .zip(&m.mask)
            .map(|(&x, &b)| if b == keep { x } else { 0.0 })
            .collect(),
    )
}

/// Keeps the entries on the support and zeros the rest.
pub fn project_omega(m: &SupportMask, a: &Tensor3) -> Result<Tensor3> {
    m.check("project_omega", a)?;
    Ok(mask_with(m, a, true))
}

/// Keeps the entries off the support.
pub fn project_omega_comp(m: &SupportMask, a: &Tensor3) -> Result<Tensor3> {
    m.check("project_omega_comp", a)?;
    Ok(mask_with(m, a, false))
}

/// Power-iteration estimate of `‖P_Ω ∘ P_T‖`.
///
/// Iterates the self-adjoint map `P_T P_Ω P_T` from a seeded Gaussian start
/// and returns the square root of the converged Rayleigh quotient.
pub fn transversality_gauge(
    t: &TangentBasis,
    m: &SupportMask,
    iters: usize,
    tol: f64,
) -> Result<f64> {
    const OP: &str = "transversality_gauge";
    if iters == 0 {
        return Err(Error::domain(OP, "iters must be at least 1"));
    }
    if t.ambient() != m.dims() {
        return Err(Error::shape(OP, format!("tangent {} vs mask {}", t.ambient(), m.dims())));
    }
    if t.rank() == 0 || m.count() == 0 {
        return Ok(0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(GAUGE_SEED);
    let g = Tensor3::from_fn(m.dims(), |_, _, _| StandardNormal.sample(&mut rng));
    let mut x = project_t(t, &g)?;
    let norm = x.fro_norm();
    if norm == 0.0 {
        return Ok(0.0);
    }
    x = x.scaled(1.0 / norm);

    let mut lambda = f64::NAN;
    let mut change = f64::INFINITY;
    for _ in 0..iters {
        let y = project_t(t, &mask_with(m, &x, true))?;
        let next = inner(&x, &y)?;
        change = (next - lambda).abs();
        lambda = next;
        let ny = y.fro_norm();
        if ny == 0.0 {
            return Ok(0.0);
        }
        x = y.scaled(1.0 / ny);
        if change <= tol * lambda.max(f64::MIN_POSITIVE) {
            return Ok(lambda.clamp(0.0, 1.0).sqrt());
        }
    }
    if change <= tol.sqrt() * lambda.max(f64::MIN_POSITIVE) {
        // Slow but monotone convergence: the Rayleigh quotient is settled to
        // well within the reported precision.
        return Ok(lambda.clamp(0.0, 1.0).sqrt());
    }
    Err(Error::NonConvergence {
        op: OP,
        iters,
        last: change,
    })
}
