//! Identifiability quantities for low-rank plus sparse recovery and the
//! dual certificate that proves exact recovery on a given instance.
//!
//! `ξ(L)` is the largest `‖N‖_∞` over `N ∈ T(L)` with `‖N‖ ≤ 1`, and `μ(E)`
//! the largest `‖N‖` over `N ∈ Ω(E)` with `‖N‖_∞ ≤ 1`. `μ` is computed
//! exactly as the spectral norm of the support indicator; `ξ` is bracketed
//! by `[inc/√N3, 2·inc]` and estimated from below by explicit feasible
//! points.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::fourier::{dft_mode3, idft_real};
use crate::linalg::CMatrix;
use crate::tangent::{
    project_omega, project_omega_comp, project_t, project_t_perp, sign_of, support_of,
    tangent_of, transversality_gauge, SupportMask, TangentBasis, GAUGE_DEFAULT_ITERS,
    GAUGE_DEFAULT_TOL,
};
use crate::tensor::{Dims, Tensor3};
use crate::tproduct::tprod;
use crate::tsvd::{spectral_norm, DEFAULT_RANK_TOL};

/// Seed for the random directions of [`xi_lower_estimate`].
pub const XI_SEED: u64 = 0x7869_5f65_7374;
/// Strict margin both certificate slacks must exceed.
pub const SLACK_MARGIN: f64 = 1e-7;
const PROJECTOR_TOL: f64 = 1e-6;

/// `max_n ‖P * e̊_n‖_F` for a projector `P ∈ ℝ^{N×N×N3}`.
///
/// `P * e̊_n` is the lateral slice `P(:, n, :)`.
pub fn beta_incoherence(p: &Tensor3) -> Result<f64> {
    const OP: &str = "beta_incoherence";
    let Dims { n1, n2, n3 } = p.dims();
    if n1 != n2 {
        return Err(Error::shape(OP, format!("projector must be square, got {}", p.dims())));
    }
    let defect = tprod(p, p)?.distance(p);
    if defect > PROJECTOR_TOL * p.fro_norm().max(1.0) {
        return Err(Error::NotAProjector { op: OP, defect });
    }
    Ok((0..n2)
        .map(|n| {
            (0..n1)
                .flat_map(|i| (0..n3).map(move |k| (i, k)))
                .map(|(i, k)| p.get(i, n, k).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max))
}

/// `(β(span U), β(span V))` of a tangent basis.
pub fn beta_pair(t: &TangentBasis) -> Result<(f64, f64)> {
    Ok((beta_incoherence(t.pu())?, beta_incoherence(t.pv())?))
}

/// Tensor incoherence `max(β(span U), β(span V))` of a nonzero `L`.
pub fn inc(l: &Tensor3) -> Result<f64> {
    if l.is_zero() {
        return Err(Error::ZeroTensor { op: "inc" });
    }
    let (bu, bv) = beta_pair(&tangent_of(l, DEFAULT_RANK_TOL)?)?;
    Ok(bu.max(bv))
}

/// `(deg_min, deg_max)`: extreme nonzero counts over all horizontal and
/// lateral slices together.
pub fn deg_bounds(m: &SupportMask) -> (usize, usize) {
    let counts = m.horizontal_counts().iter().chain(m.lateral_counts());
    let min = counts.clone().copied().min().unwrap_or(0);
    let max = counts.copied().max().unwrap_or(0);
    (min, max)
}

/// `μ(Ω)`, the spectral norm of the support indicator.
///
/// Every Fourier slice of an `N` with `‖N‖_∞ ≤ 1` supported on `Ω` is
/// entrywise dominated in modulus by the zero-frequency slice of the
/// indicator, whose spectral norm is the indicator's by Perron–Frobenius.
pub fn mu_exact(m: &SupportMask) -> Result<f64> {
    spectral_norm(&m.indicator())
}

/// `(inc/√N3, 2·inc)`.
pub fn xi_bounds(l: &Tensor3) -> Result<(f64, f64)> {
    let i = inc(l).map_err(|_| Error::ZeroTensor { op: "xi_bounds" })?;
    Ok(xi_bounds_from_inc(i, l.dims().n3))
}

pub fn xi_bounds_from_inc(inc: f64, n3: usize) -> (f64, f64) {
    (inc / (n3 as f64).sqrt(), 2.0 * inc)
}

/// Lower bound on `ξ(L)` from explicit feasible points of its defining
/// maximization.
///
/// The first candidates are built from the most coherent coordinate column
/// `p = P_U e̊_n` of each factor space: normalizing every Fourier slice of `p`
/// gives `x ∈ span U` whose outer product with a unit coordinate column has
/// spectral norm 1 and infinity norm at least `β/√N3`. Then `samples` random
/// directions `P_T(G)/‖P_T(G)‖` are refined by `iters` rounds of ascent along
/// the projected coordinate direction of the current peak.
pub fn xi_lower_estimate(l: &Tensor3, samples: usize, iters: usize) -> Result<f64> {
    let t = tangent_of(l, DEFAULT_RANK_TOL)?;
    xi_lower_estimate_for(&t, samples, iters)
}

pub fn xi_lower_estimate_for(t: &TangentBasis, samples: usize, iters: usize) -> Result<f64> {
    if t.rank() == 0 {
        return Ok(0.0);
    }
    let dims = t.ambient();
    let mut best = coherent_witness(t.pu(), dims.n2)?;
    let vside = coherent_witness(t.pv(), dims.n1)?;
    best = best.max(vside);

    let mut rng = ChaCha8Rng::seed_from_u64(XI_SEED);
    for _ in 0..samples {
        let g = Tensor3::from_fn(dims, |_, _, _| StandardNormal.sample(&mut rng));
        let Some(mut n) = normalized(project_t(t, &g)?)? else {
            continue;
        };
        let mut value = n.linf_norm();
        for _ in 0..iters {
            let (pos, sign) = peak(&n);
            let mut coord = Tensor3::zeros(dims);
            coord.set(pos.0, pos.1, pos.2, sign);
            let Some(d) = normalized(project_t(t, &coord)?)? else {
                break;
            };
            let mut improved = false;
            for step in [2.0, 1.0, 0.5, 0.25, 0.1] {
                let mut cand = n.clone();
                cand.axpy(step, &d);
                if let Some(c) = normalized(cand)? {
                    let v = c.linf_norm();
                    if v > value {
                        value = v;
                        n = c;
                        improved = true;
                        break;
                    }
                }
            }
            if !improved {
                break;
            }
        }
        best = best.max(value);
    }
    Ok(best)
}

/// Rescales to unit spectral norm; `None` for the zero tensor.
fn normalized(a: Tensor3) -> Result<Option<Tensor3>> {
    let s = spectral_norm(&a)?;
    Ok((s > 0.0).then(|| a.scaled(1.0 / s)))
}

fn peak(a: &Tensor3) -> ((usize, usize, usize), f64) {
    let Dims { n2, n3, .. } = a.dims();
    let (idx, v) = a
        .as_slice()
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |acc, (i, &v)| if v.abs() > acc.1.abs() { (i, v) } else { acc });
    ((idx / (n2 * n3), (idx / n3) % n2, idx % n3), v.signum())
}

/// `‖x * e̊ᵀ‖_∞` for `x` the slice-normalized most coherent column of the
/// projector `p`; `other` is the length of the complementary dimension.
fn coherent_witness(p: &Tensor3, other: usize) -> Result<f64> {
    let Dims { n1, n3, .. } = p.dims();
    if other == 0 || n1 == 0 {
        return Ok(0.0);
    }
    let col = |n: usize| Tensor3::from_fn(Dims::new(n1, 1, n3), |i, _, k| p.get(i, n, k));
    let best_n = (0..n1)
        .max_by(|&a, &b| col(a).fro_norm().total_cmp(&col(b).fro_norm()))
        .expect("n1 > 0");
    let column = col(best_n);
    let spectrum = dft_mode3(&column).map_half(n1, 1, |_, _, s| {
        let norm = s.fro_norm_sqr().sqrt();
        let mut out: CMatrix = s.clone();
        if norm > 0.0 {
            out.scale(1.0 / norm);
        }
        out
    });
    // The witness tensor is x placed in one lateral slice, so its infinity
    // norm is that of x.
    Ok(idft_real(&spectrum).linf_norm())
}

/// Admissible γ interval for the `ξ`, `μ` condition `ξμ < 1/6`.
pub fn gamma_range_thm3(xi: f64, mu: f64) -> Option<(f64, f64)> {
    let prod = xi * mu;
    if !(xi > 0.0 && mu > 0.0) || prod >= 1.0 / 6.0 {
        return None;
    }
    Some((xi / (1.0 - 4.0 * prod), (1.0 - 3.0 * prod) / mu))
}

/// `(3ξ)^p / (2μ)^(1−p)`.
pub fn gamma_interp(xi: f64, mu: f64, p: f64) -> Result<f64> {
    check_interp("gamma_interp", xi, mu, p)?;
    Ok((3.0 * xi).powf(p) / (2.0 * mu).powf(1.0 - p))
}

/// Admissible γ interval for the incoherence and degree condition
/// `inc·deg_max < 1/12`.
pub fn gamma_range_cor3(inc: f64, deg_max: usize) -> Option<(f64, f64)> {
    let d = deg_max as f64;
    let prod = inc * d;
    if !(inc > 0.0 && deg_max >= 1) || prod >= 1.0 / 12.0 {
        return None;
    }
    Some((2.0 * inc / (1.0 - 8.0 * prod), (1.0 - prod) / d))
}

/// `(6·inc)^p / (2·deg_max)^(1−p)`.
pub fn gamma_interp_cor3(inc: f64, deg_max: usize, p: f64) -> Result<f64> {
    check_interp("gamma_interp_cor3", inc, deg_max as f64, p)?;
    Ok((6.0 * inc).powf(p) / (2.0 * deg_max as f64).powf(1.0 - p))
}

fn check_interp(op: &'static str, a: f64, b: f64, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(op, format!("p must lie in [0, 1], got {p}")));
    }
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::domain(op, format!("arguments must be positive, got {a} and {b}")));
    }
    Ok(())
}

/// `(2·inc(A)·μ(supp A), passed)`; the product can never fall below 1.
pub fn uncertainty_audit(a: &Tensor3) -> Result<(f64, bool)> {
    if a.is_zero() {
        return Err(Error::ZeroTensor { op: "uncertainty_audit" });
    }
    let value = 2.0 * inc(a)? * mu_exact(&support_of(a, 0.0))?;
    Ok((value, value >= 1.0 - 1e-9))
}

/// Dual certificate for `(L0, E0)` at weight γ.
#[derive(Clone, Debug)]
pub struct DualCertificate {
    pub q: Tensor3,
    pub h_t: Tensor3,
    pub h_omega: Tensor3,
    /// `1 − ‖P_T⊥(Q)‖`.
    pub spectral_slack: f64,
    /// `γ − ‖P_Ω∁(Q)‖_∞`.
    pub linf_slack: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Geometric mean of the per-step contraction of the fixed-point updates,
    /// `NaN` when fewer than two nonzero steps were taken.
    pub contraction: f64,
}

impl DualCertificate {
    /// Converged with both slacks above [`SLACK_MARGIN`].
    pub fn certified(&self) -> bool {
        self.converged && self.spectral_slack > SLACK_MARGIN && self.linf_slack > SLACK_MARGIN
    }
}

/// Number of consecutive non-contracting steps after which the fixed-point
/// iteration is declared stalled.
const STALL_STEPS: usize = 5;

/// Builds `Q = (U*Vᵀ + H_T) + (γ·sgn(E0) + H_Ω)` by alternating
/// `H_T = −P_T(γ·sgn(E0) + H_Ω)` and `H_Ω = −P_Ω(U*Vᵀ + H_T)` from `H_Ω = 0`.
///
/// Stops once an update changes `H_Ω` by less than `tol` relative to
/// `max(‖U*Vᵀ‖_F, γ‖sgn(E0)‖_F)`. Exhausting `max_iters` while still
/// contracting returns an unconverged certificate; growth sustained over
/// several steps is reported as [`Error::NonConvergence`].
pub fn dual_certificate(
    l0: &Tensor3,
    e0: &Tensor3,
    gamma: f64,
    max_iters: usize,
    tol: f64,
) -> Result<DualCertificate> {
    if l0.dims() != e0.dims() {
        return Err(Error::shape("dual_certificate", format!("{} vs {}", l0.dims(), e0.dims())));
    }
    let t = tangent_of(l0, DEFAULT_RANK_TOL)?;
    dual_certificate_for(&t, &support_of(e0, 0.0), &sign_of(e0), gamma, max_iters, tol)
}

pub fn dual_certificate_for(
    t: &TangentBasis,
    m: &SupportMask,
    sgn: &Tensor3,
    gamma: f64,
    max_iters: usize,
    tol: f64,
) -> Result<DualCertificate> {
    const OP: &str = "dual_certificate";
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::domain(OP, format!("gamma must be positive, got {gamma}")));
    }
    if max_iters == 0 {
        return Err(Error::domain(OP, "max_iters must be at least 1"));
    }
    let dims = t.ambient();
    let uv = if t.rank() == 0 {
        Tensor3::zeros(dims)
    } else {
        t.uv_transpose()?
    };
    let gsgn = sgn.scaled(gamma);
    let scale = uv.fro_norm().max(gsgn.fro_norm()).max(f64::MIN_POSITIVE);

    let mut h_omega = Tensor3::zeros(dims);
    let mut prev_change = f64::NAN;
    let mut log_ratio_sum = 0.0;
    let mut ratio_count = 0usize;
    let mut growing = 0usize;
    let mut converged = false;
    let mut iterations = 0;
    for it in 1..=max_iters {
        iterations = it;
        let h_t = -&project_t(t, &(&gsgn + &h_omega))?;
        let next = -&project_omega(m, &(&uv + &h_t))?;
        let change = next.distance(&h_omega);
        h_omega = next;
        if change <= tol * scale {
            converged = true;
            break;
        }
        if prev_change > 0.0 {
            let ratio = change / prev_change;
            log_ratio_sum += ratio.ln();
            ratio_count += 1;
            growing = if ratio >= 1.0 { growing + 1 } else { 0 };
            if growing >= STALL_STEPS {
                return Err(Error::NonConvergence {
                    op: OP,
                    iters: it,
                    last: change,
                });
            }
        }
        prev_change = change;
    }
    // Recompute the tangent part from the final support part so that
    // P_T(Q) = U*Vᵀ holds to rounding.
    let h_t = -&project_t(t, &(&gsgn + &h_omega))?;

    let q = &(&(&uv + &h_t) + &gsgn) + &h_omega;
    let spectral_slack = 1.0 - spectral_norm(&project_t_perp(t, &q)?)?;
    let linf_slack = gamma - project_omega_comp(m, &q)?.linf_norm();
    Ok(DualCertificate {
        q,
        h_t,
        h_omega,
        spectral_slack,
        linf_slack,
        iterations,
        converged,
        contraction: if ratio_count > 0 {
            (log_ratio_sum / ratio_count as f64).exp()
        } else {
            f64::NAN
        },
    })
}

/// Recovery condition checked by the `certify` front end.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Condition {
    /// `ξ_ub·μ < 1/6` with `ξ_ub = 2·inc`.
    Thm3,
    /// `inc·deg_max < 1/12`.
    Cor3,
    /// A certified dual certificate together with a gauge below 1.
    Dual,
}

impl FromStr for Condition {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "thm3" => Ok(Condition::Thm3),
            "cor3" => Ok(Condition::Cor3),
            "dual" => Ok(Condition::Dual),
            other => Err(format!("unknown condition `{other}` (expected thm3, cor3 or dual)")),
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::Thm3 => "thm3",
            Condition::Cor3 => "cor3",
            Condition::Dual => "dual",
        })
    }
}

#[derive(Clone, Debug)]
pub struct CertifyOptions {
    pub xi_samples: usize,
    pub xi_iters: usize,
    pub gauge_iters: usize,
    pub gauge_tol: f64,
    /// γ for the dual certificate. When absent the interpolant at `p` is used
    /// if the `ξ_ub·μ` condition holds, and the dual step is skipped
    /// otherwise.
    pub gamma: Option<f64>,
    pub p: f64,
    pub dual: bool,
    pub dual_max_iters: usize,
    pub dual_tol: f64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            xi_samples: 4,
            xi_iters: 10,
            gauge_iters: GAUGE_DEFAULT_ITERS,
            gauge_tol: GAUGE_DEFAULT_TOL,
            gamma: None,
            p: 0.5,
            dual: true,
            dual_max_iters: 1000,
            dual_tol: 1e-12,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CertificateReport {
    pub dims: Dims,
    pub rank: usize,
    pub xi_lower: f64,
    pub xi_upper: f64,
    pub xi_estimate: f64,
    pub mu: f64,
    pub inc: f64,
    pub beta_u: f64,
    pub beta_v: f64,
    pub deg_min: usize,
    pub deg_max: usize,
    /// `ξ_ub·μ`.
    pub product_condition: f64,
    /// `inc·deg_max`.
    pub cor3_condition: f64,
    pub gamma_range: Option<(f64, f64)>,
    pub gamma_range_cor3: Option<(f64, f64)>,
    pub gauge: f64,
    pub gamma: Option<f64>,
    pub dual: Option<DualCertificate>,
}

impl CertificateReport {
    pub fn satisfies(&self, c: Condition) -> bool {
        match c {
            Condition::Thm3 => self.gamma_range.is_some(),
            Condition::Cor3 => self.gamma_range_cor3.is_some(),
            Condition::Dual => {
                self.gauge < 1.0 && self.dual.as_ref().is_some_and(DualCertificate::certified)
            }
        }
    }
}

/// Computes every quantity of the report for `(L0, E0)`.
pub fn certificate_report(l0: &Tensor3, e0: &Tensor3, opts: &CertifyOptions) -> Result<CertificateReport> {
    const OP: &str = "certificate_report";
    if l0.dims() != e0.dims() {
        return Err(Error::shape(OP, format!("{} vs {}", l0.dims(), e0.dims())));
    }
    let dims = l0.dims();
    let t = tangent_of(l0, DEFAULT_RANK_TOL)?;
    let m = support_of(e0, 0.0);
    let (beta_u, beta_v) = if t.rank() == 0 { (0.0, 0.0) } else { beta_pair(&t)? };
    let inc = beta_u.max(beta_v);
    let (xi_lower, xi_upper) = xi_bounds_from_inc(inc, dims.n3);
    let xi_estimate = xi_lower_estimate_for(&t, opts.xi_samples, opts.xi_iters)?;
    let mu = mu_exact(&m)?;
    let (deg_min, deg_max) = deg_bounds(&m);
    let gamma_range = gamma_range_thm3(xi_upper, mu);
    let gamma_range_cor3 = gamma_range_cor3(inc, deg_max);
    let gauge = transversality_gauge(&t, &m, opts.gauge_iters, opts.gauge_tol)?;
    let gamma = opts.gamma.or_else(|| {
        gamma_range
            .and_then(|_| gamma_interp(xi_upper, mu, opts.p).ok())
    });
    let dual = match (opts.dual, gamma) {
        (true, Some(g)) => Some(dual_certificate_for(
            &t,
            &m,
            &sign_of(e0),
            g,
            opts.dual_max_iters,
            opts.dual_tol,
        )?),
        _ => None,
    };
    Ok(CertificateReport {
        dims,
        rank: t.rank(),
        xi_lower,
        xi_upper,
        xi_estimate,
        mu,
        inc,
        beta_u,
        beta_v,
        deg_min,
        deg_max,
        product_condition: xi_upper * mu,
        cor3_condition: inc * deg_max as f64,
        gamma_range,
        gamma_range_cor3,
        gauge,
        gamma,
        dual,
    })
}

fn range_text(r: Option<(f64, f64)>) -> String {
    match r {
        Some((lo, hi)) => format!("{lo:.12e} {hi:.12e}"),
        None => "none".into(),
    }
}

impl fmt::Display for CertificateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dims: {}", self.dims)?;
        writeln!(f, "rank: {}", self.rank)?;
        writeln!(f, "inc: {:.12e}", self.inc)?;
        writeln!(f, "beta_u: {:.12e}", self.beta_u)?;
        writeln!(f, "beta_v: {:.12e}", self.beta_v)?;
        writeln!(f, "xi_lower: {:.12e}", self.xi_lower)?;
        writeln!(f, "xi_estimate: {:.12e}", self.xi_estimate)?;
        writeln!(f, "xi_upper: {:.12e}", self.xi_upper)?;
        writeln!(f, "mu: {:.12e}", self.mu)?;
        writeln!(f, "deg_min: {}", self.deg_min)?;
        writeln!(f, "deg_max: {}", self.deg_max)?;
        writeln!(f, "product_condition: {:.12e}", self.product_condition)?;
        writeln!(f, "cor3_condition: {:.12e}", self.cor3_condition)?;
        writeln!(f, "gamma_range: {}", range_text(self.gamma_range))?;
        writeln!(f, "gamma_range_cor3: {}", range_text(self.gamma_range_cor3))?;
        writeln!(f, "gauge: {:.12e}", self.gauge)?;
        match self.gamma {
            Some(g) => writeln!(f, "gamma: {g:.12e}")?,
            None => writeln!(f, "gamma: none")?,
        }
        match &self.dual {
            Some(d) => {
                writeln!(f, "dual_converged: {}", d.converged)?;
                writeln!(f, "dual_iterations: {}", d.iterations)?;
                writeln!(f, "dual_contraction: {:.6e}", d.contraction)?;
                writeln!(f, "spectral_slack: {:.12e}", d.spectral_slack)?;
                writeln!(f, "linf_slack: {:.12e}", d.linf_slack)?;
                write!(f, "dual_certified: {}", d.certified())
            }
            None => write!(f, "dual_certified: none"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask_of(dims: Dims, on: &[(usize, usize, usize)]) -> SupportMask {
        let mut flags = vec![false; dims.len()];
        for &(i, j, k) in on {
            flags[dims.offset(i, j, k)] = true;
        }
        SupportMask::new(dims, flags).unwrap()
    }

    #[test]
    fn beta_of_trivial_projectors() {
        assert!((beta_incoherence(&Tensor3::identity(4, 3)).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(beta_incoherence(&Tensor3::zeros(Dims::new(4, 4, 3))).unwrap(), 0.0);
        let mut p = Tensor3::zeros(Dims::new(4, 4, 3));
        p.set(0, 0, 0, 1.0);
        assert_eq!(beta_incoherence(&p).unwrap(), 1.0);
    }

    #[test]
    fn non_projector_is_rejected() {
        let p = Tensor3::identity(3, 2).scaled(2.0);
        assert!(matches!(beta_incoherence(&p), Err(Error::NotAProjector { .. })));
    }

    #[test]
    fn inc_of_identity_and_zero() {
        assert!((inc(&Tensor3::identity(3, 2)).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(inc(&Tensor3::zeros(Dims::new(2, 2, 2))), Err(Error::ZeroTensor { .. })));
    }

    #[test]
    fn degree_counts() {
        let all = SupportMask::full(Dims::new(2, 3, 2));
        assert_eq!(deg_bounds(&all), (4, 6));
        let single = mask_of(Dims::new(3, 3, 2), &[(1, 1, 0)]);
        assert_eq!(deg_bounds(&single), (0, 1));
        assert_eq!(deg_bounds(&SupportMask::empty(Dims::new(2, 2, 2))), (0, 0));
    }

    #[test]
    fn mu_of_simple_masks() {
        let single = mask_of(Dims::new(1, 1, 4), &[(0, 0, 0)]);
        assert!((mu_exact(&single).unwrap() - 1.0).abs() < 1e-12);
        let ones = SupportMask::full(Dims::new(1, 1, 5));
        assert!((mu_exact(&ones).unwrap() - 5.0).abs() < 1e-12);
        let block = SupportMask::full(Dims::new(2, 3, 2));
        assert!((mu_exact(&block).unwrap() - 24f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn xi_bounds_substitution() {
        assert_eq!(xi_bounds_from_inc(1.0, 4), (0.5, 2.0));
        let (lo, hi) = xi_bounds(&Tensor3::identity(3, 1)).unwrap();
        assert!((lo - 1.0).abs() < 1e-12 && (hi - 2.0).abs() < 1e-12);
    }

    #[test]
    fn xi_estimate_on_full_space_reaches_one() {
        let est = xi_lower_estimate(&Tensor3::identity(3, 2), 2, 3).unwrap();
        assert!(est >= 1.0 - 1e-12);
        assert_eq!(xi_lower_estimate(&Tensor3::zeros(Dims::new(3, 3, 2)), 2, 3).unwrap(), 0.0);
    }

    #[test]
    fn gamma_ranges() {
        let (lo, hi) = gamma_range_thm3(0.1, 1.0).unwrap();
        assert!((lo - 0.1 / 0.6).abs() < 1e-15 && (hi - 0.7).abs() < 1e-15);
        assert!(gamma_range_thm3(0.2, 1.0).is_none());
        let g = gamma_interp(0.1, 1.0, 0.5).unwrap();
        assert!((g - 0.15f64.sqrt()).abs() < 1e-15);
        assert!(g > lo && g < hi);
        assert_eq!(gamma_interp(0.1, 2.0, 0.0).unwrap(), 0.25);
        assert!((gamma_interp(0.1, 2.0, 1.0).unwrap() - 0.3).abs() < 1e-15);
        assert!(matches!(gamma_interp(0.1, 1.0, 1.5), Err(Error::DomainError { .. })));

        let (lo, hi) = gamma_range_cor3(0.05, 1).unwrap();
        assert!((lo - 0.1 / 0.6).abs() < 1e-15 && (hi - 0.95).abs() < 1e-15);
        assert!(gamma_range_cor3(0.1, 1).is_none());
    }

    #[test]
    fn dual_with_empty_sparse_part_is_uv() {
        let l = Tensor3::identity(3, 2);
        let e = Tensor3::zeros(l.dims());
        let d = dual_certificate(&l, &e, 0.5, 10, 1e-12).unwrap();
        assert!(d.converged);
        assert!(d.h_t.is_zero() && d.h_omega.is_zero());
        assert!((d.spectral_slack - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dual_with_zero_low_rank_part_is_scaled_sign() {
        let d3 = Dims::new(3, 3, 2);
        let mut e = Tensor3::zeros(d3);
        e.set(0, 1, 0, -2.0);
        e.set(2, 2, 1, 3.0);
        let d = dual_certificate(&Tensor3::zeros(d3), &e, 0.4, 10, 1e-12).unwrap();
        assert!(d.q.distance(&sign_of(&e).scaled(0.4)) < 1e-15);
        let mu = mu_exact(&support_of(&e, 0.0)).unwrap();
        assert!((d.spectral_slack - (1.0 - 0.4 * mu)).abs() < 1e-12);
    }
}
