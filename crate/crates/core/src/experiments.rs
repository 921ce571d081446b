//! Synthetic instances and recovery sweeps.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::Instant;

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::certify::{
    beta_pair, deg_bounds, dual_certificate_for, gamma_interp, gamma_range_thm3, mu_exact,
};
use crate::error::{Error, Result};
use crate::fourier::{half_len, idft_real, is_self_conjugate, FourierSlices};
use crate::linalg::CMatrix;
use crate::solver::{default_gamma, rtpca, SolverConfig, SolverResult};
use crate::tangent::{sign_of, support_of, tangent_of, transversality_gauge};
use crate::tensor::{Dims, Tensor3};
use crate::tproduct::tprod;
use crate::tsvd::{tubal_rank, DEFAULT_RANK_TOL};

/// Relative error below which a recovery counts as exact.
pub const SUCCESS_TOL: f64 = 1e-5;

/// Shape of the certified-regime instance.
pub const RECIPE_DIMS: Dims = Dims {
    n1: 256,
    n2: 256,
    n3: 3,
};

/// Distribution of the factors of a low-tubal-rank tensor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorLaw {
    /// Independent standard normal entries.
    Gaussian,
    /// Every Fourier slice of every factor column has entries of modulus
    /// `1/√N` with random phases (random signs on real slices). Rank-one
    /// tensors built this way have incoherence exactly `1/√N`.
    Incoherent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SparsePattern {
    /// Exactly `m` nonzeros at uniformly random positions.
    RandomEntries(usize),
    /// A random maximal support with at most `deg` nonzeros in every
    /// horizontal and lateral slice.
    PerSliceCapped(usize),
}

/// Magnitudes of the sparse entries.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MagnitudeLaw {
    /// `±1` with equal probability.
    Rademacher,
    /// Random sign times a uniform magnitude in `[lo, hi)`.
    Uniform { lo: f64, hi: f64 },
    Gaussian,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InstanceSpec {
    pub dims: Dims,
    pub rank: usize,
    pub pattern: SparsePattern,
    pub magnitude: MagnitudeLaw,
    pub factor_law: FactorLaw,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub l0: Tensor3,
    pub e0: Tensor3,
}

impl Instance {
    pub fn observation(&self) -> Tensor3 {
        &self.l0 + &self.e0
    }
}

impl InstanceSpec {
    pub fn generate(&self) -> Result<Instance> {
        Ok(Instance {
            l0: gen_low_tubal_rank_with(self.dims, self.rank, self.factor_law, derive_seed(self.seed, 1))?,
            e0: gen_sparse_with(self.dims, self.pattern, self.magnitude, derive_seed(self.seed, 2))?,
        })
    }
}

/// SplitMix64 of `seed` and `salt`, for independent child streams.
pub fn derive_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// `P * Qᵀ` with standard normal `P ∈ ℝ^{N1×R×N3}`, `Q ∈ ℝ^{N2×R×N3}`.
pub fn gen_low_tubal_rank(dims: Dims, rank: usize, seed: u64) -> Result<Tensor3> {
    gen_low_tubal_rank_with(dims, rank, FactorLaw::Gaussian, seed)
}

/// Low-tubal-rank tensor with factors drawn from `law`. Incoherent
/// instances are scaled to unit root-mean-square entry.
pub fn gen_low_tubal_rank_with(dims: Dims, rank: usize, law: FactorLaw, seed: u64) -> Result<Tensor3> {
    const OP: &str = "gen_low_tubal_rank";
    let max = dims.n1.min(dims.n2);
    if rank > max {
        return Err(Error::RankTooLarge { op: OP, rank, max });
    }
    if rank == 0 {
        return Ok(Tensor3::zeros(dims));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (p, q) = match law {
        FactorLaw::Gaussian => {
            let mut gauss = |n| Tensor3::from_fn(Dims::new(n, rank, dims.n3), |_, _, _| StandardNormal.sample(&mut rng));
            (gauss(dims.n1), gauss(dims.n2))
        }
        FactorLaw::Incoherent => (
            flat_spectrum_factor(dims.n1, rank, dims.n3, &mut rng),
            flat_spectrum_factor(dims.n2, rank, dims.n3, &mut rng),
        ),
    };
    let mut l = tprod(&p, &q.ttranspose())?;
    if law == FactorLaw::Incoherent {
        let f = l.fro_norm();
        if f > 0.0 {
            l = l.scaled((dims.len() as f64).sqrt() / f);
        }
    }
    let got = tubal_rank(&l, DEFAULT_RANK_TOL)?;
    if got != rank {
        return Err(Error::GenerationCheck {
            op: OP,
            detail: format!("tubal rank {got}, requested {rank}"),
        });
    }
    Ok(l)
}

fn flat_spectrum_factor(n: usize, rank: usize, n3: usize, rng: &mut ChaCha8Rng) -> Tensor3 {
    let amp = 1.0 / (n as f64).sqrt();
    let half = (0..half_len(n3))
        .map(|k| {
            CMatrix::from_fn(n, rank, |_, _| {
                if is_self_conjugate(k, n3) {
                    Complex64::new(if rng.random::<bool>() { amp } else { -amp }, 0.0)
                } else {
                    Complex64::from_polar(amp, rng.random_range(0.0..std::f64::consts::TAU))
                }
            })
        })
        .collect();
    idft_real(&FourierSlices::from_half(Dims::new(n, rank, n3), half))
}

/// Sparse tensor with `±1` entries on a support drawn from `pattern`.
pub fn gen_sparse(dims: Dims, pattern: SparsePattern, seed: u64) -> Result<Tensor3> {
    gen_sparse_with(dims, pattern, MagnitudeLaw::Rademacher, seed)
}

pub fn gen_sparse_with(dims: Dims, pattern: SparsePattern, magnitude: MagnitudeLaw, seed: u64) -> Result<Tensor3> {
    const OP: &str = "gen_sparse";
    if let MagnitudeLaw::Uniform { lo, hi } = magnitude {
        if !(0.0 < lo && lo < hi && hi.is_finite()) {
            return Err(Error::domain(OP, format!("uniform magnitudes need 0 < lo < hi, got [{lo}, {hi})")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let positions: Vec<usize> = match pattern {
        SparsePattern::RandomEntries(m) => {
            if m > dims.len() {
                return Err(Error::InfeasiblePattern {
                    op: OP,
                    detail: format!("{m} entries requested in a {dims} tensor"),
                });
            }
            let mut idx = sample(&mut rng, dims.len(), m).into_vec();
            idx.sort_unstable();
            idx
        }
        SparsePattern::PerSliceCapped(deg) => {
            let mut order: Vec<usize> = (0..dims.len()).collect();
            order.shuffle(&mut rng);
            let (mut rows, mut cols) = (vec![0; dims.n1], vec![0; dims.n2]);
            let mut kept = Vec::new();
            for t in order {
                let (i, j) = (t / (dims.n2 * dims.n3), (t / dims.n3) % dims.n2);
                if rows[i] < deg && cols[j] < deg {
                    rows[i] += 1;
                    cols[j] += 1;
                    kept.push(t);
                }
            }
            kept.sort_unstable();
            kept
        }
    };
    let mut data = vec![0.0; dims.len()];
    for t in positions {
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        data[t] = match magnitude {
            MagnitudeLaw::Rademacher => sign,
            MagnitudeLaw::Uniform { lo, hi } => sign * rng.random_range(lo..hi),
            MagnitudeLaw::Gaussian => loop {
                let v: f64 = StandardNormal.sample(&mut rng);
                if v != 0.0 {
                    break v;
                }
            },
        };
    }
    let e = Tensor3::from_vec(dims, data)?;

    let mask = support_of(&e, 0.0);
    match pattern {
        SparsePattern::RandomEntries(m) if mask.count() != m => Err(Error::GenerationCheck {
            op: OP,
            detail: format!("{} nonzeros, requested {m}", mask.count()),
        }),
        SparsePattern::PerSliceCapped(deg) if deg_bounds(&mask).1 > deg => Err(Error::GenerationCheck {
            op: OP,
            detail: format!("deg_max {} exceeds cap {deg}", deg_bounds(&mask).1),
        }),
        _ => Ok(e),
    }
}

/// An instance satisfying `inc(L0)·deg_max(E0) < 1/12`.
#[derive(Clone, Debug)]
pub struct CertifiedInstance {
    pub l0: Tensor3,
    pub e0: Tensor3,
    pub inc: f64,
    pub deg_max: usize,
    /// Seed that produced the accepted instance.
    pub seed: u64,
    pub attempts: usize,
}

/// Certified-regime recipe: [`RECIPE_DIMS`], tubal rank 1 with incoherent
/// factors and a single `±1` sparse entry, regenerated with fresh seeds until
/// `inc·deg_max < 1/12` is verified.
pub fn certified_instance(seed: u64, max_tries: usize) -> Result<CertifiedInstance> {
    certified_instance_with(RECIPE_DIMS, 1, 1, seed, max_tries)
}

pub fn certified_instance_with(
    dims: Dims,
    rank: usize,
    entries: usize,
    seed: u64,
    max_tries: usize,
) -> Result<CertifiedInstance> {
    let mut last = f64::NAN;
    for attempt in 0..max_tries {
        let s = derive_seed(seed, attempt as u64);
        let inst = InstanceSpec {
            dims,
            rank,
            pattern: SparsePattern::RandomEntries(entries),
            magnitude: MagnitudeLaw::Rademacher,
            factor_law: FactorLaw::Incoherent,
            seed: s,
        }
        .generate()?;
        let t = tangent_of(&inst.l0, DEFAULT_RANK_TOL)?;
        let (bu, bv) = beta_pair(&t)?;
        let inc = bu.max(bv);
        let (_, deg_max) = deg_bounds(&support_of(&inst.e0, 0.0));
        last = inc * deg_max as f64;
        if last < 1.0 / 12.0 {
            return Ok(CertifiedInstance {
                l0: inst.l0,
                e0: inst.e0,
                inc,
                deg_max,
                seed: s,
                attempts: attempt + 1,
            });
        }
    }
    Err(Error::GenerationCheck {
        op: "certified_instance",
        detail: format!("inc*deg_max = {last} after {max_tries} attempts"),
    })
}

/// How a sweep cell chooses γ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GammaSpec {
    Auto,
    Value(f64),
    /// The interpolant `(3ξ)^p/(2μ)^(1−p)` at `ξ = 2·inc`.
    Interp(f64),
}

#[derive(Clone, Debug)]
pub struct SweepGrid {
    pub dims: Dims,
    pub ranks: Vec<usize>,
    /// Numbers of sparse entries.
    pub sparsities: Vec<usize>,
    pub gammas: Vec<GammaSpec>,
    pub factor_law: FactorLaw,
    pub magnitude: MagnitudeLaw,
    pub seed: u64,
    /// Also build the dual certificate and transversality gauge per cell.
    pub dual: bool,
}

#[derive(Clone, Debug)]
pub struct SweepOptions {
    pub threads: usize,
    /// Record wall time per cell. Off by default so that repeated sweeps
    /// produce identical files.
    pub timing: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            threads: 1,
            timing: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRecord {
    pub r: usize,
    pub sparsity: usize,
    pub gamma: f64,
    pub p: Option<f64>,
    pub inc: f64,
    pub mu: f64,
    pub deg_max: usize,
    pub cert_ok: bool,
    pub dual_ok: bool,
    pub err_l: f64,
    pub err_e: f64,
    pub success: bool,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub records: Vec<SweepRecord>,
}

pub const CSV_HEADER: &str = "r,sparsity,gamma,p,inc,mu,deg_max,cert_ok,dual_ok,err_L,err_E,success,seconds";

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let p = r.p.map(|p| format!("{p:e}")).unwrap_or_default();
            writeln!(
                out,
                "{},{},{:e},{},{:e},{:e},{},{},{},{:e},{:e},{},{:e}",
                r.r, r.sparsity, r.gamma, p, r.inc, r.mu, r.deg_max, r.cert_ok, r.dual_ok, r.err_l, r.err_e, r.success, r.seconds
            )
            .expect("writing to a String");
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

/// Runs every `(rank, sparsity, γ)` cell of the grid on a pool of
/// `opts.threads` workers. Cells sharing a rank and sparsity share their
/// instance. Failures inside a cell are recorded as unsuccessful rows.
pub fn run_sweep(grid: &SweepGrid, template: &SolverConfig, opts: &SweepOptions) -> Result<SweepResult> {
    if grid.ranks.is_empty() || grid.sparsities.is_empty() || grid.gammas.is_empty() {
        return Err(Error::domain("run_sweep", "every grid axis needs at least one value"));
    }
    template.validate()?;
    let cells: Vec<(usize, usize, usize)> = (0..grid.ranks.len())
        .flat_map(|a| (0..grid.sparsities.len()).flat_map(move |b| (0..grid.gammas.len()).map(move |c| (a, b, c))))
        .collect();
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel();
    std::thread::scope(|s| {
        for _ in 0..opts.threads.max(1).min(cells.len()) {
            let tx = tx.clone();
            let (cells, next) = (&cells, &next);
            s.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(a, b, c)) = cells.get(i) else { break };
                let record = run_cell(grid, template, opts, a, b, c);
                tx.send((i, record)).expect("receiver outlives workers");
            });
        }
    });
    drop(tx);
    let mut indexed: Vec<(usize, SweepRecord)> = rx.into_iter().collect();
    indexed.sort_by_key(|(i, _)| *i);
    Ok(SweepResult {
        records: indexed.into_iter().map(|(_, r)| r).collect(),
    })
}

fn relative_error(estimate: &Tensor3, truth: &Tensor3) -> f64 {
    let d = estimate.distance(truth);
    let n = truth.fro_norm();
    if n > 0.0 {
        d / n
    } else {
        d
    }
}

fn run_cell(grid: &SweepGrid, template: &SolverConfig, opts: &SweepOptions, a: usize, b: usize, c: usize) -> SweepRecord {
    let start = Instant::now();
    let (r, sparsity, spec) = (grid.ranks[a], grid.sparsities[b], grid.gammas[c]);
    let mut record = SweepRecord {
        r,
        sparsity,
        gamma: f64::NAN,
        p: match spec {
            GammaSpec::Interp(p) => Some(p),
            _ => None,
        },
        inc: f64::NAN,
        mu: f64::NAN,
        deg_max: 0,
        cert_ok: false,
        dual_ok: false,
        err_l: f64::NAN,
        err_e: f64::NAN,
        success: false,
        seconds: 0.0,
    };
    let instance_seed = derive_seed(grid.seed, (a * grid.sparsities.len() + b) as u64);
    let _ = fill_cell(grid, template, spec, r, sparsity, instance_seed, &mut record);
    if opts.timing {
        record.seconds = start.elapsed().as_secs_f64();
    }
    record
}

fn fill_cell(
    grid: &SweepGrid,
    template: &SolverConfig,
    spec: GammaSpec,
    r: usize,
    sparsity: usize,
    seed: u64,
    record: &mut SweepRecord,
) -> Result<()> {
    let inst = InstanceSpec {
        dims: grid.dims,
        rank: r,
        pattern: SparsePattern::RandomEntries(sparsity),
        magnitude: grid.magnitude,
        factor_law: grid.factor_law,
        seed,
    }
    .generate()?;
    let t = tangent_of(&inst.l0, DEFAULT_RANK_TOL)?;
    let mask = support_of(&inst.e0, 0.0);
    let (bu, bv) = if t.rank() == 0 { (0.0, 0.0) } else { beta_pair(&t)? };
    record.inc = bu.max(bv);
    record.mu = mu_exact(&mask)?;
    record.deg_max = deg_bounds(&mask).1;
    let xi_ub = 2.0 * record.inc;

    let fallback = || default_gamma(template.penalty, grid.dims);
    let gamma = match spec {
        GammaSpec::Auto => fallback()?,
        GammaSpec::Value(g) => g,
        GammaSpec::Interp(p) if xi_ub > 0.0 && record.mu > 0.0 => gamma_interp(xi_ub, record.mu, p)?,
        GammaSpec::Interp(_) => fallback()?,
    };
    record.gamma = gamma;
    record.cert_ok = gamma_range_thm3(xi_ub, record.mu).is_some_and(|(lo, hi)| lo < gamma && gamma < hi);
    if grid.dual {
        let dual = dual_certificate_for(&t, &mask, &sign_of(&inst.e0), gamma, 1000, 1e-12);
        let gauge = transversality_gauge(&t, &mask, 500, 1e-8);
        record.dual_ok = matches!((dual, gauge), (Ok(d), Ok(g)) if d.certified() && g < 1.0);
    }

    let cfg = template.clone().with_gamma(gamma);
    let result: SolverResult = match rtpca(&inst.observation(), &cfg) {
        Ok(res) => res,
        Err(Error::MaxItersExceeded(partial)) => *partial,
        Err(e) => return Err(e),
    };
    record.err_l = relative_error(&result.l, &inst.l0);
    record.err_e = relative_error(&result.e, &inst.e0);
    record.success = record.err_l <= SUCCESS_TOL && record.err_e <= SUCCESS_TOL;
    Ok(())
}
