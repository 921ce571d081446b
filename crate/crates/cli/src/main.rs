//! `trpca` command-line front end.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use trpca::certify::{certificate_report, CertifyOptions, Condition};
use trpca::experiments::{
    certified_instance, run_sweep, FactorLaw, GammaSpec, InstanceSpec, MagnitudeLaw,
    SparsePattern, SweepGrid, SweepOptions,
};
use trpca::io::{read_tensor, write_tensor};
use trpca::solver::{objective, rtpca, GammaChoice, Penalty, SolverConfig};
use trpca::tensor::Dims;
use trpca::tsvd::{nuclear_norm, spectral_norm, tsvd_skinny, DEFAULT_RANK_TOL};

const EXIT_COMPUTE: u8 = 1;
const EXIT_CONDITION: u8 = 3;

#[derive(Parser)]
#[command(name = "trpca", version, about = "Tensor robust PCA under the t-product")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Skinny t-SVD; writes U, S and V beside the input.
    Tsvd(TsvdArgs),
    /// Low-rank plus sparse decomposition by ADMM.
    Solve(SolveArgs),
    /// Recovery certificate for a pair (L0, E0).
    Certify(CertifyArgs),
    /// Generate a synthetic instance.
    Synth(SynthArgs),
    /// Recovery sweep over rank, sparsity and gamma; writes CSV.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct TsvdArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Rank tolerance relative to the largest first-slice singular value.
    #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
    tol: f64,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// `auto` or a positive number.
    #[arg(long, default_value = "auto")]
    gamma: GammaChoice,
    #[arg(long, default_value = "l1")]
    penalty: Penalty,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 500)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-3)]
    rho0: f64,
    #[arg(long, default_value_t = 1.1)]
    rho_scale: f64,
    #[arg(long, default_value_t = 1e10)]
    rho_max: f64,
    /// Output for L; defaults to `<input stem>.L.t3` beside the input.
    #[arg(long)]
    out_l: Option<PathBuf>,
    /// Output for E; defaults to `<input stem>.E.t3` beside the input.
    #[arg(long)]
    out_e: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long = "L")]
    l: PathBuf,
    #[arg(long = "E")]
    e: PathBuf,
    #[arg(long, default_value = "cor3")]
    condition: Condition,
    /// Gamma for the dual certificate; defaults to the interpolant at `--p`.
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 4)]
    xi_samples: usize,
    #[arg(long, default_value_t = 10)]
    xi_iters: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Law {
    Gaussian,
    Incoherent,
}

impl From<Law> for FactorLaw {
    fn from(l: Law) -> Self {
        match l {
            Law::Gaussian => FactorLaw::Gaussian,
            Law::Incoherent => FactorLaw::Incoherent,
        }
    }
}

#[derive(Args)]
struct SynthArgs {
    /// Shape `N1 N2 N3`.
    #[arg(long, num_args = 3, value_names = ["N1", "N2", "N3"], default_values_t = [256, 256, 3])]
    dims: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    rank: usize,
    /// Number of random sparse entries.
    #[arg(long, default_value_t = 1, conflicts_with = "deg")]
    sparsity: usize,
    /// Cap on nonzeros per horizontal and lateral slice instead of a count.
    #[arg(long)]
    deg: Option<usize>,
    #[arg(long, value_enum, default_value = "gaussian")]
    law: Law,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Certified-regime recipe (256x256x3, rank 1, one entry, inc < 1/12);
    /// ignores the shape and pattern flags.
    #[arg(long)]
    certified: bool,
    #[arg(long)]
    out_l: PathBuf,
    #[arg(long)]
    out_e: PathBuf,
    /// Also write the observation L + E.
    #[arg(long)]
    out_x: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, num_args = 3, value_names = ["N1", "N2", "N3"], default_values_t = [20, 20, 3])]
    dims: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    ranks: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    sparsities: Vec<usize>,
    /// Comma-separated list of `auto`, numbers, or `p<value>` for the
    /// interpolant at that p.
    #[arg(long, value_delimiter = ',', default_value = "auto")]
    gammas: Vec<String>,
    #[arg(long, value_enum, default_value = "gaussian")]
    law: Law,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "l1")]
    penalty: Penalty,
    /// Build the dual certificate for every cell.
    #[arg(long)]
    dual: bool,
    /// Record wall time in the `seconds` column.
    #[arg(long)]
    timing: bool,
    #[arg(long, default_value_t = 500)]
    max_iters: usize,
}

/// Failure of a subcommand with the exit code to report.
struct Failure {
    code: u8,
    message: String,
}

impl From<trpca::Error> for Failure {
    fn from(e: trpca::Error) -> Self {
        Failure {
            code: EXIT_COMPUTE,
            message: e.to_string(),
        }
    }
}

fn usage(message: String) -> Failure {
    Failure { code: 2, message }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Tsvd(a) => tsvd(a),
        Command::Solve(a) => solve(a),
        Command::Certify(a) => certify(a),
        Command::Synth(a) => synth(a),
        Command::Sweep(a) => sweep(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}

fn sibling(input: &Path, tag: &str) -> PathBuf {
    let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("tensor");
    input.with_file_name(format!("{stem}.{tag}.t3"))
}

fn dims_of(v: &[usize]) -> Result<Dims, Failure> {
    match *v {
        [n1, n2, n3] if n1 > 0 && n2 > 0 && n3 > 0 => Ok(Dims::new(n1, n2, n3)),
        _ => Err(usage(format!("--dims needs three positive integers, got {v:?}"))),
    }
}

fn tsvd(a: TsvdArgs) -> Result<(), Failure> {
    let x = read_tensor(&a.input)?;
    let f = tsvd_skinny(&x, a.tol)?;
    write_tensor(sibling(&a.input, "U"), &f.u)?;
    write_tensor(sibling(&a.input, "S"), &f.s)?;
    write_tensor(sibling(&a.input, "V"), &f.v)?;
    println!(
        "rank={} nuclear={:.16e} spectral={:.16e}",
        f.rank,
        nuclear_norm(&x)?,
        spectral_norm(&x)?
    );
    Ok(())
}

fn solve(a: SolveArgs) -> Result<(), Failure> {
    let x = read_tensor(&a.input)?;
    let cfg = SolverConfig {
        gamma: a.gamma,
        penalty: a.penalty,
        rho0: a.rho0,
        rho_scale: a.rho_scale,
        rho_max: a.rho_max,
        tol: a.tol,
        max_iters: a.max_iters,
    };
    let res = rtpca(&x, &cfg)?;
    write_tensor(a.out_l.unwrap_or_else(|| sibling(&a.input, "L")), &res.l)?;
    write_tensor(a.out_e.unwrap_or_else(|| sibling(&a.input, "E")), &res.e)?;
    println!(
        "iters={} residual={:.6e} objective={:.16e}",
        res.iterations,
        res.primal_residual,
        objective(&res.l, &res.e, res.gamma, cfg.penalty)?
    );
    Ok(())
}

fn certify(a: CertifyArgs) -> Result<(), Failure> {
    let l0 = read_tensor(&a.l)?;
    let e0 = read_tensor(&a.e)?;
    let opts = CertifyOptions {
        gamma: a.gamma,
        p: a.p,
        xi_samples: a.xi_samples,
        xi_iters: a.xi_iters,
        dual: a.condition == Condition::Dual || a.gamma.is_some(),
        ..CertifyOptions::default()
    };
    let report = certificate_report(&l0, &e0, &opts)?;
    println!("{report}");
    let ok = report.satisfies(a.condition);
    println!("condition: {} {}", a.condition, if ok { "satisfied" } else { "violated" });
    if ok {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_CONDITION,
            message: String::new(),
        })
    }
}

fn synth(a: SynthArgs) -> Result<(), Failure> {
    let (l0, e0) = if a.certified {
        let inst = certified_instance(a.seed, 100)?;
        (inst.l0, inst.e0)
    } else {
        let pattern = match a.deg {
            Some(d) => SparsePattern::PerSliceCapped(d),
            None => SparsePattern::RandomEntries(a.sparsity),
        };
        let inst = InstanceSpec {
            dims: dims_of(&a.dims)?,
            rank: a.rank,
            pattern,
            magnitude: MagnitudeLaw::Rademacher,
            factor_law: a.law.into(),
            seed: a.seed,
        }
        .generate()?;
        (inst.l0, inst.e0)
    };
    write_tensor(&a.out_l, &l0)?;
    write_tensor(&a.out_e, &e0)?;
    if let Some(p) = &a.out_x {
        write_tensor(p, &(&l0 + &e0))?;
    }
    Ok(())
}

fn parse_gamma_spec(s: &str) -> Result<GammaSpec, Failure> {
    let s = s.trim();
    if s == "auto" {
        return Ok(GammaSpec::Auto);
    }
    if let Some(p) = s.strip_prefix('p') {
        return match p.parse::<f64>() {
            Ok(p) if (0.0..=1.0).contains(&p) => Ok(GammaSpec::Interp(p)),
            _ => Err(usage(format!("bad interpolation point `{s}`"))),
        };
    }
    match s.parse::<f64>() {
        Ok(g) if g > 0.0 && g.is_finite() => Ok(GammaSpec::Value(g)),
        _ => Err(usage(format!("bad gamma `{s}`"))),
    }
}

fn sweep(a: SweepArgs) -> Result<(), Failure> {
    let threads = match std::env::var("RTPCA_THREADS") {
        Ok(v) => v
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| usage(format!("RTPCA_THREADS must be a positive integer, got `{v}`")))?,
        Err(_) => 1,
    };
    let grid = SweepGrid {
        dims: dims_of(&a.dims)?,
        ranks: a.ranks,
        sparsities: a.sparsities,
        gammas: a.gammas.iter().map(|g| parse_gamma_spec(g)).collect::<Result<_, _>>()?,
        factor_law: a.law.into(),
        magnitude: MagnitudeLaw::Rademacher,
        seed: a.seed,
        dual: a.dual,
    };
    let template = SolverConfig {
        penalty: a.penalty,
        max_iters: a.max_iters,
        ..SolverConfig::default()
    };
    let res = run_sweep(
        &grid,
        &template,
        &SweepOptions {
            threads,
            timing: a.timing,
        },
    )?;
    res.write_csv(&a.out)?;
    let ok = res.records.iter().filter(|r| r.success).count();
    println!("cells={} success={ok}", res.records.len());
    Ok(())
}
