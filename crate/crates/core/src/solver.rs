//! ADMM for low-tubal-rank plus sparse decomposition.
//!
//! Solves `min ‖L‖ + γ·R(E)  s.t.  X = L + E` where `R` is the entrywise
//! ℓ1 norm, the sum of tube ℓ2 norms, or the sum of lateral-slice Frobenius
//! norms.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fourier::{dft_mode3, idft_real};
use crate::tensor::{Dims, Tensor3};
use crate::tsvd::{nuclear_norm, svt_spectrum, tnn_zhang};

/// Sparse penalty of the decomposition model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Penalty {
    /// `‖E‖₁`.
    L1,
    /// `Σ_{i,j} ‖E(i, j, :)‖₂`.
    Tube112,
    /// `Σ_j ‖E(:, j, :)‖_F`.
    Slice21,
}

impl fmt::Display for Penalty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Penalty::L1 => "l1",
            Penalty::Tube112 => "tube",
            Penalty::Slice21 => "slice",
        })
    }
}

impl FromStr for Penalty {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "l1" => Ok(Penalty::L1),
            "tube" | "tube_112" => Ok(Penalty::Tube112),
            "slice" | "slice_21" => Ok(Penalty::Slice21),
            other => Err(format!("unknown penalty `{other}` (expected l1, tube or slice)")),
        }
    }
}

/// Weight of the sparse term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GammaChoice {
    /// [`default_gamma`] for the penalty and the input shape.
    Auto,
    Value(f64),
}

impl FromStr for GammaChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "auto" {
            return Ok(GammaChoice::Auto);
        }
        match s.parse::<f64>() {
            Ok(g) if g > 0.0 && g.is_finite() => Ok(GammaChoice::Value(g)),
            _ => Err(format!("gamma must be `auto` or a positive number, got `{s}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub gamma: GammaChoice,
    pub penalty: Penalty,
    pub rho0: f64,
    pub rho_scale: f64,
    pub rho_max: f64,
    /// Threshold on `‖X − L − E‖_F / ‖X‖_F`.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            gamma: GammaChoice::Auto,
            penalty: Penalty::L1,
            rho0: 1e-3,
            rho_scale: 1.1,
            rho_max: 1e10,
            tol: 1e-8,
            max_iters: 500,
        }
    }
}

impl SolverConfig {
    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = GammaChoice::Value(gamma);
        self
    }

    pub fn with_penalty(mut self, penalty: Penalty) -> Self {
        self.penalty = penalty;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |detail: String| Err(Error::domain("SolverConfig", detail));
        if let GammaChoice::Value(g) = self.gamma {
            if !(g > 0.0 && g.is_finite()) {
                return bad(format!("gamma must be positive, got {g}"));
            }
        }
        if !(self.rho0 > 0.0 && self.rho0.is_finite()) {
            return bad(format!("rho0 must be positive, got {}", self.rho0));
        }
        if !(self.rho_scale > 1.0 && self.rho_scale.is_finite()) {
            return bad(format!("rho_scale must exceed 1, got {}", self.rho_scale));
        }
        if self.rho_max.is_nan() || self.rho_max < self.rho0 {
            return bad(format!("rho_max {} is below rho0 {}", self.rho_max, self.rho0));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if self.max_iters == 0 {
            return bad("max_iters must be at least 1".into());
        }
        Ok(())
    }

    /// The numeric γ this configuration uses for an input of shape `dims`.
    pub fn resolve_gamma(&self, dims: Dims) -> Result<f64> {
        match self.gamma {
            GammaChoice::Value(g) => Ok(g),
            GammaChoice::Auto => default_gamma(self.penalty, dims),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolverResult {
    pub l: Tensor3,
    pub e: Tensor3,
    /// Final scaled multiplier `Y`; at a solution it is a common subgradient
    /// of both terms.
    pub dual: Tensor3,
    pub gamma: f64,
    pub iterations: usize,
    pub primal_residual: f64,
    pub objective_trace: Vec<f64>,
}

/// Suggested γ for each model:
/// `1/√(max(N1,N2)·N3)`, `1/max(N1,N2)` and `1/ln(N2)`.
pub fn default_gamma(penalty: Penalty, dims: Dims) -> Result<f64> {
    let nmax = dims.n1.max(dims.n2) as f64;
    match penalty {
        Penalty::L1 => Ok(1.0 / (nmax * dims.n3 as f64).sqrt()),
        Penalty::Tube112 => Ok(1.0 / nmax),
        Penalty::Slice21 => {
            if dims.n2 < 2 {
                return Err(Error::domain(
                    "default_gamma",
                    format!("slice penalty needs N2 >= 2, got {}", dims.n2),
                ));
            }
            Ok(1.0 / (dims.n2 as f64).ln())
        }
    }
}

/// Proximal operator of `tau·R(·)` for the selected penalty.
pub fn prox_sparse(e: &Tensor3, tau: f64, penalty: Penalty) -> Result<Tensor3> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::domain("prox_sparse", format!("tau must be >= 0, got {tau}")));
    }
    if tau == 0.0 {
        return Ok(e.clone());
    }
    let Dims { n1, n2, n3 } = e.dims();
    let mut out = e.clone();
    match penalty {
        Penalty::L1 => {
            out = e.map(|x| x.signum() * (x.abs() - tau).max(0.0));
        }
        Penalty::Tube112 => {
            for i in 0..n1 {
                for j in 0..n2 {
                    shrink_block(out.tube_mut(i, j), tau);
                }
            }
        }
        Penalty::Slice21 => {
            let mut data = out.into_vec();
            for j in 0..n2 {
                let idx = (0..n1).flat_map(|i| (0..n3).map(move |k| (i * n2 + j) * n3 + k));
                let norm = idx.clone().map(|t| data[t] * data[t]).sum::<f64>().sqrt();
                let factor = block_factor(norm, tau);
                for t in idx {
                    data[t] *= factor;
                }
            }
            out = Tensor3::from_raw(e.dims(), data);
        }
    }
    Ok(out)
}

fn block_factor(norm: f64, tau: f64) -> f64 {
    if norm <= tau {
        0.0
    } else {
        1.0 - tau / norm
    }
}

fn shrink_block(block: &mut [f64], tau: f64) {
    let norm = block.iter().map(|x| x * x).sum::<f64>().sqrt();
    let factor = block_factor(norm, tau);
    for x in block {
        *x *= factor;
    }
}

/// The sparse penalty `R(E)`.
pub fn sparse_norm(e: &Tensor3, penalty: Penalty) -> f64 {
    let Dims { n1, n2, .. } = e.dims();
    match penalty {
        Penalty::L1 => e.l1_norm(),
        Penalty::Tube112 => (0..n1)
            .flat_map(|i| (0..n2).map(move |j| (i, j)))
            .map(|(i, j)| e.tube(i, j).iter().map(|x| x * x).sum::<f64>().sqrt())
            .sum(),
        Penalty::Slice21 => (0..n2)
            .map(|j| {
                (0..n1)
                    .flat_map(|i| e.tube(i, j).iter())
                    .map(|x| x * x)
                    .sum::<f64>()
                    .sqrt()
            })
            .sum(),
    }
}

/// Objective value: `‖L‖_* + γ‖E‖₁` for the ℓ1 model and
/// `tnn_zhang(L) + γ·R(E)` for the tube and slice models.
pub fn objective(l: &Tensor3, e: &Tensor3, gamma: f64, penalty: Penalty) -> Result<f64> {
    if l.dims() != e.dims() {
        return Err(Error::shape("objective", format!("{} vs {}", l.dims(), e.dims())));
    }
    let low_rank = match penalty {
        Penalty::L1 => nuclear_norm(l)?,
        Penalty::Tube112 | Penalty::Slice21 => tnn_zhang(l)?,
    };
    Ok(low_rank + gamma * sparse_norm(e, penalty))
}

/// Scaled-dual ADMM with geometric penalty growth.
///
/// Each iteration performs
/// `L ← prox_{‖·‖_*/ρ}(X − E + Y/ρ)`, `E ← prox_{γR/ρ}(X − L + Y/ρ)`,
/// `Y ← Y + ρ(X − L − E)` and `ρ ← min(ρ·rho_scale, rho_max)`, and stops once
/// the relative primal residual drops below `tol`.
pub fn rtpca(x: &Tensor3, cfg: &SolverConfig) -> Result<SolverResult> {
    cfg.validate()?;
    let dims = x.dims();
    let gamma = cfg.resolve_gamma(dims)?;
    let xnorm = x.fro_norm();
    let zeros = || Tensor3::zeros(dims);
    if xnorm == 0.0 {
        return Ok(SolverResult {
            l: zeros(),
            e: zeros(),
            dual: zeros(),
            gamma,
            iterations: 0,
            primal_residual: 0.0,
            objective_trace: Vec::new(),
        });
    }

    let (mut l, mut e, mut y) = (zeros(), zeros(), zeros());
    let mut rho = cfg.rho0;
    let mut trace = Vec::new();
    let mut residual = f64::INFINITY;
    for iter in 1..=cfg.max_iters {
        let mut target = x - &e;
        target.axpy(1.0 / rho, &y);
        let shrunk = svt_spectrum(&dft_mode3(&target), 1.0 / rho)?;
        l = idft_real(&shrunk.spectrum);

        let mut target = x - &l;
        target.axpy(1.0 / rho, &y);
        e = prox_sparse(&target, gamma / rho, cfg.penalty)?;

        let r = &(x - &l) - &e;
        y.axpy(rho, &r);
        residual = r.fro_norm() / xnorm;

        let low_rank = match cfg.penalty {
            Penalty::L1 => shrunk.nuclear,
            Penalty::Tube112 | Penalty::Slice21 => shrunk.zero_frequency_nuclear,
        };
        trace.push(low_rank + gamma * sparse_norm(&e, cfg.penalty));

        if residual <= cfg.tol {
            return Ok(SolverResult {
                l,
                e,
                dual: y,
                gamma,
                iterations: iter,
                primal_residual: residual,
                objective_trace: trace,
            });
        }
        rho = (rho * cfg.rho_scale).min(cfg.rho_max);
    }
    Err(Error::MaxItersExceeded(Box::new(SolverResult {
        l,
        e,
        dual: y,
        gamma,
        iterations: cfg.max_iters,
        primal_residual: residual,
        objective_trace: trace,
    })))
}
