//! Exact recovery on the certified-regime instance.

use std::time::Instant;

use trpca::certify::{certificate_report, gamma_interp, CertifyOptions};
use trpca::experiments::certified_instance;
use trpca::solver::{rtpca, SolverConfig};
use trpca::tangent::support_of;

fn main() -> trpca::Result<()> {
    let start = Instant::now();
    let inst = certified_instance(2024, 20)?;
    println!("instance: inc={:.6} deg_max={} attempts={}", inst.inc, inst.deg_max, inst.attempts);
    let report = certificate_report(&inst.l0, &inst.e0, &CertifyOptions::default())?;
    println!("{report}");
    println!("certify time: {:.1}s", start.elapsed().as_secs_f64());

    let x = &inst.l0 + &inst.e0;
    for p in [0.1, 0.5, 0.9] {
        let gamma = gamma_interp(report.xi_upper, report.mu, p)?;
        let t = Instant::now();
        let res = rtpca(&x, &SolverConfig::default().with_gamma(gamma))?;
        let err_l = res.l.distance(&inst.l0) / inst.l0.fro_norm();
        let same_support = support_of(&res.e, 1e-6) == support_of(&inst.e0, 0.0);
        println!(
            "p={p} gamma={gamma:.6} iters={} residual={:.3e} err_L={err_l:.3e} err_E={:.3e} support={same_support} time={:.1}s",
            res.iterations,
            res.primal_residual,
            res.e.distance(&inst.e0),
            t.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
