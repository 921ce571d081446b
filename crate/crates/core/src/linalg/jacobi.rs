//! One-sided (Hestenes) Jacobi SVD for complex matrices.

use num_complex::Complex64;

use super::{CMatrix, Svd, ONE, ZERO};
use crate::error::{Error, Result};

/// Thin SVD by one-sided Jacobi rotations.
///
/// Column pairs of a working copy are rotated until every pair is orthogonal
/// to `m·ε` relative accuracy; the column norms are then the singular
/// values. The sweep budget is `30·max(m, n)`.
pub fn jacobi_svd(a: &CMatrix) -> Result<Svd> {
    let (m, n) = (a.rows(), a.cols());
    if m < n {
        let t = jacobi_svd(&a.adjoint())?;
        return Ok(Svd {
            u: t.v,
            s: t.s,
            v: t.u,
        });
    }
    if n == 0 {
        return Ok(Svd {
            u: CMatrix::zeros(m, 0),
            s: Vec::new(),
            v: CMatrix::zeros(n, 0),
        });
    }

    // Column-major working copies: column j of A lives at cols[j*m..(j+1)*m].
    let mut cols = vec![ZERO; m * n];
    for r in 0..m {
        for c in 0..n {
            cols[c * m + r] = a[(r, c)];
        }
    }
    let mut vcols = vec![ZERO; n * n];
    for j in 0..n {
        vcols[j * n + j] = ONE;
    }
    let mut norms: Vec<f64> = (0..n).map(|j| col_norm_sqr(&cols[j * m..(j + 1) * m])).collect();

    let tol = f64::EPSILON * m as f64;
    let max_sweeps = 30 * m.max(n);
    let mut converged = false;
    for _ in 0..max_sweeps {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (alpha, beta) = (norms[p], norms[q]);
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let (head, tail) = cols.split_at_mut(q * m);
                let ap = &mut head[p * m..(p + 1) * m];
                let aq = &mut tail[..m];
                let g: Complex64 = ap.iter().zip(aq.iter()).map(|(x, y)| x.conj() * y).sum();
                let gn = g.norm();
                if gn <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gn);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let phase = g / gn;
                rotate(ap, aq, c, s, phase);
                norms[p] = col_norm_sqr(ap);
                norms[q] = col_norm_sqr(aq);

                let (vhead, vtail) = vcols.split_at_mut(q * n);
                rotate(&mut vhead[p * n..(p + 1) * n], &mut vtail[..n], c, s, phase);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::ConvergenceFailure { op: "jacobi_svd" });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));

    let mut u = CMatrix::zeros(m, n);
    let mut v = CMatrix::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    let scale = norms.iter().cloned().fold(0.0, f64::max).sqrt();
    let mut deficient = Vec::new();
    for (out, &j) in order.iter().enumerate() {
        let sigma = norms[j].sqrt();
        s.push(sigma);
        for r in 0..n {
            v[(r, out)] = vcols[j * n + r];
        }
        if sigma > scale * f64::EPSILON * (m as f64) && sigma > 0.0 {
            for r in 0..m {
                u[(r, out)] = cols[j * m + r] / sigma;
            }
        } else {
            deficient.push(out);
        }
    }
    complete_orthonormal(&mut u, &deficient);
    Ok(Svd { u, s, v })
}

fn col_norm_sqr(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum()
}

fn rotate(x: &mut [Complex64], y: &mut [Complex64], c: f64, s: f64, phase: Complex64) {
    let pc = phase.conj();
    for (a, b) in x.iter_mut().zip(y.iter_mut()) {
        let (xa, yb) = (*a, *b);
        *a = xa * c - yb * pc * s;
        *b = xa * phase * s + yb * c;
    }
}

/// Fills the listed columns of `u` with unit vectors orthogonal to all other
/// columns (modified Gram–Schmidt against coordinate candidates).
fn complete_orthonormal(u: &mut CMatrix, missing: &[usize]) {
    let (m, n) = (u.rows(), u.cols());
    let mut filled: Vec<usize> = (0..n).filter(|j| !missing.contains(j)).collect();
    let mut candidate = 0;
    for &target in missing {
        while candidate < m {
            let mut w: Vec<Complex64> = (0..m)
                .map(|r| if r == candidate { ONE } else { ZERO })
                .collect();
            candidate += 1;
            for _ in 0..2 {
                for &j in &filled {
                    let proj: Complex64 = (0..m).map(|r| u[(r, j)].conj() * w[r]).sum();
                    for (r, wr) in w.iter_mut().enumerate() {
                        *wr -= proj * u[(r, j)];
                    }
                }
            }
            let norm = col_norm_sqr(&w).sqrt();
            if norm > 1e-8 {
                for (r, wr) in w.iter().enumerate() {
                    u[(r, target)] = wr / norm;
                }
                filled.push(target);
                break;
            }
        }
    }
}
