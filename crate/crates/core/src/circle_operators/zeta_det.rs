use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use super::CircleOperatorMatrix;
use crate::determinant::{RegularizationModel, ZetaDetResult};
use crate::error::{Error, Result};
use crate::special_fn::hurwitz_zeta_dt;

/// Settings for [`zeta_det_regularized_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZetaDetOptions {
    /// Terms beyond c·j in the model: 1 fits (c, c₀), 2 adds c₁/j, and so on.
    /// Below 4 the unfitted j^{−2} term leaks into c₀, whose error is
    /// multiplied by log N in the tail.
    pub model_order: usize,
    /// Number of zero modes to deflate.
    pub kernel_dim: usize,
    /// Deflated eigenvalues must satisfy |λ| ≤ kernel_tolerance·λ_max.
    pub kernel_tolerance: f64,
    /// Allowed rms fit residual relative to the mean fitted eigenvalue.
    pub fit_tolerance: f64,
    /// Allowed relative Hermitian defect of the matrix.
    pub hermitian_tolerance: f64,
}

impl Default for ZetaDetOptions {
    fn default() -> Self {
        ZetaDetOptions {
            model_order: 4,
            kernel_dim: 0,
            kernel_tolerance: 1e-6,
            fit_tolerance: 1e-4,
            hermitian_tolerance: 1e-6,
        }
    }
}

impl ZetaDetOptions {
    pub fn with_kernel(kernel_dim: usize) -> Self {
        ZetaDetOptions {
            kernel_dim,
            ..Default::default()
        }
    }
}

/// Zeta determinant of a self-adjoint truncated circle operator, no kernel.
pub fn zeta_det_regularized(m: &CircleOperatorMatrix, model_order: usize) -> Result<ZetaDetResult> {
    zeta_det_regularized_with(
        m,
        &ZetaDetOptions {
            model_order,
            ..Default::default()
        },
    )
}

pub fn zeta_det_regularized_with(m: &CircleOperatorMatrix, opts: &ZetaDetOptions) -> Result<ZetaDetResult> {
    let defect = m.hermitian_defect();
    if defect > opts.hermitian_tolerance {
        return Err(Error::domain(format!(
            "operator is not self-adjoint: relative defect {defect:.3e}"
        )));
    }
    zeta_det_from_spectrum(&m.hermitian_eigenvalues(), opts)
}

/// One evaluation of the subtraction scheme.
struct Evaluation {
    log_det: f64,
    zeta_at_0: f64,
    coeffs: Vec<f64>,
    residual: f64,
}

/// Zeta determinant of an operator whose eigenvalues, after deflation, come
/// in pairs λ ≈ c·j + c₀ + c₁/j + … for j = 1, 2, …, possibly preceded by a
/// single unpaired eigenvalue.
///
/// ζ(t) = Σ λ^{−t} over the given eigenvalues plus 2Σ_{j>P} μ_j^{−t} with the
/// fitted model μ_j, continued to t = 0 through Hurwitz zeta functions.
pub fn zeta_det_from_spectrum(eigenvalues: &[f64], opts: &ZetaDetOptions) -> Result<ZetaDetResult> {
    if opts.model_order < 1 {
        return Err(Error::domain("model order must be at least 1"));
    }
    let mut ev: Vec<f64> = eigenvalues.to_vec();
    if ev.iter().any(|x| !x.is_finite()) {
        return Err(Error::domain("spectrum contains non-finite values"));
    }
    ev.sort_by(|a, b| a.total_cmp(b));
    let lmax = ev.last().copied().unwrap_or(0.0).abs().max(1.0);
    for _ in 0..opts.kernel_dim {
        let (i, &z) = ev
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .ok_or_else(|| Error::domain("kernel larger than spectrum"))?;
        if z.abs() > opts.kernel_tolerance * lmax {
            return Err(Error::domain(format!(
                "declared zero mode has eigenvalue {z:.3e}, above {:.1e}·λ_max",
                opts.kernel_tolerance
            )));
        }
        ev.remove(i);
    }
    if let Some(&l) = ev.first() {
        if !(l > 0.0) {
            return Err(Error::domain(format!(
                "non-positive eigenvalue {l:.6e} after deflation"
            )));
        }
    }
    let single = ev.len() % 2;
    let pairs: Vec<f64> = ev[single..].chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect();
    let npairs = pairs.len();
    let start = npairs - npairs / 3;
    let min_points = opts.model_order + 3;
    if npairs - start < min_points {
        return Err(Error::domain(format!(
            "{} eigenvalue pairs are too few for a model of order {}",
            npairs, opts.model_order
        )));
    }

    let main = evaluate(&ev, &pairs, start, opts.model_order)?;
    if main.residual > opts.fit_tolerance {
        return Err(Error::convergence(
            "asymptotic model fit",
            main.residual,
            opts.fit_tolerance,
        ));
    }

    // Error: sensitivity to the fit window and to one more model term.
    let mut err: f64 = 0.0;
    let narrow = npairs - npairs / 6;
    if npairs - narrow >= min_points {
        if let Ok(e) = evaluate(&ev, &pairs, narrow, opts.model_order) {
            err = err.max((e.log_det - main.log_det).abs());
        }
    }
    if npairs - start > min_points {
        if let Ok(e) = evaluate(&ev, &pairs, start, opts.model_order + 1) {
            err = err.max((e.log_det - main.log_det).abs());
        }
    }
    err = err.max(1e-15 * (ev.len() as f64) * main.log_det.abs().max(1.0));

    Ok(ZetaDetResult {
        log_det: main.log_det,
        zeta_at_0: main.zeta_at_0,
        model: RegularizationModel::AsymptoticSubtraction {
            c: main.coeffs[0],
            c0: main.coeffs[1],
            c1: main.coeffs.get(2).copied().unwrap_or(0.0),
            higher: main.coeffs.iter().skip(3).copied().collect(),
            model_order: opts.model_order,
            fit_residual: main.residual,
            kernel_dim: opts.kernel_dim,
            eigenvalues_used: ev.len(),
        },
        error_estimate: err,
    })
}

/// Least-squares fit of μ_j = c·j + Σ_{m=0}^{order−1} c_m j^{−m} over pairs
/// j = start+1..=P, then the finite sum plus continued tail.
fn evaluate(ev: &[f64], pairs: &[f64], start: usize, order: usize) -> Result<Evaluation> {
    let p = pairs.len();
    let big_j = p as f64;
    let rows = p - start;
    let cols = order + 1;
    // Columns scaled by J to keep the design matrix well conditioned.
    let design = DMatrix::from_fn(rows, cols, |r, col| {
        let j = (start + r + 1) as f64;
        if col == 0 {
            j / big_j
        } else {
            (big_j / j).powi(col as i32 - 1)
        }
    });
    let rhs = DVector::from_fn(rows, |r, _| pairs[start + r]);
    let svd = design.clone().svd(true, true);
    let sol = svd
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::Singular(format!("model fit: {e}")))?;
    let resid = &design * &sol - &rhs;
    let mean = rhs.mean();
    let residual = (resid.norm_squared() / rows as f64).sqrt() / mean.abs().max(1e-300);
    let coeffs: Vec<f64> = (0..cols)
        .map(|col| {
            if col == 0 {
                sol[0] / big_j
            } else {
                sol[col] * big_j.powi(col as i32 - 1)
            }
        })
        .collect();

    let c = coeffs[0];
    if !(c > 0.0) {
        return Err(Error::domain(format!("fitted leading coefficient {c} is not positive")));
    }
    let a = coeffs[1] / c;
    let x0 = p as f64 + 1.0 + a;
    if !(x0 > 0.0) {
        return Err(Error::domain("fitted model is not positive beyond the spectrum"));
    }
    // μ_j = c(j + a)(1 + r_j), r_j = Σ_{m≥1} (c_m/c) j^{−m}/(j + a).
    let r = |j: f64| -> f64 {
        let s: f64 = coeffs[2..]
            .iter()
            .enumerate()
            .map(|(i, cm)| cm / c * j.powi(-(i as i32 + 1)))
            .sum();
        s / (j + a)
    };
    let mut log_sum = 0.0;
    let last = p + 100_000;
    for j in (p + 1)..=last {
        let rj = r(j as f64);
        if rj <= -1.0 {
            return Err(Error::domain("fitted model changes sign in the tail"));
        }
        log_sum += rj.ln_1p();
    }
    if cols > 2 {
        // Σ_{j>J} r_j ≈ b₁/(J + ½) + b₂/(2(J + ½)²), b₁ = c₁/c, b₂ = (c₂ − a c₁)/c.
        let x = last as f64 + 0.5;
        let b1 = coeffs[2] / c;
        let b2 = (coeffs.get(3).copied().unwrap_or(0.0) - a * coeffs[2]) / c;
        log_sum += b1 / x + b2 / (2.0 * x * x);
    }
    let hz0 = 0.5 - x0;
    let hz0_dt = hurwitz_zeta_dt(Complex64::new(0.0, 0.0), x0)?.re;
    let tail_zeta0 = 2.0 * hz0;
    let tail_dzeta0 = 2.0 * (-c.ln() * hz0 + hz0_dt - log_sum);

    let fin_log: f64 = ev.iter().map(|l| l.ln()).sum();
    Ok(Evaluation {
        log_det: fin_log - tail_dzeta0,
        zeta_at_0: ev.len() as f64 + tail_zeta0,
        coeffs,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle_operators::det_star_abs_nu;

    fn diag<F: Fn(f64) -> f64>(n: usize, f: F) -> CircleOperatorMatrix {
        CircleOperatorMatrix::diagonal(n, |k| Complex64::new(f(k.unsigned_abs() as f64), 0.0))
    }

    #[test]
    fn abs_nu_reproduces_closed_form() {
        let r = zeta_det_regularized_with(&diag(200, |k| k), &ZetaDetOptions::with_kernel(1)).unwrap();
        assert!((r.det() - det_star_abs_nu()).abs() < 1e-6 * det_star_abs_nu(), "{r:?}");
        assert!((r.zeta_at_0 + 1.0).abs() < 1e-8, "{r:?}");
    }

    #[test]
    fn rescaling_law() {
        let one = zeta_det_regularized_with(&diag(100, |k| k), &ZetaDetOptions::with_kernel(1)).unwrap();
        let two = zeta_det_regularized_with(&diag(100, |k| 2.0 * k), &ZetaDetOptions::with_kernel(1)).unwrap();
        assert!((two.zeta_at_0 + 1.0).abs() < 1e-8);
        assert!((two.log_det - one.rescaled(2.0).log_det).abs() < 1e-9);
        assert!((two.det() / std::f64::consts::PI - 1.0).abs() < 1e-6);
    }

    #[test]
    fn self_convergence() {
        let f = |k: f64| k + 1.0 / (k + 1.0);
        let opts = ZetaDetOptions::with_kernel(1);
        let a = zeta_det_from_spectrum(&diag(100, f).hermitian_eigenvalues()[..], &opts);
        // the k = 0 mode has eigenvalue 1: nothing to deflate
        assert!(a.is_err());
        let opts = ZetaDetOptions::default();
        let a = zeta_det_regularized_with(&diag(200, f), &opts).unwrap();
        let b = zeta_det_regularized_with(&diag(400, f), &opts).unwrap();
        assert!((a.log_det - b.log_det).abs() < 1e-6, "{} vs {}", a.log_det, b.log_det);
        assert!(b.error_estimate <= a.error_estimate);
    }

    #[test]
    fn rejects_negative() {
        let m = diag(20, |k| k - 0.5);
        assert!(zeta_det_regularized(&m, 2).is_err());
    }
}
