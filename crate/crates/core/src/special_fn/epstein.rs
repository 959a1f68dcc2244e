use std::f64::consts::PI;

use num_complex::Complex64;

use super::expint::exp_integral_e1;
use super::TruncationPolicy;
use crate::determinant::{RegularizationModel, ZetaDetResult};
use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Which flat Laplacian the determinant refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize)]
pub enum LaplacianNormalization {
    /// Δ = −∂_z∂_z̄, eigenvalues π²|mB − nA|²/Area². The normalization under
    /// which det Δ = 4 Im(B/A) Area |η(B/A)|⁴.
    #[default]
    DzDzbar,
    /// Δ = −(∂²_x + ∂²_y) = −4∂_z∂_z̄, eigenvalues 4π²|mB − nA|²/Area².
    Standard,
}

impl LaplacianNormalization {
    /// Factor multiplying the standard eigenvalues.
    fn scale(self) -> f64 {
        match self {
            LaplacianNormalization::DzDzbar => 0.25,
            LaplacianNormalization::Standard => 1.0,
        }
    }
}

/// log det of the flat torus Laplacian ℂ/(ℤA + ℤB), zero mode removed.
pub fn epstein_zeta_det(a: Complex64, b: Complex64) -> Result<ZetaDetResult> {
    epstein_zeta_det_with(a, b, LaplacianNormalization::default(), &TruncationPolicy::default())
}

/// Theta-split evaluation. With Q_ℓ = π|ℓ|²/Area over the period lattice and
/// split parameter T = Area/4π for the standard spectrum,
///
///   ζ′(0) = Σ′_ℓ [E₁(Q_ℓ) + e^{−Q_ℓ}/Q_ℓ] − 1 − log T − γ,   ζ(0) = −1.
///
/// The dual-lattice sum and the Poisson-dual sum then run over the same
/// values Q_ℓ.
pub fn epstein_zeta_det_with(
    a: Complex64,
    b: Complex64,
    norm: LaplacianNormalization,
    policy: &TruncationPolicy,
) -> Result<ZetaDetResult> {
    let area = (a.conj() * b).im;
    let scale = a.norm().max(b.norm());
    if !(area.abs() > 1e-14 * scale * scale) || !area.is_finite() {
        return Err(Error::domain("periods are collinear over ℝ"));
    }
    let area = area.abs();
    // Each term is bounded by 2e^{−Q}/Q, so Q ≤ q_max is enough once the
    // lattice-point-weighted tail drops below tolerance.
    let diam = (a + b).norm().max((a - b).norm());
    let count_upto = |q: f64| {
        let r = (q * area / PI).sqrt() + diam;
        PI * r * r / area
    };
    let tail_after = |q: f64| {
        let mut t = 0.0;
        let mut k = 0.0;
        loop {
            let qk = q + k;
            let add = count_upto(qk + 1.0) * 2.0 * (-qk).exp() / qk;
            t += add;
            if add < 1e-40 || k > 200.0 {
                break t;
            }
            k += 1.0;
        }
    };
    let mut q_max = 10.0;
    while tail_after(q_max) > policy.tail_tolerance && q_max < 700.0 {
        q_max += 1.0;
    }
    let tail = tail_after(q_max);

    let radius = (q_max * area / PI).sqrt();
    let n_max = (radius * a.norm() / area).ceil() as i64 + 1;
    let m_max = (radius * b.norm() / area).ceil() as i64 + 1;
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut terms = 0;
    for m in -m_max..=m_max {
        for n in -n_max..=n_max {
            if m == 0 && n == 0 {
                continue;
            }
            let l = a * m as f64 + b * n as f64;
            let q = PI * l.norm_sqr() / area;
            if q > q_max {
                continue;
            }
            // Kahan summation: many small terms after a few large ones.
            let y = exp_integral_e1(q) + (-q).exp() / q - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
            terms += 1;
        }
    }
    let split = area / (4.0 * PI);
    let zeta_prime_std = sum - 1.0 - split.ln() - EULER_GAMMA;
    let zeta0 = -1.0;
    // ζ_{cΔ}′(0) = ζ′(0) − ζ(0) log c
    let zeta_prime = zeta_prime_std - zeta0 * norm.scale().ln();
    Ok(ZetaDetResult {
        log_det: -zeta_prime,
        zeta_at_0: zeta0,
        model: RegularizationModel::LatticeThetaSplit {
            split_parameter: split,
            lattice_terms: terms,
        },
        error_estimate: tail + 1e-15 * (terms as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::super::{eta, ModulusPoint};
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn square_torus_matches_eta() {
        let r = epstein_zeta_det(c(1.0, 0.0), c(0.0, 1.0)).unwrap();
        let e = eta(ModulusPoint::new(c(0.0, 1.0)).unwrap()).norm();
        let expected = 4.0 * e.powi(4);
        assert!((r.det() - expected).abs() < 1e-12 * expected);
        assert!((r.det() - 1.393_203_929_7).abs() < 1e-9);
    }

    #[test]
    fn normalizations_differ_by_four() {
        let (a, b) = (c(1.3, 0.2), c(0.4, 0.9));
        let p = TruncationPolicy::default();
        let d = epstein_zeta_det_with(a, b, LaplacianNormalization::DzDzbar, &p).unwrap();
        let s = epstein_zeta_det_with(a, b, LaplacianNormalization::Standard, &p).unwrap();
        assert!((d.det() / s.det() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn collinear_periods_rejected() {
        assert!(epstein_zeta_det(c(1.0, 1.0), c(2.0, 2.0)).is_err());
    }

    #[test]
    fn orientation_does_not_matter() {
        let (a, b) = (c(1.0, 0.1), c(0.3, 1.2));
        let x = epstein_zeta_det(a, b).unwrap().log_det;
        let y = epstein_zeta_det(b, a).unwrap().log_det;
        assert!((x - y).abs() < 1e-13);
    }
}
