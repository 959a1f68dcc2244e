//! The four model determinants on the unit disk with a radial slit and the
//! assembly of κ₀ and δ_g from them.

mod dtn;
mod laplacian;

pub use dtn::{slit_dtn, slit_dtn_with, SlitLayerOptions};
pub use laplacian::{
    fv_spectrum, heat_split_log_det, slit_laplacian_det_estimate, slit_laplacian_log_det, LaplacianDomain,
    LaplacianOptions, LogDetEstimate,
};

use serde::Serialize;

use crate::circle_operators::{multiplier_abs_nu, zeta_det_regularized_with, ZetaDetOptions};
use crate::determinant::ZetaDetResult;
use crate::error::{Error, Result};
use crate::special_fn::zeta_constants;
use crate::tau_calculus::delta_g;

/// Boundary condition on the slit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SlitBc {
    Dirichlet,
    Neumann,
}

/// Unit disk minus the segment [0, slit_ratio] on the positive real axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlitDomainSpec {
    slit_ratio: f64,
    bc_slit: SlitBc,
}

impl SlitDomainSpec {
    pub fn new(slit_ratio: f64, bc_slit: SlitBc) -> Result<Self> {
        if !(slit_ratio > 0.0 && slit_ratio < 1.0) {
            return Err(Error::domain(format!("slit ratio {slit_ratio} must lie in (0, 1)")));
        }
        Ok(SlitDomainSpec { slit_ratio, bc_slit })
    }

    pub fn slit_ratio(&self) -> f64 {
        self.slit_ratio
    }

    pub fn bc_slit(&self) -> SlitBc {
        self.bc_slit
    }

    pub fn with_bc(&self, bc_slit: SlitBc) -> Self {
        SlitDomainSpec { bc_slit, ..*self }
    }
}

/// ζ-regularized det(|ν| + N₁^{int,bc}); the Neumann operator has the
/// constants as kernel, which is deflated.
pub fn det_nu_plus_slit_dtn(spec: &SlitDomainSpec, trunc: usize) -> Result<ZetaDetResult> {
    let m = slit_dtn(spec, trunc)?;
    let sum = multiplier_abs_nu().to_matrix(trunc).add(&m)?;
    let opts = match spec.bc_slit() {
        SlitBc::Dirichlet => ZetaDetOptions::default(),
        SlitBc::Neumann => ZetaDetOptions::with_kernel(1),
    };
    zeta_det_regularized_with(&sum, &opts)
}

/// 2^{1/3} e^{4ζ′(−1) + 5/6}.
pub fn kappa0_prefactor() -> f64 {
    let zp = zeta_constants().zeta_prime_at_minus1;
    2f64.powf(1.0 / 3.0) * (4.0 * zp + 5.0 / 6.0).exp()
}

/// Settings of the κ₀ estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KappaOptions {
    pub slit_ratio: f64,
    /// Fourier truncation of the slit DtN operators.
    pub trunc: usize,
    pub laplacian: LaplacianOptions,
}

impl Default for KappaOptions {
    fn default() -> Self {
        KappaOptions {
            slit_ratio: 0.5,
            trunc: 128,
            laplacian: LaplacianOptions::default(),
        }
    }
}

/// A value with a one-sigma-style error bar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    /// Whether two estimates agree within their combined bars.
    pub fn agrees_with(&self, other: &Estimate) -> bool {
        (self.value - other.value).abs() <= self.error + other.error
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KappaReport {
    pub slit_ratio: f64,
    pub det_nu_plus_nd: ZetaDetResult,
    pub det_star_nu_plus_nn: ZetaDetResult,
    pub det_lap_d: LogDetEstimate,
    pub det_lap_dn: LogDetEstimate,
    pub prefactor: f64,
    pub kappa0: Estimate,
    /// (g, δ_g, error) for g = 2..=6.
    pub delta_g: Vec<(u32, f64, f64)>,
    pub low_confidence: bool,
}

/// κ₀ = 2^{1/3}e^{4ζ′(−1)+5/6} det(|ν|+N^D) det(Δ_D) det*(|ν|+N^N) det(Δ_{D,N}).
pub fn kappa0_estimate(opts: &KappaOptions) -> Result<KappaReport> {
    let d = SlitDomainSpec::new(opts.slit_ratio, SlitBc::Dirichlet)?;
    let n = d.with_bc(SlitBc::Neumann);
    let (dtn_d, dtn_n) = rayon::join(
        || det_nu_plus_slit_dtn(&d, opts.trunc),
        || det_nu_plus_slit_dtn(&n, opts.trunc),
    );
    let (dtn_d, dtn_n) = (dtn_d?, dtn_n?);
    let (lap_d, lap_n) = rayon::join(
        || slit_laplacian_log_det(&LaplacianDomain::Slit(d), &opts.laplacian),
        || slit_laplacian_log_det(&LaplacianDomain::Slit(n), &opts.laplacian),
    );
    let (lap_d, lap_n) = (lap_d?, lap_n?);
    let prefactor = kappa0_prefactor();
    let log_kappa = prefactor.ln() + dtn_d.log_det + dtn_n.log_det + lap_d.log_det + lap_n.log_det;
    // First-order propagation: log-errors add.
    let log_err = dtn_d.error_estimate + dtn_n.error_estimate + lap_d.error + lap_n.error;
    let kappa = log_kappa.exp();
    let kappa0 = Estimate {
        value: kappa,
        error: kappa * log_err,
    };
    let mut deltas = Vec::new();
    for g in 2..=6u32 {
        let v = delta_g(g, kappa)?;
        // δ_g ∝ κ₀^{g−1}
        deltas.push((g, v, v * (g - 1) as f64 * log_err));
    }
    Ok(KappaReport {
        slit_ratio: opts.slit_ratio,
        low_confidence: lap_d.low_confidence || lap_n.low_confidence,
        det_nu_plus_nd: dtn_d,
        det_star_nu_plus_nn: dtn_n,
        det_lap_d: lap_d,
        det_lap_dn: lap_n,
        prefactor,
        kappa0,
        delta_g: deltas,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_validation() {
        assert!(SlitDomainSpec::new(0.0, SlitBc::Dirichlet).is_err());
        assert!(SlitDomainSpec::new(1.0, SlitBc::Neumann).is_err());
        assert!(SlitDomainSpec::new(0.5, SlitBc::Neumann).is_ok());
    }

    #[test]
    fn kernel_accounting() {
        let d = SlitDomainSpec::new(0.5, SlitBc::Dirichlet).unwrap();
        let rd = det_nu_plus_slit_dtn(&d, 64).unwrap();
        let rn = det_nu_plus_slit_dtn(&d.with_bc(SlitBc::Neumann), 64).unwrap();
        assert!(rd.zeta_at_0.abs() < 1e-6, "{}", rd.zeta_at_0);
        assert!((rn.zeta_at_0 + 1.0).abs() < 1e-6, "{}", rn.zeta_at_0);
    }

    #[test]
    fn prefactor_value() {
        let zp: f64 = -0.165_421_143_700_450_9;
        let expect = 2f64.powf(1.0 / 3.0) * (4.0 * zp + 5.0 / 6.0).exp();
        assert!((kappa0_prefactor() - expect).abs() < 1e-12);
    }
}
