use serde::Serialize;

/// How a zeta-regularized determinant was obtained.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegularizationModel {
    /// Theta-split (incomplete gamma) evaluation of a lattice spectrum.
    LatticeThetaSplit { split_parameter: f64, lattice_terms: usize },
    /// Subtraction of the model λ_j ≈ c·j + c₀ + c₁/j + c₂/j² + … over pair
    /// index j; `higher` holds c₂, c₃, … when model_order exceeds 2.
    AsymptoticSubtraction {
        c: f64,
        c0: f64,
        c1: f64,
        higher: Vec<f64>,
        model_order: usize,
        fit_residual: f64,
        kernel_dim: usize,
        eigenvalues_used: usize,
    },
    /// Closed-form evaluation, no truncation involved.
    ClosedForm,
}

/// A zeta-regularized determinant log det = −ζ′(0) together with ζ(0).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZetaDetResult {
    pub log_det: f64,
    pub zeta_at_0: f64,
    pub model: RegularizationModel,
    pub error_estimate: f64,
}

impl ZetaDetResult {
    pub fn det(&self) -> f64 {
        self.log_det.exp()
    }

    /// Error estimate carried over to det = e^{log_det}.
    pub fn det_error(&self) -> f64 {
        self.det() * self.error_estimate.exp_m1()
    }

    /// Determinant of c·A from that of A: log det(cA) = log det A + ζ(0) log c.
    pub fn rescaled(&self, c: f64) -> ZetaDetResult {
        ZetaDetResult {
            log_det: self.log_det + self.zeta_at_0 * c.ln(),
            ..self.clone()
        }
    }
}
