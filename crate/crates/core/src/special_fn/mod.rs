//! Special functions used throughout the crate: Dedekind eta, Jacobi theta,
//! multidimensional Riemann theta, Hurwitz and Epstein zeta, and the Riemann
//! zeta constants at 0 and −1.
//!
//! Every truncated series reports a tail bound through [`Truncated`].

mod epstein;
mod eta;
mod expint;
mod theta;
mod zeta;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub use epstein::{epstein_zeta_det, epstein_zeta_det_with, LaplacianNormalization};
pub use eta::{dedekind_eta, eta, jacobi_theta1, theta1_derivatives, theta1_log_derivatives, Theta1Derivs};
pub use expint::exp_integral_e1;
pub use theta::{riemann_theta, riemann_theta_hessian_log};
pub use zeta::{
    bernoulli_numbers, hurwitz_zeta, hurwitz_zeta_dt, riemann_zeta_prime_minus1, zeta_constants, ZetaConstants,
};

/// Torus modulus σ = B/A, restricted to the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModulusPoint(Complex64);

impl ModulusPoint {
    pub fn new(sigma: Complex64) -> Result<Self> {
        if !(sigma.im > 0.0) || !sigma.re.is_finite() || !sigma.im.is_finite() {
            return Err(Error::domain(format!("modulus {sigma} is not in the upper half-plane")));
        }
        Ok(ModulusPoint(sigma))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }

    /// Nome q = e^{iπσ}.
    pub fn nome(self) -> Complex64 {
        (Complex64::i() * std::f64::consts::PI * self.0).exp()
    }
}

/// Symmetric g×g matrix with positive-definite imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodMatrix {
    entries: DMatrix<Complex64>,
}

impl PeriodMatrix {
    const SYMMETRY_TOL: f64 = 1e-12;

    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        let g = entries.nrows();
        if g == 0 || entries.ncols() != g {
            return Err(Error::DimensionMismatch {
                expected: g.max(1),
                got: entries.ncols(),
            });
        }
        let scale = entries.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for i in 0..g {
            for j in 0..i {
                if (entries[(i, j)] - entries[(j, i)]).norm() > Self::SYMMETRY_TOL * scale {
                    return Err(Error::domain("period matrix is not symmetric"));
                }
            }
        }
        let im = entries.map(|z| z.im);
        let im = (&im + im.transpose()) * 0.5;
        let min_eig = im.symmetric_eigenvalues().min();
        if !(min_eig > 0.0) {
            return Err(Error::domain(format!(
                "imaginary part of period matrix is not positive definite (min eigenvalue {min_eig:e})"
            )));
        }
        Ok(PeriodMatrix { entries })
    }

    pub fn from_modulus(sigma: ModulusPoint) -> Self {
        PeriodMatrix {
            entries: DMatrix::from_element(1, 1, sigma.value()),
        }
    }

    /// Block-diagonal matrix diag(a, b).
    pub fn block_diagonal(a: &PeriodMatrix, b: &PeriodMatrix) -> Self {
        let (ga, gb) = (a.dim(), b.dim());
        let mut m = DMatrix::zeros(ga + gb, ga + gb);
        m.view_mut((0, 0), (ga, ga)).copy_from(&a.entries);
        m.view_mut((ga, ga), (gb, gb)).copy_from(&b.entries);
        PeriodMatrix { entries: m }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn imag(&self) -> DMatrix<f64> {
        self.entries.map(|z| z.im)
    }
}

/// Stopping rule for lattice and q-series sums.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationPolicy {
    /// Hard cap on the summation radius (lattice units, or number of factors
    /// for one-dimensional products).
    pub max_lattice_radius: f64,
    /// Summation stops once the certified tail bound drops below this value
    /// (relative to the partial sum).
    pub tail_tolerance: f64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            max_lattice_radius: 400.0,
            tail_tolerance: 1e-17,
        }
    }
}

impl TruncationPolicy {
    pub fn with_tolerance(tail_tolerance: f64) -> Self {
        TruncationPolicy {
            tail_tolerance,
            ..Default::default()
        }
    }
}

/// A truncated sum together with a bound on the neglected tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Truncated<T> {
    pub value: T,
    pub tail_bound: f64,
    pub terms: usize,
}
