//! Gluing formulas for a flat torus cut along a small circle: the disk
//! determinant, the exterior Dirichlet-to-Neumann operator, the limit of
//! det*(N₁ + N₂)/length, the small-ε law for det(Δ, X∖B(ε)), and the exact
//! constant bookkeeping for the symmetric double.

mod constants;
mod dtn;

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::circle_operators::{
    multiplier_abs_nu, zeta_det_regularized_with, CircleOperatorMatrix, FourierMultiplier, ZetaDetOptions,
};
use crate::determinant::ZetaDetResult;
use crate::error::{Error, Result};
use crate::flat_torus::{torus_det_formula, TorusGeometry};
use crate::special_fn::zeta_constants;

pub use constants::{section33_constant_algebra, ConstantAtom, ConstantBase, ConstantLedger, Section33Report};
pub use dtn::{DtnOptions, ExteriorSolver};

/// A flat torus with the disk |z − center| < ε removed.
///
/// Distances are in the flat coordinate in which Δ = −4∂∂̄.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurgeryScene {
    pub surface: TorusGeometry,
    pub excision_center: Complex64,
    pub eps: f64,
}

impl SurgeryScene {
    pub fn new(surface: TorusGeometry, excision_center: Complex64, eps: f64) -> Result<Self> {
        let scene = SurgeryScene {
            surface,
            excision_center,
            eps,
        };
        let inj = scene.injectivity_radius();
        if !(eps > 0.0 && eps < inj) {
            return Err(Error::domain(format!(
                "ε = {eps} must lie in (0, {inj}), the injectivity radius of the torus"
            )));
        }
        Ok(scene)
    }

    /// Half the length of the shortest nonzero period.
    pub fn injectivity_radius(&self) -> f64 {
        0.5 * shortest_period(self.surface.period_a(), self.surface.period_b())
    }

    pub fn with_eps(&self, eps: f64) -> Result<Self> {
        SurgeryScene::new(self.surface, self.excision_center, eps)
    }

    pub fn boundary_length(&self) -> f64 {
        2.0 * PI * self.eps
    }
}

/// Length of the shortest nonzero lattice vector, by Gauss reduction.
fn shortest_period(a: Complex64, b: Complex64) -> f64 {
    let (mut u, mut v) = (a, b);
    loop {
        if v.norm() < u.norm() {
            std::mem::swap(&mut u, &mut v);
        }
        let m = (v / u).re.round();
        if m == 0.0 {
            return u.norm();
        }
        v -= u * m;
    }
}

/// det*Δ of the torus for Δ = −4∂∂̄, the normalization of the gluing formulas.
/// It is 4^{ζ(0)} = 1/4 times the value for −∂∂̄.
pub fn torus_det_standard(t: &TorusGeometry) -> f64 {
    torus_det_formula(t) / 4.0
}

/// det(Δ, B(ε)) = 2^{−1/6} π^{−1/2} ε^{−1/3} e^{−2ζ′(−1) − 5/12} (Dirichlet).
pub fn disk_det(eps: f64) -> Result<f64> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::domain(format!("radius {eps} must be positive")));
    }
    let zp = zeta_constants().zeta_prime_at_minus1;
    Ok(2f64.powf(-1.0 / 6.0) * PI.powf(-0.5) * eps.powf(-1.0 / 3.0) * (-2.0 * zp - 5.0 / 12.0).exp())
}

/// 2^{7/6} √π e^{2ζ′(−1) + 5/12}.
pub fn corollary1_constant() -> f64 {
    let zp = zeta_constants().zeta_prime_at_minus1;
    2f64.powf(7.0 / 6.0) * PI.sqrt() * (2.0 * zp + 5.0 / 12.0).exp()
}

/// Truncation schedule for exterior DtN matrices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationSchedule {
    pub initial: usize,
    pub max: usize,
    /// Doubling stops once log det* changes by less than this.
    pub tolerance: f64,
}

impl Default for TruncationSchedule {
    fn default() -> Self {
        TruncationSchedule {
            initial: 64,
            max: 256,
            tolerance: 1e-4,
        }
    }
}

/// N_ε on |z − c| = ε, with the normal pointing out of X∖B(ε).
pub fn dtn_exterior_torus(scene: &SurgeryScene, trunc: usize) -> Result<CircleOperatorMatrix> {
    let s = ExteriorSolver::new(scene, trunc, &DtnOptions::default())?;
    Ok(s.scaled_dtn().scale(1.0 / scene.eps))
}

/// N₂ = |ν|/ε on the boundary of B(ε), outward normal.
pub fn dtn_interior_disk(eps: f64) -> Result<FourierMultiplier> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::domain(format!("radius {eps} must be positive")));
    }
    let abs_nu = multiplier_abs_nu();
    FourierMultiplier::new(
        move |k| abs_nu.alpha(k) / eps,
        crate::circle_operators::GrowthBound::Polynomial {
            constant: 1.0 / eps,
            order: 1.0,
        },
    )
}

/// Regularized det* of N₁ + N₂ at one ε.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GluedDtnDet {
    pub eps: f64,
    pub trunc: usize,
    /// det* of ε(N₁ + N₂).
    pub scaled: ZetaDetResult,
    /// det* of N₁ + N₂, from the rescaling law.
    pub det_star: f64,
    pub solve_residual: f64,
}

fn glued_det_at(scene: &SurgeryScene, trunc: usize) -> Result<GluedDtnDet> {
    let solver = ExteriorSolver::new(scene, trunc, &DtnOptions::default())?;
    let sum = solver.scaled_dtn().add(&multiplier_abs_nu().to_matrix(trunc))?;
    let scaled = zeta_det_regularized_with(&sum, &ZetaDetOptions::with_kernel(1))?;
    let det_star = scaled.rescaled(1.0 / scene.eps).det();
    Ok(GluedDtnDet {
        eps: scene.eps,
        trunc,
        scaled,
        det_star,
        solve_residual: solver.residual(),
    })
}

/// det*(N₁ + N₂), doubling the truncation until log det* settles.
pub fn glued_dtn_det(scene: &SurgeryScene, schedule: &TruncationSchedule) -> Result<GluedDtnDet> {
    let mut n = schedule.initial;
    let mut prev = glued_det_at(scene, n)?;
    let mut change = f64::INFINITY;
    while n < schedule.max {
        n *= 2;
        let cur = glued_det_at(scene, n)?;
        change = (cur.scaled.log_det - prev.scaled.log_det).abs();
        prev = cur;
        if change < schedule.tolerance {
            return Ok(prev);
        }
    }
    Err(Error::convergence(
        "DtN truncation doubling",
        change,
        schedule.tolerance,
    ))
}

/// One point of the det*(N₁ + N₂)/length sequence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prop3Row {
    pub eps: f64,
    pub trunc: usize,
    pub det_star: f64,
    pub length: f64,
    pub ratio: f64,
    pub zeta_at_0: f64,
    pub error_estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prop3Report {
    pub rows: Vec<Prop3Row>,
    /// Intercept of a polynomial fit of the ratio in ε.
    pub extrapolated_limit: f64,
}

/// Least-squares polynomial fit y ≈ Σ_{m<deg+1} p_m x^m; returns p.
fn poly_fit(x: &[f64], y: &[f64], degree: usize) -> Result<Vec<f64>> {
    let cols = degree + 1;
    if x.len() < cols {
        return Err(Error::domain(format!("{} points cannot fit degree {degree}", x.len())));
    }
    let a = DMatrix::from_fn(x.len(), cols, |r, c| x[r].powi(c as i32));
    let b = DVector::from_column_slice(y);
    let sol = a
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| Error::Singular(format!("polynomial fit: {e}")))?;
    Ok(sol.iter().copied().collect())
}

/// Slope of log y against log x by least squares.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    Ok(poly_fit(&lx, &ly, 1)?[1])
}

/// det*(N₁ + N₂)/(2πε) over a sweep of ε, with its ε → 0 extrapolation.
pub fn prop3_limit(scene: &SurgeryScene, eps_sweep: &[f64], schedule: &TruncationSchedule) -> Result<Prop3Report> {
    let rows = eps_sweep
        .iter()
        .map(|&eps| {
            let sc = scene.with_eps(eps)?;
            let g = glued_dtn_det(&sc, schedule)?;
            let length = sc.boundary_length();
            Ok(Prop3Row {
                eps,
                trunc: g.trunc,
                det_star: g.det_star,
                length,
                ratio: g.det_star / length,
                zeta_at_0: g.scaled.zeta_at_0,
                error_estimate: g.scaled.error_estimate,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let x: Vec<f64> = rows.iter().map(|r| r.eps).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    let degree = if rows.len() >= 4 {
        2
    } else {
        rows.len().saturating_sub(1).min(1)
    };
    let extrapolated_limit = poly_fit(&x, &y, degree)?[0];
    Ok(Prop3Report {
        rows,
        extrapolated_limit,
    })
}

/// det*Δ = Area/length · det(Δ, X₁) det(Δ, X₂) det*(N₁ + N₂).
pub fn bfk_assemble(det1: f64, det2: f64, det_dtn_star: f64, area: f64, length: f64) -> Result<f64> {
    for (name, v) in [
        ("det1", det1),
        ("det2", det2),
        ("det_dtn_star", det_dtn_star),
        ("area", area),
        ("length", length),
    ] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::domain(format!("{name} = {v} must be positive")));
        }
    }
    Ok(area / length * det1 * det2 * det_dtn_star)
}

/// det(Δ, X∖B(ε)) from the gluing formula, and its ratio to the small-ε law.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Corollary1Row {
    pub eps: f64,
    pub det_exterior: f64,
    pub predicted: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Corollary1Report {
    pub rows: Vec<Corollary1Row>,
    /// Fitted slope of log det(Δ, X∖B(ε)) against log ε.
    pub slope: f64,
}

/// det(Δ, X∖B(ε)) = det*Δ·length/(Area·det(Δ, B(ε))·det*(N₁ + N₂)), compared
/// with 2^{7/6}√π e^{2ζ′(−1)+5/12} det*Δ/Area · ε^{1/3}.
pub fn corollary1_ratio(
    scene: &SurgeryScene,
    eps_sweep: &[f64],
    schedule: &TruncationSchedule,
) -> Result<Corollary1Report> {
    let t = scene.surface;
    let det_t = torus_det_standard(&t);
    let area = t.area();
    let rows = eps_sweep
        .iter()
        .map(|&eps| {
            let sc = scene.with_eps(eps)?;
            let g = glued_dtn_det(&sc, schedule)?;
            let det_exterior = det_t * sc.boundary_length() / (area * disk_det(eps)? * g.det_star);
            let predicted = corollary1_constant() * det_t / area * eps.powf(1.0 / 3.0);
            Ok(Corollary1Row {
                eps,
                det_exterior,
                predicted,
                ratio: det_exterior / predicted,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let x: Vec<f64> = rows.iter().map(|r| r.eps).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.det_exterior).collect();
    let slope = if rows.len() >= 2 {
        log_log_slope(&x, &y)?
    } else {
        f64::NAN
    };
    Ok(Corollary1Report { rows, slope })
}
