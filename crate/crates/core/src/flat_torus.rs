//! Flat tori ℂ/(ℤA + ℤB): the closed-form determinant, its spectral oracle,
//! and the mean-zero Green function.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::determinant::ZetaDetResult;
use crate::error::{Error, Result};
use crate::special_fn::{
    epstein_zeta_det_with, eta, jacobi_theta1, theta1_derivatives, theta1_log_derivatives, LaplacianNormalization,
    ModulusPoint, TruncationPolicy,
};

/// Flat torus with periods A, B and Im(B/A) > 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TorusGeometry {
    period_a: Complex64,
    period_b: Complex64,
}

impl TorusGeometry {
    pub fn new(period_a: Complex64, period_b: Complex64) -> Result<Self> {
        let area = (period_a.conj() * period_b).im;
        if !(area > 0.0) || !area.is_finite() {
            return Err(Error::domain(format!(
                "periods ({period_a}, {period_b}) do not span a positively oriented lattice"
            )));
        }
        Ok(TorusGeometry { period_a, period_b })
    }

    /// Torus with A = 1, B = σ.
    pub fn from_modulus(sigma: ModulusPoint) -> Self {
        TorusGeometry {
            period_a: Complex64::new(1.0, 0.0),
            period_b: sigma.value(),
        }
    }

    pub fn period_a(&self) -> Complex64 {
        self.period_a
    }

    pub fn period_b(&self) -> Complex64 {
        self.period_b
    }

    pub fn modulus(&self) -> ModulusPoint {
        ModulusPoint::new(self.period_b / self.period_a).expect("validated orientation")
    }

    pub fn area(&self) -> f64 {
        (self.period_a.conj() * self.period_b).im
    }

    /// Eigenvalue of −4∂∂̄ attached to the dual-lattice point (m, n):
    /// 4π²|mB − nA|²/Area².
    pub fn eigenvalue(&self, m: i64, n: i64) -> f64 {
        let w = self.period_b * m as f64 - self.period_a * n as f64;
        4.0 * PI * PI * w.norm_sqr() / (self.area() * self.area())
    }

    /// Rescaled torus (cA, cB).
    pub fn scaled(&self, c: Complex64) -> Result<Self> {
        TorusGeometry::new(self.period_a * c, self.period_b * c)
    }

    /// Wraps z into the fundamental parallelogram {xA + yB : x, y ∈ [−½, ½)}.
    pub fn reduce(&self, z: Complex64) -> Complex64 {
        let w = z / self.period_a;
        let s = self.modulus().value();
        let y = w.im / s.im;
        let x = w.re - y * s.re;
        let (x, y) = (x - x.round(), y - y.round());
        self.period_a * (x + y * s)
    }
}

/// 4 Im(B/A) · Area · |η(B/A)|⁴.
pub fn torus_det_formula(t: &TorusGeometry) -> f64 {
    let sigma = t.modulus();
    4.0 * sigma.value().im * t.area() * eta(sigma).norm().powi(4)
}

/// Spectral oracle for [`torus_det_formula`].
pub fn torus_det_spectral(t: &TorusGeometry) -> Result<ZetaDetResult> {
    epstein_zeta_det_with(
        t.period_a,
        t.period_b,
        LaplacianNormalization::DzDzbar,
        &TruncationPolicy::default(),
    )
}

/// A value of the torus Green function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GreenFunctionSample {
    pub argument: Complex64,
    pub value: f64,
}

/// Mean-zero Green function with ∇²G = 1/Area − δ₀:
///
///   G(z) = −(1/2π)[log|θ₁(z/A|σ)| − π(Im(z/A))²/Im σ − log|η(σ)|].
pub fn torus_green(z: Complex64, t: &TorusGeometry) -> Result<GreenFunctionSample> {
    let zr = t.reduce(z);
    let scale = t.period_a.norm().max(t.period_b.norm());
    if zr.norm() < 1e-14 * scale {
        return Err(Error::Singular(format!("{z} lies on the period lattice")));
    }
    let sigma = t.modulus();
    let w = zr / t.period_a;
    let th = jacobi_theta1(w, sigma, &TruncationPolicy::default()).value;
    let value = -(th.norm().ln() - PI * w.im * w.im / sigma.value().im - eta(sigma).norm().ln()) / (2.0 * PI);
    Ok(GreenFunctionSample { argument: z, value })
}

/// Regular part R(z) = G(z) + (1/2π) log|z|, smooth near the lattice point 0.
pub fn torus_green_regular(z: Complex64, t: &TorusGeometry) -> f64 {
    let sigma = t.modulus();
    let a = t.period_a;
    let w = z / a;
    let e = eta(sigma).norm().ln();
    let quad = PI * w.im * w.im / sigma.value().im;
    let log_ratio = if w.norm() < 1e-4 {
        // θ₁(w)/w = θ₁′(0) + θ₁‴(0) w²/6 + O(w⁴)
        let d = theta1_derivatives(Complex64::new(0.0, 0.0), sigma);
        (d.d1 + d.d3 * w * w / 6.0).norm().ln() - a.norm().ln()
    } else {
        let th = jacobi_theta1(w, sigma, &TruncationPolicy::default()).value;
        th.norm().ln() - z.norm().ln()
    };
    -(log_ratio - quad - e) / (2.0 * PI)
}

/// ∂_z G(z) = −(θ₁′/θ₁)(z/A)/(4πA) + Im(z/A)/(2iA Im σ).
pub fn torus_green_dz(z: Complex64, t: &TorusGeometry) -> Complex64 {
    let sigma = t.modulus();
    let a = t.period_a;
    let w = z / a;
    let (l1, _) = theta1_log_derivatives(w, sigma);
    -l1 / (4.0 * PI * a) + w.im / (2.0 * Complex64::i() * a * sigma.value().im)
}

/// ∂_z R(z) = ∂_z G(z) + 1/(4πz), with the small-|z| limit handled by series.
pub fn torus_green_regular_dz(z: Complex64, t: &TorusGeometry) -> Complex64 {
    let sigma = t.modulus();
    let a = t.period_a;
    let w = z / a;
    let quad = w.im / (2.0 * Complex64::i() * a * sigma.value().im);
    if w.norm() < 1e-4 {
        // θ₁′/θ₁(w) − 1/w = (θ₁‴(0)/3θ₁′(0)) w + O(w³)
        let d = theta1_derivatives(Complex64::new(0.0, 0.0), sigma);
        -(d.d3 / (3.0 * d.d1)) * w / (4.0 * PI * a) + quad
    } else {
        torus_green_dz(z, t) + 1.0 / (4.0 * PI * z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn torus() -> TorusGeometry {
        TorusGeometry::new(c(1.1, 0.2), c(0.3, 0.9)).unwrap()
    }

    #[test]
    fn square_torus_value() {
        let t = TorusGeometry::new(c(1.0, 0.0), c(0.0, 1.0)).unwrap();
        assert!((torus_det_formula(&t) - 1.393_203_929_7).abs() < 1e-9);
    }

    #[test]
    fn rejects_negative_orientation() {
        assert!(TorusGeometry::new(c(0.0, 1.0), c(1.0, 0.0)).is_err());
    }

    #[test]
    fn green_is_even_and_periodic() {
        let t = torus();
        let z = c(0.37, 0.21);
        let g = torus_green(z, &t).unwrap().value;
        assert!((g - torus_green(-z, &t).unwrap().value).abs() < 1e-12);
        assert!((g - torus_green(z + t.period_a(), &t).unwrap().value).abs() < 1e-12);
        assert!((g - torus_green(z + t.period_b(), &t).unwrap().value).abs() < 1e-12);
    }

    #[test]
    fn green_singular_on_lattice() {
        let t = torus();
        assert!(torus_green(t.period_a() + t.period_b(), &t).is_err());
    }

    #[test]
    fn dz_matches_finite_difference() {
        let t = torus();
        let z = c(0.31, 0.17);
        let h = 1e-5;
        let g = |z: Complex64| torus_green(z, &t).unwrap().value;
        let gx = (g(z + h) - g(z - h)) / (2.0 * h);
        let gy = (g(z + c(0.0, h)) - g(z - c(0.0, h))) / (2.0 * h);
        let fd = c(gx, -gy) * 0.5;
        assert!((fd - torus_green_dz(z, &t)).norm() < 1e-8);
    }

    #[test]
    fn regular_part_branches_agree() {
        let t = torus();
        for z in [c(2e-4, 1e-4), c(-1.5e-4, 0.9e-4)] {
            let direct = torus_green(z, &t).unwrap().value + z.norm().ln() / (2.0 * PI);
            assert!((direct - torus_green_regular(z, &t)).abs() < 1e-11);
            let w = z * 0.3;
            let direct = torus_green_dz(w, &t) + 1.0 / (4.0 * PI * w);
            assert!((direct - torus_green_regular_dz(w, &t)).norm() < 1e-9);
        }
    }
}
