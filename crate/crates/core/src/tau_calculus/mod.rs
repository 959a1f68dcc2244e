//! Genus-one prime form, σ, C-invariant and τ, plus the exact exponent
//! ledger for the degeneration of τ on a pinched surface.

mod ledger;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::special_fn::{
    eta, jacobi_theta1, riemann_theta, riemann_theta_hessian_log, theta1_derivatives, theta1_log_derivatives,
    ModulusPoint, PeriodMatrix, TruncationPolicy,
};

pub use ledger::{
    c_rule_ledger, delta_total_minus_genus_variant, ledger_assemble, tau_factorization_prefactor, Atom, ExponentLedger,
    LedgerEntry, TauPrefactor,
};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Genus-one surface ℂ/(ℤ + σℤ) with flat coordinate z and differential dz.
///
/// The a-cycle used by σ(P, Q) runs along Im x = `contour_height`; points
/// fed to σ must lie in the strip contour_height < Im z < contour_height + Im σ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Genus1Frame {
    pub sigma: ModulusPoint,
    pub contour_height: f64,
}

impl Genus1Frame {
    pub fn new(sigma: ModulusPoint) -> Self {
        Genus1Frame {
            sigma,
            contour_height: -0.05 * sigma.value().im,
        }
    }

    pub fn with_contour_height(sigma: ModulusPoint, contour_height: f64) -> Self {
        Genus1Frame { sigma, contour_height }
    }

    fn theta1(&self, z: Complex64) -> Complex64 {
        jacobi_theta1(z, self.sigma, &TruncationPolicy::default()).value
    }

    fn theta1_prime0(&self) -> Complex64 {
        theta1_derivatives(Complex64::new(0.0, 0.0), self.sigma).d1
    }

    fn period_matrix(&self) -> PeriodMatrix {
        PeriodMatrix::from_modulus(self.sigma)
    }

    fn theta(&self, z: Complex64) -> Complex64 {
        riemann_theta(&[z], &self.period_matrix(), &TruncationPolicy::default())
            .expect("dimension 1")
            .value
    }
}

fn is_lattice_point(z: Complex64, sigma: Complex64) -> bool {
    let n = (z.im / sigma.im).round();
    let w = z - n * sigma;
    (w - w.re.round()).norm() < 1e-13
}

/// E(x, y) = θ₁(y − x)/θ₁′(0).
pub fn prime_form_genus1(x: Complex64, y: Complex64, f: &Genus1Frame) -> Result<Complex64> {
    if is_lattice_point(y - x, f.sigma.value()) {
        return Err(Error::Singular("prime form at coincident points".into()));
    }
    Ok(f.theta1(y - x) / f.theta1_prime0())
}

/// Canonical bidifferential W(x, y) = ∂_x∂_y log E(x, y) = −(log θ₁)″(y − x).
pub fn bidifferential_genus1(x: Complex64, y: Complex64, f: &Genus1Frame) -> Result<Complex64> {
    if is_lattice_point(y - x, f.sigma.value()) {
        return Err(Error::Singular("bidifferential at coincident points".into()));
    }
    Ok(-theta1_log_derivatives(y - x, f.sigma).1)
}

/// Constant term of W(x, y) − 1/(y − x)² on the diagonal: −θ₁‴(0)/(3θ₁′(0)).
pub fn bergman_constant_genus1(f: &Genus1Frame) -> Complex64 {
    let d = theta1_derivatives(Complex64::new(0.0, 0.0), f.sigma);
    -d.d3 / (3.0 * d.d1)
}

/// Both sides of the genus-one Fay identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FayResidual {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
}

/// (log θ)″(e) by central differences with step h and one Richardson step.
/// Logs of ratios θ(e ± h)/θ(e) avoid branch jumps of log θ.
#[cfg(test)]
fn log_theta_hessian_fd(e: Complex64, f: &Genus1Frame, h: f64) -> Complex64 {
    let th_e = f.theta(e);
    let d2 = |h: f64| {
        let rp = (f.theta(e + h) / th_e).ln();
        let rm = (f.theta(e - h) / th_e).ln();
        (rp + rm) / (h * h)
    };
    (4.0 * d2(h / 2.0) - d2(h)) / 3.0
}

/// θ(y − x − e)θ(y − x + e)/(θ(e)²E(x, y)²) against W(x, y) + (log θ)″(e).
pub fn verify_fay_identity(x: Complex64, y: Complex64, e: Complex64, f: &Genus1Frame) -> Result<FayResidual> {
    let th_e = f.theta(e);
    let scale = f.theta(Complex64::new(0.0, 0.0)).norm();
    if th_e.norm() < 1e-6 * scale {
        return Err(Error::Singular(format!("θ({e}) vanishes to working precision")));
    }
    let ex = prime_form_genus1(x, y, f)?;
    let d = y - x;
    let lhs = f.theta(d - e) * f.theta(d + e) / (th_e * th_e * ex * ex);
    let hess = riemann_theta_hessian_log(&[e], &f.period_matrix(), &TruncationPolicy::default())?[(0, 0)];
    let rhs = bidifferential_genus1(x, y, f)? + hess;
    Ok(FayResidual {
        lhs,
        rhs,
        residual: (lhs - rhs).norm(),
    })
}

/// σ(P, Q) = exp{−∮_a log(E(x, P)/E(x, Q)) dx}.
///
/// The logarithm is continued along the contour; its winding 2πik over the
/// cycle is split off so the periodic trapezoid rule applies, and its mean
/// πik added back.
pub fn sigma_genus1(p: Complex64, q: Complex64, f: &Genus1Frame) -> Result<Complex64> {
    let s = f.sigma.value();
    let y0 = f.contour_height;
    for z in [p, q] {
        if !(z.im > y0 && z.im < y0 + s.im) {
            return Err(Error::domain(format!(
                "point {z} must lie strictly between the a-cycle at Im = {y0} and its σ-translate"
            )));
        }
    }
    if (p - q).norm() == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let ratio = |t: f64| {
        let x = Complex64::new(t, y0);
        f.theta1(p - x) / f.theta1(q - x)
    };
    let integral = |n: usize| -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        let r0 = ratio(0.0);
        let mut prev = r0;
        let mut log = r0.ln();
        let mut logs = Vec::with_capacity(n);
        for j in 0..n {
            if j > 0 {
                let cur = ratio(j as f64 / n as f64);
                let step = (cur / prev).ln();
                if step.im.abs() > PI / 2.0 {
                    return Err(Error::convergence("σ branch tracking", step.im.abs(), PI / 2.0));
                }
                log += step;
                prev = cur;
            }
            logs.push(log);
        }
        let close = (r0 / prev).ln();
        let k = ((log + close - r0.ln()).im / (2.0 * PI)).round();
        for (j, l) in logs.iter().enumerate() {
            acc += l - 2.0 * PI * I * k * (j as f64 / n as f64);
        }
        Ok(acc / n as f64 + PI * I * k)
    };
    let mut n = 64;
    let mut prev: Option<Complex64> = None;
    loop {
        let cur = match integral(n) {
            Ok(v) => v,
            Err(e) if n >= 1 << 16 => return Err(e),
            Err(_) => {
                n *= 2;
                continue;
            }
        };
        if let Some(pv) = prev {
            if (cur - pv).norm() < 1e-13 * (1.0 + cur.norm()) {
                return Ok((-cur).exp());
            }
        }
        if n >= 1 << 16 {
            let pv = prev.unwrap_or(cur);
            return Err(Error::convergence("σ quadrature", (cur - pv).norm(), 1e-13));
        }
        prev = Some(cur);
        n *= 2;
    }
}

/// 𝒞(P) = 2πi η³(σ) e^{−πiσ/4} (independent of P).
pub fn c_invariant_genus1(f: &Genus1Frame) -> Complex64 {
    let s = f.sigma.value();
    let e = eta(f.sigma);
    2.0 * PI * I * e * e * e * (-PI * I * s / 4.0).exp()
}

/// 𝒞(P) from its defining quotient with one auxiliary point Q₁:
/// θ(Q₁ − P + K^P) σ(Q₁, P) / (v(Q₁) E(P, Q₁)).
pub fn c_invariant_from_quotient(p: Complex64, q1: Complex64, f: &Genus1Frame) -> Result<Complex64> {
    let k = riemann_constants_genus1(f);
    let th = f.theta(q1 - p + k);
    let sig = sigma_genus1(q1, p, f)?;
    let e = prime_form_genus1(p, q1, f)?;
    Ok(th * sig / e)
}

/// K^P = 1/2 + σ/2.
pub fn riemann_constants_genus1(f: &Genus1Frame) -> Complex64 {
    0.5 + f.sigma.value() / 2.0
}

/// |τ|², with the phase left undetermined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TauValue {
    pub tau_abs_sq: f64,
    pub phase_defined: bool,
}

/// Characteristic vector r of the genus-one frame.
pub const R_GENUS1: f64 = -1.0;

/// τ^{−6} = e^{2πi r K^P} 𝒞^{−4} with r = −1; returns |τ|² = |τ^{−6}|^{−1/3}.
pub fn tau_genus1(f: &Genus1Frame) -> TauValue {
    tau_genus1_with_c(f, c_invariant_genus1(f))
}

/// Same as [`tau_genus1`] with a supplied value of 𝒞.
pub fn tau_genus1_with_c(f: &Genus1Frame, c: Complex64) -> TauValue {
    let k = riemann_constants_genus1(f);
    let tau_m6 = (2.0 * PI * I * R_GENUS1 * k).exp() / c.powi(4);
    TauValue {
        tau_abs_sq: tau_m6.norm().powf(-1.0 / 3.0),
        phase_defined: false,
    }
}

/// δ₁ = 4/(2π)^{4/3}.
pub fn delta1() -> f64 {
    4.0 / (2.0 * PI).powf(4.0 / 3.0)
}

/// δ_g = (2√2 κ₀)^{g−1} δ₁^g.
pub fn delta_g(g: u32, kappa0: f64) -> Result<f64> {
    if g < 1 {
        return Err(Error::domain("genus must be at least 1"));
    }
    if !(kappa0 > 0.0) || !kappa0.is_finite() {
        return Err(Error::domain(format!("κ₀ = {kappa0} must be positive")));
    }
    let g = g as i32;
    Ok((2.0 * 2f64.sqrt() * kappa0).powi(g - 1) * delta1().powi(g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flat_torus::{torus_det_formula, TorusGeometry};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn frame(re: f64, im: f64) -> Genus1Frame {
        Genus1Frame::new(ModulusPoint::new(c(re, im)).unwrap())
    }

    #[test]
    fn prime_form_normalization() {
        let f = frame(0.1, 1.2);
        let x = c(0.2, 0.1);
        let y = x + c(1e-6, 2e-6);
        let e = prime_form_genus1(x, y, &f).unwrap();
        assert!((e / (y - x) - 1.0).norm() < 1e-10);
        let a = prime_form_genus1(x, c(0.5, 0.4), &f).unwrap();
        let b = prime_form_genus1(c(0.5, 0.4), x, &f).unwrap();
        assert!((a + b).norm() < 1e-14);
    }

    #[test]
    fn fay_identity_holds() {
        let f = frame(0.2, 0.9);
        let r = verify_fay_identity(c(0.1, 0.05), c(0.45, 0.3), c(0.13, 0.21), &f).unwrap();
        assert!(r.residual < 1e-10 * r.lhs.norm(), "{r:?}");
    }

    #[test]
    fn fay_rejects_theta_zero() {
        let f = frame(0.2, 0.9);
        let e = 0.5 + f.sigma.value() / 2.0;
        assert!(verify_fay_identity(c(0.1, 0.0), c(0.4, 0.2), e, &f).is_err());
    }

    #[test]
    fn sigma_reciprocity() {
        let f = frame(0.0, 1.0);
        let (p, q) = (c(0.1, 0.0), c(0.3, 0.2));
        let a = sigma_genus1(p, q, &f).unwrap();
        let b = sigma_genus1(q, p, &f).unwrap();
        assert!((a * b - 1.0).norm() < 1e-10);
        assert_eq!(sigma_genus1(p, p, &f).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn c_from_quotient_matches_closed_form() {
        let f = frame(0.0, 1.0);
        let closed = c_invariant_genus1(&f);
        let q = c_invariant_from_quotient(c(0.05, 0.1), c(0.37, 0.21), &f).unwrap();
        assert!((q - closed).norm() < 1e-8 * closed.norm(), "{q} vs {closed}");
    }

    #[test]
    fn delta1_closure_square() {
        let f = frame(0.0, 1.0);
        let t = TorusGeometry::from_modulus(f.sigma);
        let lhs = delta1() * f.sigma.value().im * t.area() * tau_genus1(&f).tau_abs_sq;
        let rhs = torus_det_formula(&t);
        assert!((lhs - rhs).abs() < 1e-10 * rhs);
    }

    #[test]
    fn delta_g_plug_in() {
        let d1 = delta1();
        assert!((d1 - 0.345_000_851_412).abs() < 1e-11);
        assert!((delta_g(2, 1.0).unwrap() - 2.0 * 2f64.sqrt() * d1 * d1).abs() < 1e-15);
        assert!(delta_g(1, -1.0).is_err());
    }

    #[test]
    fn fd_hessian_helper_agrees() {
        let f = frame(0.1, 1.1);
        let e = c(0.2, 0.1);
        let a = log_theta_hessian_fd(e, &f, 1e-3);
        let b = riemann_theta_hessian_log(&[e], &f.period_matrix(), &TruncationPolicy::default()).unwrap()[(0, 0)];
        assert!((a - b).norm() < 1e-7 * b.norm(), "{a} vs {b}");
    }
}
