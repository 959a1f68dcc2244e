use std::f64::consts::PI;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Number of Bernoulli correction terms in Euler–Maclaurin.
const EM_TERMS: usize = 20;
/// Direct-sum cutoff: the tail starts at N + a ≥ EM_START.
const EM_START: f64 = 30.0;

/// Bernoulli numbers B_0..=B_n (B_1 = −1/2), from the exact recurrence
/// Σ_{k<m+1} C(m+1,k) B_k = 0 in rational arithmetic.
pub fn bernoulli_numbers(n: usize) -> Vec<f64> {
    exact_bernoulli(n)
        .iter()
        .map(|b| b.to_f64().unwrap_or(f64::NAN))
        .collect()
}

fn exact_bernoulli(n: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = Vec::with_capacity(n + 1);
    b.push(BigRational::from_integer(BigInt::from(1)));
    for m in 1..=n {
        let mut acc = BigRational::zero();
        let mut binom = BigInt::from(1);
        for (k, bk) in b.iter().enumerate() {
            acc += bk * BigRational::from_integer(binom.clone());
            binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
        }
        b.push(-acc / BigRational::from_integer(BigInt::from(m + 1)));
    }
    b
}

/// B_{2j}/(2j)! for j = 1..=EM_TERMS.
fn em_coefficients() -> &'static [f64] {
    static COEFFS: OnceLock<Vec<f64>> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let b = exact_bernoulli(2 * EM_TERMS);
        let mut fact = BigInt::from(1);
        let mut out = Vec::with_capacity(EM_TERMS);
        for (k, bk) in b.iter().enumerate().take(2 * EM_TERMS + 1).skip(1) {
            fact *= BigInt::from(k);
            if k % 2 == 0 {
                let c = bk / BigRational::from_integer(fact.clone());
                out.push(c.to_f64().unwrap_or(f64::NAN));
            }
        }
        out
    })
}

fn check_args(t: Complex64, a: f64) -> Result<()> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::domain(format!("Hurwitz parameter a = {a} must be positive")));
    }
    if (t - 1.0).norm() < 1e-14 {
        return Err(Error::Singular("Hurwitz zeta has a pole at t = 1".into()));
    }
    Ok(())
}

/// Euler–Maclaurin evaluation of ζ(t, a) and ∂_t ζ(t, a).
fn hurwitz_pair(t: Complex64, a: f64) -> (Complex64, Complex64) {
    let n = (EM_START - a).ceil().max(0.0) as usize;
    let mut val = Complex64::zero();
    let mut der = Complex64::zero();
    for k in 0..n {
        let x = k as f64 + a;
        let p = (-t * x.ln()).exp();
        val += p;
        der -= x.ln() * p;
    }
    let x = n as f64 + a;
    let lx = x.ln();
    let xt = (-t * lx).exp();
    let tm1 = t - 1.0;
    val += x * xt / tm1 + 0.5 * xt;
    der += -lx * x * xt / tm1 - x * xt / (tm1 * tm1) - 0.5 * lx * xt;

    // Correction j: c_j (t)_{2j−1} x^{−t−2j+1}; poch and its t-derivative
    // are built by the product rule so that zeros of (t)_{2j−1} are harmless.
    let mut poch = t;
    let mut dpoch = Complex64::new(1.0, 0.0);
    let mut xp = xt / x;
    for (j, c) in em_coefficients().iter().enumerate() {
        if j > 0 {
            for i in [2 * j - 1, 2 * j] {
                let f = t + i as f64;
                dpoch = dpoch * f + poch;
                poch *= f;
            }
            xp /= x * x;
        }
        val += c * poch * xp;
        der += c * (dpoch - lx * poch) * xp;
    }
    (val, der)
}

/// Hurwitz zeta ζ(t, a) = Σ_{k≥0} (k + a)^{−t}, analytically continued.
pub fn hurwitz_zeta(t: Complex64, a: f64) -> Result<Complex64> {
    check_args(t, a)?;
    Ok(hurwitz_pair(t, a).0)
}

/// ∂_t ζ(t, a).
pub fn hurwitz_zeta_dt(t: Complex64, a: f64) -> Result<Complex64> {
    check_args(t, a)?;
    Ok(hurwitz_pair(t, a).1)
}

/// ζ′(−1), evaluated once by Euler–Maclaurin and cached.
pub fn riemann_zeta_prime_minus1() -> f64 {
    static VALUE: OnceLock<f64> = OnceLock::new();
    *VALUE.get_or_init(|| hurwitz_pair(Complex64::new(-1.0, 0.0), 1.0).1.re)
}

/// Riemann zeta values entering the determinant constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZetaConstants {
    pub zeta_at_0: f64,
    pub zeta_prime_at_0: f64,
    pub zeta_prime_at_minus1: f64,
}

pub fn zeta_constants() -> ZetaConstants {
    ZetaConstants {
        zeta_at_0: -0.5,
        zeta_prime_at_0: -0.5 * (2.0 * PI).ln(),
        zeta_prime_at_minus1: riemann_zeta_prime_minus1(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn bernoulli_small() {
        let b = bernoulli_numbers(12);
        let expected = [
            1.0,
            -0.5,
            1.0 / 6.0,
            0.0,
            -1.0 / 30.0,
            0.0,
            1.0 / 42.0,
            0.0,
            -1.0 / 30.0,
            0.0,
            5.0 / 66.0,
            0.0,
            -691.0 / 2730.0,
        ];
        for (x, y) in b.iter().zip(expected) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn hurwitz_classical_values() {
        for a in [0.3, 1.0, 2.7, 45.0] {
            let v = hurwitz_zeta(c(0.0), a).unwrap();
            assert!((v.re - (0.5 - a)).abs() < 1e-13, "a = {a}: {v}");
        }
        let basel = hurwitz_zeta(c(2.0), 1.0).unwrap();
        assert!((basel.re - PI * PI / 6.0).abs() < 1e-14);
        let d = hurwitz_zeta_dt(c(0.0), 1.0).unwrap();
        assert!((d.re + 0.5 * (2.0 * PI).ln()).abs() < 1e-14);
    }

    #[test]
    fn lerch_formula() {
        // ∂_t ζ(0, a) = log Γ(a) − ½ log 2π
        for a in [0.25, 0.5, 1.7, 6.2] {
            let d = hurwitz_zeta_dt(c(0.0), a).unwrap().re;
            let expected = statrs::function::gamma::ln_gamma(a) - 0.5 * (2.0 * PI).ln();
            assert!((d - expected).abs() < 1e-12, "a = {a}");
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let t = Complex64::new(0.4, 0.3);
        let h = 1e-5;
        let fd = (hurwitz_zeta(t + h, 2.5).unwrap() - hurwitz_zeta(t - h, 2.5).unwrap()) / (2.0 * h);
        let d = hurwitz_zeta_dt(t, 2.5).unwrap();
        assert!((fd - d).norm() < 1e-9);
    }

    #[test]
    fn zeta_prime_minus_one() {
        // Oracle: ζ′(−1) = 1/12 − log A with Glaisher's constant A.
        let glaisher: f64 = 1.282_427_129_100_622_6;
        let expected = 1.0 / 12.0 - glaisher.ln();
        assert!((riemann_zeta_prime_minus1() - expected).abs() < 1e-13);
    }

    #[test]
    fn pole_is_reported() {
        assert!(hurwitz_zeta(c(1.0), 1.0).is_err());
        assert!(hurwitz_zeta(c(0.0), -1.0).is_err());
    }
}
