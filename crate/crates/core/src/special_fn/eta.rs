use std::f64::consts::PI;

use num_complex::Complex64;

use super::{ModulusPoint, Truncated, TruncationPolicy};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Dedekind eta η(σ) = e^{πiσ/12} ∏_{n≥1} (1 − e^{2πinσ}).
///
/// The tail bound uses |log ∏_{n>N}(1 − qⁿ)| ≤ |q|^{N+1}/(1 − |q|)².
pub fn dedekind_eta(sigma: ModulusPoint, policy: &TruncationPolicy) -> Truncated<Complex64> {
    let s = sigma.value();
    let q = (2.0 * PI * I * s).exp();
    let r = q.norm();
    let prefactor = (PI * I * s / 12.0).exp();
    let max_terms = policy.max_lattice_radius.max(1.0) as usize;

    let mut prod = Complex64::new(1.0, 0.0);
    let mut qn = Complex64::new(1.0, 0.0);
    let mut rel_tail = f64::INFINITY;
    let mut n = 0;
    while n < max_terms {
        n += 1;
        qn *= q;
        prod *= Complex64::new(1.0, 0.0) - qn;
        let log_tail = r.powi(n as i32 + 1) / ((1.0 - r) * (1.0 - r));
        rel_tail = log_tail.exp_m1();
        if rel_tail < policy.tail_tolerance {
            break;
        }
    }
    let value = prefactor * prod;
    Truncated {
        value,
        tail_bound: rel_tail * value.norm(),
        terms: n,
    }
}

/// η(σ) at the default truncation policy.
pub fn eta(sigma: ModulusPoint) -> Complex64 {
    dedekind_eta(sigma, &TruncationPolicy::default()).value
}

/// θ₁ and its first three z-derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theta1Derivs {
    pub value: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
    pub d3: Complex64,
}

/// Raw series θ₁(z|σ) = 2 Σ_{k≥0} (−1)^k q^{(k+½)²} sin((2k+1)πz), q = e^{iπσ},
/// with its first three derivatives. No argument reduction; accurate for
/// |Im z| ≲ Im σ.
pub fn theta1_derivatives(z: Complex64, sigma: ModulusPoint) -> Theta1Derivs {
    let s = sigma.value();
    let mut out = [Complex64::new(0.0, 0.0); 4];
    let y = z.im.abs();
    for k in 0..400 {
        let h = k as f64 + 0.5;
        let log_mag = -PI * s.im * h * h + 2.0 * PI * h * y;
        let coef = 2.0 * (PI * I * s * h * h).exp() * if k % 2 == 0 { 1.0 } else { -1.0 };
        let w = (2 * k + 1) as f64 * PI;
        let arg = w * z;
        let (sn, cs) = (arg.sin(), arg.cos());
        out[0] += coef * sn;
        out[1] += coef * w * cs;
        out[2] -= coef * w * w * sn;
        out[3] -= coef * w * w * w * cs;
        // Terms are bounded by e^{log_mag} w³; stop once the remainder is
        // below double precision relative to a unit-size result.
        if k > 2 && log_mag + 3.0 * w.ln() < -50.0 {
            break;
        }
    }
    Theta1Derivs {
        value: out[0],
        d1: out[1],
        d2: out[2],
        d3: out[3],
    }
}

/// Splits z = z0 + m + nσ with |Im z0| ≤ Im σ / 2 and |Re z0| ≤ ½ (up to the shear).
fn reduce(z: Complex64, sigma: ModulusPoint) -> (Complex64, i64, i64) {
    let s = sigma.value();
    let n = (z.im / s.im).round();
    let z1 = z - n * s;
    let m = z1.re.round();
    (z1 - m, m as i64, n as i64)
}

/// Jacobi θ₁(z|σ) with lattice reduction of the argument.
pub fn jacobi_theta1(z: Complex64, sigma: ModulusPoint, policy: &TruncationPolicy) -> Truncated<Complex64> {
    let s = sigma.value();
    let (z0, m, n) = reduce(z, sigma);
    let y = z0.im.abs();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut terms = 0;
    let mut tail = f64::INFINITY;
    let max_terms = policy.max_lattice_radius.max(4.0) as usize;
    for k in 0..max_terms {
        let h = k as f64 + 0.5;
        let coef = 2.0 * (PI * I * s * h * h).exp() * if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += coef * ((2 * k + 1) as f64 * PI * z0).sin();
        terms = k + 1;
        // |term_j| ≤ 2 exp(−π Imσ h² + 2π h y) and for j > k the ratio of
        // consecutive bounds is at most exp(−2π Imσ (h + 1) + 2π y) < 1.
        let next = k as f64 + 1.5;
        let b0 = 2.0 * (-PI * s.im * next * next + 2.0 * PI * next * y).exp();
        let ratio = (-2.0 * PI * s.im * (next + 1.0) + 2.0 * PI * y).exp();
        if ratio < 1.0 {
            tail = b0 / (1.0 - ratio);
            if tail < policy.tail_tolerance * sum.norm().max(f64::MIN_POSITIVE) {
                break;
            }
        }
    }
    let sign = if (m + n).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let factor = sign * (-PI * I * (n * n) as f64 * s - 2.0 * PI * I * n as f64 * z0).exp();
    Truncated {
        value: factor * sum,
        tail_bound: factor.norm() * tail,
        terms,
    }
}

/// (θ₁′/θ₁, (log θ₁)″) at z, using quasi-periodicity to stay in the
/// fundamental strip. The second log-derivative is doubly periodic; the first
/// shifts by −2πi under z → z + σ.
pub fn theta1_log_derivatives(z: Complex64, sigma: ModulusPoint) -> (Complex64, Complex64) {
    let (z0, _m, n) = reduce(z, sigma);
    let d = theta1_derivatives(z0, sigma);
    let l1 = d.d1 / d.value;
    let l2 = d.d2 / d.value - l1 * l1;
    (l1 - 2.0 * PI * I * n as f64, l2)
}
