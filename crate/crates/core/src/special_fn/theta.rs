use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use statrs::function::gamma::{gamma, gamma_ur};

use super::{PeriodMatrix, Truncated, TruncationPolicy};
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

struct ThetaSum {
    value: Complex64,
    grad: DVector<Complex64>,
    hess: DMatrix<Complex64>,
    tail_bound: f64,
    terms: usize,
}

/// Shortest nonzero lattice vector length in the norm ‖n‖² = nᵀYn.
fn shortest_vector(y: &DMatrix<f64>) -> f64 {
    let g = y.nrows();
    let lam_min = y.clone().symmetric_eigenvalues().min();
    let probe = y[(0, 0)].sqrt();
    let box_r = (probe / lam_min.sqrt()).ceil() as i64;
    let mut best = probe;
    let mut n = vec![-box_r; g];
    loop {
        if n.iter().any(|&k| k != 0) {
            let v = DVector::from_iterator(g, n.iter().map(|&k| k as f64));
            let len = (v.transpose() * y * &v)[(0, 0)].sqrt();
            best = best.min(len);
        }
        if !advance(&mut n, &vec![-box_r; g], &vec![box_r; g]) {
            break;
        }
    }
    best
}

/// Odometer increment over a box; returns false once the box is exhausted.
fn advance(n: &mut [i64], lo: &[i64], hi: &[i64]) -> bool {
    for i in 0..n.len() {
        if n[i] < hi[i] {
            n[i] += 1;
            return true;
        }
        n[i] = lo[i];
    }
    false
}

/// Bound on Σ e^{−π‖n − c‖²_Y} over lattice points with ‖n − c‖_Y > r.
fn gaussian_tail(g: usize, rho: f64, r: f64) -> f64 {
    let (ru, rhou) = (PI.sqrt() * r, PI.sqrt() * rho);
    if ru <= rhou / 2.0 {
        return f64::INFINITY;
    }
    let a = g as f64 / 2.0;
    let x = (ru - rhou / 2.0).powi(2);
    a * (2.0 / rhou).powi(g as i32) * gamma_ur(a, x) * gamma(a)
}

fn theta_sum(v: &[Complex64], omega: &PeriodMatrix, policy: &TruncationPolicy) -> Result<ThetaSum> {
    let g = omega.dim();
    if v.len() != g {
        return Err(Error::DimensionMismatch {
            expected: g,
            got: v.len(),
        });
    }
    let om = omega.entries();
    let y = omega.imag();
    let y = (&y + y.transpose()) * 0.5;
    let yinv = y
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Singular("Im Ω is not invertible".into()))?;
    let imv = DVector::from_iterator(g, v.iter().map(|z| z.im));
    let center = -(&yinv * &imv);
    let peak = PI * (center.transpose() * &y * &center)[(0, 0)];

    let rho = shortest_vector(&y);
    let mut r = rho / 2.0 + 0.5;
    while gaussian_tail(g, rho, r) > policy.tail_tolerance && r < policy.max_lattice_radius {
        r += 0.25;
    }
    let tail = gaussian_tail(g, rho, r) * peak.exp();

    let lo: Vec<i64> = (0..g)
        .map(|i| (center[i] - r * yinv[(i, i)].sqrt()).floor() as i64)
        .collect();
    let hi: Vec<i64> = (0..g)
        .map(|i| (center[i] + r * yinv[(i, i)].sqrt()).ceil() as i64)
        .collect();

    let mut value = Complex64::new(0.0, 0.0);
    let mut grad = DVector::from_element(g, Complex64::new(0.0, 0.0));
    let mut hess = DMatrix::from_element(g, g, Complex64::new(0.0, 0.0));
    let mut terms = 0;
    let mut n = lo.clone();
    loop {
        let nf = DVector::from_iterator(g, n.iter().map(|&k| k as f64));
        let d = &nf - &center;
        if (d.transpose() * &y * &d)[(0, 0)] <= r * r {
            let mut phase = Complex64::new(0.0, 0.0);
            for i in 0..g {
                phase += 2.0 * nf[i] * v[i];
                for j in 0..g {
                    phase += nf[i] * om[(i, j)] * nf[j];
                }
            }
            let term = (PI * I * phase).exp();
            value += term;
            for i in 0..g {
                grad[i] += 2.0 * PI * I * nf[i] * term;
                for j in 0..g {
                    hess[(i, j)] -= 4.0 * PI * PI * nf[i] * nf[j] * term;
                }
            }
            terms += 1;
        }
        if !advance(&mut n, &lo, &hi) {
            break;
        }
    }
    Ok(ThetaSum {
        value,
        grad,
        hess,
        tail_bound: tail,
        terms,
    })
}

/// Riemann theta θ(v|Ω) = Σ_{n∈ℤ^g} exp(πi nᵀΩn + 2πi nᵀv), summed over an
/// ellipsoid centred at the dominant lattice point with a Gaussian tail bound.
pub fn riemann_theta(v: &[Complex64], omega: &PeriodMatrix, policy: &TruncationPolicy) -> Result<Truncated<Complex64>> {
    let s = theta_sum(v, omega, policy)?;
    Ok(Truncated {
        value: s.value,
        tail_bound: s.tail_bound,
        terms: s.terms,
    })
}

/// Hessian ∂²log θ/∂v_i∂v_j.
pub fn riemann_theta_hessian_log(
    v: &[Complex64],
    omega: &PeriodMatrix,
    policy: &TruncationPolicy,
) -> Result<DMatrix<Complex64>> {
    let s = theta_sum(v, omega, policy)?;
    if s.value.norm() < 1e3 * s.tail_bound.max(f64::MIN_POSITIVE) {
        return Err(Error::Singular("θ vanishes at the evaluation point".into()));
    }
    let g = &s.grad / s.value;
    Ok(&s.hess / s.value - &g * g.transpose())
}
