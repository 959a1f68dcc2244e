//! Dirichlet-to-Neumann operators of the unit disk with a radial slit
//! [0, ρ] on the positive real axis.
//!
//! Write u = r^{|l|}e^{ilφ} + w with w = 0 on the circle. For a Dirichlet
//! slit w is a single layer σ(t) with the disk Green function
//! G_D(z, t) = −(1/2π)(log|z − t| − log|1 − z t̄|); for a Neumann slit it is a
//! double layer δ(t) in the slit-normal direction. The densities are expanded
//! as T_n(s)/√(1 − s²) and √(1 − s²)U_{n−1}(s) on s ∈ [−1, 1], which carry
//! the tip behaviour exactly and turn the log and hypersingular parts into
//! diagonal operators.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{SlitBc, SlitDomainSpec};
use crate::circle_operators::CircleOperatorMatrix;
use crate::error::{Error, Result};

/// Chebyshev polynomials T_0..T_{n−1} at y.
fn cheb_t(y: f64, n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    if n > 0 {
        v[0] = 1.0;
    }
    if n > 1 {
        v[1] = y;
    }
    for k in 2..n {
        v[k] = 2.0 * y * v[k - 1] - v[k - 2];
    }
    v
}

/// Chebyshev polynomials U_0..U_{n−1} at y.
fn cheb_u(y: f64, n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    if n > 0 {
        v[0] = 1.0;
    }
    if n > 1 {
        v[1] = 2.0 * y;
    }
    for k in 2..n {
        v[k] = 2.0 * y * v[k - 1] - v[k - 2];
    }
    v
}

/// Layer discretization sizes for a DtN truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlitLayerOptions {
    /// Chebyshev terms in the density, beyond the truncation N.
    pub extra_terms: usize,
    /// Gauss–Chebyshev nodes per density term.
    pub quad_factor: usize,
    /// Allowed relative residual of the collocation solve.
    pub residual_tolerance: f64,
}

impl Default for SlitLayerOptions {
    fn default() -> Self {
        SlitLayerOptions {
            extra_terms: 24,
            quad_factor: 2,
            residual_tolerance: 1e-10,
        }
    }
}

/// Matrix of N₁^{int,bc} on the unit circle, modes k, l ∈ [−N, N].
pub fn slit_dtn(spec: &SlitDomainSpec, trunc: usize) -> Result<CircleOperatorMatrix> {
    slit_dtn_with(spec, trunc, &SlitLayerOptions::default())
}

pub fn slit_dtn_with(spec: &SlitDomainSpec, trunc: usize, opts: &SlitLayerOptions) -> Result<CircleOperatorMatrix> {
    let rho = spec.slit_ratio();
    let m = trunc + opts.extra_terms;
    let q = opts.quad_factor * (m + trunc) + 16;
    let corr = match spec.bc_slit() {
        SlitBc::Dirichlet => dirichlet_correction(rho, trunc, m, q, opts.residual_tolerance)?,
        SlitBc::Neumann => neumann_correction(rho, trunc, m, q, opts.residual_tolerance)?,
    };
    let n = trunc as i64;
    let dim = 2 * trunc + 1;
    let mut out = DMatrix::<Complex64>::zeros(dim, dim);
    for k in -n..=n {
        for l in -n..=n {
            let (i, j) = ((k + n) as usize, (l + n) as usize);
            let diag = if k == l { l.unsigned_abs() as f64 } else { 0.0 };
            out[(i, j)] = Complex64::new(diag, 0.0) + corr(k, l);
        }
    }
    CircleOperatorMatrix::new(trunc, out)
}

fn check_residual(a: &DMatrix<f64>, x: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> Result<()> {
    let r = (a * x - b).norm() / b.norm().max(1e-300);
    if !(r <= tol) {
        return Err(Error::convergence("slit layer collocation", r, tol));
    }
    Ok(())
}

/// Returns (k, l) ↦ ∂_r w_l coefficient k for the Dirichlet slit.
fn dirichlet_correction(
    rho: f64,
    trunc: usize,
    m: usize,
    q: usize,
    tol: f64,
) -> Result<Box<dyn Fn(i64, i64) -> Complex64>> {
    let t_of = |s: f64| 0.5 * rho * (1.0 + s);
    // Gauss–Chebyshev (first kind) nodes for ∫ g(s)/√(1 − s²) ds.
    let nodes: Vec<f64> = (1..=q)
        .map(|j| ((2 * j - 1) as f64 * PI / (2 * q) as f64).cos())
        .collect();
    let tq: Vec<Vec<f64>> = nodes.iter().map(|&s| cheb_t(s, m)).collect();
    let wq = PI / q as f64;

    // Collocation at the Chebyshev points of the slit.
    let ys: Vec<f64> = (1..=m)
        .map(|j| ((2 * j - 1) as f64 * PI / (2 * m) as f64).cos())
        .collect();
    let mut a = DMatrix::<f64>::zeros(m, m);
    for (row, &y) in ys.iter().enumerate() {
        let x = t_of(y);
        let ty = cheb_t(y, m);
        for n in 0..m {
            // −(1/2π)∫ log|x − t| σ dt
            let log_part = if n == 0 {
                -0.5 * (rho / 4.0).ln()
            } else {
                0.5 * ty[n] / n as f64
            };
            // (1/2π)∫ log(1 − x t) σ dt
            let reg: f64 = nodes
                .iter()
                .zip(&tq)
                .map(|(&s, tn)| (1.0 - x * t_of(s)).ln() * tn[n])
                .sum::<f64>()
                * wq
                / (2.0 * PI);
            a[(row, n)] = log_part + reg;
        }
    }
    // Right-hand sides −x^{p}, p = 0..=N.
    let b = DMatrix::from_fn(m, trunc + 1, |row, p| -t_of(ys[row]).powi(p as i32));
    let lu = a.clone().lu();
    let coef = lu
        .solve(&b)
        .ok_or_else(|| Error::Singular("Dirichlet slit collocation".into()))?;
    check_residual(&a, &coef, &b, tol)?;

    // c_k = −(1/2π)∫ t^{|k|} σ(t) dt.
    let mut moments = DMatrix::<f64>::zeros(trunc + 1, trunc + 1);
    for p in 0..=trunc {
        for kk in 0..=trunc {
            let mut acc = 0.0;
            for (&s, tn) in nodes.iter().zip(&tq) {
                let sigma: f64 = (0..m).map(|n| coef[(n, p)] * tn[n]).sum();
                acc += t_of(s).powi(kk as i32) * sigma;
            }
            moments[(kk, p)] = -acc * wq / (2.0 * PI);
        }
    }
    Ok(Box::new(move |k, l| {
        Complex64::new(moments[(k.unsigned_abs() as usize, l.unsigned_abs() as usize)], 0.0)
    }))
}

/// Returns (k, l) ↦ ∂_r w_l coefficient k for the Neumann slit.
fn neumann_correction(
    rho: f64,
    trunc: usize,
    m: usize,
    q: usize,
    tol: f64,
) -> Result<Box<dyn Fn(i64, i64) -> Complex64>> {
    let t_of = |s: f64| 0.5 * rho * (1.0 + s);
    // Gauss–Chebyshev (second kind) nodes for ∫ √(1 − s²) g(s) ds.
    let nodes: Vec<f64> = (1..=q).map(|j| (j as f64 * PI / (q + 1) as f64).cos()).collect();
    let weights: Vec<f64> = (1..=q)
        .map(|j| PI / (q + 1) as f64 * (j as f64 * PI / (q + 1) as f64).sin().powi(2))
        .collect();
    let uq: Vec<Vec<f64>> = nodes.iter().map(|&s| cheb_u(s, m)).collect();

    let ys: Vec<f64> = (1..=m).map(|j| (j as f64 * PI / (m + 1) as f64).cos()).collect();
    let mut a = DMatrix::<f64>::zeros(m, m);
    for (row, &y) in ys.iter().enumerate() {
        let x = t_of(y);
        let uy = cheb_u(y, m);
        for n in 1..=m {
            // (1/2π) f.p.∫ δ(t)/(x − t)² dt on √(1 − s²)U_{n−1}
            let sing = -(n as f64) * uy[n - 1] / rho;
            // −(1/2π)∫ δ(t)/(1 − x t)² dt
            let reg: f64 = nodes
                .iter()
                .zip(&uq)
                .zip(&weights)
                .map(|((&s, un), w)| w * un[n - 1] / (1.0 - x * t_of(s)).powi(2))
                .sum::<f64>()
                * (-0.5 * rho / (2.0 * PI));
            a[(row, n - 1)] = sing + reg;
        }
    }
    // ∂_y v_l = i l x^{|l|−1}; solve for the real profile x^{p−1}, p = 1..=N,
    // and restore the factor −i l afterwards.
    let b = DMatrix::from_fn(m, trunc, |row, p| t_of(ys[row]).powi(p as i32));
    let coef = a
        .clone()
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Singular("Neumann slit collocation".into()))?;
    check_residual(&a, &coef, &b, tol)?;

    // c_k = (ik/2π)∫ δ(t) t^{|k|−1} dt, with dt = (ρ/2) ds.
    let mut moments = DMatrix::<f64>::zeros(trunc + 1, trunc + 1);
    for p in 1..=trunc {
        for kk in 1..=trunc {
            let mut acc = 0.0;
            for ((&s, un), w) in nodes.iter().zip(&uq).zip(&weights) {
                let delta: f64 = (1..=m).map(|n| coef[(n - 1, p - 1)] * un[n - 1]).sum();
                acc += w * t_of(s).powi(kk as i32 - 1) * delta;
            }
            moments[(kk, p)] = acc * 0.5 * rho / (2.0 * PI);
        }
    }
    Ok(Box::new(move |k, l| {
        if k == 0 || l == 0 {
            return Complex64::new(0.0, 0.0);
        }
        // δ_l = −i l · (solution for x^{|l|−1}); c_k = (ik/2π)·moment.
        let mom = moments[(k.unsigned_abs() as usize, l.unsigned_abs() as usize)];
        Complex64::new(0.0, k as f64) * Complex64::new(0.0, -(l as f64)) * mom
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle_operators::multiplier_abs_nu;

    fn spec(rho: f64, bc: SlitBc) -> SlitDomainSpec {
        SlitDomainSpec::new(rho, bc).unwrap()
    }

    #[test]
    fn chebyshev_recurrences() {
        let y: f64 = 0.3;
        let th = y.acos();
        let t = cheb_t(y, 6);
        let u = cheb_u(y, 6);
        for n in 0..6 {
            assert!((t[n] - (n as f64 * th).cos()).abs() < 1e-14);
            assert!((u[n] - ((n + 1) as f64 * th).sin() / th.sin()).abs() < 1e-13);
        }
    }

    #[test]
    fn hermitian_and_ordered() {
        let nu = multiplier_abs_nu().to_matrix(12);
        for bc in [SlitBc::Dirichlet, SlitBc::Neumann] {
            let m = slit_dtn(&spec(0.5, bc), 12).unwrap();
            assert!(m.hermitian_defect() < 1e-10, "{bc:?} {}", m.hermitian_defect());
            let diff = match bc {
                SlitBc::Dirichlet => m.sub(&nu).unwrap(),
                SlitBc::Neumann => nu.sub(&m).unwrap(),
            };
            // A Dirichlet slit raises the Dirichlet energy, a Neumann slit lowers it.
            assert!(diff.hermitian_eigenvalues()[0] > -1e-10, "{bc:?}");
        }
    }

    #[test]
    fn reflection_blocks() {
        let n = 10;
        let d = slit_dtn(&spec(0.5, SlitBc::Dirichlet), n).unwrap();
        let nn = slit_dtn(&spec(0.5, SlitBc::Neumann), n).unwrap();
        for k in 1..=n as i64 {
            for l in 1..=n as i64 {
                // sine block of the Dirichlet slit and cosine block of the Neumann slit
                let sin_d = (d.get(k, l) - d.get(k, -l) - d.get(-k, l) + d.get(-k, -l)) * 0.5;
                let cos_n = (nn.get(k, l) + nn.get(k, -l) + nn.get(-k, l) + nn.get(-k, -l)) * 0.5;
                let expect = if k == l { k as f64 } else { 0.0 };
                assert!((sin_d.re - expect).abs() < 1e-12 && sin_d.im.abs() < 1e-12);
                assert!((cos_n.re - expect).abs() < 1e-12 && cos_n.im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn vanishing_neumann_slit() {
        let m = slit_dtn(&spec(1e-3, SlitBc::Neumann), 8).unwrap();
        let d = m.sub(&multiplier_abs_nu().to_matrix(8)).unwrap();
        assert!(crate::circle_operators::trace_norm(&d) < 1e-5);
    }

    #[test]
    fn converges_in_layer_size() {
        for bc in [SlitBc::Dirichlet, SlitBc::Neumann] {
            let s = spec(0.5, bc);
            let a = slit_dtn_with(&s, 8, &SlitLayerOptions::default()).unwrap();
            let b = slit_dtn_with(
                &s,
                8,
                &SlitLayerOptions {
                    extra_terms: 48,
                    quad_factor: 3,
                    ..Default::default()
                },
            )
            .unwrap();
            assert!(a.sub(&b).unwrap().entries().norm() < 1e-11, "{bc:?}");
        }
    }
}
