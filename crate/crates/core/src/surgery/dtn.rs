//! Dirichlet-to-Neumann operator of a flat torus with a small disk removed.
//!
//! The exterior solution is written as u = Sμ + C with a single layer
//! Sμ(x) = ∮ G(x − y) μ(y) ds_y on the circle |y − c| = ε, where G is the
//! mean-zero torus Green function and ∮μ = 0. Splitting
//! G = −(1/2π) log|z| + R(z), the logarithmic part acts diagonally on e^{ikφ}
//! and the smooth part R is integrated by the trapezoid rule.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use super::SurgeryScene;
use crate::circle_operators::CircleOperatorMatrix;
use crate::error::{Error, Result};
use crate::flat_torus::{torus_green_regular, torus_green_regular_dz};

/// Settings for the boundary-integral solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtnOptions {
    /// Quadrature nodes per retained mode.
    pub quad_factor: usize,
    /// Allowed relative residual of the dense solve.
    pub residual_tolerance: f64,
}

impl Default for DtnOptions {
    fn default() -> Self {
        DtnOptions {
            quad_factor: 4,
            residual_tolerance: 1e-10,
        }
    }
}

/// Single-layer representation of the exterior problem at one truncation.
#[derive(Debug, Clone)]
pub struct ExteriorSolver {
    scene: SurgeryScene,
    trunc: usize,
    nodes: usize,
    /// Densities μ for the boundary data e^{ilφ}, column l.
    density: DMatrix<Complex64>,
    /// Additive constant C for each data mode.
    constant: DVector<Complex64>,
    /// ε·∂u/∂n on the circle, normal pointing into the disk.
    scaled_dtn: DMatrix<Complex64>,
    residual: f64,
}

fn fourier_basis(nodes: usize, trunc: usize) -> DMatrix<Complex64> {
    let n = trunc as i64;
    DMatrix::from_fn(nodes, 2 * trunc + 1, |j, l| {
        let th = 2.0 * PI * j as f64 / nodes as f64;
        Complex64::from_polar(1.0, (l as i64 - n) as f64 * th)
    })
}

impl ExteriorSolver {
    pub fn new(scene: &SurgeryScene, trunc: usize, opts: &DtnOptions) -> Result<Self> {
        if trunc == 0 {
            return Err(Error::domain("truncation must be positive"));
        }
        let eps = scene.eps;
        let t = scene.surface;
        let dim = 2 * trunc + 1;
        let nodes = (opts.quad_factor * dim).max(32);
        let w = eps * 2.0 * PI / nodes as f64;
        let circle: Vec<Complex64> = (0..nodes)
            .map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / nodes as f64))
            .collect();

        // Smooth kernels on the node grid: trace R(x − y) and ε·(−∂_r) R(x − y).
        let rows: Vec<(Vec<Complex64>, Vec<Complex64>)> = (0..nodes)
            .into_par_iter()
            .map(|i| {
                let xi = circle[i];
                let mut kr = Vec::with_capacity(nodes);
                let mut kd = Vec::with_capacity(nodes);
                for yj in &circle {
                    let d = (xi - yj) * eps;
                    kr.push(Complex64::new(torus_green_regular(d, &t) * w, 0.0));
                    let dz = torus_green_regular_dz(d, &t);
                    let dr = 2.0 * (xi * dz).re;
                    kd.push(Complex64::new(-eps * dr * w, 0.0));
                }
                (kr, kd)
            })
            .collect();
        let kr = DMatrix::from_fn(nodes, nodes, |i, j| rows[i].0[j]);
        let kd = DMatrix::from_fn(nodes, nodes, |i, j| rows[i].1[j]);

        let e = fourier_basis(nodes, trunc);
        let eh = e.adjoint() * Complex64::new(1.0 / nodes as f64, 0.0);
        let mut s = &eh * &kr * &e;
        let mut nd = &eh * &kd * &e;
        let n = trunc as i64;
        for k in -n..=n {
            let i = (k + n) as usize;
            if k == 0 {
                s[(i, i)] += Complex64::new(-eps * eps.ln(), 0.0);
                nd[(i, i)] += Complex64::new(eps, 0.0);
            } else {
                s[(i, i)] += Complex64::new(eps / (2.0 * k.unsigned_abs() as f64), 0.0);
                nd[(i, i)] += Complex64::new(eps / 2.0, 0.0);
            }
        }

        // [S e₀; e₀ᵀ 0][μ; C] = [f; 0]
        let mut a = DMatrix::<Complex64>::zeros(dim + 1, dim + 1);
        a.view_mut((0, 0), (dim, dim)).copy_from(&s);
        a[(trunc, dim)] = Complex64::new(1.0, 0.0);
        a[(dim, trunc)] = Complex64::new(1.0, 0.0);
        let mut rhs = DMatrix::<Complex64>::zeros(dim + 1, dim);
        for l in 0..dim {
            rhs[(l, l)] = Complex64::new(1.0, 0.0);
        }
        let sol = a
            .clone()
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Singular("single-layer system".into()))?;
        let residual = (&a * &sol - &rhs).norm() / rhs.norm();
        if !(residual <= opts.residual_tolerance) {
            return Err(Error::convergence(
                "single-layer solve",
                residual,
                opts.residual_tolerance,
            ));
        }
        let density = sol.rows(0, dim).into_owned();
        let constant = sol.row(dim).transpose();
        let scaled_dtn = &nd * &density;
        Ok(ExteriorSolver {
            scene: *scene,
            trunc,
            nodes,
            density,
            constant,
            scaled_dtn,
            residual,
        })
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// ε·N_ε.
    pub fn scaled_dtn(&self) -> CircleOperatorMatrix {
        CircleOperatorMatrix::new(self.trunc, self.scaled_dtn.clone()).expect("square of matching size")
    }

    /// Map from boundary data to single-layer density, which equals the sum
    /// of the exterior and interior DtN operators (jump of ∂u/∂n).
    pub fn density_operator(&self) -> CircleOperatorMatrix {
        CircleOperatorMatrix::new(self.trunc, self.density.clone()).expect("square of matching size")
    }

    /// Trace of u on the concentric circle of radius ρ, ε < ρ, as a matrix
    /// acting on boundary data at radius ε.
    pub fn restriction_operator(&self, rho: f64) -> Result<CircleOperatorMatrix> {
        let eps = self.scene.eps;
        let inj = self.scene.injectivity_radius();
        if !(rho > eps && rho + eps < 2.0 * inj) {
            return Err(Error::domain(format!(
                "radius {rho} must exceed ε = {eps} and keep the annulus inside the torus (ρ + ε < {})",
                2.0 * inj
            )));
        }
        let t = self.scene.surface;
        let nodes = self.nodes;
        let dim = 2 * self.trunc + 1;
        let w = eps * 2.0 * PI / nodes as f64;
        let circle: Vec<Complex64> = (0..nodes)
            .map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / nodes as f64))
            .collect();
        let rows: Vec<Vec<Complex64>> = (0..nodes)
            .into_par_iter()
            .map(|i| {
                circle
                    .iter()
                    .map(|yj| Complex64::new(torus_green_regular(circle[i] * rho - yj * eps, &t) * w, 0.0))
                    .collect()
            })
            .collect();
        let kr = DMatrix::from_fn(nodes, nodes, |i, j| rows[i][j]);
        let e = fourier_basis(nodes, self.trunc);
        let eh = e.adjoint() * Complex64::new(1.0 / nodes as f64, 0.0);
        let mut trace = &eh * &kr * &e;
        let n = self.trunc as i64;
        for k in -n..=n {
            let i = (k + n) as usize;
            let m = k.unsigned_abs() as i32;
            trace[(i, i)] += if k == 0 {
                Complex64::new(-eps * rho.ln(), 0.0)
            } else {
                Complex64::new(eps / (2.0 * m as f64) * (eps / rho).powi(m), 0.0)
            };
        }
        let mut out = &trace * &self.density;
        for l in 0..dim {
            out[(self.trunc, l)] += self.constant[l];
        }
        CircleOperatorMatrix::new(self.trunc, out)
    }
}
