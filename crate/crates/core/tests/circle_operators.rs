use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use flatdet::circle_operators::{
    annulus_dtn_action, annulus_identity_rhs, annulus_traces, multiplier_abs_nu, zeta_det_regularized,
    zeta_det_regularized_with, CircleOperatorMatrix, Coeffs, ZetaDetOptions,
};

fn coeffs(v: &[(f64, f64)]) -> Coeffs {
    let n = v.len() as i64 / 2;
    (-n..n)
        .zip(v)
        .map(|(k, &(re, im))| (k, Complex64::new(re, im)))
        .collect()
}

/// Hermitian with entries decaying like e^{−(|k|+|l|)/2}, zero on mode 0.
fn smooth_perturbation(trunc: usize, seed: &[f64]) -> CircleOperatorMatrix {
    let n = 2 * trunc + 1;
    let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    let t = trunc as i64;
    for i in 0..n {
        for j in i..n {
            let (k, l) = (i as i64 - t, j as i64 - t);
            if k == 0 || l == 0 {
                continue;
            }
            let s = seed[(i * 7 + j * 3) % seed.len()];
            let v = Complex64::new(s, if i == j { 0.0 } else { 0.5 * s }) * (-0.5 * (k.abs() + l.abs()) as f64).exp();
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
    }
    CircleOperatorMatrix::new(trunc, m).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn annulus_dirichlet_neumann_identity(
        a in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 12),
        b in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 12),
        eps in 0.2f64..0.9,
    ) {
        let (a, b) = (coeffs(&a), coeffs(&b));
        let (f, g) = annulus_traces(&a, &b, eps);
        let lhs = annulus_dtn_action(&a, &b, eps);
        let rhs = annulus_identity_rhs(&f, &g, eps).unwrap();
        let scale = 1.0 + lhs.values().map(|v| v.norm()).fold(0.0, f64::max);
        for (k, v) in &lhs {
            let w = rhs.get(k).copied().unwrap_or_default();
            prop_assert!((v - w).norm() < 1e-11 * scale, "mode {k}: {v} vs {w}");
        }
    }
}

#[test]
fn model_orders_agree_within_error() {
    let seed = [0.3, -0.2, 0.15, 0.4, -0.35];
    let trunc = 96;
    let m = CircleOperatorMatrix::diagonal(trunc, |k| Complex64::new(k.abs() as f64 + 1.0, 0.0))
        .add(&smooth_perturbation(trunc, &seed))
        .unwrap();
    let r1 = zeta_det_regularized(&m, 1).unwrap();
    let r2 = zeta_det_regularized(&m, 2).unwrap();
    assert!(
        (r1.log_det - r2.log_det).abs() <= r1.error_estimate + r2.error_estimate,
        "{} vs {} (errors {} {})",
        r1.log_det,
        r2.log_det,
        r1.error_estimate,
        r2.error_estimate
    );
}

#[test]
fn zeta_at_zero_with_one_dimensional_kernel() {
    for seed in [[0.2, -0.1, 0.05], [0.4, 0.3, -0.2], [-0.3, 0.1, 0.25]] {
        let trunc = 64;
        let m = multiplier_abs_nu()
            .to_matrix(trunc)
            .add(&smooth_perturbation(trunc, &seed))
            .unwrap();
        let r = zeta_det_regularized_with(&m, &ZetaDetOptions::with_kernel(1)).unwrap();
        assert!((r.zeta_at_0 + 1.0).abs() < 1e-6, "{}", r.zeta_at_0);
    }
}

#[test]
fn zeta_at_zero_tracks_the_unperturbed_operator() {
    let trunc = 64;
    // |ν| + P₀ has ζ(t) = 1 + 2ζ_R(t), and |ν| + 1 has 1 + 2ζ_H(t, 2).
    let lifted = multiplier_abs_nu()
        .to_matrix(trunc)
        .add(&CircleOperatorMatrix::diagonal(trunc, |k| {
            Complex64::new(if k == 0 { 1.0 } else { 0.0 }, 0.0)
        }))
        .unwrap()
        .add(&smooth_perturbation(trunc, &[0.2, -0.3]))
        .unwrap();
    let r = zeta_det_regularized(&lifted, 4).unwrap();
    assert!(r.zeta_at_0.abs() < 1e-6, "{}", r.zeta_at_0);
    let shifted = CircleOperatorMatrix::diagonal(trunc, |k| Complex64::new(k.abs() as f64 + 1.0, 0.0));
    let r = zeta_det_regularized(&shifted, 4).unwrap();
    assert!((r.zeta_at_0 + 2.0).abs() < 1e-6, "{}", r.zeta_at_0);
}
