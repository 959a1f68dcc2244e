use num_complex::Complex64;

use flatdet::flat_torus::TorusGeometry;
use flatdet::surgery::{
    bfk_assemble, disk_det, glued_dtn_det, log_log_slope, prop3_limit, torus_det_standard, DtnOptions, ExteriorSolver,
    SurgeryScene, TruncationSchedule,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn skew() -> TorusGeometry {
    TorusGeometry::new(c(1.0, 0.0), c(0.3, 1.1))
        .unwrap()
        .scaled(c(1.7, 0.4))
        .unwrap()
}

fn non_constant_part(m: &flatdet::circle_operators::CircleOperatorMatrix) -> f64 {
    let n = m.trunc() as i64;
    let mut e = m.entries().clone();
    let i0 = m.index(0);
    for k in -n..=n {
        e[(i0, m.index(k))] = Complex64::default();
        e[(m.index(k), i0)] = Complex64::default();
    }
    flatdet::circle_operators::CircleOperatorMatrix::new(m.trunc(), e)
        .unwrap()
        .operator_norm()
}

#[test]
fn restriction_is_a_contraction() {
    let t = skew();
    let rho = 0.3;
    for eps in [0.1, 0.03, 0.01] {
        let scene = SurgeryScene::new(t, c(0.2, 0.1), eps).unwrap();
        let s = ExteriorSolver::new(&scene, 24, &DtnOptions::default()).unwrap();
        let norm = s.restriction_operator(rho).unwrap().operator_norm();
        assert!(norm <= 1.0 + 1e-8, "ε = {eps}: ‖R‖ = {norm}");
    }
}

#[test]
fn restriction_decays_at_least_linearly() {
    let t = skew();
    let sweep = [0.08, 0.04, 0.02, 0.01];
    let norms: Vec<f64> = sweep
        .iter()
        .map(|&eps| {
            let scene = SurgeryScene::new(t, c(0.0, 0.0), eps).unwrap();
            let s = ExteriorSolver::new(&scene, 24, &DtnOptions::default()).unwrap();
            non_constant_part(&s.restriction_operator(0.3).unwrap())
        })
        .collect();
    let slope = log_log_slope(&sweep, &norms).unwrap();
    assert!(slope >= 1.0 - 1e-3, "slope {slope}, norms {norms:?}");
}

#[test]
fn prop3_ratio_is_monotone_after_two_terms() {
    let t = TorusGeometry::new(c(1.0, 0.0), c(0.0, 1.0)).unwrap();
    let scene = SurgeryScene::new(t, c(0.0, 0.0), 0.1).unwrap();
    let r = prop3_limit(
        &scene,
        &[0.2, 0.1, 0.05, 0.025, 0.0125, 0.00625],
        &TruncationSchedule::default(),
    )
    .unwrap();
    let ratios: Vec<f64> = r.rows.iter().map(|r| r.ratio).collect();
    let d: Vec<f64> = ratios[2..].windows(2).map(|w| w[1] - w[0]).collect();
    assert!(d.iter().all(|&x| x > 0.0) || d.iter().all(|&x| x < 0.0), "{ratios:?}");
}

#[test]
fn bfk_reassembles_the_torus_determinant() {
    let t = skew();
    let det_t = torus_det_standard(&t);
    let schedule = TruncationSchedule::default();
    let fine = SurgeryScene::new(t, c(0.0, 0.0), 1e-4).unwrap();
    let g = glued_dtn_det(&fine, &schedule).unwrap();
    let exterior_fine = det_t * fine.boundary_length() / (t.area() * disk_det(1e-4).unwrap() * g.det_star);
    let exterior = exterior_fine * 10f64.powf(1.0 / 3.0);
    let coarse = fine.with_eps(1e-3).unwrap();
    let g = glued_dtn_det(&coarse, &schedule).unwrap();
    let det = bfk_assemble(
        exterior,
        disk_det(1e-3).unwrap(),
        g.det_star,
        t.area(),
        coarse.boundary_length(),
    )
    .unwrap();
    assert!((det / det_t - 1.0).abs() < 0.01, "{det} vs {det_t}");
}

#[test]
fn glued_determinant_ignores_the_excision_center() {
    let t = skew();
    let schedule = TruncationSchedule::default();
    let base = glued_dtn_det(&SurgeryScene::new(t, c(0.0, 0.0), 0.05).unwrap(), &schedule).unwrap();
    for z in [c(0.4, 0.3), c(-1.1, 0.7)] {
        let g = glued_dtn_det(&SurgeryScene::new(t, z, 0.05).unwrap(), &schedule).unwrap();
        let tol = 1e-8 + base.scaled.error_estimate + g.scaled.error_estimate;
        assert!(
            (g.det_star.ln() - base.det_star.ln()).abs() < tol,
            "{} vs {}",
            g.det_star,
            base.det_star
        );
    }
}
