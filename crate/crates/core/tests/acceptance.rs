//! Acceptance suite: one line per criterion with measured values.
//!
//! Runs as a plain binary (harness = false) so the verdict lines always
//! appear in the test log. The process fails when a criterion's verdict
//! differs from the expected one; criterion 7 is a recorded deviation whose
//! measured slope must match the ε² analysis instead.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use flatdet::circle_operators::{
    annulus_dtn_action, annulus_identity_rhs, annulus_traces, det_star_abs_nu, h0_slit_disk, multiplier_abs_nu,
    trace_norm, zeta_det_regularized_with, Coeffs, ZetaDetOptions,
};
use flatdet::degeneration_lab::{
    bidiff_at_branch, bidiff_at_branch_leading, bidiff_case_ia, bidiff_case_ia_leading, bidiff_case_ib, laurent_fit,
    structure_relations_residual, uniformizer_case_i, uniformizer_case_i_dz, BranchEnd, IbPlacement, Sheet,
    SheetedPoint,
};
use flatdet::flat_torus::{torus_det_formula, torus_det_spectral, TorusGeometry};
use flatdet::slit_constants::{
    det_nu_plus_slit_dtn, kappa0_estimate, slit_laplacian_det_estimate, KappaOptions, LaplacianOptions, SlitBc,
    SlitDomainSpec,
};
use flatdet::special_fn::ModulusPoint;
use flatdet::surgery::{
    corollary1_ratio, disk_det, log_log_slope, prop3_limit, section33_constant_algebra, DtnOptions, ExteriorSolver,
    SurgeryScene, TruncationSchedule,
};
use flatdet::tau_calculus::{delta1, ledger_assemble, tau_factorization_prefactor, tau_genus1, Genus1Frame};

type Outcome = Result<(bool, String), String>;

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    /// Expected verdict; false marks a recorded deviation.
    expect_pass: bool,
    run: fn() -> Outcome,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_sigmas(seed: u64, n: usize) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let im = rng.gen_range(0.2f64.ln()..5.0f64.ln()).exp();
            c(rng.gen_range(-0.5..0.5), im)
        })
        .collect()
}

fn genus1_closure() -> Outcome {
    let mut worst = 0.0f64;
    for s in random_sigmas(11, 5) {
        let t = TorusGeometry::from_modulus(ModulusPoint::new(s).map_err(|e| e.to_string())?);
        let spec = torus_det_spectral(&t).map_err(|e| e.to_string())?.det();
        let formula = torus_det_formula(&t);
        worst = worst.max((spec - formula).abs() / formula);
    }
    Ok((worst < 1e-10, format!("max relative error {worst:.2e} (< 1e-10)")))
}

fn delta1_closure() -> Outcome {
    let mut worst = 0.0f64;
    for s in random_sigmas(12, 5) {
        let m = ModulusPoint::new(s).map_err(|e| e.to_string())?;
        let f = Genus1Frame::new(m);
        let t = TorusGeometry::from_modulus(m);
        let lhs = delta1() * s.im * t.area() * tau_genus1(&f).tau_abs_sq;
        let rhs = torus_det_formula(&t);
        worst = worst.max((lhs - rhs).abs() / rhs);
    }
    Ok((
        worst < 1e-10,
        format!("δ₁ = {:.10}, max relative error {worst:.2e} (< 1e-10)", delta1()),
    ))
}

fn decade(lo: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo * 10f64.powf(i as f64 / (n - 1) as f64)).collect()
}

fn degeneration_slopes() -> Outcome {
    let phase = c(0.6, 0.8);
    let mags = decade(1e-3, 6);
    let p = SheetedPoint::plus(c(0.5, 0.2));
    let q = SheetedPoint::plus(c(0.3, -0.4));
    let qm = SheetedPoint::minus(c(0.3, -0.4));
    let e = |r: flatdet::Result<Complex64>| r.map_err(|e| e.to_string());

    let mut same = Vec::new();
    let mut cross = Vec::new();
    let mut cross_sign_ok = true;
    let mut ib = Vec::new();
    let mut prop1 = Vec::new();
    for &m in &mags {
        let t = phase * m;
        same.push((e(bidiff_case_ia(p, q, t))? - bidiff_case_ia_leading(p, q, t)).norm());
        let exact = e(bidiff_case_ia(p, qm, t))?;
        let lead = bidiff_case_ia_leading(p, qm, t);
        cross_sign_ok &= (exact / lead).re > 0.9;
        cross.push((exact - lead).norm());
        ib.push(e(bidiff_case_ib(c(0.5, 0.1), c(0.7, 0.1), IbPlacement::Cross, t))?.norm());
        let pb = SheetedPoint::plus(c(0.5, 0.3));
        let w = e(bidiff_at_branch(pb, BranchEnd::Right, t))?;
        let l = bidiff_at_branch_leading(pb, BranchEnd::Right, t);
        prop1.push(((w - l) / l).norm());
    }
    let slopes = [
        ("Ia same-sheet", log_log_slope(&mags, &same), 2.0),
        ("Ia cross-sheet", log_log_slope(&mags, &cross), 2.0),
        ("Ib cross-term", log_log_slope(&mags, &ib), 1.0),
        ("branch-point relative", log_log_slope(&mags, &prop1), 1.0),
    ];
    let mut ok = cross_sign_ok;
    let mut parts = Vec::new();
    for (name, s, want) in slopes {
        let s = s.map_err(|e| e.to_string())?;
        ok &= (s - want).abs() < 0.05;
        parts.push(format!("{name} {s:.4} (want {want})"));
    }
    parts.push(format!(
        "cross-sheet sign {}",
        if cross_sign_ok { "ok" } else { "wrong" }
    ));
    Ok((ok, parts.join(", ")))
}

fn laurent_structure() -> Outcome {
    let mut worst = 0.0f64;
    for zq in [c(3.0, 0.2), c(-2.0, 1.5)] {
        for q in [SheetedPoint::plus(zq), SheetedPoint::minus(zq)] {
            let fam = |s: Complex64| {
                let xq = uniformizer_case_i(q, s)?;
                let dq = uniformizer_case_i_dz(q, s)?;
                laurent_fit(&move |x| dq / ((x - xq) * (x - xq)), s, 6)
            };
            let r = structure_relations_residual(fam, c(0.02, 0.01)).map_err(|e| e.to_string())?;
            // On the minus sheet the root flips sign, so b ↦ −b and a₀ = b₁ reads a₀ = −b₁.
            let res = match q.sheet {
                Sheet::Plus => r.max_norm(),
                Sheet::Minus => r
                    .b0_at_0
                    .norm()
                    .max((r.a0_at_0 + r.b1_at_0).norm())
                    .max(r.b0_prime_plus_half_b1.norm()),
            };
            worst = worst.max(res);
        }
    }
    Ok((
        worst < 1e-6,
        format!("max residual of the three relations over both sheets {worst:.2e} (< 1e-6)"),
    ))
}

fn exponent_ledger() -> Outcome {
    let mut ok = true;
    let mut prefactor = None;
    for gp in 1..=25 {
        for gm in 1..=25 {
            let l = ledger_assemble(gp, gm).map_err(|e| e.to_string())?;
            ok &= l.delta_total() == Rational64::new(3, 2) && l.e_plus_total() == Rational64::from_integer(0);
            let tp = tau_factorization_prefactor(&l).map_err(|e| e.to_string())?;
            ok &= (tp.coefficient - 0.5f64.sqrt()).abs() < 1e-15 && tp.s_power == Rational64::new(1, 4);
            prefactor.get_or_insert(tp);
        }
    }
    let tp = prefactor.expect("non-empty range");
    Ok((
        ok,
        format!(
            "Δ-power 3/2 and E₊-power 0 for 625 genus pairs; derived prefactor {:.12}·s^{}",
            tp.coefficient, tp.s_power
        ),
    ))
}

fn operator_anchors() -> Outcome {
    let closed = det_star_abs_nu();
    let e1 = (closed - 2.0 * PI).abs();
    let numeric = zeta_det_regularized_with(&multiplier_abs_nu().to_matrix(200), &ZetaDetOptions::with_kernel(1))
        .map_err(|e| e.to_string())?
        .det();
    let e2 = (numeric - 2.0 * PI).abs() / (2.0 * PI);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut e3 = 0.0f64;
    for &eps in &[0.5f64, 0.1, 0.02] {
        let mut a = Coeffs::new();
        let mut b = Coeffs::new();
        for k in -8i64..=8 {
            a.insert(k, c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            if k != 0 {
                let s = eps.powi(k.unsigned_abs() as i32);
                b.insert(k, c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * s);
            }
        }
        let lhs = annulus_dtn_action(&a, &b, eps);
        let (f, g) = annulus_traces(&a, &b, eps);
        let rhs = annulus_identity_rhs(&f, &g, eps).map_err(|e| e.to_string())?;
        for (k, v) in &lhs {
            let w = rhs.get(k).copied().unwrap_or_default();
            e3 = e3.max((v - w).norm() / v.norm().max(1.0));
        }
    }
    let h0 = h0_slit_disk();
    let ok = e1 < 1e-12 && e2 < 1e-6 && e3 < 1e-12 && h0 == Rational64::new(1, 24);
    Ok((
        ok,
        format!("det*|ν| closed form err {e1:.1e}, numeric N=200 rel err {e2:.1e}, identity err {e3:.1e}, h₀ = {h0}"),
    ))
}

fn square_scene(eps: f64) -> Result<SurgeryScene, String> {
    let t = TorusGeometry::new(c(1.0, 0.0), c(0.0, 1.0)).map_err(|e| e.to_string())?;
    SurgeryScene::new(t, c(0.0, 0.0), eps).map_err(|e| e.to_string())
}

fn lemma4() -> Outcome {
    let sweep = [0.1, 0.03, 0.01, 0.003, 0.001];
    let nu = multiplier_abs_nu().to_matrix(32);
    let mut norms = Vec::new();
    for &eps in &sweep {
        let s = ExteriorSolver::new(&square_scene(eps)?, 32, &DtnOptions::default()).map_err(|e| e.to_string())?;
        norms.push(trace_norm(&s.scaled_dtn().sub(&nu).map_err(|e| e.to_string())?));
    }
    let slope = log_log_slope(&sweep, &norms).map_err(|e| e.to_string())?;
    let pass = (0.9..=1.5).contains(&slope);
    let analysis = (1.8..=2.2).contains(&slope);
    Ok((
        pass,
        format!(
            "slope {slope:.4} (window [0.9, 1.5]); norms {}; {}",
            norms.iter().map(|v| format!("{v:.3e}")).collect::<Vec<_>>().join(" "),
            if analysis {
                "matches the O(ε²) rate of a smooth Green regular part, see the decisions ledger"
            } else {
                "does not match the O(ε²) analysis"
            }
        ),
    ))
}

fn prop3_and_corollary1() -> Outcome {
    let schedule = TruncationSchedule::default();
    let scene = square_scene(0.1)?;
    let p3 = prop3_limit(&scene, &[0.1, 0.03, 0.01, 0.003, 0.001], &schedule).map_err(|e| e.to_string())?;
    let lim = p3.extrapolated_limit;
    let e_lim = (lim - 0.5).abs() / 0.5;
    let c1 = corollary1_ratio(&scene, &[1e-2, 3e-3, 1e-3], &schedule).map_err(|e| e.to_string())?;
    let ratio = c1.rows.last().expect("three rows").ratio;
    let ok = e_lim < 0.01 && (c1.slope - 1.0 / 3.0).abs() < 0.02 && (ratio - 1.0).abs() < 0.02;
    Ok((
        ok,
        format!(
            "limit {lim:.7} (rel err {e_lim:.1e}), exterior-det slope {:.5} (1/3 ± 0.02), ratio at 1e-3 {ratio:.6} (± 2%)",
            c1.slope
        ),
    ))
}

fn constant_algebra() -> Outcome {
    match section33_constant_algebra() {
        Ok(r) => {
            let ok =
                r.checks.iter().all(|c| c.derived == c.stated) && r.slit_disk_eps_exponent == Rational64::new(-1, 12);
            Ok((
                ok,
                format!(
                    "{} exact ledger checks, slit-disk ε exponent {}, κ₀ prefactor {}",
                    r.checks.len(),
                    r.slit_disk_eps_exponent,
                    r.kappa0_prefactor
                ),
            ))
        }
        Err(e) => Ok((false, e.to_string())),
    }
}

fn kappa0_properties() -> Outcome {
    let d = SlitDomainSpec::new(0.5, SlitBc::Dirichlet).map_err(|e| e.to_string())?;
    let zd = det_nu_plus_slit_dtn(&d, 128).map_err(|e| e.to_string())?.zeta_at_0;
    let zn = det_nu_plus_slit_dtn(&d.with_bc(SlitBc::Neumann), 128)
        .map_err(|e| e.to_string())?
        .zeta_at_0;
    let coarse = kappa0_estimate(&KappaOptions {
        laplacian: LaplacianOptions {
            levels: vec![6, 12, 24],
            ..Default::default()
        },
        ..Default::default()
    })
    .map_err(|e| e.to_string())?;
    let fine = kappa0_estimate(&KappaOptions::default()).map_err(|e| e.to_string())?;
    let disk = slit_laplacian_det_estimate(None, &LaplacianOptions::default()).map_err(|e| e.to_string())?;
    let weis = disk_det(1.0).map_err(|e| e.to_string())?;
    let disk_err = (disk.det() - weis).abs() / weis;
    let ok = zd.abs() < 1e-6
        && (zn + 1.0).abs() < 1e-6
        && coarse.kappa0.agrees_with(&fine.kappa0)
        && disk_err < 0.05
        && fine.kappa0.value > 0.0;
    Ok((
        ok,
        format!(
            "ζ(0) D {zd:.1e}, N {zn:.8}; κ₀ {:.4} ± {:.4} vs {:.4} ± {:.4}; disk det {:.6} vs {weis:.6} ({:.1e})",
            coarse.kappa0.value,
            coarse.kappa0.error,
            fine.kappa0.value,
            fine.kappa0.error,
            disk.det(),
            disk_err
        ),
    ))
}

fn main() {
    let criteria = [
        Criterion {
            id: 1,
            name: "genus-1 closure",
            limit: Duration::from_secs(5),
            expect_pass: true,
            run: genus1_closure,
        },
        Criterion {
            id: 2,
            name: "δ₁ closure",
            limit: Duration::from_secs(5),
            expect_pass: true,
            run: delta1_closure,
        },
        Criterion {
            id: 3,
            name: "degeneration slopes",
            limit: Duration::from_secs(30),
            expect_pass: true,
            run: degeneration_slopes,
        },
        Criterion {
            id: 4,
            name: "Laurent structure relations",
            limit: Duration::from_secs(10),
            expect_pass: true,
            run: laurent_structure,
        },
        Criterion {
            id: 5,
            name: "exponent ledger",
            limit: Duration::from_secs(1),
            expect_pass: true,
            run: exponent_ledger,
        },
        Criterion {
            id: 6,
            name: "operator anchors",
            limit: Duration::from_secs(60),
            expect_pass: true,
            run: operator_anchors,
        },
        Criterion {
            id: 7,
            name: "DtN trace-norm slope",
            limit: Duration::from_secs(120),
            expect_pass: false,
            run: lemma4,
        },
        Criterion {
            id: 8,
            name: "glued det* limit and exterior-det law",
            limit: Duration::from_secs(300),
            expect_pass: true,
            run: prop3_and_corollary1,
        },
        Criterion {
            id: 9,
            name: "constant algebra",
            limit: Duration::from_secs(1),
            expect_pass: true,
            run: constant_algebra,
        },
        Criterion {
            id: 10,
            name: "κ₀ properties",
            limit: Duration::from_secs(900),
            expect_pass: true,
            run: kappa0_properties,
        },
    ];
    let mut unexpected = 0;
    for cr in &criteria {
        let start = Instant::now();
        let outcome = (cr.run)();
        let elapsed = start.elapsed();
        let in_time = elapsed <= cr.limit;
        let (pass, detail) = match outcome {
            Ok((p, d)) => (p && in_time, d),
            Err(e) => (false, format!("error: {e}")),
        };
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {verdict} {} [{:.1}s / {}s] {detail}",
            cr.id,
            cr.name,
            elapsed.as_secs_f64(),
            cr.limit.as_secs()
        );
        let as_expected = if cr.expect_pass {
            pass
        } else {
            // A recorded deviation is accepted only at the analysed rate.
            pass || (in_time && detail.contains("matches the O(ε²)"))
        };
        if !as_expected {
            unexpected += 1;
        }
    }
    if unexpected > 0 {
        println!("{unexpected} criteria deviate from the expected verdicts");
        std::process::exit(1);
    }
    println!("all verdicts as expected (criterion 7 is a recorded deviation)");
}
