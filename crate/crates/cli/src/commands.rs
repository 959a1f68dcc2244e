use num_complex::Complex64;
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use flatdet::circle_operators::{multiplier_abs_nu, trace_norm};
use flatdet::degeneration_lab::{
    bidiff_at_branch, bidiff_at_branch_leading, bidiff_case_ia, bidiff_case_ia_leading, bidiff_case_ib, laurent_fit,
    structure_relations_residual, uniformizer_case_i, uniformizer_case_i_dz, BranchEnd, IbPlacement, Sheet,
    SheetedPoint,
};
use flatdet::flat_torus::{torus_det_formula, TorusGeometry};
use flatdet::slit_constants::{
    det_nu_plus_slit_dtn, kappa0_estimate, KappaOptions, LaplacianOptions, SlitBc, SlitDomainSpec,
};
use flatdet::special_fn::{epstein_zeta_det, ModulusPoint};
use flatdet::surgery::{
    corollary1_ratio, log_log_slope, prop3_limit, DtnOptions, ExteriorSolver, SurgeryScene, TruncationSchedule,
};
use flatdet::tau_calculus::{delta1, delta_g, ledger_assemble, tau_genus1, verify_fay_identity, Genus1Frame};
use flatdet::{Error, Result};

use crate::args::{Command, Common, DtnAction, KappaArgs, SurgeryAction, SurgeryArgs, Sweep, TauAction};
use crate::output::{Cell, Table};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn torus(sigma: Complex64) -> Result<TorusGeometry> {
    Ok(TorusGeometry::from_modulus(ModulusPoint::new(sigma)?))
}

pub fn run(cmd: &Command, common: &Common) -> Result<Table> {
    match cmd {
        Command::Genus1Det { sigma, count } => genus1_det(*sigma, *count, common.seed),
        Command::Degen { eps_sweep } => degen(eps_sweep),
        Command::Laurent { s, points, order } => laurent(*s, points, *order),
        Command::Tau { action } => match action {
            TauAction::Ledger { gmax } => tau_ledger(*gmax),
            TauAction::Delta1 { sigma } => tau_delta1(*sigma),
            TauAction::Fay { sigma, count } => tau_fay(*sigma, *count, common.seed),
        },
        Command::Dtn { action } => match action {
            DtnAction::Torus {
                sigma,
                eps_sweep,
                trunc,
            } => dtn_torus(*sigma, eps_sweep, *trunc),
            DtnAction::Slit { slit_ratio, trunc } => dtn_slit(*slit_ratio, *trunc),
        },
        Command::Surgery { action } => match action {
            SurgeryAction::Prop3(a) => surgery_prop3(a, common.tol),
            SurgeryAction::Corollary1(a) => surgery_corollary1(a, common.tol),
        },
        Command::Kappa0(k) => kappa0(k),
        Command::DeltaG { gmax, kappa0, kappa } => delta_g_table(*gmax, *kappa0, kappa),
    }
}

fn genus1_det(sigma: Complex64, count: usize, seed: u64) -> Result<Table> {
    let mut sigmas = vec![sigma];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..count {
        let im = rng.gen_range(0.2f64.ln()..5.0f64.ln()).exp();
        sigmas.push(c(rng.gen_range(-0.5..0.5), im));
    }
    let rows = sigmas
        .par_iter()
        .map(|&s| {
            let t = torus(s)?;
            let formula = torus_det_formula(&t);
            let oracle = epstein_zeta_det(t.period_a(), t.period_b())?;
            Ok((s, formula, oracle.det(), oracle.error_estimate))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(&[
        "sigma_re",
        "sigma_im",
        "formula",
        "oracle",
        "oracle_log_error",
        "rel_error",
    ]);
    for (s, f, o, e) in rows {
        table.push(
            "torus-det-closed-form",
            vec![
                s.re.into(),
                s.im.into(),
                f.into(),
                o.into(),
                e.into(),
                ((f - o).abs() / f).into(),
            ],
        );
    }
    Ok(table)
}

fn degen(sweep: &Sweep) -> Result<Table> {
    let mags = sweep.points();
    if mags.iter().any(|&m| m >= 1.0) {
        return Err(Error::Domain("degeneration parameters must be below 1".into()));
    }
    let phase = c(0.6, 0.8);
    let p = SheetedPoint::plus(c(0.5, 0.2));
    let q = SheetedPoint::plus(c(0.3, -0.4));
    let qm = SheetedPoint::minus(c(0.3, -0.4));
    let pb = SheetedPoint::plus(c(0.5, 0.3));
    let rows = mags
        .par_iter()
        .map(|&m| {
            let t = phase * m;
            let same = (bidiff_case_ia(p, q, t)? - bidiff_case_ia_leading(p, q, t)).norm();
            let cross = (bidiff_case_ia(p, qm, t)? - bidiff_case_ia_leading(p, qm, t)).norm();
            let ib = bidiff_case_ib(c(0.5, 0.1), c(0.7, 0.1), IbPlacement::Cross, t)?.norm();
            let w = bidiff_at_branch(pb, BranchEnd::Right, t)?;
            let l = bidiff_at_branch_leading(pb, BranchEnd::Right, t);
            Ok([m, same, cross, ib, ((w - l) / l).norm()])
        })
        .collect::<Result<Vec<_>>>()?;
    let col = |i: usize| rows.iter().map(|r| r[i]).collect::<Vec<f64>>();
    let slopes = if rows.len() >= 2 {
        [1, 2, 3, 4].map(|i| log_log_slope(&mags, &col(i)))
    } else {
        [1, 2, 3, 4].map(|_| Ok(f64::NAN))
    };
    let slopes = slopes.into_iter().collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(&[
        "t_abs",
        "ia_same_sheet_err",
        "ia_cross_sheet_err",
        "ib_cross_term",
        "branch_rel_err",
        "slope_ia_same",
        "slope_ia_cross",
        "slope_ib",
        "slope_branch",
    ]);
    for r in rows {
        let mut row: Vec<Cell> = r.iter().map(|&v| v.into()).collect();
        row.extend(slopes.iter().map(|&v| Cell::from(v)));
        table.push("bidifferential-degeneration", row);
    }
    Ok(table)
}

fn laurent(s: Complex64, points: &[Complex64], order: usize) -> Result<Table> {
    let cases: Vec<SheetedPoint> = points
        .iter()
        .flat_map(|&z| [SheetedPoint::plus(z), SheetedPoint::minus(z)])
        .collect();
    let rows = cases
        .par_iter()
        .map(|&q| {
            let fam = |s: Complex64| {
                let xq = uniformizer_case_i(q, s)?;
                let dq = uniformizer_case_i_dz(q, s)?;
                laurent_fit(&move |x| dq / ((x - xq) * (x - xq)), s, order)
            };
            let r = structure_relations_residual(fam, s)?;
            // The sheet swap flips the root, so on the minus sheet a₀ = b₁ reads a₀ = −b₁.
            let mid = match q.sheet {
                Sheet::Plus => r.a0_minus_b1.norm(),
                Sheet::Minus => (r.a0_at_0 + r.b1_at_0).norm(),
            };
            Ok((q, r.b0_at_0.norm(), mid, r.b0_prime_plus_half_b1.norm()))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(&[
        "q_re",
        "q_im",
        "sheet",
        "b0_residual",
        "a0_b1_residual",
        "b0_prime_residual",
        "max_residual",
    ]);
    for (q, a, b, d) in rows {
        let sheet = match q.sheet {
            Sheet::Plus => "plus",
            Sheet::Minus => "minus",
        };
        table.push(
            "laurent-structure-relations",
            vec![
                q.z.re.into(),
                q.z.im.into(),
                sheet.into(),
                a.into(),
                b.into(),
                d.into(),
                a.max(b).max(d).into(),
            ],
        );
    }
    Ok(table)
}

fn tau_ledger(gmax: i64) -> Result<Table> {
    let mut table = Table::new(&["g_plus", "g_minus", "delta_total", "e_plus_total", "status"]);
    for gp in 1..=gmax {
        for gm in 1..=gmax {
            let l = ledger_assemble(gp, gm)?;
            let (d, e) = (l.delta_total(), l.e_plus_total());
            let ok = d == Rational64::new(3, 2) && e == Rational64::from_integer(0);
            table.push(
                "tau-exponent-ledger",
                vec![
                    gp.into(),
                    gm.into(),
                    d.to_string().into(),
                    e.to_string().into(),
                    ok.into(),
                ],
            );
        }
    }
    Ok(table)
}

fn tau_delta1(sigma: Complex64) -> Result<Table> {
    let m = ModulusPoint::new(sigma)?;
    let t = TorusGeometry::from_modulus(m);
    let lhs = delta1() * sigma.im * t.area() * tau_genus1(&Genus1Frame::new(m)).tau_abs_sq;
    let rhs = torus_det_formula(&t);
    let mut table = Table::new(&["sigma_re", "sigma_im", "delta1", "tau_side", "torus_det", "rel_error"]);
    table.push(
        "delta1-closure",
        vec![
            sigma.re.into(),
            sigma.im.into(),
            delta1().into(),
            lhs.into(),
            rhs.into(),
            ((lhs - rhs).abs() / rhs).into(),
        ],
    );
    Ok(table)
}

fn tau_fay(sigma: Complex64, count: usize, seed: u64) -> Result<Table> {
    let f = Genus1Frame::new(ModulusPoint::new(sigma)?);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = Vec::new();
    while pts.len() < count {
        let x = c(rng.gen_range(0.0..1.0), 0.0) + sigma * rng.gen_range(0.0..1.0);
        let y = x + Complex64::from_polar(rng.gen_range(0.1..0.4), rng.gen_range(0.0..std::f64::consts::TAU));
        let e = c(rng.gen_range(-0.4..0.4), rng.gen_range(-0.2..0.2));
        pts.push((x, y, e));
    }
    let rows: Vec<_> = pts
        .par_iter()
        .map(|&(x, y, e)| (x, y, e, verify_fay_identity(x, y, e, &f)))
        .collect();
    let mut table = Table::new(&["x_re", "x_im", "y_re", "y_im", "e_re", "e_im", "residual"]);
    for (x, y, e, r) in rows {
        // Points where θ(e) vanishes violate the identity's precondition.
        let Ok(r) = r else { continue };
        table.push(
            "fay-identity",
            vec![
                x.re.into(),
                x.im.into(),
                y.re.into(),
                y.im.into(),
                e.re.into(),
                e.im.into(),
                r.residual.into(),
            ],
        );
    }
    Ok(table)
}

fn dtn_torus(sigma: Complex64, sweep: &Sweep, trunc: usize) -> Result<Table> {
    let t = torus(sigma)?;
    let eps = sweep.points();
    let nu = multiplier_abs_nu().to_matrix(trunc);
    let norms = eps
        .par_iter()
        .map(|&e| {
            let s = ExteriorSolver::new(&SurgeryScene::new(t, c(0.0, 0.0), e)?, trunc, &DtnOptions::default())?;
            Ok((trace_norm(&s.scaled_dtn().sub(&nu)?), s.residual()))
        })
        .collect::<Result<Vec<_>>>()?;
    let y: Vec<f64> = norms.iter().map(|n| n.0).collect();
    let slope = if eps.len() >= 2 {
        log_log_slope(&eps, &y)?
    } else {
        f64::NAN
    };
    let mut table = Table::new(&["eps", "trunc", "trace_norm", "solve_residual", "slope"])
        .tolerance("solve_residual", DtnOptions::default().residual_tolerance);
    for (e, (n, r)) in eps.iter().zip(norms) {
        table.push(
            "scaled-dtn-trace-norm",
            vec![(*e).into(), trunc.into(), n.into(), r.into(), slope.into()],
        );
    }
    Ok(table)
}

fn dtn_slit(ratio: f64, trunc: usize) -> Result<Table> {
    let d = SlitDomainSpec::new(ratio, SlitBc::Dirichlet)?;
    let mut table = Table::new(&["slit_ratio", "slit_bc", "trunc", "log_det", "zeta_at_0", "log_error"]);
    for (name, spec) in [("dirichlet", d), ("neumann", d.with_bc(SlitBc::Neumann))] {
        let r = det_nu_plus_slit_dtn(&spec, trunc)?;
        table.push(
            "slit-dtn-determinant",
            vec![
                ratio.into(),
                name.into(),
                trunc.into(),
                r.log_det.into(),
                r.zeta_at_0.into(),
                r.error_estimate.into(),
            ],
        );
    }
    Ok(table)
}

fn schedule(a: &SurgeryArgs, tol: Option<f64>) -> TruncationSchedule {
    let d = TruncationSchedule::default();
    TruncationSchedule {
        initial: a.trunc,
        max: d.max.max(4 * a.trunc),
        tolerance: tol.unwrap_or(d.tolerance),
    }
}

fn surgery_prop3(a: &SurgeryArgs, tol: Option<f64>) -> Result<Table> {
    let sched = schedule(a, tol);
    let eps = a.eps_sweep.points();
    let scene = SurgeryScene::new(torus(a.sigma)?, c(0.0, 0.0), eps[0])?;
    let r = prop3_limit(&scene, &eps, &sched)?;
    let mut table = Table::new(&[
        "eps",
        "trunc",
        "det_star",
        "length",
        "ratio",
        "zeta_at_0",
        "log_error",
        "limit",
    ])
    .tolerance("truncation_doubling", sched.tolerance);
    for row in &r.rows {
        table.push(
            "glued-dtn-over-length",
            vec![
                row.eps.into(),
                row.trunc.into(),
                row.det_star.into(),
                row.length.into(),
                row.ratio.into(),
                row.zeta_at_0.into(),
                row.error_estimate.into(),
                r.extrapolated_limit.into(),
            ],
        );
    }
    Ok(table)
}

fn surgery_corollary1(a: &SurgeryArgs, tol: Option<f64>) -> Result<Table> {
    let sched = schedule(a, tol);
    let eps = a.eps_sweep.points();
    let scene = SurgeryScene::new(torus(a.sigma)?, c(0.0, 0.0), eps[0])?;
    let r = corollary1_ratio(&scene, &eps, &sched)?;
    let mut table = Table::new(&["eps", "det_exterior", "predicted", "ratio", "slope"])
        .tolerance("truncation_doubling", sched.tolerance);
    for row in &r.rows {
        table.push(
            "exterior-det-cube-root-law",
            vec![
                row.eps.into(),
                row.det_exterior.into(),
                row.predicted.into(),
                row.ratio.into(),
                r.slope.into(),
            ],
        );
    }
    Ok(table)
}

fn kappa_options(k: &KappaArgs) -> Result<KappaOptions> {
    if k.levels.len() < 3 || k.levels.windows(2).any(|w| w[1] != 2 * w[0]) || k.levels[0] < 4 {
        return Err(Error::Domain(format!(
            "levels {:?} must be at least three doubling grid sizes starting at 4 or more",
            k.levels
        )));
    }
    Ok(KappaOptions {
        slit_ratio: k.slit_ratio,
        trunc: k.trunc,
        laplacian: LaplacianOptions {
            levels: k.levels.clone(),
            ..Default::default()
        },
    })
}

fn kappa0(k: &KappaArgs) -> Result<Table> {
    let opts = kappa_options(k)?;
    let r = kappa0_estimate(&opts)?;
    let mut table = Table::new(&[
        "slit_ratio",
        "quantity",
        "log_value",
        "log_error",
        "value",
        "error",
        "low_confidence",
    ])
    .tolerance(
        "dtn_fit",
        flatdet::circle_operators::ZetaDetOptions::default().fit_tolerance,
    );
    let lc = Cell::from(if r.low_confidence { "yes" } else { "no" });
    let mut push = |tag: &str, name: &str, log_value: f64, log_error: f64| {
        table.push(
            tag,
            vec![
                r.slit_ratio.into(),
                name.into(),
                log_value.into(),
                log_error.into(),
                log_value.exp().into(),
                (log_value.exp() * log_error).into(),
                lc.clone(),
            ],
        );
    };
    push(
        "slit-dtn-determinant",
        "det_nu_plus_dirichlet_dtn",
        r.det_nu_plus_nd.log_det,
        r.det_nu_plus_nd.error_estimate,
    );
    push(
        "slit-dtn-determinant",
        "det_star_nu_plus_neumann_dtn",
        r.det_star_nu_plus_nn.log_det,
        r.det_star_nu_plus_nn.error_estimate,
    );
    push(
        "slit-laplacian-determinant",
        "det_laplacian_dirichlet",
        r.det_lap_d.log_det,
        r.det_lap_d.error,
    );
    push(
        "slit-laplacian-determinant",
        "det_laplacian_mixed",
        r.det_lap_dn.log_det,
        r.det_lap_dn.error,
    );
    push("kappa0-prefactor", "prefactor", r.prefactor.ln(), 0.0);
    push("kappa0", "kappa0", r.kappa0.value.ln(), r.kappa0.error / r.kappa0.value);
    Ok(table)
}

fn delta_g_table(gmax: u32, given: Option<f64>, k: &KappaArgs) -> Result<Table> {
    let (kappa, rel) = match given {
        Some(v) => (v, 0.0),
        None => {
            let r = kappa0_estimate(&kappa_options(k)?)?;
            (r.kappa0.value, r.kappa0.error / r.kappa0.value)
        }
    };
    let mut table = Table::new(&["g", "kappa0", "delta_g", "error"]);
    for g in 1..=gmax {
        let v = delta_g(g, kappa)?;
        table.push(
            "delta-g",
            vec![g.into(), kappa.into(), v.into(), (v * (g - 1) as f64 * rel).into()],
        );
    }
    Ok(table)
}
