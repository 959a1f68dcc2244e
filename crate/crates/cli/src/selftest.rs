use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Rational64;

use flatdet::circle_operators::{
    annulus_dtn_action, corner_heat_coefficient, multiplier_abs_nu, multiplier_nu, trace_norm, CircleOperatorMatrix,
    Coeffs,
};
use flatdet::degeneration_lab::{
    bidiff_case_ia, case_i_root, laurent_fit, monomial_change_of_basis, structure_relations_residual,
    uniformizer_case_i, uniformizer_case_i_dz, uniformizer_case_ia, LaurentRepr, SheetedPoint,
};
use flatdet::flat_torus::{torus_det_formula, torus_green, TorusGeometry};
use flatdet::slit_constants::{slit_dtn, KappaOptions, LaplacianOptions, SlitBc, SlitDomainSpec};
use flatdet::special_fn::{
    epstein_zeta_det, eta, hurwitz_zeta, jacobi_theta1, riemann_theta, ModulusPoint, PeriodMatrix, TruncationPolicy,
};
use flatdet::surgery::{
    bfk_assemble, corollary1_constant, disk_det, dtn_interior_disk, DtnOptions, ExteriorSolver, SurgeryScene,
};
use flatdet::tau_calculus::{
    delta1, delta_g, ledger_assemble, prime_form_genus1, sigma_genus1, tau_factorization_prefactor,
    verify_fay_identity, Genus1Frame,
};
use flatdet::Result;

use crate::args::{Command, DtnAction};
use crate::output::Table;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Collects (name, measured deviation, limit) triples.
struct Checks(Vec<(&'static str, f64, f64)>);

impl Checks {
    fn add(&mut self, name: &'static str, deviation: f64, limit: f64) {
        self.0.push((name, deviation, limit));
    }

    fn exact(&mut self, name: &'static str, ok: bool) {
        self.0.push((name, if ok { 0.0 } else { 1.0 }, 0.0));
    }
}

pub struct SelfTest {
    pub table: Table,
    pub passed: bool,
}

pub fn run(cmd: &Command) -> Result<SelfTest> {
    let mut k = Checks(Vec::new());
    match cmd {
        Command::Genus1Det { .. } => special_fn_and_torus(&mut k)?,
        Command::Degen { .. } | Command::Laurent { .. } => degeneration(&mut k)?,
        Command::Tau { .. } => tau(&mut k)?,
        Command::DeltaG { .. } => delta(&mut k)?,
        Command::Dtn { action } => {
            circle(&mut k)?;
            if let DtnAction::Slit { .. } = action {
                slit(&mut k)?;
            }
        }
        Command::Surgery { .. } => surgery(&mut k)?,
        Command::Kappa0(_) => {
            slit(&mut k)?;
            kappa(&mut k)?;
        }
    }
    let mut table = Table::new(&["check", "deviation", "limit", "status"]);
    let mut passed = true;
    for (name, dev, lim) in k.0 {
        let ok = dev <= lim;
        passed &= ok;
        table.push("self-test", vec![name.into(), dev.into(), lim.into(), ok.into()]);
    }
    Ok(SelfTest { table, passed })
}

fn special_fn_and_torus(k: &mut Checks) -> Result<()> {
    let s = c(0.13, 0.9);
    let m = ModulusPoint::new(s)?;
    let shifted = eta(ModulusPoint::new(s + 1.0)?);
    k.add(
        "eta(σ+1) = e^{iπ/12} eta(σ)",
        (shifted - Complex64::from_polar(1.0, PI / 12.0) * eta(m)).norm(),
        1e-13,
    );
    let p = TruncationPolicy::default();
    k.add("theta1(0) = 0", jacobi_theta1(c(0.0, 0.0), m, &p).value.norm(), 1e-15);
    let z = c(0.21, 0.17);
    k.add(
        "theta1 odd",
        (jacobi_theta1(-z, m, &p).value + jacobi_theta1(z, m, &p).value).norm(),
        1e-14,
    );
    let om = PeriodMatrix::from_modulus(m);
    let v = [c(0.3, -0.1)];
    let tv = riemann_theta(&v, &om, &p)?.value;
    let tm = riemann_theta(&[-v[0]], &om, &p)?.value;
    k.add("theta even", (tv - tm).norm(), 1e-14);
    let om2 = PeriodMatrix::from_modulus(ModulusPoint::new(c(-0.2, 1.3))?);
    let w = c(-0.15, 0.05);
    let prod = tv * riemann_theta(&[w], &om2, &p)?.value;
    let block = riemann_theta(&[v[0], w], &PeriodMatrix::block_diagonal(&om, &om2), &p)?.value;
    k.add("theta block-diagonal factorization", (block - prod).norm(), 1e-13);
    let a = 0.37;
    k.add(
        "hurwitz_zeta(0, a) = 1/2 − a",
        (hurwitz_zeta(c(0.0, 0.0), a)? - (0.5 - a)).norm(),
        1e-13,
    );
    k.add(
        "hurwitz_zeta(2, 1) = π²/6",
        (hurwitz_zeta(c(2.0, 0.0), 1.0)? - PI * PI / 6.0).norm(),
        1e-13,
    );
    let (pa, pb) = (c(1.0, 0.2), c(0.3, 1.4));
    let scale = c(1.3, -0.4);
    let base = epstein_zeta_det(pa, pb)?.det();
    let scaled = epstein_zeta_det(scale * pa, scale * pb)?.det();
    k.add(
        "epstein scaling by |c|²",
        (scaled / (base * scale.norm_sqr()) - 1.0).abs(),
        1e-11,
    );
    let swapped = epstein_zeta_det(pb, -pa)?.det();
    k.add("epstein basis change", (swapped / base - 1.0).abs(), 1e-11);
    let t = TorusGeometry::new(pa, pb)?;
    let ts = TorusGeometry::new(scale * pa, scale * pb)?;
    k.add(
        "torus formula scaling by |c|²",
        (torus_det_formula(&ts) / (torus_det_formula(&t) * scale.norm_sqr()) - 1.0).abs(),
        1e-12,
    );
    let z = c(0.31, 0.47);
    let g = torus_green(z, &t)?.value;
    k.add("green even", (torus_green(-z, &t)?.value - g).abs(), 1e-10);
    k.add(
        "green periodic",
        (torus_green(z + pa, &t)?.value - g)
            .abs()
            .max((torus_green(z + pb, &t)?.value - g).abs()),
        1e-10,
    );
    Ok(())
}

fn degeneration(k: &mut Checks) -> Result<()> {
    let z = c(0.4, -0.3);
    let zero = c(0.0, 0.0);
    k.add(
        "t = 0 plus sheet γ = 2z",
        (uniformizer_case_ia(SheetedPoint::plus(z), zero)? - 2.0 * z).norm(),
        1e-15,
    );
    k.add(
        "t = 0 minus sheet γ = 0",
        uniformizer_case_ia(SheetedPoint::minus(z), zero)?.norm(),
        1e-15,
    );
    let q = c(-0.2, 0.5);
    let w = bidiff_case_ia(SheetedPoint::plus(z), SheetedPoint::plus(q), c(1e-9, 0.0))?;
    k.add(
        "same sheet t → 0 gives 1/(z−ζ)²",
        (w - 1.0 / ((z - q) * (z - q))).norm(),
        1e-6,
    );
    let s = c(1e-7, 0.0);
    k.add(
        "s → 0 plus sheet X → 2z",
        (uniformizer_case_i(SheetedPoint::plus(z), s)? - 2.0 * z).norm(),
        1e-6,
    );
    let mut worst = 0.0f64;
    let s = c(0.07, 0.03);
    for n in -3..=3 {
        let mc = monomial_change_of_basis(n, s);
        for p in [SheetedPoint::plus(c(0.5, 0.4)), SheetedPoint::minus(c(-0.6, 0.2))] {
            let (zz, x) = (p.z, uniformizer_case_i(p, s)?);
            let direct = x.powi(n) * uniformizer_case_i_dz(p, s)?;
            let root = case_i_root(p, s)?;
            let v = mc.eval(zz, root);
            worst = worst.max((v - direct).norm() / direct.norm().max(mc.term_scale(zz, root)));
        }
    }
    k.add("monomial change of basis identity", worst, 1e-12);
    let fit: LaurentRepr = laurent_fit(&|_| c(1.0, 0.0), s, 4)?;
    let mc = monomial_change_of_basis(0, s);
    let mut dev = 0.0f64;
    for (i, a) in fit.a_coeffs.iter().enumerate() {
        let want = mc.p.get(i).copied().unwrap_or_default() * s.powi(mc.s_exponent);
        dev = dev.max((a - want).norm());
    }
    for (i, b) in fit.b_coeffs.iter().enumerate() {
        let want = mc.q.get(i).copied().unwrap_or_default() * s.powi(mc.s_exponent);
        dev = dev.max((b - want).norm());
    }
    k.add("constant sampler reproduces dX", dev, 1e-10);
    let r = structure_relations_residual(|s| laurent_fit(&|_| c(0.0, 0.0), s, 4), c(0.02, 0.01))?;
    k.add("zero sampler has zero residuals", r.max_norm(), 0.0);
    Ok(())
}

fn tau(k: &mut Checks) -> Result<()> {
    let f = Genus1Frame::new(ModulusPoint::new(c(0.1, 1.1))?);
    let (x, y) = (c(0.2, 0.3), c(0.45, 0.1));
    k.add(
        "E(x, y) = −E(y, x)",
        (prime_form_genus1(x, y, &f)? + prime_form_genus1(y, x, &f)?).norm(),
        1e-14,
    );
    let h = 1e-6;
    k.add(
        "E(x, x+h)/h → 1",
        (prime_form_genus1(x, x + h, &f)? / h - 1.0).norm(),
        1e-6,
    );
    k.exact(
        "θ(e) ≈ 0 raises",
        verify_fay_identity(x, y, (1.0 + f.sigma.value()) / 2.0, &f).is_err(),
    );
    let p = c(0.3, 0.4);
    k.add("σ(P, P) = 1", (sigma_genus1(p, p, &f)? - 1.0).norm(), 1e-12);
    let q = c(0.7, 0.2);
    k.add(
        "σ(P, Q)σ(Q, P) = 1",
        (sigma_genus1(p, q, &f)? * sigma_genus1(q, p, &f)? - 1.0).norm(),
        1e-10,
    );
    let mut ok = true;
    for gp in 1..=25 {
        for gm in 1..=25 {
            let l = ledger_assemble(gp, gm)?;
            ok &= l.delta_total() == Rational64::new(3, 2) && l.e_plus_total() == Rational64::from_integer(0);
        }
    }
    k.exact("ledger totals (3/2, 0) up to genus 25", ok);
    let tp = tau_factorization_prefactor(&ledger_assemble(1, 1)?)?;
    k.add("(4/s)^{−1/4} prefactor", (tp.coefficient - 0.5f64.sqrt()).abs(), 1e-15);
    k.exact("s exponent 1/4", tp.s_power == Rational64::new(1, 4));
    delta(k)
}

fn delta(k: &mut Checks) -> Result<()> {
    k.add(
        "δ₁ = 4/(2π)^{4/3}",
        (delta1() - 4.0 / (2.0 * PI).powf(4.0 / 3.0)).abs(),
        1e-16,
    );
    k.add(
        "κ₀ = 1, g = 2 gives 2√2 δ₁²",
        (delta_g(2, 1.0)? - 2.0 * 2f64.sqrt() * delta1() * delta1()).abs(),
        1e-15,
    );
    Ok(())
}

fn circle(k: &mut Checks) -> Result<()> {
    let mut f = Coeffs::new();
    f.insert(3, c(1.0, 0.0));
    k.add(
        "ν e^{3iφ} = 3e^{3iφ}",
        (multiplier_nu().apply(&f)[&3] - 3.0).norm(),
        0.0,
    );
    k.add("|ν| kills constants", multiplier_abs_nu().alpha(0).norm(), 0.0);
    let eps = 0.3;
    let mut a = Coeffs::new();
    a.insert(2, c(0.7, -0.2));
    let out = annulus_dtn_action(&a, &Coeffs::new(), eps);
    k.add(
        "interior mode gives −k a_k ε^k",
        (out[&2] + 2.0 * a[&2] * eps.powi(2)).norm(),
        1e-15,
    );
    let out = annulus_dtn_action(&Coeffs::new(), &a, eps);
    k.add(
        "exterior mode gives k b_k ε^{−k}",
        (out[&2] - 2.0 * a[&2] / eps.powi(2)).norm(),
        1e-14,
    );
    let d = CircleOperatorMatrix::diagonal(5, |k| c(-(k as f64), 0.5));
    let want: f64 = (-5..=5).map(|k| c(-(k as f64), 0.5).norm()).sum();
    k.add("trace norm of a diagonal", (trace_norm(&d) - want).abs(), 1e-12);
    k.add("trace norm of zero", trace_norm(&CircleOperatorMatrix::zeros(5)), 0.0);
    k.add(
        "straight boundary has no corner term",
        corner_heat_coefficient(PI)?.abs(),
        1e-15,
    );
    Ok(())
}

fn slit(k: &mut Checks) -> Result<()> {
    let n = SlitDomainSpec::new(1e-3, SlitBc::Neumann)?;
    let m = slit_dtn(&n, 16)?;
    let diff = m.sub(&multiplier_abs_nu().to_matrix(16))?;
    k.add("vanishing Neumann slit gives diag(|k|)", trace_norm(&diff), 1e-5);
    for bc in [SlitBc::Dirichlet, SlitBc::Neumann] {
        let m = slit_dtn(&SlitDomainSpec::new(0.5, bc)?, 16)?;
        k.add("slit DtN Hermitian", m.hermitian_defect(), 1e-10);
    }
    Ok(())
}

fn kappa(k: &mut Checks) -> Result<()> {
    let opts = KappaOptions {
        trunc: 32,
        laplacian: LaplacianOptions {
            levels: vec![4, 8, 16],
            ..Default::default()
        },
        ..Default::default()
    };
    let r = flatdet::slit_constants::kappa0_estimate(&opts)?;
    k.exact("κ₀ > 0", r.kappa0.value > 0.0);
    Ok(())
}

fn surgery(k: &mut Checks) -> Result<()> {
    k.add(
        "disk_det(1)·Corollary-1 constant = 2",
        (disk_det(1.0)? * corollary1_constant() - 2.0).abs(),
        1e-13,
    );
    let t = TorusGeometry::new(c(1.0, 0.0), c(0.2, 1.1))?;
    let s = ExteriorSolver::new(&SurgeryScene::new(t, c(0.0, 0.0), 0.05)?, 16, &DtnOptions::default())?;
    k.add("exterior DtN Hermitian", s.scaled_dtn().hermitian_defect(), 1e-8);
    k.add(
        "k = 3, ε = 0.1 gives 30",
        (dtn_interior_disk(0.1)?.alpha(3) - 30.0).norm(),
        1e-12,
    );
    k.add("constants in the kernel", dtn_interior_disk(0.1)?.alpha(0).norm(), 0.0);
    k.add(
        "all-ones BFK input gives area/length",
        (bfk_assemble(1.0, 1.0, 1.0, 2.0, 0.5)? - 4.0).abs(),
        0.0,
    );
    let base = bfk_assemble(1.0, 1.0, 1.0, 2.0, 0.5)?;
    k.exact(
        "BFK monotone in each factor",
        bfk_assemble(1.1, 1.0, 1.0, 2.0, 0.5)? > base
            && bfk_assemble(1.0, 1.1, 1.0, 2.0, 0.5)? > base
            && bfk_assemble(1.0, 1.0, 1.1, 2.0, 0.5)? > base,
    );
    Ok(())
}
