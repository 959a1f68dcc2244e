use num_complex::Complex64;
use proptest::prelude::*;

use flatdet::degeneration_lab::{
    bidiff_case_ia, bidiff_case_ia_leading, case_i_root, laurent_fit, monomial_change_of_basis, uniformizer_case_i,
    uniformizer_case_i_dz, SheetedPoint,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn monomial_change_is_exact(
        n in -5i32..=5,
        s in (-0.3f64..0.3, -0.3f64..0.3),
        z in (0.5f64..2.0, 0.0f64..std::f64::consts::TAU),
        plus in any::<bool>(),
    ) {
        let s = c(s.0, s.1);
        prop_assume!(s.norm() > 1e-3);
        let z = Complex64::from_polar(z.0, z.1);
        let p = if plus { SheetedPoint::plus(z) } else { SheetedPoint::minus(z) };
        let x = uniformizer_case_i(p, s).unwrap();
        let dx = uniformizer_case_i_dz(p, s).unwrap();
        let root = case_i_root(p, s).unwrap();
        let m = monomial_change_of_basis(n, s);
        let lhs = x.powi(n) * dx;
        let rhs = m.eval(z, root);
        let scale = lhs.norm().max(m.term_scale(z, root));
        prop_assert!((lhs - rhs).norm() < 1e-12 * scale, "{lhs} vs {rhs}");
    }

    #[test]
    fn ia_cross_sheet_coefficient_is_negative(z in 0.2f64..0.7, w in 0.2f64..0.7, t in 1e-5f64..1e-3) {
        prop_assume!((z - w).abs() > 0.05);
        let p = SheetedPoint::plus(c(z, 0.0));
        let q = SheetedPoint::minus(c(w, 0.0));
        let v = bidiff_case_ia(p, q, c(t, 0.0)).unwrap();
        prop_assert!(v.re < 0.0 && v.im.abs() < 1e-12 * v.re.abs());
        let lead = bidiff_case_ia_leading(p, q, c(t, 0.0));
        prop_assert!(((v - lead) / lead).norm() < 0.05);
    }
}

#[test]
fn laurent_refit_reproduces_sampler_on_finer_grid() {
    for (s, zq) in [(c(0.05, 0.02), c(2.5, -0.4)), (c(-0.03, 0.04), c(-1.5, 2.0))] {
        let q = SheetedPoint::plus(zq);
        let xq = uniformizer_case_i(q, s).unwrap();
        let dq = uniformizer_case_i_dz(q, s).unwrap();
        let f = move |x: Complex64| dq / ((x - xq) * (x - xq));
        let l = laurent_fit(&f, s, 8).unwrap();
        for r in [0.05, 0.2, 0.6] {
            for j in 0..97 {
                let x = Complex64::from_polar(r, 2.0 * std::f64::consts::PI * j as f64 / 97.0);
                let e = f(x);
                assert!((l.evaluate_x(x) - e).norm() < 1e-9 * (1.0 + e.norm()), "r = {r}");
            }
        }
    }
}
