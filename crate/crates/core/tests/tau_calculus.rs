use num_complex::Complex64;
use num_rational::Rational64;
use proptest::prelude::*;

use flatdet::special_fn::ModulusPoint;
use flatdet::tau_calculus::{delta1, delta_g, ledger_assemble, sigma_genus1, verify_fay_identity, Genus1Frame};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn frame() -> impl Strategy<Value = Genus1Frame> {
    (-0.5f64..0.5, 0.7f64..1.6).prop_map(|(x, y)| Genus1Frame::new(ModulusPoint::new(c(x, y)).unwrap()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fay_identity_on_random_triples(
        f in frame(),
        x in (0.0f64..1.0, 0.0f64..1.0),
        d in (0.1f64..0.4, 0.0f64..std::f64::consts::TAU),
        e in (-0.4f64..0.4, -0.2f64..0.2),
    ) {
        let s = f.sigma.value();
        let px = c(x.0, 0.0) + s * x.1;
        let py = px + Complex64::from_polar(d.0, d.1);
        let r = verify_fay_identity(px, py, c(e.0, e.1), &f);
        prop_assume!(r.is_ok());
        let r = r.unwrap();
        prop_assert!(r.residual < 1e-8, "{r:?}");
    }

    #[test]
    fn sigma_reciprocity(f in frame(), p in (0.0f64..1.0, 0.05f64..0.85), q in (0.0f64..1.0, 0.05f64..0.85)) {
        let s = f.sigma.value();
        let zp = c(p.0, 0.0) + s * p.1;
        let zq = c(q.0, 0.0) + s * q.1;
        prop_assume!((zp - zq).norm() > 0.05);
        let a = sigma_genus1(zp, zq, &f).unwrap();
        let b = sigma_genus1(zq, zp, &f).unwrap();
        prop_assert!((a * b - 1.0).norm() < 1e-10, "{}", a * b);
    }
}

#[test]
fn ledger_totals_for_all_small_genera() {
    for gp in 1..=25 {
        for gm in 1..=25 {
            let l = ledger_assemble(gp, gm).unwrap();
            assert_eq!(l.delta_total(), Rational64::new(3, 2));
            assert_eq!(l.e_plus_total(), Rational64::from_integer(0));
        }
    }
}

#[test]
fn delta_doubling_recursion() {
    let kappa = 1.3;
    for g in 1..=10u32 {
        let lhs = delta_g(2 * g, kappa).unwrap();
        let rhs = 2.0 * 2f64.sqrt() * kappa * delta_g(g, kappa).unwrap().powi(2);
        assert!((lhs - rhs).abs() < 1e-12 * rhs);
    }
    assert!((delta_g(1, kappa).unwrap() - delta1()).abs() < 1e-16);
}
