use std::collections::BTreeMap;
use std::fmt;

use num_rational::Rational64;
use num_traits::Zero;
use serde::Serialize;

use crate::circle_operators::h0_slit_disk;
use crate::error::{Error, Result};

/// Multiplicative constants tracked by exact exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantBase {
    Two,
    Pi,
    /// Euler's number, for the 5/12 in e^{2ζ′(−1)+5/12}.
    E,
    /// e^{ζ′(−1)}.
    EZetaPrimeMinus1,
    Eps,
    Area,
    /// det*Δ on the closed surface.
    DetStarDelta,
    /// det(|ν| + N₁^{int,D}).
    DetNuPlusND,
    /// det(Δ, B(1)∖I(1)).
    DetLapD,
    /// det*(|ν| + N₁^{int,N}).
    DetStarNuPlusNN,
    /// det(Δ, B(1)∖I(1); D, N).
    DetLapDN,
}

impl fmt::Display for ConstantBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ConstantBase::Two => "2",
            ConstantBase::Pi => "pi",
            ConstantBase::E => "e",
            ConstantBase::EZetaPrimeMinus1 => "e^zeta'(-1)",
            ConstantBase::Eps => "eps",
            ConstantBase::Area => "Area",
            ConstantBase::DetStarDelta => "det*Delta",
            ConstantBase::DetNuPlusND => "det(|nu|+N^D)",
            ConstantBase::DetLapD => "det(Delta,B\\I)",
            ConstantBase::DetStarNuPlusNN => "det*(|nu|+N^N)",
            ConstantBase::DetLapDN => "det(Delta,B\\I;D,N)",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConstantAtom {
    pub base: ConstantBase,
    #[serde(serialize_with = "ser_rational")]
    pub exponent: Rational64,
}

fn ser_rational<S: serde::Serializer>(r: &Rational64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// A product Π base^exponent with exact exponents.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConstantLedger {
    atoms: BTreeMap<ConstantBase, Rational64>,
}

impl Serialize for ConstantLedger {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.atoms())
    }
}

fn q(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

impl ConstantLedger {
    pub fn one() -> Self {
        ConstantLedger::default()
    }

    pub fn atom(base: ConstantBase, exponent: Rational64) -> Self {
        ConstantLedger::one().times(base, exponent)
    }

    /// Multiplies by base^exponent.
    pub fn times(mut self, base: ConstantBase, exponent: Rational64) -> Self {
        let e = self.atoms.entry(base).or_insert_with(Rational64::zero);
        *e += exponent;
        if e.is_zero() {
            self.atoms.remove(&base);
        }
        self
    }

    pub fn mul(&self, other: &ConstantLedger) -> Self {
        other.atoms.iter().fold(self.clone(), |acc, (&b, &e)| acc.times(b, e))
    }

    pub fn pow(&self, p: Rational64) -> Self {
        self.atoms
            .iter()
            .fold(ConstantLedger::one(), |acc, (&b, &e)| acc.times(b, e * p))
    }

    pub fn div(&self, other: &ConstantLedger) -> Self {
        self.mul(&other.pow(q(-1, 1)))
    }

    pub fn exponent(&self, base: ConstantBase) -> Rational64 {
        self.atoms.get(&base).copied().unwrap_or_else(Rational64::zero)
    }

    pub fn atoms(&self) -> Vec<ConstantAtom> {
        self.atoms
            .iter()
            .map(|(&base, &exponent)| ConstantAtom { base, exponent })
            .collect()
    }

    /// Atoms of self/other; empty exactly when the two products agree.
    pub fn mismatch(&self, other: &ConstantLedger) -> Vec<ConstantAtom> {
        self.div(other).atoms()
    }
}

impl fmt::Display for ConstantLedger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.atoms.iter().map(|(b, e)| format!("{b}^({e})")).collect();
        f.write_str(&parts.join(" * "))
    }
}

/// One derived-versus-stated comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LedgerCheck {
    pub name: &'static str,
    pub derived: ConstantLedger,
    pub stated: ConstantLedger,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Section33Report {
    pub checks: Vec<LedgerCheck>,
    /// Exponent of ε from the slit-disk heat coefficient, −2h₀.
    #[serde(serialize_with = "ser_rational")]
    pub slit_disk_eps_exponent: Rational64,
    /// Closed prefactor of κ₀ (powers of 2 and e).
    pub kappa0_prefactor: ConstantLedger,
}

use ConstantBase::*;

fn disk_det_ledger() -> ConstantLedger {
    ConstantLedger::one()
        .times(Two, q(-1, 6))
        .times(Pi, q(-1, 2))
        .times(Eps, q(-1, 3))
        .times(EZetaPrimeMinus1, q(-2, 1))
        .times(E, q(-5, 12))
}

/// det*(A/ε) = ε^{−ζ_A(0)} det*A.
fn rescale_by_inverse_eps(l: &ConstantLedger, zeta0: Rational64) -> ConstantLedger {
    l.clone().times(Eps, -zeta0)
}

/// Checks the gluing constants of the disk, the single circle and the
/// symmetric double exactly, returning an error that names the first
/// offending atom.
pub fn section33_constant_algebra() -> Result<Section33Report> {
    // det*|ν| = 2π with ζ_{|ν|}(0) = −1.
    let zeta_abs_nu = q(-1, 1);
    let det_abs_nu = ConstantLedger::atom(Two, q(1, 1)).times(Pi, q(1, 1));
    // det*(2|ν|) = 2^{ζ(0)} det*|ν|, then det*(N₁+N₂) = det*(2|ν|/ε).
    let det_two_nu = det_abs_nu.clone().times(Two, zeta_abs_nu);
    let det_glued = rescale_by_inverse_eps(&det_two_nu, zeta_abs_nu);
    let length = ConstantLedger::atom(Two, q(1, 1))
        .times(Pi, q(1, 1))
        .times(Eps, q(1, 1));
    let area = ConstantLedger::atom(Area, q(1, 1));
    let det_star = ConstantLedger::atom(DetStarDelta, q(1, 1));

    // det(Δ, X∖B(ε)) from det*Δ = Area/length · det(X∖B) det(B) det*(N₁+N₂).
    let exterior = det_star.mul(&length).div(&area.mul(&disk_det_ledger()).mul(&det_glued));
    let exterior_stated = ConstantLedger::one()
        .times(Two, q(7, 6))
        .times(Pi, q(1, 2))
        .times(EZetaPrimeMinus1, q(2, 1))
        .times(E, q(5, 12))
        .times(DetStarDelta, q(1, 1))
        .times(Area, q(-1, 1))
        .times(Eps, q(1, 3));

    let h0 = h0_slit_disk();
    let slit_eps = -q(2, 1) * h0;

    // Dirichlet slit: ζ(0) = 0, no kernel.
    let zeta_d = q(0, 1);
    let det_nd = rescale_by_inverse_eps(&ConstantLedger::atom(DetNuPlusND, q(1, 1)), zeta_d);
    let dirichlet = exterior
        .mul(&ConstantLedger::atom(DetLapD, q(1, 1)).times(Eps, slit_eps))
        .mul(&det_nd);
    let dirichlet_stated = ConstantLedger::one()
        .times(Two, q(7, 6))
        .times(Pi, q(1, 2))
        .times(EZetaPrimeMinus1, q(2, 1))
        .times(E, q(5, 12))
        .times(DetStarDelta, q(1, 1))
        .times(DetNuPlusND, q(1, 1))
        .times(DetLapD, q(1, 1))
        .times(Area, q(-1, 1))
        .times(Eps, q(1, 4));

    // Neumann slit: ζ(0) = −1, one-dimensional kernel, Area/length factor.
    let zeta_n = q(-1, 1);
    let det_nn = rescale_by_inverse_eps(&ConstantLedger::atom(DetStarNuPlusNN, q(1, 1)), zeta_n);
    let neumann = area
        .div(&length)
        .mul(&exterior)
        .mul(&ConstantLedger::atom(DetLapDN, q(1, 1)).times(Eps, slit_eps))
        .mul(&det_nn);
    let neumann_stated = ConstantLedger::one()
        .times(Two, q(1, 6))
        .times(Pi, q(-1, 2))
        .times(EZetaPrimeMinus1, q(2, 1))
        .times(E, q(5, 12))
        .times(DetStarDelta, q(1, 1))
        .times(DetStarNuPlusNN, q(1, 1))
        .times(DetLapDN, q(1, 1))
        .times(Eps, q(1, 4));

    let kappa0_prefactor = ConstantLedger::one()
        .times(Two, q(1, 3))
        .times(EZetaPrimeMinus1, q(4, 1))
        .times(E, q(5, 6));
    let kappa0 = kappa0_prefactor
        .clone()
        .times(DetNuPlusND, q(1, 1))
        .times(DetLapD, q(1, 1))
        .times(DetStarNuPlusNN, q(1, 1))
        .times(DetLapDN, q(1, 1));
    let doubled_stated = ConstantLedger::atom(Two, q(1, 1))
        .mul(&kappa0)
        .times(Area, q(-1, 1))
        .times(DetStarDelta, q(2, 1))
        .times(Eps, q(1, 2));

    let checks = vec![
        LedgerCheck {
            name: "exterior determinant",
            derived: exterior,
            stated: exterior_stated,
        },
        LedgerCheck {
            name: "Dirichlet half",
            derived: dirichlet.clone(),
            stated: dirichlet_stated.clone(),
        },
        LedgerCheck {
            name: "Neumann half",
            derived: neumann.clone(),
            stated: neumann_stated.clone(),
        },
        LedgerCheck {
            name: "symmetric double",
            derived: dirichlet_stated.mul(&neumann_stated),
            stated: doubled_stated.clone(),
        },
        LedgerCheck {
            name: "symmetric double from derived halves",
            derived: dirichlet.mul(&neumann),
            stated: doubled_stated,
        },
    ];
    for c in &checks {
        if let Some(a) = c.derived.mismatch(&c.stated).first() {
            return Err(Error::Inconsistent(format!(
                "{}: {} has excess exponent {}",
                c.name, a.base, a.exponent
            )));
        }
    }
    Ok(Section33Report {
        checks,
        slit_disk_eps_exponent: slit_eps,
        kappa0_prefactor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algebra_closes() {
        let r = section33_constant_algebra().unwrap();
        assert_eq!(r.slit_disk_eps_exponent, q(-1, 12));
        assert_eq!(r.kappa0_prefactor.exponent(Two), q(1, 3));
        for c in &r.checks {
            assert_eq!(c.derived, c.stated, "{}", c.name);
        }
    }

    #[test]
    fn mismatch_names_atom() {
        let a = ConstantLedger::atom(Two, q(7, 6)).times(Eps, q(1, 4));
        let b = ConstantLedger::atom(Two, q(7, 6)).times(Eps, q(1, 2));
        let m = a.mismatch(&b);
        assert_eq!(
            m,
            vec![ConstantAtom {
                base: Eps,
                exponent: q(-1, 4)
            }]
        );
    }

    #[test]
    fn eps_powers_add() {
        let a = ConstantLedger::atom(Eps, q(1, 4));
        assert_eq!(a.mul(&a).exponent(Eps), q(1, 2));
        assert_eq!(a.div(&a), ConstantLedger::one());
    }
}
