use std::collections::BTreeMap;
use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Quantities whose powers are tracked through the degeneration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Atom {
    /// Δ(s) = 4/s.
    DeltaS,
    /// E₊(P, P₊).
    EPlusPPplus,
    /// E₋(D⁻_k, P₋).
    EMinus,
    /// σ₊(P₊, P).
    SigmaPlus,
    /// σ₋(D⁻_k, P₋).
    SigmaMinus,
    CPlus,
    CMinus,
    ThetaPlus,
    ThetaMinus,
    /// Unitary factors; counted, never evaluated.
    Phase,
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Atom::DeltaS => "Delta_s",
            Atom::EPlusPPplus => "E_plus_P_Pplus",
            Atom::EMinus => "E_minus",
            Atom::SigmaPlus => "sigma_plus",
            Atom::SigmaMinus => "sigma_minus",
            Atom::CPlus => "C_plus",
            Atom::CMinus => "C_minus",
            Atom::ThetaPlus => "theta_plus",
            Atom::ThetaMinus => "theta_minus",
            Atom::Phase => "phase",
        };
        f.write_str(s)
    }
}

/// One atom power contributed by one factor of the product.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LedgerEntry {
    pub factor: &'static str,
    pub atom: Atom,
    #[serde(serialize_with = "ser_rational")]
    pub exponent: Rational64,
}

fn ser_rational<S: serde::Serializer>(r: &Rational64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// Exact exponent bookkeeping for a product of asymptotic atoms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentLedger {
    pub g_plus: i64,
    pub g_minus: i64,
    pub entries: Vec<LedgerEntry>,
}

impl ExponentLedger {
    fn new(g_plus: i64, g_minus: i64) -> Self {
        ExponentLedger {
            g_plus,
            g_minus,
            entries: Vec::new(),
        }
    }

    fn push(&mut self, factor: &'static str, atom: Atom, exponent: Rational64) {
        if !exponent.is_zero() {
            self.entries.push(LedgerEntry { factor, atom, exponent });
        }
    }

    /// Adds every entry of `other`, multiplied by `times`.
    fn absorb(&mut self, factor: &'static str, other: &ExponentLedger, times: Rational64) {
        for e in &other.entries {
            self.push(factor, e.atom, e.exponent * times);
        }
    }

    pub fn total(&self, atom: Atom) -> Rational64 {
        self.entries
            .iter()
            .filter(|e| e.atom == atom)
            .fold(Rational64::zero(), |acc, e| acc + e.exponent)
    }

    pub fn totals(&self) -> BTreeMap<Atom, Rational64> {
        let mut out = BTreeMap::new();
        for e in &self.entries {
            *out.entry(e.atom).or_insert_with(Rational64::zero) += e.exponent;
        }
        out
    }

    pub fn delta_total(&self) -> Rational64 {
        self.total(Atom::DeltaS)
    }

    pub fn e_plus_total(&self) -> Rational64 {
        self.total(Atom::EPlusPPplus)
    }
}

fn r(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

/// C(P) for P on the plus component, assembled from the numerator and
/// denominator of its defining quotient (points R_i on X⁺, S_j on X⁻).
/// Only atoms that survive into the limit are kept; the R_i, S_j factors and
/// the two thetas combine into C₊(P) and C₋(P₋).
pub fn c_rule_ledger(g_plus: i64, g_minus: i64) -> ExponentLedger {
    let (a, b) = (g_plus, g_minus);
    let mut l = ExponentLedger::new(a, b);
    // Numerator.
    l.push("theta split", Atom::ThetaPlus, r(1));
    l.push("theta split", Atom::ThetaMinus, r(1));
    l.push("E(R_i, S_j)", Atom::DeltaS, r(a * b));
    l.push("σ(R_i, P)", Atom::EPlusPPplus, r(a * b));
    l.push("σ(S_j, P)", Atom::SigmaPlus, r(b));
    l.push("σ(S_j, P)", Atom::EPlusPPplus, r(b * b));
    l.push("σ(S_j, P)", Atom::DeltaS, r(b * (b - a)));
    l.push("σ(S_j, P)", Atom::Phase, r(1));
    // Denominator.
    l.push("E(P, S_j)", Atom::EPlusPPplus, r(-b));
    l.push("E(P, S_j)", Atom::DeltaS, r(-b));
    l.push("E(P, S_j)", Atom::Phase, r(1));
    l
}

/// Exponents of the τ^{−6} product on the pinched surface, with P on X⁺.
pub fn ledger_assemble(g_plus: i64, g_minus: i64) -> Result<ExponentLedger> {
    if g_plus < 1 || g_minus < 1 {
        return Err(Error::domain(format!(
            "component genera ({g_plus}, {g_minus}) must both be at least 1"
        )));
    }
    let (a, b) = (g_plus, g_minus);
    let g = a + b;
    let (m_plus, m_minus) = (r(2 * a - 2), r(2 * b - 2));
    let mut l = ExponentLedger::new(a, b);

    l.push("e^{2πi⟨r,K⟩}", Atom::Phase, r(1));

    // C(P)^{−4}, C(P) ~ C₊(P) C₋(P₋) E₊^{b(g−1)} σ₊^{b} Δ^{b²−b}.
    let c = c_rule_ledger(a, b);
    l.push("C^-4", Atom::CPlus, r(-4));
    l.push("C^-4", Atom::CMinus, r(-4));
    for atom in [Atom::EPlusPPplus, Atom::SigmaPlus, Atom::DeltaS, Atom::Phase] {
        l.push("C^-4", atom, c.total(atom) * r(-4));
    }

    // σ(D⁺_k, P) ~ σ₊(D⁺_k, P)[E₊(P, P₊)/E₊(D⁺_k, P₊)]^{b}.
    let mut sig_pp = ExponentLedger::new(a, b);
    sig_pp.push("σ(D+,P)", Atom::EPlusPPplus, r(b));
    l.absorb("Π σ(D+,P)", &sig_pp, m_plus);

    // σ(P_r, P)σ(P_l, P) ~ [σ₊(P₊, P) E₊(P₊, P)^{b} Δ^{(3b−a)/4}]².
    let mut sig_branch = ExponentLedger::new(a, b);
    sig_branch.push("σ(P_r,P)", Atom::SigmaPlus, r(1));
    sig_branch.push("σ(P_r,P)", Atom::EPlusPPplus, r(b));
    sig_branch.push("σ(P_r,P)", Atom::DeltaS, Rational64::new(3 * b - a, 4));
    sig_branch.push("σ(P_r,P)", Atom::Phase, r(1));
    l.absorb("σ(P_r,P)σ(P_l,P)", &sig_branch, r(2));

    // σ(D⁻_k, P) ~ σ₋(D⁻_k, P₋)σ₊(P₊, P)E₊(P₊, P)^{b}E₋(D⁻_k, P₋)^{−a}Δ^{b−a}.
    let mut sig_pm = ExponentLedger::new(a, b);
    sig_pm.push("σ(D-,P)", Atom::SigmaMinus, r(1));
    sig_pm.push("σ(D-,P)", Atom::SigmaPlus, r(1));
    sig_pm.push("σ(D-,P)", Atom::EPlusPPplus, r(b));
    sig_pm.push("σ(D-,P)", Atom::EMinus, r(-a));
    sig_pm.push("σ(D-,P)", Atom::DeltaS, r(b - a));
    sig_pm.push("σ(D-,P)", Atom::Phase, r(1));
    l.absorb("Π σ(D-,P)", &sig_pm, m_minus);

    // E(D⁺_k, P)^{g−1}: same-component prime forms have no singular atoms.

    // E(P_r, P)E(P_l, P) ~ [Δ^{1/4} E₊(P, P₊)]², raised to g − 1.
    let mut e_branch = ExponentLedger::new(a, b);
    e_branch.push("E(P_r,P)", Atom::DeltaS, Rational64::new(1, 4));
    e_branch.push("E(P_r,P)", Atom::EPlusPPplus, r(1));
    e_branch.push("E(P_r,P)", Atom::Phase, r(1));
    l.absorb("[E(P_r,P)E(P_l,P)]^{g-1}", &e_branch, r(2 * (g - 1)));

    // E(D⁻_k, P) ~ Δ E₊(P, P₊) E₋(D⁻_k, P₋), raised to g − 1.
    let mut e_cross = ExponentLedger::new(a, b);
    e_cross.push("E(D-,P)", Atom::DeltaS, r(1));
    e_cross.push("E(D-,P)", Atom::EPlusPPplus, r(1));
    e_cross.push("E(D-,P)", Atom::EMinus, r(1));
    e_cross.push("E(D-,P)", Atom::Phase, r(1));
    l.absorb("Π E(D-,P)^{g-1}", &e_cross, m_minus * r(g - 1));

    Ok(l)
}

/// The Δ(s) total obtained when the [Δ^{1/4}E]^{2(g−1)} and
/// [ΔE₊E₋]^{g−1} factors are given the exponent g⁻ − 1 instead of g − 1.
/// It differs from 3/2 by g⁺(3/2 − 2g⁻), so it never closes for g± ≥ 1.
pub fn delta_total_minus_genus_variant(g_plus: i64, g_minus: i64) -> Rational64 {
    let (a, b) = (r(g_plus), r(g_minus));
    let one = Rational64::one();
    r(4) * (b - b * b)
        + (r(3) * b - a) / r(2)
        + (b - a) * (r(2) * b - r(2))
        + (b - one) / r(2)
        + (b - one) * (r(2) * b - r(2))
}

/// τ ≈ coefficient · s^{s_power} · τ₊τ₋.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TauPrefactor {
    pub coefficient: f64,
    #[serde(serialize_with = "ser_rational")]
    pub s_power: Rational64,
}

/// With Δ(s) = 4/s entering τ^{−6} with exponent e, τ ∝ (4/s)^{−e/6}.
pub fn tau_factorization_prefactor(ledger: &ExponentLedger) -> Result<TauPrefactor> {
    let e = ledger.delta_total();
    if e != Rational64::new(3, 2) {
        return Err(Error::Inconsistent(format!("Δ(s) exponent {e} in τ^-6, expected 3/2")));
    }
    if !ledger.e_plus_total().is_zero() {
        return Err(Error::Inconsistent(format!(
            "E₊(P, P₊) exponent {} does not cancel",
            ledger.e_plus_total()
        )));
    }
    let power = e / r(6);
    let p = *power.numer() as f64 / *power.denom() as f64;
    Ok(TauPrefactor {
        coefficient: 4f64.powf(-p),
        s_power: power,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_one_totals() {
        let l = ledger_assemble(1, 1).unwrap();
        assert_eq!(l.delta_total(), Rational64::new(3, 2));
        assert_eq!(l.e_plus_total(), r(0));
        assert_eq!(l.total(Atom::SigmaPlus), r(-2));
    }

    #[test]
    fn c_rule_matches_closed_form() {
        for (a, b) in [(1, 1), (2, 3), (4, 1)] {
            let c = c_rule_ledger(a, b);
            assert_eq!(c.total(Atom::EPlusPPplus), r(b * (a + b - 1)));
            assert_eq!(c.total(Atom::DeltaS), r(b * b - b));
            assert_eq!(c.total(Atom::SigmaPlus), r(b));
        }
    }

    #[test]
    fn minus_genus_variant_differs() {
        assert_eq!(delta_total_minus_genus_variant(1, 1), r(1));
    }

    #[test]
    fn prefactor() {
        let p = tau_factorization_prefactor(&ledger_assemble(2, 3).unwrap()).unwrap();
        assert_eq!(p.s_power, Rational64::new(1, 4));
        assert!((p.coefficient - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn genus_zero_rejected() {
        assert!(ledger_assemble(0, 2).is_err());
    }
}
