//! Exact genus-0 testbeds for the three pinching families.
//!
//! Case Ia glues two spheres through the uniformizer γ = z ± √(z² − t),
//! Case Ib uses plumbing z = v, z = t·w, and Case I uses the two-sheeted
//! covering X = z − s/2 ± √(z(z − s)) of the s-independent pinching zone.

mod laurent;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub use laurent::{
    laurent_fit, laurent_fit_with, monomial_change_of_basis, structure_relations_residual, LaurentOptions, LaurentRepr,
    MonomialChange, StructureResiduals,
};

/// The three degeneration families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DegenKind {
    CaseI,
    CaseIa,
    CaseIb,
}

/// A family member: s for Case I, t for Cases Ia and Ib.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DegenFamily {
    kind: DegenKind,
    param: Complex64,
}

impl DegenFamily {
    pub fn new(kind: DegenKind, param: Complex64) -> Result<Self> {
        if !(param.norm() < 1.0) {
            return Err(Error::domain(format!("degeneration parameter |{param}| must be < 1")));
        }
        Ok(DegenFamily { kind, param })
    }

    pub fn kind(&self) -> DegenKind {
        self.kind
    }

    pub fn param(&self) -> Complex64 {
        self.param
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sheet {
    Plus,
    Minus,
}

impl Sheet {
    pub fn sign(self) -> f64 {
        match self {
            Sheet::Plus => 1.0,
            Sheet::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sheet {
        match self {
            Sheet::Plus => Sheet::Minus,
            Sheet::Minus => Sheet::Plus,
        }
    }
}

/// A point of a two-sheeted covering, given by its base coordinate and sheet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SheetedPoint {
    pub z: Complex64,
    pub sheet: Sheet,
}

impl SheetedPoint {
    pub fn new(z: Complex64, sheet: Sheet) -> Self {
        SheetedPoint { z, sheet }
    }

    pub fn plus(z: Complex64) -> Self {
        SheetedPoint::new(z, Sheet::Plus)
    }

    pub fn minus(z: Complex64) -> Self {
        SheetedPoint::new(z, Sheet::Minus)
    }
}

const CUT_TOL: f64 = 1e-13;

/// z·√(1 − c/z) with the principal root: a branch of √(z² − cz) with its cut
/// on the segment from 0 to c. Returns a branch error on the cut.
fn root_with_segment_cut(z: Complex64, c: Complex64) -> Result<Complex64> {
    if z.norm() < CUT_TOL {
        return Err(Error::Branch(format!("{z} is a branch point")));
    }
    let w = Complex64::new(1.0, 0.0) - c / z;
    if w.re <= 0.0 && w.im.abs() <= CUT_TOL * (1.0 + w.norm()) {
        return Err(Error::Branch(format!("{z} lies on the cut [0, {c}]")));
    }
    Ok(z * w.sqrt())
}

/// √(z² − t) with cut on [−√t, √t], equal to z·√(1 − t/z²).
fn root_ia(z: Complex64, t: Complex64) -> Result<Complex64> {
    if z.norm() < CUT_TOL {
        return Err(Error::Branch("z = 0 lies on the cut".into()));
    }
    let w = Complex64::new(1.0, 0.0) - t / (z * z);
    if w.re <= 0.0 && w.im.abs() <= CUT_TOL * (1.0 + w.norm()) {
        return Err(Error::Branch(format!("{z} lies on the cut [−√t, √t]")));
    }
    Ok(z * w.sqrt())
}

/// Case Ia uniformizer γ = z ± √(z² − t), branch points ±√t.
pub fn uniformizer_case_ia(p: SheetedPoint, t: Complex64) -> Result<Complex64> {
    Ok(p.z + p.sheet.sign() * root_ia(p.z, t)?)
}

/// dγ/dz for Case Ia.
pub fn uniformizer_case_ia_dz(p: SheetedPoint, t: Complex64) -> Result<Complex64> {
    let r = root_ia(p.z, t)?;
    Ok(1.0 + p.sheet.sign() * p.z / r)
}

fn check_distinct(a: Complex64, b: Complex64) -> Result<()> {
    if (a - b).norm() < 1e-14 * (1.0 + a.norm()) {
        return Err(Error::Singular("bidifferential evaluated at coincident points".into()));
    }
    Ok(())
}

/// Exact Case Ia bidifferential in the z-coordinates of both points:
/// γ′(z)γ′(ζ)/(γ(z) − γ(ζ))².
pub fn bidiff_case_ia(p: SheetedPoint, q: SheetedPoint, t: Complex64) -> Result<Complex64> {
    let (gp, gq) = (uniformizer_case_ia(p, t)?, uniformizer_case_ia(q, t)?);
    check_distinct(gp, gq)?;
    let (dp, dq) = (uniformizer_case_ia_dz(p, t)?, uniformizer_case_ia_dz(q, t)?);
    Ok(dp * dq / ((gp - gq) * (gp - gq)))
}

/// Leading terms through O(t): 1/(z − ζ)² + t/(4z²ζ²) on a common sheet,
/// −t/(4z²ζ²) across sheets.
pub fn bidiff_case_ia_leading(p: SheetedPoint, q: SheetedPoint, t: Complex64) -> Complex64 {
    let corr = t / (4.0 * p.z * p.z * q.z * q.z);
    if p.sheet == q.sheet {
        1.0 / ((p.z - q.z) * (p.z - q.z)) + corr
    } else {
        -corr
    }
}

/// Where the two arguments of the Case Ib bidifferential live.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IbPlacement {
    /// Both in the outer component, coordinate v with z = v.
    PlusPlus,
    /// Both in the inner component, coordinate w with z = t·w.
    MinusMinus,
    /// First argument v on the outer component, second w on the inner one.
    Cross,
}

/// Exact Case Ib bidifferential dz₁dz₂/(z₁ − z₂)² in the plumbing coordinates.
pub fn bidiff_case_ib(
    p_coord: Complex64,
    q_coord: Complex64,
    placement: IbPlacement,
    t: Complex64,
) -> Result<Complex64> {
    let (z1, z2, jac) = match placement {
        IbPlacement::PlusPlus => (p_coord, q_coord, Complex64::new(1.0, 0.0)),
        IbPlacement::MinusMinus => (t * p_coord, t * q_coord, t * t),
        IbPlacement::Cross => (p_coord, t * q_coord, t),
    };
    check_distinct(z1, z2)?;
    Ok(jac / ((z1 - z2) * (z1 - z2)))
}

/// Case I uniformizer X = z − s/2 ± √(z(z − s)), cut on [0, s].
pub fn uniformizer_case_i(p: SheetedPoint, s: Complex64) -> Result<Complex64> {
    let r = p.sheet.sign() * root_with_segment_cut(p.z, s)?;
    let m = p.z - s / 2.0;
    // The smaller root cancels; take it from X₊X₋ = s²/4 instead.
    let other = m - r;
    if (m + r).norm() >= other.norm() || other.norm() == 0.0 {
        Ok(m + r)
    } else {
        Ok(s * s / (4.0 * other))
    }
}

/// dX/dz = X/(±√(z(z − s))) for Case I.
pub fn uniformizer_case_i_dz(p: SheetedPoint, s: Complex64) -> Result<Complex64> {
    let r = p.sheet.sign() * root_with_segment_cut(p.z, s)?;
    Ok(uniformizer_case_i(p, s)? / r)
}

/// The signed root ±√(z(z − s)) on the sheet of p.
pub fn case_i_root(p: SheetedPoint, s: Complex64) -> Result<Complex64> {
    Ok(p.sheet.sign() * root_with_segment_cut(p.z, s)?)
}

/// Endpoints of the Case I cut: P_r at z = s, P_l at z = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BranchEnd {
    Right,
    Left,
}

/// W(P, P_end) on the genus-0 Case I surface (the X-sphere), in the local
/// parameter τ with z = s + τ² at P_r and z = τ² at P_l.
///
/// At P_r, dX/dτ = √s; at P_l, dX/dτ = √(−s) taken as −i√s.
pub fn bidiff_at_branch(p: SheetedPoint, which_end: BranchEnd, s: Complex64) -> Result<Complex64> {
    if p.z.norm() <= 2.0 * s.norm() {
        return Err(Error::domain(format!(
            "point {} lies in the pinching zone of s = {s}",
            p.z
        )));
    }
    let xp = uniformizer_case_i(p, s)?;
    let dxp = uniformizer_case_i_dz(p, s)?;
    let rs = s.sqrt();
    let (x_end, dx_end) = match which_end {
        BranchEnd::Right => (s / 2.0, rs),
        BranchEnd::Left => (-s / 2.0, -Complex64::i() * rs),
    };
    Ok(dxp * dx_end / ((xp - x_end) * (xp - x_end)))
}

/// Leading term ±(√s/2)/z_P² (times −i at P_l), sign + on the plus sheet.
pub fn bidiff_at_branch_leading(p: SheetedPoint, which_end: BranchEnd, s: Complex64) -> Complex64 {
    let base = p.sheet.sign() * s.sqrt() / (2.0 * p.z * p.z);
    match which_end {
        BranchEnd::Right => base,
        BranchEnd::Left => -Complex64::i() * base,
    }
}
