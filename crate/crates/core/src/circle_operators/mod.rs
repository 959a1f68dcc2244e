//! Operators on the unit circle in the basis e^{ikφ}: Fourier multipliers,
//! truncated operator matrices, the annulus harmonic calculus, trace norms,
//! corner heat coefficients and the asymptotic-subtraction zeta determinant.

mod zeta_det;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_rational::Rational64;
use serde::Serialize;

use crate::determinant::{RegularizationModel, ZetaDetResult};
use crate::error::{Error, Result};
use crate::special_fn::zeta_constants;

pub use zeta_det::{zeta_det_from_spectrum, zeta_det_regularized, zeta_det_regularized_with, ZetaDetOptions};

/// Fourier coefficients indexed by k.
pub type Coeffs = BTreeMap<i64, Complex64>;

/// Declared bound on |α_k|.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GrowthBound {
    /// |α_k| ≤ constant·(1 + |k|)^order.
    Polynomial { constant: f64, order: f64 },
    /// |α_k| ≤ constant·ratio^{|k|}, 0 < ratio < 1.
    Geometric { constant: f64, ratio: f64 },
}

impl GrowthBound {
    pub fn bound(&self, k: i64) -> f64 {
        let k = k.unsigned_abs() as f64;
        match *self {
            GrowthBound::Polynomial { constant, order } => constant * (1.0 + k).powf(order),
            GrowthBound::Geometric { constant, ratio } => constant * ratio.powf(k),
        }
    }

    /// Upper bound for Σ_{|k|>n} |α_k|; infinite when the series diverges.
    pub fn tail_sum(&self, n: usize) -> f64 {
        let n = n as f64;
        match *self {
            GrowthBound::Polynomial { constant, order } => {
                if order >= -1.0 {
                    f64::INFINITY
                } else {
                    // Σ_{k>n} (1+k)^p ≤ ∫_n^∞ (1+x)^p dx
                    2.0 * constant * (1.0 + n).powf(order + 1.0) / (-order - 1.0)
                }
            }
            GrowthBound::Geometric { constant, ratio } => 2.0 * constant * ratio.powf(n + 1.0) / (1.0 - ratio),
        }
    }
}

/// Op(α_k): e^{ikφ} ↦ α_k e^{ikφ}.
#[derive(Clone)]
pub struct FourierMultiplier {
    rule: Arc<dyn Fn(i64) -> Complex64 + Send + Sync>,
    growth: GrowthBound,
}

impl fmt::Debug for FourierMultiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FourierMultiplier")
            .field("alpha_-2..=2", &(-2..=2).map(|k| self.alpha(k)).collect::<Vec<_>>())
            .field("growth", &self.growth)
            .finish()
    }
}

/// Modes checked against the declared growth bound on construction.
const GROWTH_CHECK_MODES: i64 = 256;

impl FourierMultiplier {
    /// Wraps a rule; fails if |α_k| exceeds the bound for some |k| ≤ 256.
    pub fn new<F>(rule: F, growth: GrowthBound) -> Result<Self>
    where
        F: Fn(i64) -> Complex64 + Send + Sync + 'static,
    {
        for k in -GROWTH_CHECK_MODES..=GROWTH_CHECK_MODES {
            let a = rule(k);
            if !a.re.is_finite() || !a.im.is_finite() {
                return Err(Error::domain(format!("α_{k} is not finite")));
            }
            let b = growth.bound(k);
            if a.norm() > b * (1.0 + 1e-12) + 1e-300 {
                return Err(Error::domain(format!(
                    "|α_{k}| = {} exceeds the declared bound {b}",
                    a.norm()
                )));
            }
        }
        Ok(FourierMultiplier {
            rule: Arc::new(rule),
            growth,
        })
    }

    pub fn alpha(&self, k: i64) -> Complex64 {
        (self.rule)(k)
    }

    pub fn growth(&self) -> GrowthBound {
        self.growth
    }

    pub fn apply(&self, f: &Coeffs) -> Coeffs {
        f.iter().map(|(&k, &v)| (k, self.alpha(k) * v)).collect()
    }

    /// Op(α_k)·Op(β_k) = Op(α_kβ_k).
    pub fn compose(&self, other: &FourierMultiplier) -> FourierMultiplier {
        let (a, b) = (self.rule.clone(), other.rule.clone());
        let growth = match (self.growth, other.growth) {
            (
                GrowthBound::Polynomial {
                    constant: c1,
                    order: p1,
                },
                GrowthBound::Polynomial {
                    constant: c2,
                    order: p2,
                },
            ) => GrowthBound::Polynomial {
                constant: c1 * c2,
                order: p1 + p2,
            },
            (
                GrowthBound::Geometric {
                    constant: c1,
                    ratio: r1,
                },
                GrowthBound::Geometric {
                    constant: c2,
                    ratio: r2,
                },
            ) => GrowthBound::Geometric {
                constant: c1 * c2,
                ratio: r1 * r2,
            },
            (GrowthBound::Geometric { constant: c1, ratio }, GrowthBound::Polynomial { constant: c2, order })
            | (GrowthBound::Polynomial { constant: c2, order }, GrowthBound::Geometric { constant: c1, ratio }) => {
                // (1+k)^p r^k ≤ C r′^k with r′ = √r.
                let r2 = ratio.sqrt();
                let peak = (0..=4096)
                    .map(|k| (1.0 + k as f64).powf(order) * (ratio / r2).powi(k))
                    .fold(0.0, f64::max);
                GrowthBound::Geometric {
                    constant: c1 * c2 * peak,
                    ratio: r2,
                }
            }
        };
        FourierMultiplier {
            rule: Arc::new(move |k| a(k) * b(k)),
            growth,
        }
    }

    pub fn to_matrix(&self, trunc: usize) -> CircleOperatorMatrix {
        CircleOperatorMatrix::diagonal(trunc, |k| self.alpha(k))
    }

    /// Σ_{|k|≤n} |α_k| with the tail bound from the growth declaration.
    pub fn trace_norm(&self, trunc: usize) -> TraceNormEstimate {
        let n = trunc as i64;
        TraceNormEstimate {
            truncated: (-n..=n).map(|k| self.alpha(k).norm()).sum(),
            tail_bound: self.growth.tail_sum(trunc),
        }
    }
}

/// ν = Op(k).
pub fn multiplier_nu() -> FourierMultiplier {
    FourierMultiplier {
        rule: Arc::new(|k| Complex64::new(k as f64, 0.0)),
        growth: GrowthBound::Polynomial {
            constant: 1.0,
            order: 1.0,
        },
    }
}

/// |ν| = Op(|k|).
pub fn multiplier_abs_nu() -> FourierMultiplier {
    FourierMultiplier {
        rule: Arc::new(|k| Complex64::new(k.unsigned_abs() as f64, 0.0)),
        growth: GrowthBound::Polynomial {
            constant: 1.0,
            order: 1.0,
        },
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::domain(format!("ε = {eps} must lie in (0, 1)")));
    }
    Ok(())
}

/// Op(2/(ε^k − ε^{−k}))·ν, zero at k = 0.
pub fn annulus_coupling_multiplier(eps: f64) -> Result<FourierMultiplier> {
    check_eps(eps)?;
    let rule = move |k: i64| {
        if k == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let m = k.unsigned_abs() as i32;
        // 2k/(ε^k − ε^{−k}) = −2|k| ε^{|k|}/(1 − ε^{2|k|})
        Complex64::new(-2.0 * m as f64 * eps.powi(m) / (1.0 - eps.powi(2 * m)), 0.0)
    };
    // |k| ε^{|k|} ≤ C (√ε)^{|k|}
    let ratio = eps.sqrt();
    let constant = (1..=4096)
        .map(|m: i32| 2.0 * m as f64 * eps.powi(m) / (1.0 - eps.powi(2 * m)) / ratio.powi(m))
        .fold(0.0, f64::max);
    FourierMultiplier::new(rule, GrowthBound::Geometric { constant, ratio })
}

/// Op((ε^k + ε^{−k})/(ε^k − ε^{−k}))·ν, zero at k = 0.
pub fn annulus_diagonal_multiplier(eps: f64) -> Result<FourierMultiplier> {
    check_eps(eps)?;
    let rule = move |k: i64| {
        if k == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let m = k.unsigned_abs() as i32;
        let e2 = eps.powi(2 * m);
        // (ε^k + ε^{−k})/(ε^k − ε^{−k})·k = −|k|(1 + ε^{2|k|})/(1 − ε^{2|k|})
        Complex64::new(-(m as f64) * (1.0 + e2) / (1.0 - e2), 0.0)
    };
    let constant = (1.0 + eps * eps) / (1.0 - eps * eps);
    FourierMultiplier::new(rule, GrowthBound::Polynomial { constant, order: 1.0 })
}

/// Truncation of a circle operator to modes k, l ∈ [−N, N].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircleOperatorMatrix {
    trunc: usize,
    entries: DMatrix<Complex64>,
}

impl CircleOperatorMatrix {
    pub fn new(trunc: usize, entries: DMatrix<Complex64>) -> Result<Self> {
        let n = 2 * trunc + 1;
        if entries.nrows() != n || entries.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: entries.nrows().max(entries.ncols()),
            });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::domain("operator matrix has non-finite entries"));
        }
        Ok(CircleOperatorMatrix { trunc, entries })
    }

    pub fn zeros(trunc: usize) -> Self {
        let n = 2 * trunc + 1;
        CircleOperatorMatrix {
            trunc,
            entries: DMatrix::zeros(n, n),
        }
    }

    pub fn diagonal<F: Fn(i64) -> Complex64>(trunc: usize, alpha: F) -> Self {
        let mut m = Self::zeros(trunc);
        for k in -(trunc as i64)..=trunc as i64 {
            let i = m.index(k);
            m.entries[(i, i)] = alpha(k);
        }
        m
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn dim(&self) -> usize {
        2 * self.trunc + 1
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// Row/column position of mode k.
    pub fn index(&self, k: i64) -> usize {
        (k + self.trunc as i64) as usize
    }

    pub fn modes(&self) -> impl Iterator<Item = i64> {
        -(self.trunc as i64)..=self.trunc as i64
    }

    /// Coefficient of e^{ikφ} in the image of e^{ilφ}.
    pub fn get(&self, k: i64, l: i64) -> Complex64 {
        self.entries[(self.index(k), self.index(l))]
    }

    fn check_same(&self, other: &CircleOperatorMatrix) -> Result<()> {
        if self.trunc != other.trunc {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &CircleOperatorMatrix) -> Result<Self> {
        self.check_same(other)?;
        Ok(CircleOperatorMatrix {
            trunc: self.trunc,
            entries: &self.entries + &other.entries,
        })
    }

    pub fn sub(&self, other: &CircleOperatorMatrix) -> Result<Self> {
        self.check_same(other)?;
        Ok(CircleOperatorMatrix {
            trunc: self.trunc,
            entries: &self.entries - &other.entries,
        })
    }

    pub fn mul(&self, other: &CircleOperatorMatrix) -> Result<Self> {
        self.check_same(other)?;
        Ok(CircleOperatorMatrix {
            trunc: self.trunc,
            entries: &self.entries * &other.entries,
        })
    }

    pub fn scale(&self, c: f64) -> Self {
        CircleOperatorMatrix {
            trunc: self.trunc,
            entries: &self.entries * Complex64::new(c, 0.0),
        }
    }

    /// Restriction to modes |k| ≤ n.
    pub fn truncate(&self, n: usize) -> Result<Self> {
        if n > self.trunc {
            return Err(Error::domain(format!("cannot truncate {} modes to {n}", self.trunc)));
        }
        let off = self.trunc - n;
        let d = 2 * n + 1;
        Ok(CircleOperatorMatrix {
            trunc: n,
            entries: self.entries.view((off, off), (d, d)).into_owned(),
        })
    }

    pub fn apply(&self, f: &Coeffs) -> Coeffs {
        let v = coeffs_to_vector(f, self.trunc);
        vector_to_coeffs(&(&self.entries * v), self.trunc)
    }

    /// ‖M − M*‖_F / max(1, ‖M‖_F).
    pub fn hermitian_defect(&self) -> f64 {
        let d = &self.entries - self.entries.adjoint();
        d.norm() / self.entries.norm().max(1.0)
    }

    /// Eigenvalues of (M + M*)/2 in ascending order.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let h = (&self.entries + self.entries.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn singular_values(&self) -> Vec<f64> {
        self.entries.clone().singular_values().iter().copied().collect()
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        self.singular_values().into_iter().fold(0.0, f64::max)
    }
}

pub fn coeffs_to_vector(f: &Coeffs, trunc: usize) -> DVector<Complex64> {
    let n = trunc as i64;
    DVector::from_iterator(2 * trunc + 1, (-n..=n).map(|k| f.get(&k).copied().unwrap_or_default()))
}

pub fn vector_to_coeffs(v: &DVector<Complex64>, trunc: usize) -> Coeffs {
    let n = trunc as i64;
    (-n..=n).zip(v.iter()).map(|(k, &z)| (k, z)).collect()
}

/// Truncated trace norm with a bound on the discarded tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceNormEstimate {
    pub truncated: f64,
    pub tail_bound: f64,
}

/// Sum of the singular values of the truncated matrix.
pub fn trace_norm(m: &CircleOperatorMatrix) -> f64 {
    m.singular_values().iter().sum()
}

/// ε·∂u/∂n on |z| = ε (normal pointing into the disk) for
/// u = a₀ + Σ_{k≠0} (a_k r^k + b_k r^{−k}) e^{ikφ}.
pub fn annulus_dtn_action(a: &Coeffs, b: &Coeffs, eps: f64) -> Coeffs {
    let zero = Complex64::new(0.0, 0.0);
    let keys: std::collections::BTreeSet<i64> = a.keys().chain(b.keys()).copied().collect();
    keys.into_iter()
        .map(|k| {
            if k == 0 {
                return (0, zero);
            }
            let ak = a.get(&k).copied().unwrap_or(zero);
            let bk = b.get(&k).copied().unwrap_or(zero);
            let kf = k as f64;
            let e = eps.powi(k as i32);
            (k, kf * (bk / e - ak * e))
        })
        .collect()
}

/// Traces of the same u on |z| = ε and on |z| = 1: (f, R_ε f).
pub fn annulus_traces(a: &Coeffs, b: &Coeffs, eps: f64) -> (Coeffs, Coeffs) {
    let zero = Complex64::new(0.0, 0.0);
    let keys: std::collections::BTreeSet<i64> = a.keys().chain(b.keys()).copied().collect();
    let mut f = Coeffs::new();
    let mut g = Coeffs::new();
    for k in keys {
        let ak = a.get(&k).copied().unwrap_or(zero);
        if k == 0 {
            f.insert(0, ak);
            g.insert(0, ak);
            continue;
        }
        let bk = b.get(&k).copied().unwrap_or(zero);
        let e = eps.powi(k as i32);
        f.insert(k, ak * e + bk / e);
        g.insert(k, ak + bk);
    }
    (f, g)
}

/// Op(2/(ε^k − ε^{−k}))νg − Op((ε^k + ε^{−k})/(ε^k − ε^{−k}))νf.
pub fn annulus_identity_rhs(f: &Coeffs, g: &Coeffs, eps: f64) -> Result<Coeffs> {
    let coupling = annulus_coupling_multiplier(eps)?;
    let diag = annulus_diagonal_multiplier(eps)?;
    let mut out = coupling.apply(g);
    for (k, v) in diag.apply(f) {
        *out.entry(k).or_default() -= v;
    }
    Ok(out)
}

/// det*|ν| = exp(−2ζ′(0)) = 2π, from the zeta constants.
pub fn det_star_abs_nu() -> f64 {
    abs_nu_zeta_det().det()
}

/// ζ_{|ν|}(t) = 2ζ(t): ζ(0) = −1 and log det* = −2ζ′(0).
pub fn abs_nu_zeta_det() -> ZetaDetResult {
    let z = zeta_constants();
    ZetaDetResult {
        log_det: -2.0 * z.zeta_prime_at_0,
        zeta_at_0: 2.0 * z.zeta_at_0,
        model: RegularizationModel::ClosedForm,
        error_estimate: 1e-15,
    }
}

/// Heat coefficient of a corner of opening β: (π² − β²)/(24πβ).
pub fn corner_heat_coefficient(beta: f64) -> Result<f64> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::domain(format!("corner angle {beta} must be positive")));
    }
    let pi = std::f64::consts::PI;
    Ok((pi * pi - beta * beta) / (24.0 * pi * beta))
}

/// Corner coefficient for β = qπ, exactly: (1 − q²)/(24q).
pub fn corner_heat_coefficient_rational(q: Rational64) -> Result<Rational64> {
    if q <= Rational64::from_integer(0) {
        return Err(Error::domain(format!("corner angle {q}π must be positive")));
    }
    Ok((Rational64::from_integer(1) - q * q) / (Rational64::from_integer(24) * q))
}

/// Constant heat coefficient of the disk with a radial slit: 1/6 from the
/// smooth boundary plus two corners of angle 2π at the slit tip.
pub fn h0_slit_disk() -> Rational64 {
    let corner = corner_heat_coefficient_rational(Rational64::from_integer(2)).expect("positive angle");
    Rational64::new(1, 6) + Rational64::from_integer(2) * corner
}
