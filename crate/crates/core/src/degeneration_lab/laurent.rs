use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

type Poly = Vec<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn truncate(mut p: Poly, len: usize) -> Poly {
    p.truncate(len);
    p
}

fn add(a: &[Complex64], b: &[Complex64]) -> Poly {
    let mut out = vec![ZERO; a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, x) in b.iter().enumerate() {
        out[i] += x;
    }
    out
}

fn scale(a: &[Complex64], c: Complex64) -> Poly {
    a.iter().map(|x| x * c).collect()
}

/// Multiplies by u = z − s/2.
fn mul_u(a: &[Complex64], s: Complex64) -> Poly {
    let mut out = vec![ZERO; a.len() + 1];
    for (i, x) in a.iter().enumerate() {
        out[i + 1] += x;
        out[i] -= x * s / 2.0;
    }
    out
}

/// Multiplies by R² = z² − s z.
fn mul_r2(a: &[Complex64], s: Complex64) -> Poly {
    let mut out = vec![ZERO; a.len() + 2];
    for (i, x) in a.iter().enumerate() {
        out[i + 2] += x;
        out[i + 1] -= x * s;
    }
    out
}

fn horner(p: &[Complex64], z: Complex64) -> Complex64 {
    p.iter().rev().fold(ZERO, |acc, c| acc * z + c)
}

/// One step (A + BR) ↦ (A + BR)(u ± R) = (Au ± BR²) + (±A + Bu)R.
fn step(a: &[Complex64], b: &[Complex64], s: Complex64, sign: f64, len: usize) -> (Poly, Poly) {
    let na = add(&mul_u(a, s), &scale(&mul_r2(b, s), Complex64::new(sign, 0.0)));
    let nb = add(&scale(a, Complex64::new(sign, 0.0)), &mul_u(b, s));
    (truncate(na, len), truncate(nb, len))
}

/// X^n dX = s^{s_exponent} [p(z) + q(z)/√(z(z − s))] dz, coefficient arrays
/// indexed by the power of z.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonomialChange {
    pub n: i32,
    pub s: Complex64,
    pub p: Vec<Complex64>,
    pub q: Vec<Complex64>,
    pub s_exponent: i32,
}

impl MonomialChange {
    /// Value of X^n dX/dz, given the signed root ±√(z(z − s)) of the sheet.
    pub fn eval(&self, z: Complex64, root: Complex64) -> Complex64 {
        self.s.powi(self.s_exponent) * (horner(&self.p, z) + horner(&self.q, z) / root)
    }

    /// |s^e|(|p(z)| + |q(z)/root|): the size of the two terms before they
    /// combine. Xⁿ is small on the sheet where |X| < |s|/2 (n > 0) or
    /// |X| > |s|/2 (n < 0), and there the sum cancels down to it.
    pub fn term_scale(&self, z: Complex64, root: Complex64) -> f64 {
        self.s.norm().powi(self.s_exponent) * (horner(&self.p, z).norm() + (horner(&self.q, z) / root).norm())
    }
}

/// Polynomials p, q for X^n dX. For n ≥ 0 they come from
/// (u + R)^{n+1} = q + pR; for n = −m < 0 from
/// X^{−m}dX = (4/s²)^{m−1}(u − R)^{m−1}dz/R with (u − R)^{m−1} = C + DR.
pub fn monomial_change_of_basis(n: i32, s: Complex64) -> MonomialChange {
    let full = usize::MAX;
    if n >= 0 {
        let (mut a, mut b) = (vec![-s / 2.0, Complex64::new(1.0, 0.0)], vec![Complex64::new(1.0, 0.0)]);
        for _ in 0..n {
            (a, b) = step(&a, &b, s, 1.0, full);
        }
        MonomialChange {
            n,
            s,
            p: b,
            q: a,
            s_exponent: 0,
        }
    } else {
        let m = (-n) as u32;
        let (mut c, mut d) = (vec![Complex64::new(1.0, 0.0)], vec![]);
        for _ in 1..m {
            (c, d) = step(&c, &d, s, -1.0, full);
        }
        let f = Complex64::new(4f64.powi(m as i32 - 1), 0.0);
        MonomialChange {
            n,
            s,
            p: scale(&d, f),
            q: scale(&c, f),
            s_exponent: -(2 * m as i32 - 2),
        }
    }
}

/// Quadrature settings for [`laurent_fit_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaurentOptions {
    /// Outer circle |X| = radius_outer for the nonnegative coefficients.
    pub radius_outer: f64,
    /// Inner circle |X| = |s|²/inner_divisor for the negative ones.
    pub inner_divisor: f64,
    /// Node doubling stops once coefficients move less than this.
    pub tolerance: f64,
    pub min_nodes: usize,
    pub max_nodes: usize,
}

impl Default for LaurentOptions {
    fn default() -> Self {
        LaurentOptions {
            radius_outer: 0.9,
            inner_divisor: 3.6,
            tolerance: 1e-12,
            min_nodes: 64,
            max_nodes: 1 << 15,
        }
    }
}

/// Two-series representation v = Σ a_k z^k dz + Σ b_k z^k dz/√(z(z − s))
/// together with the X-Laurent data it was assembled from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LaurentRepr {
    pub trunc: usize,
    pub s: Complex64,
    pub a_coeffs: Vec<Complex64>,
    pub b_coeffs: Vec<Complex64>,
    /// γ_n, n ≥ 0.
    pub gamma_pos: Vec<Complex64>,
    /// γ_{−m}(4/s²)^{m−1}, m ≥ 1.
    pub gamma_neg_scaled: Vec<Complex64>,
    pub nodes: usize,
    pub quadrature_change: f64,
}

impl LaurentRepr {
    /// γ_{−m} = γ̃_m (s²/4)^{m−1}.
    pub fn gamma_neg(&self, m: usize) -> Complex64 {
        if m == 0 || m > self.gamma_neg_scaled.len() {
            return ZERO;
        }
        self.gamma_neg_scaled[m - 1] * (self.s * self.s / 4.0).powi(m as i32 - 1)
    }

    /// Σ γ_n Xⁿ + Σ γ_{−m} X^{−m}.
    pub fn evaluate_x(&self, x: Complex64) -> Complex64 {
        let pos = horner(&self.gamma_pos, x);
        let w = self.s * self.s / (4.0 * x);
        let neg = horner(&self.gamma_neg_scaled, w) / x;
        pos + if self.gamma_neg_scaled.is_empty() { ZERO } else { neg }
    }

    /// Σ a_k z^k + Σ b_k z^k / root, root = ±√(z(z − s)) on the chosen sheet.
    pub fn evaluate_z(&self, z: Complex64, root: Complex64) -> Complex64 {
        horner(&self.a_coeffs, z) + horner(&self.b_coeffs, z) / root
    }
}

struct Coefficients {
    pos: Vec<Complex64>,
    neg: Vec<Complex64>,
}

fn trapezoid(sampler: &dyn Fn(Complex64) -> Complex64, s: Complex64, n: usize, o: &LaurentOptions) -> Coefficients {
    let half = n / 2;
    let nodes: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / n as f64))
        .collect();
    let mut pos = vec![ZERO; half];
    for e in &nodes {
        let x = e * o.radius_outer;
        let f = sampler(x);
        let inv = 1.0 / x;
        let mut w = f;
        for c in pos.iter_mut() {
            *c += w;
            w *= inv;
        }
    }
    pos.iter_mut().for_each(|c| *c /= n as f64);

    let mut neg = Vec::new();
    if s.norm() > 0.0 {
        neg = vec![ZERO; half];
        let r = s.norm_sqr() / o.inner_divisor;
        let k = 4.0 / (s * s);
        for e in &nodes {
            let y = e * r;
            let mut w = sampler(y) * y;
            for c in neg.iter_mut() {
                *c += w;
                w *= k * y;
            }
        }
        neg.iter_mut().for_each(|c| *c /= n as f64);
    }
    Coefficients { pos, neg }
}

/// Largest change between two coefficient sets, each scaled to its circle.
fn change(a: &[Complex64], b: &[Complex64], radius: f64, count: usize) -> (f64, f64) {
    let mut diff: f64 = 0.0;
    let mut size: f64 = 0.0;
    let mut w = 1.0;
    for i in 0..count.min(a.len()).min(b.len()) {
        diff = diff.max((a[i] - b[i]).norm() * w);
        size = size.max(b[i].norm() * w);
        w *= radius;
    }
    (diff, size)
}

/// Index past which coefficients sit at the quadrature noise floor.
fn noise_cut(c: &[Complex64], radius: f64, floor: f64) -> usize {
    let mut w = 1.0;
    let scaled: Vec<f64> = c
        .iter()
        .map(|x| {
            let v = x.norm() * w;
            w *= radius;
            v
        })
        .collect();
    let top = scaled.iter().cloned().fold(0.0, f64::max);
    scaled.iter().rposition(|&v| v > floor * top).map_or(0, |i| i + 1)
}

/// Laurent fit with default quadrature settings.
pub fn laurent_fit(sampler: &dyn Fn(Complex64) -> Complex64, s: Complex64, k: usize) -> Result<LaurentRepr> {
    laurent_fit_with(sampler, s, k, &LaurentOptions::default())
}

/// Fits the X-Laurent coefficients of v = f(X)dX on |s|²/4 < |X| < 1 and
/// converts them to the (a_k, b_k) form, k < `k`.
pub fn laurent_fit_with(
    sampler: &dyn Fn(Complex64) -> Complex64,
    s: Complex64,
    k: usize,
    o: &LaurentOptions,
) -> Result<LaurentRepr> {
    if !(s.norm() < o.radius_outer.sqrt()) {
        return Err(Error::domain(format!("no pinching annulus for s = {s}")));
    }
    let inner_scaled = 4.0 / o.inner_divisor;
    let mut n = o.min_nodes.max(8);
    let mut prev = trapezoid(sampler, s, n, o);
    let mut last_change;
    loop {
        let next_n = 2 * n;
        let next = trapezoid(sampler, s, next_n, o);
        let cmp = n / 4;
        let (dp, sp) = change(&prev.pos, &next.pos, o.radius_outer, cmp);
        let (dn, sn) = change(&prev.neg, &next.neg, inner_scaled, cmp);
        let scale = sp.max(sn).max(f64::MIN_POSITIVE);
        last_change = dp.max(dn) / scale;
        prev = next;
        n = next_n;
        if last_change < o.tolerance || dp.max(dn) == 0.0 {
            break;
        }
        if n >= o.max_nodes {
            return Err(Error::convergence("Laurent quadrature", last_change, o.tolerance));
        }
    }

    let mut pos = prev.pos;
    let mut neg = prev.neg;
    pos.truncate(noise_cut(&pos, o.radius_outer, 1e-15));
    neg.truncate(noise_cut(&neg, inner_scaled, 1e-15));

    let mut a_coeffs = vec![ZERO; k];
    let mut b_coeffs = vec![ZERO; k];
    let accumulate = |acc: &mut Vec<Complex64>, poly: &[Complex64], c: Complex64| {
        for (i, x) in poly.iter().take(k).enumerate() {
            acc[i] += x * c;
        }
    };
    // X^n dX: (u + R)^{n+1} = A + BR contributes γ_n (B + A/R).
    let (mut a, mut b) = (vec![-s / 2.0, Complex64::new(1.0, 0.0)], vec![Complex64::new(1.0, 0.0)]);
    for (i, g) in pos.iter().enumerate() {
        if i > 0 {
            (a, b) = step(&a, &b, s, 1.0, k);
        }
        accumulate(&mut a_coeffs, &b, *g);
        accumulate(&mut b_coeffs, &a, *g);
    }
    // γ_{−m}X^{−m}dX = γ̃_m (D + C/R) dz with (u − R)^{m−1} = C + DR.
    let (mut c, mut d) = (vec![Complex64::new(1.0, 0.0)], Vec::new());
    for (i, g) in neg.iter().enumerate() {
        if i > 0 {
            (c, d) = step(&c, &d, s, -1.0, k);
        }
        accumulate(&mut a_coeffs, &d, *g);
        accumulate(&mut b_coeffs, &c, *g);
    }

    Ok(LaurentRepr {
        trunc: k,
        s,
        a_coeffs,
        b_coeffs,
        gamma_pos: pos,
        gamma_neg_scaled: neg,
        nodes: n,
        quadrature_change: last_change,
    })
}

/// Residuals of b₀(0) = 0, a₀(0) = b₁(0) and b₀′(0) + b₁(0)/2 = 0, with the
/// limit values they were built from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StructureResiduals {
    pub b0_at_0: Complex64,
    pub a0_minus_b1: Complex64,
    pub b0_prime_plus_half_b1: Complex64,
    pub a0_at_0: Complex64,
    pub b1_at_0: Complex64,
    pub b0_prime_at_0: Complex64,
}

impl StructureResiduals {
    pub fn max_norm(&self) -> f64 {
        self.b0_at_0
            .norm()
            .max(self.a0_minus_b1.norm())
            .max(self.b0_prime_plus_half_b1.norm())
    }
}

/// Evaluates the family at ±s, ±s/2, s/4; limits at s = 0 use two Richardson
/// steps, b₀′(0) a central difference with one Richardson step.
pub fn structure_relations_residual<F>(family: F, s: Complex64) -> Result<StructureResiduals>
where
    F: Fn(Complex64) -> Result<LaurentRepr>,
{
    let coef = |l: &LaurentRepr, which: char, i: usize| -> Complex64 {
        let v = if which == 'a' { &l.a_coeffs } else { &l.b_coeffs };
        v.get(i).copied().unwrap_or(ZERO)
    };
    let l1 = family(s)?;
    let l2 = family(s / 2.0)?;
    let l4 = family(s / 4.0)?;
    let m1 = family(-s)?;
    let m2 = family(-s / 2.0)?;

    let limit = |which: char, i: usize| {
        let (f1, f2, f4) = (coef(&l1, which, i), coef(&l2, which, i), coef(&l4, which, i));
        (8.0 * f4 - 6.0 * f2 + f1) / 3.0
    };
    let a0 = limit('a', 0);
    let b0 = limit('b', 0);
    let b1 = limit('b', 1);
    let d1 = (coef(&l1, 'b', 0) - coef(&m1, 'b', 0)) / (2.0 * s);
    let d2 = (coef(&l2, 'b', 0) - coef(&m2, 'b', 0)) / s;
    let b0p = (4.0 * d2 - d1) / 3.0;

    Ok(StructureResiduals {
        b0_at_0: b0,
        a0_minus_b1: a0 - b1,
        b0_prime_plus_half_b1: b0p + b1 / 2.0,
        a0_at_0: a0,
        b1_at_0: b1,
        b0_prime_at_0: b0p,
    })
}
