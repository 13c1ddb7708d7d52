//! Standard Coulomb functions F, G, H± and the irregular function I, with
//! the connection formulas linking them to Φ and Ψ.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::auxiliary::coulomb_factor;
use super::free::{free_derivative, free_f};
use super::modified::{phi_parts, psi_with_derivative};
use super::{
    g_fn, h_fn, half_integer, near_half_integer, normalization, reflection_sign, sheet_check, w_fn,
    BranchValue, CoulombParams, Sign,
};
use crate::complexfn::digamma;
use crate::error::{CoulombError, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Formula used for the irregular function I when ℓ ∈ ½ℤ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IRoute {
    /// I = C Γ(2ℓ+2)/(2η)^{ℓ+1} · Ψ.
    #[default]
    Psi,
    /// I = (w/2)[Ḟ_ℓ + sign(Re η)^{2ℓ+1} Ḟ_{−ℓ−1} − 2gF].
    FDerivative,
}

/// Formula used for G.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GRoute {
    /// (e^{2π(η+iℓ)} − 1)/π · [I/w + gF]; falls back to `AverageH` for
    /// ℓ ∉ ½ℤ.
    #[default]
    Decomposition,
    /// (H⁺ + H⁻)/2.
    AverageH,
    /// (e^{2π(η+iℓ)} − 1)/(2π) · [Ḟ_ℓ + sign(Re η)^{2ℓ+1} Ḟ_{−ℓ−1}].
    FDerivative,
}

/// F, G and their ρ-derivatives at one point, on one sheet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoulombValues {
    pub f: Complex64,
    pub df: Complex64,
    pub g: Complex64,
    pub dg: Complex64,
    pub low_precision: bool,
}

fn require_rho(p: &CoulombParams, name: &str) -> Result<()> {
    if p.rho == Complex64::new(0.0, 0.0) {
        return Err(CoulombError::Domain(format!("{name}: rho = 0")));
    }
    Ok(())
}

fn require_half(p: &CoulombParams, name: &str) -> Result<CoulombParams> {
    half_integer(p.ell)
        .map(|l| p.with_ell(l))
        .ok_or_else(|| CoulombError::Domain(format!("{name}: ell = {} is not a half-integer", p.ell)))
}

fn require_eta(p: &CoulombParams, name: &str) -> Result<()> {
    if p.eta == Complex64::new(0.0, 0.0) {
        return Err(CoulombError::Domain(format!("{name}: eta = 0")));
    }
    Ok(())
}

/// Above this estimated relative error of the underlying series a result
/// is flagged as low precision.
const SERIES_TOLERANCE: f64 = 1e-8;

/// A value with its ρ-derivative and the estimated relative error of the
/// series behind them.
#[derive(Debug, Clone, Copy)]
struct Pair {
    value: Complex64,
    deriv: Complex64,
    error: f64,
}

/// (F, F′) on the principal sheet; F′ is `None` at ρ = 0.
fn f_pair(p: &CoulombParams) -> Result<(Complex64, Option<Complex64>, f64)> {
    if p.eta == Complex64::new(0.0, 0.0) {
        if p.rho == Complex64::new(0.0, 0.0) {
            return Ok((free_f(p.ell, p.rho)?, None, 0.0));
        }
        let (f, df) = free_derivative(true, p.ell, p.rho)?;
        return Ok((f, Some(df), 0.0));
    }
    let n = normalization(p.eta, p.ell)?;
    let parts = phi_parts(p, Sign::Plus)?;
    Ok((n * parts.value, parts.d_rho.map(|d| n * d), parts.relative_error))
}

fn f_pair_full(p: &CoulombParams) -> Result<Pair> {
    let (value, deriv, error) = f_pair(p)?;
    let deriv = deriv.ok_or_else(|| CoulombError::Domain("F derivative at rho = 0".into()))?;
    Ok(Pair { value, deriv, error })
}

/// ∂F/∂ℓ = N(Φ̇ + g̃ Φ), where g̃ = ∂ ln N/∂ℓ = [ψ(ℓ+1+iη)+ψ(ℓ+1−iη)]/2 − ln η.
fn f_dot(p: &CoulombParams) -> Result<Complex64> {
    let CoulombParams { eta, ell, .. } = *p;
    let n = normalization(eta, ell)?;
    let parts = phi_parts(p, Sign::Plus)?;
    let dl = parts.dl.ok_or_else(|| CoulombError::Domain("F derivative at rho = 0".into()))?;
    let gt = 0.5 * (digamma(ell + 1.0 + I * eta)? + digamma(ell + 1.0 - I * eta)?) - eta.ln();
    Ok(n * (dl + gt * parts.value))
}

/// (I, I′) on the principal sheet; ℓ already snapped to ½ℤ.
fn i_pair(q: &CoulombParams) -> Result<Pair> {
    let n = normalization(q.eta, q.ell)?;
    let (psi, dpsi, error) = psi_with_derivative(q)?;
    Ok(Pair { value: n * psi, deriv: n * dpsi, error })
}

/// e/π · [I/w + c F] and the same combination of derivatives.
fn half_combination(q: &CoulombParams, c: Complex64) -> Result<Pair> {
    let f = f_pair_full(q)?;
    let i = i_pair(q)?;
    let w = w_fn(q.eta, q.ell, Sign::Plus)?;
    let e = coulomb_factor(q.eta, q.ell) / PI;
    let (ti, tf) = (i.value / w, c * f.value);
    let sum = ti + tf;
    // For large Re η the two terms nearly cancel; their errors do not.
    let floor = 8.0 * f64::EPSILON;
    let absolute = ti.norm() * (i.error + floor) + tf.norm() * (f.error + floor);
    let error = if sum.norm() > 0.0 { absolute / sum.norm() } else { f64::INFINITY };
    Ok(Pair { value: e * sum, deriv: e * (i.deriv / w + c * f.deriv), error: error.max(f.error).max(i.error) })
}

/// Complex ℓ: H± = (2η)^ℓ/(C Γ(2ℓ+2)) · π/sin(2πℓ) · [w± Φ_ℓ − Φ_{−ℓ−1}].
/// For large Re η the bracket cancels to about e^{−π Re η} of its terms,
/// which the error estimate accounts for.
fn h_pair_generic(p: &CoulombParams, sign: Sign) -> Result<Pair> {
    let n = normalization(p.eta, p.ell)?;
    let w = w_fn(p.eta, p.ell, sign)?;
    let a = phi_parts(p, Sign::Plus)?;
    let b = phi_parts(&p.reflected(), Sign::Plus)?;
    let pre = PI / ((2.0 * PI * p.ell).sin() * 2.0 * p.eta * n);
    let bracket = w * a.value - b.value;
    let value = pre * bracket;
    let deriv = match (a.d_rho, b.d_rho) {
        (Some(da), Some(db)) => pre * (w * da - db),
        _ => return Err(CoulombError::Domain("H at rho = 0".into())),
    };
    // w = exp(L) carries a relative error of about ε|L|
    let w_error = 8.0 * f64::EPSILON * (1.0 + w.ln().norm());
    let absolute = (w * a.value).norm() * (a.relative_error + w_error) + b.value.norm() * b.relative_error;
    let error = if bracket.norm() > 0.0 { absolute / bracket.norm() } else { f64::INFINITY };
    Ok(Pair { value, deriv, error })
}

/// (H±, H±′) on the principal sheet, with the low-precision flag.
fn h_pair(p: &CoulombParams, sign: Sign) -> Result<(Pair, bool)> {
    require_rho(p, "coulomb_H")?;
    if p.eta == Complex64::new(0.0, 0.0) {
        let (f, df) = free_derivative(true, p.ell, p.rho)?;
        let (g, dg) = free_derivative(false, p.ell, p.rho)?;
        let s = sign.value();
        return Ok((Pair { value: g + s * I * f, deriv: dg + s * I * df, error: 0.0 }, false));
    }
    let (pair, near) = match half_integer(p.ell) {
        Some(l) => {
            let q = p.with_ell(l);
            (half_combination(&q, h_fn(q.eta, q.ell, sign)?)?, false)
        }
        None => (h_pair_generic(p, sign)?, near_half_integer(p.ell)),
    };
    Ok((pair, near || pair.error > SERIES_TOLERANCE))
}

/// (G, G′) on the principal sheet through the default route.
fn g_pair(p: &CoulombParams) -> Result<(Pair, bool)> {
    require_rho(p, "coulomb_G")?;
    if p.eta == Complex64::new(0.0, 0.0) {
        let (g, dg) = free_derivative(false, p.ell, p.rho)?;
        return Ok((Pair { value: g, deriv: dg, error: 0.0 }, false));
    }
    match half_integer(p.ell) {
        Some(l) => {
            let q = p.with_ell(l);
            let pair = half_combination(&q, g_fn(q.eta, q.ell)?)?;
            Ok((pair, pair.error > SERIES_TOLERANCE))
        }
        None => {
            let (hp, lp) = h_pair(p, Sign::Plus)?;
            let (hm, lm) = h_pair(p, Sign::Minus)?;
            let pair = Pair {
                value: 0.5 * (hp.value + hm.value),
                deriv: 0.5 * (hp.deriv + hm.deriv),
                error: hp.error.max(hm.error),
            };
            Ok((pair, lp || lm))
        }
    }
}

/// Regular Coulomb function F_{ηℓ}(ρ) on the sheet `sheet_sign` (±1).
pub fn coulomb_f(p: &CoulombParams, sheet_sign: i8) -> Result<BranchValue> {
    let s = sheet_check(sheet_sign)?;
    let (f, _, error) = f_pair(p)?;
    Ok(BranchValue { value: s * f, sheet_sign, winding: 0, low_precision: error > SERIES_TOLERANCE })
}

/// Irregular function I_{ηℓ}(ρ) for ℓ ∈ ½ℤ, via Ψ.
pub fn coulomb_i_fn(p: &CoulombParams) -> Result<BranchValue> {
    Ok(BranchValue::principal(coulomb_i_route(p, IRoute::Psi)?, 1))
}

/// I_{ηℓ}(ρ) through an explicit route, principal sheet.
pub fn coulomb_i_route(p: &CoulombParams, route: IRoute) -> Result<Complex64> {
    require_eta(p, "coulomb_I")?;
    let q = require_half(p, "coulomb_I")?;
    match route {
        IRoute::Psi => Ok(i_pair(&q)?.value),
        IRoute::FDerivative => {
            let w = w_fn(q.eta, q.ell, Sign::Plus)?;
            let s = reflection_sign(q.eta, q.ell);
            let g = g_fn(q.eta, q.ell)?;
            let f = f_pair(&q)?.0;
            Ok(0.5 * w * (f_dot(&q)? + s * f_dot(&q.reflected())? - 2.0 * g * f))
        }
    }
}

/// Outgoing (+) or incoming (−) Coulomb function H±_{ηℓ}(ρ).
pub fn coulomb_h(p: &CoulombParams, sign: Sign, sheet_sign: i8) -> Result<BranchValue> {
    let s = sheet_check(sheet_sign)?;
    let (h, low) = h_pair(p, sign)?;
    Ok(BranchValue { value: s * h.value, sheet_sign, winding: 0, low_precision: low })
}

/// Irregular Coulomb function G_{ηℓ}(ρ) through the default route.
pub fn coulomb_g(p: &CoulombParams, sheet_sign: i8) -> Result<BranchValue> {
    let s = sheet_check(sheet_sign)?;
    let (g, low) = g_pair(p)?;
    Ok(BranchValue { value: s * g.value, sheet_sign, winding: 0, low_precision: low })
}

/// G_{ηℓ}(ρ) through an explicit route. The decomposition and F-derivative
/// routes need ℓ ∈ ½ℤ and η ≠ 0.
pub fn coulomb_g_route(p: &CoulombParams, route: GRoute, sheet_sign: i8) -> Result<BranchValue> {
    let s = sheet_check(sheet_sign)?;
    require_rho(p, "coulomb_G")?;
    let (value, low) = match route {
        GRoute::Decomposition => {
            let (g, low) = g_pair(p)?;
            (g.value, low)
        }
        GRoute::AverageH => {
            let (hp, lp) = h_pair(p, Sign::Plus)?;
            let (hm, lm) = h_pair(p, Sign::Minus)?;
            (0.5 * (hp.value + hm.value), lp || lm)
        }
        GRoute::FDerivative => {
            require_eta(p, "coulomb_G")?;
            let q = require_half(p, "coulomb_G")?;
            let sr = reflection_sign(q.eta, q.ell);
            let e = coulomb_factor(q.eta, q.ell) / (2.0 * PI);
            (e * (f_dot(&q)? + sr * f_dot(&q.reflected())?), false)
        }
    };
    Ok(BranchValue { value: s * value, sheet_sign, winding: 0, low_precision: low })
}

/// F, G and their ρ-derivatives on one sheet.
pub fn coulomb_values(p: &CoulombParams, sheet_sign: i8) -> Result<CoulombValues> {
    let s = sheet_check(sheet_sign)?;
    require_rho(p, "coulomb_values")?;
    let f = f_pair_full(p)?;
    let (g, low) = g_pair(p)?;
    Ok(CoulombValues {
        f: s * f.value,
        df: s * f.deriv,
        g: s * g.value,
        dg: s * g.deriv,
        low_precision: low || f.error > SERIES_TOLERANCE,
    })
}

/// G continued n times around the origin:
/// G(ρe^{2πin}) = e^{2πinℓ}[G(ρ) + 2in(e^{2π(η+iℓ)} − 1) F(ρ)].
pub fn continue_g(p: &CoulombParams, n: i64, sheet_sign: i8) -> Result<BranchValue> {
    let q = require_half(p, "continue_G")?;
    let g = coulomb_g(&q, sheet_sign)?;
    if n == 0 {
        return Ok(g);
    }
    let f = coulomb_f(&q, sheet_sign)?.value;
    let turn = (2.0 * PI * I * n as f64 * q.ell).exp();
    let nf = n as f64;
    let value = turn * (g.value + 2.0 * I * nf * coulomb_factor(q.eta, q.ell) * f);
    Ok(BranchValue { value, sheet_sign, winding: n, low_precision: false })
}

/// The two branches {+F, −F}.
pub fn branches_f(p: &CoulombParams) -> Result<Vec<BranchValue>> {
    Ok(vec![coulomb_f(p, 1)?, coulomb_f(p, -1)?])
}

/// The 2(2n_max+1) branches ±G + 2in(e^{2π(η+iℓ)} − 1)F, |n| ≤ n_max.
pub fn branches_g(p: &CoulombParams, n_max: u32) -> Result<Vec<BranchValue>> {
    let q = require_half(p, "branches_G")?;
    let g = coulomb_g(&q, 1)?.value;
    let f = coulomb_f(&q, 1)?.value;
    let step = 2.0 * I * coulomb_factor(q.eta, q.ell) * f;
    let n_max = n_max as i64;
    let mut out = Vec::with_capacity(2 * (2 * n_max as usize + 1));
    for sheet_sign in [1i8, -1] {
        for n in -n_max..=n_max {
            let value = sheet_sign as f64 * (g + n as f64 * step);
            out.push(BranchValue { value, sheet_sign, winding: n, low_precision: false });
        }
    }
    Ok(out)
}
