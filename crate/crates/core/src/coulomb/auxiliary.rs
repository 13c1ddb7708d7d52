//! ρ-independent building blocks: the far-field phase, the normalization
//! coefficients C and D±, and the functions w±, h±, g.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use super::{half_integer, reflection_sign, CVariant, Sign};
use crate::complexfn::{cpow, digamma, gamma, is_nonpositive_integer, log_gamma, rgamma};
use crate::error::{ensure_finite, CoulombError, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn finite(name: &'static str, z: Complex64) -> Result<Complex64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(CoulombError::Overflow(name))
    }
}

/// e^z − 1 without cancellation for small z.
pub(crate) fn exp_m1(z: Complex64) -> Complex64 {
    if z.norm() < 0.5 {
        let half = z / 2.0;
        2.0 * half.sinh() * half.exp()
    } else {
        z.exp() - 1.0
    }
}

fn check_coulomb_poles(name: &'static str, eta: Complex64, ell: Complex64) -> Result<()> {
    for a in [ell + 1.0 + I * eta, ell + 1.0 - I * eta] {
        if is_nonpositive_integer(a) {
            return Err(CoulombError::Pole { function: name, at: a });
        }
    }
    Ok(())
}

/// ln(C Γ(2ℓ+2)) on the principal sheet of the log-gamma construction:
/// ℓ ln 2 − πη/2 + [lnΓ(ℓ+1+iη) + lnΓ(ℓ+1−iη)]/2.
fn log_c_gamma(eta: Complex64, ell: Complex64) -> Result<Complex64> {
    check_coulomb_poles("coulomb_C", eta, ell)?;
    let lp = log_gamma(ell + 1.0 + I * eta)?;
    let lm = log_gamma(ell + 1.0 - I * eta)?;
    Ok(ell * LN_2 - eta * (PI / 2.0) + 0.5 * (lp + lm))
}

/// e^{2π(η+iℓ)} − 1, the factor that multiplies every half-integer
/// connection formula.
pub fn coulomb_factor(eta: Complex64, ell: Complex64) -> Complex64 {
    exp_m1(2.0 * PI * (eta + I * ell))
}

/// Far-field phase θ = ρ − ℓπ/2 − η ln 2ρ + σ, where σ is the Coulomb phase
/// shift [lnΓ(ℓ+1+iη) − lnΓ(ℓ+1−iη)]/(2i). For real η and ℓ this is
/// Im lnΓ(ℓ+1+iη), unwrapped.
pub fn theta(eta: Complex64, ell: Complex64, rho: Complex64) -> Result<Complex64> {
    ensure_finite("theta", &[eta, ell, rho])?;
    if rho == Complex64::new(0.0, 0.0) {
        return Err(CoulombError::Domain("theta: rho = 0".into()));
    }
    check_coulomb_poles("theta", eta, ell)?;
    let sigma = if eta.im == 0.0 && ell.im == 0.0 {
        Complex64::new(log_gamma(ell + 1.0 + I * eta)?.im, 0.0)
    } else {
        (log_gamma(ell + 1.0 + I * eta)? - log_gamma(ell + 1.0 - I * eta)?) / (2.0 * I)
    };
    Ok(rho - ell * (PI / 2.0) - eta * (2.0 * rho).ln() + sigma)
}

/// Normalization coefficient C_{ηℓ}.
pub fn coulomb_c(eta: Complex64, ell: Complex64, variant: CVariant) -> Result<Complex64> {
    ensure_finite("coulomb_C", &[eta, ell])?;
    check_coulomb_poles("coulomb_C", eta, ell)?;
    let r = rgamma(2.0 * ell + 2.0)?;
    let value = match variant {
        CVariant::LogGamma => log_c_gamma(eta, ell)?.exp() * r,
        CVariant::SqrtGamma => {
            let prod = gamma(ell + 1.0 + I * eta)? * gamma(ell + 1.0 - I * eta)?;
            (ell * LN_2 - eta * (PI / 2.0)).exp() * prod.sqrt() * r
        }
        CVariant::EulerReflection => {
            if eta == Complex64::new(0.0, 0.0) {
                log_c_gamma(eta, ell)?.exp() * r
            } else {
                let w = w_fn(eta, ell, Sign::Plus)?;
                let denom = (2.0 * PI * eta).exp() - (-2.0 * PI * I * ell).exp();
                cpow(2.0 * eta, ell) * r * (2.0 * PI * eta * w / denom).sqrt()
            }
        }
    };
    finite("coulomb_C", value)
}

/// C Γ(2ℓ+2)/(2η)^{ℓ+1}, the factor turning Φ into F and Ψ into I. Computed
/// in log space so it stays finite where Γ(2ℓ+2) has a pole.
pub fn normalization(eta: Complex64, ell: Complex64) -> Result<Complex64> {
    ensure_finite("normalization", &[eta, ell])?;
    if eta == Complex64::new(0.0, 0.0) {
        return Err(CoulombError::Domain("normalization: eta = 0".into()));
    }
    let log = log_c_gamma(eta, ell)? - (ell + 1.0) * (2.0 * eta).ln();
    finite("normalization", log.exp())
}

/// D±_{ηℓ} = (∓2i)^{2ℓ+1} Γ(ℓ+1±iη)/(C Γ(2ℓ+2)), the coefficient of the
/// Tricomi representation of H±.
pub fn coulomb_d(eta: Complex64, ell: Complex64, sign: Sign) -> Result<Complex64> {
    ensure_finite("coulomb_D", &[eta, ell])?;
    let s = sign.value();
    let lg = log_gamma(ell + 1.0 + s * I * eta)?;
    let value = cpow(Complex64::new(0.0, -2.0 * s), 2.0 * ell + 1.0) * (lg - log_c_gamma(eta, ell)?).exp();
    finite("coulomb_D", value)
}

/// Π (1 + j²/η²) over j = ℓ₀, ℓ₀+1, …, ℓ with ℓ₀ ∈ {0, ½}; ℓ ≥ 0 in ½ℤ.
fn w_product(eta: Complex64, ell_half: f64) -> Result<Complex64> {
    let mut j = if (2.0 * ell_half).rem_euclid(2.0) == 0.0 { 0.0 } else { 0.5 };
    let mut acc = Complex64::new(1.0, 0.0);
    while j <= ell_half + 0.25 {
        if j > 0.0 {
            if eta == Complex64::new(0.0, 0.0) {
                return Err(CoulombError::Pole { function: "w", at: eta });
            }
            acc *= 1.0 + j * j / (eta * eta);
        }
        j += 1.0;
    }
    Ok(acc)
}

/// w±_{ηℓ} = Γ(ℓ+1±iη)/[(±iη)^{2ℓ+1} Γ(−ℓ±iη)]. For ℓ ∈ ½ℤ both signs
/// coincide with a finite product, entire in ε = η⁻². For complex ℓ the
/// power is taken as exp[(2ℓ+1)(ln η ± iπ/2)], the branch on which the
/// connection formula for H± agrees with the Tricomi representation.
pub fn w_fn(eta: Complex64, ell: Complex64, sign: Sign) -> Result<Complex64> {
    ensure_finite("w", &[eta, ell])?;
    if let Some(lh) = half_integer(ell) {
        let l = lh.re;
        if l >= -0.5 {
            return w_product(eta, l);
        }
        let inv = w_product(eta, -l - 1.0)?;
        if inv == Complex64::new(0.0, 0.0) {
            return Err(CoulombError::Pole { function: "w", at: eta });
        }
        return Ok(inv.inv());
    }
    let s = sign.value();
    let a = ell + 1.0 + s * I * eta;
    let b = -ell + s * I * eta;
    if is_nonpositive_integer(a) {
        return Err(CoulombError::Pole { function: "w", at: a });
    }
    if is_nonpositive_integer(b) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if eta == Complex64::new(0.0, 0.0) {
        return Err(CoulombError::Domain("w: eta = 0 with complex ell".into()));
    }
    let log = log_gamma(a)? - log_gamma(b)? - (2.0 * ell + 1.0) * (eta.ln() + s * I * (PI / 2.0));
    finite("w", log.exp())
}

/// The square root sqrt(w∓/w±) on the sheet that makes the reflection
/// formulas of C, H± hold: (±i)^{2ℓ+1} times a ratio of half log-gammas.
/// For ℓ ∈ ½ℤ it reduces to sign(Re η)^{2ℓ+1}.
pub fn w_ratio_sqrt(eta: Complex64, ell: Complex64, sign: Sign) -> Result<Complex64> {
    ensure_finite("w_ratio_sqrt", &[eta, ell])?;
    if let Some(lh) = half_integer(ell) {
        return Ok(Complex64::new(reflection_sign(eta, lh), 0.0));
    }
    let s = sign.value();
    let half = 0.5
        * (log_gamma(ell + 1.0 - s * I * eta)? + log_gamma(-ell + s * I * eta)?
            - log_gamma(ell + 1.0 + s * I * eta)?
            - log_gamma(-ell - s * I * eta)?);
    finite("w_ratio_sqrt", cpow(s * I, 2.0 * ell + 1.0) * half.exp())
}

/// ln(±iη) with its cut turned towards the negative real axis of 1/η.
fn log_pm_i_eta(eta: Complex64, s: f64) -> Complex64 {
    Complex64::new(0.0, s * PI / 2.0) - eta.inv().ln()
}

/// h±_{ηℓ} = [ψ(ℓ+1±iη) + ψ(−ℓ±iη)]/2 − ln(±iη).
pub fn h_fn(eta: Complex64, ell: Complex64, sign: Sign) -> Result<Complex64> {
    ensure_finite("h", &[eta, ell])?;
    if eta == Complex64::new(0.0, 0.0) {
        return Err(CoulombError::Domain("h: eta = 0".into()));
    }
    let s = sign.value();
    let psi = digamma(ell + 1.0 + s * I * eta)? + digamma(-ell + s * I * eta)?;
    Ok(0.5 * psi - log_pm_i_eta(eta, s))
}

/// g_{ηℓ} = (h⁺ + h⁻)/2; real for real positive η.
pub fn g_fn(eta: Complex64, ell: Complex64) -> Result<Complex64> {
    Ok(0.5 * (h_fn(eta, ell, Sign::Plus)? + h_fn(eta, ell, Sign::Minus)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn theta_trivial_values() {
        assert!(close(theta(c(0.0, 0.0), c(0.0, 0.0), c(1.7, 0.0)).unwrap(), c(1.7, 0.0), 1e-15));
        assert!(theta(c(0.0, 0.0), c(2.0, 0.0), c(PI, 0.0)).unwrap().norm() < 1e-15);
        let t = theta(c(1.0, 0.0), c(0.0, 0.0), c(10.0, 0.0)).unwrap();
        let expected = 10.0 - 20f64.ln() + log_gamma(c(1.0, 1.0)).unwrap().im;
        assert!(close(t, c(expected, 0.0), 1e-15));
        assert!(theta(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn c_at_zero_eta() {
        let v = coulomb_c(c(1e-8, 0.0), c(0.0, 0.0), CVariant::LogGamma).unwrap();
        assert!(close(v, c(1.0, 0.0), 1e-7));
        let v = coulomb_c(c(0.0, 0.0), c(0.0, 0.0), CVariant::EulerReflection).unwrap();
        assert!(close(v, c(1.0, 0.0), 1e-15));
    }

    #[test]
    fn c_variants_agree_for_positive_eta() {
        for eta in [0.1, 1.0, 3.5] {
            for ell in [0.0, 1.0, 2.5] {
                let (e, l) = (c(eta, 0.0), c(ell, 0.0));
                let a = coulomb_c(e, l, CVariant::LogGamma).unwrap();
                let b = coulomb_c(e, l, CVariant::SqrtGamma).unwrap();
                let d = coulomb_c(e, l, CVariant::EulerReflection).unwrap();
                assert!((a - b).norm() < 1e-12 * a.norm(), "{eta} {ell}");
                assert!((a - d).norm() < 1e-12 * a.norm(), "{eta} {ell}");
            }
        }
        // C₀(η)² = 2πη/(e^{2πη} − 1)
        let c0 = coulomb_c(c(1.0, 0.0), c(0.0, 0.0), CVariant::LogGamma).unwrap();
        let expected = 2.0 * PI / (2.0 * PI).exp_m1();
        assert!(((c0 * c0).re - expected).abs() < 1e-14);
    }

    #[test]
    fn c_rejects_coulomb_poles() {
        // a_B k = i ⇔ η = −i: ℓ+1−iη = 0
        assert!(matches!(
            coulomb_c(c(0.0, -1.0), c(0.0, 0.0), CVariant::LogGamma),
            Err(CoulombError::Pole { .. })
        ));
    }

    #[test]
    fn d_values() {
        let z = c(0.0, 0.0);
        assert!(close(coulomb_d(z, z, Sign::Plus).unwrap(), c(0.0, -2.0), 1e-15));
        assert!(close(coulomb_d(z, z, Sign::Minus).unwrap(), c(0.0, 2.0), 1e-15));
        let dp = coulomb_d(c(1.0, 0.0), z, Sign::Plus).unwrap();
        let dm = coulomb_d(c(1.0, 0.0), z, Sign::Minus).unwrap();
        assert!(close(dm, dp.conj(), 1e-12));
        let l = c(1.0, 0.0);
        let dm = coulomb_d(c(0.0, 0.5), l, Sign::Minus).unwrap();
        let dp = coulomb_d(c(0.0, -0.5), l, Sign::Plus).unwrap();
        assert!(close(dm, dp.conj(), 1e-12));
    }

    #[test]
    fn w_products() {
        assert!(close(w_fn(c(0.3, 0.7), c(0.0, 0.0), Sign::Plus).unwrap(), c(1.0, 0.0), 0.0));
        assert_eq!(w_fn(c(1.0, 0.0), c(1.0, 0.0), Sign::Plus).unwrap(), c(2.0, 0.0));
        assert_eq!(w_fn(c(2.0, 0.0), c(0.5, 0.0), Sign::Minus).unwrap(), c(1.0625, 0.0));
        assert_eq!(w_fn(c(1.0, 0.0), c(-2.0, 0.0), Sign::Plus).unwrap(), c(0.5, 0.0));
        assert_eq!(w_fn(c(0.0, 0.0), c(-0.5, 0.0), Sign::Plus).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn w_gamma_form_matches_product_near_integers() {
        let eta = c(0.8, 0.3);
        let p = w_fn(eta, c(2.0, 0.0), Sign::Plus).unwrap();
        for sign in [Sign::Plus, Sign::Minus] {
            let g = w_fn(eta, c(2.0 + 1e-5, 0.0), sign).unwrap();
            assert!(close(g, p, 1e-3), "{g} {p}");
        }
    }

    #[test]
    fn h_reflection_and_g_identity() {
        let (eta, ell) = (c(1.3, 0.0), c(2.0, 0.0));
        for s in [Sign::Plus, Sign::Minus] {
            let a = h_fn(eta, ell, s).unwrap();
            let b = h_fn(eta, -ell - 1.0, s).unwrap();
            assert!(close(a, b, 1e-12));
        }
        let (eta, ell) = (c(1.0, 0.0), c(0.0, 0.0));
        let g = g_fn(eta, ell).unwrap();
        assert!(g.im.abs() < 1e-12);
        let factor = coulomb_factor(eta, ell);
        let hp = h_fn(eta, ell, Sign::Plus).unwrap();
        assert!(close(hp - g, I * PI / factor, 1e-12));
        let expected = 0.5 * (digamma(c(1.0, 1.0)).unwrap() + digamma(c(1.0, -1.0)).unwrap());
        assert!(close(g, expected, 1e-14));
    }

    #[test]
    fn exp_m1_small_argument() {
        let z = c(1e-10, -2e-10);
        assert!(close(exp_m1(z), z, 1e-9));
    }
}
