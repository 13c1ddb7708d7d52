//! Modified Coulomb functions Φ and Ψ, holomorphic in k and in ε = η⁻².

use num_complex::Complex64;

use super::{half_integer, w_fn, CoulombParams, Sign};
use crate::complexfn::cpow;
use crate::error::{CoulombError, Result};
use crate::hypergeom::{kummer_sums, KummerParams};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Φ together with its ρ-derivative, its ℓ-derivative Φ̇ and the mixed
/// derivative ∂Φ̇/∂ρ. Fields needing ρ ≠ 0 are `None` at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiParts {
    pub value: Complex64,
    pub d_rho: Option<Complex64>,
    pub dl: Option<Complex64>,
    pub dl_d_rho: Option<Complex64>,
    /// Largest relative truncation estimate of the underlying series.
    pub relative_error: f64,
    /// Estimated relative error of Φ̇, which cancels between its two terms
    /// when |ln 2ηρ| is large.
    pub dl_relative_error: f64,
}

/// Evaluates Φ_{ηℓ}(ρ) = (2ηρ)^{ℓ+1} e^{±iρ} M★(ℓ+1±iη, 2ℓ+2, ∓2iρ) and its
/// derivatives from a single series pass.
pub fn phi_parts(p: &CoulombParams, exp_sign: Sign) -> Result<PhiParts> {
    let CoulombParams { eta, ell, rho } = *p;
    let s = exp_sign.value();
    let zero = Complex64::new(0.0, 0.0);
    let kp = KummerParams::new(ell + 1.0 + s * I * eta, 2.0 * ell + 2.0, -2.0 * s * I * rho);
    let sums = kummer_sums(&kp, Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0))?;
    let relative_error = [sums.m, sums.dm_dp].iter().map(|r| r.relative_error()).fold(0.0, f64::max);

    let x2 = 2.0 * eta * rho;
    if x2 == zero {
        // Only the value has a limit, and only for Re ℓ > −1.
        if (ell + 1.0).re > 0.0 {
            return Ok(PhiParts { value: zero, d_rho: None, dl: None, dl_d_rho: None, relative_error, dl_relative_error: relative_error });
        }
        return Err(CoulombError::Domain("phi: 2*eta*rho = 0 with Re(ell) <= -1".into()));
    }
    let pe = cpow(x2, ell + 1.0) * (s * I * rho).exp();
    let value = pe * sums.m.value;
    let ln_x2 = x2.ln();
    let dl = ln_x2 * value + pe * sums.dm_dp.value;
    let floor = 4.0 * f64::EPSILON;
    let dl_absolute = (ln_x2 * value).norm() * (sums.m.relative_error() + 2.0 * floor)
        + (pe * sums.dm_dp.value).norm() * (sums.dm_dp.relative_error() + floor);
    let dl_relative_error = if dl.norm() > 0.0 { dl_absolute / dl.norm() } else { f64::INFINITY };
    let dz = -2.0 * s * I;
    let k = (ell + 1.0) / rho + s * I;
    let d_rho = pe * (k * sums.m.value + dz * sums.dm_dz.value);
    let dl_d_rho = value / rho + ln_x2 * d_rho + pe * (k * sums.dm_dp.value + dz * sums.d2m_dz_dp.value);
    Ok(PhiParts { value, d_rho: Some(d_rho), dl: Some(dl), dl_d_rho: Some(dl_d_rho), relative_error, dl_relative_error })
}

/// Φ_{ηℓ}(ρ). Either choice of `exp_sign` gives the same function.
pub fn phi(p: &CoulombParams, exp_sign: Sign) -> Result<Complex64> {
    Ok(phi_parts(p, exp_sign)?.value)
}

fn need(v: Option<Complex64>, what: &str) -> Result<Complex64> {
    v.ok_or_else(|| CoulombError::Domain(format!("{what} undefined at 2*eta*rho = 0")))
}

/// Φ̇_{ηℓ}(ρ) = ∂Φ/∂ℓ.
pub fn phi_dl(p: &CoulombParams) -> Result<Complex64> {
    need(phi_parts(p, Sign::Plus)?.dl, "phi_dl")
}

/// Ψ and ∂Ψ/∂ρ for ℓ ∈ ½ℤ: Ψ = (w/2) Φ̇_{ηℓ} + ½ Φ̇_{η,−ℓ−1}, with an
/// estimate of the relative error of Ψ.
pub fn psi_with_derivative(p: &CoulombParams) -> Result<(Complex64, Complex64, f64)> {
    let ell = half_integer(p.ell)
        .ok_or_else(|| CoulombError::Domain(format!("psi: ell = {} is not a half-integer", p.ell)))?;
    let q = p.with_ell(ell);
    let w = w_fn(q.eta, ell, Sign::Plus)?;
    let a = phi_parts(&q, Sign::Plus)?;
    let b = phi_parts(&q.reflected(), Sign::Plus)?;
    let value = 0.5 * (w * need(a.dl, "psi")? + need(b.dl, "psi")?);
    let d_rho = 0.5 * (w * need(a.dl_d_rho, "psi")? + need(b.dl_d_rho, "psi")?);
    let (ta, tb) = (w * need(a.dl, "psi")?, need(b.dl, "psi")?);
    let w_error = 8.0 * f64::EPSILON * (1.0 + w.ln().norm());
    let absolute = 0.5 * (ta.norm() * (a.dl_relative_error + w_error) + tb.norm() * b.dl_relative_error);
    let error = if value.norm() > 0.0 { absolute / value.norm() } else { f64::INFINITY };
    Ok((value, d_rho, error.max(a.relative_error).max(b.relative_error)))
}

/// Ψ_{ηℓ}(ρ), defined for ℓ ∈ ½ℤ only.
pub fn psi_fn(p: &CoulombParams) -> Result<Complex64> {
    Ok(psi_with_derivative(p)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexfn::{bessel_i, bessel_k};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn phi_vanishes_at_origin() {
        let v = phi(&CoulombParams::real(1.0, 0.0, 0.0), Sign::Plus).unwrap();
        assert_eq!(v, c(0.0, 0.0));
    }

    #[test]
    fn phi_sign_choice_is_immaterial() {
        let p = CoulombParams::new(c(0.7, -0.4), c(0.3, 0.2), c(1.9, 0.6)).unwrap();
        let a = phi_parts(&p, Sign::Plus).unwrap();
        let b = phi_parts(&p, Sign::Minus).unwrap();
        assert!(rel(a.value, b.value) < 1e-12);
        assert!(rel(a.dl.unwrap(), b.dl.unwrap()) < 1e-12);
        assert!(rel(a.dl_d_rho.unwrap(), b.dl_d_rho.unwrap()) < 1e-12);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let p = CoulombParams::new(c(1.0, 0.2), c(0.4, 0.0), c(0.9, 0.1)).unwrap();
        let parts = phi_parts(&p, Sign::Plus).unwrap();
        let h = 1e-5;
        let f = |q: CoulombParams| phi_parts(&q, Sign::Plus).unwrap();
        let d_rho = (f(p.with_rho(p.rho + h)).value - f(p.with_rho(p.rho - h)).value) / (2.0 * h);
        let dl = (f(p.with_ell(p.ell + h)).value - f(p.with_ell(p.ell - h)).value) / (2.0 * h);
        let mixed = (f(p.with_rho(p.rho + h)).dl.unwrap() - f(p.with_rho(p.rho - h)).dl.unwrap()) / (2.0 * h);
        assert!(rel(parts.d_rho.unwrap(), d_rho) < 1e-8);
        assert!(rel(parts.dl.unwrap(), dl) < 1e-8);
        assert!(rel(parts.dl_d_rho.unwrap(), mixed) < 1e-8);
    }

    #[test]
    fn zero_energy_limits() {
        // x = sqrt(2ηρ) = 1 at η = 10⁴, ρ = 5·10⁻⁵
        let p = CoulombParams::real(1e4, 0.0, 5e-5);
        let x = 1.0;
        let target = x * bessel_i(c(1.0, 0.0), c(2.0 * x, 0.0)).unwrap().value;
        assert!(rel(phi(&p, Sign::Plus).unwrap(), target) < 1e-6);
        let target = 2.0 * x * bessel_k(1, c(2.0 * x, 0.0)).unwrap().value;
        assert!(rel(psi_fn(&p).unwrap(), target) < 1e-5);
    }

    #[test]
    fn psi_requires_half_integer() {
        assert!(matches!(psi_fn(&CoulombParams::real(1.0, 0.3, 1.0)), Err(CoulombError::Domain(_))));
    }
}
