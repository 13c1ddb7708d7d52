//! η = 0: Riccati–Bessel functions F_{0ℓ}(ρ) = sqrt(πρ/2) J_{ℓ+½}(ρ) and
//! G_{0ℓ}(ρ) = −sqrt(πρ/2) Y_{ℓ+½}(ρ).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::complexfn::{cpow, RecipGammaLadder};
use crate::error::{ensure_finite, CoulombError, Result};
use crate::series::{CompensatedSum, Termination, MAX_TERMS};

fn nonnegative_integer(ell: Complex64) -> Option<u32> {
    if ell.im == 0.0 && ell.re >= 0.0 && ell.re.fract() == 0.0 && ell.re < 1e4 {
        Some(ell.re as u32)
    } else {
        None
    }
}

/// Power series (√π/2) 2^{−ℓ} ρ^{ℓ+1} Σ (−ρ²/4)^k /(k! Γ(ℓ+k+3/2)).
fn riccati_j_series(ell: Complex64, rho: Complex64) -> Result<Complex64> {
    let q = -rho * rho / 4.0;
    let mut ladder = RecipGammaLadder::new(ell + 1.5)?;
    let mut power = Complex64::new(1.0, 0.0);
    let mut sum = CompensatedSum::new();
    let neg = if ell.re < -1.5 { (-ell.re - 1.5).ceil() as usize } else { 0 };
    let mut stop = Termination::new(neg + rho.norm().ceil() as usize + 2);
    for k in 0..MAX_TERMS {
        let term = power * ladder.current().0;
        sum.add(term);
        if stop.observe(k, term.norm(), sum.value().norm()) {
            let pre = 0.5 * PI.sqrt() * cpow(Complex64::new(2.0, 0.0), -ell) * cpow(rho, ell + 1.0);
            return Ok(pre * sum.value());
        }
        power *= q / (k as f64 + 1.0);
        ladder.advance()?;
    }
    Err(CoulombError::Convergence { function: "free_f", terms: MAX_TERMS })
}

/// Upward recurrence u_{k+1} = (2k+1)/ρ u_k − u_{k−1} from (u_{−1}, u_0).
fn recur(n: u32, rho: Complex64, minus_one: Complex64, zero: Complex64) -> Complex64 {
    let (mut prev, mut cur) = (minus_one, zero);
    for k in 0..n {
        let next = (2.0 * k as f64 + 1.0) / rho * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// F_{0ℓ}(ρ) for any complex ℓ.
pub fn free_f(ell: Complex64, rho: Complex64) -> Result<Complex64> {
    ensure_finite("free_f", &[ell, rho])?;
    if let Some(n) = nonnegative_integer(ell) {
        if n == 0 {
            return Ok(rho.sin());
        }
        if rho.norm() > n as f64 + 1.0 {
            return Ok(recur(n, rho, rho.cos(), rho.sin()));
        }
    } else if rho == Complex64::new(0.0, 0.0) && ell.re <= -1.0 {
        return Err(CoulombError::Domain("free_f: rho = 0 with Re(ell) <= -1".into()));
    }
    riccati_j_series(ell, rho)
}

/// G_{0ℓ}(ρ). Non-negative integer ℓ uses the Riccati–Neumann recurrence;
/// other ℓ use G = [sin(πℓ) F_ℓ + F_{−ℓ−1}]/cos(πℓ), undefined for ℓ + ½ ∈ ℤ.
pub fn free_g(ell: Complex64, rho: Complex64) -> Result<Complex64> {
    ensure_finite("free_g", &[ell, rho])?;
    if rho == Complex64::new(0.0, 0.0) {
        return Err(CoulombError::Domain("free_g: rho = 0".into()));
    }
    if let Some(n) = nonnegative_integer(ell) {
        return Ok(recur(n, rho, -rho.sin(), rho.cos()));
    }
    let cos = (PI * ell).cos();
    if cos.norm() < 1e-12 {
        return Err(CoulombError::Domain(format!("free_g: ell = {ell} is half-odd at eta = 0")));
    }
    Ok(((PI * ell).sin() * free_f(ell, rho)? + free_f(-ell - 1.0, rho)?) / cos)
}

/// ρ-derivatives from u′_ℓ = u_{ℓ−1} − (ℓ/ρ) u_ℓ, valid for both F and G.
pub(crate) fn free_derivative(regular: bool, ell: Complex64, rho: Complex64) -> Result<(Complex64, Complex64)> {
    let f = if regular { free_f } else { free_g };
    let u = f(ell, rho)?;
    if rho == Complex64::new(0.0, 0.0) {
        return Err(CoulombError::Domain("derivative at rho = 0".into()));
    }
    let lower = if ell == Complex64::new(0.0, 0.0) {
        // u_{−1}: F_{0,−1} = cos ρ, G_{0,−1} = −sin ρ
        if regular {
            rho.cos()
        } else {
            -rho.sin()
        }
    } else {
        f(ell - 1.0, rho)?
    };
    Ok((u, lower - ell / rho * u))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn l0_closed_forms() {
        for r in [0.1f64, 1.3, 7.0, 19.5] {
            assert!((free_f(c(0.0), c(r)).unwrap() - r.sin()).norm() < 1e-15);
            assert!((free_g(c(0.0), c(r)).unwrap() - r.cos()).norm() < 1e-15);
        }
    }

    #[test]
    fn l1_closed_forms_both_paths() {
        for r in [0.5f64, 1.5, 2.5, 9.0] {
            let f = r.sin() / r - r.cos();
            let g = r.cos() / r + r.sin();
            assert!((free_f(c(1.0), c(r)).unwrap() - f).norm() < 1e-14, "{r}");
            assert!((free_g(c(1.0), c(r)).unwrap() - g).norm() < 1e-14, "{r}");
            // series path for a nearby non-integer
            assert!((free_f(c(1.0 + 1e-9), c(r)).unwrap() - f).norm() < 1e-8);
        }
    }

    #[test]
    fn g_is_f_of_reflected_order() {
        for l in 0..3 {
            let rho = c(1.7);
            let g = free_g(c(l as f64), rho).unwrap();
            let f = free_f(c(-(l as f64) - 1.0), rho).unwrap();
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            assert!((g - sign * f).norm() < 1e-13);
        }
    }

    #[test]
    fn derivative_relation() {
        let rho = c(2.2);
        let (u, du) = free_derivative(true, c(0.0), rho).unwrap();
        assert!((u - rho.sin()).norm() < 1e-15 && (du - rho.cos()).norm() < 1e-15);
        let (_, dg) = free_derivative(false, c(0.0), rho).unwrap();
        assert!((dg + rho.sin()).norm() < 1e-15);
    }

    #[test]
    fn half_odd_g_is_rejected() {
        assert!(free_g(c(0.5), c(1.0)).is_err());
    }
}
