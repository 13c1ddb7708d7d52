//! Coulomb wave functions and their connection formulas.
//!
//! Conventions: every power and logarithm (`(2η)^{ℓ+1}`, `ρ^{ℓ+1}`,
//! `ln(2ρ)`, …) is principal. Non-principal behavior is carried only by the
//! [`BranchValue`] metadata: `sheet_sign` picks one of the two sheets ±C of
//! the normalization coefficient, and `winding` counts turns ρ ↦ ρe^{2πin}.

mod auxiliary;
mod free;
mod functions;
mod modified;
mod select;

use num_complex::Complex64;

use crate::error::{ensure_finite, CoulombError, Result};
use crate::hypergeom::BETA_SWITCH;

pub use auxiliary::{
    coulomb_c, coulomb_d, coulomb_factor, g_fn, h_fn, normalization, theta, w_fn, w_ratio_sqrt,
};
pub use free::{free_f, free_g};
pub use functions::{
    branches_f, branches_g, continue_g, coulomb_f, coulomb_g, coulomb_g_route, coulomb_h,
    coulomb_i_fn, coulomb_i_route, coulomb_values, CoulombValues, GRoute, IRoute,
};
pub use modified::{phi, phi_dl, phi_parts, psi_fn, psi_with_derivative, PhiParts};
pub use select::{Evaluation, FunctionName};

/// Below this distance of 2ℓ from an integer, ℓ is treated as a half-integer
/// and the limit formulas are used.
pub const TOL_HALF: f64 = 1e-6;

/// Upper (+) or lower (−) choice in a ± formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// The three constructions of the normalization coefficient C_{ηℓ}. They
/// define the same two-sheeted function but place its branch cuts
/// differently in the plane of 1/η.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CVariant {
    /// Square root of the product of two gamma functions.
    SqrtGamma,
    /// Rewritten with Euler's reflection formula and w⁺.
    EulerReflection,
    /// Half the sum of two shifted-Stirling log-gammas, exponentiated.
    #[default]
    LogGamma,
}

/// The point (η, ℓ, ρ) at which Coulomb functions are evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoulombParams {
    pub eta: Complex64,
    pub ell: Complex64,
    pub rho: Complex64,
}

impl CoulombParams {
    pub fn new(eta: Complex64, ell: Complex64, rho: Complex64) -> Result<Self> {
        ensure_finite("CoulombParams", &[eta, ell, rho])?;
        Ok(Self { eta, ell, rho })
    }

    /// Real-argument shorthand.
    pub fn real(eta: f64, ell: f64, rho: f64) -> Self {
        Self {
            eta: Complex64::new(eta, 0.0),
            ell: Complex64::new(ell, 0.0),
            rho: Complex64::new(rho, 0.0),
        }
    }

    /// From wave number k, radius r and (signed) Bohr radius a_B:
    /// η = 1/(a_B k), ρ = k r.
    pub fn from_physical(k: Complex64, r: f64, bohr_radius: f64, ell: Complex64) -> Result<Self> {
        let akb = k * bohr_radius;
        if akb == Complex64::new(0.0, 0.0) {
            return Err(CoulombError::EssentialSingularity("CoulombParams"));
        }
        Self::new(akb.inv(), ell, k * r)
    }

    /// From the point a_B k = 1/η of the energy plane at fixed ρ.
    pub fn from_inverse_eta(inverse_eta: Complex64, ell: Complex64, rho: Complex64) -> Result<Self> {
        if inverse_eta == Complex64::new(0.0, 0.0) {
            return Err(CoulombError::EssentialSingularity("CoulombParams"));
        }
        Self::new(inverse_eta.inv(), ell, rho)
    }

    /// Dimensionless energy ε = η⁻².
    pub fn energy(&self) -> Result<Complex64> {
        if self.eta == Complex64::new(0.0, 0.0) {
            return Err(CoulombError::Domain("energy undefined at eta = 0".into()));
        }
        Ok((self.eta * self.eta).inv())
    }

    /// η·ρ = r/a_B, independent of k.
    pub fn eta_rho(&self) -> Complex64 {
        self.eta * self.rho
    }

    pub fn is_half_integer(&self) -> bool {
        half_integer(self.ell).is_some()
    }

    pub fn with_ell(&self, ell: Complex64) -> Self {
        Self { ell, ..*self }
    }

    pub fn with_rho(&self, rho: Complex64) -> Self {
        Self { rho, ..*self }
    }

    pub fn with_eta(&self, eta: Complex64) -> Self {
        Self { eta, ..*self }
    }

    /// The reflected angular momentum −ℓ−1.
    pub fn reflected(&self) -> Self {
        self.with_ell(-self.ell - 1.0)
    }
}

/// A function value on one branch of a multivalued Coulomb function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchValue {
    pub value: Complex64,
    /// Sheet of C_{ηℓ}: +1 principal, −1 the other sheet.
    pub sheet_sign: i8,
    /// Number of turns around ρ = 0.
    pub winding: i64,
    /// Set when ℓ lies just outside the half-integer snapping tolerance, where
    /// the complex-ℓ formulas lose roughly |sin 2πℓ|⁻¹ in relative accuracy.
    pub low_precision: bool,
}

impl BranchValue {
    pub(crate) fn principal(value: Complex64, sheet_sign: i8) -> Self {
        Self { value, sheet_sign, winding: 0, low_precision: false }
    }
}

/// ℓ snapped to the nearest element of ½ℤ, when within [`TOL_HALF`].
pub fn half_integer(ell: Complex64) -> Option<Complex64> {
    let twice = 2.0 * ell.re;
    let nearest = twice.round();
    if (twice - nearest).abs() < TOL_HALF && (2.0 * ell.im).abs() < TOL_HALF {
        Some(Complex64::new(nearest / 2.0, 0.0))
    } else {
        None
    }
}

/// Whether ℓ sits in the band between the snapping tolerance and the
/// low-precision threshold of the complex-ℓ formulas.
pub(crate) fn near_half_integer(ell: Complex64) -> bool {
    let twice = 2.0 * ell;
    let d = Complex64::new(twice.re - twice.re.round(), twice.im).norm();
    d < BETA_SWITCH / 2.0
}

/// sign(Re η), with +1 on the imaginary axis.
pub fn sign_re(eta: Complex64) -> f64 {
    if eta.re >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// sign(Re η)^{2ℓ+1} for ℓ ∈ ½ℤ (already snapped).
pub(crate) fn reflection_sign(eta: Complex64, ell_half: Complex64) -> f64 {
    let k = (2.0 * ell_half.re + 1.0).round() as i64;
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        sign_re(eta)
    }
}

pub(crate) fn sheet_check(sheet_sign: i8) -> Result<f64> {
    match sheet_sign {
        1 => Ok(1.0),
        -1 => Ok(-1.0),
        _ => Err(CoulombError::Domain(format!("sheet_sign must be ±1, got {sheet_sign}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_integer_snapping() {
        assert_eq!(half_integer(Complex64::new(1.5 + 1e-8, 0.0)), Some(Complex64::new(1.5, 0.0)));
        assert_eq!(half_integer(Complex64::new(-2.0, 1e-9)), Some(Complex64::new(-2.0, 0.0)));
        assert_eq!(half_integer(Complex64::new(0.3, 0.0)), None);
        assert_eq!(half_integer(Complex64::new(1.0, 0.01)), None);
    }

    #[test]
    fn params_derived_quantities() {
        let p = CoulombParams::real(2.0, 0.0, 3.0);
        assert!((p.energy().unwrap() - 0.25).norm() < 1e-15);
        assert!((p.eta_rho() - 6.0).norm() < 1e-15);
        assert!(CoulombParams::real(0.0, 0.0, 1.0).energy().is_err());
        // η·ρ = r/a_B does not depend on k
        let a = CoulombParams::from_physical(Complex64::new(0.5, 0.0), 3.0, 2.0, Complex64::new(0.0, 0.0)).unwrap();
        let b = CoulombParams::from_physical(Complex64::new(1.7, 0.3), 3.0, 2.0, Complex64::new(0.0, 0.0)).unwrap();
        assert!((a.eta_rho() - 1.5).norm() < 1e-14);
        assert!((b.eta_rho() - 1.5).norm() < 1e-14);
    }

    #[test]
    fn sign_of_real_part_on_axis_is_plus() {
        assert_eq!(sign_re(Complex64::new(0.0, -3.0)), 1.0);
        assert_eq!(sign_re(Complex64::new(-1e-300, 1.0)), -1.0);
        assert_eq!(reflection_sign(Complex64::new(-1.0, 0.0), Complex64::new(0.5, 0.0)), 1.0);
        assert_eq!(reflection_sign(Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)), -1.0);
    }
}
