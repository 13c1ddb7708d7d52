//! Named access to every function of the family, shared by the CLI and the
//! renderer.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::*;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FunctionName {
    F,
    G,
    Hp,
    Hm,
    Phi,
    Psi,
    I,
    C,
    W,
    H,
    SmallG,
    Theta,
}

impl FunctionName {
    pub const ALL: [FunctionName; 12] = [
        FunctionName::F,
        FunctionName::G,
        FunctionName::Hp,
        FunctionName::Hm,
        FunctionName::Phi,
        FunctionName::Psi,
        FunctionName::I,
        FunctionName::C,
        FunctionName::W,
        FunctionName::H,
        FunctionName::SmallG,
        FunctionName::Theta,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FunctionName::F => "F",
            FunctionName::G => "G",
            FunctionName::Hp => "Hp",
            FunctionName::Hm => "Hm",
            FunctionName::Phi => "Phi",
            FunctionName::Psi => "Psi",
            FunctionName::I => "I",
            FunctionName::C => "C",
            FunctionName::W => "w",
            FunctionName::H => "h",
            FunctionName::SmallG => "g",
            FunctionName::Theta => "theta",
        }
    }

    /// True if the value does not depend on ρ.
    pub fn ignores_rho(self) -> bool {
        matches!(self, FunctionName::C | FunctionName::W | FunctionName::H | FunctionName::SmallG)
    }
}

impl fmt::Display for FunctionName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FunctionName {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        FunctionName::ALL
            .iter()
            .copied()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<_> = FunctionName::ALL.iter().map(|n| n.as_str()).collect();
                format!("unknown function '{s}', expected one of {}", names.join(", "))
            })
    }
}

/// A function name together with its branch options.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub function: FunctionName,
    pub variant: CVariant,
    /// Sign for w± and h±; exponential sign for Φ.
    pub sign: Sign,
    pub sheet_sign: i8,
    /// Winding n of ρ ↦ ρe^{2πin}, used by G.
    pub winding: i64,
}

impl Evaluation {
    pub fn new(function: FunctionName) -> Self {
        Evaluation { function, variant: CVariant::default(), sign: Sign::Plus, sheet_sign: 1, winding: 0 }
    }

    pub fn evaluate(&self, p: &CoulombParams) -> Result<Complex64> {
        let CoulombParams { eta, ell, rho } = *p;
        let s = self.sheet_sign;
        Ok(match self.function {
            FunctionName::F => coulomb_f(p, s)?.value,
            FunctionName::G => continue_g(p, self.winding, s)?.value,
            FunctionName::Hp => coulomb_h(p, Sign::Plus, s)?.value,
            FunctionName::Hm => coulomb_h(p, Sign::Minus, s)?.value,
            FunctionName::Phi => phi(p, self.sign)?,
            FunctionName::Psi => psi_fn(p)?,
            FunctionName::I => coulomb_i_fn(p)?.value,
            FunctionName::C => sheet_check(s)? * coulomb_c(eta, ell, self.variant)?,
            FunctionName::W => w_fn(eta, ell, self.sign)?,
            FunctionName::H => h_fn(eta, ell, self.sign)?,
            FunctionName::SmallG => g_fn(eta, ell)?,
            FunctionName::Theta => theta(eta, ell, rho)?,
        })
    }
}
