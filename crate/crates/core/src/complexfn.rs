//! Complex gamma-family functions and the Bessel/Laguerre helpers used by the
//! low-energy and hydrogen-like checks.
//!
//! The log-gamma here is the shifted-Stirling construction whose only branch
//! cut is the negative real axis: the logarithms of the recurrence shifts all
//! share that cut, so their superposition never creates cuts elsewhere. This
//! is *not* `ln(gamma(z))` with a principal logarithm, which has infinitely
//! many cuts.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{ensure_finite, CoulombError, Result};
use crate::series::{estimate, CompensatedSum, SeriesResult, Termination, MAX_TERMS};

/// Complex scalar used throughout the crate.
pub type ComplexScalar = Complex64;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// B_{2k} / (2k (2k-1)), k = 1..8: Stirling corrections to ln Γ.
const STIRLING_LOG: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// B_{2k} / (2k), k = 1..7: asymptotic corrections to ψ.
const STIRLING_DIGAMMA: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
];

/// Parameters of the recurrence-plus-Stirling log-gamma.
///
/// The shift count is chosen per evaluation point: the smallest `N >= 0`
/// with `|z + N| >= min_modulus` and `Re(z + N) >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogGammaConfig {
    pub min_modulus: f64,
    /// Number of Bernoulli terms (at most 8). With |z+N| >= 10, stopping at
    /// B₁₀ (5 terms) leaves a 2e-14 truncation error; 8 terms reach B₁₆.
    pub stirling_terms: usize,
}

impl Default for LogGammaConfig {
    fn default() -> Self {
        Self { min_modulus: 10.0, stirling_terms: 8 }
    }
}

impl LogGammaConfig {
    pub fn shift_count(&self, z: Complex64) -> usize {
        let mut n = if z.re < 0.0 { (-z.re).ceil() as usize } else { 0 };
        // |z+n|² grows monotonically once Re(z+n) >= 0
        let target = self.min_modulus * self.min_modulus;
        let rem = target - z.im * z.im;
        if rem > 0.0 {
            let need = rem.sqrt() - z.re;
            if need > n as f64 {
                n = need.ceil() as usize;
            }
        }
        while (z + n as f64).norm_sqr() < target {
            n += 1;
        }
        n
    }
}

/// True when `z` is exactly a non-positive integer.
pub fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0
}

fn pole(function: &'static str, at: Complex64) -> CoulombError {
    CoulombError::Pole { function, at }
}

/// Log-gamma with a single branch cut on the negative real axis.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    log_gamma_with(z, &LogGammaConfig::default())
}

pub fn log_gamma_with(z: Complex64, cfg: &LogGammaConfig) -> Result<Complex64> {
    ensure_finite("log_gamma", &[z])?;
    if is_nonpositive_integer(z) {
        return Err(pole("log_gamma", z));
    }
    let n = cfg.shift_count(z);
    let w = z + n as f64;
    let ln_w = w.ln();
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut corr = Complex64::new(0.0, 0.0);
    let mut p = inv;
    for c in STIRLING_LOG.iter().take(cfg.stirling_terms.min(STIRLING_LOG.len())) {
        corr += p * *c;
        p *= inv2;
    }
    let mut acc = CompensatedSum::new();
    acc.add((w - 0.5) * ln_w);
    acc.add(-w);
    acc.add(Complex64::new(HALF_LN_2PI, 0.0));
    acc.add(corr);
    for k in 0..n {
        acc.add(-(z + k as f64).ln());
    }
    Ok(acc.value())
}

/// Γ(z). Uses Euler reflection for Re z < 1/2.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    ensure_finite("gamma", &[z])?;
    if is_nonpositive_integer(z) {
        return Err(pole("gamma", z));
    }
    if z.re < 0.5 {
        let lg = log_gamma(1.0 - z)?;
        if lg.re < -700.0 {
            return Err(CoulombError::Overflow("gamma"));
        }
        let s = (z * PI).sin();
        let v = PI / (s * lg.exp());
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(CoulombError::Overflow("gamma"));
        }
        Ok(v)
    } else {
        let lg = log_gamma(z)?;
        if lg.re > 709.0 {
            return Err(CoulombError::Overflow("gamma"));
        }
        Ok(lg.exp())
    }
}

/// 1/Γ(z), entire: exactly zero at the poles of Γ.
pub fn rgamma(z: Complex64) -> Result<Complex64> {
    Ok(rgamma_with_derivative(z)?.0)
}

/// (1/Γ(z), d/dz 1/Γ(z)). Both entire; near the poles the reflected form
/// `sin(πz) Γ(1-z) / π` keeps them smooth.
pub fn rgamma_with_derivative(z: Complex64) -> Result<(Complex64, Complex64)> {
    ensure_finite("rgamma", &[z])?;
    if is_nonpositive_integer(z) {
        // 1/Γ has a simple zero at -m with slope (-1)^m m!
        let m = -z.re;
        let g = gamma(Complex64::new(m + 1.0, 0.0))?;
        let sign = if m % 2.0 == 0.0 { 1.0 } else { -1.0 };
        return Ok((Complex64::new(0.0, 0.0), sign * g));
    }
    if z.re >= 0.5 {
        let lg = log_gamma(z)?;
        if lg.re < -708.0 {
            return Err(CoulombError::Overflow("rgamma"));
        }
        let r = (-lg).exp();
        let psi = digamma(z)?;
        Ok((r, -psi * r))
    } else {
        let w = 1.0 - z;
        let g = gamma(w)?;
        let psi = digamma(w)?;
        let (s, c) = ((z * PI).sin(), (z * PI).cos());
        let r = s * g / PI;
        let dr = g * (c - s * psi / PI);
        if !(r.re.is_finite() && r.im.is_finite() && dr.re.is_finite() && dr.im.is_finite()) {
            return Err(CoulombError::Overflow("rgamma"));
        }
        Ok((r, dr))
    }
}

/// ψ(z) = Γ'(z)/Γ(z), by upward recurrence and the asymptotic expansion.
pub fn digamma(z: Complex64) -> Result<Complex64> {
    ensure_finite("digamma", &[z])?;
    if is_nonpositive_integer(z) {
        return Err(pole("digamma", z));
    }
    let n = LogGammaConfig::default().shift_count(z);
    let w = z + n as f64;
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut acc = CompensatedSum::new();
    acc.add(w.ln());
    acc.add(-0.5 * inv);
    let mut p = inv2;
    for c in STIRLING_DIGAMMA {
        acc.add(-p * c);
        p *= inv2;
    }
    for k in 0..n {
        acc.add(-(z + k as f64).inv());
    }
    Ok(acc.value())
}

/// Rising factorial (α)_n = α(α+1)…(α+n-1).
pub fn pochhammer(alpha: Complex64, n: u32) -> Complex64 {
    (0..n).fold(Complex64::new(1.0, 0.0), |p, k| p * (alpha + k as f64))
}

/// Walks 1/Γ(b+n) and its derivative for n = 0, 1, 2, … by the recurrence
/// 1/Γ(z+1) = (1/Γ(z))/z, re-seeding directly whenever |b+n| < 1 so the
/// division never passes through zero.
#[derive(Debug, Clone)]
pub(crate) struct RecipGammaLadder {
    base: Complex64,
    n: usize,
    r: Complex64,
    dr: Complex64,
}

impl RecipGammaLadder {
    pub fn new(base: Complex64) -> Result<Self> {
        let (r, dr) = rgamma_with_derivative(base)?;
        Ok(Self { base, n: 0, r, dr })
    }

    /// (1/Γ(b+n), d/db 1/Γ(b+n)) for the current n.
    pub fn current(&self) -> (Complex64, Complex64) {
        (self.r, self.dr)
    }

    pub fn advance(&mut self) -> Result<()> {
        let z = self.base + self.n as f64;
        self.n += 1;
        let next = self.base + self.n as f64;
        if next.norm() < 1.5 || z.norm() < 1.0 {
            let (r, dr) = rgamma_with_derivative(next)?;
            self.r = r;
            self.dr = dr;
        } else {
            let inv = z.inv();
            let r = self.r * inv;
            self.dr = self.dr * inv - self.r * inv * inv;
            self.r = r;
        }
        Ok(())
    }
}

/// Principal power with an exact path for integer exponents.
pub(crate) fn cpow(base: Complex64, exponent: Complex64) -> Complex64 {
    if exponent.im == 0.0 && exponent.re.fract() == 0.0 && exponent.re.abs() < 64.0 {
        base.powi(exponent.re as i32)
    } else if base == Complex64::new(0.0, 0.0) {
        if exponent.re > 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(f64::INFINITY, 0.0)
        }
    } else {
        (exponent * base.ln()).exp()
    }
}

/// Modified Bessel function of the first kind, by its power series with
/// reciprocal-gamma coefficients.
pub fn bessel_i(nu: Complex64, x: Complex64) -> Result<SeriesResult> {
    ensure_finite("bessel_i", &[nu, x])?;
    let zero = Complex64::new(0.0, 0.0);
    let integer_order = nu.im == 0.0 && nu.re.fract() == 0.0;
    if x == zero {
        let value = if nu == zero {
            Complex64::new(1.0, 0.0)
        } else if integer_order || nu.re > 0.0 {
            zero
        } else {
            return Err(CoulombError::Domain("bessel_i: x = 0 with Re(nu) <= 0".into()));
        };
        return Ok(SeriesResult { value, terms_used: 1, truncation_estimate: 0.0 });
    }
    let half = x * 0.5;
    let q = half * half;
    let mut ladder = RecipGammaLadder::new(nu + 1.0)?;
    let min_terms = if nu.re < 0.0 { (-nu.re).ceil() as usize + 2 } else { 0 } + q.norm().sqrt().ceil() as usize;
    let mut sum = CompensatedSum::new();
    let mut stop = Termination::new(min_terms);
    let mut pw = Complex64::new(1.0, 0.0);
    for k in 0..MAX_TERMS {
        let term = pw * ladder.current().0;
        sum.add(term);
        if stop.observe(k, term.norm(), sum.value().norm()) {
            let pref = cpow(half, nu);
            return Ok(SeriesResult {
                value: pref * sum.value(),
                terms_used: k + 1,
                truncation_estimate: pref.norm() * estimate(&sum, &stop, k + 1),
            });
        }
        pw *= q / (k + 1) as f64;
        ladder.advance()?;
    }
    Err(CoulombError::Convergence { function: "bessel_i", terms: MAX_TERMS })
}

/// Modified Bessel function of the second kind for integer order, from the
/// integer-order limit of the standard two-term formula (digamma weights).
pub fn bessel_k(order: i32, x: Complex64) -> Result<SeriesResult> {
    ensure_finite("bessel_k", &[x])?;
    if x == Complex64::new(0.0, 0.0) {
        return Err(CoulombError::Domain("bessel_k: logarithmic singularity at x = 0".into()));
    }
    let n = order.unsigned_abs() as usize;
    let half = x * 0.5;
    let q = half * half;

    // finite part: ½ (x/2)^{-n} Σ_{k<n} (n-k-1)!/k! (-q)^k
    let mut finite = CompensatedSum::new();
    let mut fact_ratio = (1..n).fold(1.0, |p, k| p * k as f64); // (n-1)!/0!
    let mut pw = Complex64::new(1.0, 0.0);
    for k in 0..n {
        finite.add(pw * fact_ratio);
        pw *= -q;
        if k + 1 < n {
            fact_ratio /= ((n - k - 1) as f64) * ((k + 1) as f64);
        }
    }
    let finite_part = 0.5 * half.powi(-(n as i32)) * finite.value();

    let i_n = bessel_i(Complex64::new(n as f64, 0.0), x)?;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let log_part = -sign * half.ln() * i_n.value;

    // ½ (x/2)^n Σ (ψ(k+1)+ψ(n+k+1)) q^k / (k!(n+k)!)
    let mut psi_a = -EULER_GAMMA;
    let mut psi_b = digamma(Complex64::new((n + 1) as f64, 0.0))?.re;
    let mut coef = 1.0 / (1..=n).fold(1.0, |p, k| p * k as f64);
    let mut pw = Complex64::new(1.0, 0.0);
    let mut tail = CompensatedSum::new();
    let mut stop = Termination::new(q.norm().sqrt().ceil() as usize);
    for k in 0..MAX_TERMS {
        let term = pw * (coef * (psi_a + psi_b));
        tail.add(term);
        if stop.observe(k, term.norm(), tail.value().norm()) {
            let pref = 0.5 * sign * half.powi(n as i32);
            let value = finite_part + log_part + pref * tail.value();
            let err = pref.norm() * estimate(&tail, &stop, k + 1)
                + i_n.truncation_estimate * half.ln().norm()
                + 4.0 * f64::EPSILON * (finite_part.norm() + log_part.norm());
            return Ok(SeriesResult { value, terms_used: k + 1, truncation_estimate: err });
        }
        let k1 = (k + 1) as f64;
        psi_a += 1.0 / k1;
        psi_b += 1.0 / (n as f64 + k1);
        coef /= k1 * (n as f64 + k1);
        pw *= q;
    }
    Err(CoulombError::Convergence { function: "bessel_k", terms: MAX_TERMS })
}

/// Generalized Laguerre polynomial L_n^{(α)}(x) by three-term recurrence.
pub fn laguerre(n: u32, alpha: Complex64, x: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    if n == 0 {
        return one;
    }
    let mut prev = one;
    let mut cur = alpha + 1.0 - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}
