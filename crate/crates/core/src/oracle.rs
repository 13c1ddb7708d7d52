//! Independent reference values from direct integration of the radial
//! Coulomb equation u″ = [ℓ(ℓ+1)/ρ² + 2η/ρ − 1] u along straight segments
//! in the complex ρ plane. Used by the tests and `selftest` only.

use num_complex::Complex64;

use crate::complexfn::{cpow, pochhammer};
use crate::coulomb::{coulomb_c, theta, CVariant, CoulombParams, Sign};
use crate::error::{ensure_finite, CoulombError, Result};

pub const DEFAULT_REL_TOL: f64 = 1e-10;
/// Start of the outward integration of the regular solution.
pub const SEED_RHO: f64 = 1e-3;
/// Start of the inward integration of H±.
pub const FAR_RHO: f64 = 40.0;

const MAX_STEPS: usize = 1_000_000;

/// A point on a solution: u(ρ) and u′(ρ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeState {
    pub u: Complex64,
    pub du: Complex64,
    pub rho: Complex64,
}

// Dormand–Prince 5(4) tableau
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

type Y = [Complex64; 2];

fn axpy(y: &Y, terms: &[(f64, &Y)], h: f64) -> Y {
    let mut out = *y;
    for (c, k) in terms {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

/// One straight segment a → b, parametrized by t ∈ [0, 1].
struct Segment {
    a: Complex64,
    delta: Complex64,
    ell_term: Complex64,
    two_eta: Complex64,
}

impl Segment {
    fn rhs(&self, t: f64, y: &Y) -> Y {
        let rho = self.a + t * self.delta;
        let v = self.ell_term / (rho * rho) + self.two_eta / rho - 1.0;
        [self.delta * y[1], self.delta * v * y[0]]
    }
}

fn segment_hits_origin(a: Complex64, b: Complex64) -> bool {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return a == Complex64::new(0.0, 0.0);
    }
    // closest point of the segment to 0
    let t = (-(a.conj() * d).re / len2).clamp(0.0, 1.0);
    let closest = a + t * d;
    closest.norm() <= 1e-12 * (a.norm().max(b.norm()))
}

fn integrate_segment(seg: &Segment, y0: Y, rel_tol: f64) -> Result<Y> {
    let scale = |y: &Y| y[0].norm() + y[1].norm();
    let mut y = y0;
    let mut t = 0.0;
    let mut h = 0.01_f64.min(0.1 / seg.delta.norm().max(1e-300)).max(1e-6);
    let mut k1 = seg.rhs(t, &y);
    for _ in 0..MAX_STEPS {
        if t >= 1.0 {
            return Ok(y);
        }
        if t + h > 1.0 {
            h = 1.0 - t;
        }
        let k2 = seg.rhs(t + C2 * h, &axpy(&y, &[(A21, &k1)], h));
        let k3 = seg.rhs(t + C3 * h, &axpy(&y, &[(A31, &k1), (A32, &k2)], h));
        let k4 = seg.rhs(t + C4 * h, &axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h));
        let k5 = seg.rhs(t + C5 * h, &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h));
        let k6 = seg.rhs(t + h, &axpy(&y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], h));
        let y5 = axpy(&y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], h);
        let k7 = seg.rhs(t + h, &y5);
        let err = axpy(
            &[Complex64::new(0.0, 0.0); 2],
            &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)],
            h,
        );
        let tol = rel_tol * scale(&y).max(scale(&y5)) + f64::MIN_POSITIVE;
        let ratio = (err[0].norm() + err[1].norm()) / tol;
        if !ratio.is_finite() || !y5[0].is_finite() || !y5[1].is_finite() {
            return Err(CoulombError::StepFailure {
                at: seg.a + t * seg.delta,
                reason: "non-finite state".into(),
            });
        }
        if ratio <= 1.0 {
            t += h;
            y = y5;
            k1 = k7;
        }
        let factor = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h < 1e-14 {
            return Err(CoulombError::StepFailure {
                at: seg.a + t * seg.delta,
                reason: format!("step size underflow at rel_tol {rel_tol:e}"),
            });
        }
    }
    Err(CoulombError::StepFailure { at: seg.a + t * seg.delta, reason: "too many steps".into() })
}

/// Integrates the radial equation from `seed` through each waypoint of
/// `path` in turn, with local relative error at most `rel_tol` per step.
pub fn integrate_radial(p: &CoulombParams, seed: OdeState, path: &[Complex64], rel_tol: f64) -> Result<OdeState> {
    ensure_finite("integrate_radial", &[p.eta, p.ell, seed.u, seed.du, seed.rho])?;
    ensure_finite("integrate_radial", path)?;
    if !(rel_tol > 0.0) {
        return Err(CoulombError::Domain("rel_tol must be positive".into()));
    }
    let mut y = [seed.u, seed.du];
    let mut a = seed.rho;
    for &b in path {
        if segment_hits_origin(a, b) {
            return Err(CoulombError::PathThroughOrigin);
        }
        if a == b {
            continue;
        }
        let seg = Segment { a, delta: b - a, ell_term: p.ell * (p.ell + 1.0), two_eta: 2.0 * p.eta };
        y = integrate_segment(&seg, y, rel_tol)?;
        a = b;
    }
    Ok(OdeState { u: y[0], du: y[1], rho: a })
}

/// Frobenius series of the regular solution at small positive ρ₀:
/// u = Σ a_k ρ^{k+ℓ+1}, a_0 = C_{ηℓ}, a_k k(k+2ℓ+1) = 2η a_{k−1} − a_{k−2}.
pub fn regular_seed(p: &CoulombParams, rho0: f64) -> Result<OdeState> {
    let c = coulomb_c(p.eta, p.ell, CVariant::LogGamma)?;
    let r = Complex64::new(rho0, 0.0);
    let base = cpow(r, p.ell + 1.0);
    let (mut prev, mut cur) = (Complex64::new(0.0, 0.0), c);
    let mut power = Complex64::new(1.0, 0.0);
    let (mut u, mut du) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    let mut quiet = 0;
    for k in 0..200 {
        let term = cur * power;
        u += term;
        du += term * (p.ell + 1.0 + k as f64);
        if term.norm() <= f64::EPSILON * u.norm() {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
        let kf = k as f64 + 1.0;
        let denom = kf * (kf + 2.0 * p.ell + 1.0);
        let next = (2.0 * p.eta * cur - prev) / denom;
        prev = cur;
        cur = next;
        power *= r;
    }
    Ok(OdeState { u: base * u, du: base * du / r, rho: r })
}

/// Far-field expansion H± ~ e^{±iθ} Σ (a)_k (b)_k /(k! (±2iρ)^k) with
/// a = ℓ+1±iη, b = −ℓ±iη, truncated at its smallest term.
pub fn outgoing_seed(p: &CoulombParams, sign: Sign, rho: Complex64) -> Result<OdeState> {
    let s = sign.value();
    let i = Complex64::new(0.0, 1.0);
    let a = p.ell + 1.0 + s * i * p.eta;
    let b = -p.ell + s * i * p.eta;
    let z = s * 2.0 * i * rho;
    let (mut sum, mut dsum) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    let mut last = f64::INFINITY;
    for k in 0..400u32 {
        let term = pochhammer(a, k) * pochhammer(b, k) / (factorial(k) * cpow(z, Complex64::new(k as f64, 0.0)));
        if term.norm() > last {
            break;
        }
        last = term.norm();
        sum += term;
        dsum -= term * (k as f64) / rho;
        if last <= f64::EPSILON * 1e-3 * sum.norm() {
            break;
        }
    }
    let th = theta(p.eta, p.ell, rho)?;
    let dth = 1.0 - p.eta / rho;
    let e = (s * i * th).exp();
    Ok(OdeState { u: e * sum, du: e * (s * i * dth * sum + dsum), rho })
}

fn factorial(k: u32) -> f64 {
    (1..=k).fold(1.0, |acc, j| acc * j as f64)
}

/// F and F′ at p.rho by outward integration from the Frobenius seed.
pub fn reference_f(p: &CoulombParams, rel_tol: f64) -> Result<OdeState> {
    let seed = regular_seed(p, SEED_RHO)?;
    integrate_radial(p, seed, &[p.rho], rel_tol)
}

/// H± and H±′ at p.rho by inward integration from the far-field seed.
pub fn reference_h(p: &CoulombParams, sign: Sign, rel_tol: f64) -> Result<OdeState> {
    let seed = outgoing_seed(p, sign, Complex64::new(FAR_RHO, 0.0))?;
    integrate_radial(p, seed, &[p.rho], rel_tol)
}

/// G = (H⁺ + H⁻)/2 and its derivative at p.rho.
pub fn reference_g(p: &CoulombParams, rel_tol: f64) -> Result<OdeState> {
    let hp = reference_h(p, Sign::Plus, rel_tol)?;
    let hm = reference_h(p, Sign::Minus, rel_tol)?;
    Ok(OdeState { u: 0.5 * (hp.u + hm.u), du: 0.5 * (hp.du + hm.du), rho: p.rho })
}

/// Vertices of a regular polygon inscribed in |ρ| = radius, starting after
/// `start` and winding `turns` times (counterclockwise for turns > 0).
pub fn loop_path(start: Complex64, turns: i64, vertices: usize) -> Vec<Complex64> {
    let total = vertices * turns.unsigned_abs() as usize;
    let dir = turns.signum() as f64;
    (1..=total)
        .map(|j| {
            let phi = dir * 2.0 * std::f64::consts::PI * j as f64 / vertices as f64;
            start * Complex64::from_polar(1.0, phi)
        })
        .collect()
}
