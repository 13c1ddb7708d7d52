//! Confluent hypergeometric functions: Kummer's M, its regularized form
//! M★(α, β, z) = M(α, β, z)/Γ(β), the parameter derivative of M★, and the
//! Tricomi function U.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::complexfn::{is_nonpositive_integer, rgamma, rgamma_with_derivative, RecipGammaLadder};
use crate::dd::CDd;
use crate::error::{ensure_finite, CoulombError, Result};
use crate::series::{estimate, CompensatedSum, SeriesResult, Termination, MAX_TERMS};

/// Inside this distance from an integer β the two-term Tricomi formula is
/// replaced by its limit form.
pub const BETA_SWITCH: f64 = 1e-3;

/// Estimated relative error above which the M★ series is re-summed in
/// double-double arithmetic.
const EXTENDED_PRECISION_THRESHOLD: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KummerParams {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub z: Complex64,
}

impl KummerParams {
    pub fn new(alpha: Complex64, beta: Complex64, z: Complex64) -> Self {
        Self { alpha, beta, z }
    }
}

/// The four sums produced by one pass over the M★ series: the value, its
/// z-derivative, and the derivatives of both along a direction in (α, β).
#[derive(Debug, Clone, Copy)]
pub(crate) struct KummerSums {
    pub m: SeriesResult,
    pub dm_dz: SeriesResult,
    pub dm_dp: SeriesResult,
    pub d2m_dz_dp: SeriesResult,
}

/// Shared series pass. Each term is built from running products so that a
/// zero factor in (α)_n or a pole of Γ(β+n) never causes a division by zero.
pub(crate) fn kummer_sums(p: &KummerParams, dalpha: Complex64, dbeta: Complex64) -> Result<KummerSums> {
    ensure_finite("kummer", &[p.alpha, p.beta, p.z, dalpha, dbeta])?;
    let sums = kummer_sums_f64(p, dalpha, dbeta)?;
    let worst = [sums.m, sums.dm_dz, sums.dm_dp, sums.d2m_dz_dp]
        .iter()
        .map(|r| r.relative_error())
        .fold(0.0, f64::max);
    if worst > EXTENDED_PRECISION_THRESHOLD {
        return kummer_sums_dd(p, dalpha, dbeta);
    }
    Ok(sums)
}

fn kummer_sums_f64(p: &KummerParams, dalpha: Complex64, dbeta: Complex64) -> Result<KummerSums> {
    let KummerParams { alpha, beta, z } = *p;
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);

    // a_n = (α)_n zⁿ/n!, b_n = (α)_n z^{n-1}/(n-1)! (so d/dz a_n = b_n), and
    // their directional derivatives in α.
    let (mut a, mut da) = (one, zero);
    let (mut b, mut db) = (zero, zero);
    let mut ladder = RecipGammaLadder::new(beta)?;

    let neg_beta = if beta.re < 0.0 { (-beta.re).ceil() as usize } else { 0 };
    let mut stop = Termination::new(neg_beta + z.norm().ceil() as usize + 2);
    let mut sums = [CompensatedSum::new(); 4];

    for n in 0..MAX_TERMS {
        let (r, dr) = ladder.current();
        let terms = [
            a * r,
            b * r,
            da * r + a * dr * dbeta,
            db * r + b * dr * dbeta,
        ];
        for (s, t) in sums.iter_mut().zip(terms.iter()) {
            s.add(*t);
        }
        let pairs: Vec<(f64, f64)> =
            terms.iter().zip(sums.iter()).map(|(t, s)| (t.norm(), s.value().norm())).collect();
        if stop.observe_many(n, &pairs) {
            let mk = |s: &CompensatedSum| SeriesResult {
                value: s.value(),
                terms_used: n + 1,
                truncation_estimate: estimate(s, &stop, n + 1),
            };
            return Ok(KummerSums {
                m: mk(&sums[0]),
                dm_dz: mk(&sums[1]),
                dm_dp: mk(&sums[2]),
                d2m_dz_dp: mk(&sums[3]),
            });
        }
        let nf = n as f64;
        let factor = alpha + nf;
        // b_{n+1} = (α)_{n+1} zⁿ/n! = a_n (α+n)
        let b_next = a * factor;
        let db_next = da * factor + a * dalpha;
        let step = z / (nf + 1.0);
        let a_next = b_next * step;
        let da_next = db_next * step;
        a = a_next;
        da = da_next;
        b = b_next;
        db = db_next;
        ladder.advance()?;
    }
    Err(CoulombError::Convergence { function: "kummer", terms: MAX_TERMS })
}

/// The same pass in double-double arithmetic. Used when the terms cancel so
/// much that binary64 rounding of the terms themselves would dominate.
fn kummer_sums_dd(p: &KummerParams, dalpha: Complex64, dbeta: Complex64) -> Result<KummerSums> {
    let KummerParams { alpha, beta, z } = *p;
    let zero = CDd::default();
    let (mut a, mut da) = (CDd::from_c64(Complex64::new(1.0, 0.0)), zero);
    let (mut b, mut db) = (zero, zero);
    let (r0, dr0) = rgamma_with_derivative(beta)?;
    let (mut r, mut dr) = (CDd::from_c64(r0), CDd::from_c64(dr0));
    let alpha = CDd::from_c64(alpha);
    let beta_dd = CDd::from_c64(beta);

    let neg_beta = if beta.re < 0.0 { (-beta.re).ceil() as usize } else { 0 };
    let mut stop = Termination::new(neg_beta + z.norm().ceil() as usize + 2);
    let mut sums = [zero; 4];
    let mut abs_total = [0.0f64; 4];

    for n in 0..MAX_TERMS {
        let terms = [a * r, b * r, da * r + (a * dr).mul_c64(dbeta), db * r + (b * dr).mul_c64(dbeta)];
        for k in 0..4 {
            sums[k] = sums[k] + terms[k];
            abs_total[k] += terms[k].norm();
        }
        let pairs: Vec<(f64, f64)> = terms.iter().zip(sums.iter()).map(|(t, s)| (t.norm(), s.norm())).collect();
        if stop.observe_many(n, &pairs) {
            let mk = |k: usize| {
                let value = sums[k].to_c64();
                SeriesResult {
                    value,
                    terms_used: n + 1,
                    truncation_estimate: f64::EPSILON * value.norm() + 1e-30 * abs_total[k] + stop.tail(),
                }
            };
            return Ok(KummerSums { m: mk(0), dm_dz: mk(1), dm_dp: mk(2), d2m_dz_dp: mk(3) });
        }
        let nf = n as f64;
        let factor = alpha.add_f64(nf);
        let b_next = a * factor;
        let db_next = da * factor + a.mul_c64(dalpha);
        let step = CDd::from_c64(z).div_f64(nf + 1.0);
        a = b_next * step;
        da = db_next * step;
        b = b_next;
        db = db_next;
        // 1/Γ(β+n+1) = (1/Γ(β+n))/(β+n), reseeded near the poles
        let here = beta_dd.add_f64(nf);
        let next = beta + (nf + 1.0);
        if next.norm() < 1.5 || here.norm() < 1.0 {
            let (r1, dr1) = rgamma_with_derivative(next)?;
            r = CDd::from_c64(r1);
            dr = CDd::from_c64(dr1);
        } else {
            let inv = here.inv();
            dr = dr * inv - r * inv * inv;
            r = r * inv;
        }
    }
    Err(CoulombError::Convergence { function: "kummer", terms: MAX_TERMS })
}

/// Kummer's function M(α, β, z) = Σ (α)_n/(β)_n zⁿ/n!.
pub fn kummer_m(p: &KummerParams) -> Result<SeriesResult> {
    if is_nonpositive_integer(p.beta) {
        return Err(CoulombError::Pole { function: "kummer_m", at: p.beta });
    }
    ensure_finite("kummer_m", &[p.alpha, p.beta, p.z])?;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = CompensatedSum::new();
    let mut stop = Termination::new(p.z.norm().ceil() as usize + 2);
    for n in 0..MAX_TERMS {
        sum.add(term);
        if stop.observe(n, term.norm(), sum.value().norm()) {
            return Ok(SeriesResult {
                value: sum.value(),
                terms_used: n + 1,
                truncation_estimate: estimate(&sum, &stop, n + 1),
            });
        }
        let nf = n as f64;
        term *= (p.alpha + nf) / (p.beta + nf) * p.z / (nf + 1.0);
    }
    Err(CoulombError::Convergence { function: "kummer_m", terms: MAX_TERMS })
}

/// Regularized Kummer function M★(α, β, z) = Σ (α)_n/Γ(β+n) zⁿ/n!, entire
/// in all three arguments.
pub fn kummer_m_reg(p: &KummerParams) -> Result<SeriesResult> {
    let zero = Complex64::new(0.0, 0.0);
    Ok(kummer_sums(p, zero, zero)?.m)
}

/// Directional derivative of M★ along (dα, dβ).
pub fn kummer_m_reg_dparams(p: &KummerParams, dalpha: Complex64, dbeta: Complex64) -> Result<SeriesResult> {
    Ok(kummer_sums(p, dalpha, dbeta)?.dm_dp)
}

/// The bracket B(β) of the regularized Tricomi form,
/// `M★(α,β,z)/Γ(α-β+1) - z^{1-β} M★(α-β+1, 2-β, z)/Γ(α)`, together with
/// its β-derivative at fixed α and z.
fn tricomi_bracket(alpha: Complex64, beta: Complex64, z: Complex64) -> Result<(Complex64, Complex64)> {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let first = kummer_sums(&KummerParams::new(alpha, beta, z), zero, one)?;
    let alpha2 = alpha - beta + 1.0;
    let second = kummer_sums(&KummerParams::new(alpha2, 2.0 - beta, z), -one, -one)?;
    let (r1, dr1) = crate::complexfn::rgamma_with_derivative(alpha2)?;
    let r_alpha = rgamma(alpha)?;
    let ln_z = z.ln();
    let zp = ((1.0 - beta) * ln_z).exp();
    let value = first.m.value * r1 - zp * second.m.value * r_alpha;
    // d/dβ: α-β+1 moves with slope -1
    let deriv = first.dm_dp.value * r1 - first.m.value * dr1
        + ln_z * zp * second.m.value * r_alpha
        - zp * second.dm_dp.value * r_alpha;
    Ok((value, deriv))
}

/// Tricomi's confluent hypergeometric function U(α, β, z), principal branch
/// in z (cut on the negative real axis).
pub fn tricomi_u(p: &KummerParams) -> Result<Complex64> {
    let KummerParams { alpha, beta, z } = *p;
    ensure_finite("tricomi_u", &[alpha, beta, z])?;
    if z == Complex64::new(0.0, 0.0) {
        return Err(CoulombError::Domain("tricomi_u: z = 0".into()));
    }
    let m = beta.re.round();
    let delta = beta - m;
    if delta.norm() > BETA_SWITCH {
        let (bracket, _) = tricomi_bracket(alpha, beta, z)?;
        return Ok(bracket * PI / (beta * PI).sin());
    }
    // β = m + δ with small δ. B(m) = 0 by the integer-β Kummer reflection, so
    // B(β) = δ B'(β) - δ²/2 B''(β) + O(δ³), with B'' by a central difference.
    let (_, d1) = tricomi_bracket(alpha, beta, z)?;
    let h = BETA_SWITCH;
    let (_, d_plus) = tricomi_bracket(alpha, beta + h, z)?;
    let (_, d_minus) = tricomi_bracket(alpha, beta - h, z)?;
    let d2 = (d_plus - d_minus) / (2.0 * h);
    let sinc = if delta == Complex64::new(0.0, 0.0) {
        Complex64::new(1.0, 0.0)
    } else {
        delta * PI / (delta * PI).sin()
    };
    let parity = if (m as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    Ok(parity * sinc * (d1 - 0.5 * delta * d2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn m_at_zero_is_one() {
        let v = kummer_m(&KummerParams::new(c(0.3, 2.0), c(-1.5, 0.2), c(0.0, 0.0))).unwrap();
        assert_eq!(v.value, c(1.0, 0.0));
        assert!(matches!(
            kummer_m(&KummerParams::new(c(1.0, 0.0), c(-2.0, 0.0), c(1.0, 0.0))),
            Err(CoulombError::Pole { .. })
        ));
    }

    #[test]
    fn m_with_equal_parameters_is_exponential() {
        let z = c(1.0, 1.0);
        let v = kummer_m(&KummerParams::new(c(1.0, 0.0), c(1.0, 0.0), z)).unwrap();
        assert!((v.value - z.exp()).norm() < 1e-15 * z.exp().norm());
    }

    #[test]
    fn regularized_leading_term() {
        let beta = c(2.5, 0.5);
        let v = kummer_m_reg(&KummerParams::new(c(0.1, 0.2), beta, c(0.0, 0.0))).unwrap();
        assert!((v.value - rgamma(beta).unwrap()).norm() < 1e-15);
        let v = kummer_m_reg(&KummerParams::new(c(0.1, 0.2), c(0.0, 0.0), c(0.0, 0.0))).unwrap();
        assert_eq!(v.value.norm(), 0.0);
    }

    #[test]
    fn regularized_does_not_stop_inside_leading_zeros() {
        // β = -3: terms n = 0..3 vanish, the first non-zero term is n = 4
        let p = KummerParams::new(c(1.0, 0.0), c(-3.0, 0.0), c(0.5, 0.0));
        let v = kummer_m_reg(&p).unwrap();
        assert!(v.value.norm() > 1e-3);
    }

    #[test]
    fn dparams_zero_direction_and_origin() {
        let p = KummerParams::new(c(0.4, 0.3), c(1.7, -0.2), c(0.9, 0.4));
        let v = kummer_m_reg_dparams(&p, c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        assert_eq!(v.value.norm(), 0.0);
        let p0 = KummerParams::new(p.alpha, p.beta, c(0.0, 0.0));
        let v = kummer_m_reg_dparams(&p0, c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        let expected = -crate::complexfn::digamma(p.beta).unwrap() * rgamma(p.beta).unwrap();
        assert!((v.value - expected).norm() < 1e-14);
    }

    #[test]
    fn tricomi_rejects_origin() {
        assert!(matches!(
            tricomi_u(&KummerParams::new(c(1.0, 0.0), c(1.5, 0.0), c(0.0, 0.0))),
            Err(CoulombError::Domain(_))
        ));
    }

    // Reference values from 200-term 40-digit summations.
    #[test]
    fn reference_values() {
        let m = kummer_m(&KummerParams::new(c(0.5, 0.0), c(1.5, 0.0), c(-2.0, 0.0))).unwrap().value;
        assert!((m - c(0.598_144_006_661_304_1, 0.0)).norm() < 1e-14, "{m}");
        let ms = kummer_m_reg(&KummerParams::new(c(1.5, 0.5), c(-1.0, 0.0), c(1.0, 0.0))).unwrap().value;
        let want = c(5.008_311_326_111_277_6, 3.909_874_205_600_822);
        assert!((ms - want).norm() < 1e-13 * want.norm(), "{ms}");
        let u = tricomi_u(&KummerParams::new(c(1.0, 1.0), c(2.0, 0.0), c(0.0, -2.0))).unwrap();
        let want = c(0.118_426_133_676_941_09, 0.177_850_804_924_359_99);
        assert!((u - want).norm() < 1e-11 * want.norm(), "{u}");
    }

    #[test]
    fn dparams_matches_richardson_difference() {
        let p = KummerParams::new(c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0));
        let (da, db) = (c(1.0, 0.0), c(2.0, 0.0));
        let at = |t: f64| kummer_m_reg(&KummerParams::new(p.alpha + da * t, p.beta + db * t, p.z)).unwrap().value;
        let d = |h: f64| (at(h) - at(-h)) / (2.0 * h);
        let h = 1e-5;
        let fd = (4.0 * d(h / 2.0) - d(h)) / 3.0;
        let v = kummer_m_reg_dparams(&p, da, db).unwrap().value;
        assert!((v - fd).norm() < 1e-9 * fd.norm(), "{v} vs {fd}");
    }
}
