//! Power-series plumbing shared by the special functions: compensated
//! accumulation and the common termination rule.

use num_complex::Complex64;

/// Hard cap on the number of terms of any power series.
pub const MAX_TERMS: usize = 2000;

/// Number of consecutive negligible terms required before stopping.
const QUIET_TERMS: usize = 3;

/// Value of a power series plus convergence diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesResult {
    pub value: Complex64,
    pub terms_used: usize,
    /// Rough absolute error bound: rounding noise of the summed terms plus
    /// the size of the last terms kept.
    pub truncation_estimate: f64,
}

impl SeriesResult {
    /// Estimated relative error; infinite when the value is zero but the
    /// estimate is not.
    pub fn relative_error(&self) -> f64 {
        let m = self.value.norm();
        if m > 0.0 {
            self.truncation_estimate / m
        } else if self.truncation_estimate == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bp = s - a;
    let err = (a - (s - bp)) + (b - bp);
    (s, err)
}

/// Neumaier-compensated accumulator for complex terms.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: Complex64,
    comp: Complex64,
    abs_total: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, term: Complex64) {
        let (re, ere) = two_sum(self.sum.re, term.re);
        let (im, eim) = two_sum(self.sum.im, term.im);
        self.sum = Complex64::new(re, im);
        self.comp += Complex64::new(ere, eim);
        self.abs_total += term.norm();
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        self.sum + self.comp
    }

    /// Sum of the moduli of every term added so far.
    pub fn abs_total(&self) -> f64 {
        self.abs_total
    }
}

/// Tracks the shared stopping rule: three consecutive terms each smaller
/// than machine epsilon times the running sum, once `min_terms` have been
/// consumed.
#[derive(Debug, Clone)]
pub struct Termination {
    min_terms: usize,
    quiet: usize,
    last_terms: f64,
}

impl Termination {
    pub fn new(min_terms: usize) -> Self {
        Self { min_terms, quiet: 0, last_terms: 0.0 }
    }

    /// Feeds term `n` (0-based) against its partial sum. Returns true when
    /// the series may stop.
    pub fn observe(&mut self, n: usize, term: f64, partial: f64) -> bool {
        self.observe_many(n, &[(term, partial)])
    }

    /// Same rule applied jointly to several series summed in lockstep.
    pub fn observe_many(&mut self, n: usize, pairs: &[(f64, f64)]) -> bool {
        let quiet = pairs.iter().all(|&(t, s)| t <= f64::EPSILON * s);
        let biggest = pairs.iter().map(|p| p.0).fold(0.0, f64::max);
        if quiet {
            self.quiet += 1;
            self.last_terms += biggest;
        } else {
            self.quiet = 0;
            self.last_terms = biggest;
        }
        n + 1 >= self.min_terms && self.quiet >= QUIET_TERMS
    }

    /// Magnitude of the trailing negligible terms, used in error estimates.
    pub fn tail(&self) -> f64 {
        self.last_terms
    }
}

/// Error estimate for a compensated sum that stopped under [`Termination`].
pub(crate) fn estimate(sum: &CompensatedSum, term: &Termination, terms: usize) -> f64 {
    let rounding = 2.0 * f64::EPSILON * sum.abs_total() * (1.0 + (terms as f64).sqrt());
    rounding + term.tail()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::new();
        s.add(Complex64::new(1.0, 0.0));
        for _ in 0..10 {
            s.add(Complex64::new(1e-17, 0.0));
        }
        s.add(Complex64::new(-1.0, 0.0));
        assert!((s.value().re - 1e-16).abs() < 1e-30);
    }

    #[test]
    fn termination_waits_for_min_terms() {
        let mut t = Termination::new(6);
        for n in 0..5 {
            assert!(!t.observe(n, 0.0, 0.0));
        }
        assert!(t.observe(5, 0.0, 0.0));
    }

    #[test]
    fn termination_resets_on_large_term() {
        let mut t = Termination::new(0);
        assert!(!t.observe(0, 0.0, 1.0));
        assert!(!t.observe(1, 0.0, 1.0));
        assert!(!t.observe(2, 0.5, 1.0));
        assert!(!t.observe(3, 0.0, 1.0));
        assert!(!t.observe(4, 0.0, 1.0));
        assert!(t.observe(5, 0.0, 1.0));
    }
}
