//! The invariant battery behind `coulombx selftest`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complexfn::{bessel_i, bessel_k, cpow, digamma, gamma, laguerre, log_gamma, rgamma};
use crate::coulomb::*;
use crate::hypergeom::{kummer_m, tricomi_u, KummerParams};
use crate::oracle;
use crate::render::{parse_p6, render_grid_with_threads, GridSpec, Plane, Target};

type Check = std::result::Result<(), String>;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Outcome of one named invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub result: Check,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel_err(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

fn expect(what: &str, a: Complex64, b: Complex64, tol: f64) -> Check {
    let e = rel_err(a, b);
    if e <= tol {
        Ok(())
    } else {
        Err(format!("{what}: {a} vs {b}, relative error {e:.2e} > {tol:.0e}"))
    }
}

/// |a − b| ≤ tol·scale, for identities whose left side is a difference of
/// terms of size `scale`.
fn expect_abs(what: &str, a: Complex64, b: Complex64, scale: f64, tol: f64) -> Check {
    let e = (a - b).norm();
    if e <= tol * scale {
        Ok(())
    } else {
        Err(format!("{what}: {a} vs {b}, error {e:.2e} > {tol:.0e}·{scale:.2e}"))
    }
}

fn ok<T>(r: crate::Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| format!("{}: {e}", e.kind()))
}

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0xC0_0B)
}

/// η with modulus in [0.3, 3] in either half-plane, away from the imaginary
/// axis where the reflection signs switch.
fn random_eta(r: &mut ChaCha8Rng) -> Complex64 {
    let m = r.gen_range(0.3..3.0);
    let a = r.gen_range(-1.2..1.2) + if r.gen_bool(0.5) { 0.0 } else { PI };
    Complex64::from_polar(m, a)
}

fn random_rho(r: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(r.gen_range(0.2..3.0), r.gen_range(-1.0..1.0))
}

fn random_ell(r: &mut ChaCha8Rng) -> Complex64 {
    c(r.gen_range(-0.45..1.45), r.gen_range(-0.4..0.4))
}

fn half_integers() -> [f64; 5] {
    [0.0, 0.5, 1.0, 1.5, 2.0]
}

fn log_gamma_single_cut() -> Check {
    let d = 1e-8;
    for x in [0.5, 2.0, 7.3] {
        let jump = ok(log_gamma(c(x, d)))? - ok(log_gamma(c(x, -d)))?;
        if jump.norm() > 1e-6 {
            return Err(format!("jump {jump} across x = {x}"));
        }
    }
    for x in [-0.5, -2.5, -7.3] {
        let jump = (ok(log_gamma(c(x, d)))? - ok(log_gamma(c(x, -d)))?).im / (2.0 * PI);
        if (jump - jump.round()).abs() > 1e-6 || jump.round() == 0.0 {
            return Err(format!("jump {jump}·2πi across x = {x}"));
        }
    }
    Ok(())
}

fn gamma_identities() -> Check {
    let mut r = rng();
    for _ in 0..50 {
        let z = c(r.gen_range(-4.0..4.0), r.gen_range(-3.0..3.0));
        expect("Γ(z+1) = zΓ(z)", ok(gamma(z + 1.0))?, z * ok(gamma(z))?, 1e-12)?;
        expect("Γ(z)Γ(1−z) = π/sin πz", ok(gamma(z))? * ok(gamma(1.0 - z))?, PI / (PI * z).sin(), 1e-11)?;
        expect("ψ(z+1) = ψ(z) + 1/z", ok(digamma(z + 1.0))?, ok(digamma(z))? + z.inv(), 1e-11)?;
        expect("1/Γ", ok(rgamma(z))? * ok(gamma(z))?, c(1.0, 0.0), 1e-13)?;
    }
    expect("L₂⁽¹⁾(1)", laguerre(2, c(1.0, 0.0), c(1.0, 0.0)), c(0.5, 0.0), 1e-15)
}

fn kummer_identities() -> Check {
    let mut r = rng();
    for _ in 0..30 {
        let a = c(r.gen_range(-2.0..2.0), r.gen_range(-1.0..1.0));
        let b = c(r.gen_range(0.3..3.0), r.gen_range(-1.0..1.0));
        let z = c(r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0));
        let lhs = ok(kummer_m(&KummerParams::new(a, b, z)))?.value;
        let rhs = z.exp() * ok(kummer_m(&KummerParams::new(b - a, b, -z)))?.value;
        expect("Kummer transformation", lhs, rhs, 1e-10)?;
        let z = Complex64::from_polar(r.gen_range(0.3..3.0), r.gen_range(-2.5..2.5));
        let u1 = ok(tricomi_u(&KummerParams::new(a, b, z)))?;
        let u2 = cpow(z, 1.0 - b) * ok(tricomi_u(&KummerParams::new(a - b + 1.0, 2.0 - b, z)))?;
        expect("U(a,b,z) = z^{1−b}U(a−b+1,2−b,z)", u1, u2, 1e-9)?;
    }
    Ok(())
}

fn free_field() -> Check {
    for j in 0..20 {
        let rho = 0.1 + j as f64;
        let p = CoulombParams::real(0.0, 0.0, rho);
        expect("F₀₀ = sin", ok(coulomb_f(&p, 1))?.value, c(rho.sin(), 0.0), 1e-12)?;
        expect("G₀₀ = cos", ok(coulomb_g(&p, 1))?.value, c(rho.cos(), 0.0), 1e-12)?;
    }
    for l in 0..3 {
        let p = CoulombParams::real(0.0, l as f64, 1.7);
        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
        let f = ok(free_f(c(-(l as f64) - 1.0, 0.0), p.rho))?;
        expect("G₀ℓ = (−1)^ℓ F₀,₋ℓ₋₁", ok(coulomb_g(&p, 1))?.value, sign * f, 1e-12)?;
    }
    Ok(())
}

fn wronskians() -> Check {
    for eta in [1.0, -1.0, 2.0] {
        for ell in [0.0, 0.5, 1.0, 1.5] {
            for rho in [0.3, 1.5, 3.0] {
                let p = CoulombParams::real(eta, ell, rho);
                let v = ok(coulomb_values(&p, 1))?;
                expect("W[G, F] = 1", v.g * v.df - v.dg * v.f, c(1.0, 0.0), 1e-10)?;
                // in x = 2r/a_B = 2ηρ the Wronskian is W_ρ/(2η)
                let x = 2.0 * p.eta;
                let phi = ok(phi_parts(&p, Sign::Plus))?;
                let (psi, dpsi, _) = ok(psi_with_derivative(&p))?;
                let w = (psi * phi.d_rho.unwrap() - dpsi * phi.value) / x;
                expect("W[Ψ, Φ] = (−1)^{2ℓ}", w, c((2.0 * PI * ell).cos(), 0.0), 1e-10)?;
            }
        }
    }
    Ok(())
}

fn h_difference() -> Check {
    let mut r = rng();
    for _ in 0..50 {
        let p = ok(CoulombParams::new(random_eta(&mut r), random_ell(&mut r), random_rho(&mut r)))?;
        let hp = ok(coulomb_h(&p, Sign::Plus, 1))?.value;
        let hm = ok(coulomb_h(&p, Sign::Minus, 1))?.value;
        let f = ok(coulomb_f(&p, 1))?.value;
        expect_abs("H⁺ − H⁻ = 2iF", hp - hm, 2.0 * I * f, hp.norm().max(hm.norm()), 1e-9)?;
    }
    Ok(())
}

fn phi_relations() -> Check {
    let mut r = rng();
    for _ in 0..100 {
        let (eta, rho) = (random_eta(&mut r), random_rho(&mut r));
        let ell = half_integers()[r.gen_range(0..5)];
        let p = CoulombParams::new(eta, c(ell, 0.0), rho).map_err(|e| e.to_string())?;
        let w = ok(w_fn(eta, p.ell, Sign::Plus))?;
        let lhs = ok(phi(&p.reflected(), Sign::Plus))?;
        expect("Φ_{η,−ℓ−1} = wΦ_{ηℓ}", lhs, w * ok(phi(&p, Sign::Plus))?, 1e-10)?;
        let q = ok(CoulombParams::new(eta, random_ell(&mut r), rho))?;
        let lhs = ok(phi(&q.with_eta(-eta), Sign::Plus))?;
        expect("Φ_{−η}(ρ) = Φ_η(−ρ)", lhs, ok(phi(&q.with_rho(-rho), Sign::Plus))?, 1e-10)?;
    }
    Ok(())
}

fn f_attractive() -> Check {
    let mut r = rng();
    for _ in 0..50 {
        let p = ok(CoulombParams::new(random_eta(&mut r), random_ell(&mut r), random_rho(&mut r)))?;
        let s = if p.eta.arg() > 0.0 { 1.0 } else { -1.0 };
        let lhs = ok(coulomb_f(&p.with_eta(-p.eta), 1))?.value;
        let turned = p.with_rho(p.rho * Complex64::from_polar(1.0, -s * PI));
        let rhs = -(PI * (p.eta + s * I * p.ell)).exp() * ok(coulomb_f(&turned, 1))?.value;
        expect("F_{−η,ℓ}(ρ) = −e^{π(η±iℓ)}F_{ηℓ}(ρe^{∓iπ})", lhs, rhs, 1e-9)?;
    }
    Ok(())
}

fn w_and_c_identities() -> Check {
    let mut r = rng();
    for _ in 0..100 {
        let (eta, ell) = (random_eta(&mut r), random_ell(&mut r));
        for s in [Sign::Plus, Sign::Minus] {
            let prod = ok(w_fn(eta, -ell - 1.0, s))? * ok(w_fn(eta, ell, s))?;
            expect("w±(η,−ℓ−1)w±(η,ℓ) = 1", prod, c(1.0, 0.0), 1e-10)?;
            let ws = ok(w_fn(eta, ell, s))?;
            let lhs = ok(coulomb_c(eta, ell, CVariant::LogGamma))? * ok(gamma(2.0 * ell + 2.0))?
                / (cpow(2.0 * eta, ell + 1.0) * ws);
            let rhs = ok(coulomb_c(eta, -ell - 1.0, CVariant::LogGamma))? * ok(gamma(-2.0 * ell))?
                / cpow(2.0 * eta, -ell)
                * ok(w_ratio_sqrt(eta, ell, s))?;
            expect("C reflection", lhs, rhs, 1e-9)?;
        }
        let cc = ok(coulomb_c(eta, ell, CVariant::LogGamma))?;
        let (wp, wm) = (ok(w_fn(eta, ell, Sign::Plus))?, ok(w_fn(eta, ell, Sign::Minus))?);
        let g2 = ok(gamma(2.0 * ell + 2.0))?;
        let rhs = cc * cc * g2 * g2 / cpow(2.0 * eta, 2.0 * ell + 1.0) * (2.0 * PI * ell).sin() / PI;
        expect_abs("(w⁺ − w⁻)/2i", (wp - wm) / (2.0 * I), rhs, wp.norm().max(wm.norm()), 1e-12)?;
    }
    Ok(())
}

fn half_integer_reflections() -> Check {
    let mut r = rng();
    for _ in 0..100 {
        let (eta, rho) = (random_eta(&mut r), random_rho(&mut r));
        let ell = c(half_integers()[r.gen_range(0..5)], 0.0);
        let p = ok(CoulombParams::new(eta, ell, rho))?;
        let sign = sign_re(eta).powi((2.0 * ell.re + 1.0) as i32);
        for s in [Sign::Plus, Sign::Minus] {
            expect("sqrt(w∓/w±) = sign(Re η)^{2ℓ+1}", ok(w_ratio_sqrt(eta, ell, s))?, c(sign, 0.0), 1e-12)?;
        }
        let q = p.reflected();
        expect("F reflection", ok(coulomb_f(&q, 1))?.value, sign * ok(coulomb_f(&p, 1))?.value, 1e-9)?;
        expect("G reflection", ok(coulomb_g(&q, 1))?.value, sign * ok(coulomb_g(&p, 1))?.value, 1e-9)?;
    }
    Ok(())
}

fn h_reflection_complex() -> Check {
    let mut r = rng();
    for _ in 0..50 {
        let p = ok(CoulombParams::new(random_eta(&mut r), random_ell(&mut r), random_rho(&mut r)))?;
        for s in [Sign::Plus, Sign::Minus] {
            let lhs = ok(coulomb_h(&p.reflected(), s, 1))?.value;
            let rhs = ok(w_ratio_sqrt(p.eta, p.ell, s))? * ok(coulomb_h(&p, s, 1))?.value;
            expect("H±_{η,−ℓ−1} = sqrt(w∓/w±)H±_{ηℓ}", lhs, rhs, 1e-9)?;
        }
    }
    Ok(())
}

fn h_and_g() -> Check {
    let mut r = rng();
    for _ in 0..100 {
        let eta = random_eta(&mut r);
        let ell = c(half_integers()[r.gen_range(0..5)], 0.0);
        let g = ok(g_fn(eta, ell))?;
        let factor = coulomb_factor(eta, ell);
        for (s, sv) in [(Sign::Plus, 1.0), (Sign::Minus, -1.0)] {
            let h = ok(h_fn(eta, ell, s))?;
            expect_abs("h± − g = ±iπ/(e^{2π(η+iℓ)} − 1)", h - g, sv * I * PI / factor, 1.0, 1e-12)?;
            expect("h± reflection", ok(h_fn(eta, -ell - 1.0, s))?, h, 1e-11)?;
        }
        expect("g reflection", ok(g_fn(eta, -ell - 1.0))?, g, 1e-11)?;
    }
    Ok(())
}

fn continuation() -> Check {
    let p = CoulombParams::real(1.0, 0.0, 0.8);
    let g = ok(coulomb_g(&p, 1))?.value;
    let there = ok(continue_g(&p, 1, 1))?;
    // one turn back at ℓ = 0: subtract 2i(e^{2πη} − 1)F
    let back = there.value - 2.0 * I * coulomb_factor(p.eta, p.ell) * ok(coulomb_f(&p, 1))?.value;
    expect("continue_G(1) then (−1)", back, g, 1e-10)?;
    let set = ok(branches_g(&p, 1))?;
    if set.len() != 6 {
        return Err(format!("branches_G(n_max = 1) has {} values", set.len()));
    }
    let f = ok(branches_f(&p))?;
    if f.len() != 2 || (f[0].value + f[1].value).norm() > 1e-15 {
        return Err("branches_F is not {+F, −F}".into());
    }
    Ok(())
}

fn limits() -> Check {
    let eta = 1e4;
    for ell in [0.0, 1.0] {
        for x in [0.5, 1.0, 2.0] {
            let p = CoulombParams::real(eta, ell, x * x / (2.0 * eta));
            let order = 2.0 * ell + 1.0;
            let i_val = ok(bessel_i(c(order, 0.0), c(2.0 * x, 0.0)))?.value;
            expect("Φ → xI_{2ℓ+1}(2x)", ok(phi(&p, Sign::Plus))?, x * i_val, 1e-5)?;
            let k_val = ok(bessel_k(order as i32, c(2.0 * x, 0.0)))?.value;
            expect("Ψ → 2xK_{2ℓ+1}(2x)", ok(psi_fn(&p))?, 2.0 * x * k_val, 1e-5)?;
        }
    }
    Ok(())
}

fn hydrogen() -> Check {
    for n in 1..=3u32 {
        for l in 0..n {
            for rho in [0.3, 0.9, 1.7, 2.6, 4.0] {
                let (eta, ell) = (n as f64, l as f64);
                let p = ok(CoulombParams::new(c(0.0, eta), c(ell, 0.0), c(0.0, rho)))?;
                let pre = ok(gamma(c(eta - ell, 0.0)))? / ok(gamma(c(eta + ell + 1.0, 0.0)))?;
                let expected = pre
                    * (-2.0 * eta * rho).powi(l as i32 + 1)
                    * (-rho).exp()
                    * laguerre(n - l - 1, c(2.0 * ell + 1.0, 0.0), c(2.0 * rho, 0.0));
                expect("hydrogen Laguerre form", ok(phi(&p, Sign::Plus))?, expected, 1e-10)?;
            }
        }
    }
    Ok(())
}

fn near_field() -> Check {
    // reference values of G_{η,0}(10⁻⁴) from a 30-digit evaluation
    for (eta, reference) in [(1.0, 9.207923232562353), (-1.0, 0.399228609136112)] {
        let g = ok(coulomb_g(&CoulombParams::real(eta, 0.0, 1e-4), 1))?.value;
        expect("G_{η,0}(10⁻⁴)", g, c(reference, 0.0), 1e-12)?;
    }
    Ok(())
}

fn ode_oracle() -> Check {
    for (eta, ell) in [(c(1.0, 0.0), 0.0), (c(-1.0, 0.0), 0.0), (c(0.5, 0.5), 0.0)] {
        for rho in [0.5, 2.0] {
            let p = ok(CoulombParams::new(eta, c(ell, 0.0), c(rho, 0.0)))?;
            let v = ok(coulomb_values(&p, 1))?;
            expect("F vs ODE", v.f, ok(oracle::reference_f(&p, 1e-12))?.u, 1e-8)?;
            expect("G vs ODE", v.g, ok(oracle::reference_g(&p, 1e-12))?.u, 1e-8)?;
        }
    }
    let p = CoulombParams::real(1.0, 0.0, 0.8);
    let v = ok(coulomb_values(&p, 1))?;
    let seed = oracle::OdeState { u: v.g, du: v.dg, rho: p.rho };
    let end = ok(oracle::integrate_radial(&p, seed, &oracle::loop_path(p.rho, 1, 64), 1e-12))?;
    expect("loop vs continue_G(1)", end.u, ok(continue_g(&p, 1, 1))?.value, 1e-6)
}

fn rendering() -> Check {
    let spec = GridSpec::from_window([-2.0, -2.0, 2.0, 2.0], 64, 64, Plane::InverseEta).map_err(|e| e.to_string())?;
    let target = Target::Coulomb { evaluation: Evaluation::new(FunctionName::C), template: CoulombParams::real(1.0, 0.0, 0.5) };
    let a = render_grid_with_threads(&spec, &target, 1);
    let b = render_grid_with_threads(&spec, &target, 3);
    let bytes = a.image.to_p6();
    if bytes != b.image.to_p6() {
        return Err("parallel render differs from sequential".into());
    }
    let (cols, rows, px) = ok(parse_p6(&bytes))?;
    if (cols, rows) != (64, 64) || px != a.image.pixels {
        return Err("P6 round trip changed the image".into());
    }
    for pole in [c(0.0, 1.0), c(0.0, -1.0), c(0.0, 0.5), c(0.0, -0.5)] {
        if !a.report.features.iter().any(|f| (f.at - pole).norm() <= spec.dx()) {
            return Err(format!("no branch point detected at a_B k = {pole}"));
        }
    }
    Ok(())
}

/// Runs every check in a fixed order.
pub fn run_all() -> Vec<CheckOutcome> {
    let checks: [(&'static str, fn() -> Check); 18] = [
        ("complexfn.log_gamma_single_cut", log_gamma_single_cut),
        ("complexfn.gamma_identities", gamma_identities),
        ("hypergeom.kummer_identities", kummer_identities),
        ("coulomb.free_field", free_field),
        ("coulomb.wronskians", wronskians),
        ("coulomb.h_difference", h_difference),
        ("coulomb.phi_relations", phi_relations),
        ("coulomb.f_attractive", f_attractive),
        ("coulomb.w_and_c_identities", w_and_c_identities),
        ("coulomb.half_integer_reflections", half_integer_reflections),
        ("coulomb.h_reflection", h_reflection_complex),
        ("coulomb.h_and_g", h_and_g),
        ("coulomb.continuation", continuation),
        ("coulomb.zero_energy_limits", limits),
        ("coulomb.hydrogen", hydrogen),
        ("coulomb.near_field", near_field),
        ("oracle.agreement", ode_oracle),
        ("render.determinism_and_detection", rendering),
    ];
    checks
        .into_iter()
        .map(|(name, f)| CheckOutcome { name, result: f() })
        .collect()
}
