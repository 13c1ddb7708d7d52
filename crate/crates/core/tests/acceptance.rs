//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Two criteria (2 and 9) ask for bounds that the exact functions do not
//! satisfy. They are printed as FAIL together with the check that does hold.
//! The run exits non-zero if any other criterion fails or if a verified form
//! stops holding. Set `ACCEPTANCE_STRICT=1` to make every FAIL fatal.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use coulombx::complexfn::{bessel_i, bessel_k, gamma, laguerre};
use coulombx::coulomb::*;
use coulombx::oracle;
use coulombx::render::{render_grid, GridSpec, JumpEdge, Plane, Rendered, Target};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Criteria whose literal bound is unreachable.
const KNOWN_RED: [u32; 2] = [2, 9];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

struct Outcome {
    pass: bool,
    detail: String,
    /// For known-red criteria: whether the verified replacement holds, and
    /// what it says.
    verified: Option<(bool, String)>,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Outcome { pass, detail, verified: None }
    }
}

/// Largest error seen and where, for a family of checks.
#[derive(Default)]
struct Worst {
    err: f64,
    at: String,
    failures: usize,
    total: usize,
}

impl Worst {
    fn record(&mut self, err: f64, tol: f64, at: impl FnOnce() -> String) {
        self.total += 1;
        if !(err <= tol) {
            self.failures += 1;
        }
        if !(err <= self.err) {
            self.err = err;
            self.at = at();
        }
    }

    fn error(&mut self, at: String) {
        self.record(f64::INFINITY, 0.0, || at);
    }

    fn ok(&self) -> bool {
        self.failures == 0
    }

    fn summary(&self) -> String {
        format!("{}/{} ok, worst {:.1e} at {}", self.total - self.failures, self.total, self.err, self.at)
    }
}

fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(0xAC_CE97);
    r.set_stream(stream);
    r
}

/// |η| ∈ [0.3, 1.5] in both half-planes, at least 0.36 rad from the
/// imaginary axis.
fn random_eta(r: &mut ChaCha8Rng) -> Complex64 {
    let m = r.gen_range(0.3..1.5);
    let a = r.gen_range(-1.2..1.2) + if r.gen_bool(0.5) { 0.0 } else { PI };
    Complex64::from_polar(m, a)
}

fn random_rho(r: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(r.gen_range(0.2..3.0), r.gen_range(-1.0..1.0))
}

fn random_ell(r: &mut ChaCha8Rng) -> Complex64 {
    c(r.gen_range(-0.45..1.45), r.gen_range(-0.4..0.4))
}

fn random_half_integer(r: &mut ChaCha8Rng) -> Complex64 {
    c(r.gen_range(0..5) as f64 / 2.0, 0.0)
}

fn free_field() -> Outcome {
    let mut w = Worst::default();
    for j in 0..20 {
        let rho = 0.1 + j as f64;
        let p = CoulombParams::real(0.0, 0.0, rho);
        match (coulomb_f(&p, 1), coulomb_g(&p, 1)) {
            (Ok(f), Ok(g)) => {
                w.record((f.value - rho.sin()).norm(), 1e-12, || format!("F(ρ = {rho})"));
                w.record((g.value - rho.cos()).norm(), 1e-12, || format!("G(ρ = {rho})"));
            }
            _ => w.error(format!("ρ = {rho}")),
        }
    }
    for l in 0..3 {
        let rho = c(1.7, 0.0);
        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
        match (coulomb_g(&CoulombParams::new(c(0.0, 0.0), c(l as f64, 0.0), rho).unwrap(), 1), free_f(c(-(l as f64) - 1.0, 0.0), rho)) {
            (Ok(g), Ok(f)) => w.record(rel(g.value, sign * f), 1e-12, || format!("G₀,{l}")),
            _ => w.error(format!("ℓ = {l}")),
        }
    }
    Outcome::new(w.ok(), w.summary())
}

fn wronskian_psi_phi(p: &CoulombParams) -> coulombx::Result<Complex64> {
    let phi = phi_parts(p, Sign::Plus)?;
    let (psi, dpsi, _) = psi_with_derivative(p)?;
    let dphi = phi.d_rho.expect("Φ derivative");
    // d/dx = d/dρ / (2η) with x = 2ηρ = 2r/a_B
    Ok((psi * dphi - dpsi * phi.value) / (2.0 * p.eta))
}

fn wronskian() -> Outcome {
    let etas = [c(1.0, 0.0), c(-1.0, 0.0), c(2.0, 0.0), c(-2.0, 0.0), c(1.0, 1.0)];
    let mut literal = Worst::default();
    let mut verified = Worst::default();
    let mut red_orders = Vec::new();
    for eta in etas {
        for rho in [0.3, 0.7, 1.5, 3.0, 6.0] {
            for ell in [0.0, 0.5, 1.0, 1.5] {
                let p = CoulombParams::new(eta, c(ell, 0.0), c(rho, 0.0)).unwrap();
                let at = || format!("η = {eta}, ρ = {rho}, ℓ = {ell}");
                match wronskian_psi_phi(&p) {
                    Ok(wr) => {
                        let e = (wr - 1.0).norm();
                        literal.record(e, 1e-10, at);
                        if e > 1e-10 && !red_orders.contains(&ell) {
                            red_orders.push(ell);
                        }
                        let expected = (2.0 * PI * ell).cos();
                        verified.record((wr - expected).norm(), 1e-10, at);
                    }
                    Err(e) => {
                        literal.error(format!("{}: {e}", at()));
                        verified.error(at());
                    }
                }
            }
        }
    }
    let detail = format!("W[Ψ,Φ] = 1 at {}/{} points; fails for ℓ ∈ {red_orders:?}", literal.total - literal.failures, literal.total);
    Outcome {
        pass: literal.ok(),
        detail,
        verified: Some((verified.ok(), format!("W[Ψ,Φ] = (−1)^{{2ℓ}}: {}", verified.summary()))),
    }
}

fn reflections() -> Outcome {
    const N: usize = 1000;
    const TOL: f64 = 1e-10;
    let mut parts = Vec::new();
    let mut all_ok = true;
    let mut run = |name: &str, stream: u64, check: &dyn Fn(&mut ChaCha8Rng) -> coulombx::Result<(f64, String)>| {
        let mut r = rng(stream);
        let mut w = Worst::default();
        for _ in 0..N {
            match check(&mut r) {
                Ok((e, at)) => w.record(e, TOL, || at),
                Err(e) => w.error(format!("{}: {e}", e.kind())),
            }
        }
        all_ok &= w.ok();
        parts.push(format!("{name} {}/{N}", w.total - w.failures));
        if !w.ok() {
            parts.push(format!("({name} worst {:.1e} at {})", w.err, w.at));
        }
    };
    run("Φ", 1, &|r| {
        let p = CoulombParams::new(random_eta(r), random_half_integer(r), random_rho(r))?;
        let lhs = phi(&p.reflected(), Sign::Plus)?;
        let rhs = w_fn(p.eta, p.ell, Sign::Plus)? * phi(&p, Sign::Plus)?;
        Ok((rel(lhs, rhs), format!("{p:?}")))
    });
    run("F", 2, &|r| {
        let p = CoulombParams::new(random_eta(r), random_half_integer(r), random_rho(r))?;
        let s = sign_re(p.eta).powi((2.0 * p.ell.re) as i32 + 1);
        let lhs = coulomb_f(&p.reflected(), 1)?.value;
        Ok((rel(lhs, s * coulomb_f(&p, 1)?.value), format!("{p:?}")))
    });
    run("G", 3, &|r| {
        let p = CoulombParams::new(random_eta(r), random_half_integer(r), random_rho(r))?;
        let s = sign_re(p.eta).powi((2.0 * p.ell.re) as i32 + 1);
        let lhs = coulomb_g(&p.reflected(), 1)?.value;
        Ok((rel(lhs, s * coulomb_g(&p, 1)?.value), format!("{p:?}")))
    });
    run("H±", 4, &|r| {
        let p = CoulombParams::new(random_eta(r), random_ell(r), random_rho(r))?;
        let mut e: f64 = 0.0;
        for s in [Sign::Plus, Sign::Minus] {
            let lhs = coulomb_h(&p.reflected(), s, 1)?.value;
            let rhs = w_ratio_sqrt(p.eta, p.ell, s)? * coulomb_h(&p, s, 1)?.value;
            e = e.max(rel(lhs, rhs));
        }
        Ok((e, format!("{p:?}")))
    });
    run("w±", 5, &|r| {
        let (eta, ell) = (random_eta(r), random_ell(r));
        let mut e: f64 = 0.0;
        for s in [Sign::Plus, Sign::Minus] {
            e = e.max(rel(w_fn(eta, -ell - 1.0, s)? * w_fn(eta, ell, s)?, c(1.0, 0.0)));
        }
        Ok((e, format!("η = {eta}, ℓ = {ell}")))
    });
    run("h±", 6, &|r| {
        let (eta, ell) = (random_eta(r), random_half_integer(r));
        let mut e: f64 = 0.0;
        for s in [Sign::Plus, Sign::Minus] {
            e = e.max(rel(h_fn(eta, -ell - 1.0, s)?, h_fn(eta, ell, s)?));
        }
        Ok((e, format!("η = {eta}, ℓ = {ell}")))
    });
    run("g", 7, &|r| {
        let (eta, ell) = (random_eta(r), random_half_integer(r));
        Ok((rel(g_fn(eta, -ell - 1.0)?, g_fn(eta, ell)?), format!("η = {eta}, ℓ = {ell}")))
    });
    Outcome::new(all_ok, parts.join(", "))
}

fn limits() -> Outcome {
    let mut w = Worst::default();
    let eta = 1e4;
    for ell in [0.0, 1.0] {
        for x in [0.5, 1.0, 2.0] {
            let p = CoulombParams::real(eta, ell, x * x / (2.0 * eta));
            let order = 2.0 * ell + 1.0;
            let at = || format!("x = {x}, ℓ = {ell}");
            match (phi(&p, Sign::Plus), bessel_i(c(order, 0.0), c(2.0 * x, 0.0))) {
                (Ok(v), Ok(i)) => w.record(rel(x * i.value, v), 1e-5, || format!("Φ, {}", at())),
                _ => w.error(format!("Φ, {}", at())),
            }
            match (psi_fn(&p), bessel_k(order as i32, c(2.0 * x, 0.0))) {
                (Ok(v), Ok(k)) => w.record(rel(2.0 * x * k.value, v), 1e-5, || format!("Ψ, {}", at())),
                _ => w.error(format!("Ψ, {}", at())),
            }
        }
    }
    Outcome::new(w.ok(), w.summary())
}

fn oracle_equivalence() -> Outcome {
    let mut w = Worst::default();
    for (eta, ell) in [(c(1.0, 0.0), 0.0), (c(-1.0, 0.0), 0.0), (c(1.0, 0.0), 1.0), (c(0.5, 0.5), 0.0)] {
        for rho in [0.5, 1.0, 2.0, 5.0] {
            let p = CoulombParams::new(eta, c(ell, 0.0), c(rho, 0.0)).unwrap();
            let at = || format!("η = {eta}, ℓ = {ell}, ρ = {rho}");
            match (coulomb_values(&p, 1), oracle::reference_f(&p, 1e-12), oracle::reference_g(&p, 1e-12)) {
                (Ok(v), Ok(f), Ok(g)) => {
                    w.record(rel(v.f, f.u), 1e-8, || format!("F, {}", at()));
                    w.record(rel(v.g, g.u), 1e-8, || format!("G, {}", at()));
                }
                _ => w.error(at()),
            }
        }
    }
    Outcome::new(w.ok(), w.summary())
}

fn continuation_loop() -> Outcome {
    let p = CoulombParams::real(1.0, 0.0, 0.8);
    let result = (|| {
        let v = coulomb_values(&p, 1)?;
        let seed = oracle::OdeState { u: v.g, du: v.dg, rho: p.rho };
        let end = oracle::integrate_radial(&p, seed, &oracle::loop_path(p.rho, 1, 64), 1e-12)?;
        Ok::<_, coulombx::CoulombError>((end.u, continue_g(&p, 1, 1)?.value))
    })();
    match result {
        Ok((ode, formula)) => {
            let e = rel(ode, formula);
            Outcome::new(e <= 1e-6, format!("ODE {ode:.10} vs continue_G(1) {formula:.10}, relative {e:.1e}"))
        }
        Err(e) => Outcome::new(false, format!("{}: {e}", e.kind())),
    }
}

fn hydrogen() -> Outcome {
    let mut w = Worst::default();
    for n in 1..=3u32 {
        for l in 0..n {
            for rho in [0.3, 0.9, 1.7, 2.6, 4.0] {
                let (eta, ell) = (n as f64, l as f64);
                let p = CoulombParams::new(c(0.0, eta), c(ell, 0.0), c(0.0, rho)).unwrap();
                let pre = gamma(c(eta - ell, 0.0)).unwrap() / gamma(c(eta + ell + 1.0, 0.0)).unwrap();
                let expected = pre
                    * (-2.0 * eta * rho).powi(l as i32 + 1)
                    * (-rho).exp()
                    * laguerre(n - l - 1, c(2.0 * ell + 1.0, 0.0), c(2.0 * rho, 0.0));
                match phi(&p, Sign::Plus) {
                    Ok(v) => w.record(rel(v, expected), 1e-10, || format!("n = {n}, ℓ = {l}, ρ = {rho}")),
                    Err(e) => w.error(format!("n = {n}, ℓ = {l}, ρ = {rho}: {e}")),
                }
            }
        }
    }
    Outcome::new(w.ok(), w.summary())
}

fn edge_near(line: &[JumpEdge], z: Complex64, radius: f64) -> bool {
    line.iter().any(|e| (e.midpoint - z).norm() <= radius)
}

fn figure() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    let mut check = |ok: bool, what: String| {
        pass &= ok;
        if !ok {
            notes.push(what);
        }
    };
    let render = |variant| -> Rendered {
        let spec = GridSpec::from_window([-2.0, -2.0, 2.0, 2.0], 256, 256, Plane::InverseEta).unwrap();
        let mut evaluation = Evaluation::new(FunctionName::C);
        evaluation.variant = variant;
        render_grid(&spec, &Target::Coulomb { evaluation, template: CoulombParams::real(1.0, 0.0, 0.5) })
    };
    let poles: Vec<Complex64> = [1.0, 0.5, 1.0 / 3.0].iter().flat_map(|&y| [c(0.0, y), c(0.0, -y)]).collect();
    let mut renders = Vec::new();
    for variant in [CVariant::SqrtGamma, CVariant::EulerReflection, CVariant::LogGamma] {
        let r = render(variant);
        let dx = r.samples.spec.dx();
        for &pole in &poles {
            let hit = r.report.features.iter().any(|f| (f.at - pole).norm() <= dx);
            check(hit, format!("{variant:?}: no detection within one pixel of {pole}"));
        }
        renders.push((variant, r));
    }
    let dx = renders[0].1.samples.spec.dx();
    let reach = 1.5 * dx;

    // Euler-reflection cuts: from each pole into the right half-plane and
    // down to the accumulation point at the origin.
    let lines = renders[1].1.samples.jump_lines();
    for &pole in &poles {
        let line = lines.iter().find(|l| edge_near(l, pole, reach));
        let ok = line.is_some_and(|l| {
            let right = l.iter().all(|e| e.midpoint.re >= -dx);
            let near_origin = l.iter().map(|e| e.midpoint.norm()).fold(f64::INFINITY, f64::min) < 0.25;
            right && near_origin
        });
        check(ok, format!("EulerReflection: no right half-plane cut from {pole} to the origin"));
    }

    // Log-gamma cuts: on the imaginary axis, joining i/(2k+1) to i/(2k+2)
    // and leaving the gap between i/(2k+2) and i/(2k+3) free.
    let r = &renders[2].1;
    let lines = r.samples.jump_lines();
    for s in [1.0, -1.0] {
        let at = |y: f64| c(0.0, s * y);
        let joins = |a: f64, b: f64| lines.iter().any(|l| edge_near(l, at(a), reach) && edge_near(l, at(b), reach));
        check(joins(1.0, 0.5), format!("LogGamma: no cut joining {} and {}", at(1.0), at(0.5)));
        check(joins(1.0 / 3.0, 0.25), format!("LogGamma: no cut joining {} and {}", at(1.0 / 3.0), at(0.25)));
        let gap = r.samples.jump_edges().iter().any(|e| {
            let y = s * e.midpoint.im;
            y > 1.0 / 3.0 + reach && y < 0.5 - reach
        });
        check(!gap, format!("LogGamma: jump between {} and {}", at(0.5), at(1.0 / 3.0)));
    }
    let off_axis = lines.iter().flatten().filter(|e| e.midpoint.re.abs() > reach && e.midpoint.norm() > 0.25).count();
    check(off_axis == 0, format!("LogGamma: {off_axis} jump edges off the imaginary axis"));

    let counts: Vec<String> = renders.iter().map(|(v, r)| format!("{v:?} {} features", r.report.features.len())).collect();
    let detail = if pass { format!("±i, ±i/2, ±i/3 found in all variants; {}", counts.join(", ")) } else { notes.join("; ") };
    Outcome::new(pass, detail)
}

/// 30-digit values of G_{η,0}(10⁻⁴).
const NEAR_FIELD_REFERENCE: [(f64, f64); 2] = [(1.0, 9.207923232562353), (-1.0, 0.399228609136112)];

fn near_field() -> Outcome {
    let mut gaps = Vec::new();
    let mut literal = true;
    let mut verified = true;
    let mut notes = Vec::new();
    for (eta, reference) in NEAR_FIELD_REFERENCE {
        let inv_c = match coulomb_c(c(eta, 0.0), c(0.0, 0.0), CVariant::LogGamma) {
            Ok(v) => v.inv(),
            Err(e) => return Outcome::new(false, e.to_string()),
        };
        let g_at = |rho: f64| coulomb_g(&CoulombParams::real(eta, 0.0, rho), 1).map(|v| v.value);
        let Ok(g) = g_at(1e-4) else {
            return Outcome::new(false, format!("G failed at η = {eta}"));
        };
        let gap = rel(g, inv_c);
        literal &= gap < 1e-3;
        gaps.push(format!("η = {eta}: {gap:.4e}"));
        let ref_err = rel(g, c(reference, 0.0));
        verified &= ref_err < 1e-12;
        // the gap shrinks like ρ|ln ρ|
        let smaller = g_at(1e-6).map(|v| rel(v, inv_c)).unwrap_or(f64::INFINITY);
        verified &= smaller < 1e-3 && smaller < gap / 50.0;
        notes.push(format!("η = {eta}: G(10⁻⁴) vs reference {ref_err:.0e}, gap at 10⁻⁶ {smaller:.2e}"));
    }
    Outcome {
        pass: literal,
        detail: format!("|G(10⁻⁴) − 1/C|/|1/C|: {}", gaps.join(", ")),
        verified: Some((verified, notes.join("; "))),
    }
}

fn h_minus_g() -> Outcome {
    let mut r = rng(10);
    let mut w = Worst::default();
    for _ in 0..100 {
        let eta = Complex64::from_polar(r.gen_range(0.3..3.0), r.gen_range(-1.2..1.2) + if r.gen_bool(0.5) { 0.0 } else { PI });
        let ell = c(r.gen_range(-4..5) as f64 / 2.0, 0.0);
        let rhs = I * PI / coulomb_factor(eta, ell);
        match (h_fn(eta, ell, Sign::Plus), h_fn(eta, ell, Sign::Minus), g_fn(eta, ell)) {
            (Ok(hp), Ok(hm), Ok(g)) => {
                w.record((hp - g - rhs).norm(), 1e-12, || format!("h⁺, η = {eta}, ℓ = {ell}"));
                w.record((hm - g + rhs).norm(), 1e-12, || format!("h⁻, η = {eta}, ℓ = {ell}"));
            }
            _ => w.error(format!("η = {eta}, ℓ = {ell}")),
        }
    }
    Outcome::new(w.ok(), format!("absolute error {}", w.summary()))
}

fn main() {
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v != "0" && !v.is_empty());
    let criteria: [(u32, &str, Duration, fn() -> Outcome); 10] = [
        (1, "free-field reduction", Duration::from_secs(1), free_field),
        (2, "Wronskian W[Ψ,Φ] = 1", Duration::from_secs(5), wronskian),
        (3, "reflection suite", Duration::from_secs(10), reflections),
        (4, "zero-energy limits", Duration::from_secs(1), limits),
        (5, "ODE oracle equivalence", Duration::from_secs(10), oracle_equivalence),
        (6, "continuation loop", Duration::from_secs(5), continuation_loop),
        (7, "hydrogen-like reduction", Duration::from_secs(1), hydrogen),
        (8, "figure reproduction", Duration::from_secs(30), figure),
        (9, "near-field constant", Duration::from_secs(1), near_field),
        (10, "h± − g structure", Duration::from_secs(1), h_minus_g),
    ];
    let mut fatal = Vec::new();
    let mut passed = 0;
    for (n, title, budget, run) in criteria {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= budget;
        let pass = out.pass && in_time;
        let timing = if in_time { String::new() } else { format!(" [over the {budget:?} budget]") };
        println!(
            "criterion {n:>2} {} {title} ({:.2} s){timing}: {}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            out.detail
        );
        if let Some((ok, text)) = &out.verified {
            println!("             {} verified form: {text}", if *ok { "holds" } else { "BROKEN" });
            if !ok {
                fatal.push(n);
            }
        }
        if pass {
            passed += 1;
        } else if strict || !KNOWN_RED.contains(&n) || out.verified.is_none() {
            fatal.push(n);
        }
    }
    println!("{passed}/10 criteria pass; known red: {KNOWN_RED:?}");
    if !fatal.is_empty() {
        fatal.dedup();
        println!("unexpected failures: {fatal:?}");
        std::process::exit(1);
    }
}
