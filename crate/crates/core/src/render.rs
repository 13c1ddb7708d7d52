//! Domain coloring of complex functions over a rectangular grid, with a
//! phase-discontinuity analysis that locates zeros, poles and branch points.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::coulomb::{coulomb_values, CoulombParams, Evaluation};
use crate::error::{CoulombError, Result};

pub type Rgb = [u8; 3];

/// Color of samples where evaluation failed.
pub const NAN_COLOR: Rgb = [128, 128, 128];

/// Edges whose wrapped phase change exceeds this are treated as jumps.
pub const JUMP_THRESHOLD: f64 = 2.0 * std::f64::consts::FRAC_PI_3;

/// Environment variable capping the number of render threads.
pub const THREADS_ENV: &str = "COULOMBX_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Plane {
    /// Grid points are a_B k = 1/η; the template's η is replaced.
    InverseEta,
    /// Grid points are ρ.
    Rho,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub center: Complex64,
    pub half_width: f64,
    pub half_height: f64,
    pub cols: usize,
    pub rows: usize,
    pub plane: Plane,
}

impl GridSpec {
    pub fn new(center: Complex64, half_width: f64, half_height: f64, cols: usize, rows: usize, plane: Plane) -> Result<Self> {
        if cols < 2 || rows < 2 {
            return Err(CoulombError::Domain(format!("grid must be at least 2x2, got {cols}x{rows}")));
        }
        if !(half_width > 0.0 && half_height > 0.0) || !half_width.is_finite() || !half_height.is_finite() {
            return Err(CoulombError::Domain("grid half-width and half-height must be positive".into()));
        }
        if !center.re.is_finite() || !center.im.is_finite() {
            return Err(CoulombError::NonFiniteInput("GridSpec"));
        }
        Ok(GridSpec { center, half_width, half_height, cols, rows, plane })
    }

    /// Grid covering [x0, x1] × [y0, y1].
    pub fn from_window(window: [f64; 4], cols: usize, rows: usize, plane: Plane) -> Result<Self> {
        let [x0, y0, x1, y1] = window;
        let center = Complex64::new(0.5 * (x0 + x1), 0.5 * (y0 + y1));
        GridSpec::new(center, 0.5 * (x1 - x0), 0.5 * (y1 - y0), cols, rows, plane)
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.cols as f64
    }

    pub fn dy(&self) -> f64 {
        2.0 * self.half_height / self.rows as f64
    }

    /// Center of pixel (col, row); row 0 is the top (largest imaginary part).
    pub fn point(&self, col: usize, row: usize) -> Complex64 {
        Complex64::new(
            self.center.re - self.half_width + (col as f64 + 0.5) * self.dx(),
            self.center.im + self.half_height - (row as f64 + 0.5) * self.dy(),
        )
    }
}

/// What to evaluate at each grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target {
    /// A named Coulomb function; the grid coordinate replaces η (as 1/η) or ρ
    /// of the template.
    Coulomb { evaluation: Evaluation, template: CoulombParams },
    Identity,
    Constant(Complex64),
}

impl Target {
    pub fn sample(&self, plane: Plane, z: Complex64) -> Result<Complex64> {
        match self {
            Target::Identity => Ok(z),
            Target::Constant(c) => Ok(*c),
            Target::Coulomb { evaluation, template } => {
                let p = match plane {
                    Plane::Rho => template.with_rho(z),
                    Plane::InverseEta => {
                        if z == Complex64::new(0.0, 0.0) {
                            return Err(CoulombError::EssentialSingularity("grid point a_B k = 0"));
                        }
                        template.with_eta(z.inv())
                    }
                };
                evaluation.evaluate(&p)
            }
        }
    }
}

/// Raw function values on a grid, NaN where evaluation failed.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    pub spec: GridSpec,
    pub values: Vec<Complex64>,
}

/// Number of render threads: `COULOMBX_THREADS` if set to a positive
/// integer, capped by the available parallelism.
pub fn thread_count() -> usize {
    let available = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    match std::env::var(THREADS_ENV).ok().and_then(|s| s.trim().parse::<usize>().ok()) {
        Some(n) if n > 0 => n.min(available),
        _ => available,
    }
}

pub fn sample_grid(spec: &GridSpec, target: &Target, threads: usize) -> Samples {
    let mut values = vec![Complex64::new(0.0, 0.0); spec.cols * spec.rows];
    let fill_row = |(row, chunk): (usize, &mut [Complex64])| {
        for (col, v) in chunk.iter_mut().enumerate() {
            let z = spec.point(col, row);
            *v = match target.sample(spec.plane, z) {
                Ok(w) if w.re.is_finite() && w.im.is_finite() => w,
                _ => Complex64::new(f64::NAN, f64::NAN),
            };
        }
    };
    if threads <= 1 {
        values.chunks_mut(spec.cols).enumerate().for_each(fill_row);
    } else {
        match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => pool.install(|| values.par_chunks_mut(spec.cols).enumerate().for_each(fill_row)),
            Err(_) => values.chunks_mut(spec.cols).enumerate().for_each(fill_row),
        }
    }
    Samples { spec: *spec, values }
}

fn hsl_to_rgb(hue_deg: f64, s: f64, l: f64) -> Rgb {
    let c = (1.0 - (2.0 * l - 1.0).abs()) * s;
    let h = hue_deg.rem_euclid(360.0) / 60.0;
    let x = c * (1.0 - (h % 2.0 - 1.0).abs());
    let (r, g, b) = match h as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = l - c / 2.0;
    let q = |v: f64| ((v + m) * 255.0).round().clamp(0.0, 255.0) as u8;
    [q(r), q(g), q(b)]
}

/// Lightness in [0.35, 0.65): a sawtooth in log₂|z| with one period per
/// doubling, mid value at |z| = 2^n.
pub fn lightness(z: Complex64) -> f64 {
    let t = (z.norm().log2() + 0.5).rem_euclid(1.0);
    0.5 + 0.3 * (t - 0.5)
}

/// Hue = arg z (0 = red, counterclockwise), lightness from [`lightness`].
pub fn phase_color(z: Complex64) -> Rgb {
    if !z.re.is_finite() || !z.im.is_finite() || z.norm() == 0.0 || !z.norm().is_finite() {
        return NAN_COLOR;
    }
    hsl_to_rgb(z.arg().to_degrees(), 1.0, lightness(z))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseImage {
    pub pixels: Vec<Rgb>,
    pub spec: GridSpec,
}

impl PhaseImage {
    pub fn from_samples(samples: &Samples) -> Self {
        PhaseImage { pixels: samples.values.iter().map(|&z| phase_color(z)).collect(), spec: samples.spec }
    }

    pub fn pixel(&self, col: usize, row: usize) -> Rgb {
        self.pixels[row * self.spec.cols + col]
    }

    pub fn to_p6(&self) -> Vec<u8> {
        encode_p6(self.spec.cols, self.spec.rows, &self.pixels)
    }
}

pub fn encode_p6(cols: usize, rows: usize, pixels: &[Rgb]) -> Vec<u8> {
    let mut out = format!("P6\n{cols} {rows}\n255\n").into_bytes();
    out.reserve(pixels.len() * 3);
    for p in pixels {
        out.extend_from_slice(p);
    }
    out
}

/// Parses a binary pixmap with maxval 255 into (cols, rows, pixels).
pub fn parse_p6(bytes: &[u8]) -> Result<(usize, usize, Vec<Rgb>)> {
    let bad = |m: &str| CoulombError::Io(std::io::Error::new(std::io::ErrorKind::InvalidData, m.to_string()));
    let mut pos = 0;
    let mut fields = Vec::new();
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| bad("header is not ASCII"))?);
    }
    if fields[0] != "P6" {
        return Err(bad("missing P6 magic"));
    }
    let num = |s: &str| s.parse::<usize>().map_err(|_| bad("bad header number"));
    let (cols, rows, maxval) = (num(fields[1])?, num(fields[2])?, num(fields[3])?);
    if maxval != 255 {
        return Err(bad("only maxval 255 is supported"));
    }
    pos += 1;
    let data = &bytes[pos.min(bytes.len())..];
    if data.len() != cols * rows * 3 {
        return Err(bad("pixel data length does not match header"));
    }
    Ok((cols, rows, data.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect()))
}

pub fn write_image(img: &PhaseImage, path: &Path) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(&img.to_p6())?;
    Ok(())
}

fn wrapped(a: Complex64, b: Complex64) -> f64 {
    (b / a).arg()
}

fn is_jump(a: Complex64, b: Complex64) -> bool {
    a.is_finite() && b.is_finite() && wrapped(a, b).abs() > JUMP_THRESHOLD
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeatureKind {
    Zero,
    Pole,
    /// An endpoint of a phase jump line.
    BranchPoint,
}

impl FeatureKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FeatureKind::Zero => "zero",
            FeatureKind::Pole => "pole",
            FeatureKind::BranchPoint => "branch",
        }
    }
}

/// A cluster of adjacent plaquettes with nonzero phase winding or an odd
/// number of jump edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Feature {
    pub at: Complex64,
    pub kind: FeatureKind,
    pub plaquettes: usize,
}

/// A phase jump between two horizontally or vertically adjacent samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpEdge {
    pub midpoint: Complex64,
    pub col: usize,
    pub row: usize,
    pub horizontal: bool,
}

impl Samples {
    fn at(&self, col: usize, row: usize) -> Complex64 {
        self.values[row * self.spec.cols + col]
    }

    pub fn failures(&self) -> usize {
        self.values.iter().filter(|z| !z.is_finite()).count()
    }

    /// Center of the plaquette whose top-left sample is (col, row).
    pub fn plaquette_center(&self, col: usize, row: usize) -> Complex64 {
        self.spec.point(col, row) + Complex64::new(0.5 * self.spec.dx(), -0.5 * self.spec.dy())
    }

    /// All edges across which the phase jumps by more than
    /// [`JUMP_THRESHOLD`]. Horizontal edges join (col, row)–(col+1, row),
    /// vertical ones (col, row)–(col, row+1).
    pub fn jump_edges(&self) -> Vec<JumpEdge> {
        let (cols, rows) = (self.spec.cols, self.spec.rows);
        let mut out = Vec::new();
        for row in 0..rows {
            for col in 0..cols {
                let a = self.at(col, row);
                if col + 1 < cols && is_jump(a, self.at(col + 1, row)) {
                    let midpoint = self.spec.point(col, row) + 0.5 * self.spec.dx();
                    out.push(JumpEdge { midpoint, col, row, horizontal: true });
                }
                if row + 1 < rows && is_jump(a, self.at(col, row + 1)) {
                    let midpoint = self.spec.point(col, row) - Complex64::new(0.0, 0.5 * self.spec.dy());
                    out.push(JumpEdge { midpoint, col, row, horizontal: false });
                }
            }
        }
        out
    }

    /// Jump edges grouped into connected lines; two edges are connected if
    /// they border a common plaquette.
    pub fn jump_lines(&self) -> Vec<Vec<JumpEdge>> {
        let edges = self.jump_edges();
        let pc = self.spec.cols - 1;
        let mut parent: Vec<usize> = (0..edges.len()).collect();
        fn root(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        let mut owner: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
        for (i, e) in edges.iter().enumerate() {
            let (c, r) = (e.col, e.row);
            let plaquettes = if e.horizontal {
                [r.checked_sub(1).map(|r0| (c, r0)), (r + 1 < self.spec.rows).then_some((c, r))]
            } else {
                [c.checked_sub(1).map(|c0| (c0, r)), (c + 1 < self.spec.cols).then_some((c, r))]
            };
            for (pcol, prow) in plaquettes.into_iter().flatten() {
                let key = prow * pc + pcol;
                match owner.get(&key) {
                    Some(&j) => {
                        let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                        parent[a] = b;
                    }
                    None => {
                        owner.insert(key, i);
                    }
                }
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<JumpEdge>> = std::collections::BTreeMap::new();
        for (i, e) in edges.iter().enumerate() {
            groups.entry(root(&mut parent, i)).or_default().push(*e);
        }
        groups.into_values().collect()
    }

    /// Turns of z² around the plaquette with top-left (col, row) and the
    /// number of jump edges, or `None` if a corner failed. Without jumps
    /// this is twice the winding of z. With jumps z² is used directly: sign
    /// flips leave it continuous, and an odd count marks a square-root
    /// branch point.
    fn plaquette(&self, col: usize, row: usize) -> Option<(i64, usize)> {
        // counterclockwise in the complex plane: bottom-left, bottom-right,
        // top-right, top-left
        let corners = [
            self.at(col, row + 1),
            self.at(col + 1, row + 1),
            self.at(col + 1, row),
            self.at(col, row),
        ];
        if corners.iter().any(|z| !z.is_finite() || z.norm() == 0.0) {
            return None;
        }
        let (mut turns, mut turns_sq, mut jumps) = (0.0, 0.0, 0);
        for j in 0..4 {
            let (a, b) = (corners[j], corners[(j + 1) % 4]);
            turns += wrapped(a, b);
            turns_sq += wrapped(a * a, b * b);
            jumps += is_jump(a, b) as usize;
        }
        let tau = std::f64::consts::TAU;
        let w2 = if jumps == 0 { 2 * (turns / tau).round() as i64 } else { (turns_sq / tau).round() as i64 };
        Some((w2, jumps))
    }

    /// Zeros, poles and branch points, clustered over 8-connected
    /// plaquettes. Plaquettes with a failed corner are skipped.
    pub fn features(&self) -> Vec<Feature> {
        let (pc, pr) = (self.spec.cols - 1, self.spec.rows - 1);
        let mut flag: Vec<Option<(i64, bool)>> = vec![None; pc * pr];
        for row in 0..pr {
            for col in 0..pc {
                if let Some((w2, jumps)) = self.plaquette(col, row) {
                    let branch = w2 % 2 != 0 || jumps % 2 == 1;
                    if w2 != 0 || branch {
                        flag[row * pc + col] = Some((w2, branch));
                    }
                }
            }
        }
        let mut seen = vec![false; pc * pr];
        let mut out = Vec::new();
        for start in 0..pc * pr {
            if flag[start].is_none() || seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let (mut sum, mut count, mut winding, mut odd) = (Complex64::new(0.0, 0.0), 0usize, 0i64, false);
            while let Some(i) = stack.pop() {
                let (col, row) = (i % pc, i / pc);
                let (w, o) = flag[i].unwrap();
                sum += self.plaquette_center(col, row);
                count += 1;
                winding += w;
                odd |= o;
                for dr in -1i64..=1 {
                    for dc in -1i64..=1 {
                        let (c2, r2) = (col as i64 + dc, row as i64 + dr);
                        if c2 < 0 || r2 < 0 || c2 >= pc as i64 || r2 >= pr as i64 {
                            continue;
                        }
                        let j = r2 as usize * pc + c2 as usize;
                        if flag[j].is_some() && !seen[j] {
                            seen[j] = true;
                            stack.push(j);
                        }
                    }
                }
            }
            // winding counts turns of z², i.e. twice the turns of z
            let kind = if odd {
                FeatureKind::BranchPoint
            } else if winding > 0 {
                FeatureKind::Zero
            } else if winding < 0 {
                FeatureKind::Pole
            } else {
                FeatureKind::BranchPoint
            };
            out.push(Feature { at: sum / count as f64, kind, plaquettes: count });
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderReport {
    /// Pixels whose evaluation failed (drawn in [`NAN_COLOR`]).
    pub failures: usize,
    pub features: Vec<Feature>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub samples: Samples,
    pub image: PhaseImage,
    pub report: RenderReport,
}

pub fn render_grid_with_threads(spec: &GridSpec, target: &Target, threads: usize) -> Rendered {
    let samples = sample_grid(spec, target, threads);
    let image = PhaseImage::from_samples(&samples);
    let report = RenderReport { failures: samples.failures(), features: samples.features() };
    Rendered { samples, image, report }
}

/// Renders with [`thread_count`] threads.
pub fn render_grid(spec: &GridSpec, target: &Target) -> Rendered {
    render_grid_with_threads(spec, target, thread_count())
}

/// Text listing of detected features, one per line: re, im, kind, size.
pub fn sidecar_text(report: &RenderReport) -> String {
    let mut s = String::from("# re im kind plaquettes\n");
    let _ = writeln!(s, "# failed pixels: {}", report.failures);
    for f in &report.features {
        let _ = writeln!(s, "{:.16e} {:.16e} {} {}", f.at.re, f.at.im, f.kind.as_str(), f.plaquettes);
    }
    s
}

/// Sidecar path next to an image: `<image>.points.txt`.
pub fn sidecar_path(image: &Path) -> std::path::PathBuf {
    let mut s = image.as_os_str().to_owned();
    s.push(".points.txt");
    s.into()
}

/// CSV of F and G for real η and ℓ along real ρ: header `rho,F,G`.
pub fn curve_csv(eta: f64, ell: f64, rhos: &[f64]) -> Result<String> {
    let mut s = String::from("rho,F,G\n");
    for &rho in rhos {
        let v = coulomb_values(&CoulombParams::real(eta, ell, rho), 1)?;
        let _ = writeln!(s, "{rho:.16e},{:.16e},{:.16e}", v.f.re, v.g.re);
    }
    Ok(s)
}
