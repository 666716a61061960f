//! Generator curves with exact derivatives up to fourth order.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::path::Path;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::taylor::Taylor;

pub type Vec3 = Vector3<f64>;

/// Endpoint mismatch allowed for curves declared closed.
pub const CLOSED_TOL: f64 = 1e-9;

/// Speed below which a parametrization is treated as degenerate.
pub const MIN_SPEED: f64 = 1e-12;

const SALKOWSKI_LIMIT: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    Helix,
    Cubic,
    TorusLoop,
    Salkowski,
    SphericalLoop,
    Polynomial,
}

impl CurveKind {
    pub fn name(self) -> &'static str {
        match self {
            CurveKind::Helix => "helix",
            CurveKind::Cubic => "cubic",
            CurveKind::TorusLoop => "torus_loop",
            CurveKind::Salkowski => "salkowski",
            CurveKind::SphericalLoop => "spherical_loop",
            CurveKind::Polynomial => "polynomial",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "helix" => CurveKind::Helix,
            "cubic" => CurveKind::Cubic,
            "torus_loop" => CurveKind::TorusLoop,
            "salkowski" => CurveKind::Salkowski,
            "spherical_loop" => CurveKind::SphericalLoop,
            "polynomial" => CurveKind::Polynomial,
            _ => return None,
        })
    }
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Shape parameters of a generator.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// `(a cos(t/c), a sin(t/c), b t/c)` with `c = sqrt(a^2 + b^2)`, so `t`
    /// is arc length. `pitch = 0` gives a planar circle.
    Helix { radius: f64, pitch: f64 },
    /// `(t, t^2/2, t^3/3)`.
    Cubic,
    /// `(cos t (4 + cos 2t), sin t (4 + cos 2t), sin 2t)`.
    TorusLoop,
    /// Constant-curvature curve with torsion of magnitude `|t|/sqrt(25 - t^2)`,
    /// arc-length parametrized on `|t| < 5`.
    Salkowski,
    /// `(sin t cos 2t, sin t sin 2t, cos t)` on the unit sphere.
    SphericalLoop,
    /// Power-basis coefficients per coordinate, lowest degree first.
    Polynomial { coeffs: [Vec<f64>; 3] },
}

impl Shape {
    pub fn kind(&self) -> CurveKind {
        match self {
            Shape::Helix { .. } => CurveKind::Helix,
            Shape::Cubic => CurveKind::Cubic,
            Shape::TorusLoop => CurveKind::TorusLoop,
            Shape::Salkowski => CurveKind::Salkowski,
            Shape::SphericalLoop => CurveKind::SphericalLoop,
            Shape::Polynomial { .. } => CurveKind::Polynomial,
        }
    }
}

/// A validated generator curve on a closed parameter interval.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSpec {
    shape: Shape,
    domain: [f64; 2],
    closed: bool,
}

/// Position and the first four parameter derivatives at `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveJet {
    pub t: f64,
    pub x: Vec3,
    pub d1: Vec3,
    pub d2: Vec3,
    pub d3: Vec3,
    pub d4: Vec3,
}

impl CurveJet {
    pub fn speed(&self) -> f64 {
        self.d1.norm()
    }

    fn derivative(&self, k: usize) -> Vec3 {
        match k {
            0 => self.x,
            1 => self.d1,
            2 => self.d2,
            3 => self.d3,
            _ => self.d4,
        }
    }
}

pub const BUILTIN_NAMES: [&str; 5] = ["helix", "cubic", "torus_loop", "salkowski", "spherical_loop"];

impl CurveSpec {
    pub fn new(shape: Shape, domain: [f64; 2], closed: bool) -> Result<Self> {
        let spec = CurveSpec { shape, domain, closed };
        spec.validate()?;
        Ok(spec)
    }

    /// One of the built-in generators with its default domain.
    pub fn builtin(name: &str) -> Result<Self> {
        let kind = CurveKind::from_name(name)
            .filter(|k| *k != CurveKind::Polynomial)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown built-in curve '{name}'")))?;
        Self::builtin_kind(kind)
    }

    pub fn builtin_kind(kind: CurveKind) -> Result<Self> {
        let shape = match kind {
            CurveKind::Helix => Shape::Helix {
                radius: 2.0,
                pitch: 1.0,
            },
            CurveKind::Cubic => Shape::Cubic,
            CurveKind::TorusLoop => Shape::TorusLoop,
            CurveKind::Salkowski => Shape::Salkowski,
            CurveKind::SphericalLoop => Shape::SphericalLoop,
            CurveKind::Polynomial => return Err(Error::InvalidSpec("polynomial curves need coefficients".into())),
        };
        let domain = default_domain(&shape);
        let closed = matches!(kind, CurveKind::TorusLoop | CurveKind::SphericalLoop);
        CurveSpec::new(shape, domain, closed)
    }

    pub fn helix(radius: f64, pitch: f64, domain: [f64; 2]) -> Result<Self> {
        CurveSpec::new(Shape::Helix { radius, pitch }, domain, false)
    }

    pub fn polynomial(coeffs: [Vec<f64>; 3], domain: [f64; 2]) -> Result<Self> {
        CurveSpec::new(Shape::Polynomial { coeffs }, domain, false)
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn kind(&self) -> CurveKind {
        self.shape.kind()
    }

    pub fn domain(&self) -> [f64; 2] {
        self.domain
    }

    pub fn closed(&self) -> bool {
        self.closed
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.domain[0] && t <= self.domain[1]
    }

    /// Maps `t` into the domain by periodicity when the curve is closed;
    /// open curves return `t` unchanged.
    pub fn periodic_parameter(&self, t: f64) -> f64 {
        let [a, b] = self.domain;
        if !self.closed || self.contains(t) {
            return t;
        }
        a + (t - a).rem_euclid(b - a)
    }

    /// Parameter window used by default analysis grids. It stays clear of
    /// the domain ends and, for the built-ins, of parallels where the
    /// surface is known to be singular.
    pub fn default_window(&self) -> [f64; 2] {
        match self.shape {
            Shape::Salkowski => clamp_window([-4.5, 4.5], self.domain),
            Shape::Cubic => clamp_window([-1.5, 1.5], self.domain),
            // torsion and r' vanish together at t = 0 and t = pi
            Shape::SphericalLoop => clamp_window([0.1, PI - 0.1], self.domain),
            _ => {
                let [a, b] = self.domain;
                let inset = 1e-2 * (b - a);
                [a + inset, b - inset]
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let [a, b] = self.domain;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidSpec(format!(
                "domain [{a}, {b}] must satisfy t_min < t_max"
            )));
        }
        match &self.shape {
            Shape::Helix { radius, pitch } => {
                if !(*radius > 0.0 && radius.is_finite() && pitch.is_finite()) {
                    return Err(Error::InvalidSpec("helix needs radius > 0 and a finite pitch".into()));
                }
            }
            Shape::Salkowski => {
                if a <= -SALKOWSKI_LIMIT || b >= SALKOWSKI_LIMIT {
                    return Err(Error::InvalidSpec(
                        "salkowski domain must lie strictly inside (-5, 5)".into(),
                    ));
                }
            }
            Shape::Polynomial { coeffs } => {
                for (axis, c) in ["x", "y", "z"].iter().zip(coeffs) {
                    if c.is_empty() {
                        return Err(Error::InvalidSpec(format!("coeffs_{axis} is empty")));
                    }
                    if c.iter().any(|v| !v.is_finite()) {
                        return Err(Error::InvalidSpec(format!("coeffs_{axis} has non-finite entries")));
                    }
                }
            }
            _ => {}
        }
        if self.closed {
            let mismatch = self.endpoint_mismatch();
            if mismatch >= CLOSED_TOL {
                return Err(Error::InvalidSpec(format!(
                    "curve declared closed but endpoint derivatives differ by {mismatch:e}"
                )));
            }
        }
        Ok(())
    }

    /// Largest mismatch over derivatives 0..=3 between the two domain ends.
    pub fn endpoint_mismatch(&self) -> f64 {
        let [a, b] = self.domain;
        let ja = self.raw_jet(a);
        let jb = self.raw_jet(b);
        (0..4)
            .map(|k| (ja.derivative(k) - jb.derivative(k)).norm())
            .fold(0.0, f64::max)
    }

    pub fn evaluate_jet(&self, t: f64) -> Result<CurveJet> {
        if !self.contains(t) {
            return Err(Error::Domain {
                t,
                min: self.domain[0],
                max: self.domain[1],
            });
        }
        Ok(self.raw_jet(t))
    }

    pub fn position(&self, t: f64) -> Result<Vec3> {
        Ok(self.evaluate_jet(t)?.x)
    }

    fn raw_jet(&self, t: f64) -> CurveJet {
        match &self.shape {
            Shape::Helix { radius, pitch } => helix_jet(*radius, *pitch, t),
            Shape::Cubic => {
                let coeffs = [vec![0.0, 1.0], vec![0.0, 0.0, 0.5], vec![0.0, 0.0, 0.0, 1.0 / 3.0]];
                polynomial_jet(&coeffs, t)
            }
            Shape::Polynomial { coeffs } => polynomial_jet(coeffs, t),
            Shape::TorusLoop => taylor_jet(t, |t| {
                let (s, c) = t.sin_cos();
                let ring = (t * 2.0).cos() + 4.0;
                [c * ring, s * ring, (t * 2.0).sin()]
            }),
            Shape::SphericalLoop => taylor_jet(t, |t| {
                let (s, c) = t.sin_cos();
                let (s2, c2) = (t * 2.0).sin_cos();
                [s * c2, s * s2, c]
            }),
            Shape::Salkowski => taylor_jet(t, salkowski),
        }
    }

    /// Arc length between two parameters by adaptive Simpson quadrature of
    /// the speed.
    pub fn arc_length(&self, a: f64, b: f64) -> Result<f64> {
        for t in [a, b] {
            if !self.contains(t) {
                return Err(Error::Domain {
                    t,
                    min: self.domain[0],
                    max: self.domain[1],
                });
            }
        }
        let speed = |t: f64| self.raw_jet(t).d1.norm();
        Ok(adaptive_simpson(&speed, a, b, 1e-14, 40))
    }
}

fn clamp_window(w: [f64; 2], domain: [f64; 2]) -> [f64; 2] {
    [w[0].max(domain[0]), w[1].min(domain[1])]
}

fn default_domain(shape: &Shape) -> [f64; 2] {
    match shape {
        Shape::Helix { radius, pitch } => [0.0, TAU * radius.hypot(*pitch)],
        Shape::Cubic => [-2.0, 2.0],
        Shape::TorusLoop | Shape::SphericalLoop => [0.0, TAU],
        Shape::Salkowski => [-4.9, 4.9],
        Shape::Polynomial { .. } => [-1.0, 1.0],
    }
}

fn helix_jet(a: f64, b: f64, t: f64) -> CurveJet {
    let w = 1.0 / a.hypot(b);
    let (sn, cs) = (w * t).sin_cos();
    let (w2, w3, w4) = (w * w, w * w * w, w * w * w * w);
    CurveJet {
        t,
        x: Vec3::new(a * cs, a * sn, b * w * t),
        d1: Vec3::new(-a * w * sn, a * w * cs, b * w),
        d2: Vec3::new(-a * w2 * cs, -a * w2 * sn, 0.0),
        d3: Vec3::new(a * w3 * sn, -a * w3 * cs, 0.0),
        d4: Vec3::new(a * w4 * cs, a * w4 * sn, 0.0),
    }
}

fn polynomial_jet(coeffs: &[Vec<f64>; 3], t: f64) -> CurveJet {
    let mut d = [Vec3::zeros(); 5];
    for (axis, c) in coeffs.iter().enumerate() {
        let mut poly = c.clone();
        for dk in d.iter_mut() {
            dk[axis] = poly.iter().rev().fold(0.0, |acc, &ci| acc * t + ci);
            poly = poly.iter().enumerate().skip(1).map(|(i, &ci)| i as f64 * ci).collect();
        }
    }
    CurveJet {
        t,
        x: d[0],
        d1: d[1],
        d2: d[2],
        d3: d[3],
        d4: d[4],
    }
}

fn taylor_jet(t: f64, f: impl Fn(Taylor<5>) -> [Taylor<5>; 3]) -> CurveJet {
    let comps = f(Taylor::variable(t)).map(|c| c.derivatives());
    let d = |k: usize| Vec3::new(comps[0][k], comps[1][k], comps[2][k]);
    CurveJet {
        t,
        x: d(0),
        d1: d(1),
        d2: d(2),
        d3: d(3),
        d4: d(4),
    }
}

fn salkowski(t: Taylor<5>) -> [Taylor<5>; 3] {
    let r26 = 26f64.sqrt();
    let q = (Taylor::constant(25.0) - t * t).sqrt();
    let phi = (t * 0.2).asin() * r26;
    let (sp, cp) = phi.sin_cos();
    let tq78 = t * q * 78.0;
    let quad = t * t * 28.0 + (-625.0);
    let x = (tq78 * cp + quad * sp * r26) * (1.0 / 2860.0);
    let y = (tq78 * sp - quad * cp * r26) * (1.0 / 2860.0);
    let z = (Taylor::constant(25.0) - t * t * 2.0) * (1.0 / (4.0 * r26));
    [x, y, z]
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    if a == b {
        return 0.0;
    }
    let (fa, fb) = (f(a), f(b));
    let fm = f(0.5 * (a + b));
    let whole = simpson(fa, fm, fb, a, b);
    recurse(f, a, b, fa, fm, fb, whole, tol, depth)
}

/// Converts first and second parameter derivatives of a scalar function
/// into arc-length derivatives using `d/ds = (1/v) d/dt`.
pub fn arc_length_rescale(jet: &CurveJet, f_t: f64, f_tt: f64) -> Result<(f64, f64)> {
    let v = jet.speed();
    if v < MIN_SPEED {
        return Err(Error::Degenerate { t: jet.t, speed: v });
    }
    let f_s = f_t / v;
    let f_ss = (f_tt - f_s * jet.d1.dot(&jet.d2) / v) / (v * v);
    Ok((f_s, f_ss))
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pitch: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coeffs_x: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coeffs_y: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coeffs_z: Option<Vec<f64>>,
}

/// On-disk JSON form of a curve spec.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveFile {
    kind: String,
    #[serde(default)]
    params: ParamsFile,
    #[serde(default)]
    domain: Option<[f64; 2]>,
    #[serde(default)]
    closed: Option<bool>,
}

impl CurveSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: CurveFile = serde_json::from_str(text)?;
        let kind = CurveKind::from_name(&file.kind)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown curve kind '{}'", file.kind)))?;
        let p = file.params;
        let shape = match kind {
            CurveKind::Helix => Shape::Helix {
                radius: p.radius.unwrap_or(2.0),
                pitch: p.pitch.unwrap_or(1.0),
            },
            CurveKind::Polynomial => {
                let take = |c: Option<Vec<f64>>, axis: &str| {
                    c.ok_or_else(|| Error::InvalidSpec(format!("polynomial needs coeffs_{axis}")))
                };
                Shape::Polynomial {
                    coeffs: [take(p.coeffs_x, "x")?, take(p.coeffs_y, "y")?, take(p.coeffs_z, "z")?],
                }
            }
            CurveKind::Cubic => Shape::Cubic,
            CurveKind::TorusLoop => Shape::TorusLoop,
            CurveKind::Salkowski => Shape::Salkowski,
            CurveKind::SphericalLoop => Shape::SphericalLoop,
        };
        let domain = file.domain.unwrap_or_else(|| default_domain(&shape));
        let closed = file
            .closed
            .unwrap_or(matches!(kind, CurveKind::TorusLoop | CurveKind::SphericalLoop));
        CurveSpec::new(shape, domain, closed)
    }

    pub fn to_json(&self) -> String {
        let mut params = ParamsFile::default();
        match &self.shape {
            Shape::Helix { radius, pitch } => {
                params.radius = Some(*radius);
                params.pitch = Some(*pitch);
            }
            Shape::Polynomial { coeffs } => {
                params.coeffs_x = Some(coeffs[0].clone());
                params.coeffs_y = Some(coeffs[1].clone());
                params.coeffs_z = Some(coeffs[2].clone());
            }
            _ => {}
        }
        let file = CurveFile {
            kind: self.kind().name().to_string(),
            params,
            domain: Some(self.domain),
            closed: Some(self.closed),
        };
        serde_json::to_string_pretty(&file).expect("curve spec serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Resolves `builtin:NAME` or a path to a JSON spec file.
    pub fn resolve(arg: &str) -> Result<Self> {
        match arg.strip_prefix("builtin:") {
            Some(name) => Self::builtin(name),
            None => Self::load(Path::new(arg)),
        }
    }
}
