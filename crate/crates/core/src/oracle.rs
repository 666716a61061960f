//! Finite-difference differential geometry of an arbitrary parametrized
//! surface, built only from point evaluations.
//!
//! [`verify_surface`] compares every closed form in [`crate::forms`] against
//! this oracle over a grid.

#![allow(non_snake_case)]

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::Serialize;

use crate::curve::{CurveKind, CurveSpec, Vec3};
use crate::error::{Error, Result};
use crate::forms::{self, alternatives, CurvatureConfig};
use crate::frenet::frenet_at;
use crate::grid::GridSpec;
use crate::surface::{surface_jet, surface_point, DEFAULT_EPS_REG};

pub const REPORT_VERSION: u32 = 1;

/// Normal agreement threshold on `1 - |<n1, n2>|`.
pub const NORMAL_TOL: f64 = 1e-6;

/// Half-width of the band around the generator line left out of
/// verification grids. The oracle divides by `W^2 ~ sin^4(u/2)`.
pub const VERIFY_U_BAND: f64 = 0.2;

/// Distance kept from parallels where `tau` and `r'` vanish together.
pub const VERIFY_S_MARGIN: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleConfig {
    pub h_s: f64,
    pub h_u: f64,
    pub richardson: bool,
    /// Step halvings combined by Richardson extrapolation (2 = one
    /// extrapolation step).
    pub levels: usize,
    pub tol_report: f64,
    pub eps_reg: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            h_s: 3e-3,
            h_u: 3e-3,
            richardson: true,
            levels: 2,
            tol_report: 1e-5,
            eps_reg: DEFAULT_EPS_REG,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, h) in [("h_s", self.h_s), ("h_u", self.h_u)] {
            if !(h > 0.0 && h < 1e-2) {
                return Err(Error::InvalidConfig(format!("{name} = {h} must lie in (0, 1e-2)")));
            }
        }
        if self.richardson && !(2..=4).contains(&self.levels) {
            return Err(Error::InvalidConfig(format!(
                "levels = {} must lie in 2..=4",
                self.levels
            )));
        }
        if !(self.tol_report > 0.0) || !(self.eps_reg >= 0.0) {
            return Err(Error::InvalidConfig(
                "tol_report must be positive and eps_reg non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// Parameter box the stencil must stay inside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub s: [f64; 2],
    pub u: [f64; 2],
}

impl Bounds {
    pub fn unbounded() -> Self {
        Bounds {
            s: [f64::NEG_INFINITY, f64::INFINITY],
            u: [f64::NEG_INFINITY, f64::INFINITY],
        }
    }

    pub fn s_only(s: [f64; 2]) -> Self {
        Bounds { s, ..Self::unbounded() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleSample {
    pub E: f64,
    pub F: f64,
    pub G: f64,
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub K: f64,
    pub H: f64,
    /// `X_s x X_u / |X_s x X_u|`.
    pub normal: Vec3,
}

struct Partials {
    xs: Vec3,
    xu: Vec3,
    xss: Vec3,
    xsu: Vec3,
    xuu: Vec3,
}

impl Partials {
    /// Eliminates the `h^(2k)` error term from a pair of estimates at steps
    /// `h` and `h/2`.
    fn extrapolate(coarse: &Partials, fine: &Partials, k: i32) -> Partials {
        let w = 4f64.powi(k);
        let r = |c: Vec3, f: Vec3| (f * w - c) / (w - 1.0);
        Partials {
            xs: r(coarse.xs, fine.xs),
            xu: r(coarse.xu, fine.xu),
            xss: r(coarse.xss, fine.xss),
            xsu: r(coarse.xsu, fine.xsu),
            xuu: r(coarse.xuu, fine.xuu),
        }
    }
}

fn central<S>(x: &S, s: f64, u: f64, h: f64, k: f64) -> Result<Partials>
where
    S: Fn(f64, f64) -> Result<Vec3>,
{
    let c = x(s, u)?;
    let sp = x(s + h, u)?;
    let sm = x(s - h, u)?;
    let up = x(s, u + k)?;
    let um = x(s, u - k)?;
    let pp = x(s + h, u + k)?;
    let pm = x(s + h, u - k)?;
    let mp = x(s - h, u + k)?;
    let mm = x(s - h, u - k)?;
    Ok(Partials {
        xs: (sp - sm) / (2.0 * h),
        xu: (up - um) / (2.0 * k),
        xss: (sp - c * 2.0 + sm) / (h * h),
        xsu: (pp - pm - mp + mm) / (4.0 * h * k),
        xuu: (up - c * 2.0 + um) / (k * k),
    })
}

/// Fundamental forms, curvatures and normal of `surface` at `(s, u)` from
/// central differences, optionally Richardson-extrapolated from steps
/// `h` and `h/2`.
pub fn oracle_forms<S>(surface: S, s: f64, u: f64, cfg: &OracleConfig, bounds: Bounds) -> Result<OracleSample>
where
    S: Fn(f64, f64) -> Result<Vec3>,
{
    let (h, k) = (cfg.h_s, cfg.h_u);
    if s - h < bounds.s[0] || s + h > bounds.s[1] || u - k < bounds.u[0] || u + k > bounds.u[1] {
        return Err(Error::StencilOutOfDomain { s, u });
    }
    let levels = if cfg.richardson { cfg.levels.max(1) } else { 1 };
    let mut table = Vec::with_capacity(levels);
    let mut scale = 1.0;
    for _ in 0..levels {
        table.push(central(&surface, s, u, h * scale, k * scale)?);
        scale *= 0.5;
    }
    for order in 1..levels {
        table = table
            .windows(2)
            .map(|w| Partials::extrapolate(&w[0], &w[1], order as i32))
            .collect();
    }
    let p = table.pop().expect("at least one level");
    let cross = p.xs.cross(&p.xu);
    let w = cross.norm();
    if !(w > cfg.eps_reg) {
        return Err(Error::SingularPoint { s, u });
    }
    let n = cross / w;
    let (E, F, G) = (p.xs.dot(&p.xs), p.xs.dot(&p.xu), p.xu.dot(&p.xu));
    let (e, f, g) = (p.xss.dot(&n), p.xsu.dot(&n), p.xuu.dot(&n));
    let det = E * G - F * F;
    Ok(OracleSample {
        E,
        F,
        G,
        e,
        f,
        g,
        K: (e * g - f * f) / det,
        H: (e * G - 2.0 * f * F + g * E) / (2.0 * det),
        normal: n,
    })
}

/// Oracle on the surface of `spec` in its native parameter, with the forms
/// rescaled to arc length (`E/v^2, F/v, e/v^2, f/v`). Closed curves are
/// sampled periodically, so the stencil may straddle the domain ends.
pub fn oracle_for_curve(spec: &CurveSpec, t: f64, u: f64, cfg: &OracleConfig) -> Result<OracleSample> {
    let bounds = if spec.closed() {
        Bounds::unbounded()
    } else {
        Bounds::s_only(spec.domain())
    };
    let mut o = oracle_forms(
        |t, u| Ok(surface_point(&frenet_at(spec, spec.periodic_parameter(t))?, u)),
        t,
        u,
        cfg,
        bounds,
    )?;
    let v = spec.evaluate_jet(t)?.speed();
    o.E /= v * v;
    o.F /= v;
    o.e /= v * v;
    o.f /= v;
    Ok(o)
}

/// Default `n_s x n_u` verification grids for `spec`. The `u` range leaves
/// out [`VERIFY_U_BAND`] around the generator line. Closed curves use their
/// whole period; otherwise the curve's default window is used. Built-ins
/// with singular parallels (Salkowski at `s = 0`, the spherical loop at
/// `t = 0, pi`) get one grid per regular stretch, [`VERIFY_S_MARGIN`] away
/// from those parallels.
pub fn verification_grids(spec: &CurveSpec, n_s: usize, n_u: usize) -> Result<Vec<GridSpec>> {
    let u = [VERIFY_U_BAND, TAU - VERIFY_U_BAND];
    let m = VERIFY_S_MARGIN;
    let [a, b] = if spec.closed() {
        spec.domain()
    } else {
        spec.default_window()
    };
    let windows = match spec.kind() {
        CurveKind::Salkowski => vec![[a, -m], [m, b]],
        CurveKind::SphericalLoop => vec![[0.0, PI], [PI, TAU]]
            .into_iter()
            .map(|[x, y]| [(x + m).max(a), (y - m).min(b)])
            .collect(),
        _ => vec![[a, b]],
    };
    windows
        .into_iter()
        .filter(|w| w[1] - w[0] > 1e-9)
        .map(|w| GridSpec::new(w, n_s, u, n_u, false, false))
        .collect()
}

/// `|closed - oracle| / (1 + |oracle|)`.
pub fn relative_error(closed: f64, oracle: f64) -> f64 {
    (closed - oracle).abs() / (1.0 + oracle.abs())
}

pub const QUANTITIES: [&str; 10] = ["E", "F", "G", "e", "f", "g", "K", "H", "K_from_forms", "H_from_forms"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantityStats {
    pub name: String,
    pub max_abs: f64,
    pub max_rel: f64,
    pub mean_abs: f64,
    pub mean_rel: f64,
    /// Grid point of the largest relative error.
    pub worst_at: [f64; 2],
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalStats {
    /// Largest `1 - |<n_closed, n_oracle>|`.
    pub max_deviation: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reading {
    pub label: String,
    pub max_rel: f64,
    pub consistent: bool,
}

/// Two competing variants of one expression, each scored
/// against the oracle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Adjudication {
    pub topic: String,
    pub readings: [Reading; 2],
    /// Label of the only consistent reading, `indistinguishable` when both
    /// fit this surface, `neither` when none does.
    pub verdict: String,
}

impl Adjudication {
    pub fn new(topic: &str, readings: [Reading; 2]) -> Self {
        let verdict = match (readings[0].consistent, readings[1].consistent) {
            (true, true) => "indistinguishable".to_string(),
            (true, false) => readings[0].label.clone(),
            (false, true) => readings[1].label.clone(),
            (false, false) => "neither".to_string(),
        };
        Adjudication {
            topic: topic.to_string(),
            readings,
            verdict,
        }
    }
}

/// Merges per-grid adjudications: a reading stays consistent only if it is
/// consistent on every report, and keeps its worst error.
pub fn combine_adjudications<'a, I>(reports: I) -> Vec<Adjudication>
where
    I: IntoIterator<Item = &'a VerificationReport>,
{
    let mut merged: Vec<Adjudication> = Vec::new();
    for report in reports {
        for adj in &report.adjudications {
            match merged.iter_mut().find(|m| m.topic == adj.topic) {
                Some(m) => {
                    for (mr, r) in m.readings.iter_mut().zip(&adj.readings) {
                        mr.max_rel = mr.max_rel.max(r.max_rel);
                        mr.consistent &= r.consistent;
                    }
                }
                None => merged.push(adj.clone()),
            }
        }
    }
    merged
        .into_iter()
        .map(|m| Adjudication::new(&m.topic, m.readings))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointDelta {
    pub s: f64,
    pub u: f64,
    pub abs: [f64; 10],
    pub rel: [f64; 10],
    pub normal_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub version: u32,
    pub curve: String,
    pub grid: GridSpec,
    pub config: OracleConfig,
    pub evaluated: usize,
    pub skipped: usize,
    pub quantities: Vec<QuantityStats>,
    pub normal: NormalStats,
    pub adjudications: Vec<Adjudication>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<PointDelta>,
}

impl VerificationReport {
    pub fn quantity(&self, name: &str) -> Option<&QuantityStats> {
        self.quantities.iter().find(|q| q.name == name)
    }

    pub fn max_rel(&self) -> f64 {
        self.quantities.iter().map(|q| q.max_rel).fold(0.0, f64::max)
    }
}

pub const ADJUDICATION_TOPICS: [(&str, &str, &str); 3] = [
    (
        "second form coefficient e",
        "literal (r'' - tau r'')",
        "determinant (r' tau' - tau r'')",
    ),
    (
        "mean curvature numerator",
        "2 r'^2 tau (cos u - 1)",
        "2 tau r^2 (cos u - 1)",
    ),
    ("sphere condition in the umbilic discriminant", "r tau^3", "r^2 tau^3"),
];

struct PointResult {
    delta: PointDelta,
    alt_rel: [[f64; 2]; 3],
}

fn evaluate_point(spec: &CurveSpec, t: f64, u: f64, cfg: &OracleConfig) -> Result<PointResult> {
    let fd = frenet_at(spec, t)?;
    let ccfg = CurvatureConfig {
        eps_reg: cfg.eps_reg,
        ..Default::default()
    };
    let c = forms::curvatures(&fd, u, &ccfg)?;
    let ff = forms::fundamental_forms(&fd, u, cfg.eps_reg)?;
    let (k_forms, h_forms) = forms::curvatures_from_forms(&ff);
    let o = oracle_for_curve(spec, t, u, cfg)?;
    let closed = [ff.E, ff.F, ff.G, ff.e, ff.f, ff.g, c.K, c.H, k_forms, h_forms];
    let oracle = [o.E, o.F, o.G, o.e, o.f, o.g, o.K, o.H, o.K, o.H];
    let mut abs = [0.0; 10];
    let mut rel = [0.0; 10];
    for i in 0..10 {
        abs[i] = (closed[i] - oracle[i]).abs();
        rel[i] = relative_error(closed[i], oracle[i]);
    }
    let n = surface_jet(&fd, u, cfg.eps_reg)
        .normal
        .ok_or(Error::SingularPoint { s: t, u })?;
    let normal_deviation = 1.0 - n.dot(&o.normal).abs();
    let umb_oracle = o.H * o.H - o.K;
    let alt_rel = [
        [
            relative_error(alternatives::second_form_e_literal(&fd, u), o.e),
            relative_error(alternatives::second_form_e_derived(&fd, u), o.e),
        ],
        [
            relative_error(forms::mean_curvature(&fd, u), o.H),
            relative_error(alternatives::mean_curvature_r_squared(&fd, u), o.H),
        ],
        [
            relative_error(forms::umbilic_discriminant(&fd, u), umb_oracle),
            relative_error(alternatives::umbilic_discriminant_r_squared(&fd, u), umb_oracle),
        ],
    ];
    Ok(PointResult {
        delta: PointDelta {
            s: t,
            u,
            abs,
            rel,
            normal_deviation,
        },
        alt_rel,
    })
}

/// Compares closed forms against the oracle at every grid point. Points
/// where either side is singular are counted as skipped.
pub fn verify_surface(spec: &CurveSpec, grid: &GridSpec, cfg: &OracleConfig) -> Result<VerificationReport> {
    verify_surface_with(spec, grid, cfg, false)
}

pub fn verify_surface_with(
    spec: &CurveSpec,
    grid: &GridSpec,
    cfg: &OracleConfig,
    keep_points: bool,
) -> Result<VerificationReport> {
    cfg.validate()?;
    grid.validate()?;
    grid.check_inside(spec)?;
    let results: Vec<Option<PointResult>> = grid
        .points()
        .par_iter()
        .map(|&(t, u)| evaluate_point(spec, t, u, cfg).ok())
        .collect();
    let skipped = results.iter().filter(|r| r.is_none()).count();
    let ok: Vec<PointResult> = results.into_iter().flatten().collect();
    let n = ok.len();

    let quantities = QUANTITIES
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let mut st = QuantityStats {
                name: name.to_string(),
                max_abs: 0.0,
                max_rel: 0.0,
                mean_abs: 0.0,
                mean_rel: 0.0,
                worst_at: [f64::NAN; 2],
                pass: false,
            };
            for p in &ok {
                let d = &p.delta;
                st.max_abs = st.max_abs.max(d.abs[i]);
                if d.rel[i] > st.max_rel || st.worst_at[0].is_nan() {
                    st.max_rel = d.rel[i].max(st.max_rel);
                    st.worst_at = [d.s, d.u];
                }
                st.mean_abs += d.abs[i];
                st.mean_rel += d.rel[i];
            }
            if n > 0 {
                st.mean_abs /= n as f64;
                st.mean_rel /= n as f64;
            }
            st.pass = n > 0 && st.max_rel <= cfg.tol_report;
            st
        })
        .collect::<Vec<_>>();

    let max_dev = ok.iter().map(|p| p.delta.normal_deviation).fold(0.0, f64::max);
    let normal = NormalStats {
        max_deviation: max_dev,
        pass: n > 0 && max_dev < NORMAL_TOL,
    };

    let adjudications = ADJUDICATION_TOPICS
        .iter()
        .enumerate()
        .map(|(k, (topic, a, b))| {
            let worst = |j: usize| ok.iter().map(|p| p.alt_rel[k][j]).fold(0.0, f64::max);
            let reading = |j: usize, label: &str| {
                let m = worst(j);
                Reading {
                    label: label.to_string(),
                    max_rel: m,
                    consistent: n > 0 && m <= cfg.tol_report,
                }
            };
            Adjudication::new(topic, [reading(0, a), reading(1, b)])
        })
        .collect();

    let pass = n > 0 && quantities.iter().all(|q| q.pass) && normal.pass;
    Ok(VerificationReport {
        version: REPORT_VERSION,
        curve: spec.kind().name().to_string(),
        grid: *grid,
        config: *cfg,
        evaluated: n,
        skipped,
        quantities,
        normal,
        adjudications,
        pass,
        points: if keep_points {
            ok.into_iter().map(|p| p.delta).collect()
        } else {
            Vec::new()
        },
    })
}
