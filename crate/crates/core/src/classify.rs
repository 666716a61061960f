//! Numeric predicates for the classification results: planar, spherical and
//! constant-curvature generators, canal surfaces, Weingarten and linear
//! Weingarten surfaces, umbilics and the topology of closed surfaces.

#![allow(non_snake_case)]

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::curve::{CurveSpec, Vec3};
use crate::error::{Error, Result};
use crate::forms::{curvatures, CurvatureConfig, CurvatureSample};
use crate::frenet::{frenet_at, FrenetData};
use crate::grid::GridSpec;
use crate::mesh::{build_mesh, closed_euler_characteristic, mesh_euler_characteristic};
use crate::surface::{one_minus_cos, surface_jet, surface_point};

pub const REPORT_VERSION: u32 = 1;

/// Fewest regular grid points a classification accepts (a 5 x 5 patch).
pub const MIN_REGULAR_POINTS: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// On `max |tau|`.
    pub planar: f64,
    /// On `max |r'|`.
    pub salkowski: f64,
    /// On `max |r r' (1 - cos u)|`.
    pub canal: f64,
    /// On the sphere condition, the sphere-fit residual and the spread of
    /// `r^2 + r'^2 / tau^2`.
    pub spherical: f64,
    /// On the normalized Jacobian `|K_s H_u - K_u H_s| / max(|grad K| |grad H|, eps)`.
    pub weingarten: f64,
    pub weingarten_eps: f64,
    /// On `max |H - (r/2) K - 1/(2r)|`.
    pub linear_weingarten: f64,
    /// On `std / (1 + |mean|)` of K and of |H|.
    pub constant: f64,
    /// On `H^2 - K`.
    pub umbilic: f64,
    /// Samples with `|tau|` below this are left out of the sphere lemma.
    pub lemma_tau_min: f64,
    /// Samples with `|r'|` below this are left out of the sphere lemma.
    pub lemma_r_s_min: f64,
    pub eps_reg: f64,
    pub u_guard: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let c = CurvatureConfig::default();
        Tolerances {
            planar: 1e-9,
            salkowski: 1e-9,
            canal: 1e-9,
            spherical: 1e-6,
            weingarten: 1e-6,
            weingarten_eps: 1e-12,
            linear_weingarten: 1e-9,
            constant: 1e-6,
            umbilic: 1e-6,
            lemma_tau_min: 1e-6,
            lemma_r_s_min: 1e-9,
            eps_reg: c.eps_reg,
            u_guard: c.u_guard,
        }
    }
}

impl Tolerances {
    pub const KEYS: [&'static str; 13] = [
        "planar",
        "salkowski",
        "canal",
        "spherical",
        "weingarten",
        "weingarten_eps",
        "linear_weingarten",
        "constant",
        "umbilic",
        "lemma_tau_min",
        "lemma_r_s_min",
        "eps_reg",
        "u_guard",
    ];

    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "tolerance {key} = {value} must be finite and >= 0"
            )));
        }
        let slot = match key {
            "planar" => &mut self.planar,
            "salkowski" => &mut self.salkowski,
            "canal" => &mut self.canal,
            "spherical" => &mut self.spherical,
            "weingarten" => &mut self.weingarten,
            "weingarten_eps" => &mut self.weingarten_eps,
            "linear_weingarten" => &mut self.linear_weingarten,
            "constant" => &mut self.constant,
            "umbilic" => &mut self.umbilic,
            "lemma_tau_min" => &mut self.lemma_tau_min,
            "lemma_r_s_min" => &mut self.lemma_r_s_min,
            "eps_reg" => &mut self.eps_reg,
            "u_guard" => &mut self.u_guard,
            _ => {
                return Err(Error::InvalidConfig(format!(
                    "unknown tolerance {key:?}; expected one of {}",
                    Self::KEYS.join(", ")
                )))
            }
        };
        *slot = value;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verdict {
    pub verdict: bool,
    pub residual: f64,
}

impl Verdict {
    fn below(residual: f64, tol: f64) -> Self {
        Verdict {
            verdict: residual < tol,
            residual,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphericalVerdict {
    pub verdict: bool,
    /// `max |r'' tau - r' tau' + r tau^3|`.
    pub condition_max: f64,
    /// Samples meeting the lemma's hypotheses `tau != 0`, `r' != 0`.
    pub lemma_samples: usize,
    pub lemma_mean: Option<f64>,
    /// Standard deviation of `r^2 + r'^2 / tau^2`.
    pub lemma_std: Option<f64>,
    pub fitted_center: [f64; 3],
    pub fitted_radius: f64,
    /// `max | |X - c| - R |` over the grid.
    pub fit_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearWeingarten {
    pub verdict: bool,
    /// `max |H - (r/2) K - 1/(2r)|` with `H` taken along the normal that
    /// points to the centre of the osculating circle.
    pub residual: f64,
    pub r_mean: f64,
    /// `(a, b, c)` of `aH + bK + c = 0`, normalized to `a = 1`.
    pub coefficients: [f64; 3],
    /// `a^2 - 4bc`, evaluated on the equivalent integer-scaled triple
    /// `(2r, -r^2, -1)` where it vanishes without rounding.
    pub discriminant: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantVerdict {
    pub verdict: bool,
    pub mean: f64,
    pub variance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Topology {
    /// True when the mesh was stitched in both directions.
    pub closed: bool,
    pub euler_characteristic: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub version: u32,
    pub curve: String,
    pub grid: GridSpec,
    pub tolerances: Tolerances,
    pub total_points: usize,
    pub regular_points: usize,
    pub planar_generator: Verdict,
    pub spherical_generator: SphericalVerdict,
    pub salkowski: Verdict,
    pub canal_envelope: Verdict,
    pub weingarten: Verdict,
    pub linear_weingarten: Option<LinearWeingarten>,
    pub constant_K: ConstantVerdict,
    pub constant_H: ConstantVerdict,
    pub umbilic_fraction: f64,
    pub topology: Topology,
}

/// `r r' (1 - cos u)`, which vanishes for every `u` exactly on canal
/// surfaces.
pub fn envelope_residual(fd: &FrenetData, u: f64) -> f64 {
    fd.r * fd.r_s * one_minus_cos(u)
}

/// Deterministic pairwise summation.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

fn mean_variance(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = pairwise_sum(xs) / n;
    let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    (mean, pairwise_sum(&dev) / n)
}

struct Sample {
    point: Vec3,
    normal: Option<Vec3>,
    curv: Option<CurvatureSample>,
    /// Unit vector towards the circle centre.
    inward: Vec3,
}

/// Least-squares sphere through `points`: `|X|^2 = 2 c.X + (R^2 - |c|^2)`.
fn fit_sphere(points: &[Vec3]) -> (Vec3, f64, f64) {
    let a = DMatrix::from_fn(points.len(), 4, |i, j| if j < 3 { 2.0 * points[i][j] } else { 1.0 });
    let b = DVector::from_fn(points.len(), |i, _| points[i].norm_squared());
    let sol = match a.svd(true, true).solve(&b, 1e-14) {
        Ok(s) => s,
        Err(_) => return (Vec3::zeros(), f64::NAN, f64::INFINITY),
    };
    let c = Vec3::new(sol[0], sol[1], sol[2]);
    let r2 = sol[3] + c.norm_squared();
    if !(r2 > 0.0) {
        return (c, f64::NAN, f64::INFINITY);
    }
    let r = r2.sqrt();
    let res = points.iter().map(|p| ((p - c).norm() - r).abs()).fold(0.0, f64::max);
    (c, r, res)
}

/// Orientation-consistent finite-difference Jacobian of `(K, H)`; `H` at a
/// neighbour is flipped when its normal opposes the centre normal.
fn weingarten_residual(samples: &[Vec<Sample>], ds: f64, du: f64, eps: f64) -> f64 {
    let n_s = samples.len();
    let n_u = samples.first().map_or(0, |r| r.len());
    let mut worst = 0.0f64;
    for i in 1..n_s.saturating_sub(1) {
        for j in 1..n_u.saturating_sub(1) {
            let c = &samples[i][j];
            let (Some(cc), Some(nc)) = (c.curv, c.normal) else {
                continue;
            };
            let nb = [
                &samples[i + 1][j],
                &samples[i - 1][j],
                &samples[i][j + 1],
                &samples[i][j - 1],
            ];
            let mut kh = [(0.0, 0.0); 4];
            let mut ok = true;
            for (slot, s) in kh.iter_mut().zip(nb) {
                match (s.curv, s.normal) {
                    (Some(cv), Some(n)) => *slot = (cv.K, cv.H * n.dot(&nc).signum()),
                    _ => ok = false,
                }
            }
            if !ok {
                continue;
            }
            let _ = cc;
            let ks = (kh[0].0 - kh[1].0) / (2.0 * ds);
            let hs = (kh[0].1 - kh[1].1) / (2.0 * ds);
            let ku = (kh[2].0 - kh[3].0) / (2.0 * du);
            let hu = (kh[2].1 - kh[3].1) / (2.0 * du);
            let jac = ks * hu - ku * hs;
            let scale = ks.hypot(ku) * hs.hypot(hu);
            worst = worst.max(jac.abs() / scale.max(eps));
        }
    }
    worst
}

pub fn classify(spec: &CurveSpec, grid: &GridSpec, tol: &Tolerances) -> Result<ClassificationReport> {
    grid.validate()?;
    grid.check_inside(spec)?;
    let ss = grid.s_values();
    let us = grid.u_values();
    let ccfg = CurvatureConfig {
        eps_reg: tol.eps_reg,
        u_guard: tol.u_guard,
    };

    let rows: Vec<(FrenetData, Vec<Sample>)> = ss
        .par_iter()
        .map(|&t| {
            let fd = frenet_at(spec, t)?;
            let center = fd.center();
            let row = us
                .iter()
                .map(|&u| {
                    let point = surface_point(&fd, u);
                    let inward = (center - point).normalize();
                    let normal = surface_jet(&fd, u, tol.eps_reg).normal;
                    let curv = curvatures(&fd, u, &ccfg).ok();
                    Sample {
                        point,
                        normal,
                        curv,
                        inward,
                    }
                })
                .collect();
            Ok((fd, row))
        })
        .collect::<Result<_>>()?;
    let (fds, samples): (Vec<FrenetData>, Vec<Vec<Sample>>) = rows.into_iter().unzip();

    let regular: Vec<(&Sample, CurvatureSample)> = samples
        .iter()
        .flatten()
        .filter_map(|s| s.curv.map(|c| (s, c)))
        .collect();
    if regular.len() < MIN_REGULAR_POINTS {
        return Err(Error::InsufficientGrid {
            regular: regular.len(),
            needed: MIN_REGULAR_POINTS,
        });
    }

    let max_abs = |it: &mut dyn Iterator<Item = f64>| it.fold(0.0f64, |m, x| m.max(x.abs()));
    let planar_generator = Verdict::below(max_abs(&mut fds.iter().map(|f| f.tau)), tol.planar);
    let salkowski = Verdict::below(max_abs(&mut fds.iter().map(|f| f.r_s)), tol.salkowski);
    let canal_envelope = Verdict::below(
        max_abs(
            &mut fds
                .iter()
                .flat_map(|f| us.iter().map(move |&u| envelope_residual(f, u))),
        ),
        tol.canal,
    );

    let condition_max = max_abs(&mut fds.iter().map(|f| f.sphere_condition()));
    let lemma: Vec<f64> = fds
        .iter()
        .filter(|f| f.tau.abs() >= tol.lemma_tau_min && f.r_s.abs() >= tol.lemma_r_s_min)
        .map(|f| f.r * f.r + f.r_s * f.r_s / (f.tau * f.tau))
        .collect();
    let (lemma_mean, lemma_std) = if lemma.is_empty() {
        (None, None)
    } else {
        let (m, v) = mean_variance(&lemma);
        (Some(m), Some(v.sqrt()))
    };
    let points: Vec<Vec3> = samples.iter().flatten().map(|s| s.point).collect();
    let (center, radius, fit_residual) = fit_sphere(&points);
    let lemma_ok = match (lemma_mean, lemma_std) {
        (Some(m), Some(sd)) => sd <= tol.spherical * (1.0 + m.abs()),
        _ => true,
    };
    let spherical_generator = SphericalVerdict {
        verdict: !planar_generator.verdict && condition_max < tol.spherical && fit_residual < tol.spherical && lemma_ok,
        condition_max,
        lemma_samples: lemma.len(),
        lemma_mean,
        lemma_std,
        fitted_center: [center.x, center.y, center.z],
        fitted_radius: radius,
        fit_residual,
    };

    let ds = if ss.len() > 1 { ss[1] - ss[0] } else { 1.0 };
    let du = if us.len() > 1 { us[1] - us[0] } else { 1.0 };
    let weingarten = Verdict::below(
        weingarten_residual(&samples, ds, du, tol.weingarten_eps),
        tol.weingarten,
    );

    let linear_weingarten = salkowski.verdict.then(|| {
        let radii: Vec<f64> = fds.iter().map(|f| f.r).collect();
        let r = pairwise_sum(&radii) / radii.len() as f64;
        let residual = regular
            .iter()
            .filter_map(|(s, c)| {
                let n = s.normal?;
                let h = c.H * n.dot(&s.inward).signum();
                Some((h - 0.5 * r * c.K - 0.5 / r).abs())
            })
            .fold(0.0, f64::max);
        let (a, b, c) = (2.0 * r, -(r * r), -1.0);
        LinearWeingarten {
            verdict: residual < tol.linear_weingarten,
            residual,
            r_mean: r,
            coefficients: [1.0, -0.5 * r, -0.5 / r],
            discriminant: a * a - 4.0 * b * c,
        }
    });

    let ks: Vec<f64> = regular.iter().map(|(_, c)| c.K).collect();
    let hs: Vec<f64> = regular.iter().map(|(_, c)| c.H.abs()).collect();
    let constant = |xs: &[f64]| {
        let (mean, variance) = mean_variance(xs);
        ConstantVerdict {
            verdict: variance.sqrt() <= tol.constant * (1.0 + mean.abs()),
            mean,
            variance,
        }
    };
    let umbilic_fraction = regular.iter().filter(|(_, c)| c.umb < tol.umbilic).count() as f64 / regular.len() as f64;

    let topology = if spec.closed() {
        let closed_grid = GridSpec::new(
            spec.domain(),
            grid.n_s,
            [grid.u_min, grid.u_min + TAU - 2.0 * crate::forms::DEFAULT_U_GUARD],
            grid.n_u,
            true,
            true,
        )?;
        let mesh = build_mesh(spec, &closed_grid, false)?;
        Topology {
            closed: true,
            euler_characteristic: closed_euler_characteristic(&mesh)?,
        }
    } else {
        let mesh = build_mesh(spec, grid, false)?;
        Topology {
            closed: false,
            euler_characteristic: mesh_euler_characteristic(&mesh),
        }
    };

    Ok(ClassificationReport {
        version: REPORT_VERSION,
        curve: spec.kind().name().to_string(),
        grid: *grid,
        tolerances: *tol,
        total_points: grid.len(),
        regular_points: regular.len(),
        planar_generator,
        spherical_generator,
        salkowski,
        canal_envelope,
        weingarten,
        linear_weingarten,
        constant_K: constant(&ks),
        constant_H: constant(&hs),
        umbilic_fraction,
        topology,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn report(name: &str) -> ClassificationReport {
        let spec = CurveSpec::builtin(name).unwrap();
        let grid = GridSpec::for_curve(&spec, 30, 30).unwrap();
        classify(&spec, &grid, &Tolerances::default()).unwrap()
    }

    #[test]
    fn helix_is_linear_weingarten_canal() {
        let r = report("helix");
        assert!(r.salkowski.verdict && r.salkowski.residual < 1e-9);
        assert!(r.canal_envelope.verdict);
        assert!(r.weingarten.verdict);
        assert!(!r.planar_generator.verdict && !r.spherical_generator.verdict);
        let lw = r.linear_weingarten.unwrap();
        assert!(lw.verdict, "residual {}", lw.residual);
        assert_eq!(lw.coefficients, [1.0, -1.25, -0.2]);
        assert_eq!(lw.discriminant, 0.0);
        assert!(!r.constant_K.verdict && !r.constant_H.verdict);
        assert_eq!(
            r.topology,
            Topology {
                closed: false,
                euler_characteristic: 1
            }
        );
    }

    #[test]
    fn cubic_is_neither_canal_nor_weingarten() {
        let r = report("cubic");
        assert!(!r.salkowski.verdict && !r.canal_envelope.verdict);
        assert!(!r.weingarten.verdict && r.weingarten.residual > 1e-3);
        assert!(r.linear_weingarten.is_none());
    }

    #[test]
    fn spherical_loop_is_totally_umbilic() {
        let r = report("spherical_loop");
        let sph = &r.spherical_generator;
        assert!(sph.verdict, "{sph:?}");
        assert!((sph.fitted_radius - 1.0).abs() < 1e-9);
        assert!(sph.lemma_samples > 0);
        assert_eq!(r.umbilic_fraction, 1.0);
        assert!(r.constant_K.verdict && (r.constant_K.mean - 1.0).abs() < 1e-6);
        assert!(r.constant_H.verdict && (r.constant_H.mean - 1.0).abs() < 1e-6);
        assert!(r.weingarten.verdict);
        assert_eq!(r.topology.euler_characteristic, 0);
    }

    #[test]
    fn salkowski_orientation_flip_is_not_a_weingarten_failure() {
        let r = report("salkowski");
        assert!(r.salkowski.verdict && r.canal_envelope.verdict);
        assert!(r.weingarten.verdict, "{}", r.weingarten.residual);
        let lw = r.linear_weingarten.unwrap();
        assert!(lw.verdict, "{}", lw.residual);
        assert_eq!(lw.discriminant, 0.0);
    }

    #[test]
    fn torus_loop_is_a_closed_torus() {
        let r = report("torus_loop");
        assert!(!r.canal_envelope.verdict && !r.weingarten.verdict);
        assert_eq!(
            r.topology,
            Topology {
                closed: true,
                euler_characteristic: 0
            }
        );
    }

    #[test]
    fn envelope_residual_examples() {
        let fd = frenet_at(&CurveSpec::builtin("cubic").unwrap(), 1.0).unwrap();
        assert_eq!(envelope_residual(&fd, 0.0), 0.0);
        assert!((envelope_residual(&fd, PI) - 2.0 * fd.r * fd.r_s).abs() < 1e-12);
        assert!(envelope_residual(&fd, PI).abs() > 1e-3);
    }

    #[test]
    fn deterministic_and_rejects_tiny_grids() {
        let spec = CurveSpec::builtin("cubic").unwrap();
        let grid = GridSpec::for_curve(&spec, 12, 12).unwrap();
        let a = classify(&spec, &grid, &Tolerances::default()).unwrap();
        let b = classify(&spec, &grid, &Tolerances::default()).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        let tiny = GridSpec::for_curve(&spec, 4, 6).unwrap();
        assert!(matches!(
            classify(&spec, &tiny, &Tolerances::default()),
            Err(Error::InsufficientGrid {
                regular: 24,
                needed: 25
            })
        ));
    }

    #[test]
    fn tolerance_overrides() {
        let mut t = Tolerances::default();
        t.set("weingarten", 1e-3).unwrap();
        assert_eq!(t.weingarten, 1e-3);
        assert!(t.set("nope", 1.0).is_err());
        assert!(t.set("canal", -1.0).is_err());
    }

    #[test]
    fn pairwise_sum_matches_plain_sum_on_exact_values() {
        let xs: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 499_500.0);
    }
}
