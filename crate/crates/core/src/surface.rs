//! The surface of osculating circles, its closed-form partials, unit normal
//! and singular locus.
//!
//! Partials with respect to `s` are arc-length partials. For a generator in
//! a non-arc-length parameter `t`, `X_t = v X_s` with `v` the curve speed.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::curve::{CurveSpec, Vec3};
use crate::error::Result;
use crate::frenet::{frenet_at, FrenetData};

/// Area element below which a point counts as singular.
pub const DEFAULT_EPS_REG: f64 = 1e-9;

/// Tolerance on `|r'|` and `|tau|` for the analytic singular-parallel test.
pub const SINGULAR_PARALLEL_TOL: f64 = 1e-9;

/// `1 - cos u` without cancellation near `u = 0`.
pub fn one_minus_cos(u: f64) -> f64 {
    let h = (0.5 * u).sin();
    2.0 * h * h
}

/// Distance from `u` to the nearest multiple of `2 pi`.
pub fn angle_to_generator(u: f64) -> f64 {
    let w = u.rem_euclid(TAU);
    w.min(TAU - w)
}

/// True when `u` lies on the generator line `u = 0 (mod 2 pi)`.
pub fn on_generator(u: f64) -> bool {
    angle_to_generator(u) < 1e-12
}

/// `alpha + r (sin u T + (1 - cos u) N)`.
pub fn surface_point(fd: &FrenetData, u: f64) -> Vec3 {
    if u == 0.0 {
        return fd.point;
    }
    fd.point + (fd.tangent * u.sin() + fd.normal * one_minus_cos(u)) * fd.r
}

/// Position on the surface at native curve parameter `t`.
pub fn surface_at(spec: &CurveSpec, t: f64, u: f64) -> Result<Vec3> {
    Ok(surface_point(&frenet_at(spec, t)?, u))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfaceJet {
    /// Native curve parameter of the parallel.
    pub s: f64,
    pub u: f64,
    pub point: Vec3,
    pub x_s: Vec3,
    pub x_u: Vec3,
    pub x_ss: Vec3,
    pub x_su: Vec3,
    pub x_uu: Vec3,
    pub cross: Vec3,
    pub area_elem: f64,
    /// Unit normal, `None` at singular points.
    pub normal: Option<Vec3>,
    pub regular: bool,
}

pub fn surface_jet(fd: &FrenetData, u: f64, eps_reg: f64) -> SurfaceJet {
    let FrenetData {
        tangent: t,
        normal: n,
        binormal: b,
        kappa,
        tau,
        r,
        r_s,
        r_ss,
        tau_s,
        ..
    } = *fd;
    let (su, cu) = u.sin_cos();
    let omc = one_minus_cos(u);

    let a = r_s * su + cu;
    let bn = r_s * omc + su;
    let c = r * tau * omc;
    let x_s = t * a + n * bn + b * c;
    let x_u = (t * cu + n * su) * r;

    let a_s = r_ss * su;
    let b_s = r_ss * omc;
    let c_s = (r_s * tau + r * tau_s) * omc;
    let x_ss = t * (a_s - bn * kappa) + n * (b_s + a * kappa - c * tau) + b * (c_s + bn * tau);
    let x_su = t * (r_s * cu - su) + n * (r_s * su + cu) + b * (r * tau * su);
    let x_uu = (n * cu - t * su) * r;

    let root = (r * r * tau * tau + r_s * r_s).sqrt();
    let direction = t * (-r * tau * su) + n * (r * tau * cu) + b * r_s;
    let cross = direction * (r * omc);
    let area_elem = r * omc * root;
    let regular = !on_generator(u) && area_elem > eps_reg;
    let normal = regular.then(|| direction / root);

    SurfaceJet {
        s: fd.t,
        u,
        point: surface_point(fd, u),
        x_s,
        x_u,
        x_ss,
        x_su,
        x_uu,
        cross,
        area_elem,
        normal,
        regular,
    }
}

/// `2 r sqrt(r^2 tau^2 + r'^2) sin^2(u/2)`.
pub fn area_element_closed_form(fd: &FrenetData, u: f64) -> f64 {
    let h = (0.5 * u).sin();
    2.0 * fd.r * (fd.r * fd.r * fd.tau * fd.tau + fd.r_s * fd.r_s).sqrt() * h * h
}

/// Grid points on the generator line or on parallels where `r'` and `tau`
/// vanish together.
pub fn singular_locus(spec: &CurveSpec, s_grid: &[f64], u_grid: &[f64], tol: f64) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for &s in s_grid {
        let fd = frenet_at(spec, s)?;
        let whole_parallel = fd.r_s.abs() < tol && fd.tau.abs() < tol;
        for &u in u_grid {
            if whole_parallel || on_generator(u) {
                out.push((s, u));
            }
        }
    }
    Ok(out)
}
