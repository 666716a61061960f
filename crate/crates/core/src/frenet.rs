//! Frenet apparatus and the arc-length derivatives of curvature radius and
//! torsion.
//!
//! `r'`, `r''` and `tau'` come from exact differentiation of
//! `r = v^3 / |a' x a''|` and `tau = det(a', a'', a''') / |a' x a''|^2`
//! written in jet dot and cross products, then chain-ruled from the native
//! parameter to arc length.

use serde::Serialize;

use crate::curve::{arc_length_rescale, CurveJet, CurveSpec, Vec3, MIN_SPEED};
use crate::error::{Error, Result};
use crate::taylor::Taylor;

pub const DEFAULT_KAPPA_MIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrenetData {
    pub t: f64,
    /// Generator point alpha(t).
    pub point: Vec3,
    pub tangent: Vec3,
    pub normal: Vec3,
    pub binormal: Vec3,
    pub kappa: f64,
    pub tau: f64,
    /// Radius of curvature, `1 / kappa`.
    pub r: f64,
    pub r_s: f64,
    pub r_ss: f64,
    pub tau_s: f64,
    /// `|alpha'(t)|` in the native parameter.
    pub speed: f64,
}

impl FrenetData {
    pub fn from_jet(jet: &CurveJet, kappa_min: f64) -> Result<Self> {
        let CurveJet { t, x, d1, d2, d3, d4 } = *jet;
        let speed = d1.norm();
        if speed < MIN_SPEED {
            return Err(Error::Degenerate { t, speed });
        }

        let c = d1.cross(&d2);
        let c1 = d1.cross(&d3);
        let c2 = d2.cross(&d3) + d1.cross(&d4);
        let q = c.norm_squared();
        let kappa = q.sqrt() / speed.powi(3);
        if !(kappa > kappa_min) {
            return Err(Error::VanishingCurvature { t, kappa });
        }

        let v2 = Taylor::<3>::from_derivatives([
            d1.norm_squared(),
            2.0 * d1.dot(&d2),
            2.0 * (d2.norm_squared() + d1.dot(&d3)),
        ]);
        let q3 = Taylor::<3>::from_derivatives([q, 2.0 * c.dot(&c1), 2.0 * (c1.norm_squared() + c.dot(&c2))]);
        let r_jet = v2 * v2.sqrt() / q3.sqrt();

        let det = Taylor::<2>::from_derivatives([c.dot(&d3), c1.dot(&d3) + c.dot(&d4)]);
        let q2 = Taylor::<2>::from_derivatives([q, 2.0 * c.dot(&c1)]);
        let tau_jet = det / q2;

        let (r_s, r_ss) = arc_length_rescale(jet, r_jet.derivative(1), r_jet.derivative(2))?;
        let tau_s = tau_jet.derivative(1) / speed;

        let tangent = d1 / speed;
        let binormal = c / q.sqrt();
        let normal = binormal.cross(&tangent);
        Ok(FrenetData {
            t,
            point: x,
            tangent,
            normal,
            binormal,
            kappa,
            tau: tau_jet.value(),
            r: 1.0 / kappa,
            r_s,
            r_ss,
            tau_s,
            speed,
        })
    }

    /// Left side of the sphere condition `r'' tau - r' tau' + r tau^3`.
    pub fn sphere_condition(&self) -> f64 {
        self.r_ss * self.tau - self.r_s * self.tau_s + self.r * self.tau.powi(3)
    }

    /// Center of the osculating circle, `alpha + r N`.
    pub fn center(&self) -> Vec3 {
        self.point + self.normal * self.r
    }
}

pub fn frenet_at(spec: &CurveSpec, t: f64) -> Result<FrenetData> {
    frenet_at_with(spec, t, DEFAULT_KAPPA_MIN)
}

pub fn frenet_at_with(spec: &CurveSpec, t: f64, kappa_min: f64) -> Result<FrenetData> {
    FrenetData::from_jet(&spec.evaluate_jet(t)?, kappa_min)
}

/// Absolute differences between the closed-form arc-length derivatives and
/// finite differences over numerically integrated arc-length steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrenetResiduals {
    pub r_s: f64,
    pub r_ss: f64,
    pub tau_s: f64,
}

impl FrenetResiduals {
    pub fn max(&self) -> f64 {
        self.r_s.max(self.r_ss).max(self.tau_s)
    }
}

pub fn frenet_derivative_check(spec: &CurveSpec, t: f64, h: f64) -> Result<FrenetResiduals> {
    let lo = frenet_at(spec, t - h)?;
    let mid = frenet_at(spec, t)?;
    let hi = frenet_at(spec, t + h)?;
    let hm = spec.arc_length(t - h, t)?;
    let hp = spec.arc_length(t, t + h)?;

    let first =
        |fm: f64, f0: f64, fp: f64| (hm * hm * fp - hp * hp * fm + (hp * hp - hm * hm) * f0) / (hp * hm * (hp + hm));
    let second = |fm: f64, f0: f64, fp: f64| 2.0 * ((fp - f0) / hp - (f0 - fm) / hm) / (hp + hm);

    Ok(FrenetResiduals {
        r_s: (mid.r_s - first(lo.r, mid.r, hi.r)).abs(),
        r_ss: (mid.r_ss - second(lo.r, mid.r, hi.r)).abs(),
        tau_s: (mid.tau_s - first(lo.tau, mid.tau, hi.tau)).abs(),
    })
}
