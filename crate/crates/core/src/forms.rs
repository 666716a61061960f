//! Closed-form fundamental forms and curvatures of a surface of osculating
//! circles, expressed through `r, r', r'', tau, tau'` of the generator.
//!
//! The second fundamental form comes from the determinants
//! `det(X_s, X_u, X_..)` divided by the area element. Gaussian and mean
//! curvature use their direct closed forms; [`curvatures_from_forms`] gives
//! the same quantities from `(E, F, G, e, f, g)` as a second route.

#![allow(non_snake_case)]

use serde::Serialize;

use crate::error::{Error, Result};
use crate::frenet::FrenetData;
use crate::surface::{angle_to_generator, one_minus_cos};

/// Angular distance from the generator line inside which curvatures are
/// not evaluated.
pub const DEFAULT_U_GUARD: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FirstForm {
    pub E: f64,
    pub F: f64,
    pub G: f64,
    /// `sqrt(EG - F^2)`.
    pub W: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecondForm {
    pub e: f64,
    pub f: f64,
    pub g: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FundamentalForms {
    pub E: f64,
    pub F: f64,
    pub G: f64,
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub W: f64,
}

impl FundamentalForms {
    pub fn new(first: FirstForm, second: SecondForm) -> Self {
        FundamentalForms {
            E: first.E,
            F: first.F,
            G: first.G,
            e: second.e,
            f: second.f,
            g: second.g,
            W: first.W,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureSample {
    pub K: f64,
    pub H: f64,
    pub k1: f64,
    pub k2: f64,
    /// Umbilic discriminant `H^2 - K`.
    pub umb: f64,
    pub kn_parallel: f64,
    pub kg_parallel: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureConfig {
    pub eps_reg: f64,
    pub u_guard: f64,
}

impl Default for CurvatureConfig {
    fn default() -> Self {
        CurvatureConfig {
            eps_reg: crate::surface::DEFAULT_EPS_REG,
            u_guard: DEFAULT_U_GUARD,
        }
    }
}

fn tilt(fd: &FrenetData) -> f64 {
    fd.r * fd.r * fd.tau * fd.tau + fd.r_s * fd.r_s
}

pub fn first_form(fd: &FrenetData, u: f64) -> FirstForm {
    let FrenetData { r, tau, r_s, .. } = *fd;
    let h = (0.5 * u).sin();
    let h2 = h * h;
    let su = u.sin();
    let E = 0.5 * (2.0 + 8.0 * r * r * tau * tau * h2 * h2 + 4.0 * r_s * su + 4.0 * r_s * r_s * 2.0 * h2);
    let F = r * (1.0 + r_s * su);
    let G = r * r;
    let W = 2.0 * r * tilt(fd).sqrt() * h2;
    FirstForm { E, F, G, W }
}

/// The three determinants `det(X_s, X_u, X_ss)`, `det(X_s, X_u, X_su)`,
/// `det(X_s, X_u, X_uu)`.
pub fn second_form_determinants(fd: &FrenetData, u: f64) -> [f64; 3] {
    let FrenetData {
        kappa,
        tau,
        r,
        r_s,
        r_ss,
        tau_s,
        ..
    } = *fd;
    let (su, cu) = u.sin_cos();
    let h = (0.5 * u).sin();
    let h2 = h * h;
    let omc = one_minus_cos(u);
    let det_ss = r
        * h2
        * (2.0 * tau * r_s * (su + 2.0 * omc * r_s) - 4.0 * r * r * tau.powi(3) * cu * h2
            + 2.0 * r * (kappa * tau * (1.0 + r_s * su) + omc * (r_s * tau_s - tau * r_ss)));
    let det_su = 2.0 * r * r * tau * (1.0 + r_s * su) * h2;
    let det_uu = r.powi(3) * tau * omc;
    [det_ss, det_su, det_uu]
}

fn check_regular(fd: &FrenetData, u: f64, cfg: &CurvatureConfig) -> Result<f64> {
    let W = first_form(fd, u).W;
    if angle_to_generator(u) < cfg.u_guard * (1.0 - 1e-9) || !(W > cfg.eps_reg) {
        return Err(Error::SingularPoint { s: fd.t, u });
    }
    Ok(W)
}

pub fn second_form(fd: &FrenetData, u: f64, eps_reg: f64) -> Result<SecondForm> {
    let W = first_form(fd, u).W;
    if !(W > eps_reg) || crate::surface::on_generator(u) {
        return Err(Error::SingularPoint { s: fd.t, u });
    }
    let [ss, su, uu] = second_form_determinants(fd, u);
    Ok(SecondForm {
        e: ss / W,
        f: su / W,
        g: uu / W,
    })
}

pub fn fundamental_forms(fd: &FrenetData, u: f64, eps_reg: f64) -> Result<FundamentalForms> {
    Ok(FundamentalForms::new(first_form(fd, u), second_form(fd, u, eps_reg)?))
}

/// Gaussian curvature from its closed form.
pub fn gaussian_curvature(fd: &FrenetData, u: f64) -> f64 {
    let FrenetData {
        tau,
        r,
        r_s,
        r_ss,
        tau_s,
        ..
    } = *fd;
    let cu = u.cos();
    let omc = one_minus_cos(u);
    let m = tilt(fd);
    let num = tau * (r * r * tau.powi(3) * cu - r_s * r_s * tau * omc + r * (tau * r_ss - r_s * tau_s));
    num / (-omc * m * m)
}

/// Mean curvature from its closed form, relative to the normal
/// `(-r tau sin u T + r tau cos u N + r' B) / sqrt(r^2 tau^2 + r'^2)`.
pub fn mean_curvature(fd: &FrenetData, u: f64) -> f64 {
    let FrenetData {
        tau,
        r,
        r_s,
        r_ss,
        tau_s,
        ..
    } = *fd;
    let cu = u.cos();
    let omc = one_minus_cos(u);
    let num = r * r * tau.powi(3) * (2.0 * cu - 1.0) - 2.0 * r_s * r_s * tau * omc + r * (tau * r_ss - r_s * tau_s);
    -num / (2.0 * omc * tilt(fd).powf(1.5))
}

/// `r^2 (r'' tau - r' tau' + r tau^3)^2 / (4 (1 - cos u)^2 (r^2 tau^2 + r'^2)^3)`.
pub fn umbilic_discriminant(fd: &FrenetData, u: f64) -> f64 {
    umbilic_discriminant_for(fd, u, fd.sphere_condition())
}

fn umbilic_discriminant_for(fd: &FrenetData, u: f64, condition: f64) -> f64 {
    let omc = one_minus_cos(u);
    fd.r * fd.r * condition * condition / (4.0 * omc * omc * tilt(fd).powi(3))
}

pub fn curvatures(fd: &FrenetData, u: f64, cfg: &CurvatureConfig) -> Result<CurvatureSample> {
    check_regular(fd, u, cfg)?;
    let K = gaussian_curvature(fd, u);
    let H = mean_curvature(fd, u);
    let umb = umbilic_discriminant(fd, u);
    let (k1, k2) = principal_curvatures(K, H, umb);
    let root = tilt(fd).sqrt();
    Ok(CurvatureSample {
        K,
        H,
        k1,
        k2,
        umb,
        kn_parallel: fd.tau / root,
        kg_parallel: fd.r_s / (fd.r * root),
    })
}

/// `k1 >= k2` with `k1 k2 = K`; umbilics return `k1 = k2 = H`.
pub fn principal_curvatures(K: f64, H: f64, umb: f64) -> (f64, f64) {
    if umb <= 1e-14 * H.abs().max(1.0) * H.abs().max(1.0) {
        return (H, H);
    }
    let d = (H * H - K).max(0.0).sqrt();
    (H + d, H - d)
}

/// `K = (eg - f^2)/(EG - F^2)`, `H = (eG - 2fF + gE)/(2(EG - F^2))`.
pub fn curvatures_from_forms(forms: &FundamentalForms) -> (f64, f64) {
    let FundamentalForms { E, F, G, e, f, g, .. } = *forms;
    let det = E * G - F * F;
    ((e * g - f * f) / det, (e * G - 2.0 * f * F + g * E) / (2.0 * det))
}

/// Curvatures of a constant-radius generator, for the orientation in which
/// torsion is positive.
pub fn salkowski_curvatures(r: f64, u: f64, u_guard: f64) -> Result<(f64, f64)> {
    if !(r > 0.0) || angle_to_generator(u) < u_guard * (1.0 - 1e-9) {
        return Err(Error::SingularPoint { s: f64::NAN, u });
    }
    let cu = u.cos();
    let omc = one_minus_cos(u);
    let H = -(2.0 * cu - 1.0) / (2.0 * r * omc);
    let K = -cu / (r * r * omc);
    Ok((K, H))
}

/// Competing variants of three expressions that circulate in two forms. The
/// verification report evaluates each against the finite-difference oracle.
pub mod alternatives {
    use super::*;

    /// `e` with the term `(r'' - tau r'')` in place of `(r' tau' - tau r'')`.
    pub fn second_form_e_literal(fd: &FrenetData, u: f64) -> f64 {
        let FrenetData { tau, r, r_s, r_ss, .. } = *fd;
        let (su, cu) = u.sin_cos();
        let h = (0.5 * u).sin();
        let omc = one_minus_cos(u);
        let num = tau * r_s * (su + 2.0 * omc * r_s) - 2.0 * r * r * tau.powi(3) * cu * h * h
            + tau * (1.0 + r_s * su)
            + r * omc * (r_ss - tau * r_ss);
        num / tilt(fd).sqrt()
    }

    /// `e` with the determinant-consistent term `(r' tau' - tau r'')`.
    pub fn second_form_e_derived(fd: &FrenetData, u: f64) -> f64 {
        let FrenetData {
            tau,
            r,
            r_s,
            r_ss,
            tau_s,
            ..
        } = *fd;
        let (su, cu) = u.sin_cos();
        let h = (0.5 * u).sin();
        let omc = one_minus_cos(u);
        let num = tau * r_s * (su + 2.0 * omc * r_s) - 2.0 * r * r * tau.powi(3) * cu * h * h
            + tau * (1.0 + r_s * su)
            + r * omc * (r_s * tau_s - tau * r_ss);
        num / tilt(fd).sqrt()
    }

    /// Mean curvature with `2 tau r^2 (cos u - 1)` in place of
    /// `2 r'^2 tau (cos u - 1)`.
    pub fn mean_curvature_r_squared(fd: &FrenetData, u: f64) -> f64 {
        let FrenetData {
            tau,
            r,
            r_s,
            r_ss,
            tau_s,
            ..
        } = *fd;
        let cu = u.cos();
        let omc = one_minus_cos(u);
        let num = r * r * tau.powi(3) * (2.0 * cu - 1.0) - 2.0 * r * r * tau * omc + r * (tau * r_ss - r_s * tau_s);
        -num / (2.0 * omc * tilt(fd).powf(1.5))
    }

    /// Umbilic discriminant built on `r'' tau - r' tau' + r^2 tau^3`.
    pub fn umbilic_discriminant_r_squared(fd: &FrenetData, u: f64) -> f64 {
        let cond = fd.r_ss * fd.tau - fd.r_s * fd.tau_s + fd.r * fd.r * fd.tau.powi(3);
        umbilic_discriminant_for(fd, u, cond)
    }
}
