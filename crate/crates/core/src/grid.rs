//! Parameter grids over `(s, u)`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::curve::CurveSpec;
use crate::error::{Error, Result};
use crate::forms::DEFAULT_U_GUARD;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub s_min: f64,
    pub s_max: f64,
    pub n_s: usize,
    pub u_min: f64,
    pub u_max: f64,
    pub n_u: usize,
    /// Stitch the last `s` row to the first. Samples then omit `s_max`.
    pub wrap_s: bool,
    /// Stitch the last `u` column to the first. Samples are spaced by
    /// `2 pi / n_u` starting at `u_min`.
    pub wrap_u: bool,
}

impl GridSpec {
    pub fn new(s: [f64; 2], n_s: usize, u: [f64; 2], n_u: usize, wrap_s: bool, wrap_u: bool) -> Result<Self> {
        let g = GridSpec {
            s_min: s[0],
            s_max: s[1],
            n_s,
            u_min: u[0],
            u_max: u[1],
            n_u,
            wrap_s,
            wrap_u,
        };
        g.validate()?;
        Ok(g)
    }

    /// `n_s x n_u` grid over the curve's default window with the default
    /// `u` band `[delta, 2 pi - delta]`.
    pub fn for_curve(spec: &CurveSpec, n_s: usize, n_u: usize) -> Result<Self> {
        Self::new(
            spec.default_window(),
            n_s,
            [DEFAULT_U_GUARD, TAU - DEFAULT_U_GUARD],
            n_u,
            false,
            false,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidGrid(m));
        if self.n_s < 2 || self.n_u < 2 {
            return bad(format!(
                "need at least 2 samples per direction, got {}x{}",
                self.n_s, self.n_u
            ));
        }
        let finite = [self.s_min, self.s_max, self.u_min, self.u_max]
            .iter()
            .all(|x| x.is_finite());
        if !finite || !(self.s_min < self.s_max) || !(self.u_min < self.u_max) {
            return bad(format!(
                "empty or non-finite range s=[{}, {}], u=[{}, {}]",
                self.s_min, self.s_max, self.u_min, self.u_max
            ));
        }
        if self.wrap_u && self.u_max - self.u_min < TAU - 2.0 * DEFAULT_U_GUARD - 1e-12 {
            return bad(format!(
                "wrap_u needs a u-range covering the full circle, got [{}, {}]",
                self.u_min, self.u_max
            ));
        }
        Ok(())
    }

    pub fn s_values(&self) -> Vec<f64> {
        samples(self.s_min, self.s_max, self.n_s, self.wrap_s)
    }

    pub fn u_values(&self) -> Vec<f64> {
        if self.wrap_u {
            (0..self.n_u)
                .map(|j| self.u_min + TAU * j as f64 / self.n_u as f64)
                .collect()
        } else {
            samples(self.u_min, self.u_max, self.n_u, false)
        }
    }

    pub fn len(&self) -> usize {
        self.n_s * self.n_u
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All points in row-major `(s, u)` order.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let us = self.u_values();
        self.s_values()
            .into_iter()
            .flat_map(|s| us.iter().map(move |&u| (s, u)))
            .collect()
    }

    pub fn check_inside(&self, spec: &CurveSpec) -> Result<()> {
        let [a, b] = spec.domain();
        if self.s_min < a || self.s_max > b {
            return Err(Error::Domain {
                t: if self.s_min < a { self.s_min } else { self.s_max },
                min: a,
                max: b,
            });
        }
        Ok(())
    }
}

fn samples(a: f64, b: f64, n: usize, periodic: bool) -> Vec<f64> {
    let div = if periodic { n } else { n - 1 } as f64;
    (0..n)
        .map(|i| {
            if !periodic && i == n - 1 {
                b
            } else {
                a + (b - a) * i as f64 / div
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_grids() {
        assert!(GridSpec::new([0.0, 1.0], 1, [0.1, 1.0], 10, false, false).is_err());
        assert!(GridSpec::new([1.0, 1.0], 3, [0.1, 1.0], 10, false, false).is_err());
        assert!(GridSpec::new([0.0, 1.0], 3, [0.1, f64::NAN], 10, false, false).is_err());
        assert!(GridSpec::new([0.0, 1.0], 3, [0.1, 3.0], 10, false, true).is_err());
    }

    #[test]
    fn inclusive_and_periodic_samples() {
        let g = GridSpec::new([0.0, 1.0], 5, [1e-3, TAU - 1e-3], 4, true, true).unwrap();
        assert_eq!(g.s_values(), vec![0.0, 0.2, 0.4, 0.6, 0.8]);
        let u = g.u_values();
        assert_eq!(u.len(), 4);
        assert!((u[1] - u[0] - TAU / 4.0).abs() < 1e-15);
        let g = GridSpec::new([-1.0, 2.0], 4, [0.5, 1.5], 3, false, false).unwrap();
        assert_eq!(g.s_values(), vec![-1.0, 0.0, 1.0, 2.0]);
        assert_eq!(*g.u_values().last().unwrap(), 1.5);
        assert_eq!(g.points().len(), 12);
        assert_eq!(g.points()[1], (-1.0, 1.0));
    }

    #[test]
    fn default_grid_fits_curve() {
        for name in crate::curve::BUILTIN_NAMES {
            let spec = CurveSpec::builtin(name).unwrap();
            let g = GridSpec::for_curve(&spec, 10, 10).unwrap();
            g.check_inside(&spec).unwrap();
            assert_eq!(g.u_min, 1e-3);
        }
    }
}
