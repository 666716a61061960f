//! CSV emission of Frenet samples and per-point curvature tables.
//!
//! Floats use Rust's shortest round-trip formatting; singular points get
//! `nan` fields and `regular = 0`.

#![allow(non_snake_case)]

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::Deserialize;

use crate::curve::CurveSpec;
use crate::error::{Error, Result};
use crate::forms::{curvatures, first_form, second_form, CurvatureConfig};
use crate::frenet::{frenet_at, FrenetData};
use crate::grid::GridSpec;

pub const CURVATURE_HEADER: [&str; 16] = [
    "s", "u", "E", "F", "G", "e", "f", "g", "K", "H", "k1", "k2", "umb", "kn", "kg", "regular",
];

pub const FRENET_HEADER: [&str; 16] = [
    "t", "kappa", "tau", "r", "r_s", "r_ss", "tau_s", "T_x", "T_y", "T_z", "N_x", "N_y", "N_z", "B_x", "B_y", "B_z",
];

pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct CurvatureRow {
    pub s: f64,
    pub u: f64,
    pub E: f64,
    pub F: f64,
    pub G: f64,
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub K: f64,
    pub H: f64,
    pub k1: f64,
    pub k2: f64,
    pub umb: f64,
    pub kn: f64,
    pub kg: f64,
    pub regular: u8,
}

impl CurvatureRow {
    fn values(&self) -> [f64; 15] {
        [
            self.s, self.u, self.E, self.F, self.G, self.e, self.f, self.g, self.K, self.H, self.k1, self.k2, self.umb,
            self.kn, self.kg,
        ]
    }

    /// Bitwise equality, with every NaN equal to every other NaN.
    pub fn same_bits(&self, other: &CurvatureRow) -> bool {
        self.regular == other.regular
            && self
                .values()
                .iter()
                .zip(other.values())
                .all(|(a, b)| a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan()))
    }
}

/// Closed-form row at one grid point.
pub fn curvature_row(fd: &FrenetData, u: f64, cfg: &CurvatureConfig) -> CurvatureRow {
    let nan = f64::NAN;
    let sample = curvatures(fd, u, cfg).ok();
    let second = second_form(fd, u, cfg.eps_reg).ok();
    match (sample, second) {
        (Some(c), Some(sf)) => {
            let ff = first_form(fd, u);
            let (k1, k2) = crate::forms::principal_curvatures(c.K, c.H, c.umb);
            CurvatureRow {
                s: fd.t,
                u,
                E: ff.E,
                F: ff.F,
                G: ff.G,
                e: sf.e,
                f: sf.f,
                g: sf.g,
                K: c.K,
                H: c.H,
                k1,
                k2,
                umb: c.umb,
                kn: c.kn_parallel,
                kg: c.kg_parallel,
                regular: 1,
            }
        }
        _ => CurvatureRow {
            s: fd.t,
            u,
            E: nan,
            F: nan,
            G: nan,
            e: nan,
            f: nan,
            g: nan,
            K: nan,
            H: nan,
            k1: nan,
            k2: nan,
            umb: nan,
            kn: nan,
            kg: nan,
            regular: 0,
        },
    }
}

/// Rows in row-major `(s, u)` order.
pub fn curvature_rows(spec: &CurveSpec, grid: &GridSpec, cfg: &CurvatureConfig) -> Result<Vec<CurvatureRow>> {
    grid.validate()?;
    grid.check_inside(spec)?;
    let us = grid.u_values();
    let rows: Vec<Vec<CurvatureRow>> = grid
        .s_values()
        .par_iter()
        .map(|&t| {
            let fd = frenet_at(spec, t)?;
            Ok(us.iter().map(|&u| curvature_row(&fd, u, cfg)).collect())
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

pub fn write_curvature_csv<W: Write>(rows: &[CurvatureRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CURVATURE_HEADER)?;
    for row in rows {
        let mut rec: Vec<String> = row.values().iter().map(|&x| fmt_f64(x)).collect();
        rec.push(row.regular.to_string());
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

pub fn emit_curvature_csv<W: Write>(spec: &CurveSpec, grid: &GridSpec, cfg: &CurvatureConfig, w: W) -> Result<usize> {
    let rows = curvature_rows(spec, grid, cfg)?;
    write_curvature_csv(&rows, w)?;
    Ok(rows.len())
}

pub fn read_curvature_csv<R: Read>(r: R) -> Result<Vec<CurvatureRow>> {
    let mut rdr = csv::Reader::from_reader(r);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != CURVATURE_HEADER {
        return Err(Error::InvalidConfig(format!(
            "unexpected curvature CSV header {header:?}"
        )));
    }
    Ok(rdr.deserialize().collect::<std::result::Result<_, _>>()?)
}

/// `n` samples evenly spaced over `[a, b]`, endpoints included.
pub fn frenet_samples(spec: &CurveSpec, range: [f64; 2], n: usize) -> Result<Vec<FrenetData>> {
    let [a, b] = range;
    if n < 2 || !(a < b) {
        return Err(Error::InvalidGrid(format!(
            "need at least 2 samples over a nonempty range, got {n} over [{a}, {b}]"
        )));
    }
    (0..n)
        .into_par_iter()
        .map(|i| {
            let t = if i + 1 == n {
                b
            } else {
                a + (b - a) * i as f64 / (n - 1) as f64
            };
            frenet_at(spec, t)
        })
        .collect()
}

pub fn write_frenet_csv<W: Write>(samples: &[FrenetData], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(FRENET_HEADER)?;
    for fd in samples {
        let mut vals = vec![fd.t, fd.kappa, fd.tau, fd.r, fd.r_s, fd.r_ss, fd.tau_s];
        for v in [fd.tangent, fd.normal, fd.binormal] {
            vals.extend(v.iter());
        }
        out.write_record(vals.iter().map(|&x| fmt_f64(x)))?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn helix_grid(n: usize) -> (CurveSpec, GridSpec) {
        let spec = CurveSpec::builtin("helix").unwrap();
        let grid = GridSpec::for_curve(&spec, n, n).unwrap();
        (spec, grid)
    }

    #[test]
    fn helix_ten_by_ten_has_hundred_rows() {
        let (spec, grid) = helix_grid(10);
        let mut buf = Vec::new();
        let n = emit_curvature_csv(&spec, &grid, &CurvatureConfig::default(), &mut buf).unwrap();
        assert_eq!(n, 100);
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 101);
        assert_eq!(text.lines().next().unwrap(), CURVATURE_HEADER.join(","));
    }

    #[test]
    fn helix_row_at_antipode() {
        let spec = CurveSpec::builtin("helix").unwrap();
        let fd = frenet_at(&spec, 0.0).unwrap();
        let row = curvature_row(&fd, PI, &CurvatureConfig::default());
        assert!((row.K - 0.08).abs() < 1e-12 && (row.H - 0.3).abs() < 1e-12);
        assert_eq!(row.regular, 1);
    }

    #[test]
    fn generator_rows_are_flagged() {
        let spec = CurveSpec::builtin("cubic").unwrap();
        let grid = GridSpec::new(spec.default_window(), 3, [0.0, PI], 3, false, false).unwrap();
        let rows = curvature_rows(&spec, &grid, &CurvatureConfig::default()).unwrap();
        let mut buf = Vec::new();
        write_curvature_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let flagged: Vec<&str> = text.lines().skip(1).filter(|l| l.ends_with(",0")).collect();
        assert_eq!(flagged.len(), 3);
        assert!(flagged.iter().all(|l| l.contains(",nan,")));
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let cfg = CurvatureConfig::default();
        for name in crate::curve::BUILTIN_NAMES {
            let spec = CurveSpec::builtin(name).unwrap();
            let grid = GridSpec::new(spec.default_window(), 9, [0.0, 2.0 * PI], 11, false, false).unwrap();
            let rows = curvature_rows(&spec, &grid, &cfg).unwrap();
            let mut buf = Vec::new();
            write_curvature_csv(&rows, &mut buf).unwrap();
            let back = read_curvature_csv(buf.as_slice()).unwrap();
            assert_eq!(back.len(), rows.len());
            for (a, b) in rows.iter().zip(&back) {
                assert!(a.same_bits(b), "{name}: {a:?} vs {b:?}");
                let again = curvature_row(&frenet_at(&spec, b.s).unwrap(), b.u, &cfg);
                assert!(again.same_bits(b), "{name}: re-evaluation differs");
            }
        }
    }

    #[test]
    fn frenet_csv_layout() {
        let spec = CurveSpec::builtin("helix").unwrap();
        let samples = frenet_samples(&spec, spec.default_window(), 5).unwrap();
        let mut buf = Vec::new();
        write_frenet_csv(&samples, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 6);
        assert_eq!(lines[1].split(',').count(), 16);
        let kappa: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
        assert!((kappa - 0.4).abs() < 1e-12);
        assert!(frenet_samples(&spec, [0.0, 1.0], 1).is_err());
    }
}
