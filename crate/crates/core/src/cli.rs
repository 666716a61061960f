//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or validation error, 2 failed verification.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::classify::{classify, Tolerances};
use crate::curve::CurveSpec;
use crate::error::{Error, Result};
use crate::export::{curvature_rows, frenet_samples, write_curvature_csv, write_frenet_csv};
use crate::forms::{CurvatureConfig, DEFAULT_U_GUARD};
use crate::grid::GridSpec;
use crate::mesh::{build_mesh, mesh_topology, write_obj};
use crate::oracle::{
    combine_adjudications, verification_grids, verify_surface_with, Adjudication, OracleConfig, VerificationReport,
    REPORT_VERSION,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "oscsurf", version, about = "Surfaces of osculating circles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample the Frenet apparatus along the curve.
    Frenet {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, default_value_t = 101)]
        samples: usize,
        #[arg(long, allow_negative_numbers = true)]
        s_min: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        s_max: Option<f64>,
    },
    /// Write the surface as an OBJ quad mesh.
    Mesh {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        with_normals: bool,
    },
    /// Closed-form forms and curvatures at every grid point.
    Curvature {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Geometric classification of the surface.
    Classify {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Compare the closed forms against the finite-difference oracle.
    Verify {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// Finite-difference step in both directions.
        #[arg(long)]
        h: Option<f64>,
        /// Richardson levels.
        #[arg(long)]
        levels: Option<usize>,
        /// Relative-error threshold for a pass.
        #[arg(long)]
        tol_report: Option<f64>,
        /// Include every grid point's errors in the report.
        #[arg(long)]
        per_point: bool,
    },
}

#[derive(Debug, Args)]
struct IoArgs {
    /// `builtin:NAME` or the path of a curve spec JSON file.
    #[arg(long)]
    curve: String,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Obj,
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct GridArgs {
    #[arg(long, allow_negative_numbers = true)]
    s_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    s_max: Option<f64>,
    #[arg(long, default_value_t = 50)]
    n_s: usize,
    #[arg(long, allow_negative_numbers = true)]
    u_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    u_max: Option<f64>,
    #[arg(long, default_value_t = 50)]
    n_u: usize,
    /// Stitch the mesh along s (closed curves, full period).
    #[arg(long)]
    wrap_s: bool,
    /// Stitch the mesh along u.
    #[arg(long)]
    wrap_u: bool,
}

impl GridArgs {
    fn explicit(&self) -> bool {
        self.s_min.is_some() || self.s_max.is_some() || self.u_min.is_some() || self.u_max.is_some()
    }

    fn build(&self, spec: &CurveSpec) -> Result<GridSpec> {
        let [a, b] = if self.wrap_s {
            spec.domain()
        } else {
            spec.default_window()
        };
        let u = [
            self.u_min.unwrap_or(DEFAULT_U_GUARD),
            self.u_max.unwrap_or(std::f64::consts::TAU - DEFAULT_U_GUARD),
        ];
        let grid = GridSpec::new(
            [self.s_min.unwrap_or(a), self.s_max.unwrap_or(b)],
            self.n_s,
            u,
            self.n_u,
            self.wrap_s,
            self.wrap_u,
        )?;
        grid.check_inside(spec)?;
        Ok(grid)
    }
}

#[derive(Debug, Args)]
struct TolArgs {
    /// Tolerance override `KEY=VALUE`; repeatable.
    #[arg(long = "tol", value_name = "KEY=VALUE")]
    tol: Vec<String>,
}

impl TolArgs {
    fn tolerances(&self) -> Result<Tolerances> {
        let mut t = Tolerances::default();
        for item in &self.tol {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidConfig(format!("--tol expects KEY=VALUE, got {item:?}")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("--tol {k}: {v:?} is not a number")))?;
            t.set(k.trim(), v)?;
        }
        Ok(t)
    }
}

fn check_format(got: Option<Format>, allowed: &[Format]) -> Result<Format> {
    match got {
        None => Ok(allowed[0]),
        Some(f) if allowed.contains(&f) => Ok(f),
        Some(f) => Err(Error::InvalidConfig(format!(
            "format {f:?} is not available here; expected one of {allowed:?}"
        ))),
    }
}

fn write_json<T: Serialize>(value: &T, w: &mut dyn Write) -> Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    writeln!(w)?;
    Ok(())
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    version: u32,
    curve: String,
    pass: bool,
    adjudications: Vec<Adjudication>,
    reports: &'a [VerificationReport],
}

#[derive(Serialize)]
struct MeshSummary<'a> {
    path: Option<&'a std::path::Path>,
    #[serde(flatten)]
    topology: crate::mesh::MeshTopology,
    closed: bool,
}

/// Runs one command. Output goes to `--out` or `stdout`; returns the exit code.
fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<i32> {
    let io_of = |c: &Command| match c {
        Command::Frenet { io, .. }
        | Command::Mesh { io, .. }
        | Command::Curvature { io, .. }
        | Command::Classify { io, .. }
        | Command::Verify { io, .. } => io.out.clone(),
    };
    let out_path = io_of(&cli.command);
    let mut buf: Vec<u8> = Vec::new();
    let out: &mut Vec<u8> = &mut buf;
    let mut summary: Option<Vec<u8>> = None;
    let mut code = EXIT_OK;
    match &cli.command {
        Command::Frenet {
            io,
            samples,
            s_min,
            s_max,
        } => {
            let spec = CurveSpec::resolve(&io.curve)?;
            let fmt = check_format(io.format, &[Format::Csv, Format::Json])?;
            let [a, b] = spec.default_window();
            let data = frenet_samples(&spec, [s_min.unwrap_or(a), s_max.unwrap_or(b)], *samples)?;
            match fmt {
                Format::Json => write_json(&data, out)?,
                _ => write_frenet_csv(&data, out)?,
            }
        }
        Command::Mesh { io, grid, with_normals } => {
            let spec = CurveSpec::resolve(&io.curve)?;
            check_format(io.format, &[Format::Obj])?;
            let g = grid.build(&spec)?;
            let mesh = build_mesh(&spec, &g, *with_normals)?;
            write_obj(&mesh, &mut *out)?;
            if out_path.is_some() {
                let topology = mesh_topology(&mesh);
                let s = MeshSummary {
                    path: out_path.as_deref(),
                    topology,
                    closed: topology.closed(),
                };
                let mut text = Vec::new();
                write_json(&s, &mut text)?;
                summary = Some(text);
            }
        }
        Command::Curvature { io, grid, tol } => {
            let spec = CurveSpec::resolve(&io.curve)?;
            let fmt = check_format(io.format, &[Format::Csv, Format::Json])?;
            let t = tol.tolerances()?;
            let cfg = CurvatureConfig {
                eps_reg: t.eps_reg,
                u_guard: t.u_guard,
            };
            let rows = curvature_rows(&spec, &grid.build(&spec)?, &cfg)?;
            match fmt {
                Format::Json => {
                    let mut buf = Vec::new();
                    write_curvature_csv(&rows, &mut buf)?;
                    let records: Vec<serde_json::Map<String, serde_json::Value>> =
                        csv::Reader::from_reader(buf.as_slice())
                            .deserialize()
                            .map(|r| r.map(json_row))
                            .collect::<std::result::Result<_, _>>()?;
                    write_json(&records, out)?;
                }
                _ => write_curvature_csv(&rows, out)?,
            }
        }
        Command::Classify { io, grid, tol } => {
            let spec = CurveSpec::resolve(&io.curve)?;
            check_format(io.format, &[Format::Json])?;
            let report = classify(&spec, &grid.build(&spec)?, &tol.tolerances()?)?;
            write_json(&report, out)?;
        }
        Command::Verify {
            io,
            grid,
            h,
            levels,
            tol_report,
            per_point,
        } => {
            let spec = CurveSpec::resolve(&io.curve)?;
            check_format(io.format, &[Format::Json])?;
            let mut cfg = OracleConfig::default();
            if let Some(h) = h {
                cfg.h_s = *h;
                cfg.h_u = *h;
            }
            if let Some(l) = levels {
                cfg.levels = *l;
            }
            if let Some(t) = tol_report {
                cfg.tol_report = *t;
            }
            cfg.validate()?;
            let grids = if grid.explicit() || grid.wrap_s || grid.wrap_u {
                vec![grid.build(&spec)?]
            } else {
                verification_grids(&spec, grid.n_s, grid.n_u)?
            };
            let reports: Vec<VerificationReport> = grids
                .iter()
                .map(|g| verify_surface_with(&spec, g, &cfg, *per_point))
                .collect::<Result<_>>()?;
            let pass = reports.iter().all(|r| r.pass);
            let output = VerifyOutput {
                version: REPORT_VERSION,
                curve: spec.kind().name().to_string(),
                pass,
                adjudications: combine_adjudications(&reports),
                reports: &reports,
            };
            write_json(&output, out)?;
            if !pass {
                code = EXIT_VERIFY_FAILED;
            }
        }
    }
    match &out_path {
        Some(p) => {
            let mut f = BufWriter::new(File::create(p)?);
            f.write_all(&buf)?;
            f.flush()?;
        }
        None => stdout.write_all(&buf)?,
    }
    if let Some(text) = summary {
        stdout.write_all(&text)?;
    }
    stdout.flush()?;
    Ok(code)
}

/// Curvature rows as JSON objects; `nan` becomes `null`.
fn json_row(row: std::collections::HashMap<String, String>) -> serde_json::Map<String, serde_json::Value> {
    crate::export::CURVATURE_HEADER
        .iter()
        .map(|&k| {
            let v = row.get(k).and_then(|s| s.parse::<f64>().ok());
            let value = match v {
                Some(x) if x.is_finite() && k == "regular" => serde_json::Value::from(x as u8),
                Some(x) if x.is_finite() => serde_json::Value::from(x),
                _ => serde_json::Value::Null,
            };
            (k.to_string(), value)
        })
        .collect()
}

pub fn run_cli_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    EXIT_INVALID
                }
            };
        }
    };
    match execute(cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_INVALID
        }
    }
}

pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_cli_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("oscsurf").chain(args.iter().copied());
        let code = run_cli_with(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn help_and_usage_errors() {
        assert_eq!(run(&["--help"]).0, 0);
        assert_eq!(run(&[]).0, 1);
        assert_eq!(run(&["frenet"]).0, 1);
        let (code, _, err) = run(&["frenet", "--curve", "builtin:nope"]);
        assert_eq!(code, 1);
        assert!(err.starts_with("error:"));
    }

    #[test]
    fn tolerance_parsing() {
        let t = TolArgs {
            tol: vec!["weingarten=1e-3".into(), " canal = 2e-9".into()],
        }
        .tolerances()
        .unwrap();
        assert_eq!(t.weingarten, 1e-3);
        assert_eq!(t.canal, 2e-9);
        assert!(TolArgs {
            tol: vec!["weingarten".into()]
        }
        .tolerances()
        .is_err());
        assert!(TolArgs {
            tol: vec!["weingarten=x".into()]
        }
        .tolerances()
        .is_err());
    }

    #[test]
    fn wrong_format_is_rejected() {
        let (code, _, err) = run(&["classify", "--curve", "builtin:helix", "--format", "obj"]);
        assert_eq!(code, 1);
        assert!(err.contains("format"));
    }

    #[test]
    fn negative_ranges_parse() {
        let (code, out, _) = run(&[
            "frenet",
            "--curve",
            "builtin:salkowski",
            "--s-min",
            "-1",
            "--s-max",
            "1",
            "--samples",
            "3",
        ]);
        assert_eq!(code, 0);
        assert!(out.lines().nth(1).unwrap().starts_with("-1.0,"));
    }
}
