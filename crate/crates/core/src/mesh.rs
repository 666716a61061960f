//! Quad meshes of the surface over a parameter grid, OBJ input/output and
//! Euler characteristic.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::curve::{CurveSpec, Vec3};
use crate::error::{Error, Result};
use crate::frenet::frenet_at;
use crate::grid::GridSpec;
use crate::surface::{surface_jet, surface_point, DEFAULT_EPS_REG};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Mesh {
    pub vertices: Vec<Vec3>,
    /// Per-vertex normals; zero vectors mark singular vertices.
    pub normals: Option<Vec<Vec3>>,
    /// Zero-based vertex indices.
    pub faces: Vec<Vec<usize>>,
}

/// Builds the row-major `(s, u)` quad mesh. Vertex `(i, j)` has index
/// `i * n_u + j`; faces wind so that their normal follows `X_s x X_u`.
pub fn build_mesh(spec: &CurveSpec, grid: &GridSpec, with_normals: bool) -> Result<Mesh> {
    grid.validate()?;
    grid.check_inside(spec)?;
    if grid.wrap_s {
        let [a, b] = spec.domain();
        if !spec.closed() {
            return Err(Error::MeshNotClosed("wrap_s needs a closed curve".into()));
        }
        let period = b - a;
        if ((grid.s_max - grid.s_min) - period).abs() > 1e-9 * period.max(1.0) {
            return Err(Error::MeshNotClosed(format!(
                "wrap_s needs the s-range to span the period {period}, got [{}, {}]",
                grid.s_min, grid.s_max
            )));
        }
    }
    let us = grid.u_values();
    let (n_s, n_u) = (grid.n_s, grid.n_u);
    let mut vertices = Vec::with_capacity(n_s * n_u);
    let mut normals = with_normals.then(|| Vec::with_capacity(n_s * n_u));
    for t in grid.s_values() {
        let fd = frenet_at(spec, t)?;
        for &u in &us {
            vertices.push(surface_point(&fd, u));
            if let Some(ns) = normals.as_mut() {
                ns.push(surface_jet(&fd, u, DEFAULT_EPS_REG).normal.unwrap_or_else(Vec3::zeros));
            }
        }
    }
    let rows = if grid.wrap_s { n_s } else { n_s - 1 };
    let cols = if grid.wrap_u { n_u } else { n_u - 1 };
    let idx = |i: usize, j: usize| (i % n_s) * n_u + (j % n_u);
    let mut faces = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            faces.push(vec![idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    Ok(Mesh {
        vertices,
        normals,
        faces,
    })
}

fn fmt(x: f64) -> String {
    format!("{x:?}")
}

pub fn write_obj<W: Write>(mesh: &Mesh, mut w: W) -> Result<()> {
    for v in &mesh.vertices {
        writeln!(w, "v {} {} {}", fmt(v.x), fmt(v.y), fmt(v.z))?;
    }
    if let Some(ns) = &mesh.normals {
        for n in ns {
            writeln!(w, "vn {} {} {}", fmt(n.x), fmt(n.y), fmt(n.z))?;
        }
    }
    let with_normals = mesh.normals.is_some();
    for f in &mesh.faces {
        let items: Vec<String> = f
            .iter()
            .map(|&i| {
                if with_normals {
                    format!("{0}//{0}", i + 1)
                } else {
                    (i + 1).to_string()
                }
            })
            .collect();
        writeln!(w, "f {}", items.join(" "))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads vertices, normals and faces of an OBJ file; other statements are
/// ignored. Negative (relative) indices are resolved.
pub fn read_obj<R: BufRead>(r: R) -> Result<Mesh> {
    let mut mesh = Mesh::default();
    let mut normals = Vec::new();
    for (k, line) in r.lines().enumerate() {
        let line = line?;
        let lineno = k + 1;
        let err = |msg: String| Error::Obj { line: lineno, msg };
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("v") | Some("vn") => {
                let coords: Vec<f64> = parts
                    .take(3)
                    .map(|p| p.parse::<f64>().map_err(|e| err(format!("bad coordinate {p:?}: {e}"))))
                    .collect::<Result<_>>()?;
                if coords.len() != 3 {
                    return Err(err("expected three coordinates".into()));
                }
                let v = Vec3::new(coords[0], coords[1], coords[2]);
                if line.trim_start().starts_with("vn") {
                    normals.push(v);
                } else {
                    mesh.vertices.push(v);
                }
            }
            Some("f") => {
                let n = mesh.vertices.len() as i64;
                let face = parts
                    .map(|p| {
                        let first = p.split('/').next().unwrap_or("");
                        let i: i64 = first.parse().map_err(|_| err(format!("bad face index {p:?}")))?;
                        let resolved = if i < 0 { n + i } else { i - 1 };
                        if i == 0 || resolved < 0 || resolved >= n {
                            return Err(err(format!("face index {i} out of range 1..={n}")));
                        }
                        Ok(resolved as usize)
                    })
                    .collect::<Result<Vec<_>>>()?;
                if face.len() < 3 {
                    return Err(err("face needs at least three vertices".into()));
                }
                mesh.faces.push(face);
            }
            _ => {}
        }
    }
    if !normals.is_empty() {
        mesh.normals = Some(normals);
    }
    Ok(mesh)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct MeshTopology {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    /// Edges used by exactly one face.
    pub boundary_edges: usize,
    pub euler_characteristic: i64,
}

impl MeshTopology {
    pub fn closed(&self) -> bool {
        self.boundary_edges == 0
    }
}

fn edge_counts(mesh: &Mesh) -> HashMap<(usize, usize), usize> {
    let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
    for f in &mesh.faces {
        for k in 0..f.len() {
            let (a, b) = (f[k], f[(k + 1) % f.len()]);
            *edges.entry((a.min(b), a.max(b))).or_default() += 1;
        }
    }
    edges
}

pub fn mesh_topology(mesh: &Mesh) -> MeshTopology {
    let edges = edge_counts(mesh);
    let boundary_edges = edges.values().filter(|&&c| c == 1).count();
    let (v, e, f) = (mesh.vertices.len(), edges.len(), mesh.faces.len());
    MeshTopology {
        vertices: v,
        edges: e,
        faces: f,
        boundary_edges,
        euler_characteristic: v as i64 - e as i64 + f as i64,
    }
}

/// `V - E + F`, whatever the boundary. An unstitched grid patch gives 1.
pub fn mesh_euler_characteristic(mesh: &Mesh) -> i64 {
    mesh_topology(mesh).euler_characteristic
}

/// `V - E + F` of a mesh that must be closed: every edge shared by exactly
/// two faces.
pub fn closed_euler_characteristic(mesh: &Mesh) -> Result<i64> {
    let topo = mesh_topology(mesh);
    if !topo.closed() {
        return Err(Error::MeshNotClosed(format!("{} boundary edges", topo.boundary_edges)));
    }
    let mut shared: Vec<_> = edge_counts(mesh).into_iter().filter(|&(_, c)| c != 2).collect();
    shared.sort_unstable();
    if let Some(((a, b), c)) = shared.first() {
        return Err(Error::MeshNotClosed(format!("edge ({a}, {b}) is shared by {c} faces")));
    }
    Ok(topo.euler_characteristic)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;
    use std::io::Cursor;

    fn cube() -> Mesh {
        let vertices = (0..8)
            .map(|i| Vec3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64))
            .collect();
        let faces = vec![
            vec![0, 2, 3, 1],
            vec![4, 5, 7, 6],
            vec![0, 1, 5, 4],
            vec![2, 6, 7, 3],
            vec![0, 4, 6, 2],
            vec![1, 3, 7, 5],
        ];
        Mesh {
            vertices,
            normals: None,
            faces,
        }
    }

    #[test]
    fn sphere_fixture_has_euler_characteristic_two() {
        assert_eq!(closed_euler_characteristic(&cube()).unwrap(), 2);
    }

    #[test]
    fn helix_patch_counts_and_disk_topology() {
        let spec = CurveSpec::builtin("helix").unwrap();
        let grid = GridSpec::for_curve(&spec, 100, 100).unwrap();
        let mesh = build_mesh(&spec, &grid, false).unwrap();
        assert_eq!(mesh.vertices.len(), 10_000);
        assert_eq!(mesh.faces.len(), 99 * 99);
        assert_eq!(mesh_euler_characteristic(&mesh), 1);
        assert!(matches!(
            closed_euler_characteristic(&mesh),
            Err(Error::MeshNotClosed(_))
        ));
    }

    #[test]
    fn torus_loop_closed_mesh() {
        let spec = CurveSpec::builtin("torus_loop").unwrap();
        let grid = GridSpec::new([0.0, TAU], 40, [1e-3, TAU - 1e-3], 24, true, true).unwrap();
        let mesh = build_mesh(&spec, &grid, true).unwrap();
        assert_eq!(closed_euler_characteristic(&mesh).unwrap(), 0);
        assert_eq!(mesh.normals.as_ref().unwrap().len(), 40 * 24);
    }

    #[test]
    fn wrap_s_requires_closed_curve_and_full_period() {
        let helix = CurveSpec::builtin("helix").unwrap();
        let [a, b] = helix.domain();
        let grid = GridSpec::new([a, b], 10, [1e-3, TAU - 1e-3], 10, true, false).unwrap();
        assert!(matches!(build_mesh(&helix, &grid, false), Err(Error::MeshNotClosed(_))));
        let torus = CurveSpec::builtin("torus_loop").unwrap();
        let grid = GridSpec::new([0.0, 3.0], 10, [1e-3, TAU - 1e-3], 10, true, false).unwrap();
        assert!(matches!(build_mesh(&torus, &grid, false), Err(Error::MeshNotClosed(_))));
    }

    #[test]
    fn obj_round_trip() {
        let spec = CurveSpec::builtin("cubic").unwrap();
        let grid = GridSpec::for_curve(&spec, 7, 9).unwrap();
        for with_normals in [false, true] {
            let mesh = build_mesh(&spec, &grid, with_normals).unwrap();
            let mut buf = Vec::new();
            write_obj(&mesh, &mut buf).unwrap();
            let back = read_obj(Cursor::new(buf)).unwrap();
            assert_eq!(back, mesh);
        }
    }

    #[test]
    fn obj_errors_and_relative_indices() {
        let text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf -3 -2 -1\n";
        let m = read_obj(Cursor::new(text)).unwrap();
        assert_eq!(m.faces, vec![vec![0, 1, 2]]);
        let bad = "v 0 0 0\nf 1 2 3\n";
        assert!(matches!(read_obj(Cursor::new(bad)), Err(Error::Obj { line: 2, .. })));
        let bad = "v 0 zero 0\n";
        assert!(matches!(read_obj(Cursor::new(bad)), Err(Error::Obj { line: 1, .. })));
    }
}
