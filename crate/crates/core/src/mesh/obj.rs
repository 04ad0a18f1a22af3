//! Minimal Wavefront OBJ reader: `v` and `f` records only.

use std::io::BufRead;
use std::path::Path;

use super::TriMesh;
use crate::error::MeshError;
use crate::geom3d::Vec3;

pub fn load_obj(path: impl AsRef<Path>) -> Result<TriMesh, MeshError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| MeshError::Io { path: path.to_owned(), source })?;
    parse_obj(std::io::BufReader::new(file), path)
}

/// Parses OBJ text. Polygons are fan-triangulated around their first
/// vertex; normals, texture coordinates and materials are ignored.
pub fn parse_obj(reader: impl BufRead, path: &Path) -> Result<TriMesh, MeshError> {
    let err = |line: usize, msg: String| MeshError::Parse { path: path.to_owned(), line, msg };
    let mut mesh = TriMesh::empty();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|source| MeshError::Io { path: path.to_owned(), source })?;
        let line = line.split('#').next().unwrap_or("");
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let coords: Vec<f64> = tokens
                    .take(3)
                    .map(|t| t.parse::<f64>().map_err(|_| err(lineno, format!("bad vertex coordinate {t:?}"))))
                    .collect::<Result<_, _>>()?;
                if coords.len() != 3 {
                    return Err(err(lineno, "vertex needs three coordinates".into()));
                }
                if coords.iter().any(|c| !c.is_finite()) {
                    return Err(err(lineno, "non-finite vertex coordinate".into()));
                }
                mesh.vertices.push(Vec3::new(coords[0], coords[1], coords[2]));
            }
            Some("f") => {
                let n = mesh.vertices.len();
                let idx: Vec<u32> = tokens
                    .map(|t| resolve_index(t, n).map_err(|msg| err(lineno, msg)))
                    .collect::<Result<_, _>>()?;
                if idx.len() < 3 {
                    return Err(err(lineno, format!("face needs at least 3 vertices, got {}", idx.len())));
                }
                for k in 1..idx.len() - 1 {
                    mesh.triangles.push([idx[0], idx[k], idx[k + 1]]);
                }
            }
            _ => {}
        }
    }
    Ok(mesh)
}

/// 1-based (or negative, relative) OBJ index to a 0-based vertex index.
fn resolve_index(token: &str, n_vertices: usize) -> Result<u32, String> {
    let head = token.split('/').next().unwrap_or("");
    let raw: i64 = head.parse().map_err(|_| format!("bad face index {token:?}"))?;
    let resolved = if raw > 0 { raw - 1 } else { n_vertices as i64 + raw };
    if raw == 0 || resolved < 0 || resolved >= n_vertices as i64 {
        return Err(format!("face index {raw} out of range (have {n_vertices} vertices)"));
    }
    Ok(resolved as u32)
}
