//! Triangle meshes, a median-split BVH and segment any-hit queries.
//!
//! Occlusion only needs to know whether *something* blocks a line of sight,
//! so all queries are any-hit and triangles are two-sided.

mod bvh;
mod obj;
mod primitives;

pub use bvh::{segment_hits, segment_hits_any, segment_hits_bruteforce, Aabb, Bvh};
pub use obj::{load_obj, parse_obj};
pub use primitives::{box_mesh, capsule_mesh, cylinder_mesh, quad_mesh};

use crate::error::MeshError;
use crate::geom3d::{Pose, Vec3};

/// Default endpoint shrink, as a fraction of segment length.
pub const DEFAULT_SEGMENT_EPS: f64 = 1e-4;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TriMesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[u32; 3]>,
}

impl TriMesh {
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[u32; 3]>) -> Result<Self, MeshError> {
        let mesh = TriMesh { vertices, triangles };
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<(), MeshError> {
        if let Some(i) = self.vertices.iter().position(|v| !v.iter().all(|c| c.is_finite())) {
            return Err(MeshError::Invalid(format!("vertex {i} has non-finite coordinates")));
        }
        let n = self.vertices.len();
        for (ti, tri) in self.triangles.iter().enumerate() {
            if let Some(&bad) = tri.iter().find(|&&idx| idx as usize >= n) {
                return Err(MeshError::Invalid(format!(
                    "triangle {ti} references vertex {bad} but mesh has {n} vertices"
                )));
            }
        }
        Ok(())
    }

    pub fn triangle(&self, i: usize) -> [Vec3; 3] {
        let [a, b, c] = self.triangles[i];
        [self.vertices[a as usize], self.vertices[b as usize], self.vertices[c as usize]]
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    /// Appends `other`, re-indexing its triangles.
    pub fn merge(&mut self, other: &TriMesh) {
        let offset = self.vertices.len() as u32;
        self.vertices.extend_from_slice(&other.vertices);
        self.triangles
            .extend(other.triangles.iter().map(|t| [t[0] + offset, t[1] + offset, t[2] + offset]));
    }

    pub fn transformed(&self, pose: &Pose) -> TriMesh {
        TriMesh {
            vertices: self.vertices.iter().map(|v| pose.apply(v)).collect(),
            triangles: self.triangles.clone(),
        }
    }

    pub fn aabb(&self) -> Option<Aabb> {
        let mut it = self.vertices.iter();
        let first = it.next()?;
        Some(it.fold(Aabb::point(first), |bb, v| bb.grown(v)))
    }
}

/// Line-of-sight segment from `a` to `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Vec3,
    pub b: Vec3,
}

impl Segment {
    pub fn new(a: Vec3, b: Vec3) -> Self {
        Segment { a, b }
    }

    pub fn direction(&self) -> Vec3 {
        self.b - self.a
    }
}

/// Two-sided watertight segment/triangle test (Woop, Benthin and Wald's
/// shear-and-scale formulation). `t` is measured along `dir`, so a
/// segment `a + t (b - a)` hits iff the crossing has `t ∈ [t_min, t_max]`.
pub(crate) fn segment_triangle_hit(
    origin: &Vec3,
    shear: &Shear,
    tri: &[Vec3; 3],
    t_min: f64,
    t_max: f64,
) -> bool {
    let Shear { kx, ky, kz, sx, sy, sz } = *shear;
    let a = tri[0] - origin;
    let b = tri[1] - origin;
    let c = tri[2] - origin;
    let ax = a[kx] - sx * a[kz];
    let ay = a[ky] - sy * a[kz];
    let bx = b[kx] - sx * b[kz];
    let by = b[ky] - sy * b[kz];
    let cx = c[kx] - sx * c[kz];
    let cy = c[ky] - sy * c[kz];
    let u = cx * by - cy * bx;
    let v = ax * cy - ay * cx;
    let w = bx * ay - by * ax;
    if (u < 0.0 || v < 0.0 || w < 0.0) && (u > 0.0 || v > 0.0 || w > 0.0) {
        return false;
    }
    let det = u + v + w;
    if det == 0.0 {
        return false;
    }
    let t_scaled = u * (sz * a[kz]) + v * (sz * b[kz]) + w * (sz * c[kz]);
    // Compare t = t_scaled / det against the range without dividing.
    if det > 0.0 {
        t_scaled >= t_min * det && t_scaled <= t_max * det
    } else {
        t_scaled <= t_min * det && t_scaled >= t_max * det
    }
}

/// Per-direction constants for the watertight test.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Shear {
    kx: usize,
    ky: usize,
    kz: usize,
    sx: f64,
    sy: f64,
    sz: f64,
}

impl Shear {
    /// `None` for a zero direction.
    pub(crate) fn new(dir: &Vec3) -> Option<Self> {
        let kz = dir.iamax();
        if dir[kz] == 0.0 {
            return None;
        }
        let mut kx = (kz + 1) % 3;
        let mut ky = (kx + 1) % 3;
        if dir[kz] < 0.0 {
            std::mem::swap(&mut kx, &mut ky);
        }
        Some(Shear { kx, ky, kz, sx: dir[kx] / dir[kz], sy: dir[ky] / dir[kz], sz: 1.0 / dir[kz] })
    }
}
