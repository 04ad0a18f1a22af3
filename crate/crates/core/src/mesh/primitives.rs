use std::f64::consts::{FRAC_PI_2, PI, TAU};

use super::TriMesh;
use crate::error::MeshError;
use crate::geom3d::{Pose, Vec3};

/// Rectangle in the local xy plane, `[-half_x, half_x] × [-half_y, half_y]`.
pub fn quad_mesh(pose: &Pose, half_x: f64, half_y: f64) -> TriMesh {
    let vertices = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]
        .iter()
        .map(|&(sx, sy)| pose.apply(&Vec3::new(sx * half_x, sy * half_y, 0.0)))
        .collect();
    TriMesh { vertices, triangles: vec![[0, 1, 2], [0, 2, 3]] }
}

/// Closed box centred on the pose origin.
pub fn box_mesh(pose: &Pose, half_extents: Vec3) -> TriMesh {
    let mut vertices = Vec::with_capacity(8);
    for i in 0..8 {
        let s = |bit: usize| if i & bit == 0 { -1.0 } else { 1.0 };
        let local = Vec3::new(s(1) * half_extents.x, s(2) * half_extents.y, s(4) * half_extents.z);
        vertices.push(pose.apply(&local));
    }
    // Corner index bits: x = 1, y = 2, z = 4.
    let triangles = vec![
        [0, 2, 3], [0, 3, 1], // -z
        [4, 5, 7], [4, 7, 6], // +z
        [0, 1, 5], [0, 5, 4], // -y
        [2, 6, 7], [2, 7, 3], // +y
        [0, 4, 6], [0, 6, 2], // -x
        [1, 3, 7], [1, 7, 5], // +x
    ];
    TriMesh { vertices, triangles }
}

/// Capped cylinder along the local z axis.
pub fn cylinder_mesh(pose: &Pose, radius: f64, half_height: f64, segments: usize) -> TriMesh {
    let segments = segments.max(3);
    let mut vertices = Vec::with_capacity(2 * segments + 2);
    for &z in &[-half_height, half_height] {
        for j in 0..segments {
            let phi = TAU * j as f64 / segments as f64;
            vertices.push(pose.apply(&Vec3::new(radius * phi.cos(), radius * phi.sin(), z)));
        }
    }
    let bottom = vertices.len() as u32;
    vertices.push(pose.apply(&Vec3::new(0.0, 0.0, -half_height)));
    vertices.push(pose.apply(&Vec3::new(0.0, 0.0, half_height)));
    let top = bottom + 1;
    let n = segments as u32;
    let mut triangles = Vec::with_capacity(4 * segments);
    for j in 0..n {
        let k = (j + 1) % n;
        triangles.push([j, k, n + k]);
        triangles.push([j, n + k, n + j]);
        triangles.push([bottom, k, j]);
        triangles.push([top, n + j, n + k]);
    }
    TriMesh { vertices, triangles }
}

/// Closed capsule (swept sphere) between `a` and `b`. With `a == b` this is
/// a UV sphere. Vertices lie on the exact surface.
pub fn capsule_mesh(a: &Vec3, b: &Vec3, radius: f64, segments: usize, rings: usize) -> Result<TriMesh, MeshError> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(MeshError::Invalid(format!("capsule radius must be positive, got {radius}")));
    }
    let segments = segments.max(3);
    let rings = rings.max(1);
    let axis = b - a;
    let w = axis.try_normalize(1e-12).unwrap_or_else(Vec3::z);
    let helper = if w.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let u = w.cross(&helper).normalize();
    let v = w.cross(&u);

    let mut vertices = vec![b + w * radius];
    // Latitude rings from the top pole to the bottom pole; the equator is
    // emitted twice, once around each end, forming the cylindrical band.
    let mut ring_params: Vec<(f64, Vec3)> = (1..=rings).map(|i| (FRAC_PI_2 * i as f64 / rings as f64, *b)).collect();
    ring_params.extend((0..rings).map(|i| (FRAC_PI_2 + FRAC_PI_2 * i as f64 / rings as f64, *a)));
    for &(theta, center) in &ring_params {
        for j in 0..segments {
            let phi = TAU * j as f64 / segments as f64;
            let dir = (u * phi.cos() + v * phi.sin()) * theta.sin() + w * theta.cos();
            vertices.push(center + dir * radius);
        }
    }
    debug_assert!(ring_params.last().is_some_and(|r| r.0 < PI));
    let bottom_pole = vertices.len() as u32;
    vertices.push(a - w * radius);

    let n = segments as u32;
    let ring_start = |r: usize| 1 + r as u32 * n;
    let mut triangles = Vec::new();
    for j in 0..n {
        let k = (j + 1) % n;
        triangles.push([0, ring_start(0) + j, ring_start(0) + k]);
    }
    for r in 0..ring_params.len() - 1 {
        let (s0, s1) = (ring_start(r), ring_start(r + 1));
        for j in 0..n {
            let k = (j + 1) % n;
            triangles.push([s0 + j, s1 + j, s1 + k]);
            triangles.push([s0 + j, s1 + k, s0 + k]);
        }
    }
    let last = ring_start(ring_params.len() - 1);
    for j in 0..n {
        let k = (j + 1) % n;
        triangles.push([bottom_pole, last + k, last + j]);
    }
    TriMesh::new(vertices, triangles)
}
