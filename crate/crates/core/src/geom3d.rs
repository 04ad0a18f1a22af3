//! Rigid poses, rotation representations and pinhole projection.
//!
//! Poses are camera-to-world (or body-to-world): a pose `(R, t)` maps a point
//! expressed in the local frame to `R p + t` in the world frame.

use nalgebra::{Matrix3, Quaternion, Unit, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::GeomError;

pub type Vec3 = Vector3<f64>;

const ROT6D_MIN_NORM: f64 = 1e-9;
const PROJECTION_EPS: f64 = 1e-12;

/// A rotation stored as a unit quaternion with non-negative scalar part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation(UnitQuaternion<f64>);

impl Rotation {
    pub fn identity() -> Self {
        Rotation(UnitQuaternion::identity())
    }

    pub fn from_unit_quaternion(q: UnitQuaternion<f64>) -> Self {
        if q.w < 0.0 {
            Rotation(Unit::new_unchecked(-q.into_inner()))
        } else {
            Rotation(q)
        }
    }

    /// Builds a rotation from `(w, x, y, z)`, normalizing the input.
    pub fn from_wxyz(wxyz: [f64; 4]) -> Result<Self, GeomError> {
        let q = Quaternion::new(wxyz[0], wxyz[1], wxyz[2], wxyz[3]);
        let n = q.norm();
        if !n.is_finite() || n < ROT6D_MIN_NORM {
            return Err(GeomError::InvalidRotation("quaternion has zero or non-finite norm"));
        }
        Ok(Self::from_unit_quaternion(UnitQuaternion::from_quaternion(q)))
    }

    /// Rotation by `angle` radians about `axis` (need not be unit length).
    pub fn from_axis_angle(axis: &Vec3, angle: f64) -> Self {
        match Unit::try_new(*axis, 1e-15) {
            Some(a) => Self::from_unit_quaternion(UnitQuaternion::from_axis_angle(&a, angle)),
            None => Self::identity(),
        }
    }

    /// Exponential map of a rotation vector (axis times angle).
    pub fn from_scaled_axis(v: &Vec3) -> Self {
        Self::from_unit_quaternion(UnitQuaternion::from_scaled_axis(*v))
    }

    /// Rotation from a matrix assumed orthonormal with det +1.
    pub fn from_matrix(m: &Matrix3<f64>) -> Self {
        let rot = nalgebra::Rotation3::from_matrix_unchecked(*m);
        Self::from_unit_quaternion(UnitQuaternion::from_rotation_matrix(&rot))
    }

    pub fn quaternion(&self) -> &UnitQuaternion<f64> {
        &self.0
    }

    pub fn wxyz(&self) -> [f64; 4] {
        let q = self.0.quaternion();
        [q.w, q.i, q.j, q.k]
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        self.0.to_rotation_matrix().into_inner()
    }

    /// The first two columns of the rotation matrix, column-major.
    pub fn to_rot6d(&self) -> [f64; 6] {
        let m = self.matrix();
        [m[(0, 0)], m[(1, 0)], m[(2, 0)], m[(0, 1)], m[(1, 1)], m[(2, 1)]]
    }

    pub fn inverse(&self) -> Self {
        Self::from_unit_quaternion(self.0.inverse())
    }

    pub fn compose(&self, other: &Rotation) -> Self {
        Self::from_unit_quaternion(self.0 * other.0)
    }

    pub fn rotate(&self, v: &Vec3) -> Vec3 {
        self.0 * v
    }

    pub fn inverse_rotate(&self, v: &Vec3) -> Vec3 {
        self.0.inverse_transform_vector(v)
    }

    /// Geodesic interpolation, `s = 0` gives `self`.
    pub fn slerp(&self, other: &Rotation, s: f64) -> Self {
        match self.0.try_slerp(&other.0, s, 1e-12) {
            Some(q) => Self::from_unit_quaternion(q),
            // Antipodal: either path is a valid geodesic.
            None => Self::from_unit_quaternion(self.0.nlerp(&other.0, s)),
        }
    }

    /// Rotation whose local +z axis points along `forward` with local -y
    /// as close to `up` as possible (computer-vision camera convention:
    /// x right, y down, z forward).
    pub fn look_along(forward: &Vec3, up: &Vec3) -> Result<Self, GeomError> {
        let z = forward
            .try_normalize(ROT6D_MIN_NORM)
            .ok_or(GeomError::InvalidRotation("zero look direction"))?;
        let x = z
            .cross(up)
            .try_normalize(ROT6D_MIN_NORM)
            .or_else(|| z.cross(&Vec3::x()).try_normalize(ROT6D_MIN_NORM))
            .ok_or(GeomError::InvalidRotation("look direction parallel to up"))?;
        let y = z.cross(&x);
        Ok(Self::from_matrix(&Matrix3::from_columns(&[x, y, z])))
    }

    pub fn angle_to(&self, other: &Rotation) -> f64 {
        self.0.angle_to(&other.0)
    }
}

impl Default for Rotation {
    fn default() -> Self {
        Self::identity()
    }
}

/// Orthonormalizes two 3-vectors (Gram–Schmidt) into a rotation whose first
/// two columns span them; the third column is their cross product.
pub fn rot6d_to_rotation(six: &[f64]) -> Result<Rotation, GeomError> {
    if six.len() != 6 {
        return Err(GeomError::InvalidRotation("6D representation needs 6 values"));
    }
    if six.iter().any(|v| !v.is_finite()) {
        return Err(GeomError::InvalidRotation("non-finite 6D representation"));
    }
    let a = Vec3::new(six[0], six[1], six[2]);
    let b = Vec3::new(six[3], six[4], six[5]);
    let c1 = a
        .try_normalize(ROT6D_MIN_NORM)
        .ok_or(GeomError::InvalidRotation("first 6D column is zero"))?;
    let c2 = (b - c1 * c1.dot(&b))
        .try_normalize(ROT6D_MIN_NORM)
        .ok_or(GeomError::InvalidRotation("6D columns are parallel"))?;
    let c3 = c1.cross(&c2);
    Ok(Rotation::from_matrix(&Matrix3::from_columns(&[c1, c2, c3])))
}

/// A rigid transform from a local frame to the world frame.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Pose {
    pub position: Vec3,
    pub rotation: Rotation,
}

impl Pose {
    pub fn new(position: Vec3, rotation: Rotation) -> Self {
        Pose { position, rotation }
    }

    pub fn identity() -> Self {
        Self::default()
    }

    pub fn from_translation(position: Vec3) -> Self {
        Pose { position, rotation: Rotation::identity() }
    }

    /// Camera pose at `eye` looking at `target`, image "up" towards `up`.
    pub fn look_at(eye: Vec3, target: Vec3, up: Vec3) -> Result<Self, GeomError> {
        Ok(Pose { position: eye, rotation: Rotation::look_along(&(target - eye), &up)? })
    }

    pub fn inverse(&self) -> Pose {
        let rinv = self.rotation.inverse();
        Pose { position: -rinv.rotate(&self.position), rotation: rinv }
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &Pose) -> Pose {
        Pose {
            position: self.rotation.rotate(&other.position) + self.position,
            rotation: self.rotation.compose(&other.rotation),
        }
    }

    /// Local-frame point to world frame.
    pub fn apply(&self, p_local: &Vec3) -> Vec3 {
        self.rotation.rotate(p_local) + self.position
    }

    /// Flattened `[x, y, z, r6d...]` encoding used by the diffusion sampler.
    pub fn to_vec9(&self) -> [f64; 9] {
        let r = self.rotation.to_rot6d();
        [
            self.position.x,
            self.position.y,
            self.position.z,
            r[0],
            r[1],
            r[2],
            r[3],
            r[4],
            r[5],
        ]
    }
}

/// World-frame point to the pose's local (camera) frame: `R^T (p - t)`.
pub fn transform_point(pose: &Pose, p_world: &Vec3) -> Vec3 {
    pose.rotation.inverse_rotate(&(p_world - pose.position))
}

/// Local (camera) frame point back to the world frame.
pub fn transform_point_inverse(pose: &Pose, p_cam: &Vec3) -> Vec3 {
    pose.apply(p_cam)
}

/// Pinhole intrinsics in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraIntrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: u32,
    pub height: u32,
}

impl CameraIntrinsics {
    pub fn new(fx: f64, fy: f64, cx: f64, cy: f64, width: u32, height: u32) -> Result<Self, GeomError> {
        let intr = CameraIntrinsics { fx, fy, cx, cy, width, height };
        intr.validate()?;
        Ok(intr)
    }

    /// Symmetric intrinsics from a horizontal field of view in radians.
    pub fn from_hfov(hfov: f64, width: u32, height: u32) -> Result<Self, GeomError> {
        let f = 0.5 * width as f64 / (0.5 * hfov).tan();
        Self::new(f, f, 0.5 * width as f64, 0.5 * height as f64, width, height)
    }

    pub fn validate(&self) -> Result<(), GeomError> {
        let ok = self.fx.is_finite()
            && self.fy.is_finite()
            && self.fx > 0.0
            && self.fy > 0.0
            && self.width > 0
            && self.height > 0
            && self.cx >= 0.0
            && self.cx < self.width as f64
            && self.cy >= 0.0
            && self.cy < self.height as f64;
        if ok {
            Ok(())
        } else {
            Err(GeomError::InvalidIntrinsics(*self))
        }
    }

    /// Camera-frame point at `depth` whose projection is `(u, v)`.
    pub fn unproject(&self, u: f64, v: f64, depth: f64) -> Vec3 {
        Vec3::new((u - self.cx) / self.fx * depth, (v - self.cy) / self.fy * depth, depth)
    }
}

/// Pixel coordinates plus camera-frame depth (may be negative).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    pub u: f64,
    pub v: f64,
    pub depth: f64,
}

/// Projects a world point through a camera-to-world pose. Returns `None`
/// when the point lies on the camera plane (|z| ≤ 1e-12).
pub fn project(intr: &CameraIntrinsics, pose: &Pose, q: &Vec3) -> Option<Projection> {
    project_camera_frame(intr, &transform_point(pose, q))
}

pub fn project_camera_frame(intr: &CameraIntrinsics, p: &Vec3) -> Option<Projection> {
    if p.z.abs() <= PROJECTION_EPS {
        return None;
    }
    Some(Projection { u: intr.fx * p.x / p.z + intr.cx, v: intr.fy * p.y / p.z + intr.cy, depth: p.z })
}

/// In-image test with half-open pixel bounds; points at or behind the
/// camera plane are never in view.
pub fn in_fov(intr: &CameraIntrinsics, u: f64, v: f64, depth: f64) -> bool {
    depth > 0.0 && u >= 0.0 && u < intr.width as f64 && v >= 0.0 && v < intr.height as f64
}

/// `in_fov ∘ project`, with degenerate projections treated as out of view.
pub fn point_in_fov(intr: &CameraIntrinsics, pose: &Pose, q: &Vec3) -> bool {
    project(intr, pose, q).is_some_and(|p| in_fov(intr, p.u, p.v, p.depth))
}
