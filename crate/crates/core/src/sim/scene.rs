//! Authored scenes: environment meshes, camera and episode bounds.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::script::RobotProxy;
use crate::error::SimError;
use crate::geom3d::{CameraIntrinsics, Pose, Rotation, Vec3};
use crate::mesh::{box_mesh, cylinder_mesh, load_obj, quad_mesh, Aabb, Bvh, TriMesh};

/// A pose given either by a quaternion or by a look-at target (world `+z`
/// up). With neither, the rotation is the identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoseSpec {
    pub position: [f64; 3],
    /// Unit quaternion `[w, x, y, z]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub look_at: Option<[f64; 3]>,
}

impl PoseSpec {
    pub fn at(position: [f64; 3]) -> Self {
        PoseSpec { position, rotation: None, look_at: None }
    }

    pub fn looking(position: [f64; 3], target: [f64; 3]) -> Self {
        PoseSpec { position, rotation: None, look_at: Some(target) }
    }

    pub fn to_pose(&self) -> Result<Pose, SimError> {
        let eye = Vec3::from(self.position);
        match (self.rotation, self.look_at) {
            (Some(_), Some(_)) => Err(SimError::Scene("pose has both rotation and look_at".into())),
            (Some(q), None) => Ok(Pose::new(eye, Rotation::from_wxyz(q)?)),
            (None, Some(target)) => Ok(Pose::look_at(eye, Vec3::from(target), Vec3::z())?),
            (None, None) => Ok(Pose::from_translation(eye)),
        }
    }
}

fn default_segments() -> usize {
    16
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeshSpec {
    Box {
        pose: PoseSpec,
        half_extents: [f64; 3],
    },
    /// Rectangle in the local xy plane.
    Quad {
        pose: PoseSpec,
        half_x: f64,
        half_y: f64,
    },
    /// Capped cylinder along the local z axis.
    Cylinder {
        pose: PoseSpec,
        radius: f64,
        half_height: f64,
        #[serde(default = "default_segments")]
        segments: usize,
    },
    /// Triangulated OBJ file; relative paths resolve against the config's
    /// directory.
    Obj {
        path: PathBuf,
        pose: PoseSpec,
    },
}

impl MeshSpec {
    pub fn build(&self, base_dir: Option<&Path>) -> Result<TriMesh, SimError> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 {
                Ok(())
            } else {
                Err(SimError::Scene(format!("{name} must be positive, got {v}")))
            }
        };
        Ok(match self {
            MeshSpec::Box { pose, half_extents } => {
                for h in half_extents {
                    positive("box half extent", *h)?;
                }
                box_mesh(&pose.to_pose()?, Vec3::from(*half_extents))
            }
            MeshSpec::Quad { pose, half_x, half_y } => {
                positive("quad half_x", *half_x)?;
                positive("quad half_y", *half_y)?;
                quad_mesh(&pose.to_pose()?, *half_x, *half_y)
            }
            MeshSpec::Cylinder { pose, radius, half_height, segments } => {
                positive("cylinder radius", *radius)?;
                positive("cylinder half_height", *half_height)?;
                if *segments < 3 {
                    return Err(SimError::Scene(format!("cylinder needs at least 3 segments, got {segments}")));
                }
                cylinder_mesh(&pose.to_pose()?, *radius, *half_height, *segments)
            }
            MeshSpec::Obj { path, pose } => {
                let full = match base_dir {
                    Some(dir) if path.is_relative() => dir.join(path),
                    _ => path.clone(),
                };
                load_obj(&full)?.transformed(&pose.to_pose()?)
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bounds {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl Bounds {
    pub fn aabb(&self) -> Aabb {
        Aabb { min: Vec3::from(self.min), max: Vec3::from(self.max) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneSpec {
    pub meshes: Vec<MeshSpec>,
    pub intrinsics: CameraIntrinsics,
    pub initial_camera: PoseSpec,
    pub episode_length: usize,
    pub bounds: Bounds,
    #[serde(default)]
    pub robot: RobotProxy,
}

/// A built scene, ready for raycasting.
#[derive(Debug, Clone)]
pub struct World {
    /// One BVH per environment mesh.
    pub env: Vec<Bvh>,
    pub intrinsics: CameraIntrinsics,
    pub initial_camera: Pose,
    pub episode_length: usize,
    pub bounds: Aabb,
    pub robot: RobotProxy,
}

impl World {
    pub fn build(spec: &SceneSpec, base_dir: Option<&Path>) -> Result<Self, SimError> {
        spec.intrinsics.validate()?;
        spec.robot.validate()?;
        if spec.episode_length == 0 {
            return Err(SimError::Scene("episode_length must be at least 1".into()));
        }
        let bounds = spec.bounds.aabb();
        let mut env = Vec::with_capacity(spec.meshes.len());
        for (i, m) in spec.meshes.iter().enumerate() {
            let mesh = m.build(base_dir)?;
            if let Some(b) = mesh.aabb() {
                if !bounds.contains(&b) {
                    return Err(SimError::Scene(format!("mesh {i} extends outside the scene bounds")));
                }
            }
            env.push(Bvh::build(mesh));
        }
        Ok(World {
            env,
            intrinsics: spec.intrinsics,
            initial_camera: spec.initial_camera.to_pose()?,
            episode_length: spec.episode_length,
            bounds,
            robot: spec.robot,
        })
    }
}
