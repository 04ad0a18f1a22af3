//! Scripted stand-ins for the robot policy and the flow predictor.

use serde::{Deserialize, Serialize};

use super::PoseSpec;
use crate::error::{MeshError, SimError};
use crate::geom3d::{rot6d_to_rotation, Pose, Rotation, Vec3};
use crate::mesh::{capsule_mesh, Bvh};
use crate::reward::QueryPointSet;

/// Robot proprioception: position (3), 6D rotation (6), gripper bit (1).
pub type ActionVec = [f64; 10];

pub fn action_position(a: &ActionVec) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

pub fn action_pose(a: &ActionVec) -> Pose {
    let rotation = rot6d_to_rotation(&a[3..9]).unwrap_or_default();
    Pose::new(action_position(a), rotation)
}

/// Outputs the next `horizon` actions `p_{t+1..t+horizon}`. Histories are
/// passed for interface parity with a learned policy.
pub trait RobotPolicy: Sync {
    fn action_chunk(&self, t: usize, horizon: usize, history: &[ActionVec]) -> Vec<ActionVec>;
    /// Proprioception at step `t`.
    fn state(&self, t: usize) -> ActionVec;
}

/// Predicts query points for steps `t+1..t+horizon`.
pub trait FlowModel: Sync {
    fn future_flow(&self, t: usize, horizon: usize, history: &[Vec<Vec3>]) -> QueryPointSet;
    /// Points at step `t`.
    fn points(&self, t: usize) -> Vec<Vec3>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Waypoint {
    pub t: usize,
    pub position: [f64; 3],
    /// Unit quaternion `[w, x, y, z]`.
    #[serde(default = "identity_wxyz")]
    pub rotation: [f64; 4],
    #[serde(default)]
    pub gripper: u8,
}

fn identity_wxyz() -> [f64; 4] {
    [1.0, 0.0, 0.0, 0.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EEScriptSpec {
    pub waypoints: Vec<Waypoint>,
}

/// End-effector trajectory through named waypoints: linear in position,
/// spherical in rotation, gripper held from the earlier waypoint.
#[derive(Debug, Clone, PartialEq)]
pub struct EEScript {
    pub waypoints: Vec<Waypoint>,
    /// Last step of the episode; later requests clamp to it.
    pub episode_length: usize,
}

impl EEScript {
    pub fn new(waypoints: Vec<Waypoint>, episode_length: usize) -> Result<Self, SimError> {
        let s = EEScript { waypoints, episode_length };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.waypoints.is_empty() {
            return Err(SimError::Scene("ee_script needs at least one waypoint".into()));
        }
        for w in self.waypoints.windows(2) {
            if w[1].t <= w[0].t {
                return Err(SimError::Scene(format!("waypoint steps must increase, got {} then {}", w[0].t, w[1].t)));
            }
        }
        for w in &self.waypoints {
            if w.gripper > 1 {
                return Err(SimError::Scene(format!("gripper must be 0 or 1, got {}", w.gripper)));
            }
            Rotation::from_wxyz(w.rotation)?;
        }
        Ok(())
    }

    /// Proprioception at step `t`, clamped to `[0, episode_length]`.
    pub fn at(&self, t: usize) -> ActionVec {
        let t = t.min(self.episode_length);
        let wps = &self.waypoints;
        let idx = wps.partition_point(|w| w.t <= t);
        let (pos, rot, grip) = if idx == 0 {
            let w = &wps[0];
            (Vec3::from(w.position), Rotation::from_wxyz(w.rotation).unwrap(), w.gripper)
        } else if idx == wps.len() {
            let w = &wps[idx - 1];
            (Vec3::from(w.position), Rotation::from_wxyz(w.rotation).unwrap(), w.gripper)
        } else {
            let (a, b) = (&wps[idx - 1], &wps[idx]);
            let s = (t - a.t) as f64 / (b.t - a.t) as f64;
            let pa = Vec3::from(a.position);
            let pb = Vec3::from(b.position);
            let ra = Rotation::from_wxyz(a.rotation).unwrap();
            let rb = Rotation::from_wxyz(b.rotation).unwrap();
            (pa + (pb - pa) * s, ra.slerp(&rb, s), a.gripper)
        };
        let six = rot.to_rot6d();
        [pos.x, pos.y, pos.z, six[0], six[1], six[2], six[3], six[4], six[5], grip as f64]
    }

    pub fn pose_at(&self, t: usize) -> Pose {
        action_pose(&self.at(t))
    }
}

/// `p_{t+1..t+horizon}` with clamping past the episode end.
pub fn get_action_chunk(script: &EEScript, t: usize, horizon: usize) -> Vec<ActionVec> {
    (t + 1..=t + horizon).map(|s| script.at(s)).collect()
}

impl RobotPolicy for EEScript {
    fn action_chunk(&self, t: usize, horizon: usize, _history: &[ActionVec]) -> Vec<ActionVec> {
        get_action_chunk(self, t, horizon)
    }

    fn state(&self, t: usize) -> ActionVec {
        self.at(t)
    }
}

/// Points fixed to a rigid object that rests at `object_pose` until
/// `grasp_step` and then moves rigidly with the end effector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowScriptSpec {
    pub object_pose: PoseSpec,
    /// Query points in the object frame.
    pub points: Vec<[f64; 3]>,
    pub grasp_step: usize,
}

#[derive(Debug, Clone)]
pub struct FlowScript {
    local: Vec<Vec3>,
    object: Pose,
    grasp_step: usize,
    /// Object pose relative to the end effector at the grasp.
    grip: Pose,
    ee: EEScript,
}

impl FlowScript {
    pub fn new(spec: &FlowScriptSpec, ee: &EEScript) -> Result<Self, SimError> {
        if spec.points.is_empty() {
            return Err(SimError::Scene("flow_script needs at least one point".into()));
        }
        let object = spec.object_pose.to_pose()?;
        let grip = ee.pose_at(spec.grasp_step).inverse().compose(&object);
        Ok(FlowScript {
            local: spec.points.iter().map(|p| Vec3::from(*p)).collect(),
            object,
            grasp_step: spec.grasp_step,
            grip,
            ee: ee.clone(),
        })
    }

    pub fn num_points(&self) -> usize {
        self.local.len()
    }

    /// Object pose at step `t`, clamped to the episode.
    pub fn object_pose(&self, t: usize) -> Pose {
        let t = t.min(self.ee.episode_length);
        if t < self.grasp_step {
            self.object
        } else {
            self.ee.pose_at(t).compose(&self.grip)
        }
    }

    pub fn points_at(&self, t: usize) -> Vec<Vec3> {
        let pose = self.object_pose(t);
        self.local.iter().map(|p| pose.apply(p)).collect()
    }
}

/// `q[t+1..t+horizon]`, all valid, clamped past the episode end.
pub fn get_future_flow(flow: &FlowScript, t: usize, horizon: usize) -> QueryPointSet {
    QueryPointSet::new((t + 1..=t + horizon).map(|s| flow.points_at(s)).collect())
        .expect("every step has the same number of points")
}

impl FlowModel for FlowScript {
    fn future_flow(&self, t: usize, horizon: usize, _history: &[Vec<Vec3>]) -> QueryPointSet {
        get_future_flow(self, t, horizon)
    }

    fn points(&self, t: usize) -> Vec<Vec3> {
        self.points_at(t)
    }
}

/// A single capsule from a fixed base to the end effector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RobotProxy {
    pub base: [f64; 3],
    pub radius: f64,
    pub segments: usize,
    pub rings: usize,
}

impl Default for RobotProxy {
    fn default() -> Self {
        RobotProxy { base: [1.0, 0.0, 0.4], radius: 0.04, segments: 12, rings: 3 }
    }
}

impl RobotProxy {
    pub fn validate(&self) -> Result<(), MeshError> {
        if !(self.radius > 0.0) {
            return Err(MeshError::Invalid(format!("capsule radius must be positive, got {}", self.radius)));
        }
        Ok(())
    }
}

/// One capsule mesh per action, from the base to the action's position.
pub fn build_robot_meshes(proxy: &RobotProxy, actions: &[ActionVec]) -> Result<Vec<Bvh>, MeshError> {
    proxy.validate()?;
    let base = Vec3::from(proxy.base);
    actions
        .iter()
        .map(|a| capsule_mesh(&base, &action_position(a), proxy.radius, proxy.segments, proxy.rings).map(Bvh::build))
        .collect()
}
