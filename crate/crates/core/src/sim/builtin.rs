//! Built-in scenarios.
//!
//! The occluder benchmark is a tabletop pick-and-place: an object with six
//! query points starts on one side of a divider wall, is grasped, lifted
//! over the wall and set down on the other side. The robot arm is a capsule
//! from a base behind the table. The operator-side demonstrations stand
//! on the near side of the table at varying heights; a pillar and two
//! posts on that side, together with the divider, block a large part of
//! the prior's viewpoints for at least one phase of the task.

use super::{
    Bounds, CoverageSpec, EEScriptSpec, FlowScriptSpec, MeshSpec, PlannerSpec, PoseSpec, RobotProxy, Scenario,
    SceneSpec, SeedSpec, ViewGridSpec, ViewPriorSpec, Waypoint,
};
use crate::geom3d::CameraIntrinsics;
use crate::reward::RewardConfig;

/// Gripper pointing straight down: 180° about x.
const DOWN: [f64; 4] = [0.0, 1.0, 0.0, 0.0];

fn intrinsics() -> CameraIntrinsics {
    CameraIntrinsics::from_hfov(60f64.to_radians(), 640, 480).expect("valid intrinsics")
}

/// Six points on a 6 cm cube's face centres, in the object frame.
pub fn cube_points(half: f64) -> Vec<[f64; 3]> {
    vec![[half, 0.0, 0.0], [-half, 0.0, 0.0], [0.0, half, 0.0], [0.0, -half, 0.0], [0.0, 0.0, half], [0.0, 0.0, -half]]
}

fn wp(t: usize, position: [f64; 3], gripper: u8) -> Waypoint {
    Waypoint { t, position, rotation: DOWN, gripper }
}

pub fn benchmark_scenario() -> Scenario {
    let scene = SceneSpec {
        meshes: vec![
            // Table top, surface at z = 0.
            MeshSpec::Box { pose: PoseSpec::at([0.5, 0.0, -0.02]), half_extents: [0.65, 0.8, 0.02] },
            // Divider between the pick and place sides.
            MeshSpec::Box { pose: PoseSpec::at([0.55, 0.0, 0.15]), half_extents: [0.45, 0.01, 0.15] },
            // Low pillar on the operator side, in line with the divider.
            MeshSpec::Box { pose: PoseSpec::at([0.15, 0.0, 0.12]), half_extents: [0.04, 0.12, 0.12] },
            // Posts flanking the operator's outer lines of sight.
            MeshSpec::Box { pose: PoseSpec::at([0.2, -0.3, 0.12]), half_extents: [0.03, 0.05, 0.12] },
            MeshSpec::Box { pose: PoseSpec::at([0.2, 0.3, 0.12]), half_extents: [0.03, 0.05, 0.12] },
        ],
        intrinsics: intrinsics(),
        initial_camera: PoseSpec::looking([-0.2, 0.0, 0.4], [0.55, 0.0, 0.05]),
        episode_length: 24,
        bounds: Bounds { min: [-1.0, -1.0, -0.5], max: [2.0, 1.0, 1.5] },
        robot: RobotProxy { base: [1.05, 0.0, 0.45], radius: 0.04, segments: 12, rings: 3 },
    };
    let ee_script = EEScriptSpec {
        waypoints: vec![
            wp(0, [0.55, -0.25, 0.35], 0),
            wp(6, [0.55, -0.25, 0.15], 0),
            wp(8, [0.55, -0.25, 0.15], 1),
            wp(14, [0.55, 0.0, 0.55], 1),
            wp(20, [0.55, 0.25, 0.15], 1),
        ],
    };
    let flow_script =
        FlowScriptSpec { object_pose: PoseSpec::at([0.55, -0.25, 0.05]), points: cube_points(0.03), grasp_step: 8 };
    Scenario {
        scene,
        ee_script,
        flow_script,
        planner: PlannerSpec::default(),
        reward: RewardConfig::default(),
        seeds: SeedSpec { base: 0, count: 20 },
        coverage: Some(CoverageSpec {
            views: ViewGridSpec::Ring {
                center: [0.55, 0.0, 0.05],
                radius: 0.6,
                height: 0.3,
                count: 4,
                start_angle: 45f64.to_radians(),
            },
            threshold: 0.7,
        }),
    }
}

/// No occluders besides the table and a still object; the planner's prior
/// is a near point mass at a pose that sees every point.
pub fn static_scenario() -> Scenario {
    let mut s = benchmark_scenario();
    s.scene.meshes.truncate(1);
    s.scene.episode_length = 12;
    s.scene.robot.base = [0.55, 0.6, 0.5];
    s.ee_script = EEScriptSpec { waypoints: vec![wp(0, [0.55, 0.5, 0.4], 0)] };
    s.flow_script.grasp_step = 1000;
    let view = PoseSpec::looking([-0.1, -0.25, 0.6], [0.55, -0.25, 0.05]);
    s.scene.initial_camera = view.clone();
    s.planner.prior = ViewPriorSpec::Fixed { pose: view, std: 1e-6 };
    s.seeds.count = 1;
    s.coverage = None;
    s
}
