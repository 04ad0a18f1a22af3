//! Synthetic manipulation episodes with receding-horizon view planning.
//!
//! Every `H` steps the planner receives the next `T` robot actions and
//! query-point positions, samples a `T`-step camera trajectory, and the
//! first `H` poses are executed and logged.

pub mod builtin;
mod scene;
mod script;
mod view_prior;

use std::collections::VecDeque;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use scene::{Bounds, MeshSpec, PoseSpec, SceneSpec, World};
pub use script::{
    action_pose, action_position, build_robot_meshes, get_action_chunk, get_future_flow, ActionVec, EEScript,
    EEScriptSpec, FlowModel, FlowScript, FlowScriptSpec, RobotPolicy, RobotProxy, Waypoint,
};
pub use view_prior::{LookAtDemos, ViewPriorSpec};

use crate::diffusion::default_schedule;
use crate::error::SimError;
use crate::geom3d::{Pose, Vec3};
use crate::reward::{composite_reward, Occluders, RewardConfig, VisibilityReward};
use crate::seed;
use crate::svdd::{decode_trajectory, rew_max_diff, PlannerMode, StandardizedPrior, SvddConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerSpec {
    /// Sampler settings. The `seed` field is unused inside episodes, which
    /// derive their sampler streams from the episode seed.
    pub sampler: SvddConfig,
    /// Planned horizon `T`.
    pub horizon: usize,
    /// Executed steps per chunk `H`.
    pub execute: usize,
    /// Camera history length kept for policy interfaces.
    pub history: usize,
    pub prior: ViewPriorSpec,
    /// Per-step camera translation above which a step is flagged (m).
    pub slew_limit: f64,
}

impl Default for PlannerSpec {
    fn default() -> Self {
        PlannerSpec {
            sampler: SvddConfig::default(),
            horizon: 24,
            execute: 12,
            history: 4,
            prior: ViewPriorSpec::default(),
            slew_limit: 0.15,
        }
    }
}

impl PlannerSpec {
    pub fn validate(&self) -> Result<(), SimError> {
        self.sampler.validate()?;
        if self.execute == 0 || self.execute > self.horizon {
            return Err(SimError::Scene(format!(
                "need 1 <= execute <= horizon, got execute {} and horizon {}",
                self.execute, self.horizon
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SeedSpec {
    pub base: u64,
    pub count: usize,
}

impl Default for SeedSpec {
    fn default() -> Self {
        SeedSpec { base: 0, count: 1 }
    }
}

impl SeedSpec {
    pub fn seeds(&self) -> Vec<u64> {
        (0..self.count as u64).map(|i| self.base.wrapping_add(i)).collect()
    }
}

/// Fixed cameras for the coverage study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ViewGridSpec {
    Authored {
        poses: Vec<PoseSpec>,
    },
    /// `count` cameras evenly spaced on a horizontal circle, all looking at
    /// `center`.
    Ring {
        center: [f64; 3],
        radius: f64,
        height: f64,
        count: usize,
        #[serde(default)]
        start_angle: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverageSpec {
    pub views: ViewGridSpec,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
}

fn default_threshold() -> f64 {
    0.7
}

/// A complete experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub scene: SceneSpec,
    pub ee_script: EEScriptSpec,
    pub flow_script: FlowScriptSpec,
    #[serde(default)]
    pub planner: PlannerSpec,
    #[serde(default)]
    pub reward: RewardConfig,
    #[serde(default)]
    pub seeds: SeedSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coverage: Option<CoverageSpec>,
}

/// Everything an episode needs, built from a [`Scenario`].
#[derive(Debug, Clone)]
pub struct Bundle {
    pub world: World,
    pub ee: EEScript,
    pub flow: FlowScript,
    pub config: EpisodeConfig,
}

impl Scenario {
    pub fn build(&self, base_dir: Option<&Path>) -> Result<Bundle, SimError> {
        let world = World::build(&self.scene, base_dir)?;
        let ee = EEScript::new(self.ee_script.waypoints.clone(), world.episode_length)?;
        let flow = FlowScript::new(&self.flow_script, &ee)?;
        let config = EpisodeConfig { planner: self.planner.clone(), reward: self.reward.clone() };
        config.validate()?;
        Ok(Bundle { world, ee, flow, config })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeConfig {
    pub planner: PlannerSpec,
    pub reward: RewardConfig,
}

impl EpisodeConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        self.planner.validate()?;
        self.reward.validate()?;
        Ok(())
    }

    pub fn mode(&self) -> PlannerMode {
        self.planner.sampler.mode
    }

    pub fn with_mode(&self, mode: PlannerMode) -> Self {
        let mut c = self.clone();
        c.planner.sampler.mode = mode;
        c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoseRecord {
    pub pos: [f64; 3],
    /// `[w, x, y, z]`.
    pub quat: [f64; 4],
}

impl From<&Pose> for PoseRecord {
    fn from(p: &Pose) -> Self {
        PoseRecord { pos: p.position.into(), quat: p.rotation.wxyz() }
    }
}

/// One executed step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepLog {
    pub t: usize,
    pub pose: PoseRecord,
    pub r_vis: f64,
    pub r_close: f64,
    pub r_marg: f64,
    pub r_safe: f64,
    pub total: f64,
    pub vis_bits: Vec<bool>,
    pub mode: PlannerMode,
    pub chunk_index: usize,
    pub slew_violation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChunkRecord {
    pub index: usize,
    pub start_t: usize,
    /// All `T` planned poses, of which only the first `H` are executed.
    pub planned: Vec<PoseRecord>,
    pub fallback_steps: usize,
    pub degenerate_decode: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeLog {
    pub seed: u64,
    pub mode: PlannerMode,
    pub steps: Vec<StepLog>,
    pub chunks: Vec<ChunkRecord>,
    pub planning_calls: usize,
    /// Camera poses of the last `history` executed steps.
    pub camera_history: Vec<PoseRecord>,
    /// Set when planning failed; `steps` then holds the partial log.
    pub error: Option<String>,
}

impl EpisodeLog {
    /// One JSON record per executed step.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            out.push_str(&serde_json::to_string(s).expect("step logs serialize"));
            out.push('\n');
        }
        out
    }

    pub fn mean_r_vis(&self) -> f64 {
        if self.steps.is_empty() {
            return 0.0;
        }
        self.steps.iter().map(|s| s.r_vis).sum::<f64>() / self.steps.len() as f64
    }

    pub fn slew_violations(&self) -> usize {
        self.steps.iter().filter(|s| s.slew_violation).count()
    }
}

/// Runs one episode. Planning failures end the episode early with the
/// error recorded in the log.
pub fn run_episode(
    world: &World,
    robot: &dyn RobotPolicy,
    flow: &dyn FlowModel,
    cfg: &EpisodeConfig,
    episode_seed: u64,
) -> Result<EpisodeLog, SimError> {
    cfg.validate()?;
    let spec = &cfg.planner;
    let schedule = default_schedule(spec.sampler.k)?;
    let mut log = EpisodeLog {
        seed: episode_seed,
        mode: spec.sampler.mode,
        steps: Vec::new(),
        chunks: Vec::new(),
        planning_calls: 0,
        camera_history: Vec::new(),
        error: None,
    };
    let mut cameras: VecDeque<Pose> = VecDeque::from(vec![world.initial_camera; spec.history.max(1)]);
    let mut action_history: Vec<ActionVec> = vec![robot.state(0)];
    let mut flow_history: Vec<Vec<Vec3>> = vec![flow.points(0)];
    let mut t = 0;
    let mut chunk = 0;
    while t < world.episode_length {
        let actions = robot.action_chunk(t, spec.horizon, &action_history);
        let qps = flow.future_flow(t, spec.horizon, &flow_history);
        let ee: Vec<Vec3> = actions.iter().map(action_position).collect();
        let robot_meshes = build_robot_meshes(&world.robot, &actions)?;

        let chunk_seed = seed::chunk_seed(episode_seed, chunk);
        let mut reward_cfg = cfg.reward.clone();
        reward_cfg.perturbation.seed = seed::derive(chunk_seed, seed::STREAM_PERTURB);
        let planned = spec.prior.build(&qps).and_then(|raw| {
            let sp = StandardizedPrior::new(&raw)?;
            let reward = VisibilityReward {
                intrinsics: world.intrinsics,
                query_points: qps.clone(),
                ee_positions: ee.clone(),
                env: world.env.clone(),
                robot: robot_meshes.clone(),
                config: reward_cfg,
            };
            let mut rng = seed::rng(seed::derive(chunk_seed, seed::STREAM_SAMPLER));
            let outcome = rew_max_diff(&sp, &spec.sampler, &schedule, &reward, &mut rng)?;
            let (poses, degenerate) = decode_trajectory(&outcome.sample, &sp.standardizer);
            Ok((poses, degenerate, outcome.fallback_steps))
        });
        let (poses, degenerate, fallback_steps) = match planned {
            Ok(p) => p,
            Err(e) => {
                log::error!("planning failed at t = {t}: {e}");
                log.error = Some(e.to_string());
                break;
            }
        };
        log.planning_calls += 1;
        log.chunks.push(ChunkRecord {
            index: chunk,
            start_t: t,
            planned: poses.iter().map(PoseRecord::from).collect(),
            fallback_steps,
            degenerate_decode: degenerate,
        });

        let executed = spec.execute.min(world.episode_length - t);
        for i in 0..executed {
            let step = t + i + 1;
            let pose = poses[i];
            let mut step_cfg = cfg.reward.clone();
            step_cfg.perturbation.seed = seed::step_seed(episode_seed, step);
            let occ = Occluders::new(&world.env, &robot_meshes[i..i + 1]);
            let b = composite_reward(&[pose], &world.intrinsics, &qps.slice(i), &ee[i..i + 1], &occ, &step_cfg)?;
            let prev = cameras.back().copied().unwrap_or(world.initial_camera);
            let slew_violation = (pose.position - prev.position).norm() > spec.slew_limit;
            log.steps.push(StepLog {
                t: step,
                pose: PoseRecord::from(&pose),
                r_vis: b.r_vis,
                r_close: b.r_close,
                r_marg: b.r_marg,
                r_safe: b.r_safe,
                total: b.total,
                vis_bits: b.vis_bits.into_iter().next().unwrap_or_default(),
                mode: spec.sampler.mode,
                chunk_index: chunk,
                slew_violation,
            });
            cameras.push_back(pose);
            if cameras.len() > spec.history.max(1) {
                cameras.pop_front();
            }
            action_history.push(actions[i]);
            flow_history.push(qps.points_at(i).to_vec());
        }
        t += spec.execute;
        chunk += 1;
    }
    log.camera_history = cameras.iter().map(PoseRecord::from).collect();
    Ok(log)
}
