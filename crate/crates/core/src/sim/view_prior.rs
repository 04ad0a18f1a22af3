//! View priors for the planner.
//!
//! The demo prior imitates a person watching the task: each demonstration
//! holds the head near a random anchor on the operator's side of the table
//! and looks at the centroid of the query points, with small drift and gaze
//! noise. A Gaussian fitted to those demonstrations is the prior the reward
//! then tilts.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::PoseSpec;
use crate::diffusion::{fit_demo_prior_shrunk, AnalyticPrior, Gaussian};
use crate::error::SimError;
use crate::geom3d::{Pose, Vec3};
use crate::reward::QueryPointSet;
use crate::seed;
use crate::svdd::encode_poses;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ViewPriorSpec {
    LookAtDemos(LookAtDemos),
    /// Near point mass at one pose, repeated over the horizon.
    Fixed {
        pose: PoseSpec,
        #[serde(default = "default_fixed_std")]
        std: f64,
    },
}

fn default_fixed_std() -> f64 {
    1e-6
}

impl Default for ViewPriorSpec {
    fn default() -> Self {
        ViewPriorSpec::LookAtDemos(LookAtDemos::default())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LookAtDemos {
    pub count: usize,
    /// Anchors are uniform in `center ± half_range`.
    pub anchor_center: [f64; 3],
    pub anchor_half_range: [f64; 3],
    /// Per-step head drift (m, std per axis).
    pub drift_std: f64,
    /// Constant gaze offset per demonstration (m, std per axis).
    pub gaze_std: f64,
    /// Per-step gaze jitter (m, std per axis).
    pub jitter_std: f64,
    /// Weight of the diagonal in the fitted covariance.
    pub shrinkage: f64,
    /// Demonstrations depend on this seed and the chunk's flow only, so
    /// every episode sees the same prior for the same chunk.
    pub seed: u64,
}

impl Default for LookAtDemos {
    fn default() -> Self {
        LookAtDemos {
            count: 256,
            anchor_center: [-0.2, 0.0, 0.4],
            anchor_half_range: [0.05, 0.35, 0.15],
            drift_std: 0.004,
            gaze_std: 0.03,
            jitter_std: 0.005,
            shrinkage: 0.02,
            seed: 7,
        }
    }
}

fn normal3<G: Rng + ?Sized>(rng: &mut G, std: f64) -> Vec3 {
    Vec3::from_fn(|_, _| std * rng.sample::<f64, _>(StandardNormal))
}

fn centroid(points: &[Vec3]) -> Vec3 {
    points.iter().sum::<Vec3>() / points.len() as f64
}

impl LookAtDemos {
    /// Raw demonstration trajectories over the chunk's horizon.
    pub fn demonstrations(&self, qps: &QueryPointSet) -> Result<Vec<Vec<Pose>>, SimError> {
        let mut rng = seed::rng(self.seed);
        let targets: Vec<Vec3> = (0..qps.horizon()).map(|t| centroid(qps.points_at(t))).collect();
        let center = Vec3::from(self.anchor_center);
        let half = Vec3::from(self.anchor_half_range);
        (0..self.count)
            .map(|_| {
                let anchor = center + Vec3::from_fn(|i, _| half[i] * rng.random_range(-1.0..=1.0));
                let drift = normal3(&mut rng, self.drift_std);
                let gaze = normal3(&mut rng, self.gaze_std);
                targets
                    .iter()
                    .enumerate()
                    .map(|(t, target)| {
                        let eye = anchor + drift * t as f64;
                        let look = target + gaze + normal3(&mut rng, self.jitter_std);
                        Ok(Pose::look_at(eye, look, Vec3::z())?)
                    })
                    .collect()
            })
            .collect()
    }
}

impl ViewPriorSpec {
    /// Prior over raw `horizon × 9` trajectories for one chunk.
    pub fn build(&self, qps: &QueryPointSet) -> Result<AnalyticPrior, SimError> {
        match self {
            ViewPriorSpec::LookAtDemos(d) => {
                let demos: Vec<DVector<f64>> = d.demonstrations(qps)?.iter().map(|p| encode_poses(p)).collect();
                Ok(fit_demo_prior_shrunk(&demos, d.shrinkage)?)
            }
            ViewPriorSpec::Fixed { pose, std } => {
                if !(*std > 0.0) {
                    return Err(SimError::Scene(format!("fixed prior std must be positive, got {std}")));
                }
                let mean = encode_poses(&vec![pose.to_pose()?; qps.horizon()]);
                Ok(AnalyticPrior::Gaussian(Gaussian::isotropic(mean, std * std)?))
            }
        }
    }
}
