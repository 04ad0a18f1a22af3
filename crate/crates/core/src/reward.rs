//! Visibility-aware reward for a planned camera trajectory.
//!
//! A query point counts as visible at step `t` when the line of sight from
//! the camera centre reaches it without crossing the environment or the
//! robot mesh for that step, and it projects inside the image in front of
//! the camera. The composite reward adds closeness, perturbation-margin
//! and end-effector safety terms:
//!
//! `total = r_vis + λ_c r_close + λ_m r_marg + λ_s r_safe`

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::RewardError;
use crate::geom3d::{point_in_fov, CameraIntrinsics, Pose, Rotation, Vec3};
use crate::mesh::{segment_hits_any, Bvh, Segment, DEFAULT_SEGMENT_EPS};
use crate::svdd::{decode_poses, Reward};

/// Query points `q[t][i]` with a validity mask of the same shape.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryPointSet {
    points: Vec<Vec<Vec3>>,
    valid: Vec<Vec<bool>>,
}

impl QueryPointSet {
    /// All points valid. Every step must have the same number of points.
    pub fn new(points: Vec<Vec<Vec3>>) -> Result<Self, RewardError> {
        let valid = points.iter().map(|row| vec![true; row.len()]).collect();
        Self::with_mask(points, valid)
    }

    pub fn with_mask(points: Vec<Vec<Vec3>>, valid: Vec<Vec<bool>>) -> Result<Self, RewardError> {
        let n = points.first().map_or(0, Vec::len);
        if valid.len() != points.len() {
            return Err(RewardError::HorizonMismatch { what: "validity mask", expected: points.len(), got: valid.len() });
        }
        for (row, mask) in points.iter().zip(&valid) {
            if row.len() != n {
                return Err(RewardError::HorizonMismatch { what: "query points per step", expected: n, got: row.len() });
            }
            if mask.len() != n {
                return Err(RewardError::HorizonMismatch { what: "validity mask row", expected: n, got: mask.len() });
            }
        }
        Ok(QueryPointSet { points, valid })
    }

    pub fn horizon(&self) -> usize {
        self.points.len()
    }

    pub fn num_points(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }

    pub fn points_at(&self, t: usize) -> &[Vec3] {
        &self.points[t]
    }

    pub fn valid_at(&self, t: usize) -> &[bool] {
        &self.valid[t]
    }

    /// `(point, valid)` pairs at step `t`.
    fn step(&self, t: usize) -> impl Iterator<Item = (&Vec3, bool)> {
        self.points[t].iter().zip(self.valid[t].iter().copied())
    }

    /// Single-step set for time `t`.
    pub fn slice(&self, t: usize) -> QueryPointSet {
        QueryPointSet { points: vec![self.points[t].clone()], valid: vec![self.valid[t].clone()] }
    }

    fn valid_count(&self) -> usize {
        self.valid.iter().flatten().filter(|v| **v).count()
    }
}

/// Environment meshes plus optional per-step robot meshes; the occluder
/// set at step `t` is their union.
#[derive(Debug, Clone, Copy)]
pub struct Occluders<'a> {
    pub env: &'a [Bvh],
    /// Empty, or one mesh per horizon step.
    pub robot: &'a [Bvh],
}

impl<'a> Occluders<'a> {
    pub fn new(env: &'a [Bvh], robot: &'a [Bvh]) -> Self {
        Occluders { env, robot }
    }

    pub fn none() -> Occluders<'static> {
        Occluders { env: &[], robot: &[] }
    }

    pub fn at(&self, t: usize) -> impl Iterator<Item = &'a Bvh> + 'a {
        self.env.iter().chain(self.robot.get(t))
    }

    fn check(&self, horizon: usize) -> Result<(), RewardError> {
        if !self.robot.is_empty() && self.robot.len() != horizon {
            return Err(RewardError::HorizonMismatch { what: "robot meshes", expected: horizon, got: self.robot.len() });
        }
        Ok(())
    }
}

/// `λ_c`, `λ_m`, `λ_s` are not pinned by the method; the defaults keep the
/// visibility term dominant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RewardWeights {
    pub lambda_c: f64,
    pub lambda_m: f64,
    pub lambda_s: f64,
    pub lambda_var: f64,
    /// Metres.
    pub sigma_safe: f64,
}

impl Default for RewardWeights {
    fn default() -> Self {
        RewardWeights { lambda_c: 0.1, lambda_m: 0.5, lambda_s: 0.5, lambda_var: 0.1, sigma_safe: 0.1 }
    }
}

impl RewardWeights {
    pub fn validate(&self) -> Result<(), RewardError> {
        let all = [self.lambda_c, self.lambda_m, self.lambda_s, self.lambda_var, self.sigma_safe];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(RewardError::Config("reward weights must be finite".into()));
        }
        if self.lambda_c < 0.0 || self.lambda_m < 0.0 || self.lambda_s < 0.0 {
            return Err(RewardError::Config("lambda_c, lambda_m and lambda_s must be nonnegative".into()));
        }
        if self.sigma_safe <= 0.0 {
            return Err(RewardError::Config("sigma_safe must be positive".into()));
        }
        Ok(())
    }
}

/// Pose perturbations for the margin term. The same seed always yields the
/// same perturbations, so every candidate is scored against identical noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PerturbationConfig {
    pub j: usize,
    /// Metres, per axis.
    pub sigma_pos: f64,
    /// Radians, per rotation-vector axis.
    pub sigma_rot: f64,
    pub seed: u64,
}

impl Default for PerturbationConfig {
    fn default() -> Self {
        PerturbationConfig { j: 4, sigma_pos: 0.02, sigma_rot: 0.05, seed: 0 }
    }
}

impl PerturbationConfig {
    pub fn validate(&self) -> Result<(), RewardError> {
        if self.j == 0 {
            return Err(RewardError::Config("perturbation count j must be at least 1".into()));
        }
        if !(self.sigma_pos >= 0.0 && self.sigma_rot >= 0.0) {
            return Err(RewardError::Config("perturbation sigmas must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RewardConfig {
    pub weights: RewardWeights,
    pub perturbation: PerturbationConfig,
    /// Line-of-sight endpoint shrink as a fraction of segment length.
    pub segment_eps: f64,
}

impl Default for RewardConfig {
    fn default() -> Self {
        RewardConfig {
            weights: RewardWeights::default(),
            perturbation: PerturbationConfig::default(),
            segment_eps: DEFAULT_SEGMENT_EPS,
        }
    }
}

impl RewardConfig {
    pub fn validate(&self) -> Result<(), RewardError> {
        self.weights.validate()?;
        self.perturbation.validate()?;
        if !(0.0..0.5).contains(&self.segment_eps) {
            return Err(RewardError::Config(format!("segment_eps {} outside [0, 0.5)", self.segment_eps)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RewardBreakdown {
    pub r_vis: f64,
    pub r_close: f64,
    pub r_marg: f64,
    pub r_safe: f64,
    pub total: f64,
    /// `s·f` per step and point; masked points are `false`.
    pub vis_bits: Vec<Vec<bool>>,
    /// Every query point was masked out.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VisibilityStats {
    pub value: f64,
    pub vis_bits: Vec<Vec<bool>>,
    pub degenerate: bool,
}

/// `s·f` for one point: in view and with an unobstructed line of sight.
pub fn point_visibility<'a>(
    pose: &Pose,
    intr: &CameraIntrinsics,
    q: &Vec3,
    meshes: impl IntoIterator<Item = &'a Bvh>,
    segment_eps: f64,
) -> bool {
    point_in_fov(intr, pose, q) && !segment_hits_any(meshes, &Segment::new(pose.position, *q), segment_eps)
}

fn check_horizon(traj: &[Pose], qps: &QueryPointSet) -> Result<(), RewardError> {
    if traj.len() != qps.horizon() {
        return Err(RewardError::HorizonMismatch { what: "trajectory", expected: qps.horizon(), got: traj.len() });
    }
    Ok(())
}

/// Mean visibility over valid `(t, i)`. With no valid points the value is
/// 0 and `degenerate` is set.
pub fn r_vis(
    traj: &[Pose],
    intr: &CameraIntrinsics,
    qps: &QueryPointSet,
    occluders: &Occluders,
    segment_eps: f64,
) -> Result<VisibilityStats, RewardError> {
    check_horizon(traj, qps)?;
    occluders.check(traj.len())?;
    let mut visible = 0usize;
    let vis_bits: Vec<Vec<bool>> = traj
        .iter()
        .enumerate()
        .map(|(t, pose)| {
            qps.step(t)
                .map(|(q, valid)| {
                    let bit = valid && point_visibility(pose, intr, q, occluders.at(t), segment_eps);
                    visible += bit as usize;
                    bit
                })
                .collect()
        })
        .collect();
    let n = qps.valid_count();
    if n == 0 {
        return Ok(VisibilityStats { value: 0.0, vis_bits, degenerate: true });
    }
    Ok(VisibilityStats { value: visible as f64 / n as f64, vis_bits, degenerate: false })
}

/// Mean of `exp(-‖v_pos - q‖)` over valid points.
pub fn r_close(traj: &[Pose], qps: &QueryPointSet) -> Result<f64, RewardError> {
    check_horizon(traj, qps)?;
    let mut sum = 0.0;
    let mut n = 0usize;
    for (t, pose) in traj.iter().enumerate() {
        for (q, valid) in qps.step(t) {
            if valid {
                sum += (-(pose.position - q).norm()).exp();
                n += 1;
            }
        }
    }
    Ok(if n == 0 { 0.0 } else { sum / n as f64 })
}

/// `J` perturbed copies of `traj`: Gaussian translation noise and a
/// rotation-vector perturbation composed in the camera frame.
pub fn perturbed_trajectories(traj: &[Pose], cfg: &PerturbationConfig) -> Vec<Vec<Pose>> {
    if cfg.sigma_pos == 0.0 && cfg.sigma_rot == 0.0 {
        return vec![traj.to_vec(); cfg.j];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut noise = move |s: f64| Vec3::from_fn(|_, _| s * rng.sample::<f64, _>(StandardNormal));
    (0..cfg.j)
        .map(|_| {
            traj.iter()
                .map(|pose| {
                    let dp = noise(cfg.sigma_pos);
                    let dr = noise(cfg.sigma_rot);
                    Pose::new(pose.position + dp, pose.rotation.compose(&Rotation::from_scaled_axis(&dr)))
                })
                .collect()
        })
        .collect()
}

/// `min_j R_vis⁽ʲ⁾ · (1 - λ_var · Var_j R_vis⁽ʲ⁾)` with population variance.
pub fn r_marg(
    traj: &[Pose],
    intr: &CameraIntrinsics,
    qps: &QueryPointSet,
    occluders: &Occluders,
    cfg: &PerturbationConfig,
    lambda_var: f64,
    segment_eps: f64,
) -> Result<f64, RewardError> {
    cfg.validate()?;
    let values = perturbed_trajectories(traj, cfg)
        .iter()
        .map(|p| r_vis(p, intr, qps, occluders, segment_eps).map(|s| s.value))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(margin_of(&values, lambda_var))
}

pub(crate) fn margin_of(values: &[f64], lambda_var: f64) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    min * (1.0 - lambda_var * var)
}

/// `-(1/T) Σ_t exp(-‖v_pos - â_t‖ / σ_safe)`.
pub fn r_safe(traj: &[Pose], ee: &[Vec3], sigma_safe: f64) -> Result<f64, RewardError> {
    if traj.len() != ee.len() {
        return Err(RewardError::HorizonMismatch { what: "end-effector trajectory", expected: traj.len(), got: ee.len() });
    }
    if traj.is_empty() {
        return Ok(0.0);
    }
    let sum: f64 = traj.iter().zip(ee).map(|(p, a)| (-(p.position - a).norm() / sigma_safe).exp()).sum();
    Ok(-sum / traj.len() as f64)
}

pub fn composite_reward(
    traj: &[Pose],
    intr: &CameraIntrinsics,
    qps: &QueryPointSet,
    ee: &[Vec3],
    occluders: &Occluders,
    cfg: &RewardConfig,
) -> Result<RewardBreakdown, RewardError> {
    let w = &cfg.weights;
    let vis = r_vis(traj, intr, qps, occluders, cfg.segment_eps)?;
    let r_close = r_close(traj, qps)?;
    let r_marg = r_marg(traj, intr, qps, occluders, &cfg.perturbation, w.lambda_var, cfg.segment_eps)?;
    let r_safe = r_safe(traj, ee, w.sigma_safe)?;
    let total = vis.value + w.lambda_c * r_close + w.lambda_m * r_marg + w.lambda_s * r_safe;
    Ok(RewardBreakdown {
        r_vis: vis.value,
        r_close,
        r_marg,
        r_safe,
        total,
        vis_bits: vis.vis_bits,
        degenerate: vis.degenerate,
    })
}

/// The composite reward as a function of a raw (de-standardized)
/// trajectory vector, for use inside the sampler.
#[derive(Debug, Clone)]
pub struct VisibilityReward {
    pub intrinsics: CameraIntrinsics,
    pub query_points: QueryPointSet,
    pub ee_positions: Vec<Vec3>,
    pub env: Vec<Bvh>,
    pub robot: Vec<Bvh>,
    pub config: RewardConfig,
}

impl VisibilityReward {
    pub fn breakdown(&self, traj: &[Pose]) -> Result<RewardBreakdown, RewardError> {
        composite_reward(
            traj,
            &self.intrinsics,
            &self.query_points,
            &self.ee_positions,
            &Occluders::new(&self.env, &self.robot),
            &self.config,
        )
    }
}

impl Reward for VisibilityReward {
    fn evaluate(&self, x0: &DVector<f64>) -> Result<f64, RewardError> {
        let (poses, _degenerate) = decode_poses(x0.as_slice());
        Ok(self.breakdown(&poses)?.total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{quad_mesh, TriMesh};
    use proptest::prelude::*;

    const E: f64 = std::f64::consts::E;

    fn intr() -> CameraIntrinsics {
        CameraIntrinsics::new(100.0, 100.0, 50.0, 50.0, 100, 100).unwrap()
    }

    fn wall_at(z: f64) -> Bvh {
        Bvh::build(quad_mesh(&Pose::from_translation(Vec3::new(0.0, 0.0, z)), 1.0, 1.0))
    }

    fn ahead(n: usize) -> QueryPointSet {
        QueryPointSet::new(vec![vec![Vec3::new(0.0, 0.0, 1.0); n]]).unwrap()
    }

    #[test]
    fn point_visibility_examples() {
        let pose = Pose::identity();
        let q = Vec3::new(0.0, 0.0, 1.0);
        assert!(point_visibility(&pose, &intr(), &q, [], 1e-4));
        assert!(!point_visibility(&pose, &intr(), &Vec3::new(0.0, 0.0, -1.0), [], 1e-4));
        let wall = wall_at(0.5);
        assert!(!point_visibility(&pose, &intr(), &q, [&wall], 1e-4));
        // A wall beyond the point does not block it.
        let far = wall_at(2.0);
        assert!(point_visibility(&pose, &intr(), &q, [&far], 1e-4));
        // Out of the image plane bounds.
        assert!(!point_visibility(&pose, &intr(), &Vec3::new(5.0, 0.0, 1.0), [], 1e-4));
    }

    #[test]
    fn r_vis_examples() {
        let traj = [Pose::identity()];
        let qps = ahead(3);
        assert_eq!(r_vis(&traj, &intr(), &qps, &Occluders::none(), 1e-4).unwrap().value, 1.0);
        let wall = [wall_at(0.5)];
        assert_eq!(r_vis(&traj, &intr(), &qps, &Occluders::new(&wall, &[]), 1e-4).unwrap().value, 0.0);

        let two = QueryPointSet::new(vec![vec![Vec3::new(0.0, 0.0, 1.0)], vec![Vec3::new(0.0, 0.0, 1.0)]]).unwrap();
        let robot = [Bvh::build(TriMesh::empty()), wall_at(0.5)];
        let s = r_vis(&[Pose::identity(); 2], &intr(), &two, &Occluders::new(&[], &robot), 1e-4).unwrap();
        assert_eq!(s.value, 0.5);
        assert_eq!(s.vis_bits, vec![vec![true], vec![false]]);
    }

    #[test]
    fn masked_points_are_ignored() {
        let qps = QueryPointSet::with_mask(
            vec![vec![Vec3::new(0.0, 0.0, 1.0), Vec3::new(0.0, 0.0, -1.0)]],
            vec![vec![true, false]],
        )
        .unwrap();
        let s = r_vis(&[Pose::identity()], &intr(), &qps, &Occluders::none(), 1e-4).unwrap();
        assert_eq!(s.value, 1.0);
        let none = QueryPointSet::with_mask(vec![vec![Vec3::zeros()]], vec![vec![false]]).unwrap();
        let s = r_vis(&[Pose::identity()], &intr(), &none, &Occluders::none(), 1e-4).unwrap();
        assert!(s.degenerate && s.value == 0.0);
    }

    #[test]
    fn shape_mismatches_are_errors() {
        let qps = ahead(1);
        assert!(r_vis(&[Pose::identity(); 2], &intr(), &qps, &Occluders::none(), 1e-4).is_err());
        let robot = [wall_at(0.5), wall_at(0.5)];
        assert!(r_vis(&[Pose::identity()], &intr(), &qps, &Occluders::new(&[], &robot), 1e-4).is_err());
        assert!(r_safe(&[Pose::identity()], &[], 0.1).is_err());
        assert!(QueryPointSet::new(vec![vec![Vec3::zeros()], vec![]]).is_err());
    }

    #[test]
    fn r_close_examples() {
        let traj = [Pose::identity()];
        assert!((r_close(&traj, &ahead(1)).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        let qps = QueryPointSet::new(vec![vec![Vec3::zeros(), Vec3::new(0.0, 0.0, 1.0)]]).unwrap();
        assert!((r_close(&traj, &qps).unwrap() - (1.0 + 1.0 / E) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn r_safe_examples() {
        let traj = [Pose::identity()];
        assert_eq!(r_safe(&traj, &[Vec3::zeros()], 0.1).unwrap(), -1.0);
        let got = r_safe(&traj, &[Vec3::new(0.1, 0.0, 0.0)], 0.1).unwrap();
        assert!((got + 1.0 / E).abs() < 1e-15);
    }

    #[test]
    fn margin_examples() {
        assert_eq!(margin_of(&[1.0, 1.0, 1.0], 0.1), 1.0);
        assert_eq!(margin_of(&[1.0, 0.0], 0.1), 0.0);
        // min 0.5, population variance 1/16.
        assert!((margin_of(&[0.5, 1.0], 1.0) - 0.5 * (1.0 - 1.0 / 16.0)).abs() < 1e-15);

        let traj = [Pose::identity()];
        let quiet = PerturbationConfig { j: 3, sigma_pos: 0.0, sigma_rot: 0.0, seed: 1 };
        let occ = Occluders::none();
        let vis = r_vis(&traj, &intr(), &ahead(2), &occ, 1e-4).unwrap().value;
        assert_eq!(r_marg(&traj, &intr(), &ahead(2), &occ, &quiet, 0.1, 1e-4).unwrap(), vis);
        let noisy = PerturbationConfig { sigma_pos: 0.01, sigma_rot: 0.01, ..quiet };
        assert_eq!(r_marg(&traj, &intr(), &ahead(2), &occ, &noisy, 0.1, 1e-4).unwrap(), 1.0);
    }

    #[test]
    fn composite_with_zero_weights_is_visibility() {
        let cfg = RewardConfig {
            weights: RewardWeights { lambda_c: 0.0, lambda_m: 0.0, lambda_s: 0.0, ..RewardWeights::default() },
            ..RewardConfig::default()
        };
        let wall = [wall_at(0.5)];
        let qps = QueryPointSet::new(vec![vec![Vec3::new(0.0, 0.0, 1.0), Vec3::new(0.0, 1.5, 0.4)]]).unwrap();
        let b = composite_reward(&[Pose::identity()], &intr(), &qps, &[Vec3::zeros()], &Occluders::new(&wall, &[]), &cfg)
            .unwrap();
        assert_eq!(b.total, b.r_vis);
    }

    #[test]
    fn composite_matches_termwise_recomputation() {
        let cfg = RewardConfig::default();
        let traj = [Pose::identity(), Pose::from_translation(Vec3::new(0.1, 0.0, 0.0))];
        let q = Vec3::new(0.0, 0.0, 1.0);
        let qps = QueryPointSet::new(vec![vec![q], vec![q]]).unwrap();
        let ee = [Vec3::new(0.0, 0.2, 0.0), Vec3::new(0.3, 0.0, 0.0)];
        let b = composite_reward(&traj, &intr(), &qps, &ee, &Occluders::none(), &cfg).unwrap();
        let w = cfg.weights;
        let close = ((-1.0f64).exp() + (-(0.01f64 + 1.0).sqrt()).exp()) / 2.0;
        let safe = -((-0.2 / w.sigma_safe).exp() + (-0.2 / w.sigma_safe).exp()) / 2.0;
        let want = 1.0 + w.lambda_c * close + w.lambda_m * b.r_marg + w.lambda_s * safe;
        assert!((b.total - want).abs() < 1e-12);
        assert!((b.r_close - close).abs() < 1e-15);
        assert!((b.r_safe - safe).abs() < 1e-15);
    }

    #[test]
    fn sampler_reward_decodes_vector() {
        let reward = VisibilityReward {
            intrinsics: intr(),
            query_points: ahead(1),
            ee_positions: vec![Vec3::new(5.0, 0.0, 0.0)],
            env: vec![],
            robot: vec![],
            config: RewardConfig::default(),
        };
        let x = DVector::from_vec(Pose::identity().to_vec9().to_vec());
        let direct = reward.breakdown(&[Pose::identity()]).unwrap().total;
        assert_eq!(reward.evaluate(&x).unwrap(), direct);
    }

    fn arb_point() -> impl Strategy<Value = Vec3> {
        (-0.6..0.6f64, -0.6..0.6f64, -0.5..2.0f64).prop_map(|(x, y, z)| Vec3::new(x, y, z))
    }

    proptest! {
        #[test]
        fn removing_an_occluder_never_lowers_visibility(
            pts in prop::collection::vec(arb_point(), 1..8),
            z1 in 0.1..1.5f64,
            z2 in 0.1..1.5f64,
        ) {
            let qps = QueryPointSet::new(vec![pts]).unwrap();
            let both = [wall_at(z1), Bvh::build(quad_mesh(&Pose::from_translation(Vec3::new(0.3, 0.0, z2)), 0.2, 0.2))];
            let traj = [Pose::identity()];
            let full = r_vis(&traj, &intr(), &qps, &Occluders::new(&both, &[]), 1e-4).unwrap().value;
            let less = r_vis(&traj, &intr(), &qps, &Occluders::new(&both[1..], &[]), 1e-4).unwrap().value;
            prop_assert!(less >= full);
        }

        #[test]
        fn visibility_ignores_point_order(pts in prop::collection::vec(arb_point(), 2..8), z in 0.1..1.5f64) {
            let wall = [Bvh::build(quad_mesh(&Pose::from_translation(Vec3::new(0.2, 0.1, z)), 0.3, 0.3))];
            let mut rev = pts.clone();
            rev.reverse();
            let a = QueryPointSet::new(vec![pts]).unwrap();
            let b = QueryPointSet::new(vec![rev]).unwrap();
            let occ = Occluders::new(&wall, &[]);
            let traj = [Pose::identity()];
            prop_assert_eq!(
                r_vis(&traj, &intr(), &a, &occ, 1e-4).unwrap().value,
                r_vis(&traj, &intr(), &b, &occ, 1e-4).unwrap().value
            );
        }

        #[test]
        fn composite_is_affine_in_closeness_weight(pts in prop::collection::vec(arb_point(), 1..5), lc in 0.0..2.0f64) {
            let qps = QueryPointSet::new(vec![pts]).unwrap();
            let traj = [Pose::identity()];
            let ee = [Vec3::new(0.0, 0.3, 0.0)];
            let at = |lambda_c: f64| {
                let cfg = RewardConfig { weights: RewardWeights { lambda_c, ..RewardWeights::default() }, ..RewardConfig::default() };
                composite_reward(&traj, &intr(), &qps, &ee, &Occluders::none(), &cfg).unwrap()
            };
            let b0 = at(0.0);
            let b = at(lc);
            prop_assert!((b.total - (b0.total + lc * b0.r_close)).abs() < 1e-12);
        }

        #[test]
        fn reward_is_deterministic(pts in prop::collection::vec(arb_point(), 1..5), seed in 0u64..100) {
            let qps = QueryPointSet::new(vec![pts]).unwrap();
            let cfg = RewardConfig { perturbation: PerturbationConfig { seed, ..PerturbationConfig::default() }, ..RewardConfig::default() };
            let traj = [Pose::identity()];
            let ee = [Vec3::zeros()];
            let a = composite_reward(&traj, &intr(), &qps, &ee, &Occluders::none(), &cfg).unwrap();
            let b = composite_reward(&traj, &intr(), &qps, &ee, &Occluders::none(), &cfg).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
