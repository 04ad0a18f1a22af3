//! Analytic-prior checks for the sampler.
//!
//! Each check runs the planner against a Gaussian prior and a reward with a
//! known tilted target, so the sampler can be validated without any scene.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{rew_max_diff, PlannerMode, StandardizedPrior, SvddConfig};
use crate::diffusion::{default_schedule, AnalyticPrior, Gaussian};
use crate::error::PlannerError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BatteryConfig {
    /// Temperature for the tilted-mean checks.
    pub alpha: f64,
    /// Temperatures for the monotonicity check, in any order.
    pub alphas: Vec<f64>,
    pub m: usize,
    pub k: usize,
    pub n_tilted: usize,
    pub n_ks: usize,
    pub n_monotone: usize,
    pub seed: u64,
    pub corrupt_weights: bool,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        BatteryConfig {
            alpha: 0.5,
            alphas: vec![2.0, 0.5, 0.1],
            m: 64,
            k: 100,
            n_tilted: 1000,
            n_ks: 2000,
            n_monotone: 500,
            seed: 0,
            corrupt_weights: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BatteryReport {
    pub checks: Vec<CheckResult>,
}

impl BatteryReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

fn std_normal_prior(dim: usize) -> StandardizedPrior {
    StandardizedPrior::unscaled(AnalyticPrior::Gaussian(Gaussian::isotropic(DVector::zeros(dim), 1.0).unwrap()))
}

/// Draws `n` final samples with one RNG stream per run.
pub fn draw_samples(
    sp: &StandardizedPrior,
    cfg: &SvddConfig,
    reward: &(dyn Fn(&DVector<f64>) -> f64 + Sync),
    n: usize,
) -> Result<Vec<DVector<f64>>, PlannerError> {
    let schedule = default_schedule(cfg.k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..n).map(|_| rew_max_diff(sp, cfg, &schedule, reward, &mut rng).map(|o| o.raw)).collect()
}

fn status(ok: bool) -> CheckStatus {
    if ok {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    }
}

pub fn run_battery(bc: &BatteryConfig) -> Result<BatteryReport, PlannerError> {
    let base = SvddConfig {
        alpha: bc.alpha,
        m: bc.m,
        k: bc.k,
        seed: bc.seed,
        parallel: false,
        corrupt_weights: bc.corrupt_weights,
        ..SvddConfig::default()
    };
    let mut checks = Vec::new();
    let linear = |x: &DVector<f64>| x[0];

    // N(0, 1) tilted by exp(x / α) is N(1 / α, 1).
    let sp1 = std_normal_prior(1);
    let xs: Vec<f64> = draw_samples(&sp1, &base, &linear, bc.n_tilted)?.iter().map(|x| x[0]).collect();
    let (mean, var) = mean_var(&xs);
    let target = 1.0 / bc.alpha;
    checks.push(CheckResult {
        name: "tilted_mean_1d".into(),
        status: status((mean - target).abs() <= 0.1 * target && (var - 1.0).abs() <= 0.3),
        detail: format!("mean {mean:.4} (target {target:.4}), var {var:.4} (target 1)"),
    });

    // N(0, I) tilted by exp(c·x / α) is N(c / α, I).
    let c = [1.0, -0.5];
    let sp2 = std_normal_prior(2);
    let dot = move |x: &DVector<f64>| c[0] * x[0] + c[1] * x[1];
    let xs2 = draw_samples(&sp2, &SvddConfig { seed: bc.seed ^ 0x2d, ..base.clone() }, &dot, bc.n_tilted)?;
    let mut ok = true;
    let mut detail = Vec::new();
    for d in 0..2 {
        let col: Vec<f64> = xs2.iter().map(|x| x[d]).collect();
        let (m, v) = mean_var(&col);
        let t = c[d] / bc.alpha;
        ok &= (m - t).abs() <= 0.2 && (v - 1.0).abs() <= 0.3;
        detail.push(format!("dim {d}: mean {m:.4} (target {t:.4}), var {v:.4}"));
    }
    checks.push(CheckResult { name: "tilted_mean_2d".into(), status: status(ok), detail: detail.join("; ") });

    // Without reward influence the sampler must reproduce the prior.
    let mut reference_rng = ChaCha8Rng::seed_from_u64(bc.seed ^ 0xabc);
    let reference: Vec<f64> = (0..bc.n_ks).map(|_| sp1.prior.sample(&mut reference_rng)[0]).collect();
    for (name, cfg) in [
        ("prior_recovery_prior_only", SvddConfig { mode: PlannerMode::PriorOnly, seed: bc.seed ^ 0x11, ..base.clone() }),
        ("prior_recovery_m1", SvddConfig { m: 1, seed: bc.seed ^ 0x12, ..base.clone() }),
    ] {
        let xs: Vec<f64> = draw_samples(&sp1, &cfg, &linear, bc.n_ks)?.iter().map(|x| x[0]).collect();
        let d = ks_statistic(&xs, &reference);
        checks.push(CheckResult { name: name.into(), status: status(d < 0.05), detail: format!("KS {d:.4}") });
    }

    // Mean reward must rise as the temperature falls.
    if bc.alphas.len() < 2 {
        checks.push(CheckResult {
            name: "alpha_monotonicity".into(),
            status: CheckStatus::Skipped,
            detail: "needs at least two temperatures".into(),
        });
    } else {
        let mut alphas = bc.alphas.clone();
        alphas.sort_by(|a, b| b.total_cmp(a));
        let mut means = Vec::new();
        for (i, &alpha) in alphas.iter().enumerate() {
            let cfg = SvddConfig { alpha, seed: bc.seed ^ (0x100 + i as u64), ..base.clone() };
            let xs: Vec<f64> = draw_samples(&sp1, &cfg, &linear, bc.n_monotone)?.iter().map(|x| x[0]).collect();
            means.push(mean_var(&xs).0);
        }
        let ok = means.windows(2).all(|w| w[1] > w[0]);
        let detail = alphas.iter().zip(&means).map(|(a, m)| format!("alpha {a}: {m:.4}")).collect::<Vec<_>>().join(", ");
        checks.push(CheckResult { name: "alpha_monotonicity".into(), status: status(ok), detail });
    }
    Ok(BatteryReport { checks })
}
