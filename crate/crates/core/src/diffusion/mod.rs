//! Variance-preserving diffusion over flat trajectory vectors with exact
//! analytic priors standing in for a trained denoiser.

mod prior;
mod schedule;

use std::io::BufRead;
use std::path::Path;

use nalgebra::DVector;
use rand::Rng;

pub use prior::{
    fit_demo_prior, fit_demo_prior_shrunk, AnalyticPrior, Gaussian, GaussianMixture, Standardizer,
    DEMO_VARIANCE_FLOOR,
};
pub(crate) use prior::{categorical, standard_normal};

pub use schedule::{default_schedule, NoiseSchedule, DEFAULT_BETA_END, DEFAULT_BETA_START};

use crate::error::DiffusionError;

/// Values per planned step: 3 position + 6 rotation (first two matrix columns).
pub const VALUES_PER_STEP: usize = 9;

/// A (possibly noisy) flattened camera trajectory at diffusion step `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySample {
    pub x: DVector<f64>,
    pub k: usize,
}

impl TrajectorySample {
    pub fn horizon(&self) -> usize {
        self.x.len() / VALUES_PER_STEP
    }
}

/// `x_k = √ᾱ_k x0 + √(1 - ᾱ_k) ε`; `k = 0` returns `x0` unchanged.
pub fn forward_noise<R: Rng + ?Sized>(
    x0: &DVector<f64>,
    k: usize,
    schedule: &NoiseSchedule,
    rng: &mut R,
) -> Result<DVector<f64>, DiffusionError> {
    schedule.check_step(k)?;
    if k == 0 {
        return Ok(x0.clone());
    }
    let ab = schedule.alpha_bar(k);
    Ok(x0 * ab.sqrt() + standard_normal(x0.len(), rng) * (1.0 - ab).sqrt())
}

pub fn reverse_kernel_sample<R: Rng + ?Sized>(
    prior: &AnalyticPrior,
    x_k: &DVector<f64>,
    k: usize,
    schedule: &NoiseSchedule,
    rng: &mut R,
) -> Result<DVector<f64>, DiffusionError> {
    prior.reverse_kernel_sample(x_k, k, schedule, rng)
}

pub fn posterior_mean_x0(
    prior: &AnalyticPrior,
    x_k: &DVector<f64>,
    k: usize,
    schedule: &NoiseSchedule,
) -> Result<DVector<f64>, DiffusionError> {
    prior.posterior_mean_x0(x_k, k, schedule)
}

/// One strided DDIM update from `k` to `k_next < k`, using the exact
/// posterior mean as the `x0` predictor. `eta = 0` is deterministic and
/// draws nothing from `rng`; `eta = 1` uses the DDPM posterior variance.
pub fn ddim_step<R: Rng + ?Sized>(
    prior: &AnalyticPrior,
    x_k: &DVector<f64>,
    k: usize,
    k_next: usize,
    schedule: &NoiseSchedule,
    eta: f64,
    rng: &mut R,
) -> Result<DVector<f64>, DiffusionError> {
    if k == 0 || k_next >= k || k > schedule.steps() {
        return Err(DiffusionError::InvalidStride { from: k, to: k_next });
    }
    if !(0.0..=1.0).contains(&eta) {
        return Err(DiffusionError::InvalidSchedule(format!("eta {eta} outside [0, 1]")));
    }
    let x0 = prior.posterior_mean_x0(x_k, k, schedule)?;
    let ab = schedule.alpha_bar(k);
    let ab_next = schedule.alpha_bar(k_next);
    let eps = (x_k - &x0 * ab.sqrt()) / (1.0 - ab).sqrt();
    let sigma = eta * ((1.0 - ab_next) / (1.0 - ab) * (1.0 - ab / ab_next)).max(0.0).sqrt();
    let dir = (1.0 - ab_next - sigma * sigma).max(0.0).sqrt();
    let mut out = x0 * ab_next.sqrt() + eps * dir;
    if sigma > 0.0 {
        out += standard_normal(out.len(), rng) * sigma;
    }
    Ok(out)
}

/// Reads demonstration vectors, one JSON array of numbers per line.
pub fn load_demos_jsonl(path: impl AsRef<Path>) -> std::io::Result<Vec<DVector<f64>>> {
    let file = std::fs::File::open(path)?;
    let mut demos = Vec::new();
    for (i, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let values: Vec<f64> = serde_json::from_str(&line).map_err(|e| {
            std::io::Error::new(std::io::ErrorKind::InvalidData, format!("line {}: {e}", i + 1))
        })?;
        demos.push(DVector::from_vec(values));
    }
    Ok(demos)
}
