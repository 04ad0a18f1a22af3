use serde::{Deserialize, Serialize};

use crate::error::DiffusionError;

pub const DEFAULT_BETA_START: f64 = 1e-4;
pub const DEFAULT_BETA_END: f64 = 2e-2;

/// Variance-preserving noise schedule with steps `1..=K`.
///
/// `alpha_bar(0) = 1` by convention, so step 0 is the clean sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSchedule {
    betas: Vec<f64>,
    alpha_bars: Vec<f64>,
}

impl NoiseSchedule {
    pub fn from_betas(betas: Vec<f64>) -> Result<Self, DiffusionError> {
        if betas.is_empty() {
            return Err(DiffusionError::InvalidSchedule("need at least one step".into()));
        }
        if let Some(b) = betas.iter().find(|b| !(**b > 0.0 && **b < 1.0)) {
            return Err(DiffusionError::InvalidSchedule(format!("beta {b} outside (0, 1)")));
        }
        let mut alpha_bars = Vec::with_capacity(betas.len() + 1);
        alpha_bars.push(1.0);
        let mut acc = 1.0;
        for b in &betas {
            acc *= 1.0 - b;
            alpha_bars.push(acc);
        }
        Ok(NoiseSchedule { betas, alpha_bars })
    }

    /// Betas linearly spaced from `start` to `end`; a single step uses `end`.
    pub fn linear(k: usize, start: f64, end: f64) -> Result<Self, DiffusionError> {
        if k == 0 {
            return Err(DiffusionError::InvalidSchedule("need at least one step".into()));
        }
        let betas = if k == 1 {
            vec![end]
        } else {
            (0..k).map(|i| start + (end - start) * i as f64 / (k - 1) as f64).collect()
        };
        Self::from_betas(betas)
    }

    /// Number of noising steps `K`.
    pub fn steps(&self) -> usize {
        self.betas.len()
    }

    /// `beta_k` for `k ∈ 1..=K`.
    pub fn beta(&self, k: usize) -> f64 {
        self.betas[k - 1]
    }

    pub fn alpha(&self, k: usize) -> f64 {
        1.0 - self.beta(k)
    }

    /// `alpha_bar_k` for `k ∈ 0..=K`.
    pub fn alpha_bar(&self, k: usize) -> f64 {
        self.alpha_bars[k]
    }

    pub fn check_step(&self, k: usize) -> Result<(), DiffusionError> {
        if k > self.steps() {
            Err(DiffusionError::StepOutOfRange { k, max: self.steps() })
        } else {
            Ok(())
        }
    }

    /// Reverse-time visiting order `K, K - stride, ..., 0`; the final
    /// jump to 0 may be shorter than `stride`.
    pub fn timesteps(&self, stride: usize) -> Vec<usize> {
        let stride = stride.max(1);
        let mut ks: Vec<usize> = (0..=self.steps()).rev().step_by(stride).collect();
        if ks.last() != Some(&0) {
            ks.push(0);
        }
        ks
    }
}

/// Linear betas from 1e-4 to 2e-2 over `k` steps.
pub fn default_schedule(k: usize) -> Result<NoiseSchedule, DiffusionError> {
    NoiseSchedule::linear(k, DEFAULT_BETA_START, DEFAULT_BETA_END)
}
