//! Closed-form Gaussian and Gaussian-mixture priors for the diffusion
//! sampler.
//!
//! Each Gaussian component keeps an eigendecomposition `Σ = U Λ Uᵀ` of its
//! covariance. Under the variance-preserving forward process every quantity
//! the sampler needs (noisy marginals, the reverse kernel, the posterior
//! mean of `x0`) is diagonal in that basis.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

use super::NoiseSchedule;
use crate::error::DiffusionError;

pub const DEMO_VARIANCE_FLOOR: f64 = 1e-6;
const SYMMETRY_TOL: f64 = 1e-9;

pub(crate) fn standard_normal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DVector<f64> {
    DVector::from_iterator(n, (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)))
}

#[derive(Debug, Clone, PartialEq)]
enum Basis {
    /// Axis-aligned (diagonal covariance).
    Identity,
    Dense(DMatrix<f64>),
}

/// Multivariate normal with an eigendecomposed covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct Gaussian {
    mean: DVector<f64>,
    basis: Basis,
    /// Eigenvalues of the covariance, in basis order.
    eigvals: DVector<f64>,
    /// Mean expressed in the eigenbasis.
    mean_eig: DVector<f64>,
}

/// Per-coordinate coefficients of the posterior over `x0` given `x_k`.
struct Posterior {
    /// `E[x0 | x_k]` in the eigenbasis.
    mean_eig: DVector<f64>,
}

impl Gaussian {
    pub fn diagonal(mean: DVector<f64>, variances: DVector<f64>) -> Result<Self, DiffusionError> {
        if mean.len() != variances.len() {
            return Err(DiffusionError::Dimension { expected: mean.len(), got: variances.len() });
        }
        if variances.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) || mean.iter().any(|m| !m.is_finite()) {
            return Err(DiffusionError::NotSpd);
        }
        Ok(Gaussian { mean_eig: mean.clone(), mean, basis: Basis::Identity, eigvals: variances })
    }

    pub fn isotropic(mean: DVector<f64>, variance: f64) -> Result<Self, DiffusionError> {
        let n = mean.len();
        Self::diagonal(mean, DVector::from_element(n, variance))
    }

    /// Full covariance; must be symmetric positive definite.
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self, DiffusionError> {
        let n = mean.len();
        if cov.nrows() != n || cov.ncols() != n {
            return Err(DiffusionError::Dimension { expected: n, got: cov.nrows() });
        }
        if mean.iter().chain(cov.iter()).any(|v| !v.is_finite()) {
            return Err(DiffusionError::NotSpd);
        }
        let scale = cov.amax().max(1.0);
        if (&cov - cov.transpose()).amax() > SYMMETRY_TOL * scale {
            return Err(DiffusionError::NotSpd);
        }
        if cov.clone().cholesky().is_none() {
            return Err(DiffusionError::NotSpd);
        }
        let eig = SymmetricEigen::new(cov);
        if eig.eigenvalues.iter().any(|&l| l <= 0.0) {
            return Err(DiffusionError::NotSpd);
        }
        let mean_eig = eig.eigenvectors.tr_mul(&mean);
        Ok(Gaussian { mean, basis: Basis::Dense(eig.eigenvectors), eigvals: eig.eigenvalues, mean_eig })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn covariance(&self) -> DMatrix<f64> {
        match &self.basis {
            Basis::Identity => DMatrix::from_diagonal(&self.eigvals),
            Basis::Dense(u) => u * DMatrix::from_diagonal(&self.eigvals) * u.transpose(),
        }
    }

    pub fn variances(&self) -> DVector<f64> {
        match &self.basis {
            Basis::Identity => self.eigvals.clone(),
            Basis::Dense(u) => DVector::from_iterator(
                self.dim(),
                u.row_iter().map(|row| row.iter().zip(self.eigvals.iter()).map(|(a, l)| a * a * l).sum()),
            ),
        }
    }

    fn to_eig(&self, x: &DVector<f64>) -> DVector<f64> {
        match &self.basis {
            Basis::Identity => x.clone(),
            Basis::Dense(u) => u.tr_mul(x),
        }
    }

    fn from_eig(&self, y: &DVector<f64>) -> DVector<f64> {
        match &self.basis {
            Basis::Identity => y.clone(),
            Basis::Dense(u) => u * y,
        }
    }

    /// Per-coordinate variance of `x_k` in the eigenbasis.
    fn noisy_var(&self, ab: f64) -> impl Iterator<Item = f64> + '_ {
        self.eigvals.iter().map(move |l| ab * l + (1.0 - ab))
    }

    /// `log N(x_k; √ᾱ μ, ᾱ Σ + (1 - ᾱ) I)`.
    fn log_noisy_density(&self, y: &DVector<f64>, ab: f64) -> f64 {
        let sab = ab.sqrt();
        self.noisy_var(ab)
            .zip(y.iter().zip(self.mean_eig.iter()))
            .map(|(s, (yi, mi))| {
                let r = yi - sab * mi;
                -0.5 * (r * r / s + (2.0 * PI * s).ln())
            })
            .sum()
    }

    fn posterior(&self, y: &DVector<f64>, ab: f64) -> Posterior {
        let sab = ab.sqrt();
        let mean_eig = DVector::from_iterator(
            self.dim(),
            self.eigvals.iter().zip(y.iter().zip(self.mean_eig.iter())).map(|(l, (yi, mi))| {
                let gain = sab * l / (ab * l + (1.0 - ab));
                mi + gain * (yi - sab * mi)
            }),
        );
        Posterior { mean_eig }
    }

    /// Samples `x_{k-1} | x_k` in the eigenbasis (exact linear-Gaussian
    /// posterior of the forward chain).
    fn reverse_eig<R: Rng + ?Sized>(
        &self,
        y: &DVector<f64>,
        k: usize,
        schedule: &NoiseSchedule,
        rng: &mut R,
    ) -> DVector<f64> {
        let ab = schedule.alpha_bar(k);
        let ab_prev = schedule.alpha_bar(k - 1);
        let (sab, sab_prev) = (ab.sqrt(), ab_prev.sqrt());
        let sa = schedule.alpha(k).sqrt();
        let beta = schedule.beta(k);
        DVector::from_iterator(
            self.dim(),
            self.eigvals.iter().zip(y.iter().zip(self.mean_eig.iter())).map(|(l, (yi, mi))| {
                let s_prev = ab_prev * l + (1.0 - ab_prev);
                let denom = ab * l + (1.0 - ab);
                let mean = sab_prev * mi + sa * s_prev / denom * (yi - sab * mi);
                let var = (s_prev * beta / denom).max(0.0);
                mean + var.sqrt() * rng.sample::<f64, _>(StandardNormal)
            }),
        )
    }

    /// Draws from the marginal of `x_k` (`k = 0` samples the Gaussian itself).
    fn sample_noisy<R: Rng + ?Sized>(&self, ab: f64, rng: &mut R) -> DVector<f64> {
        let sab = ab.sqrt();
        let y = DVector::from_iterator(
            self.dim(),
            self.noisy_var(ab)
                .zip(self.mean_eig.iter())
                .map(|(s, m)| sab * m + s.max(0.0).sqrt() * rng.sample::<f64, _>(StandardNormal)),
        );
        self.from_eig(&y)
    }

    fn standardized(&self, shift: &DVector<f64>, scale: &DVector<f64>) -> Result<Gaussian, DiffusionError> {
        let mean = (&self.mean - shift).component_div(scale);
        match &self.basis {
            Basis::Identity => {
                let var = self.eigvals.component_div(&scale.component_mul(scale));
                Gaussian::diagonal(mean, var)
            }
            Basis::Dense(_) => {
                let inv = DMatrix::from_diagonal(&scale.map(|s| 1.0 / s));
                let cov = &inv * self.covariance() * &inv;
                Gaussian::new(mean, (&cov + cov.transpose()) * 0.5)
            }
        }
    }
}

/// Weighted mixture of Gaussians.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMixture {
    log_weights: Vec<f64>,
    components: Vec<Gaussian>,
}

impl GaussianMixture {
    pub fn new(weighted: Vec<(f64, Gaussian)>) -> Result<Self, DiffusionError> {
        let Some((_, first)) = weighted.first() else {
            return Err(DiffusionError::InvalidPrior("mixture needs at least one component".into()));
        };
        let dim = first.dim();
        if let Some((_, g)) = weighted.iter().find(|(_, g)| g.dim() != dim) {
            return Err(DiffusionError::Dimension { expected: dim, got: g.dim() });
        }
        let total: f64 = weighted.iter().map(|(w, _)| *w).sum();
        if weighted.iter().any(|(w, _)| !(*w >= 0.0)) || (total - 1.0).abs() > 1e-9 {
            return Err(DiffusionError::InvalidPrior(format!("mixture weights must be nonnegative and sum to 1, got {total}")));
        }
        let (log_weights, components) = weighted.into_iter().map(|(w, g)| (w.ln(), g)).unzip();
        Ok(GaussianMixture { log_weights, components })
    }

    pub fn weights(&self) -> Vec<f64> {
        self.log_weights.iter().map(|l| l.exp()).collect()
    }

    pub fn components(&self) -> &[Gaussian] {
        &self.components
    }
}

/// The view prior: an exact stand-in for a trained denoiser.
#[derive(Debug, Clone, PartialEq)]
pub enum AnalyticPrior {
    Gaussian(Gaussian),
    Mixture(GaussianMixture),
    /// Gaussian fitted to demonstration vectors.
    DemoFit { gaussian: Gaussian, n_demos: usize },
}

fn log_sum_exp(values: &[f64]) -> f64 {
    let m = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + values.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}

impl AnalyticPrior {
    pub fn dim(&self) -> usize {
        self.components().next().map_or(0, |(_, g)| g.dim())
    }

    /// `(log weight, component)` pairs.
    fn components(&self) -> Box<dyn Iterator<Item = (f64, &Gaussian)> + '_> {
        match self {
            AnalyticPrior::Gaussian(g) | AnalyticPrior::DemoFit { gaussian: g, .. } => {
                Box::new(std::iter::once((0.0, g)))
            }
            AnalyticPrior::Mixture(m) => Box::new(m.log_weights.iter().cloned().zip(m.components.iter())),
        }
    }

    fn single(&self) -> Option<&Gaussian> {
        match self {
            AnalyticPrior::Gaussian(g) | AnalyticPrior::DemoFit { gaussian: g, .. } => Some(g),
            AnalyticPrior::Mixture(_) => None,
        }
    }

    fn check_dim(&self, x: &DVector<f64>) -> Result<(), DiffusionError> {
        if x.len() != self.dim() {
            Err(DiffusionError::Dimension { expected: self.dim(), got: x.len() })
        } else {
            Ok(())
        }
    }

    pub fn mean(&self) -> DVector<f64> {
        self.components()
            .map(|(lw, g)| g.mean() * lw.exp())
            .fold(DVector::zeros(self.dim()), |acc, v| acc + v)
    }

    /// Per-coordinate marginal variance.
    pub fn variances(&self) -> DVector<f64> {
        let mean = self.mean();
        let second = self
            .components()
            .map(|(lw, g)| (g.variances() + g.mean().component_mul(g.mean())) * lw.exp())
            .fold(DVector::zeros(self.dim()), |acc, v| acc + v);
        (second - mean.component_mul(&mean)).map(|v| v.max(0.0))
    }

    /// Posterior responsibilities of each component given `x_k`.
    fn responsibilities(&self, ys: &[DVector<f64>], ab: f64) -> Vec<f64> {
        let logs: Vec<f64> = self
            .components()
            .zip(ys)
            .map(|((lw, g), y)| lw + g.log_noisy_density(y, ab))
            .collect();
        let lse = log_sum_exp(&logs);
        logs.iter().map(|l| (l - lse).exp()).collect()
    }

    /// Exact `E[x0 | x_k]`. For `k = 0` this is `x_k` itself.
    pub fn posterior_mean_x0(
        &self,
        x_k: &DVector<f64>,
        k: usize,
        schedule: &NoiseSchedule,
    ) -> Result<DVector<f64>, DiffusionError> {
        schedule.check_step(k)?;
        self.check_dim(x_k)?;
        if k == 0 {
            return Ok(x_k.clone());
        }
        let ab = schedule.alpha_bar(k);
        if let Some(g) = self.single() {
            return Ok(g.from_eig(&g.posterior(&g.to_eig(x_k), ab).mean_eig));
        }
        let ys: Vec<DVector<f64>> = self.components().map(|(_, g)| g.to_eig(x_k)).collect();
        let resp = self.responsibilities(&ys, ab);
        Ok(self
            .components()
            .zip(&ys)
            .zip(resp)
            .map(|(((_, g), y), r)| g.from_eig(&g.posterior(y, ab).mean_eig) * r)
            .fold(DVector::zeros(self.dim()), |acc, v| acc + v))
    }

    /// Exact sample of `x_{k-1} | x_k`, `1 ≤ k ≤ K`.
    pub fn reverse_kernel_sample<R: Rng + ?Sized>(
        &self,
        x_k: &DVector<f64>,
        k: usize,
        schedule: &NoiseSchedule,
        rng: &mut R,
    ) -> Result<DVector<f64>, DiffusionError> {
        if k == 0 {
            return Err(DiffusionError::StepOutOfRange { k, max: schedule.steps() });
        }
        schedule.check_step(k)?;
        self.check_dim(x_k)?;
        if let Some(g) = self.single() {
            return Ok(g.from_eig(&g.reverse_eig(&g.to_eig(x_k), k, schedule, rng)));
        }
        let ab = schedule.alpha_bar(k);
        let ys: Vec<DVector<f64>> = self.components().map(|(_, g)| g.to_eig(x_k)).collect();
        let resp = self.responsibilities(&ys, ab);
        let c = categorical(&resp, rng);
        let (_, g) = self.components().nth(c).expect("component index in range");
        Ok(g.from_eig(&g.reverse_eig(&ys[c], k, schedule, rng)))
    }

    /// Draws from the law of `x_k` under the forward process started at
    /// the prior; `k = 0` samples the prior.
    pub fn sample_marginal<R: Rng + ?Sized>(
        &self,
        k: usize,
        schedule: &NoiseSchedule,
        rng: &mut R,
    ) -> Result<DVector<f64>, DiffusionError> {
        schedule.check_step(k)?;
        Ok(self.sample_at(schedule.alpha_bar(k), rng))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        self.sample_at(1.0, rng)
    }

    fn sample_at<R: Rng + ?Sized>(&self, ab: f64, rng: &mut R) -> DVector<f64> {
        let g = match self.single() {
            Some(g) => g,
            None => {
                let w: Vec<f64> = self.components().map(|(lw, _)| lw.exp()).collect();
                let c = categorical(&w, rng);
                self.components().nth(c).expect("component index in range").1
            }
        };
        g.sample_noisy(ab, rng)
    }

    /// Re-expresses the prior in per-coordinate standardized units
    /// (zero mean, unit marginal variance).
    pub fn standardize(&self) -> Result<(AnalyticPrior, Standardizer), DiffusionError> {
        let st = Standardizer::new(self.mean(), self.variances().map(|v| v.sqrt()));
        let prior = match self {
            AnalyticPrior::Gaussian(g) => AnalyticPrior::Gaussian(g.standardized(&st.shift, &st.scale)?),
            AnalyticPrior::DemoFit { gaussian, n_demos } => AnalyticPrior::DemoFit {
                gaussian: gaussian.standardized(&st.shift, &st.scale)?,
                n_demos: *n_demos,
            },
            AnalyticPrior::Mixture(m) => AnalyticPrior::Mixture(GaussianMixture {
                log_weights: m.log_weights.clone(),
                components: m
                    .components
                    .iter()
                    .map(|g| g.standardized(&st.shift, &st.scale))
                    .collect::<Result<_, _>>()?,
            }),
        };
        Ok((prior, st))
    }
}

/// Samples an index with probability proportional to `weights`.
pub(crate) fn categorical<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return i;
        }
        u -= w;
    }
    // Rounding left `u` past the end: take the last positive weight.
    weights.iter().rposition(|w| *w > 0.0).unwrap_or(weights.len() - 1)
}

/// Per-coordinate affine map between raw and standardized coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    shift: DVector<f64>,
    scale: DVector<f64>,
}

const MIN_SCALE: f64 = 1e-12;

impl Standardizer {
    pub fn new(shift: DVector<f64>, scale: DVector<f64>) -> Self {
        Standardizer { shift, scale: scale.map(|s| if s.is_finite() && s > MIN_SCALE { s } else { MIN_SCALE }) }
    }

    pub fn identity(dim: usize) -> Self {
        Standardizer { shift: DVector::zeros(dim), scale: DVector::from_element(dim, 1.0) }
    }

    pub fn to_standard(&self, x: &DVector<f64>) -> DVector<f64> {
        (x - &self.shift).component_div(&self.scale)
    }

    pub fn to_raw(&self, z: &DVector<f64>) -> DVector<f64> {
        z.component_mul(&self.scale) + &self.shift
    }
}

/// Diagonal Gaussian from demonstrations: sample mean and population
/// variance, floored at [`DEMO_VARIANCE_FLOOR`].
pub fn fit_demo_prior(demos: &[DVector<f64>]) -> Result<AnalyticPrior, DiffusionError> {
    let (mean, centered) = demo_moments(demos)?;
    let n = demos.len() as f64;
    let var = centered
        .iter()
        .fold(DVector::zeros(mean.len()), |acc: DVector<f64>, c| acc + c.component_mul(c))
        .map(|v| (v / n).max(DEMO_VARIANCE_FLOOR));
    Ok(AnalyticPrior::DemoFit { gaussian: Gaussian::diagonal(mean, var)?, n_demos: demos.len() })
}

/// Full-covariance Gaussian from demonstrations, shrunk towards its
/// diagonal: `Σ = (1 - s) S + s diag(max(S_ii, floor))`, `s ∈ (0, 1]`.
/// Keeps the temporal correlation that makes sampled trajectories smooth.
pub fn fit_demo_prior_shrunk(demos: &[DVector<f64>], shrinkage: f64) -> Result<AnalyticPrior, DiffusionError> {
    if !(shrinkage > 0.0 && shrinkage <= 1.0) {
        return Err(DiffusionError::InvalidPrior(format!("shrinkage must lie in (0, 1], got {shrinkage}")));
    }
    let (mean, centered) = demo_moments(demos)?;
    let d = mean.len();
    let n = demos.len() as f64;
    let mut cov = DMatrix::zeros(d, d);
    for c in &centered {
        cov.ger(1.0 / n, c, c, 1.0);
    }
    let mut shrunk = &cov * (1.0 - shrinkage);
    for i in 0..d {
        shrunk[(i, i)] += shrinkage * cov[(i, i)].max(DEMO_VARIANCE_FLOOR);
    }
    Ok(AnalyticPrior::DemoFit { gaussian: Gaussian::new(mean, shrunk)?, n_demos: demos.len() })
}

fn demo_moments(demos: &[DVector<f64>]) -> Result<(DVector<f64>, Vec<DVector<f64>>), DiffusionError> {
    if demos.len() < 2 {
        return Err(DiffusionError::TooFewDemos { need: 2, got: demos.len() });
    }
    let d = demos[0].len();
    if let Some(bad) = demos.iter().find(|x| x.len() != d) {
        return Err(DiffusionError::Dimension { expected: d, got: bad.len() });
    }
    let mean = demos.iter().fold(DVector::zeros(d), |acc, x| acc + x) / demos.len() as f64;
    let centered = demos.iter().map(|x| x - &mean).collect();
    Ok((mean, centered))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(xs)
    }

    #[test]
    fn fit_identical_demos_floors_variance() {
        let d = v(&[0.5, -1.0, 2.0]);
        let AnalyticPrior::DemoFit { gaussian, n_demos } = fit_demo_prior(&[d.clone(), d.clone()]).unwrap() else {
            panic!("expected demo fit");
        };
        assert_eq!(n_demos, 2);
        assert_eq!(gaussian.mean(), &d);
        assert_eq!(gaussian.variances(), DVector::from_element(3, DEMO_VARIANCE_FLOOR));
    }

    #[test]
    fn fit_two_point_demos() {
        let p = fit_demo_prior(&[v(&[-1.0]), v(&[1.0])]).unwrap();
        assert_eq!(p.mean()[0], 0.0);
        assert_eq!(p.variances()[0], 1.0);
        assert!(matches!(fit_demo_prior(&[v(&[1.0])]), Err(DiffusionError::TooFewDemos { .. })));
        assert!(fit_demo_prior(&[v(&[1.0]), v(&[1.0, 2.0])]).is_err());
    }

    #[test]
    fn fit_from_normal_draws() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let demos: Vec<_> = (0..100).map(|_| v(&[3.0 + 2.0 * rng.sample::<f64, _>(StandardNormal)])).collect();
        let p = fit_demo_prior(&demos).unwrap();
        assert!((p.mean()[0] - 3.0).abs() < 0.6);
        assert!((p.variances()[0] - 4.0).abs() < 1.2);
    }

    #[test]
    fn shrunk_fit_is_spd_even_when_rank_deficient() {
        let demos: Vec<_> = (0..3).map(|i| v(&[i as f64, 2.0 * i as f64, 0.0, 1.0])).collect();
        let p = fit_demo_prior_shrunk(&demos, 0.1).unwrap();
        assert_eq!(p.dim(), 4);
        assert!(fit_demo_prior_shrunk(&demos, 0.0).is_err());
    }

    #[test]
    fn covariance_validation() {
        let mean = v(&[0.0, 0.0]);
        let not_sym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert_eq!(Gaussian::new(mean.clone(), not_sym), Err(DiffusionError::NotSpd));
        let indefinite = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert_eq!(Gaussian::new(mean.clone(), indefinite), Err(DiffusionError::NotSpd));
        let ok = DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 0.5]);
        let g = Gaussian::new(mean, ok.clone()).unwrap();
        assert!((g.covariance() - ok).amax() < 1e-12);
    }

    #[test]
    fn mixture_weights_must_sum_to_one() {
        let g = Gaussian::isotropic(v(&[0.0]), 1.0).unwrap();
        assert!(GaussianMixture::new(vec![(0.5, g.clone()), (0.4, g.clone())]).is_err());
        assert!(GaussianMixture::new(vec![(0.5, g.clone()), (0.5, g)]).is_ok());
        assert!(GaussianMixture::new(vec![]).is_err());
    }

    #[test]
    fn standardize_round_trip() {
        let cov = DMatrix::from_row_slice(2, 2, &[4.0, 1.0, 1.0, 9.0]);
        let prior = AnalyticPrior::Gaussian(Gaussian::new(v(&[1.0, -2.0]), cov).unwrap());
        let (std_prior, st) = prior.standardize().unwrap();
        assert!(std_prior.mean().amax() < 1e-12);
        assert!((std_prior.variances() - DVector::from_element(2, 1.0)).amax() < 1e-12);
        let x = v(&[0.3, 7.0]);
        assert!((st.to_raw(&st.to_standard(&x)) - x).amax() < 1e-12);
    }

    #[test]
    fn categorical_respects_zero_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            assert_eq!(categorical(&[0.0, 1.0, 0.0], &mut rng), 1);
        }
    }
}
