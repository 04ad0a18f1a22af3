//! Visibility-aware camera viewpoint planning.
//!
//! A raycast visibility reward over predicted query points is maximized by
//! reward-guided diffusion sampling: at every reverse step, candidate
//! proposals from an analytic view prior are scored by the reward of their
//! posterior-mean decode and one is kept by categorical resampling.

pub mod error;
pub mod geom3d;
pub mod mesh;
pub mod diffusion;
pub mod reward;
pub mod svdd;
pub mod seed;
pub mod sim;
pub mod coverage;
