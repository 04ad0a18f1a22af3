use std::path::PathBuf;

use thiserror::Error;

use crate::geom3d::CameraIntrinsics;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("invalid rotation: {0}")]
    InvalidRotation(&'static str),
    #[error("invalid camera intrinsics: {0:?}")]
    InvalidIntrinsics(CameraIntrinsics),
}

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid mesh: {0}")]
    Invalid(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiffusionError {
    #[error("diffusion step {k} outside 0..={max}")]
    StepOutOfRange { k: usize, max: usize },
    #[error("invalid stride: from step {from} to step {to}")]
    InvalidStride { from: usize, to: usize },
    #[error("covariance is not symmetric positive definite")]
    NotSpd,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("need at least {need} demonstrations, got {got}")]
    TooFewDemos { need: usize, got: usize },
    #[error("invalid prior: {0}")]
    InvalidPrior(String),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RewardError {
    #[error("horizon mismatch: {what} has length {got}, expected {expected}")]
    HorizonMismatch { what: &'static str, expected: usize, got: usize },
    #[error("invalid reward configuration: {0}")]
    Config(String),
}

#[derive(Debug, Error)]
pub enum PlannerError {
    #[error("invalid planner configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Diffusion(#[from] DiffusionError),
    #[error(transparent)]
    Reward(#[from] RewardError),
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid scene: {0}")]
    Scene(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Planner(#[from] PlannerError),
    #[error(transparent)]
    Diffusion(#[from] DiffusionError),
    #[error(transparent)]
    Reward(#[from] RewardError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}
