use alloc::string::String;

use thiserror::Error;

use crate::skeleton::BodyPart;

/// Reasons a set of keypoints cannot form a [`PoseFrame`](crate::PoseFrame).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrameError {
    #[error("missing body part `{0}`")]
    MissingPart(BodyPart),
    #[error("body part `{0}` appears more than once")]
    DuplicatePart(BodyPart),
    #[error("score {score} for `{part}` is outside [0, 1]")]
    OutOfRangeScore { part: BodyPart, score: f64 },
    #[error("non-finite coordinate for `{0}`")]
    NonFiniteCoordinate(BodyPart),
    #[error("frame dimensions {width}x{height} must be finite and positive")]
    InvalidDimensions { width: f64, height: f64 },
}

/// Invalid [`ComparisonConfig`](crate::ComparisonConfig) contents.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("tolerance must be finite and > 0, got {0}")]
    Tolerance(f64),
    #[error("angle tolerance must be finite and > 0 degrees, got {0}")]
    AngleTolerance(f64),
    #[error("min score must be within [0, 1], got {0}")]
    MinScore(f64),
    #[error("pair list is empty")]
    NoPairs,
    #[error("pair id `{0}` is used more than once")]
    DuplicatePairId(String),
    #[error("pair `{0}` joins a body part to itself")]
    SelfPair(String),
}

/// Errors raised while comparing slope profiles.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompareError {
    /// Two profiles (or a profile and a config) cover different joint pairs.
    #[error("pair sets differ: expected [{expected}], found [{found}]")]
    PairSetMismatch { expected: String, found: String },
}

/// [`compute_slope`](crate::compute_slope) was handed two identical points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("zero-length limb: both endpoints coincide")]
pub struct DegeneratePair;
