//! Slope-based comparison of 2D body skeletons against a reference pose.
//!
//! Keypoint frames come from any 17-part pose detector. For each configured
//! limb (a proximal/distal joint pair) the engine computes the segment slope,
//! compares it with the reference within a tolerance band, and turns
//! mismatches into up/down (arms) or left/right (legs) corrections.
//!
//! The crate is `no_std` and needs only `alloc`. Parsing, file formats and
//! transport live in the `fittutor` crate.
#![no_std]

extern crate alloc;

mod compare;
mod config;
mod error;
mod profile;
mod reference;
mod session;
mod skeleton;

pub use compare::{
    check_pair_set, compare_angle_mode, compare_profiles, compare_slope_mode, line_angle_deg,
    line_angle_difference_deg, make_suggestion, Feedback, PairFeedback, Status,
};
pub use config::{
    CompareMode, ComparisonConfig, JointPair, LimbClass, PairSet, DEFAULT_ANGLE_TOLERANCE_DEG, DEFAULT_MIN_SCORE,
    DEFAULT_TOLERANCE, LEFT_ARM, LEFT_FOREARM, LEFT_LEG, RIGHT_ARM, RIGHT_FOREARM, RIGHT_LEG,
};
pub use error::{CompareError, ConfigError, DegeneratePair, FrameError};
pub use profile::{
    compute_slope, extract_profile, validate_frame, InvalidPair, InvalidReason, LimbOrientation, ProfileEntry,
    SlopeProfile, ValidityReport, VERTICAL_EPSILON,
};
pub use reference::ReferencePose;
pub use session::{
    aggregate_report, apply_debounce, process_stream, Debouncer, PairTally, Session, SessionConfig, SessionReport,
};
pub use skeleton::{mirror_frame, BodyPart, Keypoint, Point, PoseFrame};
