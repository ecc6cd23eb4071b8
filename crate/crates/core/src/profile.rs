//! Limb slopes and per-frame slope profiles.

use alloc::string::String;
use alloc::vec::Vec;

use crate::config::{ComparisonConfig, JointPair};
use crate::error::DegeneratePair;
use crate::skeleton::{BodyPart, Point, PoseFrame};

/// Relative threshold below which a limb counts as vertical:
/// `|dx| < VERTICAL_EPSILON * limb_length`.
pub const VERTICAL_EPSILON: f64 = 1e-6;

/// Orientation of a limb segment in image coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimbOrientation {
    /// `dy / dx`, always finite.
    Finite(f64),
    Vertical,
}

impl LimbOrientation {
    pub fn slope(self) -> Option<f64> {
        match self {
            LimbOrientation::Finite(s) => Some(s),
            LimbOrientation::Vertical => None,
        }
    }
}

/// Slope of the segment `a -> b`. Symmetric in its arguments.
pub fn compute_slope(a: Point, b: Point) -> Result<LimbOrientation, DegeneratePair> {
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    let length = libm::hypot(dx, dy);
    if length == 0.0 {
        return Err(DegeneratePair);
    }
    Ok(orientation_from(dx, dy, length))
}

fn orientation_from(dx: f64, dy: f64, length: f64) -> LimbOrientation {
    if libm::fabs(dx) < VERTICAL_EPSILON * length {
        return LimbOrientation::Vertical;
    }
    let slope = dy / dx;
    // overflow is only possible for dx in the subnormal range, which the
    // vertical test already catches unless length itself is tiny
    if slope.is_finite() {
        LimbOrientation::Finite(slope)
    } else {
        LimbOrientation::Vertical
    }
}

/// Orientation data for one joint pair in one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileEntry {
    pub id: String,
    /// `None` only for zero-length limbs.
    pub orientation: Option<LimbOrientation>,
    /// Both endpoint scores reach `min_score` and the limb has length.
    pub valid: bool,
    /// `dx / length` (unit direction, proximal to distal).
    pub norm_dx: f64,
    /// `dy / length`.
    pub norm_dy: f64,
}

impl ProfileEntry {
    fn from_pair(pair: &JointPair, frame: &PoseFrame, min_score: f64) -> Self {
        let a = frame.keypoint(pair.proximal);
        let b = frame.keypoint(pair.distal);
        let dx = b.x - a.x;
        let dy = b.y - a.y;
        let length = libm::hypot(dx, dy);
        let confident = a.score >= min_score && b.score >= min_score;
        if length > 0.0 && length.is_finite() {
            ProfileEntry {
                id: pair.id().into(),
                orientation: Some(orientation_from(dx, dy, length)),
                valid: confident,
                norm_dx: dx / length,
                norm_dy: dy / length,
            }
        } else {
            ProfileEntry {
                id: pair.id().into(),
                orientation: None,
                valid: false,
                norm_dx: 0.0,
                norm_dy: 0.0,
            }
        }
    }

    /// Orientation, present only when the entry is valid.
    pub fn valid_orientation(&self) -> Option<LimbOrientation> {
        self.orientation.filter(|_| self.valid)
    }
}

/// Per-pair limb orientations of one frame, in config pair order.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeProfile {
    entries: Vec<ProfileEntry>,
}

impl SlopeProfile {
    pub fn from_entries(entries: Vec<ProfileEntry>) -> Self {
        Self { entries }
    }

    pub fn entries(&self) -> &[ProfileEntry] {
        &self.entries
    }

    pub fn get(&self, id: &str) -> Option<&ProfileEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn pair_ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.id.as_str())
    }

    pub fn valid_count(&self) -> usize {
        self.entries.iter().filter(|e| e.valid).count()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Builds the slope profile of `frame` over the configured joint pairs.
pub fn extract_profile(frame: &PoseFrame, config: &ComparisonConfig) -> SlopeProfile {
    let entries = config
        .pairs()
        .iter()
        .map(|pair| ProfileEntry::from_pair(pair, frame, config.min_score()))
        .collect();
    SlopeProfile { entries }
}

/// Why a pair cannot be compared in a frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvalidReason {
    /// The listed endpoint scored below `min_score`.
    LowScore(BodyPart),
    /// Both endpoints sit on the same pixel.
    ZeroLength,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvalidPair {
    pub id: String,
    pub reason: InvalidReason,
}

/// Which configured pairs a frame can support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidityReport {
    pub invalid: Vec<InvalidPair>,
    pub valid_pairs: usize,
    pub total_pairs: usize,
}

impl ValidityReport {
    /// At least one configured pair is comparable.
    pub fn usable(&self) -> bool {
        self.valid_pairs > 0
    }
}

/// Lists the pairs of `frame` that cannot be compared. Never fails.
pub fn validate_frame(frame: &PoseFrame, config: &ComparisonConfig) -> ValidityReport {
    let min = config.min_score();
    let invalid: Vec<_> = config
        .pairs()
        .iter()
        .filter_map(|pair| {
            let reason = [pair.proximal, pair.distal]
                .into_iter()
                .find(|&p| frame.keypoint(p).score < min)
                .map(InvalidReason::LowScore)
                .or_else(|| {
                    let a = frame.keypoint(pair.proximal);
                    let b = frame.keypoint(pair.distal);
                    let length = libm::hypot(b.x - a.x, b.y - a.y);
                    (!(length > 0.0 && length.is_finite())).then_some(InvalidReason::ZeroLength)
                })?;
            Some(InvalidPair {
                id: pair.id().into(),
                reason,
            })
        })
        .collect();
    let total = config.pairs().len();
    ValidityReport {
        valid_pairs: total - invalid.len(),
        total_pairs: total,
        invalid,
    }
}
