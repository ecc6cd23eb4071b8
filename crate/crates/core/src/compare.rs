//! Reference-versus-user comparison and correction hints.
//!
//! A pair matches when both limbs are vertical, or when both slopes are finite
//! and differ by at most the tolerance (boundary included). Otherwise the
//! correction comes from the unit limb direction: arms are told to move up or
//! down from the vertical component, legs left or right from the horizontal
//! component. Directions are in camera image space (`+x` right, `+y` down).

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::config::{CompareMode, ComparisonConfig, JointPair, LimbClass};
use crate::error::CompareError;
use crate::profile::{LimbOrientation, ProfileEntry, SlopeProfile};

/// Verdict for one joint pair in one frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Match,
    MoveUp,
    MoveDown,
    MoveLeft,
    MoveRight,
    NotVisible,
    Indeterminate,
}

impl Status {
    pub const ALL: [Status; 7] = [
        Status::Match,
        Status::MoveUp,
        Status::MoveDown,
        Status::MoveLeft,
        Status::MoveRight,
        Status::NotVisible,
        Status::Indeterminate,
    ];

    pub const fn as_str(self) -> &'static str {
        match self {
            Status::Match => "Match",
            Status::MoveUp => "MoveUp",
            Status::MoveDown => "MoveDown",
            Status::MoveLeft => "MoveLeft",
            Status::MoveRight => "MoveRight",
            Status::NotVisible => "NotVisible",
            Status::Indeterminate => "Indeterminate",
        }
    }

    /// One of the four `Move*` corrections.
    pub const fn is_directional(self) -> bool {
        matches!(self, Status::MoveUp | Status::MoveDown | Status::MoveLeft | Status::MoveRight)
    }

    /// The status a horizontally flipped view would report.
    pub const fn mirrored(self) -> Status {
        match self {
            Status::MoveLeft => Status::MoveRight,
            Status::MoveRight => Status::MoveLeft,
            s => s,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Status {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        Status::ALL.into_iter().find(|st| st.as_str() == s).ok_or(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairFeedback {
    pub id: String,
    pub status: Status,
    /// `|user slope - reference slope|`, present iff both sides are valid and finite.
    pub deviation: Option<f64>,
}

/// Per-pair verdicts for one user frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Feedback {
    pub timestamp_ms: i64,
    pub pairs: Vec<PairFeedback>,
}

impl Feedback {
    pub fn get(&self, id: &str) -> Option<&PairFeedback> {
        self.pairs.iter().find(|p| p.id == id)
    }

    pub fn status(&self, id: &str) -> Option<Status> {
        self.get(id).map(|p| p.status)
    }

    /// At least one pair was visible.
    pub fn usable(&self) -> bool {
        self.pairs.iter().any(|p| p.status != Status::NotVisible)
    }

    /// Usable, and every visible pair matched.
    pub fn full_match(&self) -> bool {
        self.usable()
            && self
                .pairs
                .iter()
                .all(|p| matches!(p.status, Status::Match | Status::NotVisible))
    }
}

/// Direction hint for a pair that failed its tolerance test.
///
/// Arms compare the vertical unit component: a user limb pointing further down
/// the image than the reference yields `MoveUp`. Legs compare the horizontal
/// component: a user limb reaching further toward `+x` yields `MoveRight`.
/// Exact ties give `Indeterminate`.
pub fn make_suggestion(pair: &JointPair, reference: &ProfileEntry, user: &ProfileEntry) -> Status {
    let (u, r, more, less) = match pair.limb {
        LimbClass::Arm => (user.norm_dy, reference.norm_dy, Status::MoveUp, Status::MoveDown),
        LimbClass::Leg => (user.norm_dx, reference.norm_dx, Status::MoveRight, Status::MoveLeft),
    };
    if u > r {
        more
    } else if u < r {
        less
    } else {
        Status::Indeterminate
    }
}

/// Compares two profiles with the rule selected by `config.mode()`.
pub fn compare_profiles(
    reference: &SlopeProfile,
    user: &SlopeProfile,
    config: &ComparisonConfig,
) -> Result<Feedback, CompareError> {
    match config.mode() {
        CompareMode::Slope => compare_slope_mode(reference, user, config),
        CompareMode::Angle => compare_angle_mode(reference, user, config),
    }
}

/// Slope rule: `|user - reference| <= tolerance`, inclusive.
pub fn compare_slope_mode(
    reference: &SlopeProfile,
    user: &SlopeProfile,
    config: &ComparisonConfig,
) -> Result<Feedback, CompareError> {
    let tolerance = config.tolerance();
    compare_with(reference, user, config, |r, u| match (r, u) {
        (LimbOrientation::Vertical, LimbOrientation::Vertical) => true,
        (LimbOrientation::Finite(a), LimbOrientation::Finite(b)) => {
            within(libm::fabs(b - a), tolerance, rounding_slack(a, b, tolerance))
        }
        _ => false,
    })
}

/// Angle rule: the line orientations (folded to `(-90°, 90°]`) differ by at
/// most `angle_tolerance_deg`, measured the short way around.
pub fn compare_angle_mode(
    reference: &SlopeProfile,
    user: &SlopeProfile,
    config: &ComparisonConfig,
) -> Result<Feedback, CompareError> {
    let tolerance = config.angle_tolerance_deg();
    compare_with_entries(reference, user, config, |r, u| {
        let diff = line_angle_difference_deg(line_angle_deg(r), line_angle_deg(u));
        within(libm::fabs(diff), tolerance, rounding_slack(diff, tolerance, 180.0))
    })
}

/// Orientation of a limb's supporting line in degrees, in `(-90, 90]`.
pub fn line_angle_deg(entry: &ProfileEntry) -> f64 {
    let theta = libm::atan2(entry.norm_dy, entry.norm_dx).to_degrees();
    fold_line_angle(theta)
}

fn fold_line_angle(theta: f64) -> f64 {
    if theta > 90.0 {
        theta - 180.0
    } else if theta <= -90.0 {
        theta + 180.0
    } else {
        theta
    }
}

/// `user - reference` wrapped into `[-90, 90)`.
pub fn line_angle_difference_deg(reference: f64, user: f64) -> f64 {
    let d = user - reference;
    libm::fmod(libm::fmod(d + 90.0, 180.0) + 180.0, 180.0) - 90.0
}

fn within(deviation: f64, tolerance: f64, slack: f64) -> bool {
    deviation <= tolerance + slack
}

// Bound on the rounding error of one subtraction over operands of this size.
fn rounding_slack(a: f64, b: f64, c: f64) -> f64 {
    4.0 * f64::EPSILON * libm::fmax(libm::fmax(libm::fabs(a), libm::fabs(b)), libm::fabs(c))
}

fn compare_with<F>(
    reference: &SlopeProfile,
    user: &SlopeProfile,
    config: &ComparisonConfig,
    matches: F,
) -> Result<Feedback, CompareError>
where
    F: Fn(LimbOrientation, LimbOrientation) -> bool,
{
    compare_with_entries(reference, user, config, |r, u| match (r.orientation, u.orientation) {
        (Some(a), Some(b)) => matches(a, b),
        _ => false,
    })
}

fn compare_with_entries<F>(
    reference: &SlopeProfile,
    user: &SlopeProfile,
    config: &ComparisonConfig,
    matches: F,
) -> Result<Feedback, CompareError>
where
    F: Fn(&ProfileEntry, &ProfileEntry) -> bool,
{
    check_pair_set(config, reference)?;
    check_pair_set(config, user)?;
    let pairs = config
        .pairs()
        .iter()
        .zip(reference.entries().iter().zip(user.entries()))
        .map(|(pair, (r, u))| {
            let (ro, uo) = match (r.valid_orientation(), u.valid_orientation()) {
                (Some(ro), Some(uo)) => (ro, uo),
                _ => {
                    return PairFeedback {
                        id: pair.id().into(),
                        status: Status::NotVisible,
                        deviation: None,
                    }
                }
            };
            let deviation = match (ro, uo) {
                (LimbOrientation::Finite(a), LimbOrientation::Finite(b)) => Some(libm::fabs(b - a)),
                _ => None,
            };
            let status = if matches(r, u) {
                Status::Match
            } else {
                make_suggestion(pair, r, u)
            };
            PairFeedback {
                id: pair.id().into(),
                status,
                deviation,
            }
        })
        .collect();
    Ok(Feedback { timestamp_ms: 0, pairs })
}

/// Fails unless `profile` covers exactly the configured pairs, in order.
pub fn check_pair_set(config: &ComparisonConfig, profile: &SlopeProfile) -> Result<(), CompareError> {
    let same = config.pairs().len() == profile.len() && config.pairs().iter().map(|p| p.id()).eq(profile.pair_ids());
    if same {
        Ok(())
    } else {
        Err(CompareError::PairSetMismatch {
            expected: join_ids(config.pairs().iter().map(|p| p.id())),
            found: join_ids(profile.pair_ids()),
        })
    }
}

fn join_ids<'a>(ids: impl Iterator<Item = &'a str>) -> String {
    let mut out = String::new();
    for (i, id) in ids.enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(id);
    }
    out
}
