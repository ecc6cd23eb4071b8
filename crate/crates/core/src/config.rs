//! Joint pairs and comparison settings.

use alloc::borrow::Cow;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::ConfigError;
use crate::skeleton::BodyPart;

/// Which axis a limb's corrections are phrased along.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LimbClass {
    /// Corrections are up/down.
    Arm,
    /// Corrections are left/right.
    Leg,
}

impl LimbClass {
    pub const fn as_str(self) -> &'static str {
        match self {
            LimbClass::Arm => "arm",
            LimbClass::Leg => "leg",
        }
    }
}

impl FromStr for LimbClass {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "arm" => Ok(LimbClass::Arm),
            "leg" => Ok(LimbClass::Leg),
            _ => Err(()),
        }
    }
}

/// A limb segment running from `proximal` to `distal`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct JointPair {
    pub id: Cow<'static, str>,
    pub proximal: BodyPart,
    pub distal: BodyPart,
    pub limb: LimbClass,
}

impl JointPair {
    pub const fn new(id: &'static str, proximal: BodyPart, distal: BodyPart, limb: LimbClass) -> Self {
        Self {
            id: Cow::Borrowed(id),
            proximal,
            distal,
            limb,
        }
    }

    pub fn custom(id: impl Into<String>, proximal: BodyPart, distal: BodyPart, limb: LimbClass) -> Self {
        Self {
            id: Cow::Owned(id.into()),
            proximal,
            distal,
            limb,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    /// Whether `other` joins the left/right partners of this pair's endpoints.
    pub fn is_mirror_of(&self, other: &JointPair) -> bool {
        self.proximal.mirror() == other.proximal && self.distal.mirror() == other.distal
    }
}

pub const LEFT_ARM: JointPair = JointPair::new("leftArm", BodyPart::LeftShoulder, BodyPart::LeftElbow, LimbClass::Arm);
pub const RIGHT_ARM: JointPair = JointPair::new("rightArm", BodyPart::RightShoulder, BodyPart::RightElbow, LimbClass::Arm);
pub const LEFT_LEG: JointPair = JointPair::new("leftLeg", BodyPart::LeftHip, BodyPart::LeftAnkle, LimbClass::Leg);
pub const RIGHT_LEG: JointPair = JointPair::new("rightLeg", BodyPart::RightHip, BodyPart::RightAnkle, LimbClass::Leg);
pub const LEFT_FOREARM: JointPair = JointPair::new("leftForearm", BodyPart::LeftElbow, BodyPart::LeftWrist, LimbClass::Arm);
pub const RIGHT_FOREARM: JointPair = JointPair::new("rightForearm", BodyPart::RightElbow, BodyPart::RightWrist, LimbClass::Arm);

/// Named pair sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PairSet {
    /// Upper arms and hip-to-ankle legs.
    #[default]
    Table2,
    /// [`PairSet::Table2`] plus both forearms (elbow to wrist).
    Extended,
    /// A caller-supplied list.
    Custom,
}

impl PairSet {
    pub fn pairs(self) -> Vec<JointPair> {
        match self {
            PairSet::Table2 | PairSet::Custom => alloc::vec![LEFT_ARM, RIGHT_ARM, LEFT_LEG, RIGHT_LEG],
            PairSet::Extended => {
                alloc::vec![LEFT_ARM, RIGHT_ARM, LEFT_LEG, RIGHT_LEG, LEFT_FOREARM, RIGHT_FOREARM]
            }
        }
    }

    pub const fn as_str(self) -> &'static str {
        match self {
            PairSet::Table2 => "table2",
            PairSet::Extended => "extended",
            PairSet::Custom => "custom",
        }
    }
}

impl FromStr for PairSet {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "table2" => Ok(PairSet::Table2),
            "extended" => Ok(PairSet::Extended),
            "custom" => Ok(PairSet::Custom),
            _ => Err(()),
        }
    }
}

impl fmt::Display for PairSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How two limb orientations are judged equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CompareMode {
    /// Absolute slope difference within `tolerance`.
    #[default]
    Slope,
    /// Line-orientation angle difference within `angle_tolerance_deg`.
    Angle,
}

impl CompareMode {
    pub const fn as_str(self) -> &'static str {
        match self {
            CompareMode::Slope => "slope",
            CompareMode::Angle => "angle",
        }
    }
}

impl FromStr for CompareMode {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "slope" => Ok(CompareMode::Slope),
            "angle" => Ok(CompareMode::Angle),
            _ => Err(()),
        }
    }
}

pub const DEFAULT_TOLERANCE: f64 = 0.5;
pub const DEFAULT_MIN_SCORE: f64 = 0.5;
pub const DEFAULT_ANGLE_TOLERANCE_DEG: f64 = 15.0;

/// Settings for profile extraction and comparison.
///
/// Construct with [`ComparisonConfig::default`] and the `with_*` builders, or
/// [`ComparisonConfig::new`]; both validate.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonConfig {
    tolerance: f64,
    min_score: f64,
    pairs: Vec<JointPair>,
    pair_set: PairSet,
    mode: CompareMode,
    angle_tolerance_deg: f64,
}

impl Default for ComparisonConfig {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_TOLERANCE,
            min_score: DEFAULT_MIN_SCORE,
            pairs: PairSet::Table2.pairs(),
            pair_set: PairSet::Table2,
            mode: CompareMode::Slope,
            angle_tolerance_deg: DEFAULT_ANGLE_TOLERANCE_DEG,
        }
    }
}

impl ComparisonConfig {
    pub fn new(
        tolerance: f64,
        min_score: f64,
        pair_set: PairSet,
        pairs: Vec<JointPair>,
        mode: CompareMode,
        angle_tolerance_deg: f64,
    ) -> Result<Self, ConfigError> {
        let cfg = Self {
            tolerance,
            min_score,
            pairs,
            pair_set,
            mode,
            angle_tolerance_deg,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(ConfigError::Tolerance(self.tolerance));
        }
        if !(0.0..=1.0).contains(&self.min_score) {
            return Err(ConfigError::MinScore(self.min_score));
        }
        if !(self.angle_tolerance_deg.is_finite() && self.angle_tolerance_deg > 0.0) {
            return Err(ConfigError::AngleTolerance(self.angle_tolerance_deg));
        }
        if self.pairs.is_empty() {
            return Err(ConfigError::NoPairs);
        }
        for (i, pair) in self.pairs.iter().enumerate() {
            if pair.proximal == pair.distal {
                return Err(ConfigError::SelfPair(pair.id().into()));
            }
            if self.pairs[..i].iter().any(|p| p.id == pair.id) {
                return Err(ConfigError::DuplicatePairId(pair.id().into()));
            }
        }
        Ok(())
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Self, ConfigError> {
        self.tolerance = tolerance;
        self.validate().map(|_| self)
    }

    pub fn with_min_score(mut self, min_score: f64) -> Result<Self, ConfigError> {
        self.min_score = min_score;
        self.validate().map(|_| self)
    }

    pub fn with_angle_tolerance_deg(mut self, degrees: f64) -> Result<Self, ConfigError> {
        self.angle_tolerance_deg = degrees;
        self.validate().map(|_| self)
    }

    pub fn with_mode(mut self, mode: CompareMode) -> Self {
        self.mode = mode;
        self
    }

    /// Switches to a named set. `PairSet::Custom` keeps the current pairs.
    pub fn with_pair_set(mut self, set: PairSet) -> Self {
        if set != PairSet::Custom {
            self.pairs = set.pairs();
        }
        self.pair_set = set;
        self
    }

    pub fn with_pairs(mut self, pairs: Vec<JointPair>) -> Result<Self, ConfigError> {
        self.pairs = pairs;
        self.pair_set = PairSet::Custom;
        self.validate().map(|_| self)
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn min_score(&self) -> f64 {
        self.min_score
    }

    pub fn pairs(&self) -> &[JointPair] {
        &self.pairs
    }

    pub fn pair_set(&self) -> PairSet {
        self.pair_set
    }

    pub fn mode(&self) -> CompareMode {
        self.mode
    }

    pub fn angle_tolerance_deg(&self) -> f64 {
        self.angle_tolerance_deg
    }
}
