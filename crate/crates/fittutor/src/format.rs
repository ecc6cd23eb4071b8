//! Canonical JSON documents for frames, configs, references, feedback and
//! session reports.
//!
//! Serialization is deterministic: fixed key order, keypoints in canonical
//! body-part order, pair maps in config order, and shortest round-trip float
//! formatting. Parsing ignores unknown fields.

use fittutor_core::{
    BodyPart, CompareMode, ComparisonConfig, ConfigError, Feedback, FrameError, JointPair, Keypoint, LimbClass,
    LimbOrientation, PairFeedback, PairSet, PairTally, PoseFrame, ReferencePose, SessionConfig, SessionReport,
    SlopeProfile, Status,
};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed document: {0}")]
    MalformedDocument(String),
    #[error("unknown body part name `{0}`")]
    UnknownPartName(String),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("stored profile does not match the reference frame: {0}")]
    StaleProfile(String),
}

impl From<serde_json::Error> for FormatError {
    fn from(err: serde_json::Error) -> Self {
        FormatError::MalformedDocument(err.to_string())
    }
}

fn malformed(msg: impl Into<String>) -> FormatError {
    FormatError::MalformedDocument(msg.into())
}

fn to_json<T: Serialize>(doc: &T) -> String {
    serde_json::to_string(doc).expect("document types always serialize")
}

pub(crate) fn part_from_name(name: &str) -> Result<BodyPart, FormatError> {
    BodyPart::from_name(name).ok_or_else(|| FormatError::UnknownPartName(name.to_owned()))
}

// ---------------------------------------------------------------------------
// frames

#[derive(Serialize, Deserialize)]
pub(crate) struct FrameDoc {
    t: i64,
    w: f64,
    h: f64,
    keypoints: Vec<KeypointDoc>,
}

#[derive(Serialize, Deserialize)]
struct KeypointDoc {
    part: String,
    x: f64,
    y: f64,
    score: f64,
}

impl FrameDoc {
    pub(crate) fn from_frame(frame: &PoseFrame) -> Self {
        FrameDoc {
            t: frame.timestamp_ms(),
            w: frame.width(),
            h: frame.height(),
            keypoints: frame
                .keypoints()
                .iter()
                .map(|kp| KeypointDoc {
                    part: kp.part.name().to_owned(),
                    x: kp.x,
                    y: kp.y,
                    score: kp.score,
                })
                .collect(),
        }
    }

    pub(crate) fn into_frame(self) -> Result<PoseFrame, FormatError> {
        let keypoints = self
            .keypoints
            .into_iter()
            .map(|k| Ok(Keypoint::new(part_from_name(&k.part)?, k.x, k.y, k.score)))
            .collect::<Result<Vec<_>, FormatError>>()?;
        Ok(PoseFrame::new(self.t, self.w, self.h, keypoints)?)
    }
}

/// Parses a canonical frame document.
pub fn parse_frame(text: &str) -> Result<PoseFrame, FormatError> {
    serde_json::from_str::<FrameDoc>(text)?.into_frame()
}

pub fn serialize_frame(frame: &PoseFrame) -> String {
    to_json(&FrameDoc::from_frame(frame))
}

// ---------------------------------------------------------------------------
// comparison and session configs

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub(crate) struct ConfigDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    min_score: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pair_set: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pairs: Option<Vec<PairDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mode: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    angle_tolerance_deg: Option<f64>,
}

#[derive(Serialize, Deserialize, PartialEq)]
struct PairDoc {
    id: String,
    proximal: String,
    distal: String,
    limb: String,
}

impl PairDoc {
    fn from_pair(p: &JointPair) -> Self {
        PairDoc {
            id: p.id().to_owned(),
            proximal: p.proximal.name().to_owned(),
            distal: p.distal.name().to_owned(),
            limb: p.limb.as_str().to_owned(),
        }
    }

    fn into_pair(self) -> Result<JointPair, FormatError> {
        let limb = self
            .limb
            .parse::<LimbClass>()
            .map_err(|_| malformed(format!("unknown limb class `{}`", self.limb)))?;
        Ok(JointPair::custom(self.id, part_from_name(&self.proximal)?, part_from_name(&self.distal)?, limb))
    }
}

impl ConfigDoc {
    pub(crate) fn from_config(c: &ComparisonConfig) -> Self {
        ConfigDoc {
            tolerance: Some(c.tolerance()),
            min_score: Some(c.min_score()),
            pair_set: Some(c.pair_set().as_str().to_owned()),
            pairs: Some(c.pairs().iter().map(PairDoc::from_pair).collect()),
            mode: Some(c.mode().as_str().to_owned()),
            angle_tolerance_deg: Some(c.angle_tolerance_deg()),
        }
    }

    /// Missing fields take their defaults. A named pair set must agree with
    /// an explicit pair list when both are present.
    pub(crate) fn into_config(self) -> Result<ComparisonConfig, FormatError> {
        let defaults = ComparisonConfig::default();
        let set = match &self.pair_set {
            Some(name) => Some(
                name.parse::<PairSet>()
                    .map_err(|_| malformed(format!("unknown pair set `{name}`")))?,
            ),
            None => None,
        };
        let mode = match &self.mode {
            Some(name) => name
                .parse::<CompareMode>()
                .map_err(|_| malformed(format!("unknown mode `{name}`")))?,
            None => CompareMode::Slope,
        };
        let pairs = match self.pairs {
            Some(docs) => {
                let pairs = docs.into_iter().map(PairDoc::into_pair).collect::<Result<Vec<_>, _>>()?;
                if let Some(named) = set.filter(|s| *s != PairSet::Custom) {
                    if named.pairs() != pairs {
                        return Err(malformed(format!("pairs do not match pair set `{named}`")));
                    }
                }
                pairs
            }
            None => set.unwrap_or_default().pairs(),
        };
        let set = set.unwrap_or(if pairs == PairSet::Table2.pairs() {
            PairSet::Table2
        } else {
            PairSet::Custom
        });
        Ok(ComparisonConfig::new(
            self.tolerance.unwrap_or(defaults.tolerance()),
            self.min_score.unwrap_or(defaults.min_score()),
            set,
            pairs,
            mode,
            self.angle_tolerance_deg.unwrap_or(defaults.angle_tolerance_deg()),
        )?)
    }
}

pub fn parse_config(text: &str) -> Result<ComparisonConfig, FormatError> {
    serde_json::from_str::<ConfigDoc>(text)?.into_config()
}

pub fn serialize_config(config: &ComparisonConfig) -> String {
    to_json(&ConfigDoc::from_config(config))
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub(crate) struct SessionConfigDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    comparison: Option<ConfigDoc>,
    #[serde(default)]
    debounce_frames: u32,
}

impl SessionConfigDoc {
    pub(crate) fn from_config(c: &SessionConfig) -> Self {
        SessionConfigDoc {
            comparison: Some(ConfigDoc::from_config(&c.comparison)),
            debounce_frames: c.debounce_frames,
        }
    }

    /// `fallback` supplies the comparison settings when the document has none.
    pub(crate) fn into_config(self, fallback: &ComparisonConfig) -> Result<SessionConfig, FormatError> {
        let (comparison, debounce) = self.into_parts()?;
        Ok(SessionConfig::new(comparison.unwrap_or_else(|| fallback.clone()), debounce))
    }

    pub(crate) fn into_parts(self) -> Result<(Option<ComparisonConfig>, u32), FormatError> {
        let comparison = self.comparison.map(ConfigDoc::into_config).transpose()?;
        Ok((comparison, self.debounce_frames))
    }
}

pub fn parse_session_config(text: &str, fallback: &ComparisonConfig) -> Result<SessionConfig, FormatError> {
    serde_json::from_str::<SessionConfigDoc>(text)?.into_config(fallback)
}

pub fn serialize_session_config(config: &SessionConfig) -> String {
    to_json(&SessionConfigDoc::from_config(config))
}

// ---------------------------------------------------------------------------
// profiles and references

#[derive(Serialize, Deserialize, Debug, Clone, Copy, PartialEq)]
#[serde(untagged)]
enum SlopeDoc {
    Finite(f64),
    Tag(VerticalTag),
}

#[derive(Serialize, Deserialize, Debug, Clone, Copy, PartialEq)]
#[serde(rename_all = "lowercase")]
enum VerticalTag {
    Vertical,
}

#[derive(Serialize, Deserialize)]
struct ProfileEntryDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    slope: Option<SlopeDoc>,
    valid: bool,
}

fn profile_to_value(profile: &SlopeProfile) -> Value {
    let map: Map<String, Value> = profile
        .entries()
        .iter()
        .map(|e| {
            let slope = e.orientation.map(|o| match o {
                LimbOrientation::Finite(s) => SlopeDoc::Finite(s),
                LimbOrientation::Vertical => SlopeDoc::Tag(VerticalTag::Vertical),
            });
            let doc = ProfileEntryDoc { slope, valid: e.valid };
            (e.id.clone(), serde_json::to_value(doc).expect("profile entries serialize"))
        })
        .collect();
    Value::Object(map)
}

// The stored profile is a cache; it must agree with the recomputed one.
fn check_profile(stored: Map<String, Value>, computed: &SlopeProfile) -> Result<(), FormatError> {
    let ids: Vec<&str> = stored.keys().map(String::as_str).collect();
    let expected: Vec<&str> = computed.pair_ids().collect();
    if ids != expected {
        return Err(FormatError::StaleProfile(format!("pairs [{}] expected [{}]", ids.join(", "), expected.join(", "))));
    }
    for (id, value) in stored {
        let doc: ProfileEntryDoc = serde_json::from_value(value)?;
        let entry = computed.get(&id).expect("ids checked above");
        let slope_ok = match (doc.slope, entry.orientation) {
            (None, None) => true,
            (Some(SlopeDoc::Tag(VerticalTag::Vertical)), Some(LimbOrientation::Vertical)) => true,
            (Some(SlopeDoc::Finite(a)), Some(LimbOrientation::Finite(b))) => {
                (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
            }
            _ => false,
        };
        if !slope_ok || doc.valid != entry.valid {
            return Err(FormatError::StaleProfile(format!("entry `{id}` differs")));
        }
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
pub(crate) struct ReferenceDoc {
    name: String,
    frame: FrameDoc,
    config: ConfigDoc,
    profile: Map<String, Value>,
}

impl ReferenceDoc {
    pub(crate) fn from_reference(r: &ReferencePose) -> Self {
        let Value::Object(profile) = profile_to_value(r.profile()) else {
            unreachable!("profile_to_value builds an object")
        };
        ReferenceDoc {
            name: r.name().to_owned(),
            frame: FrameDoc::from_frame(r.frame()),
            config: ConfigDoc::from_config(r.config()),
            profile,
        }
    }

    pub(crate) fn into_reference(self) -> Result<ReferencePose, FormatError> {
        let frame = self.frame.into_frame()?;
        let config = self.config.into_config()?;
        let reference = ReferencePose::new(self.name, frame, config);
        check_profile(self.profile, reference.profile())?;
        Ok(reference)
    }
}

/// Parses a reference document, recomputing its profile from the stored
/// frame and config and rejecting a stored profile that disagrees.
pub fn parse_reference(text: &str) -> Result<ReferencePose, FormatError> {
    serde_json::from_str::<ReferenceDoc>(text)?.into_reference()
}

pub fn serialize_reference(reference: &ReferencePose) -> String {
    to_json(&ReferenceDoc::from_reference(reference))
}

/// Pretty-printed form for files meant to be read by people.
pub fn serialize_reference_pretty(reference: &ReferencePose) -> String {
    serde_json::to_string_pretty(&ReferenceDoc::from_reference(reference)).expect("document types always serialize")
}

// ---------------------------------------------------------------------------
// feedback

#[derive(Serialize, Deserialize)]
struct PairFeedbackDoc {
    status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    deviation: Option<f64>,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct FeedbackDoc {
    t: i64,
    pairs: Map<String, Value>,
}

impl FeedbackDoc {
    pub(crate) fn from_feedback(fb: &Feedback) -> Self {
        let pairs = fb
            .pairs
            .iter()
            .map(|p| {
                let doc = PairFeedbackDoc {
                    status: p.status.as_str().to_owned(),
                    deviation: p.deviation,
                };
                (p.id.clone(), serde_json::to_value(doc).expect("feedback serializes"))
            })
            .collect();
        FeedbackDoc { t: fb.timestamp_ms, pairs }
    }

    pub(crate) fn into_feedback(self) -> Result<Feedback, FormatError> {
        let pairs = self
            .pairs
            .into_iter()
            .map(|(id, v)| {
                let doc: PairFeedbackDoc = serde_json::from_value(v)?;
                let status = doc
                    .status
                    .parse::<Status>()
                    .map_err(|_| malformed(format!("unknown status `{}`", doc.status)))?;
                Ok(PairFeedback {
                    id,
                    status,
                    deviation: doc.deviation,
                })
            })
            .collect::<Result<Vec<_>, FormatError>>()?;
        Ok(Feedback {
            timestamp_ms: self.t,
            pairs,
        })
    }
}

pub fn parse_feedback(text: &str) -> Result<Feedback, FormatError> {
    serde_json::from_str::<FeedbackDoc>(text)?.into_feedback()
}

pub fn serialize_feedback(feedback: &Feedback) -> String {
    to_json(&FeedbackDoc::from_feedback(feedback))
}

// ---------------------------------------------------------------------------
// session report

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct TallyDoc {
    match_frames: u64,
    correction_frames: u64,
    not_visible_frames: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub(crate) struct ReportDoc {
    frames_processed: u64,
    frames_usable: u64,
    full_match_frames: u64,
    per_pair: Map<String, Value>,
}

impl ReportDoc {
    pub(crate) fn from_report(r: &SessionReport) -> Self {
        let per_pair = r
            .per_pair
            .iter()
            .map(|(id, t)| {
                let doc = TallyDoc {
                    match_frames: t.match_frames,
                    correction_frames: t.correction_frames,
                    not_visible_frames: t.not_visible_frames,
                };
                (id.clone(), serde_json::to_value(doc).expect("tallies serialize"))
            })
            .collect();
        ReportDoc {
            frames_processed: r.frames_processed,
            frames_usable: r.frames_usable,
            full_match_frames: r.full_match_frames,
            per_pair,
        }
    }

    pub(crate) fn into_report(self) -> Result<SessionReport, FormatError> {
        let per_pair = self
            .per_pair
            .into_iter()
            .map(|(id, v)| {
                let t: TallyDoc = serde_json::from_value(v)?;
                Ok((
                    id,
                    PairTally {
                        match_frames: t.match_frames,
                        correction_frames: t.correction_frames,
                        not_visible_frames: t.not_visible_frames,
                    },
                ))
            })
            .collect::<Result<Vec<_>, FormatError>>()?;
        Ok(SessionReport {
            frames_processed: self.frames_processed,
            frames_usable: self.frames_usable,
            full_match_frames: self.full_match_frames,
            per_pair,
        })
    }
}

pub fn parse_report(text: &str) -> Result<SessionReport, FormatError> {
    serde_json::from_str::<ReportDoc>(text)?.into_report()
}

pub fn serialize_report(report: &SessionReport) -> String {
    to_json(&ReportDoc::from_report(report))
}
