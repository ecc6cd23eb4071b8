//! Conversion from the keypoint export shape used by browser pose detectors:
//! a list of `{"part", "position": {"x", "y"}, "score"}` entries.
//!
//! Accepted wrappers around that list: a bare array, `{"keypoints": [...]}`,
//! `{"pose": {"keypoints": [...]}}`, and an array of such poses (the first pose
//! is used). Optional `width`/`height` and `timestamp` keys on the wrapper
//! object are honoured; otherwise [`AdapterDefaults`] apply.

use fittutor_core::{Keypoint, PoseFrame};
use serde::Deserialize;
use serde_json::Value;

use crate::format::{part_from_name, FormatError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdapterDefaults {
    pub width: f64,
    pub height: f64,
}

impl Default for AdapterDefaults {
    fn default() -> Self {
        Self {
            width: 640.0,
            height: 480.0,
        }
    }
}

#[derive(Deserialize)]
struct ExternalKeypoint {
    part: String,
    position: ExternalPosition,
    score: f64,
}

#[derive(Deserialize)]
struct ExternalPosition {
    x: f64,
    y: f64,
}

fn number(obj: &serde_json::Map<String, Value>, keys: &[&str]) -> Option<f64> {
    keys.iter().find_map(|k| obj.get(*k)).and_then(Value::as_f64)
}

/// Walks the wrappers down to the keypoint list, collecting frame metadata.
fn locate(value: Value, meta: &mut (Option<f64>, Option<f64>, Option<i64>)) -> Result<Vec<Value>, FormatError> {
    match value {
        Value::Array(items) => {
            let is_pose_list = items
                .first()
                .and_then(Value::as_object)
                .is_some_and(|o| o.contains_key("pose") || o.contains_key("keypoints"));
            if is_pose_list {
                let first = items.into_iter().next().expect("checked non-empty");
                locate(first, meta)
            } else {
                Ok(items)
            }
        }
        Value::Object(mut obj) => {
            meta.0 = meta.0.or(number(&obj, &["width", "w"]));
            meta.1 = meta.1.or(number(&obj, &["height", "h"]));
            meta.2 = meta.2.or(obj.get("timestamp").or_else(|| obj.get("t")).and_then(Value::as_i64));
            if let Some(kps) = obj.remove("keypoints") {
                locate(kps, meta)
            } else if let Some(pose) = obj.remove("pose") {
                locate(pose, meta)
            } else {
                Err(FormatError::MalformedDocument("no keypoint list found".into()))
            }
        }
        _ => Err(FormatError::MalformedDocument("expected an array or object".into())),
    }
}

/// Builds a frame from an external 17-part export. Part names must match the
/// detector's camelCase names exactly.
pub fn adapt_external_keypoints(text: &str, defaults: AdapterDefaults) -> Result<PoseFrame, FormatError> {
    let value: Value = serde_json::from_str(text)?;
    let mut meta = (None, None, None);
    let items = locate(value, &mut meta)?;
    let keypoints = items
        .into_iter()
        .map(|item| {
            let kp: ExternalKeypoint = serde_json::from_value(item)?;
            Ok(Keypoint::new(part_from_name(&kp.part)?, kp.position.x, kp.position.y, kp.score))
        })
        .collect::<Result<Vec<_>, FormatError>>()?;
    let (width, height, t) = meta;
    Ok(PoseFrame::new(
        t.unwrap_or(0),
        width.unwrap_or(defaults.width),
        height.unwrap_or(defaults.height),
        keypoints,
    )?)
}
