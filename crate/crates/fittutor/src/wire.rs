//! Session protocol messages and the per-connection state machine.
//!
//! Every message is one JSON text document with a `type` tag:
//!
//! ```text
//! client -> server  {"type":"hello","reference":<reference document | "name">,"config":<session config>?}
//!                   {"type":"frame","frame":<frame document>}
//!                   {"type":"close"}
//! server -> client  {"type":"feedback","feedback":<feedback document>}
//!                   {"type":"report","report":<report document>}
//!                   {"type":"error","code":"...","message":"..."}
//! ```
//!
//! The first client message must be `hello`. Each valid `frame` gets exactly
//! one `feedback`; `close` gets the session `report` and ends the session.

use std::fs;
use std::path::PathBuf;

use fittutor_core::{ComparisonConfig, Feedback, PoseFrame, ReferencePose, Session, SessionConfig, SessionReport};
use serde_json::{json, Value};

use crate::format::{FeedbackDoc, FrameDoc, ReferenceDoc, ReportDoc, SessionConfigDoc};

pub const BAD_HELLO: &str = "bad-hello";
pub const BAD_FRAME: &str = "bad-frame";
pub const BAD_MESSAGE: &str = "bad-message";

#[derive(Debug, Clone, PartialEq)]
pub enum ReferenceSource {
    Inline(Box<ReferencePose>),
    Named(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hello {
    pub reference: ReferenceSource,
    /// Comparison settings; `None` reuses the reference's own config.
    pub comparison: Option<ComparisonConfig>,
    pub debounce_frames: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub enum WireMessage {
    Hello(Hello),
    Frame(Box<PoseFrame>),
    Feedback(Feedback),
    Report(SessionReport),
    Error { code: String, message: String },
    Close,
}

/// A message that could not be decoded, with the protocol error code to send.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WireError {
    pub code: &'static str,
    pub message: String,
}

impl WireError {
    fn new(code: &'static str, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn into_message(self) -> WireMessage {
        WireMessage::Error {
            code: self.code.to_owned(),
            message: self.message,
        }
    }
}

impl WireMessage {
    pub fn error(code: &str, message: impl Into<String>) -> Self {
        WireMessage::Error {
            code: code.to_owned(),
            message: message.into(),
        }
    }

    pub fn encode(&self) -> String {
        let value = match self {
            WireMessage::Hello(h) => {
                let reference = match &h.reference {
                    ReferenceSource::Inline(r) => serde_json::to_value(ReferenceDoc::from_reference(r)),
                    ReferenceSource::Named(n) => Ok(Value::String(n.clone())),
                }
                .expect("reference serializes");
                let mut v = json!({"type": "hello", "reference": reference});
                let config = h.comparison.as_ref().map(|c| SessionConfig::new(c.clone(), h.debounce_frames));
                match config {
                    Some(c) => v["config"] = serde_json::to_value(SessionConfigDoc::from_config(&c)).expect("config serializes"),
                    None if h.debounce_frames > 0 => v["config"] = json!({"debounceFrames": h.debounce_frames}),
                    None => {}
                }
                v
            }
            WireMessage::Frame(f) => json!({"type": "frame", "frame": FrameDoc::from_frame(f)}),
            WireMessage::Feedback(f) => json!({"type": "feedback", "feedback": FeedbackDoc::from_feedback(f)}),
            WireMessage::Report(r) => json!({"type": "report", "report": ReportDoc::from_report(r)}),
            WireMessage::Error { code, message } => json!({"type": "error", "code": code, "message": message}),
            WireMessage::Close => json!({"type": "close"}),
        };
        value.to_string()
    }

    pub fn decode(text: &str) -> Result<WireMessage, WireError> {
        let mut value: Value =
            serde_json::from_str(text).map_err(|e| WireError::new(BAD_MESSAGE, format!("not a JSON document: {e}")))?;
        let Some(kind) = value.get("type").and_then(Value::as_str).map(str::to_owned) else {
            return Err(WireError::new(BAD_MESSAGE, "missing message type"));
        };
        let mut take = |key: &str| value.get_mut(key).map(Value::take);
        match kind.as_str() {
            "hello" => decode_hello(take("reference"), take("config")).map(WireMessage::Hello),
            "frame" => {
                let doc = take("frame").ok_or_else(|| WireError::new(BAD_FRAME, "missing frame"))?;
                serde_json::from_value::<FrameDoc>(doc)
                    .map_err(crate::format::FormatError::from)
                    .and_then(FrameDoc::into_frame)
                    .map(|f| WireMessage::Frame(Box::new(f)))
                    .map_err(|e| WireError::new(BAD_FRAME, e.to_string()))
            }
            "feedback" => {
                let doc = take("feedback").ok_or_else(|| WireError::new(BAD_MESSAGE, "missing feedback"))?;
                serde_json::from_value::<FeedbackDoc>(doc)
                    .map_err(crate::format::FormatError::from)
                    .and_then(FeedbackDoc::into_feedback)
                    .map(WireMessage::Feedback)
                    .map_err(|e| WireError::new(BAD_MESSAGE, e.to_string()))
            }
            "report" => {
                let doc = take("report").ok_or_else(|| WireError::new(BAD_MESSAGE, "missing report"))?;
                serde_json::from_value::<ReportDoc>(doc)
                    .map_err(crate::format::FormatError::from)
                    .and_then(ReportDoc::into_report)
                    .map(WireMessage::Report)
                    .map_err(|e| WireError::new(BAD_MESSAGE, e.to_string()))
            }
            "error" => {
                let code = take("code").and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
                let message = take("message").and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
                Ok(WireMessage::Error { code, message })
            }
            "close" => Ok(WireMessage::Close),
            other => Err(WireError::new(BAD_MESSAGE, format!("unknown message type `{other}`"))),
        }
    }
}

fn decode_hello(reference: Option<Value>, config: Option<Value>) -> Result<Hello, WireError> {
    let bad = |msg: String| WireError::new(BAD_HELLO, msg);
    let reference = match reference {
        Some(Value::String(name)) => ReferenceSource::Named(name),
        Some(doc @ Value::Object(_)) => {
            let doc: ReferenceDoc = serde_json::from_value(doc).map_err(|e| bad(format!("reference: {e}")))?;
            ReferenceSource::Inline(Box::new(doc.into_reference().map_err(|e| bad(format!("reference: {e}")))?))
        }
        Some(_) => return Err(bad("reference must be a document or a name".into())),
        None => return Err(bad("missing reference".into())),
    };
    let (comparison, debounce_frames) = match config {
        None | Some(Value::Null) => (None, 0),
        Some(doc) => serde_json::from_value::<SessionConfigDoc>(doc)
            .map_err(crate::format::FormatError::from)
            .and_then(SessionConfigDoc::into_parts)
            .map_err(|e| bad(format!("config: {e}")))?,
    };
    Ok(Hello {
        reference,
        comparison,
        debounce_frames,
    })
}

/// Resolves reference names sent in `hello`.
pub trait ReferenceStore: Send + Sync {
    fn load(&self, name: &str) -> Result<ReferencePose, String>;
}

/// Rejects every name; only inline references work.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoStore;

impl ReferenceStore for NoStore {
    fn load(&self, name: &str) -> Result<ReferencePose, String> {
        Err(format!("no reference store configured for `{name}`"))
    }
}

/// Loads `<dir>/<name>.json`.
#[derive(Debug, Clone)]
pub struct DirectoryStore {
    dir: PathBuf,
}

impl DirectoryStore {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }
}

impl ReferenceStore for DirectoryStore {
    fn load(&self, name: &str) -> Result<ReferencePose, String> {
        let plain = !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)) && !name.starts_with('.');
        if !plain {
            return Err(format!("invalid reference name `{name}`"));
        }
        let path = self.dir.join(format!("{name}.json"));
        let text = fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        crate::format::parse_reference(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

/// Builds the session a `hello` asks for. The reference is re-profiled under
/// the requested comparison settings, so any pair set is accepted.
pub fn open_session(hello: Hello, store: &dyn ReferenceStore) -> Result<Session, WireError> {
    let reference = match hello.reference {
        ReferenceSource::Inline(r) => *r,
        ReferenceSource::Named(name) => store.load(&name).map_err(|e| WireError::new(BAD_HELLO, e))?,
    };
    let comparison = hello.comparison.unwrap_or_else(|| reference.config().clone());
    let reference = reference.reconfigured(comparison.clone());
    Session::new(reference, SessionConfig::new(comparison, hello.debounce_frames))
        .map_err(|e| WireError::new(BAD_HELLO, e.to_string()))
}

/// What to send back after one inbound message.
#[derive(Debug, Default, PartialEq)]
pub struct Reply {
    pub messages: Vec<WireMessage>,
    /// The server ends the session after sending `messages`.
    pub close: bool,
}

impl Reply {
    fn one(msg: WireMessage) -> Self {
        Self {
            messages: vec![msg],
            close: false,
        }
    }

    fn closing(msg: WireMessage) -> Self {
        Self {
            messages: vec![msg],
            close: true,
        }
    }
}

enum State {
    AwaitHello,
    Active(Box<Session>),
    Closed,
}

/// One client session, independent of the transport.
pub struct ProtocolSession<'a> {
    store: &'a dyn ReferenceStore,
    state: State,
}

impl<'a> ProtocolSession<'a> {
    pub fn new(store: &'a dyn ReferenceStore) -> Self {
        Self {
            store,
            state: State::AwaitHello,
        }
    }

    pub fn is_closed(&self) -> bool {
        matches!(self.state, State::Closed)
    }

    pub fn on_text(&mut self, text: &str) -> Reply {
        let decoded = WireMessage::decode(text);
        match std::mem::replace(&mut self.state, State::Closed) {
            State::Closed => Reply {
                messages: Vec::new(),
                close: true,
            },
            State::AwaitHello => match decoded {
                Ok(WireMessage::Hello(hello)) => match open_session(hello, self.store) {
                    Ok(session) => {
                        self.state = State::Active(Box::new(session));
                        Reply::default()
                    }
                    Err(e) => Reply::closing(e.into_message()),
                },
                Ok(_) => Reply::closing(WireMessage::error(BAD_HELLO, "first message must be hello")),
                Err(e) => Reply::closing(WireMessage::error(BAD_HELLO, e.message)),
            },
            State::Active(mut session) => {
                let reply = match decoded {
                    Ok(WireMessage::Frame(frame)) => Reply::one(WireMessage::Feedback(session.push(&frame))),
                    Ok(WireMessage::Close) => {
                        return Reply::closing(WireMessage::Report(session.finish()));
                    }
                    Ok(WireMessage::Hello(_)) => Reply::one(WireMessage::error(BAD_MESSAGE, "session already started")),
                    Ok(_) => Reply::one(WireMessage::error(BAD_MESSAGE, "unexpected message from client")),
                    Err(e) => Reply::one(e.into_message()),
                };
                self.state = State::Active(session);
                reply
            }
        }
    }

    /// The transport went away; returns the report if a session was running.
    pub fn on_disconnect(&mut self) -> Option<WireMessage> {
        match std::mem::replace(&mut self.state, State::Closed) {
            State::Active(session) => Some(WireMessage::Report(session.finish())),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use fittutor_core::{BodyPart, Keypoint, PairSet, Status};

    fn frame(t: i64, elbow_y: f64) -> PoseFrame {
        let kps = BodyPart::ALL.map(|p| {
            let (x, y) = match p {
                BodyPart::LeftShoulder => (360.0, 120.0),
                BodyPart::LeftElbow => (440.0, elbow_y),
                BodyPart::RightShoulder => (280.0, 120.0),
                BodyPart::RightElbow => (200.0, 120.0),
                BodyPart::LeftHip => (340.0, 260.0),
                BodyPart::LeftAnkle => (350.0, 420.0),
                BodyPart::RightHip => (300.0, 260.0),
                BodyPart::RightAnkle => (290.0, 420.0),
                _ => (320.0, 40.0 + p.index() as f64),
            };
            Keypoint::new(p, x, y, 0.9)
        });
        PoseFrame::new(t, 640.0, 480.0, kps).unwrap()
    }

    fn hello() -> String {
        let r = ReferencePose::new("t", frame(0, 120.0), ComparisonConfig::default());
        WireMessage::Hello(Hello {
            reference: ReferenceSource::Inline(Box::new(r)),
            comparison: None,
            debounce_frames: 0,
        })
        .encode()
    }

    #[test]
    fn messages_round_trip() {
        let msgs = [
            WireMessage::Frame(Box::new(frame(5, 130.0))),
            WireMessage::Close,
            WireMessage::error(BAD_FRAME, "nope"),
            WireMessage::decode(&hello()).unwrap(),
            WireMessage::Hello(Hello {
                reference: ReferenceSource::Named("warrior".into()),
                comparison: Some(ComparisonConfig::default().with_pair_set(PairSet::Extended)),
                debounce_frames: 3,
            }),
        ];
        for m in msgs {
            assert_eq!(WireMessage::decode(&m.encode()).unwrap(), m);
        }
    }

    #[test]
    fn happy_path() {
        let mut s = ProtocolSession::new(&NoStore);
        assert_eq!(s.on_text(&hello()), Reply::default());
        let r = s.on_text(&WireMessage::Frame(Box::new(frame(1, 120.0))).encode());
        assert!(matches!(&r.messages[..], [WireMessage::Feedback(f)] if f.status("leftArm") == Some(Status::Match)));
        let r = s.on_text(&WireMessage::Frame(Box::new(frame(2, 250.0))).encode());
        assert!(matches!(&r.messages[..], [WireMessage::Feedback(f)] if f.status("leftArm") == Some(Status::MoveUp)));
        let r = s.on_text(&WireMessage::Close.encode());
        assert!(r.close);
        assert!(matches!(&r.messages[..], [WireMessage::Report(rep)] if rep.frames_processed == 2));
        assert!(s.is_closed());
    }

    #[test]
    fn frame_before_hello() {
        let mut s = ProtocolSession::new(&NoStore);
        let r = s.on_text(&WireMessage::Frame(Box::new(frame(1, 120.0))).encode());
        assert!(r.close);
        assert!(matches!(&r.messages[..], [WireMessage::Error { code, .. }] if code == BAD_HELLO));
    }

    #[test]
    fn unknown_name_is_bad_hello() {
        let mut s = ProtocolSession::new(&NoStore);
        let r = s.on_text(r#"{"type":"hello","reference":"squat"}"#);
        assert!(r.close);
        assert!(matches!(&r.messages[..], [WireMessage::Error { code, .. }] if code == BAD_HELLO));
    }

    #[test]
    fn corrupt_frame_keeps_session() {
        let mut s = ProtocolSession::new(&NoStore);
        s.on_text(&hello());
        let r = s.on_text(r#"{"type":"frame","frame":{"t":1}}"#);
        assert!(!r.close);
        assert!(matches!(&r.messages[..], [WireMessage::Error { code, .. }] if code == BAD_FRAME));
        let r = s.on_text("garbage");
        assert!(matches!(&r.messages[..], [WireMessage::Error { code, .. }] if code == BAD_MESSAGE));
        let r = s.on_text(&WireMessage::Frame(Box::new(frame(1, 120.0))).encode());
        assert!(matches!(&r.messages[..], [WireMessage::Feedback(_)]));
        assert!(matches!(s.on_disconnect(), Some(WireMessage::Report(rep)) if rep.frames_processed == 1));
    }

    #[test]
    fn directory_store_rejects_paths() {
        let store = DirectoryStore::new("/tmp");
        assert!(store.load("../etc/passwd").is_err());
        assert!(store.load("a/b").is_err());
        assert!(store.load("").is_err());
    }
}
