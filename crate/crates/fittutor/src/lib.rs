//! File formats, command-line tools and the streaming session server built on
//! [`fittutor_core`].

pub mod adapter;
pub mod cli;
pub mod format;
pub mod server;
pub mod wire;

pub use adapter::{adapt_external_keypoints, AdapterDefaults};
pub use format::{
    parse_config, parse_feedback, parse_frame, parse_reference, parse_report, parse_session_config, serialize_config,
    serialize_feedback, serialize_frame, serialize_reference, serialize_reference_pretty, serialize_report,
    serialize_session_config, FormatError,
};
