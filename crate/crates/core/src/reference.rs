use alloc::string::String;

use crate::config::ComparisonConfig;
use crate::profile::{extract_profile, SlopeProfile};
use crate::skeleton::PoseFrame;

/// A stored trainer pose together with its precomputed profile.
///
/// The profile is always derived from `frame` and `config`, so it cannot drift
/// from the skeleton it describes.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferencePose {
    name: String,
    frame: PoseFrame,
    config: ComparisonConfig,
    profile: SlopeProfile,
}

impl ReferencePose {
    pub fn new(name: impl Into<String>, frame: PoseFrame, config: ComparisonConfig) -> Self {
        let profile = extract_profile(&frame, &config);
        Self {
            name: name.into(),
            frame,
            config,
            profile,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn frame(&self) -> &PoseFrame {
        &self.frame
    }

    pub fn config(&self) -> &ComparisonConfig {
        &self.config
    }

    pub fn profile(&self) -> &SlopeProfile {
        &self.profile
    }

    /// The same pose re-profiled under another config.
    pub fn reconfigured(&self, config: ComparisonConfig) -> Self {
        Self::new(self.name.clone(), self.frame.clone(), config)
    }
}
