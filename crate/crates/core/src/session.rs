//! Ordered frame-stream processing against one reference pose.

use alloc::string::String;
use alloc::vec::Vec;

use crate::compare::{check_pair_set, compare_profiles, Feedback, Status};
use crate::config::ComparisonConfig;
use crate::error::CompareError;
use crate::profile::extract_profile;
use crate::reference::ReferencePose;
use crate::skeleton::PoseFrame;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SessionConfig {
    pub comparison: ComparisonConfig,
    /// Consecutive frames a correction must persist before it is emitted.
    /// `0` and `1` emit every frame as computed.
    pub debounce_frames: u32,
}

impl SessionConfig {
    pub fn new(comparison: ComparisonConfig, debounce_frames: u32) -> Self {
        Self {
            comparison,
            debounce_frames,
        }
    }
}

/// Holds back `Move*` statuses until they repeat for `n` frames in a row.
///
/// `Match`, `NotVisible` and `Indeterminate` pass straight through. A held-back
/// correction is replaced by the last emitted status, or by `Indeterminate`
/// when nothing has been emitted yet.
#[derive(Debug, Clone, Default)]
pub struct Debouncer {
    n: u32,
    last_emitted: Option<Status>,
    run_status: Option<Status>,
    run_len: u32,
}

impl Debouncer {
    pub fn new(n: u32) -> Self {
        Self {
            n,
            ..Self::default()
        }
    }

    pub fn push(&mut self, status: Status) -> Status {
        if self.run_status == Some(status) {
            self.run_len = self.run_len.saturating_add(1);
        } else {
            self.run_status = Some(status);
            self.run_len = 1;
        }
        let out = if !status.is_directional() || self.run_len >= self.n {
            status
        } else {
            self.last_emitted.unwrap_or(Status::Indeterminate)
        };
        self.last_emitted = Some(out);
        out
    }
}

/// Debounces one pair's status sequence. `n = 0` returns the input unchanged.
pub fn apply_debounce(statuses: &[Status], n: u32) -> Vec<Status> {
    let mut d = Debouncer::new(n);
    statuses.iter().map(|&s| d.push(s)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PairTally {
    pub match_frames: u64,
    /// Directional and `Indeterminate` verdicts.
    pub correction_frames: u64,
    pub not_visible_frames: u64,
}

impl PairTally {
    pub fn total(&self) -> u64 {
        self.match_frames + self.correction_frames + self.not_visible_frames
    }
}

/// Counts over an emitted feedback sequence.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SessionReport {
    pub frames_processed: u64,
    /// Frames with at least one visible pair.
    pub frames_usable: u64,
    /// Usable frames where every visible pair matched.
    pub full_match_frames: u64,
    /// In first-seen pair order.
    pub per_pair: Vec<(String, PairTally)>,
}

impl SessionReport {
    pub fn record(&mut self, feedback: &Feedback) {
        self.frames_processed += 1;
        if feedback.usable() {
            self.frames_usable += 1;
        }
        if feedback.full_match() {
            self.full_match_frames += 1;
        }
        for pf in &feedback.pairs {
            let idx = match self.per_pair.iter().position(|(id, _)| *id == pf.id) {
                Some(i) => i,
                None => {
                    self.per_pair.push((pf.id.clone(), PairTally::default()));
                    self.per_pair.len() - 1
                }
            };
            let tally = &mut self.per_pair[idx].1;
            match pf.status {
                Status::Match => tally.match_frames += 1,
                Status::NotVisible => tally.not_visible_frames += 1,
                _ => tally.correction_frames += 1,
            }
        }
    }

    pub fn tally(&self, id: &str) -> Option<&PairTally> {
        self.per_pair.iter().find(|(p, _)| p == id).map(|(_, t)| t)
    }
}

/// Tallies a feedback sequence.
pub fn aggregate_report<'a, I>(feedbacks: I) -> SessionReport
where
    I: IntoIterator<Item = &'a Feedback>,
{
    let mut report = SessionReport::default();
    for fb in feedbacks {
        report.record(fb);
    }
    report
}

/// Incremental session: push frames in arrival order, get one feedback each.
#[derive(Debug, Clone)]
pub struct Session {
    reference: ReferencePose,
    config: SessionConfig,
    debouncers: Vec<Debouncer>,
    report: SessionReport,
}

impl Session {
    /// Fails when the reference profile does not cover the configured pairs.
    pub fn new(reference: ReferencePose, config: SessionConfig) -> Result<Self, CompareError> {
        check_pair_set(&config.comparison, reference.profile())?;
        let debouncers = config
            .comparison
            .pairs()
            .iter()
            .map(|_| Debouncer::new(config.debounce_frames))
            .collect();
        Ok(Self {
            reference,
            config,
            debouncers,
            report: SessionReport::default(),
        })
    }

    pub fn reference(&self) -> &ReferencePose {
        &self.reference
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn push(&mut self, frame: &PoseFrame) -> Feedback {
        let cmp = &self.config.comparison;
        let user = extract_profile(frame, cmp);
        let mut fb = compare_profiles(self.reference.profile(), &user, cmp)
            .expect("profiles built from the session config share its pair set");
        fb.timestamp_ms = frame.timestamp_ms();
        for (pf, d) in fb.pairs.iter_mut().zip(&mut self.debouncers) {
            pf.status = d.push(pf.status);
        }
        self.report.record(&fb);
        fb
    }

    pub fn report(&self) -> &SessionReport {
        &self.report
    }

    pub fn finish(self) -> SessionReport {
        self.report
    }
}

/// Runs a whole stream: one feedback per frame, in order, plus the report.
pub fn process_stream<'a, I>(
    frames: I,
    reference: &ReferencePose,
    config: &SessionConfig,
) -> Result<(Vec<Feedback>, SessionReport), CompareError>
where
    I: IntoIterator<Item = &'a PoseFrame>,
{
    let mut session = Session::new(reference.clone(), config.clone())?;
    let feedback = frames.into_iter().map(|f| session.push(f)).collect();
    Ok((feedback, session.finish()))
}
