//! Skeleton data model: the 17 detector body parts, keypoints and frames.
//!
//! Coordinates are image pixels with the origin at the top-left corner,
//! `+x` pointing right and `+y` pointing down. Keypoints may lie outside the
//! image rectangle; only the detection score decides whether a joint is used.

use core::fmt;

use crate::error::FrameError;

/// One of the 17 body parts reported by common 2D pose detectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BodyPart {
    Nose,
    LeftEye,
    RightEye,
    LeftEar,
    RightEar,
    LeftShoulder,
    RightShoulder,
    LeftElbow,
    RightElbow,
    LeftWrist,
    RightWrist,
    LeftHip,
    RightHip,
    LeftKnee,
    RightKnee,
    LeftAnkle,
    RightAnkle,
}

impl BodyPart {
    pub const COUNT: usize = 17;

    /// All parts in canonical (detector) order.
    pub const ALL: [BodyPart; BodyPart::COUNT] = [
        BodyPart::Nose,
        BodyPart::LeftEye,
        BodyPart::RightEye,
        BodyPart::LeftEar,
        BodyPart::RightEar,
        BodyPart::LeftShoulder,
        BodyPart::RightShoulder,
        BodyPart::LeftElbow,
        BodyPart::RightElbow,
        BodyPart::LeftWrist,
        BodyPart::RightWrist,
        BodyPart::LeftHip,
        BodyPart::RightHip,
        BodyPart::LeftKnee,
        BodyPart::RightKnee,
        BodyPart::LeftAnkle,
        BodyPart::RightAnkle,
    ];

    /// Position of this part in [`BodyPart::ALL`].
    pub const fn index(self) -> usize {
        self as usize
    }

    /// The camelCase name used by detector exports (`"leftShoulder"`).
    pub const fn name(self) -> &'static str {
        match self {
            BodyPart::Nose => "nose",
            BodyPart::LeftEye => "leftEye",
            BodyPart::RightEye => "rightEye",
            BodyPart::LeftEar => "leftEar",
            BodyPart::RightEar => "rightEar",
            BodyPart::LeftShoulder => "leftShoulder",
            BodyPart::RightShoulder => "rightShoulder",
            BodyPart::LeftElbow => "leftElbow",
            BodyPart::RightElbow => "rightElbow",
            BodyPart::LeftWrist => "leftWrist",
            BodyPart::RightWrist => "rightWrist",
            BodyPart::LeftHip => "leftHip",
            BodyPart::RightHip => "rightHip",
            BodyPart::LeftKnee => "leftKnee",
            BodyPart::RightKnee => "rightKnee",
            BodyPart::LeftAnkle => "leftAnkle",
            BodyPart::RightAnkle => "rightAnkle",
        }
    }

    /// Exact, case-sensitive lookup by detector name.
    pub fn from_name(name: &str) -> Option<BodyPart> {
        BodyPart::ALL.into_iter().find(|p| p.name() == name)
    }

    /// The left/right partner of this part. `Nose` maps to itself.
    pub const fn mirror(self) -> BodyPart {
        match self {
            BodyPart::Nose => BodyPart::Nose,
            BodyPart::LeftEye => BodyPart::RightEye,
            BodyPart::RightEye => BodyPart::LeftEye,
            BodyPart::LeftEar => BodyPart::RightEar,
            BodyPart::RightEar => BodyPart::LeftEar,
            BodyPart::LeftShoulder => BodyPart::RightShoulder,
            BodyPart::RightShoulder => BodyPart::LeftShoulder,
            BodyPart::LeftElbow => BodyPart::RightElbow,
            BodyPart::RightElbow => BodyPart::LeftElbow,
            BodyPart::LeftWrist => BodyPart::RightWrist,
            BodyPart::RightWrist => BodyPart::LeftWrist,
            BodyPart::LeftHip => BodyPart::RightHip,
            BodyPart::RightHip => BodyPart::LeftHip,
            BodyPart::LeftKnee => BodyPart::RightKnee,
            BodyPart::RightKnee => BodyPart::LeftKnee,
            BodyPart::LeftAnkle => BodyPart::RightAnkle,
            BodyPart::RightAnkle => BodyPart::LeftAnkle,
        }
    }
}

impl fmt::Display for BodyPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A 2D point in image pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// One detected body part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Keypoint {
    pub part: BodyPart,
    pub x: f64,
    pub y: f64,
    /// Detection confidence in `[0, 1]`.
    pub score: f64,
}

impl Keypoint {
    pub const fn new(part: BodyPart, x: f64, y: f64, score: f64) -> Self {
        Self { part, x, y, score }
    }

    pub const fn position(&self) -> Point {
        Point::new(self.x, self.y)
    }

    fn check(&self) -> Result<(), FrameError> {
        if !(self.x.is_finite() && self.y.is_finite()) {
            return Err(FrameError::NonFiniteCoordinate(self.part));
        }
        if !(0.0..=1.0).contains(&self.score) {
            return Err(FrameError::OutOfRangeScore {
                part: self.part,
                score: self.score,
            });
        }
        Ok(())
    }
}

/// A full skeleton for one person in one image: every body part exactly once.
///
/// Keypoints are stored in canonical [`BodyPart::ALL`] order regardless of the
/// order they were supplied in.
#[derive(Debug, Clone, PartialEq)]
pub struct PoseFrame {
    timestamp_ms: i64,
    width: f64,
    height: f64,
    keypoints: [Keypoint; BodyPart::COUNT],
}

impl PoseFrame {
    /// Validates and builds a frame from keypoints given in any order.
    pub fn new<I>(timestamp_ms: i64, width: f64, height: f64, keypoints: I) -> Result<Self, FrameError>
    where
        I: IntoIterator<Item = Keypoint>,
    {
        if !(width.is_finite() && height.is_finite() && width > 0.0 && height > 0.0) {
            return Err(FrameError::InvalidDimensions { width, height });
        }
        let mut slots: [Option<Keypoint>; BodyPart::COUNT] = [None; BodyPart::COUNT];
        for kp in keypoints {
            kp.check()?;
            let slot = &mut slots[kp.part.index()];
            if slot.is_some() {
                return Err(FrameError::DuplicatePart(kp.part));
            }
            *slot = Some(kp);
        }
        let mut out = [Keypoint::new(BodyPart::Nose, 0.0, 0.0, 0.0); BodyPart::COUNT];
        for (part, slot) in BodyPart::ALL.into_iter().zip(slots) {
            out[part.index()] = slot.ok_or(FrameError::MissingPart(part))?;
        }
        Ok(Self {
            timestamp_ms,
            width,
            height,
            keypoints: out,
        })
    }

    pub fn timestamp_ms(&self) -> i64 {
        self.timestamp_ms
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    /// Keypoints in canonical order.
    pub fn keypoints(&self) -> &[Keypoint; BodyPart::COUNT] {
        &self.keypoints
    }

    pub fn keypoint(&self, part: BodyPart) -> &Keypoint {
        &self.keypoints[part.index()]
    }

    /// Same skeleton with a different timestamp.
    pub fn with_timestamp(&self, timestamp_ms: i64) -> Self {
        Self {
            timestamp_ms,
            ..self.clone()
        }
    }

    /// Applies `f` to every keypoint position. Fails if a result is not finite.
    pub fn map_positions<F>(&self, mut f: F) -> Result<Self, FrameError>
    where
        F: FnMut(BodyPart, Point) -> Point,
    {
        let moved = self.keypoints.iter().map(|kp| {
            let p = f(kp.part, kp.position());
            Keypoint::new(kp.part, p.x, p.y, kp.score)
        });
        PoseFrame::new(self.timestamp_ms, self.width, self.height, moved)
    }
}

/// Flips a frame horizontally: `x' = width - x` and every left part trades
/// places with its right partner. Scores, `y` and timestamp are unchanged.
pub fn mirror_frame(frame: &PoseFrame) -> PoseFrame {
    let mut keypoints = frame.keypoints;
    for kp in frame.keypoints.iter() {
        let part = kp.part.mirror();
        keypoints[part.index()] = Keypoint::new(part, frame.width - kp.x, kp.y, kp.score);
    }
    PoseFrame { keypoints, ..*frame }
}
