use std::fmt;

/// Pipeline stage names used to tag failures and debug dumps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    Preprocess,
    Contour,
    Orientation,
    Transform,
    CorrectLsfp,
    XorRsfp,
    WristRemoval,
    Isolation,
    Features,
}

impl Stage {
    pub const ALL: [Stage; 9] = [
        Stage::Preprocess,
        Stage::Contour,
        Stage::Orientation,
        Stage::Transform,
        Stage::CorrectLsfp,
        Stage::XorRsfp,
        Stage::WristRemoval,
        Stage::Isolation,
        Stage::Features,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Preprocess => "preprocess",
            Stage::Contour => "contour",
            Stage::Orientation => "orientation",
            Stage::Transform => "transform",
            Stage::CorrectLsfp => "correct_lsfp",
            Stage::XorRsfp => "xor_rsfp",
            Stage::WristRemoval => "wrist_removal",
            Stage::Isolation => "isolation",
            Stage::Features => "features",
        }
    }
}

impl std::str::FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Stage::ALL
            .into_iter()
            .find(|st| st.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown stage `{s}`")))
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("segmentation failure: expected {expected} finger profiles, recovered {found}")]
    SegmentationFailure { expected: usize, found: usize },

    #[error("profile inconsistency: {outside} of {total} LSFP pixels lie outside the contour")]
    ProfileInconsistency { outside: usize, total: usize },

    #[error("wrist detection failure: {0}")]
    WristDetectionFailure(String),

    #[error("finger pairing failure: {0}")]
    PairingFailure(String),

    #[error("finger {finger} does not fit the {width}x{height} canvas")]
    CanvasOverflow { finger: usize, width: usize, height: usize },

    #[error("feature failure on finger {finger}: {reason}")]
    FeatureFailure { finger: usize, reason: String },

    #[error("zero-variance feature at column {0}")]
    ZeroVariance(usize),

    #[error("undefined correlation: constant vector")]
    UndefinedCorrelation,

    #[error("protocol violation: {0}")]
    ProtocolViolation(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::DegenerateInput(msg.into())
    }

    /// Wraps `self` with the pipeline stage it came from.
    pub fn at(self, stage: Stage) -> Self {
        match self {
            e @ Error::Stage { .. } => e,
            e => Error::Stage {
                stage,
                source: Box::new(e),
            },
        }
    }

    /// The stage tag, if this error carries one.
    pub fn stage(&self) -> Option<Stage> {
        match self {
            Error::Stage { stage, .. } => Some(*stage),
            _ => None,
        }
    }

    /// The innermost (untagged) error.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
