use alloc::boxed::Box;
use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("keypoint `{0}` is not in the registry")]
    MissingKeypoint(String),
    #[error("keypoint `{0}` appears more than once in the registry")]
    DuplicateKeypoint(String),
    #[error("keypoint `{0}` has no counterpart on the other side")]
    UnpairedKeypoint(String),
    #[error("registry already contains derived keypoint `{0}`")]
    AlreadyExtended(String),
    #[error("poses use different keypoint registries")]
    RegistryMismatch,
    #[error("expected {expected} coordinates, found {found}")]
    CoordinateCount { expected: usize, found: usize },
    #[error("coordinate of `{0}` is not finite")]
    NonFiniteCoordinate(String),
    #[error("degenerate measurement: {0}")]
    Degenerate(String),
    #[error("measurement value is not finite")]
    NonFiniteMeasurement,
    #[error("measurement in {found} cannot be binned by a spec in {expected}")]
    UnitMismatch {
        expected: &'static str,
        found: &'static str,
    },
    #[error("invalid binning spec for {kind}: {reason}")]
    InvalidBinning { kind: &'static str, reason: String },
    #[error("invalid definition: {0}")]
    InvalidDefinition(String),
    #[error("unknown posecode `{0}`")]
    UnknownPosecode(String),
    #[error("unknown category `{category}` for {kind}")]
    UnknownCategory { kind: String, category: String },
    #[error("no template for ({kind}, {category})")]
    MissingTemplate { kind: String, category: String },
    #[error("invalid template: {0}")]
    InvalidTemplate(String),
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("nothing to assemble")]
    EmptyCaption,
    #[error("cannot select {requested} poses out of {available}")]
    SampleTooLarge { requested: usize, available: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{stage} failed for pose `{pose_id}`: {source}")]
    Stage {
        stage: &'static str,
        pose_id: String,
        source: Box<Error>,
    },
    #[error("{context}: {source}")]
    Context { context: String, source: Box<Error> },
}

impl Error {
    pub(crate) fn at_stage(self, stage: &'static str, pose_id: &str) -> Self {
        Error::Stage {
            stage,
            pose_id: pose_id.into(),
            source: Box::new(self),
        }
    }

    pub(crate) fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }
}
