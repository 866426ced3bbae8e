use crate::model::Day;

/// Errors raised by the estimation pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matched pair {pair_id}: shared day range has {overlap} days, need at least 3")]
    OverlapTooShort { pair_id: u64, overlap: usize },

    #[error("role mismatch building pair {pair_id}: treated must carry the event indicator, control must not")]
    RoleMismatch { pair_id: u64 },

    #[error("eta must lie in [0, 1), got {0}")]
    InvalidEta(f64),

    #[error("unit {unit_id}: event time {day} outside the observed day range")]
    EventOutOfRange { unit_id: String, day: Day },

    #[error("unit {unit_id}: event indicator and event time disagree")]
    EventInconsistent { unit_id: String },

    #[error("penalized normal equations are numerically singular")]
    SingularDesign,

    #[error("all units share one event-indicator value; nothing to fit")]
    NoVariation,

    #[error("covariate dimension mismatch: model expects {expected}, unit {unit_id} has {got}")]
    DimensionMismatch {
        expected: usize,
        unit_id: String,
        got: usize,
    },

    #[error("pair {pair_id}: fewer than 4 days observed before the event")]
    WindowTooShort { pair_id: u64 },

    #[error("degenerate input: pooled absolute differences are identically zero")]
    DegenerateInput,

    #[error("too few units: need at least {needed} {stratum} units, got {got}")]
    TooFewUnits {
        needed: usize,
        got: usize,
        stratum: &'static str,
    },

    #[error("pilot and analysis sets overlap ({0} shared units)")]
    PilotOverlap(usize),

    #[error("no pair has data at relative day {0}")]
    EmptyWindow(Day),

    #[error("unknown scenario {0}; expected 1, 2 or 3")]
    UnknownScenario(u8),

    #[error("unknown contamination model {0}; expected f1, f2, f3 or f4")]
    UnknownContamination(String),

    #[error("tradezone total {total} smaller than the number of DMAs {dmas}")]
    TotalTooSmall { total: usize, dmas: usize },

    #[error("no DMA has a snowfall day above the treatment threshold")]
    NoTreatedDmas,

    #[error("no DMA stays below the control snowfall threshold")]
    NoControlDmas,

    #[error("schema error in {file}: {message}")]
    Schema { file: String, message: String },

    #[error("duplicate (unit, day) row: unit {unit_id}, day {day}")]
    DuplicateRow { unit_id: String, day: Day },

    #[error("unit {unit_id}: outcome days are not a contiguous range")]
    NonContiguousDays { unit_id: String },

    #[error("event row references unknown unit {unit_id}")]
    DanglingEvent { unit_id: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
