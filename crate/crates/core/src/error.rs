use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid time range: t_end ({t_end}) must exceed t_start ({t_start})")]
    Range { t_start: u64, t_end: u64 },

    #[error("entry ({time}, {count}) lies outside [{t_start}, {t_end})")]
    EntryOutOfRange {
        time: u64,
        count: u64,
        t_start: u64,
        t_end: u64,
    },

    #[error("distribution contains no faults")]
    EmptyDistribution,

    #[error("checkpoint at {time} lies outside ({t_start}, {t_end})")]
    CheckpointOutOfRange { time: u64, t_start: u64, t_end: u64 },

    #[error("checkpoint times must be strictly increasing (found {prev} before {next})")]
    UnorderedPlan { prev: u64, next: u64 },

    #[error(
        "enumeration budget exceeded: C({n}, {k}) > {budget} combinations; use the dynamic program instead"
    )]
    BudgetExceeded { n: usize, k: usize, budget: u64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("inconsistent solution: {0}")]
    Inconsistent(String),

    #[error("no accesses of requested kind")]
    NoAccesses,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
