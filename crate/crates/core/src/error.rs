use std::fmt;
use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Row sum rendered with nine decimals, trailing zeros trimmed, so that
/// `0.95 + 0.1` reads as `1.05` in diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowSum(pub f64);

impl fmt::Display for RowSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = format!("{:.9}", self.0);
        let s = s.trim_end_matches('0').trim_end_matches('.');
        f.write_str(s)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("row sum {sum} for state {state}")]
    TransitionRowSum { state: String, sum: RowSum },
    #[error("emission row sum {sum} for state {state}")]
    EmissionRowSum { state: String, sum: RowSum },
    #[error("initial probabilities sum to {sum}")]
    InitialSum { sum: RowSum },
    #[error("probability {value} out of range [0, 1] in {context}")]
    ProbabilityOutOfRange { context: String, value: f64 },
    #[error("empty alphabet")]
    EmptyAlphabet,
    #[error("model has no states")]
    NoStates,
    #[error("alphabet symbol {0:?} must be a single character")]
    BadSymbol(String),
    #[error("duplicate alphabet symbol {0:?}")]
    DuplicateSymbol(char),
    #[error("duplicate state id {0:?}")]
    DuplicateState(String),
    #[error("color list entry {index} has id {id}; ids must be 0..C in order")]
    BadColorId { index: usize, id: usize },
    #[error("state {state} references unknown color {color}")]
    UnknownColor { state: String, color: usize },
    #[error("unknown state {name:?} referenced in {context}")]
    UnknownState { name: String, context: String },
    #[error("unknown symbol {symbol:?} in emission of state {state}")]
    UnknownEmissionSymbol { state: String, symbol: String },
    #[error("symbol {symbol:?} at position {position} is not in the model alphabet")]
    SymbolNotInAlphabet { symbol: char, position: usize },
    #[error("symbol index {index} at position {position} is out of range")]
    SymbolIndexOutOfRange { index: usize, position: usize },
    #[error("empty sequence")]
    EmptySequence,
    #[error("sequence has zero likelihood under the model")]
    ZeroLikelihood,
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("color graph has no allowed start color")]
    NoStartColor,
    #[error("no color-graph-feasible annotation of this length exists")]
    NoFeasibleAnnotation,
    #[error("instance too large for brute force: {size} exceeds limit {limit}")]
    InstanceTooLarge { size: f64, limit: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid segments: {0}")]
    InvalidSegments(String),
    #[error("unknown subtype {0:?}")]
    UnknownSubtype(String),
    #[error("invalid alignment: {0}")]
    InvalidAlignment(String),
    #[error("{path}:{line}: {message}")]
    Parse { path: String, line: usize, message: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("model file: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_sum_display_trims() {
        assert_eq!(RowSum(0.95 + 0.1).to_string(), "1.05");
        assert_eq!(RowSum(1.0).to_string(), "1");
        assert_eq!(RowSum(0.5).to_string(), "0.5");
    }
}
