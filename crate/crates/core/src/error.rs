use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad classification used to pick process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// The input text does not follow its file format.
    Format,
    /// The input is well formed but violates a cross-record constraint.
    Constraint,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("line {line}: duplicate phone `{symbol}`")]
    DuplicatePhone { symbol: String, line: usize },
    #[error("line {line}: `{symbol}` contains a reserved character (`#` or `|`)")]
    ReservedSymbol { symbol: String, line: usize },
    #[error("line {line}: invalid phone symbol `{symbol}`")]
    InvalidSymbol { symbol: String, line: usize },
    #[error("line {line}: unknown origin `{token}`, expected EN or L1")]
    BadOrigin { token: String, line: usize },
    #[error("phone inventory declares no phones")]
    EmptyInventory,
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("line {line}: unknown phone `{symbol}` in `{context}`")]
    UnknownPhone { symbol: String, context: String, line: usize },
    #[error("line {line}: duplicate utterance id `{utt_id}`")]
    DuplicateUtteranceId { utt_id: String, line: usize },
    #[error("line {line}: utterance `{utt_id}` has {spans} phone spans but {words} words")]
    SpanWordMismatch { utt_id: String, spans: usize, words: usize, line: usize },
    #[error("line {line}: utterance `{utt_id}` has an empty phone span at index {index}")]
    EmptySpan { utt_id: String, index: usize, line: usize },
    #[error("line {line}: invalid word `{word}`")]
    InvalidWord { word: String, line: usize },
    #[error("line {line}: bad count `{token}`")]
    BadCount { token: String, line: usize },
    #[error("line {line}: duplicate variant for `{word}`")]
    DuplicateVariant { word: String, line: usize },
    #[error("line {line}: bad number `{token}`")]
    BadNumber { token: String, line: usize },
    #[error("line {line}: utterance `{utt_id}`: {reason}")]
    DimensionMismatch { utt_id: String, line: usize, reason: String },
    #[error("line {line}: utterance `{utt_id}` has negative weight {value}")]
    NegativeWeight { utt_id: String, line: usize, value: String },
    #[error("line {line}: probability `{token}` is outside [0, 1]")]
    BadProbability { token: String, line: usize },
    #[error("empty pronunciation for word `{word}`")]
    EmptyPronunciation { word: String },
    #[error("word `{word}` is not in the reference dictionary")]
    OutOfVocabulary { word: String },
    #[error("phone `{symbol}` is not in the inventory")]
    InventoryMismatch { symbol: String },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("alignment covers {found_hyp}/{found_ref} phones but sequences have {hyp_len}/{ref_len}")]
    AlignmentReferenceMismatch { hyp_len: usize, ref_len: usize, found_hyp: usize, found_ref: usize },
    #[error("utterance `{utt_id}` has no counterpart")]
    MissingUtterance { utt_id: String },
    #[error("utterance `{utt_id}`: attention rows ({rows}) do not match the reference ({ref_len} phones)")]
    RowMismatch { utt_id: String, rows: usize, ref_len: usize },
    #[error("segmentations cover different lengths ({pred} vs {truth})")]
    LengthMismatch { pred: usize, truth: usize },
    #[error("exhaustive alignment limited to {limit} total phones, got {len}")]
    SizeBound { len: usize, limit: usize },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            SpanWordMismatch { .. }
            | EmptyPronunciation { .. }
            | OutOfVocabulary { .. }
            | InventoryMismatch { .. }
            | InvalidConfig(_)
            | AlignmentReferenceMismatch { .. }
            | MissingUtterance { .. }
            | RowMismatch { .. }
            | LengthMismatch { .. }
            | SizeBound { .. } => ErrorKind::Constraint,
            _ => ErrorKind::Format,
        }
    }
}
