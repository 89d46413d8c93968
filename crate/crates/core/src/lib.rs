//! Discovery of word-level mispronunciation patterns from unsegmented
//! non-native phone sequences.
//!
//! Decoded phone strings (no word boundaries) are aligned against native
//! reference pronunciations, either with a global dynamic-programming
//! alignment ([`dpalign`]) or with attention-map boundary placement plus a
//! shift search ([`attnalign`]). The per-word realizations harvested by
//! either route are counted into a multi-pronunciation [`Lexicon`] by
//! [`lexbuild`]. [`synthbench`] generates synthetic corrupted corpora and
//! independent oracles used to verify the pipeline.
//!
//! Alignment costs are generic over any [`Cost`] scalar (integers, floats,
//! rationals) and attention weights over any [`Weight`] float; the aliases
//! below name the common instantiations.

pub mod attnalign;
pub mod dpalign;
pub mod error;
pub mod lexbuild;
pub mod phonecore;
pub mod scalar;
pub mod synthbench;

pub use attnalign::{
    align_word_boundaries, edit_distance, extract_variants_attn, place_boundaries, split_by_attention, AttentionMap,
    AttnConfig, AttnOutcome, Segmentation, ShiftMode,
};
pub use dpalign::{extract_variants_dp, nw_align, project_boundaries, AlignConfig, AlignOp, Alignment};
pub use error::{Error, ErrorKind, Result};
pub use lexbuild::{accumulate, merge, prune, stats, LexiconStats};
pub use phonecore::{
    AnyPhone, Lexicon, Origin, Phone, PhoneInventory, PhoneSequence, PhoneSet, Pronunciation, ReferenceDictionary,
    SegmentedUtterance, WordSpan,
};
pub use scalar::{Cost, Weight};

/// Integer alignment configuration; the unit-cost default is exact.
pub type AlignConfigI64 = AlignConfig<i64>;
/// Floating-point alignment configuration, as used by the command line.
pub type AlignConfigF64 = AlignConfig<f64>;
pub type AlignmentI64 = Alignment<i64>;
pub type AlignmentF64 = Alignment<f64>;
pub type AttentionMapF32 = AttentionMap<f32>;
pub type AttentionMapF64 = AttentionMap<f64>;
