//! Phone symbols, inventories, utterances, reference dictionaries and
//! lexicons, with their line-oriented text formats.
//!
//! All formats are UTF-8 with LF line endings. Fields are tab separated and
//! phones within a field are space separated. `#` marks a word boundary
//! inside segmented references and starts a comment line in inventories.

mod dictionary;
mod inventory;
mod lexicon;
mod sequence;

use std::borrow::Borrow;
use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

pub use dictionary::{lookup_reference, parse_dictionary, ReferenceDictionary};
pub use inventory::{parse_inventory, Origin, PhoneInventory};
pub use lexicon::{emit_lexicon, emit_pairs, parse_lexicon, parse_pairs, Lexicon, PairRecord};
pub use sequence::{
    emit_phone_file, emit_segmented_file, parse_phone_file, parse_segmented_file, PhoneSequence, SegmentedUtterance,
    WordSpan,
};

/// Token separating word spans in segmented references.
pub const BOUNDARY: &str = "#";

/// Why a string cannot be used as a phone symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolProblem {
    Reserved,
    Invalid,
}

/// A phone symbol. Cloning is cheap.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Phone(Arc<str>);

impl Phone {
    pub fn new(symbol: &str) -> Result<Self, SymbolProblem> {
        check_symbol(symbol)?;
        Ok(Phone(Arc::from(symbol)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl Borrow<str> for Phone {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Phone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Phone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Symbols are printable ASCII without `#` or `|`. Because every character
/// sorts above the space separator, ordering phone lists element-wise agrees
/// with ordering their space-joined renderings byte-wise.
pub fn check_symbol(symbol: &str) -> Result<(), SymbolProblem> {
    if symbol.is_empty() || !symbol.bytes().all(|b| b.is_ascii_graphic()) {
        return Err(SymbolProblem::Invalid);
    }
    if symbol.contains(['#', '|']) {
        return Err(SymbolProblem::Reserved);
    }
    Ok(())
}

/// Resolves symbols read from files into phones.
pub trait PhoneSet {
    fn resolve(&self, symbol: &str) -> Option<Phone>;

    fn contains(&self, phone: &Phone) -> bool {
        self.resolve(phone.as_str()).is_some()
    }
}

/// Accepts any well-formed symbol. Used when no inventory file is supplied.
#[derive(Debug, Clone, Copy, Default)]
pub struct AnyPhone;

impl PhoneSet for AnyPhone {
    fn resolve(&self, symbol: &str) -> Option<Phone> {
        Phone::new(symbol).ok()
    }
}

/// An ordered list of phones naming one pronunciation of a word.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pronunciation(Vec<Phone>);

impl Pronunciation {
    pub fn new(phones: Vec<Phone>) -> Self {
        Pronunciation(phones)
    }

    /// Parses space-separated symbols, resolving each through `set`.
    pub fn parse(text: &str, set: &(impl PhoneSet + ?Sized)) -> Option<Self> {
        text.split_ascii_whitespace().map(|s| set.resolve(s)).collect::<Option<Vec<_>>>().map(Pronunciation)
    }

    pub fn phones(&self) -> &[Phone] {
        &self.0
    }

    pub fn into_phones(self) -> Vec<Phone> {
        self.0
    }
}

impl Deref for Pronunciation {
    type Target = [Phone];

    fn deref(&self) -> &[Phone] {
        &self.0
    }
}

impl From<Vec<Phone>> for Pronunciation {
    fn from(phones: Vec<Phone>) -> Self {
        Pronunciation(phones)
    }
}

impl From<&[Phone]> for Pronunciation {
    fn from(phones: &[Phone]) -> Self {
        Pronunciation(phones.to_vec())
    }
}

impl fmt::Display for Pronunciation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(p.as_str())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Pronunciation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

/// Numbered, non-blank lines (1-based), with a trailing `\r` removed.
pub(crate) fn numbered_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.split('\n')
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
        .filter(|(_, l)| !l.trim().is_empty())
}

pub(crate) fn is_valid_word(word: &str) -> bool {
    !word.is_empty() && !word.chars().any(char::is_whitespace)
}

pub(crate) fn resolve_phones(
    field: &str,
    set: &(impl PhoneSet + ?Sized),
    context: &str,
    line: usize,
) -> crate::Result<Vec<Phone>> {
    field
        .split_ascii_whitespace()
        .map(|s| {
            set.resolve(s).ok_or_else(|| crate::Error::UnknownPhone {
                symbol: s.to_string(),
                context: context.to_string(),
                line,
            })
        })
        .collect()
}

#[cfg(test)]
pub(crate) fn pron(text: &str) -> Pronunciation {
    Pronunciation::parse(text, &AnyPhone).expect("valid test pronunciation")
}
