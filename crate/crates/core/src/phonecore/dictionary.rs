use indexmap::IndexMap;

use super::{is_valid_word, numbered_lines, resolve_phones, PhoneSet, Pronunciation, SegmentedUtterance};
use crate::{Error, Result};

/// Canonical pronunciations per word, in file order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReferenceDictionary {
    entries: IndexMap<String, Vec<Pronunciation>>,
}

impl ReferenceDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a pronunciation; repeats of a listed variant are ignored.
    pub fn insert(&mut self, word: impl Into<String>, pron: Pronunciation) -> Result<()> {
        let word = word.into();
        if pron.is_empty() {
            return Err(Error::EmptyPronunciation { word });
        }
        let variants = self.entries.entry(word).or_default();
        if !variants.contains(&pron) {
            variants.push(pron);
        }
        Ok(())
    }

    pub fn get(&self, word: &str) -> Option<&[Pronunciation]> {
        self.entries.get(word).map(Vec::as_slice)
    }

    /// First-listed pronunciation of `word`.
    pub fn canonical(&self, word: &str) -> Option<&Pronunciation> {
        self.entries.get(word).and_then(|v| v.first())
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[Pronunciation])> {
        self.entries.iter().map(|(w, v)| (w.as_str(), v.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Candidate reference pronunciations for each word of `seg`: the
    /// dictionary variants in file order, followed by the utterance's own
    /// span when the dictionary does not already list it.
    pub fn reference_candidates(&self, seg: &SegmentedUtterance) -> Vec<Vec<Pronunciation>> {
        seg.words()
            .iter()
            .map(|w| {
                let own = w.pronunciation();
                let mut cands = self.get(&w.word).map(<[_]>::to_vec).unwrap_or_default();
                if !cands.contains(&own) {
                    cands.push(own);
                }
                cands
            })
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (word, variants) in &self.entries {
            for v in variants {
                out.push_str(&format!("{word}\t{v}\n"));
            }
        }
        out
    }
}

/// All listed pronunciations of `word`, first = file-first.
pub fn lookup_reference<'a>(word: &str, dict: &'a ReferenceDictionary) -> Result<&'a [Pronunciation]> {
    dict.get(word).ok_or_else(|| Error::OutOfVocabulary { word: word.to_string() })
}

/// Parses `word<TAB>PH PH PH` lines; a word may repeat on several lines.
pub fn parse_dictionary(text: &str, set: &(impl PhoneSet + ?Sized)) -> Result<ReferenceDictionary> {
    let mut dict = ReferenceDictionary::new();
    for (line, content) in numbered_lines(text) {
        let (word, field) = content
            .split_once('\t')
            .ok_or_else(|| Error::MalformedLine { line, reason: "expected word<TAB>phones".into() })?;
        if !is_valid_word(word) {
            return Err(Error::InvalidWord { word: word.to_string(), line });
        }
        if field.contains('\t') {
            return Err(Error::MalformedLine { line, reason: "expected exactly two fields".into() });
        }
        let phones = resolve_phones(field, set, word, line)?;
        if phones.is_empty() {
            return Err(Error::MalformedLine { line, reason: format!("empty pronunciation for `{word}`") });
        }
        dict.insert(word, Pronunciation::new(phones))?;
    }
    Ok(dict)
}
