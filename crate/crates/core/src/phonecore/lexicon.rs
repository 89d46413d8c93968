use std::collections::BTreeMap;

use super::{is_valid_word, numbered_lines, resolve_phones, PhoneSet, Pronunciation, ReferenceDictionary};
use crate::{Error, Result};

/// Word to counted pronunciation variants.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: BTreeMap<String, BTreeMap<Pronunciation, u64>>,
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every dictionary pronunciation with the given count.
    pub fn from_dictionary(dict: &ReferenceDictionary, count: u64) -> Self {
        let mut lex = Lexicon::new();
        for (word, variants) in dict.iter() {
            for v in variants {
                lex.add_unchecked(word, v.clone(), count);
            }
        }
        lex
    }

    /// Adds `count` occurrences of `(word, pron)`.
    pub fn add(&mut self, word: &str, pron: Pronunciation, count: u64) -> Result<()> {
        if pron.is_empty() {
            return Err(Error::EmptyPronunciation { word: word.to_string() });
        }
        self.add_unchecked(word, pron, count);
        Ok(())
    }

    pub(crate) fn add_unchecked(&mut self, word: &str, pron: Pronunciation, count: u64) {
        let variants = match self.entries.get_mut(word) {
            Some(v) => v,
            None => self.entries.entry(word.to_string()).or_default(),
        };
        *variants.entry(pron).or_insert(0) += count;
    }

    pub fn count(&self, word: &str, pron: &Pronunciation) -> Option<u64> {
        self.entries.get(word).and_then(|v| v.get(pron)).copied()
    }

    pub fn contains(&self, word: &str, pron: &Pronunciation) -> bool {
        self.count(word, pron).is_some()
    }

    pub fn variants(&self, word: &str) -> Option<&BTreeMap<Pronunciation, u64>> {
        self.entries.get(word)
    }

    /// Number of `(word, variant)` pairs.
    pub fn entry_count(&self) -> usize {
        self.entries.values().map(BTreeMap::len).sum()
    }

    pub fn word_count(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = (&str, &BTreeMap<Pronunciation, u64>)> {
        self.entries.iter().map(|(w, v)| (w.as_str(), v))
    }

    /// All `(word, pronunciation, count)` triples, word-major.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &Pronunciation, u64)> {
        self.entries.iter().flat_map(|(w, v)| v.iter().map(move |(p, &c)| (w.as_str(), p, c)))
    }
}

/// One line of a pairs or lexicon file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairRecord {
    pub word: String,
    pub count: u64,
    pub pronunciation: Pronunciation,
}

/// `word<TAB>count<TAB>PH PH ...`, sorted by word, then count descending,
/// then pronunciation.
pub fn emit_lexicon(lex: &Lexicon) -> String {
    let mut out = String::new();
    for (word, variants) in &lex.entries {
        let mut rows: Vec<(u64, String)> = variants.iter().map(|(p, &c)| (c, p.to_string())).collect();
        rows.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
        for (count, pron) in rows {
            out.push_str(&format!("{word}\t{count}\t{pron}\n"));
        }
    }
    out
}

/// Pair records in the order given, in lexicon line format.
pub fn emit_pairs<'a>(records: impl IntoIterator<Item = (&'a str, &'a Pronunciation, u64)>) -> String {
    let mut out = String::new();
    for (word, pron, count) in records {
        out.push_str(&format!("{word}\t{count}\t{pron}\n"));
    }
    out
}

/// Parses lexicon-format lines without merging repeats.
pub fn parse_pairs(text: &str, set: &(impl PhoneSet + ?Sized)) -> Result<Vec<PairRecord>> {
    let mut out = Vec::new();
    for (line, content) in numbered_lines(text) {
        let fields: Vec<&str> = content.split('\t').collect();
        let [word, count, phones] = fields.as_slice() else {
            return Err(Error::MalformedLine { line, reason: "expected word<TAB>count<TAB>phones".into() });
        };
        if !is_valid_word(word) {
            return Err(Error::InvalidWord { word: word.to_string(), line });
        }
        let count: u64 = count.trim().parse().map_err(|_| Error::BadCount { token: count.to_string(), line })?;
        let phones = resolve_phones(phones, set, word, line)?;
        if phones.is_empty() {
            return Err(Error::MalformedLine { line, reason: format!("empty pronunciation for `{word}`") });
        }
        out.push(PairRecord { word: word.to_string(), count, pronunciation: Pronunciation::new(phones) });
    }
    Ok(out)
}

/// Parses a lexicon file; a repeated `(word, pronunciation)` is an error.
pub fn parse_lexicon(text: &str, set: &(impl PhoneSet + ?Sized)) -> Result<Lexicon> {
    let mut lex = Lexicon::new();
    for (i, rec) in parse_pairs(text, set)?.into_iter().enumerate() {
        if lex.contains(&rec.word, &rec.pronunciation) {
            // parse_pairs skips blank lines, so recover the physical line.
            let line = nth_content_line(text, i);
            return Err(Error::DuplicateVariant { word: rec.word, line });
        }
        lex.add_unchecked(&rec.word, rec.pronunciation, rec.count);
    }
    Ok(lex)
}

fn nth_content_line(text: &str, n: usize) -> usize {
    numbered_lines(text).nth(n).map(|(l, _)| l).unwrap_or(0)
}
