use std::collections::HashSet;

use super::{is_valid_word, numbered_lines, resolve_phones, Phone, PhoneSet, Pronunciation, BOUNDARY};
use crate::{Error, Result};

/// Decoded phones of one utterance, without word boundaries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhoneSequence {
    pub utterance_id: String,
    pub phones: Vec<Phone>,
}

impl PhoneSequence {
    pub fn new(utterance_id: impl Into<String>, phones: Vec<Phone>) -> Self {
        PhoneSequence { utterance_id: utterance_id.into(), phones }
    }
}

/// A word and the phones attributed to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordSpan {
    pub word: String,
    pub phones: Vec<Phone>,
}

impl WordSpan {
    pub fn new(word: impl Into<String>, phones: Vec<Phone>) -> Self {
        WordSpan { word: word.into(), phones }
    }

    pub fn is_empty(&self) -> bool {
        self.phones.is_empty()
    }

    pub fn pronunciation(&self) -> Pronunciation {
        Pronunciation::from(self.phones.as_slice())
    }
}

/// A native reference utterance with word boundaries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentedUtterance {
    utterance_id: String,
    words: Vec<WordSpan>,
}

impl SegmentedUtterance {
    /// Fails with [`Error::EmptySpan`] or [`Error::InvalidWord`] (line 0)
    /// when a span is empty or a word is blank or contains whitespace.
    pub fn new(utterance_id: impl Into<String>, words: Vec<WordSpan>) -> Result<Self> {
        let utterance_id = utterance_id.into();
        if words.is_empty() {
            return Err(Error::SpanWordMismatch { utt_id: utterance_id, spans: 0, words: 0, line: 0 });
        }
        for (index, w) in words.iter().enumerate() {
            if !is_valid_word(&w.word) {
                return Err(Error::InvalidWord { word: w.word.clone(), line: 0 });
            }
            if w.phones.is_empty() {
                return Err(Error::EmptySpan { utt_id: utterance_id, index, line: 0 });
            }
        }
        Ok(SegmentedUtterance { utterance_id, words })
    }

    pub fn utterance_id(&self) -> &str {
        &self.utterance_id
    }

    pub fn words(&self) -> &[WordSpan] {
        &self.words
    }

    /// The full native phone sequence.
    pub fn phones(&self) -> Vec<Phone> {
        self.words.iter().flat_map(|w| w.phones.iter().cloned()).collect()
    }

    pub fn phone_count(&self) -> usize {
        self.words.iter().map(|w| w.phones.len()).sum()
    }

    /// Word index owning each reference phone position.
    pub fn word_of_phone(&self) -> Vec<usize> {
        self.words.iter().enumerate().flat_map(|(i, w)| std::iter::repeat_n(i, w.phones.len())).collect()
    }

    /// Cut positions between words (one fewer than the word count).
    pub fn cuts(&self) -> Vec<usize> {
        let mut end = 0;
        let mut cuts = Vec::with_capacity(self.words.len().saturating_sub(1));
        for w in &self.words[..self.words.len() - 1] {
            end += w.phones.len();
            cuts.push(end);
        }
        cuts
    }

    /// Same words with replaced spans, in order.
    pub fn with_spans(&self, spans: Vec<Vec<Phone>>) -> Result<Self> {
        assert_eq!(spans.len(), self.words.len(), "one span per word");
        let words = self.words.iter().zip(spans).map(|(w, phones)| WordSpan::new(w.word.clone(), phones)).collect();
        SegmentedUtterance::new(self.utterance_id.clone(), words)
    }
}

fn split_id(content: &str, line: usize) -> Result<(&str, &str)> {
    let (id, rest) = content
        .split_once('\t')
        .ok_or_else(|| Error::MalformedLine { line, reason: "missing tab after utterance id".into() })?;
    if !is_valid_word(id) {
        return Err(Error::MalformedLine { line, reason: format!("invalid utterance id `{id}`") });
    }
    Ok((id, rest))
}

/// Parses `utt_id<TAB>PH PH ...` lines. An empty phone list is allowed.
pub fn parse_phone_file(text: &str, set: &(impl PhoneSet + ?Sized)) -> Result<Vec<PhoneSequence>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (line, content) in numbered_lines(text) {
        let (id, field) = split_id(content, line)?;
        if field.contains('\t') {
            return Err(Error::MalformedLine { line, reason: "expected exactly two fields".into() });
        }
        if !seen.insert(id) {
            return Err(Error::DuplicateUtteranceId { utt_id: id.to_string(), line });
        }
        let phones = resolve_phones(field, set, id, line)?;
        out.push(PhoneSequence::new(id, phones));
    }
    Ok(out)
}

pub fn emit_phone_file(seqs: &[PhoneSequence]) -> String {
    let mut out = String::new();
    for s in seqs {
        out.push_str(&s.utterance_id);
        out.push('\t');
        out.push_str(&Pronunciation::from(s.phones.as_slice()).to_string());
        out.push('\n');
    }
    out
}

/// Parses `utt_id<TAB>PH PH # PH PH<TAB>word1 word2` lines.
pub fn parse_segmented_file(text: &str, set: &(impl PhoneSet + ?Sized)) -> Result<Vec<SegmentedUtterance>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (line, content) in numbered_lines(text) {
        let (id, rest) = split_id(content, line)?;
        let (phone_field, word_field) = rest.split_once('\t').ok_or_else(|| Error::MalformedLine {
            line,
            reason: "expected utt_id, phones and words separated by tabs".into(),
        })?;
        if word_field.contains('\t') {
            return Err(Error::MalformedLine { line, reason: "expected exactly three fields".into() });
        }
        if !seen.insert(id) {
            return Err(Error::DuplicateUtteranceId { utt_id: id.to_string(), line });
        }
        let mut spans: Vec<Vec<&str>> = vec![Vec::new()];
        for tok in phone_field.split_ascii_whitespace() {
            if tok == BOUNDARY {
                spans.push(Vec::new());
            } else {
                spans.last_mut().expect("non-empty").push(tok);
            }
        }
        let words: Vec<&str> = word_field.split_ascii_whitespace().collect();
        if spans.len() != words.len() {
            return Err(Error::SpanWordMismatch {
                utt_id: id.to_string(),
                spans: spans.len(),
                words: words.len(),
                line,
            });
        }
        let mut word_spans = Vec::with_capacity(words.len());
        for (index, (span, word)) in spans.iter().zip(&words).enumerate() {
            if span.is_empty() {
                return Err(Error::EmptySpan { utt_id: id.to_string(), index, line });
            }
            let phones = resolve_phones(&span.join(" "), set, id, line)?;
            word_spans.push(WordSpan::new(*word, phones));
        }
        out.push(SegmentedUtterance { utterance_id: id.to_string(), words: word_spans });
    }
    Ok(out)
}

pub fn emit_segmented_file(utts: &[SegmentedUtterance]) -> String {
    let mut out = String::new();
    for u in utts {
        let spans: Vec<String> = u.words.iter().map(|w| Pronunciation::from(w.phones.as_slice()).to_string()).collect();
        let words: Vec<&str> = u.words.iter().map(|w| w.word.as_str()).collect();
        out.push_str(&format!("{}\t{}\t{}\n", u.utterance_id, spans.join(" # "), words.join(" ")));
    }
    out
}
