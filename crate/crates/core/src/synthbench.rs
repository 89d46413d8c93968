//! Synthetic mispronunciation corpora and independent checks.
//!
//! [`corrupt`] rewrites native references with confusion rules to mimic
//! decoded non-native speech, keeping the true word boundaries.
//! [`oracle_align`] is an exhaustive alignment search sharing no code with
//! the dynamic-programming aligner. Boundary and lexicon recovery metrics
//! score the pipeline against the injected ground truth.

use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::attnalign::{AttentionMap, Segmentation};
use crate::dpalign::AlignConfig;
use crate::phonecore::{
    numbered_lines, Lexicon, Phone, PhoneSequence, PhoneSet, Pronunciation, ReferenceDictionary, SegmentedUtterance,
    WordSpan,
};
use crate::{Cost, Error, Result};

/// Rewrites `source` as `target` with the given probability.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfusionRule {
    pub source: Phone,
    pub target: Phone,
    pub probability: f64,
}

impl ConfusionRule {
    pub fn new(source: Phone, target: Phone, probability: f64) -> Result<Self> {
        if source == target {
            return Err(Error::InvalidConfig(format!("rule {source}->{target} rewrites a phone to itself")));
        }
        if !(0.0..=1.0).contains(&probability) {
            return Err(Error::InvalidConfig(format!("probability {probability} is outside [0, 1]")));
        }
        Ok(ConfusionRule { source, target, probability })
    }
}

/// Devoicing of Z, V becoming B, and TH realized as S or T.
pub fn default_rules(probability: f64) -> Vec<ConfusionRule> {
    [("Z", "S"), ("V", "B"), ("TH", "S"), ("TH", "T")]
        .into_iter()
        .map(|(s, t)| ConfusionRule {
            source: Phone::new(s).expect("valid"),
            target: Phone::new(t).expect("valid"),
            probability,
        })
        .collect()
}

/// Parses `SRC<TAB>DST<TAB>p` lines.
pub fn parse_rules(text: &str, set: &(impl PhoneSet + ?Sized)) -> Result<Vec<ConfusionRule>> {
    let mut rules = Vec::new();
    for (line, content) in numbered_lines(text) {
        let fields: Vec<&str> = content.split('\t').map(str::trim).collect();
        let [src, dst, p] = fields.as_slice() else {
            return Err(Error::MalformedLine { line, reason: "expected SRC<TAB>DST<TAB>p".into() });
        };
        let resolve = |s: &str| {
            set.resolve(s).ok_or_else(|| Error::UnknownPhone { symbol: s.to_string(), context: "rules".into(), line })
        };
        let (source, target) = (resolve(src)?, resolve(dst)?);
        let probability: f64 = p.parse().map_err(|_| Error::BadNumber { token: p.to_string(), line })?;
        if !(0.0..=1.0).contains(&probability) {
            return Err(Error::BadProbability { token: p.to_string(), line });
        }
        if source == target {
            return Err(Error::MalformedLine { line, reason: format!("rule rewrites `{src}` to itself") });
        }
        rules.push(ConfusionRule { source, target, probability });
    }
    Ok(rules)
}

pub fn emit_rules(rules: &[ConfusionRule]) -> String {
    rules.iter().map(|r| format!("{}\t{}\t{}\n", r.source, r.target, r.probability)).collect()
}

/// Phone deletion and epenthesis, applied on top of substitutions.
#[derive(Debug, Clone, PartialEq)]
pub struct IndelConfig {
    pub delete_p: f64,
    pub insert_p: f64,
    /// Phone inserted after a reference phone.
    pub epenthetic: Phone,
}

/// One rewrite performed by [`corrupt`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AppliedRule {
    Substituted { position: usize, source: Phone, target: Phone },
    Deleted { position: usize, phone: Phone },
    Inserted { after: usize, phone: Phone },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corruption {
    /// Corrupted phones with boundaries removed.
    pub hyp: PhoneSequence,
    /// True word boundaries in `hyp`.
    pub truth: Segmentation,
    /// What each reference word became.
    pub realized: Vec<WordSpan>,
    pub log: Vec<AppliedRule>,
}

/// Substitution-only corruption, reproducible from `seed`.
pub fn corrupt(seg: &SegmentedUtterance, rules: &[ConfusionRule], seed: u64) -> Corruption {
    corrupt_with(seg, rules, None, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Each phone is tried against the rules in order and rewritten by the
/// first matching rule that fires.
pub fn corrupt_with<R: Rng>(
    seg: &SegmentedUtterance,
    rules: &[ConfusionRule],
    indel: Option<&IndelConfig>,
    rng: &mut R,
) -> Corruption {
    let mut log = Vec::new();
    let mut realized = Vec::with_capacity(seg.words().len());
    let mut position = 0;
    for word in seg.words() {
        let mut out = Vec::with_capacity(word.phones.len());
        for phone in &word.phones {
            if let Some(ic) = indel {
                if ic.delete_p > 0.0 && rng.gen_bool(ic.delete_p) {
                    log.push(AppliedRule::Deleted { position, phone: phone.clone() });
                    position += 1;
                    continue;
                }
            }
            let mut emitted = phone.clone();
            for rule in rules.iter().filter(|r| &r.source == phone) {
                if rng.gen_bool(rule.probability) {
                    log.push(AppliedRule::Substituted { position, source: phone.clone(), target: rule.target.clone() });
                    emitted = rule.target.clone();
                    break;
                }
            }
            out.push(emitted);
            if let Some(ic) = indel {
                if ic.insert_p > 0.0 && rng.gen_bool(ic.insert_p) {
                    log.push(AppliedRule::Inserted { after: position, phone: ic.epenthetic.clone() });
                    out.push(ic.epenthetic.clone());
                }
            }
            position += 1;
        }
        realized.push(WordSpan::new(word.word.clone(), out));
    }
    let mut cuts = Vec::with_capacity(realized.len().saturating_sub(1));
    let mut end = 0;
    for w in &realized[..realized.len() - 1] {
        end += w.phones.len();
        cuts.push(end);
    }
    let phones: Vec<Phone> = realized.iter().flat_map(|w| w.phones.iter().cloned()).collect();
    let truth = Segmentation::new(phones.len(), cuts).expect("cuts from span lengths are ordered");
    Corruption { hyp: PhoneSequence::new(seg.utterance_id(), phones), truth, realized, log }
}

/// Largest `len(a) + len(b)` [`oracle_align`] will enumerate.
pub const ORACLE_LIMIT: usize = 14;

/// Minimum global alignment cost by plain recursion over every alignment.
pub fn oracle_align<T: PartialEq, C: Cost>(a: &[T], b: &[T], cfg: &AlignConfig<C>) -> Result<C> {
    if a.len() + b.len() > ORACLE_LIMIT {
        return Err(Error::SizeBound { len: a.len() + b.len(), limit: ORACLE_LIMIT });
    }
    fn go<T: PartialEq, C: Cost>(a: &[T], b: &[T], cfg: &AlignConfig<C>) -> C {
        let gap = |n: usize| (0..n).fold(C::zero(), |acc, _| acc + cfg.gap_penalty);
        match (a.split_first(), b.split_first()) {
            (None, _) => gap(b.len()),
            (_, None) => gap(a.len()),
            (Some((x, ra)), Some((y, rb))) => {
                let pair = if x == y { cfg.match_score } else { cfg.mismatch_score };
                let options =
                    [pair + go(ra, rb, cfg), cfg.gap_penalty + go(ra, b, cfg), cfg.gap_penalty + go(a, rb, cfg)];
                options.into_iter().fold(options[0], |m, c| if c < m { c } else { m })
            }
        }
    }
    Ok(go(a, b, cfg))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Cut counts accumulated over many utterances.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BoundaryCounts {
    pub correct: usize,
    pub predicted: usize,
    pub truth: usize,
}

impl BoundaryCounts {
    pub fn add(&mut self, pred: &Segmentation, truth: &Segmentation) -> Result<()> {
        if pred.len() != truth.len() {
            return Err(Error::LengthMismatch { pred: pred.len(), truth: truth.len() });
        }
        let (p, t) = (pred.cuts(), truth.cuts());
        let (mut i, mut j) = (0, 0);
        while i < p.len() && j < t.len() {
            match p[i].cmp(&t[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    self.correct += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        self.predicted += p.len();
        self.truth += t.len();
        Ok(())
    }

    /// With no predictions precision is 1; with no true cuts recall is 1.
    pub fn scores(&self) -> BoundaryScores {
        let ratio = |num: usize, den: usize| if den == 0 { 1.0 } else { num as f64 / den as f64 };
        let precision = ratio(self.correct, self.predicted);
        let recall = ratio(self.correct, self.truth);
        let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
        BoundaryScores { precision, recall, f1 }
    }
}

/// Exact-position boundary precision, recall and F1 for one utterance.
pub fn boundary_f1(pred: &Segmentation, truth: &Segmentation) -> Result<BoundaryScores> {
    let mut counts = BoundaryCounts::default();
    counts.add(pred, truth)?;
    Ok(counts.scores())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryReport {
    pub precision: f64,
    pub recall: f64,
    pub truth_entries: usize,
    pub recovered: usize,
    /// Built entries that count toward precision.
    pub candidates: usize,
    pub correct: usize,
}

/// Recall is the share of ground-truth entries present in `built`.
/// Precision is the share of `built` entries found in the ground truth,
/// skipping pronunciations listed in `canonical` when it is given. Empty
/// denominators give 1.
pub fn recovery_report(built: &Lexicon, truth: &Lexicon, canonical: Option<&ReferenceDictionary>) -> RecoveryReport {
    let truth_entries = truth.entry_count();
    let recovered = truth.iter().filter(|(w, p, _)| built.contains(w, p)).count();
    let is_canonical = |w: &str, p: &Pronunciation| canonical.and_then(|d| d.get(w)).is_some_and(|v| v.contains(p));
    let (mut candidates, mut correct) = (0, 0);
    for (w, p, _) in built.iter() {
        if is_canonical(w, p) {
            continue;
        }
        candidates += 1;
        if truth.contains(w, p) {
            correct += 1;
        }
    }
    let ratio = |num: usize, den: usize| if den == 0 { 1.0 } else { num as f64 / den as f64 };
    RecoveryReport {
        precision: ratio(correct, candidates),
        recall: ratio(recovered, truth_entries),
        truth_entries,
        recovered,
        candidates,
        correct,
    }
}

/// Synthetic attention for generated utterances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthAttention {
    /// Diagonal ones along the shorter dimension.
    Identity,
    /// Diagonal peaks each displaced by a uniform offset in `-k..=k`,
    /// clamped to the map.
    Jitter(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    /// Number of dictionary words (from the top of the file) to draw from.
    pub vocabulary: usize,
    pub utterances: usize,
    pub seed: u64,
    pub words_per_utterance: RangeInclusive<usize>,
    pub attention: SynthAttention,
    pub indel: Option<IndelConfig>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            vocabulary: 100,
            utterances: 1000,
            seed: 0,
            words_per_utterance: 2..=5,
            attention: SynthAttention::Identity,
            indel: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthCorpus {
    pub hyps: Vec<PhoneSequence>,
    pub refs: Vec<SegmentedUtterance>,
    pub maps: Vec<AttentionMap<f64>>,
    pub truth_segmentations: Vec<(String, Segmentation)>,
    /// Injected, non-canonical `(word, realization)` pairs with counts.
    pub truth_lexicon: Lexicon,
}

/// Identity attention with each peak moved by up to `k` columns.
pub fn jittered_map<R: Rng>(
    utterance_id: &str,
    row_phones: Vec<Phone>,
    col_phones: Vec<Phone>,
    k: usize,
    rng: &mut R,
) -> AttentionMap<f64> {
    let cols = col_phones.len();
    let k = k as isize;
    let peaks: Vec<usize> = (0..row_phones.len())
        .map(|r| {
            let offset = rng.gen_range(-k..=k);
            if r < cols {
                (r as isize + offset).clamp(0, cols as isize - 1) as usize
            } else {
                usize::MAX
            }
        })
        .collect();
    AttentionMap::with_peaks(utterance_id, row_phones, col_phones, &peaks)
}

/// Generates a corpus from the first `cfg.vocabulary` dictionary words.
/// Utterance `i` draws from its own generator seeded with `seed ^ i`, so
/// the corpus is identical however the work is scheduled.
pub fn synthesize(dict: &ReferenceDictionary, rules: &[ConfusionRule], cfg: &SynthConfig) -> Result<SynthCorpus> {
    if cfg.vocabulary == 0 || dict.len() < cfg.vocabulary {
        return Err(Error::InvalidConfig(format!(
            "vocabulary of {} words requested from a dictionary of {}",
            cfg.vocabulary,
            dict.len()
        )));
    }
    if cfg.words_per_utterance.is_empty() || *cfg.words_per_utterance.start() == 0 {
        return Err(Error::InvalidConfig("words per utterance must be a non-empty range above 0".into()));
    }
    let vocab: Vec<(&str, &Pronunciation)> = dict.iter().take(cfg.vocabulary).map(|(w, v)| (w, &v[0])).collect();
    let width = cfg.utterances.saturating_sub(1).to_string().len();

    let generated: Vec<_> = (0..cfg.utterances)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ i as u64);
            let n_words = rng.gen_range(cfg.words_per_utterance.clone());
            let words = (0..n_words)
                .map(|_| {
                    let (w, p) = vocab[rng.gen_range(0..vocab.len())];
                    WordSpan::new(w, p.phones().to_vec())
                })
                .collect();
            let seg =
                SegmentedUtterance::new(format!("utt{i:0width$}"), words).expect("dictionary spans are non-empty");
            let corruption = corrupt_with(&seg, rules, cfg.indel.as_ref(), &mut rng);
            let map = match cfg.attention {
                SynthAttention::Identity => {
                    AttentionMap::identity(seg.utterance_id(), seg.phones(), corruption.hyp.phones.clone())
                }
                SynthAttention::Jitter(k) => {
                    jittered_map(seg.utterance_id(), seg.phones(), corruption.hyp.phones.clone(), k, &mut rng)
                }
            };
            (seg, corruption, map)
        })
        .collect();

    let mut corpus = SynthCorpus {
        hyps: Vec::with_capacity(cfg.utterances),
        refs: Vec::with_capacity(cfg.utterances),
        maps: Vec::with_capacity(cfg.utterances),
        truth_segmentations: Vec::with_capacity(cfg.utterances),
        truth_lexicon: Lexicon::new(),
    };
    for (seg, corruption, map) in generated {
        for w in &corruption.realized {
            let pron = w.pronunciation();
            if !pron.is_empty() && dict.canonical(&w.word) != Some(&pron) {
                corpus.truth_lexicon.add_unchecked(&w.word, pron, 1);
            }
        }
        corpus.truth_segmentations.push((seg.utterance_id().to_string(), corruption.truth));
        corpus.hyps.push(corruption.hyp);
        corpus.refs.push(seg);
        corpus.maps.push(map);
    }
    Ok(corpus)
}

/// A dictionary of `words` random pronunciations over `phones`, one per
/// word, named `w000`, `w001`, and so on.
pub fn synthetic_dictionary(
    words: usize,
    phones: &[Phone],
    lengths: RangeInclusive<usize>,
    seed: u64,
) -> ReferenceDictionary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = words.saturating_sub(1).to_string().len().max(3);
    let mut dict = ReferenceDictionary::new();
    for i in 0..words {
        let len = rng.gen_range(lengths.clone());
        let pron: Vec<Phone> = (0..len).map(|_| phones[rng.gen_range(0..phones.len())].clone()).collect();
        dict.insert(format!("w{i:0width$}"), Pronunciation::new(pron)).expect("non-empty");
    }
    dict
}
