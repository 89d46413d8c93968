//! Word boundary placement from attention maps, with a boundary-shift
//! search scored by edit distance against reference pronunciations.
//!
//! An attention map pairs native reference phones (rows) with decoded
//! non-native phones (columns). The column of maximum attention on the last
//! phone of each word marks where that word ends in the decoded string.
//! Because attention can be off by a few positions, boundaries are also
//! displaced by up to `radius` phones and the candidate segmentation with
//! the smallest total edit distance is kept.

use std::collections::{HashMap, HashSet};
use std::ops::Range;

use rayon::prelude::*;

use crate::phonecore::{
    numbered_lines, resolve_phones, Phone, PhoneSet, Pronunciation, ReferenceDictionary, SegmentedUtterance, WordSpan,
};
use crate::{Error, Result, Weight};

/// Attention weights for one utterance, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct AttentionMap<W = f64> {
    pub utterance_id: String,
    /// Native reference phones, one per row.
    pub row_phones: Vec<Phone>,
    /// Decoded non-native phones, one per column.
    pub col_phones: Vec<Phone>,
    weights: Vec<W>,
}

impl<W: Weight> AttentionMap<W> {
    /// `weights` must hold `rows * cols` finite, non-negative values.
    pub fn new(
        utterance_id: impl Into<String>,
        row_phones: Vec<Phone>,
        col_phones: Vec<Phone>,
        weights: Vec<W>,
    ) -> Result<Self> {
        let utterance_id = utterance_id.into();
        if weights.len() != row_phones.len() * col_phones.len() {
            return Err(Error::DimensionMismatch {
                utt_id: utterance_id,
                line: 0,
                reason: format!("{} weights for a {}x{} map", weights.len(), row_phones.len(), col_phones.len()),
            });
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < W::zero()) {
            return Err(Error::NegativeWeight { utt_id: utterance_id, line: 0, value: w.to_string() });
        }
        Ok(AttentionMap { utterance_id, row_phones, col_phones, weights })
    }

    /// Ones on the diagonal of the leading square block, zeros elsewhere.
    pub fn identity(utterance_id: impl Into<String>, row_phones: Vec<Phone>, col_phones: Vec<Phone>) -> Self {
        let peaks: Vec<usize> = (0..row_phones.len()).collect();
        Self::with_peaks(utterance_id, row_phones, col_phones, &peaks)
    }

    /// A one-hot row at `peaks[r]` for every row whose peak is a valid
    /// column; other rows are all zero.
    pub fn with_peaks(
        utterance_id: impl Into<String>,
        row_phones: Vec<Phone>,
        col_phones: Vec<Phone>,
        peaks: &[usize],
    ) -> Self {
        let cols = col_phones.len();
        let mut weights = vec![W::zero(); row_phones.len() * cols];
        for (r, &c) in peaks.iter().enumerate().take(row_phones.len()) {
            if c < cols {
                weights[r * cols + c] = W::one();
            }
        }
        AttentionMap { utterance_id: utterance_id.into(), row_phones, col_phones, weights }
    }

    pub fn rows(&self) -> usize {
        self.row_phones.len()
    }

    pub fn cols(&self) -> usize {
        self.col_phones.len()
    }

    pub fn row(&self, r: usize) -> &[W] {
        let c = self.cols();
        &self.weights[r * c..(r + 1) * c]
    }

    pub fn weight(&self, r: usize, c: usize) -> W {
        self.row(r)[c]
    }

    /// Column of maximum weight in row `r`, or `None` for an empty row.
    pub fn row_argmax(&self, r: usize, tie: ArgmaxTieBreak) -> Option<usize> {
        let mut best: Option<(usize, W)> = None;
        for (c, &w) in self.row(r).iter().enumerate() {
            let better = match best {
                None => true,
                Some((_, b)) => match tie {
                    ArgmaxTieBreak::EarliestColumn => w > b,
                    ArgmaxTieBreak::LatestColumn => w >= b,
                },
            };
            if better {
                best = Some((c, w));
            }
        }
        best.map(|(c, _)| c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ArgmaxTieBreak {
    #[default]
    EarliestColumn,
    LatestColumn,
}

/// How boundaries are displaced during the shift search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShiftMode {
    /// Every boundary moves by the same shift in `-radius..=radius`.
    #[default]
    GlobalShift,
    /// Each boundary takes its own offset in `-radius..=radius`.
    PerBoundary,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttnConfig {
    pub radius: usize,
    pub mode: ShiftMode,
    /// Highest accepted ratio of edit distance to reference phone count.
    pub threshold: f64,
    pub tie_break: ArgmaxTieBreak,
    /// Maximum candidates generated per utterance in per-boundary mode.
    pub beam: usize,
}

impl Default for AttnConfig {
    fn default() -> Self {
        AttnConfig {
            radius: 3,
            mode: ShiftMode::GlobalShift,
            threshold: 0.5,
            tie_break: ArgmaxTieBreak::EarliestColumn,
            beam: 1000,
        }
    }
}

impl AttnConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::InvalidConfig(format!("threshold {} is outside [0, 1]", self.threshold)));
        }
        if self.beam == 0 {
            return Err(Error::InvalidConfig("beam must be at least 1".into()));
        }
        Ok(())
    }
}

/// Cut positions into a phone string of length `len`. Cut `k` places a
/// boundary after phone `k - 1`. Cuts never decrease; equal neighbours or a
/// cut at `0` or `len` leave a word with no phones.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Segmentation {
    len: usize,
    cuts: Vec<usize>,
}

impl Segmentation {
    pub fn new(len: usize, cuts: Vec<usize>) -> Result<Self> {
        if cuts.windows(2).any(|w| w[0] > w[1]) || cuts.last().is_some_and(|&c| c > len) {
            return Err(Error::InvalidConfig(format!("cuts {cuts:?} are not ordered within 0..={len}")));
        }
        Ok(Segmentation { len, cuts })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn cuts(&self) -> &[usize] {
        &self.cuts
    }

    pub fn spans(&self) -> Vec<Range<usize>> {
        let mut start = 0;
        let mut out = Vec::with_capacity(self.cuts.len() + 1);
        for &c in &self.cuts {
            out.push(start..c);
            start = c;
        }
        out.push(start..self.len);
        out
    }

    pub fn has_empty_span(&self) -> bool {
        self.spans().iter().any(|r| r.is_empty())
    }
}

/// Forces cuts to increase and stay within `len`: a cut not above its
/// predecessor (or `0` for the first) moves to predecessor + 1, then cuts
/// beyond `len` are clamped. Returns the cuts and how many changed.
pub fn repair_cuts(raw: &[isize], len: usize) -> (Vec<usize>, usize) {
    let mut prev = 0isize;
    let mut changed = 0;
    let mut out = Vec::with_capacity(raw.len());
    for &c in raw {
        let mut fixed = if c <= prev { prev + 1 } else { c };
        fixed = fixed.min(len as isize);
        if fixed != c {
            changed += 1;
        }
        out.push(fixed as usize);
        prev = fixed;
    }
    (out, changed)
}

fn check_rows<W: Weight>(map: &AttentionMap<W>, ref_seg: &SegmentedUtterance) -> Result<()> {
    if map.row_phones != ref_seg.phones() {
        return Err(Error::RowMismatch {
            utt_id: map.utterance_id.clone(),
            rows: map.rows(),
            ref_len: ref_seg.phone_count(),
        });
    }
    Ok(())
}

/// Places one cut per word boundary after the argmax column of the row of
/// the word's last phone, then repairs the cuts.
pub fn place_boundaries<W: Weight>(
    map: &AttentionMap<W>,
    ref_seg: &SegmentedUtterance,
    cfg: &AttnConfig,
) -> Result<Segmentation> {
    check_rows(map, ref_seg)?;
    let raw: Vec<isize> = ref_seg
        .cuts()
        .iter()
        .map(|&end| map.row_argmax(end - 1, cfg.tie_break).map_or(0, |c| c as isize + 1))
        .collect();
    let (cuts, _) = repair_cuts(&raw, map.cols());
    Segmentation::new(map.cols(), cuts)
}

/// A segmentation produced by the shift search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftCandidate {
    pub segmentation: Segmentation,
    /// Sum of absolute offsets applied to the base cuts.
    pub displacement: usize,
    /// Cuts moved by repair or clamping after the shift.
    pub repaired: usize,
}

/// Shifted variants of `base`, repaired and deduplicated. A duplicate keeps
/// the position of its first occurrence and the smallest
/// `(repaired, displacement)` seen.
pub fn shift_candidates(base: &Segmentation, radius: usize, mode: ShiftMode, beam: usize) -> Vec<ShiftCandidate> {
    let n = radius as isize;
    let base_cuts: Vec<isize> = base.cuts.iter().map(|&c| c as isize).collect();
    let mut offsets: Vec<Vec<isize>> = Vec::new();
    match mode {
        ShiftMode::GlobalShift => {
            for s in -n..=n {
                offsets.push(vec![s; base_cuts.len()]);
            }
        }
        ShiftMode::PerBoundary => {
            let k = base_cuts.len();
            offsets.push(vec![0; k]);
            let mut cur = vec![-n; k];
            'odometer: while offsets.len() < beam.max(1) {
                if cur.iter().any(|&o| o != 0) {
                    offsets.push(cur.clone());
                }
                let mut i = k;
                loop {
                    if i == 0 {
                        break 'odometer;
                    }
                    i -= 1;
                    cur[i] += 1;
                    if cur[i] <= n {
                        break;
                    }
                    cur[i] = -n;
                }
            }
        }
    }

    let mut out: Vec<ShiftCandidate> = Vec::new();
    let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
    for off in offsets {
        let shifted: Vec<isize> = base_cuts.iter().zip(&off).map(|(c, o)| c + o).collect();
        let (cuts, repaired) = repair_cuts(&shifted, base.len);
        let displacement = off.iter().map(|o| o.unsigned_abs()).sum();
        match seen.get(&cuts) {
            Some(&idx) => {
                let prev = &mut out[idx];
                if (repaired, displacement) < (prev.repaired, prev.displacement) {
                    prev.repaired = repaired;
                    prev.displacement = displacement;
                }
            }
            None => {
                seen.insert(cuts.clone(), out.len());
                out.push(ShiftCandidate { segmentation: Segmentation { len: base.len, cuts }, displacement, repaired });
            }
        }
    }
    out
}

/// Attention-placed boundaries and their shifted variants.
pub fn split_by_attention<W: Weight>(
    map: &AttentionMap<W>,
    ref_seg: &SegmentedUtterance,
    cfg: &AttnConfig,
) -> Result<Vec<ShiftCandidate>> {
    let base = place_boundaries(map, ref_seg, cfg)?;
    Ok(shift_candidates(&base, cfg.radius, cfg.mode, cfg.beam))
}

/// Levenshtein distance with unit costs.
pub fn edit_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Outcome of boundary search for one utterance.
#[derive(Debug, Clone, PartialEq)]
pub enum AttnOutcome {
    Accepted {
        segmentation: Segmentation,
        /// One span per reference word, possibly empty.
        variants: Vec<WordSpan>,
        distance: usize,
        normalized: f64,
    },
    Rejected {
        /// Best candidate found, kept for diagnostics.
        segmentation: Segmentation,
        distance: usize,
        normalized: f64,
    },
}

impl AttnOutcome {
    pub fn segmentation(&self) -> &Segmentation {
        match self {
            AttnOutcome::Accepted { segmentation, .. } | AttnOutcome::Rejected { segmentation, .. } => segmentation,
        }
    }

    pub fn normalized(&self) -> f64 {
        match self {
            AttnOutcome::Accepted { normalized, .. } | AttnOutcome::Rejected { normalized, .. } => *normalized,
        }
    }

    pub fn is_accepted(&self) -> bool {
        matches!(self, AttnOutcome::Accepted { .. })
    }
}

/// Scores every shift candidate by the summed edit distance between each
/// word's span and its closest reference pronunciation, keeps the minimum,
/// and accepts it when distance / reference length is within the threshold.
///
/// Ties prefer fewer repaired cuts, then smaller total displacement, then
/// the earlier candidate.
pub fn align_word_boundaries<W: Weight>(
    map: &AttentionMap<W>,
    ref_seg: &SegmentedUtterance,
    dict: &ReferenceDictionary,
    cfg: &AttnConfig,
) -> Result<AttnOutcome> {
    cfg.validate()?;
    let candidates = split_by_attention(map, ref_seg, cfg)?;
    let refs = dict.reference_candidates(ref_seg);
    let hyp = &map.col_phones;

    let mut cache: HashMap<(usize, Range<usize>), usize> = HashMap::new();
    let mut best: Option<((usize, usize, usize), usize)> = None;
    for (idx, cand) in candidates.iter().enumerate() {
        let distance: usize = cand
            .segmentation
            .spans()
            .into_iter()
            .enumerate()
            .map(|(w, span)| {
                *cache.entry((w, span.clone())).or_insert_with(|| {
                    refs[w].iter().map(|r| edit_distance(&hyp[span.clone()], r)).min().expect("non-empty")
                })
            })
            .sum();
        let key = (distance, cand.repaired, cand.displacement);
        if best.as_ref().is_none_or(|(b, _)| key < *b) {
            best = Some((key, idx));
        }
    }
    let ((distance, _, _), idx) = best.expect("at least the base candidate");
    let segmentation = candidates[idx].segmentation.clone();
    let normalized = distance as f64 / ref_seg.phone_count() as f64;
    if normalized <= cfg.threshold {
        let variants = ref_seg
            .words()
            .iter()
            .zip(segmentation.spans())
            .map(|(w, span)| WordSpan::new(w.word.clone(), hyp[span].to_vec()))
            .collect();
        Ok(AttnOutcome::Accepted { segmentation, variants, distance, normalized })
    } else {
        Ok(AttnOutcome::Rejected { segmentation, distance, normalized })
    }
}

/// Per-utterance outcomes of a batch, in input order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AttnExtraction {
    pub outcomes: Vec<(String, AttnOutcome)>,
}

impl AttnExtraction {
    /// `(word, span)` for every non-empty span of accepted utterances.
    pub fn pairs(&self) -> Vec<(String, Pronunciation)> {
        self.outcomes
            .iter()
            .filter_map(|(_, o)| match o {
                AttnOutcome::Accepted { variants, .. } => Some(variants),
                AttnOutcome::Rejected { .. } => None,
            })
            .flatten()
            .filter(|w| !w.is_empty())
            .map(|w| (w.word.clone(), w.pronunciation()))
            .collect()
    }

    /// `(utterance id, word)` for accepted words that received no phones.
    pub fn empty_spans(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for (id, o) in &self.outcomes {
            if let AttnOutcome::Accepted { variants, .. } = o {
                out.extend(variants.iter().filter(|w| w.is_empty()).map(|w| (id.clone(), w.word.clone())));
            }
        }
        out
    }

    /// `(utterance id, best normalized distance)` of rejected utterances.
    pub fn rejects(&self) -> Vec<(&str, f64)> {
        self.outcomes.iter().filter(|(_, o)| !o.is_accepted()).map(|(id, o)| (id.as_str(), o.normalized())).collect()
    }
}

/// Runs [`align_word_boundaries`] for every map, pairing maps with
/// references by utterance id. Every map needs a reference.
pub fn extract_variants_attn<W: Weight>(
    maps: &[AttentionMap<W>],
    refs: &[SegmentedUtterance],
    dict: &ReferenceDictionary,
    cfg: &AttnConfig,
) -> Result<AttnExtraction> {
    cfg.validate()?;
    let by_id: HashMap<&str, &SegmentedUtterance> = refs.iter().map(|r| (r.utterance_id(), r)).collect();
    let paired = maps
        .iter()
        .map(|m| {
            by_id
                .get(m.utterance_id.as_str())
                .map(|r| (m, *r))
                .ok_or_else(|| Error::MissingUtterance { utt_id: m.utterance_id.clone() })
        })
        .collect::<Result<Vec<_>>>()?;
    let results: Vec<Result<AttnOutcome>> =
        paired.par_iter().map(|(m, r)| align_word_boundaries(m, r, dict, cfg)).collect();
    let mut out = AttnExtraction::default();
    for ((m, _), res) in paired.iter().zip(results) {
        out.outcomes.push((m.utterance_id.clone(), res?));
    }
    Ok(out)
}

/// Parses blank-line-separated records:
///
/// ```text
/// utt_id R C
/// <R row phones>
/// <C column phones>
/// <R lines of C decimal weights>
/// ```
pub fn parse_attention_file<W: Weight>(text: &str, set: &(impl PhoneSet + ?Sized)) -> Result<Vec<AttentionMap<W>>> {
    let lines: Vec<&str> = text.split('\n').map(|l| l.strip_suffix('\r').unwrap_or(l)).collect();
    let blank = |i: usize| lines.get(i).is_none_or(|l| l.trim().is_empty());
    let mut maps = Vec::new();
    let mut seen = HashSet::new();
    let mut i = 0;
    while i < lines.len() {
        if blank(i) {
            i += 1;
            continue;
        }
        let line = i + 1;
        let header: Vec<&str> = lines[i].split_ascii_whitespace().collect();
        let [id, rows, cols] = header.as_slice() else {
            return Err(Error::MalformedLine { line, reason: "expected `utt_id ROWS COLS`".into() });
        };
        let parse_dim = |t: &str| t.parse::<usize>().map_err(|_| Error::BadNumber { token: t.to_string(), line });
        let (rows, cols) = (parse_dim(rows)?, parse_dim(cols)?);
        if !seen.insert(id.to_string()) {
            return Err(Error::DuplicateUtteranceId { utt_id: id.to_string(), line });
        }
        let dim_err = |line: usize, reason: String| Error::DimensionMismatch { utt_id: id.to_string(), line, reason };
        let fetch = |k: usize| lines.get(k).copied().ok_or_else(|| dim_err(k + 1, "record is truncated".into()));

        let row_phones = resolve_phones(fetch(i + 1)?, set, id, i + 2)?;
        if row_phones.len() != rows {
            return Err(dim_err(i + 2, format!("{} row phones, expected {rows}", row_phones.len())));
        }
        let col_phones = resolve_phones(fetch(i + 2)?, set, id, i + 3)?;
        if col_phones.len() != cols {
            return Err(dim_err(i + 3, format!("{} column phones, expected {cols}", col_phones.len())));
        }
        let mut weights = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            let k = i + 3 + r;
            let row_line = k + 1;
            let content = lines.get(k).copied().filter(|l| !l.trim().is_empty() || cols == 0);
            let Some(content) = content else {
                return Err(dim_err(row_line, format!("{r} weight rows, expected {rows}")));
            };
            let before = weights.len();
            for tok in content.split_ascii_whitespace() {
                let w: W = tok
                    .parse()
                    .ok()
                    .filter(|w: &W| w.is_finite())
                    .ok_or_else(|| Error::BadNumber { token: tok.to_string(), line: row_line })?;
                if w < W::zero() {
                    return Err(Error::NegativeWeight {
                        utt_id: id.to_string(),
                        line: row_line,
                        value: tok.to_string(),
                    });
                }
                weights.push(w);
            }
            if weights.len() - before != cols {
                return Err(dim_err(row_line, format!("{} weights, expected {cols}", weights.len() - before)));
            }
        }
        i += 3 + rows;
        if !blank(i) {
            return Err(dim_err(i + 1, format!("more than {rows} weight rows")));
        }
        maps.push(AttentionMap { utterance_id: id.to_string(), row_phones, col_phones, weights });
    }
    Ok(maps)
}

pub fn emit_attention_file<W: Weight>(maps: &[AttentionMap<W>]) -> String {
    let mut out = String::new();
    for (k, m) in maps.iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        out.push_str(&format!("{} {} {}\n", m.utterance_id, m.rows(), m.cols()));
        out.push_str(&format!("{}\n", Pronunciation::from(m.row_phones.as_slice())));
        out.push_str(&format!("{}\n", Pronunciation::from(m.col_phones.as_slice())));
        for r in 0..m.rows() {
            let row: Vec<String> = m.row(r).iter().map(|w| w.to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
    }
    out
}

/// Parses `utt_id<TAB>len<TAB>c1 c2 ...` lines.
pub fn parse_segmentation_file(text: &str) -> Result<Vec<(String, Segmentation)>> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (line, content) in numbered_lines(text) {
        let fields: Vec<&str> = content.split('\t').collect();
        let [id, len, cuts] = fields.as_slice() else {
            return Err(Error::MalformedLine { line, reason: "expected utt_id<TAB>len<TAB>cuts".into() });
        };
        if !seen.insert(*id) {
            return Err(Error::DuplicateUtteranceId { utt_id: id.to_string(), line });
        }
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| Error::BadNumber { token: t.to_string(), line });
        let len = num(len)?;
        let cuts = cuts.split_ascii_whitespace().map(num).collect::<Result<Vec<_>>>()?;
        let seg = Segmentation::new(len, cuts).map_err(|_| Error::MalformedLine {
            line,
            reason: "cuts must be non-decreasing and within length".into(),
        })?;
        out.push((id.to_string(), seg));
    }
    Ok(out)
}

pub fn emit_segmentation_file<'a>(segs: impl IntoIterator<Item = (&'a str, &'a Segmentation)>) -> String {
    let mut out = String::new();
    for (id, seg) in segs {
        let cuts: Vec<String> = seg.cuts.iter().map(usize::to_string).collect();
        out.push_str(&format!("{id}\t{}\t{}\n", seg.len, cuts.join(" ")));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phonecore::{parse_dictionary, parse_segmented_file, pron, AnyPhone};

    fn the_cat() -> SegmentedUtterance {
        parse_segmented_file("u\tDH AH # K AE T\tthe cat", &AnyPhone).unwrap().remove(0)
    }

    fn peaked(hyp: &str, peaks: &[usize]) -> AttentionMap<f64> {
        AttentionMap::with_peaks("u", the_cat().phones(), pron(hyp).into_phones(), peaks)
    }

    fn cuts(c: &[ShiftCandidate]) -> Vec<Vec<usize>> {
        c.iter().map(|c| c.segmentation.cuts().to_vec()).collect()
    }

    #[test]
    fn identity_map_reproduces_reference_cut() {
        let map = AttentionMap::<f64>::identity("u", the_cat().phones(), the_cat().phones());
        let seg = place_boundaries(&map, &the_cat(), &AttnConfig::default()).unwrap();
        assert_eq!(seg.cuts(), &[2]);
    }

    #[test]
    fn argmax_placement() {
        // row 1 (last phone of "the") peaks at column 3
        let map = peaked("DH AH K AE T", &[0, 3, 2, 3, 4]);
        let seg = place_boundaries(&map, &the_cat(), &AttnConfig::default()).unwrap();
        assert_eq!(seg.cuts(), &[4]);
    }

    #[test]
    fn single_word_has_no_cuts() {
        let seg = parse_segmented_file("u\tD AH Z N T\tdoesn't", &AnyPhone).unwrap().remove(0);
        let map = AttentionMap::<f64>::with_peaks("u", seg.phones(), pron("D AH S").into_phones(), &[2, 2, 1, 0, 0]);
        assert!(place_boundaries(&map, &seg, &AttnConfig::default()).unwrap().cuts().is_empty());
    }

    #[test]
    fn argmax_ties() {
        let map =
            AttentionMap::new("u", pron("A").into_phones(), pron("X Y Z").into_phones(), vec![0.5, 0.2, 0.5]).unwrap();
        assert_eq!(map.row_argmax(0, ArgmaxTieBreak::EarliestColumn), Some(0));
        assert_eq!(map.row_argmax(0, ArgmaxTieBreak::LatestColumn), Some(2));
    }

    #[test]
    fn row_mismatch() {
        let map = AttentionMap::<f64>::identity("u", pron("DH AH K").into_phones(), pron("DH").into_phones());
        assert!(matches!(
            place_boundaries(&map, &the_cat(), &AttnConfig::default()).unwrap_err(),
            Error::RowMismatch { rows: 3, ref_len: 5, .. }
        ));
    }

    #[test]
    fn repair_examples() {
        assert_eq!(repair_cuts(&[2, 2, 1], 5), (vec![2, 3, 4], 2));
        assert_eq!(repair_cuts(&[-1, 4], 5), (vec![1, 4], 1));
        assert_eq!(repair_cuts(&[4, 5, 6], 5), (vec![4, 5, 5], 1));
        assert_eq!(repair_cuts(&[1], 0), (vec![0], 1));
    }

    #[test]
    fn global_shift_radius_one() {
        let base = Segmentation::new(5, vec![2]).unwrap();
        let c = shift_candidates(&base, 1, ShiftMode::GlobalShift, 1000);
        assert_eq!(cuts(&c), vec![vec![1], vec![2], vec![3]]);
    }

    #[test]
    fn global_shift_radius_three_collapses() {
        // shifts -3..=3 give raw cuts -1,0,1,2,3,4,5; the first three
        // repair to 1, leaving five distinct segmentations
        let base = Segmentation::new(5, vec![2]).unwrap();
        let c = shift_candidates(&base, 3, ShiftMode::GlobalShift, 1000);
        assert_eq!(cuts(&c), vec![vec![1], vec![2], vec![3], vec![4], vec![5]]);
        // [1] is reachable unrepaired with shift -1
        assert_eq!((c[0].repaired, c[0].displacement), (0, 1));
    }

    #[test]
    fn zero_radius_is_base() {
        let base = Segmentation::new(9, vec![2, 5]).unwrap();
        for mode in [ShiftMode::GlobalShift, ShiftMode::PerBoundary] {
            let c = shift_candidates(&base, 0, mode, 1000);
            assert_eq!(cuts(&c), vec![vec![2, 5]]);
        }
    }

    #[test]
    fn per_boundary_enumeration() {
        let base = Segmentation::new(20, vec![5, 10]).unwrap();
        let c = shift_candidates(&base, 1, ShiftMode::PerBoundary, 1000);
        assert_eq!(c.len(), 9);
        assert_eq!(c[0].segmentation.cuts(), &[5, 10]);
        assert_eq!(c[1].segmentation.cuts(), &[4, 9]);
        let capped = shift_candidates(&base, 3, ShiftMode::PerBoundary, 5);
        assert_eq!(capped.len(), 5);
        assert_eq!(capped[0].segmentation.cuts(), &[5, 10]);
    }

    #[test]
    fn edit_distance_examples() {
        assert_eq!(edit_distance(&pron("D AH Z N T"), &pron("D AH Z N T")), 0);
        assert_eq!(edit_distance(&[], &pron("K AE T")[..]), 3);
        assert_eq!(edit_distance(&pron("D AH S N T"), &pron("D AH Z N T")), 1);
        assert_eq!(edit_distance(b"kitten", b"sitting"), 3);
    }

    #[test]
    fn exact_hypothesis_accepted() {
        let seg = the_cat();
        let map = AttentionMap::<f64>::identity("u", seg.phones(), seg.phones());
        let out = align_word_boundaries(&map, &seg, &ReferenceDictionary::new(), &AttnConfig::default()).unwrap();
        let AttnOutcome::Accepted { variants, distance, .. } = out else { panic!("rejected") };
        assert_eq!(distance, 0);
        assert_eq!(variants, seg.words());
    }

    #[test]
    fn shift_search_repairs_bad_attention() {
        // base cut after column 2 -> cuts [3]; candidates [2],[3],[4] score
        // 1, 3, 5 against the/cat
        let map = peaked("D AH K AE T", &[0, 2, 2, 3, 4]);
        let cfg = AttnConfig { radius: 1, ..AttnConfig::default() };
        let dict = parse_dictionary("the\tDH AH\ncat\tK AE T\n", &AnyPhone).unwrap();
        let out = align_word_boundaries(&map, &the_cat(), &dict, &cfg).unwrap();
        let AttnOutcome::Accepted { segmentation, variants, distance, normalized } = out else { panic!() };
        assert_eq!(segmentation.cuts(), &[2]);
        assert_eq!(distance, 1);
        assert!((normalized - 0.2).abs() < 1e-12);
        assert_eq!(variants[0].pronunciation(), pron("D AH"));
        assert_eq!(variants[1].pronunciation(), pron("K AE T"));
    }

    #[test]
    fn zero_threshold_rejects_imperfect() {
        let map = peaked("D AH K AE T", &[0, 1, 2, 3, 4]);
        let cfg = AttnConfig { threshold: 0.0, ..AttnConfig::default() };
        let out = align_word_boundaries(&map, &the_cat(), &ReferenceDictionary::new(), &cfg).unwrap();
        assert!(matches!(out, AttnOutcome::Rejected { distance: 1, .. }));
    }

    #[test]
    fn attention_file_identity() {
        let text = "u1 2 2\nA B\nA B\n1 0\n0 1\n";
        let maps = parse_attention_file::<f64>(text, &AnyPhone).unwrap();
        assert_eq!(maps[0].row(0), &[1.0, 0.0]);
        assert_eq!(maps[0].row(1), &[0.0, 1.0]);
        assert_eq!(emit_attention_file(&maps), text);
    }

    #[test]
    fn attention_file_errors() {
        let extra = "u1 2 2\nA B\nA B\n1 0\n0 1\n0 0\n";
        assert!(matches!(
            parse_attention_file::<f64>(extra, &AnyPhone).unwrap_err(),
            Error::DimensionMismatch { line: 6, .. }
        ));
        let short = "u1 2 2\nA B\nA B\n1 0\n\nu2 1 1\nA\nA\n1\n";
        assert!(matches!(
            parse_attention_file::<f64>(short, &AnyPhone).unwrap_err(),
            Error::DimensionMismatch { line: 5, .. }
        ));
        let neg = "u1 1 2\nA\nA B\n1 -0.5\n";
        assert!(matches!(
            parse_attention_file::<f32>(neg, &AnyPhone).unwrap_err(),
            Error::NegativeWeight { line: 4, .. }
        ));
        let nan = "u1 1 1\nA\nA\nNaN\n";
        assert!(matches!(parse_attention_file::<f64>(nan, &AnyPhone).unwrap_err(), Error::BadNumber { .. }));
        let inv = crate::phonecore::parse_inventory("A\n").unwrap();
        assert!(matches!(
            parse_attention_file::<f64>("u1 1 1\nA\nQ\n1\n", &inv).unwrap_err(),
            Error::UnknownPhone { line: 3, .. }
        ));
    }

    #[test]
    fn attention_file_empty_hypothesis() {
        let text = "u1 1 0\nA\n\n\n\nu2 1 1\nA\nA\n0.25\n";
        let maps = parse_attention_file::<f64>(text, &AnyPhone).unwrap();
        assert_eq!(maps.len(), 2);
        assert_eq!(maps[0].cols(), 0);
        assert_eq!(maps[1].weight(0, 0), 0.25);
    }

    #[test]
    fn segmentation_file_round_trip() {
        let text = "u1\t5\t2\nu2\t3\t\n";
        let segs = parse_segmentation_file(text).unwrap();
        assert_eq!(segs[0].1.cuts(), &[2]);
        assert!(segs[1].1.cuts().is_empty());
        assert_eq!(emit_segmentation_file(segs.iter().map(|(i, s)| (i.as_str(), s))), text);
        assert!(parse_segmentation_file("u\t3\t2 1\n").is_err());
    }
}
