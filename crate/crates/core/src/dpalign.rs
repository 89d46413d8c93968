//! Needleman-Wunsch global alignment of a decoded phone string against a
//! native reference, and projection of the reference's word boundaries
//! through the alignment.

use std::cmp::Ordering;
use std::collections::HashMap;

use rayon::prelude::*;

use crate::phonecore::{
    Phone, PhoneSequence, PhoneSet, Pronunciation, ReferenceDictionary, SegmentedUtterance, WordSpan,
};
use crate::{Cost, Error, Result};

/// Costs to minimize. Defaults to unit Levenshtein costs `(0, 1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignConfig<C = i64> {
    pub match_score: C,
    pub mismatch_score: C,
    pub gap_penalty: C,
}

impl<C: Cost> AlignConfig<C> {
    /// Requires `mismatch_score >= match_score` and `gap_penalty > 0`.
    pub fn new(match_score: C, mismatch_score: C, gap_penalty: C) -> Result<Self> {
        if mismatch_score.partial_cmp(&match_score).is_none_or(Ordering::is_lt) {
            return Err(Error::InvalidConfig(format!(
                "mismatch score {mismatch_score:?} is below match score {match_score:?}"
            )));
        }
        if gap_penalty.partial_cmp(&C::zero()) != Some(Ordering::Greater) {
            return Err(Error::InvalidConfig(format!("gap penalty {gap_penalty:?} must be positive")));
        }
        Ok(AlignConfig { match_score, mismatch_score, gap_penalty })
    }

    fn pair_cost(&self, same: bool) -> C {
        if same {
            self.match_score
        } else {
            self.mismatch_score
        }
    }
}

impl<C: Cost> Default for AlignConfig<C> {
    fn default() -> Self {
        AlignConfig { match_score: C::zero(), mismatch_score: C::one(), gap_penalty: C::one() }
    }
}

/// One alignment column. Indices are positions in the hypothesis (`a`) and
/// the reference (`b`). `Delete` consumes a hypothesis phone with no
/// reference counterpart; `Insert` consumes a reference phone the
/// hypothesis lacks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlignOp {
    Match(usize, usize),
    Substitute(usize, usize),
    Delete(usize),
    Insert(usize),
}

impl AlignOp {
    pub fn hyp_index(&self) -> Option<usize> {
        match *self {
            AlignOp::Match(a, _) | AlignOp::Substitute(a, _) | AlignOp::Delete(a) => Some(a),
            AlignOp::Insert(_) => None,
        }
    }

    pub fn ref_index(&self) -> Option<usize> {
        match *self {
            AlignOp::Match(_, b) | AlignOp::Substitute(_, b) | AlignOp::Insert(b) => Some(b),
            AlignOp::Delete(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Alignment<C = i64> {
    pub ops: Vec<AlignOp>,
    pub total_cost: C,
}

impl<C: Cost> Alignment<C> {
    /// Checks that hypothesis and reference indices each run `0..len` in
    /// order, i.e. the ops describe a monotone global alignment.
    pub fn is_global(&self, hyp_len: usize, ref_len: usize) -> bool {
        let hyp: Vec<usize> = self.ops.iter().filter_map(AlignOp::hyp_index).collect();
        let refs: Vec<usize> = self.ops.iter().filter_map(AlignOp::ref_index).collect();
        hyp.iter().copied().eq(0..hyp_len) && refs.iter().copied().eq(0..ref_len)
    }

    /// Sum of per-op costs under `cfg`.
    pub fn cost_under(&self, cfg: &AlignConfig<C>) -> C {
        self.ops.iter().fold(C::zero(), |acc, op| {
            acc + match op {
                AlignOp::Match(..) => cfg.match_score,
                AlignOp::Substitute(..) => cfg.mismatch_score,
                AlignOp::Delete(_) | AlignOp::Insert(_) => cfg.gap_penalty,
            }
        })
    }

    fn covered(&self) -> (usize, usize) {
        let hyp = self.ops.iter().filter(|op| op.hyp_index().is_some()).count();
        let refs = self.ops.iter().filter(|op| op.ref_index().is_some()).count();
        (hyp, refs)
    }
}

#[derive(Clone, Copy)]
enum Step {
    Diag,
    Delete,
    Insert,
}

/// Minimum-cost global alignment of `hyp` against `reference`.
///
/// Fills an `(n+1) x (m+1)` cost matrix whose first row and column hold
/// cumulative gap penalties, then walks back from the bottom-right cell.
/// Where several predecessors reach a cell's minimum the walk prefers the
/// diagonal, then a deletion, then an insertion.
pub fn nw_align<T: PartialEq, C: Cost>(hyp: &[T], reference: &[T], cfg: &AlignConfig<C>) -> Alignment<C> {
    let (n, m) = (hyp.len(), reference.len());
    let width = m + 1;
    let mut score = vec![C::zero(); (n + 1) * width];
    let mut trace = vec![Step::Diag; (n + 1) * width];

    for i in 1..=n {
        score[i * width] = score[(i - 1) * width] + cfg.gap_penalty;
        trace[i * width] = Step::Delete;
    }
    for j in 1..=m {
        score[j] = score[j - 1] + cfg.gap_penalty;
        trace[j] = Step::Insert;
    }
    for i in 1..=n {
        for j in 1..=m {
            let diag = score[(i - 1) * width + j - 1] + cfg.pair_cost(hyp[i - 1] == reference[j - 1]);
            let delete = score[(i - 1) * width + j] + cfg.gap_penalty;
            let insert = score[i * width + j - 1] + cfg.gap_penalty;
            let (mut best, mut step) = (diag, Step::Diag);
            if delete < best {
                (best, step) = (delete, Step::Delete);
            }
            if insert < best {
                (best, step) = (insert, Step::Insert);
            }
            score[i * width + j] = best;
            trace[i * width + j] = step;
        }
    }

    let mut ops = Vec::with_capacity(n + m);
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        match trace[i * width + j] {
            Step::Diag => {
                i -= 1;
                j -= 1;
                ops.push(if hyp[i] == reference[j] { AlignOp::Match(i, j) } else { AlignOp::Substitute(i, j) });
            }
            Step::Delete => {
                i -= 1;
                ops.push(AlignOp::Delete(i));
            }
            Step::Insert => {
                j -= 1;
                ops.push(AlignOp::Insert(j));
            }
        }
    }
    ops.reverse();
    Alignment { ops, total_cost: score[n * width + m] }
}

/// [`nw_align`] on phones, checking both sides against `set`.
pub fn align_sequences<C: Cost>(
    hyp: &PhoneSequence,
    reference: &[Phone],
    cfg: &AlignConfig<C>,
    set: &(impl PhoneSet + ?Sized),
) -> Result<Alignment<C>> {
    if let Some(p) = hyp.phones.iter().chain(reference).find(|p| !set.contains(p)) {
        return Err(Error::InventoryMismatch { symbol: p.to_string() });
    }
    Ok(nw_align(&hyp.phones, reference, cfg))
}

/// Carves `hyp` into one span per reference word.
///
/// A hypothesis phone paired with a reference phone joins that phone's
/// word. A deleted phone joins the word of the next op that touches the
/// reference, or the last word when none follows. Spans partition `hyp` in
/// order; a word may receive no phones.
pub fn project_boundaries<C: Cost>(
    al: &Alignment<C>,
    hyp: &[Phone],
    ref_seg: &SegmentedUtterance,
) -> Result<Vec<WordSpan>> {
    let ref_len = ref_seg.phone_count();
    if !al.is_global(hyp.len(), ref_len) {
        let (found_hyp, found_ref) = al.covered();
        return Err(Error::AlignmentReferenceMismatch { hyp_len: hyp.len(), ref_len, found_hyp, found_ref });
    }
    let word_of = ref_seg.word_of_phone();
    let mut spans: Vec<Vec<Phone>> = vec![Vec::new(); ref_seg.words().len()];
    let mut pending: Vec<usize> = Vec::new();
    for op in &al.ops {
        match *op {
            AlignOp::Delete(a) => pending.push(a),
            AlignOp::Insert(b) => spans[word_of[b]].extend(pending.drain(..).map(|a| hyp[a].clone())),
            AlignOp::Match(a, b) | AlignOp::Substitute(a, b) => {
                let w = word_of[b];
                spans[w].extend(pending.drain(..).map(|a| hyp[a].clone()));
                spans[w].push(hyp[a].clone());
            }
        }
    }
    let last = spans.len() - 1;
    spans[last].extend(pending.drain(..).map(|a| hyp[a].clone()));
    Ok(ref_seg.words().iter().zip(spans).map(|(w, phones)| WordSpan::new(w.word.clone(), phones)).collect())
}

/// More combinations than this fall back to per-word coordinate descent.
const EXHAUSTIVE_REFERENCE_LIMIT: usize = 256;

/// Picks one reference pronunciation per word minimizing the alignment cost
/// of `hyp` against their concatenation. Ties go to the earliest candidate
/// (file order), comparing words left to right.
pub fn choose_reference<C: Cost>(
    hyp: &[Phone],
    ref_seg: &SegmentedUtterance,
    dict: &ReferenceDictionary,
    cfg: &AlignConfig<C>,
) -> SegmentedUtterance {
    let cands = dict.reference_candidates(ref_seg);
    let cost_of = |choice: &[usize]| -> C {
        let concat: Vec<Phone> = choice.iter().zip(&cands).flat_map(|(&k, c)| c[k].iter().cloned()).collect();
        nw_align(hyp, &concat, cfg).total_cost
    };
    let total: usize = cands.iter().try_fold(1usize, |acc, c| acc.checked_mul(c.len())).unwrap_or(usize::MAX);
    let mut choice = vec![0usize; cands.len()];
    if total == 1 {
        // nothing to choose
    } else if total <= EXHAUSTIVE_REFERENCE_LIMIT {
        let mut best = (cost_of(&choice), choice.clone());
        let mut cur = choice.clone();
        // odometer over choices, last word fastest, so the first minimum
        // found is the lexicographically earliest
        loop {
            let mut k = cands.len();
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                cur[k] += 1;
                if cur[k] < cands[k].len() {
                    break;
                }
                cur[k] = 0;
            }
            if cur.iter().all(|&c| c == 0) {
                break;
            }
            let c = cost_of(&cur);
            if c < best.0 {
                best = (c, cur.clone());
            }
        }
        choice = best.1;
    } else {
        let mut best = cost_of(&choice);
        for w in 0..cands.len() {
            let mut trial = choice.clone();
            for k in 1..cands[w].len() {
                trial[w] = k;
                let c = cost_of(&trial);
                if c < best {
                    best = c;
                    choice[w] = k;
                }
            }
        }
    }
    let spans = choice.iter().zip(&cands).map(|(&k, c)| c[k].phones().to_vec()).collect();
    ref_seg.with_spans(spans).expect("dictionary spans are non-empty")
}

/// Result of dynamic-programming extraction over a batch.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DpExtraction {
    /// One `(word, hypothesis span)` per non-empty span, in input order.
    pub pairs: Vec<(String, Pronunciation)>,
    /// `(utterance id, word)` for every word that received no phones.
    pub empty_spans: Vec<(String, String)>,
}

/// Pairs each hypothesis with the reference of the same utterance id,
/// aligns, projects boundaries, and collects the per-word realizations.
///
/// Every hypothesis needs a reference; extra references are ignored.
pub fn extract_variants_dp<C: Cost>(
    hyps: &[PhoneSequence],
    refs: &[SegmentedUtterance],
    dict: &ReferenceDictionary,
    cfg: &AlignConfig<C>,
) -> Result<DpExtraction> {
    let by_id: HashMap<&str, &SegmentedUtterance> = refs.iter().map(|r| (r.utterance_id(), r)).collect();
    let paired = hyps
        .iter()
        .map(|h| {
            by_id
                .get(h.utterance_id.as_str())
                .map(|r| (h, *r))
                .ok_or_else(|| Error::MissingUtterance { utt_id: h.utterance_id.clone() })
        })
        .collect::<Result<Vec<_>>>()?;

    let per_utt: Vec<Result<Vec<WordSpan>>> = paired
        .par_iter()
        .map(|(hyp, seg)| {
            let chosen = choose_reference(&hyp.phones, seg, dict, cfg);
            let al = nw_align(&hyp.phones, &chosen.phones(), cfg);
            project_boundaries(&al, &hyp.phones, &chosen)
        })
        .collect();

    let mut out = DpExtraction::default();
    for ((hyp, _), spans) in paired.iter().zip(per_utt) {
        for span in spans? {
            if span.is_empty() {
                out.empty_spans.push((hyp.utterance_id.clone(), span.word));
            } else {
                let pron = Pronunciation::new(span.phones);
                out.pairs.push((span.word, pron));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phonecore::{parse_dictionary, parse_segmented_file, pron, AnyPhone};
    use AlignOp::*;

    /// Every global alignment of `a` against `b`, by explicit enumeration.
    fn all_alignments(a: usize, b: usize) -> Vec<Vec<AlignOp>> {
        fn go(i: usize, j: usize, a: usize, b: usize, cur: &mut Vec<AlignOp>, out: &mut Vec<Vec<AlignOp>>) {
            if i == a && j == b {
                out.push(cur.clone());
                return;
            }
            if i < a && j < b {
                cur.push(Match(i, j));
                go(i + 1, j + 1, a, b, cur, out);
                cur.pop();
            }
            if i < a {
                cur.push(Delete(i));
                go(i + 1, j, a, b, cur, out);
                cur.pop();
            }
            if j < b {
                cur.push(Insert(j));
                go(i, j + 1, a, b, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        go(0, 0, a, b, &mut Vec::new(), &mut out);
        out
    }

    fn brute_cost(a: &[Phone], b: &[Phone], ops: &[AlignOp], cfg: &AlignConfig<i64>) -> i64 {
        ops.iter()
            .map(|op| match *op {
                Match(i, j) | Substitute(i, j) => cfg.pair_cost(a[i] == b[j]),
                _ => cfg.gap_penalty,
            })
            .sum()
    }

    fn brute_min(a: &[Phone], b: &[Phone], cfg: &AlignConfig<i64>) -> i64 {
        all_alignments(a.len(), b.len()).iter().map(|ops| brute_cost(a, b, ops, cfg)).min().unwrap()
    }

    #[test]
    fn identical_sequences() {
        let a = pron("D AH Z N T");
        let al = nw_align(&a, &a, &AlignConfig::<i64>::default());
        assert_eq!(al.ops, (0..5).map(|i| Match(i, i)).collect::<Vec<_>>());
        assert_eq!(al.total_cost, 0);
    }

    #[test]
    fn devoiced_z() {
        let (h, r) = (pron("D AH S N T"), pron("D AH Z N T"));
        let cfg = AlignConfig::default();
        assert_eq!(brute_min(&h, &r, &cfg), 1);
        let al = nw_align(&h, &r, &cfg);
        assert_eq!(al.ops, vec![Match(0, 0), Match(1, 1), Substitute(2, 2), Match(3, 3), Match(4, 4)]);
        assert_eq!(al.total_cost, 1);
    }

    #[test]
    fn missing_reference_phone() {
        let (h, r) = (pron("AE B"), pron("AE K B"));
        let cfg = AlignConfig::default();
        assert_eq!(brute_min(&h, &r, &cfg), 1);
        let al = nw_align(&h, &r, &cfg);
        assert_eq!(al.ops, vec![Match(0, 0), Insert(1), Match(1, 2)]);
        assert_eq!(al.total_cost, 1);
    }

    #[test]
    fn empty_sides() {
        let a = pron("A B C");
        let cfg = AlignConfig::new(0i64, 1, 2).unwrap();
        let al = nw_align(&a, &[], &cfg);
        assert_eq!(al.ops, vec![Delete(0), Delete(1), Delete(2)]);
        assert_eq!(al.total_cost, 6);
        let al = nw_align::<Phone, i64>(&[], &a, &cfg);
        assert_eq!(al.ops, vec![Insert(0), Insert(1), Insert(2)]);
        let al = nw_align::<Phone, i64>(&[], &[], &cfg);
        assert!(al.ops.is_empty());
        assert_eq!(al.total_cost, 0);
    }

    #[test]
    fn tie_break_prefers_diagonal_then_delete() {
        // "A" vs "B" with gap 1 and mismatch 2: substitute (2) ties with
        // delete+insert (2); the diagonal wins.
        let cfg = AlignConfig::new(0i64, 2, 1).unwrap();
        let al = nw_align(&pron("A"), &pron("B"), &cfg);
        assert_eq!(al.ops, vec![Substitute(0, 0)]);
        // With mismatch 3 the gaps win; walking back, delete is preferred
        // at the last cell so the insertion comes first.
        let cfg = AlignConfig::new(0i64, 3, 1).unwrap();
        let al = nw_align(&pron("A"), &pron("B"), &cfg);
        assert_eq!(al.ops, vec![Insert(0), Delete(0)]);
        assert_eq!(al.total_cost, 2);
    }

    #[test]
    fn config_validation() {
        assert!(AlignConfig::new(1i64, 0, 1).is_err());
        assert!(AlignConfig::new(0i64, 1, 0).is_err());
        assert!(AlignConfig::new(0.0f64, 0.0, 0.5).is_ok());
    }

    #[test]
    fn generic_scalars_agree() {
        let (h, r) = (pron("D AH K AE T"), pron("DH AH K AE T"));
        let i = nw_align(&h, &r, &AlignConfig::<i64>::default());
        let f = nw_align(&h, &r, &AlignConfig::<f32>::default());
        let q = nw_align(&h, &r, &AlignConfig::<num_rational::Ratio<i64>>::default());
        assert_eq!(i.ops, f.ops);
        assert_eq!(i.ops, q.ops);
        assert_eq!(f.total_cost, 1.0);
        assert_eq!(q.total_cost, num_rational::Ratio::from_integer(1));
    }

    #[test]
    fn inventory_checked() {
        let inv = crate::phonecore::parse_inventory("A\nB\n").unwrap();
        let hyp = PhoneSequence::new("u", pron("A C").into_phones());
        assert_eq!(
            align_sequences(&hyp, &pron("A"), &AlignConfig::<i64>::default(), &inv).unwrap_err(),
            Error::InventoryMismatch { symbol: "C".into() }
        );
    }

    fn the_cat() -> SegmentedUtterance {
        parse_segmented_file("u\tDH AH # K AE T\tthe cat", &AnyPhone).unwrap().remove(0)
    }

    fn project(hyp: &str) -> Vec<(String, String)> {
        let seg = the_cat();
        let h = pron(hyp);
        let al = nw_align(&h, &seg.phones(), &AlignConfig::<i64>::default());
        project_boundaries(&al, &h, &seg)
            .unwrap()
            .into_iter()
            .map(|w| (w.word.clone(), w.pronunciation().to_string()))
            .collect()
    }

    fn pairs(v: &[(&str, &str)]) -> Vec<(String, String)> {
        v.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    #[test]
    fn projection_identity() {
        assert_eq!(project("DH AH K AE T"), pairs(&[("the", "DH AH"), ("cat", "K AE T")]));
    }

    #[test]
    fn projection_substitution() {
        assert_eq!(project("D AH K AE T"), pairs(&[("the", "D AH"), ("cat", "K AE T")]));
    }

    #[test]
    fn projection_missing_word() {
        assert_eq!(project("K AE T"), pairs(&[("the", ""), ("cat", "K AE T")]));
    }

    #[test]
    fn projection_deletions_attach_forward() {
        // The extra hypothesis phones have no reference partner; they join
        // the next word, or the last word at the end.
        let seg = the_cat();
        let h = pron("DH AH IY K AE T S");
        let al = nw_align(&h, &seg.phones(), &AlignConfig::<i64>::default());
        assert_eq!(al.total_cost, 2);
        let spans = project_boundaries(&al, &h, &seg).unwrap();
        assert_eq!(spans[0].pronunciation(), pron("DH AH"));
        assert_eq!(spans[1].pronunciation(), pron("IY K AE T S"));
    }

    #[test]
    fn projection_length_mismatch() {
        let seg = the_cat();
        let al = nw_align(&pron("K AE T"), &pron("K AE T"), &AlignConfig::<i64>::default());
        assert!(matches!(
            project_boundaries(&al, &pron("K AE T"), &seg).unwrap_err(),
            Error::AlignmentReferenceMismatch { ref_len: 5, found_ref: 3, .. }
        ));
    }

    #[test]
    fn reference_choice_minimizes_cost() {
        let dict = parse_dictionary("the\tDH AH\nthe\tDH IY\ncat\tK AE T\n", &AnyPhone).unwrap();
        let seg = the_cat();
        let chosen = choose_reference(&pron("DH IY K AE T"), &seg, &dict, &AlignConfig::<i64>::default());
        assert_eq!(chosen.words()[0].pronunciation(), pron("DH IY"));
        // tie: neither variant matches better, file-first wins
        let chosen = choose_reference(&pron("DH EH K AE T"), &seg, &dict, &AlignConfig::<i64>::default());
        assert_eq!(chosen.words()[0].pronunciation(), pron("DH AH"));
    }

    fn batch() -> (Vec<SegmentedUtterance>, ReferenceDictionary) {
        let refs = parse_segmented_file("u1\tD AH Z N T\tdoesn't\nu2\tDH AH # K AE T\tthe cat\n", &AnyPhone).unwrap();
        let dict = parse_dictionary("doesn't\tD AH Z N T\nthe\tDH AH\ncat\tK AE T\n", &AnyPhone).unwrap();
        (refs, dict)
    }

    #[test]
    fn extract_devoiced_variant() {
        let (refs, dict) = batch();
        let hyps = vec![PhoneSequence::new("u1", pron("D AH S N T").into_phones())];
        let out = extract_variants_dp(&hyps, &refs, &dict, &AlignConfig::<i64>::default()).unwrap();
        assert_eq!(out.pairs, vec![("doesn't".to_string(), pron("D AH S N T"))]);
    }

    #[test]
    fn extract_identity_emits_canonical() {
        let (refs, dict) = batch();
        let hyps = vec![
            PhoneSequence::new("u2", pron("DH AH K AE T").into_phones()),
            PhoneSequence::new("u1", pron("D AH Z N T").into_phones()),
        ];
        let out = extract_variants_dp(&hyps, &refs, &dict, &AlignConfig::<i64>::default()).unwrap();
        assert_eq!(
            out.pairs,
            vec![
                ("the".to_string(), pron("DH AH")),
                ("cat".to_string(), pron("K AE T")),
                ("doesn't".to_string(), pron("D AH Z N T")),
            ]
        );
        assert!(out.empty_spans.is_empty());
    }

    #[test]
    fn extract_counts_empty_spans() {
        let (refs, dict) = batch();
        let hyps = vec![PhoneSequence::new("u2", pron("K AE T").into_phones())];
        let out = extract_variants_dp(&hyps, &refs, &dict, &AlignConfig::<i64>::default()).unwrap();
        assert_eq!(out.pairs, vec![("cat".to_string(), pron("K AE T"))]);
        assert_eq!(out.empty_spans, vec![("u2".to_string(), "the".to_string())]);
    }

    #[test]
    fn extract_missing_utterance() {
        let (refs, dict) = batch();
        let hyps = vec![
            PhoneSequence::new("u1", pron("D AH Z N T").into_phones()),
            PhoneSequence::new("u9", pron("K").into_phones()),
        ];
        assert_eq!(
            extract_variants_dp(&hyps, &refs, &dict, &AlignConfig::<i64>::default()).unwrap_err(),
            Error::MissingUtterance { utt_id: "u9".into() }
        );
    }
}
