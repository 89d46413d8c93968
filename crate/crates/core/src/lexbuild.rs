//! Counting harvested `(word, pronunciation)` pairs into a lexicon, merging
//! lexicons, pruning rare variants and reporting size statistics.

use std::fmt;

use rayon::prelude::*;

use crate::phonecore::{Lexicon, Pronunciation, ReferenceDictionary};
use crate::Result;

/// Counts pairs; identical pairs share one counter.
pub fn accumulate<W, I>(pairs: I) -> Result<Lexicon>
where
    W: AsRef<str>,
    I: IntoIterator<Item = (W, Pronunciation)>,
{
    let mut lex = Lexicon::new();
    for (word, pron) in pairs {
        lex.add(word.as_ref(), pron, 1)?;
    }
    Ok(lex)
}

/// [`accumulate`] over chunks in parallel, combining partial lexicons with
/// [`merge`]. The result does not depend on how the pairs are chunked.
pub fn accumulate_parallel(chunks: &[Vec<(String, Pronunciation)>]) -> Result<Lexicon> {
    chunks
        .par_iter()
        .map(|chunk| accumulate(chunk.iter().map(|(w, p)| (w.as_str(), p.clone()))))
        .try_reduce(Lexicon::new, |a, b| Ok(merge(&a, &b)))
}

/// Union of variants per word; counts of shared variants are summed.
pub fn merge(a: &Lexicon, b: &Lexicon) -> Lexicon {
    let mut out = a.clone();
    for (word, pron, count) in b.iter() {
        out.add_unchecked(word, pron.clone(), count);
    }
    out
}

/// Number of `(word, variant)` pairs present in both lexicons.
pub fn shared_entries(a: &Lexicon, b: &Lexicon) -> usize {
    let (small, large) = if a.entry_count() <= b.entry_count() { (a, b) } else { (b, a) };
    small.iter().filter(|(w, p, _)| large.contains(w, p)).count()
}

/// Shared entries implied by two sizes and the size of their union.
pub fn shared_from_sizes(a: usize, b: usize, union: usize) -> i64 {
    a as i64 + b as i64 - union as i64
}

/// Drops variants seen fewer than `min_count` times, then keeps the
/// `max_variants` most frequent per word (ties by pronunciation). The
/// first-listed dictionary pronunciation of a word is never dropped when
/// `protect` is given.
pub fn prune(lex: &Lexicon, min_count: u64, max_variants: usize, protect: Option<&ReferenceDictionary>) -> Lexicon {
    let mut out = Lexicon::new();
    for (word, variants) in lex.words() {
        let canonical = protect.and_then(|d| d.canonical(word));
        let mut ranked: Vec<(&Pronunciation, u64, String)> =
            variants.iter().filter(|(_, &c)| c >= min_count).map(|(p, &c)| (p, c, p.to_string())).collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.2.cmp(&b.2)));
        ranked.truncate(max_variants);
        for (p, c, _) in ranked {
            out.add_unchecked(word, p.clone(), c);
        }
        if let Some(canon) = canonical {
            if let Some(&c) = variants.get(canon) {
                if !out.contains(word, canon) {
                    out.add_unchecked(word, canon.clone(), c);
                }
            }
        }
    }
    out
}

/// Comparison against a baseline lexicon.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineComparison {
    pub baseline_entries: usize,
    /// `entries / baseline_entries`; `None` when the baseline is empty.
    pub size_ratio: Option<f64>,
    /// `100 * (1 - size_ratio)`.
    pub reduction_pct: Option<f64>,
    pub shared_entries: usize,
    pub union_entries: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LexiconStats {
    pub words: usize,
    pub entries: usize,
    pub mean_variants: f64,
    pub max_variants: usize,
    pub baseline: Option<BaselineComparison>,
}

pub fn stats(lex: &Lexicon, baseline: Option<&Lexicon>) -> LexiconStats {
    let words = lex.word_count();
    let entries = lex.entry_count();
    let max_variants = lex.words().map(|(_, v)| v.len()).max().unwrap_or(0);
    let mean_variants = if words == 0 { 0.0 } else { entries as f64 / words as f64 };
    let baseline = baseline.map(|b| {
        let baseline_entries = b.entry_count();
        let size_ratio = (baseline_entries > 0).then(|| entries as f64 / baseline_entries as f64);
        let shared = shared_entries(lex, b);
        BaselineComparison {
            baseline_entries,
            size_ratio,
            reduction_pct: size_ratio.map(|r| 100.0 * (1.0 - r)),
            shared_entries: shared,
            union_entries: entries + baseline_entries - shared,
        }
    });
    LexiconStats { words, entries, mean_variants, max_variants, baseline }
}

fn fmt_opt(v: Option<f64>, decimals: usize) -> String {
    v.map_or_else(|| "undefined".to_string(), |x| format!("{x:.decimals$}"))
}

impl LexiconStats {
    /// `(key, value)` rows in report order.
    pub fn rows(&self) -> Vec<(&'static str, String)> {
        let mut rows = vec![
            ("words", self.words.to_string()),
            ("entries", self.entries.to_string()),
            ("mean_variants", format!("{:.4}", self.mean_variants)),
            ("max_variants", self.max_variants.to_string()),
        ];
        if let Some(b) = &self.baseline {
            rows.extend([
                ("baseline_entries", b.baseline_entries.to_string()),
                ("size_ratio", fmt_opt(b.size_ratio, 4)),
                ("reduction_pct", fmt_opt(b.reduction_pct, 2)),
                ("shared_entries", b.shared_entries.to_string()),
                ("union_entries", b.union_entries.to_string()),
            ]);
        }
        rows
    }

    /// Machine-readable `key<TAB>value` lines.
    pub fn to_kv(&self) -> String {
        self.rows().into_iter().map(|(k, v)| format!("{k}\t{v}\n")).collect()
    }
}

impl fmt::Display for LexiconStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows = self.rows();
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in rows {
            writeln!(f, "{k:<width$}  {v:>12}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phonecore::pron;
    use crate::Error;

    fn lex(rows: &[(&str, &str, u64)]) -> Lexicon {
        let mut l = Lexicon::new();
        for &(w, p, c) in rows {
            l.add(w, pron(p), c).unwrap();
        }
        l
    }

    #[test]
    fn accumulate_counts_repeats() {
        let l = accumulate([
            ("doesn't", pron("D AH Z N T")),
            ("doesn't", pron("D AH S N T")),
            ("doesn't", pron("D AH Z N T")),
        ])
        .unwrap();
        assert_eq!(l.variants("doesn't").unwrap().len(), 2);
        assert_eq!(l.count("doesn't", &pron("D AH Z N T")), Some(2));
        assert_eq!(l.count("doesn't", &pron("D AH S N T")), Some(1));
    }

    #[test]
    fn accumulate_empty_and_error() {
        assert!(accumulate(Vec::<(String, Pronunciation)>::new()).unwrap().is_empty());
        assert_eq!(
            accumulate([("cat", Pronunciation::default())]).unwrap_err(),
            Error::EmptyPronunciation { word: "cat".into() }
        );
    }

    #[test]
    fn merge_self_doubles_counts() {
        let a = lex(&[("cat", "K AE T", 2), ("cat", "K AH T", 1)]);
        let m = merge(&a, &a);
        assert_eq!(m.entry_count(), a.entry_count());
        assert_eq!(m.count("cat", &pron("K AE T")), Some(4));
        assert_eq!(merge(&Lexicon::new(), &a), a);
    }

    #[test]
    fn merge_size_identity_at_full_scale() {
        assert_eq!(shared_from_sizes(336_882, 35_204, 345_489), 26_597);
    }

    #[test]
    fn prune_min_count() {
        let l = lex(&[("w", "A", 2), ("w", "B", 1)]);
        assert_eq!(prune(&l, 2, usize::MAX, None), lex(&[("w", "A", 2)]));
    }

    #[test]
    fn prune_ties_keep_first_pronunciation() {
        let l = lex(&[("w", "B", 5), ("w", "A", 5)]);
        assert_eq!(prune(&l, 0, 1, None), lex(&[("w", "A", 5)]));
    }

    #[test]
    fn prune_identity() {
        let l = lex(&[("w", "B", 5), ("w", "A", 0), ("v", "C", 1)]);
        assert_eq!(prune(&l, 0, usize::MAX, None), l);
    }

    #[test]
    fn prune_protects_canonical() {
        let mut dict = ReferenceDictionary::new();
        dict.insert("w", pron("A")).unwrap();
        let l = lex(&[("w", "A", 1), ("w", "B", 7), ("w", "C", 3)]);
        let p = prune(&l, 2, 1, Some(&dict));
        assert_eq!(p, lex(&[("w", "A", 1), ("w", "B", 7)]));
    }

    #[test]
    fn stats_reduction() {
        let l = lex(&[("a", "A", 1), ("a", "B", 1), ("b", "C", 1)]);
        let s = stats(&l, Some(&l));
        assert_eq!(s.words, 2);
        assert_eq!(s.entries, 3);
        assert_eq!(s.max_variants, 2);
        assert!((s.mean_variants - 1.5).abs() < 1e-12);
        let b = s.baseline.unwrap();
        assert_eq!(b.reduction_pct, Some(0.0));
        assert_eq!(b.shared_entries, 3);
        assert_eq!(b.union_entries, 3);
    }

    #[test]
    fn stats_empty_baseline_undefined() {
        let l = lex(&[("a", "A", 1)]);
        let s = stats(&l, Some(&Lexicon::new()));
        assert_eq!(s.baseline.as_ref().unwrap().size_ratio, None);
        assert!(s.to_kv().contains("reduction_pct\tundefined\n"));
    }

    #[test]
    fn stats_text_is_aligned() {
        let s = stats(&lex(&[("a", "A", 1)]), None);
        let text = s.to_string();
        assert!(text.lines().all(|l| l.len() == text.lines().next().unwrap().len()));
    }
}
