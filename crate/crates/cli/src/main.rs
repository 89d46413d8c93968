//! `pronlex`: command-line pipeline for inducing multi-pronunciation
//! lexicons from decoded non-native phone strings.
//!
//! Exit codes: 0 success, 1 usage error, 2 input format error, 3 constraint
//! violation.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use pronlex::attnalign::{emit_segmentation_file, parse_attention_file, parse_segmentation_file};
use pronlex::lexbuild::{merge, prune, stats};
use pronlex::phonecore::{
    emit_lexicon, emit_pairs, emit_phone_file, emit_segmented_file, parse_dictionary, parse_inventory, parse_lexicon,
    parse_pairs, parse_phone_file, parse_segmented_file,
};
use pronlex::synthbench::{self, BoundaryCounts, IndelConfig, SynthAttention, SynthConfig};
use pronlex::{
    extract_variants_attn, extract_variants_dp, AlignConfig, AnyPhone, AttnConfig, ErrorKind, Lexicon, Phone,
    PhoneInventory, PhoneSet, ReferenceDictionary, ShiftMode,
};

#[derive(Parser)]
#[command(name = "pronlex", version, about = "Mispronunciation pattern discovery and lexicon induction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Harvest word variants with dynamic-programming alignment.
    AlignDp {
        #[arg(long)]
        hyp: PathBuf,
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long)]
        dict: PathBuf,
        #[arg(long)]
        inventory: Option<PathBuf>,
        #[arg(long = "match", default_value_t = 0.0, allow_negative_numbers = true)]
        match_score: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        mismatch: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        gap: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Harvest word variants from attention maps with boundary-shift search.
    AlignAttn {
        #[arg(long)]
        attn: PathBuf,
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long)]
        dict: PathBuf,
        #[arg(long)]
        inventory: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        radius: usize,
        #[arg(long, value_enum, default_value_t = Mode::Global)]
        mode: Mode,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        /// Candidate cap per utterance in per-boundary mode.
        #[arg(long, default_value_t = 1000)]
        beam: usize,
        #[arg(long)]
        out: PathBuf,
        /// Rejected utterances with their best normalized distance.
        #[arg(long)]
        rejects: Option<PathBuf>,
        /// Chosen segmentation of every utterance.
        #[arg(long)]
        segments: Option<PathBuf>,
    },
    /// Count variant pairs into a lexicon, optionally pruning it.
    Build {
        #[arg(long, num_args = 1.., required = true)]
        pairs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        min_count: u64,
        #[arg(long)]
        max_variants: Option<usize>,
        /// Reference dictionary; its first pronunciation per word survives pruning.
        #[arg(long)]
        dict: Option<PathBuf>,
        /// Also add every dictionary pronunciation (count 0).
        #[arg(long, requires = "dict")]
        seed_canonical: bool,
    },
    /// Union of lexicons, summing counts.
    Merge {
        #[arg(long = "in", num_args = 1.., required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Lexicon size statistics.
    Stats {
        #[arg(long)]
        lex: PathBuf,
        #[arg(long)]
        baseline: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Kv)]
        format: Format,
    },
    /// Generate a synthetic corrupted corpus.
    Synth {
        #[arg(long)]
        dict: PathBuf,
        #[arg(long)]
        rules: PathBuf,
        #[arg(long)]
        inventory: Option<PathBuf>,
        #[arg(long)]
        words: usize,
        #[arg(long)]
        utts: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
        /// `identity` or `jitter:K`.
        #[arg(long, default_value = "identity", value_parser = parse_attn_kind)]
        attn: SynthAttention,
        #[arg(long, default_value_t = 2)]
        min_words: usize,
        #[arg(long, default_value_t = 5)]
        max_words: usize,
        #[arg(long, default_value_t = 0.0)]
        delete_p: f64,
        #[arg(long, default_value_t = 0.0)]
        insert_p: f64,
        /// Phone inserted by epenthesis; required with --insert-p.
        #[arg(long)]
        epenthetic: Option<String>,
    },
    /// Variant recovery of a built lexicon against the injected truth.
    Eval {
        #[arg(long)]
        built: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        /// Dictionary whose pronunciations are excluded from precision.
        #[arg(long)]
        dict: Option<PathBuf>,
    },
    /// Boundary precision, recall and F1 between segmentation files.
    EvalBounds {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        truth: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Global,
    PerBoundary,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Kv,
    Text,
}

fn parse_attn_kind(s: &str) -> Result<SynthAttention, String> {
    match s.split_once(':') {
        None if s == "identity" => Ok(SynthAttention::Identity),
        Some(("jitter", k)) => k.parse().map(SynthAttention::Jitter).map_err(|_| format!("bad jitter radius `{k}`")),
        _ => Err(format!("expected `identity` or `jitter:K`, got `{s}`")),
    }
}

enum Failure {
    Usage(String),
    Io(PathBuf, std::io::Error),
    Input(Option<PathBuf>, pronlex::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Io(..) => 2,
            Failure::Input(_, e) => match e.kind() {
                ErrorKind::Format => 2,
                ErrorKind::Constraint => 3,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => m.clone(),
            Failure::Io(p, e) => format!("{}: {e}", p.display()),
            Failure::Input(Some(p), e) => format!("{}: {e}", p.display()),
            Failure::Input(None, e) => e.to_string(),
        }
    }
}

type Outcome<T> = Result<T, Failure>;

fn read(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn write(path: &Path, contents: &str) -> Outcome<()> {
    fs::write(path, contents).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

/// Reads `path` and parses it, tagging errors with the file name.
/// Writes to stdout. A reader that went away early is not an error.
fn emit(text: &str) -> Outcome<()> {
    match io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(Failure::Io(PathBuf::from("<stdout>"), e)),
        _ => Ok(()),
    }
}

fn load<T>(path: &Path, parse: impl FnOnce(&str) -> pronlex::Result<T>) -> Outcome<T> {
    let text = read(path)?;
    parse(&text).map_err(|e| Failure::Input(Some(path.to_path_buf()), e))
}

fn constraint<T>(r: pronlex::Result<T>) -> Outcome<T> {
    r.map_err(|e| Failure::Input(None, e))
}

fn phone_set(inventory: Option<&Path>) -> Outcome<Box<dyn PhoneSet>> {
    Ok(match inventory {
        Some(p) => Box::new(load::<PhoneInventory>(p, parse_inventory)?),
        None => Box::new(AnyPhone),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(command: Command) -> Outcome<()> {
    match command {
        Command::AlignDp { hyp, reference, dict, inventory, match_score, mismatch, gap, out } => {
            let cfg = AlignConfig::new(match_score, mismatch, gap).map_err(|e| Failure::Usage(e.to_string()))?;
            let set = phone_set(inventory.as_deref())?;
            let hyps = load(&hyp, |t| parse_phone_file(t, &*set))?;
            let refs = load(&reference, |t| parse_segmented_file(t, &*set))?;
            let dict = load(&dict, |t| parse_dictionary(t, &*set))?;
            let extracted = constraint(extract_variants_dp(&hyps, &refs, &dict, &cfg))?;
            write(&out, &emit_pairs(extracted.pairs.iter().map(|(w, p)| (w.as_str(), p, 1))))
        }
        Command::AlignAttn {
            attn,
            reference,
            dict,
            inventory,
            radius,
            mode,
            threshold,
            beam,
            out,
            rejects,
            segments,
        } => {
            let mode = match mode {
                Mode::Global => ShiftMode::GlobalShift,
                Mode::PerBoundary => ShiftMode::PerBoundary,
            };
            let cfg = AttnConfig { radius, mode, threshold, beam, ..AttnConfig::default() };
            cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
            let set = phone_set(inventory.as_deref())?;
            let maps = load(&attn, |t| parse_attention_file::<f64>(t, &*set))?;
            let refs = load(&reference, |t| parse_segmented_file(t, &*set))?;
            let dict = load(&dict, |t| parse_dictionary(t, &*set))?;
            let extracted = constraint(extract_variants_attn(&maps, &refs, &dict, &cfg))?;
            let pairs = extracted.pairs();
            write(&out, &emit_pairs(pairs.iter().map(|(w, p)| (w.as_str(), p, 1))))?;
            if let Some(path) = rejects {
                let text: String = extracted.rejects().iter().map(|(id, d)| format!("{id}\t{d:.6}\n")).collect();
                write(&path, &text)?;
            }
            if let Some(path) = segments {
                let text =
                    emit_segmentation_file(extracted.outcomes.iter().map(|(id, o)| (id.as_str(), o.segmentation())));
                write(&path, &text)?;
            }
            Ok(())
        }
        Command::Build { pairs, out, min_count, max_variants, dict, seed_canonical } => {
            let mut lex = Lexicon::new();
            for path in &pairs {
                let records = load(path, |t| parse_pairs(t, &AnyPhone))?;
                for rec in records {
                    constraint(lex.add(&rec.word, rec.pronunciation, rec.count))?;
                }
            }
            let dict: Option<ReferenceDictionary> =
                dict.map(|p| load(&p, |t| parse_dictionary(t, &AnyPhone))).transpose()?;
            if seed_canonical {
                let dict = dict.as_ref().expect("clap enforces --dict");
                lex = merge(&lex, &Lexicon::from_dictionary(dict, 0));
            }
            let max = max_variants.unwrap_or(usize::MAX);
            if max == 0 {
                return Err(Failure::Usage("--max-variants must be at least 1".into()));
            }
            let lex = prune(&lex, min_count, max, dict.as_ref());
            write(&out, &emit_lexicon(&lex))
        }
        Command::Merge { inputs, out } => {
            let mut lex = Lexicon::new();
            for path in &inputs {
                lex = merge(&lex, &load(path, |t| parse_lexicon(t, &AnyPhone))?);
            }
            write(&out, &emit_lexicon(&lex))
        }
        Command::Stats { lex, baseline, format } => {
            let lex = load(&lex, |t| parse_lexicon(t, &AnyPhone))?;
            let baseline = baseline.map(|p| load(&p, |t| parse_lexicon(t, &AnyPhone))).transpose()?;
            let report = stats(&lex, baseline.as_ref());
            match format {
                Format::Kv => emit(&report.to_kv()),
                Format::Text => emit(&report.to_string()),
            }
        }
        Command::Synth {
            dict,
            rules,
            inventory,
            words,
            utts,
            seed,
            out_dir,
            attn,
            min_words,
            max_words,
            delete_p,
            insert_p,
            epenthetic,
        } => {
            let set = phone_set(inventory.as_deref())?;
            let dict = load(&dict, |t| parse_dictionary(t, &*set))?;
            let rules = load(&rules, |t| synthbench::parse_rules(t, &*set))?;
            let indel = if delete_p > 0.0 || insert_p > 0.0 {
                for p in [delete_p, insert_p] {
                    if !(0.0..=1.0).contains(&p) {
                        return Err(Failure::Usage(format!("probability {p} is outside [0, 1]")));
                    }
                }
                let epenthetic = match epenthetic {
                    Some(s) => {
                        set.resolve(&s).ok_or_else(|| Failure::Usage(format!("unknown epenthetic phone `{s}`")))?
                    }
                    None if insert_p > 0.0 => return Err(Failure::Usage("--insert-p requires --epenthetic".into())),
                    None => Phone::new("AH").expect("valid symbol"),
                };
                Some(IndelConfig { delete_p, insert_p, epenthetic })
            } else {
                None
            };
            let cfg = SynthConfig {
                vocabulary: words,
                utterances: utts,
                seed,
                words_per_utterance: min_words..=max_words,
                attention: attn,
                indel,
            };
            let corpus = synthbench::synthesize(&dict, &rules, &cfg).map_err(|e| Failure::Usage(e.to_string()))?;
            fs::create_dir_all(&out_dir).map_err(|e| Failure::Io(out_dir.clone(), e))?;
            write(&out_dir.join("hyp.txt"), &emit_phone_file(&corpus.hyps))?;
            write(&out_dir.join("ref.txt"), &emit_segmented_file(&corpus.refs))?;
            write(&out_dir.join("attn.txt"), &pronlex::attnalign::emit_attention_file(&corpus.maps))?;
            write(&out_dir.join("truth.lex"), &emit_lexicon(&corpus.truth_lexicon))?;
            write(
                &out_dir.join("truth.seg"),
                &emit_segmentation_file(corpus.truth_segmentations.iter().map(|(id, s)| (id.as_str(), s))),
            )
        }
        Command::Eval { built, truth, dict } => {
            let built = load(&built, |t| parse_lexicon(t, &AnyPhone))?;
            let truth = load(&truth, |t| parse_lexicon(t, &AnyPhone))?;
            let dict = dict.map(|p| load(&p, |t| parse_dictionary(t, &AnyPhone))).transpose()?;
            let r = synthbench::recovery_report(&built, &truth, dict.as_ref());
            emit(&format!(
                "precision\t{:.6}\nrecall\t{:.6}\ntruth_entries\t{}\nrecovered\t{}\ncandidates\t{}\ncorrect\t{}\n",
                r.precision, r.recall, r.truth_entries, r.recovered, r.candidates, r.correct
            ))
        }
        Command::EvalBounds { pred, truth } => {
            let pred = load(&pred, parse_segmentation_file)?;
            let truth_segs = load(&truth, parse_segmentation_file)?;
            let by_id: std::collections::HashMap<&str, _> = truth_segs.iter().map(|(id, s)| (id.as_str(), s)).collect();
            let mut counts = BoundaryCounts::default();
            for (id, seg) in &pred {
                let t = by_id
                    .get(id.as_str())
                    .ok_or_else(|| Failure::Input(None, pronlex::Error::MissingUtterance { utt_id: id.clone() }))?;
                constraint(counts.add(seg, t))?;
            }
            let s = counts.scores();
            emit(&format!(
                "precision\t{:.6}\nrecall\t{:.6}\nf1\t{:.6}\ncorrect\t{}\npredicted\t{}\ntruth\t{}\n",
                s.precision, s.recall, s.f1, counts.correct, counts.predicted, counts.truth
            ))
        }
    }
}
