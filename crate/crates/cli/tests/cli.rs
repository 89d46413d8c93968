use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const DICT: &str = "the\tDH AH\ncat\tK AE T\ndoesn't\tD AH Z N T\n";
const REF: &str = "u1\tDH AH # K AE T\tthe cat\nu2\tD AH Z N T\tdoesn't\n";

fn pronlex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pronlex")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        let f = Fixture { dir: tempfile::tempdir().unwrap() };
        f.put("dict.txt", DICT);
        f.put("ref.txt", REF);
        f
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn arg(&self, name: &str) -> String {
        self.path(name).to_string_lossy().into_owned()
    }

    fn put(&self, name: &str, text: &str) {
        fs::write(self.path(name), text).unwrap();
    }

    fn get(&self, name: &str) -> String {
        fs::read_to_string(self.path(name)).unwrap()
    }
}

fn align_dp(f: &Fixture, hyp: &str) -> Output {
    f.put("hyp.txt", hyp);
    pronlex(&[
        "align-dp",
        "--hyp",
        &f.arg("hyp.txt"),
        "--ref",
        &f.arg("ref.txt"),
        "--dict",
        &f.arg("dict.txt"),
        "--out",
        &f.arg("out.pairs"),
    ])
}

#[test]
fn dp_alignment_finds_devoiced_variant() {
    let f = Fixture::new();
    let out = align_dp(&f, "u1\tDH AH K AE T\nu2\tD AH S N T\n");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let pairs = f.get("out.pairs");
    assert!(pairs.contains("doesn't\t1\tD AH S N T"), "{pairs}");
    assert!(pairs.contains("the\t1\tDH AH"), "{pairs}");
}

#[test]
fn empty_hypothesis_file_gives_empty_output() {
    let f = Fixture::new();
    let out = align_dp(&f, "");
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(f.get("out.pairs"), "");
}

#[test]
fn malformed_input_exits_2() {
    let f = Fixture::new();
    let out = align_dp(&f, "u1 without a tab\n");
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn missing_file_exits_2() {
    let f = Fixture::new();
    let out = pronlex(&["stats", "--lex", &f.arg("nope.lex")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_reference_exits_3() {
    let f = Fixture::new();
    let out = align_dp(&f, "u9\tDH AH\n");
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn span_word_mismatch_exits_3() {
    let f = Fixture::new();
    f.put("ref.txt", "u1\tDH AH # K AE T\tthe\n");
    let out = align_dp(&f, "u1\tDH AH K AE T\n");
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(pronlex(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(pronlex(&["build"]).status.code(), Some(1));
    let f = Fixture::new();
    f.put("a.lex", "the\t1\tDH AH\n");
    let out = pronlex(&["build", "--pairs", &f.arg("a.lex"), "--out", &f.arg("b.lex"), "--max-variants", "0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_exits_0() {
    let out = pronlex(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("align-attn"));
}

fn write_identity_attention(f: &Fixture, hyps: &[&str]) {
    let refs = pronlex::phonecore::parse_segmented_file(REF, &pronlex::AnyPhone).unwrap();
    let maps: Vec<pronlex::AttentionMapF64> = refs
        .iter()
        .zip(hyps)
        .map(|(r, h)| {
            let hyp = pronlex::Pronunciation::parse(h, &pronlex::AnyPhone).unwrap();
            pronlex::AttentionMap::identity(r.utterance_id(), r.phones(), hyp.to_vec())
        })
        .collect();
    f.put("attn.txt", &pronlex::attnalign::emit_attention_file(&maps));
}

fn align_attn(f: &Fixture, threshold: &str) -> Output {
    pronlex(&[
        "align-attn",
        "--attn",
        &f.arg("attn.txt"),
        "--ref",
        &f.arg("ref.txt"),
        "--dict",
        &f.arg("dict.txt"),
        "--threshold",
        threshold,
        "--out",
        &f.arg("out.pairs"),
        "--rejects",
        &f.arg("rejects.txt"),
    ])
}

#[test]
fn attention_alignment_accepts_and_rejects() {
    let f = Fixture::new();
    write_identity_attention(&f, &["DH AH K AE T", "D AH S N T"]);
    let out = align_attn(&f, "0.5");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(f.get("out.pairs").contains("doesn't\t1\tD AH S N T"));
    assert_eq!(f.get("rejects.txt"), "");

    // distance 0 still passes a zero threshold
    let out = align_attn(&f, "0");
    assert!(out.status.success());
    assert_eq!(f.get("out.pairs"), "the\t1\tDH AH\ncat\t1\tK AE T\n");
    assert_eq!(f.get("rejects.txt").lines().count(), 1);

    write_identity_attention(&f, &["D AH K AE T", "D AH S N T"]);
    let out = align_attn(&f, "0");
    assert!(out.status.success());
    assert_eq!(f.get("out.pairs"), "");
    let rejects = f.get("rejects.txt");
    assert_eq!(rejects.lines().map(|l| l.split('\t').next().unwrap()).collect::<Vec<_>>(), ["u1", "u2"]);
}

#[test]
fn build_then_stats() {
    let f = Fixture::new();
    f.put("a.pairs", "the\t1\tDH AH\nthe\t1\tDH AH\ncat\t1\tK AE T\ndoesn't\t1\tD AH S N T\n");
    let out = pronlex(&[
        "build",
        "--pairs",
        &f.arg("a.pairs"),
        "--out",
        &f.arg("a.lex"),
        "--dict",
        &f.arg("dict.txt"),
        "--seed-canonical",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let lex = f.get("a.lex");
    assert!(lex.contains("doesn't\t1\tD AH S N T"), "{lex}");
    assert!(lex.contains("doesn't\t0\tD AH Z N T"), "{lex}");
    assert!(lex.contains("the\t2\tDH AH"), "{lex}");

    let out = pronlex(&["stats", "--lex", &f.arg("a.lex")]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("words\t3\n"), "{text}");
    assert!(text.contains("entries\t4\n"), "{text}");
}

#[test]
fn eval_bounds_reports_perfect_match() {
    let f = Fixture::new();
    f.put("pred.seg", "u1\t5\t2\n");
    let out = pronlex(&["eval-bounds", "--pred", &f.arg("pred.seg"), "--truth", &f.arg("pred.seg")]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("f1\t1.000000"), "{}", stdout(&out));
}

#[test]
fn synth_writes_corpus() {
    let f = Fixture::new();
    f.put("rules.txt", "Z\tS\t1\n");
    let dir = f.path("corpus");
    let out = pronlex(&[
        "synth",
        "--dict",
        &f.arg("dict.txt"),
        "--rules",
        &f.arg("rules.txt"),
        "--words",
        "3",
        "--utts",
        "20",
        "--seed",
        "1",
        "--out-dir",
        &dir.to_string_lossy(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["hyp.txt", "ref.txt", "attn.txt", "truth.lex", "truth.seg"] {
        assert!(Path::new(&dir).join(name).exists(), "{name}");
    }
    assert_eq!(fs::read_to_string(dir.join("hyp.txt")).unwrap().lines().count(), 20);
}
