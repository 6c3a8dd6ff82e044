// Runs every acceptance criterion and prints one PASS/FAIL line for each.
// `cargo test --test acceptance -- --nocapture` shows the report.

mod props;
mod support;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use present::aligner::align;
use present::data;
use present::lexicon::{lint_dictionary, load_lexicon, DictFormat};
use present::mandarin::tone_contour;
use present::schedule::from_json;
use present::transfer::{apply_rules, transfer_ipa, AnnotatedPhone, Token};
use present::Language;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

type Outcome = Result<String, String>;

fn run(name: &str, f: impl FnOnce() -> String, report: &mut Vec<(String, bool)>) {
    let outcome: Outcome = catch_unwind(AssertUnwindSafe(f)).map_err(|e| {
        e.downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default()
    });
    match &outcome {
        Ok(detail) => println!("PASS  {name}  {detail}"),
        Err(why) => println!("FAIL  {name}  {}", why.lines().next().unwrap_or("")),
    }
    report.push((name.to_string(), outcome.is_ok()));
}

fn tian2() -> String {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_present"))
        .args(["mandarin", "--pinyin", "tian2"])
        .env_remove(present::cli::DATA_DIR_ENV)
        .output()
        .unwrap();
    let elapsed = start.elapsed();
    assert_eq!(out.status.code(), Some(0));
    let s = from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(s.symbols(), ["T", "HH", "Y", "EH", "N"]);
    let totals: Vec<f64> = s.entries.iter().map(|e| e.total_duration()).collect();
    assert_eq!(totals, [1.0, 0.5, 0.5, 1.0, 1.0]);
    assert_eq!(s.entries[3].repeat, 3);
    let pitches: Vec<f64> = s.entries.iter().flat_map(|e| e.pitch_offset.clone()).collect();
    let want = [-1.0, -1.0, -1.0, -0.33, 0.33, 1.0, 1.0];
    assert_eq!(pitches.len(), want.len());
    for (got, want) in pitches.iter().zip(want) {
        assert!((got - want).abs() <= 0.005, "pitch {pitches:?}");
    }
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    format!("({} ms)", elapsed.as_millis())
}

fn tone_rows() -> String {
    let rows: [(u8, &[f64]); 5] = [
        (1, &[2.0, 2.0]),
        (2, &[-1.0, 1.0]),
        (3, &[-1.0, -2.0, -1.0]),
        (4, &[2.0, -1.0]),
        (5, &[0.0]),
    ];
    for (tone, pitches) in rows {
        let got = tone_contour(tone).unwrap().pitches;
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&got), bits(pitches), "tone {tone}");
    }
    "5 contours".into()
}

fn aligner_goldens() -> String {
    let m = data::mappings();
    let a = align("where", &["W", "EH", "R"], &m);
    assert_eq!((a.cost, a.to_string().as_str()), (0, "wh→W, e→EH, r→R, e→∅"));
    let a = align("whence", &["W", "Z", "EH", "T"], &m);
    assert_eq!(a.cost, 3);
    let pairs: Vec<String> = a.pairs.iter().map(|p| p.to_string()).collect();
    for needed in ["∅→Z", "n→T", "c→∅"] {
        assert!(pairs.contains(&needed.to_string()), "{a}");
    }
    format!("where: {} | whence: {a}", align("where", &["W", "EH", "R"], &m))
}

fn aligner_optimality() -> String {
    let start = Instant::now();
    let report = support::run_oracle(&data::mappings(), 600);
    let elapsed = start.elapsed();
    assert!(report.cases >= 1000);
    assert!(report.mismatches.is_empty(), "{}", report.mismatches[0]);
    assert!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    format!("({} cases, {} ms)", report.cases, elapsed.as_millis())
}

type Row = (Vec<String>, Vec<f64>, Vec<f64>, Vec<f64>);

fn row(phones: &[AnnotatedPhone]) -> Row {
    (
        phones.iter().map(|p| p.symbol.clone()).collect(),
        phones.iter().map(|p| p.duration_factor).collect(),
        phones.iter().map(|p| p.pitch_change).collect(),
        phones.iter().map(|p| p.energy_change).collect(),
    )
}

fn want(symbols: &[&str], d: &[f64], p: &[f64], e: &[f64]) -> Row {
    (symbols.iter().map(|s| s.to_string()).collect(), d.to_vec(), p.to_vec(), e.to_vec())
}

fn flat(symbols: &[&str], d: &[f64]) -> Row {
    want(symbols, d, &vec![0.0; d.len()], &vec![0.0; d.len()])
}

fn rule_rows() -> String {
    let ipa = |lang, text: &str| row(&transfer_ipa(text, &data::rules(lang).unwrap()).unwrap());
    let cmn = |tokens: &[&str]| {
        let toks: Vec<Token> = tokens.iter().map(|t| Token::segment(t)).collect();
        row(&apply_rules(&toks, &data::rules(Language::Cmn).unwrap()).unwrap())
    };
    use Language::{De, Es, Hu};
    let cases: Vec<(&str, Row, Row)> = vec![
        ("de œ", ipa(De, "œ"), flat(&["W", "EH"], &[0.0, 1.0])),
        ("de ç", ipa(De, "ç"), flat(&["HH", "SH", "S"], &[0.0, 1.0, 0.0])),
        ("de x", ipa(De, "x"), flat(&["HH", "K", "HH"], &[1.0, 0.0, 1.0])),
        ("de ʌ ‖", ipa(De, "ʌ ‖"), flat(&["AH", ","], &[1.0, 0.0])),
        ("hu y", ipa(Hu, "y"), flat(&["UH", "Y"], &[0.0, 1.0])),
        ("hu ɟ", ipa(Hu, "ɟ"), flat(&["G", "Y"], &[0.7, 0.0])),
        ("hu u", ipa(Hu, "u"), flat(&["UW"], &[0.5])),
        ("hu b", ipa(Hu, "b"), flat(&["B"], &[0.7])),
        ("hu k:", ipa(Hu, "k:"), flat(&["K", "K"], &[0.7, 0.7])),
        ("es r", ipa(Es, "r"), flat(&["R", "HH", "R"], &[1.0, 0.0, 1.0])),
        ("es β", ipa(Es, "β"), flat(&["B", "V"], &[0.0, 1.0])),
        ("es x", ipa(Es, "x"), flat(&["HH", "K", "HH"], &[1.0, 0.0, 1.0])),
        ("es t", ipa(Es, "t"), flat(&["T"], &[0.7])),
        ("es o", ipa(Es, "o"), flat(&["OW"], &[0.4])),
        (
            "es o.ˈi",
            ipa(Es, "o.ˈi"),
            want(&["OW", "W", "IY"], &[0.4, 0.4, 0.7], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.5]),
        ),
        ("es apa", ipa(Es, "apa"), flat(&["AA", "P", "P", "AA"], &[0.7, 0.0, 0.7, 0.7])),
        ("cmn zh", cmn(&["zh"]), flat(&["T", "SH"], &[1.0, 0.0])),
        ("cmn x", cmn(&["x"]), flat(&["SH", "S"], &[1.0, 0.0])),
        ("cmn i", cmn(&["i"]), flat(&["IY", ","], &[1.0, 0.0])),
        ("cmn in", cmn(&["in"]), flat(&["IH", "IY", "N"], &[1.0, 0.0, 1.0])),
        ("cmn g", cmn(&["g"]), flat(&["G", "K"], &[1.0, 0.0])),
        ("cmn k", cmn(&["k"]), flat(&["K", "HH"], &[1.0, 0.5])),
        ("cmn zi", tail(cmn(&["z", "i"]), 2), flat(&["Z", "UH"], &[0.5, 0.7])),
        ("cmn si", tail(cmn(&["s", "i"]), 2), flat(&["Z", "UH"], &[0.5, 0.7])),
        ("cmn shi", tail(cmn(&["sh", "i"]), 2), flat(&["Z", "UH"], &[0.5, 0.7])),
        ("cmn chi", cmn(&["ch", "i"]), flat(&["CH", "HH", "R", "R"], &[1.0, 0.5, 1.0, 1.0])),
        ("cmn ai", cmn(&["ʔ", "ai"]), flat(&[",", "AY"], &[0.2, 1.0])),
        ("cmn iu", cmn(&["iu"]), flat(&["Y", "OW"], &[0.5, 1.0])),
    ];
    let n = cases.len();
    for (name, got, expected) in cases {
        assert_eq!(got, expected, "{name}");
    }
    format!("({n} rows)")
}

fn tail(r: Row, k: usize) -> Row {
    let cut = |v: Vec<f64>| v[v.len() - k..].to_vec();
    let n = r.0.len();
    (r.0[n - k..].to_vec(), cut(r.1), cut(r.2), cut(r.3))
}

fn eeg_lint() -> String {
    let stock = "EEG  IY1 IY1 G IY1\nWHERE  W EH1 R\nSEE  S IY1\n";
    let lex = load_lexicon(stock.as_bytes(), DictFormat::CmuDict).unwrap();
    let findings = lint_dictionary(&lex, &data::mappings());
    let eeg = findings.iter().find(|f| f.word == "eeg").expect("eeg reported");
    assert!(eeg.cost > 0);
    assert_eq!(findings.len(), 1);
    format!("eeg cost {}: {}", eeg.cost, eeg.alignment)
}

fn suite<S: Strategy>(cases: u32, strategy: S, check: impl Fn(S::Value) -> Result<(), TestCaseError>) -> u32 {
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, check).unwrap_or_else(|e| panic!("{e}"));
    cases
}

fn property_suites() -> String {
    use props::*;
    let words = lexicon_words(&data::lexicon());
    let mut counts = Vec::new();
    counts.push(suite(200, marked_text(words.clone()), |t| check_english_lengths(&t)));
    counts.push(suite(500, arb_schedule(), |s| check_round_trip(&s)));
    counts.push(suite(200, (pinyin_text(), 2usize..7), |((t, n), k)| check_mandarin_range(&t, n, k)));
    counts.push(suite(500, (arb_pitched(), 0.1f64..4.0), |(s, j)| check_smoothing_idempotent(&s, j)));
    let question = (
        prop::collection::vec(prop::sample::select(words), 1..7),
        -2.0f64..0.5,
        0.05f64..3.0,
    );
    counts.push(suite(200, question, |(w, lo, rise)| check_question_rises(&w, lo, rise)));
    format!(
        "(length law {}, round-trip {}, pitch range {}, smoothing {}, question {} cases)",
        counts[0], counts[1], counts[2], counts[3], counts[4]
    )
}

#[test]
fn acceptance() {
    let mut report = Vec::new();
    std::panic::set_hook(Box::new(|_| {}));
    run("tian2 golden schedule, runtime < 1 s", tian2, &mut report);
    run("tone contour rows bit-exact", tone_rows, &mut report);
    run("aligner goldens where/whence", aligner_goldens, &mut report);
    run("aligner matches brute-force oracle", aligner_optimality, &mut report);
    run("rule table goldens", rule_rows, &mut report);
    run("lint reports EEG", eeg_lint, &mut report);
    run("property suites", property_suites, &mut report);
    println!(
        "SUBSTITUTED  ASR CER and MOS figures  need the full TTS model and ASR systems; \
         covered here by the deterministic criteria above"
    );
    let _ = std::panic::take_hook();
    let failed: Vec<&str> = report.iter().filter(|(_, ok)| !ok).map(|(n, _)| n.as_str()).collect();
    assert!(failed.is_empty(), "failed: {failed:?}");
}
