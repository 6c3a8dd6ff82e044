#![allow(dead_code)]

use present::arpabet;
use present::data;
use present::lexicon::Lexicon;
use present::mandarin::{
    assign_pitch, expand_syllable, insert_word_pauses, parse_pinyin, pitch_syllables, smooth_boundaries,
    split_syllable, MandarinOptions, PitchedPhone, PitchedSyllable, SyllableSpec,
};
use present::schedule::{
    build_english, from_json, from_pitch_plan, to_json, EnglishResources, Policy, ProsodySchedule, ScheduleEntry,
};
use present::transfer::AnnotatedPhone;
use present::Language;
use proptest::prelude::*;

pub const INITIALS: [&str; 22] = [
    "", "b", "p", "m", "f", "d", "t", "n", "l", "g", "k", "h", "j", "q", "x", "zh", "ch", "sh", "r", "z", "c", "s",
];
pub const RIMES: [&str; 36] = [
    "a", "o", "e", "ai", "ei", "ao", "ou", "an", "en", "ang", "eng", "ong", "er", "i", "ia", "ie", "iao", "iu", "ian",
    "in", "iang", "ing", "iong", "u", "ua", "uo", "uai", "ui", "uan", "un", "uang", "ueng", "v", "ve", "van", "vn",
];
pub const GLIDES: [&str; 23] = [
    "yi", "ya", "ye", "yao", "you", "yan", "yin", "yang", "ying", "yong", "yu", "yue", "yuan", "yun", "wu", "wa", "wo",
    "wai", "wei", "wan", "wen", "wang", "weng",
];

pub fn syllable_pool() -> Vec<String> {
    let mut pool: Vec<String> = INITIALS
        .iter()
        .flat_map(|i| RIMES.iter().map(move |r| format!("{i}{r}")))
        .chain(GLIDES.iter().map(|s| s.to_string()))
        .filter(|s| split_syllable(s).is_some())
        .collect();
    pool.sort();
    pool.dedup();
    pool
}

pub fn pinyin_text() -> impl Strategy<Value = (String, usize)> {
    let syllable = (prop::sample::select(syllable_pool()), 1u8..=5).prop_map(|(s, t)| format!("{s}{t}"));
    let word = prop::collection::vec(syllable, 1..=3);
    prop::collection::vec(word, 1..=4).prop_map(|words| {
        let n = words.iter().map(Vec::len).sum();
        (words.iter().map(|w| w.concat()).collect::<Vec<_>>().join(" "), n)
    })
}

pub fn all_pitches(syllables: &[PitchedSyllable]) -> Vec<f64> {
    syllables
        .iter()
        .flat_map(|s| s.phones.iter().flat_map(|p| p.pitches.iter().copied()))
        .collect()
}

pub fn arb_pitched() -> impl Strategy<Value = Vec<PitchedSyllable>> {
    let phone = (prop::bool::weighted(0.15), prop::collection::vec(-2.0f64..=2.0, 1..=4)).prop_map(|(pause, p)| {
        if pause {
            PitchedPhone {
                phone: AnnotatedPhone::new(",", 0.2),
                pitches: vec![0.0],
            }
        } else {
            PitchedPhone {
                phone: AnnotatedPhone::new("AA", 1.0),
                pitches: p,
            }
        }
    });
    let syllable = prop::collection::vec(phone, 1..=4).prop_map(|phones| PitchedSyllable {
        syllable: SyllableSpec {
            pinyin: String::new(),
            initial: String::new(),
            rime: String::new(),
            tone: 1,
            phones: Vec::new(),
            nucleus_index: 0,
            word_initial: false,
            word_index: 0,
        },
        phones,
    });
    // assign_pitch always yields at least two samples per syllable
    prop::collection::vec(syllable.prop_filter("two samples", |s| s.samples().len() >= 2), 0..=8)
}

pub fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO,
        -3.0f64..3.0,
        Just(1.0 / 3.0),
    ]
}

pub fn non_negative() -> impl Strategy<Value = f64> {
    prop_oneof![
        prop::num::f64::POSITIVE | prop::num::f64::ZERO,
        0.0f64..4.0,
        Just(0.7),
    ]
}

pub fn arb_entry() -> impl Strategy<Value = ScheduleEntry> {
    let symbols: Vec<&str> = arpabet::PHONEMES.iter().copied().chain([arpabet::PAUSE]).collect();
    (prop::sample::select(symbols), 1usize..=6).prop_flat_map(|(symbol, repeat)| {
        (
            prop::collection::vec(non_negative(), repeat),
            prop::collection::vec(finite(), repeat),
            prop::collection::vec(finite(), repeat),
        )
            .prop_map(move |(d, p, e)| ScheduleEntry {
                symbol: symbol.to_string(),
                repeat,
                duration_scale: d,
                pitch_offset: p,
                energy_offset: e,
            })
    })
}

pub fn arb_schedule() -> impl Strategy<Value = ProsodySchedule> {
    (
        prop::sample::select(Language::ALL.to_vec()),
        ".{0,40}",
        prop::collection::vec(arb_entry(), 0..12),
    )
        .prop_map(|(lang, text, entries)| ProsodySchedule::new(lang, &text, entries))
}

pub fn bits(s: &ProsodySchedule) -> Vec<Vec<u64>> {
    s.entries
        .iter()
        .flat_map(|e| [&e.duration_scale, &e.pitch_offset, &e.energy_offset])
        .map(|v| v.iter().map(|x| x.to_bits()).collect())
        .collect()
}

pub fn lexicon_words(lex: &Lexicon) -> Vec<String> {
    lex.iter().map(|(w, _)| w.to_string()).filter(|w| w.chars().all(char::is_alphabetic)).collect()
}

// A lexicon word with optional caps, stretched vowel, pitch marks and stars.
pub fn marked_word(words: Vec<String>) -> impl Strategy<Value = String> {
    (
        prop::sample::select(words),
        prop::bool::weighted(0.2),
        prop::option::weighted(0.3, 3usize..8),
        0usize..3,
        prop::bool::weighted(0.15),
    )
        .prop_map(|(word, caps, stretch, marks, stars)| {
            let mut w = if caps { word.to_uppercase() } else { word };
            if let Some(k) = stretch {
                if let Some(pos) = w.find(|c: char| "aeiouAEIOU".contains(c)) {
                    let v = &w[pos..pos + 1];
                    let mut run = v.repeat(k);
                    if marks > 0 {
                        run.insert_str(1, &"^".repeat(marks));
                    }
                    w.replace_range(pos..pos + 1, &run);
                }
            } else if marks > 0 {
                w.insert_str(0, &"_".repeat(marks));
            }
            if stars {
                w = format!("*{w}*");
            }
            w
        })
}

pub fn marked_text(words: Vec<String>) -> impl Strategy<Value = String> {
    (prop::collection::vec(marked_word(words), 1..7), prop::sample::select(vec!["", ".", "?", "!", ","]))
        .prop_map(|(ws, end)| format!("{}{end}", ws.join(" ")))
}

pub fn english(text: &str, policy: &Policy) -> ProsodySchedule {
    let lexicon = data::lexicon();
    let mappings = data::mappings();
    let acronyms = data::acronyms();
    let res = EnglishResources {
        lexicon: &lexicon,
        mappings: &mappings,
        acronyms: &acronyms,
    };
    build_english(text, &res, policy).unwrap_or_else(|e| panic!("{text:?}: {e}")).0
}

pub fn lengths_agree(s: &ProsodySchedule) -> bool {
    s.entries.iter().all(|e| {
        e.repeat >= 1
            && e.duration_scale.len() == e.repeat
            && e.pitch_offset.len() == e.repeat
            && e.energy_offset.len() == e.repeat
            && e.duration_scale.iter().all(|d| *d >= 0.0)
    })
}

// Per-case checks, shared with the acceptance target.

pub fn check_round_trip(s: &ProsodySchedule) -> Result<(), TestCaseError> {
    let text = to_json(s);
    let back = from_json(&text).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(&back, s);
    prop_assert_eq!(bits(&back), bits(s));
    prop_assert_eq!(to_json(&back), text);
    Ok(())
}

pub fn check_english_lengths(text: &str) -> Result<(), TestCaseError> {
    let s = english(text, &Policy::default());
    prop_assert!(lengths_agree(&s));
    prop_assert!(s.validate().is_ok());
    prop_assert!(!s.entries.is_empty());
    Ok(())
}

pub fn check_question_rises(words: &[String], low: f64, rise: f64) -> Result<(), TestCaseError> {
    let policy = Policy {
        accent_low: low,
        accent_high: low + rise,
        ..Policy::default()
    };
    let text = words.join(" ").to_lowercase() + "?";
    let s = english(&text, &policy);
    let accented: Vec<&ScheduleEntry> = s.entries.iter().filter(|e| e.repeat >= 2).collect();
    prop_assert!(!accented.is_empty());
    for e in accented {
        prop_assert!(arpabet::is_vowel(&e.symbol));
        prop_assert!(e.pitch_offset.windows(2).all(|w| w[0] < w[1]), "{:?}", e.pitch_offset);
    }
    Ok(())
}

pub fn check_mandarin_range(text: &str, n: usize, subdivisions: usize) -> Result<(), TestCaseError> {
    let rules = data::rules(Language::Cmn).unwrap();
    let specs = parse_pinyin(text).unwrap();
    prop_assert_eq!(specs.len(), n);
    let raw: Vec<PitchedSyllable> = specs
        .iter()
        .map(|s| assign_pitch(&expand_syllable(s, &rules).unwrap(), subdivisions).unwrap())
        .collect();
    prop_assert!(all_pitches(&raw).iter().all(|p| (-2.0..=2.0).contains(p)));
    let options = MandarinOptions {
        subdivisions,
        ..MandarinOptions::default()
    };
    let smoothed = pitch_syllables(text, &rules, &options).unwrap();
    prop_assert!(all_pitches(&smoothed).iter().all(|p| (-2.0..=2.0).contains(p)));
    let plan = insert_word_pauses(&smoothed, options.word_pause);
    let schedule = from_pitch_plan(&plan, Language::Cmn, text);
    prop_assert!(lengths_agree(&schedule));
    prop_assert!(schedule.entries.iter().flat_map(|e| &e.pitch_offset).all(|p| (-2.0..=2.0).contains(p)));
    Ok(())
}

pub fn check_smoothing_idempotent(syllables: &[PitchedSyllable], max_jump: f64) -> Result<(), TestCaseError> {
    let mut s = syllables.to_vec();
    smooth_boundaries(&mut s, max_jump);
    let once = s.clone();
    smooth_boundaries(&mut s, max_jump);
    prop_assert_eq!(s, once);
    Ok(())
}
