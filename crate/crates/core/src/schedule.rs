//! Duration/pitch/energy schedules, the English front end and the
//! `present/1` JSON format.
//!
//! An entry's `repeat` says how many copies of the phone's encoder state go
//! to the variance adaptor; each of the three vectors has one value per copy.
//! Duration values multiply the predicted duration, pitch and energy values
//! are added to the predictions.

use std::io::BufRead;
use std::ops::Range;
use std::str::FromStr;

use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::aligner::{align_best, project_span, Alignment};
use crate::arpabet;
use crate::lexicon::{Lexicon, MappingTable};
use crate::mandarin::PitchedPhone;
use crate::markup::{EffectKind, EffectSpan, MarkupError, MarkupParser};
use crate::transfer::AnnotatedPhone;
use crate::Language;

pub const SCHEMA_VERSION: &str = "present/1";

const WH_WORDS: [&str; 9] = ["what", "when", "where", "which", "who", "whom", "whose", "why", "how"];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScheduleError {
    #[error("WordNotFound: {}", .0.join(", "))]
    WordNotFound(Vec<String>),
    #[error("EmptyText: no words to speak")]
    EmptyText,
    #[error("NoVowelInWord: '{0}'")]
    NoVowelInWord(String),
    #[error("VersionMismatch: expected {SCHEMA_VERSION}, found '{0}'")]
    VersionMismatch(String),
    #[error("SchemaViolation: {0}")]
    SchemaViolation(String),
    #[error("MalformedJson: {0}")]
    MalformedJson(String),
    #[error("MalformedPolicy: line {line}: {reason}")]
    MalformedPolicy { line: usize, reason: String },
    #[error(transparent)]
    Markup(#[from] MarkupError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScheduleEntry {
    pub symbol: String,
    pub repeat: usize,
    pub duration_scale: Vec<f64>,
    pub pitch_offset: Vec<f64>,
    pub energy_offset: Vec<f64>,
}

impl ScheduleEntry {
    pub fn neutral(symbol: &str) -> ScheduleEntry {
        ScheduleEntry::uniform(symbol, 1, 1.0, 0.0, 0.0)
    }

    pub fn uniform(symbol: &str, repeat: usize, duration: f64, pitch: f64, energy: f64) -> ScheduleEntry {
        ScheduleEntry {
            symbol: symbol.to_string(),
            repeat,
            duration_scale: vec![duration; repeat],
            pitch_offset: vec![pitch; repeat],
            energy_offset: vec![energy; repeat],
        }
    }

    pub fn is_pause(&self) -> bool {
        self.symbol == arpabet::PAUSE
    }

    pub fn is_neutral(&self) -> bool {
        self.repeat == 1
            && self.duration_scale == [1.0]
            && self.pitch_offset == [0.0]
            && self.energy_offset == [0.0]
    }

    /// Duration summed over copies, in units of the predicted duration.
    pub fn total_duration(&self) -> f64 {
        self.duration_scale.iter().sum()
    }

    /// Re-splits the entry into `repeat` copies. The total duration is kept
    /// and every copy gets the mean pitch and energy.
    pub fn resplit(&mut self, repeat: usize) {
        let total = self.total_duration();
        let pitch = mean(&self.pitch_offset);
        let energy = mean(&self.energy_offset);
        *self = ScheduleEntry::uniform(&self.symbol, repeat, total / repeat as f64, pitch, energy);
    }

    fn lengths_agree(&self) -> bool {
        self.repeat >= 1
            && self.duration_scale.len() == self.repeat
            && self.pitch_offset.len() == self.repeat
            && self.energy_offset.len() == self.repeat
    }
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProsodySchedule {
    pub version: String,
    pub language: Language,
    pub source_text: String,
    pub entries: Vec<ScheduleEntry>,
}

impl ProsodySchedule {
    pub fn new(language: Language, source_text: &str, entries: Vec<ScheduleEntry>) -> ProsodySchedule {
        ProsodySchedule {
            version: SCHEMA_VERSION.to_string(),
            language,
            source_text: source_text.to_string(),
            entries,
        }
    }

    /// True when the schedule leaves every prediction untouched.
    pub fn is_neutral(&self) -> bool {
        self.entries.iter().all(ScheduleEntry::is_neutral)
    }

    pub fn symbols(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.symbol.as_str()).collect()
    }

    /// Number of encoder-state copies the schedule feeds the adaptor.
    pub fn total_copies(&self) -> usize {
        self.entries.iter().map(|e| e.repeat).sum()
    }

    pub fn validate(&self) -> Result<(), ScheduleError> {
        if self.version != SCHEMA_VERSION {
            return Err(ScheduleError::VersionMismatch(self.version.clone()));
        }
        for (i, e) in self.entries.iter().enumerate() {
            if !arpabet::is_symbol(&e.symbol) {
                return Err(ScheduleError::SchemaViolation(format!("$.entries[{i}].symbol")));
            }
            if !e.lengths_agree() {
                return Err(ScheduleError::SchemaViolation(format!("$.entries[{i}].repeat")));
            }
            if e.duration_scale.iter().any(|d| !d.is_finite() || *d < 0.0) {
                return Err(ScheduleError::SchemaViolation(format!("$.entries[{i}].duration_scale")));
            }
        }
        Ok(())
    }
}

/// One entry per phone, no splitting.
pub fn from_annotated(phones: &[AnnotatedPhone], language: Language, source_text: &str) -> ProsodySchedule {
    let entries = phones
        .iter()
        .map(|p| ScheduleEntry::uniform(&p.symbol, 1, p.duration_factor, p.pitch_change, p.energy_change))
        .collect();
    ProsodySchedule::new(language, source_text, entries)
}

/// One entry per phone with one copy per pitch sample. A phone split into
/// n copies gives each copy 1/n of its duration factor.
pub fn from_pitch_plan(plan: &[PitchedPhone], language: Language, source_text: &str) -> ProsodySchedule {
    let entries = plan
        .iter()
        .map(|p| {
            let n = p.pitches.len().max(1);
            ScheduleEntry {
                symbol: p.phone.symbol.clone(),
                repeat: n,
                duration_scale: vec![p.phone.duration_factor / n as f64; n],
                pitch_offset: p.pitches.iter().map(|x| x + p.phone.pitch_change).collect(),
                energy_offset: vec![p.phone.energy_change; n],
            }
        })
        .collect();
    ProsodySchedule::new(language, source_text, entries)
}

/// Magnitudes used by the English front end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Policy {
    /// Energy added to emphasised phones.
    pub emph_energy: f64,
    /// Pitch added to emphasised phones.
    pub emph_pitch: f64,
    /// Duration gained per extra letter of an elongated run.
    pub elong_gain: f64,
    pub elong_cap: f64,
    /// Most copies a pitch-marked elongated vowel is split into.
    pub max_split: usize,
    /// Pitch step per `^` or `_`.
    pub mark_pitch: f64,
    /// Start and end of the question rise.
    pub accent_low: f64,
    pub accent_high: f64,
}

impl Default for Policy {
    fn default() -> Self {
        Policy {
            emph_energy: 1.0,
            emph_pitch: 0.5,
            elong_gain: 0.5,
            elong_cap: 4.0,
            max_split: 5,
            mark_pitch: 0.5,
            accent_low: -0.5,
            accent_high: 1.0,
        }
    }
}

impl Policy {
    /// Reads `key = value` lines over the defaults. `#` starts a comment.
    pub fn load<R: BufRead>(source: R) -> Result<Policy, ScheduleError> {
        let mut policy = Policy::default();
        for (n, line) in source.lines().enumerate() {
            let line_no = n + 1;
            let line = line.map_err(|e| ScheduleError::MalformedPolicy {
                line: line_no,
                reason: e.to_string(),
            })?;
            let text = line.split('#').next().unwrap_or("").trim();
            if text.is_empty() {
                continue;
            }
            let bad = |reason: String| ScheduleError::MalformedPolicy { line: line_no, reason };
            let (key, value) = text
                .split_once('=')
                .ok_or_else(|| bad("expected key = value".into()))?;
            let (key, value) = (key.trim(), value.trim());
            let num = || f64::from_str(value).map_err(|_| bad(format!("'{value}' is not a number")));
            match key {
                "emph_energy" => policy.emph_energy = num()?,
                "emph_pitch" => policy.emph_pitch = num()?,
                "elong_gain" => policy.elong_gain = num()?,
                "elong_cap" => policy.elong_cap = num()?,
                "mark_pitch" => policy.mark_pitch = num()?,
                "accent_low" => policy.accent_low = num()?,
                "accent_high" => policy.accent_high = num()?,
                "max_split" => {
                    policy.max_split = value
                        .parse()
                        .ok()
                        .filter(|&v| v >= 1)
                        .ok_or_else(|| bad(format!("'{value}' is not a positive integer")))?
                }
                _ => return Err(bad(format!("unknown key '{key}'"))),
            }
        }
        Ok(policy)
    }

    /// Duration factor for a run written with `magnitude` letters that
    /// collapsed to `base` letters.
    pub fn elongation_scale(&self, magnitude: u32, base: usize) -> f64 {
        let extra = (f64::from(magnitude) - base as f64).max(0.0);
        (1.0 + self.elong_gain * extra).min(self.elong_cap)
    }
}

/// Where one word of the clean text landed in the schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct WordSpan {
    pub word: String,
    /// Character range in the clean text.
    pub chars: Range<usize>,
    /// Entry range in the schedule.
    pub entries: Range<usize>,
    pub alignment: Alignment,
}

pub type WordMap = Vec<WordSpan>;

/// Lexicon, mapping table and acronym list for the English front end.
pub struct EnglishResources<'a> {
    pub lexicon: &'a Lexicon,
    pub mappings: &'a MappingTable,
    pub acronyms: &'a [String],
}

fn is_word_char(c: char) -> bool {
    c.is_alphabetic() || c == '\''
}

/// Compiles marked-up English into a schedule. Plain text gives a neutral
/// schedule.
pub fn build_english(
    raw_text: &str,
    resources: &EnglishResources<'_>,
    policy: &Policy,
) -> Result<(ProsodySchedule, WordMap), ScheduleError> {
    let markup = MarkupParser::new()
        .with_vocabulary(resources.lexicon)
        .with_acronyms(resources.acronyms)
        .parse(raw_text)?;
    let clean: Vec<char> = markup.clean_text.chars().collect();

    let mut entries = Vec::new();
    let mut words: WordMap = Vec::new();
    let mut missing = Vec::new();
    let mut i = 0;
    while i < clean.len() {
        let c = clean[i];
        if is_word_char(c) {
            let start = i;
            while i < clean.len() && is_word_char(clean[i]) {
                i += 1;
            }
            let word: String = clean[start..i].iter().collect();
            let Ok(prons) = resources.lexicon.lookup(&word) else {
                missing.push(word);
                continue;
            };
            let (choice, alignment) = align_best(&word, prons, resources.mappings)
                .expect("lexicon entries have at least one pronunciation");
            let first = entries.len();
            entries.extend(prons[choice].iter().map(|p| ScheduleEntry::neutral(p)));
            words.push(WordSpan {
                word,
                chars: start..i,
                entries: first..entries.len(),
                alignment,
            });
            continue;
        }
        if matches!(c, ',' | ';' | ':') {
            entries.push(ScheduleEntry::neutral(arpabet::PAUSE));
        }
        i += 1;
    }
    if !missing.is_empty() {
        return Err(ScheduleError::WordNotFound(missing));
    }
    if words.is_empty() {
        return Err(ScheduleError::EmptyText);
    }

    let mut schedule = ProsodySchedule::new(Language::En, raw_text, entries);
    let effects = &markup.effects;
    let of_kind = |k: EffectKind| effects.iter().filter(move |e| e.kind == k);

    for el in of_kind(EffectKind::Elongation) {
        let marks: Vec<&EffectSpan> = effects
            .iter()
            .filter(|m| {
                matches!(m.kind, EffectKind::PitchUp | EffectKind::PitchDown)
                    && m.run_offset.is_some()
                    && m.range() == el.range()
            })
            .collect();
        apply_elongation(&mut schedule, &words, el, &marks, policy);
    }
    for kind in [EffectKind::PitchUp, EffectKind::PitchDown] {
        for mark in of_kind(kind).filter(|m| m.run_offset.is_none()) {
            let step = policy.mark_pitch * f64::from(mark.magnitude) * if kind == EffectKind::PitchUp { 1.0 } else { -1.0 };
            for idx in affected(&words, mark.range()) {
                schedule.entries[idx].pitch_offset.iter_mut().for_each(|p| *p += step);
            }
        }
    }
    for emph in of_kind(EffectKind::Emphasis) {
        for idx in affected(&words, emph.range()) {
            let e = &mut schedule.entries[idx];
            e.energy_offset.iter_mut().for_each(|x| *x += policy.emph_energy);
            e.pitch_offset.iter_mut().for_each(|x| *x += policy.emph_pitch);
        }
    }
    for q in of_kind(EffectKind::Question) {
        let in_sentence: Vec<&WordSpan> = words
            .iter()
            .filter(|w| w.chars.start >= q.char_start && w.chars.end <= q.char_end)
            .collect();
        for word in question_words(&in_sentence) {
            apply_question_accent(&mut schedule, word, policy)?;
        }
    }
    Ok((schedule, words))
}

/// Words of one question that get the rising accent: the locus of
/// interrogation (the first wh-word, if any) and the final word.
pub fn question_words<'w>(sentence: &[&'w WordSpan]) -> Vec<&'w WordSpan> {
    let mut out = Vec::new();
    if let Some(wh) = sentence
        .iter()
        .find(|w| WH_WORDS.contains(&w.word.to_lowercase().as_str()))
    {
        out.push(*wh);
    }
    if let Some(last) = sentence.last() {
        if out.first().map_or(true, |w| w.chars != last.chars) {
            out.push(*last);
        }
    }
    out
}

// Schedule entries whose letters overlap `chars`.
fn affected(words: &[WordSpan], chars: Range<usize>) -> Vec<usize> {
    words
        .iter()
        .filter(|w| w.chars.start < chars.end && chars.start < w.chars.end)
        .flat_map(|w| {
            let local = chars.start.max(w.chars.start) - w.chars.start..chars.end.min(w.chars.end) - w.chars.start;
            project_span(&w.alignment, local)
                .unwrap_or_default()
                .into_iter()
                .map(|p| w.entries.start + p)
        })
        .collect()
}

fn apply_elongation(
    schedule: &mut ProsodySchedule,
    words: &[WordSpan],
    el: &EffectSpan,
    marks: &[&EffectSpan],
    policy: &Policy,
) {
    let hit = affected(words, el.range());
    let vowels: Vec<usize> = hit
        .iter()
        .copied()
        .filter(|&i| arpabet::is_vowel(&schedule.entries[i].symbol))
        .collect();
    let targets = if vowels.is_empty() { hit } else { vowels };
    let scale = policy.elongation_scale(el.magnitude, el.char_end - el.char_start);
    for (n, &idx) in targets.iter().enumerate() {
        let entry = &mut schedule.entries[idx];
        entry.duration_scale.iter_mut().for_each(|d| *d *= scale);
        if n > 0 || marks.is_empty() {
            continue;
        }
        // drawn-out vowel carrying a contour: split and step the pitch
        let k = el.magnitude.max(1) as usize;
        let r = k.min(policy.max_split).max(1);
        entry.resplit(r);
        for m in marks {
            let j = m.run_offset.unwrap_or(0) as usize;
            let from = (j * r / k).min(r - 1);
            let sign = if m.kind == EffectKind::PitchUp { 1.0 } else { -1.0 };
            let step = sign * policy.mark_pitch * f64::from(m.magnitude);
            entry.pitch_offset[from..].iter_mut().for_each(|p| *p += step);
        }
    }
}

/// Gives the last vowel of `word` a rise from `accent_low` to `accent_high`
/// over at least two copies, on top of the vowel's mean pitch offset.
pub fn apply_question_accent(
    schedule: &mut ProsodySchedule,
    word: &WordSpan,
    policy: &Policy,
) -> Result<(), ScheduleError> {
    let idx = word
        .entries
        .clone()
        .rev()
        .find(|&i| arpabet::is_vowel(&schedule.entries[i].symbol))
        .ok_or_else(|| ScheduleError::NoVowelInWord(word.word.clone()))?;
    let entry = &mut schedule.entries[idx];
    let base = mean(&entry.pitch_offset);
    let r = entry.repeat.max(2);
    if r != entry.repeat {
        entry.resplit(r);
    }
    let span = policy.accent_high - policy.accent_low;
    for (s, p) in entry.pitch_offset.iter_mut().enumerate() {
        *p = base + policy.accent_low + span * s as f64 / (r - 1) as f64;
    }
    Ok(())
}

/// Canonical `present/1` text: pretty-printed, fixed key order, trailing
/// newline.
pub fn to_json(schedule: &ProsodySchedule) -> String {
    let mut text = serde_json::to_string_pretty(schedule).expect("schedules always serialise");
    text.push('\n');
    text
}

pub fn from_json(text: &str) -> Result<ProsodySchedule, ScheduleError> {
    let value: Value = serde_json::from_str(text).map_err(|e| ScheduleError::MalformedJson(e.to_string()))?;
    from_value(&value)
}

fn violation(path: impl Into<String>) -> ScheduleError {
    ScheduleError::SchemaViolation(path.into())
}

fn check_keys(obj: &serde_json::Map<String, Value>, allowed: &[&str], path: &str) -> Result<(), ScheduleError> {
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(violation(format!("{path}.{key}")));
        }
    }
    Ok(())
}

pub fn from_value(value: &Value) -> Result<ProsodySchedule, ScheduleError> {
    let obj = value.as_object().ok_or_else(|| violation("$"))?;
    let version = obj
        .get("version")
        .and_then(Value::as_str)
        .ok_or_else(|| violation("$.version"))?;
    if version != SCHEMA_VERSION {
        return Err(ScheduleError::VersionMismatch(version.to_string()));
    }
    check_keys(obj, &["version", "language", "source_text", "entries"], "$")?;
    let language = obj
        .get("language")
        .and_then(Value::as_str)
        .and_then(|s| s.parse::<Language>().ok())
        .ok_or_else(|| violation("$.language"))?;
    let source_text = obj
        .get("source_text")
        .and_then(Value::as_str)
        .ok_or_else(|| violation("$.source_text"))?;
    let raw_entries = obj
        .get("entries")
        .and_then(Value::as_array)
        .ok_or_else(|| violation("$.entries"))?;

    let mut entries = Vec::with_capacity(raw_entries.len());
    for (i, raw) in raw_entries.iter().enumerate() {
        let path = format!("$.entries[{i}]");
        let e = raw.as_object().ok_or_else(|| violation(path.clone()))?;
        check_keys(
            e,
            &["symbol", "repeat", "duration_scale", "pitch_offset", "energy_offset"],
            &path,
        )?;
        let symbol = e
            .get("symbol")
            .and_then(Value::as_str)
            .filter(|s| arpabet::is_symbol(s))
            .ok_or_else(|| violation(format!("{path}.symbol")))?;
        let repeat = e
            .get("repeat")
            .and_then(Value::as_u64)
            .filter(|&r| r >= 1)
            .ok_or_else(|| violation(format!("{path}.repeat")))? as usize;
        let vector = |key: &str| -> Result<Vec<f64>, ScheduleError> {
            let bad = || violation(format!("{path}.{key}"));
            let arr = e.get(key).and_then(Value::as_array).ok_or_else(bad)?;
            if arr.len() != repeat {
                return Err(bad());
            }
            arr.iter().map(|v| v.as_f64().ok_or_else(bad)).collect()
        };
        let duration_scale = vector("duration_scale")?;
        if duration_scale.iter().any(|d| *d < 0.0) {
            return Err(violation(format!("{path}.duration_scale")));
        }
        entries.push(ScheduleEntry {
            symbol: symbol.to_string(),
            repeat,
            duration_scale,
            pitch_offset: vector("pitch_offset")?,
            energy_offset: vector("energy_offset")?,
        });
    }
    Ok(ProsodySchedule::new(language, source_text, entries))
}
