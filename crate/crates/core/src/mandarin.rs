//! Toned pinyin to a subphoneme pitch plan.
//!
//! Pipeline: [`parse_pinyin`] → [`expand_syllable`] → [`assign_pitch`] →
//! [`smooth_boundaries`] → [`insert_word_pauses`]. [`compile_pinyin`] runs
//! all of it.
//!
//! Input is pre-segmented: words are separated by spaces, syllables carry a
//! tone digit (1-4, 5 or no digit for the neutral tone), `v` or `ü` spells ü
//! and an apostrophe may separate syllables inside a word.

use thiserror::Error;

use crate::arpabet;
use crate::transfer::{apply_rules, AnnotatedPhone, RuleError, RuleSet, Token};

/// Onset token standing in for a missing initial.
pub const GLOTTAL_ONSET: &str = "ʔ";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MandarinError {
    #[error("InvalidTone: {0} (expected 1-5)")]
    InvalidTone(u8),
    #[error("InvalidToneDigit: '{digit}' at character {position}")]
    InvalidToneDigit { digit: char, position: usize },
    #[error("UnparsableSyllable: '{text}' at character {position}")]
    UnparsableSyllable { text: String, position: usize },
    #[error("InvalidSubdivisions: {0} (need at least 2)")]
    InvalidSubdivisions(usize),
    #[error(transparent)]
    Rules(#[from] RuleError),
}

/// A tone's contour on the five-level scale and its pitch offsets
/// (level − 3, so the scale spans −2..=+2).
#[derive(Debug, Clone, PartialEq)]
pub struct ToneContour {
    pub tone: u8,
    pub points: Vec<u8>,
    pub pitches: Vec<f64>,
}

impl ToneContour {
    pub fn start(&self) -> f64 {
        self.pitches[0]
    }

    pub fn end(&self) -> f64 {
        self.pitches[self.pitches.len() - 1]
    }

    /// Pitch at fraction `t` ∈ [0, 1] along the contour, linear between
    /// equally spaced points.
    pub fn at(&self, t: f64) -> f64 {
        let p = &self.pitches;
        if p.len() == 1 || t <= 0.0 {
            return p[0];
        }
        if t >= 1.0 {
            return self.end();
        }
        let pos = t * (p.len() - 1) as f64;
        let seg = (pos.floor() as usize).min(p.len() - 2);
        let frac = pos - seg as f64;
        p[seg] + (p[seg + 1] - p[seg]) * frac
    }
}

pub fn tone_contour(tone: u8) -> Result<ToneContour, MandarinError> {
    let points: &[u8] = match tone {
        1 => &[5, 5],
        2 => &[2, 4],
        3 => &[2, 1, 2],
        4 => &[5, 2],
        5 => &[],
        _ => return Err(MandarinError::InvalidTone(tone)),
    };
    let pitches = if points.is_empty() {
        vec![0.0]
    } else {
        points.iter().map(|&p| f64::from(p) - 3.0).collect()
    };
    Ok(ToneContour {
        tone,
        points: points.to_vec(),
        pitches,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyllableSpec {
    /// The syllable as written, normalised (`lv3`, `tian2`).
    pub pinyin: String,
    /// Empty for zero-initial syllables.
    pub initial: String,
    /// Canonical rime: `iu` for you/-iu, `ui` for wei/-ui, `v…` for ü.
    pub rime: String,
    pub tone: u8,
    pub phones: Vec<AnnotatedPhone>,
    pub nucleus_index: usize,
    pub word_initial: bool,
    pub word_index: usize,
}

const INITIALS: [&str; 21] = [
    "zh", "ch", "sh", "b", "p", "m", "f", "d", "t", "n", "l", "g", "k", "h", "j", "q", "x", "r", "z", "c", "s",
];

const RIMES: [&str; 36] = [
    "a", "o", "e", "ai", "ei", "ao", "ou", "an", "en", "ang", "eng", "ong", "er", "i", "ia", "ie", "iao", "iu",
    "ian", "in", "iang", "ing", "iong", "u", "ua", "uo", "uai", "ui", "uan", "un", "uang", "ueng", "v", "ve",
    "van", "vn",
];

// y-/w- spellings of zero-initial syllables
const GLIDE_SPELLINGS: [(&str, &str); 23] = [
    ("yi", "i"),
    ("ya", "ia"),
    ("ye", "ie"),
    ("yao", "iao"),
    ("you", "iu"),
    ("yan", "ian"),
    ("yin", "in"),
    ("yang", "iang"),
    ("ying", "ing"),
    ("yong", "iong"),
    ("yu", "v"),
    ("yue", "ve"),
    ("yuan", "van"),
    ("yun", "vn"),
    ("wu", "u"),
    ("wa", "ua"),
    ("wo", "uo"),
    ("wai", "uai"),
    ("wei", "ui"),
    ("wan", "uan"),
    ("wen", "un"),
    ("wang", "uang"),
    ("weng", "ueng"),
];

/// Splits a toneless syllable into (initial, canonical rime).
pub fn split_syllable(syllable: &str) -> Option<(String, String)> {
    if let Some((_, rime)) = GLIDE_SPELLINGS.iter().find(|(s, _)| *s == syllable) {
        return Some((String::new(), rime.to_string()));
    }
    if syllable.starts_with(['y', 'w']) {
        return None;
    }
    let initial = INITIALS
        .iter()
        .find(|i| syllable.starts_with(**i) && syllable.len() > i.len())
        .copied()
        .unwrap_or("");
    let mut rime = syllable[initial.len()..].to_string();
    if matches!(initial, "j" | "q" | "x") {
        if rime.starts_with('v') {
            // jv, qve are not written that way but mean the same
        } else if let Some(rest) = rime.strip_prefix('u') {
            rime = format!("v{rest}");
        }
        if !rime.starts_with(['i', 'v']) {
            return None;
        }
    }
    if initial.is_empty() && !matches!(rime.as_str(), "a" | "o" | "e" | "ai" | "ei" | "ao" | "ou" | "an" | "en" | "ang" | "eng" | "er") {
        return None;
    }
    RIMES.contains(&rime.as_str()).then(|| (initial.to_string(), rime))
}

fn is_syllable(s: &str) -> bool {
    split_syllable(s).is_some()
}

// Split a run of letters into syllables, longest first, backtracking.
fn segment_letters(letters: &str) -> Option<Vec<String>> {
    if letters.is_empty() {
        return Some(Vec::new());
    }
    let chars: Vec<char> = letters.chars().collect();
    for len in (1..=chars.len().min(6)).rev() {
        let head: String = chars[..len].iter().collect();
        if is_syllable(&head) {
            let tail: String = chars[len..].iter().collect();
            if let Some(mut rest) = segment_letters(&tail) {
                rest.insert(0, head);
                return Some(rest);
            }
        }
    }
    None
}

pub fn parse_pinyin(text: &str) -> Result<Vec<SyllableSpec>, MandarinError> {
    let normalised = text.to_lowercase().replace("u:", "v").replace('ü', "v");
    let chars: Vec<char> = normalised.chars().collect();
    let mut out = Vec::new();
    let mut word_index = 0;
    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_whitespace() {
            i += 1;
            continue;
        }
        let mut word_initial = true;
        while i < chars.len() && !chars[i].is_whitespace() {
            if chars[i] == '\'' {
                i += 1;
                continue;
            }
            let start = i;
            while i < chars.len() && chars[i].is_ascii_lowercase() {
                i += 1;
            }
            let letters: String = chars[start..i].iter().collect();
            let tone = match chars.get(i) {
                Some(&d) if d.is_ascii_digit() => {
                    i += 1;
                    match d {
                        '1'..='5' => d as u8 - b'0',
                        _ => return Err(MandarinError::InvalidToneDigit { digit: d, position: i - 1 }),
                    }
                }
                Some(&c) if !c.is_whitespace() && c != '\'' => {
                    return Err(MandarinError::UnparsableSyllable {
                        text: c.to_string(),
                        position: i,
                    })
                }
                _ => 5,
            };
            if letters.is_empty() {
                return Err(MandarinError::UnparsableSyllable {
                    text: chars[start..i].iter().collect(),
                    position: start,
                });
            }
            let parts = segment_letters(&letters).ok_or_else(|| MandarinError::UnparsableSyllable {
                text: letters.clone(),
                position: start,
            })?;
            let last = parts.len() - 1;
            for (k, part) in parts.into_iter().enumerate() {
                let (initial, rime) = split_syllable(&part).expect("segmented syllables are valid");
                let tone = if k == last { tone } else { 5 };
                out.push(SyllableSpec {
                    pinyin: format!("{part}{tone}"),
                    initial,
                    rime,
                    tone,
                    phones: Vec::new(),
                    nucleus_index: 0,
                    word_initial,
                    word_index,
                });
                word_initial = false;
            }
        }
        word_index += 1;
    }
    Ok(out)
}

/// Rewrites `[initial, rime]` through the rule set and picks the nucleus:
/// the longest vowel phone (first on ties), or the longest phone overall
/// (last on ties) when the syllable has no vowel. Neutral tone halves every
/// duration.
pub fn expand_syllable(spec: &SyllableSpec, rule_set: &RuleSet) -> Result<SyllableSpec, MandarinError> {
    let onset = if spec.initial.is_empty() {
        GLOTTAL_ONSET
    } else {
        spec.initial.as_str()
    };
    let tokens = [Token::segment(onset), Token::segment(&spec.rime)];
    let mut phones = apply_rules(&tokens, rule_set)?;
    if phones.is_empty() {
        return Err(RuleError::NoRuleMatches {
            symbol: spec.pinyin.clone(),
            position: 0,
        }
        .into());
    }
    if spec.tone == 5 {
        for p in &mut phones {
            p.duration_factor *= 0.5;
        }
    }
    let nucleus_index = nucleus(&phones);
    let mut out = spec.clone();
    out.phones = phones;
    out.nucleus_index = nucleus_index;
    Ok(out)
}

fn nucleus(phones: &[AnnotatedPhone]) -> usize {
    let mut best: Option<usize> = None;
    for (k, p) in phones.iter().enumerate() {
        if arpabet::is_vowel(&p.symbol)
            && best.map_or(true, |b| p.duration_factor > phones[b].duration_factor)
        {
            best = Some(k);
        }
    }
    best.unwrap_or_else(|| {
        let mut b = 0;
        for (k, p) in phones.iter().enumerate() {
            if !p.is_pause() && p.duration_factor >= phones[b].duration_factor {
                b = k;
            }
        }
        b
    })
}

/// A phone with one pitch offset per subphoneme (encoder-state copy).
#[derive(Debug, Clone, PartialEq)]
pub struct PitchedPhone {
    pub phone: AnnotatedPhone,
    pub pitches: Vec<f64>,
}

impl PitchedPhone {
    pub fn repeat(&self) -> usize {
        self.pitches.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PitchedSyllable {
    pub syllable: SyllableSpec,
    pub phones: Vec<PitchedPhone>,
}

impl PitchedSyllable {
    fn voiced(&self) -> impl DoubleEndedIterator<Item = &PitchedPhone> {
        self.phones.iter().filter(|p| !p.phone.is_pause())
    }

    fn first_pitch_mut(&mut self) -> Option<&mut f64> {
        self.phones
            .iter_mut()
            .find(|p| !p.phone.is_pause())
            .and_then(|p| p.pitches.first_mut())
    }

    fn last_pitch_mut(&mut self) -> Option<&mut f64> {
        self.phones
            .iter_mut()
            .rev()
            .find(|p| !p.phone.is_pause())
            .and_then(|p| p.pitches.last_mut())
    }

    /// Pitch samples of the non-pause phones in order.
    pub fn samples(&self) -> Vec<f64> {
        self.voiced().flat_map(|p| p.pitches.iter().copied()).collect()
    }
}

/// Splits the nucleus into `subdivisions` copies sampled along the tone
/// contour at k/n, k = 1..=n. Phones before the nucleus take the contour's
/// start pitch, phones after it the end pitch. Pauses carry no pitch.
pub fn assign_pitch(spec: &SyllableSpec, subdivisions: usize) -> Result<PitchedSyllable, MandarinError> {
    if subdivisions < 2 {
        return Err(MandarinError::InvalidSubdivisions(subdivisions));
    }
    let contour = tone_contour(spec.tone)?;
    let n = subdivisions as f64;
    let phones = spec
        .phones
        .iter()
        .enumerate()
        .map(|(k, phone)| {
            let pitches = if phone.is_pause() {
                vec![0.0]
            } else if k < spec.nucleus_index {
                vec![contour.start()]
            } else if k > spec.nucleus_index {
                vec![contour.end()]
            } else {
                (1..=subdivisions)
                    .map(|s| if s == subdivisions { contour.end() } else { contour.at(s as f64 / n) })
                    .collect()
            };
            PitchedPhone {
                phone: phone.clone(),
                pitches,
            }
        })
        .collect();
    Ok(PitchedSyllable {
        syllable: spec.clone(),
        phones,
    })
}

const SMOOTHING_EPS: f64 = 1e-9;

/// Where adjacent syllables meet with a pitch jump above `max_jump`, moves
/// both boundary samples symmetrically toward their mean until the jump is
/// exactly `max_jump`. Pauses are skipped over. Nothing else changes.
pub fn smooth_boundaries(syllables: &mut [PitchedSyllable], max_jump: f64) {
    for i in 1..syllables.len() {
        let (left, right) = syllables.split_at_mut(i);
        let (Some(a), Some(b)) = (left[i - 1].last_pitch_mut(), right[0].first_pitch_mut()) else {
            continue;
        };
        let gap = *b - *a;
        if gap.abs() > max_jump + SMOOTHING_EPS {
            let mean = (*a + *b) / 2.0;
            let half = max_jump.copysign(gap) / 2.0;
            *a = mean - half;
            *b = mean + half;
        }
    }
}

/// Flattens syllables into one phone stream, putting a pause before every
/// word after the first.
pub fn insert_word_pauses(syllables: &[PitchedSyllable], pause_duration_factor: f64) -> Vec<PitchedPhone> {
    let mut out = Vec::new();
    for (i, syl) in syllables.iter().enumerate() {
        if i > 0 && syl.syllable.word_initial {
            out.push(PitchedPhone {
                phone: AnnotatedPhone::new(arpabet::PAUSE, pause_duration_factor),
                pitches: vec![0.0],
            });
        }
        out.extend(syl.phones.iter().cloned());
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MandarinOptions {
    pub subdivisions: usize,
    pub max_jump: f64,
    pub word_pause: f64,
}

impl Default for MandarinOptions {
    fn default() -> Self {
        MandarinOptions {
            subdivisions: 3,
            max_jump: 2.0,
            word_pause: 0.3,
        }
    }
}

/// Pitched syllables before pause insertion, already smoothed.
pub fn pitch_syllables(
    text: &str,
    rule_set: &RuleSet,
    options: &MandarinOptions,
) -> Result<Vec<PitchedSyllable>, MandarinError> {
    let mut pitched = parse_pinyin(text)?
        .iter()
        .enumerate()
        .map(|(id, spec)| {
            let mut expanded = expand_syllable(spec, rule_set)?;
            for p in &mut expanded.phones {
                p.syllable_id = Some(id);
            }
            assign_pitch(&expanded, options.subdivisions)
        })
        .collect::<Result<Vec<_>, _>>()?;
    smooth_boundaries(&mut pitched, options.max_jump);
    Ok(pitched)
}

/// Full pinyin pipeline.
pub fn compile_pinyin(
    text: &str,
    rule_set: &RuleSet,
    options: &MandarinOptions,
) -> Result<Vec<PitchedPhone>, MandarinError> {
    let pitched = pitch_syllables(text, rule_set, options)?;
    Ok(insert_word_pauses(&pitched, options.word_pause))
}
