//! Prosodic markup in plain English text.
//!
//! | markup            | effect                                              |
//! |-------------------|-----------------------------------------------------|
//! | `LOUD`, `*word*`  | [`EffectKind::Emphasis`]                            |
//! | `looooong`, `ti~~lde` | [`EffectKind::Elongation`], magnitude = letters + tildes |
//! | `^^word`          | [`EffectKind::PitchUp`], magnitude = caret count    |
//! | `__word`          | [`EffectKind::PitchDown`], magnitude = underscore count |
//! | trailing `?`      | [`EffectKind::Question`] over the sentence          |
//!
//! Offsets are character (not byte) offsets into the clean text.

use std::collections::HashSet;

use thiserror::Error;

use crate::lexicon::Vocabulary;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MarkupError {
    #[error("EmptyInput: nothing to parse")]
    EmptyInput,
    #[error("UnbalancedDelimiter: unmatched '*' at character {position}")]
    UnbalancedDelimiter { position: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EffectKind {
    Emphasis,
    Elongation,
    PitchUp,
    PitchDown,
    Question,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EffectSpan {
    pub kind: EffectKind,
    pub char_start: usize,
    pub char_end: usize,
    /// Letter-repeat count for elongation, mark count for pitch marks, 1 otherwise.
    pub magnitude: u32,
    /// For a pitch mark written inside an elongated letter run: the index of
    /// the letter it precedes within the raw run. Lets a drawn-out vowel carry
    /// a contour (`Su^^uu__ure`).
    pub run_offset: Option<u32>,
}

impl EffectSpan {
    fn new(kind: EffectKind, char_start: usize, char_end: usize, magnitude: u32) -> EffectSpan {
        EffectSpan {
            kind,
            char_start,
            char_end,
            magnitude,
            run_offset: None,
        }
    }

    pub fn range(&self) -> std::ops::Range<usize> {
        self.char_start..self.char_end
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Markup {
    pub clean_text: String,
    pub effects: Vec<EffectSpan>,
}

const MARKS: [char; 5] = ['*', '~', '_', '^', '?'];

fn is_word_char(c: char) -> bool {
    c.is_alphabetic() || c == '\'' || matches!(c, '~' | '^' | '_')
}

fn is_vowel_letter(c: char) -> bool {
    matches!(c.to_ascii_lowercase(), 'a' | 'e' | 'i' | 'o' | 'u' | 'y')
}

/// Markup parser with an optional vocabulary (used to undo letter
/// stretching) and an acronym list (exempt from caps emphasis).
#[derive(Default)]
pub struct MarkupParser<'a> {
    vocabulary: Option<&'a dyn Vocabulary>,
    acronyms: HashSet<String>,
}

/// Parses with no vocabulary and no acronyms: stretched letters collapse to
/// a single letter.
pub fn parse_markup(raw_text: &str) -> Result<Markup, MarkupError> {
    MarkupParser::new().parse(raw_text)
}

impl<'a> MarkupParser<'a> {
    pub fn new() -> MarkupParser<'a> {
        MarkupParser::default()
    }

    pub fn with_vocabulary(mut self, vocabulary: &'a dyn Vocabulary) -> Self {
        self.vocabulary = Some(vocabulary);
        self
    }

    pub fn with_acronyms<I, S>(mut self, acronyms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.acronyms
            .extend(acronyms.into_iter().map(|s| s.as_ref().to_uppercase()));
        self
    }

    pub fn parse(&self, raw_text: &str) -> Result<Markup, MarkupError> {
        if raw_text.trim().is_empty() {
            return Err(MarkupError::EmptyInput);
        }
        let raw: Vec<char> = raw_text.chars().collect();
        let stars: Vec<usize> = raw
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == '*')
            .map(|(i, _)| i)
            .collect();
        if stars.len() % 2 == 1 {
            return Err(MarkupError::UnbalancedDelimiter {
                position: *stars.last().unwrap(),
            });
        }

        let mut clean: Vec<char> = Vec::with_capacity(raw.len());
        let mut effects: Vec<EffectSpan> = Vec::new();
        let mut star_open: Option<usize> = None;
        let mut sentence_start = 0usize;
        let mut sentence_question = false;

        let mut i = 0;
        while i < raw.len() {
            let c = raw[i];
            if is_word_char(c) {
                let start = i;
                while i < raw.len() && (is_word_char(raw[i]) || inner_mark(&raw, i)) {
                    i += 1;
                }
                let marks = self.word(&raw[start..i], &mut clean, &mut effects, star_open.is_some());
                for (mark, pos) in marks {
                    match mark {
                        '*' => toggle_star(&mut star_open, pos, &clean, &mut effects),
                        _ => sentence_question = true,
                    }
                }
                continue;
            }
            match c {
                '*' => toggle_star(&mut star_open, clean.len(), &clean, &mut effects),
                '?' => sentence_question = true,
                _ => clean.push(c),
            }
            if matches!(c, '.' | '!' | '?') {
                // a run of terminators closes one sentence
                let next = raw.get(i + 1).copied();
                if !matches!(next, Some('.' | '!' | '?')) {
                    if sentence_question {
                        if let Some((s, e)) = letter_bounds(&clean, sentence_start, clean.len()) {
                            effects.push(EffectSpan::new(EffectKind::Question, s, e, 1));
                        }
                    }
                    sentence_question = false;
                    sentence_start = clean.len();
                }
            }
            i += 1;
        }
        if sentence_question {
            if let Some((s, e)) = letter_bounds(&clean, sentence_start, clean.len()) {
                effects.push(EffectSpan::new(EffectKind::Question, s, e, 1));
            }
        }

        merge_same_kind(&mut effects);
        effects.sort_by_key(|e| (e.char_start, e.kind, e.char_end));
        Ok(Markup {
            clean_text: clean.into_iter().collect(),
            effects,
        })
    }

    /// Emits one word and returns any `*` or `?` inside it with its clean position.
    fn word(
        &self,
        raw: &[char],
        clean: &mut Vec<char>,
        effects: &mut Vec<EffectSpan>,
        in_stars: bool,
    ) -> Vec<(char, usize)> {
        // letters with the marks written before them and tildes after them
        struct Letter {
            ch: char,
            up: u32,
            down: u32,
            tildes: u32,
        }
        let mut letters: Vec<Letter> = Vec::new();
        let (mut up, mut down) = (0u32, 0u32);
        let mut inner: Vec<(char, usize)> = Vec::new();
        for &c in raw {
            match c {
                '*' | '?' => inner.push((c, letters.len())),
                '^' => up += 1,
                '_' => down += 1,
                '~' => {
                    if let Some(last) = letters.last_mut() {
                        last.tildes += 1;
                    }
                }
                _ => {
                    letters.push(Letter {
                        ch: c,
                        up,
                        down,
                        tildes: 0,
                    });
                    up = 0;
                    down = 0;
                }
            }
        }
        if letters.is_empty() {
            return inner.into_iter().map(|(c, _)| (c, clean.len())).collect();
        }

        // runs of identical letters; marks between them do not break a run
        struct Run {
            first: usize,
            len: usize,
            tildes: u32,
            keep: usize,
        }
        let mut runs: Vec<Run> = Vec::new();
        for (idx, l) in letters.iter().enumerate() {
            let lower = l.ch.to_lowercase().next().unwrap_or(l.ch);
            match runs.last_mut() {
                Some(r)
                    if l.ch.is_alphabetic()
                        && letters[r.first].ch.to_lowercase().next() == Some(lower) =>
                {
                    r.len += 1;
                    r.tildes += l.tildes;
                }
                _ => runs.push(Run {
                    first: idx,
                    len: 1,
                    tildes: l.tildes,
                    keep: 1,
                }),
            }
        }
        for r in &mut runs {
            r.keep = r.len;
        }

        // choose how far each stretched run collapses
        let stretched: Vec<usize> = (0..runs.len()).filter(|&r| runs[r].len >= 3).collect();
        if !stretched.is_empty() {
            let choices = stretched.len().min(12);
            let mut best: Option<(bool, usize, u32)> = None;
            for mask in 0u32..(1 << choices) {
                let mut spelled = String::new();
                let mut total = 0;
                for (ri, r) in runs.iter().enumerate() {
                    let keep = match stretched.iter().position(|&s| s == ri) {
                        Some(k) if k < choices => 1 + ((mask >> k) & 1) as usize,
                        Some(_) => 1,
                        None => r.len,
                    };
                    total += keep;
                    for l in &letters[r.first..r.first + keep] {
                        spelled.extend(l.ch.to_lowercase());
                    }
                }
                let known = self
                    .vocabulary
                    .is_some_and(|v| v.contains_word(&spelled));
                let better = match best {
                    None => true,
                    Some((bk, bt, _)) => (known && !bk) || (known == bk && total < bt),
                };
                if better {
                    best = Some((known, total, mask));
                }
            }
            let mask = best.map_or(0, |b| b.2);
            for (k, &ri) in stretched.iter().enumerate() {
                runs[ri].keep = if k < choices { 1 + ((mask >> k) & 1) as usize } else { 1 };
            }
        }

        // emit clean letters and remember where each run landed
        let word_start = clean.len();
        let mut run_pos = Vec::with_capacity(runs.len());
        for r in &runs {
            run_pos.push(clean.len());
            clean.extend(letters[r.first..r.first + r.keep].iter().map(|l| l.ch));
        }
        let word_end = clean.len();
        let word_clean: Vec<char> = clean[word_start..word_end].to_vec();

        for (ri, r) in runs.iter().enumerate() {
            let elongated = r.len >= 3 || r.tildes > 0;
            if elongated {
                effects.push(EffectSpan::new(
                    EffectKind::Elongation,
                    run_pos[ri],
                    run_pos[ri] + r.keep,
                    r.len as u32 + r.tildes,
                ));
            }
            for (j, l) in letters[r.first..r.first + r.len].iter().enumerate() {
                for (kind, count) in [(EffectKind::PitchUp, l.up), (EffectKind::PitchDown, l.down)] {
                    if count == 0 {
                        continue;
                    }
                    let mut span = if elongated {
                        let mut s = EffectSpan::new(kind, run_pos[ri], run_pos[ri] + r.keep, count);
                        s.run_offset = Some(j as u32);
                        s
                    } else {
                        let start = run_pos[ri] + j;
                        EffectSpan::new(kind, start, vowel_span_end(&word_clean, start - word_start) + word_start, count)
                    };
                    if span.char_start == span.char_end {
                        span.char_end = span.char_start + 1;
                    }
                    effects.push(span);
                }
            }
        }

        let alpha: Vec<char> = word_clean.iter().copied().filter(|c| c.is_alphabetic()).collect();
        let shouting = alpha.len() >= 2
            && alpha.iter().all(|c| !c.is_lowercase())
            && alpha.iter().any(|c| c.is_uppercase());
        if shouting && !in_stars && !inner.iter().any(|(c, _)| *c == '*') {
            let key: String = alpha.iter().collect();
            if !self.acronyms.contains(&key.to_uppercase()) {
                if let Some((s, e)) = letter_bounds(clean, word_start, word_end) {
                    effects.push(EffectSpan::new(EffectKind::Emphasis, s, e, 1));
                }
            }
        }

        inner
            .into_iter()
            .map(|(c, l)| match runs.iter().enumerate().find(|(_, r)| l < r.first + r.len) {
                Some((ri, r)) => (c, run_pos[ri] + (l - r.first).min(r.keep)),
                None => (c, word_end),
            })
            .collect()
    }
}

// A `*` or `?` with word characters on both sides (other such marks aside)
// sits inside a word.
fn inner_mark(raw: &[char], i: usize) -> bool {
    let dropped = |c: &&char| matches!(**c, '*' | '?');
    if !dropped(&&raw[i]) || i == 0 {
        return false;
    }
    let before = raw[..i].iter().rev().find(|c| !dropped(c));
    let after = raw[i + 1..].iter().find(|c| !dropped(c));
    before.is_some_and(|&c| is_word_char(c)) && after.is_some_and(|&c| is_word_char(c))
}

fn toggle_star(open: &mut Option<usize>, pos: usize, clean: &[char], effects: &mut Vec<EffectSpan>) {
    match open.take() {
        None => *open = Some(pos),
        Some(start) => {
            if let Some((s, e)) = letter_bounds(clean, start, pos) {
                effects.push(EffectSpan::new(EffectKind::Emphasis, s, e, 1));
            }
        }
    }
}

// End (exclusive, word-relative) of the first vowel-letter run at or after `from`.
fn vowel_span_end(word: &[char], from: usize) -> usize {
    let mut k = from;
    while k < word.len() && !is_vowel_letter(word[k]) {
        k += 1;
    }
    if k == word.len() {
        return word.len();
    }
    while k < word.len() && is_vowel_letter(word[k]) {
        k += 1;
    }
    k
}

fn letter_bounds(clean: &[char], from: usize, to: usize) -> Option<(usize, usize)> {
    let first = (from..to).find(|&k| clean[k].is_alphabetic())?;
    let last = (from..to).rev().find(|&k| clean[k].is_alphabetic())?;
    Some((first, last + 1))
}

// Same-kind spans never overlap: overlapping ones are unioned, magnitudes
// summed, earliest run offset kept.
fn merge_same_kind(effects: &mut Vec<EffectSpan>) {
    effects.sort_by_key(|e| (e.kind, e.char_start, e.char_end));
    let mut merged: Vec<EffectSpan> = Vec::with_capacity(effects.len());
    for e in effects.drain(..) {
        match merged.last_mut() {
            Some(prev) if prev.kind == e.kind && e.char_start < prev.char_end => {
                prev.char_end = prev.char_end.max(e.char_end);
                match prev.kind {
                    EffectKind::Emphasis | EffectKind::Question => {}
                    _ => prev.magnitude += e.magnitude,
                }
                prev.run_offset = match (prev.run_offset, e.run_offset) {
                    (Some(a), Some(b)) => Some(a.min(b)),
                    (a, b) => a.or(b),
                };
            }
            _ => merged.push(e),
        }
    }
    *effects = merged;
}

/// Number of markup characters in `raw`.
pub fn markup_char_count(raw: &str) -> usize {
    raw.chars().filter(|c| MARKS.contains(c)).count()
}
