//! Context-sensitive rewrite rules from a source phone inventory (IPA, or
//! pinyin initials and rimes) to ARPAbet with per-phone duration, pitch and
//! energy adjustments.
//!
//! # Rule files
//!
//! One rule per line; lines starting with `#` are comments:
//!
//! ```text
//! source [| left _ right] -> T1:D1:P1:E1 T2:D2:P2:E2 ... [@priority]
//! source [| left _ right] -> T1 T2 ... [D=[d1,d2]] [P=[..]] [E=[..]] [@priority]
//! ```
//!
//! * `source` is a space-separated token sequence. `ˈx` requires a stressed
//!   segment, `xː` (or `x:`) a long one, `.` is a syllable break and `‖` a word
//!   boundary.
//! * `left`/`right` are optional single predicates on the neighbouring token:
//!   `#` word boundary, `.` syllable break, `V` vowel, `C` consonant, `ˈ`
//!   stressed, `{a b c}` one of the listed segments, or a bare segment.
//! * `D` multiplies the predicted duration; a missing `D` falls back to the
//!   language default (`%default_duration` overrides it). `P` and `E` are
//!   additive offsets and default to 0.
//! * `,` is the pause target.
//!
//! Rules are tried by descending priority, then longer sources, then more
//! constrained patterns, then file order. The first match fires and
//! consumes its source.

use std::collections::BTreeSet;
use std::fmt;
use std::io::BufRead;
use std::ops::Range;

use thiserror::Error;

use crate::arpabet;
use crate::Language;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RuleError {
    #[error("MalformedRule: line {line}: {reason}")]
    MalformedRule { line: usize, reason: String },
    #[error("LengthMismatch: line {line}: {what} has {got} values for {expected} targets")]
    LengthMismatch {
        line: usize,
        what: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("UnknownArpabet: '{symbol}' on line {line}")]
    UnknownArpabet { symbol: String, line: usize },
    #[error("UnknownIpaSymbol: '{symbol}' at character {position}")]
    UnknownIpaSymbol { symbol: char, position: usize },
    #[error("NoRuleMatches: no rule for '{symbol}' at token {position}")]
    NoRuleMatches { symbol: String, position: usize },
    #[error("Io: {0}")]
    Io(String),
}

/// One tokenized source symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Token {
    Segment {
        base: String,
        long: bool,
        stressed: bool,
    },
    SyllableBreak,
    WordBoundary,
}

impl Token {
    pub fn segment(base: &str) -> Token {
        Token::Segment {
            base: base.to_string(),
            long: false,
            stressed: false,
        }
    }

    pub fn base(&self) -> Option<&str> {
        match self {
            Token::Segment { base, .. } => Some(base),
            _ => None,
        }
    }

    pub fn is_boundary(&self) -> bool {
        !matches!(self, Token::Segment { .. })
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Segment {
                base,
                long,
                stressed,
            } => {
                if *stressed {
                    f.write_str("ˈ")?;
                }
                f.write_str(base)?;
                if *long {
                    f.write_str("ː")?;
                }
                Ok(())
            }
            Token::SyllableBreak => f.write_str("."),
            Token::WordBoundary => f.write_str("‖"),
        }
    }
}

const IPA_VOWELS: &str = "aeiouyæøœɐɑɒɔəɘɛɜɞɤɨɪɯɵɶʉʊʌʏɚɝv";

/// Vowel class used by the `V`/`C` predicates: the segment starts with a
/// vowel letter (IPA vowels, plus pinyin `v` for ü).
pub fn is_vowel_segment(base: &str) -> bool {
    base.chars().next().is_some_and(|c| IPA_VOWELS.contains(c))
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum SourceToken {
    Segment {
        base: String,
        long: bool,
        stressed: bool,
    },
    SyllableBreak,
    WordBoundary,
}

impl SourceToken {
    fn matches(&self, token: &Token) -> bool {
        match (self, token) {
            (
                SourceToken::Segment {
                    base,
                    long,
                    stressed,
                },
                Token::Segment {
                    base: b,
                    long: l,
                    stressed: s,
                },
            ) => base == b && (!long || *l) && (!stressed || *s),
            (SourceToken::SyllableBreak, Token::SyllableBreak) => true,
            (SourceToken::WordBoundary, Token::WordBoundary) => true,
            _ => false,
        }
    }

    fn constraints(&self) -> usize {
        match self {
            SourceToken::Segment { long, stressed, .. } => usize::from(*long) + usize::from(*stressed),
            _ => 0,
        }
    }
}

impl fmt::Display for SourceToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceToken::Segment {
                base,
                long,
                stressed,
            } => Token::Segment {
                base: base.clone(),
                long: *long,
                stressed: *stressed,
            }
            .fmt(f),
            SourceToken::SyllableBreak => f.write_str("."),
            SourceToken::WordBoundary => f.write_str("‖"),
        }
    }
}

/// Predicate on the token next to a rule's source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Context {
    WordBoundary,
    SyllableBreak,
    Vowel,
    Consonant,
    Stressed,
    OneOf(BTreeSet<String>),
}

impl Context {
    /// `None` is the edge of the sequence.
    pub fn holds(&self, neighbour: Option<&Token>) -> bool {
        match (self, neighbour) {
            (Context::WordBoundary, None | Some(Token::WordBoundary)) => true,
            (Context::SyllableBreak, None | Some(Token::WordBoundary | Token::SyllableBreak)) => true,
            (Context::Vowel, Some(Token::Segment { base, .. })) => is_vowel_segment(base),
            (Context::Consonant, Some(Token::Segment { base, .. })) => !is_vowel_segment(base),
            (Context::Stressed, Some(Token::Segment { stressed, .. })) => *stressed,
            (Context::OneOf(set), Some(Token::Segment { base, .. })) => set.contains(base),
            _ => false,
        }
    }
}

/// A single rewrite: source symbols to annotated ARPAbet targets.
#[derive(Debug, Clone, PartialEq)]
pub struct MappingRule {
    source: Vec<SourceToken>,
    pub left_context: Option<Context>,
    pub right_context: Option<Context>,
    pub targets: Vec<String>,
    pub durations: Vec<f64>,
    pub pitch_changes: Vec<f64>,
    pub energy_changes: Vec<f64>,
    pub priority: i32,
    /// Line in the rule file (0 for rules built in code).
    pub line: usize,
}

impl MappingRule {
    pub fn source_len(&self) -> usize {
        self.source.len()
    }

    /// Source rendered back to rule-file notation, e.g. `o . ˈi`.
    pub fn source_text(&self) -> String {
        self.source
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn specificity(&self) -> usize {
        self.source.iter().map(SourceToken::constraints).sum::<usize>()
            + usize::from(self.left_context.is_some())
            + usize::from(self.right_context.is_some())
    }

    fn matches_at(&self, tokens: &[Token], at: usize) -> bool {
        let end = at + self.source.len();
        if end > tokens.len() || !self.source.iter().zip(&tokens[at..end]).all(|(s, t)| s.matches(t)) {
            return false;
        }
        let left = at.checked_sub(1).map(|k| &tokens[k]);
        let right = tokens.get(end);
        self.left_context.as_ref().map_or(true, |c| c.holds(left))
            && self.right_context.as_ref().map_or(true, |c| c.holds(right))
    }
}

/// Rules for one language in firing order.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleSet {
    pub language: Language,
    pub default_duration: f64,
    rules: Vec<MappingRule>,
    alphabet: BTreeSet<String>,
}

impl RuleSet {
    pub fn empty(language: Language) -> RuleSet {
        RuleSet {
            language,
            default_duration: language.default_duration(),
            rules: Vec::new(),
            alphabet: BTreeSet::new(),
        }
    }

    pub fn rules(&self) -> &[MappingRule] {
        &self.rules
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    /// Every segment spelled in a source or context set.
    pub fn alphabet(&self) -> &BTreeSet<String> {
        &self.alphabet
    }

    fn push(&mut self, rule: MappingRule) {
        for s in &rule.source {
            if let SourceToken::Segment { base, .. } = s {
                self.alphabet.insert(base.clone());
            }
        }
        for c in [&rule.left_context, &rule.right_context].into_iter().flatten() {
            if let Context::OneOf(set) = c {
                self.alphabet.extend(set.iter().cloned());
            }
        }
        self.rules.push(rule);
    }

    fn sort(&mut self) {
        self.rules.sort_by(|a, b| {
            b.priority
                .cmp(&a.priority)
                .then_with(|| b.source.len().cmp(&a.source.len()))
                .then_with(|| b.specificity().cmp(&a.specificity()))
                .then_with(|| a.line.cmp(&b.line))
        });
    }

    fn longest_symbol(&self) -> usize {
        self.alphabet.iter().map(|s| s.chars().count()).max().unwrap_or(0)
    }
}

pub fn load_rules<R: BufRead>(source: R, language: Language) -> Result<RuleSet, RuleError> {
    let mut set = RuleSet::empty(language);
    let mut pending: Vec<(usize, String)> = Vec::new();
    for (idx, line) in source.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| RuleError::Io(e.to_string()))?;
        // '#' doubles as the word-boundary predicate, so only whole-line comments
        let content = line.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        if let Some(rest) = content.strip_prefix("%default_duration") {
            set.default_duration = parse_number(rest.trim(), line_no, "default duration")?;
            if set.default_duration < 0.0 {
                return Err(malformed(line_no, "negative default duration"));
            }
            continue;
        }
        if content.starts_with('%') {
            return Err(malformed(line_no, "unknown directive"));
        }
        pending.push((line_no, content.to_string()));
    }
    // directives apply to the whole file
    for (line_no, content) in pending {
        let rule = parse_rule(&content, line_no, set.default_duration)?;
        set.push(rule);
    }
    set.sort();
    Ok(set)
}

fn malformed(line: usize, reason: &str) -> RuleError {
    RuleError::MalformedRule {
        line,
        reason: reason.to_string(),
    }
}

fn parse_number(text: &str, line: usize, what: &str) -> Result<f64, RuleError> {
    let text = text.strip_prefix('+').unwrap_or(text);
    text.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| malformed(line, &format!("bad {what} '{text}'")))
}

fn parse_source_token(text: &str, line: usize) -> Result<SourceToken, RuleError> {
    match text {
        "." => return Ok(SourceToken::SyllableBreak),
        "‖" | "||" => return Ok(SourceToken::WordBoundary),
        _ => {}
    }
    let (stressed, rest) = match text.strip_prefix('ˈ') {
        Some(r) => (true, r),
        None => (false, text),
    };
    let (long, base) = match rest.strip_suffix('ː').or_else(|| rest.strip_suffix(':')) {
        Some(b) => (true, b),
        None => (false, rest),
    };
    if base.is_empty() || base.contains(['ˈ', 'ː', '|', '{', '}', '_']) {
        return Err(malformed(line, &format!("bad source symbol '{text}'")));
    }
    Ok(SourceToken::Segment {
        base: base.to_string(),
        long,
        stressed,
    })
}

fn parse_context(tokens: &[&str], line: usize) -> Result<Option<Context>, RuleError> {
    match tokens {
        [] => Ok(None),
        [one] => Ok(Some(match *one {
            "#" => Context::WordBoundary,
            "." => Context::SyllableBreak,
            "V" => Context::Vowel,
            "C" => Context::Consonant,
            "ˈ" => Context::Stressed,
            seg => Context::OneOf([seg.to_string()].into()),
        })),
        [first, .., last] if first.starts_with('{') && last.ends_with('}') => {
            let joined = tokens.join(" ");
            let inner = &joined[1..joined.len() - 1];
            let set: BTreeSet<String> = inner.split_whitespace().map(str::to_string).collect();
            if set.is_empty() {
                return Err(malformed(line, "empty context set"));
            }
            Ok(Some(Context::OneOf(set)))
        }
        _ => Err(malformed(line, "a context is a single predicate")),
    }
}

fn parse_vector(text: &str, line: usize, what: &str) -> Result<Vec<f64>, RuleError> {
    let inner = text
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .unwrap_or(text);
    inner
        .split(',')
        .map(|v| parse_number(v.trim(), line, what))
        .collect()
}

fn parse_rule(content: &str, line: usize, default_duration: f64) -> Result<MappingRule, RuleError> {
    let (lhs, rhs) = content
        .split_once("->")
        .ok_or_else(|| malformed(line, "missing '->'"))?;
    let (source_text, context_text) = match lhs.split_once('|') {
        // "||" is a word boundary spelling, not a context separator
        Some((s, c)) if !lhs.contains("||") => (s, Some(c)),
        _ => (lhs, None),
    };
    let source = source_text
        .split_whitespace()
        .map(|t| parse_source_token(t, line))
        .collect::<Result<Vec<_>, _>>()?;
    if source.is_empty() {
        return Err(malformed(line, "empty source"));
    }
    let (left_context, right_context) = match context_text {
        None => (None, None),
        Some(ctx) => {
            let toks: Vec<&str> = ctx.split_whitespace().collect();
            let holes: Vec<usize> = toks
                .iter()
                .enumerate()
                .filter(|(_, t)| **t == "_")
                .map(|(i, _)| i)
                .collect();
            let [hole] = holes[..] else {
                return Err(malformed(line, "context needs exactly one '_'"));
            };
            (
                parse_context(&toks[..hole], line)?,
                parse_context(&toks[hole + 1..], line)?,
            )
        }
    };

    let mut targets = Vec::new();
    let mut durations: Vec<Option<f64>> = Vec::new();
    let mut pitches = Vec::new();
    let mut energies = Vec::new();
    let mut priority = 0;
    let (mut dvec, mut pvec, mut evec) = (None, None, None);
    for tok in rhs.split_whitespace() {
        if let Some(p) = tok.strip_prefix('@') {
            priority = p
                .parse()
                .map_err(|_| malformed(line, &format!("bad priority '{p}'")))?;
        } else if let Some(v) = tok.strip_prefix("D=") {
            dvec = Some(parse_vector(v, line, "duration")?);
        } else if let Some(v) = tok.strip_prefix("P=") {
            pvec = Some(parse_vector(v, line, "pitch")?);
        } else if let Some(v) = tok.strip_prefix("E=") {
            evec = Some(parse_vector(v, line, "energy")?);
        } else {
            let mut fields = tok.split(':');
            let sym = fields.next().unwrap_or_default();
            if !arpabet::is_symbol(sym) {
                return Err(RuleError::UnknownArpabet {
                    symbol: sym.to_string(),
                    line,
                });
            }
            let mut vals = [None, None, None];
            for (k, f) in fields.enumerate() {
                if k >= 3 {
                    return Err(malformed(line, &format!("too many fields in '{tok}'")));
                }
                if !f.is_empty() {
                    vals[k] = Some(parse_number(f, line, "target field")?);
                }
            }
            targets.push(sym.to_string());
            durations.push(vals[0]);
            pitches.push(vals[1].unwrap_or(0.0));
            energies.push(vals[2].unwrap_or(0.0));
        }
    }
    if targets.is_empty() {
        return Err(malformed(line, "no targets"));
    }
    let n = targets.len();
    if let Some(v) = dvec {
        if v.len() != n {
            return Err(RuleError::LengthMismatch {
                line,
                what: "D",
                got: v.len(),
                expected: n,
            });
        }
        durations = v.into_iter().map(Some).collect();
    }
    for (what, vec, dest) in [("P", pvec, &mut pitches), ("E", evec, &mut energies)] {
        if let Some(v) = vec {
            if v.len() != n {
                return Err(RuleError::LengthMismatch {
                    line,
                    what,
                    got: v.len(),
                    expected: n,
                });
            }
            *dest = v;
        }
    }
    let durations: Vec<f64> = durations
        .into_iter()
        .map(|d| d.unwrap_or(default_duration))
        .collect();
    if durations.iter().any(|d| *d < 0.0) {
        return Err(malformed(line, "negative duration"));
    }
    Ok(MappingRule {
        source,
        left_context,
        right_context,
        targets,
        durations,
        pitch_changes: pitches,
        energy_changes: energies,
        priority,
        line,
    })
}

/// Splits an IPA string into segments using longest match against the rule
/// set's alphabet.
///
/// Length marks (`ː`, `:`) lengthen the preceding segment. A primary stress
/// mark (`ˈ`) stresses the next vowel, wherever the phonemizer placed it in
/// the syllable onset. Secondary stress is ignored. Whitespace becomes a
/// single word boundary; `‖` does too and survives at the end of the text.
/// Unknown combining diacritics are dropped.
pub fn tokenize_ipa(text: &str, rule_set: &RuleSet) -> Result<Vec<Token>, RuleError> {
    let chars: Vec<char> = text.trim().chars().collect();
    let longest = rule_set.longest_symbol();
    let mut tokens: Vec<Token> = Vec::new();
    let mut pending_stress = false;
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() || c == '‖' {
            if tokens.last().is_some_and(|t| *t != Token::WordBoundary) {
                tokens.push(Token::WordBoundary);
            }
            i += 1;
            continue;
        }
        match c {
            'ˈ' => {
                pending_stress = true;
                i += 1;
                continue;
            }
            'ˌ' => {
                i += 1;
                continue;
            }
            'ː' | ':' => {
                match tokens.last_mut() {
                    Some(Token::Segment { long, .. }) => *long = true,
                    _ => return Err(RuleError::UnknownIpaSymbol { symbol: c, position: i }),
                }
                i += 1;
                continue;
            }
            '.' => {
                tokens.push(Token::SyllableBreak);
                i += 1;
                continue;
            }
            _ => {}
        }
        let max = longest.min(chars.len() - i);
        let found = (1..=max).rev().find_map(|len| {
            let cand: String = chars[i..i + len].iter().collect();
            rule_set.alphabet.contains(&cand).then_some((cand, len))
        });
        let Some((base, len)) = found else {
            if is_combining_mark(c) {
                i += 1;
                continue;
            }
            return Err(RuleError::UnknownIpaSymbol { symbol: c, position: i });
        };
        let stressed = pending_stress && is_vowel_segment(&base);
        if stressed {
            pending_stress = false;
        }
        tokens.push(Token::Segment {
            base,
            long: false,
            stressed,
        });
        i += len;
    }
    Ok(tokens)
}

// Diacritics such as the non-syllabic mark in ʊ̯ carry nothing the rules
// use unless a rule spells them out.
fn is_combining_mark(c: char) -> bool {
    ('\u{0300}'..='\u{036F}').contains(&c)
}

/// One target-language phone with its prosody adjustments.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedPhone {
    pub symbol: String,
    /// Multiplies the model's predicted duration.
    pub duration_factor: f64,
    /// Added to the model's predicted pitch.
    pub pitch_change: f64,
    /// Added to the model's predicted energy.
    pub energy_change: f64,
    pub syllable_id: Option<usize>,
}

impl AnnotatedPhone {
    pub fn new(symbol: &str, duration_factor: f64) -> AnnotatedPhone {
        AnnotatedPhone {
            symbol: symbol.to_string(),
            duration_factor,
            pitch_change: 0.0,
            energy_change: 0.0,
            syllable_id: None,
        }
    }

    pub fn is_pause(&self) -> bool {
        self.symbol == arpabet::PAUSE
    }
}

/// Record of one rule firing, for inspection and tests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Firing {
    /// Index into [`RuleSet::rules`].
    pub rule: usize,
    pub consumed: Range<usize>,
    pub emitted: Range<usize>,
}

pub fn apply_rules(symbols: &[Token], rule_set: &RuleSet) -> Result<Vec<AnnotatedPhone>, RuleError> {
    apply_rules_traced(symbols, rule_set).map(|(phones, _)| phones)
}

/// Like [`apply_rules`], also returning which rule consumed which tokens.
/// Boundary tokens that no rule consumes are passed over silently.
pub fn apply_rules_traced(
    symbols: &[Token],
    rule_set: &RuleSet,
) -> Result<(Vec<AnnotatedPhone>, Vec<Firing>), RuleError> {
    let mut phones = Vec::new();
    let mut firings = Vec::new();
    let mut i = 0;
    while i < symbols.len() {
        let hit = rule_set
            .rules
            .iter()
            .position(|r| r.matches_at(symbols, i));
        match hit {
            Some(idx) => {
                let rule = &rule_set.rules[idx];
                let start = phones.len();
                for k in 0..rule.targets.len() {
                    phones.push(AnnotatedPhone {
                        symbol: rule.targets[k].clone(),
                        duration_factor: rule.durations[k],
                        pitch_change: rule.pitch_changes[k],
                        energy_change: rule.energy_changes[k],
                        syllable_id: None,
                    });
                }
                let end = i + rule.source.len();
                firings.push(Firing {
                    rule: idx,
                    consumed: i..end,
                    emitted: start..phones.len(),
                });
                i = end;
            }
            None if symbols[i].is_boundary() => i += 1,
            None => {
                return Err(RuleError::NoRuleMatches {
                    symbol: symbols[i].to_string(),
                    position: i,
                })
            }
        }
    }
    Ok((phones, firings))
}

/// Tokenize and rewrite in one step.
pub fn transfer_ipa(text: &str, rule_set: &RuleSet) -> Result<Vec<AnnotatedPhone>, RuleError> {
    apply_rules(&tokenize_ipa(text, rule_set)?, rule_set)
}
