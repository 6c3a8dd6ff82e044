//! Pronouncing dictionary and the allowed grapheme-phoneme mapping table.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::io::BufRead;

use thiserror::Error;

use crate::aligner::{align, Alignment};
use crate::arpabet;

/// A single pronunciation: a sequence of ARPAbet symbols.
pub type Pronunciation = Vec<String>;

/// Longest grapheme side accepted in the mapping table.
pub const MAX_MAPPING_GRAPHEMES: usize = 4;
/// Longest phoneme side accepted in the mapping table.
pub const MAX_MAPPING_PHONEMES: usize = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LexiconError {
    #[error("MalformedLine: line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("UnknownSymbol: '{symbol}' on line {line}")]
    UnknownSymbol { symbol: String, line: usize },
    #[error("BothSidesEmpty: line {line}")]
    BothSidesEmpty { line: usize },
    #[error("NotFound: '{0}' is not in the lexicon")]
    NotFound(String),
    #[error("Io: {0}")]
    Io(String),
}

/// Anything that can answer "is this spelling a known word".
pub trait Vocabulary {
    fn contains_word(&self, word: &str) -> bool;
}

impl Vocabulary for HashSet<String> {
    fn contains_word(&self, word: &str) -> bool {
        self.contains(&word.to_lowercase())
    }
}

impl Vocabulary for BTreeSet<String> {
    fn contains_word(&self, word: &str) -> bool {
        self.contains(&word.to_lowercase())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    pub word: String,
    pub pronunciations: Vec<Pronunciation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DictFormat {
    #[default]
    CmuDict,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LexiconOptions {
    /// Keep CMU stress digits (`EH1`) instead of stripping them.
    pub keep_stress: bool,
}

/// Case-folded word to pronunciation lookup. Immutable after load.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: BTreeMap<String, Vec<Pronunciation>>,
}

pub fn load_lexicon<R: BufRead>(source: R, format: DictFormat) -> Result<Lexicon, LexiconError> {
    Lexicon::load(source, format, LexiconOptions::default())
}

impl Lexicon {
    pub fn load<R: BufRead>(
        source: R,
        format: DictFormat,
        options: LexiconOptions,
    ) -> Result<Lexicon, LexiconError> {
        let DictFormat::CmuDict = format;
        let mut entries: BTreeMap<String, Vec<Pronunciation>> = BTreeMap::new();
        for (idx, line) in source.lines().enumerate() {
            let line_no = idx + 1;
            let line = line.map_err(|e| LexiconError::Io(e.to_string()))?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with(";;;") {
                continue;
            }
            let mut fields = trimmed.split_whitespace();
            let head = fields.next().unwrap_or_default();
            let word = base_word(head).ok_or_else(|| LexiconError::MalformedLine {
                line: line_no,
                reason: format!("bad headword '{head}'"),
            })?;
            let mut pron = Vec::new();
            for sym in fields {
                if !arpabet::is_symbol(sym) {
                    return Err(LexiconError::UnknownSymbol {
                        symbol: sym.to_string(),
                        line: line_no,
                    });
                }
                let sym = if options.keep_stress {
                    sym
                } else {
                    arpabet::strip_stress(sym)
                };
                pron.push(sym.to_string());
            }
            if pron.is_empty() {
                return Err(LexiconError::MalformedLine {
                    line: line_no,
                    reason: "no pronunciation".into(),
                });
            }
            let prons = entries.entry(word).or_default();
            if !prons.contains(&pron) {
                prons.push(pron);
            }
        }
        Ok(Lexicon { entries })
    }

    pub fn from_entries<I>(entries: I) -> Lexicon
    where
        I: IntoIterator<Item = LexiconEntry>,
    {
        let mut map: BTreeMap<String, Vec<Pronunciation>> = BTreeMap::new();
        for e in entries {
            let prons = map.entry(e.word.to_lowercase()).or_default();
            for p in e.pronunciations {
                if !prons.contains(&p) {
                    prons.push(p);
                }
            }
        }
        map.retain(|_, v| !v.is_empty());
        Lexicon { entries: map }
    }

    /// All pronunciations of `word`, in file order.
    pub fn lookup(&self, word: &str) -> Result<&[Pronunciation], LexiconError> {
        self.entries
            .get(&word.to_lowercase())
            .map(Vec::as_slice)
            .ok_or_else(|| LexiconError::NotFound(word.to_string()))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(&word.to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[Pronunciation])> {
        self.entries.iter().map(|(w, p)| (w.as_str(), p.as_slice()))
    }

    /// Writes the lexicon back out in CMU dictionary format, alternates as `WORD(n)`.
    pub fn to_cmudict_string(&self) -> String {
        let mut out = String::new();
        for (word, prons) in &self.entries {
            let head = word.to_uppercase();
            for (i, pron) in prons.iter().enumerate() {
                if i == 0 {
                    out.push_str(&head);
                } else {
                    out.push_str(&format!("{head}({})", i + 1));
                }
                out.push_str("  ");
                out.push_str(&pron.join(" "));
                out.push('\n');
            }
        }
        out
    }
}

impl Vocabulary for Lexicon {
    fn contains_word(&self, word: &str) -> bool {
        self.contains(word)
    }
}

// "WORD(2)" -> "word"
fn base_word(head: &str) -> Option<String> {
    let base = match head.find('(') {
        Some(open) if head.ends_with(')') && open > 0 => {
            let digits = &head[open + 1..head.len() - 1];
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            &head[..open]
        }
        Some(_) => return None,
        None => head,
    };
    Some(base.to_lowercase())
}

/// One permitted grapheme-to-phoneme correspondence. Either side may be
/// empty, not both.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AllowedMapping {
    pub graphemes: String,
    pub phonemes: Vec<String>,
}

/// Set of allowed mappings, indexed by grapheme side for the aligner.
#[derive(Debug, Clone, Default)]
pub struct MappingTable {
    set: HashSet<AllowedMapping>,
    by_graphemes: HashMap<String, Vec<Vec<String>>>,
    max_graphemes: usize,
}

pub fn load_mappings<R: BufRead>(source: R) -> Result<MappingTable, LexiconError> {
    let mut table = MappingTable::default();
    for (idx, line) in source.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| LexiconError::Io(e.to_string()))?;
        let content = line.trim_end_matches(['\r', '\n']);
        if content.trim().is_empty() || content.trim_start().starts_with('#') {
            continue;
        }
        let (g, p) = content
            .split_once('\t')
            .ok_or_else(|| LexiconError::MalformedLine {
                line: line_no,
                reason: "expected 'graphemes<TAB>phonemes'".into(),
            })?;
        let g = g.trim();
        let graphemes = if g == "_" { String::new() } else { g.to_lowercase() };
        let p = p.trim();
        let phonemes: Vec<String> = if p == "_" {
            Vec::new()
        } else {
            p.split_whitespace()
                .map(|s| {
                    if arpabet::is_phoneme(s) {
                        Ok(arpabet::strip_stress(s).to_string())
                    } else {
                        Err(LexiconError::UnknownSymbol {
                            symbol: s.to_string(),
                            line: line_no,
                        })
                    }
                })
                .collect::<Result<_, _>>()?
        };
        if graphemes.is_empty() && phonemes.is_empty() {
            return Err(LexiconError::BothSidesEmpty { line: line_no });
        }
        if graphemes.chars().count() > MAX_MAPPING_GRAPHEMES
            || phonemes.len() > MAX_MAPPING_PHONEMES
            || graphemes.chars().any(char::is_whitespace)
        {
            return Err(LexiconError::MalformedLine {
                line: line_no,
                reason: format!(
                    "mapping sides are limited to {MAX_MAPPING_GRAPHEMES} letters and {MAX_MAPPING_PHONEMES} phonemes"
                ),
            });
        }
        table.insert(AllowedMapping {
            graphemes,
            phonemes,
        });
    }
    Ok(table)
}

impl MappingTable {
    pub fn new() -> MappingTable {
        MappingTable::default()
    }

    /// Adds a mapping. Returns false if it was already present or both
    /// sides are empty.
    pub fn insert(&mut self, mapping: AllowedMapping) -> bool {
        if mapping.graphemes.is_empty() && mapping.phonemes.is_empty() {
            return false;
        }
        if !self.set.insert(mapping.clone()) {
            return false;
        }
        self.max_graphemes = self.max_graphemes.max(mapping.graphemes.chars().count());
        self.by_graphemes
            .entry(mapping.graphemes)
            .or_default()
            .push(mapping.phonemes);
        true
    }

    pub fn contains<S: AsRef<str>>(&self, graphemes: &str, phonemes: &[S]) -> bool {
        self.by_graphemes
            .get(&graphemes.to_lowercase())
            .is_some_and(|alts| alts.iter().any(|alt| phonemes_eq(alt, phonemes)))
    }

    /// Phoneme sides allowed for an exact grapheme string.
    pub fn phonemes_for(&self, graphemes: &str) -> &[Vec<String>] {
        self.by_graphemes
            .get(graphemes)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn max_graphemes(&self) -> usize {
        self.max_graphemes
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &AllowedMapping> {
        self.set.iter()
    }
}

impl FromIterator<AllowedMapping> for MappingTable {
    fn from_iter<T: IntoIterator<Item = AllowedMapping>>(iter: T) -> Self {
        let mut table = MappingTable::new();
        for m in iter {
            table.insert(m);
        }
        table
    }
}

/// Compares a table phoneme side with (possibly stressed) query phonemes.
pub(crate) fn phonemes_eq<S: AsRef<str>>(table: &[String], query: &[S]) -> bool {
    table.len() == query.len()
        && table
            .iter()
            .zip(query)
            .all(|(t, q)| t == arpabet::strip_stress(q.as_ref()))
}

/// A dictionary entry whose best alignment needs disallowed mappings.
#[derive(Debug, Clone, PartialEq)]
pub struct LintFinding {
    pub word: String,
    pub pronunciation: Pronunciation,
    pub alignment: Alignment,
    pub cost: u32,
}

/// Aligns every pronunciation in the lexicon and reports those that cannot
/// be explained by the mapping table, most expensive first.
pub fn lint_dictionary(lexicon: &Lexicon, mappings: &MappingTable) -> Vec<LintFinding> {
    let mut findings: Vec<LintFinding> = lexicon
        .iter()
        .flat_map(|(word, prons)| {
            prons.iter().filter_map(move |pron| {
                let alignment = align(word, pron, mappings);
                (alignment.cost > 0).then(|| LintFinding {
                    word: word.to_string(),
                    pronunciation: pron.clone(),
                    cost: alignment.cost,
                    alignment,
                })
            })
        })
        .collect();
    // stable: ties keep lexicon order
    findings.sort_by(|a, b| b.cost.cmp(&a.cost));
    findings
}
