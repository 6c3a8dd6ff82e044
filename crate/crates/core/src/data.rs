//! Data files built into the crate: a sample CMU-format lexicon, the
//! English grapheme-phoneme mapping table, an acronym list and one rule set
//! per transfer language.

use crate::lexicon::{load_lexicon, load_mappings, DictFormat, Lexicon, MappingTable};
use crate::transfer::{load_rules, RuleSet};
use crate::Language;

pub const LEXICON: &str = include_str!("../data/lexicon.dict");
pub const MAPPINGS: &str = include_str!("../data/mappings.tsv");
pub const ACRONYMS: &str = include_str!("../data/acronyms.txt");

/// Rule file text for `language`; `None` for English.
pub fn rules_text(language: Language) -> Option<&'static str> {
    match language {
        Language::De => Some(include_str!("../data/rules/de.rules")),
        Language::Hu => Some(include_str!("../data/rules/hu.rules")),
        Language::Es => Some(include_str!("../data/rules/es.rules")),
        Language::Cmn => Some(include_str!("../data/rules/cmn.rules")),
        Language::En => None,
    }
}

pub fn rules(language: Language) -> Option<RuleSet> {
    rules_text(language).map(|t| load_rules(t.as_bytes(), language).expect("built-in rules parse"))
}

pub fn lexicon() -> Lexicon {
    load_lexicon(LEXICON.as_bytes(), DictFormat::CmuDict).expect("built-in lexicon parses")
}

pub fn mappings() -> MappingTable {
    load_mappings(MAPPINGS.as_bytes()).expect("built-in mapping table parses")
}

/// One acronym per line; `#` comments and blank lines skipped.
pub fn parse_acronyms(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

pub fn acronyms() -> Vec<String> {
    parse_acronyms(ACRONYMS)
}
