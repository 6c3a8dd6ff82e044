//! Prosody compilation for TTS models with explicit duration, pitch and
//! energy predictors.
//!
//! Three front ends produce the same output, a [`schedule::ProsodySchedule`]:
//!
//! * annotated English text ([`markup`], [`lexicon`], [`aligner`], [`schedule::build_english`]),
//! * IPA transcriptions of German, Hungarian or Spanish ([`transfer`]),
//! * toned, pre-segmented pinyin ([`mandarin`]).
//!
//! A schedule lists, per input phone, how many copies of its encoder state to
//! feed the variance adaptor and the duration factor, pitch offset and energy
//! offset for each copy.

use std::fmt;
use std::str::FromStr;

pub mod aligner;
pub mod arpabet;
pub mod cli;
pub mod data;
pub mod lexicon;
pub mod mandarin;
pub mod markup;
pub mod plot;
pub mod schedule;
pub mod transfer;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Language {
    En,
    De,
    Hu,
    Es,
    Cmn,
}

impl Language {
    pub const ALL: [Language; 5] = [Language::En, Language::De, Language::Hu, Language::Es, Language::Cmn];

    pub fn code(self) -> &'static str {
        match self {
            Language::En => "en",
            Language::De => "de",
            Language::Hu => "hu",
            Language::Es => "es",
            Language::Cmn => "cmn",
        }
    }

    /// Duration factor for rules that leave `D` out. Hungarian and Spanish
    /// are spoken faster than English.
    pub fn default_duration(self) -> f64 {
        match self {
            Language::Hu | Language::Es => 0.7,
            _ => 1.0,
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown language '{0}' (expected en, de, hu, es or cmn)")]
pub struct UnknownLanguage(pub String);

impl serde::Serialize for Language {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.code())
    }
}

impl FromStr for Language {
    type Err = UnknownLanguage;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Language::ALL
            .into_iter()
            .find(|l| l.code() == s)
            .ok_or_else(|| UnknownLanguage(s.to_string()))
    }
}
