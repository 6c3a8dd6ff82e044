//! ARPAbet symbol inventory used by the CMU dictionary and LJSpeech-style
//! TTS token tables, plus the pause token `,`.

/// The pause token. Carries no segmental content.
pub const PAUSE: &str = ",";

/// Stressless ARPAbet phonemes accepted throughout the crate.
pub const PHONEMES: &[&str] = &[
    "AA", "AE", "AH", "AO", "AW", "AX", "AY", "B", "CH", "D", "DH", "EH", "ER", "EY", "F", "G",
    "HH", "IH", "IY", "JH", "K", "L", "M", "N", "NG", "OW", "OY", "P", "R", "S", "SH", "T", "TH",
    "UH", "UW", "V", "W", "Y", "Z", "ZH",
];

const VOWELS: &[&str] = &[
    "AA", "AE", "AH", "AO", "AW", "AX", "AY", "EH", "ER", "EY", "IH", "IY", "OW", "OY", "UH", "UW",
];

/// Splits a trailing stress digit (0, 1 or 2) off a symbol.
pub fn split_stress(symbol: &str) -> (&str, Option<u8>) {
    match symbol.as_bytes().last() {
        Some(&d @ b'0'..=b'2') if symbol.len() > 1 => (&symbol[..symbol.len() - 1], Some(d - b'0')),
        _ => (symbol, None),
    }
}

pub fn strip_stress(symbol: &str) -> &str {
    split_stress(symbol).0
}

/// True for a bare ARPAbet phoneme or one carrying a stress digit.
/// Stress digits are only legal on vowels.
pub fn is_phoneme(symbol: &str) -> bool {
    match split_stress(symbol) {
        (base, None) => PHONEMES.contains(&base),
        (base, Some(_)) => VOWELS.contains(&base),
    }
}

/// True for anything that may appear as a schedule or dictionary symbol.
pub fn is_symbol(symbol: &str) -> bool {
    symbol == PAUSE || is_phoneme(symbol)
}

pub fn is_vowel(symbol: &str) -> bool {
    VOWELS.contains(&strip_stress(symbol))
}
