// Dictionary lint: entries the mapping table cannot explain.

use present::data;
use present::lexicon::{lint_dictionary, load_lexicon, DictFormat};

fn main() {
    let mappings = data::mappings();
    let findings = lint_dictionary(&data::lexicon(), &mappings);
    println!("built-in lexicon: {} finding(s)", findings.len());
    for f in &findings {
        println!("  {} {}  cost {}  {}", f.word.to_uppercase(), f.pronunciation.join(" "), f.cost, f.alignment);
    }

    let fixed = load_lexicon("EEG  IY1 IY1 JH IY1\n".as_bytes(), DictFormat::CmuDict).unwrap();
    println!("corrected EEG: {} finding(s)", lint_dictionary(&fixed, &mappings).len());
}
