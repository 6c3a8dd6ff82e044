// Marked-up English to a schedule: caps for emphasis, stretched letters,
// pitch marks inside a stretched vowel, and a question.

use present::data;
use present::schedule::{build_english, to_json, EnglishResources, Policy};

fn main() {
    let lexicon = data::lexicon();
    let mappings = data::mappings();
    let acronyms = data::acronyms();
    let resources = EnglishResources {
        lexicon: &lexicon,
        mappings: &mappings,
        acronyms: &acronyms,
    };
    let policy = Policy::default();

    for text in ["I am SO sure", "A looooong time", "Su^uuu_ure!", "What was that?"] {
        let (schedule, words) = build_english(text, &resources, &policy).expect("all words are in the sample lexicon");
        println!("{text}");
        for w in &words {
            let entries = &schedule.entries[w.entries.clone()];
            let changed: Vec<String> = entries
                .iter()
                .filter(|e| !e.is_neutral())
                .map(|e| format!("{} d{:?} p{:?} e{:?}", e.symbol, e.duration_scale, e.pitch_offset, e.energy_offset))
                .collect();
            println!("  {:<6} {}  {}", w.word, w.alignment, changed.join(" "));
        }
    }

    let (schedule, _) = build_english("Su^uuu_ure!", &resources, &policy).unwrap();
    print!("{}", to_json(&schedule));
}
