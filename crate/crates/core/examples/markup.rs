// Markup parsing on its own: clean text and effect spans.

use present::data;
use present::markup::MarkupParser;

fn main() {
    let lexicon = data::lexicon();
    let parser = MarkupParser::new()
        .with_vocabulary(&lexicon)
        .with_acronyms(["EEG", "BBC"]);
    for raw in ["Seeeee you *there*", "The EEG was GREAT", "^^Really? no__w", "ti~~lde"] {
        let m = parser.parse(raw).unwrap();
        println!("{raw:?} -> {:?}", m.clean_text);
        let chars: Vec<char> = m.clean_text.chars().collect();
        for e in &m.effects {
            let covered: String = chars[e.range()].iter().collect();
            println!("  {:?} {:?} x{} {:?}", e.kind, covered, e.magnitude, e.run_offset);
        }
    }
}
