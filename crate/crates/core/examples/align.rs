// Grapheme-phoneme alignment and projecting a letter span onto phonemes.

use present::aligner::{align, project_span};
use present::data;

fn main() {
    let mappings = data::mappings();
    for (word, phones) in [("where", "W EH R"), ("whence", "W Z EH T"), ("sure", "SH UH R"), ("eeg", "IY IY G IY")] {
        let phones: Vec<&str> = phones.split_whitespace().collect();
        let a = align(word, &phones, &mappings);
        println!("{word:<8} cost {}  {a}", a.cost);
    }

    let a = align("long", &["L", "AO", "NG"], &mappings);
    let hit = project_span(&a, 1..2).unwrap();
    println!("letter 'o' of long -> phoneme indices {hit:?}");
}
