// Toned pinyin through expansion, tone-contour pitch, smoothing and word
// pauses.

use present::mandarin::{compile_pinyin, pitch_syllables, MandarinOptions};
use present::schedule::from_pitch_plan;
use present::{data, Language};

fn main() {
    let rules = data::rules(Language::Cmn).unwrap();
    let options = MandarinOptions::default();
    let text = std::env::args().nth(1).unwrap_or_else(|| "ni3hao3 ma5 tian2 qi4".to_string());

    for syl in pitch_syllables(&text, &rules, &options).expect("valid pinyin") {
        let phones: Vec<String> = syl
            .phones
            .iter()
            .map(|p| {
                let pitches: Vec<String> = p.pitches.iter().map(|x| format!("{x:+.2}")).collect();
                format!("{}[{}]", p.phone.symbol, pitches.join(" "))
            })
            .collect();
        println!("{:<8} {}", syl.syllable.pinyin, phones.join(" "));
    }

    let plan = compile_pinyin(&text, &rules, &options).unwrap();
    let schedule = from_pitch_plan(&plan, Language::Cmn, &text);
    println!("{} entries, {} encoder copies", schedule.entries.len(), schedule.total_copies());
}
