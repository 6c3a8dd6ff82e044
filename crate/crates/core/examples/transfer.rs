// IPA in German, Hungarian and Spanish rewritten into English ARPAbet with
// duration, pitch and energy changes.

use present::transfer::{apply_rules_traced, tokenize_ipa};
use present::{data, Language};

fn main() {
    let samples = [
        (Language::De, "ˈçɛmiː ʔɔx"),
        (Language::De, "ˈkœlnɐ ‖ dɔm"),
        (Language::Hu, "ɟɛrɛk sːeːp"),
        (Language::Es, "ˈapa ʎo.ˈi"),
    ];
    for (language, ipa) in samples {
        let rules = data::rules(language).unwrap();
        let tokens = tokenize_ipa(ipa, &rules).expect("sample IPA is covered by the rules");
        let (phones, firings) = apply_rules_traced(&tokens, &rules).unwrap();
        println!("[{language}] {ipa}");
        for f in firings {
            let rule = &rules.rules()[f.rule];
            let out: Vec<String> = phones[f.emitted.clone()]
                .iter()
                .map(|p| format!("{}:{}", p.symbol, p.duration_factor))
                .collect();
            println!("  {:<10} -> {}", rule.source_text(), out.join(" "));
        }
    }
}
