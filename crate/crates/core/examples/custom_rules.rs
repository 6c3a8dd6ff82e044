// A rule set written inline: contexts, priorities and vector fields.

use present::transfer::{load_rules, transfer_ipa};
use present::Language;

const RULES: &str = "\
%default_duration 0.8
a -> AA
t -> T
# flap between vowels, unless a rule with higher priority fires
t | V _ V -> D:0.5
t | # _ -> T HH D=[1,0.3] @2
o -> OW:0.6:0.5:0
";

fn main() {
    let rules = load_rules(RULES.as_bytes(), Language::Es).unwrap();
    for ipa in ["tata", "ato", "a ta"] {
        let phones = transfer_ipa(ipa, &rules).unwrap();
        let shown: Vec<String> = phones
            .iter()
            .map(|p| format!("{}:{}:{}", p.symbol, p.duration_factor, p.pitch_change))
            .collect();
        println!("{ipa:<5} {}", shown.join(" "));
    }
}
