// Writing and reading present/1 schedule files.

use present::schedule::{from_annotated, from_json, to_json, ScheduleError};
use present::transfer::transfer_ipa;
use present::{data, Language};

fn main() {
    let rules = data::rules(Language::De).unwrap();
    let phones = transfer_ipa("ɪç", &rules).unwrap();
    let schedule = from_annotated(&phones, Language::De, "ich");
    let text = to_json(&schedule);
    print!("{text}");

    let back = from_json(&text).unwrap();
    assert_eq!(back, schedule);
    assert_eq!(to_json(&back), text);

    let future = text.replace("present/1", "present/2");
    match from_json(&future) {
        Err(ScheduleError::VersionMismatch(v)) => println!("rejected version {v}"),
        other => panic!("unexpected {other:?}"),
    }
    let broken = text.replacen("\"repeat\": 1", "\"repeat\": 2", 1);
    println!("{}", from_json(&broken).unwrap_err());
}
