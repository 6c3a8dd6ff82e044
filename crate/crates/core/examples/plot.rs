// Terminal and SVG pitch plots of a Mandarin schedule.

use present::mandarin::{compile_pinyin, MandarinOptions};
use present::plot::{render_ascii, render_svg};
use present::schedule::from_pitch_plan;
use present::{data, Language};

fn main() {
    let rules = data::rules(Language::Cmn).unwrap();
    let text = "tian2 qi4 hen3 hao3";
    let plan = compile_pinyin(text, &rules, &MandarinOptions::default()).unwrap();
    let schedule = from_pitch_plan(&plan, Language::Cmn, text);
    print!("{}", render_ascii(&schedule, 64));

    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, render_svg(&schedule, 800, 300)).expect("writable path");
        println!("wrote {path}");
    }
}
