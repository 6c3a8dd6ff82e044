//! The `present` command line.
//!
//! Data files (lexicon, mapping table, acronyms, rule sets) come from
//! `--data-dir`, else `$PRESENT_DATA_DIR`, else the copies built into the
//! binary. Per-file flags override either.
//!
//! Exit codes: 0 success, 1 domain error (error name on stderr), 2 usage.

use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::aligner::align;
use crate::arpabet;
use crate::lexicon::{lint_dictionary, load_lexicon, load_mappings, DictFormat, Lexicon, MappingTable};
use crate::mandarin::{compile_pinyin, MandarinOptions};
use crate::plot::{render_ascii, render_svg};
use crate::schedule::{build_english, from_annotated, from_json, from_pitch_plan, to_json, EnglishResources, Policy};
use crate::transfer::{load_rules, transfer_ipa, RuleSet};
use crate::{data, Language};

pub const DATA_DIR_ENV: &str = "PRESENT_DATA_DIR";

const LEXICON_FILE: &str = "lexicon.dict";
const MAPPINGS_FILE: &str = "mappings.tsv";
const ACRONYMS_FILE: &str = "acronyms.txt";

#[derive(Debug, Parser)]
#[command(name = "present", version, about = "Compile prosody into duration/pitch/energy schedules")]
pub struct Cli {
    /// Directory holding lexicon.dict, mappings.tsv, acronyms.txt and rules/<lang>.rules
    #[arg(long, global = true, value_name = "DIR")]
    pub data_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Marked-up English text to a schedule
    Effects(EffectsArgs),
    /// IPA (de, hu, es) to a schedule
    Transfer(TransferArgs),
    /// Toned pinyin to a schedule
    Mandarin(MandarinArgs),
    /// Print the grapheme-phoneme alignment of one word
    Align(AlignArgs),
    /// Report dictionary entries the mapping table cannot explain
    Lint(LintArgs),
    /// Render a schedule's pitch offsets
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Inline input, or - for stdin
    #[arg(value_name = "TEXT", conflicts_with = "input_file")]
    pub text: Option<String>,
    /// Read input from a file
    #[arg(short = 'i', long, value_name = "PATH")]
    pub input_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write here instead of stdout
    #[arg(short, long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EffectsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_name = "PATH")]
    pub lexicon: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub mappings: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub acronyms: Option<PathBuf>,
    /// Policy file of key = value lines
    #[arg(long, value_name = "PATH")]
    pub policy: Option<PathBuf>,
    /// Override one policy value, e.g. --set emph_energy=2
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct TransferArgs {
    #[arg(short, long, value_enum)]
    pub lang: TransferLanguage,
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_name = "PATH")]
    pub rules: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TransferLanguage {
    De,
    Hu,
    Es,
}

impl From<TransferLanguage> for Language {
    fn from(l: TransferLanguage) -> Language {
        match l {
            TransferLanguage::De => Language::De,
            TransferLanguage::Hu => Language::Hu,
            TransferLanguage::Es => Language::Es,
        }
    }
}

#[derive(Debug, Args)]
pub struct MandarinArgs {
    /// Pinyin given as an option instead of TEXT
    #[arg(long, value_name = "PINYIN", conflicts_with_all = ["text", "input_file"])]
    pub pinyin: Option<String>,
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_name = "PATH")]
    pub rules: Option<PathBuf>,
    /// Copies per vowel nucleus
    #[arg(long, default_value_t = 3)]
    pub subdivisions: usize,
    /// Largest pitch jump allowed between syllables
    #[arg(long, default_value_t = 2.0)]
    pub max_jump: f64,
    /// Duration factor of the pause between words
    #[arg(long, default_value_t = 0.3)]
    pub word_pause: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct AlignArgs {
    #[arg(long)]
    pub word: String,
    /// Space-separated ARPAbet, e.g. "W EH R"
    #[arg(long)]
    pub phones: String,
    #[arg(long, value_name = "PATH")]
    pub mappings: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LintArgs {
    #[arg(long, value_name = "PATH")]
    pub lexicon: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub mappings: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PlotFormat {
    Svg,
    Ascii,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Schedule file, or - for stdin
    #[arg(value_name = "SCHEDULE")]
    pub schedule: String,
    #[arg(long, value_enum, default_value_t = PlotFormat::Svg)]
    pub format: PlotFormat,
    #[arg(long, default_value_t = 800)]
    pub width: u32,
    #[arg(long, default_value_t = 300)]
    pub height: u32,
    /// Width of the ascii plot
    #[arg(long, default_value_t = 72)]
    pub columns: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Domain(String),
}

impl Failure {
    fn domain(e: impl std::fmt::Display) -> Failure {
        Failure::Domain(e.to_string())
    }
}

/// Process-facing entry point.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdin = std::io::stdin();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdin.lock(), &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit streams.
pub fn run_with<I, T>(argv: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let data_dir = cli
        .data_dir
        .clone()
        .or_else(|| std::env::var_os(DATA_DIR_ENV).map(PathBuf::from));
    let data = Data { dir: data_dir };
    match dispatch(&cli.command, &data, stdin) {
        Ok((bytes, target)) => match target {
            Some(path) => match fs::write(&path, bytes) {
                Ok(()) => 0,
                Err(e) => {
                    let _ = writeln!(stderr, "error: Io: {}: {e}", path.display());
                    1
                }
            },
            None => {
                let _ = stdout.write_all(&bytes);
                0
            }
        },
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "usage error: {msg}");
            2
        }
        Err(Failure::Domain(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            1
        }
    }
}

struct Data {
    dir: Option<PathBuf>,
}

impl Data {
    fn text(&self, explicit: Option<&Path>, name: &str, embedded: &str) -> Result<String, Failure> {
        match (explicit, &self.dir) {
            (Some(path), _) => read_path(path),
            (None, Some(dir)) => read_path(&dir.join(name)),
            (None, None) => Ok(embedded.to_string()),
        }
    }

    fn lexicon(&self, explicit: Option<&Path>) -> Result<Lexicon, Failure> {
        let text = self.text(explicit, LEXICON_FILE, data::LEXICON)?;
        load_lexicon(text.as_bytes(), DictFormat::CmuDict).map_err(Failure::domain)
    }

    fn mappings(&self, explicit: Option<&Path>) -> Result<MappingTable, Failure> {
        let text = self.text(explicit, MAPPINGS_FILE, data::MAPPINGS)?;
        load_mappings(text.as_bytes()).map_err(Failure::domain)
    }

    fn acronyms(&self, explicit: Option<&Path>) -> Result<Vec<String>, Failure> {
        let text = self.text(explicit, ACRONYMS_FILE, data::ACRONYMS)?;
        Ok(data::parse_acronyms(&text))
    }

    fn rules(&self, explicit: Option<&Path>, language: Language) -> Result<RuleSet, Failure> {
        let embedded = data::rules_text(language).unwrap_or("");
        let name = format!("rules/{}.rules", language.code());
        let text = self.text(explicit, &name, embedded)?;
        load_rules(text.as_bytes(), language).map_err(Failure::domain)
    }
}

fn read_path(path: &Path) -> Result<String, Failure> {
    if !path.exists() {
        return Err(Failure::Usage(format!("no such file: {}", path.display())));
    }
    fs::read_to_string(path).map_err(|e| Failure::Domain(format!("Io: {}: {e}", path.display())))
}

fn read_input(input: &InputArgs, stdin: &mut dyn Read) -> Result<String, Failure> {
    let text = match (&input.text, &input.input_file) {
        (Some(t), _) if t == "-" => {
            let mut buf = String::new();
            stdin
                .read_to_string(&mut buf)
                .map_err(|e| Failure::Domain(format!("Io: stdin: {e}")))?;
            return Ok(buf.trim_end_matches(['\n', '\r']).to_string());
        }
        (Some(t), _) => t.clone(),
        (None, Some(path)) => return Ok(read_path(path)?.trim_end_matches(['\n', '\r']).to_string()),
        (None, None) => return Err(Failure::Usage("no input given (TEXT, - or --input-file)".into())),
    };
    if text.trim().is_empty() {
        return Err(Failure::Usage("input text is empty".into()));
    }
    Ok(text)
}

fn empty_text() -> Failure {
    Failure::Domain("EmptyText: no phones to schedule".into())
}

type Output = (Vec<u8>, Option<PathBuf>);

fn dispatch(command: &Command, data: &Data, stdin: &mut dyn Read) -> Result<Output, Failure> {
    match command {
        Command::Effects(a) => {
            let text = read_input(&a.input, stdin)?;
            let lexicon = data.lexicon(a.lexicon.as_deref())?;
            let mappings = data.mappings(a.mappings.as_deref())?;
            let acronyms = data.acronyms(a.acronyms.as_deref())?;
            let mut policy_text = match &a.policy {
                Some(p) => read_path(p)?,
                None => String::new(),
            };
            for o in &a.overrides {
                if !o.contains('=') {
                    return Err(Failure::Usage(format!("--set expects KEY=VALUE, got '{o}'")));
                }
                policy_text.push('\n');
                policy_text.push_str(o);
            }
            let policy = Policy::load(policy_text.as_bytes()).map_err(Failure::domain)?;
            let resources = EnglishResources {
                lexicon: &lexicon,
                mappings: &mappings,
                acronyms: &acronyms,
            };
            let (schedule, _) = build_english(&text, &resources, &policy).map_err(Failure::domain)?;
            Ok((to_json(&schedule).into_bytes(), a.output.output.clone()))
        }
        Command::Transfer(a) => {
            let text = read_input(&a.input, stdin)?;
            let language = Language::from(a.lang);
            let rules = data.rules(a.rules.as_deref(), language)?;
            let phones = transfer_ipa(&text, &rules).map_err(Failure::domain)?;
            if phones.is_empty() {
                return Err(empty_text());
            }
            let schedule = from_annotated(&phones, language, &text);
            Ok((to_json(&schedule).into_bytes(), a.output.output.clone()))
        }
        Command::Mandarin(a) => {
            let text = match &a.pinyin {
                Some(p) if p.trim().is_empty() => return Err(Failure::Usage("input text is empty".into())),
                Some(p) => p.clone(),
                None => read_input(&a.input, stdin)?,
            };
            let rules = data.rules(a.rules.as_deref(), Language::Cmn)?;
            if !(a.max_jump > 0.0) {
                return Err(Failure::Usage("--max-jump must be positive".into()));
            }
            let options = MandarinOptions {
                subdivisions: a.subdivisions,
                max_jump: a.max_jump,
                word_pause: a.word_pause,
            };
            let plan = compile_pinyin(&text, &rules, &options).map_err(Failure::domain)?;
            if plan.is_empty() {
                return Err(empty_text());
            }
            let schedule = from_pitch_plan(&plan, Language::Cmn, &text);
            Ok((to_json(&schedule).into_bytes(), a.output.output.clone()))
        }
        Command::Align(a) => {
            if a.word.is_empty() {
                return Err(Failure::Usage("--word is empty".into()));
            }
            let phones: Vec<&str> = a.phones.split_whitespace().collect();
            if let Some(bad) = phones.iter().find(|p| !arpabet::is_phoneme(p)) {
                return Err(Failure::Domain(format!("UnknownSymbol: '{bad}'")));
            }
            let mappings = data.mappings(a.mappings.as_deref())?;
            let alignment = align(&a.word, &phones, &mappings);
            Ok((format!("{alignment}\ncost {}\n", alignment.cost).into_bytes(), None))
        }
        Command::Lint(a) => {
            let lexicon = data.lexicon(a.lexicon.as_deref())?;
            let mappings = data.mappings(a.mappings.as_deref())?;
            let mut report = String::new();
            for f in lint_dictionary(&lexicon, &mappings) {
                report.push_str(&format!(
                    "{}\t{}\tcost {}\t{}\n",
                    f.word.to_uppercase(),
                    f.pronunciation.join(" "),
                    f.cost,
                    f.alignment
                ));
            }
            Ok((report.into_bytes(), a.output.output.clone()))
        }
        Command::Plot(a) => {
            let text = if a.schedule == "-" {
                let mut buf = String::new();
                stdin
                    .read_to_string(&mut buf)
                    .map_err(|e| Failure::Domain(format!("Io: stdin: {e}")))?;
                buf
            } else {
                read_path(Path::new(&a.schedule))?
            };
            let schedule = from_json(&text).map_err(Failure::domain)?;
            let out = match a.format {
                PlotFormat::Svg => render_svg(&schedule, a.width, a.height),
                PlotFormat::Ascii => render_ascii(&schedule, a.columns),
            };
            Ok((out.into_bytes(), a.output.output.clone()))
        }
    }
}
