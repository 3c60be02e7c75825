// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write as _;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sltmorph::automata::{parse_nfa, Nfa, DEFAULT_STATE_CAP};
use sltmorph::codes::{build_code, DecodabilityVerdict};
use sltmorph::construction::{
    decode_word, encode_word, medvedev_main_capped, medvedev_width2, Decomposition, Encoded,
    DEFAULT_SET_CAP,
};
use sltmorph::format::{parse_decomposition, serialize};
use sltmorph::slt::min_slt_width;
use sltmorph::verification::{
    fg_values, parse_count, refute_small_ratio, run_corpus, verify_decomposition_capped,
    width_table, CorpusConfig, CounterexampleKind, ModeUsed, RefutationOutcome, VerifyMode,
};

const OK: u8 = 0;
const FAILED: u8 = 1;
const INPUT_ERROR: u8 = 2;

#[derive(Parser)]
#[command(
    name = "sltmorph",
    version,
    about = "Letter-to-letter images of strictly locally testable languages"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the main decomposition with a given alphabetic ratio.
    Build(BuildArgs),
    /// Build the width-2 decomposition over state/letter pairs.
    Build2(Build2Args),
    /// Check a decomposition against its machine.
    Verify(VerifyArgs),
    /// Encode source words (one per line) as local words.
    Encode(EncodeArgs),
    /// Project local words (one per line) onto source words.
    Decode(WordsArgs),
    /// Test local words (one per line) for membership.
    Recognize(RecognizeArgs),
    /// Print the state code for a number of states and a ratio.
    Code(CodeArgs),
    /// Print the closed-form ratio constants and the width table.
    Table(TableArgs),
    /// Search for the smallest width reproducing a machine's language.
    Minwidth(MinwidthArgs),
    /// Build and verify every machine in a directory.
    Corpus(CorpusArgs),
    /// Refute a decomposition of the even-block language with a small ratio.
    Refute(RefuteArgs),
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long)]
    nfa: PathBuf,
    /// Digits per letter (h >= 2).
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(2..=4096))]
    ratio: u32,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Maximum number of elements in any window set.
    #[arg(long, default_value_t = DEFAULT_SET_CAP)]
    cap: usize,
}

#[derive(Args)]
struct Build2Args {
    #[arg(long)]
    nfa: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Bounded,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    nfa: PathBuf,
    #[arg(long)]
    dec: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Bounded)]
    mode: Mode,
    /// Bounded-mode horizon; defaults to max(3m + 6, 2k + 4).
    #[arg(long)]
    maxlen: Option<usize>,
    /// Maximum number of determinized states in exact mode.
    #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
    cap: usize,
    /// Print only the key=value summary.
    #[arg(long)]
    summary: bool,
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(long)]
    nfa: PathBuf,
    #[arg(long)]
    dec: PathBuf,
    /// Encode this word instead of reading stdin.
    #[arg(long)]
    word: Option<String>,
}

#[derive(Args)]
struct WordsArgs {
    #[arg(long)]
    dec: PathBuf,
    /// Process this word instead of reading stdin.
    #[arg(long)]
    word: Option<String>,
}

#[derive(Args)]
struct RecognizeArgs {
    #[arg(long)]
    dec: PathBuf,
    /// Feed symbols one at a time through a sliding-window recognizer.
    #[arg(long)]
    stream: bool,
    #[arg(long)]
    word: Option<String>,
}

#[derive(Args)]
struct CodeArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..=10_000_000))]
    states: u64,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(2..=4096))]
    ratio: u32,
    /// Also sweep every window for factor-decodability.
    #[arg(long)]
    verify: bool,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,10,100,1000")]
    h: Vec<u64>,
    /// State counts; scientific notation such as 1e40 is accepted.
    #[arg(long, value_delimiter = ',', default_value = "10,1e3,1e6,1e9,1e40")]
    n: Vec<String>,
}

#[derive(Args)]
struct MinwidthArgs {
    #[arg(long)]
    nfa: PathBuf,
    #[arg(long, default_value_t = 8)]
    max_k: usize,
    /// Agreement horizon; defaults to 3 * max_k.
    #[arg(long)]
    maxlen: Option<usize>,
}

#[derive(Args)]
struct CorpusArgs {
    #[arg(long)]
    dir: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "2,3")]
    ratios: Vec<u32>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Also verify main decompositions exactly for machines this small.
    #[arg(long, default_value_t = 3)]
    exact_max_states: usize,
    #[arg(long)]
    maxlen: Option<usize>,
}

#[derive(Args)]
struct RefuteArgs {
    #[arg(long)]
    dec: PathBuf,
    #[arg(long)]
    alphabet_size: usize,
}

type Outcome = Result<u8, String>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Build(a) => build(a),
        Command::Build2(a) => build2(a),
        Command::Verify(a) => verify(a),
        Command::Encode(a) => encode(a),
        Command::Decode(a) => decode(a),
        Command::Recognize(a) => recognize(a),
        Command::Code(a) => code(a),
        Command::Table(a) => table(a),
        Command::Minwidth(a) => minwidth(a),
        Command::Corpus(a) => corpus(a),
        Command::Refute(a) => refute(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(INPUT_ERROR)
        }
    }
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

/// Loads a machine and adds a sink if its transition relation is partial.
fn load_nfa(path: &Path, note: bool) -> Result<Nfa, String> {
    let nfa = parse_nfa(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))?;
    if !nfa.is_total() && note {
        eprintln!(
            "note: added sink state {} to make the machine total",
            nfa.num_states()
        );
    }
    Ok(nfa.totalize())
}

fn load_dec(path: &Path) -> Result<Decomposition, String> {
    parse_decomposition(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn build(a: BuildArgs) -> Outcome {
    let nfa = load_nfa(&a.nfa, true)?;
    if a.ratio as usize >= nfa.num_states() {
        eprintln!(
            "warning: ratio {} is at least the number of states ({}); build2 gives a smaller alphabet",
            a.ratio,
            nfa.num_states()
        );
    }
    let dec = medvedev_main_capped(&nfa, a.ratio, a.cap).map_err(|e| e.to_string())?;
    emit(&serialize(&dec), a.out.as_deref())?;
    Ok(OK)
}

fn build2(a: Build2Args) -> Outcome {
    let nfa = load_nfa(&a.nfa, true)?;
    let dec = medvedev_width2(&nfa).map_err(|e| e.to_string())?;
    emit(&serialize(&dec), a.out.as_deref())?;
    Ok(OK)
}

fn verify(a: VerifyArgs) -> Outcome {
    let nfa = load_nfa(&a.nfa, false)?;
    let dec = load_dec(&a.dec)?;
    let mode = match a.mode {
        Mode::Exact => VerifyMode::Exact,
        Mode::Bounded => VerifyMode::Bounded(a.maxlen),
    };
    let report = verify_decomposition_capped(&nfa, &dec, mode, a.cap).map_err(|e| e.to_string())?;
    let mut out = String::new();
    if !a.summary {
        let _ = writeln!(
            out,
            "{} decomposition, width {}, {} local symbols",
            dec.kind().name(),
            dec.width(),
            dec.slt().alphabet().len()
        );
        match report.mode {
            ModeUsed::Exact => out.push_str("compared exactly\n"),
            ModeUsed::Bounded { horizon } => {
                let _ = writeln!(out, "compared all words up to length {horizon}");
            }
        }
        if let Some(n) = &report.notice {
            let _ = writeln!(out, "{n}");
        }
        for c in &report.counterexamples {
            let what = match c.kind {
                CounterexampleKind::Missing => "accepted by the machine but not produced",
                CounterexampleKind::Extra => "produced but not accepted by the machine",
            };
            let _ = writeln!(
                out,
                "counterexample {}: {what}",
                dec.render_source_word(&c.source)
            );
            if let Some(z) = &c.local {
                let _ = writeln!(out, "  local word {}", dec.render_local_word(z));
            }
        }
        let _ = writeln!(out, "{}\n", if report.passed { "PASS" } else { "FAIL" });
    }
    out.push_str(&report.summary(&dec));
    print!("{out}");
    Ok(if report.passed { OK } else { FAILED })
}

/// Runs `f` on `word` or on each stdin line, printing one result per line.
/// Malformed lines are reported on stderr and processing continues.
fn per_line(word: Option<String>, mut f: impl FnMut(&str) -> Result<String, String>) -> Outcome {
    let lines: Vec<String> = match word {
        Some(w) => vec![w],
        None => io::stdin()
            .lock()
            .lines()
            .collect::<Result<_, _>>()
            .map_err(|e| format!("stdin: {e}"))?,
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let mut status = OK;
    for (i, line) in lines.iter().enumerate() {
        match f(line.trim()) {
            Ok(s) => {
                let _ = writeln!(out, "{s}");
            }
            Err(e) => {
                let _ = writeln!(out, "error");
                eprintln!("line {}: {e}", i + 1);
                status = INPUT_ERROR;
            }
        }
    }
    Ok(status)
}

fn encode(a: EncodeArgs) -> Outcome {
    let nfa = load_nfa(&a.nfa, false)?;
    let dec = load_dec(&a.dec)?;
    per_line(a.word, |line| {
        let w = nfa.parse_word(line).map_err(|e| e.to_string())?;
        match encode_word(&nfa, &dec, &w).map_err(|e| e.to_string())? {
            Encoded::Local(z) => Ok(dec.render_local_word(&z)),
            Encoded::Residual => Ok("residual".into()),
        }
    })
}

fn decode(a: WordsArgs) -> Outcome {
    let dec = load_dec(&a.dec)?;
    per_line(a.word, |line| {
        let z = dec.parse_local_word(line).map_err(|e| e.to_string())?;
        let w = decode_word(&dec, &z).map_err(|e| e.to_string())?;
        Ok(dec.render_source_word(&w))
    })
}

fn recognize(a: RecognizeArgs) -> Outcome {
    let dec = load_dec(&a.dec)?;
    let slt = dec.slt();
    let mut recognizer = slt.recognizer();
    per_line(a.word, |line| {
        let z = dec.parse_local_word(line).map_err(|e| e.to_string())?;
        if z.is_empty() {
            return Ok("reject (empty word)".into());
        }
        let accepted = if a.stream {
            recognizer.reset();
            for &b in &z {
                recognizer.feed(b).map_err(|e| e.to_string())?;
            }
            recognizer.finish().map_err(|e| e.to_string())?
        } else {
            slt.contains(&z).map_err(|e| e.to_string())?
        };
        Ok(if accepted { "accept" } else { "reject" }.into())
    })
}

fn code(a: CodeArgs) -> Outcome {
    let code = build_code(a.states as usize, a.ratio).map_err(|e| e.to_string())?;
    let mut out = String::new();
    let _ = writeln!(out, "m={}", code.m());
    for (q, word) in code.codewords().iter().enumerate() {
        let digits: String = word.iter().map(|d| format!("{d},")).collect();
        let _ = writeln!(out, "{q} {}", digits.trim_end_matches(','));
    }
    let mut status = OK;
    if a.verify {
        match code.verify_factor_decodable().map_err(|e| e.to_string())? {
            DecodabilityVerdict::Pass { windows } => {
                let _ = writeln!(out, "factor_decodable=pass\nwindows={windows}");
            }
            DecodabilityVerdict::Fail { window, expected } => {
                let _ = writeln!(
                    out,
                    "factor_decodable=fail\nwindow={window:?}\nexpected_position={}\nexpected_state={}",
                    expected.0, expected.1
                );
                status = FAILED;
            }
        }
    }
    print!("{out}");
    Ok(status)
}

fn table(a: TableArgs) -> Outcome {
    if let Some(h) = a.h.iter().find(|&&h| h < 2) {
        return Err(format!("--h: ratio {h} is below 2"));
    }
    let ns =
        a.n.iter()
            .map(|s| match parse_count(s) {
                Some(n) if n >= 2u32.into() => Ok(n),
                _ => Err(format!(
                    "--n: expected an integer >= 2 such as 1000 or 1e40, got `{s}`"
                )),
            })
            .collect::<Result<Vec<_>, _>>()?;
    let mut out = String::from("h f g_printed g_reconciled f_lg_h\n");
    for &h in &a.h {
        let v = fg_values(h);
        let _ = writeln!(
            out,
            "{h} {:.4} {:.4} {:.4} {:.4}",
            v.f, v.g_printed, v.g_reconciled, v.f_lg_h
        );
    }
    out.push_str("\nh n closed_form_value closed_form_width exact_width\n");
    let rows = width_table(&a.h, &ns).map_err(|e| e.to_string())?;
    for (row, n_text) in rows.iter().zip(a.h.iter().flat_map(|_| a.n.iter())) {
        let _ = writeln!(
            out,
            "{} {} {:.4} {} {}",
            row.h, n_text, row.closed_form_value, row.closed_form_width, row.exact_width
        );
    }
    print!("{out}");
    Ok(OK)
}

fn minwidth(a: MinwidthArgs) -> Outcome {
    let nfa = load_nfa(&a.nfa, false)?;
    let maxlen = a.maxlen.unwrap_or(3 * a.max_k);
    let result = min_slt_width(&nfa, a.max_k, maxlen).map_err(|e| e.to_string())?;
    match result.width {
        Some(k) => println!("width={k}"),
        None => println!("width=none"),
    }
    println!("max_k={}\nhorizon={}", result.max_k, result.horizon);
    Ok(OK)
}

fn corpus(a: CorpusArgs) -> Outcome {
    if let Some(h) = a.ratios.iter().find(|&&h| h < 2) {
        return Err(format!("--ratios: ratio {h} is below 2"));
    }
    let config = CorpusConfig {
        dir: a.dir.clone(),
        ratios: a.ratios,
        jobs: a.jobs,
        exact_max_states: a.exact_max_states,
        horizon: a.maxlen,
    };
    let report = run_corpus(&config).map_err(|e| format!("{}: {e}", a.dir.display()))?;
    print!("{}", report.summary());
    Ok(if report.passed() { OK } else { FAILED })
}

fn refute(a: RefuteArgs) -> Outcome {
    let dec = load_dec(&a.dec)?;
    let r = refute_small_ratio(a.alphabet_size, &dec).map_err(|e| e.to_string())?;
    let mut out = String::new();
    let letter = &dec.source_alphabet()[r.letter as usize];
    let _ = writeln!(out, "letter={letter}");
    match r.preimage {
        Some(b) => {
            let _ = writeln!(out, "preimage={}", dec.slt().alphabet()[b as usize]);
        }
        None => out.push_str("preimage=none\n"),
    }
    if r.pair.is_some() {
        let _ = writeln!(out, "indistinguishable={}", r.indistinguishable);
    }
    let found = match &r.outcome {
        RefutationOutcome::ProducedOutsideLanguage { word, local } => {
            let _ = writeln!(
                out,
                "outcome=produced_outside_language\nword={}\nlocal={}",
                dec.render_source_word(word),
                dec.render_local_word(local)
            );
            true
        }
        RefutationOutcome::MissingFromImage { word } => {
            let _ = writeln!(
                out,
                "outcome=missing_from_image\nword={}",
                dec.render_source_word(word)
            );
            true
        }
        RefutationOutcome::NoWitness { searched_up_to } => {
            let _ = writeln!(out, "outcome=no_witness\nsearched_up_to={searched_up_to}");
            false
        }
    };
    let _ = writeln!(out, "confirmed={}", r.confirmed);
    print!("{out}");
    Ok(if found && r.confirmed { FAILED } else { OK })
}
