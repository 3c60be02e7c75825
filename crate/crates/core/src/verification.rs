// SPDX-License-Identifier: Apache-2.0

//! Checks decompositions against their source machines, refutes candidate
//! decompositions with too small an alphabetic ratio, and computes the
//! width/ratio tables.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path as FsPath, PathBuf};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use thiserror::Error;

use crate::automata::{
    nfa_equivalent_capped, parse_nfa, Equivalence, EquivalenceMode, Nfa, NfaError, Symbol,
    Transition, Word, DEFAULT_STATE_CAP,
};
use crate::codes::{build_code, choose_m, f_ratio, g_printed, g_reconciled, CodeError};
use crate::construction::{
    code_for, encode_path, encode_path_width2, medvedev_main, medvedev_width2, ConstructionError,
    Decomposition, DecompositionKind,
};
use crate::format::parse_decomposition;
use crate::slt::{window_ops, SltSpec};

#[derive(Debug, Error)]
pub enum VerificationError {
    #[error("decomposition and machine use different source alphabets")]
    AlphabetMismatch,
    #[error("local alphabet has {local} symbols; refutation needs at most 2|A| - 1 = {limit}")]
    RatioTooLarge { local: usize, limit: usize },
    #[error("expected a source alphabet of size {expected}, decomposition has {got}")]
    SourceAlphabetSize { expected: usize, got: usize },
    #[error(transparent)]
    Nfa(#[from] NfaError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Code(#[from] CodeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    Exact,
    /// Bounded comparison; `None` selects the default horizon.
    Bounded(Option<usize>),
}

/// Mode that actually produced the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeUsed {
    Exact,
    Bounded { horizon: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CounterexampleKind {
    /// In `L(M)` but not produced by the decomposition.
    Missing,
    /// Produced by the decomposition but not in `L(M)`.
    Extra,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub kind: CounterexampleKind,
    pub source: Word,
    /// For `Extra`, an accepted local preimage; for `Missing`, the canonical
    /// encoding of an accepting path (which the slt language rejects).
    pub local: Option<Word>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SetSizes {
    pub prefixes: usize,
    pub suffixes: usize,
    pub factors: usize,
    pub short_words: usize,
    pub residual: usize,
}

impl SetSizes {
    pub fn of(dec: &Decomposition) -> Self {
        SetSizes {
            prefixes: dec.slt().prefixes().len(),
            suffixes: dec.slt().suffixes().len(),
            factors: dec.slt().factors().len(),
            short_words: dec.slt().short_words().len(),
            residual: dec.residual().len(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub mode: ModeUsed,
    pub passed: bool,
    pub counterexamples: Vec<Counterexample>,
    pub sizes: SetSizes,
    pub notice: Option<String>,
    pub elapsed: Duration,
}

impl VerificationReport {
    /// Stable `key=value` lines (no timing).
    pub fn summary(&self, dec: &Decomposition) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "verdict={}", if self.passed { "pass" } else { "fail" });
        match self.mode {
            ModeUsed::Exact => {
                let _ = writeln!(out, "mode=exact");
            }
            ModeUsed::Bounded { horizon } => {
                let _ = writeln!(out, "mode=bounded\nhorizon={horizon}");
            }
        }
        let _ = writeln!(out, "kind={}", dec.kind().name());
        let _ = writeln!(out, "k={}", dec.width());
        let _ = writeln!(out, "local_symbols={}", dec.slt().alphabet().len());
        let s = self.sizes;
        let _ = writeln!(
            out,
            "size_I={}\nsize_T={}\nsize_F={}\nsize_SHORT={}\nsize_RESIDUAL={}",
            s.prefixes, s.suffixes, s.factors, s.short_words, s.residual
        );
        for (i, c) in self.counterexamples.iter().enumerate() {
            let kind = match c.kind {
                CounterexampleKind::Missing => "missing",
                CounterexampleKind::Extra => "extra",
            };
            let _ = writeln!(out, "counterexample{i}.kind={kind}");
            let _ = writeln!(
                out,
                "counterexample{i}.source={}",
                dec.render_source_word(&c.source)
            );
            if let Some(z) = &c.local {
                let _ = writeln!(out, "counterexample{i}.local={}", dec.render_local_word(z));
            }
        }
        if let Some(n) = &self.notice {
            let _ = writeln!(out, "notice={n}");
        }
        out
    }
}

/// Horizon used when none is given: `max(3m + 6, 2k + 4)`.
pub fn default_horizon(dec: &Decomposition) -> usize {
    (3 * dec.m() + 6).max(2 * dec.width() + 4)
}

/// Machine for `pi(L(slt)) ∪ residual`.
pub fn image_nfa(dec: &Decomposition) -> Result<Nfa, NfaError> {
    let relabeled = dec
        .slt()
        .to_nfa()
        .relabel(dec.source_alphabet().to_vec(), dec.pi().image())?;
    let residual = Nfa::from_words(dec.source_alphabet().to_vec(), dec.residual())?;
    relabeled.union(&residual)
}

/// Depth-first search for an accepted local word projecting onto `w`, pruning
/// on the prefix and factor conditions. Independent of the window automaton.
pub fn find_preimage(dec: &Decomposition, w: &[Symbol]) -> Option<Word> {
    let slt = dec.slt();
    let k = slt.width();
    let preimages: Vec<Vec<Symbol>> = (0..dec.source_alphabet().len() as Symbol)
        .map(|a| dec.pi().preimage(a).collect())
        .collect();
    let mut dead: HashSet<(usize, Word)> = HashSet::new();
    let mut z = Vec::with_capacity(w.len());
    fn rec(
        slt: &SltSpec,
        k: usize,
        w: &[Symbol],
        preimages: &[Vec<Symbol>],
        z: &mut Word,
        dead: &mut HashSet<(usize, Word)>,
    ) -> bool {
        let i = z.len();
        if i == w.len() {
            return slt.contains(z).unwrap_or(false);
        }
        let context = z[i.saturating_sub(k - 1)..].to_vec();
        if i >= k - 1 && dead.contains(&(i, context.clone())) {
            return false;
        }
        for &b in &preimages[w[i] as usize] {
            z.push(b);
            let len = z.len();
            let ok = (len != k - 1 || len >= w.len() || slt.has_prefix(z))
                && (len < k || slt.has_factor(&z[len - k..]));
            if ok && rec(slt, k, w, preimages, z, dead) {
                return true;
            }
            z.pop();
        }
        if i >= k - 1 {
            dead.insert((i, context));
        }
        false
    }
    if w.is_empty() {
        return None;
    }
    rec(slt, k, w, &preimages, &mut z, &mut dead).then_some(z)
}

/// Membership in `pi(L(slt)) ∪ residual` by direct search.
pub fn image_contains(dec: &Decomposition, w: &[Symbol]) -> bool {
    dec.residual().iter().any(|r| r.as_slice() == w) || find_preimage(dec, w).is_some()
}

fn canonical_encoding(nfa: &Nfa, dec: &Decomposition, w: &[Symbol]) -> Option<Word> {
    let path = nfa.find_successful_path(w).ok()??;
    match dec.kind() {
        DecompositionKind::Width2 => encode_path_width2(nfa, &path).ok(),
        DecompositionKind::Main => {
            if dec.slt().alphabet().len() != dec.h() as usize * dec.source_alphabet().len() {
                return None;
            }
            let code = code_for(nfa, dec).ok()?;
            Some(encode_path(&code, &path))
        }
    }
}

/// Compares `L(nfa)` with `pi(L(slt)) ∪ residual`.
pub fn verify_decomposition(
    nfa: &Nfa,
    dec: &Decomposition,
    mode: VerifyMode,
) -> Result<VerificationReport, VerificationError> {
    verify_decomposition_capped(nfa, dec, mode, DEFAULT_STATE_CAP)
}

pub fn verify_decomposition_capped(
    nfa: &Nfa,
    dec: &Decomposition,
    mode: VerifyMode,
    cap: usize,
) -> Result<VerificationReport, VerificationError> {
    let started = Instant::now();
    if nfa.alphabet() != dec.source_alphabet() {
        return Err(VerificationError::AlphabetMismatch);
    }
    let image = image_nfa(dec)?;
    let horizon = |h: Option<usize>| h.unwrap_or_else(|| default_horizon(dec));
    let mut notice = None;
    let (used, verdict) = match mode {
        VerifyMode::Exact => {
            match nfa_equivalent_capped(nfa, &image, EquivalenceMode::Exact, cap) {
                Ok(v) => (ModeUsed::Exact, v),
                Err(NfaError::CapExceeded(c)) => {
                    let hz = horizon(None);
                    notice = Some(format!(
                        "exact mode exceeded {c} determinized states; fell back to bounded mode"
                    ));
                    let v = nfa_equivalent_capped(
                        nfa,
                        &image,
                        EquivalenceMode::Bounded(hz),
                        usize::MAX,
                    )?;
                    (ModeUsed::Bounded { horizon: hz }, v)
                }
                Err(e) => return Err(e.into()),
            }
        }
        VerifyMode::Bounded(h) => {
            let hz = horizon(h);
            let v = nfa_equivalent_capped(nfa, &image, EquivalenceMode::Bounded(hz), usize::MAX)?;
            (ModeUsed::Bounded { horizon: hz }, v)
        }
    };
    let counterexamples = match verdict {
        Equivalence::Equivalent => Vec::new(),
        Equivalence::Inequivalent { witness } => {
            if nfa.accepts(&witness)? {
                vec![Counterexample {
                    kind: CounterexampleKind::Missing,
                    local: canonical_encoding(nfa, dec, &witness),
                    source: witness,
                }]
            } else {
                vec![Counterexample {
                    kind: CounterexampleKind::Extra,
                    local: find_preimage(dec, &witness),
                    source: witness,
                }]
            }
        }
    };
    Ok(VerificationReport {
        mode: used,
        passed: counterexamples.is_empty(),
        counterexamples,
        sizes: SetSizes::of(dec),
        notice,
        elapsed: started.elapsed(),
    })
}

/// Machine for `∪_{a ∈ A} (aa)+`.
pub fn even_blocks_nfa(alphabet: Vec<String>) -> Nfa {
    let letters = alphabet.len();
    let mut transitions = Vec::new();
    let mut finals = Vec::new();
    for a in 0..letters {
        let (odd, even) = (1 + 2 * a, 2 + 2 * a);
        let a = a as Symbol;
        transitions.push(Transition::new(0, a, odd));
        transitions.push(Transition::new(odd, a, even));
        transitions.push(Transition::new(even, a, odd));
        finals.push(even);
    }
    Nfa::new(alphabet, 1 + 2 * letters, 0, finals, transitions).expect("well formed")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RefutationOutcome {
    /// `word` has odd length, so it is outside the language, yet `local` is an
    /// accepted local word projecting onto it.
    ProducedOutsideLanguage {
        word: Word,
        local: Word,
    },
    /// `word` is in the language but neither produced nor in the residual.
    MissingFromImage {
        word: Word,
    },
    NoWitness {
        searched_up_to: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Refutation {
    /// Source letter with at most one preimage.
    pub letter: Symbol,
    pub preimage: Option<Symbol>,
    /// `(b^{2k}, b^{2k+1})` when the preimage exists.
    pub pair: Option<(Word, Word)>,
    /// Whether the pair has identical prefix, suffix and factor views.
    pub indistinguishable: bool,
    pub outcome: RefutationOutcome,
    /// The witness was replayed against the language and the decomposition.
    pub confirmed: bool,
}

/// Applies the pigeonhole argument to a claimed decomposition of
/// `∪_{a ∈ A} (aa)+` whose local alphabet has at most `2|A| - 1` symbols.
pub fn refute_small_ratio(
    alphabet_size: usize,
    dec: &Decomposition,
) -> Result<Refutation, VerificationError> {
    let letters = dec.source_alphabet().len();
    if letters != alphabet_size {
        return Err(VerificationError::SourceAlphabetSize {
            expected: alphabet_size,
            got: letters,
        });
    }
    let local = dec.slt().alphabet().len();
    if local + 1 > 2 * letters {
        return Err(VerificationError::RatioTooLarge {
            local,
            limit: 2 * letters - 1,
        });
    }
    let target = even_blocks_nfa(dec.source_alphabet().to_vec());
    let k = dec.width();
    let max_residual = dec.residual().iter().map(Vec::len).max().unwrap_or(0);
    let limit = max_residual + 2 * k + 2;
    let (letter, preimage) = (0..letters as Symbol)
        .map(|a| (a, dec.pi().preimage(a).collect::<Vec<_>>()))
        .find(|(_, pre)| pre.len() <= 1)
        .map(|(a, pre)| (a, pre.first().copied()))
        .expect("pigeonhole: some letter has at most one preimage");
    let power = |s: Symbol, len: usize| vec![s; len];
    let in_residual = |w: &Word| dec.residual().contains(w);

    let missing_search = |from: usize| {
        (from..=limit)
            .step_by(2)
            .map(|len| power(letter, len))
            .find(|w| !in_residual(w) && !image_contains(dec, w))
    };

    let Some(b) = preimage else {
        let outcome = match missing_search(2) {
            Some(word) => RefutationOutcome::MissingFromImage { word },
            None => RefutationOutcome::NoWitness {
                searched_up_to: limit,
            },
        };
        let confirmed = confirm(&target, dec, &outcome)?;
        return Ok(Refutation {
            letter,
            preimage: None,
            pair: None,
            indistinguishable: false,
            outcome,
            confirmed,
        });
    };

    let x = power(b, 2 * k);
    let xb = power(b, 2 * k + 1);
    let (wx, wxb) = (window_ops(&x, k - 1), window_ops(&xb, k - 1));
    let indistinguishable = wx.prefix == wxb.prefix
        && wx.suffix == wxb.suffix
        && window_ops(&x, k).factors == window_ops(&xb, k).factors;

    let outcome = if dec.slt().contains(&x).unwrap_or(false) {
        RefutationOutcome::ProducedOutsideLanguage {
            word: power(letter, 2 * k + 1),
            local: xb.clone(),
        }
    } else {
        match missing_search(2 * k) {
            Some(word) => RefutationOutcome::MissingFromImage { word },
            None => RefutationOutcome::NoWitness {
                searched_up_to: limit,
            },
        }
    };
    let confirmed = confirm(&target, dec, &outcome)?;
    Ok(Refutation {
        letter,
        preimage: Some(b),
        pair: Some((x, xb)),
        indistinguishable,
        outcome,
        confirmed,
    })
}

fn confirm(
    target: &Nfa,
    dec: &Decomposition,
    outcome: &RefutationOutcome,
) -> Result<bool, VerificationError> {
    Ok(match outcome {
        RefutationOutcome::ProducedOutsideLanguage { word, local } => {
            dec.slt().contains(local).unwrap_or(false)
                && dec.pi().apply_word(local) == *word
                && !target.accepts(word)?
        }
        RefutationOutcome::MissingFromImage { word } => {
            target.accepts(word)? && !image_contains(dec, word)
        }
        RefutationOutcome::NoWitness { .. } => false,
    })
}

/// Closed-form quantities for ratio `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FgValues {
    pub f: f64,
    pub g_printed: f64,
    pub g_reconciled: f64,
    /// `f(h) lg h`, the ratio of `m` to its information-theoretic floor.
    pub f_lg_h: f64,
}

pub fn fg_values(h: u64) -> FgValues {
    let hf = h as f64;
    FgValues {
        f: f_ratio(hf),
        g_printed: g_printed(hf),
        g_reconciled: g_reconciled(hf),
        f_lg_h: f_ratio(hf) * hf.log2(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WidthEntry {
    pub h: u64,
    pub n: BigUint,
    /// `g(h) + f(h) lg n` before rounding up.
    pub closed_form_value: f64,
    /// `2 ceil(g(h) + f(h) lg n)`.
    pub closed_form_width: u64,
    /// `2 m` with `m` chosen by the exact recurrence.
    pub exact_width: u64,
}

pub fn width_table(hs: &[u64], ns: &[BigUint]) -> Result<Vec<WidthEntry>, VerificationError> {
    let mut rows = Vec::with_capacity(hs.len() * ns.len());
    for &h in hs {
        for n in ns {
            let choice = choose_m(n, h)?;
            let value = g_reconciled(h as f64) + f_ratio(h as f64) * crate::codes::log2_big(n);
            rows.push(WidthEntry {
                h,
                n: n.clone(),
                closed_form_value: value,
                closed_form_width: 2 * choice.closed_form,
                exact_width: 2 * choice.m as u64,
            });
        }
    }
    Ok(rows)
}

/// Parses `10`, `1000` or `1e40` into an exact integer.
pub fn parse_count(text: &str) -> Option<BigUint> {
    let text = text.trim();
    match text.split_once(['e', 'E']) {
        Some((mantissa, exp)) => {
            let mantissa: BigUint = mantissa.parse().ok()?;
            let exp: u32 = exp.parse().ok()?;
            Some(mantissa * BigUint::from(10u32).pow(exp))
        }
        None => text.parse().ok(),
    }
}

#[derive(Debug, Clone)]
pub struct CorpusConfig {
    pub dir: PathBuf,
    pub ratios: Vec<u32>,
    pub jobs: usize,
    /// Main decompositions of machines with at most this many states (after
    /// totalization) are also verified in exact mode.
    pub exact_max_states: usize,
    pub horizon: Option<usize>,
}

impl CorpusConfig {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        CorpusConfig {
            dir: dir.into(),
            ratios: vec![2, 3],
            jobs: 1,
            exact_max_states: 3,
            horizon: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub file: String,
    pub checks: Vec<CheckResult>,
}

impl CorpusEntry {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Debug, Clone, Default)]
pub struct CorpusReport {
    pub entries: Vec<CorpusEntry>,
}

impl CorpusReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(CorpusEntry::passed)
    }

    pub fn failures(&self) -> usize {
        self.entries
            .iter()
            .flat_map(|e| &e.checks)
            .filter(|c| !c.passed)
            .count()
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        let checks: usize = self.entries.iter().map(|e| e.checks.len()).sum();
        let _ = writeln!(out, "files={}", self.entries.len());
        let _ = writeln!(out, "checks={checks}");
        let _ = writeln!(out, "failures={}", self.failures());
        for e in &self.entries {
            for c in &e.checks {
                let _ = writeln!(
                    out,
                    "{}.{}={}{}",
                    e.file,
                    c.name,
                    if c.passed { "pass" } else { "fail" },
                    if c.detail.is_empty() {
                        String::new()
                    } else {
                        format!(" ({})", c.detail)
                    }
                );
            }
        }
        let _ = writeln!(
            out,
            "verdict={}",
            if self.passed() { "pass" } else { "fail" }
        );
        out
    }
}

fn check_from(
    name: String,
    result: Result<VerificationReport, VerificationError>,
    dec: Option<&Decomposition>,
) -> CheckResult {
    match result {
        Ok(report) => {
            let mut detail = match report.mode {
                ModeUsed::Exact => "exact".to_string(),
                ModeUsed::Bounded { horizon } => format!("bounded horizon={horizon}"),
            };
            if let (Some(c), Some(dec)) = (report.counterexamples.first(), dec) {
                let _ = write!(detail, " witness={}", dec.render_source_word(&c.source));
            }
            CheckResult {
                name,
                passed: report.passed,
                detail,
            }
        }
        Err(e) => CheckResult {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn run_file(config: &CorpusConfig, path: &FsPath) -> CorpusEntry {
    let file = path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut checks = Vec::new();
    let nfa = match std::fs::read_to_string(path)
        .map_err(|e| e.to_string())
        .and_then(|t| parse_nfa(&t).map_err(|e| e.to_string()))
    {
        Ok(nfa) => nfa.totalize(),
        Err(e) => {
            checks.push(CheckResult {
                name: "parse".into(),
                passed: false,
                detail: e,
            });
            return CorpusEntry { file, checks };
        }
    };

    match medvedev_width2(&nfa) {
        Ok(dec) => checks.push(check_from(
            "width2".into(),
            verify_decomposition(&nfa, &dec, VerifyMode::Exact),
            Some(&dec),
        )),
        Err(e) => checks.push(CheckResult {
            name: "width2".into(),
            passed: false,
            detail: format!("error: {e}"),
        }),
    }

    for &h in &config.ratios {
        match medvedev_main(&nfa, h) {
            Ok(dec) => {
                checks.push(check_from(
                    format!("main_h{h}"),
                    verify_decomposition(&nfa, &dec, VerifyMode::Bounded(config.horizon)),
                    Some(&dec),
                ));
                if nfa.num_states() <= config.exact_max_states {
                    checks.push(check_from(
                        format!("main_h{h}_exact"),
                        verify_decomposition(&nfa, &dec, VerifyMode::Exact),
                        Some(&dec),
                    ));
                }
            }
            Err(e) => checks.push(CheckResult {
                name: format!("main_h{h}"),
                passed: false,
                detail: format!("error: {e}"),
            }),
        }
        let code = build_code(nfa.num_states(), h).map_err(VerificationError::from);
        let verdict = code.and_then(|c| Ok(c.verify_factor_decodable()?));
        checks.push(match verdict {
            Ok(v) => CheckResult {
                name: format!("code_h{h}"),
                passed: v.passed(),
                detail: String::new(),
            },
            Err(e) => CheckResult {
                name: format!("code_h{h}"),
                passed: false,
                detail: format!("error: {e}"),
            },
        });
    }

    let fixture = path.with_extension("dec");
    if fixture.exists() {
        let name = "fixture".to_string();
        match std::fs::read_to_string(&fixture)
            .map_err(|e| e.to_string())
            .and_then(|t| parse_decomposition(&t).map_err(|e| e.to_string()))
        {
            Ok(dec) => checks.push(check_from(
                name,
                verify_decomposition(&nfa, &dec, VerifyMode::Bounded(config.horizon)),
                Some(&dec),
            )),
            Err(e) => checks.push(CheckResult {
                name,
                passed: false,
                detail: format!("error: {e}"),
            }),
        }
    }
    CorpusEntry { file, checks }
}

/// Builds and verifies both constructions for every `.nfa` file in the corpus
/// directory, plus any `<name>.dec` fixture next to it. Entries are ordered by
/// file name regardless of `jobs`.
pub fn run_corpus(config: &CorpusConfig) -> std::io::Result<CorpusReport> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(&config.dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "nfa"))
        .collect();
    files.sort();
    let jobs = config.jobs.max(1);
    let mut entries: Vec<Option<CorpusEntry>> = vec![None; files.len()];
    if jobs == 1 {
        for (slot, f) in entries.iter_mut().zip(&files) {
            *slot = Some(run_file(config, f));
        }
    } else {
        let chunk = files.len().div_ceil(jobs).max(1);
        std::thread::scope(|s| {
            for (slots, paths) in entries.chunks_mut(chunk).zip(files.chunks(chunk)) {
                s.spawn(move || {
                    for (slot, f) in slots.iter_mut().zip(paths) {
                        *slot = Some(run_file(config, f));
                    }
                });
            }
        });
    }
    Ok(CorpusReport {
        entries: entries
            .into_iter()
            .map(|e| e.expect("every file processed"))
            .collect(),
    })
}
