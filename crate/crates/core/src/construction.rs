// SPDX-License-Identifier: Apache-2.0

//! Homomorphic decompositions of NFA languages.
//!
//! Two constructions are provided:
//!
//! * [`medvedev_width2`]: a local (width 2) language over `Q x A` whose
//!   letter-to-letter image is `L(M)`.
//! * [`medvedev_main`]: a width `2m` language over `A x D` with `|D| = h`, where
//!   each block of `m` consecutive positions carries the codeword of the state
//!   the block starts from. Source words shorter than `3m` are kept in an
//!   explicit finite residual set.

use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::automata::{Nfa, NfaError, Path, Symbol, Word, DEFAULT_WORD_CAP};
use crate::codes::{build_code, choose_m, Code, CodeError};
use crate::slt::{SltError, SltSpec};

/// Default bound on the size of each constructed window set.
pub const DEFAULT_SET_CAP: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("the construction needs a total transition relation; totalize first")]
    NotTotal,
    #[error("the construction needs at least 2 states, got {0}")]
    TooFewStates(usize),
    #[error("{set} set exceeds the cap of {cap} elements")]
    CapExceeded { set: &'static str, cap: usize },
    #[error("word is not in the language of the machine")]
    NotInLanguage,
    #[error("path of length {len} is longer than the block length {m}")]
    PathTooLong { len: usize, m: usize },
    #[error("path of length {len} is not longer than the block length {m}")]
    PathTooShort { len: usize, m: usize },
    #[error("path is not successful")]
    PathNotSuccessful,
    #[error("unknown local symbol `{0}`")]
    UnknownSymbol(String),
    #[error("decomposition was built from a different machine")]
    FingerprintMismatch,
    #[error("encoded word was rejected by the slt language")]
    EncodingRejected,
    #[error("invalid decomposition: {0}")]
    Invalid(String),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Nfa(#[from] NfaError),
    #[error(transparent)]
    Slt(#[from] SltError),
}

/// Letter-to-letter map from the local alphabet to the source alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Homomorphism {
    image: Vec<Symbol>,
}

impl Homomorphism {
    pub fn new(image: Vec<Symbol>) -> Self {
        Homomorphism { image }
    }

    pub fn apply(&self, b: Symbol) -> Symbol {
        self.image[b as usize]
    }

    pub fn image(&self) -> &[Symbol] {
        &self.image
    }

    /// Local symbols mapped to `a`.
    pub fn preimage(&self, a: Symbol) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.image.len() as Symbol).filter(move |&b| self.image[b as usize] == a)
    }

    pub fn apply_word(&self, z: &[Symbol]) -> Word {
        z.iter().map(|&b| self.apply(b)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecompositionKind {
    Width2,
    Main,
}

impl DecompositionKind {
    pub fn name(self) -> &'static str {
        match self {
            DecompositionKind::Width2 => "width2",
            DecompositionKind::Main => "main",
        }
    }
}

/// An slt language, a homomorphism into the source alphabet, and a finite
/// residual set. The claimed semantics `pi(L(slt)) ∪ residual = L(M)` is
/// checked by the verification module, never assumed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub(crate) kind: DecompositionKind,
    /// Alphabetic ratio: `h` for the main construction, `n` for width 2.
    pub(crate) h: u64,
    /// Block length; 1 for the width-2 construction.
    pub(crate) m: usize,
    pub(crate) source_alphabet: Vec<String>,
    pub(crate) slt: SltSpec,
    pub(crate) pi: Homomorphism,
    pub(crate) residual: Vec<Word>,
    pub(crate) fingerprint: String,
}

impl Decomposition {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        kind: DecompositionKind,
        h: u64,
        m: usize,
        source_alphabet: Vec<String>,
        slt: SltSpec,
        pi: Homomorphism,
        mut residual: Vec<Word>,
        fingerprint: String,
    ) -> Result<Self, ConstructionError> {
        if pi.image.len() != slt.alphabet().len() {
            return Err(ConstructionError::Invalid(format!(
                "homomorphism covers {} symbols, local alphabet has {}",
                pi.image.len(),
                slt.alphabet().len()
            )));
        }
        let letters = source_alphabet.len() as Symbol;
        if pi
            .image
            .iter()
            .chain(residual.iter().flatten())
            .any(|&a| a >= letters)
        {
            return Err(ConstructionError::Invalid(
                "letter outside the source alphabet".into(),
            ));
        }
        if residual.iter().any(Vec::is_empty) {
            return Err(ConstructionError::Invalid(
                "residual contains the empty word".into(),
            ));
        }
        residual.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        residual.dedup();
        Ok(Decomposition {
            kind,
            h,
            m,
            source_alphabet,
            slt,
            pi,
            residual,
            fingerprint,
        })
    }

    pub fn kind(&self) -> DecompositionKind {
        self.kind
    }

    pub fn h(&self) -> u64 {
        self.h
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn width(&self) -> usize {
        self.slt.width()
    }

    pub fn slt(&self) -> &SltSpec {
        &self.slt
    }

    pub fn pi(&self) -> &Homomorphism {
        &self.pi
    }

    pub fn source_alphabet(&self) -> &[String] {
        &self.source_alphabet
    }

    /// Residual words ordered by length, then lexicographically.
    pub fn residual(&self) -> &[Word] {
        &self.residual
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    /// Copy with a replaced slt language (same local alphabet).
    pub fn with_slt(&self, slt: SltSpec) -> Decomposition {
        Decomposition {
            slt,
            ..self.clone()
        }
    }

    /// Parses `.`-separated local symbol tokens.
    pub fn parse_local_word(&self, text: &str) -> Result<Word, ConstructionError> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Vec::new());
        }
        let index: HashMap<&str, Symbol> = self
            .slt
            .alphabet()
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i as Symbol))
            .collect();
        crate::format::split_word(text)
            .map_err(ConstructionError::Invalid)?
            .iter()
            .map(|tok| {
                let tok = tok.trim();
                index
                    .get(tok)
                    .copied()
                    .ok_or_else(|| ConstructionError::UnknownSymbol(tok.to_string()))
            })
            .collect()
    }

    pub fn render_local_word(&self, z: &[Symbol]) -> String {
        crate::automata::render_tokens(self.slt.alphabet(), z)
    }

    pub fn render_source_word(&self, w: &[Symbol]) -> String {
        crate::automata::render_tokens(&self.source_alphabet, w)
    }
}

/// Stable identifier of a machine: SHA-256 of its canonical text, truncated.
pub fn fingerprint(nfa: &Nfa) -> String {
    let digest = Sha256::digest(nfa.to_string().as_bytes());
    hex::encode(&digest[..8])
}

fn width2_symbol(nfa: &Nfa, q: usize, a: Symbol) -> Symbol {
    (q * nfa.alphabet_size()) as Symbol + a
}

/// Local language over `Q x A`: a word `<q0,a0><q1,a1>...` is accepted iff the
/// states and letters spell a successful path.
pub fn medvedev_width2(nfa: &Nfa) -> Result<Decomposition, ConstructionError> {
    let letters = nfa.alphabet_size() as Symbol;
    let n = nfa.num_states();
    let mut local_alphabet = Vec::with_capacity(n * letters as usize);
    let mut image = Vec::with_capacity(n * letters as usize);
    for q in 0..n {
        for (a, letter) in nfa.alphabet().iter().enumerate() {
            local_alphabet.push(format!("q{q}|{letter}"));
            image.push(a as Symbol);
        }
    }
    let prefixes: Vec<Word> = (0..letters)
        .map(|a| vec![width2_symbol(nfa, nfa.initial(), a)])
        .collect();
    let mut factors = Vec::new();
    let mut suffixes = Vec::new();
    for t in nfa.transitions() {
        let first = width2_symbol(nfa, t.from, t.letter);
        for b in 0..letters {
            factors.push(vec![first, width2_symbol(nfa, t.to, b)]);
        }
        if nfa.is_final(t.to) {
            suffixes.push(vec![first]);
        }
    }
    let short_words: Vec<Word> = prefixes
        .iter()
        .filter(|p| suffixes.contains(p))
        .cloned()
        .collect();
    let slt = SltSpec::new(2, local_alphabet, prefixes, suffixes, factors, short_words)?;
    Decomposition::new(
        DecompositionKind::Width2,
        n as u64,
        1,
        nfa.alphabet().to_vec(),
        slt,
        Homomorphism::new(image),
        Vec::new(),
        fingerprint(nfa),
    )
}

/// Maps each transition `(p, a, q)` of a successful path to `<p, a>`.
pub fn encode_path_width2(nfa: &Nfa, path: &Path) -> Result<Word, ConstructionError> {
    if !path.is_successful(nfa) {
        return Err(ConstructionError::PathNotSuccessful);
    }
    Ok(path
        .transitions()
        .iter()
        .map(|t| width2_symbol(nfa, t.from, t.letter))
        .collect())
}

/// Local symbol pairing a source letter with a code digit.
pub fn main_symbol(h: u32, letter: Symbol, digit: u32) -> Symbol {
    letter * h + digit
}

/// Encoding of an arbitrary path: position `t` carries the letter of the
/// `t`-th transition and digit `t mod m` of the codeword of the state at
/// position `m * floor(t / m)`.
pub fn encode_path(code: &Code, path: &Path) -> Word {
    let m = code.m();
    path.transitions()
        .iter()
        .enumerate()
        .map(|(t, tr)| {
            let block_origin = path.state_at(t - t % m);
            main_symbol(code.h(), tr.letter, code.codeword(block_origin)[t % m])
        })
        .collect()
}

/// Encoding of a path of length at most `m`: its letters paired with the first
/// `|path|` digits of the origin's codeword.
pub fn encode_m_path(code: &Code, path: &Path) -> Result<Word, ConstructionError> {
    if path.len() > code.m() {
        return Err(ConstructionError::PathTooLong {
            len: path.len(),
            m: code.m(),
        });
    }
    Ok(encode_path(code, path))
}

/// Splits a path of length `km + j` (`k >= 1`, `0 <= j < m`) into `k` m-paths
/// followed by one (possibly empty) j-path.
pub fn canonical_decomposition(path: &Path, m: usize) -> Result<Vec<Path>, ConstructionError> {
    if path.len() <= m {
        return Err(ConstructionError::PathTooShort { len: path.len(), m });
    }
    let blocks = path.len() / m;
    let mut parts: Vec<Path> = (0..blocks)
        .map(|b| path.slice(b * m, (b + 1) * m))
        .collect();
    parts.push(path.slice(blocks * m, path.len()));
    Ok(parts)
}

/// Shared state for the main construction's window sets.
struct MainBuilder<'a> {
    nfa: &'a Nfa,
    code: &'a Code,
    m: usize,
    cap: usize,
}

impl MainBuilder<'_> {
    fn h(&self) -> u32 {
        self.code.h()
    }

    /// States reachable from `q` in exactly `steps` transitions.
    fn reach(&self, q: usize, steps: usize) -> Vec<usize> {
        let mut current = vec![q];
        for _ in 0..steps {
            let mut next: Vec<usize> = current
                .iter()
                .flat_map(|&p| self.nfa.outgoing(p).iter().map(|t| t.to))
                .collect();
            next.sort_unstable();
            next.dedup();
            current = next;
        }
        current
    }

    /// Seeds for windows starting at `offset` inside the first block: pairs
    /// (first block origin, state at the offset).
    fn seeds_at(&self, offset: usize) -> Vec<(usize, usize)> {
        (0..self.nfa.num_states())
            .flat_map(|o| self.reach(o, offset).into_iter().map(move |p| (o, p)))
            .collect()
    }

    /// Encoded words of length `len` read along paths starting at global
    /// position `start` from each seed `(block origin, state)`. Returns each
    /// distinct window with the distinct states it can end in.
    fn sweep(
        &self,
        set: &'static str,
        start: usize,
        seeds: Vec<(usize, usize)>,
        len: usize,
    ) -> Result<HashMap<Word, Vec<usize>>, ConstructionError> {
        let m = self.m;
        let mut layer: HashSet<(Word, usize, usize)> = seeds
            .into_iter()
            .map(|(origin, state)| (Vec::new(), state, origin))
            .collect();
        for pos in start..start + len {
            let mut next = HashSet::with_capacity(layer.len() * 2);
            for (word, state, origin) in layer {
                let origin = if pos % m == 0 { state } else { origin };
                let digit = self.code.codeword(origin)[pos % m];
                for t in self.nfa.outgoing(state) {
                    let mut w = Vec::with_capacity(len);
                    w.extend_from_slice(&word);
                    w.push(main_symbol(self.h(), t.letter, digit));
                    next.insert((w, t.to, origin));
                }
                if next.len() > self.cap {
                    return Err(ConstructionError::CapExceeded { set, cap: self.cap });
                }
            }
            layer = next;
        }
        let mut out: HashMap<Word, Vec<usize>> = HashMap::new();
        for (word, state, _) in layer {
            out.entry(word).or_default().push(state);
        }
        Ok(out)
    }

    /// Whether some path of exactly `steps` transitions leaves `q`.
    fn can_walk(&self, q: usize, steps: usize) -> bool {
        !self.reach(q, steps).is_empty()
    }

    fn prefixes(&self) -> Result<Vec<Word>, ConstructionError> {
        let q0 = self.nfa.initial();
        let windows = self.sweep("I", 0, vec![(q0, q0)], 2 * self.m - 1)?;
        Ok(windows
            .into_iter()
            .filter(|(_, ends)| ends.iter().any(|&q| self.can_walk(q, 1)))
            .map(|(w, _)| w)
            .collect())
    }

    fn factors(&self) -> Result<Vec<Word>, ConstructionError> {
        let m = self.m;
        let mut all: HashSet<Word> = HashSet::new();
        for offset in 0..=m {
            let windows = self.sweep("F", offset, self.seeds_at(offset), 2 * m)?;
            for (w, ends) in windows {
                if ends.iter().any(|&q| self.can_walk(q, m - offset)) {
                    all.insert(w);
                }
            }
            if all.len() > self.cap {
                return Err(ConstructionError::CapExceeded {
                    set: "F",
                    cap: self.cap,
                });
            }
        }
        Ok(all.into_iter().collect())
    }

    fn suffixes(&self) -> Result<Vec<Word>, ConstructionError> {
        let m = self.m;
        let mut all: HashSet<Word> = HashSet::new();
        for j in 0..m {
            let windows = self.sweep("T", j + 1, self.seeds_at(j + 1), 2 * m - 1)?;
            for (w, ends) in windows {
                if ends.iter().any(|&q| self.nfa.is_final(q)) {
                    all.insert(w);
                }
            }
        }
        Ok(all.into_iter().collect())
    }
}

/// Main construction with alphabetic ratio `h`, using the default set cap.
pub fn medvedev_main(nfa: &Nfa, h: u32) -> Result<Decomposition, ConstructionError> {
    medvedev_main_capped(nfa, h, DEFAULT_SET_CAP)
}

pub fn medvedev_main_capped(
    nfa: &Nfa,
    h: u32,
    cap: usize,
) -> Result<Decomposition, ConstructionError> {
    let n = nfa.num_states();
    if n < 2 {
        return Err(ConstructionError::TooFewStates(n));
    }
    if !nfa.is_total() {
        return Err(ConstructionError::NotTotal);
    }
    let code = build_code(n, h)?;
    let m = code.m();
    let builder = MainBuilder {
        nfa,
        code: &code,
        m,
        cap,
    };
    let prefixes = builder.prefixes()?;
    let factors = builder.factors()?;
    let suffixes = builder.suffixes()?;

    let letters = nfa.alphabet_size() as Symbol;
    let mut local_alphabet = Vec::with_capacity((letters * h) as usize);
    let mut image = Vec::with_capacity((letters * h) as usize);
    for (a, letter) in nfa.alphabet().iter().enumerate() {
        for d in 0..h {
            local_alphabet.push(format!("{letter}|{d}"));
            image.push(a as Symbol);
        }
    }
    let slt = SltSpec::new(
        2 * m,
        local_alphabet,
        prefixes,
        suffixes,
        factors,
        Vec::new(),
    )?;
    let residual = nfa
        .enumerate_language_capped(3 * m - 1, DEFAULT_WORD_CAP)
        .map_err(|_| ConstructionError::CapExceeded {
            set: "RESIDUAL",
            cap: DEFAULT_WORD_CAP,
        })?;
    Decomposition::new(
        DecompositionKind::Main,
        h as u64,
        m,
        nfa.alphabet().to_vec(),
        slt,
        Homomorphism::new(image),
        residual,
        fingerprint(nfa),
    )
}

/// Code used by a main decomposition of `nfa`, rebuilt deterministically.
pub fn code_for(nfa: &Nfa, dec: &Decomposition) -> Result<Code, ConstructionError> {
    let code = build_code(nfa.num_states(), dec.h as u32)?;
    if code.m() != dec.m {
        return Err(ConstructionError::FingerprintMismatch);
    }
    Ok(code)
}

/// Result of encoding a source word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Encoded {
    Local(Word),
    /// The word is carried by the residual set rather than the slt language.
    Residual,
}

/// Encodes a member of `L(nfa)` as a word of the decomposition's slt language,
/// following the first successful path in canonical transition order.
pub fn encode_word(
    nfa: &Nfa,
    dec: &Decomposition,
    w: &[Symbol],
) -> Result<Encoded, ConstructionError> {
    if dec.fingerprint != fingerprint(nfa) {
        return Err(ConstructionError::FingerprintMismatch);
    }
    let path = nfa
        .find_successful_path(w)?
        .ok_or(ConstructionError::NotInLanguage)?;
    let z = match dec.kind {
        DecompositionKind::Width2 => encode_path_width2(nfa, &path)?,
        DecompositionKind::Main => {
            if w.len() < 3 * dec.m {
                return Ok(Encoded::Residual);
            }
            encode_path(&code_for(nfa, dec)?, &path)
        }
    };
    if !dec.slt.contains(&z)? {
        return Err(ConstructionError::EncodingRejected);
    }
    Ok(Encoded::Local(z))
}

/// Letter-wise projection of a local word.
pub fn decode_word(dec: &Decomposition, z: &[Symbol]) -> Result<Word, ConstructionError> {
    let size = dec.slt.alphabet().len() as Symbol;
    if let Some(&b) = z.iter().find(|&&b| b >= size) {
        return Err(ConstructionError::UnknownSymbol(b.to_string()));
    }
    Ok(dec.pi.apply_word(z))
}

/// Block length the main construction uses for `nfa` at ratio `h`.
pub fn main_block_length(nfa: &Nfa, h: u32) -> Result<usize, ConstructionError> {
    Ok(choose_m(&BigUint::from(nfa.num_states()), h as u64)?.m)
}
