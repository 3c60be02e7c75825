// SPDX-License-Identifier: Apache-2.0

//! Strictly locally testable languages.
//!
//! A k-slt language is given by a set of allowed (k-1)-prefixes, a set of allowed
//! (k-1)-suffixes and a set of allowed k-factors. Words shorter than `k` are
//! decided by an explicit finite set instead.

use std::collections::{BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::automata::{
    nfa_equivalent, Equivalence, EquivalenceMode, Nfa, NfaError, Symbol, Transition, Word,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SltError {
    #[error("width must be at least 2, got {0}")]
    Width(usize),
    #[error("{set} word {word:?} has length {len}, expected {expected}")]
    WordLength {
        set: &'static str,
        word: Word,
        len: usize,
        expected: String,
    },
    #[error("symbol {0} is not in the local alphabet")]
    UnknownSymbol(Symbol),
    #[error("position {pos} is outside 1..={len}")]
    PositionOutOfRange { pos: usize, len: usize },
    #[error("recognizer already finished; reset it first")]
    Finished,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Nfa(#[from] NfaError),
}

/// The three window views of a word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Windows {
    pub prefix: Word,
    pub suffix: Word,
    /// Distinct factors of length `k`, sorted.
    pub factors: Vec<Word>,
}

/// Prefix and suffix of length `k` (the word itself when shorter) and the
/// set of length-`k` factors.
pub fn window_ops(word: &[Symbol], k: usize) -> Windows {
    let prefix = word[..k.min(word.len())].to_vec();
    let suffix = word[word.len().saturating_sub(k)..].to_vec();
    let factors: BTreeSet<Word> = if k == 0 {
        BTreeSet::new()
    } else {
        word.windows(k).map(<[Symbol]>::to_vec).collect()
    };
    Windows {
        prefix,
        suffix,
        factors: factors.into_iter().collect(),
    }
}

/// Factor from position `from` to position `to` (1-based, inclusive); empty
/// when `to < from`.
pub fn subword(word: &[Symbol], from: usize, to: usize) -> Result<Word, SltError> {
    let len = word.len();
    for pos in [from, to] {
        if pos == 0 || pos > len {
            return Err(SltError::PositionOutOfRange { pos, len });
        }
    }
    if to < from {
        return Ok(Vec::new());
    }
    let tail = window_ops(word, len - from + 1).suffix;
    Ok(window_ops(&tail, to - from + 1).prefix)
}

/// A k-strictly locally testable language over an indexed local alphabet.
///
/// All sets are kept sorted and deduplicated, so two specs are equal exactly
/// when they are structurally equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SltSpec {
    width: usize,
    alphabet: Vec<String>,
    prefixes: Vec<Word>,
    suffixes: Vec<Word>,
    factors: Vec<Word>,
    short_words: Vec<Word>,
}

fn canonical(mut words: Vec<Word>) -> Vec<Word> {
    words.sort_unstable();
    words.dedup();
    words
}

impl SltSpec {
    pub fn new(
        width: usize,
        alphabet: Vec<String>,
        prefixes: Vec<Word>,
        suffixes: Vec<Word>,
        factors: Vec<Word>,
        short_words: Vec<Word>,
    ) -> Result<Self, SltError> {
        if width < 2 {
            return Err(SltError::Width(width));
        }
        let size = alphabet.len() as Symbol;
        let check =
            |set: &'static str, words: &[Word], ok: &dyn Fn(usize) -> bool, expected: String| {
                for w in words {
                    if !ok(w.len()) {
                        return Err(SltError::WordLength {
                            set,
                            word: w.clone(),
                            len: w.len(),
                            expected: expected.clone(),
                        });
                    }
                    if let Some(&s) = w.iter().find(|&&s| s >= size) {
                        return Err(SltError::UnknownSymbol(s));
                    }
                }
                Ok(())
            };
        check(
            "prefix",
            &prefixes,
            &|l| l == width - 1,
            format!("{}", width - 1),
        )?;
        check(
            "suffix",
            &suffixes,
            &|l| l == width - 1,
            format!("{}", width - 1),
        )?;
        check("factor", &factors, &|l| l == width, format!("{width}"))?;
        check(
            "short",
            &short_words,
            &|l| (1..width).contains(&l),
            format!("1..{width}"),
        )?;
        Ok(SltSpec {
            width,
            alphabet,
            prefixes: canonical(prefixes),
            suffixes: canonical(suffixes),
            factors: canonical(factors),
            short_words: canonical(short_words),
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn prefixes(&self) -> &[Word] {
        &self.prefixes
    }

    pub fn suffixes(&self) -> &[Word] {
        &self.suffixes
    }

    pub fn factors(&self) -> &[Word] {
        &self.factors
    }

    pub fn short_words(&self) -> &[Word] {
        &self.short_words
    }

    pub fn has_prefix(&self, w: &[Symbol]) -> bool {
        self.prefixes
            .binary_search_by(|p| p.as_slice().cmp(w))
            .is_ok()
    }

    pub fn has_suffix(&self, w: &[Symbol]) -> bool {
        self.suffixes
            .binary_search_by(|p| p.as_slice().cmp(w))
            .is_ok()
    }

    pub fn has_factor(&self, w: &[Symbol]) -> bool {
        self.factors
            .binary_search_by(|p| p.as_slice().cmp(w))
            .is_ok()
    }

    pub fn has_short_word(&self, w: &[Symbol]) -> bool {
        self.short_words
            .binary_search_by(|p| p.as_slice().cmp(w))
            .is_ok()
    }

    /// Factors whose first `k-1` symbols equal `context`.
    fn factors_extending(&self, context: &[Symbol]) -> &[Word] {
        let lo = self
            .factors
            .partition_point(|f| &f[..self.width - 1] < context);
        let hi = self
            .factors
            .partition_point(|f| &f[..self.width - 1] <= context);
        &self.factors[lo..hi]
    }

    fn check_symbols(&self, x: &[Symbol]) -> Result<(), SltError> {
        match x.iter().find(|&&s| s as usize >= self.alphabet.len()) {
            Some(&s) => Err(SltError::UnknownSymbol(s)),
            None => Ok(()),
        }
    }

    /// Batch membership. Words shorter than the width go through the explicit
    /// short-word set; the empty word is rejected.
    pub fn contains(&self, x: &[Symbol]) -> Result<bool, SltError> {
        self.check_symbols(x)?;
        let k = self.width;
        if x.is_empty() {
            return Ok(false);
        }
        if x.len() < k {
            return Ok(self.has_short_word(x));
        }
        Ok(self.has_prefix(&x[..k - 1])
            && self.has_suffix(&x[x.len() - (k - 1)..])
            && x.windows(k).all(|f| self.has_factor(f)))
    }

    pub fn recognizer(&self) -> StreamRecognizer<'_> {
        StreamRecognizer::new(self)
    }

    /// Window-overlap automaton for the language.
    ///
    /// State 0 is initial. "Exact" states remember the whole input while it is
    /// shorter than `k`; "window" states remember the last `k-1` symbols once at
    /// least `k` symbols have been read.
    pub fn to_nfa(&self) -> Nfa {
        let k = self.width;
        let mut transitions = Vec::new();
        let mut finals = Vec::new();
        let mut next_id = 1usize;

        let mut live_prefixes: BTreeSet<&[Symbol]> = BTreeSet::new();
        for w in self.prefixes.iter().chain(&self.short_words) {
            for l in 1..=w.len() {
                live_prefixes.insert(&w[..l]);
            }
        }
        let mut exact: HashMap<&[Symbol], usize> = HashMap::new();
        for &u in &live_prefixes {
            exact.insert(u, next_id);
            next_id += 1;
        }
        for (&u, &id) in &exact {
            let parent = if u.len() == 1 {
                0
            } else {
                exact[&u[..u.len() - 1]]
            };
            transitions.push(Transition::new(parent, u[u.len() - 1], id));
            if self.has_short_word(u) {
                finals.push(id);
            }
        }

        let mut windows: HashMap<Word, usize> = HashMap::new();
        let mut queue: VecDeque<(Word, usize)> = VecDeque::new();
        let mut window_id =
            |ctx: &[Symbol], next_id: &mut usize, queue: &mut VecDeque<(Word, usize)>| {
                if let Some(&id) = windows.get(ctx) {
                    return id;
                }
                let id = *next_id;
                *next_id += 1;
                windows.insert(ctx.to_vec(), id);
                queue.push_back((ctx.to_vec(), id));
                id
            };
        for p in &self.prefixes {
            let from = exact[p.as_slice()];
            for f in self.factors_extending(p) {
                let to = window_id(&f[1..], &mut next_id, &mut queue);
                transitions.push(Transition::new(from, f[k - 1], to));
            }
        }
        while let Some((ctx, from)) = queue.pop_front() {
            if self.has_suffix(&ctx) {
                finals.push(from);
            }
            for f in self.factors_extending(&ctx) {
                let to = window_id(&f[1..], &mut next_id, &mut queue);
                transitions.push(Transition::new(from, f[k - 1], to));
            }
        }
        Nfa::new(self.alphabet.clone(), next_id, 0, finals, transitions)
            .expect("window automaton is well formed")
    }
}

/// Single-pass recognizer keeping only the last `k` symbols.
#[derive(Debug, Clone)]
pub struct StreamRecognizer<'a> {
    spec: &'a SltSpec,
    window: Vec<Symbol>,
    read: usize,
    prefix_ok: bool,
    factors_ok: bool,
    finished: bool,
}

impl<'a> StreamRecognizer<'a> {
    pub fn new(spec: &'a SltSpec) -> Self {
        StreamRecognizer {
            spec,
            window: Vec::with_capacity(spec.width),
            read: 0,
            prefix_ok: true,
            factors_ok: true,
            finished: false,
        }
    }

    pub fn feed(&mut self, symbol: Symbol) -> Result<(), SltError> {
        if self.finished {
            return Err(SltError::Finished);
        }
        if symbol as usize >= self.spec.alphabet.len() {
            return Err(SltError::UnknownSymbol(symbol));
        }
        let k = self.spec.width;
        if self.window.len() == k {
            self.window.remove(0);
        }
        self.window.push(symbol);
        self.read += 1;
        if self.read == k - 1 {
            self.prefix_ok = self.spec.has_prefix(&self.window);
        }
        if self.read >= k && self.factors_ok {
            self.factors_ok = self.spec.has_factor(&self.window);
        }
        Ok(())
    }

    pub fn finish(&mut self) -> Result<bool, SltError> {
        if self.finished {
            return Err(SltError::Finished);
        }
        self.finished = true;
        let k = self.spec.width;
        Ok(match self.read {
            0 => false,
            n if n < k => self.spec.has_short_word(&self.window),
            _ => {
                self.prefix_ok
                    && self.factors_ok
                    && self
                        .spec
                        .has_suffix(&self.window[self.window.len() - (k - 1)..])
            }
        })
    }

    pub fn reset(&mut self) {
        self.window.clear();
        self.read = 0;
        self.prefix_ok = true;
        self.factors_ok = true;
        self.finished = false;
    }
}

/// Tightest k-slt spec containing the sample.
pub fn infer_slt(alphabet: Vec<String>, sample: &[Word], k: usize) -> Result<SltSpec, SltError> {
    if k < 2 {
        return Err(SltError::Width(k));
    }
    let mut prefixes = Vec::new();
    let mut suffixes = Vec::new();
    let mut factors = Vec::new();
    let mut short_words = Vec::new();
    for w in sample.iter().filter(|w| !w.is_empty()) {
        if w.len() >= k - 1 {
            let win = window_ops(w, k - 1);
            prefixes.push(win.prefix);
            suffixes.push(win.suffix);
        }
        if w.len() < k {
            short_words.push(w.clone());
        }
        factors.extend(w.windows(k).map(<[Symbol]>::to_vec));
    }
    SltSpec::new(k, alphabet, prefixes, suffixes, factors, short_words)
}

/// Result of a bounded minimal-width search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinWidth {
    /// Smallest passing width, if any.
    pub width: Option<usize>,
    /// Word length up to which agreement was checked.
    pub horizon: usize,
    pub max_k: usize,
}

/// Smallest `k <= max_k` whose inferred spec agrees with `L(nfa)` on all words
/// of length at most `max_len`. This is a bounded test, not a proof.
pub fn min_slt_width(nfa: &Nfa, max_k: usize, max_len: usize) -> Result<MinWidth, SltError> {
    if max_k < 2 {
        return Err(SltError::InvalidArgument(format!(
            "max_k must be >= 2, got {max_k}"
        )));
    }
    if max_len < 3 * max_k {
        return Err(SltError::InvalidArgument(format!(
            "max_len ({max_len}) must be at least 3 * max_k ({})",
            3 * max_k
        )));
    }
    let sample = nfa.enumerate_language(max_len)?;
    for k in 2..=max_k {
        let spec = infer_slt(nfa.alphabet().to_vec(), &sample, k)?;
        let verdict = nfa_equivalent(&spec.to_nfa(), nfa, EquivalenceMode::Bounded(max_len))?;
        if verdict == Equivalence::Equivalent {
            return Ok(MinWidth {
                width: Some(k),
                horizon: max_len,
                max_k,
            });
        }
    }
    Ok(MinWidth {
        width: None,
        horizon: max_len,
        max_k,
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::automata::parse_nfa;

    fn w(s: &[u32]) -> Word {
        s.to_vec()
    }

    // a' = 0, a = 1, b' = 2, b = 3
    pub(crate) fn example_local() -> SltSpec {
        SltSpec::new(
            2,
            ["a'", "a", "b'", "b"].map(String::from).to_vec(),
            vec![w(&[0]), w(&[2])],
            vec![w(&[1]), w(&[3])],
            vec![w(&[0, 1]), w(&[2, 3]), w(&[1, 0]), w(&[3, 2])],
            vec![],
        )
        .unwrap()
    }

    // a = 0, b = 1
    pub(crate) fn l2_spec() -> SltSpec {
        SltSpec::new(
            3,
            vec!["a".into(), "b".into()],
            vec![w(&[0, 1])],
            vec![w(&[1, 1])],
            vec![w(&[1, 0, 1]), w(&[0, 1, 1]), w(&[1, 1, 0])],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn window_views() {
        let win = window_ops(&[0, 1, 2, 3], 2);
        assert_eq!(win.prefix, [0, 1]);
        assert_eq!(win.suffix, [2, 3]);
        assert_eq!(win.factors, vec![w(&[0, 1]), w(&[1, 2]), w(&[2, 3])]);
        let short = window_ops(&[0], 3);
        assert_eq!((short.prefix, short.suffix), (w(&[0]), w(&[0])));
        assert!(short.factors.is_empty());
        assert_eq!(
            window_ops(&[0, 1, 0, 1], 2).factors,
            vec![w(&[0, 1]), w(&[1, 0])]
        );
    }

    #[test]
    fn subwords() {
        assert_eq!(subword(&[0, 1, 2, 3, 4], 2, 4).unwrap(), [1, 2, 3]);
        assert_eq!(subword(&[0, 1, 2], 3, 2).unwrap(), Vec::<u32>::new());
        assert_eq!(subword(&[0, 1, 2], 1, 3).unwrap(), [0, 1, 2]);
        assert_eq!(
            subword(&[0, 1, 2], 0, 2),
            Err(SltError::PositionOutOfRange { pos: 0, len: 3 })
        );
        assert!(subword(&[0, 1, 2], 1, 4).is_err());
    }

    #[test]
    fn membership_examples() {
        let ex = example_local();
        assert!(ex.contains(&[0, 1, 0, 1]).unwrap());
        assert!(!ex.contains(&[0, 1, 2, 3]).unwrap());
        assert_eq!(ex.contains(&[9]), Err(SltError::UnknownSymbol(9)));
        let l2 = l2_spec();
        assert!(l2.contains(&[0, 1, 1, 0, 1, 1]).unwrap());
        assert!(!l2.contains(&[0, 1, 1, 1]).unwrap());
        assert!(!l2.contains(&[]).unwrap());
    }

    #[test]
    fn spec_validation() {
        let bad = SltSpec::new(3, vec!["a".into()], vec![w(&[0])], vec![], vec![], vec![]);
        assert!(matches!(
            bad,
            Err(SltError::WordLength { set: "prefix", .. })
        ));
        let bad = SltSpec::new(
            2,
            vec!["a".into()],
            vec![],
            vec![],
            vec![],
            vec![w(&[0, 0])],
        );
        assert!(matches!(
            bad,
            Err(SltError::WordLength { set: "short", .. })
        ));
        assert_eq!(
            SltSpec::new(1, vec!["a".into()], vec![], vec![], vec![], vec![]),
            Err(SltError::Width(1))
        );
    }

    #[test]
    fn stream_examples() {
        let ex = example_local();
        let mut r = ex.recognizer();
        for s in [0, 1, 0, 1] {
            r.feed(s).unwrap();
        }
        assert!(r.finish().unwrap());
        assert_eq!(r.feed(0), Err(SltError::Finished));
        r.reset();
        for s in [0, 1, 2] {
            r.feed(s).unwrap();
        }
        assert!(!r.finish().unwrap());

        let short =
            SltSpec::new(3, vec!["a".into()], vec![], vec![], vec![], vec![w(&[0])]).unwrap();
        let mut r = short.recognizer();
        r.feed(0).unwrap();
        assert!(r.finish().unwrap());
        r.reset();
        assert_eq!(r.feed(4), Err(SltError::UnknownSymbol(4)));
    }

    #[test]
    fn compiles_example_local() {
        let ex = example_local();
        let nfa = ex.to_nfa();
        let hand = parse_nfa(
            "alphabet a' a b' b\nstates 5\ninitial 0\nfinal 2 4\n\
             trans 0 a' 1\ntrans 1 a 2\ntrans 2 a' 1\ntrans 0 b' 3\ntrans 3 b 4\ntrans 4 b' 3\n",
        )
        .unwrap();
        assert!(nfa_equivalent(&nfa, &hand, EquivalenceMode::Exact)
            .unwrap()
            .is_equivalent());
    }

    #[test]
    fn compiles_empty_and_l2() {
        let empty = SltSpec::new(
            2,
            vec!["a".into()],
            vec![],
            vec![w(&[0])],
            vec![w(&[0, 0])],
            vec![],
        )
        .unwrap();
        assert!(empty.to_nfa().enumerate_language(6).unwrap().is_empty());
        let l2 = l2_spec().to_nfa();
        let abb = parse_nfa("alphabet a b\nstates 4\ninitial 0\nfinal 3\ntrans 0 a 1\ntrans 1 b 2\ntrans 2 b 3\ntrans 3 a 1\n").unwrap();
        assert_eq!(
            l2.enumerate_language(12).unwrap(),
            abb.enumerate_language(12).unwrap()
        );
    }

    #[test]
    fn inference() {
        let ab = vec!["a".to_string(), "b".to_string()];
        let spec = infer_slt(ab.clone(), &[w(&[0, 1]), w(&[0, 1, 0, 1])], 2).unwrap();
        assert_eq!(spec.prefixes(), [w(&[0])]);
        assert_eq!(spec.suffixes(), [w(&[1])]);
        assert_eq!(spec.factors(), [w(&[0, 1]), w(&[1, 0])]);
        let induced = spec.to_nfa().enumerate_language(8).unwrap();
        assert_eq!(
            induced,
            vec![
                w(&[0, 1]),
                w(&[0, 1, 0, 1]),
                w(&[0, 1, 0, 1, 0, 1]),
                w(&[0, 1, 0, 1, 0, 1, 0, 1])
            ]
        );

        let aa = infer_slt(ab.clone(), &[w(&[0, 0])], 3).unwrap();
        assert_eq!(aa.short_words(), [w(&[0, 0])]);
        assert_eq!(aa.prefixes(), [w(&[0, 0])]);
        assert_eq!(aa.suffixes(), [w(&[0, 0])]);
        assert!(aa.factors().is_empty());

        let abb = parse_nfa("alphabet a b\nstates 4\ninitial 0\nfinal 3\ntrans 0 a 1\ntrans 1 b 2\ntrans 2 b 3\ntrans 3 a 1\n").unwrap();
        let sample = abb.enumerate_language(9).unwrap();
        let inferred = infer_slt(ab, &sample, 3).unwrap();
        assert_eq!(inferred, l2_spec());
    }

    #[test]
    fn minimal_width() {
        let abb = parse_nfa("alphabet a b\nstates 4\ninitial 0\nfinal 3\ntrans 0 a 1\ntrans 1 b 2\ntrans 2 b 3\ntrans 3 a 1\n").unwrap();
        assert_eq!(min_slt_width(&abb, 6, 18).unwrap().width, Some(3));
        let aabb = parse_nfa(crate::automata::tests::AA_OR_BB).unwrap();
        let res = min_slt_width(&aabb, 8, 24).unwrap();
        assert_eq!(res.width, None);
        assert_eq!(res.horizon, 24);
        let a_plus = parse_nfa(crate::automata::tests::A_PLUS).unwrap();
        assert_eq!(min_slt_width(&a_plus, 2, 6).unwrap().width, Some(2));
        assert!(min_slt_width(&a_plus, 4, 6).is_err());
    }

    #[test]
    fn hierarchy_pair_is_indistinguishable() {
        for h in 2..=4usize {
            let short: Word = std::iter::once(0)
                .chain(std::iter::repeat_n(1, h))
                .collect();
            let long: Word = std::iter::once(0)
                .chain(std::iter::repeat_n(1, h + 1))
                .collect();
            let (a, b) = (window_ops(&short, h - 1), window_ops(&long, h - 1));
            assert_eq!((a.prefix, a.suffix), (b.prefix, b.suffix));
            assert_eq!(window_ops(&short, h).factors, window_ops(&long, h).factors);
        }
    }
}
