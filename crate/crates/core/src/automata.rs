// SPDX-License-Identifier: Apache-2.0

//! Nondeterministic finite automata over an indexed alphabet.
//!
//! States are integers `0..n`, letters are indices into the alphabet list given at
//! construction time. The alphabet order fixes every iteration and serialization
//! order, so all operations here are deterministic.
//!
//! Only ε-free languages are modelled: the initial state is never final and the
//! empty word is always rejected.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Index of a letter in an alphabet.
pub type Symbol = u32;

/// A word is a sequence of letter indices.
pub type Word = Vec<Symbol>;

/// Default bound on determinized states explored by exact equivalence.
pub const DEFAULT_STATE_CAP: usize = 1_000_000;

/// Default bound on the number of words produced by [`Nfa::enumerate_language`].
pub const DEFAULT_WORD_CAP: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NfaError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unknown letter `{letter}`")]
    UnknownLetterAt { line: usize, letter: String },
    #[error("unknown letter `{0}`")]
    UnknownLetter(String),
    #[error("letter index {0} is outside the alphabet")]
    LetterOutOfRange(Symbol),
    #[error("state {state} is out of range (machine has {num_states} states)")]
    StateOutOfRange { state: usize, num_states: usize },
    #[error("initial state cannot be final")]
    InitialIsFinal,
    #[error("alphabet must be nonempty")]
    EmptyAlphabet,
    #[error("duplicate letter `{0}` in alphabet")]
    DuplicateLetter(String),
    #[error("machine must have at least one state")]
    NoStates,
    #[error("missing `{0}` line")]
    Missing(&'static str),
    #[error("alphabets differ")]
    AlphabetMismatch,
    #[error("resource limit exceeded: more than {0} items")]
    ResourceLimit(usize),
    #[error("determinization cap of {0} states exceeded")]
    CapExceeded(usize),
    #[error("transitions ({0:?}) are not consecutive")]
    NotConsecutive(Transition),
}

/// A single transition `(from, letter, to)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub from: usize,
    pub letter: Symbol,
    pub to: usize,
}

impl Transition {
    pub fn new(from: usize, letter: Symbol, to: usize) -> Self {
        Transition { from, letter, to }
    }
}

/// An ε-free nondeterministic finite automaton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nfa {
    alphabet: Vec<String>,
    num_states: usize,
    initial: usize,
    finals: Vec<bool>,
    // sorted by (from, letter, to), no duplicates
    transitions: Vec<Transition>,
    // transitions[offsets[q]..offsets[q + 1]] leave state q
    offsets: Vec<usize>,
}

impl Nfa {
    /// Builds and validates a machine. Duplicate transitions are dropped.
    pub fn new(
        alphabet: Vec<String>,
        num_states: usize,
        initial: usize,
        finals: impl IntoIterator<Item = usize>,
        transitions: impl IntoIterator<Item = Transition>,
    ) -> Result<Self, NfaError> {
        if alphabet.is_empty() {
            return Err(NfaError::EmptyAlphabet);
        }
        for (i, letter) in alphabet.iter().enumerate() {
            if alphabet[..i].contains(letter) {
                return Err(NfaError::DuplicateLetter(letter.clone()));
            }
        }
        if num_states == 0 {
            return Err(NfaError::NoStates);
        }
        let check_state = |state: usize| {
            if state < num_states {
                Ok(())
            } else {
                Err(NfaError::StateOutOfRange { state, num_states })
            }
        };
        check_state(initial)?;
        let mut final_flags = vec![false; num_states];
        for q in finals {
            check_state(q)?;
            final_flags[q] = true;
        }
        if final_flags[initial] {
            return Err(NfaError::InitialIsFinal);
        }
        let mut transitions: Vec<Transition> = transitions.into_iter().collect();
        for t in &transitions {
            check_state(t.from)?;
            check_state(t.to)?;
            if t.letter as usize >= alphabet.len() {
                return Err(NfaError::LetterOutOfRange(t.letter));
            }
        }
        transitions.sort_unstable();
        transitions.dedup();
        let mut offsets = vec![0; num_states + 1];
        for t in &transitions {
            offsets[t.from + 1] += 1;
        }
        for q in 0..num_states {
            offsets[q + 1] += offsets[q];
        }
        Ok(Nfa {
            alphabet,
            num_states,
            initial,
            finals: final_flags,
            transitions,
            offsets,
        })
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet.len()
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_final(&self, q: usize) -> bool {
        self.finals[q]
    }

    pub fn finals(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_states).filter(|&q| self.finals[q])
    }

    /// All transitions in canonical `(from, letter, to)` order.
    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    /// Transitions leaving `q`, ordered by letter then target.
    pub fn outgoing(&self, q: usize) -> &[Transition] {
        &self.transitions[self.offsets[q]..self.offsets[q + 1]]
    }

    /// Targets of transitions `(q, letter, _)` in increasing order.
    pub fn successors(&self, q: usize, letter: Symbol) -> impl Iterator<Item = usize> + '_ {
        let out = self.outgoing(q);
        let lo = out.partition_point(|t| t.letter < letter);
        let hi = out.partition_point(|t| t.letter <= letter);
        out[lo..hi].iter().map(|t| t.to)
    }

    /// True when every (state, letter) pair has a successor.
    pub fn is_total(&self) -> bool {
        (0..self.num_states).all(|q| {
            let out = self.outgoing(q);
            (0..self.alphabet.len() as Symbol).all(|a| out.iter().any(|t| t.letter == a))
        })
    }

    pub fn letter_index(&self, letter: &str) -> Option<Symbol> {
        self.alphabet
            .iter()
            .position(|l| l == letter)
            .map(|i| i as Symbol)
    }

    /// Parses a word written either as `.`-separated letter tokens or, when
    /// there is no `.`, as a string of single-character letters.
    pub fn parse_word(&self, text: &str) -> Result<Word, NfaError> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Vec::new());
        }
        let lookup = |tok: &str| {
            self.letter_index(tok)
                .ok_or_else(|| NfaError::UnknownLetter(tok.to_string()))
        };
        if text.contains('.') || self.letter_index(text).is_some() {
            text.split('.').map(lookup).collect()
        } else {
            let mut buf = [0u8; 4];
            text.chars()
                .map(|c| lookup(c.encode_utf8(&mut buf)))
                .collect()
        }
    }

    /// Renders a word as `.`-separated letter tokens.
    pub fn render_word(&self, word: &[Symbol]) -> String {
        render_tokens(&self.alphabet, word)
    }

    fn check_word(&self, word: &[Symbol]) -> Result<(), NfaError> {
        match word.iter().find(|&&a| a as usize >= self.alphabet.len()) {
            Some(&a) => Err(NfaError::LetterOutOfRange(a)),
            None => Ok(()),
        }
    }

    /// Image of a sorted state set under one letter, sorted and deduplicated.
    pub fn step(&self, states: &[usize], letter: Symbol) -> Vec<usize> {
        let mut next: Vec<usize> = states
            .iter()
            .flat_map(|&q| self.successors(q, letter))
            .collect();
        next.sort_unstable();
        next.dedup();
        next
    }

    pub fn accepts(&self, word: &[Symbol]) -> Result<bool, NfaError> {
        self.check_word(word)?;
        if word.is_empty() {
            return Ok(false);
        }
        let mut current = vec![self.initial];
        for &a in word {
            current = self.step(&current, a);
            if current.is_empty() {
                return Ok(false);
            }
        }
        Ok(current.iter().any(|&q| self.finals[q]))
    }

    /// States from which some final state is reachable (finals included).
    pub fn coreachable(&self) -> Vec<bool> {
        let mut reverse: Vec<Vec<usize>> = vec![Vec::new(); self.num_states];
        for t in &self.transitions {
            reverse[t.to].push(t.from);
        }
        let mut seen = self.finals.clone();
        let mut queue: VecDeque<usize> = self.finals().collect();
        while let Some(q) = queue.pop_front() {
            for &p in &reverse[q] {
                if !seen[p] {
                    seen[p] = true;
                    queue.push_back(p);
                }
            }
        }
        seen
    }

    /// Returns a total machine with the same language. A single non-final sink
    /// with the highest index is added when needed; total inputs are returned
    /// unchanged.
    pub fn totalize(&self) -> Nfa {
        if self.is_total() {
            return self.clone();
        }
        let sink = self.num_states;
        let letters = self.alphabet.len() as Symbol;
        let mut transitions = self.transitions.clone();
        for q in 0..self.num_states {
            let out = self.outgoing(q);
            for a in 0..letters {
                if !out.iter().any(|t| t.letter == a) {
                    transitions.push(Transition::new(q, a, sink));
                }
            }
        }
        for a in 0..letters {
            transitions.push(Transition::new(sink, a, sink));
        }
        Nfa::new(
            self.alphabet.clone(),
            self.num_states + 1,
            self.initial,
            self.finals(),
            transitions,
        )
        .expect("totalization preserves validity")
    }

    /// Every accepted word of length `1..=max_len`, ordered by length then
    /// lexicographically by alphabet order.
    pub fn enumerate_language(&self, max_len: usize) -> Result<Vec<Word>, NfaError> {
        self.enumerate_language_capped(max_len, DEFAULT_WORD_CAP)
    }

    /// As [`Nfa::enumerate_language`]; `cap` bounds both the result and the
    /// per-length frontier of live prefixes.
    pub fn enumerate_language_capped(
        &self,
        max_len: usize,
        cap: usize,
    ) -> Result<Vec<Word>, NfaError> {
        let live = self.coreachable();
        let mut result = Vec::new();
        if !live[self.initial] {
            return Ok(result);
        }
        let mut frontier: Vec<(Word, Vec<usize>)> = vec![(Vec::new(), vec![self.initial])];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for (word, states) in &frontier {
                for a in 0..self.alphabet.len() as Symbol {
                    let mut succ = self.step(states, a);
                    succ.retain(|&q| live[q]);
                    if succ.is_empty() {
                        continue;
                    }
                    let mut w = word.clone();
                    w.push(a);
                    if succ.iter().any(|&q| self.finals[q]) {
                        result.push(w.clone());
                        if result.len() > cap {
                            return Err(NfaError::ResourceLimit(cap));
                        }
                    }
                    next.push((w, succ));
                }
            }
            if next.len() > cap {
                return Err(NfaError::ResourceLimit(cap));
            }
            frontier = next;
        }
        Ok(result)
    }

    /// All paths of exactly `length` transitions starting at `origin`, in
    /// canonical transition order. Length zero yields the single empty path.
    pub fn enumerate_paths(
        &self,
        origin: usize,
        length: usize,
        cap: usize,
    ) -> Result<Vec<Path>, NfaError> {
        if origin >= self.num_states {
            return Err(NfaError::StateOutOfRange {
                state: origin,
                num_states: self.num_states,
            });
        }
        let mut out = Vec::new();
        let mut stack = Vec::with_capacity(length);
        self.paths_rec(origin, length, cap, &mut stack, &mut out)?;
        Ok(out
            .into_iter()
            .map(|transitions| Path {
                origin,
                transitions,
            })
            .collect())
    }

    fn paths_rec(
        &self,
        state: usize,
        remaining: usize,
        cap: usize,
        stack: &mut Vec<Transition>,
        out: &mut Vec<Vec<Transition>>,
    ) -> Result<(), NfaError> {
        if remaining == 0 {
            if out.len() >= cap {
                return Err(NfaError::ResourceLimit(cap));
            }
            out.push(stack.clone());
            return Ok(());
        }
        for &t in self.outgoing(state) {
            stack.push(t);
            self.paths_rec(t.to, remaining - 1, cap, stack, out)?;
            stack.pop();
        }
        Ok(())
    }

    /// Finds a successful path labelled `word`, choosing at each step the first
    /// transition in canonical order that can still complete the word.
    pub fn find_successful_path(&self, word: &[Symbol]) -> Result<Option<Path>, NfaError> {
        self.check_word(word)?;
        if word.is_empty() {
            return Ok(None);
        }
        // alive[i][q]: the suffix word[i..] leads from q to a final state
        let mut alive = vec![vec![false; self.num_states]; word.len() + 1];
        alive[word.len()].clone_from(&self.finals);
        for i in (0..word.len()).rev() {
            for q in 0..self.num_states {
                alive[i][q] = self.successors(q, word[i]).any(|p| alive[i + 1][p]);
            }
        }
        if !alive[0][self.initial] {
            return Ok(None);
        }
        let mut state = self.initial;
        let mut transitions = Vec::with_capacity(word.len());
        for (i, &a) in word.iter().enumerate() {
            let to = self
                .successors(state, a)
                .find(|&p| alive[i + 1][p])
                .expect("alive state has a live successor");
            transitions.push(Transition::new(state, a, to));
            state = to;
        }
        Ok(Some(Path {
            origin: self.initial,
            transitions,
        }))
    }

    /// Same machine with every letter replaced through `map` into a new alphabet.
    pub fn relabel(&self, alphabet: Vec<String>, map: &[Symbol]) -> Result<Nfa, NfaError> {
        Nfa::new(
            alphabet,
            self.num_states,
            self.initial,
            self.finals(),
            self.transitions
                .iter()
                .map(|t| Transition::new(t.from, map[t.letter as usize], t.to)),
        )
    }

    /// Machine accepting exactly the given nonempty words (a trie).
    pub fn from_words(alphabet: Vec<String>, words: &[Word]) -> Result<Nfa, NfaError> {
        let mut children: HashMap<(usize, Symbol), usize> = HashMap::new();
        let mut finals = Vec::new();
        let mut transitions = Vec::new();
        let mut next_state = 1;
        for word in words {
            if word.is_empty() {
                continue;
            }
            let mut state = 0;
            for &a in word {
                state = *children.entry((state, a)).or_insert_with(|| {
                    transitions.push(Transition::new(state, a, next_state));
                    next_state += 1;
                    next_state - 1
                });
            }
            finals.push(state);
        }
        Nfa::new(alphabet, next_state, 0, finals, transitions)
    }

    /// Language union; both machines must share the alphabet. The result has
    /// a fresh initial state followed by the states of `self`, then `other`.
    pub fn union(&self, other: &Nfa) -> Result<Nfa, NfaError> {
        if self.alphabet != other.alphabet {
            return Err(NfaError::AlphabetMismatch);
        }
        let shift_a = 1;
        let shift_b = 1 + self.num_states;
        let mut transitions = Vec::with_capacity(self.transitions.len() + other.transitions.len());
        for (shift, m) in [(shift_a, self), (shift_b, other)] {
            for t in &m.transitions {
                transitions.push(Transition::new(t.from + shift, t.letter, t.to + shift));
                if t.from == m.initial {
                    transitions.push(Transition::new(0, t.letter, t.to + shift));
                }
            }
        }
        let finals = self
            .finals()
            .map(|q| q + shift_a)
            .chain(other.finals().map(|q| q + shift_b));
        Nfa::new(
            self.alphabet.clone(),
            1 + self.num_states + other.num_states,
            0,
            finals,
            transitions,
        )
    }
}

/// Outcome of a language comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Equivalence {
    Equivalent,
    /// Shortest (then alphabetically first) word accepted by exactly one side.
    Inequivalent {
        witness: Word,
    },
}

impl Equivalence {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Equivalence::Equivalent)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquivalenceMode {
    Exact,
    /// Compare words of length at most the given bound.
    Bounded(usize),
}

/// Decides `L(left) = L(right)` with the default determinization cap.
pub fn nfa_equivalent(
    left: &Nfa,
    right: &Nfa,
    mode: EquivalenceMode,
) -> Result<Equivalence, NfaError> {
    nfa_equivalent_capped(left, right, mode, DEFAULT_STATE_CAP)
}

/// Breadth-first exploration of the product of both subset constructions.
/// Bounded mode stops at the horizon; exact mode explores everything reachable
/// and fails with [`NfaError::CapExceeded`] past `cap` product states.
pub fn nfa_equivalent_capped(
    left: &Nfa,
    right: &Nfa,
    mode: EquivalenceMode,
    cap: usize,
) -> Result<Equivalence, NfaError> {
    if left.alphabet != right.alphabet {
        return Err(NfaError::AlphabetMismatch);
    }
    let horizon = match mode {
        EquivalenceMode::Exact => usize::MAX,
        EquivalenceMode::Bounded(n) => n,
    };
    let live_l = left.coreachable();
    let live_r = right.coreachable();
    let prune = |mut s: Vec<usize>, live: &[bool]| {
        s.retain(|&q| live[q]);
        s
    };
    type Key = (Vec<usize>, Vec<usize>);
    // node: (parent index, letter, depth)
    let mut nodes: Vec<(usize, Symbol, usize)> = Vec::new();
    let mut keys: Vec<Key> = Vec::new();
    let mut index: HashMap<Key, usize> = HashMap::new();
    let start = (
        prune(vec![left.initial], &live_l),
        prune(vec![right.initial], &live_r),
    );
    index.insert(start.clone(), 0);
    keys.push(start);
    nodes.push((usize::MAX, 0, 0));
    let mut head = 0;
    while head < keys.len() {
        let (parent_depth, current) = (nodes[head].2, head);
        head += 1;
        if parent_depth >= horizon {
            continue;
        }
        let (sl, sr) = keys[current].clone();
        if sl.is_empty() && sr.is_empty() {
            continue;
        }
        for a in 0..left.alphabet.len() as Symbol {
            let nl = prune(left.step(&sl, a), &live_l);
            let nr = prune(right.step(&sr, a), &live_r);
            let key = (nl, nr);
            if index.contains_key(&key) {
                continue;
            }
            let acc_l = key.0.iter().any(|&q| left.finals[q]);
            let acc_r = key.1.iter().any(|&q| right.finals[q]);
            nodes.push((current, a, parent_depth + 1));
            if acc_l != acc_r {
                let mut witness = Vec::new();
                let mut at = nodes.len() - 1;
                while at != 0 {
                    witness.push(nodes[at].1);
                    at = nodes[at].0;
                }
                witness.reverse();
                return Ok(Equivalence::Inequivalent { witness });
            }
            if keys.len() >= cap {
                return Err(NfaError::CapExceeded(cap));
            }
            index.insert(key.clone(), keys.len());
            keys.push(key);
        }
    }
    Ok(Equivalence::Equivalent)
}

/// A sequence of consecutive transitions anchored at an origin state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    origin: usize,
    transitions: Vec<Transition>,
}

impl Path {
    pub fn new(origin: usize, transitions: Vec<Transition>) -> Result<Self, NfaError> {
        let mut at = origin;
        for &t in &transitions {
            if t.from != at {
                return Err(NfaError::NotConsecutive(t));
            }
            at = t.to;
        }
        Ok(Path {
            origin,
            transitions,
        })
    }

    pub fn empty(origin: usize) -> Self {
        Path {
            origin,
            transitions: Vec::new(),
        }
    }

    pub fn origin(&self) -> usize {
        self.origin
    }

    pub fn end(&self) -> usize {
        self.transitions.last().map_or(self.origin, |t| t.to)
    }

    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn label(&self) -> Word {
        self.transitions.iter().map(|t| t.letter).collect()
    }

    /// State reached after `i` transitions.
    pub fn state_at(&self, i: usize) -> usize {
        if i == 0 {
            self.origin
        } else {
            self.transitions[i - 1].to
        }
    }

    pub fn is_successful(&self, nfa: &Nfa) -> bool {
        !self.is_empty() && self.origin == nfa.initial() && nfa.is_final(self.end())
    }

    /// Sub-path of transitions `range`.
    pub fn slice(&self, from: usize, to: usize) -> Path {
        Path {
            origin: self.state_at(from),
            transitions: self.transitions[from..to].to_vec(),
        }
    }

    pub fn concat(&self, other: &Path) -> Result<Path, NfaError> {
        let mut transitions = self.transitions.clone();
        transitions.extend_from_slice(&other.transitions);
        Path::new(self.origin, transitions)
    }
}

pub(crate) fn render_tokens(alphabet: &[String], word: &[Symbol]) -> String {
    word.iter()
        .map(|&a| quote_token(&alphabet[a as usize]))
        .collect::<Vec<_>>()
        .join(".")
}

/// Tokens containing whitespace, quotes, `.` or `#` are written in double quotes.
pub(crate) fn quote_token(tok: &str) -> String {
    if tok.is_empty()
        || tok
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, '"' | '.' | '#'))
    {
        format!("\"{}\"", tok.replace('\\', "\\\\").replace('"', "\\\""))
    } else {
        tok.to_string()
    }
}

/// Splits a line into whitespace-separated tokens, honouring double quotes.
/// Everything after an unquoted `#` is dropped.
pub(crate) fn tokenize(line: &str) -> Result<Vec<String>, String> {
    let mut tokens = Vec::new();
    let mut chars = line.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '#' {
            break;
        } else if c == '"' {
            chars.next();
            let mut tok = String::new();
            loop {
                match chars.next() {
                    Some('"') => break,
                    Some('\\') => match chars.next() {
                        Some(e) => tok.push(e),
                        None => return Err("unterminated escape".into()),
                    },
                    Some(ch) => tok.push(ch),
                    None => return Err("unterminated quoted token".into()),
                }
            }
            tokens.push(tok);
        } else {
            let mut tok = String::new();
            while let Some(&ch) = chars.peek() {
                if ch.is_whitespace() || ch == '#' {
                    break;
                }
                tok.push(ch);
                chars.next();
            }
            tokens.push(tok);
        }
    }
    Ok(tokens)
}

impl FromStr for Nfa {
    type Err = NfaError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        parse_nfa(text)
    }
}

/// Parses the line-oriented NFA format:
///
/// ```text
/// alphabet a b
/// states 3
/// initial 0
/// final 2
/// trans 0 a 1
/// ```
pub fn parse_nfa(text: &str) -> Result<Nfa, NfaError> {
    let mut alphabet: Option<Vec<String>> = None;
    let mut num_states: Option<usize> = None;
    let mut initial: Option<(usize, usize)> = None;
    let mut finals: Vec<(usize, usize)> = Vec::new();
    let mut transitions: Vec<(usize, usize, String, usize)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let syntax = |msg: String| NfaError::Syntax { line, msg };
        let tokens = tokenize(raw).map_err(syntax)?;
        let Some((keyword, args)) = tokens.split_first() else {
            continue;
        };
        let number = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| syntax(format!("expected a number, found `{s}`")))
        };
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(syntax(format!("`{keyword}` takes {n} argument(s)")))
            }
        };
        match keyword.as_str() {
            "alphabet" => {
                if alphabet.is_some() {
                    return Err(syntax("duplicate `alphabet` line".into()));
                }
                alphabet = Some(args.to_vec());
            }
            "states" => {
                arity(1)?;
                if num_states.is_some() {
                    return Err(syntax("duplicate `states` line".into()));
                }
                num_states = Some(number(&args[0])?);
            }
            "initial" => {
                arity(1)?;
                if initial.is_some() {
                    return Err(syntax("duplicate `initial` line".into()));
                }
                initial = Some((line, number(&args[0])?));
            }
            "final" => {
                if args.is_empty() {
                    return Err(syntax("`final` needs at least one state".into()));
                }
                for a in args {
                    finals.push((line, number(a)?));
                }
            }
            "trans" => {
                arity(3)?;
                transitions.push((line, number(&args[0])?, args[1].clone(), number(&args[2])?));
            }
            other => return Err(syntax(format!("unknown keyword `{other}`"))),
        }
    }

    let alphabet = alphabet.ok_or(NfaError::Missing("alphabet"))?;
    let num_states = num_states.ok_or(NfaError::Missing("states"))?;
    let (_, initial) = initial.ok_or(NfaError::Missing("initial"))?;
    let mut resolved = Vec::with_capacity(transitions.len());
    for (line, from, letter, to) in transitions {
        let Some(a) = alphabet.iter().position(|l| *l == letter) else {
            return Err(NfaError::UnknownLetterAt { line, letter });
        };
        resolved.push(Transition::new(from, a as Symbol, to));
    }
    Nfa::new(
        alphabet,
        num_states,
        initial,
        finals.into_iter().map(|(_, q)| q),
        resolved,
    )
}

impl fmt::Display for Nfa {
    /// Canonical serialization in the input format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letters: Vec<String> = self.alphabet.iter().map(|l| quote_token(l)).collect();
        writeln!(f, "alphabet {}", letters.join(" "))?;
        writeln!(f, "states {}", self.num_states)?;
        writeln!(f, "initial {}", self.initial)?;
        for q in self.finals() {
            writeln!(f, "final {q}")?;
        }
        for t in &self.transitions {
            writeln!(
                f,
                "trans {} {} {}",
                t.from, letters[t.letter as usize], t.to
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) const A_PLUS: &str =
        "alphabet a\nstates 2\ninitial 0\nfinal 1\ntrans 0 a 1\ntrans 1 a 1\n";

    pub(crate) const AA_OR_BB: &str = "\
alphabet a b
states 5
initial 0
final 2 4
trans 0 a 1
trans 1 a 2
trans 2 a 1
trans 0 b 3
trans 3 b 4
trans 4 b 3
";

    fn word(nfa: &Nfa, s: &str) -> Word {
        nfa.parse_word(s).unwrap()
    }

    #[test]
    fn parses_a_plus() {
        let nfa = parse_nfa(A_PLUS).unwrap();
        assert_eq!(nfa.num_states(), 2);
        assert_eq!(nfa.alphabet(), ["a"]);
        assert_eq!(nfa.transitions().len(), 2);
        assert!(nfa.is_final(1));
        assert!(nfa.is_total());
        // canonical text parses back to the same machine
        assert_eq!(parse_nfa(&nfa.to_string()).unwrap(), nfa);
    }

    #[test]
    fn rejects_final_initial() {
        let err = parse_nfa("alphabet a\nstates 1\ninitial 0\nfinal 0\n").unwrap_err();
        assert_eq!(err, NfaError::InitialIsFinal);
        assert_eq!(err.to_string(), "initial state cannot be final");
    }

    #[test]
    fn rejects_unknown_letter() {
        let err =
            parse_nfa("alphabet a b\nstates 2\ninitial 0\nfinal 1\ntrans 0 c 1\n").unwrap_err();
        assert!(matches!(err, NfaError::UnknownLetterAt { line: 5, .. }));
        assert!(err.to_string().contains("unknown letter"));
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let err = parse_nfa("alphabet a\n# comment\nstates two\n").unwrap_err();
        assert!(matches!(err, NfaError::Syntax { line: 3, .. }));
        let err = parse_nfa("alphabet a\nstates 2\ninitial 0\ntrans 0 a 5\n").unwrap_err();
        assert!(matches!(err, NfaError::StateOutOfRange { state: 5, .. }));
    }

    #[test]
    fn quoted_letters_and_duplicates() {
        let nfa = parse_nfa(
            "alphabet \"a'\" b # comment\nstates 2\ninitial 0\nfinal 1\ntrans 0 \"a'\" 1\ntrans 0 \"a'\" 1\n",
        )
        .unwrap();
        assert_eq!(nfa.alphabet(), ["a'", "b"]);
        assert_eq!(nfa.transitions().len(), 1);
    }

    #[test]
    fn totalize_adds_one_sink() {
        let nfa = parse_nfa(
            "alphabet a b\nstates 2\ninitial 0\nfinal 1\ntrans 0 a 1\ntrans 0 b 1\ntrans 1 a 1\n",
        )
        .unwrap();
        let total = nfa.totalize();
        assert_eq!(total.num_states(), 3);
        assert!(total.is_total());
        let added: Vec<_> = total
            .transitions()
            .iter()
            .filter(|t| !nfa.transitions().contains(t))
            .copied()
            .collect();
        assert_eq!(
            added,
            vec![
                Transition::new(1, 1, 2),
                Transition::new(2, 0, 2),
                Transition::new(2, 1, 2)
            ]
        );
        assert_eq!(total.totalize(), total);
    }

    #[test]
    fn totalize_degenerate_single_state() {
        let nfa = parse_nfa("alphabet a b\nstates 1\ninitial 0\n").unwrap();
        let total = nfa.totalize();
        assert_eq!(total.num_states(), 2);
        assert!(total.transitions().iter().all(|t| t.to == 1));
        assert_eq!(total.transitions().len(), 4);
    }

    #[test]
    fn acceptance() {
        let a_plus = parse_nfa(A_PLUS).unwrap();
        assert!(a_plus.accepts(&word(&a_plus, "aaa")).unwrap());
        assert!(!a_plus.accepts(&[]).unwrap());
        let aabb = parse_nfa(AA_OR_BB).unwrap();
        assert!(!aabb.accepts(&word(&aabb, "aab")).unwrap());
        assert!(aabb.accepts(&word(&aabb, "bbbb")).unwrap());
        assert_eq!(aabb.accepts(&[7]), Err(NfaError::LetterOutOfRange(7)));
        assert!(aabb.parse_word("abc").is_err());
    }

    #[test]
    fn enumerate_small_languages() {
        let a_plus = parse_nfa(A_PLUS).unwrap();
        assert_eq!(
            a_plus.enumerate_language(3).unwrap(),
            vec![vec![0], vec![0, 0], vec![0, 0, 0]]
        );
        let aabb = parse_nfa(AA_OR_BB).unwrap();
        let words: Vec<String> = aabb
            .enumerate_language(4)
            .unwrap()
            .iter()
            .map(|w| aabb.render_word(w))
            .collect();
        assert_eq!(words, ["a.a", "b.b", "a.a.a.a", "b.b.b.b"]);
        let empty = parse_nfa("alphabet a\nstates 2\ninitial 0\ntrans 0 a 1\n").unwrap();
        assert!(empty.enumerate_language(5).unwrap().is_empty());
        assert_eq!(
            a_plus.enumerate_language_capped(10, 3),
            Err(NfaError::ResourceLimit(3))
        );
    }

    #[test]
    fn equivalence_checks() {
        let a_plus = parse_nfa(A_PLUS).unwrap();
        let padded = parse_nfa(
            "alphabet a\nstates 3\ninitial 0\nfinal 1\ntrans 0 a 1\ntrans 1 a 1\ntrans 2 a 2\n",
        )
        .unwrap();
        assert!(nfa_equivalent(&a_plus, &padded, EquivalenceMode::Exact)
            .unwrap()
            .is_equivalent());
        let aa = parse_nfa(
            "alphabet a\nstates 3\ninitial 0\nfinal 2\ntrans 0 a 1\ntrans 1 a 2\ntrans 2 a 1\n",
        )
        .unwrap();
        assert_eq!(
            nfa_equivalent(&a_plus, &aa, EquivalenceMode::Exact).unwrap(),
            Equivalence::Inequivalent { witness: vec![0] }
        );
        // two 3-state machines for (ab)+
        let ab1 = parse_nfa(
            "alphabet a b\nstates 3\ninitial 0\nfinal 2\ntrans 0 a 1\ntrans 1 b 2\ntrans 2 a 1\n",
        )
        .unwrap();
        let ab2 = parse_nfa("alphabet a b\nstates 3\ninitial 0\nfinal 2\ntrans 0 a 1\ntrans 1 b 2\ntrans 2 a 1\ntrans 1 b 0\ntrans 0 b 2\ntrans 2 b 2\n").unwrap();
        // ab2 accepts "b"; check the brute-force and exact routes agree
        let exact = nfa_equivalent(&ab1, &ab2, EquivalenceMode::Exact).unwrap();
        assert_eq!(exact, Equivalence::Inequivalent { witness: vec![1] });
        let ab3 = parse_nfa("alphabet a b\nstates 3\ninitial 0\nfinal 2\ntrans 0 a 1\ntrans 1 b 2\ntrans 2 a 1\ntrans 1 b 0\n").unwrap();
        assert_eq!(
            ab1.enumerate_language(8).unwrap(),
            ab3.enumerate_language(8).unwrap()
        );
        assert!(nfa_equivalent(&ab1, &ab3, EquivalenceMode::Exact)
            .unwrap()
            .is_equivalent());
        assert!(nfa_equivalent(&a_plus, &aa, EquivalenceMode::Bounded(0))
            .unwrap()
            .is_equivalent());
    }

    #[test]
    fn exact_mode_cap() {
        let a_plus = parse_nfa(A_PLUS).unwrap();
        let aabb = parse_nfa(AA_OR_BB).unwrap();
        assert_eq!(
            nfa_equivalent_capped(
                &aabb,
                &aabb.union(&aabb).unwrap(),
                EquivalenceMode::Exact,
                2
            ),
            Err(NfaError::CapExceeded(2))
        );
        assert_eq!(
            nfa_equivalent(&a_plus, &aabb, EquivalenceMode::Exact),
            Err(NfaError::AlphabetMismatch)
        );
    }

    #[test]
    fn paths() {
        let a_plus = parse_nfa(A_PLUS).unwrap();
        let paths = a_plus.enumerate_paths(0, 2, 100).unwrap();
        assert_eq!(paths.len(), 1);
        assert_eq!(
            paths[0].transitions(),
            [Transition::new(0, 0, 1), Transition::new(1, 0, 1)]
        );
        let zero = a_plus.enumerate_paths(1, 0, 100).unwrap();
        assert_eq!(zero, vec![Path::empty(1)]);
        let total = parse_nfa("alphabet a\nstates 2\ninitial 0\nfinal 1\ntrans 0 a 1\n")
            .unwrap()
            .totalize();
        let sink = total.num_states() - 1;
        let loops = total.enumerate_paths(sink, 1, 10).unwrap();
        assert_eq!(loops[0].transitions(), [Transition::new(sink, 0, sink)]);
        assert!(Path::new(0, vec![Transition::new(0, 0, 1), Transition::new(0, 0, 1)]).is_err());
    }

    #[test]
    fn successful_path_search() {
        let aabb = parse_nfa(AA_OR_BB).unwrap();
        let w = word(&aabb, "aaaa");
        let path = aabb.find_successful_path(&w).unwrap().unwrap();
        assert!(path.is_successful(&aabb));
        assert_eq!(path.label(), w);
        assert!(aabb
            .find_successful_path(&word(&aabb, "aaa"))
            .unwrap()
            .is_none());
    }

    #[test]
    fn union_and_trie() {
        let a_plus = parse_nfa(A_PLUS).unwrap();
        let trie = Nfa::from_words(vec!["a".into()], &[vec![0, 0, 0], vec![0]]).unwrap();
        assert_eq!(
            trie.enumerate_language(5).unwrap(),
            vec![vec![0], vec![0, 0, 0]]
        );
        let u = trie.union(&a_plus).unwrap();
        assert_eq!(
            u.enumerate_language(4).unwrap(),
            a_plus.enumerate_language(4).unwrap()
        );
    }
}
