// SPDX-License-Identifier: Apache-2.0

#![allow(dead_code)]

use std::path::PathBuf;

use rand::Rng;
use sltmorph::automata::{parse_nfa, Nfa, Symbol, Word};

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/corpus")
}

/// Bundled corpus machines, totalized, sorted by file name.
pub fn corpus() -> Vec<(String, Nfa)> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "nfa"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            let nfa = parse_nfa(&std::fs::read_to_string(&p).unwrap()).unwrap();
            (name, nfa.totalize())
        })
        .collect()
}

/// Uniformly random word of length `len` over `letters` symbols.
pub fn random_word(rng: &mut impl Rng, letters: usize, len: usize) -> Word {
    (0..len)
        .map(|_| rng.gen_range(0..letters) as Symbol)
        .collect()
}

/// Random member of `L(nfa)` with length in `min_len..min_len + spread`, found
/// by a random walk restricted to states that can still finish on time.
pub fn random_member(rng: &mut impl Rng, nfa: &Nfa, min_len: usize, spread: usize) -> Option<Word> {
    for _ in 0..64 {
        let len = min_len + rng.gen_range(0..spread.max(1));
        let mut alive = vec![vec![false; nfa.num_states()]; len + 1];
        for q in nfa.finals() {
            alive[len][q] = true;
        }
        for i in (0..len).rev() {
            for t in nfa.transitions() {
                if alive[i + 1][t.to] {
                    alive[i][t.from] = true;
                }
            }
        }
        if !alive[0][nfa.initial()] {
            continue;
        }
        let mut q = nfa.initial();
        let mut word = Vec::with_capacity(len);
        for i in 0..len {
            let options: Vec<_> = nfa
                .outgoing(q)
                .iter()
                .filter(|t| alive[i + 1][t.to])
                .collect();
            let t = options[rng.gen_range(0..options.len())];
            word.push(t.letter);
            q = t.to;
        }
        return Some(word);
    }
    None
}

/// Corpus machine by file stem.
pub fn machine(name: &str) -> Nfa {
    corpus()
        .into_iter()
        .find(|(n, _)| n == name)
        .unwrap_or_else(|| panic!("no corpus machine {name}"))
        .1
}
