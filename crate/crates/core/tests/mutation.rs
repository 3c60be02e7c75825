// SPDX-License-Identifier: Apache-2.0

mod common;

use sltmorph::automata::{nfa_equivalent, Equivalence, EquivalenceMode, Nfa, Word};
use sltmorph::construction::{medvedev_main, medvedev_width2, Decomposition};
use sltmorph::format::serialize;
use sltmorph::slt::SltSpec;
use sltmorph::verification::{
    find_preimage, image_contains, image_nfa, run_corpus, verify_decomposition, CorpusConfig,
    CounterexampleKind, VerificationReport, VerifyMode,
};

fn smallest() -> Nfa {
    common::machine("aplus")
}

fn rebuilt(dec: &Decomposition, sets: [Vec<Word>; 4]) -> Decomposition {
    let slt = dec.slt();
    let [prefixes, suffixes, factors, short] = sets;
    dec.with_slt(
        SltSpec::new(
            slt.width(),
            slt.alphabet().to_vec(),
            prefixes,
            suffixes,
            factors,
            short,
        )
        .unwrap(),
    )
}

fn sets(dec: &Decomposition) -> [Vec<Word>; 4] {
    let slt = dec.slt();
    [
        slt.prefixes().to_vec(),
        slt.suffixes().to_vec(),
        slt.factors().to_vec(),
        slt.short_words().to_vec(),
    ]
}

/// Every counterexample replays against the machine and the decomposition.
fn assert_sound(nfa: &Nfa, dec: &Decomposition, report: &VerificationReport) {
    assert!(report.passed || !report.counterexamples.is_empty());
    for c in &report.counterexamples {
        match c.kind {
            CounterexampleKind::Missing => {
                assert!(nfa.accepts(&c.source).unwrap());
                assert!(!image_contains(dec, &c.source));
                if let Some(z) = &c.local {
                    assert_eq!(dec.pi().apply_word(z), c.source);
                    assert!(!dec.slt().contains(z).unwrap());
                }
            }
            CounterexampleKind::Extra => {
                assert!(!nfa.accepts(&c.source).unwrap());
                let z = c.local.as_ref().expect("extra words carry a preimage");
                assert!(dec.slt().contains(z).unwrap());
                assert_eq!(dec.pi().apply_word(z), c.source);
            }
        }
    }
}

fn unchanged(original: &Decomposition, mutated: &Decomposition) -> bool {
    nfa_equivalent(
        &image_nfa(original).unwrap(),
        &image_nfa(mutated).unwrap(),
        EquivalenceMode::Exact,
    )
    .unwrap()
        == Equivalence::Equivalent
}

fn check_deletions(nfa: &Nfa, dec: &Decomposition) -> usize {
    let mut detected = 0;
    for set in 0..3 {
        for i in 0..sets(dec)[set].len() {
            let mut s = sets(dec);
            s[set].remove(i);
            let mutated = rebuilt(dec, s);
            let report = verify_decomposition(nfa, &mutated, VerifyMode::Bounded(None)).unwrap();
            assert_sound(nfa, &mutated, &report);
            if report.passed {
                assert!(
                    unchanged(dec, &mutated),
                    "silent drift after removing element {i} of set {set}"
                );
            } else {
                detected += 1;
            }
        }
    }
    detected
}

#[test]
fn single_deletions_never_drift_silently() {
    let nfa = smallest();
    let main = medvedev_main(&nfa, 2).unwrap();
    assert!(check_deletions(&nfa, &main) > 0);
    let width2 = medvedev_width2(&nfa).unwrap();
    assert!(check_deletions(&nfa, &width2) > 0);
}

#[test]
fn added_factors_yield_confirmed_extra_words() {
    // a+ over a single letter is universal, so nothing can be extra
    for (name, nfa) in common::corpus()
        .into_iter()
        .filter(|(name, _)| name != "aplus")
    {
        let dec = medvedev_width2(&nfa).unwrap();
        let symbols = dec.slt().alphabet().len() as u32;
        let mut extra_found = false;
        for x in 0..symbols {
            for y in 0..symbols {
                if dec.slt().has_factor(&[x, y]) {
                    continue;
                }
                let mut s = sets(&dec);
                s[2].push(vec![x, y]);
                let mutated = rebuilt(&dec, s);
                let report = verify_decomposition(&nfa, &mutated, VerifyMode::Exact).unwrap();
                assert_sound(&nfa, &mutated, &report);
                extra_found |= report
                    .counterexamples
                    .iter()
                    .any(|c| c.kind == CounterexampleKind::Extra);
                if report.passed {
                    assert!(unchanged(&dec, &mutated), "{name}: silent drift");
                }
            }
        }
        assert!(extra_found, "{name}: no added factor was observable");
    }
}

#[test]
fn preimage_search_matches_membership() {
    let nfa = smallest();
    let dec = medvedev_main(&nfa, 2).unwrap();
    let image = image_nfa(&dec).unwrap();
    for len in 1..=16 {
        let w = vec![0; len];
        let found = find_preimage(&dec, &w);
        if let Some(z) = &found {
            assert!(dec.slt().contains(z).unwrap());
        }
        assert_eq!(image_contains(&dec, &w), image.accepts(&w).unwrap());
    }
}

#[test]
fn corrupted_fixture_is_the_only_failure() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["aplus.nfa", "abplus.nfa"] {
        std::fs::copy(common::corpus_dir().join(name), dir.path().join(name)).unwrap();
    }
    let nfa = smallest();
    let dec = medvedev_main(&nfa, 2).unwrap();
    let mut s = sets(&dec);
    s[2].remove(0);
    std::fs::write(dir.path().join("aplus.dec"), serialize(&rebuilt(&dec, s))).unwrap();
    std::fs::write(
        dir.path().join("abplus.dec"),
        serialize(&medvedev_width2(&common::machine("abplus")).unwrap()),
    )
    .unwrap();

    let mut config = CorpusConfig::new(dir.path());
    config.ratios = vec![2];
    let report = run_corpus(&config).unwrap();
    assert_eq!(report.entries.len(), 2);
    assert_eq!(report.failures(), 1);
    let failed: Vec<_> = report
        .entries
        .iter()
        .flat_map(|e| e.checks.iter().map(move |c| (e.file.as_str(), c)))
        .filter(|(_, c)| !c.passed)
        .map(|(f, c)| (f, c.name.as_str()))
        .collect();
    assert_eq!(failed, [("aplus.nfa", "fixture")]);
}

#[test]
fn unreadable_file_is_reported_per_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(
        common::corpus_dir().join("aplus.nfa"),
        dir.path().join("aplus.nfa"),
    )
    .unwrap();
    std::fs::write(dir.path().join("broken.nfa"), "alphabet a\nstates two\n").unwrap();
    let mut config = CorpusConfig::new(dir.path());
    config.jobs = 2;
    let report = run_corpus(&config).unwrap();
    assert_eq!(report.entries.len(), 2);
    assert!(report.entries[0].passed());
    assert_eq!(report.entries[1].file, "broken.nfa");
    assert_eq!(report.entries[1].checks[0].name, "parse");
    assert_eq!(report.failures(), 1);
}

#[test]
fn parallel_run_matches_sequential() {
    let mut config = CorpusConfig::new(common::corpus_dir());
    config.ratios = vec![2];
    let sequential = run_corpus(&config).unwrap().summary();
    config.jobs = 4;
    assert_eq!(run_corpus(&config).unwrap().summary(), sequential);
}
