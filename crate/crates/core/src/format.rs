// SPDX-License-Identifier: Apache-2.0

//! Text serialization of decompositions.
//!
//! ```text
//! kind main
//! h 2
//! m 4
//! k 8
//! source 3f2a...
//! alphabet a b
//! symbol a|0 -> a
//! ...
//! I
//! a|0.a|1.a|0
//! T
//! F
//! SHORT
//! RESIDUAL
//! a.a
//! ```
//!
//! Sets are written in canonical order, so parsing and re-serializing a file is
//! byte-identical.

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::automata::{quote_token, render_tokens, tokenize, Symbol, Word};
use crate::construction::{ConstructionError, Decomposition, DecompositionKind, Homomorphism};
use crate::slt::SltSpec;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing `{0}`")]
    Missing(&'static str),
    #[error(transparent)]
    Invalid(#[from] ConstructionError),
}

impl fmt::Display for Decomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize(self))
    }
}

pub fn serialize(dec: &Decomposition) -> String {
    let mut out = String::new();
    let slt = dec.slt();
    let _ = writeln!(out, "kind {}", dec.kind().name());
    let _ = writeln!(out, "h {}", dec.h());
    let _ = writeln!(out, "m {}", dec.m());
    let _ = writeln!(out, "k {}", slt.width());
    let _ = writeln!(out, "source {}", dec.fingerprint());
    let letters: Vec<String> = dec
        .source_alphabet()
        .iter()
        .map(|l| quote_token(l))
        .collect();
    let _ = writeln!(out, "alphabet {}", letters.join(" "));
    for (b, tok) in slt.alphabet().iter().enumerate() {
        let _ = writeln!(
            out,
            "symbol {} -> {}",
            quote_token(tok),
            letters[dec.pi().apply(b as Symbol) as usize]
        );
    }
    let sections: [(&str, &[Word], &[String]); 5] = [
        ("I", slt.prefixes(), slt.alphabet()),
        ("T", slt.suffixes(), slt.alphabet()),
        ("F", slt.factors(), slt.alphabet()),
        ("SHORT", slt.short_words(), slt.alphabet()),
        ("RESIDUAL", dec.residual(), dec.source_alphabet()),
    ];
    for (name, words, alphabet) in sections {
        out.push_str(name);
        out.push('\n');
        for w in words {
            out.push_str(&render_tokens(alphabet, w));
            out.push('\n');
        }
    }
    out
}

fn parse_kind(s: &str) -> Option<DecompositionKind> {
    match s {
        "main" => Some(DecompositionKind::Main),
        "width2" => Some(DecompositionKind::Width2),
        _ => None,
    }
}

/// Splits a `.`-separated word, honouring quoted tokens.
pub(crate) fn split_word(text: &str) -> Result<Vec<String>, String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut chars = text.chars();
    let mut quoted = false;
    while let Some(c) = chars.next() {
        match c {
            '"' => quoted = !quoted,
            '\\' if quoted => current.push(chars.next().ok_or("dangling escape")?),
            '.' if !quoted => tokens.push(std::mem::take(&mut current)),
            c => current.push(c),
        }
    }
    if quoted {
        return Err("unterminated quoted token".into());
    }
    tokens.push(current);
    Ok(tokens)
}

pub fn parse_decomposition(text: &str) -> Result<Decomposition, FormatError> {
    let mut kind = None;
    let mut h = None;
    let mut m = None;
    let mut k = None;
    let mut source = None;
    let mut source_alphabet: Option<Vec<String>> = None;
    let mut local_alphabet: Vec<String> = Vec::new();
    let mut image: Vec<Symbol> = Vec::new();
    let mut sets: HashMap<&'static str, Vec<Word>> = HashMap::new();
    let mut section: Option<&'static str> = None;
    let mut local_index: HashMap<String, Symbol> = HashMap::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let syntax = |msg: String| FormatError::Syntax { line, msg };
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let header = match trimmed {
            "I" => Some("I"),
            "T" => Some("T"),
            "F" => Some("F"),
            "SHORT" => Some("SHORT"),
            "RESIDUAL" => Some("RESIDUAL"),
            _ => None,
        };
        if let Some(name) = header {
            if sets.contains_key(name) {
                return Err(syntax(format!("duplicate section `{name}`")));
            }
            sets.insert(name, Vec::new());
            section = Some(name);
            continue;
        }
        if let Some(name) = section {
            let tokens = split_word(trimmed).map_err(syntax)?;
            let word: Result<Word, _> = if name == "RESIDUAL" {
                let letters = source_alphabet
                    .as_ref()
                    .ok_or(FormatError::Missing("alphabet"))?;
                tokens
                    .iter()
                    .map(|t| {
                        letters
                            .iter()
                            .position(|l| l == t)
                            .map(|p| p as Symbol)
                            .ok_or_else(|| syntax(format!("unknown letter `{t}`")))
                    })
                    .collect()
            } else {
                tokens
                    .iter()
                    .map(|t| {
                        local_index
                            .get(t)
                            .copied()
                            .ok_or_else(|| syntax(format!("unknown symbol `{t}`")))
                    })
                    .collect()
            };
            sets.get_mut(name).expect("section exists").push(word?);
            continue;
        }
        let tokens = tokenize(raw).map_err(syntax)?;
        let number = |s: Option<&String>| -> Result<u64, FormatError> {
            s.and_then(|s| s.parse().ok())
                .ok_or_else(|| syntax("expected a number".into()))
        };
        match tokens[0].as_str() {
            "kind" => {
                kind = Some(
                    tokens
                        .get(1)
                        .and_then(|s| parse_kind(s))
                        .ok_or_else(|| syntax("expected `main` or `width2`".into()))?,
                )
            }
            "h" => h = Some(number(tokens.get(1))?),
            "m" => m = Some(number(tokens.get(1))? as usize),
            "k" => k = Some(number(tokens.get(1))? as usize),
            "source" => {
                source = Some(
                    tokens
                        .get(1)
                        .cloned()
                        .ok_or_else(|| syntax("expected a fingerprint".into()))?,
                )
            }
            "alphabet" => source_alphabet = Some(tokens[1..].to_vec()),
            "symbol" => {
                if tokens.len() != 4 || tokens[2] != "->" {
                    return Err(syntax("expected `symbol <tok> -> <letter>`".into()));
                }
                let letters = source_alphabet
                    .as_ref()
                    .ok_or(FormatError::Missing("alphabet"))?;
                let a = letters
                    .iter()
                    .position(|l| *l == tokens[3])
                    .ok_or_else(|| syntax(format!("unknown letter `{}`", tokens[3])))?;
                if local_index
                    .insert(tokens[1].clone(), local_alphabet.len() as Symbol)
                    .is_some()
                {
                    return Err(syntax(format!("duplicate symbol `{}`", tokens[1])));
                }
                local_alphabet.push(tokens[1].clone());
                image.push(a as Symbol);
            }
            other => return Err(syntax(format!("unknown keyword `{other}`"))),
        }
    }

    let mut take = |name: &'static str| sets.remove(name).unwrap_or_default();
    let slt = SltSpec::new(
        k.ok_or(FormatError::Missing("k"))?,
        local_alphabet,
        take("I"),
        take("T"),
        take("F"),
        take("SHORT"),
    )
    .map_err(ConstructionError::from)?;
    let residual = take("RESIDUAL");
    Ok(Decomposition::new(
        kind.ok_or(FormatError::Missing("kind"))?,
        h.ok_or(FormatError::Missing("h"))?,
        m.ok_or(FormatError::Missing("m"))?,
        source_alphabet.ok_or(FormatError::Missing("alphabet"))?,
        slt,
        Homomorphism::new(image),
        residual,
        source.ok_or(FormatError::Missing("source"))?,
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::parse_nfa;
    use crate::automata::tests::{AA_OR_BB, A_PLUS};
    use crate::construction::{medvedev_main, medvedev_width2};

    #[test]
    fn round_trips_byte_identical() {
        let nfa = parse_nfa(AA_OR_BB).unwrap().totalize();
        for dec in [
            medvedev_width2(&nfa).unwrap(),
            medvedev_main(&nfa, 3).unwrap(),
        ] {
            let text = serialize(&dec);
            let parsed = parse_decomposition(&text).unwrap();
            assert_eq!(parsed, dec);
            assert_eq!(serialize(&parsed), text);
        }
    }

    #[test]
    fn width2_layout() {
        let nfa = parse_nfa(A_PLUS).unwrap();
        let text = serialize(&medvedev_width2(&nfa).unwrap());
        assert!(text.starts_with("kind width2\nh 2\nm 1\nk 2\n"));
        assert!(text.contains("symbol q0|a -> a\nsymbol q1|a -> a\nI\nq0|a\nT\nq0|a\nq1|a\nF\nq0|a.q1|a\nq1|a.q1|a\nSHORT\nq0|a\nRESIDUAL\n"));
    }

    #[test]
    fn quoted_symbols_survive() {
        let nfa = parse_nfa(
            "alphabet \"x.y\" b\nstates 2\ninitial 0\nfinal 1\ntrans 0 \"x.y\" 1\ntrans 1 b 1\n",
        )
        .unwrap();
        let dec = medvedev_width2(&nfa.totalize()).unwrap();
        let text = serialize(&dec);
        assert_eq!(parse_decomposition(&text).unwrap(), dec);
    }

    #[test]
    fn reports_errors() {
        assert!(matches!(
            parse_decomposition("kind main\nh 2\n"),
            Err(FormatError::Missing(_))
        ));
        let err = parse_decomposition("kind other\n").unwrap_err();
        assert!(matches!(err, FormatError::Syntax { line: 1, .. }));
        let err = parse_decomposition(
            "kind main\nh 2\nm 1\nk 2\nsource x\nalphabet a\nsymbol s -> a\nI\nt\n",
        )
        .unwrap_err();
        assert!(matches!(err, FormatError::Syntax { line: 9, .. }));
    }
}
