// SPDX-License-Identifier: Apache-2.0

//! Decomposing regular languages into a letter-to-letter image of a strictly
//! locally testable language plus a finite residual.

pub mod automata;
pub mod codes;
pub mod construction;
pub mod format;
pub mod slt;
pub mod verification;

pub use automata::{parse_nfa, Nfa, NfaError, Symbol, Word};
pub use construction::{medvedev_main, medvedev_width2, Decomposition, DecompositionKind};
pub use slt::SltSpec;
