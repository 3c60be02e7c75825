// SPDX-License-Identifier: Apache-2.0

//! Fixed-length state codes over a digit alphabet `0..h` whose codewords end in
//! `00` and contain no other `00`.
//!
//! Any window of length `2m - 1` cut from a concatenation of such codewords
//! contains exactly one length-`m` factor that is a codeword, which makes the
//! code decodable from a sliding window.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

/// A digit of the code alphabet; `0` is the distinguished digit.
pub type Digit = u32;

/// Default bound on enumerated codeword pools and decodability sweeps.
pub const DEFAULT_CODE_CAP: usize = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error("digit alphabet must have at least 2 digits, got {0}")]
    DigitCount(u64),
    #[error("block length must be at least 2, got {0}")]
    BlockLength(usize),
    #[error("at least 2 states are needed, got {0}")]
    StateCount(usize),
    #[error("enumeration cap of {0} exceeded")]
    CapExceeded(usize),
    #[error("window has length {got}, expected {expected}")]
    WindowLength { got: usize, expected: usize },
    #[error("codewords must be distinct and of equal length")]
    NotInjective,
    #[error("digit {0} is outside the code alphabet")]
    DigitOutOfRange(Digit),
}

/// Words of length `m` over `0..h` whose only occurrence of `00` is the suffix,
/// in lexicographic order.
pub fn enumerate_s(h: u32, m: usize) -> Result<Vec<Vec<Digit>>, CodeError> {
    enumerate_s_capped(h, m, DEFAULT_CODE_CAP)
}

pub fn enumerate_s_capped(h: u32, m: usize, cap: usize) -> Result<Vec<Vec<Digit>>, CodeError> {
    if h < 2 {
        return Err(CodeError::DigitCount(h as u64));
    }
    if m < 2 {
        return Err(CodeError::BlockLength(m));
    }
    let mut out = Vec::new();
    let mut body = Vec::with_capacity(m);
    // body: m-2 digits, no "00", not ending in 0
    fn rec(
        h: u32,
        len: usize,
        body: &mut Vec<Digit>,
        out: &mut Vec<Vec<Digit>>,
        cap: usize,
    ) -> Result<(), CodeError> {
        if body.len() == len {
            if body.last() == Some(&0) {
                return Ok(());
            }
            if out.len() >= cap {
                return Err(CodeError::CapExceeded(cap));
            }
            let mut word = body.clone();
            word.extend([0, 0]);
            out.push(word);
            return Ok(());
        }
        for d in 0..h {
            if d == 0 && body.last() == Some(&0) {
                continue;
            }
            body.push(d);
            rec(h, len, body, out, cap)?;
            body.pop();
        }
        Ok(())
    }
    rec(h, m - 2, &mut body, &mut out, cap)?;
    Ok(out)
}

/// `|S(m)|` by the recurrence `|S(m)| = (h-1)(|S(m-1)| + |S(m-2)|)` with
/// `|S(2)| = 1`, `|S(3)| = h - 1`.
pub fn count_s(h: u64, m: usize) -> Result<BigUint, CodeError> {
    if h < 2 {
        return Err(CodeError::DigitCount(h));
    }
    if m < 2 {
        return Err(CodeError::BlockLength(m));
    }
    let factor = BigUint::from(h - 1);
    let mut prev = BigUint::one();
    if m == 2 {
        return Ok(prev);
    }
    let mut cur = factor.clone();
    for _ in 3..m {
        let next = &factor * (&prev + &cur);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Growth exponent `f(h) = 1 / (lg(h-1 + sqrt((h-1)(h+3))) - 1)`.
pub fn f_ratio(h: f64) -> f64 {
    1.0 / (((h - 1.0) + ((h - 1.0) * (h + 3.0)).sqrt()).log2() - 1.0)
}

/// Offset as printed alongside `f`: `1 + f(h)/2 (lg(h-1) + lg(h+3))`.
pub fn g_printed(h: f64) -> f64 {
    1.0 + f_ratio(h) / 2.0 * ((h - 1.0).log2() + (h + 3.0).log2())
}

/// Offset that reproduces the tabulated values:
/// `1 + f(h) (1 + (lg(h-1) + lg(h+3)) / 2)`.
pub fn g_reconciled(h: f64) -> f64 {
    1.0 + f_ratio(h) * (1.0 + ((h - 1.0).log2() + (h + 3.0).log2()) / 2.0)
}

pub fn log2_big(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        n.to_f64().expect("finite").log2()
    } else {
        let shift = bits - 64;
        let top = (n >> shift).to_f64().expect("finite");
        top.log2() + shift as f64
    }
}

/// `ceil(g(h) + f(h) lg n)` with the reconciled `g`.
pub fn closed_form_m(n: &BigUint, h: u64) -> u64 {
    let h = h as f64;
    (g_reconciled(h) + f_ratio(h) * log2_big(n)).ceil() as u64
}

/// Block length selected for `n` states over `h` digits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockLength {
    /// Smallest `m >= 2` with `|S(m)| >= n`.
    pub m: usize,
    /// Closed-form value, for comparison only.
    pub closed_form: u64,
    /// `ceil(log_h n)`, the floor any code must respect.
    pub floor: usize,
}

pub fn choose_m(n: &BigUint, h: u64) -> Result<BlockLength, CodeError> {
    if h < 2 {
        return Err(CodeError::DigitCount(h));
    }
    if *n < BigUint::from(2u32) {
        return Err(CodeError::StateCount(n.to_usize().unwrap_or(0)));
    }
    let factor = BigUint::from(h - 1);
    let (mut m, mut prev, mut cur) = (2usize, BigUint::zero(), BigUint::one());
    while cur < *n {
        let next = if m == 2 {
            factor.clone()
        } else {
            &factor * (&prev + &cur)
        };
        prev = cur;
        cur = next;
        m += 1;
    }
    Ok(BlockLength {
        m,
        closed_form: closed_form_m(n, h),
        floor: ceil_log(n, h),
    })
}

/// Smallest `e` with `h^e >= n`.
fn ceil_log(n: &BigUint, h: u64) -> usize {
    let base = BigUint::from(h);
    let mut power = BigUint::one();
    let mut e = 0;
    while power < *n {
        power *= &base;
        e += 1;
    }
    e
}

/// Injective assignment of equal-length digit words to states `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Code {
    h: u32,
    m: usize,
    codewords: Vec<Vec<Digit>>,
    index: HashMap<Vec<Digit>, usize>,
}

impl Code {
    /// Wraps arbitrary codewords; only injectivity and shape are checked, so
    /// broken codes can be built for testing the decodability sweep.
    pub fn from_codewords(h: u32, codewords: Vec<Vec<Digit>>) -> Result<Self, CodeError> {
        if h < 2 {
            return Err(CodeError::DigitCount(h as u64));
        }
        let m = codewords.first().map_or(0, Vec::len);
        if m < 2 {
            return Err(CodeError::BlockLength(m));
        }
        let mut index = HashMap::new();
        for (q, word) in codewords.iter().enumerate() {
            if word.len() != m || index.insert(word.clone(), q).is_some() {
                return Err(CodeError::NotInjective);
            }
            if let Some(&d) = word.iter().find(|&&d| d >= h) {
                return Err(CodeError::DigitOutOfRange(d));
            }
        }
        Ok(Code {
            h,
            m,
            codewords,
            index,
        })
    }

    pub fn h(&self) -> u32 {
        self.h
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn num_states(&self) -> usize {
        self.codewords.len()
    }

    pub fn codeword(&self, q: usize) -> &[Digit] {
        &self.codewords[q]
    }

    pub fn codewords(&self) -> &[Vec<Digit>] {
        &self.codewords
    }

    pub fn state_of(&self, word: &[Digit]) -> Option<usize> {
        self.index.get(word).copied()
    }

    /// True when every codeword ends in `00` with no other `00` inside.
    pub fn has_suffix_discipline(&self) -> bool {
        self.codewords.iter().all(|w| {
            let m = w.len();
            w[m - 2..] == [0, 0] && !w[..m - 1].windows(2).any(|p| p == [0, 0])
        })
    }

    /// Unique position `j` (1-based) at which a codeword starts inside a window of
    /// length `2m - 1`, with its state. `None` if zero or several positions match.
    pub fn factor_decode(&self, window: &[Digit]) -> Result<Option<(usize, usize)>, CodeError> {
        let expected = 2 * self.m - 1;
        if window.len() != expected {
            return Err(CodeError::WindowLength {
                got: window.len(),
                expected,
            });
        }
        let mut found = None;
        for j in 0..self.m {
            if let Some(q) = self.state_of(&window[j..j + self.m]) {
                if found.is_some() {
                    return Ok(None);
                }
                found = Some((j + 1, q));
            }
        }
        Ok(found)
    }

    /// Sweeps every window of length `2m - 1` inside `[q1][q2][q3]` for all state
    /// triples and checks it decodes, uniquely, to the aligned codeword.
    pub fn verify_factor_decodable(&self) -> Result<DecodabilityVerdict, CodeError> {
        self.verify_factor_decodable_capped(DEFAULT_CODE_CAP * 10)
    }

    pub fn verify_factor_decodable_capped(
        &self,
        cap: usize,
    ) -> Result<DecodabilityVerdict, CodeError> {
        let n = self.codewords.len();
        let m = self.m;
        if n.saturating_pow(3).saturating_mul(m) > cap {
            return Err(CodeError::CapExceeded(cap));
        }
        let mut buf = Vec::with_capacity(3 * m);
        let mut checked = 0usize;
        for q1 in 0..n {
            for q2 in 0..n {
                for q3 in 0..n {
                    buf.clear();
                    buf.extend_from_slice(&self.codewords[q1]);
                    buf.extend_from_slice(&self.codewords[q2]);
                    buf.extend_from_slice(&self.codewords[q3]);
                    for start in 0..m {
                        // windows starting at a block boundary depend on fewer blocks
                        if start == 0 && q3 != 0 {
                            continue;
                        }
                        let window = &buf[start..start + 2 * m - 1];
                        let expected = if start == 0 {
                            (1, q1)
                        } else {
                            (m - start + 1, q2)
                        };
                        checked += 1;
                        if self.factor_decode(window)? != Some(expected) {
                            return Ok(DecodabilityVerdict::Fail {
                                window: window.to_vec(),
                                expected,
                            });
                        }
                    }
                }
            }
        }
        Ok(DecodabilityVerdict::Pass { windows: checked })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodabilityVerdict {
    Pass {
        windows: usize,
    },
    /// A window that does not decode to its true alignment `(position, state)`.
    Fail {
        window: Vec<Digit>,
        expected: (usize, usize),
    },
}

impl DecodabilityVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, DecodabilityVerdict::Pass { .. })
    }
}

/// Code for `n` states over `h` digits: the block length is [`choose_m`] and
/// state `i` receives the `i`-th word of `S(m)` in lexicographic order.
pub fn build_code(n: usize, h: u32) -> Result<Code, CodeError> {
    if n < 2 {
        return Err(CodeError::StateCount(n));
    }
    let m = choose_m(&BigUint::from(n), h as u64)?.m;
    let pool = first_s_words(h, m, n)?;
    Code::from_codewords(h, pool)
}

// Lexicographically first `count` words of S(m), without materializing S(m).
fn first_s_words(h: u32, m: usize, count: usize) -> Result<Vec<Vec<Digit>>, CodeError> {
    let mut out = Vec::with_capacity(count);
    let mut body = Vec::with_capacity(m);
    fn rec(h: u32, len: usize, body: &mut Vec<Digit>, out: &mut Vec<Vec<Digit>>, count: usize) {
        if out.len() == count {
            return;
        }
        if body.len() == len {
            if body.last() != Some(&0) {
                let mut word = body.clone();
                word.extend([0, 0]);
                out.push(word);
            }
            return;
        }
        for d in 0..h {
            if d == 0 && body.last() == Some(&0) {
                continue;
            }
            body.push(d);
            rec(h, len, body, out, count);
            body.pop();
            if out.len() == count {
                return;
            }
        }
    }
    rec(h, m - 2, &mut body, &mut out, count);
    if out.len() < count {
        return Err(CodeError::StateCount(count));
    }
    Ok(out)
}
