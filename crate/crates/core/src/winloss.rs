//! Win-loss sequences: the W/L outcome of every round, seen from Alice.
//!
//! With `m` initial cards, Alice holds `m + w_i - l_i` cards after `i`
//! rounds; a valid sequence keeps that positive until the last round, where
//! it reaches zero. Passthrough boundaries fall after the first `m` letters
//! and then after twice the number of W's in the previous passthrough.

use std::fmt;

use thiserror::Error;

use crate::engine::{GameTrace, Outcome};
use crate::numerics::{self, BigInt};
use malachite::base::num::arithmetic::traits::Pow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    W,
    L,
}

impl Letter {
    pub fn as_char(self) -> char {
        match self {
            Letter::W => 'W',
            Letter::L => 'L',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SequenceError {
    #[error("initial hand size must be positive")]
    ZeroHand,
    #[error("unexpected character `{0}` in win-loss sequence")]
    BadChar(char),
    #[error("Alice runs out of cards after round {0} with letters left over")]
    EarlyExhaustion(usize),
    #[error("sequence ends with Alice still holding {0} card(s)")]
    Unfinished(usize),
    #[error("slashes do not match passthrough boundaries (expected `{expected}`)")]
    MisplacedSlash { expected: String },
    #[error("expected a unicard sequence, got m = {0}")]
    NotUnicard(usize),
    #[error("trace does not end with Alice losing")]
    NotAliceLoss,
}

/// A complete win-loss sequence for a game Alice loses.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WinLossSequence {
    letters: Vec<Letter>,
    m: usize,
}

impl WinLossSequence {
    pub fn new(letters: Vec<Letter>, m: usize) -> Result<Self, SequenceError> {
        if m == 0 {
            return Err(SequenceError::ZeroHand);
        }
        let mut cards = m;
        for (i, &letter) in letters.iter().enumerate() {
            if cards == 0 {
                return Err(SequenceError::EarlyExhaustion(i));
            }
            match letter {
                Letter::W => cards += 1,
                Letter::L => cards -= 1,
            }
        }
        if cards != 0 {
            return Err(SequenceError::Unfinished(cards));
        }
        Ok(Self { letters, m })
    }

    /// Letters of a trace Alice lost.
    pub fn from_trace(trace: &GameTrace) -> Result<Self, SequenceError> {
        if trace.outcome != Outcome::AliceLost {
            return Err(SequenceError::NotAliceLoss);
        }
        let letters = trace
            .rounds
            .iter()
            .map(|r| if r.alice_won() { Letter::W } else { Letter::L })
            .collect();
        Self::new(letters, trace.initial.alice().len())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn rounds(&self) -> usize {
        self.letters.len()
    }

    pub fn wins(&self) -> usize {
        self.letters.iter().filter(|&&l| l == Letter::W).count()
    }

    pub fn losses(&self) -> usize {
        self.rounds() - self.wins()
    }

    pub fn is_unicard(&self) -> bool {
        self.m == 1
    }

    /// Lengths of the successive passthroughs.
    pub fn passthrough_lengths(&self) -> Vec<usize> {
        passthrough_lengths(&self.letters, self.m)
    }

    pub fn passthrough_count(&self) -> usize {
        self.passthrough_lengths().len()
    }

    /// The letters split at passthrough boundaries.
    pub fn passthroughs(&self) -> Vec<&[Letter]> {
        let mut out = Vec::new();
        let mut start = 0;
        for len in self.passthrough_lengths() {
            out.push(&self.letters[start..start + len]);
            start += len;
        }
        out
    }

    /// The sequence with `/` between passthroughs, e.g. `W/LW/LL`.
    pub fn stylize(&self) -> String {
        self.passthroughs()
            .iter()
            .map(|pt| pt.iter().map(|l| l.as_char()).collect::<String>())
            .collect::<Vec<_>>()
            .join("/")
    }

    /// Plain letters without slashes.
    pub fn plain(&self) -> String {
        self.letters.iter().map(|l| l.as_char()).collect()
    }
}

impl fmt::Display for WinLossSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.stylize())
    }
}

fn passthrough_lengths(letters: &[Letter], m: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut len = m;
    while start < letters.len() && len > 0 {
        let end = (start + len).min(letters.len());
        out.push(end - start);
        let wins = letters[start..end].iter().filter(|&&l| l == Letter::W).count();
        start = end;
        len = 2 * wins;
    }
    out
}

/// Parses `W`/`L` text. Slashes are optional, but any that appear must sit
/// exactly on the passthrough boundaries.
pub fn parse_sequence(text: &str, m: usize) -> Result<WinLossSequence, SequenceError> {
    let mut letters = Vec::new();
    let mut slashes = Vec::new();
    for ch in text.trim().chars() {
        match ch {
            'W' | 'w' => letters.push(Letter::W),
            'L' | 'l' => letters.push(Letter::L),
            '/' => slashes.push(letters.len()),
            c => return Err(SequenceError::BadChar(c)),
        }
    }
    let seq = WinLossSequence::new(letters, m)?;
    if !slashes.is_empty() {
        let mut boundaries = Vec::new();
        let mut acc = 0;
        let lengths = seq.passthrough_lengths();
        for len in &lengths[..lengths.len() - 1] {
            acc += len;
            boundaries.push(acc);
        }
        if slashes != boundaries {
            return Err(SequenceError::MisplacedSlash {
                expected: seq.stylize(),
            });
        }
    }
    Ok(seq)
}

/// Every valid sequence of exactly `rounds` letters for hand size `m`, in
/// lexicographic order with `W < L`. Empty when the parity is wrong.
pub fn enumerate_sequences_rounds(m: usize, rounds: usize) -> Vec<WinLossSequence> {
    fn go(m: usize, rounds: usize, cards: usize, prefix: &mut Vec<Letter>, out: &mut Vec<WinLossSequence>) {
        let left = rounds - prefix.len();
        if cards == 0 {
            if left == 0 {
                out.push(WinLossSequence {
                    letters: prefix.clone(),
                    m,
                });
            }
            return;
        }
        // Each remaining letter changes the count by one.
        if cards > left || (left - cards) % 2 != 0 {
            return;
        }
        prefix.push(Letter::W);
        go(m, rounds, cards + 1, prefix, out);
        prefix.pop();
        prefix.push(Letter::L);
        go(m, rounds, cards - 1, prefix, out);
        prefix.pop();
    }
    let mut out = Vec::new();
    if m > 0 {
        go(m, rounds, m, &mut Vec::with_capacity(rounds), &mut out);
    }
    out
}

/// Closed-form count of `m`-card sequences with exactly `rounds` rounds.
pub fn count_sequences_rounds(m: usize, rounds: usize) -> BigInt {
    if m == 0 || rounds < m || (rounds - m) % 2 != 0 {
        return BigInt::from(0u32);
    }
    let wins = (rounds - m) / 2;
    let losses = (rounds + m) / 2;
    numerics::catalan_triangle(losses as u64 - 1, wins as u64).expect("wins <= losses - 1 since m >= 1")
}

/// Every valid sequence ending within `k` passthroughs, lexicographic with
/// `W < L`.
pub fn enumerate_sequences_passthrough(m: usize, k: usize) -> Vec<WinLossSequence> {
    struct Walk {
        m: usize,
        k: usize,
        out: Vec<WinLossSequence>,
        prefix: Vec<Letter>,
    }
    impl Walk {
        // `remaining` letters left in passthrough number `pt` (1-based),
        // `wins` W's so far in it.
        fn go(&mut self, pt: usize, remaining: usize, wins: usize) {
            if remaining == 0 {
                if wins == 0 {
                    self.out.push(WinLossSequence {
                        letters: self.prefix.clone(),
                        m: self.m,
                    });
                } else if pt < self.k {
                    self.go(pt + 1, 2 * wins, 0);
                }
                return;
            }
            if pt < self.k {
                self.prefix.push(Letter::W);
                self.go(pt, remaining - 1, wins + 1);
                self.prefix.pop();
            }
            self.prefix.push(Letter::L);
            self.go(pt, remaining - 1, wins);
            self.prefix.pop();
        }
    }
    let mut walk = Walk {
        m,
        k,
        out: Vec::new(),
        prefix: Vec::new(),
    };
    if m > 0 && k > 0 {
        walk.go(1, m, 0);
    }
    walk.out
}

/// Closed-form count `A_k^m` of sequences ending within `k` passthroughs.
pub fn count_sequences_passthrough(m: usize, k: usize) -> BigInt {
    if k == 0 {
        return BigInt::from(0u32);
    }
    numerics::a_k(k as u32).pow(m as u64)
}

/// Splits an `m`-card sequence into the `m` unicard block sequences it was
/// interleaved from: within each passthrough, block `i` owns as many
/// consecutive letters as it holds cards.
pub fn split_blocks(seq: &WinLossSequence) -> Vec<WinLossSequence> {
    let mut blocks: Vec<Vec<Letter>> = vec![Vec::new(); seq.m];
    let mut holding = vec![1usize; seq.m];
    let mut pos = 0;
    while pos < seq.letters.len() {
        for (block, held) in blocks.iter_mut().zip(holding.iter_mut()) {
            let chunk = &seq.letters[pos..pos + *held];
            pos += *held;
            *held = 2 * chunk.iter().filter(|&&l| l == Letter::W).count();
            block.extend_from_slice(chunk);
        }
    }
    blocks
        .into_iter()
        .map(|letters| WinLossSequence { letters, m: 1 })
        .collect()
}

/// Interleaves unicard block sequences passthrough by passthrough.
pub fn combine_blocks(blocks: &[WinLossSequence]) -> Result<WinLossSequence, SequenceError> {
    if let Some(b) = blocks.iter().find(|b| !b.is_unicard()) {
        return Err(SequenceError::NotUnicard(b.m));
    }
    let split: Vec<Vec<&[Letter]>> = blocks.iter().map(|b| b.passthroughs()).collect();
    let depth = split.iter().map(Vec::len).max().unwrap_or(0);
    let mut letters = Vec::new();
    for level in 0..depth {
        for pts in &split {
            if let Some(pt) = pts.get(level) {
                letters.extend_from_slice(pt);
            }
        }
    }
    WinLossSequence::new(letters, blocks.len())
}
