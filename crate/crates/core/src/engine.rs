//! Game states and play under WL-putback or random putback.
//!
//! A state is written `a1 a2 .. | b1 b2 ..` with each hand listed top
//! first. Decks of at most nine cards use the compact digit-per-card form
//! (`2|13`); larger decks separate cards with spaces.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand::RngCore;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::numerics::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Card(pub u32);

impl fmt::Display for Card {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Player {
    Alice,
    Bob,
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::Alice => "Alice",
            Player::Bob => "Bob",
        })
    }
}

/// Order in which the round winner returns the two played cards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Putback {
    /// Winning card first, losing card second (WL-putback).
    WinnerFirst,
    LoserFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PutbackPolicy {
    Wl,
    Random,
}

impl FromStr for PutbackPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "wl" => Ok(PutbackPolicy::Wl),
            "random" => Ok(PutbackPolicy::Random),
            other => Err(format!("unknown putback policy `{other}`")),
        }
    }
}

/// Which players' putback choices are branched on when enumerating random
/// putback.
///
/// Cards Bob wins go to the bottom of his hand and are not replayed until he
/// has gone through his whole initial hand, so his order cannot affect any
/// game that ends within his first passthrough. `AliceOnly` exploits this.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BranchPolicy {
    #[default]
    AliceOnly,
    Both,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseStateError {
    #[error("state must contain exactly one `|`")]
    MissingBar,
    #[error("malformed card token `{0}`")]
    MalformedToken(String),
    #[error("card {0} appears more than once")]
    DuplicateCard(u32),
    #[error("cards must be exactly 1..={n}; {missing} is missing")]
    NonContiguous { n: usize, missing: u32 },
    #[error("state has no cards")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("both players need a card to play a round")]
    EmptyHand,
    #[error("trace did not end with Alice losing")]
    NotAliceLoss,
    #[error("round {round} is outside the trace (1..={len})")]
    RoundOutOfRange { round: usize, len: usize },
}

/// The two hands, each listed top first. Together they hold each of the
/// cards `1..=n` exactly once.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GameState {
    alice: Vec<Card>,
    bob: Vec<Card>,
}

impl GameState {
    pub fn new(alice: Vec<Card>, bob: Vec<Card>) -> Result<Self, ParseStateError> {
        let n = alice.len() + bob.len();
        if n == 0 {
            return Err(ParseStateError::Empty);
        }
        let mut seen = vec![false; n + 1];
        for &Card(c) in alice.iter().chain(&bob) {
            if c == 0 {
                return Err(ParseStateError::MalformedToken(c.to_string()));
            }
            if (c as usize) <= n {
                if seen[c as usize] {
                    return Err(ParseStateError::DuplicateCard(c));
                }
                seen[c as usize] = true;
            }
        }
        // Check duplicates among out-of-range cards before reporting gaps.
        let mut big: Vec<u32> = alice
            .iter()
            .chain(&bob)
            .map(|c| c.0)
            .filter(|&c| c as usize > n)
            .collect();
        big.sort_unstable();
        if let Some(w) = big.windows(2).find(|w| w[0] == w[1]) {
            return Err(ParseStateError::DuplicateCard(w[0]));
        }
        if let Some(missing) = (1..=n).find(|&c| !seen[c]) {
            return Err(ParseStateError::NonContiguous {
                n,
                missing: missing as u32,
            });
        }
        Ok(Self { alice, bob })
    }

    pub(crate) fn from_parts_unchecked(alice: Vec<Card>, bob: Vec<Card>) -> Self {
        Self { alice, bob }
    }

    /// Builds a state from raw card values, validating them.
    pub fn from_values(alice: &[u32], bob: &[u32]) -> Result<Self, ParseStateError> {
        Self::new(
            alice.iter().copied().map(Card).collect(),
            bob.iter().copied().map(Card).collect(),
        )
    }

    pub fn alice(&self) -> &[Card] {
        &self.alice
    }

    pub fn bob(&self) -> &[Card] {
        &self.bob
    }

    pub fn n(&self) -> usize {
        self.alice.len() + self.bob.len()
    }

    pub fn is_terminal(&self) -> bool {
        self.alice.is_empty() || self.bob.is_empty()
    }
}

/// Parses the bar notation. Text containing whitespace is read as
/// space-separated tokens; otherwise each character is one card.
pub fn parse_state(text: &str) -> Result<GameState, ParseStateError> {
    let mut sides = text.split('|');
    let (left, right) = match (sides.next(), sides.next(), sides.next()) {
        (Some(l), Some(r), None) => (l, r),
        _ => return Err(ParseStateError::MissingBar),
    };
    let spaced = text.chars().any(char::is_whitespace);
    let parse_side = |side: &str| -> Result<Vec<Card>, ParseStateError> {
        if spaced {
            side.split_whitespace()
                .map(|tok| {
                    tok.parse::<u32>()
                        .ok()
                        .filter(|&c| c > 0)
                        .map(Card)
                        .ok_or_else(|| ParseStateError::MalformedToken(tok.to_string()))
                })
                .collect()
        } else {
            side.chars()
                .map(|ch| match ch.to_digit(10) {
                    Some(d) if d > 0 => Ok(Card(d)),
                    _ => Err(ParseStateError::MalformedToken(ch.to_string())),
                })
                .collect()
        }
    };
    GameState::new(parse_side(left)?, parse_side(right)?)
}

/// Canonical text: compact when `n <= 9`, space-separated otherwise.
pub fn format_state(state: &GameState) -> String {
    let join = |cards: &[Card], sep: &str| cards.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(sep);
    if state.n() <= 9 {
        format!("{}|{}", join(&state.alice, ""), join(&state.bob, ""))
    } else {
        let mut out = join(&state.alice, " ");
        out.push_str(if state.alice.is_empty() { "|" } else { " |" });
        if !state.bob.is_empty() {
            out.push(' ');
            out.push_str(&join(&state.bob, " "));
        }
        out
    }
}

impl fmt::Display for GameState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_state(self))
    }
}

impl FromStr for GameState {
    type Err = ParseStateError;

    fn from_str(s: &str) -> Result<Self, ParseStateError> {
        parse_state(s)
    }
}

impl Serialize for GameState {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_state(self))
    }
}

/// One played round. `putback` lists the two cards in the order they were
/// appended to the winner's hand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundRecord {
    pub index: usize,
    pub alice_card: Card,
    pub bob_card: Card,
    pub winner: Player,
    pub putback: (Card, Card),
}

impl RoundRecord {
    pub fn alice_won(&self) -> bool {
        self.winner == Player::Alice
    }

    pub fn winning_card(&self) -> Card {
        self.alice_card.max(self.bob_card)
    }

    pub fn losing_card(&self) -> Card {
        self.alice_card.min(self.bob_card)
    }

    pub fn order(&self) -> Putback {
        if self.putback.0 == self.winning_card() {
            Putback::WinnerFirst
        } else {
            Putback::LoserFirst
        }
    }
}

impl Serialize for RoundRecord {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(6))?;
        seq.serialize_element(&self.index)?;
        seq.serialize_element(&self.alice_card)?;
        seq.serialize_element(&self.bob_card)?;
        seq.serialize_element(&self.winner)?;
        seq.serialize_element(&self.putback.0)?;
        seq.serialize_element(&self.putback.1)?;
        seq.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Outcome {
    AliceLost,
    BobLost,
    Truncated,
}

/// Full record of one played game (or one branch of a random game).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GameTrace {
    pub initial: GameState,
    pub rounds: Vec<RoundRecord>,
    /// Rounds after which Alice's hand completed a passthrough.
    pub alice_passthrough_boundaries: Vec<usize>,
    pub outcome: Outcome,
    pub single_use: bool,
    #[serde(serialize_with = "numerics::serialize_ratio")]
    pub weight: Rational,
}

/// Round count, passthrough count and single-use flag of a finished game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub rounds: usize,
    pub passthroughs: usize,
    pub single_use: bool,
}

impl GameTrace {
    pub fn passthroughs(&self) -> usize {
        self.alice_passthrough_boundaries.len()
    }

    pub fn ended_within(&self, k: usize) -> bool {
        self.outcome == Outcome::AliceLost && self.passthroughs() <= k
    }

    /// The state just before round `round` (1-based) is played; `round` may
    /// be one past the last round to get the final state.
    pub fn state_before(&self, round: usize) -> Result<GameState, EngineError> {
        if round == 0 || round > self.rounds.len() + 1 {
            return Err(EngineError::RoundOutOfRange {
                round,
                len: self.rounds.len(),
            });
        }
        let mut table = Table::new(&self.initial);
        for r in &self.rounds[..round - 1] {
            table.play(r.order());
        }
        Ok(table.to_state())
    }

    pub fn final_state(&self) -> GameState {
        self.state_before(self.rounds.len() + 1)
            .expect("one past the end is always valid")
    }
}

/// Rounds, passthroughs and single-use flag of a game Alice lost.
pub fn classify(trace: &GameTrace) -> Result<Classification, EngineError> {
    if trace.outcome != Outcome::AliceLost {
        return Err(EngineError::NotAliceLoss);
    }
    Ok(Classification {
        rounds: trace.rounds.len(),
        passthroughs: trace.passthroughs(),
        single_use: trace.single_use,
    })
}

/// Plays one round from `state`, returning the successor and the record.
pub fn step(state: &GameState, putback: Putback) -> Result<(GameState, RoundRecord), EngineError> {
    if state.is_terminal() {
        return Err(EngineError::EmptyHand);
    }
    let mut table = Table::new(state);
    let record = table.play(putback);
    Ok((table.to_state(), record))
}

/// Mutable in-progress game with passthrough bookkeeping.
#[derive(Debug, Clone)]
pub(crate) struct Table {
    alice: VecDeque<Card>,
    bob: VecDeque<Card>,
    round: usize,
    /// Alice cards still to play in the current passthrough.
    pt_remaining: usize,
    pt_wins: usize,
    boundaries: Vec<usize>,
}

impl Table {
    pub(crate) fn new(state: &GameState) -> Self {
        Self {
            alice: state.alice.iter().copied().collect(),
            bob: state.bob.iter().copied().collect(),
            round: 0,
            pt_remaining: state.alice.len(),
            pt_wins: 0,
            boundaries: Vec::new(),
        }
    }

    pub(crate) fn is_over(&self) -> bool {
        self.alice.is_empty() || self.bob.is_empty()
    }

    pub(crate) fn round(&self) -> usize {
        self.round
    }

    /// Winner of the next round, without playing it.
    pub(crate) fn next_winner(&self) -> Player {
        if self.alice[0] > self.bob[0] {
            Player::Alice
        } else {
            Player::Bob
        }
    }

    pub(crate) fn play(&mut self, putback: Putback) -> RoundRecord {
        let a = self.alice.pop_front().expect("alice has a card");
        let b = self.bob.pop_front().expect("bob has a card");
        self.round += 1;
        let (winner, hi, lo) = if a > b {
            (Player::Alice, a, b)
        } else {
            (Player::Bob, b, a)
        };
        let order = match putback {
            Putback::WinnerFirst => (hi, lo),
            Putback::LoserFirst => (lo, hi),
        };
        let hand = match winner {
            Player::Alice => &mut self.alice,
            Player::Bob => &mut self.bob,
        };
        hand.push_back(order.0);
        hand.push_back(order.1);

        self.pt_remaining -= 1;
        if winner == Player::Alice {
            self.pt_wins += 1;
        }
        if self.pt_remaining == 0 {
            self.boundaries.push(self.round);
            self.pt_remaining = 2 * self.pt_wins;
            self.pt_wins = 0;
            debug_assert_eq!(self.pt_remaining, self.alice.len());
        }

        RoundRecord {
            index: self.round,
            alice_card: a,
            bob_card: b,
            winner,
            putback: order,
        }
    }

    pub(crate) fn to_state(&self) -> GameState {
        GameState::from_parts_unchecked(self.alice.iter().copied().collect(), self.bob.iter().copied().collect())
    }

    pub(crate) fn outcome(&self) -> Outcome {
        if self.alice.is_empty() {
            Outcome::AliceLost
        } else if self.bob.is_empty() {
            Outcome::BobLost
        } else {
            Outcome::Truncated
        }
    }
}

fn finish(initial: &GameState, table: &Table, rounds: Vec<RoundRecord>, choices: u64) -> GameTrace {
    let outcome = table.outcome();
    GameTrace {
        initial: initial.clone(),
        single_use: outcome == Outcome::AliceLost && rounds.len() <= initial.bob.len(),
        alice_passthrough_boundaries: table.boundaries.clone(),
        rounds,
        outcome,
        weight: Rational::from(1u32) >> choices,
    }
}

/// Plays with a caller-chosen putback per round; `choose` sees the round
/// winner and returns the order. Each round where `branching(winner)` holds
/// halves the trace weight.
pub fn play_with<F, B>(state: &GameState, max_rounds: usize, mut choose: F, branching: B) -> GameTrace
where
    F: FnMut(Player) -> Putback,
    B: Fn(Player) -> bool,
{
    let mut table = Table::new(state);
    let mut rounds = Vec::new();
    let mut choices = 0;
    while !table.is_over() && table.round() < max_rounds {
        let winner = table.next_winner();
        if branching(winner) {
            choices += 1;
        }
        rounds.push(table.play(choose(winner)));
    }
    finish(state, &table, rounds, choices)
}

/// Plays deterministically with WL-putback for both players until someone
/// runs out of cards or `max_rounds` rounds have been played.
pub fn play_wl(state: &GameState, max_rounds: usize) -> GameTrace {
    play_with(state, max_rounds, |_| Putback::WinnerFirst, |_| false)
}

/// Plays one random-putback game in which both players pick their putback
/// order with a fair coin. Each round draws one `u32` from `rng`; a set top
/// bit means winner-first. The trace weight is the probability of the
/// branch taken.
pub fn play_random<R: RngCore + ?Sized>(state: &GameState, max_rounds: usize, rng: &mut R) -> GameTrace {
    play_with(
        state,
        max_rounds,
        |_| {
            if rng.next_u32() >> 31 == 1 {
                Putback::WinnerFirst
            } else {
                Putback::LoserFirst
            }
        },
        |_| true,
    )
}

/// Default round budget `n * 2^n` (saturating).
pub fn default_max_rounds(n: usize) -> usize {
    n.saturating_mul(1usize.checked_shl(n as u32).unwrap_or(usize::MAX))
}

/// Every branch of a random-putback game, branching only on rounds Alice
/// wins. Weights of the returned traces sum to 1.
pub fn enumerate_random_branches(state: &GameState, max_rounds: usize) -> Vec<GameTrace> {
    enumerate_branches(state, max_rounds, BranchPolicy::AliceOnly)
}

pub fn enumerate_branches(state: &GameState, max_rounds: usize, policy: BranchPolicy) -> Vec<GameTrace> {
    let mut out = Vec::new();
    visit_branches(state, max_rounds, policy, |trace| out.push(trace));
    out
}

/// Depth-first walk over the putback-choice tree, handing each finished
/// trace to `visit`. Winner-first branches are visited before loser-first.
pub fn visit_branches<V: FnMut(GameTrace)>(state: &GameState, max_rounds: usize, policy: BranchPolicy, mut visit: V) {
    struct Frame {
        table: Table,
        rounds: Vec<RoundRecord>,
        choices: u64,
    }
    let mut stack = vec![Frame {
        table: Table::new(state),
        rounds: Vec::new(),
        choices: 0,
    }];
    while let Some(mut frame) = stack.pop() {
        loop {
            if frame.table.is_over() || frame.table.round() >= max_rounds {
                visit(finish(state, &frame.table, frame.rounds, frame.choices));
                break;
            }
            let winner = frame.table.next_winner();
            let branches = match policy {
                BranchPolicy::Both => true,
                BranchPolicy::AliceOnly => winner == Player::Alice,
            };
            if branches {
                let mut other = Frame {
                    table: frame.table.clone(),
                    rounds: frame.rounds.clone(),
                    choices: frame.choices + 1,
                };
                other.rounds.push(other.table.play(Putback::LoserFirst));
                stack.push(other);
                frame.choices += 1;
            }
            frame.rounds.push(frame.table.play(Putback::WinnerFirst));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::ratio;

    fn st(s: &str) -> GameState {
        parse_state(s).unwrap()
    }

    fn letters(trace: &GameTrace) -> String {
        trace
            .rounds
            .iter()
            .map(|r| if r.alice_won() { 'W' } else { 'L' })
            .collect()
    }

    #[test]
    fn parse_compact_and_spaced() {
        let s = st("2|13");
        assert_eq!(s.alice(), &[Card(2)]);
        assert_eq!(s.bob(), &[Card(1), Card(3)]);
        let big = st("10 3 | 1 2 4 5 6 7 8 9");
        assert_eq!(big.alice(), &[Card(10), Card(3)]);
        assert_eq!(big.n(), 10);
    }

    #[test]
    fn parse_errors() {
        assert_eq!(parse_state("2|133"), Err(ParseStateError::DuplicateCard(3)));
        assert_eq!(parse_state("213"), Err(ParseStateError::MissingBar));
        assert_eq!(parse_state("2|1|3"), Err(ParseStateError::MissingBar));
        assert_eq!(
            parse_state("2|14"),
            Err(ParseStateError::NonContiguous { n: 3, missing: 3 })
        );
        assert!(matches!(parse_state("2|1x"), Err(ParseStateError::MalformedToken(_))));
        assert!(matches!(
            parse_state("2 | 1 0"),
            Err(ParseStateError::MalformedToken(_))
        ));
        assert_eq!(parse_state("|"), Err(ParseStateError::Empty));
        assert_eq!(parse_state("12 | 12 1"), Err(ParseStateError::DuplicateCard(12)));
    }

    #[test]
    fn format_canonical() {
        assert_eq!(format_state(&st("2|13")), "2|13");
        assert_eq!(format_state(&st("|231")), "|231");
        assert_eq!(format_state(&st("10 3|1 2 4 5 6 7 8 9")), "10 3 | 1 2 4 5 6 7 8 9");
        assert_eq!(format_state(&st("| 10 3 1 2 4 5 6 7 8 9")), "| 10 3 1 2 4 5 6 7 8 9");
        assert_eq!(format_state(&st("10 3 1 2 4 5 6 7 8 9 |")), "10 3 1 2 4 5 6 7 8 9 |");
    }

    #[test]
    fn step_examples() {
        let (next, rec) = step(&st("2|13"), Putback::WinnerFirst).unwrap();
        assert_eq!(next, st("21|3"));
        assert_eq!(rec.winner, Player::Alice);
        let (next, _) = step(&st("12|3"), Putback::WinnerFirst).unwrap();
        assert_eq!(next, st("2|31"));
        let (next, _) = step(&st("12|3"), Putback::LoserFirst).unwrap();
        assert_eq!(next, st("2|13"));
        assert_eq!(step(&st("|123"), Putback::WinnerFirst), Err(EngineError::EmptyHand));
    }

    #[test]
    fn play_wl_examples() {
        let t = play_wl(&st("3|24156"), 100);
        assert_eq!(t.rounds.len(), 5);
        assert_eq!(t.outcome, Outcome::AliceLost);
        assert!(t.single_use);
        assert_eq!(letters(&t), "WLWLL");
        assert_eq!(t.alice_passthrough_boundaries, vec![1, 3, 5]);
        assert_eq!(t.weight, ratio(1, 1));

        let t = play_wl(&st("1|2"), 100);
        assert_eq!((t.rounds.len(), t.outcome), (1, Outcome::AliceLost));

        let t = play_wl(&st("2|13"), 3);
        assert_eq!(t.rounds.len(), 3);
        assert_eq!(t.outcome, Outcome::AliceLost);
        assert_eq!(t.final_state(), st("|231"));
        // Bob's round-3 card was won in round 2.
        assert!(!t.single_use);
    }

    #[test]
    fn play_wl_truncates() {
        let t = play_wl(&st("3|12"), 1);
        assert_eq!(t.outcome, Outcome::Truncated);
        assert_eq!(t.rounds.len(), 1);
        let t = play_wl(&st("3|12"), 100);
        assert_eq!(t.outcome, Outcome::BobLost);
    }

    #[test]
    fn classify_examples() {
        let c = classify(&play_wl(&st("2|143"), 100)).unwrap();
        assert_eq!(
            c,
            Classification {
                rounds: 3,
                passthroughs: 2,
                single_use: true
            }
        );
        let c = classify(&play_wl(&st("1|234"), 100)).unwrap();
        assert_eq!((c.rounds, c.passthroughs, c.single_use), (1, 1, true));
        let c = classify(&play_wl(&st("3|24156"), 100)).unwrap();
        assert_eq!((c.rounds, c.passthroughs, c.single_use), (5, 3, true));
        assert_eq!(classify(&play_wl(&st("3|12"), 1)), Err(EngineError::NotAliceLoss));
    }

    #[test]
    fn random_branch_examples() {
        let b = enumerate_random_branches(&st("1|23"), 10);
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].weight, ratio(1, 1));
        assert_eq!(b[0].rounds.len(), 1);

        let b = enumerate_random_branches(&st("2|13"), 2);
        let after_one: Vec<GameState> = b.iter().map(|t| t.state_before(2).unwrap()).collect();
        assert!(after_one.contains(&st("12|3")));
        assert!(after_one.contains(&st("21|3")));
        assert!(b.iter().all(|t| t.weight == ratio(1, 2)));
    }

    #[test]
    fn bob_branching_gives_four_successors() {
        let b = enumerate_branches(&st("2|13"), 2, BranchPolicy::Both);
        let mut states: Vec<String> = b.iter().map(|t| t.final_state().to_string()).collect();
        states.sort();
        assert_eq!(states, vec!["1|23", "1|32", "2|13", "2|31"]);
        assert!(b.iter().all(|t| t.weight == ratio(1, 4)));
    }

    #[test]
    fn weights_sum_to_one() {
        for s in ["4|1235", "3|1245", "12|34", "5|1234", "21|534"] {
            for policy in [BranchPolicy::AliceOnly, BranchPolicy::Both] {
                let total = enumerate_branches(&st(s), 12, policy)
                    .into_iter()
                    .fold(Rational::from(0u32), |acc, t| acc + t.weight);
                assert_eq!(total, ratio(1, 1), "{s} {policy:?}");
            }
        }
    }

    #[test]
    fn trace_json_shape() {
        let t = play_wl(&st("2|13"), 1);
        let v = serde_json::to_value(&t).unwrap();
        assert_eq!(v["initial"], "2|13");
        assert_eq!(v["rounds"][0], serde_json::json!([1, 2, 1, "Alice", 2, 1]));
        assert_eq!(v["weight"], "1/1");
        assert_eq!(v["outcome"], "Truncated");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn any_state(max_n: u32) -> impl Strategy<Value = GameState> {
            (2..=max_n)
                .prop_flat_map(|n| (Just((1..=n).collect::<Vec<u32>>()).prop_shuffle(), 1..n))
                .prop_map(|(perm, m)| GameState::from_values(&perm[..m as usize], &perm[m as usize..]).unwrap())
        }

        proptest! {
            #[test]
            fn format_parse_roundtrip(state in any_state(13)) {
                prop_assert_eq!(parse_state(&format_state(&state)).unwrap(), state);
            }

            #[test]
            fn rounds_conserve_cards_and_higher_wins(state in any_state(9)) {
                let trace = play_wl(&state, 60);
                let mut current = state.clone();
                for r in &trace.rounds {
                    prop_assert_eq!(r.winning_card() == r.alice_card, r.alice_won());
                    let (next, rec) = step(&current, r.order()).unwrap();
                    prop_assert_eq!(&rec.winner, &r.winner);
                    let mut cards: Vec<Card> = next.alice().iter().chain(next.bob()).copied().collect();
                    cards.sort();
                    prop_assert_eq!(cards, (1..=state.n() as u32).map(Card).collect::<Vec<_>>());
                    current = next;
                }
            }

            #[test]
            fn passthrough_lengths_double_wins(state in any_state(9)) {
                let trace = play_wl(&state, 60);
                let b = &trace.alice_passthrough_boundaries;
                if let Some(&first) = b.first() {
                    prop_assert_eq!(first, state.alice().len());
                }
                for w in b.windows(2) {
                    let prev_start = if w[0] == b[0] { 0 } else {
                        b[b.iter().position(|&x| x == w[0]).unwrap() - 1]
                    };
                    let wins = trace.rounds[prev_start..w[0]].iter().filter(|r| r.alice_won()).count();
                    prop_assert_eq!(w[1] - w[0], 2 * wins);
                }
            }
        }
    }

    #[test]
    fn seeded_random_play_is_reproducible() {
        use rand::SeedableRng;
        use rand_chacha::ChaCha8Rng;
        let state = parse_state("4 1 7|3 6 2 5 8").unwrap();
        let a = play_random(&state, 12, &mut ChaCha8Rng::seed_from_u64(7));
        let b = play_random(&state, 12, &mut ChaCha8Rng::seed_from_u64(7));
        assert_eq!(a, b);
        assert_eq!(a.weight, Rational::from(1u32) >> a.rounds.len() as u64);
        let branches = enumerate_branches(&state, 12, BranchPolicy::Both);
        assert!(branches.iter().any(|t| t.rounds == a.rounds));
    }
}
