//! Exhaustive enumeration over initial states and random-putback branches.
//!
//! States are permutations of `1..=n` split `m | n - m`. The state space is
//! cut into shards by a fixed prefix of the permutation; shards are
//! classified in parallel and their exact counts added in shard order, so
//! results do not depend on the thread count.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::engine::{
    play_wl, step, visit_branches, BranchPolicy, Card, GameState, GameTrace, Outcome, Putback, PutbackPolicy,
};
use crate::numerics::{self, factorial, BigInt, Rational};
use crate::winloss::WinLossSequence;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CensusError {
    #[error("need 0 < m < n, got n = {n}, m = {m}")]
    BadShape { n: usize, m: usize },
    #[error("deck of {n} cards is below the single-use bound {needed}")]
    InsufficientDeck { n: usize, needed: usize },
    #[error("state {0} produced a counted game that is not single-use")]
    NotSingleUse(String),
}

/// Lexicographic permutations of `1..=n` that start with `prefix`.
#[derive(Debug, Clone)]
pub struct Permutations {
    current: Option<Vec<u32>>,
    fixed: usize,
}

impl Permutations {
    pub fn new(n: usize, prefix: &[u32]) -> Self {
        let mut current = prefix.to_vec();
        current.extend((1..=n as u32).filter(|v| !prefix.contains(v)));
        Self {
            current: Some(current),
            fixed: prefix.len(),
        }
    }
}

impl Iterator for Permutations {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let out = self.current.clone()?;
        let tail = &mut self.current.as_mut().expect("checked above")[self.fixed..];
        if !next_permutation(tail) {
            self.current = None;
        }
        Some(out)
    }
}

fn next_permutation(v: &mut [u32]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("v[i] qualifies");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Shard prefixes: every arrangement of `ceil(n/2)` distinct cards, in
/// lexicographic order.
pub fn shard_prefixes(n: usize) -> Vec<Vec<u32>> {
    let len = n.div_ceil(2);
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(len);
    fn go(n: u32, len: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == len {
            out.push(prefix.clone());
            return;
        }
        for v in 1..=n {
            if !prefix.contains(&v) {
                prefix.push(v);
                go(n, len, prefix, out);
                prefix.pop();
            }
        }
    }
    go(n as u32, len, &mut prefix, &mut out);
    out
}

fn split(p: &[u32], m: usize) -> GameState {
    let cards: Vec<Card> = p.iter().map(|&v| Card(v)).collect();
    GameState::new(cards[..m].to_vec(), cards[m..].to_vec()).expect("a permutation is a valid deck")
}

/// States of one shard, in lexicographic order.
pub fn shard_states(n: usize, m: usize, prefix: &[u32]) -> impl Iterator<Item = GameState> {
    Permutations::new(n, prefix).map(move |p| split(&p, m))
}

/// Every `m`-card state on `n` cards, in lexicographic order.
pub fn all_states(n: usize, m: usize) -> impl Iterator<Item = GameState> {
    Permutations::new(n, &[]).map(move |p| split(&p, m))
}

fn check_shape(n: usize, m: usize) -> Result<(), CensusError> {
    if m == 0 || m >= n {
        return Err(CensusError::BadShape { n, m });
    }
    Ok(())
}

/// Runs `per_state` on every state shard by shard and adds the results.
fn sum_over_states<T, F>(n: usize, m: usize, per_state: F) -> Result<T, CensusError>
where
    T: Send + std::iter::Sum<T>,
    F: Fn(&GameState) -> Result<T, CensusError> + Sync,
{
    let partial: Vec<T> = shard_prefixes(n)
        .par_iter()
        .map(|prefix| shard_states(n, m, prefix).map(|s| per_state(&s)).sum::<Result<T, _>>())
        .collect::<Result<_, _>>()?;
    Ok(partial.into_iter().sum())
}

/// Collects, in lexicographic order, the states satisfying `keep`.
fn filter_states<F>(n: usize, m: usize, keep: F) -> Vec<GameState>
where
    F: Fn(&GameState) -> bool + Sync,
{
    shard_prefixes(n)
        .par_iter()
        .map(|prefix| shard_states(n, m, prefix).filter(|s| keep(s)).collect::<Vec<_>>())
        .collect::<Vec<_>>()
        .concat()
}

/// Bob only needs to randomize once he can replay a card he won, which
/// cannot happen in the first `n - m` rounds.
pub fn branch_policy_for(n: usize, m: usize, horizon: usize) -> BranchPolicy {
    if horizon <= n.saturating_sub(m) {
        BranchPolicy::AliceOnly
    } else {
        BranchPolicy::Both
    }
}

/// Round budget for deterministic WL-putback census runs.
pub fn wl_horizon(n: usize) -> usize {
    n * n
}

/// Probability mass of games accepted by `accept`, over uniformly random
/// states and, for random putback, over branches explored up to `horizon`
/// rounds.
fn accepted_mass<F>(
    n: usize,
    m: usize,
    policy: PutbackPolicy,
    horizon: usize,
    accept: F,
) -> Result<Rational, CensusError>
where
    F: Fn(&GameTrace) -> Result<bool, CensusError> + Sync,
{
    check_shape(n, m)?;
    let total = match policy {
        PutbackPolicy::Wl => {
            let hits = sum_over_states(n, m, |s| Ok(u64::from(accept(&play_wl(s, wl_horizon(n)))?)))?;
            Rational::from(hits)
        }
        PutbackPolicy::Random => {
            let branching = branch_policy_for(n, m, horizon);
            sum_over_states(n, m, |s| {
                let mut mass = Rational::from(0u32);
                let mut err = None;
                visit_branches(s, horizon, branching, |t| {
                    if err.is_some() {
                        return;
                    }
                    match accept(&t) {
                        Ok(true) => mass += &t.weight,
                        Ok(false) => {}
                        Err(e) => err = Some(e),
                    }
                });
                err.map_or(Ok(mass), Err)
            })?
        }
    };
    Ok(total / Rational::from(factorial(n as u64)))
}

fn require_single_use(t: &GameTrace) -> Result<(), CensusError> {
    if t.single_use {
        Ok(())
    } else {
        Err(CensusError::NotSingleUse(t.initial.to_string()))
    }
}

/// Exact probability that a uniformly random `m`-card state on `n` cards
/// gives a game Alice loses in exactly `rounds` rounds. Requires
/// `n >= m + rounds`, where every such game is single-use.
pub fn probability_r_round(n: usize, m: usize, rounds: usize, policy: PutbackPolicy) -> Result<Rational, CensusError> {
    check_shape(n, m)?;
    if n < m + rounds {
        return Err(CensusError::InsufficientDeck { n, needed: m + rounds });
    }
    if rounds < m || (rounds - m) % 2 != 0 {
        return Ok(Rational::from(0u32));
    }
    accepted_mass(n, m, policy, rounds, |t| {
        let hit = t.outcome == Outcome::AliceLost && t.rounds.len() == rounds;
        if hit {
            require_single_use(t)?;
        }
        Ok(hit)
    })
}

/// The same quantity with no single-use requirement; counted games need not
/// be single-use.
pub fn observed_r_round(n: usize, m: usize, rounds: usize, policy: PutbackPolicy) -> Result<Rational, CensusError> {
    accepted_mass(n, m, policy, rounds, |t| {
        Ok(t.outcome == Outcome::AliceLost && t.rounds.len() == rounds)
    })
}

/// Longest possible game that ends within `k` passthroughs of Alice.
fn passthrough_horizon(m: usize, k: usize) -> usize {
    ((1usize << k) - 1) * m
}

/// Exact probability that a uniformly random `m`-card state on `n` cards
/// gives a game Alice loses within `k` passthroughs. Requires
/// `n >= 2^k m`.
pub fn probability_k_passthrough(n: usize, m: usize, k: usize, policy: PutbackPolicy) -> Result<Rational, CensusError> {
    check_shape(n, m)?;
    let needed = (1usize << k) * m;
    if n < needed {
        return Err(CensusError::InsufficientDeck { n, needed });
    }
    accepted_mass(n, m, policy, passthrough_horizon(m, k), |t| {
        let hit = t.ended_within(k);
        if hit {
            require_single_use(t)?;
        }
        Ok(hit)
    })
}

/// The same quantity below the `2^k m` bound, reported without any claim.
pub fn observed_k_passthrough(n: usize, m: usize, k: usize, policy: PutbackPolicy) -> Result<Rational, CensusError> {
    accepted_mass(n, m, policy, passthrough_horizon(m, k), |t| Ok(t.ended_within(k)))
}

/// Result of one branch of a classified state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BranchSummary {
    pub rounds: usize,
    pub passthroughs: usize,
    pub outcome: Outcome,
    pub single_use: bool,
    /// Stylized win-loss sequence, present when Alice lost.
    pub sequence: Option<String>,
    #[serde(serialize_with = "numerics::serialize_ratio")]
    pub weight: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StateClassification {
    pub state: GameState,
    pub branches: Vec<BranchSummary>,
}

fn summarize(t: &GameTrace) -> BranchSummary {
    BranchSummary {
        rounds: t.rounds.len(),
        passthroughs: t.passthroughs(),
        outcome: t.outcome,
        single_use: t.single_use,
        sequence: WinLossSequence::from_trace(t).ok().map(|s| s.stylize()),
        weight: t.weight.clone(),
    }
}

/// Every branch of the game from `state`, each with its weight.
pub fn classify_state(state: &GameState, policy: PutbackPolicy, max_rounds: usize) -> StateClassification {
    let branches = match policy {
        PutbackPolicy::Wl => vec![summarize(&play_wl(state, max_rounds))],
        PutbackPolicy::Random => {
            let branching = branch_policy_for(state.n(), state.alice().len(), max_rounds);
            let mut out = Vec::new();
            visit_branches(state, max_rounds, branching, |t| out.push(summarize(&t)));
            out
        }
    };
    StateClassification {
        state: state.clone(),
        branches,
    }
}

/// Outcome of one random-putback round played from the uniform
/// distribution on `m`-card states.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UniformReport {
    pub n: usize,
    pub m: usize,
    #[serde(serialize_with = "numerics::serialize_ratio")]
    pub win_mass: Rational,
    #[serde(serialize_with = "numerics::serialize_ratio")]
    pub loss_mass: Rational,
    /// States reached after Alice wins, and whether each holds mass exactly
    /// `win_mass / n!`.
    pub win_states: usize,
    pub win_uniform: bool,
    pub loss_states: usize,
    pub loss_uniform: bool,
    pub expected_states: String,
    pub pass: bool,
}

pub fn uniform_lemma_check(n: usize, m: usize) -> Result<UniformReport, CensusError> {
    check_shape(n, m)?;
    let start = Rational::from(1u32) / Rational::from(factorial(n as u64));
    let half = Rational::from(1u32) >> 1u32;
    let mut win: HashMap<GameState, Rational> = HashMap::new();
    let mut loss: HashMap<GameState, Rational> = HashMap::new();
    for s in all_states(n, m) {
        for order in [Putback::WinnerFirst, Putback::LoserFirst] {
            let (next, record) = step(&s, order).expect("m-card states are not terminal");
            let side = if record.alice_won() { &mut win } else { &mut loss };
            *side.entry(next).or_insert_with(|| Rational::from(0u32)) += &start * &half;
        }
    }
    let total = |map: &HashMap<GameState, Rational>| map.values().fold(Rational::from(0u32), |acc, v| acc + v);
    let (win_mass, loss_mass) = (total(&win), total(&loss));
    let states = factorial(n as u64);
    let uniform = |map: &HashMap<GameState, Rational>, mass: &Rational| {
        let each = mass / Rational::from(states.clone());
        BigInt::from(map.len()) == states && map.values().all(|v| *v == each)
    };
    let win_uniform = uniform(&win, &win_mass);
    let loss_uniform = uniform(&loss, &loss_mass);
    let pass = win_mass == half && loss_mass == half && win_uniform && loss_uniform;
    Ok(UniformReport {
        n,
        m,
        win_states: win.len(),
        loss_states: loss.len(),
        win_mass,
        loss_mass,
        win_uniform,
        loss_uniform,
        expected_states: states.to_string(),
        pass,
    })
}

/// States on `n` cards whose WL-putback game realizes `seq`.
pub fn states_matching_wl(seq: &WinLossSequence, n: usize) -> Result<Vec<GameState>, CensusError> {
    check_shape(n, seq.m())?;
    Ok(filter_states(n, seq.m(), |s| {
        let t = play_wl(s, wl_horizon(n));
        t.outcome == Outcome::AliceLost && WinLossSequence::from_trace(&t).ok().as_ref() == Some(seq)
    }))
}

/// States on `n` cards every random-putback branch of which realizes `seq`.
pub fn states_necessarily_random(seq: &WinLossSequence, n: usize) -> Result<Vec<GameState>, CensusError> {
    check_shape(n, seq.m())?;
    let horizon = seq.rounds();
    let branching = branch_policy_for(n, seq.m(), horizon);
    Ok(filter_states(n, seq.m(), |s| {
        let mut all = true;
        visit_branches(s, horizon, branching, |t| {
            all = all && t.outcome == Outcome::AliceLost && WinLossSequence::from_trace(&t).ok().as_ref() == Some(seq);
        });
        all
    }))
}

/// The sequence every random-putback branch of `state` follows within
/// Bob's first passthrough, if there is one.
pub fn necessary_sequence(state: &GameState) -> Option<WinLossSequence> {
    let horizon = state.bob().len();
    let mut common: Option<Option<WinLossSequence>> = None;
    visit_branches(state, horizon, BranchPolicy::AliceOnly, |t| {
        let seq = (t.outcome == Outcome::AliceLost)
            .then(|| WinLossSequence::from_trace(&t).ok())
            .flatten();
        common = match common.take() {
            None => Some(seq),
            Some(prev) if prev == seq => Some(prev),
            Some(_) => Some(None),
        };
    });
    common.flatten()
}

/// Catalan-triangle prediction `C((R+m)/2 - 1, (R-m)/2) / 2^R`, zero on a
/// parity mismatch.
pub fn predicted_r_round(m: usize, rounds: usize) -> Rational {
    if rounds < m || (rounds - m) % 2 != 0 {
        return Rational::from(0u32);
    }
    let count = numerics::catalan_triangle(((rounds + m) / 2 - 1) as u64, ((rounds - m) / 2) as u64)
        .expect("(R-m)/2 <= (R+m)/2 - 1 for m >= 1");
    Rational::from(count) >> rounds as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::parse_state;
    use crate::numerics::{p_k, ratio, rational_pow};
    use crate::winloss::parse_sequence;

    fn strings(states: &[GameState]) -> Vec<String> {
        states.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn state_enumeration() {
        let s: Vec<String> = all_states(3, 1).map(|s| s.to_string()).collect();
        assert_eq!(s, vec!["1|23", "1|32", "2|13", "2|31", "3|12", "3|21"]);
        assert_eq!(all_states(4, 1).count(), 24);
        assert_eq!(all_states(5, 2).count(), 120);
        for n in 1..=7 {
            let sharded: Vec<GameState> = shard_prefixes(n)
                .iter()
                .flat_map(|p| shard_states(n, 1, p).collect::<Vec<_>>())
                .collect();
            let flat: Vec<GameState> = all_states(n, 1).collect();
            assert_eq!(sharded, flat);
        }
    }

    #[test]
    fn r_round_examples() {
        assert_eq!(probability_r_round(2, 1, 1, PutbackPolicy::Wl).unwrap(), ratio(1, 2));
        assert_eq!(probability_r_round(4, 1, 3, PutbackPolicy::Wl).unwrap(), ratio(1, 8));
        assert_eq!(
            probability_r_round(4, 1, 3, PutbackPolicy::Random).unwrap(),
            ratio(1, 8)
        );
        assert_eq!(probability_r_round(4, 1, 2, PutbackPolicy::Wl).unwrap(), ratio(0, 1));
        assert!(matches!(
            probability_r_round(3, 1, 3, PutbackPolicy::Wl),
            Err(CensusError::InsufficientDeck { .. })
        ));
    }

    #[test]
    fn r_round_matches_prediction() {
        for n in 2..=6 {
            for m in 1..=2.min(n - 1) {
                for r in m..=n - m {
                    let want = predicted_r_round(m, r);
                    for policy in [PutbackPolicy::Wl, PutbackPolicy::Random] {
                        assert_eq!(probability_r_round(n, m, r, policy).unwrap(), want, "{n} {m} {r}");
                    }
                }
            }
        }
    }

    #[test]
    fn passthrough_examples() {
        for policy in [PutbackPolicy::Wl, PutbackPolicy::Random] {
            assert_eq!(probability_k_passthrough(4, 1, 2, policy).unwrap(), ratio(5, 8));
            assert_eq!(probability_k_passthrough(4, 1, 1, policy).unwrap(), p_k(1));
        }
        assert_eq!(
            probability_k_passthrough(8, 2, 2, PutbackPolicy::Wl).unwrap(),
            rational_pow(&p_k(2), 2)
        );
        assert!(probability_k_passthrough(5, 1, 3, PutbackPolicy::Wl).is_err());
        // below the bound the census still reports a value
        observed_k_passthrough(5, 1, 3, PutbackPolicy::Wl).unwrap();
        observed_k_passthrough(5, 1, 3, PutbackPolicy::Random).unwrap();
    }

    #[test]
    fn random_weights_on_four_cards() {
        // 12 states end in one round, 2 more always end within two
        // passthroughs, 2 end within two passthroughs on half their branches
        let mut full = 0;
        let mut half = 0;
        for s in all_states(4, 1) {
            let c = classify_state(&s, PutbackPolicy::Random, 3);
            let total: Rational = c.branches.iter().fold(Rational::from(0u32), |acc, b| acc + &b.weight);
            assert_eq!(total, ratio(1, 1));
            let ok = c
                .branches
                .iter()
                .filter(|b| b.outcome == Outcome::AliceLost && b.passthroughs <= 2)
                .fold(Rational::from(0u32), |acc, b| acc + &b.weight);
            if ok == ratio(1, 1) {
                full += 1;
            } else if ok == ratio(1, 2) {
                half += 1;
            }
        }
        assert_eq!((full, half), (14, 2));
    }

    #[test]
    fn uniform_step() {
        let r = uniform_lemma_check(3, 1).unwrap();
        assert!(r.pass);
        assert_eq!(r.win_states, 6);
        assert_eq!(r.win_mass / Rational::from(6u32), ratio(1, 12));
        for (n, m) in [(4, 1), (4, 2), (4, 3), (5, 2)] {
            let r = uniform_lemma_check(n, m).unwrap();
            assert!(r.pass, "{n} {m}");
        }
    }

    #[test]
    fn matching_wl_examples() {
        let seq = parse_sequence("W/LL", 1).unwrap();
        assert_eq!(
            strings(&states_matching_wl(&seq, 4).unwrap()),
            vec!["2|134", "2|143", "3|142"]
        );
        let seq = parse_sequence("L", 1).unwrap();
        assert_eq!(strings(&states_matching_wl(&seq, 2).unwrap()), vec!["1|2"]);
        let seq = parse_sequence("W/LW/LL", 1).unwrap();
        assert_eq!(states_matching_wl(&seq, 6).unwrap().len(), 15);
    }

    #[test]
    fn necessary_random_examples() {
        let seq = parse_sequence("W/LL", 1).unwrap();
        assert_eq!(
            strings(&states_necessarily_random(&seq, 4).unwrap()),
            vec!["2|134", "2|143"]
        );
        let seq = parse_sequence("L", 1).unwrap();
        assert_eq!(strings(&states_necessarily_random(&seq, 2).unwrap()), vec!["1|2"]);
        assert_eq!(necessary_sequence(&parse_state("3|14256").unwrap()), None);
        assert_eq!(
            necessary_sequence(&parse_state("2|143").unwrap()),
            Some(parse_sequence("W/LL", 1).unwrap())
        );
    }
}
