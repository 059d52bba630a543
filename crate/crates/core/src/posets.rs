//! Posets on card slots and the state counts built on them.
//!
//! A win-loss sequence fixes, round by round, which slot beats which: slot
//! `i < m` is Alice's `i`-th card, slot `m + j` is Bob's `j`-th card. Any
//! assignment of the values `1..=n` to slots that respects those relations is
//! an initial state realizing the sequence, so state counts are counts of
//! linear extensions.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use malachite::base::num::arithmetic::traits::DivExact;
use serde::Serialize;
use thiserror::Error;

use crate::engine::{Card, GameState};
use crate::numerics::{factorial, multinomial, power_of_two, BigInt};
use crate::trees::seq_to_tree;
use crate::winloss::{split_blocks, Letter, SequenceError, WinLossSequence};

/// Largest poset the brute-force extension counter accepts.
pub const ORACLE_LIMIT: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PosetError {
    #[error("relations contain a cycle through element {0}")]
    Cycle(usize),
    #[error("element {element} out of range for {size} elements")]
    OutOfRange { element: usize, size: usize },
    #[error("poset has {size} elements, the brute-force limit is {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("parent list does not describe a rooted tree")]
    NotATree,
    #[error(transparent)]
    Sequence(#[from] SequenceError),
}

/// Solid edges come from rounds Alice won, dashed ones from rounds Bob won.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EdgeStyle {
    Solid,
    Dashed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Cover {
    pub greater: usize,
    pub lesser: usize,
    pub style: EdgeStyle,
}

/// Finite poset given by its Hasse diagram.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Poset {
    labels: Vec<String>,
    covers: Vec<Cover>,
    #[serde(skip)]
    above: Vec<Vec<bool>>,
}

impl Poset {
    /// Builds the poset generated by `(greater, lesser, style)` relations,
    /// keeping only the cover relations.
    pub fn from_relations(labels: Vec<String>, relations: &[(usize, usize, EdgeStyle)]) -> Result<Self, PosetError> {
        let n = labels.len();
        // above[x][y]: x > y
        let mut above = vec![vec![false; n]; n];
        for &(g, l, _) in relations {
            for e in [g, l] {
                if e >= n {
                    return Err(PosetError::OutOfRange { element: e, size: n });
                }
            }
            above[g][l] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if above[i][k] {
                    for j in 0..n {
                        if above[k][j] {
                            above[i][j] = true;
                        }
                    }
                }
            }
        }
        if let Some(i) = (0..n).find(|&i| above[i][i]) {
            return Err(PosetError::Cycle(i));
        }
        let mut covers = Vec::new();
        let mut seen = BTreeSet::new();
        for &(g, l, style) in relations {
            let implied = (0..n).any(|z| above[g][z] && above[z][l]);
            if !implied && seen.insert((g, l)) {
                covers.push(Cover {
                    greater: g,
                    lesser: l,
                    style,
                });
            }
        }
        covers.sort_by_key(|c| (c.greater, c.lesser));
        Ok(Self { labels, covers, above })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn covers(&self) -> &[Cover] {
        &self.covers
    }

    pub fn greater(&self, x: usize, y: usize) -> bool {
        self.above[x][y]
    }

    /// Elements with nothing above them.
    pub fn maximal(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&x| (0..self.len()).all(|y| !self.above[y][x]))
            .collect()
    }

    /// Rank of each element: length of the longest chain below it.
    pub fn ranks(&self) -> Vec<usize> {
        let n = self.len();
        let mut rank = vec![0; n];
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&x| (0..n).filter(|&y| self.above[x][y]).count());
        for &x in &order {
            rank[x] = self
                .covers
                .iter()
                .filter(|c| c.greater == x)
                .map(|c| rank[c.lesser] + 1)
                .max()
                .unwrap_or(0);
        }
        rank
    }

    /// One linear extension: the value (1-based) given to each element.
    /// Values are handed out from the bottom, always to the lowest-indexed
    /// element whose lower covers are all placed.
    pub fn some_linear_extension(&self) -> Vec<u32> {
        let n = self.len();
        let mut value = vec![0u32; n];
        for v in 1..=n as u32 {
            let x = (0..n)
                .find(|&x| value[x] == 0 && (0..n).all(|y| !self.above[x][y] || value[y] != 0))
                .expect("a finite poset always has a minimal unplaced element");
            value[x] = v;
        }
        value
    }

    /// Hasse diagram with one `rank=same` group per layer.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph poset {\n  rankdir=BT;\n");
        let ranks = self.ranks();
        let top = ranks.iter().copied().max().unwrap_or(0);
        for r in 0..=top {
            let layer: Vec<String> = (0..self.len())
                .filter(|&x| ranks[x] == r)
                .map(|x| format!("\"{}\"", self.labels[x]))
                .collect();
            if !layer.is_empty() {
                let _ = writeln!(out, "  {{ rank=same; {}; }}", layer.join("; "));
            }
        }
        for c in &self.covers {
            let style = match c.style {
                EdgeStyle::Solid => "solid",
                EdgeStyle::Dashed => "dashed",
            };
            let _ = writeln!(
                out,
                "  \"{}\" -> \"{}\" [style={style}];",
                self.labels[c.lesser], self.labels[c.greater]
            );
        }
        out.push_str("}\n");
        out
    }
}

/// Counts linear extensions by building every one of them, a value at a
/// time from the bottom.
pub fn linear_extensions_bruteforce(poset: &Poset) -> Result<BigInt, PosetError> {
    let n = poset.len();
    if n > ORACLE_LIMIT {
        return Err(PosetError::TooLarge {
            size: n,
            limit: ORACLE_LIMIT,
        });
    }
    let below: Vec<u32> = (0..n)
        .map(|x| (0..n).filter(|&y| poset.greater(x, y)).fold(0, |m, y| m | 1 << y))
        .collect();
    fn walk(placed: u32, full: u32, below: &[u32]) -> u64 {
        if placed == full {
            return 1;
        }
        (0..below.len())
            .filter(|&x| placed & 1 << x == 0 && below[x] & !placed == 0)
            .map(|x| walk(placed | 1 << x, full, below))
            .sum()
    }
    let full = if n == 0 { 0 } else { u32::MAX >> (32 - n) };
    Ok(BigInt::from(walk(0, full, &below)))
}

/// Rooted tree whose root is the greatest element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HookedTreePoset {
    labels: Vec<String>,
    parent: Vec<Option<usize>>,
    hooks: Vec<u64>,
}

impl HookedTreePoset {
    pub fn from_parents(labels: Vec<String>, parent: Vec<Option<usize>>) -> Result<Self, PosetError> {
        let n = parent.len();
        if labels.len() != n || parent.iter().filter(|p| p.is_none()).count() != 1 {
            return Err(PosetError::NotATree);
        }
        let mut hooks = vec![1u64; n];
        for v in 0..n {
            let mut x = v;
            let mut steps = 0;
            while let Some(p) = parent[x] {
                if p >= n || steps == n {
                    return Err(PosetError::NotATree);
                }
                hooks[p] += 1;
                x = p;
                steps += 1;
            }
        }
        Ok(Self { labels, parent, hooks })
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    /// Size of the subtree at each vertex.
    pub fn hooks(&self) -> &[u64] {
        &self.hooks
    }

    pub fn hook_product(&self) -> BigInt {
        self.hooks
            .iter()
            .fold(BigInt::from(1u32), |acc, &h| acc * BigInt::from(h))
    }

    pub fn to_poset(&self) -> Poset {
        let relations: Vec<_> = (0..self.len())
            .filter_map(|v| self.parent[v].map(|p| (p, v, EdgeStyle::Solid)))
            .collect();
        Poset::from_relations(self.labels.clone(), &relations).expect("a rooted tree is acyclic")
    }
}

/// Linear extensions of a tree poset: `n! / prod h(v)`.
pub fn ruskey_count(tree: &HookedTreePoset) -> BigInt {
    factorial(tree.len() as u64).div_exact(tree.hook_product())
}

/// Letter names `a, b, c, ...` for up to 26 slots, `s0, s1, ...` beyond.
pub fn slot_labels(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| {
            if n <= 26 {
                char::from(b'a' + i as u8).to_string()
            } else {
                format!("s{i}")
            }
        })
        .collect()
}

/// One round of symbolic play.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct SlotRound {
    alice: usize,
    bob: usize,
    alice_won: bool,
}

/// Plays `seq` under WL-putback on slots, with Bob holding exactly one slot
/// per round.
fn symbolic_wl(seq: &WinLossSequence) -> Vec<SlotRound> {
    let m = seq.m();
    let mut hand: VecDeque<usize> = (0..m).collect();
    let mut rounds = Vec::with_capacity(seq.rounds());
    for (j, &letter) in seq.letters().iter().enumerate() {
        let alice = hand
            .pop_front()
            .expect("a valid sequence never empties Alice's hand early");
        let bob = m + j;
        let alice_won = letter == Letter::W;
        if alice_won {
            hand.extend([alice, bob]);
        }
        rounds.push(SlotRound { alice, bob, alice_won });
    }
    rounds
}

/// Winner-to-loser poset of the WL-putback game realizing `seq` on
/// `m + R` cards.
pub fn wl_poset(seq: &WinLossSequence) -> Poset {
    let relations: Vec<_> = symbolic_wl(seq)
        .into_iter()
        .map(|r| {
            if r.alice_won {
                (r.alice, r.bob, EdgeStyle::Solid)
            } else {
                (r.bob, r.alice, EdgeStyle::Dashed)
            }
        })
        .collect();
    Poset::from_relations(slot_labels(seq.m() + seq.rounds()), &relations)
        .expect("winner-to-loser relations of a game are acyclic")
}

/// The tree formed by Alice's card and every card she wins, each hanging
/// below the card that won it.
pub fn wl_tree_component(seq: &WinLossSequence) -> Result<HookedTreePoset, PosetError> {
    if !seq.is_unicard() {
        return Err(SequenceError::NotUnicard(seq.m()).into());
    }
    let names = slot_labels(1 + seq.rounds());
    let mut slots = vec![0];
    let mut parent = vec![None];
    for r in symbolic_wl(seq).into_iter().filter(|r| r.alice_won) {
        let p = slots
            .iter()
            .position(|&s| s == r.alice)
            .expect("winner is already in the tree");
        slots.push(r.bob);
        parent.push(Some(p));
    }
    let labels = slots.iter().map(|&s| names[s].clone()).collect();
    HookedTreePoset::from_parents(labels, parent)
}

/// Number of unicard states on `2k` cards whose WL-putback game follows
/// `seq`: `(2k)! / (2^k prod h)` over the tree component.
pub fn count_states_wl(seq: &WinLossSequence) -> Result<BigInt, PosetError> {
    let tree = wl_tree_component(seq)?;
    let k = seq.losses() as u64;
    Ok(factorial(2 * k).div_exact(power_of_two(k) * tree.hook_product()))
}

/// Number of `m`-card states on `m + R` cards whose WL-putback game follows
/// `seq`. The blocks' posets are disjoint, so the count is the number of
/// ways to split the values among blocks times each block's own count.
pub fn count_states_wl_mcard(seq: &WinLossSequence) -> Result<BigInt, PosetError> {
    let blocks = split_blocks(seq);
    let sizes: Vec<u64> = blocks.iter().map(|b| 2 * b.losses() as u64).collect();
    let mut count = multinomial(&sizes);
    for b in &blocks {
        count *= count_states_wl(b)?;
    }
    Ok(count)
}

/// An initial state whose WL-putback game follows `seq`.
pub fn witness_state_wl(seq: &WinLossSequence) -> GameState {
    witness_from(&wl_poset(seq), seq.m())
}

fn witness_from(poset: &Poset, m: usize) -> GameState {
    let values: Vec<Card> = poset.some_linear_extension().into_iter().map(Card).collect();
    GameState::new(values[..m].to_vec(), values[m..].to_vec()).expect("a linear extension is a permutation of 1..=n")
}

/// Pruned win-loss tree: Alice's card on top, and below it the W rounds
/// arranged as in the binary tree with the leaves removed, each W node
/// standing for the card Bob loses in that round.
pub fn random_bottom_tree(seq: &WinLossSequence) -> Result<HookedTreePoset, PosetError> {
    let tree = seq_to_tree(seq).map_err(|_| SequenceError::NotUnicard(seq.m()))?;
    let names = slot_labels(1 + seq.rounds());
    // tree node v is round v + 1, played against Bob's slot v + 1
    let mut index = vec![usize::MAX; tree.len()];
    let mut labels = vec![names[0].clone()];
    let mut parent = vec![None];
    for v in tree.level_order() {
        if tree.is_leaf(v) {
            continue;
        }
        index[v] = labels.len();
        labels.push(names[v + 1].clone());
        parent.push(Some(tree.parent(v).map_or(0, |(p, _)| index[p])));
    }
    HookedTreePoset::from_parents(labels, parent)
}

/// The poset a unicard state must respect for every random-putback branch
/// of its game to follow `seq`: Bob's L-round cards all above Alice's card,
/// the pruned W structure below it.
pub fn build_random_poset(seq: &WinLossSequence) -> Result<Poset, PosetError> {
    let bottom = random_bottom_tree(seq)?;
    let names = slot_labels(1 + seq.rounds());
    let slot_of = |label: &str| names.iter().position(|n| n == label).expect("label is a slot name");
    let mut relations: Vec<_> = (0..bottom.len())
        .filter_map(|v| {
            bottom.parent(v).map(|p| {
                (
                    slot_of(&bottom.labels()[p]),
                    slot_of(&bottom.labels()[v]),
                    EdgeStyle::Solid,
                )
            })
        })
        .collect();
    for (j, &letter) in seq.letters().iter().enumerate() {
        if letter == Letter::L {
            relations.push((j + 1, 0, EdgeStyle::Dashed));
        }
    }
    Poset::from_relations(names, &relations)
}

/// Number of unicard states on `2k` cards all of whose random-putback
/// branches follow `seq`: `(k!)^2 / prod h` over the bottom tree.
pub fn count_states_random_necessary(seq: &WinLossSequence) -> Result<BigInt, PosetError> {
    let bottom = random_bottom_tree(seq)?;
    let k = factorial(seq.losses() as u64);
    Ok((&k * &k).div_exact(bottom.hook_product()))
}

/// An initial state every random-putback branch of which follows `seq`.
pub fn witness_state_random(seq: &WinLossSequence) -> Result<GameState, PosetError> {
    Ok(witness_from(&build_random_poset(seq)?, 1))
}
