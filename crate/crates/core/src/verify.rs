//! The verification suites: every counting and probability claim checked
//! exactly against enumeration, grouped into numbered criteria.

use malachite::base::num::arithmetic::traits::Pow;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::census::{
    self, predicted_r_round, probability_k_passthrough, probability_r_round, states_matching_wl,
    states_necessarily_random, uniform_lemma_check,
};
use crate::engine::{play_wl, GameState, PutbackPolicy};
use crate::graphs::{build_game_graph, check_block_structure};
use crate::numerics::{
    a_k, catalan_triangle, p_k, ratio, ratio_string, rational_pow, sum_product_identity_check, Dyadic,
};
use crate::posets::{
    build_random_poset, count_states_random_necessary, count_states_wl, linear_extensions_bruteforce, ruskey_count,
    slot_labels, HookedTreePoset,
};
use crate::trees::{all_full_binary_trees, label_tree, seq_to_tree, tree_to_game_graph, tree_to_seq};
use crate::winloss::{
    enumerate_sequences_passthrough, enumerate_sequences_rounds, parse_sequence, Letter, WinLossSequence,
};

/// Seed of the generator behind the random tree posets.
pub const TREE_POSET_SEED: u64 = 11;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub claim: &'static str,
    pub parameters: Value,
    pub expected: String,
    pub observed: String,
    pub pass: bool,
}

impl Check {
    fn new(claim: &'static str, parameters: Value, expected: impl ToString, observed: impl ToString) -> Self {
        let (expected, observed) = (expected.to_string(), observed.to_string());
        let pass = expected == observed;
        Self {
            claim,
            parameters,
            expected,
            observed,
            pass,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    S5,
    S6,
    S7,
}

impl std::str::FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "all" => Ok(Suite::All),
            "s5" => Ok(Suite::S5),
            "s6" => Ok(Suite::S6),
            "s7" => Ok(Suite::S7),
            other => Err(format!("unknown suite {other:?} (expected all, s5, s6 or s7)")),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Criterion {
    pub id: u8,
    pub title: &'static str,
    pub suite: Suite,
    run: fn(&Options) -> Vec<Check>,
}

impl Criterion {
    pub fn run(&self, options: &Options) -> CriterionReport {
        let checks = (self.run)(options);
        CriterionReport {
            id: self.id,
            title: self.title,
            pass: checks.iter().all(|c| c.pass),
            checks,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Options {
    /// Census runs on more cards than this are skipped.
    pub max_n: usize,
}

impl Default for Options {
    fn default() -> Self {
        Self { max_n: 8 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub pass: bool,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub suite: Suite,
    pub max_n: usize,
    pub pass: bool,
    pub criteria: Vec<CriterionReport>,
}

pub const CRITERIA: [Criterion; 13] = [
    Criterion {
        id: 1,
        title: "win-loss sequences by rounds follow the Catalan triangle",
        suite: Suite::All,
        run: sequence_counts_by_rounds,
    },
    Criterion {
        id: 2,
        title: "win-loss sequences within k passthroughs number A_k^m",
        suite: Suite::All,
        run: sequence_counts_by_passthroughs,
    },
    Criterion {
        id: 3,
        title: "unicard sequences and full binary trees are in bijection",
        suite: Suite::All,
        run: tree_bijection,
    },
    Criterion {
        id: 4,
        title: "labeled trees rebuild the game graph",
        suite: Suite::All,
        run: trees_rebuild_graphs,
    },
    Criterion {
        id: 5,
        title: "single-use game graphs are forests with one tree per Alice card",
        suite: Suite::All,
        run: block_forests,
    },
    Criterion {
        id: 6,
        title: "one random-putback round keeps the state distribution uniform",
        suite: Suite::S5,
        run: uniform_step,
    },
    Criterion {
        id: 7,
        title: "R-round probabilities match under both putbacks",
        suite: Suite::S5,
        run: r_round_probabilities,
    },
    Criterion {
        id: 8,
        title: "k-passthrough probabilities equal P_k^m",
        suite: Suite::S5,
        run: passthrough_probabilities,
    },
    Criterion {
        id: 9,
        title: "Catalan triangle equals the sum of Catalan products over compositions",
        suite: Suite::S5,
        run: catalan_sum_product,
    },
    Criterion {
        id: 10,
        title: "WL-putback state counts match the census",
        suite: Suite::S6,
        run: wl_state_counts,
    },
    Criterion {
        id: 11,
        title: "tree posets have n!/prod h linear extensions",
        suite: Suite::S6,
        run: tree_poset_extensions,
    },
    Criterion {
        id: 12,
        title: "necessarily-following state counts match poset and census",
        suite: Suite::S7,
        run: random_necessary_counts,
    },
    Criterion {
        id: 13,
        title: "P_k increases to at most 1 with 2(P_{k+1} - P_k) = (1 - P_k)^2",
        suite: Suite::S5,
        run: pk_properties,
    },
];

pub fn criteria(suite: Suite) -> Vec<Criterion> {
    CRITERIA
        .iter()
        .copied()
        .filter(|c| suite == Suite::All || c.suite == suite)
        .collect()
}

pub fn run_suite(suite: Suite, options: &Options) -> Report {
    let criteria: Vec<CriterionReport> = criteria(suite).iter().map(|c| c.run(options)).collect();
    Report {
        suite,
        max_n: options.max_n,
        pass: criteria.iter().all(|c| c.pass),
        criteria,
    }
}

fn unicard_states(n: usize) -> impl Iterator<Item = GameState> {
    census::all_states(n, 1)
}

fn sequence_counts_by_rounds(_: &Options) -> Vec<Check> {
    let mut out = Vec::new();
    for m in 1..=3usize {
        for r in 1..=9usize {
            let expected = if r >= m && (r - m) % 2 == 0 {
                catalan_triangle(((m + r) / 2 - 1) as u64, ((r - m) / 2) as u64).expect("in range")
            } else {
                0u32.into()
            };
            let params = json!({ "m": m, "rounds": r });
            out.push(Check::new(
                "sequences-by-rounds",
                params.clone(),
                &expected,
                enumerate_sequences_rounds(m, r).len(),
            ));
            // every W/L string of length r, kept when valid
            let brute = (0u32..1 << r)
                .filter(|bits| {
                    let letters = (0..r)
                        .map(|i| if bits >> i & 1 == 1 { Letter::W } else { Letter::L })
                        .collect();
                    WinLossSequence::new(letters, m).is_ok()
                })
                .count();
            out.push(Check::new("sequences-by-rounds-bruteforce", params, &expected, brute));
        }
    }
    out
}

fn sequence_counts_by_passthroughs(_: &Options) -> Vec<Check> {
    let mut out = Vec::new();
    for m in 1..=2usize {
        for k in 1..=4usize {
            let expected = a_k(k as u32).pow(m as u64);
            out.push(Check::new(
                "sequences-by-passthroughs",
                json!({ "m": m, "k": k }),
                expected,
                enumerate_sequences_passthrough(m, k).len(),
            ));
        }
    }
    out.push(Check::new("a4", json!({ "k": 4 }), 26, a_k(4)));
    out
}

fn tree_bijection(_: &Options) -> Vec<Check> {
    let seqs = enumerate_sequences_passthrough(1, 4);
    let seq_roundtrips = seqs
        .iter()
        .filter(|s| {
            seq_to_tree(s)
                .map(|t| &tree_to_seq(&t) == *s && t.height() == s.passthrough_count())
                .unwrap_or(false)
        })
        .count();
    let trees = all_full_binary_trees(4);
    let tree_roundtrips = trees
        .iter()
        .filter(|t| seq_to_tree(&tree_to_seq(t)).ok().as_ref() == Some(*t))
        .count();
    vec![
        Check::new("sequence-roundtrip", json!({ "k": 4 }), 26, seq_roundtrips),
        Check::new("tree-roundtrip", json!({ "max_height": 4 }), 26, tree_roundtrips),
    ]
}

fn trees_rebuild_graphs(options: &Options) -> Vec<Check> {
    let mut out = Vec::new();
    for n in 2..=7.min(options.max_n) {
        let mut games = 0;
        let mut agree = 0;
        for s in unicard_states(n) {
            let trace = play_wl(&s, census::wl_horizon(n));
            if !trace.single_use {
                continue;
            }
            games += 1;
            let ok = label_tree(&trace).ok().is_some_and(|trees| {
                trees
                    .iter()
                    .enumerate()
                    .all(|(b, t)| t.check_right_parent_rule(b).is_ok())
                    && tree_to_game_graph(&trees, n).ok() == Some(build_game_graph(&trace))
            });
            agree += usize::from(ok);
        }
        out.push(Check::new("tree-to-graph", json!({ "n": n }), games, agree));
    }
    out
}

fn block_forests(options: &Options) -> Vec<Check> {
    let mut out = Vec::new();
    for n in 2..=6.min(options.max_n) {
        for m in 1..=2.min(n - 1) {
            let mut games = 0;
            let mut forests = 0;
            for s in census::all_states(n, m) {
                let trace = play_wl(&s, census::wl_horizon(n));
                if trace.single_use {
                    games += 1;
                    forests += usize::from(check_block_structure(&trace).is_ok());
                }
            }
            out.push(Check::new("block-forest", json!({ "n": n, "m": m }), games, forests));
        }
    }
    out
}

fn uniform_step(options: &Options) -> Vec<Check> {
    [(3, 1), (4, 1), (4, 2), (5, 2)]
        .into_iter()
        .filter(|&(n, _)| n <= options.max_n)
        .map(|(n, m)| {
            let observed = match uniform_lemma_check(n, m) {
                Ok(r) => format!(
                    "win {} loss {} uniform {}/{}",
                    ratio_string(&r.win_mass),
                    ratio_string(&r.loss_mass),
                    r.win_uniform,
                    r.loss_uniform
                ),
                Err(e) => e.to_string(),
            };
            Check::new(
                "uniform-step",
                json!({ "n": n, "m": m }),
                "win 1/2 loss 1/2 uniform true/true",
                observed,
            )
        })
        .collect()
}

fn policy_name(p: PutbackPolicy) -> &'static str {
    match p {
        PutbackPolicy::Wl => "wl",
        PutbackPolicy::Random => "random",
    }
}

const POLICIES: [PutbackPolicy; 2] = [PutbackPolicy::Wl, PutbackPolicy::Random];

fn observed_ratio<E: ToString>(r: Result<crate::Rational, E>) -> String {
    r.map_or_else(|e| e.to_string(), |v| ratio_string(&v))
}

fn r_round_probabilities(options: &Options) -> Vec<Check> {
    let mut out = Vec::new();
    for n in 2..=7.min(options.max_n) {
        for m in 1..=2.min(n - 1) {
            for r in (m..=n - m).step_by(2) {
                let expected = ratio_string(&predicted_r_round(m, r));
                for policy in POLICIES {
                    out.push(Check::new(
                        "r-round-probability",
                        json!({ "n": n, "m": m, "rounds": r, "putback": policy_name(policy) }),
                        &expected,
                        observed_ratio(probability_r_round(n, m, r, policy)),
                    ));
                }
            }
        }
    }
    if options.max_n >= 4 {
        for policy in POLICIES {
            out.push(Check::new(
                "r-round-point",
                json!({ "n": 4, "m": 1, "rounds": 3, "putback": policy_name(policy) }),
                "1/8",
                observed_ratio(probability_r_round(4, 1, 3, policy)),
            ));
            out.push(Check::new(
                "k-passthrough-point",
                json!({ "n": 4, "m": 1, "k": 2, "putback": policy_name(policy) }),
                "5/8",
                observed_ratio(probability_k_passthrough(4, 1, 2, policy)),
            ));
        }
    }
    out
}

fn passthrough_probabilities(options: &Options) -> Vec<Check> {
    let mut out = Vec::new();
    for (n, m, k, anchor) in [
        (4, 1, 2, "5/8"),
        (8, 1, 2, "5/8"),
        (8, 1, 3, "89/128"),
        (8, 2, 2, "25/64"),
    ] {
        if n > options.max_n {
            continue;
        }
        let expected = ratio_string(&rational_pow(&p_k(k as u32), m as u64));
        out.push(Check::new("pk-power", json!({ "m": m, "k": k }), anchor, &expected));
        for policy in POLICIES {
            out.push(Check::new(
                "k-passthrough-probability",
                json!({ "n": n, "m": m, "k": k, "putback": policy_name(policy) }),
                &expected,
                observed_ratio(probability_k_passthrough(n, m, k, policy)),
            ));
        }
    }
    out
}

fn catalan_sum_product(_: &Options) -> Vec<Check> {
    let mut out = Vec::new();
    for m in 1..=5u64 {
        for k in 0..=8u64 {
            let (lhs, rhs) = sum_product_identity_check(m, k);
            out.push(Check::new("catalan-sum-product", json!({ "m": m, "k": k }), lhs, rhs));
        }
    }
    out
}

fn state_strings(states: &[GameState]) -> String {
    states.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ")
}

fn wl_state_counts(options: &Options) -> Vec<Check> {
    let mut out = Vec::new();
    let example = parse_sequence("W/LL", 1).expect("valid sequence");
    if options.max_n >= 4 {
        out.push(Check::new(
            "wl-states-example",
            json!({ "sequence": "W/LL" }),
            "2|134 2|143 3|142",
            states_matching_wl(&example, 4).map_or_else(|e| e.to_string(), |s| state_strings(&s)),
        ));
    }
    for k in 1..=4usize {
        let n = 2 * k;
        if n > options.max_n {
            continue;
        }
        for seq in enumerate_sequences_rounds(1, 2 * k - 1) {
            let expected = count_states_wl(&seq).map_or_else(|e| e.to_string(), |c| c.to_string());
            let observed = states_matching_wl(&seq, n).map_or_else(|e| e.to_string(), |s| s.len().to_string());
            out.push(Check::new(
                "wl-state-count",
                json!({ "sequence": seq.stylize(), "n": n }),
                expected,
                observed,
            ));
        }
    }
    out
}

fn tree_poset_extensions(_: &Options) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(TREE_POSET_SEED);
    (0..200)
        .map(|i| {
            let size = rng.random_range(1..=9usize);
            let parent: Vec<Option<usize>> = (0..size).map(|v| (v > 0).then(|| rng.random_range(0..v))).collect();
            let tree = HookedTreePoset::from_parents(slot_labels(size), parent.clone()).expect("valid tree");
            let observed =
                linear_extensions_bruteforce(&tree.to_poset()).map_or_else(|e| e.to_string(), |c| c.to_string());
            Check::new(
                "tree-poset-extensions",
                json!({ "trial": i, "parents": parent }),
                ruskey_count(&tree),
                observed,
            )
        })
        .collect()
}

fn random_necessary_counts(options: &Options) -> Vec<Check> {
    let mut out = Vec::new();
    let example = parse_sequence("W/LL", 1).expect("valid sequence");
    if options.max_n >= 4 {
        out.push(Check::new(
            "random-necessary-example",
            json!({ "sequence": "W/LL" }),
            "2|134 2|143",
            states_necessarily_random(&example, 4).map_or_else(|e| e.to_string(), |s| state_strings(&s)),
        ));
    }
    for k in 1..=3usize {
        let n = 2 * k;
        if n > options.max_n {
            continue;
        }
        for seq in enumerate_sequences_rounds(1, 2 * k - 1) {
            let params = json!({ "sequence": seq.stylize(), "n": n });
            let expected = count_states_random_necessary(&seq).map_or_else(|e| e.to_string(), |c| c.to_string());
            let poset = build_random_poset(&seq)
                .map_err(|e| e.to_string())
                .and_then(|p| linear_extensions_bruteforce(&p).map_err(|e| e.to_string()))
                .map_or_else(|e| e, |c| c.to_string());
            let census = states_necessarily_random(&seq, n).map_or_else(|e| e.to_string(), |s| s.len().to_string());
            out.push(Check::new("random-necessary-poset", params.clone(), &expected, poset));
            out.push(Check::new("random-necessary-census", params, &expected, census));
        }
    }
    out
}

/// Walks `P_1 .. P_31` once, checking each consecutive pair. Numerators
/// reach `2^31` bits, so every quantity stays a dyadic rational.
fn pk_properties(_: &Options) -> Vec<Check> {
    let one = Dyadic::one();
    let mut p = Dyadic::new(1u32.into(), 1);
    let mut out = vec![Check::new("pk-first", json!({ "k": 1 }), "1/2", p.to_string())];
    for k in 1..=30u32 {
        let next = p.square().add(&one).scale_pow2(-1);
        let lhs = next.sub(&p).scale_pow2(1);
        let rhs = one.sub(&p).square();
        let params = json!({ "k": k });
        out.push(Check::new("pk-identity", params.clone(), true, lhs == rhs));
        out.push(Check::new("pk-increasing", params.clone(), true, next > p));
        out.push(Check::new("pk-below-one", params, true, p < one && next < one));
        if k <= 3 {
            let exact = [ratio(5, 8), ratio(89, 128), ratio(24305, 32768)][k as usize - 1].clone();
            out.push(Check::new(
                "pk-value",
                json!({ "k": k + 1 }),
                ratio_string(&exact),
                ratio_string(&next.to_rational()),
            ));
        }
        p = next;
    }
    out
}
