//! Game graphs: one vertex per card and one edge per round between the two
//! cards played. Single-use games give forests whose components are the
//! blocks of the game.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::engine::{Card, EngineError, GameTrace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge {0}-{1} closes a cycle")]
    Cycle(Card, Card),
    #[error("expected {expected} nontrivial components, found {found}")]
    ComponentCount { expected: usize, found: usize },
    #[error("component with minimum card {0} does not hold exactly one of Alice's initial cards")]
    RootCount(Card),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Undirected multigraph on cards `1..=n`. Edges are kept as a sorted list
/// of `(low, high)` pairs so that equal graphs compare equal regardless of
/// round order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GameGraph {
    n: usize,
    edges: Vec<(Card, Card)>,
}

impl GameGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (Card, Card)>) -> Self {
        let mut edges: Vec<_> = edges.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        edges.sort();
        Self { n, edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(Card, Card)] {
        &self.edges
    }

    pub fn degree(&self, card: Card) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == card || b == card).count()
    }

    /// Cards touching no edge, ascending.
    pub fn isolated(&self) -> Vec<Card> {
        (1..=self.n as u32).map(Card).filter(|&c| self.degree(c) == 0).collect()
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph game {\n");
        for c in 1..=self.n {
            let _ = writeln!(out, "  {c};");
        }
        for (a, b) in &self.edges {
            let _ = writeln!(out, "  {a} -- {b};");
        }
        out.push_str("}\n");
        out
    }
}

pub fn build_game_graph(trace: &GameTrace) -> GameGraph {
    GameGraph::new(
        trace.initial.n(),
        trace.rounds.iter().map(|r| (r.alice_card, r.bob_card)),
    )
}

/// One nontrivial connected component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Component {
    pub vertices: Vec<Card>,
    pub edges: Vec<(Card, Card)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Forest {
    /// Ordered by minimum card.
    pub trees: Vec<Component>,
    pub isolated: Vec<Card>,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Splits an acyclic game graph into its trees and isolated cards. A
/// repeated edge counts as a cycle.
pub fn forest_decomposition(graph: &GameGraph) -> Result<Forest, GraphError> {
    let mut uf = UnionFind::new(graph.n + 1);
    for &(a, b) in &graph.edges {
        if !uf.union(a.0 as usize, b.0 as usize) {
            return Err(GraphError::Cycle(a, b));
        }
    }
    let mut groups: BTreeMap<usize, Component> = BTreeMap::new();
    for &(a, b) in &graph.edges {
        let root = uf.find(a.0 as usize);
        groups
            .entry(root)
            .or_insert_with(|| Component {
                vertices: Vec::new(),
                edges: Vec::new(),
            })
            .edges
            .push((a, b));
    }
    for c in 1..=graph.n {
        let root = uf.find(c);
        if let Some(comp) = groups.get_mut(&root) {
            comp.vertices.push(Card(c as u32));
        }
    }
    let mut trees: Vec<Component> = groups.into_values().collect();
    trees.sort_by_key(|t| t.vertices[0]);
    Ok(Forest {
        trees,
        isolated: graph.isolated(),
    })
}

/// Checks the block structure of a single-use game: its graph is a forest
/// with one nontrivial tree per initial Alice card, each tree holding
/// exactly one of them.
pub fn check_block_structure(trace: &GameTrace) -> Result<Forest, GraphError> {
    let forest = forest_decomposition(&build_game_graph(trace))?;
    let alice = trace.initial.alice();
    if forest.trees.len() != alice.len() {
        return Err(GraphError::ComponentCount {
            expected: alice.len(),
            found: forest.trees.len(),
        });
    }
    for t in &forest.trees {
        if t.vertices.iter().filter(|c| alice.contains(c)).count() != 1 {
            return Err(GraphError::RootCount(t.vertices[0]));
        }
    }
    Ok(forest)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Orientation {
    WinnerToLoser,
    AliceToBob,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Arc {
    pub from: Card,
    pub to: Card,
    pub round: usize,
    pub alice_won: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GameDigraph {
    pub n: usize,
    pub mode: Orientation,
    pub start_round: usize,
    pub arcs: Vec<Arc>,
    /// Alice's hand just before `start_round`.
    pub roots: Vec<Card>,
}

impl GameDigraph {
    pub fn out_degree(&self, card: Card) -> usize {
        self.arcs.iter().filter(|a| a.from == card).count()
    }

    pub fn in_degree(&self, card: Card) -> usize {
        self.arcs.iter().filter(|a| a.to == card).count()
    }

    /// Kahn's algorithm over the arcs.
    pub fn is_acyclic(&self) -> bool {
        let mut indeg = vec![0usize; self.n + 1];
        for a in &self.arcs {
            indeg[a.to.0 as usize] += 1;
        }
        let mut ready: Vec<usize> = (1..=self.n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = ready.pop() {
            seen += 1;
            for a in self.arcs.iter().filter(|a| a.from.0 as usize == v) {
                let t = a.to.0 as usize;
                indeg[t] -= 1;
                if indeg[t] == 0 {
                    ready.push(t);
                }
            }
        }
        seen == self.n
    }

    /// Rounds Alice won are drawn solid; rounds Bob won with the higher card
    /// are dashed.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph game {\n");
        for c in 1..=self.n {
            let _ = writeln!(out, "  {c};");
        }
        for a in &self.arcs {
            let style = if a.alice_won { "solid" } else { "dashed" };
            let _ = writeln!(out, "  {} -> {} [style={style}];", a.from, a.to);
        }
        out.push_str("}\n");
        out
    }
}

/// Orients the rounds from `start_round` (1-based) onwards.
pub fn orient(trace: &GameTrace, mode: Orientation, start_round: usize) -> Result<GameDigraph, GraphError> {
    let roots = trace.state_before(start_round)?.alice().to_vec();
    let arcs = trace.rounds[start_round - 1..]
        .iter()
        .map(|r| {
            let (from, to) = match mode {
                Orientation::WinnerToLoser => (r.winning_card(), r.losing_card()),
                Orientation::AliceToBob => (r.alice_card, r.bob_card),
            };
            Arc {
                from,
                to,
                round: r.index,
                alice_won: r.alice_won(),
            }
        })
        .collect();
    Ok(GameDigraph {
        n: trace.initial.n(),
        mode,
        start_round,
        arcs,
        roots,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Subblock {
    pub root: Card,
    pub rounds: Vec<usize>,
}

/// Groups the rounds from `start_round` by the card in Alice's hand at that
/// point that they descend from. A card Alice wins joins the subblock of
/// the card that won it.
pub fn subblocks(trace: &GameTrace, start_round: usize) -> Result<Vec<Subblock>, GraphError> {
    let roots = trace.state_before(start_round)?.alice().to_vec();
    let mut owner: HashMap<Card, usize> = roots.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut blocks: Vec<Subblock> = roots
        .iter()
        .map(|&root| Subblock {
            root,
            rounds: Vec::new(),
        })
        .collect();
    for r in &trace.rounds[start_round - 1..] {
        let b = owner[&r.alice_card];
        blocks[b].rounds.push(r.index);
        if r.alice_won() {
            owner.insert(r.bob_card, b);
        }
    }
    Ok(blocks)
}
