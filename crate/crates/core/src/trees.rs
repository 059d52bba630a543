//! Win-loss binary trees.
//!
//! Each round of a unicard game Alice loses is a node: L rounds are leaves,
//! and a W round has two children, the next rounds played by the card put
//! back first (left) and second (right). Reading the tree level by level
//! gives back the win-loss sequence, one passthrough per level.

use std::collections::{HashSet, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::engine::{Card, GameTrace};
use crate::graphs::GameGraph;
use crate::winloss::{Letter, SequenceError, WinLossSequence};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error("trace is not a single-use game")]
    NotSingleUse,
    #[error("round {round}: Alice played {played}, but her hand says {expected}")]
    InconsistentTrace { round: usize, played: Card, expected: Card },
    #[error("node {node} of block {block}: Alice's card {found} should be {expected}")]
    InconsistentLabels {
        block: usize,
        node: usize,
        found: Card,
        expected: Card,
    },
    #[error("card {0} is played by Bob more than once")]
    DuplicateBobCard(Card),
    #[error("card {card} exceeds the deck size {n}")]
    CardOutOfRange { card: Card, n: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// Full binary tree stored in level order: node 0 is the root and every
/// level is contiguous, left to right. Two trees are equal exactly when
/// their shapes are.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FullBinaryTree {
    children: Vec<Option<(usize, usize)>>,
    parent: Vec<Option<(usize, Side)>>,
}

impl FullBinaryTree {
    pub fn leaf() -> Self {
        Self::from_children(vec![None])
    }

    /// A new root with `left` and `right` as its subtrees.
    pub fn join(left: &Self, right: &Self) -> Self {
        let mut children = vec![Some((1, 2)), None, None];
        let mut queue = VecDeque::from([(1, left, 0), (2, right, 0)]);
        while let Some((new, tree, old)) = queue.pop_front() {
            if let Some((a, b)) = tree.children[old] {
                let first = children.len();
                children.extend([None, None]);
                children[new] = Some((first, first + 1));
                queue.push_back((first, tree, a));
                queue.push_back((first + 1, tree, b));
            }
        }
        Self::from_children(children)
    }

    fn from_children(children: Vec<Option<(usize, usize)>>) -> Self {
        let mut parent = vec![None; children.len()];
        for (i, c) in children.iter().enumerate() {
            if let Some((l, r)) = *c {
                parent[l] = Some((i, Side::Left));
                parent[r] = Some((i, Side::Right));
            }
        }
        let tree = Self { children, parent };
        debug_assert!(tree.level_order().into_iter().eq(0..tree.len()));
        tree
    }

    pub fn len(&self) -> usize {
        self.children.len()
    }

    pub fn is_empty(&self) -> bool {
        self.children.is_empty()
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn children(&self, node: usize) -> Option<(usize, usize)> {
        self.children[node]
    }

    pub fn parent(&self, node: usize) -> Option<(usize, Side)> {
        self.parent[node]
    }

    pub fn is_leaf(&self, node: usize) -> bool {
        self.children[node].is_none()
    }

    pub fn letter(&self, node: usize) -> Letter {
        if self.is_leaf(node) {
            Letter::L
        } else {
            Letter::W
        }
    }

    pub fn depth(&self, mut node: usize) -> usize {
        let mut d = 0;
        while let Some((p, _)) = self.parent[node] {
            node = p;
            d += 1;
        }
        d
    }

    /// Number of levels; a lone leaf has height 1.
    pub fn height(&self) -> usize {
        (0..self.len()).map(|v| self.depth(v)).max().map_or(0, |d| d + 1)
    }

    /// Breadth-first node order starting at the root.
    pub fn level_order(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.len());
        let mut queue = VecDeque::from([0]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            if let Some((l, r)) = self.children[v] {
                queue.push_back(l);
                queue.push_back(r);
            }
        }
        order
    }

    /// The parent of the nearest ancestor of `node` (itself included) that is
    /// a right child, or `None` when every step up is from a left child.
    pub fn right_parent(&self, node: usize) -> Option<usize> {
        let mut x = node;
        while let Some((p, side)) = self.parent[x] {
            if side == Side::Right {
                return Some(p);
            }
            x = p;
        }
        None
    }

    /// DOT rendering with each node labeled by its letter.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph tree {\n  node [shape=plaintext];\n");
        for v in 0..self.len() {
            let _ = writeln!(out, "  n{v} [label=\"{}\"];", self.letter(v).as_char());
        }
        for v in 0..self.len() {
            if let Some((l, r)) = self.children[v] {
                let _ = writeln!(out, "  n{v} -- n{l};");
                let _ = writeln!(out, "  n{v} -- n{r};");
            }
        }
        out.push_str("}\n");
        out
    }

    /// Copy of the subtree hanging from `node`.
    pub fn subtree(&self, node: usize) -> Self {
        let mut children = vec![None];
        let mut queue = VecDeque::from([(0, node)]);
        while let Some((new, old)) = queue.pop_front() {
            if let Some((a, b)) = self.children[old] {
                let first = children.len();
                children.extend([None, None]);
                children[new] = Some((first, first + 1));
                queue.push_back((first, a));
                queue.push_back((first + 1, b));
            }
        }
        Self::from_children(children)
    }
}

/// Builds the tree of a unicard sequence: passthrough `i` fills level `i`
/// from left to right, and each W gets the next two slots of the level below.
pub fn seq_to_tree(seq: &WinLossSequence) -> Result<FullBinaryTree, TreeError> {
    if !seq.is_unicard() {
        return Err(SequenceError::NotUnicard(seq.m()).into());
    }
    let letters = seq.letters();
    let mut children = vec![None; letters.len()];
    let mut next = 1;
    for (i, &letter) in letters.iter().enumerate() {
        if letter == Letter::W {
            children[i] = Some((next, next + 1));
            next += 2;
        }
    }
    debug_assert_eq!(next, letters.len());
    Ok(FullBinaryTree::from_children(children))
}

/// Reads the tree top to bottom, left to right: W for internal nodes, L for
/// leaves.
pub fn tree_to_seq(tree: &FullBinaryTree) -> WinLossSequence {
    let letters = tree.level_order().into_iter().map(|v| tree.letter(v)).collect();
    WinLossSequence::new(letters, 1).expect("a full binary tree always reads as a valid sequence")
}

/// Every full binary tree with at most `max_height` levels, built by
/// joining smaller trees.
pub fn all_full_binary_trees(max_height: usize) -> Vec<FullBinaryTree> {
    let mut trees = Vec::new();
    for _ in 0..max_height {
        let mut next = vec![FullBinaryTree::leaf()];
        for l in &trees {
            for r in &trees {
                next.push(FullBinaryTree::join(l, r));
            }
        }
        trees = next;
    }
    trees
}

/// A block's win-loss tree with the two cards played at every node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledWinLossTree {
    tree: FullBinaryTree,
    /// `(alice_card, bob_card)` per node.
    labels: Vec<(Card, Card)>,
    /// 1-based round number of each node in the original game.
    rounds: Vec<usize>,
    root_card: Card,
}

impl LabeledWinLossTree {
    pub fn tree(&self) -> &FullBinaryTree {
        &self.tree
    }

    pub fn label(&self, node: usize) -> (Card, Card) {
        self.labels[node]
    }

    pub fn round(&self, node: usize) -> usize {
        self.rounds[node]
    }

    /// Alice's initial card that induced this block.
    pub fn root_card(&self) -> Card {
        self.root_card
    }

    pub fn right_parent(&self, node: usize) -> Option<usize> {
        self.tree.right_parent(node)
    }

    /// The card Alice must hold at `node` under WL-putback: Bob's card at the
    /// right parent, or the block's root card when there is none.
    pub fn predicted_alice_card(&self, node: usize) -> Card {
        match self.right_parent(node) {
            Some(p) => self.labels[p].1,
            None => self.root_card,
        }
    }

    /// Checks the right-parent rule at every node.
    pub fn check_right_parent_rule(&self, block: usize) -> Result<(), TreeError> {
        for node in 0..self.tree.len() {
            let expected = self.predicted_alice_card(node);
            if self.labels[node].0 != expected {
                return Err(TreeError::InconsistentLabels {
                    block,
                    node,
                    found: self.labels[node].0,
                    expected,
                });
            }
        }
        Ok(())
    }

    /// DOT rendering with `W(a/b)` style node labels.
    pub fn to_dot(&self) -> String {
        labeled_forest_dot(std::slice::from_ref(self))
    }
}

/// One DOT graph holding every block's labeled tree.
pub fn labeled_forest_dot(trees: &[LabeledWinLossTree]) -> String {
    let mut out = String::from("graph wl_tree {\n  node [shape=plaintext];\n");
    for (b, t) in trees.iter().enumerate() {
        for v in t.tree.level_order() {
            let (a, c) = t.labels[v];
            let _ = writeln!(out, "  b{b}n{v} [label=\"{}({a}/{c})\"];", t.tree.letter(v).as_char());
        }
        for v in 0..t.tree.len() {
            if let Some((l, r)) = t.tree.children(v) {
                let _ = writeln!(out, "  b{b}n{v} -- b{b}n{l};");
                let _ = writeln!(out, "  b{b}n{v} -- b{b}n{r};");
            }
        }
    }
    out.push_str("}\n");
    out
}

/// Labels every round of a single-use game with its two cards, one tree per
/// block. Works for any putback; the children of a W node follow the order
/// the two cards were actually put back.
pub fn label_tree(trace: &GameTrace) -> Result<Vec<LabeledWinLossTree>, TreeError> {
    if !trace.single_use {
        return Err(TreeError::NotSingleUse);
    }
    struct Builder {
        children: Vec<Option<(usize, usize)>>,
        labels: Vec<(Card, Card)>,
        rounds: Vec<usize>,
    }
    let initial = trace.initial.alice();
    let mut blocks: Vec<Builder> = initial
        .iter()
        .map(|_| Builder {
            children: vec![None],
            labels: vec![(Card(0), Card(0))],
            rounds: vec![0],
        })
        .collect();
    // Alice's hand, each card tagged with the node it plays at next.
    let mut hand: VecDeque<(Card, usize, usize)> = initial.iter().enumerate().map(|(b, &c)| (c, b, 0)).collect();
    for r in &trace.rounds {
        let (card, block, node) = hand.pop_front().expect("single-use trace keeps Alice's hand in sync");
        if card != r.alice_card {
            return Err(TreeError::InconsistentTrace {
                round: r.index,
                played: r.alice_card,
                expected: card,
            });
        }
        let b = &mut blocks[block];
        b.labels[node] = (r.alice_card, r.bob_card);
        b.rounds[node] = r.index;
        if r.alice_won() {
            let first = b.children.len();
            b.children.extend([None, None]);
            b.labels.extend([(Card(0), Card(0)); 2]);
            b.rounds.extend([0, 0]);
            b.children[node] = Some((first, first + 1));
            hand.push_back((r.putback.0, block, first));
            hand.push_back((r.putback.1, block, first + 1));
        }
    }
    Ok(blocks
        .into_iter()
        .zip(initial)
        .map(|(b, &root_card)| LabeledWinLossTree {
            tree: FullBinaryTree::from_children(b.children),
            labels: b.labels,
            rounds: b.rounds,
            root_card,
        })
        .collect())
}

/// Rebuilds the game graph from labeled trees.
///
/// Each block gets a virtual node carrying Alice's root card, sitting above
/// the true root so that the root is its right child. Every real node is
/// then relabeled with Bob's card and joined to its right parent (the
/// virtual node when the tree itself offers none). Bob cards that never
/// appear stay isolated.
pub fn tree_to_game_graph(trees: &[LabeledWinLossTree], n: usize) -> Result<GameGraph, TreeError> {
    let mut seen = HashSet::new();
    let mut edges = Vec::new();
    for t in trees {
        if !seen.insert(t.root_card) {
            return Err(TreeError::DuplicateBobCard(t.root_card));
        }
    }
    for (block, t) in trees.iter().enumerate() {
        for node in 0..t.tree.len() {
            let (alice, bob) = t.labels[node];
            for card in [alice, bob] {
                if card.0 as usize > n || card.0 == 0 {
                    return Err(TreeError::CardOutOfRange { card, n });
                }
            }
            if !seen.insert(bob) {
                return Err(TreeError::DuplicateBobCard(bob));
            }
            let anchor = t.predicted_alice_card(node);
            if anchor != alice {
                return Err(TreeError::InconsistentLabels {
                    block,
                    node,
                    found: alice,
                    expected: anchor,
                });
            }
            edges.push((anchor, bob));
        }
    }
    Ok(GameGraph::new(n, edges))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{parse_state, play_wl};
    use crate::graphs::build_game_graph;
    use crate::winloss::{enumerate_sequences_passthrough, parse_sequence};

    fn seq(s: &str) -> WinLossSequence {
        parse_sequence(s, 1).unwrap()
    }

    fn cards(v: &[(u32, u32)]) -> Vec<(Card, Card)> {
        v.iter().map(|&(a, b)| (Card(a), Card(b))).collect()
    }

    // a|bcdefghijkl realizing W/WW/LWWL/LLLL under WL-putback
    const FIGURE_ONE: &str = "6 | 4 5 1 7 3 2 8 9 10 11 12";

    #[test]
    fn seq_to_tree_examples() {
        let t = seq_to_tree(&seq("L")).unwrap();
        assert_eq!((t.len(), t.height()), (1, 1));
        let t = seq_to_tree(&seq("W/LL")).unwrap();
        assert_eq!(
            t,
            FullBinaryTree::join(&FullBinaryTree::leaf(), &FullBinaryTree::leaf())
        );
        assert_eq!(t.height(), 2);
        let fig = seq_to_tree(&seq("W/WW/LWWL/LLLL")).unwrap();
        assert_eq!((fig.len(), fig.height()), (11, 4));
        let leaf = FullBinaryTree::leaf();
        let cherry = FullBinaryTree::join(&leaf, &leaf);
        let left = FullBinaryTree::join(&leaf, &cherry);
        let right = FullBinaryTree::join(&cherry, &leaf);
        assert_eq!(fig, FullBinaryTree::join(&left, &right));
        assert!(seq_to_tree(&parse_sequence("LL", 2).unwrap()).is_err());
    }

    #[test]
    fn tree_to_seq_examples() {
        assert_eq!(tree_to_seq(&FullBinaryTree::leaf()), seq("L"));
        let fig = seq_to_tree(&seq("W/WW/LWWL/LLLL")).unwrap();
        assert_eq!(tree_to_seq(&fig).stylize(), "W/WW/LWWL/LLLL");
    }

    #[test]
    fn bijection_up_to_height_four() {
        let seqs = enumerate_sequences_passthrough(1, 4);
        assert_eq!(seqs.len(), 26);
        for s in &seqs {
            let t = seq_to_tree(s).unwrap();
            assert_eq!(t.height(), s.passthrough_count());
            assert_eq!(&tree_to_seq(&t), s);
        }
        let trees = all_full_binary_trees(4);
        assert_eq!(trees.len(), 26);
        for t in &trees {
            assert_eq!(&seq_to_tree(&tree_to_seq(t)).unwrap(), t);
        }
    }

    #[test]
    fn label_tree_simple_game() {
        let trace = play_wl(&parse_state("3|24156").unwrap(), 100);
        let trees = label_tree(&trace).unwrap();
        assert_eq!(trees.len(), 1);
        let t = &trees[0];
        assert_eq!(t.labels, cards(&[(3, 2), (3, 4), (2, 1), (2, 5), (1, 6)]));
        assert_eq!(tree_to_seq(t.tree()).stylize(), "W/LW/LL");
        t.check_right_parent_rule(0).unwrap();

        let trace = play_wl(&parse_state("1|234").unwrap(), 100);
        let trees = label_tree(&trace).unwrap();
        assert_eq!(trees[0].labels, cards(&[(1, 2)]));
    }

    #[test]
    fn label_tree_figure_one() {
        let trace = play_wl(&parse_state(FIGURE_ONE).unwrap(), 100);
        assert!(trace.single_use);
        let trees = label_tree(&trace).unwrap();
        let t = &trees[0];
        assert_eq!(tree_to_seq(t.tree()).stylize(), "W/WW/LWWL/LLLL");
        // (a,b) (a,c)(b,d) (a,e)(c,f)(b,g)(d,h) (c,i)(f,j)(b,k)(g,l)
        let (a, b, c, d, e, f, g, h, i, j, k, l) = (6, 4, 5, 1, 7, 3, 2, 8, 9, 10, 11, 12);
        assert_eq!(
            t.labels,
            cards(&[
                (a, b),
                (a, c),
                (b, d),
                (a, e),
                (c, f),
                (b, g),
                (d, h),
                (c, i),
                (f, j),
                (b, k),
                (g, l)
            ])
        );
        // (d,h) is the right child of (b,d)
        assert_eq!(t.right_parent(6), Some(2));
        assert_eq!(t.label(2).1, Card(d));
        // (a,e): every ancestor is a left child
        assert_eq!(t.right_parent(3), None);
        assert_eq!(t.right_parent(0), None);
        t.check_right_parent_rule(0).unwrap();

        // The subblock of a from round 2 reads W/LW/LL.
        assert_eq!(tree_to_seq(&t.tree().subtree(1)).stylize(), "W/LW/LL");

        let from_tree = tree_to_game_graph(&trees, 12).unwrap();
        assert_eq!(from_tree, build_game_graph(&trace));
    }

    #[test]
    fn tree_to_graph_figure_two() {
        // a|bcdef with W/LW/LL; 3|24156 gives a=3 b=2 c=4 d=1 e=5 f=6.
        let trace = play_wl(&parse_state("3|24156").unwrap(), 100);
        let trees = label_tree(&trace).unwrap();
        let g = tree_to_game_graph(&trees, 6).unwrap();
        let (a, b, c, d, e, f) = (3, 2, 4, 1, 5, 6);
        let expected = GameGraph::new(6, cards(&[(c, a), (a, b), (e, b), (b, d), (d, f)]));
        assert_eq!(g, expected);

        let trace = play_wl(&parse_state("1|23").unwrap(), 100);
        let g = tree_to_game_graph(&label_tree(&trace).unwrap(), 3).unwrap();
        assert_eq!(g, GameGraph::new(3, cards(&[(1, 2)])));
        assert_eq!(g.isolated(), vec![Card(3)]);
    }

    #[test]
    fn tree_to_graph_rejects_bad_labels() {
        let trace = play_wl(&parse_state("3|24156").unwrap(), 100);
        let mut trees = label_tree(&trace).unwrap();
        trees[0].labels[4].0 = Card(3);
        assert!(matches!(
            tree_to_game_graph(&trees, 6),
            Err(TreeError::InconsistentLabels { node: 4, .. })
        ));
    }

    #[test]
    fn label_tree_rejects_non_single_use() {
        let trace = play_wl(&parse_state("2|13").unwrap(), 10);
        assert_eq!(label_tree(&trace), Err(TreeError::NotSingleUse));
    }

    #[test]
    fn dot_labels() {
        let trace = play_wl(&parse_state("3|24156").unwrap(), 100);
        let dot = labeled_forest_dot(&label_tree(&trace).unwrap());
        assert!(dot.starts_with("graph wl_tree {"));
        assert!(dot.contains("label=\"W(3/2)\""));
        assert!(dot.contains("label=\"L(1/6)\""));
        assert!(dot.contains("b0n0 -- b0n1;"));
    }

    #[test]
    fn right_parent_rule_and_graph_exhaustive() {
        use crate::engine::GameState;
        fn perms(items: &mut Vec<u32>, k: usize, out: &mut Vec<Vec<u32>>) {
            if k == items.len() {
                out.push(items.clone());
                return;
            }
            for i in k..items.len() {
                items.swap(k, i);
                perms(items, k + 1, out);
                items.swap(k, i);
            }
        }
        let mut checked = 0;
        for n in 2..=7u32 {
            let mut all = Vec::new();
            perms(&mut (1..=n).collect(), 0, &mut all);
            for p in all {
                for m in 1..=2usize.min(n as usize - 1) {
                    let state = GameState::from_values(&p[..m], &p[m..]).unwrap();
                    let trace = play_wl(&state, 1000);
                    if !trace.single_use {
                        continue;
                    }
                    let trees = label_tree(&trace).unwrap();
                    for (b, t) in trees.iter().enumerate() {
                        t.check_right_parent_rule(b).unwrap();
                        for v in 0..t.tree().len() {
                            // the subtree at v is the subblock started by v's round
                            let sub = crate::graphs::subblocks(&trace, t.round(v)).unwrap();
                            let block = sub.iter().find(|s| s.root == t.label(v).0).unwrap();
                            let letters: Vec<Letter> = block
                                .rounds
                                .iter()
                                .map(|&i| {
                                    if trace.rounds[i - 1].alice_won() {
                                        Letter::W
                                    } else {
                                        Letter::L
                                    }
                                })
                                .collect();
                            assert_eq!(tree_to_seq(&t.tree().subtree(v)).letters(), &letters[..]);
                        }
                    }
                    assert_eq!(
                        tree_to_game_graph(&trees, n as usize).unwrap(),
                        build_game_graph(&trace)
                    );
                    checked += 1;
                }
            }
        }
        assert!(checked > 1000);
    }
}
