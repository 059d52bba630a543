//! Exact combinatorics for single-suit War.
//!
//! The crate plays games under WL-putback and random putback, builds the
//! combinatorial objects attached to a game (win-loss sequences, win-loss
//! binary trees, game graphs, game posets), evaluates the closed-form counts
//! and probabilities exactly, and checks them against exhaustive enumeration.

pub mod census;
pub mod engine;
pub mod graphs;
pub mod numerics;
pub mod posets;
pub mod trees;
pub mod verify;
pub mod winloss;

pub use engine::{Card, GameState, GameTrace, Outcome, Player, Putback, PutbackPolicy};
pub use numerics::{BigInt, Rational};
