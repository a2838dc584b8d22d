//! Renewal-state detection for variable-length Markov chains (VLMC).
//!
//! A symbol `a` is a renewal state of a VLMC when it labels no inner node of
//! the chain's context tree. This crate evaluates that hypothesis with
//! Bayes factors:
//!
//! - [`trie`] counts transitions of a dataset against the maximal depth-`L` trie.
//! - [`tree`] holds the context-tree algebra: validity, suffix mapping,
//!   grow/prune neighbourhoods, renewal predicates, priors and enumeration.
//! - [`inference`] computes the Dirichlet-multinomial marginal likelihood
//!   `q(tree, data)` and samples trees from their posterior with a
//!   grow/prune Metropolis-Hastings kernel. Exact enumeration oracles live in
//!   [`inference::exact`].
//! - [`bayesfactor`] turns pairs of chains into Monte-Carlo partial Bayes
//!   factors and aggregates them into arithmetic and geometric intrinsic
//!   Bayes factors.
//! - [`simulate`] generates datasets from probabilistic context trees.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, parallel
//! execution and the command-line front end live in the `vlmc` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bayesfactor;
pub mod data;
pub mod error;
pub mod inference;
pub mod math;
pub mod seed;
pub mod simulate;
pub mod tree;
pub mod trie;

pub use data::{Alphabet, Dataset, Sequence};
pub use error::{Error, Result};
pub use tree::{AllowedMatrix, Constraint, Context, ContextTree, TreePrior};
pub use trie::CountTrie;
