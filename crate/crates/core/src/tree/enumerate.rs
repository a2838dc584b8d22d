//! Exhaustive enumeration of small tree spaces.
//!
//! A subtree hanging from a node with `r` levels left below it is either a
//! leaf or an inner node whose `m` children are independent subtrees with
//! `r - 1` levels, so there are `g(r) = 1 + g(r - 1)^m` of them with
//! `g(0) = 1`. That recursion is a mixed-radix numbering: index 0 is the leaf,
//! and index `1 + sum_k d_k g(r-1)^k` has child subtrees `d_0 .. d_{m-1}`.
//! The root must be inner, so trees of depth at most `L` are indices
//! `1 .. g(L)`.

use alloc::vec::Vec;

use super::{Context, ContextTree, TreePrior, MAX_DEPTH};
use crate::error::{Error, Result, SpaceSize};

/// Largest `g(L)` that [`enumerate_trees`] will walk.
pub const ENUMERATION_BOUND: u64 = 1_000_000;

fn subtree_counts(m: usize, depth: usize) -> core::result::Result<Vec<u64>, f64> {
    let mut g = alloc::vec![1u64];
    let mut log10 = 0.0f64;
    for _ in 0..depth {
        let prev = *g.last().expect("non-empty");
        log10 = m as f64 * log10.max(libm::log10(prev as f64));
        let next = (0..m)
            .try_fold(1u64, |acc, _| acc.checked_mul(prev))
            .and_then(|p| p.checked_add(1));
        match next {
            Some(n) => g.push(n),
            None => return Err(log10),
        }
    }
    Ok(g)
}

/// Number of context trees of depth at most `depth` (root-only excluded).
pub fn tree_space_size(alphabet_size: usize, depth: usize) -> SpaceSize {
    match subtree_counts(alphabet_size, depth) {
        Ok(g) => SpaceSize::Exact(g[depth] - 1),
        Err(log10) => SpaceSize::Log10AtLeast(log10),
    }
}

/// Lazily yields every tree of depth at most `prior.depth_bound()` with
/// positive prior, each exactly once, in index order.
pub struct TreeIter {
    g: Vec<u64>,
    next: u64,
    end: u64,
    prior: TreePrior,
}

impl Iterator for TreeIter {
    type Item = ContextTree;

    fn next(&mut self) -> Option<ContextTree> {
        while self.next < self.end {
            let idx = self.next;
            self.next += 1;
            let tree = self.decode(idx);
            if self.prior.admits(&tree) {
                return Some(tree);
            }
        }
        None
    }
}

impl TreeIter {
    fn decode(&self, index: u64) -> ContextTree {
        let m = self.prior.alphabet_size();
        let mut out = Vec::new();
        let mut prefix = [0u8; MAX_DEPTH];
        self.decode_into(index, self.prior.depth_bound(), &mut prefix, 0, &mut out);
        ContextTree::from_sorted_unchecked(m, out)
    }

    fn decode_into(&self, index: u64, levels: usize, prefix: &mut [u8; MAX_DEPTH], len: usize, out: &mut Vec<Context>) {
        if index == 0 {
            out.push(Context::from_recent_first(&prefix[..len]).expect("leaf below root"));
            return;
        }
        let base = self.g[levels - 1];
        let mut rest = index - 1;
        for k in 0..self.prior.alphabet_size() {
            prefix[len] = k as u8;
            self.decode_into(rest % base, levels - 1, prefix, len + 1, out);
            rest /= base;
        }
    }
}

/// Enumerates the support of `prior`. Refuses when `g(L)` exceeds
/// [`ENUMERATION_BOUND`].
pub fn enumerate_trees(prior: &TreePrior) -> Result<TreeIter> {
    let (m, depth) = (prior.alphabet_size(), prior.depth_bound());
    let estimate = tree_space_size(m, depth);
    match subtree_counts(m, depth) {
        Ok(g) if g[depth] <= ENUMERATION_BOUND => Ok(TreeIter {
            end: g[depth],
            g,
            next: 1,
            prior: prior.clone(),
        }),
        _ => Err(Error::EnumerationBound {
            estimate,
            bound: ENUMERATION_BOUND,
        }),
    }
}
