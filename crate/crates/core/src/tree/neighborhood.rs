use alloc::vec::Vec;

use super::{ContextTree, SupportStats, TreePrior};

/// The grow and prune moves available from a tree under a prior.
///
/// Grow moves are stored as indices of the context to replace by its `m`
/// children; prune moves as the index of the first of `m` sibling leaves.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Neighborhood {
    grow: Vec<u32>,
    prune: Vec<u32>,
}

impl Neighborhood {
    pub fn of(tree: &ContextTree, prior: &TreePrior) -> Self {
        Self::with_stats(tree, prior, &prior.stats(tree))
    }

    /// Same as [`Neighborhood::of`] with precomputed support statistics.
    pub fn with_stats(tree: &ContextTree, prior: &TreePrior, stats: &SupportStats) -> Self {
        let mut n = Neighborhood::default();
        n.refill(tree, prior, stats);
        n
    }

    pub(crate) fn refill(&mut self, tree: &ContextTree, prior: &TreePrior, stats: &SupportStats) {
        self.grow.clear();
        self.prune.clear();
        let m = tree.alphabet_size();
        let depth_bound = prior.depth_bound();
        let cs = tree.contexts();
        for (i, c) in cs.iter().enumerate() {
            let l = c.len();
            if l < depth_bound && prior.admits_grown(stats, c) {
                self.grow.push(i as u32);
            }
            if l >= 2 && c.oldest() == 0 && i + m <= cs.len() {
                let stem = &c.as_slice()[..l - 1];
                let siblings = (1..m).all(|k| {
                    let d = &cs[i + k];
                    d.len() == l && d.oldest() as usize == k && &d.as_slice()[..l - 1] == stem
                });
                if siblings {
                    let parent = c.parent().expect("length >= 2");
                    if prior.admits_pruned(stats, &parent) {
                        self.prune.push(i as u32);
                    }
                }
            }
        }
    }

    pub fn grow_indices(&self) -> &[u32] {
        &self.grow
    }

    pub fn prune_indices(&self) -> &[u32] {
        &self.prune
    }

    pub fn grow_count(&self) -> usize {
        self.grow.len()
    }

    pub fn prune_count(&self) -> usize {
        self.prune.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grow.is_empty() && self.prune.is_empty()
    }
}

/// Trees with positive prior reachable by growing one branch of `tree`.
pub fn grow_set(tree: &ContextTree, prior: &TreePrior) -> Vec<ContextTree> {
    Neighborhood::of(tree, prior)
        .grow
        .iter()
        .map(|&i| tree.grow_at(i as usize))
        .collect()
}

/// Trees with positive prior from which `tree` is obtained by growing one
/// branch.
pub fn prune_set(tree: &ContextTree, prior: &TreePrior) -> Vec<ContextTree> {
    Neighborhood::of(tree, prior)
        .prune
        .iter()
        .map(|&i| tree.prune_at(i as usize))
        .collect()
}
