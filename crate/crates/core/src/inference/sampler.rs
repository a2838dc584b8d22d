//! Grow/prune Metropolis-Hastings over context trees.
//!
//! The proposal first picks grow or prune (each with probability 1/2 when both
//! move sets are non-empty, otherwise the non-empty one) and then a uniform
//! move inside the chosen set. Both move sets only contain trees with positive
//! prior, so the kernel is positive in one direction exactly when it is
//! positive in the other.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::f64::consts::LN_2;

use rand::Rng;

use super::{DirichletHyper, ScoredTrie};
use crate::error::{Error, Result};
use crate::seed::rng_from_seed;
use crate::tree::{Context, ContextTree, Neighborhood, SupportStats, TreePrior};
use crate::trie::CountTrie;

/// A move between neighbouring trees.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    /// `context` was replaced by its children.
    Grow { context: Context },
    /// The children of `parent` were collapsed into it.
    Prune { parent: Context },
}

/// A proposed tree with the log proposal densities in both directions.
#[derive(Debug, Clone)]
pub struct Proposal {
    pub tree: ContextTree,
    pub applied: Move,
    /// `ln kappa(proposal | current)`
    pub log_forward: f64,
    /// `ln kappa(current | proposal)`
    pub log_backward: f64,
}

#[inline]
fn log_kernel(n: &Neighborhood, grow: bool) -> f64 {
    let (g, p) = (n.grow_count(), n.prune_count());
    let size = if grow { g } else { p };
    let pick_operator = if g > 0 && p > 0 { -LN_2 } else { 0.0 };
    pick_operator - libm::log(size as f64)
}

/// Returns `(grow?, index into the tree's contexts)`.
#[inline]
fn choose<R: Rng + ?Sized>(n: &Neighborhood, rng: &mut R) -> (bool, usize) {
    let (g, p) = (n.grow_count(), n.prune_count());
    let grow = match (g > 0, p > 0) {
        (true, true) => rng.random::<f64>() < 0.5,
        (grow, _) => grow,
    };
    let set = if grow { n.grow_indices() } else { n.prune_indices() };
    (grow, set[rng.random_range(0..set.len())] as usize)
}

fn apply(
    tree: &ContextTree,
    prior: &TreePrior,
    stats: &SupportStats,
    grow: bool,
    index: usize,
) -> (ContextTree, SupportStats, Move) {
    if grow {
        let context = tree.contexts()[index];
        (
            tree.grow_at(index),
            prior.stats_grown(stats, &context),
            Move::Grow { context },
        )
    } else {
        let parent = tree.contexts()[index].parent().expect("prune index has a parent");
        (
            tree.prune_at(index),
            prior.stats_pruned(stats, &parent),
            Move::Prune { parent },
        )
    }
}

/// Draws one proposal from `tree`.
pub fn propose<R: Rng + ?Sized>(tree: &ContextTree, prior: &TreePrior, rng: &mut R) -> Result<Proposal> {
    let stats = prior.stats(tree);
    let here = Neighborhood::with_stats(tree, prior, &stats);
    if here.is_empty() {
        return Err(Error::DegenerateSpace);
    }
    let (grow, index) = choose(&here, rng);
    let (next, next_stats, applied) = apply(tree, prior, &stats, grow, index);
    let there = Neighborhood::with_stats(&next, prior, &next_stats);
    Ok(Proposal {
        tree: next,
        applied,
        log_forward: log_kernel(&here, grow),
        log_backward: log_kernel(&there, !grow),
    })
}

/// Tracks `ln q(tree, data)` for another dataset along a chain by applying
/// each accepted move's change in score.
#[derive(Debug, Clone)]
pub struct ScoreTracker<'s, 't> {
    scored: &'s ScoredTrie<'t>,
    value: f64,
    moves: u32,
}

/// Moves between full recomputations, bounding floating-point drift.
const RESYNC_EVERY: u32 = 4096;

impl<'s, 't> ScoreTracker<'s, 't> {
    pub fn new(scored: &'s ScoredTrie<'t>, tree: &ContextTree) -> Self {
        ScoreTracker {
            scored,
            value: scored.log_q(tree),
            moves: 0,
        }
    }

    #[inline]
    pub fn delta(&self, applied: &Move) -> f64 {
        match applied {
            Move::Grow { context } => self.scored.grow_delta(context),
            Move::Prune { parent } => -self.scored.grow_delta(parent),
        }
    }

    /// Updates the score after `applied` turned the previous tree into `tree`.
    #[inline]
    pub fn apply(&mut self, applied: &Move, tree: &ContextTree) {
        self.moves += 1;
        if self.moves == RESYNC_EVERY {
            self.moves = 0;
            self.value = self.scored.log_q(tree);
        } else {
            self.value += self.delta(applied);
        }
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.value
    }
}

/// Outcome of one Metropolis-Hastings iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainStep {
    pub accepted: bool,
    /// The move, when accepted.
    pub applied: Option<Move>,
}

/// Metropolis-Hastings chain targeting `pi(tree | data) ~ h(tree) q(tree, data)`.
pub struct TreeSampler<'s, 't> {
    prior: &'s TreePrior,
    score: ScoreTracker<'s, 't>,
    rng: crate::seed::Rng,
    tree: ContextTree,
    stats: SupportStats,
    here: Neighborhood,
    scratch: Neighborhood,
    log_h: f64,
    steps: u64,
    accepted: u64,
}

impl<'s, 't> TreeSampler<'s, 't> {
    /// Starts at `init`, or the prior's minimal tree.
    pub fn new(target: &'s ScoredTrie<'t>, prior: &'s TreePrior, seed: u64, init: Option<ContextTree>) -> Result<Self> {
        let tree = init.unwrap_or_else(|| prior.minimal_tree().clone());
        if tree.depth() > target.trie().depth() {
            return Err(Error::InvalidParameter(alloc::format!(
                "depth bound {} exceeds the count trie depth {}",
                tree.depth(),
                target.trie().depth()
            )));
        }
        let log_h = prior.log_h(&tree)?;
        let stats = prior.stats(&tree);
        let here = Neighborhood::with_stats(&tree, prior, &stats);
        Ok(TreeSampler {
            prior,
            score: ScoreTracker::new(target, &tree),
            rng: rng_from_seed(seed),
            tree,
            stats,
            here,
            scratch: Neighborhood::default(),
            log_h,
            steps: 0,
            accepted: 0,
        })
    }

    pub fn step(&mut self) -> Result<ChainStep> {
        self.steps += 1;
        if self.here.is_empty() {
            return Ok(ChainStep {
                accepted: false,
                applied: None,
            });
        }
        let (grow, index) = choose(&self.here, &mut self.rng);
        let (next, next_stats, applied) = apply(&self.tree, self.prior, &self.stats, grow, index);
        self.scratch.refill(&next, self.prior, &next_stats);
        let log_forward = log_kernel(&self.here, grow);
        let log_backward = log_kernel(&self.scratch, !grow);
        let next_log_h = if self.prior.has_log_weight() {
            let w = self.prior.log_weight_of(&next);
            if !w.is_finite() {
                return Err(Error::Numeric(alloc::format!("log-weight {w} for tree {next}")));
            }
            w
        } else {
            0.0
        };
        let log_ratio = next_log_h - self.log_h + self.score.delta(&applied) + log_backward - log_forward;
        let u: f64 = self.rng.random();
        if log_ratio >= 0.0 || u < libm::exp(log_ratio) {
            self.tree = next;
            self.stats = next_stats;
            core::mem::swap(&mut self.here, &mut self.scratch);
            self.log_h = next_log_h;
            self.score.apply(&applied, &self.tree);
            self.accepted += 1;
            Ok(ChainStep {
                accepted: true,
                applied: Some(applied),
            })
        } else {
            Ok(ChainStep {
                accepted: false,
                applied: None,
            })
        }
    }

    pub fn tree(&self) -> &ContextTree {
        &self.tree
    }

    /// `ln q` of the current tree on the target data.
    pub fn log_q(&self) -> f64 {
        self.score.value()
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn accepted(&self) -> u64 {
        self.accepted
    }

    /// Accepted moves over steps; rejected and impossible moves count as
    /// rejections.
    pub fn acceptance_rate(&self) -> f64 {
        if self.steps == 0 {
            0.0
        } else {
            self.accepted as f64 / self.steps as f64
        }
    }
}

/// Full trajectory of a chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainRecord {
    pub seed: u64,
    /// Distinct trees in order of first visit; `tree_ids` index into it.
    pub trees: Vec<ContextTree>,
    pub tree_ids: Vec<u32>,
    pub log_q: Vec<f64>,
    pub accepted: Vec<bool>,
    pub acceptance_rate: f64,
}

impl ChainRecord {
    pub fn n_iter(&self) -> usize {
        self.tree_ids.len()
    }

    /// Empirical tree frequencies after discarding `burn_in` iterations,
    /// sorted by decreasing frequency.
    pub fn frequencies(&self, burn_in: usize) -> Vec<(ContextTree, f64)> {
        let kept = &self.tree_ids[burn_in.min(self.tree_ids.len())..];
        let mut counts = alloc::vec![0u64; self.trees.len()];
        for &id in kept {
            counts[id as usize] += 1;
        }
        let n = kept.len().max(1) as f64;
        let mut out: Vec<(ContextTree, f64)> = counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (self.trees[i].clone(), c as f64 / n))
            .collect();
        out.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        out
    }
}

/// Runs `n_iter` Metropolis-Hastings steps and records the trajectory.
pub fn mh_run(
    trie: &CountTrie,
    prior: &TreePrior,
    hyper: &DirichletHyper,
    n_iter: usize,
    seed: u64,
    init: Option<ContextTree>,
) -> Result<ChainRecord> {
    if n_iter == 0 {
        return Err(Error::InvalidParameter("n_iter must be positive".into()));
    }
    let scored = ScoredTrie::new(trie, hyper)?;
    let mut sampler = TreeSampler::new(&scored, prior, seed, init)?;
    let mut ids: BTreeMap<ContextTree, u32> = BTreeMap::new();
    let mut trees = Vec::new();
    let mut intern = |t: &ContextTree, trees: &mut Vec<ContextTree>| -> u32 {
        *ids.entry(t.clone()).or_insert_with(|| {
            trees.push(t.clone());
            (trees.len() - 1) as u32
        })
    };
    let mut current = intern(sampler.tree(), &mut trees);
    let mut record = ChainRecord {
        seed,
        trees: Vec::new(),
        tree_ids: Vec::with_capacity(n_iter),
        log_q: Vec::with_capacity(n_iter),
        accepted: Vec::with_capacity(n_iter),
        acceptance_rate: 0.0,
    };
    for _ in 0..n_iter {
        let step = sampler.step()?;
        if step.accepted {
            current = intern(sampler.tree(), &mut trees);
        }
        record.tree_ids.push(current);
        record.log_q.push(sampler.log_q());
        record.accepted.push(step.accepted);
    }
    record.trees = trees;
    record.acceptance_rate = sampler.acceptance_rate();
    Ok(record)
}
