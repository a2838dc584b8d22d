//! Marginal likelihood of context trees and posterior sampling.
//!
//! With independent Dirichlet priors on the transition vectors, the
//! probabilities integrate out in closed form and each context contributes
//!
//! ```text
//! lnG(sum_k a_k) - sum_k lnG(a_k) + sum_k lnG(n_k + a_k) - lnG(sum_k (n_k + a_k))
//! ```
//!
//! to `ln q(tree, data)`. Coordinates made impossible by an
//! [`AllowedMatrix`] are dropped from every sum, and a context that was never
//! observed contributes exactly zero.

pub mod exact;
mod sampler;

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

pub use sampler::{mh_run, propose, ChainRecord, ChainStep, Move, Proposal, ScoreTracker, TreeSampler};

use crate::error::{Error, Result};
use crate::math::ln_gamma;
use crate::tree::{AllowedMatrix, Context, ContextTree, TreePrior};
use crate::trie::{CountTrie, NodeId};

/// Concentration used throughout the simulation studies.
pub const DEFAULT_ALPHA: f64 = 0.001;

/// Per-(context, symbol) concentration rule.
pub type AlphaRule = Arc<dyn Fn(&Context, u8) -> f64 + Send + Sync>;

/// Dirichlet hyperparameters for the transition vectors.
#[derive(Clone)]
pub struct DirichletHyper {
    alpha: f64,
    rule: Option<AlphaRule>,
    allowed: Option<AllowedMatrix>,
}

impl fmt::Debug for DirichletHyper {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DirichletHyper")
            .field("alpha", &self.alpha)
            .field("rule", &self.rule.is_some())
            .field("allowed", &self.allowed)
            .finish()
    }
}

impl Default for DirichletHyper {
    fn default() -> Self {
        DirichletHyper {
            alpha: DEFAULT_ALPHA,
            rule: None,
            allowed: None,
        }
    }
}

impl DirichletHyper {
    /// The same concentration for every coordinate.
    pub fn symmetric(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "Dirichlet concentration must be positive, got {alpha}"
            )));
        }
        Ok(DirichletHyper {
            alpha,
            rule: None,
            allowed: None,
        })
    }

    /// Replaces the constant concentration with a rule. The rule must return
    /// positive finite values; this is checked when a [`ScoredTrie`] is built.
    pub fn with_rule(mut self, rule: AlphaRule) -> Self {
        self.rule = Some(rule);
        self
    }

    /// Restricts each transition vector to the symbols allowed after the
    /// context's most recent symbol.
    pub fn with_allowed(mut self, allowed: AllowedMatrix) -> Self {
        self.allowed = Some(allowed);
        self
    }

    pub fn allowed(&self) -> Option<&AllowedMatrix> {
        self.allowed.as_ref()
    }

    /// `alpha_{s,k}`, or `None` when the transition is prohibited.
    #[inline]
    pub fn alpha(&self, context: &Context, k: u8) -> Option<f64> {
        if let Some(allowed) = &self.allowed {
            if !allowed.is_allowed(context.most_recent(), k) {
                return None;
            }
        }
        Some(match &self.rule {
            Some(rule) => rule(context, k),
            None => self.alpha,
        })
    }

    /// One context's contribution to `ln q`.
    pub fn context_log_q(&self, context: &Context, counts: &[u64]) -> Result<f64> {
        if counts.iter().all(|&n| n == 0) {
            return Ok(0.0);
        }
        let (mut a_sum, mut na_sum, mut acc) = (0.0f64, 0.0f64, 0.0f64);
        for (k, &n) in counts.iter().enumerate() {
            match self.alpha(context, k as u8) {
                Some(a) => {
                    if !(a > 0.0 && a.is_finite()) {
                        return Err(Error::InvalidParameter(format!(
                            "Dirichlet concentration {a} for context {context}, symbol {k}"
                        )));
                    }
                    let na = n as f64 + a;
                    a_sum += a;
                    na_sum += na;
                    acc += ln_gamma(na) - ln_gamma(a);
                }
                None if n > 0 => {
                    return Err(Error::Numeric(format!(
                        "prohibited transition {} -> {k} observed after context {context}",
                        context.most_recent()
                    )))
                }
                None => {}
            }
        }
        let term = acc + ln_gamma(a_sum) - ln_gamma(na_sum);
        if term.is_finite() {
            Ok(term)
        } else {
            Err(Error::Numeric(format!("non-finite log q term for context {context}")))
        }
    }
}

/// `ln q(tree, data)` computed directly from the trie.
pub fn log_q(tree: &ContextTree, trie: &CountTrie, hyper: &DirichletHyper) -> Result<f64> {
    if tree.depth() > trie.depth() {
        return Err(Error::InvalidParameter(format!(
            "tree depth {} exceeds trie depth {}",
            tree.depth(),
            trie.depth()
        )));
    }
    let mut total = 0.0;
    for c in tree.contexts() {
        if let Some(counts) = trie.counts(c.as_slice()) {
            total += hyper.context_log_q(c, counts)?;
        }
    }
    Ok(total)
}

/// `ln h(tree) + ln q(tree, data)`.
pub fn log_posterior_unnorm(
    tree: &ContextTree,
    trie: &CountTrie,
    hyper: &DirichletHyper,
    prior: &TreePrior,
) -> Result<f64> {
    Ok(prior.log_h(tree)? + log_q(tree, trie, hyper)?)
}

/// A count trie with every node's `ln q` contribution precomputed.
///
/// The contribution of a context depends only on its counts, so sampling
/// reduces to trie lookups.
#[derive(Debug, Clone)]
pub struct ScoredTrie<'a> {
    trie: &'a CountTrie,
    terms: Vec<f64>,
}

impl<'a> ScoredTrie<'a> {
    pub fn new(trie: &'a CountTrie, hyper: &DirichletHyper) -> Result<Self> {
        let mut terms = vec![0.0; trie.node_count()];
        let mut failure = None;
        trie.for_each_node(|node, path, counts| {
            if failure.is_some() {
                return;
            }
            let ctx = Context::from_recent_first(path).expect("trie depth within MAX_DEPTH");
            match hyper.context_log_q(&ctx, counts) {
                Ok(t) => terms[node.index()] = t,
                Err(e) => failure = Some(e),
            }
        });
        match failure {
            Some(e) => Err(e),
            None => Ok(ScoredTrie { trie, terms }),
        }
    }

    pub fn trie(&self) -> &'a CountTrie {
        self.trie
    }

    /// Contribution of one context; zero when it was never observed.
    #[inline]
    pub fn term(&self, context: &Context) -> f64 {
        let mut node = NodeId::ROOT;
        for &s in context.as_slice() {
            match self.trie.child(node, s) {
                Some(c) => node = c,
                None => return 0.0,
            }
        }
        self.terms[node.index()]
    }

    /// Sum of the children's terms minus the parent's: the change in `ln q`
    /// when `context` is grown.
    #[inline]
    pub fn grow_delta(&self, context: &Context) -> f64 {
        let mut node = NodeId::ROOT;
        for &s in context.as_slice() {
            match self.trie.child(node, s) {
                Some(c) => node = c,
                None => return 0.0,
            }
        }
        let mut children = 0.0;
        for k in 0..self.trie.alphabet_size() as u8 {
            if let Some(c) = self.trie.child(node, k) {
                children += self.terms[c.index()];
            }
        }
        children - self.terms[node.index()]
    }

    pub fn log_q(&self, tree: &ContextTree) -> f64 {
        tree.contexts().iter().map(|c| self.term(c)).sum()
    }
}
