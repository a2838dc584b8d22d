//! Oracles by full enumeration of the prior support.
//!
//! Only usable while the tree space fits under the enumeration bound.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{DirichletHyper, ScoredTrie};
use crate::error::{Error, Result};
use crate::math::{ln_to_log10, log_sum_exp};
use crate::tree::{enumerate_trees, Constraint, ContextTree, TreePrior};
use crate::trie::CountTrie;

/// `(tree, ln h(tree), ln q(tree))` for every tree in the support.
fn scored_support(trie: &CountTrie, prior: &TreePrior, hyper: &DirichletHyper) -> Result<Vec<(ContextTree, f64, f64)>> {
    let scored = ScoredTrie::new(trie, hyper)?;
    let mut out = Vec::new();
    for tree in enumerate_trees(prior)? {
        let lh = prior.log_h(&tree)?;
        let lq = scored.log_q(&tree);
        out.push((tree, lh, lq));
    }
    if out.is_empty() {
        return Err(Error::EmptySupport(alloc::format!("{prior:?}")));
    }
    Ok(out)
}

/// Posterior `pi(tree | data)` over the whole support.
pub fn exact_posterior(
    trie: &CountTrie,
    prior: &TreePrior,
    hyper: &DirichletHyper,
) -> Result<BTreeMap<ContextTree, f64>> {
    let support = scored_support(trie, prior, hyper)?;
    let joint: Vec<f64> = support.iter().map(|(_, lh, lq)| lh + lq).collect();
    let z = log_sum_exp(&joint);
    if !z.is_finite() {
        return Err(Error::Numeric("posterior normaliser is not finite".into()));
    }
    Ok(support
        .into_iter()
        .zip(joint)
        .map(|((t, _, _), j)| (t, libm::exp(j - z)))
        .collect())
}

/// Natural-log evidence `ln sum_tree pi(tree) q(tree, data)` with the prior
/// normalised over its support.
pub fn exact_log_evidence(trie: &CountTrie, prior: &TreePrior, hyper: &DirichletHyper) -> Result<f64> {
    let support = scored_support(trie, prior, hyper)?;
    let joint: Vec<f64> = support.iter().map(|(_, lh, lq)| lh + lq).collect();
    let mass: Vec<f64> = support.iter().map(|(_, lh, _)| *lh).collect();
    Ok(log_sum_exp(&joint) - log_sum_exp(&mass))
}

/// The two hypotheses for renewal state `a` on top of `base`.
pub fn renewal_priors(base: &TreePrior, a: u8) -> Result<(TreePrior, TreePrior)> {
    Ok((
        base.with_constraint(Constraint::Renewing(a))?,
        base.with_constraint(Constraint::NotRenewing(a))?,
    ))
}

/// `log10` Bayes factor of "a is a renewal state" against its complement.
pub fn exact_log10_bayes_factor(trie: &CountTrie, hyper: &DirichletHyper, base: &TreePrior, a: u8) -> Result<f64> {
    let (h_a, h_not) = renewal_priors(base, a)?;
    let num = exact_log_evidence(trie, &h_a, hyper)?;
    let den = exact_log_evidence(trie, &h_not, hyper)?;
    Ok(ln_to_log10(num - den))
}

/// Natural-log `sum_tree pi(tree | train) q(tree, test)`.
pub fn exact_log_predictive(
    train: &CountTrie,
    test: &CountTrie,
    prior: &TreePrior,
    hyper: &DirichletHyper,
) -> Result<f64> {
    let posterior = exact_posterior(train, prior, hyper)?;
    let scored = ScoredTrie::new(test, hyper)?;
    let terms: Vec<f64> = posterior.iter().map(|(t, p)| libm::log(*p) + scored.log_q(t)).collect();
    Ok(log_sum_exp(&terms))
}

/// `log10` partial Bayes factor of the test data given the training data.
pub fn exact_log10_pbf(
    train: &CountTrie,
    test: &CountTrie,
    hyper: &DirichletHyper,
    base: &TreePrior,
    a: u8,
) -> Result<f64> {
    let (h_a, h_not) = renewal_priors(base, a)?;
    let num = exact_log_predictive(train, test, &h_a, hyper)?;
    let den = exact_log_predictive(train, test, &h_not, hyper)?;
    Ok(ln_to_log10(num - den))
}
