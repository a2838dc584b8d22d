//! Sampling VLMC datasets from a probabilistic context tree.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::seed::rng_from_seed;
use crate::tree::{AllowedMatrix, Context, ContextTree};

const SUM_TOLERANCE: f64 = 1e-12;

/// A context tree with a next-symbol distribution for every context.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilisticContextTree {
    tree: ContextTree,
    /// Aligned with `tree.contexts()`.
    probs: Vec<Vec<f64>>,
    allowed: Option<AllowedMatrix>,
}

impl ProbabilisticContextTree {
    /// `probs` must hold exactly one vector per context of `tree`.
    pub fn new(tree: ContextTree, probs: BTreeMap<Context, Vec<f64>>, allowed: Option<AllowedMatrix>) -> Result<Self> {
        let m = tree.alphabet_size();
        if let Some(a) = &allowed {
            if a.size() != m {
                return Err(Error::InvalidPct(format!(
                    "allowed matrix is {0}x{0} but the alphabet has {m} symbols",
                    a.size()
                )));
            }
        }
        if let Some(extra) = probs.keys().find(|c| !tree.contains(c)) {
            return Err(Error::InvalidPct(format!("{extra} is not a context of {tree}")));
        }
        let mut aligned = Vec::with_capacity(tree.len());
        for c in tree.contexts() {
            let p = probs
                .get(c)
                .ok_or_else(|| Error::InvalidPct(format!("no distribution for context {c}")))?;
            if p.len() != m {
                return Err(Error::InvalidPct(format!(
                    "context {c}: {} probabilities for {m} symbols",
                    p.len()
                )));
            }
            if p.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return Err(Error::InvalidPct(format!(
                    "context {c}: probabilities must be finite and non-negative"
                )));
            }
            let sum: f64 = p.iter().sum();
            if (sum - 1.0).abs() > SUM_TOLERANCE {
                return Err(Error::InvalidPct(format!("context {c}: probabilities sum to {sum}")));
            }
            if let Some(a) = &allowed {
                let last = c.most_recent();
                if let Some(k) = (0..m).find(|&k| p[k] > 0.0 && !a.is_allowed(last, k as u8)) {
                    return Err(Error::InvalidPct(format!(
                        "context {c}: transition {last} -> {k} is prohibited but has probability {}",
                        p[k]
                    )));
                }
            }
            aligned.push(p.clone());
        }
        Ok(ProbabilisticContextTree {
            tree,
            probs: aligned,
            allowed,
        })
    }

    pub fn tree(&self) -> &ContextTree {
        &self.tree
    }

    pub fn allowed(&self) -> Option<&AllowedMatrix> {
        self.allowed.as_ref()
    }

    pub fn probabilities(&self, context: &Context) -> Option<&[f64]> {
        let i = self.tree.contexts().binary_search(context).ok()?;
        Some(&self.probs[i])
    }

    /// `(context, distribution)` pairs in canonical context order.
    pub fn iter(&self) -> impl Iterator<Item = (&Context, &[f64])> {
        self.tree.contexts().iter().zip(self.probs.iter().map(Vec::as_slice))
    }
}

fn binary(entries: &[(&str, [f64; 2])]) -> ProbabilisticContextTree {
    let names: Vec<&str> = entries.iter().map(|(c, _)| *c).collect();
    let tree = ContextTree::parse(2, &names, 6).expect("valid model tree");
    let probs = entries
        .iter()
        .map(|(c, p)| (c.parse().expect("valid context"), p.to_vec()))
        .collect();
    ProbabilisticContextTree::new(tree, probs, None).expect("valid model")
}

const ONE_SIXTH: [f64; 2] = [1.0 / 6.0, 5.0 / 6.0];
const HALF: [f64; 2] = [0.5, 0.5];

/// Binary depth-6 model in which `0` is a renewal state.
pub fn model1() -> ProbabilisticContextTree {
    binary(&[
        ("0", ONE_SIXTH),
        ("01", HALF),
        ("011", ONE_SIXTH),
        ("0111", HALF),
        ("01111", ONE_SIXTH),
        ("011111", HALF),
        ("111111", ONE_SIXTH),
    ])
}

/// [`model1`] with `01111` split on the symbol before it, so `0` is no longer
/// a renewal state.
pub fn model2() -> ProbabilisticContextTree {
    binary(&[
        ("0", ONE_SIXTH),
        ("01", HALF),
        ("011", ONE_SIXTH),
        ("0111", HALF),
        ("001111", ONE_SIXTH),
        ("101111", [0.75, 0.25]),
        ("011111", HALF),
        ("111111", ONE_SIXTH),
    ])
}

/// Default number of discarded steps for a tree of depth `depth`.
pub fn default_burn_in(depth: usize) -> usize {
    1000.max(10 * depth)
}

fn draw<R: Rng + ?Sized>(p: &[f64], rng: &mut R) -> u8 {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (k, &pk) in p.iter().enumerate() {
        acc += pk;
        if u < acc {
            return k as u8;
        }
    }
    // Rounding left u above the running sum: take the last supported symbol.
    p.iter().rposition(|&x| x > 0.0).expect("distribution has mass") as u8
}

/// Draws one sequence of length `len` from `pct`.
pub fn simulate_sequence(pct: &ProbabilisticContextTree, len: usize, seed: u64, burn_in: usize) -> Vec<u8> {
    let m = pct.tree.alphabet_size();
    let depth = pct.tree.depth();
    let mut rng = rng_from_seed(seed);
    let mut z: Vec<u8> = Vec::with_capacity(depth + burn_in + len);
    for _ in 0..depth {
        z.push(rng.random_range(0..m) as u8);
    }
    for _ in 0..burn_in + len {
        let window = &z[z.len() - depth..];
        let i = pct
            .tree
            .suffix_index(window)
            .expect("a depth-L past always has a context");
        let next = draw(&pct.probs[i], &mut rng);
        z.push(next);
    }
    z.split_off(z.len() - len)
}

/// `count` independent sequences of length `len`; sequence `i` uses seed
/// `seed ^ i`. The dataset's depth bound is the depth of `pct`.
pub fn simulate(
    pct: &ProbabilisticContextTree,
    count: usize,
    len: usize,
    seed: u64,
    burn_in: usize,
) -> Result<Dataset> {
    let depth = pct.tree.depth();
    if len <= depth {
        return Err(Error::InvalidParameter(format!(
            "sequence length {len} must exceed the depth {depth}"
        )));
    }
    if count == 0 {
        return Err(Error::EmptyDataset);
    }
    let sequences = (0..count)
        .map(|i| simulate_sequence(pct, len, seed ^ i as u64, burn_in))
        .collect();
    Dataset::from_symbols(pct.tree.alphabet_size(), sequences, depth)
}
