use alloc::collections::BTreeSet;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use super::{AllowedMatrix, Context, ContextTree, MAX_DEPTH};
use crate::error::{Error, Result};

/// An indicator factor of the tree prior.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Constraint {
    /// The symbol labels no inner node.
    Renewing(u8),
    /// The symbol labels some inner node; exact complement of `Renewing`.
    NotRenewing(u8),
    /// No inner node contains a prohibited transition.
    NoProhibitedInner(AllowedMatrix),
}

impl Constraint {
    /// Whether an inner node (most-recent-first) carries the feature this
    /// constraint counts. A tree's support status only depends on how many of
    /// its inner nodes are marked.
    #[inline]
    fn marks(&self, node: &[u8]) -> bool {
        match self {
            Constraint::Renewing(a) | Constraint::NotRenewing(a) => node.contains(a),
            Constraint::NoProhibitedInner(allowed) => allowed.has_prohibited_pair(node),
        }
    }

    #[inline]
    fn satisfied(&self, marked: u32) -> bool {
        match self {
            Constraint::Renewing(_) | Constraint::NoProhibitedInner(_) => marked == 0,
            Constraint::NotRenewing(_) => marked > 0,
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::Renewing(a) => write!(f, "renewing({a})"),
            Constraint::NotRenewing(a) => write!(f, "not-renewing({a})"),
            Constraint::NoProhibitedInner(_) => f.write_str("no-prohibited-inner"),
        }
    }
}

/// Optional log-weight of the tree prior on top of the indicator constraints.
pub type LogWeight = Arc<dyn Fn(&ContextTree) -> f64 + Send + Sync>;

/// Per-constraint counts of marked inner nodes of one tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportStats {
    marked: Vec<u32>,
}

/// Tree prior `h`: a product of indicator constraints and an optional bounded
/// log-weight, over trees of depth at most `depth_bound`.
#[derive(Clone)]
pub struct TreePrior {
    alphabet_size: usize,
    depth_bound: usize,
    constraints: Vec<Constraint>,
    log_weight: Option<LogWeight>,
    minimal: ContextTree,
}

impl fmt::Debug for TreePrior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TreePrior")
            .field("alphabet_size", &self.alphabet_size)
            .field("depth_bound", &self.depth_bound)
            .field("constraints", &self.constraints)
            .field("log_weight", &self.log_weight.is_some())
            .finish()
    }
}

pub struct TreePriorBuilder {
    alphabet_size: usize,
    depth_bound: usize,
    constraints: Vec<Constraint>,
    log_weight: Option<LogWeight>,
}

impl TreePriorBuilder {
    pub fn constraint(mut self, c: Constraint) -> Self {
        self.constraints.push(c);
        self
    }

    pub fn renewing(self, a: u8) -> Self {
        self.constraint(Constraint::Renewing(a))
    }

    pub fn not_renewing(self, a: u8) -> Self {
        self.constraint(Constraint::NotRenewing(a))
    }

    pub fn no_prohibited_inner(self, allowed: AllowedMatrix) -> Self {
        self.constraint(Constraint::NoProhibitedInner(allowed))
    }

    pub fn log_weight(mut self, w: LogWeight) -> Self {
        self.log_weight = Some(w);
        self
    }

    /// Validates the parameters and locates the minimal supported tree,
    /// failing if the support is empty.
    pub fn build(self) -> Result<TreePrior> {
        let m = self.alphabet_size;
        if !(2..=256).contains(&m) {
            return Err(Error::InvalidAlphabet(m));
        }
        if self.depth_bound == 0 || self.depth_bound > MAX_DEPTH {
            return Err(Error::InvalidDepth {
                depth: self.depth_bound,
            });
        }
        for c in &self.constraints {
            match c {
                Constraint::Renewing(a) | Constraint::NotRenewing(a) if *a as usize >= m => {
                    return Err(Error::InvalidParameter(format!(
                        "state {a} is outside the alphabet of size {m}"
                    )));
                }
                Constraint::NoProhibitedInner(allowed) if allowed.size() != m => {
                    return Err(Error::InvalidParameter(format!(
                        "allowed-transition matrix has size {}, alphabet has {m}",
                        allowed.size()
                    )));
                }
                _ => {}
            }
        }
        let minimal = search_minimal(m, self.depth_bound, &self.constraints)?;
        let prior = TreePrior {
            alphabet_size: m,
            depth_bound: self.depth_bound,
            constraints: self.constraints,
            log_weight: self.log_weight,
            minimal,
        };
        prior.log_h(&prior.minimal)?;
        Ok(prior)
    }
}

/// Bound on trees visited while searching for the minimal supported tree.
const MINIMAL_SEARCH_BUDGET: usize = 1_000_000;

/// Breadth-first search over grow operations from the depth-one tree. Level
/// `k` holds the trees with `k` inner nodes, so the first level with a
/// supported tree has the fewest contexts; ties go to the smallest canonical
/// form.
fn search_minimal(m: usize, depth_bound: usize, constraints: &[Constraint]) -> Result<ContextTree> {
    let admits = |t: &ContextTree| {
        constraints
            .iter()
            .all(|c| c.satisfied(t.inner_nodes().filter(|n| c.marks(n.as_slice())).count() as u32))
    };
    let mut level: BTreeSet<ContextTree> = BTreeSet::new();
    level.insert(ContextTree::depth_one(m));
    let mut visited = 1usize;
    loop {
        if let Some(t) = level.iter().find(|t| admits(t)) {
            return Ok(t.clone());
        }
        let mut next = BTreeSet::new();
        for t in &level {
            for (i, c) in t.contexts().iter().enumerate() {
                if c.len() < depth_bound {
                    next.insert(t.grow_at(i));
                }
            }
            if next.len() + visited > MINIMAL_SEARCH_BUDGET {
                return Err(Error::EmptySupport(format!(
                    "no admissible tree among the {visited} smallest trees searched"
                )));
            }
        }
        if next.is_empty() {
            return Err(Error::EmptySupport(format!(
                "no tree of depth at most {depth_bound} satisfies {}",
                constraints
                    .iter()
                    .map(|c| format!("{c}"))
                    .collect::<Vec<_>>()
                    .join(" and ")
            )));
        }
        visited += next.len();
        level = next;
    }
}

/// Minimal supported tree of a prior (used to initialise samplers).
pub fn minimal_tree(prior: &TreePrior) -> ContextTree {
    prior.minimal.clone()
}

impl TreePrior {
    pub fn builder(alphabet_size: usize, depth_bound: usize) -> TreePriorBuilder {
        TreePriorBuilder {
            alphabet_size,
            depth_bound,
            constraints: Vec::new(),
            log_weight: None,
        }
    }

    /// Uniform over every tree of depth at most `depth_bound`.
    pub fn uniform(alphabet_size: usize, depth_bound: usize) -> Result<Self> {
        Self::builder(alphabet_size, depth_bound).build()
    }

    /// The same prior with one more constraint.
    pub fn with_constraint(&self, c: Constraint) -> Result<Self> {
        let mut b = Self::builder(self.alphabet_size, self.depth_bound);
        b.constraints = self.constraints.clone();
        b.constraints.push(c);
        b.log_weight = self.log_weight.clone();
        b.build()
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn depth_bound(&self) -> usize {
        self.depth_bound
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn has_log_weight(&self) -> bool {
        self.log_weight.is_some()
    }

    pub fn minimal_tree(&self) -> &ContextTree {
        &self.minimal
    }

    pub fn stats(&self, tree: &ContextTree) -> SupportStats {
        let mut marked = alloc::vec![0u32; self.constraints.len()];
        for node in tree.inner_nodes() {
            for (slot, c) in marked.iter_mut().zip(&self.constraints) {
                if c.marks(node.as_slice()) {
                    *slot += 1;
                }
            }
        }
        SupportStats { marked }
    }

    #[inline]
    pub fn admits_stats(&self, stats: &SupportStats) -> bool {
        self.constraints.iter().zip(&stats.marked).all(|(c, &n)| c.satisfied(n))
    }

    /// `h(tree) > 0`.
    pub fn admits(&self, tree: &ContextTree) -> bool {
        tree.alphabet_size() == self.alphabet_size
            && tree.depth() <= self.depth_bound
            && self.admits_stats(&self.stats(tree))
    }

    /// Support test for the tree obtained by growing `context` (which becomes
    /// an inner node). Depth is the caller's responsibility.
    #[inline]
    pub fn admits_grown(&self, stats: &SupportStats, context: &Context) -> bool {
        self.constraints.iter().zip(&stats.marked).all(|(c, &n)| {
            let delta = c.marks(context.as_slice()) as u32;
            c.satisfied(n + delta)
        })
    }

    /// Support test for the tree obtained by pruning the children of `parent`.
    #[inline]
    pub fn admits_pruned(&self, stats: &SupportStats, parent: &Context) -> bool {
        self.constraints.iter().zip(&stats.marked).all(|(c, &n)| {
            let delta = c.marks(parent.as_slice()) as u32;
            c.satisfied(n - delta)
        })
    }

    pub(crate) fn stats_grown(&self, stats: &SupportStats, context: &Context) -> SupportStats {
        let mut s = stats.clone();
        for (slot, c) in s.marked.iter_mut().zip(&self.constraints) {
            *slot += c.marks(context.as_slice()) as u32;
        }
        s
    }

    pub(crate) fn stats_pruned(&self, stats: &SupportStats, parent: &Context) -> SupportStats {
        let mut s = stats.clone();
        for (slot, c) in s.marked.iter_mut().zip(&self.constraints) {
            *slot -= c.marks(parent.as_slice()) as u32;
        }
        s
    }

    /// Log-weight only, without the support check.
    #[inline]
    pub fn log_weight_of(&self, tree: &ContextTree) -> f64 {
        self.log_weight.as_ref().map_or(0.0, |w| w(tree))
    }

    /// `log h(tree)`, failing outside the support or on a non-finite weight.
    pub fn log_h(&self, tree: &ContextTree) -> Result<f64> {
        if !self.admits(tree) {
            return Err(Error::OutsideSupport);
        }
        let w = self.log_weight_of(tree);
        if w.is_finite() {
            Ok(w)
        } else {
            Err(Error::Numeric(format!("log-weight {w} for tree {tree}")))
        }
    }
}
