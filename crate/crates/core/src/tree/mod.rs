//! Context-tree algebra.
//!
//! A [`ContextTree`] is a full irreducible set of contexts: no context is a
//! suffix of another, and every inner node of the induced trie has exactly
//! `m` children. Contexts are kept sorted (most-recent-first lexicographic),
//! which makes the sorted list a canonical form and places the `m` children
//! of any node in a contiguous run.

mod allowed;
mod context;
mod enumerate;
mod neighborhood;
mod prior;

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

pub use allowed::AllowedMatrix;
pub use context::{Context, ParseContextError, MAX_DEPTH};
pub use enumerate::{enumerate_trees, tree_space_size, TreeIter, ENUMERATION_BOUND};
pub use neighborhood::{grow_set, prune_set, Neighborhood};
pub use prior::{minimal_tree, Constraint, LogWeight, SupportStats, TreePrior, TreePriorBuilder};

use crate::error::{Error, Result, Violations};

/// A reason a set of contexts is not a context tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Empty,
    SymbolOutOfRange {
        context: Context,
        alphabet_size: usize,
    },
    DepthExceeded {
        context: Context,
        depth_bound: usize,
    },
    Duplicate(Context),
    /// `shorter` is a proper suffix of `longer`.
    SuffixProperty {
        shorter: Context,
        longer: Context,
    },
    /// `parent` is an inner node but its child `missing` is neither a context
    /// nor an inner node. `parent == None` means the root.
    NotFull {
        parent: Option<Context>,
        missing: Context,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => f.write_str("empty context set"),
            Violation::SymbolOutOfRange { context, alphabet_size } => {
                write!(
                    f,
                    "context {context} uses a symbol outside the alphabet of size {alphabet_size}"
                )
            }
            Violation::DepthExceeded { context, depth_bound } => {
                write!(f, "context {context} is longer than the depth bound {depth_bound}")
            }
            Violation::Duplicate(c) => write!(f, "context {c} appears twice"),
            Violation::SuffixProperty { shorter, longer } => {
                write!(f, "suffix property violated: {shorter} is a suffix of {longer}")
            }
            Violation::NotFull { parent, missing } => match parent {
                Some(p) => write!(f, "not full: inner node {p} has no branch {missing}"),
                None => write!(f, "not full: root has no branch {missing}"),
            },
        }
    }
}

/// A full irreducible context tree in canonical (sorted) form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ContextTree {
    alphabet_size: usize,
    contexts: Vec<Context>,
}

/// Checks the suffix property, fullness and the depth bound, returning the
/// canonical tree or every violation found.
pub fn validate_tree(
    alphabet_size: usize,
    contexts: impl IntoIterator<Item = Context>,
    depth_bound: usize,
) -> core::result::Result<ContextTree, Vec<Violation>> {
    let mut contexts: Vec<Context> = contexts.into_iter().collect();
    if contexts.is_empty() {
        return Err(alloc::vec![Violation::Empty]);
    }
    contexts.sort();
    let mut violations = Vec::new();
    for c in &contexts {
        if c.as_slice().iter().any(|&s| s as usize >= alphabet_size) {
            violations.push(Violation::SymbolOutOfRange {
                context: *c,
                alphabet_size,
            });
        }
        if c.len() > depth_bound {
            violations.push(Violation::DepthExceeded {
                context: *c,
                depth_bound,
            });
        }
    }
    for w in contexts.windows(2) {
        if w[0] == w[1] {
            violations.push(Violation::Duplicate(w[0]));
        }
    }
    contexts.dedup();
    // In sorted order every extension of a context follows it directly.
    for w in contexts.windows(2) {
        if w[0].is_suffix_of(&w[1]) {
            violations.push(Violation::SuffixProperty {
                shorter: w[0],
                longer: w[1],
            });
        }
    }
    if violations.is_empty() {
        let mut inner: BTreeSet<Option<Context>> = BTreeSet::new();
        inner.insert(None);
        for c in &contexts {
            let mut p = c.parent();
            while let Some(q) = p {
                if !inner.insert(Some(q)) {
                    break;
                }
                p = q.parent();
            }
        }
        for node in &inner {
            for k in 0..alphabet_size as u8 {
                let child = match node {
                    Some(p) => match p.child(k) {
                        Some(c) => c,
                        None => continue,
                    },
                    None => Context::symbol(k),
                };
                let covered = match contexts.binary_search(&child) {
                    Ok(_) => true,
                    Err(pos) => contexts.get(pos).is_some_and(|d| child.is_suffix_of(d)),
                };
                if !covered {
                    violations.push(Violation::NotFull {
                        parent: *node,
                        missing: child,
                    });
                }
            }
        }
    }
    if violations.is_empty() {
        Ok(ContextTree {
            alphabet_size,
            contexts,
        })
    } else {
        Err(violations)
    }
}

impl ContextTree {
    /// Validating constructor; see [`validate_tree`].
    pub fn new(alphabet_size: usize, contexts: impl IntoIterator<Item = Context>, depth_bound: usize) -> Result<Self> {
        validate_tree(alphabet_size, contexts, depth_bound).map_err(|v| Error::InvalidTree(Violations(v)))
    }

    /// Parses chronological context strings, e.g. `["0", "01", "11"]`.
    pub fn parse<S: AsRef<str>>(alphabet_size: usize, contexts: &[S], depth_bound: usize) -> Result<Self> {
        let parsed = contexts
            .iter()
            .map(|s| {
                s.as_ref()
                    .parse::<Context>()
                    .map_err(|e| Error::InvalidParameter(alloc::format!("{e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(alphabet_size, parsed, depth_bound)
    }

    /// The tree whose contexts are the `m` single symbols.
    pub fn depth_one(alphabet_size: usize) -> Self {
        ContextTree {
            alphabet_size,
            contexts: (0..alphabet_size as u8).map(Context::symbol).collect(),
        }
    }

    /// The complete m-ary tree of depth `depth`.
    pub fn maximal(alphabet_size: usize, depth: usize) -> Self {
        let mut tree = Self::depth_one(alphabet_size);
        for _ in 1..depth {
            let mut next = Vec::with_capacity(tree.contexts.len() * alphabet_size);
            for c in &tree.contexts {
                for k in 0..alphabet_size as u8 {
                    next.push(c.child(k).expect("depth within MAX_DEPTH"));
                }
            }
            tree.contexts = next;
        }
        tree
    }

    /// Trusted constructor for already canonical context lists.
    pub(crate) fn from_sorted_unchecked(alphabet_size: usize, contexts: Vec<Context>) -> Self {
        debug_assert!(contexts.windows(2).all(|w| w[0] < w[1]));
        ContextTree {
            alphabet_size,
            contexts,
        }
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn contexts(&self) -> &[Context] {
        &self.contexts
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.contexts.len()
    }

    /// Length of the longest context.
    pub fn depth(&self) -> usize {
        self.contexts.iter().map(Context::len).max().unwrap_or(0)
    }

    pub fn contains(&self, context: &Context) -> bool {
        self.contexts.binary_search(context).is_ok()
    }

    /// Index of the unique context that is a suffix of the chronological
    /// string `past`; `None` if `past` is too short to reach a leaf.
    pub fn suffix_index(&self, past: &[u8]) -> Option<usize> {
        let mut key = [0u8; MAX_DEPTH];
        let max = past.len().min(MAX_DEPTH);
        for d in 1..=max {
            key[d - 1] = past[past.len() - d];
            let probe = Context::from_recent_first(&key[..d])?;
            match self.contexts.binary_search(&probe) {
                Ok(i) => return Some(i),
                Err(pos) => {
                    // Keep descending only while `probe` is an inner node.
                    if !self.contexts.get(pos).is_some_and(|c| probe.is_suffix_of(c)) {
                        return None;
                    }
                }
            }
        }
        None
    }

    /// The suffix mapping: the context that governs the symbol after `past`.
    pub fn suffix_map(&self, past: &[u8]) -> Option<&Context> {
        self.suffix_index(past).map(|i| &self.contexts[i])
    }

    /// Every inner node below the root, each exactly once.
    ///
    /// An inner node's leftmost leaf is the node followed by zeros, so each
    /// inner node is reported by the context that is its leftmost leaf.
    pub fn inner_nodes(&self) -> impl Iterator<Item = Context> + '_ {
        self.contexts.iter().flat_map(|c| {
            let s = c.as_slice();
            let first = s.iter().rposition(|&x| x != 0).map_or(0, |p| p + 1).max(1);
            (first..s.len()).map(move |j| Context::from_recent_first(&s[..j]).expect("non-empty prefix"))
        })
    }

    /// `a` labels no inner node, i.e. `a` is a renewal state of any chain
    /// with this tree.
    pub fn is_renewing(&self, a: u8) -> bool {
        self.contexts.iter().all(|c| !c.as_slice()[..c.len() - 1].contains(&a))
    }

    /// Some inner node contains a prohibited transition. Prohibited pairs
    /// that involve the leaf symbol are tolerated.
    pub fn has_prohibited_inner(&self, allowed: &AllowedMatrix) -> bool {
        self.contexts
            .iter()
            .any(|c| allowed.has_prohibited_pair(&c.as_slice()[..c.len() - 1]))
    }

    /// Replaces context `index` with its `m` children.
    pub(crate) fn grow_at(&self, index: usize) -> ContextTree {
        let s = self.contexts[index];
        let m = self.alphabet_size;
        let mut contexts = Vec::with_capacity(self.contexts.len() + m - 1);
        contexts.extend_from_slice(&self.contexts[..index]);
        contexts.extend((0..m as u8).map(|k| s.child(k).expect("grow below MAX_DEPTH")));
        contexts.extend_from_slice(&self.contexts[index + 1..]);
        ContextTree::from_sorted_unchecked(m, contexts)
    }

    /// Collapses the sibling run starting at `index` into its parent.
    pub(crate) fn prune_at(&self, index: usize) -> ContextTree {
        let m = self.alphabet_size;
        let parent = self.contexts[index].parent().expect("prune below depth one");
        let mut contexts = Vec::with_capacity(self.contexts.len() + 1 - m);
        contexts.extend_from_slice(&self.contexts[..index]);
        contexts.push(parent);
        contexts.extend_from_slice(&self.contexts[index + m..]);
        ContextTree::from_sorted_unchecked(m, contexts)
    }
}

impl fmt::Display for ContextTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, c) in self.contexts.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for ContextTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ContextTree{self}")
    }
}
