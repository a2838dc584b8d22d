//! Transition counts over the maximal depth-`L` trie.
//!
//! Node strings are stored most-recent-symbol-first: a child of the root is
//! the symbol immediately preceding the predicted position. Counting starts at
//! position `L + 1` of every sequence (1-based), so the counts do not depend
//! on any particular context tree and one trie serves a whole MCMC run.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::data::{Dataset, Sequence};
use crate::error::{Error, Result};
use crate::tree::{Context, ContextTree};

const NONE: u32 = u32::MAX;

/// Index of a node in a [`CountTrie`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeId(u32);

impl NodeId {
    pub const ROOT: NodeId = NodeId(0);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Immutable m-ary count trie. Only nodes whose string occurred are stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTrie {
    alphabet_size: usize,
    depth: usize,
    counts: Vec<u64>,
    children: Vec<u32>,
}

impl CountTrie {
    /// Trie with no observations.
    pub fn empty(alphabet_size: usize, depth: usize) -> Self {
        CountTrie {
            alphabet_size,
            depth,
            counts: vec![0; alphabet_size],
            children: vec![NONE; alphabet_size],
        }
    }

    pub fn build(dataset: &Dataset) -> Self {
        Self::from_sequences(
            dataset.alphabet_size(),
            dataset.depth_bound(),
            dataset.sequences().iter(),
        )
    }

    /// Counts a subset of validated sequences. Sequences of length `<= depth`
    /// contribute nothing.
    pub fn from_sequences<'a, I>(alphabet_size: usize, depth: usize, sequences: I) -> Self
    where
        I: IntoIterator<Item = &'a Sequence>,
    {
        let mut trie = Self::empty(alphabet_size, depth);
        for seq in sequences {
            let z = seq.symbols();
            for t in depth..z.len() {
                let next = z[t] as usize;
                let mut node = 0usize;
                trie.counts[next] += 1;
                for j in 1..=depth {
                    node = trie.child_or_insert(node, z[t - j] as usize);
                    trie.counts[node * alphabet_size + next] += 1;
                }
            }
        }
        trie
    }

    fn child_or_insert(&mut self, node: usize, symbol: usize) -> usize {
        let slot = node * self.alphabet_size + symbol;
        match self.children[slot] {
            NONE => {
                let id = self.counts.len() / self.alphabet_size;
                assert!(id < NONE as usize, "count trie exceeds u32 node ids");
                self.children[slot] = id as u32;
                self.counts.extend(core::iter::repeat_n(0, self.alphabet_size));
                self.children.extend(core::iter::repeat_n(NONE, self.alphabet_size));
                id
            }
            c => c as usize,
        }
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn node_count(&self) -> usize {
        self.counts.len() / self.alphabet_size
    }

    pub fn root_counts(&self) -> &[u64] {
        self.node_counts(NodeId::ROOT)
    }

    /// Total number of counted transitions.
    pub fn total(&self) -> u64 {
        self.root_counts().iter().sum()
    }

    #[inline]
    pub fn child(&self, node: NodeId, symbol: u8) -> Option<NodeId> {
        match self.children[node.index() * self.alphabet_size + symbol as usize] {
            NONE => None,
            c => Some(NodeId(c)),
        }
    }

    #[inline]
    pub fn node_counts(&self, node: NodeId) -> &[u64] {
        let start = node.index() * self.alphabet_size;
        &self.counts[start..start + self.alphabet_size]
    }

    /// Node for a most-recent-first string; `None` if it never occurred.
    #[inline]
    pub fn find(&self, recent_first: &[u8]) -> Option<NodeId> {
        let mut node = NodeId::ROOT;
        for &s in recent_first {
            node = self.child(node, s)?;
        }
        Some(node)
    }

    /// Counts `n_{s, .}` for a most-recent-first string; `None` if unobserved.
    pub fn counts(&self, recent_first: &[u8]) -> Option<&[u64]> {
        self.find(recent_first).map(|n| self.node_counts(n))
    }

    /// Depth-first walk over every stored node below the root, with its
    /// most-recent-first string.
    pub fn for_each_node<F: FnMut(NodeId, &[u8], &[u64])>(&self, mut f: F) {
        let mut path: Vec<u8> = Vec::with_capacity(self.depth);
        // (node, depth of node, symbol on the edge into it)
        let mut stack: Vec<(NodeId, usize, u8)> = Vec::new();
        let push_children = |stack: &mut Vec<(NodeId, usize, u8)>, node: NodeId, depth: usize| {
            for k in (0..self.alphabet_size).rev() {
                if let Some(c) = self.child(node, k as u8) {
                    stack.push((c, depth + 1, k as u8));
                }
            }
        };
        push_children(&mut stack, NodeId::ROOT, 0);
        while let Some((node, depth, symbol)) = stack.pop() {
            path.truncate(depth - 1);
            path.push(symbol);
            f(node, &path, self.node_counts(node));
            push_children(&mut stack, node, depth);
        }
    }
}

/// `n_{s, .}` for every context of `tree`. Unobserved contexts map to zeros.
pub fn counts_for_tree(trie: &CountTrie, tree: &ContextTree) -> Result<BTreeMap<Context, Vec<u64>>> {
    if tree.depth() > trie.depth() {
        return Err(Error::InvalidParameter(alloc::format!(
            "tree depth {} exceeds trie depth {}",
            tree.depth(),
            trie.depth()
        )));
    }
    Ok(tree
        .contexts()
        .iter()
        .map(|c| {
            let v = trie
                .counts(c.as_slice())
                .map(|s| s.to_vec())
                .unwrap_or_else(|| vec![0; trie.alphabet_size()]);
            (*c, v)
        })
        .collect())
}
