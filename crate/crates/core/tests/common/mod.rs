//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls into the library's counting or scoring code.

#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Counts `n_{s,k}` by scanning every sequence directly. Contexts are
/// oldest-first strings of digits.
pub fn direct_counts(seqs: &[Vec<u8>], contexts: &[&str], m: usize, depth: usize) -> BTreeMap<String, Vec<u64>> {
    let mut out: BTreeMap<String, Vec<u64>> = contexts.iter().map(|c| (c.to_string(), vec![0; m])).collect();
    for z in seqs {
        for t in depth..z.len() {
            let past: String = z[t - depth..t].iter().map(|d| char::from(b'0' + d)).collect();
            let hits: Vec<&&str> = contexts.iter().filter(|c| past.ends_with(**c)).collect();
            assert_eq!(hits.len(), 1, "properness violated at t = {t}");
            out.get_mut(*hits[0]).unwrap()[z[t] as usize] += 1;
        }
    }
    out
}

/// `ln prod_{j<n} (a + j)`, i.e. `ln Gamma(n + a) / Gamma(a)` without lgamma.
pub fn ln_rising(a: f64, n: u64) -> f64 {
    (0..n).map(|j| (a + j as f64).ln()).sum()
}

/// Dirichlet-multinomial `ln q` of one context by rising factorials.
pub fn ln_q_context(counts: &[u64], alpha: &[f64]) -> f64 {
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let a: f64 = alpha.iter().sum();
    counts.iter().zip(alpha).map(|(&c, &al)| ln_rising(al, c)).sum::<f64>() - ln_rising(a, n)
}

pub fn ln_q_tree(counts: &BTreeMap<String, Vec<u64>>, alpha: f64) -> f64 {
    counts.values().map(|c| ln_q_context(c, &vec![alpha; c.len()])).sum()
}

/// Random full tree as oldest-first strings. The root always splits; every
/// other node below `depth` splits with probability `p_split`.
pub fn random_tree(rng: &mut impl Rng, m: usize, depth: usize, p_split: f64) -> Vec<String> {
    fn grow(rng: &mut impl Rng, node: String, m: usize, depth: usize, p: f64, out: &mut Vec<String>) {
        if node.len() == depth || (!node.is_empty() && !rng.random_bool(p)) {
            out.push(node);
            return;
        }
        for k in 0..m {
            grow(rng, format!("{k}{node}"), m, depth, p, out);
        }
    }
    let mut out = Vec::new();
    grow(rng, String::new(), m, depth, p_split, &mut out);
    out
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Simulates a chain from oldest-first contexts and next-symbol
/// distributions with a suffix search over the strings.
pub fn simulate_reference(contexts: &[(&str, Vec<f64>)], len: usize, seed: u64) -> Vec<u8> {
    let mut r = rng(seed);
    let depth = contexts.iter().map(|(c, _)| c.len()).max().unwrap();
    let mut z: Vec<u8> = (0..depth).map(|_| r.random_range(0..2u8)).collect();
    while z.len() < depth + len {
        let past: String = z[z.len() - depth..].iter().map(|d| char::from(b'0' + d)).collect();
        let (_, p) = contexts.iter().find(|(c, _)| past.ends_with(c)).unwrap();
        let u: f64 = r.random();
        let mut acc = 0.0;
        let mut next = p.len() - 1;
        for (k, pk) in p.iter().enumerate() {
            acc += pk;
            if u < acc {
                next = k;
                break;
            }
        }
        z.push(next as u8);
    }
    z.split_off(depth)
}
