//! Library results against reference computations written from the
//! definitions: rising-factorial marginal likelihoods, direct transition
//! counts, hand-enumerated Bayes factors and proposal frequencies.

mod common;

use std::collections::BTreeMap;

use rand::Rng;
use vlmc_core::inference::exact::{exact_log10_bayes_factor, exact_posterior};
use vlmc_core::inference::{log_q, propose, DirichletHyper, Move};
use vlmc_core::seed::rng_from_seed;
use vlmc_core::simulate::{model1, model2, simulate_sequence};
use vlmc_core::trie::counts_for_tree;
use vlmc_core::{ContextTree, CountTrie, Dataset, TreePrior};

use common::{direct_counts, ln_q_context, ln_q_tree, random_tree, rng};

fn names(tree: &ContextTree) -> Vec<String> {
    tree.contexts().iter().map(|c| c.render_oldest_first()).collect()
}

#[test]
fn log_q_matches_rising_factorials() {
    let mut r = rng(11);
    for case in 0..300 {
        let m = r.random_range(2..=3usize);
        let depth = r.random_range(1..=4usize);
        let alpha = [0.001, 0.5, 1.0, 2.5][case % 4];
        let ctx = random_tree(&mut r, m, depth, 0.5);
        let refs: Vec<&str> = ctx.iter().map(String::as_str).collect();
        let tree = ContextTree::parse(m, &refs, depth).unwrap();
        // Short sequences keep every count at or below 20.
        let seqs: Vec<Vec<u8>> = (0..2)
            .map(|_| {
                let len = r.random_range(depth + 1..=depth + 10);
                (0..len).map(|_| r.random_range(0..m as u8)).collect()
            })
            .collect();
        let data = Dataset::from_symbols(m, seqs.clone(), depth).unwrap();
        let trie = CountTrie::build(&data);
        let hyper = DirichletHyper::symmetric(alpha).unwrap();
        let expected = ln_q_tree(&direct_counts(&seqs, &refs, m, depth), alpha);
        let got = log_q(&tree, &trie, &hyper).unwrap();
        assert!(
            (got - expected).abs() < 1e-9,
            "case {case}: {got} vs {expected} for {ctx:?}"
        );
    }
}

#[test]
fn tree_counts_match_direct_scan() {
    let mut r = rng(5);
    for _ in 0..100 {
        let m = r.random_range(2..=4usize);
        let depth = r.random_range(1..=4usize);
        let ctx = random_tree(&mut r, m, depth, 0.6);
        let refs: Vec<&str> = ctx.iter().map(String::as_str).collect();
        let tree = ContextTree::parse(m, &refs, depth).unwrap();
        let seqs: Vec<Vec<u8>> = (0..3)
            .map(|_| {
                (0..r.random_range(depth + 1..200))
                    .map(|_| r.random_range(0..m as u8))
                    .collect()
            })
            .collect();
        let trie = CountTrie::build(&Dataset::from_symbols(m, seqs.clone(), depth).unwrap());
        let expected = direct_counts(&seqs, &refs, m, depth);
        let got: BTreeMap<String, Vec<u64>> = counts_for_tree(&trie, &tree)
            .unwrap()
            .into_iter()
            .map(|(c, n)| (c.render_oldest_first(), n))
            .collect();
        assert_eq!(got, expected);
    }
}

#[test]
fn bayes_factor_over_the_four_binary_depth_two_trees() {
    let seqs = vec![vec![
        0, 1, 1, 0, 1, 0, 0, 1, 1, 1, 0, 1, 1, 0, 0, 0, 1, 0, 1, 1, 1, 1, 0,
    ]];
    let trie = CountTrie::build(&Dataset::from_symbols(2, seqs.clone(), 2).unwrap());
    let alpha = 0.001;
    let q = |ctx: &[&str]| ln_q_tree(&direct_counts(&seqs, ctx, 2, 2), alpha);
    // Symbol 0 labels no inner node of {0,1} and {0,01,11}.
    let renewing = [q(&["0", "1"]), q(&["0", "01", "11"])];
    let not_renewing = [q(&["00", "10", "1"]), q(&["00", "10", "01", "11"])];
    let lse = |v: [f64; 2]| {
        let hi = v[0].max(v[1]);
        hi + ((v[0] - hi).exp() + (v[1] - hi).exp()).ln()
    };
    let expected = (lse(renewing) - lse(not_renewing)) / std::f64::consts::LN_10;
    let base = TreePrior::uniform(2, 2).unwrap();
    let got = exact_log10_bayes_factor(&trie, &DirichletHyper::symmetric(alpha).unwrap(), &base, 0).unwrap();
    assert!((got - expected).abs() < 1e-9, "{got} vs {expected}");
}

#[test]
fn exact_posterior_matches_normalised_rising_factorials() {
    let seqs = vec![vec![1, 0, 0, 1, 0, 1, 1, 1, 0, 0, 1, 0, 1, 0, 0, 0, 1, 1, 0]];
    let trie = CountTrie::build(&Dataset::from_symbols(2, seqs.clone(), 3).unwrap());
    let prior = TreePrior::uniform(2, 3).unwrap();
    let post = exact_posterior(&trie, &prior, &DirichletHyper::symmetric(1.0).unwrap()).unwrap();
    assert_eq!(post.len(), 25);
    let raw: Vec<(Vec<String>, f64)> = post
        .keys()
        .map(|t| {
            let n = names(t);
            let refs: Vec<&str> = n.iter().map(String::as_str).collect();
            let lq = ln_q_tree(&direct_counts(&seqs, &refs, 2, 3), 1.0);
            (n, lq)
        })
        .collect();
    let hi = raw.iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max);
    let z: f64 = raw.iter().map(|x| (x.1 - hi).exp()).sum();
    for ((tree, p), (_, lq)) in post.iter().zip(&raw) {
        let expected = (lq - hi).exp() / z;
        assert!((p - expected).abs() < 1e-12, "{tree}: {p} vs {expected}");
    }
}

#[test]
fn single_context_q_with_unit_alpha_is_a_beta_function() {
    // With alpha = 1 and counts (a, b): q = a! b! / (a + b + 1)!.
    let counts = [7u64, 4];
    let expected = (5040.0f64 * 24.0 / 479_001_600.0).ln();
    assert!((ln_q_context(&counts, &[1.0, 1.0]) - expected).abs() < 1e-12);
}

#[test]
fn proposal_frequencies_match_the_kernel() {
    // Three growable leaves (00, 10, 11) and two prunable sibling sets
    // (children of 0 and of 01), so each grow has probability 1/6 and each
    // prune 1/4.
    let tree = ContextTree::parse(2, &["00", "10", "001", "101", "11"], 3).unwrap();
    let prior = TreePrior::uniform(2, 3).unwrap();
    let mut r = rng_from_seed(99);
    let draws = 100_000usize;
    let mut seen: BTreeMap<Vec<String>, (usize, bool, f64)> = BTreeMap::new();
    for _ in 0..draws {
        let p = propose(&tree, &prior, &mut r).unwrap();
        let grow = matches!(p.applied, Move::Grow { .. });
        let e = seen.entry(names(&p.tree)).or_insert((0, grow, p.log_forward));
        e.0 += 1;
    }
    assert_eq!(seen.len(), 5);
    for (t, (n, grow, log_fwd)) in &seen {
        let p: f64 = if *grow { 1.0 / 6.0 } else { 0.25 };
        assert!((log_fwd - p.ln()).abs() < 1e-12, "{t:?}");
        let sd = (draws as f64 * p * (1.0 - p)).sqrt();
        let dev = (*n as f64 - draws as f64 * p).abs();
        assert!(dev < 3.0 * sd, "{t:?}: {n} draws, expected {}", draws as f64 * p);
    }
}

fn check_simulated_frequencies(pct: &vlmc_core::simulate::ProbabilisticContextTree, seed: u64) {
    let depth = pct.tree().depth();
    let z = simulate_sequence(pct, 200_000, seed, 1000);
    let n = names(pct.tree());
    let refs: Vec<&str> = n.iter().map(String::as_str).collect();
    let counts = direct_counts(&[z], &refs, 2, depth);
    for (ctx, p) in pct.iter() {
        let c = &counts[&ctx.render_oldest_first()];
        let total = (c[0] + c[1]) as f64;
        assert!(total > 1000.0, "{ctx} rarely visited");
        let sd = (p[1] * (1.0 - p[1]) / total).sqrt();
        let freq = c[1] as f64 / total;
        assert!((freq - p[1]).abs() < 4.0 * sd, "{ctx}: {freq} vs {}", p[1]);
    }
}

#[test]
fn simulated_transitions_follow_model_one() {
    check_simulated_frequencies(&model1(), 3);
}

#[test]
fn simulated_transitions_follow_model_two() {
    check_simulated_frequencies(&model2(), 4);
}

#[test]
fn reference_simulator_agrees_on_next_symbol_rates() {
    // A second simulator driven by the raw strings gives the same symbol
    // frequencies up to sampling noise.
    let pct = model1();
    let table: Vec<(String, Vec<f64>)> = pct.iter().map(|(c, p)| (c.render_oldest_first(), p.to_vec())).collect();
    let rows: Vec<(&str, Vec<f64>)> = table.iter().map(|(c, p)| (c.as_str(), p.clone())).collect();
    let a = common::simulate_reference(&rows, 200_000, 8);
    let b = simulate_sequence(&pct, 200_000, 9, 1000);
    let ones = |z: &[u8]| z.iter().filter(|&&s| s == 1).count() as f64 / z.len() as f64;
    assert!((ones(&a) - ones(&b)).abs() < 0.01, "{} vs {}", ones(&a), ones(&b));
}
