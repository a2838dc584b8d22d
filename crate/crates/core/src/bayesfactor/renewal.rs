//! Monte Carlo PBFs over every minimal training sample.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use super::{aggregate, kass_raftery_label, Aggregates, Evidence, SubsetPlan, Trim};
use crate::data::{Dataset, Sequence};
use crate::error::{Error, Result};
use crate::inference::{exact::renewal_priors, ChainRecord, DirichletHyper, ScoreTracker, ScoredTrie, TreeSampler};
use crate::math::{ln_to_log10, LogSumExp};
use crate::seed::derive_seed;
use crate::tree::{ContextTree, TreePrior};
use crate::trie::CountTrie;

const TAG_RENEWING: u64 = 0;
const TAG_NOT_RENEWING: u64 = 1;

/// One partial Bayes factor.
#[derive(Debug, Clone, PartialEq)]
pub struct PbfRecord {
    /// Indices of the training sequences.
    pub subset: Vec<usize>,
    pub log10_pbf: f64,
    /// `log10` of the mean test-set `q` along the renewing chain.
    pub log10_num: f64,
    /// Same along the non-renewing chain.
    pub log10_den: f64,
    /// Chain seeds, renewing first.
    pub seeds: [u64; 2],
    pub acceptance: [f64; 2],
}

#[derive(Debug, Clone)]
pub struct RenewalConfig {
    pub state: u8,
    pub v: usize,
    pub n_iter: usize,
    /// Leading iterations left out of the test-set averages.
    pub burn_in: usize,
    pub hyper: DirichletHyper,
    pub trim: Trim,
    pub seed: u64,
    /// Keep both chains of every subset.
    pub record_chains: bool,
}

impl RenewalConfig {
    pub fn new(state: u8, v: usize, n_iter: usize) -> Self {
        RenewalConfig {
            state,
            v,
            n_iter,
            burn_in: 0,
            hyper: DirichletHyper::default(),
            trim: Trim::default(),
            seed: 0,
            record_chains: false,
        }
    }
}

/// Result of one subset: the record plus the chains when requested.
#[derive(Debug, Clone)]
pub struct SubsetOutcome {
    pub record: PbfRecord,
    pub chains: Option<[ChainRecord; 2]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenewalReport {
    pub state: u8,
    pub sequences: usize,
    pub v: usize,
    pub n_iter: usize,
    pub burn_in: usize,
    pub seed: u64,
    /// In subset order.
    pub records: Vec<PbfRecord>,
    pub aggregates: Aggregates,
    /// Labels for AIBF, GIBF, trimmed AIBF and trimmed GIBF.
    pub labels: [Evidence; 4],
}

struct ChainOutput {
    log_mean_q: f64,
    acceptance: f64,
    chain: Option<ChainRecord>,
}

fn run_chain(
    train: &ScoredTrie<'_>,
    test: &ScoredTrie<'_>,
    prior: &TreePrior,
    config: &RenewalConfig,
    seed: u64,
) -> Result<ChainOutput> {
    let mut sampler = TreeSampler::new(train, prior, seed, None)?;
    let mut test_q = ScoreTracker::new(test, sampler.tree());
    let mut mean = LogSumExp::new();
    let mut chain = config
        .record_chains
        .then(|| Recorder::new(seed, config.n_iter, sampler.tree()));
    for it in 0..config.n_iter {
        let step = sampler.step()?;
        if let Some(applied) = &step.applied {
            test_q.apply(applied, sampler.tree());
        }
        if it >= config.burn_in {
            mean.push(test_q.value());
        }
        if let Some(rec) = chain.as_mut() {
            rec.push(sampler.tree(), sampler.log_q(), step.accepted);
        }
    }
    let log_mean_q = mean.ln_mean();
    if !log_mean_q.is_finite() {
        return Err(Error::Numeric(format!(
            "test-set mean of q is {log_mean_q} in log scale"
        )));
    }
    Ok(ChainOutput {
        log_mean_q,
        acceptance: sampler.acceptance_rate(),
        chain: chain.map(|r| r.finish(sampler.acceptance_rate())),
    })
}

struct Recorder {
    ids: BTreeMap<ContextTree, u32>,
    record: ChainRecord,
    current: u32,
}

impl Recorder {
    fn new(seed: u64, n_iter: usize, init: &ContextTree) -> Self {
        let mut ids = BTreeMap::new();
        ids.insert(init.clone(), 0);
        Recorder {
            ids,
            record: ChainRecord {
                seed,
                trees: alloc::vec![init.clone()],
                tree_ids: Vec::with_capacity(n_iter),
                log_q: Vec::with_capacity(n_iter),
                accepted: Vec::with_capacity(n_iter),
                acceptance_rate: 0.0,
            },
            current: 0,
        }
    }

    fn push(&mut self, tree: &ContextTree, log_q: f64, accepted: bool) {
        if accepted {
            let trees = &mut self.record.trees;
            self.current = *self.ids.entry(tree.clone()).or_insert_with(|| {
                trees.push(tree.clone());
                (trees.len() - 1) as u32
            });
        }
        self.record.tree_ids.push(self.current);
        self.record.log_q.push(log_q);
        self.record.accepted.push(accepted);
    }

    fn finish(mut self, acceptance_rate: f64) -> ChainRecord {
        self.record.acceptance_rate = acceptance_rate;
        self.record
    }
}

/// Monte Carlo PBF for training sequences `train` and test sequences `test`.
///
/// Both chains start from their prior's minimal tree and sample the
/// posterior given `train`; the test-set `q` is averaged along each chain.
pub fn pbf_hat(
    train: &[&Sequence],
    test: &[&Sequence],
    priors: (&TreePrior, &TreePrior),
    config: &RenewalConfig,
    subset: &[usize],
) -> Result<SubsetOutcome> {
    if config.n_iter == 0 {
        return Err(Error::InvalidParameter("n_iter must be positive".into()));
    }
    if config.burn_in >= config.n_iter {
        return Err(Error::InvalidParameter(format!(
            "burn-in {} leaves no iterations out of {}",
            config.burn_in, config.n_iter
        )));
    }
    let (h_a, h_not) = priors;
    let (m, depth) = (h_a.alphabet_size(), h_a.depth_bound());
    let train_trie = CountTrie::from_sequences(m, depth, train.iter().copied());
    let test_trie = CountTrie::from_sequences(m, depth, test.iter().copied());
    let train_scored = ScoredTrie::new(&train_trie, &config.hyper)?;
    let test_scored = ScoredTrie::new(&test_trie, &config.hyper)?;
    let seeds = [
        derive_seed(config.seed, subset, TAG_RENEWING),
        derive_seed(config.seed, subset, TAG_NOT_RENEWING),
    ];
    let num = run_chain(&train_scored, &test_scored, h_a, config, seeds[0])?;
    let den = run_chain(&train_scored, &test_scored, h_not, config, seeds[1])?;
    let record = PbfRecord {
        subset: subset.to_vec(),
        log10_pbf: ln_to_log10(num.log_mean_q - den.log_mean_q),
        log10_num: ln_to_log10(num.log_mean_q),
        log10_den: ln_to_log10(den.log_mean_q),
        seeds,
        acceptance: [num.acceptance, den.acceptance],
    };
    let chains = match (num.chain, den.chain) {
        (Some(a), Some(b)) => Some([a, b]),
        _ => None,
    };
    Ok(SubsetOutcome { record, chains })
}

/// The full renewal test: a PBF for every training subset, then AIBF/GIBF.
///
/// Subsets are independent, so callers may run [`RenewalTest::run_subset`]
/// concurrently and hand the records to [`RenewalTest::finish`] in any order.
#[derive(Debug)]
pub struct RenewalTest<'d> {
    dataset: &'d Dataset,
    config: RenewalConfig,
    plan: SubsetPlan,
    renewing: TreePrior,
    not_renewing: TreePrior,
}

impl<'d> RenewalTest<'d> {
    /// `base` carries any constraints shared by both hypotheses, such as
    /// prohibited transitions.
    pub fn new(dataset: &'d Dataset, base: &TreePrior, config: RenewalConfig) -> Result<Self> {
        if base.alphabet_size() != dataset.alphabet_size() || base.depth_bound() != dataset.depth_bound() {
            return Err(Error::InvalidParameter(format!(
                "prior is for m = {}, L = {} but the dataset has m = {}, L = {}",
                base.alphabet_size(),
                base.depth_bound(),
                dataset.alphabet_size(),
                dataset.depth_bound()
            )));
        }
        if config.n_iter == 0 {
            return Err(Error::InvalidParameter("n_iter must be positive".into()));
        }
        if config.burn_in >= config.n_iter {
            return Err(Error::InvalidParameter(format!(
                "burn-in {} leaves no iterations out of {}",
                config.burn_in, config.n_iter
            )));
        }
        config.trim.validate()?;
        let plan = SubsetPlan::new(dataset.len(), config.v)?;
        let (renewing, not_renewing) = renewal_priors(base, config.state)?;
        Ok(RenewalTest {
            dataset,
            config,
            plan,
            renewing,
            not_renewing,
        })
    }

    pub fn plan(&self) -> &SubsetPlan {
        &self.plan
    }

    pub fn config(&self) -> &RenewalConfig {
        &self.config
    }

    pub fn priors(&self) -> (&TreePrior, &TreePrior) {
        (&self.renewing, &self.not_renewing)
    }

    /// PBF for the `i`-th subset of the plan.
    pub fn run_subset(&self, i: usize) -> Result<SubsetOutcome> {
        let subset = self
            .plan
            .subsets()
            .get(i)
            .ok_or_else(|| Error::InvalidParameter(format!("subset {i} out of {}", self.plan.len())))?;
        let (train, test) = self.dataset.split(subset);
        pbf_hat(&train, &test, self.priors(), &self.config, subset)
    }

    pub fn finish(&self, mut records: Vec<PbfRecord>) -> Result<RenewalReport> {
        records.sort_by(|a, b| a.subset.cmp(&b.subset));
        let values: Vec<f64> = records.iter().map(|r| r.log10_pbf).collect();
        let aggregates = aggregate(&values, self.config.trim)?;
        let labels = [
            kass_raftery_label(aggregates.aibf)?,
            kass_raftery_label(aggregates.gibf)?,
            kass_raftery_label(aggregates.aibf_trimmed)?,
            kass_raftery_label(aggregates.gibf_trimmed)?,
        ];
        Ok(RenewalReport {
            state: self.config.state,
            sequences: self.dataset.len(),
            v: self.config.v,
            n_iter: self.config.n_iter,
            burn_in: self.config.burn_in,
            seed: self.config.seed,
            records,
            aggregates,
            labels,
        })
    }

    /// Runs every subset on the calling thread.
    pub fn run(&self) -> Result<RenewalReport> {
        let records = (0..self.plan.len())
            .map(|i| {
                self.run_subset(i)
                    .map(|o| o.record)
                    .map_err(|e| subset_error(&self.plan.subsets()[i], e))
            })
            .collect::<Result<Vec<_>>>()?;
        self.finish(records)
    }
}

/// Wraps a failure with the subset it came from.
pub(crate) fn subset_error(subset: &[usize], e: Error) -> Error {
    match e {
        Error::Numeric(msg) => Error::Numeric(format!("subset {subset:?}: {msg}")),
        Error::InvalidParameter(msg) => Error::InvalidParameter(format!("subset {subset:?}: {msg}")),
        other => other,
    }
}
