//! Subset-level fan-out for the renewal test.

use rayon::prelude::*;
use vlmc_core::bayesfactor::{RenewalReport, RenewalTest, SubsetOutcome};
use vlmc_core::inference::ChainRecord;
use vlmc_core::Error;

use crate::error::{CliError, CliResult};

/// Chains kept for one subset: renewing first.
pub type SubsetChains = Option<[ChainRecord; 2]>;

/// Runs every subset on `jobs` threads. The report does not depend on `jobs`:
/// seeds are derived per subset and results are reduced in subset order.
pub fn run_renewal(test: &RenewalTest<'_>, jobs: usize) -> CliResult<(RenewalReport, Vec<SubsetChains>)> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {jobs} worker threads: {e}")))?;
    let outcomes: Vec<Result<SubsetOutcome, Error>> = pool.install(|| {
        (0..test.plan().len())
            .into_par_iter()
            .map(|i| test.run_subset(i))
            .collect()
    });
    let mut records = Vec::with_capacity(outcomes.len());
    let mut chains = Vec::with_capacity(outcomes.len());
    for (outcome, subset) in outcomes.into_iter().zip(test.plan().subsets()) {
        match outcome {
            Ok(o) => {
                records.push(o.record);
                chains.push(o.chains);
            }
            Err(e) => return Err(named(subset, e)),
        }
    }
    Ok((test.finish(records)?, chains))
}

fn named(subset: &[usize], e: Error) -> CliError {
    match e {
        Error::Numeric(msg) => Error::Numeric(format!("subset {subset:?}: {msg}")).into(),
        other => CliError::Usage(format!("subset {subset:?}: {other}")),
    }
}
