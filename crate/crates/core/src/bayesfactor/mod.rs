//! Partial and intrinsic Bayes factors for the renewal hypothesis.
//!
//! All reported values are `log10` Bayes factors of "`a` is a renewal state"
//! against "`a` is not a renewal state".

mod renewal;

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::LN_10;
use core::fmt;

use crate::error::{Error, Result};
use crate::math::log_sum_exp;

pub use renewal::{pbf_hat, PbfRecord, RenewalConfig, RenewalReport, RenewalTest, SubsetOutcome};

/// Every size-`v` training subset of `I` sequences, in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetPlan {
    sequences: usize,
    v: usize,
    subsets: Vec<Vec<usize>>,
}

impl SubsetPlan {
    /// Requires `1 <= v < sequences` so every test set is non-empty.
    pub fn new(sequences: usize, v: usize) -> Result<Self> {
        if v == 0 || v >= sequences {
            return Err(Error::InvalidParameter(format!(
                "training size v = {v} must satisfy 1 <= v < I = {sequences}"
            )));
        }
        let mut subsets = Vec::new();
        let mut current: Vec<usize> = (0..v).collect();
        loop {
            subsets.push(current.clone());
            // Advance to the next combination in lexicographic order.
            let Some(i) = (0..v).rev().find(|&i| current[i] < sequences - v + i) else {
                break;
            };
            current[i] += 1;
            for j in i + 1..v {
                current[j] = current[j - 1] + 1;
            }
        }
        Ok(SubsetPlan { sequences, v, subsets })
    }

    pub fn sequences(&self) -> usize {
        self.sequences
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }
}

/// How many extreme PBFs to drop before averaging.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Trim {
    /// Total fraction in `[0, 0.5)`; `floor(f/2 * N)` records go from each tail.
    Fraction(f64),
    /// Records dropped from each tail.
    Count(usize),
}

impl Default for Trim {
    fn default() -> Self {
        Trim::Fraction(0.10)
    }
}

impl Trim {
    pub fn validate(self) -> Result<Self> {
        match self {
            Trim::Fraction(f) if !(0.0..0.5).contains(&f) => Err(Error::InvalidParameter(format!(
                "trim fraction {f} must lie in [0, 0.5)"
            ))),
            t => Ok(t),
        }
    }

    pub fn per_tail(self, n: usize) -> usize {
        match self {
            Trim::Fraction(f) => libm::floor(f / 2.0 * n as f64) as usize,
            Trim::Count(k) => k,
        }
    }
}

/// `log10` AIBF and GIBF, untrimmed and trimmed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aggregates {
    pub aibf: f64,
    pub gibf: f64,
    pub aibf_trimmed: f64,
    pub gibf_trimmed: f64,
    pub trim: Trim,
    pub trimmed_per_tail: usize,
}

/// `log10` of the arithmetic mean of `10^x`.
pub fn log10_arithmetic_mean(log10_values: &[f64]) -> f64 {
    let ln: Vec<f64> = log10_values.iter().map(|x| x * LN_10).collect();
    (log_sum_exp(&ln) - libm::log(log10_values.len() as f64)) / LN_10
}

/// `log10` of the geometric mean of `10^x`.
pub fn log10_geometric_mean(log10_values: &[f64]) -> f64 {
    log10_values.iter().sum::<f64>() / log10_values.len() as f64
}

/// Aggregates `log10` PBFs. Input order does not affect the result.
pub fn aggregate(log10_pbfs: &[f64], trim: Trim) -> Result<Aggregates> {
    let trim = trim.validate()?;
    if log10_pbfs.is_empty() {
        return Err(Error::InvalidParameter("no PBFs to aggregate".into()));
    }
    if let Some(x) = log10_pbfs.iter().find(|x| !x.is_finite()) {
        return Err(Error::Numeric(format!("non-finite log10 PBF {x}")));
    }
    let mut sorted = log10_pbfs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let k = trim.per_tail(sorted.len());
    if 2 * k >= sorted.len() {
        return Err(Error::InvalidParameter(format!(
            "trimming {k} from each tail removes all {} PBFs",
            sorted.len()
        )));
    }
    let kept = &sorted[k..sorted.len() - k];
    Ok(Aggregates {
        aibf: log10_arithmetic_mean(&sorted),
        gibf: log10_geometric_mean(&sorted),
        aibf_trimmed: log10_arithmetic_mean(kept),
        gibf_trimmed: log10_geometric_mean(kept),
        trim,
        trimmed_per_tail: k,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Strength {
    BareMention,
    Substantial,
    Strong,
    Decisive,
}

impl fmt::Display for Strength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strength::BareMention => "bare mention",
            Strength::Substantial => "substantial",
            Strength::Strong => "strong",
            Strength::Decisive => "decisive",
        })
    }
}

/// Which hypothesis a Bayes factor supports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Favors {
    Renewing,
    NotRenewing,
}

impl fmt::Display for Favors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Favors::Renewing => "renewing",
            Favors::NotRenewing => "not renewing",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Evidence {
    pub strength: Strength,
    pub favors: Favors,
}

impl fmt::Display for Evidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (favoring {})", self.strength, self.favors)
    }
}

/// Kass-Raftery band of a `log10` Bayes factor. Each band includes its lower
/// boundary; zero counts as favoring the renewal hypothesis.
pub fn kass_raftery_label(log10_bf: f64) -> Result<Evidence> {
    if !log10_bf.is_finite() {
        return Err(Error::Numeric(format!(
            "cannot label a non-finite Bayes factor {log10_bf}"
        )));
    }
    let x = log10_bf.abs();
    let strength = if x < 0.5 {
        Strength::BareMention
    } else if x < 1.0 {
        Strength::Substantial
    } else if x < 2.0 {
        Strength::Strong
    } else {
        Strength::Decisive
    };
    let favors = if log10_bf >= 0.0 {
        Favors::Renewing
    } else {
        Favors::NotRenewing
    };
    Ok(Evidence { strength, favors })
}
