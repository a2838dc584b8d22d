//! JSON and CSV formats.
//!
//! Contexts are always written oldest symbol first in files. [`Render`] only
//! affects human-facing summaries.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use vlmc_core::bayesfactor::{Evidence, RenewalReport, Trim};
use vlmc_core::inference::ChainRecord;
use vlmc_core::simulate::ProbabilisticContextTree;
use vlmc_core::{AllowedMatrix, Context, ContextTree};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Render {
    #[default]
    OldestFirst,
    RecentFirst,
}

impl Render {
    pub fn context(self, c: &Context) -> String {
        match self {
            Render::OldestFirst => c.render_oldest_first(),
            Render::RecentFirst => c.render_recent_first(),
        }
    }

    pub fn tree(self, t: &ContextTree) -> String {
        let parts: Vec<String> = t.contexts().iter().map(|c| self.context(c)).collect();
        format!("{{{}}}", parts.join(", "))
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialise");
    s.push('\n');
    s
}

/// `{"L": int, "m": int, "contexts": [..]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeJson {
    #[serde(rename = "L")]
    pub depth_bound: usize,
    pub m: usize,
    pub contexts: Vec<String>,
}

impl TreeJson {
    pub fn from_tree(tree: &ContextTree, depth_bound: usize) -> Self {
        TreeJson {
            depth_bound,
            m: tree.alphabet_size(),
            contexts: tree.contexts().iter().map(Context::render_oldest_first).collect(),
        }
    }

    pub fn to_tree(&self) -> CliResult<ContextTree> {
        Ok(ContextTree::parse(self.m, &self.contexts, self.depth_bound)?)
    }
}

/// `{"m": int, "allowed": [[bool, ..], ..]}`, rows are the current symbol and
/// columns the next one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllowedJson {
    pub m: usize,
    pub allowed: Vec<Vec<bool>>,
}

impl AllowedJson {
    pub fn from_matrix(a: &AllowedMatrix) -> Self {
        AllowedJson {
            m: a.size(),
            allowed: a.rows().map(<[bool]>::to_vec).collect(),
        }
    }

    pub fn to_matrix(&self) -> CliResult<AllowedMatrix> {
        if self.allowed.len() != self.m {
            return Err(CliError::Usage(format!(
                "allowed matrix declares m = {} but has {} rows",
                self.m,
                self.allowed.len()
            )));
        }
        Ok(AllowedMatrix::new(self.allowed.clone())?)
    }
}

/// Tree JSON plus `"p": {"<context>": [floats]}` and an optional allowed
/// matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PctJson {
    #[serde(flatten)]
    pub tree: TreeJson,
    pub p: BTreeMap<String, Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub allowed: Option<Vec<Vec<bool>>>,
}

impl PctJson {
    pub fn from_pct(pct: &ProbabilisticContextTree) -> Self {
        PctJson {
            tree: TreeJson::from_tree(pct.tree(), pct.tree().depth()),
            p: pct.iter().map(|(c, p)| (c.render_oldest_first(), p.to_vec())).collect(),
            allowed: pct.allowed().map(|a| a.rows().map(<[bool]>::to_vec).collect()),
        }
    }

    pub fn to_pct(&self) -> CliResult<ProbabilisticContextTree> {
        let tree = self.tree.to_tree()?;
        let mut probs = BTreeMap::new();
        for (name, p) in &self.p {
            let c: Context = name
                .parse()
                .map_err(|e: vlmc_core::tree::ParseContextError| CliError::Usage(e.to_string()))?;
            probs.insert(c, p.clone());
        }
        let allowed = self
            .allowed
            .clone()
            .map(|rows| {
                AllowedJson {
                    m: self.tree.m,
                    allowed: rows,
                }
                .to_matrix()
            })
            .transpose()?;
        Ok(ProbabilisticContextTree::new(tree, probs, allowed)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrimJson {
    /// `fraction` or `count`.
    pub kind: &'static str,
    pub value: f64,
    pub per_tail: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvidenceJson {
    pub strength: String,
    pub favors: String,
}

impl From<Evidence> for EvidenceJson {
    fn from(e: Evidence) -> Self {
        EvidenceJson {
            strength: e.strength.to_string(),
            favors: e.favors.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PbfJson {
    pub subset: Vec<usize>,
    pub log10_pbf: f64,
    pub log10_num: f64,
    pub log10_den: f64,
    pub seeds: [u64; 2],
    pub acceptance: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportJson {
    pub state: u8,
    #[serde(rename = "I")]
    pub sequences: usize,
    pub v: usize,
    pub n_iter: usize,
    pub burn_in: usize,
    pub seed: u64,
    pub trim: TrimJson,
    pub log10_aibf: f64,
    pub log10_gibf: f64,
    pub log10_aibf_trimmed: f64,
    pub log10_gibf_trimmed: f64,
    pub label_aibf: EvidenceJson,
    pub label_gibf: EvidenceJson,
    pub label_aibf_trimmed: EvidenceJson,
    pub label_gibf_trimmed: EvidenceJson,
    pub records: Vec<PbfJson>,
}

impl ReportJson {
    pub fn from_report(r: &RenewalReport) -> Self {
        let a = &r.aggregates;
        let (kind, value) = match a.trim {
            Trim::Fraction(f) => ("fraction", f),
            Trim::Count(k) => ("count", k as f64),
        };
        ReportJson {
            state: r.state,
            sequences: r.sequences,
            v: r.v,
            n_iter: r.n_iter,
            burn_in: r.burn_in,
            seed: r.seed,
            trim: TrimJson {
                kind,
                value,
                per_tail: a.trimmed_per_tail,
            },
            log10_aibf: a.aibf,
            log10_gibf: a.gibf,
            log10_aibf_trimmed: a.aibf_trimmed,
            log10_gibf_trimmed: a.gibf_trimmed,
            label_aibf: r.labels[0].into(),
            label_gibf: r.labels[1].into(),
            label_aibf_trimmed: r.labels[2].into(),
            label_gibf_trimmed: r.labels[3].into(),
            records: r
                .records
                .iter()
                .map(|p| PbfJson {
                    subset: p.subset.clone(),
                    log10_pbf: p.log10_pbf,
                    log10_num: p.log10_num,
                    log10_den: p.log10_den,
                    seeds: p.seeds,
                    acceptance: p.acceptance,
                })
                .collect(),
        }
    }
}

/// Per-subset PBFs; subset indices are `;`-separated and 0-based.
pub fn pbf_csv(r: &RenewalReport) -> String {
    let mut out = String::from("subset,log10_pbf,log10_num,log10_den,acceptance_renewing,acceptance_not_renewing\n");
    for p in &r.records {
        let subset: Vec<String> = p.subset.iter().map(usize::to_string).collect();
        writeln!(
            out,
            "{},{},{},{},{},{}",
            subset.join(";"),
            p.log10_pbf,
            p.log10_num,
            p.log10_den,
            p.acceptance[0],
            p.acceptance[1]
        )
        .expect("writing to a String");
    }
    out
}

/// One line per iteration: `iter,tree_id,log_q,accepted`.
pub fn chain_csv(chain: &ChainRecord) -> String {
    let mut out = String::from("iter,tree_id,log_q,accepted\n");
    for (i, ((id, q), acc)) in chain.tree_ids.iter().zip(&chain.log_q).zip(&chain.accepted).enumerate() {
        writeln!(out, "{},{id},{q},{}", i + 1, u8::from(*acc)).expect("writing to a String");
    }
    out
}

/// `{"<tree_id>": [contexts]}` companion of [`chain_csv`].
pub fn chain_trees_json(chain: &ChainRecord) -> String {
    let map: BTreeMap<usize, Vec<String>> = chain
        .trees
        .iter()
        .enumerate()
        .map(|(i, t)| (i, t.contexts().iter().map(Context::render_oldest_first).collect()))
        .collect();
    to_json(&map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use vlmc_core::simulate::model2;

    #[test]
    fn tree_json_round_trip() {
        let t = ContextTree::parse(2, &["0", "01", "11"], 3).unwrap();
        let j = TreeJson::from_tree(&t, 3);
        let text = serde_json::to_string(&j).unwrap();
        assert_eq!(text, r#"{"L":3,"m":2,"contexts":["0","01","11"]}"#);
        let back: TreeJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_tree().unwrap(), t);
    }

    #[test]
    fn pct_json_round_trip() {
        let pct = model2();
        let j = PctJson::from_pct(&pct);
        let text = serde_json::to_string(&j).unwrap();
        let back: PctJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_pct().unwrap(), pct);
        assert_eq!(j.p["101111"], vec![0.75, 0.25]);
    }

    #[test]
    fn allowed_json_matches_table_layout() {
        let a = AllowedMatrix::portuguese_rhythm();
        let j = AllowedJson::from_matrix(&a);
        assert_eq!(j.allowed[4], vec![false, false, true, true, false]);
        assert_eq!(j.to_matrix().unwrap(), a);
        let bad = AllowedJson {
            m: 3,
            allowed: j.allowed.clone(),
        };
        assert!(bad.to_matrix().is_err());
    }

    #[test]
    fn render_directions() {
        let t = ContextTree::parse(2, &["0", "01", "11"], 2).unwrap();
        assert_eq!(Render::OldestFirst.tree(&t), "{0, 01, 11}");
        assert_eq!(Render::RecentFirst.tree(&t), "{0, 10, 11}");
    }
}
