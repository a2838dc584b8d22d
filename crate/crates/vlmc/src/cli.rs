//! The `vlmc` command line.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use vlmc_core::bayesfactor::{kass_raftery_label, RenewalConfig, RenewalReport, RenewalTest, Trim};
use vlmc_core::inference::exact::{exact_log10_bayes_factor, exact_log_evidence, exact_posterior};
use vlmc_core::inference::{mh_run, DirichletHyper, DEFAULT_ALPHA};
use vlmc_core::simulate::{default_burn_in, model1, model2, simulate, ProbabilisticContextTree};
use vlmc_core::tree::tree_space_size;
use vlmc_core::{AllowedMatrix, Context, CountTrie, Dataset, TreePrior};

use crate::error::{CliError, CliResult};
use crate::formats::{
    chain_csv, chain_trees_json, pbf_csv, read_json, to_json, AllowedJson, PctJson, Render, ReportJson,
};
use crate::io::{read_dataset, write_dataset, write_text};
use crate::manifest::Manifest;
use crate::parallel::run_renewal;

#[derive(Debug, Parser)]
#[command(
    name = "vlmc",
    version,
    about = "Renewal-state tests for variable-length Markov chains"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a dataset from a built-in model or a PCT file.
    Simulate(SimulateArgs),
    /// Sample context trees from their posterior.
    Posterior(PosteriorArgs),
    /// Intrinsic Bayes factors for "a is a renewal state".
    Renewal(RenewalArgs),
    /// Exact evidence, posterior and Bayes factors by enumeration.
    Exact(ExactArgs),
    /// Re-run the command recorded in a manifest.
    Replay { manifest: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// 0 is a renewal state.
    Model1,
    /// Same chain with the context 01111 split, so 0 is not a renewal state.
    Model2,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Built-in binary model of depth 6.
    #[arg(long, value_enum, conflicts_with = "pct", required_unless_present = "pct")]
    pub model: Option<Model>,
    /// Probabilistic context tree JSON.
    #[arg(long)]
    pub pct: Option<PathBuf>,
    /// Number of sequences.
    #[arg(long = "I", value_name = "I")]
    pub sequences: usize,
    /// Length of every sequence.
    #[arg(long = "T", value_name = "T")]
    pub length: usize,
    #[arg(long, env = "VLMC_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Discarded steps before each kept window [default: max(1000, 10 L)].
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Whitespace-separated symbols, one sequence per line.
    #[arg(long)]
    pub data: PathBuf,
    /// Alphabet size m.
    #[arg(long, short = 'm')]
    pub alphabet_size: usize,
    /// Depth bound L.
    #[arg(long, short = 'L')]
    pub max_depth: usize,
    /// Allowed-transition matrix JSON.
    #[arg(long)]
    pub allowed: Option<PathBuf>,
    /// Dirichlet hyperparameter for every allowed coordinate.
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
}

#[derive(Debug, Args)]
pub struct PosteriorArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Restrict the prior to trees in which this symbol is a renewal state.
    #[arg(long, conflicts_with = "not_renewing")]
    pub renewing: Option<u8>,
    /// Restrict the prior to trees in which this symbol is not a renewal state.
    #[arg(long)]
    pub not_renewing: Option<u8>,
    /// Metropolis-Hastings iterations per chain.
    #[arg(long, default_value_t = 100_000)]
    pub iters: usize,
    /// Leading iterations left out of the estimates.
    #[arg(long, default_value_t = 0)]
    pub burn_in: usize,
    #[arg(long, env = "VLMC_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Trees shown on standard output.
    #[arg(long, default_value_t = 10)]
    pub top: usize,
    #[arg(long, default_value = "vlmc-out")]
    pub out_dir: PathBuf,
    /// Write the whole chain as CSV plus a tree dictionary.
    #[arg(long)]
    pub dump_chain: bool,
    #[arg(long, value_enum, default_value_t = Render::OldestFirst)]
    pub render: Render,
}

#[derive(Debug, Args)]
pub struct RenewalArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// The symbol tested as a renewal state.
    #[arg(long)]
    pub state: u8,
    /// Sequences per training sample.
    #[arg(long, default_value_t = 1)]
    pub v: usize,
    /// Metropolis-Hastings iterations per chain.
    #[arg(long, default_value_t = 100_000)]
    pub iters: usize,
    /// Leading iterations left out of the estimates.
    #[arg(long, default_value_t = 0)]
    pub burn_in: usize,
    /// Total fraction of PBFs trimmed, split evenly between the tails.
    #[arg(long, default_value_t = 0.10)]
    pub trim: f64,
    /// PBFs trimmed from each tail; overrides --trim.
    #[arg(long)]
    pub trim_count: Option<usize>,
    #[arg(long, env = "VLMC_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Worker threads [default: available parallelism].
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long, default_value = "vlmc-out")]
    pub out_dir: PathBuf,
    /// Write both chains of every subset under chains/.
    #[arg(long)]
    pub dump_chain: bool,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    /// Dataset; without one the counts are all zero.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, short = 'm')]
    pub alphabet_size: usize,
    #[arg(long, short = 'L')]
    pub max_depth: usize,
    #[arg(long)]
    pub allowed: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    /// Only this renewal state [default: every symbol].
    #[arg(long)]
    pub state: Option<u8>,
    #[arg(long, default_value_t = 10)]
    pub top: usize,
    #[arg(long, default_value = "vlmc-out")]
    pub out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = Render::OldestFirst)]
    pub render: Render,
}

/// Parses `args` (program name first), runs the command and returns what
/// should go to standard output.
pub fn run<I, S>(args: I) -> CliResult<String>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Ok(e.to_string()),
                _ => Err(CliError::Usage(e.to_string())),
            };
        }
    };
    let raw = &args[1.min(args.len())..];
    match cli.command {
        Command::Simulate(a) => cmd_simulate(&a, raw),
        Command::Posterior(a) => cmd_posterior(&a, raw),
        Command::Renewal(a) => cmd_renewal(&a, raw),
        Command::Exact(a) => cmd_exact(&a, raw),
        Command::Replay { manifest } => {
            let m = Manifest::read(&manifest)?;
            let cwd = m.config.get("cwd").and_then(|v| v.as_str()).map(PathBuf::from);
            if let Some(dir) = cwd {
                std::env::set_current_dir(&dir).map_err(|e| CliError::io(&dir, e))?;
            }
            run(std::iter::once(m.tool.clone()).chain(m.args))
        }
    }
}

/// `raw` with any `--seed` replaced by the resolved value, so the manifest
/// does not depend on the environment.
fn resolved_args(raw: &[String], seed: u64) -> Vec<String> {
    let mut out = Vec::with_capacity(raw.len() + 2);
    let mut it = raw.iter();
    while let Some(a) = it.next() {
        if a == "--seed" {
            it.next();
        } else if !a.starts_with("--seed=") {
            out.push(a.clone());
        }
    }
    out.push("--seed".into());
    out.push(seed.to_string());
    out
}

fn manifest(command: &str, seed: u64, raw: &[String], mut config: serde_json::Value) -> Manifest {
    if let Ok(cwd) = std::env::current_dir() {
        config["cwd"] = json!(cwd.display().to_string());
    }
    Manifest::new(command, seed, resolved_args(raw, seed), config)
}

fn load_allowed(path: Option<&Path>) -> CliResult<Option<AllowedMatrix>> {
    path.map(|p| read_json::<AllowedJson>(p)?.to_matrix()).transpose()
}

fn hyper(alpha: f64, allowed: Option<&AllowedMatrix>) -> CliResult<DirichletHyper> {
    let h = DirichletHyper::symmetric(alpha)?;
    Ok(match allowed {
        Some(a) => h.with_allowed(a.clone()),
        None => h,
    })
}

fn base_prior(m: usize, depth: usize, allowed: Option<&AllowedMatrix>) -> vlmc_core::tree::TreePriorBuilder {
    let b = TreePrior::builder(m, depth);
    match allowed {
        Some(a) => b.no_prohibited_inner(a.clone()),
        None => b,
    }
}

struct Loaded {
    dataset: Dataset,
    allowed: Option<AllowedMatrix>,
    hyper: DirichletHyper,
}

fn load(data: &DataArgs) -> CliResult<Loaded> {
    let allowed = load_allowed(data.allowed.as_deref())?;
    let dataset = read_dataset(&data.data, data.alphabet_size, data.max_depth)?;
    if let Some(a) = &allowed {
        dataset.check_allowed(a)?;
    }
    let hyper = hyper(data.alpha, allowed.as_ref())?;
    Ok(Loaded {
        dataset,
        allowed,
        hyper,
    })
}

fn data_config(d: &DataArgs) -> serde_json::Value {
    json!({
        "data": d.data.display().to_string(),
        "m": d.alphabet_size,
        "L": d.max_depth,
        "allowed": d.allowed.as_ref().map(|p| p.display().to_string()),
        "alpha": d.alpha,
    })
}

fn cmd_simulate(a: &SimulateArgs, raw: &[String]) -> CliResult<String> {
    let (pct, source): (ProbabilisticContextTree, String) = match (&a.model, &a.pct) {
        (Some(Model::Model1), _) => (model1(), "model1".into()),
        (Some(Model::Model2), _) => (model2(), "model2".into()),
        (None, Some(path)) => (read_json::<PctJson>(path)?.to_pct()?, path.display().to_string()),
        (None, None) => return Err(CliError::Usage("one of --model or --pct is required".into())),
    };
    let burn_in = a.burn_in.unwrap_or_else(|| default_burn_in(pct.tree().depth()));
    let dataset = simulate(&pct, a.sequences, a.length, a.seed, burn_in)?;
    write_dataset(&a.out, &dataset)?;
    let manifest_path = PathBuf::from(format!("{}.manifest.json", a.out.display()));
    let mut m = manifest(
        "simulate",
        a.seed,
        raw,
        json!({
            "model": source,
            "I": a.sequences,
            "T": a.length,
            "burn_in": burn_in,
            "m": pct.tree().alphabet_size(),
            "depth": pct.tree().depth(),
        }),
    );
    m.outputs = vec![a.out.display().to_string()];
    m.write(&manifest_path)?;
    Ok(format!(
        "wrote {} sequences of length {} to {} (seed {})\n",
        a.sequences,
        a.length,
        a.out.display(),
        a.seed
    ))
}

#[derive(Serialize)]
struct TreeFrequency {
    rank: usize,
    frequency: f64,
    contexts: Vec<String>,
    rendered: String,
}

fn tree_frequencies(list: &[(vlmc_core::ContextTree, f64)], render: Render) -> Vec<TreeFrequency> {
    list.iter()
        .enumerate()
        .map(|(i, (t, f))| TreeFrequency {
            rank: i + 1,
            frequency: *f,
            contexts: t.contexts().iter().map(Context::render_oldest_first).collect(),
            rendered: render.tree(t),
        })
        .collect()
}

fn cmd_posterior(a: &PosteriorArgs, raw: &[String]) -> CliResult<String> {
    let Loaded {
        dataset,
        allowed,
        hyper,
    } = load(&a.data)?;
    let mut builder = base_prior(dataset.alphabet_size(), dataset.depth_bound(), allowed.as_ref());
    if let Some(s) = a.renewing {
        builder = builder.renewing(s);
    }
    if let Some(s) = a.not_renewing {
        builder = builder.not_renewing(s);
    }
    let prior = builder.build()?;
    if a.burn_in >= a.iters {
        return Err(CliError::Usage(format!(
            "--burn-in {} leaves no iterations of {}",
            a.burn_in, a.iters
        )));
    }
    let trie = CountTrie::build(&dataset);
    let chain = mh_run(&trie, &prior, &hyper, a.iters, a.seed, None)?;
    let freqs = chain.frequencies(a.burn_in);
    let trees = tree_frequencies(&freqs, a.render);

    let dir = &a.out_dir;
    let report = json!({
        "n_iter": a.iters,
        "burn_in": a.burn_in,
        "seed": a.seed,
        "acceptance_rate": chain.acceptance_rate,
        "distinct_trees": trees.len(),
        "render": a.render,
        "trees": trees,
    });
    let mut outputs = vec![dir.join("posterior.json")];
    write_text(&outputs[0], &to_json(&report))?;
    if a.dump_chain {
        outputs.push(dir.join("chain.csv"));
        write_text(&outputs[1], &chain_csv(&chain))?;
        outputs.push(dir.join("chain_trees.json"));
        write_text(&outputs[2], &chain_trees_json(&chain))?;
    }
    let mut config = data_config(&a.data);
    config["iters"] = json!(a.iters);
    config["burn_in"] = json!(a.burn_in);
    config["renewing"] = json!(a.renewing);
    config["not_renewing"] = json!(a.not_renewing);
    let mut m = manifest("posterior", a.seed, raw, config);
    m.outputs = outputs.iter().map(|p| p.display().to_string()).collect();
    m.write(&dir.join("manifest.json"))?;

    let mut out = format!(
        "acceptance rate {:.4} over {} iterations; {} distinct trees\nrank\tfrequency\ttree\n",
        chain.acceptance_rate,
        a.iters,
        trees.len()
    );
    for t in trees.iter().take(a.top) {
        writeln!(out, "{}\t{:.4}\t{}", t.rank, t.frequency, t.rendered).expect("writing to a String");
    }
    Ok(out)
}

fn summary_table(r: &RenewalReport) -> String {
    let g = &r.aggregates;
    format!(
        "a\tI\tv\tAIBF\tGIBF\tAIBF_trim\tGIBF_trim\n{}\t{}\t{}\t{:.2}\t{:.2}\t{:.2}\t{:.2}\nGIBF: {}; trimmed GIBF: {}\n",
        r.state, r.sequences, r.v, g.aibf, g.gibf, g.aibf_trimmed, g.gibf_trimmed, r.labels[1], r.labels[3]
    )
}

fn cmd_renewal(a: &RenewalArgs, raw: &[String]) -> CliResult<String> {
    let Loaded {
        dataset,
        allowed,
        hyper,
    } = load(&a.data)?;
    let base = base_prior(dataset.alphabet_size(), dataset.depth_bound(), allowed.as_ref()).build()?;
    let config = RenewalConfig {
        state: a.state,
        v: a.v,
        n_iter: a.iters,
        burn_in: a.burn_in,
        hyper,
        trim: match a.trim_count {
            Some(k) => Trim::Count(k),
            None => Trim::Fraction(a.trim),
        },
        seed: a.seed,
        record_chains: a.dump_chain,
    };
    let test = RenewalTest::new(&dataset, &base, config)?;
    let jobs = a
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let (report, chains) = run_renewal(&test, jobs)?;

    let dir = &a.out_dir;
    let mut outputs = vec![dir.join("report.json"), dir.join("pbf.csv"), dir.join("summary.tsv")];
    write_text(&outputs[0], &to_json(&ReportJson::from_report(&report)))?;
    write_text(&outputs[1], &pbf_csv(&report))?;
    let summary = summary_table(&report);
    write_text(&outputs[2], &summary)?;
    if a.dump_chain {
        for (chains, subset) in chains.iter().zip(test.plan().subsets()) {
            let Some(pair) = chains else { continue };
            let name: Vec<String> = subset.iter().map(usize::to_string).collect();
            let name = name.join("-");
            for (chain, label) in pair.iter().zip(["renewing", "not_renewing"]) {
                let stem = dir.join("chains").join(format!("subset_{name}_{label}"));
                let csv = stem.with_extension("csv");
                let trees = PathBuf::from(format!("{}_trees.json", stem.display()));
                write_text(&csv, &chain_csv(chain))?;
                write_text(&trees, &chain_trees_json(chain))?;
                outputs.push(csv);
                outputs.push(trees);
            }
        }
    }
    let mut config = data_config(&a.data);
    config["state"] = json!(a.state);
    config["v"] = json!(a.v);
    config["iters"] = json!(a.iters);
    config["burn_in"] = json!(a.burn_in);
    config["trim"] = json!(a.trim);
    config["trim_count"] = json!(a.trim_count);
    let mut m = manifest("renewal", a.seed, raw, config);
    m.outputs = outputs.iter().map(|p| p.display().to_string()).collect();
    m.write(&dir.join("manifest.json"))?;
    Ok(summary)
}

fn cmd_exact(a: &ExactArgs, raw: &[String]) -> CliResult<String> {
    let allowed = load_allowed(a.allowed.as_deref())?;
    let trie = match &a.data {
        Some(path) => {
            let d = read_dataset(path, a.alphabet_size, a.max_depth)?;
            if let Some(al) = &allowed {
                d.check_allowed(al)?;
            }
            CountTrie::build(&d)
        }
        None => CountTrie::empty(a.alphabet_size, a.max_depth),
    };
    let hyper = hyper(a.alpha, allowed.as_ref())?;
    let prior = base_prior(a.alphabet_size, a.max_depth, allowed.as_ref()).build()?;
    let posterior = exact_posterior(&trie, &prior, &hyper)?;
    let log_evidence = exact_log_evidence(&trie, &prior, &hyper)?;
    let mut ranked: Vec<_> = posterior.into_iter().collect();
    ranked.sort_by(|x, y| y.1.total_cmp(&x.1).then_with(|| x.0.cmp(&y.0)));

    let states: Vec<u8> = match a.state {
        Some(s) => vec![s],
        None => (0..a.alphabet_size).map(|s| s as u8).collect(),
    };
    let mut factors = Vec::new();
    for s in states {
        match exact_log10_bayes_factor(&trie, &hyper, &prior, s) {
            Ok(bf) => {
                let label = kass_raftery_label(bf)?;
                factors.push(json!({"state": s, "log10_bf": bf, "label": label.to_string()}));
            }
            Err(e @ vlmc_core::Error::EmptySupport(_)) if a.state.is_none() => {
                factors.push(json!({"state": s, "log10_bf": null, "note": e.to_string()}));
            }
            Err(e) => return Err(e.into()),
        }
    }
    let space = tree_space_size(a.alphabet_size, a.max_depth).to_string();
    let trees = tree_frequencies(&ranked, a.render);
    let report = json!({
        "m": a.alphabet_size,
        "L": a.max_depth,
        "tree_space": space,
        "support_size": trees.len(),
        "log_evidence": log_evidence,
        "bayes_factors": factors,
        "posterior": trees,
    });
    let path = a.out_dir.join("exact.json");
    write_text(&path, &to_json(&report))?;
    let mut config = json!({
        "data": a.data.as_ref().map(|p| p.display().to_string()),
        "m": a.alphabet_size,
        "L": a.max_depth,
        "allowed": a.allowed.as_ref().map(|p| p.display().to_string()),
        "alpha": a.alpha,
        "state": a.state,
    });
    config["top"] = json!(a.top);
    let mut m = manifest("exact", 0, raw, config);
    m.args.truncate(m.args.len() - 2);
    m.outputs = vec![path.display().to_string()];
    m.write(&a.out_dir.join("manifest.json"))?;

    let mut out = format!("{} trees enumerated; ln evidence {log_evidence:.6}\n", trees.len());
    for f in &factors {
        match f["log10_bf"].as_f64() {
            Some(bf) => writeln!(
                out,
                "state {}: log10 BF {bf:.4} ({})",
                f["state"],
                f["label"].as_str().unwrap_or("")
            ),
            None => writeln!(out, "state {}: {}", f["state"], f["note"].as_str().unwrap_or("")),
        }
        .expect("writing to a String");
    }
    for t in trees.iter().take(a.top) {
        writeln!(out, "{}\t{:.6}\t{}", t.rank, t.frequency, t.rendered).expect("writing to a String");
    }
    Ok(out)
}
