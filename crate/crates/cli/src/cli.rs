//! Command-line interface.

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use verbsense::corpus::parse_corpus;
use verbsense::eval::{run_experiment, ExperimentConfig, ExperimentReport, Metric};
use verbsense::synth::{generate_synthetic, GeneratorSpec};
use verbsense::{score_senses, CommitPolicy, Database, SamplerConfig, SentenceExample, Strategy, Thesaurus, Weighting};

use crate::server::{router, Session};

#[derive(Debug, Parser)]
#[command(name = "verbsense", version, about = "Example-based verb sense disambiguation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cross-validated comparison of sampling strategies.
    Run(RunArgs),
    /// Writes a synthetic thesaurus, seed database and corpus.
    Gen(GenArgs),
    /// Ranks the senses of one sentence.
    Score(ScoreArgs),
    /// Serves an annotation session over HTTP.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Random,
    Utility,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Reject,
    ExtendFrame,
}

#[derive(Debug, Clone, Args)]
pub struct Inputs {
    #[arg(long)]
    pub thesaurus: PathBuf,
    #[arg(long)]
    pub seeds: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SamplerArgs {
    /// Weight of the top score in interpretation certainty.
    #[arg(long, default_value_t = 0.5, value_parser = unit_interval)]
    pub lambda: f64,
    /// Exponent on case selectivity. Without it only the most selective
    /// case(s) count.
    #[arg(long, value_parser = non_negative, conflicts_with = "ccd_argmax_only")]
    pub alpha: Option<f64>,
    /// Weight only the most selective case(s) (the default).
    #[arg(long)]
    pub ccd_argmax_only: bool,
    /// Number of best senses averaged in the utility estimate.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub k: u64,
    /// Sentences labeled per iteration.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub batch: u64,
    /// What to do with a label whose sense lacks one of the sentence's cases.
    #[arg(long, value_enum, default_value_t = PolicyArg::Reject)]
    pub policy: PolicyArg,
}

impl SamplerArgs {
    pub fn config(&self) -> SamplerConfig {
        SamplerConfig {
            lambda: self.lambda,
            k: self.k as usize,
            batch_size: self.batch as usize,
            weighting: match self.alpha {
                Some(alpha) => Weighting::Power { alpha },
                None => Weighting::ArgmaxOnly,
            },
            policy: match self.policy {
                PolicyArg::Reject => CommitPolicy::Reject,
                PolicyArg::ExtendFrame => CommitPolicy::ExtendFrame,
            },
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[command(flatten)]
    pub inputs: Inputs,
    #[arg(long, value_enum, default_value_t = StrategyArg::Both)]
    pub strategy: StrategyArg,
    #[command(flatten)]
    pub sampler: SamplerArgs,
    /// Penalty for wrong answers in PM.
    #[arg(long, default_value_t = 1.0, value_parser = non_negative)]
    pub p: f64,
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(2..))]
    pub folds: u64,
    /// Evaluate every this many iterations.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub eval_stride: u64,
    #[arg(long, default_value_t = 0)]
    pub rng_seed: u64,
    /// Directory for curves.csv and summary.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl RunArgs {
    pub fn config(&self) -> ExperimentConfig {
        ExperimentConfig {
            folds: self.folds as usize,
            strategies: match self.strategy {
                StrategyArg::Random => vec![Strategy::Random],
                StrategyArg::Utility => vec![Strategy::Utility],
                StrategyArg::Both => vec![Strategy::Random, Strategy::Utility],
            },
            sampler: self.sampler.config(),
            p: self.p,
            rng_seed: self.rng_seed,
            eval_stride: self.eval_stride as usize,
            ..ExperimentConfig::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    /// Generator spec (JSON).
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ScoreArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    /// Sentence as JSON, e.g. {"id":"1","verb":"toru","complements":[["o","kippu"]]}
    #[arg(long)]
    pub sentence: String,
    #[arg(long, value_parser = non_negative, conflicts_with = "ccd_argmax_only")]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub ccd_argmax_only: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[command(flatten)]
    pub inputs: Inputs,
    #[command(flatten)]
    pub sampler: SamplerArgs,
    /// Session file; resumed when it exists, rewritten after every label.
    #[arg(long)]
    pub session: PathBuf,
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub addr: SocketAddr,
    /// Allow cross-origin requests (for a UI served elsewhere).
    #[arg(long)]
    pub cors: bool,
}

fn unit_interval(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is not in [0, 1]"))
    }
}

fn non_negative(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{v} must be a finite number >= 0"))
    }
}

fn load_inputs(inputs: &Inputs) -> Result<(Thesaurus, Database)> {
    let thesaurus = Thesaurus::load(&inputs.thesaurus)
        .with_context(|| format!("loading thesaurus {}", inputs.thesaurus.display()))?;
    let seeds =
        Database::load_seeds(&inputs.seeds).with_context(|| format!("loading seeds {}", inputs.seeds.display()))?;
    Ok((thesaurus, seeds))
}

fn load_corpus(path: &Path, seeds: &Database) -> Result<Vec<SentenceExample>> {
    Ok(parse_corpus(path, Some(seeds))
        .with_context(|| format!("loading corpus {}", path.display()))?
        .examples)
}

pub fn run(args: &RunArgs) -> Result<ExperimentReport> {
    let (thesaurus, seeds) = load_inputs(&args.inputs)?;
    let corpus = load_corpus(&args.corpus, &seeds)?;
    let report = run_experiment(&corpus, Arc::new(thesaurus), &seeds, &args.config())?;
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        std::fs::write(dir.join("curves.csv"), report.to_csv())?;
        std::fs::write(
            dir.join("summary.json"),
            serde_json::to_string_pretty(&report.summary())?,
        )?;
    }
    Ok(report)
}

pub fn print_summary(report: &ExperimentReport) {
    let summary = report.summary();
    println!("majority-sense lower bound: {:.4}", summary.lower_bound);
    for &s in &report.config.strategies {
        let finals = &summary.strategies[&s.to_string()].final_precision;
        let mean_final = finals.iter().sum::<f64>() / finals.len().max(1) as f64;
        println!(
            "{s:>8}: precision area {:.4}  pm area {:.4}  final precision {:.4}",
            report.mean_area(s, Metric::Precision),
            report.mean_area(s, Metric::Pm),
            mean_final
        );
    }
}

pub fn gen(args: &GenArgs) -> Result<()> {
    let spec = GeneratorSpec::load(&args.spec).with_context(|| format!("loading spec {}", args.spec.display()))?;
    let data = generate_synthetic(&spec)?;
    data.write_to(&args.out_dir)?;
    println!(
        "wrote {} leaves, {} senses, {} sentences to {}",
        data.thesaurus.num_leaves(),
        data.seeds.num_senses(),
        data.corpus.len(),
        args.out_dir.display()
    );
    Ok(())
}

pub fn score(args: &ScoreArgs) -> Result<String> {
    let (thesaurus, seeds) = load_inputs(&args.inputs)?;
    let x: SentenceExample = serde_json::from_str(&args.sentence).context("parsing --sentence")?;
    let weighting = match args.alpha {
        Some(alpha) => Weighting::Power { alpha },
        None => Weighting::ArgmaxOnly,
    };
    let ranking = score_senses(&x, &seeds, &thesaurus, weighting)?;
    Ok(serde_json::to_string_pretty(&ranking)?)
}

pub fn session(args: &ServeArgs) -> Result<Session> {
    let (thesaurus, seeds) = load_inputs(&args.inputs)?;
    let corpus = load_corpus(&args.corpus, &seeds)?;
    Ok(Session::open(
        Arc::new(thesaurus),
        seeds,
        corpus,
        args.sampler.config(),
        Some(args.session.clone()),
    )?)
}

pub async fn serve(args: &ServeArgs) -> Result<()> {
    let session = session(args)?;
    let mut app = router(Arc::new(Mutex::new(session)));
    if args.cors {
        app = app.layer(tower_http::cors::CorsLayer::permissive());
    }
    let listener = tokio::net::TcpListener::bind(args.addr)
        .await
        .with_context(|| format!("binding {}", args.addr))?;
    tracing::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
