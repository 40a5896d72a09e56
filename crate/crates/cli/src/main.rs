mod error;
mod manifest;
mod pipeline;
mod serve;
mod store_cmd;

use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use scitype_core::cluster::evaluate;
use scitype_core::formats::{parse_assignments, parse_gold, write_histogram, write_stems};
use scitype_core::metadata::{ingest_corpus, Corpus};
use scitype_core::query::{Catalog, Service};
use scitype_core::store::Store;
use scitype_core::text::{abstract_histogram, stem_cloud, FeatureSource};

use crate::error::CliError;
use crate::pipeline::{load_retrainer, Pipeline, PipelineConfig, Stage, EVAL};

/// Types scientific papers by the practical work behind them and serves the
/// resulting ontology for curation.
#[derive(Debug, Parser)]
#[command(name = "scitype", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every stage: ingest, tfidf, cluster, evaluate, relations, bulk-load.
    Run(RunArgs),
    /// Parse the corpus into papers.jsonl and texts.jsonl.
    Ingest {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build TF-IDF vectors and keyphrases from ingested papers in --out.
    Features {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = FeatureSource::Abstract)]
        features: FeatureSource,
    },
    /// Seeded clustering.
    #[command(subcommand)]
    Cluster(ClusterCommand),
    /// Type citations and build the concept lattice from artifacts in --out.
    Relations {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        rules: PathBuf,
        /// Keyphrases per paper used as lattice attributes.
        #[arg(long, default_value_t = 3)]
        top_k: usize,
    },
    /// Load pipeline results from --out, or a state export, into a store.
    Load(LoadArgs),
    /// Serve the query and edit endpoints over HTTP.
    Serve(ServeArgs),
    /// Descriptive corpus statistics as TSV on stdout.
    #[command(subcommand)]
    Stats(StatsCommand),
    /// Print the store state as line-delimited JSON.
    Export(ExportArgs),
    /// Score an assignments file against gold labels.
    Eval {
        #[arg(long)]
        assignments: PathBuf,
        #[arg(long)]
        gold: PathBuf,
    },
    /// Store maintenance.
    #[command(subcommand)]
    Store(StoreCommand),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Corpus directory holding metadata.bib, text/ and refs/.
    #[arg(long)]
    corpus: PathBuf,
    /// Seeds TSV: type_id, description, paper_id.
    #[arg(long)]
    seeds: PathBuf,
    /// Citation rules TSV.
    #[arg(long)]
    rules: PathBuf,
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
    #[arg(long, default_value_t = FeatureSource::Abstract)]
    features: FeatureSource,
    /// Output directory for artifacts and manifest.tsv.
    #[arg(long)]
    out: PathBuf,
    /// Store directory; defaults to <out>/store.
    #[arg(long)]
    store: Option<PathBuf>,
    #[command(flatten)]
    cluster: ClusterOpts,
    #[arg(long, default_value_t = 3)]
    top_k: usize,
}

#[derive(Debug, Args)]
struct ClusterOpts {
    /// Fraction of each type's seeds held out as gold; 0 disables.
    #[arg(long, default_value_t = 0.3)]
    holdout: f64,
    /// Gold TSV (paper_id, type_id) to score instead of the held-out seeds.
    #[arg(long)]
    gold: Option<PathBuf>,
    #[arg(long, default_value_t = 5)]
    restarts: usize,
}

#[derive(Debug, Subcommand)]
enum ClusterCommand {
    /// Ingest, vectorize, cluster and evaluate; prints the evaluation report.
    Run {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        seeds: PathBuf,
        #[arg(long, default_value_t = 0)]
        rng_seed: u64,
        #[arg(long, default_value_t = FeatureSource::Abstract)]
        features: FeatureSource,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        cluster: ClusterOpts,
    },
    /// Recluster with the store's human labels and write the result back.
    Retrain {
        #[arg(long)]
        store: PathBuf,
        /// Output directory of an earlier pipeline run.
        #[arg(long)]
        artifacts: PathBuf,
        #[arg(long)]
        rules: Option<PathBuf>,
        #[arg(long)]
        gold: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct LoadArgs {
    #[arg(long)]
    store: PathBuf,
    /// Pipeline output directory to bulk-load.
    #[arg(long, conflicts_with = "from_export", required_unless_present = "from_export")]
    out: Option<PathBuf>,
    /// State export (from `export`) to replay into the store.
    #[arg(long, requires = "papers")]
    from_export: Option<PathBuf>,
    /// papers.jsonl to use as the store catalog with --from-export.
    #[arg(long)]
    papers: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[arg(long, env = "SCITYPE_STORE")]
    store: PathBuf,
    #[arg(long, env = "SCITYPE_BIND", default_value = "127.0.0.1:8080")]
    bind: SocketAddr,
    /// Write a snapshot every N appended events.
    #[arg(long, env = "SCITYPE_SNAPSHOT_INTERVAL")]
    snapshot_interval: Option<u64>,
    /// Pipeline output directory; enables POST /retrain.
    #[arg(long, env = "SCITYPE_ARTIFACTS")]
    artifacts: Option<PathBuf>,
    #[arg(long, env = "SCITYPE_RULES")]
    rules: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum StatsCommand {
    /// Stem, document frequency and total frequency over abstracts.
    Stems {
        #[arg(long)]
        corpus: PathBuf,
    },
    /// Histogram of abstract lengths in characters.
    Abstracts {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = 100)]
        bucket_width: usize,
    },
    /// In-corpus h-index per author.
    HIndex {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        author: Option<String>,
    },
    /// Citation count by age in years.
    CitationAge {
        #[arg(long)]
        corpus: PathBuf,
    },
}

#[derive(Debug, Args)]
struct ExportArgs {
    #[arg(long)]
    store: PathBuf,
    /// Revision to export; defaults to the head.
    #[arg(long)]
    at: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum StoreCommand {
    /// Print the state at a revision as line-delimited JSON.
    Export(ExportArgs),
    /// Append edits forever (or --count times), acknowledging each on stdout.
    #[command(hide = true)]
    AppendLoop {
        #[arg(long)]
        store: PathBuf,
        #[arg(long, default_value_t = u64::MAX)]
        count: u64,
    },
}

fn pipeline_config(out: PathBuf, opts: &ClusterOpts) -> PipelineConfig {
    let mut config = PipelineConfig::new(out);
    config.holdout = opts.holdout;
    config.gold = opts.gold.clone();
    config.restarts = opts.restarts;
    config
}

fn run_stages(config: PipelineConfig, stages: &[Stage]) -> Result<(), CliError> {
    Pipeline::open(config, stages)?.run(stages).map(drop)
}

fn load_corpus(dir: &Path) -> Result<Corpus, CliError> {
    ingest_corpus(dir).map_err(CliError::failed)
}

fn abstracts(corpus: &Corpus) -> Vec<&str> {
    corpus.records.iter().filter_map(|r| r.abstract_text.as_deref()).collect()
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run(a) => {
            let mut config = pipeline_config(a.out, &a.cluster);
            config.corpus = Some(a.corpus);
            config.seeds = Some(a.seeds);
            config.rules = Some(a.rules);
            config.rng_seed = a.rng_seed;
            config.features = a.features;
            config.store = a.store;
            config.top_k = a.top_k;
            run_stages(config, &Stage::ALL)
        }
        Command::Ingest { corpus, out } => {
            let mut config = PipelineConfig::new(out);
            config.corpus = Some(corpus);
            run_stages(config, &[Stage::Ingest])
        }
        Command::Features { out, features } => {
            let mut config = PipelineConfig::new(out);
            config.features = features;
            run_stages(config, &[Stage::Tfidf])
        }
        Command::Cluster(ClusterCommand::Run { corpus, seeds, rng_seed, features, out, cluster }) => {
            let mut config = pipeline_config(out.clone(), &cluster);
            config.corpus = Some(corpus);
            config.seeds = Some(seeds);
            config.rng_seed = rng_seed;
            config.features = features;
            run_stages(config, &[Stage::Ingest, Stage::Tfidf, Stage::Cluster, Stage::Evaluate])?;
            print!("{}", read_file(&out.join(EVAL))?);
            Ok(())
        }
        Command::Cluster(ClusterCommand::Retrain { store, artifacts, rules, gold }) => {
            let retrainer = load_retrainer(&artifacts, rules.as_deref(), gold.as_deref())?;
            let mut store = Store::open(&store).map_err(CliError::failed)?;
            let outcome = retrainer.run(&mut store).map_err(CliError::failed)?;
            println!("{}", serde_json::to_string_pretty(&outcome).expect("serializable"));
            Ok(())
        }
        Command::Relations { out, rules, top_k } => {
            let mut config = PipelineConfig::new(out);
            config.rules = Some(rules);
            config.top_k = top_k;
            run_stages(config, &[Stage::Relations])
        }
        Command::Load(LoadArgs { store, out: Some(out), .. }) => {
            let mut config = PipelineConfig::new(out);
            config.store = Some(store);
            run_stages(config, &[Stage::BulkLoad])
        }
        Command::Load(LoadArgs { store, from_export, papers, .. }) => {
            let export = from_export.ok_or_else(|| CliError::Usage("--out or --from-export is required".into()))?;
            let hash = store_cmd::import(&store, &export, papers.as_deref())?;
            println!("content_hash {hash}");
            Ok(())
        }
        Command::Serve(a) => {
            let mut store = Store::open(&a.store).map_err(|e| CliError::Failed(format!("opening store: {e}")))?;
            store.set_snapshot_interval(a.snapshot_interval);
            let mut service = Service::new(store).map_err(CliError::Failed)?;
            if let Some(artifacts) = &a.artifacts {
                service = service.with_retrainer(load_retrainer(artifacts, a.rules.as_deref(), None)?);
            }
            let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::io("tokio runtime", e))?;
            runtime.block_on(serve::serve(service, a.bind))
        }
        Command::Stats(StatsCommand::Stems { corpus }) => {
            print!("{}", write_stems(&stem_cloud(abstracts(&load_corpus(&corpus)?))));
            Ok(())
        }
        Command::Stats(StatsCommand::Abstracts { corpus, bucket_width }) => {
            let corpus = load_corpus(&corpus)?;
            let h = abstract_histogram(abstracts(&corpus), bucket_width).map_err(|e| CliError::Usage(e.to_string()))?;
            print!("{}", write_histogram(&h));
            Ok(())
        }
        Command::Stats(StatsCommand::HIndex { corpus, author }) => {
            let catalog = Catalog::from_records(load_corpus(&corpus)?.records);
            println!("author\th_index");
            match author {
                Some(a) => println!("{a}\t{}", catalog.h_index(&a).map_err(CliError::failed)?),
                None => {
                    for (a, h) in catalog.report().h_index {
                        println!("{a}\t{h}");
                    }
                }
            }
            Ok(())
        }
        Command::Stats(StatsCommand::CitationAge { corpus }) => {
            let profile = Catalog::from_records(load_corpus(&corpus)?.records).citation_age_profile();
            println!("age\tcount");
            for (age, n) in &profile.ages {
                println!("{age}\t{n}");
            }
            println!("# anomalous={}", profile.anomalous);
            Ok(())
        }
        Command::Export(a) | Command::Store(StoreCommand::Export(a)) => {
            print!("{}", store_cmd::export(&a.store, a.at)?);
            Ok(())
        }
        Command::Eval { assignments, gold } => {
            let assignments = parse_assignments(&read_file(&assignments)?).map_err(CliError::failed)?;
            let gold = parse_gold(&read_file(&gold)?).map_err(CliError::failed)?;
            let report = evaluate(&pipeline::assignment_map(&assignments), &gold).map_err(CliError::failed)?;
            println!("{report}");
            Ok(())
        }
        Command::Store(StoreCommand::AppendLoop { store, count }) => store_cmd::append_loop(&store, count),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
