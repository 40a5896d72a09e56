//! The staged pipeline. Each stage reads and writes plain files in the output
//! directory and is skipped when its inputs and outputs match the manifest.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use fs2::FileExt;
use scitype_core::cluster::{
    evaluate, holdout_split, seeded_kmeans, KMeansParams, PaperType, TypeAssignment,
};
use scitype_core::formats::{
    lattice_json, parse_assignments, parse_edges, parse_gold, parse_keyphrases, parse_papers, parse_seeds,
    parse_texts, parse_vectors, rank_candidates, read_rng_seed, write_assignments, write_candidates,
    write_concepts, write_edges, write_gold, write_keyphrases, write_papers, write_seeds, write_texts,
    write_vectors, PaperText,
};
use scitype_core::metadata::{ingest_corpus, Corpus, PaperExport, PaperRecord};
use scitype_core::query::{Retrainer, CANDIDATES_FILE, LATTICE_FILE};
use scitype_core::relations::{
    build_context, coauthorship, cocitation, enumerate_concepts, lattice_cover, lattice_dot, type_citations,
    RuleTable,
};
use scitype_core::store::{bulk_load_machine_results, Store};
use scitype_core::text::{build_tfidf, feature_text, keyphrase_frequencies, keyphrases, FeatureSource};
use scitype_core::{PaperId, TypeId};

use crate::error::CliError;
use crate::manifest::{files_hash, read_manifest, write_manifest, HashBuilder, ManifestLine};

pub const PAPERS: &str = "papers.jsonl";
pub const TEXTS: &str = "texts.jsonl";
pub const INGEST_LOG: &str = "ingest.log";
pub const VECTORS: &str = "vectors.jsonl";
pub const KEYPHRASES: &str = "keyphrases.jsonl";
pub const ASSIGNMENTS: &str = "assignments.tsv";
pub const TRAIN_SEEDS: &str = "train_seeds.tsv";
pub const GOLD: &str = "gold.tsv";
pub const CANDIDATES: &str = CANDIDATES_FILE;
pub const EVAL: &str = "eval.txt";
pub const EDGES: &str = "edges.tsv";
pub const CONCEPTS: &str = "concepts.jsonl";
pub const LATTICE: &str = LATTICE_FILE;
pub const LATTICE_DOT: &str = "lattice.dot";
pub const COCITATION: &str = "cocitation.tsv";
pub const COAUTHORSHIP: &str = "coauthorship.tsv";

const LOCK_FILE: &str = ".scitype.lock";
/// Keyphrases kept per paper by the tfidf stage; the relations stage uses a prefix.
const KEYPHRASES_PER_PAPER: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Ingest,
    Tfidf,
    Cluster,
    Evaluate,
    Relations,
    BulkLoad,
}

impl Stage {
    pub const ALL: [Stage; 6] =
        [Stage::Ingest, Stage::Tfidf, Stage::Cluster, Stage::Evaluate, Stage::Relations, Stage::BulkLoad];

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Tfidf => "tfidf",
            Stage::Cluster => "cluster",
            Stage::Evaluate => "evaluate",
            Stage::Relations => "relations",
            Stage::BulkLoad => "bulk-load",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Stage::ALL.into_iter().find(|st| st.as_str() == s).ok_or_else(|| format!("unknown stage '{s}'"))
    }
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub corpus: Option<PathBuf>,
    pub seeds: Option<PathBuf>,
    pub rules: Option<PathBuf>,
    pub rng_seed: u64,
    pub features: FeatureSource,
    pub out: PathBuf,
    pub store: Option<PathBuf>,
    /// Fraction of seeds held out as gold; 0 keeps every seed for training.
    pub holdout: f64,
    /// Extra gold labels scored by the evaluate stage instead of the held-out seeds.
    pub gold: Option<PathBuf>,
    pub top_k: usize,
    pub restarts: usize,
}

impl PipelineConfig {
    pub fn new(out: impl Into<PathBuf>) -> Self {
        Self {
            corpus: None,
            seeds: None,
            rules: None,
            rng_seed: 0,
            features: FeatureSource::Abstract,
            out: out.into(),
            store: None,
            holdout: 0.3,
            gold: None,
            top_k: 3,
            restarts: KMeansParams::default().restarts,
        }
    }

    pub fn store_dir(&self) -> PathBuf {
        self.store.clone().unwrap_or_else(|| self.out.join("store"))
    }

    /// Checks every path `stages` need before any of them runs.
    pub fn validate(&self, stages: &[Stage]) -> Result<(), CliError> {
        let has = |s: Stage| stages.contains(&s);
        if has(Stage::Ingest) {
            match &self.corpus {
                Some(c) if c.is_dir() => {}
                Some(c) => return Err(CliError::Usage(format!("corpus directory {} does not exist", c.display()))),
                None => return Err(CliError::Usage("--corpus is required".into())),
            }
        }
        if has(Stage::Cluster) {
            require_file("--seeds", self.seeds.as_deref())?;
            if !(0.0..1.0).contains(&self.holdout) {
                return Err(CliError::Usage(format!("--holdout must be in [0, 1), got {}", self.holdout)));
            }
        }
        if let Some(g) = &self.gold {
            require_file("--gold", Some(g))?;
        }
        if has(Stage::Relations) {
            require_file("--rules", self.rules.as_deref())?;
        }
        if self.out.exists() && !self.out.is_dir() {
            return Err(CliError::Usage(format!("{} is not a directory", self.out.display())));
        }
        Ok(())
    }

    fn params(&self) -> KMeansParams {
        KMeansParams { rng_seed: self.rng_seed, restarts: self.restarts, ..KMeansParams::default() }
    }
}

fn require_file(flag: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) if p.is_file() => Ok(()),
        Some(p) => Err(CliError::Usage(format!("{flag}: {} is not a readable file", p.display()))),
        None => Err(CliError::Usage(format!("{flag} is required"))),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StageStatus {
    Ran { duration_ms: u128 },
    Skipped,
}

type StageResult<T> = Result<T, String>;

fn read(path: &Path) -> StageResult<String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn write(dir: &Path, name: &str, contents: &str) -> StageResult<()> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| format!("{}: {e}", path.display()))
}

fn err<E: fmt::Display>(context: &str) -> impl FnOnce(E) -> String + '_ {
    move |e| format!("{context}: {e}")
}

/// Every file under a directory, sorted by relative path.
fn tree_files(root: &Path) -> StageResult<Vec<(String, Vec<u8>)>> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        let entries = fs::read_dir(&dir).map_err(err(&dir.display().to_string()))?;
        for entry in entries {
            let entry = entry.map_err(err(&dir.display().to_string()))?;
            let path = entry.path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(root).expect("under root").to_string_lossy().replace('\\', "/");
                let bytes = fs::read(&path).map_err(err(&path.display().to_string()))?;
                out.push((rel, bytes));
            }
        }
    }
    out.sort();
    Ok(out)
}

fn hash_files(h: &mut HashBuilder, dir: &Path, names: &[&str]) -> StageResult<()> {
    for name in names {
        let path = dir.join(name);
        let bytes = fs::read(&path).map_err(err(&path.display().to_string()))?;
        h.part(name, &bytes);
    }
    Ok(())
}

/// Files each stage writes into the output directory.
pub fn stage_outputs(stage: Stage) -> &'static [&'static str] {
    match stage {
        Stage::Ingest => &[PAPERS, TEXTS, INGEST_LOG],
        Stage::Tfidf => &[VECTORS, KEYPHRASES],
        Stage::Cluster => &[ASSIGNMENTS, TRAIN_SEEDS, GOLD, CANDIDATES],
        Stage::Evaluate => &[EVAL],
        Stage::Relations => &[EDGES, CONCEPTS, LATTICE, LATTICE_DOT, COCITATION, COAUTHORSHIP],
        Stage::BulkLoad => &[],
    }
}

pub struct Pipeline {
    config: PipelineConfig,
    _lock: fs::File,
}

impl Pipeline {
    /// Validates the configuration for `stages` and takes the output
    /// directory lock.
    pub fn open(config: PipelineConfig, stages: &[Stage]) -> Result<Self, CliError> {
        config.validate(stages)?;
        fs::create_dir_all(&config.out).map_err(|e| CliError::io(&config.out, e))?;
        let lock_path = config.out.join(LOCK_FILE);
        let lock = fs::OpenOptions::new()
            .create(true)
            .truncate(false)
            .write(true)
            .open(&lock_path)
            .map_err(|e| CliError::io(&lock_path, e))?;
        lock.try_lock_exclusive().map_err(|_| CliError::Busy(config.out.clone()))?;
        Ok(Self { config, _lock: lock })
    }

    /// Runs `stages` in order, printing one status line per stage.
    pub fn run(&self, stages: &[Stage]) -> Result<Vec<(Stage, StageStatus)>, CliError> {
        let mut manifest = read_manifest(&self.config.out);
        let mut report = Vec::new();
        for &stage in stages {
            let status = self.run_stage(stage, &mut manifest)?;
            match &status {
                StageStatus::Skipped => println!("{stage}: skipped (up-to-date)"),
                StageStatus::Ran { duration_ms } => println!("{stage}: done in {duration_ms} ms"),
            }
            report.push((stage, status));
        }
        Ok(report)
    }

    fn run_stage(&self, stage: Stage, manifest: &mut BTreeMap<Stage, ManifestLine>) -> Result<StageStatus, CliError> {
        let failed = |message: String| CliError::Stage { stage, message };
        let input_hash = self.input_hash(stage).map_err(failed)?;
        if let Some(line) = manifest.get(&stage) {
            if line.input_hash == input_hash && self.output_hash(stage).as_deref() == Some(line.output_hash.as_str()) {
                return Ok(StageStatus::Skipped);
            }
        }
        // A failed stage must not look up to date on the next run.
        if manifest.remove(&stage).is_some() {
            write_manifest(&self.config.out, manifest)?;
        }
        let started = Instant::now();
        self.execute(stage).map_err(failed)?;
        let duration_ms = started.elapsed().as_millis();
        let output_hash = self.output_hash(stage).ok_or_else(|| failed("outputs missing after run".into()))?;
        manifest.insert(stage, ManifestLine { stage, input_hash, output_hash, duration_ms });
        write_manifest(&self.config.out, manifest)?;
        Ok(StageStatus::Ran { duration_ms })
    }

    fn input_hash(&self, stage: Stage) -> StageResult<String> {
        let c = &self.config;
        let out = &c.out;
        let mut h = HashBuilder::default();
        h.part("stage", stage.as_str().as_bytes());
        match stage {
            Stage::Ingest => {
                let corpus = c.corpus.as_deref().ok_or("no corpus directory configured")?;
                for (name, bytes) in tree_files(corpus)? {
                    h.part(&name, &bytes);
                }
            }
            Stage::Tfidf => {
                h.part("features", c.features.to_string().as_bytes());
                hash_files(&mut h, out, &[PAPERS, TEXTS])?;
            }
            Stage::Cluster => {
                let seeds = c.seeds.as_deref().ok_or("no seeds file configured")?;
                h.part("seeds", read(seeds)?.as_bytes())
                    .part("rng_seed", &c.rng_seed.to_be_bytes())
                    .part("holdout", &c.holdout.to_be_bytes())
                    .part("restarts", &(c.restarts as u64).to_be_bytes());
                hash_files(&mut h, out, &[VECTORS])?;
            }
            Stage::Evaluate => {
                hash_files(&mut h, out, &[ASSIGNMENTS, GOLD])?;
                if let Some(g) = &c.gold {
                    h.part("gold", read(g)?.as_bytes());
                }
            }
            Stage::Relations => {
                let rules = c.rules.as_deref().ok_or("no rules file configured")?;
                h.part("rules", read(rules)?.as_bytes()).part("top_k", &(c.top_k as u64).to_be_bytes());
                hash_files(&mut h, out, &[PAPERS, ASSIGNMENTS, KEYPHRASES])?;
            }
            Stage::BulkLoad => {
                h.part("store", c.store_dir().to_string_lossy().as_bytes());
                hash_files(&mut h, out, &[PAPERS, TRAIN_SEEDS, ASSIGNMENTS, EDGES, CANDIDATES, LATTICE])?;
            }
        }
        Ok(h.finish())
    }

    fn output_hash(&self, stage: Stage) -> Option<String> {
        match stage {
            Stage::BulkLoad => {
                let dir = self.config.store_dir();
                let store = Store::open_read_only(&dir).ok()?;
                let sidecars = files_hash(&dir, &[CANDIDATES, LATTICE])?;
                Some(HashBuilder::default().part("state", store.state().content_hash().as_bytes()).part("sidecars", sidecars.as_bytes()).finish())
            }
            _ => files_hash(&self.config.out, stage_outputs(stage)),
        }
    }

    fn execute(&self, stage: Stage) -> StageResult<()> {
        match stage {
            Stage::Ingest => self.ingest(),
            Stage::Tfidf => self.tfidf(),
            Stage::Cluster => self.cluster(),
            Stage::Evaluate => self.evaluate(),
            Stage::Relations => self.relations(),
            Stage::BulkLoad => self.bulk_load(),
        }
    }

    fn ingest(&self) -> StageResult<()> {
        let corpus_dir = self.config.corpus.as_deref().ok_or("no corpus directory configured")?;
        let corpus = ingest_corpus(corpus_dir).map_err(|e| e.to_string())?;
        let out = &self.config.out;
        let exports: Vec<PaperExport> = corpus.records.iter().map(PaperRecord::to_export).collect();
        let texts: Vec<PaperText> = corpus
            .records
            .iter()
            .map(|r| PaperText {
                paper_id: r.paper_id.clone(),
                abstract_text: r.abstract_text.clone(),
                body_text: r.body_text.clone(),
            })
            .collect();
        let mut log = String::new();
        for w in &corpus.warnings {
            log.push_str(&format!("warning\t{w}\n"));
        }
        for m in &corpus.merge_log {
            log.push_str(&format!("merged\t{}\t{}\t{}\n", m.kept, m.merged, m.conflicts.join(",")));
        }
        write(out, PAPERS, &write_papers(&exports))?;
        write(out, TEXTS, &write_texts(&texts))?;
        write(out, INGEST_LOG, &log)
    }

    fn tfidf(&self) -> StageResult<()> {
        let out = &self.config.out;
        let records = load_records(out)?;
        let texts: Vec<(PaperId, String)> =
            records.iter().map(|r| (r.paper_id.clone(), feature_text(r, self.config.features))).collect();
        let tfidf = build_tfidf(texts.iter().map(|(p, t)| (p, t.as_str()))).map_err(|e| e.to_string())?;
        let df = keyphrase_frequencies(texts.iter().map(|(_, t)| t.as_str()));
        let phrases: BTreeMap<PaperId, _> =
            texts.iter().map(|(p, t)| (p.clone(), keyphrases(t, KEYPHRASES_PER_PAPER, &df))).collect();
        write(out, VECTORS, &write_vectors(&tfidf.vectors))?;
        write(out, KEYPHRASES, &write_keyphrases(&phrases))
    }

    fn cluster(&self) -> StageResult<()> {
        let c = &self.config;
        let out = &c.out;
        let vectors = parse_vectors(&read(&out.join(VECTORS))?).map_err(err(VECTORS))?;
        let seeds_path = c.seeds.as_deref().ok_or("no seeds file configured")?;
        let types = parse_seeds(&read(seeds_path)?).map_err(err("seeds"))?;
        let (train, gold) = if c.holdout > 0.0 {
            holdout_split(&types, c.holdout, c.rng_seed).map_err(|e| e.to_string())?
        } else {
            (types, BTreeMap::new())
        };
        let clustering = seeded_kmeans(&vectors, &train, &c.params()).map_err(|e| e.to_string())?;
        let assignments = clustering.to_assignments(&vectors);
        let seed = Some(c.rng_seed);
        write(out, ASSIGNMENTS, &write_assignments(&assignments, seed))?;
        write(out, TRAIN_SEEDS, &format!("# rng_seed={}\n{}", c.rng_seed, write_seeds(&train)))?;
        write(out, GOLD, &write_gold(&gold, seed))?;
        write(out, CANDIDATES, &write_candidates(&rank_candidates(&vectors, &clustering.centroids)))
    }

    fn evaluate(&self) -> StageResult<()> {
        let c = &self.config;
        let out = &c.out;
        let assignments_text = read(&out.join(ASSIGNMENTS))?;
        let rng_seed = read_rng_seed(&assignments_text).unwrap_or(c.rng_seed);
        let assignments = parse_assignments(&assignments_text).map_err(err(ASSIGNMENTS))?;
        let gold_text = match &c.gold {
            Some(g) => read(g)?,
            None => read(&out.join(GOLD))?,
        };
        let gold = parse_gold(&gold_text).map_err(err("gold"))?;
        let mut text = format!("# rng_seed={rng_seed}\n");
        if gold.is_empty() {
            text.push_str("no gold labels\n");
        } else {
            let report = evaluate(&assignment_map(&assignments), &gold).map_err(|e| e.to_string())?;
            text.push_str(&report.to_string());
            if !text.ends_with('\n') {
                text.push('\n');
            }
        }
        write(out, EVAL, &text)
    }

    fn relations(&self) -> StageResult<()> {
        let c = &self.config;
        let out = &c.out;
        let papers = parse_papers(&read(&out.join(PAPERS))?).map_err(err(PAPERS))?;
        let assignments_text = read(&out.join(ASSIGNMENTS))?;
        let rng_seed = read_rng_seed(&assignments_text).unwrap_or(c.rng_seed);
        let assignments = parse_assignments(&assignments_text).map_err(err(ASSIGNMENTS))?;
        let phrases = parse_keyphrases(&read(&out.join(KEYPHRASES))?).map_err(err(KEYPHRASES))?;
        let rules_path = c.rules.as_deref().ok_or("no rules file configured")?;
        let rules = RuleTable::parse(&read(rules_path)?).map_err(err("rules"))?;

        let typed = assignment_map(&assignments);
        let pairs = citation_pairs(&papers);
        let edges = type_citations(&pairs, &typed, &rules);

        let citations: BTreeMap<PaperId, Vec<PaperId>> =
            papers.iter().map(|p| (p.paper_id.clone(), p.cited_paper_ids.clone())).collect();
        let context = build_context(&citations, &typed, &phrases, c.top_k).map_err(|e| e.to_string())?;
        let concepts = enumerate_concepts(&context);
        let cover = lattice_cover(&concepts);

        let corpus = corpus_of(&papers);
        let mut cocite = String::from("paper_a\tpaper_b\tcount\n");
        for ((a, b), n) in cocitation(&corpus) {
            cocite.push_str(&format!("{a}\t{b}\t{n}\n"));
        }
        let mut coauth = String::from("author_a\tauthor_b\tcount\n");
        for ((a, b), n) in coauthorship(&corpus) {
            coauth.push_str(&format!("{a}\t{b}\t{n}\n"));
        }

        write(out, EDGES, &write_edges(&edges, Some(rng_seed)))?;
        write(out, CONCEPTS, &write_concepts(&context, &concepts))?;
        write(out, LATTICE, &lattice_json(&context, &concepts, &cover))?;
        write(out, LATTICE_DOT, &lattice_dot(&concepts, &cover))?;
        write(out, COCITATION, &cocite)?;
        write(out, COAUTHORSHIP, &coauth)
    }

    fn bulk_load(&self) -> StageResult<()> {
        let out = &self.config.out;
        let papers = parse_papers(&read(&out.join(PAPERS))?).map_err(err(PAPERS))?;
        let types = parse_seeds(&read(&out.join(TRAIN_SEEDS))?).map_err(err(TRAIN_SEEDS))?;
        let assignments = parse_assignments(&read(&out.join(ASSIGNMENTS))?).map_err(err(ASSIGNMENTS))?;
        let edges = parse_edges(&read(&out.join(EDGES))?).map_err(err(EDGES))?;

        let dir = self.config.store_dir();
        fs::create_dir_all(&dir).map_err(err(&dir.display().to_string()))?;
        let mut store = Store::open(&dir).map_err(|e| e.to_string())?;
        store.set_catalog(papers).map_err(|e| e.to_string())?;
        let report = bulk_load_machine_results(&mut store, &types, &assignments, &edges).map_err(|e| e.to_string())?;
        store.write_snapshot().map_err(|e| e.to_string())?;
        for name in [CANDIDATES, LATTICE] {
            let from = out.join(name);
            fs::copy(&from, dir.join(name)).map_err(err(&from.display().to_string()))?;
        }
        println!(
            "bulk-load: {} appended, {} suppressed, {} unchanged, head {}",
            report.appended,
            report.suppressed,
            report.unchanged,
            store.head()
        );
        Ok(())
    }
}

pub fn assignment_map(assignments: &[TypeAssignment]) -> BTreeMap<PaperId, TypeId> {
    assignments.iter().map(|a| (a.paper_id.clone(), a.type_id.clone())).collect()
}

/// In-corpus citation pairs, self-citations dropped.
pub fn citation_pairs(papers: &[PaperExport]) -> Vec<(PaperId, PaperId)> {
    let mut pairs: Vec<(PaperId, PaperId)> = papers
        .iter()
        .flat_map(|p| p.cited_paper_ids.iter().filter(|c| *c != &p.paper_id).map(|c| (p.paper_id.clone(), c.clone())))
        .collect();
    pairs.sort();
    pairs.dedup();
    pairs
}

pub fn corpus_of(papers: &[PaperExport]) -> Corpus {
    Corpus {
        records: papers.iter().cloned().map(PaperRecord::from_export).collect(),
        warnings: Vec::new(),
        merge_log: Vec::new(),
    }
}

/// Papers from the ingest artifacts with their text regions reattached.
pub fn load_records(out: &Path) -> StageResult<Vec<PaperRecord>> {
    let papers = parse_papers(&read(&out.join(PAPERS))?).map_err(err(PAPERS))?;
    let texts: BTreeMap<PaperId, PaperText> = parse_texts(&read(&out.join(TEXTS))?)
        .map_err(err(TEXTS))?
        .into_iter()
        .map(|t| (t.paper_id.clone(), t))
        .collect();
    Ok(papers
        .into_iter()
        .map(|p| {
            let mut r = PaperRecord::from_export(p);
            if let Some(t) = texts.get(&r.paper_id) {
                r.abstract_text = t.abstract_text.clone().or(r.abstract_text);
                r.body_text = t.body_text.clone();
            }
            r
        })
        .collect())
}

/// Builds a retrainer from a finished pipeline output directory.
pub fn load_retrainer(artifacts: &Path, rules: Option<&Path>, gold: Option<&Path>) -> Result<Retrainer, CliError> {
    let fail = |e: String| CliError::Failed(format!("loading retrain inputs from {}: {e}", artifacts.display()));
    let vectors = parse_vectors(&read(&artifacts.join(VECTORS)).map_err(fail)?).map_err(|e| fail(e.to_string()))?;
    let train_text = read(&artifacts.join(TRAIN_SEEDS)).map_err(fail)?;
    let types: Vec<PaperType> = parse_seeds(&train_text).map_err(|e| fail(e.to_string()))?;
    let rules = match rules {
        Some(p) => RuleTable::parse(&read(p).map_err(fail)?).map_err(|e| fail(e.to_string()))?,
        None => RuleTable::default_table(),
    };
    let papers = parse_papers(&read(&artifacts.join(PAPERS)).map_err(fail)?).map_err(|e| fail(e.to_string()))?;
    let gold_text = match gold {
        Some(p) => Some(read(p).map_err(fail)?),
        None => read(&artifacts.join(GOLD)).ok(),
    };
    let gold = match gold_text {
        Some(t) => Some(parse_gold(&t).map_err(|e| fail(e.to_string()))?).filter(|g| !g.is_empty()),
        None => None,
    };
    let rng_seed = read_rng_seed(&train_text).unwrap_or(0);
    Ok(Retrainer {
        vectors,
        types,
        params: KMeansParams { rng_seed, ..KMeansParams::default() },
        rules,
        citations: citation_pairs(&papers),
        gold,
    })
}
