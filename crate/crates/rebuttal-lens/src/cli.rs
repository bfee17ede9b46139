//! Command-line entry point. One subcommand per pipeline stage; all logic
//! lives in the library modules.
//!
//! Configuration precedence is flags > config file (`key=value` lines) >
//! defaults, and the effective configuration is echoed into every output's
//! metadata (the `--jobs` worker count is excluded: it cannot affect
//! results, and reports must be byte-identical across job counts).
//! Stochastic subcommands refuse to run without `--seed`. Exit codes:
//! 0 success, 1 usage error, 2 data error.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::classifier::{inspect_weights, weights_markdown, TrainConfig};
use crate::corpus::{
    ingest_corpus, tabulate_updates, validate, write_jsonl, Corpus, Format, Subset,
};
use crate::embeddings::EmbeddingStore;
use crate::error::Error;
use crate::evaluation::{
    compare_runs, cross_validate, majority_baseline, random_baseline, CvOptions, EvaluationReport,
    PipelineConfig, RunMetadata, SoftmaxPipeline,
};
use crate::features::{assemble, Dataset, FeatureConfig, FeatureGroup};
use crate::report::{combined_csv, combined_markdown, config_hash, emit_report, ReportFormat};
use crate::scorers::{PrecomputedScores, ScorerBindings, ScorerKind};
use crate::selection::{select_features, SelectionConfig};
use crate::stats::{component_stats, correlation_matrix, llr_rank, time_summary, TTestKind, Which};
use crate::synth::{generate_synthetic_corpus, SynthConfig};
use crate::text::{tokenize_with_eos, SentenceSplitter};

pub const OUT_DIR_ENV: &str = "REBUTTAL_LENS_OUT";

#[derive(Parser, Debug)]
#[command(
    name = "rebuttal-lens",
    version,
    about = "Peer-review corpus analytics and after-rebuttal score-change prediction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a JSONL corpus and print summary counts
    Ingest(IngestArgs),
    /// List data-quality violations (score ranges, aspect consistency, links)
    Validate(CorpusArgs),
    /// Correlation matrix, component stats, update table and time summary
    Stats(StatsArgs),
    /// Contrastive n-gram ranking between INC- and DEC-aligned responses
    Ngrams(NgramsArgs),
    /// Assemble the labeled feature dataset and export it as CSV
    Features(FeaturesArgs),
    /// Information-gain ranking and correlation pruning on a subset
    Select(SelectArgs),
    /// Train a softmax model on a subset and save it as JSON
    Train(TrainArgs),
    /// Repeated k-fold cross-validation of the full pipeline
    Evaluate(EvaluateArgs),
    /// Majority or random baseline on a subset's labels
    Baseline(BaselineArgs),
    /// Generate a synthetic conformity-biased corpus
    Synth(SynthArgs),
    /// Merge evaluation reports into one combined table
    Report(ReportArgs),
}

#[derive(Args, Debug, Default)]
struct CorpusArgs {
    /// Corpus JSONL path
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Config file with key=value lines (flags win over file entries)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default: $REBUTTAL_LENS_OUT or .)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct IngestArgs {
    #[command(flatten)]
    common: CorpusArgs,
    /// Rewrite the parsed corpus as normalized JSONL into the output dir
    #[arg(long)]
    normalize: bool,
}

#[derive(Args, Debug)]
struct StatsArgs {
    #[command(flatten)]
    common: CorpusArgs,
    /// Score side for the correlation matrix: before|after
    #[arg(long, default_value = "after")]
    which: String,
    /// Histogram bucket width in hours
    #[arg(long, default_value_t = 24.0)]
    bucket_hours: f64,
    /// Significance test: welch|student
    #[arg(long, default_value = "welch")]
    t_test: String,
    /// Also emit SVG renderings (correlation heatmap, time histogram)
    #[arg(long)]
    svg: bool,
}

#[derive(Args, Debug)]
struct NgramsArgs {
    #[command(flatten)]
    common: CorpusArgs,
    /// N-gram order
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Minimum number of distinct focal responses containing the n-gram
    #[arg(long, default_value_t = 7)]
    min_docs: usize,
    /// Focal response group: inc|dec
    #[arg(long, default_value = "inc")]
    focus: String,
}

#[derive(Args, Debug, Default)]
struct FeatureBuildArgs {
    #[command(flatten)]
    common: CorpusArgs,
    /// Embedding table path (enables the `sim` feature)
    #[arg(long)]
    embeddings: Option<PathBuf>,
    /// Precomputed sentence-score CSV for spec/plt/cvc
    #[arg(long)]
    scores: Option<PathBuf>,
    /// Subset: full|brd
    #[arg(long)]
    subset: Option<String>,
    /// Skip sentences with fewer tokens when scoring
    #[arg(long, default_value_t = 0)]
    min_sentence_tokens: usize,
    /// Review sections entering `sim`: comma list of pos,neg,questions,other
    #[arg(long)]
    sim_sections: Option<String>,
    /// Do not lowercase tokens before embedding lookup
    #[arg(long)]
    no_lowercase: bool,
    /// Include the aspect scores as extra features
    #[arg(long)]
    include_aspects: bool,
}

#[derive(Args, Debug)]
struct FeaturesArgs {
    #[command(flatten)]
    build: FeatureBuildArgs,
}

#[derive(Args, Debug)]
struct SelectArgs {
    #[command(flatten)]
    build: FeatureBuildArgs,
    /// Feature groups to consider (comma list)
    #[arg(long)]
    features: Option<String>,
    /// Equal-frequency bins for information gain
    #[arg(long, default_value_t = 10)]
    bins: usize,
    /// Absolute-correlation pruning threshold
    #[arg(long, default_value_t = 0.5)]
    corr_threshold: f64,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[command(flatten)]
    build: FeatureBuildArgs,
    #[arg(long)]
    features: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1e-3)]
    l2: f64,
    #[arg(long, default_value_t = 500)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 10)]
    bins: usize,
    #[arg(long, default_value_t = 0.5)]
    corr_threshold: f64,
    /// Train on all features (skip selection)
    #[arg(long)]
    no_selection: bool,
    /// Keep the KEEP class at its natural frequency
    #[arg(long)]
    no_downsample: bool,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    #[command(flatten)]
    build: FeatureBuildArgs,
    /// Feature groups, e.g. score or score,log_leng,sim,spec,plt,cvc
    #[arg(long)]
    features: Option<String>,
    #[arg(long)]
    folds: Option<usize>,
    #[arg(long)]
    repeats: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 1 forces serial execution
    #[arg(long)]
    jobs: Option<usize>,
    /// Report format: csv|json|markdown
    #[arg(long)]
    format: Option<String>,
    #[arg(long, default_value_t = 1e-3)]
    l2: f64,
    #[arg(long, default_value_t = 500)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 10)]
    bins: usize,
    #[arg(long, default_value_t = 0.5)]
    corr_threshold: f64,
    #[arg(long)]
    no_selection: bool,
    #[arg(long)]
    no_downsample: bool,
    /// Stratify the per-repeat shuffle by class
    #[arg(long)]
    stratified: bool,
    /// Also run and print the baselines for comparison
    #[arg(long)]
    with_baselines: bool,
}

#[derive(Args, Debug)]
struct BaselineArgs {
    #[command(flatten)]
    build: FeatureBuildArgs,
    /// Baseline kind: majority|random
    #[arg(long, default_value = "majority")]
    kind: String,
    #[arg(long)]
    repeats: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    papers: usize,
    #[arg(long, default_value_t = 3)]
    reviews_per_paper: usize,
    #[arg(long, default_value_t = 3.5)]
    score_mean: f64,
    #[arg(long, default_value_t = 1.1)]
    score_std: f64,
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    #[arg(long, default_value_t = 0.3)]
    beta: f64,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// Evaluation report JSON files to merge
    #[arg(long, value_delimiter = ',', required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
}

enum CliError {
    Usage(String),
    Data(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Data(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// `key=value` lines, `#` comments. Flags take precedence over entries.
#[derive(Debug, Default)]
struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(ConfigFile::default());
        };
        let contents = fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config file {}: {e}", path.display())))?;
        let mut entries = BTreeMap::new();
        for (i, line) in contents.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(usage(format!("config line {}: expected key=value", i + 1)));
            };
            entries.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(ConfigFile { entries })
    }

    fn resolve<T: FromStr>(&self, flag: Option<T>, key: &str) -> CliResult<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.entries.get(key) {
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|_| usage(format!("config key `{key}`: bad value `{raw}`"))),
            None => Ok(None),
        }
    }
}

/// Records the effective configuration for output metadata.
#[derive(Debug, Default)]
struct Effective {
    map: BTreeMap<String, String>,
}

impl Effective {
    fn set(&mut self, key: &str, value: impl ToString) {
        self.map.insert(key.to_string(), value.to_string());
    }

    fn stamp(&self, metadata: &mut RunMetadata) {
        metadata.config = self.map.clone();
        metadata.config_hash = config_hash(&self.map);
    }
}

fn out_dir(flag: Option<PathBuf>, cfg: &ConfigFile) -> CliResult<PathBuf> {
    let dir = match cfg.resolve(flag, "out")? {
        Some(d) => d,
        None => std::env::var(OUT_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|_| PathBuf::from(".")),
    };
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    Ok(dir)
}

fn load_corpus(flag: Option<PathBuf>, cfg: &ConfigFile, eff: &mut Effective) -> CliResult<Corpus> {
    let path = cfg
        .resolve(flag, "corpus")?
        .ok_or_else(|| usage("--corpus is required"))?;
    eff.set("corpus", path.display());
    Ok(ingest_corpus(&path, Format::Jsonl)?)
}

fn parse_subset(cfg: &ConfigFile, flag: Option<String>, eff: &mut Effective) -> CliResult<Subset> {
    let raw = cfg
        .resolve(flag, "subset")?
        .unwrap_or_else(|| "full".to_string());
    let subset: Subset = raw.parse().map_err(|e: Error| usage(e.to_string()))?;
    eff.set("subset", subset.name());
    Ok(subset)
}

fn parse_groups(
    cfg: &ConfigFile,
    flag: Option<String>,
    eff: &mut Effective,
) -> CliResult<Vec<FeatureGroup>> {
    let raw = cfg
        .resolve(flag, "features")?
        .unwrap_or_else(|| "score,log_leng,sim,spec,plt,cvc".to_string());
    let mut groups = Vec::new();
    for part in raw.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let group: FeatureGroup = part.parse().map_err(|e: Error| usage(e.to_string()))?;
        if !groups.contains(&group) {
            groups.push(group);
        }
    }
    if groups.is_empty() {
        return Err(usage("--features must name at least one feature group"));
    }
    eff.set(
        "features",
        groups
            .iter()
            .map(|g| g.name())
            .collect::<Vec<_>>()
            .join(","),
    );
    Ok(groups)
}

fn parse_sections(raw: &str) -> CliResult<crate::corpus::SectionMask> {
    let mut mask = crate::corpus::SectionMask {
        pos_args: false,
        neg_args: false,
        questions: false,
        other_text: false,
    };
    for part in raw.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match part {
            "pos" | "pos_args" => mask.pos_args = true,
            "neg" | "neg_args" => mask.neg_args = true,
            "questions" => mask.questions = true,
            "other" | "other_text" => mask.other_text = true,
            other => return Err(usage(format!("unknown section `{other}`"))),
        }
    }
    Ok(mask)
}

fn build_dataset(
    args: &FeatureBuildArgs,
    cfg: &ConfigFile,
    eff: &mut Effective,
) -> CliResult<Dataset> {
    let corpus = load_corpus(args.common.corpus.clone(), cfg, eff)?;
    let subset = parse_subset(cfg, args.subset.clone(), eff)?;

    let store = match cfg.resolve(args.embeddings.clone(), "embeddings")? {
        Some(path) => {
            eff.set("embeddings", path.display());
            Some(EmbeddingStore::load(&path)?.with_lowercase(!args.no_lowercase))
        }
        None => None,
    };

    let mut bindings = ScorerBindings::default().with_min_sentence_tokens(args.min_sentence_tokens);
    if args.min_sentence_tokens > 0 {
        eff.set("min_sentence_tokens", args.min_sentence_tokens);
    }
    if let Some(path) = cfg.resolve(args.scores.clone(), "scores")? {
        eff.set("scores", path.display());
        let precomputed = PrecomputedScores::load(&path)?;
        for kind in ScorerKind::ALL {
            bindings = bindings.with_precomputed(kind, precomputed.clone());
        }
    }

    let mut feature_config = FeatureConfig {
        include_aspects: args.include_aspects,
        ..Default::default()
    };
    if let Some(raw) = &args.sim_sections {
        feature_config.sim_sections = parse_sections(raw)?;
        eff.set("sim_sections", raw);
    }
    if args.include_aspects {
        eff.set("include_aspects", "true");
    }

    Ok(assemble(
        &corpus,
        subset,
        store.as_ref(),
        &bindings,
        &feature_config,
    )?)
}

fn groups_label(groups: &[FeatureGroup]) -> String {
    if groups.contains(&FeatureGroup::Score) && groups.len() == FeatureGroup::ALL.len() {
        "All".to_string()
    } else if groups == [FeatureGroup::Score] {
        "Score".to_string()
    } else {
        groups
            .iter()
            .map(|g| g.name())
            .collect::<Vec<_>>()
            .join("+")
    }
}

fn write_out(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Run manifest written next to plain-table outputs, so every artifact
/// carries the toolkit version and the effective configuration.
fn write_meta(dir: &Path, command: &str, eff: &Effective) -> CliResult<()> {
    let manifest = serde_json::json!({
        "command": command,
        "toolkit_version": env!("CARGO_PKG_VERSION"),
        "config": eff.map,
        "config_hash": config_hash(&eff.map),
    });
    write_out(
        &dir.join(format!("{command}_meta.json")),
        &serde_json::to_string_pretty(&manifest).expect("serializable"),
    )
}

fn counts_line(dataset: &Dataset) -> String {
    let c = dataset.class_counts();
    format!(
        "{} instances (INC {}, DEC {}, KEEP {}) from {} submissions",
        dataset.n_rows(),
        c[0],
        c[1],
        c[2],
        dataset.n_submissions()
    )
}

fn cmd_ingest(args: IngestArgs) -> CliResult<()> {
    let cfg = ConfigFile::load(args.common.config.as_deref())?;
    let mut eff = Effective::default();
    let corpus = load_corpus(args.common.corpus.clone(), &cfg, &mut eff)?;
    let reviews: usize = corpus.submissions.iter().map(|s| s.reviews.len()).sum();
    let before: usize = corpus.labeled_reviews().count();
    let responses: usize = corpus.submissions.iter().map(|s| s.responses.len()).sum();
    if args.normalize {
        let dir = out_dir(args.common.out.clone(), &cfg)?;
        let path = dir.join("corpus.jsonl");
        write_jsonl(&corpus, &path)?;
        println!(
            "ingest: {} submissions, {reviews} reviews ({before} with before-scores), {responses} responses -> {}",
            corpus.len(),
            path.display()
        );
    } else {
        println!(
            "ingest: {} submissions, {reviews} reviews ({before} with before-scores), {responses} responses",
            corpus.len()
        );
    }
    Ok(())
}

fn cmd_validate(args: CorpusArgs) -> CliResult<()> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let mut eff = Effective::default();
    let corpus = load_corpus(args.corpus.clone(), &cfg, &mut eff)?;
    let violations = validate(&corpus);
    for v in &violations {
        println!("{v}");
    }
    println!(
        "validate: {} violations in {} submissions",
        violations.len(),
        corpus.len()
    );
    Ok(())
}

fn cmd_stats(args: StatsArgs) -> CliResult<()> {
    let cfg = ConfigFile::load(args.common.config.as_deref())?;
    let mut eff = Effective::default();
    let corpus = load_corpus(args.common.corpus.clone(), &cfg, &mut eff)?;
    let dir = out_dir(args.common.out.clone(), &cfg)?;

    let which = match args.which.as_str() {
        "before" => Which::Before,
        "after" => Which::After,
        other => return Err(usage(format!("unknown --which `{other}`"))),
    };
    let t_kind = match args.t_test.as_str() {
        "welch" => TTestKind::Welch,
        "student" => TTestKind::Student,
        other => return Err(usage(format!("unknown --t-test `{other}`"))),
    };

    eff.set("which", &args.which);
    eff.set("bucket_hours", args.bucket_hours);
    eff.set("t_test", &args.t_test);

    let matrix = correlation_matrix(&corpus, which);
    write_out(
        &dir.join(format!("correlation_{}.csv", args.which)),
        &matrix.to_csv(),
    )?;

    let components = component_stats(&corpus);
    write_out(&dir.join("components.csv"), &components.to_csv())?;
    write_out(&dir.join("components.md"), &components.to_markdown())?;

    let updates = tabulate_updates(&corpus);
    write_out(&dir.join("updates.csv"), &updates.to_csv())?;
    write_out(&dir.join("updates.md"), &updates.to_markdown())?;

    let times = time_summary(&corpus, (args.bucket_hours * 3600.0) as i64, t_kind);
    write_out(
        &dir.join("time_summary.json"),
        &serde_json::to_string_pretty(&times).expect("serializable"),
    )?;

    if args.svg {
        write_out(
            &dir.join(format!("correlation_{}.svg", args.which)),
            &crate::stats::correlation_heatmap_svg(&matrix),
        )?;
        write_out(
            &dir.join("time_histogram.svg"),
            &crate::stats::time_histogram_svg(&times),
        )?;
    }

    write_meta(&dir, "stats", &eff)?;
    let time_note = match (&times.inc_dec_test, &times.not_computable) {
        (Some(t), _) => format!("INC-vs-DEC p = {:.4}", t.p_two_tailed),
        (None, Some(reason)) => format!("time test not computable ({reason})"),
        _ => "no timestamps".to_string(),
    };
    println!(
        "stats: {} submissions; correlation({}), components, updates written to {}; {}",
        corpus.len(),
        args.which,
        dir.display(),
        time_note
    );
    Ok(())
}

fn cmd_ngrams(args: NgramsArgs) -> CliResult<()> {
    let cfg = ConfigFile::load(args.common.config.as_deref())?;
    let mut eff = Effective::default();
    let corpus = load_corpus(args.common.corpus.clone(), &cfg, &mut eff)?;
    let dir = out_dir(args.common.out.clone(), &cfg)?;

    // responses aligned to INC vs DEC reviews, tokenized with EOS markers
    let splitter = SentenceSplitter::default();
    let mut inc_docs = Vec::new();
    let mut dec_docs = Vec::new();
    for submission in &corpus.submissions {
        for review in submission.labeled_reviews() {
            let Some(response) = submission.aligned_response(&review.review_id) else {
                continue;
            };
            let tokens = tokenize_with_eos(&response.text, &splitter);
            match crate::corpus::derive_label(review)? {
                crate::corpus::UpdateLabel::Inc => inc_docs.push(tokens),
                crate::corpus::UpdateLabel::Dec => dec_docs.push(tokens),
                crate::corpus::UpdateLabel::Keep => {}
            }
        }
    }
    let (docs_a, docs_b) = match args.focus.as_str() {
        "inc" => (&inc_docs, &dec_docs),
        "dec" => (&dec_docs, &inc_docs),
        other => return Err(usage(format!("unknown --focus `{other}` (inc|dec)"))),
    };
    eff.set("n", args.n);
    eff.set("min_docs", args.min_docs);
    eff.set("focus", &args.focus);
    let ranking = llr_rank(docs_a, docs_b, args.n, args.min_docs)?;
    let path = dir.join(format!("ngrams_{}_{}.csv", args.focus, args.n));
    write_out(&path, &ranking.to_csv())?;
    write_meta(&dir, "ngrams", &eff)?;
    for entry in ranking.entries.iter().take(10) {
        println!("{entry}");
    }
    println!(
        "ngrams: {} {}-grams over {} focal / {} contrast responses -> {}",
        ranking.entries.len(),
        args.n,
        docs_a.len(),
        docs_b.len(),
        path.display()
    );
    Ok(())
}

fn cmd_features(args: FeaturesArgs) -> CliResult<()> {
    let cfg = ConfigFile::load(args.build.common.config.as_deref())?;
    let mut eff = Effective::default();
    let dataset = build_dataset(&args.build, &cfg, &mut eff)?;
    let dir = out_dir(args.build.common.out.clone(), &cfg)?;
    let subset = dataset.subset.expect("assembled with subset").name();

    let csv_path = dir.join(format!("dataset_{subset}.csv"));
    write_out(&csv_path, &dataset.to_csv())?;

    // sidecar with imputation means and whole-data standardization
    let standardization = crate::classifier::Standardization::fit(&dataset.rows);
    let sidecar = serde_json::json!({
        "toolkit_version": env!("CARGO_PKG_VERSION"),
        "feature_names": dataset.feature_names,
        "subset": subset,
        "n_rows": dataset.n_rows(),
        "n_submissions": dataset.n_submissions(),
        "class_counts": dataset.class_counts(),
        "imputation": dataset.imputation,
        "standardization": standardization,
        "config": eff.map,
        "config_hash": config_hash(&eff.map),
    });
    write_out(
        &dir.join(format!("dataset_{subset}.meta.json")),
        &serde_json::to_string_pretty(&sidecar).expect("serializable"),
    )?;
    println!(
        "features: {} -> {}",
        counts_line(&dataset),
        csv_path.display()
    );
    Ok(())
}

fn cmd_select(args: SelectArgs) -> CliResult<()> {
    let cfg = ConfigFile::load(args.build.common.config.as_deref())?;
    let mut eff = Effective::default();
    let groups = parse_groups(&cfg, args.features.clone(), &mut eff)?;
    let dataset = build_dataset(&args.build, &cfg, &mut eff)?.restrict_to_groups(&groups);
    let dir = out_dir(args.build.common.out.clone(), &cfg)?;

    let selection_config = SelectionConfig {
        corr_threshold: args.corr_threshold,
        bins: args.bins,
        ..Default::default()
    };
    eff.set("bins", args.bins);
    eff.set("corr_threshold", args.corr_threshold);
    let report = select_features(&dataset, &selection_config);
    let subset = dataset.subset.expect("assembled with subset").name();
    let path = dir.join(format!("selection_{subset}.json"));
    let wrapped = serde_json::json!({
        "selection": report,
        "toolkit_version": env!("CARGO_PKG_VERSION"),
        "config": eff.map,
        "config_hash": config_hash(&eff.map),
    });
    write_out(
        &path,
        &serde_json::to_string_pretty(&wrapped).expect("serializable"),
    )?;
    println!(
        "select: kept {}/{} features on {subset}: {} -> {}",
        report.kept.len(),
        dataset.n_features(),
        report.kept.join(", "),
        path.display()
    );
    Ok(())
}

fn train_config(l2: f64, max_iter: usize, tol: f64, seed: u64) -> TrainConfig {
    TrainConfig {
        l2_strength: l2,
        max_iterations: max_iter,
        tolerance: tol,
        seed,
    }
}

fn cmd_train(args: TrainArgs) -> CliResult<()> {
    let cfg = ConfigFile::load(args.build.common.config.as_deref())?;
    let mut eff = Effective::default();
    let seed = cfg
        .resolve(args.seed, "seed")?
        .ok_or_else(|| usage("--seed is required (downsampling is stochastic)"))?;
    eff.set("seed", seed);
    let groups = parse_groups(&cfg, args.features.clone(), &mut eff)?;
    let dataset = build_dataset(&args.build, &cfg, &mut eff)?.restrict_to_groups(&groups);
    let dir = out_dir(args.build.common.out.clone(), &cfg)?;

    let pipeline = SoftmaxPipeline::new(PipelineConfig {
        train: train_config(args.l2, args.max_iter, args.tol, seed),
        selection: (!args.no_selection).then(|| SelectionConfig {
            corr_threshold: args.corr_threshold,
            bins: args.bins,
            ..Default::default()
        }),
        downsample: !args.no_downsample,
    });
    eff.set("l2", args.l2);
    eff.set("selection", !args.no_selection);
    eff.set("downsample", !args.no_downsample);

    use crate::evaluation::FoldPipeline as _;
    let fitted = pipeline.fit(&dataset, seed)?;
    let subset = dataset.subset.expect("assembled with subset").name();

    let model_path = dir.join(format!("model_{subset}.json"));
    let model_json = serde_json::json!({
        "toolkit_version": env!("CARGO_PKG_VERSION"),
        "model": fitted.model,
        "selection": fitted.selection,
        "imputation_means": fitted.imputer.means,
        "config": eff.map,
        "config_hash": config_hash(&eff.map),
    });
    write_out(
        &model_path,
        &serde_json::to_string_pretty(&model_json).expect("serializable"),
    )?;

    let weights = inspect_weights(&fitted.model);
    write_out(
        &dir.join(format!("weights_{subset}.md")),
        &weights_markdown(&weights),
    )?;
    println!(
        "train: {} on {}; loss {:.6} after {} iterations; top feature {} -> {}",
        groups_label(&groups),
        counts_line(&dataset),
        fitted.model.train_loss,
        fitted.model.iterations,
        weights.first().map(|w| w.feature.as_str()).unwrap_or("-"),
        model_path.display()
    );
    Ok(())
}

fn cmd_evaluate(args: EvaluateArgs) -> CliResult<()> {
    let cfg = ConfigFile::load(args.build.common.config.as_deref())?;
    let mut eff = Effective::default();
    let seed = cfg
        .resolve(args.seed, "seed")?
        .ok_or_else(|| usage("--seed is required (shuffling is stochastic)"))?;
    let folds = cfg.resolve(args.folds, "folds")?.unwrap_or(10);
    let repeats = cfg.resolve(args.repeats, "repeats")?.unwrap_or(50);
    let jobs = cfg.resolve(args.jobs, "jobs")?.unwrap_or(0);
    let format: ReportFormat = cfg
        .resolve(args.format.clone(), "format")?
        .unwrap_or_else(|| "json".to_string())
        .parse()
        .map_err(|e: Error| usage(e.to_string()))?;
    eff.set("seed", seed);
    eff.set("folds", folds);
    eff.set("repeats", repeats);

    let groups = parse_groups(&cfg, args.features.clone(), &mut eff)?;
    let dataset = build_dataset(&args.build, &cfg, &mut eff)?.restrict_to_groups(&groups);
    let dir = out_dir(args.build.common.out.clone(), &cfg)?;

    eff.set("l2", args.l2);
    eff.set("selection", !args.no_selection);
    eff.set("downsample", !args.no_downsample);
    if args.stratified {
        eff.set("stratified", "true");
    }

    let pipeline = SoftmaxPipeline::new(PipelineConfig {
        train: train_config(args.l2, args.max_iter, args.tol, seed),
        selection: (!args.no_selection).then(|| SelectionConfig {
            corr_threshold: args.corr_threshold,
            bins: args.bins,
            ..Default::default()
        }),
        downsample: !args.no_downsample,
    });
    let opts = CvOptions {
        folds,
        repeats,
        master_seed: seed,
        repeat_offset: 0,
        stratified: args.stratified,
        jobs,
    };
    let mut report = cross_validate(&dataset, &pipeline, &opts)?;
    report.metadata.run_label = groups_label(&groups);
    report.metadata.feature_groups = groups.iter().map(|g| g.name().to_string()).collect();
    eff.stamp(&mut report.metadata);

    let subset = dataset.subset.expect("assembled with subset").name();
    let path = dir.join(format!(
        "eval_{}_{subset}.{}",
        report.metadata.run_label.to_lowercase().replace('+', "-"),
        format.extension()
    ));
    emit_report(&report, &path, format)?;
    println!(
        "evaluate: {} on {subset} ({}): macro-F1 {:.3} over {repeats}x{folds}-fold -> {}",
        report.metadata.run_label,
        counts_line(&dataset),
        report.macro_f1,
        path.display()
    );

    if args.with_baselines {
        let majority = majority_baseline(&dataset.labels, repeats);
        let random = random_baseline(&dataset.labels, seed, repeats);
        let (_, p_major) = compare_runs(&report, &majority).map_err(CliError::Data)?;
        let (_, p_rand) = compare_runs(&report, &random).map_err(CliError::Data)?;
        println!(
            "baselines: majority macro-F1 {:.3} (p = {:.2e}), random macro-F1 {:.3} (p = {:.2e})",
            majority.macro_f1, p_major, random.macro_f1, p_rand
        );
    }
    Ok(())
}

fn cmd_baseline(args: BaselineArgs) -> CliResult<()> {
    let cfg = ConfigFile::load(args.build.common.config.as_deref())?;
    let mut eff = Effective::default();
    let dataset = build_dataset(&args.build, &cfg, &mut eff)?;
    let dir = out_dir(args.build.common.out.clone(), &cfg)?;
    let repeats = cfg.resolve(args.repeats, "repeats")?.unwrap_or(5000);
    let format: ReportFormat = cfg
        .resolve(args.format.clone(), "format")?
        .unwrap_or_else(|| "json".to_string())
        .parse()
        .map_err(|e: Error| usage(e.to_string()))?;

    let mut report = match args.kind.as_str() {
        "majority" => majority_baseline(&dataset.labels, 1),
        "random" => {
            let seed = cfg
                .resolve(args.seed, "seed")?
                .ok_or_else(|| usage("--seed is required for the random baseline"))?;
            eff.set("seed", seed);
            random_baseline(&dataset.labels, seed, repeats)
        }
        other => return Err(usage(format!("unknown --kind `{other}` (majority|random)"))),
    };
    eff.set("kind", &args.kind);
    eff.set("repeats", report.metadata.repeats);
    report.metadata.subset = dataset.subset.map(|s| s.name().to_string());
    eff.stamp(&mut report.metadata);

    let subset = dataset.subset.expect("assembled with subset").name();
    let path = dir.join(format!(
        "baseline_{}_{subset}.{}",
        args.kind,
        format.extension()
    ));
    emit_report(&report, &path, format)?;
    println!(
        "baseline: {} on {subset} ({}): macro-F1 {:.3} -> {}",
        args.kind,
        counts_line(&dataset),
        report.macro_f1,
        path.display()
    );
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> CliResult<()> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let seed = cfg
        .resolve(args.seed, "seed")?
        .ok_or_else(|| usage("--seed is required (generation is stochastic)"))?;
    let dir = out_dir(args.out.clone(), &cfg)?;
    let config = SynthConfig {
        papers: args.papers,
        reviews_per_paper: args.reviews_per_paper,
        score_mean: args.score_mean,
        score_std: args.score_std,
        gamma: args.gamma,
        beta: args.beta,
        seed,
    };
    let corpus = generate_synthetic_corpus(&config);
    let path = dir.join("synth_corpus.jsonl");
    write_jsonl(&corpus, &path)?;
    let mut eff = Effective::default();
    eff.set("papers", args.papers);
    eff.set("reviews_per_paper", args.reviews_per_paper);
    eff.set("score_mean", args.score_mean);
    eff.set("score_std", args.score_std);
    eff.set("gamma", args.gamma);
    eff.set("beta", args.beta);
    eff.set("seed", seed);
    write_meta(&dir, "synth", &eff)?;
    let table = tabulate_updates(&corpus);
    println!(
        "synth: {} papers (gamma {}, beta {}, seed {seed}); labels INC {} / DEC {} / KEEP {} -> {}",
        corpus.len(),
        args.gamma,
        args.beta,
        table.row("INC").reviews,
        table.row("DEC").reviews,
        table.row("KEEP").reviews,
        path.display()
    );
    Ok(())
}

fn cmd_report(args: ReportArgs) -> CliResult<()> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let format: ReportFormat = cfg
        .resolve(args.format.clone(), "format")?
        .unwrap_or_else(|| "markdown".to_string())
        .parse()
        .map_err(|e: Error| usage(e.to_string()))?;
    let dir = out_dir(args.out.clone(), &cfg)?;

    let mut reports: Vec<EvaluationReport> = Vec::new();
    for path in &args.inputs {
        let contents = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let report: EvaluationReport = serde_json::from_str(&contents).map_err(|e| {
            Error::InvalidInput(format!(
                "{} is not an evaluation report: {e}",
                path.display()
            ))
        })?;
        reports.push(report);
    }
    if reports.is_empty() {
        return Err(usage("--inputs must name at least one report"));
    }
    let (contents, name) = match format {
        ReportFormat::Markdown => (combined_markdown(&reports), "report.md"),
        ReportFormat::Csv => (combined_csv(&reports), "report.csv"),
        ReportFormat::Json => (
            serde_json::to_string_pretty(&reports).expect("serializable"),
            "report.json",
        ),
    };
    let path = dir.join(name);
    write_out(&path, &contents)?;
    println!(
        "report: merged {} runs -> {}",
        reports.len(),
        path.display()
    );
    Ok(())
}

fn execute(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Ingest(args) => cmd_ingest(args),
        Command::Validate(args) => cmd_validate(args),
        Command::Stats(args) => cmd_stats(args),
        Command::Ngrams(args) => cmd_ngrams(args),
        Command::Features(args) => cmd_features(args),
        Command::Select(args) => cmd_select(args),
        Command::Train(args) => cmd_train(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Baseline(args) => cmd_baseline(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Report(args) => cmd_report(args),
    }
}

/// Parse argv and run; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            eprint!("{e}");
            return 1;
        }
        Err(e) => {
            // --help / --version
            print!("{e}");
            return 0;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            1
        }
        Err(CliError::Data(e)) => {
            eprintln!("error: {e}");
            2
        }
    }
}
