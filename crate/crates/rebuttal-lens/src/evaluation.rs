//! Repeated k-fold cross-validation, classification metrics, baselines and
//! run comparison.
//!
//! Per repeat, rows are shuffled with a repeat-derived seed and split into
//! contiguous folds; every training artifact (imputation means,
//! standardization, feature selection, downsampling, weights) is fitted on
//! the train portion only. Predictions from all folds of a repeat are
//! pooled into one confusion matrix, and metrics are averaged over repeats.
//! Per-repeat seeds come from a counter scheme: the shuffle RNG uses stream
//! `2 * repeat` and fold seeds come from stream `2 * repeat + 1` of a
//! ChaCha8 generator seeded with the master seed, so results are
//! independent of how repeats are scheduled across threads.

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{downsample_keep, SoftmaxModel, Standardization, TrainConfig};
use crate::corpus::UpdateLabel;
use crate::error::{Error, Result};
use crate::features::Dataset;
use crate::selection::{select_features, SelectionConfig, SelectionReport};
use crate::special::student_t_two_tailed;
use crate::stats::mean;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MetricsSummary {
    /// INC, DEC, KEEP order.
    pub per_class: [ClassMetrics; 3],
    pub macro_f1: f64,
}

/// Per-class precision/recall/F1 with the 0/0 := 0 convention, and the
/// unweighted macro-F1 over the three classes.
pub fn confusion_metrics(predictions: &[UpdateLabel], labels: &[UpdateLabel]) -> MetricsSummary {
    assert_eq!(predictions.len(), labels.len());
    let mut tp = [0usize; 3];
    let mut fp = [0usize; 3];
    let mut fnn = [0usize; 3];
    for (pred, label) in predictions.iter().zip(labels) {
        if pred == label {
            tp[label.index()] += 1;
        } else {
            fp[pred.index()] += 1;
            fnn[label.index()] += 1;
        }
    }
    let ratio = |num: usize, den: usize| {
        if den == 0 {
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    let mut per_class = [ClassMetrics {
        precision: 0.0,
        recall: 0.0,
        f1: 0.0,
    }; 3];
    for c in 0..3 {
        let precision = ratio(tp[c], tp[c] + fp[c]);
        let recall = ratio(tp[c], tp[c] + fnn[c]);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        per_class[c] = ClassMetrics {
            precision,
            recall,
            f1,
        };
    }
    MetricsSummary {
        per_class,
        macro_f1: per_class.iter().map(|m| m.f1).sum::<f64>() / 3.0,
    }
}

/// Everything recorded about an evaluation run; enough to re-run it.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RunMetadata {
    pub toolkit_version: String,
    /// Row label in combined tables (a feature-set name or baseline name).
    pub run_label: String,
    pub subset: Option<String>,
    pub feature_groups: Vec<String>,
    pub folds: usize,
    pub repeats: usize,
    pub master_seed: Option<u64>,
    pub config_hash: String,
    pub config: std::collections::BTreeMap<String, String>,
}

impl RunMetadata {
    pub fn new(run_label: &str) -> Self {
        RunMetadata {
            toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
            run_label: run_label.to_string(),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvaluationReport {
    /// Means over repeats, INC, DEC, KEEP order.
    pub per_class: [ClassMetrics; 3],
    pub macro_f1: f64,
    pub per_repeat_macro_f1: Vec<f64>,
    pub metadata: RunMetadata,
}

impl EvaluationReport {
    fn from_repeats(summaries: &[MetricsSummary], metadata: RunMetadata) -> Self {
        let n = summaries.len() as f64;
        let mut per_class = [ClassMetrics {
            precision: 0.0,
            recall: 0.0,
            f1: 0.0,
        }; 3];
        for summary in summaries {
            for (acc, class) in per_class.iter_mut().zip(&summary.per_class) {
                acc.precision += class.precision / n;
                acc.recall += class.recall / n;
                acc.f1 += class.f1 / n;
            }
        }
        EvaluationReport {
            per_class,
            macro_f1: per_class.iter().map(|m| m.f1).sum::<f64>() / 3.0,
            per_repeat_macro_f1: summaries.iter().map(|s| s.macro_f1).collect(),
            metadata,
        }
    }
}

/// A learner that fits on a training slice only and predicts raw rows.
pub trait FoldPipeline: Sync {
    type Fitted: FoldPredictor;
    fn fit(&self, train: &Dataset, fold_seed: u64) -> Result<Self::Fitted>;
}

pub trait FoldPredictor {
    fn predict_row(&self, row: &[f64], missing: &[bool]) -> UpdateLabel;
}

/// Training-fold column means over originally-observed entries, used to
/// re-impute masked cells. Columns with no observed training value fall
/// back to 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Imputer {
    pub means: Vec<f64>,
}

impl Imputer {
    pub fn fit(train: &Dataset) -> Self {
        let d = train.n_features();
        let mut sums = vec![0.0; d];
        let mut counts = vec![0usize; d];
        for (row, miss) in train.rows.iter().zip(&train.missing) {
            for j in 0..d {
                if !miss[j] {
                    sums[j] += row[j];
                    counts[j] += 1;
                }
            }
        }
        let means = sums
            .into_iter()
            .zip(counts)
            .map(|(s, c)| if c == 0 { 0.0 } else { s / c as f64 })
            .collect();
        Imputer { means }
    }

    pub fn impute_row(&self, row: &[f64], missing: &[bool]) -> Vec<f64> {
        row.iter()
            .zip(missing)
            .zip(&self.means)
            .map(|((v, &m), mean)| if m { *mean } else { *v })
            .collect()
    }

    fn impute_dataset(&self, dataset: &Dataset) -> Dataset {
        let mut out = dataset.clone();
        for (row, miss) in out.rows.iter_mut().zip(&out.missing) {
            for j in 0..row.len() {
                if miss[j] {
                    row[j] = self.means[j];
                }
            }
        }
        out
    }
}

/// Configuration of the softmax pipeline fitted in each fold.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub train: TrainConfig,
    /// Feature selection; `None` trains on all columns.
    pub selection: Option<SelectionConfig>,
    pub downsample: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            train: TrainConfig::default(),
            selection: Some(SelectionConfig::default()),
            downsample: true,
        }
    }
}

pub struct SoftmaxPipeline {
    pub config: PipelineConfig,
}

impl SoftmaxPipeline {
    pub fn new(config: PipelineConfig) -> Self {
        SoftmaxPipeline { config }
    }
}

/// All artifacts fitted on one training fold. Serializable so leakage
/// tests can compare artifacts across runs byte for byte.
#[derive(Debug, Clone, Serialize)]
pub struct FittedFold {
    pub imputer: Imputer,
    pub selection: Option<SelectionReport>,
    /// Column indices (into the full feature list) the model consumes.
    pub kept_columns: Vec<usize>,
    /// Keys of the training rows that survived downsampling.
    pub downsampled_keys: Vec<crate::features::InstanceKey>,
    pub model: SoftmaxModel,
}

impl FoldPipeline for SoftmaxPipeline {
    type Fitted = FittedFold;

    fn fit(&self, train: &Dataset, fold_seed: u64) -> Result<FittedFold> {
        let imputer = Imputer::fit(train);
        let imputed = imputer.impute_dataset(train);

        let (selection, kept_columns) = match &self.config.selection {
            Some(cfg) => {
                let report = select_features(&imputed, cfg);
                let cols = report.kept_indices(&imputed.feature_names);
                (Some(report), cols)
            }
            None => (None, (0..imputed.n_features()).collect()),
        };
        let restricted = imputed.restrict_columns(&kept_columns);

        let counts = restricted.class_counts();
        let sampled = if self.config.downsample && counts.iter().all(|&c| c > 0) {
            downsample_keep(&restricted, fold_seed)
        } else {
            restricted
        };

        let standardization = Standardization::fit(&sampled.rows);
        let mut standardized = sampled.clone();
        standardized.rows = standardization.transform(&sampled.rows);
        let mut model = crate::classifier::train(&standardized, &self.config.train)?;
        model.standardization = Some(standardization);

        Ok(FittedFold {
            imputer,
            selection,
            kept_columns,
            downsampled_keys: sampled.keys.clone(),
            model,
        })
    }
}

impl FoldPredictor for FittedFold {
    fn predict_row(&self, row: &[f64], missing: &[bool]) -> UpdateLabel {
        let imputed = self.imputer.impute_row(row, missing);
        let projected: Vec<f64> = self.kept_columns.iter().map(|&j| imputed[j]).collect();
        self.model.predict_from_slice(&projected).0
    }
}

/// Constant-KEEP predictor, for reduction tests of the harness.
pub struct MajorityPipeline;

pub struct MajorityFold;

impl FoldPipeline for MajorityPipeline {
    type Fitted = MajorityFold;
    fn fit(&self, _train: &Dataset, _fold_seed: u64) -> Result<MajorityFold> {
        Ok(MajorityFold)
    }
}

impl FoldPredictor for MajorityFold {
    fn predict_row(&self, _row: &[f64], _missing: &[bool]) -> UpdateLabel {
        UpdateLabel::Keep
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CvOptions {
    pub folds: usize,
    pub repeats: usize,
    pub master_seed: u64,
    /// First repeat stream index; lets two runs cover disjoint repeats.
    pub repeat_offset: usize,
    /// Shuffle within each class and deal round-robin instead of the plain
    /// random shuffle.
    pub stratified: bool,
    /// Worker threads; 1 forces serial execution. Results are identical
    /// for any value.
    pub jobs: usize,
}

impl Default for CvOptions {
    fn default() -> Self {
        CvOptions {
            folds: 10,
            repeats: 50,
            master_seed: 0,
            repeat_offset: 0,
            stratified: false,
            jobs: 0,
        }
    }
}

fn shuffle_for_repeat(
    n: usize,
    labels: &[UpdateLabel],
    opts: &CvOptions,
    stream: u64,
) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.master_seed);
    rng.set_stream(2 * stream);
    if !opts.stratified {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        return order;
    }
    let mut per_class: [Vec<usize>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for (i, label) in labels.iter().enumerate() {
        per_class[label.index()].push(i);
    }
    for class in &mut per_class {
        class.shuffle(&mut rng);
    }
    // deal classes round-robin so folds stay balanced
    let mut order = Vec::with_capacity(n);
    let mut cursors = [0usize; 3];
    while order.len() < n {
        for c in 0..3 {
            if cursors[c] < per_class[c].len() {
                order.push(per_class[c][cursors[c]]);
                cursors[c] += 1;
            }
        }
    }
    order
}

fn fold_bounds(n: usize, folds: usize, k: usize) -> (usize, usize) {
    (k * n / folds, (k + 1) * n / folds)
}

fn run_one_repeat<P: FoldPipeline>(
    dataset: &Dataset,
    pipeline: &P,
    opts: &CvOptions,
    repeat_index: usize,
) -> Result<MetricsSummary> {
    let n = dataset.n_rows();
    let stream = (opts.repeat_offset + repeat_index) as u64;
    let order = shuffle_for_repeat(n, &dataset.labels, opts, stream);

    let mut seed_rng = ChaCha8Rng::seed_from_u64(opts.master_seed);
    seed_rng.set_stream(2 * stream + 1);
    let fold_seeds: Vec<u64> = (0..opts.folds).map(|_| seed_rng.next_u64()).collect();

    let mut predictions = vec![UpdateLabel::Keep; n];
    for (k, &fold_seed) in fold_seeds.iter().enumerate() {
        let (lo, hi) = fold_bounds(n, opts.folds, k);
        if lo == hi {
            return Err(Error::TooFewInstances(format!(
                "fold {k} of {} is empty with {n} instances",
                opts.folds
            )));
        }
        let test_idx = &order[lo..hi];
        let train_idx: Vec<usize> = order[..lo].iter().chain(&order[hi..]).copied().collect();
        let fitted = pipeline.fit(&dataset.gather(&train_idx), fold_seed)?;
        for &i in test_idx {
            predictions[i] = fitted.predict_row(&dataset.rows[i], &dataset.missing[i]);
        }
    }
    Ok(confusion_metrics(&predictions, &dataset.labels))
}

/// Repeated k-fold cross-validation of a pipeline over a dataset.
pub fn cross_validate<P: FoldPipeline>(
    dataset: &Dataset,
    pipeline: &P,
    opts: &CvOptions,
) -> Result<EvaluationReport> {
    if dataset.n_rows() < opts.folds {
        return Err(Error::TooFewInstances(format!(
            "{} instances cannot fill {} folds",
            dataset.n_rows(),
            opts.folds
        )));
    }
    if opts.repeats == 0 {
        return Err(Error::InvalidInput("repeats must be >= 1".to_string()));
    }
    let run = |i: usize| run_one_repeat(dataset, pipeline, opts, i);
    let summaries: Result<Vec<MetricsSummary>> = if opts.jobs == 1 {
        (0..opts.repeats).map(run).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs) // 0 = rayon default
            .build()
            .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
        pool.install(|| (0..opts.repeats).into_par_iter().map(run).collect())
    };
    let summaries = summaries?;

    let mut metadata = RunMetadata::new("cv");
    metadata.subset = dataset.subset.map(|s| s.name().to_string());
    metadata.folds = opts.folds;
    metadata.repeats = opts.repeats;
    metadata.master_seed = Some(opts.master_seed);
    Ok(EvaluationReport::from_repeats(&summaries, metadata))
}

/// Constant-KEEP baseline; the repeat count only sizes the per-repeat
/// vector (the metrics are deterministic given the label multiset).
pub fn majority_baseline(labels: &[UpdateLabel], repeats: usize) -> EvaluationReport {
    let predictions = vec![UpdateLabel::Keep; labels.len()];
    let summary = confusion_metrics(&predictions, labels);
    let mut metadata = RunMetadata::new("Majority Baseline");
    metadata.repeats = repeats.max(1);
    EvaluationReport::from_repeats(&vec![summary; repeats.max(1)], metadata)
}

/// Uniform-random predictions over the three classes, averaged over
/// seeded repeats.
pub fn random_baseline(labels: &[UpdateLabel], seed: u64, repeats: usize) -> EvaluationReport {
    let summaries: Vec<MetricsSummary> = (0..repeats.max(1))
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            let predictions: Vec<UpdateLabel> = labels
                .iter()
                .map(|_| UpdateLabel::from_index(rng.gen_range(0..3)))
                .collect();
            confusion_metrics(&predictions, labels)
        })
        .collect();
    let mut metadata = RunMetadata::new("Random Baseline");
    metadata.repeats = repeats.max(1);
    metadata.master_seed = Some(seed);
    EvaluationReport::from_repeats(&summaries, metadata)
}

/// Welch's two-tailed t-test over the per-repeat macro-F1 vectors of two
/// runs. Unlike the strict two-sample test, a single zero-variance side is
/// allowed; both sides constant is an error.
pub fn compare_runs(a: &EvaluationReport, b: &EvaluationReport) -> Result<(f64, f64)> {
    let xa = &a.per_repeat_macro_f1;
    let xb = &b.per_repeat_macro_f1;
    if xa.len() < 2 || xb.len() < 2 {
        return Err(Error::TooFewInstances(
            "need per-repeat vectors of length >= 2".to_string(),
        ));
    }
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (ma, mb) = (mean(xa), mean(xb));
    let const_a = xa.iter().all(|v| *v == xa[0]);
    let const_b = xb.iter().all(|v| *v == xb[0]);
    if const_a && const_b {
        if xa[0] == xb[0] {
            // identical constant runs: no evidence of difference
            return Ok((0.0, 1.0));
        }
        return Err(Error::InvalidInput(
            "zero variance in both runs".to_string(),
        ));
    }
    let va = if const_a {
        0.0
    } else {
        xa.iter().map(|x| (x - ma).powi(2)).sum::<f64>() / (na - 1.0)
    };
    let vb = if const_b {
        0.0
    } else {
        xb.iter().map(|x| (x - mb).powi(2)).sum::<f64>() / (nb - 1.0)
    };
    let se2 = va / na + vb / nb;
    let t = (ma - mb) / se2.sqrt();
    let df = se2.powi(2) / ((va / na).powi(2) / (na - 1.0) + (vb / nb).powi(2) / (nb - 1.0));
    Ok((t, student_t_two_tailed(t, df)))
}
