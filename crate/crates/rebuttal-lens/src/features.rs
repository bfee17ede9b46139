//! Per-instance feature vectors and the labeled dataset matrix.
//!
//! One instance is a labeled review with an aligned author response. Score
//! features are statistics of the before-rebuttal OVAL/CONF of the review
//! and its peers; text features are the response length, review–response
//! similarity and the sentence-score aggregates.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::Serialize;

use crate::corpus::{
    derive_label, select_subset, AuthorResponse, Corpus, Review, SectionMask, Subset, UpdateLabel,
};
use crate::embeddings::{review_response_similarity, EmbeddingStore};
use crate::error::{Error, Result};
use crate::scorers::{aggregate_scores, score_response, ScorerBindings, ScorerKind};
use crate::stats::{mean, median, population_std, sample_std};
use crate::text;

/// The score-feature names, in canonical order.
pub const SCORE_FEATURES: [&str; 26] = [
    "self_before",
    "self_conf",
    "oth_max",
    "oth_min",
    "oth_mean",
    "oth_median",
    "oth_std",
    "oth_conf_max",
    "oth_conf_min",
    "oth_conf_mean",
    "oth_conf_median",
    "oth_conf_std",
    "oth_mean-self",
    "oth_median-self",
    "oth_max-self",
    "self-oth_min",
    "all_max",
    "all_min",
    "all_mean",
    "all_median",
    "all_std",
    "self_before**2",
    "all_mean-self",
    "all_max-self",
    "all_median-self",
    "self-all_min",
];

const AGG_SUFFIXES: [&str; 5] = ["max", "min", "mean", "median", "std"];

pub fn text_feature_names() -> Vec<String> {
    let mut names = vec!["log_leng".to_string(), "sim".to_string()];
    for kind in ScorerKind::ALL {
        for suffix in AGG_SUFFIXES {
            names.push(format!("{}_{suffix}", kind.name()));
        }
    }
    names
}

/// Aspect-score features, available behind `FeatureConfig::include_aspects`.
pub const ASPECT_FEATURES: [&str; 5] = ["self_snd", "self_sbs", "self_org", "self_cmp", "self_rdb"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureGroup {
    Score,
    LogLeng,
    Sim,
    Spec,
    Plt,
    Cvc,
}

impl FeatureGroup {
    pub const ALL: [FeatureGroup; 6] = [
        FeatureGroup::Score,
        FeatureGroup::LogLeng,
        FeatureGroup::Sim,
        FeatureGroup::Spec,
        FeatureGroup::Plt,
        FeatureGroup::Cvc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FeatureGroup::Score => "score",
            FeatureGroup::LogLeng => "log_leng",
            FeatureGroup::Sim => "sim",
            FeatureGroup::Spec => "spec",
            FeatureGroup::Plt => "plt",
            FeatureGroup::Cvc => "cvc",
        }
    }
}

impl std::str::FromStr for FeatureGroup {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_lowercase().as_str() {
            "score" => Ok(FeatureGroup::Score),
            "log_leng" => Ok(FeatureGroup::LogLeng),
            "sim" => Ok(FeatureGroup::Sim),
            "spec" => Ok(FeatureGroup::Spec),
            "plt" => Ok(FeatureGroup::Plt),
            "cvc" => Ok(FeatureGroup::Cvc),
            other => Err(Error::InvalidInput(format!(
                "unknown feature group `{other}`"
            ))),
        }
    }
}

pub fn group_of(name: &str) -> FeatureGroup {
    if name == "log_leng" {
        FeatureGroup::LogLeng
    } else if name == "sim" {
        FeatureGroup::Sim
    } else if name.starts_with("spec_") {
        FeatureGroup::Spec
    } else if name.starts_with("plt_") {
        FeatureGroup::Plt
    } else if name.starts_with("cvc_") {
        FeatureGroup::Cvc
    } else {
        FeatureGroup::Score
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct InstanceKey {
    pub submission_id: String,
    pub review_id: String,
}

/// Named feature values for one (review, response, peers) instance.
/// Features that could not be computed appear in `missing` instead.
#[derive(Debug, Clone)]
pub struct FeatureVector {
    pub key: InstanceKey,
    pub label: UpdateLabel,
    pub values: BTreeMap<String, f64>,
    pub missing: BTreeSet<String>,
}

/// Extract the full feature vector for one labeled review with its aligned
/// response and peer reviews.
pub fn feature_vector(
    review: &Review,
    response: &AuthorResponse,
    peers: &[&Review],
    store: Option<&EmbeddingStore>,
    bindings: &ScorerBindings,
    config: &FeatureConfig,
) -> Result<FeatureVector> {
    let label = derive_label(review)?;
    let mut values = score_features(review, peers, config)?;
    let (texts, missing) = text_features(review, response, store, bindings, config)?;
    values.extend(texts);
    Ok(FeatureVector {
        key: InstanceKey {
            submission_id: review.submission_id.clone(),
            review_id: review.review_id.clone(),
        },
        label,
        values,
        missing,
    })
}

#[derive(Debug, Clone, Default)]
pub struct FeatureConfig {
    /// Re-enable the aspect scores as features (off by default).
    pub include_aspects: bool,
    /// Use the sample (n-1) std for oth_std/all_std instead of population.
    pub sample_std: bool,
    /// Which review sections enter the similarity feature.
    pub sim_sections: SectionMask,
}

fn five_stats(values: &[f64], sample: bool) -> (f64, f64, f64, f64, f64) {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let std = if sample {
        sample_std(values)
    } else {
        population_std(values)
    };
    (max, min, mean(values), median(values), std)
}

/// All 26 score features for a review given its peer reviews. Every review
/// involved must carry before-rebuttal scores and there must be at least
/// two peers.
pub fn score_features(
    review: &Review,
    peers: &[&Review],
    config: &FeatureConfig,
) -> Result<BTreeMap<String, f64>> {
    let before = review.before.as_ref().ok_or(Error::UnlabeledReview)?;
    if peers.len() < 2 {
        return Err(Error::IncompleteReviewSet(peers.len()));
    }
    let mut oth = Vec::with_capacity(peers.len());
    let mut oth_conf = Vec::with_capacity(peers.len());
    for peer in peers {
        let b = peer.before.as_ref().ok_or(Error::UnlabeledReview)?;
        oth.push(b.oval as f64);
        oth_conf.push(b.conf as f64);
    }
    let self_before = before.oval as f64;
    let mut all = oth.clone();
    all.push(self_before);

    let (o_max, o_min, o_mean, o_median, o_std) = five_stats(&oth, config.sample_std);
    let (c_max, c_min, c_mean, c_median, c_std) = five_stats(&oth_conf, config.sample_std);
    let (a_max, a_min, a_mean, a_median, a_std) = five_stats(&all, config.sample_std);

    let mut out = BTreeMap::new();
    let mut put = |name: &str, value: f64| {
        out.insert(name.to_string(), value);
    };
    put("self_before", self_before);
    put("self_conf", before.conf as f64);
    put("oth_max", o_max);
    put("oth_min", o_min);
    put("oth_mean", o_mean);
    put("oth_median", o_median);
    put("oth_std", o_std);
    put("oth_conf_max", c_max);
    put("oth_conf_min", c_min);
    put("oth_conf_mean", c_mean);
    put("oth_conf_median", c_median);
    put("oth_conf_std", c_std);
    put("oth_mean-self", o_mean - self_before);
    put("oth_median-self", o_median - self_before);
    put("oth_max-self", o_max - self_before);
    put("self-oth_min", self_before - o_min);
    put("all_max", a_max);
    put("all_min", a_min);
    put("all_mean", a_mean);
    put("all_median", a_median);
    put("all_std", a_std);
    put("self_before**2", self_before * self_before);
    put("all_mean-self", a_mean - self_before);
    put("all_max-self", a_max - self_before);
    put("all_median-self", a_median - self_before);
    put("self-all_min", self_before - a_min);
    if config.include_aspects {
        for (name, value) in [
            ("self_snd", before.snd),
            ("self_sbs", before.sbs),
            ("self_org", before.org),
            ("self_cmp", before.cmp),
            ("self_rdb", before.rdb),
        ] {
            if let Some(v) = value {
                put(name, v as f64);
            }
        }
    }
    Ok(out)
}

/// Text features for one (review, response) pair: log response length,
/// embedding similarity and the spec/plt/cvc aggregates. Features that
/// cannot be computed (e.g. all tokens out of vocabulary) are reported
/// in the missing set and imputed later.
pub fn text_features(
    review: &Review,
    response: &AuthorResponse,
    store: Option<&EmbeddingStore>,
    bindings: &ScorerBindings,
    config: &FeatureConfig,
) -> Result<(BTreeMap<String, f64>, BTreeSet<String>)> {
    let tokens = text::tokenize_words(&response.text);
    if tokens.is_empty() {
        return Err(Error::InvalidInput(format!(
            "response ({}, {}) has no tokens",
            response.submission_id,
            response.review_id.as_deref().unwrap_or("-")
        )));
    }
    let mut values = BTreeMap::new();
    let mut missing = BTreeSet::new();
    values.insert("log_leng".to_string(), (tokens.len() as f64).ln());

    match store.and_then(|s| review_response_similarity(review, response, s, config.sim_sections)) {
        Some(sim) => {
            values.insert("sim".to_string(), sim);
        }
        None => {
            missing.insert("sim".to_string());
        }
    }

    for kind in ScorerKind::ALL {
        let scores = score_response(response, bindings, kind)?;
        match aggregate_scores(&scores) {
            Ok(agg) => {
                values.insert(format!("{}_max", kind.name()), agg.max);
                values.insert(format!("{}_min", kind.name()), agg.min);
                values.insert(format!("{}_mean", kind.name()), agg.mean);
                values.insert(format!("{}_median", kind.name()), agg.median);
                values.insert(format!("{}_std", kind.name()), agg.std);
            }
            Err(_) => {
                // every sentence filtered out by the min-token setting
                for suffix in AGG_SUFFIXES {
                    missing.insert(format!("{}_{suffix}", kind.name()));
                }
            }
        }
    }
    Ok((values, missing))
}

/// Per-column imputation record in the dataset sidecar.
#[derive(Debug, Clone, Serialize)]
pub struct ImputationRecord {
    pub feature: String,
    pub mean: f64,
    pub imputed_rows: usize,
}

/// The labeled instance matrix. `missing` marks cells that were imputed at
/// assembly time; fold-wise pipelines re-impute them from training rows
/// only.
#[derive(Debug, Clone, Serialize)]
pub struct Dataset {
    pub feature_names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub missing: Vec<Vec<bool>>,
    pub labels: Vec<UpdateLabel>,
    pub keys: Vec<InstanceKey>,
    pub subset: Option<Subset>,
    pub imputation: Vec<ImputationRecord>,
}

impl Dataset {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn n_submissions(&self) -> usize {
        self.keys
            .iter()
            .map(|k| k.submission_id.as_str())
            .collect::<HashSet<_>>()
            .len()
    }

    /// Instance counts per class, in INC, DEC, KEEP order.
    pub fn class_counts(&self) -> [usize; 3] {
        let mut counts = [0usize; 3];
        for label in &self.labels {
            counts[label.index()] += 1;
        }
        counts
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    /// Rows at the given indices, in the given order.
    pub fn gather(&self, indices: &[usize]) -> Dataset {
        Dataset {
            feature_names: self.feature_names.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            missing: indices.iter().map(|&i| self.missing[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            keys: indices.iter().map(|&i| self.keys[i].clone()).collect(),
            subset: self.subset,
            imputation: Vec::new(),
        }
    }

    pub fn restrict_columns(&self, cols: &[usize]) -> Dataset {
        Dataset {
            feature_names: cols
                .iter()
                .map(|&j| self.feature_names[j].clone())
                .collect(),
            rows: self
                .rows
                .iter()
                .map(|r| cols.iter().map(|&j| r[j]).collect())
                .collect(),
            missing: self
                .missing
                .iter()
                .map(|m| cols.iter().map(|&j| m[j]).collect())
                .collect(),
            labels: self.labels.clone(),
            keys: self.keys.clone(),
            subset: self.subset,
            imputation: self
                .imputation
                .iter()
                .filter(|r| cols.iter().any(|&j| self.feature_names[j] == r.feature))
                .cloned()
                .collect(),
        }
    }

    pub fn restrict_to_groups(&self, groups: &[FeatureGroup]) -> Dataset {
        let cols: Vec<usize> = self
            .feature_names
            .iter()
            .enumerate()
            .filter(|(_, name)| groups.contains(&group_of(name)))
            .map(|(j, _)| j)
            .collect();
        self.restrict_columns(&cols)
    }

    /// CSV export: header of feature names plus `label`.
    pub fn to_csv(&self) -> String {
        let mut s = self.feature_names.join(",");
        s.push_str(",label\n");
        for (row, label) in self.rows.iter().zip(&self.labels) {
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    s.push(',');
                }
                s.push_str(&format!("{v}"));
            }
            s.push_str(&format!(",{label}\n"));
        }
        s
    }
}

/// Assemble the labeled dataset for a subset of the corpus: one row per
/// labeled review with an aligned response. Missing text features are
/// imputed by the column mean over the assembled data, with the mask
/// recorded for fold-wise re-imputation.
pub fn assemble(
    corpus: &Corpus,
    subset: Subset,
    store: Option<&EmbeddingStore>,
    bindings: &ScorerBindings,
    config: &FeatureConfig,
) -> Result<Dataset> {
    let selected = select_subset(corpus, subset);
    let mut feature_names: Vec<String> = SCORE_FEATURES.iter().map(|s| s.to_string()).collect();
    if config.include_aspects {
        feature_names.extend(ASPECT_FEATURES.iter().map(|s| s.to_string()));
    }
    feature_names.extend(text_feature_names());

    let mut rows = Vec::new();
    let mut missing_mask = Vec::new();
    let mut labels = Vec::new();
    let mut keys = Vec::new();

    for submission in &selected.submissions {
        for review in submission.labeled_reviews() {
            let Some(response) = submission.aligned_response(&review.review_id) else {
                continue;
            };
            let peers: Vec<&Review> = submission
                .reviews
                .iter()
                .filter(|r| r.review_id != review.review_id && r.before.is_some())
                .collect();
            let fv = feature_vector(review, response, &peers, store, bindings, config)?;

            let mut row = Vec::with_capacity(feature_names.len());
            let mut miss = Vec::with_capacity(feature_names.len());
            for name in &feature_names {
                if let Some(v) = fv.values.get(name) {
                    row.push(*v);
                    miss.push(false);
                } else {
                    debug_assert!(
                        fv.missing.contains(name) || ASPECT_FEATURES.contains(&name.as_str()),
                        "unexpected missing feature {name}"
                    );
                    row.push(f64::NAN);
                    miss.push(true);
                }
            }
            rows.push(row);
            missing_mask.push(miss);
            labels.push(fv.label);
            keys.push(fv.key);
        }
    }

    // Column-mean imputation over the assembled data; columns with no
    // observed value impute to 0.
    let mut imputation = Vec::new();
    for j in 0..feature_names.len() {
        let observed: Vec<f64> = rows
            .iter()
            .zip(&missing_mask)
            .filter(|(_, m)| !m[j])
            .map(|(r, _)| r[j])
            .collect();
        let col_mean = if observed.is_empty() {
            0.0
        } else {
            mean(&observed)
        };
        let mut imputed_rows = 0;
        for (row, miss) in rows.iter_mut().zip(&missing_mask) {
            if miss[j] {
                row[j] = col_mean;
                imputed_rows += 1;
            }
        }
        if imputed_rows > 0 {
            imputation.push(ImputationRecord {
                feature: feature_names[j].clone(),
                mean: col_mean,
                imputed_rows,
            });
        }
    }

    Ok(Dataset {
        feature_names,
        rows,
        missing: missing_mask,
        labels,
        keys,
        subset: Some(subset),
        imputation,
    })
}

/// Build a dataset from raw rows for tests, with nothing missing.
#[cfg(test)]
pub(crate) fn test_dataset(
    rows: Vec<Vec<f64>>,
    labels: Vec<UpdateLabel>,
    names: &[&str],
) -> Dataset {
    let n = rows.len();
    let d = names.len();
    Dataset {
        feature_names: names.iter().map(|s| s.to_string()).collect(),
        missing: vec![vec![false; d]; n],
        keys: (0..n)
            .map(|i| InstanceKey {
                submission_id: format!("s{i}"),
                review_id: "r".to_string(),
            })
            .collect(),
        subset: None,
        imputation: Vec::new(),
        rows,
        labels,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{PaperType, ReviewScores, Submission};
    use proptest::prelude::*;

    fn review(id: &str, before_oval: i32, before_conf: i32) -> Review {
        Review {
            review_id: id.to_string(),
            submission_id: "s".to_string(),
            reviewer_id: id.to_string(),
            before: Some(ReviewScores::new(before_oval, before_conf)),
            after: ReviewScores::new(before_oval, before_conf),
            pos_args: vec![],
            neg_args: vec![],
            questions: vec![],
            other_text: String::new(),
            submit_time: None,
        }
    }

    fn feats(self_oval: i32, peer_ovals: &[i32]) -> BTreeMap<String, f64> {
        let r = review("self", self_oval, 3);
        let peers: Vec<Review> = peer_ovals
            .iter()
            .enumerate()
            .map(|(i, &o)| review(&format!("p{i}"), o, 3))
            .collect();
        let refs: Vec<&Review> = peers.iter().collect();
        score_features(&r, &refs, &FeatureConfig::default()).unwrap()
    }

    #[test]
    fn score_feature_arithmetic() {
        let f = feats(3, &[4, 5]);
        assert_eq!(f["oth_mean-self"], 1.5);
        assert_eq!(f["self-oth_min"], -1.0);
        assert_eq!(f["self_before**2"], 9.0);
        assert_eq!(f.len(), 26);
        for name in SCORE_FEATURES {
            assert!(f.contains_key(name), "missing {name}");
        }
    }

    #[test]
    fn symmetric_peers_zero_differences() {
        let f = feats(4, &[4, 4]);
        for name in [
            "oth_mean-self",
            "oth_median-self",
            "oth_max-self",
            "self-oth_min",
            "all_mean-self",
            "all_max-self",
            "all_median-self",
            "self-all_min",
        ] {
            assert_eq!(f[name], 0.0, "{name}");
        }
        assert_eq!(f["oth_std"], 0.0);
    }

    #[test]
    fn hand_enumerated_feature_table() {
        let f = feats(2, &[3, 5, 6]);
        let cases: [(&str, f64); 26] = [
            ("self_before", 2.0),
            ("self_conf", 3.0),
            ("oth_max", 6.0),
            ("oth_min", 3.0),
            ("oth_mean", 14.0 / 3.0),
            ("oth_median", 5.0),
            ("oth_std", (14.0f64 / 9.0).sqrt()),
            ("oth_conf_max", 3.0),
            ("oth_conf_min", 3.0),
            ("oth_conf_mean", 3.0),
            ("oth_conf_median", 3.0),
            ("oth_conf_std", 0.0),
            ("oth_mean-self", 14.0 / 3.0 - 2.0),
            ("oth_median-self", 3.0),
            ("oth_max-self", 4.0),
            ("self-oth_min", -1.0),
            ("all_max", 6.0),
            ("all_min", 2.0),
            ("all_mean", 4.0),
            ("all_median", 4.0),
            ("all_std", 2.5f64.sqrt()),
            ("self_before**2", 4.0),
            ("all_mean-self", 2.0),
            ("all_max-self", 4.0),
            ("all_median-self", 2.0),
            ("self-all_min", 0.0),
        ];
        for (name, expect) in cases {
            assert!(
                (f[name] - expect).abs() < 1e-12,
                "{name}: got {}, expected {expect}",
                f[name]
            );
        }
    }

    #[test]
    fn too_few_peers_is_an_error() {
        let r = review("self", 3, 3);
        let p = review("p0", 4, 3);
        let err = score_features(&r, &[&p], &FeatureConfig::default()).unwrap_err();
        assert!(matches!(err, Error::IncompleteReviewSet(1)));
    }

    proptest! {
        #[test]
        fn shift_leaves_differences_and_stds_unchanged(
            self_oval in 1i32..4,
            p1 in 1i32..4,
            p2 in 1i32..4,
            p3 in 1i32..4,
            shift in 0i32..3,
        ) {
            let base = feats(self_oval, &[p1, p2, p3]);
            let shifted = feats(self_oval + shift, &[p1 + shift, p2 + shift, p3 + shift]);
            for name in [
                "oth_mean-self", "oth_median-self", "oth_max-self", "self-oth_min",
                "all_mean-self", "all_max-self", "all_median-self", "self-all_min",
                "oth_std", "all_std",
            ] {
                prop_assert!((base[name] - shifted[name]).abs() < 1e-12, "{}", name);
            }
        }

        #[test]
        fn peer_order_is_irrelevant(
            self_oval in 1i32..7,
            peers in proptest::collection::vec(1i32..7, 2..5),
        ) {
            let base = feats(self_oval, &peers);
            let mut reversed = peers.clone();
            reversed.reverse();
            let swapped = feats(self_oval, &reversed);
            for (name, value) in &base {
                prop_assert!((value - swapped[name]).abs() < 1e-12, "{}", name);
            }
        }

        #[test]
        fn three_review_identity(self_oval in 1i32..7, p1 in 1i32..7, p2 in 1i32..7) {
            let f = feats(self_oval, &[p1, p2]);
            let lhs = f["all_mean"];
            let rhs = (2.0 * f["oth_mean"] + f["self_before"]) / 3.0;
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    fn response_instance(text: &str) -> (Review, AuthorResponse) {
        let mut r = review("r1", 3, 3);
        r.neg_args = vec!["the evaluation is weak".to_string()];
        (r, AuthorResponse::new("s", Some("r1"), text))
    }

    #[test]
    fn log_leng_cases() {
        let bindings = ScorerBindings::default();
        let cfg = FeatureConfig::default();
        let (r, one_token) = response_instance("Thanks");
        let (v, _) = text_features(&r, &one_token, None, &bindings, &cfg).unwrap();
        assert_eq!(v["log_leng"], 0.0);

        let many = (0..300).map(|_| "tok").collect::<Vec<_>>().join(" ");
        let (r2, resp) = response_instance(&many);
        let (v2, _) = text_features(&r2, &resp, None, &bindings, &cfg).unwrap();
        assert!((v2["log_leng"] - 300.0f64.ln()).abs() < 1e-12);
        assert!((v2["log_leng"] - 5.7038).abs() < 1e-4);
    }

    #[test]
    fn log_leng_strictly_increases() {
        let bindings = ScorerBindings::default();
        let cfg = FeatureConfig::default();
        let mut prev = f64::NEG_INFINITY;
        for n in [1usize, 2, 5, 17, 90] {
            let text = (0..n).map(|_| "word").collect::<Vec<_>>().join(" ");
            let (r, resp) = response_instance(&text);
            let (v, _) = text_features(&r, &resp, None, &bindings, &cfg).unwrap();
            assert!(v["log_leng"] > prev);
            prev = v["log_leng"];
        }
    }

    #[test]
    fn sim_is_one_for_identical_texts() {
        let bindings = ScorerBindings::default();
        let cfg = FeatureConfig::default();
        let mut r = review("r1", 3, 3);
        r.neg_args = vec!["alpha beta gamma".to_string()];
        let resp = AuthorResponse::new("s", Some("r1"), "alpha beta gamma");
        let store = EmbeddingStore::synthetic(["alpha", "beta", "gamma"], 4, 3);
        let (v, missing) = text_features(&r, &resp, Some(&store), &bindings, &cfg).unwrap();
        assert!((v["sim"] - 1.0).abs() < 1e-12);
        assert!(missing.is_empty());
    }

    #[test]
    fn sim_missing_without_store() {
        let bindings = ScorerBindings::default();
        let cfg = FeatureConfig::default();
        let (r, resp) = response_instance("We will address this.");
        let (v, missing) = text_features(&r, &resp, None, &bindings, &cfg).unwrap();
        assert!(!v.contains_key("sim"));
        assert!(missing.contains("sim"));
    }

    #[test]
    fn empty_response_is_an_error() {
        let bindings = ScorerBindings::default();
        let cfg = FeatureConfig::default();
        let (r, resp) = response_instance("");
        assert!(text_features(&r, &resp, None, &bindings, &cfg).is_err());
    }

    fn assemble_fixture() -> Corpus {
        // two Full submissions, each with 3 labeled reviews and responses
        let mut submissions = Vec::new();
        for (sid, ovals, delta) in [("s1", [3, 4, 4], 1i32), ("s2", [2, 3, 3], -1)] {
            let reviews: Vec<Review> = ovals
                .iter()
                .enumerate()
                .map(|(i, &o)| {
                    let mut r = review(&format!("r{i}"), o, 3);
                    r.submission_id = sid.to_string();
                    if i == 0 {
                        r.after.oval = o + delta;
                    }
                    r
                })
                .collect();
            let responses = (0..3)
                .map(|i| {
                    AuthorResponse::new(
                        sid,
                        Some(&format!("r{i}")),
                        "Thanks for the comments. We added Table 2 with 95 runs.",
                    )
                })
                .collect();
            submissions.push(Submission {
                submission_id: sid.to_string(),
                paper_type: PaperType::Long,
                decision: None,
                reviews,
                responses,
                weakness_labels: None,
            });
        }
        Corpus::new(submissions, "test")
    }

    #[test]
    fn assemble_rows_match_hand_enumeration() {
        let corpus = assemble_fixture();
        let dataset = assemble(
            &corpus,
            Subset::Full,
            None,
            &ScorerBindings::default(),
            &FeatureConfig::default(),
        )
        .unwrap();
        assert_eq!(dataset.n_rows(), 6);
        assert_eq!(dataset.n_submissions(), 2);
        assert_eq!(dataset.class_counts(), [1, 1, 4]);
        assert_eq!(dataset.n_features(), 26 + 17);
        // sim column was fully missing: imputed to 0 and recorded
        let sim_col = dataset
            .feature_names
            .iter()
            .position(|n| n == "sim")
            .unwrap();
        assert!(dataset.rows.iter().all(|r| r[sim_col] == 0.0));
        assert!(dataset.missing.iter().all(|m| m[sim_col]));
        assert!(dataset
            .imputation
            .iter()
            .any(|r| r.feature == "sim" && r.imputed_rows == 6));
        // labels line up with keys
        let inc_row = dataset
            .labels
            .iter()
            .position(|l| *l == UpdateLabel::Inc)
            .unwrap();
        assert_eq!(dataset.keys[inc_row].submission_id, "s1");
        assert_eq!(dataset.keys[inc_row].review_id, "r0");
    }

    #[test]
    fn restrict_to_groups_selects_columns() {
        let corpus = assemble_fixture();
        let dataset = assemble(
            &corpus,
            Subset::Full,
            None,
            &ScorerBindings::default(),
            &FeatureConfig::default(),
        )
        .unwrap();
        let score_only = dataset.restrict_to_groups(&[FeatureGroup::Score]);
        assert_eq!(score_only.n_features(), 26);
        let text_only = dataset.restrict_to_groups(&[
            FeatureGroup::LogLeng,
            FeatureGroup::Sim,
            FeatureGroup::Spec,
            FeatureGroup::Plt,
            FeatureGroup::Cvc,
        ]);
        assert_eq!(text_only.n_features(), 17);
        assert_eq!(score_only.n_rows(), dataset.n_rows());
    }

    #[test]
    fn dataset_csv_has_header_and_labels() {
        let corpus = assemble_fixture();
        let dataset = assemble(
            &corpus,
            Subset::Full,
            None,
            &ScorerBindings::default(),
            &FeatureConfig::default(),
        )
        .unwrap();
        let csv = dataset.to_csv();
        let mut lines = csv.lines();
        let header = lines.next().unwrap();
        assert!(header.starts_with("self_before,self_conf,"));
        assert!(header.ends_with(",label"));
        assert_eq!(lines.count(), 6);
        assert!(csv.contains(",INC"));
        assert!(csv.contains(",DEC"));
    }
}
