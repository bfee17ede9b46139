//! Information-gain feature ranking and correlation-based pruning.
//!
//! Continuous features are discretized by equal-frequency binning (ties go
//! to the lower bin); information gain is the reduction in label entropy
//! (nats) achieved by the binned partition. Selection drops the bottom half
//! of features by gain and then greedily prunes survivors whose absolute
//! Pearson correlation with an already-kept feature reaches the threshold.

use serde::Serialize;

use crate::features::Dataset;
use crate::stats::pearson;

/// Equal-frequency bin assignment. Values are ranked; position `i` of the
/// sorted order gets tentative bin `i * bins / n`, and every value in a tie
/// group takes the lowest tentative bin of the group. The assignment
/// depends only on ranks and tie structure, so it is invariant under
/// strictly increasing transforms.
pub fn equal_frequency_bins(column: &[f64], bins: usize) -> Vec<usize> {
    let n = column.len();
    let bins = bins.max(1);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| column[a].partial_cmp(&column[b]).expect("finite values"));

    let mut assignment = vec![0usize; n];
    let mut pos = 0;
    while pos < n {
        // tie group [pos, end)
        let mut end = pos + 1;
        while end < n && column[order[end]] == column[order[pos]] {
            end += 1;
        }
        let bin = pos * bins / n;
        for &idx in &order[pos..end] {
            assignment[idx] = bin;
        }
        pos = end;
    }
    assignment
}

fn entropy_from_counts(counts: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total as f64;
            -p * p.ln()
        })
        .sum()
}

/// H(labels) - sum_b p(b) H(labels | bin b), in nats, with the column
/// discretized into `bins` equal-frequency bins on the given data.
pub fn information_gain(column: &[f64], labels: &[usize], n_classes: usize, bins: usize) -> f64 {
    assert_eq!(column.len(), labels.len());
    let n = labels.len();
    if n == 0 {
        return 0.0;
    }
    let assignment = equal_frequency_bins(column, bins);
    let n_bins = assignment.iter().copied().max().unwrap_or(0) + 1;

    let mut label_counts = vec![0usize; n_classes];
    for &l in labels {
        label_counts[l] += 1;
    }
    let h_labels = entropy_from_counts(&label_counts, n);

    let mut bin_label_counts = vec![vec![0usize; n_classes]; n_bins];
    let mut bin_totals = vec![0usize; n_bins];
    for (&bin, &label) in assignment.iter().zip(labels) {
        bin_label_counts[bin][label] += 1;
        bin_totals[bin] += 1;
    }
    let conditional: f64 = bin_label_counts
        .iter()
        .zip(&bin_totals)
        .map(|(counts, &total)| (total as f64 / n as f64) * entropy_from_counts(counts, total))
        .sum();
    // clamp round-off; the gain is non-negative by the information inequality
    (h_labels - conditional).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DropRule {
    /// Drop exactly floor(n/2) lowest-gain features.
    FloorHalf,
    /// Drop features with gain strictly below the median gain.
    BelowMedian,
}

#[derive(Debug, Clone)]
pub struct SelectionConfig {
    pub corr_threshold: f64,
    pub bins: usize,
    pub drop_rule: DropRule,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig {
            corr_threshold: 0.5,
            bins: 10,
            drop_rule: DropRule::FloorHalf,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureGain {
    pub feature: String,
    pub gain: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "reason", content = "with")]
pub enum DropReason {
    BottomHalf,
    CorrelatedWith(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionReport {
    /// All features with their information gain, in selection order
    /// (descending gain, ties broken by name).
    pub gains: Vec<FeatureGain>,
    pub kept: Vec<String>,
    pub dropped: Vec<(String, DropReason)>,
}

impl SelectionReport {
    pub fn kept_indices(&self, feature_names: &[String]) -> Vec<usize> {
        feature_names
            .iter()
            .enumerate()
            .filter(|(_, name)| self.kept.contains(name))
            .map(|(j, _)| j)
            .collect()
    }
}

/// Rank features by information gain on the given (training) data, drop the
/// bottom half, then keep survivors in descending-gain order whose absolute
/// correlation with every kept feature stays below the threshold.
pub fn select_features(dataset: &Dataset, config: &SelectionConfig) -> SelectionReport {
    let labels: Vec<usize> = dataset.labels.iter().map(|l| l.index()).collect();
    let mut gains: Vec<(usize, FeatureGain)> = dataset
        .feature_names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let gain = information_gain(&dataset.column(j), &labels, 3, config.bins);
            (
                j,
                FeatureGain {
                    feature: name.clone(),
                    gain,
                },
            )
        })
        .collect();
    gains.sort_by(|(_, a), (_, b)| {
        b.gain
            .partial_cmp(&a.gain)
            .unwrap()
            .then_with(|| a.feature.cmp(&b.feature))
    });

    let n = gains.len();
    let n_drop = match config.drop_rule {
        DropRule::FloorHalf => n / 2,
        DropRule::BelowMedian => {
            let values: Vec<f64> = gains.iter().map(|(_, g)| g.gain).collect();
            let med = crate::stats::median(&values);
            values.iter().filter(|&&g| g < med).count()
        }
    };
    let cut = n - n_drop;

    let mut kept: Vec<(usize, String)> = Vec::new();
    let mut dropped: Vec<(String, DropReason)> = Vec::new();
    for (rank, (j, fg)) in gains.iter().enumerate() {
        if rank >= cut {
            dropped.push((fg.feature.clone(), DropReason::BottomHalf));
            continue;
        }
        let column = dataset.column(*j);
        // undefined correlation (constant column) counts as uncorrelated
        let conflict = kept.iter().find(|(kj, _)| {
            pearson(&column, &dataset.column(*kj))
                .map(|r| r.abs() >= config.corr_threshold)
                .unwrap_or(false)
        });
        match conflict {
            Some((_, kname)) => dropped.push((
                fg.feature.clone(),
                DropReason::CorrelatedWith(kname.clone()),
            )),
            None => kept.push((*j, fg.feature.clone())),
        }
    }

    SelectionReport {
        gains: gains.into_iter().map(|(_, g)| g).collect(),
        kept: kept.into_iter().map(|(_, name)| name).collect(),
        dropped,
    }
}
