//! Multinomial logistic regression: a softmax output layer with no hidden
//! layer, trained by full-batch gradient descent with backtracking line
//! search on the mean cross-entropy plus an L2 penalty on the weights.
//! Training starts from zeros; the objective is convex, so the run is
//! deterministic given the config.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::UpdateLabel;
use crate::error::{Error, Result};
use crate::features::Dataset;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TrainConfig {
    pub l2_strength: f64,
    pub max_iterations: usize,
    /// Stop when the loss decrease falls at or below this value.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            l2_strength: 1e-3,
            max_iterations: 500,
            tolerance: 1e-9,
            seed: 0,
        }
    }
}

/// Per-column z-scoring parameters fitted on training rows. Zero-variance
/// columns keep a divisor of 1 so they map to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardization {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Standardization {
    pub fn fit(rows: &[Vec<f64>]) -> Self {
        let d = rows.first().map_or(0, Vec::len);
        let n = rows.len() as f64;
        let mut means = vec![0.0; d];
        for row in rows {
            for (m, v) in means.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in &mut means {
            *m /= n;
        }
        let mut stds = vec![0.0; d];
        for row in rows {
            for ((s, v), m) in stds.iter_mut().zip(row).zip(&means) {
                *s += (v - m).powi(2);
            }
        }
        for s in &mut stds {
            *s = (*s / n).sqrt();
            if *s == 0.0 {
                *s = 1.0;
            }
        }
        Standardization { means, stds }
    }

    pub fn transform_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(&self.means)
            .zip(&self.stds)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    }

    pub fn transform(&self, rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
        rows.iter().map(|r| self.transform_row(r)).collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SoftmaxModel {
    /// Fixed class order: INC, DEC, KEEP.
    pub classes: [UpdateLabel; 3],
    pub feature_names: Vec<String>,
    /// classes x features.
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
    pub standardization: Option<Standardization>,
    pub config: TrainConfig,
    pub train_loss: f64,
    pub iterations: usize,
}

impl SoftmaxModel {
    /// Softmax probabilities for a row that is already standardized and in
    /// the model's feature order.
    fn probabilities_standardized(&self, row: &[f64]) -> [f64; 3] {
        let mut logits = [0.0f64; 3];
        for (c, logit) in logits.iter_mut().enumerate() {
            *logit = self.bias[c]
                + self.weights[c]
                    .iter()
                    .zip(row)
                    .map(|(w, x)| w * x)
                    .sum::<f64>();
        }
        softmax(&logits)
    }

    /// Predict from a raw row in the model's feature order; applies the
    /// stored standardization when present.
    pub fn predict_from_slice(&self, row: &[f64]) -> (UpdateLabel, [f64; 3]) {
        let probs = match &self.standardization {
            Some(std) => self.probabilities_standardized(&std.transform_row(row)),
            None => self.probabilities_standardized(row),
        };
        (argmax_label(&probs), probs)
    }

    /// Predict from named feature values; a feature missing from the map is
    /// an error. Ties break by class order INC < DEC < KEEP.
    pub fn predict(&self, row: &BTreeMap<String, f64>) -> Result<(UpdateLabel, [f64; 3])> {
        let values: Result<Vec<f64>> = self
            .feature_names
            .iter()
            .map(|name| {
                row.get(name)
                    .copied()
                    .ok_or_else(|| Error::MissingFeature(name.clone()))
            })
            .collect();
        Ok(self.predict_from_slice(&values?))
    }
}

fn softmax(logits: &[f64; 3]) -> [f64; 3] {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut exps = [0.0f64; 3];
    let mut sum = 0.0;
    for (e, l) in exps.iter_mut().zip(logits) {
        *e = (l - max).exp();
        sum += *e;
    }
    for e in &mut exps {
        *e /= sum;
    }
    exps
}

fn argmax_label(probs: &[f64; 3]) -> UpdateLabel {
    let mut best = 0;
    for c in 1..3 {
        if probs[c] > probs[best] {
            best = c;
        }
    }
    UpdateLabel::from_index(best)
}

/// Randomly down-sample KEEP rows (without replacement) so their count
/// equals |INC| + |DEC|; a no-op when KEEP is not in excess. INC and DEC
/// rows are untouched and original row order is preserved.
pub fn downsample_keep(dataset: &Dataset, seed: u64) -> Dataset {
    let counts = dataset.class_counts();
    let target = counts[0] + counts[1];
    if counts[2] <= target {
        return dataset.gather(&(0..dataset.n_rows()).collect::<Vec<_>>());
    }
    let keep_rows: Vec<usize> = dataset
        .labels
        .iter()
        .enumerate()
        .filter(|(_, l)| **l == UpdateLabel::Keep)
        .map(|(i, _)| i)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chosen = rand::seq::index::sample(&mut rng, keep_rows.len(), target);
    let mut selected: Vec<usize> = chosen.iter().map(|i| keep_rows[i]).collect();
    selected.sort_unstable();
    let mut chosen_mask = vec![false; dataset.n_rows()];
    for &i in &selected {
        chosen_mask[i] = true;
    }
    let indices: Vec<usize> = (0..dataset.n_rows())
        .filter(|&i| dataset.labels[i] != UpdateLabel::Keep || chosen_mask[i])
        .collect();
    dataset.gather(&indices)
}

struct Objective<'a> {
    rows: &'a [Vec<f64>],
    labels: &'a [usize],
    l2: f64,
}

impl Objective<'_> {
    fn n(&self) -> usize {
        self.rows.len()
    }

    fn d(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    /// Mean cross-entropy + (l2/2) * ||W||^2 (bias unpenalized).
    fn loss(&self, weights: &[Vec<f64>], bias: &[f64]) -> f64 {
        let mut total = 0.0;
        for (row, &label) in self.rows.iter().zip(self.labels) {
            let mut logits = [0.0f64; 3];
            for (c, logit) in logits.iter_mut().enumerate() {
                *logit = bias[c] + weights[c].iter().zip(row).map(|(w, x)| w * x).sum::<f64>();
            }
            let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let logsumexp = max + logits.iter().map(|l| (l - max).exp()).sum::<f64>().ln();
            total += logsumexp - logits[label];
        }
        let penalty: f64 = weights
            .iter()
            .flat_map(|row| row.iter())
            .map(|w| w * w)
            .sum();
        total / self.n() as f64 + 0.5 * self.l2 * penalty
    }

    /// Analytic gradient: dW = (1/N) sum (p - y) x^T + l2 W; db = mean(p - y).
    fn gradient(&self, weights: &[Vec<f64>], bias: &[f64]) -> (Vec<Vec<f64>>, Vec<f64>) {
        let d = self.d();
        let mut gw = vec![vec![0.0; d]; 3];
        let mut gb = vec![0.0; 3];
        for (row, &label) in self.rows.iter().zip(self.labels) {
            let mut logits = [0.0f64; 3];
            for (c, logit) in logits.iter_mut().enumerate() {
                *logit = bias[c] + weights[c].iter().zip(row).map(|(w, x)| w * x).sum::<f64>();
            }
            let probs = softmax(&logits);
            for c in 0..3 {
                let delta = probs[c] - if c == label { 1.0 } else { 0.0 };
                gb[c] += delta;
                for (g, x) in gw[c].iter_mut().zip(row) {
                    *g += delta * x;
                }
            }
        }
        let scale = 1.0 / self.n() as f64;
        for c in 0..3 {
            gb[c] *= scale;
            for (g, w) in gw[c].iter_mut().zip(&weights[c]) {
                *g = *g * scale + self.l2 * w;
            }
        }
        (gw, gb)
    }
}

/// Mean cross-entropy of a softmax layer plus (l2/2)·‖W‖², evaluated at
/// the given parameters. This is the exact objective `train` minimizes.
pub fn objective_loss(
    rows: &[Vec<f64>],
    labels: &[UpdateLabel],
    weights: &[Vec<f64>],
    bias: &[f64],
    l2: f64,
) -> f64 {
    let labels: Vec<usize> = labels.iter().map(|l| l.index()).collect();
    Objective {
        rows,
        labels: &labels,
        l2,
    }
    .loss(weights, bias)
}

/// Analytic gradient of `objective_loss` in the same parameter layout.
pub fn objective_gradient(
    rows: &[Vec<f64>],
    labels: &[UpdateLabel],
    weights: &[Vec<f64>],
    bias: &[f64],
    l2: f64,
) -> (Vec<Vec<f64>>, Vec<f64>) {
    let labels: Vec<usize> = labels.iter().map(|l| l.index()).collect();
    Objective {
        rows,
        labels: &labels,
        l2,
    }
    .gradient(weights, bias)
}

pub(crate) fn train_from(
    dataset: &Dataset,
    config: &TrainConfig,
    mut weights: Vec<Vec<f64>>,
    mut bias: Vec<f64>,
) -> Result<SoftmaxModel> {
    if config.tolerance <= 0.0 {
        return Err(Error::InvalidInput("tolerance must be > 0".to_string()));
    }
    if dataset.n_rows() == 0 {
        return Err(Error::TooFewInstances("empty training set".to_string()));
    }
    let labels: Vec<usize> = dataset.labels.iter().map(|l| l.index()).collect();
    let objective = Objective {
        rows: &dataset.rows,
        labels: &labels,
        l2: config.l2_strength,
    };

    let mut loss = objective.loss(&weights, &bias);
    if !loss.is_finite() {
        return Err(Error::Diverged);
    }
    let mut iterations = 0;
    for _ in 0..config.max_iterations {
        let (gw, gb) = objective.gradient(&weights, &bias);
        let gnorm2: f64 = gw
            .iter()
            .flat_map(|r| r.iter())
            .chain(gb.iter())
            .map(|g| g * g)
            .sum();
        if gnorm2 < 1e-24 {
            break;
        }
        // Backtracking line search with the Armijo condition.
        let mut step = 1.0;
        let mut accepted = None;
        while step > 1e-20 {
            let cand_w: Vec<Vec<f64>> = weights
                .iter()
                .zip(&gw)
                .map(|(wr, gr)| wr.iter().zip(gr).map(|(w, g)| w - step * g).collect())
                .collect();
            let cand_b: Vec<f64> = bias.iter().zip(&gb).map(|(b, g)| b - step * g).collect();
            let cand_loss = objective.loss(&cand_w, &cand_b);
            if !cand_loss.is_finite() {
                return Err(Error::Diverged);
            }
            if cand_loss <= loss - 1e-4 * step * gnorm2 {
                accepted = Some((cand_w, cand_b, cand_loss));
                break;
            }
            step *= 0.5;
        }
        let Some((new_w, new_b, new_loss)) = accepted else {
            break; // no descent step left at numerical precision
        };
        let decrease = loss - new_loss;
        weights = new_w;
        bias = new_b;
        loss = new_loss;
        iterations += 1;
        if decrease <= config.tolerance {
            break;
        }
    }

    Ok(SoftmaxModel {
        classes: UpdateLabel::ALL,
        feature_names: dataset.feature_names.clone(),
        weights,
        bias,
        standardization: None,
        config: *config,
        train_loss: loss,
        iterations,
    })
}

/// Train on an already-standardized dataset, starting from zeros.
pub fn train(dataset: &Dataset, config: &TrainConfig) -> Result<SoftmaxModel> {
    let d = dataset.n_features();
    train_from(dataset, config, vec![vec![0.0; d]; 3], vec![0.0; 3])
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightEntry {
    pub feature: String,
    /// Signed weights in INC, DEC, KEEP order.
    pub weights: [f64; 3],
}

/// Per-feature signed weights, ordered by maximum absolute weight.
pub fn inspect_weights(model: &SoftmaxModel) -> Vec<WeightEntry> {
    let mut entries: Vec<WeightEntry> = model
        .feature_names
        .iter()
        .enumerate()
        .map(|(j, name)| WeightEntry {
            feature: name.clone(),
            weights: [
                model.weights[0][j],
                model.weights[1][j],
                model.weights[2][j],
            ],
        })
        .collect();
    entries.sort_by(|a, b| {
        let ma = a
            .weights
            .iter()
            .cloned()
            .fold(0.0f64, |acc, w| acc.max(w.abs()));
        let mb = b
            .weights
            .iter()
            .cloned()
            .fold(0.0f64, |acc, w| acc.max(w.abs()));
        mb.partial_cmp(&ma)
            .unwrap()
            .then_with(|| a.feature.cmp(&b.feature))
    });
    entries
}

pub fn weights_markdown(entries: &[WeightEntry]) -> String {
    let mut s = String::from("| Feature | INC | DEC | KEEP |\n|---|---|---|---|\n");
    for e in entries {
        s.push_str(&format!(
            "| {} | {:.3} | {:.3} | {:.3} |\n",
            e.feature, e.weights[0], e.weights[1], e.weights[2]
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::test_dataset as toy_dataset;
    use rand::{Rng, SeedableRng};

    fn label_cycle(n: usize) -> Vec<UpdateLabel> {
        (0..n).map(|i| UpdateLabel::from_index(i % 3)).collect()
    }

    #[test]
    fn downsample_reaches_inc_plus_dec() {
        // counts mirroring the Full subset: 80 INC, 60 DEC, 652 KEEP
        let mut labels = Vec::new();
        labels.extend(std::iter::repeat_n(UpdateLabel::Inc, 80));
        labels.extend(std::iter::repeat_n(UpdateLabel::Dec, 60));
        labels.extend(std::iter::repeat_n(UpdateLabel::Keep, 652));
        let rows: Vec<Vec<f64>> = (0..792).map(|i| vec![i as f64]).collect();
        let ds = toy_dataset(rows, labels, &["x"]);
        let down = downsample_keep(&ds, 7);
        assert_eq!(down.class_counts(), [80, 60, 140]);
        assert_eq!(down.n_rows(), 280);
    }

    #[test]
    fn downsample_is_a_noop_when_keep_not_in_excess() {
        let mut labels = Vec::new();
        labels.extend(std::iter::repeat_n(UpdateLabel::Inc, 5));
        labels.extend(std::iter::repeat_n(UpdateLabel::Dec, 5));
        labels.extend(std::iter::repeat_n(UpdateLabel::Keep, 8));
        let rows: Vec<Vec<f64>> = (0..18).map(|i| vec![i as f64]).collect();
        let ds = toy_dataset(rows.clone(), labels, &["x"]);
        let down = downsample_keep(&ds, 7);
        assert_eq!(down.class_counts(), [5, 5, 8]);
        assert_eq!(down.rows, rows);
    }

    #[test]
    fn downsample_is_deterministic_and_seed_sensitive() {
        let labels = {
            let mut l = vec![UpdateLabel::Inc, UpdateLabel::Dec];
            l.extend(std::iter::repeat_n(UpdateLabel::Keep, 40));
            l
        };
        let rows: Vec<Vec<f64>> = (0..42).map(|i| vec![i as f64]).collect();
        let ds = toy_dataset(rows, labels, &["x"]);
        let a = downsample_keep(&ds, 11);
        let b = downsample_keep(&ds, 11);
        assert_eq!(a.rows, b.rows);
        let c = downsample_keep(&ds, 12);
        assert_ne!(a.rows, c.rows);
        // original order is preserved
        let xs: Vec<f64> = a.rows.iter().map(|r| r[0]).collect();
        let mut sorted = xs.clone();
        sorted.sort_by(|p, q| p.partial_cmp(q).unwrap());
        assert_eq!(xs, sorted);
    }

    fn separable_dataset() -> Dataset {
        // three well-separated clusters in 2D
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        let centers = [(3.0, 0.0), (-3.0, 0.0), (0.0, 3.0)];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (c, &(cx, cy)) in centers.iter().enumerate() {
            for _ in 0..30 {
                rows.push(vec![
                    cx + rng.gen_range(-0.5..0.5),
                    cy + rng.gen_range(-0.5..0.5),
                ]);
                labels.push(UpdateLabel::from_index(c));
            }
        }
        toy_dataset(rows, labels, &["x", "y"])
    }

    #[test]
    fn separable_data_reaches_full_training_accuracy() {
        let ds = separable_dataset();
        let config = TrainConfig {
            l2_strength: 0.01,
            ..Default::default()
        };
        let model = train(&ds, &config).unwrap();
        let correct = ds
            .rows
            .iter()
            .zip(&ds.labels)
            .filter(|(row, label)| model.predict_from_slice(row).0 == **label)
            .count();
        assert_eq!(correct, ds.n_rows());
    }

    #[test]
    fn independent_labels_recover_class_frequencies() {
        // 3000 instances, label frequencies (0.5, 0.3, 0.2), features noise
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for _ in 0..3000 {
            rows.push(vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
            let u: f64 = rng.gen();
            labels.push(if u < 0.5 {
                UpdateLabel::Inc
            } else if u < 0.8 {
                UpdateLabel::Dec
            } else {
                UpdateLabel::Keep
            });
        }
        let ds = toy_dataset(rows, labels, &["a", "b"]);
        let counts = ds.class_counts();
        let freqs: Vec<f64> = counts
            .iter()
            .map(|&c| c as f64 / ds.n_rows() as f64)
            .collect();
        let model = train(&ds, &TrainConfig::default()).unwrap();
        let (_, probs) = model.predict_from_slice(&[0.0, 0.0]);
        for c in 0..3 {
            assert!(
                (probs[c] - freqs[c]).abs() < 0.02,
                "class {c}: {} vs {}",
                probs[c],
                freqs[c]
            );
        }
    }

    #[test]
    fn analytic_gradient_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let h = 1e-5;
        for _ in 0..20 {
            let n = rng.gen_range(4..12);
            let d = rng.gen_range(1..5);
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect())
                .collect();
            let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..3)).collect();
            let objective = Objective {
                rows: &rows,
                labels: &labels,
                l2: 0.01,
            };
            let weights: Vec<Vec<f64>> = (0..3)
                .map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect();
            let bias: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let (gw, gb) = objective.gradient(&weights, &bias);
            for c in 0..3 {
                for j in 0..d {
                    let mut wp = weights.clone();
                    wp[c][j] += h;
                    let mut wm = weights.clone();
                    wm[c][j] -= h;
                    let fd = (objective.loss(&wp, &bias) - objective.loss(&wm, &bias)) / (2.0 * h);
                    let denom = gw[c][j].abs().max(fd.abs()).max(1.0);
                    assert!(
                        ((gw[c][j] - fd) / denom).abs() <= 1e-5,
                        "dW[{c}][{j}]: analytic {} vs fd {fd}",
                        gw[c][j]
                    );
                }
                let mut bp = bias.clone();
                bp[c] += h;
                let mut bm = bias.clone();
                bm[c] -= h;
                let fd =
                    (objective.loss(&weights, &bp) - objective.loss(&weights, &bm)) / (2.0 * h);
                let denom = gb[c].abs().max(fd.abs()).max(1.0);
                assert!(((gb[c] - fd) / denom).abs() <= 1e-5);
            }
        }
    }

    #[test]
    fn zero_model_predicts_uniform_with_inc_tiebreak() {
        let model = SoftmaxModel {
            classes: UpdateLabel::ALL,
            feature_names: vec!["a".to_string(), "b".to_string()],
            weights: vec![vec![0.0; 2]; 3],
            bias: vec![0.0; 3],
            standardization: None,
            config: TrainConfig::default(),
            train_loss: 0.0,
            iterations: 0,
        };
        let (label, probs) = model.predict_from_slice(&[1.0, -2.0]);
        assert_eq!(label, UpdateLabel::Inc);
        for p in probs {
            assert!((p - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn saturated_weights_give_confident_prediction() {
        let model = SoftmaxModel {
            classes: UpdateLabel::ALL,
            feature_names: vec!["a".to_string()],
            weights: vec![vec![0.0], vec![10.0], vec![0.0]],
            bias: vec![0.0; 3],
            standardization: None,
            config: TrainConfig::default(),
            train_loss: 0.0,
            iterations: 0,
        };
        let (label, probs) = model.predict_from_slice(&[1.0]);
        assert_eq!(label, UpdateLabel::Dec);
        assert!(probs[1] > 0.99);
    }

    #[test]
    fn probabilities_match_hand_computed_softmax() {
        let model = SoftmaxModel {
            classes: UpdateLabel::ALL,
            feature_names: vec!["a".to_string(), "b".to_string()],
            weights: vec![vec![0.5, -0.25], vec![-1.0, 0.75], vec![0.0, 0.125]],
            bias: vec![0.1, -0.2, 0.3],
            standardization: None,
            config: TrainConfig::default(),
            train_loss: 0.0,
            iterations: 0,
        };
        let x = [0.8, -1.2];
        let logits: [f64; 3] = [
            0.1 + 0.5 * 0.8 + -0.25 * -1.2,
            -0.2 + -0.8 + 0.75 * -1.2,
            0.3 + 0.0 * 0.8 + 0.125 * -1.2,
        ];
        let z: f64 = logits.iter().map(|l| l.exp()).sum();
        let (_, probs) = model.predict_from_slice(&x);
        for c in 0..3 {
            assert!((probs[c] - logits[c].exp() / z).abs() < 1e-12);
        }
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn predict_errors_on_missing_feature() {
        let model = SoftmaxModel {
            classes: UpdateLabel::ALL,
            feature_names: vec!["a".to_string(), "b".to_string()],
            weights: vec![vec![0.0; 2]; 3],
            bias: vec![0.0; 3],
            standardization: None,
            config: TrainConfig::default(),
            train_loss: 0.0,
            iterations: 0,
        };
        let mut row = BTreeMap::new();
        row.insert("a".to_string(), 1.0);
        assert!(matches!(
            model.predict(&row),
            Err(Error::MissingFeature(name)) if name == "b"
        ));
    }

    #[test]
    fn prediction_is_shift_invariant() {
        let mut model = SoftmaxModel {
            classes: UpdateLabel::ALL,
            feature_names: vec!["a".to_string()],
            weights: vec![vec![0.7], vec![-0.3], vec![0.2]],
            bias: vec![0.5, 0.1, -0.4],
            standardization: None,
            config: TrainConfig::default(),
            train_loss: 0.0,
            iterations: 0,
        };
        let x = [1.7];
        let (_, base) = model.predict_from_slice(&x);
        for c in 0..3 {
            model.weights[c][0] += 2.5;
            model.bias[c] -= 1.25;
        }
        let (_, shifted) = model.predict_from_slice(&x);
        for c in 0..3 {
            assert!((base[c] - shifted[c]).abs() < 1e-12);
        }
    }

    #[test]
    fn loss_is_non_increasing_across_accepted_steps() {
        let ds = separable_dataset();
        let mut previous = f64::INFINITY;
        for max_iterations in [1, 2, 4, 8, 16, 32, 64] {
            let model = train(
                &ds,
                &TrainConfig {
                    l2_strength: 0.01,
                    max_iterations,
                    tolerance: 1e-15,
                    seed: 0,
                },
            )
            .unwrap();
            assert!(
                model.train_loss <= previous,
                "loss rose after {max_iterations} iterations: {} > {previous}",
                model.train_loss
            );
            previous = model.train_loss;
        }
    }

    #[test]
    fn loss_is_non_increasing_and_convex_objective_reaches_same_optimum() {
        let ds = separable_dataset();
        let config = TrainConfig {
            l2_strength: 0.05,
            max_iterations: 400,
            tolerance: 1e-12,
            seed: 0,
        };
        let from_zeros = train(&ds, &config).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        let w0: Vec<Vec<f64>> = (0..3)
            .map(|_| (0..2).map(|_| rng.gen_range(-2.0..2.0)).collect())
            .collect();
        let b0: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let from_random = train_from(&ds, &config, w0, b0).unwrap();
        assert!(
            (from_zeros.train_loss - from_random.train_loss).abs() < 1e-6,
            "{} vs {}",
            from_zeros.train_loss,
            from_random.train_loss
        );
    }

    #[test]
    fn stronger_l2_shrinks_weights_on_independent_labels() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rows: Vec<Vec<f64>> = (0..120)
            .map(|_| vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])
            .collect();
        let labels = label_cycle(120);
        let ds = toy_dataset(rows, labels, &["a", "b"]);
        let norm = |model: &SoftmaxModel| -> f64 {
            model
                .weights
                .iter()
                .flat_map(|r| r.iter())
                .map(|w| w * w)
                .sum::<f64>()
                .sqrt()
        };
        let mut norms = Vec::new();
        for l2 in [1e-4, 1e-1, 10.0] {
            let model = train(
                &ds,
                &TrainConfig {
                    l2_strength: l2,
                    ..Default::default()
                },
            )
            .unwrap();
            norms.push(norm(&model));
        }
        assert!(norms[0] > norms[1] && norms[1] > norms[2], "{norms:?}");
        assert!(norms[2] < 0.05, "{norms:?}");
    }

    fn overlapping_dataset() -> Dataset {
        // clusters close enough that the unregularized optimum is finite
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        let centers = [(0.8, 0.0), (-0.8, 0.0), (0.0, 0.8)];
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for (c, &(cx, cy)) in centers.iter().enumerate() {
            for _ in 0..40 {
                rows.push(vec![
                    cx + rng.gen_range(-1.5..1.5),
                    cy + rng.gen_range(-1.5..1.5),
                ]);
                labels.push(UpdateLabel::from_index(c));
            }
        }
        toy_dataset(rows, labels, &["x", "y"])
    }

    #[test]
    fn duplicated_column_weights_sum_to_single_column_weight() {
        // without the L2 term the duplicated parameterization optimizes the
        // same objective in the summed weight, so the sums must agree
        let ds = overlapping_dataset();
        let config = TrainConfig {
            l2_strength: 0.0,
            max_iterations: 5000,
            tolerance: 1e-14,
            seed: 0,
        };
        let single = train(&ds, &config).unwrap();
        let rows_dup: Vec<Vec<f64>> = ds.rows.iter().map(|r| vec![r[0], r[1], r[0]]).collect();
        let ds_dup = toy_dataset(rows_dup, ds.labels.clone(), &["x", "y", "x2"]);
        let dup = train(&ds_dup, &config).unwrap();
        for c in 0..3 {
            let combined = dup.weights[c][0] + dup.weights[c][2];
            assert!(
                (combined - single.weights[c][0]).abs() < 1e-3,
                "class {c}: {combined} vs {}",
                single.weights[c][0]
            );
        }
    }

    #[test]
    fn tolerance_must_be_positive() {
        let ds = separable_dataset();
        let config = TrainConfig {
            tolerance: 0.0,
            ..Default::default()
        };
        assert!(train(&ds, &config).is_err());
    }

    #[test]
    fn inspect_weights_orders_by_magnitude() {
        let model = SoftmaxModel {
            classes: UpdateLabel::ALL,
            feature_names: vec!["small".to_string(), "big".to_string()],
            weights: vec![vec![0.1, 2.0], vec![-0.05, -1.5], vec![0.0, 0.3]],
            bias: vec![0.0; 3],
            standardization: None,
            config: TrainConfig::default(),
            train_loss: 0.0,
            iterations: 0,
        };
        let entries = inspect_weights(&model);
        assert_eq!(entries[0].feature, "big");
        assert_eq!(entries[0].weights, [2.0, -1.5, 0.3]);
        assert_eq!(entries[1].feature, "small");
    }

    #[test]
    fn model_json_roundtrip() {
        let ds = separable_dataset();
        let model = train(&ds, &TrainConfig::default()).unwrap();
        let json = serde_json::to_string(&model).unwrap();
        let back: SoftmaxModel = serde_json::from_str(&json).unwrap();
        assert_eq!(back.feature_names, model.feature_names);
        assert_eq!(back.weights, model.weights);
        assert_eq!(back.bias, model.bias);
    }
}
