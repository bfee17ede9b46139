//! Descriptive statistics: Pearson correlations, review-component counts and
//! lengths, Welch's t-test and contrastive n-gram ranking by the
//! log-likelihood ratio (G^2) statistic.
//!
//! Reporting uses the sample (n-1) standard deviation throughout this
//! module; the feature extractors use the population form instead.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::corpus::{derive_label, Corpus, ReviewScores, UpdateLabel};
use crate::error::{Error, Result};
use crate::special::student_t_two_tailed;
use crate::text;

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (n-1); 0 for fewer than two values.
pub fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Population standard deviation (n).
pub fn population_std(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64).sqrt()
}

/// Median, as the mean of the two middle values for even counts.
pub fn median(xs: &[f64]) -> f64 {
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Sample Pearson correlation coefficient.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::InvalidInput(format!(
            "length mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::InvalidInput(
            "need at least 2 observations".to_string(),
        ));
    }
    let mx = mean(x);
    let my = mean(y);
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (a, b) in x.iter().zip(y) {
        cov += (a - mx) * (b - my);
        vx += (a - mx).powi(2);
        vy += (b - my).powi(2);
    }
    if vx == 0.0 || vy == 0.0 {
        return Err(Error::UndefinedCorrelation("constant vector".to_string()));
    }
    Ok(cov / (vx.sqrt() * vy.sqrt()))
}

/// The seven review scores in their canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ScoreKind {
    Oval,
    Conf,
    Snd,
    Sbs,
    Org,
    Cmp,
    Rdb,
}

impl ScoreKind {
    pub const ALL: [ScoreKind; 7] = [
        ScoreKind::Oval,
        ScoreKind::Conf,
        ScoreKind::Snd,
        ScoreKind::Sbs,
        ScoreKind::Org,
        ScoreKind::Cmp,
        ScoreKind::Rdb,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ScoreKind::Oval => "OVAL",
            ScoreKind::Conf => "CONF",
            ScoreKind::Snd => "SND",
            ScoreKind::Sbs => "SBS",
            ScoreKind::Org => "ORG",
            ScoreKind::Cmp => "CMP",
            ScoreKind::Rdb => "RDB",
        }
    }

    pub fn get(self, scores: &ReviewScores) -> Option<f64> {
        match self {
            ScoreKind::Oval => Some(scores.oval as f64),
            ScoreKind::Conf => Some(scores.conf as f64),
            ScoreKind::Snd => scores.snd.map(|v| v as f64),
            ScoreKind::Sbs => scores.sbs.map(|v| v as f64),
            ScoreKind::Org => scores.org.map(|v| v as f64),
            ScoreKind::Cmp => scores.cmp.map(|v| v as f64),
            ScoreKind::Rdb => scores.rdb.map(|v| v as f64),
        }
    }
}

/// Which side of the rebuttal the scores are taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Before,
    After,
}

/// Symmetric matrix of pairwise Pearson correlations between the seven
/// scores. Entries with fewer than two joint observations (or a constant
/// marginal) are undefined.
#[derive(Debug, Clone, Serialize)]
pub struct CorrelationMatrix {
    pub labels: Vec<&'static str>,
    pub values: Vec<Vec<Option<f64>>>,
}

impl CorrelationMatrix {
    pub fn get(&self, a: ScoreKind, b: ScoreKind) -> Option<f64> {
        let i = ScoreKind::ALL.iter().position(|k| *k == a).unwrap();
        let j = ScoreKind::ALL.iter().position(|k| *k == b).unwrap();
        self.values[i][j]
    }

    /// CSV with a header row of score labels; undefined entries are empty.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("score");
        for l in &self.labels {
            s.push(',');
            s.push_str(l);
        }
        s.push('\n');
        for (i, row) in self.values.iter().enumerate() {
            s.push_str(self.labels[i]);
            for v in row {
                s.push(',');
                if let Some(v) = v {
                    s.push_str(&format!("{v:.4}"));
                }
            }
            s.push('\n');
        }
        s
    }
}

/// Pairwise Pearson correlations over reviews, with pairwise deletion of
/// missing aspect scores.
#[allow(clippy::needless_range_loop)]
pub fn correlation_matrix(corpus: &Corpus, which: Which) -> CorrelationMatrix {
    let score_sets: Vec<&ReviewScores> = corpus
        .submissions
        .iter()
        .flat_map(|s| s.reviews.iter())
        .filter_map(|r| match which {
            Which::Before => r.before.as_ref(),
            Which::After => Some(&r.after),
        })
        .collect();

    let k = ScoreKind::ALL.len();
    let mut values = vec![vec![None; k]; k];
    for i in 0..k {
        for j in i..k {
            if i == j {
                values[i][j] = Some(1.0);
                continue;
            }
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for scores in &score_sets {
                if let (Some(a), Some(b)) =
                    (ScoreKind::ALL[i].get(scores), ScoreKind::ALL[j].get(scores))
                {
                    xs.push(a);
                    ys.push(b);
                }
            }
            let r = if xs.len() < 2 {
                None
            } else {
                pearson(&xs, &ys).ok()
            };
            values[i][j] = r;
            values[j][i] = r;
        }
    }
    CorrelationMatrix {
        labels: ScoreKind::ALL.iter().map(|k| k.label()).collect(),
        values,
    }
}

/// Count and token-length statistics for one review component.
#[derive(Debug, Clone, Serialize)]
pub struct ComponentRow {
    pub component: &'static str,
    pub count_mean: f64,
    pub count_std: f64,
    pub length_mean: f64,
    pub length_std: f64,
    pub n_reviews: usize,
    pub n_items: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentStats {
    pub rows: Vec<ComponentRow>,
}

impl ComponentStats {
    pub fn row(&self, component: &str) -> &ComponentRow {
        self.rows
            .iter()
            .find(|r| r.component == component)
            .expect("known component")
    }

    /// Markdown table: Component | Number | Length (token), with counts at
    /// two decimals and token lengths as integers.
    pub fn to_markdown(&self) -> String {
        let mut s = String::from("| Component | Number | Length (token) |\n|---|---|---|\n");
        for row in &self.rows {
            s.push_str(&format!(
                "| {} | {:.2}±{:.2} | {:.0}±{:.0} |\n",
                row.component, row.count_mean, row.count_std, row.length_mean, row.length_std
            ));
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("component,count_mean,count_std,length_mean,length_std\n");
        for row in &self.rows {
            s.push_str(&format!(
                "{},{:.4},{:.4},{:.4},{:.4}\n",
                row.component, row.count_mean, row.count_std, row.length_mean, row.length_std
            ));
        }
        s
    }
}

type ComponentAccessor = fn(&crate::corpus::Review) -> &Vec<String>;

/// Per-component mean and std of per-review counts and per-item token
/// lengths, over every review in the corpus.
pub fn component_stats(corpus: &Corpus) -> ComponentStats {
    let components: [(&'static str, ComponentAccessor); 3] = [
        ("Pos. Arg.", |r| &r.pos_args),
        ("Neg. Arg.", |r| &r.neg_args),
        ("Questions", |r| &r.questions),
    ];
    let rows = components
        .into_iter()
        .map(|(name, accessor)| {
            let mut counts = Vec::new();
            let mut lengths = Vec::new();
            for submission in &corpus.submissions {
                for review in &submission.reviews {
                    let items = accessor(review);
                    counts.push(items.len() as f64);
                    for item in items {
                        lengths.push(text::tokenize_words(item).len() as f64);
                    }
                }
            }
            ComponentRow {
                component: name,
                count_mean: if counts.is_empty() {
                    f64::NAN
                } else {
                    mean(&counts)
                },
                count_std: sample_std(&counts),
                length_mean: if lengths.is_empty() {
                    f64::NAN
                } else {
                    mean(&lengths)
                },
                length_std: sample_std(&lengths),
                n_reviews: counts.len(),
                n_items: lengths.len(),
            }
        })
        .collect();
    ComponentStats { rows }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TTestResult {
    pub t: f64,
    pub df: f64,
    pub p_two_tailed: f64,
}

pub(crate) fn welch_statistic(a: &[f64], b: &[f64]) -> (f64, f64) {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (ma, mb) = (mean(a), mean(b));
    let va = sample_std(a).powi(2);
    let vb = sample_std(b).powi(2);
    let se2 = va / na + vb / nb;
    let t = (ma - mb) / se2.sqrt();
    let df = se2.powi(2) / ((va / na).powi(2) / (na - 1.0) + (vb / nb).powi(2) / (nb - 1.0));
    (t, df)
}

/// Welch's unequal-variance t-test with Welch–Satterthwaite degrees of
/// freedom and a two-tailed p-value.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<TTestResult> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::InvalidInput(
            "each sample needs at least 2 observations".to_string(),
        ));
    }
    if sample_std(a) == 0.0 || sample_std(b) == 0.0 {
        return Err(Error::InvalidInput("zero-variance sample".to_string()));
    }
    let (t, df) = welch_statistic(a, b);
    Ok(TTestResult {
        t,
        df,
        p_two_tailed: student_t_two_tailed(t, df),
    })
}

/// Student's pooled-variance t-test, for comparison with the Welch form.
pub fn student_t_test(a: &[f64], b: &[f64]) -> Result<TTestResult> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::InvalidInput(
            "each sample needs at least 2 observations".to_string(),
        ));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let va = sample_std(a).powi(2);
    let vb = sample_std(b).powi(2);
    if va == 0.0 && vb == 0.0 {
        return Err(Error::InvalidInput("zero-variance sample".to_string()));
    }
    let pooled = ((na - 1.0) * va + (nb - 1.0) * vb) / (na + nb - 2.0);
    let t = (mean(a) - mean(b)) / (pooled * (1.0 / na + 1.0 / nb)).sqrt();
    let df = na + nb - 2.0;
    Ok(TTestResult {
        t,
        df,
        p_two_tailed: student_t_two_tailed(t, df),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TTestKind {
    Welch,
    Student,
}

/// One ranked n-gram: tokens, G^2 value and document frequencies in the
/// focal (A) and contrast (B) corpora.
#[derive(Debug, Clone, Serialize)]
pub struct NgramEntry {
    pub tokens: Vec<String>,
    pub llr: f64,
    pub docs_a: usize,
    pub docs_b: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct NgramRanking {
    pub n: usize,
    pub entries: Vec<NgramEntry>,
}

impl NgramRanking {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("ngram,llr,docs_a,docs_b\n");
        for e in &self.entries {
            s.push_str(&format!(
                "{},{:.6},{},{}\n",
                e.tokens.join(" "),
                e.llr,
                e.docs_a,
                e.docs_b
            ));
        }
        s
    }
}

impl fmt::Display for NgramEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{:.3}", self.tokens.join(" "), self.llr)
    }
}

struct NgramCounts {
    occurrences: HashMap<Vec<String>, u64>,
    doc_freq: HashMap<Vec<String>, usize>,
    total: u64,
}

fn count_ngrams(docs: &[Vec<String>], n: usize) -> NgramCounts {
    let mut occurrences: HashMap<Vec<String>, u64> = HashMap::new();
    let mut doc_freq: HashMap<Vec<String>, usize> = HashMap::new();
    let mut total = 0u64;
    for doc in docs {
        if doc.len() < n {
            continue;
        }
        let mut seen: HashMap<&[String], ()> = HashMap::new();
        for window in doc.windows(n) {
            total += 1;
            *occurrences.entry(window.to_vec()).or_insert(0) += 1;
            seen.entry(window).or_insert(());
        }
        for gram in seen.into_keys() {
            *doc_freq.entry(gram.to_vec()).or_insert(0) += 1;
        }
    }
    NgramCounts {
        occurrences,
        doc_freq,
        total,
    }
}

fn g2_term(observed: f64, expected: f64) -> f64 {
    if observed == 0.0 {
        0.0
    } else {
        observed * (observed / expected).ln()
    }
}

/// Dunning's 2x2 log-likelihood ratio over occurrence counts of one n-gram
/// against all other n-gram tokens in corpora A and B.
pub fn g2_statistic(count_a: u64, total_a: u64, count_b: u64, total_b: u64) -> f64 {
    let (o11, o12) = (count_a as f64, count_b as f64);
    let (o21, o22) = ((total_a - count_a) as f64, (total_b - count_b) as f64);
    let n = (total_a + total_b) as f64;
    let row1 = o11 + o12;
    let row2 = o21 + o22;
    let (col1, col2) = (total_a as f64, total_b as f64);
    if n == 0.0 || row1 == 0.0 {
        return 0.0;
    }
    let g2 = 2.0
        * (g2_term(o11, row1 * col1 / n)
            + g2_term(o12, row1 * col2 / n)
            + g2_term(o21, row2 * col1 / n)
            + g2_term(o22, row2 * col2 / n));
    // Guard against tiny negative round-off; G^2 is non-negative.
    g2.max(0.0)
}

/// Rank the n-grams of the focal corpus A against contrast corpus B by G^2.
/// Only n-grams present in at least `min_docs` distinct documents of A and
/// not underrepresented in A are ranked; ties in G^2 break lexicographically.
pub fn llr_rank(
    docs_a: &[Vec<String>],
    docs_b: &[Vec<String>],
    n: usize,
    min_docs: usize,
) -> Result<NgramRanking> {
    if docs_a.is_empty() || docs_b.is_empty() {
        return Err(Error::InvalidInput(
            "both corpora must be non-empty".to_string(),
        ));
    }
    if n == 0 {
        return Err(Error::InvalidInput("n-gram order must be >= 1".to_string()));
    }
    if min_docs == 0 {
        return Err(Error::InvalidInput("min_docs must be >= 1".to_string()));
    }
    let a = count_ngrams(docs_a, n);
    let b = count_ngrams(docs_b, n);

    let mut entries: Vec<NgramEntry> = a
        .occurrences
        .iter()
        .filter_map(|(gram, &count_a)| {
            let docs_in_a = *a.doc_freq.get(gram).unwrap_or(&0);
            if docs_in_a < min_docs {
                return None;
            }
            let count_b = *b.occurrences.get(gram).unwrap_or(&0);
            // Keep n-grams overrepresented in A (ties included), comparing
            // relative frequencies by cross-multiplication.
            if (count_a as u128) * (b.total as u128) < (count_b as u128) * (a.total as u128) {
                return None;
            }
            Some(NgramEntry {
                tokens: gram.clone(),
                llr: g2_statistic(count_a, a.total, count_b, b.total),
                docs_a: docs_in_a,
                docs_b: *b.doc_freq.get(gram).unwrap_or(&0),
            })
        })
        .collect();
    entries.sort_by(|x, y| {
        y.llr
            .partial_cmp(&x.llr)
            .unwrap()
            .then_with(|| x.tokens.cmp(&y.tokens))
    });
    Ok(NgramRanking { n, entries })
}

#[derive(Debug, Clone, Serialize)]
pub struct HistogramBucket {
    pub start: i64,
    pub end: i64,
    pub count: usize,
}

/// Submission-time summary: a histogram, per-label mean submit times and a
/// two-tailed test between INC and DEC submission times.
#[derive(Debug, Clone, Serialize)]
pub struct TimeSummary {
    pub histogram: Vec<HistogramBucket>,
    /// Mean submit time (epoch seconds) for INC, DEC, KEEP.
    pub label_means: [Option<f64>; 3],
    pub inc_dec_test: Option<TTestResult>,
    pub not_computable: Option<String>,
}

pub fn time_summary(corpus: &Corpus, bucket_width_secs: i64, kind: TTestKind) -> TimeSummary {
    let mut times: [Vec<f64>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    let mut all_times: Vec<i64> = Vec::new();
    for (_, review) in corpus.labeled_reviews() {
        if let Some(t) = review.submit_time {
            let label = derive_label(review).expect("labeled review");
            times[label.index()].push(t as f64);
            all_times.push(t);
        }
    }

    let histogram = if all_times.is_empty() {
        Vec::new()
    } else {
        let min = *all_times.iter().min().unwrap();
        let max = *all_times.iter().max().unwrap();
        let width = bucket_width_secs.max(1);
        let n_buckets = ((max - min) / width + 1) as usize;
        let mut buckets: Vec<HistogramBucket> = (0..n_buckets)
            .map(|i| HistogramBucket {
                start: min + i as i64 * width,
                end: min + (i as i64 + 1) * width,
                count: 0,
            })
            .collect();
        for t in &all_times {
            let idx = ((t - min) / width) as usize;
            buckets[idx].count += 1;
        }
        buckets
    };

    let label_means = [
        (!times[0].is_empty()).then(|| mean(&times[0])),
        (!times[1].is_empty()).then(|| mean(&times[1])),
        (!times[2].is_empty()).then(|| mean(&times[2])),
    ];

    let (inc, dec) = (
        &times[UpdateLabel::Inc.index()],
        &times[UpdateLabel::Dec.index()],
    );
    let test = if inc.len() < 2 || dec.len() < 2 {
        Err(Error::InvalidInput(format!(
            "need >=2 timestamped reviews per label, got INC={} DEC={}",
            inc.len(),
            dec.len()
        )))
    } else {
        match kind {
            TTestKind::Welch => welch_t_test(inc, dec),
            TTestKind::Student => student_t_test(inc, dec),
        }
    };
    match test {
        Ok(t) => TimeSummary {
            histogram,
            label_means,
            inc_dec_test: Some(t),
            not_computable: None,
        },
        Err(e) => TimeSummary {
            histogram,
            label_means,
            inc_dec_test: None,
            not_computable: Some(e.to_string()),
        },
    }
}

fn heat_color(r: f64) -> String {
    // blue (-1) -> white (0) -> red (+1)
    let clamped = r.clamp(-1.0, 1.0);
    let (red, green, blue) = if clamped >= 0.0 {
        let k = (255.0 * (1.0 - clamped)) as u8;
        (255, k, k)
    } else {
        let k = (255.0 * (1.0 + clamped)) as u8;
        (k, k, 255)
    };
    format!("rgb({red},{green},{blue})")
}

/// Correlation heatmap as a standalone SVG: labeled grid, blue–white–red
/// scale, gray cells for undefined entries.
pub fn correlation_heatmap_svg(matrix: &CorrelationMatrix) -> String {
    const CELL: usize = 52;
    const MARGIN: usize = 60;
    let k = matrix.labels.len();
    let size = MARGIN + k * CELL + 10;
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" font-family=\"monospace\" font-size=\"11\">\n"
    );
    for (i, label) in matrix.labels.iter().enumerate() {
        let x = MARGIN + i * CELL + CELL / 2;
        s.push_str(&format!(
            "<text x=\"{x}\" y=\"{}\" text-anchor=\"middle\">{label}</text>\n",
            MARGIN - 8
        ));
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{label}</text>\n",
            MARGIN - 8,
            MARGIN + i * CELL + CELL / 2 + 4
        ));
    }
    for (i, row) in matrix.values.iter().enumerate() {
        for (j, value) in row.iter().enumerate() {
            let x = MARGIN + j * CELL;
            let y = MARGIN + i * CELL;
            let (fill, text) = match value {
                Some(r) => (heat_color(*r), format!("{r:.2}")),
                None => ("rgb(200,200,200)".to_string(), "—".to_string()),
            };
            s.push_str(&format!(
                "<rect x=\"{x}\" y=\"{y}\" width=\"{CELL}\" height=\"{CELL}\" fill=\"{fill}\" stroke=\"white\"/>\n"
            ));
            s.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{text}</text>\n",
                x + CELL / 2,
                y + CELL / 2 + 4
            ));
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Submission-time histogram as a standalone SVG bar chart.
pub fn time_histogram_svg(summary: &TimeSummary) -> String {
    const WIDTH: usize = 720;
    const HEIGHT: usize = 240;
    const BASE: usize = 200;
    let n = summary.histogram.len().max(1);
    let max_count = summary
        .histogram
        .iter()
        .map(|b| b.count)
        .max()
        .unwrap_or(0)
        .max(1);
    let bar_width = (WIDTH - 40) / n;
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" font-family=\"monospace\" font-size=\"10\">\n"
    );
    for (i, bucket) in summary.histogram.iter().enumerate() {
        let h = bucket.count * (BASE - 30) / max_count;
        let x = 20 + i * bar_width;
        let y = BASE - h;
        s.push_str(&format!(
            "<rect x=\"{x}\" y=\"{y}\" width=\"{}\" height=\"{h}\" fill=\"rgb(70,110,180)\"/>\n",
            bar_width.saturating_sub(2).max(1)
        ));
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            x + bar_width / 2,
            y.saturating_sub(4).max(10),
            bucket.count
        ));
    }
    s.push_str(&format!(
        "<text x=\"20\" y=\"{}\">{} buckets, max {max_count}</text>\n",
        BASE + 20,
        summary.histogram.len()
    ));
    s.push_str("</svg>\n");
    s
}
