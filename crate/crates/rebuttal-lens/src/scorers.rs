//! Sentence-level specificity, politeness and convincingness scoring.
//!
//! Two sources are supported behind one contract: transparent lexical
//! heuristics (the self-contained default) and precomputed per-sentence
//! score files produced by external models (the drop-in faithful path).
//! Scores are clamped to each kind's range: spec in [0,1], plt in [-1,1],
//! cvc in [0,1].

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::AuthorResponse;
use crate::error::{Error, Result};
use crate::stats::{mean, median, population_std};
use crate::text::{self, DIGIT_TOKEN};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScorerKind {
    Spec,
    Plt,
    Cvc,
}

impl ScorerKind {
    pub const ALL: [ScorerKind; 3] = [ScorerKind::Spec, ScorerKind::Plt, ScorerKind::Cvc];

    pub fn name(self) -> &'static str {
        match self {
            ScorerKind::Spec => "spec",
            ScorerKind::Plt => "plt",
            ScorerKind::Cvc => "cvc",
        }
    }

    pub fn range(self) -> (f64, f64) {
        match self {
            ScorerKind::Spec => (0.0, 1.0),
            ScorerKind::Plt => (-1.0, 1.0),
            ScorerKind::Cvc => (0.0, 1.0),
        }
    }
}

impl std::str::FromStr for ScorerKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_lowercase().as_str() {
            "spec" => Ok(ScorerKind::Spec),
            "plt" => Ok(ScorerKind::Plt),
            "cvc" => Ok(ScorerKind::Cvc),
            other => Err(Error::InvalidInput(format!(
                "unknown scorer kind `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SentenceScore {
    pub index: usize,
    pub kind: ScorerKind,
    pub value: f64,
}

/// A list of tokens or multi-token phrases, loaded from a plain-text file
/// (one entry per line, `#` comments).
#[derive(Debug, Clone)]
pub struct Lexicon {
    phrases: Vec<Vec<String>>,
}

impl Lexicon {
    pub fn parse(contents: &str) -> Self {
        let phrases = contents
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(text::tokenize_sentence)
            .filter(|p| !p.is_empty())
            .collect();
        Lexicon { phrases }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let contents = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Lexicon::parse(&contents))
    }

    pub fn len(&self) -> usize {
        self.phrases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phrases.is_empty()
    }

    /// Number of (possibly overlapping) phrase matches in a token sequence.
    pub fn hits(&self, tokens: &[String]) -> usize {
        let mut count = 0;
        for phrase in &self.phrases {
            if phrase.len() > tokens.len() {
                continue;
            }
            for window in tokens.windows(phrase.len()) {
                if window == phrase.as_slice() {
                    count += 1;
                }
            }
        }
        count
    }

    /// Whether the first word token of the sentence is a lexicon entry.
    pub fn opens_sentence(&self, tokens: &[String]) -> bool {
        match tokens.first() {
            Some(first) => self.phrases.iter().any(|p| p.len() == 1 && &p[0] == first),
            None => false,
        }
    }
}

/// The builtin lexical heuristics. Deterministic, pure functions of the
/// token sequence; lexicons ship as editable data files.
#[derive(Debug, Clone)]
pub struct HeuristicScorers {
    pub gratitude: Lexicon,
    pub negative: Lexicon,
    pub imperative: Lexicon,
    pub anchors: Lexicon,
    pub connectives: Lexicon,
}

impl Default for HeuristicScorers {
    fn default() -> Self {
        HeuristicScorers {
            gratitude: Lexicon::parse(include_str!("../data/lexicons/gratitude.txt")),
            negative: Lexicon::parse(include_str!("../data/lexicons/negative.txt")),
            imperative: Lexicon::parse(include_str!("../data/lexicons/imperative.txt")),
            anchors: Lexicon::parse(include_str!("../data/lexicons/anchors.txt")),
            connectives: Lexicon::parse(include_str!("../data/lexicons/connectives.txt")),
        }
    }
}

impl HeuristicScorers {
    /// Specificity rises with anchor-like evidence: DIGIT tokens, in-paper
    /// references and percentages. 1 - exp(-0.4 k) keeps it in [0, 1).
    pub fn spec_score(&self, tokens: &[String]) -> f64 {
        let digits = tokens.iter().filter(|t| *t == DIGIT_TOKEN).count();
        let anchors = self.anchors.hits(tokens);
        1.0 - (-0.4 * (digits + anchors) as f64).exp()
    }

    /// Politeness rises with gratitude markers and falls with negative
    /// markers and bare-imperative openings; tanh keeps it in [-1, 1].
    pub fn plt_score(&self, tokens: &[String]) -> f64 {
        let up = self.gratitude.hits(tokens) as f64;
        let mut down = self.negative.hits(tokens) as f64;
        if self.imperative.opens_sentence(tokens) {
            down += 1.0;
        }
        (0.8 * (up - down)).tanh()
    }

    /// Convincingness rises with in-paper anchors and evidence connectives.
    pub fn cvc_score(&self, tokens: &[String]) -> f64 {
        let k = self.anchors.hits(tokens) + self.connectives.hits(tokens);
        1.0 - (-0.35 * k as f64).exp()
    }

    pub fn score(&self, kind: ScorerKind, tokens: &[String]) -> f64 {
        match kind {
            ScorerKind::Spec => self.spec_score(tokens),
            ScorerKind::Plt => self.plt_score(tokens),
            ScorerKind::Cvc => self.cvc_score(tokens),
        }
    }
}

/// Per-sentence scores loaded from a CSV with columns
/// `submission_id, review_id, sentence_index, kind, value`.
#[derive(Debug, Clone, Default)]
pub struct PrecomputedScores {
    table: HashMap<(String, String, ScorerKind), HashMap<usize, f64>>,
}

impl PrecomputedScores {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let contents = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&contents)
    }

    pub fn parse(contents: &str) -> Result<Self> {
        let mut table: HashMap<(String, String, ScorerKind), HashMap<usize, f64>> = HashMap::new();
        for (idx, line) in contents.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if idx == 0 && line.starts_with("submission_id") {
                continue; // header
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 5 {
                return Err(Error::InvalidInput(format!(
                    "scores line {}: expected 5 fields, found {}",
                    idx + 1,
                    fields.len()
                )));
            }
            let kind: ScorerKind = fields[3].parse()?;
            let index: usize = fields[2].parse().map_err(|_| {
                Error::InvalidInput(format!("scores line {}: bad sentence index", idx + 1))
            })?;
            let value: f64 = fields[4]
                .parse()
                .map_err(|_| Error::InvalidInput(format!("scores line {}: bad value", idx + 1)))?;
            table
                .entry((fields[0].to_string(), fields[1].to_string(), kind))
                .or_default()
                .insert(index, value);
        }
        Ok(PrecomputedScores { table })
    }

    pub fn insert(
        &mut self,
        submission: &str,
        review: &str,
        kind: ScorerKind,
        index: usize,
        value: f64,
    ) {
        self.table
            .entry((submission.to_string(), review.to_string(), kind))
            .or_default()
            .insert(index, value);
    }

    fn get(&self, submission: &str, review: &str, kind: ScorerKind, index: usize) -> Option<f64> {
        self.table
            .get(&(submission.to_string(), review.to_string(), kind))
            .and_then(|m| m.get(&index))
            .copied()
    }
}

#[derive(Debug, Clone)]
pub enum ScorerSource {
    BuiltinHeuristic,
    PrecomputedFile(PrecomputedScores),
}

/// One scorer source per kind, plus the shared heuristics and the optional
/// minimum sentence length used to reproduce the qualitative ranking study.
#[derive(Debug, Clone)]
pub struct ScorerBindings {
    sources: [ScorerSource; 3],
    pub heuristics: HeuristicScorers,
    pub min_sentence_tokens: usize,
}

impl Default for ScorerBindings {
    fn default() -> Self {
        ScorerBindings {
            sources: [
                ScorerSource::BuiltinHeuristic,
                ScorerSource::BuiltinHeuristic,
                ScorerSource::BuiltinHeuristic,
            ],
            heuristics: HeuristicScorers::default(),
            min_sentence_tokens: 0,
        }
    }
}

impl ScorerBindings {
    pub fn with_precomputed(mut self, kind: ScorerKind, scores: PrecomputedScores) -> Self {
        self.sources[kind as usize] = ScorerSource::PrecomputedFile(scores);
        self
    }

    /// Bind the same precomputed file to all three kinds.
    pub fn all_precomputed(scores: PrecomputedScores) -> Self {
        ScorerBindings {
            sources: [
                ScorerSource::PrecomputedFile(scores.clone()),
                ScorerSource::PrecomputedFile(scores.clone()),
                ScorerSource::PrecomputedFile(scores),
            ],
            heuristics: HeuristicScorers::default(),
            min_sentence_tokens: 0,
        }
    }

    pub fn with_min_sentence_tokens(mut self, min: usize) -> Self {
        self.min_sentence_tokens = min;
        self
    }

    pub fn source(&self, kind: ScorerKind) -> &ScorerSource {
        &self.sources[kind as usize]
    }
}

/// Score every sentence of a response with the bound source for `kind`.
/// Sentence indices refer to positions in the response's sentence list;
/// sentences shorter than `min_sentence_tokens` are skipped.
pub fn score_response(
    response: &AuthorResponse,
    bindings: &ScorerBindings,
    kind: ScorerKind,
) -> Result<Vec<SentenceScore>> {
    if response.sentences.is_empty() {
        return Err(Error::InvalidInput(format!(
            "response ({}, {}) has no sentences",
            response.submission_id,
            response.review_id.as_deref().unwrap_or("-")
        )));
    }
    let (lo, hi) = kind.range();
    let mut out = Vec::new();
    for (index, sentence) in response.sentences.iter().enumerate() {
        let tokens = text::tokenize_sentence(sentence);
        if tokens.len() < bindings.min_sentence_tokens {
            continue;
        }
        let value = match bindings.source(kind) {
            ScorerSource::BuiltinHeuristic => bindings.heuristics.score(kind, &tokens),
            ScorerSource::PrecomputedFile(scores) => scores
                .get(
                    &response.submission_id,
                    response.review_id.as_deref().unwrap_or(""),
                    kind,
                    index,
                )
                .ok_or_else(|| Error::MissingPrecomputedScore {
                    submission: response.submission_id.clone(),
                    review: response.review_id.clone().unwrap_or_default(),
                    index,
                })?,
        };
        out.push(SentenceScore {
            index,
            kind,
            value: value.clamp(lo, hi),
        });
    }
    Ok(out)
}

/// The five aggregate statistics over sentence scores. Std is the
/// population form; the median averages the middle two for even counts.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScoreAggregate {
    pub max: f64,
    pub min: f64,
    pub mean: f64,
    pub median: f64,
    pub std: f64,
}

pub fn aggregate_scores(scores: &[SentenceScore]) -> Result<ScoreAggregate> {
    if scores.is_empty() {
        return Err(Error::InvalidInput(
            "no sentence scores to aggregate".to_string(),
        ));
    }
    let values: Vec<f64> = scores.iter().map(|s| s.value).collect();
    Ok(ScoreAggregate {
        max: values.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        min: values.iter().cloned().fold(f64::INFINITY, f64::min),
        mean: mean(&values),
        median: median(&values),
        std: population_std(&values),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn response(text: &str) -> AuthorResponse {
        AuthorResponse::new("s1", Some("r1"), text)
    }

    fn fake_scores(kind: ScorerKind, values: &[f64]) -> PrecomputedScores {
        let mut scores = PrecomputedScores::default();
        for (i, v) in values.iter().enumerate() {
            scores.insert("s1", "r1", kind, i, *v);
        }
        scores
    }

    #[test]
    fn precomputed_pass_through() {
        let resp = response("We fixed it.");
        let bindings = ScorerBindings::default()
            .with_precomputed(ScorerKind::Spec, fake_scores(ScorerKind::Spec, &[0.7]));
        let out = score_response(&resp, &bindings, ScorerKind::Spec).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].value, 0.7);
        assert_eq!(out[0].index, 0);
    }

    #[test]
    fn precomputed_missing_sentence_is_an_error() {
        let resp = response("First. Second.");
        let bindings = ScorerBindings::default()
            .with_precomputed(ScorerKind::Cvc, fake_scores(ScorerKind::Cvc, &[0.4]));
        let err = score_response(&resp, &bindings, ScorerKind::Cvc).unwrap_err();
        assert!(matches!(
            err,
            Error::MissingPrecomputedScore { index: 1, .. }
        ));
    }

    #[test]
    fn precomputed_values_are_clamped() {
        let resp = response("Only one sentence.");
        let bindings = ScorerBindings::default()
            .with_precomputed(ScorerKind::Spec, fake_scores(ScorerKind::Spec, &[3.0]));
        let out = score_response(&resp, &bindings, ScorerKind::Spec).unwrap();
        assert_eq!(out[0].value, 1.0);
    }

    #[test]
    fn csv_parse_roundtrip() {
        let csv = "submission_id,review_id,sentence_index,kind,value\n\
                   s1,r1,0,spec,0.25\ns1,r1,1,spec,0.5\ns1,r1,0,plt,-0.3\n";
        let scores = PrecomputedScores::parse(csv).unwrap();
        assert_eq!(scores.get("s1", "r1", ScorerKind::Spec, 1), Some(0.5));
        assert_eq!(scores.get("s1", "r1", ScorerKind::Plt, 0), Some(-0.3));
        assert_eq!(scores.get("s1", "r1", ScorerKind::Cvc, 0), None);
    }

    #[test]
    fn spec_heuristic_ranks_anchored_sentence_higher() {
        let bindings = ScorerBindings::default();
        // two DIGIT tokens and a table reference vs a vague promise of
        // equal token length
        let anchored = response("We report 92 and 95 in Table.");
        let vague = response("We will try this again and then.");
        let a = score_response(&anchored, &bindings, ScorerKind::Spec).unwrap()[0].value;
        let v = score_response(&vague, &bindings, ScorerKind::Spec).unwrap()[0].value;
        assert!(a > v, "anchored {a} should beat vague {v}");
        assert!(v == 0.0);
    }

    #[test]
    fn plt_heuristic_orders_gratitude_above_dismissal() {
        let bindings = ScorerBindings::default();
        let polite = response("Thank you for the helpful suggestion");
        let rude = response("This is simply wrong.");
        let p = score_response(&polite, &bindings, ScorerKind::Plt).unwrap()[0].value;
        let r = score_response(&rude, &bindings, ScorerKind::Plt).unwrap()[0].value;
        assert!(p > r, "polite {p} should beat rude {r}");
        assert!(p > 0.0 && r < 0.0);
    }

    #[test]
    fn cvc_heuristic_rewards_anchors_and_connectives() {
        let bindings = ScorerBindings::default();
        let convincing =
            response("Because Table 3 shows gains, we therefore report it in line 20.");
        let flat = response("We acknowledge your remark about the paper.");
        let c = score_response(&convincing, &bindings, ScorerKind::Cvc).unwrap()[0].value;
        let f = score_response(&flat, &bindings, ScorerKind::Cvc).unwrap()[0].value;
        assert!(c > f);
    }

    #[test]
    fn heuristic_monotonicity_contracts() {
        let h = HeuristicScorers::default();
        let base = text::tokenize_sentence("we updated the results");
        // spec strictly increases with each added DIGIT token
        let mut prev = h.spec_score(&base);
        let mut tokens = base.clone();
        for _ in 0..4 {
            tokens.push(DIGIT_TOKEN.to_string());
            let next = h.spec_score(&tokens);
            assert!(next > prev);
            prev = next;
        }
        // plt increases with gratitude hits, decreases with negative hits
        let mut tokens = base.clone();
        let mut prev = h.plt_score(&tokens);
        for _ in 0..3 {
            tokens.push("thanks".to_string());
            let next = h.plt_score(&tokens);
            assert!(next > prev);
            prev = next;
        }
        let mut tokens = base.clone();
        let mut prev = h.plt_score(&tokens);
        for _ in 0..3 {
            tokens.push("wrong".to_string());
            let next = h.plt_score(&tokens);
            assert!(next < prev);
            prev = next;
        }
        // bare imperative opening lowers plt
        let imperative = text::tokenize_sentence("see the appendix");
        let declarative = text::tokenize_sentence("appendix the see");
        assert!(h.plt_score(&imperative) < h.plt_score(&declarative));
        // cvc increases with anchors and connectives
        let mut tokens = base.clone();
        let mut prev = h.cvc_score(&tokens);
        for w in ["table", "because", "line"] {
            tokens.push(w.to_string());
            let next = h.cvc_score(&tokens);
            assert!(next > prev);
            prev = next;
        }
    }

    #[test]
    fn min_sentence_tokens_filters() {
        let resp =
            response("Too short. This sentence clearly has more than ten tokens in total, yes.");
        let bindings = ScorerBindings::default().with_min_sentence_tokens(10);
        let out = score_response(&resp, &bindings, ScorerKind::Spec).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].index, 1);
    }

    #[test]
    fn aggregate_singleton_and_pair() {
        let single = [SentenceScore {
            index: 0,
            kind: ScorerKind::Spec,
            value: 0.5,
        }];
        let a = aggregate_scores(&single).unwrap();
        assert_eq!(
            (a.max, a.min, a.mean, a.median, a.std),
            (0.5, 0.5, 0.5, 0.5, 0.0)
        );

        let pair = [
            SentenceScore {
                index: 0,
                kind: ScorerKind::Spec,
                value: 0.0,
            },
            SentenceScore {
                index: 1,
                kind: ScorerKind::Spec,
                value: 1.0,
            },
        ];
        let a = aggregate_scores(&pair).unwrap();
        assert_eq!((a.mean, a.median, a.std), (0.5, 0.5, 0.5));
    }

    #[test]
    fn aggregate_matches_direct_computation() {
        let values = [0.1, 0.4, 0.4, 0.9];
        let scores: Vec<SentenceScore> = values
            .iter()
            .enumerate()
            .map(|(i, &v)| SentenceScore {
                index: i,
                kind: ScorerKind::Spec,
                value: v,
            })
            .collect();
        let a = aggregate_scores(&scores).unwrap();
        assert_eq!(a.max, 0.9);
        assert_eq!(a.min, 0.1);
        assert!((a.mean - 0.45).abs() < 1e-12);
        assert!((a.median - 0.4).abs() < 1e-12);
        let var = values.iter().map(|v| (v - 0.45f64).powi(2)).sum::<f64>() / 4.0;
        assert!((a.std - var.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn aggregate_empty_is_an_error() {
        assert!(aggregate_scores(&[]).is_err());
    }

    proptest! {
        #[test]
        fn aggregates_respect_bounds(values in proptest::collection::vec(0.0..1.0f64, 1..12)) {
            let scores: Vec<SentenceScore> = values
                .iter()
                .enumerate()
                .map(|(i, &v)| SentenceScore { index: i, kind: ScorerKind::Spec, value: v })
                .collect();
            let a = aggregate_scores(&scores).unwrap();
            prop_assert!(a.max >= a.mean && a.mean >= a.min);
            prop_assert!(a.std >= 0.0);
            prop_assert!((0.0..=1.0).contains(&a.max));
            prop_assert!((0.0..=1.0).contains(&a.min));
            prop_assert!((0.0..=1.0).contains(&a.median));
        }

        #[test]
        fn builtin_scores_stay_in_range(words in proptest::collection::vec("[a-z]{1,8}", 1..15)) {
            let h = HeuristicScorers::default();
            let tokens: Vec<String> = words;
            for kind in ScorerKind::ALL {
                let (lo, hi) = kind.range();
                let v = h.score(kind, &tokens);
                prop_assert!(v >= lo && v <= hi);
            }
        }
    }
}
