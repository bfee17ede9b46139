//! Review-corpus data model: ingestion, validation, labeling, update
//! tabulation and subset selection.
//!
//! The on-disk format is JSONL with one submission object per line; unknown
//! keys are ignored and record order is preserved. A corpus is immutable
//! after ingestion and safe to share across analysis tasks.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::SentenceSplitter;

pub const SCHEMA_VERSION: u32 = 1;

pub const OVAL_RANGE: (i32, i32) = (1, 6);
pub const ASPECT_RANGE: (i32, i32) = (1, 5);

/// The seven scores attached to a review. `oval` is in [1,6]; `conf` and the
/// optional aspect scores are in [1,5].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReviewScores {
    pub oval: i32,
    pub conf: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snd: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sbs: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub org: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cmp: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rdb: Option<i32>,
}

impl ReviewScores {
    pub fn new(oval: i32, conf: i32) -> Self {
        ReviewScores {
            oval,
            conf,
            snd: None,
            sbs: None,
            org: None,
            cmp: None,
            rdb: None,
        }
    }

    pub fn aspects(&self) -> [(&'static str, Option<i32>); 5] {
        [
            ("snd", self.snd),
            ("sbs", self.sbs),
            ("org", self.org),
            ("cmp", self.cmp),
            ("rdb", self.rdb),
        ]
    }
}

/// One review, holding before- and after-rebuttal scores plus the structured
/// review text. `before` is absent for reviews submitted after the rebuttal
/// started.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Review {
    pub review_id: String,
    #[serde(default)]
    pub submission_id: String,
    pub reviewer_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub before: Option<ReviewScores>,
    pub after: ReviewScores,
    #[serde(default)]
    pub pos_args: Vec<String>,
    #[serde(default)]
    pub neg_args: Vec<String>,
    #[serde(default)]
    pub questions: Vec<String>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub other_text: String,
    /// UTC epoch seconds of the first submission of the review.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub submit_time: Option<i64>,
}

/// Which review sections enter the full review text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SectionMask {
    pub pos_args: bool,
    pub neg_args: bool,
    pub questions: bool,
    pub other_text: bool,
}

impl Default for SectionMask {
    fn default() -> Self {
        SectionMask {
            pos_args: true,
            neg_args: true,
            questions: true,
            other_text: true,
        }
    }
}

impl Review {
    /// Concatenate the selected review sections into one text.
    pub fn section_text(&self, mask: SectionMask) -> String {
        let mut parts: Vec<&str> = Vec::new();
        if mask.pos_args {
            parts.extend(self.pos_args.iter().map(String::as_str));
        }
        if mask.neg_args {
            parts.extend(self.neg_args.iter().map(String::as_str));
        }
        if mask.questions {
            parts.extend(self.questions.iter().map(String::as_str));
        }
        if mask.other_text && !self.other_text.is_empty() {
            parts.push(&self.other_text);
        }
        parts.join("\n")
    }
}

/// An author response, optionally aligned to one review of the submission.
/// `sentences` is derived at ingestion time and not serialized.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuthorResponse {
    #[serde(default)]
    pub submission_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub review_id: Option<String>,
    pub text: String,
    #[serde(skip)]
    pub sentences: Vec<String>,
}

impl AuthorResponse {
    pub fn new(submission_id: &str, review_id: Option<&str>, text: &str) -> Self {
        let mut r = AuthorResponse {
            submission_id: submission_id.to_string(),
            review_id: review_id.map(|s| s.to_string()),
            text: text.to_string(),
            sentences: Vec::new(),
        };
        r.derive_sentences(&SentenceSplitter::default());
        r
    }

    pub fn derive_sentences(&mut self, splitter: &SentenceSplitter) {
        self.sentences = splitter.split(&self.text);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PaperType {
    Long,
    Short,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Accept,
    Reject,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeaknessLabel {
    Evaluation,
    Writing,
    Novelty,
    Data,
    Motivation,
    Technical,
    Other,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Submission {
    pub submission_id: String,
    pub paper_type: PaperType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decision: Option<Decision>,
    pub reviews: Vec<Review>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub responses: Vec<AuthorResponse>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weakness_labels: Option<Vec<WeaknessLabel>>,
}

impl Submission {
    /// Reviews carrying before-rebuttal scores.
    pub fn labeled_reviews(&self) -> impl Iterator<Item = &Review> {
        self.reviews.iter().filter(|r| r.before.is_some())
    }

    /// Mean before-rebuttal OVAL over reviews that have one.
    pub fn mean_before_oval(&self) -> Option<f64> {
        let vals: Vec<f64> = self
            .labeled_reviews()
            .map(|r| r.before.unwrap().oval as f64)
            .collect();
        if vals.is_empty() {
            None
        } else {
            Some(vals.iter().sum::<f64>() / vals.len() as f64)
        }
    }

    /// Responses aligned to a review: responses naming this review id first,
    /// otherwise responses with no review id (general responses).
    pub fn aligned_response(&self, review_id: &str) -> Option<&AuthorResponse> {
        self.responses
            .iter()
            .find(|r| r.review_id.as_deref() == Some(review_id))
            .or_else(|| self.responses.iter().find(|r| r.review_id.is_none()))
    }
}

/// Whether a reviewer increased, decreased or kept her overall score.
/// Class order is INC, DEC, KEEP everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UpdateLabel {
    #[serde(rename = "INC")]
    Inc,
    #[serde(rename = "DEC")]
    Dec,
    #[serde(rename = "KEEP")]
    Keep,
}

impl UpdateLabel {
    pub const ALL: [UpdateLabel; 3] = [UpdateLabel::Inc, UpdateLabel::Dec, UpdateLabel::Keep];

    pub fn index(self) -> usize {
        match self {
            UpdateLabel::Inc => 0,
            UpdateLabel::Dec => 1,
            UpdateLabel::Keep => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            UpdateLabel::Inc => "INC",
            UpdateLabel::Dec => "DEC",
            UpdateLabel::Keep => "KEEP",
        }
    }

    pub fn from_index(i: usize) -> UpdateLabel {
        UpdateLabel::ALL[i]
    }
}

impl fmt::Display for UpdateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    pub source: String,
    pub schema_version: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Corpus {
    pub submissions: Vec<Submission>,
    pub provenance: Provenance,
}

impl Corpus {
    pub fn new(submissions: Vec<Submission>, source: &str) -> Self {
        Corpus {
            submissions,
            provenance: Provenance {
                source: source.to_string(),
                schema_version: SCHEMA_VERSION,
            },
        }
    }

    pub fn len(&self) -> usize {
        self.submissions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.submissions.is_empty()
    }

    /// All (submission, review) pairs with before-rebuttal scores.
    pub fn labeled_reviews(&self) -> impl Iterator<Item = (&Submission, &Review)> {
        self.submissions
            .iter()
            .flat_map(|s| s.labeled_reviews().map(move |r| (s, r)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Jsonl,
}

/// Read a JSONL corpus. Errors name the offending line; duplicate submission
/// ids are rejected. Blank lines are skipped.
pub fn ingest_corpus(path: impl AsRef<Path>, _format: Format) -> Result<Corpus> {
    let path = path.as_ref();
    let contents = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut submissions = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    let splitter = SentenceSplitter::default();
    for (idx, line) in contents.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut submission: Submission =
            serde_json::from_str(line).map_err(|e| Error::CorpusParse {
                line: lineno,
                message: e.to_string(),
            })?;
        if !seen.insert(submission.submission_id.clone()) {
            return Err(Error::DuplicateSubmission {
                id: submission.submission_id,
            });
        }
        normalize_submission(&mut submission, &splitter);
        submissions.push(submission);
    }
    Ok(Corpus::new(submissions, &path.display().to_string()))
}

fn normalize_submission(submission: &mut Submission, splitter: &SentenceSplitter) {
    for review in &mut submission.reviews {
        if review.submission_id.is_empty() {
            review.submission_id = submission.submission_id.clone();
        }
    }
    for response in &mut submission.responses {
        if response.submission_id.is_empty() {
            response.submission_id = submission.submission_id.clone();
        }
        response.derive_sentences(splitter);
    }
}

/// Write a corpus as JSONL, one submission per line, preserving order.
pub fn write_jsonl(corpus: &Corpus, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for submission in &corpus.submissions {
        let line = serde_json::to_string(submission).expect("submission serializes");
        writeln!(w, "{line}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// A data-quality finding. Violations are data, not failures.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Violation {
    ScoreRange {
        submission_id: String,
        review_id: String,
        field: String,
        value: i32,
        side: &'static str,
    },
    /// An aspect score moved against the direction of the OVAL update.
    AspectInconsistency {
        submission_id: String,
        review_id: String,
        aspect: &'static str,
        oval_delta: i32,
        aspect_delta: i32,
    },
    DanglingResponse {
        submission_id: String,
        review_id: String,
    },
    MismatchedSubmissionId {
        submission_id: String,
        review_id: String,
    },
    EmptyReviews {
        submission_id: String,
    },
    EmptyResponse {
        submission_id: String,
        review_id: Option<String>,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ScoreRange {
                submission_id,
                review_id,
                field,
                value,
                side,
            } => write!(
                f,
                "{submission_id}/{review_id}: {side} {field}={value} out of range"
            ),
            Violation::AspectInconsistency {
                submission_id,
                review_id,
                aspect,
                oval_delta,
                aspect_delta,
            } => write!(
                f,
                "{submission_id}/{review_id}: {aspect} moved {aspect_delta:+} against oval {oval_delta:+}"
            ),
            Violation::DanglingResponse {
                submission_id,
                review_id,
            } => write!(
                f,
                "{submission_id}: response targets unknown review `{review_id}`"
            ),
            Violation::MismatchedSubmissionId {
                submission_id,
                review_id,
            } => write!(
                f,
                "{submission_id}: review `{review_id}` carries a different submission id"
            ),
            Violation::EmptyReviews { submission_id } => {
                write!(f, "{submission_id}: no reviews")
            }
            Violation::EmptyResponse {
                submission_id,
                review_id,
            } => write!(
                f,
                "{submission_id}: empty response (review {})",
                review_id.as_deref().unwrap_or("-")
            ),
        }
    }
}

fn check_ranges(
    submission_id: &str,
    review_id: &str,
    scores: &ReviewScores,
    side: &'static str,
    out: &mut Vec<Violation>,
) {
    let mut push = |field: &str, value: i32, range: (i32, i32)| {
        if value < range.0 || value > range.1 {
            out.push(Violation::ScoreRange {
                submission_id: submission_id.to_string(),
                review_id: review_id.to_string(),
                field: field.to_string(),
                value,
                side,
            });
        }
    };
    push("oval", scores.oval, OVAL_RANGE);
    push("conf", scores.conf, ASPECT_RANGE);
    for (name, value) in scores.aspects() {
        if let Some(v) = value {
            push(name, v, ASPECT_RANGE);
        }
    }
}

/// Check score ranges, aspect/OVAL update consistency, response→review
/// links and basic structural invariants. Returns every violation found.
pub fn validate(corpus: &Corpus) -> Vec<Violation> {
    let mut out = Vec::new();
    for submission in &corpus.submissions {
        if submission.reviews.is_empty() {
            out.push(Violation::EmptyReviews {
                submission_id: submission.submission_id.clone(),
            });
        }
        let review_ids: HashSet<&str> = submission
            .reviews
            .iter()
            .map(|r| r.review_id.as_str())
            .collect();
        for review in &submission.reviews {
            if !review.submission_id.is_empty() && review.submission_id != submission.submission_id
            {
                out.push(Violation::MismatchedSubmissionId {
                    submission_id: submission.submission_id.clone(),
                    review_id: review.review_id.clone(),
                });
            }
            check_ranges(
                &submission.submission_id,
                &review.review_id,
                &review.after,
                "after",
                &mut out,
            );
            if let Some(before) = &review.before {
                check_ranges(
                    &submission.submission_id,
                    &review.review_id,
                    before,
                    "before",
                    &mut out,
                );
                let oval_delta = review.after.oval - before.oval;
                if oval_delta != 0 {
                    for ((name, b), (_, a)) in
                        before.aspects().into_iter().zip(review.after.aspects())
                    {
                        if let (Some(b), Some(a)) = (b, a) {
                            let aspect_delta = a - b;
                            // When OVAL increases no aspect may decrease,
                            // and symmetrically for decreases.
                            if aspect_delta != 0 && aspect_delta.signum() != oval_delta.signum() {
                                out.push(Violation::AspectInconsistency {
                                    submission_id: submission.submission_id.clone(),
                                    review_id: review.review_id.clone(),
                                    aspect: name,
                                    oval_delta,
                                    aspect_delta,
                                });
                            }
                        }
                    }
                }
            }
        }
        for response in &submission.responses {
            if let Some(rid) = &response.review_id {
                if !review_ids.contains(rid.as_str()) {
                    out.push(Violation::DanglingResponse {
                        submission_id: submission.submission_id.clone(),
                        review_id: rid.clone(),
                    });
                }
            }
            if crate::text::tokenize_words(&response.text).is_empty() {
                out.push(Violation::EmptyResponse {
                    submission_id: submission.submission_id.clone(),
                    review_id: response.review_id.clone(),
                });
            }
        }
    }
    out
}

/// Map the sign of (after − before) OVAL to INC/DEC/KEEP.
pub fn derive_label(review: &Review) -> Result<UpdateLabel> {
    let before = review.before.as_ref().ok_or(Error::UnlabeledReview)?;
    Ok(match review.after.oval.cmp(&before.oval) {
        std::cmp::Ordering::Greater => UpdateLabel::Inc,
        std::cmp::Ordering::Less => UpdateLabel::Dec,
        std::cmp::Ordering::Equal => UpdateLabel::Keep,
    })
}

/// One row of the update summary table.
#[derive(Debug, Clone, Serialize)]
pub struct UpdateRow {
    pub label: String,
    pub reviews: usize,
    /// INC/DEC rows: papers with at least one such review. KEEP row: papers
    /// whose labeled reviews all kept their score. Total: papers with at
    /// least one labeled review.
    pub papers: usize,
    pub accepted_papers: usize,
    pub papers_with_decision: usize,
    pub mean_before_oval: f64,
    pub mean_after_oval: f64,
}

impl UpdateRow {
    pub fn acceptance_rate(&self) -> Option<f64> {
        if self.papers_with_decision == 0 {
            None
        } else {
            Some(self.accepted_papers as f64 / self.papers_with_decision as f64)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct UpdateTable {
    pub rows: Vec<UpdateRow>,
}

impl UpdateTable {
    pub fn row(&self, label: &str) -> &UpdateRow {
        self.rows
            .iter()
            .find(|r| r.label == label)
            .expect("known row label")
    }

    /// Markdown table mirroring the update-statistics layout:
    /// Type | Num. | #Paper | Acpt.% | OVAL delta.
    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        s.push_str("| Type | Num. | #Paper | Acpt.% | OVAL |\n");
        s.push_str("|---|---|---|---|---|\n");
        for row in &self.rows {
            let rate = row
                .acceptance_rate()
                .map(|r| format!("{:.1}", 100.0 * r))
                .unwrap_or_else(|| "-".to_string());
            s.push_str(&format!(
                "| {} | {} | {} | {} | {:.2} -> {:.2} |\n",
                row.label, row.reviews, row.papers, rate, row.mean_before_oval, row.mean_after_oval
            ));
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("type,reviews,papers,acceptance_pct,mean_before,mean_after\n");
        for row in &self.rows {
            let rate = row
                .acceptance_rate()
                .map(|r| format!("{:.1}", 100.0 * r))
                .unwrap_or_default();
            s.push_str(&format!(
                "{},{},{},{},{:.2},{:.2}\n",
                row.label, row.reviews, row.papers, rate, row.mean_before_oval, row.mean_after_oval
            ));
        }
        s
    }
}

/// Tabulate score updates per label: review counts, paper counts,
/// acceptance rates and mean before/after OVAL.
pub fn tabulate_updates(corpus: &Corpus) -> UpdateTable {
    // index 0..3: INC, DEC, KEEP, Total
    let mut reviews = [0usize; 4];
    let mut before_sum = [0i64; 4];
    let mut after_sum = [0i64; 4];
    let mut papers = [0usize; 4];
    let mut accepted = [0usize; 4];
    let mut with_decision = [0usize; 4];

    for submission in &corpus.submissions {
        let mut has = [false; 3];
        let mut any_labeled = false;
        for review in submission.labeled_reviews() {
            any_labeled = true;
            let label = derive_label(review).expect("labeled review");
            let i = label.index();
            has[i] = true;
            reviews[i] += 1;
            reviews[3] += 1;
            let b = review.before.unwrap().oval as i64;
            let a = review.after.oval as i64;
            before_sum[i] += b;
            after_sum[i] += a;
            before_sum[3] += b;
            after_sum[3] += a;
        }
        if !any_labeled {
            continue;
        }
        // Paper membership: INC/DEC rows take papers with >=1 such review;
        // the KEEP row takes papers with no score update at all.
        let keep_paper = !has[0] && !has[1];
        let memberships = [has[0], has[1], keep_paper, true];
        for (i, member) in memberships.into_iter().enumerate() {
            if member {
                papers[i] += 1;
                if let Some(decision) = submission.decision {
                    with_decision[i] += 1;
                    if decision == Decision::Accept {
                        accepted[i] += 1;
                    }
                }
            }
        }
    }

    let labels = ["INC", "DEC", "KEEP", "Total"];
    let rows = (0..4)
        .map(|i| UpdateRow {
            label: labels[i].to_string(),
            reviews: reviews[i],
            papers: papers[i],
            accepted_papers: accepted[i],
            papers_with_decision: with_decision[i],
            mean_before_oval: if reviews[i] == 0 {
                f64::NAN
            } else {
                before_sum[i] as f64 / reviews[i] as f64
            },
            mean_after_oval: if reviews[i] == 0 {
                f64::NAN
            } else {
                after_sum[i] as f64 / reviews[i] as f64
            },
        })
        .collect();
    UpdateTable { rows }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subset {
    Full,
    Brd,
}

impl Subset {
    pub fn name(self) -> &'static str {
        match self {
            Subset::Full => "full",
            Subset::Brd => "brd",
        }
    }
}

impl std::str::FromStr for Subset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_lowercase().as_str() {
            "full" => Ok(Subset::Full),
            "brd" => Ok(Subset::Brd),
            other => Err(Error::InvalidInput(format!("unknown subset `{other}`"))),
        }
    }
}

pub const BRD_BOUNDS: (f64, f64) = (3.0, 4.5);

/// Full: submissions with at least one response and three or more reviews
/// with before-rebuttal scores. BRD additionally requires the mean
/// before-rebuttal OVAL to lie in the given inclusive interval.
pub fn select_subset_with_bounds(corpus: &Corpus, subset: Subset, bounds: (f64, f64)) -> Corpus {
    let submissions = corpus
        .submissions
        .iter()
        .filter(|s| {
            let complete = !s.responses.is_empty()
                && s.reviews.iter().filter(|r| r.before.is_some()).count() >= 3;
            match subset {
                Subset::Full => complete,
                Subset::Brd => {
                    complete
                        && s.mean_before_oval()
                            .is_some_and(|m| m >= bounds.0 && m <= bounds.1)
                }
            }
        })
        .cloned()
        .collect();
    Corpus {
        submissions,
        provenance: corpus.provenance.clone(),
    }
}

pub fn select_subset(corpus: &Corpus, subset: Subset) -> Corpus {
    select_subset_with_bounds(corpus, subset, BRD_BOUNDS)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn scores(oval: i32) -> ReviewScores {
        ReviewScores::new(oval, 3)
    }

    pub(crate) fn review(id: &str, before: Option<i32>, after: i32) -> Review {
        Review {
            review_id: id.to_string(),
            submission_id: String::new(),
            reviewer_id: format!("rev-{id}"),
            before: before.map(scores),
            after: scores(after),
            pos_args: vec![],
            neg_args: vec![],
            questions: vec![],
            other_text: String::new(),
            submit_time: None,
        }
    }

    pub(crate) fn submission(id: &str, reviews: Vec<Review>, responses: usize) -> Submission {
        let responses = (0..responses)
            .map(|i| {
                let rid = reviews.get(i).map(|r| r.review_id.clone());
                AuthorResponse::new(
                    id,
                    rid.as_deref(),
                    "We thank the reviewers. We will fix it.",
                )
            })
            .collect();
        Submission {
            submission_id: id.to_string(),
            paper_type: PaperType::Long,
            decision: None,
            reviews,
            responses,
            weakness_labels: None,
        }
    }

    fn write_temp(lines: &[&str]) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        for line in lines {
            writeln!(f, "{line}").unwrap();
        }
        f
    }

    #[test]
    fn ingest_empty_file() {
        let f = write_temp(&[]);
        let corpus = ingest_corpus(f.path(), Format::Jsonl).unwrap();
        assert_eq!(corpus.len(), 0);
    }

    #[test]
    fn ingest_resolves_links() {
        let line = r#"{"submission_id":"s1","paper_type":"long","decision":"accept",
            "reviews":[
              {"review_id":"r1","reviewer_id":"a","before":{"oval":3,"conf":4},"after":{"oval":4,"conf":4},"pos_args":["good idea"],"neg_args":[],"questions":[]},
              {"review_id":"r2","reviewer_id":"b","after":{"oval":3,"conf":3},"pos_args":[],"neg_args":["weak eval"],"questions":["why?"]},
              {"review_id":"r3","reviewer_id":"c","before":{"oval":2,"conf":2},"after":{"oval":2,"conf":2}}],
            "responses":[{"review_id":"r1","text":"Thanks. We added Table 2."}]}"#
            .replace('\n', " ");
        let f = write_temp(&[&line]);
        let corpus = ingest_corpus(f.path(), Format::Jsonl).unwrap();
        assert_eq!(corpus.len(), 1);
        let s = &corpus.submissions[0];
        assert_eq!(s.reviews.len(), 3);
        assert_eq!(s.responses.len(), 1);
        assert_eq!(s.reviews[0].submission_id, "s1");
        assert_eq!(s.responses[0].submission_id, "s1");
        assert_eq!(s.responses[0].sentences.len(), 2);
    }

    #[test]
    fn ingest_reports_malformed_line_number() {
        let good = r#"{"submission_id":"s1","paper_type":"long","reviews":[{"review_id":"r1","reviewer_id":"a","after":{"oval":3,"conf":3}}]}"#;
        let bad = r#"{"submission_id":"s2","paper_type":"long","reviews":[{"review_id":"r1","reviewer_id":"a","after":{"conf":3}}]}"#;
        let f = write_temp(&[good, bad]);
        let err = ingest_corpus(f.path(), Format::Jsonl).unwrap_err();
        match err {
            Error::CorpusParse { line, message } => {
                assert_eq!(line, 2);
                assert!(message.contains("oval"), "message: {message}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn ingest_rejects_duplicate_ids() {
        let line = r#"{"submission_id":"s1","paper_type":"long","reviews":[{"review_id":"r1","reviewer_id":"a","after":{"oval":3,"conf":3}}]}"#;
        let f = write_temp(&[line, line]);
        let err = ingest_corpus(f.path(), Format::Jsonl).unwrap_err();
        assert!(matches!(err, Error::DuplicateSubmission { id } if id == "s1"));
    }

    #[test]
    fn ingest_ignores_unknown_keys_and_preserves_order() {
        let a = r#"{"submission_id":"s1","paper_type":"long","mystery":42,"reviews":[{"review_id":"r1","reviewer_id":"a","after":{"oval":3,"conf":3},"extra":"x"}]}"#;
        let b = r#"{"submission_id":"s2","paper_type":"short","reviews":[{"review_id":"r1","reviewer_id":"a","after":{"oval":5,"conf":3}}]}"#;
        let f = write_temp(&[a, b]);
        let corpus = ingest_corpus(f.path(), Format::Jsonl).unwrap();
        assert_eq!(corpus.submissions[0].submission_id, "s1");
        assert_eq!(corpus.submissions[1].submission_id, "s2");
    }

    #[test]
    fn roundtrip_is_fixed_point() {
        let line = r#"{"submission_id":"s1","paper_type":"long","decision":"reject","reviews":[{"review_id":"r1","reviewer_id":"a","before":{"oval":3,"conf":4,"snd":2},"after":{"oval":4,"conf":4,"snd":3},"pos_args":["p"],"neg_args":["n"],"questions":[],"submit_time":1000}],"responses":[{"review_id":"r1","text":"Thanks."}],"weakness_labels":["Evaluation","Data"]}"#;
        let f = write_temp(&[line]);
        let corpus1 = ingest_corpus(f.path(), Format::Jsonl).unwrap();
        let out1 = tempfile::NamedTempFile::new().unwrap();
        write_jsonl(&corpus1, out1.path()).unwrap();
        let corpus2 = ingest_corpus(out1.path(), Format::Jsonl).unwrap();
        let out2 = tempfile::NamedTempFile::new().unwrap();
        write_jsonl(&corpus2, out2.path()).unwrap();
        let b1 = std::fs::read(out1.path()).unwrap();
        let b2 = std::fs::read(out2.path()).unwrap();
        assert_eq!(b1, b2);
    }

    #[test]
    fn validate_flags_out_of_range() {
        let mut sub = submission("s1", vec![review("r1", None, 3)], 0);
        sub.reviews[0].after.oval = 7;
        let corpus = Corpus::new(vec![sub], "test");
        let violations = validate(&corpus);
        assert_eq!(violations.len(), 1);
        assert!(matches!(
            &violations[0],
            Violation::ScoreRange { field, value: 7, .. } if field == "oval"
        ));
    }

    #[test]
    fn validate_flags_aspect_inconsistency() {
        let mut sub = submission("s1", vec![review("r1", Some(3), 4)], 0);
        sub.reviews[0].before.as_mut().unwrap().snd = Some(4);
        sub.reviews[0].after.snd = Some(3);
        let corpus = Corpus::new(vec![sub], "test");
        let violations = validate(&corpus);
        assert_eq!(violations.len(), 1);
        assert!(matches!(
            &violations[0],
            Violation::AspectInconsistency {
                aspect: "snd",
                oval_delta: 1,
                aspect_delta: -1,
                ..
            }
        ));
    }

    #[test]
    fn validate_flags_dangling_response() {
        let mut sub = submission("s1", vec![review("r1", Some(3), 3)], 1);
        sub.responses[0].review_id = Some("missing".to_string());
        let corpus = Corpus::new(vec![sub], "test");
        let violations = validate(&corpus);
        assert_eq!(violations.len(), 1);
        assert!(matches!(&violations[0], Violation::DanglingResponse { .. }));
    }

    #[test]
    fn validate_clean_corpus_is_empty() {
        let sub = submission(
            "s1",
            vec![review("r1", Some(3), 4), review("r2", Some(4), 4)],
            1,
        );
        let corpus = Corpus::new(vec![sub], "test");
        assert!(validate(&corpus).is_empty());
    }

    #[test]
    fn derive_label_maps_sign() {
        assert_eq!(
            derive_label(&review("r", Some(3), 4)).unwrap(),
            UpdateLabel::Inc
        );
        assert_eq!(
            derive_label(&review("r", Some(4), 3)).unwrap(),
            UpdateLabel::Dec
        );
        assert_eq!(
            derive_label(&review("r", Some(3), 3)).unwrap(),
            UpdateLabel::Keep
        );
        assert!(matches!(
            derive_label(&review("r", None, 3)),
            Err(Error::UnlabeledReview)
        ));
    }

    #[test]
    fn tabulate_hand_enumerated_fixture() {
        // three papers: p1 has one INC + one KEEP (accepted), p2 has one DEC
        // (rejected), p3 all KEEP (accepted).
        let mut p1 = submission(
            "p1",
            vec![review("r1", Some(3), 4), review("r2", Some(3), 3)],
            0,
        );
        p1.decision = Some(Decision::Accept);
        let mut p2 = submission("p2", vec![review("r1", Some(4), 3)], 0);
        p2.decision = Some(Decision::Reject);
        let mut p3 = submission(
            "p3",
            vec![review("r1", Some(2), 2), review("r2", Some(5), 5)],
            0,
        );
        p3.decision = Some(Decision::Accept);
        let corpus = Corpus::new(vec![p1, p2, p3], "test");
        let table = tabulate_updates(&corpus);

        let inc = table.row("INC");
        assert_eq!((inc.reviews, inc.papers, inc.accepted_papers), (1, 1, 1));
        assert!((inc.mean_before_oval - 3.0).abs() < 1e-12);
        assert!((inc.mean_after_oval - 4.0).abs() < 1e-12);

        let dec = table.row("DEC");
        assert_eq!((dec.reviews, dec.papers, dec.accepted_papers), (1, 1, 0));

        // KEEP papers: only p3 has no update at all.
        let keep = table.row("KEEP");
        assert_eq!((keep.reviews, keep.papers, keep.accepted_papers), (3, 1, 1));

        let total = table.row("Total");
        assert_eq!((total.reviews, total.papers), (5, 3));
        assert_eq!(total.acceptance_rate().unwrap(), 2.0 / 3.0);
    }

    #[test]
    fn tabulate_all_keep_matches_global_rate() {
        let mut subs = Vec::new();
        for i in 0..4 {
            let mut s = submission(&format!("p{i}"), vec![review("r1", Some(3), 3)], 0);
            s.decision = Some(if i == 0 {
                Decision::Accept
            } else {
                Decision::Reject
            });
            subs.push(s);
        }
        let corpus = Corpus::new(subs, "test");
        let table = tabulate_updates(&corpus);
        assert_eq!(table.row("KEEP").papers, 4);
        assert_eq!(
            table.row("KEEP").acceptance_rate(),
            table.row("Total").acceptance_rate()
        );
    }

    #[test]
    fn tabulate_counts_sum_to_labeled_reviews() {
        let corpus = crate::synth::generate_synthetic_corpus(&crate::synth::SynthConfig {
            papers: 40,
            gamma: 0.7,
            beta: 0.4,
            seed: 11,
            ..Default::default()
        });
        let table = tabulate_updates(&corpus);
        let total_labeled = corpus.labeled_reviews().count();
        let sum: usize = ["INC", "DEC", "KEEP"]
            .iter()
            .map(|l| table.row(l).reviews)
            .sum();
        assert_eq!(sum, total_labeled);
        assert_eq!(table.row("Total").reviews, total_labeled);
    }

    fn brd_fixture(ovals: &[i32], responses: usize) -> Submission {
        let reviews = ovals
            .iter()
            .enumerate()
            .map(|(i, &o)| review(&format!("r{i}"), Some(o), o))
            .collect();
        submission("s", reviews, responses)
    }

    #[test]
    fn subset_selection_rules() {
        // mean 3.667 with a response: in brd.
        let in_brd = brd_fixture(&[3, 4, 4], 1);
        // mean 2.667: full but not brd.
        let mut below = brd_fixture(&[2, 3, 3], 1);
        below.submission_id = "s2".to_string();
        // two reviews: excluded from both.
        let mut short = brd_fixture(&[3, 4], 1);
        short.submission_id = "s3".to_string();
        // no response: excluded from both.
        let mut no_resp = brd_fixture(&[3, 4, 4], 0);
        no_resp.submission_id = "s4".to_string();
        let corpus = Corpus::new(vec![in_brd, below, short, no_resp], "test");

        let full = select_subset(&corpus, Subset::Full);
        let brd = select_subset(&corpus, Subset::Brd);
        assert_eq!(full.len(), 2);
        assert_eq!(brd.len(), 1);
        assert_eq!(brd.submissions[0].submission_id, "s");
        assert!(brd.len() <= full.len() && full.len() <= corpus.len());
    }

    #[test]
    fn brd_bounds_are_inclusive() {
        let lo = brd_fixture(&[3, 3, 3], 1); // mean exactly 3.0
        let mut hi = brd_fixture(&[4, 4, 5], 1); // mean exactly 4.333
        hi.submission_id = "s2".to_string();
        let mut edge = brd_fixture(&[4, 4, 5], 1);
        edge.submission_id = "s3".to_string();
        edge.reviews[2].before = Some(scores(5));
        edge.reviews[0].before = Some(scores(4));
        let corpus = Corpus::new(vec![lo, hi], "test");
        let brd = select_subset(&corpus, Subset::Brd);
        assert_eq!(brd.len(), 2);
    }

    #[test]
    fn subset_nesting_holds_on_synthetic_corpora() {
        for seed in 0..5 {
            let corpus = crate::synth::generate_synthetic_corpus(&crate::synth::SynthConfig {
                papers: 30,
                seed,
                ..Default::default()
            });
            let full = select_subset(&corpus, Subset::Full);
            let brd = select_subset(&corpus, Subset::Brd);
            assert!(brd.len() <= full.len());
            assert!(full.len() <= corpus.len());
        }
    }
}
