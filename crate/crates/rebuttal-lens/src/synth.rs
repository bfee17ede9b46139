//! Synthetic review-corpus generator with a conformity-biased score-update
//! rule.
//!
//! Before-rebuttal OVAL scores are drawn from a clipped, rounded Gaussian
//! on [1, 6]. After the rebuttal a review moves one point toward the peer
//! mean with probability
//!
//! ```text
//! p = clamp(gamma * logistic(1.8 * (|peer_mean - self| - 1.5)) + beta * q, 0, 1)
//! ```
//!
//! where `q` in [0, 1] is the response quality, and stays put when the gap
//! is zero. The steep, shifted logistic link keeps small gaps mostly
//! inert, so generated corpora are KEEP-heavy like real review data.
//! Quality also drives the generated response text: high-q responses cite
//! tables, lines and numbers; low-q responses make vague promises.
//! Decisions accept papers whose mean after-rebuttal OVAL reaches 4.0.
//! Everything is deterministic given the seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{
    AuthorResponse, Corpus, Decision, PaperType, Review, ReviewScores, Submission,
};

/// Review submission deadline used for synthetic submit times.
const DEADLINE_EPOCH: i64 = 1_522_022_400;
const ACCEPT_THRESHOLD: f64 = 4.0;

#[derive(Debug, Clone, Copy)]
pub struct SynthConfig {
    pub papers: usize,
    pub reviews_per_paper: usize,
    /// Mean of the initial-score Gaussian.
    pub score_mean: f64,
    /// Std of the initial-score Gaussian.
    pub score_std: f64,
    /// Conformity strength, in [0, 1].
    pub gamma: f64,
    /// Response-quality effect, >= 0.
    pub beta: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            papers: 100,
            reviews_per_paper: 3,
            score_mean: 3.5,
            score_std: 1.1,
            gamma: 0.5,
            beta: 0.3,
            seed: 0,
        }
    }
}

pub fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Link steepness and midpoint of the conformity response.
pub const LINK_GAIN: f64 = 1.8;
pub const LINK_MID: f64 = 1.5;

/// Probability that a review moves one point toward the peer mean:
/// `gamma * logistic(LINK_GAIN * (|gap| - LINK_MID)) + beta * quality`,
/// clamped to [0, 1]. Zero gap means no move regardless of quality.
pub fn update_probability(gap: f64, quality: f64, gamma: f64, beta: f64) -> f64 {
    if gap == 0.0 {
        return 0.0;
    }
    let conformity = gamma * logistic(LINK_GAIN * (gap.abs() - LINK_MID));
    (conformity + beta * quality).clamp(0.0, 1.0)
}

/// Apply the update rule to one review given the peer mean; returns the
/// after-rebuttal OVAL.
pub fn conformity_update(
    before: i32,
    peer_mean: f64,
    quality: f64,
    gamma: f64,
    beta: f64,
    rng: &mut impl Rng,
) -> i32 {
    let gap = peer_mean - before as f64;
    let p = update_probability(gap, quality, gamma, beta);
    if p > 0.0 && rng.gen::<f64>() < p {
        before + gap.signum() as i32
    } else {
        before
    }
}

fn gaussian(rng: &mut impl Rng) -> f64 {
    // Box–Muller
    let u1: f64 = rng.gen::<f64>().max(1e-12);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn clipped_score(rng: &mut impl Rng, mean: f64, std: f64, lo: i32, hi: i32) -> i32 {
    ((mean + std * gaussian(rng)).round() as i32).clamp(lo, hi)
}

const SPECIFIC_TEMPLATES: [&str; 6] = [
    "We added the ablation in Table {T} and report {N} runs at line {L}.",
    "Because the gain is {N} points in Table {T}, we therefore keep the setting described at line {L}.",
    "Section {T} now includes the significance test over {N} seeds, see line {L}.",
    "The revised Figure {T} plots all {N} conditions; the analysis is at line {L}.",
    "As shown in Table {T}, accuracy improves by {N} percent, therefore we report it at line {L}.",
    "We corrected the equation at line {L} and added {N} baselines in Table {T}.",
];

const VAGUE_TEMPLATES: [&str; 6] = [
    "Thanks for the suggestion, we will try this in the camera-ready.",
    "We will add more discussion in the final version.",
    "We believe this concern can be addressed later.",
    "We will consider the suggested changes.",
    "Thank you, we will revise the paper accordingly.",
    "We will do our best to improve the writing.",
];

const RUDE_OPENERS: [&str; 3] = [
    "This criticism is simply wrong.",
    "The reviewer misunderstood the whole point.",
    "See the paper before raising this.",
];

const POLITE_OPENERS: [&str; 3] = [
    "Thank you for the detailed and helpful review.",
    "We thank the reviewer for the constructive comments.",
    "Thanks a lot for the careful reading.",
];

fn fill_template(template: &str, rng: &mut impl Rng) -> String {
    template
        .replace("{T}", &rng.gen_range(1..9).to_string())
        .replace("{N}", &rng.gen_range(2..98).to_string())
        .replace("{L}", &rng.gen_range(10..420).to_string())
}

/// Template-generated response text whose specificity, politeness and
/// length all rise with quality.
fn response_text(quality: f64, rng: &mut impl Rng) -> String {
    let mut sentences = Vec::new();
    if quality < 0.2 {
        sentences.push(RUDE_OPENERS[rng.gen_range(0..RUDE_OPENERS.len())].to_string());
    } else {
        sentences.push(POLITE_OPENERS[rng.gen_range(0..POLITE_OPENERS.len())].to_string());
    }
    let n_specific = (quality * 4.0).floor() as usize + usize::from(quality > 0.9);
    let n_vague = ((1.0 - quality) * 3.0).floor() as usize + 1;
    for _ in 0..n_specific {
        let t = SPECIFIC_TEMPLATES[rng.gen_range(0..SPECIFIC_TEMPLATES.len())];
        sentences.push(fill_template(t, rng));
    }
    for _ in 0..n_vague {
        sentences.push(VAGUE_TEMPLATES[rng.gen_range(0..VAGUE_TEMPLATES.len())].to_string());
    }
    sentences.join(" ")
}

fn aspect(rng: &mut impl Rng, oval: i32, noise: f64) -> i32 {
    (((oval as f64) * 0.75 + 0.5 + noise * gaussian(rng)).round() as i32).clamp(1, 5)
}

/// Generate a corpus of `papers` submissions, each with `reviews_per_paper`
/// reviews and one response per review. Identical seeds give identical
/// corpora.
pub fn generate_synthetic_corpus(config: &SynthConfig) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut submissions = Vec::with_capacity(config.papers);
    for p in 0..config.papers {
        let submission_id = format!("synth-{p:04}");
        let paper_type = if rng.gen::<f64>() < 0.66 {
            PaperType::Long
        } else {
            PaperType::Short
        };
        let befores: Vec<i32> = (0..config.reviews_per_paper)
            .map(|_| clipped_score(&mut rng, config.score_mean, config.score_std, 1, 6))
            .collect();
        let qualities: Vec<f64> = (0..config.reviews_per_paper).map(|_| rng.gen()).collect();

        let mut reviews = Vec::with_capacity(befores.len());
        let mut responses = Vec::with_capacity(befores.len());
        for (i, (&before, &quality)) in befores.iter().zip(&qualities).enumerate() {
            let peers: Vec<f64> = befores
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, &b)| b as f64)
                .collect();
            let after = if peers.is_empty() {
                before
            } else {
                let peer_mean = peers.iter().sum::<f64>() / peers.len() as f64;
                conformity_update(
                    before,
                    peer_mean,
                    quality,
                    config.gamma,
                    config.beta,
                    &mut rng,
                )
            };

            let mut before_scores = ReviewScores::new(before, rng.gen_range(2..=5));
            before_scores.snd = Some(aspect(&mut rng, before, 0.5));
            before_scores.sbs = Some(aspect(&mut rng, before, 0.6));
            before_scores.org = Some(aspect(&mut rng, before, 0.9));
            before_scores.cmp = Some(aspect(&mut rng, before, 1.0));
            before_scores.rdb = Some(aspect(&mut rng, before, 1.4));
            let mut after_scores = before_scores;
            after_scores.oval = after;

            let review_id = format!("r{i}");
            reviews.push(Review {
                review_id: review_id.clone(),
                submission_id: submission_id.clone(),
                reviewer_id: format!("{submission_id}-rev{i}"),
                before: Some(before_scores),
                after: after_scores,
                pos_args: vec![fill_template(
                    "The idea in Section {T} is clearly motivated.",
                    &mut rng,
                )],
                neg_args: vec![fill_template(
                    "The evaluation at line {L} misses {N} baselines.",
                    &mut rng,
                )],
                questions: if rng.gen::<f64>() < 0.4 {
                    vec![fill_template(
                        "How does Table {T} change with {N} seeds?",
                        &mut rng,
                    )]
                } else {
                    vec![]
                },
                other_text: String::new(),
                submit_time: Some(DEADLINE_EPOCH - rng.gen_range(0..7 * 86_400)),
            });
            responses.push(AuthorResponse::new(
                &submission_id,
                Some(&review_id),
                &response_text(quality, &mut rng),
            ));
        }

        let mean_after =
            reviews.iter().map(|r| r.after.oval as f64).sum::<f64>() / reviews.len() as f64;
        submissions.push(Submission {
            submission_id,
            paper_type,
            decision: Some(if mean_after >= ACCEPT_THRESHOLD {
                Decision::Accept
            } else {
                Decision::Reject
            }),
            reviews,
            responses,
            weakness_labels: None,
        });
    }
    Corpus::new(submissions, &format!("synthetic(seed={})", config.seed))
}
