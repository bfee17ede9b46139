//! Rank n-grams that separate responses to score-raising reviews from
//! responses to score-lowering ones, using the G^2 log-likelihood ratio.
//!
//! ```text
//! cargo run --example contrastive_ngrams
//! ```

use rebuttal_lens::corpus::{derive_label, UpdateLabel};
use rebuttal_lens::stats::llr_rank;
use rebuttal_lens::synth::{generate_synthetic_corpus, SynthConfig};
use rebuttal_lens::text::{tokenize_with_eos, SentenceSplitter};

fn main() -> rebuttal_lens::Result<()> {
    let corpus = generate_synthetic_corpus(&SynthConfig {
        papers: 500,
        gamma: 0.8,
        beta: 0.4,
        seed: 3,
        ..Default::default()
    });

    // split responses by the update label of the review they answer
    let splitter = SentenceSplitter::default();
    let mut inc_docs = Vec::new();
    let mut dec_docs = Vec::new();
    for submission in &corpus.submissions {
        for review in submission.labeled_reviews() {
            let Some(response) = submission.aligned_response(&review.review_id) else {
                continue;
            };
            let tokens = tokenize_with_eos(&response.text, &splitter);
            match derive_label(review)? {
                UpdateLabel::Inc => inc_docs.push(tokens),
                UpdateLabel::Dec => dec_docs.push(tokens),
                UpdateLabel::Keep => {}
            }
        }
    }
    println!(
        "{} responses aligned to INC reviews, {} to DEC reviews",
        inc_docs.len(),
        dec_docs.len()
    );

    for (focus, a, b) in [("INC", &inc_docs, &dec_docs), ("DEC", &dec_docs, &inc_docs)] {
        let ranking = llr_rank(a, b, 3, 5)?;
        println!("\ntop trigrams over-represented in {focus}-aligned responses:");
        for entry in ranking.entries.iter().take(8) {
            println!(
                "  {:<28} G^2 = {:>8.3}  ({} vs {} docs)",
                entry.tokens.join(" "),
                entry.llr,
                entry.docs_a,
                entry.docs_b
            );
        }
    }
    Ok(())
}
