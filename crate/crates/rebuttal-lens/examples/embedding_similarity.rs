//! Load a word-embedding table, average token vectors into document
//! vectors and measure review–response cosine similarity.
//!
//! ```text
//! cargo run --example embedding_similarity
//! ```

use std::io::Write;

use rebuttal_lens::corpus::{AuthorResponse, Review, ReviewScores, SectionMask};
use rebuttal_lens::embeddings::{cosine, doc_vector, review_response_similarity, EmbeddingStore};
use rebuttal_lens::text::tokenize_words;

fn main() -> rebuttal_lens::Result<()> {
    // the on-disk format: `<vocab_size> <dim>` header, one token per line
    let table = "\
6 4
model 0.9 0.1 0.0 0.2
baseline 0.8 0.2 0.1 0.1
results 0.1 0.9 0.1 0.0
table 0.0 0.8 0.2 0.1
thanks 0.0 0.1 0.9 0.3
deadline 0.1 0.0 0.2 0.9
";
    let mut file = tempfile::NamedTempFile::new().expect("temp file");
    file.write_all(table.as_bytes()).expect("write table");
    let store = EmbeddingStore::load(file.path())?;
    println!("loaded {} vectors of dimension {}", store.len(), store.dim);

    let review_text = "The model beats the baseline but the results table is unclear.";
    let response_text = "Thanks, we reworked the results table and the model comparison.";
    let off_topic = "The deadline was very close.";

    let review_vec = doc_vector(&tokenize_words(review_text), &store).expect("in vocabulary");
    for (name, text) in [("on-topic", response_text), ("off-topic", off_topic)] {
        let vec = doc_vector(&tokenize_words(text), &store).expect("in vocabulary");
        println!(
            "cosine(review, {name} response) = {:.3}",
            cosine(&review_vec, &vec)?
        );
    }

    // the same measurement through the corpus types
    let review = Review {
        review_id: "r1".to_string(),
        submission_id: "s1".to_string(),
        reviewer_id: "a".to_string(),
        before: Some(ReviewScores::new(3, 3)),
        after: ReviewScores::new(4, 3),
        pos_args: vec![],
        neg_args: vec![review_text.to_string()],
        questions: vec![],
        other_text: String::new(),
        submit_time: None,
    };
    let response = AuthorResponse::new("s1", Some("r1"), response_text);
    let sim = review_response_similarity(&review, &response, &store, SectionMask::default());
    println!(
        "review_response_similarity = {:.3}",
        sim.expect("computable")
    );
    Ok(())
}
