//! Ingest a JSONL review corpus and run the data-quality checks.
//!
//! ```text
//! cargo run --example ingest_and_validate
//! ```

use std::io::Write;

use rebuttal_lens::corpus::{ingest_corpus, validate, Format};

const SAMPLE: &str = r#"{"submission_id":"s-001","paper_type":"long","decision":"accept","reviews":[{"review_id":"r1","reviewer_id":"a9","before":{"oval":3,"conf":4,"snd":3},"after":{"oval":4,"conf":4,"snd":4},"pos_args":["clear method section"],"neg_args":["evaluation misses a baseline"],"questions":["how long does training take?"],"submit_time":1521849600},{"review_id":"r2","reviewer_id":"b4","before":{"oval":4,"conf":3},"after":{"oval":4,"conf":3},"pos_args":["novel task"],"neg_args":[]},{"review_id":"r3","reviewer_id":"c7","after":{"oval":3,"conf":2},"neg_args":["late review, no rebuttal seen"]}],"responses":[{"review_id":"r1","text":"Thanks for the careful review. Training takes 6 hours, see line 204."}]}
{"submission_id":"s-002","paper_type":"short","decision":"reject","reviews":[{"review_id":"r1","reviewer_id":"d2","before":{"oval":5,"conf":4,"sbs":4},"after":{"oval":4,"conf":4,"sbs":5},"neg_args":["overclaimed results"]}],"responses":[{"review_id":"rX","text":"We will tone down the claims."}]}
"#;

fn main() -> rebuttal_lens::Result<()> {
    let mut file = tempfile::NamedTempFile::new().expect("temp file");
    file.write_all(SAMPLE.as_bytes()).expect("write sample");

    let corpus = ingest_corpus(file.path(), Format::Jsonl)?;
    println!("ingested {} submissions", corpus.len());
    for submission in &corpus.submissions {
        println!(
            "  {}: {} reviews ({} with before-rebuttal scores), {} responses",
            submission.submission_id,
            submission.reviews.len(),
            submission.labeled_reviews().count(),
            submission.responses.len()
        );
    }

    // s-002 has an aspect moving against the OVAL update and a response
    // pointing at an unknown review id
    let violations = validate(&corpus);
    println!("\n{} violations:", violations.len());
    for violation in &violations {
        println!("  {violation}");
    }
    Ok(())
}
