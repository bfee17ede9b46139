//! Score correlations, review-component statistics and the submit-time
//! analysis on a synthetic corpus.
//!
//! ```text
//! cargo run --example descriptive_statistics
//! ```

use rebuttal_lens::stats::{component_stats, correlation_matrix, time_summary, TTestKind, Which};
use rebuttal_lens::synth::{generate_synthetic_corpus, SynthConfig};

fn main() {
    let corpus = generate_synthetic_corpus(&SynthConfig {
        papers: 400,
        gamma: 0.7,
        beta: 0.3,
        seed: 11,
        ..Default::default()
    });

    let matrix = correlation_matrix(&corpus, Which::Before);
    println!("pearson correlations between before-rebuttal scores:");
    print!("{}", matrix.to_csv());

    println!("\nreview components (count, token length):");
    print!("{}", component_stats(&corpus).to_markdown());

    let times = time_summary(&corpus, 24 * 3600, TTestKind::Welch);
    println!("\nsubmission-time histogram (1-day buckets):");
    for bucket in &times.histogram {
        println!("  {} .. {}: {}", bucket.start, bucket.end, bucket.count);
    }
    match &times.inc_dec_test {
        Some(test) => println!(
            "INC vs DEC submit times: t = {:.3}, df = {:.1}, p = {:.3}",
            test.t, test.df, test.p_two_tailed
        ),
        None => println!(
            "INC vs DEC submit times not computable: {}",
            times.not_computable.as_deref().unwrap_or("-")
        ),
    }
}
