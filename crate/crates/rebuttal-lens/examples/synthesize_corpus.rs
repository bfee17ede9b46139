//! Generate a conformity-biased synthetic corpus and tabulate its score
//! updates.
//!
//! ```text
//! cargo run --example synthesize_corpus
//! ```

use rebuttal_lens::corpus::{tabulate_updates, write_jsonl};
use rebuttal_lens::synth::{generate_synthetic_corpus, update_probability, SynthConfig};

fn main() -> rebuttal_lens::Result<()> {
    let config = SynthConfig {
        papers: 300,
        reviews_per_paper: 3,
        gamma: 0.8,
        beta: 0.3,
        seed: 7,
        ..Default::default()
    };
    let corpus = generate_synthetic_corpus(&config);

    println!("update probability by peer gap (quality 0.5):");
    for gap in [0.5, 1.0, 1.5, 2.0, 3.0] {
        println!(
            "  |peer_mean - self| = {gap:.1}  ->  p = {:.3}",
            update_probability(gap, 0.5, config.gamma, config.beta)
        );
    }

    println!("\nscore-update table for {} papers:", corpus.len());
    print!("{}", tabulate_updates(&corpus).to_markdown());

    let path = std::env::temp_dir().join("rebuttal_lens_synth.jsonl");
    write_jsonl(&corpus, &path)?;
    println!("\ncorpus written to {}", path.display());
    Ok(())
}
