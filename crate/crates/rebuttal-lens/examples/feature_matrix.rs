//! Assemble the labeled feature matrix for the Full subset: score features
//! from peer-review statistics plus text features from the responses.
//!
//! ```text
//! cargo run --example feature_matrix
//! ```

use rebuttal_lens::corpus::Subset;
use rebuttal_lens::embeddings::EmbeddingStore;
use rebuttal_lens::features::{assemble, FeatureConfig};
use rebuttal_lens::scorers::ScorerBindings;
use rebuttal_lens::synth::{generate_synthetic_corpus, SynthConfig};
use rebuttal_lens::text::tokenize_words;

fn main() -> rebuttal_lens::Result<()> {
    let corpus = generate_synthetic_corpus(&SynthConfig {
        papers: 120,
        gamma: 0.8,
        beta: 0.3,
        seed: 5,
        ..Default::default()
    });

    // pseudo-random embeddings over the corpus vocabulary stand in for a
    // trained table so the `sim` feature is computable
    let vocab: Vec<String> = corpus
        .submissions
        .iter()
        .flat_map(|s| s.responses.iter())
        .flat_map(|r| tokenize_words(&r.text))
        .collect();
    let store = EmbeddingStore::synthetic(vocab, 16, 5);

    let dataset = assemble(
        &corpus,
        Subset::Full,
        Some(&store),
        &ScorerBindings::default(),
        &FeatureConfig::default(),
    )?;

    let counts = dataset.class_counts();
    println!(
        "{} instances x {} features from {} submissions (INC {}, DEC {}, KEEP {})",
        dataset.n_rows(),
        dataset.n_features(),
        dataset.n_submissions(),
        counts[0],
        counts[1],
        counts[2]
    );

    println!(
        "\nfirst instance ({} / {}):",
        dataset.keys[0].submission_id, dataset.keys[0].review_id
    );
    for (name, value) in dataset.feature_names.iter().zip(&dataset.rows[0]) {
        println!("  {name:<18} {value:>8.4}");
    }
    println!("  label: {}", dataset.labels[0]);

    if dataset.imputation.is_empty() {
        println!("\nno missing cells");
    } else {
        println!("\nimputed columns:");
        for record in &dataset.imputation {
            println!(
                "  {} <- {:.4} ({} rows)",
                record.feature, record.mean, record.imputed_rows
            );
        }
    }
    Ok(())
}
