//! Rank features by information gain, drop the bottom half and prune
//! correlated survivors.
//!
//! ```text
//! cargo run --example feature_selection
//! ```

use rebuttal_lens::corpus::Subset;
use rebuttal_lens::features::{assemble, FeatureConfig, FeatureGroup};
use rebuttal_lens::scorers::ScorerBindings;
use rebuttal_lens::selection::{select_features, DropReason, SelectionConfig};
use rebuttal_lens::synth::{generate_synthetic_corpus, SynthConfig};

fn main() -> rebuttal_lens::Result<()> {
    let corpus = generate_synthetic_corpus(&SynthConfig {
        papers: 300,
        gamma: 0.8,
        beta: 0.3,
        seed: 17,
        ..Default::default()
    });
    let dataset = assemble(
        &corpus,
        Subset::Full,
        None,
        &ScorerBindings::default(),
        &FeatureConfig::default(),
    )?
    .restrict_to_groups(&[FeatureGroup::Score]);

    let report = select_features(&dataset, &SelectionConfig::default());

    println!("information gain (descending):");
    for gain in &report.gains {
        println!("  {:<18} {:.4}", gain.feature, gain.gain);
    }

    println!("\nkept ({}):", report.kept.len());
    for name in &report.kept {
        println!("  {name}");
    }

    println!("\ndropped ({}):", report.dropped.len());
    for (name, reason) in &report.dropped {
        match reason {
            DropReason::BottomHalf => println!("  {name:<18} bottom half by gain"),
            DropReason::CorrelatedWith(other) => println!("  {name:<18} correlated with {other}"),
        }
    }
    Ok(())
}
