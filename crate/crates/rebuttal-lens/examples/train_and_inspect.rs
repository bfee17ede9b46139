//! Fit the softmax pipeline on score features and inspect the signed
//! per-class weights. The peer-gap feature dominates: a peer mean above
//! the reviewer's own score pushes toward INC and away from DEC.
//!
//! ```text
//! cargo run --example train_and_inspect
//! ```

use rebuttal_lens::classifier::{inspect_weights, weights_markdown};
use rebuttal_lens::corpus::Subset;
use rebuttal_lens::evaluation::{FoldPipeline, PipelineConfig, SoftmaxPipeline};
use rebuttal_lens::features::{assemble, FeatureConfig, FeatureGroup};
use rebuttal_lens::scorers::ScorerBindings;
use rebuttal_lens::synth::{generate_synthetic_corpus, SynthConfig};

fn main() -> rebuttal_lens::Result<()> {
    let corpus = generate_synthetic_corpus(&SynthConfig {
        papers: 400,
        gamma: 0.8,
        beta: 0.3,
        seed: 21,
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

    // selection stays off so collinear gap features are all visible
    let pipeline = SoftmaxPipeline::new(PipelineConfig {
        selection: None,
        ..Default::default()
    });
    let fitted = pipeline.fit(&dataset, 21)?;
    println!(
        "trained on {} rows after downsampling ({} features), loss {:.4} in {} iterations\n",
        fitted.downsampled_keys.len(),
        fitted.model.feature_names.len(),
        fitted.model.train_loss,
        fitted.model.iterations
    );

    let weights = inspect_weights(&fitted.model);
    print!("{}", weights_markdown(&weights[..10.min(weights.len())]));

    let gap = weights
        .iter()
        .find(|w| w.feature == "oth_mean-self")
        .expect("present");
    println!(
        "\noth_mean-self: INC {:+.3}, DEC {:+.3}, KEEP {:+.3}",
        gap.weights[0], gap.weights[1], gap.weights[2]
    );
    Ok(())
}
