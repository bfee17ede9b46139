//! Repeated 10-fold cross-validation of the full pipeline against the
//! majority and random baselines, with significance testing.
//!
//! ```text
//! cargo run --release --example cross_validation
//! ```

use rebuttal_lens::corpus::Subset;
use rebuttal_lens::evaluation::{
    compare_runs, cross_validate, majority_baseline, random_baseline, CvOptions, PipelineConfig,
    SoftmaxPipeline,
};
use rebuttal_lens::features::{assemble, FeatureConfig, FeatureGroup};
use rebuttal_lens::scorers::ScorerBindings;
use rebuttal_lens::synth::{generate_synthetic_corpus, SynthConfig};

fn main() -> rebuttal_lens::Result<()> {
    let corpus = generate_synthetic_corpus(&SynthConfig {
        papers: 250,
        gamma: 0.8,
        beta: 0.3,
        seed: 2,
        ..Default::default()
    });
    let dataset = assemble(
        &corpus,
        Subset::Full,
        None,
        &ScorerBindings::default(),
        &FeatureConfig::default(),
    )?;

    let pipeline = SoftmaxPipeline::new(PipelineConfig::default());
    let opts = CvOptions {
        folds: 10,
        repeats: 20,
        master_seed: 2,
        ..Default::default()
    };

    let score_run = cross_validate(
        &dataset.restrict_to_groups(&[FeatureGroup::Score]),
        &pipeline,
        &opts,
    )?;
    let all_run = cross_validate(&dataset, &pipeline, &opts)?;
    let majority = majority_baseline(&dataset.labels, opts.repeats);
    let random = random_baseline(&dataset.labels, opts.master_seed, opts.repeats);

    println!(
        "macro-F1 over {} repeats of {}-fold CV:",
        opts.repeats, opts.folds
    );
    println!("  Score             {:.3}", score_run.macro_f1);
    println!("  All               {:.3}", all_run.macro_f1);
    println!("  Majority Baseline {:.3}", majority.macro_f1);
    println!("  Random Baseline   {:.3}", random.macro_f1);

    let (t, p) = compare_runs(&score_run, &majority)?;
    println!("\nScore vs majority: t = {t:.2}, p = {p:.2e}");
    let (t, p) = compare_runs(&all_run, &score_run)?;
    println!("All vs Score:      t = {t:.2}, p = {p:.2e}");

    println!("\nper-class metrics (All):");
    for (label, metrics) in ["INC", "DEC", "KEEP"].iter().zip(&all_run.per_class) {
        println!(
            "  {label:<5} P {:.3}  R {:.3}  F1 {:.3}",
            metrics.precision, metrics.recall, metrics.f1
        );
    }
    Ok(())
}
