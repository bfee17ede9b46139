//! Analytics for conference peer-review corpora with before/after-rebuttal
//! scores: ingestion and validation, descriptive statistics, contrastive
//! n-gram ranking, feature extraction, information-gain feature selection,
//! a three-class softmax classifier for after-rebuttal score updates
//! (INC/DEC/KEEP) and a repeated cross-validation harness with baselines.
//!
//! The library is the primary interface; see the `examples/` directory for
//! one runnable example per capability and the thin `rebuttal-lens` binary
//! for scripted runs.
//!
//! ```
//! use rebuttal_lens::synth::{generate_synthetic_corpus, SynthConfig};
//! use rebuttal_lens::corpus::{tabulate_updates, validate};
//!
//! let corpus = generate_synthetic_corpus(&SynthConfig { papers: 20, seed: 1, ..Default::default() });
//! assert!(validate(&corpus).is_empty());
//! let table = tabulate_updates(&corpus);
//! assert_eq!(table.row("Total").papers, 20);
//! ```

pub mod classifier;
pub mod cli;
pub mod corpus;
pub mod embeddings;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod report;
pub mod scorers;
pub mod selection;
mod special;
pub mod stats;
pub mod synth;
pub mod text;

pub use error::{Error, Result};
