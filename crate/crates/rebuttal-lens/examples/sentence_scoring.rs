//! Score response sentences for specificity, politeness and convincingness
//! with the builtin lexical heuristics, then aggregate per response.
//!
//! ```text
//! cargo run --example sentence_scoring
//! ```

use rebuttal_lens::corpus::AuthorResponse;
use rebuttal_lens::scorers::{aggregate_scores, score_response, ScorerBindings, ScorerKind};

fn main() -> rebuttal_lens::Result<()> {
    let response = AuthorResponse::new(
        "s1",
        Some("r1"),
        "Thank you for the helpful review. \
         Because accuracy improves by 4 points in Table 2, we keep the pretraining step. \
         We corrected the equation at line 118. \
         We will try to add more analysis in the camera-ready. \
         This criticism is simply wrong.",
    );
    let bindings = ScorerBindings::default();

    for kind in ScorerKind::ALL {
        let scores = score_response(&response, &bindings, kind)?;
        println!("{} per sentence:", kind.name());
        for score in &scores {
            println!(
                "  [{}] {:+.3}  {}",
                score.index, score.value, response.sentences[score.index]
            );
        }
        let agg = aggregate_scores(&scores)?;
        println!(
            "  -> max {:.3}  min {:.3}  mean {:.3}  median {:.3}  std {:.3}\n",
            agg.max, agg.min, agg.mean, agg.median, agg.std
        );
    }
    Ok(())
}
