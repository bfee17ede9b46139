//! The two statistical primitives used throughout: Pearson correlation and
//! Welch's unequal-variance t-test with two-tailed p-values.
//!
//! ```text
//! cargo run --example welch_and_pearson
//! ```

use rebuttal_lens::stats::{pearson, student_t_test, welch_t_test};

fn main() -> rebuttal_lens::Result<()> {
    let oval = [4.0, 2.0, 5.0, 3.0, 1.0, 6.0, 3.0, 2.0];
    let snd = [4.0, 2.0, 5.0, 3.0, 2.0, 5.0, 3.0, 2.0];
    let conf = [3.0, 4.0, 3.0, 2.0, 5.0, 4.0, 3.0, 2.0];
    println!("pearson(OVAL, SND)  = {:+.4}", pearson(&oval, &snd)?);
    println!("pearson(OVAL, CONF) = {:+.4}", pearson(&oval, &conf)?);

    // submit times (hours before deadline) for score-raising vs
    // score-lowering reviews: the first group is clearly earlier
    let inc_hours = [70.0, 66.5, 81.0, 58.0, 73.5, 64.0, 77.0, 69.5, 61.0, 75.0];
    let dec_hours = [49.0, 44.5, 57.0, 40.0, 52.5, 47.0, 55.0, 43.5, 50.0, 46.0];
    let welch = welch_t_test(&inc_hours, &dec_hours)?;
    println!(
        "\nwelch:   t = {:.3}, df = {:.2}, two-tailed p = {:.2e}",
        welch.t, welch.df, welch.p_two_tailed
    );
    let student = student_t_test(&inc_hours, &dec_hours)?;
    println!(
        "student: t = {:.3}, df = {:.2}, two-tailed p = {:.2e}",
        student.t, student.df, student.p_two_tailed
    );

    // a null comparison stays insignificant
    let null = welch_t_test(
        &inc_hours,
        &[71.0, 67.0, 80.0, 59.0, 72.0, 65.0, 76.0, 70.0, 60.0, 74.0],
    )?;
    println!("null:    t = {:.3}, p = {:.3}", null.t, null.p_two_tailed);
    Ok(())
}
