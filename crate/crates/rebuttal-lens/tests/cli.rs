//! End-to-end runs of the `rebuttal-lens` binary: exit codes, output
//! determinism across job counts, and printed summaries.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rebuttal_lens::corpus::{
    write_jsonl, AuthorResponse, Corpus, PaperType, Review, ReviewScores, Submission,
};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rebuttal-lens"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).to_string()
}

fn synth_corpus(dir: &Path, papers: usize, seed: u64) -> PathBuf {
    let out = run(&[
        "synth",
        "--papers",
        &papers.to_string(),
        "--gamma",
        "0.8",
        "--beta",
        "0.3",
        "--seed",
        &seed.to_string(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    dir.join("synth_corpus.jsonl")
}

/// A corpus whose Full subset carries exactly the reference label counts
/// (80 INC, 60 DEC, 652 KEEP over 264 submissions of 3 reviews each).
fn reference_counts_corpus(path: &Path) {
    let mut submissions = Vec::new();
    let mut review_no = 0usize;
    for s in 0..264 {
        let submission_id = format!("s{s:03}");
        let mut reviews = Vec::new();
        let mut responses = Vec::new();
        for r in 0..3 {
            let after = match review_no {
                n if n < 80 => 4,  // INC
                n if n < 140 => 2, // DEC
                _ => 3,            // KEEP
            };
            review_no += 1;
            let review_id = format!("r{r}");
            reviews.push(Review {
                review_id: review_id.clone(),
                submission_id: submission_id.clone(),
                reviewer_id: format!("{submission_id}-{review_id}"),
                before: Some(ReviewScores::new(3, 3)),
                after: ReviewScores::new(after, 3),
                pos_args: vec!["solid idea".to_string()],
                neg_args: vec!["thin evaluation".to_string()],
                questions: vec![],
                other_text: String::new(),
                submit_time: None,
            });
            responses.push(AuthorResponse::new(
                &submission_id,
                Some(&review_id),
                "Thanks for the careful review. We will add the missing table.",
            ));
        }
        submissions.push(Submission {
            submission_id,
            paper_type: PaperType::Long,
            decision: None,
            reviews,
            responses,
            weakness_labels: None,
        });
    }
    write_jsonl(&Corpus::new(submissions, "cli-fixture"), path).expect("writes");
}

#[test]
fn evaluate_is_byte_identical_across_runs_and_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = synth_corpus(dir.path(), 60, 3);

    let eval = |out: &Path, jobs: &str| {
        let output = run(&[
            "evaluate",
            "--corpus",
            corpus.to_str().unwrap(),
            "--features",
            "score",
            "--subset",
            "full",
            "--repeats",
            "5",
            "--seed",
            "7",
            "--jobs",
            jobs,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(
            output.status.success(),
            "{}",
            String::from_utf8_lossy(&output.stderr)
        );
        fs::read(out.join("eval_score_full.json")).expect("report written")
    };

    let a = eval(&dir.path().join("a"), "1");
    let b = eval(&dir.path().join("b"), "1");
    let c = eval(&dir.path().join("c"), "8");
    assert_eq!(a, b, "same command twice must be byte-identical");
    assert_eq!(a, c, "--jobs must not change the report bytes");
}

#[test]
fn baseline_majority_prints_reference_macro_f1() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.jsonl");
    reference_counts_corpus(&corpus);

    let output = run(&[
        "baseline",
        "--kind",
        "majority",
        "--subset",
        "full",
        "--corpus",
        corpus.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    let text = stdout(&output);
    assert!(text.contains("macro-F1 0.301"), "stdout: {text}");
    assert!(text.contains("INC 80, DEC 60, KEEP 652"), "stdout: {text}");
}

#[test]
fn ngrams_csv_has_exact_header() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = synth_corpus(dir.path(), 80, 11);
    let output = run(&[
        "ngrams",
        "--corpus",
        corpus.to_str().unwrap(),
        "--n",
        "3",
        "--min-docs",
        "7",
        "--focus",
        "inc",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    let csv = fs::read_to_string(dir.path().join("ngrams_inc_3.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "ngram,llr,docs_a,docs_b");
    // digit runs and sentence ends are normalized before ranking
    assert!(csv.contains("DIGIT"), "{csv}");
    assert!(csv.contains("EOS"), "{csv}");
}

#[test]
fn stats_writes_tables_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = synth_corpus(dir.path(), 60, 21);
    let output = run(&[
        "stats",
        "--corpus",
        corpus.to_str().unwrap(),
        "--which",
        "before",
        "--svg",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    for file in [
        "correlation_before.csv",
        "components.csv",
        "components.md",
        "updates.csv",
        "updates.md",
        "time_summary.json",
        "correlation_before.svg",
        "time_histogram.svg",
    ] {
        assert!(dir.path().join(file).exists(), "missing {file}");
    }
    let matrix = fs::read_to_string(dir.path().join("correlation_before.csv")).unwrap();
    assert!(matrix.starts_with("score,OVAL,CONF,SND,SBS,ORG,CMP,RDB"));
    let svg = fs::read_to_string(dir.path().join("correlation_before.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
}

#[test]
fn exit_codes_distinguish_usage_and_data_errors() {
    // unknown flag: usage error
    let output = run(&["evaluate", "--definitely-not-a-flag"]);
    assert_eq!(output.status.code(), Some(1));

    // stochastic command without --seed: usage error
    let dir = tempfile::tempdir().unwrap();
    let corpus = synth_corpus(dir.path(), 12, 1);
    let output = run(&[
        "evaluate",
        "--corpus",
        corpus.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("--seed"));

    // missing corpus file: data error
    let output = run(&["validate", "--corpus", "/nonexistent/corpus.jsonl"]);
    assert_eq!(output.status.code(), Some(2));

    // malformed line: data error naming the line
    let bad = dir.path().join("bad.jsonl");
    fs::write(
        &bad,
        "{\"submission_id\":\"s1\",\"paper_type\":\"long\",\"reviews\":[]}\nnot json\n",
    )
    .unwrap();
    let output = run(&["validate", "--corpus", bad.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("line 2"));

    // --help exits 0
    let output = run(&["--help"]);
    assert_eq!(output.status.code(), Some(0));
}

#[test]
fn out_dir_env_variable_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let output = bin()
        .args(["synth", "--papers", "5", "--seed", "2"])
        .env("REBUTTAL_LENS_OUT", dir.path())
        .output()
        .expect("binary runs");
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    assert!(dir.path().join("synth_corpus.jsonl").exists());
}

#[test]
fn config_file_fills_defaults_but_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = synth_corpus(dir.path(), 40, 5);
    let config = dir.path().join("run.conf");
    fs::write(
        &config,
        format!(
            "# defaults for this experiment\ncorpus = {}\nseed = 5\nrepeats = 2\nfeatures = score\n",
            corpus.display()
        ),
    )
    .unwrap();

    let output = run(&[
        "evaluate",
        "--config",
        config.to_str().unwrap(),
        "--repeats",
        "3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("eval_score_full.json")).unwrap())
            .unwrap();
    // flag beats config file; config file beats default
    assert_eq!(report["metadata"]["repeats"], 3);
    assert_eq!(report["metadata"]["master_seed"], 5);
    assert_eq!(report["metadata"]["config"]["features"], "score");
}

#[test]
fn validate_reports_violations_but_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("corpus.jsonl");
    fs::write(
        &path,
        "{\"submission_id\":\"s1\",\"paper_type\":\"long\",\"reviews\":[{\"review_id\":\"r1\",\"reviewer_id\":\"a\",\"after\":{\"oval\":7,\"conf\":3}}]}\n",
    )
    .unwrap();
    let output = run(&["validate", "--corpus", path.to_str().unwrap()]);
    assert_eq!(
        output.status.code(),
        Some(0),
        "violations are data, not failures"
    );
    assert!(stdout(&output).contains("1 violations"));
}

#[test]
fn train_then_report_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = synth_corpus(dir.path(), 50, 9);
    let output = run(&[
        "train",
        "--corpus",
        corpus.to_str().unwrap(),
        "--features",
        "score",
        "--seed",
        "4",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    let model: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("model_full.json")).unwrap())
            .unwrap();
    assert!(model["model"]["weights"].is_array());
    assert!(model["selection"]["kept"].is_array());

    // evaluate with markdown output, then merge with the report command
    let output = run(&[
        "evaluate",
        "--corpus",
        corpus.to_str().unwrap(),
        "--features",
        "score",
        "--repeats",
        "2",
        "--seed",
        "4",
        "--format",
        "json",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    let output = run(&[
        "report",
        "--inputs",
        dir.path().join("eval_score_full.json").to_str().unwrap(),
        "--format",
        "markdown",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    let md = fs::read_to_string(dir.path().join("report.md")).unwrap();
    assert!(md.contains("| Feature Set | BRD | Full |"), "{md}");
    assert!(md.contains("| Score |"), "{md}");
}
