//! Report files: CSV, JSON and Markdown renderings of evaluation runs,
//! including a combined table with feature-set rows and one macro-F1
//! column per subset, plus the per-class breakdown.
//!
//! Every emitted file carries a metadata block (toolkit version, config
//! hash, effective configuration). Outputs contain no timestamps, so a
//! rerun with the same seed is byte-identical.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::evaluation::{ClassMetrics, EvaluationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    Markdown,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
            ReportFormat::Markdown => "md",
        }
    }
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(Error::InvalidInput(format!("unknown format `{other}`"))),
        }
    }
}

/// FNV-1a hash of the canonical `key=value` lines of a configuration.
pub fn config_hash(config: &BTreeMap<String, String>) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for (k, v) in config {
        for b in k
            .bytes()
            .chain("=".bytes())
            .chain(v.bytes())
            .chain("\n".bytes())
        {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    }
    format!("{h:016x}")
}

fn f3(v: f64) -> String {
    format!("{v:.3}")
}

const PER_CLASS_HEADER: &str =
    "INC-p,INC-r,INC-f1,DEC-p,DEC-r,DEC-f1,KEEP-p,KEEP-r,KEEP-f1,macro-f1";

fn per_class_cells(per_class: &[ClassMetrics; 3], macro_f1: f64) -> Vec<String> {
    let mut cells = Vec::with_capacity(10);
    for c in per_class {
        cells.push(f3(c.precision));
        cells.push(f3(c.recall));
        cells.push(f3(c.f1));
    }
    cells.push(f3(macro_f1));
    cells
}

fn metadata_lines(report: &EvaluationReport, comment: &str) -> String {
    let m = &report.metadata;
    let mut s = String::new();
    let mut push = |k: &str, v: String| {
        s.push_str(&format!("{comment}{k} = {v}\n"));
    };
    push("toolkit_version", m.toolkit_version.clone());
    push("run_label", m.run_label.clone());
    if let Some(subset) = &m.subset {
        push("subset", subset.clone());
    }
    if !m.feature_groups.is_empty() {
        push("feature_groups", m.feature_groups.join("+"));
    }
    if m.folds > 0 {
        push("folds", m.folds.to_string());
    }
    push("repeats", m.repeats.to_string());
    if let Some(seed) = m.master_seed {
        push("seed", seed.to_string());
    }
    push("config_hash", m.config_hash.clone());
    for (k, v) in &m.config {
        push(&format!("config.{k}"), v.clone());
    }
    s
}

/// Single-run CSV: `# key = value` metadata comments, a header, one row.
pub fn report_to_csv(report: &EvaluationReport) -> String {
    let mut s = metadata_lines(report, "# ");
    s.push_str("run,subset,");
    s.push_str(PER_CLASS_HEADER);
    s.push('\n');
    s.push_str(&report.metadata.run_label);
    s.push(',');
    s.push_str(report.metadata.subset.as_deref().unwrap_or("-"));
    for cell in per_class_cells(&report.per_class, report.macro_f1) {
        s.push(',');
        s.push_str(&cell);
    }
    s.push('\n');
    s
}

/// Markdown rendering: the macro-F1 table in the feature-set x subset
/// layout, then the per-class table.
pub fn report_to_markdown(report: &EvaluationReport) -> String {
    combined_markdown(std::slice::from_ref(report))
}

pub fn report_to_json(report: &EvaluationReport) -> String {
    serde_json::to_string_pretty(report).expect("report serializes")
}

/// Render several runs as one table: feature-set rows, BRD and Full
/// macro-F1 columns, followed by per-class rows for each run.
pub fn combined_markdown(reports: &[EvaluationReport]) -> String {
    let mut s = String::new();
    s.push_str("# Evaluation Report\n\n");
    for report in reports {
        s.push_str(&format!("<!-- run: {} -->\n", report.metadata.run_label));
    }
    s.push_str(&metadata_lines(&reports[0], "> "));
    s.push('\n');

    s.push_str("| Feature Set | BRD | Full |\n|---|---|---|\n");
    // one row per run label, columns filled per subset
    let mut rows: Vec<(String, Option<f64>, Option<f64>)> = Vec::new();
    for report in reports {
        let label = report.metadata.run_label.clone();
        let entry = match rows.iter_mut().find(|(l, _, _)| *l == label) {
            Some(e) => e,
            None => {
                rows.push((label, None, None));
                rows.last_mut().unwrap()
            }
        };
        match report.metadata.subset.as_deref() {
            Some("brd") => entry.1 = Some(report.macro_f1),
            Some("full") => entry.2 = Some(report.macro_f1),
            _ => entry.2 = Some(report.macro_f1),
        }
    }
    let dash = "—".to_string();
    for (label, brd, full) in rows {
        s.push_str(&format!(
            "| {} | {} | {} |\n",
            label,
            brd.map(f3).unwrap_or_else(|| dash.clone()),
            full.map(f3).unwrap_or_else(|| dash.clone())
        ));
    }

    s.push_str("\n| Feature Set | Subset | ");
    s.push_str(&PER_CLASS_HEADER.replace(',', " | "));
    s.push_str(" |\n|---|---|---|---|---|---|---|---|---|---|---|---|\n");
    for report in reports {
        s.push_str(&format!(
            "| {} | {} | {} |\n",
            report.metadata.run_label,
            report.metadata.subset.as_deref().unwrap_or("-"),
            per_class_cells(&report.per_class, report.macro_f1).join(" | ")
        ));
    }
    s
}

pub fn combined_csv(reports: &[EvaluationReport]) -> String {
    let mut s = metadata_lines(&reports[0], "# ");
    s.push_str("run,subset,");
    s.push_str(PER_CLASS_HEADER);
    s.push('\n');
    for report in reports {
        s.push_str(&report.metadata.run_label);
        s.push(',');
        s.push_str(report.metadata.subset.as_deref().unwrap_or("-"));
        for cell in per_class_cells(&report.per_class, report.macro_f1) {
            s.push(',');
            s.push_str(&cell);
        }
        s.push('\n');
    }
    s
}

/// Write a report in the requested format.
pub fn emit_report(
    report: &EvaluationReport,
    path: impl AsRef<Path>,
    format: ReportFormat,
) -> Result<()> {
    let path = path.as_ref();
    let contents = match format {
        ReportFormat::Csv => report_to_csv(report),
        ReportFormat::Json => report_to_json(report),
        ReportFormat::Markdown => report_to_markdown(report),
    };
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// One parsed row of a report CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvReportRow {
    pub run_label: String,
    pub subset: Option<String>,
    pub per_class: [ClassMetrics; 3],
    pub macro_f1: f64,
}

/// Parse a report CSV produced by `report_to_csv`/`combined_csv`,
/// returning the metadata comments and the rows.
pub fn read_report_csv(contents: &str) -> Result<(BTreeMap<String, String>, Vec<CsvReportRow>)> {
    let mut metadata = BTreeMap::new();
    let mut rows = Vec::new();
    for line in contents.lines() {
        if let Some(rest) = line.strip_prefix("# ") {
            if let Some((k, v)) = rest.split_once(" = ") {
                metadata.insert(k.to_string(), v.to_string());
            }
            continue;
        }
        if line.starts_with("run,") || line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 12 {
            return Err(Error::InvalidInput(format!(
                "report row has {} fields, expected 12",
                fields.len()
            )));
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| Error::InvalidInput(format!("bad metric value `{s}`")))
        };
        let mut per_class = [ClassMetrics {
            precision: 0.0,
            recall: 0.0,
            f1: 0.0,
        }; 3];
        for c in 0..3 {
            per_class[c] = ClassMetrics {
                precision: parse(fields[2 + 3 * c])?,
                recall: parse(fields[3 + 3 * c])?,
                f1: parse(fields[4 + 3 * c])?,
            };
        }
        rows.push(CsvReportRow {
            run_label: fields[0].to_string(),
            subset: (fields[1] != "-").then(|| fields[1].to_string()),
            per_class,
            macro_f1: parse(fields[11])?,
        });
    }
    Ok((metadata, rows))
}
