use std::io::Write;

use serde::Serialize;

use super::{HarnessError, RunRecord, Summary};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ReportFormat {
    #[default]
    Csv,
    /// One JSON object per line, the summary last.
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" | "jsonl" => Ok(ReportFormat::Json),
            other => Err(HarnessError::Config(format!("unknown report format `{other}` (expected csv or json)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReportOptions {
    pub format: ReportFormat,
    /// Include run times. Without them, reports of identical runs are
    /// byte-identical.
    pub timing: bool,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions { format: ReportFormat::Csv, timing: true }
    }
}

#[derive(Serialize)]
struct Row<'a> {
    index: usize,
    line: usize,
    class: &'a str,
    evidence: String,
    input_nodes: usize,
    output_nodes: usize,
    input_terms: usize,
    output_terms: usize,
    input_alternation: usize,
    output_alternation: usize,
    budget_exceeded: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    time_ms: Option<String>,
    output: &'a str,
    ground_truth: &'a str,
    input: &'a str,
}

#[derive(Serialize)]
struct SummaryRow {
    total: usize,
    identical: usize,
    equivalent: usize,
    unproven: usize,
    timeout: usize,
    skipped: usize,
    percent: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    mean_ms: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    median_ms: Option<String>,
}

fn class_name(r: &RunRecord) -> &'static str {
    match r.class {
        super::RecordClass::Identical => "identical",
        super::RecordClass::Equivalent => "equivalent",
        super::RecordClass::Unproven => "unproven",
        super::RecordClass::Timeout => "timeout",
    }
}

fn row<'a>(r: &'a RunRecord, timing: bool) -> Row<'a> {
    Row {
        index: r.index,
        line: r.line,
        class: class_name(r),
        evidence: r.evidence.map(|e| format!("{e:?}").to_lowercase()).unwrap_or_default(),
        input_nodes: r.input_measures.nodes,
        output_nodes: r.output_measures.nodes,
        input_terms: r.input_measures.terms,
        output_terms: r.output_measures.terms,
        input_alternation: r.input_measures.alternation,
        output_alternation: r.output_measures.alternation,
        budget_exceeded: r.budget_exceeded,
        time_ms: timing.then(|| format!("{:.3}", r.time_ms)),
        output: &r.output,
        ground_truth: &r.ground_truth,
        input: &r.input,
    }
}

fn summary_row(s: &Summary, timing: bool) -> SummaryRow {
    SummaryRow {
        total: s.total,
        identical: s.identical,
        equivalent: s.equivalent,
        unproven: s.unproven,
        timeout: s.timeout,
        skipped: s.skipped,
        percent: format!("{:.1}", s.percent),
        mean_ms: timing.then(|| format!("{:.3}", s.mean_ms)),
        median_ms: timing.then(|| format!("{:.3}", s.median_ms)),
    }
}

/// Writes per-entry rows followed by the summary. CSV reports put the
/// summary in a second block after a `# summary` line.
pub fn write_report(
    records: &[RunRecord],
    summary: &Summary,
    sink: &mut dyn Write,
    opts: ReportOptions,
) -> Result<(), HarnessError> {
    match opts.format {
        ReportFormat::Csv => {
            {
                let mut w = csv::Writer::from_writer(&mut *sink);
                if records.is_empty() {
                    w.write_record(EMPTY_HEADER.iter().filter(|h| opts.timing || **h != "time_ms"))?;
                }
                for r in records {
                    w.serialize(row(r, opts.timing))?;
                }
                w.flush()?;
            }
            writeln!(sink, "# summary")?;
            let mut w = csv::Writer::from_writer(&mut *sink);
            w.serialize(summary_row(summary, opts.timing))?;
            w.flush()?;
        }
        ReportFormat::Json => {
            for r in records {
                serde_json::to_writer(&mut *sink, &row(r, opts.timing))?;
                writeln!(sink)?;
            }
            #[derive(Serialize)]
            struct Wrapped {
                summary: SummaryRow,
            }
            serde_json::to_writer(&mut *sink, &Wrapped { summary: summary_row(summary, opts.timing) })?;
            writeln!(sink)?;
        }
    }
    Ok(())
}

const EMPTY_HEADER: [&str; 15] = [
    "index",
    "line",
    "class",
    "evidence",
    "input_nodes",
    "output_nodes",
    "input_terms",
    "output_terms",
    "input_alternation",
    "output_alternation",
    "budget_exceeded",
    "time_ms",
    "output",
    "ground_truth",
    "input",
];
