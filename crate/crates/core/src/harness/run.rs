use std::time::Instant;

use serde::Serialize;

use super::{DatasetEntry, HarnessError};
use crate::expr::{metric_value, parse, print, Expr, Metric};
use crate::linear::simplify_linear;
use crate::pipeline::{simplify_general, SimplifyConfig};
use crate::verify::{check, Evidence, OutcomeClass, VerifyConfig};

/// Which simplifier processes the entries.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// Linear simplification only; wrong for inputs not reducible to a
    /// linear MBA, which verification then flags.
    Simba,
    #[default]
    Gamba,
}

impl std::str::FromStr for Engine {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "simba" | "linear" => Ok(Engine::Simba),
            "gamba" | "general" => Ok(Engine::Gamba),
            other => Err(HarnessError::Config(format!("unknown engine `{other}` (expected simba or gamba)"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub engine: Engine,
    pub simplify: SimplifyConfig,
    pub verify: VerifyConfig,
    /// Process entries on the rayon pool (needs the `parallel` feature).
    pub parallel: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            engine: Engine::Gamba,
            simplify: SimplifyConfig::default(),
            verify: VerifyConfig::default(),
            parallel: true,
        }
    }
}

impl RunConfig {
    /// Keeps the verifier's simplifier in step with the main one.
    pub fn sync(&mut self) {
        self.verify.simplify = self.simplify.clone();
        self.verify.seed = self.simplify.seed;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordClass {
    Identical,
    Equivalent,
    Unproven,
    Timeout,
}

impl From<OutcomeClass> for RecordClass {
    fn from(c: OutcomeClass) -> Self {
        match c {
            OutcomeClass::Identical => RecordClass::Identical,
            OutcomeClass::Equivalent => RecordClass::Equivalent,
            OutcomeClass::Unproven => RecordClass::Unproven,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Measures {
    pub nodes: usize,
    pub terms: usize,
    pub alternation: usize,
}

impl Measures {
    pub fn of(e: &Expr, cfg: &SimplifyConfig) -> Self {
        let w = cfg.width;
        Measures {
            nodes: metric_value(e, Metric::NodeCount, w),
            terms: metric_value(e, Metric::TermCount, w),
            alternation: metric_value(e, Metric::MbaAlternation, w),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRecord {
    pub index: usize,
    pub line: usize,
    pub input: String,
    pub ground_truth: String,
    pub output: String,
    pub class: RecordClass,
    pub evidence: Option<Evidence>,
    /// Wall time of the simplification alone.
    pub time_ms: f64,
    pub input_measures: Measures,
    pub output_measures: Measures,
    pub budget_exceeded: bool,
    /// Parse error of the entry at the configured width, if any.
    pub error: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub identical: usize,
    pub equivalent: usize,
    pub unproven: usize,
    pub timeout: usize,
    /// Dataset lines that could not be loaded; not part of `total`.
    pub skipped: usize,
    /// Share of identical and equivalent results.
    pub percent: f64,
    pub mean_ms: f64,
    pub median_ms: f64,
}

impl Summary {
    pub fn from_records(records: &[RunRecord], skipped: usize) -> Self {
        let count = |c: RecordClass| records.iter().filter(|r| r.class == c).count();
        let total = records.len();
        let (identical, equivalent) = (count(RecordClass::Identical), count(RecordClass::Equivalent));
        let mut times: Vec<f64> = records.iter().map(|r| r.time_ms).collect();
        times.sort_by(f64::total_cmp);
        let median_ms = match times.len() {
            0 => 0.0,
            n if n % 2 == 1 => times[n / 2],
            n => (times[n / 2 - 1] + times[n / 2]) / 2.0,
        };
        Summary {
            total,
            identical,
            equivalent,
            unproven: count(RecordClass::Unproven),
            timeout: count(RecordClass::Timeout),
            skipped,
            percent: if total == 0 { 0.0 } else { 100.0 * (identical + equivalent) as f64 / total as f64 },
            mean_ms: if total == 0 { 0.0 } else { times.iter().sum::<f64>() / total as f64 },
            median_ms,
        }
    }
}

/// Simplifies and verifies one entry.
pub fn run_entry(index: usize, entry: &DatasetEntry, cfg: &RunConfig) -> RunRecord {
    let w = cfg.simplify.width;
    let mut record = RunRecord {
        index,
        line: entry.line,
        input: entry.complex.clone(),
        ground_truth: entry.ground_truth.clone(),
        output: String::new(),
        class: RecordClass::Unproven,
        evidence: None,
        time_ms: 0.0,
        input_measures: Measures::default(),
        output_measures: Measures::default(),
        budget_exceeded: false,
        error: None,
    };
    let (e, gt) = match (parse(&entry.complex, w), parse(&entry.ground_truth, w)) {
        (Ok(e), Ok(gt)) => (e, gt),
        (Err(err), _) | (_, Err(err)) => {
            record.error = Some(err.to_string());
            return record;
        }
    };
    let start = Instant::now();
    let (out, exceeded) = match cfg.engine {
        Engine::Simba => (simplify_linear(&e, &cfg.simplify.linear_config()), false),
        Engine::Gamba => {
            let s = simplify_general(&e, &cfg.simplify);
            (s.expr, s.budget_exceeded)
        }
    };
    record.time_ms = start.elapsed().as_secs_f64() * 1e3;
    record.output = print(&out, w);
    record.input_measures = Measures::of(&e, &cfg.simplify);
    record.output_measures = Measures::of(&out, &cfg.simplify);
    record.budget_exceeded = exceeded;
    if exceeded {
        record.class = RecordClass::Timeout;
        return record;
    }
    let outcome = check(&out, &gt, &cfg.verify);
    record.class = outcome.class.into();
    record.evidence = Some(outcome.evidence);
    record
}

fn map_entries<R: Send>(
    entries: &[DatasetEntry],
    parallel: bool,
    f: impl Fn(usize, &DatasetEntry) -> R + Sync + Send,
) -> Vec<R> {
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        return entries.par_iter().enumerate().map(|(i, e)| f(i, e)).collect();
    }
    let _ = parallel;
    entries.iter().enumerate().map(|(i, e)| f(i, e)).collect()
}

/// Runs every entry; records come back in input order.
pub fn run_dataset(entries: &[DatasetEntry], cfg: &RunConfig) -> (Vec<RunRecord>, Summary) {
    let records = map_entries(entries, cfg.parallel, |i, e| run_entry(i, e, cfg));
    let summary = Summary::from_records(&records, 0);
    (records, summary)
}
