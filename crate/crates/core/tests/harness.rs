use std::io::Write;

use mbasimp::harness::{
    load_dataset, run_dataset, write_report, DatasetFormat, Engine, HarnessError, RecordClass, ReportFormat,
    ReportOptions, RunConfig, Summary,
};
use mbasimp::verify::Evidence;

fn dataset_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn linear_toy_dataset() {
    let f = dataset_file("# toy\n(x|y)-(x&y)+42,(x^y)+42\n(x&y)+(x|y)\tx+y\n(x^y)+2*(x&y),x+y\n");
    let d = load_dataset(f.path(), DatasetFormat::Auto, true).unwrap();
    let (records, summary) = run_dataset(&d.entries, &RunConfig::default());
    assert_eq!(summary.total, 3);
    assert_eq!(summary.identical, 3);
    assert_eq!(summary.percent, 100.0);
    assert!(records.iter().all(|r| r.time_ms >= 0.0 && r.evidence == Some(Evidence::Structural)));
    assert_eq!(records.iter().map(|r| r.line).collect::<Vec<_>>(), [2, 3, 4]);
}

#[test]
fn malformed_line_is_skipped() {
    let f = dataset_file("x+y,y+x\n(x&,x\n~x+1,-x\n");
    let d = load_dataset(f.path(), DatasetFormat::Auto, false).unwrap();
    assert_eq!(d.entries.len(), 2);
    assert_eq!(d.invalid.len(), 1);
    let (records, summary) = run_dataset(&d.entries, &RunConfig::default());
    let summary = Summary { skipped: d.invalid.len(), ..summary };
    assert_eq!(summary.total, 2);
    assert_eq!(summary.skipped, 1);
    assert_eq!(records[1].class, RecordClass::Identical);
    assert!(matches!(load_dataset(f.path(), DatasetFormat::Auto, true), Err(HarnessError::InvalidLine { line: 2, .. })));
    assert!(matches!(
        load_dataset(&f.path().with_extension("missing"), DatasetFormat::Auto, false),
        Err(HarnessError::Io { .. })
    ));
}

#[test]
fn linear_engine_fails_on_e3() {
    let f = dataset_file("(x&y)*(x|y)+(x&~y)*(~x&y),x*y\n");
    let d = load_dataset(f.path(), DatasetFormat::Comma, true).unwrap();
    let cfg = RunConfig { engine: Engine::Simba, ..RunConfig::default() };
    let (records, summary) = run_dataset(&d.entries, &cfg);
    assert_eq!(records[0].output, "x&y");
    assert_eq!(records[0].class, RecordClass::Unproven);
    assert_eq!(summary.unproven, 1);
    assert_eq!(summary.percent, 0.0);
    // the general engine leaves it correct
    let (records, _) = run_dataset(&d.entries, &RunConfig::default());
    assert_ne!(records[0].class, RecordClass::Unproven);
}

#[test]
fn empty_dataset() {
    let f = dataset_file("# nothing here\n\n");
    let d = load_dataset(f.path(), DatasetFormat::Auto, true).unwrap();
    let (records, summary) = run_dataset(&d.entries, &RunConfig::default());
    assert!(records.is_empty());
    assert_eq!(summary, Summary::default());
    let mut out = Vec::new();
    write_report(&records, &summary, &mut out, ReportOptions { format: ReportFormat::Csv, timing: true }).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert!(text.starts_with("index,line,class"));
    assert!(text.contains("# summary\ntotal,identical,equivalent,unproven,timeout,skipped,percent,mean_ms,median_ms\n0,0,0,0,0,0,0.0,0.000,0.000\n"));
}

#[test]
fn timeouts_are_counted() {
    let f = dataset_file("((x^y)+2*(x&y))*((x|y)-(x&y)),(x+y)*(x^y)\n");
    let d = load_dataset(f.path(), DatasetFormat::Auto, true).unwrap();
    let mut cfg = RunConfig::default();
    cfg.simplify.time_budget_ms = 0;
    let (records, summary) = run_dataset(&d.entries, &cfg);
    assert!(records[0].budget_exceeded);
    assert_eq!(summary.timeout, 1);
    assert_eq!(records[0].evidence, None);
}

#[test]
fn parallel_matches_sequential() {
    let text: String = (0..24).map(|i| format!("(x^y)+2*(x&y)+{i},x+y+{i}\n(x|y)*{i}-(x&y)*{i},(x^y)*{i}\n")).collect();
    let f = dataset_file(&text);
    let d = load_dataset(f.path(), DatasetFormat::Auto, true).unwrap();
    let report = |parallel: bool, format: ReportFormat| {
        let cfg = RunConfig { parallel, ..RunConfig::default() };
        let (records, summary) = run_dataset(&d.entries, &cfg);
        let mut out = Vec::new();
        write_report(&records, &summary, &mut out, ReportOptions { format, timing: false }).unwrap();
        out
    };
    for format in [ReportFormat::Csv, ReportFormat::Json] {
        assert_eq!(report(true, format), report(false, format));
    }
}
