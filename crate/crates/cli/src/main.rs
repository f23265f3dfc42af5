use std::collections::HashMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use mbasimp::expr::{parse, print, Metric, MetricOrder, Width};
use mbasimp::harness::{
    load_dataset, run_dataset, write_report, DatasetFormat, Engine, ReportFormat, ReportOptions, RunConfig, Summary,
};
use mbasimp::linear::{simplify_linear, table};
use mbasimp::pipeline::{simplify_general, SimplifyConfig};

#[derive(Parser)]
#[command(name = "mbasimp", version, about = "Simplify mixed Boolean-arithmetic expressions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simplify one expression and print the result.
    Simplify {
        expr: String,
        #[command(flatten)]
        opts: EngineOpts,
    },
    /// Simplify and verify every entry of a dataset, then print a report.
    Run(RunArgs),
    /// Regenerate the bitwise lookup tables.
    GenTable {
        /// Directory receiving bitwise_t{1,2,3}.txt.
        #[arg(long, default_value = "crates/core/data")]
        out: PathBuf,
    },
}

#[derive(Args, Default)]
struct EngineOpts {
    /// simba (linear only) or gamba (general).
    #[arg(long)]
    engine: Option<String>,
    /// Word width in bits.
    #[arg(long)]
    bits: Option<u32>,
    /// nodes, alternation, terms or length.
    #[arg(long)]
    metric: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    dataset: PathBuf,
    #[command(flatten)]
    engine: EngineOpts,
    /// Report format: csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Dataset separator: auto, comma or tab.
    #[arg(long)]
    input_format: Option<String>,
    /// Time budget per expression.
    #[arg(long)]
    timeout_ms: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Abort on the first malformed dataset line.
    #[arg(long)]
    strict: bool,
    /// Exit with 0 even if some result could not be verified.
    #[arg(long)]
    no_fail: bool,
    /// Leave run times out of the report.
    #[arg(long)]
    no_timing: bool,
    /// Process entries one after another.
    #[arg(long)]
    sequential: bool,
    /// Write the report here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// File of key=value lines using the long flag names.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn read_config(path: &Path) -> Result<HashMap<String, String>> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut map = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("{}:{}: expected key=value", path.display(), i + 1);
        };
        map.insert(k.trim().replace('_', "-"), v.trim().to_string());
    }
    Ok(map)
}

/// Flag values win over config values.
struct Settings {
    file: HashMap<String, String>,
}

impl Settings {
    fn get<T: std::str::FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.get(key) {
            Some(v) => v.parse().map(Some).map_err(|e| anyhow::anyhow!("config key `{key}`: {e}")),
            None => Ok(None),
        }
    }

    fn switch(&self, flag: bool, key: &str) -> Result<bool> {
        Ok(flag || self.get::<bool>(None, key)?.unwrap_or(false))
    }
}

fn engine_config(opts: EngineOpts, settings: &Settings) -> Result<(Engine, SimplifyConfig)> {
    let engine: Engine = settings.get(opts.engine, "engine")?.map(|s: String| s.parse()).transpose()?.unwrap_or_default();
    let bits = settings.get(opts.bits, "bits")?.unwrap_or(64);
    let width = Width::new(bits).with_context(|| format!("invalid width {bits}"))?;
    let mut cfg = SimplifyConfig::with_width(width);
    if let Some(m) = settings.get(opts.metric, "metric")? {
        cfg.metric = MetricOrder::with_primary(m.parse::<Metric>()?);
    }
    Ok((engine, cfg))
}

fn simplify(expr: &str, opts: EngineOpts) -> Result<()> {
    let settings = Settings { file: HashMap::new() };
    let (engine, cfg) = engine_config(opts, &settings)?;
    let e = parse(expr, cfg.width)?;
    let out = match engine {
        Engine::Simba => simplify_linear(&e, &cfg.linear_config()),
        Engine::Gamba => {
            let s = simplify_general(&e, &cfg);
            if s.budget_exceeded {
                eprintln!("warning: time budget exceeded, result may not be fully simplified");
            }
            s.expr
        }
    };
    println!("{}", print(&out, cfg.width));
    Ok(())
}

fn run(args: RunArgs) -> Result<ExitCode> {
    let file = match &args.config {
        Some(p) => read_config(p)?,
        None => HashMap::new(),
    };
    let settings = Settings { file };
    let (engine, mut simplify) = engine_config(args.engine, &settings)?;
    if let Some(t) = settings.get(args.timeout_ms, "timeout-ms")? {
        simplify.time_budget_ms = t;
    }
    if let Some(s) = settings.get(args.seed, "seed")? {
        simplify.seed = s;
    }
    let format: ReportFormat =
        settings.get(args.format, "format")?.map(|s: String| s.parse()).transpose()?.unwrap_or_default();
    let input_format: DatasetFormat =
        settings.get(args.input_format, "input-format")?.map(|s: String| s.parse()).transpose()?.unwrap_or_default();
    let strict = settings.switch(args.strict, "strict")?;
    let no_fail = settings.switch(args.no_fail, "no-fail")?;
    let timing = !settings.switch(args.no_timing, "no-timing")?;
    let sequential = settings.switch(args.sequential, "sequential")?;

    let dataset = load_dataset(&args.dataset, input_format, strict)?;
    for bad in &dataset.invalid {
        eprintln!("skipping line {}: {}", bad.line, bad.reason);
    }
    let mut cfg = RunConfig { engine, simplify, parallel: !sequential, ..RunConfig::default() };
    cfg.sync();
    let (records, summary) = run_dataset(&dataset.entries, &cfg);
    let summary = Summary { skipped: dataset.invalid.len(), ..summary };

    let opts = ReportOptions { format, timing };
    match &args.output {
        Some(path) => {
            let mut f = io::BufWriter::new(
                fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
            );
            write_report(&records, &summary, &mut f, opts)?;
            f.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write_report(&records, &summary, &mut lock, opts)?;
        }
    }
    eprintln!(
        "{} entries: {} identical, {} equivalent, {} unproven, {} timeout ({:.1}%)",
        summary.total, summary.identical, summary.equivalent, summary.unproven, summary.timeout, summary.percent
    );
    Ok(if summary.unproven > 0 && !no_fail { ExitCode::FAILURE } else { ExitCode::SUCCESS })
}

fn gen_table(out: &Path) -> Result<()> {
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    for t in 1..=3 {
        let path = out.join(format!("bitwise_t{t}.txt"));
        fs::write(&path, table::render(&table::generate(t))).with_context(|| format!("cannot write {}", path.display()))?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simplify { expr, opts } => simplify(&expr, opts).map(|_| ExitCode::SUCCESS),
        Command::Run(args) => run(args),
        Command::GenTable { out } => gen_table(&out).map(|_| ExitCode::SUCCESS),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(2)
    })
}
