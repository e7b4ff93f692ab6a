mod config;

use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pasha::benchgen::{self, crossing_report, CurveFamily, CurveModel};
use pasha::experiment::{
    aggregate, emit_report, read_runs, run_cells, write_runs, BenchmarkSource, ExperimentSpec, MethodSpec, ReportFormat,
};
use pasha::simulator::write_trace;
use pasha::{RankingCriterion, ResourceSpec, RungPairing, SchedulerConfig, SchedulerMode};

use config::{FileConfig, GenerateSection, MethodSection};

/// Simulated PASHA / ASHA tuning experiments over tabulated learning curves.
#[derive(Debug, Parser)]
#[command(name = "pasha", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic benchmark file.
    Generate(GenerateArgs),
    /// Run every method × benchmark seed × scheduler seed and report.
    Run(RunArgs),
    /// Re-aggregate a runs.csv written by `run`.
    Report(ReportArgs),
    /// List config pairs whose curves cross, latest first.
    Crossings(CrossingsArgs),
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 256)]
    num_configs: usize,
    /// Tabulated resource units per curve.
    #[arg(long, default_value_t = 81)]
    units: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "power-law")]
    family: String,
    #[arg(long)]
    rate: Option<f64>,
    /// Resource from which the latent ranking is frozen.
    #[arg(long)]
    horizon: Option<u64>,
    /// Std of the observation noise added to every stored metric.
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long)]
    skew: Option<f64>,
    #[arg(long)]
    jitter: Option<f64>,
    #[arg(long)]
    crossing_rate: Option<f64>,
    /// Keep tables whose noisy observations cross at or after the horizon.
    #[arg(long)]
    allow_crossings: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Experiment file; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Benchmark file, one per benchmark seed.
    #[arg(long)]
    benchmark: Vec<PathBuf>,
    /// pasha, asha, one-epoch, no-increase or random; repeatable.
    #[arg(long)]
    method: Vec<String>,
    /// Ranking criterion, e.g. soft:0.025, direct, rbo:p=0.5,t=0.5.
    #[arg(long)]
    ranking: Option<String>,
    #[arg(long)]
    eta: Option<u64>,
    #[arg(long)]
    min_resource: Option<u64>,
    #[arg(long)]
    max_resource: Option<u64>,
    #[arg(long)]
    num_configs: Option<usize>,
    #[arg(long)]
    workers: Option<usize>,
    /// Scheduler seeds, comma separated.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// top-two or below-top.
    #[arg(long)]
    rung_pairing: Option<String>,
    /// Draw count of the random baseline.
    #[arg(long)]
    random_draws: Option<usize>,
    /// Directory for runs.csv, the report and (with --traces) event traces.
    #[arg(long)]
    out: Option<PathBuf>,
    /// markdown or csv.
    #[arg(long)]
    format: Option<String>,
    /// Also write one event trace per run under <out>/traces.
    #[arg(long)]
    traces: bool,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// runs.csv written by `run`.
    runs: PathBuf,
    #[arg(long, default_value = "markdown")]
    format: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CrossingsArgs {
    #[arg(long)]
    benchmark: PathBuf,
    /// Only report pairs crossing at or after this resource.
    #[arg(long, default_value_t = 1)]
    from: u64,
    #[arg(long, default_value_t = 20)]
    limit: usize,
}

/// Exit status classes.
enum Failure {
    Usage(String),
    Data(String),
    Invariant(String),
}

impl From<pasha::Error> for Failure {
    fn from(e: pasha::Error) -> Self {
        use pasha::Error as E;
        let message = e.to_string();
        let mut root = &e;
        while let E::Cell { source, .. } = root {
            root = source;
        }
        if e.is_invariant_violation() {
            Failure::Invariant(message)
        } else if matches!(root, E::InvalidArgument(_) | E::InvalidResources(_) | E::InvalidCriterion { .. }) {
            Failure::Usage(message)
        } else {
            Failure::Data(message)
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

fn usage<T>(message: impl Into<String>) -> CliResult<T> {
    Err(Failure::Usage(message.into()))
}

fn parse<T: std::str::FromStr<Err = pasha::Error>>(text: &str) -> CliResult<T> {
    text.parse().map_err(|e: pasha::Error| Failure::Usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Generate(args) => generate(args),
        Command::Run(args) => run(args),
        Command::Report(args) => report(args),
        Command::Crossings(args) => crossings(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Data(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Invariant(m)) => {
            eprintln!("internal invariant violated: {m}");
            ExitCode::from(3)
        }
    }
}

fn curve_model(section: &GenerateSection) -> CliResult<CurveModel> {
    let d = CurveModel::default();
    Ok(CurveModel {
        family: match &section.family {
            Some(f) => parse::<CurveFamily>(f)?,
            None => d.family,
        },
        rate: section.rate.unwrap_or(d.rate),
        asymptote_skew: section.skew.unwrap_or(d.asymptote_skew),
        asymptote_jitter: section.jitter.unwrap_or(d.asymptote_jitter),
        crossing_rate: section.crossing_rate.unwrap_or(d.crossing_rate),
        noise_std: section.noise.unwrap_or(d.noise_std),
        crossing_horizon: section.horizon.unwrap_or(d.crossing_horizon),
        allow_observed_crossings: section.allow_crossings,
        ..d
    })
}

fn generate(args: GenerateArgs) -> CliResult<()> {
    let section = GenerateSection {
        n_configs: args.num_configs,
        units: args.units,
        seeds: vec![args.seed],
        family: Some(args.family),
        rate: args.rate,
        noise: args.noise,
        horizon: args.horizon,
        skew: args.skew,
        jitter: args.jitter,
        crossing_rate: args.crossing_rate,
        allow_crossings: args.allow_crossings,
    };
    let model = curve_model(&section)?;
    let table = benchgen::generate(args.num_configs, args.units, &model, args.seed)?;
    benchgen::save(&table, &args.out)?;
    eprintln!("wrote {} configs × {} units to {}", table.len(), table.units(), args.out.display());
    Ok(())
}

/// Per-method settings after applying file defaults and flag overrides.
fn method_config(section: &MethodSection, file: &FileConfig, args: &RunArgs) -> CliResult<MethodSpec> {
    let mode: SchedulerMode = parse(&section.mode)?;
    let eta = args.eta.or(section.eta).or(file.eta).unwrap_or(3);
    let r = args.min_resource.or(section.min_resource).or(file.min_resource).unwrap_or(1);
    let max = args.max_resource.or(section.max_resource).or(file.max_resource);
    let Some(max) = max else {
        return usage("--max-resource is required");
    };
    let n = args.num_configs.or(section.num_configs).or(file.num_configs).unwrap_or(256);
    let ranking = args.ranking.as_deref().or(section.ranking.as_deref()).or(file.ranking.as_deref());
    let criterion = match ranking {
        Some(text) => parse::<RankingCriterion>(text)?,
        None => RankingCriterion::default(),
    };
    let pairing =
        match args.rung_pairing.as_deref().or(section.rung_pairing.as_deref()).or(file.rung_pairing.as_deref()) {
            None | Some("top-two") => RungPairing::TopTwo,
            Some("below-top") => RungPairing::BelowTop,
            Some(other) => return usage(format!("unknown rung pairing `{other}`")),
        };
    let mut config = SchedulerConfig::new(ResourceSpec::new(r, eta, max)?, mode, n, 0).with_criterion(criterion);
    config.rung_pairing = pairing;
    config.random_draws = args.random_draws.or(section.random_draws).or(file.random_draws);
    let name = section.name.clone().unwrap_or_else(|| mode.to_string());
    Ok(MethodSpec::new(name, config))
}

/// Paths in an experiment file are relative to the file's directory.
fn resolve(base: Option<&Path>, path: &Path) -> PathBuf {
    match base {
        Some(dir) if path.is_relative() => dir.join(path),
        _ => path.to_path_buf(),
    }
}

fn run(args: RunArgs) -> CliResult<()> {
    let (file, base) = match &args.config {
        Some(path) => (FileConfig::load(path).map_err(Failure::Usage)?, path.parent().map(Path::to_path_buf)),
        None => (FileConfig::default(), None),
    };

    let benchmark = if !args.benchmark.is_empty() {
        BenchmarkSource::Files(args.benchmark.clone())
    } else if !file.benchmark.is_empty() {
        BenchmarkSource::Files(file.benchmark.iter().map(|p| resolve(base.as_deref(), p)).collect())
    } else if let Some(section) = &file.generate {
        BenchmarkSource::Generated {
            n_configs: section.n_configs,
            units: section.units,
            model: curve_model(section)?,
            seeds: section.seeds.clone(),
        }
    } else {
        return usage("no benchmark: pass --benchmark or set `benchmark`/[generate] in --config");
    };

    let sections: Vec<MethodSection> = if !args.method.is_empty() {
        args.method
            .iter()
            .map(|m| MethodSection {
                name: None,
                mode: m.clone(),
                ranking: None,
                eta: None,
                min_resource: None,
                max_resource: None,
                num_configs: None,
                rung_pairing: None,
                random_draws: None,
            })
            .collect()
    } else if !file.method.is_empty() {
        file.method.clone()
    } else {
        return usage("no method: pass --method or add [[method]] tables to --config");
    };
    let methods = sections.iter().map(|s| method_config(s, &file, &args)).collect::<CliResult<Vec<_>>>()?;

    let format: ReportFormat = parse(args.format.as_deref().or(file.format.as_deref()).unwrap_or("markdown"))?;
    let out = args.out.clone().or_else(|| file.out.as_deref().map(|o| resolve(base.as_deref(), o)));
    if args.traces && out.is_none() {
        return usage("--traces needs --out");
    }
    let spec = ExperimentSpec {
        benchmark,
        methods,
        workers: args.workers.or(file.workers).unwrap_or(4),
        scheduler_seeds: args.seeds.clone().or(file.seeds.clone()).unwrap_or_else(|| vec![0]),
    };

    let cells = run_cells(&spec)?;
    let runs: Vec<_> = cells.iter().map(|c| c.record.clone()).collect();
    let report = aggregate(runs)?;
    let text = emit_report(&report, format)?;

    if let Some(dir) = out {
        fs::create_dir_all(&dir)?;
        write_runs(&report.runs, fs::File::create(dir.join("runs.csv"))?)?;
        let name = match format {
            ReportFormat::Markdown => "report.md",
            ReportFormat::Csv => "report.csv",
        };
        fs::write(dir.join(name), &text)?;
        if args.traces {
            let traces = dir.join("traces");
            fs::create_dir_all(&traces)?;
            for cell in &cells {
                let r = &cell.record;
                let file = traces.join(format!("{}-b{}-s{}.csv", r.method, r.benchmark_seed, r.scheduler_seed));
                write_trace(&cell.sim.trace, io::BufWriter::new(fs::File::create(file)?))?;
            }
        }
    }
    io::stdout().write_all(text.as_bytes())?;
    Ok(())
}

fn report(args: ReportArgs) -> CliResult<()> {
    let format: ReportFormat = parse(&args.format)?;
    let file =
        fs::File::open(&args.runs).map_err(|e| Failure::Data(format!("cannot open {}: {e}", args.runs.display())))?;
    let report = aggregate(read_runs(BufReader::new(file))?)?;
    let text = emit_report(&report, format)?;
    match args.out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn crossings(args: CrossingsArgs) -> CliResult<()> {
    let table = benchgen::load(&args.benchmark)?;
    let report: Vec<_> = crossing_report(&table).into_iter().filter(|c| c.last_crossing >= args.from).collect();
    let mut out = io::stdout().lock();
    writeln!(out, "{} crossing pairs", report.len())?;
    if let Some(latest) = report.first() {
        writeln!(out, "latest crossing at {} {}", latest.last_crossing, table.unit_label)?;
    }
    for c in report.iter().take(args.limit) {
        writeln!(out, "{}\t{}\t{}", c.pair.0, c.pair.1, c.last_crossing)?;
    }
    Ok(())
}
