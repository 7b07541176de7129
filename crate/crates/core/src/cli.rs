//! The `empo` command line.
//!
//! Exit codes: 0 for a definite verdict or a passing fixture run, 2 for
//! usage and I/O errors, 3 for an Inconclusive verdict, 4 for a fixture
//! mismatch.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{arithmetic_grid, parse_grid, parse_size, parse_weights, ExperimentConfig, CONFIG_HELP};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::harness::{run_experiment, sweep_k, Family, ResponseMode, TrialPolicy, WorkloadSpec};
use crate::sortlab::{f64_less, quicksort_instrumented, quicksort_instrumented_by, OperationCounts};
use crate::statfit::{fit_ols, render_kv, render_report, TermSet};
use crate::table::ResponseTable;
use crate::verdict::{combined_verdict, ComplexityVerdict, Label, SelectionPolicy};
use crate::workloads::{gen_heavy_tail, gen_tied, gen_uniform, HeavyTailSpec, Seed, TieDensitySpec, UniformKSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "empo", version, about = "Empirical complexity estimation for an instrumented quicksort")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print one generated sample per line.
    Generate(GenerateArgs),
    /// Sort keys read from a file (one per line) and print operation counts.
    Sort(SortArgs),
    /// Measure responses over a size grid and write `n,y,trials,stddev`.
    Measure(MeasureArgs),
    /// Measure responses over a grid of support sizes K at fixed n.
    SweepK(SweepKArgs),
    /// Fit a growth model to a response CSV and print the regression report.
    Fit(FitArgs),
    /// Label a response curve, optionally against a quadratic reference curve.
    Verdict(VerdictArgs),
    /// Refit the bundled reference tables and compare every printed statistic.
    ReproducePaper(ReproduceArgs),
    /// Measure, fit and label as described by a config file.
    #[command(after_long_help = CONFIG_HELP)]
    Run(RunArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum FamilyKind {
    Uniform,
    Tied,
    HeavyTail,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ResponseKind {
    Count,
    Time,
}

fn size_arg(s: &str) -> std::result::Result<u64, String> {
    parse_size(s).ok_or_else(|| format!("`{s}` is not a size"))
}

#[derive(Args, Debug)]
struct FamilyArgs {
    #[arg(long, value_enum, default_value_t = FamilyKind::Uniform)]
    family: FamilyKind,
    /// Support size for the uniform family (accepts 2^k).
    #[arg(long, value_parser = size_arg)]
    k: Option<u64>,
    /// Tie density for the tied family.
    #[arg(long)]
    td: Option<f64>,
    /// Tied family: exact copies instead of i.i.d. draws.
    #[arg(long)]
    exact_multiset: bool,
}

impl FamilyArgs {
    fn family(&self) -> Result<Family> {
        let misplaced = |what: &str| Err(Error::invalid(format!("--{what} does not apply to this family")));
        match self.family {
            FamilyKind::Uniform => {
                if self.td.is_some() || self.exact_multiset {
                    return misplaced("td/--exact-multiset");
                }
                Ok(Family::UniformK(self.k.unwrap_or(1 << 30)))
            }
            FamilyKind::Tied => {
                if self.k.is_some() {
                    return misplaced("k");
                }
                Ok(Family::TieDensity {
                    tie_density: self.td.unwrap_or(1.0),
                    exact_multiset: self.exact_multiset,
                })
            }
            FamilyKind::HeavyTail => {
                if self.k.is_some() || self.td.is_some() || self.exact_multiset {
                    return misplaced("k/--td/--exact-multiset");
                }
                Ok(Family::HeavyTail)
            }
        }
    }
}

#[derive(Args, Debug)]
struct TrialArgs {
    #[arg(long, default_value_t = 30)]
    trials_min: u64,
    #[arg(long, default_value_t = 500)]
    trials_max: u64,
    /// Stop once SEM / mean falls below this.
    #[arg(long, default_value_t = 0.01)]
    rel_sem_target: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = ResponseKind::Count)]
    response: ResponseKind,
    /// Comparison, exchange and partition-call weights for count mode.
    #[arg(long, default_value = "1,1,1")]
    weights: String,
}

impl TrialArgs {
    fn policy(&self) -> TrialPolicy {
        TrialPolicy {
            min: self.trials_min,
            max: self.trials_max,
            rel_sem_target: self.rel_sem_target,
        }
    }

    fn response(&self) -> Result<ResponseMode> {
        Ok(match self.response {
            ResponseKind::Count => ResponseMode::WeightedCount(parse_weights(&self.weights)?),
            ResponseKind::Time => ResponseMode::WallTime,
        })
    }
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long, value_parser = size_arg)]
    n: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SortArgs {
    /// File of keys, one per line; integers, or floats if any key is not an integer.
    input: PathBuf,
    /// Also print the sorted keys.
    #[arg(long)]
    print_sorted: bool,
}

#[derive(Args, Debug)]
struct MeasureArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Sizes as a list (`1024,4096`), power-of-two range (`2^10..2^14`) or
    /// range with points per octave (`2^10..2^17:2`).
    #[arg(long, conflicts_with_all = ["grid_start", "grid_stop", "grid_step"])]
    grid: Option<String>,
    #[arg(long, value_parser = size_arg, requires_all = ["grid_stop", "grid_step"])]
    grid_start: Option<u64>,
    #[arg(long, value_parser = size_arg)]
    grid_stop: Option<u64>,
    #[arg(long, value_parser = size_arg)]
    grid_step: Option<u64>,
    #[command(flatten)]
    trials: TrialArgs,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepKArgs {
    #[arg(long, value_parser = size_arg)]
    n: u64,
    /// Increasing list of support sizes.
    #[arg(long)]
    k_grid: String,
    #[command(flatten)]
    trials: TrialArgs,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FitArgs {
    input: PathBuf,
    #[arg(long, default_value = "const,n,nlogn,n2")]
    terms: String,
    #[arg(long, default_value_t = 2.0)]
    log_base: f64,
    /// Print a `key=value` dump instead of the block report.
    #[arg(long)]
    kv: bool,
    /// List every observation, not only flagged ones.
    #[arg(long)]
    all_observations: bool,
    /// Write `model,n,observed,fitted` for each candidate model.
    #[arg(long)]
    plot_data: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PolicyArgs {
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 2.0)]
    s_ratio_min: f64,
    #[arg(long, default_value_t = 1e-9)]
    noise_floor: f64,
    #[arg(long, default_value_t = 2.0)]
    log_base: f64,
}

#[derive(Args, Debug)]
struct VerdictArgs {
    input: PathBuf,
    /// Quadratic reference curve on the same grid.
    reference: Option<PathBuf>,
    #[command(flatten)]
    policy: PolicyArgs,
}

#[derive(Args, Debug)]
struct ReproduceArgs {
    /// Fixture id, or `all`.
    #[arg(default_value = "all")]
    id: String,
    /// Print only the summary line of each fixture.
    #[arg(long)]
    summary: bool,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `[output] dir`.
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn tag(stage: &'static str) -> impl FnOnce(Error) -> Error {
    move |e| match e {
        Error::Stage { .. } => e,
        e => e.in_stage(stage),
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Generate(a) => generate(a).map_err(tag("generate")),
        Command::Sort(a) => sort(a).map_err(tag("sort")),
        Command::Measure(a) => measure(a).map_err(tag("measure")),
        Command::SweepK(a) => sweep(a).map_err(tag("sweep-k")),
        Command::Fit(a) => fit(a).map_err(tag("fit")),
        Command::Verdict(a) => verdict(a).map_err(tag("verdict")),
        Command::ReproducePaper(a) => reproduce(a).map_err(tag("reproduce-paper")),
        Command::Run(a) => run(a),
    }
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => Ok(fs::write(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

fn read_table(path: &Path) -> Result<ResponseTable> {
    ResponseTable::from_csv(&read(path)?, &path.display().to_string())
}

fn generate(a: GenerateArgs) -> Result<i32> {
    let n = usize::try_from(a.n).map_err(|_| Error::invalid("n too large"))?;
    let seed = Seed(a.seed);
    let mut out = String::new();
    match a.family.family()? {
        Family::UniformK(k) => gen_uniform(UniformKSpec { n, k }, seed)?
            .iter()
            .for_each(|v| {
                let _ = writeln!(out, "{v}");
            }),
        Family::TieDensity {
            tie_density,
            exact_multiset,
        } => gen_tied(
            TieDensitySpec {
                n,
                tie_density,
                exact_multiset,
            },
            seed,
        )?
        .iter()
        .for_each(|v| {
            let _ = writeln!(out, "{v}");
        }),
        Family::HeavyTail => {
            let draws = gen_heavy_tail(HeavyTailSpec { n }, seed)?;
            if draws.cap_events > 0 {
                eprintln!("note: {} draws hit the k cap", draws.cap_events);
            }
            draws.values.iter().for_each(|v| {
                let _ = writeln!(out, "{v}");
            });
        }
    }
    emit(a.output.as_deref(), &out)?;
    Ok(EXIT_OK)
}

fn counts_text(c: &OperationCounts) -> String {
    format!(
        "comparisons={}\nexchanges={}\npartition_calls={}\n",
        c.comparisons, c.exchanges, c.partition_calls
    )
}

fn sort(a: SortArgs) -> Result<i32> {
    let text = read(&a.input)?;
    let name = a.input.display().to_string();
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    let mut out = String::new();
    if let Ok(mut keys) = lines.iter().map(|(_, l)| l.parse::<i64>()).collect::<std::result::Result<Vec<_>, _>>() {
        let c = quicksort_instrumented(&mut keys);
        out.push_str(&counts_text(&c));
        if a.print_sorted {
            keys.iter().for_each(|k| {
                let _ = writeln!(out, "{k}");
            });
        }
    } else {
        let mut keys = Vec::with_capacity(lines.len());
        for (line, l) in &lines {
            keys.push(
                l.parse::<f64>()
                    .map_err(|_| Error::parse(&name, *line, format!("bad key `{l}`")))?,
            );
        }
        let c = quicksort_instrumented_by(&mut keys, f64_less);
        out.push_str(&counts_text(&c));
        if a.print_sorted {
            keys.iter().for_each(|k| {
                let _ = writeln!(out, "{k}");
            });
        }
    }
    print!("{out}");
    Ok(EXIT_OK)
}

fn measure(a: MeasureArgs) -> Result<i32> {
    let grid = match (&a.grid, a.grid_start) {
        (Some(g), _) => parse_grid(g)?,
        (None, Some(start)) => arithmetic_grid(start, a.grid_stop.unwrap_or(start), a.grid_step.unwrap_or(1))?,
        (None, None) => return Err(Error::invalid("give --grid or --grid-start/--grid-stop/--grid-step")),
    };
    let spec = WorkloadSpec {
        family: a.family.family()?,
        size_grid: grid,
        trials: a.trials.policy(),
        seed: Seed(a.trials.seed),
        response: a.trials.response()?,
    };
    match run_experiment(&spec) {
        Ok(t) => {
            emit(a.output.as_deref(), &t.to_csv())?;
            Ok(EXIT_OK)
        }
        Err(Error::Aborted { n, partial, source }) => {
            emit(a.output.as_deref(), &partial.to_csv())?;
            Err(Error::Aborted { n, partial, source })
        }
        Err(e) => Err(e),
    }
}

fn sweep(a: SweepKArgs) -> Result<i32> {
    let grid = parse_grid(&a.k_grid)?;
    let s = sweep_k(a.n, &grid, &a.trials.policy(), Seed(a.trials.seed), &a.trials.response()?)?;
    emit(a.output.as_deref(), &s.to_csv())?;
    Ok(EXIT_OK)
}

/// Long-format fitted curves of the three candidate models.
pub fn plot_data(table: &ResponseTable, log_base: f64) -> Result<String> {
    let mut out = String::from("model,n,observed,fitted\n");
    for (name, terms) in [
        ("linear", TermSet::linear().with_log_base(log_base)?),
        ("nlogn", TermSet::n_log_n(log_base)),
        ("quadratic", TermSet::quadratic(log_base)),
    ] {
        let fit = fit_ols(table, &terms).map_err(|e| Error::invalid(format!("{name} model: {e}")))?;
        for o in &fit.obs {
            let _ = writeln!(out, "{name},{},{},{}", o.n, o.y, o.fit);
        }
    }
    Ok(out)
}

fn fit(a: FitArgs) -> Result<i32> {
    let table = read_table(&a.input)?;
    let terms = TermSet::parse(&a.terms, a.log_base)?;
    let fit = fit_ols(&table, &terms)?;
    if a.kv {
        print!("{}", render_kv(&fit));
    } else {
        print!("{}", render_report(&fit, "y", a.all_observations));
    }
    if let Some(p) = &a.plot_data {
        fs::write(p, plot_data(&table, a.log_base)?)?;
    }
    Ok(EXIT_OK)
}

fn verdict_exit(v: &ComplexityVerdict) -> i32 {
    if v.label == Label::Inconclusive {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    }
}

fn verdict(a: VerdictArgs) -> Result<i32> {
    let table = read_table(&a.input)?;
    let reference = a.reference.as_deref().map(read_table).transpose()?;
    let policy = SelectionPolicy {
        alpha: a.policy.alpha,
        s_ratio_min: a.policy.s_ratio_min,
        noise_floor: a.policy.noise_floor,
    };
    let v = combined_verdict(&table, reference.as_ref(), &policy, a.policy.log_base)?;
    print!("{v}");
    Ok(verdict_exit(&v))
}

fn reproduce(a: ReproduceArgs) -> Result<i32> {
    let reports = if a.id == "all" {
        fixtures::reproduce_all()?
    } else {
        vec![fixtures::reproduce(&a.id)?]
    };
    for r in &reports {
        if a.summary {
            print!("{}", r.to_string().lines().next().unwrap_or_default());
            println!();
        } else {
            print!("{r}");
        }
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    println!("{} of {} fixtures passed", reports.len() - failed, reports.len());
    Ok(if failed == 0 { EXIT_OK } else { EXIT_MISMATCH })
}

/// Files and results of an end-to-end run.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub table: ResponseTable,
    pub verdict: ComplexityVerdict,
    pub response_csv: PathBuf,
    pub report: PathBuf,
    pub plot_data: PathBuf,
}

fn describe(cfg: &ExperimentConfig) -> String {
    let w = &cfg.workload;
    let family = match w.family {
        Family::UniformK(k) => format!("uniform, K = {k}"),
        Family::TieDensity {
            tie_density,
            exact_multiset,
        } => format!(
            "tied, t_d = {tie_density}{}",
            if exact_multiset { ", exact multiset" } else { "" }
        ),
        Family::HeavyTail => "heavy-tail".into(),
    };
    let response = match w.response {
        ResponseMode::WallTime => "wall time (s)".to_string(),
        ResponseMode::WeightedCount(v) => format!(
            "weighted count, weights ({}, {}, {})",
            v.comparison, v.exchange, v.partition_call
        ),
    };
    let mut s = String::new();
    let _ = writeln!(s, "Experiment");
    let _ = writeln!(s, "family:   {family}");
    let _ = writeln!(s, "sizes:    {:?}", w.size_grid);
    let _ = writeln!(
        s,
        "trials:   {}..{}, relative SEM target {}",
        w.trials.min, w.trials.max, w.trials.rel_sem_target
    );
    let _ = writeln!(s, "seed:     {}", w.seed.0);
    let _ = writeln!(s, "response: {response}");
    s
}

/// Measures, fits and labels as `cfg` describes, writing the response CSV,
/// the report and the plot data into `cfg.output.dir`.
pub fn end_to_end(cfg: &ExperimentConfig) -> Result<RunArtifacts> {
    let out = &cfg.output;
    fs::create_dir_all(&out.dir).map_err(|e| Error::from(e).in_stage("output"))?;
    let response_csv = out.dir.join(&out.response_csv);
    let report_path = out.dir.join(&out.report);
    let plot_path = out.dir.join(&out.plot_data);

    let table = match run_experiment(&cfg.workload) {
        Ok(t) => t,
        Err(Error::Aborted { n, partial, source }) => {
            fs::write(&response_csv, partial.to_csv()).map_err(|e| Error::from(e).in_stage("output"))?;
            return Err(Error::Aborted { n, partial, source }.in_stage("measure"));
        }
        Err(e) => return Err(e.in_stage("measure")),
    };
    fs::write(&response_csv, table.to_csv()).map_err(|e| Error::from(e).in_stage("output"))?;

    let fit = fit_ols(&table, &cfg.terms).map_err(|e| e.in_stage("fit"))?;
    let plot = plot_data(&table, cfg.terms.log_base()).map_err(|e| e.in_stage("fit"))?;
    let reference = cfg
        .reference
        .as_deref()
        .map(read_table)
        .transpose()
        .map_err(|e| e.in_stage("reference"))?;
    let verdict = combined_verdict(&table, reference.as_ref(), &cfg.policy, cfg.terms.log_base())
        .map_err(|e| e.in_stage("verdict"))?;

    let mut report = describe(cfg);
    report.push('\n');
    report.push_str(&render_report(&fit, "y", true));
    report.push('\n');
    report.push_str(&verdict.to_string());
    fs::write(&report_path, report).map_err(|e| Error::from(e).in_stage("output"))?;
    fs::write(&plot_path, plot).map_err(|e| Error::from(e).in_stage("output"))?;
    Ok(RunArtifacts {
        table,
        verdict,
        response_csv,
        report: report_path,
        plot_data: plot_path,
    })
}

fn run(a: RunArgs) -> Result<i32> {
    let mut cfg = ExperimentConfig::load(&a.config).map_err(tag("config"))?;
    if let Some(d) = a.output_dir {
        cfg.output.dir = d;
    }
    let art = end_to_end(&cfg)?;
    print!("{}", art.verdict);
    println!("wrote {}", art.response_csv.display());
    println!("wrote {}", art.report.display());
    println!("wrote {}", art.plot_data.display());
    Ok(verdict_exit(&art.verdict))
}
