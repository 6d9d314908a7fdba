//! The `lomaxmix` command line.
//!
//! Exit status: 0 on success, 1 when the inputs were valid but yielded an
//! empty or degenerate result, 2 on unreadable input or invalid arguments.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use lomaxmix_core::ingest::{discretize_delay, DEFAULT_DT_SECONDS};
use lomaxmix_core::simulate::draw_mixture;
use lomaxmix_core::{
    chi_square_test, empirical_ccdf, extract_reply_delays, fit_lognormal, fit_mixture,
    fit_power_law, scan_orders, simulate_competing_observables, CompetingObservablesConfig,
    CountSample, FitConfig, MixtureModel, RankModel, ReplyRule, ScanResult,
};

use crate::error::CliError;
use crate::io;
use crate::model_spec::parse_model_spec;
use crate::report::{
    sample_digest, Baselines, ComponentSummary, ConfigEcho, FitReport, SCHEMA_VERSION,
};

#[derive(Debug, Parser)]
#[command(
    name = "lomaxmix",
    version,
    about = "Fit discrete Lomax mixtures to heavy-tailed counts"
)]
pub struct Cli {
    /// Seed for multi-start jitter and simulation.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Optimizer starts per model order.
    #[arg(long, global = true, default_value_t = 20)]
    pub starts: usize,
    /// Discretization interval for reply delays, in seconds.
    #[arg(long, global = true, default_value_t = DEFAULT_DT_SECONDS)]
    pub dt: f64,
    /// Significance level of the goodness-of-fit test.
    #[arg(long, global = true, default_value_t = 0.001)]
    pub alpha: f64,
    /// Field delimiter of input files (a single character, or `tab`).
    #[arg(long, global = true, default_value = ",", value_parser = parse_delimiter)]
    pub delimiter: u8,
    /// Treat rejected input rows and digest mismatches as fatal.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract reply delays from a message log and discretize them.
    Replies {
        /// Message log with rows `time,sender,recipient`.
        log: PathBuf,
        /// `first-response` or `exclusive`.
        #[arg(long, default_value = "first-response", value_parser = parse_rule)]
        rule: ReplyRule,
        /// The first row is a header.
        #[arg(long)]
        header: bool,
        /// Also write the raw delays (seconds) here.
        #[arg(long)]
        delays: Option<PathBuf>,
    },
    /// Fit M = 1..=max-order and select by AIC.
    Scan {
        /// Count file: one positive integer per row, optionally after a label column.
        counts: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_order: usize,
        #[command(flatten)]
        opts: FitOpts,
    },
    /// Fit a single model order.
    Fit {
        /// Count file: one positive integer per row, optionally after a label column.
        counts: PathBuf,
        #[arg(short = 'm', long)]
        order: usize,
        #[command(flatten)]
        opts: FitOpts,
    },
    /// Pearson χ² test of a report's model against a count file.
    Gof {
        /// Count file: one positive integer per row, optionally after a label column.
        counts: PathBuf,
        /// Fit report written by `scan` or `fit`.
        #[arg(long)]
        report: PathBuf,
    },
    /// Empirical, model and per-component survival curves as TSV.
    Ccdf {
        /// Count file: one positive integer per row, optionally after a label column.
        counts: PathBuf,
        /// Fit report written by `scan` or `fit`.
        #[arg(long)]
        report: PathBuf,
    },
    /// Rank-frequency curve of one fitted component as TSV.
    Rank {
        /// Fit report written by `scan` or `fit`.
        #[arg(long)]
        report: PathBuf,
        /// Number of units `l`.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        population: u64,
        /// 1-based component index; defaults to the highest-weight component.
        #[arg(long)]
        component: Option<usize>,
    },
    /// Draw synthetic counts, or Monte Carlo the competing-observables law.
    #[command(group(ArgGroup::new("source").required(true).args(["model", "report", "observables"])))]
    Simulate {
        /// Inline mixture `c,b,v;c,b,v;...`.
        #[arg(long)]
        model: Option<String>,
        /// Draw from the model of a fit report.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Number of competing observables `N`; switches to the reference-curve mode.
        #[arg(long, requires_all = ["theta", "rho", "mu"])]
        observables: Option<u32>,
        /// Observation period `theta`.
        #[arg(long)]
        theta: Option<f64>,
        /// Representation efficiency `rho`, in (0, 1].
        #[arg(long)]
        rho: Option<f64>,
        /// State rate `mu`.
        #[arg(long)]
        mu: Option<f64>,
        /// Number of draws.
        #[arg(short = 'n', long)]
        n: usize,
        /// Where to write the generating model; defaults to `<out>.model.json`.
        #[arg(long)]
        meta: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, clap::Args)]
pub struct FitOpts {
    /// Reply rule used to produce the counts, echoed into the report.
    #[arg(long, default_value = "first-response", value_parser = parse_rule)]
    pub rule: ReplyRule,
    #[arg(long, default_value_t = FitConfig::default().max_evals)]
    pub max_evals: u64,
    #[arg(long, default_value_t = FitConfig::default().tol)]
    pub tol: f64,
}

fn parse_delimiter(s: &str) -> Result<u8, String> {
    match s {
        "tab" | "\\t" | "\t" => Ok(b'\t'),
        _ if s.len() == 1 && s.is_ascii() => Ok(s.as_bytes()[0]),
        _ => Err(format!("delimiter must be one ASCII character, got {s:?}")),
    }
}

fn parse_rule(s: &str) -> Result<ReplyRule, String> {
    match s {
        "first-response" => Ok(ReplyRule::FirstResponse),
        "exclusive" => Ok(ReplyRule::Exclusive),
        _ => Err(format!(
            "unknown reply rule {s:?} (first-response, exclusive)"
        )),
    }
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    if !(cli.alpha > 0.0 && cli.alpha < 1.0) {
        return Err(CliError::Input(format!(
            "--alpha {} outside (0, 1)",
            cli.alpha
        )));
    }
    if cli.dt <= 0.0 || !cli.dt.is_finite() {
        return Err(CliError::Input(format!(
            "--dt {} must be finite and > 0",
            cli.dt
        )));
    }
    if cli.starts == 0 {
        return Err(CliError::Input("--starts must be >= 1".into()));
    }
    match &cli.command {
        Command::Replies {
            log,
            rule,
            header,
            delays,
        } => replies(cli, log, *rule, *header, delays.as_deref()),
        Command::Scan {
            counts,
            max_order,
            opts,
        } => {
            let data = load_counts(cli, counts)?;
            let config = fit_config(cli, opts);
            let scan = scan_orders(&data, *max_order, &config)?;
            write_report(cli, &data, &scan, opts, *max_order)
        }
        Command::Fit {
            counts,
            order,
            opts,
        } => {
            let data = load_counts(cli, counts)?;
            let config = fit_config(cli, opts);
            let fit = fit_mixture(&data, *order, &config)?;
            let scan = ScanResult {
                fits: vec![fit],
                failures: Vec::new(),
                best_index: 0,
            };
            write_report(cli, &data, &scan, opts, *order)
        }
        Command::Gof { counts, report } => gof(cli, counts, report),
        Command::Ccdf { counts, report } => ccdf(cli, counts, report),
        Command::Rank {
            report,
            population,
            component,
        } => rank(cli, report, *population, *component),
        Command::Simulate {
            model,
            report,
            observables,
            theta,
            rho,
            mu,
            n,
            meta,
        } => {
            if let Some(observables) = observables {
                let config = CompetingObservablesConfig {
                    observables: *observables,
                    theta: theta.unwrap_or_default(),
                    rho: rho.unwrap_or_default(),
                    mu: mu.unwrap_or_default(),
                    draws: *n,
                    seed: cli.seed,
                };
                return simulate_observables(cli, &config);
            }
            let model = match (model, report) {
                (Some(spec), _) => parse_model_spec(spec)?,
                (None, Some(path)) => read_report(path)?.model()?,
                (None, None) => unreachable!("clap enforces a model source"),
            };
            simulate(cli, &model, *n, meta.as_deref())
        }
    }
}

fn open_output(cli: &Cli) -> Result<Box<dyn Write>, CliError> {
    Ok(match &cli.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(CliError::io(path))?,
        )),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

fn out_name(cli: &Cli) -> PathBuf {
    cli.out.clone().unwrap_or_else(|| PathBuf::from("<stdout>"))
}

fn open_input(path: &Path) -> Result<File, CliError> {
    File::open(path).map_err(CliError::io(path))
}

/// Reports rejected rows on stderr; fatal under `--strict`.
fn tally_rejects<T>(cli: &Cli, path: &Path, parsed: &io::Parsed<T>) -> Result<(), CliError> {
    if parsed.errors.is_empty() {
        return Ok(());
    }
    for e in parsed.errors.iter().take(5) {
        eprintln!("warning: {}: {e}", path.display());
    }
    if parsed.errors.len() > 5 {
        eprintln!("warning: {} more rejected rows", parsed.errors.len() - 5);
    }
    if cli.strict {
        return Err(CliError::Input(format!(
            "{}: {} of {} rows rejected",
            path.display(),
            parsed.errors.len(),
            parsed.rows()
        )));
    }
    Ok(())
}

fn load_counts(cli: &Cli, path: &Path) -> Result<CountSample, CliError> {
    let parsed = io::read_counts(open_input(path)?, cli.delimiter).map_err(CliError::io(path))?;
    tally_rejects(cli, path, &parsed)?;
    eprintln!(
        "{}: {} rows, {} rejected",
        path.display(),
        parsed.rows(),
        parsed.errors.len()
    );
    if parsed.items.is_empty() {
        return Err(CliError::Empty(format!(
            "{}: no valid counts",
            path.display()
        )));
    }
    Ok(CountSample::from_values(parsed.items)?)
}

fn read_report(path: &Path) -> Result<FitReport, CliError> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    let report = FitReport::from_json(&text)
        .map_err(|e| CliError::Input(format!("{}: not a fit report: {e}", path.display())))?;
    if report.schema_version != SCHEMA_VERSION {
        return Err(CliError::Input(format!(
            "{}: schema {:?}, expected {SCHEMA_VERSION:?}",
            path.display(),
            report.schema_version
        )));
    }
    Ok(report)
}

/// Whether `report` was fitted to `data`; warns (or fails under
/// `--strict`) when it was not.
fn check_digest(cli: &Cli, report: &FitReport, data: &CountSample) -> Result<bool, CliError> {
    if report.input_digest == sample_digest(data) {
        return Ok(true);
    }
    if cli.strict {
        return Err(CliError::Empty(
            "the report was fitted to different data (input digest mismatch)".into(),
        ));
    }
    eprintln!("warning: the report was fitted to different data (input digest mismatch)");
    Ok(false)
}

fn fit_config(cli: &Cli, opts: &FitOpts) -> FitConfig {
    FitConfig {
        starts: cli.starts,
        seed: cli.seed,
        max_evals: opts.max_evals,
        tol: opts.tol,
    }
}

fn replies(
    cli: &Cli,
    log: &Path,
    rule: ReplyRule,
    header: bool,
    delays_path: Option<&Path>,
) -> Result<(), CliError> {
    let parsed =
        io::read_message_log(open_input(log)?, cli.delimiter, header).map_err(CliError::io(log))?;
    tally_rejects(cli, log, &parsed)?;
    if parsed.items.is_empty() {
        return Err(CliError::Empty(format!(
            "{}: no valid messages",
            log.display()
        )));
    }
    let (sample, stats) = extract_reply_delays(&parsed.items, rule, cli.dt)?;
    eprintln!(
        "rows read: {}, dropped: {}, self-messages: {}, unanswered: {}, delays extracted: {}",
        parsed.rows(),
        parsed.errors.len(),
        stats.self_messages,
        stats.unanswered,
        stats.replies
    );
    if let Some(path) = delays_path {
        let file = File::create(path).map_err(CliError::io(path))?;
        io::write_delays(BufWriter::new(file), &sample.delays).map_err(CliError::io(path))?;
    }
    let ks = sample
        .delays
        .iter()
        .map(|&d| discretize_delay(d, sample.dt));
    io::write_counts(open_output(cli)?, ks).map_err(CliError::io(out_name(cli)))?;
    Ok(())
}

fn write_report(
    cli: &Cli,
    data: &CountSample,
    scan: &ScanResult,
    opts: &FitOpts,
    max_order: usize,
) -> Result<(), CliError> {
    eprintln!(
        "{:>3} {:>18} {:>16} {:>10}",
        "M", "log-likelihood", "AIC", "ΔAIC"
    );
    for (fit, delta) in scan.fits.iter().zip(scan.delta_aic()) {
        let mark = if fit.order() == scan.best().order() {
            " *"
        } else {
            ""
        };
        eprintln!(
            "{:>3} {:>18.4} {:>16.4} {:>10.4}{mark}",
            fit.order(),
            fit.log_likelihood,
            fit.aic,
            delta
        );
    }
    for (m, error) in &scan.failures {
        eprintln!("{m:>3} failed: {error}");
    }

    let best = scan.best();
    let gof = chi_square_test(&best.model, data, best.n_params, cli.alpha);
    let config = ConfigEcho {
        seed: cli.seed,
        starts: cli.starts,
        max_order,
        dt: cli.dt,
        reply_rule: opts.rule,
        alpha: cli.alpha,
        max_evals: opts.max_evals,
        tol: opts.tol,
    };
    let baselines = Baselines {
        power_law: fit_power_law(data).into(),
        lognormal: fit_lognormal(data).into(),
    };
    let report = FitReport::from_scan(data, scan, gof.into(), baselines, config, timestamp());
    let mut out = open_output(cli)?;
    out.write_all(report.to_json().as_bytes())
        .and_then(|_| out.flush())
        .map_err(CliError::io(out_name(cli)))
}

fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

fn gof(cli: &Cli, counts: &Path, report_path: &Path) -> Result<(), CliError> {
    let data = load_counts(cli, counts)?;
    let report = read_report(report_path)?;
    // parameters only count against the degrees of freedom when they were
    // estimated from these very data
    let n_params = if check_digest(cli, &report, &data)? {
        report.n_params
    } else {
        0
    };
    let result = chi_square_test(&report.model()?, &data, n_params, cli.alpha)?;
    eprintln!(
        "chi2 = {:.4}, dof = {}, p = {:.6}, {} at alpha = {}",
        result.chi2,
        result.dof,
        result.p_value,
        if result.rejected {
            "rejected"
        } else {
            "not rejected"
        },
        cli.alpha
    );
    let mut out = open_output(cli)?;
    let mut text = serde_json::to_string_pretty(&result).expect("report serializes");
    text.push('\n');
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(CliError::io(out_name(cli)))
}

fn ccdf(cli: &Cli, counts: &Path, report_path: &Path) -> Result<(), CliError> {
    let data = load_counts(cli, counts)?;
    let report = read_report(report_path)?;
    check_digest(cli, &report, &data)?;
    let model = report.model()?;
    let names: Vec<String> = (1..=model.order())
        .map(|i| format!("component_{i}"))
        .collect();
    let mut header = vec!["k", "empirical", "model"];
    header.extend(names.iter().map(String::as_str));
    let rows: Vec<Vec<f64>> = empirical_ccdf(&data)
        .points
        .iter()
        .map(|&(k, frac)| {
            let mut row = vec![k as f64, frac, model.ccdf(k).unwrap_or(f64::NAN)];
            row.extend(
                model
                    .components()
                    .iter()
                    .map(|c| c.weight() * c.ccdf(k).unwrap_or(f64::NAN)),
            );
            row
        })
        .collect();
    io::write_tsv(open_output(cli)?, &header, &rows).map_err(CliError::io(out_name(cli)))
}

fn rank(
    cli: &Cli,
    report_path: &Path,
    population: u64,
    component: Option<usize>,
) -> Result<(), CliError> {
    let report = read_report(report_path)?;
    let model = report.model()?;
    let index = component.unwrap_or(1);
    if index == 0 || index > model.order() {
        return Err(CliError::Input(format!(
            "--component {index} outside 1..={}",
            model.order()
        )));
    }
    let c = &model.components()[index - 1];
    let ranks = RankModel::from_component(c, population)?;
    let mut out = open_output(cli)?;
    let write = |out: &mut dyn Write| -> std::io::Result<()> {
        writeln!(
            out,
            "# component={index} c={:?} b={:?} v={:?} l={population}",
            c.weight(),
            c.scale(),
            c.shape()
        )?;
        writeln!(out, "r\tf_r")?;
        for r in 1..=population {
            let f = ranks.rank_frequency(r).unwrap_or(f64::NAN);
            writeln!(out, "{r}\t{}", io::format_float(f))?;
        }
        out.flush()
    };
    write(&mut out).map_err(CliError::io(out_name(cli)))
}

/// Sidecar describing the model a simulated count file was drawn from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationMeta {
    pub schema_version: String,
    pub seed: u64,
    pub n: usize,
    pub components: Vec<ComponentSummary>,
}

fn simulate(
    cli: &Cli,
    model: &MixtureModel,
    n: usize,
    meta: Option<&Path>,
) -> Result<(), CliError> {
    if n == 0 {
        return Err(CliError::Input("-n must be >= 1".into()));
    }
    let draws = draw_mixture(model, n, cli.seed)?;
    io::write_counts(open_output(cli)?, draws).map_err(CliError::io(out_name(cli)))?;
    let sidecar = meta.map(Path::to_path_buf).or_else(|| {
        cli.out.as_ref().map(|p| {
            let mut s = p.clone().into_os_string();
            s.push(".model.json");
            PathBuf::from(s)
        })
    });
    if let Some(path) = sidecar {
        let meta = SimulationMeta {
            schema_version: SCHEMA_VERSION.to_string(),
            seed: cli.seed,
            n,
            components: model.components().iter().map(Into::into).collect(),
        };
        let mut text = serde_json::to_string_pretty(&meta).expect("metadata serializes");
        text.push('\n');
        std::fs::write(&path, text).map_err(CliError::io(&path))?;
    }
    Ok(())
}

fn simulate_observables(cli: &Cli, config: &CompetingObservablesConfig) -> Result<(), CliError> {
    let sim = simulate_competing_observables(config)?;
    let upper = 3.0 * config.budget() / config.observables as f64;
    eprintln!(
        "sup |empirical - exact| = {:.6}, sup |exact - exponential| on [0, {upper:.6}] = {:.6}",
        sim.sup_distance_to_exact(),
        sim.exact_vs_limit_distance(upper, 1001)
    );
    let rows: Vec<Vec<f64>> = sim
        .reference_curve(upper, 101)
        .into_iter()
        .map(|r| r.to_vec())
        .collect();
    io::write_tsv(
        open_output(cli)?,
        &["x", "empirical", "exact", "exponential_limit"],
        &rows,
    )
    .map_err(CliError::io(out_name(cli)))
}
