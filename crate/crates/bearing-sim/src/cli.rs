//! Command line front end.
//!
//! Exit codes: 0 on success, 1 for config, run, or output errors, 2 for
//! malformed command lines (unknown flag, missing or unparsable value).

use std::io::Write;
use std::path::Path;

use crate::config::{NoiseConfig, ObserverChoice, RunConfig};
use crate::csv::{format_metrics, format_records, write_csv, write_text};
use crate::metrics::BatchMetrics;
use crate::plot::{write_plot_with, EstimateSource};
use crate::run::{run_batch, run_single, run_single_detailed};

const USAGE: &str = "\
bearing-sim: seeded simulations of bearing observers on the unit sphere

Usage: bearing-sim [flags]

Flags:
  --config PATH     JSON run configuration (built-in defaults when omitted)
  --seed N          base RNG seed
  --duration S      simulated seconds
  --dt S            integration step in seconds
  --gain K          innovation gain
  --observer WHICH  equivariant | naive | both
  --no-noise        zero all noise magnitudes (streams keep the seed)
  --runs N          Monte Carlo run count
  --out PATH        write CSV to this file instead of stdout
  --plot PATH       also write a summary plot (SVG) to this file
  -h, --help        print this help

Flags override values from --config. One run writes a step-records CSV;
--runs N with N > 1 writes a per-run metrics CSV instead and prints an
aggregate summary to stderr (the plot then shows the base-seed run).
";

#[derive(Debug, Default, PartialEq)]
struct CliArgs {
    config: Option<String>,
    seed: Option<u64>,
    duration: Option<f64>,
    dt: Option<f64>,
    gain: Option<f64>,
    observer: Option<ObserverChoice>,
    no_noise: bool,
    runs: Option<u32>,
    out: Option<String>,
    plot: Option<String>,
    help: bool,
}

fn parse<T: core::str::FromStr>(flag: &str, value: &str) -> Result<T, String>
where
    T::Err: core::fmt::Display,
{
    value.parse().map_err(|e| format!("bad value '{value}' for {flag}: {e}"))
}

/// Splits flags into values; errors are exit-2 messages.
fn parse_args(args: &[String]) -> Result<CliArgs, String> {
    let mut cli = CliArgs::default();
    let mut it = args.iter();
    while let Some(arg) = it.next() {
        // Accept both "--flag value" and "--flag=value".
        let (flag, inline) = match arg.split_once('=') {
            Some((f, v)) => (f, Some(v)),
            None => (arg.as_str(), None),
        };
        let mut value = |flag: &str| -> Result<String, String> {
            match inline {
                Some(v) => Ok(v.to_string()),
                None => it.next().cloned().ok_or_else(|| format!("flag {flag} needs a value")),
            }
        };
        match flag {
            "-h" | "--help" => cli.help = true,
            "--no-noise" => cli.no_noise = true,
            "--config" => cli.config = Some(value(flag)?),
            "--seed" => cli.seed = Some(parse(flag, &value(flag)?)?),
            "--duration" => cli.duration = Some(parse(flag, &value(flag)?)?),
            "--dt" => cli.dt = Some(parse(flag, &value(flag)?)?),
            "--gain" => cli.gain = Some(parse(flag, &value(flag)?)?),
            "--observer" => cli.observer = Some(parse(flag, &value(flag)?)?),
            "--runs" => cli.runs = Some(parse(flag, &value(flag)?)?),
            "--out" => cli.out = Some(value(flag)?),
            "--plot" => cli.plot = Some(value(flag)?),
            other => return Err(format!("unknown flag '{other}'")),
        }
    }
    Ok(cli)
}

fn load_config(cli: &CliArgs) -> Result<RunConfig, String> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
            let trimmed = text.trim();
            if trimmed.is_empty() {
                RunConfig::default()
            } else {
                serde_json::from_str(trimmed)
                    .map_err(|e| crate::config::ConfigError::from(e).to_string())?
            }
        }
        None => RunConfig::default(),
    };
    if let Some(v) = cli.seed {
        cfg.seed = v;
    }
    if let Some(v) = cli.duration {
        cfg.duration = v;
    }
    if let Some(v) = cli.dt {
        cfg.dt = v;
    }
    if let Some(v) = cli.gain {
        cfg.gain = v;
    }
    if let Some(v) = cli.observer {
        cfg.observer = v;
    }
    if let Some(v) = cli.runs {
        cfg.runs = v;
    }
    if cli.no_noise {
        cfg.noise = NoiseConfig::silenced();
    }
    if cli.out.is_some() {
        cfg.out = cli.out.clone();
    }
    if cli.plot.is_some() {
        cfg.plot = cli.plot.clone();
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn estimate_source(observer: ObserverChoice) -> EstimateSource {
    match observer {
        ObserverChoice::Naive => EstimateSource::Naive,
        _ => EstimateSource::Equivariant,
    }
}

fn emit(text: &str, out: &Option<String>) -> Result<(), String> {
    match out {
        Some(path) => write_text(text, Path::new(path)).map_err(|e| e.to_string()),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())
                .and_then(|_| lock.flush())
                .map_err(|e| format!("cannot write to stdout: {e}"))
        }
    }
}

fn summary_line(b: &BatchMetrics) -> String {
    format!(
        "{} runs: equivariant wins {}/{}, median steady-state error {:.4e} rad (eqv) vs {:.4e} rad (naive), {} outliers",
        b.per_run.len(),
        b.eqv_wins,
        b.per_run.len(),
        b.median_ss_eqv,
        b.median_ss_naive,
        b.total_outliers
    )
}

fn execute(cfg: &RunConfig) -> Result<(), String> {
    if cfg.runs <= 1 {
        let out = run_single_detailed(cfg).map_err(|e| e.to_string())?;
        match &cfg.out {
            Some(path) => write_csv(&out.records, Path::new(path)).map_err(|e| e.to_string())?,
            None => emit(&format_records(&out.records), &None)?,
        }
        if let Some(path) = &cfg.plot {
            write_plot_with(&out.records, Path::new(path), estimate_source(cfg.observer))
                .map_err(|e| e.to_string())?;
        }
    } else {
        let batch = run_batch(cfg).map_err(|e| e.to_string())?;
        emit(&format_metrics(&batch), &cfg.out)?;
        eprintln!("{}", summary_line(&batch));
        if let Some(path) = &cfg.plot {
            let one = RunConfig { runs: 1, ..cfg.clone() };
            let records = run_single(&one).map_err(|e| e.to_string())?;
            write_plot_with(&records, Path::new(path), estimate_source(cfg.observer))
                .map_err(|e| e.to_string())?;
        }
    }
    Ok(())
}

pub fn cli_main(args: &[String]) -> i32 {
    let cli = match parse_args(args) {
        Ok(cli) => cli,
        Err(msg) => {
            eprintln!("{msg}");
            eprint!("{USAGE}");
            return 2;
        }
    };
    if cli.help {
        print!("{USAGE}");
        return 0;
    }
    let cfg = match load_config(&cli) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("{msg}");
            return 1;
        }
    };
    match execute(&cfg) {
        Ok(()) => 0,
        Err(msg) => {
            eprintln!("{msg}");
            1
        }
    }
}
