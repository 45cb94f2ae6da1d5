use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use kahlerlab_cli::config::{PointSet, ScenarioConfig};
use kahlerlab_cli::report::emit_report;
use kahlerlab_cli::{registry, run_scenario, CliError, Format, RunOptions, VerificationReport};
use kahlerlab_core::catalog::DomainSpec;
use kahlerlab_core::oracle::reinhardt_norms;
use serde_json::{Map, Value};

const EXIT_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(
    name = "kahlerlab",
    version,
    about = "Verify Kähler geometry identities on catalog domains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Report path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: Format,
    /// Worker threads (0 = all cores).
    #[arg(long, env = "KAHLERLAB_JOBS", default_value_t = 0)]
    jobs: usize,
    /// Value recorded in the report header; omitted by default so reports are reproducible.
    #[arg(long)]
    timestamp: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a registered scenario or a JSON config.
    Verify {
        #[arg(long, conflicts_with = "config", required_unless_present = "config")]
        scenario: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override a config field, e.g. `points.count=20` or `tolerances.einstein=1e-8`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        sets: Vec<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Run checks along a ray toward the boundary.
    Sweep {
        /// Domain id, e.g. `thullen_gm` or `ball_bergman`.
        #[arg(long)]
        domain: String,
        /// Domain parameter, e.g. `m=2` or `n=2`; values parse as JSON.
        #[arg(long = "param", value_name = "K=V")]
        params: Vec<String>,
        /// `dx,dy,count,delta_min` with a real direction in ℂ².
        #[arg(long)]
        ray: String,
        #[arg(long, value_delimiter = ',')]
        checks: Vec<String>,
        #[arg(long, default_value_t = 4)]
        jet_order: usize,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Build a Thullen monomial norm table.
    Norms {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        cap: usize,
        #[arg(long, default_value_t = 64)]
        quadrature_points: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// List registered scenarios.
    List,
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = match e.downcast_ref::<CliError>() {
                Some(CliError::Io { .. }) => EXIT_IO,
                Some(_) => EXIT_CONFIG,
                None if e.downcast_ref::<std::io::Error>().is_some() => EXIT_IO,
                None => EXIT_CONFIG,
            };
            ExitCode::from(code)
        }
    }
}

fn dispatch(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Verify {
            scenario,
            config,
            sets,
            output,
        } => {
            let cfg = match (scenario, config) {
                (Some(name), _) => registry::scenario(&name)?,
                (None, Some(path)) => {
                    let text = std::fs::read_to_string(&path).map_err(|source| CliError::Io { path, source })?;
                    ScenarioConfig::from_json(&text)?
                }
                (None, None) => unreachable!("clap requires one"),
            };
            verify(cfg.with_overrides(&sets)?, &output)
        }
        Command::Sweep {
            domain,
            params,
            ray,
            checks,
            jet_order,
            lambda,
            output,
        } => {
            let cfg = sweep_config(&domain, &params, &ray, checks, jet_order, lambda)?;
            verify(cfg, &output)
        }
        Command::Norms {
            m,
            cap,
            quadrature_points,
            out,
        } => {
            let table = reinhardt_norms(m, cap, quadrature_points).context("building norm table")?;
            table
                .write_to(&out)
                .map_err(|e| std::io::Error::other(e.to_string()))
                .with_context(|| format!("writing {}", out.display()))?;
            eprintln!("wrote {} norms to {}", table.len(), out.display());
            Ok(0)
        }
        Command::List => {
            let mut stdout = std::io::stdout().lock();
            for s in registry::scenarios() {
                writeln!(
                    stdout,
                    "{:<28} {:<24} {}",
                    s.scenario,
                    s.domain.label(),
                    s.checks.join(",")
                )?;
            }
            Ok(0)
        }
    }
}

fn verify(cfg: ScenarioConfig, output: &Output) -> Result<u8> {
    let opts = RunOptions {
        jobs: output.jobs,
        timestamp: output.timestamp.clone(),
    };
    let report = run_scenario(&cfg, &opts)?;
    let (path, format) = match (&output.out, &cfg.output) {
        (Some(p), _) => (Some(p.clone()), output.format),
        (None, Some(o)) => (Some(o.path.clone()), o.format),
        (None, None) => (None, output.format),
    };
    match path {
        Some(p) => emit_report(&report, format, &p)?,
        None => print(&report, format)?,
    }
    let s = &report.summary;
    for (name, c) in &s.checks {
        eprintln!(
            "{name}: {} passed, {} failed, worst {}",
            c.passed,
            c.failed,
            c.worst.map_or("n/a".into(), |w| format!("{w:e}"))
        );
    }
    Ok(if s.all_pass { 0 } else { EXIT_FAIL })
}

fn print(report: &VerificationReport, format: Format) -> Result<()> {
    let text = match format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    std::io::stdout().lock().write_all(text.as_bytes())?;
    Ok(())
}

fn sweep_config(
    domain: &str,
    params: &[String],
    ray: &str,
    checks: Vec<String>,
    jet_order: usize,
    lambda: Option<f64>,
) -> Result<ScenarioConfig> {
    let mut map = Map::new();
    map.insert("id".into(), Value::String(domain.into()));
    for p in params {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| CliError::config(format!("--param {p:?} is not k=v")))?;
        map.insert(
            k.into(),
            serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.into())),
        );
    }
    let spec: DomainSpec =
        serde_json::from_value(Value::Object(map)).map_err(|e| CliError::config(format!("domain: {e}")))?;

    let parts: Vec<&str> = ray.split(',').map(str::trim).collect();
    let bad = || CliError::config(format!("--ray {ray:?} is not dx,dy,count,delta_min"));
    let [dx, dy, count, delta_min] = parts.as_slice() else {
        return Err(bad().into());
    };
    let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
    let points = PointSet::Ray {
        direction: vec![[num(dx)?, 0.0], [num(dy)?, 0.0]],
        count: count.parse().map_err(|_| bad())?,
        delta_min: num(delta_min)?,
    };
    Ok(ScenarioConfig {
        scenario: format!("sweep-{}", spec.label()),
        domain: spec,
        points,
        checks,
        tolerances: Default::default(),
        jet_order,
        lambda,
        field: None,
        scan: None,
        output: None,
        potential_scale: None,
        floors: Default::default(),
    })
}
