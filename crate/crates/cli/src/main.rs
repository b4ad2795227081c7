use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use slowpass_cli::analyze::{analyze, default_out, AnalyzeRequest};
use slowpass_cli::{load_config, preset, preset_catalog, run_experiment, CliError, ExperimentSpec, RunOptions, RunStatus};

#[derive(Parser)]
#[command(name = "slowpass", version, about = "Delayed bifurcations in 1-D reaction-diffusion models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment file or a built-in preset.
    Run(RunArgs),
    /// List built-in presets.
    Presets {
        /// Print the resolved TOML of one preset.
        #[arg(long)]
        show: Option<String>,
    },
    /// Analyse a stored trajectory.
    Analyze(AnalyzeArgs),
}

#[derive(Args)]
struct Source {
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    /// Set any config key, e.g. `model.beta_r=3`. Repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Shorthand for `--override run.dt=...`.
    #[arg(long)]
    dt: Option<f64>,
    /// Shorthand for `--override grid.n_points=...`.
    #[arg(long)]
    grid_n: Option<usize>,
}

impl Source {
    fn load(&self) -> Result<Option<ExperimentSpec>, CliError> {
        let mut spec = match (&self.config, &self.preset) {
            (Some(path), _) => load_config(path)?,
            (None, Some(name)) => preset(name)?,
            (None, None) => return Ok(None),
        };
        let mut all = self.overrides.clone();
        if let Some(dt) = self.dt {
            all.push(format!("run.dt={dt:?}"));
        }
        if let Some(n) = self.grid_n {
            all.push(format!("grid.n_points={n}"));
        }
        spec.apply_overrides(&all)?;
        Ok(Some(spec))
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: Source,
    /// Output directory; defaults to `runs/<name>`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps; defaults to all cores.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    trajectory: PathBuf,
    /// Comma-separated: csv, spectrum, signatures, canard-scan, front.
    #[arg(long, value_delimiter = ',', default_value = "csv")]
    analyses: Vec<String>,
    #[command(flatten)]
    source: Source,
    /// Defaults to `analysis/` next to the trajectory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Run(args) => {
            let spec = args.source.load()?.ok_or_else(|| {
                CliError::Validation(vec!["run: one of --config and --preset is required".into()])
            })?;
            let out = args.out.unwrap_or_else(|| PathBuf::from("runs").join(&spec.name));
            let m = run_experiment(&spec, &RunOptions { out: out.clone(), threads: args.threads })?;
            for r in &m.runs {
                let status = match r.status {
                    RunStatus::Ok => "ok".to_string(),
                    _ => format!("{:?}: {}", r.status, r.error.as_deref().unwrap_or("")),
                };
                println!("{:<24} {status}", r.name);
                for w in &r.warnings {
                    println!("{:<24}   warning: {w}", "");
                }
            }
            println!("manifest: {}", out.join("manifest.json").display());
            Ok(if m.all_blew_up() { 3 } else { 0 })
        }
        Command::Presets { show } => {
            match show {
                Some(name) => print!("{}", preset(&name)?.to_toml()),
                None => {
                    for p in preset_catalog() {
                        println!("{:<18} {}", p.name, p.description);
                    }
                }
            }
            Ok(0)
        }
        Command::Analyze(args) => {
            let spec = args.source.load()?;
            let out = args.out.unwrap_or_else(|| default_out(&args.trajectory));
            let req = AnalyzeRequest {
                trajectory: args.trajectory,
                out: out.clone(),
                tasks: args.analyses,
                spec,
            };
            let report = analyze(&req)?;
            for a in &report.artifacts {
                println!("{}", out.join(a).display());
            }
            for w in &report.warnings {
                println!("warning: {w}");
            }
            Ok(0)
        }
    }
}
