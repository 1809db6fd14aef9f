use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use xsim::experiments::{run, ExperimentConfig, ExperimentKind, OutputFormat, Overrides};
use xsim::Error;

/// Run an X-state simulation experiment from a JSON config.
#[derive(Debug, Parser)]
#[command(name = "xsim", version)]
struct Cli {
    /// tetra_sweep, heisenberg_conc, heisenberg_fidelity, field_conc, field_fidelity or xprep_single
    experiment: String,
    #[arg(long)]
    config: PathBuf,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    shots: Option<u64>,
    /// Use exact outcome probabilities instead of shot sampling.
    #[arg(long)]
    exact: bool,
    /// Print the preparation circuits as JSON lines on stderr.
    #[arg(long)]
    dump_circuit: bool,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Json(_) => 2,
        Error::Io(_) => 1,
        _ if e.is_physics_violation() => 3,
        _ => 1,
    }
}

fn main_inner(cli: Cli) -> xsim::Result<()> {
    let kind: ExperimentKind = cli.experiment.parse()?;
    let text = std::fs::read_to_string(&cli.config)?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    if cfg.experiment != kind {
        return Err(Error::Config(format!(
            "config is for {}, not {}",
            cfg.experiment.name(),
            kind.name()
        )));
    }
    cfg.apply(Overrides {
        seed: cli.seed,
        shots: cli.shots,
        exact: cli.exact,
    })?;
    let spec = cfg.output.clone().unwrap_or_default();
    let format = match cli.format.as_deref() {
        Some(f) => f.parse()?,
        None => spec.format.unwrap_or(if kind == ExperimentKind::XprepSingle {
            OutputFormat::Json
        } else {
            OutputFormat::Csv
        }),
    };
    let out = run(&cfg)?;
    let text = out.render(format)?;
    if cli.dump_circuit {
        for c in out.circuits() {
            eprintln!("{}", c.to_json());
        }
    }
    match cli.out.or(spec.path) {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("xsim: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
