use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::Parser;

use sd_twistor_cli::{load_config, run_command, write_report, Command};

#[derive(Parser)]
#[command(
    name = "sd-twistor",
    version,
    about = "Run an sd-twistor pipeline from a TOML config"
)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Sampling seed; overrides `seed` in the config.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    let mut cfg = load_config(&cli.config)?;
    if cfg.command != cli.command {
        bail!(
            "command `{}` does not match `command = \"{}\"` in {}",
            cli.command,
            cfg.command,
            cli.config.display()
        );
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let out = cli
        .out
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from(format!("sd-twistor-{}", cfg.command)));
    let report = run_command(cfg)?;
    write_report(&report, &out)?;
    for c in &report.checks {
        println!(
            "{} {} = {:.3e} ({:?} {:e})",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.bound,
            c.tolerance
        );
    }
    println!(
        "{}: {} in {:.2} s, wrote {}",
        report.command,
        if report.pass() { "pass" } else { "fail" },
        report.timing.total_seconds,
        out.display()
    );
    Ok(report.pass())
}
