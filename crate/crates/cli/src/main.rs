mod commands;
mod config;
mod error;
mod family;
mod table;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::Settings;
use error::CliError;

#[derive(Parser)]
#[command(name = "saw-lab", version, about = "Self-avoiding walk counts, injections and growth bounds on cubic graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Ball radius.
    #[arg(long, global = true)]
    radius: Option<usize>,
    /// Walk length.
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the result table as CSV.
    #[arg(long, global = true)]
    csv: Option<String>,
    /// Experiment file with `key = value` lines under section headers.
    #[arg(long, global = true)]
    config: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Build a graph ball and write it in text form.
    Build {
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        out: Option<String>,
    },
    /// Count self-avoiding walks from the root.
    Count {
        #[arg(long)]
        family: Option<String>,
    },
    /// Ratio and n-th root estimates of the connective constant.
    EstimateMu {
        #[arg(long)]
        family: Option<String>,
    },
    /// Solve the bound equations.
    Bounds {
        #[arg(long)]
        list: bool,
        #[arg(long)]
        eq: Option<String>,
    },
    /// Check a height function and its word-to-walk injection.
    VerifyInjection {
        #[arg(long)]
        family: Option<String>,
    },
    /// Cubic planar tilings by vertex type.
    Tiling {
        /// Face sizes `k1,k2,k3`.
        #[arg(long = "type")]
        tiling_type: Option<String>,
        #[arg(long)]
        check_l95: bool,
        /// caseA, caseB, caseC or caseD.
        #[arg(long)]
        inject: Option<String>,
    },
    /// The Grigorchuk group and its Schreier graph.
    Grigorchuk {
        #[arg(long)]
        ball: Option<usize>,
        #[arg(long)]
        schreier: Option<usize>,
        #[arg(long)]
        verify_lifts: Option<usize>,
        #[arg(long)]
        z_check: bool,
    },
    /// Summary table over the main families.
    Report,
}

fn settings(cli: Cli) -> Result<(Command, Settings), CliError> {
    let file = match &cli.common.config {
        Some(path) => Settings::from_file(path)?,
        None => Settings::default(),
    };
    let mut s = Settings {
        radius: cli.common.radius,
        steps: cli.common.steps,
        threads: cli.common.threads,
        csv: cli.common.csv,
        ..Default::default()
    };
    match &cli.command {
        Command::Build { family, out } => {
            s.family = family.clone();
            s.out = out.clone();
        }
        Command::Count { family } | Command::EstimateMu { family } | Command::VerifyInjection { family } => {
            s.family = family.clone();
        }
        Command::Bounds { list, eq } => {
            s.list = *list;
            s.eq = eq.clone();
        }
        Command::Tiling { tiling_type, check_l95, inject } => {
            s.tiling_type = tiling_type.clone();
            s.check_l95 = *check_l95;
            s.inject = inject.clone();
        }
        Command::Grigorchuk { ball, schreier, verify_lifts, z_check } => {
            s.ball = *ball;
            s.schreier = *schreier;
            s.verify_lifts = *verify_lifts;
            s.z_check = *z_check;
        }
        Command::Report => {}
    }
    Ok((cli.command, file.overlay(s)))
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let (command, s) = settings(cli)?;
    if let Some(k) = s.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build_global()
            .map_err(|e| CliError::Other(e.to_string()))?;
    }
    let outcome = match command {
        Command::Build { .. } => commands::build(&s)?,
        Command::Count { .. } => commands::count(&s)?,
        Command::EstimateMu { .. } => commands::estimate(&s)?,
        Command::Bounds { .. } => commands::bounds(&s)?,
        Command::VerifyInjection { .. } => commands::verify_injection(&s)?,
        Command::Tiling { .. } => commands::tiling(&s)?,
        Command::Grigorchuk { .. } => commands::grigorchuk(&s)?,
        Command::Report => commands::report(&s)?,
    };
    print!("{}", outcome.text);
    if let (Some(path), Some(t)) = (&s.csv, &outcome.table) {
        t.write_csv(path)?;
    }
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("saw-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
