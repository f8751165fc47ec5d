use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use spinbath_cli::config::{schema, EngineName};
use spinbath_cli::run::{run, WORKERS_ENV};
use spinbath_cli::{parse_config, preset, CliError, Scenario, PRESETS};

/// Exact reduced dynamics of central qubits in an Ising spin bath.
#[derive(Debug, Parser)]
#[command(name = "spinbath", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario file.
    Run {
        config: PathBuf,
        /// Output prefix; overrides the file's `output`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (0 = one per core).
        #[arg(long, env = WORKERS_ENV, default_value_t = 0)]
        workers: usize,
    },
    /// Run a built-in scenario.
    Preset {
        name: String,
        /// Output prefix; defaults to the preset name.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        engine: Option<EngineArg>,
        /// Worker threads (0 = one per core).
        #[arg(long, env = WORKERS_ENV, default_value_t = 0)]
        workers: usize,
        /// Print the scenario as JSON instead of running it.
        #[arg(long)]
        print: bool,
    },
    /// Print the JSON Schema of scenario files.
    Schema,
    /// List the built-in scenarios.
    ListPresets,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EngineArg {
    Auto,
    Bruteforce,
    Collapsed,
}

impl From<EngineArg> for EngineName {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Auto => EngineName::Auto,
            EngineArg::Bruteforce => EngineName::Bruteforce,
            EngineArg::Collapsed => EngineName::Collapsed,
        }
    }
}

/// Writes a line to stdout; a closed pipe (e.g. `| head`) is not an error.
fn say(line: impl std::fmt::Display) {
    let _ = writeln!(io::stdout().lock(), "{line}");
}

fn execute(scenario: &Scenario, out: Option<PathBuf>, workers: usize) -> Result<(), CliError> {
    let prefix = out.unwrap_or_else(|| PathBuf::from(&scenario.output));
    let (result, paths) = run(scenario, &prefix, workers)?;
    for w in &result.warnings {
        log::warn!("{w}");
    }
    eprintln!(
        "{} rows x {} channels in {:.2?} ({} bath terms, engine {})",
        result.times.len(),
        result.columns.len(),
        result.elapsed,
        result.n_terms,
        result.source.as_str(),
    );
    for p in [&paths.csv, &paths.meta, &paths.plot] {
        say(p.display());
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run {
            config,
            out,
            workers,
        } => {
            let text = fs::read_to_string(&config).map_err(|e| CliError::Io {
                path: config.clone(),
                source: e,
            })?;
            execute(&parse_config(&text)?, out, workers)
        }
        Command::Preset {
            name,
            out,
            engine,
            workers,
            print,
        } => {
            let mut scenario = preset(&name)?;
            if let Some(e) = engine {
                scenario.engine = e.into();
            }
            if print {
                say(scenario.to_json());
                return Ok(());
            }
            execute(&scenario, out, workers)
        }
        Command::Schema => {
            say(serde_json::to_string_pretty(&schema()).expect("schema serializes"));
            Ok(())
        }
        Command::ListPresets => {
            for (name, about) in PRESETS {
                say(format_args!("{name:<6} {about}"));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
