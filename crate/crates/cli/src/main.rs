use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use quadgait_cli::commands::{run, CliError, Command, TransitionGait, EXIT_CONFIG};
use quadgait_cli::config::Config;

#[derive(Parser)]
#[command(
    name = "quadgait",
    version,
    about = "Quadruped gait planner and kinematic simulator"
)]
struct Cli {
    /// Config file of `key = value` lines; defaults are used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one config key, e.g. `--set beta=0.8`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Full walk, climb, spin and descend case study.
    Scenario,
    /// Level-ground wave gait.
    Walk,
    /// Stair ascent.
    Climb,
    /// Stair descent.
    Descend,
    /// Spin gait in place.
    Spin,
    /// Foot relocation from the workspace centres to a gait start.
    Transition {
        #[arg(long, value_enum, default_value = "wave")]
        gait: Gait,
    },
    /// Validate the config and print derived quantities.
    Check,
    /// Redraw the SVG plots of an exported trace.
    Plot { input: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Gait {
    Wave,
    Spin,
}

fn load(cli: &Cli) -> Result<Config, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    for o in &cli.overrides {
        cfg.apply_override(o)?;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match &cli.command {
        Cmd::Scenario => Command::Scenario,
        Cmd::Walk => Command::Walk,
        Cmd::Climb => Command::Climb,
        Cmd::Descend => Command::Descend,
        Cmd::Spin => Command::Spin,
        Cmd::Transition { gait } => Command::Transition(match gait {
            Gait::Wave => TransitionGait::Wave,
            Gait::Spin => TransitionGait::Spin,
        }),
        Cmd::Check => Command::Check,
        Cmd::Plot { input } => Command::Plot {
            input: input.clone(),
        },
    };
    let result = load(&cli).and_then(|cfg| run(&command, &cfg));
    match result {
        Ok(outcome) => {
            print!("{}", outcome.report);
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            ExitCode::from(outcome.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            let code = e.exit_code();
            if code == EXIT_CONFIG {
                ExitCode::from(EXIT_CONFIG)
            } else {
                eprintln!("the requested motion is infeasible for this robot");
                ExitCode::from(code)
            }
        }
    }
}
