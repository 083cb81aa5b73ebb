use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mls_cli::emit::{stdout_text, write_outputs};
use mls_cli::error::{exit, CliError};
use mls_cli::run::{build_actions, run_filtered, window_config};
use mls_cli::scenario::{preset, Format, Scenario, VerifierSpec, PRESETS, VERIFIER_NAMES};
use mls_core::bounds::ClassTable;

#[derive(Parser)]
#[command(name = "mls", version, about = "Marked length spectrum rigidity verifiers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
    /// Directory for report files.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_frontier: Option<usize>,
    #[arg(long, value_parser = parse_format)]
    format: Option<Format>,
}

fn parse_format(s: &str) -> Result<Format, String> {
    match s {
        "json" => Ok(Format::Json),
        "csv" => Ok(Format::Csv),
        _ => Err(format!("expected json or csv, got `{s}`")),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run every verifier of a scenario.
    Run(Common),
    /// Run only the verifiers with the given name.
    Verify {
        name: String,
        #[command(flatten)]
        common: Common,
    },
    /// Stable lengths of the conjugacy classes of an action.
    Spectrum {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        action: String,
        #[arg(long, default_value_t = 6)]
        radius: usize,
    },
    /// Window supremum and dilation bracket of `xstar` over `x`.
    Dilation {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        x: String,
        #[arg(long)]
        xstar: String,
        #[arg(long = "L", required = true)]
        l: Vec<f64>,
    },
    /// Joint spectral radius bracket of a matrix action.
    Jsr {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        matrices: String,
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Symmetric distance `ln(Dil₁₂·Dil₂₁)` between two actions.
    Delta {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        d1: String,
        #[arg(long)]
        d2: String,
        #[arg(long = "L", required = true)]
        l: Vec<f64>,
    },
    /// Print a built-in action as JSON.
    Preset { name: String },
}

fn load(c: &Common) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(&c.scenario)
        .map_err(|e| CliError::Scenario(format!("{}: {e}", c.scenario.display())))?;
    let mut s = Scenario::parse(&text)?;
    if let Some(seed) = c.seed {
        s.seed = seed;
    }
    if let Some(m) = c.max_frontier {
        s.config.max_frontier = m;
    }
    if let Some(f) = c.format {
        s.output.format = f;
    }
    if let Some(o) = &c.out {
        s.output.dir = Some(o.display().to_string());
    }
    Ok(s)
}

fn execute(s: &Scenario, filter: impl Fn(&VerifierSpec) -> bool) -> Result<i32, CliError> {
    let report = run_filtered(s, filter)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(dir) = &s.output.dir {
        for p in write_outputs(&report, dir.as_ref())? {
            eprintln!("wrote {}", p.display());
        }
    }
    print!("{}", stdout_text(&report, s.output.format)?);
    Ok(report.exit_code())
}

/// Replaces the scenario's verifiers with a single ad hoc one.
fn single(c: &Common, v: VerifierSpec) -> Result<i32, CliError> {
    let mut s = load(c)?;
    s.verifiers = vec![v];
    let s = Scenario::parse(&s.emit())?;
    execute(&s, |_| true)
}

fn spectrum(c: &Common, action: &str, radius: usize) -> Result<i32, CliError> {
    let s = load(c)?;
    let actions = build_actions(&s)?;
    let a = actions
        .get(action)
        .ok_or_else(|| CliError::Scenario(format!("--action: no action named `{action}`")))?;
    let model = a
        .model
        .as_deref()
        .ok_or_else(|| CliError::Scenario(format!("action `{action}` is not an action of the group")))?;
    let table = ClassTable::build(model, model, radius, &window_config(&s.config))?;
    let mut w = csv::Writer::from_writer(std::io::stdout());
    w.write_record(["class", "std_len", "lo", "hi", "exact"])?;
    for r in &table.rows {
        w.write_record([
            r.class.clone(),
            r.std_len.to_string(),
            r.x.lo.to_string(),
            r.x.hi.to_string(),
            r.x.exact.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(exit::OK)
}

fn dispatch(cmd: Command) -> Result<i32, CliError> {
    match cmd {
        Command::Run(c) => execute(&load(&c)?, |_| true),
        Command::Verify { name, common } => {
            if !VERIFIER_NAMES.contains(&name.as_str()) {
                return Err(CliError::Scenario(format!(
                    "unknown verifier `{name}`, expected one of {}",
                    VERIFIER_NAMES.join(", ")
                )));
            }
            let s = load(&common)?;
            if !s.verifiers.iter().any(|v| v.name() == name) {
                return Err(CliError::Scenario(format!(
                    "the scenario has no `{name}` verifier"
                )));
            }
            execute(&s, |v| v.name() == name)
        }
        Command::Spectrum {
            common,
            action,
            radius,
        } => spectrum(&common, &action, radius),
        Command::Dilation {
            common,
            x,
            xstar,
            l,
        } => single(&common, VerifierSpec::Dilation { x, xstar, l }),
        Command::Jsr {
            common,
            matrices,
            n_max,
        } => single(&common, VerifierSpec::Jsr { matrices, n_max }),
        Command::Delta { common, d1, d2, l } => single(&common, VerifierSpec::Delta { d1, d2, l }),
        Command::Preset { name } => {
            let spec = preset(&name).ok_or_else(|| {
                CliError::Scenario(format!(
                    "unknown preset `{name}`, expected one of {}",
                    PRESETS.join(", ")
                ))
            })?;
            println!("{}", serde_json::to_string_pretty(&spec).expect("preset serializes"));
            Ok(exit::OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
