use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{ArgAction, Parser, Subcommand, ValueEnum};
use log::info;

use qmeas_cli::scenario::parse_override;
use qmeas_cli::{bundled, run_batch, Artifact, BatchReport, CliError, Scenario};

#[derive(Debug, Parser)]
#[command(name = "qmeas", version, about = "Noise/disturbance scenario runner for position-measuring interactions")]
struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run scenario files and/or bundled scenarios.
    Run(RunArgs),
    /// List the bundled scenarios.
    List,
    /// Print the TOML source of a bundled scenario.
    Show { name: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    /// Scenario files (TOML).
    paths: Vec<PathBuf>,
    /// Bundled scenario to run; repeatable.
    #[arg(short, long = "bundled", value_name = "NAME")]
    bundled: Vec<String>,
    /// Run every bundled scenario.
    #[arg(long)]
    all: bool,
    /// Directory for report.json, report.txt and CSV tables.
    #[arg(short, long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Format of the report printed on stdout.
    #[arg(short, long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Tolerance override applied to every scenario, e.g. `grid=1e-3`.
    #[arg(long = "tol", value_name = "KEY=VALUE")]
    tolerances: Vec<String>,
    /// Seed override applied to every scenario.
    #[arg(long)]
    seed: Option<u64>,
}

fn load(args: &RunArgs) -> anyhow::Result<Vec<Scenario>> {
    let mut scenarios = Vec::new();
    for path in &args.paths {
        scenarios.push(Scenario::from_path(path)?);
    }
    if args.all {
        scenarios.extend(bundled::load_all()?);
    } else {
        for name in &args.bundled {
            scenarios.push(bundled::load(name)?);
        }
    }
    if scenarios.is_empty() {
        bail!("no scenarios given; pass files, --bundled NAME or --all");
    }
    let overrides = args
        .tolerances
        .iter()
        .map(|t| parse_override(t))
        .collect::<Result<Vec<_>, _>>()?;
    for s in &mut scenarios {
        for (key, value) in &overrides {
            s.tolerances.set(key, *value)?;
        }
        if let Some(seed) = args.seed {
            s.seed = seed;
        }
    }
    let mut names: Vec<&str> = scenarios.iter().map(|s| s.name.as_str()).collect();
    names.sort_unstable();
    if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
        return Err(CliError::DuplicateName(w[0].to_string()).into());
    }
    Ok(scenarios)
}

fn write_outputs(dir: &Path, report: &BatchReport, artifacts: &[Artifact]) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let files = [
        ("report.json".to_string(), report.to_json()),
        ("report.txt".to_string(), report.to_text()),
    ];
    for (name, contents) in files
        .iter()
        .map(|(n, c)| (n.as_str(), c.as_str()))
        .chain(artifacts.iter().map(|a| (a.file_name.as_str(), a.contents.as_str())))
    {
        let path = dir.join(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        info!("wrote {}", path.display());
    }
    Ok(())
}

fn execute(args: &RunArgs) -> anyhow::Result<i32> {
    let scenarios = load(args)?;
    let (report, artifacts) = run_batch(&scenarios);
    if let Some(dir) = &args.out {
        write_outputs(dir, &report, &artifacts)?;
    }
    let rendered = match args.format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json(),
    };
    std::io::stdout().write_all(rendered.as_bytes())?;
    for s in report.scenarios.iter().filter(|s| s.error.is_some()) {
        eprintln!("error: scenario {}: {}", s.name, s.error.as_deref().unwrap_or_default());
    }
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).init();

    let code = match &cli.command {
        Command::List => {
            for name in bundled::names() {
                let description = bundled::load(name).map(|s| s.description).unwrap_or_default();
                println!("{name:<26} {description}");
            }
            0
        }
        Command::Show { name } => match bundled::source(name) {
            Ok(text) => {
                print!("{text}");
                0
            }
            Err(e) => {
                eprintln!("error: {e}");
                2
            }
        },
        Command::Run(args) => execute(args).unwrap_or_else(|e| {
            eprintln!("error: {e:#}");
            2
        }),
    };
    ExitCode::from(code as u8)
}
