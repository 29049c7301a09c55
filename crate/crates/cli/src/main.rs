mod commands;
mod error;
mod options;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use barcode_lab::filtration::DEFAULT_CELL_BUDGET;
use clap::Parser;
use serde::Serialize;

use commands::Ctx;
use error::CliError;
use options::{Cli, Command, FileConfig};
use output::{Artifacts, Manifest};

fn to_value<T: Serialize>(v: &T) -> Result<serde_json::Value, CliError> {
    Ok(serde_json::to_value(v)?)
}

fn run(cli: Cli) -> Result<PathBuf, CliError> {
    let started = Instant::now();
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let name = cli.command.name();
    let seed = cli.seed.or(file.seed).unwrap_or(0);
    let budget = cli.budget.or(file.budget).unwrap_or(DEFAULT_CELL_BUDGET);
    if budget == 0 {
        return Err(CliError::Config("budget must be positive".into()));
    }
    let out = cli
        .out
        .or(file.out)
        .unwrap_or_else(|| PathBuf::from("out").join(name));
    let mut ctx = Ctx {
        seed,
        budget,
        art: Artifacts::create(&out)?,
    };

    let (parameters, summary) = match cli.command {
        Command::Orbits(a) => {
            let p = a.resolve(file.orbits);
            (to_value(&p)?, commands::orbits(&p, &mut ctx)?)
        }
        Command::Barcode(a) => {
            let p = a.resolve(file.barcode);
            (to_value(&p)?, commands::barcode_cmd(&p, &mut ctx)?)
        }
        Command::Entropy(a) => {
            let p = a.resolve(file.entropy);
            (to_value(&p)?, commands::entropy(&p, &mut ctx)?)
        }
        Command::Sequential(a) => {
            let p = a.resolve(file.sequential);
            (to_value(&p)?, commands::sequential(&p, &mut ctx)?)
        }
        Command::Crofton(a) => {
            let p = a.resolve(file.crofton);
            (to_value(&p)?, commands::crofton(&p, &mut ctx)?)
        }
        Command::Gamma(a) => {
            let p = a.resolve(file.gamma);
            (to_value(&p)?, commands::gamma(&p, &mut ctx)?)
        }
        Command::Synthetic(a) => {
            let p = a.resolve(file.synthetic);
            (to_value(&p)?, commands::synthetic(&p, &mut ctx)?)
        }
        Command::Report(a) => {
            let p = a.resolve(file.report);
            (to_value(&p)?, commands::report(&p, &mut ctx)?)
        }
    };
    ctx.art.finish()?;
    let manifest = Manifest {
        tool: "barcode-lab",
        version: env!("CARGO_PKG_VERSION"),
        subcommand: name,
        seed,
        budget,
        config_file: cli.config.map(|p| p.display().to_string()),
        parameters,
        files: ctx.art.files().to_vec(),
        summary,
        wall_seconds: started.elapsed().as_secs_f64(),
        finished_unix_seconds: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
    };
    ctx.art.json("manifest.json", &manifest)?;
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            println!("{}", out.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("barcode-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
