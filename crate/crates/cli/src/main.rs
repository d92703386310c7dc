mod commands;
mod report;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use report::{Artifacts, RunReport};

#[derive(Parser)]
#[command(name = "soulgeom", version, about = "Soul construction and comparison experiments on planar convex bodies and flat cones")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct Common {
    /// Seed for every randomized choice.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Directory for SVG/CSV artifacts and the JSON report; nothing is written without it.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Emit SVG figures (default).
    #[arg(long, overrides_with = "no_svg")]
    svg: bool,
    #[arg(long, overrides_with = "svg")]
    no_svg: bool,
    /// Print the machine-readable report to stdout.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Inradius, maximum set and soul of a body.
    Soul(commands::SoulArgs),
    /// Inner parallel bodies at several depths.
    Evolve(commands::EvolveArgs),
    /// Angular excess θ(r) at a boundary point.
    Excess(commands::ExcessArgs),
    /// Seeded sweep of the trapezoid comparison on the plane or a cone.
    Trapezoid(commands::TrapezoidArgs),
    /// Gradient flow of the boundary distance.
    Flow(commands::FlowArgs),
    /// Riccati evolution of a second fundamental form.
    Riccati(commands::RiccatiArgs),
    /// Busemann function of a ray on a cone.
    Busemann(commands::BusemannArgs),
}

/// Input errors exit with 2, failed checks with 1.
pub enum Failure {
    Input(String),
    Runtime(String),
}

impl From<soulgeom::GeomError> for Failure {
    fn from(e: soulgeom::GeomError) -> Self {
        use soulgeom::GeomError::*;
        match e {
            Parse(_) | InvalidBody(_) | Domain(_) | Precondition(_) | EmptyRegion(_) | NoUniqueSoul(_) => {
                Failure::Input(e.to_string())
            }
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(format!("{e:#}"))
    }
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
    let common = match &cli.command {
        Command::Soul(a) => &a.common,
        Command::Evolve(a) => &a.common,
        Command::Excess(a) => &a.common,
        Command::Trapezoid(a) => &a.common,
        Command::Flow(a) => &a.common,
        Command::Riccati(a) => &a.common,
        Command::Busemann(a) => &a.common,
    }
    .clone();
    let artifacts = Artifacts { dir: common.out_dir.clone(), svg: common.svg || !common.no_svg };
    let result = match &cli.command {
        Command::Soul(a) => commands::soul(a, &artifacts),
        Command::Evolve(a) => commands::evolve(a, &artifacts),
        Command::Excess(a) => commands::excess(a, &artifacts),
        Command::Trapezoid(a) => commands::trapezoid(a, &artifacts),
        Command::Flow(a) => commands::flow(a, &artifacts),
        Command::Riccati(a) => commands::riccati(a, &artifacts),
        Command::Busemann(a) => commands::busemann(a, &artifacts),
    };
    match result.and_then(|r| finish(r, &common, &artifacts)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("input error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn finish(mut report: RunReport, common: &Common, artifacts: &Artifacts) -> Result<bool, Failure> {
    if let Some(path) = artifacts.path(&format!("{}_report.json", report.command)) {
        if let Some(dir) = &artifacts.dir {
            std::fs::create_dir_all(dir).map_err(|e| Failure::Runtime(format!("creating {}: {e}", dir.display())))?;
        }
        // The report lists itself last so the file and stdout agree byte for byte.
        report.artifacts.push(path.display().to_string());
        let json = report.to_json();
        std::fs::write(&path, &json).map_err(|e| Failure::Runtime(format!("writing {}: {e}", path.display())))?;
    }
    if common.json {
        print!("{}", report.to_json());
    } else {
        print!("{}", report.summary());
    }
    Ok(report.passed())
}
