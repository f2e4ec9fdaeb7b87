//! Scenario driver: generate instances, run the verification pipeline,
//! route queries, emit reports and SVG renderings.

mod scenario;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "gridroute", about = "Routing schemes for grid graphs with holes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file: build the pipeline, verify, write artifacts.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        /// Overrides the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Verification depth: full, sampled:K, or off.
        #[arg(long)]
        verify: Option<String>,
        /// Write an SVG rendering to this path.
        #[arg(long)]
        render: Option<PathBuf>,
        /// Local budget constant (lambda = cl * log n).
        #[arg(long)]
        cl: Option<u64>,
        /// Global budget constant (gamma = cg * log^2 n).
        #[arg(long)]
        cg: Option<u64>,
    },
    /// Generate an instance file.
    Generate {
        /// random-holes, corridor, or udg.
        #[arg(long)]
        kind: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1000)]
        nodes: usize,
        #[arg(long, default_value_t = 4)]
        holes: usize,
        #[arg(long, default_value_t = 2)]
        width: i32,
        #[arg(long, default_value_t = 20)]
        length: i32,
        #[arg(long, default_value_t = 4)]
        folds: i32,
        #[arg(long, default_value_t = 8.0)]
        area: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Route a single query and print the trace as JSON.
    Route {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
    },
    /// Render an instance to SVG.
    Render {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { scenario, seed, verify, render, cl, cg } => {
            scenario::run(&scenario, seed, verify.as_deref(), render.as_deref(), cl, cg)
        }
        Command::Generate { kind, out, nodes, holes, width, length, folds, area, seed } => {
            scenario::generate(&kind, &out, nodes, holes, width, length, folds, area, seed)
        }
        Command::Route { instance, from, to } => scenario::route_one(&instance, from, to),
        Command::Render { instance, out } => scenario::render_only(&instance, &out),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
