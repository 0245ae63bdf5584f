//! `sonobe` command-line tool.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "sonobe", version, about = "Deltahedra and Sonobe-module models")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Energy threshold for a converged realization.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Artifact formats to write (comma separated). Default: all.
    #[arg(long, global = true, value_enum, value_delimiter = ',')]
    format: Vec<Format>,
    /// Directory of OFF files overriding the built-in catalog.
    #[arg(long, global = true)]
    catalog_dir: Option<PathBuf>,
    /// Optimizer starts per realization.
    #[arg(long, global = true, default_value_t = 64)]
    restarts: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the built-in shapes.
    Catalog,
    /// Check that an OFF file or catalog entry is a closed orientable surface.
    Validate { input: String },
    /// Find a unit-edge embedding.
    Realize { input: String },
    /// Cap every face with a Sonobe pyramid and check the caps for collisions.
    Augment { input: String },
    /// Module count, vertex diagram, assembly plan and module colouring.
    Blueprint {
        input: String,
        /// First vertex of the assembly plan.
        #[arg(long)]
        start: Option<usize>,
        /// Colours available for the module colouring.
        #[arg(long, default_value_t = 3)]
        colors: usize,
    },
    /// Unfold the embedding into a planar net.
    Net {
        input: String,
        /// Face placed first.
        #[arg(long)]
        root: Option<usize>,
    },
    /// Look for a unit-edge torus and test its caps.
    SearchTorus {
        /// Torus grid size, e.g. 3x3.
        #[arg(long, required_unless_present = "name", conflicts_with = "name")]
        grid: Option<String>,
        /// Catalog torus.
        #[arg(long)]
        name: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Svg,
    Off,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok((report, code)) => {
            print!("{}", report.to_json());
            ExitCode::from(code)
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
