//! `dish`: analyze a topology, plan altruists, simulate, render and verify.
//!
//! Exit codes: 0 success, 1 internal or verification failure, 2 unreadable
//! or invalid input, 3 degenerate circle arrangement.

mod analyze;
mod exit;
mod plan;
mod simulate;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dish_core::{PsmMode, SolverKind};

#[derive(Parser)]
#[command(name = "dish", version, about = "Unsafe pairs, altruist placement and DISH-p simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the unsafe pairs of a topology.
    Analyze {
        topology: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Nopsm)]
        mode: Mode,
        /// Write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Place altruists so that every unsafe pair is covered.
    Plan {
        topology: PathBuf,
        #[command(flatten)]
        planning: Planning,
        /// Exact solver only: fail unless at most this many altruists suffice.
        #[arg(long)]
        budget: Option<usize>,
        /// Write the placement JSON here (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Run the simulator over one or more seeds and write metrics CSV.
    Simulate {
        config: PathBuf,
        /// First seed (default: the config's seed).
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1)]
        runs: u64,
        /// Override the config's power-saving mode.
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        /// Use the altruists of a placement JSON instead of the config's.
        #[arg(long)]
        placement: Option<PathBuf>,
        /// Write metrics CSV here (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the first run's event trace as JSONL.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Draw the topology, coverage disks, witnesses and altruists as SVG.
    Render {
        topology: PathBuf,
        #[command(flatten)]
        planning: Planning,
        /// Draw these altruists instead of planning new ones.
        #[arg(long)]
        placement: Option<PathBuf>,
        #[arg(long)]
        svg: PathBuf,
    },
    /// Run the built-in property checks against their reference oracles.
    Verify,
}

#[derive(Args, Clone, Copy)]
struct Planning {
    #[arg(long, value_enum, default_value_t = Mode::Nopsm)]
    mode: Mode,
    #[arg(long, value_enum, default_value_t = Solver::Exact)]
    solver: Solver,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Nopsm,
    Psm,
}

impl From<Mode> for PsmMode {
    fn from(m: Mode) -> PsmMode {
        match m {
            Mode::Nopsm => PsmMode::NoPsm,
            Mode::Psm => PsmMode::Psm,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Solver {
    Greedy,
    Exact,
}

impl From<Solver> for SolverKind {
    fn from(s: Solver) -> SolverKind {
        match s {
            Solver::Greedy => SolverKind::Greedy,
            Solver::Exact => SolverKind::Exact,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze { topology, mode, out } => analyze::run(&topology, mode.into(), out.as_deref()),
        Command::Plan { topology, planning, budget, out, svg } => {
            plan::run(&topology, planning.mode.into(), planning.solver.into(), budget, out.as_deref(), svg.as_deref())
        }
        Command::Simulate { config, seed, runs, mode, placement, out, trace } => simulate::run(simulate::Request {
            config: &config,
            seed,
            runs,
            mode: mode.map(Into::into),
            placement: placement.as_deref(),
            out: out.as_deref(),
            trace: trace.as_deref(),
        }),
        Command::Render { topology, planning, placement, svg } => {
            plan::render(&topology, planning.mode.into(), planning.solver.into(), placement.as_deref(), &svg)
        }
        Command::Verify => verify::run(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {:#}", e.error);
            ExitCode::from(e.code)
        }
    }
}
