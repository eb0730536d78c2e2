mod commands;
mod input;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use orthocalc_core::{ErrorClass, Tolerances};

#[derive(Parser)]
#[command(name = "orthocalc", version, about = "Ortholength invariants of cusped hyperbolic 3-manifolds")]
#[command(after_long_help = commands::FORMATS_HELP)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct Global {
    /// Tolerance for membership, coherence and matching tests.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Seed for randomized choices (`realize --pivot shuffled`).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Output::Json)]
    pub output: Output,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Output {
    /// One line of compact JSON.
    Json,
    /// Indented JSON.
    Pretty,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Pivot {
    /// Largest available pivot at each stage.
    Largest,
    /// Rows in the order given by `--order`.
    Ordered,
    /// Rows in an order drawn from `--seed`.
    Shuffled,
}

#[derive(Subcommand)]
enum Command {
    /// Hextet residuals and membership in P(K), S and T.
    Check {
        /// Triangulation file.
        #[arg(long)]
        tri: String,
        /// Parameters: a file, or inline JSON such as '[[1,0],[1,0]]'.
        #[arg(long)]
        params: String,
    },
    /// Ortholength invariant of a representation given per edge.
    Orth {
        /// Representation file or inline JSON: {"h": mat, "edges": [mat, ...], "l": mat?}.
        #[arg(long)]
        rep: String,
        /// Computation method (trace, axis).
        #[arg(long, default_value = "trace")]
        method: String,
    },
    /// Oriented lines with a prescribed Gram matrix.
    Realize {
        /// Gram matrix file or inline JSON: {"n": 3, "entries": [[c, ...], ...]}.
        #[arg(long)]
        gram: String,
        #[arg(long, value_enum, default_value_t = Pivot::Largest)]
        pivot: Pivot,
        /// Comma-separated row order for `--pivot ordered`.
        #[arg(long, value_delimiter = ',')]
        order: Vec<usize>,
    },
    /// Search for a coherent realization of the parameters.
    Coherent {
        #[arg(long)]
        tri: String,
        #[arg(long)]
        params: String,
    },
    /// Holonomy representation of coherent parameters, and the round trip back.
    Reconstruct {
        #[arg(long)]
        tri: String,
        #[arg(long)]
        params: String,
    },
    /// Follow the curve of P(K) through a starting point.
    Trace {
        #[arg(long)]
        tri: String,
        /// Run file or inline JSON with keys start, direction, step, max_steps, tol.
        #[arg(long, conflicts_with_all = ["start", "direction"])]
        run: Option<String>,
        /// Starting parameters (file or inline JSON).
        #[arg(long, required_unless_present = "run")]
        start: Option<String>,
        /// Preferred complex direction (file or inline JSON).
        #[arg(long, required_unless_present = "run")]
        direction: Option<String>,
        #[arg(long)]
        step: Option<f64>,
        #[arg(long)]
        max_steps: Option<usize>,
    },
    /// The figure-8 knot complement example.
    Fig8 {
        /// Character variety coordinate, e.g. "3+0i".
        #[arg(long = "V", value_name = "V", required_unless_present_any = ["selftest", "triangulation"])]
        v: Option<String>,
        /// Run the built-in regression checks.
        #[arg(long, conflicts_with = "triangulation")]
        selftest: bool,
        /// Print the built-in triangulation file.
        #[arg(long)]
        triangulation: bool,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let tol = Tolerances::default().with_geom(cli.global.tol);
    let result = match cli.command {
        Command::Check { tri, params } => commands::check(&tri, &params, &tol),
        Command::Orth { rep, method } => commands::orth(&rep, &method, &tol),
        Command::Realize { gram, pivot, order } => {
            commands::realize(&gram, pivot, &order, cli.global.seed, &tol)
        }
        Command::Coherent { tri, params } => commands::coherent(&tri, &params, &tol),
        Command::Reconstruct { tri, params } => commands::reconstruct(&tri, &params, &tol),
        Command::Trace {
            tri,
            run,
            start,
            direction,
            step,
            max_steps,
        } => commands::trace(&tri, run, start, direction, step, max_steps),
        Command::Fig8 {
            v,
            selftest,
            triangulation,
        } => commands::fig8(v.as_deref(), selftest, triangulation, &tol),
    };
    match result {
        Ok(out) => {
            let text = match cli.global.output {
                Output::Json => serde_json::to_string(&out.value),
                Output::Pretty => serde_json::to_string_pretty(&out.value),
            }
            .expect("values serialize");
            // A closed pipe (e.g. `| head`) is not an error worth reporting.
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.class() {
                ErrorClass::Verdict => 1,
                ErrorClass::Input => 2,
                ErrorClass::Numerical => 3,
            })
        }
    }
}
