use clap::{Parser, Subcommand};
use std::path::PathBuf;

/// Twisted-period toolkit for real hyperplane arrangements: chamber bases
/// of rapid-decay homology, regularized cycles, and period integrals.
#[derive(Parser)]
#[command(name = "twistperiod", version, about)]
struct Args {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a batch job from a JSON file and write report.json
    Run {
        /// Path to the job specification (JSON)
        job: PathBuf,
        /// Output directory for report.json (and plot.svg)
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Also write an SVG chamber plot (requires dim = 2)
        #[arg(long)]
        plot: bool,
        /// Relative tolerance for period integrals
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Run the built-in verification battery and print one line per criterion
    VerifySuite,
}

fn main() {
    // TWISTPERIOD_THREADS caps the worker pool
    if let Ok(s) = std::env::var("TWISTPERIOD_THREADS") {
        if let Ok(n) = s.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
    let args = Args::parse();
    match args.cmd {
        Cmd::Run { job, out, plot, tol } => {
            std::process::exit(twistperiod::cli::run_file(&job, &out, plot, tol));
        }
        Cmd::VerifySuite => {
            let results = twistperiod::suite::run_all();
            let mut ok = true;
            for r in &results {
                println!("{}", r.line());
                ok &= r.pass;
            }
            println!(
                "{} of {} criteria passed",
                results.iter().filter(|r| r.pass).count(),
                results.len()
            );
            std::process::exit(if ok { 0 } else { 1 });
        }
    }
}
