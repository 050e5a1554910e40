use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use spinfactor::Stepper;
use spinfactor_cli::output::{check_table, data_files, write_files};
use spinfactor_cli::{evaluate, load, CliError, Mode, Overrides};

#[derive(Parser)]
#[command(name = "spinfactor", version, about = "Run and verify U = A D N factorization scenarios")]
struct Args {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Override the scenario's stepper (exp-midpoint or magnus4).
    #[arg(long, global = true)]
    stepper: Option<Stepper>,
    /// Override grid.steps.
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// Output directory for `run`.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run all checks and write the requested outputs.
    Run { config: PathBuf },
    /// Run the checks only and print the table.
    Verify { config: PathBuf },
}

fn run_log(config: &Path, jobs: usize, elapsed: f64, status: &str, files: &[PathBuf]) -> String {
    let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let mut log = format!(
        "spinfactor {}\nconfig = {}\nunix_time = {stamp}\njobs = {jobs}\nelapsed_s = {elapsed:.3}\nstatus = {status}\n",
        env!("CARGO_PKG_VERSION"),
        config.display()
    );
    for f in files {
        log.push_str(&format!("wrote {}\n", f.display()));
    }
    log
}

fn main_inner(args: Args) -> Result<bool, CliError> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = args.jobs {
        if j == 0 {
            return Err(CliError::Config("--jobs: must be >= 1".into()));
        }
        pool = pool.num_threads(j);
    }
    let pool = pool.build().map_err(|e| CliError::Io(e.to_string()))?;
    let overrides = Overrides { stepper: args.stepper, steps: args.steps };
    let (path, mode) = match &args.command {
        Command::Run { config } => (config, Mode::Run),
        Command::Verify { config } => (config, Mode::Verify),
    };
    let config = load(path, overrides)?;
    let started = Instant::now();
    let (scenario, outcome) = pool.install(|| evaluate(config, mode))?;
    print!("{}", check_table(&outcome));
    let passed = outcome.passed();
    let status = if passed { "pass" } else { "fail" };
    println!("{}: {status}", scenario.config.name);

    if mode == Mode::Run {
        let files = data_files(&scenario.config, &outcome)?;
        let mut written = write_files(&args.out, &files)?;
        let log_path = args.out.join(format!("{}-run.log", scenario.config.name));
        let log = run_log(path, pool.current_num_threads(), started.elapsed().as_secs_f64(), status, &written);
        std::fs::write(&log_path, log).map_err(|e| CliError::Io(format!("cannot write {}: {e}", log_path.display())))?;
        written.push(log_path);
        for f in &written {
            println!("wrote {}", f.display());
        }
    }
    Ok(passed)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            // Usage errors count as configuration errors; help and version succeed.
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match main_inner(args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
