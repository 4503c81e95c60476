use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use reak_core::benchmarks::{Benchmark, BenchmarkKind};
use reak_harness::config::{ModelSpec, Preset, RunConfig};
use reak_harness::error::{exit, HarnessError, Result};
use reak_harness::output::{ensure_dir, resolve_output_dir, write_json, write_pool_csv, write_trace_csv};
use reak_harness::run::{execute, summary, Model};
use reak_harness::{run_compare, run_sweep};

#[derive(Parser)]
#[command(name = "reak", version, about = "Adaptive Kriging reliability analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One run of the configured method.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides the configuration and REAK_OUTPUT_DIR.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the configured seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Repeated runs over seeds with aggregate statistics.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Number of seeds; defaults to the configured repetitions.
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Every configured method and threshold on one shared pool.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Built-in benchmarks and presets.
    ListBenchmarks,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let code = match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Run { config, out, seed } => cmd_run(&config, out.as_deref(), seed),
        Command::Sweep {
            config,
            reps,
            jobs,
            out,
        } => cmd_sweep(&config, reps, jobs, out.as_deref()),
        Command::Compare { config, jobs, out } => cmd_compare(&config, jobs, out.as_deref()),
        Command::ListBenchmarks => {
            print!("{}", list_benchmarks());
            Ok(exit::SUCCESS)
        }
    }
}

fn load(config: &Path, out: Option<&Path>) -> Result<(RunConfig, PathBuf)> {
    let cfg = RunConfig::from_path(config)?;
    let dir = resolve_output_dir(out, cfg.output_dir.as_deref());
    ensure_dir(&dir)?;
    write_json(&dir.join("effective_config.json"), &cfg.to_value())?;
    Ok((cfg, dir))
}

/// Records a failed run next to its configuration.
fn write_error(dir: &Path, e: &HarnessError) {
    let doc = serde_json::json!({"error": e.to_string(), "exit_code": e.exit_code()});
    if let Err(w) = write_json(&dir.join("error.json"), &doc) {
        eprintln!("error: {w}");
    }
}

fn cmd_run(config: &Path, out: Option<&Path>, seed: Option<u64>) -> Result<i32> {
    let (mut cfg, dir) = load(config, out)?;
    if let Some(s) = seed {
        cfg.engine.seed = s;
    }
    let result = Model::instantiate(&cfg.model).and_then(|m| execute(&m, &cfg.model.label(), &cfg.engine, cfg.oracle));
    let run = match result {
        Ok(r) => r,
        Err(e) => {
            write_error(&dir, &e);
            return Err(e);
        }
    };
    write_json(&dir.join("report.json"), &run.report)?;
    if let Some(outcome) = &run.outcome {
        write_trace_csv(&dir.join("trace.csv"), &outcome.report.trace)?;
        if outcome.pool.dim() <= 2 {
            write_pool_csv(&dir.join("pool.csv"), outcome)?;
        }
    }
    println!("{}", summary(&run.report));
    println!("reports written to {}", dir.display());
    if run.report.report.converged {
        Ok(exit::SUCCESS)
    } else {
        let e = HarnessError::NotConverged(format!("flags {:?}", run.report.report.flags));
        eprintln!("warning: {e}");
        Ok(e.exit_code())
    }
}

fn cmd_sweep(config: &Path, reps: Option<usize>, jobs: usize, out: Option<&Path>) -> Result<i32> {
    let (cfg, dir) = load(config, out)?;
    let seeds = cfg.sweep_seeds(reps.unwrap_or(cfg.repetitions))?;
    let report = run_sweep(&cfg, &seeds, jobs)?;
    report.write(&dir)?;
    let s = &report.stats;
    let f = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"));
    println!(
        "{}: {} runs, {} failed, {} flagged; calls mean {} cov {}; eps mean {}; eps_max mean {}; coverage {}",
        report.model,
        s.n_runs,
        s.n_failed,
        s.n_flagged,
        f(s.mean_calls),
        f(s.cov_calls),
        f(s.mean_eps),
        f(s.mean_eps_max_hat),
        f(s.coverage)
    );
    println!("reports written to {}", dir.display());
    Ok(if s.n_failed > 0 { exit::INTERNAL } else { exit::SUCCESS })
}

fn cmd_compare(config: &Path, jobs: usize, out: Option<&Path>) -> Result<i32> {
    let (cfg, dir) = load(config, out)?;
    let report = match run_compare(&cfg, jobs) {
        Ok(r) => r,
        Err(e) => {
            write_error(&dir, &e);
            return Err(e);
        }
    };
    report.write(&dir)?;
    print!("{}", report.table());
    println!("reports written to {}", dir.display());
    Ok(exit::SUCCESS)
}

fn list_benchmarks() -> String {
    let mut s = format!(
        "{:<12} {:>3} {:>10} {:>8} {:>9} {:>8}  {}\n",
        "name", "dim", "ref_pf", "ref_cov", "pool", "cov_thr", "variables"
    );
    for kind in BenchmarkKind::ALL {
        let b = Benchmark::<f64>::new(kind);
        let r = b.reference();
        s.push_str(&format!(
            "{:<12} {:>3} {:>10.3e} {:>8} {:>9} {:>8}  {}\n",
            kind.name(),
            b.rv().dim(),
            r.pf,
            r.cov,
            b.default_pool().0,
            b.default_cov_thr(),
            b.rv().names().join(",")
        ));
    }
    s.push_str("\npresets:");
    for p in Preset::ALL {
        s.push_str(&format!(" {} ({})", p.name(), ModelSpec::Benchmark(p.benchmark()).label()));
    }
    s.push('\n');
    s
}
