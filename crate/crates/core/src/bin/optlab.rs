//! Command-line front door: run experiments from JSON configs, run the audit
//! suites, and export stability-region sweeps.
//!
//! Exit codes: 0 success, 1 audit or runtime failure, 2 config error.

use clap::{Parser, Subcommand};
use optlab::harness::{config_hash, run_suite, BoundAudit, ExperimentConfig, RunManifest, SuiteKind};
use optlab::optimizers::Trace;
use optlab::spectral;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "optlab", version, about = "First-order optimization laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a JSON config and write trace CSVs.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Override the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the config's iteration count.
        #[arg(long)]
        iters: Option<usize>,
    },
    /// Run a bound-audit suite and print a pass/fail table.
    Audit {
        /// One of: all, gd, sgd, momentum, spectral, lower-bounds.
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write JSON audit reports into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Inject an impossible bound (forced-failure fixture for the exit-code contract).
        #[arg(long, hide = true, default_value_t = false)]
        tamper: bool,
    },
    /// Export a stability-region sweep as CSV.
    Sweep {
        /// One of: hb-region, nesterov-region.
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = -1.2)]
        bmin: f64,
        #[arg(long, default_value_t = 1.2)]
        bmax: f64,
        #[arg(long, default_value_t = 0.0)]
        hmin: f64,
        #[arg(long, default_value_t = 5.0)]
        hmax: f64,
        #[arg(long, default_value_t = 101)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

/// 17 significant digits, enough to reproduce every f64 bit for bit.
fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_trace_csv(path: &Path, trace: &Trace) -> std::io::Result<()> {
    use std::io::Write;
    let mut out = String::with_capacity(trace.len() * 96);
    out.push_str("n,loss_gap,dist,grad_norm,lr,beta,gamma\n");
    for r in trace.records() {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.n,
            fmt_f64(r.loss_gap),
            fmt_f64(r.dist_to_min),
            fmt_f64(r.grad_norm),
            fmt_f64(r.lr),
            fmt_f64(r.beta),
            fmt_f64(r.gamma),
        ));
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(out.as_bytes())
}

fn cmd_run(config: &Path, out_dir: &Path, seed: Option<u64>, iters: Option<usize>) -> ExitCode {
    let text = match std::fs::read_to_string(config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", config.display());
            return ExitCode::from(2);
        }
    };
    let raw: serde_json::Value = match serde_json::from_str(&text) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {}: {e}", config.display());
            return ExitCode::from(2);
        }
    };
    let mut cfg = match ExperimentConfig::from_json(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", config.display());
            return ExitCode::from(2);
        }
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(n) = iters {
        cfg.iterations = n;
    }

    let traces = match cfg.run() {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: run failed: {e}");
            return ExitCode::from(1);
        }
    };

    if let Err(e) = std::fs::create_dir_all(out_dir) {
        eprintln!("error: cannot create {}: {e}", out_dir.display());
        return ExitCode::from(1);
    }
    let mut outputs = Vec::new();
    for (r, trace) in traces.iter().enumerate() {
        let name = if r == 0 { "trace.csv".to_string() } else { format!("trace_r{r:03}.csv") };
        let path = out_dir.join(&name);
        if let Err(e) = write_trace_csv(&path, trace) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(1);
        }
        outputs.push(name);
    }
    let manifest = RunManifest {
        config_hash: config_hash(&raw),
        seed: cfg.seed,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        outputs,
    };
    let manifest_path = out_dir.join("manifest.json");
    match serde_json::to_string_pretty(&manifest) {
        Ok(json) => {
            if let Err(e) = std::fs::write(&manifest_path, json + "\n") {
                eprintln!("error: cannot write {}: {e}", manifest_path.display());
                return ExitCode::from(1);
            }
        }
        Err(e) => {
            eprintln!("error: manifest serialization: {e}");
            return ExitCode::from(1);
        }
    }
    println!("wrote {} trace file(s) and manifest.json to {}", traces.len(), out_dir.display());
    ExitCode::SUCCESS
}

fn cmd_audit(suite: &str, seed: u64, out: Option<&Path>, tamper: bool) -> ExitCode {
    let kind = match SuiteKind::parse(suite) {
        Some(k) => k,
        None => {
            eprintln!("error: unknown suite '{suite}' (expected all, gd, sgd, momentum, spectral, lower-bounds)");
            return ExitCode::from(2);
        }
    };
    let mut audits = match run_suite(kind, seed) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: audit suite failed to run: {e}");
            return ExitCode::from(1);
        }
    };
    if tamper {
        let mut forced = BoundAudit::new("forced-failure-fixture");
        forced.require_le(1.0, 0.0);
        audits.push(forced);
    }

    let name_width = audits.iter().map(|a| a.bound_name.len()).max().unwrap_or(8).max(5);
    println!("{:<name_width$}  {:>8}  {:>10}  {:>14}", "bound", "checked", "violations", "max_rel_viol");
    let mut all_pass = true;
    for a in &audits {
        println!(
            "{:<name_width$}  {:>8}  {:>10}  {:>14.3e}",
            a.bound_name,
            a.n_checked(),
            a.violations,
            a.max_rel_violation
        );
        all_pass &= a.passed();
    }
    println!("{}: {} audits, {} failing", suite, audits.len(), audits.iter().filter(|a| !a.passed()).count());

    if let Some(dir) = out {
        if let Err(e) = std::fs::create_dir_all(dir) {
            eprintln!("error: cannot create {}: {e}", dir.display());
            return ExitCode::from(1);
        }
        let descriptor = serde_json::json!({ "suite": suite, "seed": seed });
        let hash = config_hash(&descriptor);
        let reports: Vec<_> = audits.iter().map(|a| a.report(seed, &hash)).collect();
        let path = dir.join(format!("audit_{suite}.json"));
        match serde_json::to_string_pretty(&reports) {
            Ok(json) => {
                if let Err(e) = std::fs::write(&path, json + "\n") {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            }
            Err(e) => {
                eprintln!("error: report serialization: {e}");
                return ExitCode::from(1);
            }
        }
    }

    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn cmd_sweep(kind: &str, bmin: f64, bmax: f64, hmin: f64, hmax: f64, steps: usize, out: &Path) -> ExitCode {
    let nesterov = match kind {
        "hb-region" => false,
        "nesterov-region" => true,
        _ => {
            eprintln!("error: unknown sweep kind '{kind}' (expected hb-region or nesterov-region)");
            return ExitCode::from(2);
        }
    };
    let rows = match spectral::region_sweep(bmin, bmax, hmin, hmax, steps, nesterov) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let mut csv = String::with_capacity(rows.len() * 64);
    csv.push_str("beta,hlambda,region,radius\n");
    for row in &rows {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            fmt_f64(row.beta),
            fmt_f64(row.hlambda),
            row.region.as_str(),
            fmt_f64(row.radius)
        ));
    }
    if let Err(e) = std::fs::write(out, csv) {
        eprintln!("error: cannot write {}: {e}", out.display());
        return ExitCode::from(1);
    }
    println!("wrote {} rows to {}", rows.len(), out.display());
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    // Cap replica parallelism when requested.
    if let Ok(threads) = std::env::var("OPTLAB_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: OPTLAB_THREADS must be a positive integer, got '{threads}'");
                return ExitCode::from(2);
            }
        }
    }
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, out, seed, iters } => cmd_run(&config, &out, seed, iters),
        Command::Audit { suite, seed, out, tamper } => cmd_audit(&suite, seed, out.as_deref(), tamper),
        Command::Sweep { kind, bmin, bmax, hmin, hmax, steps, out } => {
            cmd_sweep(&kind, bmin, bmax, hmin, hmax, steps, &out)
        }
    }
}
