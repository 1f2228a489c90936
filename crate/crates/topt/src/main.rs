//! `topt` — compile Clifford+T circuits with reduced T count, benchmark the
//! optimizers and verify channel equivalence.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error.

use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use topt::bench::{
    records_to_csv, run_circuit_instance, run_random_benchmark, verify_equivalence,
    BenchmarkRecord, ScalingReport, MAX_VERIFY_QUBITS,
};
use topt::circuit::{emit, parse, parse_qc, Circuit};
use topt::optimizers::OptimizerKind;
use topt::resynth::{compile, HadamardMode};
use topt::OptimizerChoice;

#[derive(Parser)]
#[command(name = "topt", version, about = "T-count optimizing compiler for Clifford+T circuits")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Re-synthesize a circuit file with reduced T count
    Optimize {
        /// Circuit file (native format, or .qc benchmark format)
        file: PathBuf,
        /// re | tool-f | tool-nf | todd | rm
        #[arg(long, default_value = "todd")]
        optimizer: String,
        /// gadget | partition
        #[arg(long, default_value = "gadget")]
        hadamard: String,
        /// Cap on concurrently live Hadamard ancillas (gadget mode)
        #[arg(long)]
        h_cap: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Check channel equivalence of input and output (needs <= 12 qubits)
        #[arg(long)]
        verify: bool,
        /// Write the optimized circuit here (default: stdout)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print a report in the given format: json | csv
        #[arg(long)]
        report: Option<String>,
    },
    /// Benchmark harness
    Bench {
        #[command(subcommand)]
        which: BenchCmd,
    },
    /// Check channel equivalence of two circuit files
    Verify { original: PathBuf, compiled: PathBuf },
}

#[derive(Subcommand)]
enum BenchCmd {
    /// Random signature tensors over a grid of n
    Random {
        /// Comma-separated list of n values
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Comma-separated optimizer names
        #[arg(long, value_delimiter = ',', default_value = "todd")]
        optimizers: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write records to this CSV file
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Fixture circuits from a directory of .qc files
    Fixtures {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long, default_value = "todd")]
        optimizer: String,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn input_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn load_circuit(path: &Path) -> Result<Circuit, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let is_qc = path.extension().map(|e| e == "qc").unwrap_or(false)
        || text.lines().any(|l| l.trim_start().starts_with(".v"));
    let parsed = if is_qc { parse_qc(&text) } else { parse(&text) };
    parsed.map_err(|e| format!("{}: {e}", path.display()))
}

fn parse_optimizer(name: &str) -> Result<OptimizerKind, String> {
    OptimizerKind::parse(name).ok_or_else(|| format!("unknown optimizer `{name}`"))
}

fn run_optimize(
    file: &Path,
    optimizer: &str,
    hadamard: &str,
    h_cap: Option<usize>,
    seed: u64,
    verify: bool,
    out: Option<&Path>,
    report: Option<&str>,
) -> Result<ExitCode, String> {
    let circuit = load_circuit(file)?;
    let kind = parse_optimizer(optimizer)?;
    let mode = match hadamard.to_ascii_lowercase().as_str() {
        "gadget" => HadamardMode::Gadget,
        "partition" => HadamardMode::Partition,
        other => return Err(format!("unknown hadamard mode `{other}`")),
    };
    let start = std::time::Instant::now();
    let (optimized, rep) = compile(&circuit, &OptimizerChoice::with_seed(kind, seed), mode, h_cap)
        .map_err(|e| e.to_string())?;
    let seconds = start.elapsed().as_secs_f64();

    let mut verified_ok = true;
    if verify {
        if optimized.width() > MAX_VERIFY_QUBITS {
            return Err(format!(
                "--verify needs <= {MAX_VERIFY_QUBITS} qubits, output has {}",
                optimized.width()
            ));
        }
        let (ok, worst) = verify_equivalence(&circuit, &optimized).map_err(|e| e.to_string())?;
        verified_ok = ok;
        eprintln!(
            "verify: {} (worst branch infidelity {worst:.3e})",
            if ok { "equivalent" } else { "NOT equivalent" }
        );
    }

    let text = emit(&optimized);
    match out {
        Some(path) => std::fs::write(path, &text).map_err(|e| e.to_string())?,
        None => print!("{text}"),
    }

    let name = file
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| "circuit".into());
    let record = BenchmarkRecord {
        name,
        n: rep.n,
        h: rep.h,
        np: rep.n_p,
        optimizer: kind.name().to_string(),
        t_before: rep.t_before,
        t_after: rep.t_after,
        saving_pct: if rep.t_before > 0 {
            100.0 * (rep.t_before as f64 - rep.t_after as f64) / rep.t_before as f64
        } else {
            0.0
        },
        seconds,
        seed,
    };
    match report {
        Some("json") => println!("{}", serde_json::to_string_pretty(&record).unwrap()),
        Some("csv") => print!("{}", records_to_csv(std::slice::from_ref(&record))),
        Some(other) => return Err(format!("unknown report format `{other}`")),
        None => eprintln!(
            "T count {} -> {} ({} ancillas, {} partitions, {seconds:.3}s)",
            rep.t_before, rep.t_after, rep.h, rep.n_p
        ),
    }
    Ok(if verified_ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run_bench_random(
    ns: &[usize],
    trials: usize,
    optimizers: &[String],
    seed: u64,
    csv: Option<&Path>,
) -> Result<ExitCode, String> {
    let kinds = optimizers
        .iter()
        .map(|s| parse_optimizer(s))
        .collect::<Result<Vec<_>, _>>()?;
    let records = run_random_benchmark(ns, trials, &kinds, seed).map_err(|e| e.to_string())?;
    let csv_text = records_to_csv(&records);
    match csv {
        Some(path) => std::fs::write(path, &csv_text).map_err(|e| e.to_string())?,
        None => print!("{csv_text}"),
    }
    let scaling = ScalingReport::from_records(&records);
    for kind in &kinds {
        for p in scaling.points.iter().filter(|p| p.optimizer == kind.name()) {
            eprintln!(
                "{}: n={} mean T = {:.2} +- {:.2} ({} trials)",
                p.optimizer, p.n, p.mean_t, p.stderr_t, p.trials
            );
        }
        if ns.len() >= 3 {
            if let Ok((slope, err)) = scaling.fit_scaling(kind.name()) {
                eprintln!("{}: log-log slope {slope:.3} +- {err:.3}", kind.name());
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_bench_fixtures(
    dir: &Path,
    optimizer: &str,
    csv: Option<&Path>,
) -> Result<ExitCode, String> {
    let kind = parse_optimizer(optimizer)?;
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| format!("cannot read {}: {e}", dir.display()))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().map(|x| x == "qc").unwrap_or(false))
        .collect();
    paths.sort();
    let mut records = Vec::new();
    for path in &paths {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().to_string())
            .unwrap_or_default();
        let result = load_circuit(path).and_then(|c| {
            let verify = c.width() + c.h_count() <= MAX_VERIFY_QUBITS;
            run_circuit_instance(&name, &c, kind, HadamardMode::Gadget, None, 0, verify)
                .map_err(|e| e.to_string())
        });
        match result {
            Ok(rec) => {
                eprintln!(
                    "{name}: T {} -> {} ({} ancillas, {:.3}s)",
                    rec.t_before, rec.t_after, rec.h, rec.seconds
                );
                records.push(rec);
            }
            // per-record failure: report and continue with the rest
            Err(e) => eprintln!("{name}: FAILED: {e}"),
        }
    }
    let csv_text = records_to_csv(&records);
    match csv {
        Some(path) => std::fs::write(path, &csv_text).map_err(|e| e.to_string())?,
        None => print!("{csv_text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn run_verify(original: &Path, compiled: &Path) -> Result<ExitCode, String> {
    let orig = load_circuit(original)?;
    let comp = load_circuit(compiled)?;
    let (ok, worst) = verify_equivalence(&orig, &comp).map_err(|e| e.to_string())?;
    println!(
        "{} (worst branch infidelity {worst:.3e})",
        if ok { "equivalent" } else { "NOT equivalent" }
    );
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Optimize {
            file,
            optimizer,
            hadamard,
            h_cap,
            seed,
            verify,
            out,
            report,
        } => run_optimize(
            file,
            optimizer,
            hadamard,
            *h_cap,
            *seed,
            *verify,
            out.as_deref(),
            report.as_deref(),
        ),
        Cmd::Bench { which } => match which {
            BenchCmd::Random { n, trials, optimizers, seed, csv } => {
                run_bench_random(n, *trials, optimizers, *seed, csv.as_deref())
            }
            BenchCmd::Fixtures { dir, optimizer, csv } => {
                run_bench_fixtures(dir, optimizer, csv.as_deref())
            }
        },
        Cmd::Verify { original, compiled } => run_verify(original, compiled),
    };
    match result {
        Ok(code) => code,
        Err(msg) => input_error(msg),
    }
}
