use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use gmig_core::ansatz::build_h2_ansatz_with;
use gmig_core::chem::{H2Problem, StateLabel};
use gmig_core::optim::LsMethod;
use gmig_core::report::{emit_curves, groups, read_records, run_scan_to_file, summarize, Mode, ScanConfig};

#[derive(Parser)]
#[command(name = "gmig", version, about = "GA + local-search VQE/VQD scans for H2 in STO-3G")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the requested states over a bond-length grid.
    Scan(ScanArgs),
    /// Mean log error per state and method from one or more record files.
    Summarize {
        #[arg(required = true)]
        records: Vec<PathBuf>,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Energy, log-error and per-candidate CSVs from record files.
    Curves {
        #[arg(required = true)]
        records: Vec<PathBuf>,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Write the qubit Hamiltonian and ansatz layout at one bond length as JSON.
    Export {
        #[arg(long, default_value_t = 0.7414)]
        r: f64,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct ScanArgs {
    /// JSON file with any subset of the scan settings; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = parse_mode)]
    mode: Option<Mode>,
    #[arg(long, value_parser = parse_ls)]
    ls: Option<LsMethod>,
    #[arg(long)]
    r_min: Option<f64>,
    #[arg(long)]
    r_max: Option<f64>,
    #[arg(long)]
    r_step: Option<f64>,
    /// Comma-separated prefix of ground,triplet,singlet,doubly.
    #[arg(long, value_delimiter = ',', value_parser = parse_state)]
    states: Option<Vec<StateLabel>>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: gmig_core::Error| e.to_string())
}

fn parse_ls(s: &str) -> Result<LsMethod, String> {
    s.parse().map_err(|e: gmig_core::Error| e.to_string())
}

fn parse_state(s: &str) -> Result<StateLabel, String> {
    s.parse().map_err(|e: gmig_core::Error| e.to_string())
}

fn scan_config(args: &ScanArgs) -> Result<ScanConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => ScanConfig::default(),
    };
    if let Some(m) = args.mode {
        cfg.mode = m;
    }
    if let Some(l) = args.ls {
        cfg.ls = l;
    }
    if let Some(v) = args.r_min {
        cfg.r_min = v;
    }
    if let Some(v) = args.r_max {
        cfg.r_max = v;
    }
    if let Some(v) = args.r_step {
        cfg.r_step = v;
    }
    if let Some(s) = &args.states {
        cfg.states = s.clone();
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn load(paths: &[PathBuf]) -> Result<Vec<gmig_core::report::RunRecord>> {
    let mut all = Vec::new();
    for p in paths {
        all.extend(read_records(p).with_context(|| format!("reading {}", p.display()))?);
    }
    if all.is_empty() {
        bail!("no records found");
    }
    Ok(all)
}

fn write_summary(records: &[gmig_core::report::RunRecord], out: &Path) -> Result<()> {
    let summary = summarize(records);
    summary.write_csv(&out.join("summary.csv"))?;
    let table = summary.to_table();
    fs::write(out.join("summary.txt"), &table)?;
    print!("{table}");
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Scan(args) => {
            let cfg = scan_config(&args)?;
            fs::create_dir_all(&args.out)?;
            let name = format!("records_{}_{}.jsonl", cfg.mode.as_str(), cfg.ls.as_str());
            let path = args.out.join(name);
            let records = run_scan_to_file(&cfg, &path)?;
            let failed: Vec<_> = records.iter().filter(|r| !r.is_ok()).collect();
            for rec in &failed {
                eprintln!(
                    "failed: r = {} {}: {}",
                    rec.r,
                    rec.state.as_str(),
                    rec.error.as_deref().unwrap_or("unknown")
                );
            }
            eprintln!("{} records written to {}", records.len(), path.display());
            write_summary(&records, &args.out)?;
            Ok(failed.is_empty())
        }
        Command::Summarize { records, out } => {
            let records = load(&records)?;
            fs::create_dir_all(&out)?;
            write_summary(&records, &out)?;
            Ok(true)
        }
        Command::Curves { records, out } => {
            let records = load(&records)?;
            fs::create_dir_all(&out)?;
            for (mode, ls) in groups(&records) {
                let files = emit_curves(&records, mode, ls, &out)?;
                eprintln!(
                    "wrote {}, {}, {}",
                    files.energies.display(),
                    files.log_errors.display(),
                    files.candidates.display()
                );
            }
            Ok(true)
        }
        Command::Export { r, out } => {
            let problem = H2Problem::new(r)?;
            let spec = build_h2_ansatz_with(&problem.hamiltonian, &Default::default())?;
            fs::create_dir_all(&out)?;
            fs::write(out.join("hamiltonian.json"), problem.hamiltonian.to_json()?)?;
            fs::write(out.join("ansatz.json"), spec.to_json()?)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
