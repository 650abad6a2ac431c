// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod error;
mod experiments;
mod output;

use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use serde_json::json;
use v2vbench::analysis::MdMode;
use v2vbench::scenario::{load_trace, TraceFormat};

use config::{parse_algorithms, Config, DEFAULT_CONFIG};
use error::CliError;
use experiments::{check_sweep, default_sweep, Experiment, RunSpec};
use output::{gnuplot_script, write_csv, Artifacts};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Approx,
    Full,
}

impl From<ModeArg> for MdMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Approx => MdMode::Approximate,
            ModeArg::Full => MdMode::Full,
        }
    }
}

/// Analytical PRP benchmarks for LTE-V2V resource allocation and the
/// highway simulator that checks them.
#[derive(Debug, Parser)]
#[command(name = "v2vbench", version)]
struct Args {
    /// TOML configuration; omitted keys take their defaults.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    #[arg(long, value_enum, value_name = "NAME", required_unless_present = "print_default_config")]
    experiment: Option<Experiment>,

    /// Vehicle trace CSV (`time_s,vehicle_id,position_m`), one snapshot per
    /// beacon period; replaces PPP drops in the simulation.
    #[arg(long, value_name = "PATH")]
    trace: Option<PathBuf>,

    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,

    #[arg(long, value_name = "N")]
    seed: Option<u64>,

    /// Replications; 0 runs the analysis only.
    #[arg(long, value_name = "N")]
    drops: Option<usize>,

    /// Comma-separated: RR, MD, CRR, LGC, M4-<p_keep>.
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    algorithms: Option<Vec<String>>,

    /// MD interference CDF.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,

    /// Comma-separated sweep values replacing the config's list for the
    /// experiment (distances, densities or CAM rates).
    #[arg(long, value_name = "LIST", value_delimiter = ',', num_args = 0..)]
    sweep: Option<Vec<f64>>,

    /// Print the default configuration and exit.
    #[arg(long)]
    print_default_config: bool,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(args: Args) -> Result<(), CliError> {
    if args.print_default_config {
        print!("{DEFAULT_CONFIG}");
        return Ok(());
    }
    let experiment = args.experiment.expect("required by clap");
    let mut cfg = match &args.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(seed) = args.seed {
        cfg.sim.seed = seed;
        cfg.scenario.seed = seed;
    }
    if let Some(mode) = args.mode {
        cfg.sim.md_mode = mode.into();
    }
    let algorithms = match &args.algorithms {
        Some(list) => parse_algorithms(list.iter().map(String::as_str))?,
        None => cfg.algorithms()?,
    };
    let simulate = args.drops != Some(0);
    if let Some(d) = args.drops.filter(|&d| d > 0) {
        if d < 2 {
            return Err(CliError::Usage("--drops must be 0 (analysis only) or at least 2".into()));
        }
        cfg.sim.drops = d;
    }
    let sweep = args.sweep.clone().unwrap_or_else(|| default_sweep(experiment, &cfg));
    check_sweep(experiment, &sweep)?;

    fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", args.out.display())))?;
    let files = Artifacts::new(&args.out, experiment.name());

    if experiment == Experiment::Validate {
        return validate(&args, &cfg, &files);
    }

    let trace = match &args.trace {
        Some(p) => {
            let f = File::open(p).map_err(|e| CliError::Usage(format!("cannot open trace {}: {e}", p.display())))?;
            let fmt = TraceFormat {
                road_length_m: cfg.scenario.road_length,
                wrap: cfg.scenario.wrap,
            };
            Some(load_trace(BufReader::new(f), fmt)?)
        }
        None => None,
    };
    let spec = RunSpec {
        experiment,
        md_mode: cfg.sim.md_mode,
        config: cfg,
        algorithms,
        simulate,
        trace,
        sweep,
    };
    let outcome = experiments::run(&spec)?;

    write_csv(&outcome.rows, BufWriter::new(File::create(&files.csv)?))?;
    let (xl, yl) = experiment.axis_labels();
    let csv_name = file_name(&files.csv);
    let png = format!("{}.png", experiment.name());
    fs::write(&files.plot, gnuplot_script(&csv_name, &png, xl, yl, &outcome.rows))?;
    let manifest = json!({
        "experiment": experiment.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "config": spec.config,
        "algorithms": spec.algorithms.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "md_mode": spec.md_mode,
        "simulated": spec.simulate,
        "drops": if spec.simulate { spec.config.sim.drops } else { 0 },
        "seed": spec.config.sim.seed,
        "rng": "ChaCha8; replication k uses stream k of the master seed",
        "sweep": spec.sweep,
        "trace": args.trace.as_ref().map(|p| json!({
            "path": p.display().to_string(),
            "snapshots": spec.trace.as_ref().map_or(0, Vec::len),
        })),
        "details": outcome.details,
        "files": { "csv": csv_name, "plot": file_name(&files.plot) },
    });
    fs::write(&files.manifest, serde_json::to_string_pretty(&manifest).expect("serializable"))?;
    println!("wrote {} rows to {}", outcome.rows.len(), files.csv.display());
    Ok(())
}

fn validate(args: &Args, cfg: &Config, files: &Artifacts) -> Result<(), CliError> {
    if args.trace.is_some() {
        return Err(CliError::Usage("validate uses its own synthetic trace; drop --trace".into()));
    }
    let drops = args.drops.filter(|&d| d > 0);
    let (effort, outcomes) = experiments::run_validate(drops, cfg.sim.seed)?;
    let failed = outcomes.iter().filter(|c| !c.passed).count();
    println!("{}/{} checks passed", outcomes.len() - failed, outcomes.len());
    let manifest = json!({
        "experiment": "validate",
        "version": env!("CARGO_PKG_VERSION"),
        "effort": effort,
        "checks": outcomes,
    });
    fs::write(&files.manifest, serde_json::to_string_pretty(&manifest).expect("serializable"))?;
    if failed > 0 {
        return Err(CliError::Validation { failed });
    }
    Ok(())
}

fn file_name(p: &std::path::Path) -> String {
    p.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default()
}
