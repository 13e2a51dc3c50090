use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use qsd_core::harness::{run_calibration, run_oracles, run_sweep, run_table1, write_csv, RunConfig};
use qsd_core::protocols::{theta_from_overlap, Protocol, StatePair};
use qsd_core::pulse::compile_protocol;

#[derive(Parser)]
#[command(
    name = "qsd",
    version,
    about = "Discrimination of non-orthogonal spin states: sweeps, summaries, oracles"
)]
struct Cli {
    /// Worker threads (overrides `threads` in the config file).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArg {
    /// `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the theta grid and write CSV rows.
    Sweep {
        #[command(flatten)]
        config: ConfigArg,
        /// Comma-separated subset of susd, idp, helstrom.
        #[arg(long)]
        protocols: Option<String>,
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// ideal, montecarlo or both.
        #[arg(long)]
        mode: Option<String>,
        /// zero (default), default, calibrated or explicit.
        #[arg(long)]
        noise: Option<String>,
        /// CSV destination; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulated per-protocol summary next to the published numbers.
    Table1 {
        #[command(flatten)]
        config: ConfigArg,
        /// calibrated (default), zero, default or explicit.
        #[arg(long)]
        noise: Option<String>,
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Also write the underlying sweep rows here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute-force optimum searches compared with the closed forms.
    Oracles {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Fit the noise profile to the published summary numbers.
    Calibrate {
        #[command(flatten)]
        config: ConfigArg,
    },
    /// Print the pulse schedule of one protocol at one state pair.
    Schedule {
        /// susd_a, susd_b, susd, idp or helstrom.
        #[arg(long)]
        protocol: String,
        #[arg(long, conflicts_with = "overlap")]
        theta: Option<f64>,
        #[arg(long)]
        overlap: Option<f64>,
    },
}

fn load(arg: &ConfigArg) -> Result<RunConfig> {
    match &arg.config {
        Some(path) => RunConfig::load(path).with_context(|| format!("reading {}", path.display())),
        None => Ok(RunConfig::default()),
    }
}

fn set<T: ToString>(config: &mut RunConfig, key: &str, value: &Option<T>) -> Result<()> {
    if let Some(v) = value {
        config.set(key, &v.to_string())?;
    }
    Ok(())
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn init_threads(threads: Option<usize>) -> Result<()> {
    if let Some(n) = threads {
        if n == 0 {
            bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("starting the worker pool")?;
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qsd: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Sweep {
            config,
            protocols,
            shots,
            seed,
            mode,
            noise,
            out,
        } => {
            let mut c = load(config)?;
            set(&mut c, "protocols", protocols)?;
            set(&mut c, "shots", shots)?;
            set(&mut c, "seed", seed)?;
            set(&mut c, "mode", mode)?;
            set(&mut c, "noise", noise)?;
            if let Some(p) = out {
                c.output_path = Some(p.clone());
            }
            init_threads(cli.threads.or(c.threads))?;
            let rows = run_sweep(&c)?;
            write_csv(&rows, open_output(c.output_path.as_deref())?)?;
        }
        Command::Table1 {
            config,
            noise,
            shots,
            seed,
            out,
        } => {
            let mut c = load(config)?;
            set(&mut c, "noise", noise)?;
            set(&mut c, "shots", shots)?;
            set(&mut c, "seed", seed)?;
            init_threads(cli.threads.or(c.threads))?;
            let report = run_table1(&c)?;
            if let Some(c) = &report.calibration {
                eprint!("{c}");
            }
            print!("{report}");
            if let Some(p) = out {
                write_csv(&report.sweep, open_output(Some(p))?)?;
            }
        }
        Command::Oracles { config, resolution } => {
            let mut c = load(config)?;
            set(&mut c, "resolution", resolution)?;
            init_threads(cli.threads.or(c.threads))?;
            print!("{}", run_oracles(&c)?);
        }
        Command::Calibrate { config } => {
            let c = load(config)?;
            init_threads(cli.threads.or(c.threads))?;
            let report = run_calibration(&c)?;
            print!("{report}");
            if !report.converged {
                eprintln!("warning: returning the best profile found so far");
            }
        }
        Command::Schedule {
            protocol,
            theta,
            overlap,
        } => {
            let kind = qsd_core::harness::parse_protocol(protocol)?;
            let theta = match (theta, overlap) {
                (Some(t), None) => *t,
                (None, Some(o)) => theta_from_overlap(*o)?,
                _ => bail!("give exactly one of --theta or --overlap"),
            };
            let protocol = Protocol::build(kind, StatePair::equal(theta)?)?;
            let mut out = io::stdout().lock();
            for (i, schedule) in compile_protocol(&protocol)?.iter().enumerate() {
                if protocol.branches().len() > 1 {
                    writeln!(out, "# branch {i}")?;
                }
                write!(out, "{}", schedule.to_text())?;
            }
        }
    }
    Ok(())
}
