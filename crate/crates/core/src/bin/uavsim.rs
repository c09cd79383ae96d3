use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use uavsim::scenario::{check_writable, run_scenario, sweep, write_outputs};
use uavsim::{parse_config, Error, ScenarioConfig};

#[derive(Parser)]
#[command(name = "uavsim", version, about = "Discrete-event simulator for UAV ad-hoc networks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one scenario and write its report (and optional trace).
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        trace: bool,
    },
    /// Sweep one parameter over a list of values with replications.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',')]
        values: Vec<String>,
        #[arg(long, default_value_t = 1)]
        reps: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare greedy, DSDV and OPAR across velocities and print the ordinal verdicts.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "5,10,15,20,25")]
        velocities: Vec<f64>,
        #[arg(long, default_value_t = 10)]
        reps: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(path: &PathBuf) -> Result<ScenarioConfig, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io { path: path.clone(), source: e })?;
    Ok(parse_config(&text)?)
}

fn write(path: PathBuf, text: &str) -> Result<(), Error> {
    fs::write(&path, text).map_err(|e| Error::Io { path, source: e })
}

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn real_main() -> Result<(), Error> {
    match Cli::parse().cmd {
        Cmd::Run { config, seed, out, trace } => {
            let mut cfg = load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            cfg.trace |= trace;
            check_writable(&out)?;
            let result = run_scenario(&cfg)?;
            write_outputs(&result, &out)?;
            print!("{}", result.report.to_text());
            println!("# wall_clock_s = {:.3}", result.report.wall_clock_secs);
        }
        Cmd::Sweep { config, param, values, reps, out } => {
            let cfg = load(&config)?;
            if let Some(dir) = &out {
                check_writable(dir)?;
            }
            let table = sweep(&cfg, &param, &values, reps)?.to_csv();
            match out {
                Some(dir) => write(dir.join("sweep.csv"), &table)?,
                None => print!("{table}"),
            }
        }
        Cmd::Compare { config, velocities, reps, out } => {
            let cfg = load(&config)?;
            if let Some(dir) = &out {
                check_writable(dir)?;
            }
            let cmp = uavsim::harness::compare_protocols(&cfg, &velocities, reps)?;
            let table = cmp.to_csv();
            let verdicts = uavsim::harness::oracle_csv(&cmp.verdicts());
            match out {
                Some(dir) => {
                    write(dir.join("compare.csv"), &table)?;
                    write(dir.join("verdicts.csv"), &verdicts)?;
                }
                None => print!("{table}\n{verdicts}"),
            }
        }
    }
    Ok(())
}
