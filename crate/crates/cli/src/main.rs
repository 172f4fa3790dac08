use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wavecorr::config::{Format, RunConfig};
use wavecorr::output::format_f64;
use wavecorr::{pipeline, Error, Result};

#[derive(Parser)]
#[command(name = "wavecorr", version, about = "Two-photon correlations in coupled waveguide lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configured lattice scenario and write its artifacts.
    Run {
        /// JSON run configuration; omitted fields take the experiment defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory, overriding the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Classical ensemble seed, overriding the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Output format (csv, json, pgm); repeatable, replaces the config list.
        #[arg(long = "format")]
        formats: Vec<Format>,
    },
    /// Coincidence rate of a two-waveguide coupler versus length.
    HomScan {
        /// Coupling constant in m⁻¹.
        #[arg(long, default_value_t = 290.0)]
        coupling: f64,
        /// Largest propagation length in m; defaults to one full revival, π/(2C).
        #[arg(long)]
        z_max: Option<f64>,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        /// Directory for hom_scan.csv; the table goes to stdout otherwise.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the fast two-photon path against the Fock-space oracle.
    OracleCheck {
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Directory for oracle_report.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            RunConfig::from_json(&text)
        }
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::create_dir_all(path.parent().unwrap_or(Path::new("."))).map_err(|e| Error::io(path, e))?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run {
            config,
            out,
            seed,
            formats,
        } => {
            let mut cfg = load_config(config.as_deref())?;
            if let Some(dir) = out {
                cfg.output.directory = dir;
            }
            if let Some(seed) = seed {
                cfg.classical.seed = seed;
            }
            if !formats.is_empty() {
                cfg.output.formats = formats;
            }
            let outcome = pipeline::run(&cfg)?;
            let s = &outcome.summary;
            println!("wrote {} files to {}", outcome.files.len(), outcome.directory.display());
            println!("max gamma      {:.6e}", s.max_gamma);
            println!("min witness    {:.6e}", s.min_witness);
            if let Some(m) = s.min_bound_margin {
                println!("min bound      {m:.6e}");
            }
            if let Some(d) = s.max_mc_deviation_sigma {
                println!("mc deviation   {d:.3} sigma");
            }
            Ok(true)
        }
        Command::HomScan {
            coupling,
            z_max,
            steps,
            out,
        } => {
            let z_max = z_max.unwrap_or(std::f64::consts::PI / (2.0 * coupling));
            let rows = pipeline::hom_scan(coupling, z_max, steps)?;
            let mut text = String::from("z,coincidence\n");
            for p in &rows {
                text.push_str(&format!("{},{}\n", format_f64(p.z), format_f64(p.coincidence)));
            }
            match out {
                Some(dir) => {
                    let path = dir.join("hom_scan.csv");
                    write_text(&path, &text)?;
                    println!("wrote {} rows to {}", rows.len(), path.display());
                }
                None => print!("{text}"),
            }
            Ok(true)
        }
        Command::OracleCheck {
            n,
            trials,
            seed,
            out,
        } => {
            let report = pipeline::oracle_check(n, trials, seed)?;
            for (i, t) in report.trials.iter().enumerate() {
                println!(
                    "trial {i:4}  gamma {:.3e}  amplitude {:.3e}  single {:.3e}",
                    t.max_gamma_deviation, t.max_amplitude_deviation, t.single_photon_deviation
                );
            }
            println!(
                "{}: max gamma deviation {:.3e}, max single-photon deviation {:.3e}",
                if report.passed { "PASS" } else { "FAIL" },
                report.max_gamma_deviation,
                report.max_single_photon_deviation
            );
            if let Some(dir) = out {
                let text = serde_json::to_string_pretty(&report).expect("report serialises");
                write_text(&dir.join("oracle_report.json"), &(text + "\n"))?;
            }
            Ok(report.passed)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
