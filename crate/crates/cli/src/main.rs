//! Command-line entry point: construction, verification, coding-gain, and
//! simulation workflows with JSON/CSV file interchange.
//!
//! Machine-readable output goes to stdout as JSON; diagnostics go to stderr.
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error.

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;
use uwdstbc_core::clifford::clifford_generators;
use uwdstbc_core::io::{load_design, save_design, save_matrices};
use uwdstbc_core::signal::{
    coding_gain_bruteforce, energy_scale_for_unit_average, full_diversity_check,
    hypercube_signal_set, rotated_signal_set, rotated_signal_set_3d, SignalSet,
};
use uwdstbc_core::sim::{simulate, SimConfig};
use uwdstbc_core::uwd::{
    build_3rsd, build_4rsd, example1_design, example2_design, rate, verify_design,
    verify_normalized, WeightDesign,
};

#[derive(Parser)]
#[command(
    name = "uwdstbc",
    version,
    about = "Group-decodable unitary weight space-time codes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a family of 2a anti-commuting anti-Hermitian unitary generators.
    Clifford {
        /// Family exponent; matrices have size 2^a.
        #[arg(long)]
        a: u32,
        /// Output path for the JSON array of matrices.
        #[arg(long)]
        emit: PathBuf,
    },
    /// Construct a maximal-rate design and write it as JSON.
    Build {
        /// Design exponent; matrices have size 2^a.
        #[arg(long)]
        a: u32,
        /// Real symbols per group (3 or 4).
        #[arg(long)]
        lambda: usize,
        /// Output path for the design JSON.
        #[arg(long)]
        out: PathBuf,
    },
    /// Check the decodability conditions of a design file.
    Verify {
        /// Design JSON path.
        design: PathBuf,
    },
    /// Print the exact rate of a design file.
    Rate {
        #[arg(long)]
        design: PathBuf,
    },
    /// Coding gain of a design against the rotated-lattice set.
    CodingGain {
        #[arg(long)]
        design: PathBuf,
        /// Signal-set energy scale; defaults to the unit-average-energy scale.
        #[arg(long)]
        e: Option<f64>,
    },
    /// Full-diversity test of a signal set.
    DiversityCheck(DiversityArgs),
    /// Monte-Carlo simulation commands.
    #[command(subcommand)]
    Sim(SimCommand),
    /// Write a built-in reference design to a file.
    Export {
        /// Fixture name: example1 or example2.
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct DiversityArgs {
    /// Energy scale of the set.
    #[arg(long, default_value_t = std::f64::consts::SQRT_2)]
    e: f64,
    /// Which set to test: the rotated lattice or the axis-aligned hypercube.
    #[arg(long, default_value = "rotated", value_parser = ["rotated", "hypercube"])]
    lattice: String,
    /// Also write the set as CSV rows of coordinates.
    #[arg(long)]
    emit_csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum SimCommand {
    /// Sweep SNR points and write per-point error rates as CSV.
    Run {
        #[arg(long)]
        design: PathBuf,
        /// Signal-set energy scale; defaults to the unit-average-energy scale.
        #[arg(long)]
        e: Option<f64>,
        /// Receive antennas.
        #[arg(long, default_value_t = 1)]
        nr: usize,
        /// SNR sweep in dB: a single value or start:stop:step.
        #[arg(long)]
        snr: String,
        /// Trials per SNR point.
        #[arg(long)]
        trials: u64,
        /// RNG seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV output path.
        #[arg(long)]
        out: PathBuf,
    },
}

/// Failure that should surface as a usage/input error (exit code 2).
struct CliError(String);

impl<E: std::fmt::Display> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

fn parse_snr_sweep(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let parse = |s: &str| -> Result<f64, CliError> {
        s.parse::<f64>()
            .map_err(|_| CliError(format!("bad SNR component '{s}'")))
    };
    match parts.as_slice() {
        [single] => Ok(vec![parse(single)?]),
        [start, stop, step] => {
            let (start, stop, step) = (parse(start)?, parse(stop)?, parse(step)?);
            if step <= 0.0 || stop < start {
                return Err(CliError(
                    "SNR sweep needs start <= stop and step > 0".into(),
                ));
            }
            let mut out = Vec::new();
            let mut v = start;
            while v <= stop + 1e-9 {
                out.push(v);
                v += step;
            }
            Ok(out)
        }
        _ => Err(CliError(format!(
            "SNR spec '{spec}' is neither a value nor start:stop:step"
        ))),
    }
}

fn signal_set_for(design: &WeightDesign, e: Option<f64>) -> Result<(SignalSet, f64), CliError> {
    let scale = match e {
        Some(v) if v > 0.0 => v,
        Some(v) => return Err(CliError(format!("energy scale must be positive, got {v}"))),
        None => energy_scale_for_unit_average(design),
    };
    let set = match design.lambda() {
        4 => rotated_signal_set(scale),
        3 => rotated_signal_set_3d(scale),
        other => {
            return Err(CliError(format!(
                "no rotated-lattice signal set for lambda = {other}"
            )))
        }
    };
    Ok((set, scale))
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Clifford { a, emit } => {
            let family = clifford_generators(a)?;
            save_matrices(&emit, family.generators())?;
            println!(
                "{}",
                json!({"a": a, "count": family.generators().len(), "size": family.dim(), "path": emit})
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Build { a, lambda, out } => {
            let design = match lambda {
                3 => build_3rsd(a)?,
                4 => build_4rsd(a)?,
                other => return Err(CliError(format!("lambda must be 3 or 4, got {other}"))),
            };
            save_design(&out, &design, None)?;
            println!(
                "{}",
                json!({
                    "n": design.n(),
                    "g": design.groups(),
                    "lambda": design.lambda(),
                    "rate": rate(&design).to_string(),
                    "path": out,
                })
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { design } => {
            let (d, _) = load_design(&design)?;
            let report = verify_design(&d);
            let normalized = verify_normalized(&d).ok();
            let pass = report.pass();
            println!(
                "{}",
                json!({
                    "pass": pass,
                    "conditions": report,
                    "normalized_conditions": normalized,
                })
            );
            Ok(if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Rate { design } => {
            let (d, _) = load_design(&design)?;
            println!("{}", json!({"rate": rate(&d).to_string()}));
            Ok(ExitCode::SUCCESS)
        }
        Command::CodingGain { design, e } => {
            let (d, _) = load_design(&design)?;
            let (set, scale) = signal_set_for(&d, e)?;
            let gain = coding_gain_bruteforce(&d, &set)?;
            let diversity = full_diversity_check(&set);
            println!(
                "{}",
                json!({
                    "e": scale,
                    "coding_gain": gain,
                    "coding_gain_db": 10.0 * gain.log10(),
                    "min_psi": diversity.min_psi,
                })
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::DiversityCheck(args) => {
            if args.e <= 0.0 {
                return Err(CliError("energy scale must be positive".into()));
            }
            let set = match args.lattice.as_str() {
                "rotated" => rotated_signal_set(args.e),
                _ => hypercube_signal_set(args.e),
            };
            if let Some(csv_path) = &args.emit_csv {
                let mut csv = String::new();
                for point in set.points() {
                    let row: Vec<String> = point.iter().map(f64::to_string).collect();
                    csv.push_str(&row.join(","));
                    csv.push('\n');
                }
                std::fs::write(csv_path, csv)?;
            }
            let check = full_diversity_check(&set);
            println!(
                "{}",
                json!({
                    "lattice": args.lattice,
                    "e": args.e,
                    "full_diversity": check.full_diversity,
                    "min_psi": check.min_psi,
                })
            );
            Ok(if check.full_diversity {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Sim(SimCommand::Run {
            design,
            e,
            nr,
            snr,
            trials,
            seed,
            out,
        }) => {
            let (d, _) = load_design(&design)?;
            let (set, scale) = signal_set_for(&d, e)?;
            let cfg = SimConfig {
                design: d,
                signal_set: set,
                nr,
                snr_db: parse_snr_sweep(&snr)?,
                trials_per_snr: trials,
                seed,
            };
            let result = simulate(&cfg)?;
            let mut csv = String::from("snr_db,trials,group_ser,codeword_er\n");
            for p in &result.points {
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    p.snr_db, p.trials, p.group_ser, p.codeword_er
                ));
            }
            std::fs::write(&out, csv)?;
            println!(
                "{}",
                json!({"e": scale, "seed": seed, "points": result.points, "csv": out})
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Export { name, out } => {
            let design = match name.as_str() {
                "example1" => example1_design(),
                "example2" => example2_design(),
                other => return Err(CliError(format!("unknown fixture '{other}'"))),
            };
            save_design(&out, &design, Some(name.clone()))?;
            println!(
                "{}",
                json!({"fixture": name, "rate": rate(&design).to_string(), "path": out})
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(CliError(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
