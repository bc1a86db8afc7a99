//! `cdiv`: command-line front end.
//!
//! Exit status is 0 on success, 1 for usage errors and 2 for data or
//! integrity errors.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use cdiv_core::analytic::analytic_sweep;
use cdiv_core::constellation::{random_key, ConstellationScheme};
use cdiv_core::harness::{
    emit_figure_data, parse_key_spec, read_results, result_metadata, run_experiment_with_threads,
    write_results_with_metadata, ExperimentConfig, FigureId,
};
use cdiv_core::secrecy::{
    keyspace_report, parse_prior, permanent, uniform_prior, unicity, verify_perfect_secrecy,
    BinaryMatrix,
};
use cdiv_core::{Error, Result};

#[derive(Parser)]
#[command(name = "cdiv", version, about = "Constellation-diversity physical-layer security toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect constellations and generate mapping keys.
    #[command(subcommand)]
    Scheme(SchemeCmd),
    /// Closed-form eavesdropper success probability.
    #[command(subcommand)]
    Analytic(AnalyticCmd),
    /// Keyspace, unicity and perfect-secrecy analytics.
    #[command(subcommand)]
    Secrecy(SecrecyCmd),
    /// Exact permanent of a 0/1 matrix read from a text file.
    Permanent {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Monte Carlo BER experiments.
    #[command(subcommand)]
    Sim(SimCmd),
}

#[derive(Subcommand)]
enum SchemeCmd {
    /// Print a scheme (as TOML) and its bit-to-point table.
    Show {
        #[command(flatten)]
        source: SchemeSource,
        /// `identity`, `random:<seed>` or a comma-separated permutation.
        #[arg(long)]
        key: Option<String>,
        /// Also save the scheme file here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a uniformly random mapping key.
    MakeKey {
        #[arg(long)]
        order: usize,
        #[arg(long)]
        seed: u64,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct SchemeSource {
    /// bpsk, qpsk, qam16_rect or qam16_circ.
    #[arg(long)]
    name: Option<String>,
    /// Scheme file in TOML.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Subcommand)]
enum AnalyticCmd {
    /// CSV of snr_db,p_correct,p_error.
    Sweep {
        /// START:STOP:STEP in dB.
        #[arg(long, default_value = "0:25:0.5")]
        snr_db: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SecrecyCmd {
    /// Keyspace size, key entropy, Shannon bound and unicity distance (JSON).
    Report {
        #[arg(long)]
        order: usize,
        /// Source redundancy in bits per symbol.
        #[arg(long, default_value_t = 0.0)]
        redundancy: f64,
    },
    /// Exhaustive perfect-secrecy check over all keys (JSON).
    Verify {
        #[arg(long)]
        order: usize,
        /// Comma-separated rationals, e.g. 1/2,1/4,1/8,1/8. Uniform if omitted.
        #[arg(long)]
        prior: Option<String>,
    },
}

#[derive(Subcommand)]
enum SimCmd {
    /// Run an experiment config and write the BER records as CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; results do not depend on it.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Emit plot data for fig5, fig7..fig12 or fig13.
    Figure {
        #[arg(long)]
        id: String,
        /// Result files; fig13 pools all of them, fig5 needs none.
        #[arg(long = "in", num_args = 1..)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 1 } else { 2 })
        }
    }
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Scheme(SchemeCmd::Show { source, key, out }) => {
            let mut scheme = match (source.name, source.file) {
                (Some(name), _) => ConstellationScheme::standard_by_name(&name)?,
                (None, Some(file)) => ConstellationScheme::load(file)?,
                (None, None) => unreachable!("clap enforces one source"),
            };
            if let Some(k) = key {
                let key = parse_key_spec(&k, scheme.order())
                    .map_err(|e| Error::InvalidArgument(format!("--key: {e}")))?;
                scheme = scheme.with_key(key)?;
            }
            let mut text = scheme.to_toml();
            text.push_str("\n# bits       re          im\n");
            let m = scheme.bits_per_symbol();
            for (b, p) in scheme.bit_map().iter().enumerate() {
                text.push_str(&format!("# {b:0m$b}  {:+.6}  {:+.6}\n", p.re, p.im));
            }
            emit(&text, None)?;
            if let Some(out) = out {
                scheme.save(out)?;
            }
            Ok(())
        }
        Command::Scheme(SchemeCmd::MakeKey { order, seed }) => {
            emit(&format!("{}\n", random_key(order, seed)?), None)
        }
        Command::Analytic(AnalyticCmd::Sweep { snr_db, out }) => {
            let (a, b, step) = parse_range(&snr_db)?;
            let mut text = String::from("snr_db,p_correct,p_error\n");
            for r in analytic_sweep(a, b, step)? {
                text.push_str(&format!("{},{:e},{}\n", r.snr_db, r.p_correct, r.p_error));
            }
            emit(&text, out.as_deref())
        }
        Command::Secrecy(SecrecyCmd::Report { order, redundancy }) => {
            let r = keyspace_report(order)?;
            let u = unicity(r.key_entropy_bits, redundancy)?;
            let v = json!({
                "order": r.order,
                "keyspace_size": r.keyspace_size.to_string(),
                "key_entropy_bits": r.key_entropy_bits,
                "shannon_bound_max_symbols": r.shannon_bound_max_symbols,
                "redundancy_bits_per_symbol": redundancy,
                "unicity_distance_symbols": u.distance.to_string(),
            });
            emit_json(&v)
        }
        Command::Secrecy(SecrecyCmd::Verify { order, prior }) => {
            let prior = match prior {
                Some(p) => parse_prior(&p)?,
                None => uniform_prior(order),
            };
            let rep = verify_perfect_secrecy(order, &prior)?;
            let v = json!({
                "order": rep.order,
                "keys_enumerated": rep.keys_enumerated,
                "prior": rep.prior.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "conditional": rep.conditional.iter().map(|row| {
                    row.iter().map(|c| c.as_ref().map(ToString::to_string)).collect::<Vec<_>>()
                }).collect::<Vec<_>>(),
                "perfect_secrecy": rep.perfect,
            });
            emit_json(&v)?;
            if rep.perfect {
                Ok(())
            } else {
                Err(Error::Consistency("conditional distribution differs from the prior".into()))
            }
        }
        Command::Permanent { matrix } => {
            let text = std::fs::read_to_string(&matrix).map_err(|e| io_err(&matrix, e))?;
            let m: BinaryMatrix = text.parse().map_err(|e: Error| Error::InvalidInput {
                path: matrix.clone(),
                msg: e.to_string(),
            })?;
            emit(&format!("{}\n", permanent(&m)?), None)
        }
        Command::Sim(SimCmd::Run { config, out, threads }) => {
            let cfg = ExperimentConfig::load(&config)?;
            let exp = cfg.resolve(config.parent())?;
            let threads = threads.unwrap_or_else(|| {
                std::thread::available_parallelism().map_or(1, |n| n.get())
            });
            let records = run_experiment_with_threads(&exp, threads)?;
            write_results_with_metadata(&records, &result_metadata(&exp), &out)
        }
        Command::Sim(SimCmd::Figure { id, inputs, out }) => {
            let fig: FigureId = id.parse()?;
            let records = match fig {
                FigureId::Fig5 => Vec::new(),
                FigureId::BerVsSnr(_) if inputs.len() != 1 => {
                    return Err(Error::InvalidArgument(format!("{fig} takes exactly one --in file")));
                }
                _ if inputs.is_empty() => {
                    return Err(Error::InvalidArgument(format!("{fig} needs at least one --in file")));
                }
                _ => {
                    let mut all = Vec::new();
                    for p in &inputs {
                        all.extend(read_results(p)?);
                    }
                    all
                }
            };
            emit(&emit_figure_data(&records, fig)?.to_csv(), out.as_deref())
        }
    }
}

fn parse_range(text: &str) -> Result<(f64, f64, f64)> {
    let bad = || Error::InvalidArgument(format!("expected START:STOP:STEP, got `{text}`"));
    let parts: Vec<f64> = text
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    match parts[..] {
        [a, b, s] => Ok((a, b, s)),
        _ => Err(bad()),
    }
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io { path: path.to_path_buf(), source }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| io_err(p, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| io_err(Path::new("<stdout>"), e))
        }
    }
}

fn emit_json(v: &serde_json::Value) -> Result<()> {
    emit(&format!("{}\n", serde_json::to_string_pretty(v).expect("json value serializes")), None)
}
