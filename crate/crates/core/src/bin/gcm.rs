use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use gcm::channels::{apply_channel, apply_symplectic};
use gcm::gaussian::{contiguous_partition, make_pure, make_random_physical, make_ssts, PureFactors, SstsParams};
use gcm::io::{self, format_partition_text, parse_partition_text, to_json};
use gcm::measure::{measure, ssts_diff_sweep};
use gcm::verify::{run_all, run_named, VerificationOutcome, SUITES};
use gcm::{Error, PartitionedCovariance};

const EXIT_USAGE: u8 = 2;
const EXIT_INVALID: u8 = 3;
const EXIT_VERIFY: u8 = 4;

#[derive(Parser)]
#[command(name = "gcm", version, about = "Multipartite Gaussian correlation measure toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct StateIn {
    /// State file (JSON).
    #[arg(long)]
    state: PathBuf,
    /// Partition override, e.g. "0,1|2|3".
    #[arg(long)]
    partition: Option<String>,
}

#[derive(Args)]
struct Out {
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the measure report of a state.
    Compute {
        #[command(flatten)]
        input: StateIn,
    },
    /// Physicality check: Γ + iΔ ≥ 0 and symplectic eigenvalues.
    Check {
        #[command(flatten)]
        input: StateIn,
    },
    /// Build a state file.
    Make {
        #[command(subcommand)]
        kind: MakeKind,
    },
    /// Apply a Gaussian channel to one party (or to every mode).
    ApplyChannel {
        #[command(flatten)]
        input: StateIn,
        #[arg(long)]
        channel: PathBuf,
        /// Target party; whole state when omitted.
        #[arg(long)]
        party: Option<usize>,
        /// Print measure before and after to stderr.
        #[arg(long)]
        report: bool,
        #[command(flatten)]
        out: Out,
    },
    /// Apply a symplectic transform to one party (or to every mode).
    ApplySymplectic {
        #[command(flatten)]
        input: StateIn,
        #[arg(long)]
        symplectic: PathBuf,
        #[arg(long)]
        party: Option<usize>,
        #[command(flatten)]
        out: Out,
    },
    /// Keep only the listed parties, e.g. "0,2".
    Reduce {
        #[command(flatten)]
        input: StateIn,
        #[arg(long)]
        parties: String,
        #[command(flatten)]
        out: Out,
    },
    /// Merge parties into coarser groups, e.g. "0,1|2".
    Merge {
        #[command(flatten)]
        input: StateIn,
        #[arg(long)]
        grouping: String,
        #[command(flatten)]
        out: Out,
    },
    /// Reorder parties: new party i is old party perm[i].
    Permute {
        #[command(flatten)]
        input: StateIn,
        #[arg(long)]
        perm: String,
        #[command(flatten)]
        out: Out,
    },
    /// Standard-form parameters (a, b, c, d) of a bipartite two-mode state.
    StandardForm {
        #[command(flatten)]
        input: StateIn,
    },
    /// Sweep M − N over n̄ ∈ [0, nbar_max], μ ∈ [0, 1] for squeezed thermal states.
    SweepSsts {
        #[arg(long, default_value_t = 50.0)]
        nbar_max: f64,
        /// Grid points per axis (inclusive of both ends).
        #[arg(long, default_value_t = 500)]
        steps: usize,
        /// CSV output; summary only when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite, or "all".
    Verify {
        suite: String,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum MakeKind {
    /// Symmetric squeezed thermal state.
    Ssts {
        #[arg(long)]
        nbar: f64,
        #[arg(long)]
        mu: f64,
        #[command(flatten)]
        out: Out,
    },
    /// Pure bipartite state from local normal-form factors.
    Pure {
        /// Comma-separated factors γ ≥ 1.
        #[arg(long)]
        gammas: String,
        /// Vacuum modes appended to the second party.
        #[arg(long, default_value_t = 0)]
        extra: usize,
        #[command(flatten)]
        out: Out,
    },
    /// Random physical state.
    Random {
        #[arg(long)]
        modes: usize,
        /// Party sizes, e.g. "1,2"; one party per mode when omitted.
        #[arg(long)]
        partition: Option<String>,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 0.3)]
        mix: f64,
        #[command(flatten)]
        out: Out,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotPositiveDefinite { .. }
            | Error::NonPhysical(_)
            | Error::InvalidChannel(_)
            | Error::NotSymplectic(_)
            | Error::NonConvergence
            | Error::DegenerateDenominator(_)
            | Error::ConstructionFailed(_) => EXIT_INVALID,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

type CmdResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(input: &StateIn) -> Result<PartitionedCovariance, Failure> {
    let state = io::parse_state(&read(&input.state)?)?;
    match &input.partition {
        Some(text) => {
            let partition = parse_partition_text(text)?;
            eprintln!(
                "warning: --partition {text:?} overrides file partition {:?}",
                format_partition_text(state.partition())
            );
            Ok(state.with_partition(partition)?)
        }
        None => Ok(state),
    }
}

/// Loads and insists on Γ + iΔ ≥ 0.
fn load_physical(input: &StateIn) -> Result<PartitionedCovariance, Failure> {
    let state = load(input)?;
    let report = state.is_physical();
    if !report.physical {
        return Err(Failure {
            code: EXIT_INVALID,
            message: format!("state violates Γ + iΔ ≥ 0 (min eigenvalue {:e})", report.min_eigenvalue),
        });
    }
    Ok(state)
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, Failure> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<T>()
                .map_err(|_| usage(format!("bad {what} entry {t:?}")))
        })
        .collect()
}

fn write_state_to(state: &PartitionedCovariance, out: &Out) -> CmdResult {
    emit(&out.out, &io::write_state(state)?)?;
    Ok(0)
}

#[derive(Serialize)]
struct CheckReport {
    physical: bool,
    min_eigenvalue: f64,
    symplectic_eigenvalues: Option<Vec<f64>>,
}

#[derive(Serialize)]
struct StandardFormReport {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

#[derive(Serialize)]
struct SuiteReport<'a> {
    passed: bool,
    outcomes: &'a [VerificationOutcome],
}

fn run(command: Command) -> CmdResult {
    match command {
        Command::Compute { input } => {
            let state = load_physical(&input)?;
            emit(&None, &to_json(&measure(&state)?)?)?;
            Ok(0)
        }
        Command::Check { input } => {
            let r = load(&input)?.is_physical();
            let report = CheckReport {
                physical: r.physical,
                min_eigenvalue: r.min_eigenvalue,
                symplectic_eigenvalues: r.symplectic_eigenvalues,
            };
            emit(&None, &to_json(&report)?)?;
            Ok(0)
        }
        Command::Make { kind } => make(kind),
        Command::ApplyChannel {
            input,
            channel,
            party,
            report,
            out,
        } => {
            let state = load_physical(&input)?;
            let channel = io::parse_channel(&read(&channel)?)?;
            let after = apply_channel(&state, &channel, party)?;
            if report {
                let before_m = measure(&state)?.value;
                let after_m = measure(&after)?.value;
                eprintln!("measure before {} after {}", io::fmt17(before_m), io::fmt17(after_m));
            }
            write_state_to(&after, &out)
        }
        Command::ApplySymplectic {
            input,
            symplectic,
            party,
            out,
        } => {
            let state = load(&input)?;
            let t = io::parse_symplectic(&read(&symplectic)?)?;
            write_state_to(&apply_symplectic(&state, &t, party)?, &out)
        }
        Command::Reduce { input, parties, out } => {
            let parties: Vec<usize> = parse_list(&parties, "party")?;
            write_state_to(&load(&input)?.reduce(&parties)?, &out)
        }
        Command::Merge { input, grouping, out } => {
            let grouping = parse_partition_text(&grouping).map_err(|e| usage(e.to_string()))?;
            write_state_to(&load(&input)?.merge_parties(&grouping)?, &out)
        }
        Command::Permute { input, perm, out } => {
            let perm: Vec<usize> = parse_list(&perm, "permutation")?;
            write_state_to(&load(&input)?.permute_parties(&perm)?, &out)
        }
        Command::StandardForm { input } => {
            let p = load_physical(&input)?.standard_form()?;
            emit(
                &None,
                &to_json(&StandardFormReport {
                    a: p.a,
                    b: p.b,
                    c: p.c,
                    d: p.d,
                })?,
            )?;
            Ok(0)
        }
        Command::SweepSsts { nbar_max, steps, out } => {
            if steps < 2 {
                return Err(usage("--steps must be at least 2"));
            }
            let sweep = ssts_diff_sweep(nbar_max, steps, steps)?;
            if let Some(path) = &out {
                fs::write(path, sweep.to_csv()).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            }
            let best = sweep.argmax_cell();
            println!(
                "max diff {} at nbar {} mu {}",
                io::fmt17(sweep.max_diff),
                io::fmt17(best.nbar),
                io::fmt17(best.mu)
            );
            Ok(0)
        }
        Command::Verify { suite, trials, seed } => {
            let outcomes = if suite == "all" {
                run_all(trials, seed)
            } else {
                let outcome = run_named(&suite, trials, seed).ok_or_else(|| {
                    usage(format!(
                        "unknown suite {suite:?}; expected one of {} or all",
                        SUITES.join(", ")
                    ))
                })?;
                vec![outcome]
            };
            let passed = outcomes.iter().all(VerificationOutcome::passed);
            emit(
                &None,
                &to_json(&SuiteReport {
                    passed,
                    outcomes: &outcomes,
                })?,
            )?;
            Ok(if passed { 0 } else { EXIT_VERIFY })
        }
    }
}

fn make(kind: MakeKind) -> CmdResult {
    match kind {
        MakeKind::Ssts { nbar, mu, out } => write_state_to(&make_ssts(&SstsParams::new(nbar, mu)?), &out),
        MakeKind::Pure { gammas, extra, out } => {
            let gammas: Vec<f64> = parse_list(&gammas, "gamma")?;
            write_state_to(&make_pure(&PureFactors::new(gammas, extra)?)?, &out)
        }
        MakeKind::Random {
            modes,
            partition,
            seed,
            mix,
            out,
        } => {
            let sizes: Vec<usize> = match partition {
                Some(text) => parse_list(&text, "party size")?,
                None => vec![1; modes],
            };
            if sizes.iter().sum::<usize>() != modes || sizes.contains(&0) {
                return Err(usage(format!(
                    "party sizes {sizes:?} must be positive and sum to {modes}"
                )));
            }
            if !(mix.is_finite() && mix >= 0.0) {
                return Err(usage("--mix must be a nonnegative number"));
            }
            let state = make_random_physical(modes, contiguous_partition(&sizes), seed, mix)
                .map_err(|e| usage(e.to_string()))?;
            write_state_to(&state, &out)
        }
    }
}
