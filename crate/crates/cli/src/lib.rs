//! Command-line front end for `tropimeas`.
//!
//! Every subcommand reads JSON files (see [`formats`]) and prints one JSON
//! object on stdout. Exit codes: 0 on success, 1 when a validation or
//! property check fails, 2 on bad input.

pub mod formats;
pub mod suite;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use tropimeas::bridge::gamma_grid;
use tropimeas::{
    aggregate_d, combine, dap_demo, delta_to_gamma, gamma_to_delta, hat_d, homotopy_h, oracle_sup, tilde_d, DeltaPoint,
    GammaPoint, Normalization, RMax, WitnessDirection,
};

use formats::{InputError, MeasureFile, VectorFile};
use suite::SuiteConfig;

pub const SEED_ENV: &str = "TROPIMEAS_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_BAD_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "tropimeas", version, about = "Idempotent probability measures on finite metric spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ModeArgs {
    /// Reject measures whose maximal weight is not 0 instead of shifting them.
    #[arg(long, global = true)]
    pub strict: bool,
}

impl ModeArgs {
    fn mode(&self) -> Normalization {
        if self.strict {
            Normalization::Strict
        } else {
            Normalization::Normalize
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that a distance matrix is a metric.
    Validate { space: PathBuf },
    /// Distance between two measures.
    Dist {
        #[arg(long, required_unless_present = "aggregate")]
        n: Option<u32>,
        /// Report the aggregate metric instead of a single level.
        #[arg(long)]
        aggregate: bool,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Also write `n, hat_d, tilde_d` for levels 1..=n (or 1..=16) as CSV.
        #[arg(long)]
        emit_csv: Option<PathBuf>,
        m1: PathBuf,
        m2: PathBuf,
        #[command(flatten)]
        mode: ModeArgs,
    },
    /// Maslov integral of a function against a measure.
    Integrate {
        measure: PathBuf,
        function: PathBuf,
        #[command(flatten)]
        mode: ModeArgs,
    },
    /// Image of a measure under a point map.
    Pushforward {
        measure: PathBuf,
        map: PathBuf,
        #[command(flatten)]
        mode: ModeArgs,
    },
    /// Flatten a measure on measures.
    Flatten {
        meta: PathBuf,
        #[command(flatten)]
        mode: ModeArgs,
    },
    /// Max-plus convex combination of measures.
    Combine {
        spec: PathBuf,
        #[command(flatten)]
        mode: ModeArgs,
    },
    /// Contraction homotopy `μ ⊕ λ⊙μ₀`.
    Homotopy {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_rmax)]
        lambda: RMax,
        measure: PathBuf,
        base: PathBuf,
        #[command(flatten)]
        mode: ModeArgs,
    },
    /// Map between the tropical simplex and the probability simplex.
    Bridge {
        #[arg(long, conflicts_with = "to_tropical", required_unless_present = "to_tropical")]
        to_simplex: bool,
        #[arg(long)]
        to_tropical: bool,
        /// Also write the image of a grid of the same dimension as CSV.
        #[arg(long)]
        emit_csv: Option<PathBuf>,
        vector: PathBuf,
    },
    /// Disjoint-approximation demonstration on random measures.
    DapDemo {
        /// Comma-separated point labels.
        #[arg(long, value_delimiter = ',', required = true)]
        net: Vec<String>,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        space: PathBuf,
    },
    /// Compare the closed-form distance with the brute-force oracle.
    OracleCheck {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        step: f64,
        m1: PathBuf,
        m2: PathBuf,
        #[command(flatten)]
        mode: ModeArgs,
    },
    /// Run the seeded property suite and acceptance criteria.
    Suite {
        /// Defaults to $TROPIMEAS_SEED, then the config file's seed, then 7.
        #[arg(long)]
        seed: Option<u64>,
        /// Suite configuration JSON (counts and tolerances).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Also write the report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_rmax(s: &str) -> Result<RMax, String> {
    if s == "-inf" {
        return Ok(RMax::Bottom);
    }
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    RMax::from_f64(x).ok_or_else(|| format!("{s} is not a max-plus scalar"))
}

#[derive(Debug, thiserror::Error)]
enum Failure {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("{0}")]
    Usage(String),
    /// The command ran but a check it reports on failed.
    #[error("{0}")]
    Check(String),
}

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn io_error(path: &Path, source: std::io::Error) -> Failure {
    Failure::Input(InputError::Io { path: path.to_owned(), source })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub direction: WitnessDirection,
    pub atom: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistOutput {
    pub n: u32,
    pub value: f64,
    pub witness: Witness,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateOutput {
    pub aggregate: f64,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidateOutput {
    pub valid: bool,
    pub points: usize,
    pub diameter: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrateOutput {
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleOutput {
    pub n: u32,
    pub step: f64,
    pub hat_d: f64,
    pub oracle: f64,
    /// `oracle ≤ hat_d ≤ oracle + 2·step`.
    pub sandwiched: bool,
}

fn emit<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(usage)?;
    writeln!(out, "{text}").map_err(|e| usage(format!("stdout: {e}")))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| io_error(path, e))
}

/// Parses `argv` (program name first) and runs the command. Returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_BAD_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(()) => EXIT_OK,
        Err(Failure::Check(msg)) => {
            let _ = writeln!(err, "check failed: {msg}");
            EXIT_FAILED
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_BAD_INPUT
        }
    }
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Validate { space } => {
            let s = formats::load_space(&space)?;
            emit(out, &ValidateOutput { valid: true, points: s.len(), diameter: s.diameter() })
        }
        Command::Dist { n, aggregate, tol, emit_csv, m1, m2, mode } => {
            let mu = formats::load_measure(&m1, mode.mode())?;
            let nu = formats::load_measure(&m2, mode.mode())?;
            if let Some(path) = &emit_csv {
                let mut csv = String::from("n,hat_d,tilde_d\n");
                for k in 1..=n.unwrap_or(16) {
                    let hat = hat_d(k, &mu, &nu).map_err(usage)?.value;
                    csv.push_str(&format!("{k},{hat},{}\n", tilde_d(k, &mu, &nu).map_err(usage)?));
                }
                write_file(path, &csv)?;
            }
            if aggregate {
                let value = aggregate_d(&mu, &nu, tol).map_err(usage)?;
                return emit(out, &AggregateOutput { aggregate: value, tol });
            }
            let n = n.expect("clap requires --n without --aggregate");
            let r = hat_d(n, &mu, &nu).map_err(usage)?;
            emit(out, &DistOutput { n, value: r.value, witness: Witness { direction: r.direction, atom: r.atom } })
        }
        Command::Integrate { measure, function, mode } => {
            let mu = formats::load_measure(&measure, mode.mode())?;
            let phi = formats::load_function(&function, mu.space())?;
            emit(out, &IntegrateOutput { value: mu.integrate(&phi).map_err(usage)? })
        }
        Command::Pushforward { measure, map, mode } => {
            let mu = formats::load_measure(&measure, mode.mode())?;
            let f = formats::load_map(&map, mu.space())?;
            emit(out, &MeasureFile::from_measure(&mu.pushforward(&f).map_err(usage)?, true))
        }
        Command::Flatten { meta, mode } => {
            let big_m = formats::load_meta(&meta, mode.mode())?;
            emit(out, &MeasureFile::from_measure(&big_m.flatten(), true))
        }
        Command::Combine { spec, mode } => {
            let (alphas, measures) = formats::load_combine(&spec, mode.mode())?;
            let pairs: Vec<_> = alphas.into_iter().zip(&measures).collect();
            emit(out, &MeasureFile::from_measure(&combine(&pairs).map_err(usage)?, true))
        }
        Command::Homotopy { lambda, measure, base, mode } => {
            let mu = formats::load_measure(&measure, mode.mode())?;
            let mu0 = formats::load_measure(&base, mode.mode())?;
            emit(out, &MeasureFile::from_measure(&homotopy_h(&mu, &mu0, lambda).map_err(usage)?, true))
        }
        Command::Bridge { to_simplex, emit_csv, vector, .. } => bridge(to_simplex, emit_csv.as_deref(), &vector, out),
        Command::DapDemo { net, lambda, samples, n, seed, space } => {
            let s = formats::load_space(&space)?;
            let net = net
                .iter()
                .map(|label| s.index_of(label).map_err(|e| usage(format!("--net: {e}"))))
                .collect::<Result<Vec<_>, _>>()?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let report = dap_demo(&s, &net, lambda, samples, n, &mut rng).map_err(usage)?;
            emit(out, &report)?;
            if report.disjoint && report.within_bounds {
                Ok(())
            } else {
                Err(Failure::Check("disjointness or displacement bound not certified".into()))
            }
        }
        Command::OracleCheck { n, step, m1, m2, mode } => {
            let mu = formats::load_measure(&m1, mode.mode())?;
            let nu = formats::load_measure(&m2, mode.mode())?;
            let exact = hat_d(n, &mu, &nu).map_err(usage)?.value;
            let oracle = oracle_sup(n, &mu, &nu, step).map_err(usage)?;
            let sandwiched = oracle <= exact + 1e-12 && exact <= oracle + 2.0 * step;
            emit(out, &OracleOutput { n, step, hat_d: exact, oracle, sandwiched })?;
            if sandwiched {
                Ok(())
            } else {
                Err(Failure::Check(format!("hat_d {exact} outside [{oracle}, {oracle} + 2*{step}]")))
            }
        }
        Command::Suite { seed, config, out: path } => {
            let mut cfg: SuiteConfig = match &config {
                Some(p) => formats::read_json(p)?,
                None => SuiteConfig::default(),
            };
            if let Some(s) = seed.map(Ok).or_else(seed_from_env) {
                cfg.seed = s?;
            }
            let start = Instant::now();
            let report = suite::run_suite(&cfg);
            let _ = writeln!(err, "suite finished in {:.1}s", start.elapsed().as_secs_f64());
            if let Some(p) = &path {
                write_file(p, &(serde_json::to_string_pretty(&report).map_err(usage)? + "\n"))?;
            }
            emit(out, &report)?;
            if report.passed {
                Ok(())
            } else {
                let failed: Vec<_> =
                    report.criteria.iter().chain(&report.invariants).filter(|c| !c.passed).map(|c| c.id.as_str()).collect();
                Err(Failure::Check(failed.join(", ")))
            }
        }
    }
}

fn seed_from_env() -> Option<Result<u64, Failure>> {
    let v = std::env::var(SEED_ENV).ok()?;
    Some(v.trim().parse().map_err(|e| usage(format!("{SEED_ENV}={v:?}: {e}"))))
}

fn bridge(to_simplex: bool, emit_csv: Option<&Path>, vector: &Path, out: &mut dyn Write) -> Result<(), Failure> {
    let file: VectorFile = formats::read_json(vector)?;
    let invalid = |context: &str, e: &dyn ToString| {
        Failure::Input(InputError::Invalid { path: vector.to_owned(), context: context.into(), message: e.to_string() })
    };
    let dim = match (&file, to_simplex) {
        (VectorFile::Tropical { z }, true) => {
            let g = GammaPoint::new(z.clone()).map_err(|e| invalid("z", &e))?;
            emit(out, &VectorFile::Simplex { p: gamma_to_delta(&g).p })?;
            z.len()
        }
        (VectorFile::Simplex { p }, false) => {
            let d = DeltaPoint::new(p.clone()).map_err(|e| invalid("p", &e))?;
            emit(out, &VectorFile::Tropical { z: delta_to_gamma(&d).z })?;
            p.len()
        }
        (VectorFile::Tropical { .. }, false) => return Err(invalid("z", &"--to-tropical expects a {\"p\": …} vector")),
        (VectorFile::Simplex { .. }, true) => return Err(invalid("p", &"--to-simplex expects a {\"z\": …} vector")),
    };
    if let Some(path) = emit_csv {
        let header: Vec<String> = (0..dim).map(|i| format!("z{i}")).chain((0..dim).map(|i| format!("p{i}"))).collect();
        let mut csv = header.join(",") + "\n";
        for g in gamma_grid(dim, 21) {
            let p = gamma_to_delta(&g);
            let row: Vec<String> = g.z.iter().chain(&p.p).map(f64::to_string).collect();
            csv.push_str(&(row.join(",") + "\n"));
        }
        write_file(path, &csv)?;
    }
    Ok(())
}
