//! Command-line surface. Every subcommand prints one JSON document to
//! stdout (top-level `schema` field, keys alphabetical) and is
//! byte-deterministic for a fixed argv + seed. Exit codes: 0 = success /
//! accepted, 1 = unfavorable verdict (state flagged far, suite or check
//! failed), 2 = structured error.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use stabtest::commutant::{
    catalog_text, counterexample_copies, enumerate_orthogonal, enumerate_stochastic, gram_matrix,
    projector_expectation, projector_trace, pt_spectrum_check, stochastic_count, symmetric_dim,
};
use stabtest::spanning::{
    estimate_avg_spanning, kappa, q_nk, q_nk_f64, stabilizer_value, stabilizer_value_f64,
    total_lagrangians, with_worker_pool, write_trace_csv, DenseSource, StateSource, TableauSource,
};
use stabtest::statevec::StateVector;
use stabtest::tableau::{CliffordTableau, StabilizerState};
use stabtest::tester::{test_stabilizer, Decision};
use stabtest::verify::run_suite;
use stabtest::{Error, Result};

/// Stabilizer testing via single-copy spanning statistics, with exact
/// reference formulas and commutant verification tools.
#[derive(Parser)]
#[command(name = "stabtest", version, disable_help_subcommand = true)]
struct Cli {
    /// Worker threads for the Monte Carlo estimator (default: value of
    /// STABTEST_WORKERS, else all cores). Results do not depend on this.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single-copy stabilizer test: accept or reject a state.
    Test(TestArgs),
    /// Monte Carlo estimate of the average spanning probability.
    Estimate(EstimateArgs),
    /// Exact closed-form spanning probability for stabilizer states.
    Stabvalue(StabvalueArgs),
    /// Lagrangian-intersection distribution Q(n, k).
    Qnk(QnkArgs),
    /// Clifford-commutant structure checks.
    #[command(subcommand)]
    Commutant(CommutantCommand),
    /// Run a named verification suite.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct TestArgs {
    /// State under test: stab:zero | stab:random:<seed> | haar:<seed> |
    /// product:T^<m> | file:<path>.
    #[arg(long)]
    state: String,
    /// Qubit count (required unless the state spec fixes it).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    delta: f64,
    /// RNG seed for the measurement trials.
    #[arg(long)]
    seed: u64,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    state: String,
    #[arg(long)]
    n: Option<usize>,
    /// Difference samples per trial.
    #[arg(long = "K")]
    k: usize,
    #[arg(long)]
    trials: usize,
    #[arg(long)]
    seed: u64,
    /// Write a per-trial CSV log (trial,spanned,copies_used) to this path.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct StabvalueArgs {
    #[arg(long)]
    n: u64,
    #[arg(long = "K")]
    k: u64,
}

#[derive(Args)]
struct QnkArgs {
    #[arg(long)]
    n: u64,
    /// Restrict output to a single intersection dimension.
    #[arg(long)]
    k: Option<u64>,
}

#[derive(Subcommand)]
enum CommutantCommand {
    /// List the stochastic Lagrangian subspaces at copy count t.
    Enumerate {
        #[arg(long)]
        t: usize,
        /// Emit the plain-text catalog instead of JSON.
        #[arg(long)]
        text: bool,
    },
    /// Exact Gram matrix |T ∩ T'|^n of the R(T) family.
    Gram {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        n: u64,
    },
    /// Partial-transpose spectrum law over all O ∈ O_t and subsets.
    PtCheck {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        n: usize,
    },
    /// Projector counterexample at t = 6.
    Counterexample {
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name (see `verify --help` for the list) or "all".
    suite: String,
    #[arg(long)]
    seed: u64,
}

/// Textual state descriptor accepted by `--state`.
enum StateSpec {
    StabZero,
    StabRandom(u64),
    Haar(u64),
    ProductT(usize),
    File(PathBuf),
}

impl FromStr for StateSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse_err = || Error::Parse {
            what: "state spec",
            input: s.into(),
        };
        if s == "stab:zero" {
            Ok(Self::StabZero)
        } else if let Some(seed) = s.strip_prefix("stab:random:") {
            Ok(Self::StabRandom(seed.parse().map_err(|_| parse_err())?))
        } else if let Some(seed) = s.strip_prefix("haar:") {
            Ok(Self::Haar(seed.parse().map_err(|_| parse_err())?))
        } else if let Some(m) = s.strip_prefix("product:T^") {
            Ok(Self::ProductT(m.parse().map_err(|_| parse_err())?))
        } else if let Some(path) = s.strip_prefix("file:") {
            Ok(Self::File(PathBuf::from(path)))
        } else {
            Err(parse_err())
        }
    }
}

impl StateSpec {
    /// Build the measurement source, reconciling the spec with an
    /// explicit `--n` where both are present.
    fn into_source(self, n: Option<usize>, label: &str) -> Result<Box<dyn StateSource>> {
        let need_n = || {
            n.ok_or(Error::Parse {
                what: "--n (required for this state spec)",
                input: "missing".into(),
            })
        };
        let check_n = |actual: usize| match n {
            Some(expected) if expected != actual => Err(Error::QubitMismatch { actual, expected }),
            _ => Ok(()),
        };
        match self {
            Self::StabZero => Ok(Box::new(TableauSource::new(
                StabilizerState::zero_state(need_n()?),
                label,
            ))),
            Self::StabRandom(seed) => {
                let n = need_n()?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let state = StabilizerState::zero_state(n)
                    .apply_clifford(&CliffordTableau::random(n, &mut rng));
                Ok(Box::new(TableauSource::new(state, label)))
            }
            Self::Haar(seed) => {
                let n = need_n()?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                Ok(Box::new(DenseSource::new(
                    StateVector::haar_random(n, &mut rng)?,
                    label,
                )))
            }
            Self::ProductT(m) => {
                check_n(m)?;
                Ok(Box::new(DenseSource::new(
                    StateVector::t_state_power(m),
                    label,
                )))
            }
            Self::File(path) => {
                let state = StateVector::load_json(&path)?;
                check_n(state.n())?;
                Ok(Box::new(DenseSource::new(state, label)))
            }
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let workers = cli.workers.or_else(|| {
        std::env::var("STABTEST_WORKERS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    let code = match with_worker_pool(workers, || dispatch(cli.command)) {
        Ok(code) => code,
        Err(err) => {
            print_json(&json!({
                "schema": "stabtest/error-v1",
                "kind": error_kind(&err),
                "error": err.to_string(),
            }));
            2
        }
    };
    std::process::exit(code);
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Test(args) => cmd_test(args),
        Command::Estimate(args) => cmd_estimate(args),
        Command::Stabvalue(args) => cmd_stabvalue(args),
        Command::Qnk(args) => cmd_qnk(args),
        Command::Commutant(cmd) => cmd_commutant(cmd),
        Command::Verify(args) => cmd_verify(args),
    }
}

fn print_json(value: &Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("serialize")
    );
}

/// Serialize a report struct and prepend the schema tag.
fn tagged(schema: &str, value: impl serde::Serialize) -> Value {
    let mut v = serde_json::to_value(value).expect("serialize");
    v.as_object_mut()
        .expect("object report")
        .insert("schema".into(), schema.into());
    v
}

fn cmd_test(args: TestArgs) -> Result<i32> {
    let source = StateSpec::from_str(&args.state)?.into_source(args.n, &args.state)?;
    let verdict = test_stabilizer(source.as_ref(), args.epsilon, args.delta, args.seed)?;
    let far = verdict.decision == Decision::Far;
    print_json(&tagged("stabtest/test-v1", &verdict));
    Ok(i32::from(far))
}

fn cmd_estimate(args: EstimateArgs) -> Result<i32> {
    let source = StateSpec::from_str(&args.state)?.into_source(args.n, &args.state)?;
    let (report, records) = estimate_avg_spanning(source.as_ref(), args.k, args.trials, args.seed)?;
    if let Some(path) = args.trace {
        let file = std::fs::File::create(path)?;
        write_trace_csv(&records, std::io::BufWriter::new(file))?;
    }
    print_json(&tagged("stabtest/estimate-v1", &report));
    Ok(0)
}

fn cmd_stabvalue(args: StabvalueArgs) -> Result<i32> {
    let exact = stabilizer_value(args.n, args.k)?;
    print_json(&json!({
        "schema": "stabtest/stabvalue-v1",
        "n": args.n,
        "K": args.k,
        "value_rational": exact.to_string(),
        "value_float": stabilizer_value_f64(args.n, args.k)?,
    }));
    Ok(0)
}

fn cmd_qnk(args: QnkArgs) -> Result<i32> {
    if let Some(k) = args.k {
        if k > args.n {
            return Err(Error::ParamRange {
                name: "k",
                value: k.to_string(),
                range: format!("0..={}", args.n),
            });
        }
    }
    let ks: Vec<u64> = match args.k {
        Some(k) => vec![k],
        None => (0..=args.n).collect(),
    };
    let entries: Vec<Value> = ks
        .iter()
        .map(|&k| {
            json!({
                "k": k,
                "kappa": kappa(args.n, k).to_string(),
                "rational": q_nk(args.n, k).to_string(),
                "float": q_nk_f64(args.n, k),
            })
        })
        .collect();
    print_json(&json!({
        "schema": "stabtest/qnk-v1",
        "n": args.n,
        "total_lagrangians": total_lagrangians(args.n).to_string(),
        "entries": entries,
    }));
    Ok(0)
}

fn cmd_commutant(cmd: CommutantCommand) -> Result<i32> {
    match cmd {
        CommutantCommand::Enumerate { t, text } => {
            if text {
                print!("{}", catalog_text(t)?);
                return Ok(0);
            }
            let subs = enumerate_stochastic(t)?;
            let entries: Vec<Value> = subs
                .iter()
                .enumerate()
                .map(|(i, sub)| {
                    let kind = match sub.as_orthogonal() {
                        Some(o) if o.is_identity() => "identity",
                        Some(o) if o.is_permutation() => "permutation",
                        Some(_) => "orthogonal",
                        None => "defective",
                    };
                    json!({
                        "index": i,
                        "defect": sub.defect(),
                        "kind": kind,
                        "rows": sub.rows().iter().map(|r| format!("{r:#x}")).collect::<Vec<_>>(),
                    })
                })
                .collect();
            print_json(&json!({
                "schema": "stabtest/commutant-enumerate-v1",
                "t": t,
                "count": subs.len(),
                "count_formula": stochastic_count(t as u32),
                "entries": entries,
            }));
            Ok(0)
        }
        CommutantCommand::Gram { t, n } => {
            // A full t = 6 Gram matrix is 4590^2 entries; cap the output.
            if t > 5 {
                return Err(Error::ParamRange {
                    name: "t",
                    value: t.to_string(),
                    range: "1..=5 for gram output".into(),
                });
            }
            let subs = enumerate_stochastic(t)?;
            let rows: Vec<Vec<String>> = gram_matrix(&subs, n)
                .iter()
                .map(|row| row.iter().map(ToString::to_string).collect())
                .collect();
            print_json(&json!({
                "schema": "stabtest/commutant-gram-v1",
                "t": t,
                "n": n,
                "count": subs.len(),
                "entries": rows,
            }));
            Ok(0)
        }
        CommutantCommand::PtCheck { t, n } => {
            let orthogonals = enumerate_orthogonal(t)?;
            if n * t > stabtest::commutant::OPERATOR_GUARD {
                return Err(Error::OperatorGuard {
                    nt: n * t,
                    max: stabtest::commutant::OPERATOR_GUARD,
                });
            }
            let mut cases = 0usize;
            let mut max_deviation = 0.0f64;
            let mut failures: Vec<Value> = Vec::new();
            for (i, o) in orthogonals.iter().enumerate() {
                for subset in 0..1u32 << t {
                    let report = pt_spectrum_check(o, subset, n);
                    cases += 1;
                    max_deviation = max_deviation.max(report.max_deviation);
                    if !report.passed {
                        let mut v = tagged("stabtest/commutant-pt-v1", &report);
                        v.as_object_mut()
                            .unwrap()
                            .insert("element".into(), i.into());
                        failures.push(v);
                    }
                }
            }
            let passed = failures.is_empty();
            print_json(&json!({
                "schema": "stabtest/commutant-pt-v1",
                "t": t,
                "n": n,
                "elements": orthogonals.len(),
                "cases": cases,
                "max_deviation": max_deviation,
                "passed": passed,
                "failures": failures,
            }));
            Ok(i32::from(!passed))
        }
        CommutantCommand::Counterexample { n } => {
            let orthogonals = enumerate_orthogonal(6)?;
            let copies = counterexample_copies(n)?;
            let expectation = projector_expectation(&orthogonals, &copies)?;
            let perms: Vec<_> = orthogonals
                .iter()
                .filter(|o| o.is_permutation())
                .cloned()
                .collect();
            let symmetric = projector_expectation(&perms, &copies)?;
            let passed = expectation.abs() <= 1e-10;
            print_json(&json!({
                "schema": "stabtest/commutant-counterexample-v1",
                "t": 6,
                "n": n,
                "expectation": expectation,
                "symmetric_expectation": symmetric,
                "projector_rank": projector_trace(&orthogonals, n)?.to_string(),
                "symmetric_dim": symmetric_dim(n as u32, 6).to_string(),
                "passed": passed,
            }));
            Ok(i32::from(!passed))
        }
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<i32> {
    let report = run_suite(&args.suite, args.seed)?;
    let passed = report.passed;
    print_json(&tagged("stabtest/verify-v1", &report));
    Ok(i32::from(!passed))
}

fn error_kind(err: &Error) -> &'static str {
    match err {
        Error::EnumerationGuard { .. } => "enumeration_guard",
        Error::DenseGuard { .. } => "dense_guard",
        Error::OperatorGuard { .. } => "operator_guard",
        Error::NotIsotropic { .. } => "not_isotropic",
        Error::NotNormalized { .. } => "not_normalized",
        Error::AmplitudeCount { .. } => "amplitude_count",
        Error::QubitMismatch { .. } => "qubit_mismatch",
        Error::ParamRange { .. } => "param_range",
        Error::GapNonPositive { .. } => "gap_non_positive",
        Error::Parse { .. } => "parse",
        Error::NotOrthogonalGraph => "not_orthogonal_graph",
        Error::Io(_) => "io",
        Error::Json(_) => "json",
    }
}
