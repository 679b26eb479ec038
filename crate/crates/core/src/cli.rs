//! The `hr` command line: every operation as a subcommand with JSON output.
//!
//! Each successful run prints one JSON object with sorted keys: the
//! command's payload, flattened, plus `command`, `inputs_digest` (SHA-256
//! of the canonicalized arguments and input files), `certificate` and
//! `seed`. Exit codes: 0 success, 1 usage or input error, 2 refuted.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::clifford::{build_epsilon_family, verify_epsilon_family, Epsilon};
use crate::error::{Error, Result};
use crate::exactmat::RationalMatrix;
use crate::gmanifold::{
    assemble_clifford_structure, catalog_action, estimate_rho_g, estimate_rho_g_complex,
    estimate_rho_minus, estimate_rho_plus, realify, sample_pointwise_independence, ComplexAction,
    LinearAction,
};
use crate::hurwitz::{decompose, table_value, ClassicalPairKind};
use crate::json::matrices_from_value;
use crate::liepairs::{
    build_rho1_witness, build_rho2_witness, check_witness, make_pair, CartanKind, WitnessClaim,
    WitnessFamily,
};
use crate::pencil::{check_span, family_dim, PencilStatus};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_REFUTED: i32 = 2;

const DEFAULT_BUDGET: usize = 2000;

#[derive(Parser, Debug)]
#[command(
    name = "hr",
    version,
    about = "Hurwitz-Radon numbers, witnesses and pencil checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Seed for every randomized step
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Sampling budget
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    G,
    Minus,
    Plus,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Claim {
    Rho1,
    Rho2,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// ρ(N) with the decomposition N = 2^(4a+b)(2c+1)
    Rho { n: u64 },
    /// Tabulated (rho1, rho2) for a classical pair
    Table {
        /// Name such as so(N,N), gl(N,C), sl(2N+1,R) or su(p,q;H)
        pair: String,
        sizes: Vec<u64>,
    },
    /// Exact ε-Clifford family of n matrices
    CliffordFamily {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        epsilon: Epsilon,
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Witness family in the symmetric part of a pair
    Witness {
        #[arg(long)]
        pair: String,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Claim::Rho1)]
        claim: Claim,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Re-verify a witness file exactly
    CheckWitness { file: PathBuf },
    /// Decide whether every nonzero combination of the matrices is invertible
    Pencil { file: PathBuf },
    /// Ranks of the fundamental fields at sample points
    Fields {
        #[arg(long)]
        action: PathBuf,
        #[arg(long, default_value_t = 200)]
        points: usize,
    },
    /// Estimate ρ_G, ρ⁻ or ρ⁺ from generators
    RhoEstimate {
        #[arg(long, conflicts_with = "action", required_unless_present = "action")]
        pair: Option<String>,
        #[arg(long)]
        action: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Mode::G)]
        mode: Mode,
        /// Metric file for mode plus (identity by default)
        #[arg(long)]
        metric: Option<PathBuf>,
    },
    /// Trivial-bundle Clifford structure from skew generators
    CliffordStructure {
        #[arg(long, conflicts_with = "action", required_unless_present = "action")]
        pair: Option<String>,
        #[arg(long)]
        action: Option<PathBuf>,
        #[arg(long)]
        metric: Option<PathBuf>,
        /// Requested rank (largest available by default)
        #[arg(long)]
        n: Option<usize>,
    },
    /// Realify a complex action given as real and imaginary parts
    Realify {
        #[arg(long)]
        action: PathBuf,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
}

/// What a run produced: exit code and the text for each stream.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs `hr` on `argv` (including the program name).
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome {
                        code: EXIT_OK,
                        stdout: text,
                        stderr: String::new(),
                    }
                }
                _ => Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    let name = command_name(&cli.command);
    match execute(&cli) {
        Ok(result) => Outcome {
            code: result.code,
            stdout: result.render(),
            stderr: String::new(),
        },
        Err(e) => {
            let body = json!({ "command": name, "error": e.to_string() });
            Outcome {
                code: EXIT_USAGE,
                stdout: to_pretty(&body),
                stderr: format!("hr {name}: {e}\n"),
            }
        }
    }
}

/// A command's JSON payload with its envelope fields.
#[derive(Clone, Debug, PartialEq)]
pub struct CommandResult {
    pub command: String,
    pub inputs_digest: String,
    pub output: Map<String, Value>,
    pub certificate: String,
    pub seed: Option<u64>,
    pub code: i32,
}

impl CommandResult {
    pub fn to_value(&self) -> Value {
        let mut map = self.output.clone();
        map.insert("command".into(), Value::String(self.command.clone()));
        map.insert(
            "inputs_digest".into(),
            Value::String(self.inputs_digest.clone()),
        );
        map.insert(
            "certificate".into(),
            Value::String(self.certificate.clone()),
        );
        map.insert("seed".into(), self.seed.map_or(Value::Null, Value::from));
        Value::Object(map)
    }

    pub fn render(&self) -> String {
        to_pretty(&self.to_value())
    }
}

fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values always serialize");
    s.push('\n');
    s
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Rho { .. } => "rho",
        Command::Table { .. } => "table",
        Command::CliffordFamily { .. } => "clifford-family",
        Command::Witness { .. } => "witness",
        Command::CheckWitness { .. } => "check-witness",
        Command::Pencil { .. } => "pencil",
        Command::Fields { .. } => "fields",
        Command::RhoEstimate { .. } => "rho-estimate",
        Command::CliffordStructure { .. } => "clifford-structure",
        Command::Realify { .. } => "realify",
    }
}

// Collects canonical inputs for the digest.
struct Inputs(Map<String, Value>);

impl Inputs {
    fn new(command: &str) -> Self {
        let mut m = Map::new();
        m.insert("command".into(), command.into());
        Inputs(m)
    }

    fn arg(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.0.insert(
            key.into(),
            serde_json::to_value(value).expect("plain value"),
        );
        self
    }

    /// Reads a JSON file and records its parsed (so key-sorted) content.
    fn file(&mut self, key: &str, path: &Path) -> Result<Value> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let value: Value = serde_json::from_str(&text)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        self.0.insert(key.into(), value.clone());
        Ok(value)
    }

    fn digest(&self) -> String {
        let bytes = serde_json::to_vec(&Value::Object(self.0.clone())).expect("plain value");
        hex::encode(Sha256::digest(&bytes))
    }
}

fn object(v: impl Serialize) -> Map<String, Value> {
    match serde_json::to_value(v).expect("payloads serialize") {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("value".into(), other);
            m
        }
    }
}

fn emit(path: &Path, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("payloads serialize");
    std::fs::write(path, text + "\n").map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

/// Witness files: `claim` defaults to `clifford_rho1`, `pair`, `n` and
/// `dim` are optional; `n` and `dim` must match the matrices when given.
#[derive(Deserialize)]
struct WitnessFile {
    #[serde(default)]
    pair: Option<CartanKind>,
    #[serde(default)]
    claim: Option<WitnessClaim>,
    #[serde(default)]
    n: Option<usize>,
    #[serde(default)]
    dim: Option<usize>,
    matrices: Vec<RationalMatrix>,
}

fn read_witness(value: Value) -> Result<WitnessFamily> {
    let file: WitnessFile = serde_json::from_value(value).map_err(parse_err)?;
    let dim = family_dim(&file.matrices)?;
    if file.n.is_some_and(|n| n != file.matrices.len()) || file.dim.is_some_and(|d| d != dim) {
        return Err(Error::Parse(
            "`n` or `dim` disagrees with the matrices".into(),
        ));
    }
    Ok(WitnessFamily {
        pair: file.pair,
        claim: file.claim.unwrap_or(WitnessClaim::CliffordRho1),
        n: file.matrices.len(),
        dim,
        matrices: file.matrices,
    })
}

/// Real actions: `{"dim", "generators"}` or a bare array of matrices.
fn read_action(value: &Value) -> Result<LinearAction> {
    let action = LinearAction::new(matrices_from_value(value)?)?;
    if let Some(d) = value.get("dim").and_then(Value::as_u64) {
        if d as usize != action.dim {
            return Err(Error::Parse("`dim` disagrees with the generators".into()));
        }
    }
    Ok(action)
}

fn is_complex_action(value: &Value) -> bool {
    value
        .get("generators")
        .and_then(Value::as_array)
        .and_then(|g| g.first())
        .is_some_and(|g| g.get("re").is_some())
}

fn read_metric(inputs: &mut Inputs, path: &Option<PathBuf>, dim: usize) -> Result<RationalMatrix> {
    match path {
        Some(p) => serde_json::from_value(inputs.file("metric", p)?).map_err(parse_err),
        None => Ok(RationalMatrix::identity(dim)),
    }
}

fn action_for(
    inputs: &mut Inputs,
    pair: &Option<String>,
    action: &Option<PathBuf>,
) -> Result<LinearAction> {
    match (pair, action) {
        (Some(p), _) => {
            inputs.arg("pair", p);
            catalog_action(CartanKind::parse(p, &[])?)
        }
        (None, Some(path)) => read_action(&inputs.file("action", path)?),
        (None, None) => Err(Error::Parse("either --pair or --action is required".into())),
    }
}

fn execute(cli: &Cli) -> Result<CommandResult> {
    let name = command_name(&cli.command);
    let mut inputs = Inputs::new(name);
    let budget = cli.common.budget.unwrap_or(DEFAULT_BUDGET);
    let seed_value = cli.common.seed.unwrap_or(0);
    let mut seed = None;
    let mut code = EXIT_OK;
    let (output, certificate): (Map<String, Value>, String) = match &cli.command {
        Command::Rho { n } => {
            inputs.arg("n", n);
            let d = decompose(*n)?;
            let rho = crate::hurwitz::rho(*n)?;
            (
                object(json!({ "n": d.n, "a": d.a, "b": d.b, "c": d.c, "rho": rho })),
                "formula".into(),
            )
        }
        Command::Table { pair, sizes } => {
            inputs.arg("pair", pair).arg("sizes", sizes);
            let kind = ClassicalPairKind::parse(pair, sizes)?;
            let t = table_value(&kind)?;
            (
                object(json!({ "pair": kind.to_string(), "rho1": t.rho1, "rho2": t.rho2 })),
                "table".into(),
            )
        }
        Command::CliffordFamily {
            n,
            epsilon,
            verify,
            emit: out,
        } => {
            inputs
                .arg("n", n)
                .arg("epsilon", epsilon.sign())
                .arg("verify", verify);
            let fam = build_epsilon_family(*n, *epsilon);
            let mut payload = json!({
                "n": n,
                "epsilon": epsilon.sign(),
                "dim": fam.dim(),
                "matrices": fam.matrices(),
            });
            let mut certificate = "construction".to_string();
            if *verify {
                let report = verify_epsilon_family(&fam);
                if report.ok {
                    certificate = "clifford_relation".into();
                } else {
                    code = EXIT_REFUTED;
                }
                payload["verification"] = serde_json::to_value(&report).expect("report");
            }
            if let Some(path) = out {
                emit(
                    path,
                    &json!({ "epsilon": epsilon.sign(), "dim": fam.dim(), "matrices": fam.matrices() }),
                )?;
                payload["emitted"] = path.display().to_string().into();
            }
            (object(payload), certificate)
        }
        Command::Witness {
            pair,
            n,
            claim,
            emit: out,
        } => {
            inputs
                .arg("pair", pair)
                .arg("n", n)
                .arg("claim", format!("{claim:?}"));
            let cartan = make_pair(CartanKind::parse(pair, &[])?)?;
            let family = match claim {
                Claim::Rho1 => build_rho1_witness(&cartan, *n)?,
                Claim::Rho2 => build_rho2_witness(&cartan, *n)?,
            };
            seed = Some(seed_value);
            let check = check_witness(&family, budget, seed_value)?;
            if !check.ok {
                code = EXIT_REFUTED;
            }
            let certificate = certificate_for(&check);
            let mut payload = object(&family);
            payload.insert("check".into(), serde_json::to_value(&check).expect("check"));
            if let Some(path) = out {
                emit(path, &family)?;
                payload.insert("emitted".into(), path.display().to_string().into());
            }
            (payload, certificate)
        }
        Command::CheckWitness { file } => {
            let family = read_witness(inputs.file("witness", file)?)?;
            seed = Some(seed_value);
            inputs.arg("budget", budget);
            let check = check_witness(&family, budget, seed_value)?;
            if !check.ok {
                code = EXIT_REFUTED;
            }
            let certificate = if check.ok {
                certificate_for(&check)
            } else {
                "none".into()
            };
            let mut payload = object(&check);
            payload.insert("n".into(), family.n.into());
            payload.insert("dim".into(), family.dim.into());
            (payload, certificate)
        }
        Command::Pencil { file } => {
            let matrices = matrices_from_value(&inputs.file("matrices", file)?)?;
            inputs.arg("budget", budget);
            seed = Some(seed_value);
            let verdict = check_span(&matrices, budget, seed_value)?;
            if verdict.status == PencilStatus::Refuted {
                code = EXIT_REFUTED;
            }
            let certificate = verdict.method.as_str().to_string();
            (object(&verdict), certificate)
        }
        Command::Fields { action, points } => {
            let action = read_action(&inputs.file("action", action)?)?;
            inputs.arg("points", points);
            seed = Some(seed_value);
            let report = sample_pointwise_independence(&action, *points, seed_value)?;
            if !report.independent_everywhere_sampled {
                code = EXIT_REFUTED;
            }
            (object(&report), "exact_rank".into())
        }
        Command::RhoEstimate {
            pair,
            action,
            mode,
            metric,
        } => {
            inputs
                .arg("mode", format!("{mode:?}"))
                .arg("budget", budget);
            seed = Some(seed_value);
            let action_value = match action {
                Some(path) if pair.is_none() => Some(inputs.file("action", path)?),
                _ => None,
            };
            let estimate = match &action_value {
                Some(value) if is_complex_action(value) => {
                    if *mode != Mode::G {
                        return Err(Error::Unsupported(
                            "complex actions support --mode g only; realify first".into(),
                        ));
                    }
                    let c: ComplexAction =
                        serde_json::from_value(value.clone()).map_err(parse_err)?;
                    estimate_rho_g_complex(&c, budget, seed_value)?
                }
                _ => {
                    let real = match &action_value {
                        Some(value) => read_action(value)?,
                        None => action_for(&mut inputs, pair, action)?,
                    };
                    match mode {
                        Mode::G => estimate_rho_g(&real, budget, seed_value)?,
                        Mode::Minus => estimate_rho_minus(&real)?,
                        Mode::Plus => {
                            let m = read_metric(&mut inputs, metric, real.dim)?;
                            estimate_rho_plus(&real, &m)?
                        }
                    }
                }
            };
            let certificate = estimate.certificate.clone();
            (object(&estimate), certificate)
        }
        Command::CliffordStructure {
            pair,
            action,
            metric,
            n,
        } => {
            let action = action_for(&mut inputs, pair, action)?;
            let m = read_metric(&mut inputs, metric, action.dim)?;
            let rank = match n {
                Some(n) => *n,
                None => estimate_rho_plus(&action, &m)?.value.max(1),
            };
            inputs.arg("n", rank);
            let report = assemble_clifford_structure(&action, &m, rank)?;
            let certificate = if report.ok {
                "algebra_hom_readback"
            } else {
                "none"
            };
            if !report.ok {
                code = EXIT_REFUTED;
            }
            (object(&report), certificate.into())
        }
        Command::Realify { action, emit: out } => {
            let value = inputs.file("action", action)?;
            let complex: ComplexAction = serde_json::from_value(value).map_err(parse_err)?;
            let real = realify(&complex)?;
            let mut payload = object(&real);
            if let Some(path) = out {
                emit(path, &real)?;
                payload.insert("emitted".into(), path.display().to_string().into());
            }
            (payload, "block_embedding".into())
        }
    };
    if let Some(s) = seed {
        inputs.arg("seed", s);
    }
    Ok(CommandResult {
        command: name.into(),
        inputs_digest: inputs.digest(),
        output,
        certificate,
        seed,
        code,
    })
}

fn certificate_for(check: &crate::liepairs::WitnessCheck) -> String {
    match (&check.relation, &check.pencil) {
        (Some(r), _) if r.ok => "clifford_relation".into(),
        (_, Some(v)) => v.method.as_str().into(),
        _ => "none".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, Value) {
        let out = run(std::iter::once("hr").chain(args.iter().copied()));
        let value = if out.stdout.trim().is_empty() {
            Value::Null
        } else {
            serde_json::from_str(&out.stdout).unwrap()
        };
        (out.code, value)
    }

    #[test]
    fn rho_command() {
        let (code, v) = run_args(&["rho", "16"]);
        assert_eq!(code, 0);
        assert_eq!(v["n"], 16);
        assert_eq!(v["rho"], 9);
        assert_eq!(v["a"], 1);
        assert_eq!(v["certificate"], "formula");
        assert_eq!(v["inputs_digest"].as_str().unwrap().len(), 64);
    }

    #[test]
    fn table_command() {
        let (code, v) = run_args(&["table", "so(N,N)", "8"]);
        assert_eq!(code, 0);
        assert_eq!((v["rho1"].as_u64(), v["rho2"].as_u64()), (Some(8), Some(8)));
        let (_, v) = run_args(&["table", "sl(2N+1,R)", "3"]);
        assert_eq!((v["rho1"].as_u64(), v["rho2"].as_u64()), (Some(0), Some(1)));
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_args(&["frobnicate"]).0, 1);
        assert_eq!(run_args(&["rho"]).0, 1);
        let (code, v) = run_args(&["rho", "0"]);
        assert_eq!(code, 1);
        assert!(v["error"].is_string());
        assert_eq!(run_args(&["table", "xx(3)"]).0, 1);
    }

    #[test]
    fn negative_epsilon_is_accepted() {
        let (code, v) = run_args(&["clifford-family", "--n", "3", "--epsilon", "-1", "--verify"]);
        assert_eq!(code, 0);
        assert_eq!(v["dim"], 4);
        assert_eq!(v["verification"]["ok"], true);
        assert_eq!(v["certificate"], "clifford_relation");
    }

    #[test]
    fn output_is_byte_deterministic() {
        let a = run(["hr", "rho-estimate", "--pair", "sl(3,R)", "--seed", "5"]);
        let b = run(["hr", "rho-estimate", "--pair", "sl(3,R)", "--seed", "5"]);
        assert_eq!(a, b);
        let c = run(["hr", "rho-estimate", "--pair", "sl(3,R)", "--seed", "6"]);
        assert_ne!(a.stdout, c.stdout);
    }

    #[test]
    fn witness_over_table_bound_is_refused() {
        let (code, v) = run_args(&["witness", "--pair", "so(8,8)", "--n", "9"]);
        assert_eq!(code, 1);
        assert!(v["error"].as_str().unwrap().contains("exceeds"));
    }
}
