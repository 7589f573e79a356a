//! Command-line front end. Every command builds a [`Report`]; `--json`
//! prints it as JSON, otherwise as text.
//!
//! Exit codes: 0 satisfied (or no verdict), 1 violated, 2 inconclusive,
//! 3 error.

use std::collections::BTreeMap;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::conditions::{check_regularity, EvalConfig};
use crate::domains::{DomainSpace, TransformMode};
use crate::duality::{characterize, dual_membership, gallery_combinator, DualKind, Gallery, DEFAULT_ROW_SAMPLE};
use crate::error::{Error, Result};
use crate::matrix::{apply_with, build_matrix, default_cutoff, InfMatrix, MatrixSpec};
use crate::oracle::{brute_force_mapping_oracle, OracleConfig};
use crate::par::Strategy;
use crate::report::Report;
use crate::scalar::Scalar;
use crate::seq::{make_sequence, SequenceSpec};
use crate::space::SpaceId;

pub const EXIT_ERROR: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Float,
    Rational,
}

#[derive(Debug, Parser)]
#[command(name = "seqspace", version, about = "Matrix-domain sequence spaces on finite truncations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by every command.
#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Truncation N (command-specific default).
    #[arg(long = "n", global = true)]
    pub n: Option<usize>,
    /// Limit tolerance.
    #[arg(long, global = true, default_value_t = 1e-3)]
    pub tol: f64,
    /// Trailing window (default N/10).
    #[arg(long, global = true)]
    pub window: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Mode::Float)]
    pub mode: Mode,
    /// Seed for oracle sampling.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true)]
    pub json: bool,
    /// Keep full per-row traces in condition reports.
    #[arg(long, global = true)]
    pub trace: bool,
    /// Disable the data-parallel path.
    #[arg(long, global = true)]
    pub sequential: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// The A-transform `(Ax)_n` for `n <= N`.
    Transform {
        #[arg(long)]
        matrix: String,
        #[arg(long)]
        seq: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Characterize `A in (from : to)` via the condition tables.
    CheckClass {
        #[arg(long)]
        matrix: String,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        /// Wrap the matrix in a gallery combinator: `euler-h:r`, `riesz-p:<seq>`, `taylor-t:r`.
        #[arg(long)]
        combine: Option<String>,
        /// Rows checked for beta-dual membership on domain sources.
        #[arg(long, default_value_t = DEFAULT_ROW_SAMPLE)]
        row_sample: usize,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Beta or gamma dual membership of `a` for an Omega or Gamma domain.
    Dual {
        #[arg(long)]
        a: String,
        #[arg(long)]
        space: String,
        #[arg(long, default_value = "beta")]
        kind: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Toeplitz regularity: C1, C5 and row sums tending to 1.
    Regularity {
        #[arg(long)]
        matrix: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// A basis element `b^(k)` or the basis expansion of `--seq`.
    Basis {
        #[arg(long)]
        space: String,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        seq: Option<String>,
        /// Expansion terms (default N).
        #[arg(long)]
        terms: Option<usize>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Brute-force check of `A in (from : to)` by sampling.
    Oracle {
        #[arg(long)]
        matrix: String,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, default_value_t = 32)]
        samples: usize,
        #[command(flatten)]
        run: RunArgs,
    },
}

/// Rendered output and exit code of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Parse `args` (including the program name) and run.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome { stdout: text, stderr: String::new(), code: 0 }
                }
                _ => Outcome { stdout: String::new(), stderr: text, code: EXIT_ERROR },
            };
        }
    };
    let json = cli.command.run_args().json;
    match execute(&cli.command) {
        Ok(report) => {
            let stdout = if json { report.to_json() + "\n" } else { report.to_text() };
            Outcome { stdout, stderr: String::new(), code: report.exit_code() }
        }
        Err(e) => Outcome { stdout: String::new(), stderr: format!("error: {e}\n"), code: EXIT_ERROR },
    }
}

impl Command {
    fn run_args(&self) -> &RunArgs {
        match self {
            Command::Transform { run, .. }
            | Command::CheckClass { run, .. }
            | Command::Dual { run, .. }
            | Command::Regularity { run, .. }
            | Command::Basis { run, .. }
            | Command::Oracle { run, .. } => run,
        }
    }
}

impl RunArgs {
    fn strategy(&self) -> Strategy {
        if self.sequential {
            Strategy::Sequential
        } else {
            Strategy::Parallel
        }
    }

    fn eval_config(&self, default_n: usize) -> Result<EvalConfig> {
        let n = self.n.unwrap_or(default_n);
        let mut cfg = EvalConfig::with_n(n);
        cfg.tol = self.tol;
        if let Some(w) = self.window {
            cfg.window = w;
        }
        cfg.strategy = self.strategy();
        cfg.validate()?;
        Ok(cfg)
    }

    fn float_only(&self, what: &str) -> Result<()> {
        match self.mode {
            Mode::Float => Ok(()),
            Mode::Rational => Err(Error::Mode { mode: "rational".into(), what: what.into() }),
        }
    }

    fn query(&self, n: usize, extra: &[(&str, Value)]) -> BTreeMap<String, Value> {
        let mut q: BTreeMap<String, Value> = extra.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
        q.insert("n".into(), json!(n));
        q.insert("tol".into(), json!(self.tol));
        q.insert("mode".into(), json!(if self.mode == Mode::Float { "float" } else { "rational" }));
        q
    }
}

fn parse_gallery(s: &str) -> Result<Gallery> {
    let (head, arg) = s.split_once(':').ok_or_else(|| Error::Parse(format!("combinator `{s}` needs a parameter")))?;
    let r = || arg.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{head}: {e}")));
    match head.trim() {
        "euler-h" | "euler" => Ok(Gallery::EulerH { r: r()? }),
        "taylor-t" | "taylor" => Ok(Gallery::TaylorT { r: r()? }),
        "riesz-p" | "riesz" => Ok(Gallery::RieszP { t: arg.parse()? }),
        other => Err(Error::Parse(format!("unknown combinator `{other}`"))),
    }
}

fn float_values(values: &[f64]) -> Value {
    json!(values)
}

fn rational_values(values: &[BigRational]) -> Value {
    let exact: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    let approx: Vec<f64> = values.iter().map(Scalar::to_f64).collect();
    json!({ "exact": exact, "approx": approx })
}

fn execute(cmd: &Command) -> Result<Report> {
    match cmd {
        Command::Transform { matrix, seq, run } => transform(matrix, seq, run),
        Command::CheckClass { matrix, from, to, combine, row_sample, run } => {
            run.float_only("check-class")?;
            let cfg = run.eval_config(2000)?;
            let spec: MatrixSpec = matrix.parse()?;
            let mut a: InfMatrix<f64> = build_matrix(&spec)?;
            if let Some(g) = combine {
                a = gallery_combinator(&parse_gallery(g)?, &a)?;
            }
            let from_id: SpaceId = from.parse()?;
            let to_id: SpaceId = to.parse()?;
            let class = characterize(&a, &from_id, &to_id, &cfg, *row_sample)?;
            let mut extra = vec![
                ("matrix", json!(spec.to_string())),
                ("from", json!(from_id.to_string())),
                ("to", json!(to_id.to_string())),
                ("window", json!(cfg.window)),
            ];
            if let Some(g) = combine {
                extra.push(("combine", json!(g)));
            }
            if from_id.is_domain() {
                extra.push(("row_sample", json!(row_sample)));
            }
            Ok(Report::from_class("check-class", run.query(cfg.n, &extra), &class, run.trace))
        }
        Command::Dual { a, space, kind, run } => {
            run.float_only("dual")?;
            let cfg = run.eval_config(2000)?;
            let a_spec: SequenceSpec = a.parse()?;
            let seq = make_sequence::<f64>(&a_spec)?;
            let space_id: SpaceId = space.parse()?;
            let dom = DomainSpace::<f64>::from_space_id(&space_id)?;
            let kind: DualKind = kind.parse()?;
            let class = dual_membership(&seq, &dom, kind, &cfg)?;
            let extra = [
                ("a", json!(a_spec.to_string())),
                ("space", json!(space_id.to_string())),
                ("kind", json!(kind.to_string())),
                ("window", json!(cfg.window)),
            ];
            Ok(Report::from_class("dual", run.query(cfg.n, &extra), &class, run.trace))
        }
        Command::Regularity { matrix, run } => {
            run.float_only("regularity")?;
            let cfg = run.eval_config(10_000)?;
            let spec: MatrixSpec = matrix.parse()?;
            let a: InfMatrix<f64> = build_matrix(&spec)?;
            let reg = check_regularity(&a, &cfg)?;
            let extra = [("matrix", json!(spec.to_string())), ("window", json!(cfg.window))];
            Ok(Report::from_regularity(run.query(cfg.n, &extra), &reg, run.trace))
        }
        Command::Basis { space, k, seq, terms, run } => basis(space, *k, seq.as_deref(), *terms, run),
        Command::Oracle { matrix, from, to, samples, run } => {
            run.float_only("oracle")?;
            let n = run.n.unwrap_or(2000);
            let cfg = OracleConfig {
                n,
                tol: run.tol,
                window: run.window.unwrap_or((n / 10).max(4)),
                seed: run.seed,
                strategy: run.strategy(),
            };
            let spec: MatrixSpec = matrix.parse()?;
            let a: InfMatrix<f64> = build_matrix(&spec)?;
            let from_id: SpaceId = from.parse()?;
            let to_id: SpaceId = to.parse()?;
            let o = brute_force_mapping_oracle(&a, &from_id, &to_id, *samples, &cfg)?;
            let extra = [
                ("matrix", json!(spec.to_string())),
                ("from", json!(from_id.to_string())),
                ("to", json!(to_id.to_string())),
                ("samples", json!(samples)),
                ("seed", json!(run.seed)),
                ("window", json!(cfg.window)),
            ];
            Ok(Report::from_oracle(run.query(n, &extra), &o))
        }
    }
}

fn transform(matrix: &str, seq: &str, run: &RunArgs) -> Result<Report> {
    let n = run.n.unwrap_or(10);
    let spec: MatrixSpec = matrix.parse()?;
    let s_spec: SequenceSpec = seq.parse()?;
    let cutoff = default_cutoff(n);
    let (values, overflow) = match run.mode {
        Mode::Float => {
            let a: InfMatrix<f64> = build_matrix(&spec)?;
            let v = apply_with(&a, &make_sequence(&s_spec)?, n, cutoff, run.strategy())?;
            (float_values(&v.entries), v.overflow)
        }
        Mode::Rational => {
            let a: InfMatrix<BigRational> = build_matrix(&spec)?;
            let v = apply_with(&a, &make_sequence(&s_spec)?, n, cutoff, run.strategy())?;
            (rational_values(&v.entries), v.overflow)
        }
    };
    let q = run.query(n, &[("matrix", json!(spec.to_string())), ("seq", json!(s_spec.to_string()))]);
    let mut r = Report::new("transform", q).with_result(json!({ "values": values }));
    if overflow {
        r.notes.push("some entries overflowed".into());
    }
    Ok(r)
}

fn basis(space: &str, k: Option<usize>, seq: Option<&str>, terms: Option<usize>, run: &RunArgs) -> Result<Report> {
    let space_id: SpaceId = space.parse()?;
    match (k, seq) {
        (Some(k), None) => {
            let n = run.n.unwrap_or(k + 3);
            let q = run.query(n, &[("space", json!(space_id.to_string())), ("k", json!(k))]);
            let result = match run.mode {
                Mode::Float => {
                    let b = DomainSpace::<f64>::from_space_id(&space_id)?.basis_element(k)?;
                    let nz: Vec<Value> = b.nonzeros(n).into_iter().map(|(i, v)| json!({ "n": i, "value": v })).collect();
                    let displayed = b.displayed.as_ref().map(|d| {
                        json!({ "formula": d.formula, "at_next": d.at_next, "delta": b.displayed_delta() })
                    });
                    json!({ "nonzeros": nz, "displayed": displayed })
                }
                Mode::Rational => {
                    let b = DomainSpace::<BigRational>::from_space_id(&space_id)?.basis_element(k)?;
                    let nz: Vec<Value> = b
                        .nonzeros(n)
                        .into_iter()
                        .map(|(i, v)| json!({ "n": i, "value": v.to_string(), "approx": v.to_f64() }))
                        .collect();
                    let displayed = b.displayed.as_ref().map(|d| {
                        json!({
                            "formula": d.formula,
                            "at_next": d.at_next.to_string(),
                            "delta": b.displayed_delta().map(|x| x.to_string()),
                        })
                    });
                    json!({ "nonzeros": nz, "displayed": displayed })
                }
            };
            Ok(Report::new("basis", q).with_result(result))
        }
        (None, Some(x)) => {
            let n = run.n.unwrap_or(20);
            let m = terms.unwrap_or(n);
            let x_spec: SequenceSpec = x.parse()?;
            let q = run.query(
                n,
                &[("space", json!(space_id.to_string())), ("seq", json!(x_spec.to_string())), ("terms", json!(m))],
            );
            let result = match run.mode {
                Mode::Float => {
                    let d = DomainSpace::<f64>::from_space_id(&space_id)?.with_mode(TransformMode::Linear);
                    let e = d.basis_expand(&make_sequence(&x_spec)?, m, n)?;
                    json!({
                        "coefficients": float_values(&e.coefficients),
                        "partial": float_values(&e.partial.entries),
                        "residual_norm": e.residual_norm,
                    })
                }
                Mode::Rational => {
                    let d = DomainSpace::<BigRational>::from_space_id(&space_id)?;
                    let e = d.basis_expand(&make_sequence(&x_spec)?, m, n)?;
                    json!({
                        "coefficients": rational_values(&e.coefficients),
                        "partial": rational_values(&e.partial.entries),
                        "residual_norm": e.residual_norm.to_string(),
                    })
                }
            };
            Ok(Report::new("basis", q).with_result(result))
        }
        _ => Err(Error::Parse("basis needs exactly one of --k or --seq".into())),
    }
}
