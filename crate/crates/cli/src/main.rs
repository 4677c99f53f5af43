use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use moment_kernel::algebra::json::{laurent_from_value, rational_from_value, rational_to_json};
use moment_kernel::branches::{closure_cap, BranchSystem};
use moment_kernel::constellation::skeleton;
use moment_kernel::curves::{CURVE_TOL, QUAD_TOL};
use moment_kernel::laurent_moment::{bautin_index, condition_lau, d2_witness, d3_d4_check, dvdk_check};
use moment_kernel::moments::rationality::{avoid_values, INCONCLUSIVE_TOL, ZERO_TOL};
use moment_kernel::moments::{
    detect_common_factor, double_moment_check, generic_criterion, moment_sequence, rationality_test_with,
    reconstruct_qtilde, vanishing_test_with, Decomposition, TestOptions, Verdict,
};
use moment_kernel::qmodule::{admissibility, s5_example_suite, Admissibility};
use moment_kernel::{Curve, Error, LaurentPolynomial, RationalFunction};
use serde_json::{json, Map, Value};

#[derive(Parser, Debug)]
#[command(name = "moment-kernel", version, about = "Rationality and vanishing of moment generating functions")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Zero threshold for φ_s (relative to the sample scale).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Number of sample points on the test circle.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Number of moments (moments) or search length.
    #[arg(long = "N", global = true)]
    n: Option<usize>,
    /// Group closure cap; overrides MOMENT_KERNEL_CAP.
    #[arg(long, global = true)]
    cap: Option<usize>,
    /// Recorded in the report; all computations are deterministic.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// JSON object with inputs (file path or inline text); flags take precedence.
    #[arg(long, global = true)]
    input: Option<String>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
struct Pq {
    #[arg(long = "P")]
    p: Option<String>,
    #[arg(long = "q")]
    q: Option<String>,
    /// Curve name (unit_circle, unit_circle_twice, square, unit_interval,
    /// symmetric_interval) or JSON curve object.
    #[arg(long)]
    curve: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Moments m_0..m_N of P, q along the curve.
    Moments(Pq),
    /// Is I_∞(t) rational?
    Rationality(Pq),
    /// Is I_∞(t) identically zero?
    Vanishing(Pq),
    /// Branch points, monodromy generators and group properties of P.
    Monodromy {
        #[arg(long = "P")]
        p: Option<String>,
    },
    /// Constellation, deformation and coefficient system of P along the curve.
    Constellation {
        #[arg(long = "P")]
        p: Option<String>,
        #[arg(long)]
        curve: Option<String>,
    },
    /// Common factors of P and Q, reconstruction of q̃, the doubly transitive criterion.
    Decompose(Pq),
    /// Double moments ∫PⁱQʲQ′dz with an optional decomposition P = P̃(W), Q = Q̃(W).
    DoubleMoments {
        #[command(flatten)]
        pq: Pq,
        #[arg(long = "W")]
        w: Option<String>,
        #[arg(long = "Pt")]
        p_tilde: Option<String>,
        #[arg(long = "Qt")]
        q_tilde: Option<String>,
        #[arg(long, default_value_t = 5)]
        imax: usize,
        #[arg(long, default_value_t = 5)]
        jmax: usize,
    },
    /// Branch-sum identity over J₀/J_∞ and structural checks for Laurent L, M on the unit circle.
    LaurentCheck {
        #[arg(long = "L")]
        l: Option<String>,
        #[arg(long = "M")]
        m: Option<String>,
    },
    /// First power of L with a nonzero constant term.
    Dvdk {
        #[arg(long = "L")]
        l: Option<String>,
    },
    /// Bautin bound m(N(L) − 1) + 1.
    Bautin {
        #[arg(long = "L")]
        l: Option<String>,
        #[arg(long)]
        mdeg: Option<usize>,
    },
    /// Whether a rational but non-reducible I_∞ can exist for (P, γ).
    Admissible {
        #[arg(long = "P")]
        p: Option<String>,
        #[arg(long)]
        curve: Option<String>,
    },
    /// Checks on the stored ten-branch example with group S₅.
    S5Demo,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Moments(_) => "moments",
            Command::Rationality(_) => "rationality",
            Command::Vanishing(_) => "vanishing",
            Command::Monodromy { .. } => "monodromy",
            Command::Constellation { .. } => "constellation",
            Command::Decompose(_) => "decompose",
            Command::DoubleMoments { .. } => "double-moments",
            Command::LaurentCheck { .. } => "laurent-check",
            Command::Dvdk { .. } => "dvdk",
            Command::Bautin { .. } => "bautin",
            Command::Admissible { .. } => "admissible",
            Command::S5Demo => "s5-demo",
        }
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Kernel(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Kernel(e)
    }
}

type Res<T> = Result<T, CliError>;

/// Inputs from flags, falling back to the `--input` object.
struct Inputs {
    file: Map<String, Value>,
    echo: Map<String, Value>,
}

impl Inputs {
    fn load(src: Option<&str>) -> Res<Self> {
        let file = match src {
            None => Map::new(),
            Some(s) => {
                let text = if s.trim_start().starts_with('{') {
                    s.to_string()
                } else {
                    std::fs::read_to_string(s).map_err(|e| CliError::Usage(format!("cannot read {s}: {e}")))?
                };
                match serde_json::from_str(&text) {
                    Ok(Value::Object(m)) => m,
                    Ok(_) => return Err(CliError::Usage("--input must be a JSON object".into())),
                    Err(e) => return Err(CliError::Usage(format!("--input: {e}"))),
                }
            }
        };
        Ok(Self { file, echo: Map::new() })
    }

    fn value(&mut self, key: &str, flag: &Option<String>) -> Option<Value> {
        let v = match flag {
            Some(s) => Some(Value::String(s.clone())),
            None => self.file.get(key).cloned(),
        };
        if let Some(v) = &v {
            self.echo.insert(key.to_string(), v.clone());
        }
        v
    }

    fn rational(&mut self, key: &str, flag: &Option<String>) -> Res<RationalFunction> {
        let v = self.value(key, flag).ok_or_else(|| CliError::Usage(format!("missing --{key}")))?;
        Ok(rational_from_value(&v)?)
    }

    fn laurent(&mut self, key: &str, flag: &Option<String>) -> Res<LaurentPolynomial> {
        let v = self.value(key, flag).ok_or_else(|| CliError::Usage(format!("missing --{key}")))?;
        Ok(laurent_from_value(&v)?)
    }

    fn curve(&mut self, flag: &Option<String>) -> Res<Curve> {
        let v = self.value("curve", flag).unwrap_or_else(|| {
            self.echo.insert("curve".into(), json!("unit_circle"));
            json!("unit_circle")
        });
        match &v {
            Value::String(s) => Ok(Curve::parse(s)?),
            _ => Ok(Curve::from_value(&v)?),
        }
    }

    fn usize(&mut self, key: &str, flag: Option<usize>) -> Res<Option<usize>> {
        if let Some(n) = flag {
            self.echo.insert(key.into(), json!(n));
            return Ok(Some(n));
        }
        match self.file.get(key) {
            None => Ok(None),
            Some(v) => {
                let n = v.as_u64().ok_or_else(|| CliError::Usage(format!("{key} must be a non-negative integer")))?;
                self.echo.insert(key.into(), json!(n));
                Ok(Some(n as usize))
            }
        }
    }
}

fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("reports serialize")
}

fn error_value<T>(r: moment_kernel::Result<T>, f: impl FnOnce(T) -> Value) -> Value {
    match r {
        Ok(t) => f(t),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

/// Runs the command; returns the result object and whether it is inconclusive.
fn run(cmd: &Command, g: &Global, inp: &mut Inputs) -> Res<(Value, bool)> {
    let opts = TestOptions {
        tol: g.tol.unwrap_or(ZERO_TOL),
        samples: g.samples.unwrap_or(TestOptions::default().samples),
        ..TestOptions::default()
    };
    let verdict_out = |v: Verdict, val: Value| (val, v == Verdict::Inconclusive);
    Ok(match cmd {
        Command::Moments(a) => {
            let (p, q, c) = (inp.rational("P", &a.p)?, inp.rational("q", &a.q)?, inp.curve(&a.curve)?);
            let n = inp.usize("N", g.n)?.unwrap_or(10);
            (to_value(&moment_sequence(&p, &q, &c, n)?.report()), false)
        }
        Command::Rationality(a) => {
            let (p, q, c) = (inp.rational("P", &a.p)?, inp.rational("q", &a.q)?, inp.curve(&a.curve)?);
            let v = rationality_test_with(&p, &q, &c, &opts)?;
            verdict_out(v.verdict, to_value(&v))
        }
        Command::Vanishing(a) => {
            let (p, q, c) = (inp.rational("P", &a.p)?, inp.rational("q", &a.q)?, inp.curve(&a.curve)?);
            let v = vanishing_test_with(&p, &q, &c, &opts)?;
            verdict_out(v.verdict, to_value(&v))
        }
        Command::Monodromy { p } => {
            let p = inp.rational("P", p)?;
            (to_value(&BranchSystem::new(&p)?.report()), false)
        }
        Command::Constellation { p, curve } => {
            let (p, c) = (inp.rational("P", p)?, inp.curve(curve)?);
            let sk = skeleton(&p, &c, &avoid_values(&p, &RationalFunction::zero()))?;
            (to_value(&sk.report()), false)
        }
        Command::Decompose(a) => {
            let (p, q, c) = (inp.rational("P", &a.p)?, inp.rational("q", &a.q)?, inp.curve(&a.curve)?);
            let common = error_value(detect_common_factor(&p, &q), |r| to_value(&r));
            let qtilde = error_value(reconstruct_qtilde(&p, &q), |r| to_value(&rational_to_json(&r)));
            let generic = generic_criterion(&p, &q, &c)?;
            let inconclusive = generic.verdict == Verdict::Inconclusive;
            (json!({ "common_factor": common, "qtilde": qtilde, "generic": to_value(&generic) }), inconclusive)
        }
        Command::DoubleMoments { pq, w, p_tilde, q_tilde, imax, jmax } => {
            let (p, q, c) = (inp.rational("P", &pq.p)?, inp.rational("q", &pq.q)?, inp.curve(&pq.curve)?);
            let keys = [("W", w), ("Pt", p_tilde), ("Qt", q_tilde)];
            let given: Vec<Option<Value>> = keys.iter().map(|(k, f)| inp.value(k, f)).collect();
            let d = match given.as_slice() {
                [Some(w), Some(pt), Some(qt)] => Some(Decomposition {
                    w: rational_from_value(w)?,
                    p_tilde: rational_from_value(pt)?,
                    q_tilde: rational_from_value(qt)?,
                }),
                [None, None, None] => None,
                _ => return Err(CliError::Usage("--W, --Pt and --Qt must be given together".into())),
            };
            (to_value(&double_moment_check(&p, &q, &c, *imax, *jmax, d.as_ref())?), false)
        }
        Command::LaurentCheck { l, m } => {
            let (l, m) = (inp.laurent("L", l)?, inp.laurent("M", m)?);
            let lau = condition_lau(&l, &m)?;
            let polynomial = m.coeffs().keys().all(|&k| k >= 0);
            let structure = if polynomial { error_value(d3_d4_check(&l, &m), |r| to_value(&r)) } else { Value::Null };
            let d2 = error_value(d2_witness(&l, &m.derivative()), |r| to_value(&r));
            let mut lau_v = to_value(&lau);
            if let Value::Object(o) = &mut lau_v {
                o.remove("samples");
                o.insert("samples".into(), json!(lau.samples.len()));
            }
            (json!({ "condition_lau": lau_v, "structure": structure, "congruence_witness": d2 }), false)
        }
        Command::Dvdk { l } => {
            let l = inp.laurent("L", l)?;
            (to_value(&dvdk_check(&l)?), false)
        }
        Command::Bautin { l, mdeg } => {
            let l = inp.laurent("L", l)?;
            let m = inp.usize("mdeg", *mdeg)?.ok_or_else(|| CliError::Usage("missing --mdeg".into()))?;
            (to_value(&bautin_index(&l, m)?), false)
        }
        Command::Admissible { p, curve } => {
            let (p, c) = (inp.rational("P", p)?, inp.curve(curve)?);
            (to_value(&admissibility(&p, &c)?), false)
        }
        Command::S5Demo => {
            let r = s5_example_suite()?;
            let checks = json!({
                "group_order_120": r.group_order == 120,
                "v_orthogonal_to_v1_v5": r.orthogonal,
                "generators_permute_v1_v5": r.permutes_vs,
                "closure_has_no_difference_vector": r.difference_pair.is_none(),
                "admissible": r.verdict == Admissibility::Admissible,
            });
            let mut v = to_value(&r);
            if let Value::Object(o) = &mut v {
                o.insert("checks".into(), checks);
            }
            (v, false)
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(cap) = cli.global.cap {
        std::env::set_var("MOMENT_KERNEL_CAP", cap.to_string());
    }
    let name = cli.command.name();
    let outcome = Inputs::load(cli.global.input.as_deref()).and_then(|mut inp| {
        let r = run(&cli.command, &cli.global, &mut inp)?;
        Ok((r, inp.echo))
    });
    let ((result, inconclusive), echo) = match outcome {
        Ok(v) => v,
        Err(e) => {
            let msg = match e {
                CliError::Usage(m) => format!("usage error: {m}"),
                CliError::Kernel(k) => format!("{k}"),
            };
            eprintln!("{}", json!({ "command": name, "error": msg }));
            return ExitCode::from(1);
        }
    };
    let report = json!({
        "tool": "moment-kernel",
        "version": env!("CARGO_PKG_VERSION"),
        "command": name,
        "seed": cli.global.seed,
        "tolerances": {
            "zero": cli.global.tol.unwrap_or(ZERO_TOL),
            "inconclusive": INCONCLUSIVE_TOL,
            "curve": CURVE_TOL,
            "quadrature": QUAD_TOL,
            "samples": cli.global.samples.unwrap_or(TestOptions::default().samples),
            "closure_cap": closure_cap(),
        },
        "inputs": echo,
        "result": result,
    });
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    match &cli.global.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text + "\n") {
                eprintln!("{}", json!({ "command": name, "error": format!("cannot write {}: {e}", path.display()) }));
                return ExitCode::from(1);
            }
        }
        None => {
            // a closed pipe downstream is not an error of ours
            let _ = writeln!(std::io::stdout(), "{text}");
        }
    }
    ExitCode::from(if inconclusive { 2 } else { 0 })
}
