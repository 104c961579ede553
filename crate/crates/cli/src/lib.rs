//! Subcommand implementations for the `clonesim` binary.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use clonesim::analysis::{cnot_concurrence_sweep, unit_grid, SweepTable, DEFAULT_GRID_POINTS};
use clonesim::circuitlang::{execute, parse, ExecutionReport};
use clonesim::cloning::{
    figure2_table, first_ordering_violation, measured_clone_fidelity, universal_clone, universal_fidelity_formula,
    PcVariant, MAX_CLONE_OUTPUTS, MAX_TABLE_N,
};
use clonesim::states::{real_ket, RealQubitState};
use clonesim::ugates::budget_fidelity;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_RUNTIME: i32 = 4;

const SWEEP_TOL: f64 = 1e-9;
const CLONE_TOL: f64 = 1e-10;

#[derive(Parser, Debug)]
#[command(name = "clonesim", version, about = "Cloning-based universal gates on pseudo-pure qubit states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Output file (default: stdout)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Number of grid points for sweeps
    #[arg(long, global = true, default_value_t = DEFAULT_GRID_POINTS)]
    pub grid: usize,
    #[arg(long, global = true, value_enum, default_value_t = Variant::Anchored)]
    pub pc_variant: Variant,
    /// Largest N in the Toffoli fidelity table
    #[arg(long, global = true, default_value_t = 20)]
    pub nmax: usize,
    /// Overrides the pass/fail tolerance of sweep-concurrence and clone
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Concurrence of the C-NOT output on pseudo-pure inputs against max{0, (x^2+2x-1)/2}
    SweepConcurrence,
    /// Universal Toffoli fidelity and the phase-covariant bound for N = 1..nmax
    Fig2,
    /// Per-clone fidelity of the universal N -> M cloner
    Clone {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// Main-circle angle of the input state
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        alpha: f64,
    },
    /// Smallest N whose Toffoli loss is at most delta
    Budget {
        #[arg(long, allow_negative_numbers = true)]
        delta: f64,
    },
    /// Parse and execute a circuit file
    Run { file: PathBuf },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Anchored,
    AsPrinted,
}

impl From<Variant> for PcVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::Anchored => PcVariant::Anchored,
            Variant::AsPrinted => PcVariant::AsPrinted,
        }
    }
}

/// Fixed nine-decimal rendering used by every CSV cell.
pub fn fmt9(v: f64) -> String {
    let s = format!("{v:.9}");
    if s == "-0.000000000" {
        "0.000000000".to_string()
    } else {
        s
    }
}

/// Emitted text plus the exit status it implies.
struct Outcome {
    body: String,
    status: i32,
}

struct Failure {
    status: i32,
    message: String,
}

fn config(message: impl Into<String>) -> Failure {
    Failure { status: EXIT_CONFIG, message: message.into() }
}

fn runtime(message: impl ToString) -> Failure {
    Failure { status: EXIT_RUNTIME, message: message.to_string() }
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values always serialize");
    s.push('\n');
    s
}

fn table_csv(t: &SweepTable) -> String {
    let mut s = t.parameter.clone();
    for c in &t.columns {
        s.push(',');
        s.push_str(c);
    }
    s.push('\n');
    for r in &t.rows {
        s.push_str(&fmt9(r.parameter));
        for v in &r.values {
            s.push(',');
            s.push_str(&fmt9(*v));
        }
        s.push('\n');
    }
    s
}

fn table_json(t: &SweepTable) -> Value {
    let rows: Vec<Value> = t
        .rows
        .iter()
        .map(|r| {
            let mut obj = Map::new();
            obj.insert(t.parameter.clone(), json!(r.parameter));
            for (c, v) in t.columns.iter().zip(&r.values) {
                obj.insert(c.clone(), json!(v));
            }
            Value::Object(obj)
        })
        .collect();
    json!({ "parameter": t.parameter, "columns": t.columns, "rows": rows, "metadata": t.metadata })
}

fn sweep_concurrence(common: &Common, err: &mut dyn Write) -> Result<Outcome, Failure> {
    let grid = unit_grid(common.grid).map_err(|e| config(e.to_string()))?;
    let table = cnot_concurrence_sweep(&grid).map_err(runtime)?;
    let tol = common.tol.unwrap_or(SWEEP_TOL);
    let worst = table.column("abs_error").unwrap_or_default().into_iter().fold(0.0, f64::max);
    let status = if worst <= tol { EXIT_OK } else { EXIT_CHECK_FAILED };
    if status != EXIT_OK {
        let _ = writeln!(err, "check failed: max abs_error {worst:e} exceeds {tol:e}");
    }
    let body = match common.format {
        Format::Csv => table_csv(&table),
        Format::Json => json_text(&table_json(&table)),
    };
    Ok(Outcome { body, status })
}

fn fig2(common: &Common, err: &mut dyn Write) -> Result<Outcome, Failure> {
    if !(1..=MAX_TABLE_N).contains(&common.nmax) {
        return Err(config(format!("--nmax must be in 1..={MAX_TABLE_N}")));
    }
    let variant = PcVariant::from(common.pc_variant);
    let rows = figure2_table(common.nmax, variant).map_err(runtime)?;
    let increasing = rows.windows(2).all(|w| w[1].f_universal > w[0].f_universal);
    let violation = first_ordering_violation(&rows);
    let status = match (variant, violation) {
        (PcVariant::AsPrinted, Some(n)) => {
            let _ = writeln!(
                err,
                "warning: as-printed phase-covariant bound falls below the universal fidelity (first at N={n}); \
                 it is emitted for comparison only"
            );
            EXIT_OK
        }
        (PcVariant::Anchored, Some(n)) => {
            let _ = writeln!(err, "check failed: anchored bound not above the universal fidelity at N={n}");
            EXIT_CHECK_FAILED
        }
        _ => EXIT_OK,
    };
    let status = if increasing { status } else { EXIT_CHECK_FAILED };
    let body = match common.format {
        Format::Csv => {
            let mut s = String::from("N,F_universal,F_pc_bound,variant\n");
            for r in &rows {
                let _ = writeln!(s, "{},{},{},{}", r.n, fmt9(r.f_universal), fmt9(r.f_pc_bound), variant);
            }
            s
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|r| json!({ "N": r.n, "F_universal": r.f_universal, "F_pc_bound": r.f_pc_bound, "variant": variant.to_string() }))
                .collect();
            json_text(&json!({ "variant": variant.to_string(), "ordering_violation": violation, "rows": rows }))
        }
    };
    Ok(Outcome { body, status })
}

fn clone_cmd(common: &Common, n: usize, m: usize, alpha: f64, err: &mut dyn Write) -> Result<Outcome, Failure> {
    if n == 0 || n >= m || m > MAX_CLONE_OUTPUTS {
        return Err(config(format!("need 1 <= N < M <= {MAX_CLONE_OUTPUTS}, got N={n}, M={m}")));
    }
    let state = RealQubitState::new(alpha).map_err(|e| config(e.to_string()))?;
    let psi = real_ket(state);
    let out = universal_clone(&psi.density(), n, m).map_err(runtime)?;
    let closed = if m == n + 1 { Some(universal_fidelity_formula(n).map_err(runtime)?) } else { None };
    let measured =
        (0..m).map(|k| measured_clone_fidelity(&out, &psi, k)).collect::<Result<Vec<_>, _>>().map_err(runtime)?;
    let tol = common.tol.unwrap_or(CLONE_TOL);
    let worst = closed.map_or(0.0, |c| measured.iter().map(|f| (f - c).abs()).fold(0.0, f64::max));
    let status = if worst <= tol { EXIT_OK } else { EXIT_CHECK_FAILED };
    if status != EXIT_OK {
        let _ = writeln!(err, "check failed: clone fidelity differs from closed form by {worst:e}");
    }
    let body = match common.format {
        Format::Csv => {
            let mut s = String::from("N,M,alpha,clone,fidelity_measured,fidelity_closed_form,abs_difference\n");
            for (k, f) in measured.iter().enumerate() {
                let (c, d) = match closed {
                    Some(c) => (fmt9(c), fmt9((f - c).abs())),
                    None => (String::new(), String::new()),
                };
                let _ = writeln!(s, "{n},{m},{},{k},{},{c},{d}", fmt9(alpha), fmt9(*f));
            }
            s
        }
        Format::Json => {
            let clones: Vec<Value> = measured
                .iter()
                .enumerate()
                .map(|(k, f)| {
                    json!({ "clone": k, "fidelity_measured": f, "abs_difference": closed.map(|c| (f - c).abs()) })
                })
                .collect();
            json_text(&json!({ "N": n, "M": m, "alpha": alpha, "fidelity_closed_form": closed, "clones": clones }))
        }
    };
    Ok(Outcome { body, status })
}

fn budget(common: &Common, delta: f64) -> Result<Outcome, Failure> {
    let (n, f) = budget_fidelity(delta).map_err(|e| config(e.to_string()))?;
    let body = match common.format {
        Format::Csv => format!("delta,N,F\n{},{n},{}\n", fmt9(delta), fmt9(f)),
        Format::Json => json_text(&json!({ "delta": delta, "N": n, "F": f })),
    };
    Ok(Outcome { body, status: EXIT_OK })
}

fn optional9(v: Option<f64>) -> String {
    v.map(fmt9).unwrap_or_default()
}

fn report_csv(r: &ExecutionReport) -> String {
    let mut s = String::from("kind,line,name,qubits,measured,target,tol,passed\n");
    for e in &r.expects {
        let qubits: Vec<String> = e.qubits.iter().map(|q| format!("q{q}")).collect();
        let _ = writeln!(
            s,
            "expect,{},{},{},{},{},{},{}",
            e.line,
            e.name,
            qubits.join(" "),
            fmt9(e.measured),
            optional9(e.target),
            fmt9(e.tol),
            e.passed
        );
    }
    let st = &r.stats;
    let _ = writeln!(s, "stat,,zeta,,{},,,", fmt9(st.zeta));
    let _ = writeln!(s, "stat,,gate_fidelity,,{},,,", optional9(st.gate_fidelity));
    let _ = writeln!(s, "stat,,fidelity_estimate,,{},,,", fmt9(st.fidelity_estimate));
    let _ = writeln!(s, "stat,,final_trace,,{},,,", fmt9(r.final_trace));
    s
}

fn run_file(common: &Common, file: &PathBuf, err: &mut dyn Write) -> Result<Outcome, Failure> {
    let text = std::fs::read_to_string(file).map_err(|e| config(format!("cannot read {}: {e}", file.display())))?;
    let program = parse(&text).map_err(|e| Failure { status: EXIT_PARSE, message: format!("parse error: {e}") })?;
    let report = execute(&program).map_err(|e| runtime(format!("runtime error: {e}")))?;
    for e in report.expects.iter().filter(|e| !e.passed) {
        let _ = writeln!(
            err,
            "expect failed at line {}: {} measured {} target {}",
            e.line,
            e.name,
            fmt9(e.measured),
            optional9(e.target)
        );
    }
    let status = if report.all_passed() { EXIT_OK } else { EXIT_CHECK_FAILED };
    let body = match common.format {
        Format::Csv => report_csv(&report),
        Format::Json => json_text(&serde_json::to_value(&report).map_err(runtime)?),
    };
    Ok(Outcome { body, status })
}

/// Runs one invocation, writing the result to `--out` or `out`, diagnostics to `err`.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let common = &cli.common;
    let result = match &cli.command {
        Command::SweepConcurrence => sweep_concurrence(common, err),
        Command::Fig2 => fig2(common, err),
        Command::Clone { n, m, alpha } => clone_cmd(common, *n, *m, *alpha, err),
        Command::Budget { delta } => budget(common, *delta),
        Command::Run { file } => run_file(common, file, err),
    };
    let outcome = match result {
        Ok(o) => o,
        Err(f) => {
            let _ = writeln!(err, "{}", f.message);
            return f.status;
        }
    };
    let written = match &common.out {
        Some(path) => std::fs::write(path, &outcome.body).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => out.write_all(outcome.body.as_bytes()).map_err(|e| format!("cannot write output: {e}")),
    };
    match written {
        Ok(()) => outcome.status,
        Err(m) => {
            let _ = writeln!(err, "{m}");
            EXIT_CONFIG
        }
    }
}
