//! A line-oriented language for scripting register experiments.
//!
//! ```text
//! qubits 2
//! prepare q0 real alpha=0.7854 epsilon=0.9   # epsilon defaults to 1
//! prepare q1 real alpha=0
//! gate UCNOT q0 q1
//! expect concurrence q0 q1
//! ```

mod exec;
mod parse;

use std::fmt;

use serde::Serialize;

pub use exec::{execute, ExecError, ExecErrorKind, ExecutionReport, ExpectResult, GateStats};
pub use parse::{parse, ParseError, ParseErrorCode};

/// Register sizes the interpreter accepts.
pub const MAX_QUBITS: usize = 8;
/// Default pass/fail tolerance for `expect` lines.
pub const DEFAULT_EXPECT_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CircuitProgram {
    pub qubit_count: usize,
    pub statements: Vec<Statement>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Statement {
    pub line: usize,
    pub kind: StatementKind,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StatementKind {
    Prepare { qubit: usize, alpha: f64, epsilon: Option<f64> },
    Gate(GateOp),
    Expect(ExpectOp),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GateOp {
    Not(usize),
    U { xi: f64, qubit: usize },
    Cnot { control: usize, target: usize },
    Ucnot { control: usize, target: usize },
    Ucu { xi: f64, control: usize, target: usize },
    Utoffoli { controls: Vec<usize>, target: usize },
}

impl GateOp {
    pub fn name(&self) -> &'static str {
        match self {
            GateOp::Not(_) => "NOT",
            GateOp::U { .. } => "U",
            GateOp::Cnot { .. } => "CNOT",
            GateOp::Ucnot { .. } => "UCNOT",
            GateOp::Ucu { .. } => "UCU",
            GateOp::Utoffoli { .. } => "UTOFFOLI",
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match self {
            GateOp::Not(q) | GateOp::U { qubit: q, .. } => vec![*q],
            GateOp::Cnot { control, target }
            | GateOp::Ucnot { control, target }
            | GateOp::Ucu { control, target, .. } => {
                vec![*control, *target]
            }
            GateOp::Utoffoli { controls, target } => controls.iter().copied().chain([*target]).collect(),
        }
    }

    pub fn is_universal(&self) -> bool {
        matches!(self, GateOp::Ucnot { .. } | GateOp::Ucu { .. } | GateOp::Utoffoli { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpectOp {
    Fidelity { qubit: usize, alpha: f64, tol: Option<f64> },
    Concurrence { a: usize, b: usize, tol: Option<f64> },
    Purity { qubit: usize, tol: Option<f64> },
}

impl ExpectOp {
    pub fn name(&self) -> &'static str {
        match self {
            ExpectOp::Fidelity { .. } => "fidelity",
            ExpectOp::Concurrence { .. } => "concurrence",
            ExpectOp::Purity { .. } => "purity",
        }
    }

    pub fn tol(&self) -> f64 {
        match self {
            ExpectOp::Fidelity { tol, .. } | ExpectOp::Concurrence { tol, .. } | ExpectOp::Purity { tol, .. } => {
                tol.unwrap_or(DEFAULT_EXPECT_TOL)
            }
        }
    }
}

fn tol_suffix(tol: &Option<f64>) -> String {
    tol.map(|t| format!(" tol={t}")).unwrap_or_default()
}

impl fmt::Display for StatementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatementKind::Prepare { qubit, alpha, epsilon } => {
                write!(f, "prepare q{qubit} real alpha={alpha}")?;
                if let Some(e) = epsilon {
                    write!(f, " epsilon={e}")?;
                }
                Ok(())
            }
            StatementKind::Gate(g) => {
                write!(f, "gate ")?;
                match g {
                    GateOp::Not(q) => write!(f, "NOT q{q}"),
                    GateOp::U { xi, qubit } => write!(f, "U xi={xi} q{qubit}"),
                    GateOp::Cnot { control, target } => write!(f, "CNOT q{control} q{target}"),
                    GateOp::Ucnot { control, target } => write!(f, "UCNOT q{control} q{target}"),
                    GateOp::Ucu { xi, control, target } => write!(f, "UCU xi={xi} q{control} q{target}"),
                    GateOp::Utoffoli { controls, target } => {
                        let list: Vec<String> = controls.iter().map(|c| format!("q{c}")).collect();
                        write!(f, "UTOFFOLI controls={} target=q{target}", list.join(","))
                    }
                }
            }
            StatementKind::Expect(e) => match e {
                ExpectOp::Fidelity { qubit, alpha, tol } => {
                    write!(f, "expect fidelity q{qubit} alpha={alpha}{}", tol_suffix(tol))
                }
                ExpectOp::Concurrence { a, b, tol } => write!(f, "expect concurrence q{a} q{b}{}", tol_suffix(tol)),
                ExpectOp::Purity { qubit, tol } => write!(f, "expect purity q{qubit}{}", tol_suffix(tol)),
            },
        }
    }
}

/// Canonical source text. Blank lines keep every statement on its original line,
/// so parsing the result gives back an identical program.
pub fn unparse(program: &CircuitProgram) -> String {
    let mut out = format!("qubits {}\n", program.qubit_count);
    let mut line = 1;
    for s in &program.statements {
        while line + 1 < s.line {
            out.push('\n');
            line += 1;
        }
        out.push_str(&s.kind.to_string());
        out.push('\n');
        line += 1;
    }
    out
}
