use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use serde::{Serialize, Serializer};

use super::{CircuitProgram, ExpectOp, GateOp, StatementKind};
use crate::analysis::concurrence;
use crate::cloning::universal_fidelity_formula;
use crate::error::Error;
use crate::gates::{rotation_gate, standard_cnot, universal_not};
use crate::qmath::{purity, state_fidelity, validate_density, ComplexMatrix, Ket};
use crate::states::{pseudo_pure_density, real_ket, PseudoPureState, RealQubitState};
use crate::ugates::{algorithm_fidelity_estimate, register, toffoli_pseudo_pure_block, ucnot_fidelity};

const SAME_PREPARATION_TOL: f64 = 1e-12;
const SAME_ANGLE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ExecErrorKind {
    #[error("q{0} has not been prepared or acted on")]
    UnpreparedQubit(usize),
    #[error("UTOFFOLI controls must be identically prepared and untouched by approximate gates")]
    NonIdenticalControls,
    #[error("UTOFFOLI target q{0} has no known main-circle angle")]
    UnknownTargetAngle(usize),
    #[error(transparent)]
    Simulation(#[from] Error),
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("line {line}: {kind}")]
pub struct ExecError {
    pub line: usize,
    pub kind: ExecErrorKind,
}

/// What the interpreter can predict about a single qubit.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Track {
    Unprepared,
    /// `epsilon |alpha><alpha| + (1-epsilon) I/2`, in product with the rest of the register.
    Exact {
        alpha: f64,
        epsilon: f64,
    },
    /// Output of a universal gate on pure nominal inputs: fidelity `fidelity` to `|alpha>`.
    Approx {
        alpha: f64,
        fidelity: f64,
    },
    /// No prediction.
    Opaque,
}

impl Track {
    fn rotate(self, xi: f64) -> Self {
        match self {
            Track::Exact { alpha, epsilon } => Track::Exact { alpha: alpha + xi, epsilon },
            Track::Approx { alpha, fidelity } => Track::Approx { alpha: alpha + xi, fidelity },
            other => other,
        }
    }

    fn known_angle(self) -> Option<f64> {
        match self {
            Track::Exact { alpha, .. } | Track::Approx { alpha, .. } => Some(alpha),
            _ => None,
        }
    }

    fn pure_angle(self) -> Option<f64> {
        match self {
            Track::Exact { alpha, epsilon: 1.0 } => Some(alpha),
            _ => None,
        }
    }
}

fn same_angle(a: f64, b: f64) -> bool {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d) < SAME_ANGLE_TOL
}

#[derive(Clone, Debug, Serialize)]
pub struct ExpectResult {
    pub line: usize,
    pub name: String,
    pub qubits: Vec<usize>,
    pub measured: f64,
    /// Prediction from the tracked nominal state; `None` means informational only.
    pub target: Option<f64>,
    pub tol: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct GateStats {
    pub counts: BTreeMap<String, usize>,
    /// Universal-gate applications touching each qubit.
    pub universal_touches: Vec<usize>,
    /// Touches averaged over the register.
    pub zeta: f64,
    /// Lowest nominal fidelity among the universal gates applied.
    pub gate_fidelity: Option<f64>,
    /// `gate_fidelity ^ zeta` (1 when no universal gate ran).
    pub fidelity_estimate: f64,
}

fn serialize_density<S: Serializer>(m: &ComplexMatrix, s: S) -> Result<S::Ok, S::Error> {
    let rows: Vec<Vec<[f64; 2]>> =
        (0..m.rows()).map(|r| (0..m.cols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect()).collect();
    rows.serialize(s)
}

#[derive(Clone, Debug, Serialize)]
pub struct ExecutionReport {
    pub qubit_count: usize,
    /// Rows of `[re, im]` pairs.
    #[serde(serialize_with = "serialize_density")]
    pub final_density: ComplexMatrix,
    pub final_trace: f64,
    pub expects: Vec<ExpectResult>,
    pub stats: GateStats,
    pub notes: Vec<String>,
}

impl ExecutionReport {
    pub fn all_passed(&self) -> bool {
        self.expects.iter().all(|e| e.passed)
    }
}

struct Machine {
    n: usize,
    rho: ComplexMatrix,
    tracks: Vec<Track>,
    stats: GateStats,
    notes: Vec<String>,
}

impl Machine {
    fn new(n: usize) -> Self {
        let rho = Ket::basis(1 << n, 0).density();
        let stats = GateStats { universal_touches: vec![0; n], ..GateStats::default() };
        Self { n, rho, tracks: vec![Track::Unprepared; n], stats, notes: Vec::new() }
    }

    fn note(&mut self, text: &str) {
        if !self.notes.iter().any(|n| n == text) {
            self.notes.push(text.to_string());
        }
    }

    fn prepare(&mut self, qubit: usize, alpha: f64, epsilon: f64) -> Result<(), ExecErrorKind> {
        let state = RealQubitState::new(alpha)?;
        let block = pseudo_pure_density(&PseudoPureState::real(epsilon, state)?);
        self.rho = register::replace_qubits(&self.rho, &[qubit], &block, self.n)?;
        self.tracks[qubit] = Track::Exact { alpha, epsilon };
        Ok(())
    }

    fn gate(&mut self, op: &GateOp) -> Result<(), ExecErrorKind> {
        // untouched qubits are really in |0>
        for q in op.qubits() {
            if self.tracks[q] == Track::Unprepared {
                self.tracks[q] = Track::Exact { alpha: 0.0, epsilon: 1.0 };
            }
        }
        let n = self.n;
        let mut nominal = None;
        match *op {
            GateOp::Not(q) => {
                self.rho = register::apply_gate(&self.rho, &universal_not(), &[q], n)?;
                self.tracks[q] = self.tracks[q].rotate(PI);
            }
            GateOp::U { xi, qubit } => {
                self.rho = register::apply_gate(&self.rho, &rotation_gate(xi), &[qubit], n)?;
                self.tracks[qubit] = self.tracks[qubit].rotate(xi);
            }
            GateOp::Cnot { control, target } => {
                self.rho = register::apply_gate(&self.rho, &standard_cnot(), &[control, target], n)?;
                self.tracks[control] = Track::Opaque;
                self.tracks[target] = Track::Opaque;
            }
            GateOp::Ucnot { control, target } => {
                self.rho = register::universal_cnot(&self.rho, control, target, n)?;
                let f = ucnot_fidelity();
                nominal = Some(f);
                let (tc, tt) = (self.tracks[control], self.tracks[target]);
                match (tc.pure_angle(), tt.pure_angle()) {
                    (Some(ac), Some(at)) => {
                        self.tracks[control] = Track::Approx { alpha: ac, fidelity: f };
                        self.tracks[target] = Track::Approx { alpha: at + ac, fidelity: f };
                    }
                    _ => self.untrack(&[control, target]),
                }
            }
            GateOp::Ucu { xi, control, target } => {
                let cloned = register::clone_into(&self.rho, control, target, n)?;
                self.rho = register::apply_gate(&cloned, &rotation_gate(xi), &[target], n)?;
                let f = universal_fidelity_formula(1)?;
                nominal = Some(f);
                match self.tracks[control].pure_angle() {
                    Some(ac) => {
                        self.tracks[control] = Track::Approx { alpha: ac, fidelity: f };
                        self.tracks[target] = Track::Approx { alpha: ac + xi, fidelity: f };
                    }
                    None => self.untrack(&[control, target]),
                }
            }
            GateOp::Utoffoli { ref controls, target } => {
                let (alpha, epsilon) = match self.tracks[controls[0]] {
                    Track::Exact { alpha, epsilon } => (alpha, epsilon),
                    _ => return Err(ExecErrorKind::NonIdenticalControls),
                };
                let identical = controls.iter().all(|&c| match self.tracks[c] {
                    Track::Exact { alpha: a, epsilon: e } => {
                        same_angle(a, alpha) && (e - epsilon).abs() <= SAME_PREPARATION_TOL
                    }
                    _ => false,
                });
                if !identical {
                    return Err(ExecErrorKind::NonIdenticalControls);
                }
                let chi = self.tracks[target].known_angle().ok_or(ExecErrorKind::UnknownTargetAngle(target))?;
                let k = controls.len();
                let block = toffoli_pseudo_pure_block(epsilon, RealQubitState::new(alpha)?, k, chi)?;
                let mut positions = controls.clone();
                positions.push(target);
                // exact controls are in product with the rest, so replacing them is the channel itself
                self.rho = register::replace_qubits(&self.rho, &positions, &block, n)?;
                let f = universal_fidelity_formula(k)?;
                nominal = Some(f);
                if epsilon == 1.0 {
                    for &c in controls {
                        self.tracks[c] = Track::Approx { alpha, fidelity: f };
                    }
                    self.tracks[target] = Track::Approx { alpha: alpha + chi, fidelity: f };
                } else {
                    if k >= 2 {
                        self.note("mixed UTOFFOLI controls are averaged over a uniform 64-angle real-state ensemble");
                    }
                    self.untrack(&positions);
                }
            }
        }
        *self.stats.counts.entry(op.name().to_string()).or_default() += 1;
        if let Some(f) = nominal {
            for q in op.qubits() {
                self.stats.universal_touches[q] += 1;
            }
            self.stats.gate_fidelity = Some(self.stats.gate_fidelity.map_or(f, |g| g.min(f)));
        }
        Ok(())
    }

    fn untrack(&mut self, qubits: &[usize]) {
        for &q in qubits {
            self.tracks[q] = Track::Opaque;
        }
        self.note("universal gates applied to mixed or already approximate inputs are reported without a target value");
    }

    fn reduced(&self, qubits: &[usize]) -> Result<ComplexMatrix, ExecErrorKind> {
        if let Some(&q) = qubits.iter().find(|&&q| self.tracks[q] == Track::Unprepared) {
            return Err(ExecErrorKind::UnpreparedQubit(q));
        }
        Ok(self.rho.partial_trace(&vec![2; self.n], qubits)?)
    }

    fn expect(&self, op: &ExpectOp, line: usize) -> Result<ExpectResult, ExecErrorKind> {
        let (qubits, measured, target) = match *op {
            ExpectOp::Fidelity { qubit, alpha, .. } => {
                let rho = self.reduced(&[qubit])?;
                let measured = state_fidelity(&real_ket(RealQubitState::new(alpha)?), &rho)?;
                let target = match self.tracks[qubit] {
                    Track::Exact { alpha: a, epsilon } => Some((1.0 + epsilon * (a - alpha).cos()) / 2.0),
                    Track::Approx { alpha: a, fidelity } if same_angle(a, alpha) => Some(fidelity),
                    _ => None,
                };
                (vec![qubit], measured, target)
            }
            ExpectOp::Concurrence { a, b, .. } => {
                let measured = concurrence(&self.reduced(&[a, b])?)?;
                let product =
                    matches!(self.tracks[a], Track::Exact { .. }) && matches!(self.tracks[b], Track::Exact { .. });
                (vec![a, b], measured, product.then_some(0.0))
            }
            ExpectOp::Purity { qubit, .. } => {
                let measured = purity(&self.reduced(&[qubit])?)?;
                let target = match self.tracks[qubit] {
                    Track::Exact { epsilon, .. } => Some((1.0 + epsilon * epsilon) / 2.0),
                    _ => None,
                };
                (vec![qubit], measured, target)
            }
        };
        let tol = op.tol();
        Ok(ExpectResult {
            line,
            name: op.name().to_string(),
            qubits,
            measured,
            target,
            tol,
            passed: target.is_none_or(|t| (measured - t).abs() <= tol),
        })
    }
}

/// Runs `program` on a register that starts in `|0...0>`.
pub fn execute(program: &CircuitProgram) -> Result<ExecutionReport, ExecError> {
    let n = program.qubit_count;
    let mut m = Machine::new(n);
    let mut expects = Vec::new();
    let mut last_line = 1;
    for s in &program.statements {
        last_line = s.line;
        let at = |kind| ExecError { line: s.line, kind };
        match &s.kind {
            StatementKind::Prepare { qubit, alpha, epsilon } => {
                m.prepare(*qubit, *alpha, epsilon.unwrap_or(1.0)).map_err(at)?
            }
            StatementKind::Gate(op) => m.gate(op).map_err(at)?,
            StatementKind::Expect(op) => expects.push(m.expect(op, s.line).map_err(at)?),
        }
    }
    validate_density(&m.rho).map_err(|e| ExecError { line: last_line, kind: e.into() })?;
    let total: usize = m.stats.universal_touches.iter().sum();
    m.stats.zeta = total as f64 / n as f64;
    m.stats.fidelity_estimate = match m.stats.gate_fidelity {
        Some(f) => {
            algorithm_fidelity_estimate(f, m.stats.zeta).map_err(|e| ExecError { line: last_line, kind: e.into() })?
        }
        None => 1.0,
    };
    Ok(ExecutionReport {
        qubit_count: n,
        final_trace: m.rho.trace().re,
        final_density: m.rho,
        expects,
        stats: m.stats,
        notes: m.notes,
    })
}
