//! Entanglement decay, purity preservation and mixed-state cloning sweeps.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::cloning::universal_clone;
use crate::error::{Error, Result};
use crate::gates::{apply_unitary, rotation_gate, standard_cnot};
use crate::qmath::{
    hermitian_eigensystem, matrix_sqrt_psd, purity, state_fidelity, uhlmann_fidelity, validate_density, ComplexMatrix,
    Ket, PSD_TOL,
};
use crate::states::{pauli_y, pseudo_pure_density, real_ket, PseudoPureState, RealQubitState};
use crate::ugates::{toffoli_pseudo_pure_block, ENSEMBLE_POINTS};

pub const DEFAULT_GRID_POINTS: usize = 101;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub parameter: f64,
    pub values: Vec<f64>,
}

/// Rows sorted by parameter with no repeated parameter values.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepTable {
    pub parameter: String,
    pub columns: Vec<String>,
    pub rows: Vec<SweepRow>,
    pub metadata: BTreeMap<String, String>,
}

impl SweepTable {
    pub fn new(parameter: &str, columns: &[&str], mut rows: Vec<SweepRow>) -> Result<Self> {
        if let Some(r) = rows.iter().find(|r| r.values.len() != columns.len()) {
            return Err(Error::DimensionMismatch { expected: columns.len(), got: r.values.len() });
        }
        rows.sort_by(|a, b| a.parameter.total_cmp(&b.parameter));
        if let Some(w) = rows.windows(2).find(|w| w[0].parameter == w[1].parameter) {
            return Err(Error::InvalidParameter(format!("duplicate {parameter} value {}", w[0].parameter)));
        }
        Ok(Self {
            parameter: parameter.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows,
            metadata: BTreeMap::new(),
        })
    }

    pub fn with_meta(mut self, key: &str, value: impl Into<String>) -> Self {
        self.metadata.insert(key.to_string(), value.into());
        self
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r.values[idx]).collect())
    }
}

/// `points` evenly spaced values from 0 to 1 inclusive.
pub fn unit_grid(points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::InvalidParameter(format!("grid needs at least 2 points, got {points}")));
    }
    Ok((0..points).map(|i| i as f64 / (points - 1) as f64).collect())
}

fn check_unit_interval(grid: &[f64], what: &str) -> Result<()> {
    match grid.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        Some(v) => Err(Error::InvalidParameter(format!("{what} value {v} outside [0, 1]"))),
        None => Ok(()),
    }
}

/// Wootters concurrence of a two-qubit density matrix.
///
/// The spin-flipped spectrum is read from the Hermitian matrix `sqrt(rho) rho~ sqrt(rho)`,
/// which has the same eigenvalues as `rho rho~`.
pub fn concurrence(rho: &ComplexMatrix) -> Result<f64> {
    if rho.rows() != 4 || rho.cols() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: rho.rows() });
    }
    validate_density(rho)?;
    let yy = pauli_y().tensor(&pauli_y());
    let flipped = &(&yy * &rho.conj()) * &yy;
    let root = matrix_sqrt_psd(rho)?;
    let r = &(&root * &flipped) * &root;
    let eig = hermitian_eigensystem(&r)?;
    if eig.min_value() < -PSD_TOL {
        return Err(Error::NotPositive { value: eig.min_value() });
    }
    let l: Vec<f64> = eig.values.iter().map(|v| v.max(0.0).sqrt()).collect();
    Ok((l[0] - l[1] - l[2] - l[3]).max(0.0))
}

/// C-NOT output for control `x|+><+| + (1-x)I/2` and target `x|0><0| + (1-x)I/2`.
pub fn pseudo_pure_cnot_output(x: f64) -> Result<ComplexMatrix> {
    let plus = real_ket(RealQubitState::new(PI / 2.0)?);
    let rc = pseudo_pure_density(&PseudoPureState::new(x, plus)?);
    let rt = pseudo_pure_density(&PseudoPureState::new(x, Ket::basis(2, 0))?);
    apply_unitary(&rc.tensor(&rt), &standard_cnot(), &[0, 1], 2)
}

/// `max{0, (x^2 + 2x - 1)/2}`.
pub fn cnot_concurrence_formula(x: f64) -> f64 {
    ((x * x + 2.0 * x - 1.0) / 2.0).max(0.0)
}

/// Columns: `concurrence_measured`, `concurrence_formula`, `abs_error`.
pub fn cnot_concurrence_sweep(x_grid: &[f64]) -> Result<SweepTable> {
    check_unit_interval(x_grid, "x")?;
    let rows = x_grid
        .iter()
        .map(|&x| {
            let measured = concurrence(&pseudo_pure_cnot_output(x)?)?;
            let formula = cnot_concurrence_formula(x);
            Ok(SweepRow { parameter: x, values: vec![measured, formula, (measured - formula).abs()] })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable::new("x", &["concurrence_measured", "concurrence_formula", "abs_error"], rows)?
        .with_meta("identity_normalization", "I/2 per qubit")
        .with_meta("grid_points", x_grid.len().to_string()))
}

#[derive(Clone, Debug, Serialize)]
pub struct PurityReport {
    pub epsilon: f64,
    pub alpha: f64,
    pub xi: f64,
    pub recovered_epsilon: f64,
    pub delta_epsilon: f64,
    pub output_purity: f64,
    #[serde(skip)]
    pub output: ComplexMatrix,
}

/// Rotates `eps |alpha><alpha| + (1-eps) I/2` by `xi` and recovers `eps` from the
/// overlap with the rotated pure part: `eps' = 2 <phi|rho'|phi> - 1`.
pub fn purity_preservation_report(epsilon: f64, alpha: f64, xi: f64) -> Result<PurityReport> {
    let state = RealQubitState::new(alpha)?;
    let rho = pseudo_pure_density(&PseudoPureState::real(epsilon, state)?);
    let gate = rotation_gate(xi);
    let output = apply_unitary(&rho, &gate, &[0], 1)?;
    let rotated = gate.apply_ket(&real_ket(state))?;
    // unclamped overlap so that the recovered value is not biased at eps = 1
    let r_phi = output.mul_vec(rotated.amplitudes());
    let overlap: f64 = rotated.amplitudes().iter().zip(&r_phi).map(|(a, b)| (a.conj() * b).re).sum();
    let recovered_epsilon = 2.0 * overlap - 1.0;
    Ok(PurityReport {
        epsilon,
        alpha,
        xi,
        recovered_epsilon,
        delta_epsilon: (recovered_epsilon - epsilon).abs(),
        output_purity: purity(&output)?,
        output,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CloningSweepMode {
    /// Linear 1 -> 2 cloner fed the mixed state directly.
    N1Channel,
    /// 2 -> 3 cloner over the pseudo-pure preparation ensemble.
    EnsembleN2,
}

/// Clone fidelity against the ideal pseudo-pure output `eps|psi><psi| + (1-eps) I/2`.
///
/// Columns: `fidelity` (Uhlmann, reduces to `<psi|rho|psi>` at eps = 1) and
/// `overlap` (`Tr(rho sigma)`).
pub fn pseudo_pure_cloning_sweep(eps_grid: &[f64], mode: CloningSweepMode, alpha: f64) -> Result<SweepTable> {
    check_unit_interval(eps_grid, "epsilon")?;
    let state = RealQubitState::new(alpha)?;
    let rows = eps_grid
        .iter()
        .map(|&eps| {
            let ideal = pseudo_pure_density(&PseudoPureState::real(eps, state)?);
            let clone = match mode {
                CloningSweepMode::N1Channel => universal_clone(&ideal, 1, 2)?.clone_state(1)?,
                CloningSweepMode::EnsembleN2 => {
                    toffoli_pseudo_pure_block(eps, state, 2, 0.0)?.partial_trace(&[2, 2, 2], &[2])?
                }
            };
            let fidelity = uhlmann_fidelity(&clone, &ideal)?;
            let overlap = (&clone * &ideal).trace().re;
            Ok(SweepRow { parameter: eps, values: vec![fidelity, overlap] })
        })
        .collect::<Result<Vec<_>>>()?;
    let mode_name = match mode {
        CloningSweepMode::N1Channel => "n1-channel",
        CloningSweepMode::EnsembleN2 => "ensemble-n2",
    };
    let mut table = SweepTable::new("epsilon", &["fidelity", "overlap"], rows)?
        .with_meta("mode", mode_name)
        .with_meta("fidelity", "Uhlmann (Tr sqrt(sqrt(sigma) rho sqrt(sigma)))^2 against the ideal pseudo-pure state")
        .with_meta("overlap", "Tr(rho sigma)")
        .with_meta("alpha", alpha.to_string());
    if mode == CloningSweepMode::EnsembleN2 {
        table = table.with_meta("ensemble", format!("uniform real states on {ENSEMBLE_POINTS} angles"));
    }
    Ok(table)
}

/// Fidelity of a single clone to the pure reference `psi`, a convenience for the `eps = 1` anchor.
pub fn pure_clone_fidelity(psi: &Ket) -> Result<f64> {
    let out = universal_clone(&psi.density(), 1, 2)?;
    state_fidelity(psi, &out.clone_state(0)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::GateMatrix;
    use crate::qmath::{re, C64};

    /// Closed-form concurrence for X-shaped two-qubit states.
    fn x_state_concurrence(rho: &ComplexMatrix) -> f64 {
        let r = |i: usize, j: usize| rho[(i, j)];
        let a = r(0, 3).norm() - (r(1, 1).re * r(2, 2).re).sqrt();
        let b = r(1, 2).norm() - (r(0, 0).re * r(3, 3).re).sqrt();
        2.0 * a.max(b).max(0.0)
    }

    #[test]
    fn concurrence_examples() {
        let bell = Ket::from_real(&[1.0, 0.0, 0.0, 1.0]).unwrap().density();
        assert!((concurrence(&bell).unwrap() - 1.0).abs() < 1e-9);
        let a = ComplexMatrix::from_real_rows(&[&[0.7, 0.2], &[0.2, 0.3]]);
        let b = ComplexMatrix::from_rows(&[&[re(0.4), C64::new(0.1, 0.2)], &[C64::new(0.1, -0.2), re(0.6)]]);
        assert!(concurrence(&a.tensor(&b)).unwrap() < 1e-10);
        let out = pseudo_pure_cnot_output(0.5).unwrap();
        assert!((concurrence(&out).unwrap() - 0.125).abs() < 1e-9);
        assert!(concurrence(&ComplexMatrix::identity(2).scale_real(0.5)).is_err());
        assert!(concurrence(&ComplexMatrix::identity(4)).is_err());
    }

    #[test]
    fn concurrence_matches_x_state_oracle() {
        for i in 0..=100 {
            let x = i as f64 / 100.0;
            let out = pseudo_pure_cnot_output(x).unwrap();
            assert!((concurrence(&out).unwrap() - x_state_concurrence(&out)).abs() < 1e-9, "x={x}");
        }
    }

    #[test]
    fn concurrence_local_unitary_invariance() {
        let out = pseudo_pure_cnot_output(0.8).unwrap();
        let c0 = concurrence(&out).unwrap();
        for k in 0..10 {
            let t = 0.7 * k as f64;
            let u1 = GateMatrix::new(ComplexMatrix::from_rows(&[
                &[C64::from_polar(1.0, t) * t.cos(), re(t.sin())],
                &[-C64::from_polar(1.0, 0.5 * t) * t.sin(), C64::from_polar(1.0, -0.5 * t) * t.cos()],
            ]))
            .unwrap();
            let u2 = rotation_gate(1.3 * t);
            let local = GateMatrix::new(u1.matrix().tensor(u2.matrix())).unwrap();
            let moved = apply_unitary(&out, &local, &[0, 1], 2).unwrap();
            assert!((concurrence(&moved).unwrap() - c0).abs() < 1e-9);
        }
    }

    #[test]
    fn sweep_examples() {
        let t = cnot_concurrence_sweep(&[1.0, 2f64.sqrt() - 1.0, 0.9]).unwrap();
        assert_eq!(t.rows[0].parameter, 2f64.sqrt() - 1.0);
        let m = t.column("concurrence_measured").unwrap();
        let f = t.column("concurrence_formula").unwrap();
        assert!(m[0].abs() < 1e-9 && f[0].abs() < 1e-15, "{} {}", m[0], f[0]);
        assert!((f[1] - 0.805).abs() < 1e-12 && (m[1] - 0.805).abs() < 1e-9);
        assert!((m[2] - 1.0).abs() < 1e-9 && f[2] == 1.0);
        assert!(cnot_concurrence_sweep(&[1.2]).is_err());
    }

    #[test]
    fn sweep_rejects_duplicates() {
        assert!(cnot_concurrence_sweep(&[0.5, 0.5]).is_err());
    }

    #[test]
    fn separable_before_the_gate() {
        let plus = real_ket(RealQubitState::new(PI / 2.0).unwrap());
        for i in 0..=10 {
            let x = i as f64 / 10.0;
            let rc = pseudo_pure_density(&PseudoPureState::new(x, plus.clone()).unwrap());
            let rt = pseudo_pure_density(&PseudoPureState::new(x, Ket::basis(2, 0)).unwrap());
            assert!(concurrence(&rc.tensor(&rt)).unwrap() < 1e-9);
        }
    }

    #[test]
    fn purity_report_examples() {
        for (alpha, xi) in [(0.0, 1.0), (2.0, 3.0), (5.5, 0.25)] {
            let r = purity_preservation_report(0.8, alpha, xi).unwrap();
            assert!(r.delta_epsilon < 1e-12);
        }
        let r = purity_preservation_report(0.0, 1.0, 2.0).unwrap();
        assert_eq!(r.output, ComplexMatrix::identity(2).scale_real(0.5));
        let r = purity_preservation_report(1.0, 1.0, 2.0).unwrap();
        assert!((r.output_purity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cloning_sweep_endpoints() {
        let grid = [0.0, 0.5, 1.0];
        for mode in [CloningSweepMode::N1Channel, CloningSweepMode::EnsembleN2] {
            let t = pseudo_pure_cloning_sweep(&grid, mode, 0.9).unwrap();
            let f = t.column("fidelity").unwrap();
            assert!((f[0] - 1.0).abs() < 1e-10);
            assert!(f[1] > 0.0 && f[1] <= 1.0);
        }
        let t = pseudo_pure_cloning_sweep(&grid, CloningSweepMode::N1Channel, 0.9).unwrap();
        assert!((t.column("fidelity").unwrap()[2] - 5.0 / 6.0).abs() < 1e-10);
        let t = pseudo_pure_cloning_sweep(&grid, CloningSweepMode::EnsembleN2, 0.9).unwrap();
        assert!((t.column("fidelity").unwrap()[2] - 11.0 / 12.0).abs() < 1e-10);
        let psi = real_ket(RealQubitState::new(0.9).unwrap());
        assert!((pure_clone_fidelity(&psi).unwrap() - 5.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn grid() {
        let g = unit_grid(DEFAULT_GRID_POINTS).unwrap();
        assert_eq!(g.len(), 101);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[100], 1.0);
        assert!(unit_grid(1).is_err());
    }
}
