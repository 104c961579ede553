//! Cloning-based basis-independent multi-qubit gates.
//!
//! * the explicit universal C-NOT for real states, given as a map into one extra device qubit;
//! * clone-then-rotate Controlled-U (1 -> 2 cloner followed by a fixed unitary on the copy);
//! * the N-control Toffoli built on the N -> N+1 cloner;
//! * the loss budget and the algorithm-level fidelity estimate `F^zeta`.

use crate::cloning::{universal_clone, universal_fidelity_formula};
use crate::error::{Error, Result};
use crate::gates::{apply_unitary, rotation_gate, universal_not, GateMatrix};
use crate::qmath::{check_targets, re, state_fidelity, symmetric_projector, validate_density, ComplexMatrix, Ket, C64};
use crate::states::{bloch_vector, main_circle_angle, real_ket, RealQubitState};

pub const ISOMETRY_TOL: f64 = 1e-12;
pub const CHANNEL_TRACE_TOL: f64 = 1e-9;
pub const MAX_TOFFOLI_CONTROLS: usize = 5;
/// Points in the uniform real-state ensemble standing in for `I/2` at N >= 2.
pub const ENSEMBLE_POINTS: usize = 64;

/// Target and control fidelity of the universal C-NOT on real inputs, `1/2 + sqrt(1/8)`.
pub fn ucnot_fidelity() -> f64 {
    0.5 + (1.0f64 / 8.0).sqrt()
}

/// Linear map from `dim_in` into `dim_in * prod(device_dims)`, device factors last.
#[derive(Clone, Debug)]
pub struct Isometry {
    matrix: ComplexMatrix,
    device_dims: Vec<usize>,
}

impl Isometry {
    /// Validates `V^dag V = I`.
    pub fn new(matrix: ComplexMatrix, device_dims: Vec<usize>) -> Result<Self> {
        let iso = Self::unchecked(matrix, device_dims)?;
        let deviation = iso.gram_defect();
        if deviation > ISOMETRY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(iso)
    }

    fn unchecked(matrix: ComplexMatrix, device_dims: Vec<usize>) -> Result<Self> {
        let factor: usize = device_dims.iter().product();
        if matrix.rows() != matrix.cols() * factor {
            return Err(Error::DimensionMismatch { expected: matrix.cols() * factor, got: matrix.rows() });
        }
        Ok(Self { matrix, device_dims })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn device_dims(&self) -> &[usize] {
        &self.device_dims
    }

    pub fn dim_in(&self) -> usize {
        self.matrix.cols()
    }

    /// `V^dag V`.
    pub fn gram(&self) -> ComplexMatrix {
        &self.matrix.adjoint() * &self.matrix
    }

    /// Largest entry of `|V^dag V - I|`.
    pub fn gram_defect(&self) -> f64 {
        self.gram().max_abs_diff(&ComplexMatrix::identity(self.dim_in()))
    }

    /// `Tr_device(V rho V^dag)`, not renormalized.
    pub fn apply_and_discard(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.rows() != self.dim_in() || rho.cols() != self.dim_in() {
            return Err(Error::DimensionMismatch { expected: self.dim_in(), got: rho.rows() });
        }
        let full = &(&self.matrix * rho) * &self.matrix.adjoint();
        let mut dims = vec![self.dim_in()];
        dims.extend_from_slice(&self.device_dims);
        full.partial_trace(&dims, &[0])
    }
}

/// The universal C-NOT for real states: the linear extension of its action on
/// `|c>|chi>|Q>_d` over the computational basis, with `chi_perp = NOT chi`.
///
/// With `a = 1/2`, `b = sqrt(1/8)`:
/// `|0,chi> -> (a+b)|0,chi,0> + b(|0,chi_perp> + |1,chi>)|1> + (a-b)|1,chi_perp,0>`,
/// `|1,chi> -> (a+b)|1,chi_perp,1> + b(|0,chi_perp> + |1,chi>)|0> + (a-b)|0,chi,1>`.
///
/// The images of `|0,chi>` and `|1,chi>` are orthogonal for every real `chi`, so
/// the map preserves norms on real product inputs. It is not an isometry on the
/// whole space: `<V 00, V 11> = -1/2` and `<V 01, V 10> = 1/2` (see `gram_defect`).
pub fn universal_cnot_isometry() -> Isometry {
    let a = 0.5;
    let b = (1.0f64 / 8.0).sqrt();
    let not = universal_not();
    let mut v = ComplexMatrix::zeros(8, 4);
    let out = |c: usize, t: usize, d: usize| c * 4 + t * 2 + d;
    for c in 0..2 {
        for t in 0..2 {
            let chi = Ket::basis(2, t);
            let chi_perp = not.matrix().mul_vec(chi.amplitudes());
            let col = c * 2 + t;
            let mut add = |cc: usize, vec: &[C64], d: usize, amp: f64| {
                for (ti, z) in vec.iter().enumerate() {
                    v[(out(cc, ti, d), col)] += z * amp;
                }
            };
            let chi = chi.amplitudes();
            if c == 0 {
                add(0, chi, 0, a + b);
                add(0, &chi_perp, 1, b);
                add(1, chi, 1, b);
                add(1, &chi_perp, 0, a - b);
            } else {
                add(1, &chi_perp, 1, a + b);
                add(0, &chi_perp, 0, b);
                add(1, chi, 0, b);
                add(0, chi, 1, a - b);
            }
        }
    }
    Isometry::unchecked(v, vec![2]).expect("8x4 with one device qubit")
}

/// Output of a cloning-based gate together with its ideal single-qubit targets.
#[derive(Clone, Debug)]
pub struct ChannelResult {
    pub output: ComplexMatrix,
    pub fidelity_control: f64,
    pub fidelity_target: f64,
    pub ideal_control: Ket,
    pub ideal_target: Ket,
}

fn reduced(rho: &ComplexMatrix, qubit: usize, n: usize) -> Result<ComplexMatrix> {
    rho.partial_trace(&vec![2; n], &[qubit])
}

fn check_trace(out: &ComplexMatrix) -> Result<()> {
    let tr = out.trace().re;
    if (tr - 1.0).abs() > CHANNEL_TRACE_TOL {
        return Err(Error::NotTracePreserving { trace: tr });
    }
    Ok(())
}

/// Runs the universal C-NOT on a two-qubit density matrix (qubit 0 the control).
///
/// The ideal outputs are read off the inputs' main-circle angles: control `theta`
/// stays, target `phi` becomes `phi + theta`. Inputs on which the printed map does
/// not keep unit trace are rejected with [`Error::NotTracePreserving`].
pub fn apply_universal_cnot(rho_ct: &ComplexMatrix) -> Result<ChannelResult> {
    if rho_ct.rows() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: rho_ct.rows() });
    }
    validate_density(rho_ct)?;
    let output = universal_cnot_isometry().apply_and_discard(rho_ct)?;
    check_trace(&output)?;

    let theta = main_circle_angle(bloch_vector(&reduced(rho_ct, 0, 2)?)?);
    let phi = main_circle_angle(bloch_vector(&reduced(rho_ct, 1, 2)?)?);
    let ideal_control = real_ket(RealQubitState::new(theta)?);
    let ideal_target = real_ket(RealQubitState::new(phi + theta)?);
    Ok(ChannelResult {
        fidelity_control: state_fidelity(&ideal_control, &reduced(&output, 0, 2)?)?,
        fidelity_target: state_fidelity(&ideal_target, &reduced(&output, 1, 2)?)?,
        output,
        ideal_control,
        ideal_target,
    })
}

/// Clone the control onto the target slot with the 1 -> 2 cloner, then apply `u_fixed` to the copy.
pub fn universal_controlled_u(psi_c: &Ket, u_fixed: &ComplexMatrix) -> Result<ChannelResult> {
    if psi_c.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: psi_c.dim() });
    }
    let u = GateMatrix::new(u_fixed.clone())?;
    if u.qubits() != 1 {
        return Err(Error::DimensionMismatch { expected: 2, got: u_fixed.rows() });
    }
    let cloned = universal_clone(&psi_c.density(), 1, 2)?;
    let output = apply_unitary(&cloned.joint, &u, &[1], 2)?;
    let ideal_control = psi_c.clone();
    let ideal_target = u.apply_ket(psi_c)?;
    Ok(ChannelResult {
        fidelity_control: state_fidelity(&ideal_control, &reduced(&output, 0, 2)?)?,
        fidelity_target: state_fidelity(&ideal_target, &reduced(&output, 1, 2)?)?,
        output,
        ideal_control,
        ideal_target,
    })
}

fn check_controls(n: usize) -> Result<()> {
    if !(1..=MAX_TOFFOLI_CONTROLS).contains(&n) {
        return Err(Error::InvalidParameter(format!("Toffoli needs 1..={MAX_TOFFOLI_CONTROLS} controls, got {n}")));
    }
    Ok(())
}

/// Clone `sigma` N -> N+1 and rotate the last slot by `target_angle`.
fn toffoli_block(sigma: &ComplexMatrix, n: usize, target_angle: f64) -> Result<ComplexMatrix> {
    let cloned = universal_clone(sigma, n, n + 1)?;
    apply_unitary(&cloned.joint, &rotation_gate(target_angle), &[n], n + 1)
}

fn toffoli_result(
    output: ComplexMatrix,
    psi_c: RealQubitState,
    n: usize,
    chi_t: RealQubitState,
) -> Result<ChannelResult> {
    let ideal_control = real_ket(psi_c);
    let ideal_target = real_ket(psi_c.rotated(chi_t.alpha()));
    Ok(ChannelResult {
        fidelity_control: state_fidelity(&ideal_control, &reduced(&output, 0, n + 1)?)?,
        fidelity_target: state_fidelity(&ideal_target, &reduced(&output, n, n + 1)?)?,
        output,
        ideal_control,
        ideal_target,
    })
}

/// Basis-independent Toffoli on N identical real controls and a target of known angle.
///
/// Output is over `N + 1` qubits: the N control clones followed by the target.
pub fn universal_toffoli(psi_c: RealQubitState, n: usize, chi_t: RealQubitState) -> Result<ChannelResult> {
    check_controls(n)?;
    let output = toffoli_block(&real_ket(psi_c).density(), n, chi_t.alpha())?;
    toffoli_result(output, psi_c, n, chi_t)
}

/// Joint output for N identical pseudo-pure controls `eps |psi><psi| + (1-eps) I/2`.
///
/// At N = 1 the cloner is linear, so the mixed state is cloned directly. For N >= 2
/// the controls are treated as one preparation drawn from the ensemble
/// `eps * psi + (1-eps) * uniform real states on ENSEMBLE_POINTS angles`, each draw
/// replicated N times, and the channel outputs are averaged.
pub fn toffoli_pseudo_pure_block(
    epsilon: f64,
    psi_c: RealQubitState,
    n: usize,
    target_angle: f64,
) -> Result<ComplexMatrix> {
    check_controls(n)?;
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon} outside [0, 1]")));
    }
    let pure = real_ket(psi_c).density();
    if n == 1 {
        let sigma = &pure.scale_real(epsilon) + &ComplexMatrix::identity(2).scale_real((1.0 - epsilon) / 2.0);
        return toffoli_block(&sigma, 1, target_angle);
    }
    let mut out = toffoli_block(&pure, n, target_angle)?.scale_real(epsilon);
    if epsilon < 1.0 {
        let w = (1.0 - epsilon) / ENSEMBLE_POINTS as f64;
        for k in 0..ENSEMBLE_POINTS {
            let member = RealQubitState::new(std::f64::consts::TAU * k as f64 / ENSEMBLE_POINTS as f64)?;
            let block = toffoli_block(&real_ket(member).density(), n, target_angle)?;
            out = &out + &block.scale_real(w);
        }
    }
    Ok(out)
}

/// [`universal_toffoli`] for pseudo-pure controls; fidelities are against the pure ideal outputs.
pub fn universal_toffoli_pseudo_pure(
    epsilon: f64,
    psi_c: RealQubitState,
    n: usize,
    chi_t: RealQubitState,
) -> Result<ChannelResult> {
    let output = toffoli_pseudo_pure_block(epsilon, psi_c, n, chi_t.alpha())?;
    toffoli_result(output, psi_c, n, chi_t)
}

/// Smallest N >= 1 whose Toffoli loss `1/((N+1)(N+2))` is at most `delta`.
pub fn toffoli_budget(delta: f64) -> Result<usize> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta {delta} outside (0, 1)")));
    }
    let mut n = 1usize;
    while 1.0 / ((n + 1) * (n + 2)) as f64 > delta {
        n += 1;
    }
    Ok(n)
}

/// Fidelity reached at the budgeted N.
pub fn budget_fidelity(delta: f64) -> Result<(usize, f64)> {
    let n = toffoli_budget(delta)?;
    Ok((n, universal_fidelity_formula(n)?))
}

/// `F^zeta`.
pub fn algorithm_fidelity_estimate(f: f64, zeta: f64) -> Result<f64> {
    if !(f > 0.0 && f <= 1.0) {
        return Err(Error::InvalidParameter(format!("fidelity {f} outside (0, 1]")));
    }
    if !(zeta >= 0.0 && zeta.is_finite()) {
        return Err(Error::InvalidParameter(format!("zeta {zeta} must be finite and non-negative")));
    }
    Ok(f.powf(zeta))
}

/// Register-level versions of the gates, acting on selected qubits of an `n`-qubit density matrix.
pub mod register {
    use super::*;

    /// Moves qubits of `rho` so that `block` qubit `j` lands on `positions[j]`.
    ///
    /// `rho` is laid out as (remaining qubits in ascending order) followed by the block.
    fn scatter(rho: &ComplexMatrix, positions: &[usize], n: usize) -> Result<ComplexMatrix> {
        let rest: Vec<usize> = (0..n).filter(|q| !positions.contains(q)).collect();
        let order: Vec<usize> = (0..n)
            .map(|q| match positions.iter().position(|&p| p == q) {
                Some(j) => rest.len() + j,
                None => rest.iter().position(|&r| r == q).expect("qubit is either kept or placed"),
            })
            .collect();
        rho.permute_qubits(&order, n)
    }

    /// Discards `positions` and puts `block` (over `positions.len()` qubits) in their place.
    pub fn replace_qubits(
        rho: &ComplexMatrix,
        positions: &[usize],
        block: &ComplexMatrix,
        n: usize,
    ) -> Result<ComplexMatrix> {
        check_targets(positions, n)?;
        if block.rows() != 1 << positions.len() {
            return Err(Error::DimensionMismatch { expected: 1 << positions.len(), got: block.rows() });
        }
        if positions.len() == n {
            return scatter(block, positions, n);
        }
        let rest: Vec<usize> = (0..n).filter(|q| !positions.contains(q)).collect();
        let kept = rho.partial_trace(&vec![2; n], &rest)?;
        scatter(&kept.tensor(block), positions, n)
    }

    /// Universal C-NOT on `(control, target)`; errors if trace is not preserved on this register state.
    pub fn universal_cnot(rho: &ComplexMatrix, control: usize, target: usize, n: usize) -> Result<ComplexMatrix> {
        check_targets(&[control, target], n)?;
        let v = universal_cnot_isometry();
        // square embedding: device qubit enters in |0>, columns for |1>_d unused
        let mut w = ComplexMatrix::zeros(8, 8);
        for r in 0..8 {
            for col in 0..4 {
                w[(r, col * 2)] = v.matrix()[(r, col)];
            }
        }
        let mut dev0 = ComplexMatrix::zeros(2, 2);
        dev0[(0, 0)] = re(1.0);
        let extended = rho.tensor(&dev0);
        let out = extended.sandwich(&w, &[control, target, n], n + 1)?;
        let keep: Vec<usize> = (0..n).collect();
        let out = out.partial_trace(&vec![2; n + 1], &keep)?;
        check_trace(&out)?;
        Ok(out)
    }

    /// 1 -> 2 cloner from `control` into `target` (the old target state is discarded).
    pub fn clone_into(rho: &ComplexMatrix, control: usize, target: usize, n: usize) -> Result<ComplexMatrix> {
        check_targets(&[control, target], n)?;
        let rest: Vec<usize> = (0..n).filter(|&q| q != target).collect();
        let reduced = rho.partial_trace(&vec![2; n], &rest)?;
        let control_pos = rest.iter().position(|&q| q == control).expect("control kept");
        let with_blank = reduced.tensor(&ComplexMatrix::identity(2));
        let s2 = symmetric_projector(2)?;
        let cloned = with_blank.sandwich(&s2, &[control_pos, n - 1], n)?.scale_real(2.0 / 3.0);
        scatter(&cloned, &[target], n)
    }

    pub fn apply_gate(rho: &ComplexMatrix, gate: &GateMatrix, qubits: &[usize], n: usize) -> Result<ComplexMatrix> {
        apply_unitary(rho, gate, qubits, n)
    }
}
