//! Computational-basis reference gates, the exact basis-independent single-qubit
//! gates for real states, and their application to register density matrices.

use crate::error::{Error, Result};
use crate::qmath::{ComplexMatrix, Ket};

pub const UNITARY_TOL: f64 = 1e-12;

/// A unitary matrix acting on `log2(dim)` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct GateMatrix(ComplexMatrix);

impl GateMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let dim = matrix.square_dim()?;
        if !dim.is_power_of_two() {
            return Err(Error::InvalidParameter(format!("gate dimension {dim} is not a power of two")));
        }
        let deviation = matrix.unitarity_deviation();
        if deviation > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self(matrix))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn qubits(&self) -> usize {
        self.0.rows().trailing_zeros() as usize
    }

    pub fn identity(qubits: usize) -> Self {
        Self(ComplexMatrix::identity(1 << qubits))
    }

    pub fn then(&self, next: &GateMatrix) -> GateMatrix {
        GateMatrix(next.matrix() * self.matrix())
    }

    pub fn apply_ket(&self, ket: &Ket) -> Result<Ket> {
        ket.apply(&self.0)
    }
}

/// `|0><0| (x) I + |1><1| (x) X`, qubit 0 the control.
pub fn standard_cnot() -> GateMatrix {
    GateMatrix(ComplexMatrix::from_real_rows(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
        &[0.0, 0.0, 1.0, 0.0],
    ]))
}

/// `-i sigma_y`: maps every real qubit state to its orthogonal.
pub fn universal_not() -> GateMatrix {
    GateMatrix(ComplexMatrix::from_real_rows(&[&[0.0, -1.0], &[1.0, 0.0]]))
}

/// `cos(xi/2) I + sin(xi/2) NOT`, a rotation by `xi` along the x-z circle.
pub fn rotation_gate(xi: f64) -> GateMatrix {
    let (s, c) = (xi / 2.0).sin_cos();
    GateMatrix(ComplexMatrix::from_real_rows(&[&[c, -s], &[s, c]]))
}

/// `U rho U^dag` with `gate` embedded on `targets` of an `n`-qubit register.
pub fn apply_unitary(rho: &ComplexMatrix, gate: &GateMatrix, targets: &[usize], n: usize) -> Result<ComplexMatrix> {
    if gate.qubits() != targets.len() {
        return Err(Error::DimensionMismatch { expected: 1 << targets.len(), got: gate.0.rows() });
    }
    rho.sandwich(&gate.0, targets, n)
}
