//! Real qubit states on the x-z great circle and pseudo-pure mixtures.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{re, ComplexMatrix, Ket, I, ONE, ZERO};

/// A pure qubit state `cos(alpha/2)|0> + sin(alpha/2)|1>` with `alpha` in `[0, 2pi)`.
///
/// Angles above `pi` cover the minus-sign branch `cos(t/2)|0> - sin(t/2)|1>` via `alpha = 2pi - t`
/// (up to a global sign).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealQubitState {
    alpha: f64,
}

pub fn normalize_angle(alpha: f64) -> f64 {
    let a = alpha.rem_euclid(TAU);
    // rem_euclid can return TAU itself for tiny negative inputs
    if a >= TAU {
        0.0
    } else {
        a
    }
}

impl RealQubitState {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("angle {alpha} is not finite")));
        }
        Ok(Self { alpha: normalize_angle(alpha) })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn ket(&self) -> Ket {
        real_ket(*self)
    }

    /// The state rotated by `xi` along the circle.
    pub fn rotated(&self, xi: f64) -> Self {
        Self { alpha: normalize_angle(self.alpha + xi) }
    }
}

pub fn real_ket(s: RealQubitState) -> Ket {
    let half = s.alpha / 2.0;
    Ket::from_real(&[half.cos(), half.sin()]).expect("unit vector")
}

/// `alpha + pi`: the ray `NOT |psi>`.
pub fn orthogonal_real(s: RealQubitState) -> RealQubitState {
    s.rotated(PI)
}

/// `eps |psi><psi| + (1 - eps) I / 2^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct PseudoPureState {
    epsilon: f64,
    pure_part: Ket,
    n: usize,
}

impl PseudoPureState {
    pub fn new(epsilon: f64, pure_part: Ket) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::InvalidParameter(format!("epsilon {epsilon} outside [0, 1]")));
        }
        let dim = pure_part.dim();
        if !dim.is_power_of_two() || dim < 2 {
            return Err(Error::InvalidParameter(format!("ket dimension {dim} is not a qubit register")));
        }
        Ok(Self { epsilon, n: dim.trailing_zeros() as usize, pure_part })
    }

    pub fn real(epsilon: f64, state: RealQubitState) -> Result<Self> {
        Self::new(epsilon, state.ket())
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn pure_part(&self) -> &Ket {
        &self.pure_part
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn density(&self) -> ComplexMatrix {
        pseudo_pure_density(self)
    }
}

pub fn pseudo_pure_density(p: &PseudoPureState) -> ComplexMatrix {
    let dim = p.pure_part.dim();
    let pure = p.pure_part.density().scale_real(p.epsilon);
    let mixed = ComplexMatrix::identity(dim).scale_real((1.0 - p.epsilon) / dim as f64);
    &pure + &mixed
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[&[ZERO, ONE], &[ONE, ZERO]])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[&[ZERO, -I], &[I, ZERO]])
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[&[ONE, ZERO], &[ZERO, re(-1.0)]])
}

/// `(Tr(rho sx), Tr(rho sy), Tr(rho sz))` for a single-qubit density matrix.
pub fn bloch_vector(rho: &ComplexMatrix) -> Result<[f64; 3]> {
    if rho.rows() != 2 || rho.cols() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: rho.rows().max(rho.cols()) });
    }
    let comp = |p: ComplexMatrix| -> f64 { (&p * rho).trace().re };
    Ok([comp(pauli_x()), comp(pauli_y()), comp(pauli_z())])
}

/// Angle of a Bloch vector's projection onto the x-z plane, measured from +z toward +x.
pub fn main_circle_angle(bloch: [f64; 3]) -> f64 {
    normalize_angle(bloch[0].atan2(bloch[2]))
}
