use crate::error::{Error, Result};

use super::eigen::{hermitian_eigensystem, matrix_sqrt_psd, PSD_TOL};
use super::matrix::{ComplexMatrix, Ket};

pub const DENSITY_TRACE_TOL: f64 = 1e-9;
const ROUNDOFF_EIGENVALUE: f64 = 1e-14;

/// Checks trace one, Hermiticity and positivity.
pub fn validate_density(rho: &ComplexMatrix) -> Result<()> {
    if !rho.is_square() {
        return Err(Error::NotDensity { reason: format!("shape {}x{}", rho.rows(), rho.cols()) });
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > DENSITY_TRACE_TOL || tr.im.abs() > DENSITY_TRACE_TOL {
        return Err(Error::NotDensity { reason: format!("trace {tr}") });
    }
    let eig = hermitian_eigensystem(rho).map_err(|e| Error::NotDensity { reason: e.to_string() })?;
    if eig.min_value() < -PSD_TOL {
        return Err(Error::NotDensity { reason: format!("eigenvalue {:e}", eig.min_value()) });
    }
    Ok(())
}

/// `<psi|rho|psi>`, clamped to [0, 1].
pub fn state_fidelity(psi: &Ket, rho: &ComplexMatrix) -> Result<f64> {
    if rho.rows() != psi.dim() || rho.cols() != psi.dim() {
        return Err(Error::DimensionMismatch { expected: psi.dim(), got: rho.rows() });
    }
    let r_psi = rho.mul_vec(psi.amplitudes());
    let f: f64 = psi.amplitudes().iter().zip(&r_psi).map(|(a, b)| (a.conj() * b).re).sum();
    Ok(f.clamp(0.0, 1.0))
}

/// `Tr(rho^2)`.
pub fn purity(rho: &ComplexMatrix) -> Result<f64> {
    validate_density(rho)?;
    let n = rho.rows();
    // Tr(rho rho) = sum |rho_ij|^2 for Hermitian rho
    let s: f64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| rho[(i, j)].norm_sqr()).sum();
    Ok(s)
}

/// Uhlmann fidelity `(Tr sqrt(sqrt(sigma) rho sqrt(sigma)))^2` between two density matrices.
pub fn uhlmann_fidelity(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    if rho.rows() != sigma.rows() {
        return Err(Error::DimensionMismatch { expected: sigma.rows(), got: rho.rows() });
    }
    let s = matrix_sqrt_psd(sigma)?;
    let inner = &(&s * rho) * &s;
    let eig = hermitian_eigensystem(&inner)?;
    if eig.min_value() < -PSD_TOL {
        return Err(Error::NotPositive { value: eig.min_value() });
    }
    // sqrt would lift round-off eigenvalues (~1e-17) to ~1e-9
    let root_trace: f64 = eig.values.iter().filter(|&&v| v > ROUNDOFF_EIGENVALUE).map(|v| v.sqrt()).sum();
    Ok(root_trace.powi(2).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fidelity_examples() {
        let zero = Ket::basis(2, 0);
        assert_eq!(state_fidelity(&zero, &zero.density()).unwrap(), 1.0);
        let mixed = ComplexMatrix::identity(2).scale_real(0.5);
        assert!((state_fidelity(&zero, &mixed).unwrap() - 0.5).abs() < 1e-15);
        assert!(state_fidelity(&zero, &ComplexMatrix::identity(4)).is_err());
    }

    #[test]
    fn purity_examples() {
        let plus = Ket::from_real(&[1.0, 1.0]).unwrap();
        assert!((purity(&plus.density()).unwrap() - 1.0).abs() < 1e-15);
        assert!((purity(&ComplexMatrix::identity(2).scale_real(0.5)).unwrap() - 0.5).abs() < 1e-15);
        assert!((purity(&ComplexMatrix::identity(4).scale_real(0.25)).unwrap() - 0.25).abs() < 1e-15);
        assert!(purity(&ComplexMatrix::identity(2)).is_err());
        assert!(purity(&ComplexMatrix::diag_real(&[1.5, -0.5])).is_err());
    }

    #[test]
    fn uhlmann_reduces_to_overlap_for_pure_sigma() {
        let psi = Ket::from_real(&[0.6, 0.8]).unwrap();
        let rho = ComplexMatrix::from_real_rows(&[&[0.7, 0.2], &[0.2, 0.3]]);
        let f = uhlmann_fidelity(&rho, &psi.density()).unwrap();
        assert!((f - state_fidelity(&psi, &rho).unwrap()).abs() < 1e-12);
        let mixed = ComplexMatrix::identity(2).scale_real(0.5);
        assert!((uhlmann_fidelity(&mixed, &mixed).unwrap() - 1.0).abs() < 1e-12);
    }
}
