//! Universal symmetric N -> M qubit cloning and the closed-form fidelities around it.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{
    purity, state_fidelity, symmetric_dim, symmetric_projector, tensor_all, validate_density, ComplexMatrix, Ket,
};

pub const MAX_CLONE_OUTPUTS: usize = 8;
pub const MAX_TABLE_N: usize = 50;
const PURE_TOL: f64 = 1e-9;

/// Joint state of `m` clones produced from `n` identical inputs.
#[derive(Clone, Debug)]
pub struct CloneOutput {
    pub joint: ComplexMatrix,
    pub n: usize,
    pub m: usize,
}

impl CloneOutput {
    /// Reduced state of one clone.
    pub fn clone_state(&self, index: usize) -> Result<ComplexMatrix> {
        if index >= self.m {
            return Err(Error::QubitOutOfRange { index, n: self.m });
        }
        self.joint.partial_trace(&vec![2; self.m], &[index])
    }
}

/// Werner's optimal cloner: `(d_N/d_M) S_M (sigma^{(x)N} (x) I^{(x)(M-N)}) S_M`.
///
/// For `n == 1` any single-qubit density matrix is accepted (the map is linear and
/// trace-preserving there). For `n >= 2` the input must be pure.
pub fn universal_clone(sigma: &ComplexMatrix, n: usize, m: usize) -> Result<CloneOutput> {
    if n < 1 || m <= n || m > MAX_CLONE_OUTPUTS {
        return Err(Error::InvalidParameter(format!("cloning {n} -> {m} outside 1 <= N < M <= {MAX_CLONE_OUTPUTS}")));
    }
    if sigma.rows() != 2 || sigma.cols() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: sigma.rows() });
    }
    validate_density(sigma)?;
    if n >= 2 {
        let p = purity(sigma)?;
        if p < 1.0 - PURE_TOL {
            return Err(Error::MixedInput { n, purity: p });
        }
    }

    let blank = ComplexMatrix::identity(2);
    let factors: Vec<&ComplexMatrix> =
        std::iter::repeat_n(sigma, n).chain(std::iter::repeat_n(&blank, m - n)).collect();
    let input = tensor_all(factors);
    let s = symmetric_projector(m)?;
    let weight = symmetric_dim(n) as f64 / symmetric_dim(m) as f64;
    let joint = (&(&s * &input) * &s).scale_real(weight);
    Ok(CloneOutput { joint, n, m })
}

/// `<psi| rho_clone |psi>` for the clone at `clone_index`.
pub fn measured_clone_fidelity(out: &CloneOutput, psi: &Ket, clone_index: usize) -> Result<f64> {
    if psi.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: psi.dim() });
    }
    state_fidelity(psi, &out.clone_state(clone_index)?)
}

/// Optimal N -> N+1 universal cloning fidelity, `1 - 1/((N+1)(N+2))`.
pub fn universal_fidelity_formula(n: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    Ok(1.0 - 1.0 / ((n + 1) * (n + 2)) as f64)
}

/// Which reading of the phase-covariant bound to evaluate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PcVariant {
    /// `1/2 + ratio`; equals `1/2 + sqrt(1/8)` at N = 1.
    #[default]
    Anchored,
    /// `2 * ratio`, the leading factor taken literally.
    AsPrinted,
}

impl fmt::Display for PcVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PcVariant::Anchored => "anchored",
            PcVariant::AsPrinted => "as-printed",
        })
    }
}

impl FromStr for PcVariant {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "anchored" => Ok(PcVariant::Anchored),
            "as-printed" => Ok(PcVariant::AsPrinted),
            other => Err(format!("unknown variant '{other}' (expected anchored or as-printed)")),
        }
    }
}

fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128) as f64
}

/// `sum_{i<N} sqrt(C(N,i) C(N,i+1)) / sum_{j<=N} sqrt(C(N+1,j) C(N+1,j+1))`.
fn pc_ratio(n: u64) -> f64 {
    let num: f64 = (0..n).map(|i| (binomial(n, i) * binomial(n, i + 1)).sqrt()).sum();
    let den: f64 = (0..=n).map(|j| (binomial(n + 1, j) * binomial(n + 1, j + 1)).sqrt()).sum();
    num / den
}

/// Upper bound on the phase-covariant N -> N+1 fidelity.
pub fn pc_upper_bound(n: usize, variant: PcVariant) -> Result<f64> {
    if n < 1 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    let ratio = pc_ratio(n as u64);
    Ok(match variant {
        PcVariant::Anchored => 0.5 + ratio,
        PcVariant::AsPrinted => 2.0 * ratio,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fig2Row {
    pub n: usize,
    pub f_universal: f64,
    pub f_pc_bound: f64,
}

/// Toffoli fidelity vs. number of controls, `N = 1..=n_max`.
pub fn figure2_table(n_max: usize, variant: PcVariant) -> Result<Vec<Fig2Row>> {
    if !(1..=MAX_TABLE_N).contains(&n_max) {
        return Err(Error::InvalidParameter(format!("N_max {n_max} outside 1..={MAX_TABLE_N}")));
    }
    (1..=n_max)
        .map(|n| {
            Ok(Fig2Row { n, f_universal: universal_fidelity_formula(n)?, f_pc_bound: pc_upper_bound(n, variant)? })
        })
        .collect()
}

/// First `N` at which the bound fails to exceed the universal fidelity, if any.
pub fn first_ordering_violation(rows: &[Fig2Row]) -> Option<usize> {
    rows.iter().find(|r| r.f_pc_bound <= r.f_universal).map(|r| r.n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::{hermitian_eigensystem, re, Ket, C64};
    use crate::states::{real_ket, RealQubitState};

    #[test]
    fn one_to_two_fidelity_is_five_sixths() {
        let psi = Ket::new(vec![C64::new(0.6, 0.1), C64::new(-0.3, 0.7)]).unwrap();
        let out = universal_clone(&psi.density(), 1, 2).unwrap();
        for idx in 0..2 {
            assert!((measured_clone_fidelity(&out, &psi, idx).unwrap() - 5.0 / 6.0).abs() < 1e-12);
        }
    }

    #[test]
    fn maximally_mixed_is_fixed_point() {
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        let out = universal_clone(&half, 1, 2).unwrap();
        for idx in 0..2 {
            assert!(out.clone_state(idx).unwrap().approx_eq(&half, 1e-12));
        }
    }

    #[test]
    fn two_to_three_of_zero() {
        let zero = Ket::basis(2, 0);
        let out = universal_clone(&zero.density(), 2, 3).unwrap();
        for idx in 0..3 {
            assert!((measured_clone_fidelity(&out, &zero, idx).unwrap() - 11.0 / 12.0).abs() < 1e-12);
        }
    }

    #[test]
    fn three_to_four_of_zero() {
        let zero = Ket::basis(2, 0);
        let out = universal_clone(&zero.density(), 3, 4).unwrap();
        for idx in 0..4 {
            assert!((measured_clone_fidelity(&out, &zero, idx).unwrap() - 0.95).abs() < 1e-12);
        }
    }

    #[test]
    fn one_to_three_is_seven_ninths() {
        let psi = real_ket(RealQubitState::new(0.4).unwrap());
        let out = universal_clone(&psi.density(), 1, 3).unwrap();
        assert!((measured_clone_fidelity(&out, &psi, 2).unwrap() - 7.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn n1_channel_is_trace_preserving_on_mixed_input() {
        for k in 0..10 {
            let eps = k as f64 / 9.0;
            let rho = &real_ket(RealQubitState::new(0.3 * k as f64).unwrap()).density().scale_real(eps)
                + &ComplexMatrix::identity(2).scale_real((1.0 - eps) / 2.0);
            for m in 2..=5 {
                let out = universal_clone(&rho, 1, m).unwrap();
                assert!((out.joint.trace().re - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mixed_input_rejected_for_n_at_least_two() {
        let rho = ComplexMatrix::from_real_rows(&[&[0.75, 0.0], &[0.0, 0.25]]);
        assert!(matches!(universal_clone(&rho, 2, 3), Err(Error::MixedInput { n: 2, .. })));
    }

    #[test]
    fn sandwich_formula_loses_trace_on_mixed_n2() {
        // documents why mixed N >= 2 inputs are refused: trace (1 + Tr sigma^2)/2
        let sigma = ComplexMatrix::from_real_rows(&[&[0.75, 0.0], &[0.0, 0.25]]);
        let input = tensor_all([&sigma, &sigma, &ComplexMatrix::identity(2)]);
        let s = symmetric_projector(3).unwrap();
        let joint = (&(&s * &input) * &s).scale_real(3.0 / 4.0);
        let p = 0.75f64.powi(2) + 0.25f64.powi(2);
        assert!((joint.trace().re - (1.0 + p) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn bad_shapes() {
        let zero = Ket::basis(2, 0).density();
        assert!(universal_clone(&zero, 2, 2).is_err());
        assert!(universal_clone(&zero, 0, 2).is_err());
        assert!(universal_clone(&zero, 1, 9).is_err());
        assert!(universal_clone(&ComplexMatrix::identity(2), 1, 2).is_err());
        let out = universal_clone(&zero, 1, 2).unwrap();
        assert!(measured_clone_fidelity(&out, &Ket::basis(2, 0), 2).is_err());
        assert!(measured_clone_fidelity(&out, &Ket::basis(4, 0), 0).is_err());
    }

    #[test]
    fn output_is_symmetric_and_positive() {
        let psi = Ket::new(vec![C64::new(0.2, -0.5), re(0.8)]).unwrap();
        for (n, m) in [(1, 2), (1, 4), (2, 4), (3, 5)] {
            let out = universal_clone(&psi.density(), n, m).unwrap();
            let s = symmetric_projector(m).unwrap();
            assert!((&(&s * &out.joint) * &s).approx_eq(&out.joint, 1e-10));
            assert!(hermitian_eigensystem(&out.joint).unwrap().min_value() > -1e-10);
            assert!((out.joint.trace().re - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn formula_values() {
        assert!((universal_fidelity_formula(1).unwrap() - 5.0 / 6.0).abs() < 1e-15);
        assert!((universal_fidelity_formula(2).unwrap() - 11.0 / 12.0).abs() < 1e-15);
        assert!((universal_fidelity_formula(9).unwrap() - (1.0 - 1.0 / 110.0)).abs() < 1e-15);
        assert!(universal_fidelity_formula(0).is_err());
        let mut prev = 0.0;
        for n in 1..=200 {
            let f = universal_fidelity_formula(n).unwrap();
            assert!(f > prev && f < 1.0);
            prev = f;
        }
        assert!(1.0 - prev < 1e-4);
    }

    /// Direct evaluation with explicitly written binomials, independent of `pc_ratio`.
    fn pc_oracle(n: usize, anchored: bool) -> f64 {
        let c = |n: usize, k: usize| -> f64 {
            let mut v = 1.0;
            for i in 0..k {
                v *= (n - i) as f64 / (i + 1) as f64;
            }
            v
        };
        let num: f64 = (0..n).map(|i| (c(n, i) * c(n, i + 1)).sqrt()).sum();
        let den: f64 = (0..=n).map(|j| (c(n + 1, j) * c(n + 1, j + 1)).sqrt()).sum();
        if anchored {
            0.5 + num / den
        } else {
            2.0 * num / den
        }
    }

    #[test]
    fn pc_bound_values() {
        let a1 = pc_upper_bound(1, PcVariant::Anchored).unwrap();
        assert!((a1 - (0.5 + (1.0f64 / 8.0).sqrt())).abs() < 1e-15);
        assert!((pc_upper_bound(1, PcVariant::AsPrinted).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        // (2 sqrt 2) / (3 + 2 sqrt 3) + 1/2
        let a2 = pc_upper_bound(2, PcVariant::Anchored).unwrap();
        assert!((a2 - 0.937_559_198_964_714).abs() < 1e-12);
        assert!(a2 > 11.0 / 12.0);
        for n in 1..=50 {
            for (v, anchored) in [(PcVariant::Anchored, true), (PcVariant::AsPrinted, false)] {
                assert!((pc_upper_bound(n, v).unwrap() - pc_oracle(n, anchored)).abs() < 1e-12);
            }
        }
        assert!(pc_upper_bound(0, PcVariant::Anchored).is_err());
    }

    #[test]
    fn anchored_bound_beats_universal() {
        for n in 1..=50 {
            assert!(pc_upper_bound(n, PcVariant::Anchored).unwrap() > universal_fidelity_formula(n).unwrap());
        }
    }

    #[test]
    fn table_rows() {
        let rows = figure2_table(20, PcVariant::Anchored).unwrap();
        assert_eq!(rows.len(), 20);
        assert!((rows[0].f_universal - 0.833_333_333).abs() < 1e-9);
        assert!((rows[0].f_pc_bound - 0.853_553_390).abs() < 1e-9);
        assert!((rows[19].f_universal - (1.0 - 1.0 / 462.0)).abs() < 1e-15);
        assert_eq!(first_ordering_violation(&rows), None);
        let printed = figure2_table(20, PcVariant::AsPrinted).unwrap();
        assert_eq!(first_ordering_violation(&printed), Some(1));
        assert!(figure2_table(0, PcVariant::Anchored).is_err());
        assert!(figure2_table(51, PcVariant::Anchored).is_err());
    }

    #[test]
    fn variant_parsing() {
        assert_eq!("anchored".parse::<PcVariant>().unwrap(), PcVariant::Anchored);
        assert_eq!("as-printed".parse::<PcVariant>().unwrap(), PcVariant::AsPrinted);
        assert!("other".parse::<PcVariant>().is_err());
        assert_eq!(PcVariant::AsPrinted.to_string(), "as-printed");
    }
}
