use crate::error::{Error, Result};

use super::matrix::{re, ComplexMatrix};

pub const MAX_PROJECTOR_QUBITS: usize = 12;

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Projector onto the symmetric subspace of `n` qubits.
///
/// Equal to the average of all `n!` qubit-permutation operators. Entry `(a, b)` of
/// that average counts the permutations carrying basis string `b` to `a`: zero
/// unless both strings have the same Hamming weight `k`, and `k!(n-k)!/n!`
/// otherwise, so the sum is evaluated per weight class instead of per permutation.
pub fn symmetric_projector(n: usize) -> Result<ComplexMatrix> {
    if !(1..=MAX_PROJECTOR_QUBITS).contains(&n) {
        return Err(Error::QubitCountOutOfRange { n, min: 1, max: MAX_PROJECTOR_QUBITS });
    }
    let dim = 1usize << n;
    let mut classes: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for idx in 0..dim {
        classes[idx.count_ones() as usize].push(idx);
    }
    let mut p = ComplexMatrix::zeros(dim, dim);
    for (k, members) in classes.iter().enumerate() {
        let w = re(1.0 / binomial(n, k) as f64);
        for &a in members {
            for &b in members {
                p[(a, b)] = w;
            }
        }
    }
    Ok(p)
}

/// Dimension of the symmetric subspace of `n` qubits.
pub fn symmetric_dim(n: usize) -> usize {
    n + 1
}
