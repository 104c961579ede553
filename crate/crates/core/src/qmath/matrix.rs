use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch { rows, cols, got: data.len() });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from real row slices. Panics on ragged input; meant for literals.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix literal");
            data.extend(row.iter().map(|&x| re(x)));
        }
        Self { rows: r, cols: c, data }
    }

    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix literal");
            data.extend_from_slice(row);
        }
        Self { rows: r, cols: c, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m.data[i * n + i] = re(v);
        }
        m
    }

    /// `|a><b|` for two vectors of amplitudes.
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        let mut m = Self::zeros(a.len(), b.len());
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                m.data[i * b.len() + j] = ai * bj.conj();
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub(crate) fn square_dim(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare { rows: self.rows, cols: self.cols })
        }
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.data[j * self.rows + i] = self.data[i * self.cols + j].conj();
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn scale(&self, k: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * k).collect() }
    }

    pub fn scale_real(&self, k: f64) -> Self {
        self.scale(re(k))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self.data[i * self.cols + i]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self.data[i * n + j] - self.data[j * n + i].conj()).norm());
            }
        }
        dev
    }

    /// Deviation of `U^dag U` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.adjoint().matmul(self).max_abs_diff(&Self::identity(self.rows))
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let (n, k, m) = (self.rows, self.cols, rhs.cols);
        let mut out = vec![ZERO; n * m];
        for i in 0..n {
            let row = &mut out[i * m..(i + 1) * m];
            for p in 0..k {
                let a = self.data[i * k + p];
                if a == ZERO {
                    continue;
                }
                let rrow = &rhs.data[p * m..(p + 1) * m];
                for (o, b) in row.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        Self { rows: n, cols: m, data: out }
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Kronecker product, `self` as the major factor.
    pub fn tensor(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut data = vec![ZERO; rows * cols];
        for i1 in 0..self.rows {
            for j1 in 0..self.cols {
                let a = self.data[i1 * self.cols + j1];
                if a == ZERO {
                    continue;
                }
                for i2 in 0..other.rows {
                    let r = i1 * other.rows + i2;
                    for j2 in 0..other.cols {
                        let c = j1 * other.cols + j2;
                        data[r * cols + c] = a * other.data[i2 * other.cols + j2];
                    }
                }
            }
        }
        Self { rows, cols, data }
    }

    /// Reduced operator on the factors listed in `keep`, in their original relative order.
    pub fn partial_trace(&self, factor_dims: &[usize], keep: &[usize]) -> Result<Self> {
        let dim = self.square_dim()?;
        let total: usize = factor_dims.iter().product();
        if total != dim {
            return Err(Error::DimensionMismatch { expected: total, got: dim });
        }
        if keep.is_empty() {
            return Err(Error::EmptyKeepSet);
        }
        let mut kept = vec![false; factor_dims.len()];
        for &k in keep {
            if k >= factor_dims.len() {
                return Err(Error::FactorOutOfRange { index: k, count: factor_dims.len() });
            }
            if kept[k] {
                return Err(Error::InvalidParameter(format!("factor {k} kept twice")));
            }
            kept[k] = true;
        }

        // split every full index into (kept multi-index, traced multi-index)
        let mut kept_of = vec![0usize; dim];
        let mut traced_of = vec![0usize; dim];
        for (full, (ko, to)) in kept_of.iter_mut().zip(traced_of.iter_mut()).enumerate() {
            let mut rem = full;
            let mut digits = vec![0usize; factor_dims.len()];
            for f in (0..factor_dims.len()).rev() {
                digits[f] = rem % factor_dims[f];
                rem /= factor_dims[f];
            }
            let (mut k_idx, mut t_idx) = (0usize, 0usize);
            for (f, &d) in digits.iter().enumerate() {
                if kept[f] {
                    k_idx = k_idx * factor_dims[f] + d;
                } else {
                    t_idx = t_idx * factor_dims[f] + d;
                }
            }
            *ko = k_idx;
            *to = t_idx;
        }

        let out_dim: usize = keep.iter().map(|&k| factor_dims[k]).product();
        let mut out = Self::zeros(out_dim, out_dim);
        for r in 0..dim {
            for c in 0..dim {
                if traced_of[r] == traced_of[c] {
                    out.data[kept_of[r] * out_dim + kept_of[c]] += self.data[r * dim + c];
                }
            }
        }
        Ok(out)
    }

    /// `O rho O^dag` with `op` acting on `targets` of an `n`-qubit register (qubit 0 most significant).
    ///
    /// `op` need not be unitary; the result is not renormalized.
    #[allow(clippy::needless_range_loop)]
    pub fn sandwich(&self, op: &Self, targets: &[usize], n: usize) -> Result<Self> {
        let dim = self.square_dim()?;
        if dim != 1 << n {
            return Err(Error::DimensionMismatch { expected: 1 << n, got: dim });
        }
        check_targets(targets, n)?;
        let k = targets.len();
        let sub_dim = 1usize << k;
        if op.rows != sub_dim || op.cols != sub_dim {
            return Err(Error::DimensionMismatch { expected: sub_dim, got: op.rows.max(op.cols) });
        }

        let place: Vec<usize> = (0..sub_dim)
            .map(|s| {
                targets.iter().enumerate().fold(0usize, |acc, (pos, &q)| {
                    if (s >> (k - 1 - pos)) & 1 == 1 {
                        acc | 1 << (n - 1 - q)
                    } else {
                        acc
                    }
                })
            })
            .collect();
        let mask = place[sub_dim - 1];
        let sub_of: Vec<usize> =
            (0..dim).map(|r| targets.iter().fold(0usize, |acc, &q| (acc << 1) | ((r >> (n - 1 - q)) & 1))).collect();

        // left multiply
        let mut left = vec![ZERO; dim * dim];
        for r in 0..dim {
            let rest = r & !mask;
            let sr = sub_of[r];
            for s in 0..sub_dim {
                let o = op.data[sr * sub_dim + s];
                if o == ZERO {
                    continue;
                }
                let src = (rest | place[s]) * dim;
                let dst = r * dim;
                for c in 0..dim {
                    left[dst + c] += o * self.data[src + c];
                }
            }
        }
        // right multiply by op^dag
        let mut out = vec![ZERO; dim * dim];
        for c in 0..dim {
            let rest = c & !mask;
            let sc = sub_of[c];
            for s in 0..sub_dim {
                let o = op.data[sc * sub_dim + s].conj();
                if o == ZERO {
                    continue;
                }
                let src_col = rest | place[s];
                for r in 0..dim {
                    out[r * dim + c] += left[r * dim + src_col] * o;
                }
            }
        }
        Ok(Self { rows: dim, cols: dim, data: out })
    }

    /// Reorders qubits so that output qubit `i` is input qubit `order[i]`.
    pub fn permute_qubits(&self, order: &[usize], n: usize) -> Result<Self> {
        let dim = self.square_dim()?;
        if dim != 1 << n {
            return Err(Error::DimensionMismatch { expected: 1 << n, got: dim });
        }
        if order.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: order.len() });
        }
        check_targets(order, n)?;
        let map: Vec<usize> = (0..dim)
            .map(|out_idx| {
                let mut in_idx = 0usize;
                for (i, &src) in order.iter().enumerate() {
                    if (out_idx >> (n - 1 - i)) & 1 == 1 {
                        in_idx |= 1 << (n - 1 - src);
                    }
                }
                in_idx
            })
            .collect();
        let mut out = Self::zeros(dim, dim);
        for r in 0..dim {
            for c in 0..dim {
                out.data[r * dim + c] = self.data[map[r] * dim + map[c]];
            }
        }
        Ok(out)
    }
}

pub(crate) fn check_targets(targets: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    for &t in targets {
        if t >= n {
            return Err(Error::QubitOutOfRange { index: t, n });
        }
        if seen[t] {
            return Err(Error::DuplicateQubit { index: t });
        }
        seen[t] = true;
    }
    Ok(())
}

/// Kronecker product of two matrices.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.tensor(b)
}

/// Kronecker product of a non-empty list of matrices, left to right.
pub fn tensor_all<'a, I: IntoIterator<Item = &'a ComplexMatrix>>(factors: I) -> ComplexMatrix {
    factors
        .into_iter()
        .fold(None::<ComplexMatrix>, |acc, m| Some(acc.map_or_else(|| m.clone(), |a| a.tensor(m))))
        .expect("tensor_all needs at least one factor")
}

pub fn partial_trace(rho: &ComplexMatrix, factor_dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    rho.partial_trace(factor_dims, keep)
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        &mut self.data[r * self.cols + c]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "add shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "sub shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self.data[r * self.cols + c];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Normalized state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket {
    amps: Vec<C64>,
}

impl Ket {
    /// Normalizes `amps`; rejects zero or non-finite vectors.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(Self { amps: amps.into_iter().map(|z| z / norm).collect() })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(amps.iter().map(|&x| re(x)).collect())
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index out of range");
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Ket) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn density(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amps, &self.amps)
    }

    pub fn tensor(&self, other: &Ket) -> Ket {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ket { amps }
    }

    /// Applies a matrix and renormalizes.
    pub fn apply(&self, m: &ComplexMatrix) -> Result<Ket> {
        if m.cols() != self.dim() {
            return Err(Error::DimensionMismatch { expected: m.cols(), got: self.dim() });
        }
        Ket::new(m.mul_vec(&self.amps))
    }
}
