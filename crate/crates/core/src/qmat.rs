//! Dense complex linear algebra for the small Hilbert spaces used here
//! (one to four qubits, so dimensions 2 through 16).
//!
//! Qubits are numbered from the most significant bit: in a 4-qubit register
//! basis index `0b1000` is `|1000⟩`, i.e. qubit 0 is in state `|1⟩`.
//!
//! The Hermitian eigensolver is a cyclic complex Jacobi sweep. Everything else
//! that needs a spectral function (matrix exponential, square root, fidelity,
//! PSD repair) is built on top of it.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Largest supported Hilbert-space dimension (four qubits).
pub const MAX_DIM: usize = 16;

const JACOBI_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 64;
const HERMITIAN_TOL: f64 = 1e-10;

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:>9.5}{:+.5}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from nested rows. Panics on ragged input.
    pub fn from_rows<R: AsRef<[C64]>>(rows: &[R]) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(n * m);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), m, "ragged rows");
            data.extend_from_slice(r);
        }
        Self {
            rows: n,
            cols: m,
            data,
        }
    }

    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn diag(entries: &[C64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn real_diag(entries: &[f64]) -> Self {
        let e: Vec<C64> = entries.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::diag(&e)
    }

    /// Outer product |u⟩⟨v|.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |r, c| u[r] * v[c].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn matmul(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[r * rhs.cols..(r + 1) * rhs.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "matvec shape mismatch");
        (0..self.rows)
            .map(|r| {
                self.data[r * self.cols..(r + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn conj(&self) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn transpose(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> ComplexMatrix {
        self.scale(C64::new(s, 0.0))
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ‖M − M†‖_max
    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for r in 0..self.rows {
            for c in r..self.cols {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    /// ‖U†U − I‖_max
    pub fn unitarity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.adjoint()
            .matmul(self)
            .max_abs_diff(&ComplexMatrix::identity(self.rows))
    }

    /// (M + M†)/2
    pub fn hermitian_part(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.rows, self.cols, |r, c| {
            (self[(r, c)] + self[(c, r)].conj()) * 0.5
        })
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        kron(self, rhs)
    }

    pub fn commutator(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        &self.matmul(rhs) - &rhs.matmul(self)
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn determinant(&self) -> C64 {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = ONE;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| a[x * n + col].norm().total_cmp(&a[y * n + col].norm()))
                .unwrap();
            if a[pivot * n + col].norm() == 0.0 {
                return ZERO;
            }
            if pivot != col {
                for k in 0..n {
                    a.swap(pivot * n + k, col * n + k);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            for r in col + 1..n {
                let f = a[r * n + col] / p;
                for k in col..n {
                    let v = a[col * n + k];
                    a[r * n + k] -= f * v;
                }
            }
        }
        det
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        debug_assert!(r < self.rows && c < self.cols);
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
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
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
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Standard Kronecker product; dimensions multiply.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.rows * b.rows, a.cols * b.cols, |r, c| {
        a[(r / b.rows, c / b.cols)] * b[(r % b.rows, c % b.cols)]
    })
}

/// Single-qubit Pauli operators (σ₀ = I).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> ComplexMatrix {
        match self {
            Pauli::I => ComplexMatrix::identity(2),
            Pauli::X => ComplexMatrix::from_rows(&[[ZERO, ONE], [ONE, ZERO]]),
            Pauli::Y => ComplexMatrix::from_rows(&[[ZERO, -I], [I, ZERO]]),
            Pauli::Z => ComplexMatrix::from_rows(&[[ONE, ZERO], [ZERO, -ONE]]),
        }
    }

    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
}

/// σ_a ⊗ σ_b
pub fn pauli_pair(a: Pauli, b: Pauli) -> ComplexMatrix {
    kron(&a.matrix(), &b.matrix())
}

/// Number of qubits for a supported square dimension.
pub fn qubit_count(dim: usize) -> Result<usize> {
    if !(2..=MAX_DIM).contains(&dim) || !dim.is_power_of_two() {
        return Err(Error::Dimension(format!(
            "dimension {dim} is not a supported qubit register (2..=16, power of two)"
        )));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Bit mask of `qubit` in an `n`-qubit register (qubit 0 is the most significant bit).
#[inline]
pub(crate) fn qubit_mask(n: usize, qubit: usize) -> usize {
    1 << (n - 1 - qubit)
}

/// Basis indices touched by an operator on `qubits`, with the remaining bits taken from `base`.
/// Local index bit order follows the order of `qubits` (first listed is most significant).
fn local_indices(n: usize, qubits: &[usize], base: usize) -> [usize; 4] {
    let k = qubits.len();
    let mut out = [0usize; 4];
    for (local, slot) in out.iter_mut().enumerate().take(1 << k) {
        let mut idx = base;
        for (pos, &q) in qubits.iter().enumerate() {
            if local & (1 << (k - 1 - pos)) != 0 {
                idx |= qubit_mask(n, q);
            }
        }
        *slot = idx;
    }
    out
}

fn check_local(n: usize, op: &ComplexMatrix, qubits: &[usize]) -> Result<()> {
    let k = qubits.len();
    if !(1..=2).contains(&k) || op.rows != 1 << k || op.cols != 1 << k {
        return Err(Error::Dimension(format!(
            "local operator of size {}x{} on {} qubit(s)",
            op.rows, op.cols, k
        )));
    }
    if qubits.iter().any(|&q| q >= n) || (k == 2 && qubits[0] == qubits[1]) {
        return Err(Error::Dimension(format!(
            "qubits {qubits:?} invalid for a {n}-qubit register"
        )));
    }
    Ok(())
}

fn bases(n: usize, qubits: &[usize]) -> impl Iterator<Item = usize> {
    let mask: usize = qubits.iter().map(|&q| qubit_mask(n, q)).sum();
    (0..1usize << n).filter(move |i| i & mask == 0)
}

/// Full `2^n`-dimensional matrix of a 1- or 2-qubit operator acting on `qubits`.
pub fn embed_local(op: &ComplexMatrix, qubits: &[usize], n: usize) -> Result<ComplexMatrix> {
    check_local(n, op, qubits)?;
    let dim = 1 << n;
    let k = 1 << qubits.len();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for base in bases(n, qubits) {
        let idx = local_indices(n, qubits, base);
        for i in 0..k {
            for j in 0..k {
                out[(idx[i], idx[j])] = op[(i, j)];
            }
        }
    }
    Ok(out)
}

/// `ψ ← (op on qubits) ψ`, in place.
pub fn apply_local_vec(psi: &mut [C64], op: &ComplexMatrix, qubits: &[usize]) -> Result<()> {
    let n = qubit_count(psi.len())?;
    check_local(n, op, qubits)?;
    let k = 1 << qubits.len();
    for base in bases(n, qubits) {
        let idx = local_indices(n, qubits, base);
        let mut tmp = [ZERO; 4];
        for i in 0..k {
            tmp[i] = (0..k).map(|j| op[(i, j)] * psi[idx[j]]).sum();
        }
        for i in 0..k {
            psi[idx[i]] = tmp[i];
        }
    }
    Ok(())
}

/// `K ρ L†` for local operators `K`, `L` on the same qubits, without building full matrices.
pub fn sandwich_local(
    rho: &ComplexMatrix,
    left: &ComplexMatrix,
    right: &ComplexMatrix,
    qubits: &[usize],
) -> Result<ComplexMatrix> {
    let n = qubit_count(rho.rows)?;
    check_local(n, left, qubits)?;
    check_local(n, right, qubits)?;
    let dim = rho.rows;
    let k = 1 << qubits.len();
    let blocks: Vec<[usize; 4]> = bases(n, qubits)
        .map(|b| local_indices(n, qubits, b))
        .collect();

    // rows: tmp = K ρ
    let mut tmp = ComplexMatrix::zeros(dim, dim);
    for idx in &blocks {
        for col in 0..dim {
            for i in 0..k {
                let mut acc = ZERO;
                for j in 0..k {
                    acc += left[(i, j)] * rho[(idx[j], col)];
                }
                tmp[(idx[i], col)] = acc;
            }
        }
    }
    // cols: out = tmp L†
    let mut out = ComplexMatrix::zeros(dim, dim);
    for idx in &blocks {
        for row in 0..dim {
            for i in 0..k {
                let mut acc = ZERO;
                for j in 0..k {
                    acc += tmp[(row, idx[j])] * right[(i, j)].conj();
                }
                out[(row, idx[i])] = acc;
            }
        }
    }
    Ok(out)
}

/// Partial trace of a square matrix over every qubit not listed in `keep`.
/// The kept qubits appear in ascending order in the result.
pub fn partial_trace_matrix(m: &ComplexMatrix, keep: &[usize]) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::Dimension("partial trace of a non-square matrix".into()));
    }
    let n = qubit_count(m.rows)?;
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.is_empty() || keep.iter().any(|&q| q >= n) {
        return Err(Error::Dimension(format!(
            "cannot keep qubits {keep:?} of a {n}-qubit register"
        )));
    }
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let kd = 1 << keep.len();
    let td = 1 << traced.len();
    let compose = |kept_bits: usize, traced_bits: usize| -> usize {
        let mut idx = 0;
        for (pos, &q) in keep.iter().enumerate() {
            if kept_bits & (1 << (keep.len() - 1 - pos)) != 0 {
                idx |= qubit_mask(n, q);
            }
        }
        for (pos, &q) in traced.iter().enumerate() {
            if traced_bits & (1 << (traced.len() - 1 - pos)) != 0 {
                idx |= qubit_mask(n, q);
            }
        }
        idx
    };
    Ok(ComplexMatrix::from_fn(kd, kd, |r, c| {
        (0..td).map(|t| m[(compose(r, t), compose(c, t))]).sum()
    }))
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues, descending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// V f(Λ) V†
    pub fn map_spectrum(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let n = self.values.len();
        let fv: Vec<C64> = self.values.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |r, c| {
            (0..n)
                .map(|k| self.vectors[(r, k)] * fv[k] * self.vectors[(c, k)].conj())
                .sum()
        })
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        (0..self.values.len()).map(|r| self.vectors[(r, k)]).collect()
    }
}

/// Hermitian eigensolver (cyclic complex Jacobi).
///
/// Each rotation zeroes one off-diagonal pair `(p, q)` with the unitary
/// `[[c, s e^{iφ}], [−s e^{−iφ}, c]]` where `e^{iφ}` is the phase of `a_pq`.
/// Sweeps stop once the off-diagonal Frobenius norm drops below
/// `1e-13 · max(1, ‖A‖_F)`.
pub fn herm_eig(m: &ComplexMatrix) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(Error::Dimension("eigendecomposition of a non-square matrix".into()));
    }
    let scale = m.max_abs().max(1.0);
    let herr = m.hermiticity_error();
    if herr > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian(herr));
    }
    let n = m.rows;
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let threshold = JACOBI_TOL * a.frobenius_norm().max(1.0);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|r| (0..n).filter(move |&c| c != r).map(move |c| (r, c)))
            .map(|(r, c)| a[(r, c)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let g = a[(p, q)];
                let gabs = g.norm();
                if gabs <= f64::MIN_POSITIVE {
                    continue;
                }
                let phase = g / gabs;
                let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * gabs);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let j_pq = phase * s;
                let j_qp = -phase.conj() * s;

                // A ← A J
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c + akq * j_qp;
                    a[(k, q)] = akp * j_pq + akq * c;
                }
                // A ← J† A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c + aqk * j_qp.conj();
                    a[(q, k)] = apk * j_pq.conj() + aqk * c;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                // V ← V J
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c + vkq * j_qp;
                    v[(k, q)] = vkp * j_pq + vkq * c;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(y, y)].re.total_cmp(&a[(x, x)].re));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

/// Square root of a PSD matrix; negative eigenvalues (roundoff or shot noise) are clamped to 0.
pub fn sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = herm_eig(m)?;
    Ok(eig.map_spectrum(|l| C64::new(l.max(0.0).sqrt(), 0.0)))
}

/// Unitary checked against `‖U†U − I‖_max ≤ 1e-10`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix(ComplexMatrix);

impl UnitaryMatrix {
    pub const TOL: f64 = 1e-10;

    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        let err = mat.unitarity_error();
        if err > Self::TOL {
            return Err(Error::NotUnitary(err));
        }
        Ok(Self(mat))
    }

    pub(crate) fn new_unchecked(mat: ComplexMatrix) -> Self {
        debug_assert!(mat.unitarity_error() < 1e-8);
        Self(mat)
    }

    pub fn identity(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim))
    }

    pub fn mat(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_inner(self) -> ComplexMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn then(&self, next: &UnitaryMatrix) -> UnitaryMatrix {
        UnitaryMatrix(next.0.matmul(&self.0))
    }

    /// Distance to `other` after removing the best global phase, estimated from
    /// the largest-modulus entry of `other`.
    pub fn phase_distance(&self, other: &UnitaryMatrix) -> f64 {
        phase_aligned_distance(&self.0, &other.0)
    }
}

/// `min_γ ‖a − e^{iγ} b‖_max`, with γ fixed by the largest-|entry| of `b`.
pub fn phase_aligned_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let (k, _) = b
        .data
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
        .expect("empty matrix");
    if b.data[k].norm() == 0.0 || a.data[k].norm() == 0.0 {
        return a.max_abs_diff(b);
    }
    let ratio = a.data[k] / b.data[k];
    let phase = ratio / ratio.norm();
    a.max_abs_diff(&b.scale(phase))
}

/// `e^{−iht}` through the eigendecomposition of `h`.
pub fn expm_oracle(h: &ComplexMatrix, t: f64) -> Result<UnitaryMatrix> {
    let eig = herm_eig(h)?;
    let u = eig.map_spectrum(|l| C64::from_polar(1.0, -l * t));
    Ok(UnitaryMatrix(u))
}

/// A validated density matrix: Hermitian, unit trace, positive semi-definite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub const HERMITIAN_TOL: f64 = 1e-12;
    pub const TRACE_TOL: f64 = 1e-12;
    pub const PSD_TOL: f64 = 1e-10;

    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::Dimension("density matrix must be square".into()));
        }
        qubit_count(mat.rows)?;
        let herr = mat.hermiticity_error();
        if herr > Self::HERMITIAN_TOL {
            return Err(Error::NotHermitian(herr));
        }
        let tr = mat.trace();
        if (tr - ONE).norm() > Self::TRACE_TOL {
            return Err(Error::Trace(tr.re));
        }
        let min = herm_eig(&mat)?.values.last().copied().unwrap_or(0.0);
        if min < -Self::PSD_TOL {
            return Err(Error::NotPsd(min));
        }
        Ok(Self(mat.hermitian_part()))
    }

    /// Wraps a matrix produced by a trusted physical map (unitary conjugation, CPTP channel).
    pub(crate) fn from_trusted(mat: ComplexMatrix) -> Self {
        debug_assert!(mat.hermiticity_error() < 1e-9, "{mat:?}");
        debug_assert!((mat.trace() - ONE).norm() < 1e-9, "{mat:?}");
        Self(mat.hermitian_part())
    }

    /// |ψ⟩⟨ψ| for a (normalised internally) state vector.
    pub fn from_pure(psi: &[C64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::Dimension("zero state vector".into()));
        }
        let v: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        qubit_count(v.len())?;
        Ok(Self(ComplexMatrix::outer(&v, &v)))
    }

    pub fn basis_state(dim: usize, index: usize) -> Result<Self> {
        qubit_count(dim)?;
        if index >= dim {
            return Err(Error::Dimension(format!("basis index {index} >= {dim}")));
        }
        let mut m = ComplexMatrix::zeros(dim, dim);
        m[(index, index)] = ONE;
        Ok(Self(m))
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        qubit_count(dim)?;
        Ok(Self(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64)))
    }

    pub fn product(&self, other: &DensityMatrix) -> Result<Self> {
        let m = kron(&self.0, &other.0);
        qubit_count(m.rows)?;
        Ok(Self(m))
    }

    pub fn mat(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_inner(self) -> ComplexMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn n_qubits(&self) -> usize {
        self.0.rows.trailing_zeros() as usize
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.0[(r, c)]
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        Ok(Self(partial_trace_matrix(&self.0, keep)?.hermitian_part()))
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        herm_eig(&self.0)
            .expect("density matrix is Hermitian")
            .values
    }

    /// U ρ U†
    pub fn conjugate(&self, u: &UnitaryMatrix) -> Result<DensityMatrix> {
        if u.dim() != self.dim() {
            return Err(Error::Dimension(format!(
                "unitary of dim {} on state of dim {}",
                u.dim(),
                self.dim()
            )));
        }
        Ok(Self::from_trusted(
            u.mat().matmul(&self.0).matmul(&u.mat().adjoint()),
        ))
    }

    /// Tr(ρ O)
    pub fn expectation(&self, op: &ComplexMatrix) -> C64 {
        assert_eq!(op.rows, self.dim());
        let n = self.dim();
        (0..n)
            .flat_map(|r| (0..n).map(move |c| (r, c)))
            .map(|(r, c)| self.0[(r, c)] * op[(c, r)])
            .sum()
    }

    pub fn purity(&self) -> f64 {
        self.0.matmul(&self.0).trace().re
    }
}

/// Squared Uhlmann fidelity F = (Tr √(√ρ σ √ρ))².
///
/// Eigenvalues of √ρ σ √ρ below `1e-15` are treated as zero so that the
/// square root does not amplify roundoff on rank-deficient states.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Dimension(format!(
            "fidelity between dims {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let s = sqrt_psd(rho.mat())?;
    let m = s.matmul(sigma.mat()).matmul(&s).hermitian_part();
    let eig = herm_eig(&m)?;
    let root: f64 = eig
        .values
        .iter()
        .map(|&l| if l > 1e-15 { l.sqrt() } else { 0.0 })
        .sum();
    Ok((root * root).clamp(0.0, 1.0))
}

/// Trace distance ½‖ρ − σ‖₁.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Dimension("trace distance between different dims".into()));
    }
    let d = (rho.mat() - sigma.mat()).hermitian_part();
    Ok(0.5 * herm_eig(&d)?.values.iter().map(|l| l.abs()).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn kron_of_identities_and_z() {
        let i4 = kron(&Pauli::I.matrix(), &Pauli::I.matrix());
        assert_eq!(i4, ComplexMatrix::identity(4));
        let zz = pauli_pair(Pauli::Z, Pauli::Z);
        assert_eq!(zz, ComplexMatrix::real_diag(&[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn kron_x_y_is_antidiagonal() {
        // (σx)_{ac}(σy)_{bd} written out by hand
        let xy = pauli_pair(Pauli::X, Pauli::Y);
        let mut expect = ComplexMatrix::zeros(4, 4);
        expect[(0, 3)] = c(0.0, -1.0);
        expect[(1, 2)] = c(0.0, 1.0);
        expect[(2, 1)] = c(0.0, -1.0);
        expect[(3, 0)] = c(0.0, 1.0);
        assert_eq!(xy, expect);
    }

    #[test]
    fn partial_trace_examples() {
        let ket00 = DensityMatrix::basis_state(4, 0).unwrap();
        let r = ket00.partial_trace(&[1]).unwrap();
        assert!(r.mat().max_abs_diff(&ComplexMatrix::real_diag(&[1.0, 0.0])) < 1e-15);

        let s = FRAC_1_SQRT_2;
        let bell = DensityMatrix::from_pure(&[c(s, 0.0), ZERO, ZERO, c(s, 0.0)]).unwrap();
        let r = bell.partial_trace(&[1]).unwrap();
        assert!(r.mat().max_abs_diff(&ComplexMatrix::real_diag(&[0.5, 0.5])) < 1e-15);
    }

    #[test]
    fn partial_trace_keeps_requested_qubit_order() {
        // |0⟩⊗|1⟩: keeping qubit 0 gives |0⟩, keeping qubit 1 gives |1⟩
        let rho = DensityMatrix::basis_state(4, 0b01).unwrap();
        let q0 = rho.partial_trace(&[0]).unwrap();
        let q1 = rho.partial_trace(&[1]).unwrap();
        assert_eq!(q0.get(0, 0), ONE);
        assert_eq!(q1.get(1, 1), ONE);
    }

    #[test]
    fn partial_trace_rejects_bad_split() {
        let rho = DensityMatrix::maximally_mixed(4).unwrap();
        assert!(matches!(rho.partial_trace(&[2]), Err(Error::Dimension(_))));
        assert!(matches!(rho.partial_trace(&[]), Err(Error::Dimension(_))));
    }

    #[test]
    fn herm_eig_simple_cases() {
        let e = herm_eig(&ComplexMatrix::real_diag(&[3.0, 1.0])).unwrap();
        assert_eq!(e.values, vec![3.0, 1.0]);
        assert!(e.vectors.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);

        let e = herm_eig(&Pauli::X.matrix()).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14 && (e.values[1] + 1.0).abs() < 1e-14);
        let v0 = e.vector(0);
        // (1,1)/√2 up to phase
        assert!(((v0[0] / v0[1]) - ONE).norm() < 1e-12);
        let v1 = e.vector(1);
        assert!(((v1[0] / v1[1]) + ONE).norm() < 1e-12);
    }

    #[test]
    fn herm_eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[[1.0, 2.0], [0.0, 1.0]]);
        assert!(matches!(herm_eig(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn herm_eig_reconstructs_complex_matrix() {
        let m = ComplexMatrix::from_rows(&[
            [c(2.0, 0.0), c(0.3, 0.7), c(-1.0, 0.2)],
            [c(0.3, -0.7), c(-1.0, 0.0), c(0.0, 0.5)],
            [c(-1.0, -0.2), c(0.0, -0.5), c(0.5, 0.0)],
        ]);
        let e = herm_eig(&m).unwrap();
        let back = e.map_spectrum(|l| c(l, 0.0));
        assert!(back.max_abs_diff(&m) < 1e-12);
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        assert!(e.vectors.unitarity_error() < 1e-12);
    }

    #[test]
    fn expm_of_zero_and_z() {
        let u = expm_oracle(&ComplexMatrix::zeros(4, 4), 1.3).unwrap();
        assert!(u.mat().max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
        let t = 0.7;
        let u = expm_oracle(&Pauli::Z.matrix(), t).unwrap();
        let expect = ComplexMatrix::diag(&[C64::from_polar(1.0, -t), C64::from_polar(1.0, t)]);
        assert!(u.mat().max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn fidelity_examples() {
        let a = DensityMatrix::basis_state(4, 0).unwrap();
        let b = DensityMatrix::basis_state(4, 3).unwrap();
        assert!((fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        assert!(fidelity(&a, &b).unwrap().abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(4).unwrap();
        let psi = DensityMatrix::from_pure(&[c(0.5, 0.0), c(0.0, 0.5), c(-0.5, 0.0), c(0.5, 0.0)])
            .unwrap();
        assert!((fidelity(&mixed, &psi).unwrap() - 0.25).abs() < 1e-12);
        assert!((fidelity(&psi, &mixed).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn density_matrix_validation() {
        let bad = ComplexMatrix::real_diag(&[1.1, -0.1]);
        assert!(matches!(DensityMatrix::new(bad), Err(Error::NotPsd(_))));
        let bad = ComplexMatrix::real_diag(&[0.5, 0.4]);
        assert!(matches!(DensityMatrix::new(bad), Err(Error::Trace(_))));
        let bad = ComplexMatrix::from_rows(&[[c(0.5, 0.0), c(0.1, 0.0)], [ZERO, c(0.5, 0.0)]]);
        assert!(matches!(DensityMatrix::new(bad), Err(Error::NotHermitian(_))));
        let bad = ComplexMatrix::real_diag(&[0.5, 0.25, 0.25]);
        assert!(matches!(DensityMatrix::new(bad), Err(Error::Dimension(_))));
    }

    #[test]
    fn local_application_matches_embedding() {
        let h = ComplexMatrix::from_rows(&[[c(0.6, 0.0), c(0.0, -0.8)], [c(0.0, -0.8), c(0.6, 0.0)]]);
        let cx = ComplexMatrix::from_real_rows(&[
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, 1.0, 0.0],
        ]);
        let rho = ComplexMatrix::from_fn(8, 8, |r, col| c((r * 8 + col) as f64, r as f64 - col as f64));
        for (op, qubits) in [(&h, vec![1]), (&cx, vec![2, 0]), (&cx, vec![0, 1])] {
            let full = embed_local(op, &qubits, 3).unwrap();
            let expect = full.matmul(&rho).matmul(&full.adjoint());
            let got = sandwich_local(&rho, op, op, &qubits).unwrap();
            assert!(got.max_abs_diff(&expect) < 1e-10);

            let psi: Vec<C64> = (0..8).map(|k| c(k as f64, 1.0 - k as f64)).collect();
            let mut v = psi.clone();
            apply_local_vec(&mut v, op, &qubits).unwrap();
            let w = full.matvec(&psi);
            assert!(v.iter().zip(&w).all(|(a, b)| (a - b).norm() < 1e-12));
        }
    }

    #[test]
    fn determinant_of_permutation_and_diag() {
        let swap = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]]);
        assert!((swap.determinant() + ONE).norm() < 1e-15);
        let d = ComplexMatrix::diag(&[I, I, c(2.0, 0.0)]);
        assert!((d.determinant() - c(-2.0, 0.0)).norm() < 1e-15);
    }
}
