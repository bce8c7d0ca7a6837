//! Dense complex linear algebra.
//!
//! [`ComplexMatrix`] wraps an `nalgebra` dense matrix and exposes the small
//! surface the simulator needs: products, adjoints, Kronecker products,
//! Hermitian eigendecomposition and Haar-random unitaries. Matrices are
//! dense; the supported envelope is dimension up to 2^10.

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::rng::SeedStream;

pub type C64 = Complex64;

/// Default absolute tolerance for all approximate comparisons.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Largest supported Hilbert-space dimension.
pub const MAX_DIM: usize = 1 << 10;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    /// Builds a matrix from entries listed row by row.
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if rows * cols != entries.len() {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: entries.len(),
            });
        }
        Ok(Self(DMatrix::from_row_slice(rows, cols, &entries)))
    }

    /// Convenience constructor for small literal matrices of real numbers.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Self(DMatrix::from_fn(r, c, |i, j| c64(rows[i][j], 0.0)))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(DMatrix::from_fn(rows, cols, f))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { C64::new(0.0, 0.0) })
    }

    /// Outer product `|a⟩⟨b|`.
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        Self::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
    }

    pub fn from_nalgebra(m: DMatrix<C64>) -> Self {
        Self(m)
    }

    pub fn as_nalgebra(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_nalgebra(self) -> DMatrix<C64> {
        self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.0[(r, c)]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        self.0[(r, c)] = v;
    }

    pub fn to_row_major(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                out.push(self.get(r, c));
            }
        }
        out
    }

    pub fn dagger(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0)
    }

    /// `u · self · u†`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        Self(&u.0 * &self.0 * u.0.adjoint())
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        (0..self.rows())
            .map(|r| (0..self.cols()).map(|c| self.get(r, c) * v[c]).sum())
            .collect()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.0.shape(), other.0.shape(), "shape mismatch");
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Tolerance-based equality; shapes must agree.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.0.shape() == other.0.shape() && self.max_abs_diff(other) <= tol
    }

    /// `max |m - m†|`, or infinity for non-square input.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows();
        let mut dev = 0.0f64;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        dev
    }

    pub fn frobenius_inner(&self, other: &Self) -> C64 {
        // Tr(self† other)
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
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
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

/// Kronecker product `a ⊗ b`; `a` is the more significant (leftmost) factor.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix(a.0.kronecker(&b.0))
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues, sorted descending.
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        (0..self.vectors.rows())
            .map(|r| self.vectors.get(r, k))
            .collect()
    }

    /// `V diag(λ) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d: Vec<C64> = self.values.iter().map(|&v| c64(v, 0.0)).collect();
        ComplexMatrix::from_diagonal(&d).conjugate_by(&self.vectors)
    }
}

/// Eigendecomposition of a Hermitian matrix (deterministic for a fixed input).
pub fn hermitian_eig(m: &ComplexMatrix, tol: f64) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let deviation = m.hermitian_deviation();
    if deviation > tol {
        return Err(Error::NotHermitian { deviation, tol });
    }
    let sym = (&m.0 + m.0.adjoint()) * c64(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let n = m.rows();
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

/// True iff `max |m†m - I| <= tol`.
pub fn is_unitary(m: &ComplexMatrix, tol: f64) -> bool {
    if !m.is_square() {
        return false;
    }
    let prod = m.dagger().matmul(m);
    prod.max_abs_diff(&ComplexMatrix::identity(m.rows())) <= tol
}

/// Samples a `d × d` unitary from the Haar measure.
///
/// Draws a matrix of i.i.d. standard complex Gaussians, takes its QR
/// factorization and multiplies `Q` by the phases of `diag(R)`, which makes the
/// distribution exactly Haar.
pub fn haar_unitary(d: usize, rng: &mut SeedStream) -> ComplexMatrix {
    assert!(d >= 1, "dimension must be positive");
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut z = DMatrix::<C64>::zeros(d, d);
    // fill row-major so the draw order is independent of storage layout
    for r in 0..d {
        for c in 0..d {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            z[(r, c)] = c64(re * scale, im * scale);
        }
    }
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for c in 0..d {
        let rc = r[(c, c)];
        let n = rc.norm();
        let phase = if n > 0.0 { rc / n } else { c64(1.0, 0.0) };
        for row in 0..d {
            q[(row, c)] *= phase;
        }
    }
    ComplexMatrix(q)
}

/// Embeds a `2^k × 2^k` operator acting on `targets` into an `n_qubits`
/// register, with identity on the other qubits.
///
/// Qubit 0 is the leftmost Kronecker factor, i.e. the most significant bit of
/// a basis index. `targets[0]` is the most significant qubit of `op`.
pub fn embed_operator(op: &ComplexMatrix, targets: &[usize], n_qubits: usize) -> Result<ComplexMatrix> {
    let k = targets.len();
    if op.rows() != 1 << k || op.cols() != 1 << k {
        return Err(Error::DimensionMismatch {
            expected: 1 << k,
            got: op.rows(),
        });
    }
    check_targets(targets, n_qubits)?;
    let dim = 1usize << n_qubits;
    if dim > MAX_DIM {
        return Err(Error::TooLarge(dim));
    }
    let shifts: Vec<usize> = targets.iter().map(|&t| n_qubits - 1 - t).collect();
    let target_mask: usize = shifts.iter().map(|&s| 1usize << s).sum();
    let local = |idx: usize| -> usize {
        shifts
            .iter()
            .fold(0usize, |acc, &s| (acc << 1) | ((idx >> s) & 1))
    };
    let mut out = DMatrix::<C64>::zeros(dim, dim);
    for i in 0..dim {
        let li = local(i);
        let rest = i & !target_mask;
        for lj in 0..(1usize << k) {
            let v = op.get(li, lj);
            if v.norm_sqr() == 0.0 {
                continue;
            }
            let mut j = rest;
            for (pos, &s) in shifts.iter().enumerate() {
                if (lj >> (k - 1 - pos)) & 1 == 1 {
                    j |= 1 << s;
                }
            }
            out[(i, j)] = v;
        }
    }
    Ok(ComplexMatrix(out))
}

pub(crate) fn check_targets(targets: &[usize], n_qubits: usize) -> Result<()> {
    for (i, &t) in targets.iter().enumerate() {
        if t >= n_qubits {
            return Err(Error::TargetOutOfRange { target: t, n_qubits });
        }
        if targets[..i].contains(&t) {
            return Err(Error::DuplicateTarget(t));
        }
    }
    Ok(())
}

/// Single-qubit gate matrices used across the crate.
pub mod gates {
    use super::{c64, ComplexMatrix};

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    pub fn y() -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(2, 2);
        m.set(0, 1, c64(0.0, -1.0));
        m.set(1, 0, c64(0.0, 1.0));
        m
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])
    }

    pub fn hadamard() -> ComplexMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix::from_real_rows(&[&[s, s], &[s, -s]])
    }

    pub fn s() -> ComplexMatrix {
        let mut m = ComplexMatrix::identity(2);
        m.set(1, 1, c64(0.0, 1.0));
        m
    }

    pub fn s_dagger() -> ComplexMatrix {
        s().dagger()
    }

    /// `exp(-iθX/2)`.
    pub fn rx(theta: f64) -> ComplexMatrix {
        let (s, c) = (theta / 2.0).sin_cos();
        let mut m = ComplexMatrix::zeros(2, 2);
        m.set(0, 0, c64(c, 0.0));
        m.set(1, 1, c64(c, 0.0));
        m.set(0, 1, c64(0.0, -s));
        m.set(1, 0, c64(0.0, -s));
        m
    }

    /// `exp(-iθZ/2)`.
    pub fn rz(theta: f64) -> ComplexMatrix {
        let (s, c) = (theta / 2.0).sin_cos();
        let mut m = ComplexMatrix::zeros(2, 2);
        m.set(0, 0, c64(c, -s));
        m.set(1, 1, c64(c, s));
        m
    }

    /// CNOT with the control as the most significant qubit.
    pub fn cnot() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
            &[0.0, 0.0, 1.0, 0.0],
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::gates::*;
    use super::*;

    fn rho_d_qubit() -> ComplexMatrix {
        // q|0><0| + (1-q) I/2 with q = -1/3
        let q = -1.0 / 3.0;
        ComplexMatrix::from_real_rows(&[&[q + (1.0 - q) / 2.0, 0.0], &[0.0, (1.0 - q) / 2.0]])
    }

    #[test]
    fn kron_identity_and_dims() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
        let k = kron(&i2, &ComplexMatrix::identity(3));
        assert_eq!((k.rows(), k.cols()), (6, 6));
    }

    #[test]
    fn kron_x_z_block_structure() {
        let k = kron(&x(), &z());
        let zero = ComplexMatrix::zeros(2, 2);
        let zz = z();
        for (bi, bj, blk) in [(0, 0, &zero), (0, 1, &zz), (1, 0, &zz), (1, 1, &zero)] {
            for i in 0..2 {
                for j in 0..2 {
                    assert_eq!(k.get(2 * bi + i, 2 * bj + j), blk.get(i, j));
                }
            }
        }
    }

    #[test]
    fn kron_is_associative_exactly() {
        let a = rx(0.3);
        let b = hadamard();
        let c = rz(1.1);
        assert_eq!(kron(&kron(&a, &b), &c), kron(&a, &kron(&b, &c)));
    }

    #[test]
    fn pauli_spectra() {
        let e = hermitian_eig(&z(), DEFAULT_TOL).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-12 && (e.values[1] + 1.0).abs() < 1e-12);
        let e = hermitian_eig(&x(), DEFAULT_TOL).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-12 && (e.values[1] + 1.0).abs() < 1e-12);
        // +1 eigenvector is (|0> + |1>)/sqrt2 up to phase
        let v = e.vector(0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let ov = (v[0] * s + v[1] * s).norm();
        assert!((ov - 1.0).abs() < 1e-12);
        let v = e.vector(1);
        let ov = (v[0] * s - v[1] * s).norm();
        assert!((ov - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rho_d_spectrum_for_qubit() {
        let e = hermitian_eig(&rho_d_qubit(), DEFAULT_TOL).unwrap();
        assert!((e.values[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((e.values[1] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(hermitian_eig(&m, 1e-10), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eig_reconstructs_random_hermitian() {
        let mut rng = SeedStream::new(5, 0);
        for d in [2, 3, 8, 16] {
            let u = haar_unitary(d, &mut rng);
            let g = haar_unitary(d, &mut rng);
            let h = &u.matmul(&g) + &u.matmul(&g).dagger();
            let e = hermitian_eig(&h, DEFAULT_TOL).unwrap();
            assert!(e.reconstruct().approx_eq(&h, 1e-10));
            assert!(is_unitary(&e.vectors, 1e-10));
            assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn eig_is_deterministic() {
        let mut rng = SeedStream::new(9, 0);
        let u = haar_unitary(6, &mut rng);
        let h = &u + &u.dagger();
        let a = hermitian_eig(&h, DEFAULT_TOL).unwrap();
        let b = hermitian_eig(&h, DEFAULT_TOL).unwrap();
        assert_eq!(a.values, b.values);
        assert_eq!(a.vectors, b.vectors);
    }

    #[test]
    fn unitarity_checks() {
        assert!(is_unitary(&ComplexMatrix::identity(4), 1e-12));
        assert!(!is_unitary(&ComplexMatrix::identity(4).scale_real(0.5), 1e-12));
        let mut rng = SeedStream::new(1, 2);
        for d in [2, 4, 8, 32] {
            let u = haar_unitary(d, &mut rng);
            assert!(u.dagger().matmul(&u).max_abs_diff(&ComplexMatrix::identity(d)) < 1e-12);
            assert!(is_unitary(&u, 1e-10));
        }
    }

    #[test]
    fn haar_is_deterministic() {
        let a = haar_unitary(4, &mut SeedStream::new(3, 1));
        let b = haar_unitary(4, &mut SeedStream::new(3, 1));
        assert_eq!(a, b);
        let c = haar_unitary(4, &mut SeedStream::new(3, 2));
        assert_ne!(a, c);
    }

    #[test]
    fn embed_matches_kron_for_adjacent_targets() {
        let op = kron(&x(), &z());
        let full = embed_operator(&op, &[1, 2], 3).unwrap();
        let expected = kron(&ComplexMatrix::identity(2), &op);
        assert_eq!(full, expected);
        let full = embed_operator(&x(), &[0], 2).unwrap();
        assert_eq!(full, kron(&x(), &ComplexMatrix::identity(2)));
    }

    #[test]
    fn embed_reversed_and_separated_targets() {
        // CNOT with control 1, target 0 on two qubits: |01> -> |11>
        let full = embed_operator(&cnot(), &[1, 0], 2).unwrap();
        assert_eq!(full.get(3, 1), c64(1.0, 0.0));
        assert_eq!(full.get(0, 0), c64(1.0, 0.0));
        // X on qubit 0, Z on qubit 2
        let full = embed_operator(&kron(&x(), &z()), &[0, 2], 3).unwrap();
        let expected = kron(&kron(&x(), &ComplexMatrix::identity(2)), &z());
        assert_eq!(full, expected);
    }

    #[test]
    fn embed_rejects_bad_targets() {
        assert!(matches!(
            embed_operator(&x(), &[2], 2),
            Err(Error::TargetOutOfRange { .. })
        ));
        assert!(matches!(
            embed_operator(&cnot(), &[1, 1], 2),
            Err(Error::DuplicateTarget(1))
        ));
    }

    #[test]
    fn rotation_conventions() {
        assert!(rx(0.0).approx_eq(&ComplexMatrix::identity(2), 1e-15));
        // RX(pi) = -iX
        assert!(rx(std::f64::consts::PI).approx_eq(&x().scale(c64(0.0, -1.0)), 1e-15));
        assert!(rz(std::f64::consts::PI).approx_eq(&z().scale(c64(0.0, -1.0)), 1e-15));
    }
}
