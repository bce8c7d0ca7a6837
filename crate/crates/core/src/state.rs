//! Pure states, density matrices and their scalar functionals.

use crate::error::{Error, Result};
use crate::linalg::{c64, haar_unitary, hermitian_eig, ComplexMatrix, C64, DEFAULT_TOL, MAX_DIM};
use crate::rng::SeedStream;

/// Eigenvalues below this are treated as zero before taking logarithms.
pub const EIGEN_CLAMP: f64 = 1e-12;

/// An `N`-qubit register; `dim = 2^N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HilbertSpec {
    n_qubits: usize,
}

impl HilbertSpec {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::BadSpec("register needs at least one qubit".into()));
        }
        if (1usize << n_qubits.min(63)) > MAX_DIM || n_qubits >= 63 {
            return Err(Error::TooLarge(1usize << n_qubits.min(62)));
        }
        Ok(Self { n_qubits })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub(crate) fn ensure_same(&self, other: HilbertSpec) -> Result<()> {
        if *self != other {
            return Err(Error::SpaceMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    space: HilbertSpec,
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(space: HilbertSpec, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                got: amplitudes.len(),
            });
        }
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self { space, amplitudes })
    }

    /// Normalizes `amplitudes` first; fails only on a zero vector.
    pub fn normalized(space: HilbertSpec, mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::NotNormalized { norm_sqr: 0.0 });
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Self::new(space, amplitudes)
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(space: HilbertSpec, index: usize) -> Self {
        let mut amplitudes = vec![c64(0.0, 0.0); space.dim()];
        amplitudes[index] = c64(1.0, 0.0);
        Self { space, amplitudes }
    }

    /// `|0…0⟩`.
    pub fn zero(space: HilbertSpec) -> Self {
        Self::basis(space, 0)
    }

    pub(crate) fn from_raw(space: HilbertSpec, amplitudes: Vec<C64>) -> Self {
        Self { space, amplitudes }
    }

    /// Haar-random pure state: first column of a Haar unitary.
    pub fn haar_random(space: HilbertSpec, rng: &mut SeedStream) -> Self {
        let u = haar_unitary(space.dim(), rng);
        Self::from_raw(space, (0..space.dim()).map(|i| u.get(i, 0)).collect())
    }

    pub fn space(&self) -> HilbertSpec {
        self.space
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn inner(&self, other: &PureState) -> Result<C64> {
        self.space.ensure_same(other.space)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            space: self.space,
            matrix: ComplexMatrix::outer(&self.amplitudes, &self.amplitudes),
        }
    }
}

/// Rank-1 projector of a normalized pure state.
pub fn density_from_pure(psi: &PureState) -> Result<DensityMatrix> {
    let norm_sqr: f64 = psi.amplitudes.iter().map(|a| a.norm_sqr()).sum();
    if (norm_sqr - 1.0).abs() > DEFAULT_TOL {
        return Err(Error::NotNormalized { norm_sqr });
    }
    Ok(psi.to_density())
}

/// `|⟨a|b⟩|`.
pub fn overlap(a: &PureState, b: &PureState) -> Result<f64> {
    Ok(a.inner(b)?.norm().min(1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    space: HilbertSpec,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity (tolerance 1e-10).
    pub fn new(space: HilbertSpec, matrix: ComplexMatrix) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(space, matrix)?;
        rho.check_invariants(DEFAULT_TOL)?;
        Ok(rho)
    }

    /// Only checks the shape. Used for simulator outputs whose validity
    /// follows from construction.
    pub fn from_matrix_unchecked(space: HilbertSpec, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.rows() != space.dim() || matrix.cols() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                got: matrix.rows(),
            });
        }
        Ok(Self { space, matrix })
    }

    pub fn maximally_mixed(space: HilbertSpec) -> Self {
        let d = space.dim();
        Self {
            space,
            matrix: ComplexMatrix::identity(d).scale_real(1.0 / d as f64),
        }
    }

    pub fn space(&self) -> HilbertSpec {
        self.space
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn check_invariants(&self, tol: f64) -> Result<()> {
        let dev = self.matrix.hermitian_deviation();
        if dev > tol {
            return Err(Error::InvalidDensityMatrix(format!("not Hermitian (deviation {dev:.3e})")));
        }
        let tr = self.matrix.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr}")));
        }
        let eig = hermitian_eig(&self.matrix, tol)?;
        let min = eig.values.last().copied().unwrap_or(0.0);
        if min < -tol {
            return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(())
    }

    /// Eigenvalues, descending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eig(&self.matrix, f64::INFINITY)
            .expect("square by construction")
            .values
    }

    /// `Tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        // Tr(ρ ρ) = Σ_ij ρ_ij ρ_ji = Σ_ij |ρ_ij|² for Hermitian ρ
        self.matrix.frobenius_inner(&self.matrix).re
    }

    /// `-Σ λ log_b λ`, with eigenvalues below [`EIGEN_CLAMP`] dropped.
    pub fn von_neumann_entropy(&self, log_base: f64) -> f64 {
        let ln_base = log_base.ln();
        let s: f64 = self
            .eigenvalues()
            .into_iter()
            .filter(|&l| l > EIGEN_CLAMP)
            .map(|l| -l * l.ln())
            .sum();
        (s / ln_base).max(0.0)
    }

    /// Trace distance `½‖ρ − σ‖₁`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        self.space.ensure_same(other.space)?;
        let diff = &self.matrix - &other.matrix;
        let eig = hermitian_eig(&diff, f64::INFINITY)?;
        Ok(0.5 * eig.values.iter().map(|l| l.abs()).sum::<f64>())
    }

    /// `a·self + b·other`; caller is responsible for the result being a state.
    pub(crate) fn affine(&self, a: f64, other: &DensityMatrix, b: f64) -> DensityMatrix {
        DensityMatrix {
            space: self.space,
            matrix: &self.matrix.scale_real(a) + &other.matrix.scale_real(b),
        }
    }
}

/// `Tr(ρ²)`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.purity()
}

pub fn von_neumann_entropy(rho: &DensityMatrix, log_base: f64) -> f64 {
    rho.von_neumann_entropy(log_base)
}
