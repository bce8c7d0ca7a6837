//! Pauli strings and real-weighted Pauli observables.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{c64, gates, kron, ComplexMatrix, C64};
use crate::state::{DensityMatrix, HilbertSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> ComplexMatrix {
        match self {
            Pauli::I => ComplexMatrix::identity(2),
            Pauli::X => gates::x(),
            Pauli::Y => gates::y(),
            Pauli::Z => gates::z(),
        }
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// A tensor product of single-qubit Paulis with phase +1; letter `k` acts on
/// qubit `k` (the leftmost Kronecker factor is qubit 0).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Self {
        Self { letters }
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self::new(vec![Pauli::I; n_qubits])
    }

    /// `pauli` on `qubit`, identity elsewhere.
    pub fn single(n_qubits: usize, qubit: usize, pauli: Pauli) -> Self {
        let mut letters = vec![Pauli::I; n_qubits];
        letters[qubit] = pauli;
        Self::new(letters)
    }

    /// All `4^n` strings in lexicographic order `I < X < Y < Z`, qubit 0 most significant.
    pub fn all(n_qubits: usize) -> Vec<PauliString> {
        (0..(1usize << (2 * n_qubits)))
            .map(|mut code| {
                let mut letters = vec![Pauli::I; n_qubits];
                for q in (0..n_qubits).rev() {
                    letters[q] = Pauli::ALL[code & 3];
                    code >>= 2;
                }
                Self::new(letters)
            })
            .collect()
    }

    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&p| p == Pauli::I)
    }

    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&p| p != Pauli::I).count()
    }

    /// Places this string's letters on `targets` of an `n_qubits` register.
    pub fn embed(&self, targets: &[usize], n_qubits: usize) -> Result<PauliString> {
        if targets.len() != self.n_qubits() {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits(),
                got: targets.len(),
            });
        }
        crate::linalg::check_targets(targets, n_qubits)?;
        let mut letters = vec![Pauli::I; n_qubits];
        for (&t, &p) in targets.iter().zip(&self.letters) {
            letters[t] = p;
        }
        Ok(Self::new(letters))
    }

    /// Dense `2^N × 2^N` realization.
    pub fn matrix(&self) -> ComplexMatrix {
        self.letters
            .iter()
            .fold(ComplexMatrix::identity(1), |acc, p| kron(&acc, &p.matrix()))
    }

    /// Monomial form: `P |j⟩ = phase[j] |j ^ flip_mask⟩`.
    ///
    /// Every Pauli string permutes basis states up to a phase, so applying it
    /// never needs a dense product.
    pub fn monomial(&self) -> (usize, Vec<C64>) {
        let n = self.n_qubits();
        let mut mask = 0usize;
        for (q, p) in self.letters.iter().enumerate() {
            if p.flips() {
                mask |= 1 << (n - 1 - q);
            }
        }
        let phases = (0..(1usize << n))
            .map(|j| {
                let mut ph = c64(1.0, 0.0);
                for (q, p) in self.letters.iter().enumerate() {
                    let bit = (j >> (n - 1 - q)) & 1;
                    match (p, bit) {
                        (Pauli::Z, 1) => ph = -ph,
                        // Y|0> = i|1>, Y|1> = -i|0>
                        (Pauli::Y, 0) => ph *= c64(0.0, 1.0),
                        (Pauli::Y, 1) => ph *= c64(0.0, -1.0),
                        _ => {}
                    }
                }
                ph
            })
            .collect();
        (mask, phases)
    }

    /// `P ρ P` on a raw matrix.
    pub fn conjugate(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let (mask, phases) = self.monomial();
        // (P m P)_{ij} = ph(i^x) m_{i^x, j^x} conj(ph(j^x))
        ComplexMatrix::from_fn(m.rows(), m.cols(), |i, j| {
            let (si, sj) = (i ^ mask, j ^ mask);
            phases[si] * m.get(si, sj) * phases[sj].conj()
        })
    }

    /// `Tr(P m)`.
    pub fn trace_with(&self, m: &ComplexMatrix) -> C64 {
        let (mask, phases) = self.monomial();
        // Tr(P m) = sum_j <j^x| P |j> ... = sum_j ph(j) m_{j, j^x}
        (0..m.rows()).map(|j| phases[j] * m.get(j, j ^ mask)).sum()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.letters {
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| Pauli::from_letter(c).ok_or_else(|| Error::InvalidArgument(format!("bad Pauli letter '{c}'"))))
            .collect::<Result<Vec<_>>>()?;
        if letters.is_empty() {
            return Err(Error::InvalidArgument("empty Pauli string".into()));
        }
        Ok(Self::new(letters))
    }
}

/// `Σ c_k P_k` with real coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    space: HilbertSpec,
    terms: Vec<(f64, PauliString)>,
}

impl Observable {
    pub fn new(space: HilbertSpec, terms: Vec<(f64, PauliString)>) -> Result<Self> {
        for (_, p) in &terms {
            if p.n_qubits() != space.n_qubits() {
                return Err(Error::SpaceMismatch {
                    left: space.n_qubits(),
                    right: p.n_qubits(),
                });
            }
        }
        Ok(Self { space, terms })
    }

    pub fn space(&self) -> HilbertSpec {
        self.space
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            space: self.space,
            terms: self.terms.iter().map(|(w, p)| (w * c, p.clone())).collect(),
        }
    }

    /// Coefficient of the all-identity string (summed over repeats).
    pub fn identity_coefficient(&self) -> f64 {
        self.terms
            .iter()
            .filter(|(_, p)| p.is_identity())
            .map(|(w, _)| w)
            .sum()
    }

    /// `Tr O = d · c_I`, computed without realizing the matrix.
    pub fn trace(&self) -> f64 {
        self.space.dim() as f64 * self.identity_coefficient()
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let d = self.space.dim();
        let mut m = ComplexMatrix::zeros(d, d);
        for (w, p) in &self.terms {
            let (mask, phases) = p.monomial();
            // P_{j^x, j} = phase[j]
            for j in 0..d {
                let i = j ^ mask;
                m.set(i, j, m.get(i, j) + phases[j] * *w);
            }
        }
        m
    }

    /// `Tr(O ρ)`.
    pub fn expectation(&self, rho: &DensityMatrix) -> Result<f64> {
        if rho.space() != self.space {
            return Err(Error::SpaceMismatch {
                left: self.space.n_qubits(),
                right: rho.space().n_qubits(),
            });
        }
        let z: C64 = self
            .terms
            .iter()
            .map(|(w, p)| p.trace_with(rho.matrix()) * *w)
            .sum();
        if z.im.abs() > 1e-8 {
            return Err(Error::NonHermitianResult { imag: z.im });
        }
        Ok(z.re)
    }
}

/// `Tr(O ρ)`; see [`Observable::expectation`].
pub fn expectation(obs: &Observable, rho: &DensityMatrix) -> Result<f64> {
    obs.expectation(rho)
}
