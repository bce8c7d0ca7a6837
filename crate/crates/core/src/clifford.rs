//! Enumeration of the one- and two-qubit Clifford groups (modulo global phase).
//!
//! Both groups are exact unitary 2-designs, which makes them the reference
//! frames for twirling.

use std::collections::HashMap;
use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::linalg::{embed_operator, gates, ComplexMatrix};

const KEY_SCALE: f64 = 1e6;

/// Group order modulo phases: 24 for one qubit, 11520 for two.
pub fn clifford_group_order(n_qubits: usize) -> Option<usize> {
    match n_qubits {
        1 => Some(24),
        2 => Some(11520),
        _ => None,
    }
}

/// All Clifford unitaries on `n_qubits ∈ {1, 2}`, one representative per
/// phase class, in breadth-first order from the identity.
pub fn clifford_group(n_qubits: usize) -> Result<Vec<ComplexMatrix>> {
    let order = clifford_group_order(n_qubits)
        .ok_or_else(|| Error::BadSpec(format!("Clifford enumeration supports 1 or 2 qubits, got {n_qubits}")))?;
    let mut generators = Vec::new();
    for q in 0..n_qubits {
        generators.push(embed_operator(&gates::hadamard(), &[q], n_qubits)?);
        generators.push(embed_operator(&gates::s(), &[q], n_qubits)?);
    }
    if n_qubits == 2 {
        generators.push(gates::cnot());
    }

    let dim = 1usize << n_qubits;
    let id = ComplexMatrix::identity(dim);
    let mut seen: HashMap<Vec<i64>, ()> = HashMap::new();
    let mut out = Vec::with_capacity(order);
    let mut queue = VecDeque::new();
    let (key, canon) = canonicalize(&id);
    seen.insert(key, ());
    out.push(canon.clone());
    queue.push_back(canon);
    while let Some(u) = queue.pop_front() {
        for g in &generators {
            let (key, canon) = canonicalize(&g.matmul(&u));
            if seen.insert(key, ()).is_none() {
                out.push(canon.clone());
                queue.push_back(canon);
            }
        }
    }
    debug_assert_eq!(out.len(), order);
    Ok(out)
}

// Fix the global phase so the first non-negligible entry is real positive.
fn canonicalize(u: &ComplexMatrix) -> (Vec<i64>, ComplexMatrix) {
    let entries = u.to_row_major();
    let pivot = entries
        .iter()
        .find(|z| z.norm() > 1e-6)
        .copied()
        .expect("unitary has a nonzero entry");
    let phase = pivot.conj() / pivot.norm();
    let canon = u.scale(phase);
    let key = canon
        .to_row_major()
        .iter()
        .flat_map(|z| [(z.re * KEY_SCALE).round() as i64, (z.im * KEY_SCALE).round() as i64])
        .collect();
    (key, canon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::is_unitary;

    #[test]
    fn single_qubit_group() {
        let g = clifford_group(1).unwrap();
        assert_eq!(g.len(), 24);
        assert!(g.iter().all(|u| is_unitary(u, 1e-12)));
    }

    #[test]
    fn two_qubit_group_order() {
        let g = clifford_group(2).unwrap();
        assert_eq!(g.len(), 11520);
    }

    #[test]
    fn single_qubit_frame_potential_is_two() {
        // A unitary 2-design has frame potential (1/|G|^2) Σ |Tr(U†V)|^4 = 2 for d >= 2.
        let g = clifford_group(1).unwrap();
        let n = g.len() as f64;
        let fp: f64 = g
            .iter()
            .flat_map(|u| g.iter().map(move |v| u.dagger().matmul(v).trace().norm().powi(4)))
            .sum::<f64>()
            / (n * n);
        assert!((fp - 2.0).abs() < 1e-10, "frame potential {fp}");
    }

    #[test]
    fn unsupported_sizes() {
        assert!(clifford_group(3).is_err());
        assert!(clifford_group(0).is_err());
    }
}
