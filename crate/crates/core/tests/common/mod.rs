#![allow(dead_code)]

use faer::Mat;
use lindfrag::linalg::C64;
use proptest::test_runner::{Config, RngSeed};

/// Deterministic proptest settings shared by the property suites.
pub fn config(cases: u32) -> Config {
    Config { cases, rng_seed: RngSeed::Fixed(0x5eed), failure_persistence: None, ..Config::default() }
}

pub fn max_diff(a: &Mat<C64>, b: &Mat<C64>) -> f64 {
    assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    m
}

use lindfrag::model::{HamiltonianTerm, JumpOperator, LindbladModel};
use lindfrag::{Pauli, PauliString};

/// Valid model built from candidate strings: Hamiltonian candidates are
/// kept greedily while they commute with everything kept so far.
pub fn model_from_candidates(
    n: usize,
    hamiltonian: &[(f64, Vec<Pauli>)],
    jumps: &[(f64, Vec<Pauli>)],
) -> LindbladModel {
    let mut h: Vec<HamiltonianTerm> = Vec::new();
    for (coeff, letters) in hamiltonian {
        let p = PauliString::from_paulis(letters);
        if p.is_identity_letters() || h.iter().any(|t| t.pauli.anticommutes(&p).unwrap() || t.pauli == p) {
            continue;
        }
        h.push(HamiltonianTerm { coeff: *coeff, pauli: p });
    }
    let f: Vec<JumpOperator> = jumps
        .iter()
        .map(|(rate, letters)| JumpOperator { rate: *rate, pauli: PauliString::from_paulis(letters) })
        .filter(|j| !j.pauli.is_identity_letters())
        .collect();
    let model = LindbladModel::new(n, h, f).unwrap();
    assert!(model.validate().is_valid());
    model
}
