//! Brute-force superoperators for small systems, used to cross-check the
//! fragment structure and the effective generators.
//!
//! The Lindbladian is applied to dense `2^N × 2^N` physical operators and
//! projected back onto tilde-basis Pauli strings, so nothing here relies on
//! the commutation rules used by [`crate::effective`].

use faer::Mat;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::effective::{restrict, EffectiveError};
use crate::fragments::{fragment_of, Fragment, FragmentError};
use crate::linalg::{self, c, LinalgError, C64};
use crate::model::TildeModel;
use crate::pauli::{Pauli, PauliError, PauliString};

pub const ORACLE_MAX_QUBITS: usize = 5;
pub const CONSERVATION_MAX_QUBITS: usize = 4;
pub const OFF_BLOCK_TOL: f64 = 1e-12;
pub const BLOCK_SPECTRUM_TOL: f64 = 1e-10;
pub const COMMUTATOR_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("{n} qubits exceed the oracle limit of {max}")]
    TooLarge { n: usize, max: usize },
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Fragment(#[from] FragmentError),
    #[error(transparent)]
    Effective(#[from] EffectiveError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Index of a tilde string in the lexicographic `I < X < Y < Z` order,
/// site 0 most significant.
pub fn basis_index(p: &PauliString) -> usize {
    p.letters().fold(0, |acc, l| acc * 4 + l.index())
}

pub fn basis_string(n: usize, index: usize) -> PauliString {
    let letters: Vec<Pauli> = (0..n).map(|s| Pauli::ALL[(index >> (2 * (n - 1 - s))) & 3]).collect();
    PauliString::from_paulis(&letters)
}

#[derive(Debug, Clone)]
pub struct SuperoperatorMatrix {
    n: usize,
    /// Full generator.
    matrix: Mat<C64>,
    /// `[h_l, ·]` for each Hamiltonian term, without the coupling.
    unitary: Vec<Mat<C64>>,
    /// `2(F·F − ·)` for each jump, without the rate.
    dissipative: Vec<Mat<C64>>,
}

impl SuperoperatorMatrix {
    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Mat<C64> {
        &self.matrix
    }

    pub fn unitary_parts(&self) -> &[Mat<C64>] {
        &self.unitary
    }

    pub fn dissipative_parts(&self) -> &[Mat<C64>] {
        &self.dissipative
    }

    pub fn eigenvalues(&self) -> Result<Vec<C64>, OracleError> {
        Ok(linalg::eigenvalues(&self.matrix)?)
    }
}

/// Nonzero entry of each column of a Pauli matrix.
struct Monomial {
    rows: Vec<usize>,
    amps: Vec<C64>,
}

impl Monomial {
    fn from_dense(m: &Mat<C64>) -> Self {
        let dim = m.nrows();
        let mut rows = vec![0; dim];
        let mut amps = vec![c(0.0, 0.0); dim];
        for col in 0..dim {
            let row = (0..dim).find(|&r| m[(r, col)] != c(0.0, 0.0)).expect("Pauli matrices have one entry per column");
            rows[col] = row;
            amps[col] = m[(row, col)];
        }
        Monomial { rows, amps }
    }

    /// `Tr(P† X) / dim`.
    fn coefficient(&self, x: &Mat<C64>) -> C64 {
        let dim = self.rows.len();
        let sum: C64 = (0..dim).map(|col| self.amps[col].conj() * x[(self.rows[col], col)]).sum();
        sum / dim as f64
    }
}

fn scaled(m: &Mat<C64>, s: C64) -> Mat<C64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * s)
}

/// Superoperator of `model` in the tilde Pauli basis.
pub fn build_superoperator(model: &TildeModel) -> Result<SuperoperatorMatrix, OracleError> {
    let n = model.n_qubits();
    if n > ORACLE_MAX_QUBITS {
        return Err(OracleError::TooLarge { n, max: ORACLE_MAX_QUBITS });
    }
    let phys = model.physical();
    let h: Vec<Mat<C64>> = phys.hamiltonian().iter().map(|t| t.pauli.to_dense()).collect::<Result<_, _>>()?;
    let f: Vec<Mat<C64>> = phys.jumps().iter().map(|j| j.pauli.to_dense()).collect::<Result<_, _>>()?;
    let dim = 1usize << (2 * n);
    let basis: Vec<Mat<C64>> =
        (0..dim).map(|b| model.to_physical(&basis_string(n, b))?.to_dense()).collect::<Result<_, PauliError>>()?;
    let monomials: Vec<Monomial> = basis.iter().map(Monomial::from_dense).collect();

    let project = |images: Vec<Mat<C64>>| -> Mat<C64> {
        let cols: Vec<Vec<C64>> = images.par_iter().map(|x| monomials.iter().map(|m| m.coefficient(x)).collect()).collect();
        Mat::from_fn(dim, dim, |a, b| cols[b][a])
    };
    let unitary: Vec<Mat<C64>> =
        h.iter().map(|hl| project(basis.iter().map(|q| hl * q - q * hl).collect())).collect();
    let dissipative: Vec<Mat<C64>> = f
        .iter()
        .map(|fj| project(basis.iter().map(|q| scaled(&(fj * q * fj - q), c(2.0, 0.0))).collect()))
        .collect();

    let mut matrix = Mat::<C64>::zeros(dim, dim);
    for (t, u) in phys.hamiltonian().iter().zip(&unitary) {
        matrix += scaled(u, c(0.0, -t.coeff));
    }
    for (jmp, d) in phys.jumps().iter().zip(&dissipative) {
        matrix += scaled(d, c(jmp.rate, 0.0));
    }
    Ok(SuperoperatorMatrix { n, matrix, unitary, dissipative })
}

/// Largest off-block entry for a partition of the basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OffBlockEntry {
    pub row: usize,
    pub col: usize,
    pub magnitude: f64,
}

/// Frobenius norm of the entries connecting different blocks, and the
/// largest such entry.
pub fn off_block_norm(matrix: &Mat<C64>, block_of: &[usize]) -> (f64, Option<OffBlockEntry>) {
    let mut sum = 0.0;
    let mut worst: Option<OffBlockEntry> = None;
    for col in 0..matrix.ncols() {
        for row in 0..matrix.nrows() {
            if block_of[row] == block_of[col] {
                continue;
            }
            let m = matrix[(row, col)].norm();
            sum += m * m;
            if m > 0.0 && worst.map_or(true, |w| m > w.magnitude) {
                worst = Some(OffBlockEntry { row, col, magnitude: m });
            }
        }
    }
    (sum.sqrt(), worst)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockCheck {
    pub fragment: String,
    pub dim: usize,
    /// Largest entrywise difference to the restricted generator.
    pub matrix_distance: f64,
    pub spectrum_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FragmentationReport {
    pub n_fragments: usize,
    pub off_block_norm: f64,
    pub worst_off_block: Option<OffBlockEntry>,
    pub blocks: Vec<BlockCheck>,
    pub passed: bool,
}

impl FragmentationReport {
    pub fn max_spectrum_distance(&self) -> f64 {
        self.blocks.iter().map(|b| b.spectrum_distance).fold(0.0, f64::max)
    }

    pub fn max_matrix_distance(&self) -> f64 {
        self.blocks.iter().map(|b| b.matrix_distance).fold(0.0, f64::max)
    }
}

/// Fragments covering the basis, found by sweeping it in order, and the
/// block index of every basis string.
pub fn fragment_partition(model: &TildeModel) -> Result<(Vec<Fragment>, Vec<usize>), OracleError> {
    let n = model.n_qubits();
    let dim = 1usize << (2 * n);
    let mut fragments = Vec::new();
    let mut block_of = vec![usize::MAX; dim];
    for b in 0..dim {
        if block_of[b] != usize::MAX {
            continue;
        }
        let f = fragment_of(model, &basis_string(n, b))?;
        for m in f.members() {
            block_of[basis_index(&m)] = fragments.len();
        }
        fragments.push(f);
    }
    Ok((fragments, block_of))
}

/// Checks that the fragments block-diagonalize the superoperator and that
/// each block equals the restricted generator.
pub fn verify_fragmentation(model: &TildeModel, sup: &SuperoperatorMatrix) -> Result<FragmentationReport, OracleError> {
    let (fragments, block_of) = fragment_partition(model)?;
    let (norm, worst) = off_block_norm(&sup.matrix, &block_of);
    let mut blocks = Vec::with_capacity(fragments.len());
    for f in &fragments {
        let gen = restrict(model, f)?;
        let eff = gen.matrix()?;
        let idx: Vec<usize> = f.members().map(|m| basis_index(&m)).collect();
        let block = Mat::from_fn(idx.len(), idx.len(), |a, b| sup.matrix[(idx[a], idx[b])]);
        let mut matrix_distance = 0.0f64;
        for a in 0..idx.len() {
            for b in 0..idx.len() {
                matrix_distance = matrix_distance.max((block[(a, b)] - eff[(a, b)]).norm());
            }
        }
        let spectrum_distance = linalg::multiset_distance(&linalg::eigenvalues(&block)?, &linalg::eigenvalues(eff)?);
        blocks.push(BlockCheck { fragment: f.to_string(), dim: idx.len(), matrix_distance, spectrum_distance });
    }
    // equal matrices have equal spectra; near-defective blocks can still
    // scatter their computed eigenvalues well above roundoff
    let passed = norm < OFF_BLOCK_TOL
        && blocks.iter().all(|b| b.matrix_distance < OFF_BLOCK_TOL || b.spectrum_distance < BLOCK_SPECTRUM_TOL);
    Ok(FragmentationReport { n_fragments: fragments.len(), off_block_norm: norm, worst_off_block: worst, blocks, passed })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConservationLevel {
    /// `P_Ĩ` and `P_Z̃` are separately conserved.
    Fine,
    /// Only `P_Ĩ + P_Z̃` is conserved.
    Coarse,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SiteConservation {
    pub site: usize,
    /// Largest commutator norm of `P_Ĩ` or `P_Z̃` with any term.
    pub fine_residual: f64,
    pub coarse_residual: f64,
    pub level: ConservationLevel,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConservationReport {
    pub sites: Vec<SiteConservation>,
}

impl ConservationReport {
    pub fn all_fine(&self) -> bool {
        self.sites.iter().all(|s| s.level == ConservationLevel::Fine)
    }

    pub fn all_coarse(&self) -> bool {
        self.sites.iter().all(|s| s.level != ConservationLevel::None)
    }
}

/// Norm of `[P, A]` for a diagonal 0/1 projector `P`.
fn projector_commutator(mask: &[bool], a: &Mat<C64>) -> f64 {
    let mut sum = 0.0;
    for col in 0..a.ncols() {
        for row in 0..a.nrows() {
            if mask[row] != mask[col] {
                sum += a[(row, col)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Commutators of the per-site `Ĩ`/`Z̃` projectors at each generator site
/// with every unitary and dissipative term.
pub fn verify_conservation(model: &TildeModel, sup: &SuperoperatorMatrix) -> Result<ConservationReport, OracleError> {
    let n = model.n_qubits();
    if n > CONSERVATION_MAX_QUBITS {
        return Err(OracleError::TooLarge { n, max: CONSERVATION_MAX_QUBITS });
    }
    let letter_at = |idx: usize, site: usize| Pauli::ALL[(idx >> (2 * (n - 1 - site))) & 3];
    let terms: Vec<&Mat<C64>> = sup.unitary.iter().chain(&sup.dissipative).collect();
    let worst = |mask: &[bool]| terms.iter().map(|t| projector_commutator(mask, t)).fold(0.0, f64::max);
    let sites = model
        .generator_sites()
        .iter()
        .map(|&site| {
            let dim = sup.dim();
            let p_i: Vec<bool> = (0..dim).map(|b| letter_at(b, site) == Pauli::I).collect();
            let p_z: Vec<bool> = (0..dim).map(|b| letter_at(b, site) == Pauli::Z).collect();
            let coarse: Vec<bool> = p_i.iter().zip(&p_z).map(|(a, b)| *a || *b).collect();
            let fine_residual = worst(&p_i).max(worst(&p_z));
            let coarse_residual = worst(&coarse);
            let level = if fine_residual < COMMUTATOR_TOL {
                ConservationLevel::Fine
            } else if coarse_residual < COMMUTATOR_TOL {
                ConservationLevel::Coarse
            } else {
                ConservationLevel::None
            };
            SiteConservation { site, fine_residual, coarse_residual, level }
        })
        .collect();
    Ok(ConservationReport { sites })
}
