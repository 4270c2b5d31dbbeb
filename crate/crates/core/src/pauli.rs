//! Bit-packed signed Pauli strings.
//!
//! A string on `n` qubits is stored as two packed bit vectors (X part and Z
//! part) plus a phase exponent `k` so that the operator is
//! `i^k ⊗_j P_j` with `P_j ∈ {I, X, Y, Z}`. A site with both bits set is a
//! literal `Y`, which makes a string Hermitian exactly when `k` is even.
//!
//! Sites are numbered from 0 internally; text and dense renderings put site 0
//! leftmost (most significant Kronecker factor).

use std::fmt;
use std::str::FromStr;

use faer::Mat;
use num_complex::Complex64;
use thiserror::Error;

/// Largest qubit count accepted by [`PauliString::to_dense`].
pub const DENSE_MAX_QUBITS: usize = 14;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PauliError {
    #[error("qubit count mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("site {site} out of range for {n} qubits")]
    SiteOutOfRange { site: usize, n: usize },
    #[error("string is not Hermitian (phase {0})")]
    NotHermitian(Phase),
    #[error("cannot parse Pauli string {input:?}: {reason}")]
    Parse { input: String, reason: &'static str },
    #[error("dense rendering limited to {max} qubits, got {n}")]
    DenseTooLarge { n: usize, max: usize },
    #[error("symplectic map is invalid: {0}")]
    InvalidMap(&'static str),
}

/// Single-site Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    /// Index in the order I < X < Y < Z.
    pub fn index(self) -> usize {
        self as usize
    }
}

/// Power of `i` modulo 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(k: i64) -> Self {
        Phase(k.rem_euclid(4) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn value(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    pub fn sign(self) -> Option<i8> {
        match self.0 {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }
}

impl std::ops::Add for Phase {
    type Output = Phase;
    fn add(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

impl std::ops::Neg for Phase {
    type Output = Phase;
    fn neg(self) -> Phase {
        Phase((4 - self.0) % 4)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        })
    }
}

fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

/// Signed Pauli operator on `n` qubits.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: Phase,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        let w = words_for(n);
        PauliString { n, x: vec![0; w], z: vec![0; w], phase: Phase::ONE }
    }

    /// Single-site operator `p` on `site`.
    pub fn single(n: usize, site: usize, p: Pauli) -> Result<Self, PauliError> {
        let mut s = Self::identity(n);
        s.set(site, p)?;
        Ok(s)
    }

    pub fn from_paulis(letters: &[Pauli]) -> Self {
        let mut s = Self::identity(letters.len());
        for (i, &p) in letters.iter().enumerate() {
            s.set_unchecked(i, p);
        }
        s
    }

    /// Builds a string from raw bit vectors; `phase` follows the literal-Y
    /// convention of this type.
    pub fn from_bits(x: &[bool], z: &[bool], phase: Phase) -> Result<Self, PauliError> {
        if x.len() != z.len() {
            return Err(PauliError::LengthMismatch { left: x.len(), right: z.len() });
        }
        let mut s = Self::identity(x.len());
        for i in 0..x.len() {
            s.set_unchecked(i, Pauli::from_bits(x[i], z[i]));
        }
        s.phase = phase;
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    /// The same letters with phase `+1`.
    pub fn unsigned(&self) -> Self {
        self.clone().with_phase(Phase::ONE)
    }

    pub fn negated(&self) -> Self {
        let mut s = self.clone();
        s.phase = s.phase + Phase::MINUS_ONE;
        s
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_real()
    }

    pub fn is_identity_letters(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    pub fn x_bit(&self, site: usize) -> bool {
        (self.x[site / 64] >> (site % 64)) & 1 == 1
    }

    pub fn z_bit(&self, site: usize) -> bool {
        (self.z[site / 64] >> (site % 64)) & 1 == 1
    }

    pub fn get(&self, site: usize) -> Pauli {
        Pauli::from_bits(self.x_bit(site), self.z_bit(site))
    }

    pub fn set(&mut self, site: usize, p: Pauli) -> Result<(), PauliError> {
        if site >= self.n {
            return Err(PauliError::SiteOutOfRange { site, n: self.n });
        }
        self.set_unchecked(site, p);
        Ok(())
    }

    fn set_unchecked(&mut self, site: usize, p: Pauli) {
        let (xb, zb) = p.bits();
        let (w, b) = (site / 64, site % 64);
        self.x[w] = (self.x[w] & !(1 << b)) | ((xb as u64) << b);
        self.z[w] = (self.z[w] & !(1 << b)) | ((zb as u64) << b);
    }

    pub fn letters(&self) -> impl Iterator<Item = Pauli> + '_ {
        (0..self.n).map(|i| self.get(i))
    }

    /// Sites carrying a non-identity letter, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.x_bit(i) || self.z_bit(i)).collect()
    }

    pub fn weight(&self) -> usize {
        self.x.iter().zip(&self.z).map(|(a, b)| (a | b).count_ones() as usize).sum()
    }

    pub fn y_count(&self) -> u32 {
        self.x.iter().zip(&self.z).map(|(a, b)| (a & b).count_ones()).sum()
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    fn check_len(&self, other: &Self) -> Result<(), PauliError> {
        if self.n != other.n {
            Err(PauliError::LengthMismatch { left: self.n, right: other.n })
        } else {
            Ok(())
        }
    }

    /// Parity of the symplectic inner product, without the length check.
    pub(crate) fn symplectic(&self, other: &Self) -> bool {
        let mut acc = 0u32;
        for w in 0..self.x.len() {
            acc += (self.x[w] & other.z[w]).count_ones() + (self.z[w] & other.x[w]).count_ones();
        }
        acc % 2 == 1
    }

    pub fn anticommutes(&self, other: &Self) -> Result<bool, PauliError> {
        self.check_len(other)?;
        Ok(self.symplectic(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let mut x = Vec::with_capacity(self.x.len());
        let mut z = Vec::with_capacity(self.z.len());
        let mut plus = 0i64;
        let mut minus = 0i64;
        for w in 0..self.x.len() {
            let (xa, za, xb, zb) = (self.x[w], self.z[w], other.x[w], other.z[w]);
            let (pxa, pya, pza) = (xa & !za, xa & za, za & !xa);
            let (pxb, pyb, pzb) = (xb & !zb, xb & zb, zb & !xb);
            // XY = iZ, YZ = iX, ZX = iY and the reversed orders give -i
            plus += ((pxa & pyb) | (pya & pzb) | (pza & pxb)).count_ones() as i64;
            minus += ((pya & pxb) | (pza & pyb) | (pxa & pzb)).count_ones() as i64;
            x.push(xa ^ xb);
            z.push(za ^ zb);
        }
        let k = self.phase.0 as i64 + other.phase.0 as i64 + plus - minus;
        PauliString { n: self.n, x, z, phase: Phase::from_exponent(k) }
    }

    /// Operator product `self · other` with its exact phase.
    pub fn multiply(&self, other: &Self) -> Result<Self, PauliError> {
        self.check_len(other)?;
        Ok(self.mul_unchecked(other))
    }

    /// Sign `ε` with `f m f = ε m` for an involutory Hermitian `f`.
    pub fn conjugation_sign(f: &Self, m: &Self) -> Result<i8, PauliError> {
        f.check_len(m)?;
        if !f.is_hermitian() {
            return Err(PauliError::NotHermitian(f.phase));
        }
        Ok(if f.symplectic(m) { -1 } else { 1 })
    }

    /// Adjoint: letters are Hermitian, so only the phase conjugates.
    pub fn adjoint(&self) -> Self {
        self.clone().with_phase(-self.phase)
    }

    /// Row index and amplitude of `P |col⟩` in the computational basis.
    pub fn apply_to_basis(&self, col: usize) -> (usize, Complex64) {
        let (xm, zm) = self.index_masks();
        let k = self.phase.0 as u32 + self.y_count() + 2 * ((col & zm).count_ones() % 2);
        (col ^ xm, Phase::from_exponent(k as i64).value())
    }

    /// Bit masks (site 0 most significant) used by dense kernels.
    pub(crate) fn index_masks(&self) -> (usize, usize) {
        let mut xm = 0usize;
        let mut zm = 0usize;
        for i in 0..self.n {
            if self.x_bit(i) {
                xm |= 1 << (self.n - 1 - i);
            }
            if self.z_bit(i) {
                zm |= 1 << (self.n - 1 - i);
            }
        }
        (xm, zm)
    }

    /// Dense `2^n × 2^n` matrix with site 0 as the leftmost Kronecker factor.
    pub fn to_dense(&self) -> Result<Mat<Complex64>, PauliError> {
        if self.n > DENSE_MAX_QUBITS {
            return Err(PauliError::DenseTooLarge { n: self.n, max: DENSE_MAX_QUBITS });
        }
        let dim = 1usize << self.n;
        let (xm, zm) = self.index_masks();
        let base = self.phase.0 as u32 + self.y_count();
        let mut m = Mat::<Complex64>::zeros(dim, dim);
        for col in 0..dim {
            let k = base + 2 * ((col & zm).count_ones() % 2);
            m[(col ^ xm, col)] = Phase::from_exponent(k as i64).value();
        }
        Ok(m)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.phase.0 {
            0 => {}
            1 => f.write_str("+i")?,
            2 => f.write_str("-")?,
            _ => f.write_str("-i")?,
        }
        for p in self.letters() {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = PauliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason| PauliError::Parse { input: s.to_string(), reason };
        let t = s.trim();
        let (phase, body) = if let Some(r) = t.strip_prefix("+i").or_else(|| t.strip_prefix('i')) {
            (Phase::I, r)
        } else if let Some(r) = t.strip_prefix("-i").or_else(|| t.strip_prefix("−i")) {
            (Phase::MINUS_I, r)
        } else if let Some(r) = t.strip_prefix('+') {
            (Phase::ONE, r)
        } else if let Some(r) = t.strip_prefix('-').or_else(|| t.strip_prefix('−')) {
            (Phase::MINUS_ONE, r)
        } else {
            (Phase::ONE, t)
        };
        if body.is_empty() {
            return Err(err("no sites"));
        }
        let letters = body
            .chars()
            .map(|c| Pauli::from_char(c).ok_or(()))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| err("letters must be I, X, Y or Z"))?;
        Ok(PauliString::from_paulis(&letters).with_phase(phase))
    }
}
