//! Pauli-Lindblad models: validation, built-in chains and config ingestion.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pauli::{Pauli, PauliError, PauliString};

mod tilde;

pub use tilde::{SiteRole, TildeModel};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error("model has no qubits")]
    NoQubits,
    #[error("model failed validation:\n{0}")]
    Invalid(ValidationReport),
    #[error("unknown builtin model {0:?} (expected cluster_y or cluster_ziz)")]
    UnknownBuiltin(String),
    #[error("builtin {name} needs at least {min} qubits, got {n}")]
    TooSmall { name: &'static str, n: usize, min: usize },
    #[error("{what} override has {got} entries, expected {expected}")]
    OverrideLength { what: &'static str, got: usize, expected: usize },
    #[error("invalid model config: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    Physical,
    Tilde,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinKind {
    ClusterY,
    ClusterZiz,
}

impl BuiltinKind {
    pub fn name(self) -> &'static str {
        match self {
            BuiltinKind::ClusterY => "cluster_y",
            BuiltinKind::ClusterZiz => "cluster_ziz",
        }
    }
}

impl std::str::FromStr for BuiltinKind {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cluster_y" => Ok(BuiltinKind::ClusterY),
            "cluster_ziz" => Ok(BuiltinKind::ClusterZiz),
            other => Err(ModelError::UnknownBuiltin(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianTerm {
    pub coeff: f64,
    pub pauli: PauliString,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JumpOperator {
    pub rate: f64,
    pub pauli: PauliString,
}

/// Hamiltonian terms and jump operators of a Pauli-Lindblad generator.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladModel {
    n: usize,
    hamiltonian: Vec<HamiltonianTerm>,
    jumps: Vec<JumpOperator>,
    basis: Basis,
    origin: Option<BuiltinKind>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonHermitianTerm(usize),
    NonHermitianJump(usize),
    NegativeRate { jump: usize, rate: f64 },
    NonFinite { what: &'static str, index: usize },
    NonCommutingTerms(usize, usize),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonHermitianTerm(i) => write!(f, "hamiltonian term {i} is not Hermitian"),
            Violation::NonHermitianJump(j) => write!(f, "jump {j} is not Hermitian"),
            Violation::NegativeRate { jump, rate } => write!(f, "jump {jump} has negative rate {rate}"),
            Violation::NonFinite { what, index } => write!(f, "{what} {index} is not finite"),
            Violation::NonCommutingTerms(a, b) => {
                write!(f, "hamiltonian terms {a} and {b} do not commute")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Warning {
    /// Every jump commutes with every Hamiltonian term.
    TriviallySolvable,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::TriviallySolvable => {
                f.write_str("every jump commutes with every hamiltonian term (trivially solvable)")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Warning>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() && self.warnings.is_empty() {
            return f.write_str("ok");
        }
        for v in &self.violations {
            writeln!(f, "error: {v}")?;
        }
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        Ok(())
    }
}

impl LindbladModel {
    pub fn new(
        n: usize,
        hamiltonian: Vec<HamiltonianTerm>,
        jumps: Vec<JumpOperator>,
    ) -> Result<Self, ModelError> {
        Self::with_basis(n, hamiltonian, jumps, Basis::Physical)
    }

    pub(crate) fn with_basis(
        n: usize,
        hamiltonian: Vec<HamiltonianTerm>,
        jumps: Vec<JumpOperator>,
        basis: Basis,
    ) -> Result<Self, ModelError> {
        if n == 0 {
            return Err(ModelError::NoQubits);
        }
        let lengths = hamiltonian.iter().map(|t| &t.pauli).chain(jumps.iter().map(|j| &j.pauli));
        for p in lengths {
            if p.n_qubits() != n {
                return Err(PauliError::LengthMismatch { left: n, right: p.n_qubits() }.into());
            }
        }
        Ok(LindbladModel { n, hamiltonian, jumps, basis, origin: None })
    }

    /// Parses terms given as `(coefficient, "ZXZ...")` pairs.
    pub fn from_strings(
        n: usize,
        hamiltonian: &[(f64, &str)],
        jumps: &[(f64, &str)],
    ) -> Result<Self, ModelError> {
        let h = hamiltonian
            .iter()
            .map(|&(coeff, s)| Ok(HamiltonianTerm { coeff, pauli: s.parse()? }))
            .collect::<Result<Vec<_>, PauliError>>()?;
        let j = jumps
            .iter()
            .map(|&(rate, s)| Ok(JumpOperator { rate, pauli: s.parse()? }))
            .collect::<Result<Vec<_>, PauliError>>()?;
        Self::new(n, h, j)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn hamiltonian(&self) -> &[HamiltonianTerm] {
        &self.hamiltonian
    }

    pub fn jumps(&self) -> &[JumpOperator] {
        &self.jumps
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn origin(&self) -> Option<BuiltinKind> {
        self.origin
    }

    pub(crate) fn set_origin(&mut self, origin: Option<BuiltinKind>) {
        self.origin = origin;
    }

    /// Same terms with every Hamiltonian coefficient set to `j` and every
    /// rate set to `kappa`.
    pub fn with_uniform_couplings(&self, j: f64, kappa: f64) -> Self {
        let mut m = self.clone();
        m.hamiltonian.iter_mut().for_each(|t| t.coeff = j);
        m.jumps.iter_mut().for_each(|f| f.rate = kappa);
        m
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        for (i, t) in self.hamiltonian.iter().enumerate() {
            if !t.pauli.is_hermitian() {
                report.violations.push(Violation::NonHermitianTerm(i));
            }
            if !t.coeff.is_finite() {
                report.violations.push(Violation::NonFinite { what: "hamiltonian coefficient", index: i });
            }
        }
        for (j, f) in self.jumps.iter().enumerate() {
            if !f.pauli.is_hermitian() {
                report.violations.push(Violation::NonHermitianJump(j));
            }
            if !f.rate.is_finite() {
                report.violations.push(Violation::NonFinite { what: "jump rate", index: j });
            } else if f.rate < 0.0 {
                report.violations.push(Violation::NegativeRate { jump: j, rate: f.rate });
            }
        }
        for a in 0..self.hamiltonian.len() {
            for b in a + 1..self.hamiltonian.len() {
                if self.hamiltonian[a].pauli.symplectic(&self.hamiltonian[b].pauli) {
                    report.violations.push(Violation::NonCommutingTerms(a, b));
                }
            }
        }
        let all_commute = self
            .jumps
            .iter()
            .all(|f| self.hamiltonian.iter().all(|t| !t.pauli.symplectic(&f.pauli)));
        if all_commute {
            report.warnings.push(Warning::TriviallySolvable);
        }
        report
    }

    pub fn to_tilde(&self) -> Result<TildeModel, ModelError> {
        TildeModel::new(self)
    }
}

/// Parameters of a built-in cluster chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuiltinSpec {
    pub name: BuiltinKind,
    pub n: usize,
    #[serde(rename = "J", default = "one")]
    pub j: f64,
    #[serde(default = "one")]
    pub kappa: f64,
    /// Per-term Hamiltonian coefficients, one per bulk site.
    #[serde(default, rename = "J_terms", skip_serializing_if = "Option::is_none")]
    pub j_terms: Option<Vec<f64>>,
    /// Per-jump rates in jump order.
    #[serde(default, rename = "kappa_terms", skip_serializing_if = "Option::is_none")]
    pub kappa_terms: Option<Vec<f64>>,
}

fn one() -> f64 {
    1.0
}

impl BuiltinSpec {
    pub fn new(name: BuiltinKind, n: usize, j: f64, kappa: f64) -> Self {
        BuiltinSpec { name, n, j, kappa, j_terms: None, kappa_terms: None }
    }

    pub fn build(&self) -> Result<LindbladModel, ModelError> {
        let n = self.n;
        if n < 4 {
            return Err(ModelError::TooSmall { name: self.name.name(), n, min: 4 });
        }
        let bulk = |site: usize, letters: &[(usize, Pauli)]| {
            let mut s = PauliString::identity(n);
            for &(off, p) in letters {
                s.set(site + off - 1, p).expect("site in range");
            }
            s
        };
        // Z_{l-1} X_l Z_{l+1} for l = 2..N-1 (1-based)
        let terms: Vec<PauliString> =
            (1..n - 1).map(|l| bulk(l, &[(0, Pauli::Z), (1, Pauli::X), (2, Pauli::Z)])).collect();
        let jumps: Vec<PauliString> = match self.name {
            BuiltinKind::ClusterY => {
                (0..n).map(|j| PauliString::single(n, j, Pauli::Y).unwrap()).collect()
            }
            BuiltinKind::ClusterZiz => {
                (1..n - 1).map(|j| bulk(j, &[(0, Pauli::Z), (2, Pauli::Z)])).collect()
            }
        };
        let coeffs = expand(self.j, self.j_terms.as_deref(), terms.len(), "J")?;
        let rates = expand(self.kappa, self.kappa_terms.as_deref(), jumps.len(), "kappa")?;
        let h = terms
            .into_iter()
            .zip(coeffs)
            .map(|(pauli, coeff)| HamiltonianTerm { coeff, pauli })
            .collect();
        let f = jumps.into_iter().zip(rates).map(|(pauli, rate)| JumpOperator { rate, pauli }).collect();
        let mut model = LindbladModel::new(n, h, f)?;
        model.origin = Some(self.name);
        Ok(model)
    }
}

fn expand(
    uniform: f64,
    over: Option<&[f64]>,
    len: usize,
    what: &'static str,
) -> Result<Vec<f64>, ModelError> {
    match over {
        None => Ok(vec![uniform; len]),
        Some(v) if v.len() == len => Ok(v.to_vec()),
        Some(v) => Err(ModelError::OverrideLength { what, got: v.len(), expected: len }),
    }
}

/// Cluster chain with the named jump family and uniform couplings.
pub fn builtin(name: BuiltinKind, n: usize, j: f64, kappa: f64) -> Result<LindbladModel, ModelError> {
    BuiltinSpec::new(name, n, j, kappa).build()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TermConfig {
    coeff: f64,
    pauli: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct JumpConfig {
    rate: f64,
    pauli: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum ModelConfig {
    Builtin {
        builtin: BuiltinSpec,
    },
    Explicit {
        n_qubits: usize,
        #[serde(default)]
        hamiltonian: Vec<TermConfig>,
        #[serde(default)]
        jumps: Vec<JumpConfig>,
    },
}

impl LindbladModel {
    /// Reads the JSON model format (explicit term lists or a builtin block).
    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let cfg: ModelConfig =
            serde_json::from_str(text).map_err(|e| ModelError::Config(e.to_string()))?;
        match cfg {
            ModelConfig::Builtin { builtin } => builtin.build(),
            ModelConfig::Explicit { n_qubits, hamiltonian, jumps } => {
                let h = hamiltonian
                    .into_iter()
                    .map(|t| Ok(HamiltonianTerm { coeff: t.coeff, pauli: t.pauli.parse()? }))
                    .collect::<Result<Vec<_>, PauliError>>()?;
                let f = jumps
                    .into_iter()
                    .map(|j| Ok(JumpOperator { rate: j.rate, pauli: j.pauli.parse()? }))
                    .collect::<Result<Vec<_>, PauliError>>()?;
                LindbladModel::new(n_qubits, h, f)
            }
        }
    }

    pub fn to_json(&self) -> String {
        let cfg = ModelConfig::Explicit {
            n_qubits: self.n,
            hamiltonian: self
                .hamiltonian
                .iter()
                .map(|t| TermConfig { coeff: t.coeff, pauli: t.pauli.to_string() })
                .collect(),
            jumps: self
                .jumps
                .iter()
                .map(|f| JumpConfig { rate: f.rate, pauli: f.pauli.to_string() })
                .collect(),
        };
        serde_json::to_string_pretty(&cfg).expect("model config serializes")
    }
}
