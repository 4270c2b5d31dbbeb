//! Krylov fragments of operator space, labeled by frozen/active/free sites.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::model::{SiteRole, TildeModel};
use crate::pauli::{Pauli, PauliError, PauliString};

/// Default cap on explicit closures in the reachability path.
pub const CLOSURE_LIMIT: usize = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FragmentError {
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error("hamiltonian term {0} is a product of several generators; use fragment_of (reachability) instead of label enumeration")]
    MultiGeneratorTerms(usize),
    #[error("reachability closure exceeded {limit} strings")]
    ClosureTooLarge { limit: usize },
    #[error("fragment does not belong to this model: {0}")]
    Mismatch(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SiteLabel {
    FrozenI,
    FrozenZ,
    Active,
    FreeI,
    FreeX,
    FreeY,
    FreeZ,
}

impl SiteLabel {
    pub fn is_free(self) -> bool {
        matches!(self, SiteLabel::FreeI | SiteLabel::FreeX | SiteLabel::FreeY | SiteLabel::FreeZ)
    }

    fn free(p: Pauli) -> Self {
        match p {
            Pauli::I => SiteLabel::FreeI,
            Pauli::X => SiteLabel::FreeX,
            Pauli::Y => SiteLabel::FreeY,
            Pauli::Z => SiteLabel::FreeZ,
        }
    }

    fn generator(p: Pauli) -> Self {
        match p {
            Pauli::I => SiteLabel::FrozenI,
            Pauli::Z => SiteLabel::FrozenZ,
            Pauli::X | Pauli::Y => SiteLabel::Active,
        }
    }

    /// Letter a member carries on this site (`X` stands in for active).
    pub fn letter(self) -> Pauli {
        match self {
            SiteLabel::FrozenI | SiteLabel::FreeI => Pauli::I,
            SiteLabel::FrozenZ | SiteLabel::FreeZ => Pauli::Z,
            SiteLabel::Active | SiteLabel::FreeX => Pauli::X,
            SiteLabel::FreeY => Pauli::Y,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            SiteLabel::Active => '.',
            other => other.letter().as_char(),
        }
    }
}

/// An invariant subspace of operator space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fragment {
    labels: Vec<SiteLabel>,
    active_sites: Vec<usize>,
    members: Option<Vec<PauliString>>,
}

impl Fragment {
    fn from_labels(labels: Vec<SiteLabel>) -> Self {
        let active_sites =
            labels.iter().enumerate().filter(|(_, &l)| l == SiteLabel::Active).map(|(s, _)| s).collect();
        Fragment { labels, active_sites, members: None }
    }

    /// Labels of the fragment containing `seed`, read site by site.
    pub fn label_of(model: &TildeModel, seed: &PauliString) -> Result<Self, FragmentError> {
        if seed.n_qubits() != model.n_qubits() {
            return Err(PauliError::LengthMismatch { left: model.n_qubits(), right: seed.n_qubits() }.into());
        }
        let labels = model
            .site_roles()
            .iter()
            .zip(seed.letters())
            .map(|(role, p)| match role {
                SiteRole::Generator(_) => SiteLabel::generator(p),
                SiteRole::Free => SiteLabel::free(p),
            })
            .collect();
        Ok(Self::from_labels(labels))
    }

    pub fn labels(&self) -> &[SiteLabel] {
        &self.labels
    }

    pub fn n_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn active_sites(&self) -> &[usize] {
        &self.active_sites
    }

    /// Explicit member list, present only for reachability fragments whose
    /// closure differs from the label prediction.
    pub fn explicit_members(&self) -> Option<&[PauliString]> {
        self.members.as_deref()
    }

    pub fn is_explicit(&self) -> bool {
        self.members.is_some()
    }

    /// Number of basis strings; saturates at `u128::MAX`.
    pub fn dim(&self) -> u128 {
        match &self.members {
            Some(m) => m.len() as u128,
            None => 1u128.checked_shl(self.active_sites.len() as u32).unwrap_or(u128::MAX),
        }
    }

    /// Label text, one character per site, `.` for active sites.
    pub fn label_string(&self) -> String {
        self.labels.iter().map(|l| l.as_char()).collect()
    }

    pub fn contains(&self, p: &PauliString) -> bool {
        if p.n_qubits() != self.n_qubits() {
            return false;
        }
        if let Some(m) = &self.members {
            let q = p.unsigned();
            return m.contains(&q);
        }
        self.labels.iter().zip(p.letters()).all(|(&l, q)| match l {
            SiteLabel::Active => matches!(q, Pauli::X | Pauli::Y),
            other => other.letter() == q,
        })
    }

    /// Member with `X̃` on every active site.
    pub fn representative(&self) -> PauliString {
        self.basis_string(0)
    }

    /// Member at pseudospin index `index`: the first active site is the most
    /// significant bit, bit 0 is `X̃` and bit 1 is `Ỹ`.
    pub fn basis_string(&self, index: usize) -> PauliString {
        if let Some(m) = &self.members {
            return m[index].clone();
        }
        let k = self.active_sites.len();
        let mut letters: Vec<Pauli> = self.labels.iter().map(|l| l.letter()).collect();
        for (pos, &s) in self.active_sites.iter().enumerate() {
            if (index >> (k - 1 - pos)) & 1 == 1 {
                letters[s] = Pauli::Y;
            }
        }
        PauliString::from_paulis(&letters)
    }

    /// Inverse of [`Fragment::basis_string`], ignoring the phase.
    pub fn index_of(&self, p: &PauliString) -> Option<usize> {
        if !self.contains(p) {
            return None;
        }
        if let Some(m) = &self.members {
            let q = p.unsigned();
            return m.iter().position(|x| *x == q);
        }
        Some(self.active_sites.iter().fold(0usize, |acc, &s| (acc << 1) | (p.get(s) == Pauli::Y) as usize))
    }

    /// All members in pseudospin order.
    pub fn members(&self) -> impl Iterator<Item = PauliString> + '_ {
        let dim = match &self.members {
            Some(m) => m.len(),
            None => 1usize << self.active_sites.len(),
        };
        (0..dim).map(|i| self.basis_string(i))
    }
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label_string())?;
        if let Some(m) = &self.members {
            write!(f, " (explicit, {} strings)", m.len())?;
        }
        Ok(())
    }
}

/// Reads a tilde-basis seed; spaces are ignored and `.` means `X̃`.
pub fn parse_seed(text: &str) -> Result<PauliString, PauliError> {
    let cleaned: String =
        text.chars().filter(|c| !c.is_whitespace()).map(|c| if c == '.' { 'X' } else { c }).collect();
    cleaned.parse()
}

/// Strings reachable from `seed` under the Hamiltonian commutators.
fn closure(model: &TildeModel, seed: &PauliString, limit: usize) -> Result<Vec<PauliString>, FragmentError> {
    let terms: Vec<&PauliString> = model.base().hamiltonian().iter().map(|t| &t.pauli).collect();
    let start = seed.unsigned();
    let mut seen: HashSet<PauliString> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(p) = queue.pop_front() {
        for h in &terms {
            if h.symplectic(&p) {
                let q = h.mul_unchecked(&p).unsigned();
                if seen.insert(q.clone()) {
                    if seen.len() > limit {
                        return Err(FragmentError::ClosureTooLarge { limit });
                    }
                    queue.push_back(q);
                }
            }
        }
    }
    let mut out: Vec<PauliString> = seen.into_iter().collect();
    out.sort_by_cached_key(|p| p.letters().map(Pauli::index).collect::<Vec<_>>());
    Ok(out)
}

/// Fragment containing a tilde-basis seed.
///
/// Single-generator models are labeled directly. Otherwise the commutator
/// closure is computed; it is returned as a labeled fragment when it agrees
/// with the label prediction and as an explicit member list when it does not.
pub fn fragment_of(model: &TildeModel, seed: &PauliString) -> Result<Fragment, FragmentError> {
    fragment_of_with_limit(model, seed, CLOSURE_LIMIT)
}

pub fn fragment_of_with_limit(
    model: &TildeModel,
    seed: &PauliString,
    limit: usize,
) -> Result<Fragment, FragmentError> {
    let labeled = Fragment::label_of(model, seed)?;
    if model.single_generator_terms() {
        return Ok(labeled);
    }
    let members = closure(model, seed, limit)?;
    let agrees = members.len() as u128 == labeled.dim() && members.iter().all(|m| labeled.contains(m));
    if agrees {
        Ok(labeled)
    } else {
        Ok(Fragment { members: Some(members), ..labeled })
    }
}

fn require_single_generator(model: &TildeModel) -> Result<(), FragmentError> {
    match model.term_exponents().iter().position(|e| e.iter().filter(|&&b| b).count() > 1) {
        Some(t) => Err(FragmentError::MultiGeneratorTerms(t)),
        None => Ok(()),
    }
}

/// Streams every fragment once, in canonical label order.
pub struct FragmentIter {
    radices: Vec<u8>,
    roles: Vec<SiteRole>,
    digits: Vec<u8>,
    done: bool,
}

impl Iterator for FragmentIter {
    type Item = Fragment;

    fn next(&mut self) -> Option<Fragment> {
        if self.done {
            return None;
        }
        let labels = self
            .roles
            .iter()
            .zip(&self.digits)
            .map(|(role, &d)| match role {
                SiteRole::Generator(_) => [SiteLabel::FrozenI, SiteLabel::FrozenZ, SiteLabel::Active][d as usize],
                SiteRole::Free => SiteLabel::free(Pauli::ALL[d as usize]),
            })
            .collect();
        // odometer with site 0 as the most significant digit
        self.done = true;
        for s in (0..self.digits.len()).rev() {
            self.digits[s] += 1;
            if self.digits[s] < self.radices[s] {
                self.done = false;
                break;
            }
            self.digits[s] = 0;
        }
        Some(Fragment::from_labels(labels))
    }
}

pub fn enumerate_fragments(model: &TildeModel) -> Result<FragmentIter, FragmentError> {
    require_single_generator(model)?;
    let roles = model.site_roles().to_vec();
    let radices = roles
        .iter()
        .map(|r| match r {
            SiteRole::Generator(_) => 3,
            SiteRole::Free => 4,
        })
        .collect();
    let n = roles.len();
    Ok(FragmentIter { radices, roles, digits: vec![0; n], done: false })
}

fn binomial(n: u32, k: u32) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Number of fragments with `k` active sites, for every `k`.
pub fn count_by_size(model: &TildeModel) -> Result<BTreeMap<usize, u128>, FragmentError> {
    require_single_generator(model)?;
    let m = model.n_generators() as u32;
    let free = model.n_qubits() as u32 - m;
    Ok((0..=m)
        .map(|k| (k as usize, binomial(m, k) * (1u128 << (m - k)) * (1u128 << (2 * free))))
        .collect())
}

/// Total fragment count `3^M 4^(N−M)`.
pub fn fragment_count(model: &TildeModel) -> Result<u128, FragmentError> {
    Ok(count_by_size(model)?.values().sum())
}
