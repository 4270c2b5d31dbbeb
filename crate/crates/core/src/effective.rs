//! Restriction of the Lindbladian to a fragment, written in pseudospins.
//!
//! On an active site the basis strings `X̃` and `Ỹ` are the pseudospin states
//! up (bit 0) and down (bit 1); the first active site is the most
//! significant bit of the pseudospin index.

use std::collections::HashMap;
use std::fmt;

use faer::Mat;
use thiserror::Error;

use crate::fragments::{Fragment, FragmentError, SiteLabel};
use crate::frustration::{FrustrationGraph, VertexKind};
use crate::linalg::{c, LinalgError, C64};
use crate::model::{BuiltinKind, TildeModel};
use crate::pauli::{Pauli, PauliError, PauliString};

pub use crate::tfim::TfimSpec;

/// Largest pseudospin count materialized as a dense matrix by default.
pub const DEFAULT_DENSE_CAP: usize = 14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EffectiveError {
    #[error(transparent)]
    Fragment(#[from] FragmentError),
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("hamiltonian term {0} maps the fragment outside itself")]
    NotClosed(usize),
    #[error("{k} pseudospins exceed the dense cap {max}; only the term list is available")]
    TooLarge { k: usize, max: usize },
    #[error("explicit fragments have no pseudospin term list")]
    NoTermList,
    #[error("operation requires the {expected} builtin model")]
    WrongModel { expected: &'static str },
    #[error("subsystem is not a path: {0}")]
    NotPath(&'static str),
    #[error("couplings are not uniform: {0}")]
    NonUniform(&'static str),
    #[error("unexpected effective term {0}")]
    UnexpectedTerm(String),
}

/// Restricted generator of one fragment or one subsystem of it.
#[derive(Debug, Clone)]
pub struct EffectiveGenerator {
    fragment: Fragment,
    sites: Vec<usize>,
    terms: Option<Vec<(C64, PauliString)>>,
    matrix: Option<Mat<C64>>,
    dim: usize,
}

fn letters_anticommute(a: Pauli, b: Pauli) -> bool {
    a != Pauli::I && b != Pauli::I && a != b
}

struct TermAccumulator {
    k: usize,
    map: HashMap<PauliString, C64>,
}

impl TermAccumulator {
    fn new(k: usize) -> Self {
        TermAccumulator { k, map: HashMap::new() }
    }

    fn add(&mut self, coeff: C64, string: PauliString) {
        *self.map.entry(string).or_insert(c(0.0, 0.0)) += coeff;
    }

    fn finish(self) -> Vec<(C64, PauliString)> {
        let mut out: Vec<(C64, PauliString)> =
            self.map.into_iter().filter(|(_, v)| *v != c(0.0, 0.0)).map(|(p, v)| (v, p)).collect();
        out.sort_by_cached_key(|(_, p)| p.letters().map(Pauli::index).collect::<Vec<_>>());
        if out.is_empty() {
            out.push((c(0.0, 0.0), PauliString::identity(self.k)));
        }
        out
    }
}

/// Renders a term list as a dense `2^k × 2^k` matrix.
pub fn dense_from_terms(k: usize, terms: &[(C64, PauliString)]) -> Mat<C64> {
    let dim = 1usize << k;
    let mut m = Mat::<C64>::zeros(dim, dim);
    for (coeff, p) in terms {
        for col in 0..dim {
            let (row, amp) = p.apply_to_basis(col);
            m[(row, col)] += coeff * amp;
        }
    }
    m
}

/// Which Hamiltonian terms and jumps enter, and which sites are pseudospins.
struct Selection {
    hamiltonian: Vec<usize>,
    jumps: Vec<usize>,
    sites: Vec<usize>,
}

fn build_terms(
    model: &TildeModel,
    fragment: &Fragment,
    sel: &Selection,
) -> Result<Vec<(C64, PauliString)>, EffectiveError> {
    let n = model.n_qubits();
    let k = sel.sites.len();
    let mut pos = vec![None; n];
    sel.sites.iter().enumerate().for_each(|(i, &s)| pos[s] = Some(i));
    let is_active = |s: usize| fragment.labels()[s] == SiteLabel::Active;
    let mut acc = TermAccumulator::new(k);

    for &l in &sel.hamiltonian {
        let term = &model.base().hamiltonian()[l];
        let support = model.term_sites(l);
        let n_active = support.iter().filter(|&&s| is_active(s)).count();
        if n_active % 2 == 0 {
            continue;
        }
        if n_active != support.len() {
            return Err(EffectiveError::NotClosed(l));
        }
        // left multiplication by Z̃ is σʸ on X̃ = ↑, Ỹ = ↓
        let mut p = PauliString::identity(k);
        for s in support {
            let i = pos[s].ok_or(EffectiveError::NotClosed(l))?;
            p.set(i, Pauli::Y)?;
        }
        acc.add(c(0.0, -2.0 * term.coeff), p);
    }

    for &j in &sel.jumps {
        let rate = model.base().jumps()[j].rate;
        let (sign, z_sites) = jump_action(model, fragment, j);
        let mut z = PauliString::identity(k);
        for s in z_sites {
            z.set(pos[s].ok_or(EffectiveError::NotClosed(j))?, Pauli::Z)?;
        }
        acc.add(c(2.0 * rate * sign as f64, 0.0), z);
        acc.add(c(-2.0 * rate, 0.0), PauliString::identity(k));
    }
    Ok(acc.finish())
}

/// Sign `s` and active sites of the `σᶻ` string with `d_j ↦ 2(s·σᶻ… − 1)`.
fn jump_action(model: &TildeModel, fragment: &Fragment, j: usize) -> (i8, Vec<usize>) {
    let jump = &model.base().jumps()[j];
    let mut sign = 1i8;
    let mut sites = Vec::new();
    for (s, label) in fragment.labels().iter().enumerate() {
        let f = jump.pauli.get(s);
        if *label == SiteLabel::Active {
            match f {
                Pauli::I => {}
                Pauli::X => sites.push(s),
                Pauli::Y => {
                    sites.push(s);
                    sign = -sign;
                }
                Pauli::Z => sign = -sign,
            }
        } else if letters_anticommute(f, label.letter()) {
            sign = -sign;
        }
    }
    (sign, sites)
}

/// Direct matrix of an explicitly listed fragment.
fn explicit_matrix(model: &TildeModel, members: &[PauliString]) -> Result<Mat<C64>, EffectiveError> {
    let dim = members.len();
    let index: HashMap<&PauliString, usize> = members.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut mat = Mat::<C64>::zeros(dim, dim);
    for (col, m) in members.iter().enumerate() {
        for (l, term) in model.base().hamiltonian().iter().enumerate() {
            if term.pauli.symplectic(m) {
                let image = term.pauli.mul_unchecked(m);
                let row = *index.get(&image.unsigned()).ok_or(EffectiveError::NotClosed(l))?;
                mat[(row, col)] += c(0.0, -2.0 * term.coeff) * image.phase().value();
            }
        }
        for jump in model.base().jumps() {
            if jump.pauli.symplectic(m) {
                mat[(col, col)] += c(-4.0 * jump.rate, 0.0);
            }
        }
    }
    Ok(mat)
}

/// Restricted generator of the whole fragment.
pub fn restrict(model: &TildeModel, fragment: &Fragment) -> Result<EffectiveGenerator, EffectiveError> {
    restrict_with_cap(model, fragment, DEFAULT_DENSE_CAP)
}

pub fn restrict_with_cap(
    model: &TildeModel,
    fragment: &Fragment,
    dense_cap: usize,
) -> Result<EffectiveGenerator, EffectiveError> {
    if fragment.n_qubits() != model.n_qubits() {
        return Err(FragmentError::Mismatch("qubit count differs").into());
    }
    if let Some(members) = fragment.explicit_members() {
        let dim = members.len();
        if dim > 1 << dense_cap {
            return Err(EffectiveError::TooLarge { k: dim.ilog2() as usize, max: dense_cap });
        }
        return Ok(EffectiveGenerator {
            fragment: fragment.clone(),
            sites: Vec::new(),
            terms: None,
            matrix: Some(explicit_matrix(model, members)?),
            dim,
        });
    }
    let sel = Selection {
        hamiltonian: (0..model.base().hamiltonian().len()).collect(),
        jumps: (0..model.base().jumps().len()).collect(),
        sites: fragment.active_sites().to_vec(),
    };
    finish(model, fragment, sel, dense_cap)
}

fn finish(
    model: &TildeModel,
    fragment: &Fragment,
    sel: Selection,
    dense_cap: usize,
) -> Result<EffectiveGenerator, EffectiveError> {
    let terms = build_terms(model, fragment, &sel)?;
    let k = sel.sites.len();
    let matrix = (k <= dense_cap).then(|| dense_from_terms(k, &terms));
    Ok(EffectiveGenerator {
        fragment: fragment.clone(),
        sites: sel.sites,
        terms: Some(terms),
        matrix,
        dim: 1 << k,
    })
}

/// Restricted generator of one independent subsystem of a fragment.
pub fn restrict_subsystem(
    model: &TildeModel,
    fragment: &Fragment,
    graph: &FrustrationGraph,
    component: &[usize],
) -> Result<EffectiveGenerator, EffectiveError> {
    if fragment.is_explicit() {
        return Err(EffectiveError::NoTermList);
    }
    let mut sel = Selection { hamiltonian: Vec::new(), jumps: Vec::new(), sites: Vec::new() };
    for &v in component {
        let vert = &graph.vertices()[v];
        match vert.kind {
            VertexKind::Unitary => {
                sel.hamiltonian.push(vert.term);
                let sites = model.term_sites(vert.term);
                sel.sites.extend(sites.into_iter().filter(|&s| fragment.labels()[s] == SiteLabel::Active));
            }
            VertexKind::Dissipative => sel.jumps.push(vert.term),
        }
    }
    sel.sites.sort_unstable();
    sel.sites.dedup();
    finish(model, fragment, sel, DEFAULT_DENSE_CAP)
}

impl EffectiveGenerator {
    pub fn fragment(&self) -> &Fragment {
        &self.fragment
    }

    /// Tilde sites carried by the pseudospins, ascending.
    pub fn pseudospin_sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn n_pseudospins(&self) -> usize {
        self.sites.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> Result<&[(C64, PauliString)], EffectiveError> {
        self.terms.as_deref().ok_or(EffectiveError::NoTermList)
    }

    pub fn matrix(&self) -> Result<&Mat<C64>, EffectiveError> {
        self.matrix
            .as_ref()
            .ok_or(EffectiveError::TooLarge { k: self.sites.len(), max: DEFAULT_DENSE_CAP })
    }

    /// Coefficient of the identity string (the dissipative constant).
    pub fn constant(&self) -> C64 {
        match &self.terms {
            Some(t) => t
                .iter()
                .find(|(_, p)| p.is_identity_letters())
                .map(|(v, _)| *v)
                .unwrap_or(c(0.0, 0.0)),
            None => c(0.0, 0.0),
        }
    }
}

impl fmt::Display for EffectiveGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "fragment {} ({} pseudospins)", self.fragment, self.sites.len())?;
        match &self.terms {
            None => writeln!(f, "explicit fragment of dimension {}", self.dim),
            Some(terms) => {
                for (v, p) in terms {
                    let label = if p.is_identity_letters() { "1".to_string() } else { sigma_label(p) };
                    writeln!(f, "{:+.6}{:+.6}i  {}", v.re, v.im, label)?;
                }
                Ok(())
            }
        }
    }
}

fn sigma_label(p: &PauliString) -> String {
    p.letters()
        .enumerate()
        .filter(|(_, q)| *q != Pauli::I)
        .map(|(i, q)| format!("s{}_{}", q.as_char().to_ascii_lowercase(), i + 1))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Three-, two- and one-site `σᶻ` coefficients of a Y-jump generator, in
/// units of `2κ`.
#[derive(Debug, Clone, PartialEq)]
pub struct YCoefficients {
    pub three: Vec<f64>,
    pub two: Vec<f64>,
    pub one: Vec<f64>,
    pub kappa: f64,
}

fn uniform(values: impl Iterator<Item = f64>, what: &'static str) -> Result<Option<f64>, EffectiveError> {
    let v: Vec<f64> = values.collect();
    match v.first() {
        None => Ok(None),
        Some(&first) if v.iter().all(|&x| x == first) => Ok(Some(first)),
        Some(_) => Err(EffectiveError::NonUniform(what)),
    }
}

pub fn y_coefficients(model: &TildeModel, gen: &EffectiveGenerator) -> Result<YCoefficients, EffectiveError> {
    if model.base().origin() != Some(BuiltinKind::ClusterY) {
        return Err(EffectiveError::WrongModel { expected: "cluster_y" });
    }
    let kappa = uniform(model.base().jumps().iter().map(|f| f.rate), "jump rates")?.unwrap_or(0.0);
    let k = gen.n_pseudospins();
    let mut out = YCoefficients {
        three: vec![0.0; k.saturating_sub(2)],
        two: vec![0.0; k.saturating_sub(1)],
        one: vec![0.0; k],
        kappa,
    };
    for (v, p) in gen.terms()? {
        if p.is_identity_letters() || p.letters().any(|q| q == Pauli::Y) {
            continue;
        }
        let support = p.support();
        let span = support.len();
        let consecutive = support.windows(2).all(|w| w[1] == w[0] + 1);
        if !consecutive || span > 3 || p.letters().any(|q| q == Pauli::X) || v.im != 0.0 {
            return Err(EffectiveError::UnexpectedTerm(p.to_string()));
        }
        let value = v.re / (2.0 * kappa);
        let slot = match span {
            1 => &mut out.one,
            2 => &mut out.two,
            _ => &mut out.three,
        };
        slot[support[0]] = value;
    }
    Ok(out)
}

impl YCoefficients {
    /// Term list rebuilt from the coefficients plus the hopping part.
    pub fn to_terms(&self, j: f64, k: usize) -> Vec<(C64, PauliString)> {
        let mut out = Vec::new();
        for i in 0..k {
            out.push((c(0.0, -2.0 * j), PauliString::single(k, i, Pauli::Y).unwrap()));
        }
        let groups: [(&Vec<f64>, usize); 3] = [(&self.one, 1), (&self.two, 2), (&self.three, 3)];
        for (values, span) in groups {
            for (start, &v) in values.iter().enumerate() {
                if v != 0.0 {
                    let mut p = PauliString::identity(k);
                    (start..start + span).for_each(|s| p.set(s, Pauli::Z).unwrap());
                    out.push((c(2.0 * self.kappa * v, 0.0), p));
                }
            }
        }
        out
    }
}

/// Maps a path-shaped subsystem of a `cluster_ziz` fragment to the
/// equivalent Ising chain with an imaginary transverse field.
pub fn ziz_tfim(
    model: &TildeModel,
    fragment: &Fragment,
    graph: &FrustrationGraph,
    component: &[usize],
) -> Result<TfimSpec, EffectiveError> {
    if model.base().origin() != Some(BuiltinKind::ClusterZiz) {
        return Err(EffectiveError::WrongModel { expected: "cluster_ziz" });
    }
    if graph.path_order(component).is_none() {
        return Err(EffectiveError::NotPath("component has a branch or a cycle"));
    }
    let units: Vec<usize> =
        component.iter().copied().filter(|&v| graph.vertices()[v].kind == VertexKind::Unitary).collect();
    if units.is_empty() {
        return Err(EffectiveError::NotPath("no active sites"));
    }
    let j = uniform(units.iter().map(|&v| model.base().hamiltonian()[graph.vertices()[v].term].coeff), "J")?
        .unwrap_or(0.0);
    let dissipators: Vec<usize> =
        component.iter().copied().filter(|&v| graph.vertices()[v].kind == VertexKind::Dissipative).collect();
    let kappa =
        uniform(dissipators.iter().map(|&v| model.base().jumps()[graph.vertices()[v].term].rate), "kappa")?
            .unwrap_or(0.0);

    let gen = restrict_subsystem(model, fragment, graph, component)?;
    let sites = gen.pseudospin_sites().to_vec();
    let first_site = sites[0];
    let last_site = *sites.last().unwrap();
    let mut eps_left = 0i8;
    let mut eps_right = 0i8;
    for &v in &dissipators {
        let vert = &graph.vertices()[v];
        let inside = component.iter().filter(|&&w| graph.adjacent(v, w)).count();
        let (sign, _) = jump_action(model, fragment, vert.term);
        match inside {
            2 => {
                if sign != 1 {
                    return Err(EffectiveError::NotPath("bond with negative sign"));
                }
            }
            1 => {
                let min = *vert.support.first().unwrap();
                let max = *vert.support.last().unwrap();
                if min < first_site {
                    eps_left = sign;
                } else if max > last_site {
                    eps_right = sign;
                } else {
                    return Err(EffectiveError::NotPath("pendant dissipator inside the chain"));
                }
            }
            _ => return Err(EffectiveError::NotPath("dissipator with unexpected degree")),
        }
    }
    let sector = if eps_left != 0 && eps_right != 0 { eps_left * eps_right } else { 1 };
    Ok(TfimSpec {
        n_sites: units.len() + 1,
        j,
        kappa,
        zeta_left: eps_left != 0,
        zeta_right: eps_right != 0,
        sector,
    })
}
