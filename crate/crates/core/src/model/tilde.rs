//! Stabilizer-generator basis in which every Hamiltonian term is a product
//! of single-site `Z̃` operators.

use crate::pauli::{Pauli, PauliString};
use crate::symplectic::SymplecticMap;

use super::{Basis, HamiltonianTerm, JumpOperator, LindbladModel, ModelError};

/// What a tilde site carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SiteRole {
    /// Site of the generator with this index.
    Generator(usize),
    Free,
}

/// A model rewritten in its generator basis.
#[derive(Debug, Clone)]
pub struct TildeModel {
    physical: LindbladModel,
    base: LindbladModel,
    generator_terms: Vec<usize>,
    generator_sites: Vec<usize>,
    roles: Vec<SiteRole>,
    term_exponents: Vec<Vec<bool>>,
    to_physical: SymplecticMap,
    to_tilde: SymplecticMap,
}

fn bit(p: &PauliString, idx: usize) -> bool {
    let n = p.n_qubits();
    if idx < n {
        p.x_bit(idx)
    } else {
        p.z_bit(idx - n)
    }
}

/// Lowest set index of the concatenated `(x|z)` vector.
fn pivot_of(p: &PauliString) -> Option<usize> {
    let n = p.n_qubits();
    (0..n).find(|&s| p.x_bit(s)).or_else(|| (0..n).find(|&s| p.z_bit(s)).map(|s| s + n))
}

fn times(a: &PauliString, b: &PauliString) -> PauliString {
    a.mul_unchecked(b).unsigned()
}

/// Inverse of a square matrix over GF(2); `None` when singular.
fn gf2_inverse(a: &[Vec<bool>]) -> Option<Vec<Vec<bool>>> {
    let m = a.len();
    let mut work: Vec<Vec<bool>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..m).map(|j| i == j));
            r
        })
        .collect();
    for col in 0..m {
        let piv = (col..m).find(|&r| work[r][col])?;
        work.swap(col, piv);
        for r in 0..m {
            if r != col && work[r][col] {
                let src = work[col].clone();
                work[r].iter_mut().zip(&src).for_each(|(a, b)| *a ^= b);
            }
        }
    }
    Some(work.into_iter().map(|r| r[m..].to_vec()).collect())
}

impl TildeModel {
    pub fn new(model: &LindbladModel) -> Result<Self, ModelError> {
        let report = model.validate();
        if !report.is_valid() {
            return Err(ModelError::Invalid(report));
        }
        let n = model.n_qubits();
        let terms = model.hamiltonian();
        let n_terms = terms.len();

        // Row reduction in term order; rows kept sorted by pivot.
        struct Row {
            bits: PauliString,
            pivot: usize,
            comb: Vec<bool>,
        }
        let mut rows: Vec<Row> = Vec::new();
        let mut generator_terms = Vec::new();
        let mut pivots = Vec::new();
        let mut combos: Vec<Option<Vec<bool>>> = vec![None; n_terms];
        for (t, term) in terms.iter().enumerate() {
            let mut v = term.pauli.unsigned();
            let mut comb = vec![false; n_terms];
            comb[t] = true;
            for row in &rows {
                if bit(&v, row.pivot) {
                    v = times(&v, &row.bits);
                    comb.iter_mut().zip(&row.comb).for_each(|(a, b)| *a ^= b);
                }
            }
            match pivot_of(&v) {
                None => {
                    comb[t] = false;
                    combos[t] = Some(comb);
                }
                Some(pivot) => {
                    generator_terms.push(t);
                    pivots.push(pivot);
                    let at = rows.partition_point(|r| r.pivot < pivot);
                    rows.insert(at, Row { bits: v, pivot, comb });
                }
            }
        }
        let m = generator_terms.len();
        let gens: Vec<PauliString> =
            generator_terms.iter().map(|&t| terms[t].pauli.unsigned()).collect();

        let term_exponents: Vec<Vec<bool>> = (0..n_terms)
            .map(|t| match &combos[t] {
                None => (0..m).map(|g| generator_terms[g] == t).collect(),
                Some(comb) => generator_terms.iter().map(|&gt| comb[gt]).collect(),
            })
            .collect();

        // Destabilizers: d = A⁻¹ c with A_ij = ⟨c_i, g_j⟩.
        let candidates: Vec<PauliString> = pivots
            .iter()
            .map(|&p| {
                if p < n {
                    PauliString::single(n, p, Pauli::Z).unwrap()
                } else {
                    PauliString::single(n, p - n, Pauli::X).unwrap()
                }
            })
            .collect();
        let a: Vec<Vec<bool>> =
            candidates.iter().map(|c| gens.iter().map(|g| c.symplectic(g)).collect()).collect();
        let inv = gf2_inverse(&a).expect("generator rows are independent");
        let mut destab: Vec<PauliString> = inv
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&candidates)
                    .filter(|(&b, _)| b)
                    .fold(PauliString::identity(n), |acc, (_, c)| times(&acc, c))
            })
            .collect();
        for i in 0..m {
            for j in 0..i {
                if destab[i].symplectic(&destab[j]) {
                    destab[i] = times(&destab[i], &gens[j]);
                }
            }
        }

        // Tilde sites for generators.
        let mut used = vec![false; n];
        let pivot_site: Vec<usize> = pivots.iter().map(|&p| p % n).collect();
        let mut is_pivot_site = vec![false; n];
        pivot_site.iter().for_each(|&s| is_pivot_site[s] = true);
        let mut generator_sites = Vec::with_capacity(m);
        for &s in &pivot_site {
            let site = if !used[s] {
                s
            } else {
                (0..n)
                    .find(|&q| !used[q] && !is_pivot_site[q])
                    .expect("a free site remains when pivots collide")
            };
            used[site] = true;
            generator_sites.push(site);
        }

        let mut z_images: Vec<Option<PauliString>> = vec![None; n];
        let mut x_images: Vec<Option<PauliString>> = vec![None; n];
        let mut pairs: Vec<(PauliString, PauliString)> = Vec::new();
        for g in 0..m {
            z_images[generator_sites[g]] = Some(gens[g].clone());
            x_images[generator_sites[g]] = Some(destab[g].clone());
            pairs.push((gens[g].clone(), destab[g].clone()));
        }

        // Complete the free sites with projected single-qubit candidates.
        let x_oriented = pivots.first().is_some_and(|&p| p < n);
        let project = |mut v: PauliString, pairs: &[(PauliString, PauliString)]| {
            for (g, d) in pairs {
                if v.symplectic(g) {
                    v = times(&v, d);
                }
                if v.symplectic(d) {
                    v = times(&v, g);
                }
            }
            v
        };
        for q in 0..n {
            if used[q] {
                continue;
            }
            let (zc, xc) = if x_oriented { (Pauli::X, Pauli::Z) } else { (Pauli::Z, Pauli::X) };
            let mut pool = vec![
                PauliString::single(n, q, zc).unwrap(),
                PauliString::single(n, q, xc).unwrap(),
            ];
            for s in 0..n {
                pool.push(PauliString::single(n, s, Pauli::X).unwrap());
                pool.push(PauliString::single(n, s, Pauli::Z).unwrap());
            }
            let projected: Vec<PauliString> = pool.into_iter().map(|v| project(v, &pairs)).collect();
            let a = projected
                .iter()
                .find(|v| !v.is_identity_letters())
                .cloned()
                .expect("symplectic complement is nonempty");
            let b = projected
                .iter()
                .find(|v| a.symplectic(v))
                .cloned()
                .expect("complement is symplectic");
            used[q] = true;
            z_images[q] = Some(a.clone());
            x_images[q] = Some(b.clone());
            pairs.push((a, b));
        }

        let to_physical = SymplecticMap::from_images(
            x_images.into_iter().map(Option::unwrap).collect(),
            z_images.into_iter().map(Option::unwrap).collect(),
        )?;
        let to_tilde = to_physical.inverse();

        let mut roles = vec![SiteRole::Free; n];
        generator_sites.iter().enumerate().for_each(|(g, &s)| roles[s] = SiteRole::Generator(g));

        let tilde_terms = terms
            .iter()
            .map(|t| {
                let image = to_tilde.apply_unchecked(&t.pauli);
                let sign = image.phase().sign().expect("Hermitian image") as f64;
                HamiltonianTerm { coeff: t.coeff * sign, pauli: image.unsigned() }
            })
            .collect();
        let tilde_jumps = model
            .jumps()
            .iter()
            .map(|f| JumpOperator { rate: f.rate, pauli: to_tilde.apply_unchecked(&f.pauli) })
            .collect();
        let mut base = LindbladModel::with_basis(n, tilde_terms, tilde_jumps, Basis::Tilde)?;
        base.set_origin(model.origin());

        let tm = TildeModel {
            physical: model.clone(),
            base,
            generator_terms,
            generator_sites,
            roles,
            term_exponents,
            to_physical,
            to_tilde,
        };
        debug_assert!(tm.terms_are_generator_products());
        Ok(tm)
    }

    fn terms_are_generator_products(&self) -> bool {
        self.base.hamiltonian().iter().zip(&self.term_exponents).all(|(t, e)| {
            let mut expect = PauliString::identity(self.n_qubits());
            for (g, &on) in e.iter().enumerate() {
                if on {
                    expect.set(self.generator_sites[g], Pauli::Z).unwrap();
                }
            }
            t.pauli == expect
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.base.n_qubits()
    }

    pub fn n_generators(&self) -> usize {
        self.generator_sites.len()
    }

    /// Model in the tilde basis; Hamiltonian strings are unsigned `Z̃`
    /// products with any sign folded into the coefficient.
    pub fn base(&self) -> &LindbladModel {
        &self.base
    }

    pub fn physical(&self) -> &LindbladModel {
        &self.physical
    }

    /// Index of the Hamiltonian term chosen as each generator.
    pub fn generator_terms(&self) -> &[usize] {
        &self.generator_terms
    }

    /// Tilde site of each generator.
    pub fn generator_sites(&self) -> &[usize] {
        &self.generator_sites
    }

    pub fn site_roles(&self) -> &[SiteRole] {
        &self.roles
    }

    pub fn free_sites(&self) -> Vec<usize> {
        (0..self.n_qubits()).filter(|&s| self.roles[s] == SiteRole::Free).collect()
    }

    /// Per Hamiltonian term, which generators appear in its product.
    pub fn term_exponents(&self) -> &[Vec<bool>] {
        &self.term_exponents
    }

    /// Tilde sites touched by each Hamiltonian term.
    pub fn term_sites(&self, term: usize) -> Vec<usize> {
        self.term_exponents[term]
            .iter()
            .enumerate()
            .filter(|(_, &on)| on)
            .map(|(g, _)| self.generator_sites[g])
            .collect()
    }

    /// True when every Hamiltonian term is a single generator.
    pub fn single_generator_terms(&self) -> bool {
        self.term_exponents.iter().all(|e| e.iter().filter(|&&b| b).count() <= 1)
    }

    /// Map sending tilde-basis strings to physical strings.
    pub fn to_physical_map(&self) -> &SymplecticMap {
        &self.to_physical
    }

    /// Map sending physical strings to tilde-basis strings.
    pub fn to_tilde_map(&self) -> &SymplecticMap {
        &self.to_tilde
    }

    pub fn to_physical(&self, tilde: &PauliString) -> Result<PauliString, crate::pauli::PauliError> {
        self.to_physical.apply_map(tilde)
    }

    pub fn to_tilde(&self, physical: &PauliString) -> Result<PauliString, crate::pauli::PauliError> {
        self.to_tilde.apply_map(physical)
    }
}
