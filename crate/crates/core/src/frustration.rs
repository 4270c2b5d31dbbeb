//! Anticommutation graphs of the Lindbladian's superoperator terms.

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::fragments::{Fragment, FragmentError};
use crate::model::TildeModel;
use crate::pauli::PauliString;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VertexKind {
    Unitary,
    Dissipative,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    /// Index of the Hamiltonian term or jump.
    pub term: usize,
    pub kind: VertexKind,
    /// Tilde-basis string of the term.
    pub pauli: PauliString,
    pub support: Vec<usize>,
    pub frozen: bool,
}

impl Vertex {
    pub fn name(&self) -> String {
        match self.kind {
            VertexKind::Unitary => format!("u{}", self.term + 1),
            VertexKind::Dissipative => format!("d{}", self.term + 1),
        }
    }
}

/// Induced star: `center` adjacent to three mutually non-adjacent leaves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Claw {
    pub center: usize,
    pub leaves: [usize; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrustrationGraph {
    vertices: Vec<Vertex>,
    adjacency: Vec<Vec<usize>>,
}

/// Builds the graph with one vertex per commutator `u_l` and per dissipator
/// `d_j`. Commutators always commute with each other and dissipators are
/// diagonal, so edges only join a `u` to a `d` whose strings anticommute.
pub fn build_graph(model: &TildeModel, fragment: Option<&Fragment>) -> Result<FrustrationGraph, FragmentError> {
    if let Some(f) = fragment {
        if f.n_qubits() != model.n_qubits() {
            return Err(FragmentError::Mismatch("qubit count differs"));
        }
    }
    let acts_trivially = |h: &PauliString| match fragment {
        None => false,
        Some(f) => match f.explicit_members() {
            Some(members) => members.iter().all(|m| !h.symplectic(m)),
            None => !h.symplectic(&f.representative()),
        },
    };
    let base = model.base();
    let mut vertices: Vec<Vertex> = base
        .hamiltonian()
        .iter()
        .enumerate()
        .map(|(l, t)| Vertex {
            term: l,
            kind: VertexKind::Unitary,
            support: t.pauli.support(),
            frozen: acts_trivially(&t.pauli),
            pauli: t.pauli.clone(),
        })
        .collect();
    vertices.extend(base.jumps().iter().enumerate().map(|(j, f)| Vertex {
        term: j,
        kind: VertexKind::Dissipative,
        support: f.pauli.support(),
        frozen: false,
        pauli: f.pauli.clone(),
    }));
    let nv = vertices.len();
    let mut adjacency = vec![Vec::new(); nv];
    for a in 0..nv {
        for b in a + 1..nv {
            let mixed = vertices[a].kind != vertices[b].kind;
            if mixed && vertices[a].pauli.symplectic(&vertices[b].pauli) {
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
        }
    }
    Ok(FrustrationGraph { vertices, adjacency })
}

impl FrustrationGraph {
    /// Graph from explicit vertices and edges, mainly for tests.
    pub fn from_edges(vertices: Vec<Vertex>, edges: &[(usize, usize)]) -> Self {
        let mut adjacency = vec![Vec::new(); vertices.len()];
        for &(a, b) in edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        adjacency.iter_mut().for_each(|n| {
            n.sort_unstable();
            n.dedup();
        });
        FrustrationGraph { vertices, adjacency }
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(a, n)| n.iter().filter(move |&&b| b > a).map(move |&b| (a, b)))
            .collect()
    }

    pub fn vertex_of(&self, kind: VertexKind, term: usize) -> Option<usize> {
        self.vertices.iter().position(|v| v.kind == kind && v.term == term)
    }

    fn live_neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[v].iter().copied().filter(|&w| !self.vertices[w].frozen)
    }

    /// Every induced claw among non-frozen vertices.
    pub fn find_claws(&self) -> Vec<Claw> {
        let mut claws = Vec::new();
        for c in (0..self.vertices.len()).filter(|&c| !self.vertices[c].frozen) {
            let nb: Vec<usize> = self.live_neighbors(c).collect();
            for i in 0..nb.len() {
                for j in i + 1..nb.len() {
                    if self.adjacent(nb[i], nb[j]) {
                        continue;
                    }
                    for k in j + 1..nb.len() {
                        if !self.adjacent(nb[i], nb[k]) && !self.adjacent(nb[j], nb[k]) {
                            claws.push(Claw { center: c, leaves: [nb[i], nb[j], nb[k]] });
                        }
                    }
                }
            }
        }
        claws
    }

    pub fn is_claw_free(&self) -> bool {
        self.find_claws().is_empty()
    }

    /// Connected components after deleting frozen vertices, each sorted.
    pub fn subsystem_components(&self) -> Vec<Vec<usize>> {
        let nv = self.vertices.len();
        let mut seen = vec![false; nv];
        let mut out = Vec::new();
        for s in 0..nv {
            if seen[s] || self.vertices[s].frozen {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for w in self.live_neighbors(v) {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// A lone dissipator only contributes a constant inside the fragment.
    pub fn is_trivial(&self, component: &[usize]) -> bool {
        component.iter().all(|&v| self.vertices[v].kind == VertexKind::Dissipative)
    }

    /// Orders the component as a path, or `None` if it is not one.
    pub fn path_order(&self, component: &[usize]) -> Option<Vec<usize>> {
        let inside = |w: &usize| component.binary_search(w).is_ok();
        let degree = |v: usize| self.live_neighbors(v).filter(inside).count();
        if component.len() == 1 {
            return Some(component.to_vec());
        }
        let ends: Vec<usize> = component.iter().copied().filter(|&v| degree(v) == 1).collect();
        if ends.len() != 2 || component.iter().any(|&v| degree(v) > 2) {
            return None;
        }
        let mut order = vec![ends[0]];
        let mut prev = usize::MAX;
        let mut cur = ends[0];
        while let Some(next) = self.live_neighbors(cur).filter(inside).find(|&w| w != prev) {
            order.push(next);
            prev = cur;
            cur = next;
        }
        (order.len() == component.len()).then_some(order)
    }

    /// Graphviz rendering; unitary red, dissipative green, frozen gray.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph frustration {\n  node [style=filled, fontcolor=white];\n");
        for v in &self.vertices {
            let color = match (v.frozen, v.kind) {
                (true, _) => "gray",
                (false, VertexKind::Unitary) => "red",
                (false, VertexKind::Dissipative) => "green",
            };
            let _ = writeln!(s, "  {} [label=\"{}\\n{}\", fillcolor={color}];", v.name(), v.name(), v.pauli);
        }
        for (a, b) in self.edges() {
            let _ = writeln!(s, "  {} -- {};", self.vertices[a].name(), self.vertices[b].name());
        }
        s.push_str("}\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fragments::{fragment_of, parse_seed};
    use crate::model::{builtin, BuiltinKind, LindbladModel};

    fn star() -> FrustrationGraph {
        let v = |term, kind| Vertex { term, kind, pauli: PauliString::identity(1), support: vec![], frozen: false };
        let vertices = vec![
            v(0, VertexKind::Unitary),
            v(0, VertexKind::Dissipative),
            v(1, VertexKind::Dissipative),
            v(2, VertexKind::Dissipative),
        ];
        FrustrationGraph::from_edges(vertices, &[(0, 1), (0, 2), (0, 3)])
    }

    #[test]
    fn star_has_one_claw() {
        let g = star();
        assert_eq!(g.find_claws(), vec![Claw { center: 0, leaves: [1, 2, 3] }]);
    }

    #[test]
    fn single_term_model() {
        let t = LindbladModel::from_strings(1, &[(1.0, "Z")], &[]).unwrap().to_tilde().unwrap();
        let g = build_graph(&t, None).unwrap();
        assert_eq!(g.vertices().len(), 1);
        assert!(g.edges().is_empty());
    }

    #[test]
    fn cluster_y_has_claws() {
        let t = builtin(BuiltinKind::ClusterY, 6, 1.0, 1.0).unwrap().to_tilde().unwrap();
        let g = build_graph(&t, None).unwrap();
        assert!(!g.is_claw_free());
        assert_eq!(g.subsystem_components().len(), 1);
    }

    #[test]
    fn cluster_ziz_splits_by_parity() {
        let t = builtin(BuiltinKind::ClusterZiz, 8, 1.0, 1.0).unwrap().to_tilde().unwrap();
        let g = build_graph(&t, None).unwrap();
        let comps = g.subsystem_components();
        assert_eq!(comps.len(), 2);
        assert!(g.is_claw_free());
        assert!(comps.iter().all(|c| g.path_order(c).is_some()));

        // freezing one bulk odd generator cuts its chain in two
        let f = fragment_of(&t, &parse_seed("I....I..").unwrap()).unwrap();
        let g = build_graph(&t, Some(&f)).unwrap();
        assert_eq!(g.subsystem_components().len(), 3);
    }

    #[test]
    fn cluster_y_single_frozen_site_stays_connected() {
        let t = builtin(BuiltinKind::ClusterY, 8, 1.0, 1.0).unwrap().to_tilde().unwrap();
        let f = fragment_of(&t, &parse_seed("I..I...I").unwrap()).unwrap();
        let g = build_graph(&t, Some(&f)).unwrap();
        assert_eq!(g.subsystem_components().len(), 1);
        let f2 = fragment_of(&t, &parse_seed("I..II..I").unwrap()).unwrap();
        let g2 = build_graph(&t, Some(&f2)).unwrap();
        assert_eq!(g2.subsystem_components().len(), 2);
    }

    #[test]
    fn dot_output_colors() {
        let t = builtin(BuiltinKind::ClusterZiz, 4, 1.0, 1.0).unwrap().to_tilde().unwrap();
        let f = fragment_of(&t, &parse_seed("IZ.I").unwrap()).unwrap();
        let dot = build_graph(&t, Some(&f)).unwrap().to_dot();
        assert!(dot.contains("fillcolor=gray"));
        assert!(dot.contains("fillcolor=green"));
        assert!(dot.contains("fillcolor=red"));
    }
}
