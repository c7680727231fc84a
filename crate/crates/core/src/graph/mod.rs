//! Finite transitive graph families and their structural quantities.
//!
//! A [`Graph`] is immutable once built. Its edge list is stored in
//! lexicographic order of `(u, v)` with `u < v`, and the position of an edge
//! in that list is its index everywhere else in the crate: configurations,
//! exploration orders and enumeration masks are all keyed by it.

mod families;
mod io;
mod molecular;
mod spec;
mod spectral;

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::sync::OnceLock;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use families::{cartesian_product, gen_complete, gen_cycle, gen_hypercube, gen_molecular, gen_torus};
pub use io::{read_edge_list, write_edge_list};
pub use spec::parse_graph;
pub use molecular::{verify_molecular_witness, MolecularReport, MolecularWitness};
pub use spectral::{power_iteration_radius, DEFAULT_TOL, spectral_radius, spectral_radius_by_power_iteration, PowerIteration};

/// The distinguished vertex `o`. All constructed families are transitive, so
/// any fixed choice is as good as another.
pub const ROOT: usize = 0;

#[derive(Debug, Clone)]
pub struct Graph {
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<(usize, usize)>>,
    degree: usize,
    family: String,
    automorphisms: Vec<Vec<usize>>,
    witness: Option<MolecularWitness>,
    id: OnceLock<String>,
}

impl Graph {
    /// Builds a graph from an arbitrary list of vertex pairs.
    ///
    /// Pairs are normalised to `u < v` and sorted, which fixes the edge
    /// enumeration. Self-loops, parallel edges, disconnected inputs and
    /// non-regular inputs are rejected.
    pub fn new(num_vertices: usize, edges: impl IntoIterator<Item = (usize, usize)>, family: impl Into<String>) -> Result<Graph> {
        if num_vertices == 0 {
            return Err(Error::InvalidParameter("graph needs at least one vertex".into()));
        }
        let mut list = Vec::new();
        for (a, b) in edges {
            if a >= num_vertices || b >= num_vertices {
                return Err(Error::InvalidIndex(format!("edge ({a}, {b}) with {num_vertices} vertices")));
            }
            if a == b {
                return Err(Error::InvalidParameter(format!("self-loop at vertex {a}")));
            }
            list.push((a.min(b), a.max(b)));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter(format!("parallel edge ({}, {})", w[0].0, w[0].1)));
        }

        let mut adjacency = vec![Vec::new(); num_vertices];
        for (e, &(u, v)) in list.iter().enumerate() {
            adjacency[u].push((v, e));
            adjacency[v].push((u, e));
        }
        let degree = adjacency[0].len();
        if let Some(v) = adjacency.iter().position(|a| a.len() != degree) {
            return Err(Error::InvalidParameter(format!(
                "graph is not regular: vertex {v} has degree {} but vertex 0 has degree {degree}",
                adjacency[v].len()
            )));
        }

        let graph = Graph {
            num_vertices,
            edges: list,
            adjacency,
            degree,
            family: family.into(),
            automorphisms: Vec::new(),
            witness: None,
            id: OnceLock::new(),
        };
        if !graph.is_connected() {
            return Err(Error::InvalidParameter("graph is not connected".into()));
        }
        Ok(graph)
    }

    /// Attaches family-supplied automorphism generators. Each must be a
    /// permutation of the vertex set; whether it preserves adjacency is
    /// checked by [`verify_molecular_witness`], not here.
    pub fn with_automorphisms(mut self, generators: Vec<Vec<usize>>) -> Result<Graph> {
        for g in &generators {
            check_permutation(g, self.num_vertices)?;
        }
        self.automorphisms = generators;
        Ok(self)
    }

    pub(crate) fn with_witness(mut self, witness: MolecularWitness) -> Graph {
        self.witness = Some(witness);
        self
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    /// `(neighbor, edge index)` pairs incident to `v`.
    pub fn adjacency(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn family(&self) -> &str {
        &self.family
    }

    pub fn automorphisms(&self) -> &[Vec<usize>] {
        &self.automorphisms
    }

    pub fn witness(&self) -> Option<&MolecularWitness> {
        self.witness.as_ref()
    }

    /// Index of the edge `{u, v}`, if present.
    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        let key = (u.min(v), u.max(v));
        self.edges.binary_search(&key).ok()
    }

    /// Short content hash of the canonical edge list. Two graphs with the
    /// same vertex count and edge enumeration share an id.
    pub fn id(&self) -> &str {
        self.id.get_or_init(|| {
            let mut hasher = Sha256::new();
            let mut line = String::new();
            let _ = writeln!(line, "p {} {}", self.num_vertices, self.edges.len());
            hasher.update(line.as_bytes());
            for &(u, v) in &self.edges {
                line.clear();
                let _ = writeln!(line, "{u} {v}");
                hasher.update(line.as_bytes());
            }
            hex::encode(&hasher.finalize()[..8])
        })
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.num_vertices];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &(w, _) in &self.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.num_vertices
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Graph) -> bool {
        self.num_vertices == other.num_vertices && self.edges == other.edges
    }
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::InvalidIndex(format!("permutation of length {} on {n} vertices", perm.len())));
    }
    let mut seen = vec![false; n];
    for &x in perm {
        if x >= n || seen[x] {
            return Err(Error::InvalidIndex(format!("not a permutation of 0..{n}")));
        }
        seen[x] = true;
    }
    Ok(())
}

/// Whether `perm` maps every edge of `g` onto an edge of `g`.
pub fn is_automorphism(g: &Graph, perm: &[usize]) -> bool {
    perm.len() == g.num_vertices() && g.edges().iter().all(|&(u, v)| g.edge_index(perm[u], perm[v]).is_some())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_malformed_edge_lists() {
        assert!(matches!(Graph::new(3, [(0, 0), (1, 2)], "x"), Err(Error::InvalidParameter(_))));
        assert!(matches!(Graph::new(2, [(0, 1), (1, 0)], "x"), Err(Error::InvalidParameter(_))));
        assert!(matches!(Graph::new(2, [(0, 5)], "x"), Err(Error::InvalidIndex(_))));
        // two disjoint edges: regular but disconnected
        assert!(matches!(Graph::new(4, [(0, 1), (2, 3)], "x"), Err(Error::InvalidParameter(_))));
        // path on three vertices is not regular
        assert!(matches!(Graph::new(3, [(0, 1), (1, 2)], "x"), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn edges_are_sorted_lexicographically() {
        let g = Graph::new(3, [(2, 1), (1, 0), (2, 0)], "triangle").unwrap();
        assert_eq!(g.edges(), &[(0, 1), (0, 2), (1, 2)]);
        assert_eq!(g.edge_index(2, 1), Some(2));
        assert_eq!(g.edge_index(0, 0), None);
    }

    #[test]
    fn id_depends_only_on_structure() {
        let a = Graph::new(3, [(0, 1), (1, 2), (0, 2)], "a").unwrap();
        let b = Graph::new(3, [(1, 2), (0, 2), (1, 0)], "b").unwrap();
        assert_eq!(a.id(), b.id());
        assert_eq!(a.id().len(), 16);
        assert_ne!(a.id(), gen_complete(4).unwrap().id());
    }
}
