use std::collections::BTreeSet;

use num_rational::Ratio;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::{check_permutation, is_automorphism, Graph};
use crate::error::{Error, Result};
use crate::percolation::UnionFind;

/// A certificate that a graph splits into `m` atoms along a small,
/// symmetric bridge set.
///
/// Witnesses are only produced by constructing families; nothing in this
/// crate searches for one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct MolecularWitness {
    /// Edge indices of the bridge set.
    pub bridges: Vec<usize>,
    /// Vertex blocks expected to be the components once bridges are removed.
    pub atoms: Vec<Vec<usize>>,
    /// Vertex permutations that should be automorphisms fixing the bridges.
    pub generators: Vec<Vec<usize>>,
    /// Bound `C` with `|bridges| <= C |V|` recorded by the family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<f64>,
}

impl MolecularWitness {
    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MolecularReport {
    /// Components of the graph with the bridge edges deleted.
    pub components: usize,
    /// Those components coincide with the witness's atom blocks.
    pub atoms_match: bool,
    /// Every generator is an automorphism mapping the bridge set onto itself.
    pub invariant_ok: bool,
    /// `|F| / |V|`.
    pub density_ratio: Ratio<u64>,
    /// `|F| <= C |V|` for the recorded constant (true when none is recorded).
    pub size_ok: bool,
}

impl MolecularReport {
    /// All three conditions of the molecular definition hold for this graph.
    pub fn satisfied(&self, atom_count: usize) -> bool {
        atom_count >= 2 && self.components == atom_count && self.atoms_match && self.invariant_ok && self.size_ok
    }
}

pub fn verify_molecular_witness(g: &Graph, w: &MolecularWitness) -> Result<MolecularReport> {
    let n = g.num_vertices();
    let bridges: BTreeSet<usize> = w.bridges.iter().copied().collect();
    if let Some(&e) = bridges.iter().find(|&&e| e >= g.num_edges()) {
        return Err(Error::InvalidIndex(format!("bridge edge {e} out of range")));
    }
    if let Some(&v) = w.atoms.iter().flatten().find(|&&v| v >= n) {
        return Err(Error::InvalidIndex(format!("atom vertex {v} out of range")));
    }
    for sigma in &w.generators {
        check_permutation(sigma, n)?;
    }

    let mut uf = UnionFind::new(n);
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        if !bridges.contains(&e) {
            uf.union(u, v);
        }
    }
    let mut blocks: Vec<Vec<usize>> = uf.sets();
    blocks.sort();
    let mut atoms: Vec<Vec<usize>> = w.atoms.iter().map(|a| {
        let mut a = a.clone();
        a.sort_unstable();
        a
    }).collect();
    atoms.sort();

    let invariant_ok = w.generators.iter().all(|sigma| {
        is_automorphism(g, sigma)
            && bridges.iter().all(|&e| {
                let (u, v) = g.edge(e);
                g.edge_index(sigma[u], sigma[v]).is_some_and(|img| bridges.contains(&img))
            })
    });
    let size_ok = w.constant.is_none_or(|c| bridges.len() as f64 <= c * n as f64);

    Ok(MolecularReport {
        components: blocks.len(),
        atoms_match: blocks == atoms,
        invariant_ok,
        density_ratio: Ratio::new(bridges.len() as u64, n as u64),
        size_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_complete, gen_cycle, gen_hypercube, gen_molecular};

    #[test]
    fn triangle_pair_witness_checks_out() {
        let g = gen_molecular(&gen_complete(3).unwrap(), 2).unwrap();
        let w = g.witness().unwrap();
        let r = verify_molecular_witness(&g, w).unwrap();
        assert_eq!(r.components, 2);
        assert!(r.invariant_ok && r.atoms_match && r.size_ok);
        assert_eq!(r.density_ratio, Ratio::new(3, 6));
        assert!(r.satisfied(w.atom_count()));
    }

    #[test]
    fn empty_bridge_set_fails_component_condition() {
        let g = gen_molecular(&gen_complete(3).unwrap(), 2).unwrap();
        let w = MolecularWitness { bridges: vec![], ..g.witness().unwrap().clone() };
        let r = verify_molecular_witness(&g, &w).unwrap();
        assert_eq!(r.components, 1);
        assert!(!r.satisfied(2));
    }

    #[test]
    fn one_edge_of_k4_does_not_disconnect() {
        let g = gen_complete(4).unwrap();
        let w = MolecularWitness {
            bridges: vec![0],
            atoms: vec![vec![0], vec![1, 2, 3]],
            generators: vec![],
            constant: None,
        };
        let r = verify_molecular_witness(&g, &w).unwrap();
        assert_eq!(r.components, 1);
        assert!(!r.satisfied(2));
    }

    #[test]
    fn generator_moving_bridges_breaks_invariance() {
        let g = gen_molecular(&gen_complete(3).unwrap(), 2).unwrap();
        // The rotation of K_6-labels 0->1->...->5 is not an automorphism here.
        let w = MolecularWitness {
            generators: vec![(0..6).map(|v| (v + 1) % 6).collect()],
            ..g.witness().unwrap().clone()
        };
        assert!(!verify_molecular_witness(&g, &w).unwrap().invariant_ok);
    }

    #[test]
    fn out_of_range_indices_error() {
        let g = gen_complete(4).unwrap();
        let bad_edge = MolecularWitness { bridges: vec![6], atoms: vec![], generators: vec![], constant: None };
        assert!(matches!(verify_molecular_witness(&g, &bad_edge), Err(Error::InvalidIndex(_))));
        let bad_perm = MolecularWitness { bridges: vec![], atoms: vec![], generators: vec![vec![0, 0, 1, 2]], constant: None };
        assert!(matches!(verify_molecular_witness(&g, &bad_perm), Err(Error::InvalidIndex(_))));
    }

    #[test]
    fn constructed_witnesses_verify() {
        for (atom, m) in [
            (gen_complete(3).unwrap(), 2),
            (gen_complete(5).unwrap(), 3),
            (gen_cycle(4).unwrap(), 3),
            (gen_cycle(6).unwrap(), 2),
            (gen_hypercube(3).unwrap(), 4),
        ] {
            let g = gen_molecular(&atom, m).unwrap();
            let w = g.witness().unwrap();
            let r = verify_molecular_witness(&g, w).unwrap();
            assert_eq!(r.components, m, "{}", g.family());
            assert!(r.satisfied(m), "{}", g.family());
        }
    }
}
