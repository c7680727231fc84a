use super::{Graph, MolecularWitness};
use crate::error::{Error, Result};

pub fn gen_complete(n: usize) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("complete graph needs n >= 2, got {n}")));
    }
    let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
    let transposition: Vec<usize> = (0..n).map(|v| if v < 2 { 1 - v } else { v }).collect();
    let rotation: Vec<usize> = (0..n).map(|v| (v + 1) % n).collect();
    Graph::new(n, edges, format!("complete({n})"))?.with_automorphisms(vec![transposition, rotation])
}

pub fn gen_cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("cycle needs n >= 3, got {n}")));
    }
    let rotation: Vec<usize> = (0..n).map(|v| (v + 1) % n).collect();
    let reflection: Vec<usize> = (0..n).map(|v| (n - v) % n).collect();
    Graph::new(n, (0..n).map(|v| (v, (v + 1) % n)), format!("cycle({n})"))?.with_automorphisms(vec![rotation, reflection])
}

/// `Q_d` on the bit strings `0..2^d`, adjacent when they differ in one bit.
pub fn gen_hypercube(d: usize) -> Result<Graph> {
    if d < 1 {
        return Err(Error::InvalidParameter("hypercube needs dimension >= 1".into()));
    }
    if d > 26 {
        return Err(Error::InvalidParameter(format!("hypercube dimension {d} is too large")));
    }
    let n = 1usize << d;
    let edges = (0..n).flat_map(move |v| (0..d).filter(move |b| v >> b & 1 == 0).map(move |b| (v, v | 1 << b)));
    let mut generators = vec![(0..n).map(|v| v ^ 1).collect::<Vec<_>>()];
    if d >= 2 {
        // swap bits 0 and 1, and rotate all coordinates
        generators.push((0..n).map(|v| (v & !3) | (v >> 1 & 1) | (v & 1) << 1).collect());
        generators.push((0..n).map(|v| ((v << 1) | (v >> (d - 1))) & (n - 1)).collect());
    }
    Graph::new(n, edges, format!("hypercube({d})"))?.with_automorphisms(generators)
}

/// Cartesian product of cycles. Vertices are mixed-radix tuples with the
/// first side length most significant.
pub fn gen_torus(side_lengths: &[usize]) -> Result<Graph> {
    let (&first, rest) = side_lengths
        .split_first()
        .ok_or_else(|| Error::InvalidParameter("torus needs at least one side length".into()))?;
    if let Some(&s) = side_lengths.iter().find(|&&s| s < 3) {
        return Err(Error::InvalidParameter(format!("torus side length must be >= 3, got {s}")));
    }
    let mut g = gen_cycle(first)?;
    for &s in rest {
        g = cartesian_product(&g, &gen_cycle(s)?)?;
    }
    let tag = side_lengths.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",");
    g.family = format!("torus({tag})");
    Ok(g)
}

/// `a □ b`, with the pair `(x, y)` stored as vertex `x * |b| + y`.
///
/// Automorphism generators of both factors are lifted coordinatewise.
pub fn cartesian_product(a: &Graph, b: &Graph) -> Result<Graph> {
    let nb = b.num_vertices();
    let n = a.num_vertices().checked_mul(nb).ok_or_else(|| Error::InvalidParameter("product too large".into()))?;
    let mut edges = Vec::with_capacity(a.num_edges() * nb + b.num_edges() * a.num_vertices());
    for &(x1, x2) in a.edges() {
        edges.extend((0..nb).map(|y| (x1 * nb + y, x2 * nb + y)));
    }
    for x in 0..a.num_vertices() {
        edges.extend(b.edges().iter().map(|&(y1, y2)| (x * nb + y1, x * nb + y2)));
    }
    let mut generators = Vec::new();
    for sigma in a.automorphisms() {
        generators.push((0..n).map(|v| sigma[v / nb] * nb + v % nb).collect());
    }
    for tau in b.automorphisms() {
        generators.push((0..n).map(|v| (v / nb) * nb + tau[v % nb]).collect());
    }
    let family = format!("product({},{})", a.family(), b.family());
    Graph::new(n, edges, family)?.with_automorphisms(generators)
}

/// `atom □ K_m` together with the witness that it splits into `m` atoms.
///
/// The bridge set is every edge joining two different copies of the atom;
/// its size is `|V| (m - 1) / 2`, which is the recorded constant.
pub fn gen_molecular(atom: &Graph, m: usize) -> Result<Graph> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!("molecular product needs m >= 2, got {m}")));
    }
    let g = cartesian_product(atom, &gen_complete(m)?)?;
    let bridges: Vec<usize> = g
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, &(u, v))| u % m != v % m)
        .map(|(e, _)| e)
        .collect();
    let atoms = (0..m).map(|i| (0..atom.num_vertices()).map(|a| a * m + i).collect()).collect();
    let witness = MolecularWitness {
        bridges,
        atoms,
        generators: g.automorphisms().to_vec(),
        constant: Some((m - 1) as f64 / 2.0),
    };
    let family = format!("molecular({},{m})", atom.family());
    let mut g = g.with_witness(witness);
    g.family = family;
    Ok(g)
}
