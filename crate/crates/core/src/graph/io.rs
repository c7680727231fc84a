//! Plain-text edge lists: a header `p <vertices> <edges>` followed by one
//! `u v` pair per line. Blank lines and lines starting with `c` are skipped.

use std::io::{BufRead, Write};

use super::Graph;
use crate::error::{Error, Result};

pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    writeln!(out, "p {} {}", g.num_vertices(), g.num_edges())?;
    for &(u, v) in g.edges() {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}

pub fn read_edge_list<R: BufRead>(input: R, family: &str) -> Result<Graph> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let bad = || Error::InvalidArgument(format!("edge list line {}: `{line}`", lineno + 1));
        let fields: Vec<&str> = line.split_whitespace().collect();
        match (header, fields.as_slice()) {
            (None, ["p", n, m]) => header = Some((n.parse().map_err(|_| bad())?, m.parse().map_err(|_| bad())?)),
            (Some(_), [u, v]) => edges.push((u.parse().map_err(|_| bad())?, v.parse().map_err(|_| bad())?)),
            _ => return Err(bad()),
        }
    }
    let (n, m) = header.ok_or_else(|| Error::InvalidArgument("edge list has no `p` header".into()))?;
    if edges.len() != m {
        return Err(Error::InvalidArgument(format!("header declares {m} edges, found {}", edges.len())));
    }
    Graph::new(n, edges, family)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_hypercube, gen_torus};

    #[test]
    fn round_trip_preserves_enumeration() {
        for g in [gen_hypercube(3).unwrap(), gen_torus(&[3, 4]).unwrap()] {
            let mut buf = Vec::new();
            write_edge_list(&g, &mut buf).unwrap();
            let back = read_edge_list(buf.as_slice(), g.family()).unwrap();
            assert_eq!(back, g);
            assert_eq!(back.id(), g.id());
        }
    }

    #[test]
    fn header_format() {
        let mut buf = Vec::new();
        write_edge_list(&crate::graph::gen_complete(3).unwrap(), &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "p 3 3\n0 1\n0 2\n1 2\n");
    }

    #[test]
    fn malformed_inputs() {
        assert!(read_edge_list("0 1\n".as_bytes(), "x").is_err());
        assert!(read_edge_list("p 3 3\n0 1\n1 2\n".as_bytes(), "x").is_err());
        assert!(read_edge_list("p 3 3\n0 1\n1 2\n0 x\n".as_bytes(), "x").is_err());
        let g = read_edge_list("c triangle\np 3 3\n\n0 1\n1 2\n2 0\n".as_bytes(), "x").unwrap();
        assert_eq!(g.num_edges(), 3);
    }
}
