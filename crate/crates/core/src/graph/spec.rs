//! Textual graph descriptions such as `complete(200)`, `torus(32,32)` or
//! `molecular(complete(400),2)`. Every generated graph reports its own
//! description through [`Graph::family`], so descriptions round-trip.

use std::fs::File;
use std::io::BufReader;

use super::{cartesian_product, gen_complete, gen_cycle, gen_hypercube, gen_molecular, gen_torus, read_edge_list, Graph};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Arg {
    Number(usize),
    Graph(Node),
    Path(String),
}

#[derive(Debug, Clone, PartialEq)]
struct Node {
    name: String,
    args: Vec<Arg>,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, what: &str) -> Error {
        Error::InvalidArgument(format!("graph spec `{}`: {what} at offset {}", self.src, self.pos))
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn word(&mut self) -> &str {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let len = rest.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_')).unwrap_or(rest.len());
        self.pos += len;
        &self.src[start..self.pos]
    }

    fn node(&mut self) -> Result<Node> {
        let name = self.word().to_ascii_lowercase();
        if name.is_empty() || !name.starts_with(|c: char| c.is_ascii_alphabetic()) {
            return Err(self.error("expected a family name"));
        }
        if !self.eat('(') {
            return Err(self.error("expected `(`"));
        }
        let mut args = Vec::new();
        if name == "edgelist" {
            let close = self.src[self.pos..].rfind(')').ok_or_else(|| self.error("expected `)`"))?;
            args.push(Arg::Path(self.src[self.pos..self.pos + close].trim().to_owned()));
            self.pos += close + 1;
            return Ok(Node { name, args });
        }
        if !self.eat(')') {
            loop {
                self.skip_ws();
                let start = self.pos;
                let w = self.word().to_owned();
                if !w.is_empty() && w.bytes().all(|b| b.is_ascii_digit()) {
                    args.push(Arg::Number(w.parse().map_err(|_| self.error("number too large"))?));
                } else {
                    self.pos = start;
                    args.push(Arg::Graph(self.node()?));
                }
                if self.eat(')') {
                    break;
                }
                if !self.eat(',') {
                    return Err(self.error("expected `,` or `)`"));
                }
            }
        }
        Ok(Node { name, args })
    }
}

fn numbers(node: &Node) -> Result<Vec<usize>> {
    node.args
        .iter()
        .map(|a| match a {
            Arg::Number(n) => Ok(*n),
            _ => Err(Error::InvalidArgument(format!("{} takes numeric arguments", node.name))),
        })
        .collect()
}

fn one_number(node: &Node) -> Result<usize> {
    match numbers(node)?.as_slice() {
        [n] => Ok(*n),
        _ => Err(Error::InvalidArgument(format!("{} takes exactly one argument", node.name))),
    }
}

fn build(node: &Node) -> Result<Graph> {
    match node.name.as_str() {
        "complete" => gen_complete(one_number(node)?),
        "cycle" => gen_cycle(one_number(node)?),
        "hypercube" => gen_hypercube(one_number(node)?),
        "torus" => gen_torus(&numbers(node)?),
        "product" => match node.args.as_slice() {
            [Arg::Graph(a), Arg::Graph(b)] => cartesian_product(&build(a)?, &build(b)?),
            _ => Err(Error::InvalidArgument("product takes two graphs".into())),
        },
        "molecular" => match node.args.as_slice() {
            [Arg::Graph(a), Arg::Number(m)] => gen_molecular(&build(a)?, *m),
            _ => Err(Error::InvalidArgument("molecular takes a graph and a multiplicity".into())),
        },
        "edgelist" => match node.args.as_slice() {
            [Arg::Path(path)] => {
                let file = File::open(path)?;
                read_edge_list(BufReader::new(file), &format!("edgelist({path})"))
            }
            _ => Err(Error::InvalidArgument("edgelist takes a path".into())),
        },
        other => Err(Error::InvalidArgument(format!("unknown graph family `{other}`"))),
    }
}

/// Builds the graph named by `spec`.
///
/// Families: `complete(n)`, `cycle(n)`, `hypercube(d)`, `torus(a,b,...)`,
/// `product(G,H)`, `molecular(G,m)` and `edgelist(PATH)` for a file in the
/// edge-list format.
pub fn parse_graph(spec: &str) -> Result<Graph> {
    let mut parser = Parser { src: spec, pos: 0 };
    let node = parser.node()?;
    parser.skip_ws();
    if parser.pos != spec.len() {
        return Err(parser.error("trailing input"));
    }
    build(&node)
}
