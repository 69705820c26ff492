//! Plain-text edge lists.
//!
//! ```text
//! # optional comments
//! n m
//! u v
//! ...
//! ```
//!
//! Vertex ids are 0-based. Anything after `#` on a line is ignored.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::Graph;

pub fn parse(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hl, header) = lines.next().ok_or_else(|| Error::Parse("missing 'n m' header".into()))?;
    let (n, m) = parse_pair(hl, header)?;
    let mut edges = Vec::with_capacity(m);
    for (ln, line) in lines {
        edges.push(parse_pair(ln, line)?);
    }
    if edges.len() != m {
        return Err(Error::Parse(format!("header declares {m} edges, found {}", edges.len())));
    }
    Graph::from_edges(n, edges)
}

fn parse_pair(line_no: usize, line: &str) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace();
    let bad = || Error::Parse(format!("line {line_no}: expected two non-negative integers, got '{line}'"));
    let a = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
    let b = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
    if it.next().is_some() {
        return Err(bad());
    }
    Ok((a, b))
}

pub fn format(g: &Graph) -> String {
    let mut s = String::new();
    writeln!(s, "{} {}", g.n(), g.m()).unwrap();
    for e in g.edges() {
        writeln!(s, "{} {}", e.u(), e.v()).unwrap();
    }
    s
}

pub fn read(path: impl AsRef<Path>) -> Result<Graph> {
    parse(&std::fs::read_to_string(path)?)
}

pub fn write(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format(g))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_comments() {
        let g = parse("# square\n4 4\n0 1\n1 2 # side\n2 3\n\n3 0\n").unwrap();
        assert_eq!((g.n(), g.m()), (4, 4));
        assert_eq!(g.regular_degree(), Some(2));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse(""), Err(Error::Parse(_))));
        assert!(matches!(parse("3 2\n0 1\n"), Err(Error::Parse(_))));
        assert!(matches!(parse("3 2\n0 1\n1 0\n"), Err(Error::EdgeExists(_))));
        assert!(matches!(parse("3 1\n1 1\n"), Err(Error::SelfLoop(1))));
        assert!(matches!(parse("3 1\n0 5\n"), Err(Error::VertexOutOfRange { .. })));
        assert!(matches!(parse("3 1\n0 x\n"), Err(Error::Parse(_))));
    }

    #[test]
    fn format_then_parse() {
        let g = parse("5 3\n0 4\n1 2\n3 4\n").unwrap();
        assert_eq!(parse(&format(&g)).unwrap(), g);
    }
}
