//! Plain-text edge list: a header line `num_vertices num_edges`, then one
//! `u v` line per edge with 0-based indices.

use std::io::{BufRead, Write};

use super::Graph;
use crate::{Error, Result};

pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    writeln!(out, "{} {}", g.num_vertices(), g.num_edges())?;
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}

/// Reads an edge list. Edge order and endpoint order are free; blank lines
/// and lines starting with `#` are skipped.
pub fn read_edge_list<R: BufRead>(input: R) -> Result<Graph> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut edges = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let pair = parse_pair(trimmed, lineno)?;
        if header.is_none() {
            header = Some((pair.0, pair.1, lineno));
        } else {
            edges.push(pair);
        }
    }
    let (n, m, header_line) = header.ok_or_else(|| Error::parse(1, "missing header line"))?;
    if edges.len() != m {
        return Err(Error::parse(
            header_line,
            format!("header declares {m} edges but {} were listed", edges.len()),
        ));
    }
    Graph::from_edges(n, &edges)
}

fn parse_pair(line: &str, lineno: usize) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace();
    let mut next = || -> Result<usize> {
        it.next()
            .ok_or_else(|| Error::parse(lineno, "expected two integers"))?
            .parse()
            .map_err(|e| Error::parse(lineno, format!("{e}")))
    };
    let a = next()?;
    let b = next()?;
    if it.next().is_some() {
        return Err(Error::parse(lineno, "trailing tokens"));
    }
    Ok((a, b))
}
