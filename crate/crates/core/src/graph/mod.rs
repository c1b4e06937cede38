//! Undirected simple graphs.

mod generators;
mod io;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use generators::{
    copies_graph, copies_graph_with_types, erdos_renyi, preferential_attachment, CopiesGraph,
};
pub use io::{read_edge_list, write_edge_list};

/// Simple undirected graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeStats {
    pub dmin: usize,
    pub dmax: usize,
    /// degree -> number of vertices with that degree
    pub histogram: BTreeMap<usize, usize>,
}

impl Graph {
    /// Builds a graph from an edge list. Endpoint order does not matter, but
    /// `(u, v)` and `(v, u)` count as the same edge and are rejected as a
    /// duplicate.
    pub fn from_edges(num_vertices: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); num_vertices];
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= num_vertices {
                    return Err(Error::VertexOutOfRange {
                        vertex: x,
                        num_vertices,
                    });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for (u, nbrs) in adjacency.iter_mut().enumerate() {
            nbrs.sort_unstable();
            if let Some(w) = nbrs.windows(2).find(|w| w[0] == w[1]) {
                let v = w[0];
                return Err(Error::DuplicateEdge(u.min(v), u.max(v)));
            }
        }
        Ok(Graph { adjacency })
    }

    /// Internal constructor for generators that already guarantee a simple
    /// graph.
    pub(crate) fn from_adjacency_unchecked(mut adjacency: Vec<Vec<usize>>) -> Self {
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        Graph { adjacency }
    }

    pub fn empty(num_vertices: usize) -> Self {
        Graph {
            adjacency: vec![Vec::new(); num_vertices],
        }
    }

    pub fn complete(num_vertices: usize) -> Self {
        let adjacency = (0..num_vertices)
            .map(|v| (0..num_vertices).filter(|&w| w != v).collect())
            .collect();
        Graph { adjacency }
    }

    /// Cycle `0 - 1 - ... - (n-1) - 0`. Requires `n >= 3`.
    pub fn cycle(num_vertices: usize) -> Result<Self> {
        if num_vertices < 3 {
            return Err(Error::InvalidParameter(format!(
                "a cycle needs at least 3 vertices, got {num_vertices}"
            )));
        }
        let edges: Vec<_> = (0..num_vertices)
            .map(|i| (i, (i + 1) % num_vertices))
            .collect();
        Graph::from_edges(num_vertices, &edges)
    }

    /// Path `0 - 1 - ... - (n-1)`.
    pub fn path(num_vertices: usize) -> Self {
        let edges: Vec<_> = (1..num_vertices).map(|i| (i - 1, i)).collect();
        Graph::from_edges(num_vertices, &edges).expect("path edges are simple")
    }

    /// Vertices of `other` are shifted by `self.num_vertices()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let offset = self.num_vertices();
        let mut adjacency = self.adjacency.clone();
        adjacency.extend(
            other
                .adjacency
                .iter()
                .map(|nbrs| nbrs.iter().map(|&w| w + offset).collect()),
        );
        Graph { adjacency }
    }

    pub fn num_vertices(&self) -> usize {
        self.adjacency.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, nbrs)| {
            nbrs.iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    pub fn isolated_vertices(&self) -> Vec<usize> {
        (0..self.num_vertices())
            .filter(|&v| self.adjacency[v].is_empty())
            .collect()
    }

    pub fn has_isolated_vertices(&self) -> bool {
        self.adjacency.iter().any(Vec::is_empty)
    }

    /// Errors with [`Error::IsolatedVertices`] if any vertex has degree 0.
    pub fn require_no_isolated(&self) -> Result<()> {
        let isolated = self.isolated_vertices();
        match isolated.first() {
            None => Ok(()),
            Some(&first) => Err(Error::IsolatedVertices {
                count: isolated.len(),
                first,
            }),
        }
    }

    pub fn degree_stats(&self) -> DegreeStats {
        let mut histogram = BTreeMap::new();
        for nbrs in &self.adjacency {
            *histogram.entry(nbrs.len()).or_insert(0) += 1;
        }
        let dmin = histogram.keys().next().copied().unwrap_or(0);
        let dmax = histogram.keys().next_back().copied().unwrap_or(0);
        DegreeStats {
            dmin,
            dmax,
            histogram,
        }
    }
}
