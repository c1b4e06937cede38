use rand::Rng;

use super::Graph;
use crate::design::TypePartition;
use crate::{Error, Result};

/// `G(n, p)`: every unordered pair is an edge independently with probability
/// `edge_prob`. Isolated vertices are possible; see
/// [`Graph::require_no_isolated`].
pub fn erdos_renyi<R: Rng + ?Sized>(
    n_vertices: usize,
    edge_prob: f64,
    rng: &mut R,
) -> Result<Graph> {
    if !(0.0..=1.0).contains(&edge_prob) {
        return Err(Error::InvalidProbability(edge_prob));
    }
    let mut adjacency = vec![Vec::new(); n_vertices];
    for u in 0..n_vertices {
        for v in (u + 1)..n_vertices {
            if rng.random_bool(edge_prob) {
                adjacency[u].push(v);
                adjacency[v].push(u);
            }
        }
    }
    if adjacency.iter().any(Vec::is_empty) && n_vertices > 0 {
        log::debug!("erdos_renyi({n_vertices}, {edge_prob}) produced isolated vertices");
    }
    Ok(Graph::from_adjacency_unchecked(adjacency))
}

/// Preferential attachment growth process.
///
/// Starts from vertex 0 alone. Vertex `v = 1, 2, ...` attaches to
/// `min(m, v)` distinct earlier vertices, drawn one at a time without
/// replacement with probability proportional to `max(d(w), 1)^pow`, where
/// `d(w)` is the degree before `v` arrives. The graph is always simple and
/// has at most `m * (n - 1)` edges.
pub fn preferential_attachment<R: Rng + ?Sized>(
    n_vertices: usize,
    pow: f64,
    m: usize,
    rng: &mut R,
) -> Result<Graph> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be positive".into()));
    }
    if n_vertices <= m {
        return Err(Error::InvalidParameter(format!(
            "preferential attachment needs n_vertices > m (got n = {n_vertices}, m = {m})"
        )));
    }
    if !(pow >= 0.0 && pow.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "pow must be a finite nonnegative number, got {pow}"
        )));
    }
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n_vertices];
    let mut weights = Vec::with_capacity(n_vertices);
    let mut targets = Vec::with_capacity(m);
    for v in 1..n_vertices {
        weights.clear();
        weights.extend(
            adjacency[..v]
                .iter()
                .map(|nbrs| (nbrs.len().max(1) as f64).powf(pow)),
        );
        targets.clear();
        for _ in 0..m.min(v) {
            let total: f64 = weights.iter().sum();
            let pick = if total > 0.0 && total.is_finite() {
                let mut u = rng.random::<f64>() * total;
                let mut chosen = None;
                for (w, &wt) in weights.iter().enumerate() {
                    if wt <= 0.0 {
                        continue;
                    }
                    if u < wt {
                        chosen = Some(w);
                        break;
                    }
                    u -= wt;
                    chosen = Some(w);
                }
                chosen.expect("at least one candidate has positive weight")
            } else {
                // Overflowed weights: fall back to uniform over remaining
                // candidates.
                let remaining: Vec<usize> = (0..v)
                    .filter(|&w| weights[w] > 0.0 || weights[w].is_nan())
                    .collect();
                remaining[rng.random_range(0..remaining.len())]
            };
            weights[pick] = 0.0;
            targets.push(pick);
        }
        for &w in &targets {
            adjacency[v].push(w);
            adjacency[w].push(v);
        }
    }
    Ok(Graph::from_adjacency_unchecked(adjacency))
}

/// `2^|V(H)|` disjoint copies of `H` together with the canonical perfect
/// quasi-coloring and the induced type partition.
#[derive(Debug, Clone)]
pub struct CopiesGraph {
    pub graph: Graph,
    /// One part `pi x {0,1}^V(H)` for each part `pi` of the base partition.
    pub types: TypePartition,
    /// `{(v, eps) : eps_v = 1}`, sorted.
    pub quasicoloring: Vec<usize>,
}

impl CopiesGraph {
    /// Index of vertex `(v, eps)` where `eps` is a bitmask over `V(H)`.
    pub fn index(h_vertices: usize, v: usize, eps: usize) -> usize {
        eps * h_vertices + v
    }
}

const MAX_COPIES_BASE: usize = 16;

/// Copies construction with singleton base types.
pub fn copies_graph(h: &Graph) -> Result<CopiesGraph> {
    let singletons: Vec<Vec<usize>> = (0..h.num_vertices()).map(|v| vec![v]).collect();
    copies_graph_with_types(h, &singletons)
}

/// Copies construction `G = H x {0,1}^V(H)`: vertex `(v, eps)` is adjacent to
/// `(w, eps')` iff `v ~ w` in `H` and `eps = eps'`. `base_types` partitions
/// `V(H)`.
pub fn copies_graph_with_types(h: &Graph, base_types: &[Vec<usize>]) -> Result<CopiesGraph> {
    let hv = h.num_vertices();
    if hv <= 1 {
        return Err(Error::InvalidParameter(format!(
            "copies construction needs |V(H)| > 1, got {hv}"
        )));
    }
    if hv > MAX_COPIES_BASE {
        return Err(Error::InvalidParameter(format!(
            "copies construction limited to |V(H)| <= {MAX_COPIES_BASE}, got {hv}"
        )));
    }
    let base = TypePartition::new(hv, base_types.to_vec())?;
    let copies = 1usize << hv;
    let n = hv * copies;
    let mut adjacency = vec![Vec::new(); n];
    for eps in 0..copies {
        for v in 0..hv {
            let idx = CopiesGraph::index(hv, v, eps);
            adjacency[idx] = h
                .neighbors(v)
                .iter()
                .map(|&w| CopiesGraph::index(hv, w, eps))
                .collect();
        }
    }
    let graph = Graph::from_adjacency_unchecked(adjacency);
    let mut quasicoloring: Vec<usize> = (0..copies)
        .flat_map(|eps| {
            (0..hv)
                .filter(move |&v| eps >> v & 1 == 1)
                .map(move |v| CopiesGraph::index(hv, v, eps))
        })
        .collect();
    quasicoloring.sort_unstable();
    let parts = base
        .parts()
        .iter()
        .map(|part| {
            let mut lifted: Vec<usize> = (0..copies)
                .flat_map(|eps| part.iter().map(move |&v| CopiesGraph::index(hv, v, eps)))
                .collect();
            lifted.sort_unstable();
            lifted
        })
        .collect();
    let types = TypePartition::new(n, parts)?;
    Ok(CopiesGraph {
        graph,
        types,
        quasicoloring,
    })
}
