//! Perfect quasi-colorings: `Q` with `|Q| = |V|/2` whose bidegree multiset
//! matches that of its complement (per type part when types are given).
//! All checks use integer counts.

use crate::design::TypePartition;
use crate::exec::{self, Exec};
use crate::graph::Graph;
use crate::{Error, Result};

pub const DEFAULT_SEARCH_CAP: usize = 24;

/// Vertices fixed by enumerating prefixes when sharding the search.
const SHARD_DEPTH: usize = 10;

fn membership(g: &Graph, q: &[usize]) -> Result<Vec<bool>> {
    let n = g.num_vertices();
    if !n.is_multiple_of(2) {
        return Err(Error::InvalidConfig(format!(
            "quasi-colorings need an even vertex count, got {n}"
        )));
    }
    let mut mask = vec![false; n];
    for &v in q {
        if v >= n {
            return Err(Error::VertexOutOfRange {
                vertex: v,
                num_vertices: n,
            });
        }
        if mask[v] {
            return Err(Error::InvalidParameter(format!("vertex {v} listed twice")));
        }
        mask[v] = true;
    }
    if q.len() != n / 2 {
        return Err(Error::TreatmentSize {
            expected: n / 2,
            actual: q.len(),
        });
    }
    Ok(mask)
}

fn check_types(g: &Graph, types: Option<&TypePartition>) -> Result<()> {
    if let Some(t) = types {
        if t.num_vertices() != g.num_vertices() {
            return Err(Error::TypePartition(format!(
                "type partition covers {} vertices, graph has {}",
                t.num_vertices(),
                g.num_vertices()
            )));
        }
    }
    Ok(())
}

/// True iff `D_Q = 0` (and, with types, `D^π_Q = 0` and `|Q ∩ π| = |π|/2`
/// for every part).
pub fn is_perfect_quasicoloring(
    g: &Graph,
    q: &[usize],
    types: Option<&TypePartition>,
) -> Result<bool> {
    let mask = membership(g, q)?;
    check_types(g, types)?;
    let part = |v: usize| types.map_or(0, |t| t.part_index(v));
    if let Some(t) = types {
        for p in t.parts() {
            if 2 * p.iter().filter(|&&v| mask[v]).count() != p.len() {
                return Ok(false);
            }
        }
    }
    let mut balance: std::collections::HashMap<(usize, usize, usize), i64> = Default::default();
    for v in 0..g.num_vertices() {
        let a = g.neighbors(v).iter().filter(|&&w| mask[w]).count();
        let key = (part(v), a, g.degree(v) - a);
        *balance.entry(key).or_insert(0) += if mask[v] { 1 } else { -1 };
    }
    Ok(balance.values().all(|&c| c == 0))
}

/// Search state for one branch of the exhaustive search.
#[derive(Clone)]
struct Search<'a> {
    g: &'a Graph,
    n: usize,
    /// `finalize[k]`: vertices whose bidegree is known once `0..=k` is assigned.
    finalize: &'a [Vec<usize>],
    part: &'a [usize],
    part_quota: &'a [usize],
    dmax: usize,
    in_q: Vec<bool>,
    included: usize,
    part_in: Vec<usize>,
    part_out: Vec<usize>,
    /// Q-count minus complement-count per (part, a, b) key.
    diff: Vec<i32>,
    imbalance: usize,
    unfinalized: usize,
}

impl Search<'_> {
    fn key(&self, v: usize) -> usize {
        let a = self
            .g
            .neighbors(v)
            .iter()
            .filter(|&&w| self.in_q[w])
            .count();
        let b = self.g.degree(v) - a;
        let w = self.dmax + 1;
        (self.part[v] * w + a) * w + b
    }

    /// Assigns vertex `k`. Returns `None` (state untouched) when a size quota
    /// is already full, otherwise whether the branch is still feasible.
    fn assign(&mut self, k: usize, include: bool) -> Option<bool> {
        let p = self.part[k];
        if include {
            if self.included == self.n / 2 || self.part_in[p] == self.part_quota[p] {
                return None;
            }
            self.included += 1;
            self.part_in[p] += 1;
        } else {
            if k - self.included == self.n / 2 || self.part_out[p] == self.part_quota[p] {
                return None;
            }
            self.part_out[p] += 1;
        }
        self.in_q[k] = include;
        for i in 0..self.finalize[k].len() {
            let v = self.finalize[k][i];
            let key = self.key(v);
            let before = self.diff[key].unsigned_abs() as usize;
            self.diff[key] += if self.in_q[v] { 1 } else { -1 };
            self.imbalance = self.imbalance + self.diff[key].unsigned_abs() as usize - before;
            self.unfinalized -= 1;
        }
        // Each remaining vertex can cancel at most one unit of imbalance.
        Some(self.imbalance <= self.unfinalized)
    }

    fn unassign(&mut self, k: usize) {
        for i in 0..self.finalize[k].len() {
            let v = self.finalize[k][i];
            let key = self.key(v);
            let before = self.diff[key].unsigned_abs() as usize;
            self.diff[key] -= if self.in_q[v] { 1 } else { -1 };
            self.imbalance = self.imbalance + self.diff[key].unsigned_abs() as usize - before;
            self.unfinalized += 1;
        }
        let p = self.part[k];
        if self.in_q[k] {
            self.included -= 1;
            self.part_in[p] -= 1;
        } else {
            self.part_out[p] -= 1;
        }
        self.in_q[k] = false;
    }

    /// Include-first DFS from vertex `k`, so the first witness found is the
    /// lexicographically smallest in this branch.
    fn dfs(&mut self, k: usize) -> bool {
        if k == self.n {
            return self.imbalance == 0;
        }
        for include in [true, false] {
            match self.assign(k, include) {
                None => continue,
                Some(true) if self.dfs(k + 1) => return true,
                Some(_) => self.unassign(k),
            }
        }
        false
    }
}

/// Lexicographically smallest perfect quasi-coloring (as a sorted vertex
/// list), or `None`. Exhaustive up to `cap` vertices.
///
/// Since `Q` is perfect iff its complement is, the smallest witness always
/// contains vertex 0, which halves the search.
pub fn find_perfect_quasicoloring(
    g: &Graph,
    types: Option<&TypePartition>,
    cap: usize,
    exec: Exec,
) -> Result<Option<Vec<usize>>> {
    let n = g.num_vertices();
    if n > cap {
        return Err(Error::EnumerationCap {
            required: n as u128,
            cap: cap as u128,
        });
    }
    if !n.is_multiple_of(2) {
        return Err(Error::InvalidConfig(format!(
            "quasi-colorings need an even vertex count, got {n}"
        )));
    }
    check_types(g, types)?;
    if n == 0 {
        return Ok(Some(Vec::new()));
    }
    let part: Vec<usize> = (0..n)
        .map(|v| types.map_or(0, |t| t.part_index(v)))
        .collect();
    let num_parts = types.map_or(1, TypePartition::num_parts);
    let mut part_sizes = vec![0usize; num_parts];
    for &p in &part {
        part_sizes[p] += 1;
    }
    if part_sizes.iter().any(|s| s % 2 != 0) {
        return Ok(None);
    }
    let part_quota: Vec<usize> = part_sizes.iter().map(|s| s / 2).collect();
    let mut finalize = vec![Vec::new(); n];
    for v in 0..n {
        let last = g.neighbors(v).iter().copied().fold(v, usize::max);
        finalize[last].push(v);
    }
    let dmax = g.degree_stats().dmax;
    let mut root = Search {
        g,
        n,
        finalize: &finalize,
        part: &part,
        part_quota: &part_quota,
        dmax,
        in_q: vec![false; n],
        included: 0,
        part_in: vec![0; num_parts],
        part_out: vec![0; num_parts],
        diff: vec![0; num_parts * (dmax + 1) * (dmax + 1)],
        imbalance: 0,
        unfinalized: n,
    };
    if root.assign(0, true) != Some(true) {
        return Ok(None);
    }
    // Prefixes over vertices 1..=depth, ordered include-first so that the
    // first successful shard holds the smallest witness.
    let depth = SHARD_DEPTH.min(n - 1);
    let shards = 1usize << depth;
    let witness = exec::find_map_first(exec, shards, |i| {
        let mut s = root.clone();
        for j in 0..depth {
            let include = (i >> (depth - 1 - j)) & 1 == 0;
            if s.assign(j + 1, include) != Some(true) {
                return None;
            }
        }
        s.dfs(depth + 1)
            .then(|| (0..n).filter(|&v| s.in_q[v]).collect::<Vec<usize>>())
    });
    Ok(witness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{Enumeration, ExperimentConfig, DEFAULT_ENUMERATION_CAP};
    use crate::graph::{copies_graph, copies_graph_with_types, erdos_renyi};
    use crate::rng;

    fn all_half_sets(n: usize) -> Vec<Vec<usize>> {
        let c = ExperimentConfig::new(1, 2, n / 2).unwrap();
        Enumeration::crd(&c, DEFAULT_ENUMERATION_CAP)
            .unwrap()
            .iter()
            .map(|t| t.treated())
            .collect()
    }

    fn brute_force_smallest(g: &Graph, types: Option<&TypePartition>) -> Option<Vec<usize>> {
        all_half_sets(g.num_vertices())
            .into_iter()
            .find(|q| is_perfect_quasicoloring(g, q, types).unwrap())
    }

    #[test]
    fn square_examples() {
        let g = Graph::cycle(4).unwrap();
        assert!(is_perfect_quasicoloring(&g, &[0, 1], None).unwrap());
        assert!(!is_perfect_quasicoloring(&g, &[0, 2], None).unwrap());
        let found = find_perfect_quasicoloring(&g, None, DEFAULT_SEARCH_CAP, Exec::Sequential)
            .unwrap()
            .unwrap();
        assert_eq!(found, vec![0, 1]);
        assert!(g.has_edge(found[0], found[1]));
    }

    #[test]
    fn hexagon_has_none() {
        let g = Graph::cycle(6).unwrap();
        let sets = all_half_sets(6);
        assert_eq!(sets.len(), 20);
        for q in &sets {
            assert!(!is_perfect_quasicoloring(&g, q, None).unwrap());
        }
        for exec in [Exec::Sequential, Exec::Parallel] {
            assert_eq!(
                find_perfect_quasicoloring(&g, None, 24, exec).unwrap(),
                None
            );
        }
    }

    #[test]
    fn complement_symmetry() {
        for seed in 0..10u64 {
            let g = erdos_renyi(10, 0.4, &mut rng::seeded(seed)).unwrap();
            for q in all_half_sets(10) {
                let comp: Vec<usize> = (0..10).filter(|v| !q.contains(v)).collect();
                assert_eq!(
                    is_perfect_quasicoloring(&g, &q, None).unwrap(),
                    is_perfect_quasicoloring(&g, &comp, None).unwrap()
                );
            }
        }
    }

    #[test]
    fn copies_of_an_edge() {
        let cg = copies_graph(&Graph::path(2)).unwrap();
        assert!(is_perfect_quasicoloring(&cg.graph, &cg.quasicoloring, None).unwrap());
        assert!(is_perfect_quasicoloring(&cg.graph, &cg.quasicoloring, Some(&cg.types)).unwrap());
        let found = find_perfect_quasicoloring(&cg.graph, None, 24, Exec::Parallel)
            .unwrap()
            .unwrap();
        assert!(is_perfect_quasicoloring(&cg.graph, &found, None).unwrap());
    }

    #[test]
    fn typed_copies_of_a_path() {
        let cg = copies_graph_with_types(&Graph::path(3), &[vec![0, 2], vec![1]]).unwrap();
        assert!(is_perfect_quasicoloring(&cg.graph, &cg.quasicoloring, Some(&cg.types)).unwrap());
        let found = find_perfect_quasicoloring(&cg.graph, Some(&cg.types), 24, Exec::Parallel)
            .unwrap()
            .unwrap();
        assert!(is_perfect_quasicoloring(&cg.graph, &found, Some(&cg.types)).unwrap());
    }

    #[test]
    fn search_agrees_with_brute_force() {
        let mut checked_some = false;
        for seed in 0..40u64 {
            let mut r = rng::seeded(seed);
            let n = [6usize, 8, 10, 12][seed as usize % 4];
            let g = erdos_renyi(n, 0.35, &mut r).unwrap();
            let want = brute_force_smallest(&g, None);
            checked_some |= want.is_some();
            for exec in [Exec::Sequential, Exec::Parallel] {
                assert_eq!(
                    find_perfect_quasicoloring(&g, None, 24, exec).unwrap(),
                    want,
                    "seed {seed}"
                );
            }
            let types =
                TypePartition::new(n, vec![(0..n / 2).collect(), (n / 2..n).collect()]).unwrap();
            let want = brute_force_smallest(&g, Some(&types));
            assert_eq!(
                find_perfect_quasicoloring(&g, Some(&types), 24, Exec::Parallel).unwrap(),
                want
            );
        }
        assert!(checked_some);
    }

    #[test]
    fn errors() {
        let g = Graph::path(5);
        assert!(is_perfect_quasicoloring(&g, &[0, 1], None).is_err());
        assert!(find_perfect_quasicoloring(&g, None, 24, Exec::Sequential).is_err());
        let g = Graph::cycle(4).unwrap();
        assert!(matches!(
            is_perfect_quasicoloring(&g, &[0], None),
            Err(Error::TreatmentSize {
                expected: 2,
                actual: 1
            })
        ));
        assert!(is_perfect_quasicoloring(&g, &[0, 0], None).is_err());
        assert!(find_perfect_quasicoloring(&Graph::empty(26), None, 24, Exec::Sequential).is_err());
    }
}
