//! Seeded instance corpus and brute-force oracles shared by the integration
//! tests.
#![allow(dead_code)]

use netdesign::design::{partition_by_degree, ExperimentConfig, Partition, TypePartition};
use netdesign::graph::erdos_renyi;
use netdesign::interference::{Bidegree, DkMetric, InterferenceSpec, SymmetricTable};
use netdesign::outcome::{sample_gaussian_model, OutcomeModel};
use netdesign::{rng, Graph};
use rand::seq::SliceRandom;
use rand::Rng;

pub const CORPUS_SIZE: usize = 60;

/// One small instance: graph without isolated vertices, a fixed partition,
/// a symmetric spec with a Gaussian model and metric weights `(k1, k2)`.
#[derive(Debug, Clone)]
pub struct Instance {
    pub id: usize,
    pub graph: Graph,
    pub cfg: ExperimentConfig,
    pub partition: Partition,
    pub spec: InterferenceSpec,
    pub model: OutcomeModel,
    pub k1: f64,
    pub k2: f64,
}

impl Instance {
    pub fn metric(&self) -> DkMetric {
        DkMetric::new(self.k1, self.k2, self.graph.degree_stats().dmax).unwrap()
    }
}

/// Attaches each isolated vertex to a uniformly chosen other vertex.
pub fn without_isolated<R: Rng>(g: &Graph, rng: &mut R) -> Graph {
    let n = g.num_vertices();
    let mut edges: Vec<(usize, usize)> = g.edges().collect();
    for v in 0..n {
        if g.degree(v) == 0 && !edges.iter().any(|&(a, b)| a == v || b == v) {
            let mut w = rng.random_range(0..n - 1);
            if w >= v {
                w += 1;
            }
            edges.push((v, w));
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

pub fn random_connected_ish<R: Rng>(n: usize, density: f64, rng: &mut R) -> Graph {
    let g = erdos_renyi(n, density, rng).unwrap();
    without_isolated(&g, rng)
}

pub fn random_partition<R: Rng>(n: usize, r: usize, rng: &mut R) -> Partition {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    Partition::new(n, order.chunks(r).map(<[usize]>::to_vec).collect()).unwrap()
}

pub fn random_spec<R: Rng>(kind: usize, g: &Graph, rng: &mut R) -> InterferenceSpec {
    let gamma = rng.random_range(0.2..2.0) * if rng.random_bool(0.2) { -1.0 } else { 1.0 };
    match kind % 5 {
        0 => InterferenceSpec::Linear { gamma },
        1 => InterferenceSpec::NormalizedLinear { gamma },
        2 => InterferenceSpec::ThresholdCount {
            gamma,
            k: rng.random_range(1..=2),
        },
        3 => InterferenceSpec::ThresholdFraction { gamma, frac: 0.5 },
        _ => {
            let values: Vec<f64> = (0..64 * 64).map(|_| rng.random_range(-1.0..1.0)).collect();
            InterferenceSpec::Table(SymmetricTable::from_fn(g.degrees(), |a, b| {
                values[a * 64 + b]
            }))
        }
    }
}

/// The frozen corpus: deterministic in the seeds below.
pub fn corpus() -> Vec<Instance> {
    (0..CORPUS_SIZE).map(instance).collect()
}

pub fn instance(id: usize) -> Instance {
    let mut rng = rng::seeded(10_000 + id as u64);
    let r = if id.is_multiple_of(3) { 3 } else { 2 };
    let blocks = if r == 3 {
        rng.random_range(2..=4)
    } else {
        rng.random_range(3..=6)
    };
    let p = if r == 3 { rng.random_range(1..=2) } else { 1 };
    let nv = r * blocks;
    let graph = random_connected_ish(nv, rng.random_range(0.2..0.6), &mut rng);
    let cfg = ExperimentConfig::for_graph(&graph, p, r).unwrap();
    let partition = if id.is_multiple_of(2) {
        partition_by_degree(&graph, &cfg).unwrap()
    } else {
        random_partition(nv, r, &mut rng)
    };
    let spec = random_spec(id, &graph, &mut rng);
    let model = sample_gaussian_model(&graph, spec.clone(), 20_000 + id as u64);
    let k1 = [0.0, 0.5, 1.0][id % 3];
    let k2 = rng.random_range(0.5..2.0);
    Instance {
        id,
        graph,
        cfg,
        partition,
        spec,
        model,
        k1,
        k2,
    }
}

/// Two parts of four vertices each on a random 8-vertex graph.
pub fn two_part_instance(seed: u64) -> (Graph, TypePartition, ExperimentConfig) {
    let mut rng = rng::seeded(seed);
    let g = random_connected_ish(8, rng.random_range(0.25..0.6), &mut rng);
    let mut order: Vec<usize> = (0..8).collect();
    order.shuffle(&mut rng);
    let types = TypePartition::new(8, vec![order[..4].to_vec(), order[4..].to_vec()]).unwrap();
    let cfg = ExperimentConfig::for_graph(&g, 1, 2).unwrap();
    (g, types, cfg)
}

/// Prüfer sequence of length `k - 2` to tree edges on `0..k`.
fn prufer_edges(seq: &[usize], k: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; k];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(k - 1);
    for &s in seq {
        let leaf = (0..k).find(|&v| degree[v] == 1).unwrap();
        edges.push((leaf, s));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..k).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// `max Σ f(u) D(u)` over `f` with `|f(u) - f(w)| <= d(u, w)`, by visiting
/// every vertex of the constraint polytope: a vertex makes `k - 1`
/// independent constraints tight, i.e. a spanning tree with an orientation.
pub fn wasserstein_dual_oracle(atoms: &[(Bidegree, f64)], metric: &DkMetric) -> f64 {
    let k = atoms.len();
    if k <= 1 {
        return 0.0;
    }
    let d: Vec<Vec<f64>> = atoms
        .iter()
        .map(|&(u, _)| {
            atoms
                .iter()
                .map(|&(w, _)| metric.distance(u, w).unwrap())
                .collect()
        })
        .collect();
    let mut best = f64::NEG_INFINITY;
    let mut seq = vec![0usize; k.saturating_sub(2)];
    loop {
        let edges = if k == 2 {
            vec![(0, 1)]
        } else {
            prufer_edges(&seq, k)
        };
        let mut adj = vec![Vec::new(); k];
        for (e, &(a, b)) in edges.iter().enumerate() {
            adj[a].push((b, e));
            adj[b].push((a, e));
        }
        for signs in 0u32..(1 << (k - 1)) {
            let mut f = vec![f64::NAN; k];
            f[0] = 0.0;
            let mut stack = vec![0usize];
            while let Some(v) = stack.pop() {
                for &(w, e) in &adj[v] {
                    if f[w].is_nan() {
                        let s = if signs >> e & 1 == 1 { 1.0 } else { -1.0 };
                        f[w] = f[v] + s * d[v][w];
                        stack.push(w);
                    }
                }
            }
            let feasible = (0..k)
                .all(|i| (0..k).all(|j| (f[i] - f[j]).abs() <= d[i][j] * (1.0 + 1e-12) + 1e-12));
            if feasible {
                let value: f64 = (0..k).map(|i| f[i] * atoms[i].1).sum();
                best = best.max(value);
            }
        }
        // next Prüfer sequence
        let mut i = 0;
        while i < seq.len() {
            seq[i] += 1;
            if seq[i] < k {
                break;
            }
            seq[i] = 0;
            i += 1;
        }
        if i == seq.len() {
            break;
        }
    }
    best
}
