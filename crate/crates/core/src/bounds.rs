//! Closed-form bias and root-MSE bounds for `ξ` (and, with homophily, for
//! `t̂ - t̄`).
//!
//! Bounds stated for `‖f‖_{d_K} <= 1` scale linearly in that norm; callers
//! with a general spec multiply by its computed norm.

use serde::{Deserialize, Serialize};

use crate::design::{ExperimentConfig, Partition, TypePartition};
use crate::graph::Graph;
use crate::interference::InterferenceSpec;
use crate::quasicoloring::c_p;
use crate::sum::ksum;
use crate::{Error, Result};

fn check_partition(g: &Graph, partition: &Partition) -> Result<()> {
    if partition.num_vertices() != g.num_vertices() {
        return Err(Error::PartitionMismatch(format!(
            "partition covers {} vertices, graph has {}",
            partition.num_vertices(),
            g.num_vertices()
        )));
    }
    Ok(())
}

/// `(1/(n r (r-1))) Σ_v |P_v ∩ N(v)| K_v / d(v)`.
pub fn bias_bound_lipschitz(g: &Graph, partition: &Partition, k: &[f64]) -> Result<f64> {
    g.require_no_isolated()?;
    check_partition(g, partition)?;
    if k.len() != g.num_vertices() {
        return Err(Error::InvalidParameter(format!(
            "{} Lipschitz constants for {} vertices",
            k.len(),
            g.num_vertices()
        )));
    }
    let r = partition.block_size() as f64;
    let n = partition.num_blocks() as f64;
    let total = ksum(
        (0..g.num_vertices())
            .map(|v| partition.same_block_neighbors(g, v) as f64 * k[v] / g.degree(v) as f64),
    );
    Ok(total / (n * r * (r - 1.0)))
}

/// `(1/(n r (r-1))) Σ_blocks Σ_{pairs {w, w'}} (W_w(w') + W_{w'}(w))`.
pub fn bias_bound_weights(
    g: &Graph,
    partition: &Partition,
    spec: &InterferenceSpec,
) -> Result<f64> {
    check_partition(g, partition)?;
    let r = partition.block_size() as f64;
    let n = partition.num_blocks() as f64;
    let mut terms = Vec::new();
    for block in partition.blocks() {
        for (i, &w) in block.iter().enumerate() {
            for &w2 in &block[i + 1..] {
                terms.push(spec.weight(g, w, w2)? + spec.weight(g, w2, w)?);
            }
        }
    }
    Ok(ksum(terms) / (n * r * (r - 1.0)))
}

/// `K̄ / (rn - 1)` for the completely randomized design.
pub fn bias_bound_crd(kbar: f64, r: usize, n: usize) -> Result<f64> {
    if r * n < 2 {
        return Err(Error::InvalidConfig(format!(
            "need at least two vertices, got r n = {}",
            r * n
        )));
    }
    Ok(kbar / (r * n - 1) as f64)
}

/// `2 K_max |Π| / (rn)`, the expected bias over uniformly drawn partitions
/// refining `Π`.
pub fn bias_bound_expected_types(kmax: f64, num_parts: usize, cfg: &ExperimentConfig) -> f64 {
    2.0 * kmax * num_parts as f64 / (cfg.r() * cfg.n()) as f64
}

fn inv_sqrt_degree_sum(g: &Graph) -> f64 {
    ksum((0..g.num_vertices()).map(|v| 1.0 / (g.degree(v) as f64).sqrt()))
}

/// `K1 C_P / (√(pq) n) + (1/rn) Σ 4 K2 / √d(v) + (K2/pqn) Σ |P_v ∩ N(v)| / d(v)`.
pub fn mse_bound_general(
    g: &Graph,
    partition: &Partition,
    k1: f64,
    k2: f64,
    cfg: &ExperimentConfig,
) -> Result<f64> {
    g.require_no_isolated()?;
    check_partition(g, partition)?;
    let cp = c_p(partition, g, cfg)?;
    let (p, q, r, n) = pqrn(cfg);
    let overlap = ksum(
        (0..g.num_vertices())
            .map(|v| partition.same_block_neighbors(g, v) as f64 / g.degree(v) as f64),
    );
    Ok(k1 * cp / ((p * q).sqrt() * n)
        + 4.0 * k2 * inv_sqrt_degree_sum(g) / (r * n)
        + k2 * overlap / (p * q * n))
}

fn pqrn(cfg: &ExperimentConfig) -> (f64, f64, f64, f64) {
    (
        cfg.p() as f64,
        cfg.q() as f64,
        cfg.r() as f64,
        cfg.n() as f64,
    )
}

fn dmin_dmax(g: &Graph) -> Result<(f64, f64)> {
    g.require_no_isolated()?;
    let s = g.degree_stats();
    Ok((s.dmin as f64, s.dmax as f64))
}

/// `(bias, rmse)` for the partition-by-degree design.
pub fn mse_bound_dense(g: &Graph, k1: f64, k2: f64, cfg: &ExperimentConfig) -> Result<(f64, f64)> {
    let (dmin, _) = dmin_dmax(g)?;
    let (p, q, r, n) = pqrn(cfg);
    let m = (r - 1.0).min(dmin);
    let bias = m * (k1 + k2) / ((r - 1.0) * dmin);
    let rmse = 2.0 * k1 / ((p * q).sqrt() * n)
        + 4.0 * k2 / (r * dmin.sqrt())
        + r * k2 * m / (p * q * dmin);
    Ok((bias, rmse))
}

/// `(bias, rmse)` for randomized degree blocking.
pub fn mse_bound_sparse(g: &Graph, k1: f64, k2: f64, cfg: &ExperimentConfig) -> Result<(f64, f64)> {
    let (dmin, dmax) = dmin_dmax(g)?;
    let (p, q, r, n) = pqrn(cfg);
    let spread = dmax - dmin;
    let root = (r * r * dmax * dmax + 1.0).sqrt();
    let bias = k1 / n + 3.0 * k2 * spread / n;
    let rmse = k1 / n
        + k2 * spread / (n * dmin)
        + 2.0 * k2 * spread.sqrt() / (n * dmin).sqrt()
        + 4.0 * k2 * root / (n * dmin).sqrt()
        + r * k2 * (r - 1.0).min(dmin) * root / (p * q * n.sqrt() * dmin);
    Ok((bias, rmse))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TypedBounds {
    /// `K |Π| / (rn)`
    pub bias: f64,
    /// `(1/rn) Σ 4K/√d + (K/pqn) Σ |P_v ∩ N(v)| / d`, with `|P_v ∩ N(v)|`
    /// replaced by its worst case `min(r - 1, |Π_v ∩ N(v)|)` over blocks
    /// refining `Π`.
    pub rmse_tv: f64,
    pub rmse_sparse: f64,
}

fn same_part_neighbors(g: &Graph, types: &TypePartition, v: usize) -> usize {
    let pv = types.part_index(v);
    g.neighbors(v)
        .iter()
        .filter(|&&w| types.part_index(w) == pv)
        .count()
}

fn check_types(g: &Graph, types: &TypePartition, cfg: &ExperimentConfig) -> Result<()> {
    types.check_config(cfg)?;
    if types.num_vertices() != g.num_vertices() {
        return Err(Error::TypePartition(format!(
            "type partition covers {} vertices, graph has {}",
            types.num_vertices(),
            g.num_vertices()
        )));
    }
    Ok(())
}

/// Bounds for the type-restricted design with per-part norm `‖f_π‖ <= K`
/// under the treated-fraction metric.
pub fn typed_bounds(
    g: &Graph,
    types: &TypePartition,
    k: f64,
    cfg: &ExperimentConfig,
) -> Result<TypedBounds> {
    check_types(g, types, cfg)?;
    let (dmin, dmax) = dmin_dmax(g)?;
    let (p, q, r, n) = pqrn(cfg);
    let parts = types.num_parts() as f64;
    let overlap = ksum((0..g.num_vertices()).map(|v| {
        let worst = (cfg.r() - 1).min(same_part_neighbors(g, types, v));
        worst as f64 / g.degree(v) as f64
    }));
    let root = (r * r * dmax * dmax + 1.0).sqrt();
    Ok(TypedBounds {
        bias: k * parts / (r * n),
        rmse_tv: 4.0 * k * inv_sqrt_degree_sum(g) / (r * n) + k * overlap / (p * q * n),
        rmse_sparse: k
            * ((2.0 * parts).sqrt() / (n * r * dmin).sqrt()
                + 4.0 * root / (n * dmin).sqrt()
                + r * (r - 1.0).min(dmin) * root / (p * q * n.sqrt() * dmin)),
    })
}

/// The typed total-variation bound for one fixed partition refining `Π`.
pub fn typed_rmse_bound_tv_for_partition(
    g: &Graph,
    partition: &Partition,
    k: f64,
    cfg: &ExperimentConfig,
) -> Result<f64> {
    g.require_no_isolated()?;
    check_partition(g, partition)?;
    let (p, q, r, n) = pqrn(cfg);
    let overlap = ksum(
        (0..g.num_vertices())
            .map(|v| partition.same_block_neighbors(g, v) as f64 / g.degree(v) as f64),
    );
    Ok(4.0 * k * inv_sqrt_degree_sum(g) / (r * n) + k * overlap / (p * q * n))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomophilyBounds {
    /// `K |Π| / n`
    pub bias: f64,
    /// `K |Π| / (rn)`, the tighter form shared with the typed sparse bound.
    pub bias_rn: f64,
    /// `(1/rn) Σ 4K/√d + (K/pqn) Σ (r-1)|Π_v ∩ N(v)| / ((|Π_v| - 1) d(v)) + σ √(2r) / √(pqn)`
    pub rmse: f64,
    /// `2 r σ² / (pqn)`, bounding `Var(t_ideal)`.
    pub var_ideal: f64,
}

pub fn homophily_bounds(
    sigma: f64,
    k: f64,
    cfg: &ExperimentConfig,
    g: &Graph,
    types: &TypePartition,
) -> Result<HomophilyBounds> {
    check_types(g, types, cfg)?;
    g.require_no_isolated()?;
    let (p, q, r, n) = pqrn(cfg);
    let parts = types.num_parts() as f64;
    let overlap = ksum((0..g.num_vertices()).map(|v| {
        let size = types.part_of(v).len() as f64;
        (r - 1.0) * same_part_neighbors(g, types, v) as f64 / ((size - 1.0) * g.degree(v) as f64)
    }));
    Ok(HomophilyBounds {
        bias: k * parts / n,
        bias_rn: k * parts / (r * n),
        rmse: 4.0 * k * inv_sqrt_degree_sum(g) / (r * n)
            + k * overlap / (p * q * n)
            + sigma * (2.0 * r).sqrt() / (p * q * n).sqrt(),
        var_ideal: 2.0 * r * sigma * sigma / (p * q * n),
    })
}

/// Formula behind a reported bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    BiasLipschitz,
    BiasWeights,
    BiasCrd,
    BiasExpectedTypes,
    RmseGeneral,
    BiasDense,
    RmseDense,
    BiasSparse,
    RmseSparse,
    BiasTypes,
    RmseTypesTv,
    RmseTypesSparse,
    BiasHomophily,
    RmseHomophily,
}

impl BoundKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundKind::BiasLipschitz => "bias-lipschitz",
            BoundKind::BiasWeights => "bias-weights",
            BoundKind::BiasCrd => "bias-crd",
            BoundKind::BiasExpectedTypes => "bias-expected-types",
            BoundKind::RmseGeneral => "rmse-general",
            BoundKind::BiasDense => "bias-dense",
            BoundKind::RmseDense => "rmse-dense",
            BoundKind::BiasSparse => "bias-sparse",
            BoundKind::RmseSparse => "rmse-sparse",
            BoundKind::BiasTypes => "bias-types",
            BoundKind::RmseTypesTv => "rmse-types-tv",
            BoundKind::RmseTypesSparse => "rmse-types-sparse",
            BoundKind::BiasHomophily => "bias-homophily",
            BoundKind::RmseHomophily => "rmse-homophily",
        }
    }
}

/// Parameters a bound was evaluated with. Unused ones are `None`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub k1: Option<f64>,
    pub k2: Option<f64>,
    pub kbar: Option<f64>,
    pub kmax: Option<f64>,
    pub dmin: usize,
    pub dmax: usize,
    pub p: usize,
    pub q: usize,
    pub r: usize,
    pub n: usize,
    pub num_parts: Option<usize>,
    pub sigma: Option<f64>,
}

impl BoundInputs {
    pub fn new(g: &Graph, cfg: &ExperimentConfig) -> Self {
        let s = g.degree_stats();
        BoundInputs {
            dmin: s.dmin,
            dmax: s.dmax,
            p: cfg.p(),
            q: cfg.q(),
            r: cfg.r(),
            n: cfg.n(),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub bias_bound: f64,
    pub bias_source: BoundKind,
    pub rmse_bound: f64,
    pub rmse_source: BoundKind,
    pub inputs: BoundInputs,
}

const CSV_COLUMNS: [&str; 16] = [
    "bias_bound",
    "bias_source",
    "rmse_bound",
    "rmse_source",
    "K1",
    "K2",
    "Kbar",
    "Kmax",
    "dmin",
    "dmax",
    "p",
    "q",
    "r",
    "n",
    "num_parts",
    "sigma",
];

impl BoundReport {
    pub fn csv_header() -> String {
        CSV_COLUMNS.join(",")
    }

    pub fn csv_row(&self) -> String {
        let opt = |x: Option<f64>| x.map_or(String::new(), |v| v.to_string());
        let i = &self.inputs;
        [
            self.bias_bound.to_string(),
            self.bias_source.as_str().to_string(),
            self.rmse_bound.to_string(),
            self.rmse_source.as_str().to_string(),
            opt(i.k1),
            opt(i.k2),
            opt(i.kbar),
            opt(i.kmax),
            i.dmin.to_string(),
            i.dmax.to_string(),
            i.p.to_string(),
            i.q.to_string(),
            i.r.to_string(),
            i.n.to_string(),
            i.num_parts.map_or(String::new(), |x| x.to_string()),
            opt(i.sigma),
        ]
        .join(",")
    }

    /// Lipschitz-constant bias bound and general rmse bound for a fixed
    /// partition.
    pub fn general(
        g: &Graph,
        partition: &Partition,
        k_v: &[f64],
        k1: f64,
        k2: f64,
        cfg: &ExperimentConfig,
    ) -> Result<Self> {
        let bias = bias_bound_lipschitz(g, partition, k_v)?;
        let rmse = mse_bound_general(g, partition, k1, k2, cfg)?;
        let kbar = ksum(k_v.iter().copied()) / k_v.len() as f64;
        Ok(BoundReport {
            bias_bound: bias,
            bias_source: BoundKind::BiasLipschitz,
            rmse_bound: rmse,
            rmse_source: BoundKind::RmseGeneral,
            inputs: BoundInputs {
                k1: Some(k1),
                k2: Some(k2),
                kbar: Some(kbar),
                kmax: Some(k_v.iter().copied().fold(0.0, f64::max)),
                ..BoundInputs::new(g, cfg)
            },
        })
    }

    pub fn dense(g: &Graph, k1: f64, k2: f64, cfg: &ExperimentConfig) -> Result<Self> {
        let (bias, rmse) = mse_bound_dense(g, k1, k2, cfg)?;
        Ok(BoundReport {
            bias_bound: bias,
            bias_source: BoundKind::BiasDense,
            rmse_bound: rmse,
            rmse_source: BoundKind::RmseDense,
            inputs: BoundInputs {
                k1: Some(k1),
                k2: Some(k2),
                ..BoundInputs::new(g, cfg)
            },
        })
    }

    pub fn sparse(g: &Graph, k1: f64, k2: f64, cfg: &ExperimentConfig) -> Result<Self> {
        let (bias, rmse) = mse_bound_sparse(g, k1, k2, cfg)?;
        Ok(BoundReport {
            bias_bound: bias,
            bias_source: BoundKind::BiasSparse,
            rmse_bound: rmse,
            rmse_source: BoundKind::RmseSparse,
            inputs: BoundInputs {
                k1: Some(k1),
                k2: Some(k2),
                ..BoundInputs::new(g, cfg)
            },
        })
    }

    /// CRD is the type-restricted design with `Π = {V}`, so the rmse slot
    /// holds the typed TV bound for that partition.
    pub fn crd(g: &Graph, kbar: f64, k: f64, cfg: &ExperimentConfig) -> Result<Self> {
        let single = TypePartition::single(g.num_vertices())?;
        let typed = typed_bounds(g, &single, k, cfg)?;
        Ok(BoundReport {
            bias_bound: bias_bound_crd(kbar, cfg.r(), cfg.n())?,
            bias_source: BoundKind::BiasCrd,
            rmse_bound: typed.rmse_tv,
            rmse_source: BoundKind::RmseTypesTv,
            inputs: BoundInputs {
                kbar: Some(kbar),
                k2: Some(k),
                num_parts: Some(1),
                ..BoundInputs::new(g, cfg)
            },
        })
    }

    pub fn typed(g: &Graph, types: &TypePartition, k: f64, cfg: &ExperimentConfig) -> Result<Self> {
        let b = typed_bounds(g, types, k, cfg)?;
        Ok(BoundReport {
            bias_bound: b.bias,
            bias_source: BoundKind::BiasTypes,
            rmse_bound: b.rmse_tv.min(b.rmse_sparse),
            rmse_source: if b.rmse_tv <= b.rmse_sparse {
                BoundKind::RmseTypesTv
            } else {
                BoundKind::RmseTypesSparse
            },
            inputs: BoundInputs {
                k2: Some(k),
                num_parts: Some(types.num_parts()),
                ..BoundInputs::new(g, cfg)
            },
        })
    }

    pub fn homophily(
        g: &Graph,
        types: &TypePartition,
        sigma: f64,
        k: f64,
        cfg: &ExperimentConfig,
    ) -> Result<Self> {
        let b = homophily_bounds(sigma, k, cfg, g, types)?;
        Ok(BoundReport {
            bias_bound: b.bias,
            bias_source: BoundKind::BiasHomophily,
            rmse_bound: b.rmse,
            rmse_source: BoundKind::RmseHomophily,
            inputs: BoundInputs {
                k2: Some(k),
                num_parts: Some(types.num_parts()),
                sigma: Some(sigma),
                ..BoundInputs::new(g, cfg)
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::partition_by_degree;

    fn cfg(p: usize, r: usize, n: usize) -> ExperimentConfig {
        ExperimentConfig::new(p, r, n).unwrap()
    }

    #[test]
    fn lipschitz_bias_examples() {
        let g = Graph::path(2);
        let part = Partition::new(2, vec![vec![0, 1]]).unwrap();
        assert_eq!(bias_bound_lipschitz(&g, &part, &[1.0, 1.0]).unwrap(), 1.0);

        let g = Graph::cycle(6).unwrap();
        let indep = Partition::new(6, vec![vec![0, 2], vec![1, 3], vec![4, 5]]).unwrap();
        // only the {4, 5} block carries an edge: (1/(3*2*1)) * (1/2 + 1/2) * K
        assert!((bias_bound_lipschitz(&g, &indep, &[2.0; 6]).unwrap() - 2.0 / 6.0).abs() < 1e-15);
        let indep = Partition::new(6, vec![vec![0, 3], vec![1, 4], vec![2, 5]]).unwrap();
        assert_eq!(bias_bound_lipschitz(&g, &indep, &[2.0; 6]).unwrap(), 0.0);
        let spec = InterferenceSpec::Linear { gamma: 1.0 };
        assert_eq!(bias_bound_weights(&g, &indep, &spec).unwrap(), 0.0);
        let with_iso = g.disjoint_union(&Graph::empty(2));
        let part = Partition::new(8, (0..4).map(|i| vec![2 * i, 2 * i + 1]).collect()).unwrap();
        assert!(bias_bound_lipschitz(&with_iso, &part, &[1.0; 8]).is_err());
    }

    #[test]
    fn weights_never_exceed_lipschitz_form() {
        for seed in 0..20u64 {
            let mut rng = crate::rng::seeded(seed);
            let g = crate::graph::erdos_renyi(12, 0.4, &mut rng).unwrap();
            if g.has_isolated_vertices() {
                continue;
            }
            let c = ExperimentConfig::for_graph(&g, 1, 3).unwrap();
            let part = crate::design::randomized_degree_blocking(&g, &c, &mut rng).unwrap();
            for spec in [
                InterferenceSpec::Linear { gamma: 0.7 },
                InterferenceSpec::ThresholdCount { gamma: 1.0, k: 2 },
                InterferenceSpec::ThresholdFraction {
                    gamma: 1.0,
                    frac: 0.4,
                },
            ] {
                let k: Vec<f64> = (0..12)
                    .map(|v| spec.lipschitz_constant(&g, v).unwrap())
                    .collect();
                let w = bias_bound_weights(&g, &part, &spec).unwrap();
                assert!(w <= bias_bound_lipschitz(&g, &part, &k).unwrap() + 1e-12);
            }
        }
    }

    #[test]
    fn crd_bias() {
        let (gamma, m, n) = (0.3, 4.0, 10);
        assert!((bias_bound_crd(gamma * m, 2, n).unwrap() - gamma * m / 19.0).abs() < 1e-15);
        assert_eq!(bias_bound_crd(0.0, 2, 5).unwrap(), 0.0);
        assert!(bias_bound_crd(1.0, 1, 1).is_err());
    }

    #[test]
    fn general_bound_on_complete_graph() {
        let (p, r, n) = (1, 3, 4);
        let rn = r * n;
        let g = Graph::complete(rn);
        let c = cfg(p, r, n);
        let part = partition_by_degree(&g, &c).unwrap();
        let (k1, k2) = (0.8, 1.3);
        let got = mse_bound_general(&g, &part, k1, k2, &c).unwrap();
        // C_P = 0; every vertex has r - 1 block neighbors out of rn - 1.
        let pqn = (p * (r - p) * n) as f64;
        let want = 4.0 * k2 / ((rn - 1) as f64).sqrt()
            + k2 * (rn * (r - 1)) as f64 / (pqn * (rn - 1) as f64);
        assert!((got - want).abs() < 1e-12);
        assert_eq!(mse_bound_general(&g, &part, 0.0, 0.0, &c).unwrap(), 0.0);
    }

    #[test]
    fn dense_bound_examples() {
        let g = Graph::complete(6);
        let c = cfg(1, 2, 3);
        let dmin: f64 = 5.0;
        let k2 = 1.5;
        let (bias, rmse) = mse_bound_dense(&g, 0.0, k2, &c).unwrap();
        assert!((rmse - (4.0 * k2 / (2.0 * dmin.sqrt()) + 2.0 * k2 / dmin)).abs() < 1e-12);
        assert!((bias - k2 / dmin).abs() < 1e-12);
        // dense limit: the K2 terms vanish as dmin grows
        let big = Graph::complete(400);
        let c = cfg(1, 2, 200);
        let (_, rmse) = mse_bound_dense(&big, 1.0, 1e-9, &c).unwrap();
        assert!((rmse - 2.0 / 200.0).abs() < 1e-8);
        assert!(mse_bound_dense(&Graph::empty(4), 1.0, 1.0, &cfg(1, 2, 2)).is_err());
    }

    #[test]
    fn sparse_bound_examples() {
        let g = Graph::cycle(12).unwrap();
        let c = cfg(1, 3, 4);
        let (bias, _) = mse_bound_sparse(&g, 0.9, 5.0, &c).unwrap();
        assert!((bias - 0.9 / 4.0).abs() < 1e-15);
        let k2 = 0.6;
        let (_, rmse) = mse_bound_sparse(&g, 0.0, k2, &c).unwrap();
        let (r, d, n, pq) = (3.0f64, 2.0f64, 4.0f64, 2.0f64);
        let root = (r * r * d * d + 1.0).sqrt();
        let want = 4.0 * k2 * root / (n * d).sqrt()
            + r * k2 * (r - 1.0).min(d) * root / (pq * n.sqrt() * d);
        assert!((rmse - want).abs() < 1e-12);
    }

    #[test]
    fn typed_examples() {
        let g = Graph::cycle(8).unwrap();
        let c = cfg(1, 2, 4);
        let single = TypePartition::single(8).unwrap();
        let k = 0.7;
        assert!((typed_bounds(&g, &single, k, &c).unwrap().bias - k / 8.0).abs() < 1e-15);
        let odd = TypePartition::new(8, vec![vec![0], vec![1, 2, 3, 4, 5, 6, 7]]).unwrap();
        assert!(typed_bounds(&g, &odd, k, &c).is_err());
        let two = TypePartition::new(8, vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]]).unwrap();
        let b = typed_bounds(&g, &two, k, &c).unwrap();
        // a fixed refinement never exceeds the worst-case TV value
        let part = Partition::new(8, vec![vec![0, 1], vec![2, 3], vec![4, 6], vec![5, 7]]).unwrap();
        assert!(typed_rmse_bound_tv_for_partition(&g, &part, k, &c).unwrap() <= b.rmse_tv + 1e-15);
    }

    #[test]
    fn homophily_zero() {
        let g = Graph::cycle(8).unwrap();
        let c = cfg(1, 2, 4);
        let two = TypePartition::new(8, vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]]).unwrap();
        let b = homophily_bounds(0.0, 0.0, &c, &g, &two).unwrap();
        assert_eq!((b.bias, b.rmse, b.var_ideal), (0.0, 0.0, 0.0));
        let b = homophily_bounds(0.5, 1.0, &c, &g, &two).unwrap();
        assert_eq!(b.bias, 2.0 / 4.0);
        assert_eq!(b.bias_rn, 2.0 / 8.0);
        assert!((b.var_ideal - 4.0 * 0.25 / 4.0).abs() < 1e-15);
    }

    #[test]
    fn monotone_in_constants() {
        let mut rng = crate::rng::seeded(8);
        let g = crate::graph::preferential_attachment(30, 1.0, 2, &mut rng).unwrap();
        let c = ExperimentConfig::for_graph(&g, 1, 3).unwrap();
        let part = partition_by_degree(&g, &c).unwrap();
        let types = crate::design::degree_class_types(&g, 3).unwrap();
        let grid = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0];
        for w in grid.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            for other in grid {
                let le = |a: f64, b: f64| assert!(a <= b + 1e-15, "{a} > {b}");
                le(
                    mse_bound_general(&g, &part, lo, other, &c).unwrap(),
                    mse_bound_general(&g, &part, hi, other, &c).unwrap(),
                );
                le(
                    mse_bound_general(&g, &part, other, lo, &c).unwrap(),
                    mse_bound_general(&g, &part, other, hi, &c).unwrap(),
                );
                for f in [mse_bound_dense, mse_bound_sparse] {
                    let (a, b) = (f(&g, lo, other, &c).unwrap(), f(&g, hi, other, &c).unwrap());
                    le(a.0, b.0);
                    le(a.1, b.1);
                    let (a, b) = (f(&g, other, lo, &c).unwrap(), f(&g, other, hi, &c).unwrap());
                    le(a.0, b.0);
                    le(a.1, b.1);
                }
                le(
                    bias_bound_lipschitz(&g, &part, &vec![lo; 30]).unwrap(),
                    bias_bound_lipschitz(&g, &part, &vec![hi; 30]).unwrap(),
                );
                le(
                    bias_bound_crd(lo, 3, 10).unwrap(),
                    bias_bound_crd(hi, 3, 10).unwrap(),
                );
                let (a, b) = (
                    typed_bounds(&g, &types, lo, &c).unwrap(),
                    typed_bounds(&g, &types, hi, &c).unwrap(),
                );
                le(a.bias, b.bias);
                le(a.rmse_tv, b.rmse_tv);
                le(a.rmse_sparse, b.rmse_sparse);
                let (a, b) = (
                    homophily_bounds(other, lo, &c, &g, &types).unwrap(),
                    homophily_bounds(other, hi, &c, &g, &types).unwrap(),
                );
                le(a.bias, b.bias);
                le(a.rmse, b.rmse);
            }
        }
    }

    #[test]
    fn report_csv() {
        let g = Graph::cycle(6).unwrap();
        let c = cfg(1, 2, 3);
        let r = BoundReport::dense(&g, 1.0, 1.0, &c).unwrap();
        let header = BoundReport::csv_header();
        let row = r.csv_row();
        assert_eq!(header.split(',').count(), row.split(',').count());
        assert!(row.contains("bias-dense"));
        assert!(r.bias_bound >= 0.0 && r.rmse_bound >= 0.0);
    }
}
