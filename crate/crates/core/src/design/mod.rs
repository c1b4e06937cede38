//! Experiment configuration, partitions, treatments and the designs that
//! draw them.
//!
//! A design picks `pn` treated vertices out of `rn`. The restricted designs
//! fix a partition into `n` blocks of size `r` and treat `p` uniformly chosen
//! vertices inside every block, independently across blocks.

mod enumerate;
mod io;
mod types;

use rand::seq::index;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::{Error, Result};

pub use enumerate::{binomial, Enumeration, DEFAULT_ENUMERATION_CAP};
pub use io::{read_blocks, read_treatment, write_blocks, write_treatment};
pub use types::TypePartition;

/// `p` treated out of every `r`, with `n` blocks; `q = r - p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExperimentConfig {
    p: usize,
    r: usize,
    n: usize,
}

impl ExperimentConfig {
    pub fn new(p: usize, r: usize, n: usize) -> Result<Self> {
        if p == 0 || p >= r {
            return Err(Error::InvalidConfig(format!(
                "need 1 <= p < r, got p = {p}, r = {r}"
            )));
        }
        if n == 0 {
            return Err(Error::InvalidConfig("n must be positive".into()));
        }
        Ok(ExperimentConfig { p, r, n })
    }

    /// Derives `n = |V(G)| / r`, rejecting graphs whose size is not a
    /// multiple of `r`.
    pub fn for_graph(g: &Graph, p: usize, r: usize) -> Result<Self> {
        Self::for_size(g.num_vertices(), p, r)
    }

    pub fn for_size(num_vertices: usize, p: usize, r: usize) -> Result<Self> {
        if r == 0 || !num_vertices.is_multiple_of(r) {
            return Err(Error::InvalidConfig(format!(
                "{num_vertices} vertices cannot be split into blocks of size {r}"
            )));
        }
        Self::new(p, r, num_vertices / r)
    }

    pub fn p(&self) -> usize {
        self.p
    }
    pub fn q(&self) -> usize {
        self.r - self.p
    }
    pub fn r(&self) -> usize {
        self.r
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn num_vertices(&self) -> usize {
        self.r * self.n
    }
    pub fn num_treated(&self) -> usize {
        self.p * self.n
    }
    /// `p * q * n`, the normalizer of the estimator.
    pub fn pqn(&self) -> f64 {
        (self.p * self.q() * self.n) as f64
    }

    pub fn check_graph(&self, g: &Graph) -> Result<()> {
        if g.num_vertices() != self.num_vertices() {
            return Err(Error::InvalidConfig(format!(
                "graph has {} vertices but r * n = {}",
                g.num_vertices(),
                self.num_vertices()
            )));
        }
        Ok(())
    }
}

/// Ordered blocks of equal size covering `0..num_vertices` exactly once.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
}

impl Partition {
    pub fn new(num_vertices: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let size = blocks.first().map_or(0, Vec::len);
        if size == 0 {
            return Err(Error::PartitionMismatch("no blocks or empty block".into()));
        }
        let mut block_of = vec![usize::MAX; num_vertices];
        for (i, block) in blocks.iter().enumerate() {
            if block.len() != size {
                return Err(Error::PartitionMismatch(format!(
                    "block {i} has {} vertices, block 0 has {size}",
                    block.len()
                )));
            }
            for &v in block {
                if v >= num_vertices {
                    return Err(Error::VertexOutOfRange {
                        vertex: v,
                        num_vertices,
                    });
                }
                if block_of[v] != usize::MAX {
                    return Err(Error::PartitionMismatch(format!(
                        "vertex {v} appears in more than one block"
                    )));
                }
                block_of[v] = i;
            }
        }
        if let Some(v) = block_of.iter().position(|&b| b == usize::MAX) {
            return Err(Error::PartitionMismatch(format!(
                "vertex {v} is not covered"
            )));
        }
        Ok(Partition { blocks, block_of })
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }
    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }
    pub fn block_size(&self) -> usize {
        self.blocks[0].len()
    }
    pub fn num_vertices(&self) -> usize {
        self.block_of.len()
    }
    pub fn block_index(&self, v: usize) -> usize {
        self.block_of[v]
    }
    /// The block `P_v` containing `v`.
    pub fn block_of(&self, v: usize) -> &[usize] {
        &self.blocks[self.block_of[v]]
    }

    pub fn check_config(&self, cfg: &ExperimentConfig) -> Result<()> {
        if self.block_size() != cfg.r() || self.num_blocks() != cfg.n() {
            return Err(Error::PartitionMismatch(format!(
                "{} blocks of size {} vs config n = {}, r = {}",
                self.num_blocks(),
                self.block_size(),
                cfg.n(),
                cfg.r()
            )));
        }
        Ok(())
    }

    /// True when no block contains an edge of `g`.
    pub fn is_independent_in(&self, g: &Graph) -> bool {
        (0..self.num_vertices()).all(|v| {
            g.neighbors(v)
                .iter()
                .all(|&w| self.block_of[w] != self.block_of[v])
        })
    }

    /// `|P_v ∩ N(v)|`
    pub fn same_block_neighbors(&self, g: &Graph, v: usize) -> usize {
        g.neighbors(v)
            .iter()
            .filter(|&&w| self.block_of[w] == self.block_of[v])
            .count()
    }
}

/// Treated set `T` with `|T| = p n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Treatment {
    mask: Vec<bool>,
    config: ExperimentConfig,
}

impl Treatment {
    pub fn from_vertices(vertices: &[usize], config: ExperimentConfig) -> Result<Self> {
        let num_vertices = config.num_vertices();
        let mut mask = vec![false; num_vertices];
        for &v in vertices {
            if v >= num_vertices {
                return Err(Error::VertexOutOfRange {
                    vertex: v,
                    num_vertices,
                });
            }
            if mask[v] {
                return Err(Error::InvalidParameter(format!(
                    "vertex {v} listed twice in treatment"
                )));
            }
            mask[v] = true;
        }
        Self::from_mask(mask, config)
    }

    pub fn from_mask(mask: Vec<bool>, config: ExperimentConfig) -> Result<Self> {
        if mask.len() != config.num_vertices() {
            return Err(Error::InvalidConfig(format!(
                "treatment mask covers {} vertices, config expects {}",
                mask.len(),
                config.num_vertices()
            )));
        }
        let actual = mask.iter().filter(|&&b| b).count();
        if actual != config.num_treated() {
            return Err(Error::TreatmentSize {
                expected: config.num_treated(),
                actual,
            });
        }
        Ok(Treatment { mask, config })
    }

    pub(crate) fn from_mask_unchecked(mask: Vec<bool>, config: ExperimentConfig) -> Self {
        debug_assert_eq!(mask.iter().filter(|&&b| b).count(), config.num_treated());
        Treatment { mask, config }
    }

    pub fn contains(&self, v: usize) -> bool {
        self.mask[v]
    }
    pub fn mask(&self) -> &[bool] {
        &self.mask
    }
    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }
    pub fn num_vertices(&self) -> usize {
        self.mask.len()
    }

    pub fn treated(&self) -> Vec<usize> {
        (0..self.mask.len()).filter(|&v| self.mask[v]).collect()
    }

    /// `q` if treated, `-p` otherwise.
    pub fn pq_sign(&self, v: usize) -> f64 {
        if self.mask[v] {
            self.config.q() as f64
        } else {
            -(self.config.p() as f64)
        }
    }

    /// `V(G) \ T`; only a valid treatment when `p = q`.
    pub fn complement(&self) -> Result<Treatment> {
        if self.config.p() != self.config.q() {
            return Err(Error::InvalidConfig(
                "the complement of T has size qn, which differs from pn unless p = q".into(),
            ));
        }
        Ok(Treatment {
            mask: self.mask.iter().map(|&b| !b).collect(),
            config: self.config,
        })
    }

    /// `|T ∩ N(v)|` for every vertex.
    pub fn treated_neighbor_counts(&self, g: &Graph) -> Vec<usize> {
        (0..g.num_vertices())
            .map(|v| g.neighbors(v).iter().filter(|&&w| self.mask[w]).count())
            .collect()
    }
}

/// Within-block randomization `T_{B,P}`: `p` uniform members of every block,
/// independently across blocks.
pub fn sample_within_blocks<R: Rng + ?Sized>(
    partition: &Partition,
    cfg: &ExperimentConfig,
    rng: &mut R,
) -> Result<Treatment> {
    partition.check_config(cfg)?;
    let mut mask = vec![false; partition.num_vertices()];
    for block in partition.blocks() {
        for j in index::sample(rng, cfg.r(), cfg.p()) {
            mask[block[j]] = true;
        }
    }
    Ok(Treatment::from_mask_unchecked(mask, *cfg))
}

/// Completely randomized design: uniform over all `pn`-subsets of the `rn`
/// vertices.
pub fn crd<R: Rng + ?Sized>(cfg: &ExperimentConfig, rng: &mut R) -> Treatment {
    let mut mask = vec![false; cfg.num_vertices()];
    for v in index::sample(rng, cfg.num_vertices(), cfg.num_treated()) {
        mask[v] = true;
    }
    Treatment::from_mask_unchecked(mask, *cfg)
}

/// Vertices by non-increasing degree, ties by ascending index.
pub fn degree_order(g: &Graph) -> Vec<usize> {
    let mut order: Vec<usize> = (0..g.num_vertices()).collect();
    order.sort_by(|&a, &b| g.degree(b).cmp(&g.degree(a)).then(a.cmp(&b)));
    order
}

/// Partition by degree `P*`: consecutive runs of `r` vertices in
/// [`degree_order`].
pub fn partition_by_degree(g: &Graph, cfg: &ExperimentConfig) -> Result<Partition> {
    cfg.check_graph(g)?;
    let blocks = degree_order(g)
        .chunks(cfg.r())
        .map(<[usize]>::to_vec)
        .collect();
    Partition::new(g.num_vertices(), blocks)
}

/// Leftover set `S` for randomized degree blocking: from every degree class,
/// the `count mod r` vertices of highest index. Returned in degree order.
pub fn degree_blocking_leftover(g: &Graph, r: usize) -> Vec<usize> {
    let classes = degree_classes(g);
    let mut leftover: Vec<usize> = classes
        .iter()
        .flat_map(|class| class[class.len() - class.len() % r..].iter().copied())
        .collect();
    leftover.sort_by(|&a, &b| g.degree(b).cmp(&g.degree(a)).then(a.cmp(&b)));
    leftover
}

/// Vertices grouped by exact degree, classes in decreasing degree order,
/// members ascending.
fn degree_classes(g: &Graph) -> Vec<Vec<usize>> {
    let mut by_degree: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for v in 0..g.num_vertices() {
        by_degree.entry(g.degree(v)).or_default().push(v);
    }
    by_degree.into_values().rev().collect()
}

/// Randomized degree blocking `P**`.
///
/// The leftover set `S` (see [`degree_blocking_leftover`]) is blocked in
/// degree order; everything else is partitioned uniformly at random into
/// blocks of `r` vertices sharing a degree. `S` blocks come first.
pub fn randomized_degree_blocking<R: Rng + ?Sized>(
    g: &Graph,
    cfg: &ExperimentConfig,
    rng: &mut R,
) -> Result<Partition> {
    cfg.check_graph(g)?;
    let r = cfg.r();
    let mut blocks: Vec<Vec<usize>> = degree_blocking_leftover(g, r)
        .chunks(r)
        .map(<[usize]>::to_vec)
        .collect();
    for class in degree_classes(g) {
        let keep = class.len() - class.len() % r;
        let mut members = class[..keep].to_vec();
        members.shuffle(rng);
        blocks.extend(members.chunks(r).map(<[usize]>::to_vec));
    }
    Partition::new(g.num_vertices(), blocks)
}

/// Type partition equivalent to randomized degree blocking: each leftover
/// block of `S` is one part and each remaining degree class `V_d` is one
/// part. Drawing from [`type_restricted`] with it has the same law as
/// within-block randomization on [`randomized_degree_blocking`].
pub fn degree_class_types(g: &Graph, r: usize) -> Result<TypePartition> {
    let mut parts: Vec<Vec<usize>> = degree_blocking_leftover(g, r)
        .chunks(r)
        .map(<[usize]>::to_vec)
        .collect();
    for class in degree_classes(g) {
        let keep = class.len() - class.len() % r;
        if keep > 0 {
            parts.push(class[..keep].to_vec());
        }
    }
    TypePartition::new(g.num_vertices(), parts)
}

/// Semi-restricted randomization `T_Pi`: independently in every part `pi`, a
/// uniform subset of size `p |pi| / r`.
pub fn type_restricted<R: Rng + ?Sized>(
    types: &TypePartition,
    cfg: &ExperimentConfig,
    rng: &mut R,
) -> Result<Treatment> {
    types.check_config(cfg)?;
    let mut mask = vec![false; types.num_vertices()];
    for part in types.parts() {
        let k = cfg.p() * part.len() / cfg.r();
        for j in index::sample(rng, part.len(), k) {
            mask[part[j]] = true;
        }
    }
    Ok(Treatment::from_mask_unchecked(mask, *cfg))
}
