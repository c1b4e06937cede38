//! Exact moments by enumerating every equally likely treatment, seeded Monte
//! Carlo moments, and an on-disk cache for the exact results.
//!
//! Both paths evaluate treatments in index order (possibly in parallel) and
//! reduce sequentially with compensated sums, so results do not depend on the
//! execution mode or thread count.

use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::design::{
    crd, partition_by_degree, randomized_degree_blocking, sample_within_blocks, type_restricted,
    Enumeration, ExperimentConfig, Partition, Treatment, TypePartition,
};
use crate::exec::{self, Exec};
use crate::graph::Graph;
use crate::outcome::{average_direct_effect, decompose, Decomposition, OutcomeModel};
use crate::rng;
use crate::sum::ksum;
use crate::{Error, Result};

/// Treatments evaluated per parallel task during enumeration.
const CHUNK: usize = 4096;

/// Designs whose support can be enumerated with equal weights.
#[derive(Debug, Clone, PartialEq)]
pub enum ExactDesign {
    Crd,
    Blocked(Partition),
    Typed(TypePartition),
}

impl ExactDesign {
    fn enumeration(&self, cfg: &ExperimentConfig, cap: u128) -> Result<Enumeration> {
        match self {
            ExactDesign::Crd => Enumeration::crd(cfg, cap),
            ExactDesign::Blocked(p) => Enumeration::blocks(p, cfg, cap),
            ExactDesign::Typed(t) => Enumeration::types(t, cfg, cap),
        }
    }

    /// Stable text form, also used for cache keys.
    pub fn descriptor(&self) -> String {
        let groups = |gs: &[Vec<usize>]| {
            gs.iter()
                .map(|g| g.iter().map(usize::to_string).collect::<Vec<_>>().join(" "))
                .collect::<Vec<_>>()
                .join("|")
        };
        match self {
            ExactDesign::Crd => "crd".into(),
            ExactDesign::Blocked(p) => format!("blocked:{}", groups(p.blocks())),
            ExactDesign::Typed(t) => format!("typed:{}", groups(t.parts())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactMoments {
    pub design: String,
    pub instance: String,
    pub num_treatments: usize,
    pub average_effect: f64,
    pub mean_xi: f64,
    pub second_moment_xi: f64,
    pub mean_estimator: f64,
    pub var_estimator: f64,
    pub mean_ideal: f64,
    pub var_ideal: f64,
}

impl ExactMoments {
    /// `E[t̂] - t̄`
    pub fn bias(&self) -> f64 {
        self.mean_estimator - self.average_effect
    }

    /// `E[(t̂ - t̄)²]`
    pub fn mse(&self) -> f64 {
        self.var_estimator + self.bias() * self.bias()
    }

    pub fn rms_xi(&self) -> f64 {
        self.second_moment_xi.sqrt()
    }
}

fn mean_and_var(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = ksum(values.iter().copied()) / n;
    let var = ksum(values.iter().map(|x| (x - mean) * (x - mean))) / n;
    (mean, var)
}

/// Short instance descriptor: sizes plus the leading bytes of the cache
/// fingerprint.
fn instance_descriptor(g: &Graph, model: &OutcomeModel) -> String {
    let fp = fingerprint(g, model);
    format!(
        "V={} E={} f={} #{}",
        g.num_vertices(),
        g.num_edges(),
        model.spec(),
        &fp[..12]
    )
}

fn fingerprint(g: &Graph, model: &OutcomeModel) -> String {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(g).expect("graph serializes"));
    for (x, t) in model.x().iter().zip(model.t()) {
        h.update(x.to_bits().to_le_bytes());
        h.update(t.to_bits().to_le_bytes());
    }
    h.update(format!("{:?}", model.spec()).as_bytes());
    hex::encode(h.finalize())
}

/// Exact moments over the whole support of `design`.
pub fn exact_moments(
    g: &Graph,
    design: &ExactDesign,
    cfg: &ExperimentConfig,
    model: &OutcomeModel,
    cap: u128,
    exec: Exec,
) -> Result<ExactMoments> {
    cfg.check_graph(g)?;
    model.check_graph(g)?;
    let e = design.enumeration(cfg, cap)?;
    let chunks = e.len().div_ceil(CHUNK);
    let per_chunk: Vec<Result<Vec<Decomposition>>> = exec::map_range(exec, chunks, |c| {
        e.iter_range(c * CHUNK, (c + 1) * CHUNK)
            .map(|t| decompose(model, g, &t))
            .collect()
    });
    let mut all = Vec::with_capacity(e.len());
    for chunk in per_chunk {
        all.extend(chunk?);
    }
    let xs: Vec<f64> = all.iter().map(|d| d.xi).collect();
    let est: Vec<f64> = all.iter().map(|d| d.estimate).collect();
    let ideal: Vec<f64> = all.iter().map(|d| d.ideal).collect();
    let n = all.len() as f64;
    let (mean_estimator, var_estimator) = mean_and_var(&est);
    let (mean_ideal, var_ideal) = mean_and_var(&ideal);
    Ok(ExactMoments {
        design: design.descriptor(),
        instance: instance_descriptor(g, model),
        num_treatments: all.len(),
        average_effect: average_direct_effect(model),
        mean_xi: ksum(xs.iter().copied()) / n,
        second_moment_xi: ksum(xs.iter().map(|x| x * x)) / n,
        mean_estimator,
        var_estimator,
        mean_ideal,
        var_ideal,
    })
}

pub fn exact_moments_blocked(
    g: &Graph,
    partition: &Partition,
    cfg: &ExperimentConfig,
    model: &OutcomeModel,
    cap: u128,
    exec: Exec,
) -> Result<ExactMoments> {
    exact_moments(
        g,
        &ExactDesign::Blocked(partition.clone()),
        cfg,
        model,
        cap,
        exec,
    )
}

pub fn exact_moments_crd(
    g: &Graph,
    cfg: &ExperimentConfig,
    model: &OutcomeModel,
    cap: u128,
    exec: Exec,
) -> Result<ExactMoments> {
    exact_moments(g, &ExactDesign::Crd, cfg, model, cap, exec)
}

pub fn exact_moments_typed(
    g: &Graph,
    types: &TypePartition,
    cfg: &ExperimentConfig,
    model: &OutcomeModel,
    cap: u128,
    exec: Exec,
) -> Result<ExactMoments> {
    exact_moments(g, &ExactDesign::Typed(types.clone()), cfg, model, cap, exec)
}

/// Treatment samplers, including designs with a random partition.
#[derive(Debug, Clone, PartialEq)]
pub enum Design {
    Crd,
    /// Within-block randomization on a fixed partition.
    Blocked(Partition),
    /// Partition by degree, fixed per graph.
    DegreeBlocked,
    /// Randomized degree blocking, redrawn for every treatment.
    DegreeBlockedRandom,
    Typed(TypePartition),
}

impl Design {
    pub fn label(&self) -> &'static str {
        match self {
            Design::Crd => "crd",
            Design::Blocked(_) => "blocked",
            Design::DegreeBlocked => "pbd",
            Design::DegreeBlockedRandom => "pbd-random",
            Design::Typed(_) => "typed",
        }
    }

    /// Resolves per-graph work (the degree partition) once.
    pub fn prepare(&self, g: &Graph, cfg: &ExperimentConfig) -> Result<Design> {
        Ok(match self {
            Design::DegreeBlocked => Design::Blocked(partition_by_degree(g, cfg)?),
            other => other.clone(),
        })
    }

    pub fn sample<R: Rng + ?Sized>(
        &self,
        g: &Graph,
        cfg: &ExperimentConfig,
        rng: &mut R,
    ) -> Result<Treatment> {
        match self {
            Design::Crd => Ok(crd(cfg, rng)),
            Design::Blocked(p) => sample_within_blocks(p, cfg, rng),
            Design::DegreeBlocked => sample_within_blocks(&partition_by_degree(g, cfg)?, cfg, rng),
            Design::DegreeBlockedRandom => {
                let p = randomized_degree_blocking(g, cfg, rng)?;
                sample_within_blocks(&p, cfg, rng)
            }
            Design::Typed(t) => type_restricted(t, cfg, rng),
        }
    }
}

/// Sample moments from `replications` independent treatments, with standard
/// errors of each mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloMoments {
    pub replications: usize,
    pub average_effect: f64,
    pub mean_xi: f64,
    pub se_mean_xi: f64,
    pub second_moment_xi: f64,
    pub se_second_moment_xi: f64,
    pub mean_estimator: f64,
    pub se_mean_estimator: f64,
    /// Unbiased sample variance of `t̂`.
    pub var_estimator: f64,
    /// Mean of `(t̂ - t̄)²`.
    pub mse: f64,
    pub se_mse: f64,
}

impl MonteCarloMoments {
    pub fn bias(&self) -> f64 {
        self.mean_estimator - self.average_effect
    }
}

/// Sample mean and its standard error.
fn mean_se(values: &[f64]) -> (f64, f64, f64) {
    let n = values.len() as f64;
    let mean = ksum(values.iter().copied()) / n;
    let var = ksum(values.iter().map(|x| (x - mean) * (x - mean))) / (n - 1.0);
    (mean, (var / n).sqrt(), var)
}

/// Replication `i` draws from `rng::stream(seed, i)`.
pub fn monte_carlo_moments(
    design: &Design,
    model: &OutcomeModel,
    g: &Graph,
    cfg: &ExperimentConfig,
    replications: usize,
    seed: u64,
    exec: Exec,
) -> Result<MonteCarloMoments> {
    if replications < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 replications, got {replications}"
        )));
    }
    cfg.check_graph(g)?;
    model.check_graph(g)?;
    let design = design.prepare(g, cfg)?;
    let draws: Vec<Result<Decomposition>> = exec::map_range(exec, replications, |i| {
        let mut rng = rng::stream(seed, i as u64);
        let t = design.sample(g, cfg, &mut rng)?;
        decompose(model, g, &t)
    });
    let draws = draws.into_iter().collect::<Result<Vec<_>>>()?;
    let tbar = average_direct_effect(model);
    let xs: Vec<f64> = draws.iter().map(|d| d.xi).collect();
    let xs2: Vec<f64> = xs.iter().map(|x| x * x).collect();
    let est: Vec<f64> = draws.iter().map(|d| d.estimate).collect();
    let sq: Vec<f64> = est.iter().map(|e| (e - tbar) * (e - tbar)).collect();
    let (mean_xi, se_mean_xi, _) = mean_se(&xs);
    let (second_moment_xi, se_second_moment_xi, _) = mean_se(&xs2);
    let (mean_estimator, se_mean_estimator, var_estimator) = mean_se(&est);
    let (mse, se_mse, _) = mean_se(&sq);
    Ok(MonteCarloMoments {
        replications,
        average_effect: tbar,
        mean_xi,
        se_mean_xi,
        second_moment_xi,
        se_second_moment_xi,
        mean_estimator,
        se_mean_estimator,
        var_estimator,
        mse,
        se_mse,
    })
}

/// JSON files named by the SHA-256 of (graph, design, config, model).
#[derive(Debug, Clone)]
pub struct OracleCache {
    dir: PathBuf,
}

impl OracleCache {
    pub fn new<P: AsRef<Path>>(dir: P) -> Result<Self> {
        fs::create_dir_all(dir.as_ref())?;
        Ok(OracleCache {
            dir: dir.as_ref().to_path_buf(),
        })
    }

    pub fn key(
        g: &Graph,
        design: &ExactDesign,
        cfg: &ExperimentConfig,
        model: &OutcomeModel,
    ) -> String {
        let mut h = Sha256::new();
        h.update(fingerprint(g, model).as_bytes());
        h.update(design.descriptor().as_bytes());
        h.update(format!("{}/{}/{}", cfg.p(), cfg.r(), cfg.n()).as_bytes());
        hex::encode(h.finalize())
    }

    pub fn path_for(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn get(&self, key: &str) -> Result<Option<ExactMoments>> {
        let path = self.path_for(key);
        if !path.exists() {
            return Ok(None);
        }
        Ok(Some(serde_json::from_slice(&fs::read(path)?)?))
    }

    pub fn put(&self, key: &str, moments: &ExactMoments) -> Result<()> {
        let tmp = self.dir.join(format!("{key}.json.tmp"));
        fs::write(&tmp, serde_json::to_vec_pretty(moments)?)?;
        fs::rename(tmp, self.path_for(key))?;
        Ok(())
    }

    pub fn get_or_compute(
        &self,
        g: &Graph,
        design: &ExactDesign,
        cfg: &ExperimentConfig,
        model: &OutcomeModel,
        cap: u128,
        exec: Exec,
    ) -> Result<ExactMoments> {
        let key = Self::key(g, design, cfg, model);
        if let Some(hit) = self.get(&key)? {
            log::debug!("oracle cache hit {key}");
            return Ok(hit);
        }
        let m = exact_moments(g, design, cfg, model, cap, exec)?;
        self.put(&key, &m)?;
        Ok(m)
    }
}
