//! Desk-scale simulation runs: build a graph, fix a Gaussian outcome model,
//! re-randomize the treatment `R` times under one design and report the MSE
//! of the Neyman estimator, plus the matching closed-form bounds.
//!
//! A run is a pure function of its config. Replications use
//! `rng::stream(seed, i)` and are reduced in index order, and sweep cells are
//! collected in grid order, so output does not depend on thread count.

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bounds::BoundReport;
use crate::design::{degree_class_types, partition_by_degree, ExperimentConfig, TypePartition};
use crate::exec::{self, Exec};
use crate::graph::{erdos_renyi, preferential_attachment, read_edge_list, Graph};
use crate::interference::{bidegree_domain, lipschitz_norm, DkMetric, InterferenceSpec};
use crate::oracle::Design;
use crate::outcome::{
    average_direct_effect, decompose, sample_gaussian_model, sample_gaussian_model_with,
};
use crate::rng;
use crate::sum::ksum;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphFamily {
    /// Erdős–Rényi `G(N, density)`.
    #[default]
    Er,
    /// Preferential attachment with parameters `(pow, m)`.
    Pa,
    /// Edge list read from `graph_file`.
    File,
}

impl GraphFamily {
    pub fn as_str(self) -> &'static str {
        match self {
            GraphFamily::Er => "er",
            GraphFamily::Pa => "pa",
            GraphFamily::File => "file",
        }
    }
}

impl fmt::Display for GraphFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GraphFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "er" => Ok(GraphFamily::Er),
            "pa" => Ok(GraphFamily::Pa),
            "file" => Ok(GraphFamily::File),
            _ => Err(Error::InvalidConfig(format!("unknown graph family '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DesignKind {
    #[default]
    Crd,
    /// Within-block randomization on the degree partition.
    Pbd,
    /// Randomized degree blocking, redrawn for every replication.
    PbdRandom,
    /// Type-restricted design on the degree-class types.
    Typed,
}

impl DesignKind {
    pub const ALL: [DesignKind; 4] = [
        DesignKind::Crd,
        DesignKind::Pbd,
        DesignKind::PbdRandom,
        DesignKind::Typed,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DesignKind::Crd => "crd",
            DesignKind::Pbd => "pbd",
            DesignKind::PbdRandom => "pbd-random",
            DesignKind::Typed => "typed",
        }
    }

    /// Sampler for `g`, with per-graph structure resolved.
    pub fn design(self, g: &Graph, cfg: &ExperimentConfig) -> Result<Design> {
        Ok(match self {
            DesignKind::Crd => Design::Crd,
            DesignKind::Pbd => Design::Blocked(partition_by_degree(g, cfg)?),
            DesignKind::PbdRandom => Design::DegreeBlockedRandom,
            DesignKind::Typed => Design::Typed(degree_class_types(g, cfg.r())?),
        })
    }
}

impl fmt::Display for DesignKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DesignKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        DesignKind::ALL
            .into_iter()
            .find(|d| d.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown design '{s}'")))
    }
}

/// Builds a spec from a kind (`linear`, `normalized-linear`,
/// `threshold-count:K`, `threshold-fraction:F`, `none`) and a strength.
pub fn interference_from_kind(kind: &str, gamma: f64) -> Result<InterferenceSpec> {
    let kind = kind.trim();
    if kind == "none" {
        return Ok(InterferenceSpec::none());
    }
    let descriptor = match kind.split_once(':') {
        Some((name, rest)) => format!("{name}:{gamma}:{rest}"),
        None => format!("{kind}:{gamma}"),
    };
    descriptor.parse()
}

/// One simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub family: GraphFamily,
    /// Number of vertices `N`; ignored for `file`.
    pub vertices: usize,
    /// Edge probability for `er`.
    pub density: f64,
    /// Attachment exponent for `pa`.
    pub pow: f64,
    /// Edges per new vertex for `pa`.
    pub m: usize,
    pub graph_file: Option<PathBuf>,
    pub graph_seed: u64,
    pub design: DesignKind,
    /// Interference kind, see [`interference_from_kind`].
    pub interference: String,
    pub gamma: f64,
    pub model_seed: u64,
    /// Seed of the treatment draws.
    pub seed: u64,
    pub replications: usize,
    pub output: Option<PathBuf>,
    pub p: usize,
    pub r: usize,
    /// Draw fresh `x, t` for every replication instead of fixing them per
    /// graph.
    pub redraw_model: bool,
    /// Independent graphs per run; results are averaged over them.
    pub repeats: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            family: GraphFamily::Er,
            vertices: 100,
            density: 0.1,
            pow: 1.0,
            m: 2,
            graph_file: None,
            graph_seed: 1,
            design: DesignKind::Crd,
            interference: "linear".into(),
            gamma: 1.0,
            model_seed: 2,
            seed: 3,
            replications: 2000,
            output: None,
            p: 1,
            r: 2,
            redraw_model: false,
            repeats: 1,
        }
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(msg.into())
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(invalid("replications must be at least 1"));
        }
        if self.repeats == 0 {
            return Err(invalid("repeats must be at least 1"));
        }
        if self.r < 2 || self.p == 0 || self.p >= self.r {
            return Err(invalid(format!(
                "need 0 < p < r, got p = {}, r = {}",
                self.p, self.r
            )));
        }
        if !self.gamma.is_finite() {
            return Err(invalid("gamma must be finite"));
        }
        interference_from_kind(&self.interference, self.gamma)?;
        match self.family {
            GraphFamily::Er => {
                if !(0.0..=1.0).contains(&self.density) {
                    return Err(invalid(format!(
                        "density must lie in [0, 1], got {}",
                        self.density
                    )));
                }
            }
            GraphFamily::Pa => {
                if self.m == 0 || !self.pow.is_finite() || self.pow < 0.0 {
                    return Err(invalid("pa needs m >= 1 and a finite pow >= 0"));
                }
            }
            GraphFamily::File => match &self.graph_file {
                Some(path) if path.is_file() => {}
                Some(path) => {
                    return Err(invalid(format!(
                        "graph file {} does not exist",
                        path.display()
                    )))
                }
                None => return Err(invalid("family 'file' needs graph_file")),
            },
        }
        if self.family != GraphFamily::File && !self.vertices.is_multiple_of(self.r) {
            return Err(invalid(format!(
                "N = {} is not divisible by r = {}",
                self.vertices, self.r
            )));
        }
        Ok(())
    }

    pub fn interference_spec(&self) -> Result<InterferenceSpec> {
        interference_from_kind(&self.interference, self.gamma)
    }

    pub fn build_graph(&self, graph_seed: u64) -> Result<Graph> {
        let mut rng = rng::seeded(graph_seed);
        match self.family {
            GraphFamily::Er => erdos_renyi(self.vertices, self.density, &mut rng),
            GraphFamily::Pa => preferential_attachment(self.vertices, self.pow, self.m, &mut rng),
            GraphFamily::File => {
                let path = self
                    .graph_file
                    .as_ref()
                    .ok_or_else(|| invalid("missing graph_file"))?;
                read_edge_list(std::io::BufReader::new(std::fs::File::open(path)?))
            }
        }
    }

    fn density_or_pow(&self) -> Option<f64> {
        match self.family {
            GraphFamily::Er => Some(self.density),
            GraphFamily::Pa => Some(self.pow),
            GraphFamily::File => None,
        }
    }

    /// Seeds of repeat `i`; repeat 0 uses the configured seeds as they are.
    fn seeds(&self, i: usize) -> (u64, u64, u64) {
        if i == 0 {
            (self.graph_seed, self.model_seed, self.seed)
        } else {
            let i = i as u64;
            (
                rng::mix(self.graph_seed, i),
                rng::mix(self.model_seed, i),
                rng::mix(self.seed, i),
            )
        }
    }
}

/// MSE of `t̂` against `t̄` over the replications of one graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicationStats {
    pub mse: f64,
    /// Standard error of `mse`; NaN with a single replication.
    pub se: f64,
    /// Mean of `t̂ - t̄`.
    pub bias: f64,
}

/// Draws `replications` treatments from `design` on `g`. Without
/// `redraw_model` the model is fixed by `model_seed`; with it, replication
/// `i` draws its own model from `rng::stream(model_seed, i)`.
#[allow(clippy::too_many_arguments)]
pub fn replicate(
    design: &Design,
    g: &Graph,
    cfg: &ExperimentConfig,
    spec: &InterferenceSpec,
    model_seed: u64,
    treatment_seed: u64,
    replications: usize,
    redraw_model: bool,
    exec: Exec,
) -> Result<ReplicationStats> {
    let fixed = sample_gaussian_model(g, spec.clone(), model_seed);
    let fixed_tbar = average_direct_effect(&fixed);
    let errors: Vec<Result<f64>> = exec::map_range(exec, replications, |i| {
        let mut rng = rng::stream(treatment_seed, i as u64);
        let treatment = design.sample(g, cfg, &mut rng)?;
        if redraw_model {
            let mut mrng = rng::stream(model_seed, i as u64);
            let model = sample_gaussian_model_with(g.num_vertices(), spec.clone(), &mut mrng);
            Ok(decompose(&model, g, &treatment)?.estimate - average_direct_effect(&model))
        } else {
            Ok(decompose(&fixed, g, &treatment)?.estimate - fixed_tbar)
        }
    });
    let errors = errors.into_iter().collect::<Result<Vec<f64>>>()?;
    let n = errors.len() as f64;
    let sq: Vec<f64> = errors.iter().map(|e| e * e).collect();
    let mse = ksum(sq.iter().copied()) / n;
    let se = if errors.len() > 1 {
        (ksum(sq.iter().map(|s| (s - mse) * (s - mse))) / (n - 1.0) / n).sqrt()
    } else {
        f64::NAN
    };
    Ok(ReplicationStats {
        mse,
        se,
        bias: ksum(errors.iter().copied()) / n,
    })
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// Largest `d_K` norm of `spec` over the parts, each restricted to the
/// bidegrees its members can have. Typed specs are resolved through the
/// first member of each part.
pub fn part_norm(
    g: &Graph,
    spec: &InterferenceSpec,
    parts: &[Vec<usize>],
    metric: &DkMetric,
) -> Result<f64> {
    let mut best: f64 = 0.0;
    for part in parts {
        let domain = bidegree_domain(part.iter().map(|&v| g.degree(v)));
        let resolved = |u: (usize, usize)| spec.resolve(part[0]).value(u.0, u.1);
        best = best.max(lipschitz_norm(resolved, &domain, metric)?);
    }
    Ok(best)
}

/// Bound report matching `kind`, scaled to the spec's norms.
///
/// `crd` uses the Lipschitz-constant bias bound and the single-part typed
/// rmse bound; `pbd` the partition bounds with `K1 = K2 = ‖f‖` under the
/// unit metric; `pbd-random` the sparse bounds with the same scaling;
/// `typed` the typed bounds on `types` (degree classes when `None`) with the
/// per-part treated-fraction norm. Errors when the graph has isolated
/// vertices.
pub fn bound_report(
    kind: DesignKind,
    g: &Graph,
    cfg: &ExperimentConfig,
    spec: &InterferenceSpec,
    types: Option<&TypePartition>,
) -> Result<BoundReport> {
    g.require_no_isolated()?;
    let dmax = g.degree_stats().dmax;
    let fraction = DkMetric::new(0.0, 1.0, dmax)?;
    let unit_norm = || spec.lipschitz_norm_dk(g, &DkMetric::new(1.0, 1.0, dmax)?);
    match kind {
        DesignKind::Crd => {
            let k_v = lipschitz_constants(g, spec)?;
            let kbar = ksum(k_v.iter().copied()) / k_v.len() as f64;
            let k = part_norm(g, spec, &[(0..g.num_vertices()).collect()], &fraction)?;
            BoundReport::crd(g, kbar, k, cfg)
        }
        DesignKind::Pbd => {
            let nu = unit_norm()?;
            BoundReport::general(
                g,
                &partition_by_degree(g, cfg)?,
                &lipschitz_constants(g, spec)?,
                nu,
                nu,
                cfg,
            )
        }
        DesignKind::PbdRandom => {
            let nu = unit_norm()?;
            BoundReport::sparse(g, nu, nu, cfg)
        }
        DesignKind::Typed => {
            let owned;
            let types = match types {
                Some(t) => t,
                None => {
                    owned = degree_class_types(g, cfg.r())?;
                    &owned
                }
            };
            let k = part_norm(g, spec, types.parts(), &fraction)?;
            BoundReport::typed(g, types, k, cfg)
        }
    }
}

fn lipschitz_constants(g: &Graph, spec: &InterferenceSpec) -> Result<Vec<f64>> {
    (0..g.num_vertices())
        .map(|v| spec.lipschitz_constant(g, v))
        .collect()
}

/// `(bias, rmse)` of [`bound_report`], with non-finite values as `None`.
pub fn bounds_for(
    kind: DesignKind,
    g: &Graph,
    cfg: &ExperimentConfig,
    spec: &InterferenceSpec,
) -> Result<(Option<f64>, Option<f64>)> {
    let report = bound_report(kind, g, cfg, spec, None)?;
    Ok((finite(report.bias_bound), finite(report.rmse_bound)))
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub family: GraphFamily,
    pub vertices: usize,
    pub density_or_pow: Option<f64>,
    pub m: Option<usize>,
    pub gamma: f64,
    pub design: DesignKind,
    pub replications: usize,
    pub mse: f64,
    /// Natural log of `mse`.
    pub log_mse: f64,
    pub bias_mc: f64,
    pub se: f64,
    pub bound_bias: Option<f64>,
    pub bound_rmse: Option<f64>,
    pub seed: u64,
}

pub const CSV_HEADER: &str =
    "family,N,density_or_pow,m,gamma,design,R,mse,log_mse,bias_mc,se,bound_bias,bound_rmse,seed";

impl ResultRow {
    pub fn csv_row(&self) -> String {
        let num = |x: f64| {
            if x.is_nan() {
                String::new()
            } else {
                x.to_string()
            }
        };
        let opt = |x: Option<f64>| x.map_or(String::new(), |v| v.to_string());
        [
            self.family.to_string(),
            self.vertices.to_string(),
            opt(self.density_or_pow),
            self.m.map_or(String::new(), |m| m.to_string()),
            self.gamma.to_string(),
            self.design.to_string(),
            self.replications.to_string(),
            num(self.mse),
            num(self.log_mse),
            num(self.bias_mc),
            num(self.se),
            opt(self.bound_bias),
            opt(self.bound_rmse),
            self.seed.to_string(),
        ]
        .join(",")
    }
}

pub fn write_csv<W: Write>(rows: &[ResultRow], mut out: W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", row.csv_row())?;
    }
    Ok(())
}

/// Runs one configuration. With `repeats > 1` the MSE, bias and bounds are
/// averaged over the graphs and the standard errors combined.
pub fn run_experiment(config: &RunConfig, exec: Exec) -> Result<ResultRow> {
    config.validate()?;
    let spec = config.interference_spec()?;
    let mut stats = Vec::with_capacity(config.repeats);
    let mut bias_bounds = Vec::new();
    let mut rmse_bounds = Vec::new();
    let mut vertices = config.vertices;
    for i in 0..config.repeats {
        let (graph_seed, model_seed, seed) = config.seeds(i);
        let g = config.build_graph(graph_seed)?;
        vertices = g.num_vertices();
        let cfg = ExperimentConfig::for_graph(&g, config.p, config.r)?;
        let design = config.design.design(&g, &cfg)?;
        stats.push(replicate(
            &design,
            &g,
            &cfg,
            &spec,
            model_seed,
            seed,
            config.replications,
            config.redraw_model,
            exec,
        )?);
        match bounds_for(config.design, &g, &cfg, &spec) {
            Ok((b, r)) => {
                bias_bounds.push(b);
                rmse_bounds.push(r);
            }
            Err(e) => {
                log::warn!("no bounds for graph seed {graph_seed}: {e}");
                bias_bounds.push(None);
                rmse_bounds.push(None);
            }
        }
    }
    let k = stats.len() as f64;
    let mean_of = |xs: &[Option<f64>]| -> Option<f64> {
        let all: Option<Vec<f64>> = xs.iter().copied().collect();
        all.map(|v| ksum(v) / k)
    };
    let mse = ksum(stats.iter().map(|s| s.mse)) / k;
    Ok(ResultRow {
        family: config.family,
        vertices,
        density_or_pow: config.density_or_pow(),
        m: (config.family == GraphFamily::Pa).then_some(config.m),
        gamma: config.gamma,
        design: config.design,
        replications: config.replications,
        mse,
        log_mse: mse.ln(),
        bias_mc: ksum(stats.iter().map(|s| s.bias)) / k,
        se: ksum(stats.iter().map(|s| s.se * s.se)).sqrt() / k,
        bound_bias: mean_of(&bias_bounds),
        bound_rmse: mean_of(&rmse_bounds),
        seed: config.graph_seed,
    })
}

/// Grid of runs. For `er` the structural grid is `vertices × densities`, for
/// `pa` it is `vertices × pows × ms`, for `file` the single file. Every
/// structural cell crossed with `gammas` and `designs` gives one row.
///
/// Cell `c` of the structural grid uses seeds `mix(graph_seed, c)`,
/// `mix(model_seed, c)` and `mix(seed, c)`, shared across `gammas` and
/// `designs`, so all designs in a cell see the same graph and model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub family: GraphFamily,
    pub vertices: Vec<usize>,
    pub densities: Vec<f64>,
    pub pows: Vec<f64>,
    pub ms: Vec<usize>,
    pub graph_file: Option<PathBuf>,
    pub gammas: Vec<f64>,
    pub designs: Vec<DesignKind>,
    pub interference: String,
    pub replications: usize,
    pub p: usize,
    pub r: usize,
    pub graph_seed: u64,
    pub model_seed: u64,
    pub seed: u64,
    pub redraw_model: bool,
    pub repeats: usize,
    pub output: Option<PathBuf>,
    /// Upper limit on the number of rows.
    pub max_cells: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        let run = RunConfig::default();
        SweepConfig {
            family: GraphFamily::Er,
            vertices: vec![100, 200],
            densities: vec![0.05, 0.1, 0.5],
            pows: vec![1.0, 2.0],
            ms: vec![2, 4],
            graph_file: None,
            gammas: vec![0.1, 0.5, 1.0, 1.5, 2.0],
            designs: vec![DesignKind::Crd, DesignKind::Pbd],
            interference: run.interference,
            replications: run.replications,
            p: run.p,
            r: run.r,
            graph_seed: run.graph_seed,
            model_seed: run.model_seed,
            seed: run.seed,
            redraw_model: false,
            repeats: 1,
            output: None,
            max_cells: 10_000,
        }
    }
}

impl SweepConfig {
    /// Run configs in row order.
    pub fn expand(&self) -> Result<Vec<RunConfig>> {
        let mut structural: Vec<(usize, f64, f64, usize)> = Vec::new();
        match self.family {
            GraphFamily::Er => {
                for &n in &self.vertices {
                    for &d in &self.densities {
                        structural.push((n, d, 0.0, 0));
                    }
                }
            }
            GraphFamily::Pa => {
                for &n in &self.vertices {
                    for &pow in &self.pows {
                        for &m in &self.ms {
                            structural.push((n, 0.0, pow, m));
                        }
                    }
                }
            }
            GraphFamily::File => structural.push((0, 0.0, 0.0, 0)),
        }
        let total = structural.len() * self.gammas.len() * self.designs.len();
        if total == 0 {
            return Err(invalid("sweep grid is empty"));
        }
        if total > self.max_cells {
            return Err(invalid(format!(
                "sweep has {total} rows, above max_cells = {}",
                self.max_cells
            )));
        }
        let mut runs = Vec::with_capacity(total);
        for (c, &(vertices, density, pow, m)) in structural.iter().enumerate() {
            let c = c as u64;
            for &gamma in &self.gammas {
                for &design in &self.designs {
                    let run = RunConfig {
                        family: self.family,
                        vertices,
                        density,
                        pow,
                        m,
                        graph_file: self.graph_file.clone(),
                        graph_seed: rng::mix(self.graph_seed, c),
                        design,
                        interference: self.interference.clone(),
                        gamma,
                        model_seed: rng::mix(self.model_seed, c),
                        seed: rng::mix(self.seed, c),
                        replications: self.replications,
                        output: None,
                        p: self.p,
                        r: self.r,
                        redraw_model: self.redraw_model,
                        repeats: self.repeats,
                    };
                    run.validate()?;
                    runs.push(run);
                }
            }
        }
        Ok(runs)
    }
}

pub fn sweep(config: &SweepConfig, exec: Exec) -> Result<Vec<ResultRow>> {
    let runs = config.expand()?;
    exec::map_slice(exec, &runs, |run| run_experiment(run, exec))
        .into_iter()
        .collect()
}
