//! Potential outcomes `y_v = x_v + 1_T(v) t_v + f_v(T ∩ N(v))` and the
//! Neyman estimator of the average direct effect.

use std::io::{BufRead, Write};

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::design::{ExperimentConfig, Treatment, TypePartition};
use crate::graph::Graph;
use crate::interference::InterferenceSpec;
use crate::rng;
use crate::sum::ksum;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeModel {
    x: Vec<f64>,
    t: Vec<f64>,
    spec: InterferenceSpec,
}

impl OutcomeModel {
    pub fn new(x: Vec<f64>, t: Vec<f64>, spec: InterferenceSpec) -> Result<Self> {
        if x.len() != t.len() {
            return Err(Error::InvalidParameter(format!(
                "baseline has {} entries, direct effect has {}",
                x.len(),
                t.len()
            )));
        }
        Ok(OutcomeModel { x, t, spec })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }
    pub fn t(&self) -> &[f64] {
        &self.t
    }
    pub fn spec(&self) -> &InterferenceSpec {
        &self.spec
    }
    pub fn num_vertices(&self) -> usize {
        self.x.len()
    }

    pub fn with_spec(mut self, spec: InterferenceSpec) -> Self {
        self.spec = spec;
        self
    }

    pub fn check_graph(&self, g: &Graph) -> Result<()> {
        if self.x.len() != g.num_vertices() {
            return Err(Error::InvalidParameter(format!(
                "model covers {} vertices, graph has {}",
                self.x.len(),
                g.num_vertices()
            )));
        }
        Ok(())
    }

    /// `f_v(T ∩ N(v))` for every vertex.
    pub fn interference_values(&self, g: &Graph, treatment: &Treatment) -> Result<Vec<f64>> {
        self.check_graph(g)?;
        check_treatment(treatment, self.num_vertices())?;
        treatment
            .treated_neighbor_counts(g)
            .into_iter()
            .enumerate()
            .map(|(v, a)| self.spec.eval(g, v, a))
            .collect()
    }
}

fn check_treatment(treatment: &Treatment, num_vertices: usize) -> Result<()> {
    if treatment.num_vertices() != num_vertices {
        return Err(Error::InvalidParameter(format!(
            "treatment covers {} vertices, expected {num_vertices}",
            treatment.num_vertices()
        )));
    }
    Ok(())
}

/// Observed outcomes under `treatment`.
pub fn simulate_outcomes(
    model: &OutcomeModel,
    g: &Graph,
    treatment: &Treatment,
) -> Result<Vec<f64>> {
    let f = model.interference_values(g, treatment)?;
    Ok((0..g.num_vertices())
        .map(|v| {
            let direct = if treatment.contains(v) {
                model.t[v]
            } else {
                0.0
            };
            model.x[v] + direct + f[v]
        })
        .collect())
}

/// `(1/pqn) Σ_v pq(T, v) w_v`.
fn signed_mean(values: &[f64], treatment: &Treatment) -> f64 {
    let pqn = treatment.config().pqn();
    ksum(
        values
            .iter()
            .enumerate()
            .map(|(v, &w)| treatment.pq_sign(v) * w),
    ) / pqn
}

/// `(1/pqn)(q Σ_{v∈T} y_v - p Σ_{v∉T} y_v)`.
pub fn neyman_estimate(y: &[f64], treatment: &Treatment) -> Result<f64> {
    check_treatment(treatment, y.len())?;
    Ok(signed_mean(y, treatment))
}

/// `t̄`, the mean direct effect.
pub fn average_direct_effect(model: &OutcomeModel) -> f64 {
    if model.t.is_empty() {
        return 0.0;
    }
    ksum(model.t.iter().copied()) / model.t.len() as f64
}

/// The interference error `ξ = (1/pqn) Σ_v pq(T, v) f_v(T ∩ N(v))`.
pub fn xi(model: &OutcomeModel, g: &Graph, treatment: &Treatment) -> Result<f64> {
    let f = model.interference_values(g, treatment)?;
    Ok(signed_mean(&f, treatment))
}

/// The estimate that would be obtained without interference.
pub fn t_ideal(model: &OutcomeModel, treatment: &Treatment) -> Result<f64> {
    check_treatment(treatment, model.num_vertices())?;
    let y0: Vec<f64> = (0..model.num_vertices())
        .map(|v| {
            if treatment.contains(v) {
                model.x[v] + model.t[v]
            } else {
                model.x[v]
            }
        })
        .collect();
    Ok(signed_mean(&y0, treatment))
}

/// `t̂ = t_ideal + ξ` for one treatment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decomposition {
    pub estimate: f64,
    pub ideal: f64,
    pub xi: f64,
}

/// Estimate, ideal estimate and interference error from one pass over the
/// neighborhoods.
pub fn decompose(model: &OutcomeModel, g: &Graph, treatment: &Treatment) -> Result<Decomposition> {
    let f = model.interference_values(g, treatment)?;
    let nv = model.num_vertices();
    let y0: Vec<f64> = (0..nv)
        .map(|v| {
            model.x[v]
                + if treatment.contains(v) {
                    model.t[v]
                } else {
                    0.0
                }
        })
        .collect();
    let y: Vec<f64> = (0..nv).map(|v| y0[v] + f[v]).collect();
    Ok(Decomposition {
        estimate: signed_mean(&y, treatment),
        ideal: signed_mean(&y0, treatment),
        xi: signed_mean(&f, treatment),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomophilyStats {
    pub x_means: Vec<f64>,
    pub t_means: Vec<f64>,
    /// `ε_v = x_v - x_π + (q/r)(t_v - t_π)` for the part `π` containing `v`.
    pub epsilon: Vec<f64>,
    /// Mean of `ε_v²`.
    pub sigma2: f64,
}

pub fn homophily_stats(
    model: &OutcomeModel,
    types: &TypePartition,
    cfg: &ExperimentConfig,
) -> Result<HomophilyStats> {
    let nv = model.num_vertices();
    if types.num_vertices() != nv {
        return Err(Error::TypePartition(format!(
            "type partition covers {} vertices, model has {nv}",
            types.num_vertices()
        )));
    }
    let mean_over =
        |vals: &[f64], part: &[usize]| ksum(part.iter().map(|&v| vals[v])) / part.len() as f64;
    let x_means: Vec<f64> = types
        .parts()
        .iter()
        .map(|p| mean_over(&model.x, p))
        .collect();
    let t_means: Vec<f64> = types
        .parts()
        .iter()
        .map(|p| mean_over(&model.t, p))
        .collect();
    let ratio = cfg.q() as f64 / cfg.r() as f64;
    let epsilon: Vec<f64> = (0..nv)
        .map(|v| {
            let i = types.part_index(v);
            model.x[v] - x_means[i] + ratio * (model.t[v] - t_means[i])
        })
        .collect();
    let sigma2 = if nv == 0 {
        0.0
    } else {
        ksum(epsilon.iter().map(|e| e * e)) / nv as f64
    };
    Ok(HomophilyStats {
        x_means,
        t_means,
        epsilon,
        sigma2,
    })
}

/// Baseline standard deviation of the Gaussian model.
pub const BASELINE_SD: f64 = 1.0;
/// Mean direct effect of the Gaussian model.
pub const EFFECT_MEAN: f64 = 2.0;
/// Direct-effect standard deviation (variance 0.25).
pub const EFFECT_SD: f64 = 0.5;

/// `x_v ~ N(0, 1)` and `t_v ~ N(2, 0.25)` drawn from `rng`: all baselines
/// first, then all effects.
pub fn sample_gaussian_model_with<R: Rng + ?Sized>(
    num_vertices: usize,
    spec: InterferenceSpec,
    rng: &mut R,
) -> OutcomeModel {
    let base = Normal::new(0.0, BASELINE_SD).expect("valid normal");
    let effect = Normal::new(EFFECT_MEAN, EFFECT_SD).expect("valid normal");
    let x = (0..num_vertices).map(|_| base.sample(rng)).collect();
    let t = (0..num_vertices).map(|_| effect.sample(rng)).collect();
    OutcomeModel { x, t, spec }
}

pub fn sample_gaussian_model(g: &Graph, spec: InterferenceSpec, seed: u64) -> OutcomeModel {
    sample_gaussian_model_with(g.num_vertices(), spec, &mut rng::seeded(seed))
}

/// Writes `# interference: <descriptor>` and then one `v x_v t_v` row per
/// vertex.
pub fn write_model<W: Write>(model: &OutcomeModel, mut out: W) -> Result<()> {
    writeln!(out, "# interference: {}", model.spec)?;
    for v in 0..model.num_vertices() {
        writeln!(out, "{v} {} {}", model.x[v], model.t[v])?;
    }
    Ok(())
}

/// Reads the format of [`write_model`]. A closed-form interference header is
/// parsed; tables and typed specs must be attached with
/// [`OutcomeModel::with_spec`]. Without a header there is no interference.
pub fn read_model<R: BufRead>(input: R) -> Result<OutcomeModel> {
    let mut spec = InterferenceSpec::none();
    let mut rows: Vec<(usize, f64, f64)> = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if let Some(rest) = t.strip_prefix('#') {
            if let Some(desc) = rest.trim().strip_prefix("interference:") {
                let desc = desc.trim();
                if !(desc.starts_with("table") || desc.starts_with("typed")) {
                    spec = desc.parse()?;
                }
            }
            continue;
        }
        if t.is_empty() {
            continue;
        }
        let toks: Vec<&str> = t.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(Error::parse(idx + 1, "expected 'v x t'"));
        }
        let perr = |e: &dyn std::fmt::Display| Error::parse(idx + 1, e.to_string());
        rows.push((
            toks[0].parse().map_err(|e| perr(&e))?,
            toks[1].parse().map_err(|e| perr(&e))?,
            toks[2].parse().map_err(|e| perr(&e))?,
        ));
    }
    let n = rows.len();
    let mut x = vec![f64::NAN; n];
    let mut t = vec![f64::NAN; n];
    let mut seen = vec![false; n];
    for (v, xv, tv) in rows {
        if v >= n || seen[v] {
            return Err(Error::InvalidParameter(format!(
                "model rows must list each vertex 0..{n} exactly once (bad vertex {v})"
            )));
        }
        seen[v] = true;
        x[v] = xv;
        t[v] = tv;
    }
    OutcomeModel::new(x, t, spec)
}
