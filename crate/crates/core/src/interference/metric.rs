use std::collections::BTreeSet;

use super::{Bidegree, InterferenceSpec};
use crate::graph::Graph;
use crate::{Error, Result};

/// Per-vertex Lipschitz constants plus the `(K1, K2)` weights of `d_K`.
#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzBudget {
    pub per_vertex: Vec<f64>,
    pub k1: f64,
    pub k2: f64,
}

impl LipschitzBudget {
    pub fn new(per_vertex: Vec<f64>, k1: f64, k2: f64) -> Result<Self> {
        if !(k1 >= 0.0) || !(k2 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "metric weights need K1 >= 0 and K2 > 0, got K1 = {k1}, K2 = {k2}"
            )));
        }
        if per_vertex.iter().any(|k| !(*k >= 0.0)) {
            return Err(Error::InvalidParameter(
                "per-vertex Lipschitz constants must be nonnegative".into(),
            ));
        }
        Ok(LipschitzBudget { per_vertex, k1, k2 })
    }

    pub fn from_spec(spec: &InterferenceSpec, g: &Graph, k1: f64, k2: f64) -> Result<Self> {
        let per_vertex = (0..g.num_vertices())
            .map(|v| spec.lipschitz_constant(g, v))
            .collect::<Result<Vec<_>>>()?;
        Self::new(per_vertex, k1, k2)
    }

    /// Average constant `K̄`.
    pub fn kbar(&self) -> f64 {
        if self.per_vertex.is_empty() {
            return 0.0;
        }
        self.per_vertex.iter().sum::<f64>() / self.per_vertex.len() as f64
    }

    pub fn kmax(&self) -> f64 {
        self.per_vertex.iter().copied().fold(0.0, f64::max)
    }

    pub fn metric(&self, dmax: usize) -> Result<DkMetric> {
        DkMetric::new(self.k1, self.k2, dmax)
    }
}

/// `d_K((a,b),(c,d)) = K1 |a+b-c-d| / dmax + K2 |a/(a+b) - c/(c+d)|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DkMetric {
    k1: f64,
    k2: f64,
    dmax: usize,
}

impl DkMetric {
    pub fn new(k1: f64, k2: f64, dmax: usize) -> Result<Self> {
        if !(k1 >= 0.0) || !(k2 > 0.0) || !k1.is_finite() || !k2.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "metric weights need K1 >= 0 and K2 > 0, got K1 = {k1}, K2 = {k2}"
            )));
        }
        if dmax == 0 {
            return Err(Error::InvalidParameter("dmax must be positive".into()));
        }
        Ok(DkMetric { k1, k2, dmax })
    }

    pub fn k1(&self) -> f64 {
        self.k1
    }
    pub fn k2(&self) -> f64 {
        self.k2
    }
    pub fn dmax(&self) -> usize {
        self.dmax
    }

    pub fn distance(&self, u: Bidegree, w: Bidegree) -> Result<f64> {
        let (du, dw) = (u.0 + u.1, w.0 + w.1);
        if du == 0 || dw == 0 {
            return Err(Error::ZeroDegreeBidegree);
        }
        let frac_u = u.0 as f64 / du as f64;
        let frac_w = w.0 as f64 / dw as f64;
        Ok(self.k1 * du.abs_diff(dw) as f64 / self.dmax as f64 + self.k2 * (frac_u - frac_w).abs())
    }

    /// Largest pairwise distance within `points`.
    pub fn diameter(&self, points: &[Bidegree]) -> Result<f64> {
        let mut best: f64 = 0.0;
        for (i, &u) in points.iter().enumerate() {
            for &w in &points[i + 1..] {
                best = best.max(self.distance(u, w)?);
            }
        }
        Ok(best)
    }
}

/// `d_K(u1, u2)` with the weights of `budget`.
pub fn metric_dk(budget: &LipschitzBudget, dmax: usize, u1: Bidegree, u2: Bidegree) -> Result<f64> {
    budget.metric(dmax)?.distance(u1, u2)
}

/// `B = {(a, b) : a + b ∈ degrees}`, without the degree-0 point.
pub fn bidegree_domain<I: IntoIterator<Item = usize>>(degrees: I) -> Vec<Bidegree> {
    let distinct: BTreeSet<usize> = degrees.into_iter().filter(|&d| d > 0).collect();
    distinct
        .into_iter()
        .flat_map(|d| (0..=d).map(move |a| (a, d - a)))
        .collect()
}

/// `sup_{u != w} |f(u) - f(w)| / d(u, w)` over `domain`. Infinite when two
/// distinct points at distance zero carry different values.
pub fn lipschitz_norm<F>(f: F, domain: &[Bidegree], metric: &DkMetric) -> Result<f64>
where
    F: Fn(Bidegree) -> Result<f64>,
{
    let values = domain.iter().map(|&u| f(u)).collect::<Result<Vec<f64>>>()?;
    let mut best: f64 = 0.0;
    for i in 0..domain.len() {
        for j in i + 1..domain.len() {
            let diff = (values[i] - values[j]).abs();
            if diff == 0.0 {
                continue;
            }
            let dist = metric.distance(domain[i], domain[j])?;
            best = best.max(if dist == 0.0 {
                f64::INFINITY
            } else {
                diff / dist
            });
        }
    }
    Ok(best)
}
