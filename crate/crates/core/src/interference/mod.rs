//! Interference functions `f_v(T ∩ N(v))`.
//!
//! Every family here is symmetric: `f_v(S) = f(|S|, |N(v) \ S|)`, optionally
//! with a separate `f` per vertex type. Values are therefore functions of the
//! *bidegree* `(a, b)` = (treated neighbors, untreated neighbors).

mod metric;
mod table;

use std::fmt;
use std::str::FromStr;

use crate::design::TypePartition;
use crate::graph::Graph;
use crate::{Error, Result};

pub use metric::{bidegree_domain, lipschitz_norm, metric_dk, DkMetric, LipschitzBudget};
pub use table::{read_table, write_table, SymmetricTable};

/// `(treated neighbors, untreated neighbors)`
pub type Bidegree = (usize, usize);

/// Degree cap for the brute-force subset supremum in [`weight_by_subsets`].
pub const BRUTE_FORCE_DEGREE_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub enum InterferenceSpec {
    /// `gamma * a`
    Linear {
        gamma: f64,
    },
    /// `gamma * a / (a + b)`
    NormalizedLinear {
        gamma: f64,
    },
    /// `gamma * min(a, k)`
    ThresholdCount {
        gamma: f64,
        k: usize,
    },
    /// `gamma * min(a / (a + b), frac)`
    ThresholdFraction {
        gamma: f64,
        frac: f64,
    },
    Table(SymmetricTable),
    /// One untyped spec per part of the type partition.
    Typed(TypedInterference),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypedInterference {
    types: TypePartition,
    specs: Vec<InterferenceSpec>,
}

impl TypedInterference {
    pub fn new(types: TypePartition, specs: Vec<InterferenceSpec>) -> Result<Self> {
        if specs.len() != types.num_parts() {
            return Err(Error::InvalidParameter(format!(
                "{} typed specs for {} parts",
                specs.len(),
                types.num_parts()
            )));
        }
        if specs.iter().any(InterferenceSpec::is_typed) {
            return Err(Error::InvalidParameter(
                "typed interference cannot nest typed specs".into(),
            ));
        }
        Ok(TypedInterference { types, specs })
    }

    pub fn types(&self) -> &TypePartition {
        &self.types
    }
    pub fn specs(&self) -> &[InterferenceSpec] {
        &self.specs
    }
    pub fn spec_for(&self, v: usize) -> &InterferenceSpec {
        &self.specs[self.types.part_index(v)]
    }
}

impl InterferenceSpec {
    /// No interference.
    pub fn none() -> Self {
        InterferenceSpec::Linear { gamma: 0.0 }
    }

    /// `ThresholdFraction` with the default cutoff `frac = p / r`.
    pub fn threshold_fraction_default(gamma: f64, p: usize, r: usize) -> Self {
        InterferenceSpec::ThresholdFraction {
            gamma,
            frac: p as f64 / r as f64,
        }
    }

    pub fn is_typed(&self) -> bool {
        matches!(self, InterferenceSpec::Typed(_))
    }

    /// The untyped spec that applies to vertex `v`.
    pub fn resolve(&self, v: usize) -> &InterferenceSpec {
        match self {
            InterferenceSpec::Typed(t) => t.spec_for(v),
            other => other,
        }
    }

    /// `f(a, b)` for an untyped spec.
    pub fn value(&self, a: usize, b: usize) -> Result<f64> {
        let frac = || {
            if a + b == 0 {
                0.0
            } else {
                a as f64 / (a + b) as f64
            }
        };
        Ok(match self {
            InterferenceSpec::Linear { gamma } => gamma * a as f64,
            InterferenceSpec::NormalizedLinear { gamma } => gamma * frac(),
            InterferenceSpec::ThresholdCount { gamma, k } => gamma * a.min(*k) as f64,
            InterferenceSpec::ThresholdFraction { gamma, frac: cut } => gamma * frac().min(*cut),
            InterferenceSpec::Table(t) => t.get(a, b)?,
            InterferenceSpec::Typed(_) => {
                return Err(Error::InvalidParameter(
                    "typed interference needs a vertex to pick the part".into(),
                ))
            }
        })
    }

    /// `f_v(S)` for any `S ⊆ N(v)` with `|S| = a`.
    pub fn eval(&self, g: &Graph, v: usize, a: usize) -> Result<f64> {
        let degree = g.degree(v);
        if a > degree {
            return Err(Error::NeighborCount { a, degree });
        }
        self.resolve(v).value(a, degree - a)
    }

    /// Largest single-step change `max_{0<=a<d} |f(a+1, d-a-1) - f(a, d-a)|`.
    fn max_step(&self, degree: usize) -> Result<f64> {
        let mut best: f64 = 0.0;
        for a in 0..degree {
            let hi = self.value(a + 1, degree - a - 1)?;
            let lo = self.value(a, degree - a)?;
            best = best.max((hi - lo).abs());
        }
        Ok(best)
    }

    /// `K_v` such that `|f_v(A) - f_v(B)| <= K_v |A Δ B| / d(v)`.
    pub fn lipschitz_constant(&self, g: &Graph, v: usize) -> Result<f64> {
        let d = g.degree(v) as f64;
        Ok(match self.resolve(v) {
            InterferenceSpec::Linear { gamma } => gamma.abs() * d,
            InterferenceSpec::NormalizedLinear { gamma } => gamma.abs(),
            InterferenceSpec::ThresholdCount { gamma, .. } => gamma.abs() * d,
            InterferenceSpec::ThresholdFraction { gamma, .. } => gamma.abs(),
            table @ InterferenceSpec::Table(_) => d * table.max_step(g.degree(v))?,
            InterferenceSpec::Typed(_) => unreachable!("resolve never returns a typed spec"),
        })
    }

    /// Weight of `w` on `v`: `sup_{A ⊆ N(v)\{w}} |f_v(A) - f_v(A ∪ {w})|`, zero
    /// when `w` is not a neighbor. For symmetric `f` the supremum only depends
    /// on `|A|`.
    pub fn weight(&self, g: &Graph, v: usize, w: usize) -> Result<f64> {
        if v == w || !g.has_edge(v, w) {
            return Ok(0.0);
        }
        self.resolve(v).max_step(g.degree(v))
    }

    /// Multiplies every value by `factor`.
    pub fn scaled(&self, factor: f64) -> InterferenceSpec {
        match self {
            InterferenceSpec::Linear { gamma } => InterferenceSpec::Linear {
                gamma: gamma * factor,
            },
            InterferenceSpec::NormalizedLinear { gamma } => InterferenceSpec::NormalizedLinear {
                gamma: gamma * factor,
            },
            InterferenceSpec::ThresholdCount { gamma, k } => InterferenceSpec::ThresholdCount {
                gamma: gamma * factor,
                k: *k,
            },
            InterferenceSpec::ThresholdFraction { gamma, frac } => {
                InterferenceSpec::ThresholdFraction {
                    gamma: gamma * factor,
                    frac: *frac,
                }
            }
            InterferenceSpec::Table(t) => InterferenceSpec::Table(t.scaled(factor)),
            InterferenceSpec::Typed(t) => InterferenceSpec::Typed(TypedInterference {
                types: t.types.clone(),
                specs: t.specs.iter().map(|s| s.scaled(factor)).collect(),
            }),
        }
    }

    /// `||f||_{d_K}` over the bidegree domain of `g` (per part for typed
    /// specs, taking the largest part norm).
    pub fn lipschitz_norm_dk(&self, g: &Graph, metric: &DkMetric) -> Result<f64> {
        match self {
            InterferenceSpec::Typed(t) => {
                let mut best: f64 = 0.0;
                for (part, spec) in t.types.parts().iter().zip(&t.specs) {
                    let domain = bidegree_domain(part.iter().map(|&v| g.degree(v)));
                    best = best.max(lipschitz_norm(|(a, b)| spec.value(a, b), &domain, metric)?);
                }
                Ok(best)
            }
            spec => {
                let domain = bidegree_domain(g.degrees());
                lipschitz_norm(|(a, b)| spec.value(a, b), &domain, metric)
            }
        }
    }
}

/// Brute-force weight for an arbitrary set function on the neighborhood of
/// one vertex.
///
/// The neighborhood is indexed `0..degree`; `f` receives membership as a
/// bitmask. Returns `sup_{A ⊆ N \ {w}} |f(A) - f(A ∪ {w})|`.
pub fn weight_by_subsets<F>(degree: usize, w: usize, f: F) -> Result<f64>
where
    F: Fn(u32) -> f64,
{
    if degree > BRUTE_FORCE_DEGREE_CAP {
        return Err(Error::DegreeCap {
            degree,
            cap: BRUTE_FORCE_DEGREE_CAP,
        });
    }
    if w >= degree {
        return Err(Error::NeighborCount { a: w, degree });
    }
    let bit = 1u32 << w;
    let mut best: f64 = 0.0;
    for mask in 0u32..(1u32 << degree) {
        if mask & bit != 0 {
            continue;
        }
        best = best.max((f(mask) - f(mask | bit)).abs());
    }
    Ok(best)
}

impl fmt::Display for InterferenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InterferenceSpec::Linear { gamma } => write!(f, "linear:{gamma}"),
            InterferenceSpec::NormalizedLinear { gamma } => write!(f, "normalized-linear:{gamma}"),
            InterferenceSpec::ThresholdCount { gamma, k } => {
                write!(f, "threshold-count:{gamma}:{k}")
            }
            InterferenceSpec::ThresholdFraction { gamma, frac } => {
                write!(f, "threshold-fraction:{gamma}:{frac}")
            }
            InterferenceSpec::Table(t) => write!(f, "table:{}", t.len()),
            InterferenceSpec::Typed(t) => {
                write!(f, "typed[")?;
                for (i, s) in t.specs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ";")?;
                    }
                    write!(f, "{s}")?;
                }
                write!(f, "]")
            }
        }
    }
}

impl FromStr for InterferenceSpec {
    type Err = Error;

    /// Parses the closed-form descriptors produced by `Display`:
    /// `none`, `linear:G`, `normalized-linear:G`, `threshold-count:G:K`,
    /// `threshold-fraction:G:F`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("unrecognized interference descriptor '{s}'"));
        let mut it = s.trim().split(':');
        let kind = it.next().ok_or_else(bad)?;
        let num = |x: Option<&str>| -> Result<f64> {
            x.ok_or_else(bad)?.parse::<f64>().map_err(|_| bad())
        };
        let spec = match kind {
            "none" => InterferenceSpec::none(),
            "linear" => InterferenceSpec::Linear {
                gamma: num(it.next())?,
            },
            "normalized-linear" => InterferenceSpec::NormalizedLinear {
                gamma: num(it.next())?,
            },
            "threshold-count" => {
                let gamma = num(it.next())?;
                let k = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
                InterferenceSpec::ThresholdCount { gamma, k }
            }
            "threshold-fraction" => InterferenceSpec::ThresholdFraction {
                gamma: num(it.next())?,
                frac: num(it.next())?,
            },
            _ => return Err(bad()),
        };
        if it.next().is_some() {
            return Err(bad());
        }
        Ok(spec)
    }
}
