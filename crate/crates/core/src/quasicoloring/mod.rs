//! Bidegree measures `D_T`, perfect quasi-colorings, the Wasserstein norm
//! under `d_K`, and the partition constant `C_P`.
//!
//! For symmetric interference `ξ = Σ_u f(u) D_T(u)`, so `D_T = 0` forces
//! `ξ = 0` and the size of `D_T` controls `|ξ|`.

mod perfect;
mod transport;

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use crate::design::{ExperimentConfig, Partition, Treatment, TypePartition};
use crate::graph::Graph;
use crate::interference::{Bidegree, DkMetric, InterferenceSpec};
use crate::{Error, Result};

pub use perfect::{find_perfect_quasicoloring, is_perfect_quasicoloring, DEFAULT_SEARCH_CAP};
pub use transport::{wasserstein_norm, WassersteinResult};

/// Signed measure on bidegrees. Zero atoms are never stored.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BidegreeMeasure {
    atoms: BTreeMap<Bidegree, f64>,
}

impl BidegreeMeasure {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_atoms<I: IntoIterator<Item = (Bidegree, f64)>>(atoms: I) -> Self {
        let mut m = Self::default();
        for (u, mass) in atoms {
            m.add_mass(u, mass);
        }
        m
    }

    fn add_mass(&mut self, u: Bidegree, mass: f64) {
        let entry = self.atoms.entry(u).or_insert(0.0);
        *entry += mass;
        if *entry == 0.0 {
            self.atoms.remove(&u);
        }
    }

    pub fn atoms(&self) -> impl Iterator<Item = (Bidegree, f64)> + '_ {
        self.atoms.iter().map(|(&u, &m)| (u, m))
    }

    pub fn get(&self, u: Bidegree) -> f64 {
        self.atoms.get(&u).copied().unwrap_or(0.0)
    }

    pub fn support(&self) -> Vec<Bidegree> {
        self.atoms.keys().copied().collect()
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.values().sum()
    }

    /// `‖D‖_TV = Σ_u |D(u)|`.
    pub fn total_variation(&self) -> f64 {
        self.atoms.values().map(|m| m.abs()).sum()
    }

    /// Push-forward under `(a, b) ↦ (b, a)`.
    pub fn swapped(&self) -> Self {
        BidegreeMeasure {
            atoms: self.atoms.iter().map(|(&(a, b), &m)| ((b, a), m)).collect(),
        }
    }

    pub fn negated(&self) -> Self {
        BidegreeMeasure {
            atoms: self.atoms.iter().map(|(&u, &m)| (u, -m)).collect(),
        }
    }

    pub fn sum(&self, other: &BidegreeMeasure) -> Self {
        let mut out = self.clone();
        for (u, m) in other.atoms() {
            out.add_mass(u, m);
        }
        out
    }

    /// `∫ f dD`.
    pub fn integrate<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(Bidegree) -> Result<f64>,
    {
        let mut acc = crate::sum::KahanSum::default();
        for (u, m) in self.atoms() {
            acc.add(f(u)? * m);
        }
        Ok(acc.value())
    }

    /// Largest absolute difference from `other` over the union of supports.
    pub fn max_abs_diff(&self, other: &BidegreeMeasure) -> f64 {
        self.atoms
            .keys()
            .chain(other.atoms.keys())
            .map(|&u| (self.get(u) - other.get(u)).abs())
            .fold(0.0, f64::max)
    }
}

fn check_treatment(g: &Graph, treatment: &Treatment) -> Result<()> {
    if treatment.num_vertices() != g.num_vertices() {
        return Err(Error::InvalidParameter(format!(
            "treatment covers {} vertices, graph has {}",
            treatment.num_vertices(),
            g.num_vertices()
        )));
    }
    Ok(())
}

/// `d_T(v) = (|T ∩ N(v)|, |N(v) \ T|)` for every vertex.
pub fn bidegrees(g: &Graph, treatment: &Treatment) -> Vec<Bidegree> {
    treatment
        .treated_neighbor_counts(g)
        .into_iter()
        .enumerate()
        .map(|(v, a)| (a, g.degree(v) - a))
        .collect()
}

/// Measure over the vertices in `members`, built from integer counts so that
/// cancelling atoms vanish exactly.
fn measure_over<I: IntoIterator<Item = usize>>(
    members: I,
    bideg: &[Bidegree],
    treatment: &Treatment,
) -> BidegreeMeasure {
    let cfg = treatment.config();
    let mut counts: BTreeMap<Bidegree, (i64, i64)> = BTreeMap::new();
    for v in members {
        let c = counts.entry(bideg[v]).or_insert((0, 0));
        if treatment.contains(v) {
            c.0 += 1;
        } else {
            c.1 += 1;
        }
    }
    let (p, q) = (cfg.p() as i64, cfg.q() as i64);
    let pqn = cfg.pqn();
    BidegreeMeasure {
        atoms: counts
            .into_iter()
            .filter_map(|(u, (treated, control))| {
                let numer = q * treated - p * control;
                (numer != 0).then(|| (u, numer as f64 / pqn))
            })
            .collect(),
    }
}

/// `D_T = (1/pqn) Σ_v pq(T, v) δ_{d_T(v)}`.
pub fn bidegree_measure(g: &Graph, treatment: &Treatment) -> Result<BidegreeMeasure> {
    g.require_no_isolated()?;
    check_treatment(g, treatment)?;
    let bideg = bidegrees(g, treatment);
    Ok(measure_over(0..g.num_vertices(), &bideg, treatment))
}

/// One measure `D^π` per part, each normalized by the global `pqn`.
pub fn typed_bidegree_measures(
    g: &Graph,
    treatment: &Treatment,
    types: &TypePartition,
) -> Result<Vec<BidegreeMeasure>> {
    g.require_no_isolated()?;
    check_treatment(g, treatment)?;
    let cfg = treatment.config();
    types.check_config(cfg)?;
    for (i, part) in types.parts().iter().enumerate() {
        let treated = part.iter().filter(|&&v| treatment.contains(v)).count();
        let expected = cfg.p() * part.len() / cfg.r();
        if treated != expected {
            return Err(Error::TypePartition(format!(
                "part {i} has {treated} treated vertices, expected {expected}"
            )));
        }
    }
    let bideg = bidegrees(g, treatment);
    Ok(types
        .parts()
        .iter()
        .map(|part| measure_over(part.iter().copied(), &bideg, treatment))
        .collect())
}

/// `ξ = Σ_u f(u) D(u)` for an untyped symmetric spec.
pub fn xi_via_measure(spec: &InterferenceSpec, measure: &BidegreeMeasure) -> Result<f64> {
    measure.integrate(|(a, b)| spec.value(a, b))
}

/// `ξ = Σ_π ∫ f_π dD^π`. An untyped spec is applied to every part.
pub fn xi_via_typed_measures(spec: &InterferenceSpec, measures: &[BidegreeMeasure]) -> Result<f64> {
    let mut total = crate::sum::KahanSum::default();
    for (i, measure) in measures.iter().enumerate() {
        let part_spec = match spec {
            InterferenceSpec::Typed(t) => t.specs().get(i).ok_or_else(|| {
                Error::TypePartition(format!("no interference spec for part {i}"))
            })?,
            other => other,
        };
        total.add(xi_via_measure(part_spec, measure)?);
    }
    Ok(total.value())
}

/// `C_P = (2 / (dmax (r - 1))) Σ_blocks Σ_{pairs} |d(v) - d(v')|`.
pub fn c_p(partition: &Partition, g: &Graph, cfg: &ExperimentConfig) -> Result<f64> {
    partition.check_config(cfg)?;
    if partition.num_vertices() != g.num_vertices() {
        return Err(Error::PartitionMismatch(format!(
            "partition covers {} vertices, graph has {}",
            partition.num_vertices(),
            g.num_vertices()
        )));
    }
    let dmax = g.degree_stats().dmax;
    if dmax == 0 {
        return Err(Error::InvalidParameter(
            "C_P needs at least one edge".into(),
        ));
    }
    let mut total: usize = 0;
    for block in partition.blocks() {
        for (i, &v) in block.iter().enumerate() {
            for &w in &block[i + 1..] {
                total += g.degree(v).abs_diff(g.degree(w));
            }
        }
    }
    Ok(2.0 * total as f64 / (dmax as f64 * (cfg.r() - 1) as f64))
}

/// Diameter of the support of `measure` under `metric`.
pub fn support_diameter(measure: &BidegreeMeasure, metric: &DkMetric) -> Result<f64> {
    metric.diameter(&measure.support())
}

/// Lines `a b mass`.
pub fn write_measure<W: Write>(measure: &BidegreeMeasure, mut out: W) -> Result<()> {
    for ((a, b), m) in measure.atoms() {
        writeln!(out, "{a} {b} {m}")?;
    }
    Ok(())
}

pub fn read_measure<R: BufRead>(input: R) -> Result<BidegreeMeasure> {
    let mut atoms = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = t.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(Error::parse(idx + 1, "expected 'a b mass'"));
        }
        let perr = |e: &dyn std::fmt::Display| Error::parse(idx + 1, e.to_string());
        let a: usize = toks[0].parse().map_err(|e| perr(&e))?;
        let b: usize = toks[1].parse().map_err(|e| perr(&e))?;
        let m: f64 = toks[2].parse().map_err(|e| perr(&e))?;
        atoms.push(((a, b), m));
    }
    Ok(BidegreeMeasure::from_atoms(atoms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{crd, partition_by_degree, Enumeration, DEFAULT_ENUMERATION_CAP};
    use crate::graph::{copies_graph_with_types, erdos_renyi};
    use crate::interference::SymmetricTable;
    use crate::outcome::{xi, OutcomeModel};
    use crate::rng;

    fn square() -> Graph {
        Graph::cycle(4).unwrap()
    }

    fn cfg(p: usize, r: usize, n: usize) -> ExperimentConfig {
        ExperimentConfig::new(p, r, n).unwrap()
    }

    #[test]
    fn square_measures() {
        let g = square();
        let adjacent = Treatment::from_vertices(&[0, 1], cfg(1, 2, 2)).unwrap();
        assert!(bidegree_measure(&g, &adjacent).unwrap().is_zero());
        let diagonal = Treatment::from_vertices(&[0, 2], cfg(1, 2, 2)).unwrap();
        let d = bidegree_measure(&g, &diagonal).unwrap();
        assert_eq!(
            d,
            BidegreeMeasure::from_atoms([((0, 2), 1.0), ((2, 0), -1.0)])
        );

        let gamma = 0.6;
        let spec = InterferenceSpec::Linear { gamma };
        assert!((xi_via_measure(&spec, &d).unwrap() + 2.0 * gamma).abs() < 1e-15);
        let m = OutcomeModel::new(vec![0.0; 4], vec![0.0; 4], spec).unwrap();
        assert!((xi(&m, &g, &diagonal).unwrap() + 2.0 * gamma).abs() < 1e-15);
    }

    #[test]
    fn isolated_vertices_rejected() {
        let g = square().disjoint_union(&Graph::empty(2));
        let t = Treatment::from_vertices(&[0, 1, 4], cfg(1, 2, 3)).unwrap();
        assert!(matches!(
            bidegree_measure(&g, &t),
            Err(Error::IsolatedVertices { .. })
        ));
    }

    #[test]
    fn zero_total_mass_and_swap_identity() {
        for seed in 0..20u64 {
            let mut rng = rng::seeded(seed);
            let g = erdos_renyi(24, 0.3, &mut rng).unwrap();
            if g.has_isolated_vertices() {
                continue;
            }
            for (p, r) in [(1, 2), (1, 3), (2, 3), (3, 4)] {
                let c = ExperimentConfig::for_graph(&g, p, r).unwrap();
                let t = crd(&c, &mut rng);
                let d = bidegree_measure(&g, &t).unwrap();
                assert!(d.total_mass().abs() < 1e-12);
                if p * 2 == r {
                    let comp = bidegree_measure(&g, &t.complement().unwrap()).unwrap();
                    assert!(d.swapped().max_abs_diff(&comp.negated()) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn measure_integral_matches_direct_xi() {
        for seed in 0..10u64 {
            let mut rng = rng::seeded(100 + seed);
            let g = erdos_renyi(30, 0.25, &mut rng).unwrap();
            if g.has_isolated_vertices() {
                continue;
            }
            let table = SymmetricTable::from_fn(g.degrees(), |a, b| {
                ((a * 7 + b * 3 + seed as usize) % 11) as f64 / 5.0 - 1.0
            });
            let specs = [
                InterferenceSpec::Table(table),
                InterferenceSpec::ThresholdFraction {
                    gamma: 1.1,
                    frac: 0.3,
                },
                InterferenceSpec::NormalizedLinear { gamma: -0.4 },
            ];
            let c = ExperimentConfig::for_graph(&g, 2, 5).unwrap();
            let t = crd(&c, &mut rng);
            let d = bidegree_measure(&g, &t).unwrap();
            for spec in specs {
                let m = OutcomeModel::new(vec![0.0; 30], vec![0.0; 30], spec.clone()).unwrap();
                let direct = xi(&m, &g, &t).unwrap();
                assert!((direct - xi_via_measure(&spec, &d).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn typed_measures_add_up() {
        let base = Graph::path(3);
        let cg = copies_graph_with_types(&base, &[vec![0, 2], vec![1]]).unwrap();
        let g = &cg.graph;
        let c = ExperimentConfig::for_graph(g, 1, 2).unwrap();
        let q = Treatment::from_vertices(&cg.quasicoloring, c).unwrap();
        let typed = typed_bidegree_measures(g, &q, &cg.types).unwrap();
        assert!(typed.iter().all(BidegreeMeasure::is_zero));

        let mut rng = rng::seeded(4);
        let t = crate::design::type_restricted(&cg.types, &c, &mut rng).unwrap();
        let typed = typed_bidegree_measures(g, &t, &cg.types).unwrap();
        let total = typed
            .iter()
            .fold(BidegreeMeasure::zero(), |acc, m| acc.sum(m));
        assert!(total.max_abs_diff(&bidegree_measure(g, &t).unwrap()) < 1e-12);
        let single = typed_bidegree_measures(g, &t, &TypePartition::single(24).unwrap()).unwrap();
        assert_eq!(single, vec![bidegree_measure(g, &t).unwrap()]);

        // all of the smallest part treated
        let first = cg.types.parts().iter().min_by_key(|p| p.len()).unwrap();
        let mut chosen = first.clone();
        chosen.extend(
            (0..24)
                .filter(|v| !first.contains(v))
                .take(12 - first.len()),
        );
        let unbalanced = Treatment::from_vertices(&chosen, c).unwrap();
        assert!(typed_bidegree_measures(g, &unbalanced, &cg.types).is_err());
    }

    #[test]
    fn c_p_values() {
        let g = Graph::complete(6);
        let c = ExperimentConfig::for_graph(&g, 1, 3).unwrap();
        let part = Partition::new(6, vec![vec![0, 4, 5], vec![1, 2, 3]]).unwrap();
        assert_eq!(c_p(&part, &g, &c).unwrap(), 0.0);

        // path 0-1-2-3 plus an extra leaf on 1 gives degrees 1,3,2,1,1,...
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (1, 3)]).unwrap();
        let c = ExperimentConfig::for_graph(&g, 1, 2).unwrap();
        let part = Partition::new(4, vec![vec![1, 0], vec![2, 3]]).unwrap();
        assert!((c_p(&part, &g, &c).unwrap() - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn degree_partition_constant_at_most_two() {
        for seed in 0..30u64 {
            let mut rng = rng::seeded(seed);
            let g = erdos_renyi(60, 0.1, &mut rng).unwrap();
            for r in [2, 3, 4, 5] {
                let c = ExperimentConfig::for_graph(&g, 1, r).unwrap();
                if g.degree_stats().dmax == 0 {
                    continue;
                }
                let part = partition_by_degree(&g, &c).unwrap();
                // within a sorted block the gap between ranks k and k+1 is
                // counted k (r - k) times
                let limit = if r <= 3 {
                    2.0
                } else {
                    2.0 * (r * r / 4) as f64 / (r - 1) as f64
                };
                assert!(c_p(&part, &g, &c).unwrap() <= limit + 1e-12);
            }
        }
    }

    #[test]
    fn degree_partition_constant_can_exceed_two_for_r4() {
        // degrees 9, 9, 1, 1: one block, C = 2 * 4 * 8 / (9 * 3)
        let mut edges = vec![(0, 1)];
        for leaf in 2..10 {
            edges.push((0, leaf));
        }
        for leaf in 10..18 {
            edges.push((1, leaf));
        }
        let hubs = Graph::from_edges(18, &edges).unwrap();
        let g = hubs.disjoint_union(&Graph::from_edges(2, &[(0, 1)]).unwrap());
        let c = ExperimentConfig::for_graph(&g, 1, 4).unwrap();
        let part = partition_by_degree(&g, &c).unwrap();
        assert_eq!(part.blocks()[0], vec![0, 1, 2, 3]);
        let got = c_p(&part, &g, &c).unwrap();
        // remaining blocks hold only degree-1 vertices
        assert!((got - 64.0 / 27.0).abs() < 1e-12, "{got}");
        assert!(got > 2.0);
    }

    #[test]
    fn perfect_quasicoloring_kills_xi_for_every_table() {
        let h = Graph::path(3);
        let cg = copies_graph_with_types(&h, &[vec![0], vec![1], vec![2]]).unwrap();
        let g = &cg.graph;
        let c = ExperimentConfig::for_graph(g, 1, 2).unwrap();
        let q = Treatment::from_vertices(&cg.quasicoloring, c).unwrap();
        let table = SymmetricTable::from_fn(g.degrees(), |a, b| (a * a + 3 * b) as f64);
        let m = OutcomeModel::new(vec![0.0; 24], vec![0.0; 24], InterferenceSpec::Table(table))
            .unwrap();
        assert_eq!(xi(&m, g, &q).unwrap(), 0.0);
        assert_eq!(xi(&m, g, &q.complement().unwrap()).unwrap(), 0.0);
    }

    /// Indicator tables `δ_u` detect every atom: `D_Q = 0` iff `ξ = 0` for
    /// all of them, for both `Q` and its complement.
    #[test]
    fn perfect_iff_indicator_xis_vanish() {
        let g = Graph::cycle(4)
            .unwrap()
            .disjoint_union(&Graph::cycle(4).unwrap());
        let c = ExperimentConfig::for_graph(&g, 1, 2).unwrap();
        let domain = crate::interference::bidegree_domain(g.degrees());
        let e = Enumeration::crd(&c, DEFAULT_ENUMERATION_CAP).unwrap();
        let mut perfect_seen = 0;
        for t in e.iter() {
            let perfect = is_perfect_quasicoloring(&g, &t.treated(), None).unwrap();
            let comp = t.complement().unwrap();
            let all_zero = domain.iter().all(|&u| {
                // f(0, d) is pinned to 0, so atoms (0, d) are only seen through
                // the complement, where they move to (d, 0).
                let spec = InterferenceSpec::Table(SymmetricTable::from_fn(g.degrees(), |a, b| {
                    ((a, b) == u) as u8 as f64
                }));
                let m = OutcomeModel::new(vec![0.0; 8], vec![0.0; 8], spec).unwrap();
                xi(&m, &g, &t).unwrap() == 0.0 && xi(&m, &g, &comp).unwrap() == 0.0
            });
            assert_eq!(perfect, all_zero);
            assert_eq!(perfect, bidegree_measure(&g, &t).unwrap().is_zero());
            perfect_seen += perfect as usize;
        }
        assert!(perfect_seen > 0);
    }

    #[test]
    fn measure_file_roundtrip() {
        let d = BidegreeMeasure::from_atoms([((0, 2), 0.5), ((2, 0), -0.25), ((1, 1), -0.25)]);
        let mut buf = Vec::new();
        write_measure(&d, &mut buf).unwrap();
        assert_eq!(read_measure(buf.as_slice()).unwrap(), d);
        assert!(read_measure("1 2\n".as_bytes()).is_err());
    }
}
