//! Exhaustive enumeration of equally likely treatments.
//!
//! Every design covered here draws a uniform `k_g`-subset from each of
//! several disjoint vertex groups independently, so its support is a product
//! of combination spaces and every point has the same probability. Points are
//! indexed in mixed radix (first group most significant, lexicographic
//! subsets within a group), which lets callers shard the index range.

use super::{ExperimentConfig, Partition, Treatment, TypePartition};
use crate::{Error, Result};

pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) is exact at every step.
        acc = match acc.checked_mul((n - i) as u128) {
            Some(x) => x / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

#[derive(Debug, Clone)]
pub struct Enumeration {
    groups: Vec<Vec<usize>>,
    picks: Vec<usize>,
    sizes: Vec<u128>,
    total: u128,
    config: ExperimentConfig,
}

impl Enumeration {
    fn build(
        groups: Vec<Vec<usize>>,
        picks: Vec<usize>,
        config: ExperimentConfig,
        cap: u128,
    ) -> Result<Self> {
        let sizes: Vec<u128> = groups
            .iter()
            .zip(&picks)
            .map(|(g, &k)| binomial(g.len(), k))
            .collect();
        let total = sizes
            .iter()
            .try_fold(1u128, |acc, &s| acc.checked_mul(s))
            .unwrap_or(u128::MAX);
        if total > cap || total > usize::MAX as u128 {
            return Err(Error::EnumerationCap {
                required: total,
                cap,
            });
        }
        Ok(Enumeration {
            groups,
            picks,
            sizes,
            total,
            config,
        })
    }

    /// All `C(r, p)^n` within-block assignments on `partition`.
    pub fn blocks(partition: &Partition, cfg: &ExperimentConfig, cap: u128) -> Result<Self> {
        partition.check_config(cfg)?;
        Self::build(
            partition.blocks().to_vec(),
            vec![cfg.p(); partition.num_blocks()],
            *cfg,
            cap,
        )
    }

    /// All `C(rn, pn)` treatments of the completely randomized design.
    pub fn crd(cfg: &ExperimentConfig, cap: u128) -> Result<Self> {
        Self::build(
            vec![(0..cfg.num_vertices()).collect()],
            vec![cfg.num_treated()],
            *cfg,
            cap,
        )
    }

    /// All treatments of the type-restricted design.
    pub fn types(types: &TypePartition, cfg: &ExperimentConfig, cap: u128) -> Result<Self> {
        types.check_config(cfg)?;
        let picks = types
            .parts()
            .iter()
            .map(|p| cfg.p() * p.len() / cfg.r())
            .collect();
        Self::build(types.parts().to_vec(), picks, *cfg, cap)
    }

    pub fn len(&self) -> usize {
        self.total as usize
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    /// Treatment with mixed-radix index `index`.
    pub fn treatment_at(&self, index: usize) -> Treatment {
        let combos = self.unrank_all(index as u128);
        self.materialize(&combos)
    }

    pub fn iter(&self) -> EnumerationIter<'_> {
        self.iter_range(0, self.len())
    }

    /// Treatments with indices in `start..end`, in index order.
    pub fn iter_range(&self, start: usize, end: usize) -> EnumerationIter<'_> {
        let end = end.min(self.len());
        let combos = if start < end {
            self.unrank_all(start as u128)
        } else {
            Vec::new()
        };
        EnumerationIter {
            owner: self,
            combos,
            remaining: end.saturating_sub(start),
        }
    }

    fn unrank_all(&self, mut index: u128) -> Vec<Vec<usize>> {
        let mut combos = vec![Vec::new(); self.groups.len()];
        for g in (0..self.groups.len()).rev() {
            let digit = index % self.sizes[g];
            index /= self.sizes[g];
            combos[g] = unrank_combination(digit, self.groups[g].len(), self.picks[g]);
        }
        combos
    }

    fn materialize(&self, combos: &[Vec<usize>]) -> Treatment {
        let mut mask = vec![false; self.config.num_vertices()];
        for (group, combo) in self.groups.iter().zip(combos) {
            for &j in combo {
                mask[group[j]] = true;
            }
        }
        Treatment::from_mask_unchecked(mask, self.config)
    }

    fn advance(&self, combos: &mut [Vec<usize>]) {
        for g in (0..self.groups.len()).rev() {
            if next_combination(&mut combos[g], self.groups[g].len()) {
                return;
            }
            combos[g] = (0..self.picks[g]).collect();
        }
    }
}

pub struct EnumerationIter<'a> {
    owner: &'a Enumeration,
    combos: Vec<Vec<usize>>,
    remaining: usize,
}

impl Iterator for EnumerationIter<'_> {
    type Item = Treatment;

    fn next(&mut self) -> Option<Treatment> {
        if self.remaining == 0 {
            return None;
        }
        let t = self.owner.materialize(&self.combos);
        self.remaining -= 1;
        if self.remaining > 0 {
            self.owner.advance(&mut self.combos);
        }
        Some(t)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining, Some(self.remaining))
    }
}

impl ExactSizeIterator for EnumerationIter<'_> {}

/// Lexicographic successor of a sorted `k`-subset of `0..n`; false on wrap.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// The `rank`-th `k`-subset of `0..n` in lexicographic order.
fn unrank_combination(mut rank: u128, n: usize, k: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut next = 0;
    for i in 0..k {
        let mut c = next;
        loop {
            let below = binomial(n - 1 - c, k - 1 - i);
            if rank < below {
                break;
            }
            rank -= below;
            c += 1;
        }
        out.push(c);
        next = c + 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn cfg(p: usize, r: usize, n: usize) -> ExperimentConfig {
        ExperimentConfig::new(p, r, n).unwrap()
    }

    fn pairs(n: usize) -> Partition {
        Partition::new(2 * n, (0..n).map(|i| vec![2 * i, 2 * i + 1]).collect()).unwrap()
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 3), 20);
        assert_eq!(binomial(40, 20), 137_846_528_820);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(0, 0), 1);
        assert_eq!(binomial(200, 100), u128::MAX);
        assert_eq!(binomial(1000, 500), u128::MAX);
    }

    #[test]
    fn three_pairs_give_eight() {
        let e = Enumeration::blocks(&pairs(3), &cfg(1, 2, 3), DEFAULT_ENUMERATION_CAP).unwrap();
        let all: HashSet<Vec<usize>> = e.iter().map(|t| t.treated()).collect();
        assert_eq!(e.len(), 8);
        assert_eq!(all.len(), 8);
    }

    #[test]
    fn two_triples_give_nine() {
        let part = Partition::new(6, vec![vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
        let e = Enumeration::blocks(&part, &cfg(1, 3, 2), DEFAULT_ENUMERATION_CAP).unwrap();
        let all: HashSet<Vec<usize>> = e.iter().map(|t| t.treated()).collect();
        assert_eq!(all.len(), 9);
        assert_eq!(e.iter().len(), 9);
    }

    #[test]
    fn two_pairs_give_four() {
        let e = Enumeration::blocks(&pairs(2), &cfg(1, 2, 2), DEFAULT_ENUMERATION_CAP).unwrap();
        let all: Vec<Vec<usize>> = e.iter().map(|t| t.treated()).collect();
        assert_eq!(all, vec![vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3]]);
    }

    #[test]
    fn marginals_exact() {
        let part = Partition::new(8, vec![vec![0, 5, 6, 7], vec![1, 2, 3, 4]]).unwrap();
        let c = cfg(3, 4, 2);
        let e = Enumeration::blocks(&part, &c, DEFAULT_ENUMERATION_CAP).unwrap();
        let mut hits = [0usize; 8];
        for t in e.iter() {
            for (v, h) in hits.iter_mut().enumerate() {
                *h += t.contains(v) as usize;
            }
        }
        // hits / count == p / r exactly
        for h in hits {
            assert_eq!(h * c.r(), e.len() * c.p());
        }
    }

    #[test]
    fn crd_enumeration_is_all_subsets() {
        let e = Enumeration::crd(&cfg(1, 2, 3), DEFAULT_ENUMERATION_CAP).unwrap();
        let all: HashSet<Vec<usize>> = e.iter().map(|t| t.treated()).collect();
        assert_eq!(all.len(), 20);
    }

    #[test]
    fn cap_enforced() {
        assert!(matches!(
            Enumeration::blocks(&pairs(3), &cfg(1, 2, 3), 7),
            Err(Error::EnumerationCap {
                required: 8,
                cap: 7
            })
        ));
        assert!(Enumeration::crd(&cfg(1, 2, 100), DEFAULT_ENUMERATION_CAP).is_err());
    }

    #[test]
    fn ranges_and_random_access_agree_with_iteration() {
        let types = TypePartition::new(10, vec![vec![0, 3, 4, 9], vec![1, 2, 5, 6, 7, 8]]).unwrap();
        let e = Enumeration::types(&types, &cfg(1, 2, 5), DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(e.len(), 6 * 20);
        let full: Vec<_> = e.iter().collect();
        for (i, t) in full.iter().enumerate() {
            assert_eq!(&e.treatment_at(i), t);
        }
        let chunked: Vec<_> = (0..e.len())
            .step_by(7)
            .flat_map(|s| e.iter_range(s, s + 7))
            .collect();
        assert_eq!(chunked, full);
    }

    #[test]
    fn unrank_matches_successor() {
        let mut c: Vec<usize> = (0..3).collect();
        for rank in 0..binomial(7, 3) {
            assert_eq!(unrank_combination(rank, 7, 3), c);
            next_combination(&mut c, 7);
        }
    }
}
