use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use super::Bidegree;
use crate::{Error, Result};

/// Explicit symmetric interference `f(a, b)` on a finite set of bidegrees.
///
/// Entries with `a = 0` are implicitly zero (`f_v(∅) = 0`); an explicit
/// nonzero `(0, d)` entry is rejected.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SymmetricTable {
    entries: BTreeMap<Bidegree, f64>,
}

impl SymmetricTable {
    pub fn new<I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Bidegree, f64)>,
    {
        let mut map = BTreeMap::new();
        for ((a, b), value) in entries {
            if !value.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "non-finite table value at ({a}, {b})"
                )));
            }
            if a == 0 && value != 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "f(0, {b}) = {value}; interference with no treated neighbors must be 0"
                )));
            }
            if map.insert((a, b), value).is_some() {
                return Err(Error::InvalidParameter(format!(
                    "duplicate table entry ({a}, {b})"
                )));
            }
        }
        Ok(SymmetricTable { entries: map })
    }

    /// Fills every bidegree `(a, d - a)` for the given degrees from `f`,
    /// forcing `f(0, d) = 0`.
    pub fn from_fn<D, F>(degrees: D, f: F) -> Self
    where
        D: IntoIterator<Item = usize>,
        F: Fn(usize, usize) -> f64,
    {
        let mut entries = BTreeMap::new();
        for d in degrees {
            for a in 0..=d {
                let v = if a == 0 { 0.0 } else { f(a, d - a) };
                entries.insert((a, d - a), v);
            }
        }
        SymmetricTable { entries }
    }

    pub fn get(&self, a: usize, b: usize) -> Result<f64> {
        if a == 0 {
            return Ok(0.0);
        }
        self.entries
            .get(&(a, b))
            .copied()
            .ok_or(Error::MissingTableEntry(a, b))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (Bidegree, f64)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        SymmetricTable {
            entries: self
                .entries
                .iter()
                .map(|(&k, &v)| (k, v * factor))
                .collect(),
        }
    }

    /// Errors with the first missing bidegree of the given degrees.
    pub fn check_domain<D: IntoIterator<Item = usize>>(&self, degrees: D) -> Result<()> {
        for d in degrees {
            for a in 1..=d {
                self.get(a, d - a)?;
            }
        }
        Ok(())
    }
}

/// Lines `a b value`.
pub fn read_table<R: BufRead>(input: R) -> Result<SymmetricTable> {
    let mut entries = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = t.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(Error::parse(idx + 1, "expected 'a b value'"));
        }
        let perr = |e: &dyn std::fmt::Display| Error::parse(idx + 1, e.to_string());
        let a: usize = toks[0].parse().map_err(|e| perr(&e))?;
        let b: usize = toks[1].parse().map_err(|e| perr(&e))?;
        let v: f64 = toks[2].parse().map_err(|e| perr(&e))?;
        entries.push(((a, b), v));
    }
    SymmetricTable::new(entries)
}

pub fn write_table<W: Write>(table: &SymmetricTable, mut out: W) -> Result<()> {
    for ((a, b), v) in table.entries() {
        writeln!(out, "{a} {b} {v}")?;
    }
    Ok(())
}
