use serde::{Deserialize, Serialize};

use super::ExperimentConfig;
use crate::{Error, Result};

/// Partition `Pi` of the vertex set into types. Parts need not have equal
/// sizes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TypePartition {
    parts: Vec<Vec<usize>>,
    part_of: Vec<usize>,
}

impl TypePartition {
    pub fn new(num_vertices: usize, parts: Vec<Vec<usize>>) -> Result<Self> {
        let mut part_of = vec![usize::MAX; num_vertices];
        for (i, part) in parts.iter().enumerate() {
            if part.is_empty() {
                return Err(Error::TypePartition(format!("part {i} is empty")));
            }
            for &v in part {
                if v >= num_vertices {
                    return Err(Error::VertexOutOfRange {
                        vertex: v,
                        num_vertices,
                    });
                }
                if part_of[v] != usize::MAX {
                    return Err(Error::TypePartition(format!(
                        "vertex {v} belongs to parts {} and {i}",
                        part_of[v]
                    )));
                }
                part_of[v] = i;
            }
        }
        if let Some(v) = part_of.iter().position(|&p| p == usize::MAX) {
            return Err(Error::TypePartition(format!("vertex {v} is not covered")));
        }
        Ok(TypePartition { parts, part_of })
    }

    /// The trivial partition `{V(G)}`.
    pub fn single(num_vertices: usize) -> Result<Self> {
        Self::new(num_vertices, vec![(0..num_vertices).collect()])
    }

    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }
    pub fn num_parts(&self) -> usize {
        self.parts.len()
    }
    pub fn num_vertices(&self) -> usize {
        self.part_of.len()
    }
    pub fn part_index(&self, v: usize) -> usize {
        self.part_of[v]
    }
    /// `Pi(v)`
    pub fn part_of(&self, v: usize) -> &[usize] {
        &self.parts[self.part_of[v]]
    }

    pub fn check_divisible(&self, r: usize) -> Result<()> {
        match self.parts.iter().position(|p| p.len() % r != 0) {
            None => Ok(()),
            Some(i) => Err(Error::TypePartition(format!(
                "part {i} has {} vertices, not divisible by r = {r}",
                self.parts[i].len()
            ))),
        }
    }

    pub fn check_config(&self, cfg: &ExperimentConfig) -> Result<()> {
        if self.num_vertices() != cfg.num_vertices() {
            return Err(Error::TypePartition(format!(
                "covers {} vertices, config expects {}",
                self.num_vertices(),
                cfg.num_vertices()
            )));
        }
        self.check_divisible(cfg.r())
    }
}
