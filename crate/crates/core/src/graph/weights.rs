use serde::{Deserialize, Serialize};

use super::{DiGraph, EdgeId};
use crate::error::{Error, Result};

/// Positive integer edge weights indexed by edge id, with a declared upper bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightFn {
    weights: Vec<u64>,
    bound: u64,
}

impl WeightFn {
    pub fn new(weights: Vec<u64>, bound: u64) -> Result<Self> {
        for (e, &w) in weights.iter().enumerate() {
            if w == 0 {
                return Err(Error::InvalidWeights(format!("edge {e} has weight 0")));
            }
            if w > bound {
                return Err(Error::InvalidWeights(format!(
                    "edge {e} has weight {w} above bound {bound}"
                )));
            }
        }
        Ok(WeightFn { weights, bound })
    }

    /// Weights with the bound set to their maximum (1 for an empty list).
    pub fn from_weights(weights: Vec<u64>) -> Result<Self> {
        let bound = weights.iter().copied().max().unwrap_or(1).max(1);
        Self::new(weights, bound)
    }

    pub fn unit(m: usize) -> Self {
        WeightFn {
            weights: vec![1; m],
            bound: 1,
        }
    }

    pub fn get(&self, e: EdgeId) -> u64 {
        self.weights[e]
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.weights.iter().all(|&w| w == 1)
    }

    pub fn check_for(&self, g: &DiGraph) -> Result<()> {
        if self.weights.len() != g.m() {
            return Err(Error::InvalidWeights(format!(
                "{} weights for {} edges",
                self.weights.len(),
                g.m()
            )));
        }
        Ok(())
    }

    /// Total weight of a vertex path, or `None` if some step is not an edge.
    pub fn path_weight(&self, g: &DiGraph, path: &[usize]) -> Option<u64> {
        path.windows(2).try_fold(0u64, |acc, pair| {
            let (_, id) = *g.out_edges(pair[0]).iter().find(|&&(d, _)| d == pair[1])?;
            acc.checked_add(self.weights[id])
        })
    }

    /// Copy without edge `id`, matching [`DiGraph::without_edge`].
    pub fn without_edge(&self, id: EdgeId) -> WeightFn {
        let weights = self
            .weights
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != id)
            .map(|(_, &w)| w)
            .collect();
        WeightFn {
            weights,
            bound: self.bound,
        }
    }
}
