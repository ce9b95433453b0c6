//! Star-mesh elimination (sparse Gaussian elimination on a weighted Laplacian)
//! with a greedy minimum-degree order.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One eliminated node: its conductances to the nodes still present at that
/// moment, and their sum.
#[derive(Clone, Debug)]
pub(crate) struct Step<T> {
    pub node: usize,
    pub links: Vec<(usize, T)>,
    pub pivot: T,
}

/// Result of eliminating every active node that is not kept.
#[derive(Clone, Debug)]
pub(crate) struct Reduction<T> {
    pub steps: Vec<Step<T>>,
    /// Conductances among kept nodes after elimination.
    pub kept_links: Vec<BTreeMap<usize, T>>,
}

impl<T: Scalar> Reduction<T> {
    /// `adj` holds symmetric conductances; nodes with `active[v] == false` are ignored.
    pub fn eliminate(mut adj: Vec<BTreeMap<usize, T>>, kept: &[bool], active: &[bool]) -> Result<Self> {
        let n = adj.len();
        for (v, row) in adj.iter_mut().enumerate() {
            if !active[v] {
                row.clear();
            }
        }
        let mut queue: BTreeSet<(usize, usize)> = (0..n)
            .filter(|&v| active[v] && !kept[v])
            .map(|v| (adj[v].len(), v))
            .collect();
        let mut steps = Vec::with_capacity(queue.len());
        while let Some((_, v)) = queue.pop_first() {
            let row = std::mem::take(&mut adj[v]);
            let links: Vec<(usize, T)> = row.into_iter().collect();
            let pivot: T = links.iter().map(|&(_, c)| c).sum();
            if pivot.is_nan() || pivot <= T::zero() {
                return Err(Error::ZeroPivot(format!("index {v}")));
            }
            for &(a, _) in &links {
                if !kept[a] {
                    queue.remove(&(adj[a].len(), a));
                }
                adj[a].remove(&v);
            }
            for (x, &(a, ca)) in links.iter().enumerate() {
                for &(b, cb) in &links[x + 1..] {
                    let c = ca * cb / pivot;
                    *adj[a].entry(b).or_insert(T::zero()) += c;
                    *adj[b].entry(a).or_insert(T::zero()) += c;
                }
            }
            for &(a, _) in &links {
                if !kept[a] {
                    queue.insert((adj[a].len(), a));
                }
            }
            steps.push(Step { node: v, links, pivot });
        }
        Ok(Reduction { steps, kept_links: adj })
    }

    /// Fills eliminated entries of `x` from the kept ones so that each eliminated
    /// node is the weighted mean of its neighbors.
    pub fn extend(&self, x: &mut [T]) {
        for step in self.steps.iter().rev() {
            let s: T = step.links.iter().map(|&(a, c)| c * x[a]).sum();
            x[step.node] = s / step.pivot;
        }
    }

    /// Solves `L x = b` on the eliminated nodes with kept nodes held at zero.
    pub fn solve_grounded(&self, b: &[T]) -> Vec<T> {
        let mut rhs = b.to_vec();
        for step in &self.steps {
            let bv = rhs[step.node];
            for &(a, c) in &step.links {
                rhs[a] += c / step.pivot * bv;
            }
        }
        let mut x = vec![T::zero(); b.len()];
        for step in self.steps.iter().rev() {
            let s: T = step.links.iter().map(|&(a, c)| c * x[a]).sum();
            x[step.node] = (rhs[step.node] + s) / step.pivot;
        }
        x
    }
}
