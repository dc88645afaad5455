//! Exact selection as a fixed-length maximum-weight path in the step DAG.
//!
//! `best(i, j)` is the heaviest path from the reset node to node `i` that uses
//! at most `j` internal nodes; node `i` itself ends the path. The recurrence
//! is
//!
//! ```text
//! best(i, 0) = w(0, i)
//! best(i, j) = max over x in 0..=i of best(i - x, j - 1) + w(i - x, i)
//! ```
//!
//! with `w(a, a) = 0`, so `x = 0` carries the `j - 1` solution forward. The
//! answer is `best(exit, k)`. `choice(i, j)` records the winning offset `x`;
//! ties go to the smallest offset.

use std::ops::Sub;
use std::time::Instant;

use super::{Method, PlacementResult};
use crate::distribution::{FaultDistribution, StepGraph};

#[derive(Debug, Clone)]
pub struct DpTables {
    nodes: usize,
    k: usize,
    // row-major by j: best[j * nodes + i]
    best: Vec<u64>,
    choice: Vec<u32>,
}

impl DpTables {
    /// Fills both tables for up to `k` internal nodes.
    pub fn compute(d: &FaultDistribution, k: usize) -> Self {
        Self::fill(&d.step_graph(), k)
    }

    fn fill(g: &StepGraph, k: usize) -> Self {
        let narrow =
            |v: &[u64]| -> Option<Vec<u32>> { v.iter().map(|&x| u32::try_from(x).ok()).collect() };
        // u32 operands let the products vectorize
        match (narrow(&g.times), narrow(&g.heights)) {
            (Some(times), Some(heights)) => Self::fill_with(&times, &heights, k),
            _ => Self::fill_with(&g.times, &g.heights, k),
        }
    }

    fn fill_with<T>(times: &[T], heights: &[T], k: usize) -> Self
    where
        T: Copy + Into<u64> + Sub<Output = T>,
    {
        let nodes = times.len();
        let area = |a: usize, b: usize| -> u64 { (times[b] - times[a]).into() * heights[b].into() };
        let mut best = vec![0u64; nodes * (k + 1)];
        let mut choice = vec![0u32; nodes * (k + 1)];
        for i in 0..nodes {
            best[i] = area(0, i);
            choice[i] = i as u32;
        }
        for j in 1..=k {
            let (done, rest) = best.split_at_mut(j * nodes);
            let prev = &done[(j - 1) * nodes..];
            let row = &mut rest[..nodes];
            let xrow = &mut choice[j * nodes..(j + 1) * nodes];
            for i in 0..nodes {
                let ti = times[i];
                let hi = heights[i];
                // first pass: the maximum
                let top = prev[..i]
                    .iter()
                    .zip(&times[..i])
                    .map(|(&p, &ta)| p + (ti - ta).into() * hi.into())
                    .fold(prev[i], u64::max);
                // second pass: smallest offset reaching it
                let x = if prev[i] == top {
                    0
                } else {
                    (1..=i)
                        .find(|&x| prev[i - x] + area(i - x, i) == top)
                        .expect("maximum is attained")
                };
                row[i] = top;
                xrow[i] = x as u32;
            }
        }
        DpTables {
            nodes,
            k,
            best,
            choice,
        }
    }

    /// Last node index (the exit at `t_end`).
    pub fn exit(&self) -> usize {
        self.nodes - 1
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn best(&self, i: usize, j: usize) -> u64 {
        self.best[j * self.nodes + i]
    }

    pub fn choice(&self, i: usize, j: usize) -> usize {
        self.choice[j * self.nodes + i] as usize
    }

    /// Optimal savings with at most `j` checkpoints, for every `j <= k`.
    pub fn optimum_by_k(&self) -> Vec<u64> {
        (0..=self.k).map(|j| self.best(self.exit(), j)).collect()
    }

    /// Inner node indices on the optimal path to the exit using at most `j`
    /// internal nodes.
    pub fn backtrack(&self, j: usize) -> Vec<usize> {
        let mut nodes = Vec::with_capacity(j);
        let mut i = self.exit();
        let mut j = j.min(self.k);
        while j > 0 {
            let x = self.choice(i, j);
            if x == 0 {
                j -= 1;
                continue;
            }
            let pred = i - x;
            if pred == 0 {
                break;
            }
            nodes.push(pred);
            i = pred;
            j -= 1;
        }
        nodes.reverse();
        nodes
    }
}

pub fn dp_placement(d: &FaultDistribution, k: usize) -> PlacementResult {
    let start = Instant::now();
    let g = d.step_graph();
    let k_eff = k.min(g.inner());
    let tables = DpTables::fill(&g, k_eff);
    let nodes = tables.backtrack(k_eff);
    debug_assert_eq!(g.path_weight(&nodes), tables.best(tables.exit(), k_eff));
    let plan = g.plan(&nodes);
    PlacementResult::new(d, Method::Dp, k, plan, start.elapsed())
}
