//! Fault distributions, the population step function, and savings arithmetic.
//!
//! Time is a discrete cycle index. A fault planned at cycle `t` is still
//! forwarding at every cycle `<= t`, so the population `P(t)` counts the faults
//! with injection time `>= t`. A checkpoint at exactly the injection time is
//! usable by that fault.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of planned injections per cycle over `[t_start, t_end)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FaultDistribution {
    t_start: u64,
    t_end: u64,
    entries: Vec<(u64, u64)>,
    total: u64,
}

impl FaultDistribution {
    /// Builds a distribution from raw `(time, count)` pairs.
    ///
    /// Pairs may come in any order; duplicate times are summed and zero
    /// counts dropped.
    pub fn new(
        pairs: impl IntoIterator<Item = (u64, u64)>,
        t_start: u64,
        t_end: u64,
    ) -> Result<Self> {
        if t_end <= t_start {
            return Err(Error::Range { t_start, t_end });
        }
        let mut raw: Vec<(u64, u64)> = pairs.into_iter().filter(|&(_, c)| c > 0).collect();
        if let Some(&(time, count)) = raw.iter().find(|&&(t, _)| t < t_start || t >= t_end) {
            return Err(Error::EntryOutOfRange {
                time,
                count,
                t_start,
                t_end,
            });
        }
        raw.sort_unstable_by_key(|&(t, _)| t);
        let mut entries: Vec<(u64, u64)> = Vec::with_capacity(raw.len());
        for (t, c) in raw {
            match entries.last_mut() {
                Some(last) if last.0 == t => last.1 += c,
                _ => entries.push((t, c)),
            }
        }
        if entries.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        let total = entries.iter().map(|&(_, c)| c).sum();
        Ok(FaultDistribution {
            t_start,
            t_end,
            entries,
            total,
        })
    }

    /// Builds a distribution from a dense per-cycle histogram starting at `t_start`.
    pub fn from_counts(counts: &[u64], t_start: u64) -> Result<Self> {
        let t_end = t_start + counts.len() as u64;
        FaultDistribution::new(
            counts
                .iter()
                .enumerate()
                .map(|(i, &c)| (t_start + i as u64, c)),
            t_start,
            t_end,
        )
    }

    pub fn t_start(&self) -> u64 {
        self.t_start
    }

    pub fn t_end(&self) -> u64 {
        self.t_end
    }

    pub fn span(&self) -> u64 {
        self.t_end - self.t_start
    }

    /// Sorted `(time, count)` pairs with strictly increasing times.
    pub fn entries(&self) -> &[(u64, u64)] {
        &self.entries
    }

    /// Total number of planned faults.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Count planned at exactly `t`.
    pub fn count_at(&self, t: u64) -> u64 {
        match self.entries.binary_search_by_key(&t, |&(time, _)| time) {
            Ok(i) => self.entries[i].1,
            Err(_) => 0,
        }
    }

    /// Multiplies every count by `factor`.
    pub fn scaled(&self, factor: u64) -> Result<Self> {
        FaultDistribution::new(
            self.entries.iter().map(|&(t, c)| (t, c * factor)),
            self.t_start,
            self.t_end,
        )
    }

    pub fn population(&self) -> Population {
        Population::of(self)
    }

    /// Forwarding cycles of the whole campaign without any real checkpoint.
    pub fn baseline_forward_cycles(&self) -> u64 {
        self.entries
            .iter()
            .map(|&(t, c)| (t - self.t_start) * c)
            .sum()
    }

    /// Entry times after `t_start`, the only positions worth a checkpoint.
    pub fn candidate_steps(&self) -> Vec<u64> {
        self.entries
            .iter()
            .map(|&(t, _)| t)
            .filter(|&t| t > self.t_start)
            .collect()
    }

    pub fn savings(&self, plan: &CheckpointPlan) -> Result<SavingsReport> {
        plan.check_range(self)?;
        let population = self.population();
        let mut rectangles = Vec::with_capacity(plan.len());
        let mut left = self.t_start;
        for &right in plan.times() {
            let height = population.at(right);
            rectangles.push(Rectangle {
                left,
                right,
                height,
                area: (right - left) * height,
            });
            left = right;
        }
        Ok(SavingsReport::new(
            rectangles,
            self.baseline_forward_cycles(),
        ))
    }

    /// Savings computed fault by fault: each fault restores from the latest
    /// checkpoint at or before its injection time.
    pub fn oracle_savings(&self, plan: &CheckpointPlan) -> Result<u64> {
        plan.check_range(self)?;
        let mut saved = 0;
        for &(t_fi, count) in &self.entries {
            let restore = plan
                .times()
                .iter()
                .copied()
                .filter(|&c| c <= t_fi)
                .max()
                .unwrap_or(self.t_start);
            saved += (restore - self.t_start) * count;
        }
        Ok(saved)
    }

    /// Moves every checkpoint that sits between candidate steps right onto the
    /// next step. Checkpoints after the last step have zero height and are
    /// dropped, as are duplicates created by snapping.
    pub fn snap_to_steps(&self, plan: &CheckpointPlan) -> Result<CheckpointPlan> {
        plan.check_range(self)?;
        let steps = self.candidate_steps();
        let mut snapped: Vec<u64> = plan
            .times()
            .iter()
            .filter_map(|&c| {
                let i = steps.partition_point(|&s| s < c);
                steps.get(i).copied()
            })
            .collect();
        snapped.dedup();
        Ok(CheckpointPlan { times: snapped })
    }

    pub(crate) fn step_graph(&self) -> StepGraph {
        StepGraph::new(self)
    }
}

/// The non-increasing step function `P(t)`: faults still forwarding at cycle `t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Population {
    steps: Vec<(u64, u64)>,
    total: u64,
}

impl Population {
    fn of(d: &FaultDistribution) -> Self {
        let mut steps = vec![(d.t_start, d.total)];
        let mut remaining = d.total;
        for &(t, c) in &d.entries {
            remaining -= c;
            // a fault at t leaves the population after cycle t
            steps.push((t + 1, remaining));
        }
        Population {
            steps,
            total: d.total,
        }
    }

    /// `(time, value)` pairs; times strictly increase, values strictly decrease.
    pub fn steps(&self) -> &[(u64, u64)] {
        &self.steps
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn at(&self, t: u64) -> u64 {
        let i = self.steps.partition_point(|&(time, _)| time <= t);
        if i == 0 {
            self.total
        } else {
            self.steps[i - 1].1
        }
    }
}

/// Ordered real checkpoints. The reset at `t_start` is implicit.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CheckpointPlan {
    times: Vec<u64>,
}

impl CheckpointPlan {
    pub fn new(times: Vec<u64>) -> Result<Self> {
        for w in times.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::UnorderedPlan {
                    prev: w[0],
                    next: w[1],
                });
            }
        }
        Ok(CheckpointPlan { times })
    }

    /// Sorts and deduplicates arbitrary times.
    pub fn from_unsorted(mut times: Vec<u64>) -> Self {
        times.sort_unstable();
        times.dedup();
        CheckpointPlan { times }
    }

    pub fn empty() -> Self {
        CheckpointPlan::default()
    }

    pub fn times(&self) -> &[u64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn check_range(&self, d: &FaultDistribution) -> Result<()> {
        match self.times.iter().find(|&&t| t <= d.t_start || t >= d.t_end) {
            Some(&time) => Err(Error::CheckpointOutOfRange {
                time,
                t_start: d.t_start,
                t_end: d.t_end,
            }),
            None => Ok(()),
        }
    }
}

/// Area under the population saved by one checkpoint pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Rectangle {
    pub left: u64,
    pub right: u64,
    pub height: u64,
    pub area: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SavingsReport {
    pub saved: u64,
    pub baseline: u64,
    pub remaining: u64,
    pub reduction: f64,
    pub rectangles: Vec<Rectangle>,
}

impl SavingsReport {
    pub(crate) fn new(rectangles: Vec<Rectangle>, baseline: u64) -> Self {
        let saved: u64 = rectangles.iter().map(|r| r.area).sum();
        debug_assert!(saved <= baseline);
        SavingsReport {
            saved,
            baseline,
            remaining: baseline - saved,
            reduction: if baseline == 0 {
                0.0
            } else {
                saved as f64 / baseline as f64
            },
            rectangles,
        }
    }

    /// CSV with one `left,right,height,area` row per rectangle and a trailing
    /// summary comment.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("left,right,height,area\n");
        for r in &self.rectangles {
            out.push_str(&format!("{},{},{},{}\n", r.left, r.right, r.height, r.area));
        }
        out.push_str(&format!(
            "# saved={} baseline={} remaining={} reduction={:.6}\n",
            self.saved, self.baseline, self.remaining, self.reduction
        ));
        out
    }
}

/// Transitive DAG over the reset node, the candidate steps and an exit node at
/// `t_end`. Node 0 is `t_start`, nodes `1..=m` are the candidate steps and
/// node `m + 1` is the exit. The arc `a -> b` carries the rectangle area
/// `(time[b] - time[a]) * height[b]`; the exit has height zero.
#[derive(Debug, Clone)]
pub(crate) struct StepGraph {
    pub times: Vec<u64>,
    pub heights: Vec<u64>,
}

impl StepGraph {
    fn new(d: &FaultDistribution) -> Self {
        let mut times = vec![d.t_start];
        let mut heights = vec![d.total];
        let mut remaining = d.total;
        for &(t, c) in &d.entries {
            if t > d.t_start {
                times.push(t);
                heights.push(remaining);
            }
            remaining -= c;
        }
        times.push(d.t_end);
        heights.push(0);
        StepGraph { times, heights }
    }

    /// Number of candidate steps (inner nodes).
    pub fn inner(&self) -> usize {
        self.times.len() - 2
    }

    pub fn exit(&self) -> usize {
        self.times.len() - 1
    }

    #[inline]
    pub fn weight(&self, a: usize, b: usize) -> u64 {
        (self.times[b] - self.times[a]) * self.heights[b]
    }

    /// Savings of a sorted selection of inner node indices.
    pub fn path_weight(&self, nodes: &[usize]) -> u64 {
        let mut prev = 0;
        let mut total = 0;
        for &n in nodes {
            total += self.weight(prev, n);
            prev = n;
        }
        total
    }

    pub fn plan(&self, nodes: &[usize]) -> CheckpointPlan {
        CheckpointPlan {
            times: nodes.iter().map(|&n| self.times[n]).collect(),
        }
    }
}
