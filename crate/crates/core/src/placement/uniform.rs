use std::time::Instant;

use super::{Method, PlacementResult};
use crate::distribution::{CheckpointPlan, FaultDistribution};

/// Evenly spaced checkpoint times over `(t_start, t_end)`, oblivious to the
/// distribution. Position `i` is `t_start + round(i * span / (k + 1))` with
/// halves rounded up; positions that collapse onto each other or onto the
/// range ends are dropped.
pub fn uniform_times(t_start: u64, t_end: u64, k: usize) -> Vec<u64> {
    let span = (t_end - t_start) as u128;
    let parts = k as u128 + 1;
    let mut times: Vec<u64> = (1..=k as u128)
        .map(|i| t_start + ((2 * i * span + parts) / (2 * parts)) as u64)
        .filter(|&t| t > t_start && t < t_end)
        .collect();
    times.dedup();
    times
}

pub fn uniform_placement(d: &FaultDistribution, k: usize) -> PlacementResult {
    let start = Instant::now();
    let plan = CheckpointPlan::from_unsorted(uniform_times(d.t_start(), d.t_end(), k));
    PlacementResult::new(d, Method::Uniform, k, plan, start.elapsed())
}

/// The uniform baseline moved onto the next candidate steps.
pub fn snapped_uniform_placement(d: &FaultDistribution, k: usize) -> PlacementResult {
    let start = Instant::now();
    let plan = CheckpointPlan::from_unsorted(uniform_times(d.t_start(), d.t_end(), k));
    let plan = d
        .snap_to_steps(&plan)
        .expect("uniform times lie inside the range");
    PlacementResult::new(d, Method::UniformSnapped, k, plan, start.elapsed())
}
