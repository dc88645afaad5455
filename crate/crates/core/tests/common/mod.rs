#![allow(dead_code)]

use ckptsel::{CheckpointPlan, FaultDistribution};
use proptest::prelude::*;
use rand::Rng;

/// Random distribution with up to `max_steps` occupied cycles.
pub fn random_distribution(rng: &mut impl Rng, max_steps: usize) -> FaultDistribution {
    let t_start = rng.gen_range(0..50);
    let span = rng.gen_range(2..(4 * max_steps as u64 + 4));
    let entries = rng.gen_range(1..=max_steps);
    let pairs: Vec<(u64, u64)> = (0..entries)
        .map(|_| (t_start + rng.gen_range(0..span), rng.gen_range(1..20)))
        .collect();
    FaultDistribution::new(pairs, t_start, t_start + span).unwrap()
}

/// Random plan strictly inside `(t_start, t_end)`, not restricted to steps.
pub fn random_plan(rng: &mut impl Rng, d: &FaultDistribution, max_k: usize) -> CheckpointPlan {
    let k = rng.gen_range(0..=max_k);
    let times = (0..k)
        .map(|_| rng.gen_range(d.t_start() + 1..d.t_end()))
        .collect();
    CheckpointPlan::from_unsorted(times)
}

pub fn distribution_strategy(max_entries: usize) -> impl Strategy<Value = FaultDistribution> {
    (0u64..40, 2u64..300)
        .prop_flat_map(move |(t_start, span)| {
            (
                Just(t_start),
                Just(span),
                prop::collection::vec((t_start..t_start + span, 1u64..30), 1..=max_entries),
            )
        })
        .prop_map(|(t_start, span, pairs)| {
            FaultDistribution::new(pairs, t_start, t_start + span).unwrap()
        })
}

pub fn distribution_and_plan(
    max_entries: usize,
    max_k: usize,
) -> impl Strategy<Value = (FaultDistribution, CheckpointPlan)> {
    distribution_strategy(max_entries).prop_flat_map(move |d| {
        // spans are at least 2, so the open interval is never empty
        let plan = prop::collection::vec(d.t_start() + 1..d.t_end(), 0..=max_k)
            .prop_map(CheckpointPlan::from_unsorted);
        (Just(d), plan)
    })
}
