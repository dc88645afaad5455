use std::time::Instant;

use super::{Method, PlacementResult};
use crate::distribution::FaultDistribution;
use crate::error::{Error, Result};

pub const DEFAULT_ENUMERATION_BUDGET: u64 = 10_000_000;

/// `C(n, k)`, or some value above `cap` once the count exceeds it.
fn binomial_capped(n: usize, k: usize, cap: u64) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > cap as u128 {
            break;
        }
    }
    acc
}

/// Brute-force optimum over every `k`-subset of candidate steps. Among equal
/// savings the lexicographically smallest plan wins.
pub fn exhaustive_placement(d: &FaultDistribution, k: usize) -> Result<PlacementResult> {
    exhaustive_placement_with_budget(d, k, DEFAULT_ENUMERATION_BUDGET)
}

pub fn exhaustive_placement_with_budget(
    d: &FaultDistribution,
    k: usize,
    budget: u64,
) -> Result<PlacementResult> {
    let start = Instant::now();
    let g = d.step_graph();
    let n = g.inner();
    let k_eff = k.min(n);
    if binomial_capped(n, k_eff, budget) > budget as u128 {
        return Err(Error::BudgetExceeded {
            n,
            k: k_eff,
            budget,
        });
    }

    // inner nodes are 1..=n
    let mut combo: Vec<usize> = (1..=k_eff).collect();
    let mut best_nodes = combo.clone();
    let mut best = g.path_weight(&combo);
    'outer: loop {
        let mut i = k_eff;
        loop {
            if i == 0 {
                break 'outer;
            }
            i -= 1;
            if combo[i] < n - (k_eff - 1 - i) {
                break;
            }
        }
        combo[i] += 1;
        for j in i + 1..k_eff {
            combo[j] = combo[j - 1] + 1;
        }
        let w = g.path_weight(&combo);
        if w > best {
            best = w;
            best_nodes.clone_from(&combo);
        }
    }
    Ok(PlacementResult::new(
        d,
        Method::Exhaustive,
        k,
        g.plan(&best_nodes),
        start.elapsed(),
    ))
}
