//! Heuristic checkpoint selection with a genetic algorithm.
//!
//! A genome holds `k` indices into the candidate steps and its fitness is the
//! savings of the plan it encodes. Each generation grows the population from
//! `base_population` to `expanded_population` through crossover and mutation,
//! keeps the `elite` best unconditionally and lets every other survivor slot be
//! taken over by a random individual with `survivor_exchange_p`.
//!
//! Several islands evolve independently, each from its own ChaCha8 stream of
//! the configured seed, and the best genome across islands wins. The answer is
//! never worse than the snapped uniform plan or the best random initial genome.

use std::cmp::Ordering;
use std::time::{Duration, Instant};

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::distribution::{FaultDistribution, StepGraph};
use crate::error::{Error, Result};
use crate::placement::{snapped_uniform_placement, Method, PlacementResult};

#[derive(Debug, Clone, PartialEq)]
pub struct GaConfig {
    pub base_population: usize,
    pub expanded_population: usize,
    pub elite: usize,
    pub survivor_exchange_p: f64,
    pub crossover_p: f64,
    pub per_mutation_p: f64,
    /// Wall-clock limit, checked between generations.
    pub time_budget: Option<Duration>,
    pub max_generations: Option<u64>,
    pub islands: usize,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            base_population: 100,
            expanded_population: 300,
            elite: 10,
            survivor_exchange_p: 0.5,
            crossover_p: 0.5,
            per_mutation_p: 0.125,
            time_budget: Some(Duration::from_secs(10)),
            max_generations: None,
            islands: std::thread::available_parallelism().map_or(1, |n| n.get()),
            seed: 0,
        }
    }
}

impl GaConfig {
    /// A time-unlimited configuration that stops after `generations`.
    pub fn deterministic(seed: u64, generations: u64, islands: usize) -> Self {
        GaConfig {
            time_budget: None,
            max_generations: Some(generations),
            islands,
            seed,
            ..GaConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Parameter(msg.to_string()));
        if !(self.elite < self.base_population && self.base_population <= self.expanded_population)
        {
            return bad("need elite < base_population <= expanded_population");
        }
        for p in [
            self.survivor_exchange_p,
            self.crossover_p,
            self.per_mutation_p,
        ] {
            if !(0.0..=1.0).contains(&p) {
                return bad("probabilities must lie in [0, 1]");
            }
        }
        if self.crossover_p + 4.0 * self.per_mutation_p > 1.0 + 1e-12 {
            return bad("crossover_p + 4 * per_mutation_p must not exceed 1");
        }
        if self.islands == 0 {
            return bad("need at least one island");
        }
        if self.time_budget.is_none() && self.max_generations.is_none() {
            return bad("set a time budget or a generation limit");
        }
        Ok(())
    }
}

/// Sorted, distinct indices into the candidate steps.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Genome {
    genes: Vec<usize>,
}

impl Genome {
    pub fn new(mut genes: Vec<usize>) -> Self {
        genes.sort_unstable();
        genes.dedup();
        Genome { genes }
    }

    pub fn genes(&self) -> &[usize] {
        &self.genes
    }
}

/// Fitness landscape over the candidate steps of one distribution.
#[derive(Debug, Clone)]
pub struct Landscape {
    graph: StepGraph,
}

impl Landscape {
    pub fn new(d: &FaultDistribution) -> Self {
        Landscape {
            graph: d.step_graph(),
        }
    }

    pub fn steps(&self) -> usize {
        self.graph.inner()
    }

    pub fn step_time(&self, gene: usize) -> u64 {
        self.graph.times[gene + 1]
    }

    pub fn fitness(&self, genome: &Genome) -> u64 {
        let mut prev = 0;
        let mut total = 0;
        for &g in &genome.genes {
            total += self.graph.weight(prev, g + 1);
            prev = g + 1;
        }
        total
    }

    pub fn random_genome(&self, k: usize, rng: &mut impl Rng) -> Genome {
        Genome::new(index::sample(rng, self.steps(), k).into_vec())
    }

    /// Restores length `k` after sorting and deduplication by adding random
    /// unused steps.
    fn canonicalize(&self, mut genes: Vec<usize>, k: usize, rng: &mut impl Rng) -> Genome {
        genes.sort_unstable();
        genes.dedup();
        while genes.len() < k {
            let g = rng.gen_range(0..self.steps());
            if let Err(pos) = genes.binary_search(&g) {
                genes.insert(pos, g);
            }
        }
        Genome { genes }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GenerationStats {
    pub generation: u64,
    pub best: u64,
    pub median: u64,
}

fn rank(a: &(u64, Genome), b: &(u64, Genome)) -> Ordering {
    b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1))
}

fn scored(landscape: &Landscape, pop: Vec<Genome>) -> Vec<(u64, Genome)> {
    let mut scored: Vec<(u64, Genome)> = pop
        .into_iter()
        .map(|g| (landscape.fitness(&g), g))
        .collect();
    scored.sort_by(rank);
    scored
}

fn tournament<'a>(pop: &'a [Genome], fitness: &[u64], rng: &mut impl Rng) -> &'a Genome {
    let a = rng.gen_range(0..pop.len());
    let b = rng.gen_range(0..pop.len());
    if fitness[b] > fitness[a] {
        &pop[b]
    } else {
        &pop[a]
    }
}

fn crossover(a: &Genome, b: &Genome, rng: &mut impl Rng) -> Vec<usize> {
    let k = a.genes.len();
    let mut p = rng.gen_range(0..=k);
    let mut q = rng.gen_range(0..=k);
    if p > q {
        std::mem::swap(&mut p, &mut q);
    }
    let mut child = a.genes[..p].to_vec();
    child.extend_from_slice(&b.genes[p..q]);
    child.extend_from_slice(&a.genes[q..]);
    child
}

fn shift(gene: usize, delta: i64, steps: usize) -> usize {
    (gene as i64 + delta).clamp(0, steps as i64 - 1) as usize
}

fn mutate(parent: &Genome, op: usize, steps: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut genes = parent.genes.clone();
    let i = rng.gen_range(0..genes.len());
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    genes[i] = match op {
        0 => shift(genes[i], sign, steps),
        1 => shift(genes[i], 3 * sign, steps),
        2 => rng.gen_range(0..steps),
        _ => {
            // neighbors; the reset sits at -1 and the exit at `steps`
            let left = if i == 0 { -1 } else { genes[i - 1] as i64 };
            let right = genes.get(i + 1).map_or(steps as i64, |&g| g as i64);
            shift(0, (left + right).div_euclid(2), steps)
        }
    };
    genes
}

/// Grows `pop` to the expanded size, ranks it, and selects the next base
/// population.
pub fn evolve_generation(
    pop: &[Genome],
    landscape: &Landscape,
    cfg: &GaConfig,
    rng: &mut ChaCha8Rng,
) -> Vec<Genome> {
    let k = pop.first().map_or(0, |g| g.genes.len());
    if k == 0 {
        return pop.to_vec();
    }
    let steps = landscape.steps();
    let fitness: Vec<u64> = pop.iter().map(|g| landscape.fitness(g)).collect();

    let mut pool: Vec<Genome> = Vec::with_capacity(cfg.expanded_population.max(pop.len()));
    pool.extend_from_slice(pop);
    while pool.len() < cfg.expanded_population {
        let draw: f64 = rng.gen();
        let genes = if draw < cfg.crossover_p {
            let a = tournament(pop, &fitness, rng);
            let b = tournament(pop, &fitness, rng);
            crossover(a, b, rng)
        } else {
            let parent = tournament(pop, &fitness, rng);
            let op = ((draw - cfg.crossover_p) / cfg.per_mutation_p) as usize;
            if cfg.per_mutation_p > 0.0 && op < 4 {
                mutate(parent, op, steps, rng)
            } else {
                parent.genes.clone()
            }
        };
        pool.push(landscape.canonicalize(genes, k, rng));
    }

    let ranked = scored(landscape, pool);
    let size = ranked.len();
    let base = cfg.base_population.min(size);
    let mut next = Vec::with_capacity(base);
    for r in 0..base {
        if r >= cfg.elite && size > 1 && rng.gen_bool(cfg.survivor_exchange_p) {
            let mut other = rng.gen_range(0..size - 1);
            if other >= r {
                other += 1;
            }
            next.push(ranked[other].1.clone());
        } else {
            next.push(ranked[r].1.clone());
        }
    }
    next
}

struct IslandOutcome {
    best: (u64, Genome),
    initial_best: (u64, Genome),
    trace: Vec<GenerationStats>,
    generations: u64,
}

fn run_island(
    landscape: &Landscape,
    k: usize,
    cfg: &GaConfig,
    island: u64,
    started: Instant,
) -> IslandOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(island);

    let mut pop: Vec<Genome> = (0..cfg.base_population)
        .map(|_| landscape.random_genome(k, &mut rng))
        .collect();
    let initial_best = scored(landscape, pop.clone()).swap_remove(0);
    let mut best = initial_best.clone();
    let mut trace = Vec::new();
    let mut generation = 0;
    loop {
        if cfg.max_generations.is_some_and(|max| generation >= max) {
            break;
        }
        if cfg
            .time_budget
            .is_some_and(|budget| started.elapsed() >= budget)
        {
            break;
        }
        pop = evolve_generation(&pop, landscape, cfg, &mut rng);
        generation += 1;

        let mut fits: Vec<u64> = pop.iter().map(|g| landscape.fitness(g)).collect();
        let top = (0..pop.len())
            .min_by(|&a, &b| fits[b].cmp(&fits[a]).then_with(|| pop[a].cmp(&pop[b])))
            .expect("population is never empty");
        if fits[top] > best.0 || (fits[top] == best.0 && pop[top] < best.1) {
            best = (fits[top], pop[top].clone());
        }
        fits.sort_unstable();
        trace.push(GenerationStats {
            generation,
            best: best.0,
            median: fits[fits.len() / 2],
        });
    }
    IslandOutcome {
        best,
        initial_best,
        trace,
        generations: generation,
    }
}

#[derive(Debug, Clone)]
pub struct GeneticOutcome {
    pub result: PlacementResult,
    /// Per generation: best so far across islands and the median island median.
    pub trace: Vec<GenerationStats>,
    /// Generations completed by the slowest island.
    pub generations: u64,
}

pub fn genetic_placement(
    d: &FaultDistribution,
    k: usize,
    cfg: &GaConfig,
) -> Result<PlacementResult> {
    genetic_search(d, k, cfg).map(|o| o.result)
}

pub fn genetic_search(d: &FaultDistribution, k: usize, cfg: &GaConfig) -> Result<GeneticOutcome> {
    cfg.validate()?;
    let started = Instant::now();
    let landscape = Landscape::new(d);
    let steps = landscape.steps();
    let finish = |genome: &Genome, trace, generations| {
        let plan = landscape
            .graph
            .plan(&genome.genes.iter().map(|g| g + 1).collect::<Vec<_>>());
        GeneticOutcome {
            result: PlacementResult::new(d, Method::Genetic, k, plan, started.elapsed()),
            trace,
            generations,
        }
    };
    if k == 0 || steps == 0 {
        return Ok(finish(&Genome::new(vec![]), vec![], 0));
    }
    if k >= steps {
        return Ok(finish(&Genome::new((0..steps).collect()), vec![], 0));
    }

    let outcomes: Vec<IslandOutcome> = if cfg.islands == 1 {
        vec![run_island(&landscape, k, cfg, 0, started)]
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..cfg.islands as u64)
                .map(|i| {
                    let landscape = &landscape;
                    s.spawn(move || run_island(landscape, k, cfg, i, started))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("island panicked"))
                .collect()
        })
    };

    let mut best = outcomes[0].best.clone();
    for o in &outcomes {
        for cand in [&o.best, &o.initial_best] {
            if rank(cand, &best) == Ordering::Less {
                best = cand.clone();
            }
        }
    }

    let generations = outcomes.iter().map(|o| o.generations).min().unwrap_or(0);
    let trace = (0..generations as usize)
        .map(|g| {
            let mut medians: Vec<u64> = outcomes.iter().map(|o| o.trace[g].median).collect();
            medians.sort_unstable();
            GenerationStats {
                generation: g as u64 + 1,
                best: outcomes.iter().map(|o| o.trace[g].best).max().unwrap_or(0),
                median: medians[medians.len() / 2],
            }
        })
        .collect();

    let mut outcome = finish(&best.1, trace, generations);
    let floor = snapped_uniform_placement(d, k);
    if floor.report.saved > outcome.result.report.saved {
        outcome.result = PlacementResult::new(d, Method::Genetic, k, floor.plan, started.elapsed());
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::placement::dp_placement;

    fn tiny() -> FaultDistribution {
        FaultDistribution::new([(0, 2), (1, 1), (3, 1)], 0, 4).unwrap()
    }

    fn bumpy(len: usize) -> FaultDistribution {
        let counts: Vec<u64> = (0..len as u64)
            .map(|t| 1 + (t % 37 == 5) as u64 * 40 + (t % 11 == 0) as u64 * 3)
            .collect();
        FaultDistribution::from_counts(&counts, 0).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(GaConfig::default().validate().is_ok());
        let mut c = GaConfig::deterministic(1, 10, 1);
        c.elite = 100;
        assert!(c.validate().is_err());
        let mut c = GaConfig::deterministic(1, 10, 1);
        c.crossover_p = 1.5;
        assert!(c.validate().is_err());
        let mut c = GaConfig::deterministic(1, 10, 1);
        c.max_generations = None;
        assert!(c.validate().is_err());
    }

    #[test]
    fn tiny_optimum() {
        for seed in 0..5 {
            let r = genetic_placement(&tiny(), 1, &GaConfig::deterministic(seed, 2, 2)).unwrap();
            assert_eq!(r.plan.times(), &[3]);
            assert_eq!(r.report.saved, 3);
        }
    }

    #[test]
    fn saturated_and_degenerate_inputs() {
        let r = genetic_placement(&tiny(), 5, &GaConfig::deterministic(0, 5, 1)).unwrap();
        assert_eq!(r.plan.times(), &[1, 3]);
        assert_eq!(r.report.saved, 4);
        let flat = FaultDistribution::new([(0, 5)], 0, 3).unwrap();
        let r = genetic_placement(&flat, 2, &GaConfig::deterministic(0, 5, 1)).unwrap();
        assert!(r.plan.is_empty());
    }

    #[test]
    fn near_dp_on_medium_instance() {
        let d = bumpy(200);
        let opt = dp_placement(&d, 8).report.saved;
        let cfg = GaConfig::deterministic(42, 500, 1);
        let got = genetic_placement(&d, 8, &cfg).unwrap().report.saved;
        assert!(got as f64 >= 0.99 * opt as f64, "{got} vs {opt}");
    }

    #[test]
    fn deterministic_per_seed() {
        let d = bumpy(300);
        let cfg = GaConfig::deterministic(9, 40, 3);
        let a = genetic_search(&d, 5, &cfg).unwrap();
        let b = genetic_search(&d, 5, &cfg).unwrap();
        assert_eq!(a.result.plan, b.result.plan);
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.generations, 40);
    }

    #[test]
    fn evolve_keeps_elite_and_is_reproducible() {
        let d = bumpy(150);
        let land = Landscape::new(&d);
        let cfg = GaConfig::deterministic(0, 1, 1);
        let optimum = dp_placement(&d, 4);
        let genes: Vec<usize> = optimum
            .plan
            .times()
            .iter()
            .map(|t| d.candidate_steps().binary_search(t).unwrap())
            .collect();
        let pop = vec![Genome::new(genes); 100];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let next = evolve_generation(&pop, &land, &cfg, &mut rng);
        assert_eq!(next.len(), 100);
        assert_eq!(land.fitness(&next[0]), optimum.report.saved);

        let mut r1 = ChaCha8Rng::seed_from_u64(11);
        let mut r2 = ChaCha8Rng::seed_from_u64(11);
        let start: Vec<Genome> = (0..100).map(|_| land.random_genome(4, &mut r1)).collect();
        for _ in 0..100 {
            land.random_genome(4, &mut r2);
        }
        assert_eq!(
            evolve_generation(&start, &land, &cfg, &mut r1),
            evolve_generation(&start, &land, &cfg, &mut r2)
        );
    }

    #[test]
    fn best_fitness_never_drops() {
        let d = bumpy(400);
        let land = Landscape::new(&d);
        let cfg = GaConfig::deterministic(0, 1, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut pop: Vec<Genome> = (0..100).map(|_| land.random_genome(6, &mut rng)).collect();
        let mut best = pop.iter().map(|g| land.fitness(g)).max().unwrap();
        for _ in 0..1000 {
            pop = evolve_generation(&pop, &land, &cfg, &mut rng);
            let now = pop.iter().map(|g| land.fitness(g)).max().unwrap();
            assert!(now >= best);
            for g in &pop {
                assert_eq!(g.genes().len(), 6);
                assert!(g.genes().windows(2).all(|w| w[0] < w[1]));
                assert!(g.genes().iter().all(|&x| x < land.steps()));
            }
            best = now;
        }
    }

    #[test]
    fn mutation_operators_stay_in_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = Genome::new(vec![0, 5, 9]);
        for op in 0..4 {
            for _ in 0..200 {
                assert!(mutate(&g, op, 10, &mut rng).iter().all(|&x| x < 10));
            }
        }
        // midpoint of neighbors 0 and 9 for the middle gene
        let mid = Genome::new(vec![0, 1, 8]);
        let mut hits = 0;
        for _ in 0..200 {
            let m = mutate(&mid, 3, 10, &mut rng);
            if m[1] == 4 {
                hits += 1;
            }
        }
        assert!(hits > 0);
    }

    #[test]
    fn time_budget_stops_search() {
        let d = bumpy(2000);
        let cfg = GaConfig {
            time_budget: Some(Duration::from_millis(50)),
            islands: 1,
            ..GaConfig::default()
        };
        let start = Instant::now();
        let out = genetic_search(&d, 8, &cfg).unwrap();
        assert!(start.elapsed() < Duration::from_secs(5));
        assert!(out.generations > 0);
    }
}
