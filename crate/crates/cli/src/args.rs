use std::path::PathBuf;
use std::time::Duration;

use ckptsel::cachesim::{AccessFilter, CacheConfig};
use ckptsel::placement::DEFAULT_ENUMERATION_BUDGET;
use ckptsel::synth::SynthParams;
use ckptsel::{GaConfig, Method};
use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "ckptsel",
    version,
    about = "Checkpoint placement for fault-injection campaigns"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Seed for synthetic distributions and the genetic search.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Write the output to this file instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,

    /// Emit JSON.
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,

    /// Emit CSV.
    #[arg(long, global = true)]
    pub csv: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl Global {
    pub fn format(&self, default: Format) -> Format {
        match (self.json, self.csv) {
            (true, _) => Format::Json,
            (_, true) => Format::Csv,
            _ => default,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic fault distribution (distribution file format).
    Gen(GenArgs),
    /// Place checkpoints on a distribution (JSON by default).
    Place(PlaceArgs),
    /// Evaluate the savings of a given plan (JSON by default).
    Eval(EvalArgs),
    /// Compute the weighted-FFT non-uniformity score (JSON by default).
    Wfft(WfftArgs),
    /// Write the placement ILP as an LP file.
    ExportIlp(ExportIlpArgs),
    /// Read an external solver's solution back into a plan (JSON by default).
    ImportSol(ImportSolArgs),
    /// Turn a memory-access trace into a cache-miss fault distribution.
    Cachesim(CachesimArgs),
    /// Run methods over distributions and k values (CSV by default).
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Length of the time axis.
    #[arg(long, default_value_t = 10_000)]
    pub steps: u64,
    /// Faults per cycle of the uniform base.
    #[arg(long, default_value_t = 4)]
    pub carpet_height: u64,
    /// Log-normal mu of the peak count.
    #[arg(long, default_value_t = 2.5, allow_negative_numbers = true)]
    pub peak_mu: f64,
    /// Log-normal sigma of the peak count.
    #[arg(long, default_value_t = 0.8)]
    pub peak_sigma: f64,
    #[arg(long, default_value_t = 2)]
    pub min_peaks: u64,
    #[arg(long, default_value_t = 100)]
    pub max_peaks: u64,
    /// Smallest peak height as a multiple of the carpet.
    #[arg(long, default_value_t = 2.0)]
    pub min_height: f64,
    #[arg(long, default_value_t = 5.0)]
    pub max_height: f64,
    /// Smallest peak width as a fraction of the time axis.
    #[arg(long, default_value_t = 0.02)]
    pub min_width: f64,
    #[arg(long, default_value_t = 0.10)]
    pub max_width: f64,
}

impl SynthArgs {
    pub fn params(&self, seed: u64) -> SynthParams {
        SynthParams {
            steps: self.steps,
            carpet_height: self.carpet_height,
            peak_count_lognormal: (self.peak_mu, self.peak_sigma),
            peak_count_range: (self.min_peaks, self.max_peaks),
            height_factor_range: (self.min_height, self.max_height),
            width_fraction_range: (self.min_width, self.max_width),
            seed,
        }
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub synth: SynthArgs,
}

/// Either a number of seconds or `off`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeBudget(pub Option<Duration>);

fn parse_time_budget(s: &str) -> Result<TimeBudget, String> {
    if s == "off" {
        return Ok(TimeBudget(None));
    }
    let secs: f64 = s
        .parse()
        .map_err(|_| format!("expected seconds or `off`, got `{s}`"))?;
    Duration::try_from_secs_f64(secs)
        .map(|d| TimeBudget(Some(d)))
        .map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
#[command(next_help_heading = "Genetic search")]
pub struct GaArgs {
    /// Survivors kept after each generation.
    #[arg(long, default_value_t = 100)]
    pub base_population: usize,
    /// Population size after offspring are added.
    #[arg(long, default_value_t = 300)]
    pub expanded_population: usize,
    /// Best individuals that always survive.
    #[arg(long, default_value_t = 10)]
    pub elite: usize,
    /// Chance that a non-elite survivor slot goes to a random individual.
    #[arg(long, default_value_t = 0.5)]
    pub survivor_exchange_p: f64,
    /// Chance that an offspring comes from crossover.
    #[arg(long, default_value_t = 0.5)]
    pub crossover_p: f64,
    /// Chance of each of the four mutation operators.
    #[arg(long, default_value_t = 0.125)]
    pub per_mutation_p: f64,
    /// Wall-clock limit in seconds, or `off`.
    #[arg(long, default_value = "10", value_parser = parse_time_budget)]
    pub time_budget: TimeBudget,
    /// Stop after this many generations.
    #[arg(long)]
    pub max_generations: Option<u64>,
    /// Independent populations run in parallel [default: available cores].
    #[arg(long)]
    pub islands: Option<usize>,
}

impl GaArgs {
    pub fn config(&self, seed: u64) -> GaConfig {
        let defaults = GaConfig::default();
        GaConfig {
            base_population: self.base_population,
            expanded_population: self.expanded_population,
            elite: self.elite,
            survivor_exchange_p: self.survivor_exchange_p,
            crossover_p: self.crossover_p,
            per_mutation_p: self.per_mutation_p,
            time_budget: self.time_budget.0,
            max_generations: self.max_generations,
            islands: self.islands.unwrap_or(defaults.islands),
            seed,
        }
    }
}

#[derive(Debug, Args)]
pub struct PlaceArgs {
    /// Distribution file.
    pub dist: PathBuf,
    /// uniform, uniform-snapped, dp, exhaustive or genetic.
    #[arg(long)]
    pub method: Method,
    /// Number of checkpoints.
    #[arg(short, long)]
    pub k: usize,
    /// Snap uniform checkpoints onto the next fault step.
    #[arg(long)]
    pub snap: bool,
    /// Largest number of plans the exhaustive method may enumerate.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
    pub budget: u64,
    /// Write `generation,best,median` rows of the genetic search here.
    #[arg(long, value_name = "FILE")]
    pub trace_fitness: Option<PathBuf>,
    #[command(flatten)]
    pub ga: GaArgs,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Distribution file.
    pub dist: PathBuf,
    /// Checkpoint times, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub plan: Vec<u64>,
    /// Snap the plan onto fault steps before evaluating.
    #[arg(long)]
    pub snap: bool,
}

#[derive(Debug, Args)]
pub struct WfftArgs {
    /// Distribution file.
    pub dist: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExportIlpArgs {
    /// Distribution file.
    pub dist: PathBuf,
    #[arg(short, long)]
    pub k: usize,
}

#[derive(Debug, Args)]
pub struct ImportSolArgs {
    /// Distribution file the model was built from.
    pub dist: PathBuf,
    /// Solver output with one `<name> <value>` per line.
    pub solution: PathBuf,
    #[arg(short, long)]
    pub k: usize,
}

#[derive(Debug, Args)]
#[command(next_help_heading = "Cache")]
pub struct CacheArgs {
    /// Total cache size in bytes.
    #[arg(long, default_value_t = 4096)]
    pub size: u64,
    #[arg(long, default_value_t = 4)]
    pub ways: u64,
    /// Line size in bytes.
    #[arg(long, default_value_t = 64)]
    pub line: u64,
    /// Faults planned per miss.
    #[arg(long, default_value_t = 1)]
    pub weight: u64,
    /// Accesses to simulate: `data` or `instruction`.
    #[arg(long, default_value = "data")]
    pub filter: AccessFilter,
}

impl CacheArgs {
    pub fn config(&self) -> CacheConfig {
        CacheConfig {
            total_size: self.size,
            associativity: self.ways,
            line_size: self.line,
            weight_per_miss: self.weight,
            filter: self.filter,
        }
    }
}

#[derive(Debug, Args)]
pub struct CachesimArgs {
    /// Access trace, one `<I|R|W> <hex-address> <size>` per line.
    pub trace: PathBuf,
    #[command(flatten)]
    pub cache: CacheArgs,
}

/// Seeds given as a half-open range `a..b` or a comma list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedList(pub Vec<u64>);

fn parse_seeds(s: &str) -> Result<SeedList, String> {
    let bad = |_| format!("expected `a..b` or a comma list, got `{s}`");
    if let Some((a, b)) = s.split_once("..") {
        let (a, b): (u64, u64) = (a.parse().map_err(bad)?, b.parse().map_err(bad)?);
        return Ok(SeedList((a..b).collect()));
    }
    s.split(',')
        .map(|x| x.trim().parse().map_err(bad))
        .collect::<Result<_, _>>()
        .map(SeedList)
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Distribution files.
    #[arg(long = "dist", value_name = "FILE")]
    pub dists: Vec<PathBuf>,
    /// Synthetic distribution seeds, `a..b` or a comma list.
    #[arg(long, value_parser = parse_seeds)]
    pub synth_seeds: Option<SeedList>,
    /// Access traces turned into cache-miss distributions.
    #[arg(long = "trace", value_name = "FILE")]
    pub traces: Vec<PathBuf>,
    /// Methods to run, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 0.., required = true)]
    pub methods: Vec<Method>,
    /// Checkpoint counts, comma separated.
    #[arg(short, long = "k", value_delimiter = ',', num_args = 1.., required = true)]
    pub ks: Vec<usize>,
    /// Largest number of plans the exhaustive method may enumerate.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
    pub budget: u64,
    /// Report elapsed_ms as 0 so repeated runs give identical output.
    #[arg(long)]
    pub no_timing: bool,
    #[command(flatten)]
    pub synth: SynthArgs,
    #[command(flatten)]
    pub cache: CacheArgs,
    #[command(flatten)]
    pub ga: GaArgs,
}
