//! `compare`: every (distribution, method, k) cell of an experiment, one row
//! each, in the order given.

use std::path::PathBuf;

use ckptsel::cachesim::CacheConfig;
use ckptsel::genetic::genetic_placement;
use ckptsel::placement::{exhaustive_placement_with_budget, snapped_uniform_placement};
use ckptsel::synth::{generate, SynthParams};
use ckptsel::{dp_placement, uniform_placement, wfft, FaultDistribution, GaConfig, Method};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{CompareArgs, Format, Global};
use crate::commands::{check_savings, emit, load, load_trace, to_json, validate_ga, Result};
use crate::error::{flag, CliError, EXIT_BUDGET, EXIT_USAGE};

#[derive(Debug, Clone)]
pub enum Source {
    File(PathBuf),
    Synth(SynthParams),
    Trace(PathBuf, CacheConfig),
}

impl Source {
    fn id(&self) -> String {
        match self {
            Source::File(p) => p.display().to_string(),
            Source::Synth(p) => format!("synth-{}", p.seed),
            Source::Trace(p, _) => format!("cachesim:{}", p.display()),
        }
    }

    fn load(&self) -> Result<FaultDistribution> {
        match self {
            Source::File(p) => load(p),
            Source::Synth(p) => Ok(generate(p)?),
            Source::Trace(p, cfg) => load_trace(p, cfg),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub sources: Vec<Source>,
    pub methods: Vec<Method>,
    pub ks: Vec<usize>,
    pub ga: GaConfig,
    pub budget: u64,
    pub timing: bool,
}

impl ExperimentSpec {
    pub fn from_args(g: &Global, a: &CompareArgs) -> Result<Self> {
        let mut sources: Vec<Source> = a.dists.iter().cloned().map(Source::File).collect();
        for &seed in a.synth_seeds.iter().flat_map(|s| &s.0) {
            sources.push(Source::Synth(a.synth.params(seed)));
        }
        let cache = a.cache.config();
        sources.extend(
            a.traces
                .iter()
                .map(|p| Source::Trace(p.clone(), cache.clone())),
        );
        let spec = ExperimentSpec {
            sources,
            methods: a.methods.clone(),
            ks: a.ks.clone(),
            ga: a.ga.config(g.seed),
            budget: a.budget,
            timing: !a.no_timing,
        };
        spec.validate(a)?;
        Ok(spec)
    }

    fn validate(&self, a: &CompareArgs) -> Result<()> {
        let usage = |m: &str| Err(CliError::Usage(m.into()));
        if self.methods.is_empty() {
            return usage("--methods: need at least one method");
        }
        if self.ks.is_empty() {
            return usage("-k: need at least one checkpoint count");
        }
        if self.sources.is_empty() {
            return usage("need at least one of --dist, --synth-seeds, --trace");
        }
        for s in &self.sources {
            match s {
                Source::File(p) | Source::Trace(p, _) if !p.is_file() => {
                    return usage(&format!("{}: no such file", p.display()));
                }
                _ => {}
            }
        }
        if a.synth_seeds.is_some() {
            a.synth
                .params(0)
                .validate()
                .map_err(flag("synthetic parameters"))?;
        }
        if !a.traces.is_empty() {
            a.cache
                .config()
                .validate()
                .map_err(flag("--size/--ways/--line/--weight"))?;
        }
        if self.methods.contains(&Method::Genetic) {
            validate_ga(&self.ga)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub dist_id: String,
    pub method: Method,
    pub k: usize,
    pub saved: Option<u64>,
    pub baseline: Option<u64>,
    pub reduction: Option<f64>,
    pub wfft: Option<f64>,
    pub elapsed_ms: Option<f64>,
    pub error: Option<String>,
    #[serde(skip)]
    code: u8,
}

struct Loaded {
    id: String,
    dist: std::result::Result<(FaultDistribution, f64), String>,
}

fn run_cell(
    spec: &ExperimentSpec,
    d: &FaultDistribution,
    method: Method,
    k: usize,
) -> Result<(u64, u64, f64, f64)> {
    let result = match method {
        Method::Uniform => uniform_placement(d, k),
        Method::UniformSnapped => snapped_uniform_placement(d, k),
        Method::Dp => dp_placement(d, k),
        Method::Exhaustive => exhaustive_placement_with_budget(d, k, spec.budget)?,
        Method::Genetic => genetic_placement(d, k, &spec.ga)?,
    };
    check_savings(d, &result)?;
    let elapsed = if spec.timing {
        result.elapsed.as_secs_f64() * 1e3
    } else {
        0.0
    };
    Ok((
        result.report.saved,
        result.report.baseline,
        result.report.reduction,
        elapsed,
    ))
}

pub fn rows(spec: &ExperimentSpec) -> Vec<Row> {
    let loaded: Vec<Loaded> = spec
        .sources
        .par_iter()
        .map(|s| Loaded {
            id: s.id(),
            dist: s
                .load()
                .map(|d| {
                    let score = wfft(&d).value;
                    (d, score)
                })
                .map_err(|e| e.to_string()),
        })
        .collect();

    let cells: Vec<(&Loaded, Method, usize)> = loaded
        .iter()
        .flat_map(|l| {
            spec.methods
                .iter()
                .flat_map(move |&m| spec.ks.iter().map(move |&k| (l, m, k)))
        })
        .collect();

    cells
        .par_iter()
        .map(|&(l, method, k)| {
            let mut row = Row {
                dist_id: l.id.clone(),
                method,
                k,
                saved: None,
                baseline: None,
                reduction: None,
                wfft: None,
                elapsed_ms: None,
                error: None,
                code: 0,
            };
            let outcome = match &l.dist {
                Err(e) => Err((e.clone(), EXIT_USAGE)),
                Ok((d, score)) => {
                    row.wfft = Some(*score);
                    run_cell(spec, d, method, k).map_err(|e| (e.to_string(), e.exit_code()))
                }
            };
            match outcome {
                Ok((saved, baseline, reduction, elapsed)) => {
                    eprintln!("compare: {} {method} k={k} saved={saved}", l.id);
                    row.saved = Some(saved);
                    row.baseline = Some(baseline);
                    row.reduction = Some(reduction);
                    row.elapsed_ms = Some(elapsed);
                }
                Err((msg, code)) => {
                    eprintln!("compare: {} {method} k={k} failed: {msg}", l.id);
                    row.error = Some(msg);
                    row.code = code;
                }
            }
            row
        })
        .collect()
}

const HEADER: [&str; 9] = [
    "dist_id",
    "method",
    "k",
    "saved",
    "baseline",
    "reduction",
    "wfft",
    "elapsed_ms",
    "error",
];

pub fn to_csv(rows: &[Row]) -> String {
    fn cell<T: ToString>(v: &Option<T>) -> String {
        v.as_ref().map_or(String::new(), T::to_string)
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(HEADER).expect("in-memory write");
    for r in rows {
        w.write_record([
            r.dist_id.clone(),
            r.method.to_string(),
            r.k.to_string(),
            cell(&r.saved),
            cell(&r.baseline),
            cell(&r.reduction),
            cell(&r.wfft),
            cell(&r.elapsed_ms),
            cell(&r.error),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv of utf-8 fields")
}

pub fn run(g: &Global, a: &CompareArgs) -> Result<()> {
    let spec = ExperimentSpec::from_args(g, a)?;
    let rows = rows(&spec);
    let text = match g.format(Format::Csv) {
        Format::Csv => to_csv(&rows),
        Format::Json => to_json(&rows),
    };
    emit(&g.out, &text)?;
    if rows.iter().all(|r| r.error.is_some()) {
        let code = if rows.iter().all(|r| r.code == EXIT_BUDGET) {
            EXIT_BUDGET
        } else {
            EXIT_USAGE
        };
        return Err(CliError::AllRowsFailed {
            rows: rows.len(),
            code,
        });
    }
    Ok(())
}
