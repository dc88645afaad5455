use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ckptsel::cachesim::{simulate, AccessTrace, CacheConfig};
use ckptsel::format::{read_distribution_file, write_distribution};
use ckptsel::genetic::genetic_search;
use ckptsel::ilp::build_ilp;
use ckptsel::placement::{
    exhaustive_placement_with_budget, snapped_uniform_placement, PlacementSummary,
};
use ckptsel::synth::generate;
use ckptsel::{
    dp_placement, uniform_placement, wfft, CheckpointPlan, FaultDistribution, GaConfig, Method,
    PlacementResult,
};
use serde::Serialize;

use crate::args::*;
use crate::compare;
use crate::error::{flag, input, CliError};

pub type Result<T, E = CliError> = std::result::Result<T, E>;

pub fn run(cli: Cli) -> Result<()> {
    let g = &cli.global;
    match &cli.command {
        Command::Gen(a) => gen(g, a),
        Command::Place(a) => place(g, a),
        Command::Eval(a) => eval(g, a),
        Command::Wfft(a) => score(g, a),
        Command::ExportIlp(a) => export_ilp(g, a),
        Command::ImportSol(a) => import_sol(g, a),
        Command::Cachesim(a) => cachesim(g, a),
        Command::Compare(a) => compare::run(g, a),
    }
}

pub fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Output {
            path: path.clone(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn to_json(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn load(path: &Path) -> Result<FaultDistribution> {
    read_distribution_file(path).map_err(input(path))
}

pub fn load_trace(path: &Path, cfg: &CacheConfig) -> Result<FaultDistribution> {
    let trace = AccessTrace::read_file(path).map_err(input(path))?;
    simulate(&trace, cfg).map_err(input(path))
}

/// Saved cycles must agree with the fault-by-fault oracle.
pub fn check_savings(d: &FaultDistribution, result: &PlacementResult) -> Result<()> {
    let oracle = d.oracle_savings(&result.plan)?;
    if oracle != result.report.saved {
        return Err(CliError::Invariant(format!(
            "{} plan saves {} by rectangles but {oracle} fault by fault",
            result.method, result.report.saved
        )));
    }
    Ok(())
}

pub fn validate_ga(cfg: &GaConfig) -> Result<()> {
    cfg.validate().map_err(flag(
        "--base-population/--expanded-population/--elite/--*-p/--islands/--time-budget/--max-generations",
    ))
}

fn gen(g: &Global, a: &GenArgs) -> Result<()> {
    let params = a.synth.params(g.seed);
    let d = generate(&params).map_err(flag("synthetic parameters"))?;
    emit(&g.out, &write_distribution(&d, &params.provenance()))
}

fn summary_csv(s: &PlacementSummary) -> String {
    let plan: Vec<String> = s.plan.iter().map(u64::to_string).collect();
    format!(
        "method,k,plan,saved,baseline,reduction,elapsed_ms\n{},{},{},{},{},{},{}\n",
        s.method,
        s.k,
        plan.join(" "),
        s.saved,
        s.baseline,
        s.reduction,
        s.elapsed_ms
    )
}

fn place(g: &Global, a: &PlaceArgs) -> Result<()> {
    let method = match (a.method, a.snap) {
        (Method::Uniform, true) => Method::UniformSnapped,
        (m, true) if m != Method::UniformSnapped => {
            return Err(CliError::Usage(
                "--snap applies to --method uniform only".into(),
            ))
        }
        (m, _) => m,
    };
    if a.trace_fitness.is_some() && method != Method::Genetic {
        return Err(CliError::Usage(
            "--trace-fitness requires --method genetic".into(),
        ));
    }
    let d = load(&a.dist)?;
    let result = match method {
        Method::Uniform => uniform_placement(&d, a.k),
        Method::UniformSnapped => snapped_uniform_placement(&d, a.k),
        Method::Dp => dp_placement(&d, a.k),
        Method::Exhaustive => exhaustive_placement_with_budget(&d, a.k, a.budget)?,
        Method::Genetic => {
            let cfg = a.ga.config(g.seed);
            validate_ga(&cfg)?;
            let outcome = genetic_search(&d, a.k, &cfg)?;
            if let Some(path) = &a.trace_fitness {
                let mut rows = String::from("generation,best,median\n");
                for s in &outcome.trace {
                    let _ = writeln!(rows, "{},{},{}", s.generation, s.best, s.median);
                }
                emit(&Some(path.clone()), &rows)?;
            }
            outcome.result
        }
    };
    check_savings(&d, &result)?;
    let summary = result.summary();
    match g.format(Format::Json) {
        Format::Json => emit(&g.out, &to_json(&summary)),
        Format::Csv => emit(&g.out, &summary_csv(&summary)),
    }
}

fn eval(g: &Global, a: &EvalArgs) -> Result<()> {
    let d = load(&a.dist)?;
    let mut plan = CheckpointPlan::new(a.plan.clone()).map_err(flag("--plan"))?;
    if a.snap {
        plan = d.snap_to_steps(&plan).map_err(flag("--plan"))?;
    }
    let report = d.savings(&plan).map_err(flag("--plan"))?;
    let oracle = d.oracle_savings(&plan)?;
    if oracle != report.saved {
        return Err(CliError::Invariant(format!(
            "plan saves {} by rectangles but {oracle} fault by fault",
            report.saved
        )));
    }
    #[derive(Serialize)]
    struct Evaluation<'a> {
        plan: &'a [u64],
        #[serde(flatten)]
        report: &'a ckptsel::SavingsReport,
    }
    match g.format(Format::Json) {
        Format::Json => emit(
            &g.out,
            &to_json(&Evaluation {
                plan: plan.times(),
                report: &report,
            }),
        ),
        Format::Csv => emit(&g.out, &report.to_csv()),
    }
}

fn score(g: &Global, a: &WfftArgs) -> Result<()> {
    let d = load(&a.dist)?;
    let s = wfft(&d);
    match g.format(Format::Json) {
        Format::Json => emit(&g.out, &to_json(&s)),
        Format::Csv => {
            let mut out = String::from("i,magnitude\n");
            for (i, m) in s.spectrum.iter().enumerate() {
                let _ = writeln!(out, "{i},{m}");
            }
            let _ = writeln!(out, "# wfft={}", s.value);
            emit(&g.out, &out)
        }
    }
}

fn export_ilp(g: &Global, a: &ExportIlpArgs) -> Result<()> {
    let d = load(&a.dist)?;
    let model = build_ilp(&d, a.k).map_err(flag("-k"))?;
    emit(&g.out, &model.emit_lp())
}

fn import_sol(g: &Global, a: &ImportSolArgs) -> Result<()> {
    let d = load(&a.dist)?;
    let model = build_ilp(&d, a.k).map_err(flag("-k"))?;
    let text = std::fs::read_to_string(&a.solution).map_err(|e| input(&a.solution)(e.into()))?;
    let plan = model.parse_solution(&text).map_err(input(&a.solution))?;
    let report = d.savings(&plan)?;

    #[derive(Serialize)]
    struct Imported<'a> {
        k: usize,
        plan: &'a [u64],
        saved: u64,
        baseline: u64,
        reduction: f64,
    }
    let imported = Imported {
        k: a.k,
        plan: plan.times(),
        saved: report.saved,
        baseline: report.baseline,
        reduction: report.reduction,
    };
    match g.format(Format::Json) {
        Format::Json => emit(&g.out, &to_json(&imported)),
        Format::Csv => {
            let times: Vec<String> = plan.times().iter().map(u64::to_string).collect();
            emit(
                &g.out,
                &format!(
                    "k,plan,saved,baseline,reduction\n{},{},{},{},{}\n",
                    a.k,
                    times.join(" "),
                    report.saved,
                    report.baseline,
                    report.reduction
                ),
            )
        }
    }
}

fn cachesim(g: &Global, a: &CachesimArgs) -> Result<()> {
    let cfg = a.cache.config();
    cfg.validate()
        .map_err(flag("--size/--ways/--line/--weight"))?;
    let d = load_trace(&a.trace, &cfg)?;
    let comments = vec![format!(
        "cachesim trace={} size={} ways={} line={} weight={} filter={:?}",
        a.trace.display(),
        cfg.total_size,
        cfg.associativity,
        cfg.line_size,
        cfg.weight_per_miss,
        cfg.filter
    )];
    emit(&g.out, &write_distribution(&d, &comments))
}
