mod common;

use std::collections::HashMap;

use ckptsel::ilp::{build_ilp, Var};
use ckptsel::{dp_placement, exhaustive_placement, Error, FaultDistribution};
use lp_parser_rs::model::{ComparisonOp, Constraint, Sense, VariableKind};
use lp_parser_rs::problem::LpProblem;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tiny() -> FaultDistribution {
    FaultDistribution::new([(0, 2), (1, 1), (3, 1)], 0, 4).unwrap()
}

#[test]
fn tiny_model_matches_golden_file() {
    let golden = include_str!("data/tiny_k1.lp");
    assert_eq!(build_ilp(&tiny(), 1).unwrap().emit_lp(), golden);
}

#[test]
fn emission_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let d = common::random_distribution(&mut rng, 30);
        let k = d.candidate_steps().len().min(3);
        let a = build_ilp(&d, k).unwrap().emit_lp();
        let b = build_ilp(&d.clone(), k).unwrap().emit_lp();
        assert_eq!(a, b);
    }
}

#[test]
fn agrees_with_dp_and_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..60 {
        let d = common::random_distribution(&mut rng, 15);
        let m = d.candidate_steps().len();
        for k in 0..=m.min(4) {
            let model = build_ilp(&d, k).unwrap();
            let (ilp, inner) = model.brute_force_optimum().unwrap();
            assert_eq!(ilp, dp_placement(&d, k).report.saved);
            assert_eq!(ilp, exhaustive_placement(&d, k).unwrap().report.saved);
            assert_eq!(inner.len(), k);
        }
    }
}

/// Every node selection of size k + 2 with both ends admits exactly one arc
/// assignment satisfying all constraints.
#[test]
fn node_selection_fixes_the_arcs() {
    let d = FaultDistribution::new([(0, 1), (2, 3), (3, 1), (5, 2)], 0, 7).unwrap();
    for k in 0..=3 {
        let model = build_ilp(&d, k).unwrap();
        let n = model.exit();
        let arcs: Vec<Var> = model.arc_vars().collect();
        assert_eq!(arcs.len(), n * (n + 1) / 2);
        for mask in 0u32..(1 << (n - 1)) {
            if mask.count_ones() as usize != k {
                continue;
            }
            let node_on = |t: usize| t == 0 || t == n || mask & (1 << (t - 1)) != 0;
            let mut consistent = 0;
            for arc_mask in 0u64..(1 << arcs.len()) {
                let value = |v: Var| -> i64 {
                    match v {
                        Var::Node(t) => node_on(t) as i64,
                        Var::Arc(..) => {
                            let idx = arcs.iter().position(|&a| a == v).unwrap();
                            (arc_mask >> idx & 1) as i64
                        }
                    }
                };
                if model.violated(value).is_none() {
                    consistent += 1;
                }
            }
            assert_eq!(consistent, 1, "k={k} nodes={mask:b}");
        }
    }
}

#[test]
fn paper_example_feasible_sets() {
    let model = build_ilp(&tiny(), 1).unwrap();
    let feasible = |nodes: &[usize]| {
        let value = |v: Var| match v {
            Var::Node(t) => nodes.contains(&t) as i64,
            Var::Arc(i, j) => nodes.windows(2).any(|w| w == [i, j]) as i64,
        };
        model.violated(value).is_none()
    };
    assert!(feasible(&[0, 1, 3]));
    assert!(feasible(&[0, 2, 3]));
    assert!(!feasible(&[0, 1, 2, 3]));
    assert!(!feasible(&[0, 3]));
}

/// Reads the emitted LP back with an independent parser and checks that it
/// describes the same model.
#[test]
fn large_model_parses_as_the_same_ilp() {
    let counts: Vec<u64> = (0..100).map(|t| 1 + (t * 37 % 11)).collect();
    let d = FaultDistribution::from_counts(&counts, 0).unwrap();
    let model = build_ilp(&d, 8).unwrap();
    let text = model.emit_lp();
    let problem = LpProblem::parse(&text).unwrap();

    assert_eq!(problem.sense, Sense::Maximize);
    assert_eq!(problem.variable_count(), model.vars().count());
    for (id, var) in &problem.variables {
        let name = problem.resolve(*id);
        assert_eq!(var.kind, VariableKind::Binary, "{name}");
        assert!(name.parse::<Var>().is_ok(), "{name}");
    }

    let (_, objective) = problem.objectives.first().unwrap();
    let parsed: HashMap<&str, f64> = objective
        .coefficients
        .iter()
        .map(|c| (problem.resolve(c.name), c.value))
        .collect();
    for (var, w) in model.objective() {
        let got = parsed.get(var.to_string().as_str()).copied().unwrap_or(0.0);
        assert_eq!(got, w as f64, "{var}");
    }

    assert_eq!(problem.constraint_count(), model.constraints().len());
    for c in model.constraints() {
        let id = problem.name_id(&c.name).unwrap();
        let Constraint::Standard {
            coefficients,
            operator,
            rhs,
            ..
        } = &problem.constraints[&id]
        else {
            panic!("{} is not a linear constraint", c.name);
        };
        assert_eq!(*operator, ComparisonOp::EQ);
        assert_eq!(*rhs, c.rhs as f64);
        let parsed: Vec<(String, f64)> = coefficients
            .iter()
            .map(|t| (problem.resolve(t.name).to_string(), t.value))
            .collect();
        let expected: Vec<(String, f64)> = c
            .terms
            .iter()
            .map(|&(v, coeff)| (v.to_string(), coeff as f64))
            .collect();
        assert_eq!(parsed, expected, "{}", c.name);
    }
}

#[test]
fn solution_import_roundtrip() {
    let d = tiny();
    let model = build_ilp(&d, 1).unwrap();
    let sol = "v0 1\nv1 0\nv2 1\nv3 1\ne_0_2 1\ne_2_3 1.0000000001\ne_0_1 0\n";
    let plan = model.parse_solution(sol).unwrap();
    assert_eq!(plan.times(), &[3]);
    assert_eq!(d.savings(&plan).unwrap().saved, 3);

    let broken = "v0 1\nv1 1\nv2 1\nv3 1\ne_0_2 1\ne_2_3 1\n";
    assert!(matches!(
        model.parse_solution(broken),
        Err(Error::Inconsistent(_))
    ));
    assert!(matches!(
        model.parse_solution("v0 0.5\n"),
        Err(Error::Parse { .. })
    ));
    assert!(matches!(
        model.parse_solution("x7 1\n"),
        Err(Error::Parse { .. })
    ));
}
