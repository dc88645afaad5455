//! Path-flow ILP over the step DAG, LP-file export and solution import.
//!
//! Node `v0` is the reset at `t_start`, `v1..v{n-1}` are the candidate steps
//! and `v{n}` is an exit at `t_end`. Every arc `e_i_j` with `i < j` is a binary
//! variable weighted by the rectangle area `(s_j - s_i) * P(s_j)`; arcs into the
//! exit weigh zero. Selecting exactly `k + 2` nodes, with flow conservation on
//! the inner nodes and one arc leaving the entry and one reaching the exit,
//! forces a path with `k` checkpoints.

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use crate::distribution::{CheckpointPlan, FaultDistribution};
use crate::error::{Error, Result};

const INTEGRALITY_TOLERANCE: f64 = 1e-6;
const TERMS_PER_LINE: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Node(usize),
    Arc(usize, usize),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Node(t) => write!(f, "v{t}"),
            Var::Arc(i, j) => write!(f, "e_{i}_{j}"),
        }
    }
}

impl std::str::FromStr for Var {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        if let Some(rest) = s.strip_prefix("e_") {
            let (i, j) = rest.split_once('_').ok_or(())?;
            Ok(Var::Arc(i.parse().map_err(drop)?, j.parse().map_err(drop)?))
        } else if let Some(t) = s.strip_prefix('v') {
            Ok(Var::Node(t.parse().map_err(drop)?))
        } else {
            Err(())
        }
    }
}

/// `Σ coeff · var = rhs`. Every constraint of this model is an equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(Var, i64)>,
    pub rhs: i64,
}

impl Constraint {
    fn satisfied_by(&self, value: impl Fn(Var) -> i64) -> bool {
        self.terms.iter().map(|&(v, c)| c * value(v)).sum::<i64>() == self.rhs
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IlpModel {
    k: usize,
    times: Vec<u64>,
    heights: Vec<u64>,
    constraints: Vec<Constraint>,
}

pub fn build_ilp(d: &FaultDistribution, k: usize) -> Result<IlpModel> {
    IlpModel::build(d, k)
}

impl IlpModel {
    pub fn build(d: &FaultDistribution, k: usize) -> Result<Self> {
        let g = d.step_graph();
        let steps = g.inner();
        if steps == 0 {
            return Err(Error::Parameter("no candidate steps to select from".into()));
        }
        if k > steps {
            return Err(Error::Parameter(format!(
                "k = {k} exceeds the {steps} candidate steps"
            )));
        }
        let n = g.exit();
        let mut constraints = vec![
            Constraint {
                name: "card".into(),
                terms: (0..=n).map(|t| (Var::Node(t), 1)).collect(),
                rhs: k as i64 + 2,
            },
            Constraint {
                name: "entry".into(),
                terms: vec![(Var::Node(0), 1)],
                rhs: 1,
            },
            Constraint {
                name: "exit".into(),
                terms: vec![(Var::Node(n), 1)],
                rhs: 1,
            },
            Constraint {
                name: "source".into(),
                terms: (1..=n).map(|j| (Var::Arc(0, j), 1)).collect(),
                rhs: 1,
            },
            Constraint {
                name: "sink".into(),
                terms: (0..n).map(|i| (Var::Arc(i, n), 1)).collect(),
                rhs: 1,
            },
        ];
        for t in 1..n {
            let mut incoming: Vec<(Var, i64)> = (0..t).map(|i| (Var::Arc(i, t), 1)).collect();
            incoming.push((Var::Node(t), -1));
            constraints.push(Constraint {
                name: format!("in_{t}"),
                terms: incoming,
                rhs: 0,
            });
            let mut outgoing: Vec<(Var, i64)> = (t + 1..=n).map(|j| (Var::Arc(t, j), 1)).collect();
            outgoing.push((Var::Node(t), -1));
            constraints.push(Constraint {
                name: format!("out_{t}"),
                terms: outgoing,
                rhs: 0,
            });
        }
        Ok(IlpModel {
            k,
            times: g.times,
            heights: g.heights,
            constraints,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Index of the exit node.
    pub fn exit(&self) -> usize {
        self.times.len() - 1
    }

    /// Time of node `t`.
    pub fn node_time(&self, t: usize) -> u64 {
        self.times[t]
    }

    pub fn weight(&self, i: usize, j: usize) -> u64 {
        (self.times[j] - self.times[i]) * self.heights[j]
    }

    pub fn node_vars(&self) -> impl Iterator<Item = Var> {
        (0..=self.exit()).map(Var::Node)
    }

    pub fn arc_vars(&self) -> impl Iterator<Item = Var> {
        let n = self.exit();
        (0..n).flat_map(move |i| (i + 1..=n).map(move |j| Var::Arc(i, j)))
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.node_vars().chain(self.arc_vars())
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// `(arc, weight)` pairs of the maximization objective.
    pub fn objective(&self) -> impl Iterator<Item = (Var, u64)> + '_ {
        self.arc_vars().map(|v| match v {
            Var::Arc(i, j) => (v, self.weight(i, j)),
            Var::Node(_) => unreachable!(),
        })
    }

    fn contains(&self, v: Var) -> bool {
        let n = self.exit();
        match v {
            Var::Node(t) => t <= n,
            Var::Arc(i, j) => i < j && j <= n,
        }
    }

    /// First violated constraint under `value`, if any.
    pub fn violated(&self, value: impl Fn(Var) -> i64) -> Option<&Constraint> {
        self.constraints.iter().find(|c| !c.satisfied_by(&value))
    }

    pub fn objective_value(&self, value: impl Fn(Var) -> i64) -> u64 {
        self.objective().map(|(v, w)| w * value(v) as u64).sum()
    }

    /// Exact optimum of a small model by enumerating every node selection
    /// with `k` inner nodes, deriving its arc assignment, and checking all
    /// constraints. Returns the best objective and its inner nodes.
    pub fn brute_force_optimum(&self) -> Option<(u64, Vec<usize>)> {
        let n = self.exit();
        let inner = n - 1;
        assert!(inner < 32, "model too large to enumerate");
        let mut best: Option<(u64, Vec<usize>)> = None;
        for mask in 0u64..(1u64 << inner) {
            if mask.count_ones() as usize != self.k {
                continue;
            }
            let mut path = vec![0];
            path.extend((1..n).filter(|t| mask & (1 << (t - 1)) != 0));
            path.push(n);
            let value = |v: Var| -> i64 {
                match v {
                    Var::Node(t) => path.contains(&t) as i64,
                    Var::Arc(i, j) => path.windows(2).any(|w| w[0] == i && w[1] == j) as i64,
                }
            };
            if self.violated(value).is_some() {
                continue;
            }
            let obj = self.objective_value(value);
            if best.as_ref().map_or(true, |(b, _)| obj > *b) {
                best = Some((obj, path[1..path.len() - 1].to_vec()));
            }
        }
        best
    }

    /// CPLEX-style LP text. Identical models produce identical bytes.
    pub fn emit_lp(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "\\ checkpoint selection: k={} steps={} nodes={}",
            self.k,
            self.exit() - 1,
            self.exit() + 1
        );
        out.push_str("Maximize\n");
        let objective: Vec<(Var, i64)> = self
            .objective()
            .filter(|&(_, w)| w > 0)
            .map(|(v, w)| (v, w as i64))
            .collect();
        if objective.is_empty() {
            out.push_str(" obj: 0 v0\n");
        } else {
            write_expr(&mut out, "obj", &objective);
            out.push('\n');
        }
        out.push_str("Subject To\n");
        for c in &self.constraints {
            write_expr(&mut out, &c.name, &c.terms);
            let _ = writeln!(out, " = {}", c.rhs);
        }
        out.push_str("Binaries\n");
        let vars: Vec<String> = self.vars().map(|v| v.to_string()).collect();
        for chunk in vars.chunks(TERMS_PER_LINE) {
            let _ = writeln!(out, " {}", chunk.join(" "));
        }
        out.push_str("End\n");
        out
    }

    /// Reads a `<name> <value>` solution dump and returns the selected plan.
    pub fn parse_solution(&self, text: &str) -> Result<CheckpointPlan> {
        let mut values: HashMap<Var, i64> = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            let (Some(name), Some(value), None) = (fields.next(), fields.next(), fields.next())
            else {
                return Err(Error::parse(
                    line_no,
                    format!("expected `<name> <value>`, got `{line}`"),
                ));
            };
            let var: Var = name
                .parse()
                .ok()
                .filter(|&v| self.contains(v))
                .ok_or_else(|| Error::parse(line_no, format!("unknown variable `{name}`")))?;
            let value: f64 = value
                .parse()
                .map_err(|e| Error::parse(line_no, format!("bad value for `{name}`: {e}")))?;
            let rounded = value.round();
            if (value - rounded).abs() > INTEGRALITY_TOLERANCE {
                return Err(Error::parse(
                    line_no,
                    format!("`{name}` = {value} is not integral"),
                ));
            }
            if rounded != 0.0 && rounded != 1.0 {
                return Err(Error::parse(
                    line_no,
                    format!("`{name}` = {value} is not binary"),
                ));
            }
            if values.insert(var, rounded as i64).is_some() {
                return Err(Error::parse(line_no, format!("`{name}` assigned twice")));
            }
        }

        let value = |v: Var| values.get(&v).copied().unwrap_or(0);
        if let Some(c) = self.violated(value) {
            return Err(Error::Inconsistent(format!(
                "constraint `{}` is violated",
                c.name
            )));
        }

        // follow the selected arcs from the entry to the exit
        let n = self.exit();
        let mut node = 0;
        let mut inner = Vec::new();
        while node != n {
            node = (node + 1..=n)
                .find(|&j| value(Var::Arc(node, j)) == 1)
                .ok_or_else(|| Error::Inconsistent(format!("path stops at v{node}")))?;
            if node != n {
                inner.push(node);
            }
        }
        let selected: Vec<usize> = (1..n).filter(|&t| value(Var::Node(t)) == 1).collect();
        if selected != inner {
            return Err(Error::Inconsistent(
                "selected nodes do not form a single entry-to-exit path".into(),
            ));
        }
        CheckpointPlan::new(inner.iter().map(|&t| self.times[t]).collect())
    }
}

fn write_expr(out: &mut String, name: &str, terms: &[(Var, i64)]) {
    let _ = write!(out, " {name}:");
    for (i, &(var, coeff)) in terms.iter().enumerate() {
        if i > 0 && i % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if coeff < 0 { '-' } else { '+' };
        match (i, coeff.unsigned_abs()) {
            (0, 1) if coeff > 0 => {
                let _ = write!(out, " {var}");
            }
            (0, c) if coeff > 0 => {
                let _ = write!(out, " {c} {var}");
            }
            (_, 1) => {
                let _ = write!(out, " {sign} {var}");
            }
            (_, c) => {
                let _ = write!(out, " {sign} {c} {var}");
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> FaultDistribution {
        FaultDistribution::new([(0, 2), (1, 1), (3, 1)], 0, 4).unwrap()
    }

    #[test]
    fn structure() {
        let m = build_ilp(&tiny(), 1).unwrap();
        assert_eq!(m.exit(), 3);
        assert_eq!(m.arc_vars().count(), 3 * 4 / 2);
        assert_eq!(m.weight(0, 2), (m.node_time(2) - m.node_time(0)) * 1);
        assert_eq!(m.weight(0, 2), 3);
        assert!((0..3).all(|i| m.weight(i, 3) == 0));
        assert_eq!(m.constraints().len(), 5 + 2 * 2);
    }

    #[test]
    fn parameter_errors() {
        assert!(matches!(build_ilp(&tiny(), 3), Err(Error::Parameter(_))));
        let flat = FaultDistribution::new([(0, 5)], 0, 2).unwrap();
        assert!(build_ilp(&flat, 0).is_err());
    }

    #[test]
    fn feasible_node_sets_of_four_node_example() {
        let m = build_ilp(&tiny(), 1).unwrap();
        let mut feasible = Vec::new();
        for mask in 0u32..16 {
            let nodes: Vec<usize> = (0..4).filter(|t| mask & (1 << t) != 0).collect();
            // consecutive arcs are the only assignment that can satisfy flow
            let value = |v: Var| match v {
                Var::Node(t) => nodes.contains(&t) as i64,
                Var::Arc(i, j) => nodes.windows(2).any(|w| w == [i, j]) as i64,
            };
            if m.violated(value).is_none() {
                feasible.push(nodes);
            }
        }
        assert_eq!(feasible, vec![vec![0, 1, 3], vec![0, 2, 3]]);
        assert_eq!(m.brute_force_optimum(), Some((3, vec![2])));
    }

    #[test]
    fn var_names_round_trip() {
        for v in [Var::Node(0), Var::Node(17), Var::Arc(3, 12)] {
            assert_eq!(v.to_string().parse::<Var>(), Ok(v));
        }
        assert!("x1".parse::<Var>().is_err());
        assert!("e_1".parse::<Var>().is_err());
    }

    #[test]
    fn solution_import() {
        let m = build_ilp(&tiny(), 1).unwrap();
        let sol = "# solution\nv0 1\nv2 1\nv3 1\ne_0_2 1\ne_2_3 1\nv1 0\n";
        assert_eq!(m.parse_solution(sol).unwrap().times(), &[3]);

        let tolerant = "v0 0.9999999\nv2 1\nv3 1\ne_0_2 1.0000001\ne_2_3 1\n";
        assert_eq!(m.parse_solution(tolerant).unwrap().times(), &[3]);

        assert!(matches!(m.parse_solution(""), Err(Error::Inconsistent(_))));
        assert!(matches!(
            m.parse_solution("v0 0\nv1 0\nv2 0\nv3 0\n"),
            Err(Error::Inconsistent(_))
        ));
        assert!(matches!(
            m.parse_solution("v1 0.5\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            m.parse_solution("v9 1\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            m.parse_solution("v0 2\n"),
            Err(Error::Parse { .. })
        ));
        // node set fine, arcs skip the selected node
        let broken = "v0 1\nv2 1\nv3 1\ne_0_3 1\n";
        assert!(matches!(
            m.parse_solution(broken),
            Err(Error::Inconsistent(_))
        ));
    }
}
