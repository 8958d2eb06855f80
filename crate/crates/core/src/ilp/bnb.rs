//! Best-first branch and bound over the simplex relaxation.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use log::debug;

use crate::error::{Error, Result};
use crate::ilp::model::Model;
use crate::ilp::simplex::{solve_relaxation, LpOutcome};

const INT_TOL: f64 = 1e-6;
const OBJ_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Limits {
    pub time: Duration,
    pub nodes: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            time: Duration::from_secs(60),
            nodes: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Timeout,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub status: Status,
    /// Best integer assignment found; empty when there is none.
    pub assignment: Vec<i64>,
    /// Objective of `assignment`, if any.
    pub objective: Option<f64>,
    /// Best proven lower bound on the optimum.
    pub bound: f64,
    pub nodes_explored: u64,
}

/// Optimal value of the continuous relaxation, or `None` if it is infeasible.
pub fn lp_bound(model: &Model) -> Result<Option<f64>> {
    Ok(lp_solution(model)?.map(|(objective, _)| objective))
}

/// Optimal value and point of the continuous relaxation.
pub fn lp_solution(model: &Model) -> Result<Option<(f64, Vec<f64>)>> {
    model.validate()?;
    let lo: Vec<i64> = model.variables.iter().map(|v| v.lower).collect();
    let hi: Vec<i64> = model.variables.iter().map(|v| v.upper).collect();
    Ok(match solve_relaxation(model, &lo, &hi)? {
        LpOutcome::Optimal { objective, x } => Some((objective, x)),
        LpOutcome::Infeasible => None,
    })
}

struct Node {
    bound: f64,
    seq: u64,
    lower: Vec<i64>,
    upper: Vec<i64>,
    x: Vec<f64>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // BinaryHeap is a max-heap: the smallest bound must compare greatest.
    // Equal bounds go newest first, which dives toward an incumbent.
    fn cmp(&self, other: &Self) -> Ordering {
        other.bound.total_cmp(&self.bound).then(self.seq.cmp(&other.seq))
    }
}

struct Search<'a> {
    model: &'a Model,
    integral_costs: bool,
    incumbent: Option<(f64, Vec<i64>)>,
    nodes: u64,
    seq: u64,
}

impl Search<'_> {
    /// Bound usable for pruning: rounded up when every integer point has an
    /// integral objective.
    fn effective(&self, bound: f64) -> f64 {
        if self.integral_costs {
            (bound - INT_TOL).ceil()
        } else {
            bound
        }
    }

    fn dominated(&self, bound: f64) -> bool {
        match &self.incumbent {
            Some((best, _)) => self.effective(bound) >= best - OBJ_EPS,
            None => false,
        }
    }

    /// Solves a node relaxation. Integral optima update the incumbent;
    /// fractional ones come back for branching.
    fn evaluate(&mut self, lower: Vec<i64>, upper: Vec<i64>) -> Result<Option<Node>> {
        self.nodes += 1;
        let (objective, x) = match solve_relaxation(self.model, &lower, &upper)? {
            LpOutcome::Infeasible => return Ok(None),
            LpOutcome::Optimal { objective, x } => (objective, x),
        };
        if self.dominated(objective) {
            return Ok(None);
        }
        if x.iter().all(|v| (v - v.round()).abs() <= INT_TOL) {
            let assignment: Vec<i64> = x.iter().map(|v| v.round() as i64).collect();
            if self.model.is_feasible(&assignment) {
                self.offer(assignment);
                return Ok(None);
            }
        }
        Ok(Some(Node {
            bound: objective,
            seq: 0,
            lower,
            upper,
            x,
        }))
    }

    fn push(&mut self, heap: &mut BinaryHeap<Node>, mut node: Node) {
        self.seq += 1;
        node.seq = self.seq;
        heap.push(node);
    }

    fn offer(&mut self, assignment: Vec<i64>) {
        let value = self.model.objective_value(&assignment);
        let replace = match &self.incumbent {
            None => true,
            Some((best, current)) => {
                value < best - OBJ_EPS || (value <= best + OBJ_EPS && support(&assignment) < support(current))
            }
        };
        if replace {
            debug!("incumbent {value} after {} nodes", self.nodes);
            self.incumbent = Some((value, assignment));
        }
    }
}

/// Indices of nonzero entries; smaller in lexicographic order wins ties.
fn support(x: &[i64]) -> Vec<usize> {
    x.iter().enumerate().filter(|(_, &v)| v != 0).map(|(i, _)| i).collect()
}

/// Variable whose fractional part is closest to 0.5; lowest index on ties.
fn branching_variable(x: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (j, &v) in x.iter().enumerate() {
        let frac = v - v.floor();
        if frac <= INT_TOL || frac >= 1.0 - INT_TOL {
            continue;
        }
        let dist = (frac - 0.5).abs();
        if best.is_none_or(|(_, d)| dist < d - 1e-12) {
            best = Some((j, dist));
        }
    }
    best.map(|(j, _)| j)
}

/// Solves `model` to proven optimality unless a limit is hit first.
pub fn solve(model: &Model, limits: Limits) -> Result<Solution> {
    solve_with_bound(model, limits, f64::NEG_INFINITY)
}

/// Like [`solve`], with a lower bound on the optimum known to the caller.
/// The search stops as soon as an incumbent meets it.
pub fn solve_with_bound(model: &Model, limits: Limits, known_bound: f64) -> Result<Solution> {
    model.validate()?;
    let start = Instant::now();
    let mut search = Search {
        model,
        integral_costs: model.has_integral_costs(),
        incumbent: None,
        nodes: 0,
        seq: 0,
    };
    let lower: Vec<i64> = model.variables.iter().map(|v| v.lower).collect();
    let upper: Vec<i64> = model.variables.iter().map(|v| v.upper).collect();

    let mut heap = BinaryHeap::new();
    let root_bound;
    match search.evaluate(lower, upper)? {
        Some(node) => {
            root_bound = node.bound;
            search.push(&mut heap, node);
        }
        None => root_bound = search.incumbent.as_ref().map_or(f64::INFINITY, |(v, _)| *v),
    }

    let mut timed_out = false;
    while let Some(node) = heap.pop() {
        if search.dominated(node.bound) || search.dominated(known_bound) {
            heap.clear();
            break;
        }
        if start.elapsed() >= limits.time || search.nodes >= limits.nodes {
            heap.push(node);
            timed_out = true;
            break;
        }
        let Some(j) = branching_variable(&node.x) else {
            // integral relaxation that failed the exact check; cannot branch
            return Err(Error::Model(format!(
                "relaxation at node {} is integral but violates the model",
                node.seq
            )));
        };
        let v = node.x[j];
        let mut down_upper = node.upper.clone();
        down_upper[j] = v.floor() as i64;
        let down = search.evaluate(node.lower.clone(), down_upper)?;
        let mut up_lower = node.lower;
        up_lower[j] = v.floor() as i64 + 1;
        let up = search.evaluate(up_lower, node.upper)?;
        // pushed last, so the floor child is taken first among equal bounds
        for child in [up, down].into_iter().flatten() {
            search.push(&mut heap, child);
        }
    }

    let open_bound = heap.peek().map(|n| search.effective(n.bound.max(known_bound)));
    let nodes_explored = search.nodes;
    Ok(match (search.incumbent, timed_out) {
        (Some((value, assignment)), false) => Solution {
            status: Status::Optimal,
            assignment,
            objective: Some(value),
            bound: value,
            nodes_explored,
        },
        (None, false) => Solution {
            status: Status::Infeasible,
            assignment: Vec::new(),
            objective: None,
            bound: f64::INFINITY,
            nodes_explored,
        },
        (incumbent, true) => {
            let bound = open_bound.unwrap_or(root_bound.max(known_bound));
            let bound = incumbent.as_ref().map_or(bound, |(v, _)| bound.min(*v));
            let (objective, assignment) = match incumbent {
                Some((v, a)) => (Some(v), a),
                None => (None, Vec::new()),
            };
            Solution {
                status: Status::Timeout,
                assignment,
                objective,
                bound,
                nodes_explored,
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ilp::model::Sense;

    #[test]
    fn zero_model() {
        let mut m = Model::new();
        let x = m.add_binary("x", 1.0);
        let y = m.add_binary("y", 1.0);
        m.add_constraint("c", vec![(x, 1), (y, -1)], Sense::Eq, 0);
        let s = solve(&m, Limits::default()).unwrap();
        assert_eq!(s.status, Status::Optimal);
        assert_eq!(s.objective, Some(0.0));
        assert_eq!(s.assignment, vec![0, 0]);
    }

    #[test]
    fn shared_middle_variable() {
        let mut m = Model::new();
        let x1 = m.add_binary("x1", 1.0);
        let x2 = m.add_binary("x2", 1.0);
        let x3 = m.add_binary("x3", 1.0);
        m.add_constraint("a", vec![(x1, 1), (x2, 1)], Sense::Eq, 1);
        m.add_constraint("b", vec![(x2, 1), (x3, 1)], Sense::Eq, 1);
        // oracle: enumerate all 8 assignments
        let best = (0..8u32)
            .map(|c| [(c & 1) as i64, ((c >> 1) & 1) as i64, ((c >> 2) & 1) as i64])
            .filter(|x| m.is_feasible(x))
            .map(|x| x.iter().sum::<i64>())
            .min();
        assert_eq!(best, Some(1));
        let s = solve(&m, Limits::default()).unwrap();
        assert_eq!(s.objective, Some(1.0));
        assert_eq!(s.assignment, vec![0, 1, 0]);
    }

    #[test]
    fn contradictory_is_infeasible() {
        let mut m = Model::new();
        let x = m.add_binary("x", 1.0);
        m.add_constraint("one", vec![(x, 1)], Sense::Eq, 1);
        m.add_constraint("zero", vec![(x, 1)], Sense::Eq, 0);
        let s = solve(&m, Limits::default()).unwrap();
        assert_eq!(s.status, Status::Infeasible);
        assert!(s.assignment.is_empty());
    }

    #[test]
    fn odd_cycle_needs_branching() {
        // triangle perfect matching: LP = 1.5, no integer solution
        let mut m = Model::new();
        let a = m.add_binary("a", 1.0);
        let b = m.add_binary("b", 1.0);
        let c = m.add_binary("c", 1.0);
        m.add_constraint("0", vec![(a, 1), (b, 1)], Sense::Eq, 1);
        m.add_constraint("1", vec![(a, 1), (c, 1)], Sense::Eq, 1);
        m.add_constraint("2", vec![(b, 1), (c, 1)], Sense::Eq, 1);
        assert!((lp_bound(&m).unwrap().unwrap() - 1.5).abs() < 1e-9);
        let s = solve(&m, Limits::default()).unwrap();
        assert_eq!(s.status, Status::Infeasible);
        assert!(s.nodes_explored > 1);
    }

    #[test]
    fn node_limit_reports_timeout() {
        let mut m = Model::new();
        let vars: Vec<usize> = (0..6).map(|i| m.add_binary(format!("x{i}"), 1.0)).collect();
        // two disjoint odd cycles force branching
        for tri in [[0, 1, 2], [3, 4, 5]] {
            for (p, q) in [(0, 1), (0, 2), (1, 2)] {
                m.add_constraint("e", vec![(vars[tri[p]], 1), (vars[tri[q]], 1)], Sense::Eq, 1);
            }
        }
        let s = solve(
            &m,
            Limits {
                time: Duration::from_secs(10),
                nodes: 1,
            },
        )
        .unwrap();
        assert_eq!(s.status, Status::Timeout);
        assert!(s.objective.is_none());
        assert!((s.bound - 3.0).abs() < 1e-9);
    }

    #[test]
    fn general_integers() {
        // minimize 3x + 2y, 2x + 2y >= 5, x,y in [0, 5] -> y = 3 (6) or x=1,y=2 (7) ... best 6
        let mut m = Model::new();
        let x = m.add_variable("x", 0, 5, 3.0);
        let y = m.add_variable("y", 0, 5, 2.0);
        m.add_constraint("c", vec![(x, 2), (y, 2)], Sense::Ge, 5);
        let s = solve(&m, Limits::default()).unwrap();
        assert_eq!(s.objective, Some(6.0));
        assert_eq!(s.assignment, vec![0, 3]);
    }
}
