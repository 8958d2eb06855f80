//! Realizing per-vertex degree changes with the fewest edge edits.
//!
//! Every unordered vertex pair gets one binary variable: an addition
//! variable if the pair is a non-edge, a deletion variable if it is an edge.
//! For each vertex, additions minus deletions must equal its requested change
//! `θ(v)`, additions are capped by `a(v)` and deletions by `d(v)`. The
//! relaxed variant adds nonnegative slacks `s+(v)`, `s-(v)` so the realized
//! change is `θ(v) + s+(v) - s-(v)`, with slack charged `λ` per unit.

use serde::Serialize;

use crate::anonymize::{ChangeVector, VertexCaps};
use crate::error::{Error, InfeasibilityHint, Result};
use crate::graph::{EditPlan, Graph, Pair};
use crate::ilp::{self, Limits, Model, Sense, Status};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum RealizationMode {
    /// Degrees must change by exactly `θ`.
    Strict,
    /// Residual change is absorbed by slack costing `lambda` per unit.
    Relaxed { lambda: f64 },
}

impl RealizationMode {
    pub fn relaxed() -> Self {
        RealizationMode::Relaxed { lambda: 1.0 }
    }
}

/// An integer program over vertex pairs plus the bookkeeping to decode it.
#[derive(Debug, Clone)]
pub struct RealizationModel {
    pub model: Model,
    /// Pair behind variable `i`, for `i < pairs.len()`.
    pub pairs: Vec<Pair>,
    /// Whether variable `i` deletes an existing edge.
    pub is_deletion: Vec<bool>,
    /// Index of `s+(0)`; `s-(v)` follows `s+(v)`. `None` in strict mode.
    pub slack_offset: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Realization {
    #[serde(skip)]
    pub plan: EditPlan,
    pub objective: f64,
    pub nodes_explored: u64,
}

fn check_lengths(g: &Graph, theta: &ChangeVector, caps: &VertexCaps) -> Result<()> {
    let n = g.n();
    for len in [theta.len(), caps.additions.len(), caps.deletions.len()] {
        if len != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: len,
            });
        }
    }
    Ok(())
}

fn build(g: &Graph, theta: &ChangeVector, caps: &VertexCaps, slack_cost: Option<f64>) -> Result<RealizationModel> {
    check_lengths(g, theta, caps)?;
    let n = g.n();
    let mut model = Model::new();
    let mut pairs = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    let mut is_deletion = Vec::with_capacity(pairs.capacity());
    let mut adds_at: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n];
    let mut dels_at: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n];
    for u in 0..n {
        for v in u + 1..n {
            let deletion = g.has_edge(u, v);
            let open = if deletion {
                caps.deletions[u] > 0 && caps.deletions[v] > 0
            } else {
                caps.additions[u] > 0 && caps.additions[v] > 0
            };
            let name = format!("{}_{u}_{v}", if deletion { "d" } else { "a" });
            let j = model.add_variable(name, 0, i64::from(open), 1.0);
            pairs.push((u, v));
            is_deletion.push(deletion);
            let list = if deletion { &mut dels_at } else { &mut adds_at };
            list[u].push((j, 1));
            list[v].push((j, 1));
        }
    }
    let slack_offset = slack_cost.map(|lambda| {
        let offset = model.num_variables();
        for v in 0..n {
            // large enough to absorb the whole change with no edits
            let bound = (n as i64).max(theta.theta[v].abs());
            model.add_variable(format!("sp_{v}"), 0, bound, lambda);
            model.add_variable(format!("sn_{v}"), 0, bound, lambda);
        }
        offset
    });
    for v in 0..n {
        let mut terms: Vec<(usize, i64)> = adds_at[v].clone();
        terms.extend(dels_at[v].iter().map(|&(j, _)| (j, -1)));
        if let Some(offset) = slack_offset {
            terms.push((offset + 2 * v, -1));
            terms.push((offset + 2 * v + 1, 1));
        }
        terms.sort_unstable();
        model.add_constraint(format!("deg_{v}"), terms, Sense::Eq, theta.theta[v]);
    }
    for v in 0..n {
        model.add_constraint(
            format!("add_{v}"),
            adds_at[v].clone(),
            Sense::Le,
            caps.additions[v] as i64,
        );
        model.add_constraint(
            format!("del_{v}"),
            dels_at[v].clone(),
            Sense::Le,
            caps.deletions[v] as i64,
        );
    }
    Ok(RealizationModel {
        model,
        pairs,
        is_deletion,
        slack_offset,
    })
}

/// Exact-degree model: minimize edits subject to `adds(v) - dels(v) = θ(v)`.
pub fn build_strict_model(g: &Graph, theta: &ChangeVector, caps: &VertexCaps) -> Result<RealizationModel> {
    build(g, theta, caps, None)
}

/// Model with per-vertex slack charged `lambda` per unit.
pub fn build_relaxed_model(
    g: &Graph,
    theta: &ChangeVector,
    caps: &VertexCaps,
    lambda: f64,
) -> Result<RealizationModel> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Parameter(format!("slack weight must be positive, got {lambda}")));
    }
    build(g, theta, caps, Some(lambda))
}

impl RealizationModel {
    /// Turns a solver assignment into an edit plan.
    pub fn decode(&self, assignment: &[i64], n: usize) -> EditPlan {
        let mut plan = EditPlan {
            slack: vec![0; n],
            ..Default::default()
        };
        for (j, &pair) in self.pairs.iter().enumerate() {
            if assignment[j] != 0 {
                if self.is_deletion[j] {
                    plan.deletions.insert(pair);
                } else {
                    plan.additions.insert(pair);
                }
            }
        }
        if let Some(offset) = self.slack_offset {
            for (v, s) in plan.slack.iter_mut().enumerate() {
                *s = assignment[offset + 2 * v] - assignment[offset + 2 * v + 1];
            }
        }
        plan
    }
}

/// Cheap certificates of strict infeasibility, checked before solving.
pub fn strict_obstruction(g: &Graph, theta: &ChangeVector, caps: &VertexCaps) -> Option<InfeasibilityHint> {
    let n = g.n() as i64;
    let sum = theta.sum();
    if sum % 2 != 0 {
        return Some(InfeasibilityHint::OddParity { sum });
    }
    for (v, &change) in theta.theta.iter().enumerate() {
        let target = g.degree(v) as i64 + change;
        if target < 0 || target > n - 1 {
            return Some(InfeasibilityHint::DegreeOutOfRange { vertex: v, target });
        }
        let cap = if change >= 0 {
            caps.additions[v]
        } else {
            caps.deletions[v]
        };
        if change.unsigned_abs() as usize > cap {
            return Some(InfeasibilityHint::CapTooSmall { vertex: v, change, cap });
        }
    }
    None
}

const FRAC_TOL: f64 = 1e-6;
const MAX_PARITY_ROUNDS: usize = 40;

fn find(parent: &mut [usize], mut v: usize) -> usize {
    while parent[v] != v {
        parent[v] = parent[parent[v]];
        v = parent[v];
    }
    v
}

impl RealizationModel {
    /// Adds parity rows violated by `x`, one per candidate vertex set.
    ///
    /// Summing the degree rows of a vertex set `S` shows that the edits
    /// leaving `S` plus the slack inside `S` have the parity of `θ(S)`. With
    /// `F` a subset of the boundary pairs, every integer solution therefore
    /// satisfies `Σ_{δ(S)∖F} x + Σ_F (1 - x) + Σ_S slack >= 1` whenever
    /// `θ(S) + |F|` is odd. Candidate sets are the connected components of
    /// the pairs with fractional values.
    fn separate_parity(&self, theta: &ChangeVector, x: &[f64]) -> Vec<(Vec<(usize, i64)>, i64)> {
        let n = theta.len();
        let mut parent: Vec<usize> = (0..n).collect();
        let mut fractional = false;
        for (j, &(u, v)) in self.pairs.iter().enumerate() {
            if x[j] > FRAC_TOL && x[j] < 1.0 - FRAC_TOL {
                fractional = true;
                let (a, b) = (find(&mut parent, u), find(&mut parent, v));
                parent[a.max(b)] = a.min(b);
            }
        }
        if !fractional {
            return Vec::new();
        }
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (j, &(u, v)) in self.pairs.iter().enumerate() {
            if self.model.variables[j].upper > 0 {
                incident[u].push(j);
                incident[v].push(j);
            }
        }
        let roots: Vec<usize> = (0..n).map(|v| find(&mut parent, v)).collect();
        let mut components: Vec<Vec<usize>> = vec![Vec::new(); n];
        for v in 0..n {
            components[roots[v]].push(v);
        }

        let mut rows = Vec::new();
        for members in components.iter().filter(|c| c.len() >= 2) {
            let root = roots[members[0]];
            let theta_s: i64 = members.iter().map(|&v| theta.theta[v]).sum();
            let mut boundary: Vec<usize> = members
                .iter()
                .flat_map(|&v| incident[v].iter().copied())
                .filter(|&j| {
                    let (u, v) = self.pairs[j];
                    (roots[u] == root) != (roots[v] == root)
                })
                .collect();
            boundary.sort_unstable();
            let mut flipped: Vec<bool> = boundary.iter().map(|&j| x[j] > 0.5).collect();
            let odd = |flipped: &[bool]| (theta_s + flipped.iter().filter(|&&f| f).count() as i64).rem_euclid(2) == 1;
            if !odd(&flipped) {
                // toggle the pair whose choice costs least
                let Some(i) = (0..boundary.len()).min_by(|&a, &b| {
                    let cost = |i: usize| (1.0 - 2.0 * x[boundary[i]]).abs();
                    cost(a).total_cmp(&cost(b))
                }) else {
                    continue;
                };
                flipped[i] = !flipped[i];
            }
            let mut lhs = 0.0;
            let mut terms = Vec::with_capacity(boundary.len() + 2 * members.len());
            let mut complemented = 0;
            for (&j, &f) in boundary.iter().zip(&flipped) {
                if f {
                    lhs += 1.0 - x[j];
                    terms.push((j, -1));
                    complemented += 1;
                } else {
                    lhs += x[j];
                    terms.push((j, 1));
                }
            }
            if let Some(offset) = self.slack_offset {
                for &v in members {
                    for j in [offset + 2 * v, offset + 2 * v + 1] {
                        lhs += x[j];
                        terms.push((j, 1));
                    }
                }
            }
            if lhs < 1.0 - FRAC_TOL {
                rows.push((terms, 1 - complemented));
            }
        }
        rows
    }

    /// Tightens the relaxation with parity rows until none is violated or
    /// the round limit is reached. Returns the number of rows added.
    pub fn add_parity_rows(&mut self, theta: &ChangeVector) -> Result<usize> {
        let mut added = 0;
        for _ in 0..MAX_PARITY_ROUNDS {
            let Some((_, x)) = ilp::lp_solution(&self.model)? else {
                break;
            };
            let rows = self.separate_parity(theta, &x);
            if rows.is_empty() {
                break;
            }
            for (terms, rhs) in rows {
                self.model.add_constraint(format!("par_{added}"), terms, Sense::Ge, rhs);
                added += 1;
            }
        }
        Ok(added)
    }
}

/// Lower bound on the edits of any exact realization.
///
/// Each vertex touches at least `|θ(v)|` edits, and exactly that many only
/// if it moves in one direction. If every vertex did, the additions would
/// pair up the raising vertices among themselves, so their total `Σθ+`
/// would be even. When it is odd some vertex needs two more incident edits.
pub fn strict_lower_bound(theta: &ChangeVector) -> f64 {
    let raise: i64 = theta.theta.iter().filter(|&&c| c > 0).sum();
    (theta.l1() / 2 + raise % 2) as f64
}

/// Finds a minimum edit plan realizing `theta` on `g`.
pub fn realize(
    g: &Graph,
    theta: &ChangeVector,
    caps: &VertexCaps,
    mode: RealizationMode,
    limits: Limits,
) -> Result<Realization> {
    check_lengths(g, theta, caps)?;
    let mut built = match mode {
        RealizationMode::Strict => {
            if let Some(hint) = strict_obstruction(g, theta, caps) {
                return Err(Error::Infeasible(hint));
            }
            build_strict_model(g, theta, caps)?
        }
        RealizationMode::Relaxed { lambda } => build_relaxed_model(g, theta, caps, lambda)?,
    };
    let rows = built.add_parity_rows(theta)?;
    log::debug!("{rows} parity rows added");
    let known_bound = match mode {
        RealizationMode::Strict => strict_lower_bound(theta),
        RealizationMode::Relaxed { .. } => f64::NEG_INFINITY,
    };
    let solution = ilp::solve_with_bound(&built.model, limits, known_bound)?;
    match solution.status {
        Status::Optimal => {}
        Status::Infeasible => return Err(Error::Infeasible(InfeasibilityHint::Exhausted)),
        Status::Timeout => {
            return Err(Error::Timeout {
                bound: solution.bound,
                incumbent: solution.objective,
            })
        }
    }
    let plan = built.decode(&solution.assignment, g.n());
    debug_assert!({
        let after = g.apply_edits(&plan).expect("decoded plan is valid");
        (0..g.n()).all(|v| after.degree(v) as i64 == g.degree(v) as i64 + theta.theta[v] + plan.slack[v])
    });
    Ok(Realization {
        plan,
        objective: solution.objective.unwrap_or(f64::NAN),
        nodes_explored: solution.nodes_explored,
    })
}
