//! Bounded-variable primal simplex on the continuous relaxation.
//!
//! Revised form with an explicit dense basis inverse. Columns are sparse.
//! Dantzig pricing is used until the objective stalls on degenerate pivots,
//! at which point Bland's rule takes over until progress resumes.

#![allow(clippy::needless_range_loop)]

use crate::error::{Error, Result};
use crate::ilp::model::{Model, Sense};

const FEAS_TOL: f64 = 1e-9;
const OPT_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const REFACTOR_EVERY: usize = 100;
const STALL_BEFORE_BLAND: usize = 30;

/// Terms, sense and right-hand side of a row awaiting the tableau.
type Row = (Vec<(usize, f64)>, Sense, f64);

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { objective: f64, x: Vec<f64> },
    Infeasible,
}

/// Solves the relaxation of `model` with the variable bounds replaced by
/// `lower`/`upper`.
pub fn solve_relaxation(model: &Model, lower: &[i64], upper: &[i64]) -> Result<LpOutcome> {
    let nvars = model.variables.len();
    let mut x = vec![0.0; nvars];
    let mut fixed_obj = 0.0;
    let mut free = Vec::new();
    let mut col_of = vec![usize::MAX; nvars];
    for j in 0..nvars {
        if lower[j] > upper[j] {
            return Ok(LpOutcome::Infeasible);
        }
        if lower[j] == upper[j] {
            x[j] = lower[j] as f64;
            fixed_obj += model.variables[j].cost * x[j];
        } else {
            col_of[j] = free.len();
            free.push(j);
        }
    }

    // Rows that still involve a free variable; the rest are checked here.
    let mut rows: Vec<Row> = Vec::new();
    for c in &model.constraints {
        let mut rhs = c.rhs as f64;
        let mut terms = Vec::new();
        let (mut min_act, mut max_act) = (0.0, 0.0);
        for &(j, a) in &c.terms {
            if a == 0 {
                continue;
            }
            if col_of[j] == usize::MAX {
                rhs -= a as f64 * x[j];
            } else {
                let (l, u) = (a as f64 * lower[j] as f64, a as f64 * upper[j] as f64);
                min_act += l.min(u);
                max_act += l.max(u);
                terms.push((col_of[j], a as f64));
            }
        }
        let infeasible = match c.sense {
            Sense::Le => min_act > rhs + FEAS_TOL,
            Sense::Ge => max_act < rhs - FEAS_TOL,
            Sense::Eq => min_act > rhs + FEAS_TOL || max_act < rhs - FEAS_TOL,
        };
        if infeasible {
            return Ok(LpOutcome::Infeasible);
        }
        let redundant = match c.sense {
            Sense::Le => max_act <= rhs + FEAS_TOL,
            Sense::Ge => min_act >= rhs - FEAS_TOL,
            Sense::Eq => terms.is_empty(),
        };
        if !redundant {
            rows.push((terms, c.sense, rhs));
        }
    }

    let mut structural_lo = Vec::with_capacity(free.len());
    let mut structural_hi = Vec::with_capacity(free.len());
    let mut structural_cost = Vec::with_capacity(free.len());
    for &j in &free {
        structural_lo.push(lower[j] as f64);
        structural_hi.push(upper[j] as f64);
        structural_cost.push(model.variables[j].cost);
    }
    let mut lp = Lp::new(free.len(), &rows, structural_lo, structural_hi, structural_cost);
    match lp.solve()? {
        None => Ok(LpOutcome::Infeasible),
        Some(values) => {
            for (c, &j) in free.iter().enumerate() {
                x[j] = values[c];
            }
            let objective = fixed_obj + free.iter().map(|&j| model.variables[j].cost * x[j]).sum::<f64>();
            Ok(LpOutcome::Optimal { objective, x })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Basic,
    AtLower,
    AtUpper,
}

/// Columns: structurals, then one slack per row, then one artificial per row.
struct Lp {
    m: usize,
    nstruct: usize,
    cols: Vec<Vec<(usize, f64)>>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    cost: Vec<f64>,
    b: Vec<f64>,
    x: Vec<f64>,
    state: Vec<State>,
    basis: Vec<usize>,
    binv: Vec<f64>,
}

impl Lp {
    fn new(nstruct: usize, rows: &[Row], lo: Vec<f64>, hi: Vec<f64>, cost: Vec<f64>) -> Self {
        let m = rows.len();
        let total = nstruct + 2 * m;
        let mut cols = vec![Vec::new(); total];
        let mut all_lo = lo;
        let mut all_hi = hi;
        let mut all_cost = cost;
        all_lo.resize(total, 0.0);
        all_hi.resize(total, 0.0);
        all_cost.resize(total, 0.0);
        let mut b = Vec::with_capacity(m);
        for (i, (terms, sense, rhs)) in rows.iter().enumerate() {
            for &(j, a) in terms {
                cols[j].push((i, a));
            }
            b.push(*rhs);
            let s = nstruct + i;
            cols[s].push((i, 1.0));
            let (l, h) = match sense {
                Sense::Le => (0.0, f64::INFINITY),
                Sense::Ge => (f64::NEG_INFINITY, 0.0),
                Sense::Eq => (0.0, 0.0),
            };
            all_lo[s] = l;
            all_hi[s] = h;
        }
        Lp {
            m,
            nstruct,
            cols,
            lo: all_lo,
            hi: all_hi,
            cost: all_cost,
            b,
            x: vec![0.0; total],
            state: vec![State::AtLower; total],
            basis: Vec::with_capacity(m),
            binv: Vec::new(),
        }
    }

    /// Returns structural values at an optimum, or `None` if infeasible.
    fn solve(&mut self) -> Result<Option<Vec<f64>>> {
        let (m, ns) = (self.m, self.nstruct);
        for j in 0..ns {
            self.x[j] = self.lo[j];
            self.state[j] = State::AtLower;
        }
        let mut residual = self.b.clone();
        for j in 0..ns {
            if self.x[j] != 0.0 {
                for &(i, a) in &self.cols[j] {
                    residual[i] -= a * self.x[j];
                }
            }
        }
        self.binv = vec![0.0; m * m];
        let mut phase_one = vec![0.0; self.cols.len()];
        let mut needs_phase_one = false;
        for i in 0..m {
            let s = ns + i;
            let a = ns + m + i;
            let r = residual[i];
            if r >= self.lo[s] - FEAS_TOL && r <= self.hi[s] + FEAS_TOL {
                self.basis.push(s);
                self.state[s] = State::Basic;
                self.x[s] = r;
                self.binv[i * m + i] = 1.0;
                self.state[a] = State::AtLower;
                self.lo[a] = 0.0;
                self.hi[a] = 0.0;
                self.cols[a].push((i, 1.0));
            } else {
                let sign = if r >= 0.0 { 1.0 } else { -1.0 };
                // slack rests at its finite bound 0
                self.x[s] = 0.0;
                self.state[s] = if self.lo[s] == 0.0 {
                    State::AtLower
                } else {
                    State::AtUpper
                };
                self.cols[a].push((i, sign));
                self.lo[a] = 0.0;
                self.hi[a] = f64::INFINITY;
                self.x[a] = r.abs();
                self.state[a] = State::Basic;
                self.basis.push(a);
                self.binv[i * m + i] = sign;
                phase_one[a] = 1.0;
                needs_phase_one = true;
            }
        }

        if needs_phase_one {
            let value = self.iterate(&phase_one)?;
            let scale = 1.0 + self.b.iter().map(|v| v.abs()).fold(0.0, f64::max);
            if value > 1e-7 * scale {
                return Ok(None);
            }
        }
        for i in 0..m {
            let a = ns + m + i;
            self.hi[a] = 0.0;
            if self.state[a] != State::Basic {
                self.x[a] = 0.0;
                self.state[a] = State::AtLower;
            }
        }
        let cost = self.cost.clone();
        self.iterate(&cost)?;
        Ok(Some(self.x[..ns].to_vec()))
    }

    fn iterate(&mut self, cost: &[f64]) -> Result<f64> {
        let m = self.m;
        let total = self.cols.len();
        let max_iters = 50_000 + 50 * (total + m);
        let mut since_refactor = 0;
        let mut stalled = 0;
        let mut y = vec![0.0; m];
        let mut alpha = vec![0.0; m];

        for _ in 0..max_iters {
            if since_refactor >= REFACTOR_EVERY {
                self.refactor()?;
                since_refactor = 0;
            }
            // duals
            y.iter_mut().for_each(|v| *v = 0.0);
            for (i, &bv) in self.basis.iter().enumerate() {
                let c = cost[bv];
                if c != 0.0 {
                    let row = &self.binv[i * m..(i + 1) * m];
                    for (yk, &r) in y.iter_mut().zip(row) {
                        *yk += c * r;
                    }
                }
            }
            let bland = stalled >= STALL_BEFORE_BLAND;
            let mut entering: Option<(usize, f64)> = None;
            for j in 0..total {
                let st = self.state[j];
                if st == State::Basic || self.lo[j] == self.hi[j] {
                    continue;
                }
                let d = cost[j] - self.cols[j].iter().map(|&(i, a)| y[i] * a).sum::<f64>();
                let improving = (st == State::AtLower && d < -OPT_TOL) || (st == State::AtUpper && d > OPT_TOL);
                if !improving {
                    continue;
                }
                if bland {
                    entering = Some((j, d));
                    break;
                }
                if entering.is_none_or(|(_, best)| d.abs() > best.abs()) {
                    entering = Some((j, d));
                }
            }
            let Some((q, _)) = entering else {
                return Ok(self.objective(cost));
            };
            let dir = if self.state[q] == State::AtLower { 1.0 } else { -1.0 };

            alpha.iter_mut().for_each(|v| *v = 0.0);
            for &(k, a) in &self.cols[q] {
                for i in 0..m {
                    alpha[i] += self.binv[i * m + k] * a;
                }
            }

            // ratio test; basic i moves by -dir * alpha_i per unit step
            let mut step = self.hi[q] - self.lo[q];
            let mut leave: Option<usize> = None;
            for i in 0..m {
                let delta = -dir * alpha[i];
                let bv = self.basis[i];
                let limit = if delta < -PIVOT_TOL {
                    ((self.x[bv] - self.lo[bv]) / -delta).max(0.0)
                } else if delta > PIVOT_TOL && self.hi[bv].is_finite() {
                    ((self.hi[bv] - self.x[bv]) / delta).max(0.0)
                } else {
                    continue;
                };
                let better = limit < step - 1e-12
                    || (limit <= step + 1e-12
                        && match leave {
                            None => limit < step,
                            Some(l) => {
                                if bland {
                                    bv < self.basis[l]
                                } else {
                                    alpha[i].abs() > alpha[l].abs()
                                }
                            }
                        });
                if better {
                    step = limit;
                    leave = Some(i);
                }
            }
            if !step.is_finite() {
                return Err(Error::Model("linear relaxation is unbounded".into()));
            }
            if step <= 1e-12 {
                stalled += 1;
            } else {
                stalled = 0;
            }

            for i in 0..m {
                let bv = self.basis[i];
                self.x[bv] -= dir * alpha[i] * step;
            }
            self.x[q] += dir * step;

            match leave {
                None => {
                    self.state[q] = if dir > 0.0 { State::AtUpper } else { State::AtLower };
                    self.x[q] = if dir > 0.0 { self.hi[q] } else { self.lo[q] };
                }
                Some(r) => {
                    let out = self.basis[r];
                    let delta = -dir * alpha[r];
                    if delta < 0.0 {
                        self.state[out] = State::AtLower;
                        self.x[out] = self.lo[out];
                    } else {
                        self.state[out] = State::AtUpper;
                        self.x[out] = self.hi[out];
                    }
                    self.basis[r] = q;
                    self.state[q] = State::Basic;
                    self.pivot(r, &alpha);
                    since_refactor += 1;
                }
            }
        }
        Err(Error::Model("simplex iteration limit reached".into()))
    }

    fn pivot(&mut self, r: usize, alpha: &[f64]) {
        let m = self.m;
        let p = alpha[r];
        let (before, rest) = self.binv.split_at_mut(r * m);
        let (pivot_row, after) = rest.split_at_mut(m);
        for v in pivot_row.iter_mut() {
            *v /= p;
        }
        for (i, row) in before.chunks_mut(m).enumerate() {
            let f = alpha[i];
            if f != 0.0 {
                for (a, &b) in row.iter_mut().zip(pivot_row.iter()) {
                    *a -= f * b;
                }
            }
        }
        for (off, row) in after.chunks_mut(m).enumerate() {
            let f = alpha[r + 1 + off];
            if f != 0.0 {
                for (a, &b) in row.iter_mut().zip(pivot_row.iter()) {
                    *a -= f * b;
                }
            }
        }
    }

    /// Recomputes the basis inverse and basic values from scratch.
    fn refactor(&mut self) -> Result<()> {
        let m = self.m;
        let mut a = vec![0.0; m * m];
        for (k, &bv) in self.basis.iter().enumerate() {
            for &(i, v) in &self.cols[bv] {
                a[i * m + k] = v;
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for c in 0..m {
            let p = (c..m)
                .max_by(|&i, &j| a[i * m + c].abs().total_cmp(&a[j * m + c].abs()))
                .expect("non-empty range");
            if a[p * m + c].abs() < 1e-12 {
                return Err(Error::Model("singular basis".into()));
            }
            if p != c {
                for k in 0..m {
                    a.swap(p * m + k, c * m + k);
                    inv.swap(p * m + k, c * m + k);
                }
            }
            let d = a[c * m + c];
            for k in 0..m {
                a[c * m + k] /= d;
                inv[c * m + k] /= d;
            }
            for i in 0..m {
                if i != c {
                    let f = a[i * m + c];
                    if f != 0.0 {
                        for k in 0..m {
                            a[i * m + k] -= f * a[c * m + k];
                            inv[i * m + k] -= f * inv[c * m + k];
                        }
                    }
                }
            }
        }
        self.binv = inv;

        let mut rhs = self.b.clone();
        for j in 0..self.cols.len() {
            if self.state[j] != State::Basic && self.x[j] != 0.0 {
                for &(i, v) in &self.cols[j] {
                    rhs[i] -= v * self.x[j];
                }
            }
        }
        for i in 0..m {
            let row = &self.binv[i * m..(i + 1) * m];
            self.x[self.basis[i]] = row.iter().zip(&rhs).map(|(a, b)| a * b).sum();
        }
        Ok(())
    }

    fn objective(&self, cost: &[f64]) -> f64 {
        cost.iter().zip(&self.x).map(|(c, x)| c * x).sum()
    }
}
