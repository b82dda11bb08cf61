//! Bounded-variable primal revised simplex.
//!
//! Every row `a_i x (<=, =, >=) b_i` gets a logical variable `s_i` with
//! `a_i x + s_i = b_i` and bounds `[0, inf)`, `(-inf, 0]` or `[0, 0]`, so the
//! all-logical basis is the identity. The basis inverse is kept in product
//! form as a file of sparse eta columns and rebuilt from scratch every
//! [`REINVERT_EVERY`] pivots.
//!
//! Phase one minimizes the sum of bound violations of the basic variables,
//! with the costs recomputed each iteration. The ratio test lets an infeasible
//! basic variable block only when it reaches the bound it violates. Pricing is
//! Dantzig's rule until `10 * rows` consecutive degenerate pivots, then
//! Bland's rule until the next pivot that makes progress.

use serde::{Deserialize, Serialize};

use super::model::{LpModel, LpSolution, LpStatus, Sense};
use crate::error::{Error, Result};

pub const MAX_PIVOTS: usize = 1_000_000;
pub const REINVERT_EVERY: usize = 100;
pub const FEASIBILITY_TOL: f64 = 1e-7;

const PRIMAL_TOL: f64 = 1e-9;
const DUAL_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const DROP_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Basic,
    Lower,
    Upper,
    /// Nonbasic free variable resting at zero.
    Zero,
}

struct Eta {
    row: usize,
    pivot: f64,
    entries: Vec<(usize, f64)>,
}

struct Simplex {
    m: usize,
    n: usize,
    col_start: Vec<usize>,
    col_row: Vec<usize>,
    col_val: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    rhs: Vec<f64>,
    x: Vec<f64>,
    state: Vec<State>,
    head: Vec<usize>,
    etas: Vec<Eta>,
    /// Etas produced by the last reinversion.
    base_etas: usize,
    base_nnz: usize,
    /// Entries in etas added by pivots since the last reinversion.
    update_nnz: usize,
    bland: bool,
    degenerate_run: usize,
    pivots: usize,
}

fn tol_for(bound: f64) -> f64 {
    PRIMAL_TOL * (1.0 + bound.abs())
}

impl Simplex {
    fn new(model: &LpModel) -> Self {
        let m = model.n_constraints();
        let n = model.n_vars();
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (i, c) in model.constraints.iter().enumerate() {
            for &(j, a) in &c.coeffs {
                if a != 0.0 {
                    cols[j].push((i, a));
                }
            }
        }
        let mut col_start = Vec::with_capacity(n + 1);
        let mut col_row = Vec::new();
        let mut col_val = Vec::new();
        col_start.push(0);
        for col in &mut cols {
            col.sort_by_key(|&(i, _)| i);
            // merge repeated entries of one variable within a row
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(col.len());
            for &(i, a) in col.iter() {
                match merged.last_mut() {
                    Some(last) if last.0 == i => last.1 += a,
                    _ => merged.push((i, a)),
                }
            }
            for (i, a) in merged {
                col_row.push(i);
                col_val.push(a);
            }
            col_start.push(col_row.len());
        }

        let mut lower: Vec<f64> = model.variables.iter().map(|v| v.lower).collect();
        let mut upper: Vec<f64> = model.variables.iter().map(|v| v.upper).collect();
        for c in &model.constraints {
            let (l, u) = match c.sense {
                Sense::Le => (0.0, f64::INFINITY),
                Sense::Ge => (f64::NEG_INFINITY, 0.0),
                Sense::Eq => (0.0, 0.0),
            };
            lower.push(l);
            upper.push(u);
        }
        let mut cost = vec![0.0; n + m];
        for &(j, c) in &model.objective {
            cost[j] += c;
        }
        let rhs = model.constraints.iter().map(|c| c.rhs).collect();

        let mut x = vec![0.0; n + m];
        let mut state = vec![State::Basic; n + m];
        for j in 0..n {
            (state[j], x[j]) = if lower[j].is_finite() {
                (State::Lower, lower[j])
            } else if upper[j].is_finite() {
                (State::Upper, upper[j])
            } else {
                (State::Zero, 0.0)
            };
        }
        Self {
            m,
            n,
            col_start,
            col_row,
            col_val,
            lower,
            upper,
            cost,
            rhs,
            x,
            state,
            head: (n..n + m).collect(),
            etas: Vec::new(),
            base_etas: 0,
            base_nnz: 0,
            update_nnz: 0,
            bland: false,
            degenerate_run: 0,
            pivots: 0,
        }
    }

    fn for_column(&self, j: usize, mut f: impl FnMut(usize, f64)) {
        if j < self.n {
            for k in self.col_start[j]..self.col_start[j + 1] {
                f(self.col_row[k], self.col_val[k]);
            }
        } else {
            f(j - self.n, 1.0);
        }
    }

    fn column_nnz(&self, j: usize) -> usize {
        if j < self.n {
            self.col_start[j + 1] - self.col_start[j]
        } else {
            1
        }
    }

    fn ftran_in_place(&self, w: &mut [f64]) {
        for e in &self.etas {
            let vp = w[e.row];
            if vp == 0.0 {
                continue;
            }
            let vp = vp / e.pivot;
            w[e.row] = vp;
            for &(i, wi) in &e.entries {
                w[i] -= wi * vp;
            }
        }
    }

    fn ftran(&self, j: usize) -> Vec<f64> {
        let mut w = vec![0.0; self.m];
        self.for_column(j, |i, a| w[i] = a);
        self.ftran_in_place(&mut w);
        w
    }

    fn btran_in_place(&self, y: &mut [f64]) {
        for e in self.etas.iter().rev() {
            let mut s = y[e.row];
            for &(i, wi) in &e.entries {
                s -= y[i] * wi;
            }
            y[e.row] = s / e.pivot;
        }
    }

    fn push_eta(&mut self, row: usize, w: &[f64]) {
        let entries = w
            .iter()
            .enumerate()
            .filter(|&(i, &v)| i != row && v.abs() > DROP_TOL)
            .map(|(i, &v)| (i, v))
            .collect();
        self.etas.push(Eta {
            row,
            pivot: w[row],
            entries,
        });
    }

    fn nonbasic_rest_state(&self, j: usize) -> (State, f64) {
        let (l, u, x) = (self.lower[j], self.upper[j], self.x[j]);
        if l.is_finite() && (!u.is_finite() || (x - l).abs() <= (x - u).abs()) {
            (State::Lower, l)
        } else if u.is_finite() {
            (State::Upper, u)
        } else {
            (State::Zero, 0.0)
        }
    }

    /// Rebuilds the eta file for the current basis. Columns that turn out
    /// dependent are dropped to a bound and replaced by logicals.
    fn reinvert(&mut self) {
        self.etas.clear();
        let m = self.m;
        let mut new_head = vec![usize::MAX; m];
        let mut structurals = Vec::new();
        for &b in &self.head {
            if b >= self.n {
                new_head[b - self.n] = b;
            } else {
                structurals.push(b);
            }
        }
        structurals.sort_by_key(|&j| (self.column_nnz(j), j));
        let mut work = vec![0.0; m];
        let mut marked = vec![false; m];
        let mut nz: Vec<usize> = Vec::new();
        for j in structurals {
            self.for_column(j, |i, a| {
                work[i] = a;
                marked[i] = true;
                nz.push(i);
            });
            for e in &self.etas {
                let vp = work[e.row];
                if vp == 0.0 {
                    continue;
                }
                let vp = vp / e.pivot;
                work[e.row] = vp;
                for &(i, wi) in &e.entries {
                    if !marked[i] {
                        marked[i] = true;
                        nz.push(i);
                    }
                    work[i] -= wi * vp;
                }
            }
            let mut best = usize::MAX;
            let mut best_abs = PIVOT_TOL;
            for &p in &nz {
                let v = work[p].abs();
                if new_head[p] == usize::MAX && (v > best_abs || (v == best_abs && p < best)) {
                    best = p;
                    best_abs = v;
                }
            }
            if best == usize::MAX {
                let (s, v) = self.nonbasic_rest_state(j);
                self.state[j] = s;
                self.x[j] = v;
            } else {
                let mut entries: Vec<(usize, f64)> = nz
                    .iter()
                    .filter(|&&i| i != best && work[i].abs() > DROP_TOL)
                    .map(|&i| (i, work[i]))
                    .collect();
                entries.sort_unstable_by_key(|&(i, _)| i);
                self.etas.push(Eta {
                    row: best,
                    pivot: work[best],
                    entries,
                });
                new_head[best] = j;
            }
            for &i in &nz {
                work[i] = 0.0;
                marked[i] = false;
            }
            nz.clear();
        }
        for (p, slot) in new_head.iter_mut().enumerate() {
            if *slot == usize::MAX {
                *slot = self.n + p;
                self.state[self.n + p] = State::Basic;
            }
        }
        self.head = new_head;
        self.base_etas = self.etas.len();
        self.base_nnz = self.etas.iter().map(|e| e.entries.len() + 1).sum();
        self.update_nnz = 0;
        self.recompute_basics();
    }

    fn recompute_basics(&mut self) {
        let mut r = self.rhs.clone();
        for j in 0..self.n + self.m {
            if self.state[j] != State::Basic && self.x[j] != 0.0 {
                let xj = self.x[j];
                self.for_column(j, |i, a| r[i] -= a * xj);
            }
        }
        self.ftran_in_place(&mut r);
        for (p, &b) in self.head.iter().enumerate() {
            self.x[b] = r[p];
        }
    }

    /// Phase-one costs of the basic positions; all zero when feasible.
    fn infeasibility_costs(&self) -> Option<Vec<f64>> {
        let mut any = false;
        let c = self
            .head
            .iter()
            .map(|&b| {
                let x = self.x[b];
                if x < self.lower[b] - tol_for(self.lower[b]) {
                    any = true;
                    -1.0
                } else if x > self.upper[b] + tol_for(self.upper[b]) {
                    any = true;
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        any.then_some(c)
    }

    fn price(&self, y: &[f64], phase_one: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..self.n + self.m {
            let s = self.state[j];
            if s == State::Basic || self.lower[j] == self.upper[j] {
                continue;
            }
            let mut d = if phase_one { 0.0 } else { self.cost[j] };
            self.for_column(j, |i, a| d -= y[i] * a);
            let eligible = match s {
                State::Lower => d < -DUAL_TOL,
                State::Upper => d > DUAL_TOL,
                State::Zero => d.abs() > DUAL_TOL,
                State::Basic => false,
            };
            if !eligible {
                continue;
            }
            if self.bland {
                return Some((j, d));
            }
            if best.is_none_or(|(_, bd)| d.abs() > bd.abs()) {
                best = Some((j, d));
            }
        }
        best
    }

    fn iterate(&mut self) -> Result<LpStatus> {
        loop {
            if self.pivots >= MAX_PIVOTS {
                return Err(Error::Numerical(format!("simplex pivot limit {MAX_PIVOTS} reached")));
            }
            if self.etas.len() >= REINVERT_EVERY + self.base_etas
                || self.update_nnz > 2 * (self.base_nnz + self.m)
            {
                self.reinvert();
            }
            let phase_costs = self.infeasibility_costs();
            let phase_one = phase_costs.is_some();
            let mut y = phase_costs.unwrap_or_else(|| self.head.iter().map(|&b| self.cost[b]).collect());
            self.btran_in_place(&mut y);

            let Some((q, d)) = self.price(&y, phase_one) else {
                return Ok(if phase_one { LpStatus::Infeasible } else { LpStatus::Optimal });
            };
            let dir = match self.state[q] {
                State::Lower => 1.0,
                State::Upper => -1.0,
                _ => {
                    if d < 0.0 {
                        1.0
                    } else {
                        -1.0
                    }
                }
            };
            let w = self.ftran(q);

            // ratio test
            let own = self.upper[q] - self.lower[q];
            let mut theta = if own.is_finite() { own } else { f64::INFINITY };
            let mut candidates: Vec<(usize, f64, bool)> = Vec::new();
            for (p, &wp) in w.iter().enumerate() {
                if wp.abs() <= PIVOT_TOL {
                    continue;
                }
                let b = self.head[p];
                let rate = -dir * wp;
                let (xb, l, u) = (self.x[b], self.lower[b], self.upper[b]);
                let limit = if rate < 0.0 {
                    if phase_one && xb < l - tol_for(l) {
                        None
                    } else if phase_one && xb > u + tol_for(u) {
                        Some(((xb - u) / -rate, true))
                    } else if l.is_finite() {
                        Some(((xb - l) / -rate, false))
                    } else {
                        None
                    }
                } else if phase_one && xb > u + tol_for(u) {
                    None
                } else if phase_one && xb < l - tol_for(l) {
                    Some(((l - xb) / rate, false))
                } else if u.is_finite() {
                    Some(((u - xb) / rate, true))
                } else {
                    None
                };
                if let Some((t, at_upper)) = limit {
                    let t = t.max(0.0);
                    candidates.push((p, t, at_upper));
                    theta = theta.min(t);
                }
            }
            if theta == f64::INFINITY {
                if phase_one {
                    return Err(Error::Numerical("phase one ray without a breakpoint".into()));
                }
                return Ok(LpStatus::Unbounded);
            }
            let slack = 1e-12 * (1.0 + theta);
            let leave = candidates
                .iter()
                .filter(|c| c.1 <= theta + slack)
                .min_by(|a, b| {
                    if self.bland {
                        self.head[a.0].cmp(&self.head[b.0])
                    } else {
                        w[b.0].abs().total_cmp(&w[a.0].abs()).then(a.0.cmp(&b.0))
                    }
                })
                .copied();
            let flip = own.is_finite() && own <= theta + slack && (leave.is_none() || own <= theta);

            if theta <= 1e-12 {
                self.degenerate_run += 1;
                if self.degenerate_run > 10 * self.m.max(1) {
                    self.bland = true;
                }
            } else {
                self.degenerate_run = 0;
                self.bland = false;
            }

            if flip {
                self.x[q] += dir * own;
                for (p, &wp) in w.iter().enumerate() {
                    if wp != 0.0 {
                        self.x[self.head[p]] -= dir * wp * own;
                    }
                }
                self.state[q] = if dir > 0.0 { State::Upper } else { State::Lower };
                self.x[q] = if dir > 0.0 { self.upper[q] } else { self.lower[q] };
            } else {
                let (p, t, at_upper) = leave.expect("finite ratio implies a blocking row");
                self.x[q] += dir * t;
                for (r, &wr) in w.iter().enumerate() {
                    if wr != 0.0 {
                        self.x[self.head[r]] -= dir * wr * t;
                    }
                }
                let b = self.head[p];
                if at_upper {
                    self.state[b] = State::Upper;
                    self.x[b] = self.upper[b];
                } else {
                    self.state[b] = State::Lower;
                    self.x[b] = self.lower[b];
                }
                self.state[q] = State::Basic;
                self.head[p] = q;
                self.push_eta(p, &w);
                self.update_nnz += self.etas.last().map_or(0, |e| e.entries.len() + 1);
            }
            self.pivots += 1;
        }
    }
}

/// Status of a variable or row logical in a basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisStatus {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic at zero (free variables only).
    Free,
}

/// A simplex basis: one status per variable and one per row logical.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Basis {
    pub columns: Vec<BasisStatus>,
    pub rows: Vec<BasisStatus>,
}

impl Simplex {
    fn load_basis(&mut self, basis: &Basis) {
        let statuses = basis.columns.iter().chain(&basis.rows);
        for (j, &st) in statuses.enumerate().take(self.n + self.m) {
            let (l, u) = (self.lower[j], self.upper[j]);
            let (state, x) = match st {
                BasisStatus::Basic => (State::Basic, 0.0),
                BasisStatus::AtLower if l.is_finite() => (State::Lower, l),
                BasisStatus::AtUpper if u.is_finite() => (State::Upper, u),
                _ => self.nonbasic_rest_state(j),
            };
            self.state[j] = state;
            self.x[j] = x;
        }
        self.head = (0..self.n + self.m).filter(|&j| self.state[j] == State::Basic).collect();
    }

    fn basis(&self) -> Basis {
        let st = |j: usize| match self.state[j] {
            State::Basic => BasisStatus::Basic,
            State::Lower => BasisStatus::AtLower,
            State::Upper => BasisStatus::AtUpper,
            State::Zero => BasisStatus::Free,
        };
        Basis {
            columns: (0..self.n).map(st).collect(),
            rows: (self.n..self.n + self.m).map(st).collect(),
        }
    }
}

/// Solves `min c x` over the model.
pub fn solve_lp(model: &LpModel) -> Result<LpSolution> {
    Ok(solve_lp_warm(model, None)?.0)
}

/// Solves from a starting basis (entries beyond the model are ignored and
/// missing ones default to the all-logical start). Also returns the final
/// basis. For infeasible models the reported duals are those of the
/// phase-one problem, which price columns that could reduce infeasibility.
pub fn solve_lp_warm(model: &LpModel, start: Option<&Basis>) -> Result<(LpSolution, Basis)> {
    model.validate()?;
    let mut s = Simplex::new(model);
    if let Some(b) = start {
        s.load_basis(b);
    }
    s.reinvert();
    let mut status = s.iterate()?;
    // a fresh factorization guards against drift before accepting the answer
    for _ in 0..3 {
        if status != LpStatus::Optimal {
            break;
        }
        s.reinvert();
        if s.infeasibility_costs().is_none() {
            break;
        }
        status = s.iterate()?;
    }

    let n = s.n;
    let mut values: Vec<f64> = s.x[..n].to_vec();
    for (j, v) in values.iter_mut().enumerate() {
        *v = v.clamp(s.lower[j], s.upper[j]);
    }
    let mut y: Vec<f64> = match s.infeasibility_costs() {
        Some(c) => c,
        None => s.head.iter().map(|&b| s.cost[b]).collect(),
    };
    s.btran_in_place(&mut y);
    let objective = match status {
        LpStatus::Optimal => {
            let violation = model.max_relative_violation(&values);
            if violation > FEASIBILITY_TOL {
                return Err(Error::Numerical(format!(
                    "optimal basis violates the model by {violation:e} (relative)"
                )));
            }
            model.objective_value(&values)
        }
        LpStatus::Infeasible => f64::NAN,
        LpStatus::Unbounded => f64::NEG_INFINITY,
    };
    let basis = s.basis();
    Ok((
        LpSolution {
            status,
            objective,
            values,
            duals: y,
            iterations: s.pivots,
        },
        basis,
    ))
}
