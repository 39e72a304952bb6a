//! Dense bounded-variable revised simplex for problems with a handful of
//! equality rows and many box-bounded columns:
//!
//! ```text
//! minimize f'x  subject to  A_eq x = b_eq,  lower <= x <= upper
//! ```
//!
//! Nonbasic variables sit at a finite bound (or at zero when free). The
//! basis is only `m x m` with `m` the number of equality rows, so its
//! inverse is recomputed from scratch after every basis change. Pricing is
//! Dantzig's rule on column-scaled reduced costs; after a run of degenerate pivots the solver switches to
//! Bland's rule until it makes progress again.

use serde::Serialize;

/// Number of consecutive degenerate pivots before Bland's rule kicks in.
const STALL_THRESHOLD: usize = 50;
/// Entries of the pivot column smaller than this are not eligible pivots.
const PIVOT_TOL: f64 = 1e-11;
/// Step lengths below this count as degenerate.
const DEGENERATE_STEP: f64 = 1e-12;
/// Basic values are recomputed from scratch at this iteration interval.
const REFRESH_INTERVAL: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig {
    pub optimality_tol: f64,
    pub constraint_tol: f64,
    /// Iteration cap across both phases; `None` means ten times the column count.
    pub max_iterations: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { optimality_tol: 1e-9, constraint_tol: 3e-9, max_iterations: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

/// `minimize f'x` subject to `A_eq x = b_eq` and `lower <= x <= upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    objective: Vec<f64>,
    /// Column-major, `rows` entries per column.
    columns: Vec<f64>,
    rhs: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProblemError {
    #[error("equality matrix row {row} has {got} entries, expected {expected}")]
    RowLength { row: usize, got: usize, expected: usize },
    #[error("{what} has length {got}, expected {expected}")]
    Length { what: &'static str, got: usize, expected: usize },
    #[error("lower bound {lower} exceeds upper bound {upper} for variable {index}")]
    Bounds { index: usize, lower: f64, upper: f64 },
    #[error("non-finite coefficient in {0}")]
    NonFinite(&'static str),
    #[error("problem needs at least one row and one column")]
    Empty,
}

impl LpProblem {
    pub fn new(
        objective: Vec<f64>,
        eq_rows: &[Vec<f64>],
        eq_rhs: Vec<f64>,
        lower: Vec<f64>,
        upper: Vec<f64>,
    ) -> Result<Self, ProblemError> {
        let n = objective.len();
        let m = eq_rows.len();
        if n == 0 || m == 0 {
            return Err(ProblemError::Empty);
        }
        for (row, r) in eq_rows.iter().enumerate() {
            if r.len() != n {
                return Err(ProblemError::RowLength { row, got: r.len(), expected: n });
            }
        }
        let mut columns = vec![0.0; n * m];
        for j in 0..n {
            for i in 0..m {
                columns[j * m + i] = eq_rows[i][j];
            }
        }
        Self::from_columns(objective, columns, eq_rhs, lower, upper)
    }

    /// Builds a problem from column-major equality coefficients
    /// (`eq_rhs.len()` entries per column).
    pub fn from_columns(
        objective: Vec<f64>,
        columns: Vec<f64>,
        eq_rhs: Vec<f64>,
        lower: Vec<f64>,
        upper: Vec<f64>,
    ) -> Result<Self, ProblemError> {
        let n = objective.len();
        let m = eq_rhs.len();
        if n == 0 || m == 0 {
            return Err(ProblemError::Empty);
        }
        let check_len = |what, got, expected| {
            if got == expected {
                Ok(())
            } else {
                Err(ProblemError::Length { what, got, expected })
            }
        };
        check_len("equality matrix", columns.len(), n * m)?;
        check_len("lower bounds", lower.len(), n)?;
        check_len("upper bounds", upper.len(), n)?;
        if objective.iter().any(|v| !v.is_finite()) {
            return Err(ProblemError::NonFinite("objective"));
        }
        if columns.iter().any(|v| !v.is_finite()) {
            return Err(ProblemError::NonFinite("equality matrix"));
        }
        if eq_rhs.iter().any(|v| !v.is_finite()) {
            return Err(ProblemError::NonFinite("right-hand side"));
        }
        for (index, (&l, &u)) in lower.iter().zip(&upper).enumerate() {
            if l.is_nan() || u.is_nan() || l > u || l == f64::INFINITY || u == f64::NEG_INFINITY {
                return Err(ProblemError::Bounds { index, lower: l, upper: u });
            }
        }
        Ok(Self { objective, columns, rhs: eq_rhs, lower, upper })
    }

    pub fn num_rows(&self) -> usize {
        self.rhs.len()
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn column_mut(&mut self, j: usize) -> &mut [f64] {
        let m = self.num_rows();
        &mut self.columns[j * m..(j + 1) * m]
    }

    pub fn rhs_mut(&mut self) -> &mut [f64] {
        &mut self.rhs
    }

    pub fn column(&self, j: usize) -> &[f64] {
        let m = self.num_rows();
        &self.columns[j * m..(j + 1) * m]
    }

    /// `max |A x - b|` together with the largest bound violation.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let m = self.num_rows();
        let mut ax = vec![0.0; m];
        for (j, xj) in x.iter().enumerate() {
            for (acc, a) in ax.iter_mut().zip(self.column(j)) {
                *acc += a * xj;
            }
        }
        let eq = ax.iter().zip(&self.rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let bounds = x
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&v, (&l, &u))| (l - v).max(v - u).max(0.0))
            .fold(0.0, f64::max);
        eq.max(bounds)
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(f, v)| f * v).sum()
    }
}

/// Where a variable ended up in the final basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VarState {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free variable resting at zero.
    FreeZero,
}

#[derive(Debug, Clone, Serialize)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective_value: f64,
    pub status: LpStatus,
    pub iterations: usize,
    pub max_constraint_violation: f64,
    /// Basic variable of each row; indices at or beyond `x.len()` are
    /// artificial columns left in the basis at zero.
    pub basis: Vec<usize>,
    pub states: Vec<VarState>,
    /// Phase-2 reduced costs `f_j - y'A_j` at termination (unscaled).
    pub reduced_costs: Vec<f64>,
    pub duals: Vec<f64>,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Basic(usize),
    Lower,
    Upper,
    Free,
}

/// Reusable solver workspace. One instance per worker thread.
#[derive(Debug, Default)]
pub struct Solver {
    m: usize,
    n: usize,
    /// Column-major `m x m` inverse of the basis.
    binv: Vec<f64>,
    basis: Vec<usize>,
    state: Vec<State>,
    x: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    art_sign: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
    w: Vec<f64>,
    scratch: Vec<f64>,
    /// `1 / max|A_j|` per column (1 for empty columns and artificials).
    col_scale: Vec<f64>,
}

enum Phase {
    Done,
    Unbounded,
    IterationLimit,
}

impl Solver {
    pub fn new() -> Self {
        Self::default()
    }

    /// Coefficient of row `i` in column `j`, artificials included.
    #[inline]
    fn coef<'a>(&'a self, p: &'a LpProblem, j: usize) -> ColumnRef<'a> {
        if j < self.n {
            ColumnRef::Dense(p.column(j))
        } else {
            ColumnRef::Unit(j - self.n, self.art_sign[j - self.n])
        }
    }

    fn setup(&mut self, p: &LpProblem) {
        let (m, n) = (p.num_rows(), p.num_vars());
        self.m = m;
        self.n = n;
        let total = n + m;
        self.lower.clear();
        self.lower.extend_from_slice(&p.lower);
        self.upper.clear();
        self.upper.extend_from_slice(&p.upper);
        self.x.clear();
        self.state.clear();
        for j in 0..n {
            let (l, u) = (p.lower[j], p.upper[j]);
            if l.is_finite() {
                self.x.push(l);
                self.state.push(State::Lower);
            } else if u.is_finite() {
                self.x.push(u);
                self.state.push(State::Upper);
            } else {
                self.x.push(0.0);
                self.state.push(State::Free);
            }
        }
        let mut resid = p.rhs.clone();
        for j in 0..n {
            let xj = self.x[j];
            if xj != 0.0 {
                for (r, a) in resid.iter_mut().zip(p.column(j)) {
                    *r -= a * xj;
                }
            }
        }
        self.art_sign = resid.iter().map(|r| if *r < 0.0 { -1.0 } else { 1.0 }).collect();
        self.basis = (n..total).collect();
        for (i, r) in resid.iter().enumerate() {
            self.x.push(r.abs());
            self.lower.push(0.0);
            self.upper.push(f64::INFINITY);
            self.state.push(State::Basic(i));
        }
        self.cost.clear();
        self.cost.resize(total, 0.0);
        self.binv = vec![0.0; m * m];
        self.y = vec![0.0; m];
        self.d = vec![0.0; total];
        self.w = vec![0.0; m];
        self.scratch = vec![0.0; m * m];
        self.col_scale.clear();
        self.col_scale.extend((0..n).map(|j| {
            let mx = p.column(j).iter().fold(0.0f64, |a, v| a.max(v.abs()));
            if mx > 0.0 {
                1.0 / mx
            } else {
                1.0
            }
        }));
        self.col_scale.resize(total, 1.0);
    }

    /// Inverts the current basis by Gauss-Jordan elimination with partial
    /// pivoting. Returns false if the basis is numerically singular.
    fn refactor(&mut self, p: &LpProblem) -> bool {
        let m = self.m;
        let mut a = std::mem::take(&mut self.scratch);
        for (k, &j) in self.basis.iter().enumerate() {
            for i in 0..m {
                a[k * m + i] = self.coef(p, j).get(i);
            }
        }
        let inv = &mut self.binv;
        inv.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        // a is column-major: a[col * m + row].
        let mut ok = true;
        for col in 0..m {
            let (piv, pmax) = (col..m)
                .map(|r| (r, a[col * m + r].abs()))
                .fold((col, -1.0), |acc, v| if v.1 > acc.1 { v } else { acc });
            if pmax < 1e-14 {
                ok = false;
                break;
            }
            if piv != col {
                for c in 0..m {
                    a.swap(c * m + col, c * m + piv);
                    inv.swap(c * m + col, c * m + piv);
                }
            }
            let pv = a[col * m + col];
            for c in 0..m {
                a[c * m + col] /= pv;
                inv[c * m + col] /= pv;
            }
            for r in 0..m {
                if r == col {
                    continue;
                }
                let f = a[col * m + r];
                if f != 0.0 {
                    for c in 0..m {
                        a[c * m + r] -= f * a[c * m + col];
                        inv[c * m + r] -= f * inv[c * m + col];
                    }
                }
            }
        }
        self.scratch = a;
        ok
    }

    /// Recomputes basic values from the nonbasic ones: `x_B = B^-1 (b - N x_N)`.
    fn refresh_basic(&mut self, p: &LpProblem) {
        let m = self.m;
        let mut r = p.rhs.clone();
        for j in 0..self.n + m {
            if matches!(self.state[j], State::Basic(_)) {
                continue;
            }
            let xj = self.x[j];
            if xj != 0.0 {
                let col = self.coef(p, j);
                for (i, ri) in r.iter_mut().enumerate() {
                    *ri -= col.get(i) * xj;
                }
            }
        }
        for (k, &j) in self.basis.iter().enumerate() {
            let mut v = 0.0;
            for (i, ri) in r.iter().enumerate() {
                v += self.binv[i * m + k] * ri;
            }
            self.x[j] = v;
        }
    }

    fn compute_duals(&mut self) {
        let m = self.m;
        for i in 0..m {
            // y_i = sum_k c_B[k] * Binv[k][i]; Binv column-major: Binv[k][i] = binv[i*m + k].
            let mut v = 0.0;
            for k in 0..m {
                v += self.cost[self.basis[k]] * self.binv[i * m + k];
            }
            self.y[i] = v;
        }
    }

    fn reduced_cost(&self, p: &LpProblem, j: usize) -> f64 {
        let col = self.coef(p, j);
        let mut v = self.cost[j];
        for i in 0..self.m {
            v -= self.y[i] * col.get(i);
        }
        v
    }

    /// Picks an entering variable; returns `(index, direction)`. Reduced
    /// costs are compared against `tol` after scaling each column to unit
    /// max-norm, so columns with tiny coefficients are priced fairly.
    fn price(&mut self, p: &LpProblem, tol: f64, bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        let mut best_score = 0.0;
        for j in 0..self.n + self.m {
            let dir = match self.state[j] {
                State::Basic(_) => continue,
                _ if self.upper[j] - self.lower[j] <= 0.0 => continue,
                st => {
                    let dj = self.reduced_cost(p, j) * self.col_scale[j];
                    self.d[j] = dj;
                    match st {
                        State::Lower if dj < -tol => 1.0,
                        State::Upper if dj > tol => -1.0,
                        State::Free if dj.abs() > tol => -dj.signum(),
                        _ => continue,
                    }
                }
            };
            if bland {
                return Some((j, dir));
            }
            let score = self.d[j].abs();
            if score > best_score {
                best_score = score;
                best = Some((j, dir));
            }
        }
        best
    }

    fn run_phase(&mut self, p: &LpProblem, cfg: &SolverConfig, iters: &mut usize, limit: usize) -> Phase {
        let m = self.m;
        let mut degenerate_run = 0usize;
        let mut since_refresh = 0usize;
        if !self.refactor(p) {
            return Phase::IterationLimit;
        }
        loop {
            self.compute_duals();
            let bland = degenerate_run >= STALL_THRESHOLD;
            let Some((q, dir)) = self.price(p, cfg.optimality_tol, bland) else {
                return Phase::Done;
            };
            if *iters >= limit {
                return Phase::IterationLimit;
            }
            *iters += 1;

            // w = B^-1 A_q
            let col = if q < self.n {
                ColumnRef::Dense(p.column(q))
            } else {
                ColumnRef::Unit(q - self.n, self.art_sign[q - self.n])
            };
            for k in 0..m {
                let mut v = 0.0;
                for i in 0..m {
                    v += self.binv[i * m + k] * col.get(i);
                }
                self.w[k] = v;
            }

            // Ratio test. Basic variable k moves at rate -dir * w[k].
            let mut step = self.upper[q] - self.lower[q];
            let mut leave: Option<(usize, bool)> = None;
            let wmax = self.w.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            for k in 0..m {
                let rate = -dir * self.w[k];
                if rate.abs() <= PIVOT_TOL * wmax.max(1.0) {
                    continue;
                }
                let j = self.basis[k];
                let (limit_k, to_upper) = if rate < 0.0 {
                    if !self.lower[j].is_finite() {
                        continue;
                    }
                    (((self.x[j] - self.lower[j]) / -rate).max(0.0), false)
                } else {
                    if !self.upper[j].is_finite() {
                        continue;
                    }
                    (((self.upper[j] - self.x[j]) / rate).max(0.0), true)
                };
                // Ties go to the smallest basic index; a tie with the
                // entering variable's own bound keeps the bound flip.
                let tie = if step.is_finite() { 1e-12 * step.max(1.0) } else { 0.0 };
                let take = if limit_k < step - tie {
                    true
                } else if limit_k <= step + tie {
                    leave.is_some_and(|(lk, _)| j < self.basis[lk])
                } else {
                    false
                };
                if take {
                    step = step.min(limit_k);
                    leave = Some((k, to_upper));
                }
            }
            if !step.is_finite() {
                return Phase::Unbounded;
            }

            self.x[q] += dir * step;
            for k in 0..m {
                let j = self.basis[k];
                self.x[j] -= dir * step * self.w[k];
            }
            match leave {
                None => {
                    // Bound flip.
                    if dir > 0.0 {
                        self.x[q] = self.upper[q];
                        self.state[q] = State::Upper;
                    } else {
                        self.x[q] = self.lower[q];
                        self.state[q] = State::Lower;
                    }
                }
                Some((k, to_upper)) => {
                    let out = self.basis[k];
                    if to_upper {
                        self.x[out] = self.upper[out];
                        self.state[out] = State::Upper;
                    } else {
                        self.x[out] = self.lower[out];
                        self.state[out] = State::Lower;
                    }
                    self.basis[k] = q;
                    self.state[q] = State::Basic(k);
                    if !self.refactor(p) {
                        return Phase::IterationLimit;
                    }
                }
            }
            since_refresh += 1;
            if leave.is_some() || since_refresh >= REFRESH_INTERVAL {
                self.refresh_basic(p);
                since_refresh = 0;
            }
            if step <= DEGENERATE_STEP {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
        }
    }

    pub fn solve(&mut self, p: &LpProblem, cfg: &SolverConfig) -> LpSolution {
        self.setup(p);
        let (n, m) = (self.n, self.m);
        let limit = cfg.max_iterations.unwrap_or(10 * n);
        let mut iters = 0;

        // Phase 1: minimize the sum of artificials.
        for j in n..n + m {
            self.cost[j] = 1.0;
        }
        let phase1 = self.run_phase(p, cfg, &mut iters, limit);
        self.refresh_basic(p);
        let infeas: f64 = (n..n + m).map(|j| self.x[j]).sum();
        let scale = p.rhs.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        let status = match phase1 {
            Phase::IterationLimit => Some(LpStatus::IterationLimit),
            _ if infeas > cfg.constraint_tol * scale => Some(LpStatus::Infeasible),
            _ => None,
        };

        let status = match status {
            Some(s) => s,
            None => {
                // Phase 2: artificials pinned to zero.
                for j in n..n + m {
                    self.cost[j] = 0.0;
                    self.upper[j] = 0.0;
                    if !matches!(self.state[j], State::Basic(_)) {
                        self.x[j] = 0.0;
                        self.state[j] = State::Lower;
                    }
                }
                self.cost[..n].copy_from_slice(&p.objective);
                let phase2 = self.run_phase(p, cfg, &mut iters, limit);
                self.refresh_basic(p);
                match phase2 {
                    Phase::Done => LpStatus::Optimal,
                    Phase::Unbounded => LpStatus::Unbounded,
                    Phase::IterationLimit => LpStatus::IterationLimit,
                }
            }
        };

        self.compute_duals();
        let reduced_costs: Vec<f64> = (0..n).map(|j| self.reduced_cost(p, j)).collect();
        let x: Vec<f64> = self.x[..n].to_vec();
        let max_constraint_violation = p.violation(&x);
        let states = self.state[..n]
            .iter()
            .map(|s| match s {
                State::Basic(_) => VarState::Basic,
                State::Lower => VarState::AtLower,
                State::Upper => VarState::AtUpper,
                State::Free => VarState::FreeZero,
            })
            .collect();
        let status = if status == LpStatus::Optimal && max_constraint_violation > cfg.constraint_tol * scale {
            log::debug!("optimal basis violates constraints by {max_constraint_violation:e}");
            LpStatus::Infeasible
        } else {
            status
        };
        LpSolution {
            objective_value: p.objective_value(&x),
            x,
            status,
            iterations: iters,
            max_constraint_violation,
            basis: self.basis.clone(),
            states,
            reduced_costs,
            duals: self.y.clone(),
        }
    }
}

#[derive(Clone, Copy)]
enum ColumnRef<'a> {
    Dense(&'a [f64]),
    Unit(usize, f64),
}

impl ColumnRef<'_> {
    #[inline]
    fn get(&self, i: usize) -> f64 {
        match *self {
            ColumnRef::Dense(c) => c[i],
            ColumnRef::Unit(r, s) => {
                if r == i {
                    s
                } else {
                    0.0
                }
            }
        }
    }
}

/// One-shot convenience wrapper around [`Solver::solve`].
pub fn solve_lp(problem: &LpProblem, config: &SolverConfig) -> LpSolution {
    Solver::new().solve(problem, config)
}

/// JSON dump of a problem and its solution for debugging. Infinite bounds
/// are written as `null`.
pub fn dump_json(problem: &LpProblem, solution: &LpSolution) -> serde_json::Value {
    let bound = |v: &f64| if v.is_finite() { Some(*v) } else { None };
    let rows: Vec<Vec<f64>> = (0..problem.num_rows())
        .map(|i| (0..problem.num_vars()).map(|j| problem.column(j)[i]).collect())
        .collect();
    serde_json::json!({
        "problem": {
            "objective": problem.objective,
            "eq_matrix": rows,
            "eq_rhs": problem.rhs,
            "lower": problem.lower.iter().map(bound).collect::<Vec<_>>(),
            "upper": problem.upper.iter().map(bound).collect::<Vec<_>>(),
        },
        "solution": solution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    #[test]
    fn fully_determined() {
        let p = LpProblem::new(vec![-1.0], &[vec![1.0]], vec![0.5], vec![0.0], vec![1.0]).unwrap();
        let s = solve_lp(&p, &cfg());
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] - 0.5).abs() < 1e-15);
        assert!((s.objective_value + 0.5).abs() < 1e-15);
    }

    #[test]
    fn simplex_sum() {
        let p = LpProblem::new(
            vec![-1.0, -1.0],
            &[vec![1.0, 1.0]],
            vec![1.0],
            vec![0.0, 0.0],
            vec![1.0, 1.0],
        )
        .unwrap();
        let s = solve_lp(&p, &cfg());
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective_value + 1.0).abs() < 1e-15);
        assert!((s.x[0] + s.x[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn detects_infeasible() {
        let p = LpProblem::new(vec![0.0, 0.0], &[vec![1.0, 1.0]], vec![3.0], vec![0.0, 0.0], vec![1.0, 1.0])
            .unwrap();
        assert_eq!(solve_lp(&p, &cfg()).status, LpStatus::Infeasible);
    }

    #[test]
    fn detects_unbounded() {
        // min -x0 s.t. x0 - x1 = 0, x >= 0.
        let inf = f64::INFINITY;
        let p = LpProblem::new(vec![-1.0, 0.0], &[vec![1.0, -1.0]], vec![0.0], vec![0.0, 0.0], vec![inf, inf])
            .unwrap();
        assert_eq!(solve_lp(&p, &cfg()).status, LpStatus::Unbounded);
    }

    #[test]
    fn free_variable_enters() {
        // min -c s.t. r0 + r1 - c = 1, r in [0,1], c free -> c = 1.
        let inf = f64::INFINITY;
        let p = LpProblem::new(
            vec![0.0, 0.0, -1.0],
            &[vec![1.0, 1.0, -1.0]],
            vec![1.0],
            vec![0.0, 0.0, -inf],
            vec![1.0, 1.0, inf],
        )
        .unwrap();
        let s = solve_lp(&p, &cfg());
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[2] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn iteration_limit_is_reported() {
        let p = LpProblem::new(
            vec![-1.0, -2.0, -3.0],
            &[vec![1.0, 1.0, 1.0]],
            vec![1.5],
            vec![0.0; 3],
            vec![1.0; 3],
        )
        .unwrap();
        let c = SolverConfig { max_iterations: Some(0), ..cfg() };
        assert_eq!(solve_lp(&p, &c).status, LpStatus::IterationLimit);
    }

    #[test]
    fn rejects_crossed_bounds() {
        let e = LpProblem::new(vec![0.0], &[vec![1.0]], vec![0.0], vec![1.0], vec![0.0]);
        assert!(matches!(e, Err(ProblemError::Bounds { index: 0, .. })));
    }

    #[test]
    fn fixed_variables_never_move() {
        let p = LpProblem::new(
            vec![-1.0, -1.0],
            &[vec![1.0, 1.0]],
            vec![1.2],
            vec![0.7, 0.0],
            vec![0.7, 1.0],
        )
        .unwrap();
        let s = solve_lp(&p, &cfg());
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.x[0], 0.7);
        assert!((s.x[1] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn dump_is_valid_json() {
        let p = LpProblem::new(vec![-1.0], &[vec![1.0]], vec![0.5], vec![f64::NEG_INFINITY], vec![1.0]).unwrap();
        let s = solve_lp(&p, &cfg());
        let v = dump_json(&p, &s);
        assert!(v["problem"]["lower"][0].is_null());
        assert_eq!(v["solution"]["status"], "optimal");
    }
}
