//! Ray probes: the farthest object color along a ray from a point inside
//! the solid, found by linear programming over reflectance and ray scale.
//!
//! For a ray `origin + c * (target - origin)` the probe solves
//!
//! ```text
//! minimize -c
//! s.t.     A_W' rho + c * (origin - target) = origin
//!          0 <= rho <= 1,  c free
//! ```
//!
//! and reports the optimal reflectance together with its transition
//! structure.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{LpProblem, LpSolution, LpStatus, Solver, SolverConfig, VarState};
use crate::spectral::{Tristimulus, WavelengthGrid, WeightedCmf};

/// Default level tolerances for classifying reflectance bins as 0 or 1.
pub const DEFAULT_ZERO_EPS: f64 = 1e-6;
pub const DEFAULT_ONE_EPS: f64 = 1e-6;
/// Re-levelling nonbasic bins for counting is allowed while the optimum
/// moves by at most this distance along the ray (tristimulus units).
pub const DEFAULT_INDIFFERENCE_TOL: f64 = 1e-8;

/// Direction in the `(X', Y', Z')` frame centered on the 50% gray point.
/// `theta` is the azimuth from `+X'`, `phi` the inclination from `+Z'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SphericalDirection {
    pub theta: f64,
    pub phi: f64,
}

impl SphericalDirection {
    /// Wraps `theta` into `[0, 2π)`; `phi` must lie in `[0, π]`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !(0.0..=PI).contains(&phi) {
            return Err(Error::Argument(format!("invalid direction theta={theta}, phi={phi}")));
        }
        Ok(Self { theta: theta.rem_euclid(TAU), phi })
    }

    /// Direction of a nonzero offset vector.
    pub fn from_vector(v: Tristimulus) -> Result<Self> {
        let r = v.norm();
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Argument("zero-length direction".into()));
        }
        let phi = (v.z / r).clamp(-1.0, 1.0).acos();
        Self::new(v.y.atan2(v.x), phi)
    }

    pub fn unit_vector(&self) -> Tristimulus {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        Tristimulus::new(sp * ct, sp * st, cp)
    }

    /// The opposite direction `(theta + π, π - phi)`.
    pub fn antipode(&self) -> Self {
        Self { theta: (self.theta + PI).rem_euclid(TAU), phi: PI - self.phi }
    }
}

/// `gray50 + (sin φ cos θ, sin φ sin θ, cos φ)`.
pub fn direction_to_target(wcmf: &WeightedCmf, dir: SphericalDirection) -> Tristimulus {
    wcmf.gray50() + dir.unit_vector()
}

/// Reflectance samples on a wavelength grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reflectance {
    pub grid: WavelengthGrid,
    pub values: Vec<f64>,
}

impl Reflectance {
    pub fn new(grid: WavelengthGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.count {
            return Err(Error::Grid(format!(
                "{} reflectance samples for a grid of {}",
                values.len(),
                grid.count
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest excursion outside `[0, 1]`.
    pub fn bound_violation(&self) -> f64 {
        self.values.iter().map(|&v| (-v).max(v - 1.0).max(0.0)).fold(0.0, f64::max)
    }
}

/// `1 - rho`, bin by bin.
pub fn complement(rho: &Reflectance) -> Reflectance {
    Reflectance { grid: rho.grid, values: rho.values.iter().map(|v| 1.0 - v).collect() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransitionKind {
    /// Mostly zero with pockets of one (band-pass like).
    #[serde(rename = "type-i-like")]
    TypeILike,
    /// Mostly one with pockets of zero (band-stop like).
    #[serde(rename = "type-ii-like")]
    TypeIILike,
    Constant,
}

impl TransitionKind {
    pub fn flipped(self) -> Self {
        match self {
            TransitionKind::TypeILike => TransitionKind::TypeIILike,
            TransitionKind::TypeIILike => TransitionKind::TypeILike,
            TransitionKind::Constant => TransitionKind::Constant,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionProfile {
    pub count: usize,
    /// One bin index per transition: the fractional bin carrying it, or the
    /// first bin of the new run for a sharp 0/1 edge.
    pub transition_bins: Vec<usize>,
    pub kind: TransitionKind,
    pub fractional_bins: Vec<(usize, f64)>,
}

#[derive(Clone, Copy, PartialEq)]
enum Bin {
    Level(u8),
    Frac(f64),
}

/// Number of monotone pieces in `seq` (equal neighbours ignored), with the
/// index of the element where each piece starts.
fn monotone_pieces(seq: &[f64]) -> Vec<usize> {
    let mut starts = Vec::new();
    let mut last_sign = 0.0;
    for (t, w) in seq.windows(2).enumerate() {
        let s = (w[1] - w[0]).signum() * ((w[1] != w[0]) as u8 as f64);
        if s != 0.0 && s != last_sign {
            starts.push(t);
            last_sign = s;
        }
    }
    starts
}

/// Classifies bins as 0, 1 or fractional and counts transitions.
///
/// A fractional cluster between two runs contributes one transition per
/// monotone piece of `(left level, cluster values, right level)`: a single
/// monotone ramp between different levels is one transition, a dip or bump
/// between equal levels is two, and each extra reversal adds two more. A
/// cluster at either end of the spectrum only counts complete reversals, in
/// pairs, so that the parity of the count always matches the first and last
/// run levels.
pub fn count_transitions(rho: &[f64], zero_eps: f64, one_eps: f64) -> TransitionProfile {
    let bins: Vec<Bin> = rho
        .iter()
        .map(|&v| {
            if v <= zero_eps {
                Bin::Level(0)
            } else if v >= 1.0 - one_eps {
                Bin::Level(1)
            } else {
                Bin::Frac(v)
            }
        })
        .collect();
    let fractional_bins: Vec<(usize, f64)> = bins
        .iter()
        .enumerate()
        .filter_map(|(i, b)| match b {
            Bin::Frac(v) => Some((i, *v)),
            _ => None,
        })
        .collect();

    let mut count = 0;
    let mut transition_bins = Vec::new();
    let mut first_level: Option<u8> = None;
    let mut prev_level: Option<u8> = None;
    let mut cluster_start: Option<usize> = None;

    let frac_values = |from: usize, to: usize| rho[from..to].to_vec();

    for (i, b) in bins.iter().enumerate() {
        match *b {
            Bin::Frac(_) => {
                cluster_start.get_or_insert(i);
            }
            Bin::Level(level) => {
                match (prev_level, cluster_start.take()) {
                    (Some(a), None) if a != level => {
                        count += 1;
                        transition_bins.push(i);
                    }
                    (Some(a), Some(cs)) => {
                        let mut seq = vec![a as f64];
                        seq.extend(frac_values(cs, i));
                        seq.push(level as f64);
                        for t in monotone_pieces(&seq) {
                            count += 1;
                            transition_bins.push(cs + t.min(i - cs - 1));
                        }
                    }
                    (None, Some(cs)) => {
                        let mut seq = frac_values(cs, i);
                        seq.push(level as f64);
                        let starts = monotone_pieces(&seq);
                        let reversals = starts.len().saturating_sub(1);
                        for &t in starts.iter().skip(1).take(reversals / 2 * 2) {
                            count += 1;
                            transition_bins.push(cs + (t + 1).min(i - cs - 1));
                        }
                    }
                    _ => {}
                }
                if first_level.is_none() {
                    first_level = Some(level);
                }
                prev_level = Some(level);
            }
        }
    }
    if let Some(cs) = cluster_start {
        let n = rho.len();
        let mut seq: Vec<f64> = prev_level.map(|a| vec![a as f64]).unwrap_or_default();
        let offset = seq.len();
        seq.extend(frac_values(cs, n));
        let starts = monotone_pieces(&seq);
        let reversals = starts.len().saturating_sub(1);
        for &t in starts.iter().skip(1).take(reversals / 2 * 2) {
            count += 1;
            transition_bins.push((cs + t + 1 - offset).min(n - 1));
        }
    }

    let kind = match (count, first_level) {
        (0, _) | (_, None) => TransitionKind::Constant,
        (_, Some(0)) => TransitionKind::TypeILike,
        _ => TransitionKind::TypeIILike,
    };
    TransitionProfile { count, transition_bins, kind, fractional_bins }
}

/// Outcome of one ray solve.
#[derive(Debug, Clone, Serialize)]
pub struct RayProbe {
    pub direction: SphericalDirection,
    /// Ray origin; the 50% gray point unless probing a slice.
    pub origin: Tristimulus,
    pub xyz_targ: Tristimulus,
    /// Ray scale: `xyz_opt = origin + c * (xyz_targ - origin)`.
    pub c: f64,
    pub rho: Reflectance,
    pub xyz_opt: Tristimulus,
    /// Transition structure of `rho` after re-levelling indifferent bins.
    pub profile: TransitionProfile,
    /// Bins whose level was changed for counting; `rho` itself is untouched.
    pub relevelled_bins: Vec<usize>,
    pub solver_status: LpStatus,
    pub iterations: usize,
}

impl RayProbe {
    pub fn is_optimal(&self) -> bool {
        self.solver_status == LpStatus::Optimal
    }

    /// Euclidean distance from the ray origin to `xyz_opt`, measured along the ray.
    pub fn distance(&self) -> f64 {
        self.c * (self.xyz_targ - self.origin).norm()
    }
}

/// Holds a reusable LP template and solver workspace for one weighted CMF.
/// Not shareable across threads; create one per worker.
#[derive(Debug)]
pub struct Prober<'a> {
    wcmf: &'a WeightedCmf,
    config: SolverConfig,
    solver: Solver,
    template: LpProblem,
    zero_eps: f64,
    one_eps: f64,
    indifference_tol: f64,
}

impl<'a> Prober<'a> {
    pub fn new(wcmf: &'a WeightedCmf, config: SolverConfig) -> Self {
        let n = wcmf.len();
        let mut columns = Vec::with_capacity(3 * (n + 1));
        for row in wcmf.values() {
            columns.extend_from_slice(row);
        }
        columns.extend_from_slice(&[0.0; 3]);
        let mut objective = vec![0.0; n + 1];
        objective[n] = -1.0;
        let mut lower = vec![0.0; n + 1];
        let mut upper = vec![1.0; n + 1];
        lower[n] = f64::NEG_INFINITY;
        upper[n] = f64::INFINITY;
        let template = LpProblem::from_columns(objective, columns, vec![0.0; 3], lower, upper)
            .expect("weighted CMF values are finite");
        Self {
            wcmf,
            config,
            solver: Solver::new(),
            template,
            zero_eps: DEFAULT_ZERO_EPS,
            one_eps: DEFAULT_ONE_EPS,
            indifference_tol: DEFAULT_INDIFFERENCE_TOL,
        }
    }

    pub fn with_level_eps(mut self, zero_eps: f64, one_eps: f64) -> Self {
        self.zero_eps = zero_eps;
        self.one_eps = one_eps;
        self
    }

    /// Zero disables re-levelling.
    pub fn with_indifference_tol(mut self, tol: f64) -> Self {
        self.indifference_tol = tol;
        self
    }

    pub fn wcmf(&self) -> &'a WeightedCmf {
        self.wcmf
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    /// Builds the LP for the ray from `origin` through `target`.
    pub fn ray_problem(&self, origin: Tristimulus, target: Tristimulus) -> LpProblem {
        let mut p = self.template.clone();
        set_ray(&mut p, self.wcmf.len(), origin, target);
        p
    }

    pub fn probe_target(&mut self, xyz_targ: Tristimulus) -> Result<RayProbe> {
        self.probe_from(self.wcmf.gray50(), xyz_targ)
    }

    pub fn probe_direction(&mut self, dir: SphericalDirection) -> Result<RayProbe> {
        let target = direction_to_target(self.wcmf, dir);
        let mut p = self.probe_from(self.wcmf.gray50(), target)?;
        p.direction = dir;
        Ok(p)
    }

    /// Probes the ray from an arbitrary interior `origin` through `target`.
    pub fn probe_from(&mut self, origin: Tristimulus, target: Tristimulus) -> Result<RayProbe> {
        let offset = target - origin;
        let scale = origin.norm().max(1.0);
        if !(offset.norm() > 1e-12 * scale) || !offset.is_finite() {
            return Err(Error::Argument(format!(
                "target {target} coincides with the ray origin {origin}"
            )));
        }
        let direction = SphericalDirection::from_vector(offset)?;
        let n = self.wcmf.len();
        set_ray(&mut self.template, n, origin, target);
        let sol = self.solver.solve(&self.template, &self.config);
        Ok(self.assemble(direction, origin, target, sol))
    }

    fn assemble(
        &self,
        direction: SphericalDirection,
        origin: Tristimulus,
        target: Tristimulus,
        sol: LpSolution,
    ) -> RayProbe {
        let n = self.wcmf.len();
        let c = sol.x[n];
        let values = sol.x[..n].to_vec();
        let xyz_opt = self.wcmf.tristimulus(&values);
        let budget = self.indifference_tol / (target - origin).norm();
        let (settled, relevelled_bins) = relevel(&values, &sol, budget, self.zero_eps, self.one_eps);
        let profile = count_transitions(&settled, self.zero_eps, self.one_eps);
        RayProbe {
            direction,
            origin,
            xyz_targ: target,
            c,
            rho: Reflectance { grid: *self.wcmf.grid(), values },
            xyz_opt,
            profile,
            relevelled_bins,
            solver_status: sol.status,
            iterations: sol.iterations,
        }
    }
}

/// Copy of `values` where each run of nonbasic bins with negligible reduced
/// cost takes the levels of its neighbours, provided the summed cost of the
/// flips stays within `budget`. A run between different levels keeps one
/// edge, placed where it is cheapest; a run with no settled neighbour takes
/// the cheaper constant level.
fn relevel(values: &[f64], sol: &LpSolution, budget: f64, zero_eps: f64, one_eps: f64) -> (Vec<f64>, Vec<usize>) {
    let n = values.len();
    let mut out = values.to_vec();
    let mut changed = Vec::new();
    if budget <= 0.0 || sol.status != LpStatus::Optimal {
        return (out, changed);
    }
    let free = |j: usize| {
        matches!(sol.states[j], VarState::AtLower | VarState::AtUpper) && sol.reduced_costs[j].abs() <= budget
    };
    let level = |v: f64| {
        if v <= zero_eps {
            Some(0.0)
        } else if v >= 1.0 - one_eps {
            Some(1.0)
        } else {
            None
        }
    };
    let mut s = 0;
    while s < n {
        if !free(s) {
            s += 1;
            continue;
        }
        let mut e = s;
        while e < n && free(e) {
            e += 1;
        }
        let left = if s > 0 { level(values[s - 1]) } else { None };
        let right = if e < n { level(values[e]) } else { None };
        let (l, r) = match (left, right) {
            (Some(l), Some(r)) => (l, r),
            (Some(l), None) => (l, l),
            (None, Some(r)) => (r, r),
            (None, None) => {
                let zeros: f64 = (s..e).filter(|&j| values[j] != 0.0).map(|j| sol.reduced_costs[j].abs()).sum();
                let ones: f64 = (s..e).filter(|&j| values[j] != 1.0).map(|j| sol.reduced_costs[j].abs()).sum();
                let v = if zeros <= ones { 0.0 } else { 1.0 };
                (v, v)
            }
        };
        let flip = |j: usize, to: f64| if values[j] == to { 0.0 } else { sol.reduced_costs[j].abs() };
        // split k: bins [s, k) take l, bins [k, e) take r
        let mut cost: f64 = (s..e).map(|j| flip(j, r)).sum();
        let (mut best, mut best_k) = (cost, s);
        for k in s..e {
            cost += flip(k, l) - flip(k, r);
            if cost < best {
                (best, best_k) = (cost, k + 1);
            }
        }
        if best <= budget {
            for j in s..e {
                let to = if j < best_k { l } else { r };
                if values[j] != to {
                    out[j] = to;
                    changed.push(j);
                }
            }
        }
        s = e;
    }
    (out, changed)
}

fn set_ray(p: &mut LpProblem, n: usize, origin: Tristimulus, target: Tristimulus) {
    let col = (origin - target).to_array();
    p.column_mut(n).copy_from_slice(&col);
    p.rhs_mut().copy_from_slice(&origin.to_array());
}

/// Solves the ray LP from the 50% gray point through `xyz_targ`.
pub fn probe_ray(wcmf: &WeightedCmf, xyz_targ: Tristimulus, config: &SolverConfig) -> Result<RayProbe> {
    Prober::new(wcmf, *config).probe_target(xyz_targ)
}
