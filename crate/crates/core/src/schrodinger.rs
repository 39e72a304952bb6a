//! Best two-transition (Schrödinger) color along a ray, by exhaustive
//! enumeration of transition bins with fractional values.
//!
//! A band-pass curve is zero outside a band of ones and a band-stop curve is
//! its complement pattern. Two bins `i < j` carry free values `alpha`, `beta`:
//! either one bin at each edge of the band, or two adjacent bins together
//! forming one edge while the other edge is sharp. Ray membership reads
//!
//! ```text
//! alpha * a_i + beta * a_j - c * d = origin - (sum of the fixed one-bins)
//! ```
//!
//! which is a 3x3 system in `(alpha, beta, c)`. Candidates with both
//! fractional values in `[0, 1]` are kept and the largest `c` wins.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::SolverConfig;
use crate::probe::{direction_to_target, Prober, SphericalDirection};
use crate::spectral::{Tristimulus, WeightedCmf};

/// Slack allowed on `alpha`, `beta` outside `[0, 1]`.
const ENDPOINT_TOL: f64 = 1e-10;
/// Relative determinant below which a pair is skipped as singular.
const SINGULAR_RTOL: f64 = 1e-14;
/// Relative margin by which a later candidate must exceed the incumbent.
const TIE_RTOL: f64 = 1e-12;
/// Residual bound for the over-determined single-bin and constant cases.
const RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TwoTransitionKind {
    /// Type I: a band of ones in a field of zeros.
    BandPass,
    /// Type II: a band of zeros in a field of ones.
    BandStop,
    StepUp,
    StepDown,
    AllZero,
    AllOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoTransitionSolution {
    pub kind: TwoTransitionKind,
    /// Level inside the band: 1 for band-pass shapes, 0 for band-stop shapes.
    pub band_level: f64,
    /// Bins `[band_start, band_end)` held at `band_level`, before the
    /// fractional bins are applied.
    pub band_start: usize,
    pub band_end: usize,
    pub i: usize,
    pub j: usize,
    pub alpha: f64,
    pub beta: f64,
    pub c: f64,
    /// `A_W' rho` of the reconstructed reflectance.
    pub xyz: Tristimulus,
}

impl TwoTransitionSolution {
    /// Rebuilds the reflectance on `n` bins.
    pub fn reflectance(&self, n: usize) -> Vec<f64> {
        match self.kind {
            TwoTransitionKind::AllZero => return vec![0.0; n],
            TwoTransitionKind::AllOne => return vec![1.0; n],
            _ => {}
        }
        let mut rho = vec![1.0 - self.band_level; n];
        for v in &mut rho[self.band_start..self.band_end] {
            *v = self.band_level;
        }
        rho[self.i] = self.alpha;
        rho[self.j] = self.beta;
        rho
    }
}

fn det3(c0: [f64; 3], c1: [f64; 3], c2: [f64; 3]) -> f64 {
    c0[0] * (c1[1] * c2[2] - c1[2] * c2[1]) - c1[0] * (c0[1] * c2[2] - c0[2] * c2[1])
        + c2[0] * (c0[1] * c1[2] - c0[2] * c1[1])
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Cramer's rule for `[c0 c1 c2] x = rhs`; `None` if relatively singular.
fn solve3(c0: [f64; 3], c1: [f64; 3], c2: [f64; 3], rhs: [f64; 3]) -> Option<[f64; 3]> {
    let det = det3(c0, c1, c2);
    let scale = norm3(c0) * norm3(c1) * norm3(c2);
    if !(det.abs() > SINGULAR_RTOL * scale) {
        return None;
    }
    Some([
        det3(rhs, c1, c2) / det,
        det3(c0, rhs, c2) / det,
        det3(c0, c1, rhs) / det,
    ])
}

/// Least squares for `[c0 c1] x = rhs`; returns the solution and residual norm.
fn lstsq2(c0: [f64; 3], c1: [f64; 3], rhs: [f64; 3]) -> Option<([f64; 2], f64)> {
    let dot = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let (g00, g01, g11) = (dot(c0, c0), dot(c0, c1), dot(c1, c1));
    let det = g00 * g11 - g01 * g01;
    if !(det.abs() > SINGULAR_RTOL * g00 * g11) {
        return None;
    }
    let (b0, b1) = (dot(c0, rhs), dot(c1, rhs));
    let x = [(g11 * b0 - g01 * b1) / det, (g00 * b1 - g01 * b0) / det];
    let r: Vec<f64> = (0..3).map(|k| c0[k] * x[0] + c1[k] * x[1] - rhs[k]).collect();
    Some((x, (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt()))
}

fn in_unit(v: f64) -> bool {
    (-ENDPOINT_TOL..=1.0 + ENDPOINT_TOL).contains(&v)
}

#[derive(Clone, Copy)]
struct Candidate {
    kind: TwoTransitionKind,
    band_start: usize,
    band_end: usize,
    i: usize,
    j: usize,
    alpha: f64,
    beta: f64,
    c: f64,
}

fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Best two-transition color on the ray `origin + c * offset`, `c > 0` maximal.
pub fn two_transition_along(
    wcmf: &WeightedCmf,
    origin: Tristimulus,
    offset: Tristimulus,
) -> Result<TwoTransitionSolution> {
    let n = wcmf.len();
    if !(offset.norm() > 0.0) || !offset.is_finite() {
        return Err(Error::Argument("zero-length ray direction".into()));
    }
    let a: Vec<[f64; 3]> = wcmf.values().to_vec();
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push([0.0; 3]);
    for row in &a {
        let last: [f64; 3] = *prefix.last().expect("non-empty");
        prefix.push([last[0] + row[0], last[1] + row[1], last[2] + row[2]]);
    }
    let band = |lo: usize, hi: usize| sub3(prefix[hi], prefix[lo]);
    let wp = prefix[n];
    let o = origin.to_array();
    let neg_d = (-offset).to_array();
    let scale = norm3(o).max(norm3(wp)).max(1.0);

    let mut best: Option<Candidate> = None;
    let mut consider = |cand: Candidate| {
        if best.is_none_or(|b| cand.c > b.c + TIE_RTOL * b.c.abs().max(1.0)) {
            best = Some(cand);
        }
    };
    let zero = Candidate {
        kind: TwoTransitionKind::AllZero,
        band_start: 0,
        band_end: 0,
        i: 0,
        j: 0,
        alpha: 0.0,
        beta: 0.0,
        c: 0.0,
    };

    // Constant curves only lie on the ray when the ray passes through black or white.
    for (kind, point) in [(TwoTransitionKind::AllZero, [0.0; 3]), (TwoTransitionKind::AllOne, wp)] {
        let rhs = sub3(point, o);
        let d = offset.to_array();
        let c = (rhs[0] * d[0] + rhs[1] * d[1] + rhs[2] * d[2]) / offset.dot(offset);
        let res = norm3([rhs[0] - c * d[0], rhs[1] - c * d[1], rhs[2] - c * d[2]]);
        if res < RESIDUAL_TOL * scale {
            consider(Candidate { kind, c, ..zero });
        }
    }

    // `fixed` is the tristimulus of the one-bins other than i and j; `rising`
    // constrains an edge spread over both bins to be monotone.
    let mut pair = |kind, band_start, band_end, i: usize, j: usize, fixed: [f64; 3], rising: Option<bool>| {
        if let Some([alpha, beta, c]) = solve3(a[i], a[j], neg_d, sub3(o, fixed)) {
            let monotone = match rising {
                None => true,
                Some(true) => alpha <= beta + ENDPOINT_TOL,
                Some(false) => alpha + ENDPOINT_TOL >= beta,
            };
            if in_unit(alpha) && in_unit(beta) && monotone {
                consider(Candidate { kind, band_start, band_end, i, j, alpha, beta, c });
            }
        }
    };
    let (pass, stop) = (TwoTransitionKind::BandPass, TwoTransitionKind::BandStop);
    for i in 0..n {
        for j in i + 1..n {
            // one fractional bin at each edge of the band (i, j)
            let inner = band(i + 1, j);
            pair(pass, i + 1, j, i, j, inner, None);
            pair(stop, i + 1, j, i, j, sub3(sub3(sub3(wp, inner), a[i]), a[j]), None);
        }
        if i + 1 < n {
            // both fractional bins on the leading edge of the band [i + 2, k)
            for k in i + 3..=n {
                let inner = band(i + 2, k);
                pair(pass, i + 2, k, i, i + 1, inner, Some(true));
                pair(stop, i + 2, k, i, i + 1, sub3(sub3(sub3(wp, inner), a[i]), a[i + 1]), Some(false));
            }
            // both on the trailing edge of the band [k, i)
            for k in 0..i {
                let inner = band(k, i);
                pair(pass, k, i, i, i + 1, inner, Some(false));
                pair(stop, k, i, i, i + 1, sub3(sub3(sub3(wp, inner), a[i]), a[i + 1]), Some(true));
            }
        }
    }
    for (i, &ai) in a.iter().enumerate() {
        // Single fractional bin: pulse (rest zero) and notch (rest one).
        for (kind, base) in [(pass, [0.0; 3]), (stop, sub3(wp, ai))] {
            if let Some(([alpha, c], res)) = lstsq2(ai, neg_d, sub3(o, base)) {
                if res < RESIDUAL_TOL * scale && in_unit(alpha) {
                    consider(Candidate { kind, i, j: i, alpha, beta: alpha, c, ..zero });
                }
            }
        }
    }

    let b = best.ok_or_else(|| Error::Internal("no two-transition curve meets the ray".into()))?;
    let mut sol = TwoTransitionSolution {
        kind: b.kind,
        band_level: if b.kind == TwoTransitionKind::BandStop { 0.0 } else { 1.0 },
        band_start: b.band_start,
        band_end: b.band_end,
        i: b.i,
        j: b.j,
        alpha: b.alpha,
        beta: b.beta,
        c: b.c,
        xyz: Tristimulus::default(),
    };
    let rho = sol.reflectance(n);
    sol.xyz = wcmf.tristimulus(&rho);
    sol.kind = refine_kind(sol.kind, &rho);
    Ok(sol)
}

/// Relabels band curves whose two ends differ in level as steps.
fn refine_kind(kind: TwoTransitionKind, rho: &[f64]) -> TwoTransitionKind {
    if !matches!(kind, TwoTransitionKind::BandPass | TwoTransitionKind::BandStop) {
        return kind;
    }
    let one = |v: f64| v >= 1.0 - ENDPOINT_TOL;
    let zero = |v: f64| v <= ENDPOINT_TOL;
    let (first, last) = (rho[0], rho[rho.len() - 1]);
    if zero(first) && one(last) {
        TwoTransitionKind::StepUp
    } else if one(first) && zero(last) {
        TwoTransitionKind::StepDown
    } else {
        kind
    }
}

/// Best two-transition color on the ray from the 50% gray point through `xyz_targ`.
pub fn two_transition_optimal(wcmf: &WeightedCmf, xyz_targ: Tristimulus) -> Result<TwoTransitionSolution> {
    let g = wcmf.gray50();
    let d = xyz_targ - g;
    if !(d.norm() > 1e-12 * g.norm().max(1.0)) {
        return Err(Error::Argument(format!("target {xyz_targ} coincides with the gray point")));
    }
    two_transition_along(wcmf, g, d)
}

/// LP optimum and two-transition optimum on the same ray.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonRecord {
    pub direction: SphericalDirection,
    pub xyz_targ: Tristimulus,
    pub c_lp: f64,
    pub c_two: f64,
    /// `(c_lp - c_two) * |xyz_targ - gray50|`, in XYZ units.
    pub delta_distance: f64,
    pub lp_transitions: usize,
    pub lp_kind: crate::probe::TransitionKind,
    pub xyz_lp: Tristimulus,
    pub xyz_two: Tristimulus,
    pub two: TwoTransitionSolution,
    pub lp_status: crate::lp::LpStatus,
}

/// Compares the two optima along one direction using an existing prober.
pub fn compare_with(prober: &mut Prober<'_>, dir: SphericalDirection) -> Result<ComparisonRecord> {
    let wcmf = prober.wcmf();
    let target = direction_to_target(wcmf, dir);
    let probe = prober.probe_direction(dir)?;
    if !probe.is_optimal() {
        return Err(Error::Solver(probe.solver_status));
    }
    let two = two_transition_optimal(wcmf, target)?;
    let len = (target - wcmf.gray50()).norm();
    Ok(ComparisonRecord {
        direction: dir,
        xyz_targ: target,
        c_lp: probe.c,
        c_two: two.c,
        delta_distance: (probe.c - two.c) * len,
        lp_transitions: probe.profile.count,
        lp_kind: probe.profile.kind,
        xyz_lp: probe.xyz_opt,
        xyz_two: two.xyz,
        two,
        lp_status: probe.solver_status,
    })
}

pub fn compare_direction(
    wcmf: &WeightedCmf,
    dir: SphericalDirection,
    config: &SolverConfig,
) -> Result<ComparisonRecord> {
    compare_with(&mut Prober::new(wcmf, *config), dir)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::CmfSet;

    #[test]
    fn white_point_is_all_one() {
        let w = WeightedCmf::equal_energy(&CmfSet::cie1931_2deg());
        let s = two_transition_optimal(&w, w.white_point()).unwrap();
        assert_eq!(s.kind, TwoTransitionKind::AllOne);
        assert!((s.c - 1.0).abs() < 1e-12);
        assert!(s.xyz.max_abs_diff(w.white_point()) < 1e-12);
    }

    #[test]
    fn gray_target_is_rejected() {
        let w = WeightedCmf::equal_energy(&CmfSet::cie1931_2deg());
        assert!(two_transition_optimal(&w, w.gray50()).is_err());
    }

    #[test]
    fn cramer_matches_substitution() {
        let x = solve3([2.0, 0.0, 1.0], [1.0, 3.0, 0.0], [0.0, 1.0, 4.0], [5.0, 11.0, 9.0]).unwrap();
        // [2 1 0; 0 3 1; 1 0 4] x = [5, 11, 9] -> x = (1, 3, 2)
        for (a, b) in x.iter().zip([1.0, 3.0, 2.0]) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(solve3([1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 1.0, 0.0], [1.0, 1.0, 1.0]).is_none());
    }

    #[test]
    fn reconstruction_shapes() {
        let s = TwoTransitionSolution {
            kind: TwoTransitionKind::BandStop,
            band_level: 0.0,
            band_start: 2,
            band_end: 4,
            i: 1,
            j: 4,
            alpha: 0.25,
            beta: 0.5,
            c: 1.0,
            xyz: Tristimulus::default(),
        };
        assert_eq!(s.reflectance(6), vec![1.0, 0.25, 0.0, 0.0, 0.5, 1.0]);
        let p = TwoTransitionSolution { kind: TwoTransitionKind::BandPass, band_level: 1.0, ..s };
        assert_eq!(p.reflectance(6), vec![0.0, 0.25, 1.0, 1.0, 0.5, 0.0]);
        let edge = TwoTransitionSolution { kind: TwoTransitionKind::StepDown, band_level: 1.0, band_start: 0, band_end: 2, i: 2, j: 3, ..s };
        assert_eq!(edge.reflectance(6), vec![1.0, 1.0, 0.25, 0.5, 0.0, 0.0]);
    }
}
