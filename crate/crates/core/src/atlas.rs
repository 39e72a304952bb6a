//! Hemisphere sweeps of ray probes, chromaticity-plane projections of
//! high-transition optima, and planar slices of the object color solid.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{LpStatus, SolverConfig};
use crate::probe::{Prober, SphericalDirection, TransitionKind};
use crate::schrodinger::{compare_with, two_transition_along};
use crate::spectral::{Tristimulus, WeightedCmf};

/// Smallest raster accepted by the map builders.
pub const MIN_RASTER_SIZE: usize = 16;
/// Largest tolerated fraction of failed probes in a map.
pub const MAX_FAILURE_RATIO: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Hemisphere {
    /// `phi <= π/2`, toward the white point.
    Upper,
    Lower,
}

impl Hemisphere {
    pub fn opposite(self) -> Self {
        match self {
            Hemisphere::Upper => Hemisphere::Lower,
            Hemisphere::Lower => Hemisphere::Upper,
        }
    }
}

impl fmt::Display for Hemisphere {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Hemisphere::Upper => "upper",
            Hemisphere::Lower => "lower",
        })
    }
}

impl FromStr for Hemisphere {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "upper" | "top" => Ok(Hemisphere::Upper),
            "lower" | "bottom" => Ok(Hemisphere::Lower),
            _ => Err(Error::Argument(format!("unknown hemisphere {s:?}"))),
        }
    }
}

/// Square polar plot of one hemisphere. Pixel `(px, py)` has its center at
/// `u = (px + 0.5) / size * 2 - 1` (right) and `v = 1 - (py + 0.5) / size * 2` (up);
/// radius `r = |(u, v)|` maps to inclination, `atan2(v, u)` to azimuth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PolarRaster {
    pub hemisphere: Hemisphere,
    pub size: usize,
}

impl PolarRaster {
    pub fn new(hemisphere: Hemisphere, size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::Argument("raster size must be positive".into()));
        }
        Ok(Self { hemisphere, size })
    }

    pub fn len(&self) -> usize {
        self.size * self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    fn center(&self, px: usize, py: usize) -> (f64, f64) {
        let s = self.size as f64;
        ((px as f64 + 0.5) / s * 2.0 - 1.0, 1.0 - (py as f64 + 0.5) / s * 2.0)
    }

    /// Direction at a pixel center, or `None` outside the unit disk.
    pub fn pixel_direction(&self, px: usize, py: usize) -> Option<SphericalDirection> {
        let (u, v) = self.center(px, py);
        let r = u.hypot(v);
        if r > 1.0 {
            return None;
        }
        let theta = v.atan2(u).rem_euclid(TAU);
        let phi = match self.hemisphere {
            Hemisphere::Upper => r * FRAC_PI_2,
            Hemisphere::Lower => PI - r * FRAC_PI_2,
        };
        Some(SphericalDirection { theta, phi })
    }

    /// Pixel containing a direction of this hemisphere.
    pub fn direction_pixel(&self, dir: SphericalDirection) -> Option<(usize, usize)> {
        let r = match self.hemisphere {
            Hemisphere::Upper if dir.phi <= FRAC_PI_2 => dir.phi / FRAC_PI_2,
            Hemisphere::Lower if dir.phi >= FRAC_PI_2 => (PI - dir.phi) / FRAC_PI_2,
            _ => return None,
        };
        let (u, v) = (r * dir.theta.cos(), r * dir.theta.sin());
        let s = self.size as f64;
        let px = ((u + 1.0) / 2.0 * s).floor();
        let py = ((1.0 - v) / 2.0 * s).floor();
        let clamp = |p: f64| (p.max(0.0) as usize).min(self.size - 1);
        Some((clamp(px), clamp(py)))
    }

    /// Pixel of the opposite hemisphere holding the antipodal direction.
    pub fn antipodal_pixel(&self, px: usize, py: usize) -> (usize, usize) {
        (self.size - 1 - px, self.size - 1 - py)
    }

    pub fn in_disk_count(&self) -> usize {
        (0..self.len()).filter(|&k| self.pixel_direction(k % self.size, k / self.size).is_some()).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PixelProbe {
    pub count: usize,
    pub kind: TransitionKind,
    pub c: f64,
    pub xyz_opt: Tristimulus,
    /// `delta_distance` for difference maps, NaN otherwise.
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "state", rename_all = "lowercase")]
pub enum Pixel {
    Outside,
    Failed,
    Probed(PixelProbe),
}

impl Pixel {
    pub fn probe(&self) -> Option<&PixelProbe> {
        match self {
            Pixel::Probed(p) => Some(p),
            _ => None,
        }
    }

    pub fn count(&self) -> Option<usize> {
        self.probe().map(|p| p.count)
    }
}

/// Row-major per-pixel probe results for one hemisphere.
#[derive(Debug, Clone, Serialize)]
pub struct TransitionMap {
    pub raster: PolarRaster,
    pub pixels: Vec<Pixel>,
    pub in_disk: usize,
    pub failures: usize,
    /// Converged pixels with an odd transition count.
    pub odd_counts: usize,
    pub has_deltas: bool,
}

impl TransitionMap {
    pub fn get(&self, px: usize, py: usize) -> &Pixel {
        &self.pixels[py * self.raster.size + px]
    }

    pub fn probed(&self) -> impl Iterator<Item = &PixelProbe> {
        self.pixels.iter().filter_map(Pixel::probe)
    }

    /// Number of converged pixels per transition count.
    pub fn histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for p in self.probed() {
            *h.entry(p.count).or_insert(0) += 1;
        }
        h
    }

    /// Fraction of in-disk pixels that converged with at most `k` transitions.
    pub fn fraction_at_most(&self, k: usize) -> f64 {
        if self.in_disk == 0 {
            return 0.0;
        }
        self.probed().filter(|p| p.count <= k).count() as f64 / self.in_disk as f64
    }

    /// 4-connected components of pixels with `count >= min_count`, largest first.
    pub fn components(&self, min_count: usize) -> Vec<Vec<(usize, usize)>> {
        let n = self.raster.size;
        let hit = |k: usize| self.pixels[k].count().is_some_and(|c| c >= min_count);
        let mut seen = vec![false; self.pixels.len()];
        let mut out = Vec::new();
        for start in 0..self.pixels.len() {
            if seen[start] || !hit(start) {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut comp = Vec::new();
            while let Some(k) = stack.pop() {
                let (x, y) = (k % n, k / n);
                comp.push((x, y));
                let mut push = |nx: usize, ny: usize| {
                    let j = ny * n + nx;
                    if !seen[j] && hit(j) {
                        seen[j] = true;
                        stack.push(j);
                    }
                };
                if x > 0 {
                    push(x - 1, y);
                }
                if x + 1 < n {
                    push(x + 1, y);
                }
                if y > 0 {
                    push(x, y - 1);
                }
                if y + 1 < n {
                    push(x, y + 1);
                }
            }
            comp.sort_unstable_by_key(|&(x, y)| (y, x));
            out.push(comp);
        }
        out.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].1.cmp(&b[0].1)).then(a[0].0.cmp(&b[0].0)));
        out
    }
}

fn check_size(size: usize) -> Result<()> {
    if size < MIN_RASTER_SIZE {
        return Err(Error::Argument(format!("raster size {size} is below the minimum {MIN_RASTER_SIZE}")));
    }
    Ok(())
}

fn sweep(wcmf: &WeightedCmf, raster: PolarRaster, config: &SolverConfig, with_delta: bool) -> Result<TransitionMap> {
    let size = raster.size;
    let pixels: Vec<Pixel> = (0..raster.len())
        .into_par_iter()
        .map_init(
            || Prober::new(wcmf, *config),
            |prober, k| {
                let Some(dir) = raster.pixel_direction(k % size, k / size) else {
                    return Pixel::Outside;
                };
                let probe = if with_delta {
                    compare_with(prober, dir).map(|r| PixelProbe {
                        count: r.lp_transitions,
                        kind: r.lp_kind,
                        c: r.c_lp,
                        xyz_opt: r.xyz_lp,
                        delta: r.delta_distance,
                    })
                } else {
                    prober.probe_direction(dir).and_then(|p| {
                        if p.is_optimal() {
                            Ok(PixelProbe {
                                count: p.profile.count,
                                kind: p.profile.kind,
                                c: p.c,
                                xyz_opt: p.xyz_opt,
                                delta: f64::NAN,
                            })
                        } else {
                            Err(Error::Solver(p.solver_status))
                        }
                    })
                };
                match probe {
                    Ok(p) => Pixel::Probed(p),
                    Err(e) => {
                        log::debug!("pixel ({}, {}) failed: {e}", k % size, k / size);
                        Pixel::Failed
                    }
                }
            },
        )
        .collect();
    let in_disk = pixels.iter().filter(|p| !matches!(p, Pixel::Outside)).count();
    let failures = pixels.iter().filter(|p| matches!(p, Pixel::Failed)).count();
    let odd_counts = pixels.iter().filter_map(Pixel::count).filter(|c| c % 2 == 1).count();
    if odd_counts > 0 {
        log::warn!("{odd_counts} pixels have an odd transition count");
    }
    if failures as f64 > MAX_FAILURE_RATIO * in_disk as f64 {
        return Err(Error::Atlas { failed: failures, total: in_disk });
    }
    Ok(TransitionMap { raster, pixels, in_disk, failures, odd_counts, has_deltas: with_delta })
}

/// Transition count of the optimal color for every in-disk pixel.
pub fn build_transition_map(
    wcmf: &WeightedCmf,
    hemisphere: Hemisphere,
    size: usize,
    config: &SolverConfig,
) -> Result<TransitionMap> {
    check_size(size)?;
    sweep(wcmf, PolarRaster::new(hemisphere, size)?, config, false)
}

/// As [`build_transition_map`], also recording the LP versus two-transition
/// distance gap per pixel.
pub fn build_difference_map(
    wcmf: &WeightedCmf,
    hemisphere: Hemisphere,
    size: usize,
    config: &SolverConfig,
) -> Result<TransitionMap> {
    check_size(size)?;
    sweep(wcmf, PolarRaster::new(hemisphere, size)?, config, true)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionPoint {
    pub x: f64,
    pub y: f64,
    pub count: usize,
    pub kind: TransitionKind,
    pub hemisphere: Hemisphere,
    pub px: usize,
    pub py: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegionReport {
    /// Chromaticity of the illuminant (its white point).
    pub illuminant_xy: (f64, f64),
    pub points: Vec<RegionPoint>,
    pub in_disk: usize,
    pub failures: usize,
    pub size: usize,
}

/// Chromaticities of high-transition (`count > 2`) optimal colors over both hemispheres.
pub fn chromaticity_regions(wcmf: &WeightedCmf, size: usize, config: &SolverConfig) -> Result<RegionReport> {
    let illuminant_xy = wcmf
        .white_point()
        .chromaticity()
        .ok_or_else(|| Error::Geometry("white point has zero sum".into()))?;
    let mut points = Vec::new();
    let (mut in_disk, mut failures) = (0, 0);
    for hemisphere in [Hemisphere::Upper, Hemisphere::Lower] {
        let map = build_transition_map(wcmf, hemisphere, size, config)?;
        in_disk += map.in_disk;
        failures += map.failures;
        for (k, p) in map.pixels.iter().enumerate() {
            let Some(p) = p.probe() else { continue };
            if p.count <= 2 {
                continue;
            }
            if let Some((x, y)) = p.xyz_opt.chromaticity() {
                points.push(RegionPoint { x, y, count: p.count, kind: p.kind, hemisphere, px: k % size, py: k / size });
            }
        }
    }
    Ok(RegionReport { illuminant_xy, points, in_disk, failures, size })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn index(self) -> usize {
        self as usize
    }

    /// The two in-plane axes, in cyclic order.
    fn plane(self) -> (usize, usize) {
        let a = self.index();
        ((a + 1) % 3, (a + 2) % 3)
    }
}

impl FromStr for Axis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "X" | "x" => Ok(Axis::X),
            "Y" | "y" => Ok(Axis::Y),
            "Z" | "z" => Ok(Axis::Z),
            _ => Err(Error::Argument(format!("unknown axis {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SliceSample {
    /// In-plane angle from the first in-plane axis (`Y` for an `X` slice, `Z` for `Y`, `X` for `Z`).
    pub angle: f64,
    pub c: f64,
    pub xyz_opt: Tristimulus,
    pub rho: Vec<f64>,
    pub count: usize,
    pub kind: TransitionKind,
    pub status: LpStatus,
    /// Best two-transition scale on the same in-plane ray.
    pub c_two: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SliceResult {
    pub axis: Axis,
    pub level: f64,
    pub origin: Tristimulus,
    pub samples: Vec<SliceSample>,
}

/// Sweeps `samples` in-plane rays around the gray-line point with the
/// given fixed-axis value. Every ray lies in the plane, so each optimum
/// keeps the fixed coordinate.
pub fn ocs_slice(wcmf: &WeightedCmf, axis: Axis, level: f64, samples: usize, config: &SolverConfig) -> Result<SliceResult> {
    let wp = wcmf.white_point();
    let top = wp.get(axis.index());
    if !(level > 0.0 && level < top) {
        return Err(Error::Argument(format!("slice level {level} must lie strictly between 0 and {top}")));
    }
    if samples == 0 {
        return Err(Error::Argument("slice needs at least one sample".into()));
    }
    let origin = wp * (level / top);
    let (p, q) = axis.plane();
    let out: Result<Vec<SliceSample>> = (0..samples)
        .into_par_iter()
        .map_init(
            || Prober::new(wcmf, *config),
            |prober, k| {
                let angle = TAU * k as f64 / samples as f64;
                let mut d = [0.0; 3];
                d[p] = angle.cos();
                d[q] = angle.sin();
                let d = Tristimulus::from_array(d);
                let probe = prober.probe_from(origin, origin + d)?;
                if !probe.is_optimal() {
                    return Err(Error::Solver(probe.solver_status));
                }
                let two = two_transition_along(wcmf, origin, d)?;
                Ok(SliceSample {
                    angle,
                    c: probe.c,
                    xyz_opt: probe.xyz_opt,
                    count: probe.profile.count,
                    kind: probe.profile.kind,
                    status: probe.solver_status,
                    rho: probe.rho.values,
                    c_two: two.c,
                })
            },
        )
        .collect();
    Ok(SliceResult { axis, level, origin, samples: out? })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raster_round_trip() {
        for size in [16, 17, 33] {
            for hemisphere in [Hemisphere::Upper, Hemisphere::Lower] {
                let r = PolarRaster::new(hemisphere, size).unwrap();
                for py in 0..size {
                    for px in 0..size {
                        if let Some(d) = r.pixel_direction(px, py) {
                            assert_eq!(r.direction_pixel(d), Some((px, py)));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn antipodal_pixels_hold_antipodal_directions() {
        let up = PolarRaster::new(Hemisphere::Upper, 20).unwrap();
        let down = PolarRaster::new(Hemisphere::Lower, 20).unwrap();
        for (px, py) in [(3, 4), (10, 10), (0, 9), (19, 12)] {
            let Some(a) = up.pixel_direction(px, py) else { continue };
            let (qx, qy) = up.antipodal_pixel(px, py);
            let b = down.pixel_direction(qx, qy).unwrap();
            let (ua, ub) = (a.unit_vector(), b.unit_vector());
            assert!((ua + ub).norm() < 1e-12);
        }
    }

    #[test]
    fn corners_are_outside_and_axes_are_oriented() {
        let r = PolarRaster::new(Hemisphere::Upper, 16).unwrap();
        assert!(r.pixel_direction(0, 0).is_none());
        let right = r.pixel_direction(15, 8).unwrap();
        assert!(right.theta.cos() > 0.99 && right.phi > 1.3);
        let up = r.pixel_direction(8, 0).unwrap();
        assert!(up.theta.sin() > 0.99);
        assert!((r.in_disk_count() as f64 - PI * 64.0).abs() < 16.0);
    }

    #[test]
    fn components_are_four_connected() {
        let raster = PolarRaster::new(Hemisphere::Upper, 16).unwrap();
        let blank = PixelProbe { count: 2, kind: TransitionKind::TypeILike, c: 1.0, xyz_opt: Tristimulus::default(), delta: f64::NAN };
        let mut pixels = vec![Pixel::Probed(blank); 256];
        for &(x, y) in &[(1, 1), (2, 1), (2, 2), (5, 5), (6, 6)] {
            pixels[y * 16 + x] = Pixel::Probed(PixelProbe { count: 4, ..blank });
        }
        let map = TransitionMap { raster, pixels, in_disk: 256, failures: 0, odd_counts: 0, has_deltas: false };
        let comps = map.components(4);
        assert_eq!(comps.iter().map(Vec::len).collect::<Vec<_>>(), vec![3, 1, 1]);
        assert_eq!(map.histogram()[&4], 5);
        assert!((map.fraction_at_most(2) - 251.0 / 256.0).abs() < 1e-15);
    }
}
