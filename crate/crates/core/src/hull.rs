//! Convex hull of the spectral locus in the chromaticity plane.
//!
//! Points of the locus that are not hull vertices and sit strictly inside
//! the hull are where the horseshoe fails to be convex.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::CmfSet;

/// Default tolerance on the perpendicular distance used by the turn test
/// and by the on-edge classification. Zero means an exact strict-turn test.
pub const DEFAULT_COLLINEARITY_EPS: f64 = 0.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChromaticityPoint {
    pub x: f64,
    pub y: f64,
    pub wavelength_nm: f64,
}

/// Chromaticity coordinates of every CMF row, plus the wavelengths of any
/// rows skipped because their row sum is zero.
#[derive(Debug, Clone)]
pub struct Chromaticities {
    pub points: Vec<ChromaticityPoint>,
    pub skipped_nm: Vec<f64>,
}

pub fn chromaticity(cmf: &CmfSet) -> Chromaticities {
    let mut points = Vec::with_capacity(cmf.len());
    let mut skipped_nm = Vec::new();
    for (row, wl) in cmf.values().iter().zip(cmf.grid().wavelengths()) {
        let s = row[0] + row[1] + row[2];
        if s > 0.0 {
            points.push(ChromaticityPoint { x: row[0] / s, y: row[1] / s, wavelength_nm: wl });
        } else {
            log::warn!("skipping CMF row at {wl} nm with zero row sum");
            skipped_nm.push(wl);
        }
    }
    Chromaticities { points, skipped_nm }
}

/// A run of consecutive interior wavelengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonconvexRange {
    /// First and last interior wavelength in the run.
    pub first_nm: f64,
    pub last_nm: f64,
    /// Wavelengths of the locus samples just outside the run; the pocket
    /// is the stretch of locus between these two.
    pub bracket_low_nm: f64,
    pub bracket_high_nm: f64,
    pub max_gap: f64,
}

impl NonconvexRange {
    pub fn len_points(&self, step_nm: f64) -> usize {
        ((self.last_nm - self.first_nm) / step_nm).round() as usize + 1
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HullReport {
    /// Hull vertices, counterclockwise, starting from the lexicographically
    /// smallest point. The polygon closes from the last entry back to the first.
    pub hull_indices: Vec<usize>,
    /// Non-vertex points within `collinearity_eps` of a hull edge.
    pub boundary_indices: Vec<usize>,
    /// Points strictly inside the hull, in input order.
    pub interior_indices: Vec<usize>,
    /// Distance to the nearest hull edge, parallel to `interior_indices`.
    pub gaps: Vec<f64>,
    pub nonconvex_ranges: Vec<NonconvexRange>,
    pub collinearity_eps: f64,
}

impl HullReport {
    pub fn max_gap(&self) -> f64 {
        self.gaps.iter().copied().fold(0.0, f64::max)
    }

    pub fn interior_wavelengths<'a>(
        &'a self,
        points: &'a [ChromaticityPoint],
    ) -> impl Iterator<Item = f64> + 'a {
        self.interior_indices.iter().map(move |&i| points[i].wavelength_nm)
    }
}

fn cross(o: &ChromaticityPoint, a: &ChromaticityPoint, b: &ChromaticityPoint) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Signed distance of `a` to the left of the line `o -> b`.
fn left_distance(o: &ChromaticityPoint, a: &ChromaticityPoint, b: &ChromaticityPoint) -> f64 {
    let len = (b.x - o.x).hypot(b.y - o.y);
    if len == 0.0 {
        return 0.0;
    }
    -cross(o, a, b) / len
}

fn segment_distance(p: &ChromaticityPoint, a: &ChromaticityPoint, b: &ChromaticityPoint) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0)
    };
    (p.x - (a.x + t * dx)).hypot(p.y - (a.y + t * dy))
}

/// Monotone-chain hull indices (counterclockwise). The middle of three
/// consecutive chain points is dropped unless it lies more than `eps` to
/// the right of the chord, which for a counterclockwise lower/upper pass
/// is the strict turn test.
fn monotone_chain(points: &[ChromaticityPoint], eps: f64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        let (p, q) = (&points[a], &points[b]);
        p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y)).then(a.cmp(&b))
    });

    let build = |seq: &mut dyn Iterator<Item = usize>| -> Vec<usize> {
        let mut chain: Vec<usize> = Vec::new();
        for i in seq {
            while chain.len() >= 2 {
                let o = &points[chain[chain.len() - 2]];
                let a = &points[chain[chain.len() - 1]];
                // `a` must lie strictly right of o -> p for a left turn at `a`.
                if -left_distance(o, a, &points[i]) <= eps {
                    chain.pop();
                } else {
                    break;
                }
            }
            chain.push(i);
        }
        chain
    };

    let mut lower = build(&mut order.iter().copied());
    let mut upper = build(&mut order.iter().rev().copied());
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Computes the hull and classifies every other point as on-edge or interior.
pub fn convex_hull(points: &[ChromaticityPoint], collinearity_eps: f64) -> Result<HullReport> {
    if points.len() < 3 {
        return Err(Error::Geometry(format!("need at least 3 points, got {}", points.len())));
    }
    if !(collinearity_eps >= 0.0) {
        return Err(Error::Argument(format!("collinearity_eps must be >= 0, got {collinearity_eps}")));
    }
    let hull = monotone_chain(points, collinearity_eps);
    if hull.len() < 3 {
        return Err(Error::Geometry("all points are collinear".into()));
    }
    let edges: Vec<(usize, usize)> =
        (0..hull.len()).map(|k| (hull[k], hull[(k + 1) % hull.len()])).collect();

    let mut is_vertex = vec![false; points.len()];
    for &h in &hull {
        is_vertex[h] = true;
    }

    let mut boundary_indices = Vec::new();
    let mut interior_indices = Vec::new();
    let mut gaps = Vec::new();
    for (i, p) in points.iter().enumerate() {
        if is_vertex[i] {
            continue;
        }
        let min_inside = edges
            .iter()
            .map(|&(a, b)| left_distance(&points[a], p, &points[b]))
            .fold(f64::INFINITY, f64::min);
        if min_inside <= collinearity_eps {
            boundary_indices.push(i);
            continue;
        }
        let gap = edges
            .iter()
            .map(|&(a, b)| segment_distance(p, &points[a], &points[b]))
            .fold(f64::INFINITY, f64::min);
        interior_indices.push(i);
        gaps.push(gap);
    }

    let nonconvex_ranges = merge_ranges(points, &interior_indices, &gaps);
    Ok(HullReport {
        hull_indices: hull,
        boundary_indices,
        interior_indices,
        gaps,
        nonconvex_ranges,
        collinearity_eps,
    })
}

fn merge_ranges(
    points: &[ChromaticityPoint],
    interior: &[usize],
    gaps: &[f64],
) -> Vec<NonconvexRange> {
    let step = points
        .windows(2)
        .map(|w| (w[1].wavelength_nm - w[0].wavelength_nm).abs())
        .filter(|d| *d > 0.0)
        .fold(f64::INFINITY, f64::min);
    let mut ranges: Vec<NonconvexRange> = Vec::new();
    let mut prev: Option<usize> = None;
    for (&i, &gap) in interior.iter().zip(gaps) {
        let wl = points[i].wavelength_nm;
        let contiguous = prev.is_some_and(|p| {
            p + 1 == i && (wl - points[p].wavelength_nm) <= step * (1.0 + 1e-9)
        });
        if let (true, Some(last)) = (contiguous, ranges.last_mut()) {
            last.last_nm = wl;
            last.max_gap = last.max_gap.max(gap);
        } else {
            ranges.push(NonconvexRange {
                first_nm: wl,
                last_nm: wl,
                bracket_low_nm: if i > 0 { points[i - 1].wavelength_nm } else { wl },
                bracket_high_nm: wl,
                max_gap: gap,
            });
        }
        let last = ranges.last_mut().expect("pushed above");
        last.bracket_high_nm = points.get(i + 1).map_or(wl, |p| p.wavelength_nm);
        prev = Some(i);
    }
    ranges
}

/// True when `(x, y)` lies inside the closed hull polygon, allowing an
/// outward excursion of `tol`.
pub fn hull_contains(points: &[ChromaticityPoint], report: &HullReport, x: f64, y: f64, tol: f64) -> bool {
    let p = ChromaticityPoint { x, y, wavelength_nm: f64::NAN };
    let h = &report.hull_indices;
    (0..h.len()).all(|k| {
        let a = &points[h[k]];
        let b = &points[h[(k + 1) % h.len()]];
        left_distance(a, &p, b) >= -tol
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct NonconvexityReport {
    pub points: Vec<ChromaticityPoint>,
    pub skipped_nm: Vec<f64>,
    pub hull: HullReport,
    pub max_gap: f64,
}

pub fn nonconvexity_report(cmf: &CmfSet, collinearity_eps: f64) -> Result<NonconvexityReport> {
    let Chromaticities { points, skipped_nm } = chromaticity(cmf);
    let hull = convex_hull(&points, collinearity_eps)?;
    let max_gap = hull.max_gap();
    Ok(NonconvexityReport { points, skipped_nm, hull, max_gap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{CmfSet, WavelengthGrid};

    fn pt(x: f64, y: f64, wl: f64) -> ChromaticityPoint {
        ChromaticityPoint { x, y, wavelength_nm: wl }
    }

    #[test]
    fn chromaticity_of_simple_rows() {
        let grid = WavelengthGrid::new(400.0, 10.0, 3).unwrap();
        let cmf = CmfSet::new(grid, vec![[1.0, 1.0, 1.0], [2.0, 1.0, 1.0], [0.0, 0.0, 0.0]]).unwrap();
        let c = chromaticity(&cmf);
        assert_eq!(c.points.len(), 2);
        assert!((c.points[0].x - 1.0 / 3.0).abs() < 1e-15 && (c.points[0].y - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!((c.points[1].x, c.points[1].y), (0.5, 0.25));
        assert_eq!(c.skipped_nm, vec![420.0]);
    }

    #[test]
    fn square_with_center() {
        let pts = vec![
            pt(0.0, 0.0, 1.0),
            pt(1.0, 0.0, 2.0),
            pt(0.5, 0.5, 3.0),
            pt(1.0, 1.0, 4.0),
            pt(0.0, 1.0, 5.0),
        ];
        let r = convex_hull(&pts, 1e-12).unwrap();
        assert_eq!(r.hull_indices.len(), 4);
        assert_eq!(r.interior_indices, vec![2]);
        assert!((r.gaps[0] - 0.5).abs() < 1e-15);
        assert_eq!(r.nonconvex_ranges.len(), 1);
        assert_eq!(r.nonconvex_ranges[0].bracket_low_nm, 2.0);
        assert_eq!(r.nonconvex_ranges[0].bracket_high_nm, 4.0);
    }

    #[test]
    fn triangle_is_convex() {
        let s = 3f64.sqrt() / 2.0;
        let pts = vec![pt(0.0, 0.0, 1.0), pt(1.0, 0.0, 2.0), pt(0.5, s, 3.0)];
        let r = convex_hull(&pts, 1e-12).unwrap();
        assert_eq!(r.hull_indices.len(), 3);
        assert!(r.interior_indices.is_empty());
        assert_eq!(r.max_gap(), 0.0);
    }

    #[test]
    fn collinear_input_is_degenerate() {
        let pts: Vec<_> = (0..5).map(|i| pt(i as f64, 2.0 * i as f64, i as f64)).collect();
        assert!(matches!(convex_hull(&pts, 0.0), Err(Error::Geometry(_))));
    }

    #[test]
    fn midpoint_on_edge_is_boundary_not_interior() {
        let pts = vec![pt(0.0, 0.0, 1.0), pt(0.5, 0.0, 2.0), pt(1.0, 0.0, 3.0), pt(0.0, 1.0, 4.0)];
        let r = convex_hull(&pts, 1e-12).unwrap();
        assert_eq!(r.hull_indices.len(), 3);
        assert_eq!(r.boundary_indices, vec![1]);
        assert!(r.interior_indices.is_empty());
    }

    #[test]
    fn hull_is_counterclockwise() {
        let c = CmfSet::cie1931_2deg();
        let pts = chromaticity(&c).points;
        let r = convex_hull(&pts, 0.0).unwrap();
        let h = &r.hull_indices;
        for k in 0..h.len() {
            let (a, b, d) = (&pts[h[k]], &pts[h[(k + 1) % h.len()]], &pts[h[(k + 2) % h.len()]]);
            assert!(cross(a, b, d) > 0.0);
        }
    }

    #[test]
    fn containment_of_locus_points() {
        let c = CmfSet::cie1931_2deg();
        let pts = chromaticity(&c).points;
        let r = convex_hull(&pts, 0.0).unwrap();
        assert!(pts.iter().all(|p| hull_contains(&pts, &r, p.x, p.y, 1e-15)));
        assert!(!hull_contains(&pts, &r, 0.9, 0.9, 1e-15));
    }
}
