//! Smoothest illuminant spectrum with a prescribed chromaticity.
//!
//! Minimizes the first-difference roughness `sum (s[i+1] - s[i])^2` subject
//! to `A's = XYZ` by solving the stationarity (KKT) system
//!
//! ```text
//! [ 2 D'D  A ] [ s      ]   [ 0   ]
//! [ A'     0 ] [ lambda ] = [ XYZ ]
//! ```

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hull::{chromaticity, convex_hull, hull_contains, DEFAULT_COLLINEARITY_EPS};
use crate::spectral::{CmfSet, Illuminant, Tristimulus};

/// Spectral values below this are reported as negative.
pub const NEGATIVE_WARN: f64 = -1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChromaticityTarget {
    pub x: f64,
    pub y: f64,
    pub label: String,
}

impl ChromaticityTarget {
    pub fn new(x: f64, y: f64, label: impl Into<String>) -> Result<Self> {
        if !(x > 0.0 && y > 0.0 && x + y < 1.0) {
            return Err(Error::Argument(format!("chromaticity ({x}, {y}) is outside the open triangle")));
        }
        Ok(ChromaticityTarget { x, y, label: label.into() })
    }

    /// Tristimulus values with `Y = 100`.
    pub fn xyz(&self) -> Tristimulus {
        Tristimulus::new(self.x / self.y * 100.0, 100.0, (1.0 - self.x - self.y) / self.y * 100.0)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SmoothIlluminant {
    pub target: ChromaticityTarget,
    /// Spectrum scaled to a maximum of 1.
    pub illuminant: Illuminant,
    /// Unscaled solution with `A's = XYZ` and `Y = 100`.
    pub raw: Vec<f64>,
    pub xyz_target: Tristimulus,
    pub min_value: f64,
    /// Relative constraint residual of `raw`.
    pub residual: f64,
    pub roughness: f64,
}

impl SmoothIlluminant {
    pub fn has_negative(&self) -> bool {
        self.min_value < NEGATIVE_WARN
    }
}

pub fn roughness(s: &[f64]) -> f64 {
    s.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum()
}

/// `D'D` for the first-difference operator `D` on `n` samples (tridiagonal).
fn difference_gram(n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n.saturating_sub(1) {
        m[(i, i)] += 1.0;
        m[(i + 1, i + 1)] += 1.0;
        m[(i, i + 1)] -= 1.0;
        m[(i + 1, i)] -= 1.0;
    }
    m
}

/// Solves the KKT system for arbitrary tristimulus values.
pub fn smoothest_for_xyz(cmf: &CmfSet, xyz: Tristimulus) -> Result<Vec<f64>> {
    let n = cmf.len();
    let a = cmf.values();
    let mut k = DMatrix::zeros(n + 3, n + 3);
    k.view_mut((0, 0), (n, n)).copy_from(&(difference_gram(n) * 2.0));
    for (i, row) in a.iter().enumerate() {
        for c in 0..3 {
            k[(i, n + c)] = row[c];
            k[(n + c, i)] = row[c];
        }
    }
    let mut rhs = DVector::zeros(n + 3);
    for c in 0..3 {
        rhs[n + c] = xyz.get(c);
    }
    let sol = k
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Geometry("singular stationarity system".into()))?;
    if sol.iter().any(|v| !v.is_finite()) {
        return Err(Error::Geometry("singular stationarity system".into()));
    }
    Ok(sol.rows(0, n).iter().copied().collect())
}

/// Smoothest spectrum whose chromaticity equals `target`, scaled to max 1.
pub fn smoothest_spectrum(cmf: &CmfSet, target: &ChromaticityTarget) -> Result<SmoothIlluminant> {
    let chroma = chromaticity(cmf);
    let hull = convex_hull(&chroma.points, DEFAULT_COLLINEARITY_EPS)?;
    if !hull_contains(&chroma.points, &hull, target.x, target.y, 0.0) {
        return Err(Error::Argument(format!(
            "chromaticity ({}, {}) lies outside the spectral locus",
            target.x, target.y
        )));
    }
    let xyz = target.xyz();
    let raw = smoothest_for_xyz(cmf, xyz)?;
    let got = cmf.integrate(&raw)?;
    let residual = (got - xyz).norm() / xyz.norm();
    let max = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(max > 0.0) {
        return Err(Error::Geometry("smoothest spectrum has no positive values".into()));
    }
    let scaled: Vec<f64> = raw.iter().map(|v| v / max).collect();
    let min_value = scaled.iter().copied().fold(f64::INFINITY, f64::min);
    if min_value < NEGATIVE_WARN {
        log::warn!("smoothest spectrum for {} dips negative: min {min_value:.6}", target.label);
    }
    Ok(SmoothIlluminant {
        target: target.clone(),
        illuminant: Illuminant::new(*cmf.grid(), scaled)?,
        roughness: roughness(&raw),
        raw,
        xyz_target: xyz,
        min_value,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gram_matches_difference_sum() {
        let s = [1.0, 3.0, 2.0, 5.0];
        let g = difference_gram(4);
        let v = DVector::from_row_slice(&s);
        assert!(((v.transpose() * &g * &v)[0] - roughness(&s)).abs() < 1e-12);
    }

    #[test]
    fn equal_energy_chromaticity_gives_flat_spectrum() {
        let cmf = CmfSet::cie1931_2deg();
        let sums = cmf.column_sums();
        let t = sums[0] + sums[1] + sums[2];
        let target = ChromaticityTarget::new(sums[0] / t, sums[1] / t, "E").unwrap();
        let s = smoothest_spectrum(&cmf, &target).unwrap();
        let p = s.illuminant.power();
        assert!(p.iter().all(|v| (v - 1.0).abs() < 1e-8), "{:?}", &p[..5]);
        assert!(s.residual < 1e-9);
    }

    #[test]
    fn outside_locus_is_rejected() {
        let cmf = CmfSet::cie1931_2deg();
        let t = ChromaticityTarget::new(0.1, 0.1, "outside").unwrap();
        assert!(matches!(smoothest_spectrum(&cmf, &t), Err(Error::Argument(_))));
        assert!(ChromaticityTarget::new(0.6, 0.5, "bad").is_err());
    }
}
