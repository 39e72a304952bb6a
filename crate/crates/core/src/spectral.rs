//! Color-matching functions, illuminants and the illuminant-weighted CMF
//! matrix that every probe works against.
//!
//! A [`CmfSet`] holds the `n x 3` matrix of x̄, ȳ, z̄ samples on a uniform
//! [`WavelengthGrid`]. Pairing it with a normalized [`Illuminant`] gives a
//! [`WeightedCmf`], whose column sums are the white point of the object
//! color solid.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance (nm) used when comparing two grids.
pub const GRID_TOL_NM: f64 = 1e-9;

/// Tolerance (nm) for the uniform-spacing check when reading tables, which
/// carry wavelengths rounded to a few decimals.
const SPACING_TOL_NM: f64 = 1e-6;

/// Relative tolerance for `dot(ȳ, W) = 100` after normalization.
pub const NORMALIZATION_RTOL: f64 = 1e-9;

const CIE1931_2DEG_1NM: &str = include_str!("../data/cie1931_2deg_1nm.csv");

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavelengthGrid {
    pub start_nm: f64,
    pub step_nm: f64,
    pub count: usize,
}

impl WavelengthGrid {
    pub fn new(start_nm: f64, step_nm: f64, count: usize) -> Result<Self> {
        if !(step_nm > 0.0) || !start_nm.is_finite() || !step_nm.is_finite() {
            return Err(Error::Argument(format!("step must be positive, got {step_nm}")));
        }
        if count < 3 {
            return Err(Error::Argument(format!("grid needs at least 3 samples, got {count}")));
        }
        Ok(Self { start_nm, step_nm, count })
    }

    pub fn wavelength(&self, i: usize) -> f64 {
        self.start_nm + i as f64 * self.step_nm
    }

    pub fn end_nm(&self) -> f64 {
        self.wavelength(self.count - 1)
    }

    pub fn wavelengths(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|i| self.wavelength(i))
    }

    pub fn matches(&self, other: &WavelengthGrid) -> bool {
        self.count == other.count
            && (self.start_nm - other.start_nm).abs() <= GRID_TOL_NM
            && (self.step_nm - other.step_nm).abs() <= GRID_TOL_NM
    }

    pub(crate) fn ensure_matches(&self, other: &WavelengthGrid) -> Result<()> {
        if self.matches(other) {
            Ok(())
        } else {
            Err(Error::Grid(format!("{self} vs {other}")))
        }
    }
}

impl fmt::Display for WavelengthGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} nm to {} nm step {} nm ({} samples)",
            self.start_nm,
            self.end_nm(),
            self.step_nm,
            self.count
        )
    }
}

/// Illuminant-referenced tristimulus values.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Tristimulus {
    #[serde(rename = "X")]
    pub x: f64,
    #[serde(rename = "Y")]
    pub y: f64,
    #[serde(rename = "Z")]
    pub z: f64,
}

impl Tristimulus {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn from_array(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, other: Tristimulus) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn max_abs_diff(self, other: Tristimulus) -> f64 {
        (self.x - other.x)
            .abs()
            .max((self.y - other.y).abs())
            .max((self.z - other.z).abs())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Chromaticity `(x, y)`; `None` when the component sum is not positive.
    pub fn chromaticity(self) -> Option<(f64, f64)> {
        let s = self.x + self.y + self.z;
        (s > 0.0).then(|| (self.x / s, self.y / s))
    }

    /// Component by axis index (0 = X, 1 = Y, 2 = Z).
    pub fn get(self, axis: usize) -> f64 {
        self.to_array()[axis]
    }
}

impl Add for Tristimulus {
    type Output = Tristimulus;
    fn add(self, o: Tristimulus) -> Tristimulus {
        Tristimulus::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Tristimulus {
    type Output = Tristimulus;
    fn sub(self, o: Tristimulus) -> Tristimulus {
        Tristimulus::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Tristimulus {
    type Output = Tristimulus;
    fn mul(self, s: f64) -> Tristimulus {
        Tristimulus::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Div<f64> for Tristimulus {
    type Output = Tristimulus;
    fn div(self, s: f64) -> Tristimulus {
        Tristimulus::new(self.x / s, self.y / s, self.z / s)
    }
}

impl Neg for Tristimulus {
    type Output = Tristimulus;
    fn neg(self) -> Tristimulus {
        Tristimulus::new(-self.x, -self.y, -self.z)
    }
}

impl fmt::Display for Tristimulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.5}, {:.5}, {:.5})", self.x, self.y, self.z)
    }
}

/// Tabulated color-matching functions, one `[x̄, ȳ, z̄]` row per wavelength.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CmfSet {
    grid: WavelengthGrid,
    values: Vec<[f64; 3]>,
}

impl CmfSet {
    pub fn new(grid: WavelengthGrid, values: Vec<[f64; 3]>) -> Result<Self> {
        if values.len() != grid.count {
            return Err(Error::Data(format!(
                "{} CMF rows for a grid of {} samples",
                values.len(),
                grid.count
            )));
        }
        for (i, row) in values.iter().enumerate() {
            if row.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::Data(format!(
                    "CMF row at {} nm has a negative or non-finite value: {row:?}",
                    grid.wavelength(i)
                )));
            }
        }
        Ok(Self { grid, values })
    }

    /// The 1931 2° standard observer at 1 nm, 360-830 nm, bundled with the crate.
    pub fn cie1931_2deg() -> Self {
        parse_cmf_csv(CIE1931_2DEG_1NM, None).expect("bundled CMF table is valid")
    }

    /// Raw text of the bundled 1931 table, for hashing in provenance records.
    pub fn cie1931_2deg_source() -> &'static str {
        CIE1931_2DEG_1NM
    }

    pub fn grid(&self) -> &WavelengthGrid {
        &self.grid
    }

    pub fn values(&self) -> &[[f64; 3]] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn y_bar(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().map(|r| r[1])
    }

    /// Sum of each column.
    pub fn column_sums(&self) -> [f64; 3] {
        let mut s = [0.0; 3];
        for row in &self.values {
            for k in 0..3 {
                s[k] += row[k];
            }
        }
        s
    }

    /// Tristimulus of a spectrum sampled on this grid, `A' s`.
    pub fn integrate(&self, spectrum: &[f64]) -> Result<Tristimulus> {
        if spectrum.len() != self.len() {
            return Err(Error::Grid(format!(
                "spectrum has {} samples, CMF grid has {}",
                spectrum.len(),
                self.len()
            )));
        }
        let mut acc = [0.0; 3];
        for (row, s) in self.values.iter().zip(spectrum) {
            for k in 0..3 {
                acc[k] += row[k] * s;
            }
        }
        Ok(Tristimulus::from_array(acc))
    }
}

/// Reads a CMF table: rows of `wavelength, x̄, ȳ, z̄` with an optional header.
pub fn load_cmf(path: impl AsRef<Path>, expected_grid: Option<&WavelengthGrid>) -> Result<CmfSet> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_cmf_csv(&text, expected_grid)
}

pub fn parse_cmf_csv(text: &str, expected_grid: Option<&WavelengthGrid>) -> Result<CmfSet> {
    let rows = parse_numeric_table(text, 4)?;
    let (grid, values) = rows_to_grid(rows)?;
    let values: Vec<[f64; 3]> = values.into_iter().map(|r| [r[0], r[1], r[2]]).collect();
    if let Some(expected) = expected_grid {
        grid.ensure_matches(expected)?;
    }
    CmfSet::new(grid, values)
}

/// Parses comma (or whitespace) separated rows with exactly `columns` numeric
/// fields. A first line whose leading token is not numeric is a header.
/// Blank lines and lines starting with `#` are skipped.
pub(crate) fn parse_numeric_table(text: &str, columns: usize) -> Result<Vec<(usize, Vec<f64>)>> {
    let mut rows = Vec::new();
    let mut seen_content = false;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c == ';' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        if !seen_content {
            seen_content = true;
            if fields.first().is_none_or(|f| f.parse::<f64>().is_err()) {
                continue;
            }
        }
        if fields.len() != columns {
            return Err(Error::Format {
                line: lineno + 1,
                msg: format!("expected {columns} columns, found {}", fields.len()),
            });
        }
        let parsed = fields
            .iter()
            .map(|f| {
                f.parse::<f64>().map_err(|_| Error::Format {
                    line: lineno + 1,
                    msg: format!("not a number: {f:?}"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push((lineno + 1, parsed));
    }
    Ok(rows)
}

/// Infers a uniform grid from the first column; returns the remaining columns.
pub(crate) fn rows_to_grid(rows: Vec<(usize, Vec<f64>)>) -> Result<(WavelengthGrid, Vec<Vec<f64>>)> {
    if rows.len() < 3 {
        return Err(Error::Format {
            line: rows.last().map_or(0, |r| r.0),
            msg: format!("need at least 3 rows, found {}", rows.len()),
        });
    }
    let start = rows[0].1[0];
    let step = rows[1].1[0] - start;
    if !(step > 0.0) {
        return Err(Error::Format {
            line: rows[1].0,
            msg: "wavelengths must be strictly ascending".into(),
        });
    }
    for (i, (line, r)) in rows.iter().enumerate() {
        let expected = start + i as f64 * step;
        if (r[0] - expected).abs() > SPACING_TOL_NM {
            return Err(Error::Format {
                line: *line,
                msg: format!("non-uniform spacing: {} nm, expected {expected} nm", r[0]),
            });
        }
    }
    let grid = WavelengthGrid::new(start, step, rows.len())?;
    Ok((grid, rows.into_iter().map(|(_, r)| r[1..].to_vec()).collect()))
}

/// Keeps every k-th row starting at row 0, where `k = new_step / old_step`.
pub fn resample_cmf(cmf: &CmfSet, new_step_nm: f64) -> Result<CmfSet> {
    let old = cmf.grid.step_nm;
    let ratio = new_step_nm / old;
    let k = ratio.round();
    if !(new_step_nm > 0.0) || k < 1.0 || (ratio - k).abs() > 1e-9 * ratio.max(1.0) {
        return Err(Error::Argument(format!(
            "new step {new_step_nm} nm is not a positive integer multiple of {old} nm"
        )));
    }
    let k = k as usize;
    let values: Vec<[f64; 3]> = cmf.values.iter().step_by(k).copied().collect();
    let grid = WavelengthGrid::new(cmf.grid.start_nm, old * k as f64, values.len())?;
    CmfSet::new(grid, values)
}

/// Relative spectral power on a wavelength grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Illuminant {
    grid: WavelengthGrid,
    power: Vec<f64>,
}

impl Illuminant {
    pub fn new(grid: WavelengthGrid, power: Vec<f64>) -> Result<Self> {
        if power.len() != grid.count {
            return Err(Error::Data(format!(
                "{} illuminant samples for a grid of {}",
                power.len(),
                grid.count
            )));
        }
        if let Some(v) = power.iter().find(|v| !v.is_finite()) {
            return Err(Error::Data(format!("non-finite illuminant power {v}")));
        }
        Ok(Self { grid, power })
    }

    /// Unnormalized equal-energy illuminant (all ones).
    pub fn equal_energy(grid: WavelengthGrid) -> Self {
        Self { grid, power: vec![1.0; grid.count] }
    }

    pub fn grid(&self) -> &WavelengthGrid {
        &self.grid
    }

    pub fn power(&self) -> &[f64] {
        &self.power
    }

    /// Keeps every k-th sample, matching [`resample_cmf`].
    pub fn resample(&self, new_step_nm: f64) -> Result<Self> {
        let k = (new_step_nm / self.grid.step_nm).round();
        if !(k >= 1.0) || (new_step_nm / self.grid.step_nm - k).abs() > 1e-9 {
            return Err(Error::Argument(format!(
                "new step {new_step_nm} nm is not a positive integer multiple of {} nm",
                self.grid.step_nm
            )));
        }
        let power: Vec<f64> = self.power.iter().step_by(k as usize).copied().collect();
        let grid = WavelengthGrid::new(self.grid.start_nm, new_step_nm, power.len())?;
        Self::new(grid, power)
    }
}

/// Two-column `wavelength, power` table with optional header.
pub fn load_illuminant(path: impl AsRef<Path>) -> Result<Illuminant> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_illuminant_csv(&text)
}

pub fn parse_illuminant_csv(text: &str) -> Result<Illuminant> {
    let rows = parse_numeric_table(text, 2)?;
    let (grid, values) = rows_to_grid(rows)?;
    Illuminant::new(grid, values.into_iter().map(|r| r[0]).collect())
}

pub fn illuminant_to_csv(illum: &Illuminant) -> String {
    let mut out = String::from("wavelength_nm,power\n");
    for (w, p) in illum.grid.wavelengths().zip(&illum.power) {
        out.push_str(&format!("{w},{p:e}\n"));
    }
    out
}

fn y_weighted_sum(illum: &Illuminant, cmf: &CmfSet) -> f64 {
    cmf.y_bar().zip(&illum.power).map(|(y, p)| y * p).sum()
}

/// Scales the illuminant so that `dot(ȳ, power) = 100`.
pub fn normalize_illuminant(illum: &Illuminant, cmf: &CmfSet) -> Result<Illuminant> {
    illum.grid.ensure_matches(&cmf.grid)?;
    let s = y_weighted_sum(illum, cmf);
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::DegenerateIlluminant(s));
    }
    if ((s - 100.0) / 100.0).abs() <= f64::EPSILON {
        return Ok(illum.clone());
    }
    let k = 100.0 / s;
    Ok(Illuminant {
        grid: illum.grid,
        power: illum.power.iter().map(|p| p * k).collect(),
    })
}

/// `A_W = diag(W) A` together with its white point and 50% gray point.
#[derive(Debug, Clone, Serialize)]
pub struct WeightedCmf {
    grid: WavelengthGrid,
    values: Vec<[f64; 3]>,
    white_point: Tristimulus,
    gray50: Tristimulus,
}

/// Builds `A_W` from a CMF set and a normalized illuminant.
pub fn weight_cmf(cmf: &CmfSet, illum: &Illuminant) -> Result<WeightedCmf> {
    illum.grid.ensure_matches(&cmf.grid)?;
    let s = y_weighted_sum(illum, cmf);
    if ((s - 100.0) / 100.0).abs() > NORMALIZATION_RTOL {
        return Err(Error::Argument(format!(
            "illuminant is not normalized: y-bar weighted sum is {s}"
        )));
    }
    let values: Vec<[f64; 3]> = cmf
        .values
        .iter()
        .zip(&illum.power)
        .map(|(row, p)| [row[0] * p, row[1] * p, row[2] * p])
        .collect();
    let mut wcmf = WeightedCmf {
        grid: cmf.grid,
        values,
        white_point: Tristimulus::default(),
        gray50: Tristimulus::default(),
    };
    wcmf.white_point = wcmf.tristimulus(&vec![1.0; wcmf.len()]);
    wcmf.gray50 = wcmf.white_point / 2.0;
    Ok(wcmf)
}

impl WeightedCmf {
    /// Equal-energy weighting of the given CMFs.
    pub fn equal_energy(cmf: &CmfSet) -> Self {
        let ee = normalize_illuminant(&Illuminant::equal_energy(cmf.grid), cmf)
            .expect("CMF y-bar has positive sum");
        weight_cmf(cmf, &ee).expect("normalized equal-energy illuminant")
    }

    pub fn grid(&self) -> &WavelengthGrid {
        &self.grid
    }

    pub fn values(&self) -> &[[f64; 3]] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn column(&self, i: usize) -> Tristimulus {
        Tristimulus::from_array(self.values[i])
    }

    pub fn white_point(&self) -> Tristimulus {
        self.white_point
    }

    pub fn gray50(&self) -> Tristimulus {
        self.gray50
    }

    /// `A_W' rho`. Panics if `rho` has the wrong length.
    pub fn tristimulus(&self, rho: &[f64]) -> Tristimulus {
        assert_eq!(rho.len(), self.values.len(), "reflectance length");
        let mut acc = [0.0; 3];
        for (row, r) in self.values.iter().zip(rho) {
            acc[0] += row[0] * r;
            acc[1] += row[1] * r;
            acc[2] += row[2] * r;
        }
        Tristimulus::from_array(acc)
    }
}
