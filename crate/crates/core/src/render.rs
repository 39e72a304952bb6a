//! Binary PPM images and CSV grids for transition maps.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::atlas::{Pixel, TransitionMap};
use crate::error::{Error, Result};

pub type Rgb = [u8; 3];

pub const SENTINEL_RGB: Rgb = [255, 255, 255];
pub const FAILED_RGB: Rgb = [255, 0, 255];

/// Grid values for pixels outside the disk and failed probes.
pub const OUTSIDE_CODE: i64 = -1;
pub const FAILED_CODE: i64 = -2;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Palette {
    /// Fixed color per transition count.
    #[default]
    TransitionCount,
    /// Two-transition matches in gray; positive gaps in red, brighter for
    /// larger `log10(delta)` between `floor` and `ceil`.
    Delta { floor: f64, ceil: f64 },
}

pub fn count_color(count: usize) -> Rgb {
    match count {
        0 => [0, 0, 0],
        2 => [128, 128, 128],
        4 => [230, 25, 75],
        6 => [60, 180, 75],
        8 => [0, 130, 200],
        c if c >= 10 && c % 2 == 0 => [245, 130, 48],
        _ => [145, 30, 180],
    }
}

impl Palette {
    pub fn color(&self, pixel: &Pixel) -> Rgb {
        let p = match pixel {
            Pixel::Outside => return SENTINEL_RGB,
            Pixel::Failed => return FAILED_RGB,
            Pixel::Probed(p) => p,
        };
        match *self {
            Palette::TransitionCount => count_color(p.count),
            Palette::Delta { floor, ceil } => {
                if !(p.delta > 10f64.powf(floor)) {
                    return [128, 128, 128];
                }
                let t = ((p.delta.log10() - floor) / (ceil - floor)).clamp(0.0, 1.0);
                [(80.0 + 175.0 * t).round() as u8, 0, 0]
            }
        }
    }

    /// Machine-readable legend.
    pub fn describe(&self) -> Value {
        let entries = match self {
            Palette::TransitionCount => json!([
                {"count": 0, "rgb": count_color(0)},
                {"count": 2, "rgb": count_color(2)},
                {"count": 4, "rgb": count_color(4)},
                {"count": 6, "rgb": count_color(6)},
                {"count": 8, "rgb": count_color(8)},
                {"count": ">=10", "rgb": count_color(10)},
                {"count": "odd", "rgb": count_color(1)},
            ]),
            Palette::Delta { floor, ceil } => json!([
                {"delta": format!("<= 1e{floor}"), "rgb": [128, 128, 128]},
                {"delta": format!("1e{floor} .. 1e{ceil}, log scale"), "rgb_from": [80, 0, 0], "rgb_to": [255, 0, 0]},
            ]),
        };
        json!({
            "palette": self,
            "entries": entries,
            "outside": SENTINEL_RGB,
            "failed": FAILED_RGB,
        })
    }
}

/// P6 image, one pixel per raster cell.
pub fn ppm_bytes(map: &TransitionMap, palette: &Palette) -> Vec<u8> {
    ppm_bytes_annotated(map, palette, &[])
}

/// P6 image with `comments` as `#` lines in the header.
pub fn ppm_bytes_annotated(map: &TransitionMap, palette: &Palette, comments: &[String]) -> Vec<u8> {
    let n = map.raster.size;
    let mut out = String::from("P6\n");
    for c in comments {
        out.push_str(&comment_line(c));
    }
    out.push_str(&format!("{n} {n}\n255\n"));
    let mut out = out.into_bytes();
    out.reserve(3 * n * n);
    for p in &map.pixels {
        out.extend_from_slice(&palette.color(p));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GridField {
    Count,
    Delta,
    C,
}

/// One CSV row per raster row. Counts use `-1` outside and `-2` for failures;
/// real-valued fields use `nan` for both.
pub fn grid_csv(map: &TransitionMap, field: GridField) -> String {
    let n = map.raster.size;
    let mut s = String::with_capacity(map.pixels.len() * 4);
    for row in map.pixels.chunks(n) {
        let cells: Vec<String> = row
            .iter()
            .map(|p| match (field, p) {
                (GridField::Count, Pixel::Outside) => OUTSIDE_CODE.to_string(),
                (GridField::Count, Pixel::Failed) => FAILED_CODE.to_string(),
                (GridField::Count, Pixel::Probed(p)) => p.count.to_string(),
                (_, Pixel::Outside | Pixel::Failed) => "nan".to_string(),
                (GridField::Delta, Pixel::Probed(p)) => format!("{:.17e}", p.delta),
                (GridField::C, Pixel::Probed(p)) => format!("{:.17e}", p.c),
            })
            .collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

/// Creates parent directories as needed.
pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(bytes).map_err(|e| Error::io(path, e))
}

/// Files written by [`render_map`].
#[derive(Debug, Clone, Serialize)]
pub struct RenderedMap {
    pub image: PathBuf,
    pub grids: Vec<PathBuf>,
}

fn comment_line(text: &str) -> String {
    format!("# {}\n", text.replace(['\n', '\r'], " "))
}

/// Writes `<stem>.ppm`, `<stem>.counts.csv` and `<stem>.c.csv` (plus `<stem>.delta.csv` for
/// difference maps) next to `out_path`.
pub fn render_map(map: &TransitionMap, palette: &Palette, out_path: impl AsRef<Path>) -> Result<RenderedMap> {
    render_map_annotated(map, palette, out_path, &[])
}

/// As [`render_map`], with `comments` written as `#` lines at the top of
/// every file.
pub fn render_map_annotated(
    map: &TransitionMap,
    palette: &Palette,
    out_path: impl AsRef<Path>,
    comments: &[String],
) -> Result<RenderedMap> {
    let header: String = comments.iter().map(|c| comment_line(c)).collect();
    let csv = |field| format!("{header}{}", grid_csv(map, field));
    let base = out_path.as_ref().with_extension("");
    let with = |suffix: &str| {
        let mut s = base.clone().into_os_string();
        s.push(suffix);
        PathBuf::from(s)
    };
    let image = with(".ppm");
    write_file(&image, &ppm_bytes_annotated(map, palette, comments))?;
    let mut grids = vec![with(".counts.csv"), with(".c.csv")];
    write_file(&grids[0], csv(GridField::Count).as_bytes())?;
    write_file(&grids[1], csv(GridField::C).as_bytes())?;
    if map.has_deltas {
        grids.push(with(".delta.csv"));
        write_file(&grids[2], csv(GridField::Delta).as_bytes())?;
    }
    Ok(RenderedMap { image, grids })
}

/// Pretty-printed JSON document.
pub fn write_json(path: impl AsRef<Path>, value: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Internal(e.to_string()))?;
    write_file(path.as_ref(), format!("{text}\n").as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::{Hemisphere, PixelProbe, PolarRaster};
    use crate::probe::TransitionKind;
    use crate::spectral::Tristimulus;

    fn toy(size: usize, count: usize) -> TransitionMap {
        let raster = PolarRaster::new(Hemisphere::Upper, size).unwrap();
        let pixels = (0..size * size)
            .map(|k| match raster.pixel_direction(k % size, k / size) {
                None => Pixel::Outside,
                Some(_) => Pixel::Probed(PixelProbe {
                    count,
                    kind: TransitionKind::TypeILike,
                    c: 1.5,
                    xyz_opt: Tristimulus::default(),
                    delta: 0.0,
                }),
            })
            .collect();
        TransitionMap { raster, pixels, in_disk: 0, failures: 0, odd_counts: 0, has_deltas: false }
    }

    #[test]
    fn ppm_size_and_colors() {
        let m = toy(64, 2);
        let bytes = ppm_bytes(&m, &Palette::TransitionCount);
        let header = b"P6\n64 64\n255\n";
        assert_eq!(bytes.len(), header.len() + 3 * 64 * 64);
        assert_eq!(&bytes[..header.len()], header);
        assert_eq!(&bytes[header.len()..header.len() + 3], &SENTINEL_RGB);
        let mid = header.len() + 3 * (32 * 64 + 32);
        assert_eq!(&bytes[mid..mid + 3], &[128, 128, 128]);
        assert_eq!(count_color(0), [0, 0, 0]);
    }

    #[test]
    fn csv_sentinels() {
        let mut m = toy(16, 4);
        m.pixels[8 * 16 + 8] = Pixel::Failed;
        let csv = grid_csv(&m, GridField::Count);
        let rows: Vec<&str> = csv.lines().collect();
        assert_eq!(rows.len(), 16);
        assert!(rows[0].starts_with("-1,"));
        assert_eq!(rows[8].split(',').nth(8), Some("-2"));
        assert_eq!(rows[8].split(',').nth(7), Some("4"));
    }
}
