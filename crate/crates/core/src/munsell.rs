//! Munsell renotation chromaticities.
//!
//! The bundled table holds the "real" renotation set (CIE xyY, Illuminant C).

use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::synth::ChromaticityTarget;

const RENOTATION_CSV: &str = include_str!("../data/munsell_renotation_real.csv");

/// The five high-chroma colors used for illuminant variation studies.
pub const HIGH_CHROMA_SET: [&str; 5] = ["5R 5/14", "5Y 8/16", "5G 7/10", "5B 6/10", "5P 4/12"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MunsellEntry {
    pub hue: String,
    pub value: f64,
    pub chroma: f64,
    pub x: f64,
    pub y: f64,
    #[serde(rename = "Y")]
    pub big_y: f64,
}

impl MunsellEntry {
    pub fn name(&self) -> String {
        format!("{} {}/{}", self.hue, self.value, self.chroma)
    }

    pub fn target(&self) -> Result<ChromaticityTarget> {
        ChromaticityTarget::new(self.x, self.y, self.name())
    }
}

#[derive(Debug, Clone)]
pub struct MunsellTable {
    entries: Vec<MunsellEntry>,
}

impl MunsellTable {
    pub fn bundled() -> Self {
        Self::parse(RENOTATION_CSV).expect("bundled renotation table parses")
    }

    /// Text of the bundled table.
    pub fn bundled_source() -> &'static str {
        RENOTATION_CSV
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Parses `hue,value,chroma,x,y,Y` rows; a header row is optional.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 6 {
                return Err(Error::Format { line: k + 1, msg: format!("expected 6 fields, found {}", fields.len()) });
            }
            let nums: std::result::Result<Vec<f64>, _> = fields[1..].iter().map(|f| f.parse::<f64>()).collect();
            let nums = match nums {
                Ok(v) => v,
                Err(_) if entries.is_empty() => continue,
                Err(e) => return Err(Error::Format { line: k + 1, msg: e.to_string() }),
            };
            entries.push(MunsellEntry {
                hue: fields[0].to_ascii_uppercase(),
                value: nums[0],
                chroma: nums[1],
                x: nums[2],
                y: nums[3],
                big_y: nums[4],
            });
        }
        if entries.is_empty() {
            return Err(Error::Data("Munsell table has no entries".into()));
        }
        Ok(MunsellTable { entries })
    }

    pub fn entries(&self) -> &[MunsellEntry] {
        &self.entries
    }

    /// Looks up a notation such as `5Y 8/16`.
    pub fn lookup(&self, name: &str) -> Result<&MunsellEntry> {
        let (hue, value, chroma) = parse_notation(name)?;
        self.entries
            .iter()
            .find(|e| e.hue == hue && (e.value - value).abs() < 1e-9 && (e.chroma - chroma).abs() < 1e-9)
            .ok_or_else(|| Error::Data(format!("Munsell color {name} is not in the table")))
    }
}

fn parse_notation(name: &str) -> Result<(String, f64, f64)> {
    let bad = || Error::Argument(format!("malformed Munsell notation {name:?}, expected e.g. \"5Y 8/16\""));
    let (hue, rest) = name.trim().split_once(char::is_whitespace).ok_or_else(bad)?;
    let (v, c) = rest.trim().split_once('/').ok_or_else(bad)?;
    let value = v.trim().parse().map_err(|_| bad())?;
    let chroma = c.trim().parse().map_err(|_| bad())?;
    Ok((hue.to_ascii_uppercase(), value, chroma))
}
