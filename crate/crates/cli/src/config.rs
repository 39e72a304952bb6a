use std::fmt;
use std::path::{Path, PathBuf};

use ocs_core::munsell::MunsellTable;
use ocs_core::spectral::{load_illuminant, normalize_illuminant, resample_cmf, weight_cmf};
use ocs_core::synth::smoothest_spectrum;
use ocs_core::{CmfSet, SolverConfig, WeightedCmf};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

/// Environment variable naming the default data directory.
pub const DATA_DIR_ENV: &str = "OCS_DATA_DIR";
pub const CMF_FILE: &str = "cie1931_2deg_1nm.csv";
pub const MUNSELL_FILE: &str = "munsell_renotation_real.csv";

/// Process exit status for a failed command.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub msg: String,
}

pub const EXIT_VERIFY: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_DATA: u8 = 3;

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, msg: msg.into() }
    }

    pub fn verify(msg: impl Into<String>) -> Self {
        Self { code: EXIT_VERIFY, msg: msg.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.msg)
    }
}

impl From<ocs_core::Error> for CliError {
    fn from(e: ocs_core::Error) -> Self {
        use ocs_core::Error::*;
        let code = match e {
            Io { .. } | Format { .. } | Data(_) | Grid(_) | DegenerateIlluminant(_) => EXIT_DATA,
            Argument(_) | Geometry(_) => EXIT_USAGE,
            Solver(_) | Atlas { .. } | Internal(_) => EXIT_VERIFY,
        };
        Self { code, msg: e.to_string() }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Where the illuminant comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum IlluminantSpec {
    EqualEnergy,
    Munsell(String),
    File(PathBuf),
}

impl std::str::FromStr for IlluminantSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("ee") {
            Ok(Self::EqualEnergy)
        } else if let Some(name) = s.strip_prefix("munsell:") {
            if name.trim().is_empty() {
                return Err("munsell: needs a color name, e.g. munsell:5Y 8/16".into());
            }
            Ok(Self::Munsell(name.trim().to_string()))
        } else {
            Ok(Self::File(PathBuf::from(s)))
        }
    }
}

impl fmt::Display for IlluminantSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::EqualEnergy => f.write_str("EE"),
            Self::Munsell(n) => write!(f, "munsell:{n}"),
            Self::File(p) => write!(f, "{}", p.display()),
        }
    }
}

/// Settings shared by every subcommand, echoed into each artifact.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub cmf_path: Option<PathBuf>,
    pub illuminant_spec: String,
    pub munsell_data: Option<PathBuf>,
    pub step_nm: f64,
    pub solver: SolverConfig,
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DataFile {
    pub role: &'static str,
    pub source: String,
    pub sha256: String,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| {
        CliError { code: EXIT_DATA, msg: format!("failed to read {}: {e}", path.display()) }
    })
}

/// Explicit path, then the data directory, then the copy compiled into the
/// library.
fn resolve(explicit: Option<&Path>, file: &str) -> Option<PathBuf> {
    if let Some(p) = explicit {
        return Some(p.to_path_buf());
    }
    let dir = std::env::var_os(DATA_DIR_ENV)?;
    let p = Path::new(&dir).join(file);
    p.is_file().then_some(p)
}

/// Loaded data plus its provenance.
pub struct Context {
    pub config: RunConfig,
    /// CMFs on the working grid.
    pub cmf: CmfSet,
    pub wcmf: WeightedCmf,
    pub data: Vec<DataFile>,
}

impl Context {
    pub fn load(config: RunConfig, illuminant: &IlluminantSpec) -> CliResult<Self> {
        let mut data = Vec::new();
        let base = match resolve(config.cmf_path.as_deref(), CMF_FILE) {
            Some(path) => {
                let text = read(&path)?;
                data.push(DataFile { role: "cmf", source: path.display().to_string(), sha256: sha256_hex(text.as_bytes()) });
                ocs_core::spectral::parse_cmf_csv(&text, None)?
            }
            None => {
                let text = CmfSet::cie1931_2deg_source();
                data.push(DataFile { role: "cmf", source: format!("bundled:{CMF_FILE}"), sha256: sha256_hex(text.as_bytes()) });
                CmfSet::cie1931_2deg()
            }
        };
        let cmf = resample_cmf(&base, config.step_nm)?;
        let wcmf = match illuminant {
            IlluminantSpec::EqualEnergy => WeightedCmf::equal_energy(&cmf),
            IlluminantSpec::Munsell(name) => {
                let table = munsell_table(config.munsell_data.as_deref(), &mut data)?;
                let target = table.lookup(name)?.target()?;
                let synth = smoothest_spectrum(&base, &target)?;
                let illum = normalize_illuminant(&synth.illuminant.resample(config.step_nm)?, &cmf)?;
                weight_cmf(&cmf, &illum)?
            }
            IlluminantSpec::File(path) => {
                let text = read(path)?;
                data.push(DataFile {
                    role: "illuminant",
                    source: path.display().to_string(),
                    sha256: sha256_hex(text.as_bytes()),
                });
                let raw = load_illuminant(path)?;
                let raw = if raw.grid().matches(base.grid()) { raw.resample(config.step_nm)? } else { raw };
                let illum = normalize_illuminant(&raw, &cmf)?;
                weight_cmf(&cmf, &illum)?
            }
        };
        Ok(Self { config, cmf, wcmf, data })
    }

    /// Config echo and data hashes embedded in every artifact.
    pub fn provenance(&self, command: &str, args: Value) -> Value {
        json!({
            "tool": "ocs",
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "arguments": args,
            "config": self.config,
            "data": self.data,
            "white_point": self.wcmf.white_point(),
        })
    }
}

pub fn munsell_table(explicit: Option<&Path>, data: &mut Vec<DataFile>) -> CliResult<MunsellTable> {
    match resolve(explicit, MUNSELL_FILE) {
        Some(path) => {
            let text = read(&path)?;
            data.push(DataFile { role: "munsell", source: path.display().to_string(), sha256: sha256_hex(text.as_bytes()) });
            Ok(MunsellTable::parse(&text)?)
        }
        None => {
            let table = MunsellTable::bundled();
            data.push(DataFile {
                role: "munsell",
                source: format!("bundled:{MUNSELL_FILE}"),
                sha256: sha256_hex(MunsellTable::bundled_source().as_bytes()),
            });
            Ok(table)
        }
    }
}
