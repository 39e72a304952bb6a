use std::io::Write;
use std::path::{Path, PathBuf};

use ocs_core::render::{write_file, write_json};
use serde_json::Value;

use crate::config::CliResult;

/// Writes pretty JSON to `out`, or prints it when no path is given.
pub fn emit_json(out: Option<&Path>, value: &Value) -> CliResult<()> {
    match out {
        Some(path) => {
            write_json(path, value)?;
            log::info!("wrote {}", path.display());
        }
        None => print_stdout(&format!("{}\n", serde_json::to_string_pretty(value).expect("JSON values serialize"))),
    }
    Ok(())
}

/// Like `print!`, but a closed pipe is not an error.
pub fn print_stdout(text: &str) {
    let _ = std::io::stdout().write_all(text.as_bytes());
}

/// `# provenance: {...}` comment line for CSV and PPM headers.
pub fn provenance_comment(provenance: &Value) -> String {
    format!("provenance: {provenance}")
}

fn csv_with_provenance(provenance: &Value, header: &str, rows: &[String]) -> String {
    let mut s = format!("# {}\n{header}\n", provenance_comment(provenance));
    for r in rows {
        s.push_str(r);
        s.push('\n');
    }
    s
}

pub fn emit_csv(out: &Path, provenance: &Value, header: &str, rows: &[String]) -> CliResult<()> {
    write_file(out, csv_with_provenance(provenance, header, rows).as_bytes())?;
    log::info!("wrote {}", out.display());
    Ok(())
}

/// `dir/stem.json` -> `dir/stem<suffix>`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.with_extension("").into_os_string();
    s.push(suffix);
    PathBuf::from(s)
}
