//! Rendering and writing scenario outputs.

use crate::config::ResolvedScenario;
use crate::scenarios::ScenarioOutput;
use crate::CliError;
use serde_json::{json, Map, Value};
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Comment lines heading every CSV file.
pub fn preamble(r: &ResolvedScenario) -> Vec<String> {
    vec![
        format!("scenario: {}", r.name),
        format!("hash: sha256:{}", r.hash),
        format!("seed: {}", r.seed),
    ]
}

fn pretty(v: &Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s.into_bytes()
}

/// File names and contents, in write order.
///
/// CSV: one `<scenario>_<table>.csv` per table. JSON: a single
/// `<scenario>.json`. Documents are always written as
/// `<scenario>_<document>.json`.
pub fn render(r: &ResolvedScenario, out: &ScenarioOutput, format: Format) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    match format {
        Format::Csv => {
            let pre = preamble(r);
            for t in &out.tables {
                files.push((format!("{}_{}.csv", r.name, t.name), t.to_csv_string(&pre).into_bytes()));
            }
        }
        Format::Json => {
            let doc = json!({
                "scenario": r.name,
                "hash": format!("sha256:{}", r.hash),
                "seed": r.seed,
                "params": r.params,
                "tables": out.tables,
            });
            files.push((format!("{}.json", r.name), pretty(&doc)));
        }
    }
    for d in &out.documents {
        let mut wrapped = Map::new();
        wrapped.insert("scenario".into(), json!(r.name));
        wrapped.insert("hash".into(), json!(format!("sha256:{}", r.hash)));
        wrapped.insert("seed".into(), json!(r.seed));
        wrapped.insert(d.name.clone(), d.value.clone());
        files.push((format!("{}_{}.json", r.name, d.name), pretty(&Value::Object(wrapped))));
    }
    files
}

/// Writes every output file or none: all files are staged next to their
/// targets and renamed only once each has been written.
pub fn write_outputs(
    r: &ResolvedScenario,
    out: &ScenarioOutput,
    format: Format,
    dir: &Path,
) -> Result<Vec<PathBuf>, CliError> {
    let files = render(r, out, format);
    fs::create_dir_all(dir)?;
    let mut staged: Vec<(PathBuf, PathBuf)> = Vec::new();
    for (name, bytes) in &files {
        let tmp = dir.join(format!(".{name}.partial"));
        if let Err(e) = fs::write(&tmp, bytes) {
            let _ = fs::remove_file(&tmp);
            for (t, _) in &staged {
                let _ = fs::remove_file(t);
            }
            return Err(e.into());
        }
        staged.push((tmp, dir.join(name)));
    }
    let mut written = Vec::new();
    for (tmp, dst) in staged {
        fs::rename(&tmp, &dst)?;
        written.push(dst);
    }
    Ok(written)
}
