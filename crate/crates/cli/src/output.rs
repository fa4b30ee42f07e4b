//! Table emission: CSV with `#` metadata lines, or JSON lines with a leading
//! metadata object.

use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
}

/// Reproducibility header: command, version, seed and the resolved section.
#[derive(Debug, Serialize)]
pub struct Meta<'a, C: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub seed: Option<u64>,
    pub config: &'a C,
}

impl<'a, C: Serialize> Meta<'a, C> {
    pub fn new(command: &'a str, seed: Option<u64>, config: &'a C) -> Self {
        Meta {
            tool: "fbh",
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed,
            config,
        }
    }
}

pub fn render<C: Serialize, R: Serialize>(
    format: Format,
    meta: &Meta<'_, C>,
    rows: &[R],
) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Csv => render_csv(meta, rows),
        Format::Jsonl => render_jsonl(meta, rows),
    }
}

fn render_csv<C: Serialize, R: Serialize>(
    meta: &Meta<'_, C>,
    rows: &[R],
) -> Result<Vec<u8>, CliError> {
    let mut out = Vec::new();
    out.extend_from_slice(
        format!(
            "# {} {}\n# command: {}\n",
            meta.tool, meta.version, meta.command
        )
        .as_bytes(),
    );
    if let Some(seed) = meta.seed {
        out.extend_from_slice(format!("# seed: {seed}\n").as_bytes());
    }
    let config = toml::to_string(meta.config).map_err(|e| CliError::internal(e.to_string()))?;
    for line in config.lines().filter(|l| !l.trim().is_empty()) {
        out.extend_from_slice(format!("# {line}\n").as_bytes());
    }
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer
            .serialize(row)
            .map_err(|e| CliError::internal(e.to_string()))?;
    }
    writer
        .into_inner()
        .map_err(|e| CliError::internal(e.to_string()))
}

fn render_jsonl<C: Serialize, R: Serialize>(
    meta: &Meta<'_, C>,
    rows: &[R],
) -> Result<Vec<u8>, CliError> {
    let mut out = Vec::new();
    let line = serde_json::json!({ "meta": meta });
    out.extend_from_slice(line.to_string().as_bytes());
    out.push(b'\n');
    for row in rows {
        let line = serde_json::to_string(row).map_err(|e| CliError::internal(e.to_string()))?;
        out.extend_from_slice(line.as_bytes());
        out.push(b'\n');
    }
    Ok(out)
}

/// `re+imi` with shortest round-trip formatting.
pub fn fmt_complex(z: fbh_core::C64) -> String {
    if z.im.is_sign_negative() {
        format!("{}{}i", z.re, z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Coordinates joined by `;` so the value needs no CSV quoting.
pub fn fmt_point(v: &[fbh_core::C64]) -> String {
    v.iter()
        .map(|z| fmt_complex(*z))
        .collect::<Vec<_>>()
        .join(";")
}
