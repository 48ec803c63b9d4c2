// Copyright 2026 Tickwork Contributors
// SPDX-License-Identifier: Apache-2.0

//! Deterministic file emission: significant-digit formatting, CSV with a
//! provenance header, and JSON.

use std::io::Write;
use std::path::Path;

/// Rounds to 12 significant digits, then prints the shortest string that
/// parses back to exactly that rounded value.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("rounded float parses");
    format!("{rounded}")
}

/// Header line carried by every output file: config hash and seed.
pub fn provenance_line(config_hash: u64, seed: u64) -> String {
    format!("# config_hash={config_hash:016x} seed={seed}")
}

/// Writes a CSV with the provenance header, a column-name row, and
/// 12-significant-digit values.
pub fn write_csv(
    path: &Path,
    config_hash: u64,
    seed: u64,
    columns: &[&str],
    rows: &[Vec<f64>],
) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut out = String::new();
    out.push_str(&provenance_line(config_hash, seed));
    out.push('\n');
    out.push_str(&columns.join(","));
    out.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), columns.len());
        let cells: Vec<String> = row.iter().map(|&x| fmt_sig(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(out.as_bytes())
}

/// Parses a CSV produced by [`write_csv`] back into its numeric rows.
pub fn read_csv(path: &Path) -> std::io::Result<(Vec<String>, Vec<Vec<f64>>)> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let _provenance = lines.next();
    let columns = lines
        .next()
        .map(|l| l.split(',').map(str::to_string).collect())
        .unwrap_or_default();
    let rows = lines
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.split(',')
                .map(|cell| cell.parse::<f64>().unwrap_or(f64::NAN))
                .collect()
        })
        .collect();
    Ok((columns, rows))
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(serde_json::to_string_pretty(value).expect("json serializes").as_bytes())?;
    file.write_all(b"\n")
}
