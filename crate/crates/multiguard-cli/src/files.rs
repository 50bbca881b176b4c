//! Results-file I/O and the provenance comment embedded in every output so
//! results are self-describing. Provenance deliberately contains no paths or
//! timestamps: outputs must be byte-identical across reruns with the same
//! seed and parameters.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use multiguard::certifier::Mode;
use multiguard::evaluation::ResultRecord;
use multiguard::{Error, Result};

pub const RESULTS_FILE_HEADER: &str = "# multiguard-results v1";
pub const RESULTS_COLUMNS: &str = "id,mode,R,e,d,k";

/// A provenance line: sorted-key JSON of the run parameters.
pub fn provenance(subcommand: &str, params: &[(&str, String)]) -> String {
    let mut map = serde_json::Map::new();
    map.insert("tool".into(), "multiguard".into());
    map.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    map.insert("subcommand".into(), subcommand.into());
    for (key, value) in params {
        map.insert((*key).into(), serde_json::Value::String(value.clone()));
    }
    format!(
        "provenance: {}",
        serde_json::Value::Object(map)
    )
}

/// FNV-1a 64 over the provenance text, as a 16-hex-digit run identifier.
pub fn config_hash(provenance_line: &str) -> String {
    let mut hash: u64 = 0xcbf29ce484222325;
    for byte in provenance_line.as_bytes() {
        hash ^= u64::from(*byte);
        hash = hash.wrapping_mul(0x100000001b3);
    }
    format!("{hash:016x}")
}

pub fn write_results(
    path: &Path,
    records: &[ResultRecord<f64>],
    comments: &[String],
) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{RESULTS_FILE_HEADER}")?;
    for comment in comments {
        writeln!(out, "# {comment}")?;
    }
    writeln!(out, "{RESULTS_COLUMNS}")?;
    for rec in records {
        writeln!(
            out,
            "{},{},{:.6},{},{},{}",
            rec.instance_id, rec.mode, rec.radius, rec.certified_size, rec.d, rec.k
        )?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRecord<f64>>> {
    let reader = BufReader::new(File::open(path)?);
    let mut records = Vec::new();
    let mut saw_header = false;
    let mut saw_columns = false;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        if lineno == 1 {
            if line.trim_end() != RESULTS_FILE_HEADER {
                return Err(Error::Record {
                    line: lineno,
                    message: format!("expected header {RESULTS_FILE_HEADER:?}, got {line:?}"),
                });
            }
            saw_header = true;
            continue;
        }
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        if !saw_columns {
            if line.trim_end() != RESULTS_COLUMNS {
                return Err(Error::Record {
                    line: lineno,
                    message: format!("expected columns {RESULTS_COLUMNS:?}, got {line:?}"),
                });
            }
            saw_columns = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::Record {
                line: lineno,
                message: format!("expected 6 fields, got {}", fields.len()),
            });
        }
        let bad = |what: &str, detail: String| Error::Record {
            line: lineno,
            message: format!("bad {what}: {detail}"),
        };
        let mode: Mode = fields[1]
            .parse()
            .map_err(|e: Error| bad("mode", e.to_string()))?;
        let radius: f64 = fields[2]
            .parse()
            .map_err(|e| bad("radius", format!("{e}")))?;
        let certified_size: usize = fields[3]
            .parse()
            .map_err(|e| bad("certified size", format!("{e}")))?;
        let d: usize = fields[4].parse().map_err(|e| bad("d", format!("{e}")))?;
        let k: usize = fields[5].parse().map_err(|e| bad("k", format!("{e}")))?;
        if radius < 0.0 || !radius.is_finite() {
            return Err(bad("radius", format!("{radius} not a nonnegative number")));
        }
        if d == 0 || k == 0 || certified_size > d.min(k) {
            return Err(bad(
                "record",
                format!("e = {certified_size} incompatible with d = {d}, k = {k}"),
            ));
        }
        records.push(ResultRecord {
            instance_id: fields[0].to_string(),
            mode,
            radius,
            certified_size,
            d,
            k,
        });
    }
    if !saw_header {
        return Err(Error::Record {
            line: 1,
            message: "empty file: missing schema header".into(),
        });
    }
    Ok(records)
}
