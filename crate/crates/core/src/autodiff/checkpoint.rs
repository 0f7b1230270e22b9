//! Plain-text parameter checkpoints.
//!
//! The format is line-oriented and value-exact: floats are written with
//! Rust's shortest round-trip formatting, so saving and reloading reproduces
//! every bit. Layout:
//!
//! ```text
//! toolnet-params v1
//! meta <key> <value>            (zero or more, sorted by key)
//! param <name> <rows> <cols>
//! <rows*cols space-separated values on one line>
//! ...
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use super::{ParamStore, Scalar, Tensor};
use crate::error::AutodiffError;

const MAGIC: &str = "toolnet-params v1";

/// A loaded checkpoint: parameter values plus free-form metadata lines.
pub struct Checkpoint<T> {
    pub params: ParamStore<T>,
    pub meta: BTreeMap<String, String>,
}

pub fn save_params<T: Scalar>(
    path: &Path,
    params: &ParamStore<T>,
    meta: &BTreeMap<String, String>,
) -> Result<(), AutodiffError> {
    let mut out = String::new();
    out.push_str(MAGIC);
    out.push('\n');
    for (key, value) in meta {
        debug_assert!(!key.contains(char::is_whitespace) && !value.contains('\n'));
        out.push_str(&format!("meta {key} {value}\n"));
    }
    for (name, param) in params.iter() {
        let (rows, cols) = param.value.shape();
        out.push_str(&format!("param {name} {rows} {cols}\n"));
        let line: Vec<String> = param.value.data().iter().map(|v| format!("{v}")).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn load_params<T: Scalar>(path: &Path) -> Result<Checkpoint<T>, AutodiffError> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();

    let (_, first) = lines.next().ok_or(AutodiffError::CheckpointParse {
        line: 1,
        reason: "empty file".into(),
    })?;
    if first.trim_end() != MAGIC {
        return Err(AutodiffError::CheckpointParse {
            line: 1,
            reason: format!("bad header {first:?}"),
        });
    }

    let mut params = ParamStore::new();
    let mut meta = BTreeMap::new();
    while let Some((idx, line)) = lines.next() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        match fields.next() {
            Some("meta") => {
                let key = fields.next().ok_or_else(|| parse_err(lineno, "meta without key"))?;
                let value: Vec<&str> = fields.collect();
                meta.insert(key.to_string(), value.join(" "));
            }
            Some("param") => {
                let name = fields
                    .next()
                    .ok_or_else(|| parse_err(lineno, "param without name"))?;
                let rows: usize = parse_field(fields.next(), lineno, "rows")?;
                let cols: usize = parse_field(fields.next(), lineno, "cols")?;
                let (data_idx, data_line) = lines
                    .next()
                    .ok_or_else(|| parse_err(lineno, "missing value line"))?;
                let values = parse_values::<T>(data_line, data_idx + 1)?;
                if values.len() != rows * cols {
                    return Err(parse_err(
                        data_idx + 1,
                        &format!(
                            "expected {} values for {name}, found {}",
                            rows * cols,
                            values.len()
                        ),
                    ));
                }
                params.insert(name, Tensor::from_vec(rows, cols, values));
            }
            Some(other) => {
                return Err(parse_err(lineno, &format!("unknown record {other:?}")));
            }
            None => {}
        }
    }
    Ok(Checkpoint { params, meta })
}

fn parse_err(line: usize, reason: &str) -> AutodiffError {
    AutodiffError::CheckpointParse { line, reason: reason.to_string() }
}

fn parse_field<F: std::str::FromStr>(
    field: Option<&str>,
    line: usize,
    what: &str,
) -> Result<F, AutodiffError> {
    field
        .and_then(|f| f.parse().ok())
        .ok_or_else(|| parse_err(line, &format!("bad or missing {what}")))
}

fn parse_values<T: Scalar>(line: &str, lineno: usize) -> Result<Vec<T>, AutodiffError> {
    line.split_whitespace()
        .map(|tok| {
            // Shortest-repr decimals identify each f32/f64 uniquely, so
            // parsing through f64 reproduces the stored value exactly.
            tok.parse::<f64>()
                .ok()
                .and_then(T::from_f64)
                .ok_or_else(|| parse_err(lineno, &format!("bad float {tok:?}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bitwise_exact() {
        let mut params = ParamStore::new();
        params.insert(
            "layer.weight",
            Tensor::from_vec(
                2,
                3,
                vec![
                    0.1,
                    -1.0 / 3.0,
                    f64::MIN_POSITIVE,
                    1.2345678901234567e300,
                    -0.0,
                    2.0_f64.sqrt(),
                ],
            ),
        );
        params.insert("layer.bias", Tensor::row(&[1e-9, -42.5]));
        let mut meta = BTreeMap::new();
        meta.insert("config".to_string(), "{\"hidden\":32}".to_string());

        let dir = std::env::temp_dir().join("toolnet-ckpt-test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("roundtrip.ckpt");
        save_params(&path, &params, &meta).unwrap();
        let loaded: Checkpoint<f64> = load_params(&path).unwrap();

        assert_eq!(loaded.meta, meta);
        assert_eq!(loaded.params.len(), 2);
        for (name, param) in params.iter() {
            let got = loaded.params.get(name).unwrap();
            assert_eq!(got.value.shape(), param.value.shape());
            for (a, b) in got.value.data().iter().zip(param.value.data()) {
                assert_eq!(a.to_bits(), b.to_bits(), "{name} drifted");
            }
        }
    }

    #[test]
    fn rejects_wrong_header() {
        let dir = std::env::temp_dir().join("toolnet-ckpt-test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad-header.ckpt");
        fs::write(&path, "something else\n").unwrap();
        assert!(matches!(
            load_params::<f64>(&path),
            Err(AutodiffError::CheckpointParse { line: 1, .. })
        ));
    }

    #[test]
    fn rejects_value_count_mismatch() {
        let dir = std::env::temp_dir().join("toolnet-ckpt-test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("short-line.ckpt");
        fs::write(&path, format!("{MAGIC}\nparam w 1 3\n1.0 2.0\n")).unwrap();
        assert!(matches!(
            load_params::<f64>(&path),
            Err(AutodiffError::CheckpointParse { .. })
        ));
    }
}
