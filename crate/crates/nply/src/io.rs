//! JSON readers and writers for the toolkit's file formats.
//!
//! Every `parse_*` function takes untrusted bytes, validates all structural
//! invariants, and returns an error instead of panicking; these are the
//! entry points exercised by the fuzz targets.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classes::{ClassId, MembershipVerdict};
use crate::generators::GenConfig;
use crate::harness::SuiteConfig;
use crate::operators::TupleSystem;
use crate::series::ComplexSeries;
use crate::targets::TargetSpec;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("failed to read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("failed to write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// Generation metadata embedded in emitted files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub class_id: ClassId,
    pub n: usize,
    pub target: TargetSpec,
    pub gen: GenConfig,
    /// Non-canonical sidecar: excluded from reproducibility comparisons.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created: Option<String>,
}

/// A tuple file: the wire-format tuple plus optional provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TupleFile {
    #[serde(flatten)]
    pub tuple: TupleSystem,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

/// A single-series file: the wire-format series plus optional provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesFile {
    #[serde(flatten)]
    pub series: ComplexSeries,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

pub fn parse_series_json(bytes: &[u8]) -> Result<SeriesFile, IoError> {
    Ok(serde_json::from_slice(bytes)?)
}

pub fn parse_tuple_json(bytes: &[u8]) -> Result<TupleFile, IoError> {
    Ok(serde_json::from_slice(bytes)?)
}

pub fn parse_target_json(bytes: &[u8]) -> Result<TargetSpec, IoError> {
    Ok(serde_json::from_slice(bytes)?)
}

pub fn parse_suite_config_json(bytes: &[u8]) -> Result<SuiteConfig, IoError> {
    Ok(serde_json::from_slice(bytes)?)
}

pub fn parse_verdict_json(bytes: &[u8]) -> Result<MembershipVerdict, IoError> {
    Ok(serde_json::from_slice(bytes)?)
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, IoError> {
    fs::read(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_series_file(path: &Path) -> Result<SeriesFile, IoError> {
    parse_series_json(&read_bytes(path)?)
}

pub fn read_tuple_file(path: &Path) -> Result<TupleFile, IoError> {
    parse_tuple_json(&read_bytes(path)?)
}

pub fn read_target_file(path: &Path) -> Result<TargetSpec, IoError> {
    parse_target_json(&read_bytes(path)?)
}

pub fn read_suite_config(path: &Path) -> Result<SuiteConfig, IoError> {
    parse_suite_config_json(&read_bytes(path)?)
}

/// Writes a value as canonical JSON (stable field order, full-precision
/// floats) followed by a newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let mut body = serde_json::to_string_pretty(value)?;
    body.push('\n');
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|source| IoError::Write {
                path: path.display().to_string(),
                source,
            })?;
        }
    }
    fs::write(path, body).map_err(|source| IoError::Write {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_file_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.json");
        let series: ComplexSeries =
            serde_json::from_str(r#"{"order":2,"coeffs":[[0,0],[1,0],[0.5,-0.25]]}"#).unwrap();
        let file = SeriesFile { series: series.clone(), provenance: None };
        write_json(&path, &file).unwrap();
        let back = read_series_file(&path).unwrap();
        assert_eq!(back.series, series);
    }

    #[test]
    fn tuple_file_tolerates_and_keeps_provenance() {
        let body = r#"{
            "weights": [1.0],
            "members": [{"order":2,"coeffs":[[0,0],[1,0],[0,0]]}],
            "provenance": {
                "class_id": "ST_nm",
                "n": 2,
                "target": {"kind":"half_plane","alpha":0.25},
                "gen": {"order":64,"blaschke_degree":4,"seed":7,"real_only":false}
            }
        }"#;
        let parsed = parse_tuple_json(body.as_bytes()).unwrap();
        let prov = parsed.provenance.expect("provenance kept");
        assert_eq!(prov.n, 2);
        assert_eq!(prov.gen.seed, 7);
    }

    #[test]
    fn malformed_inputs_error_out() {
        assert!(parse_series_json(b"not json").is_err());
        assert!(parse_series_json(br#"{"order":1e99,"coeffs":[]}"#).is_err());
        assert!(parse_tuple_json(br#"{"weights":[2.0],"members":[]}"#).is_err());
        assert!(parse_target_json(br#"{"kind":"polygon"}"#).is_err());
    }
}
