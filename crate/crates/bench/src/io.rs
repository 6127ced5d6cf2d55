//! File formats: dense matrices as CSV with an `n=<count>` header line,
//! set systems as JSON, and full function specs as tagged JSON.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use submemo::zoo::DispersionKind;
use submemo::FunctionSpec;

use crate::synth::Synthetic;
use crate::{input_error, BenchError};

fn read(path: &Path) -> Result<String, BenchError> {
    fs::read_to_string(path).map_err(|source| BenchError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), BenchError> {
    fs::write(path, text).map_err(|source| BenchError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Parses the dense CSV format: `n=<count>`, then `n` rows of `n` decimals.
pub fn parse_dense_matrix(text: &str) -> Result<Vec<Vec<f64>>, BenchError> {
    let (header, body) = text.split_once('\n').unwrap_or((text, ""));
    let n: usize = match header.trim().strip_prefix("n=").map(|v| v.trim().parse()) {
        Some(Ok(n)) => n,
        _ => return input_error(format!("expected header 'n=<count>', got '{}'", header.trim())),
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes());
    let mut rows = Vec::with_capacity(n);
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| BenchError::Input(format!("row {}: {}", i, e)))?;
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != n {
            return input_error(format!("row {} has {} entries, expected {}", i, record.len(), n));
        }
        let mut row = Vec::with_capacity(n);
        for (j, cell) in record.iter().enumerate() {
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => row.push(v),
                _ => return input_error(format!("cell ({}, {}) is not a finite number: '{}'", i, j, cell)),
            }
        }
        rows.push(row);
    }
    if rows.len() != n {
        return input_error(format!("expected {} rows, found {}", n, rows.len()));
    }
    Ok(rows)
}

pub fn load_dense_matrix(path: &Path) -> Result<Vec<Vec<f64>>, BenchError> {
    parse_dense_matrix(&read(path)?)
}

/// Shortest round-trip formatting, so write-then-read is bit-identical.
pub fn format_dense_matrix(rows: &[Vec<f64>]) -> String {
    let mut out = format!("n={}\n", rows.len());
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{:?}", v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn write_dense_matrix(path: &Path, rows: &[Vec<f64>]) -> Result<(), BenchError> {
    write(path, &format_dense_matrix(rows))
}

/// The JSON set-system format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetSystem {
    pub n: usize,
    pub universe: usize,
    pub weights: Vec<f64>,
    #[serde(default)]
    pub sets: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clusters: Option<Vec<Vec<usize>>>,
    /// `probs[u][j]`, probability that element `j` covers item `u`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probs: Option<Vec<Vec<f64>>>,
}

impl SetSystem {
    /// Validates and picks the class: `probs` → probabilistic cover,
    /// `clusters` → clustered cover, otherwise plain set cover.
    pub fn to_spec(&self) -> Result<FunctionSpec, BenchError> {
        if self.weights.len() != self.universe {
            return input_error(format!(
                "{} weights for a universe of {}",
                self.weights.len(),
                self.universe
            ));
        }
        if let Some(w) = self.weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return input_error(format!("weight {} is negative or not finite", w));
        }
        let check_ids = |what: &str, lists: &[Vec<usize>]| -> Result<(), BenchError> {
            for (i, l) in lists.iter().enumerate() {
                if let Some(u) = l.iter().find(|&&u| u >= self.universe) {
                    return input_error(format!(
                        "{} {}: id {} outside universe of {}",
                        what, i, u, self.universe
                    ));
                }
            }
            Ok(())
        };
        let spec = if let Some(probs) = &self.probs {
            if probs.len() != self.universe || probs.iter().any(|r| r.len() != self.n) {
                return input_error(format!("probs must be {} rows of {} entries", self.universe, self.n));
            }
            if let Some(p) = probs.iter().flatten().find(|p| !(0.0..=1.0).contains(*p)) {
                return input_error(format!("probability {} outside [0, 1]", p));
            }
            FunctionSpec::ProbabilisticSetCover {
                universe: self.universe,
                weights: self.weights.clone(),
                probs: probs.clone(),
            }
        } else {
            if self.sets.len() != self.n {
                return input_error(format!("{} sets for n = {}", self.sets.len(), self.n));
            }
            check_ids("set", &self.sets)?;
            match &self.clusters {
                Some(clusters) => {
                    check_ids("cluster", clusters)?;
                    FunctionSpec::ClusteredSetCover {
                        universe: self.universe,
                        weights: self.weights.clone(),
                        sets: self.sets.clone(),
                        clusters: clusters.clone(),
                    }
                }
                None => FunctionSpec::SetCover {
                    universe: self.universe,
                    weights: self.weights.clone(),
                    sets: self.sets.clone(),
                },
            }
        };
        spec.build()?;
        Ok(spec)
    }
}

pub fn parse_set_system(text: &str) -> Result<SetSystem, BenchError> {
    serde_json::from_str(text).map_err(|e| BenchError::Input(format!("set system: {}", e)))
}

pub fn load_set_system(path: &Path) -> Result<FunctionSpec, BenchError> {
    parse_set_system(&read(path)?)?.to_spec()
}

pub fn write_set_system(path: &Path, system: &SetSystem) -> Result<(), BenchError> {
    write(path, &serde_json::to_string_pretty(system).expect("serializable"))
}

/// Wraps a dense matrix in the named matrix-backed class.
pub fn matrix_spec(rows: Vec<Vec<f64>>, class: &str) -> Result<FunctionSpec, BenchError> {
    let key: String = class
        .chars()
        .filter(|c| *c != '-' && *c != '_')
        .collect::<String>()
        .to_lowercase();
    let spec = match key.as_str() {
        "facilitylocation" | "faclocation" => FunctionSpec::FacilityLocation { similarity: rows },
        "saturatedcoverage" | "satcoverage" => FunctionSpec::SaturatedCoverage {
            similarity: rows,
            alpha: None,
            fraction: None,
        },
        "graphcut" => FunctionSpec::GraphCut {
            similarity: rows,
            lambda: 1.0,
        },
        "logdet" => FunctionSpec::LogDet {
            kernel: rows,
            ridge: None,
        },
        "dispersionmin" => FunctionSpec::Dispersion {
            distance: rows,
            kind: DispersionKind::Min,
        },
        "dispersionsum" => FunctionSpec::Dispersion {
            distance: rows,
            kind: DispersionKind::Sum,
        },
        "dispersionminsum" => FunctionSpec::Dispersion {
            distance: rows,
            kind: DispersionKind::MinSum,
        },
        _ => return input_error(format!("class '{}' is not backed by a dense matrix", class)),
    };
    spec.build()?;
    Ok(spec)
}

/// Resolves a `--function` argument: `synthetic:...`, a `.csv` dense matrix
/// (interpreted as `class`), or a `.json` file holding either a tagged
/// function spec or a set system.
pub fn resolve_function(arg: &str, class: &str) -> Result<FunctionSpec, BenchError> {
    if arg.starts_with("synthetic:") {
        return Synthetic::parse(arg)?.generate();
    }
    let path = Path::new(arg);
    let text = read(path)?;
    if arg.ends_with(".csv") {
        return matrix_spec(parse_dense_matrix(&text)?, class);
    }
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| BenchError::Input(format!("{}: {}", arg, e)))?;
    if value.get("class").is_some() {
        let spec: FunctionSpec =
            serde_json::from_value(value).map_err(|e| BenchError::Input(format!("{}: {}", arg, e)))?;
        spec.build()?;
        Ok(spec)
    } else {
        parse_set_system(&text)?.to_spec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two() {
        let m = parse_dense_matrix("n=2\n1,0.5\n0.5,1\n").unwrap();
        assert_eq!(m, vec![vec![1.0, 0.5], vec![0.5, 1.0]]);
    }

    #[test]
    fn malformed_matrices() {
        assert!(parse_dense_matrix("2\n1,0\n0,1\n").is_err());
        assert!(parse_dense_matrix("n=2\n1,0\n0\n").is_err());
        assert!(parse_dense_matrix("n=2\n1,x\n0,1\n").is_err());
        assert!(parse_dense_matrix("n=2\n1,NaN\n0,1\n").is_err());
        assert!(parse_dense_matrix("n=2\n1,inf\n0,1\n").is_err());
        assert!(parse_dense_matrix("n=2\n1,0\n").is_err());
    }

    #[test]
    fn asymmetric_graph_cut_rejected() {
        let m = parse_dense_matrix("n=2\n0,1\n0.5,0\n").unwrap();
        assert!(matrix_spec(m.clone(), "graph_cut").is_err());
        assert!(matrix_spec(m, "facility_location").is_ok());
    }

    #[test]
    fn set_system_classes() {
        let base = r#"{"n": 3, "universe": 3, "weights": [1, 1, 1], "sets": [[0, 1], [1, 2], [2]]"#;
        let plain = parse_set_system(&format!("{}}}", base)).unwrap().to_spec().unwrap();
        assert_eq!(plain.class_name(), "set_cover");
        let clustered = parse_set_system(&format!("{}, \"clusters\": [[0], [1, 2]]}}", base)).unwrap();
        assert_eq!(clustered.to_spec().unwrap().class_name(), "clustered_set_cover");
        let bad = parse_set_system(&format!("{}, \"clusters\": [[0], [3]]}}", base)).unwrap();
        assert!(bad.to_spec().is_err());
        let probs = parse_set_system(r#"{"n": 2, "universe": 1, "weights": [1], "probs": [[0.5, 0.5]]}"#).unwrap();
        assert_eq!(probs.to_spec().unwrap().class_name(), "probabilistic_set_cover");
        let out_of_range = parse_set_system(r#"{"n": 1, "universe": 1, "weights": [1], "probs": [[1.5]]}"#).unwrap();
        assert!(out_of_range.to_spec().is_err());
        let negative = parse_set_system(r#"{"n": 1, "universe": 1, "weights": [-1], "sets": [[0]]}"#).unwrap();
        assert!(negative.to_spec().is_err());
    }
}
