//! CSV and JSON forms of convergence reports.

use std::fmt::Write as _;

use multibern_core::{ConvergenceReport, Domain, MultiIndex};
use serde::{Deserialize, Serialize};

use crate::FormatError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub n: usize,
    pub sup_error: f64,
}

/// The JSON shape of a [`ConvergenceReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceJson {
    pub function: String,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub d1: Option<usize>,
    pub k: Vec<usize>,
    pub rows: Vec<Row>,
    pub fitted_rate: Option<f64>,
}

impl From<&ConvergenceReport> for ConvergenceJson {
    fn from(r: &ConvergenceReport) -> Self {
        ConvergenceJson {
            function: r.function.clone(),
            kind: r.domain.name().to_string(),
            d1: match r.domain {
                Domain::Mixed { simplex_dims } => Some(simplex_dims),
                _ => None,
            },
            k: r.k.as_slice().to_vec(),
            rows: r.rows.iter().map(|&(n, sup_error)| Row { n, sup_error }).collect(),
            fitted_rate: r.fitted_rate,
        }
    }
}

fn join(k: &MultiIndex) -> String {
    k.as_slice().iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

pub fn to_json(r: &ConvergenceReport) -> String {
    serde_json::to_string_pretty(&ConvergenceJson::from(r)).expect("report serializes")
}

/// `#`-prefixed `key=value` metadata, a header line, then `n,sup_error`
/// rows. A missing rate is written as `fitted_rate=NA`.
pub fn to_csv(r: &ConvergenceReport) -> String {
    let mut out = String::new();
    writeln!(out, "# function={}", r.function).unwrap();
    writeln!(out, "# kind={}", r.domain.name()).unwrap();
    if let Domain::Mixed { simplex_dims } = r.domain {
        writeln!(out, "# d1={simplex_dims}").unwrap();
    }
    writeln!(out, "# k={}", join(&r.k)).unwrap();
    match r.fitted_rate {
        Some(rate) => writeln!(out, "# fitted_rate={rate:e}").unwrap(),
        None => writeln!(out, "# fitted_rate=NA").unwrap(),
    }
    writeln!(out, "n,sup_error").unwrap();
    for (n, e) in &r.rows {
        writeln!(out, "{n},{e:e}").unwrap();
    }
    out
}

fn bad(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Parse { line, msg: msg.into() }
}

/// Reads back the output of [`to_csv`].
pub fn from_csv(text: &str) -> Result<ConvergenceReport, FormatError> {
    let mut meta = std::collections::BTreeMap::new();
    let mut rows = Vec::new();
    let mut seen_header = false;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        let lineno = i + 1;
        if line.is_empty() {
            continue;
        }
        if let Some(m) = line.strip_prefix('#') {
            let (key, value) = m
                .trim()
                .split_once('=')
                .ok_or_else(|| bad(lineno, "metadata needs key=value"))?;
            meta.insert(key.to_string(), value.to_string());
        } else if !seen_header {
            if line != "n,sup_error" {
                return Err(bad(lineno, format!("expected header `n,sup_error`, got `{line}`")));
            }
            seen_header = true;
        } else {
            let (n, e) = line.split_once(',').ok_or_else(|| bad(lineno, "expected two columns"))?;
            let n = n.parse().map_err(|_| bad(lineno, format!("bad n `{n}`")))?;
            let e = e.parse().map_err(|_| bad(lineno, format!("bad error `{e}`")))?;
            rows.push((n, e));
        }
    }
    let get = |key: &str| meta.get(key).ok_or_else(|| bad(0, format!("missing `{key}` metadata")));
    let domain = match get("kind")?.as_str() {
        "cube" => Domain::Cube,
        "simplex" => Domain::Simplex,
        "mixed" => Domain::Mixed {
            simplex_dims: get("d1")?.parse().map_err(|_| bad(0, "bad d1"))?,
        },
        other => return Err(bad(0, format!("unknown kind `{other}`"))),
    };
    let k = get("k")?
        .split(',')
        .map(|t| t.parse().map_err(|_| bad(0, format!("bad k entry `{t}`"))))
        .collect::<Result<Vec<usize>, _>>()?;
    let fitted_rate = match get("fitted_rate")?.as_str() {
        "NA" => None,
        v => Some(v.parse().map_err(|_| bad(0, format!("bad rate `{v}`")))?),
    };
    Ok(ConvergenceReport {
        function: get("function")?.clone(),
        domain,
        k: MultiIndex::new(k)?,
        rows,
        fitted_rate,
    })
}
