//! Text renderings of matrices, rankings and planes: CSV, JSON and DOT.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::Read;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytics::{Criterion, Plane, Ranking, RankingReport};
use crate::model::{InfluenceMatrix, TradeNetwork};
use crate::scalar::Scalar;

/// Significant digits written for every real number.
pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("ranking file: {0}")]
    Ranking(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String, ExportError> {
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Rounds `x` to 12 significant digits and prints the shortest decimal that
/// reads back to the rounded value. Plain notation is used for magnitudes in
/// `[1e-5, 1e15)`, exponent notation outside it.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses");
    if (1e-5..1e15).contains(&rounded.abs()) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

fn fmt_scalar<T: Scalar>(x: T) -> String {
    format_number(x.to_f64().unwrap_or(f64::NAN))
}

fn round_scalar<T: Scalar>(x: T) -> f64 {
    fmt_scalar(x).parse().unwrap_or(f64::NAN)
}

/// Square matrix as CSV: the first row and first column hold country codes.
pub fn matrix_to_csv<T: Scalar>(m: &InfluenceMatrix<T>) -> Result<String, ExportError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["code".to_string()];
    header.extend(m.labels().iter().cloned());
    w.write_record(&header)?;
    for (i, code) in m.labels().iter().enumerate() {
        let mut row = vec![code.clone()];
        row.extend(m.values().row(i).iter().map(|&x| fmt_scalar(x)));
        w.write_record(&row)?;
    }
    finish(w)
}

#[derive(Serialize)]
struct MatrixJson<'a> {
    kind: String,
    labels: &'a [String],
    values: Vec<Vec<f64>>,
}

pub fn matrix_to_json<T: Scalar>(m: &InfluenceMatrix<T>) -> Result<String, ExportError> {
    let doc = MatrixJson {
        kind: m.kind().to_string(),
        labels: m.labels(),
        values: (0..m.dim())
            .map(|i| m.values().row(i).iter().map(|&x| round_scalar(x)).collect())
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

/// Parses a matrix written by [`matrix_to_csv`] back into labels and rows.
pub fn matrix_from_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>), ExportError> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let labels: Vec<String> = rdr.headers()?.iter().skip(1).map(str::to_string).collect();
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let row = record
            .iter()
            .skip(1)
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| ExportError::Ranking(format!("bad matrix entry {s:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok((labels, rows))
}

/// One line of a ranking file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingEntry {
    pub code: String,
    pub name: String,
    pub value: f64,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingFile {
    pub matrix_kind: String,
    pub criterion: Criterion,
    pub rows: Vec<RankingEntry>,
}

impl<'de> Deserialize<'de> for Criterion {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn ranking_entries<T: Scalar>(
    report: &RankingReport<T>,
    network: &TradeNetwork,
) -> Vec<RankingEntry> {
    report
        .rows
        .iter()
        .map(|r| RankingEntry {
            code: r.code.clone(),
            name: network
                .country(&r.code)
                .map(|c| c.name.clone())
                .unwrap_or_default(),
            value: round_scalar(r.value(report.criterion)),
            rank: r.rank(report.criterion),
        })
        .collect()
}

pub fn ranking_to_csv(entries: &[RankingEntry]) -> Result<String, ExportError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["code", "name", "value", "rank"])?;
    for e in entries {
        w.write_record([
            e.code.clone(),
            e.name.clone(),
            format_number(e.value),
            e.rank.to_string(),
        ])?;
    }
    finish(w)
}

pub fn ranking_to_json(file: &RankingFile) -> Result<String, ExportError> {
    Ok(serde_json::to_string_pretty(file)? + "\n")
}

/// Reads the `code -> rank` map from a ranking file in CSV or JSON form.
pub fn read_ranking<R: Read>(mut input: R, json: bool) -> Result<Ranking, ExportError> {
    let pairs: Vec<(String, usize)> = if json {
        let file: RankingFile = serde_json::from_reader(input)?;
        file.rows.into_iter().map(|e| (e.code, e.rank)).collect()
    } else {
        let mut text = String::new();
        input
            .read_to_string(&mut text)
            .map_err(|e| ExportError::Ranking(e.to_string()))?;
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let headers = rdr.headers()?.clone();
        let col = |name: &str| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| ExportError::Ranking(format!("missing column {name:?}")))
        };
        let (code, rank) = (col("code")?, col("rank")?);
        let mut pairs = Vec::new();
        for record in rdr.records() {
            let record = record?;
            let r = record
                .get(rank)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| ExportError::Ranking("bad rank value".into()))?;
            pairs.push((record.get(code).unwrap_or_default().to_string(), r));
        }
        pairs
    };
    let mut ranking = Ranking::new();
    for (code, rank) in pairs {
        if ranking.insert(code.clone(), rank).is_some() {
            return Err(ExportError::Ranking(format!("country {code} listed twice")));
        }
    }
    Ok(ranking)
}

/// Plane as CSV, preceded by a comment line carrying both means.
pub fn plane_to_csv<T: Scalar>(p: &Plane<T>) -> Result<String, ExportError> {
    let mut out = format!(
        "# mean_dependence={},mean_influence={}\n",
        fmt_scalar(p.mean_dependence),
        fmt_scalar(p.mean_influence)
    );
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["code", "dependence", "influence", "sector"])?;
    for pt in &p.points {
        w.write_record([
            pt.code.clone(),
            fmt_scalar(pt.dependence),
            fmt_scalar(pt.influence),
            pt.sector.number().to_string(),
        ])?;
    }
    out.push_str(&finish(w)?);
    Ok(out)
}

#[derive(Serialize)]
struct PlaneJson {
    mean_dependence: f64,
    mean_influence: f64,
    points: Vec<PlanePointJson>,
}

#[derive(Serialize)]
struct PlanePointJson {
    code: String,
    dependence: f64,
    influence: f64,
    sector: u8,
}

pub fn plane_to_json<T: Scalar>(p: &Plane<T>) -> Result<String, ExportError> {
    let doc = PlaneJson {
        mean_dependence: round_scalar(p.mean_dependence),
        mean_influence: round_scalar(p.mean_influence),
        points: p
            .points
            .iter()
            .map(|pt| PlanePointJson {
                code: pt.code.clone(),
                dependence: round_scalar(pt.dependence),
                influence: round_scalar(pt.influence),
                sector: pt.sector.number(),
            })
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

/// Directed graph in DOT. Entry `[a][b]` becomes the edge `b -> a` (the
/// influencer points at the influenced country) when it is nonzero and at
/// least `min_weight`. Nodes and edges follow label order.
pub fn matrix_to_dot<T: Scalar>(m: &InfluenceMatrix<T>, min_weight: f64) -> String {
    let mut out = String::new();
    let name = m.kind().to_string();
    writeln!(out, "digraph \"{name}\" {{").unwrap();
    for code in m.labels() {
        writeln!(out, "  \"{code}\" [label=\"{code}\"];").unwrap();
    }
    let labels = m.labels();
    let v = m.values();
    for (src, source) in labels.iter().enumerate() {
        for (dst, target) in labels.iter().enumerate() {
            let w = v[(dst, src)].to_f64().unwrap_or(f64::NAN);
            if w != 0.0 && w >= min_weight {
                writeln!(
                    out,
                    "  \"{source}\" -> \"{target}\" [weight={}];",
                    format_number(w)
                )
                .unwrap();
            }
        }
    }
    out.push_str("}\n");
    out
}

/// Number of `->` edges in a DOT document.
pub fn dot_edge_count(dot: &str) -> usize {
    dot.lines().filter(|l| l.contains(" -> ")).count()
}

/// Code to display name lookup.
pub fn names(network: &TradeNetwork) -> HashMap<String, String> {
    network
        .countries()
        .iter()
        .map(|c| (c.code.clone(), c.name.clone()))
        .collect()
}
