//! Delimited-text ingestion of country aggregates and bilateral flows.
//!
//! Countries: `code,name,gdp,total_exports,total_imports`.
//! Flows: `reporter,partner,exports,imports`.
//!
//! Both files are UTF-8, comma separated, with a mandatory header row and
//! amounts in thousands of USD written with a decimal point and no grouping
//! separators. Line numbers in errors are 1-based; the header is line 1.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::model::{
    build_network, is_valid_code, BilateralFlow, CountryRecord, ModelError, TradeNetwork,
};

pub const COUNTRY_COLUMNS: [&str; 5] = ["code", "name", "gdp", "total_exports", "total_imports"];
pub const FLOW_COLUMNS: [&str; 4] = ["reporter", "partner", "exports", "imports"];

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing column {column:?}")]
    MissingColumn { column: &'static str },
    #[error("line {line}: {reason}")]
    MalformedRow { line: u64, reason: String },
    #[error("line {line}: {field} is negative ({value})")]
    NegativeAmount {
        line: u64,
        field: &'static str,
        value: f64,
    },
    #[error("line {line}: country code {code} already defined on line {first_line}")]
    DuplicateCode {
        code: String,
        first_line: u64,
        line: u64,
    },
    #[error("line {line}: {code} reports a flow with itself")]
    SelfFlow { line: u64, code: String },
    #[error("lines {first_line} and {line}: duplicate flow {reporter}->{partner}")]
    DuplicatePair {
        reporter: String,
        partner: String,
        first_line: u64,
        line: u64,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Flow records read from a file.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowTable {
    pub flows: Vec<BilateralFlow>,
    /// Rows where both amounts were zero; these are not kept.
    pub dropped_zero_rows: usize,
}

fn open(path: &Path) -> Result<File, IngestError> {
    File::open(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })
}

struct Row {
    record: csv::StringRecord,
    line: u64,
}

impl Row {
    fn field(&self, index: usize, name: &str) -> Result<&str, IngestError> {
        self.record
            .get(index)
            .ok_or_else(|| IngestError::MalformedRow {
                line: self.line,
                reason: format!("missing field {name}"),
            })
    }

    fn code(&self, index: usize, name: &str) -> Result<String, IngestError> {
        let code = self.field(index, name)?;
        if !is_valid_code(code) {
            return Err(IngestError::MalformedRow {
                line: self.line,
                reason: format!("{name} {code:?} is not a 2-3 character uppercase code"),
            });
        }
        Ok(code.to_string())
    }

    fn amount(&self, index: usize, name: &'static str) -> Result<f64, IngestError> {
        let raw = self.field(index, name)?;
        let value: f64 = raw.parse().map_err(|_| IngestError::MalformedRow {
            line: self.line,
            reason: format!("{name} {raw:?} is not a decimal number"),
        })?;
        if !value.is_finite() {
            return Err(IngestError::MalformedRow {
                line: self.line,
                reason: format!("{name} {raw:?} is not finite"),
            });
        }
        if value < 0.0 {
            return Err(IngestError::NegativeAmount {
                line: self.line,
                field: name,
                value,
            });
        }
        Ok(value)
    }
}

/// Reads the header, locates `columns` in it, and returns the data rows.
fn read_table<R: Read, const N: usize>(
    input: R,
    columns: [&'static str; N],
) -> Result<([usize; N], Vec<Row>), IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let headers = rdr.headers()?.clone();
    let mut positions = [0; N];
    for (slot, column) in positions.iter_mut().zip(columns) {
        *slot = headers
            .iter()
            .position(|h| h == column)
            .ok_or(IngestError::MissingColumn { column })?;
    }

    let mut rows = Vec::new();
    let mut record = csv::StringRecord::new();
    loop {
        match rdr.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {
                let line = record.position().map_or(0, |p| p.line());
                if record.iter().all(str::is_empty) {
                    continue;
                }
                rows.push(Row {
                    record: record.clone(),
                    line,
                });
            }
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                return Err(IngestError::MalformedRow {
                    line,
                    reason: e.to_string(),
                });
            }
        }
    }
    Ok((positions, rows))
}

pub fn read_countries<R: Read>(input: R) -> Result<Vec<CountryRecord>, IngestError> {
    let ([code, name, gdp, exports, imports], rows) = read_table(input, COUNTRY_COLUMNS)?;
    let mut first_seen: HashMap<String, u64> = HashMap::new();
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let record = CountryRecord {
            code: row.code(code, "code")?,
            name: row.field(name, "name")?.to_string(),
            gdp: row.amount(gdp, "gdp")?,
            total_exports: row.amount(exports, "total_exports")?,
            total_imports: row.amount(imports, "total_imports")?,
        };
        if let Some(&first_line) = first_seen.get(&record.code) {
            return Err(IngestError::DuplicateCode {
                code: record.code,
                first_line,
                line: row.line,
            });
        }
        first_seen.insert(record.code.clone(), row.line);
        out.push(record);
    }
    Ok(out)
}

pub fn read_flows<R: Read>(input: R) -> Result<FlowTable, IngestError> {
    let ([reporter, partner, exports, imports], rows) = read_table(input, FLOW_COLUMNS)?;
    let mut first_seen: HashMap<(String, String), u64> = HashMap::new();
    let mut flows = Vec::with_capacity(rows.len());
    let mut dropped_zero_rows = 0;
    for row in rows {
        let flow = BilateralFlow {
            reporter: row.code(reporter, "reporter")?,
            partner: row.code(partner, "partner")?,
            exports: row.amount(exports, "exports")?,
            imports: row.amount(imports, "imports")?,
        };
        if flow.reporter == flow.partner {
            return Err(IngestError::SelfFlow {
                line: row.line,
                code: flow.reporter,
            });
        }
        let key = (flow.reporter.clone(), flow.partner.clone());
        if let Some(&first_line) = first_seen.get(&key) {
            return Err(IngestError::DuplicatePair {
                reporter: flow.reporter,
                partner: flow.partner,
                first_line,
                line: row.line,
            });
        }
        first_seen.insert(key, row.line);
        if flow.total() > 0.0 {
            flows.push(flow);
        } else {
            dropped_zero_rows += 1;
        }
    }
    Ok(FlowTable {
        flows,
        dropped_zero_rows,
    })
}

pub fn load_countries(path: impl AsRef<Path>) -> Result<Vec<CountryRecord>, IngestError> {
    read_countries(open(path.as_ref())?)
}

pub fn load_flows(path: impl AsRef<Path>) -> Result<FlowTable, IngestError> {
    read_flows(open(path.as_ref())?)
}

pub fn write_countries<W: Write>(records: &[CountryRecord], out: W) -> Result<(), IngestError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COUNTRY_COLUMNS)?;
    for c in records {
        w.write_record([
            c.code.clone(),
            c.name.clone(),
            c.gdp.to_string(),
            c.total_exports.to_string(),
            c.total_imports.to_string(),
        ])?;
    }
    w.flush().map_err(|source| IngestError::Io {
        path: PathBuf::from("<countries>"),
        source,
    })
}

pub fn write_flows<W: Write>(flows: &[BilateralFlow], out: W) -> Result<(), IngestError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(FLOW_COLUMNS)?;
    for f in flows {
        w.write_record([
            f.reporter.clone(),
            f.partner.clone(),
            f.exports.to_string(),
            f.imports.to_string(),
        ])?;
    }
    w.flush().map_err(|source| IngestError::Io {
        path: PathBuf::from("<flows>"),
        source,
    })
}

/// Restricts a network to `codes`, keeping only flows between retained
/// countries. Country aggregates are left untouched, so weights keep
/// dividing by the countries' full declared totals.
pub fn subset(network: &TradeNetwork, codes: &[String]) -> Result<TradeNetwork, ModelError> {
    let mut keep = HashSet::new();
    for code in codes {
        network.require_index(code)?;
        keep.insert(code.as_str());
    }
    let countries = network
        .countries()
        .iter()
        .filter(|c| keep.contains(c.code.as_str()))
        .cloned()
        .collect();
    let flows = network
        .flows()
        .iter()
        .filter(|f| keep.contains(f.reporter.as_str()) && keep.contains(f.partner.as_str()))
        .cloned()
        .collect();
    build_network(countries, flows)
}

/// Where a dataset lives and which part of it to use.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetManifest {
    pub countries_path: PathBuf,
    pub flows_path: PathBuf,
    pub year_label: String,
    pub region_filter: Option<Vec<String>>,
}

/// A loaded, validated and possibly region-restricted network.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub network: TradeNetwork,
    pub year_label: String,
    pub dropped_zero_flows: usize,
}

impl DatasetManifest {
    pub fn new(countries_path: impl Into<PathBuf>, flows_path: impl Into<PathBuf>) -> Self {
        Self {
            countries_path: countries_path.into(),
            flows_path: flows_path.into(),
            year_label: String::new(),
            region_filter: None,
        }
    }

    pub fn load(&self) -> Result<Dataset, IngestError> {
        for (path, what) in [(&self.countries_path, "countries"), (&self.flows_path, "flows")] {
            if path.as_os_str().is_empty() {
                return Err(IngestError::Io {
                    path: path.clone(),
                    source: io::Error::new(
                        io::ErrorKind::InvalidInput,
                        format!("empty {what} path"),
                    ),
                });
            }
        }
        let countries = load_countries(&self.countries_path)?;
        let table = load_flows(&self.flows_path)?;
        let mut network = build_network(countries, table.flows)?;
        if let Some(codes) = &self.region_filter {
            network = subset(&network, codes)?;
        }
        Ok(Dataset {
            network,
            year_label: self.year_label.clone(),
            dropped_zero_flows: table.dropped_zero_rows,
        })
    }
}
