//! Countries, bilateral flows, trade networks and labelled influence matrices.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::MethodSpec;
use crate::linalg::{DenseMatrix, ShapeError};
use crate::scalar::Scalar;
use crate::weights::WeightKind;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("duplicate country code {code}")]
    DuplicateCountry { code: String },
    #[error("invalid country code {code:?}: expected 2-3 uppercase ASCII letters or digits")]
    InvalidCode { code: String },
    #[error("flow {reporter}->{partner} references unknown country {code}")]
    UnknownCountryInFlow {
        reporter: String,
        partner: String,
        code: String,
    },
    #[error("flow reported by {code} names itself as partner")]
    SelfFlow { code: String },
    #[error("more than one flow record for reporter {reporter}, partner {partner}")]
    DuplicateFlow { reporter: String, partner: String },
    #[error("{record}: {field} must be a finite non-negative amount, got {value}")]
    NegativeAmount {
        record: String,
        field: &'static str,
        value: f64,
    },
    #[error("unknown country {code}")]
    UnknownCountry { code: String },
    #[error("{labels} labels for a {dim}x{dim} matrix")]
    LabelCount { labels: usize, dim: usize },
    #[error("duplicate matrix label {code}")]
    DuplicateLabel { code: String },
    #[error("direct matrix has non-zero diagonal entry for {code}")]
    NonZeroDiagonal { code: String },
    #[error(transparent)]
    Shape(#[from] ShapeError),
}

/// One country's yearly aggregates, amounts in thousands of USD.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountryRecord {
    pub code: String,
    pub name: String,
    pub gdp: f64,
    pub total_exports: f64,
    pub total_imports: f64,
}

impl CountryRecord {
    pub fn new(
        code: impl Into<String>,
        name: impl Into<String>,
        gdp: f64,
        total_exports: f64,
        total_imports: f64,
    ) -> Self {
        Self {
            code: code.into(),
            name: name.into(),
            gdp,
            total_exports,
            total_imports,
        }
    }

    /// `E(A) + I(A)`.
    pub fn total_trade(&self) -> f64 {
        self.total_exports + self.total_imports
    }

    /// `GDP(A) + I(A)`.
    pub fn offer(&self) -> f64 {
        self.gdp + self.total_imports
    }

    fn validate(&self) -> Result<(), ModelError> {
        if !is_valid_code(&self.code) {
            return Err(ModelError::InvalidCode {
                code: self.code.clone(),
            });
        }
        for (field, value) in [
            ("gdp", self.gdp),
            ("total_exports", self.total_exports),
            ("total_imports", self.total_imports),
        ] {
            check_amount(&format!("country {}", self.code), field, value)?;
        }
        Ok(())
    }
}

/// Trade between `reporter` and `partner` as recorded in the reporter's own
/// statistics: `exports` went from reporter to partner, `imports` came from
/// partner into reporter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BilateralFlow {
    pub reporter: String,
    pub partner: String,
    pub exports: f64,
    pub imports: f64,
}

impl BilateralFlow {
    pub fn new(
        reporter: impl Into<String>,
        partner: impl Into<String>,
        exports: f64,
        imports: f64,
    ) -> Self {
        Self {
            reporter: reporter.into(),
            partner: partner.into(),
            exports,
            imports,
        }
    }

    pub fn total(&self) -> f64 {
        self.exports + self.imports
    }

    fn label(&self) -> String {
        format!("flow {}->{}", self.reporter, self.partner)
    }
}

pub(crate) fn is_valid_code(code: &str) -> bool {
    (2..=3).contains(&code.len())
        && code
            .bytes()
            .all(|b| b.is_ascii_uppercase() || b.is_ascii_digit())
}

fn check_amount(record: &str, field: &'static str, value: f64) -> Result<(), ModelError> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(ModelError::NegativeAmount {
            record: record.to_string(),
            field,
            value,
        })
    }
}

/// Immutable trade network. Countries are kept in alphabetical order of
/// their display names, which fixes the vertex index used by every matrix.
#[derive(Debug, Clone)]
pub struct TradeNetwork {
    countries: Vec<CountryRecord>,
    flows: Vec<BilateralFlow>,
    index: HashMap<String, usize>,
    flow_index: HashMap<(usize, usize), usize>,
}

impl PartialEq for TradeNetwork {
    fn eq(&self, other: &Self) -> bool {
        self.countries == other.countries && self.flows == other.flows
    }
}

/// Validates records and assembles a [`TradeNetwork`].
///
/// Flow records with both amounts zero carry no trade and are not stored.
pub fn build_network(
    countries: Vec<CountryRecord>,
    flows: Vec<BilateralFlow>,
) -> Result<TradeNetwork, ModelError> {
    let mut countries = countries;
    let mut seen = HashSet::new();
    for c in &countries {
        c.validate()?;
        if !seen.insert(c.code.as_str()) {
            return Err(ModelError::DuplicateCountry {
                code: c.code.clone(),
            });
        }
    }
    countries.sort_by(|a, b| a.name.cmp(&b.name).then_with(|| a.code.cmp(&b.code)));
    let index: HashMap<String, usize> = countries
        .iter()
        .enumerate()
        .map(|(i, c)| (c.code.clone(), i))
        .collect();

    let mut keyed = Vec::with_capacity(flows.len());
    let mut pairs = HashSet::new();
    for f in flows {
        if f.reporter == f.partner {
            return Err(ModelError::SelfFlow {
                code: f.reporter.clone(),
            });
        }
        let resolve = |code: &str| {
            index
                .get(code)
                .copied()
                .ok_or_else(|| ModelError::UnknownCountryInFlow {
                    reporter: f.reporter.clone(),
                    partner: f.partner.clone(),
                    code: code.to_string(),
                })
        };
        let r = resolve(&f.reporter)?;
        let p = resolve(&f.partner)?;
        check_amount(&f.label(), "exports", f.exports)?;
        check_amount(&f.label(), "imports", f.imports)?;
        if !pairs.insert((r, p)) {
            return Err(ModelError::DuplicateFlow {
                reporter: f.reporter.clone(),
                partner: f.partner.clone(),
            });
        }
        if f.total() > 0.0 {
            keyed.push(((r, p), f));
        }
    }
    keyed.sort_by_key(|(key, _)| *key);
    let flow_index = keyed
        .iter()
        .enumerate()
        .map(|(i, (key, _))| (*key, i))
        .collect();
    let flows = keyed.into_iter().map(|(_, f)| f).collect();

    Ok(TradeNetwork {
        countries,
        flows,
        index,
        flow_index,
    })
}

impl TradeNetwork {
    pub fn countries(&self) -> &[CountryRecord] {
        &self.countries
    }

    /// Flow records ordered by (reporter index, partner index).
    pub fn flows(&self) -> &[BilateralFlow] {
        &self.flows
    }

    pub fn len(&self) -> usize {
        self.countries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.countries.is_empty()
    }

    pub fn codes(&self) -> Vec<String> {
        self.countries.iter().map(|c| c.code.clone()).collect()
    }

    pub fn index_of(&self, code: &str) -> Option<usize> {
        self.index.get(code).copied()
    }

    pub fn require_index(&self, code: &str) -> Result<usize, ModelError> {
        self.index_of(code).ok_or_else(|| ModelError::UnknownCountry {
            code: code.to_string(),
        })
    }

    pub fn country(&self, code: &str) -> Option<&CountryRecord> {
        self.index_of(code).map(|i| &self.countries[i])
    }

    /// The flow record reported by `reporter` about trade with `partner`.
    pub fn flow(&self, reporter: usize, partner: usize) -> Option<&BilateralFlow> {
        self.flow_index
            .get(&(reporter, partner))
            .map(|&i| &self.flows[i])
    }

    /// Sum of all flow totals reported by the country at `reporter`.
    pub fn reported_trade(&self, reporter: usize) -> f64 {
        let code = &self.countries[reporter].code;
        self.flows
            .iter()
            .filter(|f| &f.reporter == code)
            .map(BilateralFlow::total)
            .sum()
    }
}

/// What an [`InfluenceMatrix`] measures.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MatrixKind<T> {
    Direct { weight: WeightKind },
    Indirect { method: MethodSpec<T> },
    /// Matrix supplied directly by the caller.
    Custom,
}

impl<T: Scalar> MatrixKind<T> {
    pub fn is_direct(&self) -> bool {
        matches!(self, MatrixKind::Direct { .. })
    }
}

impl<T: Scalar> fmt::Display for MatrixKind<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixKind::Direct { weight } => write!(f, "direct-{weight}"),
            MatrixKind::Indirect { method } => write!(f, "indirect-{method}"),
            MatrixKind::Custom => f.write_str("custom"),
        }
    }
}

/// Dense labelled matrix whose entry `[a][b]` is the influence of `b` on `a`
/// (equivalently the dependence of `a` on `b`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfluenceMatrix<T> {
    labels: Vec<String>,
    values: DenseMatrix<T>,
    kind: MatrixKind<T>,
    column_normalized: bool,
}

impl<T: Scalar> InfluenceMatrix<T> {
    pub fn new(
        labels: Vec<String>,
        values: DenseMatrix<T>,
        kind: MatrixKind<T>,
    ) -> Result<Self, ModelError> {
        let dim = values.dim()?;
        if labels.len() != dim {
            return Err(ModelError::LabelCount {
                labels: labels.len(),
                dim,
            });
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(ModelError::DuplicateLabel { code: l.clone() });
            }
        }
        if kind.is_direct() {
            if let Some(i) = (0..dim).find(|&i| values[(i, i)] != T::zero()) {
                return Err(ModelError::NonZeroDiagonal {
                    code: labels[i].clone(),
                });
            }
        }
        Ok(Self {
            labels,
            values,
            kind,
            column_normalized: false,
        })
    }

    /// Convenience constructor for caller-supplied matrices.
    pub fn custom<S: Into<String>>(
        labels: impl IntoIterator<Item = S>,
        rows: &[Vec<T>],
    ) -> Result<Self, ModelError> {
        let labels = labels.into_iter().map(Into::into).collect();
        Self::new(labels, DenseMatrix::from_rows(rows)?, MatrixKind::Custom)
    }

    /// Same labels and provenance flags, new values and kind. `values` must
    /// have the same dimension.
    pub(crate) fn derive(&self, values: DenseMatrix<T>, kind: MatrixKind<T>) -> Self {
        debug_assert_eq!(values.rows(), self.labels.len());
        Self {
            labels: self.labels.clone(),
            values,
            kind,
            column_normalized: self.column_normalized,
        }
    }

    pub(crate) fn mark_column_normalized(mut self) -> Self {
        self.column_normalized = true;
        self
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn values(&self) -> &DenseMatrix<T> {
        &self.values
    }

    pub fn kind(&self) -> &MatrixKind<T> {
        &self.kind
    }

    /// Whether a column normalization was applied somewhere upstream.
    pub fn is_column_normalized(&self) -> bool {
        self.column_normalized
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn index_of(&self, code: &str) -> Result<usize, ModelError> {
        self.labels
            .iter()
            .position(|l| l == code)
            .ok_or_else(|| ModelError::UnknownCountry {
                code: code.to_string(),
            })
    }

    /// Entry for (dependent `a`, influencer `b`).
    pub fn get(&self, a: &str, b: &str) -> Result<T, ModelError> {
        Ok(self.values[(self.index_of(a)?, self.index_of(b)?)])
    }

    /// `(d_A, f_A)`: row sum and column sum for `code`.
    pub fn bidegree(&self, code: &str) -> Result<(T, T), ModelError> {
        let i = self.index_of(code)?;
        let dependence = self.values.row(i).iter().copied().sum();
        let influence = (0..self.dim()).map(|k| self.values[(k, i)]).sum();
        Ok((dependence, influence))
    }

    /// Row sums in label order.
    pub fn dependences(&self) -> Vec<T> {
        self.values.row_sums()
    }

    /// Column sums in label order.
    pub fn influences(&self) -> Vec<T> {
        self.values.col_sums()
    }
}

/// Free-function form of [`InfluenceMatrix::bidegree`].
pub fn bidegree<T: Scalar>(m: &InfluenceMatrix<T>, code: &str) -> Result<(T, T), ModelError> {
    m.bidegree(code)
}
