//! Direct-influence weights: share of a country's international trade, or of
//! its total offer (GDP plus imports), that involves a given partner.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::DenseMatrix;
use crate::model::{InfluenceMatrix, MatrixKind, ModelError, TradeNetwork};
use crate::scalar::Scalar;

/// Row sums are compared against declared totals with this relative slack.
const CONSISTENCY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeightError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("influence of {code} on itself is not defined")]
    SameCountry { code: String },
    #[error("{code} has no declared international trade")]
    IsolatedCountry { code: String },
    #[error("{code} has trade flows but GDP + imports is zero")]
    ZeroOfferDenominator { code: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    /// `C_AB = (E(B,A) + I(B,A)) / (E(A) + I(A))`
    Trade,
    /// `D_AB = (E(B,A) + I(B,A)) / (GDP(A) + I(A))`
    Offer,
}

impl WeightKind {
    pub fn as_str(self) -> &'static str {
        match self {
            WeightKind::Trade => "trade",
            WeightKind::Offer => "offer",
        }
    }
}

impl fmt::Display for WeightKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WeightKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "trade" => Ok(WeightKind::Trade),
            "offer" => Ok(WeightKind::Offer),
            other => Err(format!("unknown weight {other:?} (expected trade or offer)")),
        }
    }
}

/// A country whose recorded flows do not add up to its declared totals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyWarning {
    pub code: String,
    /// Sum of the country's reported flows over its declared `E + I`.
    pub ratio: f64,
}

impl fmt::Display for ConsistencyWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: reported flows cover {:.6} of declared trade totals",
            self.code, self.ratio
        )
    }
}

/// A direct-influence matrix together with any totals inconsistencies found
/// while building it.
#[derive(Debug, Clone)]
pub struct DirectMatrix<T> {
    pub matrix: InfluenceMatrix<T>,
    pub warnings: Vec<ConsistencyWarning>,
}

fn pair_numerator(
    network: &TradeNetwork,
    a: &str,
    b: &str,
) -> Result<(usize, f64), WeightError> {
    let ia = network.require_index(a)?;
    let ib = network.require_index(b)?;
    if ia == ib {
        return Err(WeightError::SameCountry {
            code: a.to_string(),
        });
    }
    let numerator = network.flow(ia, ib).map_or(0.0, |f| f.total());
    Ok((ia, numerator))
}

/// `C_ab`: share of `a`'s international trade that involves `b`, per `a`'s
/// own records.
pub fn trade_influence(network: &TradeNetwork, a: &str, b: &str) -> Result<f64, WeightError> {
    let (ia, numerator) = pair_numerator(network, a, b)?;
    let denominator = network.countries()[ia].total_trade();
    if denominator <= 0.0 {
        return Err(WeightError::IsolatedCountry {
            code: a.to_string(),
        });
    }
    Ok(numerator / denominator)
}

/// `D_ab`: share of `a`'s offer (GDP + imports) that involves `b`.
pub fn offer_influence(network: &TradeNetwork, a: &str, b: &str) -> Result<f64, WeightError> {
    let (ia, numerator) = pair_numerator(network, a, b)?;
    let denominator = network.countries()[ia].offer();
    if denominator <= 0.0 {
        return Err(WeightError::ZeroOfferDenominator {
            code: a.to_string(),
        });
    }
    Ok(numerator / denominator)
}

/// Builds the `n x n` direct-influence matrix of `kind` in network order.
///
/// Denominators use the declared country totals. Countries without declared
/// trade get a zero row. Rows whose reported flows differ from the declared
/// `E + I` are listed in the returned warnings.
pub fn build_direct_matrix<T: Scalar>(
    network: &TradeNetwork,
    kind: WeightKind,
) -> Result<DirectMatrix<T>, WeightError> {
    let n = network.len();
    let countries = network.countries();
    let mut values = DenseMatrix::<T>::zeros(n, n);
    let mut reported = vec![0.0_f64; n];

    let denominators: Vec<f64> = countries
        .iter()
        .map(|c| match kind {
            WeightKind::Trade => c.total_trade(),
            WeightKind::Offer => c.offer(),
        })
        .collect();

    for flow in network.flows() {
        let r = network
            .index_of(&flow.reporter)
            .expect("network flows resolve");
        let p = network.index_of(&flow.partner).expect("network flows resolve");
        reported[r] += flow.total();
        let denominator = denominators[r];
        if denominator > 0.0 {
            values[(r, p)] = T::lit(flow.total() / denominator);
        } else if kind == WeightKind::Offer {
            return Err(WeightError::ZeroOfferDenominator {
                code: flow.reporter.clone(),
            });
        }
    }

    let warnings = countries
        .iter()
        .zip(&reported)
        .filter_map(|(c, &flows_total)| {
            let declared = c.total_trade();
            let ratio = if declared > 0.0 {
                flows_total / declared
            } else if flows_total > 0.0 {
                f64::INFINITY
            } else {
                return None;
            };
            ((ratio - 1.0).abs() > CONSISTENCY_TOLERANCE).then(|| ConsistencyWarning {
                code: c.code.clone(),
                ratio,
            })
        })
        .collect();

    let matrix = InfluenceMatrix::new(network.codes(), values, MatrixKind::Direct { weight: kind })?;
    Ok(DirectMatrix { matrix, warnings })
}
