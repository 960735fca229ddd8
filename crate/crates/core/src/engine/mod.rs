//! Indirect-influence operators.
//!
//! Each operator maps a direct-influence matrix `D` to a matrix of indirect
//! influences `T(D)` that accounts for chains of direct influences:
//!
//! | method      | `T(D)`                                   |
//! |-------------|------------------------------------------|
//! | PWP         | `(e^{λD} - I) / (e^λ - 1)`               |
//! | MICMAC      | `D^k`                                    |
//! | PageRank    | `lim_k [p D̄ + (1 - p) E_n]^k`            |
//! | Heat Kernel | `e^{λ(D - I)}`                           |

mod expm;
mod operators;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::linalg::ShapeError;
use crate::model::{InfluenceMatrix, ModelError};
use crate::scalar::Scalar;

pub use expm::{matrix_exp_minus_identity, matrix_exponential, ExpOptions};
pub use operators::{column_normalize, heat_kernel, micmac, pagerank_limit, pwp};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: String,
        reason: &'static str,
    },
    #[error("matrix exponential overflow: {0}")]
    Overflow(String),
    #[error("input matrix has non-finite entries")]
    NonFinite,
    #[error("column {column} is not admissible for PageRank: {reason}")]
    ColumnStochasticityViolation { column: String, reason: String },
    #[error("power iteration did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("negative entry at ({row}, {col})")]
    NegativeEntry { row: String, col: String },
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Operator name without parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Pwp,
    Micmac,
    PageRank,
    HeatKernel,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Pwp => "pwp",
            Method::Micmac => "micmac",
            Method::PageRank => "pagerank",
            Method::HeatKernel => "heatkernel",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "pwp" => Ok(Method::Pwp),
            "micmac" => Ok(Method::Micmac),
            "pagerank" => Ok(Method::PageRank),
            "heatkernel" | "heat-kernel" => Ok(Method::HeatKernel),
            other => Err(format!(
                "unknown method {other:?} (expected pwp, micmac, pagerank or heatkernel)"
            )),
        }
    }
}

/// An operator together with its parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum MethodSpec<T> {
    Pwp { lambda: T },
    Micmac { k: u32 },
    #[serde(rename = "pagerank")]
    PageRank { p: T },
    #[serde(rename = "heatkernel")]
    HeatKernel { lambda: T },
}

pub const DEFAULT_LAMBDA: f64 = 1.0;
pub const DEFAULT_MICMAC_POWER: u32 = 4;
pub const DEFAULT_DAMPING: f64 = 0.86;

fn check_lambda<T: Scalar>(lambda: T) -> Result<T, EngineError> {
    if lambda.is_finite() && lambda > T::zero() {
        Ok(lambda)
    } else {
        Err(EngineError::InvalidParameter {
            name: "lambda",
            value: lambda.to_string(),
            reason: "must be a positive finite number",
        })
    }
}

fn check_damping<T: Scalar>(p: T) -> Result<T, EngineError> {
    if p > T::zero() && p < T::one() {
        Ok(p)
    } else {
        Err(EngineError::InvalidParameter {
            name: "p",
            value: p.to_string(),
            reason: "must lie strictly between 0 and 1",
        })
    }
}

fn check_power(k: u32) -> Result<u32, EngineError> {
    if k >= 1 {
        Ok(k)
    } else {
        Err(EngineError::InvalidParameter {
            name: "k",
            value: k.to_string(),
            reason: "must be at least 1",
        })
    }
}

impl<T: Scalar> MethodSpec<T> {
    pub fn pwp(lambda: T) -> Result<Self, EngineError> {
        Ok(MethodSpec::Pwp {
            lambda: check_lambda(lambda)?,
        })
    }

    pub fn micmac(k: u32) -> Result<Self, EngineError> {
        Ok(MethodSpec::Micmac {
            k: check_power(k)?,
        })
    }

    pub fn pagerank(p: T) -> Result<Self, EngineError> {
        Ok(MethodSpec::PageRank {
            p: check_damping(p)?,
        })
    }

    pub fn heat_kernel(lambda: T) -> Result<Self, EngineError> {
        Ok(MethodSpec::HeatKernel {
            lambda: check_lambda(lambda)?,
        })
    }

    /// The method with its default parameter: `λ = 1`, `k = 4`, `p = 0.86`.
    pub fn with_defaults(method: Method) -> Self {
        match method {
            Method::Pwp => MethodSpec::Pwp {
                lambda: T::lit(DEFAULT_LAMBDA),
            },
            Method::Micmac => MethodSpec::Micmac {
                k: DEFAULT_MICMAC_POWER,
            },
            Method::PageRank => MethodSpec::PageRank {
                p: T::lit(DEFAULT_DAMPING),
            },
            Method::HeatKernel => MethodSpec::HeatKernel {
                lambda: T::lit(DEFAULT_LAMBDA),
            },
        }
    }

    pub fn method(&self) -> Method {
        match self {
            MethodSpec::Pwp { .. } => Method::Pwp,
            MethodSpec::Micmac { .. } => Method::Micmac,
            MethodSpec::PageRank { .. } => Method::PageRank,
            MethodSpec::HeatKernel { .. } => Method::HeatKernel,
        }
    }
}

impl<T: Scalar> fmt::Display for MethodSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MethodSpec::Pwp { lambda } => write!(f, "pwp(lambda={lambda})"),
            MethodSpec::Micmac { k } => write!(f, "micmac(k={k})"),
            MethodSpec::PageRank { p } => write!(f, "pagerank(p={p})"),
            MethodSpec::HeatKernel { lambda } => write!(f, "heatkernel(lambda={lambda})"),
        }
    }
}

/// Numerical controls shared by all operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineOptions<T> {
    pub exp: ExpOptions<T>,
    pub pagerank_tolerance: T,
    pub pagerank_max_iters: usize,
}

impl<T: Scalar> Default for EngineOptions<T> {
    fn default() -> Self {
        Self {
            exp: ExpOptions::default(),
            pagerank_tolerance: T::lit(1e-12),
            pagerank_max_iters: 10_000,
        }
    }
}

/// Runs the operator described by `spec` on `direct`.
///
/// PageRank requires a column-stochastic input; use [`column_normalize`]
/// first for trade or offer matrices.
pub fn indirect_influences<T: Scalar>(
    direct: &InfluenceMatrix<T>,
    spec: &MethodSpec<T>,
    opts: &EngineOptions<T>,
) -> Result<InfluenceMatrix<T>, EngineError> {
    match *spec {
        MethodSpec::Pwp { lambda } => pwp(direct, lambda, &opts.exp),
        MethodSpec::Micmac { k } => micmac(direct, k),
        MethodSpec::PageRank { p } => {
            pagerank_limit(direct, p, opts.pagerank_tolerance, opts.pagerank_max_iters)
        }
        MethodSpec::HeatKernel { lambda } => heat_kernel(direct, lambda, &opts.exp),
    }
}
