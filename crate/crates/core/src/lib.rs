//! Direct and indirect influences in bilateral trade networks.
//!
//! A [`TradeNetwork`] of countries and reporter-side bilateral flows is turned
//! into a direct-influence matrix, either as a share of each country's
//! international trade or of its offer (GDP plus imports). Indirect influences
//! follow from one of four operators on that matrix: PWP, MICMAC, PageRank or
//! the Heat Kernel. Rankings, dependence-influence planes and a distance
//! between rankings are computed on top.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix it to `f64`, the precision used by the command line.

pub mod analytics;
pub mod cli;
pub mod engine;
pub mod export;
pub mod ingest;
pub mod linalg;
pub mod model;
pub mod regions;
pub mod scalar;
pub mod weights;

pub use analytics::{
    degree_stats, normalized_increment, pair_connectedness, plane, rank, ranking_distance,
    Criterion, DegreeStats, PlanePoint, Ranking, RankingReport, Sector,
};
pub use engine::{
    column_normalize, heat_kernel, indirect_influences, matrix_exponential, micmac,
    pagerank_limit, pwp, EngineError, EngineOptions, ExpOptions, Method,
};
pub use ingest::{load_countries, load_flows, subset, DatasetManifest, IngestError};
pub use linalg::DenseMatrix;
pub use model::{
    bidegree, build_network, BilateralFlow, CountryRecord, MatrixKind, ModelError, TradeNetwork,
};
pub use scalar::Scalar;
pub use weights::{
    build_direct_matrix, offer_influence, trade_influence, ConsistencyWarning, WeightKind,
};

pub type Matrix = linalg::DenseMatrix<f64>;
pub type InfluenceMatrix = model::InfluenceMatrix<f64>;
pub type MethodSpec = engine::MethodSpec<f64>;
pub type DirectMatrix = weights::DirectMatrix<f64>;
pub type Plane = analytics::Plane<f64>;
pub type Report = analytics::RankingReport<f64>;

pub type Matrix32 = linalg::DenseMatrix<f32>;
pub type InfluenceMatrix32 = model::InfluenceMatrix<f32>;
