//! Command implementations behind the `trade-influence` binary.
//!
//! Every command loads the dataset, builds the direct matrix for the chosen
//! weight, optionally applies an indirect-influence operator, and writes its
//! result under the output directory. Outputs contain no timestamps, so
//! rerunning a command with the same inputs rewrites identical bytes.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::analytics::{self, Criterion};
use crate::engine::{self, EngineOptions, Method, MethodSpec};
use crate::export::{self, RankingFile};
use crate::ingest::{Dataset, DatasetManifest};
use crate::model::InfluenceMatrix;
use crate::weights::{build_direct_matrix, ConsistencyWarning, WeightKind};

/// Pipeline stage a failure is attributed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Usage,
    Ingestion,
    Weights,
    Engine,
    Analytics,
    Io,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Usage => "usage",
            Stage::Ingestion => "ingestion",
            Stage::Weights => "weights",
            Stage::Engine => "engine",
            Stage::Analytics => "analytics",
            Stage::Io => "io",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub stage: Stage,
    pub message: String,
}

impl CliError {
    fn new(stage: Stage, err: impl fmt::Display) -> Self {
        Self {
            stage,
            message: err.to_string(),
        }
    }

    /// 2 for usage errors, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self.stage {
            Stage::Usage => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} error: {}", self.stage, self.message)
    }
}

impl std::error::Error for CliError {}

trait StageExt<T> {
    fn stage(self, stage: Stage) -> Result<T, CliError>;
}

impl<T, E: fmt::Display> StageExt<T> for Result<T, E> {
    fn stage(self, stage: Stage) -> Result<T, CliError> {
        self.map_err(|e| CliError::new(stage, e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format {other:?} (expected csv or json)")),
        }
    }
}

/// Everything a command needs to know about one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub manifest: DatasetManifest,
    pub weight: WeightKind,
    /// `None` analyses the direct matrix itself.
    pub method: Option<MethodSpec<f64>>,
    pub output_dir: PathBuf,
    pub output_format: OutputFormat,
}

impl RunConfig {
    fn method_tag(&self) -> &'static str {
        self.method.map_or("direct", |m| m.method().as_str())
    }

    fn stem(&self, prefix: &str) -> String {
        format!("{prefix}_{}_{}", self.weight, self.method_tag())
    }
}

/// Builds a method spec from a method name and the raw parameter flags.
pub fn method_from_flags(
    method: Method,
    lambda: f64,
    k: u32,
    p: f64,
) -> Result<MethodSpec<f64>, CliError> {
    match method {
        Method::Pwp => MethodSpec::pwp(lambda),
        Method::Micmac => MethodSpec::micmac(k),
        Method::PageRank => MethodSpec::pagerank(p),
        Method::HeatKernel => MethodSpec::heat_kernel(lambda),
    }
    .stage(Stage::Usage)
}

/// Result of running the weighting and engine stages.
pub struct Computed {
    pub dataset: Dataset,
    pub direct: InfluenceMatrix<f64>,
    pub warnings: Vec<ConsistencyWarning>,
    pub indirect: Option<InfluenceMatrix<f64>>,
}

impl Computed {
    /// The matrix rankings, planes and graphs are drawn from.
    pub fn analysed(&self) -> &InfluenceMatrix<f64> {
        self.indirect.as_ref().unwrap_or(&self.direct)
    }
}

/// Loads the dataset and computes the direct and (if requested) indirect
/// matrices. PageRank runs column-normalize the direct matrix first.
pub fn compute(config: &RunConfig) -> Result<Computed, CliError> {
    let dataset = config.manifest.load().stage(Stage::Ingestion)?;
    let built = build_direct_matrix::<f64>(&dataset.network, config.weight).stage(Stage::Weights)?;
    let indirect = match &config.method {
        None => None,
        Some(spec) => {
            let opts = EngineOptions::default();
            let input = match spec {
                MethodSpec::PageRank { .. } => {
                    engine::column_normalize(&built.matrix).stage(Stage::Engine)?
                }
                _ => built.matrix.clone(),
            };
            Some(engine::indirect_influences(&input, spec, &opts).stage(Stage::Engine)?)
        }
    };
    Ok(Computed {
        dataset,
        direct: built.matrix,
        warnings: built.warnings,
        indirect,
    })
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).stage(Stage::Io)?;
    let path = dir.join(name);
    fs::write(&path, contents)
        .map_err(|e| CliError::new(Stage::Io, format!("{}: {e}", path.display())))?;
    Ok(path)
}

fn render_matrix(m: &InfluenceMatrix<f64>, format: OutputFormat) -> Result<String, CliError> {
    match format {
        OutputFormat::Csv => export::matrix_to_csv(m),
        OutputFormat::Json => export::matrix_to_json(m),
    }
    .stage(Stage::Io)
}

#[derive(Serialize)]
struct RunMetadata<'a> {
    year: &'a str,
    countries: usize,
    weight: WeightKind,
    method: Option<MethodSpec<f64>>,
    column_normalized: bool,
    dropped_zero_flows: usize,
    consistency_warnings: &'a [ConsistencyWarning],
}

/// Writes `direct_<weight>` and, when a method is set,
/// `indirect_<weight>_<method>` plus a `.meta.json` sidecar describing the run.
pub fn cmd_matrix(config: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let computed = compute(config)?;
    let ext = config.output_format.extension();
    let dir = &config.output_dir;
    let mut written = vec![write_file(
        dir,
        &format!("direct_{}.{ext}", config.weight),
        &render_matrix(&computed.direct, config.output_format)?,
    )?];
    if let Some(indirect) = &computed.indirect {
        let stem = format!("indirect_{}_{}", config.weight, config.method_tag());
        written.push(write_file(
            dir,
            &format!("{stem}.{ext}"),
            &render_matrix(indirect, config.output_format)?,
        )?);
        let meta = RunMetadata {
            year: &computed.dataset.year_label,
            countries: computed.dataset.network.len(),
            weight: config.weight,
            method: config.method,
            column_normalized: indirect.is_column_normalized(),
            dropped_zero_flows: computed.dataset.dropped_zero_flows,
            consistency_warnings: &computed.warnings,
        };
        let json = serde_json::to_string_pretty(&meta).stage(Stage::Io)? + "\n";
        written.push(write_file(dir, &format!("{stem}.meta.json"), &json)?);
    }
    Ok(written)
}

/// Writes `ranking_<weight>_<method>_<criterion>` with columns
/// `code,name,value,rank`, sorted by rank.
pub fn cmd_rank(config: &RunConfig, criterion: Criterion) -> Result<PathBuf, CliError> {
    let computed = compute(config)?;
    let report = analytics::rank(computed.analysed(), criterion).stage(Stage::Analytics)?;
    let entries = export::ranking_entries(&report, &computed.dataset.network);
    let body = match config.output_format {
        OutputFormat::Csv => export::ranking_to_csv(&entries),
        OutputFormat::Json => export::ranking_to_json(&RankingFile {
            matrix_kind: report.matrix_kind.clone(),
            criterion,
            rows: entries,
        }),
    }
    .stage(Stage::Io)?;
    let name = format!(
        "{}_{criterion}.{}",
        config.stem("ranking"),
        config.output_format.extension()
    );
    write_file(&config.output_dir, &name, &body)
}

/// Writes `plane_<weight>_<method>` with each country's dependence,
/// influence and sector.
pub fn cmd_plane(config: &RunConfig) -> Result<PathBuf, CliError> {
    let computed = compute(config)?;
    let plane = analytics::plane(computed.analysed()).stage(Stage::Analytics)?;
    let body = match config.output_format {
        OutputFormat::Csv => export::plane_to_csv(&plane),
        OutputFormat::Json => export::plane_to_json(&plane),
    }
    .stage(Stage::Io)?;
    let name = format!("{}.{}", config.stem("plane"), config.output_format.extension());
    write_file(&config.output_dir, &name, &body)
}

/// Writes `network_<weight>_<method>.dot`.
pub fn cmd_export_dot(config: &RunConfig, min_weight: f64) -> Result<PathBuf, CliError> {
    let computed = compute(config)?;
    let dot = export::matrix_to_dot(computed.analysed(), min_weight);
    write_file(
        &config.output_dir,
        &format!("{}.dot", config.stem("network")),
        &dot,
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankDelta {
    pub code: String,
    pub rank_a: usize,
    pub rank_b: usize,
}

impl RankDelta {
    /// Positions moved from the first ranking to the second.
    pub fn delta(&self) -> i64 {
        self.rank_b as i64 - self.rank_a as i64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub distance: f64,
    /// Sorted by absolute delta, largest first; ties by code.
    pub deltas: Vec<RankDelta>,
}

impl fmt::Display for CompareReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "distance {}", export::format_number(self.distance))?;
        writeln!(f, "code,rank_a,rank_b,delta")?;
        for d in &self.deltas {
            writeln!(f, "{},{},{},{}", d.code, d.rank_a, d.rank_b, d.delta())?;
        }
        Ok(())
    }
}

fn load_ranking(path: &Path) -> Result<analytics::Ranking, CliError> {
    let json = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let file = fs::File::open(path)
        .map_err(|e| CliError::new(Stage::Ingestion, format!("{}: {e}", path.display())))?;
    export::read_ranking(file, json)
        .map_err(|e| CliError::new(Stage::Ingestion, format!("{}: {e}", path.display())))
}

/// Distance between two ranking files plus per-country rank changes.
pub fn cmd_compare(ranking_a: &Path, ranking_b: &Path) -> Result<CompareReport, CliError> {
    let a = load_ranking(ranking_a)?;
    let b = load_ranking(ranking_b)?;
    let distance = analytics::ranking_distance::<f64>(&a, &b).map_err(|e| match e {
        analytics::AnalyticsError::DomainMismatch => CliError::new(
            Stage::Analytics,
            format!(
                "{e}: {}",
                analytics::ranking_domain_difference(&a, &b).join(",")
            ),
        ),
        other => CliError::new(Stage::Analytics, other),
    })?;
    let mut deltas: Vec<RankDelta> = a
        .iter()
        .map(|(code, &rank_a)| RankDelta {
            code: code.clone(),
            rank_a,
            rank_b: b[code],
        })
        .collect();
    deltas.sort_by(|x, y| {
        y.delta()
            .abs()
            .cmp(&x.delta().abs())
            .then_with(|| x.code.cmp(&y.code))
    });
    Ok(CompareReport { distance, deltas })
}
