//! Rankings, dependence-influence planes, pairwise connectedness, increments
//! of indirect over direct influence, partner counts, and a distance between
//! rankings.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::model::{InfluenceMatrix, ModelError, TradeNetwork};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticsError {
    #[error("influence matrix has no countries")]
    EmptyNetwork,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("matrices have different labels")]
    LabelMismatch,
    #[error("normalized direct influence of {influencer} on {dependent} is zero")]
    ZeroDirectEntry { dependent: String, influencer: String },
    #[error("rankings cover different countries")]
    DomainMismatch,
    #[error("ranking is not a permutation of 1..={n}: {reason}")]
    NotAPermutation { n: usize, reason: String },
    #[error("ranking distance needs at least two countries")]
    TooFewCountries,
}

/// Quadrant of the dependence-influence plane, split at the mean dependence
/// and mean influence. Points on a mean line count as not above it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sector {
    /// Influence above mean, dependence at or below mean.
    InfluentialIndependent = 1,
    InfluentialDependent = 2,
    LowInfluenceIndependent = 3,
    LowInfluenceDependent = 4,
}

impl Sector {
    pub fn classify<T: Scalar>(dependence: T, influence: T, mean_dep: T, mean_inf: T) -> Self {
        match (influence > mean_inf, dependence > mean_dep) {
            (true, false) => Sector::InfluentialIndependent,
            (true, true) => Sector::InfluentialDependent,
            (false, false) => Sector::LowInfluenceIndependent,
            (false, true) => Sector::LowInfluenceDependent,
        }
    }

    pub fn number(self) -> u8 {
        self as u8
    }
}

impl Serialize for Sector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(self.number())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanePoint<T> {
    pub code: String,
    pub dependence: T,
    pub influence: T,
    pub sector: Sector,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Plane<T> {
    pub points: Vec<PlanePoint<T>>,
    pub mean_dependence: T,
    pub mean_influence: T,
}

fn means<T: Scalar>(dependences: &[T], influences: &[T]) -> (T, T) {
    let n = T::from_usize_lossy(dependences.len());
    (
        dependences.iter().copied().sum::<T>() / n,
        influences.iter().copied().sum::<T>() / n,
    )
}

/// Places every country at `(d_A, f_A)` and assigns its sector.
pub fn plane<T: Scalar>(m: &InfluenceMatrix<T>) -> Result<Plane<T>, AnalyticsError> {
    if m.dim() == 0 {
        return Err(AnalyticsError::EmptyNetwork);
    }
    let deps = m.dependences();
    let infs = m.influences();
    let (mean_dependence, mean_influence) = means(&deps, &infs);
    let points = m
        .labels()
        .iter()
        .zip(deps.iter().zip(&infs))
        .map(|(code, (&d, &f))| PlanePoint {
            code: code.clone(),
            dependence: d,
            influence: f,
            sector: Sector::classify(d, f, mean_dependence, mean_influence),
        })
        .collect();
    Ok(Plane {
        points,
        mean_dependence,
        mean_influence,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Dependence,
    Influence,
    Connectedness,
}

impl Criterion {
    pub fn as_str(self) -> &'static str {
        match self {
            Criterion::Dependence => "dependence",
            Criterion::Influence => "influence",
            Criterion::Connectedness => "connectedness",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Criterion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dependence" => Ok(Criterion::Dependence),
            "influence" => Ok(Criterion::Influence),
            "connectedness" => Ok(Criterion::Connectedness),
            other => Err(format!(
                "unknown criterion {other:?} (expected dependence, influence or connectedness)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankingRow<T> {
    pub code: String,
    pub dependence: T,
    pub influence: T,
    pub connectedness: T,
    pub rank_by_dependence: usize,
    pub rank_by_influence: usize,
    pub rank_by_connectedness: usize,
}

impl<T: Scalar> RankingRow<T> {
    pub fn value(&self, criterion: Criterion) -> T {
        match criterion {
            Criterion::Dependence => self.dependence,
            Criterion::Influence => self.influence,
            Criterion::Connectedness => self.connectedness,
        }
    }

    pub fn rank(&self, criterion: Criterion) -> usize {
        match criterion {
            Criterion::Dependence => self.rank_by_dependence,
            Criterion::Influence => self.rank_by_influence,
            Criterion::Connectedness => self.rank_by_connectedness,
        }
    }
}

/// Map from country code to its 1-based rank position.
pub type Ranking = BTreeMap<String, usize>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankingReport<T> {
    pub matrix_kind: String,
    pub criterion: Criterion,
    /// Rows ordered by their rank under `criterion`.
    pub rows: Vec<RankingRow<T>>,
    pub mean_dependence: T,
    pub mean_influence: T,
}

impl<T: Scalar> RankingReport<T> {
    pub fn positions(&self, criterion: Criterion) -> Ranking {
        self.rows
            .iter()
            .map(|r| (r.code.clone(), r.rank(criterion)))
            .collect()
    }
}

/// Rank positions for `values`: descending, ties resolved by index. Matrices
/// built from a network list countries alphabetically by name, so index order
/// is alphabetical order.
fn rank_positions<T: Scalar>(values: &[T]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        values[b]
            .partial_cmp(&values[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut ranks = vec![0; values.len()];
    for (pos, &i) in order.iter().enumerate() {
        ranks[i] = pos + 1;
    }
    ranks
}

/// Ranks countries by dependence, influence and connectedness; rows come
/// back sorted by `criterion`.
pub fn rank<T: Scalar>(
    m: &InfluenceMatrix<T>,
    criterion: Criterion,
) -> Result<RankingReport<T>, AnalyticsError> {
    if m.dim() == 0 {
        return Err(AnalyticsError::EmptyNetwork);
    }
    let deps = m.dependences();
    let infs = m.influences();
    let conns: Vec<T> = deps.iter().zip(&infs).map(|(&d, &f)| d + f).collect();
    let (rd, ri, rc) = (
        rank_positions(&deps),
        rank_positions(&infs),
        rank_positions(&conns),
    );
    let mut rows: Vec<RankingRow<T>> = m
        .labels()
        .iter()
        .enumerate()
        .map(|(i, code)| RankingRow {
            code: code.clone(),
            dependence: deps[i],
            influence: infs[i],
            connectedness: conns[i],
            rank_by_dependence: rd[i],
            rank_by_influence: ri[i],
            rank_by_connectedness: rc[i],
        })
        .collect();
    rows.sort_by_key(|r| r.rank(criterion));
    let (mean_dependence, mean_influence) = means(&deps, &infs);
    Ok(RankingReport {
        matrix_kind: m.kind().to_string(),
        criterion,
        rows,
        mean_dependence,
        mean_influence,
    })
}

/// `c_AB = T_AB + T_BA`.
pub fn pair_connectedness<T: Scalar>(
    m: &InfluenceMatrix<T>,
    a: &str,
    b: &str,
) -> Result<T, AnalyticsError> {
    Ok(m.get(a, b)? + m.get(b, a)?)
}

/// Relative change of entry `[a][b]` from `direct` to `indirect`, after
/// dividing each matrix by the sum of all its entries. `0.66` means +66%.
pub fn normalized_increment<T: Scalar>(
    direct: &InfluenceMatrix<T>,
    indirect: &InfluenceMatrix<T>,
    a: &str,
    b: &str,
) -> Result<T, AnalyticsError> {
    if direct.labels() != indirect.labels() {
        return Err(AnalyticsError::LabelMismatch);
    }
    let zero = || AnalyticsError::ZeroDirectEntry {
        dependent: a.to_string(),
        influencer: b.to_string(),
    };
    let direct_total = direct.values().sum();
    let indirect_total = indirect.values().sum();
    if direct_total == T::zero() {
        return Err(zero());
    }
    let direct_hat = direct.get(a, b)? / direct_total;
    if direct_hat == T::zero() || !direct_hat.is_finite() {
        return Err(zero());
    }
    let indirect_hat = indirect.get(a, b)? / indirect_total;
    Ok((indirect_hat - direct_hat) / direct_hat)
}

fn check_permutation(r: &Ranking) -> Result<(), AnalyticsError> {
    let n = r.len();
    let mut seen = vec![false; n + 1];
    for (code, &pos) in r {
        if pos == 0 || pos > n {
            return Err(AnalyticsError::NotAPermutation {
                n,
                reason: format!("{code} has position {pos}"),
            });
        }
        if std::mem::replace(&mut seen[pos], true) {
            return Err(AnalyticsError::NotAPermutation {
                n,
                reason: format!("position {pos} used twice"),
            });
        }
    }
    Ok(())
}

/// Normalized Euclidean distance between two complete rankings of the same
/// `n` countries: `sqrt(Σ (r(A) - l(A))²) / ((n - 1)·sqrt(n))`.
pub fn ranking_distance<T: Scalar>(r: &Ranking, l: &Ranking) -> Result<T, AnalyticsError> {
    if r.len() != l.len() || r.keys().ne(l.keys()) {
        return Err(AnalyticsError::DomainMismatch);
    }
    let n = r.len();
    if n < 2 {
        return Err(AnalyticsError::TooFewCountries);
    }
    check_permutation(r)?;
    check_permutation(l)?;
    let squares: usize = r
        .iter()
        .map(|(code, &a)| {
            let b = l[code];
            a.abs_diff(b).pow(2)
        })
        .sum();
    let n_t = T::from_usize_lossy(n);
    Ok(T::from_usize_lossy(squares).sqrt() / ((n_t - T::one()) * n_t.sqrt()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeStats {
    pub average_partner_count: f64,
    /// `(code, partner count)` in network order.
    pub partner_counts: Vec<(String, usize)>,
}

/// Number of distinct trade partners per country, counting a flow record
/// reported by either side.
pub fn degree_stats(network: &TradeNetwork) -> DegreeStats {
    let mut partners: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); network.len()];
    for f in network.flows() {
        if f.total() <= 0.0 {
            continue;
        }
        let r = network.index_of(&f.reporter).expect("network flows resolve");
        let p = network.index_of(&f.partner).expect("network flows resolve");
        partners[r].insert(p);
        partners[p].insert(r);
    }
    let partner_counts: Vec<(String, usize)> = network
        .countries()
        .iter()
        .zip(&partners)
        .map(|(c, set)| (c.code.clone(), set.len()))
        .collect();
    let average_partner_count = if partner_counts.is_empty() {
        0.0
    } else {
        partner_counts.iter().map(|(_, k)| *k as f64).sum::<f64>() / partner_counts.len() as f64
    };
    DegreeStats {
        average_partner_count,
        partner_counts,
    }
}

/// Codes present in one ranking but not the other.
pub fn ranking_domain_difference(r: &Ranking, l: &Ranking) -> Vec<String> {
    let a: HashSet<&String> = r.keys().collect();
    let b: HashSet<&String> = l.keys().collect();
    let mut diff: Vec<String> = a.symmetric_difference(&b).map(|s| s.to_string()).collect();
    diff.sort();
    diff
}
