//! Fixtures and brute-force oracles shared by the integration tests.
//!
//! Nothing here calls into the engine: the oracles are deliberately naive
//! so they stay independent of the code under test.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use trade_influence::ingest::{write_countries, write_flows};
use trade_influence::regions::AMERICAS;
use trade_influence::{BilateralFlow, CountryRecord, InfluenceMatrix, Matrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("C{i:02}")).collect()
}

pub fn random_rows(rng: &mut impl Rng, n: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..n).map(|_| rng.gen_range(lo..hi)).collect())
        .collect()
}

pub fn matrix(rows: &[Vec<f64>]) -> InfluenceMatrix {
    InfluenceMatrix::custom(labels(rows.len()), rows).unwrap()
}

pub fn max_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .fold(0.0, |m, (x, y)| f64::max(m, (x - y).abs()))
}

// ---------------------------------------------------------------------------
// Oracles on plain Vec<Vec<f64>>
// ---------------------------------------------------------------------------

pub fn naive_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let m = b[0].len();
    let mut out = vec![vec![0.0; m]; n];
    for i in 0..n {
        for j in 0..m {
            for k in 0..b.len() {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

pub fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

/// `Σ_{k=0}^{terms} A^k / k!` summed term by term, no scaling.
pub fn taylor_exp(a: &[Vec<f64>], terms: usize) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut sum = identity(n);
    let mut term = identity(n);
    for k in 1..=terms {
        term = naive_mul(&term, a);
        for row in term.iter_mut() {
            for x in row.iter_mut() {
                *x /= k as f64;
            }
        }
        for i in 0..n {
            for j in 0..n {
                sum[i][j] += term[i][j];
            }
        }
    }
    sum
}

/// `reach[t][s]`: a directed path of length >= 1 runs from `s` to `t`, where
/// an edge `s -> t` exists when `d[t][s] > 0`.
pub fn reachability(d: &[Vec<f64>]) -> Vec<Vec<bool>> {
    let n = d.len();
    let mut reach = vec![vec![false; n]; n];
    for s in 0..n {
        let mut stack: Vec<usize> = (0..n).filter(|&t| d[t][s] > 0.0).collect();
        let mut seen = HashSet::new();
        while let Some(t) = stack.pop() {
            if seen.insert(t) {
                reach[t][s] = true;
                stack.extend((0..n).filter(|&u| d[u][t] > 0.0));
            }
        }
    }
    reach
}

/// Random DAG-shaped sparse matrix: vertices get a random topological order
/// and an edge `s -> t` (entry `[t][s]`) may only go forward in it.
pub fn random_dag(rng: &mut impl Rng, n: usize, density: f64) -> Vec<Vec<f64>> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut d = vec![vec![0.0; n]; n];
    for a in 0..n {
        for b in (a + 1)..n {
            if rng.gen_bool(density) {
                let (s, t) = (order[a], order[b]);
                d[t][s] = rng.gen_range(0.05..1.0);
            }
        }
    }
    d
}

/// Random non-negative matrix with some zero columns, columns scaled to sum 1.
pub fn random_column_stochastic(rng: &mut impl Rng, n: usize) -> Vec<Vec<f64>> {
    let mut d = vec![vec![0.0; n]; n];
    for j in 0..n {
        if rng.gen_bool(0.2) {
            continue;
        }
        for row in d.iter_mut() {
            if rng.gen_bool(0.6) {
                row[j] = rng.gen_range(0.0..1.0);
            }
        }
    }
    for j in 0..n {
        let s: f64 = (0..n).map(|i| d[i][j]).sum();
        if s > 0.0 {
            for row in d.iter_mut() {
                row[j] /= s;
            }
        }
    }
    d
}

/// Plain `p·D̄ + (1 - p)·E_n` iterated as a dense matrix on the uniform
/// vector for a fixed number of steps.
pub fn pagerank_oracle(d: &[Vec<f64>], p: f64, steps: usize) -> Vec<f64> {
    let n = d.len();
    let nf = n as f64;
    let mut m = vec![vec![0.0; n]; n];
    for j in 0..n {
        let zero = (0..n).all(|i| d[i][j] == 0.0);
        for i in 0..n {
            let dbar = if zero { 1.0 / nf } else { d[i][j] };
            m[i][j] = p * dbar + (1.0 - p) / nf;
        }
    }
    let mut x = vec![1.0 / nf; n];
    for _ in 0..steps {
        x = (0..n)
            .map(|i| (0..n).map(|j| m[i][j] * x[j]).sum())
            .collect();
    }
    x
}

pub fn to_rows(m: &Matrix) -> Vec<Vec<f64>> {
    m.to_rows()
}

// ---------------------------------------------------------------------------
// Trade fixtures
// ---------------------------------------------------------------------------

pub fn us_china_countries() -> Vec<CountryRecord> {
    vec![
        CountryRecord::new(
            "USA",
            "United States",
            14_991_300_000.0,
            1_479_730_169.0,
            2_262_585_634.0,
        ),
        CountryRecord::new(
            "CHN",
            "China",
            7_321_935_025.0,
            1_898_388_435.0,
            1_743_394_866.0,
        ),
    ]
}

pub fn us_china_flows() -> Vec<BilateralFlow> {
    vec![
        BilateralFlow::new("USA", "CHN", 103_878_414.0, 417_302_859.0),
        BilateralFlow::new("CHN", "USA", 325_010_987.0, 123_124_009.0),
    ]
}

/// Three-country network whose trade weights reproduce the US-Spain-Cuba
/// triangle (US on Spain 0.038, Spain on Cuba 0.068, US on Cuba 0.03) plus
/// smaller reverse influences. Trade entries >= 0.01: five of six.
pub fn triangle_countries() -> Vec<CountryRecord> {
    vec![
        CountryRecord::new(
            "USA",
            "United States",
            14_991_300_000.0,
            1_479_730_169.0,
            2_262_585_634.0,
        ),
        CountryRecord::new("ESP", "Spain", 1_607_692_308.0, 300_000_000.0, 380_000_000.0),
        CountryRecord::new("CUB", "Cuba", 99_333_333.0, 6_000_000.0, 14_000_000.0),
    ]
}

pub fn triangle_flows() -> Vec<BilateralFlow> {
    vec![
        // Cuba: 1,360,000 / 20,000,000 = 0.068 and 600,000 / 20,000,000 = 0.03
        BilateralFlow::new("CUB", "ESP", 400_000.0, 960_000.0),
        BilateralFlow::new("CUB", "USA", 0.0, 600_000.0),
        // Spain: 25,840,000 / 680,000,000 = 0.038 and 8,160,000 / 680,000,000 = 0.012
        BilateralFlow::new("ESP", "USA", 11_000_000.0, 14_840_000.0),
        BilateralFlow::new("ESP", "CUB", 6_000_000.0, 2_160_000.0),
        // United States: 41,165,474 / 3,742,315,803 ≈ 0.011; Cuba ≈ 0.0001
        BilateralFlow::new("USA", "ESP", 20_000_000.0, 21_165_474.0),
        BilateralFlow::new("USA", "CUB", 374_232.0, 0.0),
    ]
}

/// Direct matrices of the triangle in label order `[CUB, ESP, USA]`, using
/// only the three published direct influences.
pub fn triangle_matrix(us_on_spain: f64, spain_on_cuba: f64, us_on_cuba: f64) -> InfluenceMatrix {
    let rows = vec![
        vec![0.0, spain_on_cuba, us_on_cuba],
        vec![0.0, 0.0, us_on_spain],
        vec![0.0, 0.0, 0.0],
    ];
    InfluenceMatrix::custom(["CUB", "ESP", "USA"], &rows).unwrap()
}

pub fn triangle_trade() -> InfluenceMatrix {
    triangle_matrix(0.038, 0.068, 0.03)
}

pub fn triangle_offer() -> InfluenceMatrix {
    triangle_matrix(0.013, 0.012, 0.006)
}

/// Distinct uppercase three-letter codes, avoiding `reserved`.
pub fn synthetic_codes(rng: &mut impl Rng, n: usize, reserved: &HashSet<String>) -> Vec<String> {
    let mut out = BTreeSet::new();
    while out.len() < n {
        let code: String = (0..3).map(|_| rng.gen_range(b'A'..=b'Z') as char).collect();
        if !reserved.contains(&code) {
            out.insert(code);
        }
    }
    out.into_iter().collect()
}

/// A synthetic world: random GDPs and a near-complete set of bilateral
/// flows. With `consistent` the declared export/import totals equal each
/// country's flow sums; otherwise they include unrecorded partners.
pub fn synthetic_world(
    seed: u64,
    n: usize,
    include_americas: bool,
    consistent: bool,
) -> (Vec<CountryRecord>, Vec<BilateralFlow>) {
    let mut rng = rng(seed);
    let mut countries: Vec<(String, String)> = Vec::new();
    if include_americas {
        countries.extend(
            AMERICAS
                .iter()
                .map(|(c, name)| (c.to_string(), name.to_string())),
        );
    }
    let reserved: HashSet<String> = countries.iter().map(|(c, _)| c.clone()).collect();
    let extra = n.saturating_sub(countries.len());
    for code in synthetic_codes(&mut rng, extra, &reserved) {
        let name = format!("Country {code}");
        countries.push((code, name));
    }

    let mut flows = Vec::new();
    let mut exports = vec![0.0; countries.len()];
    let mut imports = vec![0.0; countries.len()];
    for (a, (ca, _)) in countries.iter().enumerate() {
        for (b, (cb, _)) in countries.iter().enumerate() {
            if a == b || !rng.gen_bool(0.8) {
                continue;
            }
            let e = (rng.gen_range(0.0..1e6_f64)).round();
            let i = (rng.gen_range(0.0..1e6_f64)).round();
            if e + i == 0.0 {
                continue;
            }
            exports[a] += e;
            imports[a] += i;
            flows.push(BilateralFlow::new(ca.clone(), cb.clone(), e, i));
        }
    }
    let records = countries
        .into_iter()
        .enumerate()
        .map(|(k, (code, name))| {
            let slack = if consistent {
                1.0
            } else {
                rng.gen_range(1.0..1.3)
            };
            let (e, i) = ((exports[k] * slack).round(), (imports[k] * slack).round());
            let gdp = (rng.gen_range(1.0..20.0) * (e + i + 1.0)).round();
            CountryRecord::new(code, name, gdp, e, i)
        })
        .collect();
    (records, flows)
}

pub fn write_dataset(dir: &Path, countries: &[CountryRecord], flows: &[BilateralFlow]) {
    std::fs::create_dir_all(dir).unwrap();
    write_countries(countries, std::fs::File::create(dir.join("countries.csv")).unwrap()).unwrap();
    write_flows(flows, std::fs::File::create(dir.join("flows.csv")).unwrap()).unwrap();
}
