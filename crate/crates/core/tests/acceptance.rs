//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p trade-influence --test acceptance`.

mod common;

use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;

use common::*;
use trade_influence::analytics::Ranking;
use trade_influence::cli::{
    cmd_compare, cmd_export_dot, cmd_matrix, cmd_plane, cmd_rank, OutputFormat, RunConfig,
};
use trade_influence::regions::americas_codes;
use trade_influence::{
    build_direct_matrix, build_network, column_normalize, heat_kernel, matrix_exponential,
    offer_influence, pagerank_limit, pwp, ranking_distance, trade_influence, Criterion,
    DatasetManifest, ExpOptions, InfluenceMatrix, MethodSpec, WeightKind,
};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn opts() -> ExpOptions<f64> {
    ExpOptions::default()
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn golden_values() -> Outcome {
    let net = build_network(us_china_countries(), us_china_flows()).map_err(|e| e.to_string())?;
    let got = [
        trade_influence(&net, "USA", "CHN").map_err(|e| e.to_string())?,
        trade_influence(&net, "CHN", "USA").map_err(|e| e.to_string())?,
        offer_influence(&net, "USA", "CHN").map_err(|e| e.to_string())?,
        offer_influence(&net, "CHN", "USA").map_err(|e| e.to_string())?,
    ];
    let want = [0.139, 0.123, 0.0302, 0.0494];
    let ok = got.iter().zip(&want).all(|(&g, &w)| within(g, w, 5e-4));
    check(
        ok,
        format!(
            "trade {:.5}/{:.5}, offer {:.5}/{:.5} (tolerance 5e-4)",
            got[0], got[1], got[2], got[3]
        ),
    )
}

fn expm_oracle() -> Outcome {
    let mut rng = rng(0xE1);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let rows = random_rows(&mut rng, 5, 0.0, 1.0);
        let got = matrix_exponential(&trade_influence::Matrix::from_rows(&rows).unwrap(), &opts())
            .map_err(|e| e.to_string())?;
        worst = worst.max(max_diff(&got.to_rows(), &taylor_exp(&rows, 30)));
    }
    check(worst < 1e-10, format!("max entry error {worst:.2e} over 100 matrices"))
}

fn pwp_analytic() -> Outcome {
    let zero = matrix(&vec![vec![0.0; 4]; 4]);
    let t0 = pwp(&zero, 1.0, &opts()).map_err(|e| e.to_string())?;
    let zero_ok = t0.values().as_slice().iter().all(|&x| x == 0.0);

    let mut identity_err: f64 = 0.0;
    for lambda in [0.5, 1.0, 2.0] {
        let t = pwp(&matrix(&identity(4)), lambda, &opts()).map_err(|e| e.to_string())?;
        identity_err = identity_err.max(max_diff(&t.values().to_rows(), &identity(4)));
    }

    let nil = matrix(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
    let t = pwp(&nil, 1.0, &opts()).map_err(|e| e.to_string())?;
    let target = 1.0 / (std::f64::consts::E - 1.0);
    let nil_err = (t.values()[(0, 1)] - target)
        .abs()
        .max(t.values()[(0, 0)].abs())
        .max(t.values()[(1, 0)].abs())
        .max(t.values()[(1, 1)].abs());

    let mut rng = rng(0xE3);
    let mut small_err: f64 = 0.0;
    for _ in 0..20 {
        let rows = random_rows(&mut rng, 6, 0.0, 1.0);
        let t = pwp(&matrix(&rows), 1e-8, &opts()).map_err(|e| e.to_string())?;
        small_err = small_err.max(max_diff(&t.values().to_rows(), &rows));
    }
    check(
        zero_ok && identity_err <= 1e-12 && nil_err <= 1e-12 && small_err < 1e-6,
        format!(
            "T(0)=0 {zero_ok}, T(I) err {identity_err:.1e}, nilpotent err {nil_err:.1e}, \
             small-lambda err {small_err:.1e}"
        ),
    )
}

fn path_positivity() -> Outcome {
    let mut rng = rng(0xE4);
    let mut mismatches = 0;
    let mut reachable_pairs = 0;
    for _ in 0..50 {
        let d = random_dag(&mut rng, 8, 0.25);
        let reach = reachability(&d);
        let t = pwp(&matrix(&d), 1.0, &opts()).map_err(|e| e.to_string())?;
        for target in 0..8 {
            for source in 0..8 {
                let positive = t.values()[(target, source)] > 0.0;
                reachable_pairs += usize::from(reach[target][source]);
                if positive != reach[target][source] {
                    mismatches += 1;
                }
            }
        }
    }
    check(
        mismatches == 0,
        format!("{mismatches} mismatches over 50 DAGs ({reachable_pairs} reachable pairs)"),
    )
}

fn pagerank_contract() -> Outcome {
    let mut rng = rng(0xE5);
    let mut col_spread: f64 = 0.0;
    let mut sum_err: f64 = 0.0;
    for _ in 0..50 {
        let raw = random_rows(&mut rng, 10, 0.0, 1.0)
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|x| if x < 0.4 { 0.0 } else { x })
                    .collect()
            })
            .collect::<Vec<Vec<f64>>>();
        let normalized = column_normalize(&matrix(&raw)).map_err(|e| e.to_string())?;
        let p = rng.gen_range(0.5..0.95);
        let t = pagerank_limit(&normalized, p, 1e-12, 10_000).map_err(|e| e.to_string())?;
        let v = t.values();
        for j in 0..10 {
            for i in 0..10 {
                col_spread = col_spread.max((v[(i, j)] - v[(i, 0)]).abs());
            }
        }
        for s in v.col_sums() {
            sum_err = sum_err.max((s - 1.0).abs());
        }
    }

    let cycle = matrix(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
    let t = pagerank_limit(&cycle, 0.86, 1e-12, 10_000).map_err(|e| e.to_string())?;
    let cycle_err = t
        .values()
        .as_slice()
        .iter()
        .fold(0.0_f64, |m, &x| m.max((x - 0.5).abs()));

    let n = 7;
    let zero = matrix(&vec![vec![0.0; n]; n]);
    let t = pagerank_limit(&zero, 0.86, 1e-12, 10_000).map_err(|e| e.to_string())?;
    let zero_err = t
        .values()
        .as_slice()
        .iter()
        .fold(0.0_f64, |m, &x| m.max((x - 1.0 / n as f64).abs()));

    check(
        col_spread <= 1e-9 && sum_err <= 1e-9 && cycle_err <= 1e-9 && zero_err <= 1e-12,
        format!(
            "column spread {col_spread:.1e}, column sum err {sum_err:.1e}, \
             2-cycle err {cycle_err:.1e}, zero-matrix err {zero_err:.1e}"
        ),
    )
}

fn heat_factorization() -> Outcome {
    let mut rng = rng(0xE6);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let rows = random_rows(&mut rng, 6, 0.0, 1.0);
        let d = matrix(&rows);
        for lambda in [0.5, 1.0] {
            let h = heat_kernel(&d, lambda, &opts()).map_err(|e| e.to_string())?;
            let e = matrix_exponential(&d.values().scale(lambda), &opts())
                .map_err(|e| e.to_string())?
                .scale((-lambda).exp());
            worst = worst.max(h.values().max_abs_diff(&e));
        }
    }
    check(worst < 1e-10, format!("max entry error {worst:.2e}"))
}

fn weight_normalization() -> Outcome {
    let mut trade_err: f64 = 0.0;
    let mut offer_err: f64 = 0.0;
    let mut rows_checked = 0;
    for seed in 0..10 {
        let (countries, flows) = synthetic_world(0x700 + seed, 40, false, true);
        let net = build_network(countries, flows).map_err(|e| e.to_string())?;
        let trade = build_direct_matrix::<f64>(&net, WeightKind::Trade).map_err(|e| e.to_string())?;
        let offer = build_direct_matrix::<f64>(&net, WeightKind::Offer).map_err(|e| e.to_string())?;
        let (ts, os) = (trade.matrix.dependences(), offer.matrix.dependences());
        for (k, c) in net.countries().iter().enumerate() {
            if c.total_trade() == 0.0 {
                continue;
            }
            rows_checked += 1;
            trade_err = trade_err.max((ts[k] - 1.0).abs());
            offer_err = offer_err.max((os[k] - c.total_trade() / c.offer()).abs());
        }
    }
    check(
        trade_err <= 1e-12 && offer_err <= 1e-12,
        format!("{rows_checked} rows: trade err {trade_err:.1e}, offer err {offer_err:.1e}"),
    )
}

fn ranking_of(order: &[usize]) -> Ranking {
    order
        .iter()
        .enumerate()
        .map(|(i, &pos)| (format!("C{i}"), pos))
        .collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for slot in 0..=p.len() {
            let mut q = p.clone();
            q.insert(slot, n);
            out.push(q);
        }
    }
    out
}

fn ranking_metric() -> Outcome {
    let dist = |a: &Ranking, b: &Ranking| ranking_distance::<f64>(a, b).unwrap();
    let id3 = ranking_of(&[1, 2, 3]);
    let identity = dist(&id3, &id3);
    let swap = dist(&ranking_of(&[1, 2]), &ranking_of(&[2, 1]));
    let reversal = dist(&id3, &ranking_of(&[3, 2, 1]));
    let reversal_ok = within(reversal, (2.0_f64 / 3.0).sqrt(), 1e-12);

    let perms: Vec<Ranking> = permutations(4).iter().map(|p| ranking_of(p)).collect();
    let mut violations = 0;
    for x in &perms {
        for y in &perms {
            let dxy = dist(x, y);
            if (dxy == 0.0) != (x == y) || dxy != dist(y, x) || dxy < 0.0 {
                violations += 1;
            }
            for z in &perms {
                if dxy > dist(x, z) + dist(z, y) + 1e-12 {
                    violations += 1;
                }
            }
        }
    }
    check(
        identity == 0.0 && swap == 1.0 && reversal_ok && violations == 0,
        format!(
            "identity {identity}, swap {swap}, reversal {reversal:.15}, \
             {violations} axiom violations over {} triples",
            perms.len().pow(3)
        ),
    )
}

fn without_spain(m: &InfluenceMatrix) -> InfluenceMatrix {
    let spain = m.index_of("ESP").unwrap();
    let rows: Vec<Vec<f64>> = m
        .values()
        .to_rows()
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            row.into_iter()
                .enumerate()
                .map(|(j, x)| if i == spain || j == spain { 0.0 } else { x })
                .collect()
        })
        .collect();
    InfluenceMatrix::custom(m.labels().to_vec(), &rows).unwrap()
}

fn triangulation() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, d) in [("trade", triangle_trade()), ("offer", triangle_offer())] {
        let full = pwp(&d, 1.0, &opts()).map_err(|e| e.to_string())?;
        let cut = pwp(&without_spain(&d), 1.0, &opts()).map_err(|e| e.to_string())?;
        let (a, b) = (
            full.get("CUB", "USA").unwrap(),
            cut.get("CUB", "USA").unwrap(),
        );
        ok &= a > b;
        parts.push(format!("{name} {a:.6} > {b:.6}"));
    }
    check(ok, parts.join(", "))
}

fn config(dir: &Path, out: &Path, region: bool) -> RunConfig {
    let mut manifest = DatasetManifest::new(dir.join("countries.csv"), dir.join("flows.csv"));
    manifest.year_label = "synthetic".into();
    if region {
        manifest.region_filter = Some(americas_codes());
    }
    RunConfig {
        manifest,
        weight: WeightKind::Trade,
        method: Some(MethodSpec::pwp(1.0).unwrap()),
        output_dir: out.to_path_buf(),
        output_format: OutputFormat::Csv,
    }
}

fn snapshot(paths: &[std::path::PathBuf]) -> Vec<(String, Vec<u8>)> {
    paths
        .iter()
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(p).unwrap(),
            )
        })
        .collect()
}

fn determinism_and_runtime() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let data = tmp.path().join("americas");
    let (countries, flows) = synthetic_world(0xA10, 60, true, false);
    write_dataset(&data, &countries, &flows);

    let mut runs = Vec::new();
    for run in 0..2 {
        let cfg = config(&data, &tmp.path().join(format!("run{run}")), true);
        runs.push(snapshot(&cmd_matrix(&cfg).map_err(|e| e.to_string())?));
    }
    let identical = runs[0] == runs[1];
    let header_cols = String::from_utf8_lossy(&runs[0][0].1)
        .lines()
        .next()
        .map_or(0, |l| l.split(',').count() - 1);

    let big = tmp.path().join("world");
    let (countries, flows) = synthetic_world(0xA11, 177, false, false);
    write_dataset(&big, &countries, &flows);
    let start = Instant::now();
    let out = tmp.path().join("world_out");
    let cfg = config(&big, &out, false);
    cmd_matrix(&cfg).map_err(|e| e.to_string())?;
    let r1 = cmd_rank(&cfg, Criterion::Influence).map_err(|e| e.to_string())?;
    let r2 = cmd_rank(&cfg, Criterion::Dependence).map_err(|e| e.to_string())?;
    cmd_plane(&cfg).map_err(|e| e.to_string())?;
    cmd_export_dot(&cfg, 0.0).map_err(|e| e.to_string())?;
    cmd_compare(&r1, &r2).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed().as_secs_f64();

    check(
        identical && header_cols == 35 && elapsed < 5.0,
        format!(
            "35-country outputs identical: {identical} ({} files, {header_cols} columns); \
             n=177 pipeline {elapsed:.2} s",
            runs[0].len()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("bilateral golden values", golden_values),
        ("matrix exponential vs Taylor oracle", expm_oracle),
        ("PWP analytic suite", pwp_analytic),
        ("PWP path positivity", path_positivity),
        ("PageRank contract", pagerank_contract),
        ("heat kernel factorization", heat_factorization),
        ("weight normalization", weight_normalization),
        ("ranking distance", ranking_metric),
        ("indirect influence triangulation", triangulation),
        ("end-to-end determinism and runtime", determinism_and_runtime),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let ms = start.elapsed().as_secs_f64() * 1e3;
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2} {name}: {detail} [{ms:.0} ms]", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {:>2} {name}: {detail} [{ms:.0} ms]", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
