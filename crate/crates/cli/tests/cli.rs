use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use adrcm::io;
use adrcm::montecarlo::{NullFits, TestReport};

fn adrcm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_adrcm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn first_line(p: &Path) -> String {
    fs::read_to_string(p).unwrap().lines().next().unwrap_or_default().to_string()
}

#[test]
fn generate_writes_readable_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = adrcm(&["generate", "--gamma", "0.5", "--size", "100", "--seed", "3", "--out", path(dir.path())]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rep = dir.path().join("replication-0");
    assert_eq!(first_line(&rep.join("vertices.csv")), "id,position,birth");
    assert_eq!(first_line(&rep.join("edges.csv")), "younger_id,older_id,protected");
    assert_eq!(first_line(&rep.join("simplices.csv")), "dim,vertices");
    assert!(!dir.path().join("replication-1").exists());

    let vertices = io::read_vertices_csv::<f64>(&rep.join("vertices.csv")).unwrap();
    let edges = io::read_edges_csv(&rep.join("edges.csv")).unwrap();
    let complex = io::read_simplices_csv(&rep.join("simplices.csv"), 2).unwrap();
    assert!(!vertices.is_empty());
    assert_eq!(complex.count(0), vertices.len());
    assert_eq!(complex.count(1), edges.len());
    assert!(complex.is_face_closed());
    assert!(vertices.iter().all(|v| (0.0..=100.0).contains(&v.position) && (0.0..1.0).contains(&v.birth)));
}

#[test]
fn generate_json_and_binary_layouts() {
    let dir = tempfile::tempdir().unwrap();
    let out = adrcm(&[
        "generate", "--gamma", "0.4", "--size", "80", "--replications", "2", "--format", "json", "--binary", "--out",
        path(dir.path()),
    ]);
    assert_eq!(code(&out), 0);
    for k in 0..2 {
        let rep = dir.path().join(format!("replication-{k}"));
        let net: serde_json::Value = io::read_json(&rep.join("network.json")).unwrap();
        let edges = io::read_edges_bin(&rep.join("edges.bin")).unwrap();
        assert_eq!(net["edges"].as_array().unwrap().len(), edges.len());
        let vertices = io::read_vertices_bin::<f64>(&rep.join("vertices.bin")).unwrap();
        assert_eq!(net["vertices"].as_array().unwrap().len(), vertices.len());
        assert_eq!(net["simplices"][1].as_array().unwrap().len(), edges.len());
    }
}

fn tree_bytes(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                files.push((rel, fs::read(&p).unwrap()));
            }
        }
    }
    files.sort();
    files
}

#[test]
fn same_seed_gives_identical_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    let run = |dir: &Path, seed: &str| {
        adrcm(&[
            "generate", "--gamma", "0.6", "--size", "300", "--replications", "3", "--seed", seed, "--out", path(dir),
        ])
    };
    assert_eq!(code(&run(a.path(), "11")), 0);
    assert_eq!(code(&run(b.path(), "11")), 0);
    assert_eq!(code(&run(c.path(), "12")), 0);
    assert_eq!(tree_bytes(a.path()), tree_bytes(b.path()));
    assert_ne!(tree_bytes(a.path()), tree_bytes(c.path()));
}

#[test]
fn montecarlo_output_does_not_depend_on_threads() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let run = |dir: &Path, threads: &str| {
        adrcm(&[
            "montecarlo", "--gamma", "0.5", "--size", "400", "--replications", "24", "--seed", "5", "--threads",
            threads, "--statistic", "edge_count", "--statistic", "betti_1", "--statistic", "degrees:0,1", "--x-min",
            "5", "--out", path(dir),
        ])
    };
    assert_eq!(code(&run(a.path(), "1")), 0);
    assert_eq!(code(&run(b.path(), "4")), 0);
    assert_eq!(tree_bytes(a.path()), tree_bytes(b.path()));

    let d = a.path();
    for f in [
        "records.csv",
        "betti.csv",
        "nulls.json",
        "edge_count/linear_histograms.csv",
        "edge_count/normal/qq_plot.csv",
        "edge_count/normal/theoretical_pdf.csv",
        "edge_count/stable/qq_plot.csv",
        "edge_count/stable/theoretical_pdf.csv",
        "betti_1/stable/qq_plot.csv",
        "degrees_0_1/normal/qq_plot.csv",
    ] {
        assert!(d.join(f).is_file(), "missing {f}");
    }
    assert_eq!(first_line(&d.join("edge_count/linear_histograms.csv")), "bin_left_limit,value");
    assert_eq!(first_line(&d.join("edge_count/normal/qq_plot.csv")), "theoretical,empirical");
    let records = fs::read_to_string(d.join("records.csv")).unwrap();
    assert_eq!(records.lines().count(), 25);
    assert_eq!(io::read_betti_csv(&d.join("betti.csv")).unwrap().len(), 24);
    assert_eq!(io::read_qq_csv(&d.join("edge_count/stable/qq_plot.csv")).unwrap().len(), 24);
    let hist = io::read_histogram_csv(&d.join("edge_count/linear_histograms.csv")).unwrap();
    let mass: f64 = hist.0.windows(2).zip(&hist.1).map(|(w, p)| (w[1] - w[0]) * p).sum();
    assert!((mass - 1.0).abs() < 1e-9);
    let nulls: Vec<NullFits> = io::read_json(&d.join("nulls.json")).unwrap();
    assert_eq!(nulls.len(), 3);
    assert!(nulls[2].stable.is_err() && nulls[2].normal.is_ok());
}

#[test]
fn single_replication_records_failed_fits() {
    let dir = tempfile::tempdir().unwrap();
    let out = adrcm(&["montecarlo", "--gamma", "0.3", "--size", "100", "--replications", "1", "--out", path(dir.path())]);
    assert_eq!(code(&out), 0);
    let records = fs::read_to_string(dir.path().join("records.csv")).unwrap();
    assert_eq!(records.lines().count(), 2);
    let nulls: Vec<NullFits> = io::read_json(&dir.path().join("nulls.json")).unwrap();
    assert!(nulls[0].normal.is_err() && nulls[0].stable.is_err());
    assert!(!dir.path().join("edge_count/normal").exists());

    let test = adrcm(&["test", "--nulls", path(dir.path()), "--statistic", "edge_count", "--observed", "10"]);
    assert_eq!(code(&test), 3);
}

#[test]
fn palm_with_one_draw_counts_one_centre() {
    let dir = tempfile::tempdir().unwrap();
    let out = adrcm(&["palm", "--gamma", "0.7", "--draws", "1", "--seed", "9", "--out", path(dir.path())]);
    assert_eq!(code(&out), 0);
    let counts = io::read_value_counts_csv(&dir.path().join("degree_0_1/value_counts.csv"), 0, 1).unwrap();
    assert_eq!(counts.total(), 1);
    for (m, mp) in [(1, 2), (2, 3)] {
        assert!(dir.path().join(format!("degree_{m}_{mp}/value_counts.csv")).is_file());
    }
    let exps: serde_json::Value = io::read_json(&dir.path().join("exponents.json")).unwrap();
    assert_eq!(exps.as_array().unwrap().len(), 3);
}

#[test]
fn validation_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = path(dir.path());
    for args in [
        vec!["generate", "--gamma", "1.2", "--size", "10", "--out", o],
        vec!["generate", "--gamma", "0.5", "--out", o],
        vec!["generate", "--gamma", "0.5", "--size", "10", "--no-such-flag"],
        vec!["montecarlo", "--gamma", "0.5", "--size", "10", "--replications", "0", "--out", o],
        vec!["montecarlo", "--gamma", "0.5", "--size", "10", "--statistic", "vertices", "--out", o],
        vec!["montecarlo", "--gamma", "0.5", "--size", "10", "--threads", "0", "--out", o],
        vec!["palm", "--gamma", "0.5", "--statistic", "edge_count", "--out", o],
        vec!["test", "--observed", "1"],
        vec!["test", "--observed", "1", "--location", "0", "--scale", "-1"],
        vec!["frobnicate"],
    ] {
        assert_eq!(code(&adrcm(&args)), 2, "{args:?}");
    }
    assert_eq!(code(&adrcm(&["--help"])), 0);
}

#[test]
fn test_report_at_the_null_location() {
    for law in [&["--alpha", "1.5", "--skew", "0"][..], &[][..]] {
        let dir = tempfile::tempdir().unwrap();
        let mut args = vec!["test", "--observed", "250", "--location", "250", "--scale", "10", "--out", path(dir.path())];
        args.extend_from_slice(law);
        assert_eq!(code(&adrcm(&args)), 0);
        let report: TestReport = io::read_json(&dir.path().join("report.json")).unwrap();
        assert!((report.p_value.two_sided - 1.0).abs() < 1e-9, "{law:?}");
        assert!(!report.rejected);
    }
}

#[test]
fn cs_triangle_count_is_rejected() {
    let out = adrcm(&[
        "test", "--observed", "4055220", "--location", "18785263", "--scale", "504582", "--alpha", "1.39", "--skew",
        "1",
    ]);
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("p-value 0.0000"), "{stdout}");
    assert!(stdout.contains("rejected at the 5% level") && !stdout.contains("not rejected"));
}

#[test]
fn ingest_then_test_against_simulated_null() {
    let dir = tempfile::tempdir().unwrap();
    // q_j meet every r_k, giving degrees 18 (q) and 15 (r) above x_min = 10;
    // each line is a distinct triangle.
    let corpus: String = (0..60).map(|i| format!("p{i},q{},r{}\n", i % 5, i % 6)).collect();
    let file = dir.path().join("corpus.csv");
    fs::write(&file, corpus).unwrap();
    let out_dir = dir.path().join("ingest");
    let out = adrcm(&["ingest", path(&file), "--out", path(&out_dir)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["summary.json", "exponents.json", "fit.json", "params.json", "degree_0_1/value_counts.csv"] {
        assert!(out_dir.join(f).is_file(), "missing {f}");
    }
    let test_dir = dir.path().join("test");
    let out = adrcm(&[
        "test", "--dataset", path(&out_dir.join("summary.json")), "--params", path(&out_dir.join("params.json")),
        "--replications", "30", "--law", "normal", "--out", path(&test_dir),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: TestReport = io::read_json(&test_dir.join("report.json")).unwrap();
    assert_eq!(report.observed, 60.0);
    let summary: serde_json::Value = io::read_json(&out_dir.join("summary.json")).unwrap();
    assert_eq!(summary["simplex_counts"], serde_json::json!([71, 150, 60]));
}

#[test]
fn ingest_of_a_single_document_is_not_fittable() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("one.csv");
    fs::write(&file, "Ada,Grace,Edsger\n").unwrap();
    let out = adrcm(&["ingest", path(&file), "--out", path(dir.path())]);
    assert_eq!(code(&out), 3);
    assert!(dir.path().join("summary.json").is_file());
    assert!(!dir.path().join("params.json").exists());
}

#[test]
fn malformed_corpus_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.csv");
    fs::write(&file, "A,B\n\nC,D\n").unwrap();
    let out = adrcm(&["ingest", path(&file), "--out", path(dir.path())]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains(":2:"));
}

/// Mean and standard deviation of the edge count on `[0, n]` with clipped
/// connection intervals: `Var S = E S + E sum_y deg(y) (deg(y) - 1)` with
/// Poisson in- and out-degrees.
fn window_edge_count_moments(beta: f64, gamma: f64, n: f64) -> (f64, f64) {
    let clipped = |x: f64, r: f64| (x + r).min(n) - (x - r).max(0.0);
    let log_grid = |lo: f64, hi: f64, k: usize| -> Vec<f64> {
        (0..k).map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64).collect()
    };
    let trapz = |xs: &[f64], ys: &[f64]| -> f64 {
        xs.windows(2).zip(ys.windows(2)).map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1])).sum()
    };
    let radius = |u: f64, v: f64| 0.5 * beta * u.powf(-gamma) * v.powf(gamma - 1.0);
    let xs = log_grid(0.0, n / 2.0, 801);
    let ts = log_grid(1e-9f64.ln(), 0.0, 240);
    let (mut first, mut second) = (Vec::new(), Vec::new());
    for &t in &ts {
        let b = t.exp();
        let inner_in = log_grid(t, 0.0, 160);
        let inner_out = log_grid(t + 1e-12f64.ln(), t, 220);
        let lam = |x: f64, grid: &[f64], older: bool| {
            let ys: Vec<f64> = grid
                .iter()
                .map(|&s| {
                    let w = s.exp();
                    let r = if older { radius(b, w) } else { radius(w, b) };
                    clipped(x, r) * w
                })
                .collect();
            trapz(grid, &ys)
        };
        let (mut l1, mut l2) = (Vec::new(), Vec::new());
        for &x in &xs {
            let (li, lo) = (lam(x, &inner_in, true), lam(x, &inner_out, false));
            l1.push(li);
            l2.push((li + lo).powi(2));
        }
        first.push(2.0 * trapz(&xs, &l1) * b);
        second.push(2.0 * trapz(&xs, &l2) * b);
    }
    let mean = trapz(&ts, &first);
    (mean, (mean + trapz(&ts, &second)).sqrt())
}

#[test]
fn edge_count_moments_oracle_matches_the_infinite_window_mean() {
    let (mean, sd) = window_edge_count_moments(1.0, 0.25, 1e4);
    assert!((mean / 13_333.33 - 1.0).abs() < 2e-3, "{mean}");
    assert!(sd > 0.0);
}

#[test]
fn generated_edge_count_is_within_four_sigma() {
    let dir = tempfile::tempdir().unwrap();
    let out = adrcm(&["generate", "--gamma", "0.7", "--size", "10000", "--max-dim", "1", "--seed", "1", "--out", path(dir.path())]);
    assert_eq!(code(&out), 0);
    let edges = io::read_edges_csv(&dir.path().join("replication-0/edges.csv")).unwrap();
    let (_, sd) = window_edge_count_moments(1.0, 0.7, 1e4);
    let expected = 1e4 / (1.0 - 0.7);
    assert!(
        (edges.len() as f64 - expected).abs() <= 4.0 * sd,
        "{} edges, sd {sd}",
        edges.len()
    );
}
