#![allow(dead_code)]

use std::path::PathBuf;

use adrcm::ingest::{
    build_dataset_complex, dataset_summary, fit_model_params, load_corpus, vertex_degrees, CorpusFormat,
    DatasetSummary,
};
use adrcm::stats::fit_power_law;
use serde::Deserialize;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

#[derive(Debug, Deserialize)]
pub struct GoldenFit {
    pub x_min: u64,
    pub n_tail: u64,
    pub a_hat: f64,
    pub gamma: f64,
    pub beta: f64,
}

/// Summary recorded by `tests/fixtures/make_golden.py`.
#[derive(Debug, Deserialize)]
pub struct Golden {
    pub authors: usize,
    pub documents: usize,
    pub dropped_documents: usize,
    pub total_authors: usize,
    pub components: usize,
    pub largest_component_size: usize,
    pub simplex_counts: Vec<usize>,
    pub mean_vertex_degree: f64,
    pub betti_0: u64,
    pub betti_1: u64,
    pub authors_per_document: std::collections::BTreeMap<String, u64>,
    pub vertex_degree_counts: Vec<(u64, u64)>,
    pub vertex_fit: Option<GoldenFit>,
}

pub fn golden(name: &str) -> Golden {
    let text = std::fs::read_to_string(fixture(&format!("{name}.golden.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

/// Differences between the pipeline's output for a fixture corpus and its
/// golden summary; empty when they agree.
pub fn golden_mismatches(name: &str, format: CorpusFormat) -> Vec<String> {
    let ext = if format == CorpusFormat::Json { "json" } else { "csv" };
    let corpus = load_corpus(&fixture(&format!("{name}.{ext}")), format).unwrap();
    let complex = build_dataset_complex(&corpus, 20, 2).unwrap();
    let s: DatasetSummary = dataset_summary(&complex, &corpus, 20).unwrap();
    let g = golden(name);
    let mut bad = Vec::new();
    let mut check = |what: &str, ok: bool, got: String, want: String| {
        if !ok {
            bad.push(format!("{name}.{ext} {what}: got {got}, golden {want}"));
        }
    };
    macro_rules! eq {
        ($what:expr, $got:expr, $want:expr) => {{
            let (got, want) = (&$got, &$want);
            check($what, got == want, format!("{got:?}"), format!("{want:?}"))
        }};
    }
    eq!("authors", s.authors, g.authors);
    eq!("documents", s.documents, g.documents);
    eq!("dropped", s.metadata.dropped_documents, g.dropped_documents);
    eq!("total authors", s.metadata.total_authors, g.total_authors);
    eq!("components", s.components, g.components);
    eq!("largest component", s.largest_component_size, g.largest_component_size);
    eq!("simplex counts", s.simplex_counts, g.simplex_counts);
    eq!("betti_0", s.betti_0, g.betti_0);
    eq!("betti_1", s.betti_1, g.betti_1);
    check(
        "mean degree",
        (s.mean_vertex_degree - g.mean_vertex_degree).abs() < 1e-12,
        s.mean_vertex_degree.to_string(),
        g.mean_vertex_degree.to_string(),
    );
    let apd: std::collections::BTreeMap<String, u64> =
        s.authors_per_document.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    eq!("authors per document", apd, g.authors_per_document);

    let degrees = vertex_degrees(&complex).unwrap();
    let mut counts = std::collections::BTreeMap::new();
    for d in &degrees {
        *counts.entry(*d).or_insert(0u64) += 1;
    }
    eq!("vertex degree counts", counts.into_iter().collect::<Vec<_>>(), g.vertex_degree_counts);

    match (fit_power_law::<f64>(&degrees, 10), &g.vertex_fit) {
        (Ok(fit), Some(gf)) => {
            eq!("n_tail", fit.n_tail, gf.n_tail);
            check(
                "a_hat",
                (fit.a_hat - gf.a_hat).abs() < 1e-12,
                fit.a_hat.to_string(),
                gf.a_hat.to_string(),
            );
            let p = fit_model_params(&s, &fit).unwrap();
            check(
                "calibrated params",
                (p.gamma - gf.gamma).abs() < 1e-12 && (p.beta - gf.beta).abs() < 1e-12 && gf.x_min == 10,
                format!("({}, {})", p.gamma, p.beta),
                format!("({}, {})", gf.gamma, gf.beta),
            );
        }
        (Err(_), None) => {}
        (got, want) => bad.push(format!("{name}.{ext} vertex fit: got {got:?}, golden {want:?}")),
    }
    bad
}
