use std::fs;
use std::path::{Path, PathBuf};

use adrcm::complex::{clique_complex, generalized_degrees};
use adrcm::ingest::{
    build_dataset_complex, dataset_summary, fit_model_params, load_corpus, CorpusFormat, DatasetSummary,
};
use adrcm::io;
use adrcm::montecarlo::{
    fit_nulls, hypothesis_test, in_pool, plot_data, run_palm, run_replications, simulate_network,
    value_histogram, NullFits, ReplicationConfig, Statistic, TestReport,
};
use adrcm::stats::{fit_power_law_counts, NullParams};
use adrcm::{
    DegreeDistribution, Edge, Error, ModelParams, NormalParams, PowerLawFit, Result, StableParams, Vertex,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Format, GenerateArgs, IngestArgs, Law, MontecarloArgs, ModelArgs, PalmArgs, TestArgs};

const PDF_POINTS: usize = 200;
const PALM_PAIRS: [(usize, usize); 3] = [(0, 1), (1, 2), (2, 3)];

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

impl ModelArgs {
    fn params(&self, size_required: bool) -> Result<ModelParams> {
        let size = match self.size {
            Some(n) => n,
            None if size_required => return Err(invalid("--size is required")),
            None => 1.0,
        };
        Ok(ModelParams::new(self.beta, self.gamma, size)?
            .with_profile_a(self.profile_a)?
            .with_eta(self.eta)?
            .with_torus(self.torus))
    }
}

/// Directory name for a statistic's plotting artifacts.
fn statistic_dir(statistic: Statistic) -> String {
    match statistic {
        Statistic::Degrees { m, m_prime } => format!("degrees_{m}_{m_prime}"),
        s => s.to_string(),
    }
}

fn degree_dir(m: usize, m_prime: usize) -> String {
    format!("degree_{m}_{m_prime}")
}

#[derive(Serialize)]
struct GenerateRun<'a> {
    params: &'a ModelParams,
    replications: usize,
    seed: u64,
    max_dim: usize,
}

#[derive(Serialize)]
struct NetworkJson<'a> {
    replication: u64,
    vertices: &'a [Vertex],
    edges: &'a [Edge],
    /// Simplices by dimension.
    simplices: Vec<Vec<&'a [u32]>>,
}

pub fn generate(args: &GenerateArgs) -> Result<()> {
    let params = args.model.params(true)?;
    if args.replications < 1 {
        return Err(invalid("at least one replication is required"));
    }
    if args.max_dim < 1 {
        return Err(invalid("--max-dim must be at least 1"));
    }
    create_dir(&args.out)?;
    io::write_json(
        &args.out.join("run.json"),
        &GenerateRun {
            params: &params,
            replications: args.replications,
            seed: args.seed,
            max_dim: args.max_dim,
        },
    )?;
    let job = || {
        (0..args.replications as u64)
            .into_par_iter()
            .map(|k| {
                let net = simulate_network(&params, args.seed, k, args.max_dim)?;
                let complex = match net.complex {
                    Some(c) => c,
                    None => clique_complex(&net.edges, &net.vertices, args.max_dim)?,
                };
                let dir = args.out.join(format!("replication-{k}"));
                create_dir(&dir)?;
                match args.format {
                    Format::Csv => {
                        io::write_vertices_csv(&dir.join("vertices.csv"), &net.vertices)?;
                        io::write_edges_csv(&dir.join("edges.csv"), &net.edges)?;
                        io::write_simplices_csv(&dir.join("simplices.csv"), &complex)?;
                    }
                    Format::Json => io::write_json(
                        &dir.join("network.json"),
                        &NetworkJson {
                            replication: k,
                            vertices: &net.vertices,
                            edges: net.edges.edges(),
                            simplices: (0..=complex.max_dim()).map(|d| complex.iter(d).collect()).collect(),
                        },
                    )?,
                }
                if args.binary {
                    io::write_vertices_bin(&dir.join("vertices.bin"), &net.vertices)?;
                    io::write_edges_bin(&dir.join("edges.bin"), &net.edges)?;
                }
                Ok(complex.f_vector())
            })
            .collect::<Result<Vec<_>>>()
    };
    for (k, f) in in_pool(args.threads, job)?.iter().enumerate() {
        println!("replication {k}: simplex counts {f:?}");
    }
    Ok(())
}

pub fn montecarlo(args: &MontecarloArgs) -> Result<()> {
    let params = args.model.params(true)?;
    let mut config = ReplicationConfig::new(params, args.replications, args.seed);
    config.x_min = args.x_min;
    config.threads = args.threads;
    if let Some(d) = args.max_dim {
        config.max_dim = d;
    }
    for &s in &args.statistic {
        config = config.require(s);
    }
    config.validate()?;
    let summary = run_replications(&config)?;
    create_dir(&args.out)?;
    match args.format {
        Format::Csv => io::write_records_csv(&args.out.join("records.csv"), &summary.records)?,
        Format::Json => io::write_json(&args.out.join("summary.json"), &summary)?,
    }
    if config.betti {
        let rows = summary
            .records
            .iter()
            .filter_map(|r| r.betti.clone().map(|b| (r.replication, b)))
            .collect();
        io::write_betti_csv(&args.out.join("betti.csv"), &rows)?;
    }
    let mut fits = Vec::new();
    for &statistic in &args.statistic {
        let values = summary.values(statistic);
        let nulls = fit_nulls(&values, statistic, params.gamma);
        write_null_artifacts(&args.out.join(statistic_dir(statistic)), &values, &nulls)?;
        report_nulls(&nulls);
        fits.push(nulls);
    }
    io::write_json(&args.out.join("nulls.json"), &fits)
}

fn write_null_artifacts(dir: &Path, values: &[f64], nulls: &NullFits) -> Result<()> {
    create_dir(dir)?;
    match value_histogram(values) {
        Ok(h) => io::write_histogram_csv(&dir.join("linear_histograms.csv"), &h, None)?,
        Err(e) => eprintln!("{}: no histogram: {e}", nulls.statistic),
    }
    let laws: [(&str, Option<NullParams>); 2] = [
        ("normal", nulls.normal.as_ref().ok().map(|n| NullParams::Normal(*n))),
        ("stable", nulls.stable.as_ref().ok().map(|s| NullParams::Stable(*s))),
    ];
    for (name, law) in laws {
        let Some(law) = law else { continue };
        let plot = match plot_data(values, law.distribution()?.as_ref(), PDF_POINTS) {
            Ok(p) => p,
            Err(e) => {
                eprintln!("{}: no {name} plotting data: {e}", nulls.statistic);
                continue;
            }
        };
        let sub = dir.join(name);
        create_dir(&sub)?;
        io::write_qq_csv(&sub.join("qq_plot.csv"), &plot.qq, None)?;
        io::write_theoretical_pdf_csv(&sub.join("theoretical_pdf.csv"), &plot.pdf, None)?;
    }
    Ok(())
}

fn report_nulls(nulls: &NullFits) {
    let fmt = |x: Option<f64>| x.map_or("n/a".to_string(), |v| format!("{v:.4}"));
    println!(
        "{}: {} samples, mean {}, skewness {}",
        nulls.statistic,
        nulls.samples,
        fmt(nulls.mean),
        fmt(nulls.skewness)
    );
    match &nulls.normal {
        Ok(n) => println!("  normal: mean {:.4}, std {:.4}", n.mean, n.std),
        Err(e) => eprintln!("  normal fit failed: {e}"),
    }
    match &nulls.stable {
        Ok(s) => println!(
            "  stable: alpha {:.4}, skew {}, location {:.4}, scale {:.4}",
            s.alpha, s.skew, s.location, s.scale
        ),
        Err(e) => eprintln!("  stable fit failed: {e}"),
    }
}

#[derive(Serialize)]
struct DegreeFit {
    m: usize,
    m_prime: usize,
    simplices: u64,
    mean_degree: f64,
    fit: Option<PowerLawFit>,
    error: Option<String>,
}

fn degree_fit(dist: &DegreeDistribution, x_min: u64) -> DegreeFit {
    let fit = fit_power_law_counts(dist, x_min);
    DegreeFit {
        m: dist.m,
        m_prime: dist.m_prime,
        simplices: dist.total(),
        mean_degree: dist.mean(),
        error: fit.as_ref().err().map(|e| e.to_string()),
        fit: fit.ok(),
    }
}

fn degree_pairs(statistics: &[Statistic], default: &[(usize, usize)]) -> Result<Vec<(usize, usize)>> {
    if statistics.is_empty() {
        return Ok(default.to_vec());
    }
    statistics
        .iter()
        .map(|s| match *s {
            Statistic::Degrees { m, m_prime } => Ok((m, m_prime)),
            other => Err(invalid(format!("{other} is not a degree statistic"))),
        })
        .collect()
}

pub fn palm(args: &PalmArgs) -> Result<()> {
    let params = args.model.params(false)?;
    let pairs = degree_pairs(&args.statistic, &PALM_PAIRS)?;
    let summary = run_palm(&params, args.replications, args.seed, &pairs, args.threads)?;
    create_dir(&args.out)?;
    let mut fits = Vec::new();
    for dist in &summary.distributions {
        let dir = args.out.join(degree_dir(dist.m, dist.m_prime));
        create_dir(&dir)?;
        io::write_value_counts_csv(&dir.join("value_counts.csv"), dist)?;
        let fit = degree_fit(dist, args.x_min);
        match (&fit.fit, &fit.error) {
            (Some(f), _) => println!(
                "deg_{} of {}-simplices: mean {:.4}, pdf exponent {:.4} ({} in tail)",
                dist.m_prime, dist.m, fit.mean_degree, f.a_hat, f.n_tail
            ),
            (None, e) => eprintln!(
                "deg_{} of {}-simplices: mean {:.4}, no fit: {}",
                dist.m_prime,
                dist.m,
                fit.mean_degree,
                e.as_deref().unwrap_or("")
            ),
        }
        fits.push(fit);
    }
    io::write_json(&args.out.join("exponents.json"), &fits)?;
    if args.format == Format::Json {
        io::write_json(&args.out.join("palm.json"), &summary)?;
    }
    Ok(())
}

fn observed_value(args: &TestArgs) -> Result<f64> {
    if let Some(x) = args.observed {
        return Ok(x);
    }
    let Some(path) = &args.dataset else {
        return Err(invalid("either --observed or --dataset is required"));
    };
    let summary: DatasetSummary = io::read_json(path)?;
    let value = match args.statistic {
        Statistic::EdgeCount => Some(summary.edge_count() as f64),
        Statistic::TriangleCount => summary.triangle_count().map(|t| t as f64),
        Statistic::Betti1 => Some(summary.betti_1 as f64),
        Statistic::Degrees { .. } => None,
    };
    value.ok_or_else(|| invalid(format!("{} is not available in {}", args.statistic, path.display())))
}

fn choose_null(fits: &[NullFits], statistic: Statistic, law: Law) -> Result<NullParams> {
    let fit = fits
        .iter()
        .find(|f| f.statistic == statistic)
        .ok_or_else(|| invalid(format!("no null was fitted for {statistic}")))?;
    match law {
        Law::Stable => fit.stable.clone().map(NullParams::Stable).map_err(Error::Fit),
        Law::Normal => fit.normal.clone().map(NullParams::Normal).map_err(Error::Fit),
    }
}

fn null_params(args: &TestArgs) -> Result<NullParams> {
    if let (Some(location), Some(scale)) = (args.location, args.scale) {
        return Ok(match args.alpha {
            Some(alpha) => NullParams::Stable(StableParams::new(
                alpha,
                args.skew.or(args.statistic.null_skew()).unwrap_or(0.0),
                location,
                scale,
            )?),
            None => NullParams::Normal(NormalParams::new(location, scale)?),
        });
    }
    if let Some(path) = &args.nulls {
        let path: PathBuf = if path.is_dir() { path.join("nulls.json") } else { path.clone() };
        let fits: Vec<NullFits> = io::read_json(&path)?;
        return choose_null(&fits, args.statistic, args.law);
    }
    let Some(path) = &args.params else {
        return Err(invalid("a null is required: --nulls, --params or --location/--scale"));
    };
    let params: ModelParams = io::read_json(path)?;
    let mut config = ReplicationConfig::new(params, args.replications, args.seed).require(args.statistic);
    config.threads = args.threads;
    let summary = run_replications(&config)?;
    let values = summary.values(args.statistic);
    let fits = fit_nulls(&values, args.statistic, params.gamma);
    report_nulls(&fits);
    choose_null(&[fits], args.statistic, args.law)
}

pub fn test(args: &TestArgs) -> Result<()> {
    let observed = observed_value(args)?;
    let null = null_params(args)?;
    let report: TestReport = hypothesis_test(args.statistic, observed, &null)?;
    println!(
        "{}: observed {}, p-value {:.4} (lower {:.4}, upper {:.4}), {} at the {}% level",
        report.statistic,
        report.observed,
        report.p_value.two_sided,
        report.p_value.lower,
        report.p_value.upper,
        if report.rejected { "rejected" } else { "not rejected" },
        report.level * 100.0
    );
    if let Some(out) = &args.out {
        create_dir(out)?;
        io::write_json(&out.join("report.json"), &report)?;
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct IngestFit {
    x_min: u64,
    vertex_fit: Option<PowerLawFit>,
    params: Option<ModelParams>,
    error: Option<String>,
}

pub fn ingest(args: &IngestArgs) -> Result<()> {
    let format = args.corpus_format.unwrap_or_else(|| CorpusFormat::from_path(&args.corpus));
    let corpus = load_corpus(&args.corpus, format)?;
    let complex = build_dataset_complex(&corpus, args.max_interaction_dim, args.max_dim)?;
    let summary = dataset_summary(&complex, &corpus, args.max_interaction_dim)?;
    create_dir(&args.out)?;
    io::write_json(&args.out.join("summary.json"), &summary)?;
    println!(
        "{} authors, {} documents ({} dropped), {} components (largest {}), simplex counts {:?}, mean degree {:.4}",
        summary.authors,
        summary.documents,
        summary.metadata.dropped_documents,
        summary.components,
        summary.largest_component_size,
        summary.simplex_counts,
        summary.mean_vertex_degree
    );
    let mut fits = Vec::new();
    for m_prime in 1..=complex.max_dim() {
        let m = m_prime - 1;
        let dist = generalized_degrees(&complex, m, m_prime)?;
        let dir = args.out.join(degree_dir(m, m_prime));
        create_dir(&dir)?;
        io::write_value_counts_csv(&dir.join("value_counts.csv"), &dist)?;
        fits.push(degree_fit(&dist, args.x_min));
    }
    io::write_json(&args.out.join("exponents.json"), &fits)?;

    let vertex_counts = generalized_degrees(&complex, 0, 1)?;
    let fitted = fit_power_law_counts(&vertex_counts, args.x_min)
        .and_then(|v| Ok((v, fit_model_params(&summary, &v)?)));
    let record = IngestFit {
        x_min: args.x_min,
        vertex_fit: fits[0].fit,
        params: fitted.as_ref().ok().map(|f| f.1),
        error: fitted.as_ref().err().map(|e| e.to_string()),
    };
    io::write_json(&args.out.join("fit.json"), &record)?;
    let (vertex, params) = fitted.inspect_err(|_| eprintln!("dataset is not fittable"))?;
    io::write_json(&args.out.join("params.json"), &params)?;
    println!(
        "vertex pdf exponent {:.4}, gamma {:.4}, beta {:.4}",
        vertex.a_hat, params.gamma, params.beta
    );
    Ok(())
}
