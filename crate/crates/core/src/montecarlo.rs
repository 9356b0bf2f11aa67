//! Replicated simulation of finite networks and null-distribution fits.
//!
//! Replication `k` of a run with master seed `s` draws everything from the
//! stream seeded by `derive_seed(s, k)`, so its results do not depend on the
//! thread count or on which other replications are run.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{clique_complex, generalized_degree_values, palm_complex, palm_degree_values, DegreeDistribution};
use crate::error::{Error, Result};
use crate::complex::SimplicialComplex;
use crate::graph::{build_model_edges, EdgeSet};
use crate::homology::{betti_numbers, BettiVector};
use crate::point_process::{sample_finite, sample_palm, ModelParams, Vertex};
use crate::rng::{derive_seed, replication_rng};
use crate::stats::descriptive::{skewness, sorted};
use crate::stats::{
    fit_normal, fit_power_law, fit_stable_location_scale, histogram, p_value, qq_data, qq_summary, stable_alpha,
    Histogram, NormalParams, NullDistribution, NullParams, PValue, QqPoint, QqSummary, StableDistribution,
    StableParams,
};

/// Per-replication quantity a null distribution is built for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    EdgeCount,
    TriangleCount,
    Betti1,
    /// Fitted power-law exponent of `deg_{m'}` over the `m`-simplices.
    Degrees { m: usize, m_prime: usize },
}

impl Statistic {
    /// Skewness fixed for the stable null; `None` when no stable null is
    /// fitted.
    pub fn null_skew(&self) -> Option<f64> {
        match self {
            Statistic::EdgeCount | Statistic::TriangleCount => Some(1.0),
            Statistic::Betti1 => Some(-1.0),
            Statistic::Degrees { .. } => None,
        }
    }

    /// Smallest clique dimension needed to evaluate the statistic.
    pub fn required_dim(&self) -> usize {
        match self {
            Statistic::EdgeCount => 1,
            Statistic::TriangleCount | Statistic::Betti1 => 2,
            Statistic::Degrees { m_prime, .. } => (*m_prime).max(1),
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statistic::EdgeCount => f.write_str("edge_count"),
            Statistic::TriangleCount => f.write_str("triangle_count"),
            Statistic::Betti1 => f.write_str("betti_1"),
            Statistic::Degrees { m, m_prime } => write!(f, "degrees:{m},{m_prime}"),
        }
    }
}

impl FromStr for Statistic {
    type Err = Error;

    /// Accepts `edge_count`, `triangle_count`, `betti_1` and `degrees:m,m'`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edge_count" => Ok(Statistic::EdgeCount),
            "triangle_count" => Ok(Statistic::TriangleCount),
            "betti_1" => Ok(Statistic::Betti1),
            _ => {
                let dims = s
                    .strip_prefix("degrees:")
                    .and_then(|r| r.split_once(','))
                    .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)));
                match dims {
                    Some((m, m_prime)) if m < m_prime => Ok(Statistic::Degrees { m, m_prime }),
                    _ => Err(Error::invalid(format!(
                        "unknown statistic '{s}' (expected edge_count, triangle_count, betti_1 or degrees:m,m')"
                    ))),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationConfig {
    pub params: ModelParams<f64>,
    pub replications: usize,
    pub seed: u64,
    /// Highest clique dimension built.
    pub max_dim: usize,
    pub x_min: u64,
    /// `(m, m')` pairs whose degree exponents are fitted per replication.
    pub degree_pairs: Vec<(usize, usize)>,
    pub betti: bool,
    /// Worker threads; `None` uses the global pool. Not serialized, since
    /// results do not depend on it.
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl ReplicationConfig {
    pub fn new(params: ModelParams<f64>, replications: usize, seed: u64) -> Self {
        ReplicationConfig {
            params,
            replications,
            seed,
            max_dim: 1,
            x_min: crate::stats::X_MIN_SIMULATION,
            degree_pairs: Vec::new(),
            betti: false,
            threads: None,
        }
    }

    /// Extends the configuration so that `statistic` is recorded.
    pub fn require(mut self, statistic: Statistic) -> Self {
        self.max_dim = self.max_dim.max(statistic.required_dim());
        match statistic {
            Statistic::Betti1 => self.betti = true,
            Statistic::Degrees { m, m_prime } if !self.degree_pairs.contains(&(m, m_prime)) => {
                self.degree_pairs.push((m, m_prime))
            }
            _ => {}
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate_relaxed()?;
        if self.replications < 1 {
            return Err(Error::invalid("at least one replication is required"));
        }
        if self.max_dim < 1 {
            return Err(Error::invalid("max_dim must be at least 1"));
        }
        if self.betti && self.max_dim < 2 {
            return Err(Error::invalid("Betti numbers need max_dim >= 2"));
        }
        if let Some(&(m, mp)) = self.degree_pairs.iter().find(|&&(m, mp)| m >= mp || mp > self.max_dim) {
            return Err(Error::invalid(format!(
                "degree pair ({m},{mp}) needs m < m' <= max_dim = {}",
                self.max_dim
            )));
        }
        if self.threads == Some(0) {
            return Err(Error::invalid("thread count must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentRecord {
    pub m: usize,
    pub m_prime: usize,
    /// `None` when no degree reaches `x_min`.
    pub a_hat: Option<f64>,
    pub n_tail: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRecord {
    pub replication: u64,
    pub seed: u64,
    pub vertices: u64,
    pub edge_count: u64,
    pub triangle_count: Option<u64>,
    pub betti: Option<BettiVector>,
    pub exponents: Vec<ExponentRecord>,
}

impl ReplicationRecord {
    pub fn value(&self, statistic: Statistic) -> Option<f64> {
        match statistic {
            Statistic::EdgeCount => Some(self.edge_count as f64),
            Statistic::TriangleCount => self.triangle_count.map(|t| t as f64),
            Statistic::Betti1 => self.betti.as_ref().and_then(|b| b.get(1)).map(|b| b as f64),
            Statistic::Degrees { m, m_prime } => self
                .exponents
                .iter()
                .find(|e| e.m == m && e.m_prime == m_prime)
                .and_then(|e| e.a_hat),
        }
    }

    pub fn exponent(&self, m: usize, m_prime: usize) -> Option<f64> {
        self.value(Statistic::Degrees { m, m_prime })
    }
}

/// One simulated finite network.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub vertices: Vec<Vertex<f64>>,
    pub edges: EdgeSet,
    /// Clique complex up to the requested dimension; `None` when only edges
    /// were asked for.
    pub complex: Option<SimplicialComplex>,
}

/// Draws the network of replication `index` with master seed `seed`.
pub fn simulate_network(params: &ModelParams<f64>, seed: u64, index: u64, max_dim: usize) -> Result<Network> {
    let mut rng = replication_rng(seed, index);
    let vertices = sample_finite(params, &mut rng)?;
    let edges = build_model_edges(&vertices, params, &mut rng)?;
    let complex = if max_dim >= 2 {
        Some(clique_complex(&edges, &vertices, max_dim)?)
    } else {
        None
    };
    Ok(Network {
        vertices,
        edges,
        complex,
    })
}

/// Simulates replication `index` of `config`.
pub fn run_replication(config: &ReplicationConfig, index: u64) -> Result<ReplicationRecord> {
    let needs_complex = config.max_dim >= 2 || !config.degree_pairs.is_empty();
    let dim = if needs_complex { config.max_dim.max(2) } else { 1 };
    let net = simulate_network(&config.params, config.seed, index, dim)?;
    let mut record = ReplicationRecord {
        replication: index,
        seed: derive_seed(config.seed, index),
        vertices: net.vertices.len() as u64,
        edge_count: net.edges.len() as u64,
        triangle_count: None,
        betti: None,
        exponents: Vec::new(),
    };
    let Some(complex) = net.complex else {
        return Ok(record);
    };
    if config.max_dim >= 2 {
        record.triangle_count = Some(complex.count(2) as u64);
    }
    if config.betti {
        record.betti = Some(betti_numbers(&complex, 1)?);
    }
    for &(m, m_prime) in &config.degree_pairs {
        let values = generalized_degree_values(&complex, m, m_prime)?;
        let fit = fit_power_law::<f64>(&values, config.x_min).ok();
        record.exponents.push(ExponentRecord {
            m,
            m_prime,
            a_hat: fit.map(|f| f.a_hat),
            n_tail: fit.map_or(0, |f| f.n_tail),
        });
    }
    Ok(record)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationSummary {
    pub config: ReplicationConfig,
    pub records: Vec<ReplicationRecord>,
}

impl ReplicationSummary {
    /// Values of a statistic over the replications where it is defined.
    pub fn values(&self, statistic: Statistic) -> Vec<f64> {
        self.records.iter().filter_map(|r| r.value(statistic)).collect()
    }
}

/// Runs all replications, in parallel, ordered by index.
pub fn run_replications(config: &ReplicationConfig) -> Result<ReplicationSummary> {
    config.validate()?;
    let run = || {
        (0..config.replications as u64)
            .into_par_iter()
            .map(|k| run_replication(config, k))
            .collect::<Result<Vec<_>>>()
    };
    let records = in_pool(config.threads, run)?;
    Ok(ReplicationSummary {
        config: config.clone(),
        records,
    })
}

/// Runs `job` on a pool of `threads` workers, or on the global pool.
pub fn in_pool<R: Send>(threads: Option<usize>, job: impl FnOnce() -> Result<R> + Send) -> Result<R> {
    match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::invalid(format!("cannot start {t} worker threads: {e}")))?
            .install(job),
        None => job(),
    }
}

/// Generalized degrees of the simplices through the centres of independent
/// Palm draws. Draw `k` uses the stream seeded by `derive_seed(seed, k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PalmSummary {
    pub draws: u64,
    pub seed: u64,
    pub distributions: Vec<DegreeDistribution>,
}

impl PalmSummary {
    pub fn distribution(&self, m: usize, m_prime: usize) -> Option<&DegreeDistribution> {
        self.distributions.iter().find(|d| d.m == m && d.m_prime == m_prime)
    }
}

pub fn run_palm(
    params: &ModelParams<f64>,
    draws: u64,
    seed: u64,
    pairs: &[(usize, usize)],
    threads: Option<usize>,
) -> Result<PalmSummary> {
    params.validate_relaxed()?;
    if draws < 1 {
        return Err(Error::invalid("at least one Palm draw is required"));
    }
    if let Some(&(m, mp)) = pairs.iter().find(|&&(m, mp)| m > mp) {
        return Err(Error::invalid(format!("degree pair ({m},{mp}) needs m <= m'")));
    }
    let max_dim = pairs.iter().map(|p| p.1).max().unwrap_or(1).max(1);
    let empty = || pairs.iter().map(|&(m, mp)| DegreeDistribution::new(m, mp)).collect::<Vec<_>>();
    let merge = |mut a: Vec<DegreeDistribution>, b: Vec<DegreeDistribution>| {
        a.iter_mut().zip(&b).for_each(|(x, y)| x.merge(y));
        a
    };
    let job = || {
        (0..draws)
            .into_par_iter()
            .map(|k| {
                let mut rng = replication_rng(seed, k);
                let sample = sample_palm(params, None, &mut rng)?;
                let complex = palm_complex(&sample, params, max_dim, &mut rng)?;
                let mut dists = empty();
                for d in &mut dists {
                    d.extend(palm_degree_values(&complex, d.m, d.m_prime)?);
                }
                Ok(dists)
            })
            .try_fold(empty, |acc, d: Result<Vec<DegreeDistribution>>| Ok(merge(acc, d?)))
            .try_reduce(empty, |a, b| Ok(merge(a, b)))
    };
    Ok(PalmSummary {
        draws,
        seed,
        distributions: in_pool(threads, job)?,
    })
}

/// Normal and stable nulls fitted to the replicated values of a statistic,
/// with Q-Q comparisons. A fit that fails is recorded with its message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullFits {
    pub statistic: Statistic,
    pub samples: usize,
    pub mean: Option<f64>,
    pub skewness: Option<f64>,
    pub normal: std::result::Result<NormalParams<f64>, String>,
    pub stable: std::result::Result<StableParams<f64>, String>,
    pub normal_qq: Option<QqSummary>,
    pub stable_qq: Option<QqSummary>,
}

impl NullFits {
    /// The stable null when available, otherwise the normal one.
    pub fn preferred(&self) -> Option<NullParams> {
        match (&self.stable, &self.normal) {
            (Ok(s), _) => Some(NullParams::Stable(*s)),
            (_, Ok(n)) => Some(NullParams::Normal(*n)),
            _ => None,
        }
    }

    pub fn any_failed(&self) -> bool {
        self.normal.is_err() || self.stable.is_err()
    }
}

/// Fits the nulls. The stable law has `alpha = min(1/gamma, 2)` and the
/// statistic's fixed skewness.
pub fn fit_nulls(values: &[f64], statistic: Statistic, gamma: f64) -> NullFits {
    let message = |e: Error| match e {
        Error::Fit(m) => m,
        e => e.to_string(),
    };
    let normal = fit_normal(values).map_err(message);
    let stable = match statistic.null_skew() {
        Some(skew) => fit_stable_location_scale(values, stable_alpha(gamma), skew).map_err(message),
        None => Err(format!("no stable null is defined for {statistic}")),
    };
    let qq = |d: &dyn NullDistribution| qq_data(values, d).ok().map(|p| qq_summary(&p));
    let normal_qq = normal.as_ref().ok().and_then(|n| qq(n));
    let stable_qq = stable
        .as_ref()
        .ok()
        .and_then(|s| StableDistribution::new(s).ok())
        .and_then(|d| qq(&d));
    let enough = values.len() >= 2;
    NullFits {
        statistic,
        samples: values.len(),
        mean: (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64),
        skewness: enough.then(|| skewness(values)).filter(|s| s.is_finite()),
        normal,
        stable,
        normal_qq,
        stable_qq,
    }
}

/// Plotting data for one fitted null.
#[derive(Debug, Clone, PartialEq)]
pub struct NullPlotData {
    pub qq: Vec<QqPoint>,
    /// `(value, pdf)` over the histogram range.
    pub pdf: Vec<(f64, f64)>,
}

pub fn plot_data(values: &[f64], null: &dyn NullDistribution, points: usize) -> Result<NullPlotData> {
    let xs = sorted(values);
    let (lo, hi) = (xs[0], xs[xs.len() - 1]);
    let pad = 0.1 * (hi - lo).max(null.scale());
    let step = (hi - lo + 2.0 * pad) / (points.max(2) - 1) as f64;
    let pdf = (0..points.max(2))
        .map(|i| {
            let x = lo - pad + i as f64 * step;
            (x, null.pdf(x))
        })
        .collect();
    Ok(NullPlotData {
        qq: qq_data(values, null)?,
        pdf,
    })
}

pub fn value_histogram(values: &[f64]) -> Result<Histogram> {
    histogram(values)
}

/// Outcome of testing an observed statistic against a fitted null at the
/// 5% level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub statistic: Statistic,
    pub observed: f64,
    pub null: NullParams,
    pub p_value: PValue,
    pub level: f64,
    pub rejected: bool,
}

pub const TEST_LEVEL: f64 = 0.05;

pub fn hypothesis_test(statistic: Statistic, observed: f64, null: &NullParams) -> Result<TestReport> {
    let p = p_value(observed, null.distribution()?.as_ref());
    Ok(TestReport {
        statistic,
        observed,
        null: *null,
        p_value: p,
        level: TEST_LEVEL,
        rejected: p.two_sided < TEST_LEVEL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(reps: usize) -> ReplicationConfig {
        ReplicationConfig::new(ModelParams::new(1.0, 0.6, 500.0).unwrap(), reps, 42)
            .require(Statistic::TriangleCount)
            .require(Statistic::Betti1)
            .require(Statistic::Degrees { m: 0, m_prime: 1 })
    }

    #[test]
    fn statistic_names() {
        for s in [
            Statistic::EdgeCount,
            Statistic::TriangleCount,
            Statistic::Betti1,
            Statistic::Degrees { m: 1, m_prime: 2 },
        ] {
            assert_eq!(s.to_string().parse::<Statistic>().unwrap(), s);
        }
        assert!("degrees:2,1".parse::<Statistic>().is_err());
        assert!("vertices".parse::<Statistic>().is_err());
    }

    #[test]
    fn replications_are_independent_of_scheduling() {
        let all = run_replications(&config(6)).unwrap();
        assert_eq!(all.records.len(), 6);
        let single = run_replication(&config(6), 4).unwrap();
        assert_eq!(all.records[4], single);
        let mut one_thread = config(6);
        one_thread.threads = Some(1);
        assert_eq!(run_replications(&one_thread).unwrap().records, all.records);
        assert!(all.records.iter().all(|r| r.triangle_count.is_some() && r.betti.is_some()));
    }

    #[test]
    fn invalid_configs() {
        assert!(run_replications(&config(0)).unwrap_err().is_validation());
        let mut c = config(1);
        c.max_dim = 1;
        assert!(c.validate().is_err());
    }

    #[test]
    fn single_replication_fits_fail_gracefully() {
        let s = run_replications(&config(1)).unwrap();
        let fits = fit_nulls(&s.values(Statistic::EdgeCount), Statistic::EdgeCount, 0.6);
        assert_eq!(fits.samples, 1);
        assert!(fits.normal.is_err() && fits.stable.is_err());
        assert!(fits.preferred().is_none());
    }

    #[test]
    fn palm_counts_one_centre_per_draw() {
        let p = ModelParams::new(1.0, 0.5, 1.0).unwrap();
        let s = run_palm(&p, 200, 9, &[(0, 1), (1, 2)], None).unwrap();
        assert_eq!(s.distribution(0, 1).unwrap().total(), 200);
        let again = run_palm(&p, 200, 9, &[(0, 1), (1, 2)], Some(1)).unwrap();
        assert_eq!(s, again);
        let one = run_palm(&p, 1, 9, &[(0, 1)], None).unwrap();
        assert_eq!(one.distribution(0, 1).unwrap().total(), 1);
    }

    #[test]
    fn observed_location_is_not_rejected() {
        let null = NullParams::Stable(StableParams::new(1.5, 0.0, 100.0, 3.0).unwrap());
        let r = hypothesis_test(Statistic::TriangleCount, 100.0, &null).unwrap();
        assert!((r.p_value.two_sided - 1.0).abs() < 1e-9);
        assert!(!r.rejected);
    }
}
