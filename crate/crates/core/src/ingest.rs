//! Collaboration corpora: documents with author lists, turned into
//! simplicial complexes and summary tables.
//!
//! Two input formats are read. `csv-lines` has one document per line with
//! comma-separated author names (quoting follows CSV rules); `json` is an
//! array of arrays of names. Authors are identified by exact name.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::complex::{generalized_degree_values, SimplicialComplex};
use crate::error::{Error, Result};
use crate::homology::{betti_numbers, component_sizes};
use crate::point_process::ModelParams;
use crate::scalar::Real;
use crate::stats::powerlaw::{gamma_from_vertex_exponent, PowerLawFit};

/// Documents are dropped when they have more than `cap + 1` authors.
pub const DEFAULT_MAX_INTERACTION_DIM: usize = 20;
pub const DEFAULT_SKELETON_DIM: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorpusFormat {
    CsvLines,
    Json,
}

impl CorpusFormat {
    /// Guesses the format from the file extension (`.json` or anything else).
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => CorpusFormat::Json,
            _ => CorpusFormat::CsvLines,
        }
    }
}

impl FromStr for CorpusFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" | "csv-lines" => Ok(CorpusFormat::CsvLines),
            "json" => Ok(CorpusFormat::Json),
            other => Err(Error::invalid(format!("unknown corpus format '{other}'"))),
        }
    }
}

/// Documents as lists of dense author ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentCorpus {
    documents: Vec<Vec<u32>>,
    authors: Vec<String>,
    #[serde(skip)]
    author_index: HashMap<String, u32>,
}

impl DocumentCorpus {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a document. Repeated names within one document count once.
    pub fn push_document<S: AsRef<str>>(&mut self, names: impl IntoIterator<Item = S>) -> Result<()> {
        let mut doc: Vec<u32> = names.into_iter().map(|n| self.intern(n.as_ref())).collect();
        if doc.is_empty() {
            return Err(Error::invalid("document without authors"));
        }
        doc.sort_unstable();
        doc.dedup();
        self.documents.push(doc);
        Ok(())
    }

    pub fn from_documents<D, S>(documents: impl IntoIterator<Item = D>) -> Result<Self>
    where
        D: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut corpus = Self::new();
        for d in documents {
            corpus.push_document(d)?;
        }
        Ok(corpus)
    }

    fn intern(&mut self, name: &str) -> u32 {
        if let Some(&id) = self.author_index.get(name) {
            return id;
        }
        let id = self.authors.len() as u32;
        self.authors.push(name.to_owned());
        self.author_index.insert(name.to_owned(), id);
        id
    }

    pub fn documents(&self) -> &[Vec<u32>] {
        &self.documents
    }

    pub fn author_count(&self) -> usize {
        self.authors.len()
    }

    pub fn author_name(&self, id: u32) -> Option<&str> {
        self.authors.get(id as usize).map(String::as_str)
    }

    pub fn author_id(&self, name: &str) -> Option<u32> {
        self.author_index.get(name).copied()
    }
}

pub fn load_corpus(path: &Path, format: CorpusFormat) -> Result<DocumentCorpus> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_owned(),
        line,
        message,
    };
    if text.trim().is_empty() {
        return Err(parse_err(1, "empty corpus".into()));
    }
    let mut corpus = DocumentCorpus::new();
    match format {
        CorpusFormat::CsvLines => {
            for (i, line) in text.lines().enumerate() {
                let names = parse_csv_line(line).map_err(|m| parse_err(i + 1, m))?;
                corpus.push_document(names).map_err(|e| parse_err(i + 1, e.to_string()))?;
            }
        }
        CorpusFormat::Json => {
            let docs: Vec<Vec<String>> =
                serde_json::from_str(&text).map_err(|e| parse_err(e.line(), e.to_string()))?;
            for (i, doc) in docs.into_iter().enumerate() {
                if doc.iter().any(|n| n.trim().is_empty()) {
                    return Err(parse_err(0, format!("document {i} has an empty author name")));
                }
                corpus
                    .push_document(doc)
                    .map_err(|e| parse_err(0, format!("document {i}: {e}")))?;
            }
        }
    }
    Ok(corpus)
}

fn parse_csv_line(line: &str) -> std::result::Result<Vec<String>, String> {
    if line.trim().is_empty() {
        return Err("empty line".into());
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(line.as_bytes());
    let record = reader
        .records()
        .next()
        .ok_or_else(|| "empty line".to_string())?
        .map_err(|e| e.to_string())?;
    let names: Vec<String> = record.iter().map(str::to_owned).collect();
    if names.iter().any(String::is_empty) {
        return Err("empty author name".into());
    }
    Ok(names)
}

/// Writes a corpus in the `csv-lines` layout.
pub fn write_corpus_csv(corpus: &DocumentCorpus, path: &Path) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().flexible(true).from_path(path)?;
    for doc in corpus.documents() {
        writer.write_record(doc.iter().map(|&a| corpus.authors[a as usize].as_str()))?;
    }
    writer.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Simplicial complex of the documents with at most `max_interaction_dim + 1`
/// authors, closed under faces up to `skeleton_dim`. Larger documents are
/// left out entirely, together with any author appearing only in them.
pub fn build_dataset_complex(
    corpus: &DocumentCorpus,
    max_interaction_dim: usize,
    skeleton_dim: usize,
) -> Result<SimplicialComplex> {
    if skeleton_dim < 1 {
        return Err(Error::invalid("skeleton dimension must be at least 1"));
    }
    Ok(SimplicialComplex::from_generators(
        retained(corpus, max_interaction_dim),
        skeleton_dim,
    ))
}

fn retained(corpus: &DocumentCorpus, max_interaction_dim: usize) -> impl Iterator<Item = &Vec<u32>> {
    corpus.documents.iter().filter(move |d| d.len() <= max_interaction_dim + 1)
}

/// Corpus whose documents are the simplices of `complex` up to dimension
/// `max_dim`; authors are named by vertex id. Building the dataset complex of
/// the result with the same skeleton recovers `complex.skeleton(max_dim)`.
pub fn corpus_from_complex(complex: &SimplicialComplex, max_dim: usize) -> DocumentCorpus {
    let mut corpus = DocumentCorpus::new();
    for k in 0..=max_dim.min(complex.max_dim()) {
        for s in complex.iter(k) {
            corpus
                .push_document(s.iter().map(u32::to_string))
                .expect("simplices are nonempty");
        }
    }
    corpus
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    /// Vertices of the complex (authors of retained documents).
    pub authors: usize,
    /// Retained documents.
    pub documents: usize,
    pub components: usize,
    pub largest_component_size: usize,
    /// Number of simplices by dimension.
    pub simplex_counts: Vec<usize>,
    /// `2 E / V`.
    pub mean_vertex_degree: f64,
    pub betti_0: u64,
    pub betti_1: u64,
    /// Authors-per-document histogram over all documents, dropped ones
    /// included.
    pub authors_per_document: BTreeMap<usize, u64>,
    pub metadata: SummaryMetadata,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryMetadata {
    pub total_authors: usize,
    pub total_documents: usize,
    pub dropped_documents: usize,
    pub max_interaction_dim: usize,
    pub skeleton_dim: usize,
    /// How over-cap documents were handled.
    pub over_cap_policy: String,
}

impl DatasetSummary {
    pub fn triangle_count(&self) -> Option<usize> {
        self.simplex_counts.get(2).copied()
    }

    pub fn edge_count(&self) -> usize {
        self.simplex_counts.get(1).copied().unwrap_or(0)
    }
}

pub fn dataset_summary(
    complex: &SimplicialComplex,
    corpus: &DocumentCorpus,
    max_interaction_dim: usize,
) -> Result<DatasetSummary> {
    let sizes = component_sizes(complex);
    let vertices = complex.count(0);
    let mut authors_per_document = BTreeMap::new();
    for d in corpus.documents() {
        *authors_per_document.entry(d.len()).or_insert(0) += 1;
    }
    let documents = retained(corpus, max_interaction_dim).count();
    let betti = if complex.max_dim() >= 1 && vertices > 0 {
        betti_numbers(complex, 1)?.betti
    } else {
        vec![vertices as u64, 0]
    };
    Ok(DatasetSummary {
        authors: vertices,
        documents,
        components: sizes.len(),
        largest_component_size: sizes.iter().copied().max().unwrap_or(0) as usize,
        simplex_counts: complex.f_vector(),
        mean_vertex_degree: if vertices == 0 {
            0.0
        } else {
            2.0 * complex.count(1) as f64 / vertices as f64
        },
        betti_0: betti[0],
        betti_1: betti[1],
        authors_per_document,
        metadata: SummaryMetadata {
            total_authors: corpus.author_count(),
            total_documents: corpus.documents().len(),
            dropped_documents: corpus.documents().len() - documents,
            max_interaction_dim,
            skeleton_dim: complex.max_dim(),
            over_cap_policy: "documents above the cap are dropped whole".into(),
        },
    })
}

/// Vertex degrees `deg_1` of the dataset complex.
pub fn vertex_degrees(complex: &SimplicialComplex) -> Result<Vec<u64>> {
    generalized_degree_values(complex, 0, 1)
}

/// Model parameters matched to a dataset: `gamma = 1 / (a_hat - 1)` from the
/// vertex-degree fit and `beta = mean_degree (1 - gamma)`, on a window whose
/// length equals the number of authors.
pub fn fit_model_params<T: Real>(summary: &DatasetSummary, vertex_fit: &PowerLawFit<T>) -> Result<ModelParams<T>> {
    let gamma = gamma_from_vertex_exponent(vertex_fit.a_hat)?;
    let beta = T::of(summary.mean_vertex_degree) * (T::one() - gamma);
    if summary.authors == 0 {
        return Err(Error::fit("dataset without authors"));
    }
    ModelParams::new(beta, gamma, T::of_usize(summary.authors)).map_err(|e| Error::fit(e.to_string()))
}
