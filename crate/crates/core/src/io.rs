//! CSV and binary layouts for vertices, edges, simplices, degree counts,
//! histograms, Q-Q data and Betti vectors.
//!
//! | file | columns |
//! |------|---------|
//! | vertices | `id,position,birth` |
//! | edges | `younger_id,older_id,protected` |
//! | simplices | `dim,vertices` (vertices space-separated) |
//! | value counts | `value,count` rows without a header |
//! | histograms | `[label_]bin_left_limit,[label_]value` (density; last row closes the final bin) |
//! | theoretical pdf | `[label_]value,[label_]pdf` |
//! | Q-Q data | `[label_]theoretical,[label_]empirical` |
//! | Betti vectors | `replication,betti_0,..,betti_q,truncated_top` |
//!
//! The binary forms are little-endian: a 4-byte tag (`ADRV` or `ADRE`), a
//! `u64` record count, then fixed-size records (`u32 id, f64 position, f64
//! birth` or `u32 younger, u32 older, u8 protected`).

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::complex::{DegreeDistribution, SimplicialComplex};
use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeSet};
use crate::homology::BettiVector;
use crate::montecarlo::ReplicationRecord;
use crate::point_process::Vertex;
use crate::scalar::Real;
use crate::stats::{Histogram, QqPoint};

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    Ok(csv::Writer::from_path(path)?)
}

fn csv_reader(path: &Path, headers: bool) -> Result<csv::Reader<File>> {
    Ok(csv::ReaderBuilder::new().has_headers(headers).flexible(true).from_path(path)?)
}

fn parse_error(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_owned(),
        line: line as usize,
        message: message.into(),
    }
}

fn field<F: std::str::FromStr>(path: &Path, record: &csv::StringRecord, i: usize) -> Result<F> {
    let line = record.position().map_or(0, |p| p.line());
    let raw = record
        .get(i)
        .ok_or_else(|| parse_error(path, line, format!("missing column {i}")))?;
    raw.trim()
        .parse()
        .map_err(|_| parse_error(path, line, format!("cannot parse '{raw}' in column {i}")))
}

#[derive(Serialize, Deserialize)]
struct VertexRow {
    id: u32,
    position: f64,
    birth: f64,
}

pub fn write_vertices_csv<T: Real>(path: &Path, vertices: &[Vertex<T>]) -> Result<()> {
    let mut w = csv_writer(path)?;
    for v in vertices {
        w.serialize(VertexRow {
            id: v.id,
            position: v.position.as_f64(),
            birth: v.birth.as_f64(),
        })?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_vertices_csv<T: Real>(path: &Path) -> Result<Vec<Vertex<T>>> {
    csv_reader(path, true)?
        .deserialize::<VertexRow>()
        .map(|row| {
            let r = row?;
            Ok(Vertex {
                id: r.id,
                position: T::of(r.position),
                birth: T::of(r.birth),
            })
        })
        .collect()
}

#[derive(Serialize, Deserialize)]
struct EdgeRow {
    younger_id: u32,
    older_id: u32,
    protected: bool,
}

pub fn write_edges_csv(path: &Path, edges: &EdgeSet) -> Result<()> {
    let mut w = csv_writer(path)?;
    for e in edges.edges() {
        w.serialize(EdgeRow {
            younger_id: e.younger,
            older_id: e.older,
            protected: e.protected,
        })?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_edges_csv(path: &Path) -> Result<EdgeSet> {
    let edges = csv_reader(path, true)?
        .deserialize::<EdgeRow>()
        .map(|row| {
            let r = row?;
            Ok(Edge {
                younger: r.younger_id,
                older: r.older_id,
                protected: r.protected,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    EdgeSet::from_edges(edges)
}

pub fn write_simplices_csv(path: &Path, complex: &SimplicialComplex) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["dim", "vertices"])?;
    let mut buf = String::new();
    for k in 0..=complex.max_dim() {
        for s in complex.iter(k) {
            buf.clear();
            for (i, v) in s.iter().enumerate() {
                if i > 0 {
                    buf.push(' ');
                }
                buf.push_str(&v.to_string());
            }
            w.write_record([k.to_string().as_str(), buf.as_str()])?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a simplex list; the complex is rebuilt with the largest dimension
/// present (at least `min_dim`).
pub fn read_simplices_csv(path: &Path, min_dim: usize) -> Result<SimplicialComplex> {
    let mut simplices = Vec::new();
    let mut max_dim = min_dim;
    for record in csv_reader(path, true)?.records() {
        let record = record?;
        let dim: usize = field(path, &record, 0)?;
        let line = record.position().map_or(0, |p| p.line());
        let vertices = record
            .get(1)
            .unwrap_or("")
            .split_whitespace()
            .map(|v| v.parse::<u32>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| parse_error(path, line, e.to_string()))?;
        if vertices.len() != dim + 1 {
            return Err(parse_error(path, line, format!("{dim}-simplex with {} vertices", vertices.len())));
        }
        max_dim = max_dim.max(dim);
        simplices.push(vertices);
    }
    let complex = SimplicialComplex::from_generators(&simplices, max_dim);
    if complex.f_vector().iter().sum::<usize>() != simplices.len() {
        return Err(parse_error(path, 0, "simplex list is not closed under faces or has duplicates"));
    }
    Ok(complex)
}

pub fn write_value_counts_csv(path: &Path, dist: &DegreeDistribution) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    for (v, c) in &dist.counts {
        w.write_record([v.to_string(), c.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_value_counts_csv(path: &Path, m: usize, m_prime: usize) -> Result<DegreeDistribution> {
    let mut dist = DegreeDistribution::new(m, m_prime);
    for record in csv_reader(path, false)?.records() {
        let record = record?;
        let (v, c): (u64, u64) = (field(path, &record, 0)?, field(path, &record, 1)?);
        if c > 0 {
            *dist.counts.entry(v).or_insert(0) += c;
        }
    }
    Ok(dist)
}

fn column(label: Option<&str>, name: &str) -> String {
    match label {
        Some(l) => format!("{l}_{name}"),
        None => name.to_owned(),
    }
}

fn write_pairs(path: &Path, header: [String; 2], rows: impl Iterator<Item = (f64, f64)>) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(&header)?;
    for (a, b) in rows {
        w.write_record([a.to_string(), b.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn read_pairs(path: &Path) -> Result<(Vec<String>, Vec<(f64, f64)>)> {
    let mut r = csv_reader(path, true)?;
    let header = r.headers()?.iter().map(str::to_owned).collect();
    let rows = r
        .records()
        .map(|rec| {
            let rec = rec?;
            Ok((field(path, &rec, 0)?, field(path, &rec, 1)?))
        })
        .collect::<Result<_>>()?;
    Ok((header, rows))
}

/// Histogram as densities; a closing row at the right edge repeats the last
/// density so the file plots as a step function.
pub fn write_histogram_csv(path: &Path, hist: &Histogram, label: Option<&str>) -> Result<()> {
    let mut dens = hist.densities();
    dens.push(*dens.last().unwrap_or(&0.0));
    write_pairs(
        path,
        [column(label, "bin_left_limit"), column(label, "value")],
        hist.edges.iter().copied().zip(dens),
    )
}

/// Bin edges and densities of a histogram file.
pub fn read_histogram_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let (_, rows) = read_pairs(path)?;
    let edges = rows.iter().map(|r| r.0).collect();
    let mut dens: Vec<f64> = rows.iter().map(|r| r.1).collect();
    dens.pop();
    Ok((edges, dens))
}

pub fn write_theoretical_pdf_csv(path: &Path, points: &[(f64, f64)], label: Option<&str>) -> Result<()> {
    write_pairs(path, [column(label, "value"), column(label, "pdf")], points.iter().copied())
}

pub fn read_theoretical_pdf_csv(path: &Path) -> Result<Vec<(f64, f64)>> {
    Ok(read_pairs(path)?.1)
}

pub fn write_qq_csv(path: &Path, points: &[QqPoint], label: Option<&str>) -> Result<()> {
    write_pairs(
        path,
        [column(label, "theoretical"), column(label, "empirical")],
        points.iter().map(|p| (p.theoretical, p.empirical)),
    )
}

pub fn read_qq_csv(path: &Path) -> Result<Vec<QqPoint>> {
    Ok(read_pairs(path)?
        .1
        .into_iter()
        .map(|(theoretical, empirical)| QqPoint { theoretical, empirical })
        .collect())
}

/// Betti vectors keyed by replication index.
pub fn write_betti_csv(path: &Path, rows: &BTreeMap<u64, BettiVector>) -> Result<()> {
    let width = rows.values().map(|b| b.betti.len()).max().unwrap_or(0);
    let mut w = csv_writer(path)?;
    let mut header = vec!["replication".to_owned()];
    header.extend((0..width).map(|q| format!("betti_{q}")));
    header.push("truncated_top".into());
    w.write_record(&header)?;
    for (rep, b) in rows {
        let mut rec = vec![rep.to_string()];
        rec.extend((0..width).map(|q| b.get(q).map_or(String::new(), |v| v.to_string())));
        rec.push(b.truncated_top.to_string());
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_betti_csv(path: &Path) -> Result<BTreeMap<u64, BettiVector>> {
    let mut out = BTreeMap::new();
    for record in csv_reader(path, true)?.records() {
        let record = record?;
        let n = record.len();
        let rep: u64 = field(path, &record, 0)?;
        let betti = (1..n - 1)
            .filter(|&i| !record[i].trim().is_empty())
            .map(|i| field(path, &record, i))
            .collect::<Result<Vec<u64>>>()?;
        let truncated_top: bool = field(path, &record, n - 1)?;
        out.insert(rep, BettiVector { betti, truncated_top });
    }
    Ok(out)
}

/// One row per replication: `replication,seed,vertices,edge_count,
/// triangle_count`, then `betti_q` columns and one `a_hat_m_m'` column per
/// fitted degree pair. Missing values are left empty.
pub fn write_records_csv(path: &Path, records: &[ReplicationRecord]) -> Result<()> {
    let betti_width = records
        .iter()
        .filter_map(|r| r.betti.as_ref().map(|b| b.betti.len()))
        .max()
        .unwrap_or(0);
    let pairs: Vec<(usize, usize)> = records
        .first()
        .map(|r| r.exponents.iter().map(|e| (e.m, e.m_prime)).collect())
        .unwrap_or_default();
    let mut w = csv_writer(path)?;
    let mut header: Vec<String> = ["replication", "seed", "vertices", "edge_count", "triangle_count"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend((0..betti_width).map(|q| format!("betti_{q}")));
    header.extend(pairs.iter().map(|(m, mp)| format!("a_hat_{m}_{mp}")));
    w.write_record(&header)?;
    let opt = |v: Option<String>| v.unwrap_or_default();
    for r in records {
        let mut row = vec![
            r.replication.to_string(),
            r.seed.to_string(),
            r.vertices.to_string(),
            r.edge_count.to_string(),
            opt(r.triangle_count.map(|t| t.to_string())),
        ];
        row.extend((0..betti_width).map(|q| opt(r.betti.as_ref().and_then(|b| b.get(q)).map(|v| v.to_string()))));
        row.extend(pairs.iter().map(|&(m, mp)| opt(r.exponent(m, mp).map(|a| a.to_string()))));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

const VERTEX_TAG: &[u8; 4] = b"ADRV";
const EDGE_TAG: &[u8; 4] = b"ADRE";

pub fn write_vertices_bin<T: Real>(path: &Path, vertices: &[Vertex<T>]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut put = |bytes: &[u8]| w.write_all(bytes).map_err(|e| Error::io(path, e));
    put(VERTEX_TAG)?;
    put(&(vertices.len() as u64).to_le_bytes())?;
    for v in vertices {
        put(&v.id.to_le_bytes())?;
        put(&v.position.as_f64().to_le_bytes())?;
        put(&v.birth.as_f64().to_le_bytes())?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn read_tagged(path: &Path, tag: &[u8; 4], record: usize) -> Result<(u64, Vec<u8>)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut bytes = Vec::new();
    BufReader::new(file).read_to_end(&mut bytes).map_err(|e| Error::io(path, e))?;
    if bytes.len() < 12 || &bytes[..4] != tag {
        return Err(parse_error(path, 0, "not a binary file of the expected kind"));
    }
    let count = u64::from_le_bytes(bytes[4..12].try_into().expect("8 bytes"));
    let body = bytes.split_off(12);
    if body.len() as u64 != count * record as u64 {
        return Err(parse_error(path, 0, format!("expected {count} records of {record} bytes")));
    }
    Ok((count, body))
}

pub fn read_vertices_bin<T: Real>(path: &Path) -> Result<Vec<Vertex<T>>> {
    let (_, body) = read_tagged(path, VERTEX_TAG, 20)?;
    Ok(body
        .chunks_exact(20)
        .map(|c| Vertex {
            id: u32::from_le_bytes(c[0..4].try_into().expect("4 bytes")),
            position: T::of(f64::from_le_bytes(c[4..12].try_into().expect("8 bytes"))),
            birth: T::of(f64::from_le_bytes(c[12..20].try_into().expect("8 bytes"))),
        })
        .collect())
}

pub fn write_edges_bin(path: &Path, edges: &EdgeSet) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut put = |bytes: &[u8]| w.write_all(bytes).map_err(|e| Error::io(path, e));
    put(EDGE_TAG)?;
    put(&(edges.len() as u64).to_le_bytes())?;
    for e in edges.edges() {
        put(&e.younger.to_le_bytes())?;
        put(&e.older.to_le_bytes())?;
        put(&[e.protected as u8])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_edges_bin(path: &Path) -> Result<EdgeSet> {
    let (_, body) = read_tagged(path, EDGE_TAG, 9)?;
    let edges = body
        .chunks_exact(9)
        .map(|c| Edge {
            younger: u32::from_le_bytes(c[0..4].try_into().expect("4 bytes")),
            older: u32::from_le_bytes(c[4..8].try_into().expect("4 bytes")),
            protected: c[8] != 0,
        })
        .collect();
    EdgeSet::from_edges(edges)
}

/// Writes any serializable value as pretty JSON.
pub fn write_json<S: Serialize + ?Sized>(path: &Path, value: &S) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_json<S: for<'de> Deserialize<'de>>(path: &Path) -> Result<S> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_reader(BufReader::new(file))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_edges, classify_protected};
    use crate::point_process::{sample_finite, ModelParams};
    use crate::rng::seeded;
    use crate::stats::histogram;

    fn network() -> (Vec<Vertex>, EdgeSet) {
        let p = ModelParams::new(1.0, 0.6, 300.0).unwrap();
        let mut rng = seeded(4);
        let v = sample_finite(&p, &mut rng).unwrap();
        let e = build_edges(&v, &p, &mut rng).unwrap();
        let e = classify_protected(&e, &v).unwrap();
        (v, e)
    }

    #[test]
    fn vertices_and_edges_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let (v, e) = network();
        let p = |n: &str| dir.path().join(n);
        write_vertices_csv(&p("v.csv"), &v).unwrap();
        write_edges_csv(&p("e.csv"), &e).unwrap();
        write_vertices_bin(&p("v.bin"), &v).unwrap();
        write_edges_bin(&p("e.bin"), &e).unwrap();
        assert_eq!(read_vertices_csv::<f64>(&p("v.csv")).unwrap(), v);
        assert_eq!(read_vertices_bin::<f64>(&p("v.bin")).unwrap(), v);
        assert_eq!(read_edges_csv(&p("e.csv")).unwrap().edges(), e.edges());
        assert_eq!(read_edges_bin(&p("e.bin")).unwrap().edges(), e.edges());
        let header = std::fs::read_to_string(p("e.csv")).unwrap();
        assert!(header.starts_with("younger_id,older_id,protected\n"));
        assert!(read_vertices_bin::<f64>(&p("e.bin")).is_err());
    }

    #[test]
    fn simplices_and_counts_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let k = SimplicialComplex::from_generators([vec![0u32, 1, 2, 3], vec![3, 4]], 3);
        let path = dir.path().join("s.csv");
        write_simplices_csv(&path, &k).unwrap();
        assert_eq!(read_simplices_csv(&path, 3).unwrap(), k);
        let d = DegreeDistribution::from_values(0, 1, [1, 1, 3, 7]);
        let path = dir.path().join("vc.csv");
        write_value_counts_csv(&path, &d).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "1,2\n3,1\n7,1\n");
        assert_eq!(read_value_counts_csv(&path, 0, 1).unwrap(), d);
    }

    #[test]
    fn plotting_files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let xs: Vec<f64> = (0..200).map(|i| (i as f64).sqrt()).collect();
        let h = histogram(&xs).unwrap();
        let path = dir.path().join("h.csv");
        write_histogram_csv(&path, &h, Some("60")).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("60_bin_left_limit,60_value\n"));
        let (edges, dens) = read_histogram_csv(&path).unwrap();
        assert_eq!(edges, h.edges);
        assert_eq!(dens, h.densities());

        let qq = vec![QqPoint { theoretical: -1.5, empirical: -1.25 }, QqPoint { theoretical: 0.1, empirical: 0.3 }];
        let path = dir.path().join("qq.csv");
        write_qq_csv(&path, &qq, None).unwrap();
        assert_eq!(read_qq_csv(&path).unwrap(), qq);

        let pdf = vec![(1.0, 0.25), (2.0, 0.5)];
        let path = dir.path().join("pdf.csv");
        write_theoretical_pdf_csv(&path, &pdf, None).unwrap();
        assert_eq!(read_theoretical_pdf_csv(&path).unwrap(), pdf);
    }

    #[test]
    fn betti_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let rows = BTreeMap::from([
            (0, BettiVector { betti: vec![3, 1], truncated_top: false }),
            (4, BettiVector { betti: vec![1, 0], truncated_top: true }),
        ]);
        let path = dir.path().join("b.csv");
        write_betti_csv(&path, &rows).unwrap();
        assert_eq!(read_betti_csv(&path).unwrap(), rows);
    }

    #[test]
    fn record_table_has_one_row_per_replication() {
        use crate::montecarlo::{run_replications, ReplicationConfig, Statistic};
        let dir = tempfile::tempdir().unwrap();
        let cfg = ReplicationConfig::new(ModelParams::new(1.0, 0.5, 200.0).unwrap(), 3, 1)
            .require(Statistic::Betti1)
            .require(Statistic::Degrees { m: 0, m_prime: 1 });
        let s = run_replications(&cfg).unwrap();
        let path = dir.path().join("records.csv");
        write_records_csv(&path, &s.records).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "replication,seed,vertices,edge_count,triangle_count,betti_0,betti_1,a_hat_0_1"
        );
        assert_eq!(lines.count(), 3);
    }

    #[test]
    fn malformed_rows_report_their_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vc.csv");
        std::fs::write(&path, "1,2\nx,3\n").unwrap();
        match read_value_counts_csv(&path, 0, 1) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
