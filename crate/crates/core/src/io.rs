//! File formats: CSV for clouds, diagrams and traces, newline-delimited JSON
//! for sample streams.
//!
//! Floats are written with Rust's shortest round-trip formatting, so reading a
//! file back yields bit-identical values and reruns are byte-identical.

use std::collections::BTreeMap;
use std::io::{BufRead, Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::homology::{PersistenceDiagram, PointCloud};
use crate::sampler::{MoveDiagnostics, RecordedDiagram, SampleSet};

#[derive(Serialize, Deserialize)]
struct XyRow {
    x: f64,
    y: f64,
}

#[derive(Serialize, Deserialize)]
struct DiagramRow {
    birth: f64,
    persistence: f64,
    dim: u8,
}

pub fn write_cloud_csv<W: Write>(cloud: &PointCloud, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(["x", "y"])?;
    for p in &cloud.points {
        w.serialize(XyRow { x: p.x, y: p.y })?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_cloud_csv<R: Read>(input: R) -> Result<PointCloud> {
    let mut r = csv::Reader::from_reader(input);
    let points = r
        .deserialize::<XyRow>()
        .map(|row| row.map(|r| Point::new(r.x, r.y)).map_err(Error::from))
        .collect::<Result<Vec<_>>>()?;
    PointCloud::new(points)
}

pub fn write_diagram_csv<W: Write>(d: &PersistenceDiagram, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(["birth", "persistence", "dim"])?;
    for p in &d.points {
        w.serialize(DiagramRow {
            birth: p.x,
            persistence: p.y,
            dim: d.homology_dimension,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// A header-only file reads as an empty diagram of `default_dim`.
pub fn read_diagram_csv<R: Read>(input: R, default_dim: u8) -> Result<PersistenceDiagram> {
    let mut r = csv::Reader::from_reader(input);
    let mut points = Vec::new();
    let mut dim = None;
    for row in r.deserialize::<DiagramRow>() {
        let row = row?;
        match dim {
            None => dim = Some(row.dim),
            Some(d) if d != row.dim => {
                return Err(Error::Parse(format!(
                    "mixed homology dimensions {d} and {}",
                    row.dim
                )))
            }
            _ => {}
        }
        points.push(Point::new(row.birth, row.persistence));
    }
    PersistenceDiagram::new(points, dim.unwrap_or(default_dim))
}

#[derive(Serialize, Deserialize)]
struct SampleRecord {
    chain: usize,
    iteration: usize,
    dim: u8,
    points: Vec<[f64; 2]>,
    diagnostics: MoveDiagnostics,
}

/// One JSON object per recorded diagram.
pub fn write_samples_ndjson<W: Write>(samples: &SampleSet, mut out: W) -> Result<()> {
    for r in &samples.diagrams {
        let rec = SampleRecord {
            chain: r.chain,
            iteration: r.iteration,
            dim: r.diagram.homology_dimension,
            points: r.diagram.points.iter().map(|p| [p.x, p.y]).collect(),
            diagnostics: r.diagnostics,
        };
        serde_json::to_writer(&mut out, &rec)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Rebuilds the recorded diagrams. Overall diagnostics are the last record of
/// each chain summed; the per-iteration cardinality trace is not stored in
/// this format and comes back empty.
pub fn read_samples_ndjson<R: BufRead>(input: R) -> Result<SampleSet> {
    let mut diagrams = Vec::new();
    let mut last: BTreeMap<usize, MoveDiagnostics> = BTreeMap::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: SampleRecord = serde_json::from_str(&line)
            .map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))?;
        let diagram = PersistenceDiagram::new(
            rec.points.iter().map(|&[x, y]| Point::new(x, y)).collect(),
            rec.dim,
        )?;
        last.insert(rec.chain, rec.diagnostics);
        diagrams.push(RecordedDiagram {
            chain: rec.chain,
            iteration: rec.iteration,
            diagram,
            diagnostics: rec.diagnostics,
        });
    }
    let mut diagnostics = MoveDiagnostics::default();
    for d in last.values() {
        for (acc, add) in [
            (&mut diagnostics.add, d.add),
            (&mut diagnostics.remove, d.remove),
            (&mut diagnostics.relocate, d.relocate),
        ] {
            acc.proposed += add.proposed;
            acc.accepted += add.accepted;
        }
    }
    Ok(SampleSet {
        diagrams,
        diagnostics,
        cardinality: Vec::new(),
    })
}

/// `step,cardinality`, one row per iteration (chains concatenated).
pub fn write_cardinality_csv<W: Write>(samples: &SampleSet, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(["step", "cardinality"])?;
    for (i, c) in samples.cardinality.iter().enumerate() {
        w.write_record([(i + 1).to_string(), c.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
