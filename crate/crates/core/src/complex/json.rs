//! Mesh JSON: `{"dimension":3, "tetrahedra":[[..]], "lengths_sq":{"i-j": x, ..}}`.

use super::{build_complex, ComplexTopology3, MetricAssignment};
use crate::error::{Error, Result};
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};
use std::collections::HashMap;
use std::path::Path;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMesh {
    dimension: usize,
    tetrahedra: Vec<[usize; 4]>,
    lengths_sq: HashMap<String, f64>,
}

/// Borrowed view used to serialize a complex and its metric.
#[derive(Debug, Serialize)]
pub struct MeshDocument<'a> {
    dimension: usize,
    tetrahedra: &'a [[usize; 4]],
    #[serde(serialize_with = "ordered_lengths")]
    lengths_sq: (&'a ComplexTopology3, &'a [f64]),
}

impl<'a> MeshDocument<'a> {
    pub fn new(top: &'a ComplexTopology3, metric: &'a MetricAssignment<f64>) -> Self {
        Self { dimension: 3, tetrahedra: top.tetrahedra(), lengths_sq: (top, &metric.lengths_sq) }
    }
}

fn ordered_lengths<S: Serializer>(v: &(&ComplexTopology3, &[f64]), ser: S) -> std::result::Result<S::Ok, S::Error> {
    let (top, lengths) = *v;
    let mut map = ser.serialize_map(Some(lengths.len()))?;
    for (e, l) in lengths.iter().enumerate() {
        map.serialize_entry(&top.edge_key(e), l)?;
    }
    map.end()
}

fn parse_edge_key(key: &str) -> Option<(usize, usize)> {
    let (a, b) = key.split_once('-')?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

/// Parses a mesh document. Every edge must carry exactly one squared length.
pub fn parse_mesh(text: &str) -> Result<(ComplexTopology3, MetricAssignment<f64>)> {
    let raw: RawMesh = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    if raw.dimension != 3 {
        return Err(Error::Format(format!("dimension must be 3, found {}", raw.dimension)));
    }
    let top = build_complex(&raw.tetrahedra)?;
    let mut lengths = vec![f64::NAN; top.edge_count()];
    for (key, value) in &raw.lengths_sq {
        let (a, b) = parse_edge_key(key).ok_or_else(|| Error::UnknownEdge(key.clone()))?;
        let e = top.edge_id(a, b).ok_or_else(|| Error::UnknownEdge(key.clone()))?;
        lengths[e] = *value;
    }
    if let Some(e) = lengths.iter().position(|l| l.is_nan()) {
        let [a, b] = top.edges()[e];
        return Err(Error::MissingEdgeLength(a, b));
    }
    let metric = MetricAssignment::new(lengths);
    metric.check_against(&top)?;
    Ok((top, metric))
}

pub fn read_mesh(path: &Path) -> Result<(ComplexTopology3, MetricAssignment<f64>)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_mesh(&text)
}

/// Serializes to pretty JSON. Floats use the shortest round-trip representation.
pub fn write_mesh(top: &ComplexTopology3, metric: &MetricAssignment<f64>) -> String {
    serde_json::to_string_pretty(&MeshDocument::new(top, metric)).expect("mesh serialization")
}
