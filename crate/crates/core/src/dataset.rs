//! CSV ingestion for point files and plane files.
//!
//! Point files need a header. A column named `id` (any case) supplies point
//! ids, otherwise rows are numbered from 1. A column named `label` or `class`
//! supplies class labels; integers are used as class ids directly and other
//! strings are mapped to ids through a [`LabelMap`]. Every other column is a
//! feature.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{ClassId, Dataset, Hyperplane, PlaneSet, SamplePoint};

/// Two-way mapping between label strings and class ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelMap {
    names: BTreeMap<ClassId, String>,
}

impl LabelMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_names(names: BTreeMap<ClassId, String>) -> Self {
        Self { names }
    }

    pub fn names(&self) -> &BTreeMap<ClassId, String> {
        &self.names
    }

    pub fn name(&self, id: ClassId) -> String {
        self.names.get(&id).cloned().unwrap_or_else(|| id.to_string())
    }

    /// Integer tokens map to themselves; known names to their id; new names
    /// to the next id above every id seen so far.
    pub fn resolve(&mut self, token: &str) -> Result<ClassId> {
        if let Ok(v) = token.parse::<u32>() {
            let id = ClassId(v);
            self.names.entry(id).or_insert_with(|| token.to_string());
            return Ok(id);
        }
        if let Some((id, _)) = self.names.iter().find(|(_, n)| n.as_str() == token) {
            return Ok(*id);
        }
        let next = self.names.keys().next_back().map_or(1, |c| c.0 + 1);
        self.names.insert(ClassId(next), token.to_string());
        Ok(ClassId(next))
    }
}

pub fn read_points(source: impl Read, origin: &str, labels: &mut LabelMap) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(source);
    let malformed = |line: u64, msg: String| Error::MalformedFile(format!("{origin}:{line}: {msg}"));

    let headers = reader
        .headers()
        .map_err(|e| Error::MalformedFile(format!("{origin}: {e}")))?
        .clone();
    let find = |names: &[&str]| {
        headers
            .iter()
            .position(|h| names.iter().any(|n| h.eq_ignore_ascii_case(n)))
    };
    let id_col = find(&["id"]);
    let label_col = find(&["label", "class"]);
    let feature_cols: Vec<usize> = (0..headers.len())
        .filter(|c| Some(*c) != id_col && Some(*c) != label_col)
        .collect();
    if feature_cols.is_empty() {
        return Err(Error::MalformedFile(format!("{origin}: no feature columns")));
    }

    let mut points = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let line = row as u64 + 2;
        let record = record.map_err(|e| malformed(line, e.to_string()))?;
        if record.len() != headers.len() {
            return Err(malformed(
                line,
                format!("expected {} fields, found {}", headers.len(), record.len()),
            ));
        }
        let id = match id_col {
            Some(c) => record[c]
                .parse::<u64>()
                .map_err(|_| malformed(line, format!("bad id {:?}", &record[c])))?,
            None => row as u64 + 1,
        };
        let coords = feature_cols
            .iter()
            .map(|&c| {
                record[c]
                    .parse::<f64>()
                    .map_err(|_| malformed(line, format!("bad number {:?} in column {}", &record[c], &headers[c])))
            })
            .collect::<Result<Vec<_>>>()?;
        let label = match label_col.map(|c| &record[c]) {
            Some(token) if !token.is_empty() => Some(labels.resolve(token)?),
            _ => None,
        };
        points.push(SamplePoint::new(id, coords, label));
    }
    Dataset::new(points)
}

pub fn load_points(path: &Path, labels: &mut LabelMap) -> Result<Dataset> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_points(file, &path.display().to_string(), labels)
}

/// One plane per row, `α₁,…,αₙ` of `1 + α·x = 0`. No header.
pub fn read_planes(source: impl Read, origin: &str) -> Result<PlaneSet> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(source);
    let mut planes = PlaneSet::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::MalformedFile(format!("{origin}: {e}")))?;
        let coeffs = record
            .iter()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| Error::MalformedFile(format!("{origin}: plane {}: bad number {t:?}", row + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        planes.push(Hyperplane::from_coefficients(coeffs)?)?;
    }
    if planes.is_empty() {
        return Err(Error::MalformedFile(format!("{origin}: no planes")));
    }
    Ok(planes)
}

pub fn load_planes(path: &Path) -> Result<PlaneSet> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_planes(file, &path.display().to_string())
}
