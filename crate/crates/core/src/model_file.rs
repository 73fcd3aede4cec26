//! JSON persistence for trained models.
//!
//! Loading recomputes every stored orientation vector from the stored
//! coordinates and planes and refuses the file on the first disagreement.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use serde::{Deserialize, Serialize};

use crate::clusters::{Bubble, Cluster, TrainedModelM2};
use crate::error::{Error, Result};
use crate::geometry::{ClassId, Hyperplane, OrientationVector, PlaneSet};
use crate::method1::{Entry, ModelMetadata, TrainedModelM1};

pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    M1(TrainedModelM1),
    M2(TrainedModelM2),
}

impl Model {
    pub fn method(&self) -> u8 {
        match self {
            Model::M1(_) => 1,
            Model::M2(_) => 2,
        }
    }

    pub fn base(&self) -> &TrainedModelM1 {
        match self {
            Model::M1(m) => m,
            Model::M2(m) => &m.base,
        }
    }

    pub fn base_mut(&mut self) -> &mut TrainedModelM1 {
        match self {
            Model::M1(m) => m,
            Model::M2(m) => &mut m.base,
        }
    }
}

/// A model plus the label names it was trained with.
#[derive(Debug, Clone, PartialEq)]
pub struct SavedModel {
    pub model: Model,
    pub class_names: BTreeMap<ClassId, String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct PointRecord {
    id: u64,
    coords: Vec<f64>,
    label: ClassId,
    ov: Vec<i8>,
}

#[derive(Debug, Serialize, Deserialize)]
struct PayloadRecord {
    key: Vec<i8>,
    data: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ClassNameRecord {
    id: ClassId,
    name: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct ModelFile {
    version: u32,
    method: u8,
    n: usize,
    tau: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max_disabled_planes: Option<usize>,
    planes: Vec<Vec<f64>>,
    points: Vec<PointRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bubbles: Option<Vec<Bubble>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    clusters: Option<Vec<Cluster>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    extra_planes: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    payloads: Vec<PayloadRecord>,
    #[serde(default)]
    class_names: Vec<ClassNameRecord>,
    metadata: ModelMetadata,
}

fn to_file(saved: &SavedModel) -> ModelFile {
    let base = saved.model.base();
    let mut file = ModelFile {
        version: MODEL_VERSION,
        method: saved.model.method(),
        n: base.dim(),
        tau: base.tau,
        epsilon: None,
        max_disabled_planes: None,
        planes: base.planes.iter().map(|p| p.coeffs().to_vec()).collect(),
        points: base
            .entries
            .iter()
            .map(|e| PointRecord {
                id: e.id,
                coords: e.coords.clone(),
                label: e.label,
                ov: e.ov.components().to_vec(),
            })
            .collect(),
        bubbles: None,
        clusters: None,
        extra_planes: None,
        payloads: base
            .payloads
            .iter()
            .map(|(k, v)| PayloadRecord {
                key: k.components().to_vec(),
                data: v.iter().map(|d| B64.encode(d)).collect(),
            })
            .collect(),
        class_names: saved
            .class_names
            .iter()
            .map(|(id, name)| ClassNameRecord {
                id: *id,
                name: name.clone(),
            })
            .collect(),
        metadata: base.metadata.clone(),
    };
    if let Model::M2(m) = &saved.model {
        file.epsilon = Some(m.relative_epsilon);
        file.max_disabled_planes = m.max_disabled_planes;
        file.bubbles = Some(m.bubbles.clone());
        file.clusters = Some(m.clusters.clone());
        file.extra_planes = Some(m.extra_planes);
    }
    file
}

fn from_file(file: ModelFile) -> Result<SavedModel> {
    let bad = |msg: &str| Error::MalformedFile(msg.to_string());
    if file.version != MODEL_VERSION {
        return Err(Error::VersionMismatch {
            expected: MODEL_VERSION,
            found: file.version,
        });
    }
    if !(file.tau >= 0.0 && file.tau.is_finite()) {
        return Err(bad("tau must be finite and non-negative"));
    }
    let mut planes = PlaneSet::new();
    for coeffs in file.planes {
        if coeffs.len() != file.n {
            return Err(Error::DimensionMismatch {
                expected: file.n,
                found: coeffs.len(),
            });
        }
        planes.push(Hyperplane::from_coefficients(coeffs)?)?;
    }
    let entries = file
        .points
        .into_iter()
        .map(|p| {
            if p.coords.len() != file.n {
                return Err(Error::DimensionMismatch {
                    expected: file.n,
                    found: p.coords.len(),
                });
            }
            Ok(Entry {
                id: p.id,
                coords: p.coords,
                label: p.label,
                ov: OrientationVector::new(p.ov)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if entries.is_empty() {
        return Err(bad("model has no points"));
    }
    let mut payloads = BTreeMap::new();
    for record in file.payloads {
        let key = OrientationVector::new(record.key)?;
        if key.len() != planes.len() {
            return Err(Error::LengthMismatch {
                left: key.len(),
                right: planes.len(),
            });
        }
        let data = record
            .data
            .iter()
            .map(|d| B64.decode(d).map_err(|e| Error::MalformedFile(format!("payload: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        payloads.insert(key, data);
    }
    let base = TrainedModelM1 {
        planes,
        entries,
        tau: file.tau,
        metadata: file.metadata,
        payloads,
    };
    let model = match file.method {
        1 => {
            base.validate()?;
            Model::M1(base)
        }
        2 => {
            let m = TrainedModelM2 {
                base,
                bubbles: file.bubbles.ok_or_else(|| bad("method 2 model without bubbles"))?,
                clusters: file.clusters.ok_or_else(|| bad("method 2 model without clusters"))?,
                extra_planes: file.extra_planes.unwrap_or(0),
                relative_epsilon: file.epsilon.ok_or_else(|| bad("method 2 model without epsilon"))?,
                max_disabled_planes: file.max_disabled_planes,
            };
            if m.clusters.is_empty() {
                return Err(bad("method 2 model without clusters"));
            }
            m.validate()?;
            Model::M2(m)
        }
        other => return Err(Error::MalformedFile(format!("unknown method {other}"))),
    };
    Ok(SavedModel {
        model,
        class_names: file.class_names.into_iter().map(|c| (c.id, c.name)).collect(),
    })
}

pub fn write_model(saved: &SavedModel, destination: impl Write) -> Result<()> {
    let mut destination = destination;
    serde_json::to_writer_pretty(&mut destination, &to_file(saved)).map_err(|e| Error::MalformedFile(e.to_string()))?;
    destination.write_all(b"\n").map_err(|e| Error::io("<model>", e))
}

pub fn read_model(source: impl Read) -> Result<SavedModel> {
    let value: serde_json::Value = serde_json::from_reader(source).map_err(|e| Error::MalformedFile(e.to_string()))?;
    let found = value
        .get("version")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| Error::MalformedFile("missing version".into()))?;
    if found != u64::from(MODEL_VERSION) {
        return Err(Error::VersionMismatch {
            expected: MODEL_VERSION,
            found: u32::try_from(found).unwrap_or(u32::MAX),
        });
    }
    let file: ModelFile = serde_json::from_value(value).map_err(|e| Error::MalformedFile(e.to_string()))?;
    from_file(file)
}

pub fn save_model(saved: &SavedModel, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_model(saved, &mut buf)?;
    std::fs::write(path, buf).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: &Path) -> Result<SavedModel> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_model(std::io::BufReader::new(file))
}
