//! The two-layer network read directly off a Method-2 model.
//!
//! Layer 1 has one sign unit per plane (bias 1, weights α). Layer 2 has one
//! linear unit per cluster whose integer weights are the cluster OV, so its
//! output is `u_j = Ov(P)·Ov(c_j)`. The prediction is the class of the
//! largest `u_j`.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::clusters::TrainedModelM2;
use crate::error::{Error, Result};
use crate::geometry::{sgn, ClassId, OrientationVector, SamplePoint};

pub const NETWORK_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignUnit {
    pub bias: f64,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterUnit {
    pub cluster_id: usize,
    pub class: ClassId,
    pub weights: Vec<i8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassName {
    pub id: ClassId,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub version: u32,
    pub n: usize,
    pub q: usize,
    pub tau: f64,
    pub layer1: Vec<SignUnit>,
    pub layer2: Vec<ClusterUnit>,
    pub class_names: Vec<ClassName>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Forward {
    /// `None` when clusters of different classes tie for the maximum.
    pub prediction: Option<ClassId>,
    pub labels: BTreeSet<ClassId>,
    pub u: Vec<i64>,
    pub ambiguous: bool,
    /// Lowest-id cluster attaining the maximum.
    pub winner: usize,
    pub ov: OrientationVector,
}

pub fn build_network(model: &TrainedModelM2) -> NetworkSpec {
    let layer1 = model
        .base
        .planes
        .iter()
        .map(|p| SignUnit {
            bias: p.bias(),
            weights: p.coeffs().to_vec(),
        })
        .collect();
    let layer2 = model
        .clusters
        .iter()
        .map(|c| ClusterUnit {
            cluster_id: c.id,
            class: c.class_label,
            weights: c.ov.components().to_vec(),
        })
        .collect();
    let classes: BTreeSet<ClassId> = model.clusters.iter().map(|c| c.class_label).collect();
    NetworkSpec {
        version: NETWORK_VERSION,
        n: model.base.dim(),
        q: model.base.q(),
        tau: model.base.tau,
        layer1,
        layer2,
        class_names: classes
            .into_iter()
            .map(|id| ClassName {
                id,
                name: id.to_string(),
            })
            .collect(),
    }
}

impl NetworkSpec {
    pub fn with_class_names(mut self, names: &BTreeMap<ClassId, String>) -> Self {
        for c in &mut self.class_names {
            if let Some(name) = names.get(&c.id) {
                c.name = name.clone();
            }
        }
        self
    }

    pub fn class_name(&self, id: ClassId) -> Option<&str> {
        self.class_names.iter().find(|c| c.id == id).map(|c| c.name.as_str())
    }

    /// Layer-1 output: the probe OV.
    pub fn first_layer(&self, point: &SamplePoint) -> Result<OrientationVector> {
        if point.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: point.dim(),
            });
        }
        let mut ov = Vec::with_capacity(self.q);
        for (k, unit) in self.layer1.iter().enumerate() {
            let z = unit
                .weights
                .iter()
                .zip(&point.coords)
                .fold(unit.bias, |acc, (a, x)| acc + a * x);
            ov.push(sgn(z, self.tau).map_err(|_| Error::OnPlane {
                point_id: point.id,
                plane_index: k,
                value: z,
            })?);
        }
        Ok(OrientationVector::from_raw(ov))
    }

    fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::MalformedFile(msg));
        if self.version != NETWORK_VERSION {
            return Err(Error::VersionMismatch {
                expected: NETWORK_VERSION,
                found: self.version,
            });
        }
        if self.layer1.len() != self.q {
            return bad(format!("q = {} but layer1 has {} units", self.q, self.layer1.len()));
        }
        if !(self.tau >= 0.0 && self.tau.is_finite()) {
            return bad("tau must be finite and non-negative".into());
        }
        for (k, unit) in self.layer1.iter().enumerate() {
            if unit.bias != 1.0 {
                return bad(format!("layer1 unit {k} has bias {} (expected 1)", unit.bias));
            }
            if unit.weights.len() != self.n || unit.weights.iter().any(|w| !w.is_finite()) {
                return bad(format!("layer1 unit {k} weights are not {} finite numbers", self.n));
            }
        }
        if self.layer2.is_empty() {
            return bad("layer2 is empty".into());
        }
        for unit in &self.layer2 {
            if unit.weights.len() != self.q || unit.weights.iter().any(|w| !(-1..=1).contains(w)) {
                return bad(format!(
                    "layer2 unit {} weights are not {} values in -1..=1",
                    unit.cluster_id, self.q
                ));
            }
        }
        Ok(())
    }
}

/// Layer 2 and the argmax selector.
pub fn forward(network: &NetworkSpec, point: &SamplePoint) -> Result<Forward> {
    let ov = network.first_layer(point)?;
    let u: Vec<i64> = network
        .layer2
        .iter()
        .map(|unit| {
            unit.weights
                .iter()
                .zip(ov.components())
                .map(|(w, s)| i64::from(w * s))
                .sum()
        })
        .collect();
    let best = *u.iter().max().ok_or(Error::EmptyStore)?;
    let top: Vec<&ClusterUnit> = network
        .layer2
        .iter()
        .zip(&u)
        .filter(|(_, &v)| v == best)
        .map(|(c, _)| c)
        .collect();
    let labels: BTreeSet<ClassId> = top.iter().map(|c| c.class).collect();
    let winner = top.iter().map(|c| c.cluster_id).min().expect("nonempty");
    let ambiguous = labels.len() > 1;
    Ok(Forward {
        prediction: if ambiguous { None } else { labels.iter().next().copied() },
        labels,
        u,
        ambiguous,
        winner,
        ov,
    })
}

pub fn export_network(network: &NetworkSpec, destination: impl Write) -> Result<()> {
    let mut destination = destination;
    serde_json::to_writer_pretty(&mut destination, network).map_err(|e| Error::MalformedFile(e.to_string()))?;
    destination.write_all(b"\n").map_err(|e| Error::io("<network>", e))
}

pub fn import_network(source: impl Read) -> Result<NetworkSpec> {
    let value: serde_json::Value = serde_json::from_reader(source).map_err(|e| Error::MalformedFile(e.to_string()))?;
    let found = value
        .get("version")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| Error::MalformedFile("missing version".into()))?;
    if found != u64::from(NETWORK_VERSION) {
        return Err(Error::VersionMismatch {
            expected: NETWORK_VERSION,
            found: u32::try_from(found).unwrap_or(u32::MAX),
        });
    }
    let network: NetworkSpec = serde_json::from_value(value).map_err(|e| Error::MalformedFile(e.to_string()))?;
    network.check()?;
    Ok(network)
}

pub fn save_network(network: &NetworkSpec, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    export_network(network, std::io::BufWriter::new(file))
}

pub fn load_network(path: &Path) -> Result<NetworkSpec> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    import_network(std::io::BufReader::new(file))
}
