//! Classification and retrieval by orientation-vector matching.
//!
//! A probe is assigned the labels of the training entries whose OVs have the
//! largest dot product with the probe OV (equivalently, smallest Hamming
//! distance). Ties across classes are reported, not broken.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{compute_ov, ov_dot, ClassId, Dataset, OrientationVector, PlaneSet, SamplePoint, DEFAULT_TAU};
use crate::separator::{init_planes_lenient, separate};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub id: u64,
    pub coords: Vec<f64>,
    pub label: ClassId,
    pub ov: OrientationVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlaneSource {
    /// Planes built from scratch by the separator.
    Separated,
    /// Planes supplied by the caller, extended by the separator if required.
    Supplied,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMetadata {
    pub generator: String,
    pub n: usize,
    pub q: usize,
    pub num_points: usize,
    pub plane_source: PlaneSource,
    pub initial_planes: usize,
    pub collisions_resolved: usize,
    /// Features whose initial plane pivots on `mean + std` because the mean was zero.
    #[serde(default)]
    pub zero_mean_fallback: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModelM1 {
    pub planes: PlaneSet,
    pub entries: Vec<Entry>,
    pub tau: f64,
    pub metadata: ModelMetadata,
    pub payloads: BTreeMap<OrientationVector, Vec<Vec<u8>>>,
}

#[derive(Debug, Clone)]
pub struct TrainOptions {
    pub tau: f64,
    /// Starting planes; `None` uses one axis plane per feature through the feature mean.
    pub planes: Option<PlaneSet>,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self {
            tau: DEFAULT_TAU,
            planes: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatchReport {
    pub probe_ov: OrientationVector,
    pub predicted_labels: BTreeSet<ClassId>,
    pub best_dot: i64,
    pub best_distance: usize,
    pub matched_ids: Vec<u64>,
    pub ambiguous: bool,
}

impl MatchReport {
    /// The single predicted class, if the match is unambiguous.
    pub fn label(&self) -> Option<ClassId> {
        if self.ambiguous {
            None
        } else {
            self.predicted_labels.iter().next().copied()
        }
    }

    /// Correct only when the label set is exactly `{truth}`.
    pub fn is_correct(&self, truth: ClassId) -> bool {
        self.label() == Some(truth)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Retrieval {
    pub probe_ov: OrientationVector,
    pub keys: Vec<OrientationVector>,
    pub best_dot: i64,
    pub best_distance: usize,
    pub payloads: Vec<Vec<u8>>,
}

pub fn train_m1(dataset: &Dataset, options: &TrainOptions) -> Result<TrainedModelM1> {
    dataset.require_labels()?;
    let (init, fallback, source) = match &options.planes {
        Some(planes) => (planes.clone(), Vec::new(), PlaneSource::Supplied),
        None => {
            let (planes, fallback) = init_planes_lenient(dataset, options.tau)?;
            (planes, fallback, PlaneSource::Separated)
        }
    };
    let separation = separate(dataset, init, options.tau)?;
    let entries = dataset
        .points()
        .iter()
        .map(|p| Entry {
            id: p.id,
            coords: p.coords.clone(),
            label: p.label.expect("labels checked"),
            ov: separation.point_ovs[&p.id].clone(),
        })
        .collect();
    let metadata = ModelMetadata {
        generator: concat!("planesep ", env!("CARGO_PKG_VERSION")).to_string(),
        n: dataset.dim(),
        q: separation.q,
        num_points: dataset.len(),
        plane_source: source,
        initial_planes: separation.initial_planes,
        collisions_resolved: separation.collisions_resolved,
        zero_mean_fallback: fallback,
    };
    Ok(TrainedModelM1 {
        planes: separation.planes,
        entries,
        tau: options.tau,
        metadata,
        payloads: BTreeMap::new(),
    })
}

impl TrainedModelM1 {
    pub fn dim(&self) -> usize {
        self.metadata.n
    }

    pub fn q(&self) -> usize {
        self.planes.len()
    }

    pub fn ov_of(&self, probe: &SamplePoint) -> Result<OrientationVector> {
        if probe.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: probe.dim(),
            });
        }
        compute_ov(probe, &self.planes, self.tau)
    }

    /// Entry OVs must be zero-free, pairwise distinct and recompute from coords.
    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::with_capacity(self.entries.len());
        for e in &self.entries {
            if e.ov.len() != self.q() {
                return Err(Error::LengthMismatch {
                    left: e.ov.len(),
                    right: self.q(),
                });
            }
            let probe = SamplePoint::new(e.id, e.coords.clone(), None);
            let fresh = self.ov_of(&probe)?;
            if let Some(k) = (0..fresh.len()).find(|&k| fresh.components()[k] != e.ov.components()[k]) {
                return Err(Error::OvMismatch {
                    point_id: e.id,
                    plane_index: k,
                });
            }
            if !seen.insert(&e.ov) {
                return Err(Error::MalformedFile(format!(
                    "point {} repeats another entry's orientation vector",
                    e.id
                )));
            }
        }
        Ok(())
    }
}

pub fn classify_m1(model: &TrainedModelM1, probe: &SamplePoint) -> Result<MatchReport> {
    let probe_ov = model.ov_of(probe)?;
    let mut best_dot = i64::MIN;
    let mut matched: Vec<&Entry> = Vec::new();
    for entry in &model.entries {
        let dot = ov_dot(&probe_ov, &entry.ov)?;
        if dot > best_dot {
            best_dot = dot;
            matched.clear();
        }
        if dot == best_dot {
            matched.push(entry);
        }
    }
    if matched.is_empty() {
        return Err(Error::EmptyStore);
    }
    let predicted_labels: BTreeSet<ClassId> = matched.iter().map(|e| e.label).collect();
    Ok(MatchReport {
        best_distance: distance_from_dot(model.q(), best_dot),
        ambiguous: predicted_labels.len() > 1,
        matched_ids: matched.iter().map(|e| e.id).collect(),
        predicted_labels,
        best_dot,
        probe_ov,
    })
}

fn distance_from_dot(q: usize, dot: i64) -> usize {
    ((q as i64 - dot) / 2) as usize
}

/// Files `payload` under the OV of `point`. Several payloads may share a key.
pub fn store_record(store: &mut TrainedModelM1, point: &SamplePoint, payload: Vec<u8>) -> Result<()> {
    let key = store.ov_of(point)?;
    store.payloads.entry(key).or_default().push(payload);
    Ok(())
}

/// Returns every payload filed under the stored key(s) closest to the probe OV.
pub fn retrieve(store: &TrainedModelM1, probe: &SamplePoint) -> Result<Retrieval> {
    let probe_ov = store.ov_of(probe)?;
    if store.payloads.is_empty() {
        return Err(Error::EmptyStore);
    }
    let mut best_dot = i64::MIN;
    let mut keys: Vec<&OrientationVector> = Vec::new();
    for key in store.payloads.keys() {
        let dot = ov_dot(&probe_ov, key)?;
        if dot > best_dot {
            best_dot = dot;
            keys.clear();
        }
        if dot == best_dot {
            keys.push(key);
        }
    }
    let payloads = keys.iter().flat_map(|k| store.payloads[*k].iter().cloned()).collect();
    Ok(Retrieval {
        best_distance: distance_from_dot(store.q(), best_dot),
        keys: keys.into_iter().cloned().collect(),
        best_dot,
        payloads,
        probe_ov,
    })
}
