//! The bundled IRIS golden data.
//!
//! Seven text files are compiled into the crate and listed with their
//! SHA-256 digests in `SHA256SUMS`. A copy on disk can be loaded in their
//! place and compared field by field against the compiled-in originals.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::clusters::{bubble_ov, Bubble, Cluster, TrainedModelM2};
use crate::dataset::{read_planes, read_points, LabelMap};
use crate::error::{Error, Result};
use crate::geometry::{centroid, euclidean, ClassId, Dataset, OrientationVector, PlaneSet, DEFAULT_TAU};
use crate::method1::{Entry, ModelMetadata, PlaneSource, TrainedModelM1};

pub const PLANES: &str = "planes.csv";
pub const TRAIN: &str = "train.csv";
pub const TEST: &str = "test.csv";
pub const TRAIN_OVS: &str = "train_ovs.txt";
pub const TEST_OVS: &str = "test_ovs.txt";
pub const BUBBLES: &str = "bubbles.txt";
pub const CLUSTERS: &str = "clusters.txt";

pub const FILES: [&str; 7] = [PLANES, TRAIN, TEST, TRAIN_OVS, TEST_OVS, BUBBLES, CLUSTERS];

const MANIFEST: &str = include_str!("../fixtures/iris/SHA256SUMS");

const EMBEDDED: [(&str, &str); 7] = [
    (PLANES, include_str!("../fixtures/iris/planes.csv")),
    (TRAIN, include_str!("../fixtures/iris/train.csv")),
    (TEST, include_str!("../fixtures/iris/test.csv")),
    (TRAIN_OVS, include_str!("../fixtures/iris/train_ovs.txt")),
    (TEST_OVS, include_str!("../fixtures/iris/test_ovs.txt")),
    (BUBBLES, include_str!("../fixtures/iris/bubbles.txt")),
    (CLUSTERS, include_str!("../fixtures/iris/clusters.txt")),
];

/// Raw text of the seven fixture files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixtureSource {
    files: BTreeMap<&'static str, String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChecksumMismatch {
    pub file: &'static str,
    pub expected: String,
    pub actual: String,
}

impl FixtureSource {
    pub fn embedded() -> Self {
        Self {
            files: EMBEDDED.iter().map(|(n, t)| (*n, t.to_string())).collect(),
        }
    }

    pub fn from_dir(dir: &Path) -> Result<Self> {
        let mut files = BTreeMap::new();
        for name in FILES {
            let path = dir.join(name);
            let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            files.insert(name, text);
        }
        Ok(Self { files })
    }

    pub fn text(&self, name: &str) -> &str {
        self.files.get(name).map_or("", String::as_str)
    }

    pub fn write_to(&self, dir: &Path) -> Result<()> {
        for (name, text) in &self.files {
            let path = dir.join(name);
            std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    }

    pub fn checksum_mismatches(&self) -> Vec<ChecksumMismatch> {
        let expected: BTreeMap<&str, &str> = MANIFEST
            .lines()
            .filter_map(|l| l.split_once("  "))
            .map(|(digest, name)| (name.trim(), digest.trim()))
            .collect();
        FILES
            .iter()
            .filter_map(|name| {
                let actual = sha256_hex(self.text(name));
                let want = expected.get(name).copied().unwrap_or_default();
                (actual != want).then(|| ChecksumMismatch {
                    file: name,
                    expected: want.to_string(),
                    actual,
                })
            })
            .collect()
    }

    /// Field-level differences against the compiled-in originals, at most
    /// `limit` lines.
    pub fn diff_against_embedded(&self, limit: usize) -> Vec<String> {
        let golden = Self::embedded();
        let mut out = Vec::new();
        for name in FILES {
            diff_text(name, golden.text(name), self.text(name), limit, &mut out);
        }
        out.truncate(limit);
        out
    }
}

fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn fields(line: &str) -> Vec<&str> {
    line.split(|c: char| c == ',' || c == ':' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .collect()
}

fn diff_text(name: &str, golden: &str, found: &str, limit: usize, out: &mut Vec<String>) {
    let g: Vec<&str> = golden.lines().collect();
    let f: Vec<&str> = found.lines().collect();
    if g.len() != f.len() {
        out.push(format!("{name}: golden has {} lines, found {}", g.len(), f.len()));
    }
    for (i, (gl, fl)) in g.iter().zip(&f).enumerate() {
        if out.len() >= limit {
            return;
        }
        if gl == fl {
            continue;
        }
        let (gf, ff) = (fields(gl), fields(fl));
        let first = gf.iter().zip(&ff).position(|(a, b)| a != b);
        match first {
            Some(k) => out.push(format!(
                "{name} line {} field {}: golden {:?}, found {:?}",
                i + 1,
                k + 1,
                gf[k],
                ff[k]
            )),
            None if gf.len() != ff.len() => out.push(format!(
                "{name} line {}: golden has {} fields, found {}",
                i + 1,
                gf.len(),
                ff.len()
            )),
            None => out.push(format!("{name} line {}: whitespace differs", i + 1)),
        }
    }
}

/// Parsed fixture contents.
#[derive(Debug, Clone)]
pub struct IrisFixtures {
    pub planes: PlaneSet,
    pub train: Dataset,
    pub test: Dataset,
    pub train_ovs: BTreeMap<u64, OrientationVector>,
    pub test_ovs: BTreeMap<u64, OrientationVector>,
    /// `(bubble id, member point ids)` as listed.
    pub bubbles: Vec<(usize, Vec<u64>)>,
    /// `(cluster id, bubble ids)` as listed.
    pub clusters: Vec<(usize, Vec<usize>)>,
}

impl IrisFixtures {
    pub fn embedded() -> Self {
        Self::parse(&FixtureSource::embedded()).expect("embedded fixtures parse")
    }

    pub fn load_dir(dir: &Path) -> Result<Self> {
        Self::parse(&FixtureSource::from_dir(dir)?)
    }

    pub fn parse(source: &FixtureSource) -> Result<Self> {
        let mut labels = LabelMap::new();
        Ok(Self {
            planes: read_planes(source.text(PLANES).as_bytes(), PLANES)?,
            train: read_points(source.text(TRAIN).as_bytes(), TRAIN, &mut labels)?,
            test: read_points(source.text(TEST).as_bytes(), TEST, &mut labels)?,
            train_ovs: parse_ovs(source.text(TRAIN_OVS), TRAIN_OVS)?,
            test_ovs: parse_ovs(source.text(TEST_OVS), TEST_OVS)?,
            bubbles: parse_listing(source.text(BUBBLES), BUBBLES)?,
            clusters: parse_listing(source.text(CLUSTERS), CLUSTERS)?,
        })
    }
}

fn parse_ovs(text: &str, origin: &str) -> Result<BTreeMap<u64, OrientationVector>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let bad = || Error::MalformedFile(format!("{origin}:{}: {line:?}", i + 1));
        let mut tokens = line.split_whitespace();
        let id: u64 = tokens.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let comps = tokens
            .map(|t| t.parse::<i8>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        let ov = OrientationVector::new(comps).map_err(|_| bad())?;
        if out.insert(id, ov).is_some() {
            return Err(Error::DuplicateId(id));
        }
    }
    Ok(out)
}

fn parse_listing<T: std::str::FromStr>(text: &str, origin: &str) -> Result<Vec<(usize, Vec<T>)>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let bad = || Error::MalformedFile(format!("{origin}:{}: {line:?}", i + 1));
            let (head, rest) = line.split_once(':').ok_or_else(bad)?;
            let id = head.trim().parse().map_err(|_| bad())?;
            let members = rest
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?;
            Ok((id, members))
        })
        .collect()
}

/// Oddities in a bubble listing relative to the training set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ListingAnomalies {
    /// Point ids listed in more than one bubble, with the bubbles naming them.
    pub repeated: BTreeMap<u64, Vec<usize>>,
    pub missing: BTreeSet<u64>,
    pub unknown: BTreeSet<u64>,
    pub impure: Vec<usize>,
}

impl ListingAnomalies {
    pub fn is_clean(&self) -> bool {
        self.repeated.is_empty() && self.missing.is_empty() && self.unknown.is_empty() && self.impure.is_empty()
    }
}

pub fn listing_anomalies(bubbles: &[(usize, Vec<u64>)], train: &Dataset) -> ListingAnomalies {
    let mut seen: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    let mut out = ListingAnomalies::default();
    for (bid, members) in bubbles {
        let classes: BTreeSet<Option<ClassId>> = members
            .iter()
            .filter_map(|id| train.get(*id))
            .map(|p| p.label)
            .collect();
        if classes.len() > 1 {
            out.impure.push(*bid);
        }
        for id in members {
            seen.entry(*id).or_default().push(*bid);
            if train.get(*id).is_none() {
                out.unknown.insert(*id);
            }
        }
    }
    out.repeated = seen
        .iter()
        .filter(|(_, b)| b.len() > 1)
        .map(|(k, v)| (*k, v.clone()))
        .collect();
    out.missing = train
        .points()
        .iter()
        .map(|p| p.id)
        .filter(|id| !seen.contains_key(id))
        .collect();
    out
}

/// When exactly one point is listed twice and exactly one training point of
/// the same class is listed nowhere, replaces the occurrence in the larger
/// bubble with the missing point. Returns the bubble edited, if any.
pub fn repair_listing(bubbles: &mut [(usize, Vec<u64>)], train: &Dataset) -> Option<(usize, u64, u64)> {
    let anomalies = listing_anomalies(bubbles, train);
    if anomalies.repeated.len() != 1 || anomalies.missing.len() != 1 || !anomalies.unknown.is_empty() {
        return None;
    }
    let (&dup, holders) = anomalies.repeated.iter().next()?;
    let &missing = anomalies.missing.iter().next()?;
    if train.get(dup)?.label != train.get(missing)?.label {
        return None;
    }
    let target = holders
        .iter()
        .copied()
        .max_by_key(|bid| bubbles.iter().find(|(b, _)| b == bid).map_or(0, |(_, m)| m.len()))?;
    let (_, members) = bubbles.iter_mut().find(|(b, _)| *b == target)?;
    let slot = members.iter_mut().find(|m| **m == dup)?;
    *slot = missing;
    Some((target, dup, missing))
}

/// A Method-2 model built from fixture bubble and cluster listings over the
/// given planes. Bubble centers are member centroids; cluster OVs follow the
/// same disabling rule as trained models.
pub fn listed_model(
    fixtures: &IrisFixtures,
    bubbles: &[(usize, Vec<u64>)],
    relative_epsilon: f64,
) -> Result<TrainedModelM2> {
    let train = &fixtures.train;
    let planes = &fixtures.planes;
    let eps = relative_epsilon * train.diagonal();
    let mut built = Vec::with_capacity(bubbles.len());
    for (bid, members) in bubbles {
        let rows = members
            .iter()
            .map(|id| {
                train
                    .get(*id)
                    .map(|p| p.coords.as_slice())
                    .ok_or_else(|| Error::MalformedFile(format!("bubble {bid} names unknown point {id}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let center = centroid(rows.iter().copied());
        let extent = rows.iter().map(|r| euclidean(&center, r)).fold(0.0, f64::max);
        let clearance = train
            .points()
            .iter()
            .filter(|p| !members.contains(&p.id))
            .map(|p| euclidean(&center, &p.coords))
            .fold(f64::INFINITY, f64::min);
        let label = train
            .get(members[0])
            .and_then(|p| p.label)
            .ok_or(Error::Unlabeled { id: members[0] })?;
        built.push(Bubble {
            id: *bid,
            member_ids: members.clone(),
            class_label: label,
            center,
            radius: clearance - eps,
            extent,
        });
    }
    let by_id: BTreeMap<usize, &Bubble> = built.iter().map(|b| (b.id, b)).collect();
    let mut clusters = Vec::with_capacity(fixtures.clusters.len());
    for (cid, bids) in &fixtures.clusters {
        let ovs = bids
            .iter()
            .map(|b| {
                let bubble = by_id
                    .get(b)
                    .ok_or_else(|| Error::MalformedFile(format!("cluster {cid} names unknown bubble {b}")))?;
                bubble_ov(bubble, planes, train, DEFAULT_TAU)
            })
            .collect::<Result<Vec<_>>>()?;
        let comps = (0..planes.len())
            .map(|k| {
                let first = ovs[0].components()[k];
                if ovs.iter().all(|o| o.components()[k] == first) {
                    first
                } else {
                    0
                }
            })
            .collect();
        clusters.push(Cluster {
            id: *cid,
            bubble_ids: bids.clone(),
            class_label: by_id[&bids[0]].class_label,
            ov: OrientationVector::new(comps)?,
        });
    }
    let entries = train
        .points()
        .iter()
        .map(|p| {
            Ok(Entry {
                id: p.id,
                coords: p.coords.clone(),
                label: p.label.ok_or(Error::Unlabeled { id: p.id })?,
                ov: crate::geometry::compute_ov(p, planes, DEFAULT_TAU)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let base = TrainedModelM1 {
        planes: planes.clone(),
        entries,
        tau: DEFAULT_TAU,
        metadata: ModelMetadata {
            generator: concat!("planesep ", env!("CARGO_PKG_VERSION")).to_string(),
            n: train.dim(),
            q: planes.len(),
            num_points: train.len(),
            plane_source: PlaneSource::Supplied,
            initial_planes: planes.len(),
            collisions_resolved: 0,
            zero_mean_fallback: Vec::new(),
        },
        payloads: BTreeMap::new(),
    };
    Ok(TrainedModelM2 {
        base,
        bubbles: built,
        clusters,
        extra_planes: 0,
        relative_epsilon,
        max_disabled_planes: None,
    })
}
