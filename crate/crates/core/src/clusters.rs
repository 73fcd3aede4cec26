//! Pure-bubble discovery, merging into OV-labeled clusters, and extra planes
//! for different-class clusters that the existing planes do not split.
//!
//! Bubble growth: seed at the lowest remaining id, repeatedly absorb the
//! nearest remaining point while it has the seed's class, re-centering on the
//! members' centroid after each step. Growth stops at the first foreign
//! neighbour, when the remaining set runs out, or when absorbing the neighbour
//! would leave more than `max_disabled_planes` planes passing through the
//! bubble. The bubble's clearance radius is the distance from its center to
//! the nearest non-member point minus ε; if the farthest member does not fit
//! inside it, growth is rolled back to the last member set that fits.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{centroid, euclidean, sgn, ClassId, Dataset, Hyperplane, OrientationVector, PlaneSet};
use crate::method1::{train_m1, TrainOptions, TrainedModelM1};
use crate::separator::clear_points;

pub const DEFAULT_RELATIVE_EPSILON: f64 = 1e-6;
pub const DEFAULT_MAX_DISABLED_PLANES: usize = 4;
const RELATIVE_EPSILON_MIN: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bubble {
    pub id: usize,
    pub member_ids: Vec<u64>,
    pub class_label: ClassId,
    pub center: Vec<f64>,
    /// Clearance radius: no non-member lies strictly inside this ball.
    pub radius: f64,
    /// Distance from the center to the farthest member.
    pub extent: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cluster {
    pub id: usize,
    pub bubble_ids: Vec<usize>,
    pub class_label: ClassId,
    pub ov: OrientationVector,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BubbleConfig {
    /// Absolute ε subtracted from the clearance radius.
    pub epsilon: f64,
    /// Radius floor for bubbles that end because no points remain.
    pub epsilon_min: f64,
    pub max_disabled_planes: Option<usize>,
}

impl BubbleConfig {
    /// ε = `relative_epsilon` × bounding-box diagonal, ε_min = 1e-9 × diagonal.
    pub fn for_dataset(dataset: &Dataset, relative_epsilon: f64, max_disabled_planes: Option<usize>) -> Self {
        let diag = dataset.diagonal();
        Self {
            epsilon: relative_epsilon * diag,
            epsilon_min: RELATIVE_EPSILON_MIN * diag,
            max_disabled_planes,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Stop {
    Foreign,
    Budget,
    Exhausted,
}

/// Which planes pass through the ball `(center, extent)` or split the members.
fn disabled_mask(planes: &PlaneSet, center: &[f64], extent: f64, members: &[&[f64]]) -> Vec<bool> {
    planes
        .iter()
        .map(|plane| plane_disabled_at(plane, center, extent, members))
        .collect()
}

fn plane_disabled_at(plane: &Hyperplane, center: &[f64], extent: f64, members: &[&[f64]]) -> bool {
    let distance = plane.eval_unchecked(center).abs() / plane.normal_norm();
    if distance <= extent {
        return true;
    }
    let mut sides = members.iter().map(|m| plane.eval_unchecked(m) > 0.0);
    match sides.next() {
        Some(first) => sides.any(|s| s != first),
        None => false,
    }
}

pub fn plane_disabled_for(plane: &Hyperplane, bubble: &Bubble, dataset: &Dataset) -> bool {
    let members = member_coords(bubble, dataset);
    plane_disabled_at(plane, &bubble.center, bubble.extent, &members)
}

fn member_coords<'a>(bubble: &Bubble, dataset: &'a Dataset) -> Vec<&'a [f64]> {
    bubble
        .member_ids
        .iter()
        .filter_map(|id| dataset.get(*id))
        .map(|p| p.coords.as_slice())
        .collect()
}

fn extent_of(center: &[f64], members: &[&[f64]]) -> f64 {
    members.iter().map(|m| euclidean(center, m)).fold(0.0, f64::max)
}

pub fn discover_bubbles(dataset: &Dataset, planes: &PlaneSet, config: &BubbleConfig) -> Result<Vec<Bubble>> {
    dataset.require_labels()?;
    if config.epsilon.is_nan() || config.epsilon <= 0.0 {
        return Err(Error::DegeneratePlane("epsilon must be positive".into()));
    }
    let points = dataset.points();
    let label = |i: usize| points[i].label.expect("labels checked");
    let coords = |i: usize| points[i].coords.as_slice();

    let mut remaining: BTreeSet<usize> = (0..points.len()).collect();
    let mut bubbles = Vec::new();

    while let Some(&seed) = remaining.first() {
        let class = label(seed);
        let mut members = vec![seed];
        let mut center = coords(seed).to_vec();
        let mut history = vec![(members.clone(), center.clone())];

        let stop = loop {
            let nearest = remaining
                .iter()
                .filter(|i| !members.contains(i))
                .map(|&i| (euclidean(&center, coords(i)), i))
                .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let Some((_, q)) = nearest else {
                break Stop::Exhausted;
            };
            if label(q) != class {
                break Stop::Foreign;
            }
            let mut grown = members.clone();
            grown.push(q);
            let grown_coords: Vec<&[f64]> = grown.iter().map(|&i| coords(i)).collect();
            let grown_center = centroid(grown_coords.iter().copied());
            if let Some(budget) = config.max_disabled_planes {
                let extent = extent_of(&grown_center, &grown_coords);
                let disabled = disabled_mask(planes, &grown_center, extent, &grown_coords)
                    .into_iter()
                    .filter(|&d| d)
                    .count();
                if disabled > budget {
                    break Stop::Budget;
                }
            }
            members = grown;
            center = grown_center;
            history.push((members.clone(), center.clone()));
        };

        let last = history.len() - 1;
        let mut chosen = None;
        for (step, (ms, c)) in history.iter().enumerate().rev() {
            let member_rows: Vec<&[f64]> = ms.iter().map(|&i| coords(i)).collect();
            let extent = extent_of(c, &member_rows);
            let clearance = (0..points.len())
                .filter(|i| !ms.contains(i))
                .map(|i| euclidean(c, coords(i)))
                .fold(f64::INFINITY, f64::min);
            let radius = if stop == Stop::Exhausted && step == last {
                let r = extent.max(config.epsilon_min);
                (r < clearance).then_some(r)
            } else if extent < clearance - config.epsilon {
                Some(clearance - config.epsilon)
            } else {
                None
            };
            if let Some(radius) = radius {
                chosen = Some((step, radius, extent));
                break;
            }
        }
        // A lone seed always fits; only an ε larger than the gap gets here.
        let (step, radius, extent) = chosen.unwrap_or_else(|| {
            let clearance = (0..points.len())
                .filter(|&i| i != seed)
                .map(|i| euclidean(coords(seed), coords(i)))
                .fold(f64::INFINITY, f64::min);
            (0, clearance / 2.0, 0.0)
        });
        let (ms, c) = &history[step];
        for i in ms {
            remaining.remove(i);
        }
        bubbles.push(Bubble {
            id: bubbles.len() + 1,
            member_ids: ms.iter().map(|&i| points[i].id).collect(),
            class_label: class,
            center: c.clone(),
            radius,
            extent,
        });
    }
    Ok(bubbles)
}

/// Component k is 0 when plane k is disabled for the bubble, otherwise the
/// members' common side.
pub fn bubble_ov(bubble: &Bubble, planes: &PlaneSet, dataset: &Dataset, tau: f64) -> Result<OrientationVector> {
    let members = member_coords(bubble, dataset);
    let mut components = Vec::with_capacity(planes.len());
    for (k, plane) in planes.iter().enumerate() {
        components.push(bubble_component(bubble, k, plane, &members, tau)?);
    }
    Ok(OrientationVector::from_raw(components))
}

fn bubble_component(bubble: &Bubble, k: usize, plane: &Hyperplane, members: &[&[f64]], tau: f64) -> Result<i8> {
    if plane_disabled_at(plane, &bubble.center, bubble.extent, members) {
        return Ok(0);
    }
    let Some(first) = members.first() else {
        return Ok(0);
    };
    let side = sgn(plane.eval_unchecked(first), tau).map_err(|_| Error::OnPlane {
        point_id: bubble.member_ids[0],
        plane_index: k,
        value: plane.eval_unchecked(first),
    })?;
    let center_side = plane.eval_unchecked(&bubble.center) > 0.0;
    if center_side != (side > 0) {
        return Err(Error::InconsistentSign {
            bubble_id: bubble.id,
            plane_index: k,
        });
    }
    Ok(side)
}

fn combine(ovs: &[&OrientationVector]) -> OrientationVector {
    let q = ovs.first().map_or(0, |o| o.len());
    let components = (0..q)
        .map(|k| {
            let first = ovs[0].components()[k];
            if ovs.iter().all(|o| o.components()[k] == first) {
                first
            } else {
                0
            }
        })
        .collect();
    OrientationVector::from_raw(components)
}

/// Groups same-class bubbles whose OVs coincide. Cluster ids start at 1 and
/// follow the order of each group's first bubble.
pub fn merge_bubbles(bubbles: &[Bubble], planes: &PlaneSet, dataset: &Dataset, tau: f64) -> Result<Vec<Cluster>> {
    let ovs = bubbles
        .iter()
        .map(|b| bubble_ov(b, planes, dataset, tau))
        .collect::<Result<Vec<_>>>()?;
    let mut order: Vec<(ClassId, OrientationVector)> = Vec::new();
    let mut groups: BTreeMap<(ClassId, OrientationVector), Vec<usize>> = BTreeMap::new();
    for (b, ov) in bubbles.iter().zip(&ovs) {
        let key = (b.class_label, ov.clone());
        let slot = groups.entry(key.clone()).or_default();
        if slot.is_empty() {
            order.push(key);
        }
        slot.push(b.id);
    }
    let by_id: BTreeMap<usize, &OrientationVector> = bubbles.iter().map(|b| b.id).zip(&ovs).collect();
    Ok(order
        .into_iter()
        .enumerate()
        .map(|(i, key)| {
            let bubble_ids = groups.remove(&key).expect("grouped");
            let member_ovs: Vec<&OrientationVector> = bubble_ids.iter().map(|id| by_id[id]).collect();
            Cluster {
                id: i + 1,
                bubble_ids,
                class_label: key.0,
                ov: combine(&member_ovs),
            }
        })
        .collect())
}

/// True when some plane is enabled for both OVs and puts them on opposite sides.
pub fn separated(a: &OrientationVector, b: &OrientationVector) -> bool {
    a.components().iter().zip(b.components()).any(|(x, y)| x * y == -1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSeparation {
    pub planes: PlaneSet,
    pub clusters: Vec<Cluster>,
    pub added_planes: usize,
    pub splits: usize,
}

/// Ball around a cluster that contains the extent ball of every member bubble.
fn cluster_ball(cluster: &Cluster, bubbles: &BTreeMap<usize, &Bubble>, dataset: &Dataset) -> (Vec<f64>, f64) {
    let rows: Vec<&[f64]> = cluster
        .bubble_ids
        .iter()
        .flat_map(|id| member_coords(bubbles[id], dataset))
        .collect();
    let center = centroid(rows.iter().copied());
    let radius = cluster
        .bubble_ids
        .iter()
        .map(|id| {
            let b = bubbles[id];
            euclidean(&center, &b.center) + b.extent
        })
        .fold(0.0, f64::max);
    (center, radius)
}

fn first_unseparated(clusters: &[Cluster]) -> Option<(usize, usize)> {
    for i in 0..clusters.len() {
        for j in i + 1..clusters.len() {
            if clusters[i].class_label != clusters[j].class_label && !separated(&clusters[i].ov, &clusters[j].ov) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Adds planes until every pair of different-class clusters is split by a
/// plane enabled for both. Each plane is perpendicular to the segment joining
/// the two cluster centers and sits in the middle of the gap between their
/// balls. A pair whose balls overlap is retried with the larger cluster split
/// back into its bubbles.
pub fn ensure_cluster_separation(
    clusters: Vec<Cluster>,
    bubbles: &[Bubble],
    planes: PlaneSet,
    dataset: &Dataset,
    tau: f64,
) -> Result<ClusterSeparation> {
    let by_id: BTreeMap<usize, &Bubble> = bubbles.iter().map(|b| (b.id, b)).collect();
    let mut bubble_ovs: BTreeMap<usize, OrientationVector> = BTreeMap::new();
    for b in bubbles {
        bubble_ovs.insert(b.id, bubble_ov(b, &planes, dataset, tau)?);
    }
    let mut clusters = clusters;
    let mut planes = planes;
    let mut added = 0usize;
    let mut splits = 0usize;
    let scale = dataset.diagonal();
    let limit = bubbles.len() * bubbles.len() + 1;

    while let Some((i, j)) = first_unseparated(&clusters) {
        let (ca, ra) = cluster_ball(&clusters[i], &by_id, dataset);
        let (cb, rb) = cluster_ball(&clusters[j], &by_id, dataset);
        let gap = euclidean(&ca, &cb);
        if ra + rb >= gap {
            let target = if clusters[i].bubble_ids.len() >= clusters[j].bubble_ids.len() {
                i
            } else {
                j
            };
            if clusters[target].bubble_ids.len() < 2 {
                return Err(Error::OverlappingClusters {
                    a: clusters[i].id,
                    b: clusters[j].id,
                });
            }
            let parent = clusters.remove(target);
            let pieces = parent.bubble_ids.iter().map(|&b| Cluster {
                id: 0,
                bubble_ids: vec![b],
                class_label: parent.class_label,
                ov: bubble_ovs[&b].clone(),
            });
            let tail = clusters.split_off(target);
            clusters.extend(pieces);
            clusters.extend(tail);
            for (k, c) in clusters.iter_mut().enumerate() {
                c.id = k + 1;
            }
            splits += 1;
            continue;
        }

        let unit: Vec<f64> = cb.iter().zip(&ca).map(|(b, a)| (b - a) / gap).collect();
        let t = (ra + gap - rb) / 2.0;
        let anchor: Vec<f64> = ca.iter().zip(&unit).map(|(a, u)| a + t * u).collect();
        let bias = -unit.iter().zip(&anchor).map(|(u, m)| u * m).sum::<f64>();
        let plane = Hyperplane::from_affine(&unit, bias, scale)?;
        let plane = clear_points(plane, dataset.points(), tau, None)?;

        let k = planes.len();
        for b in bubbles {
            let members = member_coords(b, dataset);
            let c = bubble_component(b, k, &plane, &members, tau)?;
            bubble_ovs.get_mut(&b.id).expect("bubble").push(c);
        }
        planes.push(plane)?;
        for c in clusters.iter_mut() {
            let ovs: Vec<&OrientationVector> = c.bubble_ids.iter().map(|b| &bubble_ovs[b]).collect();
            c.ov = combine(&ovs);
        }
        added += 1;
        if added > limit {
            return Err(Error::OverlappingClusters {
                a: clusters[i].id,
                b: clusters[j].id,
            });
        }
    }
    Ok(ClusterSeparation {
        planes,
        clusters,
        added_planes: added,
        splits,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModelM2 {
    pub base: TrainedModelM1,
    pub bubbles: Vec<Bubble>,
    pub clusters: Vec<Cluster>,
    pub extra_planes: usize,
    pub relative_epsilon: f64,
    pub max_disabled_planes: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct TrainM2Options {
    pub base: TrainOptions,
    pub relative_epsilon: f64,
    pub max_disabled_planes: Option<usize>,
}

impl Default for TrainM2Options {
    fn default() -> Self {
        Self {
            base: TrainOptions::default(),
            relative_epsilon: DEFAULT_RELATIVE_EPSILON,
            max_disabled_planes: Some(DEFAULT_MAX_DISABLED_PLANES),
        }
    }
}

pub fn train_m2(dataset: &Dataset, options: &TrainM2Options) -> Result<TrainedModelM2> {
    let mut base = train_m1(dataset, &options.base)?;
    let tau = base.tau;
    let config = BubbleConfig::for_dataset(dataset, options.relative_epsilon, options.max_disabled_planes);
    let bubbles = discover_bubbles(dataset, &base.planes, &config)?;
    let clusters = merge_bubbles(&bubbles, &base.planes, dataset, tau)?;
    let outcome = ensure_cluster_separation(clusters, &bubbles, base.planes.clone(), dataset, tau)?;

    if outcome.added_planes > 0 {
        let first_new = base.planes.len();
        for entry in &mut base.entries {
            let point = dataset.get(entry.id).expect("entry from dataset");
            for (k, plane) in outcome.planes.iter().enumerate().skip(first_new) {
                entry.ov.push(crate::geometry::side_of(plane, k, point, tau)?);
            }
        }
        base.planes = outcome.planes;
        base.metadata.q = base.planes.len();
    }
    Ok(TrainedModelM2 {
        base,
        bubbles,
        clusters: outcome.clusters,
        extra_planes: outcome.added_planes,
        relative_epsilon: options.relative_epsilon,
        max_disabled_planes: options.max_disabled_planes,
    })
}

impl TrainedModelM2 {
    /// Checks the base model, the bubble partition and the stored cluster OVs.
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        let dataset = self.training_dataset()?;
        let mut covered = HashSet::new();
        for b in &self.bubbles {
            for id in &b.member_ids {
                let p = dataset
                    .get(*id)
                    .ok_or_else(|| Error::MalformedFile(format!("bubble {} names unknown point {id}", b.id)))?;
                if p.label != Some(b.class_label) {
                    return Err(Error::MalformedFile(format!("bubble {} is not pure", b.id)));
                }
                if !covered.insert(*id) {
                    return Err(Error::MalformedFile(format!("point {id} is in two bubbles")));
                }
            }
        }
        if covered.len() != dataset.len() {
            return Err(Error::MalformedFile("bubbles do not cover the training set".into()));
        }
        let by_id: BTreeMap<usize, &Bubble> = self.bubbles.iter().map(|b| (b.id, b)).collect();
        for c in &self.clusters {
            let ovs = c
                .bubble_ids
                .iter()
                .map(|id| {
                    let b = by_id
                        .get(id)
                        .ok_or_else(|| Error::MalformedFile(format!("cluster {} names unknown bubble {id}", c.id)))?;
                    bubble_ov(b, &self.base.planes, &dataset, self.base.tau)
                })
                .collect::<Result<Vec<_>>>()?;
            let fresh = combine(&ovs.iter().collect::<Vec<_>>());
            if fresh != c.ov {
                return Err(Error::MalformedFile(format!(
                    "cluster {} orientation vector does not recompute",
                    c.id
                )));
            }
        }
        Ok(())
    }

    pub fn training_dataset(&self) -> Result<Dataset> {
        Dataset::new(
            self.base
                .entries
                .iter()
                .map(|e| crate::geometry::SamplePoint::new(e.id, e.coords.clone(), Some(e.label)))
                .collect(),
        )
    }
}
