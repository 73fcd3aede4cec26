//! Greedy construction of a plane set under which every point of a dataset has
//! its own orientation vector.
//!
//! Points are inserted in ascending id order. When an incoming point shares its
//! OV with an already placed point, the perpendicular bisector of the two is
//! appended. Appending a plane only extends existing OVs, so placed points stay
//! pairwise distinct and the incoming point can collide with at most one of them.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{compute_ov, euclidean, side_of, Dataset, Hyperplane, OrientationVector, PlaneSet, SamplePoint};

const MIN_MEAN: f64 = 1e-12;
const SHIFT_STEP: f64 = 1e-7;
const MAX_SHIFTS: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationResult {
    pub planes: PlaneSet,
    pub point_ovs: BTreeMap<u64, OrientationVector>,
    pub q: usize,
    pub initial_planes: usize,
    pub collisions_resolved: usize,
}

fn feature_means(dataset: &Dataset) -> Vec<f64> {
    let n = dataset.len() as f64;
    let mut sums = vec![0.0; dataset.dim()];
    for p in dataset.points() {
        for (s, x) in sums.iter_mut().zip(&p.coords) {
            *s += x;
        }
    }
    sums.into_iter().map(|s| s / n).collect()
}

fn feature_stds(dataset: &Dataset, means: &[f64]) -> Vec<f64> {
    let n = dataset.len() as f64;
    let mut acc = vec![0.0; dataset.dim()];
    for p in dataset.points() {
        for ((a, x), m) in acc.iter_mut().zip(&p.coords).zip(means) {
            *a += (x - m) * (x - m);
        }
    }
    acc.into_iter().map(|a| (a / n).sqrt()).collect()
}

fn axis_plane(dim: usize, feature: usize, pivot: f64) -> Result<Hyperplane> {
    let mut coeffs = vec![0.0; dim];
    coeffs[feature] = -1.0 / pivot;
    Hyperplane::from_coefficients(coeffs)
}

/// One axis-aligned plane `1 - x_j / mean(x_j) = 0` per feature.
pub fn init_planes(dataset: &Dataset, tau: f64) -> Result<PlaneSet> {
    let means = feature_means(dataset);
    if let Some(feature) = means.iter().position(|m| m.abs() < MIN_MEAN) {
        return Err(Error::ZeroMean { feature });
    }
    build_axis_planes(dataset, &means, tau)
}

/// Like [`init_planes`], but a feature with zero mean pivots on `mean + std`
/// instead, or on the bounding-box diagonal when that is zero too. Returns
/// the indices of features that needed the fallback.
pub fn init_planes_lenient(dataset: &Dataset, tau: f64) -> Result<(PlaneSet, Vec<usize>)> {
    let mut pivots = feature_means(dataset);
    let stds = feature_stds(dataset, &pivots);
    let mut fallback = Vec::new();
    for (j, pivot) in pivots.iter_mut().enumerate() {
        if pivot.abs() < MIN_MEAN {
            *pivot += stds[j];
            if pivot.abs() < MIN_MEAN {
                // Constant zero feature: every point is on one side of any pivot.
                *pivot = dataset.diagonal();
            }
            fallback.push(j);
        }
    }
    Ok((build_axis_planes(dataset, &pivots, tau)?, fallback))
}

fn build_axis_planes(dataset: &Dataset, pivots: &[f64], tau: f64) -> Result<PlaneSet> {
    let planes = pivots
        .iter()
        .enumerate()
        .map(|(j, &pivot)| {
            let plane = axis_plane(dataset.dim(), j, pivot)?;
            clear_points(plane, dataset.points(), tau, None)
        })
        .collect::<Result<Vec<_>>>()?;
    PlaneSet::from_planes(planes)
}

/// Perpendicular bisector of segment `pq`, positive side containing the origin.
pub fn bisector_plane(p: &SamplePoint, q: &SamplePoint) -> Result<Hyperplane> {
    let scale = euclidean(&p.coords, &q.coords);
    bisector_plane_with_scale(p, q, scale)
}

pub(crate) fn bisector_plane_with_scale(p: &SamplePoint, q: &SamplePoint, scale: f64) -> Result<Hyperplane> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: q.dim(),
        });
    }
    if p.coords == q.coords {
        return Err(Error::DuplicatePoint {
            pairs: vec![(p.id, q.id)],
        });
    }
    // (q - p)·(x - m) = 0 with m the midpoint.
    let normal: Vec<f64> = q.coords.iter().zip(&p.coords).map(|(b, a)| b - a).collect();
    let bias = -normal
        .iter()
        .zip(p.coords.iter().zip(&q.coords))
        .map(|(w, (a, b))| w * 0.5 * (a + b))
        .sum::<f64>();
    Hyperplane::from_affine(&normal, bias, scale)
}

/// Nudges `plane` until no point of `points` lies within `tau` of it.
///
/// The bias is scaled by `1 ± k·1e-7` (alternating sign) for up to 8 attempts.
/// With `keep = Some((a, b))` the two points must also stay on opposite sides.
pub(crate) fn clear_points(
    plane: Hyperplane,
    points: &[SamplePoint],
    tau: f64,
    keep: Option<(&SamplePoint, &SamplePoint)>,
) -> Result<Hyperplane> {
    let acceptable = |candidate: &Hyperplane| {
        let clear = points.iter().all(|p| candidate.eval_unchecked(&p.coords).abs() > tau);
        let split = keep.is_none_or(|(a, b)| {
            let za = candidate.eval_unchecked(&a.coords);
            let zb = candidate.eval_unchecked(&b.coords);
            za.abs() > tau && zb.abs() > tau && (za > 0.0) != (zb > 0.0)
        });
        clear && split
    };
    if acceptable(&plane) {
        return Ok(plane);
    }
    for attempt in 1..=MAX_SHIFTS {
        let magnitude = attempt.div_ceil(2) as f64 * SHIFT_STEP;
        let factor = if attempt % 2 == 1 {
            1.0 + magnitude
        } else {
            1.0 - magnitude
        };
        let candidate = plane.with_bias_factor(factor);
        if acceptable(&candidate) {
            return Ok(candidate);
        }
    }
    Err(Error::ShiftExhausted { attempts: MAX_SHIFTS })
}

/// Extends `init` until every point of `dataset` has a distinct OV.
pub fn separate(dataset: &Dataset, init: PlaneSet, tau: f64) -> Result<SeparationResult> {
    if let Some(dim) = init.dim() {
        if dim != dataset.dim() {
            return Err(Error::DimensionMismatch {
                expected: dataset.dim(),
                found: dim,
            });
        }
    }
    let scale = dataset.diagonal();
    let initial_planes = init.len();
    let mut planes = init;
    let points = dataset.points();

    let mut placed: Vec<&SamplePoint> = Vec::with_capacity(points.len());
    let mut ovs: Vec<OrientationVector> = Vec::with_capacity(points.len());
    let mut index: HashMap<OrientationVector, usize> = HashMap::with_capacity(points.len());
    let mut collisions = 0usize;

    for point in points {
        loop {
            let ov = compute_ov(point, &planes, tau)?;
            let Some(&other) = index.get(&ov) else {
                index.insert(ov.clone(), placed.len());
                placed.push(point);
                ovs.push(ov);
                break;
            };
            let rival = placed[other];
            let plane = bisector_plane_with_scale(point, rival, scale)?;
            let plane = clear_points(plane, points, tau, Some((point, rival)))?;
            let k = planes.len();
            for (ov, p) in ovs.iter_mut().zip(&placed) {
                ov.push(side_of(&plane, k, p, tau)?);
            }
            planes.push(plane)?;
            index.clear();
            index.extend(ovs.iter().cloned().zip(0..));
            collisions += 1;
        }
    }

    let point_ovs = placed.iter().map(|p| p.id).zip(ovs).collect();
    Ok(SeparationResult {
        q: planes.len(),
        planes,
        point_ovs,
        initial_planes,
        collisions_resolved: collisions,
    })
}

/// `ceil(log2 n)`, the order-of-magnitude plane count for `n` points.
pub fn estimate_q(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}
