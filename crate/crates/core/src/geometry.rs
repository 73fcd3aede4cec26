//! Points, canonical hyperplanes and orientation vectors.
//!
//! A plane is stored in the canonical form `1 + α·x = 0`; its positive side is
//! the set of points where `1 + α·x > 0`. The orientation vector (OV) of a point
//! against an ordered plane set records, per plane, which side the point lies on.
//! OV components are `+1`/`-1` for points; bubble and cluster OVs may also carry
//! `0` for planes that pass through them.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default absolute tolerance below which `|z|` counts as "on the plane".
pub const DEFAULT_TAU: f64 = 1e-9;

/// Class identifier. The IRIS fixtures use 1 = setosa, 2 = versicolor, 3 = virginica.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClassId(pub u32);

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePoint {
    pub id: u64,
    pub coords: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<ClassId>,
}

impl SamplePoint {
    pub fn new(id: u64, coords: Vec<f64>, label: Option<ClassId>) -> Self {
        Self { id, coords, label }
    }

    pub fn labeled(id: u64, coords: Vec<f64>, label: u32) -> Self {
        Self::new(id, coords, Some(ClassId(label)))
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// A hyperplane `1 + Σ αᵢ·xᵢ = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Hyperplane {
    coeffs: Vec<f64>,
}

impl Hyperplane {
    /// Builds a plane directly from canonical coefficients α.
    pub fn from_coefficients(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::DegeneratePlane("no coefficients".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::DegeneratePlane("non-finite coefficient".into()));
        }
        if coeffs.iter().all(|&c| c == 0.0) {
            return Err(Error::DegeneratePlane("all coefficients are zero".into()));
        }
        Ok(Self { coeffs })
    }

    /// Canonicalizes the general affine plane `bias + weights·x = 0`.
    ///
    /// `scale` is the length scale of the data (bounding-box diagonal). A plane
    /// through (or numerically at) the origin cannot be written with bias 1, so
    /// it is first moved by `1e-9 * scale` along its normal.
    pub fn from_affine(weights: &[f64], bias: f64, scale: f64) -> Result<Self> {
        let norm = l2_norm(weights);
        if norm.is_nan() || norm <= 0.0 || !norm.is_finite() || !bias.is_finite() {
            return Err(Error::DegeneratePlane("zero or non-finite normal".into()));
        }
        let scale = if scale > 0.0 && scale.is_finite() { scale } else { 1.0 };
        let mut b = bias;
        if b.abs() < 1e-12 * norm * scale {
            let shift = 1e-9 * scale * norm;
            b = if b >= 0.0 { b + shift } else { b - shift };
        }
        Self::from_coefficients(weights.iter().map(|w| w / b).collect())
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Always 1: planes are kept in canonical form.
    pub fn bias(&self) -> f64 {
        1.0
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn normal_norm(&self) -> f64 {
        l2_norm(&self.coeffs)
    }

    /// `1 + α₁x₁ + … + αₙxₙ`, summed left to right.
    pub fn evaluate(&self, coords: &[f64]) -> Result<f64> {
        if coords.len() != self.coeffs.len() {
            return Err(Error::DimensionMismatch {
                expected: self.coeffs.len(),
                found: coords.len(),
            });
        }
        Ok(self.eval_unchecked(coords))
    }

    pub(crate) fn eval_unchecked(&self, coords: &[f64]) -> f64 {
        self.coeffs.iter().zip(coords).fold(1.0, |acc, (a, x)| acc + a * x)
    }

    /// Euclidean distance from `coords` to the plane.
    pub fn distance(&self, coords: &[f64]) -> Result<f64> {
        Ok(self.evaluate(coords)?.abs() / self.normal_norm())
    }

    /// Same plane with the bias scaled by `factor` before re-normalizing,
    /// i.e. `factor + α·x = 0` rewritten as `1 + (α/factor)·x = 0`.
    pub(crate) fn with_bias_factor(&self, factor: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a / factor).collect(),
        }
    }
}

/// Evaluates `plane` at `point`.
pub fn evaluate_plane(plane: &Hyperplane, point: &SamplePoint) -> Result<f64> {
    plane.evaluate(&point.coords)
}

/// Ordered set of planes. Component `k` of every OV refers to plane `k`, so
/// planes can only be appended.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PlaneSet {
    planes: Vec<Hyperplane>,
}

impl PlaneSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_planes(planes: Vec<Hyperplane>) -> Result<Self> {
        if let Some(first) = planes.first() {
            let dim = first.dim();
            if let Some(bad) = planes.iter().find(|p| p.dim() != dim) {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: bad.dim(),
                });
            }
        }
        Ok(Self { planes })
    }

    pub fn push(&mut self, plane: Hyperplane) -> Result<()> {
        if let Some(dim) = self.dim() {
            if plane.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: plane.dim(),
                });
            }
        }
        self.planes.push(plane);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.planes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.planes.is_empty()
    }

    /// `None` for an empty set.
    pub fn dim(&self) -> Option<usize> {
        self.planes.first().map(Hyperplane::dim)
    }

    pub fn get(&self, index: usize) -> Option<&Hyperplane> {
        self.planes.get(index)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Hyperplane> {
        self.planes.iter()
    }

    pub fn as_slice(&self) -> &[Hyperplane] {
        &self.planes
    }
}

impl<'a> IntoIterator for &'a PlaneSet {
    type Item = &'a Hyperplane;
    type IntoIter = std::slice::Iter<'a, Hyperplane>;

    fn into_iter(self) -> Self::IntoIter {
        self.planes.iter()
    }
}

/// Ternary sign pattern over an ordered plane set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OrientationVector(Vec<i8>);

impl OrientationVector {
    /// Rejects components outside {-1, 0, +1}.
    pub fn new(components: Vec<i8>) -> Result<Self> {
        if let Some(index) = components.iter().position(|c| !(-1..=1).contains(c)) {
            return Err(Error::MalformedFile(format!(
                "orientation component {} at {index} is not -1, 0 or 1",
                components[index]
            )));
        }
        Ok(Self(components))
    }

    pub fn components(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of nonzero (enabled) components.
    pub fn nonzero_count(&self) -> usize {
        self.0.iter().filter(|&&c| c != 0).count()
    }

    pub fn is_zero_free(&self) -> bool {
        self.0.iter().all(|&c| c != 0)
    }

    pub(crate) fn push(&mut self, component: i8) {
        self.0.push(component);
    }

    pub(crate) fn from_raw(components: Vec<i8>) -> Self {
        Self(components)
    }
}

impl fmt::Display for OrientationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Sign of `z` with an on-plane band of half-width `tau`.
pub fn sgn(z: f64, tau: f64) -> Result<i8> {
    debug_assert!(tau >= 0.0);
    if z > tau {
        Ok(1)
    } else if z < -tau {
        Ok(-1)
    } else {
        Err(Error::OnPlaneValue { value: z })
    }
}

pub fn compute_ov(point: &SamplePoint, planes: &PlaneSet, tau: f64) -> Result<OrientationVector> {
    if let Some(dim) = planes.dim() {
        if dim != point.dim() {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: point.dim(),
            });
        }
    }
    planes
        .iter()
        .enumerate()
        .map(|(k, plane)| {
            let z = plane.eval_unchecked(&point.coords);
            sgn(z, tau).map_err(|_| Error::OnPlane {
                point_id: point.id,
                plane_index: k,
                value: z,
            })
        })
        .collect::<Result<Vec<_>>>()
        .map(OrientationVector)
}

/// Sign of one point against one plane, with the same error reporting as [`compute_ov`].
pub(crate) fn side_of(plane: &Hyperplane, plane_index: usize, point: &SamplePoint, tau: f64) -> Result<i8> {
    let z = plane.eval_unchecked(&point.coords);
    sgn(z, tau).map_err(|_| Error::OnPlane {
        point_id: point.id,
        plane_index,
        value: z,
    })
}

pub fn ov_dot(a: &OrientationVector, b: &OrientationVector) -> Result<i64> {
    check_lengths(a, b)?;
    Ok(a.0.iter().zip(&b.0).map(|(&x, &y)| i64::from(x) * i64::from(y)).sum())
}

/// Number of differing components between two zero-free OVs.
pub fn hamming_distance(a: &OrientationVector, b: &OrientationVector) -> Result<usize> {
    check_lengths(a, b)?;
    for v in [a, b] {
        if let Some(index) = v.0.iter().position(|&c| c == 0) {
            return Err(Error::ZeroComponent { index });
        }
    }
    Ok(a.0.iter().zip(&b.0).filter(|(x, y)| x != y).count())
}

fn check_lengths(a: &OrientationVector, b: &OrientationVector) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

pub fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn centroid<'a>(rows: impl IntoIterator<Item = &'a [f64]>) -> Vec<f64> {
    let mut sum: Vec<f64> = Vec::new();
    let mut count = 0usize;
    for row in rows {
        if sum.is_empty() {
            sum = vec![0.0; row.len()];
        }
        for (s, x) in sum.iter_mut().zip(row) {
            *s += x;
        }
        count += 1;
    }
    if count > 0 {
        let n = count as f64;
        sum.iter_mut().for_each(|s| *s /= n);
    }
    sum
}

/// A validated set of sample points: finite coordinates of one dimension,
/// unique ids, no repeated coordinate rows. Points are kept sorted by id.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    dim: usize,
    points: Vec<SamplePoint>,
}

impl Dataset {
    pub fn new(mut points: Vec<SamplePoint>) -> Result<Self> {
        let dim = points.first().ok_or(Error::EmptyDataset)?.dim();
        if dim == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        for p in &points {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
            if p.coords.iter().any(|c| !c.is_finite()) {
                return Err(Error::NonFinite { id: p.id });
            }
        }
        points.sort_by_key(|p| p.id);
        if let Some(w) = points.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(Error::DuplicateId(w[0].id));
        }
        let mut seen: HashMap<Vec<u64>, u64> = HashMap::new();
        let mut pairs = Vec::new();
        for p in &points {
            // -0.0 and 0.0 are the same location.
            let key: Vec<u64> = p.coords.iter().map(|c| (c + 0.0).to_bits()).collect();
            if let Some(&first) = seen.get(&key) {
                pairs.push((first, p.id));
            } else {
                seen.insert(key, p.id);
            }
        }
        if !pairs.is_empty() {
            return Err(Error::DuplicatePoint { pairs });
        }
        Ok(Self { dim, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[SamplePoint] {
        &self.points
    }

    pub fn get(&self, id: u64) -> Option<&SamplePoint> {
        self.points
            .binary_search_by_key(&id, |p| p.id)
            .ok()
            .map(|i| &self.points[i])
    }

    /// Errors with the first unlabeled id.
    pub fn require_labels(&self) -> Result<()> {
        match self.points.iter().find(|p| p.label.is_none()) {
            Some(p) => Err(Error::Unlabeled { id: p.id }),
            None => Ok(()),
        }
    }

    pub fn labels(&self) -> BTreeMap<u64, ClassId> {
        self.points.iter().filter_map(|p| p.label.map(|l| (p.id, l))).collect()
    }

    /// Length of the bounding-box diagonal; 1.0 for a single point.
    pub fn diagonal(&self) -> f64 {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for p in &self.points {
            for (j, &x) in p.coords.iter().enumerate() {
                lo[j] = lo[j].min(x);
                hi[j] = hi[j].max(x);
            }
        }
        let d = euclidean(&lo, &hi);
        if d > 0.0 {
            d
        } else {
            1.0
        }
    }
}
