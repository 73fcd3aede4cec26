use std::path::PathBuf;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("orientation vector length mismatch: {left} != {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("point {point_id} lies on plane {plane_index} (value {value:e})")]
    OnPlane {
        point_id: u64,
        plane_index: usize,
        value: f64,
    },

    /// Only reported by [`crate::geometry::sgn`], which has no point context.
    #[error("value {value:e} is within tolerance of zero")]
    OnPlaneValue { value: f64 },

    #[error("orientation vector has a disabled (zero) component at {index}")]
    ZeroComponent { index: usize },

    #[error("degenerate plane: {0}")]
    DegeneratePlane(String),

    #[error("non-finite coordinate in point {id}")]
    NonFinite { id: u64 },

    #[error("duplicate point id {0}")]
    DuplicateId(u64),

    #[error("duplicate coordinates for points {}", format_pairs(.pairs))]
    DuplicatePoint { pairs: Vec<(u64, u64)> },

    #[error("feature {feature} has zero mean")]
    ZeroMean { feature: usize },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("point {id} has no class label")]
    Unlabeled { id: u64 },

    #[error("could not clear data points from new plane after {attempts} shifts")]
    ShiftExhausted { attempts: usize },

    #[error("store holds no records")]
    EmptyStore,

    #[error("bubble {bubble_id}: members disagree on plane {plane_index}")]
    InconsistentSign { bubble_id: usize, plane_index: usize },

    #[error("clusters {a} and {b} overlap and cannot be separated by a plane")]
    OverlappingClusters { a: usize, b: usize },

    #[error("malformed file: {0}")]
    MalformedFile(String),

    #[error("unsupported file version {found} (expected {expected})")]
    VersionMismatch { expected: u32, found: u32 },

    #[error("stored orientation vector of point {point_id} does not match recomputation at plane {plane_index}")]
    OvMismatch { point_id: u64, plane_index: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn format_pairs(pairs: &[(u64, u64)]) -> String {
    pairs
        .iter()
        .map(|(a, b)| format!("{a}={b}"))
        .collect::<Vec<_>>()
        .join(", ")
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
