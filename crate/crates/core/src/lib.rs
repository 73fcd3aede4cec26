//! Non-iterative classification by hyperplane point separation.
//!
//! A set of planes `1 + α·x = 0` is grown until every pair of training points
//! differs in at least one plane sign. Each point is then coded by its
//! orientation vector (OV), the ±1 sign pattern over the planes.
//!
//! * Method 1 ([`method1`]) labels a probe by the training OVs with the
//!   largest dot product (smallest Hamming distance) against its OV.
//! * Method 2 ([`clusters`], [`network`]) covers the training set with pure
//!   spherical bubbles, merges them into clusters with ternary OVs, and reads
//!   a two-layer network off the planes and cluster OVs.
//!
//! ```
//! use planesep::{classify_m1, train_m1, Dataset, SamplePoint, TrainOptions};
//!
//! let data = Dataset::new(vec![
//!     SamplePoint::labeled(1, vec![1.0, 1.0], 1),
//!     SamplePoint::labeled(2, vec![4.0, 4.5], 2),
//! ])?;
//! let model = train_m1(&data, &TrainOptions::default())?;
//! let probe = SamplePoint::new(9, vec![4.2, 4.0], None);
//! assert_eq!(classify_m1(&model, &probe)?.label().map(|c| c.0), Some(2));
//! # Ok::<(), planesep::Error>(())
//! ```

pub mod clusters;
pub mod dataset;
pub mod error;
pub mod fixtures;
pub mod geometry;
pub mod method1;
pub mod model_file;
pub mod network;
pub mod reproduce;
pub mod separator;

pub use clusters::{
    bubble_ov, discover_bubbles, ensure_cluster_separation, merge_bubbles, plane_disabled_for, train_m2, Bubble,
    BubbleConfig, Cluster, TrainM2Options, TrainedModelM2,
};
pub use error::{Error, Result};
pub use geometry::{
    compute_ov, evaluate_plane, hamming_distance, ov_dot, sgn, ClassId, Dataset, Hyperplane, OrientationVector,
    PlaneSet, SamplePoint, DEFAULT_TAU,
};
pub use method1::{classify_m1, retrieve, store_record, train_m1, MatchReport, TrainOptions, TrainedModelM1};
pub use network::{build_network, forward, NetworkSpec};
pub use separator::{bisector_plane, estimate_q, init_planes, separate};
