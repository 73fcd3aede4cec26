//! The IRIS reproduction checklist.

use std::collections::{BTreeMap, BTreeSet};

use crate::clusters::{train_m2, TrainM2Options, TrainedModelM2};
use crate::error::Result;
use crate::fixtures::{listed_model, listing_anomalies, repair_listing, FixtureSource, IrisFixtures};
use crate::geometry::{compute_ov, ClassId, Dataset, OrientationVector, PlaneSet, DEFAULT_TAU};
use crate::method1::{classify_m1, train_m1, TrainOptions};
use crate::network::{build_network, forward};
use crate::separator::estimate_q;

/// Correctly classified test-point ids by best-match Hamming distance under
/// Method 1.
pub const M1_DISTANCE_SETS: [(usize, &[u64]); 4] = [
    (0, &[5, 10, 25, 30, 35, 40, 70, 85, 110]),
    (1, &[15, 20, 45, 50, 75, 100, 105, 140, 145]),
    (2, &[55, 60, 65, 80, 95, 120, 125, 130]),
    (3, &[90, 115]),
];
pub const M1_MISCLASSIFIED: u64 = 135;
pub const M2_MISCLASSIFIED: u64 = 130;
pub const M2_MISCLASSIFIED_AS: ClassId = ClassId(2);
pub const LISTED_BUBBLES: usize = 86;
pub const LISTED_CLUSTERS: usize = 56;
pub const SEPARATOR_Q_BOUND: usize = 48;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckItem {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReproReport {
    pub items: Vec<CheckItem>,
    /// Reported values that are not pass/fail.
    pub info: Vec<(String, String)>,
}

impl ReproReport {
    pub fn all_pass(&self) -> bool {
        self.items.iter().all(|i| i.pass)
    }

    pub fn item(&self, name: &str) -> Option<&CheckItem> {
        self.items.iter().find(|i| i.name == name)
    }

    fn check(&mut self, name: &'static str, pass: bool, detail: impl Into<String>) {
        self.items.push(CheckItem {
            name,
            pass,
            detail: detail.into(),
        });
    }

    fn info(&mut self, key: &str, value: impl ToString) {
        self.info.push((key.to_string(), value.to_string()));
    }
}

/// First disagreement between listed and recomputed OVs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OvDiff {
    pub point_id: u64,
    pub plane_index: Option<usize>,
    pub listed: Option<i8>,
    pub computed: Option<i8>,
}

impl std::fmt::Display for OvDiff {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let show = |v: Option<i8>| v.map_or("none".to_string(), |s| format!("{s:+}"));
        match self.plane_index {
            Some(k) => write!(
                f,
                "point {} plane {}: listed {} computed {}",
                self.point_id,
                k + 1,
                show(self.listed),
                show(self.computed)
            ),
            None => write!(f, "point {}: {}", self.point_id, show(self.listed)),
        }
    }
}

/// Recomputes each point's OV and returns the first mismatch in id order.
/// Point errors (a point exactly on a plane) are reported as a mismatch with
/// no computed sign.
pub fn first_ov_mismatch(
    data: &Dataset,
    planes: &PlaneSet,
    listed: &BTreeMap<u64, OrientationVector>,
) -> Option<OvDiff> {
    let ids: BTreeSet<u64> = data
        .points()
        .iter()
        .map(|p| p.id)
        .chain(listed.keys().copied())
        .collect();
    for id in ids {
        let (Some(point), Some(row)) = (data.get(id), listed.get(&id)) else {
            return Some(OvDiff {
                point_id: id,
                plane_index: None,
                listed: None,
                computed: None,
            });
        };
        match compute_ov(point, planes, DEFAULT_TAU) {
            Ok(ov) => {
                let q = ov.len().max(row.len());
                for k in 0..q {
                    let (a, b) = (row.components().get(k).copied(), ov.components().get(k).copied());
                    if a != b {
                        return Some(OvDiff {
                            point_id: id,
                            plane_index: Some(k),
                            listed: a,
                            computed: b,
                        });
                    }
                }
            }
            Err(crate::error::Error::OnPlane { plane_index, .. }) => {
                return Some(OvDiff {
                    point_id: id,
                    plane_index: Some(plane_index),
                    listed: row.components().get(plane_index).copied(),
                    computed: None,
                })
            }
            Err(_) => {
                return Some(OvDiff {
                    point_id: id,
                    plane_index: None,
                    listed: None,
                    computed: None,
                })
            }
        }
    }
    None
}

fn fmt_ids(ids: &BTreeSet<u64>) -> String {
    ids.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

fn fmt_labels(labels: &BTreeSet<ClassId>) -> String {
    labels.iter().map(ClassId::to_string).collect::<Vec<_>>().join(",")
}

/// Method-2 accuracy of a model's network on a labeled dataset, plus the
/// prediction for one id of interest.
fn m2_scores(model: &TrainedModelM2, data: &Dataset, watch: u64) -> Result<(usize, Option<BTreeSet<ClassId>>)> {
    let net = build_network(model);
    let mut correct = 0;
    let mut watched = None;
    for p in data.points() {
        let f = forward(&net, p)?;
        if f.prediction.is_some() && f.prediction == p.label {
            correct += 1;
        }
        if p.id == watch {
            watched = Some(f.labels);
        }
    }
    Ok((correct, watched))
}

pub fn reproduce_iris(source: &FixtureSource) -> Result<ReproReport> {
    let mut report = ReproReport::default();

    let mismatches = source.checksum_mismatches();
    let diffs = source.diff_against_embedded(5);
    report.check(
        "fixture_checksums",
        mismatches.is_empty(),
        if mismatches.is_empty() {
            "all 7 files match".to_string()
        } else {
            let files: Vec<&str> = mismatches.iter().map(|m| m.file).collect();
            format!("changed: {}; {}", files.join(","), diffs.join("; "))
        },
    );

    let fx = IrisFixtures::parse(source)?;
    report.info("planes", fx.planes.len());
    report.info("train_points", fx.train.len());
    report.info("test_points", fx.test.len());

    let train_diff = first_ov_mismatch(&fx.train, &fx.planes, &fx.train_ovs);
    report.check(
        "c1_train_ov_exact",
        train_diff.is_none() && fx.train.len() == 120,
        train_diff.map_or_else(|| format!("{} rows match", fx.train.len()), |d| d.to_string()),
    );
    let test_diff = first_ov_mismatch(&fx.test, &fx.planes, &fx.test_ovs);
    report.check(
        "c2_test_ov_exact",
        test_diff.is_none() && fx.test.len() == 29,
        test_diff.map_or_else(|| format!("{} rows match", fx.test.len()), |d| d.to_string()),
    );

    let mut by_ov: BTreeMap<&OrientationVector, u64> = BTreeMap::new();
    let mut repeats = Vec::new();
    for (id, ov) in &fx.train_ovs {
        if let Some(prev) = by_ov.insert(ov, *id) {
            repeats.push(format!("{prev}={id}"));
        }
    }
    report.check(
        "c3_train_ov_unique",
        repeats.is_empty(),
        if repeats.is_empty() {
            "all distinct".to_string()
        } else {
            repeats.join(",")
        },
    );

    // Method 1 with the listed planes.
    let m1 = train_m1(
        &fx.train,
        &TrainOptions {
            planes: Some(fx.planes.clone()),
            ..TrainOptions::default()
        },
    )?;
    let mut by_distance: BTreeMap<usize, BTreeSet<u64>> = BTreeMap::new();
    let mut correct = 0;
    let mut report_135 = None;
    for p in fx.test.points() {
        let r = classify_m1(&m1, p)?;
        if r.is_correct(p.label.expect("test labels")) {
            correct += 1;
            by_distance.entry(r.best_distance).or_default().insert(p.id);
        }
        if p.id == M1_MISCLASSIFIED {
            report_135 = Some(r);
        }
    }
    report.info("m1_planes_added", m1.q() - fx.planes.len());
    let checks: [&'static str; 4] = [
        "c4_m1_distance_0",
        "c4_m1_distance_1",
        "c4_m1_distance_2",
        "c4_m1_distance_3",
    ];
    for ((d, want), name) in M1_DISTANCE_SETS.iter().zip(checks) {
        let want: BTreeSet<u64> = want.iter().copied().collect();
        let got = by_distance.get(d).cloned().unwrap_or_default();
        report.check(
            name,
            got == want,
            format!("expected {{{}}} got {{{}}}", fmt_ids(&want), fmt_ids(&got)),
        );
    }
    let (wrong_135, excludes_3, labels_135) = match &report_135 {
        Some(r) => {
            let truth = fx.test.get(M1_MISCLASSIFIED).and_then(|p| p.label).expect("label");
            (
                !r.is_correct(truth),
                !r.predicted_labels.contains(&ClassId(3)),
                format!(
                    "labels {{{}}} ambiguous={} matched {:?}",
                    fmt_labels(&r.predicted_labels),
                    r.ambiguous,
                    r.matched_ids
                ),
            )
        }
        None => (false, false, "point absent".to_string()),
    };
    report.check("c4_m1_135_wrong", wrong_135, labels_135.clone());
    report.check("c4_m1_135_excludes_class3", excludes_3, labels_135);
    report.check("c4_m1_accuracy", correct == 28, format!("{correct}/{}", fx.test.len()));

    // Method 2 with the listed planes.
    let m2 = train_m2(
        &fx.train,
        &TrainM2Options {
            base: TrainOptions {
                planes: Some(fx.planes.clone()),
                ..TrainOptions::default()
            },
            ..TrainM2Options::default()
        },
    )?;
    let impure: Vec<usize> = m2
        .bubbles
        .iter()
        .filter(|b| {
            b.member_ids
                .iter()
                .any(|id| fx.train.get(*id).and_then(|p| p.label) != Some(b.class_label))
        })
        .map(|b| b.id)
        .collect();
    report.check(
        "c5_bubbles_pure",
        impure.is_empty(),
        format!("{} bubbles, impure {:?}", m2.bubbles.len(), impure),
    );
    let (train_ok, _) = m2_scores(&m2, &fx.train, 0)?;
    report.check(
        "c5_m2_train_accuracy",
        train_ok == fx.train.len(),
        format!("{train_ok}/{}", fx.train.len()),
    );
    let (test_ok, pred_130) = m2_scores(&m2, &fx.test, M2_MISCLASSIFIED)?;
    report.check(
        "c5_m2_test_accuracy",
        test_ok >= 28,
        format!("{test_ok}/{}", fx.test.len()),
    );
    let pred_130 = pred_130.unwrap_or_default();
    report.check(
        "c5_m2_130_predicted_class2",
        pred_130 == BTreeSet::from([M2_MISCLASSIFIED_AS]),
        format!("labels {{{}}}", fmt_labels(&pred_130)),
    );
    report.check(
        "c5_m2_extra_planes",
        m2.extra_planes == 0,
        format!("{} added", m2.extra_planes),
    );
    report.info("m2_bubbles", m2.bubbles.len());
    report.info("m2_clusters", m2.clusters.len());
    report.info("listed_bubbles", LISTED_BUBBLES);
    report.info("listed_clusters", LISTED_CLUSTERS);

    // The listed bubbles and clusters, for comparison only.
    let anomalies = listing_anomalies(&fx.bubbles, &fx.train);
    for (id, holders) in &anomalies.repeated {
        report.info("listing_repeated_point", format!("{id} in bubbles {holders:?}"));
    }
    if !anomalies.missing.is_empty() {
        report.info("listing_missing_points", fmt_ids(&anomalies.missing));
    }
    let mut repaired = fx.bubbles.clone();
    if let Some((bubble, from, to)) = repair_listing(&mut repaired, &fx.train) {
        report.info("listing_repair", format!("bubble {bubble}: {from} -> {to}"));
    }
    if let Ok(listed) = listed_model(&fx, &repaired, TrainM2Options::default().relative_epsilon) {
        let (tr, _) = m2_scores(&listed, &fx.train, 0)?;
        let (te, p130) = m2_scores(&listed, &fx.test, M2_MISCLASSIFIED)?;
        report.info(
            "listed_network_units",
            format!("{}x{}", listed.base.q(), listed.clusters.len()),
        );
        report.info("listed_m2_train", format!("{tr}/{}", fx.train.len()));
        report.info("listed_m2_test", format!("{te}/{}", fx.test.len()));
        report.info("listed_m2_130", fmt_labels(&p130.unwrap_or_default()));
    }

    // Separator from scratch.
    let a = train_m1(&fx.train, &TrainOptions::default())?;
    let b = train_m1(&fx.train, &TrainOptions::default())?;
    let distinct = a.entries.iter().map(|e| &e.ov).collect::<BTreeSet<_>>().len() == a.entries.len();
    report.check("c6_separator_distinct", distinct, format!("{} OVs", a.entries.len()));
    report.check("c6_separator_deterministic", a == b, "two runs compared");
    report.check(
        "c6_separator_q_bound",
        a.q() <= SEPARATOR_Q_BOUND,
        format!("q={} bound={SEPARATOR_Q_BOUND}", a.q()),
    );
    report.info("separator_q", a.q());
    report.info("separator_collisions", a.metadata.collisions_resolved);
    report.info("q_estimate", estimate_q(fx.train.len()));

    Ok(report)
}
