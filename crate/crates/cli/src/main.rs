//! `planesep` command-line tool.
//!
//! Reports go to stdout as `key=value` lines; lines starting with `#` are
//! commentary and the only place timings appear.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use clap::{Parser, Subcommand};

use planesep::dataset::{load_planes, load_points, LabelMap};
use planesep::fixtures::FixtureSource;
use planesep::model_file::{load_model, save_model, Model, SavedModel};
use planesep::network::save_network;
use planesep::reproduce::reproduce_iris;
use planesep::{
    build_network, classify_m1, estimate_q, forward, retrieve, store_record, train_m1, train_m2, ClassId, Error,
    SamplePoint, TrainM2Options, TrainOptions, DEFAULT_TAU,
};

#[derive(Parser)]
#[command(name = "planesep", version, about = "Hyperplane point separation and OV classifiers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Separate labeled points and save a Method-1 model
    Separate {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out_model: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TAU)]
        tau: f64,
    },
    /// Train a Method-1 or Method-2 model
    Train {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        method: u8,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out_model: PathBuf,
        /// Bubble ε as a fraction of the data bounding-box diagonal
        #[arg(long, default_value_t = 1e-6)]
        epsilon: f64,
        /// Start from these planes (one `α₁,…,αₙ` row per plane)
        #[arg(long)]
        planes_from: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_TAU)]
        tau: f64,
        /// Stop growing a bubble once more planes than this would pass through it
        #[arg(long, default_value_t = planesep::clusters::DEFAULT_MAX_DISABLED_PLANES, conflicts_with = "literal_bubbles")]
        max_disabled_planes: usize,
        /// Grow bubbles without a disabled-plane limit
        #[arg(long)]
        literal_bubbles: bool,
    },
    /// Classify every point of a CSV file
    Classify {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Also write per-point results as CSV
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Check the bundled IRIS fixtures against the expected results
    ReproduceIris {
        /// Use fixture copies from this directory instead of the bundled ones
        #[arg(long)]
        fixtures: Option<PathBuf>,
        /// Write the bundled fixtures to this directory and exit
        #[arg(long, conflicts_with = "fixtures")]
        dump: Option<PathBuf>,
    },
    /// Write the network of a Method-2 model as JSON
    ExportNetwork {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// File a payload under the OV of a point
    Store {
        #[arg(long)]
        model: PathBuf,
        /// Comma-separated coordinates
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long)]
        payload: String,
        /// Write here instead of updating the model in place
        #[arg(long)]
        out_model: Option<PathBuf>,
    },
    /// Fetch the payloads stored nearest to a point
    Retrieve {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
}

enum Failure {
    Error(Error),
    Acceptance,
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } => 3,
        Error::DimensionMismatch { .. } => 4,
        _ => 2,
    }
}

#[derive(Default)]
struct Report(String);

impl Report {
    fn kv(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.0, "{key}={value}");
    }

    fn line(&mut self, text: impl std::fmt::Display) {
        let _ = writeln!(self.0, "{text}");
    }

    fn comment(&mut self, text: impl std::fmt::Display) {
        let _ = writeln!(self.0, "# {text}");
    }
}

fn fmt_labels(labels: &BTreeSet<ClassId>) -> String {
    labels.iter().map(ClassId::to_string).collect::<Vec<_>>().join(",")
}

fn parse_point(text: &str) -> Result<SamplePoint, Failure> {
    let coords = text
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| Failure::Error(Error::MalformedFile(format!("bad point {text:?}"))))?;
    Ok(SamplePoint::new(0, coords, None))
}

fn elapsed(start: Instant) -> String {
    format!("elapsed {:.3} ms", start.elapsed().as_secs_f64() * 1e3)
}

#[allow(clippy::too_many_arguments)]
fn train(
    out: &mut Report,
    method: u8,
    data: &Path,
    out_model: &Path,
    planes_from: Option<&Path>,
    tau: f64,
    epsilon: f64,
    max_disabled_planes: Option<usize>,
) -> Result<(), Failure> {
    let start = Instant::now();
    let mut labels = LabelMap::new();
    let dataset = load_points(data, &mut labels)?;
    let planes = planes_from.map(load_planes).transpose()?;
    let base = TrainOptions { tau, planes };
    let model = if method == 1 {
        Model::M1(train_m1(&dataset, &base)?)
    } else {
        let options = TrainM2Options {
            base,
            relative_epsilon: epsilon,
            max_disabled_planes,
        };
        Model::M2(train_m2(&dataset, &options)?)
    };
    let m = model.base();
    out.comment(format!("trained method {method} on {}", data.display()));
    out.kv("method", method);
    out.kv("n", m.dim());
    out.kv("points", m.entries.len());
    out.kv("q", m.q());
    out.kv("q_estimate", estimate_q(m.entries.len()));
    out.kv("initial_planes", m.metadata.initial_planes);
    out.kv("collisions", m.metadata.collisions_resolved);
    let distinct: BTreeSet<_> = m.entries.iter().map(|e| &e.ov).collect();
    out.kv("distinct_ovs", distinct.len());
    if !m.metadata.zero_mean_fallback.is_empty() {
        out.comment(format!(
            "zero-mean features pivoted on mean+std: {:?}",
            m.metadata.zero_mean_fallback
        ));
    }
    if let Model::M2(m2) = &model {
        out.kv("bubbles", m2.bubbles.len());
        out.kv("clusters", m2.clusters.len());
        out.kv("extra_planes", m2.extra_planes);
    }
    save_model(
        &SavedModel {
            model,
            class_names: labels.names().clone(),
        },
        out_model,
    )?;
    out.kv("model", out_model.display());
    out.comment(elapsed(start));
    Ok(())
}

fn classify(out: &mut Report, model_path: &Path, data: &Path, report_path: Option<&Path>) -> Result<(), Failure> {
    let saved = load_model(model_path)?;
    let mut labels = LabelMap::from_names(saved.class_names.clone());
    let dataset = load_points(data, &mut labels)?;
    let base = saved.model.base();
    if dataset.dim() != base.dim() {
        return Err(Error::DimensionMismatch {
            expected: base.dim(),
            found: dataset.dim(),
        }
        .into());
    }
    let network = match &saved.model {
        Model::M2(m) => Some(build_network(m)),
        Model::M1(_) => None,
    };
    out.kv("method", saved.model.method());
    out.kv("q", base.q());
    let mut csv = String::from("id,labels,ambiguous,score,distance,truth,correct\n");
    let (mut labeled, mut correct) = (0usize, 0usize);
    for p in dataset.points() {
        let (set, ambiguous, score_key, score, extra) = match &network {
            None => {
                let r = classify_m1(base, p)?;
                let extra = format!(" distance={} matched={}", r.best_distance, join(&r.matched_ids));
                (
                    r.predicted_labels,
                    r.ambiguous,
                    "dot",
                    r.best_dot,
                    (extra, r.best_distance.to_string()),
                )
            }
            Some(net) => {
                let f = forward(net, p)?;
                let best = f.u.iter().copied().max().unwrap_or(0);
                let extra = format!(" cluster={}", f.winner);
                (f.labels, f.ambiguous, "u", best, (extra, String::new()))
            }
        };
        let single = (!ambiguous).then(|| set.iter().next().copied()).flatten();
        let mut row = format!(
            "point={} labels={} ambiguous={ambiguous} {score_key}={score}{}",
            p.id,
            fmt_labels(&set),
            extra.0
        );
        let mut truth = String::new();
        let mut ok = String::new();
        if let Some(t) = p.label {
            labeled += 1;
            let hit = single == Some(t);
            correct += usize::from(hit);
            let _ = write!(row, " truth={t} correct={hit}");
            truth = t.to_string();
            ok = hit.to_string();
        }
        out.line(row);
        let _ = writeln!(
            csv,
            "{},{},{ambiguous},{score},{},{truth},{ok}",
            p.id,
            fmt_labels(&set).replace(',', ";"),
            extra.1
        );
    }
    out.kv("probes", dataset.len());
    if labeled > 0 {
        out.kv("correct", correct);
        out.kv("labeled", labeled);
        out.kv("accuracy", format!("{correct}/{labeled}"));
    }
    if let Some(path) = report_path {
        std::fs::write(path, csv).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
    }
    Ok(())
}

fn join(ids: &[u64]) -> String {
    ids.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

fn reproduce(out: &mut Report, fixtures: Option<&Path>, dump: Option<&Path>) -> Result<(), Failure> {
    if let Some(dir) = dump {
        FixtureSource::embedded().write_to(dir)?;
        out.kv("dumped", dir.display());
        return Ok(());
    }
    let start = Instant::now();
    let source = match fixtures {
        Some(dir) => FixtureSource::from_dir(dir)?,
        None => FixtureSource::embedded(),
    };
    let report = reproduce_iris(&source)?;
    for item in &report.items {
        out.kv(&format!("check.{}", item.name), if item.pass { "PASS" } else { "FAIL" });
        out.kv(&format!("detail.{}", item.name), &item.detail);
    }
    for (k, v) in &report.info {
        out.kv(&format!("info.{k}"), v);
    }
    let failed = report.items.iter().filter(|i| !i.pass).count();
    out.kv("passed", report.items.len() - failed);
    out.kv("failed", failed);
    out.kv("result", if failed == 0 { "PASS" } else { "FAIL" });
    out.comment(elapsed(start));
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Acceptance)
    }
}

fn export_network(out: &mut Report, model: &Path, dest: &Path) -> Result<(), Failure> {
    let saved = load_model(model)?;
    let Model::M2(m) = &saved.model else {
        return Err(Failure::Usage("export-network needs a method 2 model".into()));
    };
    let net = build_network(m).with_class_names(&saved.class_names);
    save_network(&net, dest)?;
    out.kv("layer1_units", net.layer1.len());
    out.kv("layer2_units", net.layer2.len());
    out.kv("network", dest.display());
    Ok(())
}

fn store(out: &mut Report, model: &Path, point: &str, payload: &str, dest: Option<&Path>) -> Result<(), Failure> {
    let mut saved = load_model(model)?;
    let probe = parse_point(point)?;
    store_record(saved.model.base_mut(), &probe, payload.as_bytes().to_vec())?;
    let key = saved.model.base().ov_of(&probe)?;
    save_model(&saved, dest.unwrap_or(model))?;
    out.kv("key", key);
    out.kv("keys", saved.model.base().payloads.len());
    Ok(())
}

fn retrieve_cmd(out: &mut Report, model: &Path, point: &str) -> Result<(), Failure> {
    let saved = load_model(model)?;
    let probe = parse_point(point)?;
    let r = retrieve(saved.model.base(), &probe)?;
    out.kv("probe_ov", &r.probe_ov);
    out.kv("distance", r.best_distance);
    out.kv("dot", r.best_dot);
    out.kv("keys", r.keys.len());
    out.kv("payloads", r.payloads.len());
    for (i, p) in r.payloads.iter().enumerate() {
        out.kv(&format!("payload.{i}"), B64.encode(p));
        if let Ok(text) = std::str::from_utf8(p) {
            out.comment(format!("payload.{i} text: {text}"));
        }
    }
    Ok(())
}

fn run(cli: Cli, out: &mut Report) -> Result<(), Failure> {
    match cli.command {
        Command::Separate { data, out_model, tau } => train(out, 1, &data, &out_model, None, tau, 1e-6, None),
        Command::Train {
            method,
            data,
            out_model,
            epsilon,
            planes_from,
            tau,
            max_disabled_planes,
            literal_bubbles,
        } => {
            let budget = (!literal_bubbles).then_some(max_disabled_planes);
            train(
                out,
                method,
                &data,
                &out_model,
                planes_from.as_deref(),
                tau,
                epsilon,
                budget,
            )
        }
        Command::Classify { model, data, report } => classify(out, &model, &data, report.as_deref()),
        Command::ReproduceIris { fixtures, dump } => reproduce(out, fixtures.as_deref(), dump.as_deref()),
        Command::ExportNetwork { model, out: dest } => export_network(out, &model, &dest),
        Command::Store {
            model,
            point,
            payload,
            out_model,
        } => store(out, &model, &point, &payload, out_model.as_deref()),
        Command::Retrieve { model, point } => retrieve_cmd(out, &model, &point),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = Report::default();
    let result = run(cli, &mut out);
    print!("{}", out.0);
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Acceptance) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
