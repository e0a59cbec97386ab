use std::time::Instant;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{feature_id, ClassifierConfig, ExperimentConfig, Method};
use crate::classifier::{
    build_dictionary, classify, classify_augmented, nn_classify, AugmentedDictionary, ClassLabel, Dictionary,
    NearestSubspace,
};
use crate::data_io::{load_directory, split_indices, synth_dataset, FaceDataset, SplitSpec};
use crate::error::{Error, Result};
use crate::features::{ExtractorKind, FeatureExtractor};
use crate::rng::derive_seed;

/// Marks seed slots that do not vary along a grid axis.
pub const SHARED: &str = "shared";

/// One grid cell: a classifier on one feature, corruption level and trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub classifier: String,
    pub feature: String,
    pub dim_h: usize,
    pub dim_w: usize,
    pub corruption: String,
    pub fraction: f64,
    pub trial: usize,
    /// `correct / total`, NaN when the cell failed.
    pub rate: f64,
    pub correct: usize,
    pub total: usize,
    pub wall_ms: Option<f64>,
    /// `confusion[true][predicted]`, in dataset class order.
    pub confusion: Vec<Vec<usize>>,
    /// Seed of the corruption stream this cell's test images were drawn from.
    pub corruption_seed: u64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    /// SHA-256 of the canonical JSON form of the configuration.
    pub config_hash: String,
    pub master_seed: u64,
    pub version: String,
    pub class_names: Vec<String>,
    pub trial_seeds: Vec<TrialSeeds>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSeeds {
    pub trial: usize,
    pub dataset: Option<u64>,
    pub split: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub metadata: ReportMetadata,
    pub config: ExperimentConfig,
    /// Grid order: trial, feature, corruption, classifier (slowest to fastest).
    pub rows: Vec<CellResult>,
}

pub fn config_hash(config: &ExperimentConfig) -> String {
    use sha2::{Digest, Sha256};
    let canonical = serde_json::to_string(config).expect("config serializes");
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

pub fn dataset_seed(config: &ExperimentConfig, trial: usize) -> Option<u64> {
    let synth = config.dataset.synthetic.as_ref()?;
    Some(synth.seed.unwrap_or_else(|| {
        derive_seed(&["dataset", &config.seed.to_string(), &trial.to_string()])
    }))
}

pub fn split_seed(config: &ExperimentConfig, trial: usize) -> u64 {
    let base = config.split.seed.unwrap_or(config.seed);
    derive_seed(&["split", &base.to_string(), &trial.to_string()])
}

/// Seed of the corruption stream for `(corruption, trial)`; every classifier
/// and feature sees the same corrupted test images.
pub fn corruption_seed(config: &ExperimentConfig, corruption_id: &str, trial: usize) -> u64 {
    derive_seed(&[&config.seed.to_string(), SHARED, SHARED, corruption_id, &trial.to_string()])
}

fn image_seed(stream: u64, index: usize) -> u64 {
    derive_seed(&[&stream.to_string(), &index.to_string()])
}

fn load_trial_dataset(config: &ExperimentConfig, trial: usize) -> Result<FaceDataset> {
    match (&config.dataset.path, &config.dataset.synthetic) {
        (Some(path), _) => load_directory(&config.resolve(path)),
        (None, Some(s)) => synth_dataset(&s.spec(dataset_seed(config, trial).expect("synthetic"))),
        (None, None) => Err(Error::Config("no dataset configured".into())),
    }
}

/// Training side of a (trial, feature) group, shared by all corruption levels and classifiers.
struct Fitted {
    extractor: FeatureExtractor,
    train: Vec<(DVector<f64>, ClassLabel)>,
    dict: Dictionary,
    aug: Option<AugmentedDictionary>,
}

fn fit_group(config: &ExperimentConfig, ds: &FaceDataset, train_idx: &[usize], kind: &ExtractorKind) -> Result<Fitted> {
    let train_images: Vec<_> = train_idx.iter().map(|&i| ds.images()[i].clone()).collect();
    let extractor = FeatureExtractor::fit_images(kind.clone(), &train_images)?;
    let train = train_idx
        .iter()
        .zip(&train_images)
        .map(|(&i, img)| Ok((extractor.transform_image(img)?, ds.labels()[i])))
        .collect::<Result<Vec<_>>>()?;
    let dict = build_dictionary(&train)?;
    let aug = if config.classifiers.iter().any(|c| c.robust) {
        Some(AugmentedDictionary::new(&dict)?)
    } else {
        None
    };
    Ok(Fitted { extractor, train, dict, aug })
}

fn predict_all(
    clf: &ClassifierConfig,
    fitted: &Fitted,
    tests: &[DVector<f64>],
    pool: Option<&rayon::ThreadPool>,
) -> Result<Vec<ClassLabel>> {
    let ns = match clf.method {
        Method::Ns => Some(NearestSubspace::fit(&fitted.train, clf.ns_dim())?),
        _ => None,
    };
    let opts = clf.solver_options();
    let one = |y: &DVector<f64>| -> Result<ClassLabel> {
        match (clf.method.solver(), &ns) {
            (Some(solver), _) if clf.robust => {
                let aug = fitted.aug.as_ref().expect("augmented dictionary built for robust classifiers");
                Ok(classify_augmented(aug, y, solver, &opts)?.predicted_class)
            }
            (Some(solver), _) => Ok(classify(&fitted.dict, y, solver, &opts)?.predicted_class),
            (None, Some(ns)) => Ok(ns.predict(y)?.label),
            (None, None) => nn_classify(&fitted.train, y),
        }
    };
    match pool {
        Some(pool) => pool.install(|| tests.par_iter().map(one).collect()),
        None => tests.iter().map(one).collect(),
    }
}

#[allow(clippy::too_many_arguments)]
fn cell(
    clf: &ClassifierConfig,
    kind: &ExtractorKind,
    corruption: &super::config::CorruptionConfig,
    trial: usize,
    corruption_seed: u64,
    num_classes: usize,
    outcome: std::result::Result<(Vec<ClassLabel>, Vec<ClassLabel>, Option<f64>), String>,
) -> CellResult {
    let (dim_h, dim_w) = kind.output_dims();
    let mut row = CellResult {
        classifier: clf.label(),
        feature: feature_id(kind),
        dim_h,
        dim_w,
        corruption: corruption.kind().to_string(),
        fraction: corruption.fraction(),
        trial,
        rate: f64::NAN,
        correct: 0,
        total: 0,
        wall_ms: None,
        confusion: vec![vec![0; num_classes]; num_classes],
        corruption_seed,
        error: None,
    };
    match outcome {
        Ok((truth, predicted, wall_ms)) => {
            for (&t, &p) in truth.iter().zip(&predicted) {
                row.confusion[t][p] += 1;
            }
            row.total = truth.len();
            row.correct = (0..num_classes).map(|c| row.confusion[c][c]).sum();
            row.rate = row.correct as f64 / row.total as f64;
            row.wall_ms = wall_ms;
        }
        Err(msg) => row.error = Some(msg),
    }
    row
}

/// Runs the configured grid. Failures inside a cell are recorded in its row
/// (rate NaN) and the run continues; only an unloadable dataset or a bad split
/// rule aborts.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let pool = match config.threads {
        Some(n) if n > 1 => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?,
        ),
        _ => None,
    };
    let corruptions = config
        .corruption
        .iter()
        .map(|c| config.corruption_model(c))
        .collect::<Result<Vec<_>>>()?;
    let split_mode = config.split_mode()?;

    let mut rows = Vec::new();
    let mut trial_seeds = Vec::new();
    let mut class_names = Vec::new();
    for trial in 0..config.trials {
        let ds = load_trial_dataset(config, trial)?;
        class_names = ds.class_names().to_vec();
        let k = ds.num_classes();
        let split = SplitSpec { mode: split_mode.clone(), seed: split_seed(config, trial) };
        trial_seeds.push(TrialSeeds { trial, dataset: dataset_seed(config, trial), split: split.seed });
        let (train_idx, test_idx) = split_indices(&ds, &split)?;
        let truth: Vec<ClassLabel> = test_idx.iter().map(|&i| ds.labels()[i]).collect();

        // Corrupted test images per corruption level, shared across features and classifiers.
        let corrupted: Vec<Result<Vec<_>>> = config
            .corruption
            .iter()
            .zip(&corruptions)
            .map(|(cfg, model)| {
                let stream = corruption_seed(config, &cfg.id(), trial);
                test_idx
                    .iter()
                    .enumerate()
                    .map(|(j, &i)| model.apply(&ds.images()[i], image_seed(stream, j)))
                    .collect()
            })
            .collect();

        for kind in &config.features {
            let fitted = fit_group(config, &ds, &train_idx, kind);
            for (cfg, images) in config.corruption.iter().zip(&corrupted) {
                let stream = corruption_seed(config, &cfg.id(), trial);
                let tests: std::result::Result<Vec<_>, String> = match (&fitted, images) {
                    (Ok(f), Ok(imgs)) => imgs
                        .iter()
                        .map(|img| f.extractor.transform_image(img))
                        .collect::<Result<Vec<_>>>()
                        .map_err(|e| e.to_string()),
                    (Err(e), _) | (_, Err(e)) => Err(e.to_string()),
                };
                for clf in &config.classifiers {
                    let outcome = tests.as_ref().map_err(Clone::clone).and_then(|tests| {
                        let fitted = fitted.as_ref().map_err(|e| e.to_string())?;
                        let start = Instant::now();
                        let predicted = predict_all(clf, fitted, tests, pool.as_ref()).map_err(|e| e.to_string())?;
                        let wall = config.timing.then(|| start.elapsed().as_secs_f64() * 1e3);
                        Ok((truth.clone(), predicted, wall))
                    });
                    if let Err(msg) = &outcome {
                        log::warn!("cell {} / {} / {} / trial {trial} failed: {msg}", clf.label(), feature_id(kind), cfg.id());
                    }
                    rows.push(cell(clf, kind, cfg, trial, stream, k, outcome));
                }
            }
        }
    }
    Ok(ExperimentReport {
        metadata: ReportMetadata {
            config_hash: config_hash(config),
            master_seed: config.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            class_names,
            trial_seeds,
        },
        config: config.clone(),
        rows,
    })
}
