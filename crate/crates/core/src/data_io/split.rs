use std::collections::HashMap;

use super::dataset::FaceDataset;
use crate::error::{Error, Result};
use crate::rng::SeededRng;

#[derive(Debug, Clone, PartialEq)]
pub enum SplitMode {
    /// Training share per class, rounded half-up.
    PerClassRatio(f64),
    /// Training images per class.
    PerClassCount(usize),
    /// Explicit `class/file` identifiers.
    Manifest { train: Vec<String>, test: Vec<String> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitSpec {
    pub mode: SplitMode,
    pub seed: u64,
}

/// Train and test indices into the dataset, each ascending.
pub fn split_indices(ds: &FaceDataset, spec: &SplitSpec) -> Result<(Vec<usize>, Vec<usize>)> {
    if let SplitMode::Manifest { train, test } = &spec.mode {
        return manifest_indices(ds, train, test);
    }
    if let SplitMode::PerClassRatio(r) = spec.mode {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidInput(format!("split ratio {r} must be in (0, 1)")));
        }
    }
    let mut rng = SeededRng::new(spec.seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in 0..ds.num_classes() {
        let mut members = ds.class_indices(class);
        let n = members.len();
        let count = match spec.mode {
            SplitMode::PerClassRatio(r) => (r * n as f64 + 0.5 + 1e-9).floor() as usize,
            SplitMode::PerClassCount(c) => c,
            SplitMode::Manifest { .. } => unreachable!(),
        };
        if count == 0 || count >= n {
            return Err(Error::InvalidInput(format!(
                "class {:?} has {n} images; cannot put {count} in training and keep at least one for testing",
                ds.class_names()[class]
            )));
        }
        rng.shuffle(&mut members);
        train.extend_from_slice(&members[..count]);
        test.extend_from_slice(&members[count..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

fn manifest_indices(ds: &FaceDataset, train: &[String], test: &[String]) -> Result<(Vec<usize>, Vec<usize>)> {
    let lookup: HashMap<&str, usize> = ds.ids().iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
    let resolve = |names: &[String]| -> Result<Vec<usize>> {
        let mut idx = names
            .iter()
            .map(|n| {
                lookup
                    .get(n.as_str())
                    .copied()
                    .ok_or_else(|| Error::InvalidInput(format!("manifest entry {n:?} not in dataset")))
            })
            .collect::<Result<Vec<_>>>()?;
        idx.sort_unstable();
        idx.dedup();
        Ok(idx)
    };
    let (train, test) = (resolve(train)?, resolve(test)?);
    if let Some(i) = train.iter().find(|i| test.binary_search(i).is_ok()) {
        return Err(Error::InvalidInput(format!("{:?} is in both train and test manifests", ds.ids()[*i])));
    }
    if train.is_empty() || test.is_empty() {
        return Err(Error::InvalidInput("manifest train and test lists must be non-empty".into()));
    }
    Ok((train, test))
}

/// Splits each class independently with the seeded generator.
pub fn split_train_test(ds: &FaceDataset, spec: &SplitSpec) -> Result<(FaceDataset, FaceDataset)> {
    let (train, test) = split_indices(ds, spec)?;
    Ok((ds.subset(&train)?, ds.subset(&test)?))
}
