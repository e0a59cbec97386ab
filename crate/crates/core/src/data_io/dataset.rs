use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::formats::{read_image, write_image, ImageFormat};
use super::synth::SynthSpec;
use crate::error::{Error, Result};
use crate::features::ImageMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetSource {
    Directory(PathBuf),
    Synthetic(SynthSpec),
}

/// Labelled images of a common size. Labels index `class_names`.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceDataset {
    images: Vec<ImageMatrix>,
    labels: Vec<usize>,
    class_names: Vec<String>,
    /// `class/file` identifiers, used by manifests.
    ids: Vec<String>,
    source: DatasetSource,
    skipped_classes: Vec<String>,
}

impl FaceDataset {
    pub fn new(
        images: Vec<ImageMatrix>,
        labels: Vec<usize>,
        class_names: Vec<String>,
        ids: Vec<String>,
        source: DatasetSource,
    ) -> Result<Self> {
        if images.is_empty() {
            return Err(Error::InvalidInput("dataset has no images".into()));
        }
        if labels.len() != images.len() || ids.len() != images.len() {
            return Err(Error::Dimension(format!(
                "{} images, {} labels, {} ids",
                images.len(),
                labels.len(),
                ids.len()
            )));
        }
        for (c, name) in class_names.iter().enumerate() {
            if !labels.contains(&c) {
                return Err(Error::InvalidInput(format!("class {name:?} has no images")));
            }
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= class_names.len()) {
            return Err(Error::Index { index: bad, len: class_names.len() });
        }
        check_uniform_dims(&images, &ids)?;
        Ok(Self { images, labels, class_names, ids, source, skipped_classes: Vec::new() })
    }

    pub fn images(&self) -> &[ImageMatrix] {
        &self.images
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn source(&self) -> &DatasetSource {
        &self.source
    }

    /// Class directories skipped during loading because they held no images.
    pub fn skipped_classes(&self) -> &[String] {
        &self.skipped_classes
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.images[0].dims()
    }

    /// Indices of images with label `class`, in dataset order.
    pub fn class_indices(&self, class: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.labels[i] == class).collect()
    }

    /// Images at `indices` in that order. Class names are kept even if a class ends up empty.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.len()) {
            return Err(Error::Index { index: bad, len: self.len() });
        }
        Ok(Self {
            images: indices.iter().map(|&i| self.images[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            class_names: self.class_names.clone(),
            ids: indices.iter().map(|&i| self.ids[i].clone()).collect(),
            source: self.source.clone(),
            skipped_classes: self.skipped_classes.clone(),
        })
    }
}

fn check_uniform_dims(images: &[ImageMatrix], ids: &[String]) -> Result<()> {
    let dims = images[0].dims();
    let offenders: Vec<String> = images
        .iter()
        .zip(ids)
        .filter(|(img, _)| img.dims() != dims)
        .map(|(img, id)| format!("{id} ({}x{})", img.height(), img.width()))
        .collect();
    if offenders.is_empty() {
        Ok(())
    } else {
        Err(Error::Dimension(format!(
            "images must all be {}x{}; offenders: {}",
            dims.0,
            dims.1,
            offenders.join(", ")
        )))
    }
}

fn sorted_entries(dir: &Path) -> Result<Vec<(String, PathBuf)>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if !name.starts_with('.') {
            out.push((name, entry.path()));
        }
    }
    out.sort();
    Ok(out)
}

/// Loads `<root>/<class>/<image>` with classes and files in lexicographic order.
/// Files other than `.pgm` and `.csv` are ignored; class directories without
/// images are skipped and reported in [`FaceDataset::skipped_classes`].
pub fn load_directory(root: &Path) -> Result<FaceDataset> {
    let mut images = Vec::new();
    let mut labels = Vec::new();
    let mut ids = Vec::new();
    let mut class_names = Vec::new();
    let mut skipped = Vec::new();
    for (class, dir) in sorted_entries(root)? {
        if !dir.is_dir() {
            continue;
        }
        let before = images.len();
        for (file, path) in sorted_entries(&dir)? {
            if !path.is_file() || ImageFormat::from_path(&path).is_none() {
                continue;
            }
            images.push(read_image(&path)?);
            labels.push(class_names.len());
            ids.push(format!("{class}/{file}"));
        }
        if images.len() == before {
            log::warn!("skipping empty class directory {}", dir.display());
            skipped.push(class);
        } else {
            class_names.push(class);
        }
    }
    if images.is_empty() {
        return Err(Error::format(root, "no images found under <root>/<class>/"));
    }
    let mut ds = FaceDataset::new(images, labels, class_names, ids, DatasetSource::Directory(root.to_path_buf()))?;
    ds.skipped_classes = skipped;
    Ok(ds)
}

/// Writes every image as `<root>/<class>/<stem>.<ext>`. Pixels are rounded to integers.
pub fn save_dataset(ds: &FaceDataset, root: &Path, format: ImageFormat) -> Result<()> {
    for (i, img) in ds.images.iter().enumerate() {
        let class = &ds.class_names[ds.labels[i]];
        let file = ds.ids[i].rsplit('/').next().unwrap_or(&ds.ids[i]);
        let stem = Path::new(file).file_stem().and_then(|s| s.to_str()).unwrap_or(file);
        let dir = root.join(class);
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        write_image(&dir.join(format!("{stem}.{}", format.extension())), img)?;
    }
    Ok(())
}
