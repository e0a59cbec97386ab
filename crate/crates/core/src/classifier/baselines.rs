//! Nearest-neighbour and nearest-subspace classifiers.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use super::src::argmin;
use super::ClassLabel;
use crate::error::{Error, Result};

/// Label of the training vector closest to `y` in l2; equidistant neighbours go to the lower label.
pub fn nn_classify(train: &[(DVector<f64>, ClassLabel)], y: &DVector<f64>) -> Result<ClassLabel> {
    let mut best: Option<(f64, ClassLabel)> = None;
    for (i, (v, label)) in train.iter().enumerate() {
        if v.len() != y.len() {
            return Err(Error::Dimension(format!(
                "training vector {i} has length {}, test vector {}",
                v.len(),
                y.len()
            )));
        }
        let d = (v - y).norm_squared();
        best = match best {
            Some((bd, bl)) if bd < d || (bd == d && bl <= *label) => Some((bd, bl)),
            _ => Some((d, *label)),
        };
    }
    best.map(|(_, l)| l)
        .ok_or_else(|| Error::InvalidInput("empty training set".into()))
}

#[derive(Debug, Clone)]
pub struct NsPrediction {
    pub label: ClassLabel,
    /// Projection residual per class, ascending label order.
    pub residuals: Vec<f64>,
    /// Set when some class had fewer samples than the requested dimension.
    pub dimension_clipped: bool,
}

/// Per-class principal subspaces for nearest-subspace classification.
#[derive(Debug, Clone)]
pub struct NearestSubspace {
    labels: Vec<ClassLabel>,
    bases: Vec<DMatrix<f64>>,
    dimension_clipped: bool,
    m: usize,
}

impl NearestSubspace {
    /// Spans of the top `subspace_dim` left singular vectors of each class's column matrix.
    pub fn fit(train: &[(DVector<f64>, ClassLabel)], subspace_dim: usize) -> Result<Self> {
        let Some((first, _)) = train.first() else {
            return Err(Error::InvalidInput("empty training set".into()));
        };
        let m = first.len();
        let mut by_class: BTreeMap<ClassLabel, Vec<&DVector<f64>>> = BTreeMap::new();
        for (i, (v, label)) in train.iter().enumerate() {
            if v.len() != m {
                return Err(Error::Dimension(format!("training vector {i} has length {}, expected {m}", v.len())));
            }
            by_class.entry(*label).or_default().push(v);
        }
        let mut clipped = false;
        let mut labels = Vec::new();
        let mut bases = Vec::new();
        for (label, cols) in by_class {
            if subspace_dim > cols.len() {
                clipped = true;
            }
            let d = subspace_dim.min(cols.len()).min(m);
            let a = DMatrix::from_columns(&cols.iter().map(|c| (*c).clone()).collect::<Vec<_>>());
            let basis = if d == 0 {
                DMatrix::zeros(m, 0)
            } else {
                let svd = a.svd(true, false);
                let u = svd.u.expect("left singular vectors requested");
                // Drop directions with no energy so rank-deficient classes stay exact.
                let tol = svd.singular_values[0] * 1e-12 * m.max(cols.len()) as f64;
                let keep = svd.singular_values.iter().take(d).filter(|s| **s > tol).count();
                u.columns(0, keep).into_owned()
            };
            labels.push(label);
            bases.push(basis);
        }
        Ok(Self {
            labels,
            bases,
            dimension_clipped: clipped,
            m,
        })
    }

    pub fn predict(&self, y: &DVector<f64>) -> Result<NsPrediction> {
        if y.len() != self.m {
            return Err(Error::Dimension(format!("test vector length {}, expected {}", y.len(), self.m)));
        }
        let residuals: Vec<f64> = self
            .bases
            .iter()
            .map(|u| (y - u * u.tr_mul(y)).norm())
            .collect();
        let idx = argmin(&residuals);
        Ok(NsPrediction {
            label: self.labels[idx],
            residuals,
            dimension_clipped: self.dimension_clipped,
        })
    }
}

/// One-shot nearest-subspace classification. Use [`NearestSubspace`] to reuse the fit.
pub fn ns_classify(
    train: &[(DVector<f64>, ClassLabel)],
    y: &DVector<f64>,
    subspace_dim: usize,
) -> Result<NsPrediction> {
    NearestSubspace::fit(train, subspace_dim)?.predict(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(xs)
    }

    #[test]
    fn nn_exact_match_and_ties() {
        let train = vec![(v(&[0.0, 0.0]), 3), (v(&[2.0, 0.0]), 1), (v(&[5.0, 5.0]), 0)];
        assert_eq!(nn_classify(&train, &v(&[5.0, 5.0])).unwrap(), 0);
        // Equidistant from the labels 3 and 1.
        assert_eq!(nn_classify(&train, &v(&[1.0, 0.0])).unwrap(), 1);
        assert!(nn_classify(&[], &v(&[1.0])).is_err());
    }

    #[test]
    fn ns_exact_span_and_degenerate_dimension() {
        let train = vec![
            (v(&[1.0, 0.0, 0.0]), 0),
            (v(&[0.0, 1.0, 0.0]), 0),
            (v(&[0.0, 0.0, 1.0]), 1),
        ];
        let y = v(&[0.3, -2.0, 0.0]);
        let p = ns_classify(&train, &y, 2).unwrap();
        assert_eq!(p.label, 0);
        assert!(p.residuals[0] < 1e-12);
        assert!(p.dimension_clipped);

        let p = ns_classify(&train, &y, 0).unwrap();
        assert_eq!(p.label, 0);
        assert!(p.residuals.iter().all(|r| (r - y.norm()).abs() < 1e-12));
    }
}
