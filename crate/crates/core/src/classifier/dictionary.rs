use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::solver::BlockPartition;

/// Class label attached to a training sample.
pub type ClassLabel = usize;

/// Training features as unit-norm columns, grouped into one block per class.
#[derive(Debug, Clone)]
pub struct Dictionary {
    phi: DMatrix<f64>,
    partition: BlockPartition,
    class_ids: Vec<ClassLabel>,
    column_norms: Vec<f64>,
}

impl Dictionary {
    pub fn phi(&self) -> &DMatrix<f64> {
        &self.phi
    }

    pub fn partition(&self) -> &BlockPartition {
        &self.partition
    }

    /// Label of each block, ascending.
    pub fn class_ids(&self) -> &[ClassLabel] {
        &self.class_ids
    }

    /// l2 norms of the columns before normalization, in dictionary column order.
    pub fn column_norms(&self) -> &[f64] {
        &self.column_norms
    }

    pub fn num_classes(&self) -> usize {
        self.class_ids.len()
    }

    /// Feature dimension.
    pub fn m(&self) -> usize {
        self.phi.nrows()
    }

    /// Number of training columns.
    pub fn n(&self) -> usize {
        self.phi.ncols()
    }
}

/// Stacks labelled feature vectors into a dictionary.
///
/// Columns are grouped by ascending label, keeping input order within a class,
/// and scaled to unit l2 norm.
pub fn build_dictionary(features: &[(DVector<f64>, ClassLabel)]) -> Result<Dictionary> {
    let Some((first, _)) = features.first() else {
        return Err(Error::InvalidInput("no training features".into()));
    };
    let m = first.len();
    if m == 0 {
        return Err(Error::Dimension("zero-length feature vectors".into()));
    }
    let mut by_class: BTreeMap<ClassLabel, Vec<usize>> = BTreeMap::new();
    for (i, (v, label)) in features.iter().enumerate() {
        if v.len() != m {
            return Err(Error::Dimension(format!(
                "sample {i} has length {}, expected {m}",
                v.len()
            )));
        }
        if !v.iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidInput(format!("sample {i} has non-finite entries")));
        }
        if v.norm() == 0.0 {
            return Err(Error::InvalidInput(format!("sample {i} (class {label}) is the zero vector")));
        }
        by_class.entry(*label).or_default().push(i);
    }
    if by_class.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 classes, got {}",
            by_class.len()
        )));
    }

    let order: Vec<usize> = by_class.values().flatten().copied().collect();
    let mut phi = DMatrix::zeros(m, order.len());
    let mut column_norms = Vec::with_capacity(order.len());
    for (c, &i) in order.iter().enumerate() {
        let v = &features[i].0;
        let norm = v.norm();
        phi.set_column(c, &(v / norm));
        column_norms.push(norm);
    }
    let partition = BlockPartition::new(by_class.values().map(Vec::len).collect())?;
    Ok(Dictionary {
        phi,
        partition,
        class_ids: by_class.keys().copied().collect(),
        column_norms,
    })
}

/// `[Phi, I]`: the dictionary with an identity appended to absorb sparse outliers, which
/// form a single extra block of size `m`.
#[derive(Debug, Clone)]
pub struct AugmentedDictionary {
    base: Dictionary,
    phi_bar: DMatrix<f64>,
    partition: BlockPartition,
}

impl AugmentedDictionary {
    pub fn new(base: &Dictionary) -> Result<Self> {
        let (m, n) = base.phi.shape();
        let mut phi_bar = DMatrix::zeros(m, n + m);
        phi_bar.columns_mut(0, n).copy_from(&base.phi);
        phi_bar.view_mut((0, n), (m, m)).fill_with_identity();
        let partition = base.partition.with_block(m)?;
        Ok(Self {
            base: base.clone(),
            phi_bar,
            partition,
        })
    }

    pub fn base(&self) -> &Dictionary {
        &self.base
    }

    pub fn phi_bar(&self) -> &DMatrix<f64> {
        &self.phi_bar
    }

    /// Class blocks followed by the outlier block.
    pub fn partition(&self) -> &BlockPartition {
        &self.partition
    }
}

/// Keeps the entries of `x` in block `class_index` and zeroes the rest.
pub fn class_restrict(x: &DVector<f64>, class_index: usize, partition: &BlockPartition) -> Result<DVector<f64>> {
    if class_index >= partition.num_blocks() {
        return Err(Error::Index {
            index: class_index,
            len: partition.num_blocks(),
        });
    }
    if x.len() != partition.total() {
        return Err(Error::Dimension(format!(
            "vector length {} does not match partition size {}",
            x.len(),
            partition.total()
        )));
    }
    let r = partition.range(class_index);
    let mut out = DVector::zeros(x.len());
    out.rows_mut(r.start, r.len()).copy_from(&x.rows(r.start, r.len()));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(xs)
    }

    #[test]
    fn groups_and_normalizes() {
        let feats = vec![
            (v(&[0.0, 3.0]), 7),
            (v(&[1.0, 0.0]), 2),
            (v(&[2.0, 2.0]), 7),
        ];
        let d = build_dictionary(&feats).unwrap();
        assert_eq!(d.class_ids(), &[2, 7]);
        assert_eq!(d.partition().sizes(), &[1, 2]);
        assert_eq!(d.column_norms()[1], 3.0);
        assert_eq!(d.phi().column(1).as_slice(), &[0.0, 1.0]);
        for c in d.phi().column_iter() {
            assert!((c.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn two_singletons() {
        let d = build_dictionary(&[(v(&[1.0, 0.0]), 0), (v(&[0.0, 1.0]), 1)]).unwrap();
        assert_eq!(d.partition().sizes(), &[1, 1]);
        assert_eq!(d.num_classes(), 2);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(build_dictionary(&[(v(&[1.0]), 0), (v(&[2.0]), 0)]).is_err());
        let err = build_dictionary(&[(v(&[1.0, 0.0]), 0), (v(&[0.0, 0.0]), 1)]).unwrap_err();
        assert!(err.to_string().contains("sample 1"));
        assert!(matches!(
            build_dictionary(&[(v(&[1.0, 0.0]), 0), (v(&[1.0]), 1)]),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn augmented_shape() {
        let d = build_dictionary(&[(v(&[1.0, 0.0, 1.0]), 0), (v(&[0.0, 1.0, 0.0]), 1)]).unwrap();
        let a = AugmentedDictionary::new(&d).unwrap();
        assert_eq!(a.phi_bar().shape(), (3, 5));
        assert_eq!(a.partition().total(), 5);
        assert_eq!(a.partition().sizes(), &[1, 1, 3]);
        assert_eq!(a.phi_bar().view((0, 2), (3, 3)), DMatrix::<f64>::identity(3, 3));
    }

    #[test]
    fn restrict_example() {
        let p = BlockPartition::uniform(2, 2).unwrap();
        let x = v(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(class_restrict(&x, 0, &p).unwrap(), v(&[1.0, 2.0, 0.0, 0.0]));
        assert!(matches!(class_restrict(&x, 2, &p), Err(Error::Index { .. })));
    }

    proptest! {
        #[test]
        fn restrict_is_complete_and_idempotent(
            sizes in prop::collection::vec(1usize..4, 1..6),
            seed in any::<u64>(),
        ) {
            let p = BlockPartition::new(sizes).unwrap();
            let mut rng = crate::rng::SeededRng::new(seed);
            let x = DVector::from_fn(p.total(), |_, _| rng.normal());
            let mut sum = DVector::zeros(p.total());
            for j in 0..p.num_blocks() {
                let r = class_restrict(&x, j, &p).unwrap();
                prop_assert_eq!(class_restrict(&r, j, &p).unwrap(), r.clone());
                sum += r;
            }
            prop_assert_eq!(sum, x);
        }
    }
}
