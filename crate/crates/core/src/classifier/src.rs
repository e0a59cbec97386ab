//! Residual-rule classification over a sparse code.

use nalgebra::DVector;

use super::{AugmentedDictionary, ClassLabel, Dictionary};
use crate::error::{Error, Result};
use crate::solver::{SensingProblem, SolverKind, SolverOptions};

#[derive(Debug, Clone)]
pub struct ClassificationResult {
    pub predicted_class: ClassLabel,
    /// Position of the predicted class among the dictionary blocks.
    pub predicted_index: usize,
    /// `||y - eps - Phi delta_j(x)||` per class, in dictionary block order.
    pub residuals: Vec<f64>,
    pub x_hat: DVector<f64>,
    /// Estimated outliers (robust mode only).
    pub epsilon_hat: Option<DVector<f64>>,
    pub solver_name: String,
}

/// Index of the smallest value; the lowest index wins ties.
pub(crate) fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    best
}

fn unit(y: &DVector<f64>, m: usize) -> Result<DVector<f64>> {
    if y.len() != m {
        return Err(Error::Dimension(format!(
            "test vector has length {}, dictionary rows {m}",
            y.len()
        )));
    }
    let norm = y.norm();
    if !(norm.is_finite() && norm > 0.0) {
        return Err(Error::InvalidInput("test vector must be nonzero and finite".into()));
    }
    Ok(y / norm)
}

fn class_residuals(dict: &Dictionary, target: &DVector<f64>, x: &DVector<f64>) -> Vec<f64> {
    dict.partition()
        .ranges()
        .map(|r| {
            let fit = dict.phi().columns(r.start, r.len()) * x.rows(r.start, r.len());
            (target - fit).norm()
        })
        .collect()
}

fn finish(
    dict: &Dictionary,
    residuals: Vec<f64>,
    x_hat: DVector<f64>,
    epsilon_hat: Option<DVector<f64>>,
    solver: SolverKind,
) -> Result<ClassificationResult> {
    if residuals.iter().any(|r| !r.is_finite()) {
        return Err(Error::Numeric(format!("{} produced non-finite residuals", solver.name())));
    }
    let idx = argmin(&residuals);
    Ok(ClassificationResult {
        predicted_class: dict.class_ids()[idx],
        predicted_index: idx,
        residuals,
        x_hat,
        epsilon_hat,
        solver_name: solver.name().to_string(),
    })
}

/// Codes the unit-normalized `y` over `dict` and picks the class with the smallest residual.
pub fn classify(
    dict: &Dictionary,
    y: &DVector<f64>,
    solver: SolverKind,
    opts: &SolverOptions,
) -> Result<ClassificationResult> {
    let y = unit(y, dict.m())?;
    let problem = SensingProblem::new(dict.phi().clone(), y.clone(), dict.partition().clone())?;
    let sol = solver
        .solve(&problem, opts)
        .map_err(|e| Error::Numeric(format!("{} solve failed: {e}", solver.name())))?;
    let residuals = class_residuals(dict, &y, &sol.x_hat);
    finish(dict, residuals, sol.x_hat, None, solver)
}

/// Like [`classify`], but codes `y` over `[Phi, I]` and removes the estimated outliers
/// before measuring class residuals.
pub fn classify_robust(
    dict: &Dictionary,
    y: &DVector<f64>,
    solver: SolverKind,
    opts: &SolverOptions,
) -> Result<ClassificationResult> {
    let aug = AugmentedDictionary::new(dict)?;
    classify_augmented(&aug, y, solver, opts)
}

/// [`classify_robust`] with a prebuilt augmented dictionary.
pub fn classify_augmented(
    aug: &AugmentedDictionary,
    y: &DVector<f64>,
    solver: SolverKind,
    opts: &SolverOptions,
) -> Result<ClassificationResult> {
    let dict = aug.base();
    let y = unit(y, dict.m())?;
    let problem = SensingProblem::new(aug.phi_bar().clone(), y.clone(), aug.partition().clone())?;
    let sol = solver
        .solve(&problem, opts)
        .map_err(|e| Error::Numeric(format!("{} solve failed: {e}", solver.name())))?;
    let n = dict.n();
    let x_hat = sol.x_hat.rows(0, n).into_owned();
    let eps = sol.x_hat.rows(n, dict.m()).into_owned();
    let cleaned = &y - &eps;
    let residuals = class_residuals(dict, &cleaned, &x_hat);
    finish(dict, residuals, x_hat, Some(eps), solver)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::build_dictionary;

    #[test]
    fn argmin_prefers_lowest_index() {
        assert_eq!(argmin(&[2.0, 1.0, 1.0]), 1);
        assert_eq!(argmin(&[0.5]), 0);
    }

    #[test]
    fn identical_classes_tie_to_lower_index() {
        let a = DVector::from_vec(vec![1.0, 0.2, 0.0]);
        let b = DVector::from_vec(vec![0.0, 1.0, 0.3]);
        let feats = vec![(a.clone(), 4), (b.clone(), 4), (a.clone(), 9), (b.clone(), 9)];
        let d = build_dictionary(&feats).unwrap();
        let y = &a + &b * 0.5;
        for solver in [SolverKind::Bsbl, SolverKind::L1, SolverKind::BlockL1] {
            let r = classify(&d, &y, solver, &SolverOptions::default()).unwrap();
            assert_eq!(r.predicted_class, 4, "{solver:?} residuals {:?}", r.residuals);
        }
    }

    #[test]
    fn rejects_zero_test_vector() {
        let d = build_dictionary(&[
            (DVector::from_vec(vec![1.0, 0.0]), 0),
            (DVector::from_vec(vec![0.0, 1.0]), 1),
        ])
        .unwrap();
        assert!(classify(&d, &DVector::zeros(2), SolverKind::Bsbl, &SolverOptions::default()).is_err());
        assert!(classify(&d, &DVector::zeros(3), SolverKind::Bsbl, &SolverOptions::default()).is_err());
    }
}
