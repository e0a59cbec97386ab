use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::extractor::{principal_components, ExtractorKind, FeatureExtractor, LinearModel};
use crate::error::{Error, Result};
use crate::linalg::{fix_column_signs, sym_eigen_ascending};

const DEGREE_SHIFT: f64 = 1e-8;
const RIDGE: f64 = 1e-8;
const DEFAULT_PCA_CAP: usize = 100;

fn default_k() -> usize {
    5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LppParams {
    pub dim: usize,
    /// Defaults to `min(N - 1, D, 100)`.
    #[serde(default)]
    pub pca_dim: Option<usize>,
    #[serde(default = "default_k")]
    pub k: usize,
    /// Heat kernel width; defaults to the mean squared pairwise distance.
    #[serde(default)]
    pub t: Option<f64>,
}

impl LppParams {
    pub fn new(dim: usize) -> Self {
        Self { dim, pca_dim: None, k: default_k(), t: None }
    }
}

/// Quantities of the solved generalized eigenproblem `A a = mu B a`, in PCA coordinates.
#[derive(Debug, Clone)]
pub struct LppDiagnostics {
    pub pca_dim: usize,
    pub k: usize,
    pub t: f64,
    /// Graph weights, `N x N`.
    pub weights: DMatrix<f64>,
    /// `U L U^T`.
    pub a: DMatrix<f64>,
    /// `U D_g U^T`, including any ridge.
    pub b: DMatrix<f64>,
    pub ridge_applied: bool,
    pub eigenvalues: Vec<f64>,
    /// Generalized eigenvectors as columns, `pca_dim x d`.
    pub vectors: DMatrix<f64>,
}

/// Symmetric k-nearest-neighbour graph with heat-kernel weights.
/// Neighbour ties resolve to the lower index.
fn knn_graph(points: &DMatrix<f64>, k: usize, t: f64) -> DMatrix<f64> {
    let n = points.ncols();
    let dist = pairwise_sq_distances(points);
    let mut w = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        others.sort_by(|&a, &b| dist[(i, a)].total_cmp(&dist[(i, b)]).then(a.cmp(&b)));
        for &j in others.iter().take(k) {
            let v = (-dist[(i, j)] / t).exp();
            w[(i, j)] = v;
            w[(j, i)] = v;
        }
    }
    w
}

fn pairwise_sq_distances(points: &DMatrix<f64>) -> DMatrix<f64> {
    let n = points.ncols();
    DMatrix::from_fn(n, n, |i, j| (points.column(i) - points.column(j)).norm_squared())
}

/// Laplacianfaces: PCA to `pca_dim`, then the `d` smallest generalized
/// eigenvectors of the graph Laplacian problem.
pub fn lpp_fit(train: &[DVector<f64>], params: &LppParams) -> Result<FeatureExtractor> {
    let n = train.len();
    let dim = train.first().map(|v| v.len()).unwrap_or(0);
    if n < 2 {
        return Err(Error::InvalidInput("need at least two training vectors".into()));
    }
    let max_pca = dim.min(n - 1);
    let pca_dim = params.pca_dim.unwrap_or(max_pca.min(DEFAULT_PCA_CAP));
    if params.dim == 0 || params.dim > pca_dim || pca_dim > max_pca {
        return Err(Error::Dimension(format!(
            "need 1 <= d ({}) <= pca_dim ({pca_dim}) <= min(D, N-1) ({max_pca})",
            params.dim
        )));
    }
    if params.k == 0 || params.k >= n {
        return Err(Error::InvalidInput(format!("k = {} must be in [1, N-1 = {}]", params.k, n - 1)));
    }
    if let Some(t) = params.t {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidInput(format!("heat parameter t = {t} must be positive")));
        }
    }

    let (mean, basis, pca_eigenvalues) = principal_components(train, pca_dim)?;
    let centered = DMatrix::from_columns(&train.iter().map(|x| x - &mean).collect::<Vec<_>>());
    let u = basis.transpose() * centered;

    let t = match params.t {
        Some(t) => t,
        None => {
            let dist = pairwise_sq_distances(&u);
            let pairs = (n * (n - 1) / 2) as f64;
            let mean_sq = dist.upper_triangle().sum() / pairs;
            if mean_sq > 0.0 {
                mean_sq
            } else {
                1.0
            }
        }
    };
    let weights = knn_graph(&u, params.k, t);
    let degrees = DVector::from_iterator(n, weights.row_iter().map(|r| r.sum() + DEGREE_SHIFT));
    let laplacian = DMatrix::from_diagonal(&degrees) - &weights;
    let a = &u * laplacian * u.transpose();
    let mut b = &u * DMatrix::from_diagonal(&degrees) * u.transpose();
    b = (&b + b.transpose()) * 0.5;

    let (chol, ridge_applied) = match b.clone().cholesky() {
        Some(c) => (c, false),
        None => {
            let ridge = RIDGE * b.trace().max(f64::MIN_POSITIVE);
            for i in 0..pca_dim {
                b[(i, i)] += ridge;
            }
            let c = b
                .clone()
                .cholesky()
                .ok_or_else(|| Error::Numeric("degree-weighted scatter not positive definite after ridge".into()))?;
            (c, true)
        }
    };
    let l = chol.l();
    let left = l
        .solve_lower_triangular(&a)
        .ok_or_else(|| Error::Numeric("singular Cholesky factor".into()))?;
    let reduced = l
        .solve_lower_triangular(&left.transpose())
        .ok_or_else(|| Error::Numeric("singular Cholesky factor".into()))?;
    let (values, vectors) = sym_eigen_ascending(&reduced);
    let lead = vectors.columns(0, params.dim).into_owned();
    let mut directions = l
        .transpose()
        .solve_upper_triangular(&lead)
        .ok_or_else(|| Error::Numeric("singular Cholesky factor".into()))?;
    fix_column_signs(&mut directions);

    let projection = directions.transpose() * basis.transpose();
    let diagnostics = LppDiagnostics {
        pca_dim,
        k: params.k,
        t,
        weights,
        a,
        b,
        ridge_applied,
        eigenvalues: values.iter().take(params.dim).copied().collect(),
        vectors: directions,
    };
    Ok(FeatureExtractor::from_model(
        ExtractorKind::Laplacianfaces(params.clone()),
        LinearModel { mean, projection, pca_eigenvalues, lpp: Some(diagnostics) },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;

    fn cloud(seed: u64, n: usize, dim: usize) -> Vec<DVector<f64>> {
        let mut rng = SeededRng::new(seed);
        (0..n).map(|_| DVector::from_fn(dim, |i, _| rng.normal() * (1.0 + i as f64))).collect()
    }

    #[test]
    fn graph_is_symmetric_with_k_neighbours() {
        let pts = DMatrix::from_columns(&cloud(5, 12, 3));
        let w = knn_graph(&pts, 3, 1.0);
        assert_eq!(w, w.transpose());
        for i in 0..12 {
            assert_eq!(w[(i, i)], 0.0);
            assert!(w.row(i).iter().filter(|v| **v > 0.0).count() >= 3);
        }
    }

    #[test]
    fn validates_parameters() {
        let train = cloud(1, 10, 6);
        let fit = |d, p, k| lpp_fit(&train, &LppParams { dim: d, pca_dim: p, k, t: None });
        assert!(fit(2, Some(5), 3).is_ok());
        assert!(matches!(fit(6, Some(5), 3), Err(Error::Dimension(_))));
        assert!(matches!(fit(2, Some(7), 3), Err(Error::Dimension(_))));
        assert!(fit(2, Some(5), 10).is_err());
        assert!(fit(2, Some(5), 0).is_err());
        let bad_t = lpp_fit(&train, &LppParams { dim: 2, pca_dim: None, k: 3, t: Some(-1.0) });
        assert!(bad_t.is_err());
    }

    #[test]
    fn default_pca_dim() {
        let ex = lpp_fit(&cloud(2, 9, 20), &LppParams::new(2)).unwrap();
        assert_eq!(ex.model().unwrap().lpp.as_ref().unwrap().pca_dim, 8);
    }
}
