//! Small dense linear-algebra helpers shared by the solvers and extractors.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// First-order autoregressive Toeplitz matrix, `B[p, q] = r^|p - q|`.
pub fn ar1_toeplitz(n: usize, r: f64) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |p, q| r.powi(p.abs_diff(q) as i32))
}

/// Lower Cholesky factor of a symmetric positive definite matrix.
pub fn cholesky(a: &DMatrix<f64>, what: &str) -> Result<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
    a.clone()
        .cholesky()
        .ok_or_else(|| Error::Numeric(format!("{what} is not positive definite")))
}

/// log-determinant from a Cholesky factor.
pub fn chol_logdet(chol: &nalgebra::Cholesky<f64, nalgebra::Dyn>) -> f64 {
    2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>()
}

/// Symmetric eigendecomposition with eigenvalues sorted ascending.
pub fn sym_eigen_ascending(a: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let sym = (a + a.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = DVector::from_iterator(order.len(), order.iter().map(|&i| eig.eigenvalues[i]));
    let vectors = DMatrix::from_fn(a.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Flips the sign of each column so its largest-magnitude entry is positive.
/// Ties on magnitude resolve to the lowest row index.
pub fn fix_column_signs(m: &mut DMatrix<f64>) {
    for mut col in m.column_iter_mut() {
        let mut best = 0;
        for (i, v) in col.iter().enumerate() {
            if v.abs() > col[best].abs() {
                best = i;
            }
        }
        if col[best] < 0.0 {
            col.neg_mut();
        }
    }
}

/// Principal angles (radians, ascending) between the column spaces of `a` and `b`.
///
/// Small angles come from the sines, large ones from the cosines, so both ends
/// keep full precision.
pub fn principal_angles(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Vec<f64> {
    let qa = a.clone().qr().q();
    let qb = b.clone().qr().q();
    let overlap = qa.transpose() * &qb;
    let mut cos: Vec<f64> = overlap.singular_values().iter().map(|s| s.clamp(0.0, 1.0)).collect();
    cos.sort_by(|x, y| y.total_cmp(x));
    let residual = &qb - &qa * &overlap;
    let mut sin: Vec<f64> = residual.singular_values().iter().map(|s| s.clamp(0.0, 1.0)).collect();
    sin.sort_by(f64::total_cmp);
    cos.iter()
        .enumerate()
        .map(|(i, &c)| match sin.get(i) {
            Some(&s) if c * c >= 0.5 => s.asin(),
            _ => c.acos(),
        })
        .collect()
}

pub fn all_finite<'a>(values: impl IntoIterator<Item = &'a f64>) -> bool {
    values.into_iter().all(|v| v.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ar1_is_symmetric_toeplitz() {
        let b = ar1_toeplitz(4, 0.5);
        assert_eq!(b[(0, 0)], 1.0);
        assert_eq!(b[(0, 3)], 0.125);
        assert_eq!(b[(3, 0)], 0.125);
        assert_eq!(b[(1, 2)], 0.5);
    }

    #[test]
    fn principal_angles_of_same_span_vanish() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let b = DMatrix::from_row_slice(3, 2, &[1.0, 1.0, 1.0, -1.0, 0.0, 0.0]);
        assert!(principal_angles(&a, &b).iter().all(|t| *t < 1e-7));
    }

    #[test]
    fn eigen_sorted() {
        let a = DMatrix::from_row_slice(2, 2, &[3.0, 0.0, 0.0, 1.0]);
        let (vals, _) = sym_eigen_ascending(&a);
        assert_eq!(vals.as_slice(), &[1.0, 3.0]);
    }
}
