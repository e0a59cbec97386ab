use bsbl::features::{eigenfaces_fit, lpp_fit, LppParams};
use bsbl::linalg::principal_angles;
use bsbl::rng::SeededRng;
use nalgebra::{DMatrix, DVector};

fn anisotropic(seed: u64, n: usize, dim: usize) -> Vec<DVector<f64>> {
    let mut rng = SeededRng::new(seed);
    let offset = DVector::from_fn(dim, |i, _| 10.0 + i as f64);
    (0..n)
        .map(|_| DVector::from_fn(dim, |i, _| rng.normal() * (dim - i) as f64) + &offset)
        .collect()
}

#[test]
fn exact_affine_plane_reconstructs() {
    let mut rng = SeededRng::new(11);
    let dim = 9;
    let origin = DVector::from_fn(dim, |_, _| rng.normal() * 5.0);
    let u = DVector::from_fn(dim, |_, _| rng.normal());
    let v = DVector::from_fn(dim, |_, _| rng.normal());
    let train: Vec<_> = (0..14)
        .map(|_| &origin + &u * rng.normal() * 3.0 + &v * rng.normal())
        .collect();
    let ex = eigenfaces_fit(&train, 2).unwrap();
    let model = ex.model().unwrap();
    for x in &train {
        let z = ex.transform(x).unwrap();
        let back = model.projection.transpose() * z + &model.mean;
        assert!((back - x).norm() < 1e-8);
    }
}

#[test]
fn captured_variance_matches_covariance_eigenvalues() {
    for seed in 0..5 {
        let train = anisotropic(seed, 40, 6);
        let n = train.len() as f64;
        let mean = train.iter().fold(DVector::zeros(6), |acc, x| acc + x) / n;
        let mut cov = DMatrix::zeros(6, 6);
        for x in &train {
            let c = x - &mean;
            cov += &c * c.transpose();
        }
        cov /= n - 1.0;
        let eig = cov.clone().symmetric_eigen();
        let top = eig.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let expected = top / cov.trace();
        let ex = eigenfaces_fit(&train, 1).unwrap();
        let got = ex.model().unwrap().explained_variance_ratio(1);
        assert!((got - expected).abs() < 1e-8, "seed {seed}: {got} vs {expected}");
        // the same fraction measured on the projected data
        let projected: f64 = train
            .iter()
            .map(|x| ex.transform(x).unwrap()[0].powi(2))
            .sum::<f64>()
            / (n - 1.0);
        assert!((projected / cov.trace() - expected).abs() < 1e-8);
    }
}

#[test]
fn duplicating_training_set_keeps_subspace() {
    let train = anisotropic(3, 25, 10);
    let doubled: Vec<_> = train.iter().chain(train.iter()).cloned().collect();
    let a = eigenfaces_fit(&train, 4).unwrap();
    let b = eigenfaces_fit(&doubled, 4).unwrap();
    let pa = a.model().unwrap().projection.transpose();
    let pb = b.model().unwrap().projection.transpose();
    let angles = principal_angles(&pa, &pb);
    assert!(angles.iter().all(|t| *t < 1e-8), "{angles:?}");
    assert!((&a.model().unwrap().mean - &b.model().unwrap().mean).amax() < 1e-12);
}

#[test]
fn transform_is_affine() {
    let train = anisotropic(4, 30, 8);
    let ex = eigenfaces_fit(&train, 3).unwrap();
    let mean = ex.model().unwrap().mean.clone();
    let mut rng = SeededRng::new(99);
    for _ in 0..20 {
        let a = DVector::from_fn(8, |_, _| rng.normal() * 20.0);
        let b = DVector::from_fn(8, |_, _| rng.normal() * 20.0);
        let sum = ex.transform(&a).unwrap() + ex.transform(&b).unwrap();
        let joint = ex.transform(&(&a + &b - &mean)).unwrap();
        assert!((sum - &joint).norm() <= 1e-10 * joint.norm().max(1.0));
    }
}

#[test]
fn fits_are_deterministic() {
    let train = anisotropic(5, 20, 7);
    let a = eigenfaces_fit(&train, 3).unwrap();
    let b = eigenfaces_fit(&train, 3).unwrap();
    assert_eq!(a.model().unwrap().projection, b.model().unwrap().projection);
    let p = LppParams { dim: 2, pca_dim: Some(5), k: 4, t: None };
    let a = lpp_fit(&train, &p).unwrap();
    let b = lpp_fit(&train, &p).unwrap();
    assert_eq!(a.model().unwrap().projection, b.model().unwrap().projection);
}

#[test]
fn lpp_generalized_eigen_residual() {
    for seed in 0..6 {
        let train = anisotropic(seed, 30, 12);
        let params = LppParams { dim: 4, pca_dim: Some(8), k: 5, t: None };
        let ex = lpp_fit(&train, &params).unwrap();
        let diag = ex.model().unwrap().lpp.as_ref().unwrap();
        assert_eq!(diag.weights, diag.weights.transpose());
        for (i, mu) in diag.eigenvalues.iter().enumerate() {
            let a = diag.vectors.column(i);
            let residual = (&diag.a * a - (&diag.b * a) * *mu).norm();
            assert!(residual <= 1e-6 * a.norm(), "seed {seed} pair {i}: {residual}");
        }
        assert!(diag.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn lpp_separates_two_clusters() {
    let mut rng = SeededRng::new(21);
    let dim = 6;
    let shift = DVector::from_fn(dim, |i, _| if i == 0 { 10.0 } else { 0.0 });
    let mut train = Vec::new();
    for c in 0..2 {
        for _ in 0..15 {
            let jitter = DVector::from_fn(dim, |_, _| rng.normal() * 0.5);
            train.push(if c == 0 { jitter } else { jitter + &shift * 2.0 });
        }
    }
    let ex = lpp_fit(&train, &LppParams { dim: 1, pca_dim: Some(5), k: 5, t: None }).unwrap();
    let z: Vec<f64> = train.iter().map(|x| ex.transform(x).unwrap()[0]).collect();
    let (a, b) = z.split_at(15);
    let range = |s: &[f64]| {
        let lo = s.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    };
    let (alo, ahi) = range(a);
    let (blo, bhi) = range(b);
    let gap = if ahi < blo { blo - ahi } else { alo - bhi };
    let spread = (ahi - alo).max(bhi - blo);
    assert!(gap > spread, "gap {gap} spread {spread}");
}

/// Dense whitening oracle for `A a = mu B a` on the same fully connected graph.
#[test]
fn lpp_full_graph_matches_dense_oracle() {
    let n = 16;
    let train = anisotropic(8, n, 7);
    let params = LppParams { dim: 3, pca_dim: Some(6), k: n - 1, t: Some(1e9) };
    let ex = lpp_fit(&train, &params).unwrap();
    let model = ex.model().unwrap();
    let diag = model.lpp.as_ref().unwrap();

    let mean = train.iter().fold(DVector::zeros(7), |acc, x| acc + x) / n as f64;
    let centered = DMatrix::from_columns(&train.iter().map(|x| x - &mean).collect::<Vec<_>>());
    let svd = centered.clone().svd(true, false);
    let u = svd.u.unwrap();
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let basis = DMatrix::from_fn(7, 6, |r, c| u[(r, order[c])]);
    let pts = basis.transpose() * centered;

    let mut w = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                w[(i, j)] = (-(pts.column(i) - pts.column(j)).norm_squared() / 1e9).exp();
            }
        }
    }
    let deg = DVector::from_fn(n, |i, _| w.row(i).sum() + 1e-8);
    let lap = DMatrix::from_diagonal(&deg) - &w;
    let a = &pts * lap * pts.transpose();
    let b = &pts * DMatrix::from_diagonal(&deg) * pts.transpose();
    let eb = b.clone().symmetric_eigen();
    let inv_sqrt = &eb.eigenvectors
        * DMatrix::from_diagonal(&eb.eigenvalues.map(|v| 1.0 / v.sqrt()))
        * eb.eigenvectors.transpose();
    let c = &inv_sqrt * a * &inv_sqrt;
    let ec = c.symmetric_eigen();
    let mut idx: Vec<usize> = (0..6).collect();
    idx.sort_by(|&i, &j| ec.eigenvalues[i].total_cmp(&ec.eigenvalues[j]));
    let lead = DMatrix::from_fn(6, 3, |r, col| ec.eigenvectors[(r, idx[col])]);
    let oracle = &basis * (&inv_sqrt * lead);

    let angles = principal_angles(&model.projection.transpose(), &oracle);
    assert!(angles.iter().all(|t| *t < 1e-4), "{angles:?}");
    for k in 0..3 {
        assert!((diag.eigenvalues[k] - ec.eigenvalues[idx[k]]).abs() < 1e-9 * ec.eigenvalues[idx[k]].abs());
    }
}
