use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Which eigenproblem yields the principal directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PcaRoute {
    /// Covariance when `N > D`, Gram matrix otherwise.
    #[default]
    Auto,
    /// Eigendecomposition of the `D × D` covariance.
    Covariance,
    /// Eigendecomposition of the `N × N` Gram matrix, mapped back through the data.
    Gram,
}

#[derive(Debug, Clone)]
pub struct Pca {
    /// Column means of the samples.
    pub mean: DVector<f64>,
    /// `D × c`, orthonormal columns ordered by descending variance.
    pub projection: DMatrix<f64>,
    /// Sample variance along each projection column.
    pub variances: Vec<f64>,
}

impl Pca {
    /// Centers and projects `samples` (`N × D`) onto the principal directions.
    pub fn transform(&self, samples: &DMatrix<f64>) -> DMatrix<f64> {
        center(samples, &self.mean) * &self.projection
    }
}

pub fn fit_pca(samples: &DMatrix<f64>, code_len: usize) -> Result<Pca> {
    fit_pca_with(samples, code_len, PcaRoute::Auto)
}

pub fn fit_pca_with(samples: &DMatrix<f64>, code_len: usize, route: PcaRoute) -> Result<Pca> {
    let (n, d) = samples.shape();
    if code_len == 0 {
        return Err(Error::invalid("code length must be positive"));
    }
    if code_len > d {
        return Err(Error::invalid(format!("code length {code_len} exceeds input dimension {d}")));
    }
    if n < code_len {
        return Err(Error::invalid(format!("{n} samples cannot span {code_len} directions")));
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("samples contain non-finite values"));
    }

    let mean = samples.row_mean().transpose();
    let centered = center(samples, &mean);
    let denom = (n.max(2) - 1) as f64;

    let use_gram = match route {
        PcaRoute::Auto => n <= d,
        PcaRoute::Covariance => false,
        PcaRoute::Gram => true,
    };

    let (eigenvalues, vectors) = if use_gram {
        let gram = &centered * centered.transpose();
        let eig = SymmetricEigen::new(gram);
        (eig.eigenvalues.iter().map(|l| l / denom).collect::<Vec<_>>(), eig.eigenvectors)
    } else {
        let cov = centered.transpose() * &centered / denom;
        let eig = SymmetricEigen::new(cov);
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    };

    let mut order: Vec<usize> = (0..eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eigenvalues[b].total_cmp(&eigenvalues[a]).then(a.cmp(&b)));

    let largest = eigenvalues[order[0]].max(0.0);
    let tol = largest * 1e-10;
    let rank = order.iter().filter(|&&i| eigenvalues[i] > tol && eigenvalues[i] > 0.0).count();
    if rank < code_len {
        return Err(Error::RankDeficient {
            rank,
            required: code_len,
        });
    }

    let mut projection = DMatrix::zeros(d, code_len);
    let mut variances = Vec::with_capacity(code_len);
    for (j, &i) in order.iter().take(code_len).enumerate() {
        let mut column: DVector<f64> = if use_gram {
            // p = Xcᵀu / ‖Xcᵀu‖
            centered.transpose() * vectors.column(i)
        } else {
            vectors.column(i).into_owned()
        };
        column /= column.norm();
        fix_sign(&mut column);
        projection.set_column(j, &column);
        variances.push(eigenvalues[i]);
    }

    Ok(Pca {
        mean,
        projection,
        variances,
    })
}

fn center(samples: &DMatrix<f64>, mean: &DVector<f64>) -> DMatrix<f64> {
    let mut centered = samples.clone();
    for mut row in centered.row_iter_mut() {
        row -= mean.transpose();
    }
    centered
}

/// Flips the column so its largest-magnitude entry (first on ties) is non-negative.
fn fix_sign(column: &mut DVector<f64>) {
    let mut best = 0;
    for (i, v) in column.iter().enumerate() {
        if v.abs() > column[best].abs() {
            best = i;
        }
    }
    if column[best] < 0.0 {
        column.neg_mut();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn orthonormality_error(p: &DMatrix<f64>) -> f64 {
        let c = p.ncols();
        (p.transpose() * p - DMatrix::identity(c, c)).amax()
    }

    #[test]
    fn scaled_identity_rows() {
        let samples = DMatrix::from_row_slice(2, 2, &[3.0, 0.0, 0.0, 3.0]);
        let pca = fit_pca(&samples, 1).unwrap();
        assert!(orthonormality_error(&pca.projection) < 1e-12);
        // centered rows are ±(1.5, −1.5): the only direction with variance
        let p = pca.projection.column(0);
        assert!((p[0].abs() - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((p[0] + p[1]).abs() < 1e-12);
    }

    #[test]
    fn anisotropic_gaussian_picks_dominant_axis() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let wide = Normal::new(0.0, 2.0).unwrap();
        let narrow = Normal::new(0.0, 1.0).unwrap();
        let n = 2000;
        let mut data = Vec::with_capacity(2 * n);
        for _ in 0..n {
            data.push(wide.sample(&mut rng));
            data.push(narrow.sample(&mut rng));
        }
        let samples = DMatrix::from_row_slice(n, 2, &data);

        // independent oracle: closed-form eigenvector of the explicit 2×2 covariance
        let (mut mx, mut my) = (0.0, 0.0);
        for r in 0..n {
            mx += samples[(r, 0)];
            my += samples[(r, 1)];
        }
        mx /= n as f64;
        my /= n as f64;
        let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
        for r in 0..n {
            let (dx, dy) = (samples[(r, 0)] - mx, samples[(r, 1)] - my);
            sxx += dx * dx;
            sxy += dx * dy;
            syy += dy * dy;
        }
        let (a, b, c) = (sxx / (n - 1) as f64, sxy / (n - 1) as f64, syy / (n - 1) as f64);
        let lambda = (a + c) / 2.0 + (((a - c) / 2.0).powi(2) + b * b).sqrt();
        let (ex, ey) = (b, lambda - a);
        let norm = (ex * ex + ey * ey).sqrt();

        let pca = fit_pca(&samples, 1).unwrap();
        let p = pca.projection.column(0);
        assert!(p[0].abs() > 0.99, "projection {p:?}");
        assert!((p[0] * ex / norm + p[1] * ey / norm).abs() > 1.0 - 1e-9);
        assert!((pca.variances[0] - lambda).abs() < 1e-9 * lambda);
    }

    #[test]
    fn gram_and_covariance_routes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let normal = Normal::new(0.0, 1.0).unwrap();
        for (n, d) in [(40, 12), (12, 40), (30, 30)] {
            let scales: Vec<f64> = (0..d).map(|j| 1.0 + j as f64).collect();
            let samples = DMatrix::from_fn(n, d, |_, j| normal.sample(&mut rng) * scales[j]);
            let c = 5;
            let cov = fit_pca_with(&samples, c, PcaRoute::Covariance).unwrap();
            let gram = fit_pca_with(&samples, c, PcaRoute::Gram).unwrap();
            assert!((cov.projection.clone() - gram.projection.clone()).amax() < 1e-6, "n={n} d={d}");
            for (a, b) in cov.variances.iter().zip(&gram.variances) {
                assert!((a - b).abs() < 1e-6 * a.max(1.0));
            }
            assert!(orthonormality_error(&cov.projection) < 1e-6);
            for j in 0..c {
                let col = cov.projection.column(j);
                let big = col.iter().copied().fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
                assert!(big >= 0.0);
            }
        }
    }

    #[test]
    fn paper_configuration_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let normal = Normal::new(0.0, 1.0).unwrap();
        let samples = DMatrix::from_fn(64, 4096, |_, _| normal.sample(&mut rng));
        let pca = fit_pca(&samples, 8).unwrap();
        assert_eq!(pca.mean.len(), 4096);
        assert_eq!(pca.projection.shape(), (4096, 8));
        assert!(orthonormality_error(&pca.projection) < 1e-6);
    }

    #[test]
    fn errors() {
        let samples = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 1.0, 2.0, 3.0]);
        assert!(matches!(fit_pca(&samples, 1), Err(Error::RankDeficient { rank: 0, required: 1 })));
        assert!(fit_pca(&samples, 3).is_err());
        let line = DMatrix::from_row_slice(3, 2, &[0.0, 0.0, 1.0, 1.0, 2.0, 2.0]);
        assert!(matches!(fit_pca(&line, 2), Err(Error::RankDeficient { rank: 1, required: 2 })));
    }
}
