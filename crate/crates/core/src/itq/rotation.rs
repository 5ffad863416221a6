use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItqTrainReport {
    pub iterations: usize,
    /// Loss at the initial rotation, before any update.
    pub initial_loss: f64,
    /// Loss `‖sign(V·R) − V·R‖²_F` after each rotation update.
    pub loss_per_iter: Vec<f64>,
    /// `‖RᵀR − I‖_∞` after each rotation update.
    pub orthogonality_error: Vec<f64>,
}

impl ItqTrainReport {
    pub fn final_loss(&self) -> f64 {
        self.loss_per_iter.last().copied().unwrap_or(self.initial_loss)
    }
}

/// `sign(m)` elementwise with `sign(0) = +1`.
pub fn sign_codes(m: &DMatrix<f64>) -> DMatrix<f64> {
    m.map(|v| if v >= 0.0 { 1.0 } else { -1.0 })
}

/// `‖B − V·R‖²_F` for fixed codes `B`.
pub fn quantization_loss_with(b: &DMatrix<f64>, v: &DMatrix<f64>, r: &DMatrix<f64>) -> f64 {
    (b - v * r).norm_squared()
}

/// Loss at the optimal codes for `R`, i.e. `B = sign(V·R)`.
pub fn quantization_loss(v: &DMatrix<f64>, r: &DMatrix<f64>) -> f64 {
    let vr = v * r;
    (sign_codes(&vr) - vr).norm_squared()
}

/// Orthogonal `R` minimising `‖B − V·R‖_F`: with `BᵀV = S·Ω·Ŝᵀ`, `R = Ŝ·Sᵀ`.
pub fn procrustes_rotation(b: &DMatrix<f64>, v: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let m = b.transpose() * v;
    let svd = m.try_svd(true, true, f64::EPSILON, 0).ok_or_else(|| Error::Degenerate("SVD did not converge".into()))?;
    let s = svd.u.expect("requested U");
    let s_hat_t = svd.v_t.expect("requested Vᵀ");
    Ok(s_hat_t.transpose() * s.transpose())
}

/// Seeded random rotation: QR of a standard Gaussian `c × c` matrix, with the
/// columns of `Q` flipped so the diagonal of the triangular factor is positive.
pub fn initial_rotation(code_len: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::from_fn(code_len, code_len, |_, _| StandardNormal.sample(&mut rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..code_len {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

pub fn train_itq(projected: &DMatrix<f64>, iterations: usize, seed: u64) -> Result<(DMatrix<f64>, ItqTrainReport)> {
    train_itq_from(projected, initial_rotation(projected.ncols(), seed), iterations)
}

/// Alternates `B = sign(V·R)` and the Procrustes update for `iterations` rounds.
pub fn train_itq_from(
    projected: &DMatrix<f64>,
    initial: DMatrix<f64>,
    iterations: usize,
) -> Result<(DMatrix<f64>, ItqTrainReport)> {
    let c = projected.ncols();
    if iterations == 0 {
        return Err(Error::invalid("ITQ needs at least one iteration"));
    }
    if c == 0 || projected.nrows() == 0 {
        return Err(Error::Degenerate("empty projected data".into()));
    }
    if initial.shape() != (c, c) {
        return Err(Error::DimensionMismatch {
            expected: c * c,
            actual: initial.len(),
        });
    }
    if projected.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("projected data contains non-finite values"));
    }
    if projected.iter().all(|&v| v == 0.0) {
        return Err(Error::Degenerate("projected data is all zero".into()));
    }

    let mut rotation = initial;
    let initial_loss = quantization_loss(projected, &rotation);
    let mut loss_per_iter = Vec::with_capacity(iterations);
    let mut orthogonality_error = Vec::with_capacity(iterations);
    let identity = DMatrix::<f64>::identity(c, c);
    for _ in 0..iterations {
        let codes = sign_codes(&(projected * &rotation));
        rotation = procrustes_rotation(&codes, projected)?;
        loss_per_iter.push(quantization_loss(projected, &rotation));
        orthogonality_error.push((rotation.transpose() * &rotation - &identity).amax());
    }
    Ok((
        rotation,
        ItqTrainReport {
            iterations,
            initial_loss,
            loss_per_iter,
            orthogonality_error,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(n: usize, c: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DMatrix::from_fn(n, c, |_, _| StandardNormal.sample(&mut rng))
    }

    #[test]
    fn sign_of_zero_is_positive() {
        let m = DMatrix::from_row_slice(1, 3, &[0.0, -0.0, -1e-300]);
        assert_eq!(sign_codes(&m).as_slice(), &[1.0, 1.0, -1.0]);
    }

    #[test]
    fn binary_data_is_a_fixed_point() {
        let rows = [[1.0, -1.0, 1.0], [-1.0, -1.0, 1.0], [1.0, 1.0, -1.0], [-1.0, 1.0, 1.0]];
        let v = DMatrix::from_row_iterator(4, 3, rows.iter().flatten().copied());
        let (r, report) = train_itq_from(&v, DMatrix::identity(3, 3), 5).unwrap();
        assert_eq!(report.initial_loss, 0.0);
        assert!(report.loss_per_iter[0] < 1e-20);
        assert!((r - DMatrix::<f64>::identity(3, 3)).amax() < 1e-12);
        assert!(report.orthogonality_error.iter().all(|&e| e <= 1e-6));
    }

    #[test]
    fn loss_is_monotone_on_gaussian_data() {
        let (n, c) = (1000, 4);
        let v = gaussian(n, c, 1);
        let (_, report) = train_itq(&v, 50, 7).unwrap();
        let tol = 1e-9 * (n * c) as f64;
        assert!(report.loss_per_iter[0] <= report.initial_loss + tol);
        for w in report.loss_per_iter.windows(2) {
            assert!(w[1] <= w[0] + tol, "{} then {}", w[0], w[1]);
        }
        assert!(report.final_loss() <= report.initial_loss);
    }

    #[test]
    fn procrustes_never_increases_loss_for_fixed_codes() {
        for seed in 0..20 {
            let v = gaussian(200, 5, seed);
            let r = initial_rotation(5, seed + 100);
            let b = sign_codes(&(&v * &r));
            let before = quantization_loss_with(&b, &v, &r);
            let after = quantization_loss_with(&b, &v, &procrustes_rotation(&b, &v).unwrap());
            assert!(after <= before + 1e-9, "seed {seed}: {before} -> {after}");
        }
    }

    #[test]
    fn seeded_start_is_orthogonal_and_reproducible() {
        let a = initial_rotation(8, 42);
        let b = initial_rotation(8, 42);
        assert_eq!(a, b);
        assert!((a.transpose() * &a - DMatrix::<f64>::identity(8, 8)).amax() < 1e-12);
        assert_ne!(a, initial_rotation(8, 43));
    }

    #[test]
    fn all_zero_input_is_degenerate() {
        let v = DMatrix::zeros(10, 3);
        assert!(matches!(train_itq(&v, 5, 0), Err(Error::Degenerate(_))));
        assert!(train_itq(&gaussian(5, 2, 0), 0, 0).is_err());
    }
}
