use super::{PrivacyError, Result};
use crate::linalg::{norm2, Matrix};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Scale each row `g` to `g * min(1, c / |g|)` in place.
pub fn clip_rows(grads: &mut Matrix, c: f64) -> Result<()> {
    if !(c > 0.0) {
        return Err(PrivacyError::ClippingNorm(c));
    }
    for r in 0..grads.rows() {
        let row = grads.row_mut(r);
        let norm = norm2(row);
        if norm > c {
            let scale = c / norm;
            row.iter_mut().for_each(|v| *v *= scale);
        }
    }
    Ok(())
}

/// Per-record clipping; one gradient vector per row.
pub fn clip_per_sample(grads: &Matrix, c: f64) -> Result<Matrix> {
    let mut out = grads.clone();
    clip_rows(&mut out, c)?;
    Ok(out)
}

/// `(sum of rows + N(0, sigma^2 c^2 I)) / batch_size`.
///
/// No random numbers are drawn when `sigma == 0`.
pub fn noisy_aggregate<R: Rng + ?Sized>(
    clipped: &Matrix,
    c: f64,
    sigma: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if clipped.rows() == 0 {
        return Err(PrivacyError::EmptyBatch);
    }
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(PrivacyError::NoiseMultiplier(sigma));
    }
    let mut sum = vec![0.0; clipped.cols()];
    for row in clipped.iter_rows() {
        for (s, g) in sum.iter_mut().zip(row) {
            *s += g;
        }
    }
    if sigma > 0.0 {
        if !(c > 0.0) || !c.is_finite() {
            return Err(PrivacyError::ClippingNorm(c));
        }
        let std = sigma * c;
        for s in &mut sum {
            let z: f64 = StandardNormal.sample(rng);
            *s += std * z;
        }
    }
    let b = clipped.rows() as f64;
    sum.iter_mut().for_each(|s| *s /= b);
    Ok(sum)
}
