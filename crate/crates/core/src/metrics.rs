//! Recovery metrics.

use crate::error::{Error, Result};
use crate::tensor::Tensor3;

/// `||X - X̃||_F / ||X||_F` with `truth` as `X`.
pub fn relative_error(estimate: &Tensor3, truth: &Tensor3) -> Result<f64> {
    let norm = truth.frobenius_norm();
    if norm == 0.0 {
        return Err(Error::ZeroTruth);
    }
    Ok(estimate.distance(truth)? / norm)
}

/// Peak signal-to-noise ratio in dB,
/// `10 log10(n1 n2 n3 X_max^2 / ||X̃ - X||_F^2)`, where `X_max` is the
/// largest absolute entry of the ground truth. Returns `f64::INFINITY` when
/// the estimate equals the truth.
pub fn psnr(estimate: &Tensor3, truth: &Tensor3) -> Result<f64> {
    let err2 = estimate.distance(truth)?.powi(2);
    if err2 == 0.0 {
        return Ok(f64::INFINITY);
    }
    let peak = truth.max_abs();
    Ok(10.0 * (truth.len() as f64 * peak * peak / err2).log10())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::random_tensor;

    #[test]
    fn relative_error_cases() {
        let t = random_tensor((3, 4, 2), 1);
        assert_eq!(relative_error(&t, &t).unwrap(), 0.0);
        assert!((relative_error(&Tensor3::zeros(t.dims()), &t).unwrap() - 1.0).abs() < 1e-15);
        assert!((relative_error(&t.scale(2.0), &t).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(
            relative_error(&t, &Tensor3::zeros(t.dims())),
            Err(Error::ZeroTruth)
        ));
    }

    #[test]
    fn psnr_cases() {
        let ones = Tensor3::from_fn((2, 2, 2), |_, _, _| 1.0);
        let mut est = ones.clone();
        est.set(1, 0, 1, 2.0);
        let want = 10.0 * 8f64.log10();
        assert!((psnr(&est, &ones).unwrap() - want).abs() < 1e-12);
        assert!((want - 9.0309).abs() < 1e-4);
        assert_eq!(psnr(&ones, &ones).unwrap(), f64::INFINITY);

        let t = random_tensor((3, 3, 3), 2);
        let e = random_tensor((3, 3, 3), 3);
        let p = psnr(&e, &t).unwrap();
        let q = psnr(&e.scale(7.5), &t.scale(7.5)).unwrap();
        assert!((p - q).abs() < 1e-10);
    }

    #[test]
    fn psnr_decreases_as_error_grows() {
        let t = random_tensor((4, 4, 2), 4);
        let d = random_tensor((4, 4, 2), 5);
        let mut last = f64::INFINITY;
        for step in 1..10 {
            let est = t.axpby(1.0, &d, 0.1 * step as f64).unwrap();
            let p = psnr(&est, &t).unwrap();
            assert!(p < last);
            last = p;
        }
    }
}
