use crate::rng;
use crate::tensor::{Dims, Tensor3};

pub fn random_tensor(dims: Dims, seed: u64) -> Tensor3 {
    rng::gaussian_tensor(&mut rng::seeded(seed), dims)
}

pub fn rel_err(x: &Tensor3, truth: &Tensor3) -> f64 {
    x.distance(truth).unwrap() / truth.frobenius_norm().max(f64::MIN_POSITIVE)
}
