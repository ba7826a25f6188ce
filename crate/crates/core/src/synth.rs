//! Synthetic low-tubal-rank tensors.

use crate::error::{Error, Result};
use crate::rng;
use crate::talgebra::t_product;
use crate::tensor::Tensor3;

/// `A * B` with `A` (`n1 x r x n3`) and `B` (`r x n2 x n3`) filled with
/// independent standard normals. Tubal rank is `r` with probability one.
pub fn synth_low_tubal_rank(
    n1: usize,
    n2: usize,
    n3: usize,
    r: usize,
    seed: u64,
) -> Result<Tensor3> {
    if r == 0 || r > n1.min(n2) {
        return Err(Error::invalid(format!(
            "tubal rank {r} must lie in 1..={}",
            n1.min(n2)
        )));
    }
    let mut g = rng::seeded(seed);
    let a = rng::gaussian_tensor(&mut g, (n1, r, n3));
    let b = rng::gaussian_tensor(&mut g, (r, n2, n3));
    t_product(&a, &b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::talgebra::{tubal_rank, DEFAULT_RANK_TOL};

    #[test]
    fn measured_rank_matches_target() {
        let x = synth_low_tubal_rank(32, 32, 8, 3, 1).unwrap();
        assert_eq!(tubal_rank(&x, DEFAULT_RANK_TOL).unwrap().1, 3);
        let full = synth_low_tubal_rank(6, 4, 3, 4, 2).unwrap();
        assert_eq!(tubal_rank(&full, DEFAULT_RANK_TOL).unwrap().1, 4);
    }

    #[test]
    fn deterministic_and_validated() {
        assert_eq!(
            synth_low_tubal_rank(5, 6, 3, 2, 9).unwrap(),
            synth_low_tubal_rank(5, 6, 3, 2, 9).unwrap()
        );
        assert_ne!(
            synth_low_tubal_rank(5, 6, 3, 2, 9).unwrap(),
            synth_low_tubal_rank(5, 6, 3, 2, 10).unwrap()
        );
        assert!(synth_low_tubal_rank(5, 6, 3, 6, 9).is_err());
        assert!(synth_low_tubal_rank(5, 6, 3, 0, 9).is_err());
    }
}
