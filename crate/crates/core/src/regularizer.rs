//! Spectral regularizers on the Fourier-domain singular values and their
//! proximal maps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::parallel::par_map;
use crate::spectral::{conj_partner, fft_mode3, half_len, ifft_mode3, SpectralTensor3};
use crate::talgebra::fourier_singular_values;
use crate::tensor::Tensor3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regularizer {
    /// Tensor nuclear norm: sum of all Fourier-slice singular values.
    Tnn,
    /// Per-slice `||s||_1 - ||s||_2`, summed over slices.
    Tl12,
}

impl Regularizer {
    pub fn name(self) -> &'static str {
        match self {
            Regularizer::Tnn => "tnn",
            Regularizer::Tl12 => "tl12",
        }
    }

    /// Value of the penalty on a Fourier spectrum.
    pub fn eval_spectrum(self, spectrum: &[Vec<f64>]) -> f64 {
        spectrum
            .iter()
            .map(|s| {
                let l1: f64 = s.iter().sum();
                match self {
                    Regularizer::Tnn => l1,
                    Regularizer::Tl12 => (l1 - l2_norm(s)).max(0.0),
                }
            })
            .sum()
    }

    /// Proximal map of `mu * penalty` on one slice's singular values.
    pub fn shrink(self, s: &[f64], mu: f64) -> Vec<f64> {
        match self {
            Regularizer::Tnn => s.iter().map(|&x| (x - mu).max(0.0)).collect(),
            Regularizer::Tl12 => prox_l1_minus_l2(s, mu),
        }
    }
}

impl std::fmt::Display for Regularizer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Regularizer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tnn" => Ok(Regularizer::Tnn),
            "tl12" => Ok(Regularizer::Tl12),
            other => Err(Error::invalid(format!("unknown regularizer `{other}`"))),
        }
    }
}

fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn tnn(x: &Tensor3) -> Result<f64> {
    Ok(Regularizer::Tnn.eval_spectrum(&fourier_singular_values(x)?))
}

pub fn tl12(x: &Tensor3) -> Result<f64> {
    Ok(Regularizer::Tl12.eval_spectrum(&fourier_singular_values(x)?))
}

/// `mu (||x||_1 - ||x||_2) + 0.5 ||x - v||_2^2`.
pub fn l1_minus_l2_objective(x: &[f64], v: &[f64], mu: f64) -> f64 {
    let l1: f64 = x.iter().map(|a| a.abs()).sum();
    let fit: f64 = x.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum();
    mu * (l1 - l2_norm(x)) + 0.5 * fit
}

/// Proximal operator of `mu (||x||_1 - ||x||_2)` at a nonnegative vector.
///
/// Evaluates the closed-form candidates and returns the one with the
/// smallest objective:
/// - `max(v) > mu`: `w (||w|| + mu) / ||w||` with `w = max(v - mu, 0)`;
/// - `0 < max(v) <= mu`: the 1-sparse vector keeping `max(v)` at its first
///   position;
/// - the zero vector.
pub fn prox_l1_minus_l2(v: &[f64], mu: f64) -> Vec<f64> {
    let zero = vec![0.0; v.len()];
    let Some((imax, vmax)) =
        v.iter()
            .copied()
            .enumerate()
            .fold(None, |best: Option<(usize, f64)>, (i, x)| match best {
                Some((_, b)) if b >= x => best,
                _ => Some((i, x)),
            })
    else {
        return zero;
    };
    if vmax <= 0.0 {
        return zero;
    }
    let candidate = if vmax > mu {
        let w: Vec<f64> = v.iter().map(|&x| (x - mu).max(0.0)).collect();
        let nw = l2_norm(&w);
        let gain = (nw + mu) / nw;
        w.into_iter().map(|x| x * gain).collect()
    } else {
        let mut e = zero.clone();
        e[imax] = vmax;
        e
    };
    if l1_minus_l2_objective(&candidate, v, mu) <= l1_minus_l2_objective(&zero, v, mu) {
        candidate
    } else {
        zero
    }
}

/// Applies the regularizer's proximal map to every Fourier slice's singular
/// values and reassembles `U * S_mu * V^T`. For [`Regularizer::Tnn`] this is
/// tensor singular value thresholding.
pub fn spectral_shrink(x: &Tensor3, mu: f64, reg: Regularizer) -> Result<Tensor3> {
    if mu.is_nan() || mu <= 0.0 {
        return Err(Error::invalid(format!(
            "shrinkage threshold must be positive, got {mu}"
        )));
    }
    let n3 = x.dims().2;
    let xh = fft_mode3(x);
    let half = par_map(half_len(n3), |k| {
        let slice = xh.slice(k);
        let svd = if conj_partner(k, n3) == k {
            linalg::thin_svd_real(slice)
        } else {
            linalg::thin_svd(slice)
        }
        .map_err(|e| Error::Slice {
            slice: k,
            source: Box::new(e),
        })?;
        Ok(svd.rebuild(&reg.shrink(&svd.s, mu)))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    ifft_mode3(&SpectralTensor3::from_half(n3, half)?)
}
