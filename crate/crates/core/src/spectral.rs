//! Mode-3 discrete Fourier transform between [`Tensor3`] and its complex
//! frontal-slice spectrum.
//!
//! The forward transform is unnormalized and the inverse carries the `1/n3`
//! factor, matching `fft(A, [], 3)` / `ifft(Â, [], 3)`.
//!
//! Spectra of real tensors are conjugate symmetric: slice `k` is the complex
//! conjugate of slice `(n3 - k) mod n3`. Per-slice maps exploit this by
//! computing slices `0..=n3/2` and mirroring the rest ([`SliceMode::Half`]);
//! [`SliceMode::Full`] evaluates every slice and exists mainly so the two
//! paths can be compared.

use faer::Mat;
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::parallel::par_map;
use crate::tensor::{Dims, Tensor3};

pub type CMatrix = Mat<Complex64>;

/// Largest relative conjugate-symmetry defect [`ifft_mode3`] accepts.
pub const SYMMETRY_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SliceMode {
    #[default]
    Half,
    Full,
}

#[derive(Clone, Debug)]
pub struct SpectralTensor3 {
    dims: Dims,
    slices: Vec<CMatrix>,
}

/// Number of independent slices of a conjugate-symmetric spectrum.
pub fn half_len(n3: usize) -> usize {
    n3 / 2 + 1
}

/// Index of the slice whose conjugate equals slice `k`.
pub fn conj_partner(k: usize, n3: usize) -> usize {
    (n3 - k) % n3
}

impl SpectralTensor3 {
    pub fn new(dims: Dims, slices: Vec<CMatrix>) -> Result<Self> {
        if slices.len() != dims.2 {
            return Err(Error::dims(format!(
                "{} slices for n3 = {}",
                slices.len(),
                dims.2
            )));
        }
        for (k, s) in slices.iter().enumerate() {
            if s.nrows() != dims.0 || s.ncols() != dims.1 {
                return Err(Error::dims(format!(
                    "slice {k} is {}x{}, expected {}x{}",
                    s.nrows(),
                    s.ncols(),
                    dims.0,
                    dims.1
                )));
            }
        }
        Ok(SpectralTensor3 { dims, slices })
    }

    pub fn zeros(dims: Dims) -> Self {
        SpectralTensor3 {
            dims,
            slices: (0..dims.2)
                .map(|_| CMatrix::zeros(dims.0, dims.1))
                .collect(),
        }
    }

    /// Completes a spectrum from its first [`half_len`] slices by conjugation.
    pub fn from_half(n3: usize, half: Vec<CMatrix>) -> Result<Self> {
        if half.len() != half_len(n3) {
            return Err(Error::dims(format!(
                "{} half-spectrum slices for n3 = {n3}",
                half.len()
            )));
        }
        let (n1, n2) = (half[0].nrows(), half[0].ncols());
        let mut slices = half;
        for k in slices.len()..n3 {
            let mirrored = conjugate(&slices[conj_partner(k, n3)]);
            slices.push(mirrored);
        }
        SpectralTensor3::new((n1, n2, n3), slices)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn slice(&self, k: usize) -> &CMatrix {
        &self.slices[k]
    }

    pub fn slice_mut(&mut self, k: usize) -> &mut CMatrix {
        &mut self.slices[k]
    }

    pub fn slices(&self) -> &[CMatrix] {
        &self.slices
    }

    pub fn into_slices(self) -> Vec<CMatrix> {
        self.slices
    }

    /// Applies `f` to every frontal slice. The output slices may have any
    /// (common) shape; with [`SliceMode::Half`] the upper slices are mirrored,
    /// which is only valid when `f` commutes with conjugation.
    pub fn map_slices<F>(&self, mode: SliceMode, f: F) -> Result<SpectralTensor3>
    where
        F: Fn(usize, &CMatrix) -> Result<CMatrix> + Sync,
    {
        let n3 = self.dims.2;
        let count = match mode {
            SliceMode::Half => half_len(n3),
            SliceMode::Full => n3,
        };
        let out = par_map(count, |k| {
            f(k, &self.slices[k]).map_err(|e| Error::Slice {
                slice: k,
                source: Box::new(e),
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        match mode {
            SliceMode::Half => SpectralTensor3::from_half(n3, out),
            SliceMode::Full => {
                let (r, c) = (out[0].nrows(), out[0].ncols());
                SpectralTensor3::new((r, c, n3), out)
            }
        }
    }

    /// Largest `|S_k - conj(S_{n3-k})|` over all entries and slices, with the
    /// slice where it occurs.
    pub fn symmetry_defect(&self) -> (usize, f64) {
        let n3 = self.dims.2;
        let mut worst = (0, 0.0_f64);
        for k in 0..n3 {
            let p = conj_partner(k, n3);
            if p < k {
                continue;
            }
            let (a, b) = (&self.slices[k], &self.slices[p]);
            for j in 0..self.dims.1 {
                for i in 0..self.dims.0 {
                    let d = (a[(i, j)] - b[(i, j)].conj()).norm();
                    if d > worst.1 {
                        worst = (k, d);
                    }
                }
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.slices
            .iter()
            .flat_map(|s| {
                (0..s.ncols()).flat_map(move |j| (0..s.nrows()).map(move |i| s[(i, j)].norm()))
            })
            .fold(0.0, f64::max)
    }
}

pub(crate) fn conjugate(m: &CMatrix) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].conj())
}

/// Forward mode-3 DFT of every tube.
pub fn fft_mode3(a: &Tensor3) -> SpectralTensor3 {
    let (n1, n2, n3) = a.dims();
    let plane = n1 * n2;
    // tubes laid out contiguously so one planner call handles them all
    let mut buf: Vec<Complex64> = vec![Complex64::default(); plane * n3];
    let data = a.as_slice();
    for p in 0..plane {
        for k in 0..n3 {
            buf[p * n3 + k] = Complex64::new(data[p + plane * k], 0.0);
        }
    }
    if n3 > 1 {
        let fft = FftPlanner::new().plan_fft_forward(n3);
        fft.process(&mut buf);
    }
    let slices = (0..n3)
        .map(|k| CMatrix::from_fn(n1, n2, |i, j| buf[(i + n1 * j) * n3 + k]))
        .collect();
    SpectralTensor3 {
        dims: (n1, n2, n3),
        slices,
    }
}

/// Inverse mode-3 DFT. Rejects spectra whose conjugate-symmetry defect
/// exceeds [`SYMMETRY_TOL`] relative to the largest entry; the remaining
/// imaginary residue is dropped. Non-finite spectra are a
/// [`Error::NumericalFailure`].
pub fn ifft_mode3(s: &SpectralTensor3) -> Result<Tensor3> {
    if let Some(k) = s.slices.iter().position(|m| !m.as_ref().is_all_finite()) {
        return Err(Error::NumericalFailure(format!(
            "non-finite entries in spectral slice {k}"
        )));
    }
    let scale = s.max_abs();
    let (slice, defect) = s.symmetry_defect();
    if defect > SYMMETRY_TOL * scale {
        return Err(Error::SymmetryViolation {
            slice,
            deviation: if scale > 0.0 { defect / scale } else { defect },
        });
    }
    Ok(ifft_unchecked(s))
}

fn ifft_unchecked(s: &SpectralTensor3) -> Tensor3 {
    let (n1, n2, n3) = s.dims();
    let plane = n1 * n2;
    let mut buf: Vec<Complex64> = vec![Complex64::default(); plane * n3];
    for (k, m) in s.slices.iter().enumerate() {
        for j in 0..n2 {
            for i in 0..n1 {
                buf[(i + n1 * j) * n3 + k] = m[(i, j)];
            }
        }
    }
    if n3 > 1 {
        let ifft = FftPlanner::new().plan_fft_inverse(n3);
        ifft.process(&mut buf);
    }
    let inv = 1.0 / n3 as f64;
    let mut data = vec![0.0; plane * n3];
    for p in 0..plane {
        for k in 0..n3 {
            data[p + plane * k] = buf[p * n3 + k].re * inv;
        }
    }
    Tensor3::from_vec((n1, n2, n3), data).expect("inverse transform of a finite spectrum")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::random_tensor;
    use std::f64::consts::PI;

    fn naive_dft(tube: &[f64]) -> Vec<Complex64> {
        let n = tube.len();
        (0..n)
            .map(|k| {
                tube.iter()
                    .enumerate()
                    .map(|(t, &x)| {
                        x * Complex64::from_polar(1.0, -2.0 * PI * (k * t) as f64 / n as f64)
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn length_one_transform_is_identity() {
        let a = random_tensor((3, 4, 1), 1);
        let s = fft_mode3(&a);
        for j in 0..4 {
            for i in 0..3 {
                assert_eq!(s.slice(0)[(i, j)], Complex64::new(a.get(i, j, 0), 0.0));
            }
        }
    }

    #[test]
    fn zero_tensor_round_trip() {
        let z = Tensor3::zeros((3, 3, 4));
        let s = fft_mode3(&z);
        assert_eq!(s.max_abs(), 0.0);
        assert_eq!(ifft_mode3(&SpectralTensor3::zeros((3, 3, 4))).unwrap(), z);
    }

    #[test]
    fn matches_direct_dft_sum() {
        let a = random_tensor((2, 2, 3), 7);
        let s = fft_mode3(&a);
        for i in 0..2 {
            for j in 0..2 {
                let want = naive_dft(&a.tube(i, j));
                for (k, w) in want.iter().enumerate() {
                    assert!((s.slice(k)[(i, j)] - w).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let a = random_tensor((4, 5, 6), 3);
        let back = ifft_mode3(&fft_mode3(&a)).unwrap();
        let err = a
            .as_slice()
            .iter()
            .zip(back.as_slice())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn spectrum_of_real_tensor_is_conjugate_symmetric() {
        for n3 in 1..8 {
            let s = fft_mode3(&random_tensor((3, 2, n3), n3 as u64));
            assert!(s.symmetry_defect().1 < 1e-12);
        }
    }

    #[test]
    fn broken_symmetry_is_rejected() {
        let mut s = fft_mode3(&random_tensor((3, 3, 5), 11));
        s.slice_mut(2)[(1, 1)] += Complex64::new(1e-3, 0.0);
        assert!(matches!(
            ifft_mode3(&s),
            Err(Error::SymmetryViolation { .. })
        ));
    }

    #[test]
    fn non_finite_spectrum_is_a_numerical_failure() {
        let mut s = fft_mode3(&random_tensor((2, 2, 3), 4));
        s.slice_mut(0)[(0, 1)] = Complex64::new(f64::NAN, 0.0);
        assert!(matches!(ifft_mode3(&s), Err(Error::NumericalFailure(_))));
    }

    #[test]
    fn half_and_full_maps_agree() {
        for n3 in [1, 2, 5, 6] {
            let s = fft_mode3(&random_tensor((3, 4, n3), 5));
            let f = |_: usize, m: &CMatrix| -> Result<CMatrix> { Ok(m * m.adjoint()) };
            let half = s.map_slices(SliceMode::Half, f).unwrap();
            let full = s.map_slices(SliceMode::Full, f).unwrap();
            for k in 0..n3 {
                let d = (half.slice(k) - full.slice(k)).norm_l2();
                assert!(d < 1e-12 * (1.0 + full.slice(k).norm_l2()));
            }
        }
    }
}
