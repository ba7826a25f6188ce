//! t-product algebra: products, transposes, the t-SVD, the tensor
//! pseudo-inverse, and multi/tubal rank. Every operation goes through the
//! mode-3 Fourier domain, where it reduces to independent matrix operations
//! on frontal slices.

use crate::error::{Error, Result};
use crate::linalg::{self, ThinSvd};
use crate::spectral::{
    conj_partner, fft_mode3, half_len, ifft_mode3, CMatrix, SliceMode, SpectralTensor3,
};
use crate::tensor::Tensor3;

/// Relative singular-value cutoff used for numerical ranks.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// Relative cutoff (against the largest singular value of the whole
/// spectrum) below which [`t_pinv`] treats singular values as zero.
pub const PINV_RCOND: f64 = 1e-10;

/// t-SVD factors `A = U * S * V^T`, with `m = min(n1, n2)`.
#[derive(Clone, Debug)]
pub struct TSvd {
    /// `n1 x m x n3`, orthogonal.
    pub u: Tensor3,
    /// `m x m x n3`, f-diagonal.
    pub s: Tensor3,
    /// `n2 x m x n3`, orthogonal.
    pub v: Tensor3,
    spectrum: Vec<Vec<f64>>,
}

impl TSvd {
    /// Diagonal of each Fourier-domain slice of `S`: nonnegative and
    /// nonincreasing within every slice.
    pub fn spectrum(&self) -> &[Vec<f64>] {
        &self.spectrum
    }

    pub fn reconstruct(&self) -> Result<Tensor3> {
        t_product(&t_product(&self.u, &self.s)?, &t_transpose(&self.v))
    }
}

/// Per-slice multi rank; tubal rank is its maximum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiRank(pub Vec<usize>);

impl MultiRank {
    pub fn tubal(&self) -> usize {
        self.0.iter().copied().max().unwrap_or(0)
    }
}

pub fn t_product(a: &Tensor3, b: &Tensor3) -> Result<Tensor3> {
    t_product_with(a, b, SliceMode::Half)
}

pub fn t_product_with(a: &Tensor3, b: &Tensor3, mode: SliceMode) -> Result<Tensor3> {
    let (_, n2, n3) = a.dims();
    let (m2, _, m3) = b.dims();
    if n2 != m2 || n3 != m3 {
        return Err(Error::dims(format!(
            "t-product of {:?} and {:?}",
            a.dims(),
            b.dims()
        )));
    }
    let bh = fft_mode3(b);
    let prod = fft_mode3(a).map_slices(mode, |k, ak| Ok(ak * bh.slice(k)))?;
    ifft_mode3(&prod)
}

/// Product of spectra, slice by slice.
pub fn spectral_product(a: &SpectralTensor3, b: &SpectralTensor3) -> Result<SpectralTensor3> {
    let (_, n2, n3) = a.dims();
    let (m2, _, m3) = b.dims();
    if n2 != m2 || n3 != m3 {
        return Err(Error::dims(format!(
            "spectral product of {:?} and {:?}",
            a.dims(),
            b.dims()
        )));
    }
    a.map_slices(SliceMode::Half, |k, ak| Ok(ak * b.slice(k)))
}

/// Tensor transpose: slice 0 transposed, slices `1..n3` transposed and taken
/// in reverse order. Equivalent to the conjugate transpose of every Fourier
/// slice.
pub fn t_transpose(a: &Tensor3) -> Tensor3 {
    let (n1, n2, n3) = a.dims();
    Tensor3::from_fn((n2, n1, n3), |i, j, k| a.get(j, i, (n3 - k) % n3))
}

pub fn t_svd(a: &Tensor3) -> Result<TSvd> {
    let (n1, n2, n3) = a.dims();
    let m = n1.min(n2);
    let ah = fft_mode3(a);
    let half = half_len(n3);
    let mut us = Vec::with_capacity(n3);
    let mut ss = Vec::with_capacity(n3);
    let mut vs = Vec::with_capacity(n3);
    let mut spectrum = Vec::with_capacity(n3);
    for k in 0..half {
        let svd = if conj_partner(k, n3) == k {
            linalg::thin_svd_real(ah.slice(k))
        } else {
            linalg::thin_svd(ah.slice(k))
        };
        let ThinSvd { u, s, v } = svd.map_err(|e| Error::Slice {
            slice: k,
            source: Box::new(e),
        })?;
        ss.push(CMatrix::from_fn(m, m, |i, j| {
            if i == j {
                s[i].into()
            } else {
                0.0.into()
            }
        }));
        us.push(u);
        vs.push(v);
        spectrum.push(s);
    }
    for k in half..n3 {
        spectrum.push(spectrum[n3 - k].clone());
    }
    Ok(TSvd {
        u: ifft_mode3(&SpectralTensor3::from_half(n3, us)?)?,
        s: ifft_mode3(&SpectralTensor3::from_half(n3, ss)?)?,
        v: ifft_mode3(&SpectralTensor3::from_half(n3, vs)?)?,
        spectrum,
    })
}

/// Singular values of every Fourier-domain frontal slice.
pub fn fourier_singular_values(a: &Tensor3) -> Result<Vec<Vec<f64>>> {
    fourier_singular_values_with(a, SliceMode::Half)
}

pub fn fourier_singular_values_with(a: &Tensor3, mode: SliceMode) -> Result<Vec<Vec<f64>>> {
    let ah = fft_mode3(a);
    let n3 = a.dims().2;
    let count = match mode {
        SliceMode::Half => half_len(n3),
        SliceMode::Full => n3,
    };
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(n3);
    for k in 0..count {
        out.push(linalg::singular_values(ah.slice(k))?);
    }
    for k in count..n3 {
        out.push(out[n3 - k].clone());
    }
    Ok(out)
}

/// Tensor Moore-Penrose pseudo-inverse with the default cutoff.
pub fn t_pinv(a: &Tensor3) -> Result<Tensor3> {
    t_pinv_with(a, PINV_RCOND)
}

pub fn t_pinv_with(a: &Tensor3, rcond: f64) -> Result<Tensor3> {
    let ah = fft_mode3(a);
    let n3 = a.dims().2;
    let mut svds = Vec::with_capacity(half_len(n3));
    for k in 0..half_len(n3) {
        svds.push(linalg::thin_svd(ah.slice(k))?);
    }
    let smax = svds
        .iter()
        .flat_map(|s| s.s.first())
        .fold(0.0_f64, |m, &x| m.max(x));
    let cutoff = rcond * smax;
    let slices = svds
        .iter()
        .map(|s| linalg::pinv_from_svd(s, cutoff, usize::MAX))
        .collect();
    ifft_mode3(&SpectralTensor3::from_half(n3, slices)?)
}

/// Multi rank and tubal rank. A singular value counts when it exceeds
/// `tol` times the largest singular value over all slices.
pub fn tubal_rank(a: &Tensor3, tol: f64) -> Result<(MultiRank, usize)> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::invalid(format!(
            "rank tolerance must be positive, got {tol}"
        )));
    }
    let sv = fourier_singular_values(a)?;
    let smax = sv
        .iter()
        .flat_map(|s| s.first())
        .fold(0.0_f64, |m, &x| m.max(x));
    let ranks = MultiRank(
        sv.iter()
            .map(|s| {
                if smax == 0.0 {
                    0
                } else {
                    s.iter().filter(|&&x| x > tol * smax).count()
                }
            })
            .collect(),
    );
    let r = ranks.tubal();
    Ok((ranks, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{random_tensor, rel_err};

    fn conv_oracle(a: &Tensor3, b: &Tensor3) -> Tensor3 {
        let (n1, n2, n3) = a.dims();
        let l = b.dims().1;
        Tensor3::from_fn((n1, l, n3), |i, j, t| {
            let mut acc = 0.0;
            for p in 0..n2 {
                for s in 0..n3 {
                    acc += a.get(i, p, s) * b.get(p, j, (t + n3 - s) % n3);
                }
            }
            acc
        })
    }

    #[test]
    fn single_slice_product_is_matrix_product() {
        let a = random_tensor((3, 4, 1), 1);
        let b = random_tensor((4, 2, 1), 2);
        let c = t_product(&a, &b).unwrap();
        for i in 0..3 {
            for j in 0..2 {
                let want: f64 = (0..4).map(|p| a.get(i, p, 0) * b.get(p, j, 0)).sum();
                assert!((c.get(i, j, 0) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn identity_is_neutral() {
        let a = random_tensor((3, 4, 5), 3);
        let c = t_product(&a, &Tensor3::identity(4, 5)).unwrap();
        assert!(rel_err(&c, &a) < 1e-12);
        assert_eq!(
            t_transpose(&Tensor3::identity(4, 5)),
            Tensor3::identity(4, 5)
        );
    }

    #[test]
    fn product_matches_convolution_oracle() {
        let a = random_tensor((3, 4, 5), 4);
        let b = random_tensor((4, 2, 5), 5);
        let want = conv_oracle(&a, &b);
        assert!(rel_err(&t_product(&a, &b).unwrap(), &want) < 1e-10);
        assert!(rel_err(&t_product_with(&a, &b, SliceMode::Full).unwrap(), &want) < 1e-10);
    }

    #[test]
    fn product_rejects_bad_shapes() {
        let a = random_tensor((3, 4, 5), 4);
        assert!(t_product(&a, &random_tensor((3, 2, 5), 1)).is_err());
        assert!(t_product(&a, &random_tensor((4, 2, 4), 1)).is_err());
    }

    #[test]
    fn transpose_identities() {
        let a = random_tensor((3, 4, 5), 6);
        let b = random_tensor((4, 2, 5), 7);
        assert_eq!(t_transpose(&t_transpose(&a)), a);
        let lhs = t_transpose(&t_product(&a, &b).unwrap());
        let rhs = t_product(&t_transpose(&b), &t_transpose(&a)).unwrap();
        assert!(rel_err(&lhs, &rhs) < 1e-10);
        let m = random_tensor((2, 3, 1), 8);
        let mt = t_transpose(&m);
        assert_eq!(mt.get(2, 1, 0), m.get(1, 2, 0));
    }

    #[test]
    fn t_svd_of_zero_tensor() {
        let z = Tensor3::zeros((3, 4, 3));
        let svd = t_svd(&z).unwrap();
        assert_eq!(svd.s.max_abs(), 0.0);
        assert_eq!(svd.reconstruct().unwrap().max_abs(), 0.0);
    }

    #[test]
    fn t_svd_recovers_sorted_f_diagonal() {
        // spectrum diag(3,1) on every Fourier slice: a constant tube in the
        // first slice's diagonal transforms to that.
        let mut d = Tensor3::zeros((2, 2, 4));
        d.set(0, 0, 0, 3.0);
        d.set(1, 1, 0, 1.0);
        let svd = t_svd(&d).unwrap();
        for s in svd.spectrum() {
            assert!((s[0] - 3.0).abs() < 1e-12 && (s[1] - 1.0).abs() < 1e-12);
        }
        assert!(rel_err(&svd.s, &d) < 1e-12);
    }

    #[test]
    fn t_svd_reconstruction_and_orthogonality() {
        let a = random_tensor((6, 4, 3), 9);
        let svd = t_svd(&a).unwrap();
        assert!(rel_err(&svd.reconstruct().unwrap(), &a) < 1e-10);
        let utu = t_product(&t_transpose(&svd.u), &svd.u).unwrap();
        assert!(utu.distance(&Tensor3::identity(4, 3)).unwrap() < 1e-10);
        let vtv = t_product(&t_transpose(&svd.v), &svd.v).unwrap();
        assert!(vtv.distance(&Tensor3::identity(4, 3)).unwrap() < 1e-10);
        let full = fourier_singular_values_with(&a, SliceMode::Full).unwrap();
        for (x, y) in full.iter().zip(svd.spectrum()) {
            for (p, q) in x.iter().zip(y) {
                assert!((p - q).abs() < 1e-12 * (1.0 + q));
            }
        }
    }

    #[test]
    fn pinv_identities() {
        assert!(
            rel_err(
                &t_pinv(&Tensor3::identity(3, 4)).unwrap(),
                &Tensor3::identity(3, 4)
            ) < 1e-12
        );

        let m = Tensor3::from_vec((2, 2, 1), vec![2.0, 1.0, 1.0, 3.0]).unwrap();
        let p = t_pinv(&m).unwrap();
        // inverse of [[2,1],[1,3]] is [[3,-1],[-1,2]]/5
        let want = Tensor3::from_vec((2, 2, 1), vec![0.6, -0.2, -0.2, 0.4]).unwrap();
        assert!(rel_err(&p, &want) < 1e-12);

        let a = t_product(&random_tensor((5, 2, 4), 10), &random_tensor((2, 3, 4), 11)).unwrap();
        let ap = t_pinv(&a).unwrap();
        let aapa = t_product(&t_product(&a, &ap).unwrap(), &a).unwrap();
        let apaap = t_product(&t_product(&ap, &a).unwrap(), &ap).unwrap();
        assert!(rel_err(&aapa, &a) < 1e-8);
        assert!(rel_err(&apaap, &ap) < 1e-8);
    }

    #[test]
    fn ranks() {
        let (mr, r) = tubal_rank(&Tensor3::zeros((3, 3, 2)), DEFAULT_RANK_TOL).unwrap();
        assert_eq!((mr.0, r), (vec![0, 0], 0));
        assert_eq!(
            tubal_rank(&Tensor3::identity(4, 3), DEFAULT_RANK_TOL)
                .unwrap()
                .1,
            4
        );
        let x = t_product(&random_tensor((7, 2, 5), 12), &random_tensor((2, 6, 5), 13)).unwrap();
        let (mr, r) = tubal_rank(&x, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(r, 2);
        assert!(mr.0.iter().all(|&k| k == 2));
        assert!(tubal_rank(&x, 0.0).is_err());
    }
}
