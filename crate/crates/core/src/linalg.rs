//! Complex dense matrix helpers shared by the t-algebra and the completion
//! solvers. Backed by faer.

use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::CMatrix;

/// Thin SVD `m = U diag(s) V^H` with `s` nonnegative and nonincreasing.
pub struct ThinSvd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub v: CMatrix,
}

impl ThinSvd {
    /// `U diag(w) V^H` for replacement singular values `w`; trailing zeros
    /// of `w` are skipped.
    pub fn rebuild(&self, w: &[f64]) -> CMatrix {
        let keep = w.iter().rposition(|&x| x != 0.0).map_or(0, |p| p + 1);
        if keep == 0 {
            return CMatrix::zeros(self.u.nrows(), self.v.nrows());
        }
        let us = CMatrix::from_fn(self.u.nrows(), keep, |i, j| self.u[(i, j)] * w[j]);
        let vk = self.v.as_ref().subcols(0, keep);
        &us * vk.adjoint()
    }
}

pub fn thin_svd(m: &CMatrix) -> Result<ThinSvd> {
    let k = m.nrows().min(m.ncols());
    if k == 0 {
        return Ok(ThinSvd {
            u: CMatrix::zeros(m.nrows(), 0),
            s: Vec::new(),
            v: CMatrix::zeros(m.ncols(), 0),
        });
    }
    if !m.as_ref().is_all_finite() {
        return Err(Error::NumericalFailure(
            "non-finite entries in SVD input".into(),
        ));
    }
    let svd = m
        .thin_svd()
        .map_err(|e| Error::NumericalFailure(format!("SVD did not converge: {e:?}")))?;
    let s: Vec<f64> = svd.S().column_vector().iter().map(|z| z.re).collect();
    Ok(ThinSvd {
        u: svd.U().to_owned(),
        s,
        v: svd.V().to_owned(),
    })
}

/// Thin SVD of the real part of `m`, with real factors. Used for
/// self-conjugate spectral slices, whose factors must stay real.
pub fn thin_svd_real(m: &CMatrix) -> Result<ThinSvd> {
    let k = m.nrows().min(m.ncols());
    if k == 0 {
        return thin_svd(m);
    }
    let re = Mat::<f64>::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].re);
    if !re.as_ref().is_all_finite() {
        return Err(Error::NumericalFailure(
            "non-finite entries in SVD input".into(),
        ));
    }
    let svd = re
        .thin_svd()
        .map_err(|e| Error::NumericalFailure(format!("SVD did not converge: {e:?}")))?;
    let lift =
        |x: faer::MatRef<'_, f64>| CMatrix::from_fn(x.nrows(), x.ncols(), |i, j| x[(i, j)].into());
    Ok(ThinSvd {
        u: lift(svd.U()),
        s: svd.S().column_vector().iter().copied().collect(),
        v: lift(svd.V()),
    })
}

pub fn singular_values(m: &CMatrix) -> Result<Vec<f64>> {
    if m.nrows().min(m.ncols()) == 0 {
        return Ok(Vec::new());
    }
    m.singular_values()
        .map_err(|e| Error::NumericalFailure(format!("SVD did not converge: {e:?}")))
}

/// Moore-Penrose pseudo-inverse keeping singular values strictly above
/// `cutoff` (absolute).
pub fn pinv(m: &CMatrix, cutoff: f64) -> Result<CMatrix> {
    let svd = thin_svd(m)?;
    Ok(pinv_from_svd(&svd, cutoff, usize::MAX))
}

/// Pseudo-inverse from a precomputed SVD, keeping at most `max_rank`
/// singular values above `cutoff`.
pub fn pinv_from_svd(svd: &ThinSvd, cutoff: f64, max_rank: usize) -> CMatrix {
    let keep = svd
        .s
        .iter()
        .take(max_rank)
        .take_while(|&&x| x > cutoff)
        .count();
    if keep == 0 {
        return CMatrix::zeros(svd.v.nrows(), svd.u.nrows());
    }
    let vs = CMatrix::from_fn(svd.v.nrows(), keep, |i, j| svd.v[(i, j)] / svd.s[j]);
    &vs * svd.u.as_ref().subcols(0, keep).adjoint()
}

pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
    Mat::from_fn(rows, cols, |i, j| Complex64::new(data[i + rows * j], 0.0))
}

pub fn real_part(m: &CMatrix) -> CMatrix {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| {
        Complex64::new(m[(i, j)].re, 0.0)
    })
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.norm_l2()
}

pub fn select_rows(m: &CMatrix, rows: &[usize]) -> CMatrix {
    Mat::from_fn(rows.len(), m.ncols(), |i, j| m[(rows[i], j)])
}

pub fn select_cols(m: &CMatrix, cols: &[usize]) -> CMatrix {
    Mat::from_fn(m.nrows(), cols.len(), |i, j| m[(i, cols[j])])
}

pub fn select(m: &CMatrix, rows: &[usize], cols: &[usize]) -> CMatrix {
    Mat::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}
