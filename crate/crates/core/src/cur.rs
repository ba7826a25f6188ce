//! Matrix completion by iterative CUR with resampling (ICURC-R), and tensor
//! completion by running it on every Fourier slice (TCCUR).
//!
//! ICURC-R keeps the iterate in factored form `X = C U† R` and never forms
//! the full `n1 x n2` matrix. Each iteration only reads the row strip `I`
//! and column strip `J` of the current iterate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, pinv_from_svd, select_cols, select_rows};
use crate::parallel::par_map;
use crate::rng::{self, StableRng};
use crate::sampling::{project, TubalMask};
use crate::spectral::{conj_partner, fft_mode3, half_len, ifft_mode3, CMatrix, SpectralTensor3};
use crate::talgebra::t_product;
use crate::tensor::Tensor3;

/// Singular values below this fraction of the largest are dropped when
/// inverting the truncated core.
pub const CORE_RCOND: f64 = 1e-12;

/// Which strips the stopping metric `e` is measured on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorStrips {
    /// The index sets drawn in the current iteration.
    #[default]
    Current,
    /// The fixed output index sets.
    Fixed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IcurcConfig {
    pub rank: usize,
    pub row_count: usize,
    pub col_count: usize,
    pub eps: f64,
    pub max_iters: usize,
    pub seed: u64,
    /// Output row indices; drawn from `seed` when absent.
    #[serde(default)]
    pub fixed_rows: Option<Vec<usize>>,
    /// Output column indices; drawn from `seed` when absent.
    #[serde(default)]
    pub fixed_cols: Option<Vec<usize>>,
    #[serde(default)]
    pub error_strips: ErrorStrips,
}

/// Default index-set size: `max(r + 2, ceil(1.5 r ln(max(n1, n2))))`, capped
/// at `min(n1, n2)`.
pub fn default_core_size(rank: usize, n1: usize, n2: usize) -> usize {
    let oversampled = (1.5 * rank as f64 * (n1.max(n2) as f64).ln()).ceil() as usize;
    oversampled.max(rank + 2).min(n1.min(n2))
}

impl IcurcConfig {
    pub fn new(rank: usize, n1: usize, n2: usize) -> Self {
        let size = default_core_size(rank, n1, n2);
        IcurcConfig {
            rank,
            row_count: size,
            col_count: size,
            eps: 1e-6,
            max_iters: 500,
            seed: 0,
            fixed_rows: None,
            fixed_cols: None,
            error_strips: ErrorStrips::Current,
        }
    }

    pub fn validate(&self, n1: usize, n2: usize) -> Result<()> {
        if self.rank == 0 {
            return Err(Error::invalid("rank must be at least 1"));
        }
        if self.row_count == 0 || self.row_count > n1 || self.col_count == 0 || self.col_count > n2
        {
            return Err(Error::invalid(format!(
                "core size {}x{} does not fit a {n1}x{n2} matrix",
                self.row_count, self.col_count
            )));
        }
        if self.rank > self.row_count.min(self.col_count) {
            return Err(Error::RankTooLarge {
                rank: self.rank,
                rows: self.row_count,
                cols: self.col_count,
            });
        }
        if self.eps.is_nan() || self.eps <= 0.0 {
            return Err(Error::invalid(format!(
                "eps must be positive, got {}",
                self.eps
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::invalid("max_iters must be at least 1"));
        }
        for (name, set, count, bound) in [
            ("row", &self.fixed_rows, self.row_count, n1),
            ("column", &self.fixed_cols, self.col_count, n2),
        ] {
            if let Some(idx) = set {
                let mut sorted = idx.clone();
                sorted.sort_unstable();
                sorted.dedup();
                if sorted.len() != count
                    || idx.len() != count
                    || sorted.last().is_some_and(|&m| m >= bound)
                {
                    return Err(Error::invalid(format!(
                        "fixed {name} indices must be {count} distinct values below {bound}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The fixed output index sets, drawing any that are not given.
    pub fn resolve_fixed(&self, n1: usize, n2: usize) -> (Vec<usize>, Vec<usize>) {
        let mut g = rng::stream(self.seed, u64::MAX);
        let rows = match &self.fixed_rows {
            Some(r) => r.clone(),
            None => rng::sample_indices(&mut g, n1, self.row_count),
        };
        let cols = match &self.fixed_cols {
            Some(c) => c.clone(),
            None => rng::sample_indices(&mut g, n2, self.col_count),
        };
        (rows, cols)
    }
}

/// CUR components on the fixed index sets: `c = X[:, J]`,
/// `u_pinv = H_r(X[I, J])^†`, `r = X[I, :]`.
#[derive(Clone, Debug)]
pub struct CurComponents {
    pub c: CMatrix,
    pub u_pinv: CMatrix,
    pub r: CMatrix,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    /// Number of updates performed.
    pub iters: usize,
    /// Stopping metric of every evaluated iterate, starting with `X^0 = 0`.
    pub errors: Vec<f64>,
    pub converged: bool,
}

impl CurComponents {
    pub fn final_error(&self) -> f64 {
        self.errors.last().copied().unwrap_or(f64::INFINITY)
    }

    /// `C U† R`.
    pub fn assemble(&self) -> CMatrix {
        &self.c * &(&self.u_pinv * &self.r)
    }
}

/// Best rank-`r` approximation in Frobenius norm (truncated SVD).
pub fn truncate_rank(m: &CMatrix, r: usize) -> Result<CMatrix> {
    if r == 0 {
        return Ok(CMatrix::zeros(m.nrows(), m.ncols()));
    }
    let svd = linalg::thin_svd(m)?;
    let w: Vec<f64> = svd
        .s
        .iter()
        .enumerate()
        .map(|(i, &s)| if i < r { s } else { 0.0 })
        .collect();
    Ok(svd.rebuild(&w))
}

/// `H_r(core)` and its pseudo-inverse.
fn truncated_core(core: &CMatrix, r: usize) -> Result<(CMatrix, CMatrix)> {
    let svd = linalg::thin_svd(core)?;
    let smax = svd.s.first().copied().unwrap_or(0.0);
    let w: Vec<f64> = svd
        .s
        .iter()
        .enumerate()
        .map(|(i, &s)| if i < r { s } else { 0.0 })
        .collect();
    Ok((svd.rebuild(&w), pinv_from_svd(&svd, CORE_RCOND * smax, r)))
}

/// Iterate stored as `X = c * w` with `w = U† R`; `None` is the zero matrix.
struct Factored {
    c: CMatrix,
    w: CMatrix,
}

impl Factored {
    fn rows(this: &Option<Factored>, rows: &[usize], n2: usize) -> CMatrix {
        match this {
            Some(f) => &select_rows(&f.c, rows) * &f.w,
            None => CMatrix::zeros(rows.len(), n2),
        }
    }

    fn cols(this: &Option<Factored>, cols: &[usize], n1: usize) -> CMatrix {
        match this {
            Some(f) => &f.c * &select_cols(&f.w, cols),
            None => CMatrix::zeros(n1, cols.len()),
        }
    }
}

/// Strip of `X + P_Φ(Y - X)` (observed entries replaced by `Y`) together
/// with `||P_Φ(Y - X)||_F` and `||Y||_F` on the strip.
fn correct_strip(
    x_strip: CMatrix,
    y: &CMatrix,
    mask: &TubalMask,
    rows: Option<&[usize]>,
    cols: Option<&[usize]>,
) -> (CMatrix, f64, f64) {
    let mut out = x_strip;
    let (mut res2, mut obs2) = (0.0, 0.0);
    for jj in 0..out.ncols() {
        let j = cols.map_or(jj, |c| c[jj]);
        for ii in 0..out.nrows() {
            let i = rows.map_or(ii, |r| r[ii]);
            if mask.contains(i, j) {
                let yv = y[(i, j)];
                res2 += (yv - out[(ii, jj)]).norm_sqr();
                obs2 += yv.norm_sqr();
                out[(ii, jj)] = yv;
            }
        }
    }
    (out, res2.sqrt(), obs2.sqrt())
}

fn strip_error(res: f64, obs: f64) -> f64 {
    if obs > 0.0 {
        res / obs
    } else if res == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// ICURC-R on a single matrix with index draws from stream 1 of `cfg.seed`.
/// Stream 0 is the one mask draws use, so a shared seed does not correlate
/// the index sets with the mask.
pub fn icurc_r(y: &CMatrix, mask: &TubalMask, cfg: &IcurcConfig) -> Result<CurComponents> {
    let (rows, cols) = cfg.resolve_fixed(y.nrows(), y.ncols());
    icurc_r_with(y, mask, cfg, &rows, &cols, &mut rng::stream(cfg.seed, 1))
}

/// ICURC-R with explicit output index sets and random stream.
pub fn icurc_r_with(
    y: &CMatrix,
    mask: &TubalMask,
    cfg: &IcurcConfig,
    fixed_rows: &[usize],
    fixed_cols: &[usize],
    rng: &mut StableRng,
) -> Result<CurComponents> {
    let (n1, n2) = (y.nrows(), y.ncols());
    if mask.dims() != (n1, n2) {
        return Err(Error::dims(format!(
            "mask {:?} vs matrix {n1}x{n2}",
            mask.dims()
        )));
    }
    let fixed_cfg = IcurcConfig {
        fixed_rows: Some(fixed_rows.to_vec()),
        fixed_cols: Some(fixed_cols.to_vec()),
        ..cfg.clone()
    };
    fixed_cfg.validate(n1, n2)?;
    if !y.as_ref().is_all_finite() {
        return Err(Error::invalid("observed matrix has non-finite entries"));
    }

    let mut x: Option<Factored> = None;
    let mut errors = Vec::new();
    let mut iters = 0;
    let mut converged = false;

    loop {
        let i_set = rng::sample_indices(rng, n1, cfg.row_count);
        let j_set = rng::sample_indices(rng, n2, cfg.col_count);

        let (row_strip, res_r, obs_r) =
            correct_strip(Factored::rows(&x, &i_set, n2), y, mask, Some(&i_set), None);
        let (col_strip, res_c, obs_c) =
            correct_strip(Factored::cols(&x, &j_set, n1), y, mask, None, Some(&j_set));
        let e = match cfg.error_strips {
            ErrorStrips::Current => strip_error(res_r + res_c, obs_r + obs_c),
            ErrorStrips::Fixed => {
                let (_, rr, or) = correct_strip(
                    Factored::rows(&x, fixed_rows, n2),
                    y,
                    mask,
                    Some(fixed_rows),
                    None,
                );
                let (_, rc, oc) = correct_strip(
                    Factored::cols(&x, fixed_cols, n1),
                    y,
                    mask,
                    None,
                    Some(fixed_cols),
                );
                strip_error(rr + rc, or + oc)
            }
        };
        errors.push(e);
        if e < cfg.eps {
            converged = true;
            break;
        }
        if iters >= cfg.max_iters {
            break;
        }

        let core = select_cols(&row_strip, &j_set);
        let (u, u_pinv) = truncated_core(&core, cfg.rank)?;
        let mut r = row_strip;
        for (jj, &j) in j_set.iter().enumerate() {
            for ii in 0..i_set.len() {
                r[(ii, j)] = u[(ii, jj)];
            }
        }
        let mut c = col_strip;
        for (ii, &i) in i_set.iter().enumerate() {
            for jj in 0..j_set.len() {
                c[(i, jj)] = u[(ii, jj)];
            }
        }
        x = Some(Factored { w: &u_pinv * &r, c });
        iters += 1;
    }

    let r_out = Factored::rows(&x, fixed_rows, n2);
    let c_out = Factored::cols(&x, fixed_cols, n1);
    let (_, u_pinv) = truncated_core(&select_cols(&r_out, fixed_cols), cfg.rank)?;
    Ok(CurComponents {
        c: c_out,
        u_pinv,
        r: r_out,
        rows: fixed_rows.to_vec(),
        cols: fixed_cols.to_vec(),
        iters,
        errors,
        converged,
    })
}

#[derive(Clone, Debug)]
pub struct TccurResult {
    pub estimate: Tensor3,
    /// Final stopping metric per Fourier slice.
    pub per_slice_errors: Vec<f64>,
    pub iters: Vec<usize>,
    pub converged: Vec<bool>,
    /// Stopping-metric history per slice.
    pub histories: Vec<Vec<f64>>,
}

impl TccurResult {
    /// Per-slice convergence as CSV with header `slice,iter,e`.
    pub fn convergence_csv(&self) -> String {
        let mut s = String::from("slice,iter,e\n");
        for (k, h) in self.histories.iter().enumerate() {
            for (it, e) in h.iter().enumerate() {
                s.push_str(&format!("{k},{it},{e:e}\n"));
            }
        }
        s
    }

    pub fn max_iters(&self) -> usize {
        self.iters.iter().copied().max().unwrap_or(0)
    }
}

/// Tensor completion through t-CUR.
///
/// Runs ICURC-R on Fourier slices `0..=n3/2` with the same tubal mask and
/// the same fixed `I`, `J` for every slice, mirrors the remaining slices by
/// conjugation, inverse-transforms the stacked components and returns
/// `C * U† * R`. Slice `k` draws its index sets from stream `k + 1` of
/// `cfg.seed`.
pub fn tccur(y: &Tensor3, mask: &TubalMask, cfg: &IcurcConfig) -> Result<TccurResult> {
    let (n1, n2, n3) = y.dims();
    cfg.validate(n1, n2)?;
    if project(y, mask)? != *y {
        return Err(Error::invalid(
            "observations must be zero outside the sampled tubes",
        ));
    }
    let (rows, cols) = cfg.resolve_fixed(n1, n2);
    let yh = fft_mode3(y);
    let half = half_len(n3);
    let (mut cs, mut us, mut rs) = (
        Vec::with_capacity(half),
        Vec::with_capacity(half),
        Vec::with_capacity(half),
    );
    let mut histories = Vec::with_capacity(n3);
    let mut iters = Vec::with_capacity(n3);
    let mut converged = Vec::with_capacity(n3);
    let comps = par_map(half, |k| {
        icurc_r_with(
            yh.slice(k),
            mask,
            cfg,
            &rows,
            &cols,
            &mut rng::stream(cfg.seed, k as u64 + 1),
        )
        .map_err(|e| Error::Slice {
            slice: k,
            source: Box::new(e),
        })
    });
    for (k, comp) in comps.into_iter().enumerate() {
        let comp = comp?;
        histories.push(comp.errors.clone());
        iters.push(comp.iters);
        converged.push(comp.converged);
        if conj_partner(k, n3) == k {
            cs.push(linalg::real_part(&comp.c));
            us.push(linalg::real_part(&comp.u_pinv));
            rs.push(linalg::real_part(&comp.r));
        } else {
            cs.push(comp.c);
            us.push(comp.u_pinv);
            rs.push(comp.r);
        }
    }
    for k in half..n3 {
        let p = conj_partner(k, n3);
        histories.push(histories[p].clone());
        iters.push(iters[p]);
        converged.push(converged[p]);
    }
    let c = ifft_mode3(&SpectralTensor3::from_half(n3, cs)?)?;
    let u = ifft_mode3(&SpectralTensor3::from_half(n3, us)?)?;
    let r = ifft_mode3(&SpectralTensor3::from_half(n3, rs)?)?;
    let estimate = t_product(&t_product(&c, &u)?, &r)?;
    Ok(TccurResult {
        estimate,
        per_slice_errors: histories
            .iter()
            .map(|h| h.last().copied().unwrap_or(f64::INFINITY))
            .collect(),
        iters,
        converged,
        histories,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::random_tubal_mask;
    use crate::testutil::random_tensor;
    use num_complex::Complex64;

    fn random_cmatrix(rows: usize, cols: usize, seed: u64) -> CMatrix {
        let re = random_tensor((rows, cols, 1), seed);
        let im = random_tensor((rows, cols, 1), seed + 1000);
        CMatrix::from_fn(rows, cols, |i, j| {
            Complex64::new(re.get(i, j, 0), im.get(i, j, 0))
        })
    }

    fn low_rank(rows: usize, cols: usize, r: usize, seed: u64) -> CMatrix {
        &random_cmatrix(rows, r, seed) * &random_cmatrix(r, cols, seed + 1)
    }

    #[test]
    fn truncation_cases() {
        let m = low_rank(6, 5, 2, 1);
        assert!((&truncate_rank(&m, 3).unwrap() - &m).norm_l2() < 1e-10 * m.norm_l2());
        assert_eq!(truncate_rank(&m, 0).unwrap().norm_l2(), 0.0);

        let a = random_cmatrix(6, 5, 3);
        let s = linalg::singular_values(&a).unwrap();
        let err2 = (&a - &truncate_rank(&a, 2).unwrap()).norm_l2().powi(2);
        let tail: f64 = s[2..].iter().map(|x| x * x).sum();
        assert!((err2 - tail).abs() < 1e-8);
        let sv = linalg::singular_values(&truncate_rank(&a, 2).unwrap()).unwrap();
        assert!(sv[2] < 1e-10);
    }

    #[test]
    fn default_core_sizes() {
        assert_eq!(default_core_size(2, 64, 64), 13);
        assert_eq!(default_core_size(1, 4, 4), 3);
        assert_eq!(default_core_size(5, 8, 8), 8);
    }

    #[test]
    fn config_validation() {
        let mut cfg = IcurcConfig::new(2, 20, 20);
        assert!(cfg.validate(20, 20).is_ok());
        cfg.rank = 50;
        assert!(matches!(
            cfg.validate(20, 20),
            Err(Error::RankTooLarge { .. })
        ));
        let mut cfg = IcurcConfig::new(2, 20, 20);
        cfg.fixed_rows = Some(vec![0; cfg.row_count]);
        assert!(cfg.validate(20, 20).is_err());
    }

    #[test]
    fn fully_observed_low_rank_matrix_is_reproduced() {
        let y = low_rank(30, 25, 2, 5);
        let mut cfg = IcurcConfig::new(2, 30, 25);
        cfg.seed = 3;
        let comp = icurc_r(&y, &TubalMask::full(30, 25), &cfg).unwrap();
        assert!(comp.converged);
        assert!(comp.final_error() < cfg.eps);
        let rel = (&comp.assemble() - &y).norm_l2() / y.norm_l2();
        assert!(rel < 1e-6, "{rel}");
    }

    #[test]
    fn zero_observations_stop_at_once() {
        let y = CMatrix::zeros(10, 12);
        let mask = random_tubal_mask(10, 12, 0.5, 1).unwrap();
        let comp = icurc_r(&y, &mask, &IcurcConfig::new(1, 10, 12)).unwrap();
        assert_eq!(comp.iters, 0);
        assert_eq!(comp.errors, vec![0.0]);
        assert_eq!(comp.assemble().norm_l2(), 0.0);
    }

    #[test]
    fn partial_observation_recovers_low_rank_matrix() {
        let truth = low_rank(60, 60, 2, 9);
        let mask = random_tubal_mask(60, 60, 0.4, 2).unwrap();
        let y = CMatrix::from_fn(60, 60, |i, j| {
            if mask.contains(i, j) {
                truth[(i, j)]
            } else {
                0.0.into()
            }
        });
        let mut cfg = IcurcConfig::new(2, 60, 60);
        cfg.seed = 4;
        let comp = icurc_r(&y, &mask, &cfg).unwrap();
        let rel = (&comp.assemble() - &truth).norm_l2() / truth.norm_l2();
        assert!(rel < 1e-4, "RE {rel} after {} iterations", comp.iters);
        // e is measured on fresh strips of the current iterate, so it can only
        // fall below eps on the final iterate
        assert!(comp.errors.iter().all(|&e| e >= 0.0));
    }

    #[test]
    fn single_slice_tccur_matches_matrix_run() {
        let truth = random_tensor((20, 2, 1), 1);
        let truth = crate::talgebra::t_product(&truth, &random_tensor((2, 18, 1), 2)).unwrap();
        let mask = random_tubal_mask(20, 18, 0.6, 3).unwrap();
        let y = project(&truth, &mask).unwrap();
        let mut cfg = IcurcConfig::new(2, 20, 18);
        cfg.seed = 11;
        let res = tccur(&y, &mask, &cfg).unwrap();
        let (rows, cols) = cfg.resolve_fixed(20, 18);
        let ym = linalg::from_real(20, 18, y.as_slice());
        let comp = icurc_r_with(&ym, &mask, &cfg, &rows, &cols, &mut rng::stream(11, 1)).unwrap();
        let m = comp.assemble();
        for j in 0..18 {
            for i in 0..20 {
                assert!((res.estimate.get(i, j, 0) - m[(i, j)].re).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn tccur_is_deterministic_and_low_rank() {
        let truth = crate::synth::synth_low_tubal_rank(24, 24, 5, 2, 1).unwrap();
        let mask = random_tubal_mask(24, 24, 0.6, 2).unwrap();
        let y = project(&truth, &mask).unwrap();
        let mut cfg = IcurcConfig::new(2, 24, 24);
        cfg.seed = 5;
        let a = tccur(&y, &mask, &cfg).unwrap();
        let b = tccur(&y, &mask, &cfg).unwrap();
        assert_eq!(a.estimate, b.estimate);
        let (_, r) = crate::talgebra::tubal_rank(&a.estimate, 1e-6).unwrap();
        assert!(r <= 2);
        let csv = a.convergence_csv();
        assert!(csv.starts_with("slice,iter,e\n0,0,"));
    }
}
