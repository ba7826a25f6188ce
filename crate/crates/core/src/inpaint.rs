//! Colour image inpainting under pixel dropout.
//!
//! An RGB image is a `rows x cols x 3` tensor, so dropping whole pixels is
//! tubal sampling. The completed estimate is scored (PSNR, RE) before it is
//! clamped to `[0, 255]`; the returned image is the clamped estimate.

use crate::cur::IcurcConfig;
use crate::error::{Error, Result};
use crate::experiment::{solve, Method, MetricRow, SolverConfig};
use crate::metrics::{psnr, relative_error};
use crate::sampling::{project, random_tubal_mask, TubalMask};
use crate::tensor::Tensor3;

/// Target rank TCCUR uses on images unless told otherwise.
pub const DEFAULT_IMAGE_RANK: usize = 10;

#[derive(Clone, Debug)]
pub enum Sampling {
    /// `round(ratio * rows * cols)` pixels kept, drawn from `seed`.
    Ratio {
        ratio: f64,
        seed: u64,
    },
    Mask(TubalMask),
}

impl Sampling {
    pub fn resolve(&self, rows: usize, cols: usize) -> Result<TubalMask> {
        match self {
            Sampling::Ratio { ratio, seed } => random_tubal_mask(rows, cols, *ratio, *seed),
            Sampling::Mask(m) if m.dims() == (rows, cols) => Ok(m.clone()),
            Sampling::Mask(m) => Err(Error::dims(format!(
                "mask is {}x{}, image is {rows}x{cols}",
                m.dims().0,
                m.dims().1
            ))),
        }
    }
}

/// Solver settings suited to 8-bit images of the given size. TCCUR uses
/// rank [`DEFAULT_IMAGE_RANK`] with half of the rows and columns as index
/// sets; natural images are only approximately low rank, so the
/// oversampled default would cover nearly the whole image.
pub fn image_config(rows: usize, cols: usize) -> SolverConfig {
    let rank = DEFAULT_IMAGE_RANK.min(rows.min(cols));
    let mut cur = IcurcConfig::new(rank, rows, cols);
    cur.row_count = (rows / 2).max(rank).min(rows);
    cur.col_count = (cols / 2).max(rank).min(cols);
    SolverConfig {
        cur,
        ..Default::default()
    }
}

#[derive(Clone, Debug)]
pub struct Inpainted {
    /// Estimate clamped to `[0, 255]`.
    pub image: Tensor3,
    /// Unclamped solver output.
    pub estimate: Tensor3,
    pub mask: TubalMask,
    pub row: MetricRow,
}

pub fn check_image(image: &Tensor3) -> Result<()> {
    if image.dims().2 != 3 {
        return Err(Error::dims(format!(
            "image tensors need 3 channels, got {}",
            image.dims().2
        )));
    }
    if image.as_slice().iter().any(|v| !(0.0..=255.0).contains(v)) {
        return Err(Error::invalid("image values must lie in [0, 255]"));
    }
    Ok(())
}

/// Drops pixels, completes with `method`, and scores against `image`.
///
/// A full mask returns the input unchanged without calling a solver.
pub fn inpaint(
    image: &Tensor3,
    sampling: &Sampling,
    method: Method,
    cfg: &SolverConfig,
) -> Result<Inpainted> {
    check_image(image)?;
    let (rows, cols, _) = image.dims();
    let mask = sampling.resolve(rows, cols)?;
    let (estimate, time_s, iters) = if mask.count() == rows * cols {
        (image.clone(), 0.0, 0)
    } else {
        let y = project(image, &mask)?;
        let solved = solve(method, &y, &mask, cfg)?;
        (solved.estimate, solved.time_s, solved.iters)
    };
    let row = MetricRow {
        method,
        ratio: mask.sampling_ratio(),
        trial: 0,
        re: Some(relative_error(&estimate, image)?),
        psnr: Some(psnr(&estimate, image)?),
        time_s,
        iters,
    };
    Ok(Inpainted {
        image: estimate.map(|v| v.clamp(0.0, 255.0)),
        estimate,
        mask,
        row,
    })
}
