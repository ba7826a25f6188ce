//! File formats: T3B binary tensors and 8-bit RGB PNG images.
//!
//! T3B layout: the magic bytes `T3B1`, three little-endian `u64` dims
//! `(n1, n2, n3)`, then `n1 n2 n3` little-endian `f64` values in slice-major
//! order (the in-memory order of [`Tensor3`]).
//!
//! Images map to `rows x cols x 3` tensors with the colour channel along
//! mode 3, so one tube is one pixel.

use std::io::{Read, Write};
use std::path::Path;

use image::{ColorType, ImageFormat, RgbImage};

use crate::error::{Error, Result};
use crate::tensor::Tensor3;

pub const T3B_MAGIC: &[u8; 4] = b"T3B1";

pub fn write_t3b_to<W: Write>(t: &Tensor3, mut w: W) -> Result<()> {
    let (n1, n2, n3) = t.dims();
    w.write_all(T3B_MAGIC)?;
    for d in [n1, n2, n3] {
        w.write_all(&(d as u64).to_le_bytes())?;
    }
    let mut buf = Vec::with_capacity(t.len() * 8);
    for v in t.as_slice() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

/// Parses a T3B payload. Errors carry a reason string; [`read_t3b`] attaches
/// the path.
pub fn read_t3b_from<R: Read>(mut r: R) -> Result<Tensor3> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    parse_t3b(&bytes)
}

fn parse_t3b(bytes: &[u8]) -> Result<Tensor3> {
    let bad = |m: &str| Error::UnsupportedFormat(format!("T3B: {m}"));
    if bytes.len() < 28 {
        return Err(bad("truncated header"));
    }
    if &bytes[..4] != T3B_MAGIC {
        return Err(bad("wrong magic bytes"));
    }
    let dim = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let (n1, n2, n3) = (dim(4), dim(12), dim(20));
    if n1 == 0 || n2 == 0 || n3 == 0 {
        return Err(bad("zero dimension"));
    }
    let count = n1
        .checked_mul(n2)
        .and_then(|p| p.checked_mul(n3))
        .and_then(|p| usize::try_from(p).ok())
        .ok_or_else(|| bad("dimensions overflow"))?;
    let payload = &bytes[28..];
    if payload.len() / 8 != count || !payload.len().is_multiple_of(8) {
        return Err(bad(&format!(
            "expected {} payload bytes, found {}",
            count as u128 * 8,
            payload.len()
        )));
    }
    let data = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Tensor3::from_vec((n1 as usize, n2 as usize, n3 as usize), data)
}

pub fn write_t3b(t: &Tensor3, path: &Path) -> Result<()> {
    let f = std::fs::File::create(path)?;
    write_t3b_to(t, std::io::BufWriter::new(f))
}

pub fn read_t3b(path: &Path) -> Result<Tensor3> {
    let bytes = std::fs::read(path)?;
    parse_t3b(&bytes).map_err(|e| match e {
        Error::Io(_) => e,
        other => Error::Malformed {
            path: path.to_owned(),
            reason: other.to_string(),
        },
    })
}

/// Loads an 8-bit RGB PNG as a `rows x cols x 3` tensor with values in
/// `[0, 255]`. Grayscale, alpha and 16-bit images are rejected rather than
/// converted.
pub fn load_png(path: &Path) -> Result<Tensor3> {
    let reader = image::ImageReader::open(path)?.with_guessed_format()?;
    if reader.format() != Some(ImageFormat::Png) {
        return Err(Error::UnsupportedFormat(format!(
            "{} is not a PNG file",
            path.display()
        )));
    }
    let img = reader.decode().map_err(|e| Error::Malformed {
        path: path.to_owned(),
        reason: e.to_string(),
    })?;
    if img.color() != ColorType::Rgb8 {
        return Err(Error::UnsupportedFormat(format!(
            "{}: expected 8-bit RGB, found {:?}",
            path.display(),
            img.color()
        )));
    }
    Ok(image_to_tensor(&img.into_rgb8()))
}

pub fn image_to_tensor(img: &RgbImage) -> Tensor3 {
    let (w, h) = img.dimensions();
    Tensor3::from_fn((h as usize, w as usize, 3), |i, j, k| {
        f64::from(img.get_pixel(j as u32, i as u32)[k])
    })
}

/// Clamps to `[0, 255]` and rounds half to even.
pub fn quantize(v: f64) -> u8 {
    v.clamp(0.0, 255.0).round_ties_even() as u8
}

pub fn tensor_to_image(t: &Tensor3) -> Result<RgbImage> {
    let (h, w, c) = t.dims();
    if c != 3 {
        return Err(Error::dims(format!(
            "image tensors need 3 channels, got {c}"
        )));
    }
    let (w32, h32) = match (u32::try_from(w), u32::try_from(h)) {
        (Ok(w), Ok(h)) => (w, h),
        _ => return Err(Error::invalid("image too large")),
    };
    Ok(RgbImage::from_fn(w32, h32, |x, y| {
        let (i, j) = (y as usize, x as usize);
        image::Rgb([
            quantize(t.get(i, j, 0)),
            quantize(t.get(i, j, 1)),
            quantize(t.get(i, j, 2)),
        ])
    }))
}

pub fn save_png(t: &Tensor3, path: &Path) -> Result<()> {
    let img = tensor_to_image(t)?;
    img.save_with_format(path, ImageFormat::Png)
        .map_err(|e| match e {
            image::ImageError::IoError(io) => Error::Io(io),
            other => Error::UnsupportedFormat(other.to_string()),
        })
}
