//! Tubal sampling masks and the projection `P_Ω`.
//!
//! A [`TubalMask`] is the set Φ of observed `(i, j)` positions; the implied
//! tensor index set is `Ω = Φ × [n3]`, so each tube is kept or dropped whole.
//!
//! Mask files are plain text: a header line `n1 n2`, then one 1-indexed
//! `i j` pair per line.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::rng;
use crate::tensor::Tensor3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TubalMask {
    n1: usize,
    n2: usize,
    // column-major n1 x n2 membership bitmap
    observed: Vec<bool>,
    count: usize,
}

impl TubalMask {
    /// Builds a mask from 0-indexed pairs; rejects out-of-range and
    /// duplicate entries.
    pub fn new(n1: usize, n2: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        if n1 == 0 || n2 == 0 {
            return Err(Error::invalid(format!(
                "mask dimensions must be positive, got {n1}x{n2}"
            )));
        }
        let mut observed = vec![false; n1 * n2];
        for &(i, j) in pairs {
            if i >= n1 || j >= n2 {
                return Err(Error::invalid(format!("pair ({i}, {j}) outside {n1}x{n2}")));
            }
            let slot = &mut observed[i + n1 * j];
            if *slot {
                return Err(Error::invalid(format!("duplicate pair ({i}, {j})")));
            }
            *slot = true;
        }
        Ok(TubalMask {
            n1,
            n2,
            observed,
            count: pairs.len(),
        })
    }

    pub fn full(n1: usize, n2: usize) -> Self {
        TubalMask {
            n1,
            n2,
            observed: vec![true; n1 * n2],
            count: n1 * n2,
        }
    }

    pub fn empty(n1: usize, n2: usize) -> Self {
        TubalMask {
            n1,
            n2,
            observed: vec![false; n1 * n2],
            count: 0,
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.n1, self.n2)
    }

    #[inline]
    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.observed[i + self.n1 * j]
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// `|Φ| / (n1 n2)`.
    pub fn sampling_ratio(&self) -> f64 {
        self.count as f64 / (self.n1 * self.n2) as f64
    }

    /// Sampled pairs in column-major order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.count);
        for j in 0..self.n2 {
            for i in 0..self.n1 {
                if self.contains(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Column-major membership bitmap.
    pub fn bitmap(&self) -> &[bool] {
        &self.observed
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n1, self.n2);
        for (i, j) in self.pairs() {
            let _ = writeln!(s, "{} {}", i + 1, j + 1);
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let bad = |reason: String| Error::invalid(format!("mask file: {reason}"));
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| bad("missing header".into()))?;
        let (n1, n2) = parse_pair(header).ok_or_else(|| bad(format!("bad header `{header}`")))?;
        let mut pairs = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let (i, j) = parse_pair(line)
                .ok_or_else(|| bad(format!("bad line {}: `{line}`", lineno + 2)))?;
            if i == 0 || j == 0 {
                return Err(bad(format!("indices are 1-based, got `{line}`")));
            }
            pairs.push((i - 1, j - 1));
        }
        TubalMask::new(n1, n2, &pairs)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        TubalMask::parse(&text).map_err(|e| Error::Malformed {
            path: path.to_owned(),
            reason: e.to_string(),
        })
    }

    fn check(&self, x: &Tensor3) -> Result<()> {
        let (n1, n2, _) = x.dims();
        if (n1, n2) != (self.n1, self.n2) {
            return Err(Error::dims(format!(
                "mask is {}x{}, tensor frontal slices are {n1}x{n2}",
                self.n1, self.n2
            )));
        }
        Ok(())
    }
}

fn parse_pair(line: &str) -> Option<(usize, usize)> {
    let mut it = line.split_whitespace();
    let a = it.next()?.parse().ok()?;
    let b = it.next()?.parse().ok()?;
    it.next().is_none().then_some((a, b))
}

/// Uniform draw of `round(ratio * n1 * n2)` distinct positions without
/// replacement.
pub fn random_tubal_mask(n1: usize, n2: usize, ratio: f64, seed: u64) -> Result<TubalMask> {
    if !(ratio > 0.0 && ratio <= 1.0) {
        return Err(Error::invalid(format!(
            "sampling ratio must lie in (0, 1], got {ratio}"
        )));
    }
    let total = n1 * n2;
    let count = (ratio * total as f64).round() as usize;
    if count == 0 {
        return Err(Error::EmptyMask);
    }
    let picks = rng::sample_indices(&mut rng::seeded(seed), total, count.min(total));
    let pairs: Vec<_> = picks.into_iter().map(|p| (p % n1, p / n1)).collect();
    TubalMask::new(n1, n2, &pairs)
}

/// `P_Ω(x)`: keeps sampled tubes, zeros the rest.
pub fn project(x: &Tensor3, mask: &TubalMask) -> Result<Tensor3> {
    mask.check(x)?;
    let plane = mask.n1 * mask.n2;
    let mut out = x.clone();
    for (p, v) in out.as_mut_slice().iter_mut().enumerate() {
        if !mask.observed[p % plane] {
            *v = 0.0;
        }
    }
    Ok(out)
}

/// `y` on Ω and `x` elsewhere.
pub fn impose(x: &Tensor3, y: &Tensor3, mask: &TubalMask) -> Result<Tensor3> {
    x.check_same_dims(y)?;
    mask.check(x)?;
    let plane = mask.n1 * mask.n2;
    let mut out = x.clone();
    for (p, (v, &obs)) in out.as_mut_slice().iter_mut().zip(y.as_slice()).enumerate() {
        if mask.observed[p % plane] {
            *v = obs;
        }
    }
    Ok(out)
}

/// `||P_Ω(x) - P_Ω(y)||_F`.
pub fn observed_distance(x: &Tensor3, y: &Tensor3, mask: &TubalMask) -> Result<f64> {
    x.check_same_dims(y)?;
    mask.check(x)?;
    let plane = mask.n1 * mask.n2;
    Ok(x.as_slice()
        .iter()
        .zip(y.as_slice())
        .enumerate()
        .filter(|(p, _)| mask.observed[p % plane])
        .map(|(_, (a, b))| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}
