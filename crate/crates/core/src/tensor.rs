//! Dense real third-order tensors.
//!
//! Storage is slice-major: the `n3` frontal slices are stored one after the
//! other, and each `n1 x n2` slice is column-major. Entry `(i, j, k)` lives at
//! `i + n1 * (j + n2 * k)`. A tube `(i, j, :)` is therefore strided by
//! `n1 * n2`, while a frontal slice is a contiguous block that maps directly
//! onto a column-major matrix.

use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

/// Shape `(n1, n2, n3)` of a third-order tensor.
pub type Dims = (usize, usize, usize);

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor3 {
    dims: Dims,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(dims: Dims) -> Self {
        assert!(
            dims.0 > 0 && dims.1 > 0 && dims.2 > 0,
            "tensor dimensions must be positive, got {dims:?}"
        );
        Tensor3 {
            dims,
            data: vec![0.0; dims.0 * dims.1 * dims.2],
        }
    }

    /// Builds a tensor from slice-major data, rejecting bad lengths and
    /// non-finite values.
    pub fn from_vec(dims: Dims, data: Vec<f64>) -> Result<Self> {
        if dims.0 == 0 || dims.1 == 0 || dims.2 == 0 {
            return Err(Error::invalid(format!(
                "tensor dimensions must be positive, got {dims:?}"
            )));
        }
        if data.len() != dims.0 * dims.1 * dims.2 {
            return Err(Error::dims(format!(
                "{} values for a {}x{}x{} tensor",
                data.len(),
                dims.0,
                dims.1,
                dims.2
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite value at flat index {pos}"
            )));
        }
        Ok(Tensor3 { dims, data })
    }

    pub fn from_fn(dims: Dims, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut t = Tensor3::zeros(dims);
        for k in 0..dims.2 {
            for j in 0..dims.1 {
                for i in 0..dims.0 {
                    t.data[i + dims.0 * (j + dims.1 * k)] = f(i, j, k);
                }
            }
        }
        t
    }

    /// The identity tensor: first frontal slice is `I_n`, the rest are zero.
    pub fn identity(n: usize, n3: usize) -> Self {
        Tensor3::from_fn(
            (n, n, n3),
            |i, j, k| if k == 0 && i == j { 1.0 } else { 0.0 },
        )
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        debug_assert!(i < self.dims.0 && j < self.dims.1 && k < self.dims.2);
        i + self.dims.0 * (j + self.dims.1 * k)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[self.index(i, j, k)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let idx = self.index(i, j, k);
        self.data[idx] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// Frontal slice `k` as a column-major `n1 x n2` block.
    pub fn frontal(&self, k: usize) -> &[f64] {
        let s = self.dims.0 * self.dims.1;
        &self.data[k * s..(k + 1) * s]
    }

    pub fn tube(&self, i: usize, j: usize) -> Vec<f64> {
        (0..self.dims.2).map(|k| self.get(i, j, k)).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Tensor3 {
        Tensor3 {
            dims: self.dims,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, alpha: f64) -> Tensor3 {
        self.map(|v| alpha * v)
    }

    /// `alpha * self + beta * other`.
    pub fn axpby(&self, alpha: f64, other: &Tensor3, beta: f64) -> Result<Tensor3> {
        self.check_same_dims(other)?;
        Ok(Tensor3 {
            dims: self.dims,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| alpha * a + beta * b)
                .collect(),
        })
    }

    /// Frobenius distance `||self - other||_F`.
    pub fn distance(&self, other: &Tensor3) -> Result<f64> {
        self.check_same_dims(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt())
    }

    pub(crate) fn check_same_dims(&self, other: &Tensor3) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::dims(format!("{:?} vs {:?}", self.dims, other.dims)));
        }
        Ok(())
    }
}

impl Add for &Tensor3 {
    type Output = Tensor3;

    fn add(self, rhs: &Tensor3) -> Tensor3 {
        self.axpby(1.0, rhs, 1.0)
            .expect("tensor add: shape mismatch")
    }
}

impl Sub for &Tensor3 {
    type Output = Tensor3;

    fn sub(self, rhs: &Tensor3) -> Tensor3 {
        self.axpby(1.0, rhs, -1.0)
            .expect("tensor sub: shape mismatch")
    }
}

impl Mul<&Tensor3> for f64 {
    type Output = Tensor3;

    fn mul(self, rhs: &Tensor3) -> Tensor3 {
        rhs.scale(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_is_slice_major_column_major() {
        let t = Tensor3::from_fn((2, 3, 2), |i, j, k| (100 * k + 10 * j + i) as f64);
        assert_eq!(t.as_slice()[..6], [0.0, 1.0, 10.0, 11.0, 20.0, 21.0]);
        assert_eq!(t.frontal(1)[0], 100.0);
        assert_eq!(t.tube(1, 2), vec![21.0, 121.0]);
    }

    #[test]
    fn from_vec_rejects_bad_input() {
        assert!(matches!(
            Tensor3::from_vec((2, 2, 2), vec![0.0; 7]),
            Err(Error::DimensionMismatch(_))
        ));
        let mut v = vec![0.0; 8];
        v[3] = f64::NAN;
        assert!(Tensor3::from_vec((2, 2, 2), v).is_err());
        assert!(Tensor3::from_vec((0, 2, 2), vec![]).is_err());
    }

    #[test]
    fn arithmetic() {
        let a = Tensor3::from_fn((2, 2, 2), |i, j, k| (i + j + k) as f64);
        let b = &a + &a;
        assert_eq!(b, 2.0 * &a);
        assert_eq!((&b - &a), a);
        assert_eq!(a.distance(&a).unwrap(), 0.0);
        assert!(a.distance(&Tensor3::zeros((2, 2, 3))).is_err());
    }
}
