//! Dense real vectors with finite components.

use std::ops::{Add, Index, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Norm threshold below which a vector is treated as zero.
pub const EPS_NORM: f64 = 1e-12;

/// An embedding vector. Always non-empty with finite components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::EmptyVector);
        }
        if let Some(index) = components.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Vector(components))
    }

    /// Builds a vector from a slice, panicking on invalid input. Meant for literals.
    pub fn from_slice(components: &[f64]) -> Self {
        Self::new(components.to_vec()).expect("invalid vector literal")
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        Vector(vec![0.0; dim])
    }

    /// Unit vector along axis `axis`.
    pub fn basis(dim: usize, axis: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[axis] = 1.0;
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(&self, factor: f64) -> Vector {
        Vector(self.0.iter().map(|c| c * factor).collect())
    }

    /// Returns `self + factor * other`.
    pub fn add_scaled(&self, factor: f64, other: &Vector) -> Vector {
        Vector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + factor * b)
                .collect(),
        )
    }

    /// Unit-length copy; fails on (near) zero vectors.
    pub fn normalized(&self) -> Result<Vector> {
        let n = self.norm();
        if n <= EPS_NORM {
            return Err(Error::ZeroVector);
        }
        Ok(self.scale(1.0 / n))
    }

    pub fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: self.dim(),
            });
        }
        Ok(())
    }

    /// Applies a row-major square matrix: `out[i] = sum_j m[i][j] * self[j]`.
    pub fn transform(&self, matrix: &[Vec<f64>]) -> Vector {
        Vector(
            matrix
                .iter()
                .map(|row| row.iter().zip(&self.0).map(|(a, b)| a * b).sum())
                .collect(),
        )
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(value: Vec<f64>) -> Result<Self> {
        Vector::new(value)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.0
    }
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, index: usize) -> &f64 {
        &self.0[index]
    }
}

impl Sub for &Vector {
    type Output = Vector;

    fn sub(self, rhs: &Vector) -> Vector {
        self.add_scaled(-1.0, rhs)
    }
}

impl Add for &Vector {
    type Output = Vector;

    fn add(self, rhs: &Vector) -> Vector {
        self.add_scaled(1.0, rhs)
    }
}

impl Neg for &Vector {
    type Output = Vector;

    fn neg(self) -> Vector {
        self.scale(-1.0)
    }
}

/// Checks that all vectors share one dimension and returns it.
pub(crate) fn common_dim<'a>(vectors: impl IntoIterator<Item = &'a Vector>) -> Result<Option<usize>> {
    let mut dim = None;
    for v in vectors {
        match dim {
            None => dim = Some(v.dim()),
            Some(d) => v.check_dim(d)?,
        }
    }
    Ok(dim)
}
