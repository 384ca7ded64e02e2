use super::matrix::{CMat, HermitianMatrix};
use crate::error::{Error, Result};

/// A g-tuple of n×n Hermitian matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianTuple {
    dim: usize,
    mats: Vec<HermitianMatrix>,
}

impl HermitianTuple {
    pub fn new(dim: usize, mats: Vec<HermitianMatrix>) -> Result<Self> {
        if let Some(bad) = mats.iter().find(|m| m.dim() != dim) {
            return Err(Error::dims(format!(
                "tuple entries must all be {dim}x{dim}, found {}x{}",
                bad.dim(),
                bad.dim()
            )));
        }
        Ok(Self { dim, mats })
    }

    /// Tuple from a non-empty list; the dimension is taken from the first entry.
    pub fn from_mats(mats: Vec<HermitianMatrix>) -> Result<Self> {
        let dim = mats
            .first()
            .map(HermitianMatrix::dim)
            .ok_or_else(|| Error::Invalid("empty tuple".into()))?;
        Self::new(dim, mats)
    }

    /// Scalar point of level 1.
    pub fn scalars(xs: &[f64]) -> Self {
        Self {
            dim: 1,
            mats: xs.iter().map(|&x| HermitianMatrix::scalar(x)).collect(),
        }
    }

    pub fn zeros(g: usize, dim: usize) -> Self {
        Self {
            dim,
            mats: vec![HermitianMatrix::zeros(dim); g],
        }
    }

    pub fn g(&self) -> usize {
        self.mats.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mats(&self) -> &[HermitianMatrix] {
        &self.mats
    }

    pub fn get(&self, j: usize) -> &HermitianMatrix {
        &self.mats[j]
    }

    pub fn is_zero(&self) -> bool {
        self.mats.iter().all(HermitianMatrix::is_zero)
    }

    /// Componentwise `X ⊕ Y`.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.g() != other.g() {
            return Err(Error::dims(format!(
                "direct sum of tuples with {} and {} variables",
                self.g(),
                other.g()
            )));
        }
        Ok(Self {
            dim: self.dim + other.dim,
            mats: self
                .mats
                .iter()
                .zip(&other.mats)
                .map(|(a, b)| a.direct_sum(b))
                .collect(),
        })
    }

    /// Componentwise `U* X_j U`; `u` is dim×k (an isometry or a contraction).
    pub fn congruence(&self, u: &CMat) -> Result<Self> {
        if u.nrows() != self.dim {
            return Err(Error::dims(format!(
                "conjugating matrix has {} rows, tuple has size {}",
                u.nrows(),
                self.dim
            )));
        }
        Ok(Self {
            dim: u.ncols(),
            mats: self.mats.iter().map(|m| m.congruence(u)).collect(),
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            mats: self.mats.iter().map(|m| m.scale(s)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.g() != other.g() || self.dim != other.dim {
            return Err(Error::dims("adding tuples of different shape"));
        }
        Ok(Self {
            dim: self.dim,
            mats: self.mats.iter().zip(&other.mats).map(|(a, b)| a.add(b)).collect(),
        })
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    /// Append the variables of `other` (same size) after those of `self`.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::dims("concatenating tuples of different sizes"));
        }
        let mut mats = self.mats.clone();
        mats.extend(other.mats.iter().cloned());
        Ok(Self { dim: self.dim, mats })
    }

    /// `X ⊕ 0` with a zero block of the same size.
    pub fn pad_zero(&self) -> Self {
        let z = Self::zeros(self.g(), self.dim);
        self.direct_sum(&z).expect("same variable count")
    }

    /// Operator norm of the row `[X_1 … X_g]`, i.e. `‖Σ X_j²‖^{1/2}`.
    pub fn row_norm(&self) -> f64 {
        let mut s = CMat::zeros(self.dim, self.dim);
        for m in &self.mats {
            s += m.as_matrix() * m.as_matrix();
        }
        HermitianMatrix::from_hermitian_part(s).max_eigenvalue().max(0.0).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direct_sum_with_empty() {
        let x = HermitianTuple::scalars(&[1.0, 2.0]);
        let e = HermitianTuple::zeros(2, 0);
        assert_eq!(x.direct_sum(&e).unwrap(), x);
    }

    #[test]
    fn direct_sum_scalars() {
        let s = HermitianTuple::scalars(&[1.0])
            .direct_sum(&HermitianTuple::scalars(&[-1.0]))
            .unwrap();
        assert_eq!(s.get(0), &HermitianMatrix::diag(&[1.0, -1.0]));
    }

    #[test]
    fn direct_sum_rejects_variable_mismatch() {
        let a = HermitianTuple::scalars(&[1.0]);
        let b = HermitianTuple::scalars(&[1.0, 2.0]);
        assert!(a.direct_sum(&b).is_err());
    }

    #[test]
    fn rejects_mixed_sizes() {
        let r = HermitianTuple::new(2, vec![HermitianMatrix::identity(2), HermitianMatrix::identity(3)]);
        assert!(r.is_err());
        assert!(HermitianTuple::from_mats(vec![]).is_err());
    }
}
