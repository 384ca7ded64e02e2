use super::matrix::{kron, max_abs, CMat, HermitianMatrix};
use super::tuple::HermitianTuple;
use crate::error::{Error, Result};

/// Largest entrywise deviation of the constant term from `I` still treated
/// as monic.
pub const MONIC_TOL: f64 = 1e-10;

/// Affine Hermitian pencil `A0 + Σ A_j x_j + Σ Γ_k y_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearPencil {
    constant: HermitianMatrix,
    x_coeffs: Vec<HermitianMatrix>,
    y_coeffs: Vec<HermitianMatrix>,
}

impl LinearPencil {
    pub fn new(
        constant: HermitianMatrix,
        x_coeffs: Vec<HermitianMatrix>,
        y_coeffs: Vec<HermitianMatrix>,
    ) -> Result<Self> {
        let d = constant.dim();
        if let Some(bad) = x_coeffs.iter().chain(&y_coeffs).find(|m| m.dim() != d) {
            return Err(Error::dims(format!(
                "pencil coefficients must be {d}x{d}, found {}x{}",
                bad.dim(),
                bad.dim()
            )));
        }
        Ok(Self {
            constant,
            x_coeffs,
            y_coeffs,
        })
    }

    /// `I − Σ Ω_j x_j`.
    pub fn monic_from(omega: &HermitianTuple) -> Self {
        Self::monic_from_pair(omega, &HermitianTuple::zeros(0, omega.dim()))
    }

    /// `I − Σ Ω_j x_j − Σ Γ_k y_k`.
    pub fn monic_from_pair(omega: &HermitianTuple, gamma: &HermitianTuple) -> Self {
        Self {
            constant: HermitianMatrix::identity(omega.dim()),
            x_coeffs: omega.mats().iter().map(|m| m.scale(-1.0)).collect(),
            y_coeffs: gamma.mats().iter().map(|m| m.scale(-1.0)).collect(),
        }
    }

    pub fn g(&self) -> usize {
        self.x_coeffs.len()
    }

    pub fn h(&self) -> usize {
        self.y_coeffs.len()
    }

    /// Coefficient size d.
    pub fn size(&self) -> usize {
        self.constant.dim()
    }

    pub fn constant(&self) -> &HermitianMatrix {
        &self.constant
    }

    pub fn x_coeffs(&self) -> &[HermitianMatrix] {
        &self.x_coeffs
    }

    pub fn y_coeffs(&self) -> &[HermitianMatrix] {
        &self.y_coeffs
    }

    /// True iff the constant term is the identity up to [`MONIC_TOL`], so
    /// that unitary congruence keeps a monic pencil monic.
    pub fn is_monic(&self) -> bool {
        max_abs(&(self.constant.as_matrix() - CMat::identity(self.size(), self.size()))) <= MONIC_TOL
    }

    /// For a monic pencil `I − Σ Ω_j x_j − Σ Γ_k y_k`, the tuple `Ω`.
    pub fn omega(&self) -> HermitianTuple {
        HermitianTuple::new(self.size(), self.x_coeffs.iter().map(|m| m.scale(-1.0)).collect())
            .expect("coefficients share size")
    }

    /// For a monic pencil, the tuple `Γ`.
    pub fn gamma(&self) -> HermitianTuple {
        HermitianTuple::new(self.size(), self.y_coeffs.iter().map(|m| m.scale(-1.0)).collect())
            .expect("coefficients share size")
    }

    /// The same pencil with all y-variables promoted to trailing x-variables.
    pub fn flatten(&self) -> Self {
        let mut x = self.x_coeffs.clone();
        x.extend(self.y_coeffs.iter().cloned());
        Self {
            constant: self.constant.clone(),
            x_coeffs: x,
            y_coeffs: Vec::new(),
        }
    }

    /// Homogeneous part `Σ A_j x_j` (constant term dropped).
    pub fn homogeneous(&self) -> Self {
        Self {
            constant: HermitianMatrix::zeros(self.size()),
            x_coeffs: self.x_coeffs.clone(),
            y_coeffs: self.y_coeffs.clone(),
        }
    }

    /// Block diagonal pencil `self ⊕ other` over the same variables.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.g() != other.g() || self.h() != other.h() {
            return Err(Error::dims("direct sum of pencils in different variables"));
        }
        Ok(Self {
            constant: self.constant.direct_sum(&other.constant),
            x_coeffs: self.x_coeffs.iter().zip(&other.x_coeffs).map(|(a, b)| a.direct_sum(b)).collect(),
            y_coeffs: self.y_coeffs.iter().zip(&other.y_coeffs).map(|(a, b)| a.direct_sum(b)).collect(),
        })
    }

    /// Congruence of every coefficient by `u`.
    pub fn congruence(&self, u: &CMat) -> Self {
        Self {
            constant: self.constant.congruence(u),
            x_coeffs: self.x_coeffs.iter().map(|m| m.congruence(u)).collect(),
            y_coeffs: self.y_coeffs.iter().map(|m| m.congruence(u)).collect(),
        }
    }

    /// `L(X, Y) = A0 ⊗ I + Σ A_j ⊗ X_j + Σ Γ_k ⊗ Y_k`.
    pub fn evaluate(&self, x: &HermitianTuple, y: Option<&HermitianTuple>) -> Result<HermitianMatrix> {
        if x.g() != self.g() {
            return Err(Error::dims(format!(
                "pencil has {} x-variables, point has {}",
                self.g(),
                x.g()
            )));
        }
        let n = x.dim();
        let mut out = kron(self.constant.as_matrix(), &CMat::identity(n, n));
        for (a, xj) in self.x_coeffs.iter().zip(x.mats()) {
            out += kron(a.as_matrix(), xj.as_matrix());
        }
        match (self.h(), y) {
            (0, None) => {}
            (0, Some(y)) if y.g() == 0 => {}
            (h, Some(y)) => {
                if y.g() != h || y.dim() != n {
                    return Err(Error::dims(format!(
                        "pencil expects {h} y-variables of size {n}, got {} of size {}",
                        y.g(),
                        y.dim()
                    )));
                }
                for (gm, yk) in self.y_coeffs.iter().zip(y.mats()) {
                    out += kron(gm.as_matrix(), yk.as_matrix());
                }
            }
            (h, None) => {
                return Err(Error::dims(format!("pencil has {h} y-variables but no y point given")));
            }
        }
        Ok(HermitianMatrix::from_hermitian_part(out))
    }

    /// Smallest eigenvalue of `L(X)`; `L` must have no y-variables.
    pub fn min_eigenvalue_at(&self, x: &HermitianTuple) -> Result<f64> {
        Ok(self.evaluate(x, None)?.min_eigenvalue())
    }
}

/// Free ε-ball `{X : Σ X_j² ⪯ ε² I}` centered at 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormBall {
    pub g: usize,
    pub epsilon: f64,
}

impl NormBall {
    pub fn new(g: usize, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::Invalid(format!("ball radius must be positive, got {epsilon}")));
        }
        Ok(Self { g, epsilon })
    }

    /// Monic pencil `I + ε⁻¹ Σ (E_{0j} + E_{j0}) x_j` of size g+1; its LMI
    /// is the Schur complement form of `ε² I − Σ X_j² ⪰ 0`.
    pub fn pencil(&self) -> LinearPencil {
        let d = self.g + 1;
        let coeffs = (1..=self.g)
            .map(|j| {
                let mut m = CMat::zeros(d, d);
                m[(0, j)] = super::matrix::cr(1.0 / self.epsilon);
                m[(j, 0)] = super::matrix::cr(1.0 / self.epsilon);
                HermitianMatrix::from_hermitian_part(m)
            })
            .collect();
        LinearPencil::new(HermitianMatrix::identity(d), coeffs, Vec::new()).expect("consistent sizes")
    }

    pub fn contains(&self, x: &HermitianTuple) -> bool {
        x.row_norm() <= self.epsilon
    }
}
