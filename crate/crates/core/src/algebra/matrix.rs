use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix, row/column counts carried by nalgebra.
pub type CMat = DMatrix<Complex64>;
/// Dense real matrix.
pub type RMat = DMatrix<f64>;

/// Asymmetry below this (relative to the largest entry, floor 1) is treated as
/// round-off and symmetrized away; anything larger is rejected.
pub const HERMITIAN_TOL: f64 = 1e-10;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Build a complex matrix from real row-major data.
pub fn cmat_real(rows: usize, cols: usize, data: &[f64]) -> CMat {
    assert_eq!(data.len(), rows * cols);
    CMat::from_row_iterator(rows, cols, data.iter().map(|&x| cr(x)))
}

/// Matrix unit E_{p,q} of the given shape.
pub fn unit(rows: usize, cols: usize, p: usize, q: usize) -> CMat {
    let mut m = CMat::zeros(rows, cols);
    m[(p, q)] = cr(1.0);
    m
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_real(m: &RMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.abs()))
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = CMat::zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            let s = a[(i, j)];
            if s == Complex64::ZERO {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = s * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Block diagonal `a ⊕ b` of two (not necessarily square) matrices.
pub fn block_diag(a: &CMat, b: &CMat) -> CMat {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = CMat::zeros(ra + rb, ca + cb);
    out.view_mut((0, 0), (ra, ca)).copy_from(a);
    out.view_mut((ra, ca), (rb, cb)).copy_from(b);
    out
}

/// Largest entrywise distance between `m` and `m*`.
pub fn asymmetry(m: &CMat) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// A complex Hermitian matrix. The stored entries are exactly Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(CMat);

impl HermitianMatrix {
    /// Accepts `m` if it is Hermitian up to round-off and stores `(m + m*)/2`.
    pub fn new(m: CMat) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::dims(format!(
                "Hermitian matrix must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let asym = asymmetry(&m);
        let scale = max_abs(&m).max(1.0);
        if asym > HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian { asymmetry: asym });
        }
        Ok(Self::symmetrized(m))
    }

    fn symmetrized(m: CMat) -> Self {
        let h = (&m + m.adjoint()).scale(0.5);
        HermitianMatrix(h)
    }

    /// Symmetrize unconditionally; for internally produced matrices that are
    /// Hermitian by construction.
    pub fn from_hermitian_part(m: CMat) -> Self {
        Self::symmetrized(m)
    }

    pub fn from_real(rows: usize, data: &[f64]) -> Result<Self> {
        Self::new(cmat_real(rows, rows, data))
    }

    pub fn from_real_matrix(m: &RMat) -> Result<Self> {
        Self::new(m.map(cr))
    }

    pub fn scalar(x: f64) -> Self {
        HermitianMatrix(CMat::from_element(1, 1, cr(x)))
    }

    pub fn diag(d: &[f64]) -> Self {
        let n = d.len();
        let mut m = CMat::zeros(n, n);
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = cr(x);
        }
        HermitianMatrix(m)
    }

    pub fn identity(n: usize) -> Self {
        HermitianMatrix(CMat::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        HermitianMatrix(CMat::zeros(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &CMat {
        &self.0
    }

    pub fn into_matrix(self) -> CMat {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|z| *z == Complex64::ZERO)
    }

    pub fn is_identity(&self) -> bool {
        self.0 == CMat::identity(self.dim(), self.dim())
    }

    pub fn scale(&self, s: f64) -> Self {
        HermitianMatrix(self.0.scale(s))
    }

    pub fn add(&self, other: &Self) -> Self {
        HermitianMatrix(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        HermitianMatrix(&self.0 - &other.0)
    }

    /// `U* H U`; `u` may be rectangular (isometry conjugation).
    pub fn congruence(&self, u: &CMat) -> Self {
        Self::symmetrized(u.adjoint() * &self.0 * u)
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        HermitianMatrix(block_diag(&self.0, &other.0))
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        if self.dim() == 0 {
            return Vec::new();
        }
        let mut ev: Vec<f64> = self.0.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Smallest eigenvalue; `+inf` for the empty matrix.
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(f64::INFINITY)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues().last().copied().unwrap_or(f64::NEG_INFINITY)
    }

    /// Spectral decomposition `(eigenvalues, eigenvectors as columns)`, ascending.
    pub fn eigen(&self) -> (Vec<f64>, CMat) {
        let n = self.dim();
        if n == 0 {
            return (Vec::new(), CMat::zeros(0, 0));
        }
        let se = self.0.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
        let vals = order.iter().map(|&i| se.eigenvalues[i]).collect();
        let mut vecs = CMat::zeros(n, n);
        for (k, &i) in order.iter().enumerate() {
            vecs.set_column(k, &se.eigenvectors.column(i));
        }
        (vals, vecs)
    }

    /// Apply a real function to the spectrum.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Self {
        let (vals, vecs) = self.eigen();
        let n = self.dim();
        let mut d = CMat::zeros(n, n);
        for (i, v) in vals.iter().enumerate() {
            d[(i, i)] = cr(f(*v));
        }
        Self::symmetrized(&vecs * d * vecs.adjoint())
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.min_eigenvalue() >= -tol
    }
}

/// Real symmetric embedding `[[Re H, -Im H], [Im H, Re H]]`; PSD iff `H` is.
pub fn realify(h: &HermitianMatrix) -> RMat {
    let n = h.dim();
    let m = h.as_matrix();
    let mut out = RMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)];
            out[(i, j)] = z.re;
            out[(i + n, j + n)] = z.re;
            out[(i, j + n)] = -z.im;
            out[(i + n, j)] = z.im;
        }
    }
    out
}

/// Inverse of [`realify`] on matrices of that shape; for a general symmetric
/// input it returns the Hermitian matrix whose embedding is the average of the
/// input over the complex structure.
pub fn complexify(w: &RMat) -> HermitianMatrix {
    let n = w.nrows() / 2;
    let mut m = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let re = 0.5 * (w[(i, j)] + w[(i + n, j + n)]);
            let im = 0.5 * (w[(i + n, j)] - w[(i, j + n)]);
            m[(i, j)] = c(re, im);
        }
    }
    HermitianMatrix::from_hermitian_part(m)
}

/// Smallest eigenvalue of a real symmetric matrix (`+inf` when empty).
pub fn min_eigenvalue_real(m: &RMat) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    let sym = (m + m.transpose()).scale(0.5);
    sym.symmetric_eigen().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Square root of a PSD Hermitian matrix (negative round-off clipped to zero).
pub fn psd_sqrt(h: &HermitianMatrix) -> HermitianMatrix {
    h.map_spectrum(|v| v.max(0.0).sqrt())
}
