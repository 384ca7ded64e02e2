//! Reference objects used by the tests, the corpus generator, and the
//! dual-grid report.

use crate::algebra::matrix::{c, cmat_real};
use crate::algebra::{CMat, HermitianMatrix, HermitianTuple, LinearPencil, NCPolynomial};
use crate::free::{monicize, Spectrahedrop};

fn sym(n: usize, entries: &[(usize, usize, f64)]) -> HermitianMatrix {
    let mut m = CMat::zeros(n, n);
    for &(i, j, v) in entries {
        m[(i, j)] = c(v, 0.0);
        m[(j, i)] = c(v, 0.0);
    }
    HermitianMatrix::new(m).expect("symmetric by construction")
}

/// Lift of the bent TV screen `{1 − x₁² − x₂⁴ ⪰ 0}`:
/// `[[1, 0, x₁], [0, 1, y], [x₁, y, 1]] ⊕ [[1, x₂], [x₂, y]]`.
pub fn tv_lift() -> LinearPencil {
    let constant = sym(5, &[(0, 0, 1.0), (1, 1, 1.0), (2, 2, 1.0), (3, 3, 1.0)]);
    let x1 = sym(5, &[(0, 2, 1.0)]);
    let x2 = sym(5, &[(3, 4, 1.0)]);
    let y = sym(5, &[(1, 2, 1.0), (4, 4, 1.0)]);
    LinearPencil::new(constant, vec![x1, x2], vec![y]).expect("sizes agree")
}

/// [`tv_lift`] translated to the interior point `(0, 0, ½)`; the projected
/// set is unchanged since the shift is in `y` only.
pub fn tv_monic_drop() -> Spectrahedrop {
    let m = monicize(&tv_lift(), &[0.0, 0.0, 0.5]).expect("(0, 0, 1/2) is interior");
    Spectrahedrop::new(m.pencil)
}

/// `1 − x₁² − x₂⁴`.
pub fn tv_polynomial() -> NCPolynomial {
    NCPolynomial::scalar(2, &[(1.0, &[]), (-1.0, &[0, 0]), (-1.0, &[1, 1, 1, 1])]).expect("valid")
}

/// Polynomial whose sign describes the level-1 polar dual of the TV screen:
/// positive inside, negative outside.
pub fn tv_dual_q(c1: f64, c2: f64) -> f64 {
    let (a2, b4) = (c1 * c1, c2.powi(4));
    let a4 = a2 * a2;
    let a6 = a4 * a2;
    let a8 = a4 * a4;
    -16.0 * a8 + 48.0 * a6 - 48.0 * a4 - 8.0 * a4 * b4 + 16.0 * a2 - 20.0 * a2 * b4 - b4 * b4 + b4
}

/// Whether `(c1, c2)` is too close to the zero set of [`tv_dual_q`] for a
/// sign comparison to be meaningful: either `q` itself is tiny, or it changes
/// sign on the circle of the given radius around the point.
pub fn near_tv_dual_boundary(c1: f64, c2: f64, radius: f64) -> bool {
    let q0 = tv_dual_q(c1, c2);
    if q0.abs() < 1e-12 {
        return true;
    }
    (0..64).any(|k| {
        let th = std::f64::consts::TAU * k as f64 / 64.0;
        let q = tv_dual_q(c1 + radius * th.cos(), c2 + radius * th.sin());
        q.signum() != q0.signum() || q == 0.0
    })
}

/// The `c1 × c2` grid used by the dual-grid report: `n` points per axis over
/// `[−r, r]`.
pub fn dual_grid(n: usize, r: f64) -> Vec<(f64, f64)> {
    let step = if n > 1 { 2.0 * r / (n - 1) as f64 } else { 0.0 };
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push((-r + step * i as f64, -r + step * j as f64));
        }
    }
    out
}

/// Scalar pencil `a0 + a1 x`.
pub fn scalar_pencil(a0: f64, a1: f64) -> LinearPencil {
    LinearPencil::new(HermitianMatrix::scalar(a0), vec![HermitianMatrix::scalar(a1)], vec![]).expect("1x1")
}

/// Free interval `[−1, 1]` as the monic pencil `I − diag(1, −1) x`.
pub fn free_interval() -> LinearPencil {
    LinearPencil::monic_from(&HermitianTuple::from_mats(vec![HermitianMatrix::diag(&[1.0, -1.0])]).expect("g = 1"))
}

/// Level-1 interval `[lo, hi]` (with `lo < 0 < hi`) as a monic pencil.
pub fn interval(lo: f64, hi: f64) -> LinearPencil {
    LinearPencil::monic_from(&HermitianTuple::from_mats(vec![HermitianMatrix::diag(&[1.0 / hi, 1.0 / lo])]).expect("g = 1"))
}

/// Free cube `{‖X_j‖ ≤ r}` in `g` variables.
pub fn free_cube(g: usize, r: f64) -> LinearPencil {
    let mats = (0..g)
        .map(|j| {
            let mut d = vec![0.0; 2 * g];
            d[2 * j] = 1.0 / r;
            d[2 * j + 1] = -1.0 / r;
            HermitianMatrix::diag(&d)
        })
        .collect();
    LinearPencil::monic_from(&HermitianTuple::from_mats(mats).expect("g >= 1"))
}

pub fn pauli_x() -> CMat {
    cmat_real(2, 2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn pauli_y() -> CMat {
    CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

pub fn pauli_z() -> CMat {
    cmat_real(2, 2, &[1.0, 0.0, 0.0, -1.0])
}

/// Operator-system data with a cp interpolant (conjugation by
/// `diag(√½, √(3/2))`) but no trace non-increasing one:
/// `(I, σx, σy) ↦ (diag(½, 3/2), (√3/2)σx, (√3/2)σy)`.
pub fn no_tracial_extension() -> (HermitianTuple, HermitianTuple) {
    let s = 3f64.sqrt() / 2.0;
    let h = |m: CMat| HermitianMatrix::new(m).expect("Hermitian");
    let a = HermitianTuple::from_mats(vec![HermitianMatrix::identity(2), h(pauli_x()), h(pauli_y())]).expect("2x2");
    let b = HermitianTuple::from_mats(vec![
        HermitianMatrix::diag(&[0.5, 1.5]),
        h(pauli_x() * c(s, 0.0)),
        h(pauli_y() * c(s, 0.0)),
    ])
    .expect("2x2");
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::HermitianTuple;

    #[test]
    fn tv_lift_projects_to_screen_at_sample_points() {
        let l = tv_lift();
        // (0.9, 0.5) with y = 0.3
        let v = l
            .evaluate(&HermitianTuple::scalars(&[0.9, 0.5]), Some(&HermitianTuple::scalars(&[0.3])))
            .unwrap();
        assert!(v.min_eigenvalue() >= 0.0);
        assert!(tv_monic_drop().lift().is_monic());
    }

    #[test]
    fn q_signs() {
        assert!((tv_dual_q(0.5, 0.5) - 1.40234375).abs() < 1e-12);
        assert!(tv_dual_q(1.2, 0.0) < 0.0);
        assert!((tv_dual_q(1.2, 0.0) + 16.0 * 1.44 * 0.44f64.powi(3)).abs() < 1e-9);
        assert!(near_tv_dual_boundary(0.0, 0.0, 1e-3));
        assert!(!near_tv_dual_boundary(0.5, 0.5, 1e-3));
    }

    #[test]
    fn interval_pencil() {
        let l = interval(-1.0, 0.5);
        assert!(l.min_eigenvalue_at(&HermitianTuple::scalars(&[0.5])).unwrap().abs() < 1e-15);
        assert!(l.min_eigenvalue_at(&HermitianTuple::scalars(&[-1.0])).unwrap().abs() < 1e-15);
        assert!(l.min_eigenvalue_at(&HermitianTuple::scalars(&[0.6])).unwrap() < 0.0);
    }
}
