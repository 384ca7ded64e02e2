//! Free spectrahedra, spectrahedrops, their polar duals, and domination.

mod domination;
mod drop;
mod spectrahedron;

pub use domination::{dominates, polar_membership, DominationCertificate, DominationForm, Domination};
pub use drop::{
    drop_membership, drop_polar_membership, hull_of_union, monicize, polar_dual_lift, DropMembership, Monicized,
    PolarForm, Spectrahedrop,
};
pub use spectrahedron::{is_bounded, spectrahedron_membership, Boundedness, Membership};

use crate::algebra::{CMat, HermitianMatrix, HermitianTuple, LinearPencil};
use crate::sdp::complex::Expr;

/// Tolerance on `λ_min` for pointwise spectrahedron membership.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// `A0 ⊗ I + Σ A_j ⊗ X_j + Σ Γ_k ⊗ Y_k` with `X` fixed and `Y` unknown.
pub(crate) fn pencil_expr(l: &LinearPencil, x: &HermitianTuple, ys: &[Expr]) -> Expr {
    let fixed = l
        .x_coeffs()
        .iter()
        .zip(x.mats())
        .fold(crate::algebra::kron(l.constant().as_matrix(), &CMat::identity(x.dim(), x.dim())), |acc, (a, xj)| {
            acc + crate::algebra::kron(a.as_matrix(), xj.as_matrix())
        });
    let mut e = Expr::constant(&fixed);
    for (gk, yk) in l.y_coeffs().iter().zip(ys) {
        e.add_scaled(&Expr::kron_left(gk.as_matrix(), yk), num_complex::Complex64::new(1.0, 0.0));
    }
    e.compact();
    e
}

pub(crate) fn pencil_is_real(l: &LinearPencil) -> bool {
    std::iter::once(l.constant())
        .chain(l.x_coeffs())
        .chain(l.y_coeffs())
        .all(is_real)
}

pub(crate) fn is_real(h: &HermitianMatrix) -> bool {
    h.as_matrix().iter().all(|z| z.im == 0.0)
}
