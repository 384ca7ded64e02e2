use num_complex::Complex64;

use super::{pencil_is_real, MEMBERSHIP_TOL};
use crate::algebra::{CMat, HermitianTuple, LinearPencil};
use crate::error::{Error, Result};
use crate::sdp::complex::{ComplexSdp, Expr};
use crate::sdp::{SolveStatus, SolverOptions};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Membership {
    pub member: bool,
    pub lambda_min: f64,
}

/// Pointwise test `L(X) ⪰ 0` up to [`MEMBERSHIP_TOL`].
pub fn spectrahedron_membership(l: &LinearPencil, x: &HermitianTuple) -> Result<Membership> {
    if l.h() != 0 {
        return Err(Error::Precondition(
            "pencil has y-variables; use drop_membership for projections".into(),
        ));
    }
    let lambda_min = l.min_eigenvalue_at(x)?;
    Ok(Membership {
        member: lambda_min >= -MEMBERSHIP_TOL,
        lambda_min,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Boundedness {
    /// `Feasible` means a decision was reached; see `bounded`.
    pub status: SolveStatus,
    pub bounded: bool,
    /// A nonzero recession direction of the level-1 set when unbounded.
    pub direction: Option<Vec<f64>>,
}

/// Uniform boundedness of `D_L`. A matrix convex set is bounded iff its
/// first level is, and `D_L(1)` (assumed nonempty) is bounded iff its
/// recession cone `{x : Σ A_j x_j ⪰ 0}` is `{0}`. Each of the `2g` problems
/// looks for a recession direction with `±x_j = 1` inside the unit box.
/// y-variables, if present, are treated as further coordinates.
pub fn is_bounded(l: &LinearPencil, opts: &SolverOptions) -> Result<Boundedness> {
    let flat = l.flatten();
    let g = flat.g();
    let real = pencil_is_real(&flat);
    let mut undecided = None;
    for j in 0..g {
        for sign in [1.0, -1.0] {
            let mut sdp = ComplexSdp::new(real);
            let vars: Vec<_> = (0..g).map(|_| sdp.free_real()).collect();
            let d = flat.size();
            let mut e = Expr::zeros(d, d);
            for (a, (_, xv)) in flat.x_coeffs().iter().zip(&vars) {
                e.add_scaled(&Expr::kron_left(a.as_matrix(), &Expr::scalar(xv)), Complex64::new(1.0, 0.0));
            }
            sdp.psd_constraint("recession", &e);
            sdp.equal_real(&vars[j].1.scaled(Complex64::new(sign, 0.0)), 1.0);
            for (k, (_, xv)) in vars.iter().enumerate() {
                if k == j {
                    continue;
                }
                let mut box_expr = Expr::constant(&CMat::identity(2, 2));
                box_expr.get_mut(0, 0).add_scaled(xv, Complex64::new(-1.0, 0.0));
                box_expr.get_mut(1, 1).add_scaled(xv, Complex64::new(1.0, 0.0));
                sdp.psd_constraint("box", &box_expr);
            }
            let sol = sdp.solve(opts);
            match sol.raw.status {
                SolveStatus::Infeasible => {}
                SolveStatus::Feasible => {
                    let direction = vars.iter().map(|(id, _)| sol.scalar(*id)).collect();
                    return Ok(Boundedness {
                        status: SolveStatus::Feasible,
                        bounded: false,
                        direction: Some(direction),
                    });
                }
                other => {
                    if undecided.is_none() || other == SolveStatus::Error {
                        undecided = Some((other, sol.raw.message.clone()));
                    }
                }
            }
        }
    }
    match undecided {
        None => Ok(Boundedness {
            status: SolveStatus::Feasible,
            bounded: true,
            direction: None,
        }),
        Some((SolveStatus::Error, msg)) => Err(Error::Solver(msg)),
        Some((status, _)) => Ok(Boundedness {
            status,
            bounded: false,
            direction: None,
        }),
    }
}
