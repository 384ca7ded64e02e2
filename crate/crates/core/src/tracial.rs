//! Tracial spectrahedra, tracial and contractively tracial hulls, and the
//! ex situ tracial dual of a free spectrahedron.

use num_complex::Complex64;

use crate::algebra::matrix::{kron, max_abs};
use crate::algebra::{CMat, HermitianMatrix, HermitianTuple};
use crate::cp::{
    add_mode_constraint, all_real, apply_choi, choi_from_witness, choi_image, interpolate, kraus_of_choi,
    ChoiMatrix, Interpolation, InterpolationMode, WITNESS_TOL,
};
use crate::error::{Error, Result};
use crate::sdp::complex::{ComplexSdp, Expr};
use crate::sdp::{SolveStatus, SolverOptions};

/// Slack allowed on `λ_min(T)` and `tr T ≤ 1` of a returned witness.
pub const TRACE_TOL: f64 = 1e-8;

/// `T ⪰ 0` with `tr T ≤ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TracialWitness {
    pub t: HermitianMatrix,
}

impl TracialWitness {
    pub fn new(t: HermitianMatrix) -> Result<Self> {
        if t.min_eigenvalue() < -TRACE_TOL {
            return Err(Error::Precondition("witness is not positive semidefinite".into()));
        }
        if t.trace() > 1.0 + TRACE_TOL {
            return Err(Error::Precondition(format!("witness has trace {} > 1", t.trace())));
        }
        Ok(TracialWitness { t })
    }
}

#[derive(Debug, Clone)]
pub struct TracialMembership {
    pub status: SolveStatus,
    pub witness: Option<TracialWitness>,
    pub margin: f64,
    pub message: String,
}

impl TracialMembership {
    pub fn member(&self) -> bool {
        self.status == SolveStatus::Feasible
    }
}

/// `I ⊗ T − Σ B_j ⊗ Y_j`.
pub fn tracial_lmi(b: &HermitianTuple, y: &HermitianTuple, t: &HermitianMatrix) -> CMat {
    let mut out = kron(&CMat::identity(b.dim(), b.dim()), t.as_matrix());
    for (bj, yj) in b.mats().iter().zip(y.mats()) {
        out -= kron(bj.as_matrix(), yj.as_matrix());
    }
    out
}

/// Is `Y ∈ ℌ_B`, i.e. is there `T ⪰ 0`, `tr T ≤ 1` with
/// `I ⊗ T − Σ B_j ⊗ Y_j ⪰ 0`?
pub fn tracial_membership(b: &HermitianTuple, y: &HermitianTuple, opts: &SolverOptions) -> Result<TracialMembership> {
    if b.g() != y.g() {
        return Err(Error::dims(format!("{} coefficients but a {}-tuple", b.g(), y.g())));
    }
    let (k, m) = (b.dim(), y.dim());
    let real = all_real(b.mats().iter().chain(y.mats()).map(|h| h.as_matrix()));
    let mut sdp = ComplexSdp::new(real);
    let (tid, t) = sdp.psd("T", m);
    let mut budget = Expr::constant(&CMat::identity(1, 1));
    budget.get_mut(0, 0).add_scaled(&t.trace(), Complex64::new(-1.0, 0.0));
    sdp.psd_constraint("trace", &budget);
    let mut lmi = Expr::kron_left(&CMat::identity(k, k), &t);
    let fixed: CMat = b
        .mats()
        .iter()
        .zip(y.mats())
        .fold(CMat::zeros(k * m, k * m), |acc, (bj, yj)| acc - kron(bj.as_matrix(), yj.as_matrix()));
    lmi.add_constant(&fixed);
    sdp.psd_constraint("lmi", &lmi);
    let sol = sdp.solve(opts);
    let raw = &sol.raw;
    if raw.status != SolveStatus::Feasible {
        return Ok(TracialMembership {
            status: raw.status,
            witness: None,
            margin: raw.margin,
            message: raw.message.clone(),
        });
    }
    let t = HermitianMatrix::from_hermitian_part(sol.matrix(tid));
    let lam = HermitianMatrix::from_hermitian_part(tracial_lmi(b, y, &t)).min_eigenvalue();
    match TracialWitness::new(t) {
        Ok(w) if lam >= -WITNESS_TOL => Ok(TracialMembership {
            status: SolveStatus::Feasible,
            witness: Some(w),
            margin: raw.margin,
            message: raw.message.clone(),
        }),
        _ => Ok(TracialMembership {
            status: SolveStatus::Error,
            witness: None,
            margin: raw.margin,
            message: format!("tracial witness failed verification (lmi eigenvalue {lam:.3e})"),
        }),
    }
}

/// Is `B ∈ ℌ_Y^opp`? The defining inequality is the one of [`tracial_membership`]
/// with `T` sized like `Y`.
pub fn opp_tracial_membership(y: &HermitianTuple, b: &HermitianTuple, opts: &SolverOptions) -> Result<TracialMembership> {
    tracial_membership(b, y, opts)
}

/// `B = Φ(A)` for a trace preserving cp `Φ`.
pub fn thull_membership(a: &HermitianTuple, b: &HermitianTuple, opts: &SolverOptions) -> Result<Interpolation> {
    interpolate(a, b, InterpolationMode::Channel, opts)
}

/// `B = Φ(A)` for a trace non-increasing cp `Φ`.
pub fn cthull_membership(a: &HermitianTuple, b: &HermitianTuple, opts: &SolverOptions) -> Result<Interpolation> {
    interpolate(a, b, InterpolationMode::Operation, opts)
}

/// Membership of `B` in the hull of a finite set of tuples. The hull is the
/// union of the hulls of its elements (not convex in general), so each
/// generator is tried in turn. Returns the index of the first generator
/// that works, with its interpolation.
pub fn hull_of_set_membership(
    generators: &[HermitianTuple],
    b: &HermitianTuple,
    mode: InterpolationMode,
    opts: &SolverOptions,
) -> Result<(Option<usize>, Vec<Interpolation>)> {
    if !matches!(mode, InterpolationMode::Channel | InterpolationMode::Operation) {
        return Err(Error::Precondition("finite-set hulls take CHANNEL or OPERATION".into()));
    }
    let mut all = Vec::with_capacity(generators.len());
    for (i, a) in generators.iter().enumerate() {
        let r = interpolate(a, b, mode, opts)?;
        let hit = r.status == SolveStatus::Feasible;
        all.push(r);
        if hit {
            return Ok((Some(i), all));
        }
    }
    Ok((None, all))
}

/// `Y = Ψ(Ω)` for a cp `Ψ` with `tr Choi(Ψ) = tr Ψ(I) ≤ 1`, that is
/// `Y = Σ C_ℓ* Ω C_ℓ` with `tr Σ C_ℓ* C_ℓ ≤ 1`.
pub fn exsitu_dual_membership(omega: &HermitianTuple, y: &HermitianTuple, opts: &SolverOptions) -> Result<Interpolation> {
    if omega.g() != y.g() {
        return Err(Error::dims(format!("{} coefficients but a {}-tuple", omega.g(), y.g())));
    }
    let (d, m) = (omega.dim(), y.dim());
    let real = all_real(omega.mats().iter().chain(y.mats()).map(|h| h.as_matrix()));
    let mut sdp = ComplexSdp::new(real);
    let (cid, choi) = sdp.psd("C", d * m);
    for (o, yj) in omega.mats().iter().zip(y.mats()) {
        let e = choi_image(&choi, d, m, o.as_matrix());
        sdp.equal_hermitian(&e, yj.as_matrix());
    }
    add_mode_constraint(&mut sdp, &choi, d, m, InterpolationMode::Cp);
    let mut budget = Expr::constant(&CMat::identity(1, 1));
    budget.get_mut(0, 0).add_scaled(&choi.trace(), Complex64::new(-1.0, 0.0));
    sdp.psd_constraint("trace", &budget);
    let sol = sdp.solve(opts);
    let raw = &sol.raw;
    if raw.status != SolveStatus::Feasible {
        return Ok(Interpolation {
            status: raw.status,
            choi: None,
            margin: raw.margin,
            residual: f64::NAN,
            message: raw.message.clone(),
        });
    }
    let ch = choi_from_witness(d, m, sol.matrix(cid));
    let mut residual = (ch.matrix().trace() - 1.0).max(0.0);
    for (o, yj) in omega.mats().iter().zip(y.mats()) {
        let img = apply_choi(&ch, o.as_matrix())?;
        residual = residual.max(max_abs(&(img - yj.as_matrix())));
    }
    if residual > WITNESS_TOL || ch.min_eigenvalue() < -WITNESS_TOL {
        return Ok(Interpolation {
            status: SolveStatus::Error,
            choi: None,
            margin: raw.margin,
            residual,
            message: format!("witness failed verification (residual {residual:.3e})"),
        });
    }
    Ok(Interpolation {
        status: SolveStatus::Feasible,
        choi: Some(ch),
        margin: raw.margin,
        residual,
        message: raw.message.clone(),
    })
}

/// `Y = S M S` with `S ⪰ 0`, `tr S² ≤ 1`, and `M = V*(I ⊗ Ω)V` for a
/// contraction `V`.
#[derive(Debug, Clone)]
pub struct SmsFactor {
    pub s: HermitianMatrix,
    pub m: HermitianTuple,
    /// Stacked Kraus blocks of `M`, `μd × m`.
    pub v: CMat,
    pub mu: usize,
}

/// Reads an `S M S` factorization off an ex situ dual witness: `S² = Ψ(I)`
/// and `M_j = S⁺ Y_j S⁺`, so `V = [C_ℓ S⁺]` has `V*V` equal to the range
/// projection of `S`.
pub fn sms_factor(ch: &ChoiMatrix, omega: &HermitianTuple, rank_tol: f64) -> Result<SmsFactor> {
    let (d, m) = (ch.n(), ch.m());
    if omega.dim() != d {
        return Err(Error::dims(format!("Choi matrix for M_{d} but Ω of size {}", omega.dim())));
    }
    let s2 = HermitianMatrix::from_hermitian_part(ch.image_of_identity());
    let (vals, vecs) = s2.eigen();
    let top = vals.iter().cloned().fold(0.0, f64::max);
    let mut s = CMat::zeros(m, m);
    let mut s_pinv = CMat::zeros(m, m);
    for (i, &l) in vals.iter().enumerate() {
        if l > rank_tol * top.max(1.0) {
            let v = vecs.column(i);
            let p = v * v.adjoint();
            s += &p * Complex64::new(l.sqrt(), 0.0);
            s_pinv += p * Complex64::new(1.0 / l.sqrt(), 0.0);
        }
    }
    let kraus = kraus_of_choi(ch, rank_tol)?;
    let mu = kraus.len();
    let mut v = CMat::zeros(mu * d, m);
    for (k, op) in kraus.ops().iter().enumerate() {
        v.view_mut((k * d, 0), (d, m)).copy_from(&(op * &s_pinv));
    }
    let big = |o: &HermitianMatrix| kron(&CMat::identity(mu, mu), o.as_matrix());
    let mats = omega
        .mats()
        .iter()
        .map(|o| HermitianMatrix::from_hermitian_part(v.adjoint() * big(o) * &v))
        .collect();
    Ok(SmsFactor {
        s: HermitianMatrix::from_hermitian_part(s),
        m: HermitianTuple::new(m, mats)?,
        v,
        mu,
    })
}

impl SmsFactor {
    /// `S M_j S`.
    pub fn recombine(&self) -> HermitianTuple {
        let s = self.s.as_matrix();
        let mats = self
            .m
            .mats()
            .iter()
            .map(|mj| HermitianMatrix::from_hermitian_part(s * mj.as_matrix() * s))
            .collect();
        HermitianTuple::new(self.s.dim(), mats).expect("sizes agree")
    }
}

/// Necessary condition for `B ∈ K^▷`: every listed sample point of `K`
/// lies in `ℌ_B`. Only a finite sample is checked, so `true` does not prove
/// membership. Returns the index of the first failing sample, if any.
pub fn insitu_sample_check(b: &HermitianTuple, sample: &[HermitianTuple], opts: &SolverOptions) -> Result<Option<usize>> {
    for (i, y) in sample.iter().enumerate() {
        if !tracial_membership(b, y, opts)?.member() {
            return Ok(Some(i));
        }
    }
    Ok(None)
}
