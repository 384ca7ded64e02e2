use num_complex::Complex64;

use super::spectrahedron::is_bounded;
use crate::algebra::matrix::max_abs;
use crate::algebra::{kron, CMat, HermitianMatrix, HermitianTuple, LinearPencil};
use crate::cp::{add_mode_constraint, choi_from_witness, choi_image, kraus_of_choi, InterpolationMode, WITNESS_TOL};
use crate::error::{Error, Result};
use crate::sdp::complex::{ComplexSdp, Expr};
use crate::sdp::{SolveStatus, SolverOptions};

/// Relative eigenvalue cutoff when reading Kraus operators off a solver Choi
/// matrix.
const KRAUS_RANK_TOL: f64 = 1e-8;

/// `A_j = V*(I_μ ⊗ B_j)V` with `S_square = I − V*V ⪰ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct DominationCertificate {
    /// `μ·d_B × d_A`, the stacked blocks `V_1, …, V_μ`.
    pub v: CMat,
    pub mu: usize,
    pub s_square: CMat,
}

impl DominationCertificate {
    /// `V*(I_μ ⊗ B)V`.
    pub fn apply(&self, b: &CMat) -> CMat {
        let big = kron(&CMat::identity(self.mu, self.mu), b);
        self.v.adjoint() * big * &self.v
    }

    /// Largest deviation of `V*(I_μ ⊗ B_j)V` from `A_j`.
    pub fn residual(&self, sources: &[HermitianMatrix], targets: &[HermitianMatrix]) -> f64 {
        sources
            .iter()
            .zip(targets)
            .map(|(b, a)| max_abs(&(self.apply(b.as_matrix()) - a.as_matrix())))
            .fold(0.0, f64::max)
    }

    pub fn min_slack_eigenvalue(&self) -> f64 {
        HermitianMatrix::from_hermitian_part(self.s_square.clone()).min_eigenvalue()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DominationForm {
    /// `V*V ⪯ I`; always sound.
    Contraction,
    /// `V*V = I`.
    Isometry,
    /// Isometry when the dominated spectrahedron is bounded, else contraction.
    #[default]
    Auto,
}

#[derive(Debug, Clone)]
pub struct Domination {
    pub status: SolveStatus,
    pub certificate: Option<DominationCertificate>,
    pub margin: f64,
    /// Form actually imposed.
    pub form: DominationForm,
    pub message: String,
}

impl Domination {
    pub fn holds(&self) -> bool {
        self.status == SolveStatus::Feasible
    }
}

/// Searches for a cp `Φ: M_d → M_n` with `Φ(S_j) = T_j`, `Φ(Z_k) = 0`, and
/// `Φ(I) ⪯ I` (contraction) or `Φ(I) = I` (isometry); the Kraus operators
/// of `Φ` stack into the certificate.
pub(crate) fn cp_certificate(
    sources: &[HermitianMatrix],
    targets: &[HermitianMatrix],
    annihilated: &[HermitianMatrix],
    d: usize,
    n: usize,
    form: DominationForm,
    opts: &SolverOptions,
) -> Result<Domination> {
    let real = sources
        .iter()
        .chain(targets)
        .chain(annihilated)
        .all(super::is_real);
    let mut sdp = ComplexSdp::new(real);
    let (cid, choi) = sdp.psd("C", d * n);
    for (s, t) in sources.iter().zip(targets) {
        let e = choi_image(&choi, d, n, s.as_matrix());
        sdp.equal_hermitian(&e, t.as_matrix());
    }
    for z in annihilated {
        let e = choi_image(&choi, d, n, z.as_matrix());
        sdp.equal_hermitian(&e, &CMat::zeros(n, n));
    }
    match form {
        DominationForm::Isometry => add_mode_constraint(&mut sdp, &choi, d, n, InterpolationMode::Unital),
        _ => {
            let mut slack = Expr::constant(&CMat::identity(n, n));
            slack.add_scaled(&choi_image(&choi, d, n, &CMat::identity(d, d)), Complex64::new(-1.0, 0.0));
            sdp.psd_constraint("contraction", &slack);
        }
    }
    let sol = sdp.solve(opts);
    let raw = &sol.raw;
    if raw.status != SolveStatus::Feasible {
        return Ok(Domination {
            status: raw.status,
            certificate: None,
            margin: raw.margin,
            form,
            message: raw.message.clone(),
        });
    }
    let ch = choi_from_witness(d, n, sol.matrix(cid));
    let kraus = kraus_of_choi(&ch, KRAUS_RANK_TOL)?;
    let mu = kraus.len();
    let mut v = CMat::zeros(mu * d, n);
    for (k, op) in kraus.ops().iter().enumerate() {
        v.view_mut((k * d, 0), (d, n)).copy_from(op);
    }
    let s_square = CMat::identity(n, n) - v.adjoint() * &v;
    let cert = DominationCertificate { v, mu, s_square };
    let zero = vec![HermitianMatrix::zeros(n); annihilated.len()];
    let residual = cert
        .residual(sources, targets)
        .max(cert.residual(annihilated, &zero))
        .max(if form == DominationForm::Isometry { max_abs(&cert.s_square) } else { 0.0 });
    if residual > WITNESS_TOL || cert.min_slack_eigenvalue() < -1e-8 {
        return Ok(Domination {
            status: SolveStatus::Error,
            certificate: None,
            margin: raw.margin,
            form,
            message: format!("certificate failed verification (residual {residual:.3e})"),
        });
    }
    Ok(Domination {
        status: SolveStatus::Feasible,
        certificate: Some(cert),
        margin: raw.margin,
        form,
        message: raw.message.clone(),
    })
}

fn check_monic(l: &LinearPencil, name: &str) -> Result<()> {
    if !l.is_monic() {
        return Err(Error::NotMonic(format!("{name} has constant term other than I")));
    }
    if l.h() != 0 {
        return Err(Error::Precondition(format!("{name} has y-variables")));
    }
    Ok(())
}

/// Does `D_{LB} ⊆ D_{LA}` hold? Decided through a linear certificate
/// `LA = V*(I_μ ⊗ LB)V + S` on the x-coefficients.
pub fn dominates(
    la: &LinearPencil,
    lb: &LinearPencil,
    form: DominationForm,
    opts: &SolverOptions,
) -> Result<Domination> {
    check_monic(la, "dominating pencil")?;
    check_monic(lb, "dominated pencil")?;
    if la.g() != lb.g() {
        return Err(Error::dims(format!("pencils in {} and {} variables", la.g(), lb.g())));
    }
    let form = match form {
        DominationForm::Auto => {
            if is_bounded(lb, opts)?.bounded {
                DominationForm::Isometry
            } else {
                DominationForm::Contraction
            }
        }
        f => f,
    };
    cp_certificate(lb.x_coeffs(), la.x_coeffs(), &[], lb.size(), la.size(), form, opts)
}

/// Is `X` in the polar dual of `D_{𝔏_Ω}`? Same as `D_{𝔏_Ω} ⊆ D_{𝔏_X}`; the
/// certificate gives `X_j = V*(I_μ ⊗ Ω_j)V` with `V` a contraction.
pub fn polar_membership(omega: &HermitianTuple, x: &HermitianTuple, opts: &SolverOptions) -> Result<Domination> {
    if omega.g() != x.g() {
        return Err(Error::dims(format!("{} coefficients but a {}-tuple", omega.g(), x.g())));
    }
    cp_certificate(
        omega.mats(),
        x.mats(),
        &[],
        omega.dim(),
        x.dim(),
        DominationForm::Contraction,
        opts,
    )
}
