use super::domination::{cp_certificate, Domination, DominationForm};
use super::spectrahedron::is_bounded;
use super::{is_real, pencil_expr, pencil_is_real};
use crate::algebra::matrix::{c, cr, unit};
use crate::algebra::{CMat, HermitianMatrix, HermitianTuple, LinearPencil};
use crate::error::{Error, Result};
use crate::sdp::complex::{ComplexSdp, Expr};
use crate::sdp::{SolveStatus, SolverOptions};

/// `{X : ∃Y, L(X, Y) ⪰ 0 and E_i(X, Y) = 0}`, the x-projection of a
/// spectrahedron cut by affine equalities. Without equalities this is an
/// ordinary free spectrahedrop; with `h = 0` a free spectrahedron.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrahedrop {
    lift: LinearPencil,
    equalities: Vec<LinearPencil>,
}

impl Spectrahedrop {
    pub fn new(lift: LinearPencil) -> Self {
        Spectrahedrop {
            lift,
            equalities: Vec::new(),
        }
    }

    pub fn with_equalities(lift: LinearPencil, equalities: Vec<LinearPencil>) -> Result<Self> {
        for e in &equalities {
            if e.g() != lift.g() || e.h() != lift.h() {
                return Err(Error::dims(format!(
                    "equality pencil in ({}, {}) variables, lift in ({}, {})",
                    e.g(),
                    e.h(),
                    lift.g(),
                    lift.h()
                )));
            }
        }
        Ok(Spectrahedrop { lift, equalities })
    }

    pub fn lift(&self) -> &LinearPencil {
        &self.lift
    }

    pub fn equalities(&self) -> &[LinearPencil] {
        &self.equalities
    }

    pub fn g(&self) -> usize {
        self.lift.g()
    }

    pub fn h(&self) -> usize {
        self.lift.h()
    }

    fn is_real(&self) -> bool {
        pencil_is_real(&self.lift) && self.equalities.iter().all(pencil_is_real)
    }
}

#[derive(Debug, Clone)]
pub struct DropMembership {
    pub status: SolveStatus,
    /// The y-witness when `status` is FEASIBLE.
    pub witness: Option<HermitianTuple>,
    pub margin: f64,
    /// `λ_min(L(X, Y))` at the witness.
    pub lambda_min: f64,
    pub message: String,
}

impl DropMembership {
    pub fn member(&self) -> bool {
        self.status == SolveStatus::Feasible
    }
}

/// Searches for Hermitian `Y_1..Y_h` of the size of `X` with `L(X, Y) ⪰ 0`.
pub fn drop_membership(k: &Spectrahedrop, x: &HermitianTuple, opts: &SolverOptions) -> Result<DropMembership> {
    if x.g() != k.g() {
        return Err(Error::dims(format!("drop in {} variables, point has {}", k.g(), x.g())));
    }
    let n = x.dim();
    if k.h() == 0 && k.equalities.is_empty() {
        let l = k.lift.evaluate(x, None)?.min_eigenvalue();
        let member = l >= -super::MEMBERSHIP_TOL;
        return Ok(DropMembership {
            status: if member { SolveStatus::Feasible } else { SolveStatus::Infeasible },
            witness: member.then(|| HermitianTuple::zeros(0, n)),
            margin: l,
            lambda_min: l,
            message: String::new(),
        });
    }
    let real = k.is_real() && x.mats().iter().all(is_real);
    let mut sdp = ComplexSdp::new(real);
    let ys: Vec<_> = (0..k.h()).map(|_| sdp.free_hermitian(n)).collect();
    let exprs: Vec<Expr> = ys.iter().map(|(_, e)| e.clone()).collect();
    sdp.psd_constraint("lift", &pencil_expr(&k.lift, x, &exprs));
    for e in &k.equalities {
        let ex = pencil_expr(e, x, &exprs);
        sdp.equal_hermitian(&ex, &CMat::zeros(ex.shape().0, ex.shape().1));
    }
    let sol = sdp.solve(opts);
    if sol.raw.status != SolveStatus::Feasible {
        return Ok(DropMembership {
            status: sol.raw.status,
            witness: None,
            margin: sol.raw.margin,
            lambda_min: f64::NAN,
            message: sol.raw.message.clone(),
        });
    }
    let witness = HermitianTuple::new(
        n,
        ys.iter()
            .map(|(id, _)| HermitianMatrix::from_hermitian_part(sol.matrix(*id)))
            .collect(),
    )?;
    let lambda_min = k.lift.evaluate(x, Some(&witness))?.min_eigenvalue();
    let eq_residual = k
        .equalities
        .iter()
        .map(|e| e.evaluate(x, Some(&witness)).map(|v| crate::algebra::matrix::max_abs(v.as_matrix())))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    if lambda_min < -1e-7 || eq_residual > 1e-6 {
        return Ok(DropMembership {
            status: SolveStatus::Error,
            witness: None,
            margin: sol.raw.margin,
            lambda_min,
            message: format!("witness failed verification (λ_min {lambda_min:.3e}, equality residual {eq_residual:.3e})"),
        });
    }
    Ok(DropMembership {
        status: SolveStatus::Feasible,
        witness: Some(witness),
        margin: sol.raw.margin,
        lambda_min,
        message: sol.raw.message.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolarForm {
    /// Contractive cp map on the unpadded data; valid for every monic lift.
    #[default]
    Contraction,
    /// Unital cp map; requires a bounded lift.
    Bounded,
}

/// Is `A` in the polar dual of the drop? Decided as `(A, 0) ∈ D_𝔏°`, i.e. a
/// cp `Φ` with `Φ(Ω_j) = A_j`, `Φ(Γ_k) = 0`, and `Φ(I) ⪯ I` (or `= I` in the
/// bounded form).
pub fn drop_polar_membership(
    k: &Spectrahedrop,
    a: &HermitianTuple,
    form: PolarForm,
    opts: &SolverOptions,
) -> Result<Domination> {
    if !k.lift.is_monic() {
        return Err(Error::NotMonic("drop lift has constant term other than I".into()));
    }
    if !k.equalities.is_empty() {
        return Err(Error::Precondition("polar duals of drops with equality constraints are not supported".into()));
    }
    if a.g() != k.g() {
        return Err(Error::dims(format!("drop in {} variables, point has {}", k.g(), a.g())));
    }
    let dform = match form {
        PolarForm::Contraction => DominationForm::Contraction,
        PolarForm::Bounded => {
            let b = is_bounded(&k.lift, opts)?;
            if !b.bounded {
                return Err(Error::Precondition("bounded polar form requested for an unbounded lift".into()));
            }
            DominationForm::Isometry
        }
    };
    let omega = k.lift.omega();
    let gamma = k.lift.gamma();
    cp_certificate(omega.mats(), a.mats(), gamma.mats(), k.lift.size(), a.dim(), dform, opts)
}

/// Monic pencil `L0^{-1/2} L(· + x̂) L0^{-1/2}` and the translation `x̂`.
#[derive(Debug, Clone, PartialEq)]
pub struct Monicized {
    pub pencil: LinearPencil,
    /// The point `x̂` (x then y coordinates); `D_𝔏 = D_L − x̂`.
    pub shift: Vec<f64>,
}

impl Monicized {
    /// The x-part of the shift, which is what the projected drop moves by.
    pub fn x_shift(&self) -> &[f64] {
        &self.shift[..self.pencil.g()]
    }
}

/// Translates `L` to a strictly feasible point `x̂ ∈ ℝ^{g+h}` and normalizes
/// the constant term to `I`.
pub fn monicize(l: &LinearPencil, xhat: &[f64]) -> Result<Monicized> {
    if xhat.len() != l.g() + l.h() {
        return Err(Error::dims(format!(
            "shift has {} coordinates, pencil has {} variables",
            xhat.len(),
            l.g() + l.h()
        )));
    }
    let mut l0 = l.constant().clone();
    for (a, &t) in l.x_coeffs().iter().chain(l.y_coeffs()).zip(xhat) {
        l0 = l0.add(&a.scale(t));
    }
    let lmin = l0.min_eigenvalue();
    if lmin < 1e-8 {
        return Err(Error::NotStrictlyFeasible(lmin));
    }
    let inv_sqrt = l0.map_spectrum(|v| 1.0 / v.sqrt());
    let u = inv_sqrt.as_matrix();
    let pencil = LinearPencil::new(
        HermitianMatrix::identity(l.size()),
        l.x_coeffs().iter().map(|a| a.congruence(u)).collect(),
        l.y_coeffs().iter().map(|a| a.congruence(u)).collect(),
    )?;
    Ok(Monicized {
        pencil,
        shift: xhat.to_vec(),
    })
}

/// `(Ê_pq, Ě_pq)`: real and imaginary parts of the matrix unit, so that
/// `E_pq = Ê_pq + iĚ_pq` with both Hermitian.
fn unit_parts(d: usize, p: usize, q: usize) -> (HermitianMatrix, HermitianMatrix) {
    let e = unit(d, d, p, q);
    let et = unit(d, d, q, p);
    let hat = (&e + &et) * cr(0.5);
    let check = (&e - &et) * c(0.0, -0.5);
    (
        HermitianMatrix::from_hermitian_part(hat),
        HermitianMatrix::from_hermitian_part(check),
    )
}

/// Lift of `{A : (A, 0) ∈ D_𝔏°}` for the monic pencil `𝔏 = I − ΣΩ_j x_j −
/// ΣΓ_k y_k`, in the unital (bounded) form. The y-variables are the
/// Hermitian parts `Ĉ_pq, Č_pq` (index `2(p·d + q)` and `2(p·d + q) + 1`)
/// of the Choi blocks of a unital cp map with `Ω_j ↦ A_j` and `Γ_k ↦ 0`.
/// The lift holds the PSD part of the Choi matrix; its skew part, the
/// unitality, interpolation and annihilation constraints are equalities.
/// For an unbounded `D_𝔏`, pass `Ω ⊕ 0` and `Γ ⊕ 0`.
pub fn polar_dual_lift(omega: &HermitianTuple, gamma: &HermitianTuple) -> Result<Spectrahedrop> {
    if gamma.g() > 0 && gamma.dim() != omega.dim() {
        return Err(Error::dims(format!(
            "Ω has size {}, Γ has size {}",
            omega.dim(),
            gamma.dim()
        )));
    }
    let d = omega.dim();
    let g = omega.g();
    let nh = 2 * d * d;
    let idx = |p: usize, q: usize| 2 * (p * d + q);

    // PSD part: Σ Ê_pq ⊗ Ĉ_pq − Ě_pq ⊗ Č_pq ⪰ 0
    let zero_d = HermitianMatrix::zeros(d);
    let mut psd_y = vec![zero_d.clone(); nh];
    let mut skew_y = vec![zero_d.clone(); nh];
    for p in 0..d {
        for q in 0..d {
            let (hat, check) = unit_parts(d, p, q);
            psd_y[idx(p, q)] = hat.clone();
            psd_y[idx(p, q) + 1] = check.scale(-1.0);
            // skew part: Σ Ê_pq ⊗ Č_pq + Ě_pq ⊗ Ĉ_pq = 0
            skew_y[idx(p, q) + 1] = hat;
            skew_y[idx(p, q)] = check;
        }
    }
    let lift = LinearPencil::new(zero_d.clone(), vec![zero_d.clone(); g], psd_y)?;
    let skew = LinearPencil::new(zero_d, vec![HermitianMatrix::zeros(d); g], skew_y)?;

    // scalar equalities, stacked on a diagonal
    let rows = 1 + 2 * g + 2 * gamma.g();
    let mut constant = vec![0.0; rows];
    let mut xc = vec![vec![0.0; rows]; g];
    let mut yc = vec![vec![0.0; rows]; nh];
    // unitality: Σ Ĉ_pp = I
    constant[0] = -1.0;
    for p in 0..d {
        yc[idx(p, p)][0] = 1.0;
    }
    let mut row = 1;
    let push_pair = |w: &CMat, target: Option<usize>, row: &mut usize, xc: &mut Vec<Vec<f64>>, yc: &mut Vec<Vec<f64>>| {
        // Σ ŵ Ĉ − w̌ Č = A_ℓ (or 0)  and  Σ ŵ Č + w̌ Ĉ = 0
        for p in 0..d {
            for q in 0..d {
                let z = w[(p, q)];
                yc[idx(p, q)][*row] += z.re;
                yc[idx(p, q) + 1][*row] -= z.im;
                yc[idx(p, q) + 1][*row + 1] += z.re;
                yc[idx(p, q)][*row + 1] += z.im;
            }
        }
        if let Some(l) = target {
            xc[l][*row] = -1.0;
        }
        *row += 2;
    };
    for (l, om) in omega.mats().iter().enumerate() {
        push_pair(om.as_matrix(), Some(l), &mut row, &mut xc, &mut yc);
    }
    for gm in gamma.mats() {
        push_pair(gm.as_matrix(), None, &mut row, &mut xc, &mut yc);
    }
    let scalars = LinearPencil::new(
        HermitianMatrix::diag(&constant),
        xc.iter().map(|v| HermitianMatrix::diag(v)).collect(),
        yc.iter().map(|v| HermitianMatrix::diag(v)).collect(),
    )?;
    Spectrahedrop::with_equalities(lift, vec![skew, scalars])
}

/// Coefficient accumulator for a pencil block over a fixed variable list.
struct BlockBuilder {
    constant: CMat,
    coeffs: Vec<CMat>,
}

impl BlockBuilder {
    fn new(size: usize, nvars: usize) -> Self {
        BlockBuilder {
            constant: CMat::zeros(size, size),
            coeffs: vec![CMat::zeros(size, size); nvars],
        }
    }

    fn add(&mut self, var: usize, m: &CMat, s: f64) {
        self.coeffs[var] += m * cr(s);
    }
}

fn assemble(blocks: Vec<BlockBuilder>, g: usize) -> LinearPencil {
    let total: usize = blocks.iter().map(|b| b.constant.nrows()).sum();
    let nvars = blocks.first().map_or(0, |b| b.coeffs.len());
    let mut constant = CMat::zeros(total, total);
    let mut coeffs = vec![CMat::zeros(total, total); nvars];
    let mut off = 0;
    for b in &blocks {
        let s = b.constant.nrows();
        constant.view_mut((off, off), (s, s)).copy_from(&b.constant);
        for (c, bc) in coeffs.iter_mut().zip(&b.coeffs) {
            c.view_mut((off, off), (s, s)).copy_from(bc);
        }
        off += s;
    }
    let mut mats: Vec<HermitianMatrix> = coeffs.into_iter().map(HermitianMatrix::from_hermitian_part).collect();
    let ys = mats.split_off(g);
    LinearPencil::new(HermitianMatrix::from_hermitian_part(constant), mats, ys).expect("blocks share variables")
}

/// Matrix convex hull of a union of bounded drops with monic lifts, as a
/// drop with monic lift. Uses the perspective description
/// `X = Σ Z_j`, `Σ Q_j = I`, `Q_j ⪰ 0`, `I ⊗ Q_j − ΣΩ^{(j)} ⊗ Z_j −
/// ΣΓ^{(j)} ⊗ W_j ⪰ 0`, with `Z_t`, `Q_t` eliminated and the result
/// normalized at the interior point `Q_j = I/t`.
pub fn hull_of_union(drops: &[Spectrahedrop], opts: &SolverOptions) -> Result<Spectrahedrop> {
    let first = drops
        .first()
        .ok_or_else(|| Error::Precondition("hull of an empty family".into()))?;
    let g = first.g();
    for (i, k) in drops.iter().enumerate() {
        if k.g() != g {
            return Err(Error::dims(format!("drop {i} has {} variables, expected {g}", k.g())));
        }
        if !k.lift.is_monic() {
            return Err(Error::NotMonic(format!("drop {i}: lift is not monic, so 0 is not known to be interior")));
        }
        if !k.equalities.is_empty() {
            return Err(Error::Precondition(format!("drop {i} has equality constraints")));
        }
        let b = is_bounded(&k.lift, opts)?;
        if !b.bounded {
            return Err(Error::Precondition(format!("drop {i} is not bounded")));
        }
    }
    let t = drops.len();
    // variables: x (g) | z_j (g each, j < t−1) | w_j (h_j each) | q_j (j < t−1)
    let z_base = g;
    let w_base = z_base + (t - 1) * g;
    let mut w_offsets = Vec::with_capacity(t);
    let mut off = w_base;
    for k in drops {
        w_offsets.push(off);
        off += k.h();
    }
    let q_base = off;
    let nvars = q_base + (t - 1);

    let mut blocks = Vec::new();
    for (j, k) in drops.iter().enumerate() {
        let d = k.lift.size();
        let id = CMat::identity(d, d);
        let mut b = BlockBuilder::new(d, nvars);
        let last = j == t - 1;
        if last {
            b.constant = id.clone();
            for i in 0..t - 1 {
                b.add(q_base + i, &id, -1.0);
            }
        } else {
            b.add(q_base + j, &id, 1.0);
        }
        // the lift stores −Ω and −Γ
        for (l, a) in k.lift.x_coeffs().iter().enumerate() {
            if last {
                b.add(l, a.as_matrix(), 1.0);
                for i in 0..t - 1 {
                    b.add(z_base + i * g + l, a.as_matrix(), -1.0);
                }
            } else {
                b.add(z_base + j * g + l, a.as_matrix(), 1.0);
            }
        }
        for (l, a) in k.lift.y_coeffs().iter().enumerate() {
            b.add(w_offsets[j] + l, a.as_matrix(), 1.0);
        }
        blocks.push(b);
    }
    let one = CMat::identity(1, 1);
    for i in 0..t - 1 {
        let mut b = BlockBuilder::new(1, nvars);
        b.add(q_base + i, &one, 1.0);
        blocks.push(b);
    }
    if t > 1 {
        let mut b = BlockBuilder::new(1, nvars);
        b.constant = one.clone();
        for i in 0..t - 1 {
            b.add(q_base + i, &one, -1.0);
        }
        blocks.push(b);
    }
    let pencil = assemble(blocks, g);
    let mut xhat = vec![0.0; nvars];
    for q in xhat.iter_mut().skip(q_base) {
        *q = 1.0 / t as f64;
    }
    let m = monicize(&pencil, &xhat)?;
    Ok(Spectrahedrop::new(m.pencil))
}
