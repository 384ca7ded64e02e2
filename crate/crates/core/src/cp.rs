//! Choi matrices, Kraus operators, and cp interpolation.
//!
//! Convention: a map `Φ: M_n → M_m` has Choi matrix `C = Σ E_pq ⊗ Φ(E_pq)`,
//! an `n × n` grid of `m × m` blocks, and `Φ(X) = Σ X_pq C_pq`.

use num_complex::Complex64;

use crate::algebra::matrix::{c, max_abs};
use crate::algebra::{CMat, HermitianMatrix, HermitianTuple};
use crate::error::{Error, Result};
use crate::sdp::complex::{ComplexSdp, Expr, VarId};
use crate::sdp::{SolveStatus, SolverOptions};

/// Tolerance used when checking a returned witness against the data.
pub const WITNESS_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    n: usize,
    m: usize,
    c: HermitianMatrix,
}

impl ChoiMatrix {
    pub fn new(n: usize, m: usize, c: HermitianMatrix) -> Result<Self> {
        if c.dim() != n * m {
            return Err(Error::dims(format!("Choi matrix of size {} for maps M_{n} -> M_{m}", c.dim())));
        }
        Ok(ChoiMatrix { n, m, c })
    }

    /// Input size.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Output size.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.c
    }

    /// `C_pq = Φ(E_pq)`.
    pub fn block(&self, p: usize, q: usize) -> CMat {
        let m = self.m;
        self.c.as_matrix().view((p * m, q * m), (m, m)).into_owned()
    }

    /// `(tr C_pq)_pq`, the matrix of the dual map at the identity.
    pub fn partial_trace(&self) -> CMat {
        CMat::from_fn(self.n, self.n, |p, q| self.block(p, q).trace())
    }

    /// `Φ(I) = Σ C_pp`.
    pub fn image_of_identity(&self) -> CMat {
        let mut s = CMat::zeros(self.m, self.m);
        for p in 0..self.n {
            s += self.block(p, p);
        }
        s
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.c.min_eigenvalue()
    }
}

/// `Φ(A) = Σ V_j* A V_j` with every `V_j` of shape `n × m`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausDecomposition {
    n: usize,
    m: usize,
    ops: Vec<CMat>,
}

impl KrausDecomposition {
    pub fn new(n: usize, m: usize, ops: Vec<CMat>) -> Result<Self> {
        for (j, v) in ops.iter().enumerate() {
            if v.shape() != (n, m) {
                return Err(Error::dims(format!(
                    "Kraus operator {j} is {}x{}, expected {n}x{m}",
                    v.nrows(),
                    v.ncols()
                )));
            }
        }
        Ok(KrausDecomposition { n, m, ops })
    }

    /// Infers the shape from the first operator.
    pub fn from_ops(ops: Vec<CMat>) -> Result<Self> {
        let (n, m) = ops
            .first()
            .map(|v| v.shape())
            .ok_or_else(|| Error::Invalid("empty Kraus list; use `new` with explicit sizes".into()))?;
        Self::new(n, m, ops)
    }

    pub fn ops(&self) -> &[CMat] {
        &self.ops
    }

    /// Input size.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Output size.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn apply(&self, x: &CMat) -> CMat {
        let mut out = CMat::zeros(self.m, self.m);
        for v in &self.ops {
            out += v.adjoint() * x * v;
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum InterpolationMode {
    /// Completely positive, nothing else.
    Cp,
    /// `Φ(I) = I`.
    Unital,
    /// Trace preserving.
    Channel,
    /// Trace non-increasing on PSD inputs.
    Operation,
}

pub fn choi_of_kraus(k: &KrausDecomposition) -> ChoiMatrix {
    let (n, m) = (k.n, k.m);
    let mut cm = CMat::zeros(n * m, n * m);
    for v in &k.ops {
        // C[(p,i),(q,j)] = conj(V[p,i]) V[q,j]
        let w = CMat::from_fn(n * m, 1, |r, _| v[(r / m, r % m)].conj());
        cm += &w * w.adjoint();
    }
    ChoiMatrix {
        n,
        m,
        c: HermitianMatrix::from_hermitian_part(cm),
    }
}

/// Kraus operators from the spectral decomposition; eigenvalues below
/// `rank_tol·λ_max` are dropped.
pub fn kraus_of_choi(ch: &ChoiMatrix, rank_tol: f64) -> Result<KrausDecomposition> {
    let (vals, vecs) = ch.c.eigen();
    let lmax = vals.iter().cloned().fold(0.0_f64, f64::max);
    let lmin = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    if lmin < -rank_tol * lmax.max(1.0) {
        return Err(Error::NotCompletelyPositive(lmin));
    }
    let (n, m) = (ch.n, ch.m);
    let mut ops = Vec::new();
    for (k, &lam) in vals.iter().enumerate() {
        if lam <= rank_tol * lmax || lam <= 0.0 {
            continue;
        }
        let s = lam.sqrt();
        ops.push(CMat::from_fn(n, m, |p, i| vecs[(p * m + i, k)].conj() * s));
    }
    KrausDecomposition::new(n, m, ops)
}

pub fn apply_choi(ch: &ChoiMatrix, x: &CMat) -> Result<CMat> {
    if x.shape() != (ch.n, ch.n) {
        return Err(Error::dims(format!(
            "map on M_{} applied to a {}x{} matrix",
            ch.n,
            x.nrows(),
            x.ncols()
        )));
    }
    let mut out = CMat::zeros(ch.m, ch.m);
    for p in 0..ch.n {
        for q in 0..ch.n {
            let s = x[(p, q)];
            if s != Complex64::ZERO {
                out += ch.block(p, q) * s;
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct Interpolation {
    pub status: SolveStatus,
    /// Verified Choi matrix when `status` is FEASIBLE.
    pub choi: Option<ChoiMatrix>,
    /// Phase-I margin; negative for decisive rejections.
    pub margin: f64,
    /// Largest interpolation or mode residual of the witness.
    pub residual: f64,
    pub message: String,
}

/// Does `Σ_pq ω_pq C_pq` over the Choi variable, as an expression.
pub(crate) fn choi_image(choi: &Expr, n: usize, m: usize, a: &CMat) -> Expr {
    let mut out = Expr::zeros(m, m);
    for p in 0..n {
        for q in 0..n {
            let s = a[(p, q)];
            if s != Complex64::ZERO {
                out.add_scaled(&choi.submatrix(p * m, q * m, m, m), s);
            }
        }
    }
    out.compact();
    out
}

/// Adds the mode constraint on a Choi variable of a map `M_n → M_m`.
pub(crate) fn add_mode_constraint(sdp: &mut ComplexSdp, choi: &Expr, n: usize, m: usize, mode: InterpolationMode) {
    match mode {
        InterpolationMode::Cp => {}
        InterpolationMode::Unital => {
            let e = choi_image(choi, n, m, &CMat::identity(n, n));
            sdp.equal_hermitian(&e, &CMat::identity(m, m));
        }
        InterpolationMode::Channel | InterpolationMode::Operation => {
            let mut t = Expr::zeros(n, n);
            for p in 0..n {
                for q in 0..n {
                    *t.get_mut(p, q) = choi.submatrix(p * m, q * m, m, m).trace();
                }
            }
            if mode == InterpolationMode::Channel {
                sdp.equal_hermitian(&t, &CMat::identity(n, n));
            } else {
                let mut slack = Expr::constant(&CMat::identity(n, n));
                slack.add_scaled(&t, c(-1.0, 0.0));
                sdp.psd_constraint("trace-slack", &slack);
            }
        }
    }
}

pub(crate) fn all_real<'a>(ms: impl IntoIterator<Item = &'a CMat>) -> bool {
    ms.into_iter().all(|m| m.iter().all(|z| z.im == 0.0))
}

/// Residual of a Choi witness against the mode constraint.
pub fn mode_residual(ch: &ChoiMatrix, mode: InterpolationMode) -> f64 {
    match mode {
        InterpolationMode::Cp => 0.0,
        InterpolationMode::Unital => max_abs(&(ch.image_of_identity() - CMat::identity(ch.m, ch.m))),
        InterpolationMode::Channel => max_abs(&(ch.partial_trace() - CMat::identity(ch.n, ch.n))),
        InterpolationMode::Operation => {
            let slack = CMat::identity(ch.n, ch.n) - ch.partial_trace();
            let l = HermitianMatrix::from_hermitian_part(slack).min_eigenvalue();
            (-l).max(0.0)
        }
    }
}

pub(crate) fn choi_from_witness(n: usize, m: usize, raw: CMat) -> ChoiMatrix {
    ChoiMatrix {
        n,
        m,
        c: HermitianMatrix::from_hermitian_part(raw),
    }
}

/// Is there a cp map `Φ: M_n → M_m` of the given mode with `Φ(A_j) = B_j`?
pub fn interpolate(
    a: &HermitianTuple,
    b: &HermitianTuple,
    mode: InterpolationMode,
    opts: &SolverOptions,
) -> Result<Interpolation> {
    if a.g() != b.g() {
        return Err(Error::dims(format!("{} source matrices but {} targets", a.g(), b.g())));
    }
    let (n, m) = (a.dim(), b.dim());
    let real = all_real(a.mats().iter().chain(b.mats()).map(|h| h.as_matrix()));
    let mut sdp = ComplexSdp::new(real);
    let (cid, choi) = sdp.psd("C", n * m);
    for (aj, bj) in a.mats().iter().zip(b.mats()) {
        let e = choi_image(&choi, n, m, aj.as_matrix());
        sdp.equal_hermitian(&e, bj.as_matrix());
    }
    add_mode_constraint(&mut sdp, &choi, n, m, mode);
    let sol = sdp.solve(opts);
    Ok(finish(&sol, cid, n, m, a, b, mode))
}

fn finish(
    sol: &crate::sdp::complex::ComplexSolution,
    cid: VarId,
    n: usize,
    m: usize,
    a: &HermitianTuple,
    b: &HermitianTuple,
    mode: InterpolationMode,
) -> Interpolation {
    let raw = &sol.raw;
    if raw.status != SolveStatus::Feasible {
        return Interpolation {
            status: raw.status,
            choi: None,
            margin: raw.margin,
            residual: f64::NAN,
            message: raw.message.clone(),
        };
    }
    let ch = choi_from_witness(n, m, sol.matrix(cid));
    let mut residual = mode_residual(&ch, mode);
    for (aj, bj) in a.mats().iter().zip(b.mats()) {
        let img = apply_choi(&ch, aj.as_matrix()).expect("sizes checked");
        residual = residual.max(max_abs(&(img - bj.as_matrix())));
    }
    let psd_ok = ch.min_eigenvalue() >= -WITNESS_TOL;
    if residual > WITNESS_TOL || !psd_ok {
        return Interpolation {
            status: SolveStatus::Error,
            choi: None,
            margin: raw.margin,
            residual,
            message: format!("witness failed verification (residual {residual:.3e})"),
        };
    }
    Interpolation {
        status: SolveStatus::Feasible,
        choi: Some(ch),
        margin: raw.margin,
        residual,
        message: raw.message.clone(),
    }
}
