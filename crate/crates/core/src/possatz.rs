//! Certificates in the truncated quadratic module of a pencil:
//! `p = σ + Σ_ℓ q_ℓ* 𝔏 q_ℓ` with `σ` a sum of hermitian squares and
//! `Σ_ℓ q_ℓ* Γ_k q_ℓ = 0`.
//!
//! Both parts are stored as Gram matrices over the word basis. With `N`
//! words of degree `≤ r` and `μ × μ` polynomials, `S` is indexed by
//! `(word, column)` and `G` by `(pencil row, word, column)`, so
//! `σ = Σ_{u,w} S_{uw} u*w` and the pencil part is
//! `Σ_{u,w} Σ_{i,i'} M_{ii'} G_{(i,u),(i',w)} u* c w` for each coefficient `M`
//! of `𝔏` with letter `c`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::algebra::matrix::max_abs;
use crate::algebra::{words_up_to, CMat, HermitianMatrix, LinearPencil, NCPolynomial, NCWord};
use crate::cp::all_real;
use crate::error::{Error, Result};
use crate::sdp::complex::{ComplexSdp, Expr};
use crate::sdp::{SolveStatus, SolverOptions};

/// Coefficient-wise tolerance for [`verify_certificate`].
pub const COEFFICIENT_TOL: f64 = 1e-6;
/// Largest y-coefficient tolerated by [`expand_certificate`].
pub const EXPAND_ANNIHILATION_TOL: f64 = 1e-9;
/// Largest y-coefficient tolerated by [`verify_certificate`].
pub const ANNIHILATION_TOL: f64 = 1e-7;
pub const GRAM_EIGENVALUE_TOL: f64 = 1e-8;
/// Relative eigenvalue cutoff for [`Certificate::extract`].
pub const EXTRACTION_RANK_TOL: f64 = 1e-10;

/// All words in `g` letters of degree `≤ r`, graded lexicographically.
#[derive(Debug, Clone, PartialEq)]
pub struct WordBasis {
    g: usize,
    r: usize,
    words: Vec<NCWord>,
}

impl WordBasis {
    pub fn new(g: usize, r: usize) -> Self {
        WordBasis {
            g,
            r,
            words: words_up_to(g, r),
        }
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn words(&self) -> &[NCWord] {
        &self.words
    }

    /// `Σ_{k ≤ r} g^k`.
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub mu: usize,
    pub r: usize,
    /// `Nμ × Nμ`.
    pub s: HermitianMatrix,
    /// `dNμ × dNμ`, or `0 × 0` for no pencil part.
    pub gram: HermitianMatrix,
}

impl Certificate {
    pub fn new(mu: usize, r: usize, s: HermitianMatrix, gram: HermitianMatrix) -> Self {
        Certificate { mu, r, s, gram }
    }

    /// `σ = 0`, no pencil part.
    pub fn zero(g: usize, mu: usize, r: usize) -> Self {
        let n = WordBasis::new(g, r).len();
        Certificate {
            mu,
            r,
            s: HermitianMatrix::zeros(n * mu),
            gram: HermitianMatrix::zeros(0),
        }
    }

    fn check_shapes(&self, l: &LinearPencil) -> Result<WordBasis> {
        let basis = WordBasis::new(l.g(), self.r);
        let n = basis.len();
        if self.s.dim() != n * self.mu {
            return Err(Error::dims(format!(
                "sum-of-squares Gram is {}, expected {} for {n} words",
                self.s.dim(),
                n * self.mu
            )));
        }
        if self.gram.dim() != 0 && self.gram.dim() != l.size() * n * self.mu {
            return Err(Error::dims(format!(
                "pencil Gram is {}, expected {}",
                self.gram.dim(),
                l.size() * n * self.mu
            )));
        }
        Ok(basis)
    }

    /// Rows `h_c` (each `1 × μ`) with `σ = Σ h_c* h_c`, and `q_ℓ` (each
    /// `d × μ`) with pencil part `Σ q_ℓ* 𝔏 q_ℓ`.
    pub fn extract(&self, l: &LinearPencil) -> Result<(Vec<NCPolynomial>, Vec<NCPolynomial>)> {
        let basis = self.check_shapes(l)?;
        let (g, mu, n, d) = (l.g(), self.mu, basis.len(), l.size());
        let factors = |m: &HermitianMatrix, rows: usize| -> Result<Vec<NCPolynomial>> {
            let (vals, vecs) = m.eigen();
            let top = vals.iter().cloned().fold(0.0, f64::max);
            let mut out = Vec::new();
            for (k, &lam) in vals.iter().enumerate() {
                if lam <= EXTRACTION_RANK_TOL * top.max(1.0) {
                    continue;
                }
                let v = vecs.column(k).map(|z| (z * lam.sqrt()).conj());
                let mut terms = Vec::with_capacity(n);
                for (u, w) in basis.words().iter().enumerate() {
                    let coef = CMat::from_fn(rows, mu, |i, a| v[i * n * mu + u * mu + a]);
                    terms.push((w.clone(), coef));
                }
                out.push(NCPolynomial::from_terms(g, rows, mu, terms)?);
            }
            Ok(out)
        };
        let h = factors(&self.s, 1)?;
        let q = if self.gram.dim() == 0 { Vec::new() } else { factors(&self.gram, d)? };
        Ok((h, q))
    }
}

enum Part<'a> {
    Sos(usize, usize),
    Pencil(usize, usize, &'a CMat),
}

/// Every word produced by the expansion with the Gram entries feeding it.
/// y-letters are numbered from `g`.
fn parts<'a>(basis: &WordBasis, l: &'a LinearPencil, with_pencil: bool) -> Vec<(NCWord, Part<'a>)> {
    let g = l.g();
    let mut out = Vec::new();
    for (ui, u) in basis.words().iter().enumerate() {
        let us = u.reverse();
        for (wi, w) in basis.words().iter().enumerate() {
            out.push((us.concat(w), Part::Sos(ui, wi)));
            if !with_pencil {
                continue;
            }
            out.push((us.concat(w), Part::Pencil(ui, wi, l.constant().as_matrix())));
            for (j, a) in l.x_coeffs().iter().enumerate() {
                out.push((us.concat(&NCWord::letter(j)).concat(w), Part::Pencil(ui, wi, a.as_matrix())));
            }
            for (k, gk) in l.y_coeffs().iter().enumerate() {
                out.push((us.concat(&NCWord::letter(g + k)).concat(w), Part::Pencil(ui, wi, gk.as_matrix())));
            }
        }
    }
    out
}

/// Expanded coefficients, split into x-words and words containing a y-letter.
fn expand_raw(c: &Certificate, l: &LinearPencil) -> Result<(NCPolynomial, f64)> {
    let basis = c.check_shapes(l)?;
    let (g, mu, n, d) = (l.g(), c.mu, basis.len(), l.size());
    let s = c.s.as_matrix();
    let gm = c.gram.as_matrix();
    let mut acc: BTreeMap<NCWord, CMat> = BTreeMap::new();
    for (word, part) in parts(&basis, l, c.gram.dim() != 0) {
        let block = match part {
            Part::Sos(u, w) => s.view((u * mu, w * mu), (mu, mu)).into_owned(),
            Part::Pencil(u, w, m) => {
                let mut b = CMat::zeros(mu, mu);
                for i in 0..d {
                    for ip in 0..d {
                        let coef = m[(i, ip)];
                        if coef != Complex64::ZERO {
                            b += gm.view((i * n * mu + u * mu, ip * n * mu + w * mu), (mu, mu)) * coef;
                        }
                    }
                }
                b
            }
        };
        *acc.entry(word).or_insert_with(|| CMat::zeros(mu, mu)) += block;
    }
    let mut p = NCPolynomial::zero(g, mu, mu);
    let mut y_residual = 0.0_f64;
    for (w, b) in acc {
        if w.has_letter_at_least(g) {
            y_residual = y_residual.max(max_abs(&b));
        } else {
            p.add_term(w, b)?;
        }
    }
    Ok((p, y_residual))
}

/// The polynomial `σ + Σ q_ℓ* 𝔏 q_ℓ` encoded by `c`, in the x-variables.
/// Fails if y-terms survive beyond [`EXPAND_ANNIHILATION_TOL`].
pub fn expand_certificate(c: &Certificate, l: &LinearPencil) -> Result<NCPolynomial> {
    let (p, y) = expand_raw(c, l)?;
    if y > EXPAND_ANNIHILATION_TOL {
        return Err(Error::AnnihilationViolated(y));
    }
    Ok(p)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateCheck {
    pub valid: bool,
    /// Largest coefficient discrepancy against `p`.
    pub residual: f64,
    pub worst_word: Option<NCWord>,
    /// Largest surviving y-coefficient.
    pub annihilation: f64,
    /// Smaller of the two Gram minimum eigenvalues.
    pub min_eigenvalue: f64,
}

/// Checks `p = σ + Σ q_ℓ* 𝔏 q_ℓ` coefficient-wise together with the Gram
/// and annihilation conditions.
pub fn verify_certificate(p: &NCPolynomial, c: &Certificate, l: &LinearPencil) -> Result<CertificateCheck> {
    if p.shape() != (c.mu, c.mu) {
        return Err(Error::dims(format!("polynomial is {:?} but certificate has mu = {}", p.shape(), c.mu)));
    }
    if p.nvars() != l.g() {
        return Err(Error::dims(format!("polynomial in {} variables, pencil in {}", p.nvars(), l.g())));
    }
    let (e, annihilation) = expand_raw(c, l)?;
    let (worst_word, residual) = match p.worst_word(&e) {
        Some((w, r)) => (Some(w), r),
        None => (None, 0.0),
    };
    let mut min_eigenvalue = if c.s.dim() > 0 { c.s.min_eigenvalue() } else { 0.0 };
    if c.gram.dim() > 0 {
        min_eigenvalue = min_eigenvalue.min(c.gram.min_eigenvalue());
    }
    Ok(CertificateCheck {
        valid: residual <= COEFFICIENT_TOL && annihilation <= ANNIHILATION_TOL && min_eigenvalue >= -GRAM_EIGENVALUE_TOL,
        residual,
        worst_word,
        annihilation,
        min_eigenvalue,
    })
}

#[derive(Debug, Clone)]
pub struct CertificateSearch {
    pub status: SolveStatus,
    /// Verified certificate when `status` is FEASIBLE.
    pub certificate: Option<Certificate>,
    pub check: Option<CertificateCheck>,
    pub margin: f64,
    pub message: String,
}

/// Looks for `p ∈ M^μ(𝔏)_r` by an SDP over the two Gram matrices; a
/// FEASIBLE answer carries a certificate that passed [`verify_certificate`].
pub fn search_certificate(
    p: &NCPolynomial,
    l: &LinearPencil,
    r: usize,
    opts: &SolverOptions,
) -> Result<CertificateSearch> {
    if !l.is_monic() {
        return Err(Error::NotMonic("certificate search needs a monic pencil".into()));
    }
    let (mu, cols) = p.shape();
    if mu != cols || !p.is_symmetric(1e-12) {
        return Err(Error::Precondition("polynomial is not symmetric".into()));
    }
    if p.nvars() != l.g() {
        return Err(Error::dims(format!("polynomial in {} variables, pencil in {}", p.nvars(), l.g())));
    }
    if p.degree() > 2 * r + 1 {
        return Err(Error::Precondition(format!("degree {} exceeds 2r+1 = {}", p.degree(), 2 * r + 1)));
    }
    let basis = WordBasis::new(l.g(), r);
    let (n, d, g) = (basis.len(), l.size(), l.g());
    let real = all_real(
        p.terms()
            .map(|(_, b)| b)
            .chain(std::iter::once(l.constant().as_matrix()))
            .chain(l.x_coeffs().iter().map(|a| a.as_matrix()))
            .chain(l.y_coeffs().iter().map(|a| a.as_matrix())),
    );
    let mut sdp = ComplexSdp::new(real);
    let (sid, s) = sdp.psd("S", n * mu);
    let (gid, gm) = sdp.psd("G", d * n * mu);
    let mut acc: BTreeMap<NCWord, Expr> = BTreeMap::new();
    let one = Complex64::new(1.0, 0.0);
    for (word, part) in parts(&basis, l, true) {
        let e = acc.entry(word).or_insert_with(|| Expr::zeros(mu, mu));
        match part {
            Part::Sos(u, w) => e.add_scaled(&s.submatrix(u * mu, w * mu, mu, mu), one),
            Part::Pencil(u, w, m) => {
                for i in 0..d {
                    for ip in 0..d {
                        let coef = m[(i, ip)];
                        if coef != Complex64::ZERO {
                            e.add_scaled(&gm.submatrix(i * n * mu + u * mu, ip * n * mu + w * mu, mu, mu), coef);
                        }
                    }
                }
            }
        }
    }
    for (w, _) in p.terms() {
        acc.entry(w.clone()).or_insert_with(|| Expr::zeros(mu, mu));
    }
    for (w, e) in acc.iter_mut() {
        let rev = w.reverse();
        if rev < *w {
            continue;
        }
        e.compact();
        let target = if w.has_letter_at_least(g) { CMat::zeros(mu, mu) } else { p.coefficient(w) };
        if rev == *w {
            sdp.equal_hermitian(e, &target);
        } else {
            sdp.equal(e, &target);
        }
    }
    let sol = sdp.solve(opts);
    let raw = &sol.raw;
    if raw.status != SolveStatus::Feasible {
        return Ok(CertificateSearch {
            status: raw.status,
            certificate: None,
            check: None,
            margin: raw.margin,
            message: raw.message.clone(),
        });
    }
    let cert = Certificate::new(
        mu,
        r,
        HermitianMatrix::from_hermitian_part(sol.matrix(sid)),
        HermitianMatrix::from_hermitian_part(sol.matrix(gid)),
    );
    let check = verify_certificate(p, &cert, l)?;
    if !check.valid {
        return Ok(CertificateSearch {
            status: SolveStatus::Error,
            certificate: None,
            message: format!(
                "certificate failed verification (residual {:.3e}, annihilation {:.3e})",
                check.residual, check.annihilation
            ),
            check: Some(check),
            margin: raw.margin,
        });
    }
    Ok(CertificateSearch {
        status: SolveStatus::Feasible,
        certificate: Some(cert),
        check: Some(check),
        margin: raw.margin,
        message: raw.message.clone(),
    })
}
