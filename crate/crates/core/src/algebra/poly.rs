use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_complex::Complex64;

use super::matrix::{kron, max_abs, CMat};
use super::tuple::HermitianTuple;
use crate::error::{Error, Result};

/// A word in the free monoid on letters `0..g`; the empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct NCWord(Vec<usize>);

impl NCWord {
    pub fn empty() -> Self {
        NCWord(Vec::new())
    }

    pub fn new(letters: Vec<usize>) -> Self {
        NCWord(letters)
    }

    pub fn letter(j: usize) -> Self {
        NCWord(vec![j])
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn reverse(&self) -> Self {
        NCWord(self.0.iter().rev().copied().collect())
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        NCWord(v)
    }

    /// True if some letter is `>= first`; used to spot y-letters when the
    /// y-variables are numbered after the x-variables.
    pub fn has_letter_at_least(&self, first: usize) -> bool {
        self.0.iter().any(|&l| l >= first)
    }

    /// `w(X)`: product of the tuple entries named by the letters.
    pub fn evaluate(&self, x: &HermitianTuple) -> CMat {
        let n = x.dim();
        let mut out = CMat::identity(n, n);
        for &l in &self.0 {
            out *= x.get(l).as_matrix();
        }
        out
    }
}

/// Graded lexicographic: shorter words first, then letter by letter.
impl Ord for NCWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for NCWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All words in `g` letters of degree `<= r`, in graded lexicographic order.
pub fn words_up_to(g: usize, r: usize) -> Vec<NCWord> {
    let mut out = vec![NCWord::empty()];
    let mut layer = vec![NCWord::empty()];
    for _ in 0..r {
        let mut next = Vec::with_capacity(layer.len() * g);
        for w in &layer {
            for j in 0..g {
                let mut v = w.0.clone();
                v.push(j);
                next.push(NCWord(v));
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Matrix-valued free polynomial `Σ_w B_w w` with `rows × cols` coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct NCPolynomial {
    nvars: usize,
    rows: usize,
    cols: usize,
    terms: BTreeMap<NCWord, CMat>,
}

impl NCPolynomial {
    pub fn zero(nvars: usize, rows: usize, cols: usize) -> Self {
        Self {
            nvars,
            rows,
            cols,
            terms: BTreeMap::new(),
        }
    }

    /// `I_size` times the empty word.
    pub fn identity(nvars: usize, size: usize) -> Self {
        let mut p = Self::zero(nvars, size, size);
        p.terms.insert(NCWord::empty(), CMat::identity(size, size));
        p
    }

    pub fn from_terms(nvars: usize, rows: usize, cols: usize, terms: Vec<(NCWord, CMat)>) -> Result<Self> {
        let mut p = Self::zero(nvars, rows, cols);
        for (w, b) in terms {
            p.add_term(w, b)?;
        }
        Ok(p)
    }

    /// Scalar polynomial from `(coefficient, letters)` pairs.
    pub fn scalar(nvars: usize, terms: &[(f64, &[usize])]) -> Result<Self> {
        Self::from_terms(
            nvars,
            1,
            1,
            terms
                .iter()
                .map(|(c, w)| (NCWord::new(w.to_vec()), CMat::from_element(1, 1, Complex64::new(*c, 0.0))))
                .collect(),
        )
    }

    /// Adds `b·w`, merging with an existing term and dropping exact zeros.
    pub fn add_term(&mut self, w: NCWord, b: CMat) -> Result<()> {
        if b.shape() != (self.rows, self.cols) {
            return Err(Error::dims(format!(
                "coefficient is {}x{}, polynomial is {}x{}",
                b.nrows(),
                b.ncols(),
                self.rows,
                self.cols
            )));
        }
        if let Some(&l) = w.letters().iter().find(|&&l| l >= self.nvars) {
            return Err(Error::dims(format!("letter {l} out of range for {} variables", self.nvars)));
        }
        let entry = self.terms.entry(w.clone()).or_insert_with(|| CMat::zeros(b.nrows(), b.ncols()));
        *entry += b;
        if entry.iter().all(|z| *z == Complex64::ZERO) {
            self.terms.remove(&w);
        }
        Ok(())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&NCWord, &CMat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, w: &NCWord) -> CMat {
        self.terms.get(w).cloned().unwrap_or_else(|| CMat::zeros(self.rows, self.cols))
    }

    /// Maximum word degree; 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(NCWord::degree).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `P* = Σ B_w* w*` with `w*` the reversed word.
    pub fn involution(&self) -> Self {
        let mut out = Self::zero(self.nvars, self.cols, self.rows);
        for (w, b) in &self.terms {
            out.terms.insert(w.reverse(), b.adjoint());
        }
        out
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.rows == self.cols && self.max_coefficient_distance(&self.involution()) <= tol
    }

    /// Largest entry of `self − other` over all words.
    pub fn max_coefficient_distance(&self, other: &Self) -> f64 {
        let mut worst = 0.0_f64;
        for w in self.terms.keys().chain(other.terms.keys()) {
            worst = worst.max(max_abs(&(self.coefficient(w) - other.coefficient(w))));
        }
        worst
    }

    /// Word of largest coefficient discrepancy against `other`, with its size.
    pub fn worst_word(&self, other: &Self) -> Option<(NCWord, f64)> {
        let mut best: Option<(NCWord, f64)> = None;
        for w in self.terms.keys().chain(other.terms.keys()) {
            let d = max_abs(&(self.coefficient(w) - other.coefficient(w)));
            if best.as_ref().is_none_or(|(_, b)| d > *b) {
                best = Some((w.clone(), d));
            }
        }
        best
    }

    /// Drops terms whose coefficients are all below `tol` in modulus.
    pub fn pruned(&self, tol: f64) -> Self {
        let mut out = self.clone();
        out.terms.retain(|_, b| max_abs(b) > tol);
        out
    }

    /// `P·Q`, with words concatenated and coefficients multiplied.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows || self.nvars != other.nvars {
            return Err(Error::dims(format!(
                "cannot multiply {}x{} by {}x{} polynomial",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zero(self.nvars, self.rows, other.cols);
        for (u, a) in &self.terms {
            for (w, b) in &other.terms {
                out.add_term(u.concat(w), a * b)?;
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for (w, b) in &other.terms {
            out.add_term(w.clone(), b.clone())?;
        }
        Ok(out)
    }

    /// `P(X) = Σ B_w ⊗ w(X)`.
    pub fn evaluate(&self, x: &HermitianTuple) -> Result<CMat> {
        if x.g() != self.nvars {
            return Err(Error::dims(format!(
                "polynomial in {} variables evaluated at a {}-tuple",
                self.nvars,
                x.g()
            )));
        }
        let n = x.dim();
        let mut out = CMat::zeros(self.rows * n, self.cols * n);
        for (w, b) in &self.terms {
            out += kron(b, &w.evaluate(x));
        }
        Ok(out)
    }
}
