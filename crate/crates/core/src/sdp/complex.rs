//! Complex Hermitian modelling layer on top of the real solver.
//!
//! A Hermitian PSD variable `Z = A + iB` of size `k` is stored as a real PSD
//! block `W` of size `2k`; its entries are read back through the average
//! `Z_ab = ½(W[a,b] + W[a+k,b+k]) + (i/2)(W[a+k,b] − W[a,b+k])`, which is PSD
//! whenever `W` is. In real mode every variable is a real symmetric matrix.

use num_complex::Complex64;

use super::problem::{Constraint, Coord, Objective, SdpProblem, SdpSolution, Sense, SolverOptions};
use super::solve::solve;
use crate::algebra::{CMat, RMat};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum RealVar {
    Coord(usize, usize, usize),
    Free(usize),
}

fn coord(block: usize, r: usize, c: usize) -> RealVar {
    if r <= c {
        RealVar::Coord(block, r, c)
    } else {
        RealVar::Coord(block, c, r)
    }
}

/// Complex affine functional of the real unknowns.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lin {
    terms: Vec<(RealVar, Complex64)>,
    constant: Complex64,
}

impl Lin {
    pub fn constant(c: Complex64) -> Self {
        Lin { terms: Vec::new(), constant: c }
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(_, a)| *a == ZERO)
    }

    pub fn add_scaled(&mut self, other: &Lin, s: Complex64) {
        if s == ZERO {
            return;
        }
        for &(v, a) in &other.terms {
            self.terms.push((v, a * s));
        }
        self.constant += other.constant * s;
    }

    pub fn scaled(&self, s: Complex64) -> Lin {
        let mut out = Lin::default();
        out.add_scaled(self, s);
        out
    }

    pub fn conj(&self) -> Lin {
        Lin {
            terms: self.terms.iter().map(|&(v, a)| (v, a.conj())).collect(),
            constant: self.constant.conj(),
        }
    }

    fn push(&mut self, v: RealVar, a: Complex64) {
        self.terms.push((v, a));
    }

    fn compact(&mut self) {
        self.terms.sort_by_key(|a| a.0);
        let mut out: Vec<(RealVar, Complex64)> = Vec::with_capacity(self.terms.len());
        for &(v, a) in &self.terms {
            match out.last_mut() {
                Some((w, b)) if *w == v => *b += a,
                _ => out.push((v, a)),
            }
        }
        out.retain(|(_, a)| *a != ZERO);
        self.terms = out;
    }

    pub(crate) fn value(&self, blocks: &[RMat], free: &[f64]) -> Complex64 {
        let mut s = self.constant;
        for &(v, a) in &self.terms {
            let x = match v {
                RealVar::Coord(b, r, c) => blocks[b][(r, c)],
                RealVar::Free(j) => free[j],
            };
            s += a * x;
        }
        s
    }

    /// Real row `Σ Re/Im(a)·v = rhs` from `part(self) = part(target)`.
    fn row(&self, imag: bool, target: Complex64) -> Constraint {
        let pick = |z: Complex64| if imag { z.im } else { z.re };
        let mut c = Constraint {
            rhs: pick(target - self.constant),
            ..Default::default()
        };
        for &(v, a) in &self.terms {
            let x = pick(a);
            if x == 0.0 {
                continue;
            }
            match v {
                RealVar::Coord(b, r, cc) => c.coords.push(Coord { block: b, row: r, col: cc, coef: x }),
                RealVar::Free(j) => c.free.push((j, x)),
            }
        }
        c
    }
}

/// Dense matrix of affine functionals.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    rows: usize,
    cols: usize,
    data: Vec<Lin>,
}

impl Expr {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Expr {
            rows,
            cols,
            data: vec![Lin::default(); rows * cols],
        }
    }

    pub fn constant(m: &CMat) -> Self {
        let mut e = Self::zeros(m.nrows(), m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                e.data[i * e.cols + j].constant = m[(i, j)];
            }
        }
        e
    }

    /// `1 × 1` expression.
    pub fn scalar(l: &Lin) -> Self {
        Expr {
            rows: 1,
            cols: 1,
            data: vec![l.clone()],
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> &Lin {
        &self.data[i * self.cols + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut Lin {
        &mut self.data[i * self.cols + j]
    }

    /// `self += s·other`.
    pub fn add_scaled(&mut self, other: &Expr, s: Complex64) {
        assert_eq!(self.shape(), other.shape(), "expression shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            a.add_scaled(b, s);
        }
    }

    pub fn add_constant(&mut self, m: &CMat) {
        assert_eq!(self.shape(), m.shape(), "expression shape mismatch");
        for i in 0..self.rows {
            for j in 0..self.cols {
                self.data[i * self.cols + j].constant += m[(i, j)];
            }
        }
    }

    /// `A·self·B`.
    pub fn sandwich(&self, a: &CMat, b: &CMat) -> Expr {
        let tmp = self.left_mul(a);
        tmp.right_mul(b)
    }

    pub fn left_mul(&self, a: &CMat) -> Expr {
        assert_eq!(a.ncols(), self.rows);
        let mut out = Expr::zeros(a.nrows(), self.cols);
        for i in 0..a.nrows() {
            for k in 0..self.rows {
                let s = a[(i, k)];
                if s == ZERO {
                    continue;
                }
                for j in 0..self.cols {
                    let src = self.get(k, j).clone();
                    out.get_mut(i, j).add_scaled(&src, s);
                }
            }
        }
        out.compact();
        out
    }

    pub fn right_mul(&self, b: &CMat) -> Expr {
        assert_eq!(b.nrows(), self.cols);
        let mut out = Expr::zeros(self.rows, b.ncols());
        for i in 0..self.rows {
            for k in 0..self.cols {
                for j in 0..b.ncols() {
                    let s = b[(k, j)];
                    if s != ZERO {
                        let src = self.get(i, k).clone();
                        out.get_mut(i, j).add_scaled(&src, s);
                    }
                }
            }
        }
        out.compact();
        out
    }

    /// `A ⊗ self`.
    pub fn kron_left(a: &CMat, e: &Expr) -> Expr {
        let (n, m) = e.shape();
        let mut out = Expr::zeros(a.nrows() * n, a.ncols() * m);
        for p in 0..a.nrows() {
            for q in 0..a.ncols() {
                let s = a[(p, q)];
                if s == ZERO {
                    continue;
                }
                for i in 0..n {
                    for j in 0..m {
                        *out.get_mut(p * n + i, q * m + j) = e.get(i, j).scaled(s);
                    }
                }
            }
        }
        out
    }

    pub fn submatrix(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Expr {
        let mut out = Expr::zeros(nr, nc);
        for i in 0..nr {
            for j in 0..nc {
                *out.get_mut(i, j) = self.get(r0 + i, c0 + j).clone();
            }
        }
        out
    }

    pub fn trace(&self) -> Lin {
        let mut l = Lin::default();
        for i in 0..self.rows.min(self.cols) {
            l.add_scaled(self.get(i, i), Complex64::new(1.0, 0.0));
        }
        l.compact();
        l
    }

    /// Block direct sum.
    pub fn direct_sum(parts: &[&Expr]) -> Expr {
        let r: usize = parts.iter().map(|e| e.rows).sum();
        let c: usize = parts.iter().map(|e| e.cols).sum();
        let mut out = Expr::zeros(r, c);
        let (mut r0, mut c0) = (0, 0);
        for e in parts {
            for i in 0..e.rows {
                for j in 0..e.cols {
                    *out.get_mut(r0 + i, c0 + j) = e.get(i, j).clone();
                }
            }
            r0 += e.rows;
            c0 += e.cols;
        }
        out
    }

    pub fn compact(&mut self) {
        for l in &mut self.data {
            l.compact();
        }
    }

    pub(crate) fn value(&self, blocks: &[RMat], free: &[f64]) -> CMat {
        CMat::from_fn(self.rows, self.cols, |i, j| self.get(i, j).value(blocks, free))
    }
}

/// Handle to a matrix or scalar unknown of a [`ComplexSdp`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VarId(usize);

/// Builder for Hermitian feasibility and optimization problems.
#[derive(Debug, Clone)]
pub struct ComplexSdp {
    prob: SdpProblem,
    real: bool,
    vars: Vec<Expr>,
}

impl ComplexSdp {
    /// `real = true` restricts every unknown to real matrices; this is exact
    /// for problems with real data, since the real part of a feasible point
    /// is again feasible.
    pub fn new(real: bool) -> Self {
        ComplexSdp {
            prob: SdpProblem::new(Sense::Feasibility),
            real,
            vars: Vec::new(),
        }
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    fn register(&mut self, e: Expr) -> (VarId, Expr) {
        self.vars.push(e.clone());
        (VarId(self.vars.len() - 1), e)
    }

    /// Hermitian PSD unknown of size `k`.
    pub fn psd(&mut self, name: &str, k: usize) -> (VarId, Expr) {
        let mut e = Expr::zeros(k, k);
        if self.real {
            let b = self.prob.add_block(name, k);
            for i in 0..k {
                for j in 0..k {
                    e.get_mut(i, j).push(coord(b, i, j), Complex64::new(1.0, 0.0));
                }
            }
        } else {
            let b = self.prob.add_block(name, 2 * k);
            let h = Complex64::new(0.5, 0.0);
            let ih = Complex64::new(0.0, 0.5);
            for i in 0..k {
                for j in 0..k {
                    let l = e.get_mut(i, j);
                    l.push(coord(b, i, j), h);
                    l.push(coord(b, i + k, j + k), h);
                    if i != j {
                        l.push(coord(b, i + k, j), ih);
                        l.push(coord(b, i, j + k), -ih);
                    }
                }
            }
        }
        self.register(e)
    }

    /// Unconstrained Hermitian unknown of size `k`.
    pub fn free_hermitian(&mut self, k: usize) -> (VarId, Expr) {
        let mut e = Expr::zeros(k, k);
        for i in 0..k {
            let d = self.prob.add_free(1);
            e.get_mut(i, i).push(RealVar::Free(d), Complex64::new(1.0, 0.0));
            for j in i + 1..k {
                let re = self.prob.add_free(1);
                e.get_mut(i, j).push(RealVar::Free(re), Complex64::new(1.0, 0.0));
                e.get_mut(j, i).push(RealVar::Free(re), Complex64::new(1.0, 0.0));
                if !self.real {
                    let im = self.prob.add_free(1);
                    e.get_mut(i, j).push(RealVar::Free(im), Complex64::new(0.0, 1.0));
                    e.get_mut(j, i).push(RealVar::Free(im), Complex64::new(0.0, -1.0));
                }
            }
        }
        self.register(e)
    }

    /// Unconstrained real scalar.
    pub fn free_real(&mut self) -> (VarId, Lin) {
        let j = self.prob.add_free(1);
        let mut e = Expr::zeros(1, 1);
        e.get_mut(0, 0).push(RealVar::Free(j), Complex64::new(1.0, 0.0));
        let (id, e) = self.register(e);
        (id, e.get(0, 0).clone())
    }

    /// `e = target` for an expression that is Hermitian by construction;
    /// only the upper triangle is imposed.
    pub fn equal_hermitian(&mut self, e: &Expr, target: &CMat) {
        assert_eq!(e.shape(), target.shape(), "equality shape mismatch");
        for i in 0..e.rows {
            for j in i..e.cols {
                let mut l = e.get(i, j).clone();
                l.compact();
                self.push_row(&l, false, target[(i, j)]);
                if i != j && !self.real {
                    self.push_row(&l, true, target[(i, j)]);
                } else if target[(i, j)].im != 0.0 {
                    self.prob.add_equality(Constraint {
                        rhs: target[(i, j)].im,
                        ..Default::default()
                    });
                }
            }
        }
    }

    /// Entrywise `e = target` with no structure assumed.
    pub fn equal(&mut self, e: &Expr, target: &CMat) {
        assert_eq!(e.shape(), target.shape(), "equality shape mismatch");
        for i in 0..e.rows {
            for j in 0..e.cols {
                let mut l = e.get(i, j).clone();
                l.compact();
                self.push_row(&l, false, target[(i, j)]);
                if !self.real {
                    self.push_row(&l, true, target[(i, j)]);
                } else if target[(i, j)].im != 0.0 {
                    // a real unknown cannot match an imaginary target
                    self.prob.add_equality(Constraint {
                        rhs: target[(i, j)].im,
                        ..Default::default()
                    });
                }
            }
        }
    }

    /// `Re l = v`.
    pub fn equal_real(&mut self, l: &Lin, v: f64) {
        let mut l = l.clone();
        l.compact();
        self.push_row(&l, false, Complex64::new(v, 0.0));
    }

    fn push_row(&mut self, l: &Lin, imag: bool, target: Complex64) {
        let row = l.row(imag, target);
        if row.coords.is_empty() && row.free.is_empty() && row.rhs == 0.0 {
            return;
        }
        self.prob.add_equality(row);
    }

    /// `e ⪰ 0` through a PSD slack; `e` must be Hermitian by construction.
    pub fn psd_constraint(&mut self, name: &str, e: &Expr) -> VarId {
        let (id, s) = self.psd(name, e.rows);
        let mut diff = s;
        diff.add_scaled(e, Complex64::new(-1.0, 0.0));
        self.equal_hermitian(&diff, &CMat::zeros(e.rows, e.cols));
        id
    }

    /// Maximize `Re l`.
    pub fn maximize(&mut self, l: &Lin) {
        let mut l = l.clone();
        l.compact();
        let row = l.row(false, Complex64::new(0.0, 0.0));
        self.prob.objective = Objective {
            coords: row.coords,
            free: row.free,
        };
        self.prob.sense = Sense::Optimize;
    }

    pub fn problem(&self) -> &SdpProblem {
        &self.prob
    }

    pub fn solve(&self, opts: &SolverOptions) -> ComplexSolution {
        ComplexSolution {
            raw: solve(&self.prob, opts),
            vars: self.vars.clone(),
        }
    }
}

/// Solver output with accessors in terms of the complex unknowns.
#[derive(Debug, Clone)]
pub struct ComplexSolution {
    pub raw: SdpSolution,
    vars: Vec<Expr>,
}

impl ComplexSolution {
    pub fn has_witness(&self) -> bool {
        !self.raw.blocks.is_empty() || !self.raw.free.is_empty()
    }

    pub fn matrix(&self, v: VarId) -> CMat {
        self.eval(&self.vars[v.0])
    }

    pub fn scalar(&self, v: VarId) -> f64 {
        self.matrix(v)[(0, 0)].re
    }

    pub fn eval(&self, e: &Expr) -> CMat {
        e.value(&self.raw.blocks, &self.raw.free)
    }
}
