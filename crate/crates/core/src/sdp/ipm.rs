//! Infeasible-start primal-dual path-following method (HKM direction with a
//! Mehrotra predictor-corrector) for
//!
//! ```text
//! min  Σ_b <C_b, X_b> + f·u   s.t.  Σ_b <F_ib, X_b> + (B u)_i = b_i,  X_b ⪰ 0,  u free
//! ```
//!
//! Block data are stored sparsely in matrix form: an entry `(r, c, v)` with
//! `r <= c` stands for `F[r][c] = F[c][r] = v`.

use nalgebra::DVector;

use crate::algebra::RMat;

#[derive(Debug, Clone, Default)]
pub(crate) struct SparseRow {
    pub blocks: Vec<(usize, Vec<(usize, usize, f64)>)>,
    pub free: Vec<(usize, f64)>,
}

impl SparseRow {
    pub fn norm_sq(&self) -> f64 {
        let mut s = 0.0;
        for (_, es) in &self.blocks {
            for &(r, c, v) in es {
                s += if r == c { v * v } else { 2.0 * v * v };
            }
        }
        s + self.free.iter().map(|(_, v)| v * v).sum::<f64>()
    }

    pub fn apply(&self, x: &[RMat], u: &[f64]) -> f64 {
        let mut s = 0.0;
        for (b, es) in &self.blocks {
            let xb = &x[*b];
            for &(r, c, v) in es {
                s += if r == c { v * xb[(r, r)] } else { v * (xb[(r, c)] + xb[(c, r)]) };
            }
        }
        for &(j, v) in &self.free {
            s += v * u[j];
        }
        s
    }
}

#[derive(Debug, Clone)]
pub(crate) struct ConeProblem {
    pub sizes: Vec<usize>,
    pub nfree: usize,
    pub rows: Vec<SparseRow>,
    pub b: Vec<f64>,
    pub c_blocks: Vec<RMat>,
    pub c_free: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum IpmStatus {
    Converged,
    MaxIter,
    Stalled,
    Numerical,
}

#[derive(Debug, Clone)]
pub(crate) struct IpmResult {
    pub status: IpmStatus,
    pub x: Vec<RMat>,
    pub u: Vec<f64>,
    pub dobj: f64,
    pub pinf: f64,
    pub dinf: f64,
    pub gap: f64,
    pub iterations: usize,
}

fn dot(a: &RMat, b: &RMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn sym(m: &RMat) -> RMat {
    (m + m.transpose()).scale(0.5)
}

fn tracing() -> bool {
    std::env::var_os("FREESDP_TRACE").is_some()
}

fn trace(msg: &str) {
    if tracing() {
        eprintln!("{msg}");
    }
}

fn inverse_spd(m: &RMat) -> Option<RMat> {
    let ch = m.clone().cholesky()?;
    Some(ch.inverse())
}

/// Cholesky factor, retried with a small diagonal shift when the matrix is
/// numerically singular near the end of a run.
fn regularized_cholesky(m: &RMat) -> Option<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
    if let Some(ch) = m.clone().cholesky() {
        return Some(ch);
    }
    let scale = 1.0 + (0..m.nrows()).map(|i| m[(i, i)].abs()).fold(0.0_f64, f64::max);
    for delta in [1e-14, 1e-12, 1e-10] {
        let mut shifted = m.clone();
        for i in 0..m.nrows() {
            shifted[(i, i)] += delta * scale;
        }
        if let Some(ch) = shifted.cholesky() {
            return Some(ch);
        }
    }
    None
}

/// Largest α with `x + α·dx ⪰ 0` (capped at `cap`).
fn max_step(x: &RMat, dx: &RMat, cap: f64) -> f64 {
    let n = x.nrows();
    if n == 0 {
        return cap;
    }
    if n == 1 {
        return if dx[(0, 0)] < 0.0 { (-x[(0, 0)] / dx[(0, 0)]).min(cap) } else { cap };
    }
    let Some(ch) = x.clone().cholesky() else {
        return 0.0;
    };
    let l = ch.l();
    let Some(linv) = l.clone().try_inverse() else {
        return 0.0;
    };
    let m = sym(&(&linv * dx * linv.transpose()));
    let lam = m.symmetric_eigen().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if lam >= 0.0 {
        cap
    } else {
        (-1.0 / lam).min(cap)
    }
}

struct Newton<'a> {
    prob: &'a ConeProblem,
    touching: Vec<Vec<usize>>,
}

enum Factor {
    Cholesky { m: nalgebra::Cholesky<f64, nalgebra::Dyn>, schur: Option<(RMat, nalgebra::Cholesky<f64, nalgebra::Dyn>)> },
    Lu(nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>),
}

impl<'a> Newton<'a> {
    fn new(prob: &'a ConeProblem) -> Self {
        let mut touching = vec![Vec::new(); prob.sizes.len()];
        for (i, row) in prob.rows.iter().enumerate() {
            for (b, _) in &row.blocks {
                touching[*b].push(i);
            }
        }
        Self { prob, touching }
    }

    fn a_op(&self, x: &[RMat], u: &[f64]) -> Vec<f64> {
        self.prob.rows.iter().map(|r| r.apply(x, u)).collect()
    }

    fn a_adj(&self, y: &[f64]) -> Vec<RMat> {
        let mut out: Vec<RMat> = self.prob.sizes.iter().map(|&n| RMat::zeros(n, n)).collect();
        for (row, &yi) in self.prob.rows.iter().zip(y) {
            if yi == 0.0 {
                continue;
            }
            for (b, es) in &row.blocks {
                let ob = &mut out[*b];
                for &(r, c, v) in es {
                    ob[(r, c)] += yi * v;
                    if r != c {
                        ob[(c, r)] += yi * v;
                    }
                }
            }
        }
        out
    }

    fn b_adj(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.prob.nfree];
        for (row, &yi) in self.prob.rows.iter().zip(y) {
            for &(j, v) in &row.free {
                out[j] += v * yi;
            }
        }
        out
    }

    /// `M_ij = Σ_b tr(F_ib X_b F_jb S_b⁻¹)`.
    fn schur(&self, x: &[RMat], sinv: &[RMat]) -> RMat {
        let m = self.prob.rows.len();
        let mut mat = RMat::zeros(m, m);
        for (b, idx) in self.touching.iter().enumerate() {
            let n = self.prob.sizes[b];
            let xb = &x[b];
            let sb = &sinv[b];
            let entries: Vec<&Vec<(usize, usize, f64)>> = idx
                .iter()
                .map(|&i| {
                    &self.prob.rows[i].blocks.iter().find(|(bb, _)| *bb == b).expect("indexed").1
                })
                .collect();
            for (jj, &j) in idx.iter().enumerate() {
                let mut t = RMat::zeros(n, n);
                for &(r, c, v) in entries[jj] {
                    t.ger(v, &xb.column(r), &sb.row(c).transpose(), 1.0);
                    if r != c {
                        t.ger(v, &xb.column(c), &sb.row(r).transpose(), 1.0);
                    }
                }
                for (ii, &i) in idx.iter().enumerate() {
                    let mut s = 0.0;
                    for &(r, c, v) in entries[ii] {
                        s += if r == c { v * t[(r, r)] } else { v * (t[(r, c)] + t[(c, r)]) };
                    }
                    mat[(i, j)] += s;
                }
            }
        }
        sym(&mat)
    }

    fn free_matrix(&self) -> RMat {
        let mut bm = RMat::zeros(self.prob.rows.len(), self.prob.nfree);
        for (i, row) in self.prob.rows.iter().enumerate() {
            for &(j, v) in &row.free {
                bm[(i, j)] += v;
            }
        }
        bm
    }

    fn factor(&self, m: &RMat, bm: &RMat) -> Option<Factor> {
        let nf = self.prob.nfree;
        if let Some(chm) = regularized_cholesky(m) {
            if nf == 0 {
                return Some(Factor::Cholesky { m: chm, schur: None });
            }
            let minv_b = chm.solve(bm);
            let sc = sym(&(bm.transpose() * &minv_b));
            if let Some(chs) = regularized_cholesky(&sc) {
                return Some(Factor::Cholesky { m: chm, schur: Some((minv_b, chs)) });
            }
        }
        let mm = m.nrows();
        let mut k = RMat::zeros(mm + nf, mm + nf);
        k.view_mut((0, 0), (mm, mm)).copy_from(m);
        k.view_mut((0, mm), (mm, nf)).copy_from(bm);
        k.view_mut((mm, 0), (nf, mm)).copy_from(&bm.transpose());
        let lu = k.lu();
        if lu.is_invertible() {
            Some(Factor::Lu(lu))
        } else {
            None
        }
    }

    /// Solve `[M B; Bᵀ 0][dy; du] = [h; rf]`.
    fn solve(&self, f: &Factor, bm: &RMat, h: &[f64], rf: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
        let mm = h.len();
        match f {
            Factor::Cholesky { m, schur } => {
                let hv = DVector::from_column_slice(h);
                match schur {
                    None => Some((m.solve(&hv).iter().copied().collect(), Vec::new())),
                    Some((minv_b, chs)) => {
                        let minv_h = m.solve(&hv);
                        let rhs = bm.transpose() * &minv_h - DVector::from_column_slice(rf);
                        let du = chs.solve(&rhs);
                        let dy = minv_h - minv_b * &du;
                        Some((dy.iter().copied().collect(), du.iter().copied().collect()))
                    }
                }
            }
            Factor::Lu(lu) => {
                let mut rhs = DVector::zeros(mm + rf.len());
                rhs.rows_mut(0, mm).copy_from_slice(h);
                rhs.rows_mut(mm, rf.len()).copy_from_slice(rf);
                let sol = lu.solve(&rhs)?;
                Some((sol.rows(0, mm).iter().copied().collect(), sol.rows(mm, rf.len()).iter().copied().collect()))
            }
        }
    }
}

pub(crate) struct IpmOptions {
    pub tol: f64,
    pub max_iter: usize,
}

pub(crate) fn solve_cone(prob: &ConeProblem, opts: &IpmOptions) -> IpmResult {
    let nb = prob.sizes.len();
    let m = prob.rows.len();
    let nf = prob.nfree;
    let big_n: usize = prob.sizes.iter().sum::<usize>().max(1);
    let newton = Newton::new(prob);
    let bm = newton.free_matrix();

    let bnorm_inf = prob.b.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let cnorm = (prob.c_blocks.iter().map(|c| dot(c, c)).sum::<f64>() + prob.c_free.iter().map(|v| v * v).sum::<f64>()).sqrt();
    let row_norm_max = prob.rows.iter().map(|r| r.norm_sq().sqrt()).fold(0.0_f64, f64::max);

    let xi = (1.0 + bnorm_inf).max(10.0) / (1.0 + row_norm_max).min(10.0);
    let eta = (1.0 + cnorm).max(row_norm_max).max(10.0);
    let mut x: Vec<RMat> = prob.sizes.iter().map(|&n| RMat::identity(n, n).scale(xi)).collect();
    let mut s: Vec<RMat> = prob.sizes.iter().map(|&n| RMat::identity(n, n).scale(eta)).collect();
    let mut y = vec![0.0; m];
    let mut u = vec![0.0; nf];

    let mut best: Option<(f64, IpmResult)> = None;
    let mut iterations = 0;
    let mut status = IpmStatus::MaxIter;
    let mut small_steps = 0;

    for it in 0..opts.max_iter {
        iterations = it;
        let ax = newton.a_op(&x, &u);
        let rp: Vec<f64> = prob.b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let aty = newton.a_adj(&y);
        let rd: Vec<RMat> = (0..nb).map(|k| &prob.c_blocks[k] - &aty[k] - &s[k]).collect();
        let bty = newton.b_adj(&y);
        let rf: Vec<f64> = prob.c_free.iter().zip(&bty).map(|(f, v)| f - v).collect();

        let xs: f64 = (0..nb).map(|k| dot(&x[k], &s[k])).sum();
        let mu = xs / big_n as f64;
        let pobj: f64 = (0..nb).map(|k| dot(&prob.c_blocks[k], &x[k])).sum::<f64>()
            + prob.c_free.iter().zip(&u).map(|(a, b)| a * b).sum::<f64>();
        let dobj: f64 = prob.b.iter().zip(&y).map(|(a, b)| a * b).sum();

        let pinf = rp.iter().zip(&prob.b).map(|(r, b)| r.abs() / (1.0 + b.abs())).fold(0.0_f64, f64::max);
        let dinf = ((rd.iter().map(|r| dot(r, r)).sum::<f64>() + rf.iter().map(|v| v * v).sum::<f64>()).sqrt())
            / (1.0 + cnorm);
        let gap = (pobj - dobj).abs().max(xs.abs()) / (1.0 + pobj.abs() + dobj.abs());

        let snapshot = |st| IpmResult {
            status: st,
            x: x.clone(),
            u: u.clone(),
            dobj,
            pinf,
            dinf,
            gap,
            iterations: it,
        };
        if tracing() {
            eprintln!("it {it:3} pobj {pobj:+.6e} dobj {dobj:+.6e} pinf {pinf:.2e} dinf {dinf:.2e} gap {gap:.2e} mu {mu:.2e}");
        }
        let merit = pinf.max(dinf).max(gap);
        if best.as_ref().is_none_or(|(b, _)| merit < *b) {
            best = Some((merit, snapshot(IpmStatus::MaxIter)));
        }
        if pinf <= opts.tol && dinf <= opts.tol && gap <= opts.tol {
            status = IpmStatus::Converged;
            best = Some((merit, snapshot(IpmStatus::Converged)));
            break;
        }

        let sinv: Option<Vec<RMat>> = s.iter().map(inverse_spd).collect();
        let Some(sinv) = sinv else {
            trace("dual slack lost definiteness");
            status = IpmStatus::Numerical;
            break;
        };
        let mmat = newton.schur(&x, &sinv);
        let Some(fac) = newton.factor(&mmat, &bm) else {
            trace("Schur complement singular");
            status = IpmStatus::Numerical;
            break;
        };

        // direction for a given complementarity right-hand side
        let direction = |rc: &[RMat]| -> Option<(Vec<RMat>, Vec<f64>, Vec<f64>, Vec<RMat>)> {
            let tmp: Vec<RMat> = (0..nb).map(|k| (&rc[k] - &x[k] * &rd[k]) * &sinv[k]).collect();
            let atmp = newton.a_op(&tmp, &vec![0.0; nf]);
            let h: Vec<f64> = rp.iter().zip(&atmp).map(|(a, b)| a - b).collect();
            let (dy, du) = newton.solve(&fac, &bm, &h, &rf)?;
            let atdy = newton.a_adj(&dy);
            let ds: Vec<RMat> = (0..nb).map(|k| &rd[k] - &atdy[k]).collect();
            let dx: Vec<RMat> = (0..nb).map(|k| sym(&((&rc[k] - &x[k] * &ds[k]) * &sinv[k]))).collect();
            Some((dx, dy, du, ds))
        };

        let rc_aff: Vec<RMat> = (0..nb).map(|k| -(&x[k] * &s[k])).collect();
        let Some((dx_a, _, _, ds_a)) = direction(&rc_aff) else {
            status = IpmStatus::Numerical;
            break;
        };
        let ap = (0..nb).map(|k| max_step(&x[k], &dx_a[k], 1.0)).fold(1.0_f64, f64::min);
        let ad = (0..nb).map(|k| max_step(&s[k], &ds_a[k], 1.0)).fold(1.0_f64, f64::min);
        let mu_aff: f64 = (0..nb)
            .map(|k| dot(&(&x[k] + dx_a[k].scale(ap)), &(&s[k] + ds_a[k].scale(ad))))
            .sum::<f64>()
            / big_n as f64;
        let sigma = if mu > 0.0 { (mu_aff / mu).clamp(0.0, 1.0).powi(3) } else { 0.0 };

        let rc: Vec<RMat> = (0..nb)
            .map(|k| {
                RMat::identity(prob.sizes[k], prob.sizes[k]).scale(sigma * mu) - &x[k] * &s[k] - &dx_a[k] * &ds_a[k]
            })
            .collect();
        let Some((dx, dy, du, ds)) = direction(&rc) else {
            status = IpmStatus::Numerical;
            break;
        };
        let gamma = 0.95;
        let ap = (0..nb).map(|k| max_step(&x[k], &dx[k], 1e6)).fold(1e6_f64, f64::min);
        let ad = (0..nb).map(|k| max_step(&s[k], &ds[k], 1e6)).fold(1e6_f64, f64::min);
        let ap = (gamma * ap).min(1.0);
        let ad = (gamma * ad).min(1.0);
        if ap < 1e-10 && ad < 1e-10 {
            small_steps += 1;
            if small_steps > 3 {
                status = IpmStatus::Stalled;
                break;
            }
        } else {
            small_steps = 0;
        }
        for k in 0..nb {
            x[k] += dx[k].scale(ap);
            x[k] = sym(&x[k]);
            s[k] += ds[k].scale(ad);
            s[k] = sym(&s[k]);
        }
        for (a, d) in u.iter_mut().zip(&du) {
            *a += ap * d;
        }
        for (a, d) in y.iter_mut().zip(&dy) {
            *a += ad * d;
        }
        iterations = it + 1;
    }

    let (_, mut res) = best.expect("at least one iterate");
    if res.status != IpmStatus::Converged {
        res.status = status;
    }
    res.iterations = iterations;
    res
}
