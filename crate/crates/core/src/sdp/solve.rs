use std::collections::HashMap;

use super::ipm::{solve_cone, ConeProblem, IpmOptions, IpmResult, IpmStatus, SparseRow};
use super::problem::{SdpProblem, SdpSolution, Sense, SolveStatus, SolverOptions};
use crate::algebra::RMat;

/// Boundary repair is tried only for witnesses this close to the cone.
const REPAIR_DEPTH: f64 = 1e-5;
const REPAIR_ROUNDS: usize = 30;

/// Relative residual norm below which a row (or free column) is treated as a
/// linear combination of the ones already kept.
const DEPENDENCE_TOL: f64 = 1e-7;
/// Right-hand-side mismatch on a dependent row that still counts as consistent.
const CONSISTENCY_TOL: f64 = 1e-9;
/// Relative gap at which a stalled run is treated as converged.
const NEAR_GAP: f64 = 1e-6;

type CoordKey = (usize, usize, usize);

/// Row in coordinate form after merging duplicates; free indices refer to the
/// original free variables.
#[derive(Debug, Clone)]
struct Row {
    coords: Vec<(CoordKey, f64)>,
    free: Vec<(usize, f64)>,
    rhs: f64,
}

impl Row {
    fn weighted(&self, free_map: &HashMap<usize, usize>, nfree_coord_base: usize, index: &mut HashMap<CoordKey, usize>) -> Vec<(usize, f64)> {
        let mut v = Vec::with_capacity(self.coords.len() + self.free.len());
        for &(k, a) in &self.coords {
            let n = index.len();
            let id = *index.entry(k).or_insert(n);
            let w = if k.1 == k.2 { 1.0 } else { std::f64::consts::FRAC_1_SQRT_2 };
            v.push((id, a * w));
        }
        for &(j, a) in &self.free {
            if let Some(&jj) = free_map.get(&j) {
                v.push((nfree_coord_base + jj, a));
            }
        }
        v
    }
}

/// Pivoted Cholesky on a Gram matrix with unit diagonal scale. Returns the
/// kept indices (in pivot order) and the lower factor on those indices.
fn pivoted_cholesky(g: &RMat, tol: f64) -> (Vec<usize>, RMat) {
    let n = g.nrows();
    let mut diag: Vec<f64> = (0..n).map(|i| g[(i, i)]).collect();
    let mut l = RMat::zeros(n, n);
    let mut kept: Vec<usize> = Vec::new();
    let mut used = vec![false; n];
    loop {
        let mut best = None;
        for i in 0..n {
            if !used[i] && best.is_none_or(|b: usize| diag[i] > diag[b]) {
                best = Some(i);
            }
        }
        let Some(p) = best else { break };
        if diag[p] <= tol * tol {
            break;
        }
        used[p] = true;
        let k = kept.len();
        let piv = diag[p].sqrt();
        for i in 0..n {
            if used[i] && i != p {
                continue;
            }
            let mut s = g[(i, p)];
            for q in 0..k {
                s -= l[(i, q)] * l[(p, q)];
            }
            l[(i, k)] = if i == p { piv } else { s / piv };
        }
        for i in 0..n {
            if !used[i] {
                diag[i] -= l[(i, k)] * l[(i, k)];
            }
        }
        kept.push(p);
    }
    (kept, l)
}

fn sparse_gram(vectors: &[Vec<(usize, f64)>]) -> RMat {
    let m = vectors.len();
    let mut by_coord: HashMap<usize, Vec<(usize, f64)>> = HashMap::new();
    for (i, v) in vectors.iter().enumerate() {
        for &(k, a) in v {
            by_coord.entry(k).or_default().push((i, a));
        }
    }
    let mut g = RMat::zeros(m, m);
    for list in by_coord.values() {
        for &(i, a) in list {
            for &(j, b) in list {
                g[(i, j)] += a * b;
            }
        }
    }
    g
}

struct Reduced {
    rows: Vec<Row>,
    free_kept: Vec<usize>,
    inconsistency: f64,
}

fn merge_rows(p: &SdpProblem) -> Vec<Row> {
    p.equalities
        .iter()
        .map(|e| {
            let mut acc: HashMap<CoordKey, f64> = HashMap::new();
            for c in &e.coords {
                *acc.entry((c.block, c.row, c.col)).or_insert(0.0) += c.coef;
            }
            let mut coords: Vec<(CoordKey, f64)> = acc.into_iter().filter(|(_, v)| *v != 0.0).collect();
            coords.sort_by_key(|a| a.0);
            let mut facc: HashMap<usize, f64> = HashMap::new();
            for &(j, a) in &e.free {
                *facc.entry(j).or_insert(0.0) += a;
            }
            let mut free: Vec<(usize, f64)> = facc.into_iter().filter(|(_, v)| *v != 0.0).collect();
            free.sort_by_key(|a| a.0);
            Row { coords, free, rhs: e.rhs }
        })
        .collect()
}

/// Drops dependent free columns and dependent rows, and measures the
/// right-hand-side inconsistency of the dropped rows.
fn reduce(p: &SdpProblem) -> Reduced {
    let rows = merge_rows(p);

    // free columns
    let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); p.free_vars];
    for (i, r) in rows.iter().enumerate() {
        for &(j, a) in &r.free {
            cols[j].push((i, a));
        }
    }
    let mut candidates = Vec::new();
    let mut normalized = Vec::new();
    for (j, col) in cols.iter().enumerate() {
        let nrm = col.iter().map(|(_, a)| a * a).sum::<f64>().sqrt();
        if nrm > 0.0 {
            candidates.push(j);
            normalized.push(col.iter().map(|&(i, a)| (i, a / nrm)).collect::<Vec<_>>());
        }
    }
    let g = sparse_gram(&normalized);
    let (kept, _) = pivoted_cholesky(&g, DEPENDENCE_TOL);
    let mut free_kept: Vec<usize> = kept.iter().map(|&k| candidates[k]).collect();
    free_kept.sort_unstable();
    let free_map: HashMap<usize, usize> = free_kept.iter().enumerate().map(|(i, &j)| (j, i)).collect();

    // rows
    let mut index: HashMap<CoordKey, usize> = HashMap::new();
    let base = 1usize << 40;
    let mut inconsistency = 0.0_f64;
    let mut live = Vec::new();
    let mut vecs = Vec::new();
    for r in &rows {
        let w = r.weighted(&free_map, base, &mut index);
        let nrm = w.iter().map(|(_, a)| a * a).sum::<f64>().sqrt();
        if nrm == 0.0 {
            inconsistency = inconsistency.max(r.rhs.abs());
            continue;
        }
        let mut row = r.clone();
        row.free.retain(|(j, _)| free_map.contains_key(j));
        for c in &mut row.coords {
            c.1 /= nrm;
        }
        for f in &mut row.free {
            f.1 /= nrm;
        }
        row.rhs /= nrm;
        vecs.push(w.into_iter().map(|(k, a)| (k, a / nrm)).collect::<Vec<_>>());
        live.push(row);
    }
    let g = sparse_gram(&vecs);
    let (kept, l) = pivoted_cholesky(&g, DEPENDENCE_TOL);
    let k = kept.len();
    if k < live.len() {
        // b_K in pivot order, then z = L_KK⁻¹ b_K; for a dependent row i,
        // its projection coefficients satisfy L_KK^T α = l_i.
        let lkk = RMat::from_fn(k, k, |a, b| l[(kept[a], b)]);
        let bk = nalgebra::DVector::from_iterator(k, kept.iter().map(|&i| live[i].rhs));
        let z = lkk.solve_lower_triangular(&bk).unwrap_or_else(|| nalgebra::DVector::zeros(k));
        let mut is_kept = vec![false; live.len()];
        for &i in &kept {
            is_kept[i] = true;
        }
        for (i, row) in live.iter().enumerate() {
            if is_kept[i] {
                continue;
            }
            let li = nalgebra::DVector::from_iterator(k, (0..k).map(|q| l[(i, q)]));
            let predicted = li.dot(&z);
            let mismatch = (row.rhs - predicted).abs();
            if mismatch > CONSISTENCY_TOL * (1.0 + row.rhs.abs()) {
                inconsistency = inconsistency.max(mismatch);
            }
        }
    }
    let mut kept_sorted = kept;
    kept_sorted.sort_unstable();
    let rows = kept_sorted.into_iter().map(|i| live[i].clone()).collect();
    Reduced {
        rows,
        free_kept,
        inconsistency,
    }
}

fn to_sparse_row(r: &Row, free_offset_map: &HashMap<usize, usize>) -> SparseRow {
    let mut blocks: Vec<(usize, Vec<(usize, usize, f64)>)> = Vec::new();
    for &((b, i, j), a) in &r.coords {
        let v = if i == j { a } else { 0.5 * a };
        match blocks.iter_mut().find(|(bb, _)| *bb == b) {
            Some((_, es)) => es.push((i, j, v)),
            None => blocks.push((b, vec![(i, j, v)])),
        }
    }
    let free = r.free.iter().map(|&(j, a)| (free_offset_map[&j], a)).collect();
    SparseRow { blocks, free }
}

fn block_trace(r: &Row, block: usize) -> f64 {
    r.coords
        .iter()
        .filter(|((b, i, j), _)| *b == block && i == j)
        .map(|(_, a)| *a)
        .sum()
}

/// Least-norm correction of a witness onto the affine subspace of the
/// (reduced, independent) equality rows. Used when a run stops with a clear
/// positive margin but an equality residual above the verification bound.
fn polish(red: &Reduced, blocks: &mut [RMat], free: &mut [f64]) {
    if red.rows.is_empty() {
        return;
    }
    let free_map: HashMap<usize, usize> = red.free_kept.iter().enumerate().map(|(i, &j)| (j, i)).collect();
    let mut index: HashMap<CoordKey, usize> = HashMap::new();
    let vecs: Vec<Vec<(usize, f64)>> = red.rows.iter().map(|r| r.weighted(&free_map, 1usize << 40, &mut index)).collect();
    let g = sparse_gram(&vecs);
    let Some(ch) = g.cholesky() else { return };
    for _ in 0..2 {
        let res = nalgebra::DVector::from_iterator(
            red.rows.len(),
            red.rows.iter().map(|r| {
                let mut v = r.rhs;
                for &((b, i, j), a) in &r.coords {
                    v -= a * blocks[b][(i, j)];
                }
                for &(j, a) in &r.free {
                    v -= a * free[j];
                }
                v
            }),
        );
        let lam = ch.solve(&res);
        for (r, &l) in red.rows.iter().zip(lam.iter()) {
            for &((b, i, j), a) in &r.coords {
                if i == j {
                    blocks[b][(i, i)] += l * a;
                } else {
                    blocks[b][(i, j)] += 0.5 * l * a;
                    blocks[b][(j, i)] += 0.5 * l * a;
                }
            }
            for &(j, a) in &r.free {
                free[j] += l * a;
            }
        }
    }
}

/// Alternating projections between the PSD cone and the equality subspace,
/// for boundary witnesses whose eigenvalues dip just below zero. Stops once
/// the witness verifies.
fn repair(p: &SdpProblem, red: &Reduced, blocks: &mut [RMat], free: &mut [f64], opts: &SolverOptions) -> (f64, f64) {
    let mut check = verify(p, blocks, free);
    for _ in 0..REPAIR_ROUNDS {
        if check.0 <= opts.verify_residual && check.1 >= opts.verify_eigenvalue {
            break;
        }
        for b in blocks.iter_mut() {
            if b.nrows() == 0 {
                continue;
            }
            let e = b.clone().symmetric_eigen();
            let clipped = e.eigenvalues.map(|l| l.max(0.0));
            *b = &e.eigenvectors * RMat::from_diagonal(&clipped) * e.eigenvectors.transpose();
        }
        polish(red, blocks, free);
        check = verify(p, blocks, free);
    }
    check
}

/// Checks a candidate witness against the original data; returns
/// `(max residual, min eigenvalue)`.
pub(crate) fn verify(p: &SdpProblem, blocks: &[RMat], free: &[f64]) -> (f64, f64) {
    let residual = p
        .equalities
        .iter()
        .map(|e| (e.evaluate(blocks, free) - e.rhs).abs())
        .fold(0.0_f64, f64::max);
    let min_eig = blocks
        .iter()
        .map(crate::algebra::matrix::min_eigenvalue_real)
        .fold(f64::INFINITY, f64::min);
    (residual, min_eig)
}

fn objective_value(p: &SdpProblem, blocks: &[RMat], free: &[f64]) -> f64 {
    let mut s = 0.0;
    for c in &p.objective.coords {
        s += c.coef * blocks[c.block][(c.row, c.col)];
    }
    for &(j, a) in &p.objective.free {
        s += a * free[j];
    }
    s
}

/// Solve an [`SdpProblem`]. Feasibility problems go through a phase-I
/// problem: maximize `t` subject to `Z_b − t·I ⪰ 0`, the equalities, and
/// `tr Z_b <= trace_cap`.
pub fn solve(p: &SdpProblem, opts: &SolverOptions) -> SdpSolution {
    if let Err(e) = p.validate() {
        return SdpSolution::failed(SolveStatus::Error, f64::NAN, 0, e.to_string());
    }
    if !(opts.tol > 0.0) {
        return SdpSolution::failed(SolveStatus::Error, f64::NAN, 0, "tolerance must be positive");
    }
    match p.sense {
        Sense::Feasibility => solve_feasibility(p, opts),
        Sense::Optimize => solve_optimize(p, opts),
    }
}

/// A decisive linear inconsistency is INFEASIBLE. Smaller mismatches are
/// left to the cone solve: the dropped rows are still checked when the
/// witness is verified against the original equalities.
fn classify_inconsistent(red: &Reduced, opts: &SolverOptions) -> Option<SdpSolution> {
    if red.inconsistency <= opts.feas_tol {
        return None;
    }
    Some(SdpSolution::failed(
        SolveStatus::Infeasible,
        -red.inconsistency,
        0,
        "equality constraints are linearly inconsistent",
    ))
}

fn solve_feasibility(p: &SdpProblem, opts: &SolverOptions) -> SdpSolution {
    let red = reduce(p);
    if let Some(s) = classify_inconsistent(&red, opts) {
        return s;
    }
    let nb = p.blocks.len();
    let nuser_free = red.free_kept.len();
    let free_map: HashMap<usize, usize> = red.free_kept.iter().enumerate().map(|(i, &j)| (j, i)).collect();
    let t_idx = nuser_free;

    // blocks: user blocks, then one 1×1 cap slack per nonempty user block
    let mut sizes: Vec<usize> = p.blocks.iter().map(|b| b.size).collect();
    let capped: Vec<usize> = (0..nb).filter(|&b| p.blocks[b].size > 0).collect();
    let slack_base = sizes.len();
    sizes.extend(capped.iter().map(|_| 1));

    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for r in &red.rows {
        let mut sr = to_sparse_row(r, &free_map);
        let shift: f64 = (0..nb).map(|b| block_trace(r, b)).sum();
        if shift != 0.0 {
            sr.free.push((t_idx, shift));
        }
        rows.push(sr);
        rhs.push(r.rhs);
    }
    for (k, &b) in capped.iter().enumerate() {
        let n = p.blocks[b].size;
        rows.push(SparseRow {
            blocks: vec![(b, (0..n).map(|i| (i, i, 1.0)).collect()), (slack_base + k, vec![(0, 0, 1.0)])],
            free: vec![(t_idx, n as f64)],
        });
        rhs.push(opts.trace_cap);
    }
    let mut c_free = vec![0.0; nuser_free + 1];
    c_free[t_idx] = -1.0;
    let cone = ConeProblem {
        c_blocks: sizes.iter().map(|&n| RMat::zeros(n, n)).collect(),
        sizes,
        nfree: nuser_free + 1,
        rows,
        b: rhs,
        c_free,
    };
    let res = solve_cone(&cone, &IpmOptions { tol: opts.tol, max_iter: opts.max_iter });
    interpret_phase_one(p, &red, &res, t_idx, opts)
}

fn rebuild_free(p: &SdpProblem, red: &Reduced, u: &[f64]) -> Vec<f64> {
    let mut free = vec![0.0; p.free_vars];
    for (i, &j) in red.free_kept.iter().enumerate() {
        free[j] = u[i];
    }
    free
}

fn interpret_phase_one(p: &SdpProblem, red: &Reduced, res: &IpmResult, t_idx: usize, opts: &SolverOptions) -> SdpSolution {
    let nb = p.blocks.len();
    let t = res.u[t_idx];
    let upper = -res.dobj;
    let converged = res.status == IpmStatus::Converged;
    let mut blocks: Vec<RMat> = (0..nb)
        .map(|b| {
            let n = p.blocks[b].size;
            &res.x[b] + RMat::identity(n, n).scale(t)
        })
        .collect();
    let mut free = rebuild_free(p, red, &res.u);
    let (mut residual, mut min_eig) = verify(p, &blocks, &free);
    if residual > opts.verify_residual {
        polish(red, &mut blocks, &mut free);
        (residual, min_eig) = verify(p, &blocks, &free);
    }
    if min_eig < opts.verify_eigenvalue && min_eig > -REPAIR_DEPTH && t > -REPAIR_DEPTH {
        (residual, min_eig) = repair(p, red, &mut blocks, &mut free, opts);
    }
    let verified = residual <= opts.verify_residual && min_eig >= opts.verify_eigenvalue;
    let margin = if converged { t } else { t.min(upper) };

    let with_witness = |status: SolveStatus, msg: &str| SdpSolution {
        status,
        objective_value: objective_value(p, &blocks, &free),
        blocks: blocks.clone(),
        free: free.clone(),
        margin,
        iterations: res.iterations,
        residual,
        min_eigenvalue: min_eig,
        message: msg.to_string(),
    };

    let primal_ok = res.pinf <= 1e3 * opts.tol;
    let dual_ok = res.dinf <= 1e3 * opts.tol;
    // degenerate problems (no interior) often stall just short of the target
    // accuracy; the best iterate is still usable once the witness checks out
    let converged = converged || (primal_ok && dual_ok && res.gap <= NEAR_GAP);

    // a verified witness with a clear margin settles feasibility even when
    // the run stalled short of its primal target
    if t > opts.feas_tol && verified {
        return with_witness(SolveStatus::Feasible, "strictly feasible");
    }
    if converged || primal_ok || dual_ok {
        if t > opts.feas_tol && primal_ok {
            return if verified {
                with_witness(SolveStatus::Feasible, "strictly feasible")
            } else {
                with_witness(SolveStatus::Error, "witness failed independent verification")
            };
        }
        if upper < -opts.feas_tol && dual_ok {
            return SdpSolution::failed(SolveStatus::Infeasible, margin, res.iterations, "phase-I margin negative");
        }
        if converged {
            if verified {
                return with_witness(SolveStatus::Feasible, "feasible on the boundary (verified witness)");
            }
            let mut s = SdpSolution::failed(SolveStatus::Marginal, margin, res.iterations, "phase-I margin within tolerance band");
            s.residual = residual;
            s.min_eigenvalue = min_eig;
            return s;
        }
    }
    SdpSolution::failed(
        SolveStatus::Error,
        margin,
        res.iterations,
        format!("interior-point method did not converge ({:?})", res.status),
    )
}

fn solve_optimize(p: &SdpProblem, opts: &SolverOptions) -> SdpSolution {
    let red = reduce(p);
    if let Some(s) = classify_inconsistent(&red, opts) {
        return s;
    }
    let nb = p.blocks.len();
    let free_map: HashMap<usize, usize> = red.free_kept.iter().enumerate().map(|(i, &j)| (j, i)).collect();
    let sizes: Vec<usize> = p.blocks.iter().map(|b| b.size).collect();
    let mut c_blocks: Vec<RMat> = sizes.iter().map(|&n| RMat::zeros(n, n)).collect();
    for c in &p.objective.coords {
        if c.row == c.col {
            c_blocks[c.block][(c.row, c.row)] -= c.coef;
        } else {
            c_blocks[c.block][(c.row, c.col)] -= 0.5 * c.coef;
            c_blocks[c.block][(c.col, c.row)] -= 0.5 * c.coef;
        }
    }
    let mut c_free = vec![0.0; red.free_kept.len()];
    for &(j, a) in &p.objective.free {
        match free_map.get(&j) {
            Some(&jj) => c_free[jj] -= a,
            // objective direction outside the span of the constraints: the
            // variable is unconstrained, so the problem is unbounded
            None if a != 0.0 => {
                return SdpSolution::failed(SolveStatus::Error, f64::NAN, 0, "objective is unbounded in a free variable");
            }
            None => {}
        }
    }
    let rows: Vec<SparseRow> = red.rows.iter().map(|r| to_sparse_row(r, &free_map)).collect();
    let b = red.rows.iter().map(|r| r.rhs).collect();
    let cone = ConeProblem {
        sizes,
        nfree: red.free_kept.len(),
        rows,
        b,
        c_blocks,
        c_free,
    };
    let res = solve_cone(&cone, &IpmOptions { tol: opts.tol, max_iter: opts.max_iter });
    let mut blocks: Vec<RMat> = res.x[..nb].to_vec();
    let mut free = rebuild_free(p, &red, &res.u);
    let (mut residual, mut min_eig) = verify(p, &blocks, &free);
    if residual > opts.verify_residual {
        polish(&red, &mut blocks, &mut free);
        (residual, min_eig) = verify(p, &blocks, &free);
    }
    let near = res.pinf <= 1e3 * opts.tol && res.dinf <= 1e3 * opts.tol && res.gap <= NEAR_GAP;
    if res.status == IpmStatus::Converged || near {
        let verified = residual <= opts.verify_residual.max(1e2 * opts.tol) && min_eig >= opts.verify_eigenvalue;
        return SdpSolution {
            status: if verified { SolveStatus::Feasible } else { SolveStatus::Error },
            objective_value: objective_value(p, &blocks, &free),
            blocks,
            free,
            margin: f64::NAN,
            iterations: res.iterations,
            residual,
            min_eigenvalue: min_eig,
            message: if verified { "optimal".into() } else { "optimal point failed verification".into() },
        };
    }
    // classify through phase-I
    let mut fp = p.clone();
    fp.sense = Sense::Feasibility;
    let f = solve_feasibility(&fp, opts);
    if f.status == SolveStatus::Infeasible {
        return f;
    }
    SdpSolution::failed(
        SolveStatus::Error,
        f.margin,
        res.iterations,
        format!("optimization did not converge ({:?}); problem may be unbounded", res.status),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdp::problem::{Constraint, Coord, Objective};

    fn diag_block_problem(sense: Sense) -> SdpProblem {
        let mut p = SdpProblem::new(sense);
        p.add_block("Z", 2);
        p
    }

    #[test]
    fn pivoted_cholesky_detects_duplicate() {
        let g = RMat::from_row_slice(3, 3, &[1.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        let (kept, _) = pivoted_cholesky(&g, 1e-7);
        assert_eq!(kept.len(), 2);
    }

    #[test]
    fn maximize_t_identity() {
        // maximize t s.t. Z + tI = I_2
        let mut p = diag_block_problem(Sense::Optimize);
        let t = p.add_free(1);
        for (i, j, v) in [(0, 0, 1.0), (1, 1, 1.0), (0, 1, 0.0)] {
            p.add_equality(Constraint {
                coords: vec![Coord { block: 0, row: i, col: j, coef: 1.0 }],
                free: if i == j { vec![(t, 1.0)] } else { vec![] },
                rhs: v,
            });
        }
        p.objective = Objective { coords: vec![], free: vec![(t, 1.0)] };
        let s = solve(&p, &SolverOptions::default());
        assert_eq!(s.status, SolveStatus::Feasible);
        assert!((s.objective_value - 1.0).abs() < 1e-7);
    }

    #[test]
    fn redundant_equalities_are_harmless() {
        let mut p = diag_block_problem(Sense::Feasibility);
        for scale in [1.0, 2.0, -3.0] {
            p.add_equality(Constraint {
                coords: vec![
                    Coord { block: 0, row: 0, col: 0, coef: scale },
                    Coord { block: 0, row: 1, col: 1, coef: scale },
                ],
                free: vec![],
                rhs: scale,
            });
        }
        let s = solve(&p, &SolverOptions::default());
        assert_eq!(s.status, SolveStatus::Feasible);
        assert!(s.residual < 1e-8);
    }

    #[test]
    fn inconsistent_equalities_are_infeasible() {
        let mut p = diag_block_problem(Sense::Feasibility);
        for rhs in [1.0, 2.0] {
            p.add_equality(Constraint {
                coords: vec![Coord { block: 0, row: 0, col: 0, coef: 1.0 }],
                free: vec![],
                rhs,
            });
        }
        let s = solve(&p, &SolverOptions::default());
        assert_eq!(s.status, SolveStatus::Infeasible);
        assert!(s.margin < -1e-7);
    }

    #[test]
    fn conic_infeasibility_detected() {
        // tr Z = 1 and Z_00 − Z_11 = 2 force Z_11 = −1/2
        let mut p = diag_block_problem(Sense::Feasibility);
        p.add_equality(Constraint {
            coords: vec![Coord { block: 0, row: 0, col: 0, coef: 1.0 }, Coord { block: 0, row: 1, col: 1, coef: 1.0 }],
            free: vec![],
            rhs: 1.0,
        });
        p.add_equality(Constraint {
            coords: vec![Coord { block: 0, row: 0, col: 0, coef: 1.0 }, Coord { block: 0, row: 1, col: 1, coef: -1.0 }],
            free: vec![],
            rhs: 2.0,
        });
        let s = solve(&p, &SolverOptions::default());
        assert_eq!(s.status, SolveStatus::Infeasible);
        assert!(s.margin < -0.4);
    }

    #[test]
    fn boundary_point_with_verified_witness() {
        // Z_11 = 0 leaves only rank-one Z; margin is zero but a witness exists
        let mut p = diag_block_problem(Sense::Feasibility);
        p.add_equality(Constraint {
            coords: vec![Coord { block: 0, row: 1, col: 1, coef: 1.0 }],
            free: vec![],
            rhs: 0.0,
        });
        p.add_equality(Constraint {
            coords: vec![Coord { block: 0, row: 0, col: 0, coef: 1.0 }],
            free: vec![],
            rhs: 1.0,
        });
        let s = solve(&p, &SolverOptions::default());
        assert_eq!(s.status, SolveStatus::Feasible, "{}", s.message);
        assert!(s.margin.abs() < 1e-6);
    }

    #[test]
    fn invalid_problem_is_error() {
        let mut p = diag_block_problem(Sense::Feasibility);
        p.add_equality(Constraint {
            coords: vec![Coord { block: 3, row: 0, col: 0, coef: 1.0 }],
            free: vec![],
            rhs: 0.0,
        });
        assert_eq!(solve(&p, &SolverOptions::default()).status, SolveStatus::Error);
    }
}
