use crate::algebra::RMat;
use crate::error::{Error, Result};

/// A named real symmetric PSD variable block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSpec {
    pub name: String,
    pub size: usize,
}

/// Coefficient on the coordinate `Z_b[row, col]` (`row <= col`); an
/// off-diagonal coordinate appears twice in the symmetric data matrix, so
/// `coef` here equals `2·F[row][col]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coord {
    pub block: usize,
    pub row: usize,
    pub col: usize,
    pub coef: f64,
}

/// `Σ_b <F_b, Z_b> + Σ_j a_j t_j = rhs`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Constraint {
    pub coords: Vec<Coord>,
    pub free: Vec<(usize, f64)>,
    pub rhs: f64,
}

impl Constraint {
    /// Adds `<F, Z_block>` for a (symmetrized) dense data matrix.
    pub fn add_matrix(&mut self, block: usize, f: &RMat) {
        let n = f.nrows();
        for r in 0..n {
            for c in r..n {
                let v = if r == c { f[(r, r)] } else { f[(r, c)] + f[(c, r)] };
                if v != 0.0 {
                    self.coords.push(Coord { block, row: r, col: c, coef: v });
                }
            }
        }
    }

    /// Symmetric data matrix of this constraint on `block`.
    pub fn data_matrix(&self, block: usize, size: usize) -> RMat {
        let mut f = RMat::zeros(size, size);
        for c in self.coords.iter().filter(|c| c.block == block) {
            if c.row == c.col {
                f[(c.row, c.row)] += c.coef;
            } else {
                f[(c.row, c.col)] += 0.5 * c.coef;
                f[(c.col, c.row)] += 0.5 * c.coef;
            }
        }
        f
    }

    pub fn evaluate(&self, blocks: &[RMat], free: &[f64]) -> f64 {
        let mut s = 0.0;
        for c in &self.coords {
            s += c.coef * blocks[c.block][(c.row, c.col)];
        }
        for &(j, a) in &self.free {
            s += a * free[j];
        }
        s
    }
}

/// Linear functional to maximize.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Objective {
    pub coords: Vec<Coord>,
    pub free: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Feasibility,
    Optimize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpProblem {
    pub blocks: Vec<BlockSpec>,
    pub free_vars: usize,
    pub equalities: Vec<Constraint>,
    pub objective: Objective,
    pub sense: Sense,
}

impl Default for SdpProblem {
    fn default() -> Self {
        Self::new(Sense::Feasibility)
    }
}

impl SdpProblem {
    pub fn new(sense: Sense) -> Self {
        Self {
            blocks: Vec::new(),
            free_vars: 0,
            equalities: Vec::new(),
            objective: Objective::default(),
            sense,
        }
    }

    pub fn add_block(&mut self, name: impl Into<String>, size: usize) -> usize {
        self.blocks.push(BlockSpec { name: name.into(), size });
        self.blocks.len() - 1
    }

    pub fn add_free(&mut self, count: usize) -> usize {
        let first = self.free_vars;
        self.free_vars += count;
        first
    }

    pub fn add_equality(&mut self, c: Constraint) {
        self.equalities.push(c);
    }

    pub fn validate(&self) -> Result<()> {
        let check = |coords: &[Coord], free: &[(usize, f64)], what: &str| -> Result<()> {
            for c in coords {
                let size = self
                    .blocks
                    .get(c.block)
                    .ok_or_else(|| Error::Invalid(format!("{what}: block {} out of range", c.block)))?
                    .size;
                if c.row > c.col || c.col >= size {
                    return Err(Error::Invalid(format!(
                        "{what}: coordinate ({}, {}) invalid for block of size {size}",
                        c.row, c.col
                    )));
                }
                if !c.coef.is_finite() {
                    return Err(Error::Invalid(format!("{what}: non-finite coefficient")));
                }
            }
            for &(j, a) in free {
                if j >= self.free_vars || !a.is_finite() {
                    return Err(Error::Invalid(format!("{what}: free variable {j} invalid")));
                }
            }
            Ok(())
        };
        for (i, e) in self.equalities.iter().enumerate() {
            check(&e.coords, &e.free, &format!("equality {i}"))?;
            if !e.rhs.is_finite() {
                return Err(Error::Invalid(format!("equality {i}: non-finite right-hand side")));
            }
        }
        check(&self.objective.coords, &self.objective.free, "objective")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SolveStatus {
    Feasible,
    Infeasible,
    Marginal,
    Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpSolution {
    pub status: SolveStatus,
    /// Per-block symmetric witness; empty unless a witness was produced.
    pub blocks: Vec<RMat>,
    pub free: Vec<f64>,
    pub objective_value: f64,
    /// Phase-I optimum: the largest uniform eigenvalue shift of all blocks
    /// compatible with the equalities.
    pub margin: f64,
    pub iterations: usize,
    /// Largest absolute equality residual of the witness.
    pub residual: f64,
    /// Smallest block eigenvalue of the witness.
    pub min_eigenvalue: f64,
    pub message: String,
}

impl SdpSolution {
    pub(crate) fn failed(status: SolveStatus, margin: f64, iterations: usize, message: impl Into<String>) -> Self {
        Self {
            status,
            blocks: Vec::new(),
            free: Vec::new(),
            objective_value: f64::NAN,
            margin,
            iterations,
            residual: f64::NAN,
            min_eigenvalue: f64::NAN,
            message: message.into(),
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.status == SolveStatus::Feasible
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Relative duality gap / infeasibility target of the interior-point loop.
    pub tol: f64,
    pub max_iter: usize,
    /// Width of the MARGINAL band around a zero phase-I margin.
    pub feas_tol: f64,
    /// Trace cap `tr Z_b <= R` used by the phase-I problem.
    pub trace_cap: f64,
    /// Witness acceptance: equality residual.
    pub verify_residual: f64,
    /// Witness acceptance: smallest block eigenvalue.
    pub verify_eigenvalue: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iter: 200,
            feas_tol: 1e-7,
            trace_cap: 1e4,
            verify_residual: 1e-7,
            verify_eigenvalue: -1e-8,
        }
    }
}
