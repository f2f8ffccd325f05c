//! Tensor semidefinite programs over the T-PSD cone.
//!
//! ```text
//! (P)  min ⟨C, X⟩  s.t.  ⟨A_i, X⟩ = b_i,  X ⪰_T 0
//! (D)  max bᵀy     s.t.  Σ y_i A_i + S = C,  S ⪰_T 0
//! ```
//!
//! Solving goes through the Fourier domain. A symmetric tensor's Fourier
//! blocks are Hermitian and come in conjugate pairs `(j, p − j)`, so only
//! the leading `⌊p/2⌋ + 1` blocks are kept. Blocks with a distinct partner
//! carry weight 2, and the self-conjugate ones (`j = 0` and, for even `p`,
//! `j = p/2`) are real and carry weight 1. Since `⟨A, X⟩ = (1/p) Σ_j ⟨Â_j, X̂_j⟩`,
//! the weighted blocks form a Hermitian SDP with right-hand side `p·b` and
//! objective scale `1/p` whose optimal value and dual vector coincide with
//! those of the tensor problem.

use crate::csdp::{self, CsdpProblem, CsdpSolution, SolveStatus, SolverOptions, SparseHerm};
use crate::error::{Error, Result};
use crate::spectral::{t_eigenvalues, SYMMETRY_TOL};
use crate::tcore::{fourier_blocks, inner, inverse_fourier_blocks, FourierBlocks, Tensor3, C64};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TsdpProblem {
    pub n: usize,
    pub p: usize,
    #[serde(rename = "C")]
    pub c: Tensor3,
    #[serde(rename = "A")]
    pub a: Vec<Tensor3>,
    pub b: Vec<f64>,
}

impl TsdpProblem {
    pub fn new(c: Tensor3, a: Vec<Tensor3>, b: Vec<f64>) -> Result<Self> {
        let problem = Self {
            n: c.m(),
            p: c.p(),
            c,
            a,
            b,
        };
        problem.validate()?;
        Ok(problem)
    }

    pub fn num_constraints(&self) -> usize {
        self.b.len()
    }

    pub fn validate(&self) -> Result<()> {
        let shape = (self.n, self.n, self.p);
        if self.p == 0 || self.n == 0 {
            return Err(Error::Dimension("empty tensor dimensions".into()));
        }
        if self.a.len() != self.b.len() {
            return Err(Error::Dimension(format!(
                "{} constraint tensors but {} right-hand sides",
                self.a.len(),
                self.b.len()
            )));
        }
        for t in std::iter::once(&self.c).chain(&self.a) {
            if t.shape() != shape {
                return Err(Error::Dimension(format!(
                    "expected {shape:?}, found {:?}",
                    t.shape()
                )));
            }
            let deviation = t.symmetry_deviation();
            if deviation > SYMMETRY_TOL {
                return Err(Error::NotSymmetric { deviation });
            }
        }
        if self.b.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(())
    }

    /// Objective `⟨C, X⟩`.
    pub fn objective(&self, x: &Tensor3) -> Result<f64> {
        inner(&self.c, x)
    }
}

/// `[⟨A_i, X⟩]_i`.
pub fn apply_operator(problem: &TsdpProblem, x: &Tensor3) -> Result<Vec<f64>> {
    problem.a.iter().map(|a| inner(a, x)).collect()
}

/// `Σ y_i A_i`.
pub fn adjoint(problem: &TsdpProblem, y: &[f64]) -> Result<Tensor3> {
    if y.len() != problem.num_constraints() {
        return Err(Error::Dimension(format!(
            "adjoint expects {} multipliers, found {}",
            problem.num_constraints(),
            y.len()
        )));
    }
    let mut out = Tensor3::zeros(problem.n, problem.n, problem.p);
    for (a, &yi) in problem.a.iter().zip(y) {
        if yi != 0.0 {
            out = &out + &a.scaled(yi);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// Bookkeeping that links the reduced Hermitian SDP to the tensor problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionMap {
    pub n: usize,
    pub p: usize,
    pub m: usize,
    pub parity: Parity,
    /// Zero-based Fourier block indices kept by the reduction.
    pub kept_block_indices: Vec<usize>,
    pub weights: Vec<f64>,
}

impl ReductionMap {
    pub fn new(n: usize, p: usize, m: usize) -> Self {
        let kept: Vec<usize> = (0..=p / 2).collect();
        let weights = kept
            .iter()
            .map(|&j| if is_self_conjugate(j, p) { 1.0 } else { 2.0 })
            .collect();
        Self {
            n,
            p,
            m,
            parity: if p.is_multiple_of(2) {
                Parity::Even
            } else {
                Parity::Odd
            },
            kept_block_indices: kept,
            weights,
        }
    }

    pub fn num_blocks(&self) -> usize {
        self.kept_block_indices.len()
    }

    pub fn is_real_block(&self, pos: usize) -> bool {
        is_self_conjugate(self.kept_block_indices[pos], self.p)
    }
}

fn is_self_conjugate(j: usize, p: usize) -> bool {
    j == 0 || 2 * j == p
}

/// Weighted leading Fourier blocks as sparse Hermitian matrices.
fn reduced_blocks(t: &Tensor3, map: &ReductionMap) -> Vec<SparseHerm> {
    let fb = fourier_blocks(t);
    let drop_tol = 1e-14 * (1.0 + fb.max_abs());
    map.kept_block_indices
        .iter()
        .zip(&map.weights)
        .enumerate()
        .map(|(pos, (&j, &w))| {
            let mut block = csdp::hermitian_part(&fb.blocks[j]) * C64::new(w, 0.0);
            if map.is_real_block(pos) {
                block.iter_mut().for_each(|z| z.im = 0.0);
            }
            SparseHerm::from_dense(&block, drop_tol)
        })
        .collect()
}

pub fn reduce_to_csdp(problem: &TsdpProblem) -> Result<(CsdpProblem, ReductionMap)> {
    problem.validate()?;
    let p = problem.p;
    let map = ReductionMap::new(problem.n, p, problem.num_constraints());
    let csdp = CsdpProblem {
        block_sizes: vec![problem.n; map.num_blocks()],
        is_real: (0..map.num_blocks())
            .map(|k| map.is_real_block(k))
            .collect(),
        c: reduced_blocks(&problem.c, &map),
        a: problem.a.iter().map(|a| reduced_blocks(a, &map)).collect(),
        b: problem.b.iter().map(|v| p as f64 * v).collect(),
        obj_scale: 1.0 / p as f64,
    };
    Ok((csdp, map))
}

/// Reference formulation keeping all `p` Fourier blocks with unit weights.
///
/// Its optimal value equals that of the tensor problem. It only serves to
/// cross-check the weighted reduction.
pub fn full_block_csdp(problem: &TsdpProblem) -> Result<CsdpProblem> {
    problem.validate()?;
    let p = problem.p;
    let blocks = |t: &Tensor3| -> Vec<SparseHerm> {
        let fb = fourier_blocks(t);
        let drop_tol = 1e-14 * (1.0 + fb.max_abs());
        fb.blocks
            .iter()
            .map(|b| SparseHerm::from_dense(&csdp::hermitian_part(b), drop_tol))
            .collect()
    };
    Ok(CsdpProblem {
        block_sizes: vec![problem.n; p],
        is_real: vec![false; p],
        c: blocks(&problem.c),
        a: problem.a.iter().map(blocks).collect(),
        b: problem.b.iter().map(|v| p as f64 * v).collect(),
        obj_scale: 1.0 / p as f64,
    })
}

/// Certification level at which a `MAX_ITER` exit still counts as a solution.
pub const NEAR_OPTIMAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TsdpSolution {
    pub x: Tensor3,
    pub y: Vec<f64>,
    pub s: Tensor3,
    pub primal_obj: f64,
    pub dual_obj: f64,
    /// `primal_obj − dual_obj`.
    pub gap: f64,
    /// `‖AX − b‖ / (1 + ‖b‖)`.
    pub primal_residual: f64,
    /// `‖A*y + S − C‖ / (1 + ‖C‖)`.
    pub dual_residual: f64,
    pub min_eig_x: f64,
    pub min_eig_s: f64,
    pub status: SolveStatus,
    pub iterations: usize,
    /// Relative duality gap per interior-point iteration.
    pub gap_history: Vec<f64>,
}

impl TsdpSolution {
    pub fn relative_gap(&self) -> f64 {
        self.gap.abs() / (1.0 + self.primal_obj.abs() + self.dual_obj.abs())
    }

    /// Residuals below `tol` and both tensors T-PSD within `tol`.
    pub fn is_certified(&self, tol: f64) -> bool {
        self.primal_residual <= tol
            && self.dual_residual <= tol
            && self.relative_gap() <= tol
            && self.min_eig_x >= -tol
            && self.min_eig_s >= -tol
    }

    /// `OPTIMAL`, or a `MAX_ITER` exit whose recomputed diagnostics all meet [`NEAR_OPTIMAL_TOL`].
    ///
    /// Gram problems from SOS relaxations often lack strict complementarity, and the
    /// interior-point method can then stall just short of its default tolerances.
    pub fn is_near_optimal(&self) -> bool {
        match self.status {
            SolveStatus::Optimal => true,
            SolveStatus::MaxIter => self.is_certified(NEAR_OPTIMAL_TOL),
            _ => false,
        }
    }
}

/// Rebuilds the tensor-space solution from the reduced one.
pub fn lift_solution(
    problem: &TsdpProblem,
    sol: &CsdpSolution,
    map: &ReductionMap,
) -> Result<TsdpSolution> {
    let lift = |blocks: &[DMatrix<C64>], divide_by_weight: bool| -> Result<Tensor3> {
        let leading = blocks
            .iter()
            .zip(&map.weights)
            .enumerate()
            .map(|(pos, (b, &w))| {
                let scale = if divide_by_weight { 1.0 / w } else { 1.0 };
                let mut h = csdp::hermitian_part(b) * C64::new(scale, 0.0);
                if map.is_real_block(pos) {
                    h.iter_mut().for_each(|z| z.im = 0.0);
                }
                h
            })
            .collect();
        let fb = FourierBlocks::from_leading(map.n, map.n, map.p, leading)?;
        Ok(inverse_fourier_blocks(&fb)?.symmetrized())
    };
    let x = lift(&sol.x, false)?;
    let s = lift(&sol.s, true)?;
    let mut out = evaluate(problem, x, sol.y.clone(), s)?;
    out.status = sol.status;
    out.iterations = sol.iterations;
    out.gap_history = sol
        .history
        .iter()
        .map(|h| (h.primal_obj - h.dual_obj).abs() / (1.0 + h.primal_obj.abs() + h.dual_obj.abs()))
        .collect();
    Ok(out)
}

/// Assembles a solution record with every diagnostic recomputed from `(X, y, S)`.
pub fn evaluate(
    problem: &TsdpProblem,
    x: Tensor3,
    y: Vec<f64>,
    s: Tensor3,
) -> Result<TsdpSolution> {
    let ax = apply_operator(problem, &x)?;
    let b_norm = problem.b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let primal_residual = ax
        .iter()
        .zip(&problem.b)
        .map(|(u, v)| (u - v).powi(2))
        .sum::<f64>()
        .sqrt()
        / (1.0 + b_norm);
    let residual = &(&adjoint(problem, &y)? + &s) - &problem.c;
    let dual_residual = residual.norm() / (1.0 + problem.c.norm());
    let primal_obj = problem.objective(&x)?;
    let dual_obj: f64 = problem.b.iter().zip(&y).map(|(u, v)| u * v).sum();
    let min_eig = |t: &Tensor3| t_eigenvalues(t).map(|v| v.last().copied().unwrap_or(0.0));
    Ok(TsdpSolution {
        min_eig_x: min_eig(&x)?,
        min_eig_s: min_eig(&s)?,
        x,
        y,
        s,
        primal_obj,
        dual_obj,
        gap: primal_obj - dual_obj,
        primal_residual,
        dual_residual,
        status: SolveStatus::MaxIter,
        iterations: 0,
        gap_history: Vec::new(),
    })
}

/// Reduces, solves and lifts.
pub fn solve_tsdp(problem: &TsdpProblem, opts: &SolverOptions) -> Result<TsdpSolution> {
    let (reduced, map) = reduce_to_csdp(problem)?;
    let sol = csdp::solve(&reduced, opts)?;
    lift_solution(problem, &sol, &map)
}

/// `⟨X, S⟩`, which vanishes at a primal-dual optimum.
pub fn check_complementarity(sol: &TsdpSolution) -> Result<f64> {
    inner(&sol.x, &sol.s)
}

/// Random problem with a known optimal value, built from a strictly
/// complementary pair `X ⪰_T 0`, `S ⪰_T 0` with `⟨X, S⟩ = 0`.
///
/// Each leading Fourier block shares an eigenbasis between `X̂_j` and `Ŝ_j`
/// and splits the eigenvalue positions between them. `C` and `b` are then
/// chosen so that `(X, y, S)` satisfies all KKT conditions.
pub fn synthetic_problem<R: Rng + ?Sized>(
    n: usize,
    p: usize,
    m: usize,
    rng: &mut R,
) -> Result<(TsdpProblem, f64)> {
    let kept = p / 2 + 1;
    let mut xs = Vec::with_capacity(kept);
    let mut ss = Vec::with_capacity(kept);
    for j in 0..kept {
        let real = is_self_conjugate(j, p);
        let g = DMatrix::from_fn(n, n, |_, _| {
            let im = if real {
                0.0
            } else {
                rng.random_range(-1.0..1.0)
            };
            C64::new(rng.random_range(-1.0..1.0), im)
        });
        let q = SymmetricEigen::new(csdp::hermitian_part(&g)).eigenvectors;
        let rank = rng.random_range(0..=n);
        let mut x = DMatrix::<C64>::zeros(n, n);
        let mut s = DMatrix::<C64>::zeros(n, n);
        for k in 0..n {
            let v = q.column(k);
            let outer = v * v.adjoint();
            let lam = rng.random_range(0.5..2.0);
            if k < rank {
                x += outer * C64::new(lam, 0.0);
            } else {
                s += outer * C64::new(lam, 0.0);
            }
        }
        if real {
            x.iter_mut().for_each(|z| z.im = 0.0);
            s.iter_mut().for_each(|z| z.im = 0.0);
        }
        xs.push(x);
        ss.push(s);
    }
    let x = inverse_fourier_blocks(&FourierBlocks::from_leading(n, n, p, xs)?)?.symmetrized();
    let s = inverse_fourier_blocks(&FourierBlocks::from_leading(n, n, p, ss)?)?.symmetrized();
    let a: Vec<Tensor3> = (0..m)
        .map(|_| Tensor3::random_symmetric(n, p, rng))
        .collect();
    let y: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut c = s.clone();
    for (ai, &yi) in a.iter().zip(&y) {
        c = &c + &ai.scaled(yi);
    }
    let b = a
        .iter()
        .map(|ai| inner(ai, &x))
        .collect::<Result<Vec<_>>>()?;
    let optimum = inner(&c, &x)?;
    Ok((TsdpProblem::new(c.symmetrized(), a, b)?, optimum))
}
